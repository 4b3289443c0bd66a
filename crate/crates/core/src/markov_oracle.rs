//! Brute-force ASEP generator on a periodic ring and direct extraction of the gap.
//!
//! The generator commutes with translations, so it is block-diagonalized by
//! momentum: orbit representatives span each sector. Eigenvalues are located
//! with a double-precision Schur decomposition and then polished at context
//! precision by Newton's method on the bordered system (A − λ)v = 0, v_p = 1.

use crate::numerics::{from_c64, solve_linear, solve_linear_f64, to_c64, NumericsError, PrecisionContext};
use nalgebra::{Complex as C64, DMatrix, DVector};
use rug::float::Constant;
use rug::{Complex, Float};
use std::collections::HashMap;

pub const MAX_SITES: usize = 16;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("L = {0} exceeds the brute-force limit of 16 sites")]
    DimensionOverflow(usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("eigen-solver failed: {0}")]
    EigenNonconvergence(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Occupation pattern on L sites; bit j set iff site j is occupied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OccupationConfig {
    pub bits: u32,
    pub l: usize,
}

impl OccupationConfig {
    pub fn particles(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Translate every particle one site forward.
    pub fn shifted(&self) -> Self {
        let mask = (1u32 << self.l) - 1;
        let b = ((self.bits << 1) | (self.bits >> (self.l - 1))) & mask;
        Self { bits: b, l: self.l }
    }
}

/// Sparse generator with entries a + b·q (a, b integers), so the matrix can be
/// instantiated exactly at any precision.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    pub l: usize,
    pub n: usize,
    pub q: Float,
    pub configs: Vec<OccupationConfig>,
    /// (row, col, a, b): M[row][col] += a + b·q.
    pub entries: Vec<(usize, usize, i32, i32)>,
}

/// Generator of the ASEP on a ring: forward hops at rate 1, backward at rate q.
pub fn build_generator(l: usize, n: usize, q: &Float, _ctx: &PrecisionContext) -> Result<GeneratorMatrix, OracleError> {
    if l > MAX_SITES {
        return Err(OracleError::DimensionOverflow(l));
    }
    if l < 2 || n == 0 || n >= l {
        return Err(OracleError::InvalidParameters(format!("need 2 <= L <= 16 and 1 <= N <= L-1, got L={l}, N={n}")));
    }
    let configs: Vec<OccupationConfig> = (0u32..(1 << l))
        .filter(|c| c.count_ones() as usize == n)
        .map(|bits| OccupationConfig { bits, l })
        .collect();
    let index: HashMap<u32, usize> = configs.iter().enumerate().map(|(i, c)| (c.bits, i)).collect();
    let mut entries = Vec::new();
    for (col, c) in configs.iter().enumerate() {
        let (mut out_a, mut out_b) = (0, 0);
        for j in 0..l {
            let k = (j + 1) % l;
            let (oj, ok) = ((c.bits >> j) & 1, (c.bits >> k) & 1);
            if oj != ok {
                let row = index[&(c.bits ^ (1 << j) ^ (1 << k))];
                if oj == 1 {
                    entries.push((row, col, 1, 0));
                    out_a += 1;
                } else {
                    entries.push((row, col, 0, 1));
                    out_b += 1;
                }
            }
        }
        entries.push((col, col, -out_a, -out_b));
    }
    Ok(GeneratorMatrix { l, n, q: q.clone(), configs, entries })
}

impl GeneratorMatrix {
    pub fn dimension(&self) -> usize {
        self.configs.len()
    }

    /// Dense double-precision matrix.
    pub fn dense_f64(&self) -> DMatrix<f64> {
        let d = self.dimension();
        let q = self.q.to_f64();
        let mut m = DMatrix::zeros(d, d);
        for &(r, c, a, b) in &self.entries {
            m[(r, c)] += a as f64 + b as f64 * q;
        }
        m
    }

    /// Column sums as exact (a, b) pairs; all vanish for a Markov generator.
    pub fn column_sums(&self) -> Vec<(i64, i64)> {
        let mut s = vec![(0i64, 0i64); self.dimension()];
        for &(_, c, a, b) in &self.entries {
            s[c].0 += a as i64;
            s[c].1 += b as i64;
        }
        s
    }

    fn orbits(&self) -> (Vec<usize>, Vec<(usize, usize)>) {
        // For each config: (orbit index, shift s with config = T^s(rep)).
        let index: HashMap<u32, usize> = self.configs.iter().enumerate().map(|(i, c)| (c.bits, i)).collect();
        let mut reps = Vec::new();
        let mut loc = vec![(usize::MAX, 0); self.dimension()];
        for (i, c) in self.configs.iter().enumerate() {
            if loc[i].0 != usize::MAX {
                continue;
            }
            let o = reps.len();
            reps.push(i);
            let mut cur = *c;
            for s in 0..self.l {
                let j = index[&cur.bits];
                if loc[j].0 == usize::MAX {
                    loc[j] = (o, s);
                }
                cur = cur.shifted();
            }
        }
        (reps, loc)
    }

    /// Orbits compatible with momentum k (period p with k·p ≡ 0 mod L).
    fn sector_basis(&self, k: usize) -> (Vec<usize>, Vec<(usize, usize)>, Vec<Option<usize>>) {
        let (reps, loc) = self.orbits();
        let mut period = vec![0usize; reps.len()];
        for &(o, s) in &loc {
            period[o] = period[o].max(s + 1);
        }
        let mut col_of = vec![None; reps.len()];
        let mut cnt = 0;
        for (o, p) in period.iter().enumerate() {
            if (k * p) % self.l == 0 {
                col_of[o] = Some(cnt);
                cnt += 1;
            }
        }
        (reps, loc, col_of)
    }

    /// Block of the generator at momentum k (translation eigenvalue e^{2πik/L}).
    pub fn sector_matrix_f64(&self, k: usize) -> DMatrix<C64<f64>> {
        let (reps, loc, col_of) = self.sector_basis(k);
        let dim = col_of.iter().flatten().count();
        let q = self.q.to_f64();
        let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
        let rep_set: HashMap<usize, usize> = reps.iter().enumerate().map(|(o, &i)| (i, o)).collect();
        for &(r, c, a, b) in &self.entries {
            let Some(&o_col) = rep_set.get(&c) else { continue };
            let (o_row, s) = loc[r];
            if let (Some(ci), Some(ri)) = (col_of[o_col], col_of[o_row]) {
                let ph = 2.0 * std::f64::consts::PI * (k * s) as f64 / self.l as f64;
                m[(ri, ci)] += C64::from_polar(a as f64 + b as f64 * q, ph);
            }
        }
        m
    }

    /// Same block at `prec` bits.
    pub fn sector_matrix_mp(&self, k: usize, prec: u32) -> Vec<Vec<Complex>> {
        let (reps, loc, col_of) = self.sector_basis(k);
        let dim = col_of.iter().flatten().count();
        let q = Float::with_val(prec, &self.q);
        let mut m = vec![vec![Complex::new(prec); dim]; dim];
        let rep_set: HashMap<usize, usize> = reps.iter().enumerate().map(|(o, &i)| (i, o)).collect();
        let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
        for &(r, c, a, b) in &self.entries {
            let Some(&o_col) = rep_set.get(&c) else { continue };
            let (o_row, s) = loc[r];
            if let (Some(ci), Some(ri)) = (col_of[o_col], col_of[o_row]) {
                let ph = Float::with_val(prec, &two_pi * ((k * s) % self.l) as u32) / self.l as u32;
                let rate = Float::with_val(prec, &q * b) + a;
                let z = Complex::with_val(prec, (Float::with_val(prec, ph.cos_ref()), Float::with_val(prec, ph.sin_ref())));
                m[ri][ci] += z * rate;
            }
        }
        m
    }
}

fn eigenvalues_c64(m: &DMatrix<C64<f64>>) -> Result<Vec<C64<f64>>, OracleError> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::Schur::try_new(m.clone(), 1e-14, 100_000)
        .ok_or_else(|| OracleError::EigenNonconvergence("Schur iteration did not converge".into()))?;
    let t = schur.unpack().1;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Full spectrum in double precision, tagged by momentum sector.
pub fn spectrum_f64(g: &GeneratorMatrix) -> Result<Vec<(usize, C64<f64>)>, OracleError> {
    let mut out = Vec::new();
    for k in 0..g.l {
        for z in eigenvalues_c64(&g.sector_matrix_f64(k))? {
            out.push((k, z));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct OracleGap {
    pub eigenvalue: Complex,
    pub degeneracy: usize,
    /// Momentum sector the value was refined in.
    pub sector: usize,
}

/// Polish an approximate eigenvalue of the sector-k block at context precision.
pub fn refine_eigenvalue(g: &GeneratorMatrix, k: usize, guess: C64<f64>, ctx: &PrecisionContext) -> Result<Complex, OracleError> {
    let a64 = g.sector_matrix_f64(k);
    let n = a64.nrows();
    // Inverse iteration for the eigenvector.
    let shift = guess + C64::new(1e-10, 1e-10);
    let sh = &a64 - DMatrix::from_diagonal_element(n, n, shift);
    let mut v = DVector::from_element(n, C64::new(1.0, 0.3));
    for _ in 0..4 {
        v = solve_linear_f64(&sh, &v)?;
        let nv = v.norm();
        v /= C64::new(nv, 0.0);
    }
    let p = (0..n).max_by(|&i, &j| v[i].norm().partial_cmp(&v[j].norm()).unwrap()).unwrap();
    let vp = v[p];
    v /= vp;

    let wp = ctx.prec() + 32;
    let a = g.sector_matrix_mp(k, wp);
    let mut vm: Vec<Complex> = v.iter().map(|z| from_c64(*z, wp)).collect();
    vm[p] = Complex::with_val(wp, 1);
    let mut lam = from_c64(guess, wp);
    let tol = Float::with_val(wp, &ctx.newton_tol) / 1024u32;
    for _ in 0..ctx.max_newton_iters {
        // F = (A − λ)v; J = [[A − λ, −v], [e_pᵀ, 0]]
        let mut jac = vec![vec![Complex::new(wp); n + 1]; n + 1];
        let mut rhs = vec![Complex::new(wp); n + 1];
        for i in 0..n {
            let mut f = Complex::new(wp);
            for j in 0..n {
                if !a[i][j].is_zero() {
                    f += Complex::with_val(wp, &a[i][j] * &vm[j]);
                }
                jac[i][j] = a[i][j].clone();
            }
            f -= Complex::with_val(wp, &lam * &vm[i]);
            jac[i][i] -= &lam;
            jac[i][n] = Complex::with_val(wp, -&vm[i]);
            rhs[i] = -f;
        }
        jac[n][p] = Complex::with_val(wp, 1);
        let dx = solve_linear(jac, rhs)?;
        for i in 0..n {
            vm[i] += &dx[i];
        }
        lam += &dx[n];
        let step = Float::with_val(wp, dx[n].abs_ref());
        if step <= tol {
            return Ok(Complex::with_val(ctx.prec(), lam));
        }
    }
    Err(OracleError::EigenNonconvergence("bordered Newton did not converge".into()))
}

fn check_q(q: &Float) -> Result<(), OracleError> {
    if q.is_sign_negative() && !q.is_zero() {
        return Err(OracleError::InvalidParameters("q < 0 is not a Markov generator; use oracle_gap_tracked".into()));
    }
    Ok(())
}

/// Eigenvalue with the largest real part strictly below zero, with multiplicity.
pub fn oracle_gap(l: usize, n: usize, q: &Float, ctx: &PrecisionContext) -> Result<OracleGap, OracleError> {
    check_q(q)?;
    let g = build_generator(l, n, q, ctx)?;
    let spec = spectrum_f64(&g)?;
    let scale = spec.iter().map(|(_, z)| z.norm()).fold(1.0, f64::max);
    let zero_tol = 1e-9 * scale;
    let mut cands: Vec<(usize, C64<f64>)> = spec.iter().copied().filter(|(_, z)| z.norm() > zero_tol).collect();
    cands.sort_by(|a, b| b.1.re.partial_cmp(&a.1.re).unwrap().then(b.1.im.partial_cmp(&a.1.im).unwrap()));
    let (k, top) = *cands.first().ok_or_else(|| OracleError::EigenNonconvergence("no nonzero eigenvalue".into()))?;
    let deg_tol = 1e-8 * scale;
    let degeneracy = cands.iter().filter(|(_, z)| (z.re - top.re).abs() < deg_tol).count();
    // Prefer a representative with Im ≥ 0 from the lowest sector.
    let (k, top) = cands
        .iter()
        .copied()
        .filter(|(_, z)| (z.re - top.re).abs() < deg_tol && z.im >= -deg_tol)
        .min_by_key(|(kk, _)| *kk)
        .unwrap_or((k, top));
    let ev = refine_eigenvalue(&g, k, top, ctx)?;
    Ok(OracleGap { eigenvalue: ev, degeneracy, sector: k })
}

/// Gap branch followed continuously in q from the symmetric point q = 1,
/// inside momentum sector 1. Defined for any real q, including q < 0 where the
/// matrix is no longer a Markov generator and branches may cross.
pub fn oracle_gap_tracked(l: usize, n: usize, q: &Float, ctx: &PrecisionContext) -> Result<OracleGap, OracleError> {
    let qt = q.to_f64();
    let steps = ((1.0 - qt).abs() * 400.0).ceil().max(1.0) as usize;
    let one = Float::with_val(ctx.prec(), 1);
    let mut g = build_generator(l, n, &one, ctx)?;
    let mut prev: Option<C64<f64>> = None;
    let mut prev2: Option<C64<f64>> = None;
    for i in 0..=steps {
        let qi = 1.0 + (qt - 1.0) * i as f64 / steps as f64;
        g.q = Float::with_val(ctx.prec(), qi);
        let ev = eigenvalues_c64(&g.sector_matrix_f64(1))?;
        let cur = match (prev, prev2) {
            (None, _) => *ev
                .iter()
                .filter(|z| z.norm() > 1e-9)
                .max_by(|a, b| a.re.partial_cmp(&b.re).unwrap())
                .ok_or_else(|| OracleError::EigenNonconvergence("empty sector".into()))?,
            (Some(p), p2) => {
                let target = match p2 {
                    Some(pp) => p * 2.0 - pp,
                    None => p,
                };
                *ev.iter().min_by(|a, b| (**a - target).norm().partial_cmp(&(**b - target).norm()).unwrap()).unwrap()
            }
        };
        prev2 = prev;
        prev = Some(cur);
    }
    g.q = Float::with_val(ctx.prec(), q);
    let ev = refine_eigenvalue(&g, 1, prev.unwrap(), ctx)?;
    let lam = to_c64(&ev);
    let deg = spectrum_f64(&g)?.iter().filter(|(_, z)| (*z - lam).norm() < 1e-8 * (1.0 + lam.norm()) || (*z - lam.conj()).norm() < 1e-8 * (1.0 + lam.norm())).count();
    Ok(OracleGap { eigenvalue: ev, degeneracy: deg, sector: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn two_site_ring() {
        // Both bonds of the 2-site ring join the same pair of sites, so each
        // state leaves at rate 1 + q and the nonzero eigenvalue is -2(1 + q).
        let c = ctx();
        let q = c.real(0.3);
        let g = build_generator(2, 1, &q, &c).unwrap();
        let m = g.dense_f64();
        let ev = m.complex_eigenvalues();
        let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 2.6).abs() < 1e-14 && re[1].abs() < 1e-14);
        let gap = oracle_gap(2, 1, &q, &c).unwrap();
        let d = Float::with_val(c.prec(), gap.eigenvalue.real() + Float::with_val(c.prec(), &q + 1u32) * 2u32);
        assert!(d.abs().to_f64() < 1e-90);
    }

    #[test]
    fn symmetric_point_closed_form() {
        let c = ctx();
        for l in [4usize, 6, 8] {
            let gap = oracle_gap(l, l / 2, &c.real(1), &c).unwrap();
            let s = Float::with_val(c.prec(), c.pi() / l as u32).sin();
            let want = -Float::with_val(c.prec(), s.square_ref()) * 4u32;
            let d = Float::with_val(c.prec(), gap.eigenvalue.real() - &want).abs();
            assert!(d.to_f64() < 1e-90, "L={l}");
            if l > 4 {
                assert_eq!(gap.degeneracy, 2, "L={l}");
            }
        }
    }

    #[test]
    fn dimension_overflow() {
        let c = ctx();
        assert!(matches!(build_generator(17, 8, &c.real(1), &c), Err(OracleError::DimensionOverflow(17))));
    }

    #[test]
    fn sector_spectrum_matches_dense() {
        let c = ctx();
        let g = build_generator(8, 4, &c.real(0.4), &c).unwrap();
        let mut dense: Vec<C64<f64>> = g.dense_f64().complex_eigenvalues().iter().copied().collect();
        let mut sect: Vec<C64<f64>> = spectrum_f64(&g).unwrap().into_iter().map(|x| x.1).collect();
        assert_eq!(dense.len(), sect.len());
        let key = |z: &C64<f64>| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64);
        dense.sort_by_key(key);
        sect.sort_by_key(key);
        for (a, b) in dense.iter().zip(&sect) {
            assert!((a - b).norm() < 1e-8);
        }
    }

    #[test]
    fn half_filling_gap_is_real() {
        let c = ctx();
        let q = c.real(1.0 - 1.0 / 8f64.sqrt());
        let gap = oracle_gap(8, 4, &q, &c).unwrap();
        assert!(gap.eigenvalue.imag().to_f64().abs() < 1e-80);
        // regression constant from the dense solve (first 15 digits)
        assert!((gap.eigenvalue.real().to_f64() + 0.486_134_561_456_108_9).abs() < 1e-12, "{}", gap.eigenvalue.real());
    }

    #[test]
    fn tracked_branch_agrees_for_positive_q() {
        let c = PrecisionContext::with_bits(128).unwrap();
        let q = c.real(0.55);
        let a = oracle_gap(6, 3, &q, &c).unwrap();
        let b = oracle_gap_tracked(6, 3, &q, &c).unwrap();
        let d = Complex::with_val(128, &a.eigenvalue - &b.eigenvalue);
        assert!(crate::numerics::cabs_f64(&d) < 1e-30);
    }

    #[test]
    fn negative_q_rejected_by_plain_oracle() {
        let c = ctx();
        assert!(matches!(oracle_gap(4, 2, &c.real(-0.5), &c), Err(OracleError::InvalidParameters(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn column_sums_vanish(l in 2usize..11, nfrac in 0.0f64..1.0, q in 0.0f64..2.0) {
            let n = 1 + ((l - 2) as f64 * nfrac).round() as usize;
            let c = PrecisionContext::with_bits(64).unwrap();
            let g = build_generator(l, n, &c.real(q), &c).unwrap();
            prop_assert!(g.column_sums().iter().all(|&s| s == (0, 0)));
            for &(r, col, a, b) in &g.entries {
                if r != col { prop_assert!(a >= 0 && b >= 0); }
            }
        }

        #[test]
        fn spectrum_in_left_half_plane(l in 3usize..9, q in 0.0f64..1.5) {
            let c = PrecisionContext::with_bits(64).unwrap();
            let g = build_generator(l, l / 2, &c.real(q), &c).unwrap();
            let spec = spectrum_f64(&g).unwrap();
            prop_assert!(spec.iter().all(|(_, z)| z.re < 1e-9));
            prop_assert!(spec.iter().any(|(_, z)| z.norm() < 1e-9));
        }
    }
}

//! Finite-μ edge Bethe equations.
//!
//! With w_0 and the w_j, j ∈ ℤ*, the equations read g(w_a) = 2πi(a + ½),
//! and after removing the sgn(Im w) iπ term every root satisfies
//! rest(w_a) ≡ 0 mod 2πi, where
//! rest(w) = −μ(w+μ)/8 − μζ(1/2)/√(2π) + Σ_k [μ/√(2πk)·(k>0) − log((w_k−w+μ)/(w−w_k+μ))].
//! The coupled system is solved in double precision by continuation in μ
//! from the erf zeroes. The tail k > M uses the μ = 0 asymptotic zeroes,
//! summed directly up to K and through power moments beyond; its effect on
//! the roots is estimated by redoing the last Newton step with the
//! one-term model 4√(±iπk).

use super::tail::{tail_sums, ModelPoint, TailModel};
use super::zeros::erf_zeros;
use super::{EdgeError, EdgeRootSet, W0Policy};
use crate::numerics::{cabs, cabs_f64, from_c64, sqrt_2pi, solve_linear_f64, to_c64, zeta_half, PrecisionContext};
use nalgebra::{Complex as C64, DMatrix, DVector};
use rug::float::Constant;
use rug::{Complex, Float};
use std::collections::BTreeMap;
use std::f64::consts::PI;

type C = C64<f64>;

/// Continuation starts here, with the erf zeroes as initial guess.
pub const MU_START: f64 = 0.02;
/// Below this μ, w_0 is pinned to its asymptote −8iπ/μ; above, it is solved for.
pub const MU_RELEASE: f64 = 0.3;
/// Number of power moments in the far tail.
const MOMENTS: usize = 48;
const ZETA_HALF: f64 = -1.460_354_508_809_586_8;

/// Model roots k > M: explicit up to K, power moments beyond.
struct Tail {
    m: usize,
    /// Largest |w ± μ| for which the moment series converges well.
    reach: f64,
    plus: Vec<C>,
    minus: Vec<C>,
    /// Σ_{M<k≤K} 1/√(2πk) + Σ_{k>K} [1/√(2πk) − 2(1/w_k + 1/w_{−k})].
    linear: C,
    /// A_p = Σ_{k>K}(w_k^{−p} + w_{−k}^{−p}), p = 2..; index p−2.
    moments: Vec<C>,
}

impl Tail {
    fn build(model: &TailModel, m: usize, reach: f64) -> Result<Self, EdgeError> {
        // |w_K| ≥ 2·reach, so the moment series converges like 2^{-p}
        let k_direct = ((reach * 2.0 / 4.0).powi(2) / PI).ceil().max(8.0 * m as f64) as usize;
        let prec = 80;
        let root = |k: usize, positive: bool| to_c64(&model.root(&Float::with_val(prec, k), positive, prec));
        let plus: Vec<C> = (m + 1..=k_direct).map(|k| root(k, true)).collect();
        let minus: Vec<C> = (m + 1..=k_direct).map(|k| root(k, false)).collect();
        let direct: f64 = (m + 1..=k_direct).map(|k| 1.0 / (2.0 * PI * k as f64).sqrt()).sum();
        let (sums, _) = tail_sums(
            |t| {
                let pt = model.point(t, prec);
                let (ip, im) = (Complex::with_val(prec, pt.plus.recip_ref()), Complex::with_val(prec, pt.minus.recip_ref()));
                let mut out = Vec::with_capacity(MOMENTS);
                // 1/√(2πt) − 2(1/w₊ + 1/w₋)
                out.push(Complex::with_val(prec, &pt.inv_diff_plus + &pt.inv_diff_minus) * (-2i32));
                out.push(pt.inv_sq_sum);
                let (mut pp, mut pm) = (Complex::with_val(prec, ip.square_ref()), Complex::with_val(prec, im.square_ref()));
                for _ in 3..=MOMENTS {
                    pp *= &ip;
                    pm *= &im;
                    out.push(Complex::with_val(prec, &pp + &pm));
                }
                out
            },
            MOMENTS,
            k_direct,
            prec,
        )?;
        let linear = C::new(direct, 0.0) + to_c64(&sums[0]);
        let moments = sums[1..].iter().map(to_c64).collect();
        Ok(Self { m, reach, plus, minus, linear, moments })
    }

    /// Tail of rest(w) over k > M and its w-derivative.
    fn eval(&self, w: C, mu: f64) -> (C, C) {
        let (wpm, wmm) = (w + mu, w - mu);
        let one = C::new(1.0, 0.0);
        let mut val = self.linear * mu;
        let mut der = C::new(0.0, 0.0);
        for r in self.plus.iter().chain(&self.minus) {
            val += ((r - wpm) / (r - wmm)).ln();
            der += -one / (r - wpm) + one / (r - wmm);
        }
        let (mut ap, mut am) = (wpm, wmm);
        for (i, a) in self.moments.iter().enumerate() {
            let p = (i + 2) as f64;
            let (dp, dm) = (ap, am);
            ap *= wpm;
            am *= wmm;
            val -= (ap - am) / p * a;
            der -= (dp - dm) * a;
        }
        (val, der)
    }
}

/// Residual vector (mod 2πi) over the active roots and its Jacobian.
fn system(w: &[C], active: &[usize], tail: &Tail, mu: f64) -> (DVector<C>, DMatrix<C>) {
    let base: f64 = -mu * ZETA_HALF / (2.0 * PI).sqrt() + (1..=tail.m).map(|j| mu / (2.0 * PI * j as f64).sqrt()).sum::<f64>();
    let n = active.len();
    let mut g = DVector::from_element(n, C::new(0.0, 0.0));
    let mut jac = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    let pos: BTreeMap<usize, usize> = active.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let one = C::new(1.0, 0.0);
    for (row, &a) in active.iter().enumerate() {
        let x = w[a];
        let (tv, td) = tail.eval(x, mu);
        let mut val = -(x + mu) * (mu / 8.0) + base + tv;
        let mut diag = C::new(-mu / 8.0, 0.0) + td;
        for (b, &y) in w.iter().enumerate() {
            if b == a {
                continue;
            }
            val -= ((y - x + mu) / (x - y + mu)).ln();
            let t = one / (y - x + mu) + one / (x - y + mu);
            diag += t;
            if let Some(&col) = pos.get(&b) {
                jac[(row, col)] = -t;
            }
        }
        val.im -= 2.0 * PI * (val.im / (2.0 * PI)).round();
        g[row] = val;
        jac[(row, row)] = diag;
    }
    (g, jac)
}

fn max_norm(v: impl IntoIterator<Item = C>) -> f64 {
    v.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Damped Newton on the active roots; returns the final residual norm.
fn newton(w: &mut [C], active: &[usize], tail: &Tail, mu: f64, iters: usize) -> Result<f64, EdgeError> {
    let (mut g, mut jac) = system(w, active, tail, mu);
    let mut res = max_norm(g.iter().copied());
    for _ in 0..iters {
        if res < 1e-12 {
            break;
        }
        let dw = solve_linear_f64(&jac, &(-&g)).map_err(|_| EdgeError::Nonconvergence("singular edge Jacobian".into()))?;
        let mut lambda = 1.0;
        loop {
            let mut trial = w.to_vec();
            for (i, &a) in active.iter().enumerate() {
                trial[a] += dw[i] * lambda;
            }
            let (g2, j2) = system(&trial, active, tail, mu);
            let r2 = max_norm(g2.iter().copied());
            if r2.is_finite() && (r2 < res || lambda < 1e-3) {
                w.copy_from_slice(&trial);
                g = g2;
                jac = j2;
                res = r2;
                break;
            }
            lambda /= 2.0;
        }
    }
    if !(res < 1e-9) {
        return Err(EdgeError::Nonconvergence(format!("edge Newton residual {res:e} at mu = {mu}")));
    }
    Ok(res)
}

struct State {
    mu: f64,
    w: Vec<C>,
    w0_free: bool,
}

impl State {
    fn active(&self, m: usize) -> Vec<usize> {
        (0..=2 * m).filter(|&i| i != m || self.w0_free).collect()
    }

    fn reach(&self, m: usize) -> f64 {
        self.active(m).iter().map(|&a| self.w[a].norm()).fold(0.0, f64::max) + self.mu
    }

    fn settle(&mut self, m: usize, tail: &Tail) -> Result<f64, EdgeError> {
        if !self.w0_free {
            self.w[m] = C::new(0.0, -8.0 * PI / self.mu);
        }
        if self.reach(m) > tail.reach {
            return Err(EdgeError::Nonconvergence(format!("roots left the tail window at mu = {}", self.mu)));
        }
        let active = self.active(m);
        newton(&mut self.w, &active, tail, self.mu, 60)
    }
}

fn initial_state(m: usize, mu: f64, ctx: &PrecisionContext) -> Result<State, EdgeError> {
    let z = erf_zeros(m, &ctx.at_bits(64))?;
    let mut w = vec![C::new(0.0, 0.0); 2 * m + 1];
    for (i, zj) in z.iter().enumerate() {
        let v = to_c64(zj);
        w[m + i + 1] = v;
        w[m - i - 1] = v.conj();
    }
    w[m] = C::new(0.0, -8.0 * PI / mu);
    Ok(State { mu, w, w0_free: mu > MU_RELEASE })
}

fn state_from_seed(seed: &EdgeRootSet) -> Option<State> {
    let mu = seed.mu.as_ref()?.to_f64();
    if !(mu > 0.0) {
        return None;
    }
    let m = seed.m;
    let mut w = vec![C::new(0.0, 0.0); 2 * m + 1];
    for j in -(m as i64)..=m as i64 {
        w[(j + m as i64) as usize] = to_c64(seed.w.get(&j)?);
    }
    Some(State { mu, w, w0_free: seed.w0_policy == W0Policy::Continued })
}

/// Solve the edge Bethe equations at asymmetry μ with truncation M.
pub fn solve_edge_roots(mu: &Float, m: usize, ctx: &PrecisionContext, seed: Option<&EdgeRootSet>) -> Result<EdgeRootSet, EdgeError> {
    let target = mu.to_f64();
    if !(target > 0.0) || !target.is_finite() {
        return Err(EdgeError::InvalidParameters(format!("mu = {target} must be positive and finite")));
    }
    if m < 8 {
        return Err(EdgeError::InvalidParameters(format!("M = {m} must be at least 8")));
    }
    let mut warnings = Vec::new();
    let mut st = match seed.filter(|s| s.m == m).and_then(state_from_seed) {
        Some(s) => s,
        None => initial_state(m, MU_START.min(target), ctx)?,
    };
    let model = TailModel::ErfAsymptotic;
    // room for the outermost roots, a released w_0 and the largest μ on the path
    let reach = |st: &State| 1.25 * (st.reach(m).max(8.0 * PI / MU_RELEASE) + st.mu.max(target));
    let mut tail = Tail::build(&model, m, reach(&st))?;
    st.settle(m, &tail)?;
    // multiplicative steps in μ, stopping at the release point on the way up
    let mut h: f64 = 0.1;
    let mut prev: Option<(f64, Vec<C>)> = None;
    let mut halvings = 0;
    while (st.mu / target).ln().abs() > 1e-12 {
        let up = target > st.mu;
        if up && !st.w0_free && st.mu >= MU_RELEASE * (1.0 - 1e-12) {
            let before = st.w[m];
            st.w0_free = true;
            st.settle(m, &tail)?;
            let jump = (st.w[m] - before).norm() / before.norm();
            if jump > 0.25 {
                warnings.push(format!("w0 moved by {:.0}% when released from its asymptote at mu = {MU_RELEASE}", jump * 100.0));
            }
            prev = None;
        }
        let mut next = if up { st.mu * (1.0 + h) } else { st.mu / (1.0 + h) };
        if (up && next > target) || (!up && next < target) {
            next = target;
        }
        if up && !st.w0_free && next > MU_RELEASE {
            next = MU_RELEASE;
        }
        let mut trial = State { mu: next, w: st.w.clone(), w0_free: st.w0_free };
        if let Some((pm, pw)) = &prev {
            let r = (next - st.mu) / (st.mu - pm);
            for (t, (a, b)) in trial.w.iter_mut().zip(st.w.iter().zip(pw)) {
                *t = a + (a - b) * r;
            }
        }
        if trial.reach(m) > tail.reach {
            tail = Tail::build(&model, m, reach(&trial))?;
        }
        let guess = trial.w.clone();
        let accepted = trial.settle(m, &tail).is_ok() && {
            let jump = (m - 8..=m + 8).filter(|&i| i != m).map(|i| (trial.w[i] - guess[i]).norm()).fold(0.0, f64::max);
            jump < 0.5
        };
        if accepted {
            prev = Some((st.mu, std::mem::replace(&mut st.w, trial.w)));
            st.mu = next;
            h = (h * 1.5).min(0.25);
            halvings = 0;
        } else {
            h /= 2.0;
            halvings += 1;
            if halvings > 30 {
                return Err(EdgeError::Nonconvergence(format!("edge continuation stalled at mu = {}", st.mu)));
            }
        }
    }
    st.mu = target;
    let res = st.settle(m, &tail)?;
    // tail error: one Newton step from the solution with the one-term tail
    let alt = Tail::build(&TailModel::OneTerm, m, tail.reach)?;
    let active = st.active(m);
    let (g, jac) = system(&st.w, &active, &alt, target);
    let dw = solve_linear_f64(&jac, &(-g)).map_err(|_| EdgeError::Nonconvergence("singular edge Jacobian".into()))?;
    let tail_error = max_norm(dw.iter().copied());
    if !st.w0_free {
        warnings.push(format!("w0 pinned to the asymptote -8i*pi/mu (mu < {MU_RELEASE})"));
    }
    let p = ctx.prec();
    let w = (0..=2 * m).map(|i| (i as i64 - m as i64, from_c64(st.w[i], p))).collect();
    Ok(EdgeRootSet {
        mu: Some(Float::with_val(p, target)),
        m,
        w,
        tail_model: model,
        tail_error,
        residual: res,
        w0_policy: if st.w0_free { W0Policy::Continued } else { W0Policy::Asymptote },
        warnings,
    })
}

/// Value of g(w) and the estimated error of its tail correction.
#[derive(Clone, Debug)]
pub struct GValue {
    pub value: Complex,
    pub tail_error: f64,
}

/// g(w) at context precision: the root sum over |k| ≤ M (w_0 included when
/// present) plus the model tail over k > M.
pub fn edge_g(w: &Complex, set: &EdgeRootSet, mu: &Float, ctx: &PrecisionContext) -> Result<GValue, EdgeError> {
    let p = ctx.prec();
    let wp = p + 16;
    let w = Complex::with_val(wp, w);
    let mu = Float::with_val(wp, mu);
    let pi = Float::with_val(wp, Constant::Pi);
    let mut g = Complex::with_val(wp, (0, if w.imag().is_sign_negative() { -pi.clone() } else { pi.clone() }));
    let wpm = Complex::with_val(wp, &w + &mu);
    let wmm = Complex::with_val(wp, &w - &mu);
    g -= Complex::with_val(wp, &wpm * &mu) / 8u32;
    g -= Float::with_val(wp, zeta_half(ctx) * &mu) / sqrt_2pi(wp);
    let s2pi = sqrt_2pi(wp);
    for j in 1..=set.m {
        g += Float::with_val(wp, &mu / Float::with_val(wp, Float::with_val(wp, j).sqrt() * &s2pi));
    }
    for (_, wk) in set.w.iter() {
        let num = Complex::with_val(wp, Complex::with_val(wp, wk - &w) + &mu);
        let den = Complex::with_val(wp, Complex::with_val(wp, &w - wk) + &mu);
        if cabs_f64(&num) == 0.0 || cabs_f64(&den) == 0.0 {
            return Err(EdgeError::InvalidParameters("w coincides with w_k ± mu".into()));
        }
        g -= (num / den).ln();
    }
    let eps = crate::numerics::pow2(-(wp as i32), wp);
    // μ/√(2πt) + Σ_± [log(1 − (w+μ)/W_±) − log(1 − (w−μ)/W_±)], expanded in
    // powers of 1/W when that converges fast, so that the O(t^{-1/2}) and
    // O(t^{-1}) parts cancel analytically
    let term = |t: &Float, pt: &ModelPoint| -> Complex {
        let small = [&pt.plus, &pt.minus].iter().all(|r| {
            cabs_f64(&Complex::with_val(wp, &wpm / *r)) < 0.5 && cabs_f64(&Complex::with_val(wp, &wmm / *r)) < 0.5
        });
        if !small {
            let mut v = Complex::with_val(wp, Float::with_val(wp, &mu / Float::with_val(wp, Float::with_val(wp, t.sqrt_ref()) * &s2pi)));
            for r in [&pt.plus, &pt.minus] {
                v += Complex::with_val(wp, 1u32 - Complex::with_val(wp, &wpm / r)).ln();
                v -= Complex::with_val(wp, 1u32 - Complex::with_val(wp, &wmm / r)).ln();
            }
            return v;
        }
        let mut v = Complex::with_val(wp, &pt.inv_diff_plus + &pt.inv_diff_minus) * Float::with_val(wp, &mu * -2i32);
        let sq = Complex::with_val(wp, Complex::with_val(wp, wpm.square_ref()) - Complex::with_val(wp, wmm.square_ref()));
        v -= sq * &pt.inv_sq_sum / 2u32;
        let (ip, im) = (Complex::with_val(wp, pt.plus.recip_ref()), Complex::with_val(wp, pt.minus.recip_ref()));
        let (mut a, mut b) = (Complex::with_val(wp, wpm.square_ref()), Complex::with_val(wp, wmm.square_ref()));
        let (mut rp, mut rm) = (Complex::with_val(wp, ip.square_ref()), Complex::with_val(wp, im.square_ref()));
        for k in 3u32..4 * wp {
            a *= &wpm;
            b *= &wmm;
            rp *= &ip;
            rm *= &im;
            let x = Complex::with_val(wp, &a - &b) * Complex::with_val(wp, &rp + &rm) / k;
            let stop = cabs(&x) < Float::with_val(wp, cabs(&v) * &eps);
            v -= x;
            if stop {
                break;
            }
        }
        v
    };
    let model = set.tail_model.clone();
    let two_term = |t: &Float| {
        let (p_, m_) = (TailModel::two_term(t, true, wp), TailModel::two_term(t, false, wp));
        let (ip, im) = (Complex::with_val(wp, p_.recip_ref()), Complex::with_val(wp, m_.recip_ref()));
        let pi = Float::with_val(wp, Constant::Pi);
        let lead = |s: i32| Complex::with_val(wp, Complex::with_val(wp, (0, Float::with_val(wp, &pi * t) * s)).sqrt() * 4u32).recip();
        ModelPoint {
            inv_diff_plus: ip.clone() - lead(1),
            inv_diff_minus: im.clone() - lead(-1),
            inv_sq_sum: Complex::with_val(wp, ip.square_ref()) + Complex::with_val(wp, im.square_ref()),
            plus: p_,
            minus: m_,
        }
    };
    let (tail, em_err) = tail_sums(|t| vec![term(t, &model.point(t, wp))], 1, set.m, wp)?;
    // tail error: the set's model against the two-term asymptote, over the
    // directly summed range only
    let k_direct = (4 * set.m).max(256);
    let mut diff = Complex::new(wp);
    for k in set.m + 1..=k_direct {
        let t = Float::with_val(wp, k);
        diff += term(&t, &model.point(&t, wp)) - term(&t, &two_term(&t));
    }
    g += &tail[0];
    let tail_error = cabs_f64(&diff) + em_err;
    Ok(GValue { value: Complex::with_val(p, g), tail_error })
}

/// As `edge_g`, refusing when the tail estimate exceeds `tol`.
pub fn edge_g_checked(w: &Complex, set: &EdgeRootSet, mu: &Float, tol: f64, ctx: &PrecisionContext) -> Result<GValue, EdgeError> {
    let g = edge_g(w, set, mu, ctx)?;
    if g.tail_error > tol {
        return Err(EdgeError::TruncationTooSmall { estimate: g.tail_error, tolerance: tol });
    }
    Ok(g)
}

//! Exact small-μ expansion of the reduced Wronskian equation.
//!
//! Unknowns are parametrized through the shifted variable u with
//! α(x) = i·e^{(xμ + μ²/4)/8}·A(−i(x + μ/2)); the reflection symmetry of α
//! then says that A has real coefficients, so every unknown is real. At each
//! order n the equation α·R[β] + R[α]·β = C/2 (R[p](x) = conj p(−x̄)) at order
//! n−1 and the x⁻¹ normalization at order n are solved together. Coefficients
//! live in ℚ(i)[(2π)^{±1/2}] and every linear system separates by grade into
//! purely rational elimination.

mod affine;
mod exact;

pub use affine::Var;
pub use exact::ExactCoeff;

use crate::numerics::{NumericsError, PrecisionContext};
use affine::{ap_add, ap_conj_reflect, ap_mul, ap_trim, solve_graded, APoly, Affine, QuadSink};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::{Duration, Instant};

pub const DEFAULT_ORDER_CAP: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum SeriesError {
    #[error("order_max must be an even integer >= 2, got {0}")]
    InvalidOrder(usize),
    #[error("order {requested} exceeds cap {cap}")]
    OrderCap { requested: usize, cap: usize },
    #[error("inconsistent linear system: {0}")]
    Inconsistent(String),
    #[error("unknowns left undetermined: {0}")]
    Underdetermined(String),
    #[error("quadratic terms fail to cancel at order {0}")]
    QuadraticResidue(i32),
    #[error("e1 coefficient of mu^{0} violates realness or evenness")]
    RealnessViolation(usize),
    #[error("degree law violated at order {0}")]
    DegreeLaw(i32),
    #[error("division by a non-monomial coefficient")]
    NonMonomialDivisor,
    #[error("cannot parse exact coefficient token {0:?}")]
    Parse(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Which variable a polynomial series is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyVariable {
    /// The original variable x.
    X,
    /// The shifted variable u, x = iu − μ/2.
    U,
}

/// Σ_n μⁿ p_n(var) with polynomial coefficients p_n (index = degree).
#[derive(Clone, Debug, PartialEq)]
pub struct MuPolySeries {
    pub min_order: i32,
    pub variable: PolyVariable,
    pub coeffs: Vec<Vec<ExactCoeff>>,
}

impl MuPolySeries {
    pub fn order(&self, n: i32) -> Option<&[ExactCoeff]> {
        let i = n - self.min_order;
        if i < 0 {
            return None;
        }
        self.coeffs.get(i as usize).map(Vec::as_slice)
    }

    pub fn max_order(&self) -> i32 {
        self.min_order + self.coeffs.len() as i32 - 1
    }

    pub fn degree(&self, n: i32) -> Option<usize> {
        self.order(n).and_then(|p| p.iter().rposition(|c| !c.is_zero()))
    }
}

#[derive(Clone, Debug)]
pub struct SeriesResult {
    pub order_max: usize,
    /// α_n(x).
    pub alpha: MuPolySeries,
    /// A_n(u), real coefficients.
    pub alpha_shifted: MuPolySeries,
    /// β_n(x).
    pub beta: MuPolySeries,
    /// C_n for n = −1, 0, 1, … (index 0 is order −1).
    pub c_wronskian: Vec<ExactCoeff>,
    /// c_n, the x⁻² coefficient of Q at large x, n = −1, 0, 1, … (index 0 is order −1).
    pub c_asymptotic: Vec<ExactCoeff>,
    /// e₁ coefficient of μ^k at index k.
    pub e1: Vec<ExactCoeff>,
    /// Wall time of each solve step (orders −1 upward).
    pub step_times: Vec<Duration>,
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

fn binom(n: u32, k: u32) -> Integer {
    Integer::from(Integer::binomial_u(n, k))
}

/// (−1)^m 2^m (2m)!/m!, the large-x moments of the erf asymptotics.
fn moment(m: u32) -> Integer {
    let v = (Integer::from(1) << m) * factorial(2 * m) / factorial(m);
    if m % 2 == 1 {
        -v
    } else {
        v
    }
}

/// μ-expansion of e^{((x + hμ)² − x²)/8} through μ^{n_max}; entry m is the
/// polynomial in x multiplying μ^m.
pub fn gaussian_shift_expand(shift: &Rational, n_max: usize) -> Vec<Vec<Rational>> {
    // exponent = μ·(h x/4) + μ²·(h²/8)
    let lin = Rational::from(shift / 4u32);
    let quad = Rational::from(shift * shift) / 8u32;
    (0..=n_max)
        .map(|m| {
            let mut p = vec![Rational::new(); m + 1];
            for b in 0..=m / 2 {
                let a = m - 2 * b;
                let mut c = Rational::from(rug::ops::Pow::pow(&lin, a as u32));
                c *= Rational::from(rug::ops::Pow::pow(&quad, b as u32));
                c /= factorial(a as u32) * factorial(b as u32);
                p[a] += c;
            }
            p
        })
        .collect()
}

/// Table of G_{m,d}(x) = [μ^m] i·(−i)^d·e^{(xμ+μ²/4)/8}·(x + μ/2)^d.
struct GTable {
    e: Vec<Vec<Rational>>,
}

impl GTable {
    fn new(n_max: usize) -> Self {
        Self { e: gaussian_shift_expand(&rat(1, 2), n_max) }
    }

    fn poly(&self, m: usize, d: u32) -> Vec<ExactCoeff> {
        // i·(−i)^d = i^{1-d}
        let phase = match (1 - d as i64).rem_euclid(4) {
            0 => ExactCoeff::one(),
            1 => ExactCoeff::i(),
            2 => ExactCoeff::rational(rat(-1, 1)),
            _ => ExactCoeff::i().scale(&rat(-1, 1)),
        };
        let mut out = vec![Rational::new(); d as usize + m + 1];
        for r in 0..=(m.min(d as usize)) {
            let c = Rational::from(binom(d, r as u32)) / (Integer::from(1) << r as u32);
            let em = &self.e[m - r];
            for (k, ek) in em.iter().enumerate() {
                out[d as usize - r + k] += Rational::from(&c * ek);
            }
        }
        out.into_iter().map(|r| phase.scale(&r)).collect()
    }
}

fn const_poly(p: &[ExactCoeff]) -> APoly {
    p.iter().cloned().map(Affine::constant).collect()
}

fn to_exact(p: &APoly) -> Option<Vec<ExactCoeff>> {
    let mut out: Vec<ExactCoeff> = p.iter().map(|a| a.is_constant().then(|| a.c.clone())).collect::<Option<_>>()?;
    while out.last().is_some_and(ExactCoeff::is_zero) {
        out.pop();
    }
    Some(out)
}

/// [p(x)·Σ_m (−1)^m 2^m (2m)!/(m! x^{2m+1})]₊ times 4/√(2π).
fn bracket_plus(p: &APoly) -> APoly {
    let mut out: APoly = vec![Affine::default(); p.len().saturating_sub(1)];
    let k = ExactCoeff::monomial(-1, rat(4, 1), Rational::new());
    for (d, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut m = 0u32;
        while d as i64 - 2 * m as i64 - 1 >= 0 {
            let e = d - 2 * m as usize - 1;
            out[e].add_assign(&c.scale(&k.scale(&Rational::from(moment(m)))));
            m += 1;
        }
    }
    ap_trim(&mut out);
    out
}

fn beta_affine(alpha_n: &APoly, n: i32) -> APoly {
    let mut b = bracket_plus(alpha_n);
    if n == 0 {
        if b.is_empty() {
            b.push(Affine::default());
        }
        b[0].add_assign(&Affine::constant(ExactCoeff::one()));
    }
    b
}

/// β at order n from α at order n: δ_{n0} + (4/√(2π))[α_n S]₊.
pub fn beta_from_alpha(alpha: &MuPolySeries, n: i32) -> Option<Vec<ExactCoeff>> {
    let a = const_poly(alpha.order(n)?);
    to_exact(&beta_affine(&a, n))
}

/// c_n = −(4/√(2π)) Σ_{m≥1} (−1)^m 2^m (2m)!/m!·[x^{2m−1}]α_n.
fn c_from_alpha(alpha_n: &[ExactCoeff]) -> ExactCoeff {
    let mut acc = ExactCoeff::zero();
    let mut m = 1u32;
    while (2 * m - 1) as usize <= alpha_n.len().saturating_sub(1) {
        if let Some(c) = alpha_n.get((2 * m - 1) as usize) {
            acc += &c.scale(&Rational::from(moment(m)));
        }
        m += 1;
    }
    &acc * &ExactCoeff::monomial(-1, rat(-4, 1), Rational::new())
}

struct Solver {
    g: GTable,
    values: HashMap<Var, Affine>,
    alpha_cache: HashMap<i32, APoly>,
}

impl Solver {
    fn value(&self, v: Var) -> Affine {
        self.values.get(&v).cloned().unwrap_or_else(|| Affine::var(v))
    }

    fn alpha(&mut self, n: i32) -> APoly {
        if let Some(p) = self.alpha_cache.get(&n) {
            return p.clone();
        }
        let mut out: APoly = Vec::new();
        for k in -1..=n {
            let m = (n - k) as usize;
            for d in 0..=(k + 1) as u32 {
                let a = self.value(Var::A { n: k, d });
                let gp = self.g.poly(m, d);
                let term: APoly = gp.iter().map(|c| a.scale(c)).collect();
                ap_add(&mut out, &term);
            }
        }
        ap_trim(&mut out);
        if out.iter().all(Affine::is_constant) {
            self.alpha_cache.insert(n, out.clone());
        }
        out
    }

    fn step(&mut self, n: i32) -> Result<(), SeriesError> {
        let mut eqs: Vec<Affine> = Vec::new();
        let no = n - 1;
        if no >= -1 {
            let mut quad = QuadSink::new();
            let mut lhs: APoly = Vec::new();
            for i in -1..=n {
                let j = no - i;
                if j < -1 {
                    continue;
                }
                let ai = self.alpha(i);
                let aj = self.alpha(j);
                let bj = beta_affine(&aj, j);
                if bj.is_empty() || ai.is_empty() {
                    continue;
                }
                let t1 = ap_mul(&ai, &ap_conj_reflect(&bj), &mut quad);
                let t2 = ap_mul(&ap_conj_reflect(&ai), &bj, &mut quad);
                ap_add(&mut lhs, &t1);
                ap_add(&mut lhs, &t2);
            }
            if !quad.is_empty() {
                return Err(SeriesError::QuadraticResidue(n));
            }
            if lhs.is_empty() {
                lhs.push(Affine::default());
            }
            // − C_{n−1}/2 with C = CRe + i·CIm
            lhs[0].sub_assign(&Affine::var(Var::CRe(no)).scale(&ExactCoeff::rational(rat(1, 2))));
            lhs[0].sub_assign(&Affine::var(Var::CIm(no)).scale(&ExactCoeff::i().scale(&rat(1, 2))));
            for c in &lhs {
                eqs.push(c.re());
                eqs.push(c.im());
            }
        }
        let an = self.alpha(n);
        let mut norm = Affine::default();
        for (d, c) in an.iter().enumerate().step_by(2) {
            norm.add_assign(&c.scale(&ExactCoeff::rational(Rational::from(moment(d as u32 / 2)))));
        }
        if n == -1 {
            norm.add_assign(&Affine::constant(ExactCoeff::monomial(3, Rational::new(), rat(1, 1))));
        }
        eqs.push(norm.re());
        eqs.push(norm.im());

        let sol = solve_graded(&eqs)?;
        for v in self.values.values_mut() {
            *v = v.substitute(&sol);
        }
        self.values.extend(sol);
        self.alpha_cache.retain(|_, p| p.iter().all(Affine::is_constant));

        // Everything of order n−1 must now be pinned down.
        let mut missing = Vec::new();
        if no >= -1 {
            for d in 0..=(no + 1) as u32 {
                let v = Var::A { n: no, d };
                if !self.values.get(&v).is_some_and(Affine::is_constant) {
                    missing.push(v);
                }
            }
            for v in [Var::CRe(no), Var::CIm(no)] {
                if !self.values.get(&v).is_some_and(Affine::is_constant) {
                    missing.push(v);
                }
            }
        }
        if !missing.is_empty() {
            return Err(SeriesError::Underdetermined(format!("{missing:?} after step {n}")));
        }
        Ok(())
    }
}

/// Solve orders −1 … order_max−1 and assemble e₁ through μ^{order_max}.
pub fn run_series(order_max: usize) -> Result<SeriesResult, SeriesError> {
    run_series_capped(order_max, DEFAULT_ORDER_CAP)
}

pub fn run_series_capped(order_max: usize, cap: usize) -> Result<SeriesResult, SeriesError> {
    if order_max < 2 || order_max % 2 == 1 {
        return Err(SeriesError::InvalidOrder(order_max));
    }
    if order_max > cap {
        return Err(SeriesError::OrderCap { requested: order_max, cap });
    }
    let last_step = order_max as i32 - 1;
    let mut s = Solver {
        g: GTable::new(order_max + 2),
        values: HashMap::new(),
        alpha_cache: HashMap::new(),
    };
    let mut step_times = Vec::new();
    for n in -1..=last_step {
        let t0 = Instant::now();
        s.step(n)?;
        step_times.push(t0.elapsed());
    }
    let top = last_step - 1;
    let mut alpha = Vec::new();
    let mut shifted = Vec::new();
    let mut beta = Vec::new();
    let mut cw = Vec::new();
    let mut ca = Vec::new();
    for n in -1..=top {
        let a = to_exact(&s.alpha(n)).ok_or_else(|| SeriesError::Underdetermined(format!("alpha at order {n}")))?;
        if a.len() != (n + 2) as usize {
            return Err(SeriesError::DegreeLaw(n));
        }
        let u: Vec<ExactCoeff> = (0..=(n + 1) as u32)
            .map(|d| s.values[&Var::A { n, d }].c.clone())
            .collect();
        let b = to_exact(&beta_affine(&const_poly(&a), n)).expect("constant input");
        let c = &s.values[&Var::CRe(n)].c + &s.values[&Var::CIm(n)].c.mul_i();
        ca.push(c_from_alpha(&a));
        cw.push(c);
        alpha.push(a);
        shifted.push(u);
        beta.push(b);
    }
    // e₁ = −(2π)² − (iπ/2 + c/8) μ²
    let mut e1 = vec![ExactCoeff::zero(); order_max + 1];
    e1[0] = ExactCoeff::monomial(4, rat(-1, 1), Rational::new());
    for (idx, c) in ca.iter().enumerate() {
        let n = idx as i32 - 1;
        let k = (n + 2) as usize;
        let mut v = c.scale(&rat(-1, 8));
        if n == 0 {
            v -= &ExactCoeff::monomial(2, Rational::new(), rat(1, 4));
        }
        e1[k] = v;
    }
    for (k, c) in e1.iter().enumerate() {
        if !c.is_real() || (k % 2 == 1 && !c.is_zero()) {
            return Err(SeriesError::RealnessViolation(k));
        }
    }
    let mk = |variable, coeffs| MuPolySeries { min_order: -1, variable, coeffs };
    Ok(SeriesResult {
        order_max,
        alpha: mk(PolyVariable::X, alpha),
        alpha_shifted: mk(PolyVariable::U, shifted),
        beta: mk(PolyVariable::X, beta),
        c_wronskian: cw,
        c_asymptotic: ca,
        e1,
        step_times,
    })
}

/// Exact residual of e^{((x+μ)²−x²)/8}·conj(α(−x̄−μ)) + α(x) at every order
/// where α is fully known. Each entry should be the zero polynomial.
pub fn alpha_symmetry_residual(res: &SeriesResult) -> Vec<Vec<ExactCoeff>> {
    let top = res.alpha.max_order();
    let gauss = gaussian_shift_expand(&rat(1, 1), (top + 1) as usize);
    let mut out: Vec<Vec<ExactCoeff>> = vec![Vec::new(); (top + 2) as usize];
    let add = |out: &mut Vec<Vec<ExactCoeff>>, n: i32, deg: usize, c: &ExactCoeff| {
        let p = &mut out[(n + 1) as usize];
        if p.len() <= deg {
            p.resize(deg + 1, ExactCoeff::zero());
        }
        p[deg] += c;
    };
    for b in -1..=top {
        let ab = res.alpha.order(b).unwrap();
        for (e, c) in ab.iter().enumerate() {
            add(&mut out, b, e, c);
            let cc = c.conj();
            for r in 0..=e {
                let sign = if e % 2 == 0 { 1 } else { -1 };
                let t = cc.scale(&Rational::from(binom(e as u32, r as u32) * sign));
                for (m, gm) in gauss.iter().enumerate() {
                    let n = b + r as i32 + m as i32;
                    if n > top {
                        break;
                    }
                    for (gd, gc) in gm.iter().enumerate() {
                        if *gc != 0 {
                            add(&mut out, n, e - r + gd, &t.scale(gc));
                        }
                    }
                }
            }
        }
    }
    for p in &mut out {
        while p.last().is_some_and(ExactCoeff::is_zero) {
            p.pop();
        }
    }
    out
}

/// z^K coefficients (K = 0..=k_max) of 4π²z/((z + 2iπ)(1 − e^{−z})).
pub fn bernoulli_resummation_coeffs(k_max: usize) -> Vec<ExactCoeff> {
    // b_k: z/(1 − e^{−z}) = Σ b_k z^k
    let d: Vec<Rational> = (0..=k_max)
        .map(|k| {
            let v = Rational::from((Integer::from(1), factorial(k as u32 + 1)));
            if k % 2 == 1 {
                -v
            } else {
                v
            }
        })
        .collect();
    let mut b = vec![Rational::from(1)];
    for k in 1..=k_max {
        let mut acc = Rational::new();
        for i in 1..=k {
            acc -= Rational::from(&d[i] * &b[k - i]);
        }
        b.push(acc);
    }
    (0..=k_max)
        .map(|kk| {
            let mut acc = ExactCoeff::zero();
            for j in 0..=kk {
                // (−1)^j (2iπ)^{−(j+1)} · 4π² = (−1)^j i^{−(j+1)} s^{2 − 2j}
                let ipow = (-(j as i64 + 1)).rem_euclid(4);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                let r = Rational::from(&b[kk - j] * sign);
                let t = match ipow {
                    0 => ExactCoeff::monomial(2 - 2 * j as i32, r, Rational::new()),
                    1 => ExactCoeff::monomial(2 - 2 * j as i32, Rational::new(), r),
                    2 => ExactCoeff::monomial(2 - 2 * j as i32, -r, Rational::new()),
                    _ => ExactCoeff::monomial(2 - 2 * j as i32, Rational::new(), -r),
                };
                acc += &t;
            }
            acc
        })
        .collect()
}

/// Top-degree coefficients of α_n scaled as 4^{n+1}/√(2π) for n = −1..=n_max.
pub fn top_degree_scaled(res: &SeriesResult, n_max: i32) -> Vec<ExactCoeff> {
    (-1..=n_max.min(res.alpha.max_order()))
        .map(|n| {
            let p = res.alpha.order(n).unwrap();
            let top = p.last().cloned().unwrap_or_default();
            let f = Rational::from(Integer::from(1) << (2 * (n + 1)) as u32);
            top.scale(&f).shift(-1)
        })
        .collect()
}

/// Numeric e₁(μ) with an error estimate from the last nonzero term.
#[derive(Clone, Debug)]
pub struct E1Value {
    pub value: Float,
    pub truncation_error: Float,
    /// Ratio of the last two nonzero terms exceeds 1/2.
    pub divergence_warning: bool,
}

pub fn evaluate_e1(res: &SeriesResult, mu: &Float, ctx: &PrecisionContext) -> E1Value {
    let p = ctx.prec() + 16;
    let mut sum = Float::new(p);
    let mut terms: Vec<Float> = Vec::new();
    let mut mpow = Float::with_val(p, 1);
    for c in &res.e1 {
        if !c.is_zero() {
            let v = Float::with_val(p, c.to_complex(p).real()) * &mpow;
            sum += &v;
            terms.push(v);
        }
        mpow *= mu;
    }
    let last = terms.last().map(|t| Float::with_val(p, t.abs_ref())).unwrap_or_else(|| Float::new(p));
    let warn = if terms.len() >= 3 && !mu.is_zero() {
        let prev = Float::with_val(p, terms[terms.len() - 2].abs_ref());
        !prev.is_zero() && Float::with_val(p, &last / &prev) > 0.5
    } else {
        false
    };
    E1Value {
        value: Float::with_val(ctx.prec(), sum),
        truncation_error: Float::with_val(ctx.prec(), last),
        divergence_warning: warn,
    }
}

/// Summary of the density p_μ(x) = −(μ/8π²)·e^{−x²/8}·A_μ(x) on a uniform grid.
#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub mu: f64,
    pub integral: f64,
    pub min_value: f64,
    /// max |p_μ − p₀| with p₀(x) = e^{−x²/8}/(2√(2π)) the μ→0 limit.
    pub max_dev_from_limit: f64,
    pub grid_points: usize,
}

/// Trapezoidal integral and extrema of p_μ over [−x_max, x_max].
pub fn p_density_check(res: &SeriesResult, mu: f64, x_max: f64, points: usize, ctx: &PrecisionContext) -> DensityReport {
    let p = ctx.prec();
    let coeffs: Vec<Vec<Float>> = res
        .alpha_shifted
        .coeffs
        .iter()
        .map(|poly| poly.iter().map(|c| Float::with_val(p, c.to_complex(p).real())).collect())
        .collect();
    let mu_f = Float::with_val(p, mu);
    let pi = ctx.pi();
    let pref = -Float::with_val(p, &mu_f / (Float::with_val(p, pi.square_ref()) * 8u32));
    let limit_pref = Float::with_val(p, 1u32 / (crate::numerics::sqrt_2pi(p) * 2u32));
    let h = 2.0 * x_max / (points - 1) as f64;
    let mut integral = Float::new(p);
    let mut min_v = f64::INFINITY;
    let mut max_dev: f64 = 0.0;
    for i in 0..points {
        let x = Float::with_val(p, -x_max + i as f64 * h);
        let mut a_val = Float::new(p);
        let mut mpow = Float::with_val(p, &mu_f).recip();
        for poly in &coeffs {
            let mut pv = Float::new(p);
            for c in poly.iter().rev() {
                pv *= &x;
                pv += c;
            }
            a_val += Float::with_val(p, &pv * &mpow);
            mpow *= &mu_f;
        }
        let gauss = Float::with_val(p, -Float::with_val(p, x.square_ref()) / 8u32).exp();
        let val = Float::with_val(p, &pref * &a_val) * &gauss;
        let w = if i == 0 || i + 1 == points { 0.5 } else { 1.0 };
        integral += Float::with_val(p, &val * w);
        let lim = Float::with_val(p, &limit_pref * &gauss);
        min_v = min_v.min(val.to_f64());
        max_dev = max_dev.max(Float::with_val(p, &val - &lim).abs().to_f64());
    }
    integral *= h;
    DensityReport {
        mu,
        integral: integral.to_f64(),
        min_value: min_v,
        max_dev_from_limit: max_dev,
        grid_points: points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn gaussian_shift_low_orders() {
        let e = gaussian_shift_expand(&q(1, 1), 3);
        assert_eq!(e[0], vec![q(1, 1)]);
        assert_eq!(e[1], vec![q(0, 1), q(1, 4)]);
        assert_eq!(e[2], vec![q(1, 8), q(0, 1), q(1, 32)]);
    }

    #[test]
    fn leading_orders_match_known_values() {
        let r = run_series(4).unwrap();
        let s3 = ExactCoeff::monomial(3, q(-1, 1), Rational::new());
        assert_eq!(r.alpha_shifted.order(-1).unwrap(), &[s3]);
        assert_eq!(
            r.alpha_shifted.order(0).unwrap(),
            &[ExactCoeff::zero(), ExactCoeff::monomial(1, q(1, 4), Rational::new())]
        );
        assert_eq!(r.c_wronskian[0], ExactCoeff::monomial(5, q(2, 1), Rational::new()));
        assert_eq!(r.c_wronskian[1], ExactCoeff::zero());
        let c1 = &ExactCoeff::monomial(5, q(1, 24), Rational::new()) + &ExactCoeff::monomial(1, q(-1, 2), Rational::new());
        assert_eq!(r.c_wronskian[2], c1);
    }

    #[test]
    fn wronskian_constant_higher_orders() {
        let r = run_series(8).unwrap();
        let m = |k, a, b| ExactCoeff::monomial(k, q(a, b), Rational::new());
        assert!(r.c_wronskian[3].is_zero());
        assert_eq!(r.c_wronskian[4], m(-3, -1, 2));
        assert!(r.c_wronskian[5].is_zero());
        let mut c5 = m(5, 1, 193536);
        c5 += &m(1, 1, 1536);
        c5 += &m(-3, 1, 96);
        c5 += &m(-7, -9, 8);
        assert_eq!(r.c_wronskian[6], c5);
    }

    #[test]
    fn e1_low_orders() {
        let r = run_series(4).unwrap();
        assert_eq!(r.e1[0], ExactCoeff::monomial(4, q(-1, 1), Rational::new()));
        assert_eq!(r.e1[2], ExactCoeff::rational(q(-1, 2)));
        let want = ExactCoeff::from_pi_powers(&[(q(-1, 16), -2), (q(1, 96), 0)]);
        assert_eq!(r.e1[4], want);
    }

    #[test]
    fn alpha_one_matches_displayed_expansion() {
        // A_1(u) = ((2π)²+24)/(96√(2π)) − ((2π)²+24)/(384√(2π)) u²
        let r = run_series(4).unwrap();
        let a1 = r.alpha_shifted.order(1).unwrap();
        let c0 = &ExactCoeff::monomial(3, q(1, 96), Rational::new()) + &ExactCoeff::monomial(-1, q(24, 96), Rational::new());
        let c2 = &ExactCoeff::monomial(3, q(-1, 384), Rational::new()) + &ExactCoeff::monomial(-1, q(-24, 384), Rational::new());
        assert_eq!(a1[0], c0);
        assert!(a1[1].is_zero());
        assert_eq!(a1[2], c2);
    }

    #[test]
    fn beta_minus_one_vanishes() {
        let r = run_series(2).unwrap();
        assert!(beta_from_alpha(&r.alpha, -1).unwrap().is_empty());
        assert_eq!(r.beta.order(0).unwrap()[0].is_zero(), false);
    }

    #[test]
    fn odd_and_invalid_orders_rejected() {
        assert!(matches!(run_series(3), Err(SeriesError::InvalidOrder(3))));
        assert!(matches!(run_series(0), Err(SeriesError::InvalidOrder(0))));
        assert!(matches!(run_series(26), Err(SeriesError::OrderCap { .. })));
    }

    #[test]
    fn symmetry_residual_vanishes() {
        let r = run_series(8).unwrap();
        for (i, p) in alpha_symmetry_residual(&r).iter().enumerate() {
            assert!(p.is_empty(), "order {}: {:?}", i as i32 - 1, p);
        }
    }

    #[test]
    fn beta_degree_drops_by_one() {
        let r = run_series(8).unwrap();
        for n in 0..=r.beta.max_order() {
            let da = r.alpha.degree(n).unwrap();
            let db = r.beta.degree(n).unwrap_or(0);
            assert!(db + 1 <= da.max(1), "n={n}");
        }
    }

    #[test]
    fn top_degree_follows_bernoulli_resummation() {
        let r = run_series(10).unwrap();
        let ours = top_degree_scaled(&r, 6);
        let want = bernoulli_resummation_coeffs(ours.len() - 1);
        assert_eq!(ours, want);
    }

    #[test]
    fn evaluation_at_zero_and_evenness() {
        let r = run_series(8).unwrap();
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let z = evaluate_e1(&r, &ctx.real(0), &ctx);
        let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
        assert!((z.value.to_f64() + four_pi2).abs() < 1e-12);
        let a = evaluate_e1(&r, &ctx.real(0.7), &ctx).value;
        let b = evaluate_e1(&r, &ctx.real(-0.7), &ctx).value;
        assert_eq!(a, b);
    }

    #[test]
    fn density_limit_and_normalization() {
        let r = run_series(8).unwrap();
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let d = p_density_check(&r, 0.5, 40.0, 801, &ctx);
        assert!((d.integral - 1.0).abs() < 1e-10, "{d:?}");
        assert!(d.min_value > -1e-12);
        let d0 = p_density_check(&r, 1e-4, 40.0, 801, &ctx);
        assert!(d0.max_dev_from_limit < 1e-4);
    }
}

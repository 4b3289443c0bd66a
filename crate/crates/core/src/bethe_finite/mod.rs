//! Finite-size Bethe equations for the gap state at half filling.
//!
//! The roots solve ((1−y_j)/(1−qy_j))^L = (−1)^{N−1} Π_k (y_j − qy_k)/(y_k − qy_j)
//! with q = 1 − μ/√L. Newton works on the logarithmic form with residuals
//! reduced mod 2πi, so no quantum numbers are needed while iterating; they
//! are read off the counting function afterwards.

mod baxter;
pub mod track;

pub use baxter::{
    baxter_p_poly, eigenvalue_from_q, eigenvalue_from_t, poly_eval, transfer_t_poly, transfer_t_unchecked, wronskian_residuals,
    BaxterPolynomials,
};

use crate::numerics::{cabs, from_c64, solve_linear, to_c64, NumericsError, PrecisionContext};
use nalgebra::Complex as C64;
use rug::float::Constant;
use rug::{Complex, Float};

/// Smallest asymmetry accepted; q = 1 degenerates the parametrization.
pub const MU_MIN: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum BetheError {
    #[error("Newton did not converge: {0}")]
    Nonconvergence(String),
    #[error("two Bethe roots collided")]
    RootCollision,
    #[error("point lies within {0:e} of a branch cut of the counting function")]
    BranchCut(f64),
    #[error("root at a pole of the eigenvalue formula")]
    PoleProximity,
    #[error("off-branch: {0}")]
    OffBranch(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("eigenvalue {bethe} disagrees with the brute-force gap {oracle}")]
    WrongState { bethe: String, oracle: String },
    #[error("division remainder {0:e} too large; bad root set")]
    DivisionRemainder(f64),
    #[error("singular linear system (pivot magnitude {0:e})")]
    Singular(f64),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Converged gap root set.
#[derive(Clone, Debug)]
pub struct BetheRootSet {
    pub l: usize,
    pub n: usize,
    pub mu: Float,
    pub q: Float,
    /// Regular roots ordered by quantum number, then the isolated root y_N.
    pub roots: Vec<Complex>,
    /// L·f(y_j)/(2πi), rounded to the nearest half-integer.
    pub quantum_numbers: Vec<f64>,
    /// Max modulus of the logarithmic Bethe equations (mod 2πi).
    pub residual: Float,
}

impl BetheRootSet {
    pub fn prec(&self) -> u32 {
        self.q.prec()
    }

    /// √L(y + 1) for every root: the edge-scaled coordinates.
    pub fn edge_coordinates(&self) -> Vec<Complex> {
        let p = self.prec();
        let s = Float::with_val(p, self.l).sqrt();
        self.roots.iter().map(|y| Complex::with_val(p, y + 1u32) * &s).collect()
    }
}

pub fn q_from_mu(l: usize, mu: &Float, prec: u32) -> Float {
    let s = Float::with_val(prec, l).sqrt();
    1u32 - Float::with_val(prec, mu / s)
}

/// Log-form residual (mod 2πi) and Jacobian at working precision.
fn system_mp(y: &[Complex], l: usize, q: &Float, wp: u32) -> (Vec<Complex>, Vec<Vec<Complex>>) {
    let n = y.len();
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let shift = Complex::with_val(wp, (0, Float::with_val(wp, Constant::Pi) * (n as u32 - 1)));
    let mut g = Vec::with_capacity(n);
    let mut jac = vec![vec![Complex::new(wp); n]; n];
    for j in 0..n {
        let yj = &y[j];
        let a = Complex::with_val(wp, 1u32 - yj);
        let b = Complex::with_val(wp, 1u32 - Complex::with_val(wp, yj * q));
        let mut val = (Complex::with_val(wp, a.ln_ref()) - Complex::with_val(wp, b.ln_ref())) * l as u32 - &shift;
        let mut diag = (Complex::with_val(wp, q / &b) - a.recip()) * l as u32;
        for k in 0..n {
            if k == j {
                continue;
            }
            let d = Complex::with_val(wp, yj - Complex::with_val(wp, &y[k] * q));
            let dt = Complex::with_val(wp, &y[k] - Complex::with_val(wp, yj * q));
            val -= Complex::with_val(wp, &d / &dt).ln();
            let inv_d = Complex::with_val(wp, d.recip_ref());
            let inv_dt = Complex::with_val(wp, dt.recip_ref());
            diag -= Complex::with_val(wp, &inv_dt * q) + &inv_d;
            jac[j][k] = inv_d * q + inv_dt;
        }
        let turns = Float::with_val(wp, val.imag() / &two_pi).round();
        let im = Float::with_val(wp, val.imag() - Float::with_val(wp, &turns * &two_pi));
        val = Complex::with_val(wp, (val.real(), &im));
        g.push(val);
        jac[j][j] = diag;
    }
    (g, jac)
}

fn max_abs(v: &[Complex], prec: u32) -> Float {
    v.iter().map(cabs).fold(Float::new(prec), |m, x| if x > m { x } else { m })
}

/// Newton polish at context precision from an approximate root set.
pub fn polish(y0: &[C64<f64>], l: usize, q: &Float, ctx: &PrecisionContext) -> Result<(Vec<Complex>, Float), BetheError> {
    let wp = ctx.prec() + 32;
    let mut y: Vec<Complex> = y0.iter().map(|z| from_c64(*z, wp)).collect();
    polish_mp(&mut y, l, q, ctx)?;
    let (g, _) = system_mp(&y, l, q, wp);
    let res = max_abs(&g, ctx.prec());
    Ok((y.into_iter().map(|z| Complex::with_val(ctx.prec(), z)).collect(), res))
}

fn polish_mp(y: &mut [Complex], l: usize, q: &Float, ctx: &PrecisionContext) -> Result<(), BetheError> {
    let wp = y[0].prec().0;
    let q = Float::with_val(wp, q);
    let tol = Float::with_val(wp, &ctx.newton_tol) / 64u32;
    for _ in 0..ctx.max_newton_iters {
        let (g, jac) = system_mp(y, l, &q, wp);
        let rhs: Vec<Complex> = g.into_iter().map(|z| -z).collect();
        let dy = solve_linear(jac, rhs).map_err(|e| match e {
            NumericsError::Singular { .. } => BetheError::RootCollision,
            other => other.into(),
        })?;
        for (a, d) in y.iter_mut().zip(&dy) {
            *a += d;
        }
        let step = max_abs(&dy, wp);
        if step <= tol {
            return Ok(());
        }
    }
    Err(BetheError::Nonconvergence(format!("no convergence in {} iterations", ctx.max_newton_iters)))
}

/// Gap root set, from the small-μ anchor or by continuation from `seed`.
pub fn solve_gap_roots(l: usize, n: usize, mu: &Float, ctx: &PrecisionContext, seed: Option<&BetheRootSet>) -> Result<BetheRootSet, BetheError> {
    if l < 4 || n == 0 || n >= l {
        return Err(BetheError::InvalidParameters(format!("need L >= 4 and 1 <= N < L, got L={l}, N={n}")));
    }
    let mu_f = mu.to_f64();
    if !(mu_f >= MU_MIN) {
        return Err(BetheError::InvalidParameters(format!("mu = {mu_f} is below the minimum {MU_MIN}")));
    }
    let approx = match seed {
        Some(s) => {
            if s.l != l || s.n != n {
                return Err(BetheError::InvalidParameters("seed has a different (L, N)".into()));
            }
            let y: Vec<C64<f64>> = s.roots.iter().map(to_c64).collect();
            track::continue_in_mu(y, l, s.mu.to_f64(), mu_f)?
        }
        None => track::gap_roots_f64(l, n, mu_f)?,
    };
    let q = q_from_mu(l, mu, ctx.prec());
    let (roots, residual) = polish(&approx, l, &q, ctx)?;
    check_distinct(&roots, ctx)?;
    finish(l, n, Float::with_val(ctx.prec(), mu), q, roots, residual, ctx)
}

fn check_distinct(roots: &[Complex], ctx: &PrecisionContext) -> Result<(), BetheError> {
    let tol = Float::with_val(ctx.prec(), ctx.newton_tol.sqrt_ref());
    for i in 0..roots.len() {
        for j in 0..i {
            if cabs(&Complex::with_val(ctx.prec(), &roots[i] - &roots[j])) <= tol {
                return Err(BetheError::RootCollision);
            }
        }
    }
    Ok(())
}

fn finish(l: usize, n: usize, mu: Float, q: Float, mut roots: Vec<Complex>, residual: Float, ctx: &PrecisionContext) -> Result<BetheRootSet, BetheError> {
    let mut state = BetheRootSet { l, n, mu, q, roots: roots.clone(), quantum_numbers: vec![0.0; n], residual };
    let mut qn = Vec::with_capacity(n);
    for y in &roots {
        let f = counting_function_at_root(y, &state, ctx)?;
        let v = f.imag().to_f64() * l as f64 / (2.0 * std::f64::consts::PI);
        qn.push((v * 2.0).round() / 2.0);
    }
    // Sort the regular roots by quantum number; y_N stays last.
    let last = roots.pop().expect("N >= 1");
    let nn = qn.pop().expect("N >= 1");
    let mut idx: Vec<usize> = (0..roots.len()).collect();
    idx.sort_by(|&a, &b| qn[a].partial_cmp(&qn[b]).unwrap());
    let mut sorted: Vec<Complex> = idx.iter().map(|&i| roots[i].clone()).collect();
    let mut sorted_qn: Vec<f64> = idx.iter().map(|&i| qn[i]).collect();
    sorted.push(last);
    sorted_qn.push(nn);
    state.roots = sorted;
    state.quantum_numbers = sorted_qn;
    Ok(state)
}

/// Solve and compare with the brute-force gap (L ≤ 12), raising a wrong-state error on mismatch.
pub fn solve_gap_roots_validated(l: usize, n: usize, mu: &Float, ctx: &PrecisionContext, tol: f64) -> Result<BetheRootSet, BetheError> {
    let state = solve_gap_roots(l, n, mu, ctx, None)?;
    if l <= 12 {
        let q = q_from_mu(l, mu, ctx.prec());
        let or = crate::markov_oracle::oracle_gap_tracked(l, n, &q, ctx)
            .map_err(|e| BetheError::InvalidParameters(format!("oracle failed: {e}")))?;
        let e = eigenvalue(&state, ctx)?;
        let d = cabs(&Complex::with_val(ctx.prec(), &e - &or.eigenvalue)).to_f64();
        if d > tol {
            return Err(BetheError::WrongState { bethe: e.to_string(), oracle: or.eigenvalue.to_string() });
        }
    }
    Ok(state)
}

/// θ_N(r) = −π + arg((r/y_N + q)/(r/y_N + 1/q)).
fn theta_last(r: &Float, y_n: &Complex, q: &Float, wp: u32) -> Float {
    let ry = Complex::with_val(wp, r / y_n);
    let num = Complex::with_val(wp, &ry + q);
    let den = Complex::with_val(wp, &ry + Float::with_val(wp, q.recip_ref()));
    let a = Complex::with_val(wp, num / den);
    Float::with_val(wp, a.arg_ref()) - Float::with_val(wp, Constant::Pi)
}

fn counting_function_at_root(y: &Complex, state: &BetheRootSet, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    counting_inner(y, state, ctx)
}

fn dist_to_segment(p: C64<f64>, a: C64<f64>, b: C64<f64>, ray: bool) -> f64 {
    let d = b - a;
    let t = ((p - a) * d.conj()).re / d.norm_sqr();
    let t = if ray { t.max(0.0) } else { t.clamp(0.0, 1.0) };
    (p - (a + d * t)).norm()
}

/// Counting function f(y; y_1 … y_N) with the gap-state branch prescriptions.
pub fn counting_function(y: &Complex, state: &BetheRootSet, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    let tol = ctx.newton_tol.to_f64().sqrt().max(1e-300);
    let p = to_c64(y);
    let q = state.q.to_f64();
    let n = state.roots.len();
    let mut d = p.norm();
    if p.re < 0.0 {
        d = d.min(p.im.abs());
    }
    for (k, yk) in state.roots.iter().enumerate() {
        let yk = to_c64(yk);
        if (p - yk).norm() < tol {
            continue;
        }
        if k + 1 < n {
            d = d.min(dist_to_segment(p, C64::new(0.0, 0.0), yk * q, false));
            d = d.min(dist_to_segment(p, yk / q, yk / q * 2.0, true));
        } else {
            d = d.min(dist_to_segment(p, yk * q, yk / q, false));
        }
    }
    if d < tol {
        return Err(BetheError::BranchCut(d));
    }
    counting_inner(y, state, ctx)
}

fn counting_inner(y: &Complex, state: &BetheRootSet, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    let wp = ctx.prec() + 16;
    let q = Float::with_val(wp, &state.q);
    let l = state.l;
    let n = state.roots.len();
    let rho = Float::with_val(wp, n as u32) / l as u32;
    let y = Complex::with_val(wp, y);
    let mut f = Complex::with_val(wp, y.ln_ref()) * &rho;
    f = -f;
    f += Complex::with_val(wp, 1u32 - &y).ln();
    f -= Complex::with_val(wp, 1u32 - Complex::with_val(wp, &y * &q)).ln();
    let mut s = Complex::new(wp);
    for (k, yk) in state.roots.iter().enumerate() {
        let yk = Complex::with_val(wp, yk);
        let num = Complex::with_val(wp, &y - Complex::with_val(wp, &yk * &q));
        let den = Complex::with_val(wp, &yk - Complex::with_val(wp, &y * &q));
        let z = Complex::with_val(wp, num / den) / &y;
        let theta = if k + 1 < n {
            -Float::with_val(wp, yk.arg_ref())
        } else {
            theta_last(&cabs(&z), &yk, &q, wp)
        };
        let rot = Complex::with_val(wp, (Float::with_val(wp, theta.cos_ref()), -Float::with_val(wp, theta.sin_ref())));
        let lg = Complex::with_val(wp, rot * &z).ln();
        s += lg + Complex::with_val(wp, (0, &theta));
    }
    f -= s / l as u32;
    Ok(Complex::with_val(ctx.prec(), f))
}

/// y with f₀(y) = v, where f₀(y) = ρ log ρ + (1−ρ) log(1−ρ) + log((1−y)/y^ρ).
/// At ρ = 1/2 this is the quadratic t² + ct − 1 = 0 in t = √y with c = 2e^v;
/// `branch` picks the sign of the discriminant root.
pub fn f0_inverse(v: &Complex, rho: f64, branch: i32, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    let wp = ctx.prec() + 16;
    let c = Complex::with_val(wp, v.exp_ref()) * 2u32;
    let disc = Complex::with_val(wp, c.square_ref()) + 4u32;
    let mut sq = disc.sqrt();
    if branch < 0 {
        sq = -sq;
    }
    let t = (sq - &c) / 2u32;
    let mut y = Complex::with_val(wp, t.square_ref());
    let rho_f = Float::with_val(wp, rho);
    if (rho - 0.5).abs() > 0.0 {
        // Newton on f₀(y) − v from the half-filling value.
        for _ in 0..ctx.max_newton_iters {
            let r = f0(&y, &rho_f, wp) - v;
            // f₀'(y) = −1/(1−y) − ρ/y
            let dv = -Complex::with_val(wp, 1u32 - &y).recip() - Complex::with_val(wp, &rho_f / &y);
            let step = r / dv;
            y -= &step;
            if cabs(&step) <= ctx.newton_tol {
                break;
            }
        }
    }
    let chk = Complex::with_val(wp, f0(&y, &rho_f, wp) - v);
    let scale = Float::with_val(wp, cabs(v) + 1u32);
    if cabs(&chk) > Float::with_val(wp, ctx.newton_tol.sqrt_ref()) * scale {
        return Err(BetheError::OffBranch(format!("f0(y) - v = {}", chk.to_string_radix(10, Some(6)))));
    }
    Ok(Complex::with_val(ctx.prec(), y))
}

fn f0(y: &Complex, rho: &Float, wp: u32) -> Complex {
    let one_m = Float::with_val(wp, 1u32 - rho);
    let c0 = Float::with_val(wp, rho * Float::with_val(wp, rho.ln_ref())) + Float::with_val(wp, &one_m * Float::with_val(wp, one_m.ln_ref()));
    let a = Complex::with_val(wp, 1u32 - y).ln();
    let b = Complex::with_val(wp, y.ln_ref()) * rho;
    a - b + c0
}

/// E = (1−q) Σ_j (1/(1−y_j) − 1/(1−qy_j)).
pub fn eigenvalue(state: &BetheRootSet, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    let wp = ctx.prec() + 16;
    let q = Float::with_val(wp, &state.q);
    let tol = Float::with_val(wp, ctx.newton_tol.sqrt_ref());
    let mut s = Complex::new(wp);
    for y in &state.roots {
        let a = Complex::with_val(wp, 1u32 - y);
        let b = Complex::with_val(wp, 1u32 - Complex::with_val(wp, y * &q));
        if cabs(&a) <= tol || cabs(&b) <= tol {
            return Err(BetheError::PoleProximity);
        }
        s += a.recip() - b.recip();
    }
    Ok(Complex::with_val(ctx.prec(), s * Float::with_val(wp, 1u32 - &q)))
}

/// Total momentum L·arg Π_j (1−y_j)/(1−qy_j); the gap state gives 2π.
pub fn momentum(state: &BetheRootSet) -> Float {
    let wp = state.prec() + 16;
    let q = Float::with_val(wp, &state.q);
    let mut prod = Complex::with_val(wp, 1);
    for y in &state.roots {
        let a = Complex::with_val(wp, 1u32 - y);
        let b = Complex::with_val(wp, 1u32 - Complex::with_val(wp, y * &q));
        prod *= a / b;
    }
    Float::with_val(state.prec(), Float::with_val(wp, prod.arg_ref()) * state.l as u32)
}

#[cfg(test)]
mod tests;

//! L → ∞ limits of the scaled functions and the checks built on them.

use super::finite::FiniteSizeData;
use super::richardson::{richardson, ExtrapolationResult};
use super::ScalingError;
use crate::numerics::{cabs, PrecisionContext};
use crate::series::SeriesResult;
use rug::{Complex, Float};
use serde::Serialize;
use std::collections::BTreeMap;

/// Default geometric L grid.
pub const DEFAULT_LS: [usize; 4] = [32, 64, 128, 256];
/// Corrections come in powers of L^{−1/2}.
pub const STEP: (u32, u32) = (1, 2);

/// Which exact finite-size expression a sample came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantity {
    Q,
    P,
    T,
    C,
    Energy,
}

/// Finite-size values at one (L, μ, x).
#[derive(Clone, Debug)]
pub struct ScalingSample {
    pub l: usize,
    pub mu: Float,
    pub x: Complex,
    pub q_val: Option<Complex>,
    pub p_val: Option<Complex>,
    pub t_val: Option<Complex>,
    pub c_val: Option<Complex>,
    pub e_val: Option<Complex>,
}

/// Finite-size data at fixed μ over a grid of L, solved once and reused.
#[derive(Clone, Debug)]
pub struct ScalingTable {
    pub mu: Float,
    pub data: BTreeMap<usize, FiniteSizeData>,
}

impl ScalingTable {
    /// Solve every L in `ls`; the solves are independent.
    pub fn build(mu: &Float, ls: &[usize], ctx: &PrecisionContext) -> Result<Self, ScalingError> {
        if ls.len() < 2 {
            return Err(ScalingError::InsufficientPoints { have: ls.len(), need: 2 });
        }
        let mut data = BTreeMap::new();
        for &l in ls {
            if data.contains_key(&l) {
                return Err(ScalingError::DegenerateAbscissa);
            }
            data.insert(l, FiniteSizeData::compute(l, mu, ctx, None)?);
        }
        Ok(Self { mu: Float::with_val(ctx.prec(), mu), data })
    }

    pub fn ls(&self) -> Vec<usize> {
        self.data.keys().copied().collect()
    }

    pub fn sample(&self, l: usize, x: &Complex) -> Result<ScalingSample, ScalingError> {
        let d = self.data.get(&l).ok_or_else(|| ScalingError::InvalidParameters(format!("L = {l} not in table")))?;
        Ok(ScalingSample {
            l,
            mu: self.mu.clone(),
            x: x.clone(),
            q_val: Some(d.scaled_q(x)),
            p_val: Some(d.scaled_p(x)?),
            t_val: Some(d.scaled_t(x)),
            c_val: Some(d.scaled_c()),
            e_val: Some(d.scaled_energy()),
        })
    }

    fn values(&self, what: Quantity, x: &Complex) -> Result<BTreeMap<usize, Complex>, ScalingError> {
        let mut out = BTreeMap::new();
        for (&l, d) in &self.data {
            let v = match what {
                Quantity::Q => d.scaled_q(x),
                Quantity::P => d.scaled_p(x)?,
                Quantity::T => d.scaled_t(x),
                Quantity::C => d.scaled_c(),
                Quantity::Energy => d.scaled_energy(),
            };
            out.insert(l, v);
        }
        Ok(out)
    }

    /// Richardson limit of one quantity at x, using every L in the table.
    pub fn extrapolate(&self, what: Quantity, x: &Complex) -> Result<ExtrapolationResult, ScalingError> {
        let v = self.values(what, x)?;
        let orders = v.len() - 1;
        richardson(&v, STEP, orders)
    }

    fn limit(&self, what: Quantity, x: &Complex) -> Result<(Complex, f64), ScalingError> {
        let r = self.extrapolate(what, x)?;
        Ok((r.limit, r.error_estimate.to_f64()))
    }

    /// Largest Wronskian residual over the table, before extrapolation.
    pub fn max_prelimit_residual(&self) -> f64 {
        self.data.values().map(|d| d.wronskian.0.max(d.wronskian.1)).fold(0.0, f64::max)
    }
}

/// Residuals of the four limiting functional equations at one x.
#[derive(Clone, Debug, Serialize)]
pub struct FunctionalResiduals {
    pub x_re: f64,
    pub x_im: f64,
    pub tq: f64,
    pub tp: f64,
    pub qp: f64,
    pub tqp: f64,
    /// Largest Richardson error estimate among the ingredients.
    pub extrapolation_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryResiduals {
    pub x_re: f64,
    pub x_im: f64,
    /// |T(x) − conj T(−x̄ − μ)|, relative.
    pub t: f64,
    /// |P(x) − conj Q(−x̄ − μ)|, relative.
    pub qp: f64,
}

fn rel_residual(terms: &[&Complex], signs: &[i32]) -> f64 {
    let prec = terms[0].prec().0;
    let mut acc = Complex::new(prec);
    let mut scale = Float::new(prec);
    for (t, &s) in terms.iter().zip(signs) {
        if s > 0 {
            acc += *t;
        } else {
            acc -= *t;
        }
        let a = cabs(t);
        if a > scale {
            scale = a;
        }
    }
    if scale.is_zero() {
        return 0.0;
    }
    (cabs(&acc) / scale).to_f64()
}

fn gauss8(x: &Complex) -> Complex {
    let prec = x.prec().0;
    (Complex::with_val(prec, x.square_ref()) / 8u32).exp()
}

/// Extrapolated residuals of TQ, TP, QP and TQP at every x of the grid.
pub fn check_functional_equations_with(table: &ScalingTable, x_grid: &[Complex]) -> Result<Vec<FunctionalResiduals>, ScalingError> {
    let mu = &table.mu;
    let (c, ec) = table.limit(Quantity::C, &Complex::new(mu.prec()))?;
    let mut out = Vec::with_capacity(x_grid.len());
    for x in x_grid {
        let prec = x.prec().0;
        let xp = Complex::with_val(prec, x + mu);
        let xm = Complex::with_val(prec, x - mu);
        let mut err = ec;
        let mut lim = |w: Quantity, at: &Complex| -> Result<Complex, ScalingError> {
            let (v, e) = table.limit(w, at)?;
            err = err.max(e);
            Ok(v)
        };
        let (q0, qp, qm) = (lim(Quantity::Q, x)?, lim(Quantity::Q, &xp)?, lim(Quantity::Q, &xm)?);
        let (p0, pp, pm) = (lim(Quantity::P, x)?, lim(Quantity::P, &xp)?, lim(Quantity::P, &xm)?);
        let t0 = lim(Quantity::T, x)?;
        let g0 = gauss8(x);
        let g1 = gauss8(&xp);
        let tq = rel_residual(
            &[&Complex::with_val(prec, &t0 * &q0), &Complex::with_val(prec, &g0 * &qp), &Complex::with_val(prec, &g1 * &qm)],
            &[1, -1, -1],
        );
        let tp = rel_residual(
            &[&Complex::with_val(prec, &t0 * &p0), &Complex::with_val(prec, &g0 * &pp), &Complex::with_val(prec, &g1 * &pm)],
            &[1, -1, -1],
        );
        let qpr = rel_residual(
            &[&Complex::with_val(prec, &c * &g0), &Complex::with_val(prec, &q0 * &pm), &Complex::with_val(prec, &qm * &p0)],
            &[1, -1, 1],
        );
        let tqp = rel_residual(
            &[&Complex::with_val(prec, &c * &t0), &Complex::with_val(prec, &qp * &pm), &Complex::with_val(prec, &qm * &pp)],
            &[1, -1, 1],
        );
        out.push(FunctionalResiduals {
            x_re: x.real().to_f64(),
            x_im: x.imag().to_f64(),
            tq,
            tp,
            qp: qpr,
            tqp,
            extrapolation_error: err,
        });
    }
    Ok(out)
}

pub fn check_functional_equations(mu: &Float, x_grid: &[Complex], ls: &[usize], ctx: &PrecisionContext) -> Result<Vec<FunctionalResiduals>, ScalingError> {
    check_functional_equations_with(&ScalingTable::build(mu, ls, ctx)?, x_grid)
}

/// Reflection x → −x̄ − μ followed by conjugation.
pub fn check_symmetries_with(table: &ScalingTable, x_grid: &[Complex]) -> Result<Vec<SymmetryResiduals>, ScalingError> {
    let mu = &table.mu;
    let mut out = Vec::with_capacity(x_grid.len());
    for x in x_grid {
        let prec = x.prec().0;
        let xr = Complex::with_val(prec, -Complex::with_val(prec, x.conj_ref())) - mu;
        let (t0, _) = table.limit(Quantity::T, x)?;
        let tr = Complex::with_val(prec, table.limit(Quantity::T, &xr)?.0.conj_ref());
        let (p0, _) = table.limit(Quantity::P, x)?;
        let qr = Complex::with_val(prec, table.limit(Quantity::Q, &xr)?.0.conj_ref());
        out.push(SymmetryResiduals {
            x_re: x.real().to_f64(),
            x_im: x.imag().to_f64(),
            t: rel_residual(&[&t0, &tr], &[1, -1]),
            qp: rel_residual(&[&p0, &qr], &[1, -1]),
        });
    }
    Ok(out)
}

pub fn check_symmetries(mu: &Float, x_grid: &[Complex], ls: &[usize], ctx: &PrecisionContext) -> Result<Vec<SymmetryResiduals>, ScalingError> {
    check_symmetries_with(&ScalingTable::build(mu, ls, ctx)?, x_grid)
}

/// c(μ) from the large-|x| expansion of Q_μ, with the fitted x⁻¹ coefficient.
#[derive(Clone, Debug)]
pub struct CEstimate {
    pub c: Complex,
    pub error_estimate: f64,
    /// Fitted x⁻¹ coefficient (expected 8iπ/μ).
    pub momentum_coeff: Complex,
}

/// Least-squares fit of Σ_k a_k x^{−k}, k < terms, via the normal equations.
fn fit_inverse_powers(xs: &[Complex], vals: &[Complex], terms: usize) -> Result<Vec<Complex>, ScalingError> {
    let prec = vals[0].prec().0;
    let rows: Vec<Vec<Complex>> = xs
        .iter()
        .map(|x| {
            let inv = Complex::with_val(prec, x.recip_ref());
            let mut r = Vec::with_capacity(terms);
            let mut p = Complex::with_val(prec, 1);
            for _ in 0..terms {
                r.push(p.clone());
                p *= &inv;
            }
            r
        })
        .collect();
    let mut a = vec![vec![Complex::new(prec); terms]; terms];
    let mut b = vec![Complex::new(prec); terms];
    for (r, v) in rows.iter().zip(vals) {
        for i in 0..terms {
            let ci = Complex::with_val(prec, r[i].conj_ref());
            for j in 0..terms {
                a[i][j] += Complex::with_val(prec, &ci * &r[j]);
            }
            b[i] += Complex::with_val(prec, &ci * v);
        }
    }
    Ok(crate::numerics::solve_linear(a, b)?)
}

/// Double extrapolation: L → ∞ at each x, then a fit in 1/x.
pub fn estimate_c_mu_with(table: &ScalingTable, x_list: &[Complex]) -> Result<CEstimate, ScalingError> {
    if x_list.len() < 6 {
        return Err(ScalingError::InsufficientPoints { have: x_list.len(), need: 6 });
    }
    let mut vals = Vec::with_capacity(x_list.len());
    for x in x_list {
        vals.push(table.limit(Quantity::Q, x)?.0);
    }
    let fit4 = fit_inverse_powers(x_list, &vals, 4)?;
    let fit5 = fit_inverse_powers(x_list, &vals, 5)?;
    let prec = vals[0].prec().0;
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let want = Complex::with_val(prec, (0, pi * 8u32 / &table.mu));
    let dev = cabs(&Complex::with_val(prec, &fit4[1] - &want)) / cabs(&want);
    if dev.to_f64() > 0.05 {
        return Err(ScalingError::MomentumGate { fitted: fit4[1].to_string(), relative_deviation: dev.to_f64() });
    }
    let err = cabs(&Complex::with_val(prec, &fit4[2] - &fit5[2])).to_f64();
    Ok(CEstimate { c: fit4[2].clone(), error_estimate: err, momentum_coeff: fit4[1].clone() })
}

pub fn estimate_c_mu(mu: &Float, ls: &[usize], x_list: &[Complex], ctx: &PrecisionContext) -> Result<CEstimate, ScalingError> {
    estimate_c_mu_with(&ScalingTable::build(mu, ls, ctx)?, x_list)
}

/// e₁ = −4π² − (iπ/2 + c/8)μ².
pub fn e1_from_c(c: &Complex, mu: &Float) -> Complex {
    let prec = c.prec().0;
    let pi = Float::with_val(prec, rug::float::Constant::Pi);
    let mut inner = Complex::with_val(prec, c / 8u32);
    inner += Complex::with_val(prec, (0, Float::with_val(prec, &pi / 2u32)));
    let mu2 = Float::with_val(prec, mu.square_ref());
    let base = Float::with_val(prec, pi.square_ref()) * -4i32;
    Complex::with_val(prec, -inner * mu2) + base
}

/// Numeric c(μ) = Σ_n c_n μ^n from the exact series (index 0 is order −1).
pub fn series_c(res: &SeriesResult, mu: &Float, ctx: &PrecisionContext) -> Complex {
    let prec = ctx.prec() + 16;
    let mut acc = Complex::new(prec);
    let mut pw = Float::with_val(prec, mu.recip_ref());
    for c in &res.c_asymptotic {
        acc += c.to_complex(prec) * &pw;
        pw *= mu;
    }
    Complex::with_val(ctx.prec(), acc)
}

/// Richardson limit of L²E over the table.
pub fn gap_scaling_with(table: &ScalingTable) -> Result<ExtrapolationResult, ScalingError> {
    table.extrapolate(Quantity::Energy, &Complex::new(table.mu.prec()))
}

/// Richardson limit of L²E₁ with corrections in L^{−1/2}. Only the energies
/// are needed, so the Baxter polynomials are not built here.
pub fn gap_scaling(mu: &Float, ls: &[usize], ctx: &PrecisionContext) -> Result<ExtrapolationResult, ScalingError> {
    let mut v = BTreeMap::new();
    for &l in ls {
        if l % 2 != 0 {
            return Err(ScalingError::InvalidParameters(format!("L = {l} must be even")));
        }
        let s = crate::bethe_finite::solve_gap_roots(l, l / 2, mu, ctx, None)?;
        let e = crate::bethe_finite::eigenvalue(&s, ctx)?;
        v.insert(l, Complex::with_val(ctx.prec(), e * (l * l) as u32));
    }
    if v.is_empty() {
        return Err(ScalingError::InsufficientPoints { have: 0, need: 1 });
    }
    let orders = v.len() - 1;
    richardson(&v, STEP, orders)
}

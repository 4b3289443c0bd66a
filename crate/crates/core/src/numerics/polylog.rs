//! Li_s(-e^v) for s = 1/2 and s = 3/2.
//!
//! Inside the strip |Im v| < π the Fermi-Dirac integral
//! Li_s(-e^v) = -(2/Γ(s)) ∫_0^∞ u^{2s-1} / (e^{u²-v} + 1) du
//! is evaluated by tanh-sinh quadrature. Near the branch points v = ±iπ the
//! expansion Li_s(e^ε) = Γ(1-s)(-ε)^{s-1} + Σ_k ζ(s-k) ε^k / k! is summed
//! instead, with ε = v ∓ iπ.

use super::{quad::TanhSinh, NumericsError, PrecisionContext};
use rug::float::Constant;
use rug::{Complex, Float};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolylogOrder {
    Half,
    ThreeHalves,
}

/// Radius around ±iπ inside which the series is used.
const SERIES_RADIUS: f64 = 3.0;
/// Outer limit of the series (convergence requires |ε| < 2π).
const SERIES_LIMIT: f64 = 5.5;

thread_local! {
    static QUADS: RefCell<HashMap<u32, Rc<TanhSinh>>> = RefCell::new(HashMap::new());
    // ζ(3/2 - j), j = 0, 1, ...
    static ZETAS: RefCell<HashMap<u32, Vec<Float>>> = RefCell::new(HashMap::new());
}

fn quad(prec: u32) -> Rc<TanhSinh> {
    QUADS.with(|q| q.borrow_mut().entry(prec).or_insert_with(|| Rc::new(TanhSinh::new(prec))).clone())
}

fn zeta_coeff(prec: u32, j: usize) -> Float {
    ZETAS.with(|z| {
        let mut map = z.borrow_mut();
        let list = map.entry(prec).or_default();
        while list.len() <= j {
            let arg = Float::with_val(prec + 32, 1.5) - list.len() as u32;
            list.push(Float::with_val(prec, arg.zeta()));
        }
        list[j].clone()
    })
}

fn fermi(order: PolylogOrder, v: &Complex, prec: u32) -> Result<Complex, NumericsError> {
    let wp = prec + 16;
    let q = quad(wp);
    let vv = Complex::with_val(wp, v);
    let re = vv.real().to_f64().max(0.0);
    let upper2 = re + wp as f64 * std::f64::consts::LN_2 + 24.0;
    let upper = Float::with_val(wp, upper2).sqrt();
    let zero = Float::new(wp);
    let integrand = |u: &Float| {
        let u2 = Float::with_val(wp, u.square_ref());
        let mut e = Complex::with_val(wp, &u2 - &vv);
        e.exp_mut();
        e += 1u32;
        let num = match order {
            PolylogOrder::Half => Float::with_val(wp, 2),
            PolylogOrder::ThreeHalves => u2 * 2u32,
        };
        Complex::with_val(wp, num / e)
    };
    let rel = wp - 24;
    let total = if re > 1.0 {
        let mid = Float::with_val(wp, re).sqrt();
        let a = q.integrate(integrand, &zero, &mid, rel, None)?;
        let b = q.integrate(integrand, &mid, &upper, rel, None)?;
        a + b
    } else {
        q.integrate(integrand, &zero, &upper, rel, None)?
    };
    let pi = Float::with_val(wp, Constant::Pi);
    let gamma = match order {
        PolylogOrder::Half => pi.sqrt(),
        PolylogOrder::ThreeHalves => pi.sqrt() / 2u32,
    };
    Ok(Complex::with_val(prec, -total / gamma))
}

fn near_pole(order: PolylogOrder, eps: &Complex, prec: u32) -> Complex {
    let wp = prec + 24;
    let eps = Complex::with_val(wp, eps);
    let sqrt_pi = Float::with_val(wp, Constant::Pi).sqrt();
    let meps = Complex::with_val(wp, -&eps);
    let sing = match order {
        PolylogOrder::Half => Complex::with_val(wp, meps.sqrt_ref()).recip() * &sqrt_pi,
        PolylogOrder::ThreeHalves => Complex::with_val(wp, meps.sqrt_ref()) * sqrt_pi * (-2i32),
    };
    Complex::with_val(prec, regular_part(order, &eps, wp) + sing)
}

fn regular_part(order: PolylogOrder, eps: &Complex, prec: u32) -> Complex {
    let wp = prec + 24;
    let eps = Complex::with_val(wp, eps);
    let shift = match order {
        PolylogOrder::Half => 1,
        PolylogOrder::ThreeHalves => 0,
    };
    let mut sum = Complex::new(wp);
    let mut pw = Complex::with_val(wp, 1);
    let mut k = 0usize;
    loop {
        let term = Complex::with_val(wp, &pw * zeta_coeff(wp, k + shift));
        sum += &term;
        k += 1;
        pw *= &eps;
        pw /= k as u32;
        if k > 8 {
            let te = crate::numerics::cabs(&term);
            let se = crate::numerics::cabs(&sum);
            if te.is_zero() || te < se * crate::numerics::pow2(-(wp as i32), wp) {
                break;
            }
        }
    }
    Complex::with_val(prec, sum)
}

/// Regular part Σ_k ζ(s−k) ε^k/k! of Li_s(e^ε), i.e. Li_s(−e^v) at
/// v = ε ± iπ minus its branch-point singularity. Requires |ε| < 2π.
pub fn polylog_regular_part(order: PolylogOrder, eps: &Complex, ctx: &PrecisionContext) -> Result<Complex, NumericsError> {
    if crate::numerics::cabs_f64(eps) >= SERIES_LIMIT {
        return Err(NumericsError::Domain(format!("|eps| = {} outside the series disc", crate::numerics::cabs_f64(eps))));
    }
    Ok(regular_part(order, eps, ctx.prec()))
}

/// Li_s(-e^v) for complex v. Valid in the strip |Im v| < π and in a disc of
/// radius 5.5 around ±iπ (away from the branch points themselves).
pub fn polylog_neg_exp_complex(order: PolylogOrder, v: &Complex, ctx: &PrecisionContext) -> Result<Complex, NumericsError> {
    let prec = ctx.prec();
    let im = v.imag().to_f64();
    let pi = std::f64::consts::PI;
    let branch = if im >= 0.0 { pi } else { -pi };
    let eps = Complex::with_val(prec + 24, v - Complex::with_val(prec + 24, (0, Float::with_val(prec + 24, Constant::Pi) * branch.signum())));
    let r = crate::numerics::cabs_f64(&eps);
    if r < 2f64.powi(8 - prec as i32) {
        return Err(NumericsError::Domain("Li_s(-e^v) is singular at v = ±iπ".into()));
    }
    if r < SERIES_RADIUS || (im.abs() >= pi && r < SERIES_LIMIT) {
        return Ok(near_pole(order, &eps, prec));
    }
    if im.abs() >= pi {
        return Err(NumericsError::Domain(format!("v = {} + {}i outside |Im v| < π", v.real().to_f64(), im)));
    }
    fermi(order, v, prec)
}

/// Li_s(-e^v) for real v.
pub fn polylog_neg_exp(order: PolylogOrder, v: &Float, ctx: &PrecisionContext) -> Result<Float, NumericsError> {
    let z = Complex::with_val(ctx.prec(), (v, 0));
    let r = fermi(order, &z, ctx.prec())?;
    Ok(Float::with_val(ctx.prec(), r.real()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::cabs_f64;

    fn c() -> PrecisionContext {
        PrecisionContext::with_bits(200).unwrap()
    }

    #[test]
    fn eta_values_at_zero() {
        let ctx = c();
        let p = ctx.prec();
        let zero = Float::new(p);
        // Li_s(-1) = -(1 - 2^{1-s}) ζ(s)
        for (order, s) in [(PolylogOrder::Half, 0.5), (PolylogOrder::ThreeHalves, 1.5)] {
            let got = polylog_neg_exp(order, &zero, &ctx).unwrap();
            let sv = Float::with_val(p, s);
            let two = Float::with_val(p, 2);
            let fac = 1u32 - Float::with_val(p, rug::ops::Pow::pow(&two, Float::with_val(p, 1u32 - &sv)));
            let want = -fac * Float::with_val(p, sv.zeta_ref());
            let d = Float::with_val(p, &got - &want).abs().to_f64();
            assert!(d < 1e-50, "{order:?}: {d}");
        }
    }

    #[test]
    fn small_argument_expansion() {
        let ctx = c();
        let v = Float::with_val(ctx.prec(), -40);
        let got = polylog_neg_exp(PolylogOrder::Half, &v, &ctx).unwrap().to_f64();
        let x = (-40f64).exp();
        let want = -x + x * x / 2f64.sqrt();
        assert!(((got - want) / want).abs() < 1e-14);
    }

    #[test]
    fn series_and_integral_agree_in_overlap() {
        let ctx = c();
        for (re, im) in [(1.0, 1.2), (-0.5, 2.0), (1.5, -2.0)] {
            let v = ctx.complex((re, im));
            let direct = fermi(PolylogOrder::Half, &v, ctx.prec()).unwrap();
            let pi = ctx.pi();
            let sign = if im > 0.0 { 1 } else { -1 };
            let eps = Complex::with_val(ctx.prec(), &v - Complex::with_val(ctx.prec(), (0, pi * sign)));
            let ser = near_pole(PolylogOrder::Half, &eps, ctx.prec());
            let d = cabs_f64(&Complex::with_val(ctx.prec(), &direct - &ser));
            assert!(d < 1e-50, "v=({re},{im}) d={d}");
            let direct = fermi(PolylogOrder::ThreeHalves, &v, ctx.prec()).unwrap();
            let ser = near_pole(PolylogOrder::ThreeHalves, &eps, ctx.prec());
            let d = cabs_f64(&Complex::with_val(ctx.prec(), &direct - &ser));
            assert!(d < 1e-50, "v=({re},{im}) d={d}");
        }
    }

    #[test]
    fn derivative_relation() {
        // d/dv Li_{3/2}(-e^v) = Li_{1/2}(-e^v)
        let ctx = c();
        let h = 1e-12;
        for v0 in [-2.0, 0.3, 3.5156583, 8.0] {
            let a = polylog_neg_exp(PolylogOrder::ThreeHalves, &(ctx.real(v0) + h), &ctx).unwrap();
            let b = polylog_neg_exp(PolylogOrder::ThreeHalves, &(ctx.real(v0) - h), &ctx).unwrap();
            let fd = Float::with_val(ctx.prec(), a - b).to_f64() / (2.0 * h);
            let d = polylog_neg_exp(PolylogOrder::Half, &ctx.real(v0), &ctx).unwrap().to_f64();
            assert!((fd - d).abs() < 1e-9, "v={v0}: {fd} vs {d}");
        }
    }

    #[test]
    fn singular_point_rejected() {
        let ctx = c();
        let v = Complex::with_val(ctx.prec(), (0, ctx.pi()));
        assert!(matches!(polylog_neg_exp_complex(PolylogOrder::Half, &v, &ctx), Err(NumericsError::Domain(_))));
    }
}

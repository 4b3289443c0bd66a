//! The totally asymmetric limit μ → ∞.

use super::EdgeError;
use crate::numerics::{
    cabs, cabs_f64, polylog_neg_exp, polylog_neg_exp_complex, polylog_regular_part, sqrt_2pi, PolylogOrder, PrecisionContext, TanhSinh,
};
use rug::float::Constant;
use rug::{Complex, Float};

/// √(2iπ − 2v) + √(−2iπ − 2v), principal branches.
fn root_pair(v: &Complex, prec: u32) -> (Complex, Complex) {
    let pi = Float::with_val(prec, Constant::Pi);
    let two_v = Complex::with_val(prec, v * 2u32);
    let a = Complex::with_val(prec, Complex::with_val(prec, (0, Float::with_val(prec, &pi * 2u32))) - &two_v).sqrt();
    let b = Complex::with_val(prec, Complex::with_val(prec, (0, -Float::with_val(prec, &pi * 2u32))) - &two_v).sqrt();
    (a, b)
}

/// φ₁(v) = −(2π)^{−1/2} Li_{3/2}(−e^v) − √(2iπ−2v) − √(−2iπ−2v).
pub fn phi1(v: &Complex, ctx: &PrecisionContext) -> Result<Complex, EdgeError> {
    let p = ctx.prec();
    let li = polylog_neg_exp_complex(PolylogOrder::ThreeHalves, v, ctx)?;
    let (a, b) = root_pair(v, p);
    Ok(-(li / sqrt_2pi(p)) - a - b)
}

/// φ₁′(v). Within the series disc around ±iπ the branch-point singularity
/// of Li_{1/2} cancels against one of the square roots, so the regular
/// part is used there.
pub fn phi1_prime(v: &Complex, ctx: &PrecisionContext) -> Result<Complex, EdgeError> {
    let p = ctx.prec();
    let pi = Float::with_val(p, Constant::Pi);
    let (a, b) = root_pair(v, p);
    let upper = !v.imag().is_sign_negative();
    let centre = Complex::with_val(p, (0, if upper { pi } else { -pi }));
    let eps = Complex::with_val(p, v - &centre);
    if cabs_f64(&eps) < 3.0 {
        let reg = polylog_regular_part(PolylogOrder::Half, &eps, ctx)?;
        let other = if upper { b } else { a };
        return Ok(-(reg / sqrt_2pi(p)) + other.recip());
    }
    let li = polylog_neg_exp_complex(PolylogOrder::Half, v, ctx)?;
    Ok(-(li / sqrt_2pi(p)) + a.recip() + b.recip())
}

/// The real root ν₁ of φ₁, by Newton from 3.5.
pub fn tasep_nu1(ctx: &PrecisionContext) -> Result<Float, EdgeError> {
    let p = ctx.prec();
    let work = ctx.at_bits(p + 16);
    let wp = work.prec();
    let s = sqrt_2pi(wp);
    let mut v = Float::with_val(wp, 3.5);
    for _ in 0..ctx.max_newton_iters {
        let vc = Complex::with_val(wp, (&v, 0));
        let (a, b) = root_pair(&vc, wp);
        let f = -(polylog_neg_exp(PolylogOrder::ThreeHalves, &v, &work)? / &s) - Float::with_val(wp, Complex::with_val(wp, &a + &b).real());
        let df = -(polylog_neg_exp(PolylogOrder::Half, &v, &work)? / &s)
            + Float::with_val(wp, Complex::with_val(wp, a.recip() + b.recip()).real());
        let dv = f / df;
        v -= &dv;
        if Float::with_val(wp, dv.abs_ref()) < crate::numerics::pow2(-(p as i32), wp) {
            let r = cabs(&phi1(&Complex::with_val(wp, (&v, 0)), &work)?);
            if r > ctx.newton_tol {
                return Err(EdgeError::Nonconvergence(format!("phi1(nu1) = {:e}", r.to_f64())));
            }
            return Ok(Float::with_val(p, v));
        }
    }
    Err(EdgeError::Nonconvergence("nu1 Newton iteration cap reached".into()))
}

/// w_j(∞) = 4√(iπj − (ν₁+iπ)/2) for 0 < |j| ≤ count, plus w_0(∞) = −w_1(∞).
pub fn tasep_edge_roots(count: usize, ctx: &PrecisionContext) -> Result<Vec<(i64, Complex)>, EdgeError> {
    if count == 0 {
        return Err(EdgeError::InvalidParameters("count must be at least 1".into()));
    }
    let p = ctx.prec();
    let nu = tasep_nu1(ctx)?;
    let pi = Float::with_val(p, Constant::Pi);
    let shift = Complex::with_val(p, (Float::with_val(p, &nu / 2u32), Float::with_val(p, &pi / 2u32)));
    let root = |j: i64| {
        let u = Complex::with_val(p, (0, Float::with_val(p, &pi * j))) - &shift;
        Complex::with_val(p, u.sqrt() * 4u32)
    };
    let mut out = Vec::with_capacity(2 * count + 1);
    for j in -(count as i64)..=count as i64 {
        if j == 0 {
            out.push((0, -root(1)));
        } else {
            out.push((j, root(j)));
        }
    }
    Ok(out)
}

/// Q_∞(x) with ν₁ given; the integral runs along the straight segment
/// from ν₁ to V = ν₁ + x²/8.
pub fn q_infinity(x: &Complex, nu1: &Float, ctx: &PrecisionContext) -> Result<Complex, EdgeError> {
    let p = ctx.prec();
    let wp = p + 16;
    let work = ctx.at_bits(wp);
    let pi = Float::with_val(wp, Constant::Pi);
    let ipi = Complex::with_val(wp, (0, pi));
    let big_v = Complex::with_val(wp, Complex::with_val(wp, x.square_ref()) / 8u32) + nu1;
    let mut pre = Complex::with_val(wp, &big_v - &ipi).sqrt();
    pre /= Complex::with_val(wp, &big_v + &ipi).sqrt();
    pre *= Complex::with_val(wp, Complex::with_val(wp, big_v.exp_ref()) + 1u32).sqrt();
    let sgn = if x.real().is_sign_negative() { -1 } else { 1 };
    let span = Complex::with_val(wp, &big_v - nu1);
    let root_span = Complex::with_val(wp, span.sqrt_ref());
    let sqrt2 = Float::with_val(wp, 2).sqrt();
    let quad = TanhSinh::new(wp);
    let mut failure = None;
    let integral = quad.integrate(
        // s = 1 − t, so the 1/√s endpoint sits at an exactly representable 0
        |s| {
            let v = Complex::with_val(wp, &big_v - Complex::with_val(wp, &span * s));
            match phi1_prime(&v, &work) {
                Ok(d) => {
                    let rs = Float::with_val(wp, s.sqrt_ref());
                    d * &root_span / Float::with_val(wp, rs * &sqrt2) * sgn
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex::new(wp)
                }
            }
        },
        &Float::new(wp),
        &Float::with_val(wp, 1),
        p.saturating_sub(24),
        None,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Complex::with_val(p, pre * integral.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu1_value_and_stability() {
        let c = PrecisionContext::with_bits(128).unwrap();
        let nu = tasep_nu1(&c).unwrap();
        assert!((nu.to_f64() - 3.5156583).abs() < 5e-8, "{nu}");
        let hi = tasep_nu1(&PrecisionContext::with_bits(256).unwrap()).unwrap();
        assert!((Float::with_val(256, &hi - &nu)).abs().to_f64() < 1e-30);
    }

    #[test]
    fn closed_form_roots() {
        let c = PrecisionContext::with_bits(128).unwrap();
        let r: std::collections::BTreeMap<i64, Complex> = tasep_edge_roots(4, &c).unwrap().into_iter().collect();
        assert_eq!(r[&0], Complex::with_val(128, -&r[&1]));
        for j in 1..4 {
            let refl = Complex::with_val(128, r[&-j].conj_ref());
            assert!(cabs_f64(&Complex::with_val(128, &r[&(j + 1)] - refl)) < 1e-30);
        }
    }

    #[test]
    fn q_infinity_vanishes_at_first_root_only() {
        let c = PrecisionContext::with_bits(128).unwrap();
        let nu = tasep_nu1(&c).unwrap();
        let r: std::collections::BTreeMap<i64, Complex> = tasep_edge_roots(1, &c).unwrap().into_iter().collect();
        let at_root = q_infinity(&r[&1], &nu, &c).unwrap();
        assert!(cabs_f64(&at_root) < 1e-15, "{at_root}");
        let generic = q_infinity(&c.complex((1.0, 0.5)), &nu, &c).unwrap();
        assert!(cabs_f64(&generic) > 1e-3);
    }
}

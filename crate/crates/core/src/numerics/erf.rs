//! Complex error function.
//!
//! Near the origin a Maclaurin series is summed with enough guard bits to
//! absorb both the internal cancellation (~e^{|z|²}) and the smallness of
//! erfc in the right half plane. Far out in the right half plane the Laplace
//! continued fraction for erfc is used; the left half plane follows from
//! erfc(-z) = 2 - erfc(z).

use super::{NumericsError, PrecisionContext};
use rug::float::Constant;
use rug::{Complex, Float};

/// Guard bits beyond which the Taylor branch gives up.
const MAX_GUARD_BITS: u32 = 1 << 16;
/// Radius beyond which the continued fraction is attempted.
const CF_RADIUS: f64 = 8.0;

fn is_zero(z: &Complex) -> bool {
    z.real().is_zero() && z.imag().is_zero()
}

/// Largest binary exponent among the components of `z` (None when zero).
fn max_exp(z: &Complex) -> Option<i32> {
    match (z.real().get_exp(), z.imag().get_exp()) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn taylor_guard(z: &Complex) -> u32 {
    let (x, y) = (z.real().to_f64(), z.imag().to_f64());
    let r2 = x * x + y * y;
    let re_z2 = (x * x - y * y).max(0.0);
    ((r2 + re_z2) * std::f64::consts::LOG2_E).ceil() as u32 + 40
}

/// erf(z) by its Maclaurin series at `out` bits of relative accuracy in both erf and 1-erf.
fn erf_taylor(z: &Complex, out: u32) -> Result<Complex, NumericsError> {
    let guard = taylor_guard(z);
    if guard > MAX_GUARD_BITS {
        return Err(NumericsError::PrecisionExhausted(format!(
            "erf series at |z| = {:.3e} needs {guard} guard bits",
            super::cabs_f64(z)
        )));
    }
    if is_zero(z) {
        return Ok(Complex::new(out));
    }
    let wp = out + guard;
    let zw = Complex::with_val(wp, z);
    let mz2 = -Complex::with_val(wp, zw.square_ref());
    let r2 = zw.real().to_f64().powi(2) + zw.imag().to_f64().powi(2);
    let mut t = zw.clone();
    let mut sum = zw.clone();
    let mut n: u64 = 0;
    loop {
        n += 1;
        t *= &mz2;
        t /= n;
        let term = Complex::with_val(wp, &t / (2 * n + 1));
        sum += &term;
        if (n as f64) > r2 {
            match (max_exp(&term), max_exp(&sum)) {
                (None, _) => break,
                (Some(te), Some(se)) if te < se - wp as i32 - 2 => break,
                _ => {}
            }
        }
    }
    let two_over_sqrt_pi = {
        let pi = Float::with_val(wp, Constant::Pi);
        Float::with_val(wp, 2 / pi.sqrt())
    };
    sum *= two_over_sqrt_pi;
    Ok(sum)
}

/// erfc(z) from the Laplace continued fraction, Re z > 0.
/// Returns None if the fraction fails to settle within the iteration budget.
fn erfc_cf(z: &Complex, out: u32, budget: usize) -> Option<Complex> {
    let re = z.real().to_f64();
    if re <= 0.0 {
        return None;
    }
    let wp = out + 32;
    let need = {
        let b = wp as f64 * std::f64::consts::LN_2;
        (b / re).powi(2) / 2.0 + 64.0
    };
    if need > budget as f64 {
        return None;
    }
    let cap = (4.0 * need) as usize + 200;
    let zw = Complex::with_val(wp, z);
    let tiny = super::pow2(-2 * wp as i32, wp);
    let mut f = zw.clone();
    let mut c = f.clone();
    let mut d = Complex::new(wp);
    for n in 1..=cap {
        let a = Float::with_val(wp, n) / 2u32;
        d *= &a;
        d += &zw;
        if is_zero(&d) {
            d = Complex::with_val(wp, &tiny);
        }
        d.recip_mut();
        c.recip_mut();
        c *= &a;
        c += &zw;
        if is_zero(&c) {
            c = Complex::with_val(wp, &tiny);
        }
        let delta = Complex::with_val(wp, &c * &d);
        f *= &delta;
        let dev = Complex::with_val(wp, &delta - 1u32);
        match max_exp(&dev) {
            None => return Some(finish_cf(&zw, &f, out)),
            Some(e) if e < -(wp as i32) + 2 => return Some(finish_cf(&zw, &f, out)),
            _ => {}
        }
    }
    None
}

fn finish_cf(z: &Complex, f: &Complex, out: u32) -> Complex {
    let wp = z.prec().0;
    let mut e = -Complex::with_val(wp, z.square_ref());
    e.exp_mut();
    let sqrt_pi = Float::with_val(wp, Constant::Pi).sqrt();
    e /= f;
    e /= sqrt_pi;
    Complex::with_val(out, e)
}

fn in_cf_region(z: &Complex) -> bool {
    super::cabs_f64(z) > CF_RADIUS && z.real().to_f64() > 0.0
}

/// erfc(z) with relative accuracy at context precision.
pub fn erfc_complex(z: &Complex, ctx: &PrecisionContext) -> Result<Complex, NumericsError> {
    let out = ctx.prec();
    if z.real().is_sign_negative() && !z.real().is_zero() {
        let mz = Complex::with_val(z.prec().0, -z);
        let e = erfc_complex(&mz, &ctx.at_bits(out + 16))?;
        return Ok(Complex::with_val(out, 2u32 - e));
    }
    if in_cf_region(z) {
        if let Some(v) = erfc_cf(z, out, ctx.series_terms_cap) {
            return Ok(v);
        }
    }
    let e = erf_taylor(z, out)?;
    Ok(Complex::with_val(out, 1u32 - e))
}

/// erf(z) at context precision.
pub fn erf_complex(z: &Complex, ctx: &PrecisionContext) -> Result<Complex, NumericsError> {
    let out = ctx.prec();
    if in_cf_region(z) {
        if let Some(v) = erfc_cf(z, out + 16, ctx.series_terms_cap) {
            return Ok(Complex::with_val(out, 1u32 - v));
        }
    }
    let mz = Complex::with_val(z.prec().0, -z);
    if in_cf_region(&mz) {
        if let Some(v) = erfc_cf(&mz, out + 16, ctx.series_terms_cap) {
            return Ok(Complex::with_val(out, v - 1u32));
        }
    }
    let e = erf_taylor(z, out)?;
    Ok(Complex::with_val(out, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn rel_err(a: &Complex, b: &Complex) -> f64 {
        let d = Complex::with_val(a.prec().0, a - b);
        let nd = Float::with_val(a.prec().0, d.abs_ref());
        let nb = Float::with_val(a.prec().0, b.abs_ref());
        Float::with_val(a.prec().0, nd / nb).to_f64()
    }

    #[test]
    fn real_axis_matches_mpfr() {
        let c = ctx();
        for x in [0.1, 0.5, 1.0, 2.5, 4.0, 7.5] {
            let z = c.complex((x, 0.0));
            let ours = erf_complex(&z, &c).unwrap();
            let reference = Float::with_val(c.prec(), x).erf();
            let d = Float::with_val(c.prec(), ours.real() - &reference).abs();
            assert!(d.to_f64() < 1e-95, "x={x} d={d}");
            assert!(ours.imag().to_f64().abs() < 1e-300);
        }
    }

    #[test]
    fn erfc_large_real_matches_mpfr() {
        let c = ctx();
        for x in [9.0, 12.0, 20.0, 40.0] {
            let z = c.complex((x, 0.0));
            let ours = erfc_complex(&z, &c).unwrap();
            let reference = Complex::with_val(c.prec(), (Float::with_val(c.prec(), x).erfc(), 0));
            assert!(rel_err(&ours, &reference) < 1e-95, "x={x}");
        }
    }

    #[test]
    fn continued_fraction_agrees_with_high_guard_series() {
        let c = ctx();
        for (x, y) in [(9.0, 3.0), (6.0, 7.0), (10.0, -10.0), (12.0, 2.0)] {
            let z = c.complex((x, y));
            let cf = erfc_cf(&z, c.prec(), c.series_terms_cap).expect("cf converges");
            let t = erf_taylor(&z, c.prec()).unwrap();
            let series = Complex::with_val(c.prec(), 1u32 - t);
            assert!(rel_err(&cf, &series) < 1e-90, "z=({x},{y})");
        }
    }

    #[test]
    fn small_argument_known_value() {
        // erf(i) = 2i/sqrt(pi) * F(1) with F the Dawson-type integral: erfi(1)=1.6504257587975428
        let c = ctx();
        let z = c.complex((0.0, 1.0));
        let e = erf_complex(&z, &c).unwrap();
        assert!(e.real().to_f64().abs() < 1e-300);
        assert!((e.imag().to_f64() - 1.650_425_758_797_542_8).abs() < 1e-15);
    }

    #[test]
    fn precision_exhaustion_is_reported() {
        let c = ctx();
        let z = c.complex((0.0, 300.0));
        assert!(matches!(erf_complex(&z, &c), Err(NumericsError::PrecisionExhausted(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn odd_and_conjugate_symmetric(x in -12.0f64..12.0, y in -12.0f64..12.0) {
            let c = PrecisionContext::with_bits(160).unwrap();
            let z = c.complex((x, y));
            let e = erf_complex(&z, &c).unwrap();
            let em = erf_complex(&Complex::with_val(160, -&z), &c).unwrap();
            let ec = erf_complex(&Complex::with_val(160, z.conj_ref()), &c).unwrap();
            let scale = 1.0 + crate::numerics::cabs_f64(&e);
            let s1 = crate::numerics::cabs_f64(&Complex::with_val(160, &e + &em)) / scale;
            let s2 = crate::numerics::cabs_f64(&Complex::with_val(160, &e - Complex::with_val(160, ec.conj_ref()))) / scale;
            prop_assert!(s1 < 1e-40);
            prop_assert!(s2 < 1e-40);
        }

        #[test]
        fn erf_plus_erfc_is_one(x in -10.0f64..10.0, y in -6.0f64..6.0) {
            let c = PrecisionContext::with_bits(160).unwrap();
            let z = c.complex((x, y));
            let a = erf_complex(&z, &c).unwrap();
            let b = erfc_complex(&z, &c).unwrap();
            let s = Complex::with_val(160, &a + &b) - 1u32;
            let scale = 1.0 + crate::numerics::cabs_f64(&a);
            prop_assert!(crate::numerics::cabs_f64(&Complex::with_val(160, s)) / scale < 1e-40);
        }
    }
}

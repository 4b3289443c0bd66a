//! Large-|j| model of the edge roots and Euler–Maclaurin tail sums.
//!
//! For μ = 0 the zeroes of 1 + erf(w/(2√2)) with |j| large solve, with
//! u = (w/4)², the asymptotic equation
//! u = iπj − ¼ log(8πu) + ½ log S(u),  S(u) = Σ_m (−1)^m (2m−1)!!/(4u)^m,
//! which follows from the large-argument expansion of erfc. Its error is
//! exponentially small in |u|, so past j ≈ 30 it is exact at any working
//! precision. At finite μ the same roots stand in for the tail.

use crate::numerics::{cabs, pow2, NumericsError, TanhSinh};
use rug::float::Constant;
use rug::{Complex, Float};

#[derive(Clone, Debug, PartialEq)]
pub enum TailModel {
    /// Zeroes of 1 + erf from the asymptotic equation; w_{−j} = conj(w_j).
    ErfAsymptotic,
    /// The leading behaviour 4√(±iπj).
    OneTerm,
    /// (w_{±j}/4)² = ±iπj + c₀ + c₁ log j + c₂/√j, coefficients per side.
    Shifted { plus: [Complex; 3], minus: [Complex; 3] },
}

/// Model roots at ±t together with combinations that cancel at leading
/// order, evaluated without that cancellation (all O(log t/t^{3/2})).
pub struct ModelPoint {
    pub plus: Complex,
    pub minus: Complex,
    /// 1/w_{±t} − 1/(4√(±iπt)).
    pub inv_diff_plus: Complex,
    pub inv_diff_minus: Complex,
    /// 1/w_t² + 1/w_{−t}².
    pub inv_sq_sum: Complex,
}

impl TailModel {
    /// (u, δ) on one side, where u = (w/4)² and δ = ±iπt − u.
    fn u_delta(&self, t: &Float, positive: bool, wp: u32) -> (Complex, Complex) {
        match self {
            TailModel::ErfAsymptotic => {
                let u = erf_u(t, wp);
                let pi = Float::with_val(wp, Constant::Pi);
                let (s, _) = series_s(&u, wp);
                let mut d = Complex::with_val(wp, &u * Float::with_val(wp, &pi * 8u32)).ln() / 4u32;
                d -= s.ln() / 2u32;
                if positive {
                    (u, d)
                } else {
                    (u.conj(), d.conj())
                }
            }
            TailModel::OneTerm => {
                let pi = Float::with_val(wp, Constant::Pi);
                let s = if positive { 1 } else { -1 };
                (Complex::with_val(wp, (0, pi * t * s)), Complex::new(wp))
            }
            TailModel::Shifted { plus, minus } => {
                let c = if positive { plus } else { minus };
                let pi = Float::with_val(wp, Constant::Pi);
                let s = if positive { 1 } else { -1 };
                let mut d = Complex::with_val(wp, &c[1] * Float::with_val(wp, t.ln_ref()));
                d += &c[0];
                d += Complex::with_val(wp, &c[2] / Float::with_val(wp, t.sqrt_ref()));
                let d = -d;
                let u = Complex::with_val(wp, (0, pi * t * s)) - &d;
                (u, d)
            }
        }
    }

    /// Model root at continuous index ±t.
    pub fn root(&self, t: &Float, positive: bool, prec: u32) -> Complex {
        let (u, _) = self.u_delta(t, positive, prec + 16);
        Complex::with_val(prec, u.sqrt() * 4u32)
    }

    pub fn point(&self, t: &Float, prec: u32) -> ModelPoint {
        let wp = prec + 16;
        let pi = Float::with_val(wp, Constant::Pi);
        let side = |positive: bool| {
            let (u, d) = self.u_delta(t, positive, wp);
            let su = Complex::with_val(wp, u.sqrt_ref());
            let w = Complex::with_val(wp, &su * 4u32);
            let s = if positive { 1 } else { -1 };
            let sl = Complex::with_val(wp, (0, Float::with_val(wp, &pi * t) * s)).sqrt();
            // 1/w − 1/(4√(±iπt)) = 4δ / ((√(±iπt) + √u) · w · 4√(±iπt))
            let den = Complex::with_val(wp, &sl + &su) * &w * Complex::with_val(wp, &sl * 4u32);
            let inv_diff = Complex::with_val(wp, &d * 4u32) / den;
            (u, d, w, inv_diff)
        };
        let (up, dp, wp_, ip) = side(true);
        let (um, dm, wm, im) = side(false);
        // (1/u₊ + 1/u₋)/16 with u₊ + u₋ = −δ₊ − δ₋
        let num = -Complex::with_val(wp, &dp + &dm);
        let inv_sq_sum = num / Complex::with_val(wp, &up * &um) / 16u32;
        let c = |z: Complex| Complex::with_val(prec, z);
        ModelPoint { plus: c(wp_), minus: c(wm), inv_diff_plus: c(ip), inv_diff_minus: c(im), inv_sq_sum: c(inv_sq_sum) }
    }

    /// The textbook two-term asymptote 4√(±iπt − log(±8iπ²t)/4).
    pub fn two_term(t: &Float, positive: bool, prec: u32) -> Complex {
        let wp = prec + 16;
        let pi = Float::with_val(wp, Constant::Pi);
        let ipt = Complex::with_val(wp, (0, Float::with_val(wp, &pi * t)));
        let l = Complex::with_val(wp, &ipt * Float::with_val(wp, &pi * 8u32)).ln() / 4u32;
        let w = Complex::with_val(wp, ipt - l).sqrt() * 4u32;
        let w = Complex::with_val(prec, w);
        if positive {
            w
        } else {
            w.conj()
        }
    }
}

/// S(u) and S′(u)/S(u), summed to optimal truncation.
fn series_s(u: &Complex, wp: u32) -> (Complex, Complex) {
    let inv = Complex::with_val(wp, u * 4u32).recip();
    let mut term = Complex::with_val(wp, 1);
    let mut s = Complex::with_val(wp, 1);
    // Σ m·term_m; S′ = −(1/u)·that
    let mut ms = Complex::new(wp);
    let eps = pow2(-(wp as i32), wp);
    let mut last = Float::with_val(wp, 1);
    for m in 1u32..4000 {
        term *= &inv;
        term *= -(2 * m as i32 - 1);
        let tm = cabs(&term);
        if tm > last {
            break;
        }
        s += &term;
        ms += Complex::with_val(wp, &term * m);
        if tm < eps {
            break;
        }
        last = tm;
    }
    let ds = -Complex::with_val(wp, ms / u) / &s;
    (s, ds)
}

/// Solution u of the asymptotic zero equation at continuous index t > 0.
pub fn erf_u(t: &Float, prec: u32) -> Complex {
    let wp = prec + 16;
    let pi = Float::with_val(wp, Constant::Pi);
    let ipt = Complex::with_val(wp, (0, Float::with_val(wp, &pi * t)));
    let eight_pi = Float::with_val(wp, &pi * 8u32);
    let mut u = Complex::with_val(wp, &ipt - Complex::with_val(wp, &ipt * &eight_pi).ln() / 4u32);
    let tol = pow2(-(wp as i32) + 4, wp);
    for _ in 0..60 {
        let (s, ds) = series_s(&u, wp);
        let mut f = Complex::with_val(wp, &u - &ipt);
        f += Complex::with_val(wp, &u * &eight_pi).ln() / 4u32;
        f -= s.ln() / 2u32;
        let fp = Complex::with_val(wp, 1u32 + Complex::with_val(wp, &u * 4u32).recip()) - ds / 2u32;
        let du = f / fp;
        let small = cabs(&du) <= Float::with_val(wp, cabs(&u) * &tol);
        u -= du;
        if small {
            break;
        }
    }
    Complex::with_val(prec, u)
}

/// n-th derivative at `a` by the central difference Δⁿ/hⁿ (O(h²) error),
/// with h balancing truncation against rounding.
fn derivative<F>(g: &F, a: &Float, n: u32, comps: usize, wp: u32) -> Vec<Complex>
where
    F: Fn(&Float) -> Vec<Complex>,
{
    let h = Float::with_val(wp, a * pow2(-((wp / (n + 2)) as i32), wp));
    let mut out = vec![Complex::new(wp); comps];
    let mut binom = 1i64;
    for k in 0..=n {
        let off = Float::with_val(wp, Float::with_val(wp, n as f64 / 2.0 - k as f64) * &h);
        let v = g(&Float::with_val(wp, a + &off));
        let c = if k % 2 == 0 { binom } else { -binom };
        for (o, x) in out.iter_mut().zip(v) {
            *o += x * c;
        }
        binom = binom * (n - k) as i64 / (k + 1) as i64;
    }
    let hn = Float::with_val(wp, rug::ops::Pow::pow(&h, n));
    out.into_iter().map(|o| o / &hn).collect()
}

/// Σ_{k=m+1}^∞ g(k) for a vector of summands.
///
/// Terms up to K = max(4m, 256) are added directly; the rest is the
/// midpoint Euler–Maclaurin formula ∫_{K+½}^∞ g + g′/24 − 7g‴/5760 + …
/// through g⁽⁹⁾, with derivatives at K+½ from central differences. The
/// integral uses t = (K+½)/s² on (0, 1], so summands must be free of
/// leading-order cancellation (see `ModelPoint`). Returns the sums and an
/// error estimate (size of the last correction).
pub fn tail_sums<F>(g: F, n: usize, m: usize, prec: u32) -> Result<(Vec<Complex>, f64), NumericsError>
where
    F: Fn(&Float) -> Vec<Complex>,
{
    let wp = prec + 24;
    let k_direct = (4 * m).max(256);
    let mut sums = vec![Complex::new(wp); n];
    for k in (m + 1)..=k_direct {
        for (s, v) in sums.iter_mut().zip(g(&Float::with_val(wp, k))) {
            *s += v;
        }
    }
    let a = Float::with_val(wp, k_direct) + 0.5f64;
    let quad = TanhSinh::new(wp);
    let two_a = Float::with_val(wp, &a * 2u32);
    let integral = quad.integrate_many(
        |s| {
            let s2 = Float::with_val(wp, s.square_ref());
            let t = Float::with_val(wp, &a / &s2);
            let jac = Float::with_val(wp, &two_a / Float::with_val(wp, &s2 * s));
            g(&t).into_iter().map(|v| v * &jac).collect()
        },
        n,
        &Float::new(wp),
        &Float::with_val(wp, 1),
        prec.saturating_sub(16),
        &pow2(-(prec as i32), wp),
    )?;
    // −B_{n+1}(½)/(n+1)! for n = 1, 3, 5, 7, 9
    let coeffs: [(u32, i64, u64); 5] =
        [(1, 1, 24), (3, -7, 5760), (5, 31, 967680), (7, -127, 154828800), (9, 73, 3503554560)];
    let mut err = 0f64;
    for c in 0..n {
        sums[c] += &integral[c];
    }
    for (order, num, den) in coeffs {
        let dn = derivative(&g, &a, order, n, wp);
        for c in 0..n {
            let term = Complex::with_val(wp, &dn[c] * num) / Float::with_val(wp, den);
            if order == 9 {
                err = err.max(crate::numerics::cabs_f64(&term));
            }
            sums[c] += term;
        }
    }
    Ok((sums.into_iter().map(|s| Complex::with_val(prec, s)).collect(), err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_of_power_and_log_sums() {
        let p = 200;
        // Σ_{k>64} k^{-3/2} = ζ(3/2) − Σ_{k≤64} k^{-3/2}
        let (s, err) = tail_sums(
            |t| {
                let v = Float::with_val(p, t.sqrt_ref()) * t;
                vec![Complex::with_val(p, v.recip())]
            },
            1,
            64,
            p,
        )
        .unwrap();
        let mut want = Float::with_val(p, Float::with_val(p, 1.5).zeta());
        for k in 1..=64u32 {
            let kf = Float::with_val(p, k);
            want -= (Float::with_val(p, kf.sqrt_ref()) * &kf).recip();
        }
        let d = Float::with_val(p, s[0].real() - &want).abs().to_f64();
        assert!(d < 1e-30, "{d}");
        assert!(err < 1e-20);
    }

    #[test]
    fn asymptotic_zero_equation_is_self_consistent() {
        let p = 200;
        let t = Float::with_val(p, 40);
        let u = erf_u(&t, p);
        // the two-term form is within O(log j / j) of the full solution
        let w = Complex::with_val(p, u.sqrt_ref()) * 4u32;
        let w2 = TailModel::two_term(&t, true, p);
        let d = crate::numerics::cabs_f64(&Complex::with_val(p, &w - &w2));
        assert!(d < 0.05 && d > 1e-6, "{d}");
    }
}

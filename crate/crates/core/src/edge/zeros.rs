//! Zeroes of 𝒬(w) = 1 + erf(w/(2√2)) and the identities they satisfy.

use super::tail::{tail_sums, TailModel};
use super::EdgeError;
use crate::numerics::{cabs, cabs_f64, erfc_complex, sqrt_2pi, zeta_half, PrecisionContext};
use rug::float::Constant;
use rug::{Complex, Float};

/// 𝒬(w) = erfc(−w/(2√2)).
pub fn erf_q(w: &Complex, ctx: &PrecisionContext) -> Result<Complex, EdgeError> {
    let p = ctx.prec();
    let s8 = Float::with_val(p, 8).sqrt();
    let z = -(Complex::with_val(p, w) / s8);
    Ok(erfc_complex(&z, ctx)?)
}

/// 𝒬′(w) = e^{−w²/8}/√(2π).
fn erf_q_prime(w: &Complex, prec: u32) -> Complex {
    let e = Complex::with_val(prec, -Complex::with_val(prec, w.square_ref()) / 8u32).exp();
    e / sqrt_2pi(prec)
}

fn seed(j: usize, prec: u32) -> Complex {
    TailModel::two_term(&Float::with_val(prec, j), true, prec)
}

/// w_j(0) for j = 1..=count (upper half plane); w_{−j} = conj(w_j).
pub fn erf_zeros(count: usize, ctx: &PrecisionContext) -> Result<Vec<Complex>, EdgeError> {
    if count == 0 {
        return Err(EdgeError::InvalidParameters("count must be at least 1".into()));
    }
    let p = ctx.prec();
    let work = ctx.at_bits(p + 32);
    let wp = work.prec();
    let mut out: Vec<Complex> = Vec::with_capacity(count);
    for j in 1..=count {
        let mut w = seed(j, wp);
        let mut done = false;
        for _ in 0..ctx.max_newton_iters {
            let q = erf_q(&w, &work)?;
            let dw = q / erf_q_prime(&w, wp);
            let step = cabs(&dw);
            w -= dw;
            if step <= Float::with_val(wp, cabs(&w) * crate::numerics::pow2(-(p as i32), wp)) {
                done = true;
                break;
            }
        }
        let res = cabs(&erf_q(&w, &work)?);
        if !done || res > ctx.newton_tol {
            return Err(EdgeError::Nonconvergence(format!("erf zero j = {j}: |Q(w)| = {:e}", res.to_f64())));
        }
        let w = Complex::with_val(p, w);
        for (k, prev) in out.iter().enumerate() {
            if cabs_f64(&Complex::with_val(p, &w - prev)) < 1e-8 {
                return Err(EdgeError::DuplicateZero(k + 1, j));
            }
        }
        out.push(w);
    }
    Ok(out)
}

fn i_sqrt(j: &Float, positive: bool, prec: u32) -> Complex {
    // √(±iπj), principal branch
    let pi = Float::with_val(prec, Constant::Pi);
    let s = if positive { 1 } else { -1 };
    Complex::with_val(prec, (0, pi * j * s)).sqrt()
}

fn require(zeros: &[Complex], min: usize) -> Result<(), EdgeError> {
    if zeros.len() < min {
        return Err(EdgeError::InvalidParameters(format!("need at least {min} zeros, got {}", zeros.len())));
    }
    Ok(())
}

/// The two summands of the Appendix sums for the conjugate pair ±k.
fn sum_terms(wp: &Complex, k: &Float, prec: u32) -> [Complex; 2] {
    let wm = Complex::with_val(prec, wp.conj_ref());
    let mut s1 = Complex::with_val(prec, wp.recip_ref()) + Complex::with_val(prec, wm.recip_ref());
    let r = Complex::with_val(prec, i_sqrt(k, true, prec) * 4u32).recip();
    s1 -= Complex::with_val(prec, &r + Complex::with_val(prec, r.conj_ref()));
    let s2 = Complex::with_val(prec, wp.square_ref()).recip() + Complex::with_val(prec, wm.square_ref()).recip();
    [s1, s2]
}

/// Σ(1/w_j − 1/(4√(iπj))) and Σ 1/w_j² over j ∈ ℤ*, truncated at |j| ≤ count.
pub fn sum_identities_truncated(zeros: &[Complex], ctx: &PrecisionContext) -> (Complex, Complex) {
    let p = ctx.prec();
    let mut s = [Complex::new(p), Complex::new(p)];
    for (i, w) in zeros.iter().enumerate() {
        let k = Float::with_val(p, i + 1);
        for (acc, t) in s.iter_mut().zip(sum_terms(w, &k, p)) {
            *acc += t;
        }
    }
    let [a, b] = s;
    (a, b)
}

/// Tail-corrected (s1, s2); the tail past the last zero uses the
/// asymptotic zero model.
pub fn sum_identities(zeros: &[Complex], ctx: &PrecisionContext) -> Result<(Complex, Complex), EdgeError> {
    require(zeros, 64)?;
    let p = ctx.prec();
    let (mut s1, mut s2) = sum_identities_truncated(zeros, ctx);
    let model = TailModel::ErfAsymptotic;
    let (tail, _) = tail_sums(
        |t| {
            let pt = model.point(t, p);
            vec![pt.inv_diff_plus + pt.inv_diff_minus, pt.inv_sq_sum]
        },
        2,
        zeros.len(),
        p,
    )?;
    s1 += &tail[0];
    s2 += &tail[1];
    Ok((s1, s2))
}

/// Closed forms −1/√(2π) − ζ(1/2)/(2√(2π)) and −3/16 + 1/(2π).
pub fn sum_identity_targets(ctx: &PrecisionContext) -> (Float, Float) {
    let p = ctx.prec();
    let s = sqrt_2pi(p);
    let t1 = -(Float::with_val(p, 1u32 + Float::with_val(p, zeta_half(ctx) / 2u32)) / &s);
    let pi = Float::with_val(p, Constant::Pi);
    let t2 = Float::with_val(p, Float::with_val(p, pi * 2u32).recip() - Float::with_val(p, 3) / 16u32);
    (t1, t2)
}

/// Residuals of the μ → 0 edge equations for j = ±1..=±jmax.
pub(crate) fn mu0_residuals(zeros: &[Complex], jmax: usize, with_zeta: bool, ctx: &PrecisionContext) -> Result<Vec<(i64, Complex)>, EdgeError> {
    let p = ctx.prec();
    let wp = p + 16;
    let m = zeros.len();
    let w_of = |k: i64| -> Complex {
        let z = &zeros[k.unsigned_abs() as usize - 1];
        if k > 0 {
            Complex::with_val(wp, z)
        } else {
            Complex::with_val(wp, z.conj_ref())
        }
    };
    let half_isq = |k: i64| -> Complex {
        let kk = Float::with_val(wp, k.unsigned_abs());
        Complex::with_val(wp, i_sqrt(&kk, k > 0, wp) * 2u32).recip()
    };
    let zeta = Float::with_val(wp, zeta_half(ctx)) / sqrt_2pi(wp);
    let js: Vec<i64> = (1..=jmax as i64).flat_map(|j| [j, -j]).collect();
    let targets: Vec<Complex> = js.iter().map(|&j| w_of(j)).collect();
    let model = TailModel::ErfAsymptotic;
    let (tails, _) = tail_sums(
        |t| {
            let pt = model.point(t, wp);
            let lead = Complex::with_val(wp, &pt.inv_diff_plus + &pt.inv_diff_minus) * 2u32;
            targets
                .iter()
                .map(|wj| {
                    // 2/(w_j − W) = −2/W − 2w_j/W² + 2w_j²/(W²(w_j − W))
                    let mut v = -Complex::with_val(wp, &lead);
                    v -= Complex::with_val(wp, wj * &pt.inv_sq_sum) * 2u32;
                    let wj2 = Complex::with_val(wp, wj.square_ref()) * 2u32;
                    for r in [&pt.plus, &pt.minus] {
                        let d = Complex::with_val(wp, r.square_ref()) * Complex::with_val(wp, wj - r);
                        v += Complex::with_val(wp, &wj2 / d);
                    }
                    v
                })
                .collect()
        },
        targets.len(),
        m,
        wp,
    )?;
    let mut out = Vec::with_capacity(js.len());
    for (idx, &j) in js.iter().enumerate() {
        let wj = &targets[idx];
        let mut r = Complex::with_val(wp, wj / 8u32);
        if with_zeta {
            r += &zeta;
        }
        r -= half_isq(j);
        for k in (1..=m as i64).flat_map(|k| [k, -k]) {
            if k == j {
                continue;
            }
            r -= Complex::with_val(wp, wj - w_of(k)).recip() * 2u32;
            r -= half_isq(k);
        }
        r -= &tails[idx];
        out.push((j, Complex::with_val(p, r)));
    }
    Ok(out)
}

/// Largest residual of the μ → 0 edge equations over 0 < |j| ≤ 8.
pub fn check_mu0_equations(zeros: &[Complex], ctx: &PrecisionContext) -> Result<f64, EdgeError> {
    require(zeros, 32)?;
    let r = mu0_residuals(zeros, 8, true, ctx)?;
    Ok(r.iter().map(|(_, v)| cabs_f64(v)).fold(0.0, f64::max))
}

/// Relative deviation between the Weierstrass product (zeroes up to the
/// given count, asymptotic model beyond) and 𝒬(x).
pub fn weierstrass_check(zeros: &[Complex], x: &Complex, ctx: &PrecisionContext) -> Result<f64, EdgeError> {
    require(zeros, 1)?;
    let p = ctx.prec();
    let wp = p + 16;
    let x = Complex::with_val(wp, x);
    let x2 = Complex::with_val(wp, x.square_ref());
    let factor = |w: &Complex| -> Complex {
        let r = Complex::with_val(wp, &x / w);
        let mut v = Complex::with_val(wp, 1u32 - &r).ln();
        v += &r;
        v += Complex::with_val(wp, r.square_ref()) / 2u32;
        v
    };
    let pi = Float::with_val(wp, Constant::Pi);
    let mut lg = Complex::with_val(wp, &x / sqrt_2pi(wp)) - Complex::with_val(wp, &x2 / Float::with_val(wp, &pi * 4u32));
    for z in zeros {
        lg += factor(&Complex::with_val(wp, z));
        lg += factor(&Complex::with_val(wp, z.conj_ref()));
    }
    let model = TailModel::ErfAsymptotic;
    let eps = crate::numerics::pow2(-(wp as i32), wp);
    let (tail, _) = tail_sums(
        |t| {
            let w = model.root(t, true, wp);
            let wc = Complex::with_val(wp, w.conj_ref());
            let (rp, rm) = (Complex::with_val(wp, &x / &w), Complex::with_val(wp, &x / &wc));
            if cabs_f64(&rp) > 0.5 {
                return vec![factor(&w) + factor(&wc)];
            }
            // −Σ_{p≥3} (r₊^p + r₋^p)/p, free of the cancelling p ≤ 2 terms
            let (mut ap, mut am) = (Complex::with_val(wp, rp.square_ref()), Complex::with_val(wp, rm.square_ref()));
            let mut v = Complex::new(wp);
            for k in 3u32.. {
                ap *= &rp;
                am *= &rm;
                let term = Complex::with_val(wp, &ap + &am) / k;
                let small = cabs(&term) < Float::with_val(wp, cabs(&v) * &eps);
                v -= term;
                if small || k > 4 * wp {
                    break;
                }
            }
            vec![v]
        },
        1,
        zeros.len(),
        wp,
    )?;
    lg += &tail[0];
    let prod = lg.exp();
    let q = erf_q(&x, &ctx.at_bits(wp))?;
    let diff = cabs(&Complex::with_val(wp, &prod - &q));
    let scale = cabs(&q);
    let dev = if scale.is_zero() { diff } else { diff / scale };
    Ok(dev.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::TanhSinh;

    fn ctx() -> PrecisionContext {
        PrecisionContext::with_bits(200).unwrap()
    }

    /// (1/2πi)∮ w^k 𝒬′/𝒬 dw around the box [re0, re1] × [im0, im1].
    fn box_moment(k: u32, b: [f64; 4], ctx: &PrecisionContext) -> Complex {
        let p = ctx.prec();
        let q = TanhSinh::new(p);
        let corners = [(b[0], b[2]), (b[1], b[2]), (b[1], b[3]), (b[0], b[3]), (b[0], b[2])];
        let mut total = Complex::new(p);
        for e in corners.windows(2) {
            let z0 = ctx.complex(e[0]);
            let dz = Complex::with_val(p, ctx.complex(e[1]) - &z0);
            let v = q
                .integrate(
                    |s| {
                        let z = Complex::with_val(p, &z0 + Complex::with_val(p, &dz * s));
                        let ratio = erf_q_prime(&z, p) / erf_q(&z, ctx).unwrap();
                        let zk = Complex::with_val(p, rug::ops::Pow::pow(&z, k));
                        ratio * zk * &dz
                    },
                    &Float::new(p),
                    &Float::with_val(p, 1),
                    120,
                    None,
                )
                .unwrap();
            total += v;
        }
        let two_pi_i = Complex::with_val(p, (0, ctx.pi() * 2u32));
        total / two_pi_i
    }

    #[test]
    fn first_zero_matches_contour_oracle() {
        let c = ctx();
        let z = erf_zeros(3, &c).unwrap();
        let b = [z[0].real().to_f64() - 1.0, z[0].real().to_f64() + 1.0, z[0].imag().to_f64() - 1.0, z[0].imag().to_f64() + 1.0];
        let count = box_moment(0, b, &c);
        assert!((count.real().to_f64() - 1.0).abs() < 1e-20 && count.imag().to_f64().abs() < 1e-20);
        let located = box_moment(1, b, &c);
        let d = cabs_f64(&Complex::with_val(c.prec(), &located - &z[0]));
        assert!(d < 1e-20, "{d}");
        // frozen regression value
        let want = c.complex((
            Float::parse("3.8319817152328592861757746773263432").map(|v| Float::with_val(c.prec(), v)).unwrap(),
            Float::parse("5.6327188363040028603626119822197999").map(|v| Float::with_val(c.prec(), v)).unwrap(),
        ));
        assert!(cabs_f64(&Complex::with_val(c.prec(), &z[0] - &want)) < 1e-30, "w1 = {}", z[0].to_string_radix(10, Some(36)));
    }

    #[test]
    fn residuals_and_conjugates() {
        let c = ctx();
        let z = erf_zeros(50, &c).unwrap();
        for w in &z {
            assert!(cabs(&erf_q(w, &c).unwrap()) < c.newton_tol);
            let wc = Complex::with_val(c.prec(), w.conj_ref());
            assert!(cabs(&erf_q(&wc, &c).unwrap()) < c.newton_tol);
        }
        assert!(matches!(erf_zeros(0, &c), Err(EdgeError::InvalidParameters(_))));
    }

    #[test]
    fn sums_converge_without_tail() {
        let c = PrecisionContext::with_bits(128).unwrap();
        let z = erf_zeros(128, &c).unwrap();
        let (t1, t2) = sum_identity_targets(&c);
        let dev = |n: usize| {
            let (a, b) = sum_identities_truncated(&z[..n], &c);
            (cabs_f64(&Complex::with_val(128, a - &t1)), cabs_f64(&Complex::with_val(128, b - &t2)))
        };
        let (a64, b64) = dev(64);
        let (a128, b128) = dev(128);
        assert!(b128 < 0.6 * b64, "{b64} {b128}");
        assert!(a128 < a64);
        let (s1, s2) = sum_identities(&z[..64], &c).unwrap();
        assert!(cabs_f64(&Complex::with_val(128, s1 - &t1)) < 1e-25);
        assert!(cabs_f64(&Complex::with_val(128, s2 - &t2)) < 1e-25);
    }

    #[test]
    fn mu0_equations() {
        let c = ctx();
        let z = erf_zeros(40, &c).unwrap();
        let r = mu0_residuals(&z, 2, true, &c).unwrap();
        let worst = r.iter().map(|(_, v)| cabs_f64(v)).fold(0.0, f64::max);
        assert!(worst < 1e-20, "{worst}");
        let without = mu0_residuals(&z, 1, false, &c).unwrap();
        assert!(cabs_f64(&without[0].1) > 0.1);
    }

    #[test]
    fn weierstrass() {
        let c = ctx();
        let z = erf_zeros(40, &c).unwrap();
        assert!(weierstrass_check(&z, &c.complex(0), &c).unwrap() < 1e-40);
        let a = weierstrass_check(&z, &c.complex((1.0, 1.0)), &c).unwrap();
        let b = weierstrass_check(&z, &c.complex((1.0, -1.0)), &c).unwrap();
        assert!(a < 1e-20, "{a}");
        assert!((a - b).abs() < 1e-40, "{a} vs {b}");
    }
}

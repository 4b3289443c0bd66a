//! Baxter polynomials Q̂, T̂, P̂ of a converged root set.
//!
//! Coefficients are stored in ascending order. Binomial coefficients up to
//! 2^L enter with alternating signs, so polynomial work runs with L extra bits.

use super::{BetheError, BetheRootSet};
use crate::numerics::{cabs, PrecisionContext};
use rug::ops::Pow;
use rug::{Complex, Float};

#[derive(Clone, Debug)]
pub struct BaxterPolynomials {
    pub qhat: Vec<Complex>,
    pub that: Option<Vec<Complex>>,
    pub phat: Option<Vec<Complex>>,
    pub qhat0: Complex,
    /// Relative remainder of the T̂ division.
    pub t_remainder: Option<Float>,
}

pub(crate) fn work_prec(state: &BetheRootSet, ctx: &PrecisionContext) -> u32 {
    ctx.prec() + state.l as u32 + 32
}

pub fn poly_eval(p: &[Complex], y: &Complex) -> Complex {
    let prec = p.first().map_or(y.prec().0, |c| c.prec().0);
    let mut acc = Complex::new(prec);
    for c in p.iter().rev() {
        acc *= y;
        acc += c;
    }
    acc
}

fn poly_deriv(p: &[Complex]) -> Vec<Complex> {
    p.iter().enumerate().skip(1).map(|(k, c)| Complex::with_val(c.prec().0, c * k as u32)).collect()
}

fn poly_mul(a: &[Complex], b: &[Complex], wp: u32) -> Vec<Complex> {
    let mut out = vec![Complex::new(wp); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Complex::with_val(wp, x * y);
        }
    }
    out
}

/// p(c·y)
fn poly_scale_arg(p: &[Complex], c: &Float, wp: u32) -> Vec<Complex> {
    let mut pw = Float::with_val(wp, 1);
    p.iter()
        .map(|x| {
            let v = Complex::with_val(wp, x * &pw);
            pw *= c;
            v
        })
        .collect()
}

/// (1 − c·y)^L
fn binom_poly(l: usize, c: &Float, wp: u32) -> Vec<Complex> {
    let mut out = Vec::with_capacity(l + 1);
    let mut coef = Float::with_val(wp, 1);
    let mc = Float::with_val(wp, -c);
    for k in 0..=l {
        out.push(Complex::with_val(wp, &coef));
        coef *= &mc;
        coef *= (l - k) as u32;
        coef /= (k + 1) as u32;
    }
    out
}

fn poly_from_roots(roots: &[Complex], wp: u32) -> Vec<Complex> {
    let mut p = vec![Complex::with_val(wp, 1)];
    for r in roots {
        let mut next = vec![Complex::new(wp); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= Complex::with_val(wp, c * r);
        }
        p = next;
    }
    p
}

fn max_norm(p: &[Complex], prec: u32) -> Float {
    p.iter().map(cabs).fold(Float::new(prec), |m, x| if x > m { x } else { m })
}

/// Numerator (1−y)^L Q̂(qy) + q^N (1−qy)^L Q̂(y/q) of the T̂ division.
fn t_numerator(qhat: &[Complex], l: usize, n: usize, q: &Float, wp: u32) -> Vec<Complex> {
    let one = Float::with_val(wp, 1);
    let qinv = Float::with_val(wp, q.recip_ref());
    let a = poly_mul(&binom_poly(l, &one, wp), &poly_scale_arg(qhat, q, wp), wp);
    let qn = Float::with_val(wp, (&q).pow(n as u32));
    let b = poly_mul(&binom_poly(l, q, wp), &poly_scale_arg(qhat, &qinv, wp), wp);
    a.into_iter().zip(b).map(|(x, y)| x + y * &qn).collect()
}

/// Synthetic division by a monic polynomial: (quotient, remainder).
fn divide_monic(num: &[Complex], den: &[Complex], wp: u32) -> (Vec<Complex>, Vec<Complex>) {
    let dn = den.len() - 1;
    let mut rem: Vec<Complex> = num.to_vec();
    let qlen = num.len() - dn;
    let mut quo = vec![Complex::new(wp); qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn].clone();
        for (i, d) in den.iter().enumerate() {
            rem[k + i] -= Complex::with_val(wp, &c * d);
        }
        quo[k] = c;
    }
    rem.truncate(dn);
    (quo, rem)
}

/// Q̂ and T̂ without the remainder gate (used for sensitivity diagnostics).
pub fn transfer_t_unchecked(state: &BetheRootSet, ctx: &PrecisionContext) -> BaxterPolynomials {
    let wp = work_prec(state, ctx);
    let roots: Vec<Complex> = state.roots.iter().map(|r| Complex::with_val(wp, r)).collect();
    let qhat = poly_from_roots(&roots, wp);
    let q = Float::with_val(wp, &state.q);
    let num = t_numerator(&qhat, state.l, state.n, &q, wp);
    let (that, rem) = divide_monic(&num, &qhat, wp);
    let scale = max_norm(&num, wp);
    let r = Float::with_val(ctx.prec(), max_norm(&rem, wp) / scale);
    BaxterPolynomials { qhat0: qhat[0].clone(), qhat, that: Some(that), phat: None, t_remainder: Some(r) }
}

/// T̂ = [(1−y)^L Q̂(qy) + q^N (1−qy)^L Q̂(y/q)] / Q̂(y) by synthetic division.
pub fn transfer_t_poly(state: &BetheRootSet, ctx: &PrecisionContext) -> Result<BaxterPolynomials, BetheError> {
    let polys = transfer_t_unchecked(state, ctx);
    let r = polys.t_remainder.as_ref().expect("set above");
    if *r >= Float::with_val(ctx.prec(), ctx.newton_tol.sqrt_ref()) {
        return Err(BetheError::DivisionRemainder(r.to_f64()));
    }
    Ok(polys)
}

/// E = −qL − (1−q) T̂′(1)/T̂(1).
pub fn eigenvalue_from_t(polys: &BaxterPolynomials, l: usize, q: &Float, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    let that = polys.that.as_ref().ok_or_else(|| BetheError::InvalidParameters("T polynomial missing".into()))?;
    let wp = that[0].prec().0;
    let one = Complex::with_val(wp, 1);
    let t1 = poly_eval(that, &one);
    if cabs(&t1) <= ctx.newton_tol {
        return Err(BetheError::PoleProximity);
    }
    let dt1 = poly_eval(&poly_deriv(that), &one);
    let q = Float::with_val(wp, q);
    let e = -Complex::with_val(wp, dt1 / t1) * Float::with_val(wp, 1u32 - &q) - Float::with_val(wp, &q * l as u32);
    Ok(Complex::with_val(ctx.prec(), e))
}

/// E = (1−q)(Q̂′(1)/Q̂(1) − q^{−1} Q̂′(q^{−1})/Q̂(q^{−1})).
pub fn eigenvalue_from_q(polys: &BaxterPolynomials, q: &Float, ctx: &PrecisionContext) -> Result<Complex, BetheError> {
    let qh = &polys.qhat;
    let wp = qh[0].prec().0;
    let q = Float::with_val(wp, q);
    let dq = poly_deriv(qh);
    let one = Complex::with_val(wp, 1);
    let qi = Complex::with_val(wp, q.recip_ref());
    let a = poly_eval(qh, &one);
    let b = poly_eval(qh, &qi);
    if cabs(&a) <= ctx.newton_tol || cabs(&b) <= ctx.newton_tol {
        return Err(BetheError::PoleProximity);
    }
    let ra = poly_eval(&dq, &one) / a;
    let rb = poly_eval(&dq, &qi) / b * Float::with_val(wp, q.recip_ref());
    Ok(Complex::with_val(ctx.prec(), (ra - rb) * Float::with_val(wp, 1u32 - &q)))
}

/// Monic P̂ of degree L−N from the quantum Wronskian
/// K(1−y)^L = Q̂(y)P̂(y/q) − q^N Q̂(y/q)P̂(y), with K fixed by the top coefficient.
/// Coefficient k reads Σ_m p_m c_{k−m}(q^{−m} − q^{N−k+m}) = K(−1)^k C(L,k), which is
/// triangular in p_m (pivot q^{−m} − 1 at k = N + m, and 1 − q^N at k = 0).
pub fn baxter_p_poly(polys: &BaxterPolynomials, l: usize, n: usize, q: &Float, ctx: &PrecisionContext) -> Result<BaxterPolynomials, BetheError> {
    let c = &polys.qhat;
    let wp = c[0].prec().0;
    let q = Float::with_val(wp, q);
    let qi = Float::with_val(wp, q.recip_ref());
    let d = l - n;
    // powers q^e for e in [−L, L]
    let qpow = |e: i64| -> Float {
        if e >= 0 {
            Float::with_val(wp, (&q).pow(e as u32))
        } else {
            Float::with_val(wp, (&qi).pow((-e) as u32))
        }
    };
    let factor = |k: usize, m: usize| -> Float { qpow(-(m as i64)) - qpow(n as i64 - k as i64 + m as i64) };
    let binom = binom_poly(l, &Float::with_val(wp, 1), wp); // (−1)^k C(L,k)
    // Top coefficient k = L, m = d: K (−1)^L C(L,L) = q^{−d} − 1.
    let kk = Complex::with_val(wp, factor(l, d)) / &binom[l];
    let mut p = vec![Complex::new(wp); d + 1];
    p[d] = Complex::with_val(wp, 1);
    let tiny = Float::with_val(wp, ctx.newton_tol.sqrt_ref());
    for m in (1..d).rev() {
        let k = n + m;
        let mut rhs = Complex::with_val(wp, &kk * &binom[k]);
        for mp in (m + 1)..=d {
            if k >= mp && k - mp <= n {
                rhs -= Complex::with_val(wp, &p[mp] * &c[k - mp]) * factor(k, mp);
            }
        }
        // Q̂ is monic, so the pivot scale is set by q^{−m} − 1 alone.
        let f = factor(k, m);
        if Float::with_val(wp, f.abs_ref()) <= tiny {
            return Err(BetheError::Singular(f.to_f64()));
        }
        let piv = Complex::with_val(wp, &c[n]) * f;
        p[m] = rhs / piv;
    }
    if d >= 1 {
        // k = 0: p_0 c_0 (1 − q^N) = K
        // Q̂(0) is a product of N roots and may be tiny without being singular.
        let f = factor(0, 0);
        if Float::with_val(wp, f.abs_ref()) <= tiny || c[0].is_zero() {
            return Err(BetheError::Singular(f.to_f64()));
        }
        let piv = Complex::with_val(wp, &c[0]) * f;
        p[0] = Complex::with_val(wp, &kk * &binom[0]) / piv;
    }
    let mut out = polys.clone();
    out.phat = Some(p);
    Ok(out)
}

fn rel(res: Complex, scale: Float) -> f64 {
    let s = cabs(&res);
    if scale.is_zero() {
        return s.to_f64();
    }
    Float::with_val(s.prec(), s / scale).to_f64()
}

/// Sup-norm residuals of the two Wronskian identities
/// K(1−y)^L = Q̂(y)P̂(y/q) − q^N Q̂(y/q)P̂(y) and
/// K T̂(y) = Q̂(qy)P̂(y/q) − q^{2N} Q̂(y/q)P̂(qy), with K = (1−q^N)Q̂(0)P̂(0),
/// each normalized by the largest term at the probe point. Probes: a circle of
/// radius 1/2 and points −1 + x/√L.
pub fn wronskian_residuals(polys: &BaxterPolynomials, l: usize, n: usize, q: &Float, _ctx: &PrecisionContext) -> Result<(f64, f64), BetheError> {
    let qh = &polys.qhat;
    let ph = polys.phat.as_ref().ok_or_else(|| BetheError::InvalidParameters("P polynomial missing".into()))?;
    let th = polys.that.as_ref().ok_or_else(|| BetheError::InvalidParameters("T polynomial missing".into()))?;
    let wp = qh[0].prec().0;
    let q = Float::with_val(wp, q);
    let qi = Float::with_val(wp, q.recip_ref());
    let qn = Float::with_val(wp, (&q).pow(n as u32));
    let q2n = Float::with_val(wp, (&q).pow(2 * n as u32));
    let k = Complex::with_val(wp, &qh[0] * &ph[0]) * Float::with_val(wp, 1u32 - &qn);
    let mut probes = Vec::new();
    let two_pi = Float::with_val(wp, rug::float::Constant::Pi) * 2u32;
    for i in 0..12 {
        let a = Float::with_val(wp, &two_pi * i) / 12u32;
        probes.push(Complex::with_val(wp, (Float::with_val(wp, a.cos_ref()) / 2u32, Float::with_val(wp, a.sin_ref()) / 2u32)));
    }
    let sl = Float::with_val(wp, l).sqrt();
    for x in [-2i32, -1, 0, 1, 2] {
        probes.push(Complex::with_val(wp, Float::with_val(wp, x) / &sl - 1u32));
    }
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for y in &probes {
        let yq = Complex::with_val(wp, y * &q);
        let yqi = Complex::with_val(wp, y * &qi);
        let q_y = poly_eval(qh, y);
        let q_yq = poly_eval(qh, &yq);
        let q_yqi = poly_eval(qh, &yqi);
        let p_y = poly_eval(ph, y);
        let p_yq = poly_eval(ph, &yq);
        let p_yqi = poly_eval(ph, &yqi);
        let lhs1 = Complex::with_val(wp, 1u32 - y).pow(l as u32) * &k;
        let t1 = Complex::with_val(wp, &q_y * &p_yqi);
        let t2 = Complex::with_val(wp, &q_yqi * &p_y) * &qn;
        let scale1 = [cabs(&lhs1), cabs(&t1), cabs(&t2)].into_iter().fold(Float::new(wp), |m, x| if x > m { x } else { m });
        r1 = r1.max(rel(Complex::with_val(wp, &lhs1 - &t1) + &t2, scale1));
        let lhs2 = Complex::with_val(wp, &k * poly_eval(th, y));
        let u1 = Complex::with_val(wp, &q_yq * &p_yqi);
        let u2 = Complex::with_val(wp, &q_yqi * &p_yq) * &q2n;
        let scale2 = [cabs(&lhs2), cabs(&u1), cabs(&u2)].into_iter().fold(Float::new(wp), |m, x| if x > m { x } else { m });
        r2 = r2.max(rel(Complex::with_val(wp, &lhs2 - &u1) + &u2, scale2));
    }
    Ok((r1, r2))
}

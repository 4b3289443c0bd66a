//! Tanh-sinh (double exponential) quadrature on a finite interval.

use super::NumericsError;
use rug::float::Constant;
use rug::{Complex, Float};

/// Precomputed tanh-sinh abscissae and weights on the unit interval.
///
/// Each node is stored as (d, w): the distance of the node from the nearer
/// endpoint as a fraction of the interval, and its weight (for unit step).
pub struct TanhSinh {
    prec: u32,
    levels: Vec<Vec<(Float, Float)>>,
}

impl TanhSinh {
    pub const DEFAULT_MAX_LEVEL: usize = 9;

    pub fn new(prec: u32) -> Self {
        Self::with_levels(prec, Self::DEFAULT_MAX_LEVEL)
    }

    pub fn with_levels(prec: u32, max_level: usize) -> Self {
        let wp = prec + 16;
        let pi = Float::with_val(wp, Constant::Pi);
        // Weights decay like exp(-pi/2 e^t); stop once they drop below 2^-wp.
        let tmax = ((2.0 * wp as f64 * std::f64::consts::LN_2) / std::f64::consts::PI).ln() + 0.7;
        let mut levels = Vec::with_capacity(max_level + 1);
        for l in 0..=max_level {
            let h = 2f64.powi(-(l as i32));
            let mut nodes = Vec::new();
            let (start, stride) = if l == 0 { (0u64, 1u64) } else { (1, 2) };
            let mut k = start;
            loop {
                let t = Float::with_val(wp, k) * Float::with_val(wp, h);
                if t.to_f64() > tmax {
                    break;
                }
                let s = Float::with_val(wp, t.sinh_ref()) * &pi / 2u32;
                let e = Float::with_val(wp, (&s * Float::with_val(wp, 2)).exp_ref());
                // Fraction from the endpoint: (1 - tanh s)/2 = 1/(1 + e^{2s}).
                let d = Float::with_val(wp, 1u32 / (Float::with_val(wp, &e + 1u32)));
                let cs = Float::with_val(wp, s.cosh_ref());
                let w = Float::with_val(wp, t.cosh_ref()) * &pi / 4u32 / Float::with_val(wp, cs.square_ref());
                nodes.push((Float::with_val(prec, d), Float::with_val(prec, w)));
                k += stride;
            }
            levels.push(nodes);
        }
        Self { prec, levels }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// ∫_a^b f(u) du. Converges when successive levels agree to `rel_bits`
    /// relative bits or to `abs_tol`, whichever is reached first.
    pub fn integrate<F>(&self, mut f: F, a: &Float, b: &Float, rel_bits: u32, abs_tol: Option<&Float>) -> Result<Complex, NumericsError>
    where
        F: FnMut(&Float) -> Complex,
    {
        let p = self.prec;
        let len = Float::with_val(p, b - a);
        let mut acc = Complex::new(p);
        let mut prev: Option<Complex> = None;
        for (l, nodes) in self.levels.iter().enumerate() {
            for (k, (d, w)) in nodes.iter().enumerate() {
                let off = Float::with_val(p, &len * d);
                let centre = l == 0 && k == 0;
                let u1 = Float::with_val(p, a + &off);
                let mut v = f(&u1);
                if !centre {
                    let u2 = Float::with_val(p, b - &off);
                    v += f(&u2);
                }
                v *= w;
                acc += v;
            }
            let h = super::pow2(-(l as i32), p);
            let est = Complex::with_val(p, &acc * &h) * &len;
            if let Some(pr) = &prev {
                let diff = Complex::with_val(p, &est - pr);
                let dn = super::cabs(&diff);
                let en = super::cabs(&est);
                let rel_ok = dn.is_zero() || {
                    let thr = en * super::pow2(-(rel_bits as i32), p);
                    dn <= thr
                };
                let abs_ok = abs_tol.is_some_and(|t| dn <= *t);
                if l >= 3 && (rel_ok || abs_ok) {
                    return Ok(est);
                }
            }
            prev = Some(est);
        }
        Err(NumericsError::QuadratureNonconvergence(format!(
            "tanh-sinh exhausted {} levels",
            self.levels.len()
        )))
    }
}

impl TanhSinh {
    /// Componentwise ∫_a^b f(u) du for a vector-valued integrand of length
    /// `n`; every component must converge to `rel_bits` or `abs_tol`.
    pub fn integrate_many<F>(&self, mut f: F, n: usize, a: &Float, b: &Float, rel_bits: u32, abs_tol: &Float) -> Result<Vec<Complex>, NumericsError>
    where
        F: FnMut(&Float) -> Vec<Complex>,
    {
        let p = self.prec;
        let len = Float::with_val(p, b - a);
        let mut acc = vec![Complex::new(p); n];
        let mut prev: Option<Vec<Complex>> = None;
        for (l, nodes) in self.levels.iter().enumerate() {
            for (k, (d, w)) in nodes.iter().enumerate() {
                let off = Float::with_val(p, &len * d);
                let mut v = f(&Float::with_val(p, a + &off));
                if !(l == 0 && k == 0) {
                    for (x, y) in v.iter_mut().zip(f(&Float::with_val(p, b - &off))) {
                        *x += y;
                    }
                }
                for (s, x) in acc.iter_mut().zip(v) {
                    *s += x * w;
                }
            }
            let h = Float::with_val(p, super::pow2(-(l as i32), p) * &len);
            let est: Vec<Complex> = acc.iter().map(|s| Complex::with_val(p, s * &h)).collect();
            if let Some(pr) = &prev {
                let done = est.iter().zip(pr).all(|(e, q)| {
                    let dn = super::cabs(&Complex::with_val(p, e - q));
                    dn <= *abs_tol || dn <= super::cabs(e) * super::pow2(-(rel_bits as i32), p)
                });
                if l >= 3 && done {
                    return Ok(est);
                }
            }
            prev = Some(est);
        }
        Err(NumericsError::QuadratureNonconvergence(format!("tanh-sinh exhausted {} levels", self.levels.len())))
    }
}

/// One-shot ∫_a^b f(u) du at `prec` bits.
pub fn tanh_sinh<F>(f: F, a: &Float, b: &Float, prec: u32) -> Result<Complex, NumericsError>
where
    F: FnMut(&Float) -> Complex,
{
    let q = TanhSinh::new(prec);
    q.integrate(f, a, b, prec.saturating_sub(prec / 4 + 8), None)
}

//! Finite-size versions of the scaled functions Q_μ, T_μ, P_μ and the
//! constant C_μ, evaluated at y = −1 + x/√L.

use super::ScalingError;
use crate::bethe_finite::{
    baxter_p_poly, eigenvalue, poly_eval, solve_gap_roots, transfer_t_poly, wronskian_residuals, BaxterPolynomials,
    BetheRootSet,
};
use crate::numerics::{cabs, PrecisionContext};
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Everything needed to evaluate the scaled functions at one (L, μ).
#[derive(Clone, Debug)]
pub struct FiniteSizeData {
    pub state: BetheRootSet,
    /// Q̂, T̂ and P̂ all filled.
    pub polys: BaxterPolynomials,
    pub energy: Complex,
    /// Wronskian residuals (r1, r2) before any extrapolation.
    pub wronskian: (f64, f64),
}

impl FiniteSizeData {
    /// Solve the gap state at half filling and build all Baxter polynomials.
    pub fn compute(l: usize, mu: &Float, ctx: &PrecisionContext, seed: Option<&BetheRootSet>) -> Result<Self, ScalingError> {
        if l % 2 != 0 {
            return Err(ScalingError::InvalidParameters(format!("L = {l} must be even")));
        }
        let state = solve_gap_roots(l, l / 2, mu, ctx, seed)?;
        Self::from_state(state, ctx)
    }

    pub fn from_state(state: BetheRootSet, ctx: &PrecisionContext) -> Result<Self, ScalingError> {
        let (l, n) = (state.l, state.n);
        let energy = eigenvalue(&state, ctx)?;
        let polys = baxter_p_poly(&transfer_t_poly(&state, ctx)?, l, n, &state.q, ctx)?;
        let wronskian = wronskian_residuals(&polys, l, n, &state.q, ctx)?;
        Ok(Self { state, polys, energy, wronskian })
    }

    fn wp(&self) -> u32 {
        self.polys.qhat[0].prec().0
    }

    fn y_of(&self, x: &Complex) -> Complex {
        let wp = self.wp();
        let s = Float::with_val(wp, self.state.l).sqrt();
        Complex::with_val(wp, x / &s) - 1u32
    }

    /// log Q̂(y) from the roots (no cancellation, no overflow).
    fn log_qhat(&self, y: &Complex) -> Complex {
        let wp = self.wp();
        let mut acc = Complex::new(wp);
        for r in &self.state.roots {
            acc += Complex::with_val(wp, y - r).ln();
        }
        acc
    }

    /// e^{x²/4}(−1)^N e^{x√L/2} Q̂(−1 + x/√L).
    pub fn scaled_q(&self, x: &Complex) -> Complex {
        let wp = self.wp();
        let l = self.state.l;
        let y = self.y_of(x);
        let s = Float::with_val(wp, l).sqrt();
        let mut lg = self.log_qhat(&y);
        lg += Complex::with_val(wp, x.square_ref()) / 4u32;
        lg += Complex::with_val(wp, x * &s) / 2u32;
        let out = lg.exp();
        let out = if self.state.n % 2 == 1 { -out } else { out };
        Complex::with_val(self.state.prec(), out)
    }

    /// e^{(x²+μ²)/4} 2^{−L} e^{(x+μ)√L/2} T̂(−1 + x/√L), with T̂ = R̂/Q̂ pointwise.
    pub fn scaled_t(&self, x: &Complex) -> Complex {
        let wp = self.wp();
        let (l, n) = (self.state.l, self.state.n);
        let q = Float::with_val(wp, &self.state.q);
        let y = self.y_of(x);
        let lq = self.log_qhat(&y);
        // R̂ = (1−y)^L Q̂(qy) + q^N (1−qy)^L Q̂(y/q), each term in log form
        let a = Complex::with_val(wp, 1u32 - &y).ln() * l as u32 + self.log_qhat(&Complex::with_val(wp, &y * &q));
        let qy = Complex::with_val(wp, &y * &q);
        let b = Complex::with_val(wp, 1u32 - qy).ln() * l as u32
            + self.log_qhat(&Complex::with_val(wp, &y / &q))
            + Float::with_val(wp, q.ln_ref()) * n as u32;
        let mu = Float::with_val(wp, &self.state.mu);
        let s = Float::with_val(wp, l).sqrt();
        let ln2 = Float::with_val(wp, Constant::Log2);
        let mut pre = Complex::with_val(wp, x.square_ref()) + Float::with_val(wp, mu.square_ref());
        pre /= 4u32;
        pre -= ln2 * l as u32;
        pre += Complex::with_val(wp, x + &mu) * &s / 2u32;
        let ta = Complex::with_val(wp, &a - &lq) + &pre;
        let tb = Complex::with_val(wp, &b - &lq) + &pre;
        Complex::with_val(self.state.prec(), ta.exp() + tb.exp())
    }

    /// P̂(−1 + x/√L)/P̂(0).
    pub fn scaled_p(&self, x: &Complex) -> Result<Complex, ScalingError> {
        let ph = self.polys.phat.as_ref().expect("P polynomial built in compute");
        let wp = self.wp();
        if cabs(&ph[0]) <= Float::with_val(wp, 1e-300) {
            return Err(ScalingError::InvalidParameters("P(0) vanishes".into()));
        }
        let v = poly_eval(ph, &self.y_of(x)) / &ph[0];
        Ok(Complex::with_val(self.state.prec(), v))
    }

    /// (−1)^N 2^L (1 − q^N) Q̂(0).
    pub fn scaled_c(&self) -> Complex {
        let wp = self.wp();
        let (l, n) = (self.state.l, self.state.n);
        let q = Float::with_val(wp, &self.state.q);
        let qn = Float::with_val(wp, (&q).pow(n as u32));
        let mut v = Complex::with_val(wp, &self.polys.qhat0) * Float::with_val(wp, 1u32 - qn);
        v <<= l as u32;
        if n % 2 == 1 {
            v = -v;
        }
        Complex::with_val(self.state.prec(), v)
    }

    /// L²E.
    pub fn scaled_energy(&self) -> Complex {
        let l = self.state.l as u32;
        Complex::with_val(self.state.prec(), &self.energy * (l * l))
    }
}

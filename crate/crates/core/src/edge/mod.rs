//! Edge Bethe roots: rescaled roots w = √L(y + 1) near the edge of the
//! root curve, their μ → 0 limit (zeroes of 1 + erf), the finite-μ edge
//! equations and the totally asymmetric limit.

mod solve;
mod tail;
mod tasep;
mod zeros;

pub use solve::{edge_g, edge_g_checked, solve_edge_roots, GValue, MU_RELEASE, MU_START};
pub use tail::{erf_u, tail_sums, TailModel};
pub use tasep::{phi1, phi1_prime, q_infinity, tasep_edge_roots, tasep_nu1};
pub use zeros::{check_mu0_equations, erf_q, erf_zeros, sum_identities, sum_identities_truncated, sum_identity_targets, weierstrass_check};

use crate::numerics::{NumericsError, PrecisionContext};
use rug::{Complex, Float};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error)]
pub enum EdgeError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no convergence: {0}")]
    Nonconvergence(String),
    #[error("zeroes {0} and {1} coincide")]
    DuplicateZero(usize, usize),
    #[error("tail estimate {estimate:e} exceeds the requested tolerance {tolerance:e}; increase M")]
    TruncationTooSmall { estimate: f64, tolerance: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How w_0 was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum W0Policy {
    /// No w_0 (μ = 0, where it has escaped to infinity).
    Absent,
    /// Pinned to −8iπ/μ.
    Asymptote,
    /// Solved for, continued in μ from the pinned value.
    Continued,
    /// −w_1(∞) in the totally asymmetric limit.
    Tasep,
}

/// Edge roots w_j, |j| ≤ M, at one μ.
#[derive(Clone, Debug)]
pub struct EdgeRootSet {
    /// None marks μ = ∞.
    pub mu: Option<Float>,
    pub m: usize,
    pub w: BTreeMap<i64, Complex>,
    pub tail_model: TailModel,
    /// Largest root shift when the tail model is replaced by 4√(±iπk).
    pub tail_error: f64,
    /// Max modulus of the equations (mod 2πi) at the solution.
    pub residual: f64,
    pub w0_policy: W0Policy,
    pub warnings: Vec<String>,
}

impl EdgeRootSet {
    /// The μ = 0 set from the first M zeroes of 1 + erf.
    pub fn at_mu0(m: usize, ctx: &PrecisionContext) -> Result<Self, EdgeError> {
        let z = erf_zeros(m, ctx)?;
        let mut w = BTreeMap::new();
        for (i, zj) in z.into_iter().enumerate() {
            let j = i as i64 + 1;
            w.insert(-j, Complex::with_val(ctx.prec(), zj.conj_ref()));
            w.insert(j, zj);
        }
        Ok(Self {
            mu: Some(Float::new(ctx.prec())),
            m,
            w,
            tail_model: TailModel::ErfAsymptotic,
            tail_error: 0.0,
            residual: 0.0,
            w0_policy: W0Policy::Absent,
            warnings: Vec::new(),
        })
    }

    /// The μ = ∞ set from the closed form.
    pub fn at_infinity(m: usize, ctx: &PrecisionContext) -> Result<Self, EdgeError> {
        let w = tasep_edge_roots(m, ctx)?.into_iter().collect();
        let nu = tasep_nu1(ctx)?;
        let p = ctx.prec();
        let pi = Float::with_val(p, rug::float::Constant::Pi);
        let a = Complex::with_val(p, (-Float::with_val(p, &nu / 2u32), -Float::with_val(p, &pi / 2u32)));
        Ok(Self {
            mu: None,
            m,
            w,
            tail_model: TailModel::Shifted {
                plus: [a.clone(), Complex::new(p), Complex::new(p)],
                minus: [a, Complex::new(p), Complex::new(p)],
            },
            tail_error: 0.0,
            residual: 0.0,
            w0_policy: W0Policy::Tasep,
            warnings: Vec::new(),
        })
    }

    pub fn get(&self, j: i64) -> Option<&Complex> {
        self.w.get(&j)
    }

    /// Refuse an accuracy request the tail treatment cannot honour.
    pub fn require_tolerance(&self, tol: f64) -> Result<(), EdgeError> {
        if tol < self.tail_error {
            return Err(EdgeError::TruncationTooSmall { estimate: self.tail_error, tolerance: tol });
        }
        Ok(())
    }
}

//! Configurable-precision arithmetic and the special functions used across the crate.

mod erf;
mod linalg;
mod polylog;
mod quad;

pub use erf::{erf_complex, erfc_complex};
pub use linalg::{solve_linear, solve_linear_f64};
pub use polylog::{polylog_neg_exp, polylog_neg_exp_complex, polylog_regular_part, PolylogOrder};
pub use quad::{tanh_sinh, TanhSinh};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

/// Complex number at context precision.
pub type BigComplex = Complex;

#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergence(String),
    #[error("singular linear system of size {size}")]
    Singular { size: usize },
    #[error("invalid precision context: {0}")]
    InvalidContext(String),
    #[error("argument outside supported domain: {0}")]
    Domain(String),
}

/// Global numeric policy shared by every operation.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    pub mantissa_bits: u32,
    /// Absolute residual bound for Newton iterations.
    pub newton_tol: Float,
    pub max_newton_iters: usize,
    pub series_terms_cap: usize,
}

/// Serializable view of a context (tolerance as a power of two).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ContextSpec {
    pub mantissa_bits: u32,
    pub newton_tol_log2: i32,
    pub max_newton_iters: usize,
    pub series_terms_cap: usize,
}

pub const DEFAULT_BITS: u32 = 332;

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::with_bits(DEFAULT_BITS).expect("default precision is valid")
    }
}

impl PrecisionContext {
    /// Context with tolerance 2^(-3·bits/4) and default caps.
    pub fn with_bits(mantissa_bits: u32) -> Result<Self, NumericsError> {
        let tol_log2 = -((mantissa_bits as i32) * 3 / 4);
        Self::from_spec(&ContextSpec {
            mantissa_bits,
            newton_tol_log2: tol_log2,
            max_newton_iters: 80,
            series_terms_cap: 200_000,
        })
    }

    /// Context sized for `digits` significant decimal digits.
    pub fn with_digits(digits: u32) -> Result<Self, NumericsError> {
        let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32;
        Self::with_bits(bits.max(64))
    }

    pub fn from_spec(spec: &ContextSpec) -> Result<Self, NumericsError> {
        if spec.mantissa_bits < 64 {
            return Err(NumericsError::InvalidContext(format!(
                "mantissa_bits = {} < 64",
                spec.mantissa_bits
            )));
        }
        if spec.newton_tol_log2 >= 0 || -spec.newton_tol_log2 >= spec.mantissa_bits as i32 {
            return Err(NumericsError::InvalidContext(format!(
                "newton tolerance 2^{} not representable above the rounding level",
                spec.newton_tol_log2
            )));
        }
        if spec.max_newton_iters == 0 || spec.series_terms_cap == 0 {
            return Err(NumericsError::InvalidContext("iteration caps must be positive".into()));
        }
        let mut tol = Float::with_val(spec.mantissa_bits, 1);
        tol <<= spec.newton_tol_log2;
        Ok(Self {
            mantissa_bits: spec.mantissa_bits,
            newton_tol: tol,
            max_newton_iters: spec.max_newton_iters,
            series_terms_cap: spec.series_terms_cap,
        })
    }

    pub fn spec(&self) -> ContextSpec {
        ContextSpec {
            mantissa_bits: self.mantissa_bits,
            newton_tol_log2: self.newton_tol.get_exp().unwrap_or(0) - 1,
            max_newton_iters: self.max_newton_iters,
            series_terms_cap: self.series_terms_cap,
        }
    }

    /// Same policy at a different mantissa width (tolerance rescaled).
    pub fn at_bits(&self, bits: u32) -> Self {
        let mut c = Self::with_bits(bits).expect("bits >= 64");
        c.max_newton_iters = self.max_newton_iters;
        c.series_terms_cap = self.series_terms_cap;
        c
    }

    pub fn prec(&self) -> u32 {
        self.mantissa_bits
    }

    /// Decimal digits represented by the mantissa.
    pub fn digits(&self) -> usize {
        (self.mantissa_bits as f64 / std::f64::consts::LOG2_10).floor() as usize
    }

    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.mantissa_bits, v)
    }

    pub fn complex<T>(&self, v: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.mantissa_bits, v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.mantissa_bits, Constant::Pi)
    }

    pub fn tol_f64(&self) -> f64 {
        self.newton_tol.to_f64()
    }
}

/// ζ(1/2) at context precision.
pub fn zeta_half(ctx: &PrecisionContext) -> Float {
    let half = Float::with_val(ctx.prec() + 32, 0.5);
    Float::with_val(ctx.prec(), half.zeta())
}

/// √(2π) at the given precision.
pub fn sqrt_2pi(prec: u32) -> Float {
    let mut p = Float::with_val(prec, Constant::Pi);
    p *= 2;
    p.sqrt()
}

/// |z| as a Float.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// |z| as f64 (for control flow only).
pub fn cabs_f64(z: &Complex) -> f64 {
    let (re, im) = (z.real().to_f64(), z.imag().to_f64());
    re.hypot(im)
}

pub fn to_c64(z: &Complex) -> nalgebra::Complex<f64> {
    nalgebra::Complex::new(z.real().to_f64(), z.imag().to_f64())
}

pub fn from_c64(z: nalgebra::Complex<f64>, prec: u32) -> Complex {
    Complex::with_val(prec, (z.re, z.im))
}

/// Decimal string with `digits` significant digits (exponent form when needed).
pub fn float_to_decimal(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Parse a decimal string into a Float at `prec` bits.
pub fn decimal_to_float(s: &str, prec: u32) -> Option<Float> {
    Float::parse(s.trim()).ok().map(|p| Float::with_val(prec, p))
}

/// 2^k as a Float.
pub fn pow2(k: i32, prec: u32) -> Float {
    let mut f = Float::with_val(prec, 1);
    f <<= k;
    f
}

/// Principal square root with the branch cut on the negative real axis.
pub fn csqrt(z: &Complex) -> Complex {
    Complex::with_val(z.prec().0, z.sqrt_ref())
}

/// x^y for real positive x.
pub fn rpow(x: &Float, y: &Float) -> Float {
    Float::with_val(x.prec(), x.pow(y))
}

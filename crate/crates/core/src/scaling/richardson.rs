//! Polynomial (Neville) extrapolation to h = 0, with h = L^{−step} for
//! finite-size sequences.

use super::ScalingError;
use crate::numerics::cabs;
use rug::{Complex, Float};
use rug::ops::Pow;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct ExtrapolationResult {
    pub limit: Complex,
    /// |T[last][orders] − T[last][orders−1]|.
    pub error_estimate: Float,
    pub orders_used: usize,
    /// Exponent step as (numerator, denominator).
    pub exponent_step: (u32, u32),
    /// Neville table; row i holds the extrapolants ending at point i.
    pub table: Vec<Vec<Complex>>,
}

impl ExtrapolationResult {
    /// Error estimate of every column k ≥ 1 in the last row.
    pub fn column_errors(&self) -> Vec<f64> {
        let last = self.table.last().expect("non-empty table");
        last.windows(2).map(|w| cabs(&Complex::with_val(w[0].prec().0, &w[1] - &w[0])).to_f64()).collect()
    }
}

/// Extrapolate a(h) = a + Σ c_k h^k to h = 0 from the given samples.
pub fn neville(points: &[(Float, Complex)], orders: usize) -> Result<(Complex, Float, Vec<Vec<Complex>>), ScalingError> {
    let n = points.len();
    if n < orders + 1 || n == 0 {
        return Err(ScalingError::InsufficientPoints { have: n, need: orders + 1 });
    }
    for i in 0..n {
        for j in 0..i {
            if points[i].0 == points[j].0 {
                return Err(ScalingError::DegenerateAbscissa);
            }
        }
    }
    let prec = points[0].1.prec().0;
    let mut table: Vec<Vec<Complex>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = vec![points[i].1.clone()];
        for k in 1..=orders.min(i) {
            let hi = &points[i].0;
            let hik = &points[i - k].0;
            let num = Complex::with_val(prec, &row[k - 1] - &table[i - 1][k - 1]);
            let den = Float::with_val(prec, hik - hi);
            let v = Complex::with_val(prec, &row[k - 1] + num * Float::with_val(prec, hi / &den));
            row.push(v);
        }
        table.push(row);
    }
    let last = table.last().unwrap();
    let limit = last[orders].clone();
    let err = if orders == 0 {
        Float::new(prec)
    } else {
        cabs(&Complex::with_val(prec, &last[orders] - &last[orders - 1]))
    };
    Ok((limit, err, table))
}

/// Richardson extrapolation of a finite-size sequence with corrections in
/// powers of L^{−num/den}.
pub fn richardson(values: &BTreeMap<usize, Complex>, exponent_step: (u32, u32), orders: usize) -> Result<ExtrapolationResult, ScalingError> {
    let prec = values.values().next().map_or(64, |v| v.prec().0);
    let (num, den) = exponent_step;
    if num == 0 || den == 0 {
        return Err(ScalingError::InvalidParameters("exponent step must be positive".into()));
    }
    let expo = Float::with_val(prec, num) / den;
    let points: Vec<(Float, Complex)> = values
        .iter()
        .map(|(&l, v)| {
            let h = Float::with_val(prec, l).pow(Float::with_val(prec, -&expo));
            (h, v.clone())
        })
        .collect();
    let (limit, error_estimate, table) = neville(&points, orders)?;
    Ok(ExtrapolationResult { limit, error_estimate, orders_used: orders, exponent_step, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = 200;

    fn seq(f: impl Fn(f64) -> Float, ls: &[usize]) -> BTreeMap<usize, Complex> {
        ls.iter().map(|&l| (l, Complex::with_val(P, f(l as f64)))).collect()
    }

    #[test]
    fn synthetic_sequence() {
        let pi = Float::with_val(P, rug::float::Constant::Pi);
        let v = seq(
            |l| {
                let s = Float::with_val(P, l).sqrt();
                Float::with_val(P, &pi + Float::with_val(P, 2u32 / &s)) + Float::with_val(P, 3u32) / l
            },
            &[100, 400, 1600, 6400],
        );
        let r = richardson(&v, (1, 2), 3).unwrap();
        let d = Float::with_val(P, r.limit.real() - &pi).abs();
        assert!(d.to_f64() < 1e-6);
        assert!(d.to_f64() < 1e-50, "exact for a polynomial in h");
    }

    #[test]
    fn constant_sequence() {
        let v = seq(|_| Float::with_val(P, 7), &[32, 64, 128]);
        let r = richardson(&v, (1, 2), 2).unwrap();
        assert_eq!(r.limit.real().to_f64(), 7.0);
        assert!(r.error_estimate.is_zero());
    }

    #[test]
    fn errors() {
        let v = seq(|_| Float::with_val(P, 1), &[32, 64]);
        assert!(matches!(richardson(&v, (1, 2), 2), Err(ScalingError::InsufficientPoints { .. })));
        let pts = vec![(Float::with_val(P, 1), Complex::new(P)), (Float::with_val(P, 1), Complex::new(P))];
        assert!(matches!(neville(&pts, 1), Err(ScalingError::DegenerateAbscissa)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        // Successive-column error estimates decrease on a smooth sequence
        // a + b·rh/(1 − rh), whose correction coefficients grow geometrically.
        #[test]
        fn table_monotone(b in 0.5f64..3.0, r in -2.0f64..2.0, a in -5.0f64..5.0) {
            prop_assume!(r.abs() > 0.25);
            let ls = [64usize, 128, 256, 512, 1024];
            let v = seq(|l| {
                let rh = Float::with_val(P, l).sqrt().recip() * r;
                let corr = Float::with_val(P, &rh / Float::with_val(P, 1u32 - &rh)) * b;
                corr + a
            }, &ls);
            let res = richardson(&v, (1, 2), 4).unwrap();
            let errs = res.column_errors();
            for w in errs.windows(2) {
                prop_assert!(w[1] < w[0], "{:?}", errs);
            }
            prop_assert!(Float::with_val(P, res.limit.real() - a).abs().to_f64() < 1e-2);
        }
    }
}

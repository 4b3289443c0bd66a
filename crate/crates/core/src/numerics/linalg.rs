//! Dense linear solves by Gaussian elimination with partial pivoting.

use super::NumericsError;
use nalgebra::{Complex as C64, DMatrix, DVector};
use rug::{Complex, Float};

/// Solve A x = b in place at the precision of the entries.
pub fn solve_linear(mut a: Vec<Vec<Complex>>, mut b: Vec<Complex>) -> Result<Vec<Complex>, NumericsError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(NumericsError::Domain("matrix is not square or does not match rhs".into()));
    }
    if n == 0 {
        return Ok(b);
    }
    let prec = b[0].prec().0;
    for col in 0..n {
        let mut best = col;
        let mut best_norm = Float::with_val(prec, a[col][col].norm_ref());
        for (r, row) in a.iter().enumerate().skip(col + 1) {
            let nr = Float::with_val(prec, row[col].norm_ref());
            if nr > best_norm {
                best = r;
                best_norm = nr;
            }
        }
        if best_norm.is_zero() {
            return Err(NumericsError::Singular { size: n });
        }
        a.swap(col, best);
        b.swap(col, best);
        let inv = Complex::with_val(prec, a[col][col].recip_ref());
        let (top, bottom) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        let (btop, bbot) = b.split_at_mut(col + 1);
        let bp = &btop[col];
        for (row, br) in bottom.iter_mut().zip(bbot.iter_mut()) {
            if row[col].is_zero() {
                continue;
            }
            let f = Complex::with_val(prec, &row[col] * &inv);
            for k in col + 1..n {
                let t = Complex::with_val(prec, &f * &pivot_row[k]);
                row[k] -= t;
            }
            row[col] = Complex::new(prec);
            *br -= Complex::with_val(prec, &f * bp);
        }
    }
    let mut x = vec![Complex::new(prec); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for k in i + 1..n {
            s -= Complex::with_val(prec, &a[i][k] * &x[k]);
        }
        x[i] = Complex::with_val(prec, s / &a[i][i]);
    }
    Ok(x)
}

/// Double-precision complex solve through LU.
pub fn solve_linear_f64(a: &DMatrix<C64<f64>>, b: &DVector<C64<f64>>) -> Result<DVector<C64<f64>>, NumericsError> {
    a.clone().lu().solve(b).ok_or(NumericsError::Singular { size: b.len() })
}

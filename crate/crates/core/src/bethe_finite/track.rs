//! Double-precision anchor and μ-continuation for the gap root set.
//!
//! At small μ the N−1 regular roots sit close to the zeroes of the truncated
//! binomial Σ_{m<N} C(L−1, m)(−y)^m, and the isolated root is
//! y_N ≈ 1 + ε/(1 − e^{−2πi/L}) with ε = μ/√L. For larger L the regular
//! roots are seeded from the limiting curve instead.

use super::BetheError;
use crate::numerics::solve_linear_f64;
use nalgebra::{Complex as C64, DMatrix, DVector};
use std::f64::consts::PI;

type C = C64<f64>;

/// Anchor for the continuation is taken at this μ (or at the target, if smaller).
pub const ANCHOR_MU: f64 = 1e-2;
const SMALL_L: usize = 16;

pub fn q_of(l: usize, mu: f64) -> f64 {
    1.0 - mu / (l as f64).sqrt()
}

/// Log-form residual, reduced mod 2πi, and its Jacobian.
pub fn system(y: &[C], l: usize, q: f64) -> (DVector<C>, DMatrix<C>) {
    let n = y.len();
    let lf = l as f64;
    let mut g = DVector::from_element(n, C::new(0.0, 0.0));
    let mut jac = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    for j in 0..n {
        let yj = y[j];
        let one = C::new(1.0, 0.0);
        let mut val = ((one - yj).ln() - (one - yj * q).ln()) * lf - C::new(0.0, PI * (n as f64 - 1.0));
        let mut diag = (-one / (one - yj) + C::new(q, 0.0) / (one - yj * q)) * lf;
        for k in 0..n {
            if k == j {
                continue;
            }
            let d = yj - y[k] * q;
            let dt = y[k] - yj * q;
            val -= (d / dt).ln();
            diag -= one / d + C::new(q, 0.0) / dt;
            jac[(j, k)] = C::new(q, 0.0) / d + one / dt;
        }
        val.im -= 2.0 * PI * (val.im / (2.0 * PI)).round();
        g[j] = val;
        jac[(j, j)] = diag;
    }
    (g, jac)
}

/// Plain Newton; returns the roots and the last step size.
pub fn newton(mut y: Vec<C>, l: usize, q: f64, iters: usize) -> Result<(Vec<C>, f64), BetheError> {
    let mut last = f64::INFINITY;
    for _ in 0..iters {
        let (g, jac) = system(&y, l, q);
        let dy = solve_linear_f64(&jac, &(-g)).map_err(|_| BetheError::RootCollision)?;
        last = dy.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !last.is_finite() {
            return Err(BetheError::Nonconvergence("non-finite Newton step".into()));
        }
        for (a, d) in y.iter_mut().zip(dy.iter()) {
            *a += d;
        }
        if last < 1e-13 {
            break;
        }
    }
    Ok((y, last))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Inverse of the limiting counting function at half filling (principal branch).
pub fn f0_inverse_half(v: C) -> C {
    let c = v.exp() * 2.0;
    let t = (-c + (c * c + 4.0).sqrt()) / 2.0;
    t * t
}

/// Starting root set at asymmetry `mu0` (small).
pub fn anchor(l: usize, n: usize, mu0: f64) -> Result<Vec<C>, BetheError> {
    let eps = mu0 / (l as f64).sqrt();
    let w = C::from_polar(1.0, -2.0 * PI / l as f64);
    let y_n = C::new(1.0, 0.0) + C::new(eps, 0.0) / (C::new(1.0, 0.0) - w);
    let mut y: Vec<C> = if l <= SMALL_L {
        // Zeroes of the truncated binomial via the companion matrix.
        let deg = n - 1;
        if deg == 0 {
            Vec::new()
        } else {
            let coef: Vec<f64> = (0..n).map(|m| binomial(l - 1, m) * if m % 2 == 0 { 1.0 } else { -1.0 }).collect();
            let lead = coef[deg];
            let mut comp = DMatrix::<f64>::zeros(deg, deg);
            for i in 1..deg {
                comp[(i, i - 1)] = 1.0;
            }
            for i in 0..deg {
                comp[(i, deg - 1)] = -coef[i] / lead;
            }
            comp.complex_eigenvalues().iter().copied().collect()
        }
    } else {
        (1..n)
            .map(|j| f0_inverse_half(C::new(0.0, 2.0 * PI * (j as f64 - (n as f64 - 1.0) / 2.0) / l as f64)))
            .collect()
    };
    y.push(y_n);
    let (y, err) = newton(y, l, q_of(l, mu0), 80)?;
    if err > 1e-9 {
        return Err(BetheError::Nonconvergence(format!("anchor Newton stalled at step {err:e}")));
    }
    Ok(y)
}

/// Continue a converged set from `mu_from` to `mu_to` (either direction).
pub fn continue_in_mu(y0: Vec<C>, l: usize, mu_from: f64, mu_to: f64) -> Result<Vec<C>, BetheError> {
    let small = l <= SMALL_L;
    let h_cap = if small { 0.2 } else { 0.1 };
    let dir = if mu_to >= mu_from { 1.0 } else { -1.0 };
    let mut y = y0;
    let mut mu = mu_from;
    let mut h = (mu_from.abs().max(1e-3)).min(h_cap);
    let mut prev: Option<(f64, Vec<C>)> = None;
    let mut halvings = 0;
    while (mu_to - mu) * dir > 1e-14 {
        h = h.min((mu_to - mu).abs());
        let mu_new = mu + dir * h;
        let guess: Vec<C> = match &prev {
            None => {
                // The isolated root departs from 1 linearly in μ.
                let mut g = y.clone();
                let last = g.len() - 1;
                g[last] = C::new(1.0, 0.0) + (g[last] - 1.0) * (mu_new / mu);
                g
            }
            Some((mp, yp)) => y.iter().zip(yp).map(|(a, b)| a + (a - b) * ((mu_new - mu) / (mu - mp))).collect(),
        };
        let scale = y.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let jump_tol = if small { 0.1 * scale } else { 0.05 };
        let ok = match newton(guess.clone(), l, q_of(l, mu_new), 60) {
            Ok((yn, err)) => {
                let jump = yn.iter().zip(&guess).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                let (g, _) = system(&yn, l, q_of(l, mu_new));
                let res = g.iter().map(|z| z.norm()).fold(0.0, f64::max);
                (err < 1e-10 && res < 1e-9 && jump < jump_tol && yn.iter().all(|z| z.re.is_finite())).then_some(yn)
            }
            Err(_) => None,
        };
        match ok {
            Some(yn) => {
                prev = Some((mu, std::mem::replace(&mut y, yn)));
                mu = mu_new;
                h = (2.0 * h).min(h_cap);
                halvings = 0;
            }
            None => {
                h /= 2.0;
                halvings += 1;
                if halvings > 40 {
                    return Err(BetheError::Nonconvergence(format!("continuation stalled at mu = {mu}")));
                }
            }
        }
    }
    Ok(y)
}

/// Gap root set at (L, N, μ) in double precision, from the anchor.
pub fn gap_roots_f64(l: usize, n: usize, mu: f64) -> Result<Vec<C>, BetheError> {
    let mu0 = ANCHOR_MU.min(mu);
    let y = anchor(l, n, mu0)?;
    if mu > mu0 {
        continue_in_mu(y, l, mu0, mu)
    } else {
        Ok(y)
    }
}

pub fn energy_f64(y: &[C], q: f64) -> C {
    let one = C::new(1.0, 0.0);
    y.iter().map(|&z| one / (one - z) - one / (one - z * q)).sum::<C>() * (1.0 - q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_energy_near_symmetric_value() {
        for l in [4usize, 6, 8, 12, 32] {
            let mu = 1e-3;
            let y = gap_roots_f64(l, l / 2, mu).unwrap();
            let e = energy_f64(&y, q_of(l, mu));
            let want = -4.0 * (PI / l as f64).sin().powi(2) * (1.0 + q_of(l, mu)) / 2.0;
            assert!((e.re - want).abs() < 1e-6, "L={l}: {e} vs {want}");
        }
    }

    #[test]
    fn half_filling_curve_endpoint() {
        let y = f0_inverse_half(C::new(0.0, PI / 2.0));
        assert!((y + 1.0).norm() < 1e-7);
    }
}

use super::*;
use crate::markov_oracle::oracle_gap;
use crate::numerics::cabs_f64;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn diff(a: &Complex, b: &Complex) -> f64 {
    cabs_f64(&Complex::with_val(a.prec().0, a - b))
}

#[test]
fn matches_oracle_at_l8() {
    let c = ctx();
    let mu = c.real(1);
    let s = solve_gap_roots(8, 4, &mu, &c, None).unwrap();
    let e = eigenvalue(&s, &c).unwrap();
    let q = q_from_mu(8, &mu, c.prec());
    let or = oracle_gap(8, 4, &q, &c).unwrap();
    assert!(diff(&e, &or.eigenvalue) < 1e-25, "{e} vs {}", or.eigenvalue);
    assert!(s.residual.to_f64() < c.tol_f64());
}

#[test]
fn small_mu_limit_l6() {
    let c = ctx();
    // At finite L the gap is linear in μ: E ≈ −4 sin²(π/L)(1 + q)/2.
    let s = solve_gap_roots(6, 3, &c.real(1e-3), &c, None).unwrap();
    let e = eigenvalue(&s, &c).unwrap();
    let lin = 1.0 - 1e-3 / (2.0 * 6f64.sqrt());
    assert!((e.real().to_f64() + lin).abs() < 1e-6, "{e}");
    assert!(e.imag().to_f64().abs() < 1e-60);
}

#[test]
fn quantum_numbers_and_counting_function() {
    let c = ctx();
    for (l, mu) in [(8usize, 0.5), (12, 2.0), (20, 1.2)] {
        let n = l / 2;
        let s = solve_gap_roots(l, n, &c.real(mu), &c, None).unwrap();
        for j in 0..n - 1 {
            let want = (j + 1) as f64 - (n as f64 - 1.0) / 2.0;
            assert_eq!(s.quantum_numbers[j], want, "L={l} j={j}");
            let f = counting_function(&s.roots[j], &s, &c).unwrap();
            let target = 2.0 * std::f64::consts::PI * want / l as f64;
            assert!(f.real().to_f64().abs() < 1e-60 && (f.imag().to_f64() - target).abs() < 1e-14);
        }
    }
}

#[test]
fn momentum_of_gap_state() {
    let c = ctx();
    for (l, mu) in [(8usize, 1.0), (16, 0.3)] {
        let s = solve_gap_roots(l, l / 2, &c.real(mu), &c, None).unwrap();
        let p = momentum(&s).to_f64();
        assert!((p - 2.0 * std::f64::consts::PI).abs() < 1e-40, "p = {p}");
        // Complex-conjugate root set is the reflected state.
        let mut r = s.clone();
        for y in r.roots.iter_mut() {
            y.conj_mut();
        }
        assert!((momentum(&r).to_f64() + 2.0 * std::f64::consts::PI).abs() < 1e-40);
    }
}

#[test]
fn reality_at_half_filling() {
    let c = ctx();
    let s = solve_gap_roots(10, 5, &c.real(2), &c, None).unwrap();
    assert!(eigenvalue(&s, &c).unwrap().imag().to_f64().abs() < c.tol_f64());
}

#[test]
fn seed_continuation_matches_fresh_solve() {
    let c = PrecisionContext::with_bits(160).unwrap();
    let a = solve_gap_roots(10, 5, &c.real(0.5), &c, None).unwrap();
    let b = solve_gap_roots(10, 5, &c.real(1.5), &c, Some(&a)).unwrap();
    let d = solve_gap_roots(10, 5, &c.real(1.5), &c, None).unwrap();
    let eb = eigenvalue(&b, &c).unwrap();
    let ed = eigenvalue(&d, &c).unwrap();
    assert!(diff(&eb, &ed) < 1e-35);
}

#[test]
fn rejects_tiny_mu_and_bad_seed() {
    let c = ctx();
    assert!(matches!(solve_gap_roots(8, 4, &c.real(1e-8), &c, None), Err(BetheError::InvalidParameters(_))));
    let s = solve_gap_roots(6, 3, &c.real(0.5), &c, None).unwrap();
    assert!(matches!(solve_gap_roots(8, 4, &c.real(1), &c, Some(&s)), Err(BetheError::InvalidParameters(_))));
}

#[test]
fn f0_inverse_properties() {
    let c = ctx();
    let pi = std::f64::consts::PI;
    let half_pi = c.pi() / 2u32;
    let y = f0_inverse(&Complex::with_val(c.prec(), (0, &half_pi)), 0.5, 1, &c).unwrap();
    assert!(diff(&y, &c.complex(-1)) < 1e-40);
    // round trip on the curve and for another density
    for rho in [0.5, 0.3] {
        let y0 = c.complex((0.3, 0.4));
        let rf = c.real(rho);
        let v = f0(&y0, &rf, c.prec());
        let y1 = f0_inverse(&v, rho, 1, &c).unwrap();
        assert!(diff(&y0, &y1) < 1e-60, "rho={rho}");
    }
    // the curve f0^{-1}(2πiu) is closed: the two ends meet at −1
    let a = f0_inverse(&c.complex((0.0, pi / 2.0 - 1e-9)), 0.5, 1, &c).unwrap();
    let b = f0_inverse(&c.complex((0.0, -pi / 2.0 + 1e-9)), 0.5, 1, &c).unwrap();
    assert!(diff(&a, &b) < 1e-3);
}

#[test]
fn transfer_polynomial_and_eigenvalues() {
    let c = ctx();
    let mu = c.real(1);
    let s = solve_gap_roots(8, 4, &mu, &c, None).unwrap();
    let polys = transfer_t_poly(&s, &c).unwrap();
    assert_eq!(polys.that.as_ref().unwrap().len(), 9);
    assert!(polys.t_remainder.as_ref().unwrap().to_f64() < c.tol_f64());
    let e = eigenvalue(&s, &c).unwrap();
    let et = eigenvalue_from_t(&polys, 8, &s.q, &c).unwrap();
    let eq = eigenvalue_from_q(&polys, &s.q, &c).unwrap();
    assert!(diff(&e, &et) < 1e-60 && diff(&e, &eq) < 1e-60);
}

#[test]
fn wronskian_identities_hold() {
    let c = ctx();
    for (l, mu) in [(8usize, 1.0), (10, 2.0)] {
        let s = solve_gap_roots(l, l / 2, &c.real(mu), &c, None).unwrap();
        let polys = baxter_p_poly(&transfer_t_poly(&s, &c).unwrap(), l, l / 2, &s.q, &c).unwrap();
        assert_eq!(polys.phat.as_ref().unwrap().len(), l / 2 + 1);
        let (r1, r2) = wronskian_residuals(&polys, l, l / 2, &s.q, &c).unwrap();
        let gate = c.tol_f64().sqrt();
        assert!(r1 < gate && r2 < gate, "L={l}: {r1:e} {r2:e}");
    }
}

#[test]
fn perturbed_root_breaks_identities() {
    let c = ctx();
    let s = solve_gap_roots(8, 4, &c.real(1), &c, None).unwrap();
    let base = transfer_t_unchecked(&s, &c).t_remainder.unwrap().to_f64();
    let mut bad = s.clone();
    bad.roots[1] += c.complex((1e-5, 0.0));
    let polys = transfer_t_unchecked(&bad, &c);
    let r = polys.t_remainder.as_ref().unwrap().to_f64();
    assert!(r > 1e3 * base.max(1e-90) && r > 1e-12, "{r:e}");
    assert!(matches!(transfer_t_poly(&bad, &c), Err(BetheError::DivisionRemainder(_))));
}

#[test]
fn p_roots_lie_outside_q_roots() {
    // Regression on the observed disposition at L = 8, μ = 1: every P̂ root is
    // farther from the origin than the largest regular Q̂ root.
    let c = ctx();
    let s = solve_gap_roots(8, 4, &c.real(1), &c, None).unwrap();
    let polys = baxter_p_poly(&transfer_t_poly(&s, &c).unwrap(), 8, 4, &s.q, &c).unwrap();
    let p: Vec<nalgebra::Complex<f64>> = polys.phat.unwrap().iter().map(to_c64).collect();
    let deg = p.len() - 1;
    let mut comp = nalgebra::DMatrix::from_element(deg, deg, nalgebra::Complex::new(0.0, 0.0));
    for i in 1..deg {
        comp[(i, i - 1)] = nalgebra::Complex::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p[i];
    }
    let schur = nalgebra::Schur::new(comp).unpack().1;
    let rmax = s.roots[..3].iter().map(cabs_f64).fold(0.0, f64::max);
    for i in 0..deg {
        assert!(schur[(i, i)].norm() > rmax, "{} vs {rmax}", schur[(i, i)]);
    }
}

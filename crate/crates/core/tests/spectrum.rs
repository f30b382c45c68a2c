use floquet::applications::{build_burgers_fisher, build_gle, build_mathieu, build_rdode_fixture, gle_omega_from_p1};
use floquet::degree::{locate_zeros_plain, winding_number, Contour};
use floquet::dispersion::{
    dispersion_roots, dispersion_value, generalized_multiplicity, limiting_instability_hint, sample_branches,
};
use floquet::linalg::c;
use floquet::monodromy::{evans, homotopy_evans, principal_matrix};
use floquet::ode::Tolerances;
use num_complex::Complex64;

const TOL: f64 = 1e-10;

fn close_set(mut got: Vec<Complex64>, mut want: Vec<Complex64>, tol: f64) -> bool {
    let key = |z: &Complex64| (z.re, z.im);
    got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    got.len() == want.len() && got.iter().zip(&want).all(|(a, b)| (a - b).norm() < tol)
}

#[test]
fn burgers_fisher_dispersion() {
    let bf = build_burgers_fisher(1e-4).unwrap();
    let m = &bf.model;
    assert!(close_set(dispersion_roots(m, 0.0).unwrap(), vec![c(1.0, 0.0), c(-1.0, 0.0)], 1e-12));
    let at_one = dispersion_roots(m, 1.0).unwrap();
    assert!(at_one.iter().all(|z| (z - c(0.0, 0.5)).norm() < 1e-7), "{at_one:?}");
    assert!(limiting_instability_hint(m));

    // i/2 is also attained at mu = -5/3, outside this window
    let r = generalized_multiplicity(m, c(0.0, 0.5), (-1.5, 1.5), TOL).unwrap();
    assert_eq!(r.mu_roots.len(), 1);
    assert!((r.mu_roots[0].0 - 1.0).abs() < 1e-6 && r.mu_roots[0].1 == 2);
    assert_eq!(r.m_ga, Some(2));
    let r = generalized_multiplicity(m, c(1.0, 0.0), (-2.0, 2.0), TOL).unwrap();
    assert_eq!(r.m_ga, Some(1));
    assert!(r.mu_roots[0].0.abs() < 1e-6);
}

#[test]
fn collision_and_gap_free_sampling() {
    let bf = build_burgers_fisher(1e-4).unwrap();
    let inside = sample_branches(&bf.model, -0.9, 0.9, 181).unwrap();
    assert_eq!(inside.len(), 2);
    assert!(inside.iter().all(|b| b.gaps.is_empty()));
    let across = sample_branches(&bf.model, 0.9, 1.1, 21).unwrap();
    assert!(across.iter().any(|b| b.gaps.iter().any(|g| (g - 1.0).abs() < 1e-9)));
}

#[test]
fn gle_and_rdode_roots() {
    let gle = build_gle(gle_omega_from_p1(0.5).unwrap(), 0.05).unwrap();
    assert!(close_set(dispersion_roots(&gle.model, 1.0).unwrap(), vec![c(0.5, 0.0), c(-3.0, 0.0)], 1e-9));
    assert!(!limiting_instability_hint(&gle.model));

    let rd = build_rdode_fixture(1.0, 1.0, 0.01).unwrap();
    // λ₂(μ) = −μ² − 2ic₀μ + ϖ₀² and a zero root at μ = ±1
    assert!(close_set(dispersion_roots(&rd.model, 1.0).unwrap(), vec![c(0.0, 0.0), c(0.0, -2.0)], 1e-9));
    assert!(close_set(dispersion_roots(&rd.model, -1.0).unwrap(), vec![c(0.0, 0.0), c(0.0, 2.0)], 1e-9));
    let at_zero = dispersion_roots(&rd.model, 0.0).unwrap();
    assert!(at_zero.iter().any(|z| (z - c(1.0, 0.0)).norm() < 1e-9));
}

#[test]
fn windings_of_dispersion_relations() {
    let bf = build_burgers_fisher(1e-4).unwrap();
    let d3 = |z: Complex64| Ok(dispersion_value(&bf.model, z, 1.0));
    let disk = Contour::circle(c(0.0, 0.5), 0.3).unwrap();
    assert_eq!(winding_number(d3, &disk).unwrap().count, 2);
    let zs = locate_zeros_plain(d3, &Contour::circle(c(0.0, 0.5), 0.1).unwrap(), TOL).unwrap();
    assert_eq!(zs.len(), 1);
    assert_eq!(zs[0].multiplicity, 2);
    assert!((zs[0].lambda - c(0.0, 0.5)).norm() < 1e-8);

    let gle = build_gle(gle_omega_from_p1(0.5).unwrap(), 0.05).unwrap();
    let rect = Contour::rectangle(c(-4.0, -1.0), c(1.0, 1.0)).unwrap();
    let zs = locate_zeros_plain(|z| Ok(dispersion_value(&gle.model, z, 1.0)), &rect, TOL).unwrap();
    assert_eq!(zs.len(), 2);
    assert!((zs[0].lambda - c(-3.0, 0.0)).norm() < 1e-8 && zs[0].multiplicity == 1);
    assert!((zs[1].lambda - c(0.5, 0.0)).norm() < 1e-8 && zs[1].multiplicity == 1);
}

#[test]
fn homotopy_end_points() {
    let bf = build_burgers_fisher(1e-3).unwrap();
    let tol = Tolerances::from_tol(1e-10);
    let (m, eps) = (&bf.model, bf.eps);
    let z = c(0.3, 0.2);
    assert_eq!(homotopy_evans(m, 1.0, z, 0.4, eps, tol).unwrap(), evans(m, z, 0.4, eps, tol).unwrap());

    // frozen coefficients vanish on the limiting curve
    let mu = 0.4;
    for root in dispersion_roots(m, mu).unwrap() {
        let value = homotopy_evans(m, 0.0, root, mu, eps, tol).unwrap();
        assert!(value.norm() < 1e-8, "{value}");
    }

    let t = m.period(eps).unwrap();
    let a = homotopy_evans(m, 0.5, z, mu, eps, tol).unwrap();
    let b = homotopy_evans(m, 0.5, z, mu + 2.0 * std::f64::consts::PI / t, eps, tol).unwrap();
    assert!((a - b).norm() < 1e-8 * (1.0 + a.norm()));
}

#[test]
fn multipliers_match_exponents() {
    let mathieu = build_mathieu(1.0, 0.05).unwrap();
    let r = principal_matrix(&mathieu.model, 1.0, c(0.2, 0.0), 0.3, mathieu.eps, Tolerances::from_tol(1e-10)).unwrap();
    for (mult, exp) in r.multipliers.iter().zip(&r.exponents) {
        assert!(((exp * r.period).exp() - mult).norm() < 1e-10 * (1.0 + mult.norm()));
        assert!(exp.im.abs() <= std::f64::consts::PI / r.period + 1e-12);
    }
}

use std::f64::consts::PI;

use floquet::applications::{
    build_burgers_fisher, build_gle, build_mathieu, build_rdode_fixture, gle_equilibria, gle_omega_from_p1, periodic_orbit,
};
use floquet::linalg::c;
use floquet::model::{limiting_system, perturbation_matrix, system_dim, validate_model};

#[test]
fn system_sizes_follow_the_case() {
    let gle = build_gle(gle_omega_from_p1(0.5).unwrap(), 0.05).unwrap();
    let rd = build_rdode_fixture(1.0, 1.0, 0.01).unwrap();
    let bf = build_burgers_fisher(1e-4).unwrap();
    assert_eq!(system_dim(&gle.model), 4);
    assert_eq!(system_dim(&rd.model), 3);
    assert_eq!(system_dim(&bf.model), 2);
}

#[test]
fn burgers_fisher_limiting_matrix() {
    let bf = build_burgers_fisher(1e-4).unwrap();
    let lambda = c(0.3, -0.7);
    let a = limiting_system(&bf.model, lambda).unwrap();
    // a1⁰ = [[1/2, −1], [−1, 1/2]], a0⁰ = diag(1, −1)
    let det = 0.25 - 1.0;
    let inv = [[0.5 / det, 1.0 / det], [1.0 / det, 0.5 / det]];
    let rhs = [[lambda - 1.0, c(0.0, 0.0)], [c(0.0, 0.0), lambda + 1.0]];
    for i in 0..2 {
        for j in 0..2 {
            let want = rhs[0][j] * inv[i][0] + rhs[1][j] * inv[i][1];
            assert!((a[(i, j)] - want).norm() < 1e-12, "({i},{j}) {} vs {want}", a[(i, j)]);
        }
    }
}

#[test]
fn frozen_perturbation_vanishes() {
    let mathieu = build_mathieu(1.0, 0.0).unwrap();
    let p = perturbation_matrix(&mathieu.model, 0.7, c(0.1, 0.2), 0.0).unwrap();
    assert!(p.iter().all(|z| z.norm() == 0.0));
}

#[test]
fn mathieu_converges_at_first_order() {
    let mathieu = build_mathieu(1.0, 0.1).unwrap();
    let report = validate_model(&mathieu.model, &[0.1, 0.05, 0.025]);
    assert!(report.ok(), "{:?}", report.violations);
    for (s, want) in report.samples.iter().zip([0.2, 0.1, 0.05]) {
        assert!((s.sup_total() - want).abs() < 1e-3 * want, "eps {}: {}", s.eps, s.sup_total());
    }
    assert!((report.order.unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn orbit_periods_approach_their_limits() {
    let harmonic = periodic_orbit(&|z: [f64; 2]| [z[1], -z[0]], [1.0, 0.0], 1e-12).unwrap();
    assert!((harmonic.period - 2.0 * PI).abs() < 1e-8);

    let limit = 3f64.sqrt() * PI;
    let errors: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&h| (build_burgers_fisher(h).unwrap().period().unwrap() - limit).abs())
        .collect();
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert!(errors[1] < 0.2);

    let (p1, _) = gle_equilibria(gle_omega_from_p1(0.5).unwrap()).unwrap();
    assert!((p1 - 0.5).abs() < 1e-12);
    let lim = 2.0 * PI / 2.5f64.sqrt();
    assert!((lim - 3.9738).abs() < 1e-4);
    let gle = build_gle(gle_omega_from_p1(0.5).unwrap(), 1e-3).unwrap();
    assert!((gle.period().unwrap() - lim).abs() < 0.01 * lim);
}

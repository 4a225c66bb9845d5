use super::*;
use crate::geometry::{make_scenario, GalleryId};
use std::f64::consts::SQRT_2;

fn scenario(id: GalleryId) -> Scenario {
    make_scenario(id.name(), &id.default_params()).unwrap()
}

/// Evidence built from exact values only.
fn exact_evidence(s: &Scenario) -> Evidence {
    let area = s.exact_area.unwrap();
    let blen = s.exact_boundary_measure.unwrap_or(0.0);
    Evidence {
        level: 0,
        lambda1: Measured::exact(s.analytic_lambda1.unwrap_or(f64::NAN)),
        sigma1: s.analytic_sigma1.map(Measured::exact),
        dirichlet_lambda1: s.analytic_dirichlet_lambda1.map(Measured::exact),
        area: Measured::exact(area),
        boundary_measure: Measured::exact(blen),
        chi: s.exact_euler.unwrap_or(0),
        genus: s.genus as i64,
        boundary_loops: s.boundary_components,
        k_min: s.k_intrinsic,
        k_max: s.k_intrinsic,
        integral_s_sigma: Measured::exact(s.s_sigma * area),
        integral_boundary_h: Measured::exact(s.kappa_boundary.unwrap_or(0.0) * blen),
    }
}

#[test]
fn rhs_examples() {
    assert!((estimate1_rhs(0.0, 2.0, 0.0, 1, PI, 2.0 * PI) + 2.0).abs() < 1e-14);
    assert!((estimate1_rhs(6.0, 0.0, 0.0, 1, 2.0 * PI, 2.0 * PI) + 2.0).abs() < 1e-14);
    assert!((estimate1_rhs(0.0, 0.0, 2.0, 2, 4.0 * PI, 0.0) + 2.0).abs() < 1e-14);
    assert!((estimate2_rhs(6.0, 0.0, 0.0, 2, 4.0 * PI, 0.0) + 2.0).abs() < 1e-14);
    assert!((estimate2_rhs(6.0, 0.0, 0.0, 0, 2.0 * PI * PI, 0.0) + 3.0).abs() < 1e-14);
    assert!((corollary_bs_rhs(-6.0, 2.0 * SQRT_2, 2, 4.0 * PI)).abs() < 1e-14);
    assert!((corollary_bs_rhs(0.0, 2.0, 2, 4.0 * PI) + 1.0).abs() < 1e-14);
    assert!((estimate3_rhs(0.0, 2.0, 0.0, 1, PI, 2.0 * PI).unwrap() + 1.0).abs() < 1e-14);
    assert_eq!(
        estimate3_rhs(6.0, 0.0, 0.0, 2, 4.0 * PI, 0.0),
        Err(BoundsError::NeedsBoundary {
            theorem: Theorem::Estimate3
        })
    );
}

#[test]
fn clifford_torus_gap() {
    let s = scenario(GalleryId::CliffordTorus);
    let e = exact_evidence(&s);
    let r = corollary_bs_check(&s, &e, &Tolerances::default()).unwrap();
    assert!((r.slack - 1.0).abs() < 1e-12);
    assert!(r.pass && !r.equality && r.diagnostics_agree);
    assert_eq!(r.diagnostics.geodesic_residual, 2.0);
    let t4 = t4_check(&s, &e, &Tolerances::default()).unwrap();
    assert_eq!(t4.status, Status::NotApplicable);
    assert_eq!(t4.failed_gates(), vec!["lambda1 >= -n"]);
}

#[test]
fn model_cases_are_equalities() {
    let tol = Tolerances::default();
    let cases = [
        (GalleryId::HemisphereS3plus, Theorem::T1),
        (GalleryId::HemisphereS3plus, Theorem::Estimate1),
        (GalleryId::HemisphereS3plus, Theorem::Estimate2),
        (GalleryId::RoundSphereR3, Theorem::T2),
        (GalleryId::RoundSphereR3, Theorem::Estimate1),
        (GalleryId::GeodesicSphereH3, Theorem::T3),
        (GalleryId::GeodesicSphereH3, Theorem::Estimate1),
        (GalleryId::EquatorialSphereS3, Theorem::Estimate2),
        (GalleryId::EquatorialSphereS3, Theorem::T4),
        (GalleryId::FlatDiskB3, Theorem::Estimate3),
        (GalleryId::FlatDiskB3, Theorem::RigidityN),
        (GalleryId::FlatDiskB3, Theorem::T5),
        (GalleryId::EquatorialS3InS4, Theorem::T4),
        (GalleryId::EquatorialB3InB4, Theorem::RigidityN),
    ];
    for (id, t) in cases {
        let s = scenario(id);
        let r = check(t, &s, &exact_evidence(&s), &tol).unwrap();
        assert_eq!(r.status, Status::Pass, "{id} {t:?}: {:?}", r.failed_gates());
        assert!(r.equality, "{id} {t:?}: slack {}", r.slack);
        assert!(r.diagnostics_agree, "{id} {t:?}: {:?}", r.diagnostics);
    }
}

#[test]
fn strict_cases() {
    let tol = Tolerances::default();
    let s = scenario(GalleryId::FlatDiskB3);
    let r = estimate1_check(&s, &exact_evidence(&s), &tol).unwrap();
    assert!(r.pass && !r.equality && r.diagnostics_agree);
    assert_eq!(r.diagnostics.kappa_minus_b, Some(1.0));
    let s = scenario(GalleryId::RoundSphereR3);
    let r = corollary_bs_check(&s, &exact_evidence(&s), &tol).unwrap();
    assert!((r.slack - 1.0).abs() < 1e-12);
    let s = scenario(GalleryId::GeodesicSphereH3);
    let r = corollary_bs_check(&s, &exact_evidence(&s), &tol).unwrap();
    assert!((r.slack - 2.0).abs() < 1e-12);
}

#[test]
fn hemisphere_steklov_gate() {
    let s = scenario(GalleryId::HemisphereS3plus);
    let mut e = exact_evidence(&s);
    e.sigma1 = Some(Measured::exact(-1e4));
    let r = estimate3_check(&s, &e, &Tolerances::default()).unwrap();
    assert_eq!(r.status, Status::NotApplicable);
    assert_eq!(r.failed_gates(), vec!["lambda1_dirichlet > 0 (certified)"]);
}

#[test]
fn violated_bound_fails() {
    let s = scenario(GalleryId::EquatorialSphereS3);
    let mut e = exact_evidence(&s);
    e.lambda1 = Measured::exact(-1.0);
    let r = estimate2_check(&s, &e, &Tolerances::default()).unwrap();
    assert!(!r.pass && !r.equality);
    assert_eq!(r.status, Status::Fail);
    assert!((r.pass_tol - PASS_TOL_FLOOR).abs() < 1e-20);
    e.lambda1 = Measured { value: -2.0 + 1e-4, error: 1e-4 };
    let r = estimate2_check(&s, &e, &Tolerances::default()).unwrap();
    assert!(r.pass && (r.pass_tol - 1e-3).abs() < 1e-15);
}

#[test]
fn setting_mismatch_is_an_error() {
    let tol = Tolerances::default();
    let torus = scenario(GalleryId::CliffordTorus);
    let e = exact_evidence(&torus);
    assert!(matches!(t1_check(&torus, &e, &tol), Err(BoundsError::NeedsBoundary { .. })));
    assert!(matches!(rigidity_n_check(&torus, &e, &tol), Err(BoundsError::NeedsBoundary { .. })));
    let disk = scenario(GalleryId::FlatDiskB3);
    let e = exact_evidence(&disk);
    assert!(matches!(t4_check(&disk, &e, &tol), Err(BoundsError::NeedsClosed { .. })));
    assert!(matches!(corollary_bs_check(&disk, &e, &tol), Err(BoundsError::NeedsClosed { .. })));
    let ball = scenario(GalleryId::EquatorialB3InB4);
    let e = exact_evidence(&ball);
    assert!(matches!(estimate1_check(&ball, &e, &tol), Err(BoundsError::NeedsSurface { .. })));
}

#[test]
fn suite_reports_every_setting_match() {
    let s = scenario(GalleryId::CliffordTorus);
    let reports = theorem_suite(&s, &exact_evidence(&s), &Tolerances::default());
    let names: Vec<Theorem> = reports.iter().map(|r| r.theorem).collect();
    assert_eq!(
        names,
        vec![
            Theorem::Estimate1,
            Theorem::Estimate2,
            Theorem::CorollaryBS,
            Theorem::T2,
            Theorem::T3,
            Theorem::T4
        ]
    );
    assert!(reports.iter().all(|r| r.pass || r.status == Status::NotApplicable));
}

#[test]
fn report_json_round_trip() {
    let s = scenario(GalleryId::HemisphereS3plus);
    let mut e = exact_evidence(&s);
    e.sigma1 = None;
    let r = estimate3_check(&s, &e, &Tolerances::default()).unwrap();
    assert!(r.lhs.is_nan());
    let json = serde_json::to_string(&r).unwrap();
    assert!(json.contains("\"constK_residual\""));
    let back: BoundReport = serde_json::from_str(&json).unwrap();
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
}

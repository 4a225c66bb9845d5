mod common;

use common::*;
use jacspec::fem::assemble;
use jacspec::geometry::{make_scenario, mesh, GalleryId};
use jacspec::spectra::dirichlet_spectrum;

#[test]
fn shooting_reproduces_first_bessel_zero() {
    let j01: f64 = 2.404_825_557_695_773;
    assert!(rel(disk_dirichlet(), j01 * j01) < 1e-9);
}

#[test]
fn hemisphere_dirichlet_is_two() {
    // cos r vanishes on the equator and is a degree-1 spherical harmonic.
    assert!((hemisphere_dirichlet() - 2.0).abs() < 1e-8);
}

#[test]
fn hemisphere_dirichlet_jacobi_tends_to_zero() {
    let id = GalleryId::HemisphereS3plus;
    let s = make_scenario(id.name(), &id.default_params()).unwrap();
    let target = hemisphere_dirichlet() - s.potential();
    let value = |level| {
        let forms = assemble(&mesh(&s, level).unwrap()).unwrap();
        dirichlet_spectrum(&forms, 1).unwrap().first()
    };
    let (coarse, fine) = (value(3), value(4));
    assert!((fine - target).abs() < (coarse - target).abs());
    assert!((fine - target).abs() < 1e-3);
}

#[test]
fn disk_steklov_pattern() {
    assert_eq!(disk_steklov(1.0, 6), vec![-1.0, 0.0, 0.0, 1.0, 1.0, 2.0]);
}

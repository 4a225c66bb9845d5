use super::*;
use crate::fem::assemble;
use crate::geometry::{make_scenario, mesh, GalleryId};

fn forms(id: GalleryId, level: u32) -> DiscreteForms {
    let s = make_scenario(id.name(), &id.default_params()).unwrap();
    assemble(&mesh(&s, level).unwrap()).unwrap()
}

#[test]
fn clifford_torus_pattern_and_index() {
    let f = forms(GalleryId::CliffordTorus, 3);
    let r = robin_spectrum(&f, 6).unwrap();
    assert!((r.eigenvalues[0] + 4.0).abs() < 1e-10);
    for k in 1..5 {
        assert!((r.eigenvalues[k] + 2.0).abs() < 1e-2);
    }
    assert_eq!(r.clusters[1].multiplicity, 4);
    assert_eq!(morse_index(&r).unwrap(), 5);
    assert!(r.residual_norms.iter().all(|&x| x <= SOLVER_TOL * 4.0));
}

#[test]
fn eigenvectors_are_mass_orthonormal() {
    let f = forms(GalleryId::EquatorialSphereS3, 3);
    let r = robin_spectrum(&f, 5).unwrap();
    for (i, u) in r.eigenvectors.iter().enumerate() {
        for (j, v) in r.eigenvectors.iter().enumerate() {
            let g = f.m.form(u, v);
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((g - want).abs() < 1e-8, "Gram[{i}][{j}] = {g}");
        }
    }
    assert!(eigen_equation_residual(&f, &r.eigenvectors[0], r.eigenvalues[0]).unwrap() < 1e-8);
}

#[test]
fn morse_index_needs_a_nonnegative_eigenvalue() {
    let f = forms(GalleryId::CliffordTorus, 2);
    let r = robin_spectrum(&f, 3).unwrap();
    assert!(matches!(morse_index(&r), Err(SpectraError::IndexUncertified { .. })));
    let d = forms(GalleryId::FlatDiskB3, 2);
    let r = dirichlet_spectrum(&d, 2).unwrap();
    assert_eq!(morse_index(&r), Err(SpectraError::NotRobin));
}

#[test]
fn closed_meshes_reject_boundary_problems() {
    let f = forms(GalleryId::CliffordTorus, 1);
    assert_eq!(dirichlet_spectrum(&f, 1).unwrap_err(), SpectraError::ClosedMesh);
    assert!(matches!(dtn_matrix(&f), Err(SpectraError::ClosedMesh)));
    assert_eq!(steklov_spectrum(&f, 1).unwrap_err(), SpectraError::ClosedMesh);
    assert_eq!(robin_spectrum(&f, 0).unwrap_err(), SpectraError::EmptyRequest);
}

#[test]
fn disk_dtn_spectrum() {
    let f = forms(GalleryId::FlatDiskB3, 4);
    let dtn = dtn_matrix(&f).unwrap();
    assert!(dtn.wellposed && dtn.dirichlet_lambda1 > 5.7);
    assert!(dtn.symmetry_defect().unwrap() < 1e-10);
    // Eigenvalues of Mb⁻¹Λ: 0, 1, 1, 2, 2.
    let bb = &f.boundary_idx;
    let mb = f.mb.extract(bb, bb).to_dense();
    let (values, _) = dense_pencil(dtn.lambda_matrix.as_ref().unwrap(), &mb).unwrap();
    for (v, want) in values.iter().zip([0.0, 1.0, 1.0, 2.0, 2.0]) {
        assert!((v - want).abs() < 1e-2, "{v} vs {want}");
    }
}

#[test]
fn steklov_identity_and_extension() {
    let f = forms(GalleryId::SphericalCapB3, 2);
    let st = steklov_spectrum(&f, 4).unwrap();
    let a = f.bulk();
    for (sigma, u) in st.eigenvalues.iter().zip(&st.eigenvectors) {
        // Q[û] = σ ∮ h².
        let q = index_form(&f, u, u).unwrap();
        let hmh = f.mb.form(u, u);
        assert!((hmh - 1.0).abs() < 1e-10);
        assert!((q - sigma * hmh).abs() < 1e-8 * sigma.abs().max(1.0));
        // J-harmonic in the interior.
        let au = a.mul_vec(u);
        let worst = f.interior_idx.iter().map(|&i| au[i].abs()).fold(0.0, f64::max);
        assert!(worst < 1e-10);
    }
}

#[test]
fn constant_trace_extends_to_constant_on_flat_disk() {
    let f = forms(GalleryId::FlatDiskB3, 3);
    let u = jharmonic_extension(&f, &vec![1.0; f.boundary_idx.len()]).unwrap();
    assert!(u.iter().all(|x| (x - 1.0).abs() < 1e-12));
    assert!(matches!(
        jharmonic_extension(&f, &[1.0]),
        Err(SpectraError::TraceLength { .. })
    ));
}

#[test]
fn robin_below_dirichlet() {
    for id in [GalleryId::FlatDiskB3, GalleryId::SphericalCapB3, GalleryId::HemisphereS3plus] {
        let f = forms(id, 2);
        let r = robin_spectrum(&f, 1).unwrap().first();
        let d = dirichlet_spectrum(&f, 1).unwrap().first();
        assert!(r <= d + 1e-9, "{}: {r} > {d}", id.name());
    }
}

#[test]
fn cluster_grouping() {
    let c = clusters(&[-4.0, -2.0, -2.0 + 1e-9, -2.0 + 2e-9, 0.5]);
    assert_eq!(c.len(), 3);
    assert_eq!((c[1].first, c[1].multiplicity), (1, 3));
}

#[test]
fn random_vector_is_not_an_eigenvector() {
    use rand::{Rng, SeedableRng};
    let f = forms(GalleryId::EquatorialSphereS3, 2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let u: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    assert!(eigen_equation_residual(&f, &u, 0.0).unwrap() > 0.1);
}

use std::sync::OnceLock;

use jacspec::bounds::{estimate1_rhs, estimate2_rhs};
use jacspec::fem::{assemble, index_form, rayleigh_upper_bound, DiscreteForms};
use jacspec::geometry::{make_scenario, mesh, GalleryId, RadialQuadrature, Scenario};
use jacspec::spectra::{dirichlet_spectrum, jharmonic_extension, robin_spectrum};
use jacspec::yamabe::{chain_check_202, holder_check, q_quotient, y_quotient, Profile, TestFunction};
use proptest::prelude::*;

fn scenario(id: GalleryId) -> Scenario {
    make_scenario(id.name(), &id.default_params()).unwrap()
}

struct Fixture {
    forms: DiscreteForms,
    lambda1: f64,
}

fn fixture(id: GalleryId) -> &'static Fixture {
    static CELLS: [OnceLock<Fixture>; 10] = [const { OnceLock::new() }; 10];
    let k = GalleryId::ALL.iter().position(|g| *g == id).unwrap();
    CELLS[k].get_or_init(|| {
        let forms = assemble(&mesh(&scenario(id), 3).unwrap()).unwrap();
        let lambda1 = robin_spectrum(&forms, 1).unwrap().first();
        Fixture { forms, lambda1 }
    })
}

const MESHED: [GalleryId; 5] = [
    GalleryId::CliffordTorus,
    GalleryId::EquatorialSphereS3,
    GalleryId::HemisphereS3plus,
    GalleryId::FlatDiskB3,
    GalleryId::SphericalCapB3,
];

fn vector(n: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn profile() -> impl Strategy<Value = TestFunction> {
    prop_oneof![
        Just(Profile::Constant),
        (-0.9f64..3.0).prop_map(|c| Profile::Quadratic { c }),
        Just(Profile::Gaussian),
    ]
    .prop_map(TestFunction::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn index_form_is_symmetric_bilinear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0, which in 0usize..5) {
        let f = &fixture(MESHED[which]).forms;
        let n = f.dim();
        let (u, v, w) = (vector(n, seed), vector(n, seed ^ 1), vector(n, seed ^ 2));
        let combo: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
        let lhs = index_form(f, &combo, &w).unwrap();
        let rhs = a * index_form(f, &u, &w).unwrap() + b * index_form(f, &v, &w).unwrap();
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        let (uv, vu) = (index_form(f, &u, &v).unwrap(), index_form(f, &v, &u).unwrap());
        prop_assert!((uv - vu).abs() <= 1e-12 * (1.0 + uv.abs()));
    }

    #[test]
    fn rayleigh_quotient_bounds_lambda1(seed in any::<u64>()) {
        for id in MESHED {
            let fx = fixture(id);
            let u = vector(fx.forms.dim(), seed);
            let r = rayleigh_upper_bound(&fx.forms, &u).unwrap();
            prop_assert!(r >= fx.lambda1 - 1e-9 * fx.lambda1.abs().max(1.0), "{}: {r} < {}", id.name(), fx.lambda1);
        }
    }

    #[test]
    fn rayleigh_quotient_is_scale_invariant(seed in any::<u64>(), t in 0.01f64..100.0) {
        let f = &fixture(GalleryId::SphericalCapB3).forms;
        let u = vector(f.dim(), seed);
        let tu: Vec<f64> = u.iter().map(|x| t * x).collect();
        let (r, rt) = (rayleigh_upper_bound(f, &u).unwrap(), rayleigh_upper_bound(f, &tu).unwrap());
        prop_assert!((r - rt).abs() <= 1e-10 * r.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn jharmonic_extension_minimizes_index_form(seed in any::<u64>(), eps in 1e-3f64..1.0) {
        for id in [GalleryId::FlatDiskB3, GalleryId::SphericalCapB3] {
            let f = &fixture(id).forms;
            let trace = vector(f.boundary_idx.len(), seed);
            let u = jharmonic_extension(f, &trace).unwrap();
            for (b, t) in f.boundary_idx.iter().zip(&trace) {
                prop_assert_eq!(u[*b], *t);
            }
            let mut psi = u.clone();
            for (&i, d) in f.interior_idx.iter().zip(vector(f.interior_idx.len(), seed ^ 7)) {
                psi[i] += eps * d;
            }
            let (qu, qpsi) = (index_form(f, &u, &u).unwrap(), index_form(f, &psi, &psi).unwrap());
            prop_assert!(qu <= qpsi + 1e-10, "{}: {qu} > {qpsi}", id.name());
        }
    }

    #[test]
    fn robin_below_dirichlet(which in 2usize..5) {
        let fx = fixture(MESHED[which]);
        let d = dirichlet_spectrum(&fx.forms, 1).unwrap().first();
        prop_assert!(fx.lambda1 <= d);
    }
}

proptest! {
    #[test]
    fn quotients_are_scale_invariant(phi in profile(), t in prop_oneof![0.01f64..0.5, 2.0f64..100.0]) {
        for id in [GalleryId::EquatorialB3InB4, GalleryId::HemisphereS4plus, GalleryId::EquatorialS3InS4] {
            let s = scenario(id);
            let quad = RadialQuadrature::new(&s, 4).unwrap();
            let (a, b) = (q_quotient(&s, &quad, &phi).unwrap(), q_quotient(&s, &quad, &phi.scaled(t)).unwrap());
            prop_assert!((a.q_value - b.q_value).abs() <= 1e-10 * a.q_value.abs().max(1.0));
            if s.has_boundary() {
                let (a, b) = (y_quotient(&s, &quad, &phi).unwrap(), y_quotient(&s, &quad, &phi.scaled(t)).unwrap());
                let (ya, yb) = (a.y_value.unwrap(), b.y_value.unwrap());
                prop_assert!((ya - yb).abs() <= 1e-10 * ya.abs().max(1.0));
            }
        }
    }

    #[test]
    fn chain_and_holder_hold(phi in profile(), t in 0.1f64..10.0) {
        for id in [GalleryId::EquatorialB3InB4, GalleryId::HemisphereS4plus, GalleryId::EquatorialS3InS4] {
            let s = scenario(id);
            let quad = RadialQuadrature::new(&s, 4).unwrap();
            let phi = phi.scaled(t);
            let chain = chain_check_202(&s, &quad, &phi, s.analytic_lambda1.unwrap()).unwrap();
            prop_assert!(chain.holds, "{}: {chain:?}", id.name());
            let holder = holder_check(&s, &quad, &phi).unwrap();
            prop_assert!(holder.holds, "{}: {holder:?}", id.name());
        }
    }

    #[test]
    fn estimate1_is_sharper_than_estimate2(
        a in -10.0f64..10.0, b in -2.0f64..2.0, h in -5.0f64..5.0, chi in -4i64..3,
        area in 0.1f64..50.0, blen in 0.0f64..20.0,
    ) {
        prop_assert!(estimate1_rhs(a, b, h, chi, area, blen) <= estimate2_rhs(a, b, h, chi, area, blen));
    }
}

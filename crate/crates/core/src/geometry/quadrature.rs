use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mesh::RiemannianMesh;
use super::scenario::{Model, Scenario};
use super::GeometryError;

/// Which per-vertex sample `integrate_scalar` integrates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSelector {
    One,
    Q,
    K,
    BoundaryOne,
    Bweight,
    Kappa,
}

impl FieldSelector {
    pub fn is_boundary(self) -> bool {
        matches!(
            self,
            FieldSelector::BoundaryOne | FieldSelector::Bweight | FieldSelector::Kappa
        )
    }
}

/// Integrates the piecewise-linear interpolant of a vertex field: triangle
/// area times vertex mean, or edge length times endpoint mean on the
/// boundary loops.
pub fn integrate_scalar(mesh: &RiemannianMesh, field: FieldSelector) -> Result<f64, GeometryError> {
    if field.is_boundary() {
        if mesh.is_closed() {
            return Err(GeometryError::ClosedMesh);
        }
        let value = |v: usize| -> f64 {
            let f = &mesh.field[v];
            match field {
                FieldSelector::BoundaryOne => 1.0,
                FieldSelector::Bweight => f.bweight.unwrap_or(0.0),
                _ => f.kappa.unwrap_or(0.0),
            }
        };
        let mut total = 0.0;
        for lp in &mesh.boundary_loops {
            for &[i, j] in lp {
                let l = mesh.edge_length(i, j).expect("boundary edge");
                total += 0.5 * l * (value(i) + value(j));
            }
        }
        return Ok(total);
    }
    let value = |v: usize| -> f64 {
        let f = &mesh.field[v];
        match field {
            FieldSelector::One => 1.0,
            FieldSelector::Q => f.q,
            _ => f.k,
        }
    };
    Ok(mesh
        .triangles
        .iter()
        .enumerate()
        .map(|(t, tri)| mesh.triangle_area(t) * (value(tri[0]) + value(tri[1]) + value(tri[2])) / 3.0)
        .sum())
}

/// `∫K + ∮κ − 2πχ`, with `χ` read off the triangulation.
pub fn gauss_bonnet_defect(mesh: &RiemannianMesh) -> f64 {
    let interior = integrate_scalar(mesh, FieldSelector::K).expect("interior field");
    let boundary = if mesh.is_closed() {
        0.0
    } else {
        integrate_scalar(mesh, FieldSelector::Kappa).expect("boundary field")
    };
    interior + boundary - 2.0 * PI * mesh.euler_characteristic() as f64
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule for radial integrands on the quadrature-only scenarios:
/// composite Gauss–Legendre in the radial variable times the exact measure
/// of the concentric 2-spheres.
///
/// For flat balls `r` is the Euclidean radius and the shell measure is
/// `4πr²`; on the unit 3-sphere `r` is the geodesic distance from the pole
/// and the shell measure is `4π sin²r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialQuadrature {
    pub scenario: String,
    pub n: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Outer radius; the boundary shell when the domain has one.
    pub r_max: f64,
    pub closed: bool,
    pub flat: bool,
    pub level: u32,
    pub h: f64,
}

const POINTS_PER_PANEL: usize = 4;

impl RadialQuadrature {
    pub fn new(scenario: &Scenario, level: u32) -> Result<Self, GeometryError> {
        let (r_max, flat) = match scenario.model {
            Model::FlatBall { radius } => (radius, true),
            Model::SphereRegion { angle } => (angle, false),
            _ => return Err(GeometryError::NotRadial(scenario.name.clone())),
        };
        let closed = !flat && r_max >= PI;
        let shell = |r: f64| shell_measure(flat, r);
        let panels = 1usize << level.min(20);
        let h = r_max / panels as f64;
        let (x, w) = gauss_legendre(POINTS_PER_PANEL);
        let mut nodes = Vec::with_capacity(panels * POINTS_PER_PANEL);
        let mut weights = Vec::with_capacity(panels * POINTS_PER_PANEL);
        for p in 0..panels {
            let a = p as f64 * h;
            for (xi, wi) in x.iter().zip(&w) {
                let r = a + 0.5 * h * (xi + 1.0);
                nodes.push(r);
                weights.push(0.5 * h * wi * shell(r));
            }
        }
        Ok(Self {
            scenario: scenario.name.clone(),
            n: scenario.n,
            nodes,
            weights,
            r_max,
            closed,
            flat,
            level,
            h,
        })
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }

    pub fn volume(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn boundary_measure(&self) -> f64 {
        if self.closed {
            0.0
        } else {
            shell_measure(self.flat, self.r_max)
        }
    }

    /// Integral over the boundary shell of a radial function.
    pub fn integrate_boundary(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.boundary_measure() * f(self.r_max)
    }
}

fn shell_measure(flat: bool, r: f64) -> f64 {
    if flat {
        4.0 * PI * r * r
    } else {
        4.0 * PI * r.sin().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_scenario, mesh, GalleryId};

    fn gmesh(id: GalleryId, level: u32) -> RiemannianMesh {
        let s = make_scenario(id.name(), &id.default_params()).unwrap();
        mesh(&s, level).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let int = |p: i32| x.iter().zip(&w).map(|(x, w)| w * x.powi(p)).sum::<f64>();
        assert!((int(0) - 2.0).abs() < 1e-14);
        assert!((int(8) - 2.0 / 9.0).abs() < 1e-14);
        assert!(int(7).abs() < 1e-15);
    }

    #[test]
    fn sphere_area_and_gauss_bonnet() {
        let m = gmesh(GalleryId::EquatorialSphereS3, 5);
        let area = integrate_scalar(&m, FieldSelector::One).unwrap();
        assert!((area - 4.0 * PI).abs() < 1e-3 * 4.0 * PI);
        assert!(gauss_bonnet_defect(&m).abs() < 1e-2);
    }

    #[test]
    fn torus_potential_integral() {
        let m = gmesh(GalleryId::CliffordTorus, 2);
        let q = integrate_scalar(&m, FieldSelector::Q).unwrap();
        // The flat torus is reproduced exactly by the grid.
        assert!((q - 8.0 * PI * PI).abs() < 1e-10);
        assert!(gauss_bonnet_defect(&m).abs() < 1e-12);
    }

    #[test]
    fn disk_boundary_integrals() {
        let m = gmesh(GalleryId::FlatDiskB3, 5);
        let b = integrate_scalar(&m, FieldSelector::Bweight).unwrap();
        assert!((b - 2.0 * PI).abs() < 1e-3);
        assert!(gauss_bonnet_defect(&m).abs() < 1e-3);
        let t = gmesh(GalleryId::CliffordTorus, 0);
        assert_eq!(integrate_scalar(&t, FieldSelector::Kappa), Err(GeometryError::ClosedMesh));
    }

    #[test]
    fn radial_volumes() {
        let s = make_scenario("equatorial_b3_in_b4", &Default::default()).unwrap();
        let q = RadialQuadrature::new(&s, 2).unwrap();
        assert!((q.volume() - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((q.boundary_measure() - 4.0 * PI).abs() < 1e-13);
        let s = make_scenario("equatorial_s3_in_s4", &Default::default()).unwrap();
        let q = RadialQuadrature::new(&s, 3).unwrap();
        assert!((q.volume() - 2.0 * PI * PI).abs() < 1e-10);
        assert_eq!(q.boundary_measure(), 0.0);
        let s = make_scenario("hemisphere_s4plus", &Default::default()).unwrap();
        let q = RadialQuadrature::new(&s, 3).unwrap();
        assert!((q.volume() - PI * PI).abs() < 1e-10);
        assert!((q.boundary_measure() - 4.0 * PI).abs() < 1e-13);
    }
}

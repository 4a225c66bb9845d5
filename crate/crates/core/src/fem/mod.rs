//! Linear finite elements on intrinsic triangulations.
//!
//! Each triangle is treated as the Euclidean triangle with the mesh's edge
//! lengths. Stiffness uses the cotangent formula, the mass matrices are
//! consistent (not lumped), and the potential is averaged per triangle.

use thiserror::Error;

use crate::geometry::RiemannianMesh;
use crate::sparse::SparseMatrix;

#[derive(Debug, Error, PartialEq)]
pub enum FemError {
    #[error("triangle {triangle} is degenerate (area {area:e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector lies in the kernel of the mass matrix")]
    MassKernel,
}

/// The matrices of one mesh. All are `n × n` over the vertex set; `bw` and
/// `mb` vanish off the boundary.
#[derive(Clone, Debug)]
pub struct DiscreteForms {
    pub k: SparseMatrix,
    pub m: SparseMatrix,
    pub p: SparseMatrix,
    pub bw: SparseMatrix,
    pub mb: SparseMatrix,
    pub interior_idx: Vec<usize>,
    pub boundary_idx: Vec<usize>,
    pub scenario: String,
    pub level: u32,
    pub h: f64,
}

impl DiscreteForms {
    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_idx.is_empty()
    }

    /// `K − P`, the bulk part of the Jacobi form.
    pub fn bulk(&self) -> SparseMatrix {
        self.k.add_scaled(&self.p, -1.0)
    }

    /// `K − P − Bw`.
    pub fn jacobi(&self) -> SparseMatrix {
        self.bulk().add_scaled(&self.bw, -1.0)
    }

    fn check_len(&self, u: &[f64]) -> Result<(), FemError> {
        if u.len() == self.dim() {
            Ok(())
        } else {
            Err(FemError::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            })
        }
    }
}

pub fn assemble(mesh: &RiemannianMesh) -> Result<DiscreteForms, FemError> {
    let n = mesh.num_vertices();
    let ntri = mesh.triangles.len();
    let mut k = Vec::with_capacity(9 * ntri);
    let mut m = Vec::with_capacity(9 * ntri);
    let mut p = Vec::with_capacity(9 * ntri);
    let min_area = 1e-14 * mesh.h * mesh.h;
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let l = mesh.triangle_lengths(t);
        let area = mesh.triangle_area(t);
        if !(area >= min_area) || area == 0.0 {
            return Err(FemError::DegenerateTriangle { triangle: t, area });
        }
        let l2 = l.map(|x| x * x);
        let qbar = tri.iter().map(|&v| mesh.field[v].q).sum::<f64>() / 3.0;
        for c in 0..3 {
            let (a, b) = ((c + 1) % 3, (c + 2) % 3);
            // Half the cotangent of the angle at corner c couples a and b.
            let w = (l2[a] + l2[b] - l2[c]) / (8.0 * area);
            let (va, vb) = (tri[a], tri[b]);
            k.extend([(va, vb, -w), (vb, va, -w), (va, va, w), (vb, vb, w)]);
        }
        for a in 0..3 {
            for b in 0..3 {
                let me = area / 12.0 * if a == b { 2.0 } else { 1.0 };
                m.push((tri[a], tri[b], me));
                p.push((tri[a], tri[b], qbar * me));
            }
        }
    }
    let mut bw = Vec::new();
    let mut mb = Vec::new();
    for lp in &mesh.boundary_loops {
        for &[i, j] in lp {
            let len = mesh.edge_length(i, j).expect("boundary edge is a mesh edge");
            let wbar = 0.5
                * (mesh.field[i].bweight.unwrap_or(0.0) + mesh.field[j].bweight.unwrap_or(0.0));
            for (a, b) in [(i, i), (j, j), (i, j), (j, i)] {
                let me = len / 6.0 * if a == b { 2.0 } else { 1.0 };
                mb.push((a, b, me));
                bw.push((a, b, wbar * me));
            }
        }
    }
    let boundary_idx = mesh.boundary_vertices();
    let mut on_boundary = vec![false; n];
    boundary_idx.iter().for_each(|&v| on_boundary[v] = true);
    let interior_idx = (0..n).filter(|&v| !on_boundary[v]).collect();
    Ok(DiscreteForms {
        k: SparseMatrix::from_triplets(n, n, k),
        m: SparseMatrix::from_triplets(n, n, m),
        p: SparseMatrix::from_triplets(n, n, p),
        bw: SparseMatrix::from_triplets(n, n, bw),
        mb: SparseMatrix::from_triplets(n, n, mb),
        interior_idx,
        boundary_idx,
        scenario: mesh.scenario.clone(),
        level: mesh.level,
        h: mesh.h,
    })
}

/// `uᵀ(K − P − Bw)v`.
pub fn index_form(forms: &DiscreteForms, u: &[f64], v: &[f64]) -> Result<f64, FemError> {
    forms.check_len(u)?;
    forms.check_len(v)?;
    Ok(forms.k.form(u, v) - forms.p.form(u, v) - forms.bw.form(u, v))
}

/// Rayleigh quotient `𝓘(u,u) / uᵀMu`, an upper bound for `λ₁`.
pub fn rayleigh_upper_bound(forms: &DiscreteForms, u: &[f64]) -> Result<f64, FemError> {
    let num = index_form(forms, u, u)?;
    let den = forms.m.form(u, u);
    if !(den > 0.0) {
        return Err(FemError::MassKernel);
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_scenario, mesh, GalleryId, VertexField};
    use std::f64::consts::PI;

    fn forms(id: GalleryId, level: u32) -> DiscreteForms {
        let s = make_scenario(id.name(), &id.default_params()).unwrap();
        assemble(&mesh(&s, level).unwrap()).unwrap()
    }

    fn unit_square() -> RiemannianMesh {
        let vertices = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]];
        let edges = vec![[0, 1], [0, 2], [0, 3], [1, 2], [2, 3]];
        let d = std::f64::consts::SQRT_2;
        let f = VertexField {
            q: 0.0,
            k: 0.0,
            bweight: Some(0.0),
            kappa: Some(0.0),
        };
        RiemannianMesh {
            scenario: "square".into(),
            vertices,
            triangles: vec![[0, 1, 2], [0, 2, 3]],
            boundary_loops: vec![vec![[0, 1], [1, 2], [2, 3], [3, 0]]],
            edges,
            edge_length: vec![1.0, d, 1.0, 1.0, 1.0],
            field: vec![f; 4],
            level: 0,
            h: d,
        }
    }

    #[test]
    fn reference_square() {
        let f = assemble(&unit_square()).unwrap();
        let one = vec![1.0; 4];
        assert!((f.m.form(&one, &one) - 1.0).abs() < 1e-15);
        assert!((f.mb.form(&one, &one) - 4.0).abs() < 1e-15);
        // Standard cotangent stiffness of the split square: the diagonal
        // has zero weight and the sides weight ½.
        let expected = [
            [1.0, -0.5, 0.0, -0.5],
            [-0.5, 1.0, -0.5, 0.0],
            [0.0, -0.5, 1.0, -0.5],
            [-0.5, 0.0, -0.5, 1.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                assert!((f.k.get(i, j) - e).abs() < 1e-15, "K[{i}][{j}]");
            }
        }
    }

    #[test]
    fn degenerate_triangle_is_reported() {
        let mut m = unit_square();
        m.edge_length[1] = 2.0;
        assert!(matches!(
            assemble(&m),
            Err(FemError::DegenerateTriangle { triangle: 0, .. })
        ));
    }

    #[test]
    fn torus_potential_is_four_times_mass() {
        let f = forms(GalleryId::CliffordTorus, 2);
        let one = vec![1.0; f.dim()];
        assert!((f.p.form(&one, &one) - 4.0 * f.m.form(&one, &one)).abs() < 1e-10);
        assert!(f.k.mul_vec(&one).iter().all(|x| x.abs() < 1e-12));
        assert!(f.is_closed() && f.bw.nnz() == 0);
        let i11 = index_form(&f, &one, &one).unwrap();
        assert!((i11 + 8.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn disk_boundary_forms() {
        let f = forms(GalleryId::FlatDiskB3, 5);
        let one = vec![1.0; f.dim()];
        let b = f.bw.form(&one, &one);
        assert!((b - f.mb.form(&one, &one)).abs() < 1e-12);
        assert!((b - 2.0 * PI).abs() < 1e-3);
        assert!((index_form(&f, &one, &one).unwrap() + b).abs() < 1e-12);
        for x in [&f.k, &f.m, &f.p, &f.bw, &f.mb] {
            assert!(x.symmetry_defect() < 1e-14);
        }
        // Mb vanishes on interior vertices.
        let mut e = vec![0.0; f.dim()];
        e[f.interior_idx[0]] = 1.0;
        assert_eq!(f.mb.form(&e, &e), 0.0);
    }

    #[test]
    fn sphere_rayleigh_of_constant() {
        let f = forms(GalleryId::EquatorialSphereS3, 4);
        let r = rayleigh_upper_bound(&f, &vec![1.0; f.dim()]).unwrap();
        assert!((r + 2.0).abs() < 1e-12);
        assert_eq!(
            rayleigh_upper_bound(&f, &vec![0.0; f.dim()]),
            Err(FemError::MassKernel)
        );
        assert_eq!(
            index_form(&f, &[1.0], &[1.0]),
            Err(FemError::DimensionMismatch { expected: f.dim(), got: 1 })
        );
    }
}

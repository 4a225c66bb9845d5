//! Robin, Dirichlet and Jacobi–Steklov spectra of the Jacobi operator.
//!
//! All pencils keep the sign convention `Ju + λu = 0`: the Robin pencil is
//! `(K − P − Bw, M)` and its smallest eigenvalue is `λ₁`.

mod eigen;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt as SparseLlt;
use faer::{Mat, Side};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::{DENSE_LIMIT, MAX_ITERATIONS, SOLVER_TOL};

use crate::fem::{index_form, DiscreteForms, FemError};
use crate::sparse::{dense_mul, norm, SparseMatrix};
use eigen::{col, dense_pencil, smallest};

#[derive(Debug, Error, PartialEq)]
pub enum SpectraError {
    #[error("requested eigenvalue count must be at least 1")]
    EmptyRequest,
    #[error("the mesh has no boundary")]
    ClosedMesh,
    #[error("the mesh has no interior vertices")]
    NoInterior,
    #[error("eigensolver did not converge after {iterations} iterations (residuals {residuals:?})")]
    NotConverged { iterations: usize, residuals: Vec<f64> },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("Jacobi-Steklov problem is not well posed: first Dirichlet eigenvalue {dirichlet_lambda1}")]
    NotWellPosed { dirichlet_lambda1: f64 },
    #[error("Morse index needs a Robin spectrum")]
    NotRobin,
    #[error("all computed eigenvalues are negative (largest {largest}); request more to certify the index")]
    IndexUncertified { largest: f64 },
    #[error("boundary trace has length {got}, expected {expected}")]
    TraceLength { expected: usize, got: usize },
    #[error(transparent)]
    Fem(#[from] FemError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Robin,
    Dirichlet,
    Steklov,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Robin => "robin",
            Problem::Dirichlet => "dirichlet",
            Problem::Steklov => "steklov",
        }
    }
}

/// Consecutive eigenvalues within `1e-6 · max(1, |λ|)` of each other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub first: usize,
    pub multiplicity: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumResult {
    pub problem: Problem,
    pub eigenvalues: Vec<f64>,
    /// One full-length vertex vector per eigenvalue. Steklov vectors are the
    /// J-harmonic extensions of the boundary eigenvectors.
    pub eigenvectors: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub count_requested: usize,
    pub mesh_level: u32,
    pub h: f64,
    pub clusters: Vec<Cluster>,
}

/// The JSON view of a spectrum (eigenvectors omitted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDump {
    pub problem: Problem,
    pub level: u32,
    pub h: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<Cluster>,
}

impl SpectrumResult {
    fn new(problem: Problem, forms: &DiscreteForms, count: usize, pairs: eigen::Eigenpairs) -> Self {
        Self {
            problem,
            clusters: clusters(&pairs.values),
            eigenvalues: pairs.values,
            eigenvectors: pairs.vectors,
            residual_norms: pairs.residuals,
            count_requested: count,
            mesh_level: forms.level,
            h: forms.h,
        }
    }

    pub fn dump(&self) -> SpectrumDump {
        SpectrumDump {
            problem: self.problem,
            level: self.mesh_level,
            h: self.h,
            eigenvalues: self.eigenvalues.clone(),
            residuals: self.residual_norms.clone(),
            clusters: self.clusters.clone(),
        }
    }

    pub fn first(&self) -> f64 {
        self.eigenvalues[0]
    }
}

pub fn clusters(values: &[f64]) -> Vec<Cluster> {
    let mut out: Vec<Cluster> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(c) if (v - values[i - 1]).abs() <= 1e-6 * v.abs().max(1.0) => c.multiplicity += 1,
            _ => out.push(Cluster {
                first: i,
                multiplicity: 1,
                value: v,
            }),
        }
    }
    out
}

fn rayleigh_of_constant(a: &SparseMatrix, b: &SparseMatrix) -> f64 {
    let one = vec![1.0; a.nrows()];
    a.form(&one, &one) / b.form(&one, &one)
}

pub fn robin_spectrum(forms: &DiscreteForms, count: usize) -> Result<SpectrumResult, SpectraError> {
    if count == 0 {
        return Err(SpectraError::EmptyRequest);
    }
    let a = forms.jacobi();
    let shift = rayleigh_of_constant(&a, &forms.m) - 1.0;
    let pairs = smallest(&a, &forms.m, count, shift)?;
    Ok(SpectrumResult::new(Problem::Robin, forms, count, pairs))
}

/// Spectrum of the interior-restricted pencil `((K − P)ᵢᵢ, Mᵢᵢ)`. The
/// eigenvectors are padded with zeros on the boundary.
pub fn dirichlet_spectrum(forms: &DiscreteForms, count: usize) -> Result<SpectrumResult, SpectraError> {
    if count == 0 {
        return Err(SpectraError::EmptyRequest);
    }
    if forms.is_closed() {
        return Err(SpectraError::ClosedMesh);
    }
    let ii = &forms.interior_idx;
    if ii.is_empty() {
        return Err(SpectraError::NoInterior);
    }
    let a = forms.bulk().extract(ii, ii);
    let m = forms.m.extract(ii, ii);
    let shift = rayleigh_of_constant(&a, &m) - 1.0;
    let mut pairs = smallest(&a, &m, count, shift)?;
    pairs.vectors = pairs
        .vectors
        .into_iter()
        .map(|v| {
            let mut full = vec![0.0; forms.dim()];
            ii.iter().zip(v).for_each(|(&i, x)| full[i] = x);
            full
        })
        .collect();
    Ok(SpectrumResult::new(Problem::Dirichlet, forms, count, pairs))
}

/// Factorization of the interior block `Aᵢᵢ` of `A = K − P` together with
/// the coupling block `Aᵢ_b`.
struct InteriorSolver {
    llt: SparseLlt<usize, f64>,
    a_ib: SparseMatrix,
}

impl InteriorSolver {
    /// `None` when `Aᵢᵢ` is not positive definite, which happens exactly when
    /// the first discrete Dirichlet eigenvalue is not positive.
    fn new(forms: &DiscreteForms) -> Option<Self> {
        let a = forms.bulk();
        let (ii, bb) = (&forms.interior_idx, &forms.boundary_idx);
        let llt = a.extract(ii, ii).to_faer().sp_cholesky(Side::Lower).ok()?;
        Some(Self {
            llt,
            a_ib: a.extract(ii, bb),
        })
    }

    /// `Aᵢᵢ⁻¹ Aᵢ_b` as a dense `nᵢ × n_b` matrix.
    fn solve_coupling(&self) -> Mat<f64> {
        let mut z = self.a_ib.to_dense();
        self.llt.solve_in_place(z.as_mut());
        z
    }

    /// `−Aᵢᵢ⁻¹ Aᵢ_b t`.
    fn extend(&self, trace: &[f64]) -> Vec<f64> {
        let rhs = self.a_ib.mul_vec(trace);
        let mut z = Mat::from_fn(rhs.len(), 1, |i, _| -rhs[i]);
        self.llt.solve_in_place(z.as_mut());
        col(&z, 0)
    }
}

fn assemble_full(forms: &DiscreteForms, interior: &[f64], trace: &[f64]) -> Vec<f64> {
    let mut u = vec![0.0; forms.dim()];
    forms.interior_idx.iter().zip(interior).for_each(|(&i, &x)| u[i] = x);
    forms.boundary_idx.iter().zip(trace).for_each(|(&i, &x)| u[i] = x);
    u
}

/// Discrete Dirichlet-to-Neumann operator of `J` on the boundary vertices
/// (ordered as `forms.boundary_idx`).
#[derive(Clone, Debug)]
pub struct DtNMatrix {
    pub lambda_matrix: Option<Mat<f64>>,
    pub dirichlet_lambda1: f64,
    pub wellposed: bool,
}

impl DtNMatrix {
    /// `‖Λ − Λᵀ‖_F / ‖Λ‖_F`.
    pub fn symmetry_defect(&self) -> Option<f64> {
        let l = self.lambda_matrix.as_ref()?;
        let n = l.nrows();
        let (mut diff, mut total) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                diff += (l[(i, j)] - l[(j, i)]).powi(2);
                total += l[(i, j)].powi(2);
            }
        }
        Some((diff / total).sqrt())
    }
}

pub fn dtn_matrix(forms: &DiscreteForms) -> Result<DtNMatrix, SpectraError> {
    if forms.is_closed() {
        return Err(SpectraError::ClosedMesh);
    }
    let dirichlet_lambda1 = dirichlet_spectrum(forms, 1)?.first();
    if !(dirichlet_lambda1 > 0.0) {
        return Ok(DtNMatrix {
            lambda_matrix: None,
            dirichlet_lambda1,
            wellposed: false,
        });
    }
    let solver = InteriorSolver::new(forms).ok_or_else(|| {
        SpectraError::Factorization(format!(
            "interior block is indefinite although the Dirichlet eigenvalue is {dirichlet_lambda1}"
        ))
    })?;
    let bb = &forms.boundary_idx;
    let a = forms.bulk();
    let a_bb = a.extract(bb, bb).to_dense();
    let a_bi = a.extract(bb, &forms.interior_idx);
    let z = solver.solve_coupling();
    let mut lambda = a_bb;
    for k in 0..bb.len() {
        let azk = a_bi.mul_vec(&col(&z, k));
        for (j, v) in azk.into_iter().enumerate() {
            lambda[(j, k)] -= v;
        }
    }
    Ok(DtNMatrix {
        lambda_matrix: Some(lambda),
        dirichlet_lambda1,
        wellposed: true,
    })
}

/// `(Λ − Bw_bb) h = σ Mb_bb h` solved densely on the boundary.
pub fn steklov_spectrum(forms: &DiscreteForms, count: usize) -> Result<SpectrumResult, SpectraError> {
    let dtn = dtn_matrix(forms)?;
    steklov_from_dtn(forms, &dtn, count)
}

/// As [`steklov_spectrum`] with a precomputed DtN matrix.
pub fn steklov_from_dtn(
    forms: &DiscreteForms,
    dtn: &DtNMatrix,
    count: usize,
) -> Result<SpectrumResult, SpectraError> {
    if count == 0 {
        return Err(SpectraError::EmptyRequest);
    }
    let Some(lambda) = dtn.lambda_matrix.as_ref() else {
        return Err(SpectraError::NotWellPosed {
            dirichlet_lambda1: dtn.dirichlet_lambda1,
        });
    };
    let bb = &forms.boundary_idx;
    let nb = bb.len();
    let bw = forms.bw.extract(bb, bb).to_dense();
    let mb = forms.mb.extract(bb, bb).to_dense();
    let a = Mat::from_fn(nb, nb, |i, j| {
        0.5 * (lambda[(i, j)] + lambda[(j, i)]) - bw[(i, j)]
    });
    let (values, x) = dense_pencil(&a, &mb)?;
    let count = count.min(nb);
    let solver = InteriorSolver::new(forms)
        .ok_or_else(|| SpectraError::Factorization("interior block is indefinite".into()))?;
    let mut vectors = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    for k in 0..count {
        let h = col(&x, k);
        let ah = dense_mul(&a, &h);
        let mh = dense_mul(&mb, &h);
        let r: Vec<f64> = ah.iter().zip(&mh).map(|(p, q)| p - values[k] * q).collect();
        residuals.push(norm(&r) / norm(&mh));
        vectors.push(assemble_full(forms, &solver.extend(&h), &h));
    }
    let pairs = eigen::Eigenpairs {
        values: values[..count].to_vec(),
        vectors,
        residuals,
    };
    Ok(SpectrumResult::new(Problem::Steklov, forms, count, pairs))
}

/// Number of eigenvalues below `−gap_tol` with `gap_tol = 1e-6 · max(1, |λ₁|)`.
pub fn morse_index(result: &SpectrumResult) -> Result<usize, SpectraError> {
    let tol = 1e-6 * result.eigenvalues.first().map_or(1.0, |l| l.abs().max(1.0));
    morse_index_with_tol(result, tol)
}

pub fn morse_index_with_tol(result: &SpectrumResult, gap_tol: f64) -> Result<usize, SpectraError> {
    if result.problem != Problem::Robin {
        return Err(SpectraError::NotRobin);
    }
    let largest = *result.eigenvalues.last().ok_or(SpectraError::EmptyRequest)?;
    if largest < -gap_tol {
        return Err(SpectraError::IndexUncertified { largest });
    }
    Ok(result.eigenvalues.iter().filter(|&&l| l < -gap_tol).count())
}

/// J-harmonic extension of a boundary trace (ordered as
/// `forms.boundary_idx`) to a full vertex vector.
pub fn jharmonic_extension(forms: &DiscreteForms, trace: &[f64]) -> Result<Vec<f64>, SpectraError> {
    if forms.is_closed() {
        return Err(SpectraError::ClosedMesh);
    }
    if trace.len() != forms.boundary_idx.len() {
        return Err(SpectraError::TraceLength {
            expected: forms.boundary_idx.len(),
            got: trace.len(),
        });
    }
    let solver = InteriorSolver::new(forms).ok_or(SpectraError::NotWellPosed {
        dirichlet_lambda1: f64::NAN,
    })?;
    Ok(assemble_full(forms, &solver.extend(trace), trace))
}

/// `‖(K − P − Bw)u − λMu‖ / ‖Mu‖`.
pub fn eigen_equation_residual(forms: &DiscreteForms, u: &[f64], lambda: f64) -> Result<f64, SpectraError> {
    let ju = forms.jacobi().mul_vec(u);
    index_form(forms, u, u)?;
    let mu = forms.m.mul_vec(u);
    let r: Vec<f64> = ju.iter().zip(&mu).map(|(a, b)| a - lambda * b).collect();
    Ok(norm(&r) / norm(&mu))
}

#[cfg(test)]
mod tests;

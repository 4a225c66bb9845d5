//! Smallest eigenpairs of symmetric definite pencils `A x = λ B x`.

use faer::linalg::solvers::Solve;
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::sparse::linalg::solvers::Llt as SparseLlt;
use faer::{Mat, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SpectraError;
use crate::sparse::{dot, norm, SparseMatrix};

/// Pencils at or below this size are solved densely.
pub const DENSE_LIMIT: usize = 600;
/// Residual target `‖Ax − θBx‖ / ‖Bx‖ ≤ SOLVER_TOL · max(1, |θ|)`.
pub const SOLVER_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 10_000;

const SEED: u64 = 0x6a61_6373_7065_6300;

pub(crate) struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

pub(crate) fn residual(a: &SparseMatrix, b: &SparseMatrix, x: &[f64], theta: f64) -> f64 {
    let ax = a.mul_vec(x);
    let bx = b.mul_vec(x);
    let r: Vec<f64> = ax.iter().zip(&bx).map(|(p, q)| p - theta * q).collect();
    norm(&r) / norm(&bx)
}

pub(crate) fn col(m: &Mat<f64>, j: usize) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

/// Dense generalized solve through the Cholesky factor of `B`.
pub(crate) fn dense_pencil(a: &Mat<f64>, b: &Mat<f64>) -> Result<(Vec<f64>, Mat<f64>), SpectraError> {
    let n = a.nrows();
    let llt = b
        .llt(Side::Lower)
        .map_err(|e| SpectraError::Factorization(format!("mass matrix: {e:?}")))?;
    let l = llt.L();
    let mut c = a.to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let mut c = c.transpose().to_owned();
    solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SpectraError::Factorization(format!("eigendecomposition: {e:?}")))?;
    let values: Vec<f64> = (0..n).map(|i| eig.S()[i]).collect();
    let mut x = eig.U().to_owned();
    solve_upper_triangular_in_place(l.transpose(), x.as_mut(), Par::Seq);
    Ok((values, x))
}

fn dense_smallest(a: &SparseMatrix, b: &SparseMatrix, count: usize) -> Result<Eigenpairs, SpectraError> {
    let (values, x) = dense_pencil(&a.to_dense(), &b.to_dense())?;
    let count = count.min(values.len());
    let vectors: Vec<Vec<f64>> = (0..count).map(|j| col(&x, j)).collect();
    let residuals = vectors
        .iter()
        .zip(&values)
        .map(|(v, &t)| residual(a, b, v, t))
        .collect();
    Ok(Eigenpairs {
        values: values[..count].to_vec(),
        vectors,
        residuals,
    })
}

/// Factors `A − σB`, lowering `σ` until the shifted matrix is positive
/// definite. Success certifies `σ < λ₁`.
fn factor_below_spectrum(
    a: &SparseMatrix,
    b: &SparseMatrix,
    mut sigma: f64,
) -> Result<(f64, SparseLlt<usize, f64>), SpectraError> {
    let mut step = 1.0 + sigma.abs();
    for _ in 0..60 {
        let shifted = a.add_scaled(b, -sigma).to_faer();
        if let Ok(llt) = shifted.sp_cholesky(Side::Lower) {
            return Ok((sigma, llt));
        }
        sigma -= step;
        step *= 2.0;
    }
    Err(SpectraError::Factorization(
        "no shift below the spectrum was found".into(),
    ))
}

/// Rayleigh–Ritz on the span of the columns of `x`. Directions that are
/// numerically dependent in the `B` inner product are dropped.
fn rayleigh_ritz(a: &SparseMatrix, b: &SparseMatrix, x: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpectraError> {
    let p = x.len();
    let ax: Vec<Vec<f64>> = x.iter().map(|v| a.mul_vec(v)).collect();
    let bx: Vec<Vec<f64>> = x.iter().map(|v| b.mul_vec(v)).collect();
    let ar = Mat::from_fn(p, p, |i, j| 0.5 * (dot(&x[i], &ax[j]) + dot(&x[j], &ax[i])));
    let br = Mat::from_fn(p, p, |i, j| 0.5 * (dot(&x[i], &bx[j]) + dot(&x[j], &bx[i])));
    let eb = br
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SpectraError::Factorization(format!("Ritz basis: {e:?}")))?;
    let dmax = (0..p).map(|i| eb.S()[i]).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..p).filter(|&i| eb.S()[i] > 1e-13 * dmax).collect();
    let r = keep.len();
    // W = V D^{-1/2} restricted to the kept directions.
    let w = Mat::from_fn(p, r, |i, k| eb.U()[(i, keep[k])] / eb.S()[keep[k]].sqrt());
    let c = w.transpose() * &ar * &w;
    let c = Mat::from_fn(r, r, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let ec = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SpectraError::Factorization(format!("Ritz problem: {e:?}")))?;
    let coeff = &w * ec.U();
    let n = x[0].len();
    let vectors = (0..r)
        .map(|k| {
            let mut v = vec![0.0; n];
            for (j, xj) in x.iter().enumerate() {
                let c = coeff[(j, k)];
                v.iter_mut().zip(xj).for_each(|(vi, xi)| *vi += c * xi);
            }
            v
        })
        .collect();
    Ok(((0..r).map(|k| ec.S()[k]).collect(), vectors))
}

fn subspace_smallest(
    a: &SparseMatrix,
    b: &SparseMatrix,
    count: usize,
    shift: f64,
) -> Result<Eigenpairs, SpectraError> {
    let n = a.nrows();
    let p = (2 * count).max(count + 8).min(n);
    let (_, llt) = factor_below_spectrum(a, b, shift)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut x: Vec<Vec<f64>> = vec![vec![1.0; n]];
    while x.len() < p {
        x.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    let mut residuals = vec![f64::INFINITY; count];
    for _ in 0..MAX_ITERATIONS {
        let mut rhs = Mat::<f64>::zeros(n, x.len());
        for (j, v) in x.iter().enumerate() {
            let bv = b.mul_vec(v);
            for i in 0..n {
                rhs[(i, j)] = bv[i];
            }
        }
        llt.solve_in_place(rhs.as_mut());
        let y: Vec<Vec<f64>> = (0..rhs.ncols()).map(|j| col(&rhs, j)).collect();
        let (values, vectors) = rayleigh_ritz(a, b, &y)?;
        if values.len() < count {
            return Err(SpectraError::Factorization(
                "search space collapsed below the requested count".into(),
            ));
        }
        residuals = (0..count)
            .map(|k| residual(a, b, &vectors[k], values[k]))
            .collect();
        let done = residuals
            .iter()
            .zip(&values)
            .all(|(r, t)| *r <= SOLVER_TOL * t.abs().max(1.0));
        if done {
            return Ok(Eigenpairs {
                values: values[..count].to_vec(),
                vectors: vectors[..count].to_vec(),
                residuals,
            });
        }
        x = vectors;
        // Refill directions lost to rank deficiency.
        while x.len() < p {
            x.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
        }
    }
    Err(SpectraError::NotConverged {
        iterations: MAX_ITERATIONS,
        residuals,
    })
}

/// The `count` smallest eigenpairs of `(A, B)`, `B`-orthonormal.
/// `shift` is a starting guess for a point below the spectrum.
pub(crate) fn smallest(
    a: &SparseMatrix,
    b: &SparseMatrix,
    count: usize,
    shift: f64,
) -> Result<Eigenpairs, SpectraError> {
    if a.nrows() <= DENSE_LIMIT {
        dense_smallest(a, b, count)
    } else {
        subspace_smallest(a, b, count, shift)
    }
}

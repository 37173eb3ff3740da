//! Hermitian eigenvalue machinery: dense full spectra for small systems and
//! matrix-free Lanczos for extremal eigenvalues, plus eigenphases of
//! unitaries (needed for operator-norm identity distance).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::limits;
use crate::random::seeded_rng;

const HERMITICITY_TOL: f64 = 1e-10;

/// Outcome of an iterative extremal-eigenvalue run. `residual` is the
/// directly measured `||Hv - lambda*v||` of the returned Ritz pair,
/// recomputed once at exit.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Which end of the spectrum to chase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

fn check_hermitian(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let cap = 1usize << limits::max_hermitian_qubits();
    if m.nrows() > cap {
        return Err(Error::TooLarge {
            what: "matrix dimension",
            got: m.nrows(),
            limit: cap,
        });
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian { deviation: dev });
    }
    Ok(())
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues ascending with
/// matching eigenvector columns.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    check_hermitian(m)?;
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    Ok((values, vectors))
}

/// The full spectrum of a Hermitian matrix, ascending.
pub fn dense_spectrum(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.0)
}

/// Eigenphases of a unitary matrix, in `(-pi, pi]`, unsorted.
///
/// Uses the fact that `U` commutes with the Hermitian `A = (U + U†)/2`:
/// eigenspaces of `A` are `U`-invariant, and inside each one `U` is
/// `cos(theta)*I + i*B` with `B` Hermitian, so a second Hermitian
/// eigendecomposition splits the `±theta` branches.
pub fn unitary_eigenphases(u: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if u.nrows() != u.ncols() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            got: u.ncols(),
        });
    }
    let dim = u.nrows();
    let a = (u + u.adjoint()).scale(0.5);
    let (a_values, a_vectors) = hermitian_eigen(&a)?;

    let mut phases = Vec::with_capacity(dim);
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim && (a_values[end] - a_values[start]).abs() <= 1e-8 {
            end += 1;
        }
        let basis = a_vectors.columns(start, end - start);
        let w = basis.adjoint() * u * basis;
        if end - start == 1 {
            phases.push(w[(0, 0)].arg());
        } else {
            // Split the merged cos(theta) eigenspace by the sine part.
            let b = (&w - w.adjoint()).scale(0.5) * Complex64::new(0.0, -1.0);
            let (_, b_vectors) = hermitian_eigen(&b)?;
            let d = b_vectors.adjoint() * &w * &b_vectors;
            for k in 0..d.nrows() {
                phases.push(d[(k, k)].arg());
            }
        }
        start = end;
    }
    Ok(phases)
}

/// Matrix-free Lanczos with full reorthogonalization for one extremal
/// eigenvalue of a Hermitian operator given by its action.
///
/// Deterministic for a fixed `seed`: the start vector comes from a seeded
/// generator and the iteration itself has no other randomness. On
/// non-convergence the best estimate is returned with `converged = false`
/// rather than an error.
pub fn lanczos_extreme<F>(
    matvec: F,
    dim: usize,
    which: Extremum,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigResult>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    if dim < 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: dim,
        });
    }
    assert!(tol > 0.0, "tolerance must be positive");

    let mut rng = seeded_rng(seed);
    let mut q: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<Complex64>> = vec![q.clone()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();

    let apply = |v: &[Complex64]| -> Result<Vec<Complex64>> {
        let out = matvec(v);
        if out.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: out.len(),
            });
        }
        Ok(out)
    };

    let steps = max_iter.min(dim);
    let mut exhausted = false;
    for j in 0..steps {
        let mut w = apply(&basis[j])?;
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        axpy(&mut w, -Complex64::from(a), &basis[j]);
        if j > 0 {
            axpy(&mut w, -Complex64::from(beta[j - 1]), &basis[j - 1]);
        }
        // Full reorthogonalization keeps ghost copies of converged
        // eigenvalues out of the tridiagonal matrix.
        for qv in &basis {
            let overlap = dot(qv, &w);
            axpy(&mut w, -overlap, qv);
        }

        let (theta, ritz_small) = tridiagonal_extreme(&alpha, &beta, which);
        let b = crate::sim::norm(&w);

        // Cheap residual bound first; the true residual is recomputed at
        // exit on the assembled Ritz vector.
        let estimate = b * ritz_small.last().map_or(1.0, |c| c.abs());
        if estimate <= tol || b <= 1e-14 || j + 1 == steps {
            let v = assemble(&basis, &ritz_small);
            let residual = residual_norm(&apply(&v)?, theta, &v);
            if residual <= tol {
                return Ok(EigResult {
                    value: theta,
                    residual,
                    iterations: j + 1,
                    converged: true,
                });
            }
            if b <= 1e-14 {
                // Exact invariant subspace: the Krylov space cannot grow, so
                // this is as good as it gets.
                exhausted = true;
                break;
            }
        }

        if j + 1 < steps {
            beta.push(b);
            let mut next = w;
            for x in &mut next {
                *x /= b;
            }
            basis.push(next);
        }
    }

    let (theta, ritz_small) = tridiagonal_extreme(&alpha, &beta, which);
    let v = assemble(&basis, &ritz_small);
    let residual = residual_norm(&apply(&v)?, theta, &v);
    Ok(EigResult {
        value: theta,
        residual,
        iterations: alpha.len(),
        converged: exhausted && residual <= tol,
    })
}

/// Extremal eigenpair of the real symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`. Returns the eigenvalue and its
/// eigenvector in the Krylov basis.
fn tridiagonal_extreme(alpha: &[f64], beta: &[f64], which: Extremum) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i > 0 {
            t[(i, i - 1)] = beta[i - 1];
            t[(i - 1, i)] = beta[i - 1];
        }
    }
    let eig = t.symmetric_eigen();
    let mut best = 0;
    for i in 1..m {
        let better = match which {
            Extremum::Min => eig.eigenvalues[i] < eig.eigenvalues[best],
            Extremum::Max => eig.eigenvalues[i] > eig.eigenvalues[best],
        };
        if better {
            best = i;
        }
    }
    let vec: Vec<f64> = eig.eigenvectors.column(best).iter().copied().collect();
    (eig.eigenvalues[best], vec)
}

fn assemble(basis: &[Vec<Complex64>], coeffs: &[f64]) -> Vec<Complex64> {
    let dim = basis[0].len();
    let mut v = vec![Complex64::ZERO; dim];
    for (qv, &c) in basis.iter().zip(coeffs) {
        axpy(&mut v, Complex64::from(c), qv);
    }
    normalize(&mut v);
    v
}

fn residual_norm(hv: &[Complex64], theta: f64, v: &[Complex64]) -> f64 {
    hv.iter()
        .zip(v)
        .map(|(a, b)| (a - Complex64::from(theta) * b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    crate::sim::inner(a, b)
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [Complex64]) {
    let n = crate::sim::norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Dense matvec adapter for testing and for `eig --lanczos` on explicit
/// matrices.
pub fn dense_matvec(m: &DMatrix<Complex64>) -> impl Fn(&[Complex64]) -> Vec<Complex64> + '_ {
    move |v: &[Complex64]| {
        let x = DVector::from_column_slice(v);
        (m * x).iter().copied().collect()
    }
}

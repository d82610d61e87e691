//! Dense non-Hermitian eigendecomposition with verified residuals.
//!
//! The solver contract, not the algorithm, is what downstream code relies
//! on: full spectrum with right eigenvectors, per-mode relative residual
//! `‖Hv − Ev‖₂/‖H‖_F` below `tol_eig`, deterministic total ordering by
//! (detuning, decay), unit-normalized amplitudes with the largest component
//! rotated real-positive. The kernel behind it is faer's complex EVD, run
//! sequentially; parallelism belongs across sweep matrices, not inside one
//! decomposition.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors, EvdError};
use faer::{c64, Mat, MatRef, Par, Spec};
use num_complex::Complex64;

use crate::config::{CollectiveMode, ComplexEigenvalue};
use crate::error::{Error, Result};

/// Full eigendecomposition, modes sorted by detuning (ties by decay).
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub modes: Vec<CollectiveMode>,
    pub max_residual: f64,
}

fn frobenius_norm(m: MatRef<'_, c64>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].norm_sqr();
        }
    }
    acc.sqrt()
}

fn check_finite(matrix: MatRef<'_, c64>) -> Result<()> {
    for j in 0..matrix.ncols() {
        for i in 0..matrix.nrows() {
            let v = matrix[(i, j)];
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFinite(format!(
                    "matrix entry ({i}, {j}) = {v}"
                )));
            }
        }
    }
    Ok(())
}

fn raw_evd(
    matrix: MatRef<'_, c64>,
    vectors: bool,
) -> std::result::Result<(Diag<c64>, Option<Mat<c64>>), EvdError> {
    let n = matrix.nrows();
    let mut s = Diag::<c64>::zeros(n);
    let mut u = if vectors {
        Some(Mat::<c64>::zeros(n, n))
    } else {
        None
    };
    let compute = if vectors {
        ComputeEigenvectors::Yes
    } else {
        ComputeEigenvectors::No
    };
    let params = Spec::default();
    let mut buffer = MemBuffer::new(evd::evd_scratch::<c64>(
        n,
        ComputeEigenvectors::No,
        compute,
        Par::Seq,
        params,
    ));
    evd::evd_cplx(
        matrix,
        s.as_mut(),
        None,
        u.as_mut().map(|m| m.as_mut()),
        Par::Seq,
        MemStack::new(&mut buffer),
        params,
    )?;
    Ok((s, u))
}

/// Eigenvalues only, sorted by (detuning, decay). Cheaper than the full
/// decomposition; used by projection sweeps that never look at vectors.
pub fn eigenvalues(matrix: MatRef<'_, c64>) -> Result<Vec<ComplexEigenvalue>> {
    check_finite(matrix)?;
    let n = matrix.nrows();
    if n == 0 {
        return Err(Error::Config("matrix dimension must be >= 1".into()));
    }
    let (s, _) = raw_evd(matrix, false).map_err(|_| Error::EigenConvergence { dim: n })?;
    let mut vals: Vec<ComplexEigenvalue> = (0..n)
        .map(|i| ComplexEigenvalue::from_complex(s[i]))
        .collect();
    vals.sort_by(|a, b| {
        a.detuning
            .total_cmp(&b.detuning)
            .then(a.decay.total_cmp(&b.decay))
    });
    Ok(vals)
}

/// Full spectrum with right eigenvectors.
///
/// Fails — rather than returning unconverged modes — if the kernel does not
/// converge or any recomputed residual exceeds `tol_eig`.
pub fn eigendecompose(matrix: MatRef<'_, c64>, tol_eig: f64) -> Result<EigenResult> {
    check_finite(matrix)?;
    let n = matrix.nrows();
    if n == 0 {
        return Err(Error::Config("matrix dimension must be >= 1".into()));
    }
    let (s, u) = raw_evd(matrix, true).map_err(|_| Error::EigenConvergence { dim: n })?;
    let u = u.expect("vectors requested");
    let h_norm = frobenius_norm(matrix);

    let mut modes = Vec::with_capacity(n);
    let mut max_residual = 0.0f64;
    for idx in 0..n {
        let eig = s[idx];
        // unit normalization
        let norm = (0..n).map(|i| u[(i, idx)].norm_sqr()).sum::<f64>().sqrt();
        let mut amplitudes: Vec<Complex64> =
            (0..n).map(|i| Complex64::from(u[(i, idx)]) / norm).collect();
        // phase convention: rotate the largest-magnitude component to the
        // positive real axis (first index wins ties, deterministically)
        let mut arg_max = 0;
        let mut best = -1.0;
        for (i, a) in amplitudes.iter().enumerate() {
            let mag = a.norm_sqr();
            if mag > best {
                best = mag;
                arg_max = i;
            }
        }
        let pivot = amplitudes[arg_max];
        let mag = pivot.norm();
        let rotation = pivot.conj() / mag;
        for a in amplitudes.iter_mut() {
            *a *= rotation;
        }
        // the pivot itself maps to its magnitude exactly
        amplitudes[arg_max] = Complex64::new(mag, 0.0);

        let mut residual_sq = 0.0;
        for i in 0..n {
            let mut hv = Complex64::new(0.0, 0.0);
            for j in 0..n {
                hv += matrix[(i, j)] * amplitudes[j];
            }
            residual_sq += (hv - eig * amplitudes[i]).norm_sqr();
        }
        let residual = residual_sq.sqrt() / h_norm;
        if !residual.is_finite() || residual > tol_eig {
            return Err(Error::ResidualTooLarge {
                residual,
                tol: tol_eig,
            });
        }
        max_residual = max_residual.max(residual);

        modes.push(CollectiveMode {
            eigenvalue: ComplexEigenvalue::from_complex(eig),
            amplitudes,
            residual,
        });
    }

    modes.sort_by(|a, b| {
        a.eigenvalue
            .detuning
            .total_cmp(&b.eigenvalue.detuning)
            .then(a.eigenvalue.decay.total_cmp(&b.eigenvalue.decay))
    });
    Ok(EigenResult {
        modes,
        max_residual,
    })
}

/// Per-mode residual report recomputed from scratch.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// Indices of modes whose recomputed residual exceeds the tolerance.
    pub flagged: Vec<usize>,
}

/// Recompute `‖Hv − Ev‖₂/‖H‖_F` for every mode of `result`.
pub fn verify_residuals(
    matrix: MatRef<'_, c64>,
    result: &EigenResult,
    tol_eig: f64,
) -> Result<ResidualReport> {
    let n = matrix.nrows();
    if result.modes.iter().any(|m| m.amplitudes.len() != n) {
        return Err(Error::Config(
            "mode dimension does not match the matrix".into(),
        ));
    }
    let h_norm = frobenius_norm(matrix);
    let mut residuals = Vec::with_capacity(result.modes.len());
    let mut flagged = Vec::new();
    let mut max_residual = 0.0f64;
    for (idx, mode) in result.modes.iter().enumerate() {
        let eig = mode.eigenvalue.as_complex();
        let mut residual_sq = 0.0;
        for i in 0..n {
            let mut hv = Complex64::new(0.0, 0.0);
            for j in 0..n {
                hv += Complex64::from(matrix[(i, j)]) * mode.amplitudes[j];
            }
            residual_sq += (hv - eig * mode.amplitudes[i]).norm_sqr();
        }
        let residual = residual_sq.sqrt() / h_norm;
        if residual > tol_eig {
            flagged.push(idx);
        }
        max_residual = max_residual.max(residual);
        residuals.push(residual);
    }
    Ok(ResidualReport {
        residuals,
        max_residual,
        flagged,
    })
}

/// Smallest eigenvalue of the Hermitian decay matrix `Γ = i(M − M†)`.
///
/// Γ is positive semidefinite for any physical coupling matrix; this uses
/// the self-adjoint solver, a route independent of the non-Hermitian path.
pub fn decay_matrix_min_eigenvalue(h: MatRef<'_, c64>) -> Result<f64> {
    use faer::linalg::solvers::SelfAdjointEigen;
    let gamma = crate::hamiltonian::decay_matrix(h);
    let eig = SelfAdjointEigen::new(gamma.as_ref(), faer::Side::Lower)
        .map_err(|_| Error::EigenConvergence { dim: h.nrows() })?;
    let s = eig.S();
    Ok((0..s.dim())
        .map(|i| s[i].re)
        .fold(f64::INFINITY, f64::min))
}

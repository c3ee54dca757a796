//! Smallest nontrivial Laplacian eigenpairs: the unsupervised
//! maximum-likelihood initializer for the latent embedding.
//!
//! For a connected graph the Laplacian's smallest eigenvalue is 0 with the
//! constant eigenvector; the useful embedding starts at the second-smallest
//! pair. Everything here excludes that trivial pair, returns unit-norm,
//! column-centered eigenvectors, and fixes signs (first entry above 1e-9 in
//! magnitude is positive) so serialized output is reproducible.

mod lanczos;
mod sym_eig;

use ndarray::Array2;
use thiserror::Error;

use crate::graph::Laplacian;

pub use sym_eig::symmetric_eig;

/// Dense solve below this size; Lanczos above.
pub const DENSE_CUTOFF: usize = 512;

/// Upper bound for the full-spectrum oracle.
pub const ORACLE_MAX_N: usize = 2000;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("k={k} too large: a graph on {n} nodes has {max} nontrivial eigenpairs")]
    KTooLarge { k: usize, n: usize, max: usize },
    #[error("graph is not connected; the trivial eigenspace is degenerate")]
    NotConnected,
    #[error("n={n} too large for the dense oracle (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("column {col} is not centered (|sum| = {sum:.3e})")]
    ColumnNotCentered { col: usize, sum: f64 },
    #[error("column {col} is not unit-norm (norm = {norm})")]
    ColumnNotUnitNorm { col: usize, norm: f64 },
    #[error("eigeniteration failed to converge at index {index}")]
    NoConvergence { index: usize },
}

/// The k smallest nontrivial eigenpairs of a graph Laplacian.
///
/// Columns of `vectors` are unit-norm, centered (orthogonal to the constant
/// vector), and sign-fixed; `eigenvalues` ascend.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub eigenvalues: Vec<f64>,
    pub vectors: Array2<f64>,
}

/// Solver selection for [`smallest_nontrivial_eigs_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigStrategy {
    /// Dense below [`DENSE_CUTOFF`], Lanczos otherwise.
    Auto,
    Dense,
    Lanczos,
}

/// The k smallest eigenpairs of `lap`, excluding the trivial constant
/// eigenvector, with the default solver strategy.
pub fn smallest_nontrivial_eigs(lap: &Laplacian, k: usize) -> Result<SpectralBasis, SpectralError> {
    smallest_nontrivial_eigs_with(lap, k, EigStrategy::Auto)
}

/// As [`smallest_nontrivial_eigs`] with an explicit solver choice. Both
/// routes satisfy the same contract; tests compare them against each other
/// and against the dense oracle.
pub fn smallest_nontrivial_eigs_with(
    lap: &Laplacian,
    k: usize,
    strategy: EigStrategy,
) -> Result<SpectralBasis, SpectralError> {
    let n = lap.n();
    if n == 0 || k > n - 1 {
        return Err(SpectralError::KTooLarge {
            k,
            n,
            max: n.saturating_sub(1),
        });
    }
    if !lap.is_connected() {
        return Err(SpectralError::NotConnected);
    }

    let (vals, vecs) = match strategy {
        EigStrategy::Dense => dense_nontrivial(lap, k)?,
        EigStrategy::Lanczos => lanczos::lanczos_smallest(lap, k)?,
        EigStrategy::Auto => {
            if n <= DENSE_CUTOFF {
                dense_nontrivial(lap, k)?
            } else {
                lanczos::lanczos_smallest(lap, k)?
            }
        }
    };

    Ok(finalize_basis(vals, vecs))
}

fn dense_nontrivial(lap: &Laplacian, k: usize) -> Result<(Vec<f64>, Array2<f64>), SpectralError> {
    let dense = lap.to_dense().map_err(|_| SpectralError::TooLarge {
        n: lap.n(),
        limit: crate::graph::MAX_DENSE_N,
    })?;
    let (all_vals, all_vecs) = symmetric_eig(&dense)?;
    // Connectedness was checked structurally; the zero eigenvalue has
    // multiplicity one, so pairs 1..=k are the nontrivial ones.
    let vals = all_vals[1..=k].to_vec();
    let vecs = all_vecs.slice(ndarray::s![.., 1..=k]).to_owned();
    Ok((vals, vecs))
}

/// Center, normalize, and sign-fix eigenvector columns. Centering against
/// the constant vector is exact in the connected case (the vectors are
/// already orthogonal to it up to roundoff).
fn finalize_basis(vals: Vec<f64>, mut vecs: Array2<f64>) -> SpectralBasis {
    let n = vecs.nrows();
    for mut col in vecs.columns_mut() {
        let mean = col.sum() / n as f64;
        col.mapv_inplace(|x| x - mean);
        let norm = col.dot(&col).sqrt();
        if norm > 0.0 {
            col.mapv_inplace(|x| x / norm);
        }
        let flip = col
            .iter()
            .find(|x| x.abs() > 1e-9)
            .is_some_and(|&x| x < 0.0);
        if flip {
            col.mapv_inplace(|x| -x);
        }
    }
    SpectralBasis {
        eigenvalues: vals,
        vectors: vecs,
    }
}

/// Full spectrum of the Laplacian by the in-repo dense symmetric solver.
/// Test oracle; refuses n above [`ORACLE_MAX_N`].
pub fn dense_eig_oracle(lap: &Laplacian) -> Result<(Vec<f64>, Array2<f64>), SpectralError> {
    let n = lap.n();
    if n > ORACLE_MAX_N {
        return Err(SpectralError::TooLarge {
            n,
            limit: ORACLE_MAX_N,
        });
    }
    let dense = lap.to_dense().map_err(|_| SpectralError::TooLarge {
        n,
        limit: ORACLE_MAX_N,
    })?;
    symmetric_eig(&dense)
}

/// Quadratic form `tr(U^T L U)`, evaluated edge-wise as the sum of squared
/// embedding distances across edges. Requires centered, unit-norm columns
/// (the constraint surface of the spectral initializer).
pub fn embedding_energy(u: &Array2<f64>, lap: &Laplacian) -> Result<f64, SpectralError> {
    let n = lap.n();
    if u.nrows() != n {
        return Err(SpectralError::ShapeMismatch(format!(
            "U has {} rows but the graph has {} nodes",
            u.nrows(),
            n
        )));
    }
    for (c, col) in u.columns().into_iter().enumerate() {
        let sum = col.sum();
        if sum.abs() > 1e-6 * (n as f64).sqrt() {
            return Err(SpectralError::ColumnNotCentered { col: c, sum });
        }
        let norm = col.dot(&col).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(SpectralError::ColumnNotUnitNorm { col: c, norm });
        }
    }

    let mut y = vec![0.0; n];
    let mut energy = 0.0;
    let mut x = vec![0.0; n];
    for col in u.columns() {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = col[i];
        }
        lap.matvec(&x, &mut y);
        energy += x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
    }
    Ok(energy)
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases of equal shape. Used to compare eigenspaces when
/// eigenvalues are (near-)degenerate.
pub fn max_principal_angle(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64, SpectralError> {
    if a.dim() != b.dim() {
        return Err(SpectralError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.dim(),
            b.dim()
        )));
    }
    let m = a.t().dot(b);
    let mtm = m.t().dot(&m);
    let (vals, _) = symmetric_eig(&mtm)?;
    // cos^2 of the largest angle is the smallest eigenvalue of M^T M.
    let cos2 = vals.first().copied().unwrap_or(1.0).clamp(0.0, 1.0);
    Ok(cos2.sqrt().acos())
}

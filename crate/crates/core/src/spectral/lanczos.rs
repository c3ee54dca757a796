//! Lanczos iteration for the smallest nontrivial Laplacian eigenpairs.
//!
//! The iteration runs in the orthogonal complement of the constant vector
//! (the trivial eigenvector of a connected graph's Laplacian), so the
//! returned Ritz pairs are the smallest *nontrivial* ones directly. Full
//! reorthogonalization keeps the basis clean; on breakdown (invariant
//! subspace hit, e.g. highly degenerate spectra) the iteration restarts
//! with a fresh deflated random vector so multiple eigenvectors per
//! eigenvalue are still recovered.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sym_eig::tridiagonal_eig;
use super::SpectralError;
use crate::graph::Laplacian;

/// Internal seed for the starting vector; the solver is a deterministic
/// function of its inputs.
const START_SEED: u64 = 0x1a2b_3c4d_5e6f_7081;

const BREAKDOWN_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;

fn project_out_constant(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Draw a random vector orthogonal to the constant vector and to every
/// column in `basis`, unit-normalized. Retries if the projection
/// annihilates the draw; `None` once the complement is exhausted.
fn fresh_deflated_vector(n: usize, basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    for _ in 0..32 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            project_out_constant(&mut v);
            for b in basis {
                let c = dot(&v, b);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            for x in v.iter_mut() {
                *x /= nv;
            }
            return Some(v);
        }
    }
    None
}

/// Compute the `k` smallest eigenpairs of `lap` restricted to the
/// complement of the constant vector. Eigenvalues come back ascending with
/// matching eigenvector columns; Ritz residuals are driven below
/// `1e-9 * max(1, lambda)` (exact once the complement is exhausted).
pub fn lanczos_smallest(
    lap: &Laplacian,
    k: usize,
) -> Result<(Vec<f64>, Array2<f64>), SpectralError> {
    let n = lap.n();
    let max_dim = n - 1; // dimension of the deflated subspace
    assert!(k >= 1 && k <= max_dim);

    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new(); // betas[j] couples basis[j], basis[j+1]
                                          // Residual vector of the last completed step with its norm, kept so the
                                          // factorization can be extended after a convergence test.
    let mut pending: Option<(Vec<f64>, f64)> = None;

    basis.push(
        fresh_deflated_vector(n, &basis, &mut rng)
            .ok_or(SpectralError::NoConvergence { index: 0 })?,
    );

    let mut steps_target = (2 * k + 16).clamp(1, max_dim);
    let mut scratch = vec![0.0; n];

    loop {
        // Run Lanczos steps until `steps_target` basis vectors all have
        // diagonal entries.
        while alphas.len() < basis.len() {
            let j = alphas.len();
            lap.matvec(&basis[j], &mut scratch);
            let mut w = scratch.clone();
            project_out_constant(&mut w);

            let alpha = dot(&basis[j], &w);
            alphas.push(alpha);

            for (x, y) in w.iter_mut().zip(&basis[j]) {
                *x -= alpha * y;
            }
            if j > 0 {
                let beta_prev = betas[j - 1];
                for (x, y) in w.iter_mut().zip(&basis[j - 1]) {
                    *x -= beta_prev * y;
                }
            }
            // Full reorthogonalization, two passes.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    for (x, y) in w.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
                project_out_constant(&mut w);
            }
            let beta = norm(&w);

            if basis.len() < steps_target {
                if beta > BREAKDOWN_TOL {
                    for x in w.iter_mut() {
                        *x /= beta;
                    }
                    betas.push(beta);
                    basis.push(w);
                } else {
                    match fresh_deflated_vector(n, &basis, &mut rng) {
                        Some(v) => {
                            betas.push(0.0);
                            basis.push(v);
                        }
                        None => {
                            pending = Some((w, 0.0));
                            break;
                        }
                    }
                }
            } else {
                pending = Some((w, beta));
            }
        }

        let m = alphas.len();
        let (tvals, tvecs) = tridiagonal_eig(&alphas, &betas[..m - 1])?;

        let beta_last = pending.as_ref().map_or(0.0, |p| p.1);
        let exhausted = m >= max_dim;
        let converged = (0..k).all(|i| {
            (beta_last * tvecs[(m - 1, i)]).abs() <= RESIDUAL_TOL * tvals[i].abs().max(1.0)
        });

        if converged || exhausted {
            let mut vals = Vec::with_capacity(k);
            let mut vecs = Array2::zeros((n, k));
            for i in 0..k {
                vals.push(tvals[i]);
                for (j, b) in basis.iter().enumerate() {
                    let s = tvecs[(j, i)];
                    if s != 0.0 {
                        for r in 0..n {
                            vecs[(r, i)] += s * b[r];
                        }
                    }
                }
            }
            return Ok((vals, vecs));
        }

        // Extend the factorization and try again.
        steps_target = (steps_target * 2).min(max_dim);
        let (mut w, beta) = pending.take().expect("unconverged without residual");
        if beta > BREAKDOWN_TOL {
            for x in w.iter_mut() {
                *x /= beta;
            }
            betas.push(beta);
            basis.push(w);
        } else {
            match fresh_deflated_vector(n, &basis, &mut rng) {
                Some(v) => {
                    betas.push(0.0);
                    basis.push(v);
                }
                None => {
                    return Err(SpectralError::NoConvergence { index: k });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn path_graph_spectrum() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (vals, _) = lanczos_smallest(&g.laplacian(), 2).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-9);
        assert!((vals[1] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn complete_graph_degenerate_spectrum() {
        // K4 deflated spectrum is {4, 4, 4}; needs breakdown restarts.
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((i, j));
            }
        }
        let g = Graph::from_edges(4, &edges).unwrap();
        let (vals, vecs) = lanczos_smallest(&g.laplacian(), 2).unwrap();
        assert!((vals[0] - 4.0).abs() < 1e-9);
        assert!((vals[1] - 4.0).abs() < 1e-9);
        // Columns orthonormal and centered.
        for c in 0..2 {
            let col: Vec<f64> = (0..4).map(|r| vecs[(r, c)]).collect();
            assert!((norm(&col) - 1.0).abs() < 1e-9);
            assert!(col.iter().sum::<f64>().abs() < 1e-9);
        }
        let c0: Vec<f64> = (0..4).map(|r| vecs[(r, 0)]).collect();
        let c1: Vec<f64> = (0..4).map(|r| vecs[(r, 1)]).collect();
        assert!(dot(&c0, &c1).abs() < 1e-9);
    }

    #[test]
    fn residuals_small_on_random_graph() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i, (i + 1) % n)); // ring keeps it connected
            for j in i + 2..n {
                if rng.gen_bool(0.08) {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let lap = g.laplacian();
        let k = 5;
        let (vals, vecs) = lanczos_smallest(&lap, k).unwrap();
        let mut y = vec![0.0; n];
        for c in 0..k {
            let x: Vec<f64> = (0..n).map(|r| vecs[(r, c)]).collect();
            lap.matvec(&x, &mut y);
            let resid: f64 = y
                .iter()
                .zip(&x)
                .map(|(lv, v)| (lv - vals[c] * v).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(resid < 1e-8 * vals[c].max(1.0), "resid = {resid}");
        }
    }

    #[test]
    fn needs_extension_beyond_first_target() {
        // Large enough ring that 2k+16 steps are not exact, exercising the
        // extension path.
        let n = 120;
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let g = Graph::from_edges(n, &edges).unwrap();
        let lap = g.laplacian();
        let (vals, _) = lanczos_smallest(&lap, 2).unwrap();
        // Ring eigenvalues: 2 - 2 cos(2 pi m / n), smallest nontrivial is
        // doubly degenerate at m = 1.
        let want = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / n as f64).cos();
        assert!((vals[0] - want).abs() < 1e-9);
        assert!((vals[1] - want).abs() < 1e-9);
    }
}

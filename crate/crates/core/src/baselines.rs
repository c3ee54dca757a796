//! Label propagation baseline: iterate the row-stochastic diffusion
//! `F <- D^{-1} A F` with labeled rows clamped to their one-hot vectors,
//! until the largest per-entry change drops below tolerance.

use ndarray::Array2;
use thiserror::Error;

use crate::classifier::argmax_rows;
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("no labeled nodes provided")]
    NoLabels,
    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone)]
pub struct LpConfig {
    pub max_iters: usize,
    /// Convergence threshold on the max per-entry distribution change.
    pub tol: f64,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            max_iters: 1000,
            tol: 1e-6,
        }
    }
}

/// Outcome of a propagation run. Nodes in components with no labeled node
/// keep a uniform distribution and tie-break to class 0; they are listed in
/// `unreached` so callers can warn.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub labels: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub unreached: Vec<usize>,
    /// Final per-node class distributions (rows sum to 1).
    pub distributions: Array2<f64>,
}

/// Propagate the known labels in `y` over the graph. Deterministic;
/// argmax ties break to the lowest class index.
pub fn label_propagation(
    g: &Graph,
    y: &[Option<usize>],
    num_classes: usize,
    cfg: &LpConfig,
) -> Result<LpOutcome, BaselineError> {
    if cfg.max_iters < 1 || cfg.tol <= 0.0 || cfg.tol.is_nan() {
        return Err(BaselineError::InvalidConfig(format!(
            "max_iters={} tol={}",
            cfg.max_iters, cfg.tol
        )));
    }
    let n = g.n();
    assert_eq!(y.len(), n, "label vector length must match node count");
    let labeled: Vec<(usize, usize)> = y
        .iter()
        .enumerate()
        .filter_map(|(i, l)| l.map(|c| (i, c)))
        .collect();
    if labeled.is_empty() {
        return Err(BaselineError::NoLabels);
    }
    for &(_, c) in &labeled {
        if c >= num_classes {
            return Err(BaselineError::LabelOutOfRange {
                label: c,
                num_classes,
            });
        }
    }

    let uniform = 1.0 / num_classes as f64;
    let mut f = Array2::from_elem((n, num_classes), uniform);
    for &(i, c) in &labeled {
        for v in f.row_mut(i).iter_mut() {
            *v = 0.0;
        }
        f[(i, c)] = 1.0;
    }

    let mut next = f.clone();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iters {
        iterations += 1;
        let mut max_change = 0.0f64;
        for i in 0..n {
            if y[i].is_some() {
                continue; // clamped
            }
            let neighbors = g.neighbors(i);
            if neighbors.is_empty() {
                continue; // no mass arrives; row stays as-is
            }
            let inv_deg = 1.0 / neighbors.len() as f64;
            for c in 0..num_classes {
                let mut sum = 0.0;
                for &j in neighbors {
                    sum += f[(j as usize, c)];
                }
                let value = sum * inv_deg;
                max_change = max_change.max((value - f[(i, c)]).abs());
                next[(i, c)] = value;
            }
        }
        for i in 0..n {
            if y[i].is_none() && !g.neighbors(i).is_empty() {
                for c in 0..num_classes {
                    f[(i, c)] = next[(i, c)];
                }
            }
        }
        if max_change < cfg.tol {
            converged = true;
            break;
        }
    }

    // Nodes in components without any labeled node never receive signal.
    let mut reachable = vec![false; n];
    let mut queue: std::collections::VecDeque<usize> = labeled.iter().map(|&(i, _)| i).collect();
    for &(i, _) in &labeled {
        reachable[i] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            let w = w as usize;
            if !reachable[w] {
                reachable[w] = true;
                queue.push_back(w);
            }
        }
    }
    let unreached: Vec<usize> = (0..n).filter(|&i| !reachable[i]).collect();

    Ok(LpOutcome {
        labels: argmax_rows(&f),
        iterations,
        converged,
        unreached,
        distributions: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_tie_breaks_to_lower_class() {
        // Ends labeled with different classes; the middle node converges to
        // an exact 0.5/0.5 tie and takes the lower class index.
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let y = vec![Some(0), None, Some(1)];
        let out = label_propagation(&g, &y, 2, &LpConfig::default()).unwrap();
        assert_eq!(out.labels, vec![0, 0, 1]);
        assert!((out.distributions[(1, 0)] - 0.5).abs() < 1e-9);
        assert!(out.converged);
    }

    #[test]
    fn fully_labeled_graph_echoes_input() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let y = vec![Some(1), Some(0), Some(1), Some(0)];
        let out = label_propagation(&g, &y, 2, &LpConfig::default()).unwrap();
        assert_eq!(out.labels, vec![1, 0, 1, 0]);
    }

    #[test]
    fn two_cliques_adopt_their_labels() {
        // Two 4-cliques joined by one edge, one label in each.
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((i, j));
                edges.push((i + 4, j + 4));
            }
        }
        edges.push((3, 4));
        let g = Graph::from_edges(8, &edges).unwrap();
        let mut y = vec![None; 8];
        y[0] = Some(0);
        y[7] = Some(1);
        let out = label_propagation(&g, &y, 2, &LpConfig::default()).unwrap();
        assert_eq!(&out.labels[..4], &[0, 0, 0, 0]);
        assert_eq!(&out.labels[4..], &[1, 1, 1, 1]);
    }

    #[test]
    fn empty_label_set_rejected() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let y = vec![None, None, None];
        assert!(matches!(
            label_propagation(&g, &y, 2, &LpConfig::default()),
            Err(BaselineError::NoLabels)
        ));
    }

    #[test]
    fn label_free_component_reported_and_defaults_to_class_zero() {
        let g = Graph::from_edges(5, &[(0, 1), (2, 3), (3, 4)]).unwrap();
        let y = vec![Some(1), None, None, None, None];
        let out = label_propagation(&g, &y, 2, &LpConfig::default()).unwrap();
        assert_eq!(out.unreached, vec![2, 3, 4]);
        assert_eq!(out.labels[2], 0);
        assert_eq!(out.labels[1], 1);
    }

    #[test]
    fn rows_stay_stochastic() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let n = 20;
        let mut edges = vec![];
        for i in 0..n {
            edges.push((i, (i + 1) % n));
            for j in i + 2..n {
                if rng.gen_bool(0.1) {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let mut y = vec![None; n];
        y[0] = Some(0);
        y[5] = Some(1);
        y[11] = Some(2);
        let out = label_propagation(&g, &y, 3, &LpConfig::default()).unwrap();
        for r in out.distributions.rows() {
            assert!((r.sum() - 1.0).abs() <= 1e-9);
            assert!(r.iter().all(|&p| p >= 0.0));
        }
    }

    #[test]
    fn fixed_point_is_stable_under_more_iterations() {
        let mut edges = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((i, j));
            }
        }
        edges.push((4, 5));
        edges.push((5, 6));
        let g = Graph::from_edges(7, &edges).unwrap();
        let mut y = vec![None; 7];
        y[0] = Some(0);
        y[6] = Some(1);
        let tight = LpConfig {
            max_iters: 100_000,
            tol: 1e-13,
        };
        let out1 = label_propagation(&g, &y, 2, &tight).unwrap();
        let more = LpConfig {
            max_iters: 200_000,
            tol: 1e-14,
        };
        let out2 = label_propagation(&g, &y, 2, &more).unwrap();
        assert_eq!(out1.labels, out2.labels);
        for (a, b) in out1.distributions.iter().zip(out2.distributions.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

//! The generative framework: latent positions produce edges through a
//! squared-distance kernel, and a configurable mixing knob decides whether
//! class labels are carried by the observed features, the latent features,
//! or both. Also owns the dataset container and split logic.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

/// Distance between adjacent class means on the first informative
/// coordinate of each block. Chosen so a linear probe on one informative
/// block alone clears 90% accuracy while sampled graphs stay connected at
/// generation scale 1.
pub const CLASS_MEAN_SEPARATION: f64 = 5.0;

/// Extra separation per additional informative coordinate within a block
/// (coordinate `i` uses spacing `SEPARATION * (1 + i * STAGGER)`). Unequal
/// spacings keep the sampled graph's community couplings asymmetric, so
/// the leading Laplacian eigenvalues stay simple and well-ordered; equal
/// spacings create a near-degenerate pair whose basis can rotate per seed.
pub const CLASS_MEAN_STAGGER: f64 = 0.05;

#[derive(Debug, Error)]
pub enum GenModelError {
    #[error("scale_sq must be strictly positive and finite, got {0}")]
    NonPositiveScale(f64),
    #[error("latent matrix contains a non-finite entry")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("invalid split fractions: {0}")]
    InvalidFraction(String),
}

/// Current latent embedding estimate plus the kernel scale.
#[derive(Debug, Clone)]
pub struct LatentState {
    pub u: Array2<f64>,
    pub scale_sq: f64,
}

impl LatentState {
    pub fn new(u: Array2<f64>, scale_sq: f64) -> Result<Self, GenModelError> {
        if !(scale_sq > 0.0 && scale_sq.is_finite()) {
            return Err(GenModelError::NonPositiveScale(scale_sq));
        }
        if u.iter().any(|x| !x.is_finite()) {
            return Err(GenModelError::NonFinite);
        }
        Ok(LatentState { u, scale_sq })
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn k(&self) -> usize {
        self.u.ncols()
    }
}

/// Synthetic benchmark generator configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SynthConfig {
    /// Node count.
    pub n: usize,
    /// Observed feature count.
    pub d: usize,
    /// Latent feature count.
    pub k: usize,
    /// Class count.
    pub num_classes: usize,
    /// Label influence: 0 = labels carried by latent features only,
    /// 1 = by observed features only, 0.5 = first coordinate of each.
    pub alpha: f64,
    /// Kernel scale used when sampling the graph.
    pub scale_sq_gen: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n: 200,
            d: 2,
            k: 2,
            num_classes: 4,
            alpha: 0.5,
            scale_sq_gen: 1.0,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), GenModelError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(GenModelError::InvalidConfig(format!(
                "alpha must be in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.num_classes < 2 {
            return Err(GenModelError::InvalidConfig(format!(
                "need at least 2 classes, got {}",
                self.num_classes
            )));
        }
        if self.n < self.num_classes {
            return Err(GenModelError::InvalidConfig(format!(
                "n={} smaller than class count {}",
                self.n, self.num_classes
            )));
        }
        if self.d < 1 || self.k < 1 {
            return Err(GenModelError::InvalidConfig(format!(
                "d={} and k={} must both be at least 1",
                self.d, self.k
            )));
        }
        if !(self.scale_sq_gen > 0.0 && self.scale_sq_gen.is_finite()) {
            return Err(GenModelError::NonPositiveScale(self.scale_sq_gen));
        }
        Ok(())
    }
}

/// Attributed-graph dataset: observed features, (partially known) labels,
/// and transductive splits. `true_u` is the generator's latent matrix,
/// kept for diagnostics only; training code must not read it.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Vec<Option<usize>>,
    pub num_classes: usize,
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
    pub true_u: Option<Array2<f64>>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// `(node, label)` pairs for the indices in `idx` that carry a label.
    pub fn labeled_on(&self, idx: &[usize]) -> Vec<(usize, usize)> {
        idx.iter()
            .filter_map(|&i| self.y[i].map(|c| (i, c)))
            .collect()
    }

    /// Splits must be pairwise disjoint, in range, and every train/val
    /// member must carry a label.
    pub fn validate_splits(&self) -> Result<(), GenModelError> {
        let n = self.n();
        let mut seen = vec![false; n];
        for (name, split) in [
            ("train", &self.train),
            ("val", &self.val),
            ("test", &self.test),
        ] {
            for &i in split.iter() {
                if i >= n {
                    return Err(GenModelError::InvalidConfig(format!(
                        "{name} split references node {i} but n={n}"
                    )));
                }
                if seen[i] {
                    return Err(GenModelError::InvalidConfig(format!(
                        "node {i} appears in more than one split"
                    )));
                }
                seen[i] = true;
            }
        }
        for (name, split) in [("train", &self.train), ("val", &self.val)] {
            for &i in split.iter() {
                if self.y[i].is_none() {
                    return Err(GenModelError::InvalidConfig(format!(
                        "{name} node {i} has no label"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Edge probability `exp(-||a - b||^2 / scale_sq)`, symmetric in its
/// arguments and in (0, 1].
pub fn edge_prob(a: &[f64], b: &[f64], scale_sq: f64) -> Result<f64, GenModelError> {
    if !(scale_sq > 0.0 && scale_sq.is_finite()) {
        return Err(GenModelError::NonPositiveScale(scale_sq));
    }
    if a.len() != b.len() {
        return Err(GenModelError::ShapeMismatch(format!(
            "latent vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok((-squared_distance(a, b) / scale_sq).exp())
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn row(u: &Array2<f64>, i: usize) -> &[f64] {
    u.row(i).to_slice().expect("row-major latent matrix")
}

/// Sample a graph: each unordered pair is an edge independently with its
/// kernel probability. One uniform draw per pair in a fixed pair order, so
/// the result is a deterministic function of the RNG state.
pub fn sample_graph<R: Rng>(state: &LatentState, rng: &mut R) -> Graph {
    let n = state.n();
    let mut edges = Vec::new();
    for i in 0..n {
        let ui = row(&state.u, i);
        for j in (i + 1)..n {
            let p = (-squared_distance(ui, row(&state.u, j)) / state.scale_sq).exp();
            let draw: f64 = rng.gen();
            if draw < p {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, &edges).expect("sampled pairs are valid")
}

/// Log-probability of the observed adjacency under the latent state:
/// sum of `ln p` over edges plus `ln(1 - p)` over non-edges. Returns
/// `-inf` when some pair has probability exactly 0 or 1 on the wrong side
/// (the state genuinely assigns the graph probability zero).
pub fn log_likelihood_adjacency(g: &Graph, state: &LatentState) -> Result<f64, GenModelError> {
    check_graph_state(g, state)?;
    let n = g.n();
    let mut ll = 0.0;
    for i in 0..n {
        let ui = row(&state.u, i);
        let mut neighbors = g.neighbors(i).iter().peekable();
        for j in (i + 1)..n {
            let p = (-squared_distance(ui, row(&state.u, j)) / state.scale_sq).exp();
            while neighbors.peek().is_some_and(|&&v| (v as usize) < j) {
                neighbors.next();
            }
            let is_edge = neighbors.peek().is_some_and(|&&v| v as usize == j);
            ll += if is_edge { p.ln() } else { (-p).ln_1p() };
            if ll == f64::NEG_INFINITY {
                return Ok(f64::NEG_INFINITY);
            }
        }
    }
    Ok(ll)
}

/// Tractable upper-bound surrogate for the adjacency negative
/// log-likelihood: squared distances over edges (scaled) plus the kernel
/// value over non-edges. This is the quantity the trainer descends.
pub fn surrogate_adjacency_nll(g: &Graph, state: &LatentState) -> Result<f64, GenModelError> {
    check_graph_state(g, state)?;
    let n = g.n();
    let mut total = 0.0;
    for i in 0..n {
        let ui = row(&state.u, i);
        let mut neighbors = g.neighbors(i).iter().peekable();
        for j in (i + 1)..n {
            let d2 = squared_distance(ui, row(&state.u, j));
            while neighbors.peek().is_some_and(|&&v| (v as usize) < j) {
                neighbors.next();
            }
            let is_edge = neighbors.peek().is_some_and(|&&v| v as usize == j);
            total += if is_edge {
                d2 / state.scale_sq
            } else {
                (-d2 / state.scale_sq).exp()
            };
        }
    }
    Ok(total)
}

fn check_graph_state(g: &Graph, state: &LatentState) -> Result<(), GenModelError> {
    if g.n() != state.n() {
        return Err(GenModelError::ShapeMismatch(format!(
            "graph has {} nodes, latent matrix has {} rows",
            g.n(),
            state.n()
        )));
    }
    Ok(())
}

/// Per-coordinate layout of the informative (label-carrying) features.
#[derive(Debug, Clone)]
struct InformativeLayout {
    /// Informative coordinate count in the latent block.
    c_u: usize,
    /// Informative coordinate count in the observed block.
    c_x: usize,
    /// Number of distinct class means per informative coordinate, latent
    /// coordinates first.
    levels: Vec<usize>,
}

impl InformativeLayout {
    /// Split the informative budget `min(d, k)` between the blocks:
    /// `ceil(alpha * budget)` coordinates go to the observed block. The
    /// class index is decomposed into one digit per informative coordinate
    /// (mixed radix, balanced levels), so a block only carries the digits
    /// assigned to it and classes sit on a grid of means.
    fn for_config(cfg: &SynthConfig) -> Self {
        let budget = cfg.d.min(cfg.k);
        let c_x = ((cfg.alpha * budget as f64).ceil() as usize).min(budget);
        let c_u = budget - c_x;
        let total = c_u + c_x;

        let m = cfg.num_classes;
        let base = (m as f64).powf(1.0 / total as f64).ceil() as usize;
        let mut levels = vec![base.max(2); total];
        // Trim excess capacity, last coordinates first, keeping the digit
        // space at least as large as the class count.
        for i in (0..total).rev() {
            while levels[i] > 1 {
                let probe: usize = levels
                    .iter()
                    .enumerate()
                    .map(|(j, &l)| if j == i { l - 1 } else { l })
                    .product();
                if probe >= m {
                    levels[i] -= 1;
                } else {
                    break;
                }
            }
        }
        InformativeLayout { c_u, c_x, levels }
    }

    /// Mixed-radix digits of `class`, one per informative coordinate.
    fn digits(&self, class: usize) -> Vec<usize> {
        let mut rem = class;
        self.levels
            .iter()
            .map(|&l| {
                let digit = rem % l;
                rem /= l;
                digit
            })
            .collect()
    }

    /// Class mean on informative coordinate `i` (latent coordinates first),
    /// centered around zero. Spacing grows with the coordinate's ordinal
    /// inside its block.
    fn mean(&self, digit: usize, i: usize) -> f64 {
        let ordinal = if i < self.c_u { i } else { i - self.c_u };
        let spacing = CLASS_MEAN_SEPARATION * (1.0 + ordinal as f64 * CLASS_MEAN_STAGGER);
        spacing * (digit as f64 - (self.levels[i] - 1) as f64 / 2.0)
    }
}

/// Generate a synthetic attributed graph with labels carried by the
/// observed and/or latent features according to `cfg.alpha`.
///
/// Labels are assigned by a shuffled balanced draw (class counts within one
/// of each other), informative coordinates get a per-class unit-variance
/// gaussian, all remaining coordinates are standard normal, and the graph
/// is sampled from the latent positions. If the sample comes out
/// disconnected, the largest component is kept and all per-node data is
/// filtered to it. Splits are left empty; see [`make_splits`].
pub fn generate_synthetic<R: Rng>(
    cfg: &SynthConfig,
    rng: &mut R,
) -> Result<(Dataset, Graph), GenModelError> {
    cfg.validate()?;
    let layout = InformativeLayout::for_config(cfg);

    let mut y: Vec<usize> = (0..cfg.n).map(|i| i % cfg.num_classes).collect();
    y.shuffle(rng);

    let mut x = Array2::zeros((cfg.n, cfg.d));
    let mut u = Array2::zeros((cfg.n, cfg.k));
    for i in 0..cfg.n {
        let digits = layout.digits(y[i]);
        for j in 0..cfg.k {
            let noise: f64 = StandardNormal.sample(rng);
            u[(i, j)] = if j < layout.c_u {
                layout.mean(digits[j], j) + noise
            } else {
                noise
            };
        }
        for j in 0..cfg.d {
            let noise: f64 = StandardNormal.sample(rng);
            x[(i, j)] = if j < layout.c_x {
                layout.mean(digits[layout.c_u + j], layout.c_u + j) + noise
            } else {
                noise
            };
        }
    }

    let state = LatentState::new(u, cfg.scale_sq_gen)?;
    let graph = sample_graph(&state, rng);
    let u = state.u;

    let (graph, x, y, u) = if graph.is_connected() {
        (graph, x, y, u)
    } else {
        let (lcc, kept) = graph.largest_component();
        let x2 = ndarray::stack(
            ndarray::Axis(0),
            &kept.iter().map(|&i| x.row(i)).collect::<Vec<_>>(),
        )
        .expect("rows share shape");
        let u2 = ndarray::stack(
            ndarray::Axis(0),
            &kept.iter().map(|&i| u.row(i)).collect::<Vec<_>>(),
        )
        .expect("rows share shape");
        let y2: Vec<usize> = kept.iter().map(|&i| y[i]).collect();
        (lcc, x2, y2, u2)
    };

    let ds = Dataset {
        x,
        y: y.into_iter().map(Some).collect(),
        num_classes: cfg.num_classes,
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
        true_u: Some(u),
    };
    Ok((ds, graph))
}

/// Seeded convenience wrapper around [`generate_synthetic`].
pub fn generate_synthetic_seeded(cfg: &SynthConfig) -> Result<(Dataset, Graph), GenModelError> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    generate_synthetic(cfg, &mut rng)
}

/// Fill in stratified train/val/test splits over the labeled nodes.
///
/// Global counts are `round(frac * labeled)`; each class receives its
/// proportional share with largest-remainder rounding, so balanced classes
/// contribute equally up to one node. Unlabeled nodes always land in test.
pub fn make_splits<R: Rng>(
    ds: &mut Dataset,
    train_frac: f64,
    val_frac: f64,
    rng: &mut R,
) -> Result<(), GenModelError> {
    if train_frac <= 0.0 || train_frac.is_nan() {
        return Err(GenModelError::InvalidFraction(format!(
            "train fraction must be positive, got {train_frac}"
        )));
    }
    if !(0.0..1.0).contains(&val_frac) {
        return Err(GenModelError::InvalidFraction(format!(
            "val fraction must be in [0, 1), got {val_frac}"
        )));
    }
    if train_frac + val_frac >= 1.0 {
        return Err(GenModelError::InvalidFraction(format!(
            "train + val = {} leaves no test nodes",
            train_frac + val_frac
        )));
    }

    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); ds.num_classes];
    let mut unlabeled = Vec::new();
    for i in 0..ds.n() {
        match ds.y[i] {
            Some(c) => by_class[c].push(i),
            None => unlabeled.push(i),
        }
    }
    for class in by_class.iter_mut() {
        class.shuffle(rng);
    }
    let labeled_total: usize = by_class.iter().map(|c| c.len()).sum();
    if labeled_total == 0 {
        return Err(GenModelError::InvalidConfig(
            "no labeled nodes to split".into(),
        ));
    }

    let train_quota = largest_remainder_quota(&by_class, train_frac, labeled_total, &[]);
    let val_quota = largest_remainder_quota(&by_class, val_frac, labeled_total, &train_quota);

    let mut train = Vec::new();
    let mut val = Vec::new();
    let mut test = unlabeled;
    for (c, members) in by_class.iter().enumerate() {
        let t = train_quota[c];
        let v = val_quota[c];
        train.extend_from_slice(&members[..t]);
        val.extend_from_slice(&members[t..t + v]);
        test.extend_from_slice(&members[t + v..]);
    }
    train.sort_unstable();
    val.sort_unstable();
    test.sort_unstable();

    ds.train = train;
    ds.val = val;
    ds.test = test;
    ds.validate_splits()
}

/// Per-class quotas summing to `round(frac * total)`, proportional to class
/// sizes with largest-remainder rounding; `reserved` counts are already
/// taken from each class and cap the available capacity.
fn largest_remainder_quota(
    by_class: &[Vec<usize>],
    frac: f64,
    total: usize,
    reserved: &[usize],
) -> Vec<usize> {
    let want_total = (frac * total as f64).round() as usize;
    let capacity: Vec<usize> = by_class
        .iter()
        .enumerate()
        .map(|(c, m)| m.len() - reserved.get(c).copied().unwrap_or(0))
        .collect();

    let ideal: Vec<f64> = by_class.iter().map(|m| frac * m.len() as f64).collect();
    let mut quota: Vec<usize> = ideal
        .iter()
        .zip(&capacity)
        .map(|(&f, &cap)| (f.floor() as usize).min(cap))
        .collect();

    let mut assigned: usize = quota.iter().sum();
    // Rank classes by fractional remainder, ties to the lower class index.
    let mut order: Vec<usize> = (0..by_class.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = ideal[a] - ideal[a].floor();
        let rb = ideal[b] - ideal[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    let mut cursor = 0;
    while assigned < want_total {
        let c = order[cursor % order.len()];
        cursor += 1;
        if quota[c] < capacity[c] {
            quota[c] += 1;
            assigned += 1;
        }
        if cursor > order.len() * (want_total + 1) {
            break; // every class at capacity
        }
    }
    quota
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn edge_prob_basics() {
        let p = edge_prob(&[1.0, 2.0], &[1.0, 2.0], 0.5).unwrap();
        assert_eq!(p, 1.0);

        // Squared distance equal to the scale gives exp(-1).
        let p = edge_prob(&[0.0], &[2.0], 4.0).unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-15);

        let p = edge_prob(&[1.0, 2.0], &[2.0, 4.0], 1.0).unwrap();
        assert!((p - (-5.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn edge_prob_errors() {
        assert!(matches!(
            edge_prob(&[0.0], &[1.0], 0.0),
            Err(GenModelError::NonPositiveScale(_))
        ));
        assert!(matches!(
            edge_prob(&[0.0], &[1.0], -1.0),
            Err(GenModelError::NonPositiveScale(_))
        ));
        assert!(matches!(
            edge_prob(&[0.0, 1.0], &[1.0], 1.0),
            Err(GenModelError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn edge_prob_symmetric_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s = rng.gen_range(0.1..3.0);
            assert_eq!(edge_prob(&a, &b, s).unwrap(), edge_prob(&b, &a, s).unwrap());
        }
        // Strictly decreasing in squared distance.
        let mut last = f64::INFINITY;
        for step in 1..10 {
            let p = edge_prob(&[0.0], &[step as f64 * 0.3], 1.0).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn identical_latents_give_complete_graph() {
        let u = Array2::from_elem((5, 2), 0.7);
        let state = LatentState::new(u, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = sample_graph(&state, &mut rng);
        assert_eq!(g.num_edges(), 5 * 4 / 2);
    }

    #[test]
    fn tiny_scale_gives_empty_graph() {
        let mut u = Array2::zeros((6, 1));
        for i in 0..6 {
            u[(i, 0)] = i as f64;
        }
        let state = LatentState::new(u, 1e-6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = sample_graph(&state, &mut rng);
        assert_eq!(g.num_edges(), 0);
    }

    #[test]
    fn sample_graph_is_seed_deterministic() {
        let cfg = SynthConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut u = Array2::zeros((30, 2));
        for x in u.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        let state = LatentState::new(u, 1.0).unwrap();
        let g1 = sample_graph(&state, &mut ChaCha8Rng::seed_from_u64(77));
        let g2 = sample_graph(&state, &mut ChaCha8Rng::seed_from_u64(77));
        assert_eq!(g1.edges(), g2.edges());
    }

    #[test]
    fn likelihood_trivial_cases() {
        // Complete graph with coincident latent points: probability 1.
        let u = Array2::zeros((4, 2));
        let state = LatentState::new(u, 1.0).unwrap();
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((i, j));
            }
        }
        let g = Graph::from_edges(4, &edges).unwrap();
        assert_eq!(log_likelihood_adjacency(&g, &state).unwrap(), 0.0);

        // Single edge at squared distance equal to the scale: ln(e^-1) = -1.
        let mut u = Array2::zeros((2, 1));
        u[(1, 0)] = 1.0;
        let state = LatentState::new(u, 1.0).unwrap();
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert!((log_likelihood_adjacency(&g, &state).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn likelihood_neg_infinity_sentinel() {
        // Non-edge between coincident points has probability 1, so the
        // graph has probability zero under this state.
        let u = Array2::zeros((3, 1));
        let state = LatentState::new(u, 1.0).unwrap();
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(
            log_likelihood_adjacency(&g, &state).unwrap(),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn likelihood_matches_bruteforce_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let n = 6;
            let mut u = Array2::zeros((n, 2));
            for x in u.iter_mut() {
                *x = rng.gen_range(-1.5..1.5);
            }
            let state = LatentState::new(u, rng.gen_range(0.3..2.0)).unwrap();
            let g = sample_graph(&state, &mut rng);

            let mut product = 1.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    let p = edge_prob(
                        state.u.row(i).to_slice().unwrap(),
                        state.u.row(j).to_slice().unwrap(),
                        state.scale_sq,
                    )
                    .unwrap();
                    product *= if g.has_edge(i, j) { p } else { 1.0 - p };
                }
            }
            let ll = log_likelihood_adjacency(&g, &state).unwrap();
            assert!((ll - product.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn surrogate_matches_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n = 7;
        let mut u = Array2::zeros((n, 2));
        for x in u.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
        let state = LatentState::new(u, 0.8).unwrap();
        let g = sample_graph(&state, &mut rng);
        let mut want = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let d2: f64 = (0..2)
                    .map(|c| (state.u[(i, c)] - state.u[(j, c)]).powi(2))
                    .sum();
                want += if g.has_edge(i, j) {
                    d2 / state.scale_sq
                } else {
                    (-d2 / state.scale_sq).exp()
                };
            }
        }
        let got = surrogate_adjacency_nll(&g, &state).unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn informative_layout_matches_alpha_semantics() {
        let mut cfg = SynthConfig {
            alpha: 0.0,
            ..SynthConfig::default()
        };
        let l = InformativeLayout::for_config(&cfg);
        assert_eq!((l.c_u, l.c_x), (2, 0));
        assert_eq!(l.levels, vec![2, 2]);

        cfg.alpha = 0.5;
        let l = InformativeLayout::for_config(&cfg);
        assert_eq!((l.c_u, l.c_x), (1, 1));
        assert_eq!(l.levels, vec![2, 2]);

        cfg.alpha = 1.0;
        let l = InformativeLayout::for_config(&cfg);
        assert_eq!((l.c_u, l.c_x), (0, 2));
        assert_eq!(l.levels, vec![2, 2]);
    }

    #[test]
    fn generated_labels_are_near_balanced() {
        let cfg = SynthConfig {
            n: 150,
            ..SynthConfig::default()
        };
        let (ds, _) = generate_synthetic_seeded(&cfg).unwrap();
        let mut counts = vec![0usize; cfg.num_classes];
        for y in ds.y.iter().flatten() {
            counts[*y] += 1;
        }
        let expected = cfg.n as f64 / cfg.num_classes as f64;
        for &c in &counts {
            assert!((c as f64 - expected).abs() <= 0.2 * expected + 1.0);
        }
    }

    #[test]
    fn generate_rejects_bad_config() {
        let cfg = SynthConfig {
            alpha: 1.5,
            ..SynthConfig::default()
        };
        assert!(matches!(
            generate_synthetic_seeded(&cfg),
            Err(GenModelError::InvalidConfig(_))
        ));
    }

    #[test]
    fn splits_match_requested_fractions() {
        let cfg = SynthConfig::default();
        let (mut ds, _) = generate_synthetic_seeded(&cfg).unwrap();
        let n = ds.n();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        make_splits(&mut ds, 0.10, 0.20, &mut rng).unwrap();
        assert_eq!(ds.train.len(), (0.10 * n as f64).round() as usize);
        assert_eq!(ds.val.len(), (0.20 * n as f64).round() as usize);
        assert_eq!(ds.test.len(), n - ds.train.len() - ds.val.len());
        ds.validate_splits().unwrap();
    }

    #[test]
    fn zero_train_fraction_rejected() {
        let cfg = SynthConfig::default();
        let (mut ds, _) = generate_synthetic_seeded(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        assert!(matches!(
            make_splits(&mut ds, 0.0, 0.2, &mut rng),
            Err(GenModelError::InvalidFraction(_))
        ));
    }

    #[test]
    fn stratification_is_even_for_balanced_classes() {
        let cfg = SynthConfig {
            n: 100,
            // No graph-size loss: keep everything connected via one blob.
            alpha: 0.0,
            scale_sq_gen: 1e6,
            ..SynthConfig::default()
        };
        let (mut ds, g) = generate_synthetic_seeded(&cfg).unwrap();
        assert!(g.is_connected());
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        make_splits(&mut ds, 0.5, 0.25, &mut rng).unwrap();
        let mut per_class = vec![0usize; 4];
        for &i in &ds.train {
            per_class[ds.y[i].unwrap()] += 1;
        }
        for &c in &per_class {
            assert!(c == 12 || c == 13, "class got {c} train nodes");
        }
        assert_eq!(ds.train.len(), 50);
    }
}

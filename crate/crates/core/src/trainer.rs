//! Alternating maximum-likelihood training: per epoch the classifier
//! weights take an Adam step on the labeled-node NLL (with weight decay),
//! then — for variants that update it — the latent embedding takes a plain
//! gradient step on the supervised NLL plus the adjacency surrogate.
//! Initialization of the embedding is spectral (the unsupervised MLE) or
//! random, depending on the variant.
//!
//! The embedding is stored with unit-norm columns (the constraint surface
//! of the spectral initializer, which the adjacency kernel scale is tuned
//! for), but its coordinates then have standard deviation `1/sqrt(n)` —
//! invisible next to unit-variance observed features. The network
//! therefore sees the embedding scaled by `sqrt(n)` (unit variance per
//! coordinate); the supervised gradient w.r.t. the raw embedding picks up
//! the same factor by the chain rule, and the adjacency term always works
//! on the raw embedding. Use [`predict`] from this module (not the bare
//! classifier) to evaluate a trained model.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{
    self, forward, forward_train, grad_params, grad_u_adjacency, grad_u_supervised, nll_loss,
    ClassifierError, ClassifierParams,
};
use crate::genmodel::{surrogate_adjacency_nll, Dataset, GenModelError, LatentState};
use crate::graph::Graph;
use crate::spectral::{smallest_nontrivial_eigs, SpectralError};

#[derive(Debug, Error)]
pub enum TrainerError {
    #[error("train split is empty")]
    EmptyTrainSet,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("objective diverged (NaN/Inf) at epoch {epoch}")]
    Divergence {
        epoch: usize,
        report: Box<TrainReport>,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    GenModel(#[from] GenModelError),
}

/// Training variant: full alternating updates, frozen embedding, or random
/// (non-spectral) initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "jane")]
    Jane,
    #[serde(rename = "jane-nu")]
    JaneNu,
    #[serde(rename = "jane-r")]
    JaneR,
}

impl Variant {
    pub fn updates_latent(self) -> bool {
        matches!(self, Variant::Jane | Variant::JaneR)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Jane => "jane",
            Variant::JaneNu => "jane-nu",
            Variant::JaneR => "jane-r",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jane" => Ok(Variant::Jane),
            "jane-nu" => Ok(Variant::JaneNu),
            "jane-r" => Ok(Variant::JaneR),
            other => Err(format!("unknown variant '{other}'")),
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Weight optimizer. Adam is the default; plain gradient descent exists for
/// the objective-monotonicity harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WeightOptimizer {
    #[default]
    #[serde(rename = "adam")]
    Adam,
    #[serde(rename = "sgd")]
    Sgd,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrainConfig {
    /// Maximum epoch count.
    pub epochs: usize,
    /// Learning rate for the weight matrices.
    pub lr_w: f64,
    /// Learning rate for the latent embedding.
    pub lr_u: f64,
    pub dropout: f64,
    pub weight_decay: f64,
    /// Eigenvector count (latent dimension).
    pub k: usize,
    /// Kernel scale used in the adjacency term during training.
    pub scale_sq: f64,
    pub hidden: usize,
    pub variant: Variant,
    pub seed: u64,
    /// Stop when validation accuracy has not improved for this many epochs.
    pub early_stop_patience: Option<usize>,
    /// Apply the embedding update every this many epochs.
    pub u_update_every: usize,
    pub optimizer: WeightOptimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            lr_w: 0.005,
            lr_u: 1e-4,
            dropout: 0.2,
            weight_decay: 5e-2,
            k: 2,
            scale_sq: 0.01,
            hidden: 16,
            variant: Variant::Jane,
            seed: 0,
            early_stop_patience: None,
            u_update_every: 1,
            optimizer: WeightOptimizer::Adam,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainerError> {
        if self.epochs < 1 {
            return Err(TrainerError::InvalidConfig("epochs must be >= 1".into()));
        }
        if self.lr_w <= 0.0 || self.lr_w.is_nan() || self.lr_u < 0.0 || self.lr_u.is_nan() {
            return Err(TrainerError::InvalidConfig(format!(
                "lr_w must be positive and lr_u non-negative (lr_w={}, lr_u={})",
                self.lr_w, self.lr_u
            )));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(TrainerError::InvalidConfig(format!(
                "dropout must be in [0, 1), got {}",
                self.dropout
            )));
        }
        if self.scale_sq <= 0.0 || self.scale_sq.is_nan() {
            return Err(TrainerError::InvalidConfig(format!(
                "scale_sq must be positive, got {}",
                self.scale_sq
            )));
        }
        if self.k < 1 || self.hidden < 1 {
            return Err(TrainerError::InvalidConfig(
                "k and hidden width must be >= 1".into(),
            ));
        }
        if self.u_update_every < 1 {
            return Err(TrainerError::InvalidConfig(
                "u_update_every must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Supervised NLL on the train labels, dropout off.
    pub loss: f64,
    /// Adjacency-surrogate NLL.
    pub adj_nll: f64,
    /// `loss + adj_nll`, the quantity the alternating updates descend.
    pub obj: f64,
    pub train_acc: f64,
    pub val_acc: f64,
}

/// Full record of one training run. The JSON serialization carries the
/// config and per-epoch scalars; weights and the embedding live in the
/// binary checkpoint instead.
#[derive(Debug, Clone, Serialize)]
pub struct TrainReport {
    pub config: TrainConfig,
    pub epochs: Vec<EpochRecord>,
    pub test_acc: Option<f64>,
    pub duration_ms: u128,
    #[serde(skip)]
    pub params: ClassifierParams,
    #[serde(skip)]
    pub latent: LatentState,
}

/// Network-input view of the embedding: unit variance per coordinate.
fn network_u(latent: &LatentState) -> Array2<f64> {
    let scale = (latent.n() as f64).sqrt();
    latent.u.mapv(|v| v * scale)
}

/// Predict labels with a trained model, applying the trainer's embedding
/// scaling convention.
pub fn predict(
    x: &Array2<f64>,
    latent: &LatentState,
    params: &ClassifierParams,
) -> Result<Vec<usize>, TrainerError> {
    Ok(classifier::predict(x, &network_u(latent), params)?)
}

/// Fraction of the labeled members of `idx` predicted correctly; 0 when
/// none of them carries a label.
pub fn accuracy(pred: &[usize], y: &[Option<usize>], idx: &[usize]) -> f64 {
    let mut labeled = 0usize;
    let mut correct = 0usize;
    for &i in idx {
        if let Some(label) = y[i] {
            labeled += 1;
            if label == pred[i] {
                correct += 1;
            }
        }
    }
    if labeled == 0 {
        return 0.0;
    }
    correct as f64 / labeled as f64
}

/// Initial latent estimate: the spectral embedding for Jane/JaneNu, or a
/// random matrix projected onto the same constraint surface (centered,
/// unit-norm columns) for JaneR.
pub fn init_u<R: Rng>(
    g: &Graph,
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<LatentState, TrainerError> {
    let n = g.n();
    let u = match cfg.variant {
        Variant::Jane | Variant::JaneNu => smallest_nontrivial_eigs(&g.laplacian(), cfg.k)?.vectors,
        Variant::JaneR => {
            let scale = 1.0 / (n as f64).sqrt();
            let mut u = Array2::zeros((n, cfg.k));
            for v in u.iter_mut() {
                let z: f64 = StandardNormal.sample(rng);
                *v = z * scale;
            }
            for mut col in u.columns_mut() {
                let mean = col.sum() / n as f64;
                col.mapv_inplace(|x| x - mean);
                let norm = col.dot(&col).sqrt();
                if norm > 0.0 {
                    col.mapv_inplace(|x| x / norm);
                }
            }
            u
        }
    };
    Ok(LatentState::new(u, cfg.scale_sq)?)
}

struct AdamState {
    m0: Array2<f64>,
    v0: Array2<f64>,
    m1: Array2<f64>,
    v1: Array2<f64>,
    t: i32,
}

impl AdamState {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(params: &ClassifierParams) -> Self {
        AdamState {
            m0: Array2::zeros(params.w0.dim()),
            v0: Array2::zeros(params.w0.dim()),
            m1: Array2::zeros(params.w1.dim()),
            v1: Array2::zeros(params.w1.dim()),
            t: 0,
        }
    }

    fn step(
        &mut self,
        params: &mut ClassifierParams,
        dw0: &Array2<f64>,
        dw1: &Array2<f64>,
        lr: f64,
    ) {
        self.t += 1;
        let bias1 = 1.0 - Self::BETA1.powi(self.t);
        let bias2 = 1.0 - Self::BETA2.powi(self.t);
        for ((w, g), (m, v)) in params
            .w0
            .iter_mut()
            .zip(dw0.iter())
            .zip(self.m0.iter_mut().zip(self.v0.iter_mut()))
            .chain(
                params
                    .w1
                    .iter_mut()
                    .zip(dw1.iter())
                    .zip(self.m1.iter_mut().zip(self.v1.iter_mut())),
            )
        {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *w -= lr * m_hat / (v_hat.sqrt() + Self::EPS);
        }
    }
}

/// The monitored objective: supervised NLL on the train labels (dropout
/// off) plus the adjacency-surrogate NLL.
pub fn objective(
    ds: &Dataset,
    g: &Graph,
    state: &LatentState,
    params: &ClassifierParams,
) -> Result<f64, TrainerError> {
    let labeled = ds.labeled_on(&ds.train);
    if labeled.is_empty() {
        return Err(TrainerError::EmptyTrainSet);
    }
    let trace = forward(&ds.x, &network_u(state), params)?;
    let loss = nll_loss(&trace, &labeled)?;
    Ok(loss + surrogate_adjacency_nll(g, state)?)
}

/// Train from freshly derived initial values. See [`train_from`] for the
/// core loop.
pub fn train(ds: &Dataset, g: &Graph, cfg: &TrainConfig) -> Result<TrainReport, TrainerError> {
    cfg.validate()?;
    let mut rng_init = ChaCha8Rng::seed_from_u64(cfg.seed);
    let params = ClassifierParams::init(ds.d() + cfg.k, cfg.hidden, ds.num_classes, &mut rng_init);
    let latent = init_u(g, cfg, &mut rng_init)?;
    train_from(ds, g, cfg, params, latent)
}

/// Core training loop from explicit initial weights and latent state.
///
/// Dropout for the weight-update forward pass and for the embedding-update
/// forward pass come from two independent seeded streams, so variants that
/// skip the embedding update see byte-identical weight trajectories.
pub fn train_from(
    ds: &Dataset,
    g: &Graph,
    cfg: &TrainConfig,
    mut params: ClassifierParams,
    mut latent: LatentState,
) -> Result<TrainReport, TrainerError> {
    cfg.validate()?;
    let started = std::time::Instant::now();
    let train_labeled = ds.labeled_on(&ds.train);
    if train_labeled.is_empty() {
        return Err(TrainerError::EmptyTrainSet);
    }
    if g.n() != ds.n() {
        return Err(TrainerError::InvalidConfig(format!(
            "graph has {} nodes, dataset has {}",
            g.n(),
            ds.n()
        )));
    }
    ds.validate_splits()?;

    let mut rng_w = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut rng_u = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xd1b5_4a32_d192_ed03);

    let mut adam = AdamState::new(&params);
    let mut records: Vec<EpochRecord> = Vec::with_capacity(cfg.epochs);
    let mut best_val = f64::NEG_INFINITY;
    let mut since_best = 0usize;

    let d = ds.d();
    let u_scale = (ds.n() as f64).sqrt();
    for epoch in 1..=cfg.epochs {
        // Weight update.
        let trace = forward_train(&ds.x, &network_u(&latent), &params, cfg.dropout, &mut rng_w)?;
        let (dw0, dw1) = grad_params(&trace, &train_labeled, &params, cfg.weight_decay)?;
        match cfg.optimizer {
            WeightOptimizer::Adam => adam.step(&mut params, &dw0, &dw1, cfg.lr_w),
            WeightOptimizer::Sgd => {
                params.w0.scaled_add(-cfg.lr_w, &dw0);
                params.w1.scaled_add(-cfg.lr_w, &dw1);
            }
        }

        // Embedding update (weights held fixed).
        if cfg.variant.updates_latent() && epoch % cfg.u_update_every == 0 {
            let trace_u =
                forward_train(&ds.x, &network_u(&latent), &params, cfg.dropout, &mut rng_u)?;
            let du_sup = grad_u_supervised(&trace_u, &train_labeled, &params, d)?;
            let du_adj = grad_u_adjacency(g, &latent)?;
            latent.u.scaled_add(-cfg.lr_u * u_scale, &du_sup);
            latent.u.scaled_add(-cfg.lr_u, &du_adj);
        }

        // Monitoring, dropout off.
        let eval = forward(&ds.x, &network_u(&latent), &params)?;
        let loss = nll_loss(&eval, &train_labeled)?;
        let adj_nll = surrogate_adjacency_nll(g, &latent)?;
        let obj = loss + adj_nll;
        let pred = classifier::argmax_rows(&eval.a1);
        let train_acc = accuracy(&pred, &ds.y, &ds.train);
        let val_acc = accuracy(&pred, &ds.y, &ds.val);
        records.push(EpochRecord {
            epoch,
            loss,
            adj_nll,
            obj,
            train_acc,
            val_acc,
        });

        if !obj.is_finite() {
            let report = finish_report(cfg, records, None, started, params, latent);
            return Err(TrainerError::Divergence {
                epoch,
                report: Box::new(report),
            });
        }

        if let Some(patience) = cfg.early_stop_patience {
            if val_acc > best_val {
                best_val = val_acc;
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= patience {
                    break;
                }
            }
        }
    }

    let eval = forward(&ds.x, &network_u(&latent), &params)?;
    let pred = classifier::argmax_rows(&eval.a1);
    let test_acc = if ds.test.is_empty() {
        None
    } else {
        Some(accuracy(&pred, &ds.y, &ds.test))
    };
    Ok(finish_report(
        cfg, records, test_acc, started, params, latent,
    ))
}

fn finish_report(
    cfg: &TrainConfig,
    records: Vec<EpochRecord>,
    test_acc: Option<f64>,
    started: std::time::Instant,
    params: ClassifierParams,
    latent: LatentState,
) -> TrainReport {
    TrainReport {
        config: cfg.clone(),
        epochs: records,
        test_acc,
        duration_ms: started.elapsed().as_millis(),
        params,
        latent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genmodel::{generate_synthetic_seeded, make_splits, SynthConfig};

    fn small_dataset(seed: u64) -> (Dataset, Graph) {
        let cfg = SynthConfig {
            n: 40,
            alpha: 0.0,
            seed,
            ..SynthConfig::default()
        };
        let (mut ds, g) = generate_synthetic_seeded(&cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        make_splits(&mut ds, 0.2, 0.2, &mut rng).unwrap();
        (ds, g)
    }

    #[test]
    fn spectral_init_is_fiedler_vector_on_path() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let cfg = TrainConfig {
            k: 1,
            ..TrainConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let state = init_u(&g, &cfg, &mut rng).unwrap();
        let r = 1.0 / 2.0f64.sqrt();
        assert!((state.u[(0, 0)] - r).abs() < 1e-10);
        assert!(state.u[(1, 0)].abs() < 1e-10);
        assert!((state.u[(2, 0)] + r).abs() < 1e-10);
    }

    #[test]
    fn random_init_is_reproducible_and_constrained() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let cfg = TrainConfig {
            variant: Variant::JaneR,
            k: 2,
            ..TrainConfig::default()
        };
        let a = init_u(&g, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = init_u(&g, &cfg, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a.u, b.u);
        for col in a.u.columns() {
            assert!(col.sum().abs() < 1e-12);
            assert!((col.dot(&col).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nu_variant_shares_spectral_init_with_jane() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let jane = TrainConfig::default();
        let nu = TrainConfig {
            variant: Variant::JaneNu,
            ..TrainConfig::default()
        };
        let a = init_u(&g, &jane, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        let b = init_u(&g, &nu, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(a.u, b.u);
    }

    #[test]
    fn frozen_variant_never_touches_latent() {
        let (ds, g) = small_dataset(7);
        let cfg = TrainConfig {
            epochs: 15,
            variant: Variant::JaneNu,
            seed: 7,
            ..TrainConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let _ = ClassifierParams::init(ds.d() + cfg.k, cfg.hidden, ds.num_classes, &mut rng);
        let init = init_u(&g, &cfg, &mut rng).unwrap();
        let report = train(&ds, &g, &cfg).unwrap();
        assert_eq!(report.latent.u, init.u);
    }

    #[test]
    fn zero_latent_rate_matches_frozen_variant() {
        let (ds, g) = small_dataset(11);
        let frozen = TrainConfig {
            epochs: 12,
            variant: Variant::JaneNu,
            seed: 5,
            ..TrainConfig::default()
        };
        let zero_rate = TrainConfig {
            variant: Variant::Jane,
            lr_u: 0.0,
            ..frozen.clone()
        };
        let a = train(&ds, &g, &frozen).unwrap();
        let b = train(&ds, &g, &zero_rate).unwrap();
        assert_eq!(a.params.w0, b.params.w0);
        assert_eq!(a.params.w1, b.params.w1);
        assert_eq!(a.latent.u, b.latent.u);
        for (ra, rb) in a.epochs.iter().zip(&b.epochs) {
            assert_eq!(ra.loss, rb.loss);
            assert_eq!(ra.obj, rb.obj);
        }
    }

    #[test]
    fn training_is_seed_deterministic() {
        let (ds, g) = small_dataset(3);
        let cfg = TrainConfig {
            epochs: 10,
            seed: 9,
            ..TrainConfig::default()
        };
        let a = train(&ds, &g, &cfg).unwrap();
        let b = train(&ds, &g, &cfg).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.params.w0, b.params.w0);
        assert_eq!(a.latent.u, b.latent.u);
    }

    #[test]
    fn objective_zero_for_perfect_fit_on_complete_graph() {
        // Complete graph with coincident latent points: adjacency surrogate
        // is 0 (no non-edges, zero distances). A saturated classifier makes
        // the supervised term vanish as well.
        let n = 4;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        let g = Graph::from_edges(n, &edges).unwrap();
        let mut x = Array2::zeros((n, 1));
        for i in 0..n {
            x[(i, 0)] = if i < 2 { 40.0 } else { -40.0 };
        }
        let ds = Dataset {
            x,
            y: vec![Some(0), Some(0), Some(1), Some(1)],
            num_classes: 2,
            train: vec![0, 1, 2, 3],
            val: vec![],
            test: vec![],
            true_u: None,
        };
        let state = LatentState::new(Array2::zeros((n, 1)), 1.0).unwrap();
        // Two hidden units split the sign of x, so both classes saturate.
        let params = ClassifierParams {
            w0: ndarray::array![[1.0, -1.0], [0.0, 0.0]],
            w1: ndarray::array![[5.0, -5.0], [-5.0, 5.0]],
        };
        let obj = objective(&ds, &g, &state, &params).unwrap();
        assert!(obj.abs() < 1e-10, "obj = {obj}");
    }

    #[test]
    fn doubling_scale_shrinks_edge_term() {
        let (ds, g) = small_dataset(2);
        let _ = &ds;
        let mut u: Array2<f64> = Array2::zeros((g.n(), 2));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for v in u.iter_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        let edge_term = |s2: f64| {
            g.edges()
                .iter()
                .map(|&(i, j)| {
                    (0..2)
                        .map(|c| (u[(i as usize, c)] - u[(j as usize, c)]).powi(2))
                        .sum::<f64>()
                        / s2
                })
                .sum::<f64>()
        };
        assert!(edge_term(2.0) < edge_term(1.0));
    }

    #[test]
    fn divergence_is_reported() {
        let (ds, g) = small_dataset(13);
        let cfg = TrainConfig {
            epochs: 60,
            lr_u: 1e9, // absurd rate blows the embedding up
            seed: 1,
            ..TrainConfig::default()
        };
        match train(&ds, &g, &cfg) {
            Err(TrainerError::Divergence { report, .. }) => {
                assert!(!report.epochs.is_empty());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn early_stopping_cuts_run_short() {
        let (ds, g) = small_dataset(17);
        let cfg = TrainConfig {
            epochs: 200,
            early_stop_patience: Some(5),
            seed: 2,
            ..TrainConfig::default()
        };
        let report = train(&ds, &g, &cfg).unwrap();
        assert!(report.epochs.len() < 200);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn label_permutation_equivariance() {
        let (ds, g) = small_dataset(23);
        let cfg = TrainConfig {
            epochs: 20,
            seed: 31,
            ..TrainConfig::default()
        };
        let m = ds.num_classes;
        // perm[c] is the new name of class c.
        let perm: Vec<usize> = vec![2, 0, 3, 1];

        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let params = ClassifierParams::init(ds.d() + cfg.k, cfg.hidden, m, &mut rng);
        let latent = init_u(&g, &cfg, &mut rng).unwrap();

        let mut permuted_params = params.clone();
        for c in 0..m {
            for h in 0..cfg.hidden {
                permuted_params.w1[(h, perm[c])] = params.w1[(h, c)];
            }
        }
        let mut ds_perm = ds.clone();
        for y in ds_perm.y.iter_mut() {
            *y = y.map(|c| perm[c]);
        }

        let a = train_from(&ds, &g, &cfg, params, latent.clone()).unwrap();
        let b = train_from(&ds_perm, &g, &cfg, permuted_params, latent).unwrap();

        let pred_a = predict(&ds.x, &a.latent, &a.params).unwrap();
        let pred_b = predict(&ds_perm.x, &b.latent, &b.params).unwrap();
        for (pa, pb) in pred_a.iter().zip(&pred_b) {
            assert_eq!(perm[*pa], *pb);
        }
    }
}

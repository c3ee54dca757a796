//! Two-layer softmax classifier over the concatenated observed and latent
//! feature blocks, with hand-rolled backprop for the weights and for the
//! latent block of the input, plus the adjacency-surrogate gradient that
//! couples the embedding to the graph.
//!
//! Layout conventions: features are rows, `w0` is `(d+k) x h`, `w1` is
//! `h x M`. Dropout uses inverted scaling (kept entries are multiplied by
//! `1/(1-rate)` at train time) and applies to the input of each layer.

use ndarray::{s, Array2};
use rand::Rng;
use thiserror::Error;

use crate::genmodel::LatentState;
use crate::graph::Graph;

/// Probability floor applied before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("label set is empty")]
    EmptyLabelSet,
    #[error("dropout rate must be in [0, 1), got {0}")]
    InvalidDropout(f64),
    #[error("scale_sq must be strictly positive, got {0}")]
    NonPositiveScale(f64),
    #[error("checkpoint file malformed: {0}")]
    MalformedCheckpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Weight matrices of the two-layer network.
#[derive(Debug, Clone)]
pub struct ClassifierParams {
    pub w0: Array2<f64>,
    pub w1: Array2<f64>,
}

impl ClassifierParams {
    /// Symmetric uniform init with limit `sqrt(6 / (fan_in + fan_out))`.
    pub fn init<R: Rng>(input_dim: usize, hidden: usize, num_classes: usize, rng: &mut R) -> Self {
        let mut w0 = Array2::zeros((input_dim, hidden));
        let a0 = (6.0 / (input_dim + hidden) as f64).sqrt();
        for w in w0.iter_mut() {
            *w = rng.gen_range(-a0..a0);
        }
        let mut w1 = Array2::zeros((hidden, num_classes));
        let a1 = (6.0 / (hidden + num_classes) as f64).sqrt();
        for w in w1.iter_mut() {
            *w = rng.gen_range(-a1..a1);
        }
        ClassifierParams { w0, w1 }
    }

    pub fn input_dim(&self) -> usize {
        self.w0.nrows()
    }

    pub fn hidden(&self) -> usize {
        self.w0.ncols()
    }

    pub fn num_classes(&self) -> usize {
        self.w1.ncols()
    }
}

/// Activations of one forward pass. `input` is the concatenated `[X U]`
/// after input dropout; the dropout scale matrices are retained so the
/// backward pass can chain through the same masks.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub z0: Array2<f64>,
    pub a0: Array2<f64>,
    pub a1: Array2<f64>,
    input: Array2<f64>,
    input_scale: Option<Array2<f64>>,
    hidden_scale: Option<Array2<f64>>,
}

fn check_shapes(
    x: &Array2<f64>,
    u: &Array2<f64>,
    params: &ClassifierParams,
) -> Result<(), ClassifierError> {
    if x.nrows() != u.nrows() {
        return Err(ClassifierError::ShapeMismatch(format!(
            "X has {} rows, U has {}",
            x.nrows(),
            u.nrows()
        )));
    }
    if x.ncols() + u.ncols() != params.input_dim() {
        return Err(ClassifierError::ShapeMismatch(format!(
            "d + k = {} but w0 expects {}",
            x.ncols() + u.ncols(),
            params.input_dim()
        )));
    }
    Ok(())
}

fn concat_features(x: &Array2<f64>, u: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows();
    let mut input = Array2::zeros((n, x.ncols() + u.ncols()));
    input.slice_mut(s![.., ..x.ncols()]).assign(x);
    input.slice_mut(s![.., x.ncols()..]).assign(u);
    input
}

/// Row-wise softmax with max subtraction.
fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut r in out.rows_mut() {
        let max = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        r.mapv_inplace(|v| (v - max).exp());
        let sum = r.sum();
        r.mapv_inplace(|v| v / sum);
    }
    out
}

fn dropout_scale<R: Rng>(shape: (usize, usize), rate: f64, rng: &mut R) -> Array2<f64> {
    let keep = 1.0 - rate;
    let mut scale = Array2::zeros(shape);
    for v in scale.iter_mut() {
        *v = if rng.gen::<f64>() < rate {
            0.0
        } else {
            1.0 / keep
        };
    }
    scale
}

fn forward_inner(
    input: Array2<f64>,
    params: &ClassifierParams,
    input_scale: Option<Array2<f64>>,
    hidden_scale: Option<Array2<f64>>,
) -> ForwardTrace {
    let input = match &input_scale {
        Some(s) => input * s,
        None => input,
    };
    let z0 = input.dot(&params.w0);
    let relu = z0.mapv(|v| v.max(0.0));
    let a0 = match &hidden_scale {
        Some(s) => relu * s,
        None => relu,
    };
    let a1 = softmax_rows(&a0.dot(&params.w1));
    ForwardTrace {
        z0,
        a0,
        a1,
        input,
        input_scale,
        hidden_scale,
    }
}

/// Deterministic forward pass (dropout off). Used for prediction and
/// monitoring.
pub fn forward(
    x: &Array2<f64>,
    u: &Array2<f64>,
    params: &ClassifierParams,
) -> Result<ForwardTrace, ClassifierError> {
    check_shapes(x, u, params)?;
    Ok(forward_inner(concat_features(x, u), params, None, None))
}

/// Training forward pass with dropout applied to the input of each layer.
/// A rate of 0 draws nothing from the RNG and equals [`forward`].
pub fn forward_train<R: Rng>(
    x: &Array2<f64>,
    u: &Array2<f64>,
    params: &ClassifierParams,
    dropout: f64,
    rng: &mut R,
) -> Result<ForwardTrace, ClassifierError> {
    check_shapes(x, u, params)?;
    if !(0.0..1.0).contains(&dropout) {
        return Err(ClassifierError::InvalidDropout(dropout));
    }
    let n = x.nrows();
    let (input_scale, hidden_scale) = if dropout > 0.0 {
        (
            Some(dropout_scale((n, params.input_dim()), dropout, rng)),
            Some(dropout_scale((n, params.hidden()), dropout, rng)),
        )
    } else {
        (None, None)
    };
    Ok(forward_inner(
        concat_features(x, u),
        params,
        input_scale,
        hidden_scale,
    ))
}

/// Mean negative log-likelihood of the given `(node, class)` labels under
/// the trace's output probabilities, with a `1e-12` probability floor.
pub fn nll_loss(trace: &ForwardTrace, labeled: &[(usize, usize)]) -> Result<f64, ClassifierError> {
    if labeled.is_empty() {
        return Err(ClassifierError::EmptyLabelSet);
    }
    let (n, m) = trace.a1.dim();
    let mut total = 0.0;
    for &(i, y) in labeled {
        if i >= n || y >= m {
            return Err(ClassifierError::ShapeMismatch(format!(
                "label ({i}, {y}) out of range for {n} nodes, {m} classes"
            )));
        }
        total -= trace.a1[(i, y)].max(PROB_FLOOR).ln();
    }
    Ok(total / labeled.len() as f64)
}

/// Gradient of the mean NLL w.r.t. the output logits: zero rows off the
/// labeled set, `(p - onehot) / |L|` on it.
fn dlogits(trace: &ForwardTrace, labeled: &[(usize, usize)]) -> Array2<f64> {
    let (n, m) = trace.a1.dim();
    let scale = 1.0 / labeled.len() as f64;
    let mut g = Array2::zeros((n, m));
    for &(i, y) in labeled {
        for c in 0..m {
            g[(i, c)] += scale * (trace.a1[(i, c)] - if c == y { 1.0 } else { 0.0 });
        }
    }
    g
}

/// Backprop from the logits to the hidden pre-activation, chaining through
/// the hidden dropout mask and the ReLU subgradient (0 at the kink).
fn dz0(trace: &ForwardTrace, params: &ClassifierParams, dlogits: &Array2<f64>) -> Array2<f64> {
    let mut da0 = dlogits.dot(&params.w1.t());
    if let Some(scale) = &trace.hidden_scale {
        da0 *= scale;
    }
    ndarray::Zip::from(&mut da0)
        .and(&trace.z0)
        .for_each(|g, &z| {
            if z <= 0.0 {
                *g = 0.0;
            }
        });
    da0
}

/// Exact gradients of `nll_loss + (weight_decay/2) * ||W||^2` w.r.t. both
/// weight matrices. The trace must come from the forward pass whose
/// dropout masks the gradient should see.
pub fn grad_params(
    trace: &ForwardTrace,
    labeled: &[(usize, usize)],
    params: &ClassifierParams,
    weight_decay: f64,
) -> Result<(Array2<f64>, Array2<f64>), ClassifierError> {
    if labeled.is_empty() {
        return Err(ClassifierError::EmptyLabelSet);
    }
    let dlog = dlogits(trace, labeled);
    let dw1 = trace.a0.t().dot(&dlog) + &(weight_decay * &params.w1);
    let dz = dz0(trace, params, &dlog);
    let dw0 = trace.input.t().dot(&dz) + &(weight_decay * &params.w0);
    Ok((dw0, dw1))
}

/// Gradient of the mean NLL w.r.t. the latent block of the input (the last
/// `k` columns of `[X U]`). Rows of unlabeled nodes are exactly zero.
pub fn grad_u_supervised(
    trace: &ForwardTrace,
    labeled: &[(usize, usize)],
    params: &ClassifierParams,
    d: usize,
) -> Result<Array2<f64>, ClassifierError> {
    if labeled.is_empty() {
        return Err(ClassifierError::EmptyLabelSet);
    }
    if d > params.input_dim() {
        return Err(ClassifierError::ShapeMismatch(format!(
            "observed width {d} exceeds input dim {}",
            params.input_dim()
        )));
    }
    let dlog = dlogits(trace, labeled);
    let dz = dz0(trace, params, &dlog);
    let mut dinput = dz.dot(&params.w0.t());
    if let Some(scale) = &trace.input_scale {
        dinput *= scale;
    }
    Ok(dinput.slice(s![.., d..]).to_owned())
}

/// Gradient of the adjacency-surrogate objective w.r.t. the latent
/// positions: edges attract with `2 (u_i - u_j) / s^2`, non-edges repel
/// with the same term damped by the kernel value.
pub fn grad_u_adjacency(g: &Graph, state: &LatentState) -> Result<Array2<f64>, ClassifierError> {
    if g.n() != state.n() {
        return Err(ClassifierError::ShapeMismatch(format!(
            "graph has {} nodes, latent matrix has {} rows",
            g.n(),
            state.n()
        )));
    }
    if state.scale_sq <= 0.0 || state.scale_sq.is_nan() {
        return Err(ClassifierError::NonPositiveScale(state.scale_sq));
    }
    let n = g.n();
    let k = state.k();
    let s2 = state.scale_sq;
    let u = &state.u;
    let mut grad = Array2::zeros((n, k));
    let mut diff = vec![0.0; k];
    for i in 0..n {
        let mut neighbors = g.neighbors(i).iter().peekable();
        for j in (i + 1)..n {
            let mut d2 = 0.0;
            for (c, dc) in diff.iter_mut().enumerate() {
                *dc = u[(i, c)] - u[(j, c)];
                d2 += *dc * *dc;
            }
            while neighbors.peek().is_some_and(|&&v| (v as usize) < j) {
                neighbors.next();
            }
            let is_edge = neighbors.peek().is_some_and(|&&v| v as usize == j);
            let coef = if is_edge {
                2.0 / s2
            } else {
                -2.0 / s2 * (-d2 / s2).exp()
            };
            for (c, dc) in diff.iter().enumerate() {
                grad[(i, c)] += coef * dc;
                grad[(j, c)] -= coef * dc;
            }
        }
    }
    Ok(grad)
}

/// Predicted class per node: argmax of the deterministic forward output,
/// ties broken by the lowest class index.
pub fn predict(
    x: &Array2<f64>,
    u: &Array2<f64>,
    params: &ClassifierParams,
) -> Result<Vec<usize>, ClassifierError> {
    let trace = forward(x, u, params)?;
    Ok(argmax_rows(&trace.a1))
}

/// Row-wise argmax with ties broken by the lowest index.
pub fn argmax_rows(probs: &Array2<f64>) -> Vec<usize> {
    probs
        .rows()
        .into_iter()
        .map(|r| {
            let mut best = 0;
            let mut best_v = r[0];
            for (c, &v) in r.iter().enumerate().skip(1) {
                if v > best_v {
                    best = c;
                    best_v = v;
                }
            }
            best
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Checkpoint format
//
// Binary, little-endian, versioned by magic:
//   bytes 0..8   magic  b"JANECKP1"
//   8 x u64      d, k, h, M, n  (5 values)
//   f64 payload  w0 row-major ((d+k) * h), w1 row-major (h * M),
//                u row-major (n * k), scale_sq (1 value)
// ---------------------------------------------------------------------------

const CHECKPOINT_MAGIC: &[u8; 8] = b"JANECKP1";

/// Serialize the trained model (weights plus latent state) to `path`.
pub fn save_checkpoint(
    params: &ClassifierParams,
    state: &LatentState,
    d: usize,
    path: &std::path::Path,
) -> Result<(), ClassifierError> {
    let k = state.k();
    if d + k != params.input_dim() {
        return Err(ClassifierError::ShapeMismatch(format!(
            "d + k = {} but w0 expects {}",
            d + k,
            params.input_dim()
        )));
    }
    let mut buf: Vec<u8> = Vec::new();
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    for dim in [d, k, params.hidden(), params.num_classes(), state.n()] {
        buf.extend_from_slice(&(dim as u64).to_le_bytes());
    }
    for v in params
        .w0
        .iter()
        .chain(params.w1.iter())
        .chain(state.u.iter())
    {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&state.scale_sq.to_le_bytes());
    std::fs::write(path, buf)?;
    Ok(())
}

/// Load a checkpoint written by [`save_checkpoint`]. Returns the weights,
/// the latent state, and the observed-feature width `d`.
pub fn load_checkpoint(
    path: &std::path::Path,
) -> Result<(ClassifierParams, LatentState, usize), ClassifierError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 8 + 5 * 8 || &bytes[..8] != CHECKPOINT_MAGIC {
        return Err(ClassifierError::MalformedCheckpoint(
            "bad magic or truncated header".into(),
        ));
    }
    let mut dims = [0usize; 5];
    for (idx, dim) in dims.iter_mut().enumerate() {
        let off = 8 + idx * 8;
        *dim = u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()) as usize;
    }
    let [d, k, h, m, n] = dims;
    let want = (d + k) * h + h * m + n * k + 1;
    let payload = &bytes[8 + 5 * 8..];
    if payload.len() != want * 8 {
        return Err(ClassifierError::MalformedCheckpoint(format!(
            "payload holds {} bytes, expected {}",
            payload.len(),
            want * 8
        )));
    }
    let mut values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let mut take = |rows: usize, cols: usize| {
        Array2::from_shape_vec(
            (rows, cols),
            values.by_ref().take(rows * cols).collect::<Vec<_>>(),
        )
        .expect("length checked above")
    };
    let w0 = take(d + k, h);
    let w1 = take(h, m);
    let u = take(n, k);
    let scale_sq = values.next().expect("length checked above");
    let state = LatentState::new(u, scale_sq)
        .map_err(|e| ClassifierError::MalformedCheckpoint(e.to_string()))?;
    Ok((ClassifierParams { w0, w1 }, state, d))
}

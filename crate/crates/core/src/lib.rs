//! Semi-supervised node classification on attributed graphs.
//!
//! The model: per-node latent positions generate the graph (edge
//! probability decays with squared embedding distance), and labels come
//! from the observed features and the latent positions jointly through a
//! two-layer softmax network. Training alternates between the network
//! weights and the embedding, starting from the Laplacian eigenmap — the
//! unsupervised maximum-likelihood estimate of the positions.
//!
//! Modules:
//! - [`graph`]: sparse undirected graphs, Laplacians, edge-list files
//! - [`spectral`]: smallest nontrivial eigenpairs (dense and Lanczos)
//! - [`genmodel`]: edge kernel, graph sampling/likelihood, synthetic benchmark
//! - [`classifier`]: the two-layer network, its gradients, checkpoints
//! - [`trainer`]: alternating training loop and the frozen/random variants
//! - [`baselines`]: label propagation
//! - [`harness`]: sweeps, aggregation, CSV/JSON/SVG rendering
//! - [`dataset_io`]: the canonical dataset directory format

pub mod baselines;
pub mod classifier;
pub mod dataset_io;
pub mod genmodel;
pub mod graph;
pub mod harness;
pub mod spectral;
pub mod trainer;

pub use classifier::ClassifierParams;
pub use genmodel::{Dataset, LatentState, SynthConfig};
pub use graph::{Graph, Laplacian};
pub use spectral::SpectralBasis;
pub use trainer::{TrainConfig, TrainReport, Variant};

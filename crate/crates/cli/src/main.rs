//! `jane` command line: generate synthetic datasets, compute spectral
//! embeddings, train the classifier, run baselines, and drive sweeps.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use jane_core::baselines::{label_propagation, LpConfig};
use jane_core::classifier::save_checkpoint;
use jane_core::dataset_io::{load_dataset, save_dataset};
use jane_core::genmodel::{generate_synthetic, make_splits, SynthConfig};
use jane_core::graph::{read_edge_list, Graph};
use jane_core::harness::{render_outputs, run_sweep, SweepSpec};
use jane_core::spectral::smallest_nontrivial_eigs;
use jane_core::trainer::{accuracy, train, TrainConfig, Variant, WeightOptimizer};

#[derive(Parser)]
#[command(name = "jane", version, about = "Attributed-graph node classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset directory.
    Generate {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Class count.
        #[arg(long = "M", default_value_t = 4)]
        num_classes: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long = "scale-sq", default_value_t = 1.0)]
        scale_sq: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train fraction for the bundled splits.
        #[arg(long = "train-frac", default_value_t = 0.10)]
        train_frac: f64,
        /// Validation fraction for the bundled splits.
        #[arg(long = "val-frac", default_value_t = 0.20)]
        val_frac: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the k smallest nontrivial Laplacian eigenpairs of an
    /// edge-list graph and write them as CSV (first row eigenvalues, then
    /// one row per node).
    Eigs {
        /// Edge-list file path.
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train on a dataset directory.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "jane")]
        variant: Variant,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long = "lr-w", default_value_t = 0.005)]
        lr_w: f64,
        #[arg(long = "lr-u", default_value_t = 1e-4)]
        lr_u: f64,
        #[arg(long, default_value_t = 0.2)]
        dropout: f64,
        #[arg(long = "weight-decay", default_value_t = 5e-2)]
        weight_decay: f64,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long = "scale-sq", default_value_t = 0.01)]
        scale_sq: f64,
        #[arg(long, default_value_t = 16)]
        hidden: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Early-stop patience in epochs (absent = run the full budget).
        #[arg(long)]
        patience: Option<usize>,
        /// Apply the embedding update every this many epochs.
        #[arg(long = "u-update-every", default_value_t = 1)]
        u_update_every: usize,
        /// Weight optimizer: adam or sgd.
        #[arg(long, default_value = "adam")]
        optimizer: String,
        /// Write the per-epoch report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write the trained weights and embedding.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Run a baseline on a dataset directory.
    Baseline {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "lp")]
        method: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a sweep described by a spec JSON file.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Generate {
            n,
            d,
            k,
            num_classes,
            alpha,
            scale_sq,
            seed,
            train_frac,
            val_frac,
            out,
        } => {
            let cfg = SynthConfig {
                n,
                d,
                k,
                num_classes,
                alpha,
                scale_sq_gen: scale_sq,
                seed,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut ds, g) = generate_synthetic(&cfg, &mut rng).map_err(|e| e.to_string())?;
            if ds.n() < n {
                eprintln!(
                    "note: sampled graph was disconnected; kept the largest component \
                     ({} of {n} nodes)",
                    ds.n()
                );
            }
            let mut split_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
            make_splits(&mut ds, train_frac, val_frac, &mut split_rng)
                .map_err(|e| e.to_string())?;
            save_dataset(&ds, &g, &out, Some(&cfg)).map_err(|e| e.to_string())?;
            println!(
                "wrote {} nodes, {} edges, {} classes to {}",
                ds.n(),
                g.num_edges(),
                ds.num_classes,
                out.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Eigs { input, k, out } => {
            let pairs = read_edge_list(&input).map_err(|e| e.to_string())?;
            let n = pairs
                .iter()
                .map(|&(a, b)| a.max(b) + 1)
                .max()
                .ok_or("edge list is empty")?;
            let g = Graph::from_edges(n, &pairs).map_err(|e| e.to_string())?;
            let basis = smallest_nontrivial_eigs(&g.laplacian(), k).map_err(|e| e.to_string())?;
            let mut text = String::new();
            let vals: Vec<String> = basis.eigenvalues.iter().map(|v| format!("{v}")).collect();
            text.push_str(&vals.join(","));
            text.push('\n');
            for row in basis.vectors.rows() {
                let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                text.push_str(&fields.join(","));
                text.push('\n');
            }
            std::fs::write(&out, text).map_err(|e| e.to_string())?;
            println!("wrote {k} eigenpairs for {n} nodes to {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Train {
            data,
            variant,
            epochs,
            lr_w,
            lr_u,
            dropout,
            weight_decay,
            k,
            scale_sq,
            hidden,
            seed,
            patience,
            u_update_every,
            optimizer,
            report,
            checkpoint,
        } => {
            let loaded = load_dataset(&data).map_err(|e| e.to_string())?;
            if !loaded.dropped_nodes.is_empty() {
                eprintln!(
                    "note: dropped {} nodes outside the largest component",
                    loaded.dropped_nodes.len()
                );
            }
            let optimizer = match optimizer.as_str() {
                "adam" => WeightOptimizer::Adam,
                "sgd" => WeightOptimizer::Sgd,
                other => return Err(format!("unknown optimizer '{other}'")),
            };
            let cfg = TrainConfig {
                epochs,
                lr_w,
                lr_u,
                dropout,
                weight_decay,
                k,
                scale_sq,
                hidden,
                variant,
                seed,
                early_stop_patience: patience,
                u_update_every,
                optimizer,
            };
            let result = train(&loaded.dataset, &loaded.graph, &cfg).map_err(|e| e.to_string())?;
            if let Some(path) = report {
                std::fs::write(
                    &path,
                    serde_json::to_string_pretty(&result).map_err(|e| e.to_string())?,
                )
                .map_err(|e| e.to_string())?;
            }
            if let Some(path) = checkpoint {
                save_checkpoint(&result.params, &result.latent, loaded.dataset.d(), &path)
                    .map_err(|e| e.to_string())?;
            }
            match result.test_acc {
                Some(acc) => println!(
                    "trained {} epochs in {} ms; test accuracy {acc:.4}",
                    result.epochs.len(),
                    result.duration_ms
                ),
                None => println!(
                    "trained {} epochs in {} ms; no test split",
                    result.epochs.len(),
                    result.duration_ms
                ),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Baseline {
            data,
            method,
            report,
        } => {
            if method != "lp" {
                return Err(format!("unknown baseline method '{method}'"));
            }
            let loaded = load_dataset(&data).map_err(|e| e.to_string())?;
            let ds = &loaded.dataset;
            let mut visible = vec![None; ds.n()];
            for &i in &ds.train {
                visible[i] = ds.y[i];
            }
            let out = label_propagation(
                &loaded.graph,
                &visible,
                ds.num_classes,
                &LpConfig::default(),
            )
            .map_err(|e| e.to_string())?;
            if !out.unreached.is_empty() {
                eprintln!(
                    "warning: {} nodes live in components with no labeled node; \
                     they default to class 0",
                    out.unreached.len()
                );
            }
            let acc = accuracy(&out.labels, &ds.y, &ds.test);
            if let Some(path) = report {
                let body = serde_json::json!({
                    "method": "lp",
                    "test_acc": acc,
                    "iterations": out.iterations,
                    "converged": out.converged,
                    "unreached_nodes": out.unreached.len(),
                });
                std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap())
                    .map_err(|e| e.to_string())?;
            }
            println!(
                "label propagation converged={} after {} iterations; test accuracy {acc:.4}",
                out.converged, out.iterations
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { spec, out } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| e.to_string())?;
            let spec: SweepSpec = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let outcome = run_sweep(&spec).map_err(|e| e.to_string())?;
            render_outputs(&outcome.table, &out).map_err(|e| e.to_string())?;
            for failure in &outcome.failures {
                eprintln!("cell failed: {failure}");
            }
            println!(
                "sweep wrote {} rows to {} ({} cell failures)",
                outcome.table.rows.len(),
                out.display(),
                outcome.failures.len()
            );
            if outcome.failures.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
    }
}

//! Experiment orchestration: the influence-parameter sweep over train
//! fractions and methods, the eigenvector-count sensitivity sweep, and
//! rendering of results to CSV, JSON aggregates, and static SVG plots.
//!
//! Every cell derives its own seed from the base seed and the cell
//! coordinates, so cells are independent, reproducible in isolation, and
//! safe to run in parallel.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{label_propagation, LpConfig};
use crate::genmodel::{generate_synthetic, make_splits, Dataset, SynthConfig};
use crate::graph::Graph;
use crate::trainer::{accuracy, train, TrainConfig, Variant};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
    #[error("result table is empty")]
    EmptyTable,
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error("cell ({alpha}, {frac}, {method}, repeat {repeat}) failed: {msg}")]
    CellFailed {
        alpha: f64,
        frac: f64,
        method: Method,
        repeat: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Classification method run by a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "jane")]
    Jane,
    #[serde(rename = "jane-nu")]
    JaneNu,
    #[serde(rename = "jane-r")]
    JaneR,
    #[serde(rename = "lp")]
    Lp,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Jane => "jane",
            Method::JaneNu => "jane-nu",
            Method::JaneR => "jane-r",
            Method::Lp => "lp",
        }
    }

    fn tag(self) -> u8 {
        match self {
            Method::Jane => 1,
            Method::JaneNu => 2,
            Method::JaneR => 3,
            Method::Lp => 4,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jane" => Ok(Method::Jane),
            "jane-nu" => Ok(Method::JaneNu),
            "jane-r" => Ok(Method::JaneR),
            "lp" => Ok(Method::Lp),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sweep specification; serialized form mirrors this struct field-for-field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub alphas: Vec<f64>,
    pub train_fracs: Vec<f64>,
    pub methods: Vec<Method>,
    pub repeats: usize,
    /// Validation fraction used for every cell.
    pub val_frac: f64,
    pub synth: SynthConfig,
    pub train: TrainConfig,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            alphas: vec![0.0, 0.5, 1.0],
            train_fracs: vec![0.05, 0.10, 0.20, 0.30],
            methods: vec![Method::Jane, Method::JaneNu, Method::JaneR, Method::Lp],
            repeats: 5,
            val_frac: 0.20,
            synth: SynthConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.alphas.is_empty() || self.train_fracs.is_empty() || self.methods.is_empty() {
            return Err(HarnessError::InvalidSpec(
                "alphas, train_fracs, and methods must be non-empty".into(),
            ));
        }
        if self.repeats < 1 {
            return Err(HarnessError::InvalidSpec("repeats must be >= 1".into()));
        }
        for &a in &self.alphas {
            if !(0.0..=1.0).contains(&a) {
                return Err(HarnessError::InvalidSpec(format!(
                    "alpha {a} out of [0, 1]"
                )));
            }
        }
        for &f in &self.train_fracs {
            if !(f > 0.0 && f + self.val_frac < 1.0) {
                return Err(HarnessError::InvalidSpec(format!(
                    "train fraction {f} with val fraction {} is infeasible",
                    self.val_frac
                )));
            }
        }
        Ok(())
    }
}

/// One accuracy measurement. `k` is the embedding dimension the method
/// used (0 for label propagation, which has none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub alpha: f64,
    pub frac: f64,
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Aggregated accuracy for one `(alpha, frac, method, k)` cell.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateRow {
    pub alpha: f64,
    pub frac: f64,
    pub method: Method,
    pub k: usize,
    pub mean_accuracy: f64,
    /// Sample standard deviation (0 for a single repeat).
    pub std_accuracy: f64,
    pub repeats: usize,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub table: ResultTable,
    pub failures: Vec<HarnessError>,
}

/// Deterministic per-cell seed: FNV-1a over the base seed and the cell
/// coordinates. Stable across platforms and releases.
pub fn cell_seed(base: u64, alpha: f64, frac: f64, method: Method, repeat: usize) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    eat(&base.to_le_bytes());
    eat(&alpha.to_bits().to_le_bytes());
    eat(&frac.to_bits().to_le_bytes());
    eat(&[method.tag()]);
    eat(&(repeat as u64).to_le_bytes());
    h
}

/// Run a single sweep cell: generate the dataset for `alpha` with the
/// cell's derived seed, split, run the method, and report test accuracy.
pub fn run_cell(
    spec: &SweepSpec,
    alpha: f64,
    frac: f64,
    method: Method,
    repeat: usize,
) -> Result<ResultRow, HarnessError> {
    let seed = cell_seed(spec.synth.seed, alpha, frac, method, repeat);
    let fail = |msg: String| HarnessError::CellFailed {
        alpha,
        frac,
        method,
        repeat,
        msg,
    };

    let synth = SynthConfig {
        alpha,
        seed,
        ..spec.synth.clone()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ds, g) = generate_synthetic(&synth, &mut rng).map_err(|e| fail(e.to_string()))?;
    let mut split_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed_5eed_5eed);
    make_splits(&mut ds, frac, spec.val_frac, &mut split_rng).map_err(|e| fail(e.to_string()))?;

    let (k, acc) = match method {
        Method::Lp => {
            let mut visible = vec![None; ds.n()];
            for &i in &ds.train {
                visible[i] = ds.y[i];
            }
            let out = label_propagation(&g, &visible, ds.num_classes, &LpConfig::default())
                .map_err(|e| fail(e.to_string()))?;
            (0, accuracy(&out.labels, &ds.y, &ds.test))
        }
        Method::Jane | Method::JaneNu | Method::JaneR => {
            let variant = match method {
                Method::Jane => Variant::Jane,
                Method::JaneNu => Variant::JaneNu,
                _ => Variant::JaneR,
            };
            let cfg = TrainConfig {
                variant,
                seed,
                ..spec.train.clone()
            };
            let report = train(&ds, &g, &cfg).map_err(|e| fail(e.to_string()))?;
            let acc = report
                .test_acc
                .ok_or_else(|| fail("empty test split".into()))?;
            (cfg.k, acc)
        }
    };

    Ok(ResultRow {
        alpha,
        frac,
        method,
        k,
        seed,
        accuracy: acc,
    })
}

/// Run every cell of the sweep. Cells execute in parallel; the returned
/// table is sorted canonically so the output is schedule-independent.
/// Failed cells are collected rather than aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome, HarnessError> {
    spec.validate()?;
    let mut cells = Vec::new();
    for &alpha in &spec.alphas {
        for &frac in &spec.train_fracs {
            for &method in &spec.methods {
                for repeat in 0..spec.repeats {
                    cells.push((alpha, frac, method, repeat));
                }
            }
        }
    }

    let results: Vec<Result<ResultRow, HarnessError>> = cells
        .par_iter()
        .map(|&(alpha, frac, method, repeat)| run_cell(spec, alpha, frac, method, repeat))
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(e),
        }
    }
    sort_rows(&mut rows);
    Ok(SweepOutcome {
        table: ResultTable { rows },
        failures,
    })
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.alpha
            .total_cmp(&b.alpha)
            .then(a.frac.total_cmp(&b.frac))
            .then(a.method.cmp(&b.method))
            .then(a.k.cmp(&b.k))
            .then(a.seed.cmp(&b.seed))
    });
}

/// Accuracy versus embedding dimension: one training run per `k` and
/// repeat on the same dataset. Seeds derive from `cfg.seed` and the repeat
/// index; errors (e.g. `k` beyond its bound) propagate.
pub fn run_eig_sensitivity(
    ds: &Dataset,
    g: &Graph,
    ks: &[usize],
    cfg: &TrainConfig,
    repeats: usize,
) -> Result<ResultTable, HarnessError> {
    if ks.is_empty() || repeats == 0 {
        return Err(HarnessError::InvalidSpec(
            "ks and repeats must be non-empty".into(),
        ));
    }
    let mut rows = Vec::new();
    for &k in ks {
        for repeat in 0..repeats {
            let seed = cell_seed(cfg.seed, k as f64, 0.0, Method::Jane, repeat);
            let run_cfg = TrainConfig {
                k,
                seed,
                ..cfg.clone()
            };
            let report = train(ds, g, &run_cfg).map_err(|e| HarnessError::CellFailed {
                alpha: f64::NAN,
                frac: f64::NAN,
                method: Method::Jane,
                repeat,
                msg: e.to_string(),
            })?;
            rows.push(ResultRow {
                alpha: f64::NAN,
                frac: f64::NAN,
                method: Method::Jane,
                k,
                seed,
                accuracy: report.test_acc.unwrap_or(0.0),
            });
        }
    }
    Ok(ResultTable { rows })
}

/// Mean and sample standard deviation per `(alpha, frac, method, k)` cell,
/// in canonical order.
pub fn aggregate(table: &ResultTable) -> Vec<AggregateRow> {
    let mut sorted = table.rows.clone();
    sort_rows(&mut sorted);
    let mut out: Vec<AggregateRow> = Vec::new();
    for row in &sorted {
        let same_cell = out.last().is_some_and(|a: &AggregateRow| {
            a.alpha.total_cmp(&row.alpha).is_eq()
                && a.frac.total_cmp(&row.frac).is_eq()
                && a.method == row.method
                && a.k == row.k
        });
        if !same_cell {
            out.push(AggregateRow {
                alpha: row.alpha,
                frac: row.frac,
                method: row.method,
                k: row.k,
                mean_accuracy: 0.0,
                std_accuracy: 0.0,
                repeats: 0,
            });
        }
        let agg = out.last_mut().unwrap();
        // Accumulate the sum in mean_accuracy, sum of squares in std.
        agg.mean_accuracy += row.accuracy;
        agg.std_accuracy += row.accuracy * row.accuracy;
        agg.repeats += 1;
    }
    for agg in out.iter_mut() {
        let n = agg.repeats as f64;
        let mean = agg.mean_accuracy / n;
        let var = if agg.repeats > 1 {
            ((agg.std_accuracy - n * mean * mean) / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        agg.mean_accuracy = mean;
        agg.std_accuracy = var.sqrt();
    }
    out
}

const CSV_HEADER: &str = "alpha,frac,method,k,seed,accuracy";

/// Write `results.csv` (long format), `summary.json` (aggregates), and one
/// accuracy-versus-train-fraction SVG per alpha value. Nothing is written
/// for an empty table.
pub fn render_outputs(table: &ResultTable, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    if table.rows.is_empty() {
        return Err(HarnessError::EmptyTable);
    }
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();

    let csv_path = out_dir.join("results.csv");
    let mut csv = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    writeln!(csv, "{CSV_HEADER}")?;
    for r in &table.rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            r.alpha, r.frac, r.method, r.k, r.seed, r.accuracy
        )?;
    }
    csv.flush()?;
    written.push(csv_path);

    let aggregates = aggregate(table);
    let summary_path = out_dir.join("summary.json");
    std::fs::write(&summary_path, serde_json::to_string_pretty(&aggregates)?)?;
    written.push(summary_path);

    let mut alphas: Vec<f64> = table.rows.iter().map(|r| r.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup_by(|a, b| a.total_cmp(b).is_eq());
    for alpha in alphas.into_iter().filter(|a| a.is_finite()) {
        let path = out_dir.join(format!("accuracy_alpha_{alpha}.svg"));
        let svg = plot_alpha(&aggregates, alpha);
        std::fs::write(&path, svg)?;
        written.push(path);
    }
    Ok(written)
}

/// Parse a `results.csv` produced by [`render_outputs`].
pub fn parse_results_csv(path: &Path) -> Result<ResultTable, HarnessError> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            if line != CSV_HEADER {
                return Err(HarnessError::CsvParse {
                    line: 1,
                    msg: format!("unexpected header '{line}'"),
                });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(HarnessError::CsvParse {
                line: idx + 1,
                msg: format!("expected 6 fields, got {}", fields.len()),
            });
        }
        let parse_f = |s: &str, what: &str| {
            s.parse::<f64>().map_err(|e| HarnessError::CsvParse {
                line: idx + 1,
                msg: format!("bad {what}: {e}"),
            })
        };
        rows.push(ResultRow {
            alpha: parse_f(fields[0], "alpha")?,
            frac: parse_f(fields[1], "frac")?,
            method: fields[2].parse().map_err(|e| HarnessError::CsvParse {
                line: idx + 1,
                msg: e,
            })?,
            k: fields[3].parse().map_err(|e| HarnessError::CsvParse {
                line: idx + 1,
                msg: format!("bad k: {e}"),
            })?,
            seed: fields[4].parse().map_err(|e| HarnessError::CsvParse {
                line: idx + 1,
                msg: format!("bad seed: {e}"),
            })?,
            accuracy: parse_f(fields[5], "accuracy")?,
        });
    }
    Ok(ResultTable { rows })
}

// --------------------------------------------------------------------------
// Minimal SVG line chart: accuracy (y, fixed [0, 1]) against train fraction
// (x), one polyline per method. Numerical outputs are normative; this is a
// quick visual aid only.
// --------------------------------------------------------------------------

const PLOT_W: f64 = 640.0;
const PLOT_H: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_B: f64 = 50.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_R: f64 = 130.0;

fn plot_alpha(aggregates: &[AggregateRow], alpha: f64) -> String {
    let cells: Vec<&AggregateRow> = aggregates
        .iter()
        .filter(|a| a.alpha.total_cmp(&alpha).is_eq())
        .collect();
    let mut fracs: Vec<f64> = cells.iter().map(|c| c.frac).collect();
    fracs.sort_by(f64::total_cmp);
    fracs.dedup_by(|a, b| a.total_cmp(b).is_eq());
    let (fmin, fmax) = (fracs[0], *fracs.last().unwrap());
    let span = if (fmax - fmin).abs() < 1e-12 {
        1.0
    } else {
        fmax - fmin
    };

    let x_of = |f: f64| MARGIN_L + (f - fmin) / span * (PLOT_W - MARGIN_L - MARGIN_R);
    let y_of = |a: f64| PLOT_H - MARGIN_B - a * (PLOT_H - MARGIN_T - MARGIN_B);

    let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];
    let mut methods: Vec<(Method, usize)> = cells.iter().map(|c| (c.method, c.k)).collect();
    methods.sort();
    methods.dedup();

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_W}\" height=\"{PLOT_H}\" \
         viewBox=\"0 0 {PLOT_W} {PLOT_H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"18\" font-family=\"sans-serif\" font-size=\"14\">test accuracy vs \
         train fraction (alpha = {alpha})</text>\n",
        MARGIN_L
    ));

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = PLOT_W - MARGIN_R,
        t = MARGIN_T,
        b = PLOT_H - MARGIN_B
    ));
    for tick in 0..=5 {
        let a = tick as f64 / 5.0;
        let y = y_of(a);
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#ddd\"/>\n\
             <text x=\"{xt}\" y=\"{yt}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{a:.1}</text>\n",
            x0 = MARGIN_L,
            x1 = PLOT_W - MARGIN_R,
            xt = MARGIN_L - 6.0,
            yt = y + 4.0
        ));
    }
    for &f in &fracs {
        let x = x_of(f);
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{f}</text>\n",
            y = PLOT_H - MARGIN_B + 18.0
        ));
    }

    for (mi, &(method, k)) in methods.iter().enumerate() {
        let color = palette[mi % palette.len()];
        let mut points: Vec<(f64, f64)> = cells
            .iter()
            .filter(|c| c.method == method && c.k == k)
            .map(|c| (c.frac, c.mean_accuracy))
            .collect();
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let path: Vec<String> = points
            .iter()
            .map(|&(f, a)| format!("{:.2},{:.2}", x_of(f), y_of(a)))
            .collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for &(f, a) in &points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                x_of(f),
                y_of(a)
            ));
        }
        let ly = MARGIN_T + 16.0 * mi as f64 + 10.0;
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{ly}\" x2=\"{x1}\" y2=\"{ly}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n\
             <text x=\"{xt}\" y=\"{yt}\" font-family=\"sans-serif\" font-size=\"12\">{label}</text>\n",
            x0 = PLOT_W - MARGIN_R + 10.0,
            x1 = PLOT_W - MARGIN_R + 34.0,
            xt = PLOT_W - MARGIN_R + 40.0,
            yt = ly + 4.0,
            label = method.as_str()
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_table() -> ResultTable {
        ResultTable {
            rows: vec![
                ResultRow {
                    alpha: 0.0,
                    frac: 0.1,
                    method: Method::Jane,
                    k: 2,
                    seed: 10,
                    accuracy: 0.9,
                },
                ResultRow {
                    alpha: 0.0,
                    frac: 0.1,
                    method: Method::Jane,
                    k: 2,
                    seed: 11,
                    accuracy: 1.0,
                },
                ResultRow {
                    alpha: 0.5,
                    frac: 0.2,
                    method: Method::Lp,
                    k: 0,
                    seed: 12,
                    accuracy: 0.5,
                },
            ],
        }
    }

    #[test]
    fn cell_seed_depends_on_every_coordinate() {
        let base = cell_seed(1, 0.0, 0.1, Method::Jane, 0);
        assert_ne!(base, cell_seed(2, 0.0, 0.1, Method::Jane, 0));
        assert_ne!(base, cell_seed(1, 0.5, 0.1, Method::Jane, 0));
        assert_ne!(base, cell_seed(1, 0.0, 0.2, Method::Jane, 0));
        assert_ne!(base, cell_seed(1, 0.0, 0.1, Method::Lp, 0));
        assert_ne!(base, cell_seed(1, 0.0, 0.1, Method::Jane, 1));
        assert_eq!(base, cell_seed(1, 0.0, 0.1, Method::Jane, 0));
    }

    #[test]
    fn aggregate_hand_check() {
        let aggs = aggregate(&tiny_table());
        assert_eq!(aggs.len(), 2);
        assert!((aggs[0].mean_accuracy - 0.95).abs() < 1e-12);
        assert!((aggs[0].std_accuracy - 0.0707).abs() < 1e-4);
        assert_eq!(aggs[0].repeats, 2);
        assert_eq!(aggs[1].repeats, 1);
        assert_eq!(aggs[1].std_accuracy, 0.0);
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let table = tiny_table();
        let files = render_outputs(&table, dir.path()).unwrap();
        assert!(files.iter().any(|p| p.ends_with("results.csv")));
        let parsed = parse_results_csv(&dir.path().join("results.csv")).unwrap();
        assert_eq!(parsed, table);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        render_outputs(&tiny_table(), dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let err = render_outputs(&ResultTable::default(), dir.path()).unwrap_err();
        assert!(matches!(err, HarnessError::EmptyTable));
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }

    #[test]
    fn summary_matches_recomputed_aggregates() {
        let dir = tempfile::tempdir().unwrap();
        render_outputs(&tiny_table(), dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
        let from_json: Vec<AggregateRow> = serde_json::from_str(&text).unwrap();
        let parsed = parse_results_csv(&dir.path().join("results.csv")).unwrap();
        let recomputed = aggregate(&parsed);
        assert_eq!(from_json.len(), recomputed.len());
        for (a, b) in from_json.iter().zip(&recomputed) {
            assert!((a.mean_accuracy - b.mean_accuracy).abs() < 1e-12);
            assert!((a.std_accuracy - b.std_accuracy).abs() < 1e-12);
        }
    }

    #[test]
    fn svg_written_per_alpha() {
        let dir = tempfile::tempdir().unwrap();
        let files = render_outputs(&tiny_table(), dir.path()).unwrap();
        let svgs: Vec<_> = files
            .iter()
            .filter(|p| p.extension().is_some_and(|e| e == "svg"))
            .collect();
        assert_eq!(svgs.len(), 2);
        let body = std::fs::read_to_string(svgs[0]).unwrap();
        assert!(body.starts_with("<svg"));
        assert!(body.contains("polyline"));
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = SweepSpec {
            repeats: 0,
            ..SweepSpec::default()
        };
        assert!(matches!(
            run_sweep(&spec),
            Err(HarnessError::InvalidSpec(_))
        ));
    }
}

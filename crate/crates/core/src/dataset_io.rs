//! Canonical on-disk dataset format and its loader/saver.
//!
//! A dataset directory holds:
//!   - `edges.txt`    edge list, one `i j` line per edge
//!   - `X.csv`        n rows of d comma-separated feature values
//!   - `y.csv`        one `node,label` line per node; `?` marks unknown
//!   - `splits.json`  `{"train": [...], "val": [...], "test": [...]}`
//!   - `meta.json`    generator config, when the dataset is synthetic
//!   - `manifest.json` dimensions, sha256 per file, label table, id remap
//!
//! Feature values round-trip exactly: floats are written with Rust's
//! shortest-representation formatting, which parses back to the identical
//! bits. Labels are strings on disk, mapped to dense indices (manifest
//! order when present, else first-seen order).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::genmodel::{Dataset, SynthConfig};
use crate::graph::{self, Graph};

#[derive(Debug, Error)]
pub enum DatasetIoError {
    #[error("missing file {0}")]
    MissingFile(PathBuf),
    #[error("{file} line {line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown label value: {0}")]
    UnknownLabelValue(String),
    #[error("checksum mismatch for {file}: manifest {expected}, found {found}")]
    ChecksumMismatch {
        file: String,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub n: usize,
    pub d: usize,
    pub num_classes: usize,
    /// Class names in dense-index order.
    pub labels: Vec<String>,
    /// sha256 hex digest per file name.
    pub checksums: BTreeMap<String, String>,
    /// Original node id per current node index (identity when the saver
    /// wrote a dataset that was never filtered).
    pub id_remap: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SplitsFile {
    train: Vec<usize>,
    val: Vec<usize>,
    test: Vec<usize>,
}

/// A loaded dataset plus everything the loader decided along the way.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub graph: Graph,
    /// Class names in dense-index order.
    pub labels: Vec<String>,
    /// Original node ids dropped by largest-component extraction.
    pub dropped_nodes: Vec<usize>,
    /// Original node id per current node index.
    pub id_remap: Vec<usize>,
    pub synth: Option<SynthConfig>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Write the dataset in canonical form and return the manifest (also
/// written as `manifest.json`).
pub fn save_dataset(
    ds: &Dataset,
    g: &Graph,
    dir: &Path,
    synth: Option<&SynthConfig>,
) -> Result<DatasetManifest, DatasetIoError> {
    if ds.n() != g.n() {
        return Err(DatasetIoError::DimensionMismatch(format!(
            "dataset has {} nodes, graph has {}",
            ds.n(),
            g.n()
        )));
    }
    std::fs::create_dir_all(dir)?;
    let mut checksums = BTreeMap::new();

    let mut edges = Vec::new();
    for &(i, j) in g.edges() {
        edges.extend_from_slice(format!("{i} {j}\n").as_bytes());
    }
    write_file(dir, "edges.txt", &edges, &mut checksums)?;

    let mut x_csv = Vec::new();
    for row in ds.x.rows() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        x_csv.extend_from_slice(fields.join(",").as_bytes());
        x_csv.push(b'\n');
    }
    write_file(dir, "X.csv", &x_csv, &mut checksums)?;

    let labels: Vec<String> = (0..ds.num_classes).map(|c| c.to_string()).collect();
    let mut y_csv = Vec::new();
    for (i, label) in ds.y.iter().enumerate() {
        let token = match label {
            Some(c) => labels[*c].as_str(),
            None => "?",
        };
        y_csv.extend_from_slice(format!("{i},{token}\n").as_bytes());
    }
    write_file(dir, "y.csv", &y_csv, &mut checksums)?;

    let splits = SplitsFile {
        train: ds.train.clone(),
        val: ds.val.clone(),
        test: ds.test.clone(),
    };
    write_file(
        dir,
        "splits.json",
        serde_json::to_string_pretty(&splits)?.as_bytes(),
        &mut checksums,
    )?;

    if let Some(cfg) = synth {
        write_file(
            dir,
            "meta.json",
            serde_json::to_string_pretty(cfg)?.as_bytes(),
            &mut checksums,
        )?;
    }

    let manifest = DatasetManifest {
        n: ds.n(),
        d: ds.d(),
        num_classes: ds.num_classes,
        labels,
        checksums,
        id_remap: (0..ds.n()).collect(),
    };
    std::fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(manifest)
}

fn write_file(
    dir: &Path,
    name: &str,
    bytes: &[u8],
    checksums: &mut BTreeMap<String, String>,
) -> Result<(), DatasetIoError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(name))?);
    f.write_all(bytes)?;
    f.flush()?;
    checksums.insert(name.to_string(), sha256_hex(bytes));
    Ok(())
}

fn read_required(dir: &Path, name: &str) -> Result<Vec<u8>, DatasetIoError> {
    let path = dir.join(name);
    if !path.exists() {
        return Err(DatasetIoError::MissingFile(path));
    }
    Ok(std::fs::read(path)?)
}

/// Load a canonical dataset directory. Checksums are verified when a
/// manifest is present; a disconnected graph is reduced to its largest
/// component with all per-node data filtered and the remap reported.
pub fn load_dataset(dir: &Path) -> Result<LoadedDataset, DatasetIoError> {
    let manifest: Option<DatasetManifest> = if dir.join("manifest.json").exists() {
        Some(serde_json::from_slice(&std::fs::read(
            dir.join("manifest.json"),
        )?)?)
    } else {
        None
    };

    let mut file_bytes = BTreeMap::new();
    for name in ["edges.txt", "X.csv", "y.csv", "splits.json"] {
        file_bytes.insert(name.to_string(), read_required(dir, name)?);
    }
    let meta_bytes = if dir.join("meta.json").exists() {
        Some(std::fs::read(dir.join("meta.json"))?)
    } else {
        None
    };

    if let Some(m) = &manifest {
        for (name, expected) in &m.checksums {
            let bytes = match name.as_str() {
                "meta.json" => meta_bytes.as_deref(),
                other => file_bytes.get(other).map(|v| v.as_slice()),
            };
            let bytes = bytes.ok_or_else(|| DatasetIoError::MissingFile(dir.join(name)))?;
            let found = sha256_hex(bytes);
            if &found != expected {
                return Err(DatasetIoError::ChecksumMismatch {
                    file: name.clone(),
                    expected: expected.clone(),
                    found,
                });
            }
        }
    }

    // X.csv decides n and d.
    let (x, n, d) = parse_features(&file_bytes["X.csv"])?;
    if let Some(m) = &manifest {
        if m.n != n || m.d != d {
            return Err(DatasetIoError::DimensionMismatch(format!(
                "manifest declares {}x{}, X.csv holds {}x{}",
                m.n, m.d, n, d
            )));
        }
    }

    let (y, labels) = parse_labels(&file_bytes["y.csv"], n, manifest.as_ref())?;
    let num_classes = labels.len().max(1);

    let edge_pairs = graph::parse_edge_list(std::io::Cursor::new(&file_bytes["edges.txt"]))
        .map_err(graph_err_to_io)?;
    for &(a, b) in &edge_pairs {
        if a >= n || b >= n {
            return Err(DatasetIoError::DimensionMismatch(format!(
                "edge ({a}, {b}) references a node outside 0..{n}"
            )));
        }
    }
    let graph = Graph::from_edges(n, &edge_pairs)?;

    let splits: SplitsFile = serde_json::from_slice(&file_bytes["splits.json"])?;
    for (name, split) in [
        ("train", &splits.train),
        ("val", &splits.val),
        ("test", &splits.test),
    ] {
        for &i in split {
            if i >= n {
                return Err(DatasetIoError::DimensionMismatch(format!(
                    "{name} split references node {i} but n={n}"
                )));
            }
        }
    }

    let synth: Option<SynthConfig> = match meta_bytes {
        Some(bytes) => Some(serde_json::from_slice(&bytes)?),
        None => None,
    };

    // Largest-component reduction when needed.
    let (graph, kept) = if graph.is_connected() {
        (graph.clone(), (0..n).collect::<Vec<_>>())
    } else {
        graph.largest_component()
    };
    let mut new_id = vec![usize::MAX; n];
    for (new, &old) in kept.iter().enumerate() {
        new_id[old] = new;
    }
    let dropped: Vec<usize> = (0..n).filter(|&i| new_id[i] == usize::MAX).collect();

    let filter_split = |split: &[usize]| -> Vec<usize> {
        split
            .iter()
            .filter(|&&i| new_id[i] != usize::MAX)
            .map(|&i| new_id[i])
            .collect()
    };
    let x = if dropped.is_empty() {
        x
    } else {
        ndarray::stack(
            ndarray::Axis(0),
            &kept.iter().map(|&i| x.row(i)).collect::<Vec<_>>(),
        )
        .expect("rows share shape")
    };
    let y: Vec<Option<usize>> = kept.iter().map(|&i| y[i]).collect();

    let dataset = Dataset {
        x,
        y,
        num_classes,
        train: filter_split(&splits.train),
        val: filter_split(&splits.val),
        test: filter_split(&splits.test),
        true_u: None,
    };
    dataset
        .validate_splits()
        .map_err(|e| DatasetIoError::UnknownLabelValue(e.to_string()))?;

    Ok(LoadedDataset {
        dataset,
        graph,
        labels,
        dropped_nodes: dropped,
        id_remap: kept,
        synth,
    })
}

fn graph_err_to_io(e: graph::GraphError) -> DatasetIoError {
    match e {
        graph::GraphError::Parse { line, msg } => DatasetIoError::Parse {
            file: "edges.txt".into(),
            line,
            msg,
        },
        other => DatasetIoError::Graph(other),
    }
}

fn parse_features(bytes: &[u8]) -> Result<(Array2<f64>, usize, usize), DatasetIoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| DatasetIoError::Parse {
        file: "X.csv".into(),
        line: 0,
        msg: format!("not utf-8: {e}"),
    })?;
    let mut values = Vec::new();
    let mut d = None;
    let mut n = 0;
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match d {
            None => d = Some(fields.len()),
            Some(want) if want != fields.len() => {
                return Err(DatasetIoError::DimensionMismatch(format!(
                    "X.csv line {} has {} fields, expected {}",
                    idx + 1,
                    fields.len(),
                    want
                )));
            }
            _ => {}
        }
        for (col, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|e| DatasetIoError::Parse {
                file: "X.csv".into(),
                line: idx + 1,
                msg: format!("column {}: {e}", col + 1),
            })?;
            values.push(v);
        }
        n += 1;
    }
    let d = d.unwrap_or(0);
    if n == 0 || d == 0 {
        return Err(DatasetIoError::DimensionMismatch(
            "X.csv holds no feature matrix".into(),
        ));
    }
    let x = Array2::from_shape_vec((n, d), values).expect("counted shape");
    Ok((x, n, d))
}

fn parse_labels(
    bytes: &[u8],
    n: usize,
    manifest: Option<&DatasetManifest>,
) -> Result<(Vec<Option<usize>>, Vec<String>), DatasetIoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| DatasetIoError::Parse {
        file: "y.csv".into(),
        line: 0,
        msg: format!("not utf-8: {e}"),
    })?;
    let mut labels: Vec<String> = manifest.map(|m| m.labels.clone()).unwrap_or_default();
    let from_manifest = manifest.is_some();
    let mut y: Vec<Option<usize>> = vec![None; n];
    let mut seen = vec![false; n];
    for (idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (node_str, token) = line.split_once(',').ok_or_else(|| DatasetIoError::Parse {
            file: "y.csv".into(),
            line: idx + 1,
            msg: "expected 'node,label'".into(),
        })?;
        let node: usize = node_str.trim().parse().map_err(|e| DatasetIoError::Parse {
            file: "y.csv".into(),
            line: idx + 1,
            msg: format!("bad node id: {e}"),
        })?;
        if node >= n {
            return Err(DatasetIoError::DimensionMismatch(format!(
                "y.csv line {} references node {node} but n={n}",
                idx + 1
            )));
        }
        if seen[node] {
            return Err(DatasetIoError::Parse {
                file: "y.csv".into(),
                line: idx + 1,
                msg: format!("node {node} labeled twice"),
            });
        }
        seen[node] = true;
        let token = token.trim();
        if token == "?" {
            continue;
        }
        if token.is_empty() {
            return Err(DatasetIoError::UnknownLabelValue(format!(
                "empty label token at y.csv line {}",
                idx + 1
            )));
        }
        let class = match labels.iter().position(|l| l == token) {
            Some(c) => c,
            None if from_manifest => {
                return Err(DatasetIoError::UnknownLabelValue(format!(
                    "label '{token}' not in the manifest label table"
                )));
            }
            None => {
                labels.push(token.to_string());
                labels.len() - 1
            }
        };
        y[node] = Some(class);
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(DatasetIoError::DimensionMismatch(format!(
            "y.csv has no line for node {missing}"
        )));
    }
    Ok((y, labels))
}

//! Undirected graph storage, degree/Laplacian construction, and structural
//! validation shared by every other module.
//!
//! Graphs are simple (no self-loops, no multi-edges) and stored as a sorted
//! edge list plus CSR-style neighbor rows, so that both edge iteration and
//! membership tests are cheap. Node ids are dense `0..n`.

use std::io::BufRead;
use std::path::Path;

use ndarray::Array2;
use thiserror::Error;

/// Dense conversion is reserved for test oracles and small instances.
pub const MAX_DENSE_N: usize = 2000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node index {node} out of range for n={n}")]
    IndexOutOfRange { node: usize, n: usize },
    #[error("self-loop on node {node}")]
    SelfLoop { node: usize },
    #[error("dense conversion refused for n={n} (limit {limit})")]
    DenseTooLarge { n: usize, limit: usize },
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Simple undirected graph over nodes `0..n`.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    /// Unique undirected edges with `i < j`, sorted lexicographically.
    edges: Vec<(u32, u32)>,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    connected: bool,
}

impl Graph {
    /// Build a graph from an edge list. Pairs may appear in either
    /// orientation and more than once; duplicates collapse to one edge.
    /// Self-loops and out-of-range endpoints are rejected. A graph with
    /// more than one component is accepted but flagged as disconnected.
    pub fn from_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut edges: Vec<(u32, u32)> = Vec::with_capacity(pairs.len());
        for &(a, b) in pairs {
            if a >= n {
                return Err(GraphError::IndexOutOfRange { node: a, n });
            }
            if b >= n {
                return Err(GraphError::IndexOutOfRange { node: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop { node: a });
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            edges.push((lo as u32, hi as u32));
        }
        edges.sort_unstable();
        edges.dedup();

        // CSR over the symmetrized adjacency.
        let mut deg = vec![0usize; n];
        for &(i, j) in &edges {
            deg[i as usize] += 1;
            deg[j as usize] += 1;
        }
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + deg[i];
        }
        let mut col_idx = vec![0u32; row_ptr[n]];
        let mut cursor = row_ptr.clone();
        for &(i, j) in &edges {
            col_idx[cursor[i as usize]] = j;
            cursor[i as usize] += 1;
            col_idx[cursor[j as usize]] = i;
            cursor[j as usize] += 1;
        }
        for i in 0..n {
            col_idx[row_ptr[i]..row_ptr[i + 1]].sort_unstable();
        }

        let mut g = Graph {
            n,
            edges,
            row_ptr,
            col_idx,
            connected: false,
        };
        g.connected = g.bfs_reaches_all(0);
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Unique undirected edges, `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// Neighbors of `i` in ascending order.
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// True iff every node is reachable from node 0.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    fn bfs_reaches_all(&self, start: usize) -> bool {
        if self.n == 0 {
            return true;
        }
        self.component_of(start).len() == self.n
    }

    fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        let mut members = vec![start];
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        members
    }

    /// All connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let comp = self.component_of(start);
            for &v in &comp {
                seen[v] = true;
            }
            out.push(comp);
        }
        out
    }

    /// Extract the largest connected component (ties broken by smallest
    /// member node). Returns the induced subgraph with nodes relabeled to
    /// `0..m`, plus the original ids in new-id order.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let comps = self.components();
        let keep = comps
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
            .cloned()
            .unwrap_or_default();
        let mut new_id = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            new_id[old] = new;
        }
        let sub_edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(i, j)| new_id[i as usize] != usize::MAX && new_id[j as usize] != usize::MAX)
            .map(|&(i, j)| (new_id[i as usize], new_id[j as usize]))
            .collect();
        let g = Graph::from_edges(keep.len(), &sub_edges).expect("relabeled edges are valid");
        (g, keep)
    }

    /// Unnormalized Laplacian `L = D - A`.
    #[allow(clippy::needless_range_loop)]
    pub fn laplacian(&self) -> Laplacian {
        let n = self.n;
        let mut row_ptr = vec![0usize; n + 1];
        for i in 0..n {
            row_ptr[i + 1] = row_ptr[i] + self.degree(i) + 1;
        }
        let mut col_idx = vec![0u32; row_ptr[n]];
        let mut values = vec![0f64; row_ptr[n]];
        for i in 0..n {
            let mut pos = row_ptr[i];
            let mut wrote_diag = false;
            for &j in self.neighbors(i) {
                if !wrote_diag && (j as usize) > i {
                    col_idx[pos] = i as u32;
                    values[pos] = self.degree(i) as f64;
                    pos += 1;
                    wrote_diag = true;
                }
                col_idx[pos] = j;
                values[pos] = -1.0;
                pos += 1;
            }
            if !wrote_diag {
                col_idx[pos] = i as u32;
                values[pos] = self.degree(i) as f64;
            }
        }
        Laplacian {
            n,
            row_ptr,
            col_idx,
            values,
            connected: self.connected,
        }
    }
}

/// Sparse symmetric `L = D - A` with rows sorted by column.
#[derive(Debug, Clone)]
pub struct Laplacian {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
    connected: bool,
}

impl Laplacian {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// `y = L x`.
    #[allow(clippy::needless_range_loop)]
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut sum = 0.0;
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                sum += self.values[idx] * x[self.col_idx[idx] as usize];
            }
            y[i] = sum;
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.values[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .sum()
            })
            .collect()
    }

    pub fn to_dense(&self) -> Result<Array2<f64>, GraphError> {
        if self.n > MAX_DENSE_N {
            return Err(GraphError::DenseTooLarge {
                n: self.n,
                limit: MAX_DENSE_N,
            });
        }
        let mut a = Array2::zeros((self.n, self.n));
        for i in 0..self.n {
            for idx in self.row_ptr[i]..self.row_ptr[i + 1] {
                a[(i, self.col_idx[idx] as usize)] = self.values[idx];
            }
        }
        Ok(a)
    }
}

/// Parse an edge-list file: one edge per line, two whitespace-separated
/// integer tokens; blank lines and lines starting with '#' are ignored.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Vec<(usize, usize)>, GraphError> {
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tok = trimmed.split_whitespace();
        let parse = |t: Option<&str>, lineno: usize| -> Result<usize, GraphError> {
            t.ok_or_else(|| GraphError::Parse {
                line: lineno + 1,
                msg: "expected two integer tokens".into(),
            })?
            .parse::<usize>()
            .map_err(|e| GraphError::Parse {
                line: lineno + 1,
                msg: format!("invalid node id: {e}"),
            })
        };
        let a = parse(tok.next(), lineno)?;
        let b = parse(tok.next(), lineno)?;
        if tok.next().is_some() {
            return Err(GraphError::Parse {
                line: lineno + 1,
                msg: "expected exactly two tokens".into(),
            });
        }
        edges.push((a, b));
    }
    Ok(edges)
}

/// Read an edge-list file from disk.
pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>, GraphError> {
    let file = std::fs::File::open(path)?;
    parse_edge_list(std::io::BufReader::new(file))
}

/// Write edges as a canonical edge-list file (one `i j` line per edge).
pub fn write_edge_list(g: &Graph, path: &Path) -> Result<(), GraphError> {
    use std::io::Write;
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for &(i, j) in g.edges() {
        writeln!(out, "{} {}", i, j)?;
    }
    out.flush()?;
    Ok(())
}

//! Dense graph and binary-table types, degree statistics and block extraction.
//!
//! Storage is a dense row-major bit matrix. That keeps the inner loops of the
//! fitting code branch-free and is comfortable up to roughly 20k vertices
//! (400M cells); beyond that a sparse representation would be needed.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("adjacency matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("adjacency matrix must be square, got {rows} rows with a row of length {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("table rows have unequal lengths ({expected} vs {found})")]
    Ragged { expected: usize, found: usize },
    #[error("cluster {cluster} out of range for k = {k}")]
    ClusterOutOfRange { cluster: usize, k: usize },
    #[error("k must be at least 1")]
    ZeroClusters,
    #[error("bipartite block needs two distinct clusters, got {0} twice")]
    SameCluster(usize),
}

/// Simple undirected graph: symmetric 0/1 adjacency with zero diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
        }
    }

    /// Builds a graph from 0-based edge pairs. Self-loops and repeated edges
    /// (in either orientation) are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn from_adjacency(rows: &[Vec<u8>]) -> Result<Self, GraphError> {
        let n = rows.len();
        let mut g = Graph::empty(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                if x != 0 && i == j {
                    return Err(GraphError::SelfLoop(i));
                }
                g.adj[i * n + j] = x != 0;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if g.adj[i * n + j] != g.adj[j * n + i] {
                    return Err(GraphError::NotSymmetric(i, j));
                }
            }
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for w in [u, v] {
            if w >= self.n {
                return Err(GraphError::VertexOutOfRange { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.has_edge(u, v) {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.adj[u * self.n + v] = true;
        self.adj[v * self.n + u] = true;
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.adj[i * self.n..(i + 1) * self.n]
    }

    pub fn degrees(&self) -> DegreeSequence {
        DegreeSequence(
            (0..self.n)
                .map(|i| self.row(i).iter().filter(|&&a| a).count())
                .collect(),
        )
    }

    pub fn edge_count(&self) -> usize {
        self.degrees().0.iter().sum::<usize>() / 2
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if self.has_edge(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Graph with vertices relabeled so that old vertex `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            g.adj[perm[i] * self.n + perm[j]] = true;
            g.adj[perm[j] * self.n + perm[i]] = true;
        }
        g
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }
}

/// An m x n binary table, equivalently a bipartite graph between row and
/// column vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteTable {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl BipartiteTable {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BipartiteTable {
            rows,
            cols,
            data: vec![false; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, GraphError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut t = BipartiteTable::zeros(m, n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::Ragged {
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                t.data[i * n + j] = x != 0;
            }
        }
        Ok(t)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i * self.cols + j] = value;
    }

    pub fn total(&self) -> usize {
        self.data.iter().filter(|&&a| a).count()
    }

    pub fn transpose(&self) -> BipartiteTable {
        let mut t = BipartiteTable::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn margins(&self) -> Margins {
        let mut rows = vec![0; self.rows];
        let mut cols = vec![0; self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    rows[i] += 1;
                    cols[j] += 1;
                }
            }
        }
        Margins { rows, cols }
    }
}

/// Row and column sums of a binary table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Margins {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Hard assignment of `n` vertices to `k` clusters, stored 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self, GraphError> {
        if k == 0 {
            return Err(GraphError::ZeroClusters);
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= k) {
            return Err(GraphError::ClusterOutOfRange { cluster: bad, k });
        }
        Ok(Partition { labels, k })
    }

    /// Everything in cluster 0.
    pub fn trivial(n: usize) -> Self {
        Partition {
            labels: vec![0; n],
            k: 1,
        }
    }

    /// Contiguous blocks of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(u, &s)| std::iter::repeat_n(u, s))
            .collect();
        Partition {
            labels,
            k: sizes.len().max(1),
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn set_label(&mut self, i: usize, u: usize) {
        assert!(u < self.k);
        self.labels[i] = u;
    }

    /// Vertices of cluster `u` in increasing order.
    pub fn members(&self, u: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| (c == u).then_some(i))
            .collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &c in &self.labels {
            s[c] += 1;
        }
        s
    }

    /// Applies `map[old] = new` to every label.
    pub fn relabeled(&self, map: &[usize]) -> Partition {
        Partition {
            labels: self.labels.iter().map(|&c| map[c]).collect(),
            k: self.k,
        }
    }
}

/// Induced subgraph together with the original index of each of its vertices.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    pub vertices: Vec<usize>,
}

/// Bipartite block between two clusters with row/column index maps.
#[derive(Clone, Debug)]
pub struct BipartiteBlock {
    pub table: BipartiteTable,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

pub fn induced_subgraph(g: &Graph, vertices: &[usize]) -> Graph {
    let m = vertices.len();
    let mut sub = Graph::empty(m);
    for (a, &i) in vertices.iter().enumerate() {
        for (b, &j) in vertices.iter().enumerate() {
            sub.adj[a * m + b] = g.has_edge(i, j);
        }
    }
    sub
}

/// Subgraph induced by cluster `u`. An empty cluster yields a 0-vertex graph.
pub fn extract_subgraph(g: &Graph, p: &Partition, u: usize) -> Result<Subgraph, GraphError> {
    if u >= p.k() {
        return Err(GraphError::ClusterOutOfRange { cluster: u, k: p.k() });
    }
    let vertices = p.members(u);
    Ok(Subgraph {
        graph: induced_subgraph(g, &vertices),
        vertices,
    })
}

/// Rows indexed by cluster `u`, columns by cluster `v`.
pub fn extract_bipartite(
    g: &Graph,
    p: &Partition,
    u: usize,
    v: usize,
) -> Result<BipartiteBlock, GraphError> {
    for c in [u, v] {
        if c >= p.k() {
            return Err(GraphError::ClusterOutOfRange { cluster: c, k: p.k() });
        }
    }
    if u == v {
        return Err(GraphError::SameCluster(u));
    }
    let rows = p.members(u);
    let cols = p.members(v);
    let mut table = BipartiteTable::zeros(rows.len(), cols.len());
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            table.set(a, b, g.has_edge(i, j));
        }
    }
    Ok(BipartiteBlock { table, rows, cols })
}

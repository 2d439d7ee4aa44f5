#![allow(dead_code)]

use std::collections::HashSet;

use kbeta::graph::{BipartiteTable, Graph};
use rand::Rng;

/// Every labelled simple graph on `n` vertices, by bitmask over the pairs
/// `i < j` in row-major order.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let count = 1u64 << pairs.len();
    (0..count).map(move |mask| {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(b, _)| mask >> b & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        Graph::from_edges(n, &edges).unwrap()
    })
}

/// Sorted (non-increasing) degree sequences of all graphs on `n` vertices.
pub fn realized_degree_sequences(n: usize) -> HashSet<Vec<usize>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let mut out = HashSet::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut d = vec![0usize; n];
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                d[i] += 1;
                d[j] += 1;
            }
        }
        d.sort_unstable_by(|a, b| b.cmp(a));
        out.insert(d);
    }
    out
}

/// Exact (row sums, column sums) of every `m x n` binary table.
pub fn realized_margins(m: usize, n: usize) -> HashSet<(Vec<usize>, Vec<usize>)> {
    let mut out = HashSet::new();
    for mask in 0u64..(1u64 << (m * n)) {
        let mut r = vec![0usize; m];
        let mut c = vec![0usize; n];
        for i in 0..m {
            for j in 0..n {
                if mask >> (i * n + j) & 1 == 1 {
                    r[i] += 1;
                    c[j] += 1;
                }
            }
        }
        out.insert((r, c));
    }
    out
}

/// All vectors of length `len` with entries in `0..=max`.
pub fn all_vectors(len: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn random_graph<R: Rng>(n: usize, density: f64, rng: &mut R) -> Graph {
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < density {
                g.add_edge(i, j).unwrap();
            }
        }
    }
    g
}

pub fn random_table<R: Rng>(m: usize, n: usize, density: f64, rng: &mut R) -> BipartiteTable {
    let mut t = BipartiteTable::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            t.set(i, j, rng.gen::<f64>() < density);
        }
    }
    t
}

/// Two cliques of `size` vertices, with `bridges[t] = (a, b)` joining
/// vertex `a` of the first to vertex `b` of the second.
pub fn two_cliques(size: usize, bridges: &[(usize, usize)]) -> Graph {
    let mut g = Graph::empty(2 * size);
    for c in 0..2 {
        for a in 0..size {
            for b in (a + 1)..size {
                g.add_edge(c * size + a, c * size + b).unwrap();
            }
        }
    }
    for &(a, b) in bridges {
        g.add_edge(a, size + b).unwrap();
    }
    g
}

pub fn write_edges(dir: &std::path::Path, name: &str, edges: &[(i64, i64)]) -> std::path::PathBuf {
    let path = dir.join(name);
    let text: String = edges.iter().map(|(a, b)| format!("{a} {b}\n")).collect();
    std::fs::write(&path, text).unwrap();
    path
}

pub fn kbeta() -> std::process::Command {
    std::process::Command::new(env!("CARGO_BIN_EXE_kbeta"))
}

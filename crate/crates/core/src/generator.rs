//! Seeded sampling from the heterogeneous block model.
//!
//! All randomness comes from ChaCha8 seeded with a `u64`, and pairs are
//! visited row-major over `i < j`, so a seed gives the same graph on every
//! platform.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::affinity::{pair_probability, Affinity};
use crate::block_em::{AffinityMatrix, BlockParams};
use crate::graph::{Graph, Partition};

pub type SimRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeneratorError {
    #[error("invalid mixing weights: {0}")]
    InvalidWeights(String),
    #[error("affinity matrix is {rows}x{cols}, partition needs {n}x{k}")]
    Shape { rows: usize, cols: usize, n: usize, k: usize },
    #[error("affinity of vertex {vertex} towards cluster {cluster} is undefined")]
    Undefined { vertex: usize, cluster: usize },
    #[error("interval [{lo}, {hi}] is empty or not finite")]
    Interval { lo: f64, hi: f64 },
}

pub fn sample_memberships(pi: &[f64], n: usize, seed: u64) -> Result<Partition, GeneratorError> {
    let dist = WeightedIndex::new(pi).map_err(|e| GeneratorError::InvalidWeights(e.to_string()))?;
    let mut rng = seeded_rng(seed);
    let labels = (0..n).map(|_| dist.sample(&mut rng)).collect();
    Ok(Partition::new(labels, pi.len()).expect("sampled labels are below k"))
}

pub fn sample_graph(p: &Partition, b: &AffinityMatrix, seed: u64) -> Result<Graph, GeneratorError> {
    sample_graph_with(p, b, &mut seeded_rng(seed))
}

/// Draws one uniform per pair `i < j`, in row-major order, and places an
/// edge when it falls below the model probability.
pub fn sample_graph_with<R: Rng>(p: &Partition, b: &AffinityMatrix, rng: &mut R) -> Result<Graph, GeneratorError> {
    let n = p.n();
    if b.n() != n || b.k() != p.k() {
        return Err(GeneratorError::Shape {
            rows: b.n(),
            cols: b.k(),
            n,
            k: p.k(),
        });
    }
    let sizes = p.sizes();
    for i in 0..n {
        for v in 0..p.k() {
            if b.get(i, v) == Affinity::Undefined && sizes[v] > usize::from(p.label(i) == v) {
                return Err(GeneratorError::Undefined { vertex: i, cluster: v });
            }
        }
    }
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = pair_probability(b.get(i, p.label(j)), b.get(j, p.label(i)));
            let u: f64 = rng.gen();
            if u < prob {
                g.add_edge(i, j).expect("each pair is visited once");
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub partition: Partition,
    pub params: BlockParams,
}

/// Contiguous clusters of the given sizes, `beta_iv` drawn uniformly from
/// `intervals[c_i][v]`, then a graph sampled from those parameters. The
/// parameters are drawn first (row-major over `(i, v)`), from the same
/// stream as the edges.
pub fn planted_instance(sizes: &[usize], intervals: &[Vec<(f64, f64)>], seed: u64) -> Result<PlantedInstance, GeneratorError> {
    let k = sizes.len();
    if intervals.len() != k || intervals.iter().any(|r| r.len() != k) {
        return Err(GeneratorError::Shape {
            rows: intervals.len(),
            cols: intervals.first().map_or(0, Vec::len),
            n: k,
            k,
        });
    }
    for &(lo, hi) in intervals.iter().flatten() {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(GeneratorError::Interval { lo, hi });
        }
    }
    let partition = Partition::from_sizes(sizes);
    let n = partition.n();
    let mut rng = seeded_rng(seed);
    let mut b = AffinityMatrix::filled(n, k, Affinity::Undefined);
    for i in 0..n {
        let u = partition.label(i);
        for v in 0..k {
            let (lo, hi) = intervals[u][v];
            b.set(i, v, Affinity::from_log(rng.gen_range(lo..=hi)));
        }
    }
    let graph = sample_graph_with(&partition, &b, &mut rng)?;
    let total = n as f64;
    Ok(PlantedInstance {
        graph,
        params: BlockParams {
            pi: sizes.iter().map(|&s| s as f64 / total).collect(),
            b,
        },
        partition,
    })
}

pub const FIG1_SIZES: [usize; 3] = [190, 193, 197];

/// `FIG1_INTERVALS[u][v]`: range of `beta_iv` for `i` in cluster `u`.
pub const FIG1_INTERVALS: [[(f64, f64); 3]; 3] = [
    [(0.0, 1.0), (-1.0, 1.0), (-1.0, 0.5)],
    [(-0.75, 0.5), (-1.0, 0.0), (-0.5, 1.0)],
    [(-0.25, 0.75), (-0.25, 0.25), (-0.5, 0.5)],
];

/// The three-cluster synthetic instance with 580 vertices.
pub fn fig1_instance(seed: u64) -> PlantedInstance {
    let intervals: Vec<Vec<(f64, f64)>> = FIG1_INTERVALS.iter().map(|r| r.to_vec()).collect();
    planted_instance(&FIG1_SIZES, &intervals, seed).expect("constant intervals are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memberships() {
        let p = sample_memberships(&[1.0], 17, 3).unwrap();
        assert!(p.labels().iter().all(|&l| l == 0));

        let p = sample_memberships(&[0.5, 0.5], 10_000, 5).unwrap();
        let frac = p.sizes()[0] as f64 / 1e4;
        assert!((frac - 0.5).abs() <= 0.02, "{frac}");
        assert_eq!(p, sample_memberships(&[0.5, 0.5], 10_000, 5).unwrap());

        assert!(sample_memberships(&[0.0, 0.0], 3, 0).is_err());
        assert!(sample_memberships(&[-1.0, 2.0], 3, 0).is_err());
    }

    #[test]
    fn density_extremes() {
        let n = 100;
        let p = Partition::trivial(n);
        let g = sample_graph(&p, &AffinityMatrix::filled(n, 1, Affinity::Finite(1.0)), 1).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let sd = (pairs * 0.25).sqrt();
        assert!((g.edge_count() as f64 - pairs / 2.0).abs() <= 3.0 * sd);

        let p = Partition::trivial(50);
        let g = sample_graph(&p, &AffinityMatrix::filled(50, 1, Affinity::from_log(-10.0)), 1).unwrap();
        assert!(g.edge_count() <= 2);
    }

    #[test]
    fn undefined_entries_rejected_only_when_used() {
        let p = Partition::new(vec![0, 1, 1], 2).unwrap();
        let mut b = AffinityMatrix::filled(3, 2, Affinity::Finite(1.0));
        b.set(0, 0, Affinity::Undefined);
        assert!(sample_graph(&p, &b, 0).is_ok());
        b.set(1, 0, Affinity::Undefined);
        assert_eq!(
            sample_graph(&p, &b, 0),
            Err(GeneratorError::Undefined { vertex: 1, cluster: 0 })
        );
    }

    #[test]
    fn fig1_shape_and_ranges() {
        let inst = fig1_instance(42);
        assert_eq!(inst.partition.sizes(), vec![190, 193, 197]);
        assert_eq!(inst.graph.n(), 580);
        for i in 0..580 {
            let u = inst.partition.label(i);
            for v in 0..3 {
                let (lo, hi) = FIG1_INTERVALS[u][v];
                let beta = inst.params.b.beta(i, v);
                assert!(lo - 1e-12 <= beta && beta <= hi + 1e-12);
            }
        }
        assert_eq!(inst, fig1_instance(42));
        assert_ne!(inst.graph, fig1_instance(43).graph);
    }
}

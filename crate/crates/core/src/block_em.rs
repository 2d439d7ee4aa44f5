//! Heterogeneous stochastic block model fitted by classification EM.
//!
//! Vertices fall into `k` clusters. A vertex `i` carries one affinity
//! `b_{iv}` towards every cluster `v`, and vertices `i` in `C_u`, `j` in
//! `C_v` are tied independently with odds `b_{iv} * b_{ju}`. Given a
//! partition the likelihood splits into blocks: each cluster's induced
//! subgraph follows the alpha-beta model and each pair of clusters spans a
//! bipartite graph that follows the beta-gamma model. The M-step fits those
//! blocks; the E-step scores every vertex against every cluster by Bayes'
//! rule and reassigns it to the best one.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::affinity::{bernoulli_log_mass, bernoulli_log_mass_p, pair_probability, Affinity, Limit};
use crate::alpha::solve_alpha_graph;
use crate::generator::seeded_rng;
use crate::graph::{extract_bipartite, extract_subgraph, Graph, GraphError, Partition};
use crate::rasch::solve_beta_gamma_table;
use crate::report::{FitReport, SolverOptions};
use crate::spectral::spectral_init;

/// Log-affinity used in the E-step for a diverged entry. Matches the default
/// divergence ceiling of the inner solvers: a flagged coordinate is scored
/// as if it had stopped right at the bound.
pub const FLAG_LOG_AFFINITY: f64 = 18.420680743952367; // ln 1e8

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmError {
    #[error("k must be between 1 and n = {n}, got {k}")]
    InvalidK { k: usize, n: usize },
    #[error("initial partition covers {got} vertices, graph has {n}")]
    InitSize { got: usize, n: usize },
    #[error("initial partition has k = {got}, expected {k}")]
    InitClusters { got: usize, k: usize },
    #[error("a vertex pair must consist of two distinct vertices, got {0} twice")]
    SameVertex(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `n x k` matrix of affinities, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinityMatrix {
    n: usize,
    k: usize,
    data: Vec<Affinity>,
}

impl AffinityMatrix {
    pub fn filled(n: usize, k: usize, value: Affinity) -> Self {
        AffinityMatrix {
            n,
            k,
            data: vec![value; n * k],
        }
    }

    /// From log-affinities `beta[i][v]`.
    pub fn from_logs(beta: &[Vec<f64>]) -> Self {
        let n = beta.len();
        let k = beta.first().map_or(0, Vec::len);
        let mut m = AffinityMatrix::filled(n, k, Affinity::Undefined);
        for (i, row) in beta.iter().enumerate() {
            assert_eq!(row.len(), k, "ragged affinity rows");
            for (v, &x) in row.iter().enumerate() {
                m.set(i, v, Affinity::from_log(x));
            }
        }
        m
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, v: usize) -> Affinity {
        self.data[i * self.k + v]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: usize, a: Affinity) {
        self.data[i * self.k + v] = a;
    }

    pub fn beta(&self, i: usize, v: usize) -> f64 {
        self.get(i, v).log()
    }

    /// Columns reordered so that new column `map[v]` holds old column `v`.
    pub fn permute_columns(&self, map: &[usize]) -> AffinityMatrix {
        let mut out = AffinityMatrix::filled(self.n, self.k, Affinity::Undefined);
        for i in 0..self.n {
            for v in 0..self.k {
                out.set(i, map[v], self.get(i, v));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockParams {
    pub pi: Vec<f64>,
    pub b: AffinityMatrix,
}

/// Row-stochastic `n x k` matrix of posterior cluster probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Responsibilities {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl Responsibilities {
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        Responsibilities {
            n,
            k,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, u: usize) -> f64 {
        self.data[i * self.k + u]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitMode {
    Spectral,
    Random,
    Given(Partition),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmOptions {
    pub k: usize,
    pub outer_max: usize,
    pub inner: SolverOptions,
    /// Stop once at most this many labels change in an outer iteration.
    pub stability: usize,
    pub seed: u64,
    pub init: InitMode,
}

impl EmOptions {
    pub fn new(k: usize) -> Self {
        EmOptions {
            k,
            outer_max: 100,
            inner: SolverOptions::default(),
            stability: 0,
            seed: 0,
            init: InitMode::Spectral,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Within(usize),
    Cross(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubFit {
    pub block: Block,
    /// `None` when the block had no pairs to fit (singleton or empty
    /// cluster).
    pub report: Option<FitReport>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MStep {
    pub params: BlockParams,
    pub fits: Vec<SubFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Restart {
    pub outer: usize,
    pub cluster: usize,
    pub vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmReport {
    pub outer_iterations: usize,
    /// Labels stabilised before `outer_max`.
    pub converged: bool,
    /// Complete-data log-likelihood after each M-step.
    pub loglik_trace: Vec<f64>,
    pub label_changes: Vec<usize>,
    pub restarts: Vec<Restart>,
    pub init: String,
    pub init_fallback: Option<String>,
    /// Inner fits of the final M-step.
    pub subfits: Vec<SubFit>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockFit {
    pub partition: Partition,
    pub params: BlockParams,
    pub responsibilities: Responsibilities,
    pub report: EmReport,
}

/// Tie probability of `i` and `j` under the block model, with odds
/// `b_{i c_j} * b_{j c_i}`. Diverged entries give exactly 0 or 1.
pub fn block_edge_probability(bp: &BlockParams, p: &Partition, i: usize, j: usize) -> Result<f64, EmError> {
    if i == j {
        return Err(EmError::SameVertex(i));
    }
    Ok(pair_probability(bp.b.get(i, p.label(j)), bp.b.get(j, p.label(i))))
}

/// Complete-data log-likelihood with hard memberships, each unordered pair
/// counted once. `-inf` when a forced tie contradicts the graph.
pub fn complete_data_log_likelihood(g: &Graph, p: &Partition, bp: &BlockParams) -> f64 {
    let n = g.n();
    let mut ll = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let prob = pair_probability(bp.b.get(i, p.label(j)), bp.b.get(j, p.label(i)));
            ll += bernoulli_log_mass_p(g.has_edge(i, j), prob);
        }
    }
    ll
}

/// Posterior membership probabilities, computed in log space.
///
/// For vertex `i` and cluster `u` the score is
/// `ln pi_u + sum_{j != i} ln P(a_ij | beta_{i c_j} + beta_{j u})`, i.e. the
/// part of the complete-data likelihood that involves `i` with `i` moved to
/// `u` and everyone else kept in place. Diverged affinities enter as
/// `+-FLAG_LOG_AFFINITY` so a single contradicted forced tie cannot zero a
/// row; undefined ones are neutral.
pub fn e_step(g: &Graph, p: &Partition, bp: &BlockParams) -> Responsibilities {
    let n = g.n();
    let k = p.k();
    let beta: Vec<f64> = (0..n)
        .flat_map(|i| (0..k).map(move |v| (i, v)))
        .map(|(i, v)| bp.b.get(i, v).capped_log(FLAG_LOG_AFFINITY))
        .collect();
    let log_pi: Vec<f64> = bp.pi.iter().map(|x| x.ln()).collect();
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let row = g.row(i);
            let mut scores: Vec<f64> = (0..k)
                .map(|u| {
                    let mut s = log_pi[u];
                    for j in 0..n {
                        if j != i {
                            let eta = beta[i * k + p.label(j)] + beta[j * k + u];
                            s += bernoulli_log_mass(row[j], eta);
                        }
                    }
                    s
                })
                .collect();
            normalize_log_row(&mut scores);
            scores.into_iter()
        })
        .collect();
    Responsibilities { n, k, data }
}

fn normalize_log_row(scores: &mut [f64]) {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        let k = scores.len() as f64;
        scores.iter_mut().for_each(|s| *s = 1.0 / k);
        return;
    }
    let mut total = 0.0;
    for s in scores.iter_mut() {
        *s = (*s - max).exp();
        total += *s;
    }
    scores.iter_mut().for_each(|s| *s /= total);
}

/// Mixing weights as mean responsibilities, and hard labels by argmax with
/// ties going to the smallest cluster index.
pub fn m_step_assign(r: &Responsibilities) -> (Partition, Vec<f64>) {
    let (n, k) = (r.n(), r.k());
    let mut pi = vec![0.0; k];
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let row = r.row(i);
        let mut best = 0;
        for u in 0..k {
            pi[u] += row[u];
            if row[u] > row[best] {
                best = u;
            }
        }
        labels.push(best);
    }
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);
    (Partition::new(labels, k.max(1)).expect("labels are in range by construction"), pi)
}

/// Fits every block of the partition: the alpha-beta model inside each
/// cluster and the beta-gamma model (normalized) between each pair.
pub fn m_step_fit(g: &Graph, p: &Partition, inner: &SolverOptions, pi: &[f64]) -> MStep {
    let k = p.k();
    let mut jobs: Vec<Block> = (0..k).map(Block::Within).collect();
    for u in 0..k {
        for v in (u + 1)..k {
            jobs.push(Block::Cross(u, v));
        }
    }

    enum Outcome {
        Within(Vec<usize>, Vec<Affinity>, FitReport),
        Cross(Vec<usize>, Vec<usize>, Vec<Affinity>, Vec<Affinity>, FitReport),
        Skipped,
    }

    let outcomes: Vec<(Block, Outcome)> = jobs
        .par_iter()
        .map(|&block| {
            let outcome = match block {
                Block::Within(u) => {
                    let sub = extract_subgraph(g, p, u).expect("cluster index in range");
                    if sub.vertices.len() < 2 {
                        Outcome::Skipped
                    } else {
                        let fit = solve_alpha_graph(&sub.graph, inner);
                        Outcome::Within(sub.vertices, fit.params.alpha, fit.report)
                    }
                }
                Block::Cross(u, v) => {
                    let bip = extract_bipartite(g, p, u, v).expect("distinct clusters in range");
                    if bip.rows.is_empty() || bip.cols.is_empty() {
                        Outcome::Skipped
                    } else {
                        let fit = solve_beta_gamma_table(&bip.table, inner);
                        Outcome::Cross(bip.rows, bip.cols, fit.params.rows, fit.params.cols, fit.report)
                    }
                }
            };
            (block, outcome)
        })
        .collect();

    let mut b = AffinityMatrix::filled(g.n(), k, Affinity::Undefined);
    let mut fits = Vec::with_capacity(outcomes.len());
    for (block, outcome) in outcomes {
        let report = match outcome {
            Outcome::Within(vertices, alpha, report) => {
                let Block::Within(u) = block else { unreachable!() };
                for (&i, a) in vertices.iter().zip(alpha) {
                    b.set(i, u, a);
                }
                Some(report)
            }
            Outcome::Cross(rows, cols, rp, cp, report) => {
                let Block::Cross(u, v) = block else { unreachable!() };
                for (&i, a) in rows.iter().zip(rp) {
                    b.set(i, v, a);
                }
                for (&j, a) in cols.iter().zip(cp) {
                    b.set(j, u, a);
                }
                Some(report)
            }
            Outcome::Skipped => None,
        };
        fits.push(SubFit { block, report });
    }
    MStep {
        params: BlockParams { pi: pi.to_vec(), b },
        fits,
    }
}

/// `sum_{i in C_u} beta_iv + sum_{j in C_v} beta_ju` over finite entries.
pub fn cross_pair_balance(p: &Partition, b: &AffinityMatrix, u: usize, v: usize) -> f64 {
    let side = |from: usize, to: usize| -> f64 {
        p.members(from)
            .into_iter()
            .map(|i| b.get(i, to))
            .filter(|a| a.is_finite())
            .map(|a| a.log())
            .sum()
    };
    side(u, v) + side(v, u)
}

/// Runs classification EM from the configured initial partition until the
/// labels stop changing or `outer_max` is reached.
pub fn fit_blocks(g: &Graph, opts: &EmOptions) -> Result<BlockFit, EmError> {
    let n = g.n();
    let k = opts.k;
    if k == 0 || k > n {
        return Err(EmError::InvalidK { k, n });
    }
    let mut report = EmReport {
        outer_iterations: 0,
        converged: false,
        loglik_trace: Vec::new(),
        label_changes: Vec::new(),
        restarts: Vec::new(),
        init: String::new(),
        init_fallback: None,
        subfits: Vec::new(),
    };

    let mut partition = match &opts.init {
        InitMode::Given(p) => {
            if p.n() != n {
                return Err(EmError::InitSize { got: p.n(), n });
            }
            if p.k() != k {
                return Err(EmError::InitClusters { got: p.k(), k });
            }
            report.init = "given".into();
            p.clone()
        }
        InitMode::Random => {
            report.init = "random".into();
            random_partition(n, k, opts.seed)
        }
        InitMode::Spectral => {
            report.init = "spectral".into();
            match spectral_init(g, k, opts.seed) {
                Ok(p) => p,
                Err(e) => {
                    report.init_fallback = Some(e.to_string());
                    random_partition(n, k, opts.seed)
                }
            }
        }
    };
    report.restarts.extend(fill_empty_clusters(&mut partition, None, 0));
    let mut pi: Vec<f64> = partition.sizes().iter().map(|&s| s as f64 / n as f64).collect();

    let mut last_resp = None;
    let mut mstep = None;
    for outer in 1..=opts.outer_max {
        report.outer_iterations = outer;
        let fitted = m_step_fit(g, &partition, &opts.inner, &pi);
        report
            .loglik_trace
            .push(complete_data_log_likelihood(g, &partition, &fitted.params));
        let resp = e_step(g, &partition, &fitted.params);
        let (mut next, next_pi) = m_step_assign(&resp);
        report.restarts.extend(fill_empty_clusters(&mut next, Some(&resp), outer));
        let changes = partition
            .labels()
            .iter()
            .zip(next.labels())
            .filter(|(a, b)| a != b)
            .count();
        report.label_changes.push(changes);
        pi = next_pi;
        last_resp = Some(resp);
        if changes <= opts.stability {
            report.converged = true;
            if changes == 0 {
                mstep = Some(fitted);
            }
            partition = next;
            break;
        }
        partition = next;
    }

    // refit when the returned partition differs from the last fitted one
    let mut fitted = match mstep {
        Some(m) => m,
        None => m_step_fit(g, &partition, &opts.inner, &pi),
    };
    fitted.params.pi = pi;
    report.subfits = fitted.fits;
    let responsibilities = match last_resp {
        Some(r) => r,
        None => e_step(g, &partition, &fitted.params),
    };
    Ok(BlockFit {
        partition,
        params: fitted.params,
        responsibilities,
        report,
    })
}

fn random_partition(n: usize, k: usize, seed: u64) -> Partition {
    let mut rng = seeded_rng(seed);
    let labels = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Partition::new(labels, k).expect("labels in range")
}

/// Gives every empty cluster one vertex, taken from a cluster with at least
/// two members: the vertex whose best responsibility is lowest, or the last
/// member of the largest cluster when no responsibilities are available.
fn fill_empty_clusters(p: &mut Partition, resp: Option<&Responsibilities>, outer: usize) -> Vec<Restart> {
    let mut restarts = Vec::new();
    loop {
        let sizes = p.sizes();
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            break;
        };
        let mut donors = (0..p.n()).filter(|&i| sizes[p.label(i)] >= 2);
        let vertex = match resp {
            Some(r) => donors.min_by(|&a, &b| {
                let ma = r.row(a).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mb = r.row(b).iter().copied().fold(f64::NEG_INFINITY, f64::max);
                ma.total_cmp(&mb)
            }),
            None => {
                let largest = (0..sizes.len()).max_by_key(|&u| (sizes[u], std::cmp::Reverse(u))).unwrap();
                donors.rfind(|&i| p.label(i) == largest)
            }
        };
        let Some(vertex) = vertex else {
            break;
        };
        p.set_label(vertex, empty);
        restarts.push(Restart { outer, cluster: empty, vertex });
    }
    restarts
}

/// Flags of every diverged entry of `b`, as `(vertex, cluster, limit)`.
pub fn diverged_entries(b: &AffinityMatrix) -> Vec<(usize, usize, Limit)> {
    let mut out = Vec::new();
    for i in 0..b.n() {
        for v in 0..b.k() {
            if let Some(l) = b.get(i, v).limit() {
                out.push((i, v, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::fit_alpha;

    fn two_cliques(size: usize, bridges: &[(usize, usize)]) -> Graph {
        let n = 2 * size;
        let mut g = Graph::empty(n);
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

    fn uniform_params(n: usize, k: usize, beta: f64) -> BlockParams {
        BlockParams {
            pi: vec![1.0 / k as f64; k],
            b: AffinityMatrix::filled(n, k, Affinity::from_log(beta)),
        }
    }

    #[test]
    fn edge_probability_examples() {
        let p = Partition::new(vec![0, 1, 0], 2).unwrap();
        let bp = uniform_params(3, 2, 0.0);
        assert_eq!(block_edge_probability(&bp, &p, 0, 1).unwrap(), 0.5);
        assert_eq!(block_edge_probability(&bp, &p, 1, 1), Err(EmError::SameVertex(1)));

        let mut bp = uniform_params(3, 2, 0.0);
        bp.b.set(0, 1, Affinity::Infinite(0));
        assert_eq!(block_edge_probability(&bp, &p, 0, 1).unwrap(), 1.0);

        let mut bp = uniform_params(3, 2, 0.0);
        bp.b.set(0, 1, Affinity::Finite(2.0));
        bp.b.set(1, 0, Affinity::Finite(3.0));
        assert!((block_edge_probability(&bp, &p, 0, 1).unwrap() - 6.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn e_step_degenerate_cases() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = e_step(&g, &Partition::trivial(4), &uniform_params(4, 1, 0.3));
        assert!((0..4).all(|i| r.row(i) == [1.0]));

        let p = Partition::new(vec![0, 1, 2, 0], 3).unwrap();
        let r = e_step(&g, &p, &uniform_params(4, 3, -0.4));
        for i in 0..4 {
            for &x in r.row(i) {
                assert!((x - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn e_step_survives_contradicted_flags() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        let p = Partition::new(vec![0, 0, 1], 2).unwrap();
        let mut bp = uniform_params(3, 2, 0.0);
        // vertex 2 is "never" tied to anyone, yet the flags disagree with an
        // edge elsewhere; rows must still be distributions
        for v in 0..2 {
            bp.b.set(2, v, Affinity::Zero(0));
            bp.b.set(0, v, Affinity::Zero(0));
        }
        let r = e_step(&g, &p, &bp);
        for i in 0..3 {
            let s: f64 = r.row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
            assert!(r.row(i).iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn assignment_examples() {
        let r = Responsibilities::from_rows(&[vec![0.9, 0.1], vec![0.2, 0.8]]);
        let (p, pi) = m_step_assign(&r);
        assert_eq!(p.labels(), &[0, 1]);
        assert!((pi[0] - 0.55).abs() < 1e-15 && (pi[1] - 0.45).abs() < 1e-15);

        let r = Responsibilities::from_rows(&[vec![0.5, 0.5]]);
        assert_eq!(m_step_assign(&r).0.labels(), &[0]);

        let third = 1.0 / 3.0;
        let r = Responsibilities::from_rows(&vec![vec![third; 3]; 4]);
        let (p, pi) = m_step_assign(&r);
        assert_eq!(p.labels(), &[0, 0, 0, 0]);
        assert!(pi.iter().all(|x| (x - third).abs() < 1e-15));
        assert_eq!(pi.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn single_cluster_reduces_to_alpha_fit() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]).unwrap();
        let m = m_step_fit(&g, &Partition::trivial(5), &SolverOptions::default(), &[1.0]);
        let direct = fit_alpha(&g, &SolverOptions::default()).unwrap();
        for i in 0..5 {
            assert_eq!(m.params.b.get(i, 0), direct.params.alpha[i]);
        }
        let fit = fit_blocks(
            &g,
            &EmOptions {
                init: InitMode::Random,
                ..EmOptions::new(1)
            },
        )
        .unwrap();
        assert_eq!(fit.report.outer_iterations, 1);
        assert_eq!(fit.partition, Partition::trivial(5));
        for i in 0..5 {
            assert_eq!(fit.params.b.get(i, 0), direct.params.alpha[i]);
        }
    }

    #[test]
    fn complete_graph_blocks_all_diverge() {
        let mut k4 = Graph::empty(4);
        for i in 0..4 {
            for j in (i + 1)..4 {
                k4.add_edge(i, j).unwrap();
            }
        }
        let p = Partition::new(vec![0, 0, 1, 1], 2).unwrap();
        let m = m_step_fit(&k4, &p, &SolverOptions::default(), &[0.5, 0.5]);
        for i in 0..4 {
            for v in 0..2 {
                assert!(m.params.b.get(i, v).is_infinite(), "{i} {v}");
            }
        }
        assert_eq!(complete_data_log_likelihood(&k4, &p, &m.params), 0.0);
    }

    #[test]
    fn singleton_cluster_is_undefined_within() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = Partition::new(vec![0, 1, 1], 2).unwrap();
        let m = m_step_fit(&g, &p, &SolverOptions::default(), &[1.0 / 3.0, 2.0 / 3.0]);
        assert_eq!(m.params.b.get(0, 0), Affinity::Undefined);
        let within0 = m.fits.iter().find(|f| f.block == Block::Within(0)).unwrap();
        assert!(within0.report.is_none());
    }

    #[test]
    fn complete_data_loglik_examples() {
        let c4 = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let ll = complete_data_log_likelihood(&c4, &Partition::trivial(4), &uniform_params(4, 1, 0.0));
        assert!((ll - 6.0 * 0.5f64.ln()).abs() < 1e-14);

        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let mut bp = uniform_params(2, 1, 0.0);
        bp.b.set(0, 0, Affinity::Infinite(0));
        assert_eq!(complete_data_log_likelihood(&edge, &Partition::trivial(2), &bp), 0.0);
        assert_eq!(
            complete_data_log_likelihood(&Graph::empty(2), &Partition::trivial(2), &bp),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn two_cliques_are_recovered() {
        let g = two_cliques(30, &[(0, 0), (5, 9), (17, 22)]);
        let truth = Partition::from_sizes(&[30, 30]);
        for init in [InitMode::Spectral, InitMode::Given(truth.clone())] {
            let fit = fit_blocks(&g, &EmOptions { init, ..EmOptions::new(2) }).unwrap();
            assert!(fit.report.converged);
            let same = fit.partition == truth;
            let swapped = fit.partition == truth.relabeled(&[1, 0]);
            assert!(same || swapped, "{:?}", fit.partition.labels());
        }
    }

    #[test]
    fn rejects_bad_k_and_init() {
        let g = Graph::empty(3);
        assert_eq!(
            fit_blocks(&g, &EmOptions::new(4)).unwrap_err(),
            EmError::InvalidK { k: 4, n: 3 }
        );
        assert!(fit_blocks(&g, &EmOptions::new(0)).is_err());
        let opts = EmOptions {
            init: InitMode::Given(Partition::trivial(2)),
            ..EmOptions::new(1)
        };
        assert_eq!(fit_blocks(&g, &opts).unwrap_err(), EmError::InitSize { got: 2, n: 3 });
    }

    #[test]
    fn empty_clusters_get_a_vertex() {
        let mut p = Partition::new(vec![0, 0, 0, 1], 3).unwrap();
        let restarts = fill_empty_clusters(&mut p, None, 0);
        assert_eq!(restarts.len(), 1);
        assert_eq!(p.sizes(), vec![2, 1, 1]);

        let mut p = Partition::new(vec![0, 0, 1, 1], 3).unwrap();
        let r = Responsibilities::from_rows(&[
            vec![0.9, 0.05, 0.05],
            vec![0.4, 0.3, 0.3],
            vec![0.1, 0.8, 0.1],
            vec![0.1, 0.85, 0.05],
        ]);
        let restarts = fill_empty_clusters(&mut p, Some(&r), 2);
        assert_eq!(restarts, vec![Restart { outer: 2, cluster: 2, vertex: 1 }]);
    }
}

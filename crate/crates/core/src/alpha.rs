//! Maximum likelihood fitting of the alpha-beta model for undirected graphs.
//!
//! Edges appear independently with odds `alpha_i * alpha_j` (log-odds
//! `beta_i + beta_j`). The degree sequence is sufficient, and the estimate
//! solves `d_i = sum_{j != i} alpha_i alpha_j / (1 + alpha_i alpha_j)`, found
//! with the fixed-point map
//!
//! ```text
//! alpha_i <- d_i / sum_{j != i} 1 / (1/alpha_j + alpha_i)
//! ```
//!
//! applied Jacobi-style (every coordinate from the previous iterate).

use crate::affinity::{bernoulli_log_mass_p, pair_probability, Affinity, Limit, Rank};
use crate::graph::Graph;
use crate::report::{status_to_result, Coord, Divergence, FitError, FitReport, FitStatus, SolverOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaParams {
    pub alpha: Vec<Affinity>,
}

impl AlphaParams {
    pub fn from_values(alpha: &[f64]) -> Self {
        AlphaParams {
            alpha: alpha.iter().map(|&a| Affinity::from_value(a)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn beta(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a.log()).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.alpha.iter().map(|a| a.value()).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.alpha.iter().all(|a| a.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlphaFit {
    pub params: AlphaParams,
    pub report: FitReport,
}

#[inline]
pub fn edge_probability(a_i: f64, a_j: f64) -> f64 {
    let odds = a_i * a_j;
    odds / (1.0 + odds)
}

/// Expected degrees under the model; diverged coordinates force their ties.
pub fn expected_degrees(params: &AlphaParams) -> Vec<f64> {
    let n = params.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| pair_probability(params.alpha[i], params.alpha[j]))
                .sum()
        })
        .collect()
}

/// Direct Bernoulli log-likelihood over unordered pairs. Returns `-inf` when a
/// forced tie contradicts the graph.
pub fn log_likelihood_alpha(g: &Graph, params: &AlphaParams) -> f64 {
    let n = g.n();
    assert_eq!(n, params.len(), "parameter length must match vertex count");
    let mut ll = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let p = pair_probability(params.alpha[i], params.alpha[j]);
            ll += bernoulli_log_mass_p(g.has_edge(i, j), p);
        }
    }
    ll
}

/// Log-likelihood through the degree sequence alone:
/// `-sum_{i<j} ln(1 + alpha_i alpha_j) + sum_i d_i ln alpha_i`.
/// Only meaningful for finite parameters.
pub fn log_likelihood_alpha_factorized(degrees: &[usize], params: &AlphaParams) -> f64 {
    let a = params.values();
    let n = a.len();
    let mut log_partition = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            log_partition -= (a[i] * a[j]).ln_1p();
        }
    }
    let sufficient: f64 = degrees.iter().zip(&a).map(|(&d, x)| d as f64 * x.ln()).sum();
    log_partition + sufficient
}

/// Fits the alpha model to a graph. Fails with the report attached when the
/// degree sequence is on the boundary (some coordinate diverges) or the
/// tolerance is not met within the iteration budget.
pub fn fit_alpha(g: &Graph, opts: &SolverOptions) -> Result<AlphaFit, FitError> {
    if g.n() < 2 {
        return Err(FitError::InvalidInput(format!(
            "need at least 2 vertices, got {}",
            g.n()
        )));
    }
    let fit = solve_alpha_graph(g, opts);
    status_to_result(fit.clone(), &fit.report).map(|_| fit)
}

/// Like [`fit_alpha`] but always returns the (possibly partial) estimate.
/// The report's log-likelihood is that of `g` at the returned parameters.
pub fn solve_alpha_graph(g: &Graph, opts: &SolverOptions) -> AlphaFit {
    let mut fit = solve_alpha(g.degrees().as_slice(), opts);
    fit.report.loglik = log_likelihood_alpha(g, &fit.params);
    fit
}

/// Solves the likelihood equations for a degree sequence, starting every
/// coordinate at `opts.initial`.
pub fn solve_alpha(degrees: &[usize], opts: &SolverOptions) -> AlphaFit {
    let start = vec![opts.initial; degrees.len()];
    solve_alpha_from(degrees, &start, opts)
}

/// Solves the likelihood equations from an explicit starting point.
///
/// Vertices of residual degree 0 or full residual degree are peeled off first
/// (repeatedly, since removing them changes the residual degrees of the rest)
/// and flagged as diverged. The fixed-point map then runs on the remaining
/// vertices. A coordinate leaving `[divergence_floor, divergence_ceiling]` is
/// frozen at its limit and the others keep iterating.
pub fn solve_alpha_from(degrees: &[usize], start: &[f64], opts: &SolverOptions) -> AlphaFit {
    let n = degrees.len();
    assert_eq!(start.len(), n, "start length must match degree sequence");

    let mut params = vec![Affinity::Undefined; n];
    let mut diverged = Vec::new();
    let mut active: Vec<usize> = (0..n).collect();
    let mut forced_ties = 0usize;
    let mut level: Rank = 0;

    loop {
        let size = active.len();
        if size == 0 {
            break;
        }
        let mut keep = Vec::with_capacity(size);
        let mut new_ties = 0;
        for &i in &active {
            let d = degrees[i] as i64 - forced_ties as i64;
            if size == 1 {
                // no free pairs left; the value is not identified
                params[i] = Affinity::Finite(1.0);
            } else if d <= 0 {
                params[i] = Affinity::Zero(level);
                diverged.push(Divergence { coord: Coord::Vertex(i), limit: Limit::Zero, forced: true });
            } else if d as usize >= size - 1 {
                params[i] = Affinity::Infinite(level);
                new_ties += 1;
                diverged.push(Divergence { coord: Coord::Vertex(i), limit: Limit::Infinity, forced: true });
            } else {
                keep.push(i);
            }
        }
        forced_ties += new_ties;
        level += 1;
        if keep.len() == size || size == 1 {
            if size == 1 {
                active.clear();
            }
            break;
        }
        active = keep;
    }

    let target: Vec<f64> = active
        .iter()
        .map(|&i| (degrees[i] - forced_ties) as f64)
        .collect();
    let mut x: Vec<f64> = active.iter().map(|&i| start[i]).collect();
    let mut frozen = vec![false; active.len()];

    let mut iterations = 0;
    let mut residual = 0.0;
    let mut free_converged = active.is_empty();
    let mut trace = Vec::new();
    let mut sums = vec![0.0; active.len()];

    if !active.is_empty() {
        loop {
            sweep_sums(&x, &mut sums);
            residual = active_residual(&target, &x, &sums, &frozen);
            if opts.record_trace && x.iter().all(|v| v.is_finite() && *v > 0.0) {
                trace.push(residual_system_loglik(&target, &x));
            }
            if residual <= opts.tolerance {
                free_converged = true;
                break;
            }
            if iterations >= opts.max_iter {
                break;
            }
            let next: Vec<f64> = (0..x.len())
                .map(|a| if frozen[a] { x[a] } else { target[a] / sums[a] })
                .collect();
            x = next;
            iterations += 1;
            for a in 0..x.len() {
                if frozen[a] {
                    continue;
                }
                let limit = if !(x[a] <= opts.divergence_ceiling) {
                    Some(Limit::Infinity)
                } else if x[a] < opts.divergence_floor {
                    Some(Limit::Zero)
                } else {
                    None
                };
                if let Some(limit) = limit {
                    frozen[a] = true;
                    x[a] = match limit {
                        Limit::Zero => 0.0,
                        Limit::Infinity => f64::INFINITY,
                    };
                    diverged.push(Divergence { coord: Coord::Vertex(active[a]), limit, forced: false });
                }
            }
            if frozen.iter().all(|&f| f) {
                residual = 0.0;
                break;
            }
        }
    }

    for (a, &i) in active.iter().enumerate() {
        params[i] = Affinity::from_value(x[a]);
    }

    let status = if !diverged.is_empty() {
        FitStatus::Diverged
    } else if free_converged {
        FitStatus::Converged
    } else {
        FitStatus::NotConverged
    };
    let free_loglik = if x.iter().all(|v| v.is_finite() && *v > 0.0) {
        residual_system_loglik(&target, &x)
    } else {
        f64::NAN
    };
    AlphaFit {
        params: AlphaParams { alpha: params },
        report: FitReport {
            iterations,
            final_residual: residual,
            diverged,
            loglik: free_loglik,
            status,
            free_converged,
            loglik_trace: trace,
        },
    }
}

/// `sums[i] = sum_{j != i} 1 / (1/x_j + x_i)`. Limits: `x_j = inf` gives
/// `1/x_i`, `x_j = 0` gives 0.
fn sweep_sums(x: &[f64], sums: &mut [f64]) {
    let recip: Vec<f64> = x.iter().map(|&v| 1.0 / v).collect();
    for (i, s) in sums.iter_mut().enumerate() {
        let xi = x[i];
        let mut acc = 0.0;
        for (j, &rj) in recip.iter().enumerate() {
            if j != i {
                acc += 1.0 / (rj + xi);
            }
        }
        *s = acc;
    }
}

fn active_residual(target: &[f64], x: &[f64], sums: &[f64], frozen: &[bool]) -> f64 {
    (0..x.len())
        .filter(|&a| !frozen[a])
        .map(|a| (target[a] - x[a] * sums[a]).abs())
        .fold(0.0, f64::max)
}

fn residual_system_loglik(target: &[f64], x: &[f64]) -> f64 {
    let n = x.len();
    let mut ll: f64 = target.iter().zip(x).map(|(d, v)| d * v.ln()).sum();
    for i in 0..n {
        for j in (i + 1)..n {
            ll -= (x[i] * x[j]).ln_1p();
        }
    }
    ll
}

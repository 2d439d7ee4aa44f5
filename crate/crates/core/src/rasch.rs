//! Maximum likelihood fitting of the beta-gamma model for binary tables.
//!
//! Cell `(i, j)` is 1 with odds `b_i * g_j` (log-odds `beta_i + gamma_j`).
//! The classical Rasch parameterisation `beta_i - delta_j` is the same model
//! with `gamma_j = -delta_j`. Row and column sums are sufficient; the
//! parameters are identified only up to `(b, g) -> (kappa b, g / kappa)`.
//!
//! One sweep of the solver is
//!
//! ```text
//! I.  b_i <- r_i / sum_j 1 / (1/g_j + b_i)        (old b, old g)
//! II. g_j <- c_j / sum_i 1 / (1/b_i + g_j)        (new b, old g)
//! ```
//!
//! which is a weak contraction in `ln rho`, see [`rho`].

use thiserror::Error;

use crate::affinity::{bernoulli_log_mass_p, pair_probability, Affinity, Limit, Rank};
use crate::graph::{BipartiteTable, Margins};
use crate::report::{status_to_result, Coord, Divergence, FitError, FitReport, FitStatus, SolverOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct BetaGammaParams {
    pub rows: Vec<Affinity>,
    pub cols: Vec<Affinity>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamsError {
    #[error("shape mismatch: {0}x{1} vs {2}x{3}")]
    Shape(usize, usize, usize, usize),
    #[error("parameters must be finite")]
    NotFinite,
    #[error("every coordinate diverged; nothing to normalize")]
    AllDiverged,
}

impl BetaGammaParams {
    pub fn from_values(b: &[f64], g: &[f64]) -> Self {
        BetaGammaParams {
            rows: b.iter().map(|&x| Affinity::from_value(x)).collect(),
            cols: g.iter().map(|&x| Affinity::from_value(x)).collect(),
        }
    }

    pub fn row_values(&self) -> Vec<f64> {
        self.rows.iter().map(|a| a.value()).collect()
    }

    pub fn col_values(&self) -> Vec<f64> {
        self.cols.iter().map(|a| a.value()).collect()
    }

    pub fn row_logs(&self) -> Vec<f64> {
        self.rows.iter().map(|a| a.log()).collect()
    }

    pub fn col_logs(&self) -> Vec<f64> {
        self.cols.iter().map(|a| a.log()).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.rows.iter().chain(&self.cols).all(|a| a.is_finite())
    }

    /// The equivalent parameters `(kappa b, g / kappa)`.
    pub fn scaled(&self, kappa: f64) -> Self {
        let scale = |a: &Affinity, f: f64| match a {
            Affinity::Finite(x) => Affinity::Finite(x * f),
            other => *other,
        };
        BetaGammaParams {
            rows: self.rows.iter().map(|a| scale(a, kappa)).collect(),
            cols: self.cols.iter().map(|a| scale(a, 1.0 / kappa)).collect(),
        }
    }

    pub fn probability(&self, i: usize, j: usize) -> f64 {
        pair_probability(self.rows[i], self.cols[j])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetaGammaFit {
    /// Normalized when at least one coordinate is finite.
    pub params: BetaGammaParams,
    pub report: FitReport,
}

#[inline]
pub fn table_probability(b_i: f64, g_j: f64) -> f64 {
    let odds = b_i * g_j;
    odds / (1.0 + odds)
}

/// Largest coordinate-wise ratio between two parameter vectors, in either
/// direction. `rho >= 1` with equality iff the vectors coincide, and
/// `ln rho` is a metric.
pub fn rho(p: &BetaGammaParams, q: &BetaGammaParams) -> Result<f64, ParamsError> {
    if p.rows.len() != q.rows.len() || p.cols.len() != q.cols.len() {
        return Err(ParamsError::Shape(p.rows.len(), p.cols.len(), q.rows.len(), q.cols.len()));
    }
    if !p.all_finite() || !q.all_finite() {
        return Err(ParamsError::NotFinite);
    }
    Ok(rho_values(
        &p.row_values(),
        &p.col_values(),
        &q.row_values(),
        &q.col_values(),
    ))
}

pub fn rho_values(b: &[f64], g: &[f64], b2: &[f64], g2: &[f64]) -> f64 {
    b.iter()
        .zip(b2)
        .chain(g.iter().zip(g2))
        .map(|(x, y)| (x / y).max(y / x))
        .fold(1.0, f64::max)
}

/// Rescales by `kappa` so that `sum beta + sum gamma = 0` over the finite
/// coordinates. This needs the number of finite row and column coordinates
/// to differ; when they are equal the sum does not depend on `kappa`, and
/// the representative with `sum beta = sum gamma` is returned instead.
/// Probabilities are unchanged either way.
pub fn normalize(p: &BetaGammaParams) -> Result<BetaGammaParams, ParamsError> {
    let finite_logs = |v: &[Affinity]| -> (usize, f64) {
        v.iter()
            .filter(|a| a.is_finite())
            .fold((0, 0.0), |(c, s), a| (c + 1, s + a.log()))
    };
    let (m, sum_b) = finite_logs(&p.rows);
    let (n, sum_g) = finite_logs(&p.cols);
    if m + n == 0 {
        return Err(ParamsError::AllDiverged);
    }
    let shift = if m != n {
        -(sum_b + sum_g) / (m as f64 - n as f64)
    } else {
        (sum_g - sum_b) / (m + n) as f64
    };
    let shift_all = |v: &[Affinity], s: f64| -> Vec<Affinity> {
        v.iter()
            .map(|a| match a {
                Affinity::Finite(x) => Affinity::Finite((x.ln() + s).exp()),
                other => *other,
            })
            .collect()
    };
    Ok(BetaGammaParams {
        rows: shift_all(&p.rows, shift),
        cols: shift_all(&p.cols, -shift),
    })
}

/// Direct Bernoulli log-likelihood of the table; `-inf` when a forced cell
/// contradicts it.
pub fn log_likelihood_bg(t: &BipartiteTable, p: &BetaGammaParams) -> f64 {
    assert_eq!((t.rows(), t.cols()), (p.rows.len(), p.cols.len()));
    let mut ll = 0.0;
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            ll += bernoulli_log_mass_p(t.get(i, j), p.probability(i, j));
        }
    }
    ll
}

/// `-sum_ij ln(1 + b_i g_j) + sum_i R_i ln b_i + sum_j C_j ln g_j`, finite
/// parameters only.
pub fn log_likelihood_bg_factorized(m: &Margins, p: &BetaGammaParams) -> f64 {
    let b = p.row_values();
    let g = p.col_values();
    let mut ll = 0.0;
    for &bi in &b {
        for &gj in &g {
            ll -= (bi * gj).ln_1p();
        }
    }
    ll += m.rows.iter().zip(&b).map(|(&r, x)| r as f64 * x.ln()).sum::<f64>();
    ll += m.cols.iter().zip(&g).map(|(&c, x)| c as f64 * x.ln()).sum::<f64>();
    ll
}

/// One full (I, II) sweep on finite parameters.
pub fn sweep(r: &[f64], c: &[f64], b: &[f64], g: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let b_next = step_rows(r, b, g, &vec![false; b.len()]);
    let g_next = step_cols(c, &b_next, g, &vec![false; g.len()]);
    (b_next, g_next)
}

fn step_rows(r: &[f64], b: &[f64], g: &[f64], frozen: &[bool]) -> Vec<f64> {
    let inv_g: Vec<f64> = g.iter().map(|&x| 1.0 / x).collect();
    (0..b.len())
        .map(|i| {
            if frozen[i] {
                b[i]
            } else {
                r[i] / half_sum(b[i], &inv_g)
            }
        })
        .collect()
}

fn step_cols(c: &[f64], b: &[f64], g: &[f64], frozen: &[bool]) -> Vec<f64> {
    let inv_b: Vec<f64> = b.iter().map(|&x| 1.0 / x).collect();
    (0..g.len())
        .map(|j| {
            if frozen[j] {
                g[j]
            } else {
                c[j] / half_sum(g[j], &inv_b)
            }
        })
        .collect()
}

/// `sum_k 1 / (inv_other_k + own)`.
#[inline]
fn half_sum(own: f64, inv_other: &[f64]) -> f64 {
    inv_other.iter().map(|&v| 1.0 / (v + own)).sum()
}

/// Fits the model to a table. Fails with the report when some margin forces
/// a diverging coordinate or the tolerance is not met in budget.
pub fn fit_beta_gamma(t: &BipartiteTable, opts: &SolverOptions) -> Result<BetaGammaFit, FitError> {
    if t.rows() == 0 || t.cols() == 0 {
        return Err(FitError::InvalidInput(format!(
            "table must be non-empty, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let fit = solve_beta_gamma_table(t, opts);
    status_to_result(fit.clone(), &fit.report).map(|_| fit)
}

/// Always returns the (possibly partial) estimate; the report's
/// log-likelihood is that of `t`.
pub fn solve_beta_gamma_table(t: &BipartiteTable, opts: &SolverOptions) -> BetaGammaFit {
    let mut fit = solve_beta_gamma(&t.margins(), opts);
    fit.report.loglik = log_likelihood_bg(t, &fit.params);
    fit
}

pub fn solve_beta_gamma(m: &Margins, opts: &SolverOptions) -> BetaGammaFit {
    let b0 = vec![opts.initial; m.rows.len()];
    let g0 = vec![opts.initial; m.cols.len()];
    solve_beta_gamma_from(m, &b0, &g0, opts)
}

/// Solves the margin equations from an explicit start.
///
/// Rows or columns whose residual sum is 0 (or saturated) are peeled off
/// first, repeatedly, and flagged as diverged to 0 (or `+inf`). The sweep
/// then runs on what is left; a coordinate leaving the divergence bounds is
/// frozen at its limit. The result is normalized once at the end.
pub fn solve_beta_gamma_from(m: &Margins, b0: &[f64], g0: &[f64], opts: &SolverOptions) -> BetaGammaFit {
    let (rows, cols) = (m.rows.len(), m.cols.len());
    assert_eq!(b0.len(), rows);
    assert_eq!(g0.len(), cols);

    let mut row_par = vec![Affinity::Undefined; rows];
    let mut col_par = vec![Affinity::Undefined; cols];
    let mut diverged = Vec::new();
    let mut active_rows: Vec<usize> = (0..rows).collect();
    let mut active_cols: Vec<usize> = (0..cols).collect();
    let mut inf_rows = 0usize;
    let mut inf_cols = 0usize;
    let mut level: Rank = 0;

    loop {
        let (ms, ns) = (active_rows.len(), active_cols.len());
        if ms == 0 || ns == 0 {
            // no free cells; the remaining side is not identified
            for &i in &active_rows {
                row_par[i] = Affinity::Finite(1.0);
            }
            for &j in &active_cols {
                col_par[j] = Affinity::Finite(1.0);
            }
            active_rows.clear();
            active_cols.clear();
            break;
        }
        let mut keep_rows = Vec::with_capacity(ms);
        let mut keep_cols = Vec::with_capacity(ns);
        let mut new_inf_rows = 0;
        let mut new_inf_cols = 0;
        for &i in &active_rows {
            let r = m.rows[i] as i64 - inf_cols as i64;
            if r <= 0 {
                row_par[i] = Affinity::Zero(level);
                diverged.push(Divergence { coord: Coord::Row(i), limit: Limit::Zero, forced: true });
            } else if r as usize >= ns {
                row_par[i] = Affinity::Infinite(level);
                new_inf_rows += 1;
                diverged.push(Divergence { coord: Coord::Row(i), limit: Limit::Infinity, forced: true });
            } else {
                keep_rows.push(i);
            }
        }
        for &j in &active_cols {
            let c = m.cols[j] as i64 - inf_rows as i64;
            if c <= 0 {
                col_par[j] = Affinity::Zero(level);
                diverged.push(Divergence { coord: Coord::Col(j), limit: Limit::Zero, forced: true });
            } else if c as usize >= ms {
                col_par[j] = Affinity::Infinite(level);
                new_inf_cols += 1;
                diverged.push(Divergence { coord: Coord::Col(j), limit: Limit::Infinity, forced: true });
            } else {
                keep_cols.push(j);
            }
        }
        inf_rows += new_inf_rows;
        inf_cols += new_inf_cols;
        level += 1;
        let unchanged = keep_rows.len() == ms && keep_cols.len() == ns;
        active_rows = keep_rows;
        active_cols = keep_cols;
        if unchanged {
            break;
        }
    }

    let r: Vec<f64> = active_rows.iter().map(|&i| (m.rows[i] - inf_cols) as f64).collect();
    let c: Vec<f64> = active_cols.iter().map(|&j| (m.cols[j] - inf_rows) as f64).collect();
    let mut b: Vec<f64> = active_rows.iter().map(|&i| b0[i]).collect();
    let mut g: Vec<f64> = active_cols.iter().map(|&j| g0[j]).collect();
    let mut frozen_b = vec![false; b.len()];
    let mut frozen_g = vec![false; g.len()];

    let mut iterations = 0;
    let mut residual = 0.0;
    let mut free_converged = b.is_empty() && g.is_empty();
    let mut trace = Vec::new();

    if !b.is_empty() {
        loop {
            residual = margin_residual(&r, &c, &b, &g, &frozen_b, &frozen_g);
            if opts.record_trace && b.iter().chain(&g).all(|v| v.is_finite() && *v > 0.0) {
                trace.push(free_loglik(&r, &c, &b, &g));
            }
            if residual <= opts.tolerance {
                free_converged = true;
                break;
            }
            if iterations >= opts.max_iter {
                break;
            }
            b = step_rows(&r, &b, &g, &frozen_b);
            freeze_out_of_bounds(&mut b, &mut frozen_b, opts, &active_rows, Coord::Row, &mut diverged);
            g = step_cols(&c, &b, &g, &frozen_g);
            freeze_out_of_bounds(&mut g, &mut frozen_g, opts, &active_cols, Coord::Col, &mut diverged);
            iterations += 1;
            if frozen_b.iter().chain(&frozen_g).all(|&f| f) {
                residual = 0.0;
                break;
            }
        }
    }

    for (a, &i) in active_rows.iter().enumerate() {
        row_par[i] = Affinity::from_value(b[a]);
    }
    for (a, &j) in active_cols.iter().enumerate() {
        col_par[j] = Affinity::from_value(g[a]);
    }
    let raw = BetaGammaParams { rows: row_par, cols: col_par };
    let params = normalize(&raw).unwrap_or(raw);

    let status = if !diverged.is_empty() {
        FitStatus::Diverged
    } else if free_converged {
        FitStatus::Converged
    } else {
        FitStatus::NotConverged
    };
    let loglik = if b.iter().chain(&g).all(|v| v.is_finite() && *v > 0.0) {
        free_loglik(&r, &c, &b, &g)
    } else {
        f64::NAN
    };
    BetaGammaFit {
        params,
        report: FitReport {
            iterations,
            final_residual: residual,
            diverged,
            loglik,
            status,
            free_converged,
            loglik_trace: trace,
        },
    }
}

fn freeze_out_of_bounds(
    x: &mut [f64],
    frozen: &mut [bool],
    opts: &SolverOptions,
    index: &[usize],
    coord: fn(usize) -> Coord,
    diverged: &mut Vec<Divergence>,
) {
    for a in 0..x.len() {
        if frozen[a] {
            continue;
        }
        let limit = if !(x[a] <= opts.divergence_ceiling) {
            Limit::Infinity
        } else if x[a] < opts.divergence_floor {
            Limit::Zero
        } else {
            continue;
        };
        frozen[a] = true;
        x[a] = match limit {
            Limit::Zero => 0.0,
            Limit::Infinity => f64::INFINITY,
        };
        diverged.push(Divergence { coord: coord(index[a]), limit, forced: false });
    }
}

fn margin_residual(r: &[f64], c: &[f64], b: &[f64], g: &[f64], frozen_b: &[bool], frozen_g: &[bool]) -> f64 {
    let inv_g: Vec<f64> = g.iter().map(|&x| 1.0 / x).collect();
    let inv_b: Vec<f64> = b.iter().map(|&x| 1.0 / x).collect();
    let rows = (0..b.len())
        .filter(|&i| !frozen_b[i])
        .map(|i| (r[i] - b[i] * half_sum(b[i], &inv_g)).abs());
    let cols = (0..g.len())
        .filter(|&j| !frozen_g[j])
        .map(|j| (c[j] - g[j] * half_sum(g[j], &inv_b)).abs());
    rows.chain(cols).fold(0.0, f64::max)
}

fn free_loglik(r: &[f64], c: &[f64], b: &[f64], g: &[f64]) -> f64 {
    let mut ll = 0.0;
    for &bi in b {
        for &gj in g {
            ll -= (bi * gj).ln_1p();
        }
    }
    ll += r.iter().zip(b).map(|(x, v)| x * v.ln()).sum::<f64>();
    ll += c.iter().zip(g).map(|(x, v)| x * v.ln()).sum::<f64>();
    ll
}

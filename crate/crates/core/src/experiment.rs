//! Parameter-recovery experiment on the three-cluster synthetic instance.

use serde::Serialize;

use crate::block_em::{fit_blocks, AffinityMatrix, BlockFit, EmError, EmOptions, InitMode};
use crate::generator::{fig1_instance, PlantedInstance};
use crate::graph::Partition;
use crate::rasch::{normalize, BetaGammaParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fig1Init {
    Truth,
    Spectral,
}

/// One scatter point: true and estimated `beta_iv` for a vertex `i`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PanelPoint {
    pub vertex: usize,
    pub truth: f64,
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PanelSummary {
    /// 1-based true cluster of the vertices in the panel.
    pub cluster: usize,
    /// 1-based cluster the affinities point to.
    pub target: usize,
    pub points: usize,
    /// Points whose estimate diverged; they are left out of `pearson` and
    /// `mae`.
    pub diverged: usize,
    pub pearson: f64,
    pub mae: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig1Summary {
    pub seed: u64,
    pub init: Fig1Init,
    pub agreement: f64,
    /// `permutation[u]` is the estimated cluster matched to true cluster `u`
    /// (both 1-based).
    pub permutation: Vec<usize>,
    pub outer_iterations: usize,
    pub converged: bool,
    pub panels: Vec<PanelSummary>,
}

#[derive(Clone, Debug)]
pub struct Fig1Run {
    pub instance: PlantedInstance,
    pub fit: BlockFit,
    /// Row-major over (true cluster, target cluster).
    pub panels: Vec<Vec<PanelPoint>>,
    pub summary: Fig1Summary,
}

/// Generates the instance, fits it with `k = 3` and scores every panel.
///
/// Cross-pair affinities are only identified up to the scaling that keeps
/// probabilities fixed, so the true values are brought to the same
/// zero-sum representative as the estimates before the comparison.
pub fn run_fig1(seed: u64, init: Fig1Init, base: &EmOptions) -> Result<Fig1Run, EmError> {
    let instance = fig1_instance(seed);
    let k = instance.partition.k();
    let opts = EmOptions {
        k,
        init: match init {
            Fig1Init::Truth => InitMode::Given(instance.partition.clone()),
            Fig1Init::Spectral => InitMode::Spectral,
        },
        seed,
        ..base.clone()
    };
    let fit = fit_blocks(&instance.graph, &opts)?;
    let (perm, agreement) = best_permutation(&instance.partition, &fit.partition);
    let truth = normalized_truth(&instance.partition, &instance.params.b);

    let mut panels = Vec::with_capacity(k * k);
    let mut summaries = Vec::with_capacity(k * k);
    for u in 0..k {
        for v in 0..k {
            let points: Vec<PanelPoint> = instance
                .partition
                .members(u)
                .into_iter()
                .map(|i| PanelPoint {
                    vertex: i,
                    truth: truth[i][v],
                    estimate: fit.params.b.beta(i, perm[v]),
                })
                .collect();
            let finite: Vec<(f64, f64)> = points
                .iter()
                .filter(|p| p.estimate.is_finite())
                .map(|p| (p.truth, p.estimate))
                .collect();
            summaries.push(PanelSummary {
                cluster: u + 1,
                target: v + 1,
                points: points.len(),
                diverged: points.len() - finite.len(),
                pearson: pearson(&finite),
                mae: mae(&finite),
            });
            panels.push(points);
        }
    }
    let summary = Fig1Summary {
        seed,
        init,
        agreement,
        permutation: perm.iter().map(|x| x + 1).collect(),
        outer_iterations: fit.report.outer_iterations,
        converged: fit.report.converged,
        panels: summaries,
    };
    Ok(Fig1Run {
        instance,
        fit,
        panels,
        summary,
    })
}

/// `beta[i][v]` with each cross pair `(u, v)` shifted so that
/// `sum_{i in C_u} beta_iv + sum_{j in C_v} beta_ju = 0`, the same
/// representative the fit reports.
pub fn normalized_truth(p: &Partition, b: &AffinityMatrix) -> Vec<Vec<f64>> {
    let k = p.k();
    let mut beta: Vec<Vec<f64>> = (0..b.n()).map(|i| (0..k).map(|v| b.beta(i, v)).collect()).collect();
    for u in 0..k {
        for v in (u + 1)..k {
            let (mu, mv) = (p.members(u), p.members(v));
            let pair = BetaGammaParams {
                rows: mu.iter().map(|&i| b.get(i, v)).collect(),
                cols: mv.iter().map(|&j| b.get(j, u)).collect(),
            };
            let Ok(pair) = normalize(&pair) else {
                continue;
            };
            for (&i, a) in mu.iter().zip(&pair.rows) {
                beta[i][v] = a.log();
            }
            for (&j, a) in mv.iter().zip(&pair.cols) {
                beta[j][u] = a.log();
            }
        }
    }
    beta
}

/// The relabeling of `estimate` that maximizes agreement with `truth`, as
/// `perm[true] = estimated`, and the agreement fraction it achieves.
pub fn best_permutation(truth: &Partition, estimate: &Partition) -> (Vec<usize>, f64) {
    let k = truth.k().max(estimate.k());
    let mut confusion = vec![vec![0usize; k]; k];
    for (&t, &e) in truth.labels().iter().zip(estimate.labels()) {
        confusion[t][e] += 1;
    }
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best = (perm.clone(), 0usize);
    let mut search = |perm: &[usize]| {
        let hits: usize = perm.iter().enumerate().map(|(t, &e)| confusion[t][e]).sum();
        if hits > best.1 {
            best = (perm.to_vec(), hits);
        }
    };
    permutations(&mut perm, 0, &mut search);
    let n = truth.n().max(1);
    let mut map = best.0;
    map.truncate(truth.k());
    (map, best.1 as f64 / n as f64)
}

fn permutations(perm: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == perm.len() {
        visit(perm);
        return;
    }
    for i in start..perm.len() {
        perm.swap(start, i);
        permutations(perm, start + 1, visit);
        perm.swap(start, i);
    }
}

/// Sample correlation; `NaN` with fewer than two points or zero variance.
pub fn pearson(xy: &[(f64, f64)]) -> f64 {
    let n = xy.len() as f64;
    if xy.len() < 2 {
        return f64::NAN;
    }
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in xy {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

pub fn mae(xy: &[(f64, f64)]) -> f64 {
    xy.iter().map(|(x, y)| (x - y).abs()).sum::<f64>() / xy.len() as f64
}

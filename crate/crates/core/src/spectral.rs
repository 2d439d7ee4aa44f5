//! Spectral initial partition: the eigenvectors of the normalized
//! adjacency matrix `D^{-1/2} A D^{-1/2}` whose eigenvalues are largest in
//! magnitude (block structure may show up as negative eigenvalues), rows
//! scaled to unit length, then
//! k-means++ with restarts.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use thiserror::Error;

use crate::generator::seeded_rng;
use crate::graph::{Graph, Partition};

const KMEANS_RESTARTS: usize = 10;
const LLOYD_MAX: usize = 300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("k must be between 1 and n = {n}, got {k}")]
    InvalidK { k: usize, n: usize },
    #[error("eigensolver did not converge")]
    EigenFailed,
}

pub fn spectral_init(g: &Graph, k: usize, seed: u64) -> Result<Partition, SpectralError> {
    let n = g.n();
    if k == 0 || k > n {
        return Err(SpectralError::InvalidK { k, n });
    }
    if k == 1 {
        return Ok(Partition::trivial(n));
    }
    let embedding = spectral_embedding(g, k)?;
    let labels = kmeans(&embedding, k, seed);
    Ok(Partition::new(labels, k).expect("k-means labels are below k"))
}

/// `n` points in `k` dimensions, each of unit length (or zero for isolated
/// vertices).
fn spectral_embedding(g: &Graph, k: usize) -> Result<Vec<Vec<f64>>, SpectralError> {
    let n = g.n();
    let scale: Vec<f64> = g
        .degrees()
        .0
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
        .collect();
    let m = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { scale[i] * scale[j] } else { 0.0 });
    let eig = SymmetricEigen::try_new(m, 1e-12, 10_000).ok_or(SpectralError::EigenFailed)?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(SpectralError::EigenFailed);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()).then(a.cmp(&b)));
    let top = &order[..k];
    Ok((0..n)
        .map(|i| {
            let mut row: Vec<f64> = top.iter().map(|&c| eig.eigenvectors[(i, c)]).collect();
            let len = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if len > 0.0 {
                row.iter_mut().for_each(|x| *x /= len);
            }
            row
        })
        .collect())
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best of several seeded k-means++ / Lloyd runs by within-cluster sum of
/// squares.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Vec<usize> {
    let mut rng = seeded_rng(seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..KMEANS_RESTARTS {
        let (inertia, labels) = lloyd(points, k, &mut rng);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    best.map(|(_, l)| l).unwrap_or_default()
}

fn plus_plus_centers<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.gen_range(0..n)].clone()];
    let mut nearest: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let mut t = rng.gen::<f64>() * total;
            let mut idx = n - 1;
            for (i, &d) in nearest.iter().enumerate() {
                if t < d {
                    idx = i;
                    break;
                }
                t -= d;
            }
            idx
        } else {
            rng.gen_range(0..n)
        };
        let c = points[pick].clone();
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centers.push(c);
    }
    centers
}

fn lloyd<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> (f64, Vec<usize>) {
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    let mut centers = plus_plus_centers(points, k, rng);
    let mut labels = vec![usize::MAX; n];
    for _ in 0..LLOYD_MAX {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.iter().enumerate() {
                let d = dist2(p, center);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // reseed an empty cluster at the point farthest from its center
                let far = (0..n)
                    .max_by(|&a, &b| {
                        dist2(&points[a], &centers[labels[a]]).total_cmp(&dist2(&points[b], &centers[labels[b]]))
                    })
                    .unwrap();
                centers[c] = points[far].clone();
            }
        }
    }
    let inertia = points.iter().zip(&labels).map(|(p, &l)| dist2(p, &centers[l])).sum();
    (inertia, labels)
}

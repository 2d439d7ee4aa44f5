//! Realizability of degree sequences and margin pairs, and a cheap screen for
//! degree sequences that certainly sit on the boundary of the degree polytope.

use serde::Serialize;

use crate::graph::Graph;

/// Erdős–Gallai test. The input may be in any order.
pub fn is_graphic(degrees: &[usize]) -> bool {
    let n = degrees.len();
    let total: usize = degrees.iter().sum();
    if !total.is_multiple_of(2) {
        return false;
    }
    if degrees.iter().any(|&d| d >= n.max(1)) && n > 0 {
        return false;
    }
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let mut head = 0usize;
    for k in 1..=n {
        head += d[k - 1];
        let tail: usize = d[k..].iter().map(|&x| x.min(k)).sum();
        if head > k * (k - 1) + tail {
            return false;
        }
    }
    true
}

/// Gale–Ryser test for a pair of margins: equal totals, no column sum above
/// the number of rows, no row sum above the number of columns, and the
/// dominance condition on the sorted row sums.
pub fn is_bipartite_realizable(rows: &[usize], cols: &[usize]) -> bool {
    let m = rows.len();
    let n = cols.len();
    if rows.iter().sum::<usize>() != cols.iter().sum::<usize>() {
        return false;
    }
    if cols.iter().any(|&c| c > m) || rows.iter().any(|&r| r > n) {
        return false;
    }
    let mut r = rows.to_vec();
    r.sort_unstable_by(|a, b| b.cmp(a));
    let mut head = 0usize;
    for k in 1..=m {
        head += r[k - 1];
        let bound: usize = cols.iter().map(|&c| c.min(k)).sum();
        if head > bound {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryReason {
    ZeroDegree,
    FullDegree,
    /// The supplied realization is a threshold graph, so its degree sequence
    /// is a vertex of the degree polytope.
    ThresholdGraph,
    NotGraphic,
    NotRealizable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict", content = "reason")]
pub enum DegreeVerdict {
    /// No boundary evidence was found. This is a screen, not a proof: the
    /// solver diverging is the authoritative signal.
    Interior,
    Boundary(BoundaryReason),
}

/// Screens a degree sequence on `n` vertices for boundary cases. When a
/// realization is supplied it is also tested for being a threshold graph.
pub fn interior_degree_check(degrees: &[usize], n: usize, realization: Option<&Graph>) -> DegreeVerdict {
    if !is_graphic(degrees) {
        return DegreeVerdict::Boundary(BoundaryReason::NotGraphic);
    }
    if degrees.contains(&0) {
        return DegreeVerdict::Boundary(BoundaryReason::ZeroDegree);
    }
    if degrees.iter().any(|&d| d + 1 == n) {
        return DegreeVerdict::Boundary(BoundaryReason::FullDegree);
    }
    if let Some(g) = realization {
        if is_threshold_graph(g) {
            return DegreeVerdict::Boundary(BoundaryReason::ThresholdGraph);
        }
    }
    DegreeVerdict::Interior
}

/// Margin counterpart of [`interior_degree_check`]: an empty or saturated
/// row or column forces its parameter to a limit.
pub fn interior_margin_check(rows: &[usize], cols: &[usize]) -> DegreeVerdict {
    if !is_bipartite_realizable(rows, cols) {
        return DegreeVerdict::Boundary(BoundaryReason::NotRealizable);
    }
    if rows.iter().chain(cols).any(|&d| d == 0) {
        return DegreeVerdict::Boundary(BoundaryReason::ZeroDegree);
    }
    if rows.contains(&cols.len()) || cols.contains(&rows.len()) {
        return DegreeVerdict::Boundary(BoundaryReason::FullDegree);
    }
    DegreeVerdict::Interior
}

/// A graph is threshold iff it can be dismantled by repeatedly deleting an
/// isolated or a dominating vertex. Equivalent to having no alternating
/// 4-cycle `ab, cd` edges with `ac, bd` non-edges.
pub fn is_threshold_graph(g: &Graph) -> bool {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = g.degrees().0;
    let mut remaining = n;
    while remaining > 0 {
        let pick = (0..n).find(|&i| alive[i] && (deg[i] == 0 || deg[i] + 1 == remaining));
        let Some(v) = pick else {
            return false;
        };
        alive[v] = false;
        remaining -= 1;
        for j in 0..n {
            if alive[j] && g.has_edge(v, j) {
                deg[j] -= 1;
            }
        }
    }
    true
}

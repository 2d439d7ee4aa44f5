mod common;

use common::{all_graphs, random_table};
use kbeta::alpha::{expected_degrees, solve_alpha, AlphaParams};
use kbeta::generator::{sample_graph, seeded_rng};
use kbeta::graph::{extract_bipartite, extract_subgraph, BipartiteTable, Graph, Partition};
use kbeta::rasch::{
    log_likelihood_bg, normalize, rho, rho_values, solve_beta_gamma, sweep, table_probability, BetaGammaParams,
};
use kbeta::realizability::{is_graphic, is_threshold_graph};
use kbeta::report::SolverOptions;
use kbeta::block_em::AffinityMatrix;
use kbeta::Affinity;
use proptest::prelude::*;
use rand::Rng;

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::empty(n);
            let mut b = bits.into_iter();
            for i in 0..n {
                for j in (i + 1)..n {
                    if b.next().unwrap() {
                        g.add_edge(i, j).unwrap();
                    }
                }
            }
            g
        })
    })
}

fn graph_and_partition(max_n: usize, max_k: usize) -> impl Strategy<Value = (Graph, Partition)> {
    graph_strategy(max_n).prop_flat_map(move |g| {
        let n = g.n();
        (1..=max_k).prop_flat_map(move |k| {
            let g = g.clone();
            proptest::collection::vec(0..k, n).prop_map(move |labels| (g.clone(), Partition::new(labels, k).unwrap()))
        })
    })
}

/// Brute-force threshold test: an alternating 4-cycle is `ab`, `cd` edges
/// with `ac`, `bd` non-edges on four distinct vertices.
fn has_alternating_four_cycle(g: &Graph) -> bool {
    let n = g.n();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let distinct = a != b && a != c && a != d && b != c && b != d && c != d;
                    if distinct && g.has_edge(a, b) && g.has_edge(c, d) && !g.has_edge(a, c) && !g.has_edge(b, d) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

#[test]
fn threshold_graphs_match_four_cycle_oracle() {
    for n in 0..=6 {
        for g in all_graphs(n) {
            assert_eq!(is_threshold_graph(&g), !has_alternating_four_cycle(&g), "{:?}", g.edges());
        }
    }
}

#[test]
fn rasch_iterates_approach_the_fixed_point_monotonically() {
    let mut rng = seeded_rng(21);
    let mut instances = 0;
    while instances < 30 {
        let t = random_table(rng.gen_range(2..=6), rng.gen_range(2..=6), 0.5, &mut rng);
        let fit = solve_beta_gamma(&t.margins(), &SolverOptions::default());
        if !fit.report.converged() {
            continue;
        }
        instances += 1;
        let m = t.margins();
        let r: Vec<f64> = m.rows.iter().map(|&x| x as f64).collect();
        let c: Vec<f64> = m.cols.iter().map(|&x| x as f64).collect();
        let (fb, fg) = (fit.params.row_values(), fit.params.col_values());
        let mut b: Vec<f64> = (0..r.len()).map(|_| rng.gen_range(0.1..10.0)).collect();
        let mut g: Vec<f64> = (0..c.len()).map(|_| rng.gen_range(0.1..10.0)).collect();
        let mut last = rho_values(&b, &g, &fb, &fg).ln();
        for _ in 0..50 {
            (b, g) = sweep(&r, &c, &b, &g);
            let now = rho_values(&b, &g, &fb, &fg).ln();
            assert!(now <= last + 1e-9, "{last} -> {now}");
            last = now;
        }
    }
}

#[test]
fn converged_fits_meet_the_margin_equations() {
    let mut rng = seeded_rng(22);
    let opts = SolverOptions::default();
    let mut seen = 0;
    while seen < 40 {
        let t = random_table(rng.gen_range(2..=7), rng.gen_range(2..=7), 0.5, &mut rng);
        let fit = solve_beta_gamma(&t.margins(), &opts);
        if !fit.report.converged() {
            continue;
        }
        seen += 1;
        let m = t.margins();
        for i in 0..t.rows() {
            let s: f64 = (0..t.cols()).map(|j| fit.params.probability(i, j)).sum();
            assert!((s - m.rows[i] as f64).abs() <= opts.tolerance);
        }
        for j in 0..t.cols() {
            let s: f64 = (0..t.rows()).map(|i| fit.params.probability(i, j)).sum();
            assert!((s - m.cols[j] as f64).abs() <= opts.tolerance);
        }
    }
}

#[test]
fn converged_alpha_fits_meet_the_degree_equations() {
    let mut rng = seeded_rng(23);
    let opts = SolverOptions::default();
    let mut seen = 0;
    while seen < 40 {
        let g = common::random_graph(rng.gen_range(4..=10), 0.5, &mut rng);
        let fit = solve_alpha(&g.degrees().0, &opts);
        if !fit.report.converged() {
            continue;
        }
        seen += 1;
        for (d, e) in g.degrees().0.iter().zip(expected_degrees(&fit.params)) {
            assert!((*d as f64 - e).abs() <= opts.tolerance);
        }
    }
}

#[test]
fn sampled_edge_frequencies_match_probabilities() {
    let n = 20;
    let reps = 200;
    let p = Partition::from_sizes(&[8, 12]);
    let mut rng = seeded_rng(24);
    let beta: Vec<Vec<f64>> = (0..n).map(|_| (0..2).map(|_| rng.gen_range(-1.5..1.5)).collect()).collect();
    let b = AffinityMatrix::from_logs(&beta);
    let mut counts = vec![0usize; n * n];
    for s in 0..reps {
        let g = sample_graph(&p, &b, 1000 + s as u64).unwrap();
        for i in 0..n {
            assert!(!g.has_edge(i, i));
            for j in 0..n {
                assert_eq!(g.has_edge(i, j), g.has_edge(j, i));
                if g.has_edge(i, j) {
                    counts[i * n + j] += 1;
                }
            }
        }
    }
    let mut outside = 0;
    let pairs = n * (n - 1) / 2;
    for i in 0..n {
        for j in (i + 1)..n {
            let odds = (beta[i][p.label(j)] + beta[j][p.label(i)]).exp();
            let q = odds / (1.0 + odds);
            let sd = (reps as f64 * q * (1.0 - q)).sqrt();
            if (counts[i * n + j] as f64 - reps as f64 * q).abs() > 3.0 * sd {
                outside += 1;
            }
        }
    }
    // 3-sigma exceedances are Binomial(190, 0.0027): mean 0.5, P(> 4) < 1e-3
    assert!(outside <= 4, "{outside} of {pairs} pairs outside 3 sigma");
}

proptest! {
    #[test]
    fn graphic_is_permutation_invariant(seq in proptest::collection::vec(0usize..8, 0..8), seed in any::<u64>()) {
        let mut shuffled = seq.clone();
        let mut rng = seeded_rng(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        prop_assert_eq!(is_graphic(&seq), is_graphic(&shuffled));
    }

    #[test]
    fn bipartite_extraction_is_transpose_symmetric((g, p) in graph_and_partition(9, 4)) {
        for u in 0..p.k() {
            for v in 0..p.k() {
                if u == v {
                    prop_assert!(extract_bipartite(&g, &p, u, v).is_err());
                    continue;
                }
                let uv = extract_bipartite(&g, &p, u, v).unwrap();
                let vu = extract_bipartite(&g, &p, v, u).unwrap();
                prop_assert_eq!(&uv.table.transpose(), &vu.table);
                prop_assert_eq!(&uv.rows, &vu.cols);
            }
        }
    }

    #[test]
    fn block_edges_add_up((g, p) in graph_and_partition(10, 4)) {
        let mut total = 0;
        for u in 0..p.k() {
            total += extract_subgraph(&g, &p, u).unwrap().graph.edge_count();
            for v in (u + 1)..p.k() {
                total += extract_bipartite(&g, &p, u, v).unwrap().table.total();
            }
        }
        prop_assert_eq!(total, g.edge_count());
    }

    #[test]
    fn scaling_leaves_the_rasch_model_unchanged(
        rows in proptest::collection::vec(-3.0f64..3.0, 1..6),
        cols in proptest::collection::vec(-3.0f64..3.0, 1..6),
        log_kappa in -4.0f64..4.0,
        seed in any::<u64>(),
    ) {
        let b: Vec<f64> = rows.iter().map(|x| x.exp()).collect();
        let g: Vec<f64> = cols.iter().map(|x| x.exp()).collect();
        let p = BetaGammaParams::from_values(&b, &g);
        let q = p.scaled(log_kappa.exp());
        let t: BipartiteTable = random_table(b.len(), g.len(), 0.5, &mut seeded_rng(seed));
        for i in 0..b.len() {
            for j in 0..g.len() {
                let a = table_probability(b[i], g[j]);
                prop_assert!((a - q.probability(i, j)).abs() < 1e-12);
            }
        }
        prop_assert!((log_likelihood_bg(&t, &p) - log_likelihood_bg(&t, &q)).abs() < 1e-9);
        let (np, nq) = (normalize(&p).unwrap(), normalize(&q).unwrap());
        prop_assert!(rho(&np, &nq).unwrap().ln() < 1e-9);
    }

    #[test]
    fn alpha_params_round_trip_through_logs(beta in proptest::collection::vec(-5.0f64..5.0, 1..8)) {
        let a = AlphaParams { alpha: beta.iter().map(|&x| Affinity::from_log(x)).collect() };
        for (x, y) in a.beta().iter().zip(&beta) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }
}

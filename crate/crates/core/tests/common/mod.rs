//! Shared fixture builders for the integration suites.

#![allow(dead_code)]

use netspread_core::analysis::{classify, Regime};
use netspread_core::dynamics::{check_assumptions, SpreadParams};
use netspread_core::graph::{
    build_from_edge_list, build_geometric, NodePositions, WeightedDigraph,
};
use netspread_core::linalg::Mat;
use netspread_core::rng::SplitMix64;

pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}

/// n points drawn uniformly from the square [0, side]^2.
pub fn random_positions(rng: &mut SplitMix64, n: usize, side: f64) -> NodePositions {
    let coords = (0..n)
        .map(|_| vec![rng.range_f64(0.0, side), rng.range_f64(0.0, side)])
        .collect();
    NodePositions::new(coords).unwrap()
}

/// The 40-agent proximity fixture: points in [0, 10]^2, radius 2, shared
/// rates beta = 1, delta = 0.1, step 0.1, and a handful of fully infected
/// nodes. Regenerates until the graph is connected so the fixture is usable
/// for identification.
pub struct GeometricFixture {
    pub positions: NodePositions,
    pub graph: WeightedDigraph,
    pub params: SpreadParams,
    pub x0: Vec<f64>,
}

pub fn geometric_fixture(seed: u64) -> GeometricFixture {
    let mut rng = SplitMix64::new(seed);
    loop {
        let positions = random_positions(&mut rng, 40, 10.0);
        let graph = build_geometric(&positions, 2.0).unwrap();
        if !netspread_core::graph::is_irreducible(&graph) {
            continue;
        }
        let params = SpreadParams::homogeneous(0.1, 1.0, 0.1, graph.clone());
        let mut x0 = vec![0.0; 40];
        let mut infected = 0;
        while infected < 8 {
            let pick = rng.below(40);
            if x0[pick] == 0.0 {
                x0[pick] = 1.0;
                infected += 1;
            }
        }
        assert!(check_assumptions(&params, &x0).all_passed());
        return GeometricFixture {
            positions,
            graph,
            params,
            x0,
        };
    }
}

/// A strongly connected digraph on n nodes: a directed ring plus extra
/// random directed edges, with weights in [0.5, 1.5].
pub fn random_irreducible_graph(rng: &mut SplitMix64, n: usize) -> WeightedDigraph {
    let mut edges: Vec<(usize, usize, f64)> = (0..n)
        .map(|i| (i, (i + 1) % n, rng.range_f64(0.5, 1.5)))
        .collect();
    let extras = n + rng.below(2 * n);
    for _ in 0..extras {
        let i = rng.below(n);
        let j = rng.below(n);
        if i != j && !edges.iter().any(|&(a, b, _)| a == i && b == j) {
            edges.push((i, j, rng.range_f64(0.5, 1.5)));
        }
    }
    build_from_edge_list(&edges, n, false, false).unwrap()
}

/// Largest real eigenvalue of `scale * W - diag(delta)` computed through the
/// nonnegative path by shifting the diagonal up front.
fn rate_gap(w: &Mat, delta: &[f64], scale: f64) -> f64 {
    let sigma = delta.iter().cloned().fold(0.0f64, f64::max);
    let n = w.rows();
    let shifted = Mat::from_fn(n, n, |i, j| {
        scale * w[(i, j)] + if i == j { sigma - delta[i] } else { 0.0 }
    });
    netspread_core::graph::spectral_abscissa(&shifted).spectral_abscissa - sigma
}

/// A random irreducible fixture whose regime is pinned by construction:
/// the coupling is scaled until `s1(B - D)` hits `target_gap` (negative for
/// stable, positive for endemic), then `h` is chosen small enough for every
/// rate bound, so `s1(I - hD + hB) = 1 + h * target_gap` lands on the right
/// side of 1 with a real margin.
pub fn regime_fixture(rng: &mut SplitMix64, homogeneous: bool, target_gap: f64) -> SpreadParams {
    loop {
        let n = 4 + rng.below(6);
        let graph = random_irreducible_graph(rng, n);
        let w = graph.weights().clone();
        let delta: Vec<f64> = if homogeneous {
            vec![rng.range_f64(0.5, 1.0); n]
        } else {
            (0..n).map(|_| rng.range_f64(0.5, 1.0)).collect()
        };

        // Bisection on the coupling scale; the gap grows monotonically.
        let mut lo = 0.0;
        let mut hi = 1.0;
        while rate_gap(&w, &delta, hi) < target_gap {
            hi *= 2.0;
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if rate_gap(&w, &delta, mid) < target_gap {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let scale = 0.5 * (lo + hi);

        let scaled = Mat::from_fn(n, n, |i, j| scale * w[(i, j)]);
        let mut max_rate: f64 = 0.0;
        for i in 0..n {
            max_rate = max_rate.max(scaled.row_sum(i)).max(delta[i]);
        }
        let h = 0.9 / max_rate;

        let params = if homogeneous {
            SpreadParams::homogeneous(h, scale, delta[0], graph.clone())
        } else {
            SpreadParams::per_node(h, vec![scale; n], delta, graph.clone())
        };

        // Keep only fixtures that classify clearly on the intended side.
        let report = classify(&params);
        let margin = (report.s1_value - 1.0).abs();
        let want = if target_gap < 0.0 {
            Regime::StableStrict
        } else {
            Regime::Endemic
        };
        if report.regime == want && margin > 0.01 {
            return params;
        }
    }
}

/// A homogeneous ring fixture sitting exactly on the threshold:
/// delta = beta * (row sum of the adjacency), all exactly representable.
pub fn boundary_ring_fixture(n: usize) -> SpreadParams {
    let edges: Vec<(usize, usize, f64)> = if n == 2 {
        vec![(0, 1, 0.5)]
    } else {
        (0..n).map(|i| (i, (i + 1) % n, 0.25)).collect()
    };
    let graph = build_from_edge_list(&edges, n, true, false).unwrap();
    SpreadParams::homogeneous(0.5, 1.0, 0.5, graph)
}

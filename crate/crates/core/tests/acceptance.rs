//! Acceptance suite: every headline guarantee of the toolkit, one test per
//! criterion, each printing a PASS line (run with `-- --nocapture` to see
//! them). Expected values come from hand arithmetic, closed-form solutions,
//! or round trips through independently generated data; tolerances are
//! pinned in the asserts.

mod common;

use std::time::{Duration, Instant};

use common::{assert_close, boundary_ring_fixture, geometric_fixture, regime_fixture};
use netspread_core::analysis::{classify, endemic_equilibrium, lyapunov_weights, Definiteness};
use netspread_core::dynamics::{
    check_assumptions, simulate, step_euler, step_product, step_truncated, ModelKind,
    SpreadParams, Trajectory,
};
use netspread_core::graph::{build_from_edge_list, build_geometric, WeightedDigraph};
use netspread_core::identify::{
    identify_heterogeneous, identify_homogeneous, identify_ratio, ratio_from_endemic,
};
use netspread_core::linalg::{norm_inf, Mat};
use netspread_core::pipeline::{
    frobenius_fit, snow_pipeline, usda_pipeline, EndemicObservation, SnowOptions, SnowStructure,
};
use netspread_core::rng::SplitMix64;

fn norm_inf_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn exact_parameter_recovery() {
    let start = Instant::now();
    let fixture = geometric_fixture(42);
    let run = simulate(&fixture.params, &fixture.x0, 100, ModelKind::Euler).unwrap();

    // (a) Full trajectory.
    let full = identify_homogeneous(&run.trajectory, &fixture.graph, 0.1).unwrap();
    assert!(full.identifiable);
    assert_close(full.beta_hat.as_scalar().unwrap(), 1.0, 1e-8);
    assert_close(full.delta_hat.as_scalar().unwrap(), 0.1, 1e-8);

    // (b) Every single transition that moves.
    for k in 0..100 {
        let pair = Trajectory::from_states(
            vec![
                run.trajectory.state(k).to_vec(),
                run.trajectory.state(k + 1).to_vec(),
            ],
            0.1,
        );
        let single = identify_homogeneous(&pair, &fixture.graph, 0.1).unwrap();
        assert!(single.identifiable, "transition {k} unidentifiable");
        assert_close(single.beta_hat.as_scalar().unwrap(), 1.0, 1e-8);
        assert_close(single.delta_hat.as_scalar().unwrap(), 0.1, 1e-8);
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("exact parameter recovery: PASS ({} ms)", elapsed.as_millis());
}

#[test]
fn ratio_invariance_under_step_guess() {
    let start = Instant::now();
    let fixture = geometric_fixture(42);
    let run = simulate(&fixture.params, &fixture.x0, 50, ModelKind::Euler).unwrap();

    let guesses = [0.01, 0.1, 1.0, 10.0];
    let results: Vec<_> = guesses
        .iter()
        .map(|&h| identify_ratio(&run.trajectory, &fixture.graph, h).unwrap())
        .collect();

    let ratio0 = results[0].ratio_hat.as_scalar().unwrap();
    for r in &results {
        assert_close(r.ratio_hat.as_scalar().unwrap(), ratio0, 1e-10);
    }
    assert_close(ratio0, 0.1, 1e-8);

    // Estimates scale as 1/h_guess: against the true-step estimate ...
    let reference = &results[1];
    for (h, r) in guesses.iter().zip(&results) {
        let factor = 0.1 / h;
        assert_close(
            r.beta_hat.as_scalar().unwrap(),
            factor * reference.beta_hat.as_scalar().unwrap(),
            1e-10,
        );
    }
    // ... and specifically ten times smaller at a ten-times-larger guess.
    assert_close(
        10.0 * results[2].beta_hat.as_scalar().unwrap(),
        reference.beta_hat.as_scalar().unwrap(),
        1e-10,
    );
    assert_close(
        10.0 * results[2].delta_hat.as_scalar().unwrap(),
        reference.delta_hat.as_scalar().unwrap(),
        1e-10,
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "ratio invariance under step guess: PASS ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn heterogeneous_recovery_with_frozen_node() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(7);

    // 49 coupled nodes plus one isolated, silent node.
    let graph = loop {
        let positions = common::random_positions(&mut rng, 49, 10.0);
        let candidate = build_geometric(&positions, 2.0).unwrap();
        if netspread_core::graph::is_irreducible(&candidate) {
            let w = candidate.weights();
            let full = Mat::from_fn(50, 50, |i, j| {
                if i < 49 && j < 49 {
                    w[(i, j)]
                } else {
                    0.0
                }
            });
            break WeightedDigraph::from_weights(full).unwrap();
        }
    };

    let betas: Vec<f64> = (0..50).map(|_| rng.range_f64(0.5, 1.5)).collect();
    let deltas: Vec<f64> = (0..50).map(|_| rng.range_f64(0.05, 0.2)).collect();
    let params = SpreadParams::per_node(0.1, betas.clone(), deltas.clone(), graph.clone());
    let mut x0: Vec<f64> = (0..50).map(|_| rng.range_f64(0.1, 0.9)).collect();
    x0[49] = 0.0;

    let run = simulate(&params, &x0, 3, ModelKind::Euler).unwrap();
    let result = identify_heterogeneous(&run.trajectory, &graph, 0.1).unwrap();

    assert_eq!(result.diagnostics.nodes_stationary, vec![49]);
    assert!(!result.identifiable);
    let beta_hat = result.beta_hat.as_per_node().unwrap();
    let delta_hat = result.delta_hat.as_per_node().unwrap();
    assert!(beta_hat[49].is_nan(), "frozen node must never be estimated");
    assert!(delta_hat[49].is_nan());
    for i in 0..49 {
        assert_close(beta_hat[i], betas[i], 1e-8);
        assert_close(delta_hat[i], deltas[i], 1e-8);
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "heterogeneous recovery with frozen node: PASS ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn threshold_dichotomy() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(101);
    const STEP_BUDGET: usize = 1_000_000;

    // Below or on the threshold: everything drains to the healthy state.
    for fixture_idx in 0..20 {
        let homogeneous = fixture_idx % 2 == 0;
        let p = regime_fixture(&mut rng, homogeneous, -0.4);
        let n = p.n();
        let report = classify(&p);
        assert!(report.s1_value <= 1.0);
        if let Some(hom) = &report.homogeneous_form {
            assert!(hom.agrees, "homogeneous threshold test disagreed");
        } else {
            assert!(!homogeneous);
        }
        for _ in 0..100 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.range_f64(0.02, 1.0)).collect();
            let mut steps = 0;
            while norm_inf(&x) > 1e-6 {
                x = step_euler(&p, &x).unwrap();
                steps += 1;
                assert!(steps <= STEP_BUDGET, "no convergence to healthy state");
            }
        }
    }

    // Above the threshold: everything converges to the interior equilibrium.
    for fixture_idx in 0..20 {
        let homogeneous = fixture_idx % 2 == 0;
        let p = regime_fixture(&mut rng, homogeneous, 0.4);
        let n = p.n();
        let report = classify(&p);
        assert!(report.s1_value > 1.0);
        if let Some(hom) = &report.homogeneous_form {
            assert!(hom.agrees);
        }
        let endemic = endemic_equilibrium(&p).unwrap();
        assert!(endemic.exists);
        for _ in 0..100 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.range_f64(0.01, 1.0)).collect();
            let mut steps = 0;
            while norm_inf_diff(&x, &endemic.x_star) > 1e-6 {
                x = step_euler(&p, &x).unwrap();
                steps += 1;
                assert!(steps <= STEP_BUDGET, "no convergence to endemic state");
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("threshold dichotomy: PASS ({} ms)", elapsed.as_millis());
}

#[test]
fn lyapunov_certificate_soundness() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(555);

    let value = |weights: &[f64], x: &[f64]| -> f64 {
        x.iter().zip(weights).map(|(xi, pi)| pi * xi * xi).sum()
    };

    // Strictly stable fixtures: negative-definite certificates and strictly
    // decreasing energy along trajectories.
    for fixture_idx in 0..20 {
        let p = regime_fixture(&mut rng, fixture_idx % 2 == 0, -0.4);
        let n = p.n();
        let cert = lyapunov_weights(&p).unwrap();
        assert_eq!(cert.definiteness, Definiteness::NegativeDefinite);
        assert!(
            cert.max_eigenvalue < -1e-10,
            "strict case too close to zero: {}",
            cert.max_eigenvalue
        );
        for _ in 0..50 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.range_f64(0.01, 1.0)).collect();
            let mut v = value(&cert.p_diagonal, &x);
            while norm_inf(&x) >= 1e-10 {
                x = step_euler(&p, &x).unwrap();
                let next = value(&cert.p_diagonal, &x);
                let delta_v = next - v;
                assert!(delta_v < 0.0, "energy failed to decrease strictly");
                if norm_inf(&x) >= 1e-5 {
                    assert!(delta_v <= -1e-14, "margin too small at {delta_v:e}");
                }
                v = next;
            }
        }
    }

    // Exact-boundary fixtures: semidefinite certificates with a vanishing
    // extreme eigenvalue, still strictly decreasing along trajectories.
    for n in [2usize, 4, 8] {
        let p = boundary_ring_fixture(n);
        let cert = lyapunov_weights(&p).unwrap();
        assert_eq!(cert.definiteness, Definiteness::NegativeSemidefinite);
        assert!(
            cert.max_eigenvalue.abs() <= 1e-8,
            "boundary eigenvalue {}",
            cert.max_eigenvalue
        );
        for _ in 0..50 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.range_f64(0.05, 1.0)).collect();
            let mut v = value(&cert.p_diagonal, &x);
            for _ in 0..2000 {
                x = step_euler(&p, &x).unwrap();
                let next = value(&cert.p_diagonal, &x);
                assert!(next < v, "boundary energy failed to decrease");
                v = next;
            }
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "lyapunov certificate soundness: PASS ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn unit_box_invariance_sweep() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(9000);

    for draw in 0..1000 {
        let n = 3 + rng.below(4);
        let graph = common::random_irreducible_graph(&mut rng, n);
        let betas: Vec<f64> = (0..n)
            .map(|i| rng.range_f64(0.1, 0.95) / graph.weights().row_sum(i))
            .collect();
        let deltas: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let h = rng.range_f64(0.05, 1.0);
        let p = SpreadParams::per_node(h, betas, deltas, graph);
        let x0: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();

        let report = check_assumptions(&p, &x0);
        assert!(report.all_passed(), "draw {draw} violated an assumption");

        for model in [ModelKind::Euler, ModelKind::Product, ModelKind::Truncated] {
            let run = simulate(&p, &x0, 200, model).unwrap();
            assert!(
                run.excursions.is_empty(),
                "draw {draw} left the unit box under {model:?}"
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!("unit box invariance sweep: PASS ({} ms)", elapsed.as_millis());
}

#[test]
fn model_equivalence_and_quadratic_gap() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(31337);

    // Bitwise equivalence of the truncated step and the unit-step Euler step.
    for _ in 0..1000 {
        let n = 2 + rng.below(5);
        let graph = common::random_irreducible_graph(&mut rng, n);
        let p = SpreadParams::per_node(
            rng.range_f64(0.01, 3.0),
            (0..n).map(|_| rng.next_f64()).collect(),
            (0..n).map(|_| rng.next_f64()).collect(),
            graph,
        );
        let unit = SpreadParams { h: 1.0, ..p.clone() };
        let x: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        assert_eq!(
            step_truncated(&p, &x).unwrap(),
            step_euler(&unit, &x).unwrap(),
            "truncated step must equal the unit Euler step bit for bit"
        );
    }

    // Product-vs-truncated gap decays quadratically in the infection rate.
    let fixture = geometric_fixture(42);
    let graph = fixture.graph;
    let max_degree = (0..graph.n())
        .map(|i| {
            (0..graph.n())
                .filter(|&j| j != i && graph.weight(i, j) > 0.0)
                .count()
        })
        .max()
        .unwrap() as f64;
    let states: Vec<Vec<f64>> = (0..20)
        .map(|_| (0..graph.n()).map(|_| rng.next_f64()).collect())
        .collect();

    let sweep = [1e-1, 1e-2, 1e-3, 1e-4];
    let mut gaps = Vec::new();
    for &beta in &sweep {
        let p = SpreadParams::homogeneous(1.0, beta, 0.1, graph.clone());
        let mut worst: f64 = 0.0;
        for x in &states {
            let product = step_product(&p, x).unwrap();
            let truncated = step_truncated(&p, x).unwrap();
            worst = worst.max(norm_inf_diff(&product, &truncated));
        }
        assert!(
            worst <= 2.0 * max_degree * beta * beta,
            "gap {worst:e} exceeds the quadratic bound at beta = {beta}"
        );
        gaps.push(worst);
    }

    // Log-log slope of the gap against the rate.
    let xs: Vec<f64> = sweep.iter().map(|b| b.ln()).collect();
    let ys: Vec<f64> = gaps.iter().map(|g| g.ln()).collect();
    let mean_x = xs.iter().sum::<f64>() / xs.len() as f64;
    let mean_y = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mean_x) * (x - mean_x)).sum::<f64>();
    assert!(
        (slope - 2.0).abs() <= 0.1,
        "log-log slope {slope} not within 2 +- 0.1"
    );

    let elapsed = start.elapsed();
    println!(
        "model equivalence and quadratic gap: PASS (slope {slope:.3}, {} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn endemic_fixed_point() {
    let start = Instant::now();

    // Analytic two-node case: equilibrium at 1 - delta/beta per node.
    let g = build_from_edge_list(&[(0, 1, 1.0)], 2, true, false).unwrap();
    let p = SpreadParams::homogeneous(0.5, 1.0, 0.5, g.clone());
    let state = endemic_equilibrium(&p).unwrap();
    assert!(state.exists);
    assert_close(state.x_star[0], 0.5, 1e-8);
    assert_close(state.x_star[1], 0.5, 1e-8);

    // The ratio read-off inverts it.
    let ratios = ratio_from_endemic(&state.x_star, &g).unwrap();
    assert_close(ratios[0], 0.5, 1e-8);
    assert_close(ratios[1], 0.5, 1e-8);

    // Random endemic fixtures: tiny step defect at x*, and the read-off
    // recovers each node's delta/beta.
    let mut rng = SplitMix64::new(2718);
    for _ in 0..20 {
        let p = regime_fixture(&mut rng, false, 0.4);
        let state = endemic_equilibrium(&p).unwrap();
        assert!(state.exists);
        assert!(
            state.residual <= 1e-10,
            "step defect {} too large",
            state.residual
        );
        let stepped = step_euler(&p, &state.x_star).unwrap();
        assert!(norm_inf_diff(&stepped, &state.x_star) <= 1e-10);

        let (betas, graph) = p.factored().unwrap();
        let ratios = ratio_from_endemic(&state.x_star, graph).unwrap();
        for i in 0..p.n() {
            assert_close(ratios[i], p.delta[i] / betas[i], 1e-8);
        }
    }

    let elapsed = start.elapsed();
    println!("endemic fixed point: PASS ({} ms)", elapsed.as_millis());
}

#[test]
fn outbreak_pipeline_consistency() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(1854);

    let n = 200;
    let mut counts: Vec<f64> = (0..n).map(|_| (1 + rng.below(15)) as f64).collect();
    counts[n - 1] = 0.0;
    let obs =
        EndemicObservation::new(counts, vec![20.0; n], n - 1, 19.0 / 20.0).unwrap();

    let run = snow_pipeline(
        &obs,
        &SnowStructure::SelfLoopBroadcast { overrides: vec![] },
        1.0 / 30.0,
        &SnowOptions {
            steps: 2500,
            hold_source: false,
            steps_per_period: None,
        },
        None,
    )
    .unwrap();

    // The derived system holds the observation as an exact equilibrium.
    assert!(
        run.equilibrium_defect <= 1e-10,
        "defect {}",
        run.equilibrium_defect
    );
    // The rollout from the source-only start converges toward it.
    assert!(run.terminal_gap <= 1e-6, "terminal gap {}", run.terminal_gap);

    // Incidence conserves events exactly: the telescoped sum equals the
    // final cumulative count (households start at zero).
    let final_cumulative: i64 = run
        .trajectory
        .last()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != obs.source_index)
        .map(|(i, &x)| (x * obs.capacities[i]).round() as i64)
        .sum();
    assert_eq!(run.incidence.total, final_cumulative);
    assert_eq!(
        run.incidence.total,
        run.incidence.per_period.iter().sum::<i64>()
    );

    let elapsed = start.elapsed();
    println!(
        "outbreak pipeline consistency: PASS ({} ms)",
        elapsed.as_millis()
    );
}

#[test]
fn adoption_pipeline_self_consistency() {
    let start = Instant::now();

    // County-style grids with self loops: 6 x 6 full region, 3 x 3 training
    // region, four-neighbor adjacency.
    let grid = |side: usize| -> WeightedDigraph {
        let idx = |r: usize, c: usize| r * side + c;
        let mut edges = Vec::new();
        for r in 0..side {
            for c in 0..side {
                if c + 1 < side {
                    edges.push((idx(r, c), idx(r, c + 1), 1.0));
                }
                if r + 1 < side {
                    edges.push((idx(r, c), idx(r + 1, c), 1.0));
                }
            }
        }
        build_from_edge_list(&edges, side * side, true, true).unwrap()
    };
    let full = grid(6);
    let train = grid(3);

    let (beta, delta) = (0.15, 0.05);
    let mut rng = SplitMix64::new(2009);
    let train_x0: Vec<f64> = (0..9).map(|_| rng.range_f64(0.0, 0.4)).collect();
    let train_params = SpreadParams::homogeneous(1.0, beta, delta, train.clone());
    let train_run = simulate(&train_params, &train_x0, 4, ModelKind::Euler).unwrap();

    let full_x0: Vec<f64> = (0..36).map(|_| rng.range_f64(0.0, 0.4)).collect();
    let full_params = SpreadParams::homogeneous(1.0, beta, delta, full.clone());
    let reference = simulate(&full_params, &full_x0, 4, ModelKind::Euler)
        .unwrap()
        .trajectory;

    let run = usda_pipeline(
        &train_run.trajectory,
        &train,
        &full,
        &full_x0,
        4,
        1.0,
        Some(&reference),
    )
    .unwrap();
    let fit = run.fit.unwrap();
    assert!(
        fit.scaled_frobenius_error <= 1e-8,
        "round-trip error {}",
        fit.scaled_frobenius_error
    );

    // Degenerate sanity check on the metric itself: a reference compared
    // against itself scores zero.
    assert_eq!(
        frobenius_fit(&reference, &reference)
            .unwrap()
            .scaled_frobenius_error,
        0.0
    );

    let elapsed = start.elapsed();
    println!(
        "adoption pipeline self consistency: PASS ({} ms)",
        elapsed.as_millis()
    );
}

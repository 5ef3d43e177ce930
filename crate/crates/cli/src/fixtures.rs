//! Deterministic fixture generation. Every file is a pure function of the
//! seed and the knobs, so reruns are byte-identical.

use std::path::Path;

use anyhow::{Context, Result};

use netspread_core::dynamics::{simulate, ModelKind, SpreadParams};
use netspread_core::graph::{
    build_from_edge_list, build_geometric, is_irreducible, NodePositions, WeightedDigraph,
};
use netspread_core::rng::SplitMix64;

use crate::formats;

fn params_json(h: f64, beta: serde_json::Value, delta: serde_json::Value) -> String {
    let doc = serde_json::json!({
        "h": h,
        "beta": beta,
        "delta": delta,
        "adjacency": "adjacency.csv",
        "combined_b": null,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("static document");
    text.push('\n');
    text
}

fn sample_positions(rng: &mut SplitMix64, nodes: usize, side: f64) -> NodePositions {
    let coords = (0..nodes)
        .map(|_| vec![rng.range_f64(0.0, side), rng.range_f64(0.0, side)])
        .collect();
    NodePositions::new(coords).expect("finite samples")
}

/// Proximity graph resampled until strongly connected; at 40 nodes, radius
/// 2, and a 10 x 10 box the bare draw sits near the connectivity threshold,
/// so a few retries are normal.
fn connected_geometric(
    rng: &mut SplitMix64,
    nodes: usize,
    radius: f64,
    side: f64,
) -> (NodePositions, WeightedDigraph) {
    loop {
        let positions = sample_positions(rng, nodes, side);
        let graph = build_geometric(&positions, radius).expect("valid sample");
        if is_irreducible(&graph) {
            return (positions, graph);
        }
    }
}

/// Shared-rate proximity fixture: positions, adjacency, parameters
/// (beta 1, delta 0.1, h 0.1), and a binary initial state.
pub fn generate_geometric(
    out_dir: &Path,
    seed: u64,
    nodes: usize,
    radius: f64,
    side: f64,
    infected: usize,
) -> Result<Vec<String>> {
    anyhow::ensure!(infected <= nodes, "cannot infect more nodes than exist");
    let mut rng = SplitMix64::new(seed);
    let (positions, graph) = connected_geometric(&mut rng, nodes, radius, side);

    let mut x0 = vec![0.0; nodes];
    let mut placed = 0;
    while placed < infected {
        let pick = rng.below(nodes);
        if x0[pick] == 0.0 {
            x0[pick] = 1.0;
            placed += 1;
        }
    }

    formats::write_positions_csv(&out_dir.join("positions.csv"), &positions)?;
    formats::write_matrix_csv(&out_dir.join("adjacency.csv"), graph.weights())?;
    std::fs::write(
        out_dir.join("params.json"),
        params_json(0.1, 1.0.into(), 0.1.into()),
    )
    .context("cannot write params.json")?;
    formats::write_state_csv(&out_dir.join("x0.csv"), &x0)?;
    Ok(vec![
        "positions.csv".into(),
        "adjacency.csv".into(),
        "params.json".into(),
        "x0.csv".into(),
    ])
}

/// Per-node-rate proximity fixture: rates drawn from [0.5, 1.5] x
/// [0.05, 0.2], interior initial state.
pub fn generate_heterogeneous(
    out_dir: &Path,
    seed: u64,
    nodes: usize,
    radius: f64,
    side: f64,
) -> Result<Vec<String>> {
    let mut rng = SplitMix64::new(seed);
    let (positions, graph) = connected_geometric(&mut rng, nodes, radius, side);
    let betas: Vec<f64> = (0..nodes).map(|_| rng.range_f64(0.5, 1.5)).collect();
    let deltas: Vec<f64> = (0..nodes).map(|_| rng.range_f64(0.05, 0.2)).collect();
    let x0: Vec<f64> = (0..nodes).map(|_| rng.range_f64(0.1, 0.9)).collect();

    formats::write_positions_csv(&out_dir.join("positions.csv"), &positions)?;
    formats::write_matrix_csv(&out_dir.join("adjacency.csv"), graph.weights())?;
    std::fs::write(
        out_dir.join("params.json"),
        params_json(0.1, serde_json::json!(betas), serde_json::json!(deltas)),
    )
    .context("cannot write params.json")?;
    formats::write_state_csv(&out_dir.join("x0.csv"), &x0)?;
    Ok(vec![
        "positions.csv".into(),
        "adjacency.csv".into(),
        "params.json".into(),
        "x0.csv".into(),
    ])
}

/// Synthetic terminal-count observation: households with 1..15 events out
/// of a fixed capacity, one broadcast source in the last row, plus matching
/// positions for the proximity structures.
pub fn generate_endemic_observation(
    out_dir: &Path,
    seed: u64,
    households: usize,
    capacity: f64,
) -> Result<Vec<String>> {
    let mut rng = SplitMix64::new(seed);
    let n = households + 1;
    let max_count = (capacity as usize).min(15).max(1);
    let mut ids: Vec<String> = (0..households).map(|i| format!("h{i:03}")).collect();
    ids.push("source".into());
    let mut counts: Vec<f64> = (0..households)
        .map(|_| (1 + rng.below(max_count)) as f64)
        .collect();
    counts.push(0.0);
    let capacities = vec![capacity; n];
    let positions = sample_positions(&mut rng, n, 10.0);

    formats::write_observation_csv(&out_dir.join("observation.csv"), &ids, &counts, &capacities)?;
    formats::write_positions_csv(&out_dir.join("positions.csv"), &positions)?;
    Ok(vec!["observation.csv".into(), "positions.csv".into()])
}

fn grid_edges(side: usize) -> Vec<(usize, usize, f64)> {
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
    edges
}

/// County-style grid fixture for the adoption workflow: a full region and a
/// training subregion (four-neighbor adjacency with self loops), simulated
/// training data, the full-region initial state, and the full-region
/// reference trajectory, all generated with the same shared rates.
pub fn generate_county_grid(
    out_dir: &Path,
    seed: u64,
    side: usize,
    train_side: usize,
    beta: f64,
    delta: f64,
    h: f64,
    steps: usize,
) -> Result<Vec<String>> {
    anyhow::ensure!(train_side >= 2, "training grid needs at least 2x2 counties");
    anyhow::ensure!(train_side <= side, "training grid cannot exceed the full grid");
    let mut rng = SplitMix64::new(seed);

    let full_edges = grid_edges(side);
    let train_edges = grid_edges(train_side);
    let full = build_from_edge_list(&full_edges, side * side, true, true)
        .expect("grid edges are valid");
    let train = build_from_edge_list(&train_edges, train_side * train_side, true, true)
        .expect("grid edges are valid");

    let train_x0: Vec<f64> = (0..train.n()).map(|_| rng.range_f64(0.0, 0.4)).collect();
    let full_x0: Vec<f64> = (0..full.n()).map(|_| rng.range_f64(0.0, 0.4)).collect();

    let train_params = SpreadParams::homogeneous(h, beta, delta, train);
    let train_run = simulate(&train_params, &train_x0, steps, ModelKind::Euler)
        .context("training simulation failed")?;
    let full_params = SpreadParams::homogeneous(h, beta, delta, full);
    let full_run = simulate(&full_params, &full_x0, steps, ModelKind::Euler)
        .context("reference simulation failed")?;

    formats::write_edge_list_csv(&out_dir.join("full_edges.csv"), &full_edges)?;
    formats::write_edge_list_csv(&out_dir.join("train_edges.csv"), &train_edges)?;
    formats::write_trajectory_csv(&out_dir.join("train_trajectory.csv"), &train_run.trajectory)?;
    formats::write_state_csv(&out_dir.join("full_x0.csv"), &full_x0)?;
    formats::write_trajectory_csv(&out_dir.join("reference.csv"), &full_run.trajectory)?;
    Ok(vec![
        "full_edges.csv".into(),
        "train_edges.csv".into(),
        "train_trajectory.csv".into(),
        "full_x0.csv".into(),
        "reference.csv".into(),
    ])
}

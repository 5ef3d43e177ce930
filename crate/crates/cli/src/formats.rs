//! File formats: headerless matrix CSV, `i,j,weight` edge lists,
//! `id,x,y[,z]` positions, `k,x0,...` trajectories, `id,count,capacity`
//! observations, `period,new_events` incidence series, and the parameters
//! JSON document. Floats are written with the shortest round-trip
//! representation so identical inputs produce byte-identical files.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use netspread_core::dynamics::{Infection, SpreadParams, Trajectory};
use netspread_core::graph::NodePositions;
use netspread_core::linalg::Mat;
use netspread_core::pipeline::IncidenceSeries;

fn parse_field<T: std::str::FromStr>(raw: &str, path: &Path, row: usize, col: usize) -> Result<T>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    raw.trim()
        .parse()
        .with_context(|| format!("{}: row {}, column {}: bad value {raw:?}", path.display(), row + 1, col + 1))
}

/// n rows of n comma-separated decimals, no header.
pub fn read_matrix_csv(path: &Path) -> Result<Mat> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), i + 1))?;
        let mut row = Vec::with_capacity(record.len());
        for (j, field) in record.iter().enumerate() {
            row.push(parse_field(field, path, i, j)?);
        }
        rows.push(row);
    }
    Mat::from_rows(&rows).ok_or_else(|| anyhow!("{}: empty or ragged matrix", path.display()))
}

pub fn write_matrix_csv(path: &Path, m: &Mat) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Header `i,j,weight`, zero-based indices.
pub fn read_edge_list_csv(path: &Path) -> Result<Vec<(usize, usize, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let headers = reader.headers()?.clone();
    if headers.len() < 3 {
        bail!("{}: expected header i,j,weight", path.display());
    }
    let mut edges = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let i = parse_field(&record[0], path, row, 0)?;
        let j = parse_field(&record[1], path, row, 1)?;
        let w = parse_field(&record[2], path, row, 2)?;
        edges.push((i, j, w));
    }
    Ok(edges)
}

pub fn write_edge_list_csv(path: &Path, edges: &[(usize, usize, f64)]) -> Result<()> {
    let mut out = String::from("i,j,weight\n");
    for (i, j, w) in edges {
        out.push_str(&format!("{i},{j},{w}\n"));
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Header `id,x,y` or `id,x,y,z`; row order defines node order.
pub fn read_positions_csv(path: &Path) -> Result<(Vec<String>, NodePositions)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let dim = reader.headers()?.len().saturating_sub(1);
    if dim < 2 || dim > 3 {
        bail!("{}: expected header id,x,y or id,x,y,z", path.display());
    }
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        ids.push(record[0].to_string());
        let mut point = Vec::with_capacity(dim);
        for c in 0..dim {
            point.push(parse_field(&record[c + 1], path, row, c + 1)?);
        }
        coords.push(point);
    }
    let positions = NodePositions::new(coords)
        .map_err(|e| anyhow!("{}: {e}", path.display()))?;
    Ok((ids, positions))
}

pub fn write_positions_csv(path: &Path, positions: &NodePositions) -> Result<()> {
    let dim = positions.dim();
    let mut out = String::from(if dim == 3 { "id,x,y,z\n" } else { "id,x,y\n" });
    for i in 0..positions.len() {
        let coords: Vec<String> = positions.point(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("{i},{}\n", coords.join(",")));
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Header `k,x0,x1,...`; one row per time index.
pub fn read_trajectory_csv(path: &Path, h: f64) -> Result<Trajectory> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let n = reader.headers()?.len().saturating_sub(1);
    if n == 0 {
        bail!("{}: expected header k,x0,x1,...", path.display());
    }
    let mut states = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() != n + 1 {
            bail!("{}: row {} has {} fields, expected {}", path.display(), row + 2, record.len(), n + 1);
        }
        let mut state = Vec::with_capacity(n);
        for c in 0..n {
            state.push(parse_field(&record[c + 1], path, row, c + 1)?);
        }
        states.push(state);
    }
    if states.is_empty() {
        bail!("{}: trajectory has no rows", path.display());
    }
    Ok(Trajectory::from_states(states, h))
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let n = traj.n();
    let mut header = String::from("k");
    for i in 0..n {
        header.push_str(&format!(",x{i}"));
    }
    let mut out = header;
    out.push('\n');
    for (k, state) in traj.states.iter().enumerate() {
        let row: Vec<String> = state.iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("{k},{}\n", row.join(",")));
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// A single headerless row of comma-separated values.
pub fn read_state_csv(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let line = text
        .lines()
        .next()
        .ok_or_else(|| anyhow!("{}: empty state file", path.display()))?;
    line.split(',')
        .enumerate()
        .map(|(j, field)| parse_field(field, path, 0, j))
        .collect()
}

pub fn write_state_csv(path: &Path, state: &[f64]) -> Result<()> {
    let row: Vec<String> = state.iter().map(|v| format!("{v}")).collect();
    std::fs::write(path, format!("{}\n", row.join(",")))
        .with_context(|| format!("cannot write {}", path.display()))
}

/// Header `id,count,capacity`; row order defines node order.
pub fn read_observation_csv(path: &Path) -> Result<(Vec<String>, Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut ids = Vec::new();
    let mut counts = Vec::new();
    let mut capacities = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        if record.len() < 3 {
            bail!("{}: row {} needs id,count,capacity", path.display(), row + 2);
        }
        ids.push(record[0].to_string());
        counts.push(parse_field(&record[1], path, row, 1)?);
        capacities.push(parse_field(&record[2], path, row, 2)?);
    }
    Ok((ids, counts, capacities))
}

pub fn write_observation_csv(
    path: &Path,
    ids: &[String],
    counts: &[f64],
    capacities: &[f64],
) -> Result<()> {
    let mut out = String::from("id,count,capacity\n");
    for i in 0..ids.len() {
        out.push_str(&format!("{},{},{}\n", ids[i], counts[i], capacities[i]));
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

/// Header `period,new_events`.
pub fn read_incidence_csv(path: &Path) -> Result<IncidenceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut per_period = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        per_period.push(parse_field(&record[1], path, row, 1)?);
    }
    Ok(IncidenceSeries::from_counts(per_period, 1))
}

pub fn write_incidence_csv(path: &Path, series: &IncidenceSeries) -> Result<()> {
    let mut out = String::from("period,new_events\n");
    for (period, events) in series.per_period.iter().enumerate() {
        out.push_str(&format!("{period},{events}\n"));
    }
    std::fs::write(path, out).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScalarOrVec {
    Scalar(f64),
    Vec(Vec<f64>),
}

impl ScalarOrVec {
    fn broadcast(self, n: usize, what: &str) -> Result<Vec<f64>> {
        match self {
            ScalarOrVec::Scalar(v) => Ok(vec![v; n]),
            ScalarOrVec::Vec(v) if v.len() == n => Ok(v),
            ScalarOrVec::Vec(v) => bail!("{what} has {} entries, expected {n}", v.len()),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MatrixSource {
    Path(String),
    Inline(Vec<Vec<f64>>),
}

/// The parameters document:
/// `{h, delta: scalar|[...], beta: scalar|[...], adjacency: path|inline, combined_b: path|null}`.
/// Exactly one of `beta`+`adjacency` or `combined_b` must be given; relative
/// paths resolve against the document's directory.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    h: f64,
    delta: ScalarOrVec,
    #[serde(default)]
    beta: Option<ScalarOrVec>,
    #[serde(default)]
    adjacency: Option<MatrixSource>,
    #[serde(default)]
    combined_b: Option<String>,
}

fn resolve(base: &Path, relative: &str) -> PathBuf {
    let p = Path::new(relative);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.parent().unwrap_or(Path::new(".")).join(p)
    }
}

pub fn read_params_json(path: &Path) -> Result<SpreadParams> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let file: ParamsFile = serde_json::from_str(&text)
        .with_context(|| format!("{}: invalid parameters document", path.display()))?;

    let infection = match (file.beta, file.adjacency, file.combined_b) {
        (None, None, Some(b_path)) => {
            let matrix = read_matrix_csv(&resolve(path, &b_path))?;
            if !matrix.is_square() {
                bail!("combined matrix must be square");
            }
            Infection::Combined { matrix }
        }
        (Some(beta), Some(source), None) => {
            let weights = match source {
                MatrixSource::Path(p) => read_matrix_csv(&resolve(path, &p))?,
                MatrixSource::Inline(rows) => Mat::from_rows(&rows)
                    .ok_or_else(|| anyhow!("inline adjacency is empty or ragged"))?,
            };
            let graph = netspread_core::graph::WeightedDigraph::from_weights(weights)
                .map_err(|e| anyhow!("{}: {e}", path.display()))?;
            match beta {
                ScalarOrVec::Scalar(beta) => Infection::Scalar { beta, graph },
                ScalarOrVec::Vec(betas) => {
                    if betas.len() != graph.n() {
                        bail!("beta has {} entries, expected {}", betas.len(), graph.n());
                    }
                    Infection::PerNode { betas, graph }
                }
            }
        }
        _ => bail!(
            "{}: give either beta plus adjacency, or combined_b alone",
            path.display()
        ),
    };

    let n = match &infection {
        Infection::Scalar { graph, .. } | Infection::PerNode { graph, .. } => graph.n(),
        Infection::Combined { matrix } => matrix.rows(),
    };
    let delta = file.delta.broadcast(n, "delta")?;
    if !(file.h.is_finite() && file.h >= 0.0) {
        bail!("{}: h must be finite and >= 0", path.display());
    }
    Ok(SpreadParams::new(file.h, delta, infection))
}

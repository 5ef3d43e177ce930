//! End-to-end validation workflows on observed data.
//!
//! The outbreak workflow starts from terminal event counts per node (an
//! observed endemic state), derives per-node healing rates from the
//! equilibrium relation under unit infection rates, simulates the outbreak
//! from a single contaminated source, and aggregates the simulated states
//! into a per-period incidence series. The adoption workflow fits
//! homogeneous rates on a training region and replays them over the full
//! graph, scoring the fit with a scaled Frobenius error.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::{
    box_excursion, check_assumptions, simulate, step_euler, AssumptionReport, DynamicsError,
    Excursion, Infection, ModelKind, SpreadParams, Trajectory, INVARIANCE_TOL,
};
use crate::graph::{
    attach_broadcast_column, build_binary_radius, GraphError, NodePositions, WeightedDigraph,
};
use crate::identify::{
    derive_delta_from_endemic, identify_homogeneous, EstimationResult, IdentifyError,
    StationaryKind,
};
use crate::linalg::{self, Mat};

#[derive(Clone, Debug, PartialEq)]
pub enum PipelineError {
    /// counts/capacities disagree in length or are empty.
    ObservationShape,
    /// Capacities must be at least 1.
    CapacityTooSmall { node: usize },
    /// Counts must satisfy `0 <= count <= capacity`.
    CountOutOfRange { node: usize },
    SourceIndexOutOfRange { index: usize, n: usize },
    /// The pinned source level must lie strictly inside (0, 1).
    SourceLevelOutOfRange { level: f64 },
    /// Nodes other than the source need at least one recorded event, else
    /// the rate derivation divides by zero. Exclude such nodes upstream.
    ZeroCountNodes { nodes: Vec<usize> },
    PositionsCountMismatch { expected: usize, got: usize },
    /// The derived rates violate the per-step bounds at the requested step
    /// size; re-run with `h <= max_feasible_h`.
    StepSizeTooLarge { max_feasible_h: f64 },
    /// Training data did not identify the parameters (stationary case given
    /// when known).
    Unidentifiable { case: Option<StationaryKind> },
    /// Observed and simulated data must have identical shape.
    ShapeMismatch,
    /// The reference has zero norm, so the relative error is undefined.
    DegenerateReference,
    Graph(GraphError),
    Identify(IdentifyError),
    Dynamics(DynamicsError),
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::ObservationShape => {
                write!(f, "counts and capacities must be equal-length and non-empty")
            }
            PipelineError::CapacityTooSmall { node } => {
                write!(f, "capacity of node {node} must be at least 1")
            }
            PipelineError::CountOutOfRange { node } => {
                write!(f, "count of node {node} must lie in [0, capacity]")
            }
            PipelineError::SourceIndexOutOfRange { index, n } => {
                write!(f, "source index {index} out of range for {n} nodes")
            }
            PipelineError::SourceLevelOutOfRange { level } => {
                write!(f, "source level {level} must lie strictly inside (0, 1)")
            }
            PipelineError::ZeroCountNodes { nodes } => {
                write!(f, "nodes {nodes:?} have zero counts; exclude them upstream")
            }
            PipelineError::PositionsCountMismatch { expected, got } => {
                write!(f, "positions have {got} points, observation has {expected} nodes")
            }
            PipelineError::StepSizeTooLarge { max_feasible_h } => {
                write!(f, "derived rates violate the per-step bounds; use h <= {max_feasible_h}")
            }
            PipelineError::Unidentifiable { case } => {
                write!(f, "training data is unidentifiable (stationary case: {case:?})")
            }
            PipelineError::ShapeMismatch => {
                write!(f, "observed and simulated data must have identical shape")
            }
            PipelineError::DegenerateReference => {
                write!(f, "reference has zero norm; relative error undefined")
            }
            PipelineError::Graph(e) => write!(f, "{e}"),
            PipelineError::Identify(e) => write!(f, "{e}"),
            PipelineError::Dynamics(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for PipelineError {}

impl From<GraphError> for PipelineError {
    fn from(e: GraphError) -> Self {
        PipelineError::Graph(e)
    }
}

impl From<IdentifyError> for PipelineError {
    fn from(e: IdentifyError) -> Self {
        PipelineError::Identify(e)
    }
}

impl From<DynamicsError> for PipelineError {
    fn from(e: DynamicsError) -> Self {
        PipelineError::Dynamics(e)
    }
}

/// Terminal event counts and node sizes, with one designated broadcast
/// source whose equilibrium level is pinned rather than derived from counts.
#[derive(Clone, Debug, PartialEq)]
pub struct EndemicObservation {
    pub counts: Vec<f64>,
    pub capacities: Vec<f64>,
    pub source_index: usize,
    pub source_level: f64,
}

impl EndemicObservation {
    pub fn new(
        counts: Vec<f64>,
        capacities: Vec<f64>,
        source_index: usize,
        source_level: f64,
    ) -> Result<Self, PipelineError> {
        let obs = EndemicObservation {
            counts,
            capacities,
            source_index,
            source_level,
        };
        obs.validate()?;
        Ok(obs)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let n = self.counts.len();
        if n == 0 || self.capacities.len() != n {
            return Err(PipelineError::ObservationShape);
        }
        for i in 0..n {
            if !(self.capacities[i] >= 1.0) {
                return Err(PipelineError::CapacityTooSmall { node: i });
            }
            if !(self.counts[i] >= 0.0 && self.counts[i] <= self.capacities[i]) {
                return Err(PipelineError::CountOutOfRange { node: i });
            }
        }
        if self.source_index >= n {
            return Err(PipelineError::SourceIndexOutOfRange {
                index: self.source_index,
                n,
            });
        }
        if !(self.source_level > 0.0 && self.source_level < 1.0) {
            return Err(PipelineError::SourceLevelOutOfRange {
                level: self.source_level,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// The observed equilibrium: counts over capacities, with the source
    /// entry pinned at the configured level.
    pub fn endemic_state(&self) -> Vec<f64> {
        let mut x: Vec<f64> = self
            .counts
            .iter()
            .zip(&self.capacities)
            .map(|(c, cap)| c / cap)
            .collect();
        x[self.source_index] = self.source_level;
        x
    }
}

/// Graph construction used by the outbreak workflow.
#[derive(Clone, Debug, PartialEq)]
pub enum SnowStructure {
    /// Binary proximity graph with self loops.
    Radius { positions: NodePositions, radius: f64 },
    /// Binary proximity graph with self loops, then the source column set
    /// to all ones.
    RadiusBroadcast { positions: NodePositions, radius: f64 },
    /// Self loops only, plus directed source-to-node edges (optionally
    /// reweighted per node).
    SelfLoopBroadcast { overrides: Vec<(usize, f64)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnowOptions {
    pub steps: usize,
    /// Re-pin the source at its initial level after every step.
    pub hold_source: bool,
    /// Steps aggregated into one incidence period; defaults from `h` via
    /// [`default_steps_per_period`].
    pub steps_per_period: Option<usize>,
}

/// New events per period, produced by rounding cumulative per-node counts
/// once per step and then differencing, so the series telescopes exactly.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IncidenceSeries {
    pub per_period: Vec<i64>,
    pub steps_per_period: usize,
    pub total: i64,
}

impl IncidenceSeries {
    pub fn from_counts(per_period: Vec<i64>, steps_per_period: usize) -> Self {
        let total = per_period.iter().sum();
        IncidenceSeries {
            per_period,
            steps_per_period,
            total,
        }
    }
}

/// Fit quality between observed and simulated data. For trajectory fits the
/// totals are the Frobenius norms of the stacked state matrices (so the
/// scaled error is the ratio `|F - F_hat| / |F|`); for incidence fits they
/// are the total event counts.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitReport {
    pub scaled_frobenius_error: f64,
    pub per_step_errors: Vec<f64>,
    pub observed_total: f64,
    pub simulated_total: f64,
}

/// Everything the outbreak workflow produces.
#[derive(Clone, Debug)]
pub struct SnowRun {
    pub graph: WeightedDigraph,
    pub x_star: Vec<f64>,
    pub derived_delta: Vec<f64>,
    pub params: SpreadParams,
    pub trajectory: Trajectory,
    pub incidence: IncidenceSeries,
    /// Infinity norm of `step(x*) - x*`: how exactly the derived system
    /// holds the observation as an equilibrium.
    pub equilibrium_defect: f64,
    /// Infinity norm of `x^T - x*`: how close the rollout got.
    pub terminal_gap: f64,
    pub assumptions: AssumptionReport,
    pub excursions: Vec<Excursion>,
    pub fit: Option<FitReport>,
}

/// Aggregation default anchored to one day of model time spanning three
/// steps at h = 1/175 (equivalently one step at h = 1/30, to rounding).
pub fn default_steps_per_period(h: f64) -> usize {
    const DAY_LENGTH: f64 = 3.0 / 175.0;
    let steps = libm::round(DAY_LENGTH / h);
    if steps < 1.0 {
        1
    } else {
        steps as usize
    }
}

/// Runs the outbreak workflow: build the structure graph, pin the observed
/// equilibrium, derive per-node healing rates under unit infection rates,
/// simulate from a source-only initial state, and aggregate incidence.
/// Reducible structures are reported in the assumption block but simulated
/// anyway; rate bounds violated at `h` are a hard error naming the largest
/// feasible step size.
pub fn snow_pipeline(
    obs: &EndemicObservation,
    structure: &SnowStructure,
    h: f64,
    opts: &SnowOptions,
    reference: Option<&IncidenceSeries>,
) -> Result<SnowRun, PipelineError> {
    obs.validate()?;
    let n = obs.n();

    let zero_nodes: Vec<usize> = (0..n)
        .filter(|&i| i != obs.source_index && obs.counts[i] < 1.0)
        .collect();
    if !zero_nodes.is_empty() {
        return Err(PipelineError::ZeroCountNodes { nodes: zero_nodes });
    }

    let graph = match structure {
        SnowStructure::Radius { positions, radius } => {
            expect_positions(positions, n)?;
            build_binary_radius(positions, *radius, true)?
        }
        SnowStructure::RadiusBroadcast { positions, radius } => {
            expect_positions(positions, n)?;
            let base = build_binary_radius(positions, *radius, true)?;
            attach_broadcast_column(&base, obs.source_index, &[])?
        }
        SnowStructure::SelfLoopBroadcast { overrides } => {
            let identity = WeightedDigraph::from_weights(Mat::identity(n))?;
            attach_broadcast_column(&identity, obs.source_index, overrides)?
        }
    };

    let x_star = obs.endemic_state();
    let delta = derive_delta_from_endemic(&x_star, &graph, &vec![1.0; n])?;
    let params = SpreadParams::new(
        h,
        delta.clone(),
        Infection::Scalar {
            beta: 1.0,
            graph: graph.clone(),
        },
    );

    let mut max_rate: f64 = 0.0;
    let b = params.effective_coupling();
    for i in 0..n {
        max_rate = max_rate.max(delta[i]).max(b.offdiag_row_sum(i));
    }
    if h * max_rate > 1.0 {
        return Err(PipelineError::StepSizeTooLarge {
            max_feasible_h: 1.0 / max_rate,
        });
    }

    let mut x0 = vec![0.0; n];
    x0[obs.source_index] = 1.0;

    let assumptions = check_assumptions(&params, &x0);
    let guaranteed = assumptions.guarantees_unit_box();
    let mut states = Vec::with_capacity(opts.steps + 1);
    let mut excursions = Vec::new();
    states.push(x0.clone());
    for step in 1..=opts.steps {
        let mut next = step_euler(&params, states.last().unwrap())?;
        if opts.hold_source {
            next[obs.source_index] = x0[obs.source_index];
        }
        let magnitude = box_excursion(&next);
        if magnitude > INVARIANCE_TOL {
            if guaranteed {
                return Err(DynamicsError::InvariantViolated { step, magnitude }.into());
            }
            excursions.push(Excursion { step, magnitude });
        }
        states.push(next);
    }
    let trajectory = Trajectory {
        states,
        h,
        model: Some(ModelKind::Euler),
    };

    let stepped = step_euler(&params, &x_star)?;
    let equilibrium_defect = x_star
        .iter()
        .zip(&stepped)
        .map(|(a, b)| linalg::abs(a - b))
        .fold(0.0, f64::max);
    let terminal_gap = x_star
        .iter()
        .zip(trajectory.last())
        .map(|(a, b)| linalg::abs(a - b))
        .fold(0.0, f64::max);

    let steps_per_period = opts
        .steps_per_period
        .unwrap_or_else(|| default_steps_per_period(h));
    let incidence = incidence_from_trajectory(
        &trajectory,
        &obs.capacities,
        Some(obs.source_index),
        steps_per_period,
    );

    let fit = match reference {
        Some(observed) => Some(incidence_fit(observed, &incidence)?),
        None => None,
    };

    Ok(SnowRun {
        graph,
        x_star,
        derived_delta: delta,
        params,
        trajectory,
        incidence,
        equilibrium_defect,
        terminal_gap,
        assumptions,
        excursions,
        fit,
    })
}

fn expect_positions(positions: &NodePositions, n: usize) -> Result<(), PipelineError> {
    if positions.len() != n {
        return Err(PipelineError::PositionsCountMismatch {
            expected: n,
            got: positions.len(),
        });
    }
    Ok(())
}

/// Converts states to cumulative event counts (state times capacity,
/// rounded per node and step), differences them into new events, and sums
/// windows of `steps_per_period`. The source node, when given, is excluded
/// from the counting. The final partial window is kept.
pub fn incidence_from_trajectory(
    traj: &Trajectory,
    capacities: &[f64],
    source: Option<usize>,
    steps_per_period: usize,
) -> IncidenceSeries {
    assert!(steps_per_period >= 1, "period must span at least one step");
    assert_eq!(traj.n(), capacities.len(), "one capacity per node");
    let cumulative: Vec<i64> = traj
        .states
        .iter()
        .map(|state| {
            state
                .iter()
                .enumerate()
                .filter(|&(i, _)| Some(i) != source)
                .map(|(i, &x)| libm::round(x * capacities[i]) as i64)
                .sum()
        })
        .collect();
    let new_events: Vec<i64> = cumulative.windows(2).map(|w| w[1] - w[0]).collect();
    let per_period: Vec<i64> = new_events
        .chunks(steps_per_period)
        .map(|chunk| chunk.iter().sum())
        .collect();
    IncidenceSeries::from_counts(per_period, steps_per_period)
}

/// Everything the adoption workflow produces.
#[derive(Clone, Debug)]
pub struct UsdaRun {
    pub estimate: EstimationResult,
    pub params: SpreadParams,
    pub trajectory: Trajectory,
    pub assumptions: AssumptionReport,
    pub fit: Option<FitReport>,
}

/// Fits homogeneous rates on the training region, replays them over the
/// full graph from `full_x0`, and scores against the reference when given.
pub fn usda_pipeline(
    train_traj: &Trajectory,
    train_graph: &WeightedDigraph,
    full_graph: &WeightedDigraph,
    full_x0: &[f64],
    steps: usize,
    h: f64,
    reference: Option<&Trajectory>,
) -> Result<UsdaRun, PipelineError> {
    let estimate = identify_homogeneous(train_traj, train_graph, h)?;
    if !estimate.identifiable {
        return Err(PipelineError::Unidentifiable {
            case: estimate.diagnostics.stationary_case,
        });
    }
    let beta = estimate.beta_hat.as_scalar().expect("homogeneous estimate");
    let delta = estimate.delta_hat.as_scalar().expect("homogeneous estimate");
    let params = SpreadParams::homogeneous(h, beta, delta, full_graph.clone());
    let run = simulate(&params, full_x0, steps, ModelKind::Euler)?;
    let fit = match reference {
        Some(observed) => Some(frobenius_fit(observed, &run.trajectory)?),
        None => None,
    };
    Ok(UsdaRun {
        estimate,
        params,
        trajectory: run.trajectory,
        assumptions: run.assumptions,
        fit,
    })
}

/// Scaled Frobenius error between two equal-shape trajectories, with
/// per-step row errors.
pub fn frobenius_fit(observed: &Trajectory, simulated: &Trajectory) -> Result<FitReport, PipelineError> {
    if observed.n() != simulated.n() || observed.states.len() != simulated.states.len() {
        return Err(PipelineError::ShapeMismatch);
    }
    let mut diff_sq = 0.0;
    let mut obs_sq = 0.0;
    let mut sim_sq = 0.0;
    let mut per_step_errors = Vec::with_capacity(observed.states.len());
    for (o_row, s_row) in observed.states.iter().zip(&simulated.states) {
        let mut row_sq = 0.0;
        for (o, s) in o_row.iter().zip(s_row) {
            let d = o - s;
            row_sq += d * d;
            obs_sq += o * o;
            sim_sq += s * s;
        }
        diff_sq += row_sq;
        per_step_errors.push(linalg::sqrt(row_sq));
    }
    if obs_sq == 0.0 {
        return Err(PipelineError::DegenerateReference);
    }
    Ok(FitReport {
        scaled_frobenius_error: linalg::sqrt(diff_sq) / linalg::sqrt(obs_sq),
        per_step_errors,
        observed_total: linalg::sqrt(obs_sq),
        simulated_total: linalg::sqrt(sim_sq),
    })
}

/// Scaled error between two incidence series (the shorter one is
/// zero-padded), with per-period absolute errors.
pub fn incidence_fit(
    observed: &IncidenceSeries,
    simulated: &IncidenceSeries,
) -> Result<FitReport, PipelineError> {
    let len = observed.per_period.len().max(simulated.per_period.len());
    let at = |series: &IncidenceSeries, k: usize| {
        series.per_period.get(k).copied().unwrap_or(0) as f64
    };
    let mut diff_sq = 0.0;
    let mut obs_sq = 0.0;
    let mut per_step_errors = Vec::with_capacity(len);
    for k in 0..len {
        let d = at(observed, k) - at(simulated, k);
        per_step_errors.push(linalg::abs(d));
        diff_sq += d * d;
        obs_sq += at(observed, k) * at(observed, k);
    }
    if obs_sq == 0.0 {
        return Err(PipelineError::DegenerateReference);
    }
    Ok(FitReport {
        scaled_frobenius_error: linalg::sqrt(diff_sq) / linalg::sqrt(obs_sq),
        per_step_errors,
        observed_total: observed.total as f64,
        simulated_total: simulated.total as f64,
    })
}

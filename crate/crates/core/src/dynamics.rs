//! Discrete-time spread dynamics over a weighted digraph.
//!
//! Three steppers are provided: the Euler discretization of the continuous
//! rate equation, an inherently unit-step product-form model, and the
//! first-order truncation of the product form (which coincides with the
//! Euler step at h = 1). States live in `[0,1]^n`; the box is provably
//! invariant under the documented rate bounds, so excursions are reported
//! as diagnostics rather than clamped away.

use alloc::vec::Vec;
use core::fmt;

use crate::graph::{self, WeightedDigraph};
use crate::linalg::{self, Mat};

/// Tolerance used when checking that simulated states stay in the unit box.
pub const INVARIANCE_TOL: f64 = 1e-12;

/// Infection coupling, either factored into per-node rates and a shared
/// graph, or a combined matrix whose (i, j) entry is the rate at which node
/// j infects node i.
#[derive(Clone, Debug, PartialEq)]
pub enum Infection {
    Scalar { beta: f64, graph: WeightedDigraph },
    PerNode { betas: Vec<f64>, graph: WeightedDigraph },
    Combined { matrix: Mat },
}

/// Step size, healing rates, and infection coupling for one spread system.
///
/// Values are plain data: out-of-range rates (negative entries, h = 0) are
/// representable on purpose so that [`check_assumptions`] can report them;
/// dimension mismatches are programmer errors and panic.
#[derive(Clone, Debug, PartialEq)]
pub struct SpreadParams {
    pub h: f64,
    pub delta: Vec<f64>,
    pub infection: Infection,
}

impl SpreadParams {
    /// One shared infection rate and healing rate for every node.
    pub fn homogeneous(h: f64, beta: f64, delta: f64, graph: WeightedDigraph) -> Self {
        let n = graph.n();
        Self::new(h, alloc::vec![delta; n], Infection::Scalar { beta, graph })
    }

    pub fn per_node(h: f64, betas: Vec<f64>, delta: Vec<f64>, graph: WeightedDigraph) -> Self {
        assert_eq!(betas.len(), graph.n(), "one beta per node");
        Self::new(h, delta, Infection::PerNode { betas, graph })
    }

    pub fn combined(h: f64, delta: Vec<f64>, matrix: Mat) -> Self {
        assert!(matrix.is_square(), "combined matrix must be square");
        Self::new(h, delta, Infection::Combined { matrix })
    }

    pub fn new(h: f64, delta: Vec<f64>, infection: Infection) -> Self {
        assert!(h.is_finite() && h >= 0.0, "step size must be finite and >= 0");
        let p = SpreadParams { h, delta, infection };
        assert_eq!(p.delta.len(), p.n(), "one delta per node");
        p
    }

    pub fn n(&self) -> usize {
        match &self.infection {
            Infection::Scalar { graph, .. } | Infection::PerNode { graph, .. } => graph.n(),
            Infection::Combined { matrix } => matrix.rows(),
        }
    }

    /// The factored form `(betas, graph)`, if this is not a combined matrix.
    pub fn factored(&self) -> Option<(Vec<f64>, &WeightedDigraph)> {
        match &self.infection {
            Infection::Scalar { beta, graph } => Some((alloc::vec![*beta; graph.n()], graph)),
            Infection::PerNode { betas, graph } => Some((betas.clone(), graph)),
            Infection::Combined { .. } => None,
        }
    }

    /// The combined coupling matrix with entries `beta_i * a_ij` (built on
    /// the fly for factored parameters).
    pub fn effective_coupling(&self) -> Mat {
        match &self.infection {
            Infection::Combined { matrix } => matrix.clone(),
            Infection::Scalar { beta, graph } => {
                let w = graph.weights();
                Mat::from_fn(w.rows(), w.cols(), |i, j| beta * w[(i, j)])
            }
            Infection::PerNode { betas, graph } => {
                let w = graph.weights();
                Mat::from_fn(w.rows(), w.cols(), |i, j| betas[i] * w[(i, j)])
            }
        }
    }

    /// `(beta, delta)` when every node shares the same factored rates.
    pub fn homogeneous_rates(&self) -> Option<(f64, f64)> {
        let delta = self.delta.first().copied()?;
        if !self.delta.iter().all(|&d| d == delta) {
            return None;
        }
        match &self.infection {
            Infection::Scalar { beta, .. } => Some((*beta, delta)),
            Infection::PerNode { betas, .. } => {
                let beta = *betas.first()?;
                betas.iter().all(|&b| b == beta).then_some((beta, delta))
            }
            Infection::Combined { .. } => None,
        }
    }

    fn expect_state_len(&self, x: &[f64]) -> Result<(), DynamicsError> {
        if x.len() == self.n() {
            Ok(())
        } else {
            Err(DynamicsError::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DynamicsError {
    DimensionMismatch { expected: usize, got: usize },
    /// The product and truncated models need per-node rates and a separate
    /// graph; a combined coupling matrix cannot be factored.
    FactoredFormRequired,
    /// A state left `[0,1]^n` even though the checked rate bounds guarantee
    /// invariance; this indicates an internal error, not a modeling one.
    InvariantViolated { step: usize, magnitude: f64 },
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::DimensionMismatch { expected, got } => {
                write!(f, "state has {got} entries, expected {expected}")
            }
            DynamicsError::FactoredFormRequired => write!(
                f,
                "this model needs factored infection parameters (per-node rates plus a graph)"
            ),
            DynamicsError::InvariantViolated { step, magnitude } => write!(
                f,
                "state left [0,1]^n by {magnitude:e} at step {step} despite satisfied rate bounds"
            ),
        }
    }
}

impl core::error::Error for DynamicsError {}

/// Which stepper produced a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ModelKind {
    Euler,
    Product,
    Truncated,
}

/// Time-indexed states `x^0 .. x^T`, one row per step.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub h: f64,
    /// `None` for externally supplied data.
    pub model: Option<ModelKind>,
}

impl Trajectory {
    pub fn from_states(states: Vec<Vec<f64>>, h: f64) -> Self {
        assert!(!states.is_empty(), "a trajectory holds at least x^0");
        let n = states[0].len();
        assert!(states.iter().all(|s| s.len() == n), "ragged trajectory");
        Trajectory {
            states,
            h,
            model: None,
        }
    }

    pub fn n(&self) -> usize {
        self.states[0].len()
    }

    /// Number of transitions T (the trajectory holds T + 1 states).
    pub fn transitions(&self) -> usize {
        self.states.len() - 1
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    pub fn last(&self) -> &[f64] {
        self.states.last().expect("non-empty by construction")
    }
}

/// Outcome of one diagnostic condition: the flag, the extremal statistic it
/// was decided on, and the offending node indices when it failed.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConditionCheck {
    pub passed: bool,
    pub worst: f64,
    pub offending: Vec<usize>,
}

/// Per-condition report for the model's standing assumptions: initial state
/// inside the unit box, nonnegative rates, per-step rate bounds
/// (`h * delta_i <= 1` and `h * sum_{j != i} beta_ij <= 1`), nontrivial
/// spread (`h != 0` and at least one positive off-diagonal coupling), and
/// irreducible coupling.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssumptionReport {
    pub initial_state_in_unit_box: ConditionCheck,
    pub rates_nonnegative: ConditionCheck,
    pub step_size_within_bounds: ConditionCheck,
    pub nontrivial_spread: ConditionCheck,
    pub irreducible_coupling: ConditionCheck,
    pub max_h_delta: f64,
    pub max_h_offdiag_row_sum: f64,
    /// `h` times the largest full row sum of the coupling matrix. The unit
    /// box is provably invariant when this and `max_h_delta` are at most 1;
    /// the off-diagonal bound alone does not cover heavy self-loops.
    pub max_h_full_row_sum: f64,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.initial_state_in_unit_box.passed
            && self.rates_nonnegative.passed
            && self.step_size_within_bounds.passed
            && self.nontrivial_spread.passed
            && self.irreducible_coupling.passed
    }

    /// True when the checked bounds are strong enough to guarantee that
    /// every step stays in `[0,1]^n`.
    pub fn guarantees_unit_box(&self) -> bool {
        self.all_passed() && self.max_h_full_row_sum <= 1.0
    }
}

/// Evaluates every standing assumption on `(p, x0)` and reports them all;
/// nothing fails silently and nothing panics on bad values.
pub fn check_assumptions(p: &SpreadParams, x0: &[f64]) -> AssumptionReport {
    assert_eq!(x0.len(), p.n(), "state length must match node count");
    let n = p.n();
    let b = p.effective_coupling();

    let mut box_worst = f64::NEG_INFINITY;
    let mut box_offending = Vec::new();
    for (i, &xi) in x0.iter().enumerate() {
        let out = if xi.is_finite() {
            (-xi).max(xi - 1.0)
        } else {
            f64::INFINITY
        };
        if out > 0.0 {
            box_offending.push(i);
        }
        box_worst = box_worst.max(out);
    }
    let initial_state_in_unit_box = ConditionCheck {
        passed: box_worst <= 0.0,
        worst: box_worst,
        offending: box_offending,
    };

    let mut min_rate = f64::INFINITY;
    let mut neg_offending = Vec::new();
    for i in 0..n {
        let mut row_min = p.delta[i];
        for j in 0..n {
            row_min = row_min.min(b[(i, j)]);
        }
        if row_min < 0.0 {
            neg_offending.push(i);
        }
        min_rate = min_rate.min(row_min);
    }
    let rates_nonnegative = ConditionCheck {
        passed: min_rate >= 0.0,
        worst: min_rate,
        offending: neg_offending,
    };

    let mut max_h_delta: f64 = 0.0;
    let mut max_h_offdiag: f64 = 0.0;
    let mut max_h_full: f64 = 0.0;
    let mut bound_offending = Vec::new();
    for i in 0..n {
        let hd = p.h * p.delta[i];
        let hb = p.h * b.offdiag_row_sum(i);
        if hd > 1.0 || hb > 1.0 {
            bound_offending.push(i);
        }
        max_h_delta = max_h_delta.max(hd);
        max_h_offdiag = max_h_offdiag.max(hb);
        max_h_full = max_h_full.max(p.h * b.row_sum(i));
    }
    let step_size_within_bounds = ConditionCheck {
        passed: max_h_delta.max(max_h_offdiag) <= 1.0,
        worst: max_h_delta.max(max_h_offdiag),
        offending: bound_offending,
    };

    let mut max_offdiag: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                max_offdiag = max_offdiag.max(b[(i, j)]);
            }
        }
    }
    let nontrivial_spread = ConditionCheck {
        passed: p.h != 0.0 && max_offdiag > 0.0,
        worst: if p.h == 0.0 { 0.0 } else { max_offdiag },
        offending: Vec::new(),
    };

    let components = graph::strongly_connected_components(&b);
    let irreducible = n == 1 || components.len() == 1;
    let mut outside_largest = Vec::new();
    if !irreducible {
        let largest = components
            .iter()
            .enumerate()
            .max_by_key(|(_, c)| c.len())
            .map(|(i, _)| i)
            .unwrap_or(0);
        for (ci, component) in components.iter().enumerate() {
            if ci != largest {
                outside_largest.extend_from_slice(component);
            }
        }
        outside_largest.sort_unstable();
    }
    let irreducible_coupling = ConditionCheck {
        passed: irreducible,
        worst: components.len() as f64,
        offending: outside_largest,
    };

    AssumptionReport {
        initial_state_in_unit_box,
        rates_nonnegative,
        step_size_within_bounds,
        nontrivial_spread,
        irreducible_coupling,
        max_h_delta,
        max_h_offdiag_row_sum: max_h_offdiag,
        max_h_full_row_sum: max_h_full,
    }
}

/// One Euler step: `x_i' = x_i + h ((1 - x_i) sum_j beta_ij x_j - delta_i x_i)`.
/// No clamping is applied.
pub fn step_euler(p: &SpreadParams, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    p.expect_state_len(x)?;
    let n = p.n();
    let mut next = Vec::with_capacity(n);
    match &p.infection {
        Infection::Combined { matrix } => {
            for i in 0..n {
                let pressure = linalg::dot(matrix.row(i), x);
                next.push(x[i] + p.h * ((1.0 - x[i]) * pressure - p.delta[i] * x[i]));
            }
        }
        Infection::Scalar { beta, graph } => {
            for i in 0..n {
                let pressure = beta * linalg::dot(graph.weights().row(i), x);
                next.push(x[i] + p.h * ((1.0 - x[i]) * pressure - p.delta[i] * x[i]));
            }
        }
        Infection::PerNode { betas, graph } => {
            for i in 0..n {
                let pressure = betas[i] * linalg::dot(graph.weights().row(i), x);
                next.push(x[i] + p.h * ((1.0 - x[i]) * pressure - p.delta[i] * x[i]));
            }
        }
    }
    Ok(next)
}

/// One product-form step:
/// `x_i' = x_i (1 - delta_i) + (1 - x_i)(1 - prod_j (1 - beta_i a_ij x_j))`.
///
/// The model is inherently unit-step; `p.h` is ignored (rollouts via
/// [`simulate`] record a warning when `h != 1`). Requires factored
/// infection parameters.
pub fn step_product(p: &SpreadParams, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    p.expect_state_len(x)?;
    let (betas, graph) = p.factored().ok_or(DynamicsError::FactoredFormRequired)?;
    let n = p.n();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let row = graph.weights().row(i);
        let mut escape = 1.0;
        for (j, &a) in row.iter().enumerate() {
            escape *= 1.0 - betas[i] * a * x[j];
        }
        next.push(x[i] * (1.0 - p.delta[i]) + (1.0 - x[i]) * (1.0 - escape));
    }
    Ok(next)
}

/// First-order truncation of the product model. This coincides with the
/// Euler step at h = 1 and is implemented as exactly that delegation, so
/// the two agree bit for bit. Requires factored infection parameters.
pub fn step_truncated(p: &SpreadParams, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    if p.factored().is_none() {
        return Err(DynamicsError::FactoredFormRequired);
    }
    let unit_step = SpreadParams {
        h: 1.0,
        delta: p.delta.clone(),
        infection: p.infection.clone(),
    };
    step_euler(&unit_step, x)
}

/// A state excursion outside `[0,1]^n` beyond [`INVARIANCE_TOL`].
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Excursion {
    pub step: usize,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SimWarning {
    /// The product model has no step-size parameter; `h` was ignored.
    StepSizeIgnoredByProductModel { h: f64 },
    /// One or more standing assumptions failed; invariance of the unit box
    /// is no longer guaranteed and excursions are only reported.
    AssumptionsNotMet,
}

impl fmt::Display for SimWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimWarning::StepSizeIgnoredByProductModel { h } => {
                write!(f, "product model is unit-step; h = {h} was ignored")
            }
            SimWarning::AssumptionsNotMet => {
                write!(f, "assumptions not met; unit-box invariance not guaranteed")
            }
        }
    }
}

/// A rolled-out trajectory plus everything observed along the way.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationRun {
    pub trajectory: Trajectory,
    pub assumptions: AssumptionReport,
    pub excursions: Vec<Excursion>,
    pub warnings: Vec<SimWarning>,
}

/// Rolls out `steps` transitions of the chosen model from `x0`, recording
/// every state. States that leave the unit box by more than
/// [`INVARIANCE_TOL`] are reported as excursions; if the rate bounds
/// guaranteed invariance, such an excursion is escalated to
/// [`DynamicsError::InvariantViolated`] instead of being recorded.
pub fn simulate(
    p: &SpreadParams,
    x0: &[f64],
    steps: usize,
    model: ModelKind,
) -> Result<SimulationRun, DynamicsError> {
    p.expect_state_len(x0)?;
    let assumptions = check_assumptions(p, x0);
    let mut warnings = Vec::new();
    if model == ModelKind::Product && p.h != 1.0 {
        warnings.push(SimWarning::StepSizeIgnoredByProductModel { h: p.h });
    }
    if !assumptions.all_passed() {
        warnings.push(SimWarning::AssumptionsNotMet);
    }
    let guaranteed = assumptions.guarantees_unit_box();

    let mut states = Vec::with_capacity(steps + 1);
    let mut excursions = Vec::new();
    let mut record = |state: &[f64], step: usize| -> Result<(), DynamicsError> {
        let magnitude = box_excursion(state);
        if magnitude > INVARIANCE_TOL {
            if guaranteed {
                return Err(DynamicsError::InvariantViolated { step, magnitude });
            }
            excursions.push(Excursion { step, magnitude });
        }
        Ok(())
    };

    record(x0, 0)?;
    states.push(x0.to_vec());
    for step in 1..=steps {
        let next = match model {
            ModelKind::Euler => step_euler(p, states.last().unwrap())?,
            ModelKind::Product => step_product(p, states.last().unwrap())?,
            ModelKind::Truncated => step_truncated(p, states.last().unwrap())?,
        };
        record(&next, step)?;
        states.push(next);
    }

    Ok(SimulationRun {
        trajectory: Trajectory {
            states,
            h: p.h,
            model: Some(model),
        },
        assumptions,
        excursions,
        warnings,
    })
}

/// How far `x` sticks out of `[0,1]^n` (zero when inside).
pub fn box_excursion(x: &[f64]) -> f64 {
    x.iter()
        .map(|&xi| (-xi).max(xi - 1.0).max(0.0))
        .fold(0.0, f64::max)
}

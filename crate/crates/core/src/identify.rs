//! Recovery of spread parameters from trajectory data.
//!
//! With the graph, the sampled states, and the step size known, each
//! transition is linear in `(beta, delta)`: stacking the per-step regressors
//! gives a two-column least-squares system whose rank decides
//! identifiability. Homogeneous recovery stacks every node into one system;
//! heterogeneous recovery solves one small system per node. Two further
//! routes recover only the rate ratio: least squares under a guessed step
//! size (the guess scales both estimates but cancels in the ratio), and a
//! closed-form read-off from an observed endemic equilibrium.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::Trajectory;
use crate::graph::WeightedDigraph;
use crate::linalg::{self, lstsq_two_col, Mat};

/// Relative singular-value cutoff for rank decisions.
pub const RANK_REL_TOL: f64 = 1e-10;
/// Entries of an endemic state must be at least this large for the
/// closed-form ratio read-off.
pub const ENDEMIC_ENTRY_MIN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum IdentifyError {
    /// At least one transition (T > 0) is required.
    InsufficientData,
    /// Trajectory and graph disagree on the node count.
    DimensionMismatch { expected: usize, got: usize },
    /// The step-size guess must be positive.
    NonPositiveStepGuess,
    /// The fitted infection rate is zero, so the ratio is undefined.
    RatioUndefined,
    /// An endemic-state entry was below [`ENDEMIC_ENTRY_MIN`].
    EndemicEntryTooSmall { node: usize },
    /// At least two nodes are required.
    TooFewNodes,
}

impl fmt::Display for IdentifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdentifyError::InsufficientData => {
                write!(f, "trajectory must contain at least one transition")
            }
            IdentifyError::DimensionMismatch { expected, got } => {
                write!(f, "trajectory has {got} nodes, graph has {expected}")
            }
            IdentifyError::NonPositiveStepGuess => write!(f, "step-size guess must be positive"),
            IdentifyError::RatioUndefined => {
                write!(f, "fitted infection rate is zero; ratio undefined")
            }
            IdentifyError::EndemicEntryTooSmall { node } => {
                write!(f, "endemic state entry {node} is too close to zero")
            }
            IdentifyError::TooFewNodes => write!(f, "at least two nodes are required"),
        }
    }
}

impl core::error::Error for IdentifyError {}

/// The stacked regression system: `phi * [beta, delta]^T = rhs`, with one
/// row per (transition, node) pair. Column 0 carries the infection
/// regressor `h (1 - x_i) (A x)_i`, column 1 the healing regressor `-h x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegressionSystem {
    pub phi: Mat,
    pub rhs: Vec<f64>,
    pub h_used: f64,
}

impl RegressionSystem {
    pub fn infection_column(&self) -> Vec<f64> {
        (0..self.phi.rows()).map(|r| self.phi[(r, 0)]).collect()
    }

    pub fn healing_column(&self) -> Vec<f64> {
        (0..self.phi.rows()).map(|r| self.phi[(r, 1)]).collect()
    }

    pub fn is_zero(&self) -> bool {
        (0..self.phi.rows()).all(|r| self.phi[(r, 0)] == 0.0 && self.phi[(r, 1)] == 0.0)
    }
}

/// Stacks the regression rows for every transition and node.
pub fn build_regression(
    traj: &Trajectory,
    a: &WeightedDigraph,
    h: f64,
) -> Result<RegressionSystem, IdentifyError> {
    let n = a.n();
    if traj.n() != n {
        return Err(IdentifyError::DimensionMismatch {
            expected: n,
            got: traj.n(),
        });
    }
    let t = traj.transitions();
    if t == 0 {
        return Err(IdentifyError::InsufficientData);
    }
    let mut phi = Mat::zeros(n * t, 2);
    let mut rhs = vec![0.0; n * t];
    for k in 0..t {
        let x = traj.state(k);
        let x_next = traj.state(k + 1);
        for i in 0..n {
            let row = k * n + i;
            let pressure = linalg::dot(a.weights().row(i), x);
            phi[(row, 0)] = h * (1.0 - x[i]) * pressure;
            phi[(row, 1)] = -h * x[i];
            rhs[row] = x_next[i] - x[i];
        }
    }
    Ok(RegressionSystem { phi, rhs, h_used: h })
}

/// Scalar or per-node parameter estimate. Unidentifiable entries are NaN so
/// that accidental use is loud; in JSON they appear as `null`.
#[derive(Clone, Debug, PartialEq)]
pub enum Estimate {
    Scalar(f64),
    PerNode(Vec<f64>),
}

#[cfg(feature = "serde")]
mod estimate_serde {
    use super::Estimate;
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Scalar(Option<f64>),
        PerNode(Vec<Option<f64>>),
    }

    fn pack(v: f64) -> Option<f64> {
        v.is_finite().then_some(v)
    }

    fn unpack(v: Option<f64>) -> f64 {
        v.unwrap_or(f64::NAN)
    }

    impl Serialize for Estimate {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            let repr = match self {
                Estimate::Scalar(v) => Repr::Scalar(pack(*v)),
                Estimate::PerNode(v) => Repr::PerNode(v.iter().map(|&x| pack(x)).collect()),
            };
            repr.serialize(serializer)
        }
    }

    impl<'de> Deserialize<'de> for Estimate {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            Ok(match Repr::deserialize(deserializer)? {
                Repr::Scalar(v) => Estimate::Scalar(unpack(v)),
                Repr::PerNode(v) => Estimate::PerNode(v.into_iter().map(unpack).collect()),
            })
        }
    }
}

impl Estimate {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Estimate::Scalar(v) => Some(*v),
            Estimate::PerNode(_) => None,
        }
    }

    pub fn as_per_node(&self) -> Option<&[f64]> {
        match self {
            Estimate::Scalar(_) => None,
            Estimate::PerNode(v) => Some(v),
        }
    }
}

/// Why a stationary trajectory is stationary: resting at the healthy state
/// (all regressors vanish, parameters unconstrained) or at an interior
/// equilibrium (regressors nonzero, parameters only known up to the null
/// space).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum StationaryKind {
    Healthy,
    Endemic,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostics {
    pub transitions: usize,
    pub movement_detected: bool,
    /// Nodes whose parameters could not be identified (no movement or a
    /// rank-deficient per-node system).
    pub nodes_stationary: Vec<usize>,
    pub stationary_case: Option<StationaryKind>,
    /// Set when the estimates were computed under a guessed step size and
    /// are therefore scaled by an unknown factor (the ratio is not).
    pub scaled_by_step_guess: bool,
    /// Noise-free model data cannot produce negative rates; a negative
    /// estimate signals model mismatch and is returned unprojected.
    pub negative_estimates: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimationResult {
    pub beta_hat: Estimate,
    pub delta_hat: Estimate,
    /// `delta_hat / beta_hat`, invariant to step-size guesses.
    pub ratio_hat: Estimate,
    pub residual_norm: f64,
    pub identifiable: bool,
    pub rank: usize,
    pub diagnostics: Diagnostics,
}

fn movement_exists(traj: &Trajectory) -> bool {
    let x0 = traj.state(0);
    (1..=traj.transitions()).any(|k| traj.state(k) != x0)
}

fn node_movement_exists(traj: &Trajectory, i: usize) -> bool {
    let x0 = traj.state(0)[i];
    (1..=traj.transitions()).any(|k| traj.state(k)[i] != x0)
}

/// Recovers one shared `(beta, delta)` pair from the stacked system. On
/// noise-free model data with movement the recovery is exact up to rounding.
pub fn identify_homogeneous(
    traj: &Trajectory,
    a: &WeightedDigraph,
    h: f64,
) -> Result<EstimationResult, IdentifyError> {
    if a.n() < 2 {
        return Err(IdentifyError::TooFewNodes);
    }
    let system = build_regression(traj, a, h)?;
    let movement = movement_exists(traj);
    let sol = lstsq_two_col(
        &system.infection_column(),
        &system.healing_column(),
        &system.rhs,
        RANK_REL_TOL,
    );
    let identifiable = movement && sol.rank == 2;

    let stationary_case = (!movement).then(|| {
        if system.is_zero() {
            StationaryKind::Healthy
        } else {
            StationaryKind::Endemic
        }
    });

    let (beta, delta) = if identifiable {
        (sol.coeffs[0], sol.coeffs[1])
    } else {
        (f64::NAN, f64::NAN)
    };

    Ok(EstimationResult {
        beta_hat: Estimate::Scalar(beta),
        delta_hat: Estimate::Scalar(delta),
        ratio_hat: Estimate::Scalar(delta / beta),
        residual_norm: sol.residual_norm,
        identifiable,
        rank: sol.rank,
        diagnostics: Diagnostics {
            transitions: traj.transitions(),
            movement_detected: movement,
            nodes_stationary: Vec::new(),
            stationary_case,
            scaled_by_step_guess: false,
            negative_estimates: identifiable && (beta < 0.0 || delta < 0.0),
        },
    })
}

/// Homogeneous recovery under a guessed step size. The guess scales both
/// estimates by `h_true / h_guess` but cancels in the ratio, which is
/// recovered exactly.
pub fn identify_ratio(
    traj: &Trajectory,
    a: &WeightedDigraph,
    h_guess: f64,
) -> Result<EstimationResult, IdentifyError> {
    if !(h_guess > 0.0 && h_guess.is_finite()) {
        return Err(IdentifyError::NonPositiveStepGuess);
    }
    let mut result = identify_homogeneous(traj, a, h_guess)?;
    if result.identifiable && result.beta_hat.as_scalar() == Some(0.0) {
        return Err(IdentifyError::RatioUndefined);
    }
    result.diagnostics.scaled_by_step_guess = true;
    Ok(result)
}

/// Recovers per-node `(beta_i, delta_i)` pairs, one two-column system per
/// node. Nodes without movement or with a rank-deficient system are listed
/// in `nodes_stationary` and their estimates are NaN; other nodes are
/// unaffected.
pub fn identify_heterogeneous(
    traj: &Trajectory,
    a: &WeightedDigraph,
    h: f64,
) -> Result<EstimationResult, IdentifyError> {
    if a.n() < 2 {
        return Err(IdentifyError::TooFewNodes);
    }
    let n = a.n();
    if traj.n() != n {
        return Err(IdentifyError::DimensionMismatch {
            expected: n,
            got: traj.n(),
        });
    }
    let t = traj.transitions();
    if t == 0 {
        return Err(IdentifyError::InsufficientData);
    }

    let mut betas = vec![f64::NAN; n];
    let mut deltas = vec![f64::NAN; n];
    let mut ratios = vec![f64::NAN; n];
    let mut nodes_stationary = Vec::new();
    let mut residual_sq = 0.0;
    let mut min_rank = 2usize;
    let mut any_negative = false;

    for i in 0..n {
        let mut col_infection = Vec::with_capacity(t);
        let mut col_healing = Vec::with_capacity(t);
        let mut rhs = Vec::with_capacity(t);
        for k in 0..t {
            let x = traj.state(k);
            let pressure = linalg::dot(a.weights().row(i), x);
            col_infection.push(h * (1.0 - x[i]) * pressure);
            col_healing.push(-h * x[i]);
            rhs.push(traj.state(k + 1)[i] - x[i]);
        }
        let sol = lstsq_two_col(&col_infection, &col_healing, &rhs, RANK_REL_TOL);
        let moving = node_movement_exists(traj, i);
        if moving && sol.rank == 2 {
            betas[i] = sol.coeffs[0];
            deltas[i] = sol.coeffs[1];
            ratios[i] = sol.coeffs[1] / sol.coeffs[0];
            residual_sq += sol.residual_norm * sol.residual_norm;
            any_negative |= sol.coeffs[0] < 0.0 || sol.coeffs[1] < 0.0;
        } else {
            nodes_stationary.push(i);
            min_rank = min_rank.min(sol.rank);
        }
    }

    let movement = movement_exists(traj);
    let stationary_case = (!movement).then(|| {
        let all_zero = (0..n).all(|i| {
            (0..=t).all(|k| traj.state(k)[i] == 0.0)
        });
        if all_zero {
            StationaryKind::Healthy
        } else {
            StationaryKind::Endemic
        }
    });
    let identifiable = nodes_stationary.is_empty();

    Ok(EstimationResult {
        beta_hat: Estimate::PerNode(betas),
        delta_hat: Estimate::PerNode(deltas),
        ratio_hat: Estimate::PerNode(ratios),
        residual_norm: linalg::sqrt(residual_sq),
        identifiable,
        rank: if identifiable { 2 } else { min_rank },
        diagnostics: Diagnostics {
            transitions: t,
            movement_detected: movement,
            nodes_stationary,
            stationary_case,
            scaled_by_step_guess: false,
            negative_estimates: any_negative,
        },
    })
}

/// Closed-form per-node rate ratios from an observed strictly positive
/// equilibrium: `delta_i / beta_i = ((1 - x_i) / x_i) * sum_j a_ij x_j`.
pub fn ratio_from_endemic(
    x_star: &[f64],
    a: &WeightedDigraph,
) -> Result<Vec<f64>, IdentifyError> {
    let n = a.n();
    if x_star.len() != n {
        return Err(IdentifyError::DimensionMismatch {
            expected: n,
            got: x_star.len(),
        });
    }
    if let Some(node) = x_star.iter().position(|&x| x < ENDEMIC_ENTRY_MIN) {
        return Err(IdentifyError::EndemicEntryTooSmall { node });
    }
    Ok((0..n)
        .map(|i| {
            let pressure = linalg::dot(a.weights().row(i), x_star);
            (1.0 - x_star[i]) / x_star[i] * pressure
        })
        .collect())
}

/// Healing rates implied by an observed equilibrium under assumed infection
/// rates: `delta_i = beta_i * ratio_i`.
pub fn derive_delta_from_endemic(
    x_star: &[f64],
    a: &WeightedDigraph,
    beta_assumed: &[f64],
) -> Result<Vec<f64>, IdentifyError> {
    if beta_assumed.len() != a.n() {
        return Err(IdentifyError::DimensionMismatch {
            expected: a.n(),
            got: beta_assumed.len(),
        });
    }
    Ok(ratio_from_endemic(x_star, a)?
        .into_iter()
        .zip(beta_assumed)
        .map(|(ratio, beta)| beta * ratio)
        .collect())
}

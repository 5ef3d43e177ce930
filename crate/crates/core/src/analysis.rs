//! Stability analysis of the Euler-discretized spread dynamics: regime
//! classification via the dominant eigenvalue of the one-step linearization
//! `M = I - hD + hB`, diagonal Lyapunov certificates built from the Perron
//! vectors of `M`, and computation of the strictly positive endemic
//! equilibrium when it exists.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::dynamics::{check_assumptions, step_euler, AssumptionReport, SpreadParams};
use crate::graph::{self, spectral_abscissa};
use crate::linalg::{self, Mat};

/// Width of the band around 1 treated as the threshold boundary.
pub const REGIME_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    StableStrict,
    StableBoundary,
    Endemic,
}

/// The equivalent threshold statement for homogeneous rates: the dominant
/// eigenvalue of the bare adjacency against `delta / beta`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HomogeneousThreshold {
    pub s1_adjacency: f64,
    pub ratio_delta_over_beta: f64,
    /// Whether both formulations classify the regime identically.
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdReport {
    /// Dominant eigenvalue of `I - hD + hB`.
    pub s1_value: f64,
    pub regime: Regime,
    /// Present only for homogeneous factored rates with `beta > 0`.
    pub homogeneous_form: Option<HomogeneousThreshold>,
    /// Assumptions evaluated with the zero state standing in for x0.
    pub assumptions: AssumptionReport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Definiteness {
    NegativeDefinite,
    NegativeSemidefinite,
}

/// Diagonal Lyapunov weights certifying stability of the healthy state,
/// together with the verified extreme eigenvalue of `M^T P M - P`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LyapunovCertificate {
    pub p_diagonal: Vec<f64>,
    pub definiteness: Definiteness,
    pub max_eigenvalue: f64,
}

/// The strictly positive equilibrium (when the regime is endemic) or the
/// healthy state with `exists = false` otherwise.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EndemicState {
    pub x_star: Vec<f64>,
    /// Infinity norm of `step(x*) - x*` under the caller's step size.
    pub residual: f64,
    pub iterations: usize,
    pub exists: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AnalysisError {
    /// `M = I - hD + hB` has negative entries, so Perron theory does not
    /// apply; this happens when `h * delta_i > 1 + h * beta_ii` for some node.
    CouplingNotNonnegative,
    /// The coupling must be irreducible for the certificate construction.
    CouplingNotIrreducible,
    /// No certificate for the healthy state exists above the threshold.
    CertificateUnavailable { s1: f64 },
    /// The Perron vectors contained non-positive entries.
    DegeneratePerronVector,
    /// The certificate failed its independent eigenvalue check.
    VerificationFailed { max_eigenvalue: f64 },
    /// The equilibrium iteration did not reach the target defect.
    NoConvergence { residual: f64, iterations: usize },
    /// The equilibrium iteration left the strictly positive orthant.
    EquilibriumNotPositive,
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::CouplingNotNonnegative => {
                write!(f, "I - hD + hB has negative entries (h too large for some delta)")
            }
            AnalysisError::CouplingNotIrreducible => {
                write!(f, "coupling matrix is reducible")
            }
            AnalysisError::CertificateUnavailable { s1 } => {
                write!(f, "no healthy-state certificate exists: s1 = {s1} > 1")
            }
            AnalysisError::DegeneratePerronVector => {
                write!(f, "dominant eigenvectors were not strictly positive")
            }
            AnalysisError::VerificationFailed { max_eigenvalue } => {
                write!(f, "certificate check failed: max eigenvalue {max_eigenvalue:e}")
            }
            AnalysisError::NoConvergence { residual, iterations } => {
                write!(f, "equilibrium iteration stalled at defect {residual:e} after {iterations} steps")
            }
            AnalysisError::EquilibriumNotPositive => {
                write!(f, "equilibrium iterate left the positive orthant")
            }
        }
    }
}

impl core::error::Error for AnalysisError {}

/// Builds the one-step linearization `M = I - hD + hB`.
pub fn one_step_matrix(p: &SpreadParams) -> Mat {
    let b = p.effective_coupling();
    let n = p.n();
    Mat::from_fn(n, n, |i, j| {
        let base = p.h * b[(i, j)];
        if i == j {
            1.0 - p.h * p.delta[i] + base
        } else {
            base
        }
    })
}

fn regime_of(value: f64, threshold: f64) -> Regime {
    if linalg::abs(value - threshold) <= REGIME_TOL {
        Regime::StableBoundary
    } else if value < threshold {
        Regime::StableStrict
    } else {
        Regime::Endemic
    }
}

/// Classifies the spread regime from the dominant eigenvalue of
/// `I - hD + hB`. For homogeneous factored rates the report also carries
/// the equivalent adjacency-vs-ratio formulation and whether the two
/// classifications agree.
pub fn classify(p: &SpreadParams) -> ThresholdReport {
    let m = one_step_matrix(p);
    let s1_value = spectral_abscissa(&m).spectral_abscissa;
    let regime = regime_of(s1_value, 1.0);

    let homogeneous_form = match (p.homogeneous_rates(), p.factored()) {
        (Some((beta, delta)), Some((_, graph))) if beta > 0.0 => {
            let s1_adjacency = spectral_abscissa(graph.weights()).spectral_abscissa;
            let ratio = delta / beta;
            Some(HomogeneousThreshold {
                s1_adjacency,
                ratio_delta_over_beta: ratio,
                agrees: regime_of(s1_adjacency, ratio) == regime,
            })
        }
        _ => None,
    };

    let zero = vec![0.0; p.n()];
    ThresholdReport {
        s1_value,
        regime,
        homogeneous_form,
        assumptions: check_assumptions(p, &zero),
    }
}

/// Builds diagonal Lyapunov weights `p_i = u_i / v_i` from the left and
/// right Perron vectors of `M = I - hD + hB` and verifies definiteness of
/// `M^T P M - P` with the symmetric eigensolver (tolerance 1e-8 on the
/// boundary). Fails when `s1(M) > 1`, when `M` is not irreducible
/// nonnegative, or when the verification disagrees with the regime.
pub fn lyapunov_weights(p: &SpreadParams) -> Result<LyapunovCertificate, AnalysisError> {
    let m = one_step_matrix(p);
    if !m.is_nonnegative() {
        return Err(AnalysisError::CouplingNotNonnegative);
    }
    if graph::strongly_connected_components(&m).len() != 1 {
        return Err(AnalysisError::CouplingNotIrreducible);
    }

    let summary = spectral_abscissa(&m);
    let s1 = summary.spectral_abscissa;
    if s1 > 1.0 + REGIME_TOL {
        return Err(AnalysisError::CertificateUnavailable { s1 });
    }

    let u = &summary.dominant_left_vector;
    let v = &summary.dominant_right_vector;
    if u.iter().any(|&x| x <= 0.0) || v.iter().any(|&x| x <= 0.0) {
        return Err(AnalysisError::DegeneratePerronVector);
    }
    let weights: Vec<f64> = u.iter().zip(v).map(|(ui, vi)| ui / vi).collect();

    // C = M^T P M - P, symmetric by construction.
    let n = p.n();
    let mut c = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut sum = 0.0;
            for k in 0..n {
                sum += m[(k, i)] * weights[k] * m[(k, j)];
            }
            c[(i, j)] = sum;
        }
        c[(i, i)] -= weights[i];
    }
    let max_eigenvalue = *linalg::symmetric_eigenvalues(&c)
        .last()
        .expect("n >= 1");

    let boundary = linalg::abs(s1 - 1.0) <= REGIME_TOL;
    if boundary {
        if linalg::abs(max_eigenvalue) > 1e-8 {
            return Err(AnalysisError::VerificationFailed { max_eigenvalue });
        }
        Ok(LyapunovCertificate {
            p_diagonal: weights,
            definiteness: Definiteness::NegativeSemidefinite,
            max_eigenvalue,
        })
    } else {
        if max_eigenvalue >= 0.0 {
            return Err(AnalysisError::VerificationFailed { max_eigenvalue });
        }
        Ok(LyapunovCertificate {
            p_diagonal: weights,
            definiteness: Definiteness::NegativeDefinite,
            max_eigenvalue,
        })
    }
}

const ENDEMIC_MAX_ITERATIONS: usize = 1_000_000;

/// Solves the interior fixed point `(1 - x_i) sum_j beta_ij x_j = delta_i x_i`
/// by damped forward iteration with an internally chosen step size that
/// satisfies the rate bounds, starting near the all-ones corner. Below or at
/// the threshold the healthy state is the unique equilibrium, so the result
/// carries `exists = false` and x* = 0.
pub fn endemic_equilibrium(p: &SpreadParams) -> Result<EndemicState, AnalysisError> {
    let n = p.n();
    let report = classify(p);
    if report.regime != Regime::Endemic {
        return Ok(EndemicState {
            x_star: vec![0.0; n],
            residual: 0.0,
            iterations: 0,
            exists: false,
        });
    }

    let b = p.effective_coupling();
    let mut rate_scale: f64 = 0.0;
    for i in 0..n {
        rate_scale = rate_scale.max(b.row_sum(i)).max(p.delta[i]);
    }
    // Endemic regimes have positive coupling somewhere.
    debug_assert!(rate_scale > 0.0);
    let h_internal = 1.0 / rate_scale;
    let tol = 1e-12 / p.h.max(1.0);

    let mut x = vec![1.0 - 1e-3; n];
    let mut defect = vec![0.0; n];
    let mut iterations = 0;
    loop {
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let pressure = linalg::dot(b.row(i), &x);
            defect[i] = (1.0 - x[i]) * pressure - p.delta[i] * x[i];
            worst = worst.max(linalg::abs(defect[i]));
        }
        if worst <= tol {
            break;
        }
        if iterations >= ENDEMIC_MAX_ITERATIONS {
            return Err(AnalysisError::NoConvergence {
                residual: worst * p.h,
                iterations,
            });
        }
        for i in 0..n {
            x[i] += h_internal * defect[i];
        }
        iterations += 1;
    }

    if x.iter().any(|&xi| xi <= 0.0) {
        return Err(AnalysisError::EquilibriumNotPositive);
    }

    let step = step_euler(p, &x).expect("dimensions agree by construction");
    let residual = x
        .iter()
        .zip(&step)
        .map(|(a, b)| linalg::abs(a - b))
        .fold(0.0, f64::max);

    Ok(EndemicState {
        x_star: x,
        residual,
        iterations,
        exists: true,
    })
}

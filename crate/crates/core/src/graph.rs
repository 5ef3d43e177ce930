//! Nonnegative weighted digraphs: construction from point clouds and edge
//! lists, irreducibility via strongly connected components, and dominant
//! eigenvalue/eigenvector computation.
//!
//! Convention: `weights(i, j)` is the influence of node `j` on node `i`, so
//! a node's incoming pressure is the dot product of its row with the state.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, Mat};

#[derive(Clone, Debug, PartialEq)]
pub enum GraphError {
    /// A coordinate was NaN or infinite.
    NonFiniteCoordinate { node: usize },
    /// Points must all live in the same dimension.
    MixedDimensions,
    /// The radius of a proximity graph must be positive.
    NonPositiveRadius,
    /// A weight was negative or non-finite.
    InvalidWeight { row: usize, col: usize },
    /// An index referred to a node outside `0..n`.
    IndexOutOfRange { index: usize, n: usize },
    /// The same edge was listed twice with different weights.
    ConflictingDuplicateEdge { from: usize, to: usize },
    /// The weight matrix must be square with n >= 1.
    NotSquare,
    /// Label count must match the node count.
    LabelCountMismatch,
    /// Positions are empty.
    Empty,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::NonFiniteCoordinate { node } => {
                write!(f, "node {node} has a non-finite coordinate")
            }
            GraphError::MixedDimensions => write!(f, "points have mixed dimensions"),
            GraphError::NonPositiveRadius => write!(f, "radius must be positive"),
            GraphError::InvalidWeight { row, col } => {
                write!(f, "weight ({row}, {col}) is negative or non-finite")
            }
            GraphError::IndexOutOfRange { index, n } => {
                write!(f, "node index {index} out of range for {n} nodes")
            }
            GraphError::ConflictingDuplicateEdge { from, to } => {
                write!(f, "edge ({from}, {to}) listed twice with different weights")
            }
            GraphError::NotSquare => write!(f, "weight matrix must be square with n >= 1"),
            GraphError::LabelCountMismatch => write!(f, "label count must equal node count"),
            GraphError::Empty => write!(f, "at least one node is required"),
        }
    }
}

impl core::error::Error for GraphError {}

/// Points in d-dimensional Euclidean space, one per node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodePositions {
    coords: Vec<Vec<f64>>,
}

impl NodePositions {
    pub fn new(coords: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        let dim = coords.first().ok_or(GraphError::Empty)?.len();
        if dim == 0 {
            return Err(GraphError::Empty);
        }
        for (node, p) in coords.iter().enumerate() {
            if p.len() != dim {
                return Err(GraphError::MixedDimensions);
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(GraphError::NonFiniteCoordinate { node });
            }
        }
        Ok(NodePositions { coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.coords[0].len()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        linalg::sqrt(self.squared_distance(i, j))
    }

    pub fn squared_distance(&self, i: usize, j: usize) -> f64 {
        self.coords[i]
            .iter()
            .zip(&self.coords[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Nonnegative weighted digraph with optional node labels.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDigraph {
    weights: Mat,
    labels: Option<Vec<String>>,
}

impl WeightedDigraph {
    pub fn from_weights(weights: Mat) -> Result<Self, GraphError> {
        if !weights.is_square() || weights.rows() == 0 {
            return Err(GraphError::NotSquare);
        }
        for i in 0..weights.rows() {
            for j in 0..weights.cols() {
                let w = weights[(i, j)];
                if !(w.is_finite() && w >= 0.0) {
                    return Err(GraphError::InvalidWeight { row: i, col: j });
                }
            }
        }
        Ok(WeightedDigraph {
            weights,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, GraphError> {
        if labels.len() != self.n() {
            return Err(GraphError::LabelCountMismatch);
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    pub fn weights(&self) -> &Mat {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[(i, j)]
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[i].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }
}

/// Proximity graph with Gaussian decay: off-diagonal entry (i, j) is
/// `exp(-dist(i, j)^2)` when the pair is closer than `radius`, zero
/// otherwise. The diagonal is zero and the output is symmetric. Coincident
/// points get weight 1.
pub fn build_geometric(
    positions: &NodePositions,
    radius: f64,
) -> Result<WeightedDigraph, GraphError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GraphError::NonPositiveRadius);
    }
    let n = positions.len();
    let r_sq = radius * radius;
    let mut w = Mat::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d_sq = positions.squared_distance(i, j);
            if d_sq < r_sq {
                let weight = libm::exp(-d_sq);
                w[(i, j)] = weight;
                w[(j, i)] = weight;
            }
        }
    }
    WeightedDigraph::from_weights(w)
}

/// Binary proximity graph: entry (i, j) is 1 when the pair is closer than
/// `radius`, and the diagonal is 1 exactly when `self_loops` is set.
pub fn build_binary_radius(
    positions: &NodePositions,
    radius: f64,
    self_loops: bool,
) -> Result<WeightedDigraph, GraphError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(GraphError::NonPositiveRadius);
    }
    let n = positions.len();
    let r_sq = radius * radius;
    let mut w = Mat::zeros(n, n);
    for i in 0..n {
        if self_loops {
            w[(i, i)] = 1.0;
        }
        for j in (i + 1)..n {
            if positions.squared_distance(i, j) < r_sq {
                w[(i, j)] = 1.0;
                w[(j, i)] = 1.0;
            }
        }
    }
    WeightedDigraph::from_weights(w)
}

/// Returns a copy of the graph in which column `source` is all ones except
/// for the rows named in `overrides`, modelling a node that broadcasts to
/// every other node. Later overrides win on repeated indices.
pub fn attach_broadcast_column(
    g: &WeightedDigraph,
    source: usize,
    overrides: &[(usize, f64)],
) -> Result<WeightedDigraph, GraphError> {
    let n = g.n();
    if source >= n {
        return Err(GraphError::IndexOutOfRange { index: source, n });
    }
    let mut w = g.weights().clone();
    for i in 0..n {
        w[(i, source)] = 1.0;
    }
    for &(row, weight) in overrides {
        if row >= n {
            return Err(GraphError::IndexOutOfRange { index: row, n });
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(GraphError::InvalidWeight {
                row,
                col: source,
            });
        }
        w[(row, source)] = weight;
    }
    WeightedDigraph::from_weights(w)
}

/// Builds a graph from explicit `(from, to, weight)` entries, mirroring them
/// when `symmetric` is set and placing a unit diagonal when `self_loops` is
/// set. Exact duplicate entries are idempotent; duplicates that disagree on
/// the weight are an error so that bad ingestion fails loudly.
pub fn build_from_edge_list(
    edges: &[(usize, usize, f64)],
    n: usize,
    symmetric: bool,
    self_loops: bool,
) -> Result<WeightedDigraph, GraphError> {
    if n == 0 {
        return Err(GraphError::Empty);
    }
    let mut w = Mat::zeros(n, n);
    let mut set = vec![false; n * n];
    if self_loops {
        for i in 0..n {
            w[(i, i)] = 1.0;
            set[i * n + i] = true;
        }
    }
    let place = |w: &mut Mat, set: &mut Vec<bool>, i: usize, j: usize, weight: f64| {
        if set[i * n + j] && w[(i, j)] != weight {
            return Err(GraphError::ConflictingDuplicateEdge { from: i, to: j });
        }
        w[(i, j)] = weight;
        set[i * n + j] = true;
        Ok(())
    };
    for &(i, j, weight) in edges {
        if i >= n {
            return Err(GraphError::IndexOutOfRange { index: i, n });
        }
        if j >= n {
            return Err(GraphError::IndexOutOfRange { index: j, n });
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(GraphError::InvalidWeight { row: i, col: j });
        }
        place(&mut w, &mut set, i, j, weight)?;
        if symmetric && i != j {
            place(&mut w, &mut set, j, i, weight)?;
        }
    }
    WeightedDigraph::from_weights(w)
}

/// True when the digraph of strictly positive weights is strongly connected
/// (for n = 1 this holds by convention).
pub fn is_irreducible(g: &WeightedDigraph) -> bool {
    g.n() == 1 || strongly_connected_components(g.weights()).len() == 1
}

/// Tarjan's algorithm on the positive support of `w`. Components are
/// returned in reverse topological order.
pub(crate) fn strongly_connected_components(w: &Mat) -> Vec<Vec<usize>> {
    let n = w.rows();
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| w[(i, j)] > 0.0).collect())
        .collect();

    struct State {
        index: usize,
        stack: Vec<usize>,
        on_stack: Vec<bool>,
        idx: Vec<Option<usize>>,
        low: Vec<usize>,
        components: Vec<Vec<usize>>,
    }

    fn connect(v: usize, adjacency: &[Vec<usize>], st: &mut State) {
        st.idx[v] = Some(st.index);
        st.low[v] = st.index;
        st.index += 1;
        st.stack.push(v);
        st.on_stack[v] = true;

        for &w in &adjacency[v] {
            if st.idx[w].is_none() {
                connect(w, adjacency, st);
                st.low[v] = st.low[v].min(st.low[w]);
            } else if st.on_stack[w] {
                st.low[v] = st.low[v].min(st.idx[w].unwrap());
            }
        }

        if st.low[v] == st.idx[v].unwrap() {
            let mut component = Vec::new();
            loop {
                let w = st.stack.pop().expect("stack underflow");
                st.on_stack[w] = false;
                component.push(w);
                if w == v {
                    break;
                }
            }
            st.components.push(component);
        }
    }

    let mut st = State {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        components: Vec::new(),
    };
    for v in 0..n {
        if st.idx[v].is_none() {
            connect(v, &adjacency, &mut st);
        }
    }
    st.components
}

/// Dominant-eigenvalue summary of a square matrix.
///
/// For nonnegative matrices the value is the Perron root and the vectors are
/// the left/right dominant eigenvectors, entrywise nonnegative and
/// normalized to unit 1-norm. For matrices with negative entries the value
/// is the largest real part over all eigenvalues; on the general
/// (nonsymmetric) fallback path no eigenvectors are computed and the vector
/// fields are empty.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectralSummary {
    pub spectral_abscissa: f64,
    pub dominant_right_vector: Vec<f64>,
    pub dominant_left_vector: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const POWER_ITERATION_CAP: usize = 10_000;
const POWER_ITERATION_TOL: f64 = 1e-12;

/// Largest real part among the eigenvalues of `m`, with dominant
/// eigenvectors where they are meaningful.
///
/// Nonnegative matrices go through shifted power iteration (shift
/// `max|diag| + 1` guarantees a dominant real eigenvalue); symmetric
/// matrices with negative entries go through the Jacobi eigensolver; other
/// matrices fall back to Hessenberg-QR. Power iteration that fails to
/// converge within the cap is flagged but still reports its best estimate.
pub fn spectral_abscissa(m: &Mat) -> SpectralSummary {
    assert!(m.is_square(), "spectral_abscissa requires a square matrix");
    if m.is_nonnegative() {
        return power_iteration_summary(m);
    }
    if m.is_symmetric(1e-12 * m.frobenius_norm().max(1.0)) {
        let n = m.rows();
        let (values, vectors) = linalg::symmetric_eigen(m);
        let top = n - 1;
        let mut v: Vec<f64> = (0..n).map(|i| vectors[(i, top)]).collect();
        // Fix the overall sign, then scale to unit 1-norm.
        let flip = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
        let norm = linalg::norm1(&v).max(f64::MIN_POSITIVE);
        for x in &mut v {
            *x *= flip / norm;
        }
        return SpectralSummary {
            spectral_abscissa: values[top],
            dominant_right_vector: v.clone(),
            dominant_left_vector: v,
            iterations: 0,
            converged: true,
        };
    }
    let max_re = linalg::general_eigenvalues(m)
        .into_iter()
        .map(|(re, _)| re)
        .fold(f64::NEG_INFINITY, f64::max);
    SpectralSummary {
        spectral_abscissa: max_re,
        dominant_right_vector: Vec::new(),
        dominant_left_vector: Vec::new(),
        iterations: 0,
        converged: true,
    }
}

fn power_iteration_summary(m: &Mat) -> SpectralSummary {
    let shift = m.max_abs_diag() + 1.0;
    let (value_r, right, it_r, ok_r) = power_iterate(m, shift, false);
    let (_value_l, left, it_l, ok_l) = power_iterate(m, shift, true);
    SpectralSummary {
        spectral_abscissa: value_r - shift,
        dominant_right_vector: right,
        dominant_left_vector: left,
        iterations: it_r.max(it_l),
        converged: ok_r && ok_l,
    }
}

/// Power iteration on `m + shift I` (or its transpose), returning the
/// dominant eigenvalue of the shifted matrix and the unit-1-norm iterate.
fn power_iterate(m: &Mat, shift: f64, transposed: bool) -> (f64, Vec<f64>, usize, bool) {
    let n = m.rows();
    let mut v = vec![1.0 / n as f64; n];
    let mut value = shift;
    for it in 1..=POWER_ITERATION_CAP {
        let mut w = if transposed {
            m.matvec_transposed(&v)
        } else {
            m.matvec(&v)
        };
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        // All quantities stay nonnegative, so the 1-norm is just the sum.
        value = w.iter().sum();
        if value <= 0.0 {
            return (shift, v, it, true);
        }
        for wi in &mut w {
            *wi /= value;
        }
        let change: f64 = w.iter().zip(&v).map(|(a, b)| linalg::abs(a - b)).sum();
        v = w;
        if change <= POWER_ITERATION_TOL {
            return (value, v, it, true);
        }
    }
    (value, v, POWER_ITERATION_CAP, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn positions(points: &[&[f64]]) -> NodePositions {
        NodePositions::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn geometric_weights_follow_gaussian_decay() {
        let pos = positions(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let g = build_geometric(&pos, 2.0).unwrap();
        let expected = (-1.0f64).exp();
        assert_close(g.weight(0, 1), expected, 1e-15);
        assert_close(g.weight(1, 0), expected, 1e-15);
        assert_eq!(g.weight(0, 0), 0.0);
        assert_eq!(g.weight(1, 1), 0.0);
    }

    #[test]
    fn geometric_cuts_pairs_outside_radius() {
        let pos = positions(&[&[0.0, 0.0], &[3.0, 0.0]]);
        let g = build_geometric(&pos, 2.0).unwrap();
        assert_eq!(g.weight(0, 1), 0.0);
        assert_eq!(g.weight(1, 0), 0.0);
    }

    #[test]
    fn geometric_allows_coincident_points() {
        let pos = positions(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let g = build_geometric(&pos, 0.5).unwrap();
        assert_eq!(g.weight(0, 1), 1.0);
    }

    #[test]
    fn geometric_rejects_non_finite_coordinates() {
        let err = NodePositions::new(vec![vec![0.0, f64::NAN]]).unwrap_err();
        assert_eq!(err, GraphError::NonFiniteCoordinate { node: 0 });
    }

    #[test]
    fn binary_radius_collinear_band() {
        let pos = positions(&[&[0.0], &[1.0], &[2.0]]);
        let g = build_binary_radius(&pos, 1.5, true).unwrap();
        let expected = [[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.weight(i, j), expected[i][j], "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn binary_radius_degenerate_cases() {
        let pos = positions(&[&[0.0], &[10.0], &[20.0]]);
        let isolated = build_binary_radius(&pos, 1.0, true).unwrap();
        assert_eq!(isolated.weights(), &Mat::identity(3));

        let complete = build_binary_radius(&pos, 100.0, true).unwrap();
        assert_eq!(complete.weights(), &Mat::from_fn(3, 3, |_, _| 1.0));
    }

    #[test]
    fn broadcast_column_on_identity() {
        let id = WeightedDigraph::from_weights(Mat::identity(3)).unwrap();
        let g = attach_broadcast_column(&id, 2, &[]).unwrap();
        let expected = [[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.weight(i, j), expected[i][j]);
            }
        }
    }

    #[test]
    fn broadcast_column_with_override() {
        let id = WeightedDigraph::from_weights(Mat::identity(3)).unwrap();
        let g = attach_broadcast_column(&id, 2, &[(1, 0.1)]).unwrap();
        assert_eq!(g.weight(0, 2), 1.0);
        assert_eq!(g.weight(1, 2), 0.1);
        assert_eq!(g.weight(2, 2), 1.0);
    }

    #[test]
    fn broadcast_column_preserves_other_columns() {
        let pos = positions(&[&[0.0], &[1.0], &[2.0]]);
        let base = build_binary_radius(&pos, 1.5, true).unwrap();
        let g = attach_broadcast_column(&base, 2, &[]).unwrap();
        for i in 0..3 {
            assert_eq!(g.weight(i, 2), 1.0);
            for j in 0..2 {
                assert_eq!(g.weight(i, j), base.weight(i, j));
            }
        }
    }

    #[test]
    fn broadcast_rejects_bad_source() {
        let id = WeightedDigraph::from_weights(Mat::identity(2)).unwrap();
        assert!(attach_broadcast_column(&id, 5, &[]).is_err());
    }

    #[test]
    fn edge_list_small_cases() {
        let g = build_from_edge_list(&[(0, 1, 1.0)], 2, true, true).unwrap();
        assert_eq!(g.weights(), &Mat::from_fn(2, 2, |_, _| 1.0));

        let empty = build_from_edge_list(&[], 3, true, true).unwrap();
        assert_eq!(empty.weights(), &Mat::identity(3));

        let path = build_from_edge_list(&[(0, 1, 1.0), (1, 2, 1.0)], 3, true, true).unwrap();
        let expected = [[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(path.weight(i, j), expected[i][j]);
            }
        }
    }

    #[test]
    fn edge_list_duplicate_policy() {
        // Identical duplicates are fine.
        assert!(build_from_edge_list(&[(0, 1, 2.0), (0, 1, 2.0)], 2, false, false).is_ok());
        // Conflicting duplicates fail loudly.
        let err = build_from_edge_list(&[(0, 1, 2.0), (0, 1, 3.0)], 2, false, false).unwrap_err();
        assert_eq!(err, GraphError::ConflictingDuplicateEdge { from: 0, to: 1 });
        // A mirrored edge that disagrees with an explicit reverse entry also fails.
        let err = build_from_edge_list(&[(0, 1, 2.0), (1, 0, 3.0)], 2, true, false).unwrap_err();
        assert_eq!(err, GraphError::ConflictingDuplicateEdge { from: 1, to: 0 });
    }

    #[test]
    fn edge_list_rejects_out_of_range() {
        assert!(build_from_edge_list(&[(0, 7, 1.0)], 3, false, false).is_err());
    }

    #[test]
    fn irreducibility_of_cycles_and_triangular_blocks() {
        let cycle =
            build_from_edge_list(&[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], 3, false, false)
                .unwrap();
        assert!(is_irreducible(&cycle));

        // Block upper-triangular: edge 0 -> 1 only.
        let tri = build_from_edge_list(&[(0, 1, 1.0)], 2, false, false).unwrap();
        assert!(!is_irreducible(&tri));

        let single = WeightedDigraph::from_weights(Mat::zeros(1, 1)).unwrap();
        assert!(is_irreducible(&single));
    }

    #[test]
    fn broadcast_star_is_reducible() {
        // Identity plus one broadcast column: the receivers never reach the
        // source, so the graph cannot be strongly connected.
        let id = WeightedDigraph::from_weights(Mat::identity(4)).unwrap();
        let star = attach_broadcast_column(&id, 3, &[]).unwrap();
        assert!(!is_irreducible(&star));
    }

    #[test]
    fn spectral_abscissa_identity() {
        let s = spectral_abscissa(&Mat::identity(4));
        assert_close(s.spectral_abscissa, 1.0, 1e-12);
        assert!(s.converged);
        for &v in &s.dominant_right_vector {
            assert_close(v, 0.25, 1e-12);
        }
    }

    #[test]
    fn spectral_abscissa_permutation() {
        let swap = Mat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let s = spectral_abscissa(&swap);
        assert_close(s.spectral_abscissa, 1.0, 1e-10);
    }

    #[test]
    fn perron_vectors_satisfy_eigen_equations() {
        let mut rng = crate::rng::SplitMix64::new(3);
        let m = Mat::from_fn(5, 5, |_, _| rng.next_f64() + 0.05);
        let s = spectral_abscissa(&m);
        assert!(s.converged);
        let mv = m.matvec(&s.dominant_right_vector);
        let um = m.matvec_transposed(&s.dominant_left_vector);
        for i in 0..5 {
            assert_close(mv[i], s.spectral_abscissa * s.dominant_right_vector[i], 1e-8);
            assert_close(um[i], s.spectral_abscissa * s.dominant_left_vector[i], 1e-8);
            assert!(s.dominant_right_vector[i] > 0.0);
            assert!(s.dominant_left_vector[i] > 0.0);
        }
    }

    #[test]
    fn spectral_abscissa_general_fallback() {
        // [[0,-1],[1,0]] has spectrum {i, -i}: abscissa 0.
        let a = Mat::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let s = spectral_abscissa(&a);
        assert_close(s.spectral_abscissa, 0.0, 1e-12);
        assert!(s.dominant_right_vector.is_empty());
    }

    #[test]
    fn spectral_abscissa_symmetric_negative_entries() {
        // [[0,-2],[-2,3]]: eigenvalues 4 and -1.
        let a = Mat::from_rows(&[vec![0.0, -2.0], vec![-2.0, 3.0]]).unwrap();
        let s = spectral_abscissa(&a);
        assert_close(s.spectral_abscissa, 4.0, 1e-12);
    }
}

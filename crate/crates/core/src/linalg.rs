//! Dense linear algebra sized for this crate's problem instances (n up to a
//! few thousand nodes): a row-major matrix type, a cyclic Jacobi eigensolver
//! for symmetric matrices, a Hessenberg-QR eigenvalue routine for general
//! matrices, and a two-column least-squares solver with rank diagnostics.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Mat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from row slices. Returns `None` when the input is
    /// empty or ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let nrows = rows.len();
        let ncols = rows.first()?.len();
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return None;
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Some(Mat {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Computes `self^T * x` without forming the transpose.
    pub fn matvec_transposed(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec dimension mismatch");
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let xi = x[i];
            for (yj, &a) in y.iter_mut().zip(row) {
                *yj += a * xi;
            }
        }
        y
    }

    pub fn matmul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = Mat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|&v| v >= 0.0)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if abs(self[(i, j)] - self[(j, i)]) > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn max_abs_diag(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| abs(self[(i, i)]))
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    pub fn offdiag_row_sum(&self, i: usize) -> f64 {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .sum()
    }
}

impl Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| abs(*x)).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().map(|x| abs(*x)).fold(0.0, f64::max)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Eigenvalues and eigenvectors of a symmetric matrix via cyclic Jacobi
/// rotations. Returns eigenvalues in ascending order with the matching
/// eigenvectors as columns. The input is symmetrized before iterating, so
/// tiny asymmetries from rounding are tolerated.
pub fn symmetric_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    assert!(a.is_square(), "symmetric_eigen requires a square matrix");
    let n = a.rows();
    let mut w = Mat::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let mut v = Mat::identity(n);
    let scale = w.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += w[(p, q)] * w[(p, q)];
            }
        }
        if sqrt(2.0 * off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                let app = w[(p, p)];
                let aqq = w[(q, q)];
                w[(p, p)] = app - t * apq;
                w[(q, q)] = aqq + t * apq;
                w[(p, q)] = 0.0;
                w[(q, p)] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = w[(k, p)];
                        let akq = w[(k, q)];
                        w[(k, p)] = c * akp - s * akq;
                        w[(p, k)] = w[(k, p)];
                        w[(k, q)] = s * akp + c * akq;
                        w[(q, k)] = w[(k, q)];
                    }
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&i, &j| w[(i, i)].partial_cmp(&w[(j, j)]).expect("NaN eigenvalue"));
    let values: Vec<f64> = order.iter().map(|&i| w[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |i, j| v[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(a: &Mat) -> Vec<f64> {
    symmetric_eigen(a).0
}

/// Eigenvalues of a general real square matrix as `(re, im)` pairs, computed
/// by Householder reduction to Hessenberg form followed by the implicit
/// double-shift QR iteration (the classic EISPACK orthes/hqr pair).
pub fn general_eigenvalues(a: &Mat) -> Vec<(f64, f64)> {
    assert!(a.is_square(), "general_eigenvalues requires a square matrix");
    let n = a.rows();
    if n == 1 {
        return vec![(a[(0, 0)], 0.0)];
    }
    let mut h = a.clone();
    hessenberg(&mut h);
    hqr(&mut h)
}

/// In-place Householder reduction to upper Hessenberg form.
fn hessenberg(h: &mut Mat) {
    let n = h.rows();
    let low = 0usize;
    let high = n - 1;
    let mut ort = vec![0.0; n];

    let mut m = low + 1;
    while m + 1 <= high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += abs(h[(i, m - 1)]);
        }
        if scale != 0.0 {
            let mut hh = 0.0;
            for i in (m..=high).rev() {
                ort[i] = h[(i, m - 1)] / scale;
                hh += ort[i] * ort[i];
            }
            let mut g = sqrt(hh);
            if ort[m] > 0.0 {
                g = -g;
            }
            hh -= ort[m] * g;
            ort[m] -= g;

            // Similarity transform H <- (I - u u^T / hh) H (I - u u^T / hh).
            for j in m..n {
                let mut f = 0.0;
                for i in (m..=high).rev() {
                    f += ort[i] * h[(i, j)];
                }
                f /= hh;
                for i in m..=high {
                    h[(i, j)] -= f * ort[i];
                }
            }
            for i in 0..=high {
                let mut f = 0.0;
                for j in (m..=high).rev() {
                    f += ort[j] * h[(i, j)];
                }
                f /= hh;
                for j in m..=high {
                    h[(i, j)] -= f * ort[j];
                }
            }
            h[(m, m - 1)] = scale * g;
        }
        m += 1;
    }
}

/// Double-shift QR eigenvalue iteration on an upper Hessenberg matrix.
/// Eigenvalues only; the Schur vectors are not accumulated.
fn hqr(hm: &mut Mat) -> Vec<(f64, f64)> {
    let nn = hm.rows() as isize;
    let mut d = vec![0.0; nn as usize];
    let mut e = vec![0.0; nn as usize];
    let low: isize = 0;
    let eps = f64::EPSILON;
    let mut exshift = 0.0;
    let mut p: f64;
    let mut q: f64;
    let mut r: f64;
    let mut s: f64;
    let mut z: f64;
    let mut w: f64;
    let mut x: f64;
    let mut y: f64;

    let at = |hm: &Mat, i: isize, j: isize| hm[(i as usize, j as usize)];
    macro_rules! hset {
        ($i:expr, $j:expr, $v:expr) => {
            hm[($i as usize, $j as usize)] = $v
        };
    }

    let mut norm = 0.0;
    for i in 0..nn {
        for j in (i - 1).max(0)..nn {
            norm += abs(at(hm, i, j));
        }
    }

    let mut n = nn - 1;
    let mut iter = 0i32;
    let mut total_iter = 0i32;
    while n >= low {
        // Safety valve; real inputs converge long before this.
        if total_iter > 100 * nn as i32 {
            d[n as usize] = at(hm, n, n);
            e[n as usize] = 0.0;
            n -= 1;
            continue;
        }

        // Look for a single small sub-diagonal element.
        let mut l = n;
        while l > low {
            s = abs(at(hm, l - 1, l - 1)) + abs(at(hm, l, l));
            if s == 0.0 {
                s = norm;
            }
            if abs(at(hm, l, l - 1)) < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // One root found.
            hset!(n, n, at(hm, n, n) + exshift);
            d[n as usize] = at(hm, n, n);
            e[n as usize] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // Two roots found.
            w = at(hm, n, n - 1) * at(hm, n - 1, n);
            p = (at(hm, n - 1, n - 1) - at(hm, n, n)) / 2.0;
            q = p * p + w;
            z = sqrt(abs(q));
            hset!(n, n, at(hm, n, n) + exshift);
            hset!(n - 1, n - 1, at(hm, n - 1, n - 1) + exshift);
            x = at(hm, n, n);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[(n - 1) as usize] = x + z;
                d[n as usize] = d[(n - 1) as usize];
                if z != 0.0 {
                    d[n as usize] = x - w / z;
                }
                e[(n - 1) as usize] = 0.0;
                e[n as usize] = 0.0;
            } else {
                d[(n - 1) as usize] = x + p;
                d[n as usize] = x + p;
                e[(n - 1) as usize] = z;
                e[n as usize] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            // Form shift.
            x = at(hm, n, n);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = at(hm, n - 1, n - 1);
                w = at(hm, n, n - 1) * at(hm, n - 1, n);
            }

            if iter == 10 {
                exshift += x;
                for i in low..=n {
                    hset!(i, i, at(hm, i, i) - x);
                }
                s = abs(at(hm, n, n - 1)) + abs(at(hm, n - 1, n - 2));
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }

            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = sqrt(s);
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in low..=n {
                        hset!(i, i, at(hm, i, i) - s);
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }

            iter += 1;
            total_iter += 1;

            // Look for two consecutive small sub-diagonal elements.
            let mut m = n - 2;
            loop {
                z = at(hm, m, m);
                r = x - z;
                s = y - z;
                p = (r * s - w) / at(hm, m + 1, m) + at(hm, m, m + 1);
                q = at(hm, m + 1, m + 1) - z - r - s;
                r = at(hm, m + 2, m + 1);
                s = abs(p) + abs(q) + abs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                if abs(at(hm, m, m - 1)) * (abs(q) + abs(r))
                    < eps
                        * (abs(p) * (abs(at(hm, m - 1, m - 1)) + abs(z) + abs(at(hm, m + 1, m + 1))))
                {
                    break;
                }
                m -= 1;
            }

            let mut i = m + 2;
            while i <= n {
                hset!(i, i - 2, 0.0);
                if i > m + 2 {
                    hset!(i, i - 3, 0.0);
                }
                i += 1;
            }

            // Double QR step on rows l..=n, columns m..=n; the bulge vector
            // (p, q, r) from the search above seeds the k == m iteration.
            let mut k = m;
            while k <= n - 1 {
                let notlast = k != n - 1;
                let mut skip = false;
                if k != m {
                    p = at(hm, k, k - 1);
                    q = at(hm, k + 1, k - 1);
                    r = if notlast { at(hm, k + 2, k - 1) } else { 0.0 };
                    x = abs(p) + abs(q) + abs(r);
                    if x == 0.0 {
                        skip = true;
                    } else {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                if !skip {
                    s = sqrt(p * p + q * q + r * r);
                    if p < 0.0 {
                        s = -s;
                    }
                    if s != 0.0 {
                        if k != m {
                            hset!(k, k - 1, -s * x);
                        } else if l != m {
                            hset!(k, k - 1, -at(hm, k, k - 1));
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;

                        for j in k..nn {
                            p = at(hm, k, j) + q * at(hm, k + 1, j);
                            if notlast {
                                p += r * at(hm, k + 2, j);
                                hset!(k + 2, j, at(hm, k + 2, j) - p * z);
                            }
                            hset!(k, j, at(hm, k, j) - p * x);
                            hset!(k + 1, j, at(hm, k + 1, j) - p * y);
                        }

                        for i in 0..=n.min(k + 3) {
                            p = x * at(hm, i, k) + y * at(hm, i, k + 1);
                            if notlast {
                                p += z * at(hm, i, k + 2);
                                hset!(i, k + 2, at(hm, i, k + 2) - p * r);
                            }
                            hset!(i, k, at(hm, i, k) - p);
                            hset!(i, k + 1, at(hm, i, k + 1) - p * q);
                        }
                    }
                }
                k += 1;
            }
        }
    }

    d.into_iter().zip(e).collect()
}

/// Result of a two-column least-squares solve.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoColLstsq {
    pub coeffs: [f64; 2],
    /// Singular values in descending order.
    pub singular_values: [f64; 2],
    pub rank: usize,
    pub residual_norm: f64,
}

/// Least-squares solution of an overdetermined system with exactly two
/// columns, via an explicit singular value decomposition (a single Jacobi
/// rotation orthogonalizes two columns). Directions with singular value at
/// or below `rel_tol` times the largest are treated as null space, so
/// rank-deficient systems get the minimum-norm solution plus an honest rank
/// report.
pub fn lstsq_two_col(col0: &[f64], col1: &[f64], rhs: &[f64], rel_tol: f64) -> TwoColLstsq {
    let m = rhs.len();
    assert!(m > 0, "least squares needs at least one row");
    assert_eq!(col0.len(), m);
    assert_eq!(col1.len(), m);

    // Rotation angle that orthogonalizes the two columns.
    let gram_00 = dot(col0, col0);
    let gram_11 = dot(col1, col1);
    let gram_01 = dot(col0, col1);
    let theta = 0.5 * libm::atan2(2.0 * gram_01, gram_00 - gram_11);
    let (sin_t, cos_t) = (libm::sin(theta), libm::cos(theta));

    // Rotated columns u_i = Phi * R[:, i]; their norms are the singular values.
    let u0: Vec<f64> = col0
        .iter()
        .zip(col1)
        .map(|(&a, &b)| a * cos_t + b * sin_t)
        .collect();
    let u1: Vec<f64> = col0
        .iter()
        .zip(col1)
        .map(|(&a, &b)| -a * sin_t + b * cos_t)
        .collect();
    let s0 = norm2(&u0);
    let s1 = norm2(&u1);
    // Right singular vectors are the columns of the rotation.
    let v0 = [cos_t, sin_t];
    let v1 = [-sin_t, cos_t];

    let s_max = s0.max(s1);
    let cutoff = rel_tol * s_max;
    let mut coeffs = [0.0, 0.0];
    let mut rank = 0;
    for (u, sv, v) in [(&u0, s0, v0), (&u1, s1, v1)] {
        if sv > cutoff && sv > 0.0 {
            rank += 1;
            let proj = dot(u, rhs) / (sv * sv);
            coeffs[0] += v[0] * proj;
            coeffs[1] += v[1] * proj;
        }
    }

    let residual_norm = sqrt(
        (0..m)
            .map(|i| {
                let r = col0[i] * coeffs[0] + col1[i] * coeffs[1] - rhs[i];
                r * r
            })
            .sum(),
    );

    let singular_values = if s0 >= s1 { [s0, s1] } else { [s1, s0] };
    TwoColLstsq {
        coeffs,
        singular_values,
        rank,
        residual_norm,
    }
}

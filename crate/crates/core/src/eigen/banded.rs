//! Real symmetric band matrices: storage, reduction to tridiagonal form by
//! Givens bulge chasing, and eigenvectors by shifted inverse iteration.

use crate::eigen::tridiagonal::{eig_tridiagonal, SturmSequence};
use crate::eigen::{EigenResult, Eigenpair};
use crate::error::{Error, Result};

/// Symmetric matrix with `a[i][j] = 0` for `|i − j| > bandwidth`.
/// Only the lower band is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    dim: usize,
    bandwidth: usize,
    /// Row `i`, distance `d = i − j` at `data[i * (bandwidth + 1) + d]`.
    data: Vec<f64>,
}

impl SymBandMatrix {
    pub fn zeros(dim: usize, bandwidth: usize) -> Self {
        Self {
            dim,
            bandwidth,
            data: vec![0.0; dim * (bandwidth + 1)],
        }
    }

    /// Builds a band matrix from a dense symmetric one, taking the lower triangle.
    pub fn from_dense(rows: &[Vec<f64>], bandwidth: usize) -> Self {
        let dim = rows.len();
        let mut m = Self::zeros(dim, bandwidth);
        for i in 0..dim {
            for j in i.saturating_sub(bandwidth)..=i {
                m.set(i, j, rows[i][j]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        if d > self.bandwidth {
            0.0
        } else {
            self.data[i * (self.bandwidth + 1) + d]
        }
    }

    /// Sets `a[i][j]` and `a[j][i]`. Panics outside the band.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let d = i - j;
        assert!(d <= self.bandwidth, "({i}, {j}) lies outside bandwidth {}", self.bandwidth);
        self.data[i * (self.bandwidth + 1) + d] = value;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let w = self.bandwidth;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = i * (w + 1);
            y[i] += self.data[row] * x[i];
            for d in 1..=w.min(i) {
                let a = self.data[row + d];
                if a != 0.0 {
                    y[i] += a * x[i - d];
                    y[i - d] += a * x[i];
                }
            }
        }
        y
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let lo = i.saturating_sub(self.bandwidth);
                let hi = (i + self.bandwidth).min(self.dim - 1);
                (lo..=hi).map(|j| self.get(i, j).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn check_finite(&self) -> Result<()> {
        match self.data.iter().position(|x| !x.is_finite()) {
            Some(p) => Err(Error::NonFinite(p)),
            None => Ok(()),
        }
    }

    /// Applies the plane rotation `G` on rows/columns `(p, p+1)` as `G A Gᵀ`,
    /// with `row_p ← c row_p + s row_{p+1}` and `row_{p+1} ← −s row_p + c row_{p+1}`.
    fn rotate(&mut self, p: usize, c: f64, s: f64) {
        let q = p + 1;
        let lo = p.saturating_sub(self.bandwidth);
        let hi = (q + self.bandwidth).min(self.dim - 1);
        for j in lo..=hi {
            if j == p || j == q {
                continue;
            }
            let x = self.get(p, j);
            let y = self.get(q, j);
            if x == 0.0 && y == 0.0 {
                continue;
            }
            self.set(p, j, c * x + s * y);
            self.set(q, j, c * y - s * x);
        }
        let app = self.get(p, p);
        let aqq = self.get(q, q);
        let apq = self.get(p, q);
        let cs = c * s;
        self.set(p, p, c * c * app + 2.0 * cs * apq + s * s * aqq);
        self.set(q, q, s * s * app - 2.0 * cs * apq + c * c * aqq);
        self.set(p, q, cs * (aqq - app) + (c * c - s * s) * apq);
    }
}

/// Orthogonal similarity reduction to tridiagonal form, one sub-diagonal at a
/// time, chasing each bulge off the end of the band.
pub(crate) fn band_to_tridiagonal(a: &SymBandMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = a.dim;
    let b = a.bandwidth;
    // One extra diagonal of room for the bulge.
    let mut w = SymBandMatrix::zeros(n, b + 1);
    for i in 0..n {
        for j in i.saturating_sub(b)..=i {
            w.set(i, j, a.get(i, j));
        }
    }
    for k in (2..=b).rev() {
        for i in 0..n.saturating_sub(k) {
            let (mut row, mut col) = (i + k, i);
            loop {
                let y = w.get(row, col);
                if y == 0.0 {
                    break;
                }
                let x = w.get(row - 1, col);
                let r = x.hypot(y);
                w.rotate(row - 1, x / r, y / r);
                w.set(row, col, 0.0);
                w.set(row - 1, col, r);
                // The rotation left a bulge at (row + k, row − 1).
                if row + k >= n {
                    break;
                }
                col = row - 1;
                row += k;
            }
        }
    }
    let diag = (0..n).map(|i| w.get(i, i)).collect();
    let offdiag = (0..n.saturating_sub(1)).map(|i| w.get(i + 1, i)).collect();
    (diag, offdiag)
}

/// LU factorisation of `A − μI` with partial pivoting, kept in band form:
/// `U` has up to `2b` super-diagonals, `L` is a sequence of elementary
/// eliminations over `b` rows interleaved with row interchanges.
struct ShiftedBandLu {
    n: usize,
    b: usize,
    /// Row `k` of U over columns `k..=k+2b`.
    upper: Vec<f64>,
    pivots: Vec<usize>,
    /// Multipliers of step `k` for rows `k+1..=k+b`.
    multipliers: Vec<f64>,
}

impl ShiftedBandLu {
    fn factor(a: &SymBandMatrix, shift: f64, pivot_floor: f64) -> Self {
        let n = a.dim;
        let b = a.bandwidth;
        let width = 2 * b + 1;
        let mut upper = vec![0.0; n * width];
        let mut pivots = vec![0; n];
        let mut multipliers = vec![0.0; n * b.max(1)];

        // Active rows k..=k+b, each over columns k..=k+2b.
        let load = |r: usize, base: usize| -> Vec<f64> {
            let mut row = vec![0.0; width];
            let lo = r.saturating_sub(b).max(base);
            let hi = (r + b).min(n - 1);
            for j in lo..=hi {
                let mut v = a.get(r, j);
                if j == r {
                    v -= shift;
                }
                row[j - base] = v;
            }
            row
        };
        let mut active: std::collections::VecDeque<(usize, Vec<f64>)> =
            (0..=b.min(n - 1)).map(|r| (r, load(r, 0))).collect();

        for k in 0..n {
            let mut p = 0;
            let mut best = active[0].1[0].abs();
            for (idx, (_, row)) in active.iter().enumerate().skip(1) {
                if row[0].abs() > best {
                    best = row[0].abs();
                    p = idx;
                }
            }
            active.swap(0, p);
            pivots[k] = k + p;
            let mut pivot_row = active.pop_front().unwrap().1;
            if pivot_row[0].abs() < pivot_floor {
                pivot_row[0] = if pivot_row[0] < 0.0 { -pivot_floor } else { pivot_floor };
            }
            let pivot = pivot_row[0];
            for (r, (_, row)) in active.iter_mut().enumerate() {
                let m = row[0] / pivot;
                multipliers[k * b + r] = m;
                if m != 0.0 {
                    for j in 1..width {
                        row[j] -= m * pivot_row[j];
                    }
                }
                row[0] = 0.0;
            }
            upper[k * width..(k + 1) * width].copy_from_slice(&pivot_row);
            // Re-base the remaining rows on column k + 1.
            for (_, row) in active.iter_mut() {
                row.rotate_left(1);
                row[width - 1] = 0.0;
            }
            let next = k + b + 1;
            if next < n {
                active.push_back((next, load(next, k + 1)));
            }
        }

        Self {
            n,
            b,
            upper,
            pivots,
            multipliers,
        }
    }

    fn solve(&self, x: &mut [f64]) {
        let (n, b) = (self.n, self.b);
        let width = 2 * b + 1;
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            for r in 0..b {
                if k + 1 + r < n {
                    x[k + 1 + r] -= self.multipliers[k * b + r] * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let row = &self.upper[k * width..(k + 1) * width];
            let mut sum = x[k];
            for j in 1..width {
                if k + j < n {
                    sum -= row[j] * x[k + j];
                }
            }
            x[k] = sum / row[0];
        }
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    norm
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Deterministic start vector with every component non-zero.
fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    let mut state = 0x9E37_79B9_7F4A_7C15_u64 ^ (seed as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            0.5 + (state >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect();
    normalize(&mut v);
    v
}

const INVERSE_ITERATIONS: usize = 8;

/// Inverse iteration for the eigenvector of `a` whose eigenvalue lies nearest
/// `shift`, orthogonalised against `deflate`.
fn inverse_iteration(
    a: &SymBandMatrix,
    shift: f64,
    deflate: &[&[f64]],
    seed: usize,
) -> (f64, Vec<f64>, f64) {
    let norm = a.norm_inf().max(1.0);
    let lu = ShiftedBandLu::factor(a, shift, f64::EPSILON * norm);
    let tol = 1e-13 * norm;
    let mut v = start_vector(a.dim, seed);
    let mut best = (f64::NAN, v.clone(), f64::INFINITY);
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve(&mut v);
        for u in deflate {
            let proj = dot(u, &v);
            for (x, y) in v.iter_mut().zip(u.iter()) {
                *x -= proj * y;
            }
        }
        normalize(&mut v);
        let av = a.matvec(&v);
        let rayleigh = dot(&v, &av);
        let residual = av
            .iter()
            .zip(&v)
            .map(|(y, x)| (y - rayleigh * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual < best.2 {
            best = (rayleigh, v.clone(), residual);
        }
        if residual <= tol {
            break;
        }
    }
    best
}

/// Eigenvalues of a symmetric band matrix, ascending: all of them, or the
/// lowest `count`. Eigenvectors, when requested, come from inverse iteration
/// on the original band matrix.
pub fn eig_banded(matrix: &SymBandMatrix, want_vectors: bool, count: Option<usize>) -> Result<EigenResult> {
    let n = matrix.dim;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    matrix.check_finite()?;
    let count = count.unwrap_or(n);
    if count > n {
        return Err(Error::TooManyEigenpairs { requested: count, dim: n });
    }
    let (diag, offdiag) = band_to_tridiagonal(matrix);
    let values = if count == n {
        eig_tridiagonal(&diag, &offdiag, false)?.values
    } else {
        let sturm = SturmSequence::new(&diag, &offdiag);
        (0..count).map(|i| sturm.eigenvalue(i)).collect()
    };
    if !want_vectors {
        return Ok(EigenResult {
            values,
            vectors: None,
            residual_bound: None,
        });
    }

    let norm = matrix.norm_inf().max(1.0);
    let cluster = 1e-3 * norm;
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut residual_bound = 0.0_f64;
    for (i, &value) in values.iter().enumerate() {
        let deflate: Vec<&[f64]> = (0..i)
            .rev()
            .take_while(|&j| value - values[j] < cluster)
            .map(|j| vectors[j].as_slice())
            .collect();
        let (_, v, _) = inverse_iteration(matrix, value, &deflate, i);
        let av = matrix.matvec(&v);
        let r = av
            .iter()
            .zip(&v)
            .map(|(y, x)| (y - value * x).powi(2))
            .sum::<f64>()
            .sqrt();
        residual_bound = residual_bound.max(r);
        vectors.push(v);
    }
    Ok(EigenResult {
        values,
        vectors: Some(vectors),
        residual_bound: Some(residual_bound),
    })
}

/// The `count` eigenvalues closest to `target`, ascending.
pub fn eigenvalues_near(matrix: &SymBandMatrix, target: f64, count: usize) -> Result<Vec<f64>> {
    let n = matrix.dim;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    matrix.check_finite()?;
    if count > n {
        return Err(Error::TooManyEigenpairs { requested: count, dim: n });
    }
    let (diag, offdiag) = band_to_tridiagonal(matrix);
    let sturm = SturmSequence::new(&diag, &offdiag);
    let below = sturm.count_below(target);
    let lo = below.saturating_sub(count);
    let hi = (below + count).min(n);
    let mut candidates: Vec<f64> = (lo..hi).map(|i| sturm.eigenvalue(i)).collect();
    candidates.sort_by(|a, b| (a - target).abs().total_cmp(&(b - target).abs()));
    candidates.truncate(count);
    candidates.sort_by(f64::total_cmp);
    Ok(candidates)
}

/// The eigenpair whose eigenvalue lies nearest `target`, by shift-and-invert
/// iteration. Fails when the iteration does not settle on an eigenvector.
pub fn nearest_eigenpair(matrix: &SymBandMatrix, target: f64) -> Result<Eigenpair> {
    if matrix.dim == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    matrix.check_finite()?;
    if !target.is_finite() {
        return Err(Error::InvalidParameter("target must be finite".into()));
    }
    let (value, vector, residual) = inverse_iteration(matrix, target, &[], 0);
    let norm = matrix.norm_inf().max(1.0);
    if !(residual <= 1e-9 * norm) {
        return Err(Error::NoEigenpair { target, residual });
    }
    Ok(Eigenpair {
        value,
        vector,
        residual,
    })
}

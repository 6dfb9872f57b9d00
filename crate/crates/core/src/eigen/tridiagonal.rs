//! Real symmetric tridiagonal eigenproblems.
//!
//! Full spectra (optionally with vectors) use the implicit QL algorithm with
//! Wilkinson shifts; selected eigenvalues use Sturm-count bisection.

use crate::eigen::EigenResult;
use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

fn check_input(diag: &[f64], offdiag: &[f64]) -> Result<()> {
    if diag.is_empty() {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if offdiag.len() + 1 != diag.len() {
        return Err(Error::InvalidParameter(format!(
            "tridiagonal with {} diagonal entries needs {} off-diagonal entries, got {}",
            diag.len(),
            diag.len() - 1,
            offdiag.len()
        )));
    }
    if let Some(i) = diag.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if let Some(i) = offdiag.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(diag.len() + i));
    }
    Ok(())
}

/// All eigenvalues (ascending) and optionally the orthonormal eigenvectors of
/// the symmetric tridiagonal matrix with diagonal `diag` and off-diagonal
/// `offdiag` (`offdiag[i]` couples rows `i` and `i + 1`).
pub fn eig_tridiagonal(diag: &[f64], offdiag: &[f64], want_vectors: bool) -> Result<EigenResult> {
    check_input(diag, offdiag)?;
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    // z[row * n + col]; column `col` is the eigenvector of d[col].
    let mut z = want_vectors.then(|| {
        let mut z = vec![0.0; n * n];
        for i in 0..n {
            z[i * n + i] = 1.0;
        }
        z
    });

    ql_implicit(&mut d, &mut e, z.as_deref_mut())?;

    // Stable sort keeps degenerate pairs in the order QL left them.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();

    let (vectors, residual_bound) = match z {
        Some(z) => {
            let vectors: Vec<Vec<f64>> = order
                .iter()
                .map(|&col| (0..n).map(|row| z[row * n + col]).collect())
                .collect();
            let residual = vectors
                .iter()
                .zip(&values)
                .map(|(v, &lambda)| tridiagonal_residual(diag, offdiag, v, lambda))
                .fold(0.0, f64::max);
            (Some(vectors), Some(residual))
        }
        None => (None, None),
    };

    Ok(EigenResult {
        values,
        vectors,
        residual_bound,
    })
}

/// Implicit QL with Wilkinson shifts on `d` (diagonal) and `e` (off-diagonal,
/// `e[n-1]` is scratch). Accumulates rotations into `z` when given.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence(l));
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Underflow split: restart with the smaller block.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let row = k * n;
                        let f = z[row + i + 1];
                        z[row + i + 1] = s * z[row + i] + c * f;
                        z[row + i] = c * z[row + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

fn tridiagonal_residual(diag: &[f64], offdiag: &[f64], v: &[f64], lambda: f64) -> f64 {
    let n = diag.len();
    let mut sum = 0.0;
    for i in 0..n {
        let mut av = diag[i] * v[i];
        if i > 0 {
            av += offdiag[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            av += offdiag[i] * v[i + 1];
        }
        let r = av - lambda * v[i];
        sum += r * r;
    }
    sum.sqrt()
}

/// Tridiagonal matrix prepared for repeated Sturm counts.
pub(crate) struct SturmSequence<'a> {
    diag: &'a [f64],
    offdiag_sq: Vec<f64>,
    pivmin: f64,
    lower: f64,
    upper: f64,
}

impl<'a> SturmSequence<'a> {
    pub(crate) fn new(diag: &'a [f64], offdiag: &[f64]) -> Self {
        let n = diag.len();
        let offdiag_sq: Vec<f64> = offdiag.iter().map(|x| x * x).collect();
        let max_sq = offdiag_sq.iter().copied().fold(1.0, f64::max);
        let pivmin = f64::MIN_POSITIVE * max_sq;
        // Gershgorin interval.
        let mut lower = f64::INFINITY;
        let mut upper = f64::NEG_INFINITY;
        for i in 0..n {
            let mut radius = 0.0;
            if i > 0 {
                radius += offdiag[i - 1].abs();
            }
            if i + 1 < n {
                radius += offdiag[i].abs();
            }
            lower = lower.min(diag[i] - radius);
            upper = upper.max(diag[i] + radius);
        }
        let pad = 2.0 * f64::EPSILON * lower.abs().max(upper.abs()) + pivmin;
        Self {
            diag,
            offdiag_sq,
            pivmin,
            lower: lower - pad,
            upper: upper + pad,
        }
    }

    /// Number of eigenvalues strictly below `x`.
    pub(crate) fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < self.pivmin {
            q = -self.pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            q = self.diag[i] - x - self.offdiag_sq[i - 1] / q;
            if q.abs() < self.pivmin {
                q = -self.pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `index`-th eigenvalue (0-based, ascending), bisected until the
    /// bracket can no longer shrink in floating point.
    pub(crate) fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = (self.lower, self.upper);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// The lowest `count` eigenvalues, ascending, by Sturm bisection.
pub fn lowest_tridiagonal(diag: &[f64], offdiag: &[f64], count: usize) -> Result<Vec<f64>> {
    check_input(diag, offdiag)?;
    if count > diag.len() {
        return Err(Error::TooManyEigenpairs {
            requested: count,
            dim: diag.len(),
        });
    }
    let sturm = SturmSequence::new(diag, offdiag);
    Ok((0..count).map(|i| sturm.eigenvalue(i)).collect())
}

/// A single eigenvalue by index (0-based, ascending).
pub fn tridiagonal_eigenvalue(diag: &[f64], offdiag: &[f64], index: usize) -> Result<f64> {
    check_input(diag, offdiag)?;
    if index >= diag.len() {
        return Err(Error::TooManyEigenpairs {
            requested: index + 1,
            dim: diag.len(),
        });
    }
    Ok(SturmSequence::new(diag, offdiag).eigenvalue(index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let r = eig_tridiagonal(&[3.5], &[], true).unwrap();
        assert_eq!(r.values, vec![3.5]);
        assert_eq!(r.vectors.unwrap(), vec![vec![1.0]]);
    }

    #[test]
    fn two_by_two() {
        let r = eig_tridiagonal(&[0.0, 0.0], &[1.0], false).unwrap();
        assert!((r.values[0] + 1.0).abs() < 1e-15);
        assert!((r.values[1] - 1.0).abs() < 1e-15);
        let low = lowest_tridiagonal(&[0.0, 0.0], &[1.0], 2).unwrap();
        assert!((low[0] + 1.0).abs() < 1e-15 && (low[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_matrix_is_sorted() {
        let d = [4.0, -1.0, 2.5, 0.0];
        let r = eig_tridiagonal(&d, &[0.0; 3], true).unwrap();
        assert_eq!(r.values, vec![-1.0, 0.0, 2.5, 4.0]);
        let low = lowest_tridiagonal(&d, &[0.0; 3], 4).unwrap();
        for (a, b) in low.iter().zip(&r.values) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn free_laplacian() {
        // Eigenvalues of tridiag(-1, 2, -1): 2 - 2 cos(jπ/(n+1)).
        let n = 40;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let r = eig_tridiagonal(&d, &e, true).unwrap();
        for (j, v) in r.values.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        assert!(r.residual_bound.unwrap() < 1e-13);
        let vecs = r.vectors.unwrap();
        for a in 0..n {
            for b in 0..n {
                let dot: f64 = vecs[a].iter().zip(&vecs[b]).map(|(x, y)| x * y).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
        let low = lowest_tridiagonal(&d, &e, 5).unwrap();
        for j in 0..5 {
            assert!((low[j] - r.values[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(eig_tridiagonal(&[1.0, f64::NAN], &[0.0], false), Err(Error::NonFinite(1))));
        assert!(eig_tridiagonal(&[1.0, 2.0], &[], false).is_err());
        assert!(lowest_tridiagonal(&[1.0], &[], 2).is_err());
    }

    #[test]
    fn deterministic() {
        let d: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let e: Vec<f64> = (0..49).map(|i| (i as f64 * 1.3).cos()).collect();
        let a = eig_tridiagonal(&d, &e, true).unwrap();
        let b = eig_tridiagonal(&d, &e, true).unwrap();
        assert_eq!(a, b);
    }
}

//! Small dense LU with partial pivoting, for the Juddian linear systems and
//! polynomial interpolation. Dimensions here never exceed a few dozen.

/// LU factors of a square matrix, stored in place.
pub(crate) struct Lu {
    n: usize,
    a: Vec<Vec<f64>>,
    perm: Vec<usize>,
    swaps: usize,
}

impl Lu {
    pub(crate) fn factor(mut a: Vec<Vec<f64>>) -> Self {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
                .unwrap_or(k);
            if p != k {
                a.swap(p, k);
                perm.swap(p, k);
                swaps += 1;
            }
            let pivot = a[k][k];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let f = a[i][k] / pivot;
                a[i][k] = f;
                if f != 0.0 {
                    for j in k + 1..n {
                        a[i][j] -= f * a[k][j];
                    }
                }
            }
        }
        Self { n, a, perm, swaps }
    }

    pub(crate) fn determinant(&self) -> f64 {
        let sign = if self.swaps % 2 == 0 { 1.0 } else { -1.0 };
        (0..self.n).map(|i| self.a[i][i]).product::<f64>() * sign
    }

    /// `min |u_ii| / max |u_ii|`: zero for a singular matrix, one at best.
    pub(crate) fn pivot_ratio(&self) -> f64 {
        let pivots = (0..self.n).map(|i| self.a[i][i].abs());
        let max = pivots.clone().fold(0.0, f64::max);
        let min = pivots.fold(f64::INFINITY, f64::min);
        if max == 0.0 {
            0.0
        } else {
            min / max
        }
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i][j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i][j] * x[j];
            }
            if self.a[i][i] == 0.0 {
                return None;
            }
            x[i] /= self.a[i][i];
        }
        x.iter().all(|v| v.is_finite()).then_some(x)
    }
}

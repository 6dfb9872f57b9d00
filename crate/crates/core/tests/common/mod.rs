//! Independent eigenvalue oracle for small dense symmetric matrices: the
//! number of eigenvalues below `μ` equals the number of sign changes in the
//! sequence of leading principal minors of `A − μI` (Sylvester's law of
//! inertia), and bisection on that count isolates each eigenvalue.

#![allow(dead_code)]

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if a[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    det
}

/// Eigenvalues of `a` strictly below `mu`.
pub fn count_below(a: &[Vec<f64>], mu: f64) -> usize {
    let n = a.len();
    let mut changes = 0;
    let mut previous = 1.0_f64;
    for k in 1..=n {
        let minor: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| a[i][j] - if i == j { mu } else { 0.0 }).collect())
            .collect();
        let mut d = determinant(minor);
        if d == 0.0 {
            // A vanishing minor: nudge it off zero, as a tiny shift of μ would.
            d = -previous.signum() * f64::MIN_POSITIVE;
        }
        if (d < 0.0) != (previous < 0.0) {
            changes += 1;
        }
        previous = d;
    }
    changes
}

pub fn eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let radius = a
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    (0..n)
        .map(|index| {
            let (mut lo, mut hi) = (-radius, radius);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if count_below(a, mid) > index {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

pub fn random_symmetric(rng: &mut impl rand::Rng, n: usize) -> Vec<Vec<f64>> {
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v: f64 = rng.gen_range(-1.0..1.0);
            a[i][j] = v;
            a[j][i] = v;
        }
    }
    a
}

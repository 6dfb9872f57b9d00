//! Squeezed number states in a truncated Fock basis.
//!
//! `|n; s⟩` always means the eigenstate of `c†c` with eigenvalue `n`, where
//! `c = (b + s b†)/√(1 − s²)`. The squeezed vacuum is `∝ exp(−s b†²/2)|0⟩`.

use crate::error::{Error, Result};
use crate::params::big_omega;

/// Which Fock parities carry weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FockParity {
    Even,
    Odd,
    Mixed,
}

/// Tail mass below which a truncated state counts as converged.
pub const TAIL_TOLERANCE: f64 = 1e-16;

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    /// Amplitudes on `|0⟩ … |n_max⟩`, scaled so the untruncated state has unit norm.
    pub coeffs: Vec<f64>,
    /// Norm of the truncated vector; lies in `[1 − ε, 1]`.
    pub norm: f64,
    /// `|c_{n_max−1}|² + |c_{n_max}|²`
    pub tail_mass: f64,
    pub parity: FockParity,
}

impl FockVector {
    fn from_coeffs(coeffs: Vec<f64>) -> Self {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        let n = coeffs.len();
        let tail_mass = coeffs[n.saturating_sub(2)..].iter().map(|c| c * c).sum();
        let even = coeffs.iter().step_by(2).any(|&c| c != 0.0);
        let odd = coeffs.iter().skip(1).step_by(2).any(|&c| c != 0.0);
        let parity = match (even, odd) {
            (_, false) => FockParity::Even,
            (false, true) => FockParity::Odd,
            (true, true) => FockParity::Mixed,
        };
        Self {
            coeffs,
            norm,
            tail_mass,
            parity,
        }
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `ε = 1 − ‖ψ‖²` lost to the truncation.
    pub fn truncation_loss(&self) -> f64 {
        1.0 - self.norm * self.norm
    }

    pub fn is_converged(&self) -> bool {
        self.tail_mass < TAIL_TOLERANCE
    }

    pub fn dot(&self, other: &FockVector) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !sigma.is_finite() || sigma.abs() >= 1.0 {
        return Err(Error::NotNormalisable { sigma });
    }
    Ok(())
}

/// Normalised `exp(−σ b†²/2)|0⟩` on `|0⟩ … |n_max⟩`, the state annihilated by
/// `c = (b + σ b†)/√(1 − σ²)`.
pub fn squeezed_vacuum(sigma: f64, n_max: usize) -> Result<FockVector> {
    check_sigma(sigma)?;
    if n_max < 1 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    // Σ_j |ψ_2j|² = (1 − σ²)^(−1/2) for ψ_0 = 1.
    let mut coeffs = vec![0.0; n_max + 1];
    coeffs[0] = (1.0 - sigma * sigma).powf(0.25);
    let mut n = 0;
    while n + 2 <= n_max {
        let ratio = ((n as f64 + 1.0) / (n as f64 + 2.0)).sqrt();
        coeffs[n + 2] = -sigma * ratio * coeffs[n];
        n += 2;
    }
    Ok(FockVector::from_coeffs(coeffs))
}

/// `|n; σ⟩ = (c†)ⁿ/√(n!) |0; σ⟩` with `c† = (b† + σ b)/√(1 − σ²)`.
pub fn squeezed_number_state(n: usize, sigma: f64, n_max: usize) -> Result<FockVector> {
    check_sigma(sigma)?;
    let needed = 4 * n;
    if n_max < needed.max(1) {
        return Err(Error::InsufficientHeadroom { n, n_max, needed });
    }
    // Each application of c† reaches one level further up, so working n levels
    // above the cut-off makes the result the exact projection onto 0..=n_max.
    let work = n_max + n;
    let mut psi = squeezed_vacuum(sigma, work)?.coeffs;
    let scale = 1.0 / (1.0 - sigma * sigma).sqrt();
    for j in 1..=n {
        let mut next = vec![0.0; work + 1];
        for (i, &c) in psi.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            // b†|i⟩ = √(i+1)|i+1⟩, b|i⟩ = √i|i−1⟩
            if i < work {
                next[i + 1] += c * ((i + 1) as f64).sqrt();
            }
            if i > 0 {
                next[i - 1] += sigma * c * (i as f64).sqrt();
            }
        }
        let step = scale / (j as f64).sqrt();
        psi = next.into_iter().map(|c| c * step).collect();
    }
    psi.truncate(n_max + 1);
    Ok(FockVector::from_coeffs(psi))
}

/// `Ẽₙ = (n + 1/2)√(1 − 4λ²) − 1/2`, the spectrum of `b†b ± λ(b†² + b²)`.
pub fn degenerate_energy(n: usize, lambda: f64) -> Result<f64> {
    Ok((n as f64 + 0.5) * big_omega(lambda)? - 0.5)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::eigen::{eig_banded, SymBandMatrix};
    use crate::hamiltonian::{build_degenerate, SpinX};
    use crate::params::{squeeze_params, SqueezeBranch};

    /// `Σ_k (−σ b†²/2)^k / k! |0⟩`, summed until the terms vanish.
    fn exponential_oracle(sigma: f64, n_max: usize) -> Vec<f64> {
        let mut sum = vec![0.0; n_max + 1];
        let mut term = vec![0.0; n_max + 1];
        term[0] = 1.0;
        sum[0] = 1.0;
        for k in 1..=n_max / 2 {
            let mut next = vec![0.0; n_max + 1];
            for i in 0..n_max.saturating_sub(1) {
                let amp = (((i + 1) * (i + 2)) as f64).sqrt();
                next[i + 2] = term[i] * amp * (-sigma / 2.0) / k as f64;
            }
            term = next;
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
        }
        let norm = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
        sum.into_iter().map(|x| x / norm).collect()
    }

    /// `c = (b + σ b†)/√(1 − σ²)` applied to `psi`, dropping the truncated top.
    pub(crate) fn apply_c(sigma: f64, psi: &[f64]) -> Vec<f64> {
        let n_max = psi.len() - 1;
        let scale = 1.0 / (1.0 - sigma * sigma).sqrt();
        let mut out = vec![0.0; n_max + 1];
        for i in 0..=n_max {
            let mut v = 0.0;
            if i < n_max {
                v += ((i + 1) as f64).sqrt() * psi[i + 1];
            }
            if i > 0 {
                v += sigma * (i as f64).sqrt() * psi[i - 1];
            }
            out[i] = scale * v;
        }
        out
    }

    fn apply_cdag(sigma: f64, psi: &[f64]) -> Vec<f64> {
        let n_max = psi.len() - 1;
        let scale = 1.0 / (1.0 - sigma * sigma).sqrt();
        let mut out = vec![0.0; n_max + 1];
        for i in 0..=n_max {
            let mut v = 0.0;
            if i > 0 {
                v += (i as f64).sqrt() * psi[i - 1];
            }
            if i < n_max {
                v += sigma * ((i + 1) as f64).sqrt() * psi[i + 1];
            }
            out[i] = scale * v;
        }
        out
    }

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn unsqueezed_vacuum() {
        let v = squeezed_vacuum(0.0, 10).unwrap();
        assert_eq!(v.coeffs[0], 1.0);
        assert!(v.coeffs[1..].iter().all(|&c| c == 0.0));
        assert_eq!(v.parity, FockParity::Even);
    }

    #[test]
    fn vacuum_is_annihilated() {
        let v = squeezed_vacuum(0.3, 200).unwrap();
        let cv = apply_c(0.3, &v.coeffs);
        // The last row sees the truncation; everything below must vanish.
        assert!(norm(&cv[..199]) < 1e-12);
        assert!((v.coeffs[2] / v.coeffs[0] + 0.3 / 2f64.sqrt()).abs() < 1e-15);
        assert!(v.is_converged());
        assert!((v.norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vacuum_matches_matrix_exponential() {
        for &s in &[0.3, -0.6, 0.85] {
            let v = squeezed_vacuum(s, 160).unwrap();
            let oracle = exponential_oracle(s, 160);
            for (a, b) in v.coeffs.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-12, "s={s}");
            }
        }
    }

    #[test]
    fn rejects_unnormalisable_squeezing() {
        assert!(matches!(squeezed_vacuum(1.0, 10), Err(Error::NotNormalisable { .. })));
        assert!(squeezed_number_state(1, -1.2, 10).is_err());
    }

    #[test]
    fn blow_up_near_unit_squeezing() {
        let tails: Vec<f64> = [0.5, 0.9, 0.99, 0.999]
            .iter()
            .map(|&s| squeezed_vacuum(s, 200).unwrap().tail_mass)
            .collect();
        assert!(tails.windows(2).all(|w| w[1] > w[0]));
        assert!(!squeezed_vacuum(0.999, 200).unwrap().is_converged());
    }

    #[test]
    fn unsqueezed_number_state() {
        let v = squeezed_number_state(3, 0.0, 20).unwrap();
        for (i, c) in v.coeffs.iter().enumerate() {
            let expected = if i == 3 { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn number_operator_eigenstates() {
        let s = 0.2;
        for n in 0..6 {
            let v = squeezed_number_state(n, s, 200).unwrap();
            let cv = apply_c(s, &v.coeffs);
            let ncv = apply_cdag(s, &cv);
            let expectation: f64 = ncv.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum();
            assert!((expectation - n as f64).abs() < 1e-12);
            let residual: Vec<f64> = ncv.iter().zip(&v.coeffs).map(|(a, b)| a - n as f64 * b).collect();
            assert!(norm(&residual[..195]) < 1e-12);
            let expected_parity = if n % 2 == 0 { FockParity::Even } else { FockParity::Odd };
            assert_eq!(v.parity, expected_parity);
        }
    }

    #[test]
    fn distinct_number_states_are_orthogonal() {
        let a = squeezed_number_state(0, 0.2, 100).unwrap();
        let b = squeezed_number_state(2, 0.2, 100).unwrap();
        assert!(a.dot(&b).abs() < 1e-12);
        let c = squeezed_number_state(4, 0.2, 100).unwrap();
        assert!(b.dot(&c).abs() < 1e-12);
    }

    #[test]
    fn headroom_policy() {
        assert!(matches!(
            squeezed_number_state(30, 0.1, 100),
            Err(Error::InsufficientHeadroom { needed: 120, .. })
        ));
        assert!(squeezed_number_state(25, 0.1, 100).is_ok());
    }

    #[test]
    fn degenerate_energy_values() {
        assert_eq!(degenerate_energy(4, 0.0).unwrap(), 4.0);
        assert!((degenerate_energy(0, 0.2).unwrap() + 0.0417424305).abs() < 1e-10);
        assert!((degenerate_energy(3, 0.3).unwrap() - 2.3).abs() < 1e-14);
        assert!(degenerate_energy(0, 0.5).is_err());
    }

    #[test]
    fn degenerate_eigenvectors() {
        for &lambda in &[0.1, 0.2, 0.3, 0.4] {
            let sigma = squeeze_params(lambda, SqueezeBranch::Degenerate).unwrap().sigma;
            for (sign, s) in [(SpinX::Plus, sigma), (SpinX::Minus, -sigma)] {
                let h: SymBandMatrix = build_degenerate(lambda, sign, 600).unwrap();
                for n in 0..=5 {
                    let v = squeezed_number_state(n, s, 600).unwrap();
                    let e = degenerate_energy(n, lambda).unwrap();
                    let hv = h.matvec(&v.coeffs);
                    let r: f64 = hv
                        .iter()
                        .zip(&v.coeffs)
                        .map(|(a, b)| (a - e * b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    assert!(r < 1e-9, "lambda={lambda} n={n} residual={r}");
                }
            }
        }
    }

    #[test]
    fn degenerate_energy_matches_diagonalisation() {
        let h = build_degenerate(0.2, SpinX::Plus, 300).unwrap();
        let values = eig_banded(&h, false, Some(4)).unwrap().values;
        for (n, v) in values.iter().enumerate() {
            assert!((v - degenerate_energy(n, 0.2).unwrap()).abs() < 1e-10);
        }
    }
}

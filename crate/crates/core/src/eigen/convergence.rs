//! Truncation-convergence policy: grow the Fock cut-off until the lowest
//! levels stop moving.

use serde::Serialize;

use crate::eigen::eig_banded;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_degenerate, build_full, build_sector, sector_m_max, SectorLabel, SpinX};
use crate::params::ModelParams;

pub const FIRST_N_MAX: usize = 128;
pub const LAST_N_MAX: usize = 4096;

/// Which truncated Hamiltonian to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Full,
    Sector(SectorLabel),
    /// The ω0 = 0 model in the σx eigenspace of the given sign.
    Degenerate(SpinX),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergedSpectrum {
    pub values: Vec<f64>,
    /// Fock cut-off of the accepted truncation.
    pub n_max: usize,
    /// Every truncation tried, with the largest level change it produced
    /// relative to the previous one (`None` for the first).
    pub history: Vec<(usize, Option<f64>)>,
}

/// Lowest `levels` eigenvalues of `model`, at a truncation doubled from 128
/// until successive results agree to `tol`.
pub fn lowest_levels(model: Model, params: &ModelParams, n_max: usize, levels: usize) -> Result<Vec<f64>> {
    match model {
        Model::Full => {
            let full = build_full(params, n_max)?;
            Ok(eig_banded(&full.matrix, false, Some(levels))?.values)
        }
        Model::Sector(label) => build_sector(params, label, sector_m_max(label.k, n_max)?)?.lowest(levels),
        Model::Degenerate(sign) => {
            let m = build_degenerate(params.lambda, sign, n_max)?;
            Ok(eig_banded(&m, false, Some(levels))?.values)
        }
    }
}

pub fn converged_spectrum(model: Model, params: &ModelParams, levels: usize, tol: f64) -> Result<ConvergedSpectrum> {
    if levels == 0 {
        return Err(Error::InvalidParameter("need at least one level".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut history = Vec::new();
    let mut previous: Option<Vec<f64>> = None;
    let mut n_max = FIRST_N_MAX;
    while n_max <= LAST_N_MAX {
        let values = lowest_levels(model, params, n_max, levels)?;
        let change = previous.as_ref().map(|p| {
            p.iter()
                .zip(&values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        });
        history.push((n_max, change));
        // At zero coupling the first truncation is already exact.
        let exact = params.lambda == 0.0;
        if exact || change.is_some_and(|c| c < tol) {
            return Ok(ConvergedSpectrum {
                values,
                n_max,
                history,
            });
        }
        previous = Some(values);
        n_max *= 2;
    }
    Err(Error::TruncationNotConverged {
        levels,
        tol,
        n_max: LAST_N_MAX,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::SectorSpin;
    use crate::su11::BargmannIndex;

    fn params(lambda: f64) -> ModelParams {
        ModelParams::from_rescaled(1.0, 1.0, lambda).unwrap()
    }

    #[test]
    fn degenerate_closed_form() {
        let p = params(0.2);
        let r = converged_spectrum(Model::Degenerate(SpinX::Plus), &p, 5, 1e-10).unwrap();
        let omega = (1.0f64 - 0.16).sqrt();
        for (n, v) in r.values.iter().enumerate() {
            assert!((v - ((n as f64 + 0.5) * omega - 0.5)).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_coupling_converges_immediately() {
        let p = params(0.0);
        for model in [
            Model::Full,
            Model::Degenerate(SpinX::Minus),
            Model::Sector(SectorLabel::new(SectorSpin::Minus, BargmannIndex::ThreeQuarters)),
        ] {
            let r = converged_spectrum(model, &p, 6, 1e-12).unwrap();
            assert_eq!(r.n_max, FIRST_N_MAX);
            assert_eq!(r.history.len(), 1);
        }
    }

    #[test]
    fn strong_coupling_needs_larger_truncation() {
        let weak = converged_spectrum(Model::Degenerate(SpinX::Plus), &params(0.1), 6, 1e-10).unwrap();
        let strong = converged_spectrum(Model::Degenerate(SpinX::Plus), &params(0.49), 6, 1e-10).unwrap();
        assert!(strong.n_max > weak.n_max, "{} vs {}", strong.n_max, weak.n_max);
    }

    #[test]
    fn levels_decrease_with_truncation() {
        let p = params(0.4);
        let label = SectorLabel::new(SectorSpin::Plus, BargmannIndex::Quarter);
        let mut previous: Option<Vec<f64>> = None;
        for n_max in [16, 32, 64, 128, 256] {
            let v = lowest_levels(Model::Sector(label), &p, n_max, 5).unwrap();
            if let Some(p) = &previous {
                for (a, b) in p.iter().zip(&v) {
                    assert!(*b <= a + 1e-12);
                }
            }
            previous = Some(v);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = params(0.1);
        assert!(converged_spectrum(Model::Full, &p, 0, 1e-10).is_err());
        assert!(converged_spectrum(Model::Full, &p, 3, 0.0).is_err());
    }
}

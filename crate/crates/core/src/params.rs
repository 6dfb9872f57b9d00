//! Model parameters of the two-photon Rabi Hamiltonian and the squeezing
//! quantities derived from the coupling.
//!
//! Physical units: `H = (ω0/2) σz + ω b†b + g (b†² + b²)(σ+ + σ−)`.
//! Rescaled units: `H = ω H̃` with `H̃ = ω̃ σz + b†b + λ (b†² + b²) σx`,
//! `ω̃ = ω0 / 2ω` and `λ = 2g / ω`. Everything downstream of this module works
//! in rescaled units; conversion happens only at I/O boundaries.

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance on `|ω̃ − 1|` below which the model is flagged as resonant.
pub const RESONANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub omega: f64,
    pub omega0: f64,
    pub g: f64,
    pub omega_tilde: f64,
    pub lambda: f64,
}

impl ModelParams {
    /// Builds the parameter set from physical couplings, enforcing `|λ| < 1/2`.
    pub fn derive(omega: f64, omega0: f64, g: f64) -> Result<Self> {
        let params = Self::derive_unchecked(omega, omega0, g)?;
        check_validity(params.lambda)?;
        Ok(params)
    }

    /// Same as [`ModelParams::derive`] but without the normalisability bound,
    /// for exploratory scans.
    pub fn derive_unchecked(omega: f64, omega0: f64, g: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "boson frequency omega must be positive, got {omega}"
            )));
        }
        if !omega0.is_finite() || !g.is_finite() {
            return Err(Error::InvalidParameter(
                "omega0 and g must be finite".to_string(),
            ));
        }
        Ok(Self {
            omega,
            omega0,
            g,
            omega_tilde: omega0 / (2.0 * omega),
            lambda: 2.0 * g / omega,
        })
    }

    /// Builds the parameter set from the rescaled pair `(ω̃, λ)` at a given `ω`.
    pub fn from_rescaled(omega: f64, omega_tilde: f64, lambda: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "boson frequency omega must be positive, got {omega}"
            )));
        }
        if !omega_tilde.is_finite() {
            return Err(Error::InvalidParameter("omega_tilde must be finite".into()));
        }
        check_validity(lambda)?;
        Ok(Self {
            omega,
            omega0: 2.0 * omega * omega_tilde,
            g: lambda * omega / 2.0,
            omega_tilde,
            lambda,
        })
    }

    /// Same frequencies, different coupling.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::from_rescaled(self.omega, self.omega_tilde, lambda)
    }

    pub fn is_resonant(&self) -> bool {
        (self.omega_tilde - 1.0).abs() <= RESONANCE_TOL
    }

    pub fn g_of_lambda(&self, lambda: f64) -> f64 {
        lambda * self.omega / 2.0
    }

    pub fn lambda_of_g(&self, g: f64) -> f64 {
        2.0 * g / self.omega
    }

    /// `E = ω Ẽ`.
    pub fn to_physical_energy(&self, rescaled: f64) -> f64 {
        self.omega * rescaled
    }

    pub fn to_rescaled_energy(&self, physical: f64) -> f64 {
        physical / self.omega
    }

    pub fn squeeze(&self, branch: SqueezeBranch) -> Result<DerivedSqueeze> {
        squeeze_params(self.lambda, branch)
    }
}

fn check_validity(lambda: f64) -> Result<()> {
    if !lambda.is_finite() || lambda.abs() >= 0.5 {
        return Err(Error::OutsideValidity { lambda });
    }
    Ok(())
}

/// Which root of the squeezing quadratic to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SqueezeBranch {
    /// `σ − λ(1 + σ²) = 0`, i.e. `σ = (1 − Ω)/2λ`: diagonalises the ω0 = 0 model.
    Degenerate,
    /// `σ + λ(1 + σ²) = 0`, i.e. `σ = (Ω − 1)/2λ`: used by the Juddian ansatz.
    Judd,
}

impl SqueezeBranch {
    pub fn opposite(self) -> Self {
        match self {
            SqueezeBranch::Degenerate => SqueezeBranch::Judd,
            SqueezeBranch::Judd => SqueezeBranch::Degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedSqueeze {
    pub branch: SqueezeBranch,
    /// `Ω = √(1 − 4λ²)`
    pub big_omega: f64,
    pub sigma: f64,
    /// `κ = 1 − σ²`
    pub kappa: f64,
}

/// `Ω = √(1 − 4λ²)`, defined for `|λ| < 1/2`.
pub fn big_omega(lambda: f64) -> Result<f64> {
    check_validity(lambda)?;
    // (1 - 2λ)(1 + 2λ) keeps full relative accuracy as λ → 1/2.
    Ok(((1.0 - 2.0 * lambda) * (1.0 + 2.0 * lambda)).sqrt())
}

pub fn squeeze_params(lambda: f64, branch: SqueezeBranch) -> Result<DerivedSqueeze> {
    let big_omega = big_omega(lambda)?;
    // (1 − Ω)/2λ rewritten as 2λ/(1 + Ω): no cancellation, and exactly 0 at λ = 0.
    let sigma_degenerate = 2.0 * lambda / (1.0 + big_omega);
    let sigma = match branch {
        SqueezeBranch::Degenerate => sigma_degenerate,
        SqueezeBranch::Judd => -sigma_degenerate,
    };
    Ok(DerivedSqueeze {
        branch,
        big_omega,
        sigma,
        kappa: 1.0 - sigma * sigma,
    })
}

//! Truncated matrices of the rescaled two-photon Rabi Hamiltonian
//! `H̃ = ω̃ σz + b†b + λ (b†² + b²) σx`.
//!
//! * [`FullMatrix`]: Fock ⊗ spin basis with the spin in the σx eigenbasis,
//!   interleaved as `(n, +x), (n, −x)`. The coupling is spin-diagonal and
//!   `ω̃ σz` flips the σx label, so the matrix is banded with half-width 4.
//! * [`SectorMatrix`]: one of the four decoupled bosonic Hamiltonians
//!   `M ω̃ (−1)^m + 2(m + k) − 1/2 + 2λ (K+ + K−)` in the D⁺(k) basis.
//! * [`ParityMatrix`]: the conserved operator `Π = −σz exp(iπ b†b / 2)`.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::eigen::{eig_banded, lowest_tridiagonal, SymBandMatrix};
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::su11::{kplus_offdiag, BargmannIndex, BargmannSector};

/// Default Fock truncation: states `|0⟩ … |500⟩`.
pub const DEFAULT_N_MAX: usize = 500;

/// Eigenvalue of σx labelling a spin component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpinX {
    Plus,
    Minus,
}

impl SpinX {
    pub fn sign(self) -> f64 {
        match self {
            SpinX::Plus => 1.0,
            SpinX::Minus => -1.0,
        }
    }

    fn slot(self) -> usize {
        match self {
            SpinX::Plus => 0,
            SpinX::Minus => 1,
        }
    }
}

/// The decoupled spin label `M = ±1` of a sector Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectorSpin {
    Plus,
    Minus,
}

impl SectorSpin {
    pub fn sign(self) -> f64 {
        match self {
            SectorSpin::Plus => 1.0,
            SectorSpin::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            SectorSpin::Plus => 1,
            SectorSpin::Minus => -1,
        }
    }

    pub fn from_i8(m: i8) -> Result<Self> {
        match m {
            1 => Ok(SectorSpin::Plus),
            -1 => Ok(SectorSpin::Minus),
            _ => Err(Error::InvalidParameter(format!("sector label M must be ±1, got {m}"))),
        }
    }
}

impl Serialize for SectorSpin {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

/// Symmetry sector `(M, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SectorLabel {
    #[serde(rename = "M")]
    pub m: SectorSpin,
    pub k: BargmannIndex,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 4] = [
        SectorLabel { m: SectorSpin::Plus, k: BargmannIndex::Quarter },
        SectorLabel { m: SectorSpin::Plus, k: BargmannIndex::ThreeQuarters },
        SectorLabel { m: SectorSpin::Minus, k: BargmannIndex::Quarter },
        SectorLabel { m: SectorSpin::Minus, k: BargmannIndex::ThreeQuarters },
    ];

    pub fn new(m: SectorSpin, k: BargmannIndex) -> Self {
        Self { m, k }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(M={:+}, k={})", self.m.as_i8(), self.k)
    }
}

/// The full Hamiltonian on `|n⟩ ⊗ |s_x⟩`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullMatrix {
    pub n_max: usize,
    pub omega_tilde: f64,
    pub lambda: f64,
    pub matrix: SymBandMatrix,
}

impl FullMatrix {
    pub fn index(n: usize, s: SpinX) -> usize {
        2 * n + s.slot()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

pub fn build_full(params: &ModelParams, n_max: usize) -> Result<FullMatrix> {
    if n_max < 4 {
        return Err(Error::InvalidParameter(format!(
            "full truncation needs n_max >= 4, got {n_max}"
        )));
    }
    let dim = 2 * (n_max + 1);
    let mut m = SymBandMatrix::zeros(dim, 4);
    let (wt, lambda) = (params.omega_tilde, params.lambda);
    for n in 0..=n_max {
        for s in [SpinX::Plus, SpinX::Minus] {
            let i = FullMatrix::index(n, s);
            m.set(i, i, n as f64);
            if n + 2 <= n_max {
                let amp = ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt();
                m.set(FullMatrix::index(n + 2, s), i, s.sign() * lambda * amp);
            }
        }
        m.set(FullMatrix::index(n, SpinX::Minus), FullMatrix::index(n, SpinX::Plus), wt);
    }
    Ok(FullMatrix {
        n_max,
        omega_tilde: wt,
        lambda,
        matrix: m,
    })
}

/// Symmetric tridiagonal matrix of one `(M, k)` sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    pub label: SectorLabel,
    pub m_max: usize,
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl SectorMatrix {
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>> {
        lowest_tridiagonal(&self.diag, &self.offdiag, count)
    }
}

pub fn build_sector(params: &ModelParams, label: SectorLabel, m_max: usize) -> Result<SectorMatrix> {
    let sector = BargmannSector::new(label.k, m_max)?;
    let k = label.k.value();
    let spin = label.m.sign();
    let wt = params.omega_tilde;
    let diag = (0..=m_max)
        .map(|m| {
            let alternating = if m % 2 == 0 { 1.0 } else { -1.0 };
            spin * wt * alternating + 2.0 * (m as f64 + k) - 0.5
        })
        .collect();
    let offdiag = kplus_offdiag(&sector)
        .into_iter()
        .map(|x| 2.0 * params.lambda * x)
        .collect();
    Ok(SectorMatrix {
        label,
        m_max,
        diag,
        offdiag,
    })
}

/// Sector truncation spanning the same Fock range `0..=n_max` as a full matrix.
pub fn sector_m_max(k: BargmannIndex, n_max: usize) -> Result<usize> {
    k.m_max_for(n_max)
        .filter(|&m| m >= 2)
        .ok_or_else(|| Error::InvalidParameter(format!("n_max = {n_max} too small for sector k = {k}")))
}

/// `b†b ± λ (b†² + b²)` on `|0⟩ … |n_max⟩`: the ω0 = 0 model in a σx eigenspace.
pub fn build_degenerate(lambda: f64, sign: SpinX, n_max: usize) -> Result<SymBandMatrix> {
    if !lambda.is_finite() || lambda.abs() >= 0.5 {
        return Err(Error::OutsideValidity { lambda });
    }
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("n_max must be >= 2, got {n_max}")));
    }
    let mut m = SymBandMatrix::zeros(n_max + 1, 2);
    for n in 0..=n_max {
        m.set(n, n, n as f64);
        if n + 2 <= n_max {
            let amp = ((n as f64 + 1.0) * (n as f64 + 2.0)).sqrt();
            m.set(n + 2, n, sign.sign() * lambda * amp);
        }
    }
    Ok(m)
}

/// Sorted union of the lowest `count` levels of each of the four sectors at
/// the truncation matched to `n_max`, keeping the lowest `count` overall.
pub fn sector_union_spectrum(params: &ModelParams, n_max: usize, count: usize) -> Result<Vec<f64>> {
    let mut all = Vec::with_capacity(4 * count);
    for label in SectorLabel::ALL {
        let sector = build_sector(params, label, sector_m_max(label.k, n_max)?)?;
        let take = count.min(sector.m_max + 1);
        all.extend(sector.lowest(take)?);
    }
    all.sort_by(f64::total_cmp);
    all.truncate(count);
    Ok(all)
}

/// Lowest `count` eigenvalues of the full matrix.
pub fn full_spectrum(params: &ModelParams, n_max: usize, count: usize) -> Result<Vec<f64>> {
    let full = build_full(params, n_max)?;
    Ok(eig_banded(&full.matrix, false, Some(count))?.values)
}

/// `Π = −σz exp(iπ b†b/2)`, diagonal on `|n⟩ ⊗ |s_z⟩` with entries `−s_z iⁿ`.
/// Basis order is interleaved `(n, ↑z), (n, ↓z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityMatrix {
    pub n_max: usize,
    pub phases: Vec<Complex64>,
}

fn i_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn build_parity(n_max: usize) -> ParityMatrix {
    let mut phases = Vec::with_capacity(2 * (n_max + 1));
    for n in 0..=n_max {
        let fourier = i_pow(n);
        phases.push(-fourier); // s_z = +1
        phases.push(fourier); // s_z = −1
    }
    ParityMatrix { n_max, phases }
}

impl ParityMatrix {
    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    /// Eigenvalue on `|n⟩ ⊗ |s_z⟩`, `s_z = ±1`.
    pub fn eigenvalue(&self, n: usize, spin_up: bool) -> Complex64 {
        self.phases[2 * n + usize::from(!spin_up)]
    }

    /// Entries of `Π² = exp(iπ b†b)`: `(−1)ⁿ`.
    pub fn squared(&self) -> Vec<f64> {
        self.phases.iter().map(|p| (p * p).re).collect()
    }

    /// Max deviation of `Π⁴` from the identity.
    pub fn fourth_power_deviation(&self) -> f64 {
        self.phases
            .iter()
            .map(|p| (p.powu(4) - 1.0).norm())
            .fold(0.0, f64::max)
    }

    /// `⟨v|Π|v⟩` for a real vector given in the σx frame of [`FullMatrix`].
    ///
    /// With `|↑z⟩ = (|+x⟩ + |−x⟩)/√2` and `|↓z⟩ = (|+x⟩ − |−x⟩)/√2`, the
    /// expectation reduces to `−Σₙ iⁿ · 2 v(n,+x) v(n,−x)`.
    pub fn expectation_x_frame(&self, v: &[f64]) -> Complex64 {
        assert_eq!(v.len(), self.dim(), "vector and parity operator dimensions differ");
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..=self.n_max {
            let plus = v[FullMatrix::index(n, SpinX::Plus)];
            let minus = v[FullMatrix::index(n, SpinX::Minus)];
            acc -= i_pow(n) * (2.0 * plus * minus);
        }
        acc
    }

    /// Max entry of `[H, Π]`, with `H` rotated from the σx frame into the σz
    /// frame where `Π` is diagonal.
    pub fn commutator_max(&self, h: &FullMatrix) -> f64 {
        assert_eq!(h.n_max, self.n_max, "truncations differ");
        let dim = self.dim();
        let a = &h.matrix;
        let half = std::f64::consts::FRAC_1_SQRT_2;
        // Rotation R with R[z_slot][x_slot]: ↑z = (+x + −x)/√2, ↓z = (+x − −x)/√2.
        let rot = [[half, half], [half, -half]];
        let mut worst = 0.0_f64;
        for n in 0..=self.n_max {
            for n2 in n.saturating_sub(2)..=(n + 2).min(self.n_max) {
                for zi in 0..2 {
                    for zj in 0..2 {
                        let mut hz = 0.0;
                        for xi in 0..2 {
                            for xj in 0..2 {
                                hz += rot[zi][xi] * a.get(2 * n + xi, 2 * n2 + xj) * rot[zj][xj];
                            }
                        }
                        let (i, j) = (2 * n + zi, 2 * n2 + zj);
                        debug_assert!(i < dim && j < dim);
                        let c = hz * (self.phases[j] - self.phases[i]);
                        worst = worst.max(c.norm());
                    }
                }
            }
        }
        worst
    }
}

//! Matrix elements of the positive discrete series D⁺(k) of su(1,1) in its
//! single-mode bosonic realisation `K+ = b†²/2`, `K− = b²/2`, `K0 = b†b/2 + 1/4`.
//!
//! The Bargmann index is 1/4 (even Fock states, `|1/4, m⟩ ↔ |2m⟩`) or 3/4
//! (odd Fock states, `|3/4, m⟩ ↔ |2m + 1⟩`).

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Bargmann index of the bosonic su(1,1) representation. Only the two
/// values realised by a single mode exist, so the index is an enum rather
/// than a float.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BargmannIndex {
    Quarter,
    ThreeQuarters,
}

impl BargmannIndex {
    pub const ALL: [BargmannIndex; 2] = [BargmannIndex::Quarter, BargmannIndex::ThreeQuarters];

    pub fn value(self) -> f64 {
        match self {
            BargmannIndex::Quarter => 0.25,
            BargmannIndex::ThreeQuarters => 0.75,
        }
    }

    /// Fock parity spanned by the representation: 0 (even) or 1 (odd).
    pub fn fock_offset(self) -> usize {
        match self {
            BargmannIndex::Quarter => 0,
            BargmannIndex::ThreeQuarters => 1,
        }
    }

    /// Fock number of the state `|k, m⟩`.
    pub fn fock_index(self, m: usize) -> usize {
        2 * m + self.fock_offset()
    }

    /// Representation and `m` label of the Fock state `|n⟩`.
    pub fn of_fock(n: usize) -> (Self, usize) {
        if n % 2 == 0 {
            (BargmannIndex::Quarter, n / 2)
        } else {
            (BargmannIndex::ThreeQuarters, n / 2)
        }
    }

    /// Largest `m` whose Fock state fits in `0..=n_max`.
    pub fn m_max_for(self, n_max: usize) -> Option<usize> {
        n_max
            .checked_sub(self.fock_offset())
            .map(|top| top / 2)
    }

    /// Casimir eigenvalue `k(k − 1)`; −3/16 for both bosonic indices.
    pub fn casimir(self) -> f64 {
        let k = self.value();
        k * (k - 1.0)
    }

    pub fn label(self) -> &'static str {
        match self {
            BargmannIndex::Quarter => "1/4",
            BargmannIndex::ThreeQuarters => "3/4",
        }
    }
}

impl fmt::Display for BargmannIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for BargmannIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}

/// A truncated D⁺(k) basis `|k, 0⟩ … |k, m_max⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BargmannSector {
    pub k: BargmannIndex,
    pub m_max: usize,
}

impl BargmannSector {
    pub fn new(k: BargmannIndex, m_max: usize) -> Result<Self> {
        if m_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "su(1,1) truncation needs m_max >= 2, got {m_max}"
            )));
        }
        Ok(Self { k, m_max })
    }

    pub fn dim(&self) -> usize {
        self.m_max + 1
    }
}

/// Number of top basis states excluded from algebra checks. Only the last
/// state sees `K+` leave the truncated space.
pub const TRUNCATION_EDGE: usize = 1;

/// `⟨k,m|K0|k,m⟩ = m + k`.
pub fn k0_diag(sector: &BargmannSector) -> Vec<f64> {
    let k = sector.k.value();
    (0..=sector.m_max).map(|m| m as f64 + k).collect()
}

/// `⟨k,m+1|K+|k,m⟩ = √((m+1)(m+2k))` for `m = 0..m_max−1`. By hermiticity the
/// same vector holds `⟨k,m|K−|k,m+1⟩`.
pub fn kplus_offdiag(sector: &BargmannSector) -> Vec<f64> {
    let two_k = 2.0 * sector.k.value();
    (0..sector.m_max)
        .map(|m| ((m as f64 + 1.0) * (m as f64 + two_k)).sqrt())
        .collect()
}

/// `K−|k,m⟩ = √(m(m+2k−1)) |k,m−1⟩`; zero on the lowest weight state.
pub fn kminus_element(k: BargmannIndex, m: usize) -> f64 {
    let m = m as f64;
    (m * (m + 2.0 * k.value() - 1.0)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasimirReport {
    /// `k(k − 1)`
    pub expected: f64,
    /// Max `|C_mm − k(k−1)|` over interior states.
    pub diagonal_deviation: f64,
    /// Max `|C_mn|`, `m ≠ n`, over interior states.
    pub offdiagonal: f64,
}

impl CasimirReport {
    pub fn max_deviation(&self) -> f64 {
        self.diagonal_deviation.max(self.offdiagonal)
    }
}

/// Dense matrices of `(K0, K+, K−)` on the truncated basis.
fn generators(sector: &BargmannSector) -> (Dense, Dense, Dense) {
    let n = sector.dim();
    let mut k0 = Dense::zeros(n);
    let mut kp = Dense::zeros(n);
    let mut km = Dense::zeros(n);
    for (m, v) in k0_diag(sector).into_iter().enumerate() {
        k0.set(m, m, v);
    }
    for (m, v) in kplus_offdiag(sector).into_iter().enumerate() {
        kp.set(m + 1, m, v);
    }
    for m in 1..n {
        km.set(m - 1, m, kminus_element(sector.k, m));
    }
    (k0, kp, km)
}

/// Builds `C = K0² − (K+K− + K−K+)/2` on the truncated basis and compares it
/// with `k(k−1)` away from the truncation edge.
pub fn casimir_check(sector: &BargmannSector) -> CasimirReport {
    let (k0, kp, km) = generators(sector);
    let k0sq = k0.mul(&k0);
    let anti = kp.mul(&km).add(&km.mul(&kp));
    let n = sector.dim();
    let interior = n - TRUNCATION_EDGE;
    let expected = sector.k.casimir();
    let mut diagonal_deviation = 0.0_f64;
    let mut offdiagonal = 0.0_f64;
    for i in 0..interior {
        for j in 0..interior {
            let c = k0sq.get(i, j) - 0.5 * anti.get(i, j);
            if i == j {
                diagonal_deviation = diagonal_deviation.max((c - expected).abs());
            } else {
                offdiagonal = offdiagonal.max(c.abs());
            }
        }
    }
    CasimirReport {
        expected,
        diagonal_deviation,
        offdiagonal,
    }
}

/// Max entrywise deviation of `[K−, K+] − 2K0` on interior states.
pub fn commutator_check(sector: &BargmannSector) -> f64 {
    let (k0, kp, km) = generators(sector);
    let comm = km.mul(&kp).sub(&kp.mul(&km));
    let n = sector.dim();
    let interior = n - TRUNCATION_EDGE;
    let mut dev = 0.0_f64;
    for i in 0..interior {
        for j in 0..interior {
            dev = dev.max((comm.get(i, j) - 2.0 * k0.get(i, j)).abs());
        }
    }
    dev
}

/// Max deviation between the D⁺(k) matrix of `K+` and `b†²/2` restricted to
/// the matching Fock parity subspace.
pub fn fock_correspondence_deviation(sector: &BargmannSector) -> f64 {
    let offset = sector.k.fock_offset();
    kplus_offdiag(sector)
        .into_iter()
        .enumerate()
        .map(|(m, element)| {
            let n = (2 * m + offset) as f64;
            // ⟨n+2| b†² |n⟩ = √((n+1)(n+2))
            let fock = 0.5 * ((n + 1.0) * (n + 2.0)).sqrt();
            (element - fock).abs()
        })
        .fold(0.0, f64::max)
}

/// Minimal square matrix used only by the algebra checks.
struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    fn mul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(l, j);
                }
            }
        }
        out
    }

    fn add(&self, other: &Dense) -> Dense {
        Dense {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    fn sub(&self, other: &Dense) -> Dense {
        Dense {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

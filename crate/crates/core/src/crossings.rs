//! Coupling sweeps of the four sector spectra, detection of level crossings
//! between sectors, and their classification by the conserved parity `Π`.

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::eigen::{converged_spectrum, nearest_eigenpair, tridiagonal_eigenvalue, Model};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_full, build_parity, build_sector, sector_m_max, SectorLabel, DEFAULT_N_MAX};
use crate::juddian::{baseline, conjectured_baseline};
use crate::params::{big_omega, ModelParams};

/// Crossings are refined until the coupling bracket is this narrow.
pub const REFINE_TOL: f64 = 1e-11;
/// Records closer than this in λ and energy are merged.
pub const DEDUP_TOL: f64 = 1e-9;
/// Offset from the crossing at which eigenvectors are labelled.
pub const LABEL_OFFSET: f64 = 1e-6;
/// Largest tolerated distance of `⟨Π⟩` from a fourth root of unity.
pub const PARITY_TOL: f64 = 1e-6;
/// Beyond this distance the parity label is rejected outright.
pub const PARITY_REJECT: f64 = 1e-3;

/// Eigenvalue of `Π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Parity {
    /// Table order: `+1, +i, −1, −i`.
    pub const ALL: [Parity; 4] = [Parity::PlusOne, Parity::PlusI, Parity::MinusOne, Parity::MinusI];

    pub fn value(self) -> Complex64 {
        match self {
            Parity::PlusOne => Complex64::new(1.0, 0.0),
            Parity::PlusI => Complex64::new(0.0, 1.0),
            Parity::MinusOne => Complex64::new(-1.0, 0.0),
            Parity::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::PlusOne => "+1",
            Parity::PlusI => "+i",
            Parity::MinusOne => "-1",
            Parity::MinusI => "-i",
        }
    }

    /// `Π² = ±1`: the ordinary boson parity.
    pub fn squared(self) -> i8 {
        match self {
            Parity::PlusOne | Parity::MinusOne => 1,
            Parity::PlusI | Parity::MinusI => -1,
        }
    }

    /// Nearest fourth root of unity and the distance to it.
    pub fn round(z: Complex64) -> (Parity, f64) {
        Parity::ALL
            .iter()
            .map(|&p| (p, (z - p.value()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("four candidates")
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Parity {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

/// The crossing-classification rule on parity pairs: described iff the two
/// parities are negatives of each other.
pub fn described_by_parity(a: Parity, b: Parity) -> bool {
    a != b && a.squared() == b.squared()
}

/// How the Fock cut-off is chosen for a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Truncation {
    Fixed(usize),
    /// Converge the lowest levels at the strongest coupling of the window.
    Auto { tol: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Supplies `ω` and `ω̃`; its coupling is ignored.
    pub params: ModelParams,
    pub window: (f64, f64),
    pub grid: usize,
    pub levels: usize,
    pub truncation: Truncation,
}

impl ScanConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            window: (0.02, 0.45),
            grid: 400,
            levels: 12,
            truncation: Truncation::Fixed(DEFAULT_N_MAX),
        }
    }

    fn validate(&self) -> Result<()> {
        let (a, b) = self.window;
        if !(a >= 0.0 && a < b && b < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "coupling window must satisfy 0 <= a < b < 1/2, got ({a}, {b})"
            )));
        }
        if self.grid < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points".into()));
        }
        if self.levels < 2 {
            return Err(Error::InvalidParameter("need at least two levels per sector".into()));
        }
        Ok(())
    }

    pub fn lambda_grid(&self) -> Vec<f64> {
        let (a, b) = self.window;
        (0..self.grid)
            .map(|i| a + (b - a) * i as f64 / (self.grid - 1) as f64)
            .collect()
    }
}

/// Lowest levels of every sector along a coupling grid, in rescaled units.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub omega: f64,
    pub omega_tilde: f64,
    pub lambdas: Vec<f64>,
    pub sectors: [SectorLabel; 4],
    /// `levels[s][i][l]`: level `l` of sector `s` at `lambdas[i]`.
    pub levels: Vec<Vec<Vec<f64>>>,
    pub n_max: usize,
    /// Convergence tolerance when the truncation was chosen automatically.
    pub tol: Option<f64>,
}

impl SpectrumTable {
    pub fn level_count(&self) -> usize {
        self.levels[0][0].len()
    }

    pub fn params_at(&self, lambda: f64) -> Result<ModelParams> {
        ModelParams::from_rescaled(self.omega, self.omega_tilde, lambda)
    }

    /// Level `l` of `sector` at an arbitrary coupling, on this table's truncation.
    pub fn sector_level(&self, sector: SectorLabel, level: usize, lambda: f64) -> Result<f64> {
        let m = build_sector(&self.params_at(lambda)?, sector, sector_m_max(sector.k, self.n_max)?)?;
        tridiagonal_eigenvalue(&m.diag, &m.offdiag, level)
    }
}

fn choose_truncation(config: &ScanConfig) -> Result<(usize, Option<f64>)> {
    match config.truncation {
        Truncation::Fixed(n_max) => Ok((n_max, None)),
        Truncation::Auto { tol } => {
            let strongest = config.params.with_lambda(config.window.0.abs().max(config.window.1.abs()))?;
            let mut n_max = 0;
            for label in SectorLabel::ALL {
                let r = converged_spectrum(Model::Sector(label), &strongest, config.levels, tol)?;
                n_max = n_max.max(r.n_max);
            }
            Ok((n_max, Some(tol)))
        }
    }
}

/// Diagonalises the four sectors at every grid coupling.
pub fn scan(config: &ScanConfig) -> Result<SpectrumTable> {
    config.validate()?;
    let (n_max, tol) = choose_truncation(config)?;
    let lambdas = config.lambda_grid();
    let per_point = crate::par_map(&lambdas, |&lambda| -> Result<Vec<Vec<f64>>> {
        let p = config.params.with_lambda(lambda)?;
        SectorLabel::ALL
            .iter()
            .map(|&label| build_sector(&p, label, sector_m_max(label.k, n_max)?)?.lowest(config.levels))
            .collect()
    });
    let mut levels = vec![Vec::with_capacity(lambdas.len()); 4];
    for point in per_point {
        for (s, values) in point?.into_iter().enumerate() {
            levels[s].push(values);
        }
    }
    Ok(SpectrumTable {
        omega: config.params.omega,
        omega_tilde: config.params.omega_tilde,
        lambdas,
        sectors: SectorLabel::ALL,
        levels,
        n_max,
        tol,
    })
}

/// An unlabelled crossing between level `level_a` of one sector and
/// `level_b` of another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub lambda: f64,
    pub energy_tilde: f64,
    pub sector_a: SectorLabel,
    pub level_a: usize,
    pub sector_b: SectorLabel,
    pub level_b: usize,
}

/// Sign changes of inter-sector level differences along the grid, refined by
/// bisection on fresh sector eigenvalues. Sorted by λ, then energy.
pub fn detect_crossings(table: &SpectrumTable) -> Result<Vec<Crossing>> {
    let levels = table.level_count();
    let mut jobs = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            for la in 0..levels {
                for lb in 0..levels {
                    jobs.push((a, b, la, lb));
                }
            }
        }
    }
    let found = crate::par_map(&jobs, |&(a, b, la, lb)| -> Result<Vec<Crossing>> {
        let diff: Vec<f64> = (0..table.lambdas.len())
            .map(|i| table.levels[a][i][la] - table.levels[b][i][lb])
            .collect();
        let (sa, sb) = (table.sectors[a], table.sectors[b]);
        let mut out = Vec::new();
        for i in 0..diff.len() {
            let lambda = if diff[i] == 0.0 {
                table.lambdas[i]
            } else if i + 1 < diff.len() && diff[i + 1] != 0.0 && (diff[i] < 0.0) != (diff[i + 1] < 0.0) {
                refine(table, sa, la, sb, lb, table.lambdas[i], table.lambdas[i + 1], diff[i])?
            } else {
                continue;
            };
            let ea = table.sector_level(sa, la, lambda)?;
            let eb = table.sector_level(sb, lb, lambda)?;
            out.push(Crossing {
                lambda,
                energy_tilde: 0.5 * (ea + eb),
                sector_a: sa,
                level_a: la,
                sector_b: sb,
                level_b: lb,
            });
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for f in found {
        all.extend(f?);
    }
    all.sort_by(|x, y| x.lambda.total_cmp(&y.lambda).then(x.energy_tilde.total_cmp(&y.energy_tilde)));
    let mut deduped: Vec<Crossing> = Vec::with_capacity(all.len());
    for c in all {
        let duplicate = deduped.iter().rev().take_while(|d| c.lambda - d.lambda < DEDUP_TOL).any(|d| {
            (d.energy_tilde - c.energy_tilde).abs() < DEDUP_TOL
                && ((d.sector_a, d.sector_b) == (c.sector_a, c.sector_b))
        });
        if !duplicate {
            deduped.push(c);
        }
    }
    Ok(deduped)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    table: &SpectrumTable,
    sa: SectorLabel,
    la: usize,
    sb: SectorLabel,
    lb: usize,
    mut lo: f64,
    mut hi: f64,
    d_lo: f64,
) -> Result<f64> {
    let d = |lambda: f64| -> Result<f64> { Ok(table.sector_level(sa, la, lambda)? - table.sector_level(sb, lb, lambda)?) };
    while hi - lo > REFINE_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = d(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == (d_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Π` of the full-basis eigenvector whose eigenvalue is nearest `energy_tilde`
/// at coupling `lambda`, with the distance of `⟨Π⟩` from the returned label.
pub fn parity_label(params: &ModelParams, energy_tilde: f64, lambda: f64, n_max: usize) -> Result<(Parity, f64)> {
    let p = params.with_lambda(lambda)?;
    let full = build_full(&p, n_max)?;
    let pair = nearest_eigenpair(&full.matrix, energy_tilde)?;
    let z = build_parity(n_max).expectation_x_frame(&pair.vector);
    let (parity, deviation) = Parity::round(z);
    if deviation > PARITY_REJECT {
        return Err(Error::AmbiguousParity {
            re: z.re,
            im: z.im,
            deviation,
        });
    }
    Ok((parity, deviation))
}

/// Which baseline a crossing sits nearest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineRef {
    /// `−1/2 + (N + 1/2)Ω`
    Juddian(usize),
    /// `−1/2 + nΩ`
    Conjectured(usize),
}

impl fmt::Display for BaselineRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineRef::Juddian(n) => write!(f, "juddian:{n}"),
            BaselineRef::Conjectured(n) => write!(f, "conjectured:{n}"),
        }
    }
}

impl Serialize for BaselineRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Nearest Juddian baseline `(N ≥ 2)` to `(λ, Ẽ)` and the energy distance.
pub fn nearest_juddian_baseline(lambda: f64, energy_tilde: f64) -> Result<(BaselineRef, f64)> {
    let omega = big_omega(lambda)?;
    let n = ((energy_tilde + 0.5) / omega - 0.5).round().max(2.0) as usize;
    Ok((BaselineRef::Juddian(n), (energy_tilde - baseline(n, lambda)?).abs()))
}

/// Nearest conjectured baseline `(n ≥ 2)` to `(λ, Ẽ)` and the energy distance.
pub fn nearest_conjectured_baseline(lambda: f64, energy_tilde: f64) -> Result<(BaselineRef, f64)> {
    let omega = big_omega(lambda)?;
    let n = ((energy_tilde + 0.5) / omega).round().max(2.0) as usize;
    Ok((BaselineRef::Conjectured(n), (energy_tilde - conjectured_baseline(n, lambda)?).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub lambda_star: f64,
    pub g_star: f64,
    /// Physical energy `ωẼ`.
    #[serde(rename = "E_star")]
    pub energy: f64,
    pub energy_tilde: f64,
    pub sector_a: SectorLabel,
    pub sector_b: SectorLabel,
    pub level_a: usize,
    pub level_b: usize,
    pub parity_a: Parity,
    pub parity_b: Parity,
    /// Largest distance of a measured `⟨Π⟩` from its label.
    pub parity_deviation: f64,
    pub described: bool,
    pub nearest_baseline: BaselineRef,
    pub baseline_distance: f64,
}

fn sector_parity(table: &SpectrumTable, c: &Crossing, sector: SectorLabel, level: usize) -> Result<(Parity, f64)> {
    let mut labels = Vec::with_capacity(2);
    for lambda in [c.lambda - LABEL_OFFSET, c.lambda + LABEL_OFFSET] {
        let target = table.sector_level(sector, level, lambda)?;
        labels.push(parity_label(&table.params_at(lambda)?, target, lambda, table.n_max)?);
    }
    if labels[0].0 != labels[1].0 {
        return Err(Error::InconsistentParity {
            sector: sector.to_string(),
            lambda: c.lambda,
        });
    }
    Ok((labels[0].0, labels[0].1.max(labels[1].1)))
}

/// Attaches parities, the described flag and the nearest baseline.
pub fn label_crossings(table: &SpectrumTable, crossings: &[Crossing]) -> Result<Vec<CrossingRecord>> {
    let labelled = crate::par_map(crossings, |c| -> Result<CrossingRecord> {
        let (parity_a, dev_a) = sector_parity(table, c, c.sector_a, c.level_a)?;
        let (parity_b, dev_b) = sector_parity(table, c, c.sector_b, c.level_b)?;
        let described = described_by_parity(parity_a, parity_b);
        let (nearest_baseline, baseline_distance) = if described {
            nearest_juddian_baseline(c.lambda, c.energy_tilde)?
        } else {
            nearest_conjectured_baseline(c.lambda, c.energy_tilde)?
        };
        Ok(CrossingRecord {
            lambda_star: c.lambda,
            g_star: c.lambda * table.omega / 2.0,
            energy: c.energy_tilde * table.omega,
            energy_tilde: c.energy_tilde,
            sector_a: c.sector_a,
            sector_b: c.sector_b,
            level_a: c.level_a,
            level_b: c.level_b,
            parity_a,
            parity_b,
            parity_deviation: dev_a.max(dev_b),
            described,
            nearest_baseline,
            baseline_distance,
        })
    });
    labelled.into_iter().collect()
}

/// Published classification of crossings by parity pair, rows and columns in
/// [`Parity::ALL`] order: `Some(true)` described, `Some(false)` not
/// described, `None` no such crossing.
pub const REFERENCE_PARITY_TABLE: [[Option<bool>; 4]; 4] = [
    [None, Some(false), Some(true), Some(false)],
    [Some(false), None, Some(false), Some(true)],
    [Some(true), Some(false), None, Some(false)],
    [Some(false), Some(true), Some(false), None],
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    /// Symmetric counts of observed parity pairs.
    pub pair_counts: [[usize; 4]; 4],
    pub described: usize,
    pub undescribed: usize,
    /// Largest distance of a described crossing from a Juddian baseline.
    pub max_described_distance: f64,
    /// Largest distance of an undescribed crossing from a conjectured baseline.
    pub max_undescribed_distance: f64,
    pub max_parity_deviation: f64,
    /// Observed pairs whose described flag contradicts the reference table,
    /// including pairs the table says never cross.
    pub reference_mismatches: usize,
}

impl Classification {
    /// Cell text for the observed 4×4 table: `y`, `n` or `-` when unobserved.
    pub fn cell(&self, a: Parity, b: Parity) -> &'static str {
        if self.pair_counts[a.index()][b.index()] == 0 {
            "-"
        } else if described_by_parity(a, b) {
            "y"
        } else {
            "n"
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::from("      +1   +i   -1   -i\n");
        for a in Parity::ALL {
            out.push_str(&format!("{:>3} ", a.label()));
            for b in Parity::ALL {
                let count = self.pair_counts[a.index()][b.index()];
                out.push_str(&format!(" {}{:<3}", self.cell(a, b), if count > 0 { count.to_string() } else { String::new() }));
            }
            out.push('\n');
        }
        out
    }
}

/// Tallies parity pairs and cross-checks the parity rule against the
/// Bargmann rule (described iff both sectors share `k`).
pub fn classify(records: &[CrossingRecord]) -> Result<Classification> {
    let mut summary = Classification {
        pair_counts: [[0; 4]; 4],
        described: 0,
        undescribed: 0,
        max_described_distance: 0.0,
        max_undescribed_distance: 0.0,
        max_parity_deviation: 0.0,
        reference_mismatches: 0,
    };
    for r in records {
        if r.described != (r.sector_a.k == r.sector_b.k) {
            return Err(Error::RuleDisagreement { lambda: r.lambda_star });
        }
        let (a, b) = (r.parity_a.index(), r.parity_b.index());
        summary.pair_counts[a][b] += 1;
        if a != b {
            summary.pair_counts[b][a] += 1;
        }
        if REFERENCE_PARITY_TABLE[a][b] != Some(r.described) {
            summary.reference_mismatches += 1;
        }
        summary.max_parity_deviation = summary.max_parity_deviation.max(r.parity_deviation);
        if r.described {
            summary.described += 1;
            summary.max_described_distance = summary.max_described_distance.max(r.baseline_distance);
        } else {
            summary.undescribed += 1;
            summary.max_undescribed_distance = summary.max_undescribed_distance.max(r.baseline_distance);
        }
    }
    Ok(summary)
}

/// Scan, detect, label and classify in one go.
pub fn run(config: &ScanConfig) -> Result<(SpectrumTable, Vec<CrossingRecord>, Classification)> {
    let table = scan(config)?;
    let crossings = detect_crossings(&table)?;
    let records = label_crossings(&table, &crossings)?;
    let summary = classify(&records)?;
    Ok((table, records, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eig_banded;
    use crate::hamiltonian::{full_spectrum, sector_union_spectrum, SectorSpin};
    use crate::juddian::{find_points, RootSearch};
    use crate::su11::BargmannIndex;

    fn resonant() -> ModelParams {
        ModelParams::derive(0.5, 1.0, 0.0).unwrap()
    }

    #[test]
    fn parity_rounding() {
        assert_eq!(Parity::round(Complex64::new(0.9, 0.1)).0, Parity::PlusOne);
        assert_eq!(Parity::round(Complex64::new(0.0, -1.0)), (Parity::MinusI, 0.0));
        assert!(described_by_parity(Parity::PlusOne, Parity::MinusOne));
        assert!(described_by_parity(Parity::PlusI, Parity::MinusI));
        assert!(!described_by_parity(Parity::PlusOne, Parity::PlusI));
        assert!(!described_by_parity(Parity::MinusI, Parity::MinusI));
        for a in Parity::ALL {
            for b in Parity::ALL {
                let expected = if a == b { None } else { Some(described_by_parity(a, b)) };
                assert_eq!(REFERENCE_PARITY_TABLE[a.index()][b.index()], expected);
            }
        }
    }

    #[test]
    fn uncoupled_ground_state() {
        let p = resonant();
        let config = ScanConfig {
            window: (0.0, 0.1),
            grid: 3,
            levels: 4,
            truncation: Truncation::Fixed(60),
            ..ScanConfig::new(p)
        };
        let table = scan(&config).unwrap();
        let ground = (0..4).map(|s| table.levels[s][0][0]).fold(f64::INFINITY, f64::min);
        let full = full_spectrum(&p, 60, 1).unwrap()[0];
        assert_eq!(ground, -1.0);
        assert!((ground - full).abs() < 1e-14);
        // Physical ground energy −ω ω̃ = −ω0/2.
        assert_eq!(ground * table.omega, -0.5);
    }

    #[test]
    fn uncoupled_parities() {
        // |0⟩⊗|↓z⟩ has Π = +1, |1⟩⊗|↓z⟩ has Π = +i.
        let p = ModelParams::from_rescaled(1.0, 1.0, 0.0).unwrap();
        let (parity, dev) = parity_label(&p, -1.0, 0.0, 20).unwrap();
        assert_eq!(parity, Parity::PlusOne);
        assert!(dev < 1e-12);
        let detuned = ModelParams::from_rescaled(1.0, 0.3, 0.0).unwrap();
        let (parity, dev) = parity_label(&detuned, 1.0 - 0.3, 0.0, 20).unwrap();
        assert_eq!(parity, Parity::PlusI);
        assert!(dev < 1e-12);
    }

    #[test]
    fn sector_union_on_grid() {
        let p = resonant();
        let config = ScanConfig {
            grid: 5,
            truncation: Truncation::Fixed(200),
            ..ScanConfig::new(p)
        };
        let table = scan(&config).unwrap();
        for (i, &lambda) in table.lambdas.iter().enumerate() {
            let params = p.with_lambda(lambda).unwrap();
            let mut union: Vec<f64> = (0..4).flat_map(|s| table.levels[s][i].clone()).collect();
            union.sort_by(f64::total_cmp);
            let full = full_spectrum(&params, 200, 12).unwrap();
            for (a, b) in union.iter().zip(&full) {
                assert!((a - b).abs() < 1e-10);
            }
            assert_eq!(&union[..12], &sector_union_spectrum(&params, 200, 12).unwrap()[..]);
        }
    }

    #[test]
    fn levels_within_sector_never_cross() {
        let config = ScanConfig {
            grid: 50,
            truncation: Truncation::Fixed(200),
            ..ScanConfig::new(resonant())
        };
        let table = scan(&config).unwrap();
        for s in 0..4 {
            for row in &table.levels[s] {
                assert!(row.windows(2).all(|w| w[0] < w[1]));
            }
        }
        for c in detect_crossings(&table).unwrap() {
            assert_ne!(c.sector_a, c.sector_b);
        }
    }

    #[test]
    fn parity_per_sector_is_constant() {
        // Each sector carries one parity; a small sweep shows it.
        let p = resonant();
        let n_max = 120;
        for label in SectorLabel::ALL {
            let mut seen = Vec::new();
            for &lambda in &[0.05, 0.2, 0.35] {
                let params = p.with_lambda(lambda).unwrap();
                let m = build_sector(&params, label, sector_m_max(label.k, n_max).unwrap()).unwrap();
                for level in 0..3 {
                    let e = tridiagonal_eigenvalue(&m.diag, &m.offdiag, level).unwrap();
                    seen.push(parity_label(&params, e, lambda, n_max).unwrap().0);
                }
            }
            assert!(seen.windows(2).all(|w| w[0] == w[1]), "{label}: {seen:?}");
            let squared = seen[0].squared();
            let expected = if label.k == BargmannIndex::Quarter { 1 } else { -1 };
            assert_eq!(squared, expected);
        }
    }

    #[test]
    fn juddian_point_is_a_described_crossing() {
        let p = resonant();
        let config = ScanConfig {
            window: (0.3, 0.4),
            grid: 60,
            levels: 6,
            truncation: Truncation::Fixed(300),
            ..ScanConfig::new(p)
        };
        let (_, records, summary) = run(&config).unwrap();
        let point = &find_points(2, &p, &RootSearch::default()).unwrap()[0];
        let hit = records
            .iter()
            .find(|r| (r.lambda_star - point.lambda).abs() < 1e-7)
            .expect("crossing at the N = 2 point");
        assert!(hit.described);
        assert!((hit.energy_tilde - point.energy_tilde).abs() < 1e-6);
        assert_eq!(hit.nearest_baseline, BaselineRef::Juddian(2));
        assert!(summary.reference_mismatches == 0);
        assert!(summary.max_parity_deviation < PARITY_TOL);
    }

    #[test]
    fn classification_rules() {
        let rec = |pa, pb, ka, kb| CrossingRecord {
            lambda_star: 0.1,
            g_star: 0.05,
            energy: 1.0,
            energy_tilde: 1.0,
            sector_a: SectorLabel::new(SectorSpin::Plus, ka),
            sector_b: SectorLabel::new(SectorSpin::Minus, kb),
            level_a: 0,
            level_b: 0,
            parity_a: pa,
            parity_b: pb,
            parity_deviation: 0.0,
            described: described_by_parity(pa, pb),
            nearest_baseline: BaselineRef::Juddian(2),
            baseline_distance: 0.0,
        };
        let q = BargmannIndex::Quarter;
        let t = BargmannIndex::ThreeQuarters;
        let s = classify(&[rec(Parity::PlusOne, Parity::MinusOne, q, q), rec(Parity::PlusOne, Parity::PlusI, q, t)]).unwrap();
        assert_eq!((s.described, s.undescribed), (1, 1));
        assert_eq!(s.cell(Parity::PlusOne, Parity::MinusOne), "y");
        assert_eq!(s.cell(Parity::PlusI, Parity::PlusOne), "n");
        assert_eq!(s.cell(Parity::PlusOne, Parity::PlusOne), "-");
        assert!(s.render().lines().count() == 5);
        assert!(matches!(
            classify(&[rec(Parity::PlusOne, Parity::MinusOne, q, t)]),
            Err(Error::RuleDisagreement { .. })
        ));
    }

    #[test]
    fn baseline_lookup() {
        let lambda = 0.3;
        let e = baseline(4, lambda).unwrap();
        assert_eq!(nearest_juddian_baseline(lambda, e).unwrap(), (BaselineRef::Juddian(4), 0.0));
        let c = conjectured_baseline(5, lambda).unwrap() + 1e-5;
        let (b, d) = nearest_conjectured_baseline(lambda, c).unwrap();
        assert_eq!(b, BaselineRef::Conjectured(5));
        assert!((d - 1e-5).abs() < 1e-12);
        assert_eq!(BaselineRef::Conjectured(5).to_string(), "conjectured:5");
    }

    #[test]
    fn scan_validation() {
        let p = resonant();
        assert!(scan(&ScanConfig { window: (0.3, 0.3), ..ScanConfig::new(p) }).is_err());
        assert!(scan(&ScanConfig { window: (0.1, 0.5), ..ScanConfig::new(p) }).is_err());
        assert!(scan(&ScanConfig { levels: 1, ..ScanConfig::new(p) }).is_err());
    }

    #[test]
    fn full_and_labelled_vectors_agree() {
        // The labelled eigenvector is a genuine eigenvector of the full matrix.
        let p = resonant().with_lambda(0.2).unwrap();
        let full = build_full(&p, 100).unwrap();
        let values = eig_banded(&full.matrix, false, Some(5)).unwrap().values;
        for &v in &values {
            let pair = nearest_eigenpair(&full.matrix, v).unwrap();
            assert!((pair.value - v).abs() < 1e-10);
        }
    }
}

//! One function per subcommand. Each writes its table first and only then
//! reports a failed check, so partial results are never lost.

use std::fmt;
use std::io;

use tprh::crossings::{self, ScanConfig, Truncation};
use tprh::eigen::{converged_spectrum, lowest_levels, Model};
use tprh::hamiltonian::{SectorLabel, SpinX, DEFAULT_N_MAX};
use tprh::juddian::{
    self, baseline, conjectured_baseline, find_all_points, mirror_solution, overlap, verify_point, JuddianPoint,
    RootSearch, VERIFY_N_MAX,
};
use tprh::params::big_omega;
use tprh::reference::{self, REFERENCE_OMEGA, REFERENCE_OMEGA0, REFERENCE_TOL};
use tprh::squeezed::degenerate_energy;
use tprh::{Error, ModelParams};

use crate::output::{companion_path, emit, sig12, Cell, Table};
use crate::{
    Basis, Command, Couplings, CrossingsArgs, DegenerateArgs, JuddArgs, Physics, SpectrumArgs, Table1Args,
};

/// Default tolerance of `--auto-converge`.
const AUTO_TOL: f64 = 1e-10;
/// Default tolerance of the degenerate-model convergence.
const DEGENERATE_TOL: f64 = 1e-12;
/// Analytic and numeric degenerate levels further apart than this are flagged.
const BREAKDOWN_TOL: f64 = 1e-9;
/// Partner states with a larger normalised overlap count as dependent.
const DEPENDENT_OVERLAP: f64 = 1.0 - 1e-6;
const DEFAULT_WINDOW: (f64, f64) = (0.02, 0.45);
const DEFAULT_DEGENERATE_LAMBDAS: [f64; 4] = [0.1, 0.2, 0.3, 0.4];

#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration, exit status 2.
    Usage(String),
    /// A verification or comparison failed, exit status 1.
    Check(String),
    /// Anything else that stopped the run, exit status 1.
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) | Failure::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::OutsideValidity { .. }
            | Error::OrderTooLow(_)
            | Error::NotNormalisable { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("I/O error: {e}"))
    }
}

type Outcome = Result<(), Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Spectrum(a) => spectrum(&a),
        Command::Table1(a) => table1(&a),
        Command::Judd(a) => judd(&a),
        Command::Degenerate(a) => degenerate(&a),
        Command::Crossings(a) => crossings(&a),
    }
}

fn base_params(physics: &Physics) -> Result<ModelParams, Failure> {
    Ok(ModelParams::derive_unchecked(physics.omega, physics.omega0, 0.0)?)
}

fn check_window(window: (f64, f64)) -> Outcome {
    let (a, b) = window;
    if !(a < b) {
        return Err(Failure::Usage(format!("empty coupling window ({a}, {b})")));
    }
    if !(a >= 0.0 && b < 0.5) {
        return Err(Failure::Usage(format!(
            "coupling window ({a}, {b}) must lie within [0, 1/2)"
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<f64, Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(tol)
    } else {
        Err(Failure::Usage(format!("tolerances must be positive, got {tol}")))
    }
}

fn truncation(basis: &Basis) -> Result<Truncation, Failure> {
    if basis.auto_converge {
        return Ok(Truncation::Auto {
            tol: check_tol(basis.tol.unwrap_or(AUTO_TOL))?,
        });
    }
    if basis.tol.is_some() {
        return Err(Failure::Usage("--tol needs --auto-converge".into()));
    }
    Ok(Truncation::Fixed(basis.nmax.unwrap_or(DEFAULT_N_MAX)))
}

/// The explicit coupling list as λ values, or `None` when neither flag was given.
fn coupling_list(couplings: &Couplings, omega: f64) -> Result<Option<Vec<f64>>, Failure> {
    if !couplings.lambda.is_empty() {
        return Ok(Some(couplings.lambda.clone()));
    }
    if !couplings.g.is_empty() {
        return Ok(Some(couplings.g.iter().map(|g| 2.0 * g / omega).collect()));
    }
    Ok(None)
}

fn truncation_trailer(t: Truncation, n_max: usize) -> Vec<(&'static str, String)> {
    match t {
        Truncation::Fixed(_) => vec![("n_max", n_max.to_string())],
        Truncation::Auto { tol } => vec![("n_max", n_max.to_string()), ("auto_tol", sig12(tol))],
    }
}

fn common_trailer(command: &str, p: &ModelParams) -> Vec<(&'static str, String)> {
    vec![
        ("command", command.to_string()),
        ("omega", sig12(p.omega)),
        ("omega0", sig12(p.omega0)),
        ("omega_tilde", sig12(p.omega_tilde)),
    ]
}

fn spectrum(args: &SpectrumArgs) -> Outcome {
    let base = base_params(&args.physics)?;
    let truncation = truncation(&args.basis)?;
    if args.levels == 0 {
        return Err(Failure::Usage("--levels must be at least 1".into()));
    }
    let mut trailer = common_trailer("spectrum", &base);
    let (lambdas, levels, n_max) = match coupling_list(&args.couplings, base.omega)? {
        Some(lambdas) => {
            let (levels, n_max) = spectrum_at(&base, &lambdas, args.levels, truncation)?;
            trailer.push(("lambda", lambdas.iter().map(|l| sig12(*l)).collect::<Vec<_>>().join(";")));
            (lambdas, levels, n_max)
        }
        None => {
            let window = args.window.unwrap_or(DEFAULT_WINDOW);
            check_window(window)?;
            let config = ScanConfig {
                params: base,
                window,
                grid: args.grid,
                levels: args.levels,
                truncation,
            };
            let table = crossings::scan(&config)?;
            trailer.push(("window", format!("{},{}", sig12(window.0), sig12(window.1))));
            trailer.push(("grid", args.grid.to_string()));
            (table.lambdas, table.levels, table.n_max)
        }
    };
    trailer.push(("levels", args.levels.to_string()));
    trailer.extend(truncation_trailer(truncation, n_max));

    let mut table = Table::new(
        &["lambda", "g", "sector_M", "sector_k", "level_index", "energy_physical", "energy_rescaled"],
        trailer.clone(),
    );
    for (i, &lambda) in lambdas.iter().enumerate() {
        for (s, label) in SectorLabel::ALL.iter().enumerate() {
            for (l, &e) in levels[s][i].iter().enumerate() {
                table.push(vec![
                    lambda.into(),
                    base.g_of_lambda(lambda).into(),
                    label.m.as_i8().into(),
                    label.k.value().into(),
                    l.into(),
                    base.to_physical_energy(e).into(),
                    e.into(),
                ]);
            }
        }
    }
    emit(&table, args.output.format, args.output.out.as_deref())?;

    if let Some(path) = &args.output.out {
        let e_max = (0..4).map(|s| levels[s][0].last().copied().unwrap_or(0.0)).fold(f64::MIN, f64::max);
        let baselines = baseline_table(&base, &lambdas, e_max, trailer)?;
        emit(&baselines, args.output.format, Some(&companion_path(path, "baselines", args.output.format)))?;
    }
    Ok(())
}

/// Sector levels at arbitrary couplings, `levels[s][i][l]`, and the largest cut-off used.
fn spectrum_at(
    base: &ModelParams,
    lambdas: &[f64],
    levels: usize,
    truncation: Truncation,
) -> Result<(Vec<Vec<Vec<f64>>>, usize), Failure> {
    let mut out = vec![Vec::with_capacity(lambdas.len()); 4];
    let mut n_used = 0;
    for &lambda in lambdas {
        let p = base.with_lambda(lambda)?;
        for (s, &label) in SectorLabel::ALL.iter().enumerate() {
            let values = match truncation {
                Truncation::Fixed(n_max) => {
                    n_used = n_used.max(n_max);
                    lowest_levels(Model::Sector(label), &p, n_max, levels)?
                }
                Truncation::Auto { tol } => {
                    let r = converged_spectrum(Model::Sector(label), &p, levels, tol)?;
                    n_used = n_used.max(r.n_max);
                    r.values
                }
            };
            out[s].push(values);
        }
    }
    Ok((out, n_used))
}

/// Juddian and conjectured baselines that start inside the plotted energy
/// range at the first coupling.
fn baseline_table(
    base: &ModelParams,
    lambdas: &[f64],
    e_max: f64,
    trailer: Vec<(&'static str, String)>,
) -> Result<Table, Failure> {
    let mut table = Table::new(
        &["lambda", "g", "family", "n", "energy_physical", "energy_rescaled"],
        trailer,
    );
    let first = lambdas.first().copied().unwrap_or(0.0);
    let families: [(&str, fn(usize, f64) -> tprh::Result<f64>); 2] =
        [("juddian", baseline), ("conjectured", conjectured_baseline)];
    for (family, curve) in families {
        let mut n = 2;
        while curve(n, first)? <= e_max {
            for &lambda in lambdas {
                let e = curve(n, lambda)?;
                table.push(vec![
                    lambda.into(),
                    base.g_of_lambda(lambda).into(),
                    family.into(),
                    n.into(),
                    base.to_physical_energy(e).into(),
                    e.into(),
                ]);
            }
            n += 1;
        }
    }
    Ok(table)
}

fn search(window: Option<(f64, f64)>, grid: usize) -> Result<RootSearch, Failure> {
    let mut search = RootSearch {
        grid,
        ..RootSearch::default()
    };
    if let Some(w) = window {
        check_window(w)?;
        search.window = w;
    }
    Ok(search)
}

/// Full-basis residual, keeping the value when it is over threshold.
fn residual(point: &JuddianPoint, n_max: usize) -> Result<(f64, bool), Failure> {
    match verify_point(point, n_max) {
        Ok(v) => Ok((v.residual, true)),
        Err(Error::VerificationFailed { residual, .. }) => Ok((residual, false)),
        Err(e) => Err(e.into()),
    }
}

fn table1(args: &Table1Args) -> Outcome {
    let params = base_params(&args.physics)?;
    let tol = check_tol(args.tol.unwrap_or(REFERENCE_TOL))?;
    let n_max = args.nmax.unwrap_or(VERIFY_N_MAX);
    let points = find_all_points(2..=7, &params, &search(None, args.grid)?)?;

    let mut trailer = common_trailer("table1", &params);
    trailer.extend([
        ("grid", args.grid.to_string()),
        ("n_max", n_max.to_string()),
        ("compare_tol", sig12(tol)),
    ]);
    let mut table = Table::new(
        &["N", "g", "E", "lambda", "E_rescaled", "det_residual", "wavefunction_residual"],
        trailer,
    );
    let mut unverified = 0;
    for p in &points {
        let (res, ok) = residual(p, n_max)?;
        unverified += usize::from(!ok);
        table.push(vec![
            p.order.into(),
            p.g.into(),
            p.energy.into(),
            p.lambda.into(),
            p.energy_tilde.into(),
            p.determinant_residual.into(),
            res.into(),
        ]);
    }
    emit(&table, args.output.format, args.output.out.as_deref())?;

    if unverified > 0 {
        return Err(Failure::Check(format!("{unverified} points failed the wavefunction check")));
    }
    let at_reference = params.omega == REFERENCE_OMEGA && params.omega0 == REFERENCE_OMEGA0;
    if !at_reference {
        eprintln!("{} points found; reference comparison only applies at omega = 0.5, omega0 = 1", points.len());
        return Ok(());
    }
    let comparison = reference::compare(&points, tol);
    let matched = comparison.rows.iter().filter(|r| r.matches).count();
    eprintln!("{matched} of {} reference rows match to {} relative", comparison.rows.len(), sig12(tol));
    for r in comparison.rows.iter().filter(|r| !r.matches) {
        eprintln!(
            "  N={} reference g={} E={} computed g={} E={} relative errors g={:.3e} E={:.3e}",
            r.reference.order,
            sig12(r.reference.g),
            sig12(r.reference.energy),
            r.computed_g.map_or("-".into(), sig12),
            r.computed_energy.map_or("-".into(), sig12),
            r.g_rel_error,
            r.energy_rel_error,
        );
    }
    if comparison.unmatched_computed > 0 {
        eprintln!("  {} computed points have no reference row", comparison.unmatched_computed);
    }
    if comparison.all_match() {
        Ok(())
    } else {
        Err(Failure::Check("computed points differ from the reference table".into()))
    }
}

fn judd(args: &JuddArgs) -> Outcome {
    let (lo, hi) = args.n_range;
    if lo < 2 {
        return Err(Failure::Usage("the minimum value of N is 2".into()));
    }
    if lo > hi {
        return Err(Failure::Usage(format!("empty N range {lo},{hi}")));
    }
    let params = base_params(&args.physics)?;
    let search = search(args.window, args.grid)?;
    let n_max = args.nmax.unwrap_or(VERIFY_N_MAX);
    let points = find_all_points(lo..=hi, &params, &search)?;

    let mut trailer = common_trailer("judd", &params);
    trailer.extend([
        ("N_range", format!("{lo},{hi}")),
        ("window", format!("{},{}", sig12(search.window.0), sig12(search.window.1))),
        ("grid", args.grid.to_string()),
        ("root_tol", sig12(search.tol)),
    ]);
    let mut columns = vec![
        "N", "g", "E", "lambda", "E_rescaled", "det_residual", "consistency_residual", "at_window_edge", "p", "q",
    ];
    if args.verify {
        columns.extend(["wavefunction_residual", "mirror_residual", "partner_overlap"]);
        trailer.extend([("n_max", n_max.to_string()), ("verify_threshold", sig12(juddian::VERIFY_THRESHOLD))]);
    }
    let mut table = Table::new(&columns, trailer);
    let mut failures = Vec::new();
    for p in &points {
        let mut row: Vec<Cell> = vec![
            p.order.into(),
            p.g.into(),
            p.energy.into(),
            p.lambda.into(),
            p.energy_tilde.into(),
            p.determinant_residual.into(),
            p.consistency_residual.into(),
            p.at_window_edge.into(),
            p.p.clone().into(),
            p.q.clone().into(),
        ];
        if args.verify {
            let partner = mirror_solution(p);
            let (own, own_ok) = residual(p, n_max)?;
            let (mirror, mirror_ok) = residual(&partner, n_max)?;
            let ov = overlap(p, &partner, n_max)?;
            if !(own_ok && mirror_ok && ov < DEPENDENT_OVERLAP) {
                failures.push(format!("N={} lambda={}", p.order, sig12(p.lambda)));
            }
            row.extend([own.into(), mirror.into(), ov.into()]);
        }
        table.push(row);
    }
    emit(&table, args.output.format, args.output.out.as_deref())?;
    eprintln!("{} Juddian points for N = {lo}..{hi}", points.len());
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("verification failed at {}", failures.join(", "))))
    }
}

fn degenerate(args: &DegenerateArgs) -> Outcome {
    let base = ModelParams::derive_unchecked(args.omega, 0.0, 0.0)?;
    let tol = check_tol(args.tol.unwrap_or(DEGENERATE_TOL))?;
    if args.levels == 0 {
        return Err(Failure::Usage("--levels must be at least 1".into()));
    }
    let lambdas = coupling_list(&args.couplings, base.omega)?.unwrap_or(DEFAULT_DEGENERATE_LAMBDAS.to_vec());
    // Reject the whole list up front so no partial table is written.
    let params: Vec<ModelParams> = lambdas.iter().map(|&l| base.with_lambda(l)).collect::<Result<_, _>>()?;

    let mut trailer = common_trailer("degenerate", &base);
    trailer.extend([
        ("levels", args.levels.to_string()),
        ("tol", sig12(tol)),
        ("breakdown_tol", sig12(BREAKDOWN_TOL)),
    ]);
    let mut table = Table::new(
        &[
            "lambda",
            "g",
            "big_omega",
            "level_index",
            "energy_analytic",
            "energy_numeric",
            "difference",
            "energy_physical",
            "n_max",
            "breakdown",
        ],
        trailer,
    );
    let mut worst = 0.0f64;
    for p in &params {
        let numeric = match converged_spectrum(Model::Degenerate(SpinX::Plus), p, args.levels, tol) {
            Ok(r) => Some(r),
            Err(Error::TruncationNotConverged { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        for n in 0..args.levels {
            let analytic = degenerate_energy(n, p.lambda)?;
            let value = numeric.as_ref().map_or(f64::NAN, |r| r.values[n]);
            let difference = value - analytic;
            let breakdown = !(difference.abs() <= BREAKDOWN_TOL);
            if !breakdown {
                worst = worst.max(difference.abs());
            }
            table.push(vec![
                p.lambda.into(),
                p.g.into(),
                big_omega(p.lambda)?.into(),
                n.into(),
                analytic.into(),
                value.into(),
                difference.into(),
                p.to_physical_energy(analytic).into(),
                numeric.as_ref().map_or(0, |r| r.n_max).into(),
                breakdown.into(),
            ]);
        }
    }
    emit(&table, args.output.format, args.output.out.as_deref())?;
    eprintln!("max |analytic - numeric| over converged levels: {worst:.3e}");
    Ok(())
}

fn crossings(args: &CrossingsArgs) -> Outcome {
    let params = base_params(&args.physics)?;
    let window = args.window.unwrap_or(DEFAULT_WINDOW);
    check_window(window)?;
    let truncation = truncation(&args.basis)?;
    let config = ScanConfig {
        params,
        window,
        grid: args.grid,
        levels: args.levels,
        truncation,
    };
    let (scan, records, summary) = crossings::run(&config)?;

    let mut trailer = common_trailer("crossings", &params);
    trailer.extend([
        ("window", format!("{},{}", sig12(window.0), sig12(window.1))),
        ("grid", args.grid.to_string()),
        ("levels", args.levels.to_string()),
        ("refine_tol", sig12(crossings::REFINE_TOL)),
        ("parity_tol", sig12(crossings::PARITY_TOL)),
    ]);
    trailer.extend(truncation_trailer(truncation, scan.n_max));
    let mut table = Table::new(
        &[
            "lambda_star",
            "g_star",
            "E_star",
            "E_star_rescaled",
            "M_a",
            "k_a",
            "level_a",
            "M_b",
            "k_b",
            "level_b",
            "parity_a",
            "parity_b",
            "parity_deviation",
            "described",
            "nearest_baseline",
            "baseline_distance",
        ],
        trailer,
    );
    for r in &records {
        table.push(vec![
            r.lambda_star.into(),
            r.g_star.into(),
            r.energy.into(),
            r.energy_tilde.into(),
            r.sector_a.m.as_i8().into(),
            r.sector_a.k.value().into(),
            r.level_a.into(),
            r.sector_b.m.as_i8().into(),
            r.sector_b.k.value().into(),
            r.level_b.into(),
            r.parity_a.label().into(),
            r.parity_b.label().into(),
            r.parity_deviation.into(),
            r.described.into(),
            r.nearest_baseline.to_string().into(),
            r.baseline_distance.into(),
        ]);
    }
    emit(&table, args.output.format, args.output.out.as_deref())?;

    eprint!("{}", summary.render());
    eprintln!(
        "{} crossings: {} described (max baseline distance {:.3e}), {} undescribed (max distance {:.3e})",
        records.len(),
        summary.described,
        summary.max_described_distance,
        summary.undescribed,
        summary.max_undescribed_distance,
    );
    if summary.reference_mismatches > 0 {
        return Err(Failure::Check(format!(
            "{} crossings disagree with the reference parity table",
            summary.reference_mismatches
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::from(Error::OutsideValidity { lambda: 0.5 }).code(), 2);
        assert_eq!(Failure::from(Error::OrderTooLow(1)).code(), 2);
        assert_eq!(Failure::from(Error::RuleDisagreement { lambda: 0.1 }).code(), 1);
        assert_eq!(Failure::Check(String::new()).code(), 1);
    }

    #[test]
    fn windows() {
        assert!(check_window((0.02, 0.45)).is_ok());
        assert!(matches!(check_window((0.3, 0.3)), Err(Failure::Usage(m)) if m.contains("empty")));
        assert!(check_window((0.1, 0.5)).is_err());
        assert!(check_window((-0.1, 0.2)).is_err());
    }

    #[test]
    fn couplings_from_g() {
        let c = Couplings {
            lambda: vec![],
            g: vec![0.05, 0.1],
        };
        assert_eq!(coupling_list(&c, 0.5).unwrap(), Some(vec![0.2, 0.4]));
    }
}

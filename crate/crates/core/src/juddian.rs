//! Isolated exact (Juddian) solutions.
//!
//! The ansatz `|Ψ⟩ = Σₙ pₙ |n; σ⟩ ⊗ |+x⟩ + Σₘ qₘ |m; σ⟩ ⊗ |−x⟩`, with finite
//! sums over a single Fock parity chain, turns the eigenproblem into a small
//! homogeneous linear system in `(p, q)`. It has a solution with `p_N ≠ 0`
//! only on the baseline `Ẽ = −1/2 + (N + 1/2)Ω` and only at the couplings
//! where a compatibility determinant vanishes.
//!
//! Unknowns: `p` at chain indices `r, r+2, …, N` and `q` at `r, …, N−2`, with
//! `r = N mod 2`, in that order. Rows: one "A" row per `q` index then one
//! "B" row per `p` index:
//!
//! ```text
//! A(m): ω̃ q_m + (m − N) Ω p_m = 0
//! B(n): ω̃ p_n + [2n + 1 − (n + N + 1)Ω²]/Ω q_n
//!       − √(1 − Ω²)/Ω [√(n(n−1)) q_{n−2} + √((n+1)(n+2)) q_{n+2}] = 0
//! ```
//!
//! `p_N` appears only in `B(N)`, with coefficient `ω̃`, so the determinant of
//! the system is `±ω̃` times the minor without that row and column. The minor
//! is the compatibility condition: it is even in `ω̃`, a polynomial of degree
//! `⌊N/2⌋` in `Ω²`, and it is what [`determinant`] returns.

use serde::Serialize;

use crate::dense::Lu;
use crate::eigen::eigenvalues_near;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_full, FullMatrix, SpinX};
use crate::params::{big_omega, squeeze_params, ModelParams, SqueezeBranch};
use crate::squeezed::squeezed_number_state;

/// Truncation used by [`verify_point`] unless told otherwise.
pub const VERIFY_N_MAX: usize = 600;
/// Largest accepted `‖(H̃ − Ẽ)Ψ‖/‖Ψ‖` for an exact solution.
pub const VERIFY_THRESHOLD: f64 = 1e-8;
/// Largest N accepted by the polynomial fit.
pub const MAX_FIT_ORDER: usize = 12;

fn check_order(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::OrderTooLow(n));
    }
    Ok(())
}

/// `Ẽ = −1/2 + (N + 1/2)√(1 − 4λ²)`.
pub fn baseline(n: usize, lambda: f64) -> Result<f64> {
    check_order(n)?;
    Ok(-0.5 + (n as f64 + 0.5) * big_omega(lambda)?)
}

/// `Ẽ = −1/2 + n√(1 − 4λ²)`, the empirical lines through the crossings
/// the ansatz does not reach.
pub fn conjectured_baseline(n: usize, lambda: f64) -> Result<f64> {
    check_order(n)?;
    Ok(-0.5 + n as f64 * big_omega(lambda)?)
}

/// The linear system of one baseline at one coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct JuddianSystem {
    pub order: usize,
    pub omega_tilde: f64,
    /// `Ω²`
    pub omega_sq: f64,
    pub chain_parity: usize,
    pub p_indices: Vec<usize>,
    pub q_indices: Vec<usize>,
    /// Square, rows `A(q…)` then `B(p…)`, columns `p…` then `q…`.
    pub matrix: Vec<Vec<f64>>,
}

impl JuddianSystem {
    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Column of `q_m`, or `None` off the chain.
    pub fn q_column(&self, m: usize) -> Option<usize> {
        chain_slot(&self.q_indices, m).map(|i| self.p_indices.len() + i)
    }

    pub fn p_column(&self, n: usize) -> Option<usize> {
        chain_slot(&self.p_indices, n)
    }

    /// Column of `p_N`.
    pub fn pinned_column(&self) -> usize {
        self.p_indices.len() - 1
    }

    /// Row `B(N)`, the only row touching `p_N`.
    pub fn pinned_row(&self) -> usize {
        self.dim() - 1
    }

    /// The compatibility minor: rows and columns of `p_N` and `B(N)` removed.
    pub fn minor(&self) -> Vec<Vec<f64>> {
        let (row, col) = (self.pinned_row(), self.pinned_column());
        self.matrix
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != row)
            .map(|(_, r)| {
                r.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != col)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect()
    }

    /// Sign of the `p_N`, `B(N)` cofactor.
    pub fn cofactor_sign(&self) -> f64 {
        if (self.pinned_row() + self.pinned_column()) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Determinant of the whole square system: `ω̃ ×` [`determinant`] times
    /// [`JuddianSystem::cofactor_sign`].
    pub fn full_determinant(&self) -> f64 {
        scaled_determinant(self.matrix.clone())
    }
}

fn chain_slot(indices: &[usize], n: usize) -> Option<usize> {
    let first = *indices.first()?;
    if n < first || (n - first) % 2 != 0 {
        return None;
    }
    let slot = (n - first) / 2;
    (slot < indices.len()).then_some(slot)
}

/// Assembles the system at `Ω² = omega_sq`, which may be any value in `(0, 1]`.
fn assemble(order: usize, omega_tilde: f64, omega_sq: f64) -> JuddianSystem {
    let r = order % 2;
    let p_indices: Vec<usize> = (r..=order).step_by(2).collect();
    let q_indices: Vec<usize> = if order >= 2 { (r..=order - 2).step_by(2).collect() } else { Vec::new() };
    let dim = p_indices.len() + q_indices.len();
    let mut system = JuddianSystem {
        order,
        omega_tilde,
        omega_sq,
        chain_parity: r,
        p_indices,
        q_indices,
        matrix: vec![vec![0.0; dim]; dim],
    };
    let big = omega_sq.sqrt();
    let shear = (1.0 - omega_sq).max(0.0).sqrt() / big;
    let nq = system.q_indices.len();
    let mut rows = Vec::with_capacity(dim);
    for &m in &system.q_indices {
        let mut row = vec![0.0; dim];
        row[system.q_column(m).expect("q on chain")] = omega_tilde;
        row[system.p_column(m).expect("p on chain")] = (m as f64 - order as f64) * big;
        rows.push(row);
    }
    for &n in &system.p_indices {
        let mut row = vec![0.0; dim];
        let nf = n as f64;
        row[system.p_column(n).expect("p on chain")] = omega_tilde;
        if let Some(c) = system.q_column(n) {
            row[c] = (2.0 * nf + 1.0 - (nf + order as f64 + 1.0) * omega_sq) / big;
        }
        if n >= 2 {
            if let Some(c) = system.q_column(n - 2) {
                row[c] = -shear * (nf * (nf - 1.0)).sqrt();
            }
        }
        if let Some(c) = system.q_column(n + 2) {
            row[c] = -shear * ((nf + 1.0) * (nf + 2.0)).sqrt();
        }
        rows.push(row);
    }
    debug_assert_eq!(rows.len(), dim);
    debug_assert_eq!(nq + system.p_indices.len(), dim);
    system.matrix = rows;
    system
}

fn check_coupling(lambda: f64) -> Result<f64> {
    let omega = big_omega(lambda)?;
    if lambda == 0.0 {
        return Err(Error::InvalidParameter("the ansatz needs a nonzero coupling".into()));
    }
    Ok(omega)
}

pub fn build_system(order: usize, omega_tilde: f64, lambda: f64) -> Result<JuddianSystem> {
    check_order(order)?;
    if !omega_tilde.is_finite() {
        return Err(Error::InvalidParameter("omega_tilde must be finite".into()));
    }
    let omega = check_coupling(lambda)?;
    Ok(assemble(order, omega_tilde, omega * omega))
}

/// Pivoted LU on the row-equilibrated matrix, with the row scales restored.
fn scaled_determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let mut scale = 1.0;
    for row in a.iter_mut() {
        let m = row.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if m == 0.0 {
            return 0.0;
        }
        scale *= m;
        row.iter_mut().for_each(|x| *x /= m);
    }
    Lu::factor(a).determinant() * scale
}

/// Compatibility determinant at coupling `λ`; its zeros locate the Juddian points.
pub fn determinant(order: usize, omega_tilde: f64, lambda: f64) -> Result<f64> {
    let system = build_system(order, omega_tilde, lambda)?;
    Ok(scaled_determinant(system.minor()))
}

/// Compatibility determinant as a function of `x = Ω² ∈ (0, 1]`.
pub fn compatibility_at(order: usize, omega_tilde: f64, omega_sq: f64) -> Result<f64> {
    check_order(order)?;
    if !(omega_sq > 0.0 && omega_sq <= 1.0) {
        return Err(Error::InvalidParameter(format!("Ω² must lie in (0, 1], got {omega_sq}")));
    }
    Ok(scaled_determinant(assemble(order, omega_tilde, omega_sq).minor()))
}

/// Degree in `Ω²` of the compatibility polynomial of order `N`.
pub fn compatibility_degree(order: usize) -> usize {
    order / 2
}

/// Monic coefficients (ascending powers of `Ω²`) of the compatibility
/// polynomial, interpolated through `degree + 1` Chebyshev nodes on `(0, 1)`.
pub fn fit_compatibility_polynomial(order: usize, omega_tilde: f64) -> Result<Vec<f64>> {
    check_order(order)?;
    if order > MAX_FIT_ORDER {
        return Err(Error::InvalidParameter(format!(
            "polynomial fit supports N <= {MAX_FIT_ORDER}, got {order}"
        )));
    }
    let degree = compatibility_degree(order);
    let nodes = degree + 1;
    let mut vandermonde = Vec::with_capacity(nodes);
    let mut values = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let theta = (2 * j + 1) as f64 * std::f64::consts::PI / (2 * nodes) as f64;
        let x = 0.5 + 0.5 * theta.cos();
        vandermonde.push((0..nodes).map(|k| x.powi(k as i32)).collect::<Vec<f64>>());
        values.push(compatibility_at(order, omega_tilde, x)?);
    }
    let lu = Lu::factor(vandermonde);
    if lu.pivot_ratio() < 1e-12 {
        return Err(Error::Singular("interpolation nodes are rank deficient".into()));
    }
    let coeffs = lu
        .solve(&values)
        .ok_or_else(|| Error::Singular("interpolation failed".into()))?;
    let lead = coeffs[degree];
    let size = coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    if lead.abs() <= 1e-12 * size {
        return Err(Error::Singular(format!("leading coefficient vanishes for N = {order}")));
    }
    Ok(coeffs.into_iter().map(|c| c / lead).collect())
}

/// Grid-and-bisection settings for [`find_points`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSearch {
    pub window: (f64, f64),
    pub grid: usize,
    /// Bracket width at which bisection stops.
    pub tol: f64,
}

impl Default for RootSearch {
    fn default() -> Self {
        Self {
            window: (1e-4, 0.4999),
            grid: 2000,
            tol: 1e-15,
        }
    }
}

impl RootSearch {
    fn validate(&self) -> Result<()> {
        let (a, b) = self.window;
        if !(a > 0.0 && b < 0.5 && a < b) {
            return Err(Error::InvalidParameter(format!(
                "coupling window must satisfy 0 < a < b < 1/2, got ({a}, {b})"
            )));
        }
        if self.grid < 2 {
            return Err(Error::InvalidParameter("grid needs at least two points".into()));
        }
        if !(self.tol >= 1e-15) {
            return Err(Error::InvalidParameter(format!("tolerance must be >= 1e-15, got {}", self.tol)));
        }
        Ok(())
    }
}

/// An exact solution on the baseline of order `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JuddianPoint {
    #[serde(rename = "N")]
    pub order: usize,
    pub omega: f64,
    pub omega_tilde: f64,
    pub lambda: f64,
    pub g: f64,
    /// Physical energy `ωẼ`.
    pub energy: f64,
    pub energy_tilde: f64,
    /// `p` at chain indices `r, r+2, …, N`; `p_N = 1`.
    pub p: Vec<f64>,
    /// `q` at chain indices `r, …, N−2`.
    pub q: Vec<f64>,
    /// Compatibility determinant at the returned coupling.
    pub determinant_residual: f64,
    /// Relative residual of the equation left out when solving for `(p, q)`.
    pub consistency_residual: f64,
    pub at_window_edge: bool,
    /// Partner solution: components swapped and the opposite squeezing branch.
    pub mirrored: bool,
}

impl JuddianPoint {
    pub fn chain_parity(&self) -> usize {
        self.order % 2
    }

    /// Squeezing parameter of the `|n; s⟩` states in the wavefunction.
    pub fn squeeze(&self) -> Result<f64> {
        let branch = if self.mirrored { SqueezeBranch::Judd } else { SqueezeBranch::Degenerate };
        Ok(squeeze_params(self.lambda, branch)?.sigma)
    }
}

/// Solves the system with `p_N = 1`, leaving out the row that makes the
/// remaining square system best conditioned. Returns `(p, q, residual)`.
fn solve_pinned(system: &JuddianSystem) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let dim = system.dim();
    let pin = system.pinned_column();
    let rows: Vec<Vec<f64>> = system
        .matrix
        .iter()
        .map(|r| {
            let m = r.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
            r.iter().map(|x| if m > 0.0 { x / m } else { 0.0 }).collect()
        })
        .collect();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for drop in 0..dim {
        let mut a = Vec::with_capacity(dim - 1);
        let mut rhs = Vec::with_capacity(dim - 1);
        for (i, row) in rows.iter().enumerate() {
            if i == drop {
                continue;
            }
            a.push(row.iter().enumerate().filter(|&(j, _)| j != pin).map(|(_, &v)| v).collect::<Vec<f64>>());
            rhs.push(-row[pin]);
        }
        let lu = Lu::factor(a);
        let ratio = lu.pivot_ratio();
        if best.as_ref().is_some_and(|(r, _, _)| *r >= ratio) {
            continue;
        }
        if let Some(y) = lu.solve(&rhs) {
            best = Some((ratio, drop, y));
        }
    }
    let (_, drop, y) = best.ok_or_else(|| Error::Singular("no solvable pinned system".into()))?;
    let mut x = y;
    x.insert(pin, 1.0);
    let residual = rows[drop].iter().zip(&x).map(|(a, b)| a * b).sum::<f64>().abs()
        / x.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let q = x.split_off(system.p_indices.len());
    Ok((x, q, residual))
}

/// Builds the point record at a given root.
pub fn point_at(order: usize, params: &ModelParams, lambda: f64, at_window_edge: bool) -> Result<JuddianPoint> {
    let system = build_system(order, params.omega_tilde, lambda)?;
    let (p, q, consistency_residual) = solve_pinned(&system)?;
    let energy_tilde = baseline(order, lambda)?;
    Ok(JuddianPoint {
        order,
        omega: params.omega,
        omega_tilde: params.omega_tilde,
        lambda,
        g: params.g_of_lambda(lambda),
        energy: params.to_physical_energy(energy_tilde),
        energy_tilde,
        p,
        q,
        determinant_residual: scaled_determinant(system.minor()),
        consistency_residual,
        at_window_edge,
        mirrored: false,
    })
}

fn bisect(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut f_lo: f64, tol: f64) -> Result<f64> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Couplings in the search window where the compatibility determinant of
/// order `N` changes sign, ascending.
pub fn find_roots(order: usize, omega_tilde: f64, search: &RootSearch) -> Result<Vec<(f64, bool)>> {
    search.validate()?;
    check_order(order)?;
    let (a, b) = search.window;
    let f = |lambda: f64| determinant(order, omega_tilde, lambda);
    let grid: Vec<f64> = (0..search.grid)
        .map(|i| a + (b - a) * i as f64 / (search.grid - 1) as f64)
        .collect();
    let values = grid.iter().map(|&l| f(l)).collect::<Result<Vec<f64>>>()?;
    let step = (b - a) / (search.grid - 1) as f64;
    let edge = |l: f64| l - a < step || b - l < step;
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push((grid[i], edge(grid[i])));
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0) {
            let root = bisect(f, grid[i], grid[i + 1], values[i], search.tol)?;
            roots.push((root, edge(root)));
        }
    }
    Ok(roots)
}

/// All Juddian points of order `N` in the search window, ascending in λ.
pub fn find_points(order: usize, params: &ModelParams, search: &RootSearch) -> Result<Vec<JuddianPoint>> {
    find_roots(order, params.omega_tilde, search)?
        .into_iter()
        .map(|(lambda, edge)| point_at(order, params, lambda, edge))
        .collect()
}

/// Points for every order in `orders`, sorted by N then λ.
pub fn find_all_points(
    orders: std::ops::RangeInclusive<usize>,
    params: &ModelParams,
    search: &RootSearch,
) -> Result<Vec<JuddianPoint>> {
    let orders: Vec<usize> = orders.collect();
    let per_order = crate::par_map(&orders, |&n| find_points(n, params, search));
    let mut all = Vec::new();
    for points in per_order {
        all.extend(points?);
    }
    Ok(all)
}

/// The degenerate partner at the same `(λ, Ẽ)`: `σ` on the other branch and
/// the roles of the two spin components exchanged. Coefficients pick up a
/// sign `(−1)^((i − r)/2)` and are rescaled so `p_N = 1` again.
pub fn mirror_solution(point: &JuddianPoint) -> JuddianPoint {
    let r = point.chain_parity();
    let flip = |i: usize| if ((i - r) / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let renorm = flip(point.order);
    let p = point
        .p
        .iter()
        .enumerate()
        .map(|(j, &c)| c * flip(r + 2 * j) * renorm)
        .collect();
    let q = point
        .q
        .iter()
        .enumerate()
        .map(|(j, &c)| c * flip(r + 2 * j) * renorm)
        .collect();
    JuddianPoint {
        p,
        q,
        mirrored: !point.mirrored,
        ..point.clone()
    }
}

/// The ansatz state on `|n⟩ ⊗ |s_x⟩`, in the ordering of [`FullMatrix`].
pub fn wavefunction(point: &JuddianPoint, n_max: usize) -> Result<Vec<f64>> {
    let needed = 4 * (point.order + 2);
    if n_max < needed {
        return Err(Error::InsufficientHeadroom {
            n: point.order,
            n_max,
            needed,
        });
    }
    let sigma = point.squeeze()?;
    let r = point.chain_parity();
    let (p_spin, q_spin) = if point.mirrored {
        (SpinX::Minus, SpinX::Plus)
    } else {
        (SpinX::Plus, SpinX::Minus)
    };
    let mut psi = vec![0.0; 2 * (n_max + 1)];
    let mut add = |coeffs: &[f64], spin: SpinX| -> Result<()> {
        for (j, &c) in coeffs.iter().enumerate() {
            let state = squeezed_number_state(r + 2 * j, sigma, n_max)?;
            for (n, a) in state.coeffs.iter().enumerate() {
                psi[FullMatrix::index(n, spin)] += c * a;
            }
        }
        Ok(())
    };
    add(&point.p, p_spin)?;
    add(&point.q, q_spin)?;
    Ok(psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    pub n_max: usize,
    /// `‖(H̃ − Ẽ)Ψ‖ / ‖Ψ‖`
    pub residual: f64,
    pub threshold: f64,
}

/// Applies the truncated Hamiltonian to the reconstructed ansatz state.
pub fn verify_point(point: &JuddianPoint, n_max: usize) -> Result<Verification> {
    let params = ModelParams::from_rescaled(point.omega, point.omega_tilde, point.lambda)?;
    let psi = wavefunction(point, n_max)?;
    let h = build_full(&params, n_max)?;
    let hpsi = h.matrix.matvec(&psi);
    let e = point.energy_tilde;
    let num = hpsi.iter().zip(&psi).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt();
    let den = psi.iter().map(|x| x * x).sum::<f64>().sqrt();
    let residual = num / den;
    if !(residual < VERIFY_THRESHOLD) {
        return Err(Error::VerificationFailed {
            residual,
            threshold: VERIFY_THRESHOLD,
        });
    }
    Ok(Verification {
        n_max,
        residual,
        threshold: VERIFY_THRESHOLD,
    })
}

/// `|⟨Ψ|Ψ'⟩| / (‖Ψ‖‖Ψ'‖)` of two reconstructed states.
pub fn overlap(a: &JuddianPoint, b: &JuddianPoint, n_max: usize) -> Result<f64> {
    let x = wavefunction(a, n_max)?;
    let y = wavefunction(b, n_max)?;
    let dot: f64 = x.iter().zip(&y).map(|(u, v)| u * v).sum();
    let nx = x.iter().map(|u| u * u).sum::<f64>().sqrt();
    let ny = y.iter().map(|u| u * u).sum::<f64>().sqrt();
    Ok(dot.abs() / (nx * ny))
}

/// Largest distance, in physical units, from `ωẼ` to the two numerical
/// eigenvalues nearest it. Small for a genuine level crossing.
pub fn degeneracy_gap(point: &JuddianPoint, n_max: usize) -> Result<f64> {
    let params = ModelParams::from_rescaled(point.omega, point.omega_tilde, point.lambda)?;
    let h = build_full(&params, n_max)?;
    let near = eigenvalues_near(&h.matrix, point.energy_tilde, 2)?;
    let worst = near
        .iter()
        .map(|e| (e - point.energy_tilde).abs())
        .fold(0.0, f64::max);
    Ok(params.omega * worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn resonant() -> ModelParams {
        ModelParams::derive(0.5, 1.0, 0.0).unwrap()
    }

    #[test]
    fn baselines() {
        assert_eq!(baseline(5, 0.0).unwrap(), 5.0);
        let l2 = 1.0 / (2.0 * 2f64.sqrt());
        assert!((baseline(2, l2).unwrap() - 1.2677669530).abs() < 1e-10);
        let l3 = (0.3f64).sqrt() / 2.0;
        assert!((0.5 * baseline(3, l3).unwrap() - 1.214155046).abs() < 1e-9);
        assert!(baseline(1, 0.1).is_err());
        assert!(baseline(2, 0.5).is_err());
        assert_eq!(conjectured_baseline(2, 0.0).unwrap(), 1.5);
        assert!((conjectured_baseline(3, 0.25).unwrap() - 2.0980762114).abs() < 1e-10);
        assert!((conjectured_baseline(4, 0.5 - 1e-15).unwrap() + 0.5).abs() < 1e-6);
    }

    #[test]
    fn system_layout() {
        let s = build_system(2, 1.0, 0.3).unwrap();
        assert_eq!(s.dim(), 3);
        assert_eq!(s.p_indices, vec![0, 2]);
        assert_eq!(s.q_indices, vec![0]);
        let omega = big_omega(0.3).unwrap();
        // A(0): ω̃ q0 − 2Ω p0
        assert_eq!(s.matrix[0], vec![-2.0 * omega, 0.0, 1.0]);
        for n in 2..12 {
            let s = build_system(n, 0.7, 0.2).unwrap();
            let expected = if n % 2 == 0 { n + 1 } else { n };
            assert_eq!(s.dim(), expected);
            assert_eq!(s.chain_parity, n % 2);
            assert!(s.q_indices.iter().all(|&m| m % 2 == n % 2 && m + 2 <= n));
            // p_N appears only in B(N).
            let pin = s.pinned_column();
            for (i, row) in s.matrix.iter().enumerate() {
                assert_eq!(row[pin] != 0.0, i == s.pinned_row());
            }
            // Off-chain indices never map to a column.
            assert!(s.q_column(n).is_none() && s.q_column(1 - n % 2).is_none());
        }
        assert!(matches!(build_system(1, 1.0, 0.2), Err(Error::OrderTooLow(1))));
        assert!(build_system(3, 1.0, 0.5).is_err());
    }

    #[test]
    fn full_determinant_factorises() {
        for n in 2..9 {
            let s = build_system(n, 0.8, 0.31).unwrap();
            let minor = determinant(n, 0.8, 0.31).unwrap();
            let full = s.full_determinant();
            assert!((full - s.cofactor_sign() * 0.8 * minor).abs() <= 1e-12 * full.abs().max(1.0), "N={n}");
        }
    }

    #[test]
    fn low_order_closed_forms() {
        for &(wt, x) in &[(1.0, 0.5), (0.3, 0.8), (2.0, 0.1)] {
            let d2 = compatibility_at(2, wt, x).unwrap();
            assert!((d2 + (2.0 - 6.0 * x + wt * wt)).abs() < 1e-13);
            let d3 = compatibility_at(3, wt, x).unwrap();
            let e3 = 6.0 - 10.0 * x + wt * wt;
            assert!((d3.abs() - e3.abs()).abs() < 1e-12, "{d3} vs {e3}");
        }
    }

    fn printed_n4(wt: f64, x: f64) -> f64 {
        8.0 * (3.0 - 30.0 * x + 35.0 * x * x) + 2.0 * (7.0 - 17.0 * x) * wt * wt + wt.powi(4)
    }

    #[test]
    fn order_four_matches_printed_polynomial() {
        for &wt in &[1.0, 0.4, 1.7] {
            let fit = fit_compatibility_polynomial(4, wt).unwrap();
            let lead = 8.0 * 35.0;
            let expected = [
                (24.0 + 14.0 * wt * wt + wt.powi(4)) / lead,
                (-240.0 - 34.0 * wt * wt) / lead,
                1.0,
            ];
            for (a, b) in fit.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-10, "wt={wt}: {fit:?}");
            }
            // Independent of the fit: direct proportionality at scattered points.
            let r = compatibility_at(4, wt, 0.37).unwrap() / printed_n4(wt, 0.37);
            for &x in &[0.05, 0.5, 0.93] {
                assert!((compatibility_at(4, wt, x).unwrap() / printed_n4(wt, x) - r).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn polynomial_fits() {
        let f2 = fit_compatibility_polynomial(2, 1.0).unwrap();
        assert!((f2[0] + 0.5).abs() < 1e-13 && f2[1] == 1.0);
        let f3 = fit_compatibility_polynomial(3, 0.0).unwrap();
        assert!((-f3[0] - 0.6).abs() < 1e-13);
        for n in 2..=MAX_FIT_ORDER {
            assert_eq!(fit_compatibility_polynomial(n, 1.0).unwrap().len(), n / 2 + 1);
        }
        assert!(fit_compatibility_polynomial(13, 1.0).is_err());
    }

    #[test]
    fn fit_reproduces_determinant() {
        for n in [5, 8, 11] {
            let fit = fit_compatibility_polynomial(n, 1.3).unwrap();
            let scale = compatibility_at(n, 1.3, 0.21).unwrap()
                / fit.iter().rev().fold(0.0, |acc, c| acc * 0.21 + c);
            for &x in &[0.02, 0.45, 0.77, 1.0] {
                let poly = fit.iter().rev().fold(0.0, |acc, c| acc * x + c) * scale;
                let det = compatibility_at(n, 1.3, x).unwrap();
                assert!((poly - det).abs() < 1e-9 * det.abs().max(scale.abs()), "N={n} x={x}");
            }
        }
    }

    #[test]
    fn resonant_roots() {
        let p = resonant();
        let s = RootSearch::default();
        let two = find_points(2, &p, &s).unwrap();
        assert_eq!(two.len(), 1);
        assert!((two[0].g - 0.08838834765).abs() < 1e-11);
        assert!((two[0].energy - 0.6338834765).abs() < 1e-10);
        assert_eq!(two[0].p.last(), Some(&1.0));
        let three = find_points(3, &p, &s).unwrap();
        assert!((big_omega(three[0].lambda).unwrap().powi(2) - 0.7).abs() < 1e-14);
        let counts: Vec<usize> = (2..=7).map(|n| find_points(n, &p, &s).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 2, 3, 3]);
        for point in find_all_points(2..=7, &p, &s).unwrap() {
            assert!((point.energy_tilde - baseline(point.order, point.lambda).unwrap()).abs() < 1e-12);
            assert!(point.consistency_residual < 1e-10);
            assert!(!point.at_window_edge);
        }
    }

    #[test]
    fn search_validation() {
        let p = resonant();
        let bad = RootSearch { window: (0.0, 0.3), ..RootSearch::default() };
        assert!(find_points(2, &p, &bad).is_err());
        let empty = RootSearch { window: (0.01, 0.05), ..RootSearch::default() };
        assert!(find_points(2, &p, &empty).unwrap().is_empty());
        let coarse = RootSearch { tol: 1e-16, ..RootSearch::default() };
        assert!(find_points(2, &p, &coarse).is_err());
    }

    #[test]
    fn root_on_grid_point() {
        // N = 2 at ω̃ = 1: λ* = 1/(2√2). Put it exactly on a grid node.
        let root = 1.0 / (2.0 * 2f64.sqrt());
        let search = RootSearch {
            window: (root - 0.1, root + 0.1),
            grid: 3,
            tol: 1e-15,
        };
        let roots = find_roots(2, 1.0, &search).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].0 - root).abs() < 1e-15);
    }

    #[test]
    fn ansatz_states_are_eigenstates() {
        let p = resonant();
        for point in find_all_points(2..=5, &p, &RootSearch::default()).unwrap() {
            let v = verify_point(&point, VERIFY_N_MAX).unwrap();
            assert!(v.residual < VERIFY_THRESHOLD);
            let mirror = mirror_solution(&point);
            assert_eq!((mirror.lambda, mirror.energy_tilde), (point.lambda, point.energy_tilde));
            verify_point(&mirror, VERIFY_N_MAX).unwrap();
            assert!(overlap(&point, &mirror, VERIFY_N_MAX).unwrap() < 1.0 - 1e-6);
            assert_eq!(mirror_solution(&mirror), point);
        }
    }

    #[test]
    fn perturbed_coupling_fails() {
        let p = resonant();
        let point = &find_points(2, &p, &RootSearch::default()).unwrap()[0];
        let lambda = point.lambda + 1e-3;
        let moved = JuddianPoint {
            lambda,
            energy_tilde: baseline(2, lambda).unwrap(),
            ..point.clone()
        };
        assert!(matches!(verify_point(&moved, VERIFY_N_MAX), Err(Error::VerificationFailed { .. })));
        assert!(matches!(
            verify_point(point, 10),
            Err(Error::InsufficientHeadroom { .. })
        ));
    }

    #[test]
    fn roots_are_level_crossings() {
        let p = resonant();
        for point in find_all_points(2..=4, &p, &RootSearch::default()).unwrap() {
            assert!(degeneracy_gap(&point, VERIFY_N_MAX).unwrap() < 1e-7);
        }
    }

    #[test]
    fn detuned_points_verify() {
        let p = ModelParams::from_rescaled(1.0, 0.6, 0.1).unwrap();
        let points = find_all_points(2..=6, &p, &RootSearch::default()).unwrap();
        assert!(!points.is_empty());
        for point in &points {
            verify_point(point, VERIFY_N_MAX).unwrap();
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn determinant_symmetries(wt in -3.0f64..3.0, lambda in 0.01f64..0.49, n in 2usize..9) {
            let d = determinant(n, wt, lambda).unwrap();
            let scale = d.abs().max(1e-300);
            prop_assert!((determinant(n, -wt, lambda).unwrap() - d).abs() <= 1e-12 * scale.max(1.0));
            prop_assert!((determinant(n, wt, -lambda).unwrap() - d).abs() <= 1e-12 * scale.max(1.0));
        }
    }
}

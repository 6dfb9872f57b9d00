//! Published Juddian points of the resonant model (`ω = 1/2`, `ω0 = 1`),
//! used as golden data, and a set-wise comparison against computed points.

use serde::Serialize;

use crate::juddian::JuddianPoint;

/// Boson frequency of the reference parameters.
pub const REFERENCE_OMEGA: f64 = 0.5;
/// Atomic splitting of the reference parameters.
pub const REFERENCE_OMEGA0: f64 = 1.0;
/// Relative tolerance for matching a reference row.
pub const REFERENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferencePoint {
    #[serde(rename = "N")]
    pub order: usize,
    pub g: f64,
    #[serde(rename = "E")]
    pub energy: f64,
}

const fn row(order: usize, g: f64, energy: f64) -> ReferencePoint {
    ReferencePoint { order, g, energy }
}

/// The twelve published points, in published row order.
pub const TABLE: [ReferencePoint; 12] = [
    row(2, 0.08838834765, 0.6338834765),
    row(3, 0.06846531969, 1.214155046),
    row(4, 0.1136829135, 0.6855144259),
    row(4, 0.05510006004, 1.769611501),
    row(5, 0.1017761788, 1.346571001),
    row(5, 0.04587381623, 2.308117863),
    row(6, 0.1195668196, 0.6977617553),
    row(6, 0.09065527261, 1.987605007),
    row(6, 0.03920841953, 2.835982030),
    row(7, 0.1124265002, 1.389132039),
    row(7, 0.03419600455, 3.356947455),
    row(7, 0.08111783821, 2.603139795),
];

/// One reference row against its best computed match.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RowComparison {
    pub reference: ReferencePoint,
    pub computed_g: Option<f64>,
    pub computed_energy: Option<f64>,
    pub g_rel_error: f64,
    pub energy_rel_error: f64,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<RowComparison>,
    /// Computed points not claimed by any reference row.
    pub unmatched_computed: usize,
    pub tol: f64,
}

impl Comparison {
    pub fn all_match(&self) -> bool {
        self.unmatched_computed == 0 && self.rows.iter().all(|r| r.matches)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Pairs each reference row with the unclaimed computed point of the same
/// order nearest in `g`. Row order of the reference is irrelevant.
pub fn compare(points: &[JuddianPoint], tol: f64) -> Comparison {
    let mut claimed = vec![false; points.len()];
    let mut rows = Vec::with_capacity(TABLE.len());
    for reference in TABLE {
        let best = points
            .iter()
            .enumerate()
            .filter(|(i, p)| !claimed[*i] && p.order == reference.order)
            .min_by(|a, b| rel(a.1.g, reference.g).total_cmp(&rel(b.1.g, reference.g)));
        let comparison = match best {
            Some((i, p)) => {
                claimed[i] = true;
                let g_rel_error = rel(p.g, reference.g);
                let energy_rel_error = rel(p.energy, reference.energy);
                RowComparison {
                    reference,
                    computed_g: Some(p.g),
                    computed_energy: Some(p.energy),
                    g_rel_error,
                    energy_rel_error,
                    matches: g_rel_error <= tol && energy_rel_error <= tol,
                }
            }
            None => RowComparison {
                reference,
                computed_g: None,
                computed_energy: None,
                g_rel_error: f64::INFINITY,
                energy_rel_error: f64::INFINITY,
                matches: false,
            },
        };
        rows.push(comparison);
    }
    Comparison {
        rows,
        unmatched_computed: claimed.iter().filter(|c| !**c).count(),
        tol,
    }
}

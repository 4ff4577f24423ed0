//! Classification of the holonomy around a puncture.
//!
//! The loop around a puncture crosses one corner wedge per incident
//! face corner, and each wedge contributes a transfer isometry that is
//! upper triangular in the frame normalizing the corner flag. The
//! product is therefore determined by the per-step parameters
//! `(mu_j, t_j)` alone: its top left entry is the product of the
//! `mu_j`, and its top right entry is the weighted sum computed by
//! [`peripheral_mu_k`]. The pair `(|mu|, K)` separates the three
//! possible types of the peripheral holonomy.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hermitian::C64;
use crate::isometries::{ElementaryError, TransferParams};
use crate::surface::{ComplexError, Decoration, DecorationError, HtStep, Slot, Triangulation};

/// Bound on `||mu| - 1|` under which the holonomy counts as unipotent
/// on the line of the fixed flag.
pub const TOL_UNIT_MU: f64 = 1e-9;

/// Bound on `|K|`, relative to the translation scale of the steps,
/// under which the holonomy counts as a complex reflection.
pub const TOL_VANISHING_K: f64 = 1e-9;

/// Tolerance for the two-sided modulus criterion of
/// [`torus_parabolicity_check`].
pub const TOL_PARABOLIC: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CuspError {
    #[error("puncture {0} has no incident corner")]
    UnknownPuncture(usize),
    #[error("invalid decoration: {0}")]
    InvalidDecoration(#[from] DecorationError),
    #[error("face {face} is too degenerate to carry transfer parameters: {source}")]
    DegenerateFace {
        face: usize,
        #[source]
        source: ElementaryError,
    },
    #[error("not the standard two-face torus complex: {0}")]
    WrongTriangulation(&'static str),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// The isometry type of a peripheral holonomy that preserves a flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuspType {
    Loxodromic,
    ScrewParabolic,
    ComplexReflection,
}

/// One wedge of the loop around a puncture: the face and corner it
/// turns around, with the transfer parameters picked up there.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CuspStep {
    pub face: usize,
    pub corner: usize,
    #[serde(with = "crate::json::complex")]
    pub mu: C64,
    pub t: f64,
}

/// The classification of the holonomy around one puncture, with the
/// full per-step trace so callers can re-derive `mu` and `k` or apply
/// stricter cutoffs than the shipped tolerances.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CuspReport {
    pub puncture: usize,
    #[serde(with = "crate::json::complex")]
    pub mu: C64,
    #[serde(with = "crate::json::complex")]
    pub k: C64,
    pub cusp_type: CuspType,
    pub steps: Vec<CuspStep>,
}

/// The two-sided modulus criterion on the standard torus: the
/// peripheral holonomy can be parabolic or a complex reflection exactly
/// when the two delta products agree in modulus, and `k_expression`
/// (the peripheral `K` divided by `i`) separates the two cases by its
/// nonvanishing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorusParabolicity {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
    #[serde(with = "crate::json::complex")]
    pub k_expression: C64,
}

/// The corner wedges around a puncture in orientation order, starting
/// from the lexicographically smallest incident `(face, corner)` pair.
fn wedge_cycle(t: &Triangulation, puncture: usize) -> Result<Vec<(usize, usize)>, CuspError> {
    let start = (0..t.face_count())
        .flat_map(|f| (0..3).map(move |x| (f, x)))
        .find(|&(f, x)| t.faces[f][x] == puncture)
        .ok_or(CuspError::UnknownPuncture(puncture))?;
    let mut cycle = vec![start];
    let (mut f, mut x) = start;
    loop {
        let side = Slot::new(f, (x + 2) % 3);
        let partner = t.partner(side).expect("validated complex");
        if (partner.face, partner.slot) == start {
            return Ok(cycle);
        }
        cycle.push((partner.face, partner.slot));
        (f, x) = (partner.face, partner.slot);
    }
}

/// The loop around a puncture as a path of hexagonation steps, one
/// forward transfer per incident corner. Its holonomy under any cocycle
/// of the triangulation is the peripheral holonomy classified by
/// [`cusp_holonomy`].
pub fn cusp_loop(t: &Triangulation, puncture: usize) -> Result<Vec<HtStep>, CuspError> {
    t.validate()?;
    Ok(wedge_cycle(t, puncture)?
        .into_iter()
        .map(|(face, corner)| HtStep::Transfer {
            face,
            corner,
            reverse: false,
        })
        .collect())
}

/// Folds the per-step parameters into the invariants `(mu, K)` of the
/// full peripheral product: `mu` is the product of the step `mu_j`, and
/// `K = i * sum_j t_j (prod_{l >= j} mu_l) / (prod_{l < j} conj mu_l)`,
/// the top right entry of the product of the step matrices taken in
/// path order (first step rightmost).
pub fn peripheral_mu_k(steps: &[CuspStep]) -> (C64, C64) {
    let n = steps.len();
    let mut suffix = vec![C64::from(1.0); n + 1];
    for j in (0..n).rev() {
        suffix[j] = suffix[j + 1] * steps[j].mu;
    }
    let mut sum = C64::from(0.0);
    let mut prefix_conj = C64::from(1.0);
    for (j, s) in steps.iter().enumerate() {
        sum += C64::from(s.t) * suffix[j] / prefix_conj;
        prefix_conj *= s.mu.conj();
    }
    (suffix[0], C64::i() * sum)
}

/// Classifies from the pair `(mu, K)`: away from `|mu| = 1` the
/// holonomy is loxodromic; on it, a vanishing `K` leaves a complex
/// reflection and anything else a screw parabolic. `t_scale` sets the
/// absolute scale against which `K` counts as zero; pass the sum of
/// the `|t_j|` of the steps.
pub fn classify(mu: C64, k: C64, t_scale: f64) -> CuspType {
    if (mu.norm() - 1.0).abs() >= TOL_UNIT_MU {
        CuspType::Loxodromic
    } else if k.norm() < TOL_VANISHING_K * t_scale.max(1.0) {
        CuspType::ComplexReflection
    } else {
        CuspType::ScrewParabolic
    }
}

/// Walks the loop around `puncture`, collects the transfer parameters
/// of each wedge, and classifies the resulting holonomy. Only the face
/// records along the loop are consulted, so the classification stays
/// meaningful on decorations that fail the cross-edge compatibility
/// checks, such as deliberately perturbed ones.
pub fn cusp_holonomy(
    t: &Triangulation,
    d: &Decoration,
    puncture: usize,
) -> Result<CuspReport, CuspError> {
    t.validate()?;
    let mut steps = Vec::new();
    for (face, corner) in wedge_cycle(t, puncture)? {
        let rec = d.face_record(t, face)?;
        let params = TransferParams::oriented(&rec, corner, (corner + 1) % 3, (corner + 2) % 3)
            .map_err(|source| CuspError::DegenerateFace { face, source })?;
        steps.push(CuspStep {
            face,
            corner,
            mu: params.mu,
            t: params.t,
        });
    }
    let (mu, k) = peripheral_mu_k(&steps);
    let t_scale = steps.iter().map(|s| s.t.abs()).sum();
    Ok(CuspReport {
        puncture,
        mu,
        k,
        cusp_type: classify(mu, k, t_scale),
        steps,
    })
}

/// Evaluates the modulus criterion for the standard two-face torus:
/// `lhs` is the modulus of the product of the first face's stored
/// deltas, `rhs` the modulus of the matching swapped-order delta
/// product of the second face, and `satisfied` their agreement at
/// [`TOL_PARABOLIC`]. The moduli tie to the peripheral holonomy by
/// `|mu| = rhs / lhs`, so agreement puts the puncture on the
/// parabolic-or-reflection locus; `k_expression` then separates the
/// two cases.
pub fn torus_parabolicity_check(
    t: &Triangulation,
    d: &Decoration,
) -> Result<TorusParabolicity, CuspError> {
    t.validate()?;
    let canonical = Triangulation::torus();
    let mut gluings: Vec<(usize, usize, usize, usize)> = t
        .gluings
        .iter()
        .map(|&(a, b)| {
            if (b.face, b.slot) < (a.face, a.slot) {
                (b.face, b.slot, a.face, a.slot)
            } else {
                (a.face, a.slot, b.face, b.slot)
            }
        })
        .collect();
    gluings.sort_unstable();
    let expected: Vec<(usize, usize, usize, usize)> = canonical
        .gluings
        .iter()
        .map(|&(a, b)| (a.face, a.slot, b.face, b.slot))
        .collect();
    if t.genus != canonical.genus || t.punctures != canonical.punctures || gluings != expected {
        return Err(CuspError::WrongTriangulation(
            "the check needs two faces glued slot to slot around one puncture",
        ));
    }
    let alpha = d.face_record(t, 0)?;
    let beta = d.face_record(t, 1)?;
    let lhs = (alpha.delta1_23 * alpha.delta2_31 * alpha.delta3_12).norm();
    let rhs = (beta.delta2_13 * beta.delta1_32 * beta.delta3_21).norm();
    let report = cusp_holonomy(t, d, 0)?;
    Ok(TorusParabolicity {
        satisfied: (lhs - rhs).abs() < TOL_PARABOLIC * lhs.max(rhs),
        lhs,
        rhs,
        k_expression: report.k / C64::i(),
    })
}

//! The invariant calculus on lines and flags: phi of a line pair, Phi and
//! Delta of a line triple, m of a flag pair, delta of a flag against a
//! line pair, the full record of a flag triple, and the reconstructions
//! going the other way.
//!
//! All quantities are ratios of Hermitian pairings, invariant under
//! isometries and under rescaling of every lift. Computations rescale
//! polar vectors to unit norm internally; this is behavior-neutral and
//! keeps intermediate magnitudes of order one.

use thiserror::Error;

use crate::geometry::{ComplexLine, Flag, GeometryError};
use crate::hermitian::{C64, CMat3, CVec3, HForm, anti_dual_basis, herm};
use crate::linalg::proj_dist;

/// Lines with phi below this are treated as orthogonal and excluded from
/// generic configurations.
pub const TOL_ORTHOGONAL: f64 = 1e-10;

/// Unit polar vectors whose projective distance is below this denote the
/// same line. The phi test alone cannot tell identical from asymptotic.
pub const TOL_IDENTICAL: f64 = 1e-8;

/// Default tolerance for the constraint system of a flag-triple record:
/// modulus relation, delta products, circle constraints, m consistency.
pub const TOL_CONSTRAINTS: f64 = 1e-8;

/// Reason code for a failed genericity test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Degeneracy {
    PointOnLine,
    OrthogonalLines,
    IdenticalLines,
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Degeneracy::PointOnLine => "point on line",
            Degeneracy::OrthogonalLines => "orthogonal lines",
            Degeneracy::IdenticalLines => "identical lines",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum InvariantError {
    #[error("polar vectors do not form a basis")]
    DegenerateTriple,
    #[error("flag pair is not generic ({0})")]
    NonGenericPair(Degeneracy),
    #[error("configuration is not generic ({0})")]
    NonGeneric(Degeneracy),
    #[error("flag triple is not generic at positions {i} and {j} ({reason})")]
    NonGenericTriple {
        i: usize,
        j: usize,
        reason: Degeneracy,
    },
    #[error("invariants are invalid: {0}")]
    InvalidInvariants(&'static str),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The invariant of an unordered pair of complex lines.
#[derive(Clone, Copy, Debug)]
pub struct PairLineInvariant {
    pub phi: f64,
}

impl PairLineInvariant {
    pub fn of(line1: &ComplexLine, line2: &ComplexLine) -> Self {
        PairLineInvariant {
            phi: phi_invariant(line1, line2),
        }
    }
}

/// The invariants of an ordered triple of complex lines.
#[derive(Clone, Copy, Debug)]
pub struct TripleLineInvariant {
    pub phi12: f64,
    pub phi23: f64,
    pub phi31: f64,
    pub big_phi: C64,
}

impl TripleLineInvariant {
    /// The Gram discriminant `1 - phi12 - phi23 - phi31 + 2 Re(Phi)`,
    /// equal to the determinant of the unit-polar Gram matrix. Negative
    /// for every actual triple of lines in generic position.
    pub fn delta(&self) -> f64 {
        1.0 - self.phi12 - self.phi23 - self.phi31 + 2.0 * self.big_phi.re
    }

    /// Relative residual of the modulus relation `|Phi|^2 = prod(phi)`.
    pub fn modulus_residual(&self) -> f64 {
        let prod = self.phi12 * self.phi23 * self.phi31;
        (self.big_phi.norm_sqr() - prod).abs() / prod.abs().max(1e-300)
    }

    pub fn of(
        line1: &ComplexLine,
        line2: &ComplexLine,
        line3: &ComplexLine,
    ) -> Result<Self, InvariantError> {
        check_independent(line1, line2, line3)?;
        let (c1, c2, c3) = (
            line1.unit_polar(),
            line2.unit_polar(),
            line3.unit_polar(),
        );
        let j = HForm::standard();
        let h12 = herm(&c1, &c2, &j);
        let h23 = herm(&c2, &c3, &j);
        let h31 = herm(&c3, &c1, &j);
        Ok(TripleLineInvariant {
            phi12: h12.norm_sqr(),
            phi23: h23.norm_sqr(),
            phi31: h31.norm_sqr(),
            big_phi: h12 * h23 * h31,
        })
    }
}

/// The full invariant record of an ordered triple of flags.
///
/// `delta1_23` is the coordinate of the first flag's point against the
/// ordered line pair (2,3); the underscore separates the flag index from
/// the line ordering. The six deltas satisfy
/// `delta_i_jk * delta_i_kj = phi_jk`.
#[derive(Clone, Copy, Debug)]
pub struct TripleFlagInvariant {
    pub phi12: f64,
    pub phi23: f64,
    pub phi31: f64,
    pub big_phi: C64,
    pub delta1_23: C64,
    pub delta1_32: C64,
    pub delta2_31: C64,
    pub delta2_13: C64,
    pub delta3_12: C64,
    pub delta3_21: C64,
    pub m12: C64,
    pub m23: C64,
    pub m31: C64,
}

impl TripleFlagInvariant {
    /// The Gram discriminant of the underlying line triple.
    pub fn delta(&self) -> f64 {
        1.0 - self.phi12 - self.phi23 - self.phi31 + 2.0 * self.big_phi.re
    }

    /// Builds the full record from the independent coordinates: the three
    /// phi, the triple product, and the three cyclically ordered deltas.
    /// The reversed deltas come from the product relation and the m values
    /// from their expression in the other invariants.
    pub fn from_coordinates(
        phi12: f64,
        phi23: f64,
        phi31: f64,
        big_phi: C64,
        delta1_23: C64,
        delta2_31: C64,
        delta3_12: C64,
    ) -> Self {
        let mut inv = TripleFlagInvariant {
            phi12,
            phi23,
            phi31,
            big_phi,
            delta1_23,
            delta1_32: C64::from(phi23) / delta1_23,
            delta2_31,
            delta2_13: C64::from(phi31) / delta2_31,
            delta3_12,
            delta3_21: C64::from(phi12) / delta3_12,
            m12: C64::from(0.0),
            m23: C64::from(0.0),
            m31: C64::from(0.0),
        };
        inv.m12 = inv.derived_m(0);
        inv.m23 = inv.derived_m(1);
        inv.m31 = inv.derived_m(2);
        inv
    }

    /// The m value of the edge pair starting at position `i` (0-based:
    /// edge 12, 23 or 31), expressed in the phi, Phi and delta data alone.
    pub fn derived_m(&self, i: usize) -> C64 {
        // For the cyclic triple (i, j, k) the identity reads
        //   m_ij * Delta * phi_ik * phi_jk =
        //     phi_ik phi_jk (Phi - phi_ij)
        //   + phi_ik (phi_ij phi_jk - Phi) delta_i_kj
        //   + phi_jk (phi_ij phi_ik - Phi) conj(delta_j_ki)
        //   + Phi (1 - phi_ij) delta_i_kj conj(delta_j_ki)
        // with Phi the cyclic triple product.
        let (phi_ij, phi_jk, phi_ik, d_i_kj, d_j_ki) = match i {
            0 => (self.phi12, self.phi23, self.phi31, self.delta1_32, self.delta2_31),
            1 => (self.phi23, self.phi31, self.phi12, self.delta2_13, self.delta3_12),
            2 => (self.phi31, self.phi12, self.phi23, self.delta3_21, self.delta1_23),
            _ => panic!("edge index out of range"),
        };
        let phi = self.big_phi;
        let delta = C64::from(self.delta());
        let num = C64::from(phi_ik * phi_jk) * (phi - phi_ij)
            + C64::from(phi_ik) * (C64::from(phi_ij * phi_jk) - phi) * d_i_kj
            + C64::from(phi_jk) * (C64::from(phi_ij * phi_ik) - phi) * d_j_ki.conj()
            + phi * C64::from(1.0 - phi_ij) * d_i_kj * d_j_ki.conj();
        num / (delta * phi_ik * phi_jk)
    }

    /// Normalized residual of the circle constraint tied to the cyclic
    /// delta at position `i` (0-based):
    /// `(1-phi_ik)|d|^2 + 2 Re[(conj(Phi)-phi_jk) d] + phi_jk(1-phi_ij)`
    /// for `d = delta_i_jk`, divided by the largest of the three terms.
    pub fn circle_residual(&self, i: usize) -> f64 {
        let (d, phi_ik, phi_jk, phi_ij) = match i {
            0 => (self.delta1_23, self.phi31, self.phi23, self.phi12),
            1 => (self.delta2_31, self.phi12, self.phi31, self.phi23),
            2 => (self.delta3_12, self.phi23, self.phi12, self.phi31),
            _ => panic!("circle index out of range"),
        };
        let t1 = (1.0 - phi_ik) * d.norm_sqr();
        let t2 = 2.0 * ((self.big_phi.conj() - phi_jk) * d).re;
        let t3 = phi_jk * (1.0 - phi_ij);
        let scale = t1.abs().max(t2.abs()).max(t3.abs()).max(1e-300);
        (t1 + t2 + t3).abs() / scale
    }

    /// The phi value of the unordered flag pair `{a, b}` (0-based).
    pub fn phi_of(&self, a: usize, b: usize) -> f64 {
        match (a.min(b), a.max(b)) {
            (0, 1) => self.phi12,
            (1, 2) => self.phi23,
            (0, 2) => self.phi31,
            _ => panic!("flag pair out of range"),
        }
    }

    /// The delta of flag `i` against the ordered line pair `(j, k)`, for
    /// any permutation `(i, j, k)` of `(0, 1, 2)`.
    pub fn delta_of(&self, i: usize, j: usize, k: usize) -> C64 {
        match (i, j, k) {
            (0, 1, 2) => self.delta1_23,
            (0, 2, 1) => self.delta1_32,
            (1, 2, 0) => self.delta2_31,
            (1, 0, 2) => self.delta2_13,
            (2, 0, 1) => self.delta3_12,
            (2, 1, 0) => self.delta3_21,
            _ => panic!("delta index is not a permutation"),
        }
    }

    /// The triple product of the lines taken in the order `(i, j, k)`:
    /// the stored value on cyclic permutations, its conjugate on the rest.
    pub fn big_phi_of(&self, i: usize, j: usize, k: usize) -> C64 {
        match (i, j, k) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => self.big_phi,
            (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => self.big_phi.conj(),
            _ => panic!("triple index is not a permutation"),
        }
    }

    /// The m value of the ordered flag pair `(a, b)`; reversing the pair
    /// conjugates it.
    pub fn m_of(&self, a: usize, b: usize) -> C64 {
        match (a, b) {
            (0, 1) => self.m12,
            (1, 2) => self.m23,
            (2, 0) => self.m31,
            (1, 0) => self.m12.conj(),
            (2, 1) => self.m23.conj(),
            (0, 2) => self.m31.conj(),
            _ => panic!("flag pair out of range"),
        }
    }

    /// The record of the complex-conjugated flag triple. Conjugation is an
    /// antiholomorphic isometry, so it fixes the phi and conjugates every
    /// complex invariant.
    pub fn conjugated(&self) -> Self {
        TripleFlagInvariant {
            phi12: self.phi12,
            phi23: self.phi23,
            phi31: self.phi31,
            big_phi: self.big_phi.conj(),
            delta1_23: self.delta1_23.conj(),
            delta1_32: self.delta1_32.conj(),
            delta2_31: self.delta2_31.conj(),
            delta2_13: self.delta2_13.conj(),
            delta3_12: self.delta3_12.conj(),
            delta3_21: self.delta3_21.conj(),
            m12: self.m12.conj(),
            m23: self.m23.conj(),
            m31: self.m31.conj(),
        }
    }

    /// Checks the whole constraint system at the given tolerance, in the
    /// order: phi positivity, modulus relation, negative discriminant,
    /// delta products, circle constraints, m consistency.
    pub fn validate(&self, tol: f64) -> Result<(), InvariantError> {
        for phi in [self.phi12, self.phi23, self.phi31] {
            if !(phi > TOL_ORTHOGONAL) {
                return Err(InvariantError::InvalidInvariants(
                    "phi values must be positive",
                ));
            }
        }
        let prod = self.phi12 * self.phi23 * self.phi31;
        if (self.big_phi.norm_sqr() - prod).abs() > tol * prod.abs() {
            return Err(InvariantError::InvalidInvariants(
                "modulus relation |Phi|^2 = phi12 phi23 phi31 fails",
            ));
        }
        if self.delta() >= 0.0 {
            return Err(InvariantError::InvalidInvariants(
                "Gram discriminant must be negative",
            ));
        }
        let products = [
            (self.delta1_23 * self.delta1_32, self.phi23),
            (self.delta2_31 * self.delta2_13, self.phi31),
            (self.delta3_12 * self.delta3_21, self.phi12),
        ];
        for (p, phi) in products {
            if (p - phi).norm() > tol * phi.abs().max(1e-300) {
                return Err(InvariantError::InvalidInvariants(
                    "delta product does not reproduce phi",
                ));
            }
        }
        for i in 0..3 {
            if self.circle_residual(i) > tol {
                return Err(InvariantError::InvalidInvariants(
                    "circle constraint fails",
                ));
            }
        }
        for (i, m) in [self.m12, self.m23, self.m31].into_iter().enumerate() {
            if (m - self.derived_m(i)).norm() > tol * m.norm().max(1.0) {
                return Err(InvariantError::InvalidInvariants(
                    "m value disagrees with its expression in the deltas",
                ));
            }
        }
        Ok(())
    }
}

/// `phi(C1, C2) = |<c1,c2>|^2 / (<c1,c1><c2,c2>)`; zero for orthogonal
/// lines, one for identical or asymptotic ones.
pub fn phi_invariant(line1: &ComplexLine, line2: &ComplexLine) -> f64 {
    let j = HForm::standard();
    let num = herm(line1.polar(), line2.polar(), &j).norm_sqr();
    let den = herm(line1.polar(), line1.polar(), &j).re
        * herm(line2.polar(), line2.polar(), &j).re;
    num / den
}

fn check_independent(
    line1: &ComplexLine,
    line2: &ComplexLine,
    line3: &ComplexLine,
) -> Result<(), InvariantError> {
    let dets = crate::hermitian::scaled_det(line1.polar(), line2.polar(), line3.polar())
        .map_err(GeometryError::from)?;
    if dets <= crate::hermitian::TOL_INDEPENDENCE {
        return Err(InvariantError::DegenerateTriple);
    }
    Ok(())
}

/// The cyclic triple product `<c1,c2><c2,c3><c3,c1>` over the norms;
/// invariant under cyclic rotation, conjugated by transpositions.
pub fn big_phi_invariant(
    line1: &ComplexLine,
    line2: &ComplexLine,
    line3: &ComplexLine,
) -> Result<C64, InvariantError> {
    Ok(TripleLineInvariant::of(line1, line2, line3)?.big_phi)
}

/// The Gram discriminant of a line triple; equals the determinant of the
/// Gram matrix of unit polars, and is negative in generic position.
pub fn delta_gram(
    line1: &ComplexLine,
    line2: &ComplexLine,
    line3: &ComplexLine,
) -> Result<f64, InvariantError> {
    Ok(TripleLineInvariant::of(line1, line2, line3)?.delta())
}

/// Degeneracy of an ordered flag pair, if any: identical lines first,
/// then orthogonality, then incidence of either point with the other line.
pub(crate) fn pair_degeneracy(f1: &Flag, f2: &Flag) -> Option<Degeneracy> {
    let c1 = f1.line().unit_polar();
    let c2 = f2.line().unit_polar();
    if proj_dist(&c1, &c2) <= TOL_IDENTICAL {
        return Some(Degeneracy::IdenticalLines);
    }
    if phi_invariant(f1.line(), f2.line()) <= TOL_ORTHOGONAL {
        return Some(Degeneracy::OrthogonalLines);
    }
    if f2.line().contains_boundary_point(f1.point())
        || f1.line().contains_boundary_point(f2.point())
    {
        return Some(Degeneracy::PointOnLine);
    }
    None
}

/// The flag-pair invariant
/// `m12 = <c1,c2><p1,p2> / (<c1,p2><p1,c2>)`.
pub fn m_invariant(f1: &Flag, f2: &Flag) -> Result<C64, InvariantError> {
    if let Some(reason) = pair_degeneracy(f1, f2) {
        return Err(InvariantError::NonGenericPair(reason));
    }
    let j = HForm::standard();
    let c1 = f1.line().unit_polar();
    let c2 = f2.line().unit_polar();
    let (p1, p2) = (f1.point(), f2.point());
    let num = herm(&c1, &c2, &j) * herm(p1, p2, &j);
    let den = herm(&c1, p2, &j) * herm(p1, &c2, &j);
    Ok(num / den)
}

/// The coordinate of the point of `f1` against the ordered line pair:
/// `delta = <c2,c3><p1,c2> / (<c2,c2><p1,c3>)`.
pub fn delta_invariant(
    f1: &Flag,
    line2: &ComplexLine,
    line3: &ComplexLine,
) -> Result<C64, InvariantError> {
    let lines = [f1.line(), line2, line3];
    for a in 0..3 {
        for b in (a + 1)..3 {
            if proj_dist(&lines[a].unit_polar(), &lines[b].unit_polar()) <= TOL_IDENTICAL {
                return Err(InvariantError::NonGeneric(Degeneracy::IdenticalLines));
            }
            if phi_invariant(lines[a], lines[b]) <= TOL_ORTHOGONAL {
                return Err(InvariantError::NonGeneric(Degeneracy::OrthogonalLines));
            }
        }
    }
    if line2.contains_boundary_point(f1.point()) || line3.contains_boundary_point(f1.point()) {
        return Err(InvariantError::NonGeneric(Degeneracy::PointOnLine));
    }
    let j = HForm::standard();
    let c2 = line2.unit_polar();
    let c3 = line3.unit_polar();
    let num = herm(&c2, &c3, &j) * herm(f1.point(), &c2, &j);
    let den = herm(f1.point(), &c3, &j);
    Ok(num / den)
}

/// The full invariant record of a flag triple. The m values are computed
/// directly from their definition and checked against their expression in
/// the other invariants; disagreement beyond `TOL_CONSTRAINTS` marks the
/// triple as numerically degenerate.
pub fn triple_invariants(
    f1: &Flag,
    f2: &Flag,
    f3: &Flag,
) -> Result<TripleFlagInvariant, InvariantError> {
    let flags = [f1, f2, f3];
    for a in 0..3 {
        let b = (a + 1) % 3;
        if let Some(reason) = pair_degeneracy(flags[a], flags[b]) {
            return Err(InvariantError::NonGenericTriple {
                i: a + 1,
                j: b + 1,
                reason,
            });
        }
    }
    check_independent(f1.line(), f2.line(), f3.line())?;

    let j = HForm::standard();
    let c: Vec<CVec3> = flags.iter().map(|f| f.line().unit_polar()).collect();
    let p: Vec<&CVec3> = flags.iter().map(|f| f.point()).collect();
    let h = |a: usize, b: usize| herm(&c[a], &c[b], &j);
    let delta_of = |i: usize, jj: usize, k: usize| {
        herm(&c[jj], &c[k], &j) * herm(p[i], &c[jj], &j) / herm(p[i], &c[k], &j)
    };

    let mut inv = TripleFlagInvariant {
        phi12: h(0, 1).norm_sqr(),
        phi23: h(1, 2).norm_sqr(),
        phi31: h(2, 0).norm_sqr(),
        big_phi: h(0, 1) * h(1, 2) * h(2, 0),
        delta1_23: delta_of(0, 1, 2),
        delta1_32: delta_of(0, 2, 1),
        delta2_31: delta_of(1, 2, 0),
        delta2_13: delta_of(1, 0, 2),
        delta3_12: delta_of(2, 0, 1),
        delta3_21: delta_of(2, 1, 0),
        m12: C64::from(0.0),
        m23: C64::from(0.0),
        m31: C64::from(0.0),
    };
    inv.m12 = m_invariant(f1, f2)?;
    inv.m23 = m_invariant(f2, f3)?;
    inv.m31 = m_invariant(f3, f1)?;

    for (i, m) in [inv.m12, inv.m23, inv.m31].into_iter().enumerate() {
        let derived = inv.derived_m(i);
        if (m - derived).norm() > TOL_CONSTRAINTS * m.norm().max(1.0) {
            return Err(InvariantError::InvalidInvariants(
                "m value disagrees with its expression in the deltas",
            ));
        }
    }
    Ok(inv)
}

/// Rebuilds a line triple realizing the given invariants: form the target
/// Gram matrix, split it by its eigendecomposition, and change basis so
/// the ambient form is the standard one. Polars come out unit-norm.
pub fn reconstruct_lines(
    inv: &TripleLineInvariant,
) -> Result<[ComplexLine; 3], InvariantError> {
    for phi in [inv.phi12, inv.phi23, inv.phi31] {
        if !(phi > TOL_ORTHOGONAL) {
            return Err(InvariantError::InvalidInvariants(
                "phi values must be positive",
            ));
        }
    }
    let prod = inv.phi12 * inv.phi23 * inv.phi31;
    if (inv.big_phi.norm_sqr() - prod).abs() > 1e-9 * prod {
        return Err(InvariantError::InvalidInvariants(
            "modulus relation |Phi|^2 = phi12 phi23 phi31 fails",
        ));
    }
    if inv.delta() >= 0.0 {
        return Err(InvariantError::InvalidInvariants(
            "Gram discriminant must be negative",
        ));
    }

    let s12 = inv.phi12.sqrt();
    let s23 = inv.phi23.sqrt();
    let h31 = inv.big_phi / C64::from(s12 * s23);
    let one = C64::from(1.0);
    let h = CMat3::new(
        one,
        C64::from(s12),
        h31.conj(),
        C64::from(s12),
        one,
        C64::from(s23),
        h31,
        C64::from(s23),
        one,
    );

    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if !(lambda[0] > 0.0 && lambda[1] > 0.0 && lambda[2] < 0.0) {
        return Err(InvariantError::InvalidInvariants(
            "Gram matrix does not have signature (2,1)",
        ));
    }
    let mut w = CMat3::zeros();
    for (col, &k) in order.iter().enumerate() {
        let scale = C64::from(lambda[col].abs().sqrt());
        w.set_column(col, &(eig.eigenvectors.column(k) * scale));
    }
    // Change of basis taking the split form diag(1,1,-1) to the standard
    // antidiagonal one; the polars are the columns of w_j * w^T.
    let r2 = C64::from(1.0 / 2.0f64.sqrt());
    let z = C64::from(0.0);
    let w_j = CMat3::new(r2, z, r2, z, one, z, r2, z, -r2);
    let cm = w_j * w.transpose();

    let mk = |k: usize| -> Result<ComplexLine, InvariantError> {
        ComplexLine::from_polar(cm.column(k).into_owned()).map_err(InvariantError::Geometry)
    };
    Ok([mk(0)?, mk(1)?, mk(2)?])
}

/// Moves a lift that is nearly null and nearly on the line onto the
/// boundary circle exactly, preserving its frame phases. The circle
/// constraints pin lifts only up to their own residual, so reconstruction
/// snaps before building flags.
fn snap_to_boundary(line: &ComplexLine, p: &CVec3) -> Result<CVec3, InvariantError> {
    let j = HForm::standard();
    let (u, v) = line.boundary_frame();
    let a = herm(p, &u, &j);
    let b = -herm(p, &v, &j);
    if a.norm() <= 1e-8 * p.norm() || b.norm() <= 1e-8 * p.norm() {
        return Err(InvariantError::InvalidInvariants(
            "reconstructed lift is far from the boundary circle",
        ));
    }
    let scale = (a.norm() * b.norm()).sqrt();
    let au = a / a.norm() * scale;
    let bv = b / b.norm() * scale;
    Ok(u.map(|x| x * au) + v.map(|x| x * bv))
}

/// Rebuilds a flag triple realizing a full invariant record: reconstruct
/// the lines, then place each point through its coordinates in the
/// anti-dual basis.
pub fn reconstruct_flags(inv: &TripleFlagInvariant) -> Result<[Flag; 3], InvariantError> {
    inv.validate(TOL_CONSTRAINTS)?;
    let lines = reconstruct_lines(&TripleLineInvariant {
        phi12: inv.phi12,
        phi23: inv.phi23,
        phi31: inv.phi31,
        big_phi: inv.big_phi,
    })?;
    let j = HForm::standard();
    let c: Vec<CVec3> = lines.iter().map(|l| l.unit_polar()).collect();
    let d = anti_dual_basis(&c[0], &c[1], &c[2], &j).map_err(GeometryError::from)?;
    let h = |a: usize, b: usize| herm(&c[a], &c[b], &j);

    // Each point expands in the anti-dual basis with no component on its
    // own line's dual vector; the remaining two coefficients are pinned by
    // the reversed deltas (unit polar norms).
    let p1 = d[1].map(|x| x * h(2, 1)) + d[2].map(|x| x * inv.delta1_32);
    let p2 = d[0].map(|x| x * h(2, 0)) + d[2].map(|x| x * inv.delta2_31);
    let p3 = d[0].map(|x| x * inv.delta3_12) + d[1].map(|x| x * h(0, 1));

    let mut flags = Vec::with_capacity(3);
    for (line, p) in lines.iter().zip([p1, p2, p3]) {
        let snapped = snap_to_boundary(line, &p)?;
        flags.push(Flag::new(line.clone(), snapped).map_err(InvariantError::Geometry)?);
    }
    let mut it = flags.into_iter();
    Ok([
        it.next().unwrap(),
        it.next().unwrap(),
        it.next().unwrap(),
    ])
}

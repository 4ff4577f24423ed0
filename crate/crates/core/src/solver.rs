//! Per-triangle recovery of the delta decoration from (m, Phi) edge data.
//!
//! The phi values and the triple product pin the three lines up to
//! isometry; the remaining freedom in a decoration is the boundary point
//! on the first line. Realizing each edge's m invariant as a holomorphic
//! map swapping the two lines and walking once around the triangle gives
//! a map preserving the first line, and the admissible boundary points
//! are exactly its fixed points on the boundary circle: generically two,
//! sometimes none when the restricted map is elliptic. The fixed points
//! come from the eigenvectors of the restriction to the line's
//! complement, with an angular-defect bisection as independent route and
//! as fallback when the eigenvalues nearly collide.

use std::f64::consts::PI;

use nalgebra::Matrix3x2;
use thiserror::Error;

use crate::geometry::{ComplexLine, Flag, GeometryError};
use crate::hermitian::{C64, CMat3, CVec3, HForm, HermitianError, herm, hermitian_cross};
use crate::invariants::{
    InvariantError, TripleFlagInvariant, TripleLineInvariant, reconstruct_lines,
    triple_invariants,
};
use crate::linalg::{eigen2, lstsq_2, proj_dist};
use crate::surface::{
    ComplexError, Decoration, DecorationError, FaceDecoration, MDecoration, Triangulation,
};

/// Residual bound for restricting the triangle walk to the first line's
/// complement; a larger defect means the walk does not preserve the line.
pub const TOL_RESTRICT: f64 = 1e-8;

/// Relative eigenvalue gap below which the restriction eigenvectors are
/// unreliable and the bisection route takes over.
pub const TOL_EIGEN_GAP: f64 = 1e-8;

/// Absolute bound on `|<p,p>| / |p|^2` for accepting an eigenvector as a
/// boundary point.
pub const TOL_FIXED_NULL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("m invariant must avoid 0 and 1")]
    InvalidM,
    #[error("phi on edge pair {pair} is {phi:.9}, within 1e-6 of the asymptotic value 1")]
    DegenerateInput { pair: &'static str, phi: f64 },
    #[error("modulus relation |Phi|^2 = phi12 phi23 phi31 fails, relative residual {0:.3e}")]
    ModulusMismatch(f64),
    #[error("Gram discriminant {0:.6} is not negative, the lines do not bound a generic triangle")]
    NonNegativeGram(f64),
    #[error("triangle walk does not preserve the first line, restriction residual {0:.3e}")]
    RestrictionFailed(f64),
    #[error("face {face} has no admissible solution for the requested branch")]
    NoAdmissibleSolution { face: usize },
    #[error("branch selects {found} bits for {expected} faces")]
    BranchLength { found: usize, expected: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Decoration(#[from] DecorationError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
}

/// The phi invariant induced by an m invariant: `|m / (m - 1)|^2`.
pub fn phi_of_m(m: C64) -> f64 {
    (m / (m - C64::from(1.0))).norm_sqr()
}

/// The edge data of one triangle: the three m invariants read along the
/// cyclic sides and the triple product of the lines.
#[derive(Clone, Copy, Debug)]
pub struct TriangleSolveInput {
    pub m12: C64,
    pub m23: C64,
    pub m31: C64,
    pub big_phi: C64,
}

impl TriangleSolveInput {
    pub fn phis(&self) -> [f64; 3] {
        [phi_of_m(self.m12), phi_of_m(self.m23), phi_of_m(self.m31)]
    }

    pub fn gram_discriminant(&self) -> f64 {
        let [p12, p23, p31] = self.phis();
        1.0 - p12 - p23 - p31 + 2.0 * self.big_phi.re
    }

    /// Checks the solvability preconditions: every m away from 0 and 1,
    /// every phi away from 1, the modulus relation at 1e-9 relative, and
    /// a negative Gram discriminant.
    pub fn validate(&self) -> Result<(), SolveError> {
        let one = C64::from(1.0);
        for m in [self.m12, self.m23, self.m31] {
            if m.norm() < 1e-12 || (m - one).norm() < 1e-12 {
                return Err(SolveError::InvalidM);
            }
        }
        let [p12, p23, p31] = self.phis();
        for (pair, phi) in [("12", p12), ("23", p23), ("31", p31)] {
            if (phi - 1.0).abs() < 1e-6 {
                return Err(SolveError::DegenerateInput { pair, phi });
            }
        }
        let prod = p12 * p23 * p31;
        let residual = (self.big_phi.norm_sqr() - prod).abs() / prod.max(1e-300);
        if residual > 1e-9 {
            return Err(SolveError::ModulusMismatch(residual));
        }
        let delta = self.gram_discriminant();
        if delta >= 0.0 {
            return Err(SolveError::NonNegativeGram(delta));
        }
        Ok(())
    }
}

/// One lift of a triangle's edge data: the full invariant record together
/// with a realizing flag triple on the reconstructed lines.
#[derive(Clone, Debug)]
pub struct TriangleSolution {
    pub record: TripleFlagInvariant,
    pub flags: [Flag; 3],
}

/// An adapted basis for a generic line pair: columns are the unit polar
/// of `ci`, the unit polar of `cj` phase-aligned so that `b = <ci, cj>`
/// is real positive, and the common orthogonal vector scaled to
/// `<d, d> = b^2 - 1`. The Gram matrix of the columns is
/// `[[1, b, 0], [b, 1, 0], [0, 0, b^2 - 1]]`.
pub fn pair_basis(ci: &ComplexLine, cj: &ComplexLine) -> Result<(CMat3, f64), SolveError> {
    let j = HForm::standard();
    let ci_u = ci.unit_polar();
    let cj_u = cj.unit_polar();
    let b0 = herm(&ci_u, &cj_u, &j);
    let b = b0.norm();
    if b < 1e-12 {
        return Err(InvariantError::InvalidInvariants("line pair is orthogonal").into());
    }
    let cj_al = cj_u.map(|x| x * (b0 / C64::from(b)));
    let d0 = hermitian_cross(&ci_u, &cj_al, &j)?;
    let s = herm(&d0, &d0, &j).re;
    let d = d0.map(|x| x * C64::from(((b * b - 1.0) / s).sqrt()));
    Ok((CMat3::from_columns(&[ci_u, cj_al, d]), b))
}

/// The triangle-walk factor of the ordered pair `(ci, cj)` with invariant
/// `m`: the holomorphic map swapping the two lines whose action on
/// boundary points realizes `m`. In the adapted pair basis it swaps the
/// first two coordinates and multiplies the third by `1/u` with
/// `u = -(b^2 + m (1 - b^2)) / b`, a unit-modulus number whenever `m`
/// lies on the pair's m circle.
pub fn realization_map(ci: &ComplexLine, cj: &ComplexLine, m: C64) -> Result<CMat3, SolveError> {
    let (basis, b) = pair_basis(ci, cj)?;
    let u = -(C64::from(b * b) + m * (1.0 - b * b)) / C64::from(b);
    if u.norm() < 1e-12 {
        return Err(SolveError::InvalidM);
    }
    let u = u / C64::from(u.norm());
    let inverse = basis
        .try_inverse()
        .ok_or(InvariantError::InvalidInvariants("pair basis is singular"))?;
    let o = C64::from(0.0);
    let one = C64::from(1.0);
    let swap = CMat3::new(o, one, o, one, o, o, o, o, u.inv());
    Ok(basis * swap * inverse)
}

/// The frame angle of a boundary point of the line: the `theta` with
/// `p` proportional to `exp(i theta) u + v` in the line's boundary frame.
pub fn boundary_angle(line: &ComplexLine, p: &CVec3) -> f64 {
    let j = HForm::standard();
    let (u, v) = line.boundary_frame();
    (-herm(p, &u, &j) / herm(p, &v, &j)).arg()
}

fn snap_to_boundary(line: &ComplexLine, p: &CVec3) -> CVec3 {
    line.boundary_point(boundary_angle(line, p))
}

/// Fixed points of a holomorphic map preserving `line`, restricted to the
/// boundary circle: scans the angular defect on a 10^4 grid and bisects
/// every sign change. Independent of the eigenvector route, and the
/// fallback when the restriction eigenvalues nearly collide.
pub fn boundary_fixed_points(map: &CMat3, line: &ComplexLine) -> Vec<CVec3> {
    const GRID: usize = 10_000;
    let j = HForm::standard();
    let (u, v) = line.boundary_frame();
    let point_at = |theta: f64| -> CVec3 { u.map(|x| x * C64::from_polar(1.0, theta)) + v };
    let defect = |theta: f64| -> f64 {
        let image = map * point_at(theta);
        let d = (-herm(&image, &u, &j) / herm(&image, &v, &j)).arg() - theta;
        (d + PI).rem_euclid(2.0 * PI) - PI
    };
    let step = 2.0 * PI / GRID as f64;
    let mut zeros: Vec<f64> = Vec::new();
    let mut prev = defect(0.0);
    let mut prev_theta = 0.0;
    for k in 1..=GRID {
        let theta = k as f64 * step;
        let cur = defect(theta);
        if prev == 0.0 {
            zeros.push(prev_theta);
        } else if prev.signum() != cur.signum() && (prev - cur).abs() < PI {
            let (mut lo, mut hi, mut flo) = (prev_theta, theta, prev);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = defect(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            zeros.push(0.5 * (lo + hi));
        }
        prev = cur;
        prev_theta = theta;
    }
    let mut points: Vec<CVec3> = Vec::new();
    for theta in zeros {
        let p = point_at(theta);
        if points.iter().all(|q| proj_dist(q, &p) > 1e-6) {
            points.push(p);
        }
    }
    points
}

/// Solves one triangle: every decoration realizing the given edge data.
/// Generic inputs admit zero or two solutions; each returned record
/// reproduces the input m invariants.
pub fn solve_triangle(input: &TriangleSolveInput) -> Result<Vec<TriangleSolution>, SolveError> {
    input.validate()?;
    let [p12, p23, p31] = input.phis();
    let line_inv = TripleLineInvariant {
        phi12: p12,
        phi23: p23,
        phi31: p31,
        big_phi: input.big_phi,
    };
    let [c1, c2, c3] = reconstruct_lines(&line_inv)?;
    let w12 = realization_map(&c1, &c2, input.m12)?;
    let w23 = realization_map(&c2, &c3, input.m23)?;
    let w31 = realization_map(&c3, &c1, input.m31)?;
    let walk = w31 * w23 * w12;

    let (u, v) = c1.boundary_frame();
    let frame = Matrix3x2::from_columns(&[u, v]);
    let image = walk * frame;
    let restriction =
        lstsq_2(&frame, &image).ok_or(SolveError::RestrictionFailed(f64::INFINITY))?;
    let residual = (image - frame * restriction).norm() / image.norm().max(1e-300);
    if residual > TOL_RESTRICT {
        return Err(SolveError::RestrictionFailed(residual));
    }

    let mut pairs = eigen2(&restriction);
    pairs.sort_by(|a, b| b.0.norm().total_cmp(&a.0.norm()));
    let gap = (pairs[0].0 - pairs[1].0).norm();
    let scale = pairs[0].0.norm().max(1e-300);
    let points: Vec<CVec3> = if gap > TOL_EIGEN_GAP * scale {
        let j = HForm::standard();
        pairs
            .iter()
            .filter_map(|(_, w)| {
                let p = frame * w;
                let null_residual = herm(&p, &p, &j).norm();
                if null_residual <= TOL_FIXED_NULL * p.norm_squared() {
                    Some(snap_to_boundary(&c1, &p))
                } else {
                    None
                }
            })
            .collect()
    } else {
        boundary_fixed_points(&walk, &c1)
    };

    let mut solutions = Vec::new();
    for p1 in points {
        let p2 = w12 * p1;
        let p3 = w23 * p2;
        let f1 = Flag::new(c1.clone(), p1)?;
        let f2 = Flag::new(c2.clone(), p2)?;
        let f3 = Flag::new(c3.clone(), p3)?;
        let record = triple_invariants(&f1, &f2, &f3)?;
        solutions.push(TriangleSolution {
            record,
            flags: [f1, f2, f3],
        });
    }
    Ok(solutions)
}

/// The solve input of one face of an m-decorated triangulation, with the
/// local side orientations applied.
pub fn face_solve_input(
    t: &Triangulation,
    md: &MDecoration,
    face: usize,
) -> Result<TriangleSolveInput, SolveError> {
    if md.m.len() != t.edge_count() {
        return Err(DecorationError::MLength {
            found: md.m.len(),
            expected: t.edge_count(),
        }
        .into());
    }
    if md.big_phi.len() != t.face_count() {
        return Err(DecorationError::BigPhiLength {
            found: md.big_phi.len(),
            expected: t.face_count(),
        }
        .into());
    }
    let mut ms = [C64::from(0.0); 3];
    for (slot, m) in ms.iter_mut().enumerate() {
        *m = md
            .local_m(t, face, slot)
            .ok_or(DecorationError::UngluedSlot { face, slot })?;
    }
    Ok(TriangleSolveInput {
        m12: ms[0],
        m23: ms[1],
        m31: ms[2],
        big_phi: md.big_phi[face],
    })
}

/// Lifts m coordinates to a full decoration. Bit `f` of `branch` picks
/// which of face `f`'s solutions to keep, ordered by attraction; the
/// error names the first face that lacks the requested solution.
pub fn lift_mdecoration(
    t: &Triangulation,
    md: &MDecoration,
    branch: &[bool],
) -> Result<Decoration, SolveError> {
    t.validate()?;
    if branch.len() != t.face_count() {
        return Err(SolveError::BranchLength {
            found: branch.len(),
            expected: t.face_count(),
        });
    }
    let mut faces = Vec::with_capacity(t.face_count());
    for (f, &bit) in branch.iter().enumerate() {
        let input = face_solve_input(t, md, f)?;
        let solutions = solve_triangle(&input)?;
        let Some(solution) = solutions.get(usize::from(bit)) else {
            return Err(SolveError::NoAdmissibleSolution { face: f });
        };
        let rec = &solution.record;
        faces.push(FaceDecoration {
            big_phi: rec.big_phi,
            delta: [rec.delta1_23, rec.delta2_31, rec.delta3_12],
        });
    }
    let phi = md.m.iter().map(|&m| phi_of_m(m)).collect();
    Ok(Decoration { phi, faces })
}

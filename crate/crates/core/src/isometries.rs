//! Elementary isometries attached to flag pairs and triples: the branch
//! map for cube roots, normalization to standard position, and the
//! transfer, exchange and Heisenberg matrices.
//!
//! The closed-form matrices live in the standard frame, where the first
//! flag is `p1 = (1,0,0)`, `c1 = (0,1,0)` and the second polar is
//! `(a, sqrt 2, 1)` with `a` real. [`normalize_to_standard`] produces the
//! unique isometry carrying a generic pair there; callers that need
//! world-frame elements conjugate by it.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geometry::{
    ComplexLine, Flag, GeometryError, Isometry, lagrangian_fix_p_preserve_two_lines,
    lagrangian_swap_lines_and_points,
};
use crate::hermitian::{C64, CMat3, CVec3, HForm, herm};
use crate::invariants::{
    Degeneracy, InvariantError, TOL_IDENTICAL, TOL_ORTHOGONAL, TripleFlagInvariant,
    pair_degeneracy,
};
use crate::linalg::{proj_dist, su_normalize};

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Error)]
pub enum ElementaryError {
    #[error("m invariant must avoid 0 and 1")]
    InvalidM,
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The modulus-preserving branch of the cube-root phase map:
/// `rho e^{i theta}` with `theta` in `(-pi, pi]` goes to
/// `rho e^{i theta / 3}`, so the result's argument lies in
/// `(-pi/3, pi/3]`. An argument landing exactly on `-pi` is folded to
/// `pi` before dividing; `theta(0) = 0`.
pub fn theta(z: C64) -> C64 {
    let rho = z.norm();
    if rho == 0.0 {
        return C64::from(0.0);
    }
    let mut arg = z.arg();
    if arg <= -PI {
        arg = PI;
    }
    C64::from_polar(rho, arg / 3.0)
}

/// A generic flag-line pair carried to standard position. The normalizer
/// maps the flag to `p1 = (1,0,0)`, `c1 = (0,1,0)` and the second polar
/// projectively to `(a, sqrt 2, 1)`; the pair invariant is
/// `phi = 1 / (1 + a)` with `a` in `(-1, infinity)`.
#[derive(Clone, Debug)]
pub struct StandardPair {
    pub a: f64,
    pub normalizer: Isometry,
}

/// The parameters of a transfer matrix; `mu` is nonzero.
#[derive(Clone, Copy, Debug)]
pub struct TransferParams {
    pub mu: C64,
    pub t: f64,
}

/// The one-parameter family stabilizing the standard flag: diagonal up to
/// the corner entry `i t lambda`, unimodular and form-preserving for
/// every nonzero `lambda` and real `t`.
fn stabilizer(lambda: C64, t: f64) -> CMat3 {
    let o = C64::from(0.0);
    CMat3::new(
        lambda,
        o,
        C64::i() * t * lambda,
        o,
        lambda.conj() / lambda,
        o,
        o,
        o,
        lambda.conj().inv(),
    )
}

/// A frame `(p, c_hat, q)` for a flag whose Gram matrix is exactly the
/// standard form: `q` is the second null direction of the line, scaled so
/// that `<p, q> = 1`. Its inverse carries the flag to the standard one.
fn flag_frame(f: &Flag) -> CMat3 {
    let j = HForm::standard();
    let chat = f.line().unit_polar();
    let p = f.point() / C64::from(f.point().norm());
    let mut best: Option<(CVec3, C64)> = None;
    for k in 0..3 {
        let mut e = CVec3::zeros();
        e[k] = C64::from(1.0);
        let w = e - chat.map(|x| x * herm(&e, &chat, &j));
        let s = herm(&p, &w, &j);
        if best.as_ref().is_none_or(|(_, sb)| s.norm() > sb.norm()) {
            best = Some((w, s));
        }
    }
    let (w, s) = best.unwrap();
    let x = -herm(&w, &w, &j) * s.conj() / C64::from(2.0 * s.norm_sqr());
    let q = (p.map(|y| y * x) + w) / s.conj();
    CMat3::from_columns(&[p, chat, q])
}

/// Carries a generic pair (flag, second line) to standard position and
/// reports the unique normalizer together with the real parameter `a` of
/// the second line's image. The internal cube root is taken on the
/// [`theta`] branch, so the SU(2,1) lift is a deterministic function of
/// the input.
pub fn normalize_to_standard(
    f1: &Flag,
    line2: &ComplexLine,
) -> Result<StandardPair, ElementaryError> {
    let c1 = f1.line().unit_polar();
    let c2 = line2.unit_polar();
    let reason = if proj_dist(&c1, &c2) <= TOL_IDENTICAL {
        Some(Degeneracy::IdenticalLines)
    } else if herm(&c1, &c2, &HForm::standard()).norm_sqr() <= TOL_ORTHOGONAL {
        Some(Degeneracy::OrthogonalLines)
    } else if line2.incidence_residual(f1.point()) <= crate::geometry::TOL_INCIDENCE {
        Some(Degeneracy::PointOnLine)
    } else {
        None
    };
    if let Some(reason) = reason {
        return Err(InvariantError::NonGenericPair(reason).into());
    }

    let n0 = flag_frame(f1)
        .try_inverse()
        .expect("flag frames are unimodular up to phase");
    let v = n0 * line2.polar();
    if v[2].norm() <= 1e-12 * v.norm() {
        return Err(InvariantError::NonGenericPair(Degeneracy::PointOnLine).into());
    }
    let v = v / v[2];
    if v[1].norm() <= 1e-12 {
        return Err(InvariantError::NonGenericPair(Degeneracy::OrthogonalLines).into());
    }
    let t = -v[0].im;
    let lambda = theta(v[1]) * SQRT2 / v[1].norm_sqr();
    let n = su_normalize(&(stabilizer(lambda, t) * n0));
    let normalizer = Isometry::holomorphic(n)?;

    let image = normalizer.apply_vec(line2.polar());
    let a = (image[0] / image[2]).re;
    Ok(StandardPair { a, normalizer })
}

impl TransferParams {
    /// Reads the transfer parameters off a flag-triple record:
    /// `mu = theta(Phi / (delta1_23 phi31))` and
    /// `t = Im(2 delta1_23 (phi23 - conj(Phi)) / (phi12 phi23))`.
    pub fn of(inv: &TripleFlagInvariant) -> Result<TransferParams, ElementaryError> {
        TransferParams::oriented(inv, 0, 1, 2)
    }

    /// The transfer parameters of the record reordered to `(i, j, k)`
    /// (any permutation of `(0, 1, 2)`): the parameters of the element
    /// fixing flag `i` and carrying line `j` to line `k` in the frame
    /// where the pair `(flag i, line j)` is standard.
    pub fn oriented(
        inv: &TripleFlagInvariant,
        i: usize,
        j: usize,
        k: usize,
    ) -> Result<TransferParams, ElementaryError> {
        for (a, b) in [(i, j), (j, k), (k, i)] {
            if inv.phi_of(a, b) <= TOL_ORTHOGONAL {
                let reason = Degeneracy::OrthogonalLines;
                return Err(InvariantError::NonGenericTriple { i: a + 1, j: b + 1, reason }.into());
            }
        }
        let delta = inv.delta_of(i, j, k);
        let phi_fwd = inv.big_phi_of(i, j, k);
        if delta.norm() <= TOL_ORTHOGONAL || phi_fwd.norm() <= TOL_ORTHOGONAL {
            return Err(InvariantError::InvalidInvariants(
                "transfer parameter mu degenerates to zero",
            )
            .into());
        }
        let mu = theta(phi_fwd / (delta * C64::from(inv.phi_of(i, k))));
        let t = (delta
            * C64::from(2.0)
            * (C64::from(inv.phi_of(j, k)) - inv.big_phi_of(i, k, j))
            / C64::from(inv.phi_of(i, j) * inv.phi_of(j, k)))
        .im;
        Ok(TransferParams { mu, t })
    }
}

/// The transfer matrix of the parameters, an exact SU(2,1) member of the
/// standard-flag stabilizer family.
pub fn transfer_from_params(params: &TransferParams) -> Result<Isometry, ElementaryError> {
    Ok(Isometry::holomorphic(stabilizer(params.mu, params.t))?)
}

/// The transfer matrix of an ordered flag triple, in the frame where the
/// pair (flag 1, line 2) is standard. It fixes the standard flag and
/// carries the third line to standard position with respect to it, so it
/// factors as `G13 G12^{-1}` through the pair normalizers.
pub fn transfer_matrix(inv: &TripleFlagInvariant) -> Result<Isometry, ElementaryError> {
    transfer_from_params(&TransferParams::of(inv)?)
}

/// The exchange matrix of a pair with invariant `m12`, in the standard
/// frame: with `z = 1 / conj(m12)` and `lambda = 2 theta(z(z-1))` it
/// swaps the two lines, maps `p2` to `p1`, and composes with its own
/// conjugate to the identity.
pub fn exchange_matrix(m12: C64) -> Result<Isometry, ElementaryError> {
    let one = C64::from(1.0);
    if m12.norm() < 1e-12 || (m12 - one).norm() < 1e-12 {
        return Err(ElementaryError::InvalidM);
    }
    let z = m12.conj().inv();
    let zb = z.conj();
    let lam = theta(z * (z - one)) * 2.0;
    let lb = lam.conj();
    let w = z - zb - C64::from(z.norm_sqr());
    let den = C64::from(4.0 * (z * (z - one)).norm_sqr());
    let sq2 = C64::from(SQRT2);
    let zz = C64::from(z.norm_sqr());
    let m = CMat3::new(
        lam * w / den,
        sq2 * zb * lam * w / den + lam / (sq2 * (z - one)),
        lam / (one - z) + lam * w * w / den,
        lb / (sq2 * lam * (zb - one)),
        lb / (lam * (zb - one)),
        lb * (zz - z - zb) / (lam * (zb - one) * sq2),
        lb.inv(),
        sq2 * zb / lb,
        (z - zb - zz) / lb,
    );
    Ok(Isometry::holomorphic(m)?)
}

/// The unipotent upper-triangular translation with Heisenberg parameters
/// `(w, tau)`; a parabolic isometry fixing `(1,0,0)`.
pub fn heisenberg_translation(w: C64, tau: f64) -> Isometry {
    let o = C64::from(0.0);
    let one = C64::from(1.0);
    let m = CMat3::new(
        one,
        -w.conj() * SQRT2,
        C64::new(-w.norm_sqr(), tau),
        o,
        one,
        w * SQRT2,
        o,
        o,
        one,
    );
    Isometry::holomorphic(m).expect("unipotent translations preserve the form")
}

/// The exchange isometry of a generic pair built geometrically, as the
/// composition of two Lagrangian reflections: one fixing `p1` and
/// preserving both lines, then one swapping the lines while exchanging
/// `p1` with the first reflection's image of `p2`. Agrees in PU(2,1)
/// with the conjugated [`exchange_matrix`] of the pair's m invariant.
pub fn exchange_isometry_geometric(f1: &Flag, f2: &Flag) -> Result<Isometry, ElementaryError> {
    if let Some(reason) = pair_degeneracy(f1, f2) {
        return Err(InvariantError::NonGenericPair(reason).into());
    }
    let i2 = lagrangian_fix_p_preserve_two_lines(f1.line(), f2.line(), f1.point())?;
    let q = i2.apply_vec(f2.point());
    let i1 = lagrangian_swap_lines_and_points(f1.line(), f2.line(), f1.point(), &q)?;
    Ok(i1.as_isometry().compose(&i2.as_isometry()))
}

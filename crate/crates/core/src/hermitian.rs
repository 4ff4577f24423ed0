//! Hermitian linear algebra on C^3 for forms of signature (2,1).
//!
//! Conventions shared by the whole crate:
//!
//! * the pairing is linear in the first slot and conjugate-linear in the
//!   second, `herm(v, w) = v^T G conj(w)`, so Gram matrices satisfy
//!   `G[i][j] = herm(b_i, b_j)`;
//! * the default form is the antidiagonal matrix J with unit entries;
//!   its negative cone projectivizes to the complex hyperbolic plane,
//!   null vectors to its boundary, positive vectors to polar vectors of
//!   complex lines.
//!
//! Everything here is projective: vectors matter only up to complex scale,
//! and all tolerances are scale-invariant.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type CVec3 = Vector3<C64>;
pub type CMat3 = Matrix3<C64>;

/// Hermitian-symmetry tolerance for Gram matrices, relative to the largest
/// entry modulus. Pairing round-off stays far below this; anything worse
/// indicates the matrix was not produced by a Hermitian pairing.
pub const TOL_HERM: f64 = 1e-12;

/// A vector is classified null when `|herm(v,v)|` is below this factor
/// times the squared Euclidean norm of `v`.
pub const TOL_NULL: f64 = 1e-10;

/// Eigenvalues below this factor times the largest eigenvalue modulus
/// count as zero when computing a signature.
pub const TOL_SIGNATURE_ZERO: f64 = 1e-10;

/// Independence threshold for the determinant of a matrix whose rows have
/// been rescaled to unit Euclidean norm.
pub const TOL_INDEPENDENCE: f64 = 1e-12;

/// Post-condition tolerance for anti-dual bases: `herm(d_i, c_j)` must
/// match the Kronecker delta within this.
pub const TOL_ANTI_DUAL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum HermitianError {
    #[error("the zero vector does not represent a point of CP^2")]
    ZeroVector,
    #[error("matrix is not Hermitian: relative asymmetry {0:.3e}")]
    NotHermitian(f64),
    #[error("form has signature {0}, expected (2,1)")]
    WrongSignature(Sign3),
    #[error("vectors are numerically dependent: scaled determinant {0:.3e}")]
    DegenerateBasis(f64),
}

/// Inertia of a Hermitian matrix: counts of positive, negative and
/// numerically zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sign3 {
    pub n_pos: usize,
    pub n_neg: usize,
    pub n_zero: usize,
}

impl Sign3 {
    pub const fn new(n_pos: usize, n_neg: usize, n_zero: usize) -> Self {
        Sign3 { n_pos, n_neg, n_zero }
    }

    /// The signature of a valid form on C^3.
    pub const fn hyperbolic() -> Self {
        Sign3::new(2, 1, 0)
    }
}

impl std::fmt::Display for Sign3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}+, {}-, {} zero)", self.n_pos, self.n_neg, self.n_zero)
    }
}

/// Sign class of a vector under the form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorClass {
    Negative,
    Null,
    Positive,
}

/// A nonzero vector of C^3, the projective representative of a point.
#[derive(Clone, Debug)]
pub struct HVector {
    v: CVec3,
}

impl HVector {
    pub fn new(v: CVec3) -> Result<Self, HermitianError> {
        if v.iter().all(|x| x.re == 0.0 && x.im == 0.0) {
            return Err(HermitianError::ZeroVector);
        }
        Ok(HVector { v })
    }

    pub fn vec(&self) -> &CVec3 {
        &self.v
    }

    pub fn into_inner(self) -> CVec3 {
        self.v
    }
}

/// A Hermitian form of signature (2,1), stored as its Gram matrix.
#[derive(Clone, Debug)]
pub struct HForm {
    gram: CMat3,
}

impl HForm {
    /// The standard antidiagonal form J.
    pub fn standard() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        HForm {
            gram: CMat3::new(z, z, o, z, o, z, o, z, z),
        }
    }

    /// Wraps an arbitrary Gram matrix after checking hermiticity and
    /// signature. The stored matrix is re-symmetrized so that pairings are
    /// conjugate-symmetric to machine precision.
    pub fn new(gram: CMat3) -> Result<Self, HermitianError> {
        let asym = hermitian_asymmetry(&gram);
        if asym > TOL_HERM {
            return Err(HermitianError::NotHermitian(asym));
        }
        let gram = (gram + gram.adjoint()).map(|x| 0.5 * x);
        let sig = signature(&gram)?;
        if sig != Sign3::hyperbolic() {
            return Err(HermitianError::WrongSignature(sig));
        }
        Ok(HForm { gram })
    }

    pub fn gram(&self) -> &CMat3 {
        &self.gram
    }
}

impl Default for HForm {
    fn default() -> Self {
        HForm::standard()
    }
}

/// Maximum relative deviation of `m` from its own adjoint.
fn hermitian_asymmetry(m: &CMat3) -> f64 {
    let scale = m.iter().map(|x| x.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let diff = m - m.adjoint();
    diff.iter().map(|x| x.norm()).fold(0.0_f64, f64::max) / scale
}

/// The pairing `v^T G conj(w)`.
pub fn herm(v: &CVec3, w: &CVec3, form: &HForm) -> C64 {
    v.dot(&(form.gram() * w.conjugate()))
}

/// Classifies a nonzero vector as negative, null or positive.
pub fn vector_class(v: &CVec3, form: &HForm) -> Result<VectorClass, HermitianError> {
    let scale = v.norm_squared();
    if scale == 0.0 {
        return Err(HermitianError::ZeroVector);
    }
    let n = herm(v, v, form).re;
    if n.abs() < TOL_NULL * scale {
        Ok(VectorClass::Null)
    } else if n < 0.0 {
        Ok(VectorClass::Negative)
    } else {
        Ok(VectorClass::Positive)
    }
}

/// Gram matrix of a vector triple: `out[i][j] = herm(v_i, v_j)`.
pub fn gram_matrix(v1: &CVec3, v2: &CVec3, v3: &CVec3, form: &HForm) -> CMat3 {
    let vs = [v1, v2, v3];
    CMat3::from_fn(|i, j| herm(vs[i], vs[j], form))
}

/// Signature of a Hermitian matrix by eigenvalue counting. Eigenvalues
/// within `TOL_SIGNATURE_ZERO` of zero, relative to the largest modulus,
/// count as zero.
pub fn signature(m: &CMat3) -> Result<Sign3, HermitianError> {
    let asym = hermitian_asymmetry(m);
    if asym > TOL_HERM {
        return Err(HermitianError::NotHermitian(asym));
    }
    let sym = (m + m.adjoint()).map(|x| 0.5 * x);
    let eigs = sym.symmetric_eigen().eigenvalues;
    let scale = eigs.iter().map(|x| x.abs()).fold(0.0_f64, f64::max);
    let mut sig = Sign3::new(0, 0, 0);
    for &lambda in eigs.iter() {
        if lambda.abs() <= TOL_SIGNATURE_ZERO * scale || scale == 0.0 {
            sig.n_zero += 1;
        } else if lambda > 0.0 {
            sig.n_pos += 1;
        } else {
            sig.n_neg += 1;
        }
    }
    Ok(sig)
}

/// Determinant of the matrix whose rows are the given vectors rescaled to
/// unit Euclidean norm; a scale-free independence measure.
pub(crate) fn scaled_det(v1: &CVec3, v2: &CVec3, v3: &CVec3) -> Result<f64, HermitianError> {
    let mut rows = [*v1, *v2, *v3];
    for r in rows.iter_mut() {
        let n = r.norm();
        if n == 0.0 {
            return Err(HermitianError::ZeroVector);
        }
        *r /= C64::from(n);
    }
    let m = CMat3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
    Ok(m.determinant().norm())
}

/// Basis `d_1, d_2, d_3` with `herm(d_i, c_j)` equal to the Kronecker
/// delta. Its Gram matrix is the inverse of the input basis's Gram matrix.
pub fn anti_dual_basis(
    c1: &CVec3,
    c2: &CVec3,
    c3: &CVec3,
    form: &HForm,
) -> Result<[CVec3; 3], HermitianError> {
    let det = scaled_det(c1, c2, c3)?;
    if det <= TOL_INDEPENDENCE {
        return Err(HermitianError::DegenerateBasis(det));
    }
    let g = gram_matrix(c1, c2, c3, form);
    let ginv = g
        .try_inverse()
        .ok_or(HermitianError::DegenerateBasis(det))?;
    let cs = [c1, c2, c3];
    let mut out = [CVec3::zeros(); 3];
    for i in 0..3 {
        for (k, c) in cs.iter().enumerate() {
            out[i] += (*c).map(|x| x * ginv[(i, k)]);
        }
    }
    Ok(out)
}

/// The Hermitian cross product: a vector orthogonal (under the form) to
/// both inputs. For the standard form, `e1 x e2` is proportional to `e1`.
pub fn hermitian_cross(v: &CVec3, w: &CVec3, form: &HForm) -> Result<CVec3, HermitianError> {
    let gv = form.gram() * v.conjugate();
    let gw = form.gram() * w.conjugate();
    let u = gv.cross(&gw);
    if u.norm() <= TOL_INDEPENDENCE * gv.norm() * gw.norm() {
        return Err(HermitianError::DegenerateBasis(u.norm()));
    }
    Ok(u)
}

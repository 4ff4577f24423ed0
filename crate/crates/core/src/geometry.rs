//! Complex lines, flags, isometries and Lagrangian reflections.
//!
//! Everything from this layer up works in the standard antidiagonal form J.
//! A complex line is encoded by its positive polar vector, a boundary point
//! by a null vector, and a flag is a boundary point together with a complex
//! line through it. Holomorphic isometries act by `z -> M z`,
//! antiholomorphic ones by `z -> M conj(z)`; both preserve the form exactly
//! when `M^T J conj(M) = J`, and polar vectors transform by the same rule
//! as points.

use thiserror::Error;

use crate::hermitian::{
    C64, CMat3, CVec3, HForm, HermitianError, VectorClass, herm, hermitian_cross, vector_class,
};
use crate::linalg::su_normalize;

/// Incidence tolerance: a point lies on a line when `|herm(p, c)|` is below
/// this factor times the product of Euclidean norms.
pub const TOL_INCIDENCE: f64 = 1e-10;

/// Form-preservation and unimodularity tolerance for isometry matrices.
pub const TOL_ISOMETRY: f64 = 1e-9;

/// Tolerance for the involution property `M * conj(M) = I` of a Lagrangian
/// reflection matrix.
pub const TOL_INVOLUTION: f64 = 1e-9;

/// Two lines count as orthogonal when their phi invariant is below this.
pub const TOL_ORTHOGONAL: f64 = 1e-10;

/// Two lines count as asymptotic (or identical) when `|1 - phi|` is below
/// this; the Lagrangian constructions degenerate there.
pub const TOL_ASYMPTOTIC: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("polar vector must be positive, found {0:?}")]
    NotPolar(VectorClass),
    #[error("boundary point must be null, found {0:?}")]
    NotNullPoint(VectorClass),
    #[error("point does not lie on the line (relative residual {0:.3e})")]
    PointNotOnLine(f64),
    #[error("point lies on the line")]
    PointOnLine,
    #[error("matrix does not preserve the form (relative residual {0:.3e})")]
    NotIsometry(f64),
    #[error("matrix determinant is off unity by {0:.3e}")]
    NotUnimodular(f64),
    #[error("matrix times its entrywise conjugate is off the identity by {0:.3e}")]
    NotInvolution(f64),
    #[error("distance is defined for interior points only")]
    NotInteriorPoint,
    #[error("lines are orthogonal")]
    OrthogonalLines,
    #[error("lines are asymptotic or identical")]
    AsymptoticLines,
    #[error("boundary points lie on the boundary of a single complex line")]
    ConcyclicPoints,
    #[error(transparent)]
    Hermitian(#[from] HermitianError),
}

/// A complex line, represented by its positive polar vector.
#[derive(Clone, Debug)]
pub struct ComplexLine {
    polar: CVec3,
}

impl ComplexLine {
    pub fn from_polar(polar: CVec3) -> Result<Self, GeometryError> {
        let class = vector_class(&polar, &HForm::standard())?;
        if class != VectorClass::Positive {
            return Err(GeometryError::NotPolar(class));
        }
        Ok(ComplexLine { polar })
    }

    pub fn polar(&self) -> &CVec3 {
        &self.polar
    }

    /// The polar rescaled to unit Hermitian norm.
    pub fn unit_polar(&self) -> CVec3 {
        let n = herm(&self.polar, &self.polar, &HForm::standard()).re.sqrt();
        self.polar.map(|x| x / C64::from(n))
    }

    /// Relative incidence residual of a point against this line.
    pub fn incidence_residual(&self, p: &CVec3) -> f64 {
        let scale = p.norm() * self.polar.norm();
        if scale == 0.0 {
            return f64::INFINITY;
        }
        herm(p, &self.polar, &HForm::standard()).norm() / scale
    }

    pub fn contains_boundary_point(&self, p: &CVec3) -> bool {
        self.incidence_residual(p) <= TOL_INCIDENCE
    }

    /// An orthonormal frame `(u, v)` of the orthogonal complement of the
    /// polar, with `<u,u> = 1` and `<v,v> = -1`, so that the boundary
    /// circle of the line is `exp(i theta) u + v`.
    ///
    /// The complement basis obtained by projecting standard basis vectors
    /// can contain null vectors, so plain Gram-Schmidt is unreliable; the
    /// frame is read off the eigenvectors of the 2x2 coefficient Gram
    /// instead. For a coefficient vector `s` the value of the form is
    /// `s^* conj(g) s`, hence the conjugate.
    pub fn boundary_frame(&self) -> (CVec3, CVec3) {
        let j = HForm::standard();
        let chat = self.unit_polar();
        let mut ws: Vec<CVec3> = (0..3)
            .map(|k| {
                let mut e = CVec3::zeros();
                e[k] = C64::from(1.0);
                e - chat.map(|x| x * herm(&e, &chat, &j))
            })
            .collect();
        ws.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let (w1, w2) = (ws[0], ws[1]);
        let g11 = herm(&w1, &w1, &j);
        let g12 = herm(&w1, &w2, &j);
        let g22 = herm(&w2, &w2, &j);
        let g_conj = nalgebra::Matrix2::new(g11.conj(), g12.conj(), g12, g22.conj());
        let mut pairs = crate::linalg::eigen2(&g_conj);
        pairs.sort_by(|a, b| b.0.re.total_cmp(&a.0.re));
        let (lp, sp) = pairs[0];
        let (ln, sn) = pairs[1];
        let u_raw = w1.map(|x| x * sp[0]) + w2.map(|x| x * sp[1]);
        let v_raw = w1.map(|x| x * sn[0]) + w2.map(|x| x * sn[1]);
        let u = u_raw.map(|x| x / C64::from(lp.re.sqrt()));
        let v = v_raw.map(|x| x / C64::from((-ln.re).sqrt()));
        (u, v)
    }

    /// The boundary point `exp(i theta) u + v` in the frame above.
    pub fn boundary_point(&self, theta: f64) -> CVec3 {
        let (u, v) = self.boundary_frame();
        u.map(|x| x * C64::from_polar(1.0, theta)) + v
    }
}

/// The pair invariant of two lines, `|<c1,c2>|^2 / (<c1,c1><c2,c2>)`.
/// Kept private here; the public entry point lives in the invariants layer.
pub(crate) fn phi_of_polars(c1: &CVec3, c2: &CVec3) -> f64 {
    let j = HForm::standard();
    let num = herm(c1, c2, &j).norm_sqr();
    let den = herm(c1, c1, &j).re * herm(c2, c2, &j).re;
    num / den
}

/// A flag: a boundary point together with a complex line through it.
#[derive(Clone, Debug)]
pub struct Flag {
    line: ComplexLine,
    point: CVec3,
}

impl Flag {
    pub fn new(line: ComplexLine, point: CVec3) -> Result<Self, GeometryError> {
        let class = vector_class(&point, &HForm::standard())?;
        if class != VectorClass::Null {
            return Err(GeometryError::NotNullPoint(class));
        }
        let res = line.incidence_residual(&point);
        if res > TOL_INCIDENCE {
            return Err(GeometryError::PointNotOnLine(res));
        }
        Ok(Flag { line, point })
    }

    /// The base flag `p = (1,0,0)`, `c = (0,1,0)`.
    pub fn standard() -> Self {
        let z = C64::from(0.0);
        let o = C64::from(1.0);
        Flag {
            line: ComplexLine {
                polar: CVec3::new(z, o, z),
            },
            point: CVec3::new(o, z, z),
        }
    }

    pub fn line(&self) -> &ComplexLine {
        &self.line
    }

    pub fn point(&self) -> &CVec3 {
        &self.point
    }
}

/// An isometry of the complex hyperbolic plane, holomorphic or
/// antiholomorphic, stored as an SU(2,1) matrix lift.
#[derive(Clone, Debug)]
pub struct Isometry {
    matrix: CMat3,
    antiholomorphic: bool,
}

/// Relative residual of the form-preservation identity `M^T J conj(M) = J`.
fn form_residual(m: &CMat3) -> f64 {
    let j = HForm::standard();
    let lhs = m.transpose() * j.gram() * m.conjugate();
    let scale = m.norm_squared().max(1.0);
    (lhs - j.gram()).norm() / scale
}

impl Isometry {
    /// Validates and wraps a matrix that is already an SU(2,1) lift.
    pub fn new(matrix: CMat3, antiholomorphic: bool) -> Result<Self, GeometryError> {
        let res = form_residual(&matrix);
        if res > TOL_ISOMETRY {
            return Err(GeometryError::NotIsometry(res));
        }
        let det_err = (matrix.determinant() - C64::from(1.0)).norm();
        if det_err > TOL_ISOMETRY {
            return Err(GeometryError::NotUnimodular(det_err));
        }
        Ok(Isometry {
            matrix,
            antiholomorphic,
        })
    }

    /// Rescales a form-preserving matrix into SU(2,1) and wraps it.
    pub fn holomorphic(matrix: CMat3) -> Result<Self, GeometryError> {
        Isometry::new(su_normalize(&matrix), false)
    }

    /// Rescales a form-preserving matrix into SU(2,1) and wraps it as the
    /// antiholomorphic map `z -> M conj(z)`.
    pub fn antiholomorphic(matrix: CMat3) -> Result<Self, GeometryError> {
        Isometry::new(su_normalize(&matrix), true)
    }

    pub fn identity() -> Self {
        Isometry {
            matrix: CMat3::identity(),
            antiholomorphic: false,
        }
    }

    pub fn matrix(&self) -> &CMat3 {
        &self.matrix
    }

    pub fn is_antiholomorphic(&self) -> bool {
        self.antiholomorphic
    }

    /// The composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Isometry) -> Isometry {
        let rhs = if self.antiholomorphic {
            other.matrix.conjugate()
        } else {
            other.matrix
        };
        Isometry {
            matrix: self.matrix * rhs,
            antiholomorphic: self.antiholomorphic ^ other.antiholomorphic,
        }
    }

    pub fn inverse(&self) -> Isometry {
        let inv = self
            .matrix
            .try_inverse()
            .expect("isometry matrices are invertible");
        let matrix = if self.antiholomorphic {
            inv.conjugate()
        } else {
            inv
        };
        Isometry {
            matrix,
            antiholomorphic: self.antiholomorphic,
        }
    }

    /// Action on projective representatives; polar vectors of lines
    /// transform by the same rule.
    pub fn apply_vec(&self, v: &CVec3) -> CVec3 {
        if self.antiholomorphic {
            self.matrix * v.conjugate()
        } else {
            self.matrix * v
        }
    }

    pub fn apply_line(&self, line: &ComplexLine) -> ComplexLine {
        ComplexLine {
            polar: self.apply_vec(&line.polar),
        }
    }

    pub fn apply_flag(&self, flag: &Flag) -> Flag {
        Flag {
            line: self.apply_line(&flag.line),
            point: self.apply_vec(&flag.point),
        }
    }
}

/// A Lagrangian reflection: the antiholomorphic involution `z -> M conj(z)`
/// fixing a real plane, with `M * conj(M) = I` and `M` in SU(2,1).
#[derive(Clone, Debug)]
pub struct RPlane {
    matrix: CMat3,
}

impl RPlane {
    pub fn new(matrix: CMat3) -> Result<Self, GeometryError> {
        let m = su_normalize(&matrix);
        let res = form_residual(&m);
        if res > TOL_ISOMETRY {
            return Err(GeometryError::NotIsometry(res));
        }
        let inv_res = (m * m.conjugate() - CMat3::identity()).norm() / m.norm_squared().max(1.0);
        if inv_res > TOL_INVOLUTION {
            return Err(GeometryError::NotInvolution(inv_res));
        }
        Ok(RPlane { matrix: m })
    }

    pub fn matrix(&self) -> &CMat3 {
        &self.matrix
    }

    pub fn as_isometry(&self) -> Isometry {
        Isometry {
            matrix: self.matrix,
            antiholomorphic: true,
        }
    }

    pub fn apply_vec(&self, v: &CVec3) -> CVec3 {
        self.matrix * v.conjugate()
    }
}

/// Hyperbolic distance between two interior points, from
/// `cosh^2(d/2) = <m,n><n,m> / (<m,m><n,n>)`.
pub fn distance(p: &CVec3, q: &CVec3) -> Result<f64, GeometryError> {
    let j = HForm::standard();
    if vector_class(p, &j)? != VectorClass::Negative
        || vector_class(q, &j)? != VectorClass::Negative
    {
        return Err(GeometryError::NotInteriorPoint);
    }
    let num = (herm(p, q, &j) * herm(q, p, &j)).re;
    let den = (herm(p, p, &j) * herm(q, q, &j)).re;
    let cosh2 = (num / den).max(1.0);
    Ok(2.0 * cosh2.sqrt().acosh())
}

/// The complex symmetry in a line: the holomorphic involution
/// `z -> z - 2 <z,c>/<c,c> c`, rescaled into SU(2,1).
pub fn complex_symmetry(line: &ComplexLine) -> Isometry {
    let j = HForm::standard();
    let c = line.polar();
    let norm = herm(c, c, &j);
    let jc = j.gram() * c.conjugate();
    let outer = c * jc.transpose();
    let m = CMat3::identity() - outer.map(|x| x * C64::from(2.0) / norm);
    Isometry::holomorphic(m).expect("complex symmetry preserves the form by construction")
}

/// Genericity gate shared by the Lagrangian constructions on line pairs.
fn check_line_pair(line1: &ComplexLine, line2: &ComplexLine) -> Result<(), GeometryError> {
    let phi = phi_of_polars(line1.polar(), line2.polar());
    if phi <= TOL_ORTHOGONAL {
        return Err(GeometryError::OrthogonalLines);
    }
    if (1.0 - phi).abs() <= TOL_ASYMPTOTIC {
        return Err(GeometryError::AsymptoticLines);
    }
    Ok(())
}

/// Columns-of-basis helper.
fn basis_matrix(b1: &CVec3, b2: &CVec3, b3: &CVec3) -> CMat3 {
    CMat3::from_columns(&[*b1, *b2, *b3])
}

/// The Lagrangian reflection fixing the boundary point `p1` of `line1` and
/// preserving both lines. In the basis `(p1, c1, c2)`, rescaled so that all
/// pairings are real, the reflection is plain coordinate conjugation.
pub fn lagrangian_fix_p_preserve_two_lines(
    line1: &ComplexLine,
    line2: &ComplexLine,
    p1: &CVec3,
) -> Result<RPlane, GeometryError> {
    let j = HForm::standard();
    check_line_pair(line1, line2)?;
    let class = vector_class(p1, &j)?;
    if class != VectorClass::Null {
        return Err(GeometryError::NotNullPoint(class));
    }
    let res = line1.incidence_residual(p1);
    if res > TOL_INCIDENCE {
        return Err(GeometryError::PointNotOnLine(res));
    }
    let s = herm(p1, line2.polar(), &j);
    if s.norm() <= 1e-12 * p1.norm() * line2.polar().norm() {
        // p1 on both boundaries forces the lines to share a boundary point.
        return Err(GeometryError::AsymptoticLines);
    }
    let b = herm(line1.polar(), line2.polar(), &j);
    let p1r = p1.map(|x| x * s.conj() / s.norm());
    let c1r = line1.polar().map(|x| x * b.conj() / b.norm());
    let basis = basis_matrix(&p1r, &c1r, line2.polar());
    let basis_inv = basis
        .try_inverse()
        .ok_or(GeometryError::AsymptoticLines)?;
    RPlane::new(basis * basis_inv.conjugate())
}

/// The Lagrangian reflection swapping `line1` with `line2` and carrying
/// `p1` (on `line1`) to `p2` (on `line2`). In the basis
/// `(c1, c2, c1 x c2)` the matrix is an antidiagonal phase block.
pub fn lagrangian_swap_lines_and_points(
    line1: &ComplexLine,
    line2: &ComplexLine,
    p1: &CVec3,
    p2: &CVec3,
) -> Result<RPlane, GeometryError> {
    let j = HForm::standard();
    check_line_pair(line1, line2)?;
    for (p, line) in [(p1, line1), (p2, line2)] {
        let class = vector_class(p, &j)?;
        if class != VectorClass::Null {
            return Err(GeometryError::NotNullPoint(class));
        }
        let res = line.incidence_residual(p);
        if res > TOL_INCIDENCE {
            return Err(GeometryError::PointNotOnLine(res));
        }
    }
    // The antidiagonal phase block below is an isometry of the coordinate
    // Gram only when the two polars have equal norms; take unit ones.
    let c1 = line1.unit_polar();
    let c2 = line2.unit_polar();
    let u = hermitian_cross(&c1, &c2, &j)?;
    let basis = basis_matrix(&c1, &c2, &u);
    let basis_inv = basis.try_inverse().ok_or(GeometryError::AsymptoticLines)?;
    let x = basis_inv * p1;
    let y = basis_inv * p2;

    // In coordinates the reflection is (z1,z2,z3) -> (a z2', a z1', g z3')
    // with unit phases a, g fixed by p1 -> p2 (' is conjugation).
    let scale = x.norm().max(y.norm());
    let tiny = 1e-12 * scale;
    if x[1].norm() <= tiny || y[0].norm() <= tiny || x[0].norm() <= tiny || y[1].norm() <= tiny {
        return Err(GeometryError::AsymptoticLines);
    }
    let rho1 = x[1].conj() / y[0];
    let rho2 = x[0].conj() / y[1];
    let rho = (rho1 + rho2) * C64::from(0.5);
    let lambda = C64::from(rho.norm());
    let alpha = lambda / rho;
    let gamma = if x[2].norm() <= tiny || y[2].norm() <= tiny {
        alpha
    } else {
        let g = lambda * y[2] / x[2].conj();
        g / g.norm()
    };
    let z = C64::from(0.0);
    let coord = CMat3::new(z, alpha, z, alpha, z, z, z, z, gamma);
    RPlane::new(basis * coord * basis_inv.conjugate())
}

/// The Lagrangian reflection preserving `line1` and swapping the two
/// boundary points `m`, `n` of another line. In the basis `(m, c, n)`
/// adapted to the joining line, the matrix is antidiagonal in the polar
/// coordinates `(alpha, beta, gamma)` of `line1`.
pub fn lagrangian_preserve_line_swap_points(
    line1: &ComplexLine,
    m: &CVec3,
    n: &CVec3,
) -> Result<RPlane, GeometryError> {
    let j = HForm::standard();
    for p in [m, n] {
        let class = vector_class(p, &j)?;
        if class != VectorClass::Null {
            return Err(GeometryError::NotNullPoint(class));
        }
    }
    let pairing = herm(m, n, &j);
    if pairing.norm() <= 1e-12 * m.norm() * n.norm() {
        // Distinct boundary points never pair to zero.
        return Err(GeometryError::ConcyclicPoints);
    }
    let c = hermitian_cross(m, n, &j)?;
    let cn = herm(&c, &c, &j).re;
    if cn <= 0.0 {
        return Err(GeometryError::NotPolar(vector_class(&c, &j)?));
    }
    let chat = c.map(|x| x / C64::from(cn.sqrt()));
    let nr = n.map(|x| x / pairing.conj());
    let basis = basis_matrix(m, &chat, &nr);
    let basis_inv = basis.try_inverse().ok_or(GeometryError::ConcyclicPoints)?;
    let coords = basis_inv * line1.polar();
    let (alpha, beta, gamma) = (coords[0], coords[1], coords[2]);
    let scale = coords.norm();
    if alpha.norm() <= 1e-10 * scale || gamma.norm() <= 1e-10 * scale {
        return Err(GeometryError::PointOnLine);
    }
    if beta.norm() <= 1e-10 * scale {
        return Err(GeometryError::OrthogonalLines);
    }
    let z = C64::from(0.0);
    let coord = CMat3::new(
        z,
        z,
        alpha / gamma.conj(),
        z,
        beta / beta.conj(),
        z,
        gamma / alpha.conj(),
        z,
        z,
    );
    RPlane::new(basis * coord * basis_inv.conjugate())
}

/// The Lagrangian reflection fixing the boundary point `p1` and swapping
/// the boundary points `p2`, `p3`: the previous construction with the
/// polar vector replaced by the null lift of `p1`.
pub fn lagrangian_fix_one_swap_two(
    p1: &CVec3,
    p2: &CVec3,
    p3: &CVec3,
) -> Result<RPlane, GeometryError> {
    let j = HForm::standard();
    for p in [p1, p2, p3] {
        let class = vector_class(p, &j)?;
        if class != VectorClass::Null {
            return Err(GeometryError::NotNullPoint(class));
        }
    }
    let mut unit = [*p2, *p1, *p3];
    for v in unit.iter_mut() {
        *v /= C64::from(v.norm());
    }
    let gram = crate::hermitian::gram_matrix(&unit[0], &unit[1], &unit[2], &j);
    if gram.determinant().norm() <= 1e-10 {
        return Err(GeometryError::ConcyclicPoints);
    }
    let s = herm(&unit[0], &unit[2], &j);
    let a = herm(&unit[0], &unit[1], &j);
    let nr = unit[2].map(|x| x / s.conj());
    let b = herm(&unit[1], &nr, &j);
    let basis = basis_matrix(&unit[0], &unit[1], &nr);
    let basis_inv = basis.try_inverse().ok_or(GeometryError::ConcyclicPoints)?;
    // Antidiagonal-with-center matrix (0,0,u; 0,v,0; w,0,0): the isometry
    // and involution conditions pin |w| = |a/b| and v = a/(w b), leaving
    // one free phase; w is taken real positive.
    let w = C64::from(a.norm() / b.norm());
    let u = C64::from(1.0) / w;
    let v = a / (w * b);
    let z = C64::from(0.0);
    let coord = CMat3::new(z, z, u, z, v, z, w, z, z);
    RPlane::new(basis * coord * basis_inv.conjugate())
}

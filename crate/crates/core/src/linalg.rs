//! Projective comparisons and small closed-form solvers over C.

use nalgebra::{Matrix2, Matrix3x2, Vector2};

use crate::hermitian::{C64, CMat3, CVec3};

/// Projective distance between nonzero vectors: each is normalized by the
/// coordinate of largest modulus in the first vector, then compared
/// entrywise. Zero iff the vectors are equal up to complex scale.
pub fn proj_dist(v: &CVec3, w: &CVec3) -> f64 {
    let k = (0..3)
        .max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()))
        .unwrap();
    if v[k].norm() == 0.0 || w[k].norm() == 0.0 {
        return f64::INFINITY;
    }
    let vn = v.map(|x| x / v[k]);
    let wn = w.map(|x| x / w[k]);
    (vn - wn).iter().map(|x| x.norm()).fold(0.0_f64, f64::max)
}

/// Distance between matrices as elements of PU(2,1): the deviation of
/// `a * b^-1` from a scalar matrix, normalized by that scalar. Finite and
/// small exactly when the two matrices agree projectively.
pub fn pu_dist(a: &CMat3, b: &CMat3) -> f64 {
    let Some(b_inv) = b.try_inverse() else {
        return f64::INFINITY;
    };
    let c = a * b_inv;
    scalar_deviation(&c)
}

/// Deviation of `m` from the scalar matrix `s * I` with `s = trace(m)/3`,
/// relative to `|s|`. Small exactly when `m` is projectively the identity.
pub fn scalar_deviation(m: &CMat3) -> f64 {
    let s = (m[(0, 0)] + m[(1, 1)] + m[(2, 2)]) / C64::from(3.0);
    let scale = m.iter().map(|x| x.norm()).fold(0.0_f64, f64::max);
    if s.norm() <= 1e-8 * scale {
        return f64::INFINITY;
    }
    let mut dev: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { s } else { C64::from(0.0) };
            dev = dev.max((m[(i, j)] - target).norm());
        }
    }
    dev / s.norm()
}

/// Eigenvalues and eigenvectors of a general complex 2x2 matrix by the
/// quadratic formula. Eigenvectors are unit-normalized; for a scalar
/// matrix the standard basis is returned.
pub fn eigen2(m: &Matrix2<C64>) -> [(C64, Vector2<C64>); 2] {
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr - C64::from(4.0) * det).sqrt();
    let lambdas = [(tr + disc) * C64::from(0.5), (tr - disc) * C64::from(0.5)];
    let scale = m.iter().map(|x| x.norm()).fold(1.0_f64, f64::max);
    lambdas.map(|lambda| {
        // Rows of (m - lambda I) span the orthogonal complement of the
        // eigenvector; take the null direction of the larger row.
        let a = m[(0, 0)] - lambda;
        let b = m[(0, 1)];
        let c = m[(1, 0)];
        let d = m[(1, 1)] - lambda;
        let cand1 = Vector2::new(b, -a);
        let cand2 = Vector2::new(d, -c);
        let mut v = if cand1.norm() >= cand2.norm() { cand1 } else { cand2 };
        if v.norm() <= 1e-14 * scale {
            v = Vector2::new(C64::from(1.0), C64::from(0.0));
        }
        let v = v.map(|x| x / C64::from(v.norm()));
        (lambda, v)
    })
}

/// Least-squares solution `r` of `s * r = y` for tall complex matrices,
/// via the normal equations; `None` when `s` has numerically dependent
/// columns.
pub fn lstsq_2(s: &Matrix3x2<C64>, y: &Matrix3x2<C64>) -> Option<Matrix2<C64>> {
    let sh = s.adjoint();
    let gram = sh * s;
    let rhs = sh * y;
    gram.try_inverse().map(|gi| gi * rhs)
}

/// Principal cube root: `|z|^(1/3) * exp(i arg(z)/3)` with the argument of
/// the result in (-pi/3, pi/3]. Dividing a matrix by the cube root of its
/// determinant lands in the unimodular group on a fixed branch.
pub fn cbrt_unit(z: C64) -> C64 {
    C64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

/// Rescales a nonsingular matrix by the principal cube root of its
/// determinant, landing on the canonical unimodular lift.
pub fn su_normalize(m: &CMat3) -> CMat3 {
    let d = m.determinant();
    let r = cbrt_unit(d);
    m.map(|x| x / r)
}

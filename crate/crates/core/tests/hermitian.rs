mod common;

use flagvar::hermitian::{
    C64, CMat3, CVec3, HForm, HVector, HermitianError, Sign3, TOL_ANTI_DUAL, VectorClass,
    anti_dual_basis, gram_matrix, herm, hermitian_cross, signature, vector_class,
};
use flagvar::linalg::proj_dist;

use common::{rand_form, rand_vec, rng};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn r(re: f64) -> C64 {
    C64::from(re)
}

const SQ2: f64 = std::f64::consts::SQRT_2;

#[test]
fn standard_form_pairings() {
    let j = HForm::standard();
    let c1 = CVec3::new(r(0.0), r(1.0), r(0.0));
    let c2 = CVec3::new(r(1.0), r(SQ2), r(1.0));
    let c3 = CVec3::new(r(2.0), r(SQ2), r(1.0));
    assert!((herm(&c1, &c1, &j) - r(1.0)).norm() < 1e-14);
    assert!((herm(&c2, &c2, &j) - r(4.0)).norm() < 1e-14);
    assert!((herm(&c3, &c3, &j) - r(6.0)).norm() < 1e-14);
    assert!((herm(&c1, &c2, &j) - r(SQ2)).norm() < 1e-14);
    assert!((herm(&c2, &c3, &j) - r(5.0)).norm() < 1e-14);
    assert!((herm(&c1, &c3, &j) - r(SQ2)).norm() < 1e-14);
}

#[test]
fn herm_is_conjugate_symmetric() {
    let mut rg = rng(11);
    for _ in 0..500 {
        let form = rand_form(&mut rg);
        let v = rand_vec(&mut rg);
        let w = rand_vec(&mut rg);
        let lhs = herm(&v, &w, &form);
        let rhs = herm(&w, &v, &form).conj();
        let scale = v.norm() * w.norm() * form.gram().norm();
        assert!((lhs - rhs).norm() <= 1e-12 * scale.max(1.0));
    }
}

#[test]
fn herm_is_sesquilinear() {
    let mut rg = rng(12);
    let form = HForm::standard();
    for _ in 0..200 {
        let v = rand_vec(&mut rg);
        let w = rand_vec(&mut rg);
        let a = common::rand_c64(&mut rg);
        let lhs = herm(&v.map(|x| x * a), &w, &form);
        let rhs = herm(&v, &w.map(|x| x * a), &form);
        let base = herm(&v, &w, &form);
        assert!((lhs - a * base).norm() < 1e-12 * (1.0 + base.norm() * a.norm()));
        assert!((rhs - a.conj() * base).norm() < 1e-12 * (1.0 + base.norm() * a.norm()));
    }
}

#[test]
fn vector_classes_under_standard_form() {
    let j = HForm::standard();
    let null = CVec3::new(r(1.0), r(0.0), r(0.0));
    let positive = CVec3::new(r(0.0), r(1.0), r(0.0));
    let negative = CVec3::new(r(1.0), r(0.0), r(-1.0));
    assert_eq!(vector_class(&null, &j).unwrap(), VectorClass::Null);
    assert_eq!(vector_class(&positive, &j).unwrap(), VectorClass::Positive);
    assert_eq!(vector_class(&negative, &j).unwrap(), VectorClass::Negative);

    // The classification is scale-invariant.
    let s = c(3.7, -1.9);
    assert_eq!(
        vector_class(&null.map(|x| x * s), &j).unwrap(),
        VectorClass::Null
    );
    assert_eq!(
        vector_class(&negative.map(|x| x * s), &j).unwrap(),
        VectorClass::Negative
    );

    assert_eq!(
        vector_class(&CVec3::zeros(), &j),
        Err(HermitianError::ZeroVector)
    );
}

#[test]
fn hvector_rejects_zero() {
    assert!(HVector::new(CVec3::zeros()).is_err());
    assert!(HVector::new(CVec3::new(r(0.0), c(0.0, 1e-200), r(0.0))).is_ok());
}

#[test]
fn signature_of_random_bases_is_2_1() {
    let mut rg = rng(13);
    for _ in 0..200 {
        let form = rand_form(&mut rg);
        let g = gram_matrix(
            &rand_vec(&mut rg),
            &rand_vec(&mut rg),
            &rand_vec(&mut rg),
            &form,
        );
        let sig = signature(&g).unwrap();
        // A degenerate random triple is astronomically unlikely but would
        // show up as a zero, never as a wrong sign count.
        assert_eq!(sig, Sign3::hyperbolic());
    }
}

#[test]
fn signature_rejects_non_hermitian() {
    let mut m = CMat3::identity();
    m[(0, 1)] = c(0.0, 1.0);
    assert!(matches!(
        signature(&m),
        Err(HermitianError::NotHermitian(_))
    ));
}

#[test]
fn form_constructor_enforces_signature() {
    assert!(matches!(
        HForm::new(CMat3::identity()),
        Err(HermitianError::WrongSignature(Sign3 {
            n_pos: 3,
            n_neg: 0,
            n_zero: 0
        }))
    ));
    // A rank-deficient Hermitian matrix is also rejected.
    let mut m = CMat3::zeros();
    m[(0, 0)] = r(1.0);
    m[(1, 1)] = r(-1.0);
    assert!(matches!(
        HForm::new(m),
        Err(HermitianError::WrongSignature(_))
    ));
}

#[test]
fn anti_dual_of_standard_basis_reverses_it() {
    let j = HForm::standard();
    let e1 = CVec3::new(r(1.0), r(0.0), r(0.0));
    let e2 = CVec3::new(r(0.0), r(1.0), r(0.0));
    let e3 = CVec3::new(r(0.0), r(0.0), r(1.0));
    let d = anti_dual_basis(&e1, &e2, &e3, &j).unwrap();
    assert!(proj_dist(&d[0], &e3) < 1e-14);
    assert!(proj_dist(&d[1], &e2) < 1e-14);
    assert!(proj_dist(&d[2], &e1) < 1e-14);
    // Exact normalization, not just projective agreement.
    assert!((herm(&d[0], &e1, &j) - r(1.0)).norm() < 1e-14);
}

#[test]
fn anti_dual_pairings_and_gram_inverse() {
    let mut rg = rng(14);
    for _ in 0..200 {
        let form = rand_form(&mut rg);
        let cs = [rand_vec(&mut rg), rand_vec(&mut rg), rand_vec(&mut rg)];
        let Ok(d) = anti_dual_basis(&cs[0], &cs[1], &cs[2], &form) else {
            continue;
        };
        for i in 0..3 {
            for k in 0..3 {
                let target = if i == k { r(1.0) } else { r(0.0) };
                assert!(
                    (herm(&d[i], &cs[k], &form) - target).norm() < TOL_ANTI_DUAL,
                    "pairing ({i},{k}) off"
                );
            }
        }
        let g = gram_matrix(&cs[0], &cs[1], &cs[2], &form);
        let gd = gram_matrix(&d[0], &d[1], &d[2], &form);
        let residual = (g * gd.adjoint()).map(|x| x) - CMat3::identity();
        // Gram(d) = Gram(c)^-1; the adjoint is the same matrix because both
        // Grams are Hermitian.
        assert!(residual.norm() < 1e-8 * (1.0 + g.norm() * gd.norm()));
    }
}

#[test]
fn anti_dual_is_an_involution_up_to_scale() {
    let mut rg = rng(15);
    for _ in 0..100 {
        let form = rand_form(&mut rg);
        let cs = [rand_vec(&mut rg), rand_vec(&mut rg), rand_vec(&mut rg)];
        let Ok(d) = anti_dual_basis(&cs[0], &cs[1], &cs[2], &form) else {
            continue;
        };
        let dd = anti_dual_basis(&d[0], &d[1], &d[2], &form).unwrap();
        for i in 0..3 {
            assert!(proj_dist(&dd[i], &cs[i]) < 1e-8);
        }
    }
}

#[test]
fn anti_dual_rejects_dependent_vectors() {
    let j = HForm::standard();
    let a = CVec3::new(r(1.0), r(2.0), c(0.0, 1.0));
    let b = CVec3::new(r(0.0), r(1.0), r(1.0));
    let s = a + b;
    assert!(matches!(
        anti_dual_basis(&a, &b, &s, &j),
        Err(HermitianError::DegenerateBasis(_))
    ));
}

#[test]
fn cross_product_is_orthogonal_to_both_factors() {
    let mut rg = rng(16);
    for _ in 0..300 {
        let form = rand_form(&mut rg);
        let v = rand_vec(&mut rg);
        let w = rand_vec(&mut rg);
        let u = hermitian_cross(&v, &w, &form).unwrap();
        let scale = u.norm() * (v.norm() + w.norm()) * form.gram().norm();
        assert!(herm(&v, &u, &form).norm() < 1e-10 * scale.max(1.0));
        assert!(herm(&w, &u, &form).norm() < 1e-10 * scale.max(1.0));
    }
}

#[test]
fn cross_product_standard_example_and_degeneracy() {
    let j = HForm::standard();
    let e1 = CVec3::new(r(1.0), r(0.0), r(0.0));
    let e2 = CVec3::new(r(0.0), r(1.0), r(0.0));
    let u = hermitian_cross(&e1, &e2, &j).unwrap();
    assert!(proj_dist(&u, &e1) < 1e-14);

    let parallel = e1.map(|x| x * c(2.0, -1.0));
    assert!(matches!(
        hermitian_cross(&e1, &parallel, &j),
        Err(HermitianError::DegenerateBasis(_))
    ));
}

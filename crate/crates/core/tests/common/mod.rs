//! Seeded random generators shared by the integration test targets.
#![allow(dead_code)]

use flagvar::hermitian::{C64, CVec3, HForm, gram_matrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_c64(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
}

/// A random vector bounded away from zero.
pub fn rand_vec(rng: &mut impl Rng) -> CVec3 {
    loop {
        let v = CVec3::new(rand_c64(rng), rand_c64(rng), rand_c64(rng));
        if v.norm() > 0.3 {
            return v;
        }
    }
}

/// A random Hermitian form of signature (2,1): the Gram matrix of a random
/// basis under the standard form.
pub fn rand_form(rng: &mut impl Rng) -> HForm {
    let j = HForm::standard();
    loop {
        let g = gram_matrix(
            &rand_vec(rng),
            &rand_vec(rng),
            &rand_vec(rng),
            &j,
        );
        if let Ok(form) = HForm::new(g) {
            return form;
        }
    }
}

use flagvar::geometry::{ComplexLine, Flag, Isometry, complex_symmetry};
use flagvar::hermitian::herm;
use flagvar::invariants::{TripleFlagInvariant, triple_invariants};

/// A random positive vector under the standard form.
pub fn rand_polar(rng: &mut impl Rng) -> CVec3 {
    let j = HForm::standard();
    loop {
        let v = rand_vec(rng);
        if herm(&v, &v, &j).re > 0.05 * v.norm_squared() {
            return v;
        }
    }
}

pub fn rand_line(rng: &mut impl Rng) -> ComplexLine {
    ComplexLine::from_polar(rand_polar(rng)).unwrap()
}

/// A pair of lines bounded away from orthogonal, asymptotic and identical.
pub fn rand_generic_line_pair(rng: &mut impl Rng) -> (ComplexLine, ComplexLine) {
    loop {
        let l1 = rand_line(rng);
        let l2 = rand_line(rng);
        let phi = flagvar::invariants::phi_invariant(&l1, &l2);
        if phi > 1e-3 && (phi - 1.0).abs() > 1e-3 {
            return (l1, l2);
        }
    }
}

pub fn rand_flag(rng: &mut impl Rng) -> Flag {
    let line = rand_line(rng);
    let theta = rng.random_range(0.0..std::f64::consts::TAU);
    let point = line.boundary_point(theta);
    Flag::new(line, point).unwrap()
}

/// A flag triple that passes the full genericity checks.
pub fn rand_flag_triple(rng: &mut impl Rng) -> [Flag; 3] {
    loop {
        let f1 = rand_flag(rng);
        let f2 = rand_flag(rng);
        let f3 = rand_flag(rng);
        if triple_invariants(&f1, &f2, &f3).is_ok() {
            return [f1, f2, f3];
        }
    }
}

/// A random holomorphic isometry: the product of three complex symmetries
/// in random lines.
pub fn rand_isometry(rng: &mut impl Rng) -> Isometry {
    let a = complex_symmetry(&rand_line(rng));
    let b = complex_symmetry(&rand_line(rng));
    let c = complex_symmetry(&rand_line(rng));
    a.compose(&b).compose(&c)
}

/// Largest componentwise deviation between two flag-triple records,
/// relative to unit scale.
pub fn record_diff(a: &TripleFlagInvariant, b: &TripleFlagInvariant) -> f64 {
    let reals = [
        (a.phi12, b.phi12),
        (a.phi23, b.phi23),
        (a.phi31, b.phi31),
    ];
    let cplx = [
        (a.big_phi, b.big_phi),
        (a.delta1_23, b.delta1_23),
        (a.delta1_32, b.delta1_32),
        (a.delta2_31, b.delta2_31),
        (a.delta2_13, b.delta2_13),
        (a.delta3_12, b.delta3_12),
        (a.delta3_21, b.delta3_21),
        (a.m12, b.m12),
        (a.m23, b.m23),
        (a.m31, b.m31),
    ];
    let mut d: f64 = 0.0;
    for (x, y) in reals {
        d = d.max((x - y).abs() / x.abs().max(1.0));
    }
    for (x, y) in cplx {
        d = d.max((x - y).norm() / x.norm().max(1.0));
    }
    d
}

mod common;

use std::f64::consts::PI;

use flagvar::geometry::{ComplexLine, Flag, GeometryError, complex_symmetry};
use flagvar::hermitian::{C64, CMat3, CVec3, HForm};
use flagvar::invariants::{Degeneracy, InvariantError, m_invariant, triple_invariants};
use flagvar::isometries::{
    ElementaryError, TransferParams, exchange_isometry_geometric, exchange_matrix,
    heisenberg_translation, normalize_to_standard, theta, transfer_from_params, transfer_matrix,
};
use flagvar::linalg::{proj_dist, pu_dist};

use common::{rand_c64, rand_flag, rand_flag_triple, rand_isometry, rng};
use rand::Rng;

fn r(x: f64) -> C64 {
    C64::from(x)
}

fn line(v: [f64; 3]) -> ComplexLine {
    ComplexLine::from_polar(CVec3::new(r(v[0]), r(v[1]), r(v[2]))).unwrap()
}

fn standard_line2(a: f64) -> ComplexLine {
    line([a, 2.0f64.sqrt(), 1.0])
}

/// The standard-position pair with m = -1 - sqrt 2 (so a = 1).
fn worked_pair() -> (Flag, Flag) {
    let s = 2.0f64.sqrt();
    let f1 = Flag::standard();
    let p2 = CVec3::new(r(-1.0 + s), r(s), r(-1.0 - s));
    let f2 = Flag::new(standard_line2(1.0), p2).unwrap();
    (f1, f2)
}

#[test]
fn theta_examples_and_branch() {
    assert!((theta(r(8.0)) - r(8.0)).norm() < 1e-14);
    assert!((theta(r(-1.0)) - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-14);
    assert!((theta(C64::new(0.0, -8.0)) - C64::from_polar(8.0, -PI / 6.0)).norm() < 1e-14);
    assert_eq!(theta(r(0.0)), r(0.0));

    // An argument tie at -pi folds to pi, staying on the branch.
    let tie = theta(C64::new(-1.0, -0.0));
    assert!((tie - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-14);

    let mut rng = rng(50);
    for _ in 0..200 {
        let z = rand_c64(&mut rng);
        let th = theta(z);
        assert!((th.norm() - z.norm()).abs() < 1e-12 * z.norm().max(1.0));
        assert!(th.arg() > -PI / 3.0 - 1e-15 && th.arg() <= PI / 3.0 + 1e-15);
        // Cubing restores the phase: theta(z)^3 = |z|^2 z.
        let cube = th * th * th;
        assert!((cube - z * z.norm_sqr()).norm() < 1e-10 * z.norm().powi(3).max(1.0));
    }
}

#[test]
fn normalize_fixes_already_standard_pairs() {
    let f1 = Flag::standard();
    let sp = normalize_to_standard(&f1, &standard_line2(1.0)).unwrap();
    assert!((sp.a - 1.0).abs() < 1e-12);
    assert!(pu_dist(sp.normalizer.matrix(), &CMat3::identity()) < 1e-9);
}

#[test]
fn normalize_reaches_standard_position_on_random_pairs() {
    let mut rng = rng(51);
    let e1 = CVec3::new(r(1.0), r(0.0), r(0.0));
    let e2 = CVec3::new(r(0.0), r(1.0), r(0.0));
    let sq2 = 2.0f64.sqrt();
    let mut done = 0;
    while done < 200 {
        let f1 = rand_flag(&mut rng);
        let f2 = rand_flag(&mut rng);
        let Ok(sp) = normalize_to_standard(&f1, f2.line()) else {
            continue;
        };
        done += 1;
        let n = &sp.normalizer;
        assert!(proj_dist(&n.apply_vec(f1.point()), &e1) < 1e-9);
        assert!(proj_dist(&n.apply_vec(f1.line().polar()), &e2) < 1e-9);
        let im = n.apply_vec(f2.line().polar());
        let im = im / im[2];
        assert!(im[0].im.abs() < 1e-9);
        assert!((im[1] - r(sq2)).norm() < 1e-9);
        assert!((im[0].re - sp.a).abs() < 1e-9);
        assert!(sp.a > -1.0);

        let phi = flagvar::invariants::phi_invariant(f1.line(), f2.line());
        assert!((phi - 1.0 / (1.0 + sp.a)).abs() < 1e-9 * phi.max(1.0));
    }
}

#[test]
fn normalize_is_deterministic() {
    let mut rng = rng(52);
    let f1 = rand_flag(&mut rng);
    let f2 = rand_flag(&mut rng);
    let a = normalize_to_standard(&f1, f2.line()).unwrap();
    let b = normalize_to_standard(&f1, f2.line()).unwrap();
    assert_eq!((a.normalizer.matrix() - b.normalizer.matrix()).norm(), 0.0);
}

#[test]
fn normalize_is_frame_covariant() {
    let mut rng = rng(53);
    for _ in 0..50 {
        let f1 = rand_flag(&mut rng);
        let f2 = rand_flag(&mut rng);
        let Ok(sp) = normalize_to_standard(&f1, f2.line()) else {
            continue;
        };
        let g = rand_isometry(&mut rng);
        let moved = normalize_to_standard(&g.apply_flag(&f1), &g.apply_line(f2.line())).unwrap();
        let expected = sp.normalizer.compose(&g.inverse());
        assert!(pu_dist(moved.normalizer.matrix(), expected.matrix()) < 1e-7);
        assert!((moved.a - sp.a).abs() < 1e-8 * sp.a.abs().max(1.0));
    }
}

#[test]
fn normalize_rejects_degenerate_pairs() {
    let f1 = Flag::standard();
    let same = line([0.0, 1.0, 0.0]);
    assert!(matches!(
        normalize_to_standard(&f1, &same),
        Err(ElementaryError::Invariant(InvariantError::NonGenericPair(
            Degeneracy::IdenticalLines
        )))
    ));
    let orth = line([1.0, 0.0, 1.0]);
    assert!(matches!(
        normalize_to_standard(&f1, &orth),
        Err(ElementaryError::Invariant(InvariantError::NonGenericPair(
            Degeneracy::OrthogonalLines
        )))
    ));
    let through = line([0.2, 1.0, 0.0]);
    assert!(matches!(
        normalize_to_standard(&f1, &through),
        Err(ElementaryError::Invariant(InvariantError::NonGenericPair(
            Degeneracy::PointOnLine
        )))
    ));
}

#[test]
fn stabilizer_cube_roots_agree_in_pu() {
    let mut rng = rng(54);
    let omega = C64::from_polar(1.0, 2.0 * PI / 3.0);
    for _ in 0..100 {
        let mu = rand_c64(&mut rng);
        if mu.norm() < 0.1 {
            continue;
        }
        let t = rng.random_range(-2.0..2.0);
        let a = transfer_from_params(&TransferParams { mu, t }).unwrap();
        let b = transfer_from_params(&TransferParams { mu: mu * omega, t }).unwrap();
        assert!((a.matrix() - b.matrix()).norm() > 1e-3 * a.matrix().norm());
        assert!(pu_dist(a.matrix(), b.matrix()) < 1e-10);
    }
}

#[test]
fn transfer_of_identity_params_is_identity() {
    let tr = transfer_from_params(&TransferParams {
        mu: r(1.0),
        t: 0.0,
    })
    .unwrap();
    assert!((tr.matrix() - CMat3::identity()).norm() < 1e-15);
}

#[test]
fn transfer_matrices_are_unimodular_isometries() {
    let mut rng = rng(55);
    let j = *HForm::standard().gram();
    for _ in 0..200 {
        let mu = rand_c64(&mut rng);
        if mu.norm() < 0.1 {
            continue;
        }
        let t = rng.random_range(-3.0..3.0);
        let tr = transfer_from_params(&TransferParams { mu, t }).unwrap();
        let m = tr.matrix();
        assert!((m.determinant() - r(1.0)).norm() < 1e-10);
        let res = (m.transpose() * j * m.conjugate() - j).norm() / m.norm_squared().max(1.0);
        assert!(res < 1e-10);
    }
}

#[test]
fn transfer_on_worked_triple_is_projectively_trivial() {
    // The worked configuration is real and already has both C2 and C3 in
    // standard position, so mu = 1, t = 0 and the transfer is the
    // identity; the complex symmetries of C2 and of the image line then
    // send p1 to the same point.
    let f1 = Flag::standard();
    let c2 = standard_line2(1.0);
    let c3 = standard_line2(2.0);
    let f2 = Flag::new(c2.clone(), c2.boundary_point(0.7)).unwrap();
    let f3 = Flag::new(c3.clone(), c3.boundary_point(1.9)).unwrap();
    let inv = triple_invariants(&f1, &f2, &f3).unwrap();

    let params = TransferParams::of(&inv).unwrap();
    assert!((params.mu - r(1.0)).norm() < 1e-12);
    assert!(params.t.abs() < 1e-12);

    let tr = transfer_matrix(&inv).unwrap();
    assert!(pu_dist(tr.matrix(), &CMat3::identity()) < 1e-10);

    let image = tr.apply_line(&c3);
    let via_image = complex_symmetry(&image).apply_vec(f1.point());
    let via_c2 = complex_symmetry(&c2).apply_vec(f1.point());
    assert!(proj_dist(&via_image, &via_c2) < 1e-8);
}

#[test]
fn transfer_carries_third_line_to_standard_position() {
    let mut rng = rng(56);
    let sq2 = 2.0f64.sqrt();
    let mut done = 0;
    while done < 100 {
        let [f1, f2, f3] = rand_flag_triple(&mut rng);
        let Ok(sp) = normalize_to_standard(&f1, f2.line()) else {
            continue;
        };
        let n = &sp.normalizer;
        let (g1, g2, g3) = (n.apply_flag(&f1), n.apply_flag(&f2), n.apply_flag(&f3));
        let Ok(inv) = triple_invariants(&g1, &g2, &g3) else {
            continue;
        };
        done += 1;
        let tr = transfer_matrix(&inv).unwrap();
        let im = tr.apply_vec(g3.line().polar());
        let im = im / im[2];
        let a3 = 1.0 / inv.phi31 - 1.0;
        assert!((im[0] - r(a3)).norm() < 1e-7 * a3.abs().max(1.0));
        assert!((im[1] - r(sq2)).norm() < 1e-7);

        // Factorization through the pair normalizers: with G12 = Id in
        // this frame, the transfer equals the (flag 1, line 3) normalizer.
        let n13 = normalize_to_standard(&g1, g3.line()).unwrap();
        assert!(pu_dist(tr.matrix(), n13.normalizer.matrix()) < 1e-7);

        // The image configuration is already standard.
        let image_line = tr.apply_line(g3.line());
        let again = normalize_to_standard(&g1, &image_line).unwrap();
        assert!(pu_dist(again.normalizer.matrix(), &CMat3::identity()) < 1e-7);
    }
}

#[test]
fn transfer_rejects_orthogonal_records() {
    let f1 = Flag::standard();
    let c2 = standard_line2(1.0);
    let c3 = standard_line2(2.0);
    let f2 = Flag::new(c2.clone(), c2.boundary_point(0.7)).unwrap();
    let f3 = Flag::new(c3.clone(), c3.boundary_point(1.9)).unwrap();
    let mut inv = triple_invariants(&f1, &f2, &f3).unwrap();
    inv.phi23 = 0.0;
    assert!(matches!(
        transfer_matrix(&inv),
        Err(ElementaryError::Invariant(
            InvariantError::NonGenericTriple { i: 2, j: 3, .. }
        ))
    ));
}

#[test]
fn exchange_matrix_identities_over_random_m() {
    let mut rng = rng(57);
    let j = *HForm::standard().gram();
    let mut done = 0;
    while done < 1000 {
        let m12 = rand_c64(&mut rng);
        if m12.norm() < 0.05 || (m12 - r(1.0)).norm() < 0.05 {
            continue;
        }
        done += 1;
        let e = exchange_matrix(m12).unwrap();
        let m = e.matrix();
        let scale = m.norm_squared().max(1.0);
        assert!((m * m.conjugate() - CMat3::identity()).norm() / scale < 1e-9);
        assert!((m.determinant() - r(1.0)).norm() < 1e-9);
        assert!((m.transpose() * j * m.conjugate() - j).norm() / scale < 1e-9);
    }
}

#[test]
fn exchange_matrix_worked_action() {
    let (f1, f2) = worked_pair();
    let m12 = m_invariant(&f1, &f2).unwrap();
    assert!((m12 - r(-1.0 - 2.0f64.sqrt())).norm() < 1e-12);

    let e = exchange_matrix(m12).unwrap();
    assert!(proj_dist(&e.apply_vec(f1.line().polar()), f2.line().polar()) < 1e-9);
    assert!(proj_dist(&e.apply_vec(f2.line().polar()), f1.line().polar()) < 1e-9);
    assert!(proj_dist(&e.apply_vec(f2.point()), f1.point()) < 1e-9);
    // This pair has real m, so the exchange is an involution and also
    // carries p1 back to p2.
    assert!(proj_dist(&e.apply_vec(f1.point()), f2.point()) < 1e-9);
}

#[test]
fn exchange_matrix_rejects_degenerate_m() {
    assert!(matches!(
        exchange_matrix(r(0.0)),
        Err(ElementaryError::InvalidM)
    ));
    assert!(matches!(
        exchange_matrix(r(1.0)),
        Err(ElementaryError::InvalidM)
    ));
}

#[test]
fn exchange_geometric_defining_action() {
    let mut rng = rng(58);
    let mut done = 0;
    while done < 200 {
        let f1 = rand_flag(&mut rng);
        let f2 = rand_flag(&mut rng);
        let Ok(e) = exchange_isometry_geometric(&f1, &f2) else {
            continue;
        };
        done += 1;
        assert!(!e.is_antiholomorphic());
        assert!(proj_dist(&e.apply_vec(f1.line().polar()), f2.line().polar()) < 1e-7);
        assert!(proj_dist(&e.apply_vec(f2.line().polar()), f1.line().polar()) < 1e-7);
        assert!(proj_dist(&e.apply_vec(f2.point()), f1.point()) < 1e-7);

        // The square preserves each line.
        let sq = e.compose(&e);
        assert!(proj_dist(&sq.apply_vec(f1.line().polar()), f1.line().polar()) < 1e-7);
        assert!(proj_dist(&sq.apply_vec(f2.line().polar()), f2.line().polar()) < 1e-7);
    }
}

#[test]
fn exchange_geometric_agrees_with_matrix_route() {
    let mut rng = rng(59);
    let mut done = 0;
    while done < 500 {
        let f1 = rand_flag(&mut rng);
        let f2 = rand_flag(&mut rng);
        let Ok(m12) = m_invariant(&f1, &f2) else {
            continue;
        };
        if m12.norm() < 0.05 || (m12 - r(1.0)).norm() < 0.05 {
            continue;
        }
        let Ok(geo) = exchange_isometry_geometric(&f1, &f2) else {
            continue;
        };
        done += 1;
        let sp = normalize_to_standard(&f1, f2.line()).unwrap();
        let n = &sp.normalizer;
        let world = n.inverse().compose(&exchange_matrix(m12).unwrap()).compose(n);
        let d = pu_dist(geo.matrix(), world.matrix());
        assert!(d < 1e-8, "geometric vs matrix route differ by {d}");
    }
}

#[test]
fn exchange_geometric_is_frame_covariant() {
    let mut rng = rng(60);
    let mut done = 0;
    while done < 50 {
        let f1 = rand_flag(&mut rng);
        let f2 = rand_flag(&mut rng);
        let Ok(m12) = m_invariant(&f1, &f2) else {
            continue;
        };
        if m12.norm() < 0.05 || (m12 - r(1.0)).norm() < 0.05 {
            continue;
        }
        let Ok(e) = exchange_isometry_geometric(&f1, &f2) else {
            continue;
        };
        done += 1;
        // Conjugation amplifies rounding error by the square of the
        // conjugator's condition number, so keep the mover moderate.
        let mut g = rand_isometry(&mut rng);
        while g.matrix().norm() > 3.0 {
            g = rand_isometry(&mut rng);
        }
        let moved = exchange_isometry_geometric(&g.apply_flag(&f1), &g.apply_flag(&f2)).unwrap();
        let expected = g.compose(&e).compose(&g.inverse());
        let d = pu_dist(moved.matrix(), expected.matrix());
        assert!(d < 1e-6, "covariance defect {d}");
    }
}

#[test]
fn exchange_geometric_rejects_asymptotic_lines() {
    // a = 0 makes phi = 1 with distinct lines: tangent at the boundary.
    let f1 = Flag::standard();
    let c2 = standard_line2(0.0);
    let f2 = Flag::new(c2.clone(), c2.boundary_point(0.4)).unwrap();
    assert!(matches!(
        exchange_isometry_geometric(&f1, &f2),
        Err(ElementaryError::Geometry(GeometryError::AsymptoticLines))
    ));
}

#[test]
fn exchange_geometric_matches_matrix_on_worked_pair() {
    let (f1, f2) = worked_pair();
    let geo = exchange_isometry_geometric(&f1, &f2).unwrap();
    let mat = exchange_matrix(m_invariant(&f1, &f2).unwrap()).unwrap();
    assert!(pu_dist(geo.matrix(), mat.matrix()) < 1e-9);
}

#[test]
fn heisenberg_translation_basics() {
    let id = heisenberg_translation(r(0.0), 0.0);
    assert!((id.matrix() - CMat3::identity()).norm() < 1e-15);

    let mut rng = rng(61);
    let j = *HForm::standard().gram();
    let e1 = CVec3::new(r(1.0), r(0.0), r(0.0));
    for _ in 0..200 {
        let w = rand_c64(&mut rng);
        let tau = rng.random_range(-3.0..3.0);
        let h = heisenberg_translation(w, tau);
        let m = h.matrix();
        assert!(proj_dist(&h.apply_vec(&e1), &e1) < 1e-12);
        assert!((m.transpose() * j * m.conjugate() - j).norm() / m.norm_squared().max(1.0) < 1e-10);
    }
}

#[test]
fn heisenberg_translations_compose_to_unipotent_maps() {
    let mut rng = rng(62);
    let e1 = CVec3::new(r(1.0), r(0.0), r(0.0));
    for _ in 0..100 {
        let h1 = heisenberg_translation(rand_c64(&mut rng), rng.random_range(-2.0..2.0));
        let h2 = heisenberg_translation(rand_c64(&mut rng), rng.random_range(-2.0..2.0));
        let prod = h1.compose(&h2);
        assert!(proj_dist(&prod.apply_vec(&e1), &e1) < 1e-12);
        let n = prod.matrix() - CMat3::identity();
        let nilpotent = n * n * n;
        assert!(nilpotent.norm() < 1e-9 * prod.matrix().norm().powi(3).max(1.0));
    }
}

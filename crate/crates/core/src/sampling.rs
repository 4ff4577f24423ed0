//! Seeded random instances of decorated triangulations.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::cusp::{cusp_holonomy, TOL_UNIT_MU};
use crate::hermitian::C64;
use crate::solver::{lift_mdecoration, phi_of_m};
use crate::surface::{ComplexError, Decoration, MDecoration, Slot, Triangulation};

/// Attempt bound for every rejection loop in this module.
pub const SAMPLE_RETRY_CAP: usize = 10_000;

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("no valid sample found in {0} attempts")]
    Exhausted(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Draws random m coordinates on the edges and a compatible triple
/// product per face. The m values are complex normal deviates kept away
/// from 0, from 1, and from the locus where phi degenerates to 1; the
/// last margin keeps the elementary matrices of a lifted decoration
/// well conditioned, so long holonomy products stay near the identity
/// where they should. Each face's Phi has its modulus pinned by the phi
/// product and its argument drawn uniformly until the face's Gram
/// discriminant is negative. A face whose phi data admits no valid
/// argument triggers a full resample.
pub fn sample_mdecoration<R: Rng + ?Sized>(
    t: &Triangulation,
    rng: &mut R,
) -> Result<MDecoration, SamplingError> {
    t.validate()?;
    let normal = Normal::new(0.0, 1.2).expect("fixed scale");
    'attempt: for _ in 0..SAMPLE_RETRY_CAP {
        let mut m = Vec::with_capacity(t.edge_count());
        for _ in 0..t.edge_count() {
            for _ in 0..SAMPLE_RETRY_CAP {
                let z = C64::new(normal.sample(rng), normal.sample(rng));
                let clear_of_poles = z.norm() > 0.2 && (z - C64::from(1.0)).norm() > 0.2;
                if clear_of_poles && (1.0 - phi_of_m(z)).abs() > 0.05 {
                    m.push(z);
                    break;
                }
            }
        }
        let mut big_phi = Vec::with_capacity(t.face_count());
        for f in 0..t.face_count() {
            let mut product = 1.0;
            let mut sum = 0.0;
            for s in 0..3 {
                let (e, _) = t.slot_edge(Slot::new(f, s)).expect("validated complex");
                let phi = phi_of_m(m[e]);
                product *= phi;
                sum += phi;
            }
            let modulus = product.sqrt();
            let tau = (sum - 1.0) / (2.0 * modulus);
            if tau <= -1.0 {
                continue 'attempt;
            }
            let mut arg = None;
            for _ in 0..SAMPLE_RETRY_CAP {
                let a = rng.random_range(0.0..2.0 * PI);
                if a.cos() < tau {
                    arg = Some(a);
                    break;
                }
            }
            let Some(arg) = arg else { continue 'attempt };
            big_phi.push(C64::from_polar(modulus, arg));
        }
        return Ok(MDecoration { m, big_phi });
    }
    Err(SamplingError::Exhausted(SAMPLE_RETRY_CAP))
}

/// Draws a full random decoration: keeps the first m sample whose every
/// face admits a solution, lifted along the all-attracting branch.
pub fn sample_decoration<R: Rng + ?Sized>(
    t: &Triangulation,
    rng: &mut R,
) -> Result<Decoration, SamplingError> {
    let branch = vec![false; t.face_count()];
    for _ in 0..SAMPLE_RETRY_CAP {
        let md = sample_mdecoration(t, rng)?;
        if let Ok(d) = lift_mdecoration(t, &md, &branch) {
            return Ok(d);
        }
    }
    Err(SamplingError::Exhausted(SAMPLE_RETRY_CAP))
}

/// Tunes a random torus decoration onto the parabolic locus. The m data
/// and the first face's Phi stay as sampled; the second face's Phi
/// argument sweeps its admissible arc, and the peripheral log |mu| of
/// the lifted decoration is bisected to a zero. All four lift branches
/// are scanned for a sign change before the m data is resampled. The
/// returned decoration satisfies `||mu| - 1| <` [`TOL_UNIT_MU`] around
/// the single puncture; in practice the bisection converges far below
/// that bound.
pub fn engineered_parabolic_torus<R: Rng + ?Sized>(
    rng: &mut R,
) -> Result<Decoration, SamplingError> {
    const GRID: usize = 40;
    let t = Triangulation::torus();
    let branches = [[false, true], [true, false], [false, false], [true, true]];
    for _ in 0..SAMPLE_RETRY_CAP {
        let md = sample_mdecoration(&t, rng)?;
        let modulus = md.big_phi[1].norm();
        let mut sum = 0.0;
        for s in 0..3 {
            let (e, _) = t.slot_edge(Slot::new(1, s)).expect("validated complex");
            sum += phi_of_m(md.m[e]);
        }
        let tau = (sum - 1.0) / (2.0 * modulus);
        let lo = if tau < 1.0 { tau.max(-1.0).acos() } else { 0.0 } + 1e-5;
        let hi = 2.0 * PI - lo;
        for branch in &branches {
            let lifted = |a: f64| -> Option<Decoration> {
                let mut probe = md.clone();
                probe.big_phi[1] = C64::from_polar(modulus, a);
                lift_mdecoration(&t, &probe, branch).ok()
            };
            let log_mu = |a: f64| -> Option<f64> {
                let report = cusp_holonomy(&t, &lifted(a)?, 0).ok()?;
                Some(report.mu.norm().ln())
            };
            let mut bracket = None;
            let mut prev: Option<(f64, f64)> = None;
            for i in 0..=GRID {
                let a = lo + (hi - lo) * i as f64 / GRID as f64;
                let Some(v) = log_mu(a) else {
                    prev = None;
                    continue;
                };
                if let Some((pa, pv)) = prev {
                    if pv * v <= 0.0 {
                        bracket = Some((pa, pv, a));
                        break;
                    }
                }
                prev = Some((a, v));
            }
            let Some((mut a0, mut f0, mut a1)) = bracket else {
                continue;
            };
            for _ in 0..80 {
                let mid = 0.5 * (a0 + a1);
                let Some(vm) = log_mu(mid) else { break };
                if f0 * vm <= 0.0 {
                    a1 = mid;
                } else {
                    (a0, f0) = (mid, vm);
                }
            }
            for a in [0.5 * (a0 + a1), a0, a1] {
                let Some(d) = lifted(a) else { continue };
                let Ok(report) = cusp_holonomy(&t, &d, 0) else {
                    continue;
                };
                if (report.mu.norm() - 1.0).abs() < TOL_UNIT_MU {
                    return Ok(d);
                }
            }
        }
    }
    Err(SamplingError::Exhausted(SAMPLE_RETRY_CAP))
}

//! Numerical kernel for flag coordinates on PU(2,1) representation
//! varieties of punctured surfaces.
//!
//! The complex hyperbolic plane is the projectivized negative cone of a
//! Hermitian form of signature (2,1) on C^3. A *flag* is a pair (complex
//! line, boundary point on that line). Generic configurations of flags are
//! classified by a small set of complex invariants; decorating an ideal
//! triangulation of a punctured surface with such invariants produces a
//! representation of the surface group into PU(2,1), one elementary matrix
//! per edge of the hexagonation of the triangulation.
//!
//! Layering, bottom up:
//!
//! * [`hermitian`]: pairings, Gram matrices, signatures, anti-dual bases
//!   for an arbitrary signature (2,1) form.
//! * [`linalg`]: small dense eigen-solvers and projective comparisons.
//! * [`geometry`]: lines, flags, isometries, Lagrangian reflections.
//! * [`invariants`]: the phi/Phi/m/delta calculus and reconstruction of
//!   configurations from invariants.
//! * [`isometries`]: standard position normalization plus the explicit
//!   transfer and exchange matrices.
//! * [`surface`]: triangulations, hexagonations, decorations.
//! * [`representation`]: the edge cocycle, holonomy, and both directions
//!   of the decoration/representation correspondence.
//! * [`solver`]: per-triangle recovery of delta from (phi, Phi, m) data
//!   and the 2^N lift enumeration.
//! * [`cusp`]: peripheral holonomy classification around punctures.
//! * [`sampling`]: seeded random instances for tests and the CLI.
//! * [`json`]: on-disk formats.

pub mod cusp;
pub mod geometry;
pub mod invariants;
pub mod isometries;
pub mod hermitian;
pub mod json;
pub mod linalg;
pub mod representation;
pub mod sampling;
pub mod solver;
pub mod surface;

pub use hermitian::{C64, CMat3, CVec3};

//! Triangulated punctured surfaces, their hexagonations, and the
//! decoration data carried by faces and edges.
//!
//! A triangulation lists faces as vertex-label triples and glues directed
//! sides in pairs. Slot `s` of a face is the side from corner `s` to
//! corner `s + 1`; a gluing identifies two sides head to tail, so corner
//! `s` of one face meets corner `s' + 1` of the other. The hexagonation
//! truncates every face to a hexagon whose vertices record a corner
//! together with the corner it looks toward; its sides alternate between
//! exchange edges (crossing a glued side) and transfer edges (turning
//! around a corner).

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::hermitian::C64;
use crate::invariants::{TOL_ORTHOGONAL, TripleFlagInvariant};

/// Default tolerance for decoration residuals.
pub const TOL_DECORATION: f64 = 1e-8;

/// Edges whose phi lies within this distance of 1 are degenerate: the two
/// complex lines meet on the boundary and the m invariant blows up.
pub const TOL_DEGENERATE: f64 = 1e-8;

/// One directed side of a face: the side from corner `slot` to corner
/// `slot + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Slot {
    pub face: usize,
    pub slot: usize,
}

impl Slot {
    pub fn new(face: usize, slot: usize) -> Self {
        Slot { face, slot }
    }
}

impl From<[usize; 2]> for Slot {
    fn from([face, slot]: [usize; 2]) -> Self {
        Slot { face, slot }
    }
}

impl From<Slot> for [usize; 2] {
    fn from(s: Slot) -> Self {
        [s.face, s.slot]
    }
}

#[derive(Debug, Error)]
pub enum ComplexError {
    #[error("a punctured surface needs at least one puncture")]
    NoPunctures,
    #[error("Euler characteristic 2 - 2g - p = {0} is not negative")]
    BadSignature(i64),
    #[error("face {face} carries vertex label {vertex}, but only {punctures} punctures exist")]
    BadVertexLabel {
        face: usize,
        vertex: usize,
        punctures: usize,
    },
    #[error("gluing {index} references face {face} slot {slot}, which does not exist")]
    BadSlot {
        index: usize,
        face: usize,
        slot: usize,
    },
    #[error("face {face} slot {slot} is glued to itself")]
    SelfGlued { face: usize, slot: usize },
    #[error("face {face} slot {slot} appears in {count} gluings instead of exactly one")]
    SlotMultiplicity {
        face: usize,
        slot: usize,
        count: usize,
    },
    #[error(
        "gluing {index} at face {face} slot {slot} identifies sides whose vertex labels \
         do not match head to tail; only orientation-reversing gluings are allowed"
    )]
    OrientationMismatch {
        index: usize,
        face: usize,
        slot: usize,
    },
    #[error("complex has Euler characteristic {found}, the signature requires {expected}")]
    EulerMismatch { found: i64, expected: i64 },
    #[error("complex realizes {found} corner classes, expected one per puncture ({expected})")]
    CornerClassCount { found: usize, expected: usize },
    #[error("puncture label {label} is carried by more than one corner class")]
    DuplicatePunctureLabel { label: usize },
    #[error("complex is not connected")]
    Disconnected,
}

/// A triangulation of a punctured surface of the given signature. Faces
/// are corner triples of puncture labels (repetition allowed), and every
/// side belongs to exactly one gluing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation {
    pub genus: usize,
    pub punctures: usize,
    pub faces: Vec<[usize; 3]>,
    pub gluings: Vec<(Slot, Slot)>,
}

impl Triangulation {
    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.gluings.len()
    }

    pub fn vertex(&self, face: usize, corner: usize) -> usize {
        self.faces[face][corner % 3]
    }

    /// The gluing containing the given side, as (edge index, whether the
    /// side is the first member).
    pub fn slot_edge(&self, s: Slot) -> Option<(usize, bool)> {
        self.gluings.iter().enumerate().find_map(|(e, &(a, b))| {
            if a == s {
                Some((e, true))
            } else if b == s {
                Some((e, false))
            } else {
                None
            }
        })
    }

    /// The side glued to the given one.
    pub fn partner(&self, s: Slot) -> Option<Slot> {
        self.gluings.iter().find_map(|&(a, b)| {
            if a == s {
                Some(b)
            } else if b == s {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Checks that the data describes a connected oriented triangulation
    /// of the declared signature: every side glued exactly once and not
    /// to itself, vertex labels matching head to tail across gluings,
    /// Euler characteristic `2 - 2g - p`, and one corner class per
    /// puncture.
    pub fn validate(&self) -> Result<(), ComplexError> {
        if self.punctures == 0 {
            return Err(ComplexError::NoPunctures);
        }
        let expected = 2i64 - 2 * self.genus as i64 - self.punctures as i64;
        if expected >= 0 {
            return Err(ComplexError::BadSignature(expected));
        }
        let nf = self.face_count();
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                if v >= self.punctures {
                    return Err(ComplexError::BadVertexLabel {
                        face: f,
                        vertex: v,
                        punctures: self.punctures,
                    });
                }
            }
        }
        let mut cover = vec![[0usize; 3]; nf];
        for (index, &(a, b)) in self.gluings.iter().enumerate() {
            for s in [a, b] {
                if s.face >= nf || s.slot >= 3 {
                    return Err(ComplexError::BadSlot {
                        index,
                        face: s.face,
                        slot: s.slot,
                    });
                }
            }
            if a == b {
                return Err(ComplexError::SelfGlued {
                    face: a.face,
                    slot: a.slot,
                });
            }
            cover[a.face][a.slot] += 1;
            cover[b.face][b.slot] += 1;
        }
        for (face, row) in cover.iter().enumerate() {
            for (slot, &count) in row.iter().enumerate() {
                if count != 1 {
                    return Err(ComplexError::SlotMultiplicity { face, slot, count });
                }
            }
        }
        let found = nf as i64 - self.edge_count() as i64;
        if found != expected {
            return Err(ComplexError::EulerMismatch { found, expected });
        }
        for (index, &(a, b)) in self.gluings.iter().enumerate() {
            let tail_ok = self.vertex(a.face, a.slot) == self.vertex(b.face, b.slot + 1);
            let head_ok = self.vertex(a.face, a.slot + 1) == self.vertex(b.face, b.slot);
            if !tail_ok || !head_ok {
                return Err(ComplexError::OrientationMismatch {
                    index,
                    face: a.face,
                    slot: a.slot,
                });
            }
        }
        let mut corners = UnionFind::new(3 * nf);
        for &(a, b) in &self.gluings {
            corners.union(3 * a.face + a.slot, 3 * b.face + (b.slot + 1) % 3);
            corners.union(3 * a.face + (a.slot + 1) % 3, 3 * b.face + b.slot);
        }
        let mut labels = vec![None; 3 * nf];
        let mut classes = 0usize;
        for f in 0..nf {
            for c in 0..3 {
                let root = corners.find(3 * f + c);
                if labels[root].is_none() {
                    labels[root] = Some(self.vertex(f, c));
                    classes += 1;
                }
            }
        }
        if classes != self.punctures {
            return Err(ComplexError::CornerClassCount {
                found: classes,
                expected: self.punctures,
            });
        }
        let mut seen = vec![false; self.punctures];
        for label in labels.into_iter().flatten() {
            if seen[label] {
                return Err(ComplexError::DuplicatePunctureLabel { label });
            }
            seen[label] = true;
        }
        let mut visited = vec![false; nf];
        let mut queue = vec![0usize];
        visited[0] = true;
        while let Some(f) = queue.pop() {
            for &(a, b) in &self.gluings {
                for (x, y) in [(a, b), (b, a)] {
                    if x.face == f && !visited[y.face] {
                        visited[y.face] = true;
                        queue.push(y.face);
                    }
                }
            }
        }
        if visited.iter().any(|&v| !v) {
            return Err(ComplexError::Disconnected);
        }
        Ok(())
    }

    /// The canonical once-punctured torus: two faces glued slot to slot.
    pub fn torus() -> Self {
        Triangulation {
            genus: 1,
            punctures: 1,
            faces: vec![[0, 0, 0], [0, 0, 0]],
            gluings: (0..3)
                .map(|s| (Slot::new(0, s), Slot::new(1, s)))
                .collect(),
        }
    }

    /// The thrice-punctured sphere: the double of an ideal triangle.
    pub fn three_punctured_sphere() -> Self {
        Triangulation {
            genus: 0,
            punctures: 3,
            faces: vec![[0, 1, 2], [1, 0, 2]],
            gluings: vec![
                (Slot::new(0, 0), Slot::new(1, 0)),
                (Slot::new(0, 1), Slot::new(1, 2)),
                (Slot::new(0, 2), Slot::new(1, 1)),
            ],
        }
    }

    /// A standard triangulation of the surface of genus `g` with `p`
    /// punctures: the canonical torus or a fanned `4g`-gon for `p = 1`
    /// (the thrice-punctured sphere for `g = 0`), then one cone
    /// subdivision of the last face per additional puncture.
    pub fn standard(genus: usize, punctures: usize) -> Result<Self, ComplexError> {
        if punctures == 0 {
            return Err(ComplexError::NoPunctures);
        }
        let chi = 2i64 - 2 * genus as i64 - punctures as i64;
        if chi >= 0 {
            return Err(ComplexError::BadSignature(chi));
        }
        let mut t = match genus {
            0 => Self::three_punctured_sphere(),
            1 => Self::torus(),
            g => Self::polygon_fan(g),
        };
        while t.punctures < punctures {
            t.cone_last_face();
        }
        Ok(t)
    }

    /// The once-punctured genus-`g` surface as a `4g`-gon with the usual
    /// side pairing, fanned into triangles from polygon corner 0. Side
    /// `k` of the polygon pairs with side `k + 2` within each block of
    /// four.
    fn polygon_fan(genus: usize) -> Self {
        let n = 4 * genus;
        let nf = n - 2;
        let faces = vec![[0, 0, 0]; nf];
        let mut gluings = Vec::with_capacity(3 * nf / 2);
        for f in 1..nf {
            gluings.push((Slot::new(f - 1, 2), Slot::new(f, 0)));
        }
        let side = |k: usize| {
            if k == 0 {
                Slot::new(0, 0)
            } else if k == n - 1 {
                Slot::new(nf - 1, 2)
            } else {
                Slot::new(k - 1, 1)
            }
        };
        for block in 0..genus {
            gluings.push((side(4 * block), side(4 * block + 2)));
            gluings.push((side(4 * block + 1), side(4 * block + 3)));
        }
        Triangulation {
            genus,
            punctures: 1,
            faces,
            gluings,
        }
    }

    /// Cones the last face: replaces it by three triangles sharing a new
    /// puncture in the middle, rewiring the outer gluings.
    fn cone_last_face(&mut self) {
        let last = self.face_count() - 1;
        let [x, y, z] = self.faces[last];
        let w = self.punctures;
        self.punctures += 1;
        let n2 = self.face_count();
        let n3 = n2 + 1;
        self.faces[last] = [x, y, w];
        self.faces.push([y, z, w]);
        self.faces.push([z, x, w]);
        for (a, b) in self.gluings.iter_mut() {
            for s in [a, b] {
                if s.face == last && s.slot == 1 {
                    *s = Slot::new(n2, 0);
                } else if s.face == last && s.slot == 2 {
                    *s = Slot::new(n3, 0);
                }
            }
        }
        self.gluings.push((Slot::new(last, 1), Slot::new(n2, 2)));
        self.gluings.push((Slot::new(n2, 1), Slot::new(n3, 2)));
        self.gluings.push((Slot::new(n3, 1), Slot::new(last, 2)));
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// A hexagon vertex of the truncated face `face`: it sits at corner
/// `corner` and looks along the side toward corner `toward`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HexVertex {
    pub face: usize,
    pub corner: usize,
    pub toward: usize,
}

impl HexVertex {
    pub fn new(face: usize, corner: usize, toward: usize) -> Self {
        debug_assert!(corner < 3 && toward < 3 && corner != toward);
        HexVertex {
            face,
            corner,
            toward,
        }
    }

    /// The raw index of the vertex before any identification, six per
    /// face.
    pub fn index(&self) -> usize {
        6 * self.face + 2 * self.corner + usize::from(self.toward != (self.corner + 1) % 3)
    }
}

/// One directed hexagonation edge. An exchange step crosses the glued
/// side `slot` of `face`; a transfer step turns around `corner`. The
/// forward direction runs from the vertex named first below:
/// exchange from `(slot, slot+1)` to `(slot+1, slot)`, transfer from
/// `(corner, corner+1)` to `(corner, corner+2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HtStep {
    Exchange {
        face: usize,
        slot: usize,
        reverse: bool,
    },
    Transfer {
        face: usize,
        corner: usize,
        reverse: bool,
    },
}

impl HtStep {
    pub fn face(&self) -> usize {
        match *self {
            HtStep::Exchange { face, .. } | HtStep::Transfer { face, .. } => face,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            HtStep::Exchange {
                face,
                slot,
                reverse,
            } => HtStep::Exchange {
                face,
                slot,
                reverse: !reverse,
            },
            HtStep::Transfer {
                face,
                corner,
                reverse,
            } => HtStep::Transfer {
                face,
                corner,
                reverse: !reverse,
            },
        }
    }

    pub fn tail(&self) -> HexVertex {
        match *self {
            HtStep::Exchange {
                face,
                slot,
                reverse: false,
            } => HexVertex::new(face, slot, (slot + 1) % 3),
            HtStep::Exchange {
                face,
                slot,
                reverse: true,
            } => HexVertex::new(face, (slot + 1) % 3, slot),
            HtStep::Transfer {
                face,
                corner,
                reverse: false,
            } => HexVertex::new(face, corner, (corner + 1) % 3),
            HtStep::Transfer {
                face,
                corner,
                reverse: true,
            } => HexVertex::new(face, corner, (corner + 2) % 3),
        }
    }

    pub fn head(&self) -> HexVertex {
        self.reversed().tail()
    }
}

impl Serialize for HtStep {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let (kind, face, index, reverse) = match *self {
            HtStep::Exchange {
                face,
                slot,
                reverse,
            } => ("E", face, slot, reverse),
            HtStep::Transfer {
                face,
                corner,
                reverse,
            } => ("T", face, corner, reverse),
        };
        (kind, face, index, if reverse { "-" } else { "+" }).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for HtStep {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let (kind, face, index, sign) = <(String, usize, usize, String)>::deserialize(de)?;
        let reverse = match sign.as_str() {
            "+" => false,
            "-" => true,
            other => {
                return Err(D::Error::custom(format!(
                    "step direction must be \"+\" or \"-\", got {other:?}"
                )));
            }
        };
        if index >= 3 {
            return Err(D::Error::custom("step index must be 0, 1 or 2"));
        }
        match kind.as_str() {
            "E" => Ok(HtStep::Exchange {
                face,
                slot: index,
                reverse,
            }),
            "T" => Ok(HtStep::Transfer {
                face,
                corner: index,
                reverse,
            }),
            other => Err(D::Error::custom(format!(
                "step kind must be \"E\" or \"T\", got {other:?}"
            ))),
        }
    }
}

/// The two forward-oriented steps leaving a hexagon vertex: its transfer
/// edge and its exchange edge.
pub fn steps_from(v: HexVertex) -> [HtStep; 2] {
    if v.toward == (v.corner + 1) % 3 {
        [
            HtStep::Transfer {
                face: v.face,
                corner: v.corner,
                reverse: false,
            },
            HtStep::Exchange {
                face: v.face,
                slot: v.corner,
                reverse: false,
            },
        ]
    } else {
        [
            HtStep::Transfer {
                face: v.face,
                corner: v.corner,
                reverse: true,
            },
            HtStep::Exchange {
                face: v.face,
                slot: v.toward,
                reverse: true,
            },
        ]
    }
}

/// The boundary of the hexagon of `face`, starting at vertex `(0, 1)`
/// and alternating transfer and exchange steps until it closes up.
pub fn hexagon_boundary(face: usize) -> [HtStep; 6] {
    [
        HtStep::Transfer {
            face,
            corner: 0,
            reverse: false,
        },
        HtStep::Exchange {
            face,
            slot: 2,
            reverse: true,
        },
        HtStep::Transfer {
            face,
            corner: 2,
            reverse: false,
        },
        HtStep::Exchange {
            face,
            slot: 1,
            reverse: true,
        },
        HtStep::Transfer {
            face,
            corner: 1,
            reverse: false,
        },
        HtStep::Exchange {
            face,
            slot: 0,
            reverse: true,
        },
    ]
}

/// The hexagonation of a validated triangulation: six hexagon vertices
/// per face, identified in pairs across gluings, with one exchange edge
/// per triangulation edge and three transfer edges per face.
#[derive(Clone, Debug)]
pub struct Hexagonation {
    face_count: usize,
    vertex_class: Vec<usize>,
    class_count: usize,
    side_edge: Vec<usize>,
}

impl Hexagonation {
    pub fn face_count(&self) -> usize {
        self.face_count
    }

    pub fn hexagon_count(&self) -> usize {
        self.face_count
    }

    /// Raw hexagon vertices before identification: six per face.
    pub fn vertex_count(&self) -> usize {
        6 * self.face_count
    }

    /// Identified hexagon vertices.
    pub fn vertex_class_count(&self) -> usize {
        self.class_count
    }

    pub fn class_of(&self, v: HexVertex) -> usize {
        self.vertex_class[v.index()]
    }

    /// Identified exchange edges, one per triangulation edge.
    pub fn exchange_edge_count(&self) -> usize {
        self.side_edge.len() / 2
    }

    pub fn transfer_edge_count(&self) -> usize {
        3 * self.face_count
    }

    /// The triangulation edge crossed by the exchange step at the given
    /// side.
    pub fn exchange_edge_of(&self, face: usize, slot: usize) -> usize {
        self.side_edge[3 * face + slot]
    }

    /// Euler characteristic of the identified complex; the hexagons
    /// deformation retract the punctured surface, so this equals
    /// `2 - 2g - p`.
    pub fn euler_characteristic(&self) -> i64 {
        let edges = self.exchange_edge_count() + self.transfer_edge_count();
        self.class_count as i64 - edges as i64 + self.face_count as i64
    }
}

pub fn build_hexagonation(t: &Triangulation) -> Result<Hexagonation, ComplexError> {
    t.validate()?;
    let nf = t.face_count();
    let mut uf = UnionFind::new(6 * nf);
    let mut side_edge = vec![0usize; 3 * nf];
    for (index, &(a, b)) in t.gluings.iter().enumerate() {
        let (s, sp) = (a.slot, b.slot);
        uf.union(
            HexVertex::new(a.face, s, (s + 1) % 3).index(),
            HexVertex::new(b.face, (sp + 1) % 3, sp).index(),
        );
        uf.union(
            HexVertex::new(a.face, (s + 1) % 3, s).index(),
            HexVertex::new(b.face, sp, (sp + 1) % 3).index(),
        );
        side_edge[3 * a.face + s] = index;
        side_edge[3 * b.face + sp] = index;
    }
    let mut root_id = vec![usize::MAX; 6 * nf];
    let mut vertex_class = vec![0usize; 6 * nf];
    let mut class_count = 0usize;
    for v in 0..6 * nf {
        let root = uf.find(v);
        if root_id[root] == usize::MAX {
            root_id[root] = class_count;
            class_count += 1;
        }
        vertex_class[v] = root_id[root];
    }
    Ok(Hexagonation {
        face_count: nf,
        vertex_class,
        class_count,
        side_edge,
    })
}

#[derive(Debug, Error)]
pub enum DecorationError {
    #[error("decoration carries {found} phi entries for {expected} edges")]
    PhiLength { found: usize, expected: usize },
    #[error("decoration carries {found} face records for {expected} faces")]
    FaceLength { found: usize, expected: usize },
    #[error("m-decoration carries {found} m entries for {expected} edges")]
    MLength { found: usize, expected: usize },
    #[error("m-decoration carries {found} Phi entries for {expected} faces")]
    BigPhiLength { found: usize, expected: usize },
    #[error("face {face} slot {slot} is not glued; validate the complex first")]
    UngluedSlot { face: usize, slot: usize },
    #[error("m values disagree across edge {edge}: relative difference {residual:.3e}")]
    Incompatible { edge: usize, residual: f64 },
}

/// The per-face decoration data: the triple product and the three
/// cyclically ordered deltas, one per corner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FaceDecoration {
    #[serde(rename = "Phi", with = "crate::json::complex")]
    pub big_phi: C64,
    #[serde(with = "crate::json::complex_array")]
    pub delta: [C64; 3],
}

/// A decorated triangulation: one phi per edge and one
/// [`FaceDecoration`] per face. Together with the combinatorics this
/// pins a flag-triple record on every face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decoration {
    pub phi: Vec<f64>,
    pub faces: Vec<FaceDecoration>,
}

impl Decoration {
    fn check_shape(&self, t: &Triangulation) -> Result<(), DecorationError> {
        if self.phi.len() != t.edge_count() {
            return Err(DecorationError::PhiLength {
                found: self.phi.len(),
                expected: t.edge_count(),
            });
        }
        if self.faces.len() != t.face_count() {
            return Err(DecorationError::FaceLength {
                found: self.faces.len(),
                expected: t.face_count(),
            });
        }
        Ok(())
    }

    /// The flag-triple record of one face, with the local labels 1, 2, 3
    /// reading the corners in slot order: `phi12` sits on the edge at
    /// slot 0, `phi23` at slot 1 and `phi31` at slot 2.
    pub fn face_record(
        &self,
        t: &Triangulation,
        face: usize,
    ) -> Result<TripleFlagInvariant, DecorationError> {
        self.check_shape(t)?;
        let mut phis = [0.0; 3];
        for (s, phi) in phis.iter_mut().enumerate() {
            let (edge, _) = t
                .slot_edge(Slot::new(face, s))
                .ok_or(DecorationError::UngluedSlot { face, slot: s })?;
            *phi = self.phi[edge];
        }
        let fd = &self.faces[face];
        Ok(TripleFlagInvariant::from_coordinates(
            phis[0],
            phis[1],
            phis[2],
            fd.big_phi,
            fd.delta[0],
            fd.delta[1],
            fd.delta[2],
        ))
    }
}

/// The projection of a decoration to its edge data: one m per edge,
/// oriented along the first gluing member, and the triple product per
/// face. These coordinates determine the decoration up to finitely many
/// lifts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MDecoration {
    #[serde(with = "crate::json::complex_vec")]
    pub m: Vec<C64>,
    #[serde(rename = "Phi", with = "crate::json::complex_vec")]
    pub big_phi: Vec<C64>,
}

impl MDecoration {
    /// The m invariant of the given side in the face's own orientation:
    /// the stored value on the first gluing member, its conjugate on the
    /// second.
    pub fn local_m(&self, t: &Triangulation, face: usize, slot: usize) -> Option<C64> {
        let (edge, first) = t.slot_edge(Slot::new(face, slot))?;
        let m = *self.m.get(edge)?;
        Some(if first { m } else { m.conj() })
    }
}

/// One scalar constraint check: the entry passes when the residual does
/// not exceed the tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct ResidualEntry {
    pub constraint: String,
    pub location: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl ResidualEntry {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

/// The outcome of checking a decoration against a triangulation. The
/// degenerate flag marks edges with phi within [`TOL_DEGENERATE`] of 1;
/// such decorations may pass every residual check but have no usable m
/// coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub entries: Vec<ResidualEntry>,
    pub degenerate: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(ResidualEntry::passed)
    }

    pub fn failures(&self) -> Vec<&ResidualEntry> {
        self.entries.iter().filter(|e| !e.passed()).collect()
    }
}

pub fn validate_decoration(t: &Triangulation, d: &Decoration) -> ValidationReport {
    validate_decoration_with(t, d, TOL_DECORATION)
}

/// Checks every decoration constraint at the given tolerance: phi
/// positivity, the modulus relation and Gram negativity per face, the
/// three circle constraints per face, and m compatibility across every
/// glued edge.
pub fn validate_decoration_with(t: &Triangulation, d: &Decoration, tol: f64) -> ValidationReport {
    let mut entries = Vec::new();
    if let Err(err) = t.validate() {
        entries.push(ResidualEntry {
            constraint: "complex".into(),
            location: err.to_string(),
            residual: f64::INFINITY,
            tolerance: 0.0,
        });
        return ValidationReport {
            entries,
            degenerate: false,
        };
    }
    if let Err(err) = d.check_shape(t) {
        entries.push(ResidualEntry {
            constraint: "shape".into(),
            location: err.to_string(),
            residual: f64::INFINITY,
            tolerance: 0.0,
        });
        return ValidationReport {
            entries,
            degenerate: false,
        };
    }
    let degenerate = d
        .phi
        .iter()
        .any(|&phi| (phi - 1.0).abs() < TOL_DEGENERATE);
    for (e, &phi) in d.phi.iter().enumerate() {
        entries.push(ResidualEntry {
            constraint: "phi positivity".into(),
            location: format!("edge {e}"),
            residual: if phi > TOL_ORTHOGONAL {
                0.0
            } else {
                TOL_ORTHOGONAL - phi
            },
            tolerance: 0.0,
        });
    }
    let mut records = Vec::with_capacity(t.face_count());
    for f in 0..t.face_count() {
        let rec = d.face_record(t, f).expect("shape already checked");
        let prod = rec.phi12 * rec.phi23 * rec.phi31;
        entries.push(ResidualEntry {
            constraint: "modulus relation".into(),
            location: format!("face {f}"),
            residual: (rec.big_phi.norm_sqr() - prod).abs() / prod.abs().max(1e-300),
            tolerance: tol,
        });
        entries.push(ResidualEntry {
            constraint: "gram negativity".into(),
            location: format!("face {f}"),
            residual: rec.delta().max(0.0),
            tolerance: 0.0,
        });
        for corner in 0..3 {
            entries.push(ResidualEntry {
                constraint: "circle".into(),
                location: format!("face {f} corner {corner}"),
                residual: rec.circle_residual(corner),
                tolerance: tol,
            });
        }
        records.push(rec);
    }
    for (e, &(a, b)) in t.gluings.iter().enumerate() {
        let ma = records[a.face].m_of(a.slot, (a.slot + 1) % 3);
        let mb = records[b.face].m_of(b.slot, (b.slot + 1) % 3);
        entries.push(ResidualEntry {
            constraint: "m compatibility".into(),
            location: format!("edge {e}"),
            residual: (ma - mb.conj()).norm() / ma.norm().max(mb.norm()).max(1e-300),
            tolerance: tol,
        });
    }
    ValidationReport { entries, degenerate }
}

/// Projects a decoration to its m coordinates, verifying that the two
/// faces along every edge induce conjugate m values.
pub fn project_to_m(t: &Triangulation, d: &Decoration) -> Result<MDecoration, DecorationError> {
    d.check_shape(t)?;
    let records = (0..t.face_count())
        .map(|f| d.face_record(t, f))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = Vec::with_capacity(t.edge_count());
    for (e, &(a, b)) in t.gluings.iter().enumerate() {
        let ma = records[a.face].m_of(a.slot, (a.slot + 1) % 3);
        let mb = records[b.face].m_of(b.slot, (b.slot + 1) % 3);
        let residual = (ma - mb.conj()).norm() / ma.norm().max(mb.norm()).max(1e-300);
        if residual > TOL_DECORATION {
            return Err(DecorationError::Incompatible { edge: e, residual });
        }
        m.push(ma);
    }
    let big_phi = d.faces.iter().map(|fd| fd.big_phi).collect();
    Ok(MDecoration { m, big_phi })
}

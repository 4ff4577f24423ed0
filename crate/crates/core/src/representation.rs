//! From a decorated triangulation to a representation and back.
//!
//! Every oriented hexagon edge of the complex carries an elementary
//! isometry computed from the face's invariant record: exchange matrices
//! on the sides, transfer matrices inside the corners. Composing them
//! along paths gives holonomy; the hexagon boundary composes to the
//! identity, so the holonomy of a loop depends only on its homotopy
//! class. Developing the standard flag along a spanning tree inverts the
//! construction and recovers the decoration.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geometry::{Flag, Isometry};
use crate::invariants::{InvariantError, TripleFlagInvariant, triple_invariants};
use crate::isometries::{ElementaryError, TransferParams, exchange_matrix, transfer_from_params};
use crate::linalg::pu_dist;
use crate::surface::{
    ComplexError, Decoration, DecorationError, FaceDecoration, HexVertex, Hexagonation, HtStep,
    Slot, TOL_DECORATION, Triangulation, build_hexagonation, hexagon_boundary,
};

/// Bound on the hexagon-boundary holonomy's deviation from the identity
/// in PU(2,1) for a valid decoration.
pub const TOL_COCYCLE: f64 = 1e-8;

/// Bound on the defining-relation residual of a built representation.
pub const TOL_RELATION: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RepresentationError {
    #[error("m values disagree across edge {edge}, residual {residual:.3e}")]
    IncompatibleDecoration { edge: usize, residual: f64 },
    #[error("face {face} is too degenerate to carry elementary matrices")]
    DegenerateFace {
        face: usize,
        #[source]
        source: ElementaryError,
    },
    #[error("step {position} does not start where the previous step ends")]
    DisconnectedPath { position: usize },
    #[error("generator loop {index} does not close up at its base vertex")]
    OpenLoop { index: usize },
    #[error("generator loop {index} is based at a different vertex than the first loop")]
    BaseMismatch { index: usize },
    #[error(
        "{handles} handle pairs and {peripherals} peripheral loops do not fit genus {genus} with {punctures} punctures"
    )]
    GeneratorCount {
        handles: usize,
        peripherals: usize,
        genus: usize,
        punctures: usize,
    },
    #[error("defining relation fails in PU(2,1), residual {0:.3e}")]
    RelationViolation(f64),
    #[error("face {face} carries a non-generic flag triple")]
    NonGenericTriple {
        face: usize,
        #[source]
        source: InvariantError,
    },
    #[error("flags across edge {edge} have different invariants, phi residual {residual:.3e}")]
    IncompatibleFlags { edge: usize, residual: f64 },
    #[error("flag assignment covers {found} faces, triangulation has {expected}")]
    FlagCount { found: usize, expected: usize },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Decoration(#[from] DecorationError),
}

/// The twelve elementary isometries of one face, indexed by slot or
/// corner and by direction.
#[derive(Debug)]
struct FaceCocycle {
    exchange_fwd: [Isometry; 3],
    exchange_back: [Isometry; 3],
    transfer_fwd: [Isometry; 3],
    transfer_back: [Isometry; 3],
}

fn face_cocycle(face: usize, rec: &TripleFlagInvariant) -> Result<FaceCocycle, RepresentationError> {
    let wrap = |source| RepresentationError::DegenerateFace { face, source };
    let mut exchange_fwd = Vec::with_capacity(3);
    let mut exchange_back = Vec::with_capacity(3);
    let mut transfer_fwd = Vec::with_capacity(3);
    let mut transfer_back = Vec::with_capacity(3);
    for s in 0..3 {
        let m = rec.m_of(s, (s + 1) % 3);
        exchange_fwd.push(exchange_matrix(m).map_err(wrap)?);
        exchange_back.push(exchange_matrix(m.conj()).map_err(wrap)?);
        let fwd = TransferParams::oriented(rec, s, (s + 1) % 3, (s + 2) % 3).map_err(wrap)?;
        let back = TransferParams::oriented(rec, s, (s + 2) % 3, (s + 1) % 3).map_err(wrap)?;
        transfer_fwd.push(transfer_from_params(&fwd).map_err(wrap)?);
        transfer_back.push(transfer_from_params(&back).map_err(wrap)?);
    }
    let take3 = |v: Vec<Isometry>| -> [Isometry; 3] { v.try_into().ok().expect("three slots") };
    Ok(FaceCocycle {
        exchange_fwd: take3(exchange_fwd),
        exchange_back: take3(exchange_back),
        transfer_fwd: take3(transfer_fwd),
        transfer_back: take3(transfer_back),
    })
}

/// The edge-to-isometry assignment of a decorated triangulation.
#[derive(Debug)]
pub struct Cocycle {
    hexagonation: Hexagonation,
    faces: Vec<FaceCocycle>,
}

impl Cocycle {
    pub fn hexagonation(&self) -> &Hexagonation {
        &self.hexagonation
    }

    /// The elementary isometry of one oriented hexagon edge.
    pub fn isometry(&self, step: HtStep) -> &Isometry {
        let face = &self.faces[step.face()];
        match step {
            HtStep::Exchange { slot, reverse, .. } => {
                if reverse {
                    &face.exchange_back[slot]
                } else {
                    &face.exchange_fwd[slot]
                }
            }
            HtStep::Transfer { corner, reverse, .. } => {
                if reverse {
                    &face.transfer_back[corner]
                } else {
                    &face.transfer_fwd[corner]
                }
            }
        }
    }

    /// PU(2,1) deviation of the face's hexagon-boundary holonomy from the
    /// identity. At most `TOL_COCYCLE` on a valid decoration.
    pub fn hexagon_residual(&self, face: usize) -> f64 {
        let mut acc = Isometry::identity();
        for step in hexagon_boundary(face) {
            acc = self.isometry(step).compose(&acc);
        }
        pu_dist(acc.matrix(), Isometry::identity().matrix())
    }
}

/// Builds the cocycle of a decoration. Checks the decoration's shape, the
/// m compatibility across every edge, and per-face genericity; the
/// analytic constraints are the caller's business, and their failure
/// shows up as a hexagon residual.
pub fn build_cocycle(t: &Triangulation, d: &Decoration) -> Result<Cocycle, RepresentationError> {
    let hexagonation = build_hexagonation(t)?;
    let records: Vec<TripleFlagInvariant> = (0..t.face_count())
        .map(|f| d.face_record(t, f))
        .collect::<Result<_, _>>()?;
    for (e, (a, b)) in t.gluings.iter().enumerate() {
        let ma = records[a.face].m_of(a.slot, (a.slot + 1) % 3);
        let mb = records[b.face].m_of(b.slot, (b.slot + 1) % 3);
        let residual = (ma - mb.conj()).norm() / ma.norm().max(mb.norm()).max(1e-300);
        if residual > TOL_DECORATION {
            return Err(RepresentationError::IncompatibleDecoration { edge: e, residual });
        }
    }
    let faces = records
        .iter()
        .enumerate()
        .map(|(f, rec)| face_cocycle(f, rec))
        .collect::<Result<_, _>>()?;
    Ok(Cocycle {
        hexagonation,
        faces,
    })
}

/// Holonomy of an edge-connected path: the right-to-left product of the
/// step isometries, so the first step acts first. The empty path gives
/// the identity.
pub fn holonomy(c: &Cocycle, path: &[HtStep]) -> Result<Isometry, RepresentationError> {
    let mut acc = Isometry::identity();
    let mut prev_head: Option<usize> = None;
    for (position, &step) in path.iter().enumerate() {
        if step.face() >= c.hexagonation.face_count() {
            return Err(RepresentationError::DisconnectedPath { position });
        }
        let tail = c.hexagonation.class_of(step.tail());
        if prev_head.is_some_and(|h| h != tail) {
            return Err(RepresentationError::DisconnectedPath { position });
        }
        acc = c.isometry(step).compose(&acc);
        prev_head = Some(c.hexagonation.class_of(step.head()));
    }
    Ok(acc)
}

/// Generator loops for the standard presentation
/// `prod [a_i, b_i] prod c_j = 1`: one `(a, b)` pair per handle and one
/// peripheral loop per puncture, all based at the same hexagon vertex.
#[derive(Clone, Debug)]
pub struct GeneratorLoops {
    pub handles: Vec<(Vec<HtStep>, Vec<HtStep>)>,
    pub peripherals: Vec<Vec<HtStep>>,
}

/// The canonical loops of the one-punctured torus, based at the class of
/// face 0's vertex `V_01`. The peripheral loop is the counterclockwise
/// corner walk through all six transfer edges.
pub fn torus_generator_loops() -> GeneratorLoops {
    let t = |face, corner, reverse| HtStep::Transfer {
        face,
        corner,
        reverse,
    };
    let e = |face, slot, reverse| HtStep::Exchange {
        face,
        slot,
        reverse,
    };
    let a = vec![t(1, 1, true), t(0, 2, true), t(1, 0, true), e(0, 0, true)];
    let b = vec![t(0, 0, false), e(0, 2, true), t(1, 0, true), e(0, 0, true)];
    let c = vec![
        t(0, 0, false),
        t(1, 2, false),
        t(0, 1, false),
        t(1, 0, false),
        t(0, 2, false),
        t(1, 1, false),
    ];
    GeneratorLoops {
        handles: vec![(a, b)],
        peripherals: vec![c],
    }
}

/// Free generating loops of the hexagonation's edge graph: a spanning
/// tree is grown from the class of face 0's vertex `V_01`, and every
/// non-tree edge contributes the loop tree-path, edge, reverse tree-path.
/// The loops generate the image of any holonomy representation; they do
/// not form a standard presentation.
pub fn free_generator_loops(t: &Triangulation) -> Result<Vec<Vec<HtStep>>, RepresentationError> {
    let hexagonation = build_hexagonation(t)?;
    let mut steps: Vec<HtStep> = Vec::new();
    for face in 0..t.face_count() {
        for corner in 0..3 {
            steps.push(HtStep::Transfer {
                face,
                corner,
                reverse: false,
            });
        }
    }
    for (a, _) in &t.gluings {
        steps.push(HtStep::Exchange {
            face: a.face,
            slot: a.slot,
            reverse: false,
        });
    }

    let root = hexagonation.class_of(HexVertex::new(0, 0, 1));
    let classes = hexagonation.vertex_class_count();
    let mut path_to: Vec<Option<Vec<HtStep>>> = vec![None; classes];
    path_to[root] = Some(Vec::new());
    loop {
        let mut grown = false;
        for &step in &steps {
            for (tail, head, oriented) in [
                (step.tail(), step.head(), step),
                (step.head(), step.tail(), step.reversed()),
            ] {
                let from = hexagonation.class_of(tail);
                let to = hexagonation.class_of(head);
                if path_to[from].is_some() && path_to[to].is_none() {
                    let mut path = path_to[from].clone().expect("checked");
                    path.push(oriented);
                    path_to[to] = Some(path);
                    grown = true;
                }
            }
        }
        if !grown {
            break;
        }
    }

    let mut loops = Vec::new();
    for &step in &steps {
        let from = hexagonation.class_of(step.tail());
        let to = hexagonation.class_of(step.head());
        let (Some(out), Some(back)) = (&path_to[from], &path_to[to]) else {
            continue;
        };
        let tree_edge = back.last() == Some(&step) || out.last() == Some(&step.reversed());
        if tree_edge {
            continue;
        }
        let mut l = out.clone();
        l.push(step);
        l.extend(back.iter().rev().map(|s| s.reversed()));
        loops.push(l);
    }
    Ok(loops)
}

/// A representation of the surface group, as images of a standard
/// generating set together with the defining-relation residual.
pub struct SurfaceRepresentation {
    pub base_class: usize,
    pub handle_images: Vec<(Isometry, Isometry)>,
    pub peripheral_images: Vec<Isometry>,
    pub relation_residual: f64,
}

/// Builds the representation of a decoration along the given loops:
/// holonomy per generator, then the residual of
/// `prod [a_i, b_i] prod c_j` against the identity in PU(2,1).
pub fn build_representation(
    t: &Triangulation,
    d: &Decoration,
    loops: &GeneratorLoops,
) -> Result<SurfaceRepresentation, RepresentationError> {
    if loops.handles.len() != t.genus || loops.peripherals.len() != t.punctures {
        return Err(RepresentationError::GeneratorCount {
            handles: loops.handles.len(),
            peripherals: loops.peripherals.len(),
            genus: t.genus,
            punctures: t.punctures,
        });
    }
    let c = build_cocycle(t, d)?;

    let all: Vec<&Vec<HtStep>> = loops
        .handles
        .iter()
        .flat_map(|(a, b)| [a, b])
        .chain(loops.peripherals.iter())
        .collect();
    let mut base: Option<usize> = None;
    for (index, path) in all.iter().enumerate() {
        let (Some(first), Some(last)) = (path.first(), path.last()) else {
            continue;
        };
        let start = c.hexagonation.class_of(first.tail());
        let end = c.hexagonation.class_of(last.head());
        if start != end {
            return Err(RepresentationError::OpenLoop { index });
        }
        if *base.get_or_insert(start) != start {
            return Err(RepresentationError::BaseMismatch { index });
        }
    }
    let base_class = base.unwrap_or(0);

    let handle_images = loops
        .handles
        .iter()
        .map(|(a, b)| Ok((holonomy(&c, a)?, holonomy(&c, b)?)))
        .collect::<Result<Vec<_>, RepresentationError>>()?;
    let peripheral_images = loops
        .peripherals
        .iter()
        .map(|p| holonomy(&c, p))
        .collect::<Result<Vec<_>, RepresentationError>>()?;

    let mut relator = Isometry::identity();
    for (a, b) in &handle_images {
        let commutator = b
            .inverse()
            .compose(&a.inverse())
            .compose(&b.compose(a));
        relator = commutator.compose(&relator);
    }
    for image in &peripheral_images {
        relator = image.compose(&relator);
    }
    let relation_residual = pu_dist(relator.matrix(), Isometry::identity().matrix());
    if relation_residual > TOL_RELATION {
        return Err(RepresentationError::RelationViolation(relation_residual));
    }
    Ok(SurfaceRepresentation {
        base_class,
        handle_images,
        peripheral_images,
        relation_residual,
    })
}

fn vertex_index(corner: usize, toward: usize) -> usize {
    2 * corner + usize::from(toward != (corner + 1) % 3)
}

/// Transports the standard frame over the whole complex: faces are
/// visited by breadth-first search over gluings, each face's six hexagon
/// vertices are filled along its boundary cycle, and crossing a gluing
/// reuses the frame of the identified vertex. Returns, per face and
/// corner, the isometry carrying the developed configuration to standard
/// position at that corner.
fn develop_normalizers(
    t: &Triangulation,
    c: &Cocycle,
) -> Result<Vec<[Isometry; 6]>, RepresentationError> {
    let nf = t.face_count();
    let mut frames: Vec<[Option<Isometry>; 6]> = (0..nf)
        .map(|_| std::array::from_fn(|_| None))
        .collect();

    let fill_face = |frames: &mut Vec<[Option<Isometry>; 6]>, face: usize| {
        let cycle = hexagon_boundary(face);
        let start = cycle
            .iter()
            .position(|s| {
                let v = s.tail();
                frames[face][vertex_index(v.corner, v.toward)].is_some()
            })
            .expect("face was seeded");
        for k in 0..5 {
            let step = cycle[(start + k) % 6];
            let tail = step.tail();
            let head = step.head();
            let g = frames[face][vertex_index(tail.corner, tail.toward)]
                .clone()
                .expect("filled in cycle order");
            frames[face][vertex_index(head.corner, head.toward)] = Some(c.isometry(step).compose(&g));
        }
    };

    frames[0][vertex_index(0, 1)] = Some(Isometry::identity());
    fill_face(&mut frames, 0);
    let mut visited = vec![false; nf];
    visited[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(f) = queue.pop_front() {
        for s in 0..3 {
            let partner = t.partner(Slot::new(f, s)).expect("validated complex");
            if visited[partner.face] {
                continue;
            }
            // f's V_{s,s+1} is identified with the partner's V_{s'+1,s'}.
            let seed = frames[f][vertex_index(s, (s + 1) % 3)]
                .clone()
                .expect("source face is filled");
            frames[partner.face][vertex_index((partner.slot + 1) % 3, partner.slot)] = Some(seed);
            fill_face(&mut frames, partner.face);
            visited[partner.face] = true;
            queue.push_back(partner.face);
        }
    }

    Ok(frames
        .into_iter()
        .map(|face| face.map(|g| g.expect("connected complex")))
        .collect())
}

/// Develops the decoration into an explicit flag per face corner: the
/// standard flag pulled back by the corner's frame transport. Face
/// records of the result reproduce the decoration.
pub fn develop_flags(t: &Triangulation, d: &Decoration) -> Result<Vec<[Flag; 3]>, RepresentationError> {
    let c = build_cocycle(t, d)?;
    let frames = develop_normalizers(t, &c)?;
    let standard = Flag::standard();
    Ok(frames
        .into_iter()
        .map(|face| {
            std::array::from_fn(|x| {
                let g = &face[vertex_index(x, (x + 1) % 3)];
                g.inverse().apply_flag(&standard)
            })
        })
        .collect())
}

/// Reads a decoration off an explicit flag assignment: per-face records
/// give Phi and the deltas, the first face along each edge gives phi.
/// Corners identified by a gluing must carry flag pairs with equal
/// invariants; the phi values of the two sides are compared as a
/// consistency gate.
pub fn decorate_from_flags(
    t: &Triangulation,
    flags: &[[Flag; 3]],
) -> Result<Decoration, RepresentationError> {
    t.validate()?;
    if flags.len() != t.face_count() {
        return Err(RepresentationError::FlagCount {
            found: flags.len(),
            expected: t.face_count(),
        });
    }
    let mut records = Vec::with_capacity(flags.len());
    for (face, [f1, f2, f3]) in flags.iter().enumerate() {
        let rec = triple_invariants(f1, f2, f3)
            .map_err(|source| RepresentationError::NonGenericTriple { face, source })?;
        records.push(rec);
    }
    let mut phi = Vec::with_capacity(t.gluings.len());
    for (e, (a, b)) in t.gluings.iter().enumerate() {
        let pa = records[a.face].phi_of(a.slot, (a.slot + 1) % 3);
        let pb = records[b.face].phi_of(b.slot, (b.slot + 1) % 3);
        let residual = (pa - pb).abs() / pa.abs().max(1.0);
        if residual > 1e-10 {
            return Err(RepresentationError::IncompatibleFlags { edge: e, residual });
        }
        phi.push(pa);
    }
    let faces = records
        .iter()
        .map(|rec| FaceDecoration {
            big_phi: rec.big_phi,
            delta: [rec.delta1_23, rec.delta2_31, rec.delta3_12],
        })
        .collect();
    Ok(Decoration { phi, faces })
}

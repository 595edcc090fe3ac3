//! Cut sets and planar development.
//!
//! A *cut set* is a set of interior edges to slice. Cutting splits the
//! surface into *pieces* — maximal groups of faces connected through uncut
//! interior edges — and each piece is *developed*: laid out isometrically in
//! the plane face by face. Development can fail: whenever the faces around
//! an interior vertex stay connected through a full fan of uncut edges, the
//! layout closes up only if that vertex is flat. A piece that fails to close
//! is reported, not silently truncated, via [`UnfoldError::NonDevelopablePiece`].
//!
//! [`classify_cuts_in_disk`] sorts disk cut sets into the trichotomy that
//! drives the single-piece analysis: a cycle of cuts or a cut path between
//! two boundary vertices each force a second piece, while a forest touching
//! the boundary at most once per component keeps the disk in one piece.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::mesh::{EdgeId, FaceId, MeshTopology, SurfaceMesh, UnionFind, VertexId};
use crate::predicates::Point2;

/// Both copies of an uncut edge must land within this distance when a piece
/// is developed; otherwise the piece is not flat.
pub const COINCIDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum UnfoldError {
    #[error("invalid cut: {detail}")]
    InvalidCut { detail: String },
    #[error(
        "piece rooted at face {root} does not develop flat: \
         edge {edge} reassembles with mismatch {mismatch:.3e}"
    )]
    NonDevelopablePiece {
        root: FaceId,
        edge: EdgeId,
        mismatch: f64,
    },
    #[error("not a hat-shaped disk: {detail}")]
    CurvatureSignatureMismatch { detail: String },
}

/// A set of interior edges to cut, validated against the mesh it was built
/// for. Boundary edges are rejected: they are already open.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct CutSet {
    edges: BTreeSet<EdgeId>,
}

impl CutSet {
    pub fn empty() -> Self {
        CutSet::default()
    }

    pub fn from_edges(
        mesh: &SurfaceMesh,
        edges: impl IntoIterator<Item = EdgeId>,
    ) -> Result<Self, UnfoldError> {
        let mut set = BTreeSet::new();
        for e in edges {
            if e.idx() >= mesh.edge_count() {
                return Err(UnfoldError::InvalidCut {
                    detail: format!("edge {e} is out of range"),
                });
            }
            if mesh.edge(e).is_boundary() {
                return Err(UnfoldError::InvalidCut {
                    detail: format!("edge {e} lies on the boundary"),
                });
            }
            set.insert(e);
        }
        Ok(CutSet { edges: set })
    }

    pub fn from_vertex_pairs(
        mesh: &SurfaceMesh,
        pairs: impl IntoIterator<Item = (VertexId, VertexId)>,
    ) -> Result<Self, UnfoldError> {
        let mut ids = Vec::new();
        for (u, v) in pairs {
            let Some(e) = mesh.edge_between(u, v) else {
                return Err(UnfoldError::InvalidCut {
                    detail: format!("no edge joins {u} and {v}"),
                });
            };
            ids.push(e);
        }
        CutSet::from_edges(mesh, ids)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edges.contains(&e)
    }

    /// All endpoints of the cut edges.
    pub fn vertices(&self, mesh: &SurfaceMesh) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for &e in &self.edges {
            let (u, v) = mesh.edge(e).vertices;
            out.insert(u);
            out.insert(v);
        }
        out
    }
}

/// Face groups connected through uncut interior edges, each sorted by id,
/// groups ordered by their smallest face.
pub fn pieces_of(mesh: &SurfaceMesh, cuts: &CutSet) -> Vec<Vec<FaceId>> {
    let mut uf = UnionFind::new(mesh.face_count());
    for e in mesh.interior_edge_ids() {
        if cuts.contains(e) {
            continue;
        }
        let (f, g) = mesh.edge(e).faces;
        uf.union(f.idx(), g.expect("interior edge").idx());
    }
    let mut groups: BTreeMap<usize, Vec<FaceId>> = BTreeMap::new();
    for f in mesh.faces() {
        groups.entry(uf.find(f.idx())).or_default().push(f);
    }
    let mut out: Vec<Vec<FaceId>> = groups.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// One developed piece: each face with the planar positions of its three
/// corners, in face-vertex order. Faces are listed by ascending id. A vertex
/// shared by several faces may appear at several positions if the cuts pass
/// through it.
#[derive(Debug, Clone)]
pub struct Piece {
    placed: Vec<(FaceId, [Point2; 3])>,
}

impl Piece {
    pub fn placed(&self) -> &[(FaceId, [Point2; 3])] {
        &self.placed
    }

    pub fn face_count(&self) -> usize {
        self.placed.len()
    }

    pub fn face_ids(&self) -> impl Iterator<Item = FaceId> + '_ {
        self.placed.iter().map(|&(f, _)| f)
    }

    /// The planar position of `v` as seen from `face`, if the piece
    /// contains that face and the face contains that vertex.
    pub fn corner(&self, mesh: &SurfaceMesh, face: FaceId, v: VertexId) -> Option<Point2> {
        let &(_, ps) = self.placed.iter().find(|&&(f, _)| f == face)?;
        let k = mesh.face(face).iter().position(|&w| w == v)?;
        Some(ps[k])
    }

    /// Axis-aligned bounding box (min corner, max corner).
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for (_, ps) in &self.placed {
            for p in ps {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
        }
        (min, max)
    }
}

/// A full development: one [`Piece`] per face group, ordered by the group's
/// smallest face id.
#[derive(Debug, Clone)]
pub struct Development {
    pieces: Vec<Piece>,
}

impl Development {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn total_face_count(&self) -> usize {
        self.pieces.iter().map(Piece::face_count).sum()
    }
}

/// Lays every piece of the cut surface out in the plane.
///
/// Within a piece, faces are placed breadth-first from the piece's smallest
/// face: the root's lowest-numbered edge goes along +x in the direction the
/// root traverses it, and every further face is glued across a shared uncut
/// edge, preserving orientation. Uncut edges closing a cycle in the gluing
/// graph are then checked for coincidence within [`COINCIDENCE_TOL`].
pub fn develop(mesh: &SurfaceMesh, cuts: &CutSet) -> Result<Development, UnfoldError> {
    for e in cuts.edges() {
        if e.idx() >= mesh.edge_count() {
            return Err(UnfoldError::InvalidCut {
                detail: format!("edge {e} is out of range"),
            });
        }
    }
    let mut pieces = Vec::new();
    for group in pieces_of(mesh, cuts) {
        pieces.push(develop_piece(mesh, cuts, &group)?);
    }
    Ok(Development { pieces })
}

fn develop_piece(
    mesh: &SurfaceMesh,
    cuts: &CutSet,
    group: &[FaceId],
) -> Result<Piece, UnfoldError> {
    let root = group[0];
    let mut placed: BTreeMap<FaceId, [Point2; 3]> = BTreeMap::new();
    placed.insert(root, place_root(mesh, root));

    let mut queue = VecDeque::from([root]);
    while let Some(f) = queue.pop_front() {
        let f_pos = placed[&f];
        for e in mesh.face_edge_ids(f) {
            let edge = mesh.edge(e);
            if edge.is_boundary() || cuts.contains(e) {
                continue;
            }
            let g = edge.other_face(f).expect("interior edge");
            if let Some(g_pos) = placed.get(&g) {
                // Cycle in the gluing graph: both faces have placed this
                // edge independently; a flat piece makes them coincide.
                let mismatch = edge_mismatch(mesh, f, &f_pos, g, g_pos, edge.vertices);
                if mismatch > COINCIDENCE_TOL {
                    return Err(UnfoldError::NonDevelopablePiece {
                        root,
                        edge: e,
                        mismatch,
                    });
                }
            } else {
                let g_pos = place_across(mesh, &f_pos, f, g, edge.vertices);
                placed.insert(g, g_pos);
                queue.push_back(g);
            }
        }
    }
    Ok(Piece {
        placed: placed.into_iter().collect(),
    })
}

/// Places `face` with its lowest-numbered edge along +x, in the direction
/// the face traverses it, so the face winds counterclockwise.
fn place_root(mesh: &SurfaceMesh, face: FaceId) -> [Point2; 3] {
    let edges = mesh.face_edge_ids(face);
    let k = (0..3).min_by_key(|&i| edges[i]).expect("three edges");
    let vs = mesh.face(face);
    let (t, h, w) = (vs[k], vs[(k + 1) % 3], vs[(k + 2) % 3]);
    let d = mesh.position(t).distance(mesh.position(h));
    let a = mesh.position(t).distance(mesh.position(w));
    let b = mesh.position(h).distance(mesh.position(w));
    let qt = Point2::new(0.0, 0.0);
    let qh = Point2::new(d, 0.0);
    let qw = third_corner(qt, qh, a, b);
    let mut out = [Point2::new(0.0, 0.0); 3];
    out[k] = qt;
    out[(k + 1) % 3] = qh;
    out[(k + 2) % 3] = qw;
    out
}

/// Given `f` already placed, places the face `g` sharing the uncut edge
/// `(u, v)` with it, gluing the shared edge and keeping `g` counterclockwise.
fn place_across(
    mesh: &SurfaceMesh,
    f_pos: &[Point2; 3],
    f: FaceId,
    g: FaceId,
    (u, v): (VertexId, VertexId),
) -> [Point2; 3] {
    // Find how g traverses the shared edge; the consistent orientation of
    // the mesh guarantees it is opposite to f's traversal.
    let gv = mesh.face(g);
    let k = (0..3)
        .find(|&i| {
            (gv[i] == u && gv[(i + 1) % 3] == v) || (gv[i] == v && gv[(i + 1) % 3] == u)
        })
        .expect("shared edge");
    let (t, h, w) = (gv[k], gv[(k + 1) % 3], gv[(k + 2) % 3]);
    let qt = corner_of(mesh, f, f_pos, t);
    let qh = corner_of(mesh, f, f_pos, h);
    let a = mesh.position(t).distance(mesh.position(w));
    let b = mesh.position(h).distance(mesh.position(w));
    let qw = third_corner(qt, qh, a, b);
    let mut out = [Point2::new(0.0, 0.0); 3];
    out[k] = qt;
    out[(k + 1) % 3] = qh;
    out[(k + 2) % 3] = qw;
    out
}

fn corner_of(mesh: &SurfaceMesh, f: FaceId, f_pos: &[Point2; 3], v: VertexId) -> Point2 {
    let k = mesh
        .face(f)
        .iter()
        .position(|&w| w == v)
        .expect("vertex of face");
    f_pos[k]
}

/// Completes a triangle over the directed base `t → h` with side lengths
/// `a = |tw|`, `b = |hw|`, putting the third corner on the left so the
/// triangle (t, h, w) winds counterclockwise.
fn third_corner(t: Point2, h: Point2, a: f64, b: f64) -> Point2 {
    let d = t.distance(h);
    let x = (d * d + a * a - b * b) / (2.0 * d);
    let ysq = a * a - x * x;
    let y = ysq.max(0.0).sqrt();
    let ex = Point2::new((h.x - t.x) / d, (h.y - t.y) / d);
    let ey = Point2::new(-ex.y, ex.x);
    Point2::new(t.x + ex.x * x + ey.x * y, t.y + ex.y * x + ey.y * y)
}

fn edge_mismatch(
    mesh: &SurfaceMesh,
    f: FaceId,
    f_pos: &[Point2; 3],
    g: FaceId,
    g_pos: &[Point2; 3],
    (u, v): (VertexId, VertexId),
) -> f64 {
    let du = corner_of(mesh, f, f_pos, u).distance(corner_of(mesh, g, g_pos, u));
    let dv = corner_of(mesh, f, f_pos, v).distance(corner_of(mesh, g, g_pos, v));
    du.max(dv)
}

// ---------------------------------------------------------------------------
// Cut-set trichotomy on disks
// ---------------------------------------------------------------------------

/// What a disk cut set looks like, with a witness for the separating cases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CutClass {
    /// The cuts contain a cycle; consecutive witness vertices (cyclically)
    /// are joined by cut edges. The enclosed faces separate.
    Cycle { vertices: Vec<VertexId> },
    /// The cuts join two distinct boundary vertices; the witness path runs
    /// from one to the other through cut edges. The disk splits along it.
    BoundaryPath { vertices: Vec<VertexId> },
    /// A forest, each component holding at most one boundary vertex: the
    /// disk stays in one piece.
    Forest { components: usize },
}

/// Classifies a cut set on a disk into [`CutClass`].
pub fn classify_cuts_in_disk(
    mesh: &SurfaceMesh,
    cuts: &CutSet,
) -> Result<CutClass, UnfoldError> {
    if mesh.topology() != MeshTopology::Disk {
        return Err(UnfoldError::InvalidCut {
            detail: "cut classification applies to disks".into(),
        });
    }
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    let mut uf = UnionFind::new(mesh.vertex_count());
    for e in cuts.edges() {
        let (u, v) = mesh.edge(e).vertices;
        if uf.find(u.idx()) == uf.find(v.idx()) {
            // Adding (u, v) closes a cycle: the path u … v through the
            // edges added so far, plus (v, u) itself closing it up.
            let path = cut_graph_path(&adjacency, u, v).expect("same component");
            return Ok(CutClass::Cycle { vertices: path });
        }
        uf.union(u.idx(), v.idx());
        adjacency.entry(u).or_default().push(v);
        adjacency.entry(v).or_default().push(u);
    }

    // Forest. Look for a component with two boundary vertices.
    let mut boundary_rep: BTreeMap<usize, VertexId> = BTreeMap::new();
    for (&v, _) in &adjacency {
        if !mesh.is_boundary_vertex(v) {
            continue;
        }
        let root = uf.find(v.idx());
        if let Some(&first) = boundary_rep.get(&root) {
            let path = cut_graph_path(&adjacency, first, v).expect("same component");
            return Ok(CutClass::BoundaryPath { vertices: path });
        }
        boundary_rep.insert(root, v);
    }
    let components: BTreeSet<usize> = adjacency.keys().map(|v| uf.find(v.idx())).collect();
    Ok(CutClass::Forest {
        components: components.len(),
    })
}

/// BFS path between two vertices through the cut-edge adjacency.
fn cut_graph_path(
    adjacency: &BTreeMap<VertexId, Vec<VertexId>>,
    from: VertexId,
    to: VertexId,
) -> Option<Vec<VertexId>> {
    let mut parent: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    parent.insert(from, from);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[&cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in adjacency.get(&v).into_iter().flatten() {
            parent.entry(w).or_insert_with(|| {
                queue.push_back(w);
                v
            });
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Hat signature and the boundary-to-center path filter
// ---------------------------------------------------------------------------

/// The curvature fingerprint shared by all hats: a disk whose interior has
/// exactly three negatively curved vertices and one positively curved one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatSignature {
    pub shoulders: [VertexId; 3],
    pub center: VertexId,
}

/// Reads the hat signature off a disk, or explains why it does not fit.
pub fn hat_signature(mesh: &SurfaceMesh) -> Result<HatSignature, UnfoldError> {
    let fail = |detail: String| UnfoldError::CurvatureSignatureMismatch { detail };
    if mesh.topology() != MeshTopology::Disk {
        return Err(fail("not a disk".into()));
    }
    let report = mesh.curvature_report();
    let negative = report.negative_vertices();
    let positive = report.positive_vertices();
    if negative.len() != 3 {
        return Err(fail(format!(
            "expected 3 negatively curved interior vertices, found {}",
            negative.len()
        )));
    }
    if positive.len() != 1 {
        return Err(fail(format!(
            "expected 1 positively curved interior vertex, found {}",
            positive.len()
        )));
    }
    if negative.len() + positive.len() != mesh.interior_vertices().count() {
        return Err(fail("interior has flat vertices".into()));
    }
    Ok(HatSignature {
        shoulders: [negative[0], negative[1], negative[2]],
        center: positive[0],
    })
}

/// Tests whether `cuts` is a simple path that starts at a single boundary
/// vertex, threads through all three shoulders, and ends at the center —
/// the only cut shape that can possibly develop a hat in one piece.
pub fn center_path_filter(mesh: &SurfaceMesh, sig: &HatSignature, cuts: &CutSet) -> bool {
    if cuts.is_empty() {
        return false;
    }
    let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut uf = UnionFind::new(mesh.vertex_count());
    for e in cuts.edges() {
        let (u, v) = mesh.edge(e).vertices;
        *degree.entry(u).or_default() += 1;
        *degree.entry(v).or_default() += 1;
        if uf.find(u.idx()) == uf.find(v.idx()) {
            return false; // cycle
        }
        uf.union(u.idx(), v.idx());
    }
    let roots: BTreeSet<usize> = degree.keys().map(|v| uf.find(v.idx())).collect();
    if roots.len() != 1 {
        return false;
    }
    let mut endpoints = Vec::new();
    for (&v, &d) in &degree {
        match d {
            1 => endpoints.push(v),
            2 => {}
            _ => return false,
        }
    }
    if endpoints.len() != 2 {
        return false;
    }
    // One endpoint on the boundary, the other at the center; no other
    // boundary contact.
    let boundary_touched: Vec<VertexId> = degree
        .keys()
        .copied()
        .filter(|&v| mesh.is_boundary_vertex(v))
        .collect();
    if boundary_touched.len() != 1 {
        return false;
    }
    let b = boundary_touched[0];
    if !(endpoints.contains(&b) && endpoints.contains(&sig.center) && b != sig.center) {
        return false;
    }
    sig.shoulders
        .iter()
        .all(|s| degree.get(s).copied() == Some(2))
}

//! The certification layer.
//!
//! Single-piece impossibility is decided by brute force: a single-piece
//! edge unfolding of a disk is the same thing as a development along a
//! spanning tree of its dual graph (faces as nodes, uncut interior edges as
//! arcs), so enumerating every dual spanning tree and certifying an interior
//! overlap in each development proves that no single-piece unfolding exists.
//! The enumeration itself is cross-checked against the Kirchhoff
//! determinant, an independent count.
//!
//! The multi-piece lower bounds for the hat families reduce to counting:
//! every hat forces either a cut cycle inside it or a cut path between two
//! of its corner vertices, and [`min_pieces_of_path_system`] turns a system
//! of such paths into a piece count via union–find over the corner
//! vertices. [`audit_cut_set`] applies the per-hat classification to a
//! user-supplied cut set and checks the verdict against the family bound.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::mesh::{EdgeId, FaceId, HatId, SurfaceMesh, UnionFind, VertexId};
use crate::predicates::{
    placed_overlap_report, Mode, OverlapPair, PredicateError, FLOAT_OVERLAP_AREA,
};
use crate::unfold::{
    center_path_filter, classify_cuts_in_disk, develop, hat_signature, pieces_of, CutClass,
    CutSet, UnfoldError,
};

/// Spanning-tree enumeration refuses disks with more faces than this.
pub const TREE_ENUMERATION_FACE_LIMIT: usize = 16;
/// Automorphism search (brute force over vertex permutations) refuses
/// meshes with more vertices than this.
pub const AUTOMORPHISM_VERTEX_LIMIT: usize = 9;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("mesh too large for exhaustive search: {size} {unit} exceeds the limit of {limit}")]
    TooLarge {
        size: usize,
        unit: &'static str,
        limit: usize,
    },
    #[error("bad parameter: {detail}")]
    BadParameter { detail: String },
    #[error(transparent)]
    Unfold(#[from] UnfoldError),
    #[error(transparent)]
    Predicate(#[from] PredicateError),
    #[error(transparent)]
    Mesh(#[from] crate::mesh::MeshError),
}

// ---------------------------------------------------------------------------
// Dual spanning trees
// ---------------------------------------------------------------------------

/// Dual arcs of the mesh in edge-id order: (face, face, crossing edge).
fn dual_arcs(mesh: &SurfaceMesh) -> Vec<(usize, usize, EdgeId)> {
    mesh.interior_edge_ids()
        .map(|e| {
            let (f, g) = mesh.edge(e).faces;
            (f.idx(), g.expect("interior").idx(), e)
        })
        .collect()
}

/// Every spanning tree of the dual graph, each as the set of mesh edges the
/// development keeps uncut. Deterministic order: branch on arcs by ascending
/// edge id, "arc included" before "arc excluded".
pub fn enumerate_dual_spanning_trees(
    mesh: &SurfaceMesh,
) -> Result<Vec<BTreeSet<EdgeId>>, VerifyError> {
    if mesh.face_count() > TREE_ENUMERATION_FACE_LIMIT {
        return Err(VerifyError::TooLarge {
            size: mesh.face_count(),
            unit: "faces",
            limit: TREE_ENUMERATION_FACE_LIMIT,
        });
    }
    let arcs = dual_arcs(mesh);
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    contract_delete(mesh.face_count(), &arcs, &mut chosen, &mut out);
    Ok(out)
}

/// Contraction–deletion enumeration. `nodes` counts the contracted node
/// classes still distinct; arcs between merged classes are kept (parallel
/// arcs are distinct original edges) and self-loops are dropped.
fn contract_delete(
    nodes: usize,
    arcs: &[(usize, usize, EdgeId)],
    chosen: &mut Vec<EdgeId>,
    out: &mut Vec<BTreeSet<EdgeId>>,
) {
    if nodes == 1 {
        out.push(chosen.iter().copied().collect());
        return;
    }
    let Some((&(u, v, id), rest)) = arcs.split_first() else {
        return; // disconnected remainder: no spanning tree down this branch
    };
    if u == v {
        contract_delete(nodes, rest, chosen, out);
        return;
    }
    // Include the arc: contract v into u.
    let contracted: Vec<(usize, usize, EdgeId)> = rest
        .iter()
        .map(|&(a, b, e)| {
            let a = if a == v { u } else { a };
            let b = if b == v { u } else { b };
            (a, b, e)
        })
        .collect();
    chosen.push(id);
    contract_delete(nodes - 1, &contracted, chosen, out);
    chosen.pop();
    // Exclude the arc — only if the rest still connects everything.
    if still_spans(nodes, rest) {
        contract_delete(nodes, rest, chosen, out);
    }
}

fn still_spans(nodes: usize, arcs: &[(usize, usize, EdgeId)]) -> bool {
    // Nodes were renamed by contraction; collect the live names.
    let mut names: BTreeMap<usize, usize> = BTreeMap::new();
    for &(a, b, _) in arcs {
        let next = names.len();
        names.entry(a).or_insert(next);
        let next = names.len();
        names.entry(b).or_insert(next);
    }
    if names.len() < nodes {
        return false; // an isolated class has no incident arcs left
    }
    let mut uf = UnionFind::new(names.len());
    for &(a, b, _) in arcs {
        uf.union(names[&a], names[&b]);
    }
    uf.component_count() == 1
}

/// Counts dual spanning trees by the Kirchhoff determinant, evaluated with
/// fraction-free (Bareiss) integer elimination — an oracle independent of
/// the enumeration.
pub fn dual_spanning_tree_count(mesh: &SurfaceMesh) -> Result<u128, VerifyError> {
    if mesh.face_count() > TREE_ENUMERATION_FACE_LIMIT {
        return Err(VerifyError::TooLarge {
            size: mesh.face_count(),
            unit: "faces",
            limit: TREE_ENUMERATION_FACE_LIMIT,
        });
    }
    let n = mesh.face_count();
    if n == 1 {
        return Ok(1);
    }
    let mut lap = vec![vec![0i128; n]; n];
    for (u, v, _) in dual_arcs(mesh) {
        lap[u][u] += 1;
        lap[v][v] += 1;
        lap[u][v] -= 1;
        lap[v][u] -= 1;
    }
    // Reduced Laplacian: drop row and column 0.
    let m = n - 1;
    let mut a: Vec<Vec<i128>> = (1..n).map(|i| lap[i][1..].to_vec()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..m - 1 {
        if a[k][k] == 0 {
            let Some(p) = (k + 1..m).find(|&r| a[r][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..m {
            for j in k + 1..m {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok((sign * a[m - 1][m - 1]).unsigned_abs())
}

// ---------------------------------------------------------------------------
// Exhaustive single-piece verification
// ---------------------------------------------------------------------------

/// Size and curvature profile of the verified mesh.
#[derive(Debug, Clone, Serialize)]
pub struct MeshSummary {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_vertices: usize,
    pub negative_interior_vertices: usize,
    pub positive_interior_vertices: usize,
    pub flat_interior_vertices: usize,
}

impl MeshSummary {
    pub fn of(mesh: &SurfaceMesh) -> MeshSummary {
        let report = mesh.curvature_report();
        let flat = mesh.interior_vertices().count()
            - report.negative_vertices().len()
            - report.positive_vertices().len();
        MeshSummary {
            vertices: mesh.vertex_count(),
            edges: mesh.edge_count(),
            faces: mesh.face_count(),
            boundary_vertices: mesh.boundary_vertices().count(),
            negative_interior_vertices: report.negative_vertices().len(),
            positive_interior_vertices: report.positive_vertices().len(),
            flat_interior_vertices: flat,
        }
    }
}

/// A placed face of a witness development.
#[derive(Debug, Clone, Serialize)]
pub struct PlacedFace {
    pub face: FaceId,
    pub corners: [[f64; 2]; 3],
}

/// A dual spanning tree whose development came out overlap-free, refuting
/// "no single-piece unfolding" for this mesh.
#[derive(Debug, Clone, Serialize)]
pub struct TreeWitness {
    pub tree_index: u64,
    pub cut_edges: Vec<EdgeId>,
    pub development: Vec<PlacedFace>,
}

/// Outcome of the exhaustive check of every single-piece development.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub mesh: MeshSummary,
    pub mode: Mode,
    /// Whether the mesh has the hat curvature signature (three negative
    /// interior vertices, one positive). Informational; the enumeration
    /// below is exhaustive either way.
    pub hat_signature: bool,
    pub trees_total: u64,
    pub trees_with_overlap: u64,
    /// Trees whose cut set is a boundary-to-center path.
    pub path_cut_trees: u64,
    /// Smallest, over all trees, of the largest decisive overlap area in
    /// that tree's development; how close the verdict is to failing.
    pub bottleneck_margin: Option<f64>,
    /// Pairs that needed exact rational arithmetic, summed over trees.
    pub escalations: u64,
    /// Overlap classifications too small in area to count, summed over
    /// trees: slivers of development roundoff, not of the surface.
    pub subthreshold_pairs: u64,
    /// True when every overlap decision carried a certificate.
    pub certified: bool,
    pub no_single_piece_unfolding: bool,
    pub counterexample: Option<TreeWitness>,
    #[serde(skip)]
    pub wall_time: Duration,
}

/// Whether a classified overlap pair is attributable to the surface rather
/// than to arithmetic noise. Certificates describe the placed coordinates
/// exactly, but placement itself rounds: faces glued along an edge of the
/// surface can develop to triangles one ulp apart, whose interiors then
/// genuinely intersect in a sliver (observed ≤ 2·10⁻¹⁷ in area). Real
/// overlaps in these constructions are ≥ 10⁻⁴, so the same area gate float
/// mode uses separates the two regimes with ten orders of margin to spare.
pub fn decisive(pair: &OverlapPair, mode: Mode) -> bool {
    let certified = match mode {
        Mode::Interval => pair.certified,
        Mode::Float => true,
    };
    certified && pair.margin > FLOAT_OVERLAP_AREA
}

struct TreeOutcome {
    overlap: bool,
    certified: bool,
    strongest_margin: f64,
    escalations: u64,
    subthreshold_pairs: u64,
    is_path_cut: bool,
}

/// Develops every dual spanning tree of the disk and reports whether each
/// development has a certified interior overlap. The conclusion
/// `no_single_piece_unfolding` is true only if all of them do.
///
/// `jobs` > 1 splits the tree list across that many threads; results are
/// merged in tree order, so the report does not depend on `jobs`.
pub fn verify_hat_no_single_piece(
    mesh: &SurfaceMesh,
    mode: Mode,
    jobs: usize,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let trees = enumerate_dual_spanning_trees(mesh)?;
    let interior: BTreeSet<EdgeId> = mesh.interior_edge_ids().collect();
    let signature = hat_signature(mesh).ok();

    let assess = |tree: &BTreeSet<EdgeId>| -> Result<TreeOutcome, VerifyError> {
        let cuts = CutSet::from_edges(mesh, interior.difference(tree).copied())?;
        let dev = develop(mesh, &cuts)?;
        debug_assert_eq!(dev.piece_count(), 1, "a spanning tree glues one piece");
        let piece = &dev.pieces()[0];
        let report = placed_overlap_report(piece.placed(), mode)?;
        let decisive_pairs: Vec<&OverlapPair> =
            report.pairs.iter().filter(|p| decisive(p, mode)).collect();
        let strongest = decisive_pairs
            .iter()
            .map(|p| p.margin)
            .fold(f64::NEG_INFINITY, f64::max);
        let is_path_cut = signature
            .as_ref()
            .map(|sig| center_path_filter(mesh, sig, &cuts))
            .unwrap_or(false);
        Ok(TreeOutcome {
            overlap: !decisive_pairs.is_empty(),
            certified: report.certified,
            strongest_margin: strongest,
            escalations: report.escalations as u64,
            subthreshold_pairs: (report.pairs.len() - decisive_pairs.len()) as u64,
            is_path_cut,
        })
    };

    let outcomes: Vec<Result<TreeOutcome, VerifyError>> = if jobs <= 1 || trees.len() < 2 {
        trees.iter().map(assess).collect()
    } else {
        let chunk = trees.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = trees
                .chunks(chunk)
                .map(|slice| scope.spawn(|| slice.iter().map(assess).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("verification worker panicked"))
                .collect()
        })
    };

    let mut trees_with_overlap = 0u64;
    let mut path_cut_trees = 0u64;
    let mut escalations = 0u64;
    let mut subthreshold_pairs = 0u64;
    let mut certified = true;
    let mut bottleneck = f64::INFINITY;
    let mut counterexample = None;
    for (i, outcome) in outcomes.into_iter().enumerate() {
        let o = outcome?;
        escalations += o.escalations;
        subthreshold_pairs += o.subthreshold_pairs;
        certified &= o.certified;
        if o.is_path_cut {
            path_cut_trees += 1;
        }
        if o.overlap {
            trees_with_overlap += 1;
            bottleneck = bottleneck.min(o.strongest_margin);
        } else if counterexample.is_none() {
            let cuts = CutSet::from_edges(mesh, interior.difference(&trees[i]).copied())?;
            let dev = develop(mesh, &cuts)?;
            counterexample = Some(TreeWitness {
                tree_index: i as u64,
                cut_edges: cuts.edges().collect(),
                development: dev.pieces()[0]
                    .placed()
                    .iter()
                    .map(|&(face, ps)| PlacedFace {
                        face,
                        corners: ps.map(|p| [p.x, p.y]),
                    })
                    .collect(),
            });
        }
    }
    let trees_total = trees.len() as u64;
    let all_overlap = trees_total > 0 && trees_with_overlap == trees_total;
    Ok(VerificationReport {
        schema_version: 1,
        mesh: MeshSummary::of(mesh),
        mode,
        hat_signature: signature.is_some(),
        trees_total,
        trees_with_overlap,
        path_cut_trees,
        bottleneck_margin: all_overlap.then_some(bottleneck),
        escalations,
        subthreshold_pairs,
        certified,
        no_single_piece_unfolding: all_overlap,
        counterexample,
        wall_time: start.elapsed(),
    })
}

// ---------------------------------------------------------------------------
// Path census
// ---------------------------------------------------------------------------

/// All boundary-to-center cut paths of a hat, grouped by the hat's
/// combinatorial symmetries.
#[derive(Debug, Clone)]
pub struct PathCensus {
    /// Accepted cut sets, sorted.
    pub paths: Vec<CutSet>,
    /// Orbit partition of `paths` under the automorphisms; each class lists
    /// path indices, classes ordered by their smallest index.
    pub classes: Vec<Vec<usize>>,
    /// Order of the combinatorial automorphism group found.
    pub automorphisms: usize,
}

/// Enumerates every cut set accepted by [`center_path_filter`] — the simple
/// paths from one boundary vertex through all three shoulders to the center
/// — by depth-first search, and groups them into symmetry classes.
pub fn enumerate_center_paths(mesh: &SurfaceMesh) -> Result<PathCensus, VerifyError> {
    if mesh.face_count() > TREE_ENUMERATION_FACE_LIMIT {
        return Err(VerifyError::TooLarge {
            size: mesh.face_count(),
            unit: "faces",
            limit: TREE_ENUMERATION_FACE_LIMIT,
        });
    }
    let sig = hat_signature(mesh)?;

    // Vertex adjacency over interior edges (a center path never runs along
    // the rim).
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in mesh.interior_edge_ids() {
        let (u, v) = mesh.edge(e).vertices;
        adjacency.entry(u).or_default().push(v);
        adjacency.entry(v).or_default().push(u);
    }

    let mut paths = Vec::new();
    for b in mesh.boundary_vertices() {
        let mut current = vec![b];
        let mut on_path: BTreeSet<VertexId> = BTreeSet::from([b]);
        dfs_paths(
            mesh,
            &sig,
            &adjacency,
            &mut current,
            &mut on_path,
            &mut paths,
        );
    }
    paths.sort();
    paths.dedup();

    let autos = automorphisms(mesh)?;
    let index: BTreeMap<&CutSet, usize> = paths.iter().zip(0..).collect();
    let mut uf = UnionFind::new(paths.len());
    for perm in &autos {
        for (i, path) in paths.iter().enumerate() {
            let image = CutSet::from_vertex_pairs(
                mesh,
                path.edges().map(|e| {
                    let (u, v) = mesh.edge(e).vertices;
                    (perm[u.idx()], perm[v.idx()])
                }),
            )
            .expect("automorphisms preserve edges");
            let j = index[&image];
            uf.union(i, j);
        }
    }
    let mut grouped: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..paths.len() {
        grouped.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes: Vec<Vec<usize>> = grouped.into_values().collect();
    classes.sort_by_key(|c| c[0]);
    Ok(PathCensus {
        paths,
        classes,
        automorphisms: autos.len(),
    })
}

fn dfs_paths(
    mesh: &SurfaceMesh,
    sig: &crate::unfold::HatSignature,
    adjacency: &BTreeMap<VertexId, Vec<VertexId>>,
    current: &mut Vec<VertexId>,
    on_path: &mut BTreeSet<VertexId>,
    out: &mut Vec<CutSet>,
) {
    let tail = *current.last().expect("nonempty");
    if tail == sig.center {
        let cuts = CutSet::from_vertex_pairs(
            mesh,
            current.windows(2).map(|w| (w[0], w[1])),
        )
        .expect("path edges exist");
        if center_path_filter(mesh, sig, &cuts) {
            out.push(cuts);
        }
        return;
    }
    let Some(nexts) = adjacency.get(&tail) else {
        return;
    };
    let mut sorted = nexts.clone();
    sorted.sort_unstable();
    for w in sorted {
        if on_path.contains(&w) {
            continue;
        }
        current.push(w);
        on_path.insert(w);
        dfs_paths(mesh, sig, adjacency, current, on_path, out);
        current.pop();
        on_path.remove(&w);
    }
}

/// All vertex permutations preserving the face set (as unordered triples),
/// found by brute force. Includes reflections.
pub fn automorphisms(mesh: &SurfaceMesh) -> Result<Vec<Vec<VertexId>>, VerifyError> {
    let n = mesh.vertex_count();
    if n > AUTOMORPHISM_VERTEX_LIMIT {
        return Err(VerifyError::TooLarge {
            size: n,
            unit: "vertices",
            limit: AUTOMORPHISM_VERTEX_LIMIT,
        });
    }
    let face_key = |f: [VertexId; 3]| {
        let mut k = f;
        k.sort_unstable();
        k
    };
    let faces: BTreeSet<[VertexId; 3]> = mesh.faces().map(|f| face_key(mesh.face(f))).collect();
    let mut perm: Vec<VertexId> = (0..n as u32).map(VertexId).collect();
    let mut out = Vec::new();
    permute(&mut perm, 0, &mut |p| {
        let ok = mesh.faces().all(|f| {
            let img = face_key(mesh.face(f).map(|v| p[v.idx()]));
            faces.contains(&img)
        });
        if ok {
            out.push(p.to_vec());
        }
    });
    Ok(out)
}

fn permute(items: &mut [VertexId], k: usize, visit: &mut impl FnMut(&[VertexId])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

// ---------------------------------------------------------------------------
// Counting lower bounds
// ---------------------------------------------------------------------------

/// A system of disjoint cut paths between base vertices, as forced by the
/// hats: one terminal pair per hat path, plus the number of cut cycles
/// closed inside hats.
#[derive(Debug, Clone)]
pub struct PathSystem {
    pub base_vertex_count: usize,
    /// Endpoints (indices into the base vertices) of each hat path.
    pub terminals: Vec<(usize, usize)>,
    /// Cut cycles inside hats; each separates a piece by itself.
    pub cycles: usize,
}

/// Minimum number of pieces the cut system forces. Cutting a path whose
/// endpoints the earlier cuts already connect closes a separating loop;
/// counting those with union–find gives 1 + separations + cycles.
pub fn min_pieces_of_path_system(system: &PathSystem) -> usize {
    let mut uf = UnionFind::new(system.base_vertex_count.max(1));
    let mut separations = 0usize;
    for &(u, v) in &system.terminals {
        if uf.find(u) == uf.find(v) {
            separations += 1;
        } else {
            uf.union(u, v);
        }
    }
    1 + separations + system.cycles
}

/// The two "very ununfoldable" families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Acute hats over the k-subdivided tetrahedron (4k² hats).
    SubdividedCaltrop,
    /// Stacked hats over the k-times point-split tetrahedron (4+2k hats).
    StackedFamily,
}

/// Proven piece lower bound for a family member: any flat non-overlapping
/// edge unfolding needs at least this many pieces.
pub fn piece_lower_bound(family: Family, k: u32) -> Result<u64, VerifyError> {
    match family {
        Family::SubdividedCaltrop => {
            if k == 0 {
                return Err(VerifyError::BadParameter {
                    detail: "subdivision parameter must be at least 1".into(),
                });
            }
            Ok(2 * u64::from(k) * u64::from(k))
        }
        Family::StackedFamily => Ok(u64::from(k) + 2),
    }
}

// ---------------------------------------------------------------------------
// Cut-set audit
// ---------------------------------------------------------------------------

/// Shape of the cuts inside one hat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutClassKind {
    Cycle,
    BoundaryPath,
    Forest,
}

impl From<&CutClass> for CutClassKind {
    fn from(c: &CutClass) -> Self {
        match c {
            CutClass::Cycle { .. } => CutClassKind::Cycle,
            CutClass::BoundaryPath { .. } => CutClassKind::BoundaryPath,
            CutClass::Forest { .. } => CutClassKind::Forest,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HatAudit {
    pub hat: HatId,
    /// Cut edges interior to the hat disk.
    pub interior_cuts: usize,
    /// Cut edges on the hat's rim (shared with neighboring hats).
    pub rim_cuts: usize,
    pub class: CutClassKind,
    /// Whether the interior cuts are exactly a boundary-to-center path.
    pub is_center_path: bool,
}

/// Mechanical audit of an arbitrary cut set on a hat-family mesh.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub piece_count: usize,
    pub hats: Vec<HatAudit>,
    pub develops_flat: bool,
    /// Why development failed, when it did.
    pub failure: Option<String>,
    /// Decisive interior-overlap pairs summed over the developed pieces.
    pub overlap_pairs: usize,
    /// Overlap classifications below the area gate (development slivers).
    pub subthreshold_pairs: usize,
    pub certified: bool,
    /// Flat development with no overlapping pair anywhere.
    pub is_valid_unfolding: bool,
    /// Half the hat count: the families' proven minimum piece count.
    pub lower_bound: usize,
    pub meets_lower_bound: bool,
}

/// Classifies `cuts` hat by hat, develops the pieces, and checks the piece
/// count against the family bound.
pub fn audit_cut_set(
    mesh: &SurfaceMesh,
    cuts: &CutSet,
    mode: Mode,
) -> Result<AuditReport, VerifyError> {
    let mut hats = Vec::new();
    for hat in mesh.hat_ids() {
        let (sub, map) = mesh.region_subcomplex(hat)?;
        let mut interior = Vec::new();
        let mut rim_cuts = 0usize;
        for (sub_e, &parent_e) in map.edges.iter().enumerate() {
            if !cuts.contains(parent_e) {
                continue;
            }
            let sub_id = EdgeId(sub_e as u32);
            if sub.edge(sub_id).is_boundary() {
                rim_cuts += 1;
            } else {
                interior.push(sub_id);
            }
        }
        let sub_cuts = CutSet::from_edges(&sub, interior)?;
        let class = classify_cuts_in_disk(&sub, &sub_cuts)?;
        let is_center_path = hat_signature(&sub)
            .map(|sig| center_path_filter(&sub, &sig, &sub_cuts))
            .unwrap_or(false);
        hats.push(HatAudit {
            hat,
            interior_cuts: sub_cuts.len(),
            rim_cuts,
            class: CutClassKind::from(&class),
            is_center_path,
        });
    }

    let piece_count = pieces_of(mesh, cuts).len();
    let (develops_flat, failure, overlap_pairs, subthreshold_pairs, certified) =
        match develop(mesh, cuts) {
            Ok(dev) => {
                let mut pairs = 0usize;
                let mut slivers = 0usize;
                let mut certified = true;
                for piece in dev.pieces() {
                    let report = placed_overlap_report(piece.placed(), mode)?;
                    let hits = report.pairs.iter().filter(|p| decisive(p, mode)).count();
                    pairs += hits;
                    slivers += report.pairs.len() - hits;
                    certified &= report.certified;
                }
                (true, None, pairs, slivers, certified)
            }
            Err(e @ UnfoldError::NonDevelopablePiece { .. }) => {
                (false, Some(e.to_string()), 0, 0, true)
            }
            Err(e) => return Err(e.into()),
        };

    let lower_bound = (mesh.hat_ids().len() / 2).max(1);
    let is_valid_unfolding = develops_flat && overlap_pairs == 0;
    Ok(AuditReport {
        schema_version: 1,
        piece_count,
        hats,
        develops_flat,
        failure,
        overlap_pairs,
        subthreshold_pairs,
        certified,
        is_valid_unfolding,
        lower_bound,
        meets_lower_bound: piece_count >= lower_bound,
    })
}

// ---------------------------------------------------------------------------
// Randomized search for valid unfoldings
// ---------------------------------------------------------------------------

/// Outcome of a seeded random search over cut sets.
#[derive(Debug, Clone, Serialize)]
pub struct SearchStats {
    pub attempts: u32,
    pub seed: u64,
    /// Every attempt develops flat by construction; how many had no
    /// overlapping pair anywhere.
    pub valid_unfoldings: u32,
    pub min_valid_pieces: Option<usize>,
    pub max_valid_pieces: Option<usize>,
}

/// Random cut sets on a closed mesh: a uniform-ish random spanning tree of
/// the vertices (whose complement always develops flat, in one piece), plus
/// each remaining edge cut with probability `extra_cut_probability` (which
/// splits off more pieces). Valid unfoldings found are counted against the
/// family lower bound by the caller.
pub fn search_valid_unfoldings(
    mesh: &SurfaceMesh,
    attempts: u32,
    extra_cut_probability: f64,
    seed: u64,
    mode: Mode,
) -> Result<SearchStats, VerifyError> {
    if mesh.topology() != crate::mesh::MeshTopology::ClosedSphere {
        return Err(VerifyError::BadParameter {
            detail: "random search needs a closed mesh".into(),
        });
    }
    if !(0.0..=1.0).contains(&extra_cut_probability) {
        return Err(VerifyError::BadParameter {
            detail: format!("probability {extra_cut_probability} out of range"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_edges: Vec<EdgeId> = mesh.edge_ids().collect();
    let mut valid = 0u32;
    let mut min_pieces: Option<usize> = None;
    let mut max_pieces: Option<usize> = None;
    for _ in 0..attempts {
        let mut order = all_edges.clone();
        order.shuffle(&mut rng);
        let mut uf = UnionFind::new(mesh.vertex_count());
        let mut chosen = Vec::new();
        for &e in &order {
            let (u, v) = mesh.edge(e).vertices;
            if uf.find(u.idx()) != uf.find(v.idx()) {
                uf.union(u.idx(), v.idx());
                chosen.push(e);
            } else if rand::Rng::gen_bool(&mut rng, extra_cut_probability) {
                chosen.push(e);
            }
        }
        let cuts = CutSet::from_edges(mesh, chosen)?;
        let dev = develop(mesh, &cuts)?;
        let mut overlapping = false;
        for piece in dev.pieces() {
            let report = placed_overlap_report(piece.placed(), mode)?;
            if report.pairs.iter().any(|p| decisive(p, mode)) {
                overlapping = true;
                break;
            }
        }
        if !overlapping {
            valid += 1;
            let n = dev.piece_count();
            min_pieces = Some(min_pieces.map_or(n, |m| m.min(n)));
            max_pieces = Some(max_pieces.map_or(n, |m| m.max(n)));
        }
    }
    Ok(SearchStats {
        attempts,
        seed,
        valid_unfoldings: valid,
        min_valid_pieces: min_pieces,
        max_valid_pieces: max_pieces,
    })
}

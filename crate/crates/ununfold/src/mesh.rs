//! Triangulated surface meshes with labeled regions.
//!
//! A [`SurfaceMesh`] is an immutable, validated triangle mesh: connected,
//! manifold, consistently oriented, either a closed sphere or a disk with a
//! single boundary cycle. Validation happens once in [`SurfaceMesh::build`];
//! everything downstream (unfolding, verification) relies on it.
//!
//! Curvature is discrete: the deficit `360° − (angle sum)` at each interior
//! vertex. Negative deficit (angle sum above 360°) marks a saddle vertex;
//! these are what force cuts through them when unfolding.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Faces smaller than this (absolute area) are rejected as degenerate.
pub const AREA_EPS: f64 = 1e-10;
/// Absolute tolerance (degrees) when classifying angle deficits by sign.
pub const ANGLE_TOL_DEG: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn distance(self, other: Point3) -> f64 {
        (other - self).norm()
    }
}

impl Vec3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(self) -> Vec3 {
        let n = self.norm();
        Vec3::new(self.x / n, self.y / n, self.z / n)
    }
}

impl Sub for Point3 {
    type Output = Vec3;
    fn sub(self, o: Point3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Add<Vec3> for Point3 {
    type Output = Point3;
    fn add(self, v: Vec3) -> Point3 {
        Point3::new(self.x + v.x, self.y + v.y, self.z + v.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

macro_rules! id_type {
    ($name:ident) => {
        #[derive(
            Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
        )]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            pub fn idx(self) -> usize {
                self.0 as usize
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0)
            }
        }
    };
}

id_type!(VertexId);
id_type!(FaceId);
id_type!(EdgeId);
id_type!(HatId);

/// Coarse role of a face within the construction it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionLabel {
    /// Outer ring of a hat: triangles incident to the hat boundary edges.
    Brim,
    /// Middle ring of a hat, between brim and crown.
    Band,
    /// Inner ring of a hat: triangles incident to the hat's center vertex.
    Crown,
    /// Face of an underlying polyhedron not replaced by a hat.
    Base,
    Other,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RegionLabel::Brim => "brim",
            RegionLabel::Band => "band",
            RegionLabel::Crown => "crown",
            RegionLabel::Base => "base",
            RegionLabel::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceLabel {
    pub region: RegionLabel,
    /// Which hat the face belongs to, if any; hats are numbered per mesh.
    pub hat: Option<HatId>,
}

impl FaceLabel {
    pub fn other() -> Self {
        FaceLabel {
            region: RegionLabel::Other,
            hat: None,
        }
    }

    pub fn base() -> Self {
        FaceLabel {
            region: RegionLabel::Base,
            hat: None,
        }
    }

    pub fn hat(region: RegionLabel, hat: HatId) -> Self {
        FaceLabel {
            region,
            hat: Some(hat),
        }
    }
}

/// Undirected edge; `faces.1` is `None` exactly for boundary edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    /// Endpoints with `vertices.0 < vertices.1`.
    pub vertices: (VertexId, VertexId),
    /// Incident faces, smaller id first.
    pub faces: (FaceId, Option<FaceId>),
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.faces.1.is_none()
    }

    pub fn other_face(&self, f: FaceId) -> Option<FaceId> {
        if self.faces.0 == f {
            self.faces.1
        } else {
            Some(self.faces.0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshTopology {
    /// Closed orientable genus-0 surface: no boundary, Euler characteristic 2.
    ClosedSphere,
    /// One boundary cycle, Euler characteristic 1.
    Disk,
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("face {face} references vertex {vertex} but the mesh has {vertex_count} vertices")]
    VertexOutOfRange {
        face: usize,
        vertex: u32,
        vertex_count: usize,
    },
    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: VertexId },
    #[error("face {face} is degenerate (area {area:.3e} < {AREA_EPS:.0e})")]
    DegenerateFace { face: usize, area: f64 },
    #[error("edge ({u}, {v}) borders {count} faces; a manifold edge borders at most 2")]
    NonManifoldEdge { u: VertexId, v: VertexId, count: usize },
    #[error("faces {f} and {g} traverse edge ({u}, {v}) in the same direction; windings are inconsistent")]
    InconsistentOrientation {
        u: VertexId,
        v: VertexId,
        f: FaceId,
        g: FaceId,
    },
    #[error("vertex {vertex} belongs to no face")]
    IsolatedVertex { vertex: VertexId },
    #[error("mesh has {components} connected components; expected 1")]
    Disconnected { components: usize },
    #[error(
        "Euler characteristic {euler} with {boundary_cycles} boundary cycle(s) is neither a \
         closed sphere (2, 0) nor a disk (1, 1)"
    )]
    BadEulerCharacteristic {
        euler: i64,
        boundary_cycles: usize,
    },
    #[error("{count} faces labeled for hat {hat} do not form a disk")]
    NotADisk { hat: HatId, count: usize },
    #[error("no face carries hat label {hat}")]
    NoSuchRegion { hat: HatId },
    #[error("label list has {labels} entries for {faces} faces")]
    LabelCountMismatch { labels: usize, faces: usize },
}

/// Validated triangulated surface. Immutable once built.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    positions: Vec<Point3>,
    faces: Vec<[VertexId; 3]>,
    labels: Vec<FaceLabel>,
    edges: Vec<Edge>,
    /// Map (min vertex, max vertex) -> edge id, for `edge_between`.
    edge_lookup: BTreeMap<(VertexId, VertexId), EdgeId>,
    /// Per-face edge ids, `face_edges[f][i]` is the edge from corner i to corner i+1.
    face_edges: Vec<[EdgeId; 3]>,
    boundary_vertex: Vec<bool>,
    topology: MeshTopology,
}

impl SurfaceMesh {
    /// Validates and indexes a triangle soup.
    ///
    /// `labels` may be `None` (every face becomes [`RegionLabel::Other`]) or
    /// must have one entry per face.
    pub fn build(
        positions: Vec<Point3>,
        faces: Vec<[u32; 3]>,
        labels: Option<Vec<FaceLabel>>,
    ) -> Result<Self, MeshError> {
        let nv = positions.len();
        let labels = match labels {
            Some(l) => {
                if l.len() != faces.len() {
                    return Err(MeshError::LabelCountMismatch {
                        labels: l.len(),
                        faces: faces.len(),
                    });
                }
                l
            }
            None => vec![FaceLabel::other(); faces.len()],
        };

        let mut typed_faces = Vec::with_capacity(faces.len());
        for (i, raw) in faces.iter().enumerate() {
            for &v in raw {
                if v as usize >= nv {
                    return Err(MeshError::VertexOutOfRange {
                        face: i,
                        vertex: v,
                        vertex_count: nv,
                    });
                }
            }
            let [a, b, c] = *raw;
            if a == b || b == c || a == c {
                return Err(MeshError::RepeatedVertex {
                    face: i,
                    vertex: VertexId(if a == b || a == c { a } else { b }),
                });
            }
            let tri = [VertexId(a), VertexId(b), VertexId(c)];
            let area = triangle_area(
                positions[tri[0].idx()],
                positions[tri[1].idx()],
                positions[tri[2].idx()],
            );
            if !(area >= AREA_EPS) {
                return Err(MeshError::DegenerateFace { face: i, area });
            }
            typed_faces.push(tri);
        }

        // Undirected incidence; more than two faces on an edge is non-manifold,
        // two faces traversing it the same way is an orientation clash.
        let mut incident: BTreeMap<(VertexId, VertexId), Vec<(FaceId, bool)>> = BTreeMap::new();
        for (i, tri) in typed_faces.iter().enumerate() {
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                // `forward` records whether the face traverses min -> max.
                incident
                    .entry(key)
                    .or_default()
                    .push((FaceId(i as u32), a < b));
            }
        }
        for (&(u, v), inc) in &incident {
            if inc.len() > 2 {
                return Err(MeshError::NonManifoldEdge {
                    u,
                    v,
                    count: inc.len(),
                });
            }
            if inc.len() == 2 && inc[0].1 == inc[1].1 {
                return Err(MeshError::InconsistentOrientation {
                    u,
                    v,
                    f: inc[0].0,
                    g: inc[1].0,
                });
            }
        }

        // Edge ids in sorted endpoint order: deterministic for a given face list.
        let mut edges = Vec::with_capacity(incident.len());
        let mut edge_lookup = BTreeMap::new();
        for (&(u, v), inc) in &incident {
            let id = EdgeId(edges.len() as u32);
            let faces = match inc.as_slice() {
                [(f, _)] => (*f, None),
                [(f, _), (g, _)] => (*f.min(g), Some(*f.max(g))),
                _ => unreachable!(),
            };
            edges.push(Edge {
                vertices: (u, v),
                faces,
            });
            edge_lookup.insert((u, v), id);
        }

        let mut face_edges = Vec::with_capacity(typed_faces.len());
        for tri in &typed_faces {
            let mut ids = [EdgeId(0); 3];
            for k in 0..3 {
                let a = tri[k];
                let b = tri[(k + 1) % 3];
                ids[k] = edge_lookup[&(a.min(b), a.max(b))];
            }
            face_edges.push(ids);
        }

        let mut used = vec![false; nv];
        for tri in &typed_faces {
            for v in tri {
                used[v.idx()] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(MeshError::IsolatedVertex {
                vertex: VertexId(v as u32),
            });
        }

        // Face connectivity through shared edges.
        if !typed_faces.is_empty() {
            let mut uf = UnionFind::new(typed_faces.len());
            for e in &edges {
                if let (f, Some(g)) = e.faces {
                    uf.union(f.idx(), g.idx());
                }
            }
            let components = uf.component_count();
            if components != 1 {
                return Err(MeshError::Disconnected { components });
            }
        }

        let mut boundary_vertex = vec![false; nv];
        let mut boundary_degree = vec![0usize; nv];
        let mut boundary_edge_count = 0usize;
        for e in &edges {
            if e.is_boundary() {
                boundary_edge_count += 1;
                for v in [e.vertices.0, e.vertices.1] {
                    boundary_vertex[v.idx()] = true;
                    boundary_degree[v.idx()] += 1;
                }
            }
        }

        // Pinched vertices (two fans meeting at a point) need no separate
        // check: splitting a pinch never changes face-through-edge
        // connectivity but raises the Euler characteristic by one per extra
        // fan, and a connected orientable surface tops out at χ = 2 (closed)
        // or χ = 1 (with boundary). So a connected mesh that passes the gate
        // below has genuine manifold vertices.
        let boundary_cycles = count_boundary_cycles(&edges, nv);
        let euler = nv as i64 - edges.len() as i64 + typed_faces.len() as i64;
        let topology = match (boundary_edge_count, euler, boundary_cycles) {
            (0, 2, 0) => MeshTopology::ClosedSphere,
            (n, 1, 1) if n > 0 => MeshTopology::Disk,
            _ => {
                return Err(MeshError::BadEulerCharacteristic {
                    euler,
                    boundary_cycles,
                })
            }
        };

        Ok(SurfaceMesh {
            positions,
            faces: typed_faces,
            labels,
            edges,
            edge_lookup,
            face_edges,
            boundary_vertex,
            topology,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn topology(&self) -> MeshTopology {
        self.topology
    }

    pub fn position(&self, v: VertexId) -> Point3 {
        self.positions[v.idx()]
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn face(&self, f: FaceId) -> [VertexId; 3] {
        self.faces[f.idx()]
    }

    pub fn faces(&self) -> impl Iterator<Item = FaceId> + '_ {
        (0..self.faces.len()).map(|i| FaceId(i as u32))
    }

    pub fn label(&self, f: FaceId) -> FaceLabel {
        self.labels[f.idx()]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.idx()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(|i| EdgeId(i as u32))
    }

    pub fn interior_edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_ids().filter(|&e| !self.edges[e.idx()].is_boundary())
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.edge_lookup.get(&(u.min(v), u.max(v))).copied()
    }

    /// Edge ids of face `f`; entry `i` joins corners `i` and `i + 1`.
    pub fn face_edge_ids(&self, f: FaceId) -> [EdgeId; 3] {
        self.face_edges[f.idx()]
    }

    pub fn edge_length(&self, e: EdgeId) -> f64 {
        let (u, v) = self.edges[e.idx()].vertices;
        self.position(u).distance(self.position(v))
    }

    pub fn face_area(&self, f: FaceId) -> f64 {
        let [a, b, c] = self.face(f);
        triangle_area(self.position(a), self.position(b), self.position(c))
    }

    /// Unit normal of face `f` under its winding (counterclockwise seen from
    /// the side the normal points into).
    pub fn face_normal(&self, f: FaceId) -> Vec3 {
        let [a, b, c] = self.face(f);
        let n = (self.position(b) - self.position(a)).cross(self.position(c) - self.position(a));
        n.normalized()
    }

    pub fn is_boundary_vertex(&self, v: VertexId) -> bool {
        self.boundary_vertex[v.idx()]
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.positions.len())
            .map(|i| VertexId(i as u32))
            .filter(|&v| self.boundary_vertex[v.idx()])
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.positions.len())
            .map(|i| VertexId(i as u32))
            .filter(|&v| !self.boundary_vertex[v.idx()])
    }

    /// Boundary vertices of a disk in cycle order, starting from the
    /// smallest id and following the direction the boundary faces wind.
    /// Empty for a closed mesh.
    pub fn boundary_cycle(&self) -> Vec<VertexId> {
        let mut next: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        for e in self.edges.iter().filter(|e| e.is_boundary()) {
            let f = e.faces.0;
            let tri = self.face(f);
            for k in 0..3 {
                let (u, v) = (tri[k], tri[(k + 1) % 3]);
                if (u.min(v), u.max(v)) == e.vertices {
                    next.insert(u, v);
                }
            }
        }
        let Some((&start, _)) = next.first_key_value() else {
            return Vec::new();
        };
        let mut cycle = vec![start];
        let mut at = next[&start];
        while at != start {
            cycle.push(at);
            at = next[&at];
        }
        cycle
    }

    /// Interior angle (degrees) of face `f` at its corner `v`.
    pub fn face_angle_at(&self, f: FaceId, v: VertexId) -> f64 {
        let tri = self.face(f);
        let k = tri
            .iter()
            .position(|&w| w == v)
            .expect("vertex must belong to the face");
        let p = self.position(tri[k]);
        let u = self.position(tri[(k + 1) % 3]) - p;
        let w = self.position(tri[(k + 2) % 3]) - p;
        u.cross(w).norm().atan2(u.dot(w)).to_degrees()
    }

    /// Angle sums and deficits at every vertex.
    pub fn curvature_report(&self) -> CurvatureReport {
        let mut angle_sum = vec![0.0f64; self.positions.len()];
        for f in self.faces() {
            for v in self.face(f) {
                angle_sum[v.idx()] += self.face_angle_at(f, v);
            }
        }
        let entries = angle_sum
            .iter()
            .enumerate()
            .map(|(i, &sum)| {
                let v = VertexId(i as u32);
                let boundary = self.boundary_vertex[i];
                VertexCurvature {
                    vertex: v,
                    boundary,
                    angle_sum_deg: sum,
                    deficit_deg: if boundary { None } else { Some(360.0 - sum) },
                }
            })
            .collect();
        CurvatureReport { entries }
    }

    /// Distinct hat ids present in the labels, ascending.
    pub fn hat_ids(&self) -> Vec<HatId> {
        let mut ids: Vec<HatId> = self.labels.iter().filter_map(|l| l.hat).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Extracts the faces labeled for `hat` as a standalone disk, together
    /// with the id mapping back into `self`.
    pub fn region_subcomplex(&self, hat: HatId) -> Result<(SurfaceMesh, SubmeshMap), MeshError> {
        let face_ids: Vec<FaceId> = self
            .faces()
            .filter(|&f| self.labels[f.idx()].hat == Some(hat))
            .collect();
        if face_ids.is_empty() {
            return Err(MeshError::NoSuchRegion { hat });
        }

        let mut vertex_ids: Vec<VertexId> = face_ids
            .iter()
            .flat_map(|&f| self.face(f))
            .collect();
        vertex_ids.sort_unstable();
        vertex_ids.dedup();
        let to_sub: BTreeMap<VertexId, u32> = vertex_ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();

        let positions = vertex_ids.iter().map(|&v| self.position(v)).collect();
        let faces: Vec<[u32; 3]> = face_ids
            .iter()
            .map(|&f| self.face(f).map(|v| to_sub[&v]))
            .collect();
        let labels: Vec<FaceLabel> = face_ids.iter().map(|&f| self.label(f)).collect();

        let sub = SurfaceMesh::build(positions, faces.clone(), Some(labels)).map_err(|_| {
            MeshError::NotADisk {
                hat,
                count: face_ids.len(),
            }
        })?;
        if sub.topology() != MeshTopology::Disk {
            return Err(MeshError::NotADisk {
                hat,
                count: face_ids.len(),
            });
        }

        let edges = sub
            .edges()
            .iter()
            .map(|e| {
                let u = vertex_ids[e.vertices.0.idx()];
                let v = vertex_ids[e.vertices.1.idx()];
                self.edge_between(u, v)
                    .expect("submesh edge exists in parent")
            })
            .collect();
        Ok((
            sub,
            SubmeshMap {
                vertices: vertex_ids,
                faces: face_ids,
                edges,
            },
        ))
    }
}

/// Id maps from a subcomplex back to its parent mesh: `vertices[i]` is the
/// parent id of submesh vertex `i`, and likewise for faces and edges.
#[derive(Debug, Clone)]
pub struct SubmeshMap {
    pub vertices: Vec<VertexId>,
    pub faces: Vec<FaceId>,
    pub edges: Vec<EdgeId>,
}

impl SubmeshMap {
    pub fn sub_vertex(&self, parent: VertexId) -> Option<VertexId> {
        self.vertices
            .binary_search(&parent)
            .ok()
            .map(|i| VertexId(i as u32))
    }

    pub fn sub_edge(&self, parent: EdgeId) -> Option<EdgeId> {
        self.edges
            .iter()
            .position(|&e| e == parent)
            .map(|i| EdgeId(i as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VertexCurvature {
    pub vertex: VertexId,
    pub boundary: bool,
    pub angle_sum_deg: f64,
    /// `360 − angle_sum` for interior vertices; `None` on the boundary.
    pub deficit_deg: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureReport {
    pub entries: Vec<VertexCurvature>,
}

impl CurvatureReport {
    pub fn entry(&self, v: VertexId) -> &VertexCurvature {
        &self.entries[v.idx()]
    }

    /// Sum of interior deficits; 720° on any closed sphere.
    pub fn total_deficit_deg(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| e.deficit_deg)
            .sum()
    }

    pub fn negative_vertices(&self) -> Vec<VertexId> {
        self.signed(|d| d < -ANGLE_TOL_DEG)
    }

    pub fn positive_vertices(&self) -> Vec<VertexId> {
        self.signed(|d| d > ANGLE_TOL_DEG)
    }

    pub fn flat_vertices(&self) -> Vec<VertexId> {
        self.signed(|d| d.abs() <= ANGLE_TOL_DEG)
    }

    fn signed(&self, pred: impl Fn(f64) -> bool) -> Vec<VertexId> {
        self.entries
            .iter()
            .filter(|e| e.deficit_deg.map(&pred).unwrap_or(false))
            .map(|e| e.vertex)
            .collect()
    }
}

pub(crate) fn triangle_area(a: Point3, b: Point3, c: Point3) -> f64 {
    (b - a).cross(c - a).norm() * 0.5
}

fn count_boundary_cycles(edges: &[Edge], nv: usize) -> usize {
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); nv];
    for e in edges.iter().filter(|e| e.is_boundary()) {
        adj[e.vertices.0.idx()].push(e.vertices.1);
        adj[e.vertices.1.idx()].push(e.vertices.0);
    }
    let mut seen = vec![false; nv];
    let mut cycles = 0;
    for start in 0..nv {
        if adj[start].is_empty() || seen[start] {
            continue;
        }
        cycles += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w.idx()] {
                    seen[w.idx()] = true;
                    stack.push(w.idx());
                }
            }
        }
    }
    cycles
}

/// Plain union-find with path halving; used for connectivity checks here and
/// for piece counting in `unfold`.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    count: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            count: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        self.count -= 1;
        true
    }

    pub fn component_count(&self) -> usize {
        self.count
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn tetrahedron() -> SurfaceMesh {
        // Regular tetrahedron, unit edge length.
        let s = 1.0f64;
        let h = (2.0f64 / 3.0).sqrt() * s;
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 3.0f64.sqrt() / 2.0, 0.0),
            Point3::new(0.5, 3.0f64.sqrt() / 6.0, h),
        ];
        // Outward-oriented: bottom face wound clockwise seen from above.
        let faces = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]];
        SurfaceMesh::build(positions, faces, None).unwrap()
    }

    fn single_triangle() -> SurfaceMesh {
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        SurfaceMesh::build(positions, vec![[0, 1, 2]], None).unwrap()
    }

    #[test]
    fn tetrahedron_is_a_closed_sphere() {
        let m = tetrahedron();
        assert_eq!(m.vertex_count(), 4);
        assert_eq!(m.edge_count(), 6);
        assert_eq!(m.face_count(), 4);
        assert_eq!(m.topology(), MeshTopology::ClosedSphere);
        assert!(m.boundary_vertices().next().is_none());
        for e in m.edge_ids() {
            assert!(!m.edge(e).is_boundary());
            assert_abs_diff_eq!(m.edge_length(e), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_triangle_is_a_disk() {
        let m = single_triangle();
        assert_eq!(m.topology(), MeshTopology::Disk);
        assert_eq!(m.boundary_vertices().count(), 3);
        assert_eq!(m.interior_edge_ids().count(), 0);
    }

    #[test]
    fn face_angles_sum_to_180() {
        let m = tetrahedron();
        for f in m.faces() {
            let total: f64 = m.face(f).iter().map(|&v| m.face_angle_at(f, v)).sum();
            assert_abs_diff_eq!(total, 180.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn regular_tetrahedron_deficits_are_180() {
        // Three 60° angles meet at each vertex: deficit 360 − 180 = 180,
        // so the four vertices sum to the 720° required of a closed sphere.
        let report = tetrahedron().curvature_report();
        for e in &report.entries {
            assert!(!e.boundary);
            assert_abs_diff_eq!(e.angle_sum_deg, 180.0, epsilon = 1e-9);
            assert_abs_diff_eq!(e.deficit_deg.unwrap(), 180.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(report.total_deficit_deg(), 720.0, epsilon = 1e-9);
        assert_eq!(report.positive_vertices().len(), 4);
        assert!(report.negative_vertices().is_empty());
    }

    #[test]
    fn flat_fan_has_zero_deficit() {
        // Four right triangles filling a square around its center.
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.5, 0.5, 0.0),
        ];
        let faces = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        let m = SurfaceMesh::build(positions, faces, None).unwrap();
        assert_eq!(m.topology(), MeshTopology::Disk);
        let report = m.curvature_report();
        assert_eq!(report.flat_vertices(), vec![VertexId(4)]);
        assert_abs_diff_eq!(
            report.entry(VertexId(4)).deficit_deg.unwrap(),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn rejects_nonmanifold_edge() {
        // Three triangles sharing the edge (0, 1).
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 1.0, 0.0),
            Point3::new(0.5, -1.0, 0.0),
            Point3::new(0.5, 0.0, 1.0),
        ];
        let faces = vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        match SurfaceMesh::build(positions, faces, None) {
            Err(MeshError::NonManifoldEdge { count: 3, .. }) => {}
            other => panic!("expected NonManifoldEdge, got {other:?}"),
        }
    }

    #[test]
    fn rejects_inconsistent_orientation() {
        // Second face wound so both traverse 1 -> 2.
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 1.0, 0.0),
            Point3::new(1.5, 1.0, 0.0),
        ];
        let faces = vec![[0, 1, 2], [1, 2, 3]];
        match SurfaceMesh::build(positions, faces, None) {
            Err(MeshError::InconsistentOrientation { .. }) => {}
            other => panic!("expected InconsistentOrientation, got {other:?}"),
        }
    }

    #[test]
    fn rejects_degenerate_face() {
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
        ];
        match SurfaceMesh::build(positions, vec![[0, 1, 2]], None) {
            Err(MeshError::DegenerateFace { .. }) => {}
            other => panic!("expected DegenerateFace, got {other:?}"),
        }
    }

    #[test]
    fn rejects_disconnected_mesh() {
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(5.0, 0.0, 0.0),
            Point3::new(6.0, 0.0, 0.0),
            Point3::new(5.0, 1.0, 0.0),
        ];
        let faces = vec![[0, 1, 2], [3, 4, 5]];
        match SurfaceMesh::build(positions, faces, None) {
            Err(MeshError::Disconnected { components: 2 }) => {}
            other => panic!("expected Disconnected, got {other:?}"),
        }
    }

    #[test]
    fn rejects_pinched_vertex_via_euler_gate() {
        // Two triangles pinched together at vertex 0, joined into one edge
        // component by a strip that avoids vertex 0. Every edge is manifold
        // and windings are consistent, but the figure is not a surface:
        // Euler characteristic 0 exposes the pinch.
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.1, 0.0),
            Point3::new(1.0, -0.4, 0.0),
            Point3::new(-1.0, -0.4, 0.0),
            Point3::new(-1.0, 0.1, 0.0),
            Point3::new(0.0, -1.0, 0.0),
        ];
        let faces = vec![[0, 1, 2], [2, 1, 5], [2, 5, 3], [3, 5, 4], [3, 4, 0]];
        match SurfaceMesh::build(positions, faces, None) {
            Err(MeshError::BadEulerCharacteristic { euler: 0, .. }) => {}
            other => panic!("expected BadEulerCharacteristic, got {other:?}"),
        }
    }

    #[test]
    fn rejects_isolated_vertex() {
        let positions = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(9.0, 9.0, 9.0),
        ];
        match SurfaceMesh::build(positions, vec![[0, 1, 2]], None) {
            Err(MeshError::IsolatedVertex { vertex: VertexId(3) }) => {}
            other => panic!("expected IsolatedVertex, got {other:?}"),
        }
    }

    #[test]
    fn edge_between_and_face_edges_agree() {
        let m = tetrahedron();
        for f in m.faces() {
            let tri = m.face(f);
            let ids = m.face_edge_ids(f);
            for k in 0..3 {
                let e = m.edge_between(tri[k], tri[(k + 1) % 3]).unwrap();
                assert_eq!(e, ids[k]);
                let edge = m.edge(e);
                assert!(edge.faces.0 == f || edge.faces.1 == Some(f));
            }
        }
    }

    #[test]
    fn region_extraction_round_trips_ids() {
        // Tetrahedron with one face labeled as a one-face hat region.
        let base = tetrahedron();
        let labels = vec![
            FaceLabel::hat(RegionLabel::Brim, HatId(0)),
            FaceLabel::base(),
            FaceLabel::base(),
            FaceLabel::base(),
        ];
        let m = SurfaceMesh::build(
            base.positions().to_vec(),
            (0..4)
                .map(|i| base.face(FaceId(i)).map(|v| v.0))
                .collect(),
            Some(labels),
        )
        .unwrap();
        let (sub, map) = m.region_subcomplex(HatId(0)).unwrap();
        assert_eq!(sub.face_count(), 1);
        assert_eq!(sub.topology(), MeshTopology::Disk);
        assert_eq!(map.faces, vec![FaceId(0)]);
        for (i, &pv) in map.vertices.iter().enumerate() {
            assert_eq!(sub.position(VertexId(i as u32)), m.position(pv));
        }
        for (i, &pe) in map.edges.iter().enumerate() {
            let se = sub.edge(EdgeId(i as u32));
            let (u, v) = (map.vertices[se.vertices.0.idx()], map.vertices[se.vertices.1.idx()]);
            assert_eq!(m.edge_between(u, v), Some(pe));
        }
        assert!(matches!(
            m.region_subcomplex(HatId(7)),
            Err(MeshError::NoSuchRegion { .. })
        ));
    }
}

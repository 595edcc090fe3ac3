//! Generators for the ununfoldable surfaces.
//!
//! The building block is the *hat*: a nine-triangle disk over a triangular
//! base — three brim triangles on the boundary, three band triangles, and
//! three crown triangles around a center apex. Its three interior "shoulder"
//! vertices carry negative curvature (angle sums above 360°), which is what
//! defeats flat single-piece unfoldings of any region containing them.
//!
//! Two hat variants are built here:
//!
//! * the **acute hat**: all faces acute isosceles (85°/47.5° brims,
//!   85°/10° bands and crowns), embedded by a damped Newton solve of the
//!   four-parameter symmetric ring geometry;
//! * the **stacked hat**: the same combinatorics realized by four successive
//!   point stackings over a base face, each apex strictly outside the
//!   current surface, so the result is certified *topologically convex* by
//!   its [`StackingCertificate`].
//!
//! On top of these: the **caltrop** (regular tetrahedron with an acute hat
//! per face), its grid-subdivided family, and the stacked family over a
//! repeatedly point-split tetrahedron.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::mesh::{
    FaceLabel, HatId, MeshError, Point3, RegionLabel, SurfaceMesh, Vec3, VertexId,
};

/// Convergence target for the embedding solve, scaled by side².
pub const EMBED_RESIDUAL_TOL: f64 = 1e-12;
/// Slack allowed by [`prism_containment`] (absolute, in mesh units).
pub const PRISM_TOL: f64 = 1e-9;
/// Crown apex angles must stay below this (the apex angle of the isosceles
/// triangle inscribed in a regular pentagon on one side).
pub const CROWN_APEX_LIMIT_DEG: f64 = 36.0;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("embedding solve stalled after {iterations} iterations at residual {residual:.3e}")]
    EmbeddingSolveFailure { iterations: usize, residual: f64 },
    #[error("embedding is invalid: {detail}")]
    EmbeddingInvalid { detail: String },
    #[error("hat base mismatch: {detail}")]
    BoundaryMismatch { detail: String },
    #[error("stacking step {step} is invalid: {detail}")]
    InvalidStacking { step: usize, detail: String },
    #[error("vertex {vertex} has angle deficit {deficit_deg:.6}°, the wrong sign for its role")]
    CurvatureSignViolation { vertex: VertexId, deficit_deg: f64 },
    #[error("crown apex angle {apex_angle_deg:.6}° is not below {CROWN_APEX_LIMIT_DEG}°")]
    CrownTooShort { apex_angle_deg: f64 },
    #[error("bad parameter: {detail}")]
    BadParameter { detail: String },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

// ---------------------------------------------------------------------------
// Acute hat
// ---------------------------------------------------------------------------

/// Parameters of the acute hat. The face angles are fixed by the shape
/// (every face acute isosceles); only the boundary scale varies.
#[derive(Debug, Clone, Copy)]
pub struct AcuteHatSpec {
    /// Side length of the equilateral boundary triangle.
    pub boundary_side: f64,
}

impl AcuteHatSpec {
    pub const BRIM_APEX_DEG: f64 = 85.0;
    pub const BRIM_BASE_DEG: f64 = 47.5;
    pub const BAND_BASE_DEG: f64 = 85.0;
    pub const BAND_APEX_DEG: f64 = 10.0;

    /// Length of the six brim legs, the three crown legs, and (by the
    /// isosceles band shape) the band legs: s / (2 cos 47.5°).
    pub fn leg_length(&self) -> f64 {
        self.boundary_side / (2.0 * Self::BRIM_BASE_DEG.to_radians().cos())
    }

    /// Length of the three ring edges between shoulder vertices:
    /// 2 · leg · sin 5°.
    pub fn ring_edge_length(&self) -> f64 {
        2.0 * self.leg_length() * (Self::BAND_APEX_DEG / 2.0).to_radians().sin()
    }
}

impl Default for AcuteHatSpec {
    fn default() -> Self {
        AcuteHatSpec { boundary_side: 1.0 }
    }
}

/// How the embedding solve went and how closely the result matches the
/// requested [`AcuteHatSpec`].
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingDiagnostics {
    pub iterations: usize,
    /// Final max-norm of the squared-length residuals, relative to side².
    pub residual: f64,
    /// Worst edge length error relative to the closed-form targets.
    pub max_edge_relative_error: f64,
    /// Worst face angle error (degrees) against the fixed hat angles.
    pub max_angle_error_deg: f64,
}

/// Solved ring parameters of one hat: shoulder ring radius `rho` at height
/// `h` around the base centroid, phase `phi`, center apex at height `hc`.
#[derive(Debug, Clone, Copy)]
struct HatRing {
    rho: f64,
    phi: f64,
    h: f64,
    hc: f64,
    iterations: usize,
    residual: f64,
}

/// Finds the symmetric embedding of an acute hat over an equilateral base of
/// side `s` by damped Newton iteration on (ρ, φ, h, h_c).
///
/// Unknowns are seeded from the flattened top view (ring radius from the
/// ring edge length, phase facing the first base edge) with staggered
/// heights 0.1s and 0.2s; equal heights would make the center-apex column of
/// the Jacobian vanish.
fn solve_hat_ring(s: f64) -> Result<HatRing, ConstructionError> {
    let spec = AcuteHatSpec { boundary_side: s };
    let l1sq = spec.leg_length() * spec.leg_length();
    let nnsq = spec.ring_edge_length() * spec.ring_edge_length();
    let (gx, gy) = (0.5 * s, s * 3f64.sqrt() / 6.0);
    let third = 2.0 * std::f64::consts::PI / 3.0;

    let residual = |x: &[f64; 4]| -> [f64; 4] {
        let [rho, phi, h, hc] = *x;
        let (n1x, n1y) = (gx + rho * phi.cos(), gy + rho * phi.sin());
        let (n2x, n2y) = (
            gx + rho * (phi + third).cos(),
            gy + rho * (phi + third).sin(),
        );
        [
            n1x * n1x + n1y * n1y + h * h - l1sq,
            (n1x - s) * (n1x - s) + n1y * n1y + h * h - l1sq,
            (n1x - n2x) * (n1x - n2x) + (n1y - n2y) * (n1y - n2y) - nnsq,
            (gx - n1x) * (gx - n1x) + (gy - n1y) * (gy - n1y) + (hc - h) * (hc - h) - l1sq,
        ]
    };
    let jacobian = |x: &[f64; 4]| -> [[f64; 4]; 4] {
        let [rho, phi, h, hc] = *x;
        let (c1, s1) = (phi.cos(), phi.sin());
        let (c2, s2) = ((phi + third).cos(), (phi + third).sin());
        let (n1x, n1y) = (gx + rho * c1, gy + rho * s1);
        let (n2x, n2y) = (gx + rho * c2, gy + rho * s2);
        let (dx, dy) = (n1x - n2x, n1y - n2y);
        [
            [
                2.0 * (n1x * c1 + n1y * s1),
                2.0 * rho * (-n1x * s1 + n1y * c1),
                2.0 * h,
                0.0,
            ],
            [
                2.0 * ((n1x - s) * c1 + n1y * s1),
                2.0 * rho * (-(n1x - s) * s1 + n1y * c1),
                2.0 * h,
                0.0,
            ],
            [
                2.0 * (dx * (c1 - c2) + dy * (s1 - s2)),
                2.0 * rho * (dx * (-s1 + s2) + dy * (c1 - c2)),
                0.0,
                0.0,
            ],
            [
                -2.0 * ((gx - n1x) * c1 + (gy - n1y) * s1),
                -2.0 * rho * (-(gx - n1x) * s1 + (gy - n1y) * c1),
                2.0 * (h - hc),
                2.0 * (hc - h),
            ],
        ]
    };

    let tol = EMBED_RESIDUAL_TOL * s * s;
    let mut x = [
        spec.ring_edge_length() / 3f64.sqrt(),
        270f64.to_radians(),
        0.1 * s,
        0.2 * s,
    ];
    let norm2 = |r: &[f64; 4]| r.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut r = residual(&x);
    let mut best_res = f64::INFINITY;
    for it in 0..80 {
        let res = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        best_res = best_res.min(res);
        if res <= tol {
            return Ok(HatRing {
                rho: x[0],
                phi: x[1],
                h: x[2],
                hc: x[3],
                iterations: it,
                residual: res / (s * s),
            });
        }
        let j = jacobian(&x);
        let rhs = [-r[0], -r[1], -r[2], -r[3]];
        let Some(step) = solve4(j, rhs) else {
            return Err(ConstructionError::EmbeddingSolveFailure {
                iterations: it,
                residual: res,
            });
        };
        // Backtracking damping on the 2-norm.
        let base = norm2(&r);
        let mut t = 1.0;
        loop {
            let trial = [
                x[0] + t * step[0],
                x[1] + t * step[1],
                x[2] + t * step[2],
                x[3] + t * step[3],
            ];
            let tr = residual(&trial);
            if norm2(&tr) <= (1.0 - 1e-4 * t) * base || t < 1e-6 {
                x = trial;
                r = tr;
                break;
            }
            t *= 0.5;
        }
    }
    Err(ConstructionError::EmbeddingSolveFailure {
        iterations: 80,
        residual: best_res,
    })
}

/// Gaussian elimination with partial pivoting; None for singular systems.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .expect("finite")
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in (row + 1)..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// The nine hat faces over base ids `b`, shoulder ring ids `n`, center `c`,
/// in brim/band/crown order, with labels for hat `hat`.
fn hat_faces(b: [u32; 3], n: [u32; 3], c: u32, hat: HatId) -> [([u32; 3], FaceLabel); 9] {
    let l = |r| FaceLabel::hat(r, hat);
    [
        ([b[0], b[1], n[0]], l(RegionLabel::Brim)),
        ([b[1], b[2], n[1]], l(RegionLabel::Brim)),
        ([b[2], b[0], n[2]], l(RegionLabel::Brim)),
        ([b[0], n[0], n[2]], l(RegionLabel::Band)),
        ([b[1], n[1], n[0]], l(RegionLabel::Band)),
        ([b[2], n[2], n[1]], l(RegionLabel::Band)),
        ([n[2], n[0], c], l(RegionLabel::Crown)),
        ([n[0], n[1], c], l(RegionLabel::Crown)),
        ([n[1], n[2], c], l(RegionLabel::Crown)),
    ]
}

/// Growing triangle soup for the composite constructions.
struct MeshBuilder {
    positions: Vec<Point3>,
    faces: Vec<[u32; 3]>,
    labels: Vec<FaceLabel>,
}

impl MeshBuilder {
    fn new() -> Self {
        MeshBuilder {
            positions: Vec::new(),
            faces: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn push_vertex(&mut self, p: Point3) -> u32 {
        self.positions.push(p);
        (self.positions.len() - 1) as u32
    }

    fn push_face(&mut self, f: [u32; 3], label: FaceLabel) {
        self.faces.push(f);
        self.labels.push(label);
    }

    fn build(self) -> Result<SurfaceMesh, MeshError> {
        SurfaceMesh::build(self.positions, self.faces, Some(self.labels))
    }
}

/// Places an acute hat over the base corners `b` (positions `pb`, outward
/// normal side up) into `builder`. The base must be equilateral.
fn attach_acute_hat(
    builder: &mut MeshBuilder,
    b: [u32; 3],
    pb: [Point3; 3],
    hat: HatId,
) -> Result<(), ConstructionError> {
    let s = pb[0].distance(pb[1]);
    for (i, j) in [(1usize, 2usize), (2, 0)] {
        let d = pb[i].distance(pb[j]);
        if (d - s).abs() > 1e-9 * s {
            return Err(ConstructionError::BoundaryMismatch {
                detail: format!(
                    "acute hat base must be equilateral; sides {s} and {d} differ"
                ),
            });
        }
    }
    let ring = solve_hat_ring(s)?;

    let ex = (pb[1] - pb[0]) * (1.0 / s);
    let ez = (pb[1] - pb[0]).cross(pb[2] - pb[0]).normalized();
    let ey = ez.cross(ex);
    let place = |lx: f64, ly: f64, lz: f64| pb[0] + ex * lx + ey * ly + ez * lz;

    let (gx, gy) = (0.5 * s, s * 3f64.sqrt() / 6.0);
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let mut n = [0u32; 3];
    for (j, nj) in n.iter_mut().enumerate() {
        let a = ring.phi + third * j as f64;
        *nj = builder.push_vertex(place(
            gx + ring.rho * a.cos(),
            gy + ring.rho * a.sin(),
            ring.h,
        ));
    }
    let c = builder.push_vertex(place(gx, gy, ring.hc));
    for (f, label) in hat_faces(b, n, c, hat) {
        builder.push_face(f, label);
    }
    Ok(())
}

/// Builds the acute hat: nine acute isosceles triangles over a unit
/// equilateral boundary, with shoulder angle sums of 425° and a 30° center.
pub fn acute_hat() -> Result<(SurfaceMesh, EmbeddingDiagnostics), ConstructionError> {
    acute_hat_with(&AcuteHatSpec::default())
}

pub fn acute_hat_with(
    spec: &AcuteHatSpec,
) -> Result<(SurfaceMesh, EmbeddingDiagnostics), ConstructionError> {
    let s = spec.boundary_side;
    if !(s.is_finite() && s > 0.0) {
        return Err(ConstructionError::BadParameter {
            detail: format!("boundary_side must be positive, got {s}"),
        });
    }
    let mut builder = MeshBuilder::new();
    let b = [
        builder.push_vertex(Point3::new(0.0, 0.0, 0.0)),
        builder.push_vertex(Point3::new(s, 0.0, 0.0)),
        builder.push_vertex(Point3::new(0.5 * s, s * 3f64.sqrt() / 2.0, 0.0)),
    ];
    let pb = [
        builder.positions[0],
        builder.positions[1],
        builder.positions[2],
    ];
    let ring = solve_hat_ring(s)?;
    attach_acute_hat(&mut builder, b, pb, HatId(0))?;
    let mesh = builder.build()?;
    validate_hat_geometry(&mesh, Vec3::new(0.0, 0.0, 1.0))?;

    let diagnostics = EmbeddingDiagnostics {
        iterations: ring.iterations,
        residual: ring.residual,
        max_edge_relative_error: acute_hat_edge_error(&mesh, spec),
        max_angle_error_deg: acute_hat_angle_error(&mesh),
    };
    Ok((mesh, diagnostics))
}

/// All face normals must agree with the base's outward side; a flipped face
/// means the solve landed on a reflected branch.
fn validate_hat_geometry(mesh: &SurfaceMesh, up: Vec3) -> Result<(), ConstructionError> {
    for f in mesh.faces() {
        if mesh.face_normal(f).dot(up) <= 0.0 {
            return Err(ConstructionError::EmbeddingInvalid {
                detail: format!("face {f} is flipped against the base normal"),
            });
        }
    }
    for v in mesh.interior_vertices() {
        let h = (mesh.position(v) - mesh.position(VertexId(0))).dot(up);
        if h <= 0.0 {
            return Err(ConstructionError::EmbeddingInvalid {
                detail: format!("interior vertex {v} is not above the base plane"),
            });
        }
    }
    Ok(())
}

/// Worst relative edge-length error against the closed-form targets.
fn acute_hat_edge_error(mesh: &SurfaceMesh, spec: &AcuteHatSpec) -> f64 {
    let mut worst = 0.0f64;
    for e in mesh.edge_ids() {
        let edge = mesh.edge(e);
        let target = if edge.is_boundary() {
            spec.boundary_side
        } else {
            // Ring edges join two shoulder (interior, non-center) vertices.
            let (u, v) = edge.vertices;
            let center = VertexId(6);
            if u != center && v != center && !mesh.is_boundary_vertex(u) && !mesh.is_boundary_vertex(v)
            {
                spec.ring_edge_length()
            } else {
                spec.leg_length()
            }
        };
        worst = worst.max((mesh.edge_length(e) - target).abs() / target);
    }
    worst
}

/// Worst angle error (degrees) against the fixed hat face angles.
fn acute_hat_angle_error(mesh: &SurfaceMesh) -> f64 {
    let mut worst = 0.0f64;
    for f in mesh.faces() {
        let region = mesh.label(f).region;
        for v in mesh.face(f) {
            let angle = mesh.face_angle_at(f, v);
            let target = match region {
                RegionLabel::Brim => {
                    if mesh.is_boundary_vertex(v) {
                        AcuteHatSpec::BRIM_BASE_DEG
                    } else {
                        AcuteHatSpec::BRIM_APEX_DEG
                    }
                }
                _ => {
                    // Bands: apex at the base corner; crowns: apex at the
                    // center. Both have 85° at the shoulder vertices.
                    let apex = mesh.is_boundary_vertex(v) || v == VertexId(6);
                    if apex {
                        AcuteHatSpec::BAND_APEX_DEG
                    } else {
                        AcuteHatSpec::BAND_BASE_DEG
                    }
                }
            };
            worst = worst.max((angle - target).abs());
        }
    }
    worst
}

/// Checks that every vertex of `mesh` lies in the infinite prism erected
/// over the (oriented) base triangle: heights ≥ 0 along the base normal and
/// planar projection inside the base, within [`PRISM_TOL`].
pub fn prism_containment(mesh: &SurfaceMesh, base: [Point3; 3]) -> bool {
    let n = (base[1] - base[0]).cross(base[2] - base[0]);
    let nn = n.normalized();
    let scale = base[0].distance(base[1]);
    for &p in mesh.positions() {
        if (p - base[0]).dot(nn) < -PRISM_TOL {
            return false;
        }
        // Inside test against each base edge, in the base plane.
        for k in 0..3 {
            let a = base[k];
            let b = base[(k + 1) % 3];
            // Outward-in-plane normal of edge (a, b) is (b−a)×n̂; the point
            // must not be beyond it.
            let out = (b - a).cross(nn);
            if (p - a).dot(out.normalized()) > PRISM_TOL * scale.max(1.0) {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Stacked hat
// ---------------------------------------------------------------------------

/// Parameters of a stacked hat over an arbitrary base triangle.
#[derive(Debug, Clone, Copy)]
pub struct StackedHatSpec {
    pub base: [Point3; 3],
    /// Side of the (exactly equilateral) shoulder interface triangle.
    pub interface_side: f64,
    /// Heights of the three shoulder vertices over the base plane; pairwise
    /// distinct values keep every stacking step strict.
    pub lift_heights: [f64; 3],
    /// Height of the center apex over the interface plane.
    pub crown_height: f64,
}

impl StackedHatSpec {
    /// Canonical parameters over the unit equilateral base: interface side
    /// 1/4, lifts 0.01/0.012/0.014, crown height (1/4) / (2 tan 10°).
    pub fn unit() -> Self {
        let iota = 0.25;
        StackedHatSpec {
            base: [
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
            ],
            interface_side: iota,
            lift_heights: [0.01, 0.012, 0.014],
            crown_height: iota / (2.0 * 10f64.to_radians().tan()),
        }
    }

    /// Unit parameters scaled to an arbitrary base face by its inradius
    /// (the unit equilateral has inradius 1/(2√3)).
    pub fn for_face(base: [Point3; 3]) -> Self {
        let scale = inradius(base) * 2.0 * 3f64.sqrt();
        let unit = Self::unit();
        StackedHatSpec {
            base,
            interface_side: unit.interface_side * scale,
            lift_heights: unit.lift_heights.map(|h| h * scale),
            crown_height: unit.crown_height * scale,
        }
    }
}

fn inradius(t: [Point3; 3]) -> f64 {
    let a = t[1].distance(t[2]);
    let b = t[2].distance(t[0]);
    let c = t[0].distance(t[1]);
    let s = 0.5 * (a + b + c);
    let area = crate::mesh::triangle_area(t[0], t[1], t[2]);
    area / s
}

fn incenter(t: [Point3; 3]) -> Point3 {
    let a = t[1].distance(t[2]);
    let b = t[2].distance(t[0]);
    let c = t[0].distance(t[1]);
    let w = a + b + c;
    Point3::new(
        (a * t[0].x + b * t[1].x + c * t[2].x) / w,
        (a * t[0].y + b * t[1].y + c * t[2].y) / w,
        (a * t[0].z + b * t[1].z + c * t[2].z) / w,
    )
}

/// One point-stacking: `apex` replaced `face` by three triangles. `margin`
/// is the apex's height above the glued face's plane; strict positivity is
/// what makes the overall surface topologically convex.
#[derive(Debug, Clone, Copy)]
pub struct StackingStep {
    pub face: [VertexId; 3],
    pub apex: VertexId,
    pub margin: f64,
}

/// Replayable proof that a mesh arises from `initial_faces` by successive
/// point stackings.
#[derive(Debug, Clone)]
pub struct StackingCertificate {
    pub initial_faces: Vec<[VertexId; 3]>,
    pub steps: Vec<StackingStep>,
}

fn canonical_face(f: [VertexId; 3]) -> [VertexId; 3] {
    let k = (0..3).min_by_key(|&i| f[i]).expect("nonempty");
    [f[k], f[(k + 1) % 3], f[(k + 2) % 3]]
}

impl StackingCertificate {
    /// Replays the certificate against `mesh`: every step must glue onto a
    /// face of the evolving surface with its apex strictly outside, and the
    /// final face set must be exactly the mesh's.
    pub fn verify(&self, mesh: &SurfaceMesh) -> Result<(), ConstructionError> {
        let mut surface: BTreeSet<[VertexId; 3]> =
            self.initial_faces.iter().map(|&f| canonical_face(f)).collect();
        if surface.len() != self.initial_faces.len() {
            return Err(ConstructionError::InvalidStacking {
                step: 0,
                detail: "initial faces repeat".into(),
            });
        }
        for (i, step) in self.steps.iter().enumerate() {
            let key = canonical_face(step.face);
            if !surface.remove(&key) {
                return Err(ConstructionError::InvalidStacking {
                    step: i,
                    detail: format!(
                        "face ({}, {}, {}) is not part of the surface at this step",
                        step.face[0], step.face[1], step.face[2]
                    ),
                });
            }
            let [a, b, c] = step.face.map(|v| mesh.position(v));
            let n = (b - a).cross(c - a).normalized();
            let margin = (mesh.position(step.apex) - a).dot(n);
            if margin <= 0.0 {
                return Err(ConstructionError::InvalidStacking {
                    step: i,
                    detail: format!(
                        "apex {} is not strictly outside the glued face (margin {margin:.3e})",
                        step.apex
                    ),
                });
            }
            for child in [
                [step.face[0], step.face[1], step.apex],
                [step.face[1], step.face[2], step.apex],
                [step.face[2], step.face[0], step.apex],
            ] {
                if !surface.insert(canonical_face(child)) {
                    return Err(ConstructionError::InvalidStacking {
                        step: i,
                        detail: "child face already present".into(),
                    });
                }
            }
        }
        let actual: BTreeSet<[VertexId; 3]> =
            mesh.faces().map(|f| canonical_face(mesh.face(f))).collect();
        if surface != actual {
            return Err(ConstructionError::InvalidStacking {
                step: self.steps.len(),
                detail: "replayed surface does not match the mesh's face set".into(),
            });
        }
        Ok(())
    }
}

/// Computes the four stacked-hat vertices over the spec's base: an exactly
/// equilateral shoulder triangle at slightly staggered heights around the
/// incenter, plus the crown apex on the interface normal.
fn stacked_hat_points(spec: &StackedHatSpec) -> Result<[Point3; 4], ConstructionError> {
    let [p0, p1, p2] = spec.base;
    let iota = spec.interface_side;
    let [e1, e2, e3] = spec.lift_heights;
    let n = (p1 - p0).cross(p2 - p0).normalized();
    let center = incenter(spec.base);
    let rc = iota / 3f64.sqrt();
    if rc >= inradius(spec.base) {
        return Err(ConstructionError::BadParameter {
            detail: format!(
                "interface ring radius {rc} does not fit inside the base (inradius {})",
                inradius(spec.base)
            ),
        });
    }

    // Flat ring: first direction toward the second base corner, then ±120°.
    let d1 = {
        let d = p1 - center;
        (d - n * d.dot(n)).normalized()
    };
    let rot = |v: Vec3, deg: f64| {
        let (s, c) = deg.to_radians().sin_cos();
        v * c + n.cross(v) * s
    };
    let q1 = center + d1 * rc;
    let q2 = center + rot(d1, 120.0) * rc;

    let v1 = q1 + n * e1;
    let w = (q2 - q1).normalized();
    let d12sq = iota * iota - (e2 - e1) * (e2 - e1);
    if d12sq <= 0.0 {
        return Err(ConstructionError::BadParameter {
            detail: "lift heights differ by more than the interface side".into(),
        });
    }
    let d12 = d12sq.sqrt();
    let v2 = q1 + w * d12 + n * e2;

    // Third shoulder: circle-circle intersection in the base plane.
    let r1sq = iota * iota - (e3 - e1) * (e3 - e1);
    let r2sq = iota * iota - (e3 - e2) * (e3 - e2);
    let x = (d12 * d12 + r1sq - r2sq) / (2.0 * d12);
    let ysq = r1sq - x * x;
    if ysq <= 0.0 {
        return Err(ConstructionError::BadParameter {
            detail: "no planar position for the third shoulder vertex".into(),
        });
    }
    let m = n.cross(w);
    let y = ysq.sqrt();
    // Pick the branch making (v1, v2, v3) wind counterclockwise seen from
    // outside (+n).
    let candidate = q1 + w * x + m * y + n * e3;
    let v3 = if (v2 - v1).cross(candidate - v1).dot(n) > 0.0 {
        candidate
    } else {
        q1 + w * x + m * (-y) + n * e3
    };

    let u = (v2 - v1).cross(v3 - v1).normalized();
    let centroid = Point3::new(
        (v1.x + v2.x + v3.x) / 3.0,
        (v1.y + v2.y + v3.y) / 3.0,
        (v1.z + v2.z + v3.z) / 3.0,
    );
    let v4 = centroid + u * spec.crown_height;
    Ok([v1, v2, v3, v4])
}

/// Appends a stacked hat over base corner ids `b` into `builder`, recording
/// its four stacking steps. Face order: three brims, three bands, three
/// crowns (same region layout as the acute hat).
fn attach_stacked_hat(
    builder: &mut MeshBuilder,
    b: [u32; 3],
    spec: &StackedHatSpec,
    hat: HatId,
    steps: &mut Vec<StackingStep>,
) -> Result<(), ConstructionError> {
    let points = stacked_hat_points(spec)?;
    let ids = points.map(|p| builder.push_vertex(p));
    let [v1, v2, v3, v4] = ids;
    let step_margin = |face: [u32; 3], apex: u32| {
        let [a, bb, c] = face.map(|i| builder.positions[i as usize]);
        let n = (bb - a).cross(c - a).normalized();
        StackingStep {
            face: face.map(VertexId),
            apex: VertexId(apex),
            margin: (builder.positions[apex as usize] - a).dot(n),
        }
    };
    // The four splits: v1 over the base; v2 over (b2, b0, v1); v3 over
    // (b0, v1, v2); v4 over the interface.
    steps.push(step_margin([b[0], b[1], b[2]], v1));
    steps.push(step_margin([b[2], b[0], v1], v2));
    steps.push(step_margin([b[0], v1, v2], v3));
    steps.push(step_margin([v1, v2, v3], v4));
    for s in steps.iter().rev().take(4) {
        if s.margin <= 0.0 {
            return Err(ConstructionError::InvalidStacking {
                step: steps.len(),
                detail: format!("apex {} margin {:.3e} is not positive", s.apex, s.margin),
            });
        }
    }

    let l = |r| FaceLabel::hat(r, hat);
    let faces = [
        ([b[0], b[1], v1], l(RegionLabel::Brim)),
        ([b[1], b[2], v1], l(RegionLabel::Brim)),
        ([b[2], b[0], v2], l(RegionLabel::Brim)),
        ([v1, b[2], v2], l(RegionLabel::Band)),
        ([b[0], v1, v3], l(RegionLabel::Band)),
        ([v2, b[0], v3], l(RegionLabel::Band)),
        ([v1, v2, v4], l(RegionLabel::Crown)),
        ([v2, v3, v4], l(RegionLabel::Crown)),
        ([v3, v1, v4], l(RegionLabel::Crown)),
    ];
    for (f, label) in faces {
        builder.push_face(f, label);
    }
    Ok(())
}

/// Checks the curvature signature every hat must have: every shoulder
/// strictly negative, the center strictly positive, plus crown apex angles
/// below the pentagon threshold.
fn check_hat_curvature(mesh: &SurfaceMesh) -> Result<(), ConstructionError> {
    let report = mesh.curvature_report();
    let center = VertexId(6);
    for v in mesh.interior_vertices() {
        let d = report.entry(v).deficit_deg.expect("interior");
        if v == center && d <= 0.0 {
            return Err(ConstructionError::CurvatureSignViolation {
                vertex: v,
                deficit_deg: d,
            });
        }
        if v != center && d >= 0.0 {
            return Err(ConstructionError::CurvatureSignViolation {
                vertex: v,
                deficit_deg: d,
            });
        }
    }
    for f in mesh.faces() {
        if mesh.label(f).region == RegionLabel::Crown {
            let apex = mesh.face_angle_at(f, center);
            if apex >= CROWN_APEX_LIMIT_DEG {
                return Err(ConstructionError::CrownTooShort {
                    apex_angle_deg: apex,
                });
            }
        }
    }
    Ok(())
}

/// Builds the stacked hat over the unit equilateral base.
pub fn stacked_hat() -> Result<(SurfaceMesh, StackingCertificate), ConstructionError> {
    stacked_hat_with(&StackedHatSpec::unit())
}

pub fn stacked_hat_with(
    spec: &StackedHatSpec,
) -> Result<(SurfaceMesh, StackingCertificate), ConstructionError> {
    let mut builder = MeshBuilder::new();
    let b = spec.base.map(|p| builder.push_vertex(p));
    let mut steps = Vec::new();
    attach_stacked_hat(&mut builder, b, spec, HatId(0), &mut steps)?;
    let mesh = builder.build()?;
    let n = (spec.base[1] - spec.base[0])
        .cross(spec.base[2] - spec.base[0])
        .normalized();
    validate_hat_geometry(&mesh, n)?;
    check_hat_curvature(&mesh)?;
    if !prism_containment(&mesh, spec.base) {
        return Err(ConstructionError::EmbeddingInvalid {
            detail: "stacked hat leaves its base prism".into(),
        });
    }
    let certificate = StackingCertificate {
        initial_faces: vec![b.map(VertexId)],
        steps,
    };
    certificate.verify(&mesh)?;
    Ok((mesh, certificate))
}

// ---------------------------------------------------------------------------
// Caltrop family (acute hats over a subdivided tetrahedron)
// ---------------------------------------------------------------------------

/// Regular tetrahedron with unit edges, outward-oriented, faces labeled as
/// base faces.
pub fn tetrahedron() -> SurfaceMesh {
    let positions = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
        Point3::new(0.5, 3f64.sqrt() / 6.0, (2f64 / 3.0).sqrt()),
    ];
    let faces = vec![[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]];
    let labels = vec![FaceLabel::base(); 4];
    SurfaceMesh::build(positions, faces, Some(labels)).expect("tetrahedron is valid")
}

const MAX_SUBDIVISION: u32 = 64;

/// Splits every face of the unit tetrahedron into a k × k triangular grid.
/// Counts: 2k² + 2 vertices, 6k² edges, 4k² faces.
pub fn subdivided_tetrahedron(k: u32) -> Result<SurfaceMesh, ConstructionError> {
    if k == 0 || k > MAX_SUBDIVISION {
        return Err(ConstructionError::BadParameter {
            detail: format!("subdivision must satisfy 1 ≤ k ≤ {MAX_SUBDIVISION}, got {k}"),
        });
    }
    let tet = tetrahedron();
    let mut positions: Vec<Point3> = tet.positions().to_vec();
    let mut faces: Vec<[u32; 3]> = Vec::new();

    // Shared grid points keyed so both sides of a tetrahedron edge agree:
    // corners are tet vertices, edge points are (min, max, steps-from-min).
    use std::collections::BTreeMap;
    let mut edge_points: BTreeMap<(u32, u32, u32), u32> = BTreeMap::new();
    let kk = k as usize;

    for f in tet.faces() {
        let [a, b, c] = tet.face(f).map(|v| v.0);
        let (pa, pb, pc) = (
            tet.position(VertexId(a)),
            tet.position(VertexId(b)),
            tet.position(VertexId(c)),
        );
        // grid[i][j] for i + j ≤ k: barycentric (i/k along ab, j/k along ac).
        let mut grid = vec![vec![0u32; kk + 1]; kk + 1];
        for i in 0..=kk {
            for j in 0..=(kk - i) {
                let id = if i == 0 && j == 0 {
                    a
                } else if i == kk {
                    b
                } else if j == kk {
                    c
                } else if j == 0 {
                    *edge_points
                        .entry(canon_edge_point(a, b, i as u32, k))
                        .or_insert_with(|| {
                            push_edge_point(&mut positions, a, b, i as u32, k)
                        })
                } else if i == 0 {
                    *edge_points
                        .entry(canon_edge_point(a, c, j as u32, k))
                        .or_insert_with(|| {
                            push_edge_point(&mut positions, a, c, j as u32, k)
                        })
                } else if i + j == kk {
                    *edge_points
                        .entry(canon_edge_point(b, c, j as u32, k))
                        .or_insert_with(|| {
                            push_edge_point(&mut positions, b, c, j as u32, k)
                        })
                } else {
                    // Interior grid point, owned by this face.
                    let t = 1.0 / k as f64;
                    let p = pa
                        + (pb - pa) * (i as f64 * t)
                        + (pc - pa) * (j as f64 * t);
                    positions.push(p);
                    (positions.len() - 1) as u32
                };
                grid[i][j] = id;
            }
        }
        for j in 0..kk {
            for i in 0..(kk - j) {
                faces.push([grid[i][j], grid[i + 1][j], grid[i][j + 1]]);
                if i + j + 2 <= kk {
                    faces.push([grid[i + 1][j], grid[i + 1][j + 1], grid[i][j + 1]]);
                }
            }
        }
    }
    let labels = vec![FaceLabel::base(); faces.len()];
    Ok(SurfaceMesh::build(positions, faces, Some(labels))?)
}

fn canon_edge_point(a: u32, b: u32, steps_from_a: u32, k: u32) -> (u32, u32, u32) {
    if a < b {
        (a, b, steps_from_a)
    } else {
        (b, a, k - steps_from_a)
    }
}

fn push_edge_point(positions: &mut Vec<Point3>, a: u32, b: u32, steps_from_a: u32, k: u32) -> u32 {
    let (lo, hi, steps) = canon_edge_point(a, b, steps_from_a, k);
    let (pl, ph) = (positions[lo as usize], positions[hi as usize]);
    let p = pl + (ph - pl) * (steps as f64 / k as f64);
    positions.push(p);
    (positions.len() - 1) as u32
}

/// Replaces every face of `base` with an acute hat (hat i over face i).
fn acute_hats_over(base: &SurfaceMesh) -> Result<SurfaceMesh, ConstructionError> {
    let mut builder = MeshBuilder::new();
    builder.positions = base.positions().to_vec();
    for f in base.faces() {
        let tri = base.face(f);
        attach_acute_hat(
            &mut builder,
            tri.map(|v| v.0),
            tri.map(|v| base.position(v)),
            HatId(f.0),
        )?;
    }
    Ok(builder.build()?)
}

/// The caltrop: a regular tetrahedron with an acute hat over each face.
/// 20 vertices, 54 edges, 36 faces; every edge unfolding self-overlaps.
pub fn caltrop() -> Result<SurfaceMesh, ConstructionError> {
    subdivided_caltrop(1)
}

/// The caltrop family member with grid parameter `k`: acute hats over every
/// face of the k-subdivided tetrahedron. 18k² + 2 vertices, 54k² edges,
/// 36k² faces; at least 2k² pieces in any valid unfolding.
pub fn subdivided_caltrop(k: u32) -> Result<SurfaceMesh, ConstructionError> {
    acute_hats_over(&subdivided_tetrahedron(k)?)
}

// ---------------------------------------------------------------------------
// Stacked family (stacked hats over a point-split tetrahedron)
// ---------------------------------------------------------------------------

const MAX_STACK_REFINE: u32 = 256;

/// Refines the unit tetrahedron by `k` point splits — each split lifts a new
/// vertex by 1% of the inradius over the first face's incenter — and
/// returns it with the replayable refinement certificate.
/// Counts: 4 + k vertices, 4 + 2k faces.
pub fn stacked_family_base(k: u32) -> Result<(SurfaceMesh, StackingCertificate), ConstructionError> {
    if k > MAX_STACK_REFINE {
        return Err(ConstructionError::BadParameter {
            detail: format!("refinement must satisfy k ≤ {MAX_STACK_REFINE}, got {k}"),
        });
    }
    let tet = tetrahedron();
    let mut positions: Vec<Point3> = tet.positions().to_vec();
    let mut faces: std::collections::VecDeque<[u32; 3]> =
        tet.faces().map(|f| tet.face(f).map(|v| v.0)).collect();
    let initial_faces: Vec<[VertexId; 3]> =
        faces.iter().map(|f| f.map(VertexId)).collect();
    let mut steps = Vec::new();

    for _ in 0..k {
        let face = faces.pop_front().expect("face list never empties");
        let tri = face.map(|i| positions[i as usize]);
        let n = (tri[1] - tri[0]).cross(tri[2] - tri[0]).normalized();
        let r = inradius(tri);
        let w = incenter(tri) + n * (0.01 * r);
        positions.push(w);
        let wid = (positions.len() - 1) as u32;
        steps.push(StackingStep {
            face: face.map(VertexId),
            apex: VertexId(wid),
            margin: 0.01 * r,
        });
        faces.push_back([face[0], face[1], wid]);
        faces.push_back([face[1], face[2], wid]);
        faces.push_back([face[2], face[0], wid]);
    }

    let face_vec: Vec<[u32; 3]> = faces.into_iter().collect();
    let labels = vec![FaceLabel::base(); face_vec.len()];
    let mesh = SurfaceMesh::build(positions, face_vec, Some(labels))?;
    let certificate = StackingCertificate {
        initial_faces,
        steps,
    };
    certificate.verify(&mesh)?;
    Ok((mesh, certificate))
}

/// The stacked family member with refinement parameter `k`: stacked hats
/// over every face of the k-times point-split tetrahedron, certificate
/// covering the whole construction. Any valid unfolding needs at least
/// 2 + k pieces.
pub fn stacked_family(k: u32) -> Result<(SurfaceMesh, StackingCertificate), ConstructionError> {
    let (base, base_cert) = stacked_family_base(k)?;
    let mut builder = MeshBuilder::new();
    builder.positions = base.positions().to_vec();
    let mut steps = base_cert.steps.clone();
    for f in base.faces() {
        let tri = base.face(f);
        let spec = StackedHatSpec::for_face(tri.map(|v| base.position(v)));
        attach_stacked_hat(&mut builder, tri.map(|v| v.0), &spec, HatId(f.0), &mut steps)?;
    }
    let mesh = builder.build()?;
    let certificate = StackingCertificate {
        initial_faces: base_cert.initial_faces,
        steps,
    };
    certificate.verify(&mesh)?;
    Ok((mesh, certificate))
}

// ---------------------------------------------------------------------------
// Control fixture
// ---------------------------------------------------------------------------

/// Flat control disk with the hat's combinatorics but zero curvature at all
/// four interior vertices: the flattened top view of the hat. Any dual
/// spanning tree develops it without overlap, which makes it a soundness
/// control for overlap checkers.
pub fn flat_control_disk() -> SurfaceMesh {
    let spec = AcuteHatSpec::default();
    let rho = spec.ring_edge_length() / 3f64.sqrt();
    let (gx, gy) = (0.5, 3f64.sqrt() / 6.0);
    let third = 2.0 * std::f64::consts::PI / 3.0;
    let phi = 270f64.to_radians();
    let mut positions = vec![
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(0.5, 3f64.sqrt() / 2.0, 0.0),
    ];
    for j in 0..3 {
        let a = phi + third * j as f64;
        positions.push(Point3::new(gx + rho * a.cos(), gy + rho * a.sin(), 0.0));
    }
    positions.push(Point3::new(gx, gy, 0.0));
    let faces = hat_faces([0, 1, 2], [3, 4, 5], 6, HatId(0))
        .map(|(f, _)| f)
        .to_vec();
    SurfaceMesh::build(positions, faces, None).expect("flat disk is valid")
}

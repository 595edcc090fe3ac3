//! File formats and drawings.
//!
//! Meshes travel as a minimal OBJ-style text file — `v x y z` and
//! `f i j k` lines (1-indexed) — with region labels riding in comment
//! lines of the form `# region <face> <label> <hat|->`, so importers that
//! skip comments still read the geometry. Floats are printed with Rust's
//! shortest round-trip formatting, which makes export → import → export
//! reproduce the file byte for byte.
//!
//! Cut sets travel as text lines `u v`, one cut edge per line by its
//! endpoint vertices (1-indexed). Reports serialize to pretty JSON with
//! struct-order keys. Developments render to SVG nets, one polygon per
//! face, pieces arranged on a grid.

use std::fmt::{self, Write as _};
use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::mesh::{FaceId, FaceLabel, HatId, MeshError, Point3, RegionLabel, SurfaceMesh};
use crate::unfold::{CutSet, Development, UnfoldError};

/// A malformed input file, located for the reader.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number.
    pub line: usize,
    /// 1-based column of the offending token.
    pub column: usize,
    pub detail: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.detail)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Cut(#[from] UnfoldError),
    #[error("report serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Non-whitespace runs of a line with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

fn parse_f64(line: usize, tok: (usize, &str)) -> Result<f64, ParseError> {
    tok.1.parse().map_err(|_| ParseError {
        line,
        column: tok.0,
        detail: format!("expected a number, found `{}`", tok.1),
    })
}

fn parse_index(line: usize, tok: (usize, &str), what: &str) -> Result<u32, ParseError> {
    let n: u32 = tok.1.parse().map_err(|_| ParseError {
        line,
        column: tok.0,
        detail: format!("expected a {what} index, found `{}`", tok.1),
    })?;
    if n == 0 {
        return Err(ParseError {
            line,
            column: tok.0,
            detail: format!("{what} indices are 1-based"),
        });
    }
    Ok(n)
}

// ---------------------------------------------------------------------------
// Mesh format
// ---------------------------------------------------------------------------

/// Renders the mesh in the text format. Vertices first, then faces, then
/// one `# region` line per face.
pub fn mesh_to_string(mesh: &SurfaceMesh) -> String {
    let mut out = String::new();
    for p in mesh.positions() {
        writeln!(out, "v {} {} {}", p.x, p.y, p.z).unwrap();
    }
    for f in mesh.faces() {
        let [a, b, c] = mesh.face(f);
        writeln!(out, "f {} {} {}", a.idx() + 1, b.idx() + 1, c.idx() + 1).unwrap();
    }
    for f in mesh.faces() {
        let label = mesh.label(f);
        let hat = match label.hat {
            Some(h) => h.idx().to_string(),
            None => "-".to_string(),
        };
        writeln!(out, "# region {} {} {}", f.idx() + 1, label.region, hat).unwrap();
    }
    out
}

pub fn export_mesh(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<(), IoError> {
    fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

/// Parses the text format and validates the result as a surface.
pub fn mesh_from_str(text: &str) -> Result<SurfaceMesh, IoError> {
    let mut positions: Vec<Point3> = Vec::new();
    let mut faces: Vec<[u32; 3]> = Vec::new();
    // Labels are resolved after every face line is known.
    let mut pending: Vec<(usize, usize, u32, FaceLabel)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(&(head_col, head)) = toks.first() else {
            continue;
        };
        match head {
            "v" => {
                if toks.len() != 4 {
                    return Err(ParseError {
                        line,
                        column: head_col,
                        detail: format!("`v` takes 3 coordinates, found {}", toks.len() - 1),
                    }
                    .into());
                }
                positions.push(Point3::new(
                    parse_f64(line, toks[1])?,
                    parse_f64(line, toks[2])?,
                    parse_f64(line, toks[3])?,
                ));
            }
            "f" => {
                if toks.len() != 4 {
                    return Err(ParseError {
                        line,
                        column: head_col,
                        detail: format!(
                            "`f` takes exactly 3 vertex indices, found {}",
                            toks.len() - 1
                        ),
                    }
                    .into());
                }
                faces.push([
                    parse_index(line, toks[1], "vertex")? - 1,
                    parse_index(line, toks[2], "vertex")? - 1,
                    parse_index(line, toks[3], "vertex")? - 1,
                ]);
            }
            "#" => {
                if toks.len() >= 2 && toks[1].1 == "region" {
                    pending.push(parse_region_line(line, &toks)?);
                }
                // Other comments are ignored.
            }
            _ => {
                return Err(ParseError {
                    line,
                    column: head_col,
                    detail: format!("unknown directive `{head}`"),
                }
                .into());
            }
        }
    }

    let mut labels = vec![FaceLabel::other(); faces.len()];
    for (line, column, face, label) in pending {
        let idx = face as usize - 1;
        if idx >= faces.len() {
            return Err(ParseError {
                line,
                column,
                detail: format!("region line names face {face}, but only {} exist", faces.len()),
            }
            .into());
        }
        labels[idx] = label;
    }
    Ok(SurfaceMesh::build(positions, faces, Some(labels))?)
}

fn parse_region_line(
    line: usize,
    toks: &[(usize, &str)],
) -> Result<(usize, usize, u32, FaceLabel), ParseError> {
    if toks.len() != 5 {
        return Err(ParseError {
            line,
            column: toks[0].0,
            detail: "region lines read `# region <face> <label> <hat|->`".into(),
        });
    }
    let face = parse_index(line, toks[2], "face")?;
    let region = match toks[3].1 {
        "brim" => RegionLabel::Brim,
        "band" => RegionLabel::Band,
        "crown" => RegionLabel::Crown,
        "base" => RegionLabel::Base,
        "other" => RegionLabel::Other,
        other => {
            return Err(ParseError {
                line,
                column: toks[3].0,
                detail: format!("unknown region label `{other}`"),
            })
        }
    };
    let hat = match toks[4].1 {
        "-" => None,
        digits => Some(HatId(digits.parse().map_err(|_| ParseError {
            line,
            column: toks[4].0,
            detail: format!("expected a hat number or `-`, found `{digits}`"),
        })?)),
    };
    Ok((line, toks[2].0, face, FaceLabel { region, hat }))
}

pub fn import_mesh(path: impl AsRef<Path>) -> Result<SurfaceMesh, IoError> {
    mesh_from_str(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Cut files
// ---------------------------------------------------------------------------

/// One line per cut edge: its endpoint vertices, 1-indexed, ascending.
pub fn cuts_to_string(mesh: &SurfaceMesh, cuts: &CutSet) -> String {
    let mut out = String::new();
    for e in cuts.edges() {
        let (u, v) = mesh.edge(e).vertices;
        writeln!(out, "{} {}", u.idx() + 1, v.idx() + 1).unwrap();
    }
    out
}

pub fn export_cuts(
    mesh: &SurfaceMesh,
    cuts: &CutSet,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    fs::write(path, cuts_to_string(mesh, cuts))?;
    Ok(())
}

pub fn cuts_from_str(mesh: &SurfaceMesh, text: &str) -> Result<CutSet, IoError> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let toks = tokens(raw);
        let Some(&(head_col, head)) = toks.first() else {
            continue;
        };
        if head == "#" {
            continue;
        }
        if toks.len() != 2 {
            return Err(ParseError {
                line,
                column: head_col,
                detail: format!("cut lines read `u v`, found {} tokens", toks.len()),
            }
            .into());
        }
        let u = parse_index(line, toks[0], "vertex")? as usize - 1;
        let v = parse_index(line, toks[1], "vertex")? as usize - 1;
        if u >= mesh.vertex_count() || v >= mesh.vertex_count() {
            return Err(ParseError {
                line,
                column: head_col,
                detail: format!("vertex out of range; the mesh has {}", mesh.vertex_count()),
            }
            .into());
        }
        let (u, v) = (
            crate::mesh::VertexId(u as u32),
            crate::mesh::VertexId(v as u32),
        );
        let Some(e) = mesh.edge_between(u, v) else {
            return Err(ParseError {
                line,
                column: head_col,
                detail: format!("no edge joins vertices {} and {}", u.idx() + 1, v.idx() + 1),
            }
            .into());
        };
        if mesh.edge(e).is_boundary() {
            return Err(ParseError {
                line,
                column: head_col,
                detail: format!(
                    "edge {} {} lies on the mesh boundary and cannot be cut",
                    u.idx() + 1,
                    v.idx() + 1
                ),
            }
            .into());
        }
        edges.push(e);
    }
    Ok(CutSet::from_edges(mesh, edges)?)
}

pub fn import_cuts(mesh: &SurfaceMesh, path: impl AsRef<Path>) -> Result<CutSet, IoError> {
    cuts_from_str(mesh, &fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// JSON reports
// ---------------------------------------------------------------------------

/// Pretty JSON with a trailing newline. Key order is struct order, so the
/// same report always produces the same bytes.
pub fn report_to_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn write_report<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<(), IoError> {
    fs::write(path, report_to_json(value)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// SVG nets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SvgOptions {
    /// Pixels per model unit.
    pub scale: f64,
    /// Space between grid cells, in model units.
    pub gap: f64,
    /// Page margin, in model units.
    pub margin: f64,
    /// Base stroke width in pixels.
    pub stroke_width: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions {
            scale: 240.0,
            gap: 0.2,
            margin: 0.1,
            stroke_width: 1.0,
        }
    }
}

fn region_fill(region: RegionLabel) -> &'static str {
    match region {
        RegionLabel::Brim => "#7aa6d6",  // blue
        RegionLabel::Band => "#f0cf65",  // yellow
        RegionLabel::Crown => "#eeaabf", // pink
        RegionLabel::Base => "#d8d8d8",
        RegionLabel::Other => "#e8e4da",
    }
}

/// Grid placement: translation to add to each piece so pieces sit in
/// row-major cells sized by the largest piece plus the gap.
fn grid_offsets(dev: &Development, gap: f64, margin: f64) -> (Vec<(f64, f64)>, f64, f64) {
    let n = dev.piece_count().max(1);
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let mut cell_w = 0f64;
    let mut cell_h = 0f64;
    for piece in dev.pieces() {
        let (lo, hi) = piece.bounds();
        cell_w = cell_w.max(hi.x - lo.x);
        cell_h = cell_h.max(hi.y - lo.y);
    }
    let offsets = dev
        .pieces()
        .iter()
        .enumerate()
        .map(|(i, piece)| {
            let (lo, _) = piece.bounds();
            let col = (i % cols) as f64;
            let row = (i / cols) as f64;
            (
                margin + col * (cell_w + gap) - lo.x,
                margin + row * (cell_h + gap) - lo.y,
            )
        })
        .collect();
    let width = 2.0 * margin + cols as f64 * cell_w + (cols - 1) as f64 * gap;
    let height = 2.0 * margin + rows as f64 * cell_h + (rows - 1) as f64 * gap;
    (offsets, width, height)
}

/// Renders the development as an SVG net.
///
/// Coordinates are the development's, mapped by a uniform scale and a
/// per-piece translation, with y flipped into screen orientation:
/// `x_px = (x + dx)·scale`, `y_px = (height − y − dy)·scale`. Faces fill
/// with their region color; cut edges of the source mesh are dashed; faces
/// named in `highlight` get a red outline.
pub fn svg_net(
    mesh: &SurfaceMesh,
    dev: &Development,
    cuts: &CutSet,
    highlight: &[(FaceId, FaceId)],
    options: &SvgOptions,
) -> String {
    let (offsets, width, height) = grid_offsets(dev, options.gap, options.margin);
    let s = options.scale;
    let px = |x: f64, dx: f64| (x + dx) * s;
    let py = |y: f64, dy: f64| (height - y - dy) * s;

    let hot: std::collections::BTreeSet<FaceId> = highlight
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect();

    let mut out = String::new();
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        width * s,
        height * s,
        width * s,
        height * s
    )
    .unwrap();
    for (piece, &(dx, dy)) in dev.pieces().iter().zip(&offsets) {
        writeln!(out, "<g>").unwrap();
        for &(face, corners) in piece.placed() {
            let pts = corners
                .iter()
                .map(|p| format!("{},{}", px(p.x, dx), py(p.y, dy)))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(
                out,
                "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.75\" stroke=\"#444444\" stroke-width=\"{}\"/>",
                pts,
                region_fill(mesh.label(face).region),
                options.stroke_width
            )
            .unwrap();
        }
        // Cut edges, dashed over the fills.
        for &(face, corners) in piece.placed() {
            let edges = mesh.face_edge_ids(face);
            for k in 0..3 {
                if !cuts.contains(edges[k]) {
                    continue;
                }
                let a = corners[k];
                let b = corners[(k + 1) % 3];
                writeln!(
                    out,
                    "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#222222\" stroke-width=\"{}\" stroke-dasharray=\"6 4\"/>",
                    px(a.x, dx),
                    py(a.y, dy),
                    px(b.x, dx),
                    py(b.y, dy),
                    options.stroke_width
                )
                .unwrap();
            }
        }
        for &(face, corners) in piece.placed() {
            if !hot.contains(&face) {
                continue;
            }
            let pts = corners
                .iter()
                .map(|p| format!("{},{}", px(p.x, dx), py(p.y, dy)))
                .collect::<Vec<_>>()
                .join(" ");
            writeln!(
                out,
                "<polygon points=\"{}\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"{}\"/>",
                pts,
                2.0 * options.stroke_width
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

pub fn export_svg(
    mesh: &SurfaceMesh,
    dev: &Development,
    cuts: &CutSet,
    highlight: &[(FaceId, FaceId)],
    options: &SvgOptions,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    fs::write(path, svg_net(mesh, dev, cuts, highlight, options))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{acute_hat, caltrop, tetrahedron};
    use crate::predicates::{placed_overlap_report, Mode};
    use crate::unfold::develop;

    #[test]
    fn tetrahedron_round_trips_exactly() {
        let m = tetrahedron();
        let text = mesh_to_string(&m);
        let back = mesh_from_str(&text).unwrap();
        assert_eq!(text, mesh_to_string(&back), "re-export must be byte-identical");
        assert_eq!(back.face_count(), m.face_count());
        for f in m.faces() {
            assert_eq!(m.face(f), back.face(f));
            assert_eq!(m.label(f), back.label(f));
        }
        for (p, q) in m.positions().iter().zip(back.positions()) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
            assert_eq!(p.z.to_bits(), q.z.to_bits());
        }
    }

    #[test]
    fn caltrop_file_has_expected_line_counts() {
        let m = caltrop().unwrap();
        let text = mesh_to_string(&m);
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 20);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 36);
        assert_eq!(
            text.lines().filter(|l| l.starts_with("# region ")).count(),
            36
        );
        let back = mesh_from_str(&text).unwrap();
        assert_eq!(back.hat_ids().len(), 4);
        assert_eq!(mesh_to_string(&back), text);
    }

    #[test]
    fn irrational_coordinates_round_trip_bit_identically() {
        let (m, _) = acute_hat().unwrap();
        let text = mesh_to_string(&m);
        let back = mesh_from_str(&text).unwrap();
        for (p, q) in m.positions().iter().zip(back.positions()) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
            assert_eq!(p.z.to_bits(), q.z.to_bits());
        }
        assert_eq!(text, mesh_to_string(&back));
    }

    #[test]
    fn short_face_line_is_a_parse_error() {
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2\n";
        match mesh_from_str(text) {
            Err(IoError::Parse(e)) => {
                assert_eq!(e.line, 4);
                assert_eq!(e.column, 1);
                assert!(e.detail.contains("3 vertex indices"));
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn bad_number_is_located() {
        let text = "v 0 zero 0\n";
        match mesh_from_str(text) {
            Err(IoError::Parse(e)) => {
                assert_eq!((e.line, e.column), (1, 5));
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn zero_index_and_bad_region_are_rejected() {
        assert!(matches!(
            mesh_from_str("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n"),
            Err(IoError::Parse(_))
        ));
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n# region 1 roof -\n";
        assert!(matches!(mesh_from_str(text), Err(IoError::Parse(_))));
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n# region 2 brim 0\n";
        assert!(matches!(mesh_from_str(text), Err(IoError::Parse(_))));
    }

    #[test]
    fn unknown_directive_is_rejected_but_comments_pass() {
        assert!(matches!(
            mesh_from_str("vt 0 0\n"),
            Err(IoError::Parse(_))
        ));
        let text = "# made by hand\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
        assert!(mesh_from_str(text).is_ok());
    }

    #[test]
    fn degenerate_geometry_is_a_mesh_error_not_a_parse_error() {
        let text = "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n";
        assert!(matches!(mesh_from_str(text), Err(IoError::Mesh(_))));
    }

    #[test]
    fn cut_files_round_trip() {
        let m = caltrop().unwrap();
        let edges: Vec<_> = m.edge_ids().take(5).collect();
        let cuts = CutSet::from_edges(&m, edges).unwrap();
        let text = cuts_to_string(&m, &cuts);
        assert_eq!(text.lines().count(), 5);
        let back = cuts_from_str(&m, &text).unwrap();
        assert_eq!(
            cuts.edges().collect::<Vec<_>>(),
            back.edges().collect::<Vec<_>>()
        );
    }

    #[test]
    fn cut_file_errors_are_located() {
        let m = caltrop().unwrap();
        match cuts_from_str(&m, "1 2\n1 99\n") {
            Err(IoError::Parse(e)) => assert_eq!(e.line, 2),
            other => panic!("expected a parse error, got {other:?}"),
        }
        // Vertices that exist but share no edge.
        let missing = (1..=m.vertex_count() as u32)
            .flat_map(|u| (u + 1..=m.vertex_count() as u32).map(move |v| (u, v)))
            .find(|&(u, v)| {
                m.edge_between(
                    crate::mesh::VertexId(u - 1),
                    crate::mesh::VertexId(v - 1),
                )
                .is_none()
            })
            .unwrap();
        let text = format!("{} {}\n", missing.0, missing.1);
        assert!(matches!(cuts_from_str(&m, &text), Err(IoError::Parse(_))));
    }

    #[test]
    fn single_triangle_net_has_one_polygon() {
        let m = SurfaceMesh::build(
            vec![
                Point3::new(0.0, 0.0, 0.0),
                Point3::new(1.0, 0.0, 0.0),
                Point3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
            None,
        )
        .unwrap();
        let dev = develop(&m, &CutSet::empty()).unwrap();
        let svg = svg_net(&m, &dev, &CutSet::empty(), &[], &SvgOptions::default());
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert!(svg.starts_with("<svg "));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn overlapping_hat_net_highlights_the_pair() {
        let (m, _) = acute_hat().unwrap();
        let sig = crate::unfold::hat_signature(&m).unwrap();
        // Cut some center path and develop the single piece.
        let census = crate::verify::enumerate_center_paths(&m).unwrap();
        let cuts = census.paths[0].clone();
        assert!(crate::unfold::center_path_filter(&m, &sig, &cuts));
        let dev = develop(&m, &cuts).unwrap();
        assert_eq!(dev.piece_count(), 1);
        let report = placed_overlap_report(dev.pieces()[0].placed(), Mode::Interval).unwrap();
        assert!(report.has_overlap());
        let pairs: Vec<(FaceId, FaceId)> = report.pairs.iter().map(|p| p.faces).collect();
        let svg = svg_net(&m, &dev, &cuts, &pairs, &SvgOptions::default());
        // 9 face polygons plus one red outline per highlighted face.
        let hot: std::collections::BTreeSet<FaceId> =
            pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        assert_eq!(svg.matches("<polygon").count(), 9 + hot.len());
        assert!(svg.contains("#d62728"));
        assert!(svg.contains("stroke-dasharray"), "cut edges render dashed");
    }

    #[test]
    fn pieces_land_in_separated_grid_cells() {
        let m = caltrop().unwrap();
        // A vertex spanning tree opens the surface into one flat piece;
        // one extra cut splits the development into exactly two.
        let mut uf = crate::mesh::UnionFind::new(m.vertex_count());
        let mut chosen = Vec::new();
        let mut extra = None;
        for e in m.edge_ids() {
            let (u, v) = m.edge(e).vertices;
            if uf.find(u.idx()) != uf.find(v.idx()) {
                uf.union(u.idx(), v.idx());
                chosen.push(e);
            } else if extra.is_none() {
                extra = Some(e);
            }
        }
        chosen.push(extra.unwrap());
        let cuts = CutSet::from_edges(&m, chosen).unwrap();
        let dev = develop(&m, &cuts).unwrap();
        assert_eq!(dev.piece_count(), 2);
        let opts = SvgOptions::default();
        let (offsets, width, height) = grid_offsets(&dev, opts.gap, opts.margin);
        assert_eq!(offsets.len(), 2);
        // Both pieces inside the page, separated by at least the gap.
        let mut spans = Vec::new();
        for (piece, &(dx, dy)) in dev.pieces().iter().zip(&offsets) {
            let (lo, hi) = piece.bounds();
            assert!(lo.x + dx >= 0.0 && hi.x + dx <= width + 1e-9);
            assert!(lo.y + dy >= 0.0 && hi.y + dy <= height + 1e-9);
            spans.push((lo.x + dx, hi.x + dx));
        }
        assert!(
            spans[1].0 - spans[0].1 >= opts.gap - 1e-9,
            "cells must leave the configured gap"
        );
    }

    #[test]
    fn json_reports_have_schema_version_and_stable_bytes() {
        let (m, _) = acute_hat().unwrap();
        let report = crate::verify::verify_hat_no_single_piece(&m, Mode::Interval, 2).unwrap();
        let a = report_to_json(&report).unwrap();
        assert!(a.contains("\"schema_version\": 1"));
        let again = crate::verify::verify_hat_no_single_piece(&m, Mode::Interval, 1).unwrap();
        let b = report_to_json(&again).unwrap();
        assert_eq!(a, b);
    }
}

//! Command-line front end: generate the constructions, inspect curvature,
//! unfold cut sets to SVG nets, and run the exhaustive verifier.
//!
//! Exit codes: 0 success (and, for `verify-hat`, conclusion true); 2 when
//! the verifier concludes a single-piece unfolding exists; 1 on errors;
//! 64 on usage errors.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ununfold::constructions;
use ununfold::io::{
    export_mesh, export_svg, import_cuts, import_mesh, report_to_json, write_report, SvgOptions,
};
use ununfold::predicates::{placed_overlap_report, Mode};
use ununfold::unfold::{develop, CutSet};
use ununfold::verify;
use ununfold::{SurfaceMesh, VertexId};

#[derive(Parser)]
#[command(
    name = "ununfold",
    version,
    about = "Construct, unfold, and certify edge-ununfoldable polyhedra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one of the built-in constructions to a mesh file.
    Generate {
        #[command(subcommand)]
        shape: Shape,
    },
    /// Print the angle sum and deficit of every vertex.
    Curvature { file: PathBuf },
    /// Cut the mesh, develop the pieces, and render an SVG net.
    Unfold {
        file: PathBuf,
        /// Cut file: one `u v` vertex pair per line, 1-indexed.
        #[arg(long)]
        cuts: PathBuf,
        /// Where to write the net.
        #[arg(long)]
        svg: PathBuf,
        /// Overlap arithmetic (default: $UNUNFOLD_PRECISION or interval).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Develop every dual spanning tree and certify each one overlaps.
    VerifyHat {
        file: PathBuf,
        /// Overlap arithmetic (default: $UNUNFOLD_PRECISION or interval).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Worker threads for the tree sweep.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// List every boundary-to-center cut path and its symmetry class.
    EnumeratePaths { file: PathBuf },
    /// Print the proven piece lower bound for a family member.
    LowerBound {
        #[command(subcommand)]
        family: FamilyArg,
    },
    /// Classify a cut set hat by hat and report the audit as JSON.
    Audit {
        file: PathBuf,
        /// Cut file: one `u v` vertex pair per line, 1-indexed.
        #[arg(long)]
        cuts: PathBuf,
        /// Overlap arithmetic (default: $UNUNFOLD_PRECISION or interval).
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
}

#[derive(Subcommand)]
enum Shape {
    /// One acute-triangle hat over a unit equilateral boundary.
    AcuteHat {
        #[arg(long)]
        out: PathBuf,
    },
    /// One stacked hat (three point-splits and a crown apex).
    StackedHat {
        #[arg(long)]
        out: PathBuf,
    },
    /// Tetrahedron with a hat over every face.
    Caltrop {
        #[arg(long)]
        out: PathBuf,
    },
    /// Caltrop over the k-subdivided tetrahedron: 4k² hats.
    Subdivided {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stacked hats over a k-times point-split tetrahedron: 4+2k hats.
    Stacked {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum FamilyArg {
    /// Acute hats over the k-subdivided tetrahedron (bound 2k²).
    Subdivided {
        #[arg(long)]
        k: u32,
    },
    /// Stacked hats over the k-times point-split tetrahedron (bound k+2).
    Stacked {
        #[arg(long)]
        k: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Float,
    Interval,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Float => Mode::Float,
            ModeArg::Interval => Mode::Interval,
        }
    }
}

fn mode_of(arg: Option<ModeArg>) -> Mode {
    arg.map(Mode::from).unwrap_or_else(Mode::from_env)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Generate { shape } => generate(shape),
        Command::Curvature { file } => curvature(&file),
        Command::Unfold {
            file,
            cuts,
            svg,
            mode,
        } => unfold(&file, &cuts, &svg, mode_of(mode)),
        Command::VerifyHat {
            file,
            mode,
            report,
            jobs,
        } => verify_hat(&file, mode_of(mode), report.as_deref(), jobs.max(1)),
        Command::EnumeratePaths { file } => enumerate_paths(&file),
        Command::LowerBound { family } => {
            let bound = match family {
                FamilyArg::Subdivided { k } => {
                    verify::piece_lower_bound(verify::Family::SubdividedCaltrop, k)?
                }
                FamilyArg::Stacked { k } => {
                    verify::piece_lower_bound(verify::Family::StackedFamily, k)?
                }
            };
            println!("{bound}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Audit { file, cuts, mode } => audit(&file, &cuts, mode_of(mode)),
    }
}

fn generate(shape: Shape) -> anyhow::Result<ExitCode> {
    let (mesh, out, extra) = match shape {
        Shape::AcuteHat { out } => {
            let (mesh, diag) = constructions::acute_hat()?;
            let note = format!(
                "embedding residual {:.2e}, max edge error {:.2e}",
                diag.residual, diag.max_edge_relative_error
            );
            (mesh, out, note)
        }
        Shape::StackedHat { out } => {
            let (mesh, cert) = constructions::stacked_hat()?;
            (mesh, out, format!("stacking certificate: {} steps", cert.steps.len()))
        }
        Shape::Caltrop { out } => (constructions::caltrop()?, out, String::new()),
        Shape::Subdivided { k, out } => {
            let mesh = constructions::subdivided_caltrop(k)?;
            let note = format!("{} hats", mesh.hat_ids().len());
            (mesh, out, note)
        }
        Shape::Stacked { k, out } => {
            let (mesh, cert) = constructions::stacked_family(k)?;
            let note = format!(
                "{} hats, stacking certificate: {} steps",
                mesh.hat_ids().len(),
                cert.steps.len()
            );
            (mesh, out, note)
        }
    };
    export_mesh(&mesh, &out)?;
    let suffix = if extra.is_empty() {
        String::new()
    } else {
        format!(" ({extra})")
    };
    println!(
        "wrote {}: {} vertices, {} edges, {} faces{}",
        out.display(),
        mesh.vertex_count(),
        mesh.edge_count(),
        mesh.face_count(),
        suffix
    );
    Ok(ExitCode::SUCCESS)
}

fn curvature(file: &std::path::Path) -> anyhow::Result<ExitCode> {
    let mesh = import_mesh(file)?;
    let report = mesh.curvature_report();
    for entry in &report.entries {
        match entry.deficit_deg {
            Some(d) => println!(
                "vertex {}: angle sum {:.6}°, deficit {:.6}°",
                entry.vertex.idx() + 1,
                entry.angle_sum_deg,
                d
            ),
            None => println!(
                "vertex {}: boundary, angle sum {:.6}°",
                entry.vertex.idx() + 1,
                entry.angle_sum_deg
            ),
        }
    }
    println!(
        "total deficit {:.6}° ({} negative, {} positive, {} flat interior)",
        report.total_deficit_deg(),
        report.negative_vertices().len(),
        report.positive_vertices().len(),
        report.flat_vertices().len()
    );
    Ok(ExitCode::SUCCESS)
}

fn unfold(
    file: &std::path::Path,
    cut_file: &std::path::Path,
    svg: &std::path::Path,
    mode: Mode,
) -> anyhow::Result<ExitCode> {
    let mesh = import_mesh(file)?;
    let cuts = import_cuts(&mesh, cut_file)?;
    let dev = develop(&mesh, &cuts)?;
    let mut highlight = Vec::new();
    let mut slivers = 0usize;
    for piece in dev.pieces() {
        let report = placed_overlap_report(piece.placed(), mode)?;
        for pair in &report.pairs {
            if verify::decisive(pair, mode) {
                highlight.push(pair.faces);
            } else {
                slivers += 1;
            }
        }
    }
    export_svg(&mesh, &dev, &cuts, &highlight, &SvgOptions::default(), svg)?;
    println!(
        "pieces: {}, faces: {}, overlapping pairs: {} ({} below threshold); wrote {}",
        dev.piece_count(),
        dev.total_face_count(),
        highlight.len(),
        slivers,
        svg.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn verify_hat(
    file: &std::path::Path,
    mode: Mode,
    report_path: Option<&std::path::Path>,
    jobs: usize,
) -> anyhow::Result<ExitCode> {
    let mesh = import_mesh(file)?;
    let report = verify::verify_hat_no_single_piece(&mesh, mode, jobs)?;
    eprintln!("swept {} trees in {:.2?}", report.trees_total, report.wall_time);
    println!(
        "mode {}: {} dual spanning trees, {} with a decisive overlap, {} cut by center paths",
        report.mode, report.trees_total, report.trees_with_overlap, report.path_cut_trees
    );
    if let Some(margin) = report.bottleneck_margin {
        println!("weakest overlap area {margin:.6e}");
    }
    println!(
        "conclusion: {}",
        if report.no_single_piece_unfolding {
            "no single-piece unfolding exists"
        } else {
            "a development without decisive overlap was found"
        }
    );
    if let Some(path) = report_path {
        write_report(&report, path)?;
        println!("wrote {}", path.display());
    }
    Ok(if report.no_single_piece_unfolding {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn enumerate_paths(file: &std::path::Path) -> anyhow::Result<ExitCode> {
    let mesh = import_mesh(file)?;
    let census = verify::enumerate_center_paths(&mesh)?;
    let class_of: BTreeMap<usize, usize> = census
        .classes
        .iter()
        .enumerate()
        .flat_map(|(c, members)| members.iter().map(move |&i| (i, c)))
        .collect();
    for (i, path) in census.paths.iter().enumerate() {
        let chain = chain_of(&mesh, path)
            .iter()
            .map(|v| (v.idx() + 1).to_string())
            .collect::<Vec<_>>()
            .join("-");
        println!("path {}: {} (class {})", i + 1, chain, class_of[&i] + 1);
    }
    println!(
        "{} paths in {} symmetry classes (automorphism group order {})",
        census.paths.len(),
        census.classes.len(),
        census.automorphisms
    );
    Ok(ExitCode::SUCCESS)
}

/// Vertex order of a path-shaped cut set, starting from its boundary end.
fn chain_of(mesh: &SurfaceMesh, cuts: &CutSet) -> Vec<VertexId> {
    let mut adjacency: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for e in cuts.edges() {
        let (u, v) = mesh.edge(e).vertices;
        adjacency.entry(u).or_default().push(v);
        adjacency.entry(v).or_default().push(u);
    }
    let Some(start) = adjacency
        .iter()
        .filter(|(v, n)| n.len() == 1 && mesh.is_boundary_vertex(**v))
        .map(|(v, _)| *v)
        .min()
    else {
        return adjacency.keys().copied().collect();
    };
    let mut chain = vec![start];
    let mut prev = None;
    let mut here = start;
    loop {
        let next = adjacency[&here].iter().copied().find(|&w| Some(w) != prev);
        match next {
            Some(w) => {
                chain.push(w);
                prev = Some(here);
                here = w;
                if adjacency[&here].len() == 1 {
                    break;
                }
            }
            None => break,
        }
    }
    chain
}

fn audit(
    file: &std::path::Path,
    cut_file: &std::path::Path,
    mode: Mode,
) -> anyhow::Result<ExitCode> {
    let mesh = import_mesh(file)?;
    let cuts = import_cuts(&mesh, cut_file)?;
    let report = verify::audit_cut_set(&mesh, &cuts, mode)?;
    print!("{}", report_to_json(&report)?);
    Ok(ExitCode::SUCCESS)
}

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ununfold"))
}

/// Scratch directory, removed on drop; one per test so they can run in
/// parallel.
struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Scratch {
        let dir = std::env::temp_dir().join(format!("ununfold-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn generate_then_curvature_reads_the_caltrop() {
    let tmp = Scratch::new("curvature");
    let mesh = tmp.file("c.obj");
    let out = bin()
        .args(["generate", "caltrop", "--out"])
        .arg(&mesh)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("20 vertices, 54 edges, 36 faces"));

    let out = bin().arg("curvature").arg(&mesh).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let negative = text.lines().filter(|l| l.contains("deficit -")).count();
    assert_eq!(negative, 12, "three shoulder vertices per hat:\n{text}");
    assert!(text.contains("total deficit 720.000000°"));
    assert!(text.contains("12 negative, 8 positive"));
}

#[test]
fn lower_bound_prints_the_formulas() {
    for (family, k, expected) in [
        ("subdivided", "3", "18"),
        ("subdivided", "1", "2"),
        ("stacked", "0", "2"),
        ("stacked", "3", "5"),
    ] {
        let out = bin()
            .args(["lower-bound", family, "--k", k])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(stdout(&out).trim(), expected);
    }
    let out = bin()
        .args(["lower-bound", "subdivided", "--k", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "k = 0 has no subdivided member");
}

#[test]
fn verify_hat_concludes_and_reports_deterministically() {
    let tmp = Scratch::new("verify");
    let mesh = tmp.file("hat.obj");
    let status = bin()
        .args(["generate", "acute-hat", "--out"])
        .arg(&mesh)
        .output()
        .unwrap();
    assert!(status.status.success());

    let (r1, r2) = (tmp.file("r1.json"), tmp.file("r2.json"));
    let out = bin()
        .arg("verify-hat")
        .arg(&mesh)
        .args(["--mode", "interval", "--jobs", "2", "--report"])
        .arg(&r1)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "conclusion true exits 0: {out:?}");
    assert!(stdout(&out).contains("216 dual spanning trees"));
    assert!(stdout(&out).contains("no single-piece unfolding exists"));

    let out = bin()
        .arg("verify-hat")
        .arg(&mesh)
        .args(["--mode", "interval", "--jobs", "1", "--report"])
        .arg(&r2)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (a, b) = (fs::read(&r1).unwrap(), fs::read(&r2).unwrap());
    assert_eq!(a, b, "reports must be byte-identical across runs and jobs");
    let json = String::from_utf8(a).unwrap();
    assert!(json.contains("\"no_single_piece_unfolding\": true"));
    assert!(json.contains("\"schema_version\": 1"));
}

#[test]
fn verify_hat_exits_two_when_an_unfolding_exists() {
    let tmp = Scratch::new("flat");
    let mesh = tmp.file("flat.obj");
    ununfold::io::export_mesh(&ununfold::constructions::flat_control_disk(), &mesh).unwrap();
    let out = bin()
        .arg("verify-hat")
        .arg(&mesh)
        .args(["--mode", "interval"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(stdout(&out).contains("development without decisive overlap"));
}

#[test]
fn precision_env_var_sets_the_default_mode() {
    let tmp = Scratch::new("envmode");
    let mesh = tmp.file("hat.obj");
    assert!(bin()
        .args(["generate", "acute-hat", "--out"])
        .arg(&mesh)
        .output()
        .unwrap()
        .status
        .success());
    let out = bin()
        .arg("verify-hat")
        .arg(&mesh)
        .env("UNUNFOLD_PRECISION", "float")
        .output()
        .unwrap();
    assert!(stdout(&out).starts_with("mode float:"), "{out:?}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn unfold_renders_a_net_with_the_overlap_highlighted() {
    let tmp = Scratch::new("unfold");
    let mesh = tmp.file("hat.obj");
    assert!(bin()
        .args(["generate", "acute-hat", "--out"])
        .arg(&mesh)
        .output()
        .unwrap()
        .status
        .success());
    // Corner → the three shoulders → center, in file numbering.
    let cuts = tmp.file("path.cut");
    fs::write(&cuts, "1 4\n4 5\n5 6\n6 7\n").unwrap();
    let svg = tmp.file("net.svg");
    let out = bin()
        .arg("unfold")
        .arg(&mesh)
        .arg("--cuts")
        .arg(&cuts)
        .arg("--svg")
        .arg(&svg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("pieces: 1, faces: 9"));
    let net = fs::read_to_string(&svg).unwrap();
    assert!(net.matches("<polygon").count() > 9, "overlap outlines drawn");
    assert!(net.contains("stroke-dasharray"), "cut edges dashed");
}

#[test]
fn enumerate_paths_lists_the_census() {
    let tmp = Scratch::new("census");
    let mesh = tmp.file("hat.obj");
    assert!(bin()
        .args(["generate", "acute-hat", "--out"])
        .arg(&mesh)
        .output()
        .unwrap()
        .status
        .success());
    let out = bin().arg("enumerate-paths").arg(&mesh).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("path ")).count(), 12);
    assert!(text.contains("12 paths in 2 symmetry classes (automorphism group order 6)"));
}

#[test]
fn audit_emits_json_with_the_family_bound() {
    let tmp = Scratch::new("audit");
    let mesh = tmp.file("c.obj");
    assert!(bin()
        .args(["generate", "caltrop", "--out"])
        .arg(&mesh)
        .output()
        .unwrap()
        .status
        .success());
    let cuts = tmp.file("empty.cut");
    fs::write(&cuts, "").unwrap();
    let out = bin()
        .arg("audit")
        .arg(&mesh)
        .arg("--cuts")
        .arg(&cuts)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let json = stdout(&out);
    assert!(json.contains("\"is_valid_unfolding\": false"));
    assert!(json.contains("\"lower_bound\": 2"));
}

#[test]
fn stacked_generators_report_their_certificates() {
    let tmp = Scratch::new("stacked");
    let out = bin()
        .args(["generate", "stacked-hat", "--out"])
        .arg(tmp.file("s.obj"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("stacking certificate: 4 steps"));

    let out = bin()
        .args(["generate", "stacked", "--k", "2", "--out"])
        .arg(tmp.file("f.obj"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    // 4+2k = 8 hats, k base splits + 4 gluings per hat.
    assert!(stdout(&out).contains("8 hats"));
    assert!(stdout(&out).contains("34 steps"));
}

#[test]
fn usage_errors_exit_sixty_four() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(64));
    let out = bin().args(["generate", "caltrop"]).output().unwrap();
    assert_eq!(out.status.code(), Some(64), "--out is required");
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "help is not an error");
}

#[test]
fn runtime_errors_exit_one() {
    let out = bin()
        .args(["curvature", "/nonexistent/mesh.obj"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let tmp = Scratch::new("badcut");
    let mesh = tmp.file("hat.obj");
    assert!(bin()
        .args(["generate", "acute-hat", "--out"])
        .arg(&mesh)
        .output()
        .unwrap()
        .status
        .success());
    let cuts = tmp.file("bad.cut");
    fs::write(&cuts, "1 2 3\n").unwrap();
    let out = bin()
        .arg("unfold")
        .arg(&mesh)
        .arg("--cuts")
        .arg(&cuts)
        .arg("--svg")
        .arg(tmp.file("x.svg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("line 1"), "parse errors carry a location: {err}");
}

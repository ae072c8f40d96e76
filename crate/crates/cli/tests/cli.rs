use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gifs_core::render::read_pgm;

fn gifs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gifs")).args(args).output().unwrap()
}

fn system(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("systems")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const EXPANDING: &str = r#"
dimension = 1
order = 1
[[maps]]
matrices = [[[1.5]]]
translation = [0.0]
"#;

#[test]
fn validate_reports_contractivity() {
    let o = gifs(&["validate", "--config", &system("f_pair.toml")]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("order 2"), "{text}");
    assert!(text.contains("contractive"), "{text}");
}

#[test]
fn strict_validation_rejects_expanding_maps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", EXPANDING);
    assert_eq!(code(&gifs(&["validate", "--config", &cfg])), 0);
    assert_eq!(code(&gifs(&["validate", "--config", &cfg, "--strict"])), 1);
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(code(&gifs(&["render"])), 1);
    assert_eq!(code(&gifs(&["frobnicate"])), 1);
    assert_eq!(code(&gifs(&["validate", "--config", "/nonexistent/system.toml"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "typo.toml", "dimension = 2\norder = 1\nmapz = []\n");
    assert_eq!(code(&gifs(&["validate", "--config", &cfg])), 1);
    assert_eq!(code(&gifs(&["--help"])), 0);
}

#[test]
fn oversized_table_request_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.pgm");
    let o = gifs(&[
        "render",
        "--config",
        &system("h_triple.toml"),
        "--algorithm",
        "affine-full",
        "--depth",
        "6",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!out.exists());
}

#[test]
fn compare_threshold_sets_exit_status() {
    let cfg = system("f_pair.toml");
    let base = ["compare", "--config", &cfg, "--algorithm", "deterministic-simplified", "--depth", "8"];
    let mut pass = base.to_vec();
    pass.extend(["--against", "affine-shortcut", "--against-depth", "5", "--threshold", "0.05"]);
    let o = gifs(&pass);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let mut fail = base.to_vec();
    fail.extend(["--against", "affine-shortcut", "--against-depth", "1", "--threshold", "0.01"]);
    assert_eq!(code(&gifs(&fail)), 2);
}

#[test]
fn render_writes_requested_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.pgm");
    let o = gifs(&[
        "render",
        "--config",
        &system("g_pair.toml"),
        "--depth",
        "6",
        "--decimate",
        "0.01",
        "--width",
        "40",
        "--height",
        "30",
        "--viewport",
        "-1,3,-1,3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let img = read_pgm(&out).unwrap();
    assert_eq!((img.width, img.height), (40, 30));
    assert!(img.pixels.iter().any(|&p| p > 0));
}

#[test]
fn sequential_and_parallel_renders_match() {
    let dir = tempfile::tempdir().unwrap();
    let system_f = system("f_pair.toml");
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["render", "--config", &system_f, "--depth", "8", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        assert_eq!(code(&gifs(&args)), 0);
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("s.pgm", &["--sequential"]), run("p.pgm", &[]));
}

#[test]
fn seeded_chaos_render_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.pgm");
    let o = gifs(&[
        "render",
        "--config",
        &system("h_triple.toml"),
        "--points",
        "20000",
        "--width",
        "64",
        "--height",
        "64",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let bytes = std::fs::read(&out).unwrap();
    let expected = std::fs::read(golden("h_triple_64.pgm")).unwrap();
    assert!(bytes == expected, "render differs from the golden image");
}

#[test]
fn bench_reports_both_modes() {
    let o = gifs(&[
        "bench",
        "--config",
        &system("h_triple.toml"),
        "--points",
        "2000",
        "--repeat",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("Sequential") && text.contains("Parallel"), "{text}");
}

#[test]
fn budget_variable_tightens_limits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.pgm");
    let args = ["render", "--config", &system("f_pair.toml"), "--algorithm", "affine-shortcut", "--depth", "3"];
    let run = |budget: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_gifs"));
        c.args(args).arg("--out").arg(&out).env_remove("GIFS_BUDGET");
        if let Some(b) = budget {
            c.env("GIFS_BUDGET", b);
        }
        code(&c.output().unwrap())
    };
    assert_eq!(run(None), 0);
    assert_eq!(run(Some("10")), 3);
}

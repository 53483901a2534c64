use std::path::PathBuf;
use std::process::{Command, Output};

use fractal_core::meshforge::read_stl_binary;
use fractal_core::raster::parse_pnm;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractalctl"))
        .args(args)
        .output()
        .expect("spawn fractalctl")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fractalctl-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn documented_examples() {
    assert_eq!(stdout(&["measure", "snowflake", "--iter", "inf"]), "8/5\n");
    assert_eq!(stdout(&["boundary-polys", "--m", "5", "--linear-coeffs"]), "3, 11, 43, 171\n");
    assert_eq!(stdout(&["cantor-member", "1/4"]), "true\n");
    assert_eq!(stdout(&["cantor-member", "1/2"]), "false\n");
    assert_eq!(stdout(&["series", "--first", "1/2", "--ratio", "1/2", "--terms", "10"]), "1023/1024\n");
    assert_eq!(stdout(&["series", "--ratio", "1/3"]), "3/2\n");
}

#[test]
fn measures() {
    assert_eq!(stdout(&["measure", "koch", "--iter", "3"]), "16/9\n");
    assert_eq!(stdout(&["measure", "carpet", "--iter", "2"]), "64/81\n");
    assert_eq!(stdout(&["measure", "cantor", "--iter", "inf"]), "0/1\n");
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["--json", "measure", "snowflake", "--iter", "inf"])).unwrap();
    assert_eq!(v["area"], "8/5");
    assert_eq!(v["decomposition"]["u"], "1/15");
}

#[test]
fn heron_table() {
    let out = stdout(&["heron", "--k", "2", "--a", "2", "--z0", "1", "--n", "4", "--exact"]);
    let col: Vec<&str> = out.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(col, ["1/1", "3/2", "17/12", "577/408"]);
    let out = stdout(&["heron", "--k", "3", "--a", "8", "--z0", "1", "--n", "12"]);
    assert!(out.lines().last().unwrap().ends_with("2.000000000000000"));
    let out = run(&["heron", "--k", "3", "--a", "8", "--z0", "0", "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step 1"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["measure", "koch", "--iter", "inf"]).status.code(), Some(1));
    assert_eq!(run(&["series", "--ratio", "2"]).status.code(), Some(1));
    assert_eq!(run(&["cantor-member", "3/2"]).status.code(), Some(1));
    assert_eq!(run(&["knots", "--depth", "9"]).status.code(), Some(1));
    assert_eq!(run(&["series"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["mandelbrot", "--scale", "0.1", "--bogus"]).status.code(), Some(2));
    let out = run(&["measure", "koch", "--iter", "inf"]);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn every_subcommand_documents_its_flags() {
    let table: &[(&str, &[&str])] = &[
        ("series", &["--ratio", "--first", "--terms", "--json"]),
        ("measure", &["--iter", "--json"]),
        ("curve", &["--iter", "--stroke", "--out"]),
        ("dragon-verify", &["--max-iter", "--four-copy", "--json"]),
        ("mandelbrot", &["--cx", "--cy", "--scale", "--width", "--height", "--max-iter", "--out"]),
        ("boundary-polys", &["--m", "--linear-coeffs", "--check", "--json"]),
        (
            "newton",
            &["--cx", "--cy", "--scale", "--width", "--height", "--max-iter", "--k", "--a-re", "--a-im", "--out"],
        ),
        ("heron", &["--k", "--a", "--z0", "--n", "--exact", "--json"]),
        ("knots", &["--depth", "--k", "--a-re", "--a-im", "--format", "--out"]),
        ("stl", &["--dragon", "--stack", "--wall", "--height", "--layer-height", "--unit", "--out"]),
        ("serve", &["--port"]),
        ("cantor-member", &["--json"]),
    ];
    let top = stdout(&["--help"]);
    for (cmd, flags) in table {
        assert!(top.contains(cmd), "{cmd} missing from top-level help");
        let help = stdout(&[cmd, "--help"]);
        for f in *flags {
            assert!(help.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn images_are_deterministic() {
    let args = [
        "mandelbrot", "--cx", "-0.5", "--cy", "0", "--scale", "0.046875", "--width", "64", "--height", "64",
        "--max-iter", "100",
    ];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert_eq!(a, b);
    let img = parse_pnm(&a).unwrap();
    assert_eq!((img.width, img.height, img.channels), (64, 64, 1));

    let path = tmp("n.ppm");
    let out = run(&["newton", "--scale", "0.09375", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let img = parse_pnm(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(img.channels, 3);
}

#[test]
fn svg_and_dot_outputs() {
    let svg = stdout(&["curve", "dragon", "--iter", "2"]);
    assert!(svg.starts_with("<svg") && svg.contains("L0 2"));
    let dot = stdout(&["knots", "--depth", "2", "--format", "dot"]);
    assert_eq!(dot.matches("->").count(), 12);
    let v: serde_json::Value = serde_json::from_str(&stdout(&["knots", "--depth", "1"])).unwrap();
    assert_eq!(v["children"].as_array().unwrap().len(), 3);
}

#[test]
fn stl_file() {
    let path = tmp("d5.stl");
    let report = stdout(&["--json", "stl", "--dragon", "5", "--out", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let tris = v["report"]["triangles"].as_u64().unwrap() as usize;
    assert_eq!(bytes.len(), 84 + 50 * tris);
    assert_eq!(read_stl_binary(&bytes).unwrap().triangles.len(), tris);
    assert_eq!(v["report"]["components"], 1);

    assert_eq!(run(&["stl", "--dragon", "3", "--stack", "1", "2"]).status.code(), Some(2));
    assert_eq!(run(&["stl", "--dragon", "3", "--wall", "3"]).status.code(), Some(1));
}

#[test]
fn dragon_verify_report() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["--json", "dragon-verify", "--max-iter", "10", "--four-copy", "8"])).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["non_overlap"].as_array().unwrap().len(), 11);
    let sides: Vec<u64> = v["four_copy"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["side"].as_u64().unwrap())
        .collect();
    assert_eq!(sides, [2, 2, 2, 4, 4, 6, 6, 12, 12]);
}

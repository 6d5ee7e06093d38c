use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sftkit::factor::{CodecDomain, DeterminedZoneLayout, MarkerParams, PsiCodec, Zone, ZoneCode};
use sftkit::format::{print_codec, print_layout, print_pattern_file, print_spec};
use sftkit::mixing::make_involution_sft;
use sftkit::pattern::lex_unrank;
use sftkit::{hypercube, Alphabet, Cube, Region, SftSpec, Site};
use tempfile::TempDir;

fn sftkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sftkit")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn hard_square(dir: &TempDir) -> PathBuf {
    write(dir, "hs.txt", &print_spec(&SftSpec::hard_square(2)))
}

fn involution(dir: &TempDir) -> PathBuf {
    let spec = make_involution_sft(2, &[1, 0, 3, 2, 4]).unwrap().with_extension_certificate(0);
    write(dir, "inv.txt", &print_spec(&spec))
}

#[test]
fn ssf_on_involution_is_verified() {
    let dir = TempDir::new().unwrap();
    let spec = involution(&dir);
    let report = dir.path().join("ssf.json");
    let out = sftkit(&["props", "ssf", "--spec", p(&spec), "--report", p(&report)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert!(!json["verdict"].to_string().contains("refuted"));
}

#[test]
fn gluing_without_gap_is_refuted() {
    let dir = TempDir::new().unwrap();
    let spec = hard_square(&dir);
    let out = sftkit(&["props", "gluing", "--spec", p(&spec), "--g", "0"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("refuted"));
    assert_eq!(code(&sftkit(&["props", "gluing", "--spec", p(&spec), "--g", "1"])), 0);
}

#[test]
fn offenders_of_hard_square_are_dominoes() {
    let dir = TempDir::new().unwrap();
    let spec = hard_square(&dir);
    let out = sftkit(&["props", "offenders", "--spec", p(&spec)]);
    assert_eq!(code(&out), 0);
    let listed = sftkit::format::parse_spec(&stdout(&out)).unwrap();
    assert_eq!(listed.forbidden().len(), 2);
}

#[test]
fn counts_hard_square_on_c3() {
    let dir = TempDir::new().unwrap();
    let spec = hard_square(&dir);
    let out = sftkit(&["lang", "count", "--spec", p(&spec), "--side", "3", "--radius", "1"]);
    assert_eq!(code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["count"], "63");
    let entropy = json["entropy_estimate"].as_f64().unwrap();
    assert!((entropy - 63f64.ln() / 9.0).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&sftkit(&["props", "ssf", "--spec", "/nonexistent/spec.txt"])), 2);
    let bad = write(&dir, "bad.txt", "# format v2\ndim 2\n");
    let out = sftkit(&["props", "ssf", "--spec", p(&bad)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    assert_eq!(code(&sftkit(&["lang"])), 2);
}

#[test]
fn budget_exhaustion_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let spec = hard_square(&dir);
    let out = sftkit(&["--max-nodes", "3", "props", "gext", "--spec", p(&spec), "--bound", "3"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn transport_under_swap() {
    let dir = TempDir::new().unwrap();
    let spec = hard_square(&dir);
    let bits = Alphabet::numeric(2).unwrap();
    let swap = sftkit::conjugacy::SlidingBlockCode::relabel(2, bits.clone(), bits, &[sftkit::Symbol(1), sftkit::Symbol(0)]).unwrap();
    let table = write(&dir, "swap.txt", &sftkit::format::print_code(&swap));
    let target = dir.path().join("image.txt");
    let out = sftkit(&["transport", "--forbidden", p(&spec), "--inverse-code", p(&table), "--code", p(&table), "--out", p(&target)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let image = sftkit::format::parse_spec(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert!(image.forbidden().iter().any(|w| w.len() == 2 && w.iter().all(|(_, a)| a == sftkit::Symbol(0))));
}

#[test]
fn factor_run_then_verify() {
    let dir = TempDir::new().unwrap();
    let spec = involution(&dir);
    let params = MarkerParams::synthetic(2, 1, 6, 6, 8).unwrap();
    let zones = vec![
        Zone { origin: Site::new([0, 0]), code: ZoneCode::Rank(0) },
        Zone { origin: Site::new([16, 0]), code: ZoneCode::Rank(1234) },
    ];
    let layout = DeterminedZoneLayout::new(2, params, zones, Region::new(Site::new([-4, -4]), vec![40, 23])).unwrap();
    let layout = write(&dir, "layout.txt", &print_layout(&layout));
    let codec = PsiCodec::new(vec![4, 3, 3, 3, 3, 2, 2, 2, 2], CodecDomain::Size(5184)).unwrap();
    let codec = write(&dir, "codec.txt", &print_codec(&codec));
    let run_dir = dir.path().join("run");
    let output = dir.path().join("out.txt");
    let args = ["factor", "run", "--target-spec", p(&spec), "--layout", p(&layout), "--codec", p(&codec)];
    let out = sftkit(&[&args[..], &["--out", p(&output), "--snapshots", p(&run_dir)]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for stage in 1..=6 {
        let pgm = std::fs::read_to_string(run_dir.join(format!("stage{stage}.pgm"))).unwrap();
        assert!(pgm.starts_with("P2\n# format v1\n40 23\n255\n"));
    }
    assert!(run_dir.join("legend.txt").exists());
    assert_eq!(code(&sftkit(&["factor", "verify", "--run", p(&run_dir)])), 0);

    // Tampering with the stored output is caught.
    let record = run_dir.join("run.json");
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&record).unwrap()).unwrap();
    let text = json["output"].as_str().unwrap().to_string();
    let (alphabet, mut w) = sftkit::format::parse_pattern_file(&text).unwrap();
    w.set(Site::new([-4, -4]), sftkit::Symbol(1));
    json["output"] = print_pattern_file(&alphabet, &w).into();
    std::fs::write(&record, json.to_string()).unwrap();
    assert_eq!(code(&sftkit(&["factor", "verify", "--run", p(&run_dir)])), 1);
}

#[test]
fn surjectivity_on_the_full_shift() {
    let dir = TempDir::new().unwrap();
    let full = SftSpec::full_shift(2, Alphabet::new(["*", "a"]).unwrap()).with_extension_certificate(0);
    let spec = write(&dir, "full.txt", &print_spec(&full));
    let mut ranges = vec![1u128; 9];
    ranges[0] = 1 << 64;
    let codec = write(&dir, "codec.txt", &print_codec(&PsiCodec::new(ranges, CodecDomain::Size(1 << 64)).unwrap()));
    let out = sftkit(&["factor", "surject", "--target-spec", p(&spec), "--codec", p(&codec)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["targets"], 512);
    assert_eq!(json["achieved"], 512);

    let block = lex_unrank(300, &hypercube(Cube::C, 3, 2).unwrap(), full.alphabet()).unwrap();
    let target = write(&dir, "target.txt", &print_pattern_file(full.alphabet(), &block));
    let out = sftkit(&["factor", "surject", "--target-spec", p(&spec), "--codec", p(&codec), "--target", p(&target)]);
    assert_eq!(code(&out), 0);
}

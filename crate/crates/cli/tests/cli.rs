use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use musicswarm_cli::sweep::SweepSpec;
use musicswarm_core::coverage::Pigment;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_musicswarm"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn decode(path: &Path) -> (u32, u32, Vec<u8>) {
    let decoder = png::Decoder::new(std::io::BufReader::new(std::fs::File::open(path).unwrap()));
    let mut reader = decoder.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    buf.truncate(info.buffer_size());
    (info.width, info.height, buf)
}

/// The setup grid as published, one row per pigment with an `x` for every
/// robot carrying it, followed by N, L and w.
const SETUP_GRID: &str = "
1  C x x x x x x . . . . . .  6 1 15
1  M x x x x x x . . . . . .
1  Y x x x x x x . . . . . .
2  C x x x x x x x x x . . .  9 1 15
2  M x x x x x x x x x . . .
2  Y x x x x x x x x x . . .
3  C x x x x x x x x x x x x 12 1 15
3  M x x x x x x x x x x x x
3  Y x x x x x x x x x x x x
4  C x x x x x x . . . . . .  6 3 15
4  M x x x x x x . . . . . .
4  Y x x x x x x . . . . . .
5  C x x x x x x . . . . . .  6 5 15
5  M x x x x x x . . . . . .
5  Y x x x x x x . . . . . .
6  C x x x x x x . . . . . .  6 1 10
6  M x x x x x x . . . . . .
6  Y x x x x x x . . . . . .
7  C x x x x x x . . . . . .  6 1 20
7  M x x x x x x . . . . . .
7  Y x x x x x x . . . . . .
8  C x . . x . . . . . . . .  6 1 15
8  M . x . . x . . . . . . .
8  Y . . x . . x . . . . . .
9  C x . x x . x . . . . . .  6 1 15
9  M x x . x x . . . . . . .
9  Y . x x . x x . . . . . .
10 C x . . x . x . . . . . .  6 1 15
10 M . x . x x . . . . . . .
10 Y . . x . x x . . . . . .
11 C x . x x x x . . . . . .  6 1 15
11 M x x . x x x . . . . . .
11 Y . x x x x x . . . . . .
12 C x . . x x x . . . . . .  6 1 15
12 M . x . x x x . . . . . .
12 Y . . x x x x . . . . . .
13 C x . x x x x . . . . . .  6 1 15
13 M . x . x x x . . . . . .
13 Y . . x . x x . . . . . .
";

#[test]
fn bundled_sweep_matches_setup_grid() {
    let spec = SweepSpec::bundled();
    let rows: Vec<Vec<&str>> = SETUP_GRID.lines().filter(|l| !l.trim().is_empty()).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 39);
    for (k, setup) in spec.setups.iter().enumerate() {
        let block = &rows[3 * k..3 * k + 3];
        assert_eq!(block[0][0].parse::<u32>().unwrap(), setup.id);
        assert_eq!(block[0][14].parse::<usize>().unwrap(), setup.n);
        assert_eq!(block[0][15].parse::<f64>().unwrap(), setup.l);
        assert_eq!(block[0][16].parse::<f64>().unwrap(), setup.w);
        for (row, pigment) in block.iter().zip(Pigment::ALL) {
            assert_eq!(row[1].chars().next(), Some(pigment.letter()));
            for robot in 0..12 {
                let marked = row[2 + robot] == "x";
                let carries = setup.equipment.get(robot).is_some_and(|e| e.carries(pigment));
                assert_eq!(marked, carries, "setup {} robot {} {}", setup.id, robot + 1, pigment);
            }
        }
    }
}

#[test]
fn analyze_midi_reports_c_major() {
    let out = run(&["analyze", fixture("c_major_I_IV_V_I.mid").to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["key"], serde_json::json!({"tonic": 0, "mode": "major"}));
    assert_eq!(json["chords"].as_array().unwrap().len(), 4);
}

#[test]
fn analyze_key_override() {
    let out = run(&["analyze", fixture("c_major_I_IV_V_I.mid").to_str().unwrap(), "--key", "A:minor"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["key"], serde_json::json!({"tonic": 9, "mode": "minor"}));
}

#[test]
fn analyze_timeline_is_canonical_passthrough() {
    let path = fixture("timeline_60s.json");
    let first = run(&["analyze", path.to_str().unwrap()]);
    assert!(first.status.success());
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("again.json");
    std::fs::write(&copy, &first.stdout).unwrap();
    let second = run(&["analyze", copy.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
    let original: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let echoed: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(original, echoed);
}

#[test]
fn missing_file_exits_two_and_names_path() {
    let out = run(&["analyze", "/definitely/not/here.mid"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/definitely/not/here.mid"));
}

#[test]
fn malformed_midi_is_a_one_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mid");
    std::fs::write(&bad, b"MThd\x00\x00\x00\x06\x00\x00\x00\x01").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
}

#[test]
fn bad_config_fails_before_simulating() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"robots": 0}"#).unwrap();
    let out_prefix = dir.path().join("p");
    let out = run(&[
        "paint",
        fixture("timeline_60s.json").to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("p.png").exists());
}

#[test]
fn paint_zero_duration_is_white() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("blank");
    let out = run(&[
        "paint",
        fixture("timeline_60s.json").to_str().unwrap(),
        "--out",
        prefix.to_str().unwrap(),
        "--duration",
        "0",
    ]);
    assert!(out.status.success());
    let (w, h, px) = decode(&dir.path().join("blank.png"));
    assert_eq!((w, h), (1000, 1000));
    assert!(px.iter().all(|&b| b == 255));
    let metrics: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("blank.metrics.json")).unwrap()).unwrap();
    assert_eq!(metrics["cost"].as_array().unwrap().len(), 0);
}

#[test]
fn paint_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"grid_resolution": 64, "pixels_per_unit": 0.5, "layout": "scatter"}"#).unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let prefix = dir.path().join(name);
        let out = run(&[
            "paint",
            fixture("timeline_60s.json").to_str().unwrap(),
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            prefix.to_str().unwrap(),
            "--duration",
            "10",
            "--seed",
            "4",
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            std::fs::read(dir.path().join(format!("{name}.png"))).unwrap(),
            std::fs::read(dir.path().join(format!("{name}.metrics.json"))).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1]);
    let metrics: serde_json::Value = serde_json::from_slice(&outputs[0].1).unwrap();
    assert_eq!(metrics["cost"].as_array().unwrap().len(), 200);
}

#[test]
fn sweep_with_single_setup() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(&spec, r#"{"setups":[{"id":4,"n":3,"l":3,"w":10,"equipment":["C","M","Y"]}]}"#).unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "sweep",
        fixture("timeline_60s.json").to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--duration",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pngs: Vec<_> = std::fs::read_dir(&out_dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "png"))
        .collect();
    assert_eq!(pngs.len(), 1);
    assert!(out_dir.join("setup04_N3_L3_w10.png").exists());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["setups"][0]["status"], "ok");
}

#[test]
fn sweep_rejects_duplicate_ids() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"setups":[{"id":1,"n":1,"l":1,"w":10,"equipment":["CMY"]},{"id":1,"n":1,"l":1,"w":10,"equipment":["CMY"]}]}"#,
    )
    .unwrap();
    let out = run(&[
        "sweep",
        fixture("timeline_60s.json").to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        dir.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate"));
}

#[test]
fn failing_setup_is_recorded_and_others_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    // Setup 2 never carries yellow, which the simulation rejects.
    std::fs::write(
        &spec,
        r#"{"setups":[{"id":1,"n":1,"l":1,"w":10,"equipment":["CMY"]},{"id":2,"n":1,"l":1,"w":10,"equipment":["CM"]}]}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("o");
    let out = run(&[
        "sweep",
        fixture("timeline_60s.json").to_str().unwrap(),
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--duration",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["setups"][0]["status"], "ok");
    assert_eq!(summary["setups"][1]["status"], "error");
    assert!(summary["setups"][1]["error"].as_str().unwrap().contains("yellow"));
}

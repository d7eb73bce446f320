//! Acceptance criteria. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line regardless of output capture; exits non-zero on any FAIL.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use musicswarm_core::coverage::{
    compute_partition, control_input, evaluate_coverage, lloyd_step, DensityField, Equipment, GaussianDensity,
    GridDomain, Pigment, RobotState,
};
use musicswarm_core::emotion::{tempo_to_l, ChordFunction, ChordWheel, MotionParams, Palette};
use musicswarm_core::music::{analyze_midi, load_timeline, ChordEvent, ChordQuality, Key, MusicTimeline, TempoEvent};
use musicswarm_core::sim::{si_to_unicycle, SimConfig, SimState};
use musicswarm_core::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

const CHORD_EMOTIONS: &str = "\
Major tonic & Serenity, Acceptance, Trust
Minor tonic & Grief, Sadness, Anger
Natural minor & Vigilance, Aggressiveness
Dominant & Joy, Ecstasy, Amazement
Seventh & Rage, Grief, Disgust
Secondary dominant & Surprise, Bittersweet joy
Major subdominant & Joy, Admiration, Serenity
Major subdominant 7th & Pensiveness, Sadness, Yearning
Added sixth in a major & Love, Trust, Acceptance
Added sixth in a minor & Grief, Sadness, Remorse
Neapolitan sixth & Grief, Sadness, Pensiveness
Diminished seventh & Fear, Despair, Terror
Augmented & Amazement, Surprise, Ecstasy
Minor sixth & Fear, Anxiety, Apprehension";

fn chord_emotion_table() -> Outcome {
    let rows: Vec<(&str, &str)> = CHORD_EMOTIONS.lines().map(|l| l.split_once(" & ").unwrap()).collect();
    ensure!(rows.len() == ChordFunction::ALL.len(), "{} rows vs {} functions", rows.len(), ChordFunction::ALL.len());
    for (f, (label, emotions)) in ChordFunction::ALL.iter().zip(&rows) {
        ensure!(f.label() == *label, "function label {:?} != {:?}", f.label(), label);
        let got: Vec<&str> = f.emotions().iter().map(|e| e.label()).collect();
        ensure!(got.join(", ") == *emotions, "{label}: {got:?} != {emotions:?}");
    }
    Ok(format!("{} functions match", rows.len()))
}

fn tempo_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e3);
    for i in 0..1000 {
        let l_min = rng.gen_range(0.1..5.0);
        let l_max = l_min + rng.gen_range(0.01..10.0);
        let t_max = rng.gen_range(1.0..400.0);
        let p = MotionParams::new(l_min, l_max, t_max).map_err(|e| e.to_string())?;
        let t = rng.gen_range(0.0..2.0 * t_max);
        let dt = rng.gen_range(0.0..t_max);
        let (a, b) = (tempo_to_l(t, &p), tempo_to_l(t + dt, &p));
        ensure!((l_min..=l_max).contains(&a), "case {i}: L({t}) = {a} outside [{l_min}, {l_max}]");
        ensure!(b <= a, "case {i}: L({}) = {b} > L({t}) = {a}", t + dt);
        ensure!((tempo_to_l(0.0, &p) - l_max).abs() <= 1e-12, "case {i}: L(0) != L_max");
        ensure!((tempo_to_l(t_max, &p) - l_min).abs() <= 1e-12, "case {i}: L(t_max) != L_min");
        ensure!((tempo_to_l(t_max + t, &p) - l_min).abs() <= 1e-12, "case {i}: L beyond t_max != L_min");
    }
    Ok("1000 random parameter sets".into())
}

fn brute_owner(robots: &[RobotState], pigment: Pigment, q: Vec2) -> usize {
    let mut best = (f64::INFINITY, usize::MAX);
    for r in robots.iter().filter(|r| r.equipment.carries(pigment)) {
        let d = (q.x - r.position.x).powi(2) + (q.y - r.position.y).powi(2);
        if d < best.0 {
            best = (d, r.index);
        }
    }
    best.1
}

fn coverage_math() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0e);
    let cases = 200;
    for case in 0..cases {
        let (nx, ny) = (rng.gen_range(8..=32), rng.gen_range(8..=32));
        let (w, h) = (rng.gen_range(10.0..100.0), rng.gen_range(10.0..100.0));
        let grid = GridDomain::new(w, h, nx, ny).map_err(|e| e.to_string())?;
        let n = rng.gen_range(2..=5);
        let mut robots: Vec<RobotState> = (0..n)
            .map(|i| {
                let mask: u8 = rng.gen_range(1..8);
                let eq = Equipment::new(&Pigment::ALL.into_iter().filter(|p| mask & (1 << p.index()) != 0).collect::<Vec<_>>())
                    .unwrap();
                RobotState::new(i, Vec2::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h)), 0.0, eq)
            })
            .collect();
        robots[rng.gen_range(0..n)].equipment = Equipment::CMY;
        let densities: Vec<GaussianDensity> = Pigment::ALL
            .into_iter()
            .map(|p| {
                let c = Vec2::new(rng.gen_range(0.0..w), rng.gen_range(0.0..h));
                let s = Vec2::new(rng.gen_range(0.05..0.5) * w, rng.gen_range(0.05..0.5) * h);
                GaussianDensity::new(p, c, s, rng.gen_range(0.1..10.0)).unwrap()
            })
            .collect();
        let fields: Vec<DensityField> = densities.iter().map(|d| DensityField::sample(d, &grid)).collect();
        let eval = evaluate_coverage(&robots, &fields, &grid).map_err(|e| e.to_string())?;

        let mut expected_u = vec![Vec2::ZERO; n];
        for d in &densities {
            let partition = compute_partition(&robots, d.pigment, &grid).map_err(|e| e.to_string())?;
            let mut mass = vec![0.0; n];
            let mut first = vec![Vec2::ZERO; n];
            let mut total = 0.0;
            for cell in 0..grid.cell_count() {
                let q = grid.cell_center(cell);
                let owner = brute_owner(&robots, d.pigment, q);
                ensure!(partition.owner(cell) == owner, "case {case}: cell {cell} owner {} != {owner}", partition.owner(cell));
                let wq = d.eval(q) * grid.cell_area();
                total += wq;
                mass[owner] += wq;
                first[owner] += q * wq;
            }
            let sum: f64 = (0..n).map(|i| eval.moments[i][d.pigment.index()].mass).sum();
            ensure!((sum - total).abs() <= 1e-12 * total, "case {case}: mass sum {sum} vs quadrature {total}");
            for i in 0..n {
                if robots[i].equipment.carries(d.pigment) && mass[i] > 0.0 {
                    let centroid = first[i] / mass[i];
                    expected_u[i] += (centroid - robots[i].position) * mass[i];
                }
            }
        }
        for r in &robots {
            let got = control_input(r.equipment.pigments().map(|p| &eval.moments[r.index][p.index()]), r.position);
            let want = expected_u[r.index];
            ensure!(
                got.distance(want) <= 1e-9 * (1.0 + want.norm()),
                "case {case}: robot {} u {got:?} vs {want:?}",
                r.index
            );
        }
    }
    Ok(format!("{cases} random grids, 2-5 robots"))
}

fn lloyd_scenario() -> (GridDomain, Vec<GaussianDensity>, Vec<RobotState>) {
    let grid = GridDomain::square(500.0, 96).unwrap();
    let densities = Pigment::ALL
        .iter()
        .map(|&p| GaussianDensity::isotropic(p, Vec2::new(300.0, 280.0), 40.0, 10.0).unwrap())
        .collect();
    let robots = (0..4)
        .map(|i| RobotState::new(i, Vec2::new(60.0 + 30.0 * i as f64, 440.0 - 20.0 * i as f64), 0.0, Equipment::CMY))
        .collect();
    (grid, densities, robots)
}

fn lloyd_descent() -> Outcome {
    let (grid, densities, mut robots) = lloyd_scenario();
    let mut costs = Vec::with_capacity(201);
    for _ in 0..200 {
        costs.push(lloyd_step(&mut robots, &densities, &grid, 0.02, None).map_err(|e| e.to_string())?);
    }
    costs.push(musicswarm_core::coverage::locational_cost(&robots, &densities, &grid).map_err(|e| e.to_string())?);
    for (k, w) in costs.windows(2).enumerate() {
        ensure!(w[1] <= w[0] + 1e-6, "step {k}: cost rose {} -> {}", w[0], w[1]);
    }
    let ratio = costs[200] / costs[0];
    ensure!(ratio < 0.1, "final/initial cost ratio {ratio:.4}");
    Ok(format!("final/initial cost {ratio:.4}"))
}

fn static_chord(seconds: f64) -> MusicTimeline {
    let key = Key::major(0);
    MusicTimeline {
        key,
        chords: vec![ChordEvent::from_template(0.0, seconds, 0, ChordQuality::Major, key)],
        tempos: vec![TempoEvent::new(0.0, 120.0)],
        duration: seconds,
    }
}

fn unicycle_consistency() -> Outcome {
    let mut report = Vec::new();
    for l in [1.0, 3.0, 5.0] {
        let config = SimConfig { robots: 1, tau: 0.0, fixed_l: Some(l), pixels_per_unit: 0.5, ..SimConfig::default() };
        let sigma = config.sigma;
        let mut sim = SimState::new(config, static_chord(41.0), &Palette::default()).map_err(|e| e.to_string())?;
        for _ in 0..800 {
            let before = sim.robots()[0];
            sim.step();
            let u = sim.robots()[0].control;
            let (_, w) = si_to_unicycle(u, before.heading, l);
            let (_, w_half) = si_to_unicycle(u, before.heading, l / 2.0);
            ensure!(w_half == 2.0 * w, "L={l}: omega {w_half} at L/2 is not twice {w}");
        }
        let center = sim.densities()[0].center;
        let d = sim.robots()[0].position.distance(center);
        ensure!(d < 2.0 * sigma, "L={l}: distance {d:.1} at t=40 s exceeds 2 sigma = {}", 2.0 * sigma);
        report.push(format!("L={l}: {d:.1}"));
    }
    Ok(format!("distance to centre at t=40 s {}", report.join(", ")))
}

fn decode_png(path: &Path) -> Result<(u32, u32), String> {
    let file = std::fs::File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut reader = png::Decoder::new(std::io::BufReader::new(file)).read_info().map_err(|e| e.to_string())?;
    let mut buf = vec![0; reader.output_buffer_size().ok_or("PNG too large")?];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    Ok((info.width, info.height))
}

fn pngs_in(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "png"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    Ok(out)
}

fn sweep_reproduction() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut runs = Vec::new();
    let mut first_elapsed = Duration::ZERO;
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_musicswarm"))
            .args(["sweep", fixture("timeline_60s.json").to_str().unwrap(), "--out", out.to_str().unwrap()])
            .status()
            .map_err(|e| e.to_string())?;
        if name == "a" {
            first_elapsed = start.elapsed();
        }
        ensure!(status.success(), "sweep exited with {status}");
        let mut files = pngs_in(&out)?;
        files.push(("summary.json".into(), std::fs::read(out.join("summary.json")).map_err(|e| e.to_string())?));
        runs.push(files);
        if name == "a" {
            ensure!(runs[0].len() == 14, "{} PNGs instead of 13", runs[0].len() - 1);
            for (file, _) in runs[0].iter().filter(|(f, _)| f.ends_with(".png")) {
                let (w, h) = decode_png(&out.join(file))?;
                ensure!((w, h) == (1000, 1000), "{file} decodes as {w}x{h}");
            }
        }
    }
    ensure!(first_elapsed < Duration::from_secs(300), "sweep took {:.1} s", first_elapsed.as_secs_f64());
    ensure!(runs[0] == runs[1], "rerun output differs");
    Ok(format!("13 PNGs in {:.1} s, rerun byte-identical with summary.json", first_elapsed.as_secs_f64()))
}

fn chord_pipeline() -> Outcome {
    let expected_v = [("c_major_I_IV_V_I.mid", ChordFunction::Dominant), ("c_major_I_IV_V7_I.mid", ChordFunction::Seventh)];
    let mut detail = String::new();
    for (file, v_function) in expected_v {
        let bytes = std::fs::read(fixture(file)).map_err(|e| e.to_string())?;
        let timeline = analyze_midi(&bytes, None, None).map_err(|e| e.to_string())?;
        ensure!(timeline.key == Key::major(0), "{file}: key {}", timeline.key);
        let functions: Vec<ChordFunction> = timeline.chords.iter().map(|c| c.function).collect();
        let want = [ChordFunction::MajorTonic, ChordFunction::MajorSubdominant, v_function, ChordFunction::MajorTonic];
        ensure!(functions == want, "{file}: functions {functions:?}");

        // Drive the simulation with an immediate transition and read back the
        // density centre while each chord sounds.
        let config = SimConfig { tau: 0.0, grid_resolution: 32, pixels_per_unit: 0.2, ..SimConfig::default() };
        let wheel = ChordWheel::for_canvas(config.canvas_width, config.canvas_height);
        let mut sim = SimState::new(config, timeline.clone(), &Palette::default()).map_err(|e| e.to_string())?;
        let mut centers = Vec::new();
        for chord in &timeline.chords {
            while sim.clock() + 1e-9 < chord.onset + 0.5 * chord.duration {
                sim.step();
            }
            let c = sim.densities().first().ok_or("no active density")?.center;
            ensure!(
                c.distance(wheel.position(chord.root, chord.quality)) < 1e-9,
                "{file}: density centre {c:?} off the wheel slot of {}",
                chord.label()
            );
            centers.push(c);
        }
        ensure!(centers.len() == 4, "{file}: {} centres", centers.len());
        ensure!(centers[0] == centers[3], "{file}: I positions differ");
        let distinct = [centers[0], centers[1], centers[2]];
        for i in 0..3 {
            for j in i + 1..3 {
                ensure!(distinct[i].distance(distinct[j]) > 1.0, "{file}: I, IV and V positions not distinct");
            }
        }
        detail = format!("I-IV-V(7)-I -> {want:?}, 3 wheel slots with I repeated", want = functions);
    }
    Ok(detail)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = 0;
    for fixture_name in ["timeline_60s.json", "c_major_I_IV_V_I.mid", "c_major_I_IV_V7_I.mid"] {
        let mut artifacts = Vec::new();
        for run in ["a", "b"] {
            let prefix = dir.path().join(format!("{fixture_name}.{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_musicswarm"))
                .args(["paint", fixture(fixture_name).to_str().unwrap(), "--out", prefix.to_str().unwrap()])
                .status()
                .map_err(|e| e.to_string())?;
            ensure!(status.success(), "{fixture_name}: paint exited with {status}");
            let png = std::fs::read(format!("{}.png", prefix.display())).map_err(|e| e.to_string())?;
            let metrics = std::fs::read(format!("{}.metrics.json", prefix.display())).map_err(|e| e.to_string())?;
            artifacts.push((png, metrics));
        }
        ensure!(artifacts[0].0 == artifacts[1].0, "{fixture_name}: PNG differs between runs");
        ensure!(artifacts[0].1 == artifacts[1].1, "{fixture_name}: metrics differ between runs");
        checked += 1;
    }
    Ok(format!("{checked} fixtures, PNG and metrics byte-identical"))
}

fn main() {
    // Ensure the timeline fixture really is a minute long before anything
    // relies on it.
    let text = std::fs::read_to_string(fixture("timeline_60s.json")).expect("timeline fixture");
    let timeline = load_timeline(&text).expect("timeline fixture parses");
    assert!((timeline.duration - 60.0).abs() < 1e-9, "fixture lasts {} s", timeline.duration);

    let criteria: [Criterion; 8] = [
        ("chord/emotion table fidelity", Duration::from_secs(1), chord_emotion_table),
        ("tempo law", Duration::from_secs(1), tempo_law),
        ("coverage math", Duration::from_secs(5), coverage_math),
        ("Lloyd descent", Duration::from_secs(10), lloyd_descent),
        ("unicycle consistency", Duration::from_secs(30), unicycle_consistency),
        ("sweep reproduction", Duration::from_secs(600), sweep_reproduction),
        ("chord pipeline end-to-end", Duration::from_secs(5), chord_pipeline),
        ("determinism", Duration::from_secs(300), determinism),
    ];
    let mut failures = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > budget => {
                Err(format!("{detail}; took {:.2} s, budget {:.0} s", elapsed.as_secs_f64(), budget.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS  {name} ({:.2} s): {detail}", elapsed.as_secs_f64()),
            Err(reason) => {
                failures += 1;
                println!("FAIL  {name} ({:.2} s): {reason}", elapsed.as_secs_f64());
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

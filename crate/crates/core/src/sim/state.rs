use std::collections::VecDeque;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::canvas::{Canvas, Stamp};
use super::command::UserCommand;
use super::config::{Layout, SimConfig};
use super::kinematics::{integrate_unicycle, si_to_unicycle};
use super::SimError;
use crate::coverage::{
    control_input, evaluate_coverage, pigment_proportions, DensityField, Equipment, GaussianDensity, GridDomain,
    Pigment, RobotState,
};
use crate::emotion::{
    chord_to_canvas_position, emotions_to_color, rgb_to_cmy, tempo_to_l, ChordWheel, ColorRgb, Emotion, Palette,
};
use crate::geometry::Vec2;
use crate::music::{MusicTimeline, DEFAULT_BPM};

/// Onsets within this distance of the clock count as reached.
const EVENT_EPS: f64 = 1e-9;

/// Where a chord asks the densities to go.
#[derive(Debug, Clone, PartialEq)]
struct ChordTarget {
    center: Vec2,
    intensity: [f64; 3],
    info: ChordInfo,
}

/// Description of the chord currently driving the densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordInfo {
    pub label: String,
    pub function: String,
    pub emotions: Vec<Emotion>,
    pub color: ColorRgb,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Locational cost evaluated at every advancing step.
    pub cost: Vec<f64>,
    pub path_lengths: Vec<f64>,
    pub chords_consumed: usize,
}

/// Outcome of one call to [`SimState::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    /// Steps completed so far, including this one if it advanced.
    pub step: u64,
    pub clock: f64,
    pub advanced: bool,
    /// Tags of commands applied during this step, in application order.
    pub applied: Vec<u64>,
    pub stamps: Vec<Stamp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotView {
    pub index: usize,
    pub position: Vec2,
    pub heading: f64,
    pub equipment: Equipment,
    /// Pigment proportions indexed C, M, Y; zero for pigments not carried.
    pub alpha: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityView {
    pub pigment: Pigment,
    pub center: Vec2,
    pub sigma: Vec2,
    pub intensity: f64,
}

/// Immutable view of the state for observers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSnapshot {
    pub step: u64,
    pub clock: f64,
    pub paused: bool,
    pub l: f64,
    pub trail_width: f64,
    pub robots: Vec<RobotView>,
    pub densities: Vec<DensityView>,
    pub chord: Option<ChordInfo>,
}

/// Closed-loop simulation state. Single-threaded; commands are queued and
/// drained at step boundaries.
#[derive(Debug, Clone)]
pub struct SimState {
    config: SimConfig,
    grid: GridDomain,
    timeline: MusicTimeline,
    chord_targets: Vec<ChordTarget>,
    step: u64,
    clock: f64,
    robots: Vec<RobotState>,
    alpha: Vec<[f64; 3]>,
    densities: [Option<GaussianDensity>; 3],
    chord: Option<usize>,
    center_override: [Option<Vec2>; 3],
    tempo_l: f64,
    l_override: Option<f64>,
    trail_width: f64,
    paused: bool,
    chord_cursor: usize,
    tempo_cursor: usize,
    canvas: Canvas,
    pending: VecDeque<(u64, UserCommand)>,
    metrics: Metrics,
}

impl SimState {
    pub fn new(config: SimConfig, timeline: MusicTimeline, palette: &Palette) -> Result<Self, SimError> {
        config.validate()?;
        let grid = config.grid();
        let wheel = ChordWheel::for_canvas(config.canvas_width, config.canvas_height);
        let mut chord_targets = Vec::with_capacity(timeline.chords.len());
        for chord in &timeline.chords {
            let emotions = chord.function.emotions().to_vec();
            let color = emotions_to_color(&emotions, palette)?;
            let cmy = rgb_to_cmy(color).to_array();
            chord_targets.push(ChordTarget {
                center: chord_to_canvas_position(chord, &wheel),
                intensity: cmy.map(|c| c * config.intensity),
                info: ChordInfo { label: chord.label(), function: chord.function.label().to_string(), emotions, color },
            });
        }

        let robots = initial_robots(&config);
        let (w, h) = config.raster_size();
        let tempo_l = config.fixed_l.unwrap_or_else(|| tempo_to_l(DEFAULT_BPM, &config.motion));
        Ok(Self {
            grid,
            chord_targets,
            step: 0,
            clock: 0.0,
            alpha: vec![[0.0; 3]; robots.len()],
            densities: [None; 3],
            chord: None,
            center_override: [None; 3],
            tempo_l,
            l_override: None,
            trail_width: config.trail_width,
            paused: false,
            chord_cursor: 0,
            tempo_cursor: 0,
            canvas: Canvas::new(w, h, config.pixels_per_unit),
            pending: VecDeque::new(),
            metrics: Metrics { cost: Vec::new(), path_lengths: vec![0.0; robots.len()], chords_consumed: 0 },
            robots,
            timeline,
            config,
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn timeline(&self) -> &MusicTimeline {
        &self.timeline
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn robots(&self) -> &[RobotState] {
        &self.robots
    }

    pub fn canvas(&self) -> &Canvas {
        &self.canvas
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn is_paused(&self) -> bool {
        self.paused
    }

    pub fn trail_width(&self) -> f64 {
        self.trail_width
    }

    /// Current turning parameter.
    pub fn l(&self) -> f64 {
        self.l_override.unwrap_or(self.tempo_l)
    }

    /// Active densities in pigment order.
    pub fn densities(&self) -> Vec<GaussianDensity> {
        self.densities.iter().flatten().copied().collect()
    }

    /// Validates and queues a command; it takes effect at the next step.
    pub fn enqueue(&mut self, tag: u64, command: UserCommand) -> Result<(), String> {
        command.validate(&self.config)?;
        self.pending.push_back((tag, command));
        Ok(())
    }

    /// Advances one `dt`. While paused only queued commands are applied and
    /// the clock stays put. A pause applied mid-step takes effect from the
    /// following step.
    pub fn step(&mut self) -> StepReport {
        if self.paused {
            let applied = self.apply_commands();
            return StepReport { step: self.step, clock: self.clock, advanced: false, applied, stamps: Vec::new() };
        }

        self.step += 1;
        self.clock = self.step as f64 * self.config.dt;
        self.consume_events();
        let applied = self.apply_commands();
        self.relax_densities();

        let dt = self.config.dt;
        let l = self.l();
        let fields: Vec<DensityField> =
            self.densities.iter().flatten().map(|d| DensityField::sample(d, &self.grid)).collect();
        let eval = if fields.is_empty() { None } else { evaluate_coverage(&self.robots, &fields, &self.grid).ok() };
        self.metrics.cost.push(eval.as_ref().map_or(0.0, |e| e.cost));

        let mut stamps = Vec::new();
        for (i, robot) in self.robots.iter_mut().enumerate() {
            let carried: Vec<Pigment> = robot.equipment.pigments().collect();
            let moments = eval.as_ref().map(|e| e.moments[i]);
            let mut u = match &moments {
                Some(m) => control_input(carried.iter().map(|p| &m[p.index()]), robot.position),
                None => Vec2::ZERO,
            };
            let speed = u.norm();
            if speed > self.config.u_max {
                u = u * (self.config.u_max / speed);
            }
            robot.control = u;
            let (v, omega) = si_to_unicycle(u, robot.heading, l);
            let (next, heading) = integrate_unicycle(robot.position, robot.heading, v, omega, dt);
            let next = self.grid.clamp(next);
            self.metrics.path_lengths[i] += next.distance(robot.position);
            robot.position = next;
            robot.heading = heading;

            let masses: Vec<f64> = match &moments {
                Some(m) => carried.iter().map(|p| m[p.index()].mass).collect(),
                None => vec![0.0; carried.len()],
            };
            let proportions = pigment_proportions(&masses);
            let mut alpha = [0.0; 3];
            for (p, a) in carried.iter().zip(&proportions) {
                alpha[p.index()] = *a;
            }
            self.alpha[i] = alpha;
            // Nothing to paint for: no density reaches this robot.
            if masses.iter().sum::<f64>() > 0.0 {
                let stamp = Stamp::new(
                    i,
                    robot.position,
                    self.trail_width,
                    self.config.trail_strength,
                    &carried,
                    &proportions,
                );
                self.canvas.apply(&stamp);
                stamps.push(stamp);
            }
        }
        StepReport { step: self.step, clock: self.clock, advanced: true, applied, stamps }
    }

    pub fn snapshot(&self) -> SimSnapshot {
        SimSnapshot {
            step: self.step,
            clock: self.clock,
            paused: self.paused,
            l: self.l(),
            trail_width: self.trail_width,
            robots: self
                .robots
                .iter()
                .zip(&self.alpha)
                .map(|(r, a)| RobotView {
                    index: r.index,
                    position: r.position,
                    heading: r.heading,
                    equipment: r.equipment,
                    alpha: *a,
                })
                .collect(),
            densities: self
                .densities
                .iter()
                .flatten()
                .map(|d| DensityView { pigment: d.pigment, center: d.center, sigma: d.sigma, intensity: d.intensity })
                .collect(),
            chord: self.chord.map(|c| self.chord_targets[c].info.clone()),
        }
    }

    fn consume_events(&mut self) {
        let horizon = self.clock + EVENT_EPS;
        while let Some(t) = self.timeline.tempos.get(self.tempo_cursor) {
            if t.onset > horizon {
                break;
            }
            if self.config.fixed_l.is_none() {
                self.tempo_l = tempo_to_l(t.bpm, &self.config.motion);
            }
            self.l_override = None;
            self.tempo_cursor += 1;
        }
        while let Some(c) = self.timeline.chords.get(self.chord_cursor) {
            if c.onset > horizon {
                break;
            }
            self.chord = Some(self.chord_cursor);
            self.center_override = [None; 3];
            self.metrics.chords_consumed += 1;
            self.chord_cursor += 1;
        }
    }

    fn apply_commands(&mut self) -> Vec<u64> {
        let mut applied = Vec::with_capacity(self.pending.len());
        while let Some((tag, command)) = self.pending.pop_front() {
            match command {
                UserCommand::SetCenter { x, y, pigment } => {
                    let p = Vec2::new(x, y);
                    match pigment {
                        Some(pg) => self.center_override[pg.index()] = Some(p),
                        None => self.center_override = [Some(p); 3],
                    }
                }
                UserCommand::SetL { value } => self.l_override = Some(value),
                UserCommand::SetTrailWidth { value } => self.trail_width = value,
                UserCommand::Pause => self.paused = true,
                UserCommand::Resume => self.paused = false,
            }
            applied.push(tag);
        }
        applied
    }

    /// First-order lag of every density toward the current chord target.
    /// A zero target intensity removes the density at once; a new density
    /// appears at its target centre and fades in.
    fn relax_densities(&mut self) {
        let Some(chord) = self.chord else { return };
        let target = &self.chord_targets[chord];
        let keep = if self.config.tau == 0.0 { 0.0 } else { (-self.config.dt / self.config.tau).exp() };
        let sigma = Vec2::new(self.config.sigma, self.config.sigma);
        for p in Pigment::ALL {
            let j = p.index();
            let k_target = target.intensity[j];
            if k_target <= 0.0 {
                self.densities[j] = None;
                continue;
            }
            let c_target = self.center_override[j].unwrap_or(target.center);
            let (c, k) = match self.densities[j] {
                Some(d) => (d.center, d.intensity),
                None => (c_target, 0.0),
            };
            self.densities[j] = Some(GaussianDensity {
                pigment: p,
                center: c_target + (c - c_target) * keep,
                sigma,
                intensity: k_target + (k - k_target) * keep,
            });
        }
    }
}

fn initial_robots(config: &SimConfig) -> Vec<RobotState> {
    let n = config.robots;
    let (w, h) = (config.canvas_width, config.canvas_height);
    match config.layout {
        Layout::Circle => {
            let center = Vec2::new(w / 2.0, h / 2.0);
            let radius = 0.35 * w.min(h);
            (0..n)
                .map(|i| {
                    let angle = TAU * i as f64 / n as f64;
                    let position = center + Vec2::from_angle(angle) * radius;
                    RobotState::new(i, position, angle + FRAC_PI_2, config.equipment_of(i))
                })
                .collect()
        }
        Layout::Scatter => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..n)
                .map(|i| {
                    let x = rng.gen_range(0.0..=w);
                    let y = rng.gen_range(0.0..=h);
                    let heading = rng.gen_range(-PI..PI);
                    RobotState::new(i, Vec2::new(x, y), heading, config.equipment_of(i))
                })
                .collect()
        }
    }
}

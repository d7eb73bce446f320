//! One live simulation: a stepper thread owning the [`SimState`], fed by a
//! control channel and publishing JSON frames on a broadcast channel.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use base64::Engine;
use musicswarm_core::sim::{render_png, step_count, SimConfig, SimState, Stamp};
use serde::Serialize;
use tokio::sync::{broadcast, oneshot};

use crate::protocol::{Ack, CommandId, DonePayload, ServerFrame, SnapshotPayload, WireCommand};

/// Upper bound on steps run in one wake-up when the stepper falls behind the
/// wall clock; the schedule is reset afterwards instead of bursting forever.
const MAX_CATCH_UP: usize = 256;

#[derive(Debug, Clone)]
pub struct StreamSettings {
    pub snapshot_interval: Duration,
    pub keyframe_interval: Duration,
    /// Frames buffered per subscriber before it counts as lagging.
    pub channel_capacity: usize,
}

impl Default for StreamSettings {
    fn default() -> Self {
        Self {
            snapshot_interval: Duration::from_millis(100),
            keyframe_interval: Duration::from_secs(5),
            channel_capacity: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Running,
    Paused,
    Finished,
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Progress {
    pub status: Status,
    pub step: u64,
    pub clock: f64,
}

/// First frame of a subscription plus the live feed; the feed is absent
/// once the piece has finished.
pub struct Subscription {
    pub first: ServerFrame,
    pub frames: Option<broadcast::Receiver<Arc<str>>>,
}

enum Control {
    Command(WireCommand),
    Subscribe(oneshot::Sender<Subscription>),
    Render(oneshot::Sender<Result<Vec<u8>, String>>),
    Stop,
}

pub struct Session {
    pub id: u64,
    pub config: SimConfig,
    pub duration: f64,
    pub time_scale: f64,
    control: mpsc::Sender<Control>,
    progress: Arc<Mutex<Progress>>,
    stop: Arc<AtomicBool>,
    thread: Mutex<Option<JoinHandle<()>>>,
}

impl Session {
    /// Starts the stepper. `time_scale` is simulated seconds per wall second.
    pub fn start(id: u64, sim: SimState, duration: f64, time_scale: f64, settings: StreamSettings) -> Arc<Self> {
        let (control, rx) = mpsc::channel();
        let progress = Arc::new(Mutex::new(Progress { status: Status::Running, step: 0, clock: 0.0 }));
        let stop = Arc::new(AtomicBool::new(false));
        let config = sim.config().clone();
        let stepper = Stepper {
            painting: format!("/sessions/{id}/painting.png"),
            total_steps: step_count(duration, config.dt),
            tick: Duration::from_secs_f64(config.dt / time_scale),
            sim,
            rx,
            settings,
            progress: progress.clone(),
            stop: stop.clone(),
            tx: None,
            stamps: Vec::new(),
            next_tag: 0,
            in_flight: HashMap::new(),
        };
        let thread = std::thread::Builder::new()
            .name(format!("session-{id}"))
            .spawn(move || stepper.run())
            .expect("spawn stepper thread");
        Arc::new(Self { id, config, duration, time_scale, control, progress, stop, thread: Mutex::new(Some(thread)) })
    }

    pub fn progress(&self) -> Progress {
        *self.progress.lock().unwrap()
    }

    /// Hands a command to the stepper; the verdict arrives as an ack frame.
    pub fn submit(&self, command: WireCommand) -> Result<(), String> {
        self.control.send(Control::Command(command)).map_err(|_| "session closed".to_string())
    }

    pub async fn subscribe(&self) -> Option<Subscription> {
        let (reply, rx) = oneshot::channel();
        self.control.send(Control::Subscribe(reply)).ok()?;
        rx.await.ok()
    }

    pub async fn painting(&self) -> Result<Vec<u8>, String> {
        let (reply, rx) = oneshot::channel();
        self.control.send(Control::Render(reply)).map_err(|_| "session closed".to_string())?;
        rx.await.map_err(|_| "session closed".to_string())?
    }

    /// Stops the stepper and waits for it; subscribers see their stream end.
    pub fn stop(&self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = self.control.send(Control::Stop);
        if let Some(handle) = self.thread.lock().unwrap().take() {
            let _ = handle.join();
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::SeqCst);
        let _ = self.control.send(Control::Stop);
    }
}

struct Stepper {
    sim: SimState,
    rx: mpsc::Receiver<Control>,
    settings: StreamSettings,
    progress: Arc<Mutex<Progress>>,
    stop: Arc<AtomicBool>,
    painting: String,
    total_steps: u64,
    tick: Duration,
    tx: Option<broadcast::Sender<Arc<str>>>,
    /// Stamps deposited since the last published snapshot.
    stamps: Vec<Stamp>,
    next_tag: u64,
    in_flight: HashMap<u64, CommandId>,
}

impl Stepper {
    fn run(mut self) {
        let (tx, _) = broadcast::channel(self.settings.channel_capacity);
        self.tx = Some(tx);
        let start = Instant::now();
        let mut next_step = start + self.tick;
        let mut next_snapshot = start + self.settings.snapshot_interval;
        let mut next_keyframe = start + self.settings.keyframe_interval;
        let mut finished = self.total_steps == 0;

        while !finished {
            if self.stop.load(Ordering::SeqCst) {
                return self.set_status(Status::Stopped);
            }
            let now = Instant::now();
            let mut ran = 0;
            while next_step <= now && ran < MAX_CATCH_UP {
                self.advance();
                next_step += self.tick;
                ran += 1;
                if self.sim.step_index() >= self.total_steps {
                    finished = true;
                    break;
                }
            }
            if ran == MAX_CATCH_UP {
                log::debug!("stepper behind schedule; resetting");
                next_step = now + self.tick;
            }
            if finished {
                break;
            }
            if now >= next_snapshot {
                let keyframe = now >= next_keyframe;
                self.publish_snapshot(keyframe);
                if keyframe {
                    next_keyframe = now + self.settings.keyframe_interval;
                }
                next_snapshot += self.settings.snapshot_interval;
                if next_snapshot <= now {
                    next_snapshot = now + self.settings.snapshot_interval;
                }
            }
            self.set_status(if self.sim.is_paused() { Status::Paused } else { Status::Running });

            let wake = next_step.min(next_snapshot);
            match self.rx.recv_timeout(wake.saturating_duration_since(Instant::now())) {
                Ok(control) => {
                    if !self.handle(control) {
                        return self.set_status(Status::Stopped);
                    }
                    while let Ok(control) = self.rx.try_recv() {
                        if !self.handle(control) {
                            return self.set_status(Status::Stopped);
                        }
                    }
                }
                Err(RecvTimeoutError::Timeout) => {}
                Err(RecvTimeoutError::Disconnected) => return,
            }
        }

        self.publish_snapshot(true);
        let done = ServerFrame::Done(self.done_payload());
        self.publish(&done);
        self.tx = None;
        self.set_status(Status::Finished);
        log::info!("{} finished after {} steps", self.painting, self.sim.step_index());

        // Keep answering renders and late subscribers until stopped.
        while let Ok(control) = self.rx.recv() {
            if !self.handle(control) {
                break;
            }
        }
    }

    fn advance(&mut self) {
        let report = self.sim.step();
        self.stamps.extend(report.stamps);
        for tag in report.applied {
            if let Some(id) = self.in_flight.remove(&tag) {
                self.publish(&ServerFrame::Ack(Ack { id, accepted: true, step: report.step, reason: None }));
            }
        }
    }

    /// Returns false when the stepper should exit.
    fn handle(&mut self, control: Control) -> bool {
        match control {
            Control::Command(wire) => {
                let verdict = if self.tx.is_none() {
                    Err("session finished".to_string())
                } else {
                    let tag = self.next_tag;
                    self.sim.enqueue(tag, wire.command).map(|()| {
                        self.next_tag += 1;
                        self.in_flight.insert(tag, wire.id.clone());
                    })
                };
                if let Err(reason) = verdict {
                    let step = self.sim.step_index();
                    self.publish(&ServerFrame::Ack(Ack { id: wire.id, accepted: false, step, reason: Some(reason) }));
                }
            }
            Control::Subscribe(reply) => {
                let subscription = match &self.tx {
                    None => Subscription { first: ServerFrame::Done(self.done_payload()), frames: None },
                    Some(_) => {
                        // Flush pending stamps so the keyframe below is exactly
                        // the state after everything already published.
                        if !self.stamps.is_empty() {
                            self.publish_snapshot(false);
                        }
                        let frames = self.tx.as_ref().map(|tx| tx.subscribe());
                        Subscription { first: ServerFrame::Snapshot(Box::new(self.snapshot(true))), frames }
                    }
                };
                let _ = reply.send(subscription);
            }
            Control::Render(reply) => {
                let _ = reply.send(render_png(self.sim.canvas()).map_err(|e| e.to_string()));
            }
            Control::Stop => return false,
        }
        true
    }

    fn snapshot(&mut self, keyframe: bool) -> SnapshotPayload {
        let keyframe = keyframe.then(|| {
            let png = render_png(self.sim.canvas()).expect("canvas encodes");
            base64::engine::general_purpose::STANDARD.encode(png)
        });
        SnapshotPayload { state: self.sim.snapshot(), stamps: std::mem::take(&mut self.stamps), keyframe }
    }

    fn publish_snapshot(&mut self, keyframe: bool) {
        let frame = ServerFrame::Snapshot(Box::new(self.snapshot(keyframe)));
        self.publish(&frame);
    }

    fn publish(&self, frame: &ServerFrame) {
        if let Some(tx) = &self.tx {
            // No receivers is fine; frames are only for whoever listens.
            let _ = tx.send(Arc::from(frame.to_json()));
        }
    }

    fn done_payload(&self) -> DonePayload {
        DonePayload { step: self.sim.step_index(), clock: self.sim.clock(), painting: self.painting.clone() }
    }

    fn set_status(&self, status: Status) {
        let mut p = self.progress.lock().unwrap();
        *p = Progress { status, step: self.sim.step_index(), clock: self.sim.clock() };
    }
}

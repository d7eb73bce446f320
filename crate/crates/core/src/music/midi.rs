//! Standard MIDI File (format 0 and 1) reader.
//!
//! Only what the analysis needs is decoded: note on/off pairs and tempo
//! meta-events. Everything else is skipped with correct length handling.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use super::{NoteEvent, TempoEvent};

pub const DEFAULT_BPM: f64 = 120.0;
const DEFAULT_USEC_PER_QUARTER: u32 = 500_000;
const PERCUSSION_CHANNEL: u8 = 9;

#[derive(Debug, Error, PartialEq)]
pub enum MidiError {
    #[error("malformed MIDI at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("unsupported MIDI format {0} (only formats 0 and 1 are read)")]
    UnsupportedFormat(u16),
}

impl MidiError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            MidiError::Malformed { offset, .. } => Some(*offset),
            MidiError::UnsupportedFormat(_) => None,
        }
    }
}

/// Result of reading a MIDI file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedMidi {
    /// Notes sorted by onset, then pitch.
    pub notes: Vec<NoteEvent>,
    /// Tempo meta-events converted to seconds; empty when the file has none.
    pub tempo_map: Vec<TempoEvent>,
    /// Tempo in effect at time zero.
    pub initial_bpm: f64,
    /// Number of note-ons that had no matching note-off and were closed at the
    /// end of their track.
    pub unterminated_notes: usize,
}

impl ParsedMidi {
    pub fn has_unterminated_notes(&self) -> bool {
        self.unterminated_notes > 0
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn err(&self, reason: impl Into<String>) -> MidiError {
        MidiError::Malformed { offset: self.pos, reason: reason.into() }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], MidiError> {
        if self.remaining() < n {
            return Err(self.err(format!("truncated {what}: need {n} bytes, {} left", self.remaining())));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self, what: &str) -> Result<u8, MidiError> {
        Ok(self.take(1, what)?[0])
    }

    fn u16(&mut self, what: &str) -> Result<u16, MidiError> {
        let b = self.take(2, what)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self, what: &str) -> Result<u32, MidiError> {
        let b = self.take(4, what)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn vlq(&mut self, what: &str) -> Result<u32, MidiError> {
        let start = self.pos;
        let mut value: u32 = 0;
        for _ in 0..4 {
            let b = self.u8(what)?;
            value = (value << 7) | u32::from(b & 0x7f);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(MidiError::Malformed { offset: start, reason: format!("{what} longer than 4 bytes") })
    }
}

#[derive(Debug, Clone, Copy)]
enum Timing {
    /// Ticks per quarter note; tempo meta-events apply.
    Metrical(u16),
    /// Absolute seconds per tick from SMPTE division.
    Timecode(f64),
}

#[derive(Debug, Clone, Copy)]
enum RawKind {
    NoteOn { channel: u8, key: u8, velocity: u8 },
    NoteOff { channel: u8, key: u8 },
    Tempo(u32),
}

struct RawTrack {
    events: Vec<(u64, RawKind)>,
    end_tick: u64,
}

/// Reads a Standard MIDI File.
///
/// Percussion (channel 10) is excluded. A note-on with no note-off is closed
/// at its track's end and counted in [`ParsedMidi::unterminated_notes`].
pub fn parse_midi(bytes: &[u8]) -> Result<ParsedMidi, MidiError> {
    let mut r = Reader::new(bytes);
    let id = r.take(4, "header chunk id")?;
    if id != b"MThd" {
        return Err(MidiError::Malformed { offset: 0, reason: "missing MThd header".into() });
    }
    let header_len = r.u32("header length")? as usize;
    if header_len < 6 {
        return Err(r.err(format!("header length {header_len} shorter than 6")));
    }
    let header_start = r.pos;
    let format = r.u16("format")?;
    let ntrks = r.u16("track count")?;
    let division_offset = r.pos;
    let division = r.u16("division")?;
    r.take(header_len - (r.pos - header_start), "header padding")?;
    if format > 1 {
        return Err(MidiError::UnsupportedFormat(format));
    }
    let timing = if division & 0x8000 == 0 {
        if division == 0 {
            return Err(MidiError::Malformed { offset: division_offset, reason: "zero ticks per quarter".into() });
        }
        Timing::Metrical(division)
    } else {
        let fps = match -((division >> 8) as u8 as i8) {
            24 => 24.0,
            25 => 25.0,
            29 => 29.97,
            30 => 30.0,
            other => {
                return Err(MidiError::Malformed {
                    offset: division_offset,
                    reason: format!("invalid SMPTE frame rate {other}"),
                })
            }
        };
        let ticks_per_frame = f64::from(division & 0xff);
        if ticks_per_frame == 0.0 {
            return Err(MidiError::Malformed { offset: division_offset, reason: "zero ticks per frame".into() });
        }
        Timing::Timecode(1.0 / (fps * ticks_per_frame))
    };

    let mut tracks = Vec::with_capacity(ntrks as usize);
    while tracks.len() < ntrks as usize {
        if r.remaining() == 0 {
            return Err(r.err(format!("truncated file: expected {ntrks} tracks, found {}", tracks.len())));
        }
        let chunk_id = r.take(4, "chunk id")?;
        let len = r.u32("chunk length")? as usize;
        let body_start = r.pos;
        let body = r.take(len, "track chunk")?;
        if chunk_id != b"MTrk" {
            // Unknown chunk types are skipped.
            continue;
        }
        tracks.push(read_track(body, body_start)?);
    }

    let clock = TickClock::new(timing, &tracks);
    let mut notes = Vec::new();
    let mut unterminated = 0;
    for track in &tracks {
        let mut open: HashMap<(u8, u8), VecDeque<(u64, u8)>> = HashMap::new();
        let close = |start: u64, end: u64, key: u8, velocity: u8, notes: &mut Vec<NoteEvent>| {
            let onset = clock.seconds(start);
            let duration = clock.seconds(end) - onset;
            if duration > 0.0 {
                notes.push(NoteEvent::new(onset, duration, key, velocity));
            }
        };
        for &(tick, kind) in &track.events {
            match kind {
                RawKind::NoteOn { channel, key, velocity } if channel != PERCUSSION_CHANNEL => {
                    open.entry((channel, key)).or_default().push_back((tick, velocity));
                }
                RawKind::NoteOff { channel, key } if channel != PERCUSSION_CHANNEL => {
                    if let Some((start, velocity)) = open.get_mut(&(channel, key)).and_then(VecDeque::pop_front) {
                        close(start, tick, key, velocity, &mut notes);
                    }
                }
                _ => {}
            }
        }
        let mut dangling: Vec<_> = open
            .into_iter()
            .flat_map(|((_, key), starts)| starts.into_iter().map(move |(s, v)| (s, key, v)))
            .collect();
        dangling.sort_unstable();
        unterminated += dangling.len();
        for (start, key, velocity) in dangling {
            close(start, track.end_tick, key, velocity, &mut notes);
        }
    }
    notes.sort_by(|a, b| a.onset.total_cmp(&b.onset).then(a.pitch.cmp(&b.pitch)));

    let tempo_map = clock.tempo_events();
    let initial_bpm = tempo_map
        .first()
        .filter(|t| t.onset == 0.0)
        .map_or(DEFAULT_BPM, |t| t.bpm);

    Ok(ParsedMidi { notes, tempo_map, initial_bpm, unterminated_notes: unterminated })
}

fn read_track(body: &[u8], base: usize) -> Result<RawTrack, MidiError> {
    let mut r = Reader::new(body);
    let rebase = |e: MidiError| match e {
        MidiError::Malformed { offset, reason } => MidiError::Malformed { offset: offset + base, reason },
        other => other,
    };
    let mut events = Vec::new();
    let mut tick: u64 = 0;
    let mut running: Option<u8> = None;
    while r.remaining() > 0 {
        tick += u64::from(r.vlq("delta time").map_err(rebase)?);
        let first = r.u8("event status").map_err(rebase)?;
        match first {
            0xff => {
                running = None;
                let meta = r.u8("meta type").map_err(rebase)?;
                let len = r.vlq("meta length").map_err(rebase)? as usize;
                let data = r.take(len, "meta data").map_err(rebase)?;
                match meta {
                    0x2f => return Ok(RawTrack { events, end_tick: tick }),
                    0x51 => {
                        if len != 3 {
                            return Err(rebase(r.err(format!("tempo meta-event of length {len}"))));
                        }
                        let usec = u32::from_be_bytes([0, data[0], data[1], data[2]]);
                        if usec == 0 {
                            return Err(rebase(r.err("zero tempo")));
                        }
                        events.push((tick, RawKind::Tempo(usec)));
                    }
                    _ => {}
                }
            }
            0xf0 | 0xf7 => {
                running = None;
                let len = r.vlq("sysex length").map_err(rebase)? as usize;
                r.take(len, "sysex data").map_err(rebase)?;
            }
            0xf1..=0xfe => {
                return Err(rebase(MidiError::Malformed {
                    offset: r.pos - 1,
                    reason: format!("unexpected status byte {first:#04x} in track"),
                }));
            }
            _ => {
                let (status, data0) = if first & 0x80 != 0 {
                    running = Some(first);
                    (first, r.u8("channel data").map_err(rebase)?)
                } else {
                    let status = running.ok_or_else(|| {
                        rebase(MidiError::Malformed {
                            offset: r.pos - 1,
                            reason: "data byte without running status".into(),
                        })
                    })?;
                    (status, first)
                };
                let channel = status & 0x0f;
                let kind = status & 0xf0;
                let data1 = match kind {
                    0xc0 | 0xd0 => None,
                    _ => Some(r.u8("channel data").map_err(rebase)?),
                };
                if data0 & 0x80 != 0 || data1.is_some_and(|d| d & 0x80 != 0) {
                    return Err(rebase(r.err("channel data byte has high bit set")));
                }
                match (kind, data1) {
                    (0x90, Some(velocity)) if velocity > 0 => {
                        events.push((tick, RawKind::NoteOn { channel, key: data0, velocity }))
                    }
                    (0x90, Some(_)) | (0x80, Some(_)) => {
                        events.push((tick, RawKind::NoteOff { channel, key: data0 }))
                    }
                    _ => {}
                }
            }
        }
    }
    // Missing end-of-track: the track ends at its last event.
    Ok(RawTrack { events, end_tick: tick })
}

/// Converts ticks to seconds through the merged tempo map of all tracks.
struct TickClock {
    timing: Timing,
    /// (tick, seconds at tick, microseconds per quarter from tick on)
    segments: Vec<(u64, f64, u32)>,
    explicit_tempo: bool,
}

impl TickClock {
    fn new(timing: Timing, tracks: &[RawTrack]) -> Self {
        let mut changes: Vec<(u64, u32)> = tracks
            .iter()
            .flat_map(|t| t.events.iter())
            .filter_map(|&(tick, kind)| match kind {
                RawKind::Tempo(usec) => Some((tick, usec)),
                _ => None,
            })
            .collect();
        changes.sort_by_key(|&(tick, _)| tick);

        let explicit_tempo = !changes.is_empty();
        let mut segments = vec![(0u64, 0.0f64, DEFAULT_USEC_PER_QUARTER)];
        if let Timing::Metrical(ppq) = timing {
            for (tick, usec) in changes {
                let &(t0, s0, u0) = segments.last().expect("non-empty");
                let seconds = s0 + (tick - t0) as f64 * f64::from(u0) / 1e6 / f64::from(ppq);
                if tick == t0 {
                    segments.pop();
                }
                segments.push((tick, seconds, usec));
            }
        }
        Self { timing, segments, explicit_tempo }
    }

    fn seconds(&self, tick: u64) -> f64 {
        match self.timing {
            Timing::Timecode(per_tick) => tick as f64 * per_tick,
            Timing::Metrical(ppq) => {
                let idx = self.segments.partition_point(|&(t, _, _)| t <= tick) - 1;
                let (t0, s0, usec) = self.segments[idx];
                s0 + (tick - t0) as f64 * f64::from(usec) / 1e6 / f64::from(ppq)
            }
        }
    }

    fn tempo_events(&self) -> Vec<TempoEvent> {
        if !self.explicit_tempo || matches!(self.timing, Timing::Timecode(_)) {
            return Vec::new();
        }
        let mut out: Vec<TempoEvent> = Vec::new();
        for &(_, seconds, usec) in &self.segments {
            let bpm = 60e6 / f64::from(usec);
            if out.last().is_some_and(|last| last.bpm == bpm) {
                continue;
            }
            out.push(TempoEvent::new(seconds, bpm));
        }
        out
    }
}

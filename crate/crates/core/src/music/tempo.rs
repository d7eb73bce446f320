use super::{NoteEvent, TempoEvent, DEFAULT_BPM};

/// Length of the sliding window used to estimate tempo from onsets.
pub const TEMPO_WINDOW_SECONDS: f64 = 4.0;
/// Relative change that triggers a new tempo event.
pub const TEMPO_CHANGE_THRESHOLD: f64 = 0.05;

const ONSET_MERGE_EPS: f64 = 1e-6;

/// Tempo events for a piece.
///
/// Tempo meta-events pass through untouched. Without them the tempo is
/// `60 / median inter-onset interval` over a sliding window starting at each
/// onset, emitted whenever it moves by more than [`TEMPO_CHANGE_THRESHOLD`].
pub fn extract_tempo(notes: &[NoteEvent], meta: &[TempoEvent]) -> Vec<TempoEvent> {
    if !meta.is_empty() {
        let mut out = meta.to_vec();
        out.sort_by(|a, b| a.onset.total_cmp(&b.onset));
        return out;
    }

    let mut onsets: Vec<f64> = notes.iter().map(|n| n.onset).collect();
    onsets.sort_by(f64::total_cmp);
    onsets.dedup_by(|b, a| (*b - *a).abs() < ONSET_MERGE_EPS);

    let mut out: Vec<TempoEvent> = Vec::new();
    for (i, &start) in onsets.iter().enumerate() {
        let window: Vec<f64> = onsets[i..]
            .iter()
            .take_while(|&&t| t < start + TEMPO_WINDOW_SECONDS)
            .copied()
            .collect();
        let mut iois: Vec<f64> = window.windows(2).map(|w| w[1] - w[0]).collect();
        if iois.is_empty() {
            continue;
        }
        let bpm = 60.0 / median(&mut iois);
        match out.last() {
            None => out.push(TempoEvent::new(0.0, bpm)),
            Some(last) if ((bpm - last.bpm) / last.bpm).abs() > TEMPO_CHANGE_THRESHOLD => {
                out.push(TempoEvent::new(start, bpm))
            }
            _ => {}
        }
    }
    if out.is_empty() {
        out.push(TempoEvent::new(0.0, DEFAULT_BPM));
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

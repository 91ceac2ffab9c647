//! Speech/pause segmentation from frame energy, and selection of emphasis
//! targets from pitch peaks.

use crate::error::Result;
use crate::prosody::{PitchContour, Segment, SegmentKind, SegmentMap};

pub const DEFAULT_MIN_PAUSE_S: f64 = 0.15;
pub const DEFAULT_THRESHOLD_RATIO: f64 = 0.1;

/// Splits the contour's frame axis into speech and pause segments.
///
/// A frame is quiet when its RMS is at or below `threshold_ratio` times the
/// median frame RMS (at-or-below so an all-silent signal, whose median is 0,
/// counts as quiet). Quiet runs of at least `min_pause_s` become pauses;
/// everything else is speech. Speech segments are then ranked by their peak
/// voiced f0 and the top `emphasis_top_fraction` become emphasis targets.
pub fn detect_segments(
    contour: &PitchContour,
    min_pause_s: f64,
    threshold_ratio: f64,
    emphasis_top_fraction: f64,
) -> Result<SegmentMap> {
    contour.validate()?;
    let frames = contour.len();

    let mut sorted = contour.rms.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if frames % 2 == 1 {
        sorted[frames / 2]
    } else {
        0.5 * (sorted[frames / 2 - 1] + sorted[frames / 2])
    };
    let threshold = threshold_ratio * median;
    let min_pause_frames = (min_pause_s / contour.hop_s).ceil().max(1.0) as usize;

    // Mark pause frames: quiet runs long enough to count.
    let quiet: Vec<bool> = contour.rms.iter().map(|r| *r <= threshold).collect();
    let mut is_pause = vec![false; frames];
    let mut run_start = 0usize;
    for t in 0..=frames {
        // t == frames acts as a sentinel non-quiet frame closing any open run
        let in_run = quiet.get(t).copied().unwrap_or(false);
        if !in_run {
            if t - run_start >= min_pause_frames {
                for p in is_pause.iter_mut().take(t).skip(run_start) {
                    *p = true;
                }
            }
            run_start = t + 1;
        }
    }

    // Collapse per-frame kinds into merged segments.
    let mut segments: Vec<Segment> = Vec::new();
    for (t, &pause) in is_pause.iter().enumerate() {
        let kind = if pause {
            SegmentKind::Pause
        } else {
            SegmentKind::Speech
        };
        match segments.last_mut() {
            Some(last) if last.kind == kind => last.end_frame = t + 1,
            _ => segments.push(Segment {
                start_frame: t,
                end_frame: t + 1,
                kind,
            }),
        }
    }

    // Rank speech segments by their peak voiced f0; the top fraction
    // (rounded up, so any positive fraction selects at least one) become
    // emphasis targets.
    let mut peaks: Vec<(usize, f64)> = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        if seg.kind != SegmentKind::Speech {
            continue;
        }
        let peak = (seg.start_frame..seg.end_frame)
            .filter(|t| contour.voiced[*t])
            .map(|t| contour.f0_hz[t])
            .fold(f64::MIN, f64::max);
        if peak > f64::MIN {
            peaks.push((i, peak));
        }
    }
    let mut emphasis_targets = Vec::new();
    if emphasis_top_fraction > 0.0 && !peaks.is_empty() {
        let n_top = ((emphasis_top_fraction * peaks.len() as f64).ceil() as usize)
            .clamp(1, peaks.len());
        peaks.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        emphasis_targets = peaks[..n_top].iter().map(|(i, _)| *i).collect();
        emphasis_targets.sort_unstable();
    }

    let map = SegmentMap {
        segments,
        emphasis_targets,
        total_frames: frames,
        hop: contour.hop_samples(),
    };
    Ok(map)
}

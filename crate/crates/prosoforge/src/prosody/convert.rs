//! Read-to-conversational conversion: analyze, reshape the pitch contour,
//! retime speech and pauses, realize the new contour, add stress.

use crate::error::{Error, Result};
use crate::prosody::stretch::wsola;
use crate::prosody::{
    detect_segments, shift_pitch, track_pitch, transform_contour, PitchRange, PitchSpan,
    ProsodyProfile, Segment, SegmentKind, SegmentMap, Span, TimeMap, DEFAULT_MIN_PAUSE_S,
    DEFAULT_THRESHOLD_RATIO,
};
use crate::signal::{AudioBuffer, FrameSpec};

const MIN_DURATION_S: f64 = 0.5;
/// Frames per pitch-ratio block: ~80 ms at the default grid, short enough to
/// follow melody movement, long enough to smooth tracker jitter.
const RATIO_BLOCK_FRAMES: usize = 5;

pub fn convert(audio: &AudioBuffer, profile: &ProsodyProfile) -> Result<AudioBuffer> {
    profile.validate()?;
    if audio.duration_s() < MIN_DURATION_S {
        return Err(Error::Validation(format!(
            "input is {:.3} s, conversion needs at least {MIN_DURATION_S} s",
            audio.duration_s()
        )));
    }

    let spec = FrameSpec::default();
    let range = PitchRange::default();
    let contour = track_pitch(audio, &range, &spec)?;
    let map = detect_segments(
        &contour,
        DEFAULT_MIN_PAUSE_S,
        DEFAULT_THRESHOLD_RATIO,
        profile.emphasis_top_fraction,
    )?;
    let target = transform_contour(&contour, profile)?;

    // Retiming: speech runs at the profile tempo, pauses stretch by
    // pause_scale (rate clamped to the stretcher's legal band, which is
    // narrower than pause_scale's own).
    let mut spans: Vec<Span> = Vec::new();
    for (i, seg) in map.segments.iter().enumerate() {
        let (start, end) = map.sample_range(i, audio.len());
        if end <= start {
            continue;
        }
        let rate = match seg.kind {
            SegmentKind::Speech => profile.tempo,
            SegmentKind::Pause => (1.0 / profile.pause_scale).clamp(0.5, 2.0),
        };
        spans.push(Span { start, end, rate });
    }
    let tmap = TimeMap::new(&spans, audio.len())?;
    let stretched = if spans.iter().all(|s| s.rate == 1.0) {
        audio.clone()
    } else {
        wsola(audio, &tmap)?
    };

    // Pitch realization: per-frame target/source ratios, smoothed to block
    // medians inside speech segments, mapped onto the stretched time axis.
    let hop = map.hop;
    let mut blocks: Vec<(usize, f64)> = Vec::new(); // (input start sample, ratio)
    for (i, seg) in map.segments.iter().enumerate() {
        let (seg_s, seg_e) = map.sample_range(i, audio.len());
        if seg_e <= seg_s {
            continue;
        }
        if seg.kind == SegmentKind::Pause {
            blocks.push((seg_s, 1.0));
            continue;
        }
        let mut f = seg.start_frame;
        while f < seg.end_frame {
            let f_end = (f + RATIO_BLOCK_FRAMES).min(seg.end_frame);
            let mut ratios: Vec<f64> = (f..f_end)
                .filter(|t| contour.voiced[*t] && contour.f0_hz[*t] > 0.0)
                .map(|t| target.f0_hz[t] / contour.f0_hz[t])
                .collect();
            let ratio = if ratios.is_empty() {
                1.0
            } else {
                ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let n = ratios.len();
                let m = if n % 2 == 1 {
                    ratios[n / 2]
                } else {
                    0.5 * (ratios[n / 2 - 1] + ratios[n / 2])
                };
                m.clamp(0.5, 2.0)
            };
            let block_start = (f * hop).max(seg_s).min(seg_e);
            blocks.push((block_start, ratio));
            f = f_end;
        }
    }
    let mut pspans: Vec<PitchSpan> = Vec::new();
    for (k, (in_start, ratio)) in blocks.iter().enumerate() {
        let in_end = blocks.get(k + 1).map_or(audio.len(), |(s, _)| *s);
        let out_start = tmap.forward(*in_start);
        let out_end = tmap.forward(in_end);
        if out_end > out_start {
            pspans.push(PitchSpan {
                start: out_start,
                end: out_end,
                ratio: *ratio,
            });
        }
    }
    let shifted = shift_pitch(&stretched, &pspans)?;

    // Stress: emphasis map carried onto the stretched frame grid.
    let emphasized = if profile.emphasis_gain_db == 0.0 || map.emphasis_targets.is_empty() {
        shifted
    } else {
        let remapped = remap_segments(&map, &tmap, audio.len(), shifted.len());
        crate::prosody::apply_emphasis(&shifted, &remapped, profile.emphasis_gain_db)?
    };

    Ok(emphasized.peak_limited())
}

/// Rebuilds a segment map in post-stretch coordinates. Frame boundaries are
/// rounded onto the hop grid; degenerate segments drop out and same-kind
/// neighbors merge, with emphasis marks surviving any merge.
fn remap_segments(
    map: &SegmentMap,
    tmap: &TimeMap,
    in_len: usize,
    out_len: usize,
) -> SegmentMap {
    let hop = map.hop;
    let total_frames_out = out_len / hop + 1;
    let mut segments: Vec<Segment> = Vec::new();
    let mut marked: Vec<bool> = Vec::new();
    let mut cursor = 0usize;
    for (i, seg) in map.segments.iter().enumerate() {
        let (_, in_end) = map.sample_range(i, in_len);
        let mut end_f = if i + 1 == map.segments.len() {
            total_frames_out
        } else {
            ((tmap.forward(in_end) as f64 / hop as f64).round() as usize).min(total_frames_out)
        };
        end_f = end_f.max(cursor);
        if end_f == cursor {
            continue;
        }
        let is_target = map.emphasis_targets.contains(&i);
        match segments.last_mut() {
            Some(last) if last.kind == seg.kind => {
                last.end_frame = end_f;
                let m = marked.last_mut().expect("parallel to segments");
                *m = *m || is_target;
            }
            _ => {
                segments.push(Segment {
                    start_frame: cursor,
                    end_frame: end_f,
                    kind: seg.kind,
                });
                marked.push(is_target);
            }
        }
        cursor = end_f;
    }
    if let Some(last) = segments.last_mut() {
        last.end_frame = total_frames_out;
    }
    let emphasis_targets = marked
        .iter()
        .enumerate()
        .filter(|(i, m)| **m && segments[*i].kind == SegmentKind::Speech)
        .map(|(i, _)| i)
        .collect();
    SegmentMap {
        segments,
        emphasis_targets,
        total_frames: total_frames_out,
        hop,
    }
}

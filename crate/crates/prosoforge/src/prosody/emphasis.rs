//! Emphatic stress: gain applied to marked segments with short linear fades
//! at their boundaries.

use crate::error::{Error, Result};
use crate::prosody::SegmentMap;
use crate::signal::AudioBuffer;

pub const GAIN_DB_MAX: f64 = 12.0;
const FADE_S: f64 = 0.010;

/// Scales the map's emphasis-target segments by `gain_db` with 10 ms linear
/// fade edges inside each target. If the result would clip, the whole signal
/// is scaled down uniformly so the peak is 1.0.
pub fn apply_emphasis(
    audio: &AudioBuffer,
    map: &SegmentMap,
    gain_db: f64,
) -> Result<AudioBuffer> {
    if !(0.0..=GAIN_DB_MAX).contains(&gain_db) {
        return Err(Error::Validation(format!(
            "emphasis gain {gain_db} dB outside [0, {GAIN_DB_MAX}]"
        )));
    }
    map.validate()?;
    if gain_db == 0.0 || map.emphasis_targets.is_empty() {
        return Ok(audio.clone());
    }

    let gain = 10f64.powf(gain_db / 20.0);
    let fade = (FADE_S * f64::from(audio.sample_rate_hz())).round() as usize;
    let n = audio.len();
    let mut envelope = vec![1.0f64; n];

    for &i in &map.emphasis_targets {
        let (start, end) = map.sample_range(i, n);
        if end <= start {
            continue;
        }
        let len = end - start;
        let edge = fade.min(len / 2);
        for (k, e) in envelope[start..end].iter_mut().enumerate() {
            // Ramp 1 -> gain over the leading edge, gain -> 1 over the
            // trailing edge, flat gain between.
            let up = if edge > 0 && k < edge {
                (k + 1) as f64 / edge as f64
            } else {
                1.0
            };
            let down = if edge > 0 && k >= len - edge {
                (len - k) as f64 / edge as f64
            } else {
                1.0
            };
            let ramp = up.min(down);
            *e = 1.0 + (gain - 1.0) * ramp;
        }
    }

    let samples: Vec<f32> = audio
        .samples()
        .iter()
        .zip(&envelope)
        .map(|(s, e)| (f64::from(*s) * e) as f32)
        .collect();
    AudioBuffer::new(samples, audio.sample_rate_hz()).map(AudioBuffer::peak_limited)
}

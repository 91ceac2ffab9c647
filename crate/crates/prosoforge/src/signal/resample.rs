//! Windowed-sinc sample-rate conversion: 32-tap-per-side Kaiser-windowed
//! sinc kernel, cutoff at the lower Nyquist, edges treated as zero.

use crate::error::{Error, Result};
use crate::signal::{AudioBuffer, MIN_SAMPLE_RATE_HZ};

const TAPS_PER_SIDE: isize = 32;
const KAISER_BETA: f64 = 8.6;

/// Zeroth-order modified Bessel function of the first kind (series form,
/// converges quickly for the argument range used here).
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half_x = x / 2.0;
    for k in 1..=30 {
        term *= (half_x / k as f64) * (half_x / k as f64);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

fn kaiser(offset: f64) -> f64 {
    // offset in [-1, 1] relative to the kernel half-width.
    let t = 1.0 - offset * offset;
    if t <= 0.0 {
        return 0.0;
    }
    bessel_i0(KAISER_BETA * t.sqrt()) / bessel_i0(KAISER_BETA)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Band-limited redraw of `samples` on a grid `ratio` times as dense:
/// output length `round(len * ratio)`, edges treated as zero.
pub(crate) fn resample_by(samples: &[f32], ratio: f64) -> Vec<f32> {
    // When downsampling, the kernel is both lowpass (cutoff < 1) and wider by
    // 1/cutoff so the transition stays below the new Nyquist.
    let cutoff = ratio.min(1.0);
    let half_width = (f64::from(TAPS_PER_SIDE as i32) / cutoff).ceil() as isize;
    let out_len = (samples.len() as f64 * ratio).round() as usize;
    let mut out = Vec::with_capacity(out_len);

    for m in 0..out_len {
        let center = m as f64 / ratio;
        let base = center.floor() as isize;
        let mut acc = 0.0f64;
        for k in (base - half_width)..=(base + half_width) {
            if k < 0 || k >= samples.len() as isize {
                continue;
            }
            let dx = center - k as f64;
            let w = kaiser(dx * cutoff / f64::from(TAPS_PER_SIDE as i32));
            acc += f64::from(samples[k as usize]) * cutoff * sinc(dx * cutoff) * w;
        }
        out.push(acc as f32);
    }
    out
}

/// Resamples to `target_hz`. Identity rates return the input unchanged.
pub fn resample(audio: &AudioBuffer, target_hz: u32) -> Result<AudioBuffer> {
    if target_hz < MIN_SAMPLE_RATE_HZ {
        return Err(Error::Validation(format!(
            "target sample rate {target_hz} Hz below minimum {MIN_SAMPLE_RATE_HZ} Hz"
        )));
    }
    let source_hz = audio.sample_rate_hz();
    if target_hz == source_hz {
        return Ok(audio.clone());
    }
    if audio.is_empty() {
        return AudioBuffer::new(Vec::new(), target_hz);
    }
    let ratio = f64::from(target_hz) / f64::from(source_hz);
    let out = resample_by(audio.samples(), ratio);
    AudioBuffer::new(out, target_hz).map(AudioBuffer::peak_limited)
}

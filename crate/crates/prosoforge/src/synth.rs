//! Deterministic signal generators for demos, training toys, and tests:
//! tones, chirps, vibrato, and a harmonics-plus-noise "speech-like" fixture.

use crate::error::Result;
use crate::rng::SplitMix64;
use crate::signal::AudioBuffer;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Pure sine at `freq_hz`, amplitude 0.5.
pub fn tone(freq_hz: f64, sample_rate_hz: u32, duration_s: f64) -> Result<AudioBuffer> {
    let n = (duration_s * f64::from(sample_rate_hz)).round() as usize;
    let sr = f64::from(sample_rate_hz);
    let samples = (0..n)
        .map(|i| (0.5 * (TWO_PI * freq_hz * i as f64 / sr).sin()) as f32)
        .collect();
    AudioBuffer::new(samples, sample_rate_hz)
}

/// Sine sweeping linearly from `f_start_hz` to `f_end_hz`.
pub fn chirp(
    f_start_hz: f64,
    f_end_hz: f64,
    sample_rate_hz: u32,
    duration_s: f64,
) -> Result<AudioBuffer> {
    let n = (duration_s * f64::from(sample_rate_hz)).round() as usize;
    let sr = f64::from(sample_rate_hz);
    let mut phase = 0.0f64;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let f = f_start_hz + (f_end_hz - f_start_hz) * i as f64 / n as f64;
        samples.push((0.5 * phase.sin()) as f32);
        phase += TWO_PI * f / sr;
    }
    AudioBuffer::new(samples, sample_rate_hz)
}

/// Tone whose pitch wobbles sinusoidally around `center_hz` by
/// `extent_semitones` at `vibrato_hz`.
pub fn vibrato_tone(
    center_hz: f64,
    extent_semitones: f64,
    vibrato_hz: f64,
    sample_rate_hz: u32,
    duration_s: f64,
) -> Result<AudioBuffer> {
    let n = (duration_s * f64::from(sample_rate_hz)).round() as usize;
    let sr = f64::from(sample_rate_hz);
    let mut phase = 0.0f64;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let dev = extent_semitones * (TWO_PI * vibrato_hz * i as f64 / sr).sin();
        let f = center_hz * (dev / 12.0).exp2();
        samples.push((0.5 * phase.sin()) as f32);
        phase += TWO_PI * f / sr;
    }
    AudioBuffer::new(samples, sample_rate_hz)
}

/// Tone, then silence, then tone — the canonical pause fixture.
pub fn tone_silence_tone(
    freq_hz: f64,
    tone_s: f64,
    silence_s: f64,
    sample_rate_hz: u32,
) -> Result<AudioBuffer> {
    let sr = f64::from(sample_rate_hz);
    let nt = (tone_s * sr).round() as usize;
    let ns = (silence_s * sr).round() as usize;
    let mut samples = Vec::with_capacity(2 * nt + ns);
    for i in 0..nt {
        samples.push((0.5 * (TWO_PI * freq_hz * i as f64 / sr).sin()) as f32);
    }
    samples.extend(std::iter::repeat_n(0.0f32, ns));
    for i in 0..nt {
        samples.push((0.5 * (TWO_PI * freq_hz * i as f64 / sr).sin()) as f32);
    }
    AudioBuffer::new(samples, sample_rate_hz)
}

/// Three harmonics of `f0_hz` with decaying amplitudes plus a little seeded
/// noise: enough spectral structure to exercise vocoders and metrics the way
/// voiced speech does.
pub fn speech_like(
    f0_hz: f64,
    sample_rate_hz: u32,
    duration_s: f64,
    seed: u64,
) -> Result<AudioBuffer> {
    let n = (duration_s * f64::from(sample_rate_hz)).round() as usize;
    let sr = f64::from(sample_rate_hz);
    let mut rng = SplitMix64::new(seed);
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / sr;
        let s = 0.4 * (TWO_PI * f0_hz * t).sin()
            + 0.2 * (TWO_PI * 2.0 * f0_hz * t).sin()
            + 0.1 * (TWO_PI * 3.0 * f0_hz * t).sin()
            + 0.02 * rng.next_symmetric(1.0);
        samples.push(s as f32);
    }
    AudioBuffer::new(samples, sample_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_match_duration() {
        assert_eq!(tone(220.0, 16000, 2.0).unwrap().len(), 32000);
        assert_eq!(chirp(200.0, 300.0, 16000, 1.5).unwrap().len(), 24000);
        assert_eq!(
            tone_silence_tone(220.0, 1.0, 0.5, 16000).unwrap().len(),
            40000
        );
    }

    #[test]
    fn speech_like_is_deterministic() {
        let a = speech_like(120.0, 16000, 0.5, 11).unwrap();
        let b = speech_like(120.0, 16000, 0.5, 11).unwrap();
        assert_eq!(a, b);
        let c = speech_like(120.0, 16000, 0.5, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn amplitudes_bounded() {
        let v = vibrato_tone(220.0, 2.0, 2.0, 16000, 1.0).unwrap();
        assert!(v.peak() <= 1.0);
        let s = speech_like(120.0, 16000, 0.5, 3).unwrap();
        assert!(s.peak() <= 1.0);
    }
}

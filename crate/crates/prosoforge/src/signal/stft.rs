//! Short-time Fourier transform and its inverse.
//!
//! Analysis centers frame `t` on sample `t * hop` by reflect-padding
//! `n_fft / 2` samples at each end, producing `floor(len / hop) + 1` frames.
//! Synthesis overlap-adds windowed inverse FFTs and divides by the summed
//! squared window, then strips the padding: the output length is exactly
//! `(frames - 1) * hop`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::signal::{reflect_index, AudioBuffer, ComplexSpectrogram, FrameSpec};

pub fn stft(audio: &AudioBuffer, spec: &FrameSpec) -> Result<ComplexSpectrogram> {
    spec.validate()?;
    if audio.is_empty() {
        return Err(Error::Validation("stft of empty signal".into()));
    }
    let n = spec.n_fft;
    let half = (n / 2) as isize;
    let window = spec.window.evaluate(n);
    let samples = audio.samples();
    let frames = spec.frames_for_len(samples.len());

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let mut out = ComplexSpectrogram::new(frames, n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];

    for t in 0..frames {
        let center = (t * spec.hop) as isize;
        for (k, b) in buf.iter_mut().enumerate() {
            let idx = reflect_index(center - half + k as isize, samples.len());
            *b = Complex64::new(f64::from(samples[idx]) * window[k], 0.0);
        }
        fft.process(&mut buf);
        for (bin, &v) in buf.iter().enumerate().take(spec.bins()) {
            out.set(t, bin, v);
        }
    }
    Ok(out)
}

/// Magnitude spectrogram `frames x bins` from a complex STFT.
pub fn magnitude(spectrogram: &ComplexSpectrogram) -> Mat {
    let bins = spectrogram.bins();
    let mut m = Mat::zeros(spectrogram.frames, bins);
    for t in 0..spectrogram.frames {
        for b in 0..bins {
            m.set(t, b, spectrogram.get(t, b).norm());
        }
    }
    m
}

pub fn istft(
    spectrogram: &ComplexSpectrogram,
    spec: &FrameSpec,
    sample_rate_hz: u32,
) -> Result<AudioBuffer> {
    spec.validate()?;
    if spectrogram.n_fft != spec.n_fft {
        return Err(Error::Validation(format!(
            "spectrogram n_fft {} does not match frame spec n_fft {}",
            spectrogram.n_fft, spec.n_fft
        )));
    }
    if spectrogram.frames == 0 {
        return Err(Error::Validation("istft of empty spectrogram".into()));
    }
    // Overlap-add requires the window to cover every sample: Hann needs at
    // least 2x overlap, rect needs frames that tile without gaps.
    let cola_ok = match spec.window {
        crate::signal::Window::HannPeriodic => spec.hop <= spec.n_fft / 2,
        crate::signal::Window::Rect => true,
    };
    if !cola_ok {
        return Err(Error::Validation(format!(
            "window/hop combination violates overlap-add coverage: hann with hop {} > n_fft/2 = {}",
            spec.hop,
            spec.n_fft / 2
        )));
    }

    let n = spec.n_fft;
    let half = n / 2;
    let frames = spectrogram.frames;
    let window = spec.window.evaluate(n);
    let padded_len = (frames - 1) * spec.hop + n;

    let mut planner = FftPlanner::<f64>::new();
    let ifft = planner.plan_fft_inverse(n);

    let mut acc = vec![0.0f64; padded_len];
    let mut wsum = vec![0.0f64; padded_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];

    for t in 0..frames {
        // Rebuild the full spectrum from the one-sided half via conjugate
        // symmetry, then inverse-transform.
        for (bin, slot) in buf.iter_mut().enumerate() {
            *slot = if bin <= half {
                spectrogram.get(t, bin)
            } else {
                spectrogram.get(t, n - bin).conj()
            };
        }
        ifft.process(&mut buf);
        let start = t * spec.hop;
        for k in 0..n {
            let v = buf[k].re / n as f64; // rustfft leaves the inverse unscaled
            acc[start + k] += v * window[k];
            wsum[start + k] += window[k] * window[k];
        }
    }

    let out_len = (frames - 1) * spec.hop;
    let mut samples = Vec::with_capacity(out_len);
    for i in 0..out_len {
        let w = wsum[half + i];
        if w < 1e-11 {
            return Err(Error::Numeric(format!(
                "window overlap sums to {w:.3e} at sample {i}; frames do not cover the signal"
            )));
        }
        samples.push((acc[half + i] / w) as f32);
    }
    AudioBuffer::new(samples, sample_rate_hz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Window;

    fn sine(freq: f64, sr: u32, len: usize) -> AudioBuffer {
        let samples = (0..len)
            .map(|n| (2.0 * std::f64::consts::PI * freq * n as f64 / sr as f64).sin() as f32 * 0.5)
            .collect();
        AudioBuffer::new(samples, sr).unwrap()
    }

    #[test]
    fn frame_count_and_bins() {
        let audio = sine(440.0, 16000, 16000);
        let spec = FrameSpec::default();
        let s = stft(&audio, &spec).unwrap();
        assert_eq!(s.frames, 63);
        assert_eq!(s.bins(), 513);
    }

    #[test]
    fn sine_peaks_at_expected_bin() {
        // 1000 Hz at 16 kHz with n_fft 1024: bin = 1000 / (16000/1024) = 64.
        // Edge frames see the reflected extension, which inverts the sine's
        // phase and smears energy, so only interior frames are checked.
        let audio = sine(1000.0, 16000, 8192);
        let spec = FrameSpec::default();
        let m = magnitude(&stft(&audio, &spec).unwrap());
        for t in 2..m.rows() - 2 {
            let row = m.row(t);
            let argmax = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(argmax, 64, "frame {t}");
        }
    }

    #[test]
    fn istft_inverts_stft() {
        // Deterministic noise-ish signal: decorrelated enough to catch
        // windowing or indexing bugs anywhere in the frame.
        let sr = 16000;
        let samples: Vec<f32> = (0..4096)
            .map(|n| {
                let x = n as f64;
                ((x * 0.71).sin() * 0.3 + (x * 0.137).cos() * 0.2) as f32
            })
            .collect();
        let audio = AudioBuffer::new(samples, sr).unwrap();
        let spec = FrameSpec::default();
        let s = stft(&audio, &spec).unwrap();
        let back = istft(&s, &spec, sr).unwrap();
        assert_eq!(back.len(), (s.frames - 1) * spec.hop);
        let n = back.len().min(audio.len());
        let mut max_err = 0.0f32;
        for i in 0..n {
            max_err = max_err.max((audio.samples()[i] - back.samples()[i]).abs());
        }
        assert!(max_err < 1e-6, "max reconstruction error {max_err}");
    }

    #[test]
    fn istft_length_contract() {
        let audio = sine(220.0, 16000, 5000);
        let spec = FrameSpec::default();
        let s = stft(&audio, &spec).unwrap();
        let back = istft(&s, &spec, 16000).unwrap();
        assert_eq!(back.len(), (5000 / 256) * 256);
    }

    #[test]
    fn rect_window_hop_equal_nfft_roundtrips() {
        let audio = sine(330.0, 16000, 4096);
        let spec = FrameSpec {
            n_fft: 512,
            hop: 512,
            window: Window::Rect,
        };
        let s = stft(&audio, &spec).unwrap();
        let back = istft(&s, &spec, 16000).unwrap();
        for i in 0..back.len() {
            assert!((audio.samples()[i] - back.samples()[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn hann_with_low_overlap_fails_cola() {
        // Hann needs hop <= n_fft/2 for full coverage.
        let audio = sine(330.0, 16000, 4096);
        for hop in [384usize, 512] {
            let spec = FrameSpec {
                n_fft: 512,
                hop,
                window: Window::HannPeriodic,
            };
            let s = stft(&audio, &spec).unwrap();
            match istft(&s, &spec, 16000) {
                Err(Error::Validation(_)) => {}
                other => panic!("hop {hop}: expected Validation error, got {other:?}"),
            }
        }
    }

    #[test]
    fn rect_parseval_per_frame() {
        // For the rect window, per-frame spectral energy over the full
        // two-sided spectrum equals n_fft times the frame's sample energy.
        let samples: Vec<f32> = (0..2048)
            .map(|n| ((n as f64 * 0.31).sin() * 0.4 + (n as f64 * 0.057).cos() * 0.1) as f32)
            .collect();
        let audio = AudioBuffer::new(samples.clone(), 16000).unwrap();
        let spec = FrameSpec {
            n_fft: 256,
            hop: 64,
            window: Window::Rect,
        };
        let s = stft(&audio, &spec).unwrap();
        let half = spec.n_fft / 2;
        for t in [3usize, 10, 17] {
            let center = (t * spec.hop) as isize;
            let mut time_energy = 0.0f64;
            for k in 0..spec.n_fft {
                let idx = crate::signal::reflect_index(
                    center - half as isize + k as isize,
                    samples.len(),
                );
                time_energy += f64::from(samples[idx]).powi(2);
            }
            let mut spec_energy = s.get(t, 0).norm_sqr() + s.get(t, half).norm_sqr();
            for b in 1..half {
                spec_energy += 2.0 * s.get(t, b).norm_sqr();
            }
            let rel = (spec_energy - spec.n_fft as f64 * time_energy).abs()
                / (spec.n_fft as f64 * time_energy);
            assert!(rel < 1e-6, "frame {t}: relative error {rel}");
        }
    }

    #[test]
    fn stft_is_linear_in_amplitude() {
        // Scale by a power of two so the f32 sample scaling is exact and the
        // comparison isolates the transform's own linearity.
        let base: Vec<f32> = (0..2048)
            .map(|n| ((n as f64 * 0.23).sin() * 0.3) as f32)
            .collect();
        let scaled: Vec<f32> = base.iter().map(|s| s * 0.5).collect();
        let spec = FrameSpec::default();
        let sa = stft(&AudioBuffer::new(base, 16000).unwrap(), &spec).unwrap();
        let sb = stft(&AudioBuffer::new(scaled, 16000).unwrap(), &spec).unwrap();
        for t in 0..sa.frames {
            for b in 0..sa.bins() {
                let expect = sa.get(t, b) * 0.5;
                let got = sb.get(t, b);
                let denom = expect.norm().max(1e-12);
                assert!(
                    (expect - got).norm() / denom < 1e-9,
                    "frame {t} bin {b}: {expect} vs {got}"
                );
            }
        }
    }

    #[test]
    fn invalid_frame_specs_rejected() {
        let audio = sine(330.0, 16000, 1024);
        for spec in [
            FrameSpec {
                n_fft: 1000,
                hop: 256,
                window: Window::HannPeriodic,
            },
            FrameSpec {
                n_fft: 1024,
                hop: 0,
                window: Window::HannPeriodic,
            },
            FrameSpec {
                n_fft: 1024,
                hop: 2048,
                window: Window::HannPeriodic,
            },
        ] {
            assert!(stft(&audio, &spec).is_err(), "{spec:?}");
        }
    }

    #[test]
    fn dc_signal_energy_in_bin_zero() {
        let audio = AudioBuffer::new(vec![0.5; 2048], 16000).unwrap();
        let spec = FrameSpec::default();
        let m = magnitude(&stft(&audio, &spec).unwrap());
        // Window sum for periodic Hann of length N is N/2; DC bin magnitude
        // is 0.5 * 512 = 256 for interior frames.
        let mid = m.rows() / 2;
        assert!((m.get(mid, 0) - 256.0).abs() < 1e-9);
    }
}

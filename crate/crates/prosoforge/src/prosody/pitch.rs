//! YIN-style pitch tracking.
//!
//! Per frame: the lag-domain difference function (computed via FFT
//! cross-correlation), its cumulative-mean normalization, an absolute
//! threshold of 0.15 with descent to the local minimum, and parabolic lag
//! refinement. Frames whose best dip stays at or above the threshold are
//! unvoiced.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::prosody::PitchContour;
use crate::signal::{reflect_index, AudioBuffer, FrameSpec};

pub const CMND_THRESHOLD: f64 = 0.15;

/// Fundamental-frequency search band in Hz.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PitchRange {
    pub f0_min_hz: f64,
    pub f0_max_hz: f64,
}

impl Default for PitchRange {
    fn default() -> Self {
        PitchRange {
            f0_min_hz: 50.0,
            f0_max_hz: 500.0,
        }
    }
}

impl PitchRange {
    pub fn validate(&self, sample_rate_hz: u32) -> Result<()> {
        // NaN in either bound must fail, hence the explicit is_nan checks.
        if self.f0_min_hz.is_nan()
            || self.f0_max_hz.is_nan()
            || self.f0_min_hz <= 0.0
            || self.f0_min_hz >= self.f0_max_hz
        {
            return Err(Error::Validation(format!(
                "pitch range [{}, {}] malformed",
                self.f0_min_hz, self.f0_max_hz
            )));
        }
        // The tracker needs several samples per period of the highest
        // frequency for the lag search to resolve it.
        if f64::from(sample_rate_hz) < 8.0 * self.f0_max_hz {
            return Err(Error::Validation(format!(
                "sample rate {sample_rate_hz} too low for f0_max {} (need >= 8x)",
                self.f0_max_hz
            )));
        }
        Ok(())
    }
}

pub fn track_pitch(
    audio: &AudioBuffer,
    range: &PitchRange,
    spec: &FrameSpec,
) -> Result<PitchContour> {
    spec.validate()?;
    range.validate(audio.sample_rate_hz())?;
    if audio.is_empty() {
        return Err(Error::Validation("pitch tracking of empty signal".into()));
    }

    let sr = f64::from(audio.sample_rate_hz());
    let n = spec.n_fft;
    let tau_min = (sr / range.f0_max_hz).ceil() as usize;
    let tau_max = (sr / range.f0_min_hz).floor() as usize;
    if tau_max + tau_min >= n {
        return Err(Error::Validation(format!(
            "analysis window {n} too short for f0_min {} at {sr} Hz (max lag {tau_max})",
            range.f0_min_hz
        )));
    }
    // Fixed integration window: every lag is summed over the same w samples.
    let w = n - tau_max;

    let samples = audio.samples();
    let frames = spec.frames_for_len(samples.len());
    let half = (n / 2) as isize;

    // Cross-correlation via FFT: corr(tau) = sum_{j<w} x[j] * x[j+tau].
    let fft_len = n.next_power_of_two() * 2;
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(fft_len);
    let ifft = planner.plan_fft_inverse(fft_len);

    let mut f0_hz = Vec::with_capacity(frames);
    let mut voiced = Vec::with_capacity(frames);
    let mut rms = Vec::with_capacity(frames);

    let mut frame = vec![0.0f64; n];
    let mut a = vec![Complex64::new(0.0, 0.0); fft_len];
    let mut b = vec![Complex64::new(0.0, 0.0); fft_len];
    let mut d = vec![0.0f64; tau_max + 1];
    let mut cmnd = vec![0.0f64; tau_max + 1];

    for t in 0..frames {
        let center = (t * spec.hop) as isize;
        for (k, f) in frame.iter_mut().enumerate() {
            let idx = reflect_index(center - half + k as isize, samples.len());
            *f = f64::from(samples[idx]);
        }
        rms.push((frame.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt());

        for v in a.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for v in b.iter_mut() {
            *v = Complex64::new(0.0, 0.0);
        }
        for j in 0..w {
            a[j] = Complex64::new(frame[j], 0.0);
        }
        for (j, f) in frame.iter().enumerate() {
            b[j] = Complex64::new(*f, 0.0);
        }
        fft.process(&mut a);
        fft.process(&mut b);
        for j in 0..fft_len {
            a[j] = a[j].conj() * b[j];
        }
        ifft.process(&mut a);

        // Difference function d(tau) = e1 + e2(tau) - 2*corr(tau).
        let e1: f64 = frame[..w].iter().map(|x| x * x).sum();
        let mut e2 = e1;
        d[0] = 0.0;
        for tau in 1..=tau_max {
            e2 += frame[tau + w - 1] * frame[tau + w - 1] - frame[tau - 1] * frame[tau - 1];
            let corr = a[tau].re / fft_len as f64;
            d[tau] = (e1 + e2 - 2.0 * corr).max(0.0);
        }

        // Cumulative-mean normalization; silent frames (zero running sum)
        // normalize to 1 and stay unvoiced.
        cmnd[0] = 1.0;
        let mut running = 0.0f64;
        for tau in 1..=tau_max {
            running += d[tau];
            cmnd[tau] = if running > 1e-12 {
                d[tau] * tau as f64 / running
            } else {
                1.0
            };
        }

        // First dip below threshold, then descend to its local minimum.
        let mut pick: Option<usize> = None;
        let mut tau = tau_min;
        while tau <= tau_max {
            if cmnd[tau] < CMND_THRESHOLD {
                while tau < tau_max && cmnd[tau + 1] < cmnd[tau] {
                    tau += 1;
                }
                pick = Some(tau);
                break;
            }
            tau += 1;
        }

        match pick {
            Some(tau) => {
                // Parabolic refinement around the integer lag.
                let refined = if tau > tau_min && tau < tau_max {
                    let (y0, y1, y2) = (cmnd[tau - 1], cmnd[tau], cmnd[tau + 1]);
                    let denom = y0 - 2.0 * y1 + y2;
                    if denom.abs() > 1e-12 {
                        tau as f64 + 0.5 * (y0 - y2) / denom
                    } else {
                        tau as f64
                    }
                } else {
                    tau as f64
                };
                let f0 = (sr / refined).clamp(range.f0_min_hz, range.f0_max_hz);
                f0_hz.push(f0);
                voiced.push(true);
            }
            None => {
                f0_hz.push(0.0);
                voiced.push(false);
            }
        }
    }

    let contour = PitchContour {
        f0_hz,
        voiced,
        rms,
        hop_s: spec.hop as f64 / sr,
        sample_rate_hz: audio.sample_rate_hz(),
        f0_min_hz: range.f0_min_hz,
        f0_max_hz: range.f0_max_hz,
    };
    debug_assert!(contour.validate().is_ok());
    Ok(contour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn silence_is_fully_unvoiced() {
        let audio = AudioBuffer::new(vec![0.0; 16000], 16000).unwrap();
        let c = track_pitch(&audio, &PitchRange::default(), &FrameSpec::default()).unwrap();
        assert_eq!(c.len(), 63);
        assert!(c.voiced.iter().all(|v| !v));
        assert!(c.f0_hz.iter().all(|f| *f == 0.0));
    }

    #[test]
    fn tone_200hz_tracked_accurately() {
        let audio = synth::tone(200.0, 16000, 2.0).unwrap();
        let c = track_pitch(&audio, &PitchRange::default(), &FrameSpec::default()).unwrap();
        assert!(
            c.voiced_fraction() >= 0.9,
            "voiced fraction {}",
            c.voiced_fraction()
        );
        let median = c.median_voiced_f0().unwrap();
        assert!((median - 200.0).abs() <= 2.0, "median {median}");
    }

    #[test]
    fn chirp_f0_nondecreasing_with_slack() {
        let audio = synth::chirp(200.0, 300.0, 16000, 2.0).unwrap();
        let c = track_pitch(&audio, &PitchRange::default(), &FrameSpec::default()).unwrap();
        let voiced: Vec<f64> = c
            .f0_hz
            .iter()
            .zip(&c.voiced)
            .filter(|(_, v)| **v)
            .map(|(f, _)| *f)
            .collect();
        assert!(voiced.len() > 50);
        let mut high_water = f64::MIN;
        for (i, f) in voiced.iter().enumerate() {
            assert!(
                *f >= high_water - 3.0,
                "frame {i}: f0 {f} fell more than 3 Hz below running max {high_water}"
            );
            high_water = high_water.max(*f);
        }
    }

    #[test]
    fn rms_of_constant_signal() {
        let audio = AudioBuffer::new(vec![0.5; 8192], 16000).unwrap();
        let c = track_pitch(&audio, &PitchRange::default(), &FrameSpec::default()).unwrap();
        let mid = c.len() / 2;
        assert!((c.rms[mid] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn empty_buffer_rejected() {
        let audio = AudioBuffer::new(Vec::new(), 16000).unwrap();
        assert!(track_pitch(&audio, &PitchRange::default(), &FrameSpec::default()).is_err());
    }

    #[test]
    fn low_sample_rate_rejected_for_high_f0_max() {
        let audio = AudioBuffer::new(vec![0.0; 8000], 8000).unwrap();
        let range = PitchRange {
            f0_min_hz: 50.0,
            f0_max_hz: 1001.0,
        };
        assert!(track_pitch(&audio, &range, &FrameSpec::default()).is_err());
    }

    #[test]
    fn octave_sanity_across_band() {
        // The tracker must not halve or double any of these.
        for f in [80.0, 150.0, 220.0, 300.0, 440.0] {
            let audio = synth::tone(f, 16000, 1.0).unwrap();
            let c =
                track_pitch(&audio, &PitchRange::default(), &FrameSpec::default()).unwrap();
            let median = c.median_voiced_f0().unwrap();
            assert!(
                (median - f).abs() / f < 0.02,
                "tone {f} Hz tracked as {median}"
            );
        }
    }
}

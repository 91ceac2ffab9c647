//! Mel spectrograms and MFCCs.
//!
//! The mel scale is `2595 * log10(1 + f / 700)`. A bank of `n_mels`
//! triangular filters is placed on `n_mels + 2` equally-mel-spaced points
//! between `fmin` and `fmax` and applied to magnitude (not power) spectra;
//! log compression floors the magnitude at 1e-5 before taking the natural
//! log. MFCCs are an orthonormal DCT-II of the log-mel frames with the
//! zeroth (energy) coefficient dropped.

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::signal::{magnitude, stft, AudioBuffer, FrameSpec};

/// Magnitude floor applied before the log; bounds log-mel below at ln(1e-5).
pub const LOG_FLOOR: f64 = 1e-5;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Mel filterbank parameters. `fmax` of `None` means the Nyquist frequency.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MelSpec {
    pub n_mels: usize,
    pub fmin_hz: f64,
    pub fmax_hz: Option<f64>,
}

impl Default for MelSpec {
    fn default() -> Self {
        MelSpec {
            n_mels: 80,
            fmin_hz: 0.0,
            fmax_hz: None,
        }
    }
}

impl MelSpec {
    pub fn fmax_for(&self, sample_rate_hz: u32) -> f64 {
        self.fmax_hz
            .unwrap_or(f64::from(sample_rate_hz) / 2.0)
    }

    pub fn validate(&self, sample_rate_hz: u32) -> Result<()> {
        if self.n_mels == 0 {
            return Err(Error::Validation("n_mels must be positive".into()));
        }
        let fmax = self.fmax_for(sample_rate_hz);
        let nyquist = f64::from(sample_rate_hz) / 2.0;
        if !(self.fmin_hz >= 0.0 && self.fmin_hz < fmax) {
            return Err(Error::Validation(format!(
                "fmin {} must lie in [0, fmax {})",
                self.fmin_hz, fmax
            )));
        }
        if fmax > nyquist + 1e-9 {
            return Err(Error::Validation(format!(
                "fmax {fmax} exceeds Nyquist {nyquist}"
            )));
        }
        Ok(())
    }
}

/// Triangular mel filterbank, `n_mels x (n_fft/2 + 1)`.
///
/// Filter `m` rises linearly from mel point `m` to `m+1` and falls to `m+2`;
/// each row has unit peak (no area normalization).
pub fn build_mel_filterbank(
    sample_rate_hz: u32,
    n_fft: usize,
    spec: &MelSpec,
) -> Result<Mat> {
    spec.validate(sample_rate_hz)?;
    let bins = n_fft / 2 + 1;
    let fmax = spec.fmax_for(sample_rate_hz);
    let mel_lo = hz_to_mel(spec.fmin_hz);
    let mel_hi = hz_to_mel(fmax);
    let points: Vec<f64> = (0..spec.n_mels + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (spec.n_mels + 1) as f64))
        .collect();

    let mut bank = Mat::zeros(spec.n_mels, bins);
    let bin_hz = f64::from(sample_rate_hz) / n_fft as f64;
    for m in 0..spec.n_mels {
        let (left, center, right) = (points[m], points[m + 1], points[m + 2]);
        for b in 0..bins {
            let f = b as f64 * bin_hz;
            let w = if f <= left || f >= right {
                0.0
            } else if f <= center {
                (f - left) / (center - left)
            } else {
                (right - f) / (right - center)
            };
            if w > 0.0 {
                bank.set(m, b, w);
            }
        }
    }
    Ok(bank)
}

/// Log-mel spectrogram, `frames x n_mels`: filterbank applied to the STFT
/// magnitude, floored at [`LOG_FLOOR`], natural log.
pub fn mel_spectrogram(
    audio: &AudioBuffer,
    frame: &FrameSpec,
    mel: &MelSpec,
) -> Result<Mat> {
    let mag = magnitude(&stft(audio, frame)?);
    let bank = build_mel_filterbank(audio.sample_rate_hz(), frame.n_fft, mel)?;
    Ok(apply_log_mel(&mag, &bank))
}

/// Applies a prebuilt filterbank to a magnitude spectrogram and compresses.
pub fn apply_log_mel(mag: &Mat, bank: &Mat) -> Mat {
    let frames = mag.rows();
    let n_mels = bank.rows();
    let mut out = Mat::zeros(frames, n_mels);
    for t in 0..frames {
        let spectrum = mag.row(t);
        for m in 0..n_mels {
            let filter = bank.row(m);
            let mut acc = 0.0;
            for (w, s) in filter.iter().zip(spectrum) {
                if *w > 0.0 {
                    acc += w * s;
                }
            }
            out.set(t, m, acc.max(LOG_FLOOR).ln());
        }
    }
    out
}

/// MFCCs, `frames x n_coeffs`: orthonormal DCT-II over each log-mel frame,
/// keeping coefficients 1..=n_coeffs (the energy term c0 is dropped).
pub fn mfcc(log_mel: &Mat, n_coeffs: usize) -> Result<Mat> {
    let m = log_mel.cols();
    if n_coeffs == 0 || n_coeffs >= m {
        return Err(Error::Validation(format!(
            "n_coeffs must lie in 1..{m}, got {n_coeffs}"
        )));
    }
    let mut out = Mat::zeros(log_mel.rows(), n_coeffs);
    let scale = (2.0 / m as f64).sqrt();
    for t in 0..log_mel.rows() {
        let frame = log_mel.row(t);
        for k in 1..=n_coeffs {
            let mut acc = 0.0;
            for (j, v) in frame.iter().enumerate() {
                acc += v
                    * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / m as f64).cos();
            }
            out.set(t, k - 1, scale * acc);
        }
    }
    Ok(out)
}

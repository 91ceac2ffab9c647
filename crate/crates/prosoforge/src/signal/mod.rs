//! Audio I/O, framing and windowing, STFT/ISTFT, resampling, and the binary
//! tensor container shared by every tool in the workspace.

mod resample;
mod stft;
mod tensor;
mod wav;

pub use resample::resample;
pub(crate) use resample::resample_by;
pub use stft::{istft, magnitude, stft};
pub use tensor::{read_tensor, write_tensor, Tensor, TENSOR_MAGIC};
pub(crate) use tensor::{read_tensor_from, write_tensor_to};
pub use wav::{probe_wav, read_wav, write_wav, WavInfo};

use crate::error::{Error, Result};
pub use rustfft::num_complex::Complex64;

/// Minimum sample rate accepted anywhere in the toolkit.
pub const MIN_SAMPLE_RATE_HZ: u32 = 8000;

/// Time-domain samples with their sample rate. Samples are finite and
/// nominally within [-1, 1]; normalizing operations guarantee the bound.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    samples: Vec<f32>,
    sample_rate_hz: u32,
}

impl AudioBuffer {
    pub fn new(samples: Vec<f32>, sample_rate_hz: u32) -> Result<Self> {
        if sample_rate_hz < MIN_SAMPLE_RATE_HZ {
            return Err(Error::Validation(format!(
                "sample rate {sample_rate_hz} Hz below minimum {MIN_SAMPLE_RATE_HZ} Hz"
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(AudioBuffer {
            samples,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f32] {
        &self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Peak absolute amplitude (0 for an empty buffer).
    pub fn peak(&self) -> f32 {
        self.samples.iter().fold(0.0f32, |m, s| m.max(s.abs()))
    }

    /// Scales so the peak is at most 1.0. Buffers already inside the bound
    /// are returned unchanged.
    pub fn peak_limited(self) -> AudioBuffer {
        let peak = self.peak();
        if peak <= 1.0 {
            return self;
        }
        let g = 1.0 / peak;
        AudioBuffer {
            samples: self.samples.iter().map(|s| s * g).collect(),
            sample_rate_hz: self.sample_rate_hz,
        }
    }

}

/// Analysis window shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    HannPeriodic,
    Rect,
}

impl Window {
    pub fn evaluate(self, n_fft: usize) -> Vec<f64> {
        match self {
            Window::HannPeriodic => (0..n_fft)
                .map(|n| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * n as f64 / n_fft as f64).cos())
                .collect(),
            Window::Rect => vec![1.0; n_fft],
        }
    }
}

/// STFT framing parameters. Defaults are n_fft 1024, hop 256, periodic Hann,
/// which satisfies the overlap-add condition for exact inversion.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FrameSpec {
    pub n_fft: usize,
    pub hop: usize,
    pub window: Window,
}

impl Default for FrameSpec {
    fn default() -> Self {
        FrameSpec {
            n_fft: 1024,
            hop: 256,
            window: Window::HannPeriodic,
        }
    }
}

impl FrameSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_fft == 0 || !self.n_fft.is_power_of_two() {
            return Err(Error::Validation(format!(
                "n_fft must be a power of two, got {}",
                self.n_fft
            )));
        }
        if self.hop == 0 || self.hop > self.n_fft {
            return Err(Error::Validation(format!(
                "hop must satisfy 1 <= hop <= n_fft, got hop {} with n_fft {}",
                self.hop, self.n_fft
            )));
        }
        Ok(())
    }

    /// Frame count for a signal of `len` samples under center padding.
    pub fn frames_for_len(&self, len: usize) -> usize {
        len / self.hop + 1
    }

    pub fn bins(&self) -> usize {
        self.n_fft / 2 + 1
    }
}

/// One-sided complex STFT, frame-major: `frames x (n_fft/2 + 1)`.
#[derive(Debug, Clone)]
pub struct ComplexSpectrogram {
    pub frames: usize,
    pub n_fft: usize,
    values: Vec<Complex64>,
}

impl ComplexSpectrogram {
    pub fn new(frames: usize, n_fft: usize) -> Self {
        ComplexSpectrogram {
            frames,
            n_fft,
            values: vec![Complex64::new(0.0, 0.0); frames * (n_fft / 2 + 1)],
        }
    }

    pub fn bins(&self) -> usize {
        self.n_fft / 2 + 1
    }

    #[inline]
    pub fn get(&self, frame: usize, bin: usize) -> Complex64 {
        self.values[frame * self.bins() + bin]
    }

    #[inline]
    pub fn set(&mut self, frame: usize, bin: usize, v: Complex64) {
        let b = self.bins();
        self.values[frame * b + bin] = v;
    }

    pub fn frame(&self, frame: usize) -> &[Complex64] {
        let b = self.bins();
        &self.values[frame * b..(frame + 1) * b]
    }
}

/// Reflect index `i` (which may be negative or past the end) into `[0, len)`
/// without repeating the edge sample.
pub(crate) fn reflect_index(i: isize, len: usize) -> usize {
    debug_assert!(len > 0);
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let mut j = i.rem_euclid(period);
    if j >= len as isize {
        j = period - j;
    }
    j as usize
}

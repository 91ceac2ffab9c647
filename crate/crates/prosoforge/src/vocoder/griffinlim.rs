use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::signal::{istft, magnitude, stft, AudioBuffer, ComplexSpectrogram, FrameSpec};

/// Waveform estimate plus the spectral-convergence residual before the first
/// iteration (zero-phase reconstruction) and after the last.
#[derive(Debug, Clone)]
pub struct GriffinLimResult {
    pub audio: AudioBuffer,
    pub sc_initial: f64,
    pub sc_final: f64,
}

/// ||target - actual||_F / ||target||_F, defined as 0 when the target is all
/// zeros.
pub fn spectral_convergence(target: &Mat, actual: &Mat) -> Result<f64> {
    if target.rows() != actual.rows() || target.cols() != actual.cols() {
        return Err(Error::Validation(format!(
            "spectrogram shapes differ: {}x{} vs {}x{}",
            target.rows(),
            target.cols(),
            actual.rows(),
            actual.cols()
        )));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, a) in target.iter().zip(actual.iter()) {
        num += (t - a) * (t - a);
        den += t * t;
    }
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((num / den).sqrt())
}

fn with_phase(mag: &Mat, phase_of: Option<&ComplexSpectrogram>, spec: &FrameSpec) -> ComplexSpectrogram {
    let mut s = ComplexSpectrogram::new(mag.rows(), spec.n_fft);
    for t in 0..mag.rows() {
        for b in 0..spec.bins() {
            let phase = match phase_of {
                Some(p) => {
                    let v = p.get(t, b);
                    let r = v.norm();
                    // zero-magnitude bins carry no phase; use unit phase
                    if r == 0.0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        v / r
                    }
                }
                None => Complex64::new(1.0, 0.0),
            };
            s.set(t, b, phase * mag.get(t, b));
        }
    }
    s
}

/// Iterative phase reconstruction: start from zero phase, then alternate
/// between the waveform domain and the target magnitude. `n_iter == 0`
/// returns the plain zero-phase inverse transform.
pub fn griffin_lim(
    target_mag: &Mat,
    spec: &FrameSpec,
    n_iter: usize,
    sample_rate_hz: u32,
) -> Result<GriffinLimResult> {
    spec.validate()?;
    if target_mag.rows() == 0 {
        return Err(Error::Validation("magnitude spectrogram has no frames".into()));
    }
    if target_mag.cols() != spec.bins() {
        return Err(Error::Validation(format!(
            "magnitude has {} bins, frame spec implies {}",
            target_mag.cols(),
            spec.bins()
        )));
    }
    if target_mag.iter().any(|v| v < 0.0 || !v.is_finite()) {
        return Err(Error::Validation(
            "magnitude spectrogram must be finite and nonnegative".into(),
        ));
    }
    let mut audio = istft(&with_phase(target_mag, None, spec), spec, sample_rate_hz)?;
    let sc_initial = spectral_convergence(target_mag, &magnitude(&stft(&audio, spec)?))?;
    let mut sc_final = sc_initial;
    for _ in 0..n_iter {
        let estimate = stft(&audio, spec)?;
        audio = istft(&with_phase(target_mag, Some(&estimate), spec), spec, sample_rate_hz)?;
        sc_final = spectral_convergence(target_mag, &magnitude(&stft(&audio, spec)?))?;
    }
    Ok(GriffinLimResult {
        audio,
        sc_initial,
        sc_final,
    })
}

//! Plot-style artifacts: mel spectrograms as binary PGM images and
//! waveforms as CSV, both byte-deterministic.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::signal::AudioBuffer;

/// Renders a mel spectrogram (frames x bands) as binary PGM bytes:
/// width = frames, height = bands with band 0 at the bottom row, maxval 255.
/// Intensity is round(255·(v − vmin)/(vmax − vmin)); a constant image (vmax
/// = vmin) renders all 0.
pub fn mel_pgm_bytes(mel: &Mat) -> Result<Vec<u8>> {
    if mel.rows() == 0 || mel.cols() == 0 {
        return Err(Error::Validation("mel spectrogram is empty".into()));
    }
    let (frames, bands) = (mel.rows(), mel.cols());
    let mut vmin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    for v in mel.iter() {
        if !v.is_finite() {
            return Err(Error::Numeric("non-finite mel value".into()));
        }
        vmin = vmin.min(v);
        vmax = vmax.max(v);
    }
    let span = vmax - vmin;
    let mut out = format!("P5\n{frames} {bands}\n255\n").into_bytes();
    out.reserve(frames * bands);
    for row in (0..bands).rev() {
        for frame in 0..frames {
            let v = mel.get(frame, row);
            let level = if span == 0.0 {
                0
            } else {
                (255.0 * (v - vmin) / span).round() as u8
            };
            out.push(level);
        }
    }
    Ok(out)
}

pub fn render_mel_pgm(mel: &Mat, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = mel_pgm_bytes(mel)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Formats a waveform as `time_s,amplitude` CSV, one row per `decimate`
/// samples, time = index / sample_rate.
pub fn waveform_csv_bytes(buffer: &AudioBuffer, decimate: usize) -> Result<Vec<u8>> {
    if decimate == 0 {
        return Err(Error::Validation("decimate must be at least 1".into()));
    }
    let sr = f64::from(buffer.sample_rate_hz());
    let mut out = Vec::new();
    writeln!(out, "time_s,amplitude").expect("vec write");
    for (i, s) in buffer.samples().iter().enumerate().step_by(decimate) {
        writeln!(out, "{},{}", i as f64 / sr, s).expect("vec write");
    }
    Ok(out)
}

pub fn dump_waveform_csv(
    buffer: &AudioBuffer,
    path: impl AsRef<Path>,
    decimate: usize,
) -> Result<()> {
    let path = path.as_ref();
    let bytes = waveform_csv_bytes(buffer, decimate)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

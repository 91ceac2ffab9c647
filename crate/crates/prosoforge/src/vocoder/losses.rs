use super::discriminator::SubNetOutput;
use crate::error::{Error, Result};
use crate::melspec::{mel_spectrogram, MelSpec};
use crate::signal::{AudioBuffer, FrameSpec};

/// Feature-matching weight in the generator objective.
pub const LAMBDA_FM: f64 = 2.0;
/// Mel-reconstruction weight in the generator objective.
pub const LAMBDA_MEL: f64 = 45.0;

/// Least-squares GAN losses for one real/fake pair.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct LossReport {
    pub adv_g: f64,
    pub adv_d: f64,
    pub feature_matching: f64,
    pub mel_reconstruction: f64,
    pub total_g: f64,
}

fn mean(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Validation("score map is empty".into()));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

fn mean_sq(values: &[f64], shift: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Validation("score map is empty".into()));
    }
    Ok(values.iter().map(|v| (v - shift) * (v - shift)).sum::<f64>() / values.len() as f64)
}

/// Computes the LSGAN objective from discriminator outputs on a (real, fake)
/// waveform pair:
///
/// - `adv_d`  = sum over sub-networks of mean((D(real)-1)^2) + mean(D(fake)^2)
/// - `adv_g`  = sum over sub-networks of mean((D(fake)-1)^2)
/// - `feature_matching` = sum over sub-networks and layers of mean |f_r - f_f|
/// - `mel_reconstruction` = mean |logmel(real) - logmel(fake)|
/// - `total_g` = adv_g + lambda_fm * fm + lambda_mel * mel
#[allow(clippy::too_many_arguments)]
pub fn gan_losses(
    real: &AudioBuffer,
    fake: &AudioBuffer,
    d_real: &[SubNetOutput],
    d_fake: &[SubNetOutput],
    frame: &FrameSpec,
    mel: &MelSpec,
    lambda_fm: f64,
    lambda_mel: f64,
) -> Result<LossReport> {
    if real.len() != fake.len() {
        return Err(Error::Validation(format!(
            "real ({}) and fake ({}) lengths differ",
            real.len(),
            fake.len()
        )));
    }
    if d_real.len() != d_fake.len() {
        return Err(Error::Validation(
            "discriminator output counts differ between real and fake".into(),
        ));
    }
    let mut adv_d = 0.0;
    let mut adv_g = 0.0;
    let mut fm = 0.0;
    for (r, f) in d_real.iter().zip(d_fake) {
        if r.score.len() != f.score.len() || r.features.len() != f.features.len() {
            return Err(Error::Validation(
                "sub-network output shapes differ between real and fake".into(),
            ));
        }
        adv_d += mean_sq(&r.score, 1.0)? + mean_sq(&f.score, 0.0)?;
        adv_g += mean_sq(&f.score, 1.0)?;
        for (fr, ff) in r.features.iter().zip(&f.features) {
            if fr.len() != ff.len() {
                return Err(Error::Validation(
                    "feature map shapes differ between real and fake".into(),
                ));
            }
            let diffs: Vec<f64> = fr.iter().zip(ff).map(|(a, b)| (a - b).abs()).collect();
            fm += mean(&diffs)?;
        }
    }
    let mel_real = mel_spectrogram(real, frame, mel)?;
    let mel_fake = mel_spectrogram(fake, frame, mel)?;
    let n = (mel_real.rows() * mel_real.cols()) as f64;
    let mel_loss = mel_real
        .iter()
        .zip(mel_fake.iter())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / n;
    let total_g = adv_g + lambda_fm * fm + lambda_mel * mel_loss;
    Ok(LossReport {
        adv_g,
        adv_d,
        feature_matching: fm,
        mel_reconstruction: mel_loss,
        total_g,
    })
}

//! Simultaneous-perturbation stochastic approximation: estimates a descent
//! direction from two loss probes along a random Rademacher direction, so
//! training needs only forward passes.

use super::{generator_forward, GeneratorConfig, WeightStore};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::melspec::{mel_spectrogram, MelSpec};
use crate::rng::SplitMix64;
use crate::signal::{AudioBuffer, FrameSpec};
use crate::synth;

/// One SPSA update on an arbitrary parameter vector.
///
/// Draws a Rademacher direction from `seed`, probes `loss` at `w +/- c*delta`,
/// forms the gradient estimate `g = (L+ - L-) / (2c)`, and returns
/// `w - a*g*delta` together with the loss at the *unperturbed* point.
pub fn spsa_step(
    params: &[f64],
    mut loss: impl FnMut(&[f64]) -> Result<f64>,
    a: f64,
    c: f64,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    if params.is_empty() {
        return Err(Error::Validation("parameter vector is empty".into()));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Validation(format!("step size a={a} must be >= 0")));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Validation(format!("probe size c={c} must be > 0")));
    }
    let mut rng = SplitMix64::new(seed);
    let delta: Vec<f64> = params.iter().map(|_| rng.next_sign()).collect();
    let probe = |sign: f64| -> Vec<f64> {
        params
            .iter()
            .zip(&delta)
            .map(|(&w, &d)| w + sign * c * d)
            .collect()
    };
    let l0 = loss(params)?;
    let lp = loss(&probe(1.0))?;
    let lm = loss(&probe(-1.0))?;
    if !(l0.is_finite() && lp.is_finite() && lm.is_finite()) {
        return Err(Error::Numeric("loss is not finite".into()));
    }
    let g = (lp - lm) / (2.0 * c);
    let updated = params
        .iter()
        .zip(&delta)
        .map(|(&w, &d)| w - a * g * d)
        .collect();
    Ok((updated, l0))
}

/// One SPSA update of generator weights against a mel-reconstruction loss:
/// `L(w) = mean |logmel(generator(mel_input; w)) - logmel(target)|`.
/// Returns the updated store and the loss before the update.
#[allow(clippy::too_many_arguments)]
pub fn spsa_train_step(
    config: &GeneratorConfig,
    weights: &WeightStore,
    mel_input: &Mat,
    target: &AudioBuffer,
    frame: &FrameSpec,
    mel: &MelSpec,
    a: f64,
    c: f64,
    seed: u64,
) -> Result<(WeightStore, f64)> {
    config.validate()?;
    if mel_input.rows() * config.hop() != target.len() {
        return Err(Error::Validation(format!(
            "generator would emit {} samples but target has {}",
            mel_input.rows() * config.hop(),
            target.len()
        )));
    }
    let target_logmel = mel_spectrogram(target, frame, mel)?;
    let sr = target.sample_rate_hz();
    let loss = |flat: &[f64]| -> Result<f64> {
        let w = weights.unflatten(flat)?;
        let out = generator_forward(mel_input, config, &w, sr)?;
        let out_logmel = mel_spectrogram(&out, frame, mel)?;
        let n = (out_logmel.rows() * out_logmel.cols()) as f64;
        Ok(out_logmel
            .iter()
            .zip(target_logmel.iter())
            .map(|(x, y)| (x - y).abs())
            .sum::<f64>()
            / n)
    };
    let (flat, l0) = spsa_step(&weights.flatten(), loss, a, c, seed)?;
    Ok((weights.unflatten(&flat)?, l0))
}

// Toy training constants, picked so the demo descends within ~100 steps.
const TOY_A: f64 = 2e-4;
const TOY_C: f64 = 0.02;
const TOY_F0_HZ: f64 = 120.0;
const TOY_SR: u32 = 16_000;
const TOY_DURATION_S: f64 = 2.0;

fn toy_config() -> GeneratorConfig {
    GeneratorConfig {
        n_mels: 8,
        base_channels: 4,
        upsample_factors: vec![8, 4],
        upsample_kernels: vec![16, 8],
        resblock_kernel: 3,
        resblock_dilations: vec![1, 3],
    }
}

fn toy_frame() -> FrameSpec {
    FrameSpec {
        n_fft: 64,
        hop: 32,
        ..FrameSpec::default()
    }
}

/// Self-contained SPSA demo: fits a few-hundred-parameter generator to
/// re-synthesize a fixed speech-like fixture from its own log-mel input.
/// Returns the trained store and the per-step losses (measured before each
/// update), all deterministic in `seed`.
pub fn toy_training_run(seed: u64, steps: usize) -> Result<(WeightStore, Vec<f64>)> {
    let config = toy_config();
    let frame = toy_frame();
    let mel = MelSpec {
        n_mels: config.n_mels,
        ..MelSpec::default()
    };
    let target = synth::speech_like(TOY_F0_HZ, TOY_SR, TOY_DURATION_S, seed ^ 0xF1)?;
    let full = mel_spectrogram(&target, &frame, &mel)?;
    // center-padded analysis yields one frame past the signal; drop it so the
    // generator output length lands exactly on the fixture
    let rows = target.len() / config.hop();
    let mel_input = Mat::from_vec(
        rows,
        full.cols(),
        full.as_slice()[..rows * full.cols()].to_vec(),
    );
    let mut weights = super::init_weights(&config, seed)?;
    let mut losses = Vec::with_capacity(steps);
    for k in 0..steps {
        let (next, l) = spsa_train_step(
            &config,
            &weights,
            &mel_input,
            &target,
            &frame,
            &mel,
            TOY_A,
            TOY_C,
            seed.wrapping_add(k as u64),
        )?;
        weights = next;
        losses.push(l);
    }
    Ok((weights, losses))
}

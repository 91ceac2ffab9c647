//! Spectrogram-to-waveform synthesis: Griffin-Lim baseline, a small
//! HiFi-GAN-style generator/discriminator pair (forward passes only), GAN
//! losses, and a gradient-free SPSA trainer.

mod discriminator;
mod generator;
mod griffinlim;
mod losses;
mod melinv;
mod nn;
mod spsa;
mod weights;

pub use discriminator::{
    discriminator_forward, init_discriminator_weights, DiscOutput, SubNetOutput,
};
pub use generator::{generator_forward, init_weights, receptive_field};
pub use griffinlim::{griffin_lim, spectral_convergence, GriffinLimResult};
pub use losses::{gan_losses, LossReport, LAMBDA_FM, LAMBDA_MEL};
pub use melinv::mel_pseudo_inverse;
pub use spsa::{spsa_step, spsa_train_step, toy_training_run};
pub use weights::WeightStore;

use crate::error::{Error, Result};

/// Generator topology. The upsample factors must multiply to the analysis
/// hop so `frames x hop` samples come out the far end.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n_mels: usize,
    pub base_channels: usize,
    pub upsample_factors: Vec<usize>,
    pub upsample_kernels: Vec<usize>,
    pub resblock_kernel: usize,
    pub resblock_dilations: Vec<usize>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_mels: 80,
            base_channels: 32,
            upsample_factors: vec![8, 8, 2, 2],
            upsample_kernels: vec![16, 16, 4, 4],
            resblock_kernel: 3,
            resblock_dilations: vec![1, 3],
        }
    }
}

impl GeneratorConfig {
    /// Samples produced per mel frame.
    pub fn hop(&self) -> usize {
        self.upsample_factors.iter().product()
    }

    /// Channel count entering stage `i` (stage 0 sees `base_channels`).
    pub fn stage_channels(&self, i: usize) -> usize {
        (self.base_channels >> i).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_mels == 0 || self.base_channels == 0 {
            return Err(Error::Validation(
                "n_mels and base_channels must be positive".into(),
            ));
        }
        if self.upsample_factors.is_empty()
            || self.upsample_factors.len() != self.upsample_kernels.len()
        {
            return Err(Error::Validation(
                "upsample_factors and upsample_kernels must be nonempty and parallel".into(),
            ));
        }
        for (i, (&f, &k)) in self
            .upsample_factors
            .iter()
            .zip(&self.upsample_kernels)
            .enumerate()
        {
            if f == 0 || k < f || (k - f) % 2 != 0 {
                return Err(Error::Validation(format!(
                    "stage {i}: kernel {k} must be >= factor {f} with an even difference"
                )));
            }
        }
        if self.resblock_kernel.is_multiple_of(2) || self.resblock_kernel == 0 {
            return Err(Error::Validation(format!(
                "resblock kernel {} must be odd",
                self.resblock_kernel
            )));
        }
        if self.resblock_dilations.is_empty() || self.resblock_dilations.contains(&0) {
            return Err(Error::Validation(
                "resblock dilations must be nonempty and positive".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let config: GeneratorConfig = serde_json::from_str(json)
            .map_err(|e| Error::Format(format!("generator config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

/// Discriminator family topology: one sub-network per scale factor
/// (average-pooled input) plus one per period (reshaped input).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct DiscriminatorConfig {
    pub scale_factors: Vec<usize>,
    pub periods: Vec<usize>,
    pub base_channels: usize,
    pub n_layers: usize,
}

impl Default for DiscriminatorConfig {
    fn default() -> Self {
        DiscriminatorConfig {
            scale_factors: vec![1, 2, 4],
            periods: vec![2, 3],
            base_channels: 8,
            n_layers: 2,
        }
    }
}

impl DiscriminatorConfig {
    pub fn sub_network_count(&self) -> usize {
        self.scale_factors.len() + self.periods.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale_factors.first() != Some(&1) {
            return Err(Error::Validation(
                "scale_factors must start at 1".into(),
            ));
        }
        if !self.scale_factors.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Validation(
                "scale_factors must be strictly increasing".into(),
            ));
        }
        for (i, &p) in self.periods.iter().enumerate() {
            if p < 2 {
                return Err(Error::Validation(format!("period {p} at index {i} < 2")));
            }
        }
        let mut sorted = self.periods.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.periods.len() {
            return Err(Error::Validation("periods must be distinct".into()));
        }
        if self.base_channels == 0 || self.n_layers == 0 {
            return Err(Error::Validation(
                "base_channels and n_layers must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let config: DiscriminatorConfig = serde_json::from_str(json)
            .map_err(|e| Error::Format(format!("discriminator config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }
}

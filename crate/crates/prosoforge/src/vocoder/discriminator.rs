use super::nn::{
    avg_pool1d, conv1d, conv2d, leaky_relu_in_place, FeatureMap, FeatureMap2d,
};
use super::{DiscriminatorConfig, WeightStore};
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::signal::{AudioBuffer, Tensor};

const SCALE_KERNEL: usize = 15;
const SCALE_STRIDE: usize = 2;
const PERIOD_KERNEL: usize = 5;
const PERIOD_STRIDE: usize = 3;
const SCORE_KERNEL: usize = 3;

/// One sub-network's verdict: a score map plus every intermediate
/// (post-activation) feature map, flattened, for feature matching.
#[derive(Debug, Clone)]
pub struct SubNetOutput {
    pub score: Vec<f64>,
    pub features: Vec<Vec<f64>>,
}

/// Outputs for all sub-networks, scale branches first, then period branches.
pub type DiscOutput = Vec<SubNetOutput>;

fn layer_channels(config: &DiscriminatorConfig, layer: usize) -> (usize, usize) {
    let c_in = if layer == 0 {
        1
    } else {
        config.base_channels << (layer - 1)
    };
    (c_in, config.base_channels << layer)
}

fn xavier(rng: &mut SplitMix64, dims: Vec<u64>, fan_in: usize, fan_out: usize) -> Tensor {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let n: u64 = dims.iter().product();
    let data: Vec<f32> = (0..n).map(|_| rng.next_symmetric(a) as f32).collect();
    Tensor::new(dims, data).expect("dims match generated length")
}

fn zero_bias(channels: usize) -> Tensor {
    Tensor::new(vec![channels as u64], vec![0.0; channels]).expect("bias shape")
}

/// Xavier-uniform weights for every sub-network, biases zero, one stream.
pub fn init_discriminator_weights(config: &DiscriminatorConfig, seed: u64) -> Result<WeightStore> {
    config.validate()?;
    let mut rng = SplitMix64::new(seed);
    let mut store = WeightStore::new(seed);
    for s in 0..config.scale_factors.len() {
        for j in 0..config.n_layers {
            let (c_in, c_out) = layer_channels(config, j);
            store.insert(
                &format!("msd.{s}.layer.{j}.weight"),
                xavier(
                    &mut rng,
                    vec![c_out as u64, c_in as u64, SCALE_KERNEL as u64],
                    c_in * SCALE_KERNEL,
                    c_out * SCALE_KERNEL,
                ),
            );
            store.insert(&format!("msd.{s}.layer.{j}.bias"), zero_bias(c_out));
        }
        let c_last = config.base_channels << (config.n_layers - 1);
        store.insert(
            &format!("msd.{s}.score.weight"),
            xavier(
                &mut rng,
                vec![1, c_last as u64, SCORE_KERNEL as u64],
                c_last * SCORE_KERNEL,
                SCORE_KERNEL,
            ),
        );
        store.insert(&format!("msd.{s}.score.bias"), zero_bias(1));
    }
    for p in 0..config.periods.len() {
        for j in 0..config.n_layers {
            let (c_in, c_out) = layer_channels(config, j);
            store.insert(
                &format!("mpd.{p}.layer.{j}.weight"),
                xavier(
                    &mut rng,
                    vec![c_out as u64, c_in as u64, PERIOD_KERNEL as u64, 1],
                    c_in * PERIOD_KERNEL,
                    c_out * PERIOD_KERNEL,
                ),
            );
            store.insert(&format!("mpd.{p}.layer.{j}.bias"), zero_bias(c_out));
        }
        let c_last = config.base_channels << (config.n_layers - 1);
        store.insert(
            &format!("mpd.{p}.score.weight"),
            xavier(
                &mut rng,
                vec![1, c_last as u64, SCORE_KERNEL as u64, 1],
                c_last * SCORE_KERNEL,
                SCORE_KERNEL,
            ),
        );
        store.insert(&format!("mpd.{p}.score.bias"), zero_bias(1));
    }
    Ok(store)
}

fn scale_branch(
    audio: &FeatureMap,
    factor: usize,
    index: usize,
    config: &DiscriminatorConfig,
    weights: &WeightStore,
) -> Result<SubNetOutput> {
    let mut x = avg_pool1d(audio, factor);
    if x.len == 0 {
        return Err(Error::Validation(format!(
            "input too short for scale factor {factor}"
        )));
    }
    let mut features = Vec::with_capacity(config.n_layers);
    for j in 0..config.n_layers {
        x = conv1d(
            &x,
            weights.get(&format!("msd.{index}.layer.{j}.weight"))?,
            weights.get(&format!("msd.{index}.layer.{j}.bias"))?,
            SCALE_STRIDE,
            SCALE_KERNEL / 2,
            1,
        )?;
        leaky_relu_in_place(&mut x.data);
        features.push(x.data.clone());
    }
    let score = conv1d(
        &x,
        weights.get(&format!("msd.{index}.score.weight"))?,
        weights.get(&format!("msd.{index}.score.bias"))?,
        1,
        SCORE_KERNEL / 2,
        1,
    )?;
    Ok(SubNetOutput {
        score: score.data,
        features,
    })
}

fn period_branch(
    samples: &[f32],
    period: usize,
    index: usize,
    config: &DiscriminatorConfig,
    weights: &WeightStore,
) -> Result<SubNetOutput> {
    // zero-pad to a whole number of periods, then view as (len/p) x p
    let height = samples.len().div_ceil(period);
    let mut x = FeatureMap2d::zeros(1, height, period);
    for (i, &s) in samples.iter().enumerate() {
        x.data[i] = s as f64;
    }
    let mut features = Vec::with_capacity(config.n_layers);
    for j in 0..config.n_layers {
        x = conv2d(
            &x,
            weights.get(&format!("mpd.{index}.layer.{j}.weight"))?,
            weights.get(&format!("mpd.{index}.layer.{j}.bias"))?,
            (PERIOD_STRIDE, 1),
            (PERIOD_KERNEL / 2, 0),
        )?;
        leaky_relu_in_place(&mut x.data);
        features.push(x.data.clone());
    }
    let score = conv2d(
        &x,
        weights.get(&format!("mpd.{index}.score.weight"))?,
        weights.get(&format!("mpd.{index}.score.bias"))?,
        (1, 1),
        (SCORE_KERNEL / 2, 0),
    )?;
    Ok(SubNetOutput {
        score: score.data,
        features,
    })
}

/// Runs every scale and period branch over the waveform. Branch order is
/// `scale_factors` then `periods`, matching `sub_network_count`.
pub fn discriminator_forward(
    audio: &AudioBuffer,
    config: &DiscriminatorConfig,
    weights: &WeightStore,
) -> Result<DiscOutput> {
    config.validate()?;
    if audio.is_empty() {
        return Err(Error::Validation("discriminator input is empty".into()));
    }
    let fm = FeatureMap {
        channels: 1,
        len: audio.len(),
        data: audio.samples().iter().map(|&s| s as f64).collect(),
    };
    let mut out = Vec::with_capacity(config.sub_network_count());
    for (s, &factor) in config.scale_factors.iter().enumerate() {
        out.push(scale_branch(&fm, factor, s, config, weights)?);
    }
    for (p, &period) in config.periods.iter().enumerate() {
        out.push(period_branch(audio.samples(), period, p, config, weights)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    fn audio(n: usize) -> AudioBuffer {
        let samples: Vec<f32> = (0..n).map(|i| ((i * 37 % 101) as f32 / 101.0) - 0.5).collect();
        AudioBuffer::new(samples, 16_000).unwrap()
    }

    #[test]
    fn emits_one_output_per_sub_network() {
        let config = DiscriminatorConfig::default();
        let weights = init_discriminator_weights(&config, 1).unwrap();
        let out = discriminator_forward(&audio(512), &config, &weights).unwrap();
        assert_eq!(out.len(), 5);
        for sub in &out {
            assert_eq!(sub.features.len(), config.n_layers);
            assert!(!sub.score.is_empty());
            assert!(sub.score.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn scale_two_on_doubled_input_matches_scale_one_score_length() {
        let config = DiscriminatorConfig::default();
        let weights = init_discriminator_weights(&config, 2).unwrap();
        let long = audio(1024);
        let short = AudioBuffer::new(long.samples()[..512].to_vec(), 16_000).unwrap();
        let out_long = discriminator_forward(&long, &config, &weights).unwrap();
        let out_short = discriminator_forward(&short, &config, &weights).unwrap();
        // scale 2 pools 1024 -> 512, so downstream shapes match scale 1 at 512
        assert_eq!(out_long[1].score.len(), out_short[0].score.len());
    }

    #[test]
    fn zero_weights_give_zero_scores() {
        let config = DiscriminatorConfig::default();
        let init = init_discriminator_weights(&config, 3).unwrap();
        let zeros = init.unflatten(&vec![0.0; init.parameter_count()]).unwrap();
        let out = discriminator_forward(&audio(300), &config, &zeros).unwrap();
        for sub in out {
            assert!(sub.score.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn forward_is_deterministic() {
        let config = DiscriminatorConfig::default();
        let weights = init_discriminator_weights(&config, 4).unwrap();
        let x = synth::speech_like(120.0, 16_000, 0.05, 7).unwrap();
        let a = discriminator_forward(&x, &config, &weights).unwrap();
        let b = discriminator_forward(&x, &config, &weights).unwrap();
        for (sa, sb) in a.iter().zip(&b) {
            assert_eq!(sa.score, sb.score);
            assert_eq!(sa.features, sb.features);
        }
    }

    #[test]
    fn odd_length_input_is_padded_for_periods() {
        let config = DiscriminatorConfig {
            periods: vec![3],
            scale_factors: vec![1],
            ..Default::default()
        };
        let weights = init_discriminator_weights(&config, 5).unwrap();
        // 301 is not a multiple of 3; branch must pad rather than truncate
        let out = discriminator_forward(&audio(301), &config, &weights).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn too_short_input_is_rejected() {
        let config = DiscriminatorConfig::default();
        let weights = init_discriminator_weights(&config, 6).unwrap();
        let tiny = AudioBuffer::new(vec![0.1; 2], 16_000).unwrap();
        // scale 4 pools 2 samples to nothing
        assert!(discriminator_forward(&tiny, &config, &weights).is_err());
    }
}

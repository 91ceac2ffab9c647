use super::nn::{conv1d, conv_transpose1d, leaky_relu_in_place, tanh_in_place, FeatureMap};
use super::{GeneratorConfig, WeightStore};
use crate::error::{Error, Result};
use crate::mat::Mat;
use crate::rng::SplitMix64;
use crate::signal::{AudioBuffer, Tensor};

const EDGE_KERNEL: usize = 7; // input and output convs, padding (k-1)/2

fn xavier_tensor(rng: &mut SplitMix64, dims: Vec<u64>, fan_in: usize, fan_out: usize) -> Tensor {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let n: u64 = dims.iter().product();
    let data: Vec<f32> = (0..n).map(|_| rng.next_symmetric(a) as f32).collect();
    Tensor::new(dims, data).expect("dims match generated length")
}

fn zero_bias(channels: usize) -> Tensor {
    Tensor::new(vec![channels as u64], vec![0.0; channels]).expect("bias shape")
}

/// Draws a full weight set for `config` from a single deterministic stream:
/// Xavier-uniform weights in architecture order, all biases zero.
pub fn init_weights(config: &GeneratorConfig, seed: u64) -> Result<WeightStore> {
    config.validate()?;
    let mut rng = SplitMix64::new(seed);
    let mut store = WeightStore::new(seed);
    let base = config.base_channels;
    let k_res = config.resblock_kernel;

    store.insert(
        "input_conv.weight",
        xavier_tensor(
            &mut rng,
            vec![base as u64, config.n_mels as u64, EDGE_KERNEL as u64],
            config.n_mels * EDGE_KERNEL,
            base * EDGE_KERNEL,
        ),
    );
    store.insert("input_conv.bias", zero_bias(base));

    for (i, (&_f, &k)) in config
        .upsample_factors
        .iter()
        .zip(&config.upsample_kernels)
        .enumerate()
    {
        let c_in = config.stage_channels(i);
        let c_out = config.stage_channels(i + 1);
        store.insert(
            &format!("up.{i}.weight"),
            xavier_tensor(
                &mut rng,
                vec![c_in as u64, c_out as u64, k as u64],
                c_in * k,
                c_out * k,
            ),
        );
        store.insert(&format!("up.{i}.bias"), zero_bias(c_out));
        for (j, _) in config.resblock_dilations.iter().enumerate() {
            store.insert(
                &format!("res.{i}.{j}.weight"),
                xavier_tensor(
                    &mut rng,
                    vec![c_out as u64, c_out as u64, k_res as u64],
                    c_out * k_res,
                    c_out * k_res,
                ),
            );
            store.insert(&format!("res.{i}.{j}.bias"), zero_bias(c_out));
        }
    }

    let c_last = config.stage_channels(config.upsample_factors.len());
    store.insert(
        "output_conv.weight",
        xavier_tensor(
            &mut rng,
            vec![1, c_last as u64, EDGE_KERNEL as u64],
            c_last * EDGE_KERNEL,
            EDGE_KERNEL,
        ),
    );
    store.insert("output_conv.bias", zero_bias(1));
    Ok(store)
}

fn resblock(
    x: FeatureMap,
    config: &GeneratorConfig,
    weights: &WeightStore,
    stage: usize,
) -> Result<FeatureMap> {
    let k = config.resblock_kernel;
    let mut t = x.clone();
    for (j, &d) in config.resblock_dilations.iter().enumerate() {
        if j > 0 {
            leaky_relu_in_place(&mut t.data);
        }
        t = conv1d(
            &t,
            weights.get(&format!("res.{stage}.{j}.weight"))?,
            weights.get(&format!("res.{stage}.{j}.bias"))?,
            1,
            d * (k - 1) / 2,
            d,
        )?;
    }
    let mut out = x;
    for (o, v) in out.data.iter_mut().zip(&t.data) {
        *o += v;
    }
    Ok(out)
}

/// Upsamples a mel spectrogram (frames x n_mels, log domain) to a waveform of
/// exactly `frames * hop` samples, `hop` being the product of the upsample
/// factors. Output is tanh-bounded to [-1, 1].
pub fn generator_forward(
    mel: &Mat,
    config: &GeneratorConfig,
    weights: &WeightStore,
    sample_rate_hz: u32,
) -> Result<AudioBuffer> {
    config.validate()?;
    if mel.rows() == 0 {
        return Err(Error::Validation("mel input has no frames".into()));
    }
    if mel.cols() != config.n_mels {
        return Err(Error::Validation(format!(
            "mel input has {} bands, generator expects {}",
            mel.cols(),
            config.n_mels
        )));
    }
    let frames = mel.rows();
    let mut x = FeatureMap::zeros(config.n_mels, frames);
    for t in 0..frames {
        for m in 0..config.n_mels {
            x.data[m * frames + t] = mel.get(t, m);
        }
    }

    x = conv1d(
        &x,
        weights.get("input_conv.weight")?,
        weights.get("input_conv.bias")?,
        1,
        (EDGE_KERNEL - 1) / 2,
        1,
    )?;

    for (i, (&f, &k)) in config
        .upsample_factors
        .iter()
        .zip(&config.upsample_kernels)
        .enumerate()
    {
        x = conv_transpose1d(
            &x,
            weights.get(&format!("up.{i}.weight"))?,
            weights.get(&format!("up.{i}.bias"))?,
            f,
            (k - f) / 2,
        )?;
        leaky_relu_in_place(&mut x.data);
        x = resblock(x, config, weights, i)?;
    }

    x = conv1d(
        &x,
        weights.get("output_conv.weight")?,
        weights.get("output_conv.bias")?,
        1,
        (EDGE_KERNEL - 1) / 2,
        1,
    )?;
    tanh_in_place(&mut x.data);
    assert_eq!(x.len, frames * config.hop(), "upsampling arithmetic drifted");

    let samples: Vec<f32> = x.channel(0).iter().map(|&v| v as f32).collect();
    AudioBuffer::new(samples, sample_rate_hz)
}

/// Half-open sample range that can depend on mel frame `frame`, derived from
/// kernel spans alone. Anything outside is provably untouched by a
/// perturbation of that frame.
pub fn receptive_field(config: &GeneratorConfig, frame: usize, n_frames: usize) -> (usize, usize) {
    let edge = (EDGE_KERNEL - 1) / 2;
    let mut lo = frame as i64 - edge as i64;
    let mut hi = frame as i64 + edge as i64; // inclusive interval in current resolution
    let res_span: i64 = config
        .resblock_dilations
        .iter()
        .map(|&d| (d * (config.resblock_kernel - 1) / 2) as i64)
        .sum();
    for (&f, &k) in config.upsample_factors.iter().zip(&config.upsample_kernels) {
        let pad = ((k - f) / 2) as i64;
        lo = lo * f as i64 - pad;
        hi = hi * f as i64 - pad + k as i64 - 1;
        lo -= res_span;
        hi += res_span;
    }
    lo -= edge as i64;
    hi += edge as i64;
    let n = (n_frames * config.hop()) as i64;
    (lo.clamp(0, n) as usize, (hi + 1).clamp(0, n) as usize)
}

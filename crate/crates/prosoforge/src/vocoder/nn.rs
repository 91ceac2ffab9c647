//! Minimal convolution primitives used by the generator and discriminators.
//! Weights live in f32 tensors; arithmetic accumulates in f64.

use crate::error::{Error, Result};
use crate::signal::Tensor;

pub(crate) const LEAKY_SLOPE: f64 = 0.1;

/// Channel-major 1-D feature map: value (c, i) at `data[c * len + i]`.
#[derive(Debug, Clone)]
pub(crate) struct FeatureMap {
    pub channels: usize,
    pub len: usize,
    pub data: Vec<f64>,
}

impl FeatureMap {
    pub fn zeros(channels: usize, len: usize) -> Self {
        FeatureMap {
            channels,
            len,
            data: vec![0.0; channels * len],
        }
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.data[c * self.len..(c + 1) * self.len]
    }
}

/// Channel-major 2-D feature map: value (c, y, x) at `data[(c*h + y)*w + x]`.
#[derive(Debug, Clone)]
pub(crate) struct FeatureMap2d {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
    pub data: Vec<f64>,
}

impl FeatureMap2d {
    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        FeatureMap2d {
            channels,
            height,
            width,
            data: vec![0.0; channels * height * width],
        }
    }
}

fn weight_dims<const N: usize>(weight: &Tensor, what: &str) -> Result<[usize; N]> {
    if weight.dims.len() != N {
        return Err(Error::Validation(format!(
            "{what} weight must have rank {N}, got {}",
            weight.dims.len()
        )));
    }
    let mut out = [0usize; N];
    for (o, &d) in out.iter_mut().zip(&weight.dims) {
        *o = d as usize;
    }
    Ok(out)
}

fn bias_term(bias: &Tensor, out_channels: usize) -> Result<&[f32]> {
    if bias.dims.as_slice() != [out_channels as u64] {
        return Err(Error::Validation(format!(
            "bias shape {:?} does not match {out_channels} output channels",
            bias.dims
        )));
    }
    Ok(&bias.data)
}

/// Cross-correlation with zero padding; weight dims are `[out, in, k]`.
pub(crate) fn conv1d(
    input: &FeatureMap,
    weight: &Tensor,
    bias: &Tensor,
    stride: usize,
    pad: usize,
    dilation: usize,
) -> Result<FeatureMap> {
    let [out_ch, in_ch, k] = weight_dims(weight, "conv1d")?;
    if in_ch != input.channels {
        return Err(Error::Validation(format!(
            "conv1d expects {in_ch} input channels, feature map has {}",
            input.channels
        )));
    }
    let bias = bias_term(bias, out_ch)?;
    let span = dilation * (k - 1) + 1;
    if input.len + 2 * pad < span {
        return Err(Error::Validation("conv1d input shorter than kernel span".into()));
    }
    let out_len = (input.len + 2 * pad - span) / stride + 1;
    let mut out = FeatureMap::zeros(out_ch, out_len);
    for (oc, &b) in bias.iter().enumerate() {
        let dst = &mut out.data[oc * out_len..(oc + 1) * out_len];
        dst.fill(b as f64);
        for ic in 0..in_ch {
            let src = input.channel(ic);
            let w = &weight.data[(oc * in_ch + ic) * k..(oc * in_ch + ic + 1) * k];
            for (o, d) in dst.iter_mut().enumerate() {
                let base = o * stride;
                let mut acc = 0.0;
                for (j, &wj) in w.iter().enumerate() {
                    // padded index; skip taps that fall in the zero margin
                    let idx = base + j * dilation;
                    if idx >= pad && idx - pad < input.len {
                        acc += src[idx - pad] * wj as f64;
                    }
                }
                *d += acc;
            }
        }
    }
    Ok(out)
}

/// Transposed convolution; weight dims are `[in, out, k]`.
/// Output length is `(len - 1) * stride - 2 * pad + k`.
pub(crate) fn conv_transpose1d(
    input: &FeatureMap,
    weight: &Tensor,
    bias: &Tensor,
    stride: usize,
    pad: usize,
) -> Result<FeatureMap> {
    let [in_ch, out_ch, k] = weight_dims(weight, "conv_transpose1d")?;
    if in_ch != input.channels {
        return Err(Error::Validation(format!(
            "conv_transpose1d expects {in_ch} input channels, feature map has {}",
            input.channels
        )));
    }
    let bias = bias_term(bias, out_ch)?;
    if input.len == 0 {
        return Err(Error::Validation("conv_transpose1d input is empty".into()));
    }
    let full = (input.len - 1) * stride + k;
    if full < 2 * pad + 1 {
        return Err(Error::Validation("conv_transpose1d padding exceeds output".into()));
    }
    let out_len = full - 2 * pad;
    let mut out = FeatureMap::zeros(out_ch, out_len);
    for (oc, &b) in bias.iter().enumerate() {
        out.data[oc * out_len..(oc + 1) * out_len].fill(b as f64);
    }
    for ic in 0..in_ch {
        let src = input.channel(ic);
        for oc in 0..out_ch {
            let w = &weight.data[(ic * out_ch + oc) * k..(ic * out_ch + oc + 1) * k];
            let dst = &mut out.data[oc * out_len..(oc + 1) * out_len];
            for (i, &x) in src.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let start = i * stride;
                for (j, &wj) in w.iter().enumerate() {
                    let o = start + j;
                    if o >= pad && o - pad < out_len {
                        dst[o - pad] += x * wj as f64;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// 2-D cross-correlation with zero padding; weight dims `[out, in, kh, kw]`.
pub(crate) fn conv2d(
    input: &FeatureMap2d,
    weight: &Tensor,
    bias: &Tensor,
    stride: (usize, usize),
    pad: (usize, usize),
) -> Result<FeatureMap2d> {
    let [out_ch, in_ch, kh, kw] = weight_dims(weight, "conv2d")?;
    if in_ch != input.channels {
        return Err(Error::Validation(format!(
            "conv2d expects {in_ch} input channels, feature map has {}",
            input.channels
        )));
    }
    let bias = bias_term(bias, out_ch)?;
    if input.height + 2 * pad.0 < kh || input.width + 2 * pad.1 < kw {
        return Err(Error::Validation("conv2d input smaller than kernel".into()));
    }
    let out_h = (input.height + 2 * pad.0 - kh) / stride.0 + 1;
    let out_w = (input.width + 2 * pad.1 - kw) / stride.1 + 1;
    let mut out = FeatureMap2d::zeros(out_ch, out_h, out_w);
    for (oc, &b) in bias.iter().enumerate() {
        for oy in 0..out_h {
            for ox in 0..out_w {
                let mut acc = b as f64;
                for ic in 0..in_ch {
                    for ky in 0..kh {
                        let y = oy * stride.0 + ky;
                        if y < pad.0 || y - pad.0 >= input.height {
                            continue;
                        }
                        for kx in 0..kw {
                            let x = ox * stride.1 + kx;
                            if x < pad.1 || x - pad.1 >= input.width {
                                continue;
                            }
                            let v = input.data
                                [(ic * input.height + y - pad.0) * input.width + x - pad.1];
                            let w = weight.data
                                [((oc * in_ch + ic) * kh + ky) * kw + kx];
                            acc += v * w as f64;
                        }
                    }
                }
                out.data[(oc * out_h + oy) * out_w + ox] = acc;
            }
        }
    }
    Ok(out)
}

pub(crate) fn leaky_relu_in_place(data: &mut [f64]) {
    for v in data {
        if *v < 0.0 {
            *v *= LEAKY_SLOPE;
        }
    }
}

pub(crate) fn tanh_in_place(data: &mut [f64]) {
    for v in data {
        *v = v.tanh();
    }
}

/// Non-overlapping mean pooling; trailing samples that do not fill a window
/// are dropped.
pub(crate) fn avg_pool1d(input: &FeatureMap, factor: usize) -> FeatureMap {
    if factor <= 1 {
        return input.clone();
    }
    let out_len = input.len / factor;
    let mut out = FeatureMap::zeros(input.channels, out_len);
    for c in 0..input.channels {
        let src = input.channel(c);
        for o in 0..out_len {
            let window = &src[o * factor..(o + 1) * factor];
            out.data[c * out_len + o] = window.iter().sum::<f64>() / factor as f64;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(channels: usize, values: &[f64]) -> FeatureMap {
        assert_eq!(values.len() % channels, 0);
        FeatureMap {
            channels,
            len: values.len() / channels,
            data: values.to_vec(),
        }
    }

    fn t(dims: &[u64], values: &[f32]) -> Tensor {
        Tensor::new(dims.to_vec(), values.to_vec()).unwrap()
    }

    #[test]
    fn conv1d_box_kernel_matches_hand_result() {
        let x = fm(1, &[1.0, 2.0, 3.0]);
        let w = t(&[1, 1, 3], &[1.0, 1.0, 1.0]);
        let b = t(&[1], &[0.0]);
        let y = conv1d(&x, &w, &b, 1, 1, 1).unwrap();
        assert_eq!(y.channel(0), [3.0, 6.0, 5.0]);
    }

    #[test]
    fn conv1d_sums_input_channels_and_adds_bias() {
        let x = fm(2, &[1.0, 2.0, 10.0, 20.0]);
        let w = t(&[1, 2, 1], &[1.0, 0.5]);
        let b = t(&[1], &[3.0]);
        let y = conv1d(&x, &w, &b, 1, 0, 1).unwrap();
        assert_eq!(y.channel(0), [9.0, 15.0]);
    }

    #[test]
    fn conv1d_stride_and_dilation_lengths() {
        let x = fm(1, &[0.0; 10]);
        let w = t(&[1, 1, 3], &[1.0, 1.0, 1.0]);
        let b = t(&[1], &[0.0]);
        assert_eq!(conv1d(&x, &w, &b, 2, 1, 1).unwrap().len, 5);
        // dilation 3 spans 7 samples: (10 + 2*3 - 7) / 1 + 1 = 10
        assert_eq!(conv1d(&x, &w, &b, 1, 3, 3).unwrap().len, 10);
    }

    #[test]
    fn conv_transpose_hand_result() {
        let x = fm(1, &[1.0]);
        let w = t(&[1, 1, 4], &[0.125, 0.25, 0.5, 0.75]);
        let b = t(&[1], &[0.0]);
        // out[o] = sum_i x[i] * w[o - i*stride + pad]: padding trims the
        // kernel's first and last taps here
        let y = conv_transpose1d(&x, &w, &b, 2, 1).unwrap();
        assert_eq!(y.len, 2);
        assert_eq!(y.channel(0), [0.25, 0.5]);
    }

    #[test]
    fn conv_transpose_upsamples_by_exact_factor() {
        // kernel 2f, pad f/2 gives out_len = len * f for any input length
        for f in [2usize, 4, 8] {
            let x = fm(1, &[1.0; 7]);
            let w = t(&[1, 1, (2 * f) as u64], &vec![0.5; 2 * f]);
            let b = t(&[1], &[0.0]);
            let y = conv_transpose1d(&x, &w, &b, f, f / 2).unwrap();
            assert_eq!(y.len, 7 * f);
        }
    }

    #[test]
    fn conv2d_hand_result() {
        // 2x2 input, 2x1 kernel, stride 1, no pad
        let x = FeatureMap2d {
            channels: 1,
            height: 2,
            width: 2,
            data: vec![1.0, 2.0, 3.0, 4.0],
        };
        let w = t(&[1, 1, 2, 1], &[1.0, 10.0]);
        let b = t(&[1], &[0.5]);
        let y = conv2d(&x, &w, &b, (1, 1), (0, 0)).unwrap();
        assert_eq!(y.height, 1);
        assert_eq!(y.width, 2);
        assert_eq!(y.data, [31.5, 42.5]);
    }

    #[test]
    fn leaky_relu_scales_negatives_only() {
        let mut v = [2.0, -2.0, 0.0];
        leaky_relu_in_place(&mut v);
        assert_eq!(v, [2.0, -0.2, 0.0]);
    }

    #[test]
    fn avg_pool_halves_and_drops_tail() {
        let x = fm(1, &[1.0, 2.0, 3.0, 4.0, 9.0]);
        let y = avg_pool1d(&x, 2);
        assert_eq!(y.channel(0), [1.5, 3.5]);
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let x = fm(2, &[0.0; 4]);
        let w = t(&[1, 1, 1], &[1.0]);
        let b = t(&[1], &[0.0]);
        assert!(conv1d(&x, &w, &b, 1, 0, 1).is_err());
        let bad_bias = t(&[2], &[0.0, 0.0]);
        let x1 = fm(1, &[0.0; 4]);
        assert!(conv1d(&x1, &w, &bad_bias, 1, 0, 1).is_err());
    }
}

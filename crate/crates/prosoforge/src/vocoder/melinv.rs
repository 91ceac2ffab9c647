use crate::error::{Error, Result};
use crate::mat::Mat;

const NORM_EPS: f64 = 1e-8;

/// Approximately inverts a log-mel spectrogram back to a linear magnitude
/// spectrogram using the column-normalized transpose of the mel filterbank:
/// exponentiate, multiply by W^T with each frequency bin's column scaled by
/// its total filter weight, and clamp at zero.
///
/// `log_mel` is frames x n_mels, `bank` is n_mels x bins (see
/// [`build_mel_filterbank`](crate::melspec::build_mel_filterbank)); the
/// result is frames x bins.
pub fn mel_pseudo_inverse(log_mel: &Mat, bank: &Mat) -> Result<Mat> {
    if log_mel.cols() != bank.rows() {
        return Err(Error::Validation(format!(
            "log-mel has {} bands but filterbank has {}",
            log_mel.cols(),
            bank.rows()
        )));
    }
    let n_mels = bank.rows();
    let bins = bank.cols();
    // weight[b][m] = bank[m][b] / (sum_m bank[m][b] + eps)
    let mut col_sum = vec![0.0f64; bins];
    for m in 0..n_mels {
        for (b, s) in col_sum.iter_mut().enumerate() {
            *s += bank.get(m, b);
        }
    }
    let mut out = Mat::zeros(log_mel.rows(), bins);
    for t in 0..log_mel.rows() {
        let mel_lin: Vec<f64> = log_mel.row(t).iter().map(|&v| v.exp()).collect();
        for (b, &sum) in col_sum.iter().enumerate() {
            let mut acc = 0.0;
            for (m, &e) in mel_lin.iter().enumerate() {
                acc += bank.get(m, b) * e;
            }
            out.set(t, b, (acc / (sum + NORM_EPS)).max(0.0));
        }
    }
    Ok(out)
}

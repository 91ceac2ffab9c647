//! Acceptance gate: one test per release criterion, each printing a
//! `[PASS]` line with its pinned tolerances. Run with `--nocapture` to see
//! the full checklist.

use std::path::{Path, PathBuf};

use prosoforge::cli::mel_pgm_bytes;
use prosoforge::dataset;
use prosoforge::mat::Mat;
use prosoforge::melspec::{
    hz_to_mel, mel_spectrogram, mel_to_hz, MelSpec, LOG_FLOOR,
};
use prosoforge::metrics::{
    evaluate_pair, mcd, mos_aggregate, pcd, rmse, EvalConfig, McdMode, RatingRow, RatingsTable,
};
use prosoforge::prosody::{
    convert, detect_segments, shift_pitch_uniform, time_stretch_uniform, track_pitch,
    transform_contour, PitchContour, PitchRange, ProsodyProfile, SegmentKind,
    DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO,
};
use prosoforge::rng::SplitMix64;
use prosoforge::signal::{
    istft, magnitude, read_tensor, stft, write_tensor, write_wav, AudioBuffer, Complex64,
    ComplexSpectrogram, FrameSpec, Tensor,
};
use prosoforge::synth;
use prosoforge::vocoder::{
    gan_losses, generator_forward, griffin_lim, init_weights, receptive_field,
    spsa_step, toy_training_run, GeneratorConfig, SubNetOutput, WeightStore,
};

fn pass(line: &str) {
    println!("[PASS] {line}");
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn c01_metric_golden_values() {
    let m = Mat::from_vec(2, 3, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
    assert_eq!(mcd(&m, &m, McdMode::Paper).unwrap(), 0.0);

    let ln10 = std::f64::consts::LN_10;
    let a1 = Mat::from_vec(1, 1, vec![0.0]);
    let b1 = Mat::from_vec(1, 1, vec![1.0]);
    let single = mcd(&a1, &b1, McdMode::Paper).unwrap();
    assert!(rel_close(single, 10.0 * ln10 / std::f64::consts::SQRT_2, 1e-9));
    assert!((single - 16.2818).abs() < 1e-4);

    let a2 = Mat::from_vec(2, 1, vec![0.0, 0.0]);
    let b2 = Mat::from_vec(2, 1, vec![1.0, 1.0]);
    let double = mcd(&a2, &b2, McdMode::Paper).unwrap();
    assert!(rel_close(double, 10.0 * ln10, 1e-9));
    assert!((double - 23.0259).abs() < 1e-4);

    let contour = |f0: &[f64]| PitchContour {
        f0_hz: f0.to_vec(),
        voiced: vec![true; f0.len()],
        rms: vec![0.5; f0.len()],
        hop_s: 0.016,
        sample_rate_hz: 16_000,
        f0_min_hz: 50.0,
        f0_max_hz: 500.0,
    };
    let (d, n) = pcd(&contour(&[100.0, 110.0]), &contour(&[105.0, 105.0])).unwrap();
    assert_eq!((d, n), (25.0, 2));

    let x = AudioBuffer::new(vec![0.0, 0.0, 0.0, 0.0], 16_000).unwrap();
    let y = AudioBuffer::new(vec![3.0, 4.0, 0.0, 0.0], 16_000).unwrap();
    assert_eq!(rmse(&x, &y, false).unwrap(), 2.5);

    let rows: Vec<RatingRow> = [3.0, 4.0, 5.0]
        .iter()
        .enumerate()
        .map(|(i, &r)| RatingRow {
            listener_id: format!("l{i}"),
            sample_id: "s".into(),
            rating: r,
        })
        .collect();
    assert_eq!(mos_aggregate(&RatingsTable::new(rows)).unwrap().mos, 4.0);

    pass("01 metric golden values: mcd 0 / 16.2818 / 23.0259 (1e-9 rel), pcd 25, rmse 2.5, mos 4.0 exact");
}

fn corpus_fixtures(dir: &Path) -> Vec<PathBuf> {
    let fixtures: Vec<(&str, AudioBuffer)> = vec![
        ("tone.wav", synth::tone(440.0, 16_000, 0.6).unwrap()),
        ("chirp.wav", synth::chirp(120.0, 380.0, 16_000, 0.6).unwrap()),
        ("speech.wav", synth::speech_like(140.0, 16_000, 0.7, 11).unwrap()),
        ("vibrato.wav", synth::vibrato_tone(220.0, 2.0, 2.0, 16_000, 0.6).unwrap()),
        ("pauses.wav", synth::tone_silence_tone(220.0, 0.4, 0.2, 16_000).unwrap()),
    ];
    fixtures
        .into_iter()
        .map(|(name, audio)| {
            let path = dir.join(name);
            write_wav(&path, &audio).unwrap();
            path
        })
        .collect()
}

#[test]
fn c02_self_evaluation_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    for path in corpus_fixtures(dir.path()) {
        let report = evaluate_pair(&path, &path, &EvalConfig::default()).unwrap();
        assert_eq!(report.mcd, 0.0, "{}", path.display());
        assert_eq!(report.pcd, Some(0.0), "{}", path.display());
        assert_eq!(report.rmse, Some(0.0), "{}", path.display());
        assert!(report.frames_compared >= 1);
    }
    pass("02 self-evaluation: mcd = pcd = rmse = 0 on all 5 corpus fixtures");
}

#[test]
fn c03_stft_istft_round_trip() {
    let spec = FrameSpec::default();
    assert_eq!((spec.n_fft, spec.hop), (1024, 256));
    for seed in 0..10u64 {
        let mut rng = SplitMix64::new(seed);
        let samples: Vec<f32> = (0..16_000).map(|_| rng.next_symmetric(0.9) as f32).collect();
        let audio = AudioBuffer::new(samples, 16_000).unwrap();
        let back = istft(&stft(&audio, &spec).unwrap(), &spec, 16_000).unwrap();
        let n = back.len();
        assert!(n >= 4 * spec.n_fft);
        let mut max_err = 0.0f64;
        for i in spec.n_fft..n - spec.n_fft {
            let e = (f64::from(audio.samples()[i]) - f64::from(back.samples()[i])).abs();
            max_err = max_err.max(e);
        }
        assert!(max_err < 1e-6, "seed {seed}: interior error {max_err}");
    }
    pass("03 stft/istft round trip: interior max abs error < 1e-6 on 10 random 1 s buffers");
}

#[test]
fn c04_mel_correctness() {
    let frame = FrameSpec::default();
    let mel_spec = MelSpec::default();

    // 1 kHz tone lands in the filter whose center is nearest 1 kHz, with at
    // most a one-band tie, in every frame
    let audio = synth::tone(1000.0, 16_000, 0.5).unwrap();
    let mel = mel_spectrogram(&audio, &frame, &mel_spec).unwrap();
    let lo = hz_to_mel(mel_spec.fmin_hz);
    let hi = hz_to_mel(8000.0);
    let center = |m: usize| mel_to_hz(lo + (hi - lo) * (m + 1) as f64 / 81.0);
    let expected = (0..mel_spec.n_mels)
        .min_by(|&a, &b| {
            (center(a) - 1000.0)
                .abs()
                .partial_cmp(&(center(b) - 1000.0).abs())
                .unwrap()
        })
        .unwrap();
    for t in 0..mel.rows() {
        let argmax = mel
            .row(t)
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert!(
            argmax.abs_diff(expected) <= 1,
            "frame {t}: band {argmax}, expected {expected}"
        );
    }

    // silence clamps to the exact log floor
    let silence = AudioBuffer::new(vec![0.0; 8000], 16_000).unwrap();
    let quiet = mel_spectrogram(&silence, &frame, &mel_spec).unwrap();
    let floor = LOG_FLOOR.ln();
    assert!(quiet.iter().all(|v| v == floor));

    // halving the gain moves every unclamped cell by exactly ln(1/2)
    let voice = synth::speech_like(150.0, 16_000, 0.5, 3).unwrap();
    let half = AudioBuffer::new(voice.samples().iter().map(|s| s * 0.5).collect(), 16_000).unwrap();
    let full_mel = mel_spectrogram(&voice, &frame, &mel_spec).unwrap();
    let half_mel = mel_spectrogram(&half, &frame, &mel_spec).unwrap();
    let ln_half = 0.5f64.ln();
    let mut checked = 0usize;
    for (a, b) in full_mel.iter().zip(half_mel.iter()) {
        if a > floor && b > floor {
            assert!((b - a - ln_half).abs() <= 1e-9, "shift {} vs {ln_half}", b - a);
            checked += 1;
        }
    }
    assert!(checked > 100, "only {checked} cells above the floor");

    pass("04 mel correctness: 1 kHz localizes every frame, silence floor = ln(1e-5) exact, gain shift within 1e-9");
}

#[test]
fn c05_pitch_tracker() {
    let range = PitchRange::default();
    let frame = FrameSpec::default();

    let tone = synth::tone(200.0, 16_000, 1.0).unwrap();
    let contour = track_pitch(&tone, &range, &frame).unwrap();
    let f0 = contour.median_voiced_f0().expect("voiced tone");
    assert!((f0 - 200.0).abs() <= 2.0, "median f0 {f0}");
    assert!(contour.voiced_fraction() >= 0.9, "{}", contour.voiced_fraction());

    let silence = AudioBuffer::new(vec![0.0; 16_000], 16_000).unwrap();
    let quiet = track_pitch(&silence, &range, &frame).unwrap();
    assert_eq!(quiet.voiced_count(), 0);

    pass("05 pitch tracker: 200 Hz median within +/-2 Hz, >= 90% voiced; silence 100% unvoiced");
}

#[test]
fn c06_prosody_transform_contracts() {
    let range = PitchRange::default();
    let frame = FrameSpec::default();

    let tone = synth::tone(200.0, 16_000, 1.0).unwrap();
    let up = shift_pitch_uniform(&tone, 2.0).unwrap();
    let f0 = track_pitch(&up, &range, &frame)
        .unwrap()
        .median_voiced_f0()
        .expect("voiced");
    assert!((f0 / 400.0 - 1.0).abs() <= 0.02, "shifted f0 {f0}");

    let voice = synth::speech_like(140.0, 16_000, 1.0, 5).unwrap();
    let slow = time_stretch_uniform(&voice, 0.5).unwrap();
    let ratio = slow.duration_s() / voice.duration_s();
    assert!((ratio - 2.0).abs() / 2.0 <= 0.01, "duration ratio {ratio}");

    let contour = PitchContour {
        f0_hz: vec![100.0, 400.0],
        voiced: vec![true, true],
        rms: vec![0.5, 0.5],
        hop_s: 0.016,
        sample_rate_hz: 16_000,
        f0_min_hz: 40.0,
        f0_max_hz: 900.0,
    };
    let mut profile = ProsodyProfile::neutral();
    profile.pitch_range_scale = 2.0;
    let widened = transform_contour(&contour, &profile).unwrap();
    assert!(rel_close(widened.f0_hz[0], 50.0, 1e-9), "{}", widened.f0_hz[0]);
    assert!(rel_close(widened.f0_hz[1], 800.0, 1e-9), "{}", widened.f0_hz[1]);

    pass("06 prosody transforms: pitch x2 within 2%, stretch 0.5 doubles duration within 1%, range widening within 1e-9");
}

fn ncc(a: &AudioBuffer, b: &AudioBuffer) -> f64 {
    let n = a.len().min(b.len());
    let mut dot = 0.0;
    let mut ea = 0.0;
    let mut eb = 0.0;
    for i in 0..n {
        let x = f64::from(a.samples()[i]);
        let y = f64::from(b.samples()[i]);
        dot += x * y;
        ea += x * x;
        eb += y * y;
    }
    dot / (ea * eb).sqrt().max(1e-12)
}

fn semitone_std(audio: &AudioBuffer) -> f64 {
    let c = track_pitch(audio, &PitchRange::default(), &FrameSpec::default()).unwrap();
    let voiced: Vec<f64> = c
        .f0_hz
        .iter()
        .zip(&c.voiced)
        .filter(|(_, v)| **v)
        .map(|(f, _)| *f)
        .collect();
    assert!(voiced.len() > 20, "too few voiced frames");
    let ln_mu = voiced.iter().map(|f| f.ln()).sum::<f64>() / voiced.len() as f64;
    let devs: Vec<f64> = voiced
        .iter()
        .map(|f| 12.0 * (f.ln() - ln_mu) / std::f64::consts::LN_2)
        .collect();
    let mean = devs.iter().sum::<f64>() / devs.len() as f64;
    (devs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / devs.len() as f64).sqrt()
}

#[test]
fn c07_conversion_end_to_end() {
    let expressive = ProsodyProfile::conversational_expressive();
    assert_eq!(expressive.pitch_range_scale, 1.5);
    let vibrato = synth::vibrato_tone(220.0, 2.0, 2.0, 16_000, 2.0).unwrap();
    let widened = convert(&vibrato, &expressive).unwrap();
    let ratio = semitone_std(&widened) / semitone_std(&vibrato);
    assert!((1.2..=1.8).contains(&ratio), "semitone-std ratio {ratio}");

    let pause_of = |buf: &AudioBuffer| -> f64 {
        let c = track_pitch(buf, &PitchRange::default(), &FrameSpec::default()).unwrap();
        let m = detect_segments(&c, DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO, 0.0).unwrap();
        let p = m
            .segments
            .iter()
            .find(|s| s.kind == SegmentKind::Pause)
            .expect("interior pause");
        p.frames() as f64 * c.hop_s
    };
    let spaced = synth::tone_silence_tone(220.0, 1.0, 0.5, 16_000).unwrap();
    let mut pausey = ProsodyProfile::neutral();
    pausey.pause_scale = 2.0;
    let slowed = convert(&spaced, &pausey).unwrap();
    let growth = pause_of(&slowed) / pause_of(&spaced);
    assert!((growth - 2.0).abs() <= 0.2, "pause growth {growth}");

    let voice = synth::speech_like(150.0, 16_000, 1.0, 21).unwrap();
    let neutral = convert(&voice, &ProsodyProfile::neutral()).unwrap();
    let corr = ncc(&voice, &neutral);
    assert!(corr > 0.95, "neutral correlation {corr}");

    pass("07 conversion end-to-end: vibrato-std ratio in [1.2, 1.8], pause x2 within 10%, neutral ncc > 0.95");
}

#[test]
fn c08_griffin_lim_convergence_and_zero_iteration_identity() {
    // 125 Hz fundamental: the harmonics sit exactly on FFT bins 8/16/24 at
    // n_fft 1024 and 16 kHz, where zero-phase initialization can converge
    let frame = FrameSpec::default();
    let audio = synth::speech_like(125.0, 16_000, 1.024, 5).unwrap();
    let mag = magnitude(&stft(&audio, &frame).unwrap());

    let result = griffin_lim(&mag, &frame, 60, 16_000).unwrap();
    assert!(result.sc_final <= result.sc_initial);
    assert!(result.sc_final < 0.1, "sc_final {}", result.sc_final);

    let zero_iter = griffin_lim(&mag, &frame, 0, 16_000).unwrap();
    let mut zero_phase = ComplexSpectrogram::new(mag.rows(), frame.n_fft);
    for t in 0..mag.rows() {
        for b in 0..zero_phase.bins() {
            zero_phase.set(t, b, Complex64::new(mag.get(t, b), 0.0));
        }
    }
    let reference = istft(&zero_phase, &frame, 16_000).unwrap();
    assert_eq!(zero_iter.audio.samples(), reference.samples());
    assert_eq!(zero_iter.sc_initial, zero_iter.sc_final);

    pass("08 griffin-lim: sc 60-iter final <= initial and < 0.1; zero-iteration output bit-equals zero-phase istft");
}

#[test]
fn c09_generator_invariants() {
    // five deterministic configs obeying kernel >= factor with even difference
    let mut rng = SplitMix64::new(99);
    let mut pick = |choices: &[usize]| choices[(rng.next_u64() % choices.len() as u64) as usize];
    for i in 0..5 {
        let stages = 1 + (i % 2);
        let factors: Vec<usize> = (0..stages).map(|_| pick(&[2, 4, 8])).collect();
        let kernels: Vec<usize> = factors.iter().map(|f| 2 * f).collect();
        let config = GeneratorConfig {
            n_mels: pick(&[4, 6, 8]),
            base_channels: pick(&[4, 8]),
            upsample_factors: factors,
            upsample_kernels: kernels,
            resblock_kernel: 3,
            resblock_dilations: vec![1, 3],
        };
        config.validate().unwrap();
        let weights = init_weights(&config, 1000 + i as u64).unwrap();
        let frames = 3 + 2 * i;
        let mut mel_rng = SplitMix64::new(7 * i as u64 + 1);
        let mel = Mat::from_vec(
            frames,
            config.n_mels,
            (0..frames * config.n_mels)
                .map(|_| mel_rng.next_symmetric(1.0))
                .collect(),
        );
        let out = generator_forward(&mel, &config, &weights, 16_000).unwrap();
        assert_eq!(out.len(), frames * config.hop(), "config {i}");
    }

    // zero weights produce exact silence
    let config = GeneratorConfig {
        n_mels: 6,
        base_channels: 4,
        upsample_factors: vec![4, 2],
        upsample_kernels: vec![8, 4],
        resblock_kernel: 3,
        resblock_dilations: vec![1, 3],
    };
    let weights = init_weights(&config, 17).unwrap();
    let zeros = weights.unflatten(&vec![0.0; weights.parameter_count()]).unwrap();
    let mel = Mat::from_vec(8, 6, (0..48).map(|i| (i as f64) * 0.07 - 1.0).collect());
    let silent = generator_forward(&mel, &config, &zeros, 16_000).unwrap();
    assert!(silent.samples().iter().all(|&s| s == 0.0));

    // perturbing one input frame changes only the samples inside the
    // arithmetic receptive-field window
    let frames = 48;
    let mut mel_rng = SplitMix64::new(4242);
    let base: Vec<f64> = (0..frames * config.n_mels)
        .map(|_| mel_rng.next_symmetric(1.0))
        .collect();
    let mel_a = Mat::from_vec(frames, config.n_mels, base.clone());
    let mut bumped = base;
    let target_frame = 24;
    for m in 0..config.n_mels {
        bumped[target_frame * config.n_mels + m] += 0.5;
    }
    let mel_b = Mat::from_vec(frames, config.n_mels, bumped);
    let out_a = generator_forward(&mel_a, &config, &weights, 16_000).unwrap();
    let out_b = generator_forward(&mel_b, &config, &weights, 16_000).unwrap();
    let (lo, hi) = receptive_field(&config, target_frame, frames);
    assert!(hi - lo < out_a.len(), "window covers everything");
    let changed: Vec<usize> = (0..out_a.len())
        .filter(|&i| out_a.samples()[i] != out_b.samples()[i])
        .collect();
    assert!(!changed.is_empty(), "perturbation had no effect");
    assert!(*changed.first().unwrap() >= lo, "leak before window");
    assert!(*changed.last().unwrap() < hi, "leak after window");

    pass("09 generator: length = frames x hop on 5 configs, zero weights -> silence, locality matches the window arithmetic");
}

#[test]
fn c10_gan_loss_contracts() {
    use prosoforge::vocoder::{discriminator_forward, init_discriminator_weights, DiscriminatorConfig};

    let frame = FrameSpec { n_fft: 64, hop: 32, ..FrameSpec::default() };
    let mel = MelSpec { n_mels: 8, fmin_hz: 0.0, fmax_hz: None };
    let audio = synth::speech_like(120.0, 16_000, 0.2, 9).unwrap();
    let dconfig = DiscriminatorConfig::default();
    let dweights = init_discriminator_weights(&dconfig, 7).unwrap();
    let d_out = discriminator_forward(&audio, &dconfig, &dweights).unwrap();
    let report = gan_losses(&audio, &audio, &d_out, &d_out, &frame, &mel, 2.0, 45.0).unwrap();
    assert_eq!(report.feature_matching, 0.0);
    assert_eq!(report.mel_reconstruction, 0.0);

    // every sub-network scoring a constant 0.5 on real and fake:
    // adv_d = mean((0.5-1)^2) + mean(0.5^2) = 0.5
    let flat = vec![SubNetOutput {
        score: vec![0.5; 4],
        features: vec![],
    }];
    let tiny = AudioBuffer::new(vec![0.1; 256], 16_000).unwrap();
    let hand = gan_losses(&tiny, &tiny, &flat, &flat, &frame, &mel, 2.0, 45.0).unwrap();
    assert!((hand.adv_d - 0.5).abs() <= 1e-12, "adv_d {}", hand.adv_d);

    pass("10 gan losses: identical inputs give fm = mel = 0 exactly; constant-0.5 scores give adv_d = 0.5 within 1e-12");
}

#[test]
fn c11_spsa_descends() {
    let mut w = vec![0.0f64];
    for k in 0..200u64 {
        let (next, _) = spsa_step(&w, |p| Ok((p[0] - 3.0) * (p[0] - 3.0)), 0.05, 0.01, 500 + k)
            .unwrap();
        w = next;
    }
    assert!((w[0] - 3.0).abs() < 0.5, "w = {}", w[0]);

    let (_, losses) = toy_training_run(0, 100).unwrap();
    assert_eq!(losses.len(), 100);
    let first = median(&losses[..10]);
    let last = median(&losses[90..]);
    assert!(last < first, "median loss {first} -> {last}");

    pass("11 spsa: quadratic |w - 3| < 0.5 in 200 steps; toy run last-10 median loss below first-10 median");
}

#[test]
fn c12_format_byte_exactness() {
    let dir = tempfile::tempdir().unwrap();

    // tensor container: frozen byte layout, file round trip, rewrite identity
    let tensor = Tensor::new(vec![2, 2], vec![1.5, -0.25, 0.0, 8.0]).unwrap();
    let mut golden = Vec::new();
    golden.extend_from_slice(b"PFT1");
    golden.extend_from_slice(&2u32.to_le_bytes());
    golden.extend_from_slice(&2u64.to_le_bytes());
    golden.extend_from_slice(&2u64.to_le_bytes());
    for v in [1.5f32, -0.25, 0.0, 8.0] {
        golden.extend_from_slice(&v.to_le_bytes());
    }
    let tensor_path = dir.path().join("t.pft");
    write_tensor(&tensor_path, &tensor).unwrap();
    assert_eq!(std::fs::read(&tensor_path).unwrap(), golden);
    assert_eq!(read_tensor(&tensor_path).unwrap(), tensor);

    // weight store: frozen layout (magic, u32 count, length-prefixed names,
    // embedded tensor records in sorted name order) and round trip
    let mut store = WeightStore::new(0);
    store.insert("a", Tensor::new(vec![1], vec![0.5]).unwrap());
    store.insert("b.bias", Tensor::new(vec![2], vec![1.0, 2.0]).unwrap());
    let mut bytes = Vec::new();
    store.write_to(&mut bytes).unwrap();
    let mut expected = Vec::new();
    expected.extend_from_slice(b"PFW1");
    expected.extend_from_slice(&2u32.to_le_bytes());
    expected.extend_from_slice(&1u16.to_le_bytes());
    expected.extend_from_slice(b"a");
    expected.extend_from_slice(b"PFT1");
    expected.extend_from_slice(&1u32.to_le_bytes());
    expected.extend_from_slice(&1u64.to_le_bytes());
    expected.extend_from_slice(&0.5f32.to_le_bytes());
    expected.extend_from_slice(&6u16.to_le_bytes());
    expected.extend_from_slice(b"b.bias");
    expected.extend_from_slice(b"PFT1");
    expected.extend_from_slice(&1u32.to_le_bytes());
    expected.extend_from_slice(&2u64.to_le_bytes());
    expected.extend_from_slice(&1.0f32.to_le_bytes());
    expected.extend_from_slice(&2.0f32.to_le_bytes());
    assert_eq!(bytes, expected);
    assert_eq!(WeightStore::read_from(&mut &bytes[..]).unwrap(), store);

    // pgm: frozen header + pixels, band 0 on the bottom row
    let img = Mat::from_vec(2, 2, vec![0.0, 10.0, 5.0, 2.5]);
    let mut pgm = b"P5\n2 2\n255\n".to_vec();
    pgm.extend_from_slice(&[255, 64, 0, 128]);
    assert_eq!(mel_pgm_bytes(&img).unwrap(), pgm);

    // report json: stable serialization and the full key set
    let wav_path = dir.path().join("r.wav");
    write_wav(&wav_path, &synth::speech_like(150.0, 16_000, 0.5, 2).unwrap()).unwrap();
    let report = evaluate_pair(&wav_path, &wav_path, &EvalConfig::default()).unwrap();
    let a = serde_json::to_string(&report).unwrap();
    let b = serde_json::to_string(&report).unwrap();
    assert_eq!(a, b);
    let value: serde_json::Value = serde_json::from_str(&a).unwrap();
    let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        [
            "config",
            "frames_compared",
            "mcd",
            "mcd_mode",
            "pcd",
            "pcd_skip_reason",
            "pesq_external",
            "ref",
            "rmse",
            "syn",
            "voiced_fraction_ref",
            "voiced_fraction_syn",
        ]
    );

    // manifest jsonl: identical bytes on re-save, lossless reload
    let corpus = dir.path().join("corpus");
    std::fs::create_dir(&corpus).unwrap();
    write_wav(corpus.join("a.wav"), &synth::tone(220.0, 16_000, 0.3).unwrap()).unwrap();
    write_wav(corpus.join("b.wav"), &synth::tone(330.0, 16_000, 0.3).unwrap()).unwrap();
    let manifest = dataset::ingest(&corpus, &[]).unwrap();
    let m1 = dir.path().join("m1.jsonl");
    let m2 = dir.path().join("m2.jsonl");
    manifest.save(&m1).unwrap();
    manifest.save(&m2).unwrap();
    assert_eq!(std::fs::read(&m1).unwrap(), std::fs::read(&m2).unwrap());
    assert_eq!(dataset::Manifest::load(&m1).unwrap().entries, manifest.entries);

    // segmentation: concatenating the chunks reproduces the source bits
    let long = synth::speech_like(130.0, 16_000, 3.0, 8).unwrap();
    let chunks = dataset::segment(&long, 1.0, DEFAULT_MIN_PAUSE_S, DEFAULT_THRESHOLD_RATIO).unwrap();
    assert!(chunks.len() >= 3);
    let mut rebuilt: Vec<f32> = Vec::with_capacity(long.len());
    for c in &chunks {
        assert_eq!(c.offset, rebuilt.len());
        rebuilt.extend_from_slice(c.audio.samples());
    }
    assert_eq!(rebuilt, long.samples());

    pass("12 formats: tensor, weight store, pgm, report json, manifest jsonl byte-exact; segmentation bit-identical");
}

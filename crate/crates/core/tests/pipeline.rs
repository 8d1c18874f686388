use std::fs;
use std::path::Path;

use biosig::harness::{parse_metrics, run_pipeline, PipelineConfig};
use biosig::signal::write_csv;
use biosig::synth::{self, SineChirpSpec};
use biosig::{Error, Signal};

fn noisy_and_clean(dir: &Path) {
    let mut g = synth::rng(11);
    let (mut clean, mut noisy) = (Vec::new(), Vec::new());
    for i in 0..12 {
        let (label, x) = if i % 2 == 0 {
            ("sine", synth::sine(5.0, 100.0, 512, 1.0, 0.3 * i as f64))
        } else {
            (
                "chirp",
                synth::chirp(1.0, 15.0, 100.0, 512, 1.0, 0.3 * i as f64),
            )
        };
        let y = synth::add_noise(&x, 5.0, &mut g);
        let label = Some(label.to_string());
        clean.push(Signal::with_meta(x, 100.0, format!("r{i}"), label.clone()).unwrap());
        noisy.push(Signal::with_meta(y, 100.0, format!("r{i}"), label).unwrap());
    }
    write_csv(dir.join("clean.csv"), &clean).unwrap();
    write_csv(dir.join("noisy.csv"), &noisy).unwrap();
}

#[test]
fn config_file_drives_a_full_run() {
    let dir = tempfile::tempdir().unwrap();
    noisy_and_clean(dir.path());
    fs::write(
        dir.path().join("run.cfg"),
        "# denoise then classify\n\
         input = noisy.csv\n\
         reference = clean.csv\n\
         output_dir = out\n\
         denoise = true\n\
         denoise.wavelet = db6\n\
         denoise.level = 3\n\
         gaf = gadf\n\
         rp_eps = 0.25\n\
         mtf_bins = 6\n\
         fuse_size = 24\n\
         k = 1\n\
         seed = 3\n",
    )
    .unwrap();
    let cfg = PipelineConfig::from_file(dir.path().join("run.cfg")).unwrap();
    let outcome = run_pipeline(&cfg).unwrap();

    let out = dir.path().join("out");
    let metrics = parse_metrics(&fs::read_to_string(out.join("metrics.txt")).unwrap()).unwrap();
    let gain: f64 = metrics["snr_gain_mean_db"].parse().unwrap();
    assert!(gain > 0.0, "gain {gain}");
    assert_eq!(metrics["records"], "12");
    assert_eq!(metrics["accuracy"], outcome.report.accuracy.to_string());
    assert!(out.join("report.txt").exists());
    assert!(fs::read_to_string(out.join("predictions.csv"))
        .unwrap()
        .starts_with("id,truth,predicted\n"));

    let image = fs::read(out.join("images").join("noisy_r00001.pgm")).unwrap();
    assert!(image.starts_with(b"P5\n72 24\n255\n"));
    assert_eq!(image.len(), 13 + 72 * 24);
}

#[test]
fn missing_input_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        inputs: vec![dir.path().join("nowhere.csv")],
        output_dir: dir.path().join("out"),
        ..PipelineConfig::default()
    };
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(!err.is_config_error());
    assert!(err.to_string().contains("nowhere.csv"));
}

#[test]
fn bad_record_is_reported_by_id() {
    let dir = tempfile::tempdir().unwrap();
    let mut data = synth::sine_chirp_dataset(
        &SineChirpSpec {
            per_class: 3,
            len: 64,
            ..SineChirpSpec::default()
        },
        1,
    )
    .unwrap();
    data[2] = Signal::with_meta(vec![0.5; 64], 100.0, "flat", Some("sine".into())).unwrap();
    let path = dir.path().join("set.csv");
    write_csv(&path, &data).unwrap();
    let cfg = PipelineConfig {
        inputs: vec![path],
        output_dir: dir.path().join("out"),
        ..PipelineConfig::default()
    };
    let err = run_pipeline(&cfg).unwrap_err();
    assert!(err.to_string().contains("set:r00003"), "{err}");
}

#[test]
fn invalid_settings_fail_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        inputs: vec![dir.path().join("x.csv")],
        output_dir: dir.path().join("out"),
        train_fraction: 0.0,
        ..PipelineConfig::default()
    };
    assert!(run_pipeline(&cfg).unwrap_err().is_config_error());
    assert!(!dir.path().join("out").exists());

    let err = PipelineConfig::parse("input = a.csv\nthreshold = 3\n", None).unwrap_err();
    assert!(err.to_string().contains("line 2"), "{err}");
}

#[test]
fn k_beyond_training_set_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = synth::sine_chirp_dataset(
        &SineChirpSpec {
            per_class: 3,
            len: 64,
            ..SineChirpSpec::default()
        },
        2,
    )
    .unwrap();
    let path = dir.path().join("small.csv");
    write_csv(&path, &data).unwrap();
    let cfg = PipelineConfig {
        inputs: vec![path],
        output_dir: dir.path().join("out"),
        k: 50,
        ..PipelineConfig::default()
    };
    assert!(run_pipeline(&cfg).unwrap_err().is_config_error());
}

//! `biosig`: batch front end for the biosig toolkit.
//!
//! Exit codes: 0 success, 2 bad invocation or configuration, 3 bad data or
//! I/O failure while processing.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biosig::denoise::{denoise, DenoiseParams, Rescale, Rule, ThresholdFn};
use biosig::dwt::wavedec;
use biosig::encode::{
    encode_fused, export_fused, EncoderParams, GafKind, GrayMapping, ImageFormat,
};
use biosig::harness::{image_file_name, parse_metrics, run_pipeline, PipelineConfig};
use biosig::qrs::detect_qrs;
use biosig::signal::{load_csv, normalize_samples, write_csv, NormRange};
use biosig::synth::{self, SineChirpSpec};
use biosig::wavelet::get_wavelet;
use biosig::{Error, Result, Signal};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "biosig",
    version,
    about = "Wavelet denoising, signal imaging and QRS detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InputArgs {
    /// CSV file, one record per row
    #[arg(short, long)]
    input: PathBuf,
    /// Sampling rate in Hz; defaults to the file's `# fs=` header
    #[arg(long)]
    fs: Option<f64>,
    /// Header name of the label column, if the file has one
    #[arg(long)]
    label_column: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<Vec<Signal>> {
        load_csv(&self.input, self.fs, self.label_column.as_deref())
    }
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long, default_value = "db6")]
    wavelet: String,
    #[arg(long, default_value = "soft")]
    threshold: String,
    #[arg(long, default_value_t = 3)]
    level: usize,
    #[arg(long, default_value = "sqtwolog")]
    rule: String,
    #[arg(long, default_value = "sln")]
    rescale: String,
}

impl DenoiseArgs {
    fn params(&self) -> Result<DenoiseParams> {
        Ok(DenoiseParams::new(
            &get_wavelet(&self.wavelet)?.name,
            self.threshold.parse::<ThresholdFn>()?,
            self.level,
            self.rule.parse::<Rule>()?,
            self.rescale.parse::<Rescale>()?,
        ))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pgm,
    Png,
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    /// Labelled noisy 5 Hz sines and noisy linear chirps
    SineChirp,
    /// One noisy ECG-like pulse train per row
    Ecg,
}

#[derive(Subcommand)]
enum Command {
    /// Wavelet-denoise every record and write them to a new CSV
    Denoise {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        params: DenoiseArgs,
    },
    /// Write a fused angular-field / recurrence / transition-field image per record
    Encode {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output_dir: PathBuf,
        #[arg(long, default_value = "gasf")]
        gaf: String,
        /// Recurrence threshold; raw distances when absent
        #[arg(long)]
        rp_eps: Option<f64>,
        #[arg(long, default_value_t = 8)]
        mtf_bins: usize,
        #[arg(long, default_value_t = 64)]
        fuse_size: usize,
        #[arg(long, value_enum, default_value = "pgm")]
        format: Format,
    },
    /// Detect R peaks; writes one peak CSV per record and prints heart rates
    DetectQrs {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output_dir: PathBuf,
    },
    /// Run the encode-split-classify pipeline described by a config file
    Classify {
        #[arg(short, long)]
        config: Option<PathBuf>,
        /// Comma-separated input CSVs
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        train_fraction: Option<f64>,
        /// Any other config key, as key=value; may repeat
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the report and metrics from a classify output directory
    Report {
        #[arg(short, long)]
        dir: PathBuf,
    },
    /// Print the wavelet decomposition of one record as JSON
    Inspect {
        #[command(flatten)]
        input: InputArgs,
        /// 1-based row
        #[arg(long, default_value_t = 1)]
        record: usize,
        #[arg(long, default_value = "db4")]
        wavelet: String,
        #[arg(long, default_value_t = 3)]
        level: usize,
    },
    /// Generate a synthetic data set
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Records per class (sine-chirp) or records (ecg)
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 10.0)]
        snr_db: f64,
    },
}

fn output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::InvalidParameter(format!("{}: {e}", dir.display())))
}

fn encode(input: &InputArgs, dir: &Path, params: &EncoderParams, format: Format) -> Result<()> {
    let records = input.load()?;
    output_dir(dir)?;
    let (ext, fmt) = match format {
        Format::Pgm => ("pgm", ImageFormat::Pgm),
        Format::Png => ("png", ImageFormat::Png),
    };
    for r in &records {
        let img = normalize_samples(r.samples(), NormRange::NegOneOne)
            .and_then(|x| encode_fused(&x, params))
            .map_err(|e| e.in_record(r.id()))?;
        let name = image_file_name(r.id()).replace(".pgm", &format!(".{ext}"));
        export_fused(&img, dir.join(&name), GrayMapping::LinearGray, fmt)?;
    }
    println!("wrote {} images to {}", records.len(), dir.display());
    Ok(())
}

fn detect(input: &InputArgs, dir: &Path) -> Result<()> {
    let records = input.load()?;
    output_dir(dir)?;
    println!("record,peaks,heart_rate_bpm");
    for r in &records {
        let res = detect_qrs(r).map_err(|e| e.in_record(r.id()))?;
        let name = image_file_name(r.id()).replace(".pgm", ".peaks.csv");
        fs::write(dir.join(name), res.to_csv()).map_err(|e| Error::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
        let hr = res
            .heart_rate_bpm
            .map(|h| format!("{h:.1}"))
            .unwrap_or_default();
        println!("{},{},{hr}", r.id(), res.peaks.len());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn classify(
    config: Option<&Path>,
    input: Option<&str>,
    out: Option<&Path>,
    k: Option<usize>,
    seed: Option<u64>,
    train_fraction: Option<f64>,
    overrides: &[String],
) -> Result<()> {
    let mut cfg = match config {
        Some(p) => PipelineConfig::from_file(p).map_err(|e| match e {
            Error::Io { .. } => Error::Config(e.to_string()),
            other => other,
        })?,
        None => PipelineConfig::default(),
    };
    let mut flags: Vec<(String, String)> = Vec::new();
    if let Some(v) = input {
        flags.push(("input".into(), v.into()));
    }
    if let Some(v) = out {
        flags.push(("output_dir".into(), v.display().to_string()));
    }
    if let Some(v) = k {
        flags.push(("k".into(), v.to_string()));
    }
    if let Some(v) = seed {
        flags.push(("seed".into(), v.to_string()));
    }
    if let Some(v) = train_fraction {
        flags.push(("train_fraction".into(), v.to_string()));
    }
    for o in overrides {
        let (key, value) = o
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects key=value, got {o:?}")))?;
        flags.push((key.trim().into(), value.into()));
    }
    for (key, value) in flags {
        cfg.set(&key, &value, None)?;
    }
    let outcome = run_pipeline(&cfg)?;
    print!("{}", outcome.report.to_text());
    if let Some(b) = outcome.baseline_accuracy {
        println!("\nraw-sample k-NN baseline accuracy: {b:.4}");
    }
    println!("\nartifacts in {}", cfg.output_dir.display());
    Ok(())
}

fn report(dir: &Path) -> Result<()> {
    let read = |name: &str| {
        let p = dir.join(name);
        fs::read_to_string(&p).map_err(|e| Error::Io { path: p, source: e })
    };
    print!("{}", read("report.txt")?);
    println!();
    for (k, v) in parse_metrics(&read("metrics.txt")?)? {
        println!("{k} = {v}");
    }
    Ok(())
}

fn inspect(input: &InputArgs, record: usize, wavelet: &str, level: usize) -> Result<()> {
    let w = get_wavelet(wavelet)?;
    let records = input.load()?;
    let r = record
        .checked_sub(1)
        .and_then(|i| records.get(i))
        .ok_or_else(|| {
            Error::InvalidParameter(format!("record {record} not in 1..={}", records.len()))
        })?;
    let d = wavedec(r.samples(), &w, level).map_err(|e| e.in_record(r.id()))?;
    println!("{}", d.to_json());
    Ok(())
}

fn synthesize(kind: SynthKind, output: &Path, seed: u64, count: usize, snr_db: f64) -> Result<()> {
    let records = match kind {
        SynthKind::SineChirp => synth::sine_chirp_dataset(
            &SineChirpSpec {
                per_class: count,
                snr_db,
                ..SineChirpSpec::default()
            },
            seed,
        )?,
        SynthKind::Ecg => {
            let mut g = synth::rng(seed);
            (0..count)
                .map(|i| {
                    let bpm = 60.0 + 60.0 * i as f64 / count.max(2).saturating_sub(1) as f64;
                    let p = synth::ecg_pulse_train(bpm, 360.0, 30.0, 0.02, &mut g)?;
                    Signal::with_meta(
                        synth::add_noise(&p.samples, snr_db, &mut g),
                        360.0,
                        format!("ecg{i}"),
                        None,
                    )
                })
                .collect::<Result<_>>()?
        }
    };
    write_csv(output, &records)?;
    println!("wrote {} records to {}", records.len(), output.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Denoise {
            input,
            output,
            params,
        } => {
            let p = params.params()?;
            let records = input.load()?;
            let cleaned = records
                .iter()
                .map(|r| denoise(r, &p).map_err(|e| e.in_record(r.id())))
                .collect::<Result<Vec<_>>>()?;
            write_csv(&output, &cleaned)?;
            println!(
                "denoised {} records into {}",
                cleaned.len(),
                output.display()
            );
            Ok(())
        }
        Command::Encode {
            input,
            output_dir,
            gaf,
            rp_eps,
            mtf_bins,
            fuse_size,
            format,
        } => {
            let params = EncoderParams {
                gaf: gaf.parse::<GafKind>()?,
                rp_eps,
                mtf_bins,
                fuse_size,
            };
            encode(&input, &output_dir, &params, format)
        }
        Command::DetectQrs { input, output_dir } => detect(&input, &output_dir),
        Command::Classify {
            config,
            input,
            output_dir,
            k,
            seed,
            train_fraction,
            overrides,
        } => classify(
            config.as_deref(),
            input.as_deref(),
            output_dir.as_deref(),
            k,
            seed,
            train_fraction,
            &overrides,
        ),
        Command::Report { dir } => report(&dir),
        Command::Inspect {
            input,
            record,
            wavelet,
            level,
        } => inspect(&input, record, &wavelet, level),
        Command::Synth {
            kind,
            output,
            seed,
            count,
            snr_db,
        } => synthesize(kind, &output, seed, count, snr_db),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 2 } else { 3 })
        }
    }
}

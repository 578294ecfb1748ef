//! `foa-augment` command line.
//!
//! Exit codes: 0 success, 1 verification or processing failure, 2 usage
//! error, 3 I/O or file-format error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::augment::{run_augment, AugmentConfig, Method};
use crate::doa::{
    doa_error, estimate_doa, estimates_to_labels, frame_recall, labels_to_estimates,
    DEFAULT_ACTIVITY_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::io::{read_foa_wav, read_labels_csv, write_foa_wav, write_labels_csv, Scenario};
use crate::labels_first::{ElevationMode, ElevationRangePolicy};
use crate::patterns::PatternId;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "foa-augment", version, about = "Spatial augmentation for first-order Ambisonics datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Augment every (wav, csv) pair in a directory.
    Augment(AugmentArgs),
    /// Render a scenario file to a (wav, csv) fixture.
    GenScene(GenSceneArgs),
    /// Estimate per-frame DOA from a wav and write a label CSV.
    Estimate(EstimateArgs),
    /// Compare estimated and reference label CSVs.
    Metrics(MetricsArgs),
    /// Run the oracle-equivalence suite on random synthetic scenes.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ElevationModeArg {
    LabelRange,
    FixedRange,
}

#[derive(Debug, Args)]
struct AugmentArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, default_value_t = 0.5)]
    probability: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "label-range")]
    elevation_mode: ElevationModeArg,
    /// Degrees. Dataset lower elevation limit, or lowest β in fixed-range mode.
    #[arg(long, default_value_t = -40.0, allow_hyphen_values = true)]
    elevation_min: f64,
    /// Degrees. Dataset upper elevation limit, or highest β in fixed-range mode.
    #[arg(long, default_value_t = 40.0, allow_hyphen_values = true)]
    elevation_max: f64,
    /// Force one pattern id (e.g. s-d+90e+) for patterns16.
    #[arg(long)]
    pattern: Option<PatternId>,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenSceneArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Output prefix; writes PREFIX.wav and PREFIX.csv.
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the scenario's frame hop.
    #[arg(long)]
    frame_hop_ms: Option<f64>,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "out")]
    output: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    frame_hop_ms: f64,
    /// Activity threshold as a fraction of the loudest frame's W energy.
    #[arg(long, default_value_t = DEFAULT_ACTIVITY_THRESHOLD)]
    threshold: f64,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    #[arg(long = "est")]
    estimate: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Also print one JSON record per line.
    #[arg(long)]
    jsonl: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    scenes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_)
        | Error::BadChannelCount(_)
        | Error::UnsupportedFormat(_)
        | Error::CorruptHeader(_)
        | Error::Parse { .. }
        | Error::Range { .. } => EXIT_IO,
        Error::InvalidArgument(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Augment(a) => augment(a),
        Command::GenScene(a) => gen_scene(a),
        Command::Estimate(a) => estimate(a),
        Command::Metrics(a) => metrics(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {} ({})", e, e.kind());
            exit_code(&e)
        }
    }
}

fn augment(args: AugmentArgs) -> Result<i32> {
    let mode = match args.elevation_mode {
        ElevationModeArg::LabelRange => ElevationMode::LabelRange,
        ElevationModeArg::FixedRange => ElevationMode::FixedRange,
    };
    let policy = ElevationRangePolicy::new(
        mode,
        args.elevation_min.to_radians(),
        args.elevation_max.to_radians(),
    )?;
    let config = AugmentConfig {
        method: args.method,
        probability: args.probability,
        seed: args.seed,
        elevation_policy: policy,
        pattern: args.pattern,
        input_dir: args.input,
        output_dir: args.output,
        manifest_path: args.manifest,
    };
    let manifest = run_augment(&config)?;
    println!(
        "augmented {} of {} files with {}; manifest at {}",
        manifest.augmented_count(),
        manifest.entries.len(),
        manifest.method,
        config.manifest_path().display()
    );
    Ok(EXIT_OK)
}

fn gen_scene(args: GenSceneArgs) -> Result<i32> {
    let mut scenario = Scenario::read(&args.scenario)?;
    if let Some(ms) = args.frame_hop_ms {
        if !(ms > 0.0) {
            return Err(Error::InvalidArgument("frame hop must be positive".into()));
        }
        scenario.frame_hop = ms / 1e3;
    }
    let (sig, labels) = scenario.render(args.seed)?;
    let wav = args.output.with_extension("wav");
    let csv = args.output.with_extension("csv");
    write_foa_wav(&sig, &wav)?;
    write_labels_csv(&labels, Some(sig.sample_rate()), &csv)?;
    println!("wrote {} and {}", wav.display(), csv.display());
    Ok(EXIT_OK)
}

fn estimate(args: EstimateArgs) -> Result<i32> {
    let sig = read_foa_wav(&args.input)?;
    let hop = args.frame_hop_ms / 1e3;
    let est = estimate_doa(&sig, hop, args.threshold)?;
    let labels = estimates_to_labels(&est, hop)?;
    write_labels_csv(&labels, Some(sig.sample_rate()), &args.output)?;
    println!(
        "{} of {} frames active; wrote {}",
        labels.active_frame_count(),
        labels.len(),
        args.output.display()
    );
    Ok(EXIT_OK)
}

fn metrics(args: MetricsArgs) -> Result<i32> {
    let est = labels_to_estimates(&read_labels_csv(&args.estimate)?);
    let reference = read_labels_csv(&args.reference)?;
    let er = doa_error(&est, &reference)?;
    let fr = frame_recall(&est, &reference) * 100.0;
    println!("{:>10} {:>10}", "Er(deg)", "FR(%)");
    println!("{er:>10.4} {fr:>10.4}");
    if args.jsonl {
        println!("{}", serde_json::json!({ "er_deg": er, "fr_percent": fr }));
    }
    Ok(EXIT_OK)
}

fn verify(args: VerifyArgs) -> Result<i32> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let reports = crate::verify::run_all(&mut rng, args.scenes)?;
    for r in &reports {
        println!("{r}");
    }
    Ok(if reports.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    })
}

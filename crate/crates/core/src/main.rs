use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use handsynth::dsp::{Colormap, Spectrogram};
use handsynth::gestures::{generate, GestureKind, GestureSpec};
use handsynth::hand_model::{read_dhg_text, read_skeleton, write_skeleton, SensorOffset};
use handsynth::metrics::SsimConfig;
use handsynth::pipeline::{
    align_skeleton, evaluate_manifest, export_dataset, prepare_sequence, score_pair, split_indices,
    synthesize_sequence, synthetic_corpus, training_item, write_fixture_set, AlignmentSpec,
    CorpusSpec, DatasetManifest, ExportOptions, HiddenWeightRule, Reference, SynthesisContext,
    DHG_FRAME_RATE, PNG_SCALE,
};
use handsynth::radar_sim::RadarParams;
use handsynth::weightnet::{
    mean_ssim, train, Objective, TrainSchedule, TrainingItem, WeightNetParams, DEFAULT_HIDDEN,
};
use handsynth::{Error, Result};

/// Synthesize FMCW radar time-Doppler spectrograms from hand skeletons.
#[derive(Debug, Parser)]
#[command(name = "handsynth", version)]
struct Cli {
    /// Radar parameter file (TOML)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Seed for generated gestures, data splits and initialization
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Trained weighting-network parameters; unit weights when absent
    #[arg(long, global = true, value_name = "FILE")]
    weights: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize one spectrogram from a skeleton file or a generated gesture
    Simulate(SimulateArgs),
    /// Train the weighting network
    Train(TrainArgs),
    /// Compare spectrogram pairs, or synthesized entries against references
    Evaluate(EvaluateArgs),
    /// Convert a 22-joint DHG skeleton to the internal 20-joint layout
    Align(AlignArgs),
    /// Synthesize every entry of a manifest into a directory
    Export(ExportArgs),
    /// Render a spectrogram file as a PNG heatmap
    Plot(PlotArgs),
    /// Print radar-derived quantities and network parameter summaries
    InspectParams,
    /// Write the ten-gesture fixture set and its manifest
    Fixtures(FixturesArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Skeleton file (JSON records, or DHG text with a .txt extension)
    #[arg(long, conflicts_with = "gesture", required_unless_present = "gesture")]
    skeleton: Option<PathBuf>,
    /// Generate this gesture instead of reading a skeleton
    #[arg(long)]
    gesture: Option<GestureKind>,
    /// Gesture azimuth in degrees (generated gestures)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    angle: f64,
    /// Gesture length in seconds (generated gestures)
    #[arg(long, default_value_t = 1.6)]
    duration: f64,
    /// Skeleton sensor position relative to the radar, meters
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sensor_dx: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sensor_dy: f64,
    #[arg(long)]
    out: PathBuf,
    /// Also write a PNG heatmap
    #[arg(long)]
    png: Option<PathBuf>,
    /// Also write CSV
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Manifest whose entries carry reference spectrograms
    #[arg(
        long,
        conflicts_with = "synthetic",
        required_unless_present = "synthetic"
    )]
    manifest: Option<PathBuf>,
    /// Train on this many generated gestures with hidden-weight references
    #[arg(long)]
    synthetic: Option<usize>,
    /// Training schedule (JSON); the two-stage default otherwise
    #[arg(long)]
    schedule: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_HIDDEN)]
    hidden: usize,
    #[arg(long, default_value_t = 0.1)]
    val_fraction: f64,
    #[arg(long, default_value_t = 0.2)]
    test_fraction: f64,
    /// Where to write the trained parameters
    #[arg(long)]
    out: PathBuf,
    /// Line-delimited JSON training log
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Spectrogram files, compared pairwise: a b [c d ...]
    #[arg(conflicts_with = "manifest")]
    files: Vec<PathBuf>,
    /// Synthesize each manifest entry and compare it to its reference
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlignArgs {
    /// DHG text skeleton (22 joints per row)
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DHG_FRAME_RATE)]
    frame_rate: f64,
    /// Alignment spec (JSON); palm centered 0.25 m above the radar otherwise
    #[arg(long)]
    alignment: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write PNG heatmaps
    #[arg(long)]
    png: bool,
    #[arg(long, default_value = "jet")]
    colormap: Colormap,
    /// Also write CSV files
    #[arg(long)]
    csv: bool,
}

#[derive(Debug, Args)]
struct PlotArgs {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "jet")]
    colormap: Colormap,
    #[arg(long, default_value_t = PNG_SCALE)]
    scale: u32,
}

#[derive(Debug, Args)]
struct FixturesArgs {
    #[arg(long)]
    out: PathBuf,
    /// Also synthesize hidden-weight reference spectrograms
    #[arg(long)]
    references: bool,
}

fn context(cli: &Cli) -> Result<SynthesisContext> {
    let radar = match &cli.config {
        Some(path) => RadarParams::load(path)?,
        None => RadarParams::default(),
    };
    Ok(SynthesisContext::new(radar))
}

fn load_weights(cli: &Cli) -> Result<Option<WeightNetParams>> {
    cli.weights.as_ref().map(WeightNetParams::load).transpose()
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Io {
        path: path.into(),
        source: e,
    })
}

/// Prints to stdout, ignoring a closed pipe (`handsynth ... | head`).
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json(value: &serde_json::Value) {
    emit(&serde_json::to_string_pretty(value).expect("json value serializes"));
}

fn simulate(cli: &Cli, args: &SimulateArgs) -> Result<()> {
    let ctx = context(cli)?;
    let params = load_weights(cli)?;
    let (id, seq) = match (&args.skeleton, args.gesture) {
        (Some(path), _) => {
            let raw = if path.extension().is_some_and(|e| e == "txt") {
                read_dhg_text(path, DHG_FRAME_RATE)?
            } else {
                read_skeleton(path)?
            };
            let offset = SensorOffset::new(args.sensor_dx, args.sensor_dy)?;
            let seq = prepare_sequence(&raw, offset, &AlignmentSpec::default())?;
            (path.display().to_string(), seq)
        }
        (None, Some(kind)) => {
            let spec = GestureSpec {
                angle_deg: args.angle,
                duration: args.duration,
                seed: cli.seed,
                ..GestureSpec::new(kind)
            };
            (kind.name().to_string(), generate(&spec)?)
        }
        (None, None) => unreachable!("clap requires a skeleton or a gesture"),
    };
    let out = synthesize_sequence(&id, &seq, &ctx, params.as_ref())?;
    out.spectrogram.save(&args.out)?;
    if let Some(png) = &args.png {
        out.spectrogram.save_png(png, Colormap::Jet, PNG_SCALE)?;
    }
    if let Some(csv) = &args.csv {
        out.spectrogram.save_csv(csv)?;
    }
    log::info!("{id}: range bin {}, wrote {}", out.bin, args.out.display());
    Ok(())
}

fn manifest_items(manifest: &DatasetManifest, ctx: &SynthesisContext) -> Result<Vec<TrainingItem>> {
    manifest
        .entries
        .iter()
        .map(|e| {
            let path = e.reference.as_ref().ok_or_else(|| {
                Error::InvalidArgument(format!("entry `{}` has no reference spectrogram", e.id))
            })?;
            let reference = Spectrogram::load(path)?;
            let seq = handsynth::pipeline::load_entry_sequence(e, manifest)?;
            training_item(&e.id, &seq, ctx, Reference::Spectrogram(&reference))
        })
        .collect()
}

fn train_cmd(cli: &Cli, args: &TrainArgs) -> Result<()> {
    let ctx = context(cli)?;
    let items = match (&args.manifest, args.synthetic) {
        (Some(path), _) => manifest_items(&DatasetManifest::load(path)?, &ctx)?,
        (None, Some(count)) => {
            let spec = CorpusSpec {
                count,
                seed: cli.seed,
                rule: HiddenWeightRule::default(),
                ..CorpusSpec::default()
            };
            synthetic_corpus(&spec, &ctx)?
                .into_iter()
                .map(|(_, item)| item)
                .collect()
        }
        (None, None) => unreachable!("clap requires a manifest or a synthetic count"),
    };
    let mut schedule = match &args.schedule {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str(&text).map_err(|e| Error::Format {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => TrainSchedule::default(),
    };
    schedule.seed = cli.seed;

    let (tr, va, te) = split_indices(items.len(), args.val_fraction, args.test_fraction, cli.seed);
    if tr.is_empty() {
        return Err(Error::Empty("training split"));
    }
    let pick = |ix: &[usize]| ix.iter().map(|&i| items[i].clone()).collect::<Vec<_>>();
    let (train_items, val_items, test_items) = (pick(&tr), pick(&va), pick(&te));
    let objective = Objective {
        stft: ctx.stft,
        ..Objective::default()
    };
    let initial = match load_weights(cli)? {
        Some(p) => p,
        None => WeightNetParams::init(args.hidden, cli.seed)?,
    };

    let mut log_file = match &args.log {
        Some(path) => Some(BufWriter::new(File::create(path).map_err(|e| {
            Error::Io {
                path: path.clone(),
                source: e,
            }
        })?)),
        None => None,
    };
    let report = train(
        initial,
        &train_items,
        &val_items,
        &schedule,
        &objective,
        |rec| {
            log::info!(
                "stage {} epoch {:>2}: train {:.5} val {:.5} ssim {:.2}",
                rec.stage,
                rec.epoch,
                rec.train_loss,
                rec.val_loss,
                rec.val_ssim_x100
            );
            if let Some(f) = log_file.as_mut() {
                let _ = writeln!(
                    f,
                    "{}",
                    serde_json::to_string(rec).expect("record serializes")
                );
            }
        },
    );
    if let Some(mut f) = log_file {
        let _ = f.flush();
    }
    let report = match report {
        Ok(r) => r,
        Err(Error::Diverged {
            stage,
            epoch,
            last_good,
        }) => {
            last_good.save(&args.out)?;
            return Err(Error::InvalidArgument(format!(
                "training diverged at stage {stage}, epoch {epoch}; last good parameters saved to {}",
                args.out.display()
            )));
        }
        Err(e) => return Err(e),
    };
    report.params.save(&args.out)?;

    let mut summary = json!({
        "train": train_items.len(),
        "val": val_items.len(),
        "test": test_items.len(),
        "best_val_loss": report.best_val_loss,
        "best_at": report.best_at,
        "weights": args.out,
    });
    if !test_items.is_empty() {
        summary["test_ssim_x100_unit"] = json!(100.0 * mean_ssim(None, &test_items, &objective)?);
        summary["test_ssim_x100_trained"] =
            json!(100.0 * mean_ssim(Some(&report.params), &test_items, &objective)?);
    }
    print_json(&summary);
    Ok(())
}

fn evaluate_cmd(cli: &Cli, args: &EvaluateArgs) -> Result<()> {
    let cfg = SsimConfig::default();
    if let Some(path) = &args.manifest {
        let ctx = context(cli)?;
        let params = load_weights(cli)?;
        let report = evaluate_manifest(&DatasetManifest::load(path)?, &ctx, params.as_ref(), &cfg)?;
        emit(&report.to_json());
        return Ok(());
    }
    if args.files.is_empty() || args.files.len() % 2 != 0 {
        return Err(Error::InvalidArgument(
            "evaluate needs spectrogram files in pairs (a b [c d ...]) or --manifest".into(),
        ));
    }
    let mut pairs = Vec::new();
    let (mut s, mut m) = (0.0, 0.0);
    for pair in args.files.chunks(2) {
        let score = score_pair(
            &Spectrogram::load(&pair[0])?,
            &Spectrogram::load(&pair[1])?,
            &cfg,
        )?;
        s += score.ssim_x100;
        m += score.mse;
        pairs.push(
            json!({"a": pair[0], "b": pair[1], "ssim_x100": score.ssim_x100, "mse": score.mse}),
        );
    }
    let n = pairs.len() as f64;
    print_json(&json!({"pairs": pairs, "mean_ssim_x100": s / n, "mean_mse": m / n}));
    Ok(())
}

fn align_cmd(args: &AlignArgs) -> Result<()> {
    let spec = match &args.alignment {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str(&text).map_err(|e| Error::Format {
                path: path.clone(),
                message: e.to_string(),
            })?
        }
        None => AlignmentSpec::default(),
    };
    let seq = align_skeleton(&read_dhg_text(&args.input, args.frame_rate)?, &spec)?;
    write_skeleton(&seq, &args.out)?;
    log::info!("aligned {} frames into {}", seq.len(), args.out.display());
    Ok(())
}

fn export_cmd(cli: &Cli, args: &ExportArgs) -> Result<()> {
    let ctx = context(cli)?;
    let params = load_weights(cli)?;
    let opts = ExportOptions {
        png: args.png.then_some(args.colormap),
        csv: args.csv,
        ..ExportOptions::default()
    };
    let index = export_dataset(
        &DatasetManifest::load(&args.manifest)?,
        &ctx,
        params.as_ref(),
        &args.out,
        &opts,
    )?;
    print_json(
        &json!({"written": index.entries.len(), "failed": index.failures.len(), "out": args.out}),
    );
    if index.failures.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{} entr{} failed, see index.json",
            index.failures.len(),
            if index.failures.len() == 1 {
                "y"
            } else {
                "ies"
            }
        )))
    }
}

fn inspect(cli: &Cli) -> Result<()> {
    let ctx = context(cli)?;
    let r = &ctx.radar;
    let mut out = json!({
        "radar": {
            "wavelength_m": r.wavelength(),
            "chirp_duration_s": r.chirp_duration,
            "chirp_interval_s": r.chirp_interval,
            "range_resolution_m": r.range_resolution(),
            "range_bin_spacing_m": r.range_bin_spacing(),
            "max_range_m": r.max_range(),
            "max_velocity_mps": r.max_velocity(),
            "frame_velocity_resolution_mps": r.frame_velocity_resolution(),
            "stft_velocity_resolution_mps": r.stft_velocity_resolution(ctx.stft.window_len),
        }
    });
    if let Some(p) = load_weights(cli)? {
        let tensors: Vec<_> = p
            .tensor_names()
            .into_iter()
            .map(|name| {
                let v = p.tensor(name).expect("listed tensor exists");
                let mean = v.iter().sum::<f64>() / v.len() as f64;
                let max_abs = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
                json!({"name": name, "len": v.len(), "mean": mean, "max_abs": max_abs})
            })
            .collect();
        out["network"] = json!({
            "hidden": p.hidden(),
            "parameters": p.len(),
            "tensors": tensors,
            "feature_mean": p.stats.mean,
            "feature_std": p.stats.std,
            "feature_mask": p.mask.0,
        });
    }
    print_json(&out);
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Simulate(a) => simulate(cli, a),
        Command::Train(a) => train_cmd(cli, a),
        Command::Evaluate(a) => evaluate_cmd(cli, a),
        Command::Align(a) => align_cmd(a),
        Command::Export(a) => export_cmd(cli, a),
        Command::Plot(a) => Spectrogram::load(&a.input)?.save_png(&a.out, a.colormap, a.scale),
        Command::InspectParams => inspect(cli),
        Command::Fixtures(a) => {
            let ctx = context(cli)?;
            let rule = HiddenWeightRule::default();
            let m = write_fixture_set(&a.out, cli.seed, &ctx, a.references.then_some(&rule))?;
            log::info!("wrote {} fixtures to {}", m.entries.len(), a.out.display());
            write_text(
                &a.out.join("rule.json"),
                &serde_json::to_string_pretty(&rule).expect("rule serializes"),
            )
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

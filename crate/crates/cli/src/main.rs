//! `synthvid`: every pipeline stage as a subcommand, plus an end-to-end demo.

mod demo;
mod io;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use synthvid_core::camera::generate_trajectory;
use synthvid_core::caption::{caption_for_config, CaptionRegistry, Granularity, TagMode};
use synthvid_core::flow::{
    mixed_dataset, real_dataset, synthetic_dataset, train, LrSchedule, ToyDataset, TrainConfig, VelocityModel,
    DEFAULT_HIDDEN, REFERENCE_LABEL, TOY_COND_DIM, TOY_DATA_DIM,
};
use synthvid_core::guidance::{alpha_sweep, train_reference, GuidanceParams, ALPHA_GRID, DEFAULT_BETA, DEFAULT_SAMPLER_STEPS};
use synthvid_core::metrics::{generate_tracks, pose_report, recon_metrics, FeatureTrackSet, PoseConfidenceGrid};
use synthvid_core::mixer::{build_manifest, synthetic_share, MixMode, MixSchedule};
use synthvid_core::render::ppm::write_frames;
use synthvid_core::render::{emit_engine_script, render_video};
use synthvid_core::sampler::{sample_batch, DistributionPreset, PresetLibrary};
use synthvid_core::scene_config::{EngineTarget, SceneConfig};
use synthvid_core::seed::stream;

#[derive(Parser)]
#[command(name = "synthvid", version, about = "Synthetic video data, toy SimDrop guidance, and fidelity metrics")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw scene configs from a distribution preset.
    SampleConfigs(SampleConfigsArgs),
    /// Write the camera trajectory of a config as JSON pose records.
    Trajectory(TrajectoryArgs),
    /// Render a config to PPM frames (and optionally the engine script).
    Render(RenderArgs),
    /// Compose captions for configs from the element registry.
    Caption(CaptionArgs),
    /// Mix synthetic and real pools into a per-step training manifest.
    BuildManifest(ManifestArgs),
    /// Train a toy flow-matching model and write a checkpoint.
    TrainToy(TrainToyArgs),
    /// Run guided sampling with SimDrop and write the coverage / artifact report.
    SampleSimdrop(SimdropArgs),
    /// Reconstruction metrics from tracks or from a config rendered with oracle tracks.
    Evaluate(EvaluateArgs),
    /// Run every stage end to end under one seed.
    Demo(DemoArgs),
}

#[derive(Args)]
struct SampleConfigsArgs {
    /// Builtin preset name (random, forward_only, forward_following).
    #[arg(long, default_value = "random")]
    preset: String,
    /// Preset JSON file; overrides --preset.
    #[arg(long)]
    preset_file: Option<PathBuf>,
    #[arg(long, default_value_t = 8)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrajectoryArgs {
    #[arg(long)]
    config: PathBuf,
    /// OBJ mesh overriding the config's object reference.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the Blender script, whatever the config's engine target.
    #[arg(long)]
    script: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GranularityArg {
    Generic,
    Fine,
}

impl From<GranularityArg> for Granularity {
    fn from(g: GranularityArg) -> Self {
        match g {
            GranularityArg::Generic => Granularity::Generic,
            GranularityArg::Fine => Granularity::FineGrained,
        }
    }
}

#[derive(Args)]
struct CaptionArgs {
    /// One or more config files.
    #[arg(long = "config", required = true, num_args = 1..)]
    configs: Vec<PathBuf>,
    /// Registry JSON; the builtin registry when absent.
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "generic")]
    granularity: GranularityArg,
    /// none | tags | tags+np
    #[arg(long, default_value = "tags")]
    tags: TagMode,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ManifestArgs {
    /// JSON array of synthetic manifest entries (as written by `caption`).
    #[arg(long)]
    synthetic: PathBuf,
    /// JSON array of real manifest entries.
    #[arg(long)]
    real: PathBuf,
    #[arg(long)]
    ratio: f64,
    #[arg(long)]
    steps: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Place exactly round(ratio * steps) synthetic steps instead of per-step draws.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DatasetArg {
    Real,
    Synthetic,
    Mixed,
}

#[derive(Args)]
struct TrainToyArgs {
    #[arg(long, value_enum)]
    dataset: DatasetArg,
    /// Synthetic share for the mixed dataset.
    #[arg(long, default_value_t = 0.5)]
    ratio: f64,
    #[arg(long, default_value_t = 4000)]
    steps: usize,
    #[arg(long, default_value_t = 20_000)]
    points: usize,
    #[arg(long, default_value_t = 0.02)]
    lr: f64,
    #[arg(long, default_value_t = 128)]
    batch: usize,
    #[arg(long, default_value_t = 0.2)]
    dropout: f64,
    #[arg(long, default_value_t = DEFAULT_HIDDEN)]
    hidden: usize,
    /// Caption label for the synthetic dataset.
    #[arg(long, default_value_t = REFERENCE_LABEL)]
    label: usize,
    /// Fine-tune from this checkpoint instead of a fresh model.
    #[arg(long)]
    init: Option<PathBuf>,
    /// Prior-preservation samples drawn from --init under the null condition.
    #[arg(long, default_value_t = 0, requires = "init")]
    prior: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimdropArgs {
    #[arg(long)]
    gen: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Reference weights to sweep; a CFG-only run (alpha 0) is always included.
    #[arg(long, num_args = 1.., default_values_t = ALPHA_GRID)]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_BETA)]
    beta: f64,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLER_STEPS)]
    steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, conflicts_with_all = ["config", "mesh"])]
    tracks: Option<PathBuf>,
    #[arg(long, required_unless_present_any = ["tracks", "pose"])]
    config: Option<PathBuf>,
    #[arg(long)]
    mesh: Option<PathBuf>,
    /// Pixel noise sigma for oracle tracks.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pose-confidence grid (JSON array of 17-value rows).
    #[arg(long)]
    pose: Option<PathBuf>,
    /// Where to write the generated tracks (config mode).
    #[arg(long)]
    tracks_out: Option<PathBuf>,
    #[arg(long)]
    report: PathBuf,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value = "demo_out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::SampleConfigs(a) => sample_configs(a),
        Command::Trajectory(a) => trajectory(a),
        Command::Render(a) => render(a),
        Command::Caption(a) => caption(a),
        Command::BuildManifest(a) => manifest(a),
        Command::TrainToy(a) => train_toy(a),
        Command::SampleSimdrop(a) => sample_simdrop(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Demo(a) => demo::run(a.seed, &a.out),
    }
}

fn sample_configs(a: SampleConfigsArgs) -> Result<()> {
    let preset = match &a.preset_file {
        Some(path) => DistributionPreset::from_json(&io::read_text(path)?)?,
        None => PresetLibrary::builtin().get(&a.preset)?.clone(),
    };
    let configs = sample_batch(&preset, a.seed, a.count)?;
    let paths = io::write_configs(&a.out, &configs)?;
    println!("wrote {} configs from preset `{}` to {}", paths.len(), preset.name, a.out.display());
    Ok(())
}

fn trajectory(a: TrajectoryArgs) -> Result<()> {
    let cfg = io::read_config(&a.config)?;
    let mesh = io::load_mesh(&cfg, a.mesh.as_deref())?;
    let (center, radius) = mesh.bounding_sphere();
    let traj = generate_trajectory(&cfg, &center, radius)?;
    io::write_json(&a.out, &traj.to_records())?;
    println!("wrote {} poses to {}", traj.len(), a.out.display());
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let cfg = io::read_config(&a.config)?;
    let mesh = io::load_mesh(&cfg, a.mesh.as_deref())?;
    let frames = render_video(&cfg, &mesh)?;
    write_frames(&a.out, &frames).with_context(|| format!("writing frames to {}", a.out.display()))?;
    if a.script || cfg.render.engine_target == EngineTarget::BlenderScript {
        io::write_text(&a.out.join("scene.py"), &emit_engine_script(&cfg))?;
    }
    let last = frames.last().map(|f| f.hash()).unwrap_or_default();
    println!("rendered {} frames to {} (last frame sha256 {last})", frames.len(), a.out.display());
    Ok(())
}

fn caption(a: CaptionArgs) -> Result<()> {
    let registry = match &a.registry {
        Some(path) => CaptionRegistry::from_json(&io::read_text(path)?)?,
        None => CaptionRegistry::builtin(),
    };
    let mut entries = Vec::with_capacity(a.configs.len());
    for path in &a.configs {
        let cfg = io::read_config(path)?;
        let caption = caption_for_config(&cfg, &registry, a.granularity.into(), a.tags)
            .with_context(|| format!("captioning {}", path.display()))?;
        entries.push(io::synthetic_entry(path, caption)?);
    }
    io::write_json(&a.out, &entries)?;
    println!("wrote {} captions to {}", entries.len(), a.out.display());
    Ok(())
}

fn manifest(a: ManifestArgs) -> Result<()> {
    let synthetic = io::read_entries(&a.synthetic)?;
    let real = io::read_entries(&a.real)?;
    let schedule = MixSchedule { ratio: a.ratio, total_steps: a.steps, seed: a.seed };
    let mode = if a.exact { MixMode::ExactCount } else { MixMode::Bernoulli };
    let manifest = build_manifest(&synthetic, &real, &schedule, mode)?;
    io::write_manifest_file(&a.out, &manifest)?;
    println!("wrote {} steps to {} (synthetic share {:.4})", manifest.len(), a.out.display(), synthetic_share(&manifest));
    Ok(())
}

fn train_toy(a: TrainToyArgs) -> Result<()> {
    let mut rng = stream(a.seed, 0);
    let data: ToyDataset = match a.dataset {
        DatasetArg::Real => real_dataset(a.points, &mut rng),
        DatasetArg::Synthetic => {
            if a.label >= TOY_COND_DIM {
                bail!("--label must be below {TOY_COND_DIM}");
            }
            synthetic_dataset(a.points, a.label, &mut rng)
        }
        DatasetArg::Mixed => {
            if !(0.0..=1.0).contains(&a.ratio) {
                bail!("--ratio must lie in [0, 1], got {}", a.ratio);
            }
            mixed_dataset(a.points, a.ratio, &mut rng)
        }
    };
    let cfg = TrainConfig {
        learning_rate: a.lr,
        steps: a.steps,
        batch_size: a.batch,
        cond_dropout: a.dropout,
        momentum: 0.9,
        schedule: LrSchedule::Cosine,
        seed: a.seed,
    };
    let (model, final_loss) = match &a.init {
        Some(path) => {
            let (init, _) = io::read_model(path)?;
            let model = train_reference(&init, &data, a.prior, DEFAULT_SAMPLER_STEPS, &cfg)?;
            (model, None)
        }
        None => {
            let init = VelocityModel::new(TOY_DATA_DIM, TOY_COND_DIM, a.hidden, &mut stream(a.seed, 1));
            let (model, trace) = train(&init, &data, &cfg)?;
            let tail = trace.len().min(100);
            let loss = (tail > 0).then(|| trace[trace.len() - tail..].iter().sum::<f64>() / tail as f64);
            (model, loss)
        }
    };
    io::write_model(&a.out, &model, a.seed, a.steps)?;
    match final_loss {
        Some(l) => println!("trained {} steps, final loss {l:.4}; checkpoint {}", a.steps, a.out.display()),
        None => println!("fine-tuned {} steps; checkpoint {}", a.steps, a.out.display()),
    }
    Ok(())
}

fn sample_simdrop(a: SimdropArgs) -> Result<()> {
    let (gen, _) = io::read_model(&a.gen)?;
    let (reference, _) = io::read_model(&a.reference)?;
    let base = GuidanceParams { beta: a.beta, ..GuidanceParams::default() };
    let report = alpha_sweep(&gen, &reference, &base, &a.alpha, a.n, a.steps, a.seed)?;
    io::write_json(&a.report, &report)?;
    for r in &report.runs {
        println!(
            "alpha {:.2} beta {:.2}: coverage {}/36, artifact mean {}",
            r.alpha,
            r.beta,
            r.covered_bins,
            r.artifact_mean.map_or("undefined".to_string(), |m| format!("{m:.4}"))
        );
    }
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let mut report = serde_json::Map::new();
    let tracks: Option<FeatureTrackSet> = match (&a.tracks, &a.config) {
        (Some(path), _) => Some(io::read_json(path)?),
        (None, Some(config)) => {
            if !(a.noise >= 0.0 && a.noise.is_finite()) {
                bail!("--noise must be finite and >= 0");
            }
            let cfg: SceneConfig = io::read_config(config)?;
            let mesh = io::load_mesh(&cfg, a.mesh.as_deref())?;
            let (center, radius) = mesh.bounding_sphere();
            let traj = generate_trajectory(&cfg, &center, radius)?;
            let set = generate_tracks(&mesh, &traj, cfg.render.width, cfg.render.height, a.noise, a.seed);
            if let Some(out) = &a.tracks_out {
                io::write_json(out, &set)?;
            }
            Some(set)
        }
        (None, None) => None,
    };
    if let Some(set) = tracks {
        let metrics = recon_metrics(&set)?;
        println!("{metrics}");
        report.insert("reconstruction".into(), serde_json::to_value(&metrics)?);
    }
    if let Some(path) = &a.pose {
        let grid: PoseConfidenceGrid = io::read_json(path)?;
        let pose = pose_report(&grid)?;
        let refs: Vec<String> = pose.reference.iter().map(|(k, v)| format!("{k} {v:.3}")).collect();
        println!("eps_conf {:.3} (reference: {})", pose.eps_conf, refs.join(", "));
        report.insert("pose".into(), serde_json::to_value(&pose)?);
    }
    io::write_json(&a.report, &report)?;
    Ok(())
}

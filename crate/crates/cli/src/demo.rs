//! End-to-end run: configs → frames → captions → manifest → toy SimDrop → metrics.
//!
//! Every artifact is a pure function of the seed, and all paths written into
//! artifacts are relative to the output directory, so two runs produce
//! byte-identical trees.

use crate::io;
use anyhow::{Context, Result};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use synthvid_core::camera::generate_trajectory;
use synthvid_core::caption::{caption_for_config, CaptionRegistry, ComposedCaption, Granularity, TagMode};
use synthvid_core::guidance::{
    alpha_sweep, train_transfer_models, GuidanceParams, TransferSetup, ALPHA_GRID, DEFAULT_SAMPLER_STEPS,
};
use synthvid_core::metrics::{generate_tracks, recon_metrics, MetricsError};
use synthvid_core::mixer::{build_manifest, synthetic_share, ManifestEntry, MixMode, MixSchedule, Source};
use synthvid_core::render::ppm::write_frames;
use synthvid_core::render::render_video;
use synthvid_core::sampler::{sample_batch, PresetLibrary};
use synthvid_core::seed::derive_seed;

const N_CONFIGS: usize = 8;
const MIX_RATIO: f64 = 0.5;
const MIX_STEPS: u64 = 1000;
const SIMDROP_SAMPLES: usize = 500;

/// Stand-in captions for the real pool; real clips are never tagged.
const REAL_CAPTIONS: [&str; 6] = [
    "a person walks along a crowded street",
    "a dog runs across a grassy park",
    "waves roll onto a sandy beach at sunset",
    "a cyclist rides down a mountain trail",
    "two people talk at a kitchen table",
    "a car drives through a rainy city at night",
];

fn rel(path: &Path, root: &Path) -> String {
    path.strip_prefix(root).unwrap_or(path).to_string_lossy().into_owned()
}

pub fn run(seed: u64, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    // 1. Scene configs.
    let preset = PresetLibrary::builtin().get("random")?.clone();
    let configs = sample_batch(&preset, derive_seed(seed, 0), N_CONFIGS)?;
    let config_paths = io::write_configs(&out.join("configs"), &configs)?;
    println!("[1/6] sampled {} configs", configs.len());

    // 2. Frames.
    let mut meshes = Vec::with_capacity(configs.len());
    let mut render_dirs: Vec<PathBuf> = Vec::with_capacity(configs.len());
    for (i, cfg) in configs.iter().enumerate() {
        let mesh = io::load_mesh(cfg, None)?;
        let frames = render_video(cfg, &mesh).with_context(|| format!("rendering config {i}"))?;
        let dir = out.join("renders").join(format!("config_{i:05}"));
        write_frames(&dir, &frames)?;
        meshes.push(mesh);
        render_dirs.push(dir);
    }
    println!("[2/6] rendered {} clips", render_dirs.len());

    // 3. Captions.
    let registry = CaptionRegistry::builtin();
    let synthetic = configs
        .iter()
        .zip(&render_dirs)
        .map(|(cfg, dir)| {
            let caption = caption_for_config(cfg, &registry, Granularity::Generic, TagMode::Tags)?;
            Ok(ManifestEntry::new(rel(dir, out), caption, Source::Synthetic)?)
        })
        .collect::<Result<Vec<_>>>()?;
    io::write_json(&out.join("captions.json"), &synthetic)?;
    let real = REAL_CAPTIONS
        .iter()
        .enumerate()
        .map(|(i, text)| ManifestEntry::new(format!("real/clip_{i:03}"), ComposedCaption::real(*text), Source::Real))
        .collect::<Result<Vec<_>, _>>()?;
    println!("[3/6] captioned {} synthetic clips", synthetic.len());

    // 4. Training manifest.
    let schedule = MixSchedule { ratio: MIX_RATIO, total_steps: MIX_STEPS, seed: derive_seed(seed, 1) };
    let manifest = build_manifest(&synthetic, &real, &schedule, MixMode::Bernoulli)?;
    io::write_manifest_file(&out.join("manifest.ndjson"), &manifest)?;
    let share = synthetic_share(&manifest);
    println!("[4/6] manifest of {} steps, synthetic share {share:.3}", manifest.len());

    // 5. Toy transfer models and SimDrop sweep.
    let setup = TransferSetup::default();
    let (gen, reference) = train_transfer_models(&setup, derive_seed(seed, 2))?;
    io::write_model(&out.join("models/gen.ckpt"), &gen, derive_seed(seed, 2), setup.gen.steps)?;
    io::write_model(&out.join("models/ref.ckpt"), &reference, derive_seed(seed, 2), setup.reference.steps)?;
    let sweep = alpha_sweep(
        &gen,
        &reference,
        &GuidanceParams::default(),
        &ALPHA_GRID,
        SIMDROP_SAMPLES,
        DEFAULT_SAMPLER_STEPS,
        derive_seed(seed, 3),
    )?;
    io::write_json(&out.join("simdrop.json"), &sweep)?;
    for r in &sweep.runs {
        println!(
            "[5/6] alpha {:.2}: coverage {}/36, artifact mean {}",
            r.alpha,
            r.covered_bins,
            r.artifact_mean.map_or("undefined".to_string(), |m| format!("{m:.3}"))
        );
    }

    // 6. Oracle-track reconstruction metrics (noise-free).
    let mut per_config = Vec::with_capacity(configs.len());
    for (i, (cfg, mesh)) in configs.iter().zip(&meshes).enumerate() {
        let (center, radius) = mesh.bounding_sphere();
        let traj = generate_trajectory(cfg, &center, radius)?;
        let set = generate_tracks(mesh, &traj, cfg.render.width, cfg.render.height, 0.0, derive_seed(seed, 4));
        let config = rel(&config_paths[i], out);
        let record = match recon_metrics(&set) {
            Ok(m) => json!({ "config": config, "status": "ok", "metrics": m }),
            Err(e @ (MetricsError::NoReconstruction(_) | MetricsError::Empty)) => {
                json!({ "config": config, "status": "no_reconstruction", "reason": e.to_string() })
            }
            Err(e) => return Err(e).with_context(|| format!("metrics for {config}")),
        };
        per_config.push(record);
    }
    let reconstructed = per_config.iter().filter(|r| r["status"] == "ok").count();
    io::write_json(&out.join("metrics.json"), &per_config)?;
    println!("[6/6] reconstructed {reconstructed}/{} configs", per_config.len());

    let summary: Value = json!({
        "seed": seed,
        "configs": configs.len(),
        "frames_per_clip": configs.iter().map(|c| c.n_frames).collect::<Vec<_>>(),
        "manifest": { "steps": manifest.len(), "ratio": MIX_RATIO, "synthetic_share": share },
        "simdrop": sweep.runs.iter().map(|r| json!({
            "alpha": r.alpha,
            "beta": r.beta,
            "covered_bins": r.covered_bins,
            "artifact_mean": r.artifact_mean,
        })).collect::<Vec<_>>(),
        "reconstructed_configs": reconstructed,
    });
    io::write_json(&out.join("summary.json"), &summary)?;
    println!("summary written to {}", out.join("summary.json").display());
    Ok(())
}

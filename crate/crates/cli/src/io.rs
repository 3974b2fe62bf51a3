//! File helpers shared by the subcommands.

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use synthvid_core::caption::ComposedCaption;
use synthvid_core::flow::{read_checkpoint, write_checkpoint, CheckpointHeader, VelocityModel};
use synthvid_core::mixer::{write_manifest, ManifestEntry, Source};
use synthvid_core::render::Mesh;
use synthvid_core::scene_config::{decode_config, encode_config, SceneConfig};

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_config(path: &Path) -> Result<SceneConfig> {
    decode_config(&read_text(path)?).with_context(|| format!("invalid config {}", path.display()))
}

pub fn config_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("config_{index:05}.json"))
}

pub fn write_configs(dir: &Path, configs: &[SceneConfig]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    configs
        .iter()
        .enumerate()
        .map(|(i, cfg)| {
            let path = config_path(dir, i);
            write_text(&path, &encode_config(cfg))?;
            Ok(path)
        })
        .collect()
}

/// `--mesh` wins; otherwise the config's object reference names a builtin
/// mesh or an OBJ file.
pub fn load_mesh(cfg: &SceneConfig, mesh: Option<&Path>) -> Result<Mesh> {
    if let Some(path) = mesh {
        return Mesh::load_obj(path).with_context(|| format!("loading mesh {}", path.display()));
    }
    match Mesh::builtin(&cfg.object_ref) {
        Ok(m) => Ok(m),
        Err(e) => {
            let path = Path::new(&cfg.object_ref);
            if path.extension().is_some_and(|ext| ext.eq_ignore_ascii_case("obj")) {
                Mesh::load_obj(path).with_context(|| format!("loading mesh {}", path.display()))
            } else {
                Err(e).context("object_ref is neither a builtin mesh nor an .obj path")
            }
        }
    }
}

pub fn synthetic_entry(uri: &Path, caption: ComposedCaption) -> Result<ManifestEntry> {
    Ok(ManifestEntry::new(uri.to_string_lossy(), caption, Source::Synthetic)?)
}

pub fn read_entries(path: &Path) -> Result<Vec<ManifestEntry>> {
    read_json(path)
}

pub fn write_manifest_file(path: &Path, manifest: &[ManifestEntry]) -> Result<()> {
    ensure_parent(path)?;
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_manifest(&mut w, manifest)?;
    w.flush()?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<(VelocityModel, CheckpointHeader)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_checkpoint(BufReader::new(file)).with_context(|| format!("reading checkpoint {}", path.display()))
}

pub fn write_model(path: &Path, model: &VelocityModel, seed: u64, steps: usize) -> Result<()> {
    ensure_parent(path)?;
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_checkpoint(&mut w, model, seed, steps)?;
    w.flush()?;
    Ok(())
}

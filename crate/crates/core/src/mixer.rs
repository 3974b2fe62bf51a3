//! Training manifests that mix synthetic and real clips at a target ratio.

use crate::caption::{ComposedCaption, Domain};
use crate::seed::stream;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::io::{self, BufRead, Write};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    Synthetic,
    Real,
}

impl Source {
    fn domain(self) -> Domain {
        match self {
            Source::Synthetic => Domain::Synthetic,
            Source::Real => Domain::Real,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MixError {
    #[error("ratio {0} requires a nonempty {1:?} pool")]
    EmptyPool(f64, Source),
    #[error("ratio must lie in [0, 1], got {0}")]
    BadRatio(f64),
    #[error("total_steps must be >= 1")]
    ZeroSteps,
    #[error("entry `{uri}` has source {origin:?} but a {domain:?} caption")]
    DomainMismatch { uri: String, origin: Source, domain: Domain },
    #[error("entry `{uri}` sits in the {pool:?} pool but is marked {origin:?}")]
    WrongPool { uri: String, pool: Source, origin: Source },
    #[error("schedule grid needs at least one ratio and one step count")]
    EmptyGrid,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub uri: String,
    pub caption: ComposedCaption,
    pub source: Source,
}

impl ManifestEntry {
    pub fn new(uri: impl Into<String>, caption: ComposedCaption, source: Source) -> Result<Self, MixError> {
        let entry = ManifestEntry { uri: uri.into(), caption, source };
        entry.check()?;
        Ok(entry)
    }

    fn check(&self) -> Result<(), MixError> {
        if self.caption.domain != self.source.domain() {
            return Err(MixError::DomainMismatch {
                uri: self.uri.clone(),
                origin: self.source,
                domain: self.caption.domain,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixSchedule {
    /// Synthetic share in `[0, 1]`.
    pub ratio: f64,
    pub total_steps: u64,
    pub seed: u64,
}

impl MixSchedule {
    pub fn validate(&self) -> Result<(), MixError> {
        if !(0.0..=1.0).contains(&self.ratio) {
            return Err(MixError::BadRatio(self.ratio));
        }
        if self.total_steps == 0 {
            return Err(MixError::ZeroSteps);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MixMode {
    /// Each step is synthetic independently with probability `ratio`.
    #[default]
    Bernoulli,
    /// Exactly `round(ratio * total_steps)` synthetic steps at shuffled positions.
    ExactCount,
}

fn check_pool(pool: &[ManifestEntry], expected: Source) -> Result<(), MixError> {
    for e in pool {
        if e.source != expected {
            return Err(MixError::WrongPool { uri: e.uri.clone(), pool: expected, origin: e.source });
        }
        e.check()?;
    }
    Ok(())
}

/// One entry per step, drawn with replacement from the chosen pool.
///
/// Randomness comes from `stream(schedule.seed, 0)`: per step one uniform
/// decides the source (Bernoulli mode), then one index draw picks the entry.
pub fn build_manifest(
    synthetic: &[ManifestEntry],
    real: &[ManifestEntry],
    schedule: &MixSchedule,
    mode: MixMode,
) -> Result<Vec<ManifestEntry>, MixError> {
    schedule.validate()?;
    check_pool(synthetic, Source::Synthetic)?;
    check_pool(real, Source::Real)?;
    if schedule.ratio > 0.0 && synthetic.is_empty() {
        return Err(MixError::EmptyPool(schedule.ratio, Source::Synthetic));
    }
    if schedule.ratio < 1.0 && real.is_empty() {
        return Err(MixError::EmptyPool(schedule.ratio, Source::Real));
    }

    let steps = schedule.total_steps as usize;
    let mut rng = stream(schedule.seed, 0);
    let plan: Vec<bool> = match mode {
        MixMode::Bernoulli => Vec::new(),
        MixMode::ExactCount => {
            let n_syn = (schedule.ratio * steps as f64).round() as usize;
            let mut plan: Vec<bool> = (0..steps).map(|i| i < n_syn).collect();
            plan.shuffle(&mut rng);
            plan
        }
    };
    let mut out = Vec::with_capacity(steps);
    for step in 0..steps {
        let is_synthetic = match mode {
            MixMode::Bernoulli => rng.gen::<f64>() < schedule.ratio,
            MixMode::ExactCount => plan[step],
        };
        let pool = if is_synthetic { synthetic } else { real };
        out.push(pool[rng.gen_range(0..pool.len())].clone());
    }
    Ok(out)
}

/// Cartesian product, ratios outer and step counts inner.
pub fn schedule_grid(ratios: &[f64], step_counts: &[u64], seed: u64) -> Result<Vec<MixSchedule>, MixError> {
    if ratios.is_empty() || step_counts.is_empty() {
        return Err(MixError::EmptyGrid);
    }
    let mut grid = Vec::with_capacity(ratios.len() * step_counts.len());
    for &ratio in ratios {
        for &total_steps in step_counts {
            let s = MixSchedule { ratio, total_steps, seed };
            s.validate()?;
            grid.push(s);
        }
    }
    Ok(grid)
}

pub const DEFAULT_RATIOS: [f64; 2] = [0.1, 0.5];
pub const DEFAULT_STEP_COUNTS: [u64; 4] = [3000, 5000, 10000, 15000];

/// The 2 x 4 mix-rate / training-length ablation grid.
pub fn default_grid(seed: u64) -> Vec<MixSchedule> {
    schedule_grid(&DEFAULT_RATIOS, &DEFAULT_STEP_COUNTS, seed).expect("default grid is valid")
}

pub fn synthetic_share(manifest: &[ManifestEntry]) -> f64 {
    if manifest.is_empty() {
        return 0.0;
    }
    manifest.iter().filter(|e| e.source == Source::Synthetic).count() as f64 / manifest.len() as f64
}

#[derive(Serialize, Deserialize)]
struct ManifestLine {
    step: u64,
    uri: String,
    source: Source,
    caption: ComposedCaption,
}

/// Newline-delimited JSON, one record per step.
pub fn write_manifest(mut w: impl Write, manifest: &[ManifestEntry]) -> io::Result<()> {
    for (step, e) in manifest.iter().enumerate() {
        let line = ManifestLine { step: step as u64, uri: e.uri.clone(), source: e.source, caption: e.caption.clone() };
        serde_json::to_writer(&mut w, &line)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_manifest(r: impl BufRead) -> io::Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ManifestLine = serde_json::from_str(&line)?;
        let entry = ManifestEntry::new(rec.uri, rec.caption, rec.source)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        out.push(entry);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caption::SPECIAL_TAGS;

    pub(crate) fn pools() -> (Vec<ManifestEntry>, Vec<ManifestEntry>) {
        let syn = (0..3)
            .map(|i| {
                let caption = ComposedCaption {
                    text: format!("animated rendered clip {i}"),
                    tags: SPECIAL_TAGS.iter().map(|t| t.to_string()).collect(),
                    negative_text: String::new(),
                    domain: Domain::Synthetic,
                };
                ManifestEntry::new(format!("syn/{i}"), caption, Source::Synthetic).unwrap()
            })
            .collect();
        let real = (0..5)
            .map(|i| ManifestEntry::new(format!("real/{i}"), ComposedCaption::real(format!("real {i}")), Source::Real).unwrap())
            .collect();
        (syn, real)
    }

    #[test]
    fn extreme_ratios() {
        let (syn, real) = pools();
        let all_real = build_manifest(&syn, &real, &MixSchedule { ratio: 0.0, total_steps: 500, seed: 1 }, MixMode::Bernoulli).unwrap();
        assert!(all_real.iter().all(|e| e.source == Source::Real));
        let all_syn = build_manifest(&syn, &real, &MixSchedule { ratio: 1.0, total_steps: 500, seed: 1 }, MixMode::Bernoulli).unwrap();
        assert!(all_syn.iter().all(|e| e.source == Source::Synthetic));
        // Unused pools may be empty.
        assert!(build_manifest(&[], &real, &MixSchedule { ratio: 0.0, total_steps: 5, seed: 1 }, MixMode::Bernoulli).is_ok());
    }

    #[test]
    fn empty_required_pool_is_an_error() {
        let (syn, _) = pools();
        let s = MixSchedule { ratio: 0.5, total_steps: 10, seed: 0 };
        assert_eq!(build_manifest(&syn, &[], &s, MixMode::Bernoulli), Err(MixError::EmptyPool(0.5, Source::Real)));
        assert_eq!(build_manifest(&[], &syn, &s, MixMode::Bernoulli).unwrap_err(), MixError::WrongPool {
            uri: "syn/0".into(),
            pool: Source::Real,
            origin: Source::Synthetic
        });
    }

    #[test]
    fn domain_mismatch_is_rejected() {
        let err = ManifestEntry::new("x", ComposedCaption::real("t"), Source::Synthetic).unwrap_err();
        assert!(matches!(err, MixError::DomainMismatch { .. }));
    }

    #[test]
    fn exact_count_mode_hits_the_ratio() {
        let (syn, real) = pools();
        let s = MixSchedule { ratio: 0.3, total_steps: 1000, seed: 5 };
        let m = build_manifest(&syn, &real, &s, MixMode::ExactCount).unwrap();
        assert_eq!(m.iter().filter(|e| e.source == Source::Synthetic).count(), 300);
    }

    #[test]
    fn bad_schedules() {
        let (syn, real) = pools();
        let s = MixSchedule { ratio: 1.5, total_steps: 10, seed: 0 };
        assert_eq!(build_manifest(&syn, &real, &s, MixMode::Bernoulli), Err(MixError::BadRatio(1.5)));
        let s = MixSchedule { ratio: 0.5, total_steps: 0, seed: 0 };
        assert_eq!(build_manifest(&syn, &real, &s, MixMode::Bernoulli), Err(MixError::ZeroSteps));
    }

    #[test]
    fn grid_shapes() {
        let grid = default_grid(0);
        assert_eq!(grid.len(), 8);
        assert_eq!((grid[0].ratio, grid[0].total_steps), (0.1, 3000));
        assert_eq!((grid[3].ratio, grid[3].total_steps), (0.1, 15000));
        assert_eq!((grid[4].ratio, grid[4].total_steps), (0.5, 3000));
        let single = schedule_grid(&[0.5], &[10000], 0).unwrap();
        assert_eq!(single, vec![MixSchedule { ratio: 0.5, total_steps: 10000, seed: 0 }]);
        assert_eq!(schedule_grid(&[], &[10], 0), Err(MixError::EmptyGrid));
    }

    #[test]
    fn ndjson_round_trip() {
        let (syn, real) = pools();
        let m = build_manifest(&syn, &real, &MixSchedule { ratio: 0.5, total_steps: 20, seed: 2 }, MixMode::Bernoulli).unwrap();
        let mut buf = Vec::new();
        write_manifest(&mut buf, &m).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 20);
        assert_eq!(read_manifest(&buf[..]).unwrap(), m);
    }
}

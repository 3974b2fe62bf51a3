//! Deterministic sampling of [`SceneConfig`]s from distribution presets.
//!
//! Every field of the config is drawn from its own ChaCha8 sub-stream,
//! `stream(sample_seed, field as u64)`, where `field` is the [`Field`]
//! discriminant below. Per-light and per-channel draws use a second level,
//! `stream(derive_seed(sample_seed, field), index)`. A field's value therefore
//! depends only on `(its distribution, sample_seed)`: editing one
//! distribution in a preset never perturbs the draws of another.
//!
//! Batches use `derive_seed(base_seed, i)` as the sample seed of element `i`.

use crate::scene_config::{
    validate_config, CameraSpec, EngineTarget, EnvSpec, FocusPosition, FocusType, LightingSpec, MovementType,
    ObjectAnimation, PointLight, RenderQuality, RenderSpec, SceneConfig, SceneType, MAX_PIXELS,
};
use crate::seed::{derive_seed, stream};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("invalid preset `{preset}`: {reason}")]
    InvalidPreset { preset: String, reason: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("batch count must be at least 1")]
    EmptyBatch,
    #[error("preset parse error: {0}")]
    Parse(#[from] serde_json::Error),
}

/// Distribution over a real-valued parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarDist {
    Uniform { min: f64, max: f64 },
    Categorical { values: Vec<f64>, weights: Vec<f64> },
    Constant(f64),
}

impl ScalarDist {
    pub fn uniform(min: f64, max: f64) -> Self {
        ScalarDist::Uniform { min, max }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            ScalarDist::Uniform { min, max } => {
                if !(min.is_finite() && max.is_finite() && min <= max) {
                    return Err(format!("empty or non-finite range [{min}, {max}]"));
                }
            }
            ScalarDist::Categorical { values, weights } => {
                if values.len() != weights.len() {
                    return Err("values and weights differ in length".into());
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err("non-finite categorical value".into());
                }
                check_weights(weights)?;
            }
            ScalarDist::Constant(v) => {
                if !v.is_finite() {
                    return Err("non-finite constant".into());
                }
            }
        }
        Ok(())
    }

    /// Smallest and largest value the distribution can produce.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            ScalarDist::Uniform { min, max } => (*min, *max),
            ScalarDist::Categorical { values, weights } => values
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w > 0.0)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (v, _)| (lo.min(*v), hi.max(*v))),
            ScalarDist::Constant(v) => (*v, *v),
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            ScalarDist::Uniform { min, max } => min + rng.gen::<f64>() * (max - min),
            ScalarDist::Categorical { values, weights } => values[pick(weights, rng)],
            ScalarDist::Constant(v) => *v,
        }
    }
}

/// Distribution over a discrete parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChoiceDist<T> {
    /// `(value, weight)` pairs; weights need not be normalized.
    Categorical(Vec<(T, f64)>),
    Constant(T),
}

impl<T: Clone> ChoiceDist<T> {
    pub fn uniform(values: &[T]) -> Self {
        ChoiceDist::Categorical(values.iter().cloned().map(|v| (v, 1.0)).collect())
    }

    fn check(&self) -> Result<(), String> {
        match self {
            ChoiceDist::Categorical(pairs) => {
                let weights: Vec<f64> = pairs.iter().map(|(_, w)| *w).collect();
                check_weights(&weights)
            }
            ChoiceDist::Constant(_) => Ok(()),
        }
    }

    /// Values with positive probability.
    pub fn support(&self) -> Vec<T> {
        match self {
            ChoiceDist::Categorical(pairs) => {
                pairs.iter().filter(|(_, w)| *w > 0.0).map(|(v, _)| v.clone()).collect()
            }
            ChoiceDist::Constant(v) => vec![v.clone()],
        }
    }

    /// Normalized probability of each listed value, in declaration order.
    pub fn probabilities(&self) -> Vec<(T, f64)> {
        match self {
            ChoiceDist::Categorical(pairs) => {
                let total: f64 = pairs.iter().map(|(_, w)| w).sum();
                pairs.iter().map(|(v, w)| (v.clone(), w / total)).collect()
            }
            ChoiceDist::Constant(v) => vec![(v.clone(), 1.0)],
        }
    }

    pub fn draw<R: Rng>(&self, rng: &mut R) -> T {
        match self {
            ChoiceDist::Categorical(pairs) => {
                let weights: Vec<f64> = pairs.iter().map(|(_, w)| *w).collect();
                pairs[pick(&weights, rng)].0.clone()
            }
            ChoiceDist::Constant(v) => v.clone(),
        }
    }
}

fn check_weights(weights: &[f64]) -> Result<(), String> {
    if weights.is_empty() {
        return Err("categorical distribution has no entries".into());
    }
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err("categorical weights must be finite and nonnegative".into());
    }
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err("categorical weights must have a positive sum".into());
    }
    Ok(())
}

/// Inverse-CDF pick with a single uniform draw.
fn pick<R: Rng>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    // Rounding can leave `target` at the very top; fall back to the last live entry.
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnimationKind {
    None,
    Spin,
    Translate,
}

/// A named distribution over every [`SceneConfig`] field.
///
/// The camera starts at `camera_distance` from the object anchor at the given
/// azimuth and elevation (degrees). Lights are placed the same way.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionPreset {
    pub name: String,
    pub object_ref: ChoiceDist<String>,
    pub animation: ChoiceDist<AnimationKind>,
    pub spin_rate: ScalarDist,
    pub translate_speed: ScalarDist,
    pub translate_heading: ScalarDist,
    pub focus_type: ChoiceDist<FocusType>,
    pub focus_position: ChoiceDist<FocusPosition>,
    pub movement_type: ChoiceDist<MovementType>,
    pub movement_value: BTreeMap<MovementType, ScalarDist>,
    pub camera_distance: ScalarDist,
    pub camera_azimuth: ScalarDist,
    pub camera_elevation: ScalarDist,
    pub coverage: ScalarDist,
    pub light_count: ChoiceDist<u32>,
    pub light_distance: ScalarDist,
    pub light_azimuth: ScalarDist,
    pub light_elevation: ScalarDist,
    pub light_color_temp: ScalarDist,
    pub light_intensity: ScalarDist,
    pub ambient_intensity: ScalarDist,
    pub scene_type: ChoiceDist<SceneType>,
    pub scene_color: ScalarDist,
    pub background_color: ScalarDist,
    pub background_alpha: ScalarDist,
    pub width: ChoiceDist<u32>,
    pub height: ChoiceDist<u32>,
    pub quality: ChoiceDist<RenderQuality>,
    pub engine_target: ChoiceDist<EngineTarget>,
    pub n_frames: ChoiceDist<u32>,
    pub fps: ChoiceDist<u32>,
}

/// Sub-stream index of each field. Append only; never reorder.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
enum Field {
    ObjectRef = 0,
    Animation = 1,
    SpinRate = 2,
    TranslateSpeed = 3,
    TranslateHeading = 4,
    FocusType = 5,
    FocusPosition = 6,
    MovementType = 7,
    MovementValue = 8,
    CameraDistance = 9,
    CameraAzimuth = 10,
    CameraElevation = 11,
    Coverage = 12,
    LightCount = 13,
    LightDistance = 14,
    LightAzimuth = 15,
    LightElevation = 16,
    LightColorTemp = 17,
    LightIntensity = 18,
    Ambient = 19,
    SceneType = 20,
    SceneColor = 21,
    BackgroundColor = 22,
    BackgroundAlpha = 23,
    Width = 24,
    Height = 25,
    Quality = 26,
    EngineTarget = 27,
    NFrames = 28,
    Fps = 29,
}

fn field_rng(seed: u64, field: Field) -> rand_chacha::ChaCha8Rng {
    stream(seed, field as u64)
}

fn indexed_rng(seed: u64, field: Field, index: u64) -> rand_chacha::ChaCha8Rng {
    stream(derive_seed(seed, field as u64), index)
}

fn spherical(distance: f64, azimuth_deg: f64, elevation_deg: f64) -> [f64; 3] {
    let (az, el) = (azimuth_deg.to_radians(), elevation_deg.to_radians());
    [distance * el.cos() * az.cos(), distance * el.cos() * az.sin(), distance * el.sin()]
}

impl DistributionPreset {
    /// Checks weights, ranges, and that every reachable value is legal in a config.
    pub fn validate(&self) -> Result<(), SamplerError> {
        let fail = |reason: String| SamplerError::InvalidPreset { preset: self.name.clone(), reason };
        let scalar = |label: &str, d: &ScalarDist, lo: f64, hi: f64| -> Result<(), SamplerError> {
            d.check().map_err(|r| fail(format!("{label}: {r}")))?;
            let (a, b) = d.bounds();
            if a < lo || b > hi {
                return Err(fail(format!("{label}: support [{a}, {b}] exceeds [{lo}, {hi}]")));
            }
            Ok(())
        };
        let choice = |label: &str, r: Result<(), String>| r.map_err(|r| fail(format!("{label}: {r}")));

        choice("object_ref", self.object_ref.check())?;
        if self.object_ref.support().iter().any(|s| s.trim().is_empty()) {
            return Err(fail("object_ref: empty identifier".into()));
        }
        choice("animation", self.animation.check())?;
        scalar("spin_rate", &self.spin_rate, f64::MIN, f64::MAX)?;
        scalar("translate_speed", &self.translate_speed, 0.0, f64::MAX)?;
        scalar("translate_heading", &self.translate_heading, f64::MIN, f64::MAX)?;
        choice("focus_type", self.focus_type.check())?;
        choice("focus_position", self.focus_position.check())?;
        choice("movement_type", self.movement_type.check())?;
        for mt in self.movement_type.support() {
            let dist = self
                .movement_value
                .get(&mt)
                .ok_or_else(|| fail(format!("movement_value: no distribution for {mt}")))?;
            scalar(&format!("movement_value.{mt}"), dist, f64::MIN, f64::MAX)?;
            let (a, b) = dist.bounds();
            if mt != MovementType::Following && a <= 0.0 && b >= 0.0 {
                return Err(fail(format!("movement_value.{mt}: support must exclude zero")));
            }
        }
        scalar("camera_distance", &self.camera_distance, f64::MIN_POSITIVE, f64::MAX)?;
        scalar("camera_azimuth", &self.camera_azimuth, f64::MIN, f64::MAX)?;
        // Stay clear of the poles, where a +z up vector degenerates.
        scalar("camera_elevation", &self.camera_elevation, -85.0, 85.0)?;
        if self.coverage.bounds().0 <= 0.0 {
            return Err(fail("coverage: support must exclude 0".into()));
        }
        scalar("coverage", &self.coverage, 0.0, 1.0)?;
        choice("light_count", self.light_count.check())?;
        if self.light_count.support().iter().any(|n| *n > 2) {
            return Err(fail("light_count: at most 2 lights".into()));
        }
        scalar("light_distance", &self.light_distance, 0.0, f64::MAX)?;
        scalar("light_azimuth", &self.light_azimuth, f64::MIN, f64::MAX)?;
        scalar("light_elevation", &self.light_elevation, -90.0, 90.0)?;
        scalar("light_color_temp", &self.light_color_temp, 1000.0, 12000.0)?;
        scalar("light_intensity", &self.light_intensity, 0.0, f64::MAX)?;
        scalar("ambient_intensity", &self.ambient_intensity, 0.0, f64::MAX)?;
        if self.light_count.support().contains(&0) && self.ambient_intensity.bounds().0 <= 0.0 {
            return Err(fail("unlit scenes reachable: zero lights with zero ambient".into()));
        }
        choice("scene_type", self.scene_type.check())?;
        scalar("scene_color", &self.scene_color, 0.0, 1.0)?;
        scalar("background_color", &self.background_color, 0.0, 1.0)?;
        scalar("background_alpha", &self.background_alpha, 0.0, 1.0)?;
        choice("width", self.width.check())?;
        choice("height", self.height.check())?;
        let max_w = self.width.support().into_iter().max().unwrap_or(0);
        let max_h = self.height.support().into_iter().max().unwrap_or(0);
        let min_w = self.width.support().into_iter().min().unwrap_or(0);
        let min_h = self.height.support().into_iter().min().unwrap_or(0);
        if min_w == 0 || min_h == 0 || u64::from(max_w) * u64::from(max_h) > MAX_PIXELS {
            return Err(fail("width/height: must be positive with width*height <= 4,000,000".into()));
        }
        choice("quality", self.quality.check())?;
        choice("engine_target", self.engine_target.check())?;
        choice("n_frames", self.n_frames.check())?;
        if self.n_frames.support().iter().any(|n| *n < 2) {
            return Err(fail("n_frames: must be >= 2".into()));
        }
        choice("fps", self.fps.check())?;
        if self.fps.support().iter().any(|f| !(1..=120).contains(f)) {
            return Err(fail("fps: must lie in [1, 120]".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SamplerError> {
        let preset: DistributionPreset = serde_json::from_str(text)?;
        preset.validate()?;
        Ok(preset)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("preset serialization is infallible")
    }
}

/// Draws one config. Pure in `(preset, seed)`; the preset must be valid.
///
/// Tilt and Pan force `Fixed` focus, since re-aiming would cancel them.
pub fn sample_config(preset: &DistributionPreset, seed: u64) -> SceneConfig {
    let object_ref = preset.object_ref.draw(&mut field_rng(seed, Field::ObjectRef));
    let object_animation = match preset.animation.draw(&mut field_rng(seed, Field::Animation)) {
        AnimationKind::None => ObjectAnimation::None,
        AnimationKind::Spin => ObjectAnimation::Spin(preset.spin_rate.draw(&mut field_rng(seed, Field::SpinRate))),
        AnimationKind::Translate => {
            let speed = preset.translate_speed.draw(&mut field_rng(seed, Field::TranslateSpeed));
            let heading = preset.translate_heading.draw(&mut field_rng(seed, Field::TranslateHeading)).to_radians();
            ObjectAnimation::Translate([speed * heading.cos(), speed * heading.sin(), 0.0])
        }
    };

    let movement_type = preset.movement_type.draw(&mut field_rng(seed, Field::MovementType));
    let mut focus_type = preset.focus_type.draw(&mut field_rng(seed, Field::FocusType));
    if movement_type.rotates_view() {
        focus_type = FocusType::Fixed;
    }
    let movement_value = preset
        .movement_value
        .get(&movement_type)
        .map(|d| d.draw(&mut field_rng(seed, Field::MovementValue)))
        .unwrap_or(0.0);
    let camera = CameraSpec {
        focus_type,
        focus_position: preset.focus_position.draw(&mut field_rng(seed, Field::FocusPosition)),
        movement_type,
        movement_value,
        initial_position: spherical(
            preset.camera_distance.draw(&mut field_rng(seed, Field::CameraDistance)),
            preset.camera_azimuth.draw(&mut field_rng(seed, Field::CameraAzimuth)),
            preset.camera_elevation.draw(&mut field_rng(seed, Field::CameraElevation)),
        ),
        coverage: preset.coverage.draw(&mut field_rng(seed, Field::Coverage)),
    };

    let n_lights = preset.light_count.draw(&mut field_rng(seed, Field::LightCount));
    let lights = (0..u64::from(n_lights))
        .map(|i| PointLight {
            position: spherical(
                preset.light_distance.draw(&mut indexed_rng(seed, Field::LightDistance, i)),
                preset.light_azimuth.draw(&mut indexed_rng(seed, Field::LightAzimuth, i)),
                preset.light_elevation.draw(&mut indexed_rng(seed, Field::LightElevation, i)),
            ),
            color_temp: preset.light_color_temp.draw(&mut indexed_rng(seed, Field::LightColorTemp, i)),
            intensity: preset.light_intensity.draw(&mut indexed_rng(seed, Field::LightIntensity, i)),
        })
        .collect();
    let lighting = LightingSpec {
        lights,
        ambient_intensity: preset.ambient_intensity.draw(&mut field_rng(seed, Field::Ambient)),
    };

    let environment = match preset.scene_type.draw(&mut field_rng(seed, Field::SceneType)) {
        SceneType::Basic => {
            let color = [0, 1, 2].map(|c| preset.scene_color.draw(&mut indexed_rng(seed, Field::SceneColor, c)));
            EnvSpec::basic(color)
        }
        SceneType::Empty => {
            let [r, g, b] =
                [0, 1, 2].map(|c| preset.background_color.draw(&mut indexed_rng(seed, Field::BackgroundColor, c)));
            let a = preset.background_alpha.draw(&mut field_rng(seed, Field::BackgroundAlpha));
            EnvSpec::empty([r, g, b, a])
        }
    };

    let render = RenderSpec {
        width: preset.width.draw(&mut field_rng(seed, Field::Width)),
        height: preset.height.draw(&mut field_rng(seed, Field::Height)),
        quality: preset.quality.draw(&mut field_rng(seed, Field::Quality)),
        engine_target: preset.engine_target.draw(&mut field_rng(seed, Field::EngineTarget)),
    };

    let cfg = SceneConfig {
        object_ref,
        object_animation,
        camera,
        lighting,
        environment,
        render,
        seed,
        n_frames: preset.n_frames.draw(&mut field_rng(seed, Field::NFrames)),
        fps: preset.fps.draw(&mut field_rng(seed, Field::Fps)),
    };
    debug_assert!(validate_config(&cfg).is_empty(), "{}", validate_config(&cfg));
    cfg
}

/// Element `i` equals `sample_config(preset, derive_seed(base_seed, i))`.
pub fn sample_batch(
    preset: &DistributionPreset,
    base_seed: u64,
    count: usize,
) -> Result<Vec<SceneConfig>, SamplerError> {
    if count == 0 {
        return Err(SamplerError::EmptyBatch);
    }
    Ok((0..count as u64)
        .into_par_iter()
        .map(|i| sample_config(preset, derive_seed(base_seed, i)))
        .collect())
}

pub const BUILTIN_OBJECTS: [&str; 4] = ["cube", "sphere", "torus", "cylinder"];

/// Named presets; always contains `random`, `forward_only` and `forward_following`.
#[derive(Clone, Debug)]
pub struct PresetLibrary {
    presets: BTreeMap<String, DistributionPreset>,
}

impl Default for PresetLibrary {
    fn default() -> Self {
        Self::builtin()
    }
}

impl PresetLibrary {
    pub const REQUIRED: [&'static str; 3] = ["random", "forward_only", "forward_following"];

    pub fn builtin() -> Self {
        let presets = [random_preset(), forward_only_preset(), forward_following_preset()]
            .into_iter()
            .map(|p| (p.name.clone(), p))
            .collect();
        PresetLibrary { presets }
    }

    pub fn get(&self, name: &str) -> Result<&DistributionPreset, SamplerError> {
        self.presets.get(name).ok_or_else(|| SamplerError::UnknownPreset(name.to_string()))
    }

    /// Adds or replaces a preset. The required names may be replaced but not removed.
    pub fn insert(&mut self, preset: DistributionPreset) -> Result<(), SamplerError> {
        preset.validate()?;
        self.presets.insert(preset.name.clone(), preset);
        Ok(())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.presets.keys().map(String::as_str)
    }
}

/// Uniform over every knob; the unconstrained baseline camera set.
pub fn random_preset() -> DistributionPreset {
    use MovementType::*;
    let movement_value = BTreeMap::from([
        (Truck, ScalarDist::uniform(0.5, 2.0)),
        (Dolly, ScalarDist::uniform(0.5, 2.0)),
        (Pedestal, ScalarDist::uniform(0.5, 1.5)),
        (Tilt, ScalarDist::uniform(5.0, 20.0)),
        (Pan, ScalarDist::uniform(5.0, 20.0)),
        (Spin, ScalarDist::Categorical { values: vec![90.0, 180.0, 360.0], weights: vec![1.0, 1.0, 1.0] }),
        (Following, ScalarDist::Constant(0.0)),
        (Zoom, ScalarDist::uniform(10.0, 30.0)),
    ]);
    DistributionPreset {
        name: "random".into(),
        object_ref: ChoiceDist::uniform(&BUILTIN_OBJECTS.map(String::from)),
        animation: ChoiceDist::Categorical(vec![
            (AnimationKind::None, 0.5),
            (AnimationKind::Spin, 0.25),
            (AnimationKind::Translate, 0.25),
        ]),
        spin_rate: ScalarDist::uniform(-90.0, 90.0),
        translate_speed: ScalarDist::uniform(0.1, 0.5),
        translate_heading: ScalarDist::uniform(0.0, 360.0),
        focus_type: ChoiceDist::uniform(&[FocusType::Follow, FocusType::Fixed]),
        focus_position: ChoiceDist::uniform(&[FocusPosition::Upper, FocusPosition::Center, FocusPosition::Lower]),
        movement_type: ChoiceDist::uniform(&MovementType::ALL),
        movement_value,
        camera_distance: ScalarDist::uniform(5.0, 8.0),
        camera_azimuth: ScalarDist::uniform(0.0, 360.0),
        camera_elevation: ScalarDist::uniform(-10.0, 40.0),
        coverage: ScalarDist::uniform(0.3, 0.8),
        light_count: ChoiceDist::Categorical(vec![(1, 0.3), (2, 0.7)]),
        light_distance: ScalarDist::uniform(4.0, 8.0),
        light_azimuth: ScalarDist::uniform(0.0, 360.0),
        light_elevation: ScalarDist::uniform(20.0, 80.0),
        light_color_temp: ScalarDist::uniform(2500.0, 9000.0),
        light_intensity: ScalarDist::uniform(0.3, 1.0),
        ambient_intensity: ScalarDist::uniform(0.05, 0.3),
        scene_type: ChoiceDist::uniform(&[SceneType::Basic, SceneType::Empty]),
        scene_color: ScalarDist::uniform(0.2, 0.9),
        background_color: ScalarDist::uniform(0.0, 1.0),
        background_alpha: ScalarDist::Constant(1.0),
        width: ChoiceDist::Constant(128),
        height: ChoiceDist::Constant(96),
        quality: ChoiceDist::Categorical(vec![(RenderQuality::High, 0.7), (RenderQuality::Low, 0.3)]),
        engine_target: ChoiceDist::Constant(EngineTarget::Internal),
        n_frames: ChoiceDist::Constant(49),
        fps: ChoiceDist::Constant(24),
    }
}

/// Forward camera motion only: a Dolly toward the subject at eye level.
pub fn forward_only_preset() -> DistributionPreset {
    DistributionPreset {
        name: "forward_only".into(),
        focus_type: ChoiceDist::Constant(FocusType::Follow),
        movement_type: ChoiceDist::Constant(MovementType::Dolly),
        movement_value: BTreeMap::from([(MovementType::Dolly, ScalarDist::uniform(0.5, 2.0))]),
        camera_elevation: ScalarDist::uniform(0.0, 20.0),
        ..random_preset()
    }
}

/// Weight of `Following` in the `forward_following` preset; `Dolly` takes the rest.
pub const FOLLOWING_SHARE: f64 = 0.5;

/// Forward dolly plus following shots of a moving subject.
pub fn forward_following_preset() -> DistributionPreset {
    DistributionPreset {
        name: "forward_following".into(),
        animation: ChoiceDist::Categorical(vec![
            (AnimationKind::None, 0.2),
            (AnimationKind::Spin, 0.2),
            (AnimationKind::Translate, 0.6),
        ]),
        movement_type: ChoiceDist::Categorical(vec![
            (MovementType::Dolly, 1.0 - FOLLOWING_SHARE),
            (MovementType::Following, FOLLOWING_SHARE),
        ]),
        movement_value: BTreeMap::from([
            (MovementType::Dolly, ScalarDist::uniform(0.5, 2.0)),
            (MovementType::Following, ScalarDist::Constant(0.0)),
        ]),
        ..forward_only_preset()
    }
}

//! The typed parameter record that drives one synthetic video.
//!
//! A [`SceneConfig`] covers the object, camera, lighting, environment and
//! render settings. Configs are exchanged as strict JSON documents carrying a
//! `"schema": 1` version key; unknown keys are rejected.
//!
//! Conventions used throughout the crate:
//! - world up is `+z`, the object is anchored at the world origin;
//! - `movement_value` is the total over the whole clip, in degrees for
//!   `Tilt`/`Pan`/`Spin`, world units for `Truck`/`Dolly`/`Pedestal`, and
//!   focal-length millimetres for `Zoom`. `Following` ignores it.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Current config document version.
pub const SCHEMA_VERSION: u32 = 1;

/// Desk-scale guard on `width * height`.
pub const MAX_PIXELS: u64 = 4_000_000;

pub type Vec3 = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ObjectAnimation {
    None,
    /// Rotation about the vertical axis through the object center, degrees per second.
    Spin(f64),
    /// Constant velocity, world units per second.
    Translate(Vec3),
}

impl ObjectAnimation {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ObjectAnimation::None => "none",
            ObjectAnimation::Spin(_) => "spin",
            ObjectAnimation::Translate(_) => "translate",
        }
    }

    /// Displacement of the object center after `seconds`.
    pub fn offset_at(&self, seconds: f64) -> Vec3 {
        match *self {
            ObjectAnimation::Translate(v) => [v[0] * seconds, v[1] * seconds, v[2] * seconds],
            _ => [0.0; 3],
        }
    }

    /// Rotation about the vertical axis after `seconds`, in degrees.
    pub fn yaw_deg_at(&self, seconds: f64) -> f64 {
        match *self {
            ObjectAnimation::Spin(rate) => rate * seconds,
            _ => 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FocusType {
    Follow,
    Fixed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FocusPosition {
    Upper,
    Center,
    Lower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MovementType {
    Truck,
    Dolly,
    Pedestal,
    Tilt,
    Pan,
    Spin,
    Following,
    Zoom,
}

impl MovementType {
    pub const ALL: [MovementType; 8] = [
        MovementType::Truck,
        MovementType::Dolly,
        MovementType::Pedestal,
        MovementType::Tilt,
        MovementType::Pan,
        MovementType::Spin,
        MovementType::Following,
        MovementType::Zoom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MovementType::Truck => "Truck",
            MovementType::Dolly => "Dolly",
            MovementType::Pedestal => "Pedestal",
            MovementType::Tilt => "Tilt",
            MovementType::Pan => "Pan",
            MovementType::Spin => "Spin",
            MovementType::Following => "Following",
            MovementType::Zoom => "Zoom",
        }
    }

    /// Tilt and Pan rotate the view away from the target, so they cannot re-aim.
    pub fn rotates_view(self) -> bool {
        matches!(self, MovementType::Tilt | MovementType::Pan)
    }
}

impl fmt::Display for MovementType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraSpec {
    pub focus_type: FocusType,
    pub focus_position: FocusPosition,
    pub movement_type: MovementType,
    pub movement_value: f64,
    pub initial_position: Vec3,
    /// Fraction of the screen height covered by the object's bounding radius.
    pub coverage: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointLight {
    pub position: Vec3,
    /// Kelvin.
    pub color_temp: f64,
    pub intensity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightingSpec {
    pub lights: Vec<PointLight>,
    pub ambient_intensity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SceneType {
    Basic,
    Empty,
}

impl SceneType {
    pub fn name(self) -> &'static str {
        match self {
            SceneType::Basic => "Basic",
            SceneType::Empty => "Empty",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvSpec {
    pub scene_type: SceneType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene_color: Option<Vec3>,
    /// Alpha is recorded but frames are always composited over an opaque background.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub background_color: Option<[f64; 4]>,
}

impl EnvSpec {
    pub fn basic(scene_color: Vec3) -> Self {
        EnvSpec { scene_type: SceneType::Basic, scene_color: Some(scene_color), background_color: None }
    }

    pub fn empty(background_color: [f64; 4]) -> Self {
        EnvSpec { scene_type: SceneType::Empty, scene_color: None, background_color: Some(background_color) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RenderQuality {
    High,
    Low,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EngineTarget {
    Internal,
    BlenderScript,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    pub quality: RenderQuality,
    pub engine_target: EngineTarget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub object_ref: String,
    pub object_animation: ObjectAnimation,
    pub camera: CameraSpec,
    pub lighting: LightingSpec,
    pub environment: EnvSpec,
    pub render: RenderSpec,
    pub seed: u64,
    pub n_frames: u32,
    pub fps: u32,
}

impl SceneConfig {
    /// Seconds elapsed at frame `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        k as f64 / f64::from(self.fps)
    }
}

/// One violated invariant, addressed by a dotted field path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, path_fragment: &str) -> bool {
        self.violations.iter().any(|v| v.path.contains(path_fragment))
    }

    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation { path: path.into(), message: message.into() });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}: {}", v.path, v.message)?;
        }
        Ok(())
    }
}

fn finite3(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn unit_interval(v: &[f64]) -> bool {
    v.iter().all(|x| (0.0..=1.0).contains(x))
}

/// Checks every invariant of `cfg` and reports all violations. Never panics.
pub fn validate_config(cfg: &SceneConfig) -> ValidationReport {
    let mut r = ValidationReport::default();

    if cfg.object_ref.trim().is_empty() {
        r.push("object_ref", "must be a nonempty mesh identifier");
    }
    match cfg.object_animation {
        ObjectAnimation::None => {}
        ObjectAnimation::Spin(rate) if !rate.is_finite() => {
            r.push("object_animation.spin", "rate must be finite");
        }
        ObjectAnimation::Translate(v) if !finite3(&v) => {
            r.push("object_animation.translate", "velocity must be finite");
        }
        _ => {}
    }
    if cfg.n_frames < 2 {
        r.push("n_frames", format!("must be >= 2, got {}", cfg.n_frames));
    }
    if !(1..=120).contains(&cfg.fps) {
        r.push("fps", format!("must lie in [1, 120], got {}", cfg.fps));
    }

    let cam = &cfg.camera;
    if !cam.movement_value.is_finite() {
        r.push("camera.movement_value", "must be finite");
    } else if cam.movement_value == 0.0 && cam.movement_type != MovementType::Following {
        r.push("camera.movement_value", format!("must be nonzero for {}", cam.movement_type));
    }
    if !finite3(&cam.initial_position) {
        r.push("camera.initial_position", "must be finite");
    } else if cam.initial_position.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-9 {
        r.push("camera.initial_position", "coincides with the object anchor");
    }
    if !(cam.coverage > 0.0 && cam.coverage <= 1.0) {
        r.push("camera.coverage", format!("must lie in (0, 1], got {}", cam.coverage));
    }
    if cam.movement_type.rotates_view() && cam.focus_type == FocusType::Follow {
        r.push(
            "camera.focus_type",
            format!("{} requires Fixed focus; Follow would cancel the rotation", cam.movement_type),
        );
    }

    let lighting = &cfg.lighting;
    if lighting.lights.len() > 2 {
        r.push("lighting.lights", format!("at most 2 lights, got {}", lighting.lights.len()));
    }
    for (i, light) in lighting.lights.iter().enumerate() {
        if !finite3(&light.position) {
            r.push(format!("lighting.lights[{i}].position"), "must be finite");
        }
        if !(1000.0..=12000.0).contains(&light.color_temp) {
            r.push(
                format!("lighting.lights[{i}].color_temp"),
                format!("must lie in [1000, 12000] K, got {}", light.color_temp),
            );
        }
        if !(light.intensity >= 0.0 && light.intensity.is_finite()) {
            r.push(format!("lighting.lights[{i}].intensity"), "must be finite and nonnegative");
        }
    }
    if !(lighting.ambient_intensity >= 0.0 && lighting.ambient_intensity.is_finite()) {
        r.push("lighting.ambient_intensity", "must be finite and nonnegative");
    }
    if lighting.lights.is_empty() && !(lighting.ambient_intensity > 0.0) {
        r.push("lighting", "needs at least one light or a positive ambient intensity");
    }

    let env = &cfg.environment;
    match env.scene_type {
        SceneType::Basic => {
            match &env.scene_color {
                None => r.push("environment.scene_color", "required for Basic scenes"),
                Some(c) if !unit_interval(c) => {
                    r.push("environment.scene_color", "components must lie in [0, 1]")
                }
                Some(_) => {}
            }
            if env.background_color.is_some() {
                r.push("environment.background_color", "not allowed for Basic scenes");
            }
        }
        SceneType::Empty => {
            match &env.background_color {
                None => r.push("environment.background_color", "required for Empty scenes"),
                Some(c) if !unit_interval(c) => {
                    r.push("environment.background_color", "components must lie in [0, 1]")
                }
                Some(_) => {}
            }
            if env.scene_color.is_some() {
                r.push("environment.scene_color", "not allowed for Empty scenes");
            }
        }
    }

    let render = &cfg.render;
    if render.width == 0 {
        r.push("render.width", "must be positive");
    }
    if render.height == 0 {
        r.push("render.height", "must be positive");
    }
    if u64::from(render.width) * u64::from(render.height) > MAX_PIXELS {
        r.push("render", format!("width * height must be <= {MAX_PIXELS}"));
    }
    r
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema version {found} (expected {SCHEMA_VERSION})")]
    Schema { found: u32 },
}

/// On-disk form: the record plus the leading schema key.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    schema: u32,
    object_ref: String,
    object_animation: ObjectAnimation,
    camera: CameraSpec,
    lighting: LightingSpec,
    environment: EnvSpec,
    render: RenderSpec,
    seed: u64,
    n_frames: u32,
    fps: u32,
}

/// Pretty-printed JSON with `"schema": 1` as the first key.
pub fn encode_config(cfg: &SceneConfig) -> String {
    let doc = ConfigDocument {
        schema: SCHEMA_VERSION,
        object_ref: cfg.object_ref.clone(),
        object_animation: cfg.object_animation,
        camera: cfg.camera.clone(),
        lighting: cfg.lighting.clone(),
        environment: cfg.environment.clone(),
        render: cfg.render.clone(),
        seed: cfg.seed,
        n_frames: cfg.n_frames,
        fps: cfg.fps,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("config serialization is infallible");
    text.push('\n');
    text
}

/// Strict decode. Errors carry line/column and, for bad keys or enum values,
/// the list of legal alternatives.
pub fn decode_config(text: &str) -> Result<SceneConfig, ConfigError> {
    let doc: ConfigDocument = serde_json::from_str(text)?;
    if doc.schema != SCHEMA_VERSION {
        return Err(ConfigError::Schema { found: doc.schema });
    }
    Ok(SceneConfig {
        object_ref: doc.object_ref,
        object_animation: doc.object_animation,
        camera: doc.camera,
        lighting: doc.lighting,
        environment: doc.environment,
        render: doc.render,
        seed: doc.seed,
        n_frames: doc.n_frames,
        fps: doc.fps,
    })
}

/// Piecewise fit of blackbody color (Tanner Helland's approximation), valid
/// for 1000 K to 40000 K. Returns linear RGB in `[0, 1]`.
///
/// | channel | range          | formula (t = K / 100)                         |
/// |---------|----------------|-----------------------------------------------|
/// | red     | t <= 66        | 255                                           |
/// | red     | t > 66         | 329.698727446 * (t - 60)^-0.1332047592        |
/// | green   | t <= 66        | 99.4708025861 * ln(t) - 161.1195681661        |
/// | green   | t > 66         | 288.1221695283 * (t - 60)^-0.0755148492       |
/// | blue    | t >= 66        | 255                                           |
/// | blue    | t <= 19        | 0                                             |
/// | blue    | otherwise      | 138.5177312231 * ln(t - 10) - 305.0447927307  |
pub fn kelvin_rgb(kelvin: f64) -> [f64; 3] {
    let t = kelvin.clamp(1000.0, 40000.0) / 100.0;
    let red = if t <= 66.0 { 255.0 } else { 329.698_727_446 * (t - 60.0).powf(-0.133_204_759_2) };
    let green = if t <= 66.0 {
        99.470_802_586_1 * t.ln() - 161.119_568_166_1
    } else {
        288.122_169_528_3 * (t - 60.0).powf(-0.075_514_849_2)
    };
    let blue = if t >= 66.0 {
        255.0
    } else if t <= 19.0 {
        0.0
    } else {
        138.517_731_223_1 * (t - 10.0).ln() - 305.044_792_730_7
    };
    [red, green, blue].map(|c| (c / 255.0).clamp(0.0, 1.0))
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn spin_config() -> SceneConfig {
        SceneConfig {
            object_ref: "cube".into(),
            object_animation: ObjectAnimation::None,
            camera: CameraSpec {
                focus_type: FocusType::Follow,
                focus_position: FocusPosition::Center,
                movement_type: MovementType::Spin,
                movement_value: 360.0,
                initial_position: [0.0, -6.0, 1.5],
                coverage: 0.5,
            },
            lighting: LightingSpec {
                lights: vec![
                    PointLight { position: [0.0, 0.0, 6.0], color_temp: 6500.0, intensity: 0.8 },
                    PointLight { position: [4.0, -4.0, 3.0], color_temp: 4000.0, intensity: 0.4 },
                ],
                ambient_intensity: 0.2,
            },
            environment: EnvSpec::basic([0.8, 0.75, 0.7]),
            render: RenderSpec {
                width: 64,
                height: 48,
                quality: RenderQuality::High,
                engine_target: EngineTarget::Internal,
            },
            seed: 42,
            n_frames: 73,
            fps: 24,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::spin_config;
    use super::*;

    #[test]
    fn well_formed_spin_config_is_valid() {
        let report = validate_config(&spin_config());
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn single_frame_is_reported() {
        let mut cfg = spin_config();
        cfg.n_frames = 1;
        let report = validate_config(&cfg);
        assert!(report.mentions("n_frames"));
        assert_eq!(report.violations.len(), 1);
    }

    #[test]
    fn basic_scene_without_color_is_reported() {
        let mut cfg = spin_config();
        cfg.environment.scene_color = None;
        assert!(validate_config(&cfg).mentions("scene_color"));
    }

    #[test]
    fn empty_scene_field_rules() {
        let mut cfg = spin_config();
        cfg.environment = EnvSpec::empty([0.0, 0.0, 0.0, 1.0]);
        assert!(validate_config(&cfg).is_empty());
        cfg.environment.scene_color = Some([0.1, 0.1, 0.1]);
        assert!(validate_config(&cfg).mentions("environment.scene_color"));
        cfg.environment = EnvSpec { scene_type: SceneType::Empty, scene_color: None, background_color: None };
        assert!(validate_config(&cfg).mentions("background_color"));
    }

    #[test]
    fn every_violation_is_collected() {
        let mut cfg = spin_config();
        cfg.n_frames = 0;
        cfg.fps = 500;
        cfg.camera.coverage = 0.0;
        cfg.camera.movement_value = f64::NAN;
        cfg.lighting.lights.push(cfg.lighting.lights[0].clone());
        cfg.lighting.lights[0].color_temp = 500.0;
        cfg.render.width = 4000;
        cfg.render.height = 4000;
        let report = validate_config(&cfg);
        for path in [
            "n_frames",
            "fps",
            "camera.coverage",
            "camera.movement_value",
            "lighting.lights",
            "lighting.lights[0].color_temp",
            "render",
        ] {
            assert!(report.mentions(path), "missing {path} in\n{report}");
        }
    }

    #[test]
    fn unlit_scene_is_reported() {
        let mut cfg = spin_config();
        cfg.lighting.lights.clear();
        cfg.lighting.ambient_intensity = 0.0;
        assert!(validate_config(&cfg).mentions("lighting"));
        cfg.lighting.ambient_intensity = 0.3;
        assert!(validate_config(&cfg).is_empty());
    }

    #[test]
    fn tilt_with_follow_focus_is_a_conflict() {
        let mut cfg = spin_config();
        cfg.camera.movement_type = MovementType::Tilt;
        cfg.camera.movement_value = 10.0;
        assert!(validate_config(&cfg).mentions("camera.focus_type"));
        cfg.camera.focus_type = FocusType::Fixed;
        assert!(validate_config(&cfg).is_empty());
    }

    #[test]
    fn following_may_carry_zero_movement_value() {
        let mut cfg = spin_config();
        cfg.camera.movement_type = MovementType::Following;
        cfg.camera.movement_value = 0.0;
        assert!(validate_config(&cfg).is_empty());
        cfg.camera.movement_type = MovementType::Dolly;
        assert!(validate_config(&cfg).mentions("movement_value"));
    }

    #[test]
    fn camera_at_anchor_is_reported() {
        let mut cfg = spin_config();
        cfg.camera.initial_position = [0.0; 3];
        assert!(validate_config(&cfg).mentions("initial_position"));
    }

    #[test]
    fn round_trip_preserves_every_field() {
        let mut cfg = spin_config();
        cfg.object_animation = ObjectAnimation::Translate([0.1, -0.2, 1.0 / 3.0]);
        cfg.camera.movement_value = std::f64::consts::PI;
        let text = encode_config(&cfg);
        assert!(text.trim_start().starts_with("{\n  \"schema\": 1,"));
        assert_eq!(decode_config(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_field_is_named() {
        let text = encode_config(&spin_config()).replace("\"fps\"", "\"frame_rate\"");
        let err = decode_config(&text).unwrap_err().to_string();
        assert!(err.contains("frame_rate"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn illegal_movement_type_lists_legal_values() {
        let text = encode_config(&spin_config()).replace("\"Spin\"", "\"Orbit\"");
        let err = decode_config(&text).unwrap_err().to_string();
        assert!(err.contains("Orbit"), "{err}");
        for legal in MovementType::ALL {
            assert!(err.contains(legal.name()), "{legal} missing from: {err}");
        }
    }

    #[test]
    fn schema_key_is_required_and_checked() {
        let text = encode_config(&spin_config());
        let missing = text.replace("  \"schema\": 1,\n", "");
        assert!(decode_config(&missing).unwrap_err().to_string().contains("schema"));
        let wrong = text.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(decode_config(&wrong), Err(ConfigError::Schema { found: 2 })));
    }

    #[test]
    fn kelvin_table_endpoints() {
        let d65 = kelvin_rgb(6500.0);
        assert!(d65.iter().all(|c| *c > 0.9), "{d65:?}");
        let candle = kelvin_rgb(1000.0);
        assert_eq!(candle[0], 1.0);
        assert_eq!(candle[2], 0.0);
        let sky = kelvin_rgb(12000.0);
        assert!(sky[2] == 1.0 && sky[0] < sky[2]);
    }
}

//! Compositional captions for synthetic videos.
//!
//! Each scene element (object, scene, camera move, object motion) is captioned
//! once in a registry; a video's caption is assembled from its elements, so an
//! `N x M x C` grid of videos needs only `N + M + C` element captions. Special
//! tags mark the synthetic domain and can double as the negative prompt.

use crate::scene_config::{ObjectAnimation, SceneConfig};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use thiserror::Error;

/// Tags prepended to synthetic captions, in order.
pub const SPECIAL_TAGS: [&str; 2] = ["animated", "rendered"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKind {
    Object,
    Scene,
    Camera,
    Motion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Granularity {
    Generic,
    FineGrained,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TagMode {
    None,
    Tags,
    TagsPlusNegative,
}

impl FromStr for TagMode {
    type Err = CaptionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(TagMode::None),
            "tags" => Ok(TagMode::Tags),
            "tags+np" => Ok(TagMode::TagsPlusNegative),
            other => Err(CaptionError::BadTagMode(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    Synthetic,
    Real,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementKey {
    pub kind: ElementKind,
    pub id: String,
    pub granularity: Granularity,
}

impl ElementKey {
    pub fn new(kind: ElementKind, id: impl Into<String>, granularity: Granularity) -> Self {
        ElementKey { kind, id: id.into(), granularity }
    }
}

impl fmt::Display for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}:{:?}", self.kind, self.id, self.granularity)
    }
}

impl FromStr for ElementKey {
    type Err = CaptionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CaptionError::BadKey(s.to_string());
        let mut parts = s.splitn(3, ':');
        let kind = match parts.next().ok_or_else(bad)? {
            "Object" => ElementKind::Object,
            "Scene" => ElementKind::Scene,
            "Camera" => ElementKind::Camera,
            "Motion" => ElementKind::Motion,
            _ => return Err(bad()),
        };
        let id = parts.next().filter(|id| !id.is_empty()).ok_or_else(bad)?;
        let granularity = match parts.next().ok_or_else(bad)? {
            "Generic" => Granularity::Generic,
            "FineGrained" => Granularity::FineGrained,
            _ => return Err(bad()),
        };
        Ok(ElementKey::new(kind, id, granularity))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementCaption {
    pub kind: ElementKind,
    pub id: String,
    pub text: String,
    pub granularity: Granularity,
}

impl ElementCaption {
    pub fn key(&self) -> ElementKey {
        ElementKey::new(self.kind, self.id.clone(), self.granularity)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComposedCaption {
    pub text: String,
    pub tags: Vec<String>,
    pub negative_text: String,
    pub domain: Domain,
}

impl ComposedCaption {
    /// Caption of a real clip: never tagged.
    pub fn real(text: impl Into<String>) -> Self {
        ComposedCaption { text: text.into(), tags: Vec::new(), negative_text: String::new(), domain: Domain::Real }
    }

    pub fn contains_special_tag(&self) -> bool {
        !self.tags.is_empty() || self.text.split_whitespace().any(|w| SPECIAL_TAGS.contains(&w))
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CaptionError {
    #[error("element `{id}` of kind {found:?} passed where a {expected:?} caption is required")]
    KindMismatch { expected: ElementKind, found: ElementKind, id: String },
    #[error("registry has no entry for ({kind:?}, {id}, {granularity:?})")]
    MissingEntry { kind: ElementKind, id: String, granularity: Granularity },
    #[error("duplicate registry entry {0}")]
    Duplicate(String),
    #[error("empty caption text for {0}")]
    EmptyText(String),
    #[error("malformed registry key `{0}` (expected Kind:id:Granularity)")]
    BadKey(String),
    #[error("unknown tag mode `{0}` (expected none, tags or tags+np)")]
    BadTagMode(String),
    #[error("caption counts must all be >= 1")]
    ZeroCount,
    #[error("registry parse error: {0}")]
    Parse(String),
}

fn expect_kind(c: &ElementCaption, expected: ElementKind) -> Result<(), CaptionError> {
    if c.kind == expected {
        Ok(())
    } else {
        Err(CaptionError::KindMismatch { expected, found: c.kind, id: c.id.clone() })
    }
}

/// Joins `tags object motion scene camera` with single spaces.
pub fn compose_caption(
    object: &ElementCaption,
    scene: &ElementCaption,
    camera: &ElementCaption,
    motion: Option<&ElementCaption>,
    tag_mode: TagMode,
) -> Result<ComposedCaption, CaptionError> {
    expect_kind(object, ElementKind::Object)?;
    expect_kind(scene, ElementKind::Scene)?;
    expect_kind(camera, ElementKind::Camera)?;
    if let Some(m) = motion {
        expect_kind(m, ElementKind::Motion)?;
    }
    let tags: Vec<String> = match tag_mode {
        TagMode::None => Vec::new(),
        TagMode::Tags | TagMode::TagsPlusNegative => SPECIAL_TAGS.iter().map(|t| t.to_string()).collect(),
    };
    let tag_text = tags.join(" ");
    let parts = [
        tag_text.as_str(),
        object.text.trim(),
        motion.map(|m| m.text.trim()).unwrap_or(""),
        scene.text.trim(),
        camera.text.trim(),
    ];
    let text = parts.iter().filter(|p| !p.is_empty()).copied().collect::<Vec<_>>().join(" ");
    let negative_text = if tag_mode == TagMode::TagsPlusNegative { tag_text } else { String::new() };
    Ok(ComposedCaption { text, tags, negative_text, domain: Domain::Synthetic })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaptionCount {
    pub compositional: u64,
    pub per_video: u64,
}

/// Element captions needed compositionally (`N + M + C`) versus per video (`N * M * C`).
pub fn caption_count(n_objects: u64, m_scenes: u64, c_cameras: u64) -> Result<CaptionCount, CaptionError> {
    if n_objects == 0 || m_scenes == 0 || c_cameras == 0 {
        return Err(CaptionError::ZeroCount);
    }
    Ok(CaptionCount {
        compositional: n_objects + m_scenes + c_cameras,
        per_video: n_objects * m_scenes * c_cameras,
    })
}

/// Read access to element captions.
pub trait CaptionLookup {
    fn lookup(&self, key: &ElementKey) -> Option<&ElementCaption>;
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CaptionRegistry {
    entries: BTreeMap<ElementKey, ElementCaption>,
}

impl CaptionRegistry {
    pub fn insert(&mut self, caption: ElementCaption) -> Result<(), CaptionError> {
        let key = caption.key();
        if caption.text.trim().is_empty() {
            return Err(CaptionError::EmptyText(key.to_string()));
        }
        if self.entries.contains_key(&key) {
            return Err(CaptionError::Duplicate(key.to_string()));
        }
        self.entries.insert(key, caption);
        Ok(())
    }

    pub fn add(&mut self, kind: ElementKind, id: &str, granularity: Granularity, text: &str) -> Result<(), CaptionError> {
        self.insert(ElementCaption { kind, id: id.to_string(), text: text.to_string(), granularity })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// JSON object mapping `"Kind:id:Granularity"` to caption text.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, &str> =
            self.entries.iter().map(|(k, v)| (k.to_string(), v.text.as_str())).collect();
        serde_json::to_string_pretty(&map).expect("registry serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, CaptionError> {
        let map: BTreeMap<String, String> =
            serde_json::from_str(text).map_err(|e| CaptionError::Parse(e.to_string()))?;
        let mut registry = CaptionRegistry::default();
        for (key, text) in map {
            let key: ElementKey = key.parse()?;
            registry.insert(ElementCaption { kind: key.kind, id: key.id, text, granularity: key.granularity })?;
        }
        Ok(registry)
    }

    /// Captions for the builtin objects, both scene types, every movement
    /// type and both object motions, at both granularities.
    pub fn builtin() -> Self {
        use ElementKind::*;
        use Granularity::*;
        let rows: &[(ElementKind, &str, &str, &str)] = &[
            (Object, "cube", "a red cube", "a matte brick-red cube with sharp edges and flat faces"),
            (Object, "sphere", "a blue sphere", "a smooth sky-blue sphere with an evenly curved surface"),
            (Object, "torus", "a golden ring", "a golden torus shaped like a thick donut ring"),
            (Object, "cylinder", "a green cylinder", "a short leaf-green cylinder with flat circular caps"),
            (Scene, "Basic", "in a room", "inside a plain indoor room with solid colored walls lit by two lamps"),
            (Scene, "Empty", "on a plain background", "floating in front of an empty uniform solid-color background"),
            (Camera, "Truck", "the camera moves sideways", "the camera trucks sideways, sliding parallel to the subject"),
            (Camera, "Dolly", "the camera moves forward", "the camera dollies forward toward the subject"),
            (Camera, "Pedestal", "the camera moves up", "the camera pedestals straight up while keeping its heading"),
            (Camera, "Tilt", "the camera tilts", "the camera tilts vertically from a fixed position"),
            (Camera, "Pan", "the camera pans", "the camera pans horizontally from a fixed position"),
            (Camera, "Spin", "the camera circles the object", "the camera orbits around the subject at a constant distance"),
            (Camera, "Following", "the camera follows the object", "the camera tracks the subject keeping a constant offset"),
            (Camera, "Zoom", "the camera zooms", "the camera zooms its lens while standing still"),
            (Motion, "spin", "spinning", "rotating steadily about its vertical axis"),
            (Motion, "translate", "moving", "gliding across the ground at a constant speed"),
        ];
        let mut registry = CaptionRegistry::default();
        for (kind, id, generic, fine) in rows {
            registry.add(*kind, id, Generic, generic).expect("builtin entries are unique");
            registry.add(*kind, id, FineGrained, fine).expect("builtin entries are unique");
        }
        registry
    }
}

impl CaptionLookup for CaptionRegistry {
    fn lookup(&self, key: &ElementKey) -> Option<&ElementCaption> {
        self.entries.get(key)
    }
}

/// Wraps a lookup and records every distinct key requested.
pub struct AccessLog<'a, L: CaptionLookup> {
    inner: &'a L,
    touched: Mutex<BTreeSet<ElementKey>>,
}

impl<'a, L: CaptionLookup> AccessLog<'a, L> {
    pub fn new(inner: &'a L) -> Self {
        AccessLog { inner, touched: Mutex::new(BTreeSet::new()) }
    }

    pub fn touched(&self) -> BTreeSet<ElementKey> {
        self.touched.lock().expect("access log poisoned").clone()
    }
}

impl<L: CaptionLookup> CaptionLookup for AccessLog<'_, L> {
    fn lookup(&self, key: &ElementKey) -> Option<&ElementCaption> {
        self.touched.lock().expect("access log poisoned").insert(key.clone());
        self.inner.lookup(key)
    }
}

fn fetch<'r>(
    registry: &'r impl CaptionLookup,
    kind: ElementKind,
    id: &str,
    granularity: Granularity,
) -> Result<&'r ElementCaption, CaptionError> {
    registry
        .lookup(&ElementKey::new(kind, id, granularity))
        .ok_or_else(|| CaptionError::MissingEntry { kind, id: id.to_string(), granularity })
}

/// Caption for one config: object by `object_ref`, scene by scene type,
/// camera by movement type, and motion by animation kind (omitted when static).
pub fn caption_for_config(
    cfg: &SceneConfig,
    registry: &impl CaptionLookup,
    granularity: Granularity,
    tag_mode: TagMode,
) -> Result<ComposedCaption, CaptionError> {
    let object = fetch(registry, ElementKind::Object, &cfg.object_ref, granularity)?;
    let scene = fetch(registry, ElementKind::Scene, cfg.environment.scene_type.name(), granularity)?;
    let camera = fetch(registry, ElementKind::Camera, cfg.camera.movement_type.name(), granularity)?;
    let motion = match cfg.object_animation {
        ObjectAnimation::None => None,
        anim => Some(fetch(registry, ElementKind::Motion, anim.kind_name(), granularity)?),
    };
    compose_caption(object, scene, camera, motion, tag_mode)
}

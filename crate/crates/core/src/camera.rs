//! Pinhole cameras and per-frame trajectories for the eight movement types.
//!
//! Camera space follows the computer-vision convention: `x` right, `y` down,
//! `z` forward. The rotation maps world vectors into camera space, so its
//! rows are the camera's right, down and forward axes in world coordinates.

use crate::scene_config::{FocusPosition, FocusType, MovementType, SceneConfig};
use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SENSOR_HEIGHT_MM: f64 = 24.0;

/// Upper/Lower focus targets sit this many object radii above/below the center.
pub const FOCUS_OFFSET_RADII: f64 = 0.75;

pub fn world_up() -> Vector3<f64> {
    Vector3::z()
}

#[derive(Debug, Error, PartialEq)]
pub enum CameraError {
    #[error("camera position coincides with its target")]
    CoincidentTarget,
    #[error("view direction is parallel to the up vector")]
    DegenerateDirection,
    #[error("focal_from_coverage precondition violated: {0}")]
    Coverage(String),
    #[error("{0} cannot be combined with Follow focus: re-aiming would cancel the rotation")]
    ConfigConflict(MovementType),
    #[error("object radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("zoom drives the focal length to {0} mm at frame {1}")]
    NonPositiveFocal(f64, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PinholeCamera {
    pub position: Vector3<f64>,
    /// World to camera.
    pub rotation: Matrix3<f64>,
    pub focal_mm: f64,
    pub sensor_height_mm: f64,
}

impl PinholeCamera {
    pub fn right(&self) -> Vector3<f64> {
        self.rotation.row(0).transpose()
    }

    pub fn down(&self) -> Vector3<f64> {
        self.rotation.row(1).transpose()
    }

    pub fn forward(&self) -> Vector3<f64> {
        self.rotation.row(2).transpose()
    }

    /// Focal length in pixels for an image of the given height.
    pub fn focal_px(&self, height: u32) -> f64 {
        self.focal_mm * f64::from(height) / self.sensor_height_mm
    }

    pub fn to_camera(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * (p - self.position)
    }

    /// 3x4 projection matrix `K [R | -R c]` for a `width` x `height` image.
    pub fn projection_matrix(&self, width: u32, height: u32) -> nalgebra::Matrix3x4<f64> {
        let f = self.focal_px(height);
        let k = Matrix3::new(f, 0.0, f64::from(width) / 2.0, 0.0, f, f64::from(height) / 2.0, 0.0, 0.0, 1.0);
        let t = -(self.rotation * self.position);
        let mut rt = nalgebra::Matrix3x4::zeros();
        rt.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation);
        rt.set_column(3, &t);
        k * rt
    }
}

/// Rotation whose forward row points from `position` to `target`.
pub fn look_at(
    position: &Vector3<f64>,
    target: &Vector3<f64>,
    up: &Vector3<f64>,
) -> Result<Matrix3<f64>, CameraError> {
    let dir = target - position;
    let len = dir.norm();
    if len < 1e-12 {
        return Err(CameraError::CoincidentTarget);
    }
    let forward = dir / len;
    let side = forward.cross(up);
    if side.norm() < 1e-9 * up.norm().max(1.0) {
        return Err(CameraError::DegenerateDirection);
    }
    let right = side.normalize();
    let down = forward.cross(&right);
    Ok(Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]))
}

/// Focal length (mm) at which a sphere of `bounding_radius` seen from
/// `distance` spans `coverage` of the half image height (small-angle model).
pub fn focal_from_coverage(
    bounding_radius: f64,
    distance: f64,
    coverage: f64,
    sensor_height_mm: f64,
) -> Result<f64, CameraError> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(CameraError::Coverage(format!("coverage {coverage} outside (0, 1]")));
    }
    if !(bounding_radius > 0.0) {
        return Err(CameraError::Coverage(format!("radius {bounding_radius} must be positive")));
    }
    if !(distance > bounding_radius) {
        return Err(CameraError::Coverage(format!("distance {distance} must exceed radius {bounding_radius}")));
    }
    if !(sensor_height_mm > 0.0) {
        return Err(CameraError::Coverage(format!("sensor height {sensor_height_mm} must be positive")));
    }
    Ok(coverage * (sensor_height_mm / 2.0) * distance / bounding_radius)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CameraTrajectory {
    pub frames: Vec<PinholeCamera>,
    /// Intended focus point per frame (the frame-0 target for Fixed focus).
    pub focus_history: Vec<Vector3<f64>>,
}

impl CameraTrajectory {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn to_records(&self) -> Vec<PoseRecord> {
        self.frames
            .iter()
            .enumerate()
            .map(|(k, cam)| PoseRecord {
                frame: k,
                position: cam.position.into(),
                rotation: [0, 1, 2].map(|r| [0, 1, 2].map(|c| cam.rotation[(r, c)])),
                focal_mm: cam.focal_mm,
                focus: self.focus_history[k].into(),
            })
            .collect()
    }

    pub fn from_records(records: &[PoseRecord]) -> Self {
        let frames = records
            .iter()
            .map(|r| PinholeCamera {
                position: Vector3::from(r.position),
                rotation: Matrix3::from_fn(|i, j| r.rotation[i][j]),
                focal_mm: r.focal_mm,
                sensor_height_mm: SENSOR_HEIGHT_MM,
            })
            .collect();
        CameraTrajectory { frames, focus_history: records.iter().map(|r| Vector3::from(r.focus)).collect() }
    }
}

/// Serialized pose: row-major world-to-camera rotation, position, focal length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseRecord {
    pub frame: usize,
    pub position: [f64; 3],
    pub rotation: [[f64; 3]; 3],
    pub focal_mm: f64,
    pub focus: [f64; 3],
}

/// Rotation about the world vertical by `deg`, with whole turns reduced exactly.
fn yaw(deg: f64) -> Rotation3<f64> {
    let reduced = deg.rem_euclid(360.0);
    if reduced == 0.0 {
        Rotation3::identity()
    } else {
        Rotation3::from_axis_angle(&Vector3::z_axis(), reduced.to_radians())
    }
}

fn focus_offset(position: FocusPosition, radius: f64) -> Vector3<f64> {
    let dz = match position {
        FocusPosition::Upper => FOCUS_OFFSET_RADII * radius,
        FocusPosition::Center => 0.0,
        FocusPosition::Lower => -FOCUS_OFFSET_RADII * radius,
    };
    Vector3::new(0.0, 0.0, dz)
}

/// Realizes the camera spec of `cfg` as `n_frames` pinhole cameras.
///
/// Motion is uniform: frame `k` applies the fraction `k / (n_frames - 1)` of
/// `movement_value`. `object_center` is the object's center at time zero; it
/// moves with the config's translate animation.
pub fn generate_trajectory(
    cfg: &SceneConfig,
    object_center: &Vector3<f64>,
    object_radius: f64,
) -> Result<CameraTrajectory, CameraError> {
    if !(object_radius > 0.0 && object_radius.is_finite()) {
        return Err(CameraError::BadRadius(object_radius));
    }
    let spec = &cfg.camera;
    if spec.movement_type.rotates_view() && spec.focus_type == FocusType::Follow {
        return Err(CameraError::ConfigConflict(spec.movement_type));
    }
    let up = world_up();
    let offset = focus_offset(spec.focus_position, object_radius);
    let target_at = |k: usize| -> Vector3<f64> {
        object_center + Vector3::from(cfg.object_animation.offset_at(cfg.time_at(k))) + offset
    };

    let p0 = Vector3::from(spec.initial_position);
    let target0 = target_at(0);
    let r0 = look_at(&p0, &target0, &up)?;
    let d0 = (target0 - p0).norm();
    let focal0 = focal_from_coverage(object_radius, d0, spec.coverage, SENSOR_HEIGHT_MM)?;
    let right0 = r0.row(0).transpose();
    let down0 = r0.row(1).transpose();
    let forward0 = r0.row(2).transpose();

    let n = cfg.n_frames.max(1) as usize;
    let mut frames = Vec::with_capacity(n);
    let mut focus_history = Vec::with_capacity(n);
    for k in 0..n {
        let s = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
        let amount = s * spec.movement_value;
        let target_k = target_at(k);
        let aim = match spec.focus_type {
            FocusType::Follow => target_k,
            FocusType::Fixed => target0,
        };
        let mut focal = focal0;
        let (position, rotation) = match spec.movement_type {
            MovementType::Truck => {
                let p = p0 + right0 * amount;
                (p, look_at(&p, &aim, &up)?)
            }
            MovementType::Dolly => {
                let p = p0 + forward0 * amount;
                (p, look_at(&p, &aim, &up)?)
            }
            MovementType::Pedestal => {
                let p = p0 + up * amount;
                (p, look_at(&p, &aim, &up)?)
            }
            MovementType::Tilt => {
                let axis = Unit::new_normalize(right0);
                let rot = Rotation3::from_axis_angle(&axis, amount.to_radians());
                (p0, rotate_view(&r0, &rot))
            }
            MovementType::Pan => {
                let axis = Unit::new_normalize(-down0);
                let rot = Rotation3::from_axis_angle(&axis, amount.to_radians());
                (p0, rotate_view(&r0, &rot))
            }
            MovementType::Spin => {
                // Orbit the vertical axis through the aimed point.
                let pivot = aim;
                let p = pivot + yaw(amount) * (p0 - target0);
                (p, look_at(&p, &aim, &up)?)
            }
            MovementType::Following => {
                let p = p0 + (target_k - target0);
                (p, look_at(&p, &aim, &up)?)
            }
            MovementType::Zoom => {
                focal = focal0 + amount;
                if !(focal > 0.0) {
                    return Err(CameraError::NonPositiveFocal(focal, k));
                }
                (p0, look_at(&p0, &aim, &up)?)
            }
        };
        frames.push(PinholeCamera { position, rotation, focal_mm: focal, sensor_height_mm: SENSOR_HEIGHT_MM });
        focus_history.push(aim);
    }
    Ok(CameraTrajectory { frames, focus_history })
}

/// Rotates the camera's axes in world space by `rot`.
fn rotate_view(world_to_cam: &Matrix3<f64>, rot: &Rotation3<f64>) -> Matrix3<f64> {
    // Rows are camera axes in world coordinates; rotate each axis.
    world_to_cam * rot.matrix().transpose()
}

use super::MetricsError;
use crate::camera::{CameraTrajectory, PoseRecord};
use crate::render::{project_point, Mesh};
use crate::render::raster::NEAR;
use crate::seed::stream;
use nalgebra::Vector3;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observation {
    pub frame: usize,
    pub pixel: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Track {
    pub point_id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_point: Option<[f64; 3]>,
    pub observations: Vec<Observation>,
}

impl Track {
    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureTrackSet {
    pub width: u32,
    pub height: u32,
    pub cameras: Vec<PoseRecord>,
    pub tracks: Vec<Track>,
}

impl FeatureTrackSet {
    pub fn trajectory(&self) -> CameraTrajectory {
        CameraTrajectory::from_records(&self.cameras)
    }

    pub fn n_observations(&self) -> usize {
        self.tracks.iter().map(Track::len).sum()
    }

    /// Mean observations per track; zero for an empty set.
    pub fn mean_track_length(&self) -> f64 {
        if self.tracks.is_empty() {
            0.0
        } else {
            self.n_observations() as f64 / self.tracks.len() as f64
        }
    }

    /// Checks the structural invariants (used after reading external files).
    pub fn validate(&self) -> Result<(), MetricsError> {
        let n_frames = self.cameras.len();
        for t in &self.tracks {
            if t.len() < 2 {
                return Err(MetricsError::TooFewObservations(t.point_id));
            }
            for pair in t.observations.windows(2) {
                if pair[1].frame <= pair[0].frame {
                    return Err(MetricsError::UnorderedFrames { track: t.point_id });
                }
            }
            if let Some(o) = t.observations.iter().find(|o| o.frame >= n_frames) {
                return Err(MetricsError::UnknownFrame { track: t.point_id, frame: o.frame, n_frames });
            }
        }
        Ok(())
    }
}

/// Ground-truth stand-in for sequential feature matching over a static mesh.
///
/// Vertex `i` is observed in frame `k` iff it projects inside the image in
/// front of the near plane and belongs to at least one front-facing triangle.
/// Observations get isotropic Gaussian pixel noise drawn from
/// `stream(seed, i)`; tracks with fewer than two observations are dropped.
pub fn generate_tracks(
    mesh: &Mesh,
    trajectory: &CameraTrajectory,
    width: u32,
    height: u32,
    pixel_noise_sigma: f64,
    seed: u64,
) -> FeatureTrackSet {
    assert!(pixel_noise_sigma >= 0.0 && pixel_noise_sigma.is_finite(), "sigma must be finite and >= 0");
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertices.len()];
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        for &v in tri {
            incident[v].push(ti);
        }
    }
    let normals: Vec<Vector3<f64>> = mesh.triangles.iter().map(|t| mesh.normal(t)).collect();
    let (w, h) = (f64::from(width), f64::from(height));

    let tracks: Vec<Track> = (0..mesh.vertices.len())
        .into_par_iter()
        .filter_map(|i| {
            let p = &mesh.vertices[i];
            let mut rng = stream(seed, i as u64);
            let mut observations = Vec::new();
            for (k, cam) in trajectory.frames.iter().enumerate() {
                let front = incident[i].iter().any(|&ti| {
                    let a = mesh.vertices[mesh.triangles[ti][0]];
                    normals[ti].dot(&(a - cam.position)) < 0.0
                });
                let proj = project_point(cam, p, width, height);
                let [u, v] = proj.pixel;
                let inside = proj.depth > NEAR && (0.0..w).contains(&u) && (0.0..h).contains(&v);
                if front && inside {
                    let du: f64 = rng.sample(StandardNormal);
                    let dv: f64 = rng.sample(StandardNormal);
                    observations.push(Observation {
                        frame: k,
                        pixel: [u + pixel_noise_sigma * du, v + pixel_noise_sigma * dv],
                    });
                }
            }
            (observations.len() >= 2).then(|| Track { point_id: i, true_point: Some((*p).into()), observations })
        })
        .collect();
    FeatureTrackSet { width, height, cameras: trajectory.to_records(), tracks }
}

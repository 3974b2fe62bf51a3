use super::{FeatureTrackSet, MetricsError, Track};
use crate::camera::PinholeCamera;
use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of lowest-error tracks kept for the restricted reprojection error.
pub const TOP_K: usize = 1000;

/// Relative singular-value gap below which the DLT system counts as rank deficient.
const RANK_TOL: f64 = 1e-12;
const MIN_BASELINE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconMetrics {
    /// Triangulated tracks.
    #[serde(rename = "N")]
    pub n_points: usize,
    /// Mean observations per triangulated track.
    #[serde(rename = "T")]
    pub mean_track_length: f64,
    /// Mean pixel reprojection error over all observations.
    #[serde(rename = "eps_proj")]
    pub reproj_error: f64,
    /// Same mean restricted to the `TOP_K` tracks with the smallest per-track mean error.
    #[serde(rename = "eps_proj_top1000")]
    pub reproj_error_top1000: f64,
    pub n_degenerate: usize,
}

impl fmt::Display for ReconMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>8} {:>8} {:>12} {:>12}", "N ↑", "T ↓", "ε_proj ↓", "ε̂_proj ↓")?;
        write!(
            f,
            "{:>8} {:>8.3} {:>12.6} {:>12.6}",
            self.n_points, self.mean_track_length, self.reproj_error, self.reproj_error_top1000
        )
    }
}

/// Pixel projection of `p`; `None` when the point is on or behind the camera plane.
pub fn reproject(camera: &PinholeCamera, p: &Vector3<f64>, width: u32, height: u32) -> Option<[f64; 2]> {
    let proj = crate::render::project_point(camera, p, width, height);
    (!proj.behind).then_some(proj.pixel)
}

/// Linear (DLT) triangulation over every observing frame.
///
/// A solution behind any observing camera is rejected.
///
/// Observations are mapped to normalized image coordinates and each pair of
/// equations is scaled to unit norm before the SVD; the solution is the right
/// singular vector of the smallest singular value.
pub fn triangulate(track: &Track, cameras: &[PinholeCamera], width: u32, height: u32) -> Result<Vector3<f64>, MetricsError> {
    let id = track.point_id;
    if track.len() < 2 {
        return Err(MetricsError::TooFewObservations(id));
    }
    let mut used = Vec::with_capacity(track.len());
    for o in &track.observations {
        let cam = cameras.get(o.frame).ok_or(MetricsError::UnknownFrame {
            track: id,
            frame: o.frame,
            n_frames: cameras.len(),
        })?;
        used.push((cam, o.pixel));
    }
    let baseline = used
        .iter()
        .flat_map(|(a, _)| used.iter().map(move |(b, _)| (a.position - b.position).norm()))
        .fold(0.0, f64::max);
    if baseline < MIN_BASELINE {
        return Err(MetricsError::Degenerate(id));
    }

    let mut a = DMatrix::<f64>::zeros(2 * used.len(), 4);
    for (i, (cam, [u, v])) in used.iter().enumerate() {
        let f = cam.focal_px(height);
        let xn = (u - f64::from(width) / 2.0) / f;
        let yn = (v - f64::from(height) / 2.0) / f;
        let r = cam.rotation;
        let t = -(r * cam.position);
        let row = |k: usize| [r[(k, 0)], r[(k, 1)], r[(k, 2)], t[k]];
        let (p1, p2, p3) = (row(0), row(1), row(2));
        for (j, coord, pk) in [(0, xn, p1), (1, yn, p2)] {
            let eq: Vec<f64> = (0..4).map(|c| coord * p3[c] - pk[c]).collect();
            let norm = eq.iter().map(|e| e * e).sum::<f64>().sqrt();
            for c in 0..4 {
                a[(2 * i + j, c)] = if norm > 0.0 { eq[c] / norm } else { 0.0 };
            }
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let s = &svd.singular_values;
    let largest = s[order[order.len() - 1]];
    if order.len() < 4 || s[order[1]] <= RANK_TOL * largest {
        return Err(MetricsError::Degenerate(id));
    }
    let x = v_t.row(order[0]);
    if x[3].abs() <= RANK_TOL * x.norm() {
        return Err(MetricsError::Degenerate(id));
    }
    let point = Vector3::new(x[0] / x[3], x[1] / x[3], x[2] / x[3]);
    // Cheirality: noisy rays under a short baseline can meet behind a camera.
    if used.iter().any(|(cam, _)| reproject(cam, &point, width, height).is_none()) {
        return Err(MetricsError::BehindCamera(id));
    }
    Ok(point)
}

/// Per-observation pixel errors of one triangulated track.
fn track_errors(track: &Track, point: &Vector3<f64>, cameras: &[PinholeCamera], w: u32, h: u32) -> Vec<f64> {
    track
        .observations
        .iter()
        .map(|o| {
            let [u, v] = reproject(&cameras[o.frame], point, w, h).expect("triangulation checks cheirality");
            ((u - o.pixel[0]).powi(2) + (v - o.pixel[1]).powi(2)).sqrt()
        })
        .collect()
}

/// Table-style reconstruction statistics. Tracks that fail to triangulate
/// (degenerate or behind a camera) are skipped and counted in
/// `n_degenerate`; they do not contribute to `N`.
pub fn recon_metrics(set: &FeatureTrackSet) -> Result<ReconMetrics, MetricsError> {
    if set.tracks.is_empty() {
        return Err(MetricsError::Empty);
    }
    set.validate()?;
    let cameras = set.trajectory().frames;
    let (w, h) = (set.width, set.height);
    let per_track: Vec<Option<Vec<f64>>> = set
        .tracks
        .par_iter()
        .map(|t| triangulate(t, &cameras, w, h).ok().map(|p| track_errors(t, &p, &cameras, w, h)))
        .collect();
    let solved: Vec<Vec<f64>> = per_track.iter().flatten().cloned().collect();
    let n_degenerate = per_track.len() - solved.len();
    if solved.is_empty() {
        return Err(MetricsError::NoReconstruction(n_degenerate));
    }

    let n_obs: usize = solved.iter().map(Vec::len).sum();
    let total: f64 = solved.iter().flatten().sum();
    let reproj_error = total / n_obs as f64;

    let reproj_error_top1000 = if solved.len() <= TOP_K {
        reproj_error
    } else {
        let mut ranked: Vec<(f64, &Vec<f64>)> =
            solved.iter().map(|e| (e.iter().sum::<f64>() / e.len() as f64, e)).collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
        let kept = &ranked[..TOP_K];
        let sum: f64 = kept.iter().flat_map(|(_, e)| e.iter()).sum();
        let count: usize = kept.iter().map(|(_, e)| e.len()).sum();
        // Selection by per-track mean bounds this by the full mean; clamp
        // away summation-order rounding.
        (sum / count as f64).min(reproj_error)
    };

    Ok(ReconMetrics {
        n_points: solved.len(),
        mean_track_length: n_obs as f64 / solved.len() as f64,
        reproj_error,
        reproj_error_top1000,
        n_degenerate,
    })
}

use super::MetricsError;
use serde::{Deserialize, Serialize};

pub const KEYPOINTS: usize = 17;

/// Published per-keypoint confidences (gym, dance) shown next to a measured
/// value for context only.
pub const REFERENCE_CONF: [(&str, f64); 2] = [("gym", 0.791), ("dance", 0.837)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; KEYPOINTS]>", into = "Vec<[f64; KEYPOINTS]>")]
pub struct PoseConfidenceGrid {
    frames: Vec<[f64; KEYPOINTS]>,
}

impl PoseConfidenceGrid {
    pub fn new(frames: Vec<[f64; KEYPOINTS]>) -> Result<Self, MetricsError> {
        for (frame, row) in frames.iter().enumerate() {
            for (keypoint, &value) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    return Err(MetricsError::ConfidenceRange { frame, keypoint, value });
                }
            }
        }
        Ok(PoseConfidenceGrid { frames })
    }

    pub fn frames(&self) -> &[[f64; KEYPOINTS]] {
        &self.frames
    }
}

impl TryFrom<Vec<[f64; KEYPOINTS]>> for PoseConfidenceGrid {
    type Error = MetricsError;

    fn try_from(frames: Vec<[f64; KEYPOINTS]>) -> Result<Self, Self::Error> {
        PoseConfidenceGrid::new(frames)
    }
}

impl From<PoseConfidenceGrid> for Vec<[f64; KEYPOINTS]> {
    fn from(g: PoseConfidenceGrid) -> Self {
        g.frames
    }
}

/// Unweighted mean over all (frame, keypoint) cells.
pub fn pose_confidence(grid: &PoseConfidenceGrid) -> Result<f64, MetricsError> {
    if grid.frames.is_empty() {
        return Err(MetricsError::EmptyGrid);
    }
    let sum: f64 = grid.frames.iter().flatten().sum();
    Ok((sum / (grid.frames.len() * KEYPOINTS) as f64).clamp(0.0, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoseReport {
    pub eps_conf: f64,
    pub n_frames: usize,
    pub reference: Vec<(String, f64)>,
}

pub fn pose_report(grid: &PoseConfidenceGrid) -> Result<PoseReport, MetricsError> {
    Ok(PoseReport {
        eps_conf: pose_confidence(grid)?,
        n_frames: grid.frames.len(),
        reference: REFERENCE_CONF.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
    })
}

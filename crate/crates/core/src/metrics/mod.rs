//! Physical-fidelity measurements: oracle feature tracks, DLT triangulation,
//! reprojection statistics, and pose-confidence aggregation.

mod pose;
mod recon;
mod tracks;

pub use pose::{pose_confidence, pose_report, PoseConfidenceGrid, PoseReport, KEYPOINTS, REFERENCE_CONF};
pub use recon::{recon_metrics, reproject, triangulate, ReconMetrics, TOP_K};
pub use tracks::{generate_tracks, FeatureTrackSet, Observation, Track};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("track {0} has fewer than two observations")]
    TooFewObservations(usize),
    #[error("track {track} references frame {frame} but only {n_frames} cameras exist")]
    UnknownFrame { track: usize, frame: usize, n_frames: usize },
    #[error("track {track}: observation frames must strictly increase")]
    UnorderedFrames { track: usize },
    #[error("track {0}: degenerate geometry (no parallax or rank-deficient system)")]
    Degenerate(usize),
    #[error("track {0}: triangulated point lies behind an observing camera")]
    BehindCamera(usize),
    #[error("track set is empty")]
    Empty,
    #[error("no track could be triangulated ({0} degenerate)")]
    NoReconstruction(usize),
    #[error("pose-confidence grid is empty")]
    EmptyGrid,
    #[error("confidence at frame {frame}, keypoint {keypoint} is {value}, outside [0, 1]")]
    ConfidenceRange { frame: usize, keypoint: usize, value: f64 },
}

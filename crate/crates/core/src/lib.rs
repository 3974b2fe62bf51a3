//! Procedural synthetic video data, toy flow matching with SimDrop guidance,
//! and physical-fidelity reconstruction metrics.

pub mod camera;
pub mod caption;
pub mod flow;
pub mod guidance;
pub mod metrics;
pub mod mixer;
pub mod render;
pub mod sampler;
pub mod scene_config;
pub mod seed;

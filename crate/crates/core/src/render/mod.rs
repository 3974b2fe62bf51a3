//! Mesh handling, software rasterization, frame I/O and engine script export.

pub mod mesh;
pub mod ppm;
pub mod raster;
pub mod script;

pub use mesh::{Mesh, MeshError};
pub use raster::{posed_mesh, project_point, render_frame, render_video, shade, Frame, Projection};
pub use script::emit_engine_script;

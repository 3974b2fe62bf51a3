//! Flat-shaded, z-buffered triangle rasterization.
//!
//! Pixel `(i, j)` covers `[i, i+1) x [j, j+1)` and is sampled at its center;
//! the principal point is `(width / 2, height / 2)`. Depth is compared as
//! inverse camera-space depth, interpolated linearly in screen space.

use super::mesh::Mesh;
use crate::camera::{generate_trajectory, CameraError, PinholeCamera};
use crate::scene_config::{kelvin_rgb, EnvSpec, LightingSpec, RenderQuality, SceneConfig, SceneType};
use nalgebra::{Rotation3, Vector3};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

/// Near clipping plane, camera-space depth.
pub const NEAR: f64 = 1e-3;

/// Half extent of the cubic room that surrounds Basic scenes, centered on the anchor.
pub const ROOM_HALF_EXTENT: f64 = 15.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub width: u32,
    pub height: u32,
    /// Row-major RGB8.
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let pixels = rgb.iter().copied().cycle().take(width as usize * height as usize * 3).collect();
        Frame { width, height, pixels }
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width as usize + x) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Hex SHA-256 of the pixel buffer, prefixed by the dimensions.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.width.to_le_bytes());
        h.update(self.height.to_le_bytes());
        h.update(&self.pixels);
        hex::encode(h.finalize())
    }

    /// Nearest-neighbour resize.
    pub fn upscale_nearest(&self, width: u32, height: u32) -> Frame {
        let mut out = Frame::filled(width, height, [0; 3]);
        for y in 0..height {
            let sy = (u64::from(y) * u64::from(self.height) / u64::from(height)) as u32;
            for x in 0..width {
                let sx = (u64::from(x) * u64::from(self.width) / u64::from(width)) as u32;
                out.set(x as usize, y as usize, self.get(sx, sy));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projection {
    /// Pixel coordinates (x right, y down).
    pub pixel: [f64; 2],
    /// Camera-space depth along the forward axis.
    pub depth: f64,
    /// True when the point is on or behind the camera plane.
    pub behind: bool,
}

pub fn project_point(camera: &PinholeCamera, p: &Vector3<f64>, width: u32, height: u32) -> Projection {
    let c = camera.to_camera(p);
    let f = camera.focal_px(height);
    let pixel = [f64::from(width) / 2.0 + f * c.x / c.z, f64::from(height) / 2.0 + f * c.y / c.z];
    Projection { pixel, depth: c.z, behind: c.z <= 0.0 }
}

/// Pre-clamp Lambertian radiance of a flat facet:
/// `base * (ambient + sum_i intensity_i * max(0, n.l_i) * kelvin_rgb(T_i))`.
pub fn shade(base: [f64; 3], normal: &Vector3<f64>, point: &Vector3<f64>, lighting: &LightingSpec) -> [f64; 3] {
    let mut gain = [lighting.ambient_intensity; 3];
    for light in &lighting.lights {
        let to_light = Vector3::from(light.position) - point;
        let dist = to_light.norm();
        if dist == 0.0 {
            continue;
        }
        let lambert = normal.dot(&(to_light / dist)).max(0.0);
        let tint = kelvin_rgb(light.color_temp);
        for c in 0..3 {
            gain[c] += light.intensity * lambert * tint[c];
        }
    }
    [base[0] * gain[0], base[1] * gain[1], base[2] * gain[2]]
}

pub fn to_rgb8(color: [f64; 3]) -> [u8; 3] {
    color.map(|c| (c.clamp(0.0, 1.0) * 255.0).round() as u8)
}

/// Triangle ready for rasterization: world-space corners and final color.
struct Facet {
    corners: [Vector3<f64>; 3],
    rgb: [u8; 3],
}

/// Camera-space vertex after clipping, with its screen position.
#[derive(Clone, Copy)]
struct ScreenVertex {
    x: f64,
    y: f64,
    inv_z: f64,
}

struct Target {
    frame: Frame,
    inv_depth: Vec<f64>,
}

impl Target {
    fn draw(&mut self, camera: &PinholeCamera, facet: &Facet) {
        let (w, h) = (self.frame.width, self.frame.height);
        let cam: Vec<Vector3<f64>> = facet.corners.iter().map(|p| camera.to_camera(p)).collect();
        let clipped = clip_near(&cam);
        if clipped.len() < 3 {
            return;
        }
        let f = camera.focal_px(h);
        let (cx, cy) = (f64::from(w) / 2.0, f64::from(h) / 2.0);
        let screen: Vec<ScreenVertex> = clipped
            .iter()
            .map(|c| ScreenVertex { x: cx + f * c.x / c.z, y: cy + f * c.y / c.z, inv_z: 1.0 / c.z })
            .collect();
        for k in 1..screen.len() - 1 {
            self.fill([screen[0], screen[k], screen[k + 1]], facet.rgb);
        }
    }

    fn fill(&mut self, v: [ScreenVertex; 3], rgb: [u8; 3]) {
        let area = edge(&v[0], &v[1], v[2].x, v[2].y);
        if area.abs() < 1e-12 {
            return;
        }
        let (w, h) = (self.frame.width as f64, self.frame.height as f64);
        let min_x = v.iter().map(|p| p.x).fold(f64::INFINITY, f64::min).floor().max(0.0);
        let max_x = v.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max).ceil().min(w);
        let min_y = v.iter().map(|p| p.y).fold(f64::INFINITY, f64::min).floor().max(0.0);
        let max_y = v.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max).ceil().min(h);
        if min_x >= max_x || min_y >= max_y {
            return;
        }
        for py in min_y as usize..max_y as usize {
            let sy = py as f64 + 0.5;
            for px in min_x as usize..max_x as usize {
                let sx = px as f64 + 0.5;
                let b0 = edge(&v[1], &v[2], sx, sy) / area;
                let b1 = edge(&v[2], &v[0], sx, sy) / area;
                let b2 = edge(&v[0], &v[1], sx, sy) / area;
                if b0 < 0.0 || b1 < 0.0 || b2 < 0.0 {
                    continue;
                }
                let inv_z = b0 * v[0].inv_z + b1 * v[1].inv_z + b2 * v[2].inv_z;
                let idx = py * self.frame.width as usize + px;
                if inv_z > self.inv_depth[idx] {
                    self.inv_depth[idx] = inv_z;
                    self.frame.set(px, py, rgb);
                }
            }
        }
    }
}

fn edge(a: &ScreenVertex, b: &ScreenVertex, x: f64, y: f64) -> f64 {
    (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x)
}

/// Sutherland-Hodgman against the plane `z = NEAR`.
fn clip_near(poly: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
    let mut out = Vec::with_capacity(4);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (a_in, b_in) = (a.z >= NEAR, b.z >= NEAR);
        if a_in {
            out.push(a);
        }
        if a_in != b_in {
            let t = (NEAR - a.z) / (b.z - a.z);
            out.push(a + (b - a) * t);
        }
    }
    out
}

fn background_rgb(env: &EnvSpec) -> [u8; 3] {
    match env.scene_type {
        SceneType::Empty => {
            let c = env.background_color.unwrap_or([0.0, 0.0, 0.0, 1.0]);
            to_rgb8([c[0], c[1], c[2]])
        }
        // Only visible through gaps; walls normally cover the whole view.
        SceneType::Basic => to_rgb8(env.scene_color.unwrap_or([0.0; 3])),
    }
}

/// Inward-facing walls of the room, each quad shaded at its center.
fn room_facets(env: &EnvSpec, lighting: &LightingSpec) -> Vec<Facet> {
    let Some(color) = env.scene_color else { return Vec::new() };
    let h = ROOM_HALF_EXTENT;
    let mut facets = Vec::with_capacity(12);
    for axis in 0..3 {
        for sign in [-1.0, 1.0] {
            let mut normal = Vector3::zeros();
            normal[axis] = -sign;
            let center = -normal * h;
            let (u_axis, v_axis) = ((axis + 1) % 3, (axis + 2) % 3);
            let mut u = Vector3::zeros();
            u[u_axis] = h;
            let mut v = Vector3::zeros();
            v[v_axis] = h;
            let quad = [center - u - v, center + u - v, center + u + v, center - u + v];
            // Wind so the geometric normal matches the inward normal.
            let quad = if (quad[1] - quad[0]).cross(&(quad[2] - quad[0])).dot(&normal) > 0.0 {
                quad
            } else {
                [quad[0], quad[3], quad[2], quad[1]]
            };
            let rgb = to_rgb8(shade(color, &normal, &center, lighting));
            facets.push(Facet { corners: [quad[0], quad[1], quad[2]], rgb });
            facets.push(Facet { corners: [quad[0], quad[2], quad[3]], rgb });
        }
    }
    facets
}

/// Renders `mesh` (world coordinates) into a `width` x `height` frame.
pub fn render_frame(
    mesh: &Mesh,
    camera: &PinholeCamera,
    lighting: &LightingSpec,
    env: &EnvSpec,
    width: u32,
    height: u32,
) -> Frame {
    let n = width as usize * height as usize;
    let mut target = Target { frame: Frame::filled(width, height, background_rgb(env)), inv_depth: vec![0.0; n] };
    let mut facets = room_facets(env, lighting);
    for (tri, base) in mesh.triangles.iter().zip(&mesh.colors) {
        let corners = tri.map(|i| mesh.vertices[i]);
        let normal = (corners[1] - corners[0]).cross(&(corners[2] - corners[0]));
        // Back-face culling.
        if normal.dot(&(corners[0] - camera.position)) >= 0.0 {
            continue;
        }
        let normal = normal.normalize();
        let centroid = (corners[0] + corners[1] + corners[2]) / 3.0;
        facets.push(Facet { corners, rgb: to_rgb8(shade(*base, &normal, &centroid, lighting)) });
    }
    for facet in &facets {
        target.draw(camera, facet);
    }
    target.frame
}

/// The mesh posed at frame `k`: spun about its vertical center axis, then translated.
pub fn posed_mesh(cfg: &SceneConfig, mesh: &Mesh, k: usize) -> Mesh {
    let t = cfg.time_at(k);
    let (center, _) = mesh.bounding_sphere();
    let offset = Vector3::from(cfg.object_animation.offset_at(t));
    let yaw = cfg.object_animation.yaw_deg_at(t).rem_euclid(360.0);
    if yaw == 0.0 {
        return mesh.map_vertices(|v| v + offset);
    }
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), yaw.to_radians());
    mesh.map_vertices(|v| center + rot * (v - center) + offset)
}

/// Renders every frame of `cfg`. Low quality renders at half resolution and
/// upscales with nearest-neighbour sampling.
pub fn render_video(cfg: &SceneConfig, mesh: &Mesh) -> Result<Vec<Frame>, CameraError> {
    let (center, radius) = mesh.bounding_sphere();
    let trajectory = generate_trajectory(cfg, &center, radius)?;
    let (w, h) = (cfg.render.width, cfg.render.height);
    let (rw, rh) = match cfg.render.quality {
        RenderQuality::High => (w, h),
        RenderQuality::Low => ((w / 2).max(1), (h / 2).max(1)),
    };
    let frames = trajectory
        .frames
        .par_iter()
        .enumerate()
        .map(|(k, camera)| {
            let posed = posed_mesh(cfg, mesh, k);
            let frame = render_frame(&posed, camera, &cfg.lighting, &cfg.environment, rw, rh);
            if (rw, rh) == (w, h) {
                frame
            } else {
                frame.upscale_nearest(w, h)
            }
        })
        .collect();
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::camera::{focal_from_coverage, look_at, SENSOR_HEIGHT_MM};
    use crate::scene_config::PointLight;

    fn camera_at(position: Vector3<f64>, target: Vector3<f64>, focal_mm: f64) -> PinholeCamera {
        PinholeCamera {
            rotation: look_at(&position, &target, &Vector3::z()).unwrap(),
            position,
            focal_mm,
            sensor_height_mm: SENSOR_HEIGHT_MM,
        }
    }

    fn black() -> EnvSpec {
        EnvSpec::empty([0.0, 0.0, 0.0, 1.0])
    }

    fn white_light() -> LightingSpec {
        LightingSpec {
            lights: vec![PointLight { position: [0.0, -10.0, 0.0], color_temp: 6600.0, intensity: 0.5 }],
            ambient_intensity: 0.0,
        }
    }

    #[test]
    fn on_axis_point_projects_to_center() {
        let cam = camera_at(Vector3::new(0.0, -5.0, 0.0), Vector3::zeros(), 35.0);
        let p = project_point(&cam, &Vector3::zeros(), 64, 48);
        assert!((p.pixel[0] - 32.0).abs() < 1e-9 && (p.pixel[1] - 24.0).abs() < 1e-9);
        assert!((p.depth - 5.0).abs() < 1e-12);
        assert!(!p.behind);
        assert!(project_point(&cam, &Vector3::new(0.0, -8.0, 0.0), 64, 48).behind);
    }

    #[test]
    fn coverage_offset_matches_focal_formula() {
        // Forward arithmetic: offset = f_px * r / d with f_px = focal * H / sensor.
        for (r, d, c, height) in [(1.0, 10.0, 0.5, 48u32), (0.5, 3.0, 0.9, 480), (2.0, 7.5, 0.25, 101)] {
            let focal = focal_from_coverage(r, d, c, SENSOR_HEIGHT_MM).unwrap();
            let cam = camera_at(Vector3::new(0.0, -d, 0.0), Vector3::zeros(), focal);
            let p = project_point(&cam, &(cam.right() * r), 64, height);
            let expected = c * f64::from(height) / 2.0;
            assert!((p.pixel[0] - 32.0 - expected).abs() < 1e-6, "{} vs {expected}", p.pixel[0] - 32.0);
        }
    }

    #[test]
    fn empty_mesh_gives_uniform_background() {
        let cam = camera_at(Vector3::new(0.0, -5.0, 0.0), Vector3::zeros(), 35.0);
        let env = EnvSpec::empty([0.2, 0.4, 0.6, 0.5]);
        let frame = render_frame(&Mesh::default(), &cam, &white_light(), &env, 16, 12);
        assert_eq!(frame, Frame::filled(16, 12, to_rgb8([0.2, 0.4, 0.6])));
    }

    #[test]
    fn back_facing_triangle_is_culled() {
        let cam = camera_at(Vector3::new(0.0, -5.0, 0.0), Vector3::zeros(), 35.0);
        // Normal (b-a)x(c-a) = +y points away from the camera at -y.
        let verts = vec![Vector3::new(-1.0, 0.0, -1.0), Vector3::new(0.0, 0.0, 1.0), Vector3::new(1.0, 0.0, -1.0)];
        let away = Mesh::uniform(verts.clone(), vec![[0, 1, 2]], [1.0; 3]);
        let frame = render_frame(&away, &cam, &white_light(), &black(), 32, 32);
        assert_eq!(frame, Frame::filled(32, 32, [0; 3]));
        let toward = Mesh::uniform(verts, vec![[0, 2, 1]], [1.0; 3]);
        let frame = render_frame(&toward, &cam, &white_light(), &black(), 32, 32);
        assert_ne!(frame.get(16, 16), [0; 3]);
    }

    #[test]
    fn near_plane_clipping_keeps_visible_part() {
        // A floor quad that extends behind the camera.
        let cam = camera_at(Vector3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 5.0, 0.0), 20.0);
        let verts = vec![
            Vector3::new(-5.0, -5.0, 0.0),
            Vector3::new(5.0, -5.0, 0.0),
            Vector3::new(5.0, 20.0, 0.0),
            Vector3::new(-5.0, 20.0, 0.0),
        ];
        let floor = Mesh::uniform(verts, vec![[0, 1, 2], [0, 2, 3]], [1.0; 3]);
        let lighting = LightingSpec { lights: vec![], ambient_intensity: 1.0 };
        let frame = render_frame(&floor, &cam, &lighting, &black(), 32, 32);
        // Bottom rows see the floor, the top row sees the sky.
        assert_eq!(frame.get(16, 31), [255; 3]);
        assert_eq!(frame.get(16, 0), [0; 3]);
    }

    #[test]
    fn shading_is_linear_in_intensity() {
        let n = Vector3::new(0.0, -1.0, 0.0);
        let p = Vector3::zeros();
        let mut lighting = white_light();
        lighting.lights.push(PointLight { position: [3.0, -3.0, 2.0], color_temp: 3000.0, intensity: 0.2 });
        let a = shade([0.5, 0.4, 0.3], &n, &p, &lighting);
        for l in &mut lighting.lights {
            l.intensity *= 2.0;
        }
        let b = shade([0.5, 0.4, 0.3], &n, &p, &lighting);
        for c in 0..3 {
            assert!((b[c] - 2.0 * a[c]).abs() < 1e-15);
        }
    }

    #[test]
    fn nearest_upscale_duplicates_pixels() {
        let mut f = Frame::filled(2, 1, [0; 3]);
        f.set(1, 0, [9, 9, 9]);
        let up = f.upscale_nearest(4, 2);
        assert_eq!(up.get(0, 1), [0; 3]);
        assert_eq!(up.get(1, 0), [0; 3]);
        assert_eq!(up.get(2, 0), [9; 3]);
        assert_eq!(up.get(3, 1), [9; 3]);
    }
}

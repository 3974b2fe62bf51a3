//! Triangle meshes: procedural primitives and an OBJ-subset loader.
//!
//! Triangles wind counter-clockwise seen from outside, so
//! `(b - a) x (c - a)` is the outward normal.

use nalgebra::Vector3;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

pub const DEFAULT_COLOR: [f64; 3] = [0.75, 0.75, 0.75];

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("obj line {line}: {message}")]
    Obj { line: usize, message: String },
    #[error("unknown builtin mesh `{0}` (expected cube, sphere, torus or cylinder)")]
    UnknownBuiltin(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub colors: Vec<[f64; 3]>,
}

impl Mesh {
    /// Builds a mesh, dropping zero-area triangles. Indices must be in range.
    pub fn new(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>, colors: Vec<[f64; 3]>) -> Self {
        assert_eq!(triangles.len(), colors.len(), "one color per triangle");
        let n = vertices.len();
        let (triangles, colors) = triangles
            .into_iter()
            .zip(colors)
            .inspect(|(t, _)| assert!(t.iter().all(|&i| i < n), "triangle index out of range"))
            .filter(|(t, _)| triangle_area(&vertices, t) > 1e-12)
            .unzip();
        Mesh { vertices, triangles, colors }
    }

    pub fn uniform(vertices: Vec<Vector3<f64>>, triangles: Vec<[usize; 3]>, color: [f64; 3]) -> Self {
        let colors = vec![color; triangles.len()];
        Mesh::new(vertices, triangles, colors)
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Outward unit normal of `tri`.
    pub fn normal(&self, tri: &[usize; 3]) -> Vector3<f64> {
        let [a, b, c] = tri.map(|i| self.vertices[i]);
        (b - a).cross(&(c - a)).normalize()
    }

    /// Center of the axis-aligned bounds and the radius of the enclosing sphere about it.
    pub fn bounding_sphere(&self) -> (Vector3<f64>, f64) {
        if self.vertices.is_empty() {
            return (Vector3::zeros(), 0.0);
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            lo = lo.inf(v);
            hi = hi.sup(v);
        }
        let center = (lo + hi) / 2.0;
        let radius = self.vertices.iter().map(|v| (v - center).norm()).fold(0.0, f64::max);
        (center, radius)
    }

    /// Copy with every vertex mapped through `f`.
    pub fn map_vertices(&self, f: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Mesh {
        Mesh {
            vertices: self.vertices.iter().map(f).collect(),
            triangles: self.triangles.clone(),
            colors: self.colors.clone(),
        }
    }

    pub fn cube(side: f64, color: [f64; 3]) -> Mesh {
        let h = side / 2.0;
        let vertices = (0..8)
            .map(|i| {
                Vector3::new(
                    if i & 1 == 0 { -h } else { h },
                    if i & 2 == 0 { -h } else { h },
                    if i & 4 == 0 { -h } else { h },
                )
            })
            .collect();
        // Quads listed counter-clockwise from outside.
        let quads = [
            [0, 2, 3, 1], // -z
            [4, 5, 7, 6], // +z
            [0, 1, 5, 4], // -y
            [2, 6, 7, 3], // +y
            [0, 4, 6, 2], // -x
            [1, 3, 7, 5], // +x
        ];
        let triangles = quads.iter().flat_map(|q| [[q[0], q[1], q[2]], [q[0], q[2], q[3]]]).collect();
        Mesh::uniform(vertices, triangles, color)
    }

    pub fn uv_sphere(radius: f64, stacks: usize, slices: usize, color: [f64; 3]) -> Mesh {
        assert!(stacks >= 2 && slices >= 3);
        let mut vertices = vec![Vector3::new(0.0, 0.0, radius)];
        for i in 1..stacks {
            let theta = PI * i as f64 / stacks as f64;
            for j in 0..slices {
                let phi = TAU * j as f64 / slices as f64;
                vertices.push(radius * Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()));
            }
        }
        vertices.push(Vector3::new(0.0, 0.0, -radius));
        let south = vertices.len() - 1;
        let ring = |i: usize, j: usize| 1 + (i - 1) * slices + (j % slices);
        let mut triangles = Vec::new();
        for j in 0..slices {
            triangles.push([0, ring(1, j), ring(1, j + 1)]);
        }
        for i in 1..stacks - 1 {
            for j in 0..slices {
                let (a, b, c, d) = (ring(i, j), ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        for j in 0..slices {
            triangles.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
        }
        Mesh::uniform(vertices, triangles, color)
    }

    pub fn torus(major: f64, minor: f64, rings: usize, sides: usize, color: [f64; 3]) -> Mesh {
        let mut vertices = Vec::with_capacity(rings * sides);
        for i in 0..rings {
            let u = TAU * i as f64 / rings as f64;
            for j in 0..sides {
                let v = TAU * j as f64 / sides as f64;
                let r = major + minor * v.cos();
                vertices.push(Vector3::new(r * u.cos(), r * u.sin(), minor * v.sin()));
            }
        }
        let idx = |i: usize, j: usize| (i % rings) * sides + (j % sides);
        let mut triangles = Vec::with_capacity(2 * rings * sides);
        for i in 0..rings {
            for j in 0..sides {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        Mesh::uniform(vertices, triangles, color)
    }

    pub fn cylinder(radius: f64, height: f64, slices: usize, color: [f64; 3]) -> Mesh {
        let h = height / 2.0;
        let mut vertices = Vec::with_capacity(2 * slices + 2);
        for j in 0..slices {
            let phi = TAU * j as f64 / slices as f64;
            vertices.push(Vector3::new(radius * phi.cos(), radius * phi.sin(), -h));
            vertices.push(Vector3::new(radius * phi.cos(), radius * phi.sin(), h));
        }
        let bottom = vertices.len();
        vertices.push(Vector3::new(0.0, 0.0, -h));
        let top = vertices.len();
        vertices.push(Vector3::new(0.0, 0.0, h));
        let lo = |j: usize| 2 * (j % slices);
        let hi = |j: usize| 2 * (j % slices) + 1;
        let mut triangles = Vec::with_capacity(4 * slices);
        for j in 0..slices {
            triangles.push([lo(j), lo(j + 1), hi(j + 1)]);
            triangles.push([lo(j), hi(j + 1), hi(j)]);
            triangles.push([bottom, lo(j + 1), lo(j)]);
            triangles.push([top, hi(j), hi(j + 1)]);
        }
        Mesh::uniform(vertices, triangles, color)
    }

    /// Procedural stand-ins for asset-library objects, each with bounding radius near 1.
    pub fn builtin(name: &str) -> Result<Mesh, MeshError> {
        match name {
            "cube" => Ok(Mesh::cube(1.2, [0.85, 0.35, 0.25])),
            "sphere" => Ok(Mesh::uv_sphere(1.0, 16, 32, [0.3, 0.55, 0.85])),
            "torus" => Ok(Mesh::torus(0.7, 0.3, 32, 16, [0.9, 0.75, 0.3])),
            "cylinder" => Ok(Mesh::cylinder(0.6, 1.4, 32, [0.4, 0.8, 0.45])),
            other => Err(MeshError::UnknownBuiltin(other.to_string())),
        }
    }

    /// Parses `v` and `f` lines; everything else is ignored. Polygons are
    /// fan-triangulated, `v/vt/vn` references keep only the vertex index, and
    /// negative indices count back from the latest vertex.
    pub fn from_obj(text: &str, color: [f64; 3]) -> Result<Mesh, MeshError> {
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let err = |message: String| MeshError::Obj { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            let mut tokens = content.split_whitespace();
            match tokens.next() {
                Some("v") => {
                    let coords: Vec<f64> = tokens
                        .take(3)
                        .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad coordinate `{t}`: {e}"))))
                        .collect::<Result<_, _>>()?;
                    if coords.len() != 3 {
                        return Err(err("vertex needs three coordinates".into()));
                    }
                    vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
                }
                Some("f") => {
                    let idx: Vec<usize> = tokens
                        .map(|t| {
                            let head = t.split('/').next().unwrap_or("");
                            let i: i64 = head.parse().map_err(|e| err(format!("bad face index `{t}`: {e}")))?;
                            let resolved = match i {
                                0 => return Err(err("face index 0 is invalid".into())),
                                i if i > 0 => i - 1,
                                i => vertices.len() as i64 + i,
                            };
                            if resolved < 0 || resolved as usize >= vertices.len() {
                                return Err(err(format!("face index {i} out of range")));
                            }
                            Ok(resolved as usize)
                        })
                        .collect::<Result<_, _>>()?;
                    if idx.len() < 3 {
                        return Err(err("face needs at least three vertices".into()));
                    }
                    for k in 1..idx.len() - 1 {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                _ => {}
            }
        }
        Ok(Mesh::uniform(vertices, triangles, color))
    }

    pub fn load_obj(path: &std::path::Path) -> Result<Mesh, MeshError> {
        Mesh::from_obj(&std::fs::read_to_string(path)?, DEFAULT_COLOR)
    }
}

fn triangle_area(vertices: &[Vector3<f64>], t: &[usize; 3]) -> f64 {
    let [a, b, c] = t.map(|i| vertices[i]);
    0.5 * (b - a).cross(&(c - a)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_closed_outward(mesh: &Mesh) {
        // Outward winding: normals point away from the centroid of the (convex-ish) shape.
        let (center, _) = mesh.bounding_sphere();
        let mut signed = 0.0;
        for t in &mesh.triangles {
            let [a, b, c] = t.map(|i| mesh.vertices[i]);
            signed += (a - center).dot(&(b - a).cross(&(c - a)));
        }
        // Six times the enclosed volume; positive iff the surface faces outward.
        assert!(signed > 0.0);
    }

    #[test]
    fn primitives_face_outward() {
        for name in ["cube", "sphere", "torus", "cylinder"] {
            let m = Mesh::builtin(name).unwrap();
            assert!(!m.is_empty());
            assert_closed_outward(&m);
            let (_, r) = m.bounding_sphere();
            assert!(r > 0.8 && r < 1.1, "{name}: {r}");
        }
        assert!(Mesh::builtin("teapot").is_err());
    }

    #[test]
    fn cube_normals_are_axis_aligned_and_outward() {
        let m = Mesh::cube(2.0, DEFAULT_COLOR);
        assert_eq!(m.triangles.len(), 12);
        for t in &m.triangles {
            let n = m.normal(t);
            let centroid = t.iter().map(|&i| m.vertices[i]).sum::<Vector3<f64>>() / 3.0;
            assert!(n.dot(&centroid) > 0.0);
            assert!((n.abs().max() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn obj_subset_parses_and_triangulates() {
        let text = "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1/1/1 2/2/1 3/3/1 4/4/1\nf -4 -3 -2\n";
        let m = Mesh::from_obj(text, DEFAULT_COLOR).unwrap();
        assert_eq!(m.vertices.len(), 4);
        assert_eq!(m.triangles, vec![[0, 1, 2], [0, 2, 3], [0, 1, 2]]);
    }

    #[test]
    fn obj_errors_carry_line_numbers() {
        let err = Mesh::from_obj("v 0 0 0\nv 1 0\n", DEFAULT_COLOR).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = Mesh::from_obj("v 0 0 0\nf 1 2 3\n", DEFAULT_COLOR).unwrap_err().to_string();
        assert!(err.contains("out of range"), "{err}");
    }

    #[test]
    fn degenerate_triangles_are_filtered() {
        let text = "v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 4\n";
        let m = Mesh::from_obj(text, DEFAULT_COLOR).unwrap();
        assert_eq!(m.triangles, vec![[0, 1, 3]]);
    }
}

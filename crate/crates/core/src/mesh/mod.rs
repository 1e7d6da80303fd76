//! Half-edge polygon meshes, OBJ I/O, validation, topological refinement and
//! local patch extraction.
//!
//! Half-edges are stored face-major: the half-edge leaving corner `i` of face
//! `f` has index `face_start(f) + i`.

mod obj;
mod patch;
mod refine;
mod validate;

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

pub use obj::{load_obj, parse_obj, save_obj, write_obj};
pub use patch::{extract_from_halfedge, extract_local_neighborhood, Element, LocalPatch};
pub use refine::{
    dual_faces, primal_faces, refine_topology_dual, refine_topology_primal, PrimalLayout,
};
pub use validate::{validate_manifold, ValidationReport, Violation};

/// Vertex positions and face cycles without connectivity.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RawMesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
}

/// A 2-manifold polygon mesh with half-edge connectivity.
#[derive(Clone, Debug)]
pub struct QuadMesh {
    vertices: Vec<Vec3>,
    faces: Vec<Vec<usize>>,
    face_start: Vec<usize>,
    he_origin: Vec<usize>,
    he_face: Vec<usize>,
    he_twin: Vec<Option<usize>>,
    vertex_out: Vec<Option<usize>>,
}

impl QuadMesh {
    /// Builds connectivity. Faces are re-oriented per connected component to
    /// agree with the first face encountered.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<Vec<usize>>) -> Result<Self> {
        let nv = vertices.len();
        for (f, cyc) in faces.iter().enumerate() {
            if cyc.len() < 3 {
                return Err(Error::InvalidFace {
                    face: f,
                    msg: format!("{} vertices", cyc.len()),
                });
            }
            for (i, &v) in cyc.iter().enumerate() {
                if v >= nv {
                    return Err(Error::InvalidFace {
                        face: f,
                        msg: format!("vertex index {v} out of range"),
                    });
                }
                if cyc[..i].contains(&v) {
                    return Err(Error::InvalidFace {
                        face: f,
                        msg: format!("repeated vertex {v}"),
                    });
                }
            }
        }
        let faces = orient_faces(faces)?;

        let mut face_start = Vec::with_capacity(faces.len() + 1);
        let mut he_origin = Vec::new();
        let mut he_face = Vec::new();
        face_start.push(0);
        for (f, cyc) in faces.iter().enumerate() {
            he_origin.extend_from_slice(cyc);
            he_face.extend(std::iter::repeat(f).take(cyc.len()));
            face_start.push(he_origin.len());
        }

        let nh = he_origin.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(nh);
        let mut mesh = QuadMesh {
            vertices,
            faces,
            face_start,
            he_origin,
            he_face,
            he_twin: vec![None; nh],
            vertex_out: vec![None; nv],
        };
        for h in 0..nh {
            let key = (mesh.he_origin[h], mesh.dest(h));
            if directed.insert(key, h).is_some() {
                return Err(Error::NonManifold(key.0, key.1));
            }
        }
        for h in 0..nh {
            let (a, b) = (mesh.he_origin[h], mesh.dest(h));
            mesh.he_twin[h] = directed.get(&(b, a)).copied();
            if mesh.vertex_out[a].is_none() {
                mesh.vertex_out[a] = Some(h);
            }
        }
        mesh.check_vertex_fans()?;
        Ok(mesh)
    }

    pub fn from_raw(raw: RawMesh) -> Result<Self> {
        Self::new(raw.vertices, raw.faces)
    }

    pub fn to_raw(&self) -> RawMesh {
        RawMesh {
            vertices: self.vertices.clone(),
            faces: self.faces.clone(),
        }
    }

    /// Same connectivity, new positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} positions for {} vertices",
                vertices.len(),
                self.vertices.len()
            )));
        }
        let mut m = self.clone();
        m.vertices = vertices;
        Ok(m)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_halfedges(&self) -> usize {
        self.he_origin.len()
    }

    /// Number of undirected edges.
    pub fn num_edges(&self) -> usize {
        (0..self.num_halfedges())
            .filter(|&h| self.he_twin[h].map_or(true, |t| h < t))
            .count()
    }

    pub fn is_closed(&self) -> bool {
        self.he_twin.iter().all(Option::is_some)
    }

    pub fn face_start(&self, f: usize) -> usize {
        self.face_start[f]
    }

    pub fn face_valence(&self, f: usize) -> usize {
        self.faces[f].len()
    }

    pub fn origin(&self, h: usize) -> usize {
        self.he_origin[h]
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.he_face[h]
    }

    pub fn twin(&self, h: usize) -> Option<usize> {
        self.he_twin[h]
    }

    pub fn next(&self, h: usize) -> usize {
        let f = self.he_face[h];
        if h + 1 < self.face_start[f + 1] {
            h + 1
        } else {
            self.face_start[f]
        }
    }

    pub fn prev(&self, h: usize) -> usize {
        let f = self.he_face[h];
        if h > self.face_start[f] {
            h - 1
        } else {
            self.face_start[f + 1] - 1
        }
    }

    pub fn dest(&self, h: usize) -> usize {
        self.he_origin[self.next(h)]
    }

    /// First outgoing half-edge of `v` in half-edge order.
    pub fn vertex_out(&self, v: usize) -> Option<usize> {
        self.vertex_out[v]
    }

    /// Outgoing half-edge following `h` around its origin, turning
    /// counter-clockwise with respect to the face orientation.
    pub fn rotate(&self, h: usize) -> Option<usize> {
        self.he_twin[self.prev(h)]
    }

    /// Outgoing half-edges of `v` in rotation order, starting at
    /// `vertex_out(v)`. For boundary vertices the fan is started at the
    /// boundary so it is complete.
    pub fn outgoing(&self, v: usize) -> Vec<usize> {
        let Some(start) = self.vertex_out[v] else {
            return Vec::new();
        };
        let mut s = start;
        // rewind to a boundary if there is one
        loop {
            match self.he_twin[s] {
                Some(t) => {
                    let back = self.next(t);
                    if back == start {
                        break;
                    }
                    s = back;
                }
                None => break,
            }
        }
        let first = if self.he_twin[s].is_none() { s } else { start };
        let mut out = vec![first];
        let mut h = first;
        while let Some(r) = self.rotate(h) {
            if r == first {
                break;
            }
            out.push(r);
            h = r;
        }
        out
    }

    /// Number of edges incident to `v`.
    pub fn vertex_valence(&self, v: usize) -> usize {
        let out = self.outgoing(v);
        let boundary = out
            .last()
            .map_or(false, |&h| self.he_twin[self.prev(h)].is_none());
        out.len() + usize::from(boundary)
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.outgoing(v)
            .iter()
            .any(|&h| self.he_twin[h].is_none() || self.he_twin[self.prev(h)].is_none())
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let cyc = &self.faces[f];
        let mut c = [0.0; 3];
        for &v in cyc {
            for i in 0..3 {
                c[i] += self.vertices[v][i];
            }
        }
        c.map(|x| x / cyc.len() as f64)
    }

    /// Euler characteristic V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn classify(&self) -> ElementClassification {
        classify_elements(self)
    }

    fn check_vertex_fans(&self) -> Result<()> {
        let mut count = vec![0usize; self.num_vertices()];
        for &o in &self.he_origin {
            count[o] += 1;
        }
        for v in 0..self.num_vertices() {
            if count[v] > 0 && self.outgoing(v).len() != count[v] {
                return Err(Error::NonManifoldVertex(v));
            }
        }
        Ok(())
    }
}

fn orient_faces(mut faces: Vec<Vec<usize>>) -> Result<Vec<Vec<usize>>> {
    // undirected edge -> incident (face, directed as stored?)
    let mut edges: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (f, cyc) in faces.iter().enumerate() {
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            let e = edges.entry((a.min(b), a.max(b))).or_default();
            e.push(f);
            if e.len() > 2 {
                return Err(Error::NonManifold(a.min(b), a.max(b)));
            }
        }
    }
    let has_directed = |cyc: &[usize], a: usize, b: usize| {
        (0..cyc.len()).any(|i| cyc[i] == a && cyc[(i + 1) % cyc.len()] == b)
    };
    let nf = faces.len();
    let mut state: Vec<Option<bool>> = vec![None; nf];
    for seed in 0..nf {
        if state[seed].is_some() {
            continue;
        }
        state[seed] = Some(false);
        let mut queue = VecDeque::from([seed]);
        while let Some(f) = queue.pop_front() {
            let cyc = faces[f].clone();
            for i in 0..cyc.len() {
                let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
                for &g in &edges[&(a.min(b), a.max(b))] {
                    if g == f {
                        continue;
                    }
                    // consistent when g traverses b -> a
                    let flip = has_directed(&faces[g], a, b);
                    match state[g] {
                        None => {
                            if flip {
                                faces[g].reverse();
                            }
                            state[g] = Some(flip);
                            queue.push_back(g);
                        }
                        Some(_) => {
                            if flip {
                                return Err(Error::InconsistentOrientation(a, b));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(faces)
}

/// Valences and extraordinary elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementClassification {
    pub vertex_valence: Vec<usize>,
    pub face_valence: Vec<usize>,
    pub extraordinary_vertices: Vec<usize>,
    pub extraordinary_faces: Vec<usize>,
    pub boundary_vertices: Vec<usize>,
}

impl ElementClassification {
    pub fn is_regular(&self) -> bool {
        self.extraordinary_vertices.is_empty() && self.extraordinary_faces.is_empty()
    }
}

/// Valence of every vertex and face; interior vertices and faces of valence
/// other than 4 are extraordinary.
pub fn classify_elements(m: &QuadMesh) -> ElementClassification {
    let vertex_valence: Vec<usize> = (0..m.num_vertices()).map(|v| m.vertex_valence(v)).collect();
    let face_valence: Vec<usize> = m.faces.iter().map(Vec::len).collect();
    let boundary_vertices: Vec<usize> = (0..m.num_vertices())
        .filter(|&v| m.is_boundary_vertex(v))
        .collect();
    let extraordinary_vertices = (0..m.num_vertices())
        .filter(|&v| vertex_valence[v] != 4 && vertex_valence[v] > 0 && !m.is_boundary_vertex(v))
        .collect();
    let extraordinary_faces = (0..m.num_faces())
        .filter(|&f| face_valence[f] != 4)
        .collect();
    ElementClassification {
        vertex_valence,
        face_valence,
        extraordinary_vertices,
        extraordinary_faces,
        boundary_vertices,
    }
}

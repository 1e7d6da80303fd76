use super::QuadMesh;
use crate::{Error, Result, Vec3};

/// Doo-Sabin connectivity. The new vertex for corner `i` of face `f` gets the
/// id of the half-edge leaving that corner. Faces are ordered: one per old
/// face (same index, same starting corner), one per old edge, one per old
/// vertex.
pub fn dual_faces(m: &QuadMesh) -> Result<Vec<Vec<usize>>> {
    if !m.is_closed() {
        return Err(Error::BoundaryUnsupported);
    }
    let mut faces = Vec::with_capacity(m.num_faces() + m.num_edges() + m.num_vertices());
    for f in 0..m.num_faces() {
        let s = m.face_start(f);
        faces.push((s..s + m.face_valence(f)).collect());
    }
    for h in 0..m.num_halfedges() {
        let t = m.twin(h).expect("closed");
        if h < t {
            faces.push(vec![m.next(h), h, m.next(t), t]);
        }
    }
    for v in 0..m.num_vertices() {
        let out = m.outgoing(v);
        if !out.is_empty() {
            faces.push(out);
        }
    }
    Ok(faces)
}

/// Vertex numbering of a Catmull-Clark step: old vertices keep their index,
/// then one point per edge, then one per face.
#[derive(Clone, Debug)]
pub struct PrimalLayout {
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_faces: usize,
    /// Edge id of every half-edge.
    pub edge_of: Vec<usize>,
    /// Representative half-edge of every edge (the smaller of the pair).
    pub edge_halfedge: Vec<usize>,
}

impl PrimalLayout {
    pub fn new(m: &QuadMesh) -> Result<Self> {
        if !m.is_closed() {
            return Err(Error::BoundaryUnsupported);
        }
        let mut edge_of = vec![usize::MAX; m.num_halfedges()];
        let mut edge_halfedge = Vec::new();
        for h in 0..m.num_halfedges() {
            let t = m.twin(h).expect("closed");
            if h < t {
                edge_of[h] = edge_halfedge.len();
                edge_of[t] = edge_halfedge.len();
                edge_halfedge.push(h);
            }
        }
        Ok(PrimalLayout {
            num_vertices: m.num_vertices(),
            num_edges: edge_halfedge.len(),
            num_faces: m.num_faces(),
            edge_of,
            edge_halfedge,
        })
    }

    pub fn edge_point(&self, e: usize) -> usize {
        self.num_vertices + e
    }

    pub fn face_point(&self, f: usize) -> usize {
        self.num_vertices + self.num_edges + f
    }

    pub fn total(&self) -> usize {
        self.num_vertices + self.num_edges + self.num_faces
    }
}

/// Catmull-Clark connectivity: corner `i` of face `f` (half-edge `h`) becomes
/// the quad (origin(h), E(h), F(f), E(prev h)).
pub fn primal_faces(m: &QuadMesh) -> Result<(PrimalLayout, Vec<Vec<usize>>)> {
    let layout = PrimalLayout::new(m)?;
    let mut faces = Vec::with_capacity(m.num_halfedges());
    for h in 0..m.num_halfedges() {
        let f = m.face_of(h);
        faces.push(vec![
            m.origin(h),
            layout.edge_point(layout.edge_of[h]),
            layout.face_point(f),
            layout.edge_point(layout.edge_of[m.prev(h)]),
        ]);
    }
    Ok((layout, faces))
}

fn mid(a: Vec3, b: Vec3, t: f64) -> Vec3 {
    [0, 1, 2].map(|i| a[i] + t * (b[i] - a[i]))
}

/// Doo-Sabin topology step; new points sit halfway between each corner and
/// its face centroid.
pub fn refine_topology_dual(m: &QuadMesh) -> Result<QuadMesh> {
    let faces = dual_faces(m)?;
    let verts = (0..m.num_halfedges())
        .map(|h| {
            mid(
                m.vertices()[m.origin(h)],
                m.face_centroid(m.face_of(h)),
                0.5,
            )
        })
        .collect();
    QuadMesh::new(verts, faces)
}

/// Catmull-Clark topology step; accepts any polygon faces. Positions are the
/// old vertices, edge midpoints and face centroids.
pub fn refine_topology_primal(m: &QuadMesh) -> Result<QuadMesh> {
    let (layout, faces) = primal_faces(m)?;
    let mut verts = m.vertices().to_vec();
    for &h in &layout.edge_halfedge {
        verts.push(mid(m.vertices()[m.origin(h)], m.vertices()[m.dest(h)], 0.5));
    }
    for f in 0..m.num_faces() {
        verts.push(m.face_centroid(f));
    }
    QuadMesh::new(verts, faces)
}

use std::collections::HashMap;

use super::{BlockSet, SchemeKind, SubdivisionScheme};
use crate::mesh::{dual_faces, primal_faces, QuadMesh};
use crate::{Error, Result, Vec3};

fn axpy(acc: &mut Vec3, w: f64, p: &Vec3) {
    for i in 0..3 {
        acc[i] += w * p[i];
    }
}

/// One geometric refinement step with the level-k rules of `scheme`.
///
/// Dual schemes: the new point at corner i of a face of valence m is
/// Σ_j w_{(j-i) mod m} v_j with w_d the first entry of block B_d for
/// valence m. Primal schemes: face and edge points from the regular mask,
/// vertex points from α̃ and β̃ of the blocks for the vertex valence; all faces
/// must be quads.
pub fn refine_mesh(scheme: &dyn SubdivisionScheme, mesh: &QuadMesh, k: u32) -> Result<QuadMesh> {
    match scheme.kind() {
        SchemeKind::Dual => refine_dual(scheme, mesh, k),
        SchemeKind::Primal => refine_primal(scheme, mesh, k),
    }
}

fn refine_dual(scheme: &dyn SubdivisionScheme, mesh: &QuadMesh, k: u32) -> Result<QuadMesh> {
    let faces = dual_faces(mesh)?;
    let mut weights: HashMap<usize, Vec<f64>> = HashMap::new();
    let mut verts = vec![[0.0; 3]; mesh.num_halfedges()];
    for f in 0..mesh.num_faces() {
        let m = mesh.face_valence(f);
        if !weights.contains_key(&m) {
            let BlockSet::Dual { blocks } = scheme.local_blocks(k, m)? else {
                unreachable!("dual scheme returns dual blocks")
            };
            weights.insert(m, blocks.iter().map(|b| b[(0, 0)]).collect());
        }
        let w = &weights[&m];
        let cyc = &mesh.faces()[f];
        let start = mesh.face_start(f);
        for i in 0..m {
            let mut p = [0.0; 3];
            for (j, &v) in cyc.iter().enumerate() {
                axpy(&mut p, w[(j + m - i) % m], &mesh.vertices()[v]);
            }
            verts[start + i] = p;
        }
    }
    QuadMesh::new(verts, faces)
}

fn refine_primal(scheme: &dyn SubdivisionScheme, mesh: &QuadMesh, k: u32) -> Result<QuadMesh> {
    if let Some(f) = (0..mesh.num_faces()).find(|&f| mesh.face_valence(f) != 4) {
        return Err(Error::NonQuadFace(f));
    }
    let (layout, faces) = primal_faces(mesh)?;
    let mask = scheme.regular_mask(k);
    let w_face = mask.coeff([1, 1]);
    let w_edge = mask.coeff([1, 0]);
    let w_wing = mask.coeff([1, 2]);
    let pos = mesh.vertices();
    let mut verts = vec![[0.0; 3]; layout.total()];

    for v in 0..mesh.num_vertices() {
        let out = mesh.outgoing(v);
        let n = out.len();
        let BlockSet::Primal { alpha, beta, .. } = scheme.local_blocks(k, n)? else {
            unreachable!("primal scheme returns primal blocks")
        };
        let mut p = [0.0; 3];
        axpy(&mut p, alpha, &pos[v]);
        for &h in &out {
            axpy(&mut p, beta[0], &pos[mesh.dest(h)]);
            let diag = mesh.origin(mesh.next(mesh.next(h)));
            axpy(&mut p, beta[1], &pos[diag]);
        }
        verts[v] = p;
    }
    for (e, &h) in layout.edge_halfedge.iter().enumerate() {
        let t = mesh.twin(h).expect("closed");
        let mut p = [0.0; 3];
        axpy(&mut p, w_edge, &pos[mesh.origin(h)]);
        axpy(&mut p, w_edge, &pos[mesh.origin(t)]);
        for side in [h, t] {
            let a = mesh.next(mesh.next(side));
            axpy(&mut p, w_wing, &pos[mesh.origin(a)]);
            axpy(&mut p, w_wing, &pos[mesh.origin(mesh.next(a))]);
        }
        verts[layout.edge_point(e)] = p;
    }
    for f in 0..mesh.num_faces() {
        let mut p = [0.0; 3];
        for &v in &mesh.faces()[f] {
            axpy(&mut p, w_face, &pos[v]);
        }
        verts[layout.face_point(f)] = p;
    }
    QuadMesh::new(verts, faces)
}

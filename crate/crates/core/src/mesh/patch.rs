use serde::{Deserialize, Serialize};

use super::QuadMesh;
use crate::schemes::SchemeKind;
use crate::{Error, Result, Vec3};

/// An extraordinary element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Vertex(usize),
    Face(usize),
}

/// Control points around one extraordinary element, ordered sector by sector.
///
/// Face case (dual schemes), face cycle v_0..v_{n-1}: sector j holds
/// `[v_j, s1, s2, s3]` where s1 is the neighbour of v_j across the edge
/// (v_{j-1}, v_j), s3 the neighbour across (v_j, v_{j+1}) and s2 the vertex
/// of the corner face opposite v_j.
///
/// Vertex case (primal schemes), centre c with neighbours e_j: sector j holds
/// `[c, e_j, f_j, s2, s3, s4, s5]` where (c, e_j, f_j, e_{j+1}) is a face,
/// (e_j, s2, s3, f_j) and (f_j, s3, s4, s5) are the next faces outwards and
/// (f_j, s5, ., e_{j+1}) closes the sector. The centre is repeated in every
/// sector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalPatch {
    pub n: usize,
    pub p: usize,
    pub kind: SchemeKind,
    pub points: Vec<Vec3>,
    pub vertex_ids: Vec<usize>,
}

impl LocalPatch {
    /// Block size of the block-circulant matrix.
    pub fn block_size(&self) -> usize {
        match self.kind {
            SchemeKind::Dual => self.p,
            SchemeKind::Primal => self.p + 1,
        }
    }

    pub fn rows(&self) -> usize {
        self.n * self.block_size()
    }

    /// The p·n+1 points of the unreplicated vertex layout (centre first).
    pub fn compact_points(&self) -> Vec<Vec3> {
        match self.kind {
            SchemeKind::Dual => self.points.clone(),
            SchemeKind::Primal => {
                let m = self.p + 1;
                let mut out = vec![self.points[0]];
                for j in 0..self.n {
                    out.extend_from_slice(&self.points[j * m + 1..(j + 1) * m]);
                }
                out
            }
        }
    }

    /// Same ordering and ids, new positions.
    pub fn with_points(&self, points: Vec<Vec3>) -> Result<Self> {
        if points.len() != self.points.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} points for a patch of {} rows",
                points.len(),
                self.points.len()
            )));
        }
        Ok(LocalPatch {
            points,
            ..self.clone()
        })
    }
}

/// Extracts the patch around `element` starting at its canonical half-edge:
/// corner 0 of a face, or the first outgoing half-edge of a vertex.
pub fn extract_local_neighborhood(
    m: &QuadMesh,
    element: Element,
    kind: SchemeKind,
) -> Result<LocalPatch> {
    let h0 = match (element, kind) {
        (Element::Face(f), SchemeKind::Dual) => {
            if f >= m.num_faces() {
                return Err(Error::WrongElement(format!("face {f} does not exist")));
            }
            m.face_start(f)
        }
        (Element::Vertex(v), SchemeKind::Primal) => m
            .vertex_out(v)
            .ok_or_else(|| Error::WrongElement(format!("vertex {v} is isolated or missing")))?,
        (e, k) => {
            return Err(Error::WrongElement(format!(
                "{e:?} cannot be analysed with a {k:?} scheme"
            )))
        }
    };
    extract_from_halfedge(m, h0, kind)
}

/// Extracts the patch with sector 0 anchored at half-edge `h0`: the half-edge
/// leaving corner v_0 of the face (dual) or leaving the centre (primal).
pub fn extract_from_halfedge(m: &QuadMesh, h0: usize, kind: SchemeKind) -> Result<LocalPatch> {
    if !m.is_closed() {
        return Err(Error::BoundaryUnsupported);
    }
    match kind {
        SchemeKind::Dual => extract_face(m, h0),
        SchemeKind::Primal => extract_vertex(m, h0),
    }
}

fn collar(msg: impl Into<String>) -> Error {
    Error::InsufficientRegularCollar(msg.into())
}

fn twin(m: &QuadMesh, h: usize) -> usize {
    m.twin(h).expect("closed mesh")
}

fn nth(m: &QuadMesh, mut h: usize, k: usize) -> usize {
    for _ in 0..k {
        h = m.next(h);
    }
    h
}

fn require_quad(m: &QuadMesh, h: usize) -> Result<()> {
    let f = m.face_of(h);
    if m.face_valence(f) != 4 {
        return Err(collar(format!(
            "face {f} has valence {}",
            m.face_valence(f)
        )));
    }
    Ok(())
}

fn require_regular_vertex(m: &QuadMesh, v: usize) -> Result<()> {
    let val = m.vertex_valence(v);
    if val != 4 {
        return Err(collar(format!("vertex {v} has valence {val}")));
    }
    Ok(())
}

fn check_distinct(ids: &[usize]) -> Result<()> {
    let mut sorted = ids.to_vec();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(collar(format!(
            "vertex {} appears twice in the patch",
            w[0]
        )));
    }
    Ok(())
}

fn extract_face(m: &QuadMesh, h0: usize) -> Result<LocalPatch> {
    let f = m.face_of(h0);
    let n = m.face_valence(f);
    let hs: Vec<usize> = (0..n).map(|j| nth(m, h0, j)).collect();
    let mut ids = Vec::with_capacity(4 * n);
    let mut s1_check = Vec::with_capacity(n);
    for j in 0..n {
        let h = hs[j];
        let vj = m.origin(h);
        require_regular_vertex(m, vj)?;
        let t = twin(m, h);
        require_quad(m, t)?;
        let s3 = m.origin(nth(m, t, 2));
        let g = twin(m, m.next(t));
        require_quad(m, g)?;
        let s1 = m.origin(nth(m, g, 2));
        let s2 = m.origin(nth(m, g, 3));
        // the face across (v_{j-1}, v_j) must contain s1 next to v_j
        let tp = twin(m, hs[(j + n - 1) % n]);
        s1_check.push(m.origin(nth(m, tp, 3)) == s1);
        ids.extend_from_slice(&[vj, s1, s2, s3]);
    }
    if s1_check.iter().any(|ok| !ok) {
        return Err(collar(
            "faces around the extraordinary face do not close up",
        ));
    }
    check_distinct(&ids)?;
    Ok(LocalPatch {
        n,
        p: 4,
        kind: SchemeKind::Dual,
        points: ids.iter().map(|&v| m.vertices()[v]).collect(),
        vertex_ids: ids,
    })
}

fn extract_vertex(m: &QuadMesh, h0: usize) -> Result<LocalPatch> {
    let c = m.origin(h0);
    let n = m.vertex_valence(c);
    let mut hs = vec![h0];
    for _ in 1..n {
        let r = m.rotate(*hs.last().unwrap()).expect("closed mesh");
        hs.push(r);
    }
    let mut sectors: Vec<[usize; 6]> = Vec::with_capacity(n);
    let mut closing: Vec<(usize, usize)> = Vec::with_capacity(n);
    for &h in &hs {
        require_quad(m, h)?;
        let e = m.dest(h);
        let f = m.origin(nth(m, h, 2));
        let e_next = m.origin(nth(m, h, 3));
        require_regular_vertex(m, e)?;
        require_regular_vertex(m, f)?;
        let q1 = twin(m, m.next(h));
        require_quad(m, q1)?;
        let s2 = m.origin(nth(m, q1, 2));
        let s3 = m.origin(nth(m, q1, 3));
        let q2 = twin(m, nth(m, q1, 3));
        require_quad(m, q2)?;
        let s4 = m.origin(nth(m, q2, 2));
        let s5 = m.origin(nth(m, q2, 3));
        let q3 = twin(m, nth(m, q2, 3));
        require_quad(m, q3)?;
        if m.origin(nth(m, q3, 3)) != e_next {
            return Err(collar(format!("sector around vertex {f} does not close")));
        }
        closing.push((m.origin(nth(m, q3, 2)), e_next));
        sectors.push([e, f, s2, s3, s4, s5]);
    }
    for j in 0..n {
        let nj = (j + 1) % n;
        if closing[j] != (sectors[nj][2], sectors[nj][0]) {
            return Err(collar("neighbouring sectors disagree"));
        }
    }
    let mut compact = vec![c];
    for s in &sectors {
        compact.extend_from_slice(s);
    }
    check_distinct(&compact)?;
    let mut ids = Vec::with_capacity(7 * n);
    for s in &sectors {
        ids.push(c);
        ids.extend_from_slice(s);
    }
    Ok(LocalPatch {
        n,
        p: 6,
        kind: SchemeKind::Primal,
        points: ids.iter().map(|&v| m.vertices()[v]).collect(),
        vertex_ids: ids,
    })
}

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::RawMesh;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    IndexOutOfRange {
        face: usize,
        index: usize,
    },
    DegenerateFace {
        face: usize,
    },
    NonManifoldEdge {
        edge: (usize, usize),
        faces: Vec<usize>,
    },
    InconsistentOrientation {
        edge: (usize, usize),
        faces: Vec<usize>,
    },
    NonManifoldVertex {
        vertex: usize,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Lists every violated 2-manifold condition. Orientation is checked as
/// given, without attempting to flip faces.
pub fn validate_manifold(m: &RawMesh) -> ValidationReport {
    let nv = m.vertices.len();
    let mut violations = Vec::new();
    let mut good = vec![true; m.faces.len()];
    for (f, cyc) in m.faces.iter().enumerate() {
        if let Some(&bad) = cyc.iter().find(|&&v| v >= nv) {
            violations.push(Violation::IndexOutOfRange {
                face: f,
                index: bad,
            });
            good[f] = false;
            continue;
        }
        let repeated = (0..cyc.len()).any(|i| cyc[..i].contains(&cyc[i]));
        if cyc.len() < 3 || repeated {
            violations.push(Violation::DegenerateFace { face: f });
            good[f] = false;
        }
    }

    // undirected edge -> (face, forward?)
    let mut edges: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
    for (f, cyc) in m.faces.iter().enumerate().filter(|(f, _)| good[*f]) {
        for i in 0..cyc.len() {
            let (a, b) = (cyc[i], cyc[(i + 1) % cyc.len()]);
            edges
                .entry((a.min(b), a.max(b)))
                .or_default()
                .push((f, a < b));
        }
    }
    for (&edge, inc) in &edges {
        let faces: Vec<usize> = inc.iter().map(|x| x.0).collect();
        if inc.len() > 2 {
            violations.push(Violation::NonManifoldEdge { edge, faces });
        } else if inc.len() == 2 && inc[0].1 == inc[1].1 {
            violations.push(Violation::InconsistentOrientation { edge, faces });
        }
    }

    // each vertex must see a single edge-connected fan of faces
    let mut incident: HashMap<usize, Vec<usize>> = HashMap::new();
    for (f, cyc) in m.faces.iter().enumerate().filter(|(f, _)| good[*f]) {
        for &v in cyc {
            incident.entry(v).or_default().push(f);
        }
    }
    let mut links: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (&(a, b), inc) in &edges {
        if inc.len() == 2 {
            links.entry(a).or_default().push((inc[0].0, inc[1].0));
            links.entry(b).or_default().push((inc[0].0, inc[1].0));
        }
    }
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let mut bad_vertices = Vec::new();
    for (&v, fs) in &incident {
        let mut parent: Vec<usize> = (0..fs.len()).collect();
        for &(f, g) in links.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
            let (Some(i), Some(j)) = (
                fs.iter().position(|&x| x == f),
                fs.iter().position(|&x| x == g),
            ) else {
                continue;
            };
            let (x, y) = (find(&mut parent, i), find(&mut parent, j));
            parent[x] = y;
        }
        let roots = (0..fs.len()).filter(|&i| find(&mut parent, i) == i).count();
        if roots > 1 {
            bad_vertices.push(v);
        }
    }
    bad_vertices.sort_unstable();
    violations.extend(
        bad_vertices
            .into_iter()
            .map(|vertex| Violation::NonManifoldVertex { vertex }),
    );
    ValidationReport { violations }
}

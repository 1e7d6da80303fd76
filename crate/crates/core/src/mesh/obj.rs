use std::io::{BufRead, Write};

use super::{QuadMesh, RawMesh};
use crate::{Error, Result};

/// Reads `v` and `f` records. Texture/normal indices (`f 1/2/3`) are ignored,
/// negative indices are resolved relative to the current vertex count.
pub fn parse_obj<R: BufRead>(source: R) -> Result<RawMesh> {
    let mut raw = RawMesh::default();
    for (i, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut p = [0.0; 3];
                for c in p.iter_mut() {
                    let tok = it.next().ok_or_else(|| Error::ObjParse {
                        line: lineno,
                        msg: "vertex needs three coordinates".into(),
                    })?;
                    *c = tok.parse().map_err(|_| Error::ObjParse {
                        line: lineno,
                        msg: format!("bad coordinate '{tok}'"),
                    })?;
                }
                raw.vertices.push(p);
            }
            Some("f") => {
                let mut cyc = Vec::new();
                for tok in it {
                    let head = tok.split('/').next().unwrap_or("");
                    let idx: i64 = head.parse().map_err(|_| Error::ObjParse {
                        line: lineno,
                        msg: format!("bad index '{tok}'"),
                    })?;
                    let n = raw.vertices.len() as i64;
                    let resolved = if idx > 0 { idx - 1 } else { n + idx };
                    if idx == 0 || resolved < 0 {
                        return Err(Error::ObjParse {
                            line: lineno,
                            msg: format!("index {idx} out of range"),
                        });
                    }
                    cyc.push(resolved as usize);
                }
                if cyc.len() < 3 {
                    return Err(Error::ObjParse {
                        line: lineno,
                        msg: "face needs at least three vertices".into(),
                    });
                }
                raw.faces.push(cyc);
            }
            _ => {}
        }
    }
    Ok(raw)
}

pub fn load_obj<R: BufRead>(source: R) -> Result<QuadMesh> {
    QuadMesh::from_raw(parse_obj(source)?)
}

/// Writes coordinates with 17 significant digits so they read back bit-exactly.
pub fn write_obj<W: Write>(raw: &RawMesh, mut out: W) -> Result<()> {
    for p in &raw.vertices {
        writeln!(out, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    for cyc in &raw.faces {
        write!(out, "f")?;
        for v in cyc {
            write!(out, " {}", v + 1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn save_obj<W: Write>(mesh: &QuadMesh, out: W) -> Result<()> {
    write_obj(&mesh.to_raw(), out)
}

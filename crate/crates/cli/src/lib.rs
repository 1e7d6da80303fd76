//! Command implementations behind the `nssubdiv` binary.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use nssubdiv::analyzer::{
    estimate_limit_normal, generate_rings, verify_convergence_conditions,
    verify_normal_continuity_conditions, AnalysisOptions, ConditionReport, NormalEstimate, Status,
};
use nssubdiv::localmatrix::{
    decay_fit, limit_point, DecayFit, LimitOptions, LimitPoint, NOISE_FLOOR,
};
use nssubdiv::mesh::{
    classify_elements, extract_local_neighborhood, load_obj, save_obj, Element, QuadMesh,
};
use nssubdiv::schemes::{
    parse_scheme, refine_mesh, SchemeDescriptor, SchemeKind, SubdivisionScheme,
};
use nssubdiv::symbols::DIVISIBILITY_TOL;
use nssubdiv::Vec3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Refine,
    Analyze,
    Limit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Inclusive valence range written `a..b` (or a single number).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Valences {
    pub first: usize,
    pub last: usize,
}

impl Valences {
    pub fn iter(&self) -> RangeInclusive<usize> {
        self.first..=self.last
    }
}

impl FromStr for Valences {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad valence `{t}` in `{s}`"))
        };
        let (first, last) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if first < 3 || last < first {
            return Err(format!("valence range `{s}` must satisfy 3 <= a <= b"));
        }
        Ok(Valences { first, last })
    }
}

/// Tolerances shared by the commands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalue clustering tolerance.
    pub eigen: f64,
    /// Norms below this are treated as exact zeros in decay fits.
    pub decay_noise_floor: f64,
    /// Symbol divisibility tolerance.
    pub divisibility: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eigen: 1e-8,
            decay_noise_floor: NOISE_FLOOR,
            divisibility: DIVISIBILITY_TOL,
        }
    }
}

/// Fully resolved settings of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub scheme: String,
    pub normalized: bool,
    pub valences: Valences,
    pub levels: u32,
    /// Last level of decay fits and ring sequences.
    pub ktop: u32,
    pub grid: usize,
    pub depth: u32,
    pub tolerances: Tolerances,
    pub input: Option<PathBuf>,
    pub element: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command, scheme: impl Into<String>) -> Self {
        RunConfig {
            command,
            scheme: scheme.into(),
            normalized: command != Command::Analyze,
            valences: Valences { first: 5, last: 10 },
            levels: 3,
            ktop: 15,
            grid: 64,
            depth: 6,
            tolerances: Tolerances::default(),
            input: None,
            element: None,
            out: None,
            format: Format::Json,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_json(s: &str) -> anyhow::Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn scheme(&self) -> anyhow::Result<Box<dyn SubdivisionScheme>> {
        if let Ok(d) = self.scheme.parse::<SchemeDescriptor>() {
            return Ok(Box::new(d.with_normalized(self.normalized)));
        }
        let s = parse_scheme(&self.scheme)?;
        if self.normalized {
            bail!(
                "scheme `{}` has no normalized variant; pass --raw",
                self.scheme
            );
        }
        Ok(s)
    }

    fn analysis_options(&self) -> AnalysisOptions {
        let mut o = AnalysisOptions::default();
        o.spectrum.cluster_tol = self.tolerances.eigen;
        o.decay_k_max = self.ktop;
        o.charmap.grid = self.grid;
        o
    }

    fn input(&self) -> anyhow::Result<QuadMesh> {
        let path = self
            .input
            .as_ref()
            .context("an input OBJ file is required")?;
        let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        load_obj(BufReader::new(file)).with_context(|| format!("cannot load {}", path.display()))
    }
}

/// Outcome of a command: what to print and whether every check passed.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub all_pass: bool,
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    match cfg.command {
        Command::Refine => cmd_refine(cfg),
        Command::Analyze => cmd_analyze(cfg),
        Command::Limit => cmd_limit(cfg),
    }
}

fn out_dir(cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    Ok(dir)
}

fn write_file(path: &Path, body: &[u8]) -> anyhow::Result<()> {
    fs::write(path, body).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes mesh_1.obj … mesh_L.obj.
pub fn cmd_refine(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let scheme = cfg.scheme()?;
    let dir = out_dir(cfg)?;
    let mut mesh = cfg.input()?;
    if !mesh.is_closed() {
        bail!("input mesh has boundary edges; only closed meshes are supported");
    }
    let mut lines = String::new();
    for k in 1..=cfg.levels {
        mesh = refine_mesh(scheme.as_ref(), &mesh, k)?;
        let path = dir.join(format!("mesh_{k}.obj"));
        let mut w = BufWriter::new(
            File::create(&path).with_context(|| format!("cannot create {}", path.display()))?,
        );
        save_obj(&mesh, &mut w)?;
        w.flush()?;
        lines.push_str(&format!(
            "{} vertices={} faces={}\n",
            path.display(),
            mesh.num_vertices(),
            mesh.num_faces()
        ));
    }
    Ok(Outcome {
        stdout: lines,
        all_pass: true,
    })
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn summary_csv(reports: &[ConditionReport]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "theorem",
        "scheme",
        "valence",
        "hypothesis",
        "status",
        "verdict",
    ])?;
    for r in reports {
        let theorem = serde_json::to_value(r.theorem)?;
        let verdict = serde_json::to_value(r.verdict)?;
        for h in &r.hypotheses {
            let status = serde_json::to_value(h.status)?;
            w.write_record([
                theorem.as_str().unwrap_or_default(),
                &r.scheme,
                &r.valence.to_string(),
                &h.name,
                status.as_str().unwrap_or_default(),
                verdict.as_str().unwrap_or_default(),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn decay_csv(fits: &[(usize, DecayFit)]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["valence", "k", "norm", "fitted"])?;
    for (n, fit) in fits {
        for (k, norm, fitted) in fit.rows() {
            w.write_record([n.to_string(), k.to_string(), fmt_num(norm), fmt_num(fitted)])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Both condition reports for every valence, plus the decay series.
pub fn cmd_analyze(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let scheme = cfg.scheme()?;
    let reference = scheme.reference();
    let opts = cfg.analysis_options();
    let mut reports = Vec::new();
    let mut fits = Vec::new();
    for n in cfg.valences.iter() {
        reports.push(verify_convergence_conditions(
            scheme.as_ref(),
            &reference,
            n,
            &opts,
        )?);
        reports.push(verify_normal_continuity_conditions(
            scheme.as_ref(),
            &reference,
            n,
            &opts,
        )?);
        if !scheme.is_stationary() {
            if let Ok(fit) = decay_fit(scheme.as_ref(), n, opts.decay_k_min..=opts.decay_k_max) {
                fits.push((n, fit));
            }
        }
    }
    let all_pass = reports.iter().all(|r| r.verdict == Status::Pass);
    let json = serde_json::to_string_pretty(&reports)? + "\n";
    let summary = summary_csv(&reports)?;
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        write_file(&dir.join("reports.json"), json.as_bytes())?;
        write_file(&dir.join("summary.csv"), summary.as_bytes())?;
        write_file(&dir.join("decay.csv"), decay_csv(&fits)?.as_bytes())?;
    }
    let stdout = match cfg.format {
        Format::Json => json,
        Format::Csv => summary,
    };
    Ok(Outcome { stdout, all_pass })
}

/// Parses `v:<id>` / `f:<id>` (also `vertex:`, `face:`).
pub fn parse_element(s: &str) -> anyhow::Result<Element> {
    let (tag, id) = s
        .split_once(':')
        .with_context(|| format!("element `{s}` must look like v:<id> or f:<id>"))?;
    let id: usize = id
        .trim()
        .parse()
        .with_context(|| format!("bad element id in `{s}`"))?;
    match tag.trim() {
        "v" | "vertex" => Ok(Element::Vertex(id)),
        "f" | "face" => Ok(Element::Face(id)),
        _ => bail!("element `{s}` must look like v:<id> or f:<id>"),
    }
}

fn lone_element(mesh: &QuadMesh, kind: SchemeKind) -> anyhow::Result<Element> {
    let c = classify_elements(mesh);
    let candidates: Vec<Element> = match kind {
        SchemeKind::Dual => c
            .extraordinary_faces
            .iter()
            .map(|&f| Element::Face(f))
            .collect(),
        SchemeKind::Primal => c
            .extraordinary_vertices
            .iter()
            .map(|&v| Element::Vertex(v))
            .collect(),
    };
    match candidates.as_slice() {
        [e] => Ok(*e),
        [] => bail!("no extraordinary element found; pass --element"),
        _ => bail!(
            "{} extraordinary elements found; pass --element",
            candidates.len()
        ),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitSummary {
    pub scheme: String,
    pub element: Element,
    pub valence: usize,
    pub q0: Vec3,
    pub beta0: Vec3,
    pub r_c: Vec3,
    pub n_inf: Option<Vec3>,
    pub normal: Option<NormalEstimate>,
    pub decay: Option<DecayFit>,
    pub limit: LimitPoint,
}

/// Limit point and limit normal at one extraordinary element.
pub fn cmd_limit(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let scheme = cfg.scheme()?;
    let mesh = cfg.input()?;
    let element = match &cfg.element {
        Some(e) => parse_element(e)?,
        None => lone_element(&mesh, scheme.kind())?,
    };
    let patch = extract_local_neighborhood(&mesh, element, scheme.kind())?;
    let n = patch.n;
    let limit = limit_point(scheme.as_ref(), n, &patch.points, &LimitOptions::default())?;
    let normal = if cfg.ktop >= 3 {
        let rings = generate_rings(scheme.as_ref(), &patch, cfg.ktop, cfg.depth)?;
        Some(estimate_limit_normal(&rings, limit.r_c)?)
    } else {
        None
    };
    let decay = if scheme.is_stationary() {
        None
    } else {
        decay_fit(scheme.as_ref(), n, 1..=cfg.ktop.max(5)).ok()
    };
    let summary = LimitSummary {
        scheme: scheme.id(),
        element,
        valence: n,
        q0: limit.q0,
        beta0: limit.beta0,
        r_c: limit.r_c,
        n_inf: normal.as_ref().map(|e| e.n_inf),
        normal,
        decay,
        limit,
    };
    Ok(Outcome {
        stdout: serde_json::to_string_pretty(&summary)? + "\n",
        all_pass: true,
    })
}

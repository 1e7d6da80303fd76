use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nssubdiv_cli::{run, Command, Format, RunConfig, Valences};

#[derive(Parser)]
#[command(
    name = "nssubdiv",
    version,
    about = "Non-stationary subdivision surfaces: refinement and extraordinary-element analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Refine a closed OBJ mesh, writing mesh_k.obj for every level.
    Refine {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check the convergence and normal-continuity hypotheses per valence.
    Analyze {
        /// Scheme id (same as --scheme).
        #[arg(value_name = "SCHEME")]
        scheme_id: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Limit point and limit normal at an extraordinary element.
    Limit {
        input: PathBuf,
        /// `v:<id>` or `f:<id>`; defaults to the only extraordinary element.
        #[arg(long)]
        element: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// ds, cc, trig-ds:h=<h>, exp-cc:theta=<t> or exp-cc:theta=<t>i
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    levels: Option<u32>,
    /// Valence range a..b.
    #[arg(long)]
    valences: Option<Valences>,
    /// Last level for decay fits and rings.
    #[arg(long)]
    ktop: Option<u32>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    depth: Option<u32>,
    #[arg(long)]
    tol_eigen: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, conflicts_with = "normalized")]
    raw: bool,
    #[arg(long)]
    normalized: bool,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Load settings from a RunConfig JSON file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved RunConfig as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

fn resolve(
    command: Command,
    positional: Option<String>,
    c: Common,
) -> anyhow::Result<(RunConfig, bool)> {
    let scheme = positional.or(c.scheme.clone());
    let mut cfg = match &c.config {
        Some(p) => RunConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => RunConfig::new(command, scheme.clone().unwrap_or_else(|| "ds".into())),
    };
    cfg.command = command;
    if let Some(s) = scheme {
        cfg.scheme = s;
    }
    if c.raw {
        cfg.normalized = false;
    }
    if c.normalized {
        cfg.normalized = true;
    }
    if let Some(v) = c.levels {
        cfg.levels = v;
    }
    if let Some(v) = c.valences {
        cfg.valences = v;
    }
    if let Some(v) = c.ktop {
        cfg.ktop = v;
    }
    if let Some(v) = c.grid {
        cfg.grid = v;
    }
    if let Some(v) = c.depth {
        cfg.depth = v;
    }
    if let Some(v) = c.tol_eigen {
        cfg.tolerances.eigen = v;
    }
    if c.out.is_some() {
        cfg.out = c.out;
    }
    if let Some(f) = c.format {
        cfg.format = f;
    }
    Ok((cfg, c.print_config))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resolved = match cli.command {
        Cmd::Refine { input, common } => {
            resolve(Command::Refine, None, common).map(|(mut c, p)| {
                c.input = Some(input);
                (c, p)
            })
        }
        Cmd::Analyze { scheme_id, common } => resolve(Command::Analyze, scheme_id, common),
        Cmd::Limit {
            input,
            element,
            common,
        } => resolve(Command::Limit, None, common).map(|(mut c, p)| {
            c.input = Some(input);
            if element.is_some() {
                c.element = element;
            }
            (c, p)
        }),
    };
    let (cfg, print_config) = match resolved {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    if print_config {
        println!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    match run(&cfg) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(outcome.stdout.as_bytes());
            if outcome.all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

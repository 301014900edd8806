//! Command-line front end: deterministic text or JSON output for every
//! computation the library exposes.

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{self, AnalysisError, SurfaceKnot};
use crate::coeff::GaussRat;
use crate::complex::{build_complex, simplify, BuildError, HomologyTable};
use crate::diagram::{parse_braid, parse_pd, DiagramError, LinkDiagram};
use crate::frobenius::eval_closed_surface;
use crate::skein;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: exit code 2.
    #[error("{0}")]
    Input(String),
    /// A computation-level failure such as a broken square: exit code 1.
    #[error("{0}")]
    Computation(String),
    /// A check that ran to completion but did not pass: exit code 1.
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Computation(_) | CliError::CheckFailed(_) => 1,
        }
    }
}

impl From<DiagramError> for CliError {
    fn from(e: DiagramError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BuildError> for CliError {
    fn from(e: BuildError) -> Self {
        CliError::Computation(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Build(b) => CliError::Computation(b.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Homology,
    Euler,
    Skein,
    Surface,
    Colorings,
    FoamEval,
    InvarianceCheck,
}

/// One diagram input: PD text or a braid word with a strand count.
#[derive(Debug, Clone, Default)]
pub struct DiagramInput {
    pub pd: Option<String>,
    pub braid: Option<String>,
    pub strands: Option<usize>,
}

impl DiagramInput {
    pub fn load(&self) -> Result<LinkDiagram, CliError> {
        match (&self.pd, &self.braid) {
            (Some(pd), None) => Ok(parse_pd(pd)?),
            (None, Some(word)) => {
                let strands = self
                    .strands
                    .ok_or_else(|| CliError::Input("--strands is required with --braid".into()))?;
                Ok(parse_braid(word, strands)?)
            }
            (Some(_), Some(_)) => Err(CliError::Input(
                "give either a PD code or a braid word, not both".into(),
            )),
            (None, None) => Err(CliError::Input(
                "an input diagram is required (--pd or --braid)".into(),
            )),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pd.is_none() && self.braid.is_none()
    }
}

/// A fully resolved invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: DiagramInput,
    pub input2: DiagramInput,
    pub a: Option<String>,
    pub h: Option<String>,
    pub genus: Option<u32>,
    pub dots: u32,
    pub format: OutputFormat,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

fn parse_param(name: &str, value: &Option<String>) -> Result<GaussRat, CliError> {
    let text = value
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("--{name} is required for this command")))?;
    if text == "symbolic" {
        return Err(CliError::Input(format!(
            "--{name} must be an exact value here; symbolic homology is only available at a = h = 0"
        )));
    }
    text.parse()
        .map_err(|e| CliError::Input(format!("--{name}: {e}")))
}

#[derive(Serialize)]
struct ValueOut<'a> {
    command: &'a str,
    value: String,
}

#[derive(Serialize)]
struct SurfaceOut {
    genus: u32,
    value: String,
}

#[derive(Serialize)]
struct FoamEvalOut {
    genus: u32,
    dots: u32,
    value: String,
}

#[derive(Serialize)]
struct ColoringsOut {
    n: usize,
    colorings: Vec<ColoringOut>,
}

#[derive(Serialize)]
struct ColoringOut {
    assignment: Vec<analysis::Color>,
    degree: i64,
}

#[derive(Serialize)]
struct InvarianceOut {
    pass: bool,
    left: HomologyTable,
    right: HomologyTable,
}

fn homology_of(d: &LinkDiagram, a: &GaussRat, h: &GaussRat) -> Result<HomologyTable, CliError> {
    let complex = simplify(build_complex(d)?);
    Ok(complex.homology(a, h))
}

/// Runs one command and renders its output. Deterministic for identical
/// inputs regardless of thread count.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    let _ = cfg.seed; // reserved for randomized stress commands
    match cfg.command {
        Command::Homology => {
            let d = cfg.input.load()?;
            let a = parse_param("a", &cfg.a)?;
            let h = parse_param("h", &cfg.h)?;
            let table = homology_of(&d, &a, &h)?;
            Ok(match cfg.format {
                OutputFormat::Json => table.to_json(),
                OutputFormat::Text => table.to_string(),
            })
        }
        Command::Euler => {
            let d = cfg.input.load()?;
            let chi = build_complex(&d)?.euler_characteristic();
            Ok(match cfg.format {
                OutputFormat::Json => serde_json::to_string(&ValueOut {
                    command: "euler",
                    value: chi.to_string(),
                })
                .unwrap(),
                OutputFormat::Text => chi.to_string(),
            })
        }
        Command::Skein => {
            let d = cfg.input.load()?;
            let p = skein::p2(&d);
            Ok(match cfg.format {
                OutputFormat::Json => serde_json::to_string(&ValueOut {
                    command: "skein",
                    value: p.to_string(),
                })
                .unwrap(),
                OutputFormat::Text => p.to_string(),
            })
        }
        Command::Surface => {
            let genus = cfg
                .genus
                .ok_or_else(|| CliError::Input("--genus is required".into()))?;
            let value = analysis::surface_invariant(SurfaceKnot { genus });
            Ok(match cfg.format {
                OutputFormat::Json => serde_json::to_string(&SurfaceOut {
                    genus,
                    value: value.to_string(),
                })
                .unwrap(),
                OutputFormat::Text => value.to_string(),
            })
        }
        Command::FoamEval => {
            let genus = cfg
                .genus
                .ok_or_else(|| CliError::Input("--genus is required".into()))?;
            let value = eval_closed_surface(genus, cfg.dots);
            Ok(match cfg.format {
                OutputFormat::Json => serde_json::to_string(&FoamEvalOut {
                    genus,
                    dots: cfg.dots,
                    value: value.to_string(),
                })
                .unwrap(),
                OutputFormat::Text => value.to_string(),
            })
        }
        Command::Colorings => {
            let d = cfg.input.load()?;
            let a = parse_param("a", &cfg.a)?;
            let h = parse_param("h", &cfg.h)?;
            let colorings = analysis::predict_colorings(&d, &a, &h)?;
            match cfg.format {
                OutputFormat::Json => Ok(serde_json::to_string(&ColoringsOut {
                    n: d.n_components(),
                    colorings: colorings
                        .into_iter()
                        .map(|(c, degree)| ColoringOut {
                            assignment: c.assignment,
                            degree,
                        })
                        .collect(),
                })
                .unwrap()),
                OutputFormat::Text => {
                    let mut lines = Vec::new();
                    for (c, degree) in colorings {
                        let word: String = c
                            .assignment
                            .iter()
                            .map(|v| match v {
                                analysis::Color::Alpha => 'a',
                                analysis::Color::Beta => 'b',
                            })
                            .collect();
                        lines.push(format!("{word} -> degree {degree}"));
                    }
                    Ok(lines.join("\n"))
                }
            }
        }
        Command::InvarianceCheck => {
            let d1 = cfg.input.load()?;
            if cfg.input2.is_empty() {
                return Err(CliError::Input(
                    "a second diagram is required (--pd2 or --braid2)".into(),
                ));
            }
            let d2 = cfg.input2.load()?;
            let a = parse_param("a", &cfg.a)?;
            let h = parse_param("h", &cfg.h)?;
            let left = homology_of(&d1, &a, &h)?;
            let right = homology_of(&d2, &a, &h)?;
            let pass = left == right;
            let rendered = match cfg.format {
                OutputFormat::Json => {
                    serde_json::to_string(&InvarianceOut { pass, left, right }).unwrap()
                }
                OutputFormat::Text => {
                    if pass {
                        "pass: homology tables agree".to_string()
                    } else {
                        format!("fail: homology tables differ\nleft:\n{left}\nright:\n{right}")
                    }
                }
            };
            if pass {
                Ok(rendered)
            } else {
                Err(CliError::CheckFailed(rendered))
            }
        }
    }
}

/// Applies thread settings (flag first, then FOAMCALC_THREADS) and runs the
/// command inside a dedicated thread pool.
pub fn run_with_threads(cfg: &RunConfig) -> Result<String, CliError> {
    let threads = cfg.threads.or_else(|| {
        std::env::var("FOAMCALC_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Computation(format!("thread pool: {e}")))?;
            pool.install(|| run(cfg))
        }
        _ => run(cfg),
    }
}

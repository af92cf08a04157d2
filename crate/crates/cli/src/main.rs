//! `dcs`: generate, analyze, solve and reduce certificate-selection instances.
//!
//! Exit codes: 0 success, 1 infeasible, 2 input error, 3 budget exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dcs_core::generators::{
    gadget_zoo, letters_digits, random_csi, zoo_entry, RandomCsiParams, RNG_ALGORITHM,
};
use dcs_core::io::{
    export_dot, parse_artifact, parse_report, parse_set_system, parse_source_graph, read_instance,
    write_instance, AfcSection, ArtifactDocument, IoError, MetricsSection, Provenance,
    ReportDocument, SolutionSection, SourceDocument,
};
use dcs_core::metrics::{afc_exact, afc_greedy};
use dcs_core::reductions::{
    dks_brute, lift_dks, lift_mku, mku_brute, reduce_dks, reduce_mku, ReductionArtifact,
    ReductionKind,
};
use dcs_core::solvers::{
    solve_dcs2_exact, solve_dcs_exact, solve_dcs_greedy, DEFAULT_CERTIFICATE_BUDGET,
};
use dcs_core::{CsInstance, DcsSolution, Error, ExactRatio};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(
    name = "dcs",
    version,
    about = "Deceptive certificate selection toolkit"
)]
struct Cli {
    /// Largest certificate count for exhaustive enumeration.
    #[arg(long, global = true, env = "DCS_MAX_CERTIFICATES", default_value_t = DEFAULT_CERTIFICATE_BUDGET)]
    max_certificates: usize,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Record the wall-clock time in report provenance (breaks byte-identical output).
    #[arg(long, global = true)]
    timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Report every metric of an instance, with the AFC.
    Analyze {
        instance: PathBuf,
        /// Seed for the greedy AFC bound when the instance is over budget.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Maximise 1 - Pr(M) under completeness and soundness constraints.
    SolveDcs {
        /// Instance document or reduction artifact.
        input: PathBuf,
        /// Defaults to the artifact's value.
        #[arg(long)]
        eps_c: Option<ExactRatio>,
        /// Defaults to the artifact's value.
        #[arg(long)]
        eps_s: Option<ExactRatio>,
        #[command(flatten)]
        mode: Mode,
    },
    /// Minimise 1 - sound(A) under completeness and a precision ceiling 1 - q.
    SolveDcs2 {
        input: PathBuf,
        #[arg(long)]
        eps_c: Option<ExactRatio>,
        #[arg(long)]
        q: Option<ExactRatio>,
    },
    /// Build a reduction artifact from a source problem file.
    Reduce {
        problem: SourceKind,
        source: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Map a solution report on an artifact back to the source problem.
    Lift {
        artifact: PathBuf,
        solution: PathBuf,
    },
    /// Brute-force optimum of a source problem.
    Oracle {
        problem: SourceKind,
        source: PathBuf,
        /// Subset size: k vertices for dks, l sets for mku.
        #[arg(long)]
        k: usize,
    },
    /// Graphviz description, optionally marking a solution.
    ExportDot {
        instance: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Recompute every metric in a report and compare exactly.
    Verify { report: PathBuf },
}

#[derive(Subcommand)]
enum Family {
    LettersDigits {
        #[arg(long)]
        n: usize,
    },
    Random {
        #[arg(long)]
        n_in: usize,
        #[arg(long)]
        n_out: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "1/2")]
        p_in: ExactRatio,
        #[arg(long, default_value = "1/2")]
        p_out: ExactRatio,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// One of the fixed named instances.
    Zoo {
        #[arg(long)]
        name: String,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct Mode {
    /// Exhaustive search (default).
    #[arg(long)]
    exact: bool,
    /// Local search; the result is not guaranteed optimal.
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceKind {
    Dks,
    Mku,
}

struct Ctx {
    budget: usize,
    timestamp: bool,
    inputs: Vec<Vec<u8>>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        let text = String::from_utf8(bytes.clone())
            .with_context(|| format!("{} is not UTF-8", path.display()))?;
        self.inputs.push(bytes);
        Ok(text)
    }

    fn provenance(&self) -> Provenance {
        let mut hasher = Sha256::new();
        for input in &self.inputs {
            hasher.update(input);
        }
        Provenance {
            input_sha256: hex::encode(hasher.finalize()),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            flags: std::env::args().skip(1).collect(),
            timestamp: self.timestamp.then(|| {
                let secs = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                format!("{secs}")
            }),
        }
    }

    fn instance(&mut self, path: &Path) -> Result<(CsInstance, Map<String, Value>)> {
        let text = self.read(path)?;
        let (instance, warnings, metadata) = read_instance(&text)?;
        for w in warnings {
            eprintln!("warning: {w}");
        }
        Ok((instance, metadata))
    }
}

/// An instance file, or an artifact bundle carrying its own tolerances.
struct Input {
    instance: CsInstance,
    metadata: Map<String, Value>,
    artifact: Option<ReductionArtifact>,
}

impl Input {
    fn load(ctx: &mut Ctx, path: &Path) -> Result<Self> {
        let text = ctx.read(path)?;
        let value: Value =
            serde_json::from_str(&text).map_err(|e| IoError::Parse(e.to_string()))?;
        if value.get("source").is_some() && value.get("gadgets").is_some() {
            let artifact = parse_artifact(&text)?.to_artifact()?;
            let kind = match artifact.kind {
                ReductionKind::DensestKSubgraph => "dks",
                ReductionKind::MinKUnion => "mku",
            };
            let mut metadata = Map::new();
            metadata.insert("reduction".into(), json!(kind));
            metadata.insert("k".into(), json!(artifact.k));
            Ok(Input {
                instance: artifact.instance.clone(),
                metadata,
                artifact: Some(artifact),
            })
        } else {
            let (instance, warnings, metadata) = read_instance(&text)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            Ok(Input {
                instance,
                metadata,
                artifact: None,
            })
        }
    }

    /// The flag value, else the artifact's value, else an input error.
    fn param(
        &self,
        flag: Option<ExactRatio>,
        name: &str,
        pick: fn(&ReductionArtifact) -> Option<ExactRatio>,
    ) -> Result<ExactRatio> {
        flag.or_else(|| self.artifact.as_ref().and_then(pick))
            .ok_or_else(|| Error::InvalidArgument(format!("--{name} is required")).into())
    }
}

fn solution_report(ctx: &Ctx, command: &str, input: &Input, solution: &DcsSolution) -> String {
    let instance = &input.instance;
    let mut report =
        ReportDocument::new(command, instance, input.metadata.clone(), ctx.provenance());
    report.metrics = Some(MetricsSection::compute(instance));
    report.solution = Some(SolutionSection::from_solution(instance, solution));
    report.to_json()
}

fn json_line(value: Value) -> String {
    let mut text = serde_json::to_string_pretty(&value).expect("json value");
    text.push('\n');
    text
}

fn run(cli: Cli) -> Result<String> {
    let mut ctx = Ctx {
        budget: cli.max_certificates,
        timestamp: cli.timestamp,
        inputs: Vec::new(),
    };
    match cli.command {
        Command::Generate { family } => generate(family),
        Command::Analyze { instance, seed } => {
            let (inst, metadata) = ctx.instance(&instance)?;
            let mut report = ReportDocument::new("analyze", &inst, metadata, ctx.provenance());
            report.metrics = Some(MetricsSection::compute(&inst));
            let witness = match afc_exact(&inst, ctx.budget) {
                Err(Error::BudgetExceeded { size, budget, .. }) => {
                    eprintln!("note: {size} certificates exceed the budget {budget}; reporting a greedy lower bound");
                    afc_greedy(&inst, seed).map(Some)
                }
                Err(Error::AfcUndefined) => {
                    eprintln!("note: AFC undefined, no certificate set touches both classes");
                    Ok(None)
                }
                other => other.map(Some),
            }?;
            report.afc = witness.map(|w| AfcSection::from_witness(&inst, &w));
            Ok(report.to_json())
        }
        Command::SolveDcs {
            input,
            eps_c,
            eps_s,
            mode,
        } => {
            let input = Input::load(&mut ctx, &input)?;
            let eps_c = input.param(eps_c, "eps-c", |a| Some(a.eps_c.clone()))?;
            let eps_s = input.param(eps_s, "eps-s", |a| a.eps_s.clone())?;
            let solution = if mode.greedy {
                solve_dcs_greedy(&input.instance, &eps_c, &eps_s, mode.seed)?
            } else {
                solve_dcs_exact(&input.instance, &eps_c, &eps_s, ctx.budget)?
            };
            Ok(solution_report(&ctx, "solve-dcs", &input, &solution))
        }
        Command::SolveDcs2 { input, eps_c, q } => {
            let input = Input::load(&mut ctx, &input)?;
            let eps_c = input.param(eps_c, "eps-c", |a| Some(a.eps_c.clone()))?;
            let q = input.param(q, "q", |a| a.q.clone())?;
            let solution = solve_dcs2_exact(&input.instance, &eps_c, &q, ctx.budget)?;
            Ok(solution_report(&ctx, "solve-dcs2", &input, &solution))
        }
        Command::Reduce { problem, source, k } => {
            let text = ctx.read(&source)?;
            let doc = match problem {
                SourceKind::Dks => {
                    let graph = parse_source_graph(&text)?;
                    ArtifactDocument::new(
                        &reduce_dks(&graph, k)?,
                        SourceDocument::from_graph(&graph),
                    )
                }
                SourceKind::Mku => {
                    let system = parse_set_system(&text)?;
                    ArtifactDocument::new(
                        &reduce_mku(&system, k)?,
                        SourceDocument::from_set_system(&system),
                    )
                }
            };
            Ok(doc.to_json())
        }
        Command::Lift { artifact, solution } => {
            let artifact = parse_artifact(&ctx.read(&artifact)?)?.to_artifact()?;
            let report = parse_report(&ctx.read(&solution)?)?;
            let (instance, _) = report.instance.to_instance()?;
            if instance != artifact.instance {
                return Err(Error::ArtifactMismatch(
                    "the report was computed on a different instance".into(),
                )
                .into());
            }
            let section = report
                .solution
                .ok_or_else(|| Error::InvalidArgument("the report holds no solution".into()))?;
            let solution = section.to_solution(&instance)?;
            Ok(match artifact.kind {
                ReductionKind::DensestKSubgraph => {
                    let lift = lift_dks(&artifact, &solution)?;
                    json_line(json!({
                        "problem": "dks",
                        "k": artifact.k,
                        "vertices": lift.vertices,
                        "induced_edges": lift.induced_edges,
                        "phi1_edges": lift.phi1_edges,
                    }))
                }
                ReductionKind::MinKUnion => {
                    let lift = lift_mku(&artifact, &solution)?;
                    let sets: Vec<&str> = lift
                        .set_indices
                        .iter()
                        .map(|&g| artifact.gadgets[g].source.as_str())
                        .collect();
                    json_line(json!({
                        "problem": "mku",
                        "k": artifact.k,
                        "sets": sets,
                        "union_size": lift.union_size,
                    }))
                }
            })
        }
        Command::Oracle { problem, source, k } => {
            let text = ctx.read(&source)?;
            let (name, optimum) = match problem {
                SourceKind::Dks => ("dks", dks_brute(&parse_source_graph(&text)?, k)?),
                SourceKind::Mku => ("mku", mku_brute(&parse_set_system(&text)?, k)?),
            };
            Ok(json_line(
                json!({ "problem": name, "k": k, "optimum": optimum }),
            ))
        }
        Command::ExportDot { instance, solution } => {
            let (inst, _) = ctx.instance(&instance)?;
            let solution = match solution {
                None => None,
                Some(path) => {
                    let report = parse_report(&ctx.read(&path)?)?;
                    let section = report.solution.ok_or_else(|| {
                        Error::InvalidArgument("the report holds no solution".into())
                    })?;
                    Some(section.to_solution(&inst)?)
                }
            };
            Ok(export_dot(&inst, solution.as_ref()))
        }
        Command::Verify { report } => {
            let doc = parse_report(&ctx.read(&report)?)?;
            doc.verify()?;
            Ok("ok: every reported metric recomputes exactly\n".into())
        }
    }
}

fn generate(family: Family) -> Result<String> {
    let mut metadata = Map::new();
    let instance = match family {
        Family::LettersDigits { n } => {
            metadata.insert("generator".into(), json!("letters-digits"));
            metadata.insert("params".into(), json!({ "n": n }));
            letters_digits(n)?
        }
        Family::Random {
            n_in,
            n_out,
            m,
            p_in,
            p_out,
            seed,
        } => {
            let params = RandomCsiParams {
                n_in,
                n_out,
                m,
                p_in,
                p_out,
                seed,
            };
            let generated = random_csi(&params)?;
            metadata.insert("generator".into(), json!("random-csi"));
            metadata.insert("rng".into(), json!(RNG_ALGORITHM));
            metadata.insert("params".into(), serde_json::to_value(&params)?);
            metadata.insert("repaired".into(), json!(generated.repaired));
            generated.instance
        }
        Family::Zoo { name } => {
            let Some(entry) = zoo_entry(&name) else {
                let names: Vec<_> = gadget_zoo().iter().map(|e| e.name).collect();
                bail!(Error::InvalidArgument(format!(
                    "unknown zoo entry {name:?}; known: {}",
                    names.join(", ")
                )));
            };
            metadata.insert("generator".into(), json!("gadget-zoo"));
            metadata.insert("name".into(), json!(entry.name));
            entry.instance
        }
    };
    Ok(write_instance(&instance, metadata))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let core = err
        .downcast_ref::<Error>()
        .or_else(|| match err.downcast_ref::<IoError>() {
            Some(IoError::Core(e)) => Some(e),
            _ => None,
        });
    match core {
        Some(Error::Infeasible) => 1,
        Some(Error::BudgetExceeded { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let result = run(cli).and_then(|text| match &output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

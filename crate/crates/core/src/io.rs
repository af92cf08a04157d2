//! File formats: JSON instance, report and artifact documents, the plain-text
//! source formats, and Graphviz export.
//!
//! Every rational is written as a lowest-terms `"p/q"` string.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::Error;
use crate::metrics::{
    afc_of_set, certificate_precision, verifier_precision, verifier_precision_formula, AfcWitness,
};
use crate::model::{CsInstance, ProverAssignment, RawInstance, VerifierAcceptance, Warning};
use crate::ratio::ExactRatio;
use crate::reductions::{
    reduce_dks, reduce_mku, Gadget, ReductionArtifact, ReductionKind, SetSystem, SourceGraph,
};
use crate::solvers::{DcsSolution, Problem};

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum IoError {
    /// Malformed text.
    #[error("parse error: {0}")]
    Parse(String),
    /// Well-formed text describing something invalid.
    #[error(transparent)]
    Core(#[from] Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> IoResult<T> {
    serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("documents always serialize");
    text.push('\n');
    text
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub format_version: String,
    /// Free-form; unknown keys survive a round trip.
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub metadata: Map<String, Value>,
    pub in_class: Vec<String>,
    pub out_class: Vec<String>,
    pub certificates: Vec<String>,
    /// `[datapoint, certificate]` pairs.
    pub edges: Vec<(String, String)>,
}

impl InstanceDocument {
    pub fn from_instance(instance: &CsInstance, metadata: Map<String, Value>) -> Self {
        let raw = instance.to_raw();
        InstanceDocument {
            format_version: FORMAT_VERSION.into(),
            metadata,
            in_class: raw.in_class,
            out_class: raw.out_class,
            certificates: raw.certificates,
            edges: raw.edges,
        }
    }

    /// Validates and builds the instance; duplicate edges collapse with a warning.
    pub fn to_instance(&self) -> IoResult<(CsInstance, Vec<Warning>)> {
        let raw = RawInstance {
            in_class: self.in_class.clone(),
            out_class: self.out_class.clone(),
            certificates: self.certificates.clone(),
            edges: self.edges.clone(),
        };
        Ok(CsInstance::from_raw(&raw)?)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub fn parse_instance_document(text: &str) -> IoResult<InstanceDocument> {
    parse_json(text)
}

/// Parses and validates an instance document.
pub fn read_instance(text: &str) -> IoResult<(CsInstance, Vec<Warning>, Map<String, Value>)> {
    let doc = parse_instance_document(text)?;
    let (instance, warnings) = doc.to_instance()?;
    Ok((instance, warnings, doc.metadata))
}

pub fn write_instance(instance: &CsInstance, metadata: Map<String, Value>) -> String {
    InstanceDocument::from_instance(instance, metadata).to_json()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsSection {
    pub num_in_class: usize,
    pub num_out_class: usize,
    pub num_certificates: usize,
    pub num_edges: usize,
    pub max_features_per_datapoint: usize,
    pub certificate_precision: BTreeMap<String, ExactRatio>,
    /// Precision of the whole certificate set; absent when it touches nothing.
    pub all_certificates_precision: Option<ExactRatio>,
}

impl MetricsSection {
    pub fn compute(instance: &CsInstance) -> Self {
        let certificate_precision = (0..instance.num_certificates())
            .filter_map(|c| {
                let p = certificate_precision(instance, c).ok()?;
                Some((instance.certificates()[c].clone(), p))
            })
            .collect();
        MetricsSection {
            num_in_class: instance.num_in(),
            num_out_class: instance.num_out(),
            num_certificates: instance.num_certificates(),
            num_edges: instance.edge_count(),
            max_features_per_datapoint: instance.max_features_per_datapoint(),
            certificate_precision,
            all_certificates_precision: verifier_precision(
                instance,
                &VerifierAcceptance::all(instance),
            )
            .ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AfcTermDocument {
    pub datapoint: String,
    pub certificate: String,
    pub kappa: ExactRatio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AfcSection {
    pub value: ExactRatio,
    /// `true` for the exhaustive optimum, `false` for a greedy lower bound.
    pub exact: bool,
    pub witness_set: Vec<String>,
    pub terms: Vec<AfcTermDocument>,
}

impl AfcSection {
    pub fn from_witness(instance: &CsInstance, witness: &AfcWitness) -> Self {
        AfcSection {
            value: witness.value.clone(),
            exact: witness.exact,
            witness_set: instance.certificate_ids(&witness.witness_set),
            terms: witness
                .terms
                .iter()
                .map(|t| AfcTermDocument {
                    datapoint: instance.in_class()[t.datapoint].clone(),
                    certificate: instance.certificates()[t.certificate].clone(),
                    kappa: t.kappa.clone(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSection {
    #[serde(flatten)]
    pub problem: Problem,
    pub accepted: Vec<String>,
    /// In-class datapoint to certificate.
    pub prover: BTreeMap<String, String>,
    pub objective: ExactRatio,
    pub completeness: ExactRatio,
    pub soundness: ExactRatio,
    pub prover_precision: ExactRatio,
    pub verifier_precision: Option<ExactRatio>,
    pub verifier_precision_formula: Option<ExactRatio>,
    pub optimal: bool,
}

impl SolutionSection {
    pub fn from_solution(instance: &CsInstance, solution: &DcsSolution) -> Self {
        SolutionSection {
            problem: solution.problem.clone(),
            accepted: solution.verifier.to_ids(instance),
            prover: solution.prover.to_id_map(instance),
            objective: solution.objective.clone(),
            completeness: solution.achieved_completeness.clone(),
            soundness: solution.achieved_soundness.clone(),
            prover_precision: solution.achieved_prover_precision.clone(),
            verifier_precision: verifier_precision(instance, &solution.verifier).ok(),
            verifier_precision_formula: verifier_precision_formula(instance, &solution.verifier)
                .ok(),
            optimal: solution.optimal,
        }
    }

    /// Rebuilds the strategy pair and every metric from `instance`.
    pub fn to_solution(&self, instance: &CsInstance) -> IoResult<DcsSolution> {
        let verifier = VerifierAcceptance::from_ids(instance, &self.accepted)?;
        let pairs: Vec<(&String, &String)> = self.prover.iter().collect();
        let prover = ProverAssignment::from_ids(instance, &pairs)?;
        Ok(DcsSolution::assemble(
            instance,
            self.problem.clone(),
            verifier,
            prover,
            self.optimal,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the input file(s), hex.
    pub input_sha256: String,
    pub tool_version: String,
    pub flags: Vec<String>,
    /// Only written on request, so reports stay byte-identical by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub format_version: String,
    pub command: String,
    pub instance: InstanceDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub afc: Option<AfcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionSection>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn new(
        command: &str,
        instance: &CsInstance,
        metadata: Map<String, Value>,
        provenance: Provenance,
    ) -> Self {
        ReportDocument {
            format_version: FORMAT_VERSION.into(),
            command: command.into(),
            instance: InstanceDocument::from_instance(instance, metadata),
            metrics: None,
            afc: None,
            solution: None,
            provenance,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Recomputes every stored metric from the embedded instance and
    /// solution; any difference is an error naming the section.
    pub fn verify(&self) -> IoResult<()> {
        let (instance, _) = self.instance.to_instance()?;
        let mismatch = |what: &str| {
            Err(IoError::Core(Error::InvalidArgument(format!(
                "{what} does not match"
            ))))
        };
        if let Some(metrics) = &self.metrics {
            if *metrics != MetricsSection::compute(&instance) {
                return mismatch("metrics section");
            }
        }
        if let Some(afc) = &self.afc {
            let set = instance.certificate_indices(&afc.witness_set)?;
            let mut fresh = AfcSection::from_witness(&instance, &afc_of_set(&instance, &set)?);
            fresh.exact = afc.exact;
            if fresh != *afc {
                return mismatch("afc section");
            }
        }
        if let Some(section) = &self.solution {
            let solution = section.to_solution(&instance)?;
            if SolutionSection::from_solution(&instance, &solution) != *section {
                return mismatch("solution section");
            }
            solution.verify(&instance)?;
        }
        Ok(())
    }
}

pub fn parse_report(text: &str) -> IoResult<ReportDocument> {
    parse_json(text)
}

/// Source of a reduction, stored with its artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SourceDocument {
    Graph {
        vertices: Vec<String>,
        edges: Vec<(String, String)>,
    },
    SetSystem {
        universe: Vec<String>,
        sets: Vec<Vec<String>>,
    },
}

impl SourceDocument {
    pub fn from_graph(graph: &SourceGraph) -> Self {
        let v = graph.vertices();
        SourceDocument::Graph {
            vertices: v.to_vec(),
            edges: graph
                .edges()
                .iter()
                .map(|&(a, b)| (v[a].clone(), v[b].clone()))
                .collect(),
        }
    }

    pub fn from_set_system(system: &SetSystem) -> Self {
        let u = system.universe();
        SourceDocument::SetSystem {
            universe: u.to_vec(),
            sets: system
                .sets()
                .iter()
                .map(|s| s.iter().map(|&e| u[e].clone()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArtifactDocument {
    pub format_version: String,
    pub kind: ReductionKind,
    pub k: usize,
    pub eps_c: ExactRatio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_s: Option<ExactRatio>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<ExactRatio>,
    pub source: SourceDocument,
    pub instance: InstanceDocument,
    pub gadgets: Vec<Gadget>,
    pub vertex_map: Vec<(String, String)>,
}

impl ArtifactDocument {
    pub fn new(artifact: &ReductionArtifact, source: SourceDocument) -> Self {
        ArtifactDocument {
            format_version: FORMAT_VERSION.into(),
            kind: artifact.kind,
            k: artifact.k,
            eps_c: artifact.eps_c.clone(),
            eps_s: artifact.eps_s.clone(),
            q: artifact.q.clone(),
            source,
            instance: InstanceDocument::from_instance(&artifact.instance, Map::new()),
            gadgets: artifact.gadgets.clone(),
            vertex_map: artifact.vertex_map.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Rebuilds the artifact from the stored source and checks that every
    /// stored field agrees with the rebuilt one.
    pub fn to_artifact(&self) -> IoResult<ReductionArtifact> {
        let artifact = match (&self.kind, &self.source) {
            (ReductionKind::DensestKSubgraph, SourceDocument::Graph { vertices, edges }) => {
                reduce_dks(&SourceGraph::new(vertices, edges)?, self.k)?
            }
            (ReductionKind::MinKUnion, SourceDocument::SetSystem { universe, sets }) => {
                reduce_mku(&SetSystem::new(universe, sets)?, self.k)?
            }
            _ => {
                return Err(IoError::Core(Error::ArtifactMismatch(
                    "source type does not match the reduction kind".into(),
                )))
            }
        };
        let (instance, _) = self.instance.to_instance()?;
        if instance != artifact.instance
            || self.eps_c != artifact.eps_c
            || self.eps_s != artifact.eps_s
            || self.q != artifact.q
            || self.gadgets != artifact.gadgets
            || self.vertex_map != artifact.vertex_map
        {
            return Err(IoError::Core(Error::ArtifactMismatch(
                "stored instance or parameters differ from a fresh reduction of the stored source"
                    .into(),
            )));
        }
        Ok(artifact)
    }
}

pub fn parse_artifact(text: &str) -> IoResult<ArtifactDocument> {
    parse_json(text)
}

/// Non-blank, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    key: &str,
) -> IoResult<Vec<String>> {
    let (_, first) = lines
        .next()
        .ok_or_else(|| IoError::Parse(format!("empty file, expected a \"{key}:\" header")))?;
    let rest = first
        .strip_prefix(key)
        .and_then(|r| r.trim_start().strip_prefix(':'))
        .ok_or_else(|| {
            IoError::Parse(format!("first line must be \"{key}: ...\", got {first:?}"))
        })?;
    Ok(rest.split_whitespace().map(str::to_string).collect())
}

/// Graph text: a `vertices: a b c` header, then one `u v` edge per line.
/// `#` starts a comment.
pub fn parse_source_graph(text: &str) -> IoResult<SourceGraph> {
    let mut lines = content_lines(text);
    let vertices = header(&mut lines, "vertices")?;
    let mut edges = Vec::new();
    for (n, line) in lines {
        match line.split_whitespace().collect::<Vec<_>>()[..] {
            [u, v] => edges.push((u.to_string(), v.to_string())),
            _ => {
                return Err(IoError::Parse(format!(
                    "line {n}: expected \"u v\", got {line:?}"
                )))
            }
        }
    }
    Ok(SourceGraph::new(&vertices, &edges)?)
}

pub fn write_source_graph(graph: &SourceGraph) -> String {
    let v = graph.vertices();
    let mut out = format!("vertices: {}\n", v.join(" "));
    for &(a, b) in graph.edges() {
        let _ = writeln!(out, "{} {}", v[a], v[b]);
    }
    out
}

/// Set-system text: a `universe: 1 2 3` header, then one set per line as
/// space-separated element ids.
pub fn parse_set_system(text: &str) -> IoResult<SetSystem> {
    let mut lines = content_lines(text);
    let universe = header(&mut lines, "universe")?;
    let sets: Vec<Vec<String>> = lines
        .map(|(_, l)| l.split_whitespace().map(str::to_string).collect())
        .collect();
    Ok(SetSystem::new(&universe, &sets)?)
}

pub fn write_set_system(system: &SetSystem) -> String {
    let u = system.universe();
    let mut out = format!("universe: {}\n", u.join(" "));
    for set in system.sets() {
        let ids: Vec<&str> = set.iter().map(|&e| u[e].as_str()).collect();
        let _ = writeln!(out, "{}", ids.join(" "));
    }
    out
}

fn quote(id: &str) -> String {
    format!("\"{}\"", id.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz description with three ranks (in-class, certificates,
/// out-class). Accepted certificates get `class="accepted"` and a fill;
/// edges chosen by the prover are drawn bold.
pub fn export_dot(instance: &CsInstance, solution: Option<&DcsSolution>) -> String {
    let mut out = String::from("graph csi {\n  rankdir=LR;\n");
    let rank = |out: &mut String, name: &str, ids: &[String], attrs: &dyn Fn(usize) -> String| {
        let _ = writeln!(out, "  subgraph {name} {{\n    rank=same;");
        for (i, id) in ids.iter().enumerate() {
            let _ = writeln!(out, "    {} [{}];", quote(id), attrs(i));
        }
        out.push_str("  }\n");
    };
    rank(&mut out, "in_class", instance.in_class(), &|_| {
        "shape=circle, class=\"in-class\"".into()
    });
    rank(&mut out, "certificates", instance.certificates(), &|c| {
        if solution.is_some_and(|s| s.verifier.accepts(c)) {
            "shape=box, class=\"accepted\", style=filled, fillcolor=palegreen".into()
        } else {
            "shape=box, class=\"certificate\"".into()
        }
    });
    rank(&mut out, "out_class", instance.out_class(), &|_| {
        "shape=doublecircle, class=\"out-class\"".into()
    });
    for x in 0..instance.num_in() {
        for &c in instance.in_neighbors(x) {
            let chosen = solution.is_some_and(|s| s.prover.certificate_for(x) == c);
            let style = if chosen {
                " [class=\"prover\", penwidth=3, color=blue]"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  {} -- {}{};",
                quote(&instance.in_class()[x]),
                quote(&instance.certificates()[c]),
                style
            );
        }
    }
    for c in 0..instance.num_certificates() {
        for &y in instance.certificate_out(c) {
            let _ = writeln!(
                out,
                "  {} -- {};",
                quote(&instance.certificates()[c]),
                quote(&instance.out_class()[y])
            );
        }
    }
    out.push_str("}\n");
    out
}

//! The tripartite certificate-selection instance and the two players' strategies.
//!
//! An instance has in-class datapoints, out-class datapoints and certificates;
//! edges only ever join a datapoint to a certificate. Ids are opaque strings and
//! every id list is kept in lexicographic order, which is also the order used for
//! all deterministic tie-breaking in the crate.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unvalidated instance data, as read from a file or built by hand.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub in_class: Vec<String>,
    pub out_class: Vec<String>,
    pub certificates: Vec<String>,
    /// `(datapoint, certificate)` pairs. The reverse orientation is accepted too.
    pub edges: Vec<(String, String)>,
}

impl RawInstance {
    pub fn new<S: AsRef<str>>(
        in_class: &[S],
        out_class: &[S],
        certificates: &[S],
        edges: &[(S, S)],
    ) -> Self {
        let owned = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>();
        RawInstance {
            in_class: owned(in_class),
            out_class: owned(out_class),
            certificates: owned(certificates),
            edges: edges
                .iter()
                .map(|(a, b)| (a.as_ref().to_string(), b.as_ref().to_string()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexSet {
    InClass,
    OutClass,
    Certificates,
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexSet::InClass => "in-class",
            VertexSet::OutClass => "out-class",
            VertexSet::Certificates => "certificates",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    EmptyInClass,
    EmptyOutClass,
    EmptyCertificates,
    DuplicateId { set: VertexSet, id: String },
    SharedId { id: String, sets: Vec<VertexSet> },
    UnknownEndpoint { edge: (String, String), id: String },
    EdgeBetweenCertificates { edge: (String, String) },
    EdgeBetweenDatapoints { edge: (String, String) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyInClass => write!(f, "empty in-class set"),
            Violation::EmptyOutClass => write!(f, "empty out-class set"),
            Violation::EmptyCertificates => write!(f, "empty certificate set"),
            Violation::DuplicateId { set, id } => write!(f, "duplicate id {id:?} in {set} set"),
            Violation::SharedId { id, sets } => {
                let names: Vec<_> = sets.iter().map(ToString::to_string).collect();
                write!(
                    f,
                    "id {id:?} appears in several vertex sets ({})",
                    names.join(", ")
                )
            }
            Violation::UnknownEndpoint { edge, id } => {
                write!(
                    f,
                    "edge ({}, {}) references unknown id {id:?}",
                    edge.0, edge.1
                )
            }
            Violation::EdgeBetweenCertificates { edge } => {
                write!(f, "edge ({}, {}) joins two certificates", edge.0, edge.1)
            }
            Violation::EdgeBetweenDatapoints { edge } => {
                write!(f, "edge ({}, {}) joins two datapoints", edge.0, edge.1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Warning {
    /// Collapsed into a single edge.
    DuplicateEdge {
        datapoint: String,
        certificate: String,
    },
    /// Legal, but no prover assignment can exist.
    IsolatedInClass { id: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::DuplicateEdge {
                datapoint,
                certificate,
            } => {
                write!(f, "duplicate edge ({datapoint}, {certificate}) collapsed")
            }
            Warning::IsolatedInClass { id } => {
                write!(
                    f,
                    "in-class datapoint {id:?} has no certificate; no prover exists"
                )
            }
        }
    }
}

/// Outcome of [`validate`]. The instance is valid iff `violations` is empty;
/// warnings never make an instance invalid.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<Warning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "error: {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Checks every structural invariant of a raw instance without building it.
pub fn validate(raw: &RawInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let sets = [
        (VertexSet::InClass, &raw.in_class),
        (VertexSet::OutClass, &raw.out_class),
        (VertexSet::Certificates, &raw.certificates),
    ];

    if raw.in_class.is_empty() {
        report.violations.push(Violation::EmptyInClass);
    }
    if raw.out_class.is_empty() {
        report.violations.push(Violation::EmptyOutClass);
    }
    if raw.certificates.is_empty() {
        report.violations.push(Violation::EmptyCertificates);
    }

    let mut membership: BTreeMap<&str, Vec<VertexSet>> = BTreeMap::new();
    for (set, ids) in sets {
        let mut seen = BTreeSet::new();
        for id in ids.iter() {
            if !seen.insert(id.as_str()) {
                report.violations.push(Violation::DuplicateId {
                    set,
                    id: id.clone(),
                });
                continue;
            }
            membership.entry(id.as_str()).or_default().push(set);
        }
    }
    for (id, member_of) in &membership {
        if member_of.len() > 1 {
            report.violations.push(Violation::SharedId {
                id: id.to_string(),
                sets: member_of.clone(),
            });
        }
    }

    let mut seen_edges = BTreeSet::new();
    let mut degree: HashMap<&str, usize> = HashMap::new();
    for (a, b) in &raw.edges {
        let edge = (a.clone(), b.clone());
        let kind_a = membership.get(a.as_str()).map(|s| s[0]);
        let kind_b = membership.get(b.as_str()).map(|s| s[0]);
        let (kind_a, kind_b) = match (kind_a, kind_b) {
            (Some(x), Some(y)) => (x, y),
            (None, _) => {
                report.violations.push(Violation::UnknownEndpoint {
                    edge,
                    id: a.clone(),
                });
                continue;
            }
            (_, None) => {
                report.violations.push(Violation::UnknownEndpoint {
                    edge,
                    id: b.clone(),
                });
                continue;
            }
        };
        let (datapoint, certificate) = match (kind_a, kind_b) {
            (VertexSet::Certificates, VertexSet::Certificates) => {
                report
                    .violations
                    .push(Violation::EdgeBetweenCertificates { edge });
                continue;
            }
            (VertexSet::Certificates, _) => (b, a),
            (_, VertexSet::Certificates) => (a, b),
            _ => {
                report
                    .violations
                    .push(Violation::EdgeBetweenDatapoints { edge });
                continue;
            }
        };
        if !seen_edges.insert((datapoint.as_str(), certificate.as_str())) {
            report.warnings.push(Warning::DuplicateEdge {
                datapoint: datapoint.clone(),
                certificate: certificate.clone(),
            });
            continue;
        }
        *degree.entry(datapoint.as_str()).or_default() += 1;
    }

    let mut isolated: Vec<_> = raw
        .in_class
        .iter()
        .filter(|x| !degree.contains_key(x.as_str()))
        .collect();
    isolated.sort();
    isolated.dedup();
    for x in isolated {
        report
            .warnings
            .push(Warning::IsolatedInClass { id: x.clone() });
    }
    report
}

/// A vertex of an instance, by kind and position in that kind's sorted id list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    InClass(usize),
    OutClass(usize),
    Certificate(usize),
}

/// A validated, immutable certificate-selection instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsInstance {
    in_class: Vec<String>,
    out_class: Vec<String>,
    certificates: Vec<String>,
    index: HashMap<String, Vertex>,
    in_adj: Vec<Vec<usize>>,
    out_adj: Vec<Vec<usize>>,
    cert_in: Vec<Vec<usize>>,
    cert_out: Vec<Vec<usize>>,
}

impl CsInstance {
    /// Validates and builds. Warnings (duplicate edges, isolated in-class
    /// points) are returned alongside the instance.
    pub fn from_raw(raw: &RawInstance) -> Result<(CsInstance, Vec<Warning>)> {
        let report = validate(raw);
        if !report.is_valid() {
            return Err(Error::InvalidInstance(report));
        }
        let sorted = |ids: &[String]| {
            let mut ids = ids.to_vec();
            ids.sort();
            ids
        };
        let in_class = sorted(&raw.in_class);
        let out_class = sorted(&raw.out_class);
        let certificates = sorted(&raw.certificates);

        let mut index = HashMap::new();
        index.extend(
            in_class
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), Vertex::InClass(i))),
        );
        index.extend(
            out_class
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), Vertex::OutClass(i))),
        );
        index.extend(
            certificates
                .iter()
                .enumerate()
                .map(|(i, id)| (id.clone(), Vertex::Certificate(i))),
        );

        let mut in_adj = vec![BTreeSet::new(); in_class.len()];
        let mut out_adj = vec![BTreeSet::new(); out_class.len()];
        let mut cert_in = vec![BTreeSet::new(); certificates.len()];
        let mut cert_out = vec![BTreeSet::new(); certificates.len()];
        for (a, b) in &raw.edges {
            let (va, vb) = (index[a.as_str()], index[b.as_str()]);
            let (d, c) = match (va, vb) {
                (Vertex::Certificate(c), d) | (d, Vertex::Certificate(c)) => (d, c),
                _ => unreachable!("validated"),
            };
            match d {
                Vertex::InClass(x) => {
                    in_adj[x].insert(c);
                    cert_in[c].insert(x);
                }
                Vertex::OutClass(y) => {
                    out_adj[y].insert(c);
                    cert_out[c].insert(y);
                }
                Vertex::Certificate(_) => unreachable!("validated"),
            }
        }
        let flat =
            |v: Vec<BTreeSet<usize>>| v.into_iter().map(|s| s.into_iter().collect()).collect();
        let instance = CsInstance {
            in_class,
            out_class,
            certificates,
            index,
            in_adj: flat(in_adj),
            out_adj: flat(out_adj),
            cert_in: flat(cert_in),
            cert_out: flat(cert_out),
        };
        Ok((instance, report.warnings))
    }

    /// Convenience constructor that discards warnings.
    pub fn new<S: AsRef<str>>(
        in_class: &[S],
        out_class: &[S],
        certificates: &[S],
        edges: &[(S, S)],
    ) -> Result<Self> {
        Self::from_raw(&RawInstance::new(in_class, out_class, certificates, edges)).map(|(i, _)| i)
    }

    /// Canonical raw form: ids sorted, edges as `(datapoint, certificate)`
    /// sorted by datapoint then certificate, in-class datapoints first.
    pub fn to_raw(&self) -> RawInstance {
        let mut edges = Vec::with_capacity(self.edge_count());
        for (x, certs) in self.in_adj.iter().enumerate() {
            edges.extend(
                certs
                    .iter()
                    .map(|&c| (self.in_class[x].clone(), self.certificates[c].clone())),
            );
        }
        for (y, certs) in self.out_adj.iter().enumerate() {
            edges.extend(
                certs
                    .iter()
                    .map(|&c| (self.out_class[y].clone(), self.certificates[c].clone())),
            );
        }
        RawInstance {
            in_class: self.in_class.clone(),
            out_class: self.out_class.clone(),
            certificates: self.certificates.clone(),
            edges,
        }
    }

    /// Report for an already-built instance: never has violations, may carry
    /// isolated-in-class warnings.
    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_raw())
    }

    pub fn in_class(&self) -> &[String] {
        &self.in_class
    }

    pub fn out_class(&self) -> &[String] {
        &self.out_class
    }

    pub fn certificates(&self) -> &[String] {
        &self.certificates
    }

    pub fn num_in(&self) -> usize {
        self.in_class.len()
    }

    pub fn num_out(&self) -> usize {
        self.out_class.len()
    }

    pub fn num_certificates(&self) -> usize {
        self.certificates.len()
    }

    pub fn edge_count(&self) -> usize {
        self.cert_in
            .iter()
            .chain(&self.cert_out)
            .map(Vec::len)
            .sum()
    }

    pub fn vertex(&self, id: &str) -> Result<Vertex> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn vertex_id(&self, v: Vertex) -> &str {
        match v {
            Vertex::InClass(i) => &self.in_class[i],
            Vertex::OutClass(i) => &self.out_class[i],
            Vertex::Certificate(i) => &self.certificates[i],
        }
    }

    pub fn certificate_index(&self, id: &str) -> Result<usize> {
        match self.vertex(id)? {
            Vertex::Certificate(c) => Ok(c),
            _ => Err(Error::NotACertificate(id.to_string())),
        }
    }

    pub fn in_class_index(&self, id: &str) -> Result<usize> {
        match self.vertex(id)? {
            Vertex::InClass(x) => Ok(x),
            _ => Err(Error::InvalidArgument(format!(
                "{id:?} is not an in-class datapoint"
            ))),
        }
    }

    /// Certificates adjacent to in-class datapoint `x`, ascending.
    pub fn in_neighbors(&self, x: usize) -> &[usize] {
        &self.in_adj[x]
    }

    /// Certificates adjacent to out-class datapoint `y`, ascending.
    pub fn out_neighbors(&self, y: usize) -> &[usize] {
        &self.out_adj[y]
    }

    /// In-class datapoints adjacent to certificate `c`, ascending.
    pub fn certificate_in(&self, c: usize) -> &[usize] {
        &self.cert_in[c]
    }

    /// Out-class datapoints adjacent to certificate `c`, ascending.
    pub fn certificate_out(&self, c: usize) -> &[usize] {
        &self.cert_out[c]
    }

    pub fn certificate_degree(&self, c: usize) -> usize {
        self.cert_in[c].len() + self.cert_out[c].len()
    }

    /// N(v) as sorted ids.
    pub fn neighbors(&self, id: &str) -> Result<Vec<&str>> {
        let mut out: Vec<&str> = match self.vertex(id)? {
            Vertex::InClass(x) => self.in_adj[x]
                .iter()
                .map(|&c| self.certificates[c].as_str())
                .collect(),
            Vertex::OutClass(y) => self.out_adj[y]
                .iter()
                .map(|&c| self.certificates[c].as_str())
                .collect(),
            Vertex::Certificate(c) => self.cert_in[c]
                .iter()
                .map(|&x| self.in_class[x].as_str())
                .chain(self.cert_out[c].iter().map(|&y| self.out_class[y].as_str()))
                .collect(),
        };
        out.sort_unstable();
        Ok(out)
    }

    /// N(F) for a set of certificate ids, as sorted datapoint ids.
    pub fn neighbors_of_set<S: AsRef<str>>(&self, certificates: &[S]) -> Result<Vec<&str>> {
        let mut out = BTreeSet::new();
        for id in certificates {
            let c = self.certificate_index(id.as_ref())?;
            out.extend(self.cert_in[c].iter().map(|&x| self.in_class[x].as_str()));
            out.extend(self.cert_out[c].iter().map(|&y| self.out_class[y].as_str()));
        }
        Ok(out.into_iter().collect())
    }

    /// Largest number of certificates on any datapoint of either class.
    pub fn max_features_per_datapoint(&self) -> usize {
        self.in_adj
            .iter()
            .chain(&self.out_adj)
            .map(Vec::len)
            .max()
            .unwrap_or(0)
    }

    /// Resolves certificate ids to sorted, deduplicated indices.
    pub fn certificate_indices<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>> {
        let mut out = ids
            .iter()
            .map(|id| self.certificate_index(id.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn certificate_ids(&self, indices: &[usize]) -> Vec<String> {
        indices
            .iter()
            .map(|&c| self.certificates[c].clone())
            .collect()
    }
}

/// The cooperative prover: one adjacent certificate per in-class datapoint.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProverAssignment {
    choices: Vec<usize>,
}

impl ProverAssignment {
    /// `choices[x]` is the certificate index assigned to in-class datapoint `x`.
    pub fn new(instance: &CsInstance, choices: Vec<usize>) -> Result<Self> {
        if choices.len() != instance.num_in() {
            return Err(Error::InvalidProver(format!(
                "expected {} assignments, got {}",
                instance.num_in(),
                choices.len()
            )));
        }
        for (x, &c) in choices.iter().enumerate() {
            if instance.in_neighbors(x).binary_search(&c).is_err() {
                let cert = instance
                    .certificates()
                    .get(c)
                    .map(String::as_str)
                    .unwrap_or("<out of range>");
                return Err(Error::InvalidProver(format!(
                    "({}, {cert}) is not an edge",
                    instance.in_class()[x]
                )));
            }
        }
        Ok(ProverAssignment { choices })
    }

    /// Builds from `(datapoint id, certificate id)` pairs covering all of D₁.
    pub fn from_ids<A: AsRef<str>, B: AsRef<str>>(
        instance: &CsInstance,
        pairs: &[(A, B)],
    ) -> Result<Self> {
        let mut choices = vec![None; instance.num_in()];
        for (x, c) in pairs {
            let xi = instance.in_class_index(x.as_ref())?;
            let ci = instance.certificate_index(c.as_ref())?;
            if choices[xi].replace(ci).is_some() {
                return Err(Error::InvalidProver(format!(
                    "{:?} assigned twice",
                    x.as_ref()
                )));
            }
        }
        let choices = choices
            .into_iter()
            .enumerate()
            .map(|(x, c)| {
                c.ok_or_else(|| {
                    Error::InvalidProver(format!("{:?} is unassigned", instance.in_class()[x]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(instance, choices)
    }

    pub(crate) fn from_choices_unchecked(choices: Vec<usize>) -> Self {
        ProverAssignment { choices }
    }

    pub fn certificate_for(&self, x: usize) -> usize {
        self.choices[x]
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    /// Checks that this assignment belongs to `instance`.
    pub fn check(&self, instance: &CsInstance) -> Result<()> {
        Self::new(instance, self.choices.clone()).map(|_| ())
    }

    pub fn to_id_map(&self, instance: &CsInstance) -> BTreeMap<String, String> {
        self.choices
            .iter()
            .enumerate()
            .map(|(x, &c)| {
                (
                    instance.in_class()[x].clone(),
                    instance.certificates()[c].clone(),
                )
            })
            .collect()
    }
}

/// The verifier, given by its accepted certificates; everything else is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VerifierAcceptance {
    accepted: Vec<bool>,
}

impl VerifierAcceptance {
    pub fn from_indices(
        instance: &CsInstance,
        accepted: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut flags = vec![false; instance.num_certificates()];
        for c in accepted {
            *flags.get_mut(c).ok_or_else(|| {
                Error::InvalidVerifier(format!("certificate index {c} out of range"))
            })? = true;
        }
        Ok(VerifierAcceptance { accepted: flags })
    }

    pub fn from_ids<S: AsRef<str>>(instance: &CsInstance, ids: &[S]) -> Result<Self> {
        let indices = instance.certificate_indices(ids)?;
        Self::from_indices(instance, indices)
    }

    /// Bit `c` of `mask` accepts certificate `c`. Requires `|C| <= 64`.
    pub fn from_mask(instance: &CsInstance, mask: u64) -> Self {
        let m = instance.num_certificates();
        debug_assert!(m <= 64);
        VerifierAcceptance {
            accepted: (0..m).map(|c| mask >> c & 1 == 1).collect(),
        }
    }

    pub fn none(instance: &CsInstance) -> Self {
        VerifierAcceptance {
            accepted: vec![false; instance.num_certificates()],
        }
    }

    pub fn all(instance: &CsInstance) -> Self {
        VerifierAcceptance {
            accepted: vec![true; instance.num_certificates()],
        }
    }

    pub fn accepts(&self, c: usize) -> bool {
        self.accepted[c]
    }

    pub fn num_certificates(&self) -> usize {
        self.accepted.len()
    }

    pub fn accepted_indices(&self) -> Vec<usize> {
        self.accepted
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(c, _)| c)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.accepted.iter().filter(|&&a| a).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn check(&self, instance: &CsInstance) -> Result<()> {
        if self.accepted.len() == instance.num_certificates() {
            Ok(())
        } else {
            Err(Error::InvalidVerifier(format!(
                "verifier covers {} certificates, instance has {}",
                self.accepted.len(),
                instance.num_certificates()
            )))
        }
    }

    pub fn to_ids(&self, instance: &CsInstance) -> Vec<String> {
        instance.certificate_ids(&self.accepted_indices())
    }
}

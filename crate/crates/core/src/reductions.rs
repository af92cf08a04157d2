//! Reduction gadgets from Densest-k-Subgraph and Min-k-Union into the
//! deceptive certificate-selection problems, with brute-force oracles for the
//! source problems and lifting of solutions back to them.
//!
//! Densest-k-Subgraph: every source vertex v becomes an out-class point
//! `y[v]`; every edge uv becomes two in-class points `x[u,v]`, `x'[u,v]` and
//! two certificates, `phi0[u,v]` on the two in-class points only and
//! `phi1[u,v]` on those plus `y[u]`, `y[v]`.
//!
//! Min-k-Union (r-uniform): every element e becomes `y[e]`; set i becomes r
//! in-class points `x[Si,j]` plus `phi0[Si]` on them and `phi1[Si]` on them
//! and the out-class points of its elements.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};
use crate::model::{CsInstance, RawInstance};
use crate::ratio::ExactRatio;
use crate::solvers::DcsSolution;

/// Largest source size the brute-force oracles accept.
pub const ORACLE_LIMIT: usize = 20;

const RESERVED: [char; 4] = ['[', ']', ',', '\''];

fn check_id(id: &str) -> Result<()> {
    if id.is_empty()
        || id
            .chars()
            .any(|ch| ch.is_whitespace() || RESERVED.contains(&ch))
    {
        Err(Error::InvalidArgument(format!(
            "source id {id:?} must be nonempty without whitespace or any of [ ] , '"
        )))
    } else {
        Ok(())
    }
}

/// Simple undirected graph. Edges are stored once, as `(u, v)` with `u < v`
/// by vertex position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceGraph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl SourceGraph {
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let vertices: Vec<String> = vertices.iter().map(|v| v.as_ref().to_string()).collect();
        let mut position = BTreeMap::new();
        for (i, v) in vertices.iter().enumerate() {
            check_id(v)?;
            if position.insert(v.as_str(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate vertex {v:?}")));
            }
        }
        let mut seen = BTreeSet::new();
        for (a, b) in edges {
            let lookup = |id: &str| {
                position.get(id).copied().ok_or_else(|| {
                    Error::InvalidArgument(format!("edge endpoint {id:?} is not a vertex"))
                })
            };
            let (u, v) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if u == v {
                return Err(Error::InvalidArgument(format!(
                    "self-loop on {:?}",
                    a.as_ref()
                )));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidArgument(format!(
                    "multi-edge {} {}",
                    a.as_ref(),
                    b.as_ref()
                )));
            }
        }
        Ok(SourceGraph {
            vertices,
            edges: seen.into_iter().collect(),
        })
    }

    /// Graph on `0..n` with decimal vertex ids.
    pub fn from_indices(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let names: Vec<String> = (0..n).map(|v| v.to_string()).collect();
        let edges: Vec<(String, String)> = edges
            .iter()
            .map(|&(u, v)| (u.to_string(), v.to_string()))
            .collect();
        Self::new(&names, &edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of edges with both endpoints in `vertices` (positions).
    pub fn induced_edges(&self, vertices: &[usize]) -> usize {
        let chosen: BTreeSet<usize> = vertices.iter().copied().collect();
        self.edges
            .iter()
            .filter(|(u, v)| chosen.contains(u) && chosen.contains(v))
            .count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.edges {
                let next = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// A universe and a list of subsets of it (repeats allowed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetSystem {
    universe: Vec<String>,
    sets: Vec<Vec<usize>>,
}

impl SetSystem {
    pub fn new<S: AsRef<str>>(universe: &[S], sets: &[Vec<S>]) -> Result<Self> {
        let universe: Vec<String> = universe.iter().map(|e| e.as_ref().to_string()).collect();
        let mut position = BTreeMap::new();
        for (i, e) in universe.iter().enumerate() {
            check_id(e)?;
            if position.insert(e.as_str(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate element {e:?}")));
            }
        }
        let mut out = Vec::with_capacity(sets.len());
        for (i, set) in sets.iter().enumerate() {
            let mut members = BTreeSet::new();
            for e in set {
                let p = *position.get(e.as_ref()).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "set {i} mentions unknown element {:?}",
                        e.as_ref()
                    ))
                })?;
                if !members.insert(p) {
                    return Err(Error::InvalidArgument(format!(
                        "set {i} repeats element {:?}",
                        e.as_ref()
                    )));
                }
            }
            if members.is_empty() {
                return Err(Error::InvalidArgument(format!("set {i} is empty")));
            }
            out.push(members.into_iter().collect());
        }
        Ok(SetSystem {
            universe,
            sets: out,
        })
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    /// Element positions of each set, ascending.
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Common set size, if all sets have the same size.
    pub fn uniformity(&self) -> Option<usize> {
        let r = self.sets.first()?.len();
        self.sets.iter().all(|s| s.len() == r).then_some(r)
    }

    pub fn union_size(&self, chosen: &[usize]) -> usize {
        chosen
            .iter()
            .flat_map(|&i| self.sets[i].iter().copied())
            .collect::<BTreeSet<_>>()
            .len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReductionKind {
    #[serde(rename = "dks")]
    DensestKSubgraph,
    #[serde(rename = "mku")]
    MinKUnion,
}

/// Certificates and in-class points produced for one source edge or set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    /// `u-v` for an edge, `S<i>` for a set.
    pub source: String,
    pub phi0: String,
    pub phi1: String,
    pub in_class: Vec<String>,
    /// Out-class points `phi1` additionally touches.
    pub out_class: Vec<String>,
    /// Source vertices (edge endpoints) or elements behind `out_class`.
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionArtifact {
    pub kind: ReductionKind,
    pub k: usize,
    pub instance: CsInstance,
    pub eps_c: ExactRatio,
    /// Soundness tolerance (Densest-k-Subgraph).
    pub eps_s: Option<ExactRatio>,
    /// Precision gap (Min-k-Union): the prover needs `Pr(M) <= 1 - q`.
    pub q: Option<ExactRatio>,
    /// One gadget per source edge or set, in source order.
    pub gadgets: Vec<Gadget>,
    /// Source vertex or element id to its out-class datapoint id, in source order.
    pub vertex_map: Vec<(String, String)>,
}

impl ReductionArtifact {
    /// The zero-deception strategy: accept exactly the `phi0` certificates.
    pub fn phi0_ids(&self) -> Vec<&str> {
        self.gadgets.iter().map(|g| g.phi0.as_str()).collect()
    }

    /// Sets the prover must switch to `phi1` to meet the precision ceiling in
    /// the Min-k-Union gadget: `ceil(2 q |S|)`.
    pub fn required_phi1_sets(&self) -> Option<usize> {
        let q = self.q.as_ref()?;
        let need = q * &ExactRatio::from_integer(2 * self.gadgets.len() as u64);
        need.ceil().try_into().ok()
    }

    fn phi_lookup(&self) -> Result<Vec<Option<(usize, bool)>>> {
        let mut lookup = vec![None; self.instance.num_certificates()];
        for (g, gadget) in self.gadgets.iter().enumerate() {
            for (id, is_phi1) in [(&gadget.phi0, false), (&gadget.phi1, true)] {
                let c = self.instance.certificate_index(id).map_err(|_| {
                    Error::ArtifactMismatch(format!(
                        "gadget certificate {id:?} missing from instance"
                    ))
                })?;
                lookup[c] = Some((g, is_phi1));
            }
        }
        Ok(lookup)
    }

    /// For each gadget, how many of its in-class points the prover sends to `phi1`.
    fn phi1_usage(&self, solution: &DcsSolution) -> Result<Vec<usize>> {
        solution
            .prover
            .check(&self.instance)
            .map_err(|e| Error::ArtifactMismatch(e.to_string()))?;
        let lookup = self.phi_lookup()?;
        let mut usage = vec![0; self.gadgets.len()];
        for &c in solution.prover.choices() {
            match lookup[c] {
                Some((g, true)) => usage[g] += 1,
                Some((_, false)) => {}
                None => {
                    return Err(Error::ArtifactMismatch(format!(
                        "certificate {:?} belongs to no gadget",
                        self.instance.certificates()[c]
                    )))
                }
            }
        }
        Ok(usage)
    }
}

fn ratio(num: usize, den: usize) -> ExactRatio {
    ExactRatio::new(num as u64, den as u64)
}

fn y_id(v: &str) -> String {
    format!("y[{v}]")
}

/// Densest-k-Subgraph gadget with `eps_c = 1/(2|E|+1)` and `eps_s = k/|V|`.
///
/// The completeness tolerance is below one miss, so the verifier has to
/// accept every certificate the prover uses; the soundness tolerance lets at
/// most k out-class points (source vertices) be fooled.
pub fn reduce_dks(source: &SourceGraph, k: usize) -> Result<ReductionArtifact> {
    let (n, e) = (source.num_vertices(), source.edge_count());
    if e == 0 {
        return Err(Error::InvalidArgument("source graph has no edges".into()));
    }
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={n}")));
    }
    let names = source.vertices();
    let out_class: Vec<String> = names.iter().map(|v| y_id(v)).collect();
    let mut in_class = Vec::with_capacity(2 * e);
    let mut certificates = Vec::with_capacity(2 * e);
    let mut edges = Vec::with_capacity(8 * e);
    let mut gadgets = Vec::with_capacity(e);
    for &(u, v) in source.edges() {
        let (nu, nv) = (&names[u], &names[v]);
        let x = format!("x[{nu},{nv}]");
        let xp = format!("x'[{nu},{nv}]");
        let phi0 = format!("phi0[{nu},{nv}]");
        let phi1 = format!("phi1[{nu},{nv}]");
        for point in [&x, &xp] {
            edges.push((point.clone(), phi0.clone()));
            edges.push((point.clone(), phi1.clone()));
        }
        edges.push((out_class[u].clone(), phi1.clone()));
        edges.push((out_class[v].clone(), phi1.clone()));
        gadgets.push(Gadget {
            source: format!("{nu}-{nv}"),
            phi0: phi0.clone(),
            phi1: phi1.clone(),
            in_class: vec![x.clone(), xp.clone()],
            out_class: vec![out_class[u].clone(), out_class[v].clone()],
            members: vec![nu.clone(), nv.clone()],
        });
        in_class.extend([x, xp]);
        certificates.extend([phi0, phi1]);
    }
    let raw = RawInstance {
        in_class,
        out_class: out_class.clone(),
        certificates,
        edges,
    };
    let (instance, _) = CsInstance::from_raw(&raw)?;
    Ok(ReductionArtifact {
        kind: ReductionKind::DensestKSubgraph,
        k,
        instance,
        eps_c: ratio(1, 2 * e + 1),
        eps_s: Some(ratio(k, n)),
        q: None,
        gadgets,
        vertex_map: names.iter().cloned().zip(out_class).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DksLift {
    /// Source vertex ids, in source order.
    pub vertices: Vec<String>,
    /// Source edges whose `phi1` the prover used.
    pub phi1_edges: usize,
    /// Edges induced by `vertices` in the source graph; at least `phi1_edges`.
    pub induced_edges: usize,
}

/// Reads a vertex set off a solution of the Densest-k-Subgraph gadget.
///
/// Vertices incident to edges whose `phi1` was used are returned, padded with
/// the earliest remaining source vertices up to `min(k, |V|)`.
pub fn lift_dks(artifact: &ReductionArtifact, solution: &DcsSolution) -> Result<DksLift> {
    if artifact.kind != ReductionKind::DensestKSubgraph {
        return Err(Error::ArtifactMismatch(
            "not a Densest-k-Subgraph artifact".into(),
        ));
    }
    let usage = artifact.phi1_usage(solution)?;
    let order: BTreeMap<&str, usize> = artifact
        .vertex_map
        .iter()
        .enumerate()
        .map(|(i, (v, _))| (v.as_str(), i))
        .collect();
    let position = |v: &String| {
        order
            .get(v.as_str())
            .copied()
            .ok_or_else(|| Error::ArtifactMismatch(format!("gadget mentions unknown vertex {v:?}")))
    };
    let mut chosen = BTreeSet::new();
    let mut phi1_edges = 0;
    for (gadget, &used) in artifact.gadgets.iter().zip(&usage) {
        if used > 0 {
            phi1_edges += 1;
            for v in &gadget.members {
                chosen.insert(position(v)?);
            }
        }
    }
    let target = artifact.k.min(order.len());
    for v in 0..order.len() {
        if chosen.len() >= target {
            break;
        }
        chosen.insert(v);
    }
    let mut induced_edges = 0;
    for gadget in &artifact.gadgets {
        let inside = gadget
            .members
            .iter()
            .map(|v| position(v).map(|p| chosen.contains(&p)))
            .collect::<Result<Vec<_>>>()?;
        if inside.iter().all(|&b| b) {
            induced_edges += 1;
        }
    }
    Ok(DksLift {
        vertices: chosen
            .iter()
            .map(|&v| artifact.vertex_map[v].0.clone())
            .collect(),
        phi1_edges,
        induced_edges,
    })
}

/// Maximum number of edges induced by any k vertices, by enumeration.
pub fn dks_brute(source: &SourceGraph, k: usize) -> Result<usize> {
    let n = source.num_vertices();
    if n > ORACLE_LIMIT {
        return Err(Error::budget("Densest-k-Subgraph oracle", n, ORACLE_LIMIT));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds |V| = {n}")));
    }
    let mut adjacency = vec![0u32; n];
    for &(u, v) in source.edges() {
        adjacency[u] |= 1 << v;
        adjacency[v] |= 1 << u;
    }
    let best = (0u32..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| {
            (0..n)
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| (adjacency[v] & mask).count_ones() as usize)
                .sum::<usize>()
                / 2
        })
        .max()
        .unwrap_or(0);
    Ok(best)
}

/// r-uniform Min-k-Union gadget with `eps_c = 1/(r|S|+1)` and `q = k/|S|`.
pub fn reduce_mku(source: &SetSystem, k: usize) -> Result<ReductionArtifact> {
    let s = source.num_sets();
    if k < 1 || k > s {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={s}")));
    }
    let r = source
        .uniformity()
        .ok_or_else(|| Error::InvalidArgument("sets are not all the same size".into()))?;
    let set_width = (s.max(1) - 1).to_string().len();
    let point_width = (r.max(1) - 1).to_string().len();
    let out_class: Vec<String> = source.universe().iter().map(|e| y_id(e)).collect();
    let mut in_class = Vec::with_capacity(r * s);
    let mut certificates = Vec::with_capacity(2 * s);
    let mut edges = Vec::new();
    let mut gadgets = Vec::with_capacity(s);
    for (i, members) in source.sets().iter().enumerate() {
        let tag = format!("S{i:0set_width$}");
        let phi0 = format!("phi0[{tag}]");
        let phi1 = format!("phi1[{tag}]");
        let points: Vec<String> = (0..r)
            .map(|j| format!("x[{tag},{j:0point_width$}]"))
            .collect();
        for p in &points {
            edges.push((p.clone(), phi0.clone()));
            edges.push((p.clone(), phi1.clone()));
        }
        let touched: Vec<String> = members.iter().map(|&e| out_class[e].clone()).collect();
        let elements: Vec<String> = members
            .iter()
            .map(|&e| source.universe()[e].clone())
            .collect();
        for y in &touched {
            edges.push((y.clone(), phi1.clone()));
        }
        gadgets.push(Gadget {
            source: tag,
            phi0: phi0.clone(),
            phi1: phi1.clone(),
            in_class: points.clone(),
            out_class: touched,
            members: elements,
        });
        in_class.extend(points);
        certificates.extend([phi0, phi1]);
    }
    let raw = RawInstance {
        in_class,
        out_class: out_class.clone(),
        certificates,
        edges,
    };
    let (instance, _) = CsInstance::from_raw(&raw)?;
    Ok(ReductionArtifact {
        kind: ReductionKind::MinKUnion,
        k,
        instance,
        eps_c: ratio(1, r * s + 1),
        eps_s: None,
        q: Some(ratio(k, s)),
        gadgets,
        vertex_map: source.universe().iter().cloned().zip(out_class).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MkuLift {
    /// Sets whose `phi1` carries all r of their in-class points.
    pub set_indices: Vec<usize>,
    pub union_size: usize,
}

pub fn lift_mku(artifact: &ReductionArtifact, solution: &DcsSolution) -> Result<MkuLift> {
    if artifact.kind != ReductionKind::MinKUnion {
        return Err(Error::ArtifactMismatch("not a Min-k-Union artifact".into()));
    }
    let usage = artifact.phi1_usage(solution)?;
    let set_indices: Vec<usize> = usage
        .iter()
        .enumerate()
        .filter(|&(g, &used)| used > 0 && used == artifact.gadgets[g].in_class.len())
        .map(|(g, _)| g)
        .collect();
    let union: BTreeSet<&str> = set_indices
        .iter()
        .flat_map(|&g| artifact.gadgets[g].members.iter().map(String::as_str))
        .collect();
    Ok(MkuLift {
        union_size: union.len(),
        set_indices,
    })
}

/// Smallest union of any `l` sets, by enumeration.
pub fn mku_brute(source: &SetSystem, l: usize) -> Result<usize> {
    let s = source.num_sets();
    if s > ORACLE_LIMIT {
        return Err(Error::budget("Min-k-Union oracle", s, ORACLE_LIMIT));
    }
    if l < 1 || l > s {
        return Err(Error::InvalidArgument(format!("l = {l} outside 1..={s}")));
    }
    let width = source.universe().len();
    let members: Vec<BitSet> = source
        .sets()
        .iter()
        .map(|set| BitSet::from_indices(width, set))
        .collect();
    let empty = BitSet::new(width);
    let mut union = BitSet::new(width);
    let best = (0u32..1 << s)
        .filter(|mask| mask.count_ones() as usize == l)
        .map(|mask| {
            union.clear();
            for (i, set) in members.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    union.union_with(set);
                }
            }
            empty.count_new(&union) as usize
        })
        .min()
        .expect("at least one l-subset");
    Ok(best)
}

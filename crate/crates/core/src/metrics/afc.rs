//! Asymmetric feature correlation.
//!
//! For a certificate set F with in-class neighbourhood F₁* = N(F) ∩ D₁ the
//! averaged expression is `(1/|F₁*|) Σ_{y ∈ F₁*} max_{φ ∈ N(y) ∩ F} κ(φ, F)`,
//! and the AFC is its maximum over all admissible F (both class
//! neighbourhoods nonempty).
//!
//! Writing a(φ), b(φ) for the out- and in-class degree of φ and P, Q for the
//! in- and out-class neighbourhood sizes of F, κ(φ, F) = a·P / (Q·b), so the
//! averaged expression collapses to `(1/Q) Σ_y max_φ a(φ)/b(φ)`. The exact
//! search visits certificates in decreasing a/b order, which makes the first
//! member of F covering y its maximiser; the sum then grows by
//! `a/b · |newly covered in-class points|` per added certificate.

use std::cmp::Ordering;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{afc_kappa, set_neighborhood_counts};
use crate::bits::{checked_lcm, lex_cmp_masks, mask_to_indices, BitSet, Scalar};
use crate::error::{Error, Result};
use crate::model::CsInstance;
use crate::ratio::ExactRatio;

/// Default cap on |C| for exhaustive enumeration (2^24 subsets).
pub const DEFAULT_CERTIFICATE_BUDGET: usize = 24;

/// Number of leading positions fixed per parallel task.
const SPLIT_DEPTH: usize = 8;

const GREEDY_RESTARTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AfcTerm {
    /// In-class datapoint index (a member of F₁*).
    pub datapoint: usize,
    /// Maximising certificate index.
    pub certificate: usize,
    pub kappa: ExactRatio,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AfcWitness {
    pub value: ExactRatio,
    /// Sorted certificate indices.
    pub witness_set: Vec<usize>,
    /// One entry per member of F₁*, in datapoint order.
    pub terms: Vec<AfcTerm>,
    /// `false` for greedy lower bounds.
    pub exact: bool,
}

impl AfcWitness {
    /// Average of the stored κ terms.
    pub fn recompute_value(&self) -> ExactRatio {
        let total = self
            .terms
            .iter()
            .fold(ExactRatio::zero(), |acc, t| &acc + &t.kappa);
        &total / &ExactRatio::from_integer(self.terms.len() as u64)
    }

    /// Re-evaluates the witness set on `instance` and compares everything.
    pub fn is_consistent(&self, instance: &CsInstance) -> bool {
        match afc_of_set(instance, &self.witness_set) {
            Ok(fresh) => {
                fresh.value == self.value
                    && fresh.terms == self.terms
                    && self.recompute_value() == self.value
            }
            Err(_) => false,
        }
    }
}

/// Evaluates the averaged κ expression on one certificate set.
///
/// Ties in the inner maximum go to the smallest certificate index.
pub fn afc_of_set(instance: &CsInstance, set: &[usize]) -> Result<AfcWitness> {
    let mut set = set.to_vec();
    set.sort_unstable();
    set.dedup();
    let (set_in, set_out) = set_neighborhood_counts(instance, &set)?;
    if set_in == 0 || set_out == 0 {
        return Err(Error::AfcUndefined);
    }
    let mut covered = vec![false; instance.num_in()];
    for &c in &set {
        instance
            .certificate_in(c)
            .iter()
            .for_each(|&x| covered[x] = true);
    }
    let mut terms = Vec::with_capacity(set_in);
    for x in (0..instance.num_in()).filter(|&x| covered[x]) {
        let mut best: Option<(usize, ExactRatio)> = None;
        for &c in instance
            .in_neighbors(x)
            .iter()
            .filter(|c| set.binary_search(c).is_ok())
        {
            let kappa = afc_kappa(instance, c, &set)?;
            if best.as_ref().is_none_or(|(_, k)| kappa > *k) {
                best = Some((c, kappa));
            }
        }
        let (certificate, kappa) = best.expect("covered point has a neighbour in the set");
        terms.push(AfcTerm {
            datapoint: x,
            certificate,
            kappa,
        });
    }
    let mut witness = AfcWitness {
        value: ExactRatio::zero(),
        witness_set: set,
        terms,
        exact: true,
    };
    witness.value = witness.recompute_value();
    Ok(witness)
}

struct State<W> {
    covered_in: BitSet,
    covered_out: BitSet,
    in_count: u64,
    out_count: u64,
    sum: W,
    mask: u64,
}

impl<W: Scalar> State<W> {
    fn empty(num_in: usize, num_out: usize) -> Self {
        State {
            covered_in: BitSet::new(num_in),
            covered_out: BitSet::new(num_out),
            in_count: 0,
            out_count: 0,
            sum: W::zero(),
            mask: 0,
        }
    }

    fn copy_from(&mut self, other: &State<W>) {
        self.covered_in.copy_from(&other.covered_in);
        self.covered_out.copy_from(&other.covered_out);
        self.in_count = other.in_count;
        self.out_count = other.out_count;
        self.sum = other.sum.clone();
        self.mask = other.mask;
    }
}

/// Best candidate so far: scaled sum, |N(F) ∩ D₋₁|, certificate mask.
type Best<W> = Option<(W, u64, u64)>;

fn better<W: Scalar>(candidate: &(W, u64, u64), incumbent: &(W, u64, u64)) -> bool {
    let lhs = candidate.0.clone() * W::from(incumbent.1);
    let rhs = incumbent.0.clone() * W::from(candidate.1);
    match lhs.cmp(&rhs) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => lex_cmp_masks(candidate.2, incumbent.2) == Ordering::Less,
    }
}

fn merge<W: Scalar>(a: Best<W>, b: Best<W>) -> Best<W> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
    }
}

struct Search<'a, W> {
    instance: &'a CsInstance,
    order: Vec<usize>,
    in_sets: Vec<BitSet>,
    out_sets: Vec<BitSet>,
    weights: Vec<W>,
}

impl<W: Scalar> Search<'_, W> {
    fn add(&self, state: &mut State<W>, c: usize) {
        let fresh_in = state.covered_in.count_new(&self.in_sets[c]);
        let fresh_out = state.covered_out.count_new(&self.out_sets[c]);
        state.covered_in.union_with(&self.in_sets[c]);
        state.covered_out.union_with(&self.out_sets[c]);
        state.in_count += fresh_in as u64;
        state.out_count += fresh_out as u64;
        if fresh_in > 0 {
            state.sum = state.sum.clone() + self.weights[c].clone() * W::from(fresh_in as u64);
        }
        state.mask |= 1 << c;
    }

    fn recurse(&self, pos: usize, current: &State<W>, pool: &mut [State<W>], best: &mut Best<W>) {
        if pos == self.order.len() {
            if current.in_count > 0 && current.out_count > 0 {
                let candidate = (current.sum.clone(), current.out_count, current.mask);
                if best.as_ref().is_none_or(|b| better(&candidate, b)) {
                    *best = Some(candidate);
                }
            }
            return;
        }
        self.recurse(pos + 1, current, pool, best);
        let (next, rest) = pool.split_first_mut().expect("pool sized to depth");
        next.copy_from(current);
        self.add(next, self.order[pos]);
        self.recurse(pos + 1, next, rest, best);
    }

    fn run(&self) -> Best<W> {
        let m = self.order.len();
        let split = m.min(SPLIT_DEPTH);
        let (num_in, num_out) = (self.instance.num_in(), self.instance.num_out());
        (0u64..1 << split)
            .into_par_iter()
            .map(|prefix| {
                let mut start = State::empty(num_in, num_out);
                for (pos, &c) in self.order[..split].iter().enumerate() {
                    if prefix >> pos & 1 == 1 {
                        self.add(&mut start, c);
                    }
                }
                let mut pool: Vec<State<W>> =
                    (split..m).map(|_| State::empty(num_in, num_out)).collect();
                let mut best = None;
                self.recurse(split, &start, &mut pool, &mut best);
                best
            })
            .reduce(|| None, merge)
    }
}

/// Certificates ordered by decreasing a/b; those without in-class
/// neighbours go last. Ties keep index order.
fn ratio_order(instance: &CsInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.num_certificates()).collect();
    let key = |c: usize| {
        (
            instance.certificate_out(c).len() as u128,
            instance.certificate_in(c).len() as u128,
        )
    };
    order.sort_by(|&p, &q| {
        let (ap, bp) = key(p);
        let (aq, bq) = key(q);
        match (bp == 0, bq == 0) {
            (true, true) => p.cmp(&q),
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (aq * bp).cmp(&(ap * bq)).then(p.cmp(&q)),
        }
    });
    order
}

fn search_best<W: Scalar>(instance: &CsInstance, scale: u64) -> Best<W> {
    let m = instance.num_certificates();
    let weights = (0..m)
        .map(|c| {
            // Certificates without in-class neighbours never cover anything.
            match scale.checked_div(instance.certificate_in(c).len() as u64) {
                Some(per_point) => {
                    W::from(instance.certificate_out(c).len() as u64) * W::from(per_point)
                }
                None => W::zero(),
            }
        })
        .collect();
    let search = Search {
        instance,
        order: ratio_order(instance),
        in_sets: (0..m)
            .map(|c| BitSet::from_indices(instance.num_in(), instance.certificate_in(c)))
            .collect(),
        out_sets: (0..m)
            .map(|c| BitSet::from_indices(instance.num_out(), instance.certificate_out(c)))
            .collect(),
        weights,
    };
    search.run()
}

/// Exact AFC by exhaustive subset enumeration.
///
/// Among sets attaining the maximum, the one whose sorted certificate-id
/// sequence is lexicographically smallest is returned. The result does not
/// depend on the number of worker threads.
pub fn afc_exact(instance: &CsInstance, max_certificates: usize) -> Result<AfcWitness> {
    let m = instance.num_certificates();
    if m > max_certificates || m > 63 {
        return Err(Error::BudgetExceeded {
            what: "exact AFC",
            size: m,
            budget: max_certificates.min(63),
            hint: "; use the greedy lower bound instead",
        });
    }
    // Scaled sums stay below |D₁|·|D₋₁|·L and are multiplied by at most |D₋₁|.
    let scale = checked_lcm((0..m).map(|c| instance.certificate_in(c).len()));
    let fits = scale.is_some_and(|l| {
        (l as u128)
            .checked_mul(instance.num_in() as u128)
            .and_then(|v| v.checked_mul(instance.num_out() as u128))
            .and_then(|v| v.checked_mul(instance.num_out() as u128))
            .is_some()
    });
    let best_mask = match scale {
        Some(l) if fits => search_best::<u128>(instance, l).map(|b| b.2),
        Some(l) => search_best::<BigInt>(instance, l).map(|b| b.2),
        None => brute_force_big(instance),
    };
    let mask = best_mask.ok_or(Error::AfcUndefined)?;
    afc_of_set(instance, &mask_to_indices(mask))
}

/// Fallback for degree profiles whose lcm overflows `u64`.
fn brute_force_big(instance: &CsInstance) -> Option<u64> {
    let m = instance.num_certificates();
    let mut best: Option<(ExactRatio, u64)> = None;
    for mask in 1u64..1 << m {
        if let Ok(w) = afc_of_set(instance, &mask_to_indices(mask)) {
            let replace = match &best {
                None => true,
                Some((v, bm)) => {
                    w.value > *v || (w.value == *v && lex_cmp_masks(mask, *bm) == Ordering::Less)
                }
            };
            if replace {
                best = Some((w.value, mask));
            }
        }
    }
    best.map(|b| b.1)
}

/// Greedy lower bound on the AFC.
///
/// Each of a fixed number of restarts grows a certificate set one element at
/// a time, always adding the certificate that gives the largest value, and
/// remembers the best admissible set seen. Restart 0 starts from the
/// certificate with the largest out/in degree ratio; later restarts start from
/// certificates drawn by a ChaCha8 generator seeded with `seed`.
pub fn afc_greedy(instance: &CsInstance, seed: u64) -> Result<AfcWitness> {
    let m = instance.num_certificates();
    let all: Vec<usize> = (0..m).collect();
    let (all_in, all_out) = set_neighborhood_counts(instance, &all)?;
    if all_in == 0 || all_out == 0 {
        return Err(Error::AfcUndefined);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = ratio_order(instance);
    let mut starts = vec![order[0]];
    let mut shuffled = all.clone();
    shuffled.shuffle(&mut rng);
    starts.extend(
        shuffled
            .into_iter()
            .filter(|&c| c != order[0])
            .take(GREEDY_RESTARTS - 1),
    );

    let value_of = |set: &[usize]| afc_of_set(instance, set).ok().map(|w| w.value);
    let mut best: Option<(ExactRatio, Vec<usize>)> = None;
    let mut offer = |value: ExactRatio, set: &Vec<usize>| {
        let replace = match &best {
            None => true,
            Some((v, s)) => value > *v || (value == *v && set < s),
        };
        if replace {
            best = Some((value, set.clone()));
        }
    };

    for start in starts {
        let mut current = vec![start];
        if let Some(v) = value_of(&current) {
            offer(v, &current);
        }
        let mut remaining: Vec<usize> = all.iter().copied().filter(|&c| c != start).collect();
        while !remaining.is_empty() {
            let mut step: Option<(Option<ExactRatio>, usize)> = None;
            for (i, &c) in remaining.iter().enumerate() {
                let mut trial = current.clone();
                trial.push(c);
                trial.sort_unstable();
                let v = value_of(&trial);
                let improves = match &step {
                    None => true,
                    Some((sv, _)) => v > *sv,
                };
                if improves {
                    step = Some((v, i));
                }
            }
            let (v, i) = step.expect("remaining is nonempty");
            current.push(remaining.remove(i));
            current.sort_unstable();
            if let Some(v) = v {
                offer(v, &current);
            }
        }
    }

    let (_, set) = best.ok_or(Error::AfcUndefined)?;
    let mut witness = afc_of_set(instance, &set)?;
    witness.exact = false;
    Ok(witness)
}

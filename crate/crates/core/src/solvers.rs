//! Solvers for the deceptive certificate-selection problems.
//!
//! * DCS: maximise `1 - Pr(M)` subject to `compl(A, M) >= 1 - eps_c` and
//!   `sound(A) >= 1 - eps_s`.
//! * DCS2: minimise `1 - sound(A)` subject to `compl(A, M) >= 1 - eps_c` and
//!   `Pr(M) <= 1 - q`.
//!
//! Both exact solvers enumerate verifier sets and solve the prover side
//! exactly for each one: with the verifier fixed, the prover may send at most
//! `floor(eps_c |D₁|)` datapoints to rejected certificates, and the cheapest
//! prover spends that budget where switching away from the best accepted
//! certificate lowers precision the most.

use std::cmp::{Ordering, Reverse};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::{lex_cmp_masks, Scalar};
use crate::error::{Error, Result};
use crate::metrics::{completeness, prover_precision, soundness};
use crate::model::{CsInstance, ProverAssignment, VerifierAcceptance};
use crate::ratio::ExactRatio;

pub use crate::metrics::DEFAULT_CERTIFICATE_BUDGET;

const SPLIT_DEPTH: usize = 8;
const GREEDY_RESTARTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "lowercase")]
pub enum Problem {
    Dcs {
        eps_c: ExactRatio,
        eps_s: ExactRatio,
    },
    Dcs2 {
        eps_c: ExactRatio,
        q: ExactRatio,
    },
}

impl Problem {
    pub fn eps_c(&self) -> &ExactRatio {
        match self {
            Problem::Dcs { eps_c, .. } | Problem::Dcs2 { eps_c, .. } => eps_c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcsSolution {
    pub problem: Problem,
    pub verifier: VerifierAcceptance,
    pub prover: ProverAssignment,
    /// `1 - Pr(M)` for DCS, `1 - sound(A)` for DCS2.
    pub objective: ExactRatio,
    pub achieved_completeness: ExactRatio,
    pub achieved_soundness: ExactRatio,
    pub achieved_prover_precision: ExactRatio,
    /// `true` when produced by exhaustive search.
    pub optimal: bool,
}

impl DcsSolution {
    /// Computes every stored metric from the strategy pair.
    pub fn assemble(
        instance: &CsInstance,
        problem: Problem,
        verifier: VerifierAcceptance,
        prover: ProverAssignment,
        optimal: bool,
    ) -> Result<Self> {
        let achieved_completeness = completeness(instance, &verifier, &prover)?;
        let achieved_soundness = soundness(instance, &verifier)?;
        let achieved_prover_precision = prover_precision(instance, &prover)?;
        let objective = match problem {
            Problem::Dcs { .. } => ExactRatio::one() - achieved_prover_precision.clone(),
            Problem::Dcs2 { .. } => ExactRatio::one() - achieved_soundness.clone(),
        };
        Ok(DcsSolution {
            problem,
            verifier,
            prover,
            objective,
            achieved_completeness,
            achieved_soundness,
            achieved_prover_precision,
            optimal,
        })
    }

    /// Recomputes every metric and checks the constraints exactly.
    pub fn verify(&self, instance: &CsInstance) -> Result<()> {
        let fresh = Self::assemble(
            instance,
            self.problem.clone(),
            self.verifier.clone(),
            self.prover.clone(),
            self.optimal,
        )?;
        if fresh != *self {
            return Err(Error::InvalidArgument(
                "stored metrics differ from the recomputed ones".into(),
            ));
        }
        let one = ExactRatio::one();
        let complete = self.achieved_completeness >= &one - self.problem.eps_c();
        let second = match &self.problem {
            Problem::Dcs { eps_s, .. } => self.achieved_soundness >= &one - eps_s,
            Problem::Dcs2 { q, .. } => self.achieved_prover_precision <= &one - q,
        };
        if complete && second {
            Ok(())
        } else {
            Err(Error::Infeasible)
        }
    }
}

/// Precision of every certificate as an integer multiple of `1/scale`, where
/// `scale` is the lcm of all certificate degrees.
struct PrecisionTable<W> {
    scale: BigInt,
    /// Per in-class point: neighbours sorted by (precision, index).
    ranked: Vec<Vec<usize>>,
    scaled: Vec<W>,
}

fn degree_lcm(instance: &CsInstance) -> BigInt {
    (0..instance.num_certificates())
        .map(|c| BigInt::from(instance.certificate_degree(c).max(1) as u64))
        .fold(BigInt::from(1u8), |acc, d| {
            num_integer::Integer::lcm(&acc, &d)
        })
}

impl<W: Scalar> PrecisionTable<W> {
    fn new(instance: &CsInstance, convert: impl Fn(BigInt) -> W) -> Self {
        let scale = degree_lcm(instance);
        let scaled: Vec<W> = (0..instance.num_certificates())
            .map(|c| {
                let degree = instance.certificate_degree(c).max(1) as u64;
                let inside = instance.certificate_in(c).len() as u64;
                convert(BigInt::from(inside) * (&scale / BigInt::from(degree)))
            })
            .collect();
        let ranked = (0..instance.num_in())
            .map(|x| {
                let mut n = instance.in_neighbors(x).to_vec();
                n.sort_by(|&a, &b| scaled[a].cmp(&scaled[b]).then(a.cmp(&b)));
                n
            })
            .collect();
        PrecisionTable {
            scale,
            ranked,
            scaled,
        }
    }

    /// Cheapest prover for the verifier `accepts`, with at most `budget`
    /// datapoints on rejected certificates. Returns the scaled precision sum
    /// and, if `choices` is given, fills in the assignment.
    fn cheapest_prover(
        &self,
        accepts: &[bool],
        budget: usize,
        savings: &mut Vec<(W, usize)>,
        mut choices: Option<&mut Vec<usize>>,
    ) -> Option<W> {
        savings.clear();
        let mut mandatory = 0;
        let mut total = W::zero();
        if let Some(ch) = choices.as_deref_mut() {
            ch.clear();
        }
        for (x, ranked) in self.ranked.iter().enumerate() {
            let cheapest = ranked[0];
            let pick = match ranked.iter().find(|&&c| accepts[c]) {
                None => {
                    mandatory += 1;
                    if mandatory > budget {
                        return None;
                    }
                    cheapest
                }
                Some(&best) => {
                    if self.scaled[best] > self.scaled[cheapest] {
                        savings
                            .push((self.scaled[best].clone() - self.scaled[cheapest].clone(), x));
                    }
                    best
                }
            };
            total = total + self.scaled[pick].clone();
            if let Some(ch) = choices.as_deref_mut() {
                ch.push(pick);
            }
        }
        let spend = (budget - mandatory).min(savings.len());
        if spend > 0 {
            savings.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
            for (saving, x) in savings.iter().take(spend) {
                total = total - saving.clone();
                if let Some(ch) = choices.as_deref_mut() {
                    ch[*x] = self.ranked[*x][0];
                }
            }
        }
        Some(total)
    }

    /// `Pr(M)` from a scaled sum.
    fn precision_of(&self, sum: &W, num_in: usize) -> ExactRatio {
        ExactRatio::new(sum.to_bigint(), &self.scale * BigInt::from(num_in as u64))
    }
}

fn small_table(instance: &CsInstance) -> Option<PrecisionTable<u128>> {
    // Sums stay below |D₁| * scale, so a 64-bit scale is safe in u128.
    degree_lcm(instance).to_u64()?;
    Some(PrecisionTable::new(instance, |v| {
        v.to_u128().expect("checked above")
    }))
}

fn big_table(instance: &CsInstance) -> PrecisionTable<BigInt> {
    PrecisionTable::new(instance, |v| v)
}

fn require_prover(instance: &CsInstance) -> Result<()> {
    match (0..instance.num_in()).find(|&x| instance.in_neighbors(x).is_empty()) {
        Some(x) => Err(Error::NoProver(instance.in_class()[x].clone())),
        None => Ok(()),
    }
}

fn check_budget(instance: &CsInstance, max_certificates: usize) -> Result<()> {
    let m = instance.num_certificates();
    if m > max_certificates || m > 63 {
        Err(Error::BudgetExceeded {
            what: "exact solver",
            size: m,
            budget: max_certificates.min(63),
            hint: "; use the greedy solver instead",
        })
    } else {
        Ok(())
    }
}

fn accept_flags(instance: &CsInstance, accepted: &VerifierAcceptance) -> Vec<bool> {
    (0..instance.num_certificates())
        .map(|c| accepted.accepts(c))
        .collect()
}

/// Minimum-precision prover for a fixed verifier under the completeness
/// tolerance `eps_c`, together with that minimum `Pr(M)`.
///
/// Datapoints without an accepted certificate must miss; the remaining miss
/// budget goes to the datapoints that save the most precision by switching
/// to their lowest-precision certificate (ties by datapoint order). Returns
/// [`Error::Infeasible`] when the mandatory misses already exceed the budget.
pub fn optimal_prover_given_verifier(
    instance: &CsInstance,
    accepted: &VerifierAcceptance,
    eps_c: &ExactRatio,
) -> Result<(ProverAssignment, ExactRatio)> {
    accepted.check(instance)?;
    require_prover(instance)?;
    let flags = accept_flags(instance, accepted);
    let budget = eps_c.allowance(instance.num_in());
    let mut choices = Vec::new();
    let precision = match small_table(instance) {
        Some(t) => t
            .cheapest_prover(&flags, budget, &mut Vec::new(), Some(&mut choices))
            .map(|s| t.precision_of(&s, instance.num_in())),
        None => {
            let t = big_table(instance);
            t.cheapest_prover(&flags, budget, &mut Vec::new(), Some(&mut choices))
                .map(|s| t.precision_of(&s, instance.num_in()))
        }
    };
    let precision = precision.ok_or(Error::Infeasible)?;
    Ok((ProverAssignment::from_choices_unchecked(choices), precision))
}

/// Mutable enumeration state for one worker: accepted flags plus how many
/// accepted certificates touch each out-class point.
struct Walk {
    accepts: Vec<bool>,
    out_hits: Vec<u32>,
    fooled: usize,
    mask: u64,
}

impl Walk {
    fn new(instance: &CsInstance) -> Self {
        Walk {
            accepts: vec![false; instance.num_certificates()],
            out_hits: vec![0; instance.num_out()],
            fooled: 0,
            mask: 0,
        }
    }

    fn include(&mut self, instance: &CsInstance, c: usize) {
        self.accepts[c] = true;
        self.mask |= 1 << c;
        for &y in instance.certificate_out(c) {
            self.out_hits[y] += 1;
            if self.out_hits[y] == 1 {
                self.fooled += 1;
            }
        }
    }

    fn exclude(&mut self, instance: &CsInstance, c: usize) {
        self.accepts[c] = false;
        self.mask &= !(1 << c);
        for &y in instance.certificate_out(c) {
            self.out_hits[y] -= 1;
            if self.out_hits[y] == 0 {
                self.fooled -= 1;
            }
        }
    }
}

/// Incumbent of an enumeration: key (smaller is better) and verifier mask.
type Incumbent<K> = Option<(K, u64)>;

fn keep_better<K: Ord>(a: Incumbent<K>, b: Incumbent<K>) -> Incumbent<K> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match a.0.cmp(&b.0).then(lex_cmp_masks(a.1, b.1)) {
            Ordering::Greater => Some(b),
            _ => Some(a),
        },
    }
}

/// Visits every verifier set whose fooled-point count stays within
/// `limit(incumbent)`; fooled counts only grow with the accepted set, so
/// subtrees past the limit are skipped. The work is split across workers on
/// the first certificates and merged with the deterministic tie-break.
fn enumerate_verifiers<K, F, L>(instance: &CsInstance, limit: L, visit: F) -> Incumbent<K>
where
    K: Ord + Send,
    F: Fn(&Walk) -> Option<K> + Sync,
    L: Fn(&Incumbent<K>) -> usize + Sync,
{
    fn recurse<K: Ord>(
        instance: &CsInstance,
        pos: usize,
        walk: &mut Walk,
        best: &mut Incumbent<K>,
        limit: &dyn Fn(&Incumbent<K>) -> usize,
        visit: &dyn Fn(&Walk) -> Option<K>,
    ) {
        if walk.fooled > limit(best) {
            return;
        }
        if pos == instance.num_certificates() {
            if let Some(key) = visit(walk) {
                *best = keep_better(best.take(), Some((key, walk.mask)));
            }
            return;
        }
        recurse(instance, pos + 1, walk, best, limit, visit);
        walk.include(instance, pos);
        recurse(instance, pos + 1, walk, best, limit, visit);
        walk.exclude(instance, pos);
    }

    let split = instance.num_certificates().min(SPLIT_DEPTH);
    (0u64..1 << split)
        .into_par_iter()
        .map(|prefix| {
            let mut walk = Walk::new(instance);
            for c in 0..split {
                if prefix >> c & 1 == 1 {
                    walk.include(instance, c);
                }
            }
            let mut best = None;
            recurse(instance, split, &mut walk, &mut best, &limit, &visit);
            best
        })
        .reduce(|| None, keep_better)
}

fn solution_from_mask(
    instance: &CsInstance,
    problem: Problem,
    mask: u64,
    optimal: bool,
) -> Result<DcsSolution> {
    let verifier = VerifierAcceptance::from_mask(instance, mask);
    let (prover, _) = optimal_prover_given_verifier(instance, &verifier, problem.eps_c())?;
    DcsSolution::assemble(instance, problem, verifier, prover, optimal)
}

fn dcs_search<W: Scalar>(
    instance: &CsInstance,
    table: &PrecisionTable<W>,
    miss: usize,
    fool: usize,
) -> Option<u64> {
    enumerate_verifiers(
        instance,
        |_| fool,
        |walk| table.cheapest_prover(&walk.accepts, miss, &mut Vec::new(), None),
    )
    .map(|b| b.1)
}

/// Exact DCS by verifier enumeration.
///
/// Ties in the objective go to the verifier whose sorted accepted-id sequence
/// is lexicographically smallest; the prover is then the one built by
/// [`optimal_prover_given_verifier`]. Results do not depend on the number of
/// worker threads.
pub fn solve_dcs_exact(
    instance: &CsInstance,
    eps_c: &ExactRatio,
    eps_s: &ExactRatio,
    max_certificates: usize,
) -> Result<DcsSolution> {
    check_budget(instance, max_certificates)?;
    require_prover(instance)?;
    if eps_s.is_negative() || eps_c.is_negative() {
        return Err(Error::Infeasible);
    }
    let problem = Problem::Dcs {
        eps_c: eps_c.clone(),
        eps_s: eps_s.clone(),
    };
    let miss = eps_c.allowance(instance.num_in());
    let fool = eps_s.allowance(instance.num_out());
    let mask = match small_table(instance) {
        Some(t) => dcs_search(instance, &t, miss, fool),
        None => dcs_search(instance, &big_table(instance), miss, fool),
    }
    .ok_or(Error::Infeasible)?;
    solution_from_mask(instance, problem, mask, true)
}

fn dcs2_search<W: Scalar>(
    instance: &CsInstance,
    table: &PrecisionTable<W>,
    miss: usize,
    threshold: &W,
) -> Option<u64> {
    let num_out = instance.num_out();
    enumerate_verifiers(
        instance,
        |best: &Incumbent<usize>| best.as_ref().map_or(num_out, |b| b.0),
        |walk| {
            let sum = table.cheapest_prover(&walk.accepts, miss, &mut Vec::new(), None)?;
            (sum <= *threshold).then_some(walk.fooled)
        },
    )
    .map(|b| b.1)
}

/// Exact DCS2 by verifier enumeration; ties as in [`solve_dcs_exact`].
pub fn solve_dcs2_exact(
    instance: &CsInstance,
    eps_c: &ExactRatio,
    q: &ExactRatio,
    max_certificates: usize,
) -> Result<DcsSolution> {
    check_budget(instance, max_certificates)?;
    require_prover(instance)?;
    let ceiling = ExactRatio::one() - q.clone();
    if ceiling.is_negative() || eps_c.is_negative() {
        return Err(Error::Infeasible);
    }
    let problem = Problem::Dcs2 {
        eps_c: eps_c.clone(),
        q: q.clone(),
    };
    let miss = eps_c.allowance(instance.num_in());
    // Pr(M) <= 1 - q  <=>  scaled sum <= floor((1 - q) * scale * |D₁|).
    let threshold = |scale: &BigInt| {
        (&ceiling * &ExactRatio::from_integer(scale * BigInt::from(instance.num_in() as u64)))
            .floor()
    };
    let mask = match small_table(instance) {
        Some(t) => {
            let limit = threshold(&t.scale)
                .to_u128()
                .expect("bounded by |D1| * scale");
            dcs2_search(instance, &t, miss, &limit)
        }
        None => {
            let t = big_table(instance);
            let limit = threshold(&t.scale);
            dcs2_search(instance, &t, miss, &limit)
        }
    }
    .ok_or(Error::Infeasible)?;
    solution_from_mask(instance, problem, mask, true)
}

fn misses(instance: &CsInstance, accepts: &[bool]) -> usize {
    (0..instance.num_in())
        .filter(|&x| !instance.in_neighbors(x).iter().any(|&c| accepts[c]))
        .count()
}

fn fooled(instance: &CsInstance, accepts: &[bool]) -> usize {
    (0..instance.num_out())
        .filter(|&y| instance.out_neighbors(y).iter().any(|&c| accepts[c]))
        .count()
}

/// Whether some verifier/prover pair reaches completeness `1 - eps_c` and
/// soundness `1 - eps_s`.
///
/// Tries the verifier that accepts exactly the certificates without
/// out-class neighbours first, then falls back to enumeration.
pub fn is_eps_csi(
    instance: &CsInstance,
    eps_c: &ExactRatio,
    eps_s: &ExactRatio,
    max_certificates: usize,
) -> Result<bool> {
    if require_prover(instance).is_err() || eps_s.is_negative() || eps_c.is_negative() {
        return Ok(false);
    }
    let miss = eps_c.allowance(instance.num_in());
    let fool = eps_s.allowance(instance.num_out());
    let clean: Vec<bool> = (0..instance.num_certificates())
        .map(|c| instance.certificate_out(c).is_empty())
        .collect();
    if misses(instance, &clean) <= miss {
        return Ok(true);
    }
    check_budget(instance, max_certificates)?;
    let found = enumerate_verifiers(
        instance,
        |best: &Incumbent<()>| if best.is_some() { 0 } else { fool },
        |walk| (misses(instance, &walk.accepts) <= miss).then_some(()),
    );
    Ok(found.is_some())
}

/// Greedy comparison key; larger is better.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Score {
    /// By how much the constraints are violated.
    Infeasible(Reverse<usize>),
    /// Scaled `Pr(M)`.
    Feasible(Reverse<BigInt>),
}

/// Local search for DCS; the result carries `optimal = false`.
///
/// Each restart begins from full acceptance, drops the certificates touching
/// the most out-class points until soundness holds, then applies the best
/// improving single-certificate flip until none is left. The verifier that
/// accepts only certificates without out-class neighbours is always
/// considered too. Restart 0 breaks ties by certificate order; the other
/// restarts drop a random quarter of the start set and shuffle the tie order,
/// each with its own ChaCha8 stream derived from `seed`.
pub fn solve_dcs_greedy(
    instance: &CsInstance,
    eps_c: &ExactRatio,
    eps_s: &ExactRatio,
    seed: u64,
) -> Result<DcsSolution> {
    require_prover(instance)?;
    if eps_s.is_negative() || eps_c.is_negative() {
        return Err(Error::Infeasible);
    }
    let problem = Problem::Dcs {
        eps_c: eps_c.clone(),
        eps_s: eps_s.clone(),
    };
    let m = instance.num_certificates();
    let miss = eps_c.allowance(instance.num_in());
    let fool = eps_s.allowance(instance.num_out());
    let table = big_table(instance);
    let score = |accepts: &[bool]| -> Score {
        let over = fooled(instance, accepts).saturating_sub(fool)
            + misses(instance, accepts).saturating_sub(miss);
        if over > 0 {
            return Score::Infeasible(Reverse(over));
        }
        match table.cheapest_prover(accepts, miss, &mut Vec::new(), None) {
            Some(sum) => Score::Feasible(Reverse(sum)),
            None => Score::Infeasible(Reverse(usize::MAX)),
        }
    };

    let mut best: Option<(Score, Vec<usize>)> = None;
    let mut offer = |s: Score, accepts: &[bool]| {
        let indices: Vec<usize> = (0..m).filter(|&c| accepts[c]).collect();
        let replace = match &best {
            None => true,
            Some((bs, bi)) => s > *bs || (s == *bs && indices < *bi),
        };
        if replace {
            best = Some((s, indices));
        }
    };

    let clean: Vec<bool> = (0..m)
        .map(|c| instance.certificate_out(c).is_empty())
        .collect();
    offer(score(&clean), &clean);

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    for restart in 0..GREEDY_RESTARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(master.next_u64());
        let mut order: Vec<usize> = (0..m).collect();
        let mut accepts = vec![true; m];
        if restart > 0 {
            order.shuffle(&mut rng);
            for flag in accepts.iter_mut() {
                if rng.gen_ratio(1, 4) {
                    *flag = false;
                }
            }
        }
        while fooled(instance, &accepts) > fool {
            let mut drop: Option<usize> = None;
            for &c in order.iter().filter(|&&c| accepts[c]) {
                let degree = instance.certificate_out(c).len();
                if drop.is_none_or(|d| degree > instance.certificate_out(d).len()) {
                    drop = Some(c);
                }
            }
            accepts[drop.expect("an accepted certificate fools some point")] = false;
        }
        let mut current = score(&accepts);
        loop {
            let mut step: Option<(Score, usize)> = None;
            for &c in &order {
                accepts[c] = !accepts[c];
                let s = score(&accepts);
                accepts[c] = !accepts[c];
                if s > current && step.as_ref().is_none_or(|(bs, _)| s > *bs) {
                    step = Some((s, c));
                }
            }
            let Some((s, c)) = step else { break };
            accepts[c] = !accepts[c];
            current = s;
        }
        offer(current, &accepts);
    }

    match best {
        Some((Score::Feasible(_), indices)) => {
            let verifier = VerifierAcceptance::from_indices(instance, indices)?;
            let (prover, _) = optimal_prover_given_verifier(instance, &verifier, eps_c)?;
            DcsSolution::assemble(instance, problem, verifier, prover, false)
        }
        _ => Err(Error::Infeasible),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::letters_digits;
    use crate::model::tests::t1;
    use crate::reductions::{reduce_dks, SourceGraph};

    fn r(n: u64, d: u64) -> ExactRatio {
        ExactRatio::new(n, d)
    }

    fn ids(instance: &CsInstance, m: &ProverAssignment) -> Vec<(String, String)> {
        m.to_id_map(instance).into_iter().collect()
    }

    fn pair(a: &str, b: &str) -> (String, String) {
        (a.into(), b.into())
    }

    #[test]
    fn inner_prover_on_t1() {
        let inst = t1();
        let a = VerifierAcceptance::from_ids(&inst, &["a"]).unwrap();
        let (m, p) = optimal_prover_given_verifier(&inst, &a, &r(0, 1)).unwrap();
        assert_eq!(ids(&inst, &m), [pair("x1", "a"), pair("x2", "a")]);
        assert_eq!(p, r(1, 1));

        let (m, p) = optimal_prover_given_verifier(&inst, &a, &r(1, 2)).unwrap();
        assert_eq!(ids(&inst, &m), [pair("x1", "a"), pair("x2", "b")]);
        assert_eq!(p, r(3, 4));
        assert_eq!(prover_precision(&inst, &m).unwrap(), p);

        let none = VerifierAcceptance::none(&inst);
        assert_eq!(
            optimal_prover_given_verifier(&inst, &none, &r(0, 1)),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn dcs_on_t1_has_no_deception() {
        let inst = t1();
        let sol = solve_dcs_exact(&inst, &r(0, 1), &r(0, 1), 24).unwrap();
        assert_eq!(sol.objective, r(0, 1));
        assert_eq!(sol.verifier.to_ids(&inst), ["a"]);
        assert!(sol.optimal);
        sol.verify(&inst).unwrap();
    }

    #[test]
    fn dcs_on_letters_digits() {
        let inst = letters_digits(4).unwrap();
        let sol = solve_dcs_exact(&inst, &r(1, 5), &r(1, 5), 24).unwrap();
        assert_eq!(sol.objective, r(1, 2));
        assert_eq!(sol.achieved_completeness, r(4, 5));
        assert_eq!(sol.achieved_soundness, r(4, 5));
        assert!(sol
            .verifier
            .to_ids(&inst)
            .iter()
            .all(|c| c.starts_with("letter")));
        assert_eq!(sol.verifier.len(), 4);
        sol.verify(&inst).unwrap();
    }

    #[test]
    fn dcs_on_k3_gadget() {
        let k3 = SourceGraph::from_indices(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let art = reduce_dks(&k3, 2).unwrap();
        let sol =
            solve_dcs_exact(&art.instance, &art.eps_c, art.eps_s.as_ref().unwrap(), 24).unwrap();
        assert_eq!(sol.objective, r(1, 6));
    }

    #[test]
    fn dcs2_examples() {
        let inst = letters_digits(4).unwrap();
        let sol = solve_dcs2_exact(&inst, &r(1, 5), &r(1, 2), 24).unwrap();
        assert_eq!(sol.objective, r(1, 5));
        assert!(sol.achieved_prover_precision <= r(1, 2));
        sol.verify(&inst).unwrap();

        // T1 provers: {x1->a, x2->a} has Pr 1, {x1->a, x2->b} has Pr 3/4, so the
        // ceiling 1 - q is reachable iff q <= 1/4, and then only by fooling y1.
        let loose = solve_dcs2_exact(&t1(), &r(0, 1), &r(1, 4), 24).unwrap();
        assert_eq!(loose.objective, r(1, 1));
        assert_eq!(loose.achieved_prover_precision, r(3, 4));
        assert_eq!(
            solve_dcs2_exact(&t1(), &r(0, 1), &r(1, 3), 24),
            Err(Error::Infeasible)
        );
        let trivial = solve_dcs2_exact(&t1(), &r(0, 1), &r(0, 1), 24).unwrap();
        assert_eq!(trivial.objective, r(0, 1));
    }

    #[test]
    fn budget_is_enforced() {
        let inst = letters_digits(4).unwrap();
        match solve_dcs_exact(&inst, &r(1, 5), &r(1, 5), 7) {
            Err(Error::BudgetExceeded {
                size: 8,
                budget: 7,
                hint,
                ..
            }) => assert!(hint.contains("greedy")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            solve_dcs2_exact(&inst, &r(1, 5), &r(1, 2), 3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn eps_csi_examples() {
        assert!(is_eps_csi(&t1(), &r(0, 1), &r(0, 1), 24).unwrap());
        assert!(is_eps_csi(&letters_digits(4).unwrap(), &r(1, 5), &r(1, 5), 24).unwrap());
        assert!(!is_eps_csi(&letters_digits(4).unwrap(), &r(0, 1), &r(1, 5), 24).unwrap());
        let k3 = SourceGraph::from_indices(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let art = reduce_dks(&k3, 2).unwrap();
        assert!(is_eps_csi(&art.instance, &art.eps_c, art.eps_s.as_ref().unwrap(), 24).unwrap());
    }

    #[test]
    fn greedy_examples() {
        let inst = letters_digits(4).unwrap();
        let sol = solve_dcs_greedy(&inst, &r(1, 5), &r(1, 5), 7).unwrap();
        assert!(!sol.optimal);
        assert!(sol.objective <= r(1, 2));
        sol.verify(&inst).unwrap();
        assert_eq!(sol, solve_dcs_greedy(&inst, &r(1, 5), &r(1, 5), 7).unwrap());

        let t = solve_dcs_greedy(&t1(), &r(0, 1), &r(0, 1), 0).unwrap();
        assert_eq!(t.objective, r(0, 1));
        assert_eq!(
            solve_dcs_greedy(&inst, &r(0, 1), &r(0, 1), 0),
            Err(Error::Infeasible)
        );
    }

    #[test]
    fn problem_serializes_with_tag() {
        let p = Problem::Dcs2 {
            eps_c: r(1, 5),
            q: r(1, 2),
        };
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"problem":"dcs2","eps_c":"1/5","q":"1/2"}"#);
        assert_eq!(serde_json::from_str::<Problem>(&text).unwrap(), p);
    }
}

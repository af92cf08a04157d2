//! Exact completeness, soundness, precision and asymmetric feature correlation.
//!
//! Certificates are addressed by index into [`CsInstance::certificates`];
//! certificate sets are slices of such indices.

mod afc;

pub use afc::{afc_exact, afc_greedy, afc_of_set, AfcTerm, AfcWitness, DEFAULT_CERTIFICATE_BUDGET};

use crate::error::{Error, Result};
use crate::model::{CsInstance, ProverAssignment, VerifierAcceptance};
use crate::ratio::ExactRatio;

fn ratio(num: usize, den: usize) -> ExactRatio {
    ExactRatio::new(num as u64, den as u64)
}

fn check_certificate(instance: &CsInstance, c: usize) -> Result<()> {
    if c < instance.num_certificates() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "certificate index {c} out of range"
        )))
    }
}

/// Number of in-class datapoints whose assigned certificate is accepted.
pub(crate) fn completeness_count(
    accepted: &VerifierAcceptance,
    prover: &ProverAssignment,
) -> usize {
    prover
        .choices()
        .iter()
        .filter(|&&c| accepted.accepts(c))
        .count()
}

/// Number of out-class datapoints with no accepted certificate.
pub(crate) fn sound_count(instance: &CsInstance, accepted: &VerifierAcceptance) -> usize {
    (0..instance.num_out())
        .filter(|&y| {
            instance
                .out_neighbors(y)
                .iter()
                .all(|&c| !accepted.accepts(c))
        })
        .count()
}

/// Number of in-class datapoints with at least one accepted certificate.
pub(crate) fn reachable_in_count(instance: &CsInstance, accepted: &VerifierAcceptance) -> usize {
    (0..instance.num_in())
        .filter(|&x| {
            instance
                .in_neighbors(x)
                .iter()
                .any(|&c| accepted.accepts(c))
        })
        .count()
}

pub fn completeness(
    instance: &CsInstance,
    accepted: &VerifierAcceptance,
    prover: &ProverAssignment,
) -> Result<ExactRatio> {
    accepted.check(instance)?;
    prover.check(instance)?;
    Ok(ratio(
        completeness_count(accepted, prover),
        instance.num_in(),
    ))
}

/// Fraction of out-class datapoints that cannot produce any accepted
/// certificate. The adversarial prover is implicit: a point is fooled as soon
/// as one of its certificates is accepted.
pub fn soundness(instance: &CsInstance, accepted: &VerifierAcceptance) -> Result<ExactRatio> {
    accepted.check(instance)?;
    Ok(ratio(sound_count(instance, accepted), instance.num_out()))
}

/// Best completeness over all provers for a fixed verifier, with a maximiser.
///
/// Each datapoint takes its smallest accepted certificate if it has one and
/// its smallest certificate otherwise.
pub fn best_completeness(
    instance: &CsInstance,
    accepted: &VerifierAcceptance,
) -> Result<(ExactRatio, ProverAssignment)> {
    accepted.check(instance)?;
    let mut choices = Vec::with_capacity(instance.num_in());
    let mut hits = 0;
    for x in 0..instance.num_in() {
        let neighbors = instance.in_neighbors(x);
        let first = *neighbors
            .first()
            .ok_or_else(|| Error::NoProver(instance.in_class()[x].clone()))?;
        match neighbors.iter().find(|&&c| accepted.accepts(c)) {
            Some(&c) => {
                hits += 1;
                choices.push(c);
            }
            None => choices.push(first),
        }
    }
    Ok((
        ratio(hits, instance.num_in()),
        ProverAssignment::from_choices_unchecked(choices),
    ))
}

pub fn certificate_precision(instance: &CsInstance, certificate: usize) -> Result<ExactRatio> {
    check_certificate(instance, certificate)?;
    let degree = instance.certificate_degree(certificate);
    if degree == 0 {
        return Err(Error::UndefinedPrecision);
    }
    Ok(ratio(instance.certificate_in(certificate).len(), degree))
}

/// `(|N(F) ∩ D₁|, |N(F) ∩ D₋₁|)`.
pub(crate) fn set_neighborhood_counts(
    instance: &CsInstance,
    set: &[usize],
) -> Result<(usize, usize)> {
    let mut in_seen = vec![false; instance.num_in()];
    let mut out_seen = vec![false; instance.num_out()];
    for &c in set {
        check_certificate(instance, c)?;
        instance
            .certificate_in(c)
            .iter()
            .for_each(|&x| in_seen[x] = true);
        instance
            .certificate_out(c)
            .iter()
            .for_each(|&y| out_seen[y] = true);
    }
    let count = |v: Vec<bool>| v.into_iter().filter(|&b| b).count();
    Ok((count(in_seen), count(out_seen)))
}

pub fn set_precision(instance: &CsInstance, set: &[usize]) -> Result<ExactRatio> {
    let (inside, outside) = set_neighborhood_counts(instance, set)?;
    if inside + outside == 0 {
        return Err(Error::UndefinedPrecision);
    }
    Ok(ratio(inside, inside + outside))
}

/// Average precision of the certificates the prover hands out.
pub fn prover_precision(instance: &CsInstance, prover: &ProverAssignment) -> Result<ExactRatio> {
    prover.check(instance)?;
    let mut total = ExactRatio::zero();
    for &c in prover.choices() {
        total = &total + &certificate_precision(instance, c)?;
    }
    Ok(&total / &ExactRatio::from_integer(instance.num_in() as u64))
}

/// Precision of the accepted certificate set.
pub fn verifier_precision(
    instance: &CsInstance,
    accepted: &VerifierAcceptance,
) -> Result<ExactRatio> {
    accepted.check(instance)?;
    set_precision(instance, &accepted.accepted_indices())
        .map_err(|_| Error::UndefinedVerifierPrecision)
}

/// Verifier precision expressed through the observable error rates,
/// `1 - es / (1 - ec + es)` with `ec = 1 - max_M compl(A, M)` and
/// `es = 1 - sound(A)`.
///
/// Agrees with [`verifier_precision`] whenever both classes have the same size.
pub fn verifier_precision_formula(
    instance: &CsInstance,
    accepted: &VerifierAcceptance,
) -> Result<ExactRatio> {
    accepted.check(instance)?;
    let best = ratio(reachable_in_count(instance, accepted), instance.num_in());
    let eps_s = ExactRatio::one() - ratio(sound_count(instance, accepted), instance.num_out());
    let denominator = &best + &eps_s;
    let fraction = eps_s
        .checked_div(&denominator)
        .ok_or(Error::FormulaUndefined)?;
    Ok(ExactRatio::one() - fraction)
}

/// `κ(φ, F) = |N(φ)∩D₋₁|·|N(F)∩D₁| / (|N(F)∩D₋₁|·|N(φ)∩D₁|)`.
pub fn afc_kappa(instance: &CsInstance, certificate: usize, set: &[usize]) -> Result<ExactRatio> {
    check_certificate(instance, certificate)?;
    if !set.contains(&certificate) {
        return Err(Error::KappaUndefined(
            "certificate is not a member of the set".into(),
        ));
    }
    let (set_in, set_out) = set_neighborhood_counts(instance, set)?;
    let cert_in = instance.certificate_in(certificate).len();
    let cert_out = instance.certificate_out(certificate).len();
    if set_out == 0 {
        return Err(Error::KappaUndefined(
            "set has no out-class neighbour".into(),
        ));
    }
    if cert_in == 0 {
        return Err(Error::KappaUndefined(
            "certificate has no in-class neighbour".into(),
        ));
    }
    Ok(ExactRatio::new(
        (cert_out * set_in) as u64,
        (set_out * cert_in) as u64,
    ))
}

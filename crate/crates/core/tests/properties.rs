mod common;

use common::{exact, q, Naive};
use dcs_core::generators::{random_csi, RandomCsiParams};
use dcs_core::io::{read_instance, write_instance};
use dcs_core::metrics::{
    afc_exact, afc_greedy, afc_of_set, best_completeness, certificate_precision, completeness,
    prover_precision, set_precision, soundness, verifier_precision, verifier_precision_formula,
};
use dcs_core::model::validate;
use dcs_core::reductions::{reduce_dks, reduce_mku, SetSystem, SourceGraph};
use dcs_core::solvers::{
    optimal_prover_given_verifier, solve_dcs2_exact, solve_dcs_exact, solve_dcs_greedy,
};
use dcs_core::{CsInstance, Error, ExactRatio, ProverAssignment, RawInstance, VerifierAcceptance};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use serde_json::Map;

/// Instance with every in-class point given at least one certificate.
fn instance_strategy(
    max_in: usize,
    max_out: usize,
    max_m: usize,
) -> impl Strategy<Value = CsInstance> {
    sized_strategy((1..=max_in, 1..=max_out, 1..=max_m))
}

fn balanced_strategy(max_n: usize, max_m: usize) -> impl Strategy<Value = CsInstance> {
    sized_strategy((1..=max_n, 1..=max_m).prop_map(|(n, m)| (n, n, m)))
}

fn sized_strategy(
    sizes: impl Strategy<Value = (usize, usize, usize)>,
) -> impl Strategy<Value = CsInstance> {
    sizes
        .prop_flat_map(|(n_in, n_out, m)| {
            (
                Just((n_in, n_out, m)),
                proptest::collection::vec(any::<bool>(), (n_in + n_out) * m),
            )
        })
        .prop_map(|((n_in, n_out, m), bits)| {
            let ins: Vec<String> = (0..n_in).map(|i| format!("x{i}")).collect();
            let outs: Vec<String> = (0..n_out).map(|i| format!("y{i}")).collect();
            let certs: Vec<String> = (0..m).map(|i| format!("c{i}")).collect();
            let mut edges = Vec::new();
            for (d, point) in ins.iter().chain(&outs).enumerate() {
                for (c, cert) in certs.iter().enumerate() {
                    if bits[d * m + c] {
                        edges.push((point.clone(), cert.clone()));
                    }
                }
            }
            for (i, x) in ins.iter().enumerate() {
                edges.push((x.clone(), certs[i % m].clone()));
            }
            let raw = RawInstance {
                in_class: ins,
                out_class: outs,
                certificates: certs,
                edges,
            };
            CsInstance::from_raw(&raw)
                .expect("generated instance is valid")
                .0
        })
}

fn mask_ids(instance: &CsInstance, mask: u64) -> Vec<usize> {
    (0..instance.num_certificates())
        .filter(|&c| mask >> c & 1 == 1)
        .collect()
}

fn r(e: &ExactRatio) -> BigRational {
    exact(e)
}

fn small_eps() -> impl Strategy<Value = (usize, usize)> {
    (0usize..=3, 1usize..=4).prop_map(|(n, d)| (n.min(d), d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn metrics_match_naive_formulas(inst in instance_strategy(5, 5, 6), a_bits in any::<u64>(), f_bits in any::<u64>(), pick in any::<u64>()) {
        let naive = Naive::new(&inst);
        let m = inst.num_certificates();
        let a_mask = a_bits & ((1 << m) - 1);
        let f_mask = f_bits & ((1 << m) - 1);
        let verifier = VerifierAcceptance::from_mask(&inst, a_mask);
        let choices: Vec<usize> = (0..inst.num_in())
            .map(|x| {
                let n = inst.in_neighbors(x);
                n[(pick as usize).wrapping_add(x * 7) % n.len()]
            })
            .collect();
        let prover = ProverAssignment::new(&inst, choices.clone()).unwrap();

        prop_assert_eq!(r(&completeness(&inst, &verifier, &prover).unwrap()), naive.completeness(a_mask, &choices));
        prop_assert_eq!(r(&soundness(&inst, &verifier).unwrap()), naive.soundness(a_mask));
        prop_assert_eq!(r(&prover_precision(&inst, &prover).unwrap()), naive.prover_precision(&choices));
        for c in 0..m {
            prop_assert_eq!(certificate_precision(&inst, c).ok().map(|p| r(&p)), naive.precision(c));
        }
        prop_assert_eq!(set_precision(&inst, &mask_ids(&inst, f_mask)).ok().map(|p| r(&p)), naive.set_precision(f_mask));
        prop_assert_eq!(afc_of_set(&inst, &mask_ids(&inst, f_mask)).ok().map(|w| r(&w.value)), naive.afc_of(f_mask));
    }

    #[test]
    fn validation_is_repeatable_and_neighbourhoods_symmetric(inst in instance_strategy(5, 5, 6)) {
        let raw = inst.to_raw();
        prop_assert_eq!(validate(&raw), validate(&raw));
        let ids: Vec<String> = inst.in_class().iter().chain(inst.out_class()).chain(inst.certificates()).cloned().collect();
        for a in &ids {
            for b in &ids {
                let ab = inst.neighbors(a).unwrap().contains(&b.as_str());
                let ba = inst.neighbors(b).unwrap().contains(&a.as_str());
                prop_assert_eq!(ab, ba);
            }
        }
    }

    #[test]
    fn instance_json_round_trips(inst in instance_strategy(5, 5, 6)) {
        let text = write_instance(&inst, Map::new());
        let (back, warnings, _) = read_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert!(warnings.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn metrics_stay_in_unit_interval(inst in instance_strategy(5, 5, 8), a_bits in any::<u64>()) {
        let m = inst.num_certificates();
        let verifier = VerifierAcceptance::from_mask(&inst, a_bits & ((1 << m) - 1));
        let (best, prover) = best_completeness(&inst, &verifier).unwrap();
        let unit = |v: &ExactRatio| !v.is_negative() && *v <= ExactRatio::one();
        prop_assert!(unit(&best));
        prop_assert!(unit(&soundness(&inst, &verifier).unwrap()));
        prop_assert!(unit(&prover_precision(&inst, &prover).unwrap()));
        if let Ok(p) = verifier_precision(&inst, &verifier) {
            prop_assert!(unit(&p));
        }
    }

    #[test]
    fn acceptance_is_monotone(inst in instance_strategy(6, 6, 10), a_bits in any::<u64>(), extra in any::<u64>()) {
        let m = inst.num_certificates();
        let small = a_bits & ((1 << m) - 1);
        let large = small | (extra & ((1 << m) - 1));
        let (vs, vl) = (VerifierAcceptance::from_mask(&inst, small), VerifierAcceptance::from_mask(&inst, large));
        prop_assert!(best_completeness(&inst, &vs).unwrap().0 <= best_completeness(&inst, &vl).unwrap().0);
        prop_assert!(soundness(&inst, &vs).unwrap() >= soundness(&inst, &vl).unwrap());
    }

    #[test]
    fn verifier_precision_identity_on_balanced(inst in balanced_strategy(6, 6), a_bits in any::<u64>()) {
        let m = inst.num_certificates();
        let verifier = VerifierAcceptance::from_mask(&inst, a_bits & ((1 << m) - 1));
        if let (Ok(direct), Ok(formula)) = (verifier_precision(&inst, &verifier), verifier_precision_formula(&inst, &verifier)) {
            prop_assert_eq!(direct, formula);
        }
    }

    #[test]
    fn afc_exact_matches_naive_and_respects_bound(inst in instance_strategy(5, 5, 8)) {
        let naive = Naive::new(&inst);
        match afc_exact(&inst, 24) {
            Ok(w) => {
                prop_assert_eq!(Some(r(&w.value)), naive.afc_max());
                prop_assert!(w.is_consistent(&inst));
                prop_assert!(w.value <= ExactRatio::from_integer(inst.max_features_per_datapoint() as u64));
                let g = afc_greedy(&inst, 11).unwrap();
                prop_assert!(g.value <= w.value);
                prop_assert!(!g.exact && g.is_consistent(&inst));
            }
            Err(Error::AfcUndefined) => prop_assert_eq!(naive.afc_max(), None),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn inner_prover_matches_enumeration(inst in instance_strategy(6, 4, 5), a_bits in any::<u64>(), eps in small_eps()) {
        let naive = Naive::new(&inst);
        let m = inst.num_certificates();
        let a_mask = a_bits & ((1 << m) - 1);
        let eps_c = ExactRatio::new(eps.0 as u64, eps.1 as u64);
        let verifier = VerifierAcceptance::from_mask(&inst, a_mask);
        let expected = naive.min_prover_precision(a_mask, &q(eps.0, eps.1));
        match optimal_prover_given_verifier(&inst, &verifier, &eps_c) {
            Ok((prover, value)) => {
                prop_assert_eq!(Some(r(&value)), expected);
                prop_assert_eq!(prover_precision(&inst, &prover).unwrap(), value);
                prop_assert!(completeness(&inst, &verifier, &prover).unwrap() >= ExactRatio::one() - eps_c);
            }
            Err(Error::Infeasible) => prop_assert_eq!(expected, None),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_solvers_match_double_enumeration(inst in instance_strategy(4, 4, 6), ec in small_eps(), es in small_eps()) {
        let naive = Naive::new(&inst);
        let (eps_c, eps_s) = (ExactRatio::new(ec.0 as u64, ec.1 as u64), ExactRatio::new(es.0 as u64, es.1 as u64));
        let expected = naive.dcs(&q(ec.0, ec.1), &q(es.0, es.1));
        match solve_dcs_exact(&inst, &eps_c, &eps_s, 24) {
            Ok(sol) => {
                prop_assert_eq!(Some(r(&sol.objective)), expected);
                prop_assert!(sol.verify(&inst).is_ok());
                match solve_dcs_greedy(&inst, &eps_c, &eps_s, 5) {
                    Ok(g) => {
                        prop_assert!(g.objective <= sol.objective);
                        prop_assert!(g.verify(&inst).is_ok());
                    }
                    Err(Error::Infeasible) => {}
                    Err(e) => prop_assert!(false, "unexpected error {e}"),
                }
            }
            Err(Error::Infeasible) => {
                prop_assert_eq!(expected, None);
                prop_assert_eq!(solve_dcs_greedy(&inst, &eps_c, &eps_s, 5), Err(Error::Infeasible));
            }
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }

        let gap = ExactRatio::new(es.0 as u64, es.1 as u64 * 2);
        let expected2 = naive.dcs2(&q(ec.0, ec.1), &exact(&gap));
        match solve_dcs2_exact(&inst, &eps_c, &gap, 24) {
            Ok(sol) => {
                prop_assert_eq!(Some(r(&sol.objective)), expected2);
                prop_assert!(sol.verify(&inst).is_ok());
            }
            Err(Error::Infeasible) => prop_assert_eq!(expected2, None),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn solvers_ignore_worker_count(inst in instance_strategy(5, 5, 10), seed in any::<u64>()) {
        let eps = ExactRatio::new(1, 4);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                (
                    solve_dcs_exact(&inst, &eps, &eps, 24),
                    solve_dcs2_exact(&inst, &eps, &eps, 24),
                    afc_exact(&inst, 24),
                    solve_dcs_greedy(&inst, &eps, &eps, seed),
                )
            })
        };
        prop_assert_eq!(run(1), run(4));
    }

    #[test]
    fn random_generator_is_deterministic(n_in in 1usize..6, n_out in 1usize..6, m in 1usize..8, p in 0u64..=4, seed in any::<u64>()) {
        let params = RandomCsiParams {
            n_in,
            n_out,
            m,
            p_in: ExactRatio::new(p, 4),
            p_out: ExactRatio::new(4 - p, 4),
            seed,
        };
        let a = random_csi(&params).unwrap();
        let b = random_csi(&params).unwrap();
        prop_assert_eq!(write_instance(&a.instance, Map::new()), write_instance(&b.instance, Map::new()));
        prop_assert!(a.instance.validate().is_valid());
        prop_assert!((0..n_in).all(|x| !a.instance.in_neighbors(x).is_empty()));
    }

    #[test]
    fn gadgets_are_perfect(n in 2usize..6, bits in any::<u16>(), k_pick in any::<usize>(), r3 in any::<bool>()) {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut edges: Vec<(usize, usize)> = (0..pairs.len()).filter(|&i| bits >> i & 1 == 1).map(|i| pairs[i]).collect();
        if edges.is_empty() {
            edges.push((0, 1));
        }
        let graph = SourceGraph::from_indices(n, &edges).unwrap();
        let dks = reduce_dks(&graph, 1 + k_pick % n).unwrap();

        let width = if r3 { 3 } else { 2 };
        let universe: Vec<String> = (0..n + 1).map(|e| e.to_string()).collect();
        let sets: Vec<Vec<String>> = edges
            .iter()
            .map(|&(u, v)| {
                let mut s = vec![u.to_string(), v.to_string()];
                if width == 3 {
                    s.push(n.to_string());
                }
                s
            })
            .collect();
        let system = SetSystem::new(&universe, &sets).unwrap();
        let mku = reduce_mku(&system, 1 + k_pick % sets.len()).unwrap();

        for art in [dks, mku] {
            let inst = &art.instance;
            let verifier = VerifierAcceptance::from_ids(inst, &art.phi0_ids()).unwrap();
            let pairs: Vec<(String, String)> = art
                .gadgets
                .iter()
                .flat_map(|g| g.in_class.iter().map(|x| (x.clone(), g.phi0.clone())))
                .collect();
            let prover = ProverAssignment::from_ids(inst, &pairs).unwrap();
            prop_assert!(completeness(inst, &verifier, &prover).unwrap() == ExactRatio::one());
            prop_assert!(soundness(inst, &verifier).unwrap() == ExactRatio::one());
            for g in &art.gadgets {
                let p0 = inst.certificate_index(&g.phi0).unwrap();
                let p1 = inst.certificate_index(&g.phi1).unwrap();
                prop_assert_eq!(certificate_precision(inst, p0).unwrap(), ExactRatio::one());
                prop_assert_eq!(certificate_precision(inst, p1).unwrap(), ExactRatio::new(1, 2));
            }
        }
    }
}

#[test]
fn naive_oracle_sanity() {
    let inst = CsInstance::new(
        &["x1", "x2"],
        &["y1"],
        &["a", "b"],
        &[("x1", "a"), ("x2", "a"), ("x2", "b"), ("y1", "b")],
    )
    .unwrap();
    let naive = Naive::new(&inst);
    assert_eq!(naive.provers().len(), 2);
    assert_eq!(
        naive.dcs(&BigRational::zero(), &BigRational::zero()),
        Some(BigRational::zero())
    );
    assert_eq!(naive.afc_max(), Some(BigRational::one()));
}

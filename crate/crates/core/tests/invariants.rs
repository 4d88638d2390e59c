use std::collections::BTreeSet;

use proptest::prelude::*;

use causal_forge::dsl::{parse_model, serialize_model};
use causal_forge::explain::{extract_rx, influence_graph, ArgumentPolicy, RxContext};
use causal_forge::fuzz::{
    brute_force_external_coherence, brute_force_internal_coherence, generate_model_at, naive_evaluate,
    DomainProfile, EquationProfile, GeneratorParams,
};
use causal_forge::verify::{check_external_coherence, check_internal_coherence};
use causal_forge::{Assignment, CausalModel, Domain, Input, Intervention, ReinforcementExplanation, ValueOrdering};

fn profile() -> impl Strategy<Value = DomainProfile> {
    prop_oneof![
        Just(DomainProfile::Binary),
        (1usize..=4).prop_map(DomainProfile::Chain),
        (1usize..=5).prop_map(DomainProfile::RandomPoset),
    ]
}

fn equations() -> impl Strategy<Value = EquationProfile> {
    prop_oneof![Just(EquationProfile::Expression), Just(EquationProfile::RandomTable)]
}

prop_compose! {
    fn model()(seed in any::<u64>(), index in 0usize..64, max_vars in 1usize..=7,
               max_parents in 1usize..=3, domain_profile in profile(), equation_profile in equations())
        -> CausalModel {
        let p = GeneratorParams { seed, max_vars, max_parents, domain_profile, equation_profile, ..Default::default() };
        generate_model_at(&p, index)
    }
}

/// An input and intervention list drawn from the model's own domains.
fn scenario(m: &CausalModel, picks: &[usize], do_mask: u8) -> (Input, Vec<Intervention>) {
    let mut k = 0;
    let mut pick = |d: &Domain| {
        let v = d.value(picks[k % picks.len()] % d.len()).to_string();
        k += 1;
        v
    };
    let input = Input::new(
        m.exogenous()
            .map(|v| (v.name.clone(), pick(m.domain(&v.domain).unwrap())))
            .collect::<Vec<_>>(),
    );
    let ivs = m
        .variables()
        .iter()
        .enumerate()
        .filter(|(i, _)| do_mask & (1 << (i % 8)) != 0 && i % 3 == 0)
        .map(|(_, v)| Intervention::new(v.name.clone(), pick(m.domain(&v.domain).unwrap())))
        .collect();
    (input, ivs)
}

fn synthetic(n: usize, attacks: &[(usize, usize)], supports: &[(usize, usize)]) -> ReinforcementExplanation {
    let name = |i: usize| format!("a{i}");
    let e = |l: &[(usize, usize)]| l.iter().map(|&(a, b)| (name(a % n), name(b % n))).collect();
    ReinforcementExplanation {
        arguments: (0..n).map(name).collect(),
        attacks: e(attacks),
        supports: e(supports),
        context: RxContext {
            input: Input::default(),
            interventions: vec![],
            values: Assignment::default(),
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn serialize_then_parse_is_identity(m in model()) {
        let text = serialize_model(&m);
        let back = parse_model(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(serialize_model(&back), text);
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), index in 0usize..100) {
        let p = GeneratorParams { seed, ..Default::default() };
        prop_assert_eq!(generate_model_at(&p, index), generate_model_at(&p, index));
    }

    #[test]
    fn evaluators_agree(m in model(), picks in prop::collection::vec(0usize..8, 1..16), mask in any::<u8>()) {
        let (input, ivs) = scenario(&m, &picks, mask);
        prop_assert_eq!(naive_evaluate(&m, &input, &ivs), m.evaluate(&input, &ivs));
    }

    #[test]
    fn interventions_pin_values(m in model(), picks in prop::collection::vec(0usize..8, 1..16), mask in any::<u8>()) {
        let (input, ivs) = scenario(&m, &picks, mask);
        let a = m.evaluate(&input, &ivs).unwrap();
        for iv in &ivs {
            prop_assert_eq!(a.get(&iv.variable), Some(iv.value.as_str()));
        }
        // applying the same interventions twice changes nothing
        let twice: Vec<Intervention> = ivs.iter().chain(&ivs).cloned().collect();
        prop_assert_eq!(m.evaluate(&input, &twice).unwrap(), a);
    }

    #[test]
    fn rx_structural_invariants(m in model(), picks in prop::collection::vec(0usize..8, 1..16), mask in any::<u8>()) {
        let (input, ivs) = scenario(&m, &picks, mask);
        let rx = extract_rx(&m, &input, &ivs, &ArgumentPolicy::All).unwrap();
        let again = extract_rx(&m, &input, &ivs, &ArgumentPolicy::All).unwrap();
        prop_assert_eq!(&rx, &again);
        prop_assert!(rx.attacks.is_disjoint(&rx.supports));
        let g = influence_graph(&m);
        for (a, b) in rx.attacks.iter().chain(&rx.supports) {
            prop_assert!(g.contains(a, b));
        }
        let involved = extract_rx(&m, &input, &ivs, &ArgumentPolicy::Involved).unwrap();
        prop_assert_eq!(&involved.attacks, &rx.attacks);
        prop_assert_eq!(&involved.supports, &rx.supports);
        prop_assert!(involved.arguments.is_subset(&rx.arguments));
    }

    #[test]
    fn explanations_are_local(m in model()) {
        let inputs: Vec<Input> = m.enumerate_inputs().take(32).collect();
        let first: Vec<_> = inputs
            .iter()
            .map(|u| format!("{:?}", extract_rx(&m, u, &[], &ArgumentPolicy::All).unwrap()))
            .collect();
        // recomputing in reverse order gives byte-identical explanations
        for (u, cached) in inputs.iter().zip(&first).rev() {
            let now = format!("{:?}", extract_rx(&m, u, &[], &ArgumentPolicy::All).unwrap());
            prop_assert_eq!(&now, cached);
        }
    }

    #[test]
    fn coherence_checks_agree_on_arbitrary_graphs(
        n in 1usize..=6,
        attacks in prop::collection::vec((0usize..6, 0usize..6), 0..6),
        supports in prop::collection::vec((0usize..6, 0usize..6), 0..8),
        mask in any::<u8>(),
    ) {
        let rx = synthetic(n, &attacks, &supports);
        let subset: BTreeSet<String> = rx
            .arguments
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect();
        let internal = check_internal_coherence(&rx, &subset).unwrap();
        prop_assert_eq!(internal.is_none(), brute_force_internal_coherence(&rx, &subset));
        let external = check_external_coherence(&rx, &subset).unwrap();
        prop_assert_eq!(external.is_none(), brute_force_external_coherence(&rx, &subset));
        // witnesses are real paths of the right shape
        if let Some(path) = internal {
            let p = &path.0;
            prop_assert!(subset.contains(&p[0]) && subset.contains(p.last().unwrap()));
            let pairs: Vec<(String, String)> = p.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
            let n = pairs.len();
            let ends_attack = pairs[..n - 1].iter().all(|e| rx.supports.contains(e)) && rx.attacks.contains(&pairs[n - 1]);
            let starts_attack = rx.attacks.contains(&pairs[0]) && pairs[1..].iter().all(|e| rx.supports.contains(e));
            prop_assert!(ends_attack || starts_attack);
        }
        if let Some(w) = external {
            prop_assert!(subset.contains(&w.x) && subset.contains(&w.y));
            prop_assert_eq!(w.support_path.0.first(), Some(&w.x));
            prop_assert_eq!(w.support_path.0.last(), Some(&w.z));
            for pair in w.support_path.0.windows(2) {
                prop_assert!(rx.supports.contains(&(pair[0].clone(), pair[1].clone())));
            }
            prop_assert_eq!(w.attack_path.0.first(), Some(&w.y));
            prop_assert_eq!(w.attack_path.0.last(), Some(&w.z));
        }
    }

    #[test]
    fn poset_comparisons_are_consistent(k in 1usize..=6, seed in any::<u64>()) {
        let p = GeneratorParams { seed, max_vars: 1, domain_profile: DomainProfile::RandomPoset(k), ..Default::default() };
        let m = generate_model_at(&p, 0);
        let d = &m.domains()[0];
        for a in d.values() {
            prop_assert_eq!(d.compare(a, a).unwrap(), ValueOrdering::Equal);
            let alts = d.ordered_alternatives(a).unwrap();
            for b in &alts.above {
                prop_assert_eq!(d.compare(a, b).unwrap(), ValueOrdering::Less);
                prop_assert_eq!(d.compare(b, a).unwrap(), ValueOrdering::Greater);
            }
            for b in &alts.below {
                prop_assert_eq!(d.compare(b, a).unwrap(), ValueOrdering::Less);
            }
        }
    }

    #[test]
    fn input_text_round_trips(values in prop::collection::btree_map("[A-Z][a-z0-9]{0,4}", "[a-z0-9]{1,4}", 0..6)) {
        let input = Input::new(values.clone());
        prop_assert_eq!(Input::parse(&input.to_string()).unwrap(), input);
    }
}

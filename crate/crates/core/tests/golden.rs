use std::collections::BTreeSet;

use causal_forge::dsl::parse_model;
use causal_forge::explain::{
    characterise_reinforcement, extract_rx, forge_explanation, influence_graph, ArgumentPolicy,
    ExplanationMould,
};
use causal_forge::export::{export_dot, ExplanationDocument};
use causal_forge::fuzz::naive_evaluate;
use causal_forge::verify::{accepted_arguments, verify_properties, Property, Status};
use causal_forge::{CausalModel, Edge, Input, Intervention, Relation};

const PIZZA: &str = include_str!("../../../models/pizza.cm");

fn pizza() -> CausalModel {
    parse_model(PIZZA).unwrap()
}

fn input(s: &str) -> Input {
    Input::parse(s).unwrap()
}

fn edges(list: &[(&str, &str)]) -> BTreeSet<Edge> {
    list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn truth_table() {
    // (U1, U2) -> (V1, V2)
    let expected = [
        ("0", "0", "0", "0"),
        ("0", "1", "0", "0"),
        ("1", "0", "1", "1"),
        ("1", "1", "0", "0"),
    ];
    let m = pizza();
    for (u1, u2, v1, v2) in expected {
        let a = m.evaluate(&input(&format!("U1={u1},U2={u2}")), &[]).unwrap();
        assert_eq!(
            (a.get("U1"), a.get("U2"), a.get("V1"), a.get("V2")),
            (Some(u1), Some(u2), Some(v1), Some(v2))
        );
    }
}

#[test]
fn do_v1_at_u11() {
    let a = pizza()
        .evaluate(&input("U1=1,U2=1"), &[Intervention::new("V1", "1")])
        .unwrap();
    assert_eq!(a.get("V1"), Some("1"));
    assert_eq!(a.get("V2"), Some("1"));
}

#[test]
fn influences() {
    let g = influence_graph(&pizza());
    assert_eq!(g.influences, edges(&[("U1", "V1"), ("U2", "V1"), ("V1", "V2")]));

    let single = parse_model("domain Bool { values 0 < 1 }\nexo U : Bool\nendo X : Bool = U").unwrap();
    assert_eq!(influence_graph(&single).influences, edges(&[("U", "X")]));

    let roots = parse_model("domain Bool { values 0 < 1 }\nexo A : Bool\nexo B : Bool").unwrap();
    assert!(influence_graph(&roots).influences.is_empty());
}

#[test]
fn reinforcement_classification() {
    let m = pizza();
    let c = |u: &str, e| characterise_reinforcement(&m, &input(u), &[], e).unwrap();
    assert_eq!(c("U1=1,U2=0", ("U2", "V1")), Relation::Attack);
    assert_eq!(c("U1=1,U2=0", ("U1", "V1")), Relation::Support);
    assert_eq!(c("U1=1,U2=0", ("V1", "V2")), Relation::Support);
    assert_eq!(c("U1=1,U2=1", ("U1", "V1")), Relation::None);
}

#[test]
fn reference_rx() {
    let rx = extract_rx(&pizza(), &input("U1=1,U2=0"), &[], &ArgumentPolicy::All).unwrap();
    assert_eq!(rx.arguments.len(), 4);
    assert_eq!(rx.attacks, edges(&[("U2", "V1")]));
    assert_eq!(rx.supports, edges(&[("U1", "V1"), ("V1", "V2")]));
}

#[test]
fn involved_policy_drops_u1() {
    let rx = extract_rx(&pizza(), &input("U1=1,U2=1"), &[], &ArgumentPolicy::Involved).unwrap();
    let expect: BTreeSet<String> = ["U2", "V1", "V2"].iter().map(|s| s.to_string()).collect();
    assert_eq!(rx.arguments, expect);
    assert_eq!(rx.attacks, edges(&[("U2", "V1")]));
    assert_eq!(rx.supports, edges(&[("V1", "V2")]));
}

#[test]
fn generic_forge_matches_rx() {
    let m = pizza();
    let u = input("U1=1,U2=0");
    let af = forge_explanation(&m, &u, &[], &ExplanationMould::reinforcement(), &ArgumentPolicy::All).unwrap();
    let rx = extract_rx(&m, &u, &[], &ArgumentPolicy::All).unwrap();
    assert_eq!(af.relations["attack"], rx.attacks);
    assert_eq!(af.relations["support"], rx.supports);
    assert_eq!(af.arguments, rx.arguments);
}

#[test]
fn accepted_sets() {
    let m = pizza();
    let rx = extract_rx(&m, &input("U1=1,U2=0"), &[], &ArgumentPolicy::All).unwrap();
    let acc: Vec<String> = accepted_arguments(&m, &rx).unwrap().into_iter().collect();
    assert_eq!(acc, ["U1", "V1", "V2"]);
}

#[test]
fn verification_examples() {
    let m = pizza();
    for u in ["U1=1,U2=0", "U1=1,U2=1"] {
        let rx = extract_rx(&m, &input(u), &[], &ArgumentPolicy::All).unwrap();
        let report = verify_properties(&m, &input(u), &rx).unwrap();
        assert!(report.entries.iter().all(|e| e.status == Status::Pass), "{u}\n{report}");
    }
    // (dis)agreement at (1,1): U2=1 attacks V1=0, V1=0 supports V2=0
    let rx = extract_rx(&m, &input("U1=1,U2=1"), &[], &ArgumentPolicy::All).unwrap();
    assert_eq!(rx.value("U2"), Some("1"));
    assert_eq!(rx.value("V1"), Some("0"));
    assert_eq!(rx.value("V2"), Some("0"));
}

#[test]
fn gradual_model_gating() {
    let m = parse_model(include_str!("../../../models/thermostat.cm")).unwrap();
    for u in m.enumerate_inputs() {
        let rx = extract_rx(&m, &u, &[], &ArgumentPolicy::All).unwrap();
        let r = verify_properties(&m, &u, &rx).unwrap();
        assert!(r.passed(), "{u}\n{r}");
        for p in Property::ALL {
            let e = r.get(p).unwrap();
            assert_eq!(e.applicable, !p.binary_only());
        }
    }
}

#[test]
fn naive_oracle_on_pizza() {
    let m = pizza();
    for u in m.enumerate_inputs() {
        assert_eq!(naive_evaluate(&m, &u, &[]), m.evaluate(&u, &[]));
        for v in ["V1", "V2"] {
            for val in ["0", "1"] {
                let iv = [Intervention::new(v, val)];
                assert_eq!(naive_evaluate(&m, &u, &iv), m.evaluate(&u, &iv));
            }
        }
    }
}

#[test]
fn dot_and_json_are_stable() {
    let m = pizza();
    let u = input("U1=1,U2=0");
    let rx = extract_rx(&m, &u, &[], &ArgumentPolicy::All).unwrap();
    let dot = export_dot(&rx);
    assert_eq!(dot.matches("[label=").count(), 4);
    assert_eq!(dot.matches("[style=attack]").count(), 1);
    assert_eq!(dot.matches("[style=support]").count(), 2);
    let report = verify_properties(&m, &u, &rx).unwrap();
    let doc = ExplanationDocument::new("pizza", &m, &rx, &ArgumentPolicy::All, report.clone());
    let again = ExplanationDocument::new("pizza", &m, &rx, &ArgumentPolicy::All, report);
    assert_eq!(doc.to_json(), again.to_json());
    let names: BTreeSet<&str> = doc.arguments.iter().map(|a| a.name.as_str()).collect();
    for [a, b] in doc.attacks.iter().chain(&doc.supports) {
        assert!(names.contains(a.as_str()) && names.contains(b.as_str()));
    }
}

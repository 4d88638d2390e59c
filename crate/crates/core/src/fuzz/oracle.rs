//! Slow, independent reference implementations used to cross-check the engine.

use std::collections::{BTreeMap, BTreeSet};

use crate::{
    Assignment, CausalModel, CmpOp, Domain, Expr, Input, Intervention, ModelError,
    ReinforcementExplanation, ValueOrdering, VariableKind,
};

struct Naive<'a> {
    model: &'a CausalModel,
    input: &'a Input,
    overrides: BTreeMap<&'a str, &'a str>,
}

/// A value token plus the domain it came from, when known.
struct Val<'a> {
    token: String,
    domain: Option<&'a Domain>,
}

impl<'a> Naive<'a> {
    /// Value of `var`, recomputed from scratch on every call.
    fn value(&self, var: &str) -> String {
        if let Some(v) = self.overrides.get(var) {
            return v.to_string();
        }
        let decl = self.model.variable(var).expect("validated model");
        match decl.kind {
            VariableKind::Exogenous => self.input.get(var).expect("checked input").to_string(),
            VariableKind::Endogenous => {
                let body = self.model.equation(var).expect("endogenous");
                self.eval(body, self.model.domain_of(var)).token
            }
        }
    }

    fn truth(&self, e: &Expr) -> bool {
        self.eval(e, None).token == "1"
    }

    fn boolean(b: bool) -> Val<'a> {
        Val {
            token: if b { "1" } else { "0" }.to_string(),
            domain: None,
        }
    }

    /// The domain containing both tokens, if exactly one non-binary one does.
    fn shared_domain(&self, a: &str, b: &str) -> Option<&'a Domain> {
        self.model
            .domains()
            .iter()
            .find(|d| d.contains(a) && d.contains(b))
    }

    fn eval(&self, e: &Expr, expected: Option<&'a Domain>) -> Val<'a> {
        match e {
            Expr::Var(v) => Val {
                token: self.value(v),
                domain: self.model.domain_of(v),
            },
            Expr::Lit(t) => Val {
                token: t.clone(),
                domain: expected,
            },
            Expr::Not(a) => Self::boolean(!self.truth(a)),
            Expr::And(a, b) => Self::boolean(self.truth(a) && self.truth(b)),
            Expr::Or(a, b) => Self::boolean(self.truth(a) || self.truth(b)),
            Expr::Ite(c, a, b) => {
                if self.truth(c) {
                    self.eval(a, expected)
                } else {
                    self.eval(b, expected)
                }
            }
            Expr::Cmp(op, a, b) => {
                let x = self.eval(a, None);
                let y = self.eval(b, None);
                let dom = x
                    .domain
                    .or(y.domain)
                    .or_else(|| self.shared_domain(&x.token, &y.token));
                let ord = match dom {
                    Some(d) if !d.is_binary() => d.compare(&x.token, &y.token).expect("typed"),
                    // booleans and binary domains share the order 0 < 1
                    _ => match (x.token == "1", y.token == "1") {
                        (p, q) if p == q => ValueOrdering::Equal,
                        (false, true) => ValueOrdering::Less,
                        _ => ValueOrdering::Greater,
                    },
                };
                Self::boolean(match op {
                    CmpOp::Eq => ord == ValueOrdering::Equal,
                    CmpOp::Ne => ord != ValueOrdering::Equal,
                    CmpOp::Lt => ord == ValueOrdering::Less,
                    CmpOp::Le => matches!(ord, ValueOrdering::Less | ValueOrdering::Equal),
                    CmpOp::Gt => ord == ValueOrdering::Greater,
                    CmpOp::Ge => matches!(ord, ValueOrdering::Greater | ValueOrdering::Equal),
                })
            }
            Expr::Min(args) | Expr::Max(args) => {
                let vals: Vec<Val> = args.iter().map(|a| self.eval(a, expected)).collect();
                let dom = expected
                    .or_else(|| vals.iter().find_map(|v| v.domain))
                    .or_else(|| self.shared_domain(&vals[0].token, &vals[0].token))
                    .expect("typed");
                let want = if matches!(e, Expr::Min(_)) {
                    ValueOrdering::Less
                } else {
                    ValueOrdering::Greater
                };
                let mut best = vals[0].token.clone();
                for v in &vals[1..] {
                    if dom.compare(&v.token, &best).expect("typed") == want {
                        best = v.token.clone();
                    }
                }
                Val {
                    token: best,
                    domain: Some(dom),
                }
            }
            Expr::Table(t) => {
                let key: Vec<String> = t.args.iter().map(|a| self.value(a)).collect();
                let out = t
                    .rows
                    .iter()
                    .find(|(k, _)| *k == key)
                    .map(|(_, o)| o.clone())
                    .expect("tables are total");
                Val {
                    token: out,
                    domain: expected,
                }
            }
        }
    }
}

/// Evaluates by direct recursion over the equations, without memoization or
/// a topological pass. Exponential in the worst case; meant for small models.
pub fn naive_evaluate(
    model: &CausalModel,
    input: &Input,
    interventions: &[Intervention],
) -> Result<Assignment, ModelError> {
    // Reuse only the argument checks.
    model.scenario(input, interventions)?;
    let naive = Naive {
        model,
        input,
        overrides: interventions
            .iter()
            .map(|i| (i.variable.as_str(), i.value.as_str()))
            .collect(),
    };
    Ok(model
        .variables()
        .iter()
        .map(|v| (v.name.clone(), naive.value(&v.name)))
        .collect())
}

type Pairs = BTreeSet<(String, String)>;

struct Walker<'r> {
    rx: &'r ReinforcementExplanation,
    limit: usize,
    support_pairs: Pairs,
    attack_pairs: Pairs,
}

impl<'r> Walker<'r> {
    fn is_sup(&self, a: &str, b: &str) -> bool {
        self.rx.supports.contains(&(a.to_string(), b.to_string()))
    }

    fn is_att(&self, a: &str, b: &str) -> bool {
        self.rx.attacks.contains(&(a.to_string(), b.to_string()))
    }

    // Walks that are all supports, or an attack followed by supports, can be extended;
    // a walk ending in an attack after a support prefix cannot.
    fn walk(&mut self, path: &mut Vec<&'r str>, first_attack: bool) {
        let start = path[0];
        let last = *path.last().expect("non-empty");
        if first_attack {
            self.attack_pairs.insert((start.to_string(), last.to_string()));
        } else {
            self.support_pairs.insert((start.to_string(), last.to_string()));
        }
        if path.len() > self.limit {
            return;
        }
        let rx = self.rx;
        for next in rx.arguments.iter().map(String::as_str) {
            if self.is_att(last, next) {
                if path.len() == 1 {
                    path.push(next);
                    self.walk(path, true);
                    path.pop();
                } else if !first_attack {
                    self.attack_pairs.insert((start.to_string(), next.to_string()));
                }
            }
            if self.is_sup(last, next) {
                path.push(next);
                self.walk(path, first_attack);
                path.pop();
            }
        }
    }
}

/// Pairs `(from, to)` joined by a pure-support walk, including `(a, a)`, and
/// pairs joined by an attack-shaped walk, found by enumerating walks.
fn enumerate_walks(rx: &ReinforcementExplanation) -> (Pairs, Pairs) {
    let mut w = Walker {
        rx,
        limit: rx.arguments.len(),
        support_pairs: Pairs::new(),
        attack_pairs: Pairs::new(),
    };
    for a in &rx.arguments {
        w.walk(&mut vec![a.as_str()], false);
    }
    (w.support_pairs, w.attack_pairs)
}

/// Internal coherence of `subset` by exhaustive walk enumeration.
pub fn brute_force_internal_coherence(rx: &ReinforcementExplanation, subset: &BTreeSet<String>) -> bool {
    let (_, attack) = enumerate_walks(rx);
    !attack
        .iter()
        .any(|(x, y)| subset.contains(x) && subset.contains(y))
}

/// External coherence of `subset` by exhaustive walk enumeration.
pub fn brute_force_external_coherence(rx: &ReinforcementExplanation, subset: &BTreeSet<String>) -> bool {
    let (support, attack) = enumerate_walks(rx);
    for (x, z) in &support {
        if !subset.contains(x) {
            continue;
        }
        for y in subset {
            if attack.contains(&(y.clone(), z.clone())) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::RxContext;
    use crate::model::tests::pizza_spec;

    fn synthetic(args: &[&str], attacks: &[(&str, &str)], supports: &[(&str, &str)]) -> ReinforcementExplanation {
        let e = |l: &[(&str, &str)]| l.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        ReinforcementExplanation {
            arguments: args.iter().map(|s| s.to_string()).collect(),
            attacks: e(attacks),
            supports: e(supports),
            context: RxContext {
                input: Input::default(),
                interventions: vec![],
                values: Assignment::default(),
            },
        }
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn naive_matches_pizza_under_interventions() {
        let m = CausalModel::new(&pizza_spec()).unwrap();
        for input in m.enumerate_inputs().collect::<Vec<_>>() {
            assert_eq!(naive_evaluate(&m, &input, &[]), m.evaluate(&input, &[]));
            for v in ["V1", "V2"] {
                for val in ["0", "1"] {
                    let iv = [Intervention::new(v, val)];
                    assert_eq!(naive_evaluate(&m, &input, &iv), m.evaluate(&input, &iv));
                }
            }
        }
    }

    #[test]
    fn naive_reports_the_same_errors() {
        let m = CausalModel::new(&pizza_spec()).unwrap();
        let bad = Input::parse("U1=1").unwrap();
        assert_eq!(naive_evaluate(&m, &bad, &[]), m.evaluate(&bad, &[]));
    }

    #[test]
    fn walk_shapes() {
        let rx = synthetic(&["a", "b", "c"], &[("b", "c")], &[("a", "b")]);
        assert!(!brute_force_internal_coherence(&rx, &set(&["a", "c"])));
        assert!(brute_force_internal_coherence(&rx, &set(&["a", "b"])));
        let rx = synthetic(&["a", "b", "c", "d"], &[("b", "c")], &[("a", "b"), ("c", "d")]);
        assert!(brute_force_internal_coherence(&rx, &set(&["a", "d"])));
        let rx = synthetic(&["a", "b", "z"], &[("b", "z")], &[("a", "z")]);
        assert!(!brute_force_external_coherence(&rx, &set(&["a", "b"])));
        assert!(brute_force_external_coherence(&rx, &set(&["a"])));
    }
}

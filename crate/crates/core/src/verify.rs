//! Property checks for reinforcement explanations.
//!
//! Every check here works through the public evaluation API rather than the
//! engine's internal encoding, so a bug in the engine cannot hide itself.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::explain::{extract_rx, influence_graph, ArgumentPolicy};
use crate::{CausalModel, Edge, Input, Intervention, ModelError, ReinforcementExplanation, ValueOrdering};

/// A sequence of arguments, consecutive pairs joined by some relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(pub Vec<String>);

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" -> "))
    }
}

/// Arguments set to `1` in a binary model.
pub fn accepted_arguments(
    model: &CausalModel,
    rx: &ReinforcementExplanation,
) -> Result<BTreeSet<String>, ModelError> {
    if !model.is_binary() {
        return Err(ModelError::NotBinary);
    }
    Ok(rx
        .arguments
        .iter()
        .filter(|a| rx.value(a) == Some("1"))
        .cloned()
        .collect())
}

/// Relations of an explanation indexed by argument position.
struct Graph<'a> {
    args: Vec<&'a str>,
    supports: Vec<Vec<usize>>,
    attacks: Vec<Vec<usize>>,
}

impl<'a> Graph<'a> {
    fn new(rx: &'a ReinforcementExplanation) -> Self {
        let args: Vec<&str> = rx.arguments.iter().map(String::as_str).collect();
        let pos = |s: &str| args.binary_search(&s).ok();
        let adj = |rel: &BTreeSet<Edge>| {
            let mut out = vec![Vec::new(); args.len()];
            for (a, b) in rel {
                if let (Some(i), Some(j)) = (pos(a), pos(b)) {
                    out[i].push(j);
                }
            }
            out
        };
        let supports = adj(&rx.supports);
        let attacks = adj(&rx.attacks);
        Graph {
            args,
            supports,
            attacks,
        }
    }

    fn index(&self, s: &str) -> Option<usize> {
        self.args.binary_search(&s).ok()
    }

    /// BFS over supports; `prev[j]` is set for every reached `j`, `from` included.
    fn support_tree(&self, from: usize) -> Vec<Option<usize>> {
        let mut prev = vec![None; self.args.len()];
        prev[from] = Some(from);
        let mut queue = VecDeque::from([from]);
        while let Some(i) = queue.pop_front() {
            for &j in &self.supports[i] {
                if prev[j].is_none() {
                    prev[j] = Some(i);
                    queue.push_back(j);
                }
            }
        }
        prev
    }

    fn unwind(prev: &[Option<usize>], to: usize) -> Vec<usize> {
        let mut path = vec![to];
        let mut cur = to;
        while let Some(p) = prev[cur] {
            if p == cur {
                break;
            }
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// For every target, one attack-shaped path from `from` if any exists:
    /// supports then a final attack, or an initial attack then supports.
    fn attack_paths(&self, from: usize) -> Vec<Option<Vec<usize>>> {
        let mut out: Vec<Option<Vec<usize>>> = vec![None; self.args.len()];
        let tree = self.support_tree(from);
        for w in 0..self.args.len() {
            if tree[w].is_none() {
                continue;
            }
            for &t in &self.attacks[w] {
                if out[t].is_none() {
                    let mut p = Self::unwind(&tree, w);
                    p.push(t);
                    out[t] = Some(p);
                }
            }
        }
        for &first in &self.attacks[from] {
            let tree = self.support_tree(first);
            for t in 0..self.args.len() {
                if out[t].is_none() && tree[t].is_some() {
                    let mut p = vec![from];
                    p.extend(Self::unwind(&tree, t));
                    out[t] = Some(p);
                }
            }
        }
        out
    }

    fn path(&self, idx: &[usize]) -> Path {
        Path(idx.iter().map(|&i| self.args[i].to_string()).collect())
    }

    fn subset(&self, subset: &BTreeSet<String>) -> Result<Vec<usize>, ModelError> {
        subset
            .iter()
            .map(|s| {
                self.index(s)
                    .ok_or_else(|| ModelError::Mismatch(format!("`{s}` is not an argument")))
            })
            .collect()
    }
}

/// Arguments `x`, `y`, `z` with `x` supporting its way to `z` and `y`
/// reaching `z` through an attack-shaped path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalWitness {
    pub x: String,
    pub y: String,
    pub z: String,
    pub support_path: Path,
    pub attack_path: Path,
}

/// Finds an attack-shaped path between two members of `subset`.
///
/// Returns `None` when the subset is internally coherent.
pub fn check_internal_coherence(
    rx: &ReinforcementExplanation,
    subset: &BTreeSet<String>,
) -> Result<Option<Path>, ModelError> {
    let g = Graph::new(rx);
    let members = g.subset(subset)?;
    for &x in &members {
        let paths = g.attack_paths(x);
        for &y in &members {
            if let Some(p) = &paths[y] {
                return Ok(Some(g.path(p)));
            }
        }
    }
    Ok(None)
}

/// Finds a mediated conflict between two members of `subset`.
///
/// Returns `None` when the subset is externally coherent.
pub fn check_external_coherence(
    rx: &ReinforcementExplanation,
    subset: &BTreeSet<String>,
) -> Result<Option<ExternalWitness>, ModelError> {
    let g = Graph::new(rx);
    let members = g.subset(subset)?;
    let attack_paths: Vec<_> = members.iter().map(|&y| g.attack_paths(y)).collect();
    for &x in &members {
        let tree = g.support_tree(x);
        for (yi, &y) in members.iter().enumerate() {
            for z in 0..g.args.len() {
                if let (Some(_), Some(ap)) = (tree[z], &attack_paths[yi][z]) {
                    return Ok(Some(ExternalWitness {
                        x: g.args[x].to_string(),
                        y: g.args[y].to_string(),
                        z: g.args[z].to_string(),
                        support_path: g.path(&Graph::unwind(&tree, z)),
                        attack_path: g.path(ap),
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    Uniqueness,
    Acyclicity,
    Unambiguity,
    Relevance,
    Counterfactuality,
    DisAgreement,
    Coherence,
    BipolarReinforcement,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::Uniqueness,
        Property::Acyclicity,
        Property::Unambiguity,
        Property::Relevance,
        Property::Counterfactuality,
        Property::DisAgreement,
        Property::Coherence,
        Property::BipolarReinforcement,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Uniqueness => "uniqueness",
            Property::Acyclicity => "acyclicity",
            Property::Unambiguity => "unambiguity",
            Property::Relevance => "relevance",
            Property::Counterfactuality => "counterfactuality",
            Property::DisAgreement => "dis-agreement",
            Property::Coherence => "coherence",
            Property::BipolarReinforcement => "bipolar-reinforcement",
        }
    }

    /// Whether the property is only claimed for binary models.
    pub fn binary_only(self) -> bool {
        matches!(
            self,
            Property::Counterfactuality | Property::DisAgreement | Property::Coherence
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evidence that a property fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Relations obtained by forging again over the same arguments.
    Reforged {
        attacks: Vec<Edge>,
        supports: Vec<Edge>,
    },
    Cycle {
        path: Path,
    },
    Edge {
        from: String,
        to: String,
    },
    /// Setting `from` to `parent_value` leaves `to` at `child_value`.
    Alternative {
        from: String,
        to: String,
        parent_value: String,
        child_value: String,
    },
    Values {
        from: String,
        to: String,
        from_value: String,
        to_value: String,
    },
    Internal {
        path: Path,
    },
    External(ExternalWitness),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = |es: &[Edge]| {
            es.iter()
                .map(|(a, b)| format!("{a}->{b}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Witness::Reforged { attacks, supports } => write!(
                f,
                "forging again gives attacks [{}] supports [{}]",
                edges(attacks),
                edges(supports)
            ),
            Witness::Cycle { path } => write!(f, "cycle {path}"),
            Witness::Edge { from, to } => write!(f, "edge {from} -> {to}"),
            Witness::Alternative {
                from,
                to,
                parent_value,
                child_value,
            } => write!(f, "set({from}={parent_value}) gives {to}={child_value}"),
            Witness::Values {
                from,
                to,
                from_value,
                to_value,
            } => write!(f, "{from}={from_value}, {to}={to_value}"),
            Witness::Internal { path } => write!(f, "internal path {path}"),
            Witness::External(w) => write!(
                f,
                "{} supports {} via {}; {} reaches it via {}",
                w.x, w.z, w.support_path, w.y, w.attack_path
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyVerdict {
    pub property: Property,
    pub applicable: bool,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl PropertyVerdict {
    fn from_check(property: Property, witness: Option<Witness>) -> Self {
        PropertyVerdict {
            property,
            applicable: true,
            status: if witness.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            witness,
        }
    }

    fn not_applicable(property: Property) -> Self {
        PropertyVerdict {
            property,
            applicable: false,
            status: Status::NotApplicable,
            witness: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Verdicts for every property, in a fixed order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PropertyReport {
    pub entries: Vec<PropertyVerdict>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| !e.failed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyVerdict> {
        self.entries.iter().filter(|e| e.failed())
    }

    pub fn get(&self, p: Property) -> Option<&PropertyVerdict> {
        self.entries.iter().find(|e| e.property == p)
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            let tag = match e.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::NotApplicable => "N/A ",
            };
            write!(f, "{tag}  {}", e.property)?;
            if let Some(w) = &e.witness {
                write!(f, ": {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// The scenario of an explanation, with `set(var = value)` layered on top.
fn with_set(base: &[Intervention], var: &str, value: &str) -> Vec<Intervention> {
    let mut out: Vec<Intervention> = base.iter().filter(|i| i.variable != var).cloned().collect();
    out.push(Intervention::new(var, value));
    out
}

struct Checker<'a> {
    model: &'a CausalModel,
    input: &'a Input,
    rx: &'a ReinforcementExplanation,
}

impl Checker<'_> {
    fn value(&self, v: &str) -> &str {
        self.rx.value(v).expect("checked against the model")
    }

    fn outcome(&self, parent: &str, value: &str, child: &str) -> Result<String, ModelError> {
        let iv = with_set(&self.rx.context.interventions, parent, value);
        let a = self.model.evaluate(self.input, &iv)?;
        Ok(a.get(child).expect("child is a variable").to_string())
    }

    fn relation_edges(&self) -> impl Iterator<Item = (bool, &Edge)> {
        self.rx
            .attacks
            .iter()
            .map(|e| (true, e))
            .chain(self.rx.supports.iter().map(|e| (false, e)))
    }

    fn uniqueness(&self) -> Result<Option<Witness>, ModelError> {
        let again = extract_rx(
            self.model,
            self.input,
            &self.rx.context.interventions,
            &ArgumentPolicy::Fixed(self.rx.arguments.clone()),
        )?;
        if again.attacks == self.rx.attacks && again.supports == self.rx.supports {
            return Ok(None);
        }
        Ok(Some(Witness::Reforged {
            attacks: again.attacks.into_iter().collect(),
            supports: again.supports.into_iter().collect(),
        }))
    }

    fn acyclicity(&self) -> Option<Witness> {
        let nodes: Vec<&str> = self
            .relation_edges()
            .flat_map(|(_, (a, b))| [a.as_str(), b.as_str()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let pos = |s: &str| nodes.binary_search(&s).expect("collected above");
        let mut adj = vec![Vec::new(); nodes.len()];
        for (_, (a, b)) in self.relation_edges() {
            adj[pos(a)].push(pos(b));
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut state = vec![0u8; nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        fn dfs(
            i: usize,
            adj: &[Vec<usize>],
            state: &mut [u8],
            stack: &mut Vec<usize>,
        ) -> Option<Vec<usize>> {
            state[i] = 1;
            stack.push(i);
            for &j in &adj[i] {
                if state[j] == 1 {
                    let start = stack.iter().position(|&k| k == j).expect("on stack");
                    let mut cyc = stack[start..].to_vec();
                    cyc.push(j);
                    return Some(cyc);
                }
                if state[j] == 0 {
                    if let Some(c) = dfs(j, adj, state, stack) {
                        return Some(c);
                    }
                }
            }
            stack.pop();
            state[i] = 2;
            None
        }
        for i in 0..nodes.len() {
            if state[i] == 0 {
                if let Some(c) = dfs(i, &adj, &mut state, &mut stack) {
                    return Some(Witness::Cycle {
                        path: Path(c.into_iter().map(|k| nodes[k].to_string()).collect()),
                    });
                }
            }
        }
        None
    }

    fn unambiguity(&self) -> Option<Witness> {
        self.rx
            .attacks
            .intersection(&self.rx.supports)
            .next()
            .map(|(a, b)| Witness::Edge {
                from: a.clone(),
                to: b.clone(),
            })
    }

    fn relevance(&self) -> Option<Witness> {
        let g = influence_graph(self.model);
        self.relation_edges()
            .map(|(_, e)| e)
            .find(|(a, b)| {
                !g.contains(a, b) || !self.rx.arguments.contains(a) || !self.rx.arguments.contains(b)
            })
            .map(|(a, b)| Witness::Edge {
                from: a.clone(),
                to: b.clone(),
            })
    }

    fn counterfactuality(&self) -> Result<Option<Witness>, ModelError> {
        for (_, (a, b)) in self.relation_edges() {
            let flipped = if self.value(a) == "1" { "0" } else { "1" };
            let out = self.outcome(a, flipped, b)?;
            if out == self.value(b) {
                return Ok(Some(Witness::Alternative {
                    from: a.clone(),
                    to: b.clone(),
                    parent_value: flipped.to_string(),
                    child_value: out,
                }));
            }
        }
        Ok(None)
    }

    fn dis_agreement(&self) -> Option<Witness> {
        self.relation_edges()
            .find(|(attack, (a, b))| (self.value(a) == self.value(b)) == *attack)
            .map(|(_, (a, b))| Witness::Values {
                from: a.clone(),
                to: b.clone(),
                from_value: self.value(a).to_string(),
                to_value: self.value(b).to_string(),
            })
    }

    fn coherence(&self) -> Result<Option<Witness>, ModelError> {
        let accepted = accepted_arguments(self.model, self.rx)?;
        if let Some(path) = check_internal_coherence(self.rx, &accepted)? {
            return Ok(Some(Witness::Internal { path }));
        }
        Ok(check_external_coherence(self.rx, &accepted)?.map(Witness::External))
    }

    fn bipolar_reinforcement(&self) -> Result<Option<Witness>, ModelError> {
        for (attack, (a, b)) in self.relation_edges() {
            let da = self.model.domain_of(a).expect("checked against the model");
            let db = self.model.domain_of(b).expect("checked against the model");
            let alts = da.ordered_alternatives(self.value(a))?;
            // Raising an attacker may not raise its target; lowering may not lower it.
            let (up_bad, down_bad) = if attack {
                (ValueOrdering::Greater, ValueOrdering::Less)
            } else {
                (ValueOrdering::Less, ValueOrdering::Greater)
            };
            for (alt, bad) in alts
                .above
                .iter()
                .map(|v| (v, up_bad))
                .chain(alts.below.iter().map(|v| (v, down_bad)))
            {
                let out = self.outcome(a, alt, b)?;
                let ord = db.compare(&out, self.value(b))?;
                if ord == bad || ord == ValueOrdering::Incomparable {
                    return Ok(Some(Witness::Alternative {
                        from: a.clone(),
                        to: b.clone(),
                        parent_value: alt.clone(),
                        child_value: out,
                    }));
                }
            }
        }
        Ok(None)
    }
}

fn check_matches(
    model: &CausalModel,
    input: &Input,
    rx: &ReinforcementExplanation,
) -> Result<(), ModelError> {
    if &rx.context.input != input {
        return Err(ModelError::Mismatch(format!(
            "explanation was forged for input {}, not {input}",
            rx.context.input
        )));
    }
    let names = rx
        .arguments
        .iter()
        .chain(rx.attacks.iter().chain(&rx.supports).flat_map(|(a, b)| [a, b]));
    for n in names {
        if model.variable(n).is_none() {
            return Err(ModelError::Mismatch(format!("`{n}` is not a variable of the model")));
        }
    }
    let values = model.evaluate(input, &rx.context.interventions)?;
    if values != rx.context.values {
        return Err(ModelError::Mismatch("recorded values differ from evaluation".into()));
    }
    Ok(())
}

/// Checks every property of `rx` against the model it was forged from.
///
/// Counterfactuality, (dis)agreement and coherence are only claimed for
/// binary models and are reported as not applicable otherwise.
pub fn verify_properties(
    model: &CausalModel,
    input: &Input,
    rx: &ReinforcementExplanation,
) -> Result<PropertyReport, ModelError> {
    check_matches(model, input, rx)?;
    let c = Checker { model, input, rx };
    let binary = model.is_binary();
    let mut entries = Vec::with_capacity(Property::ALL.len());
    for p in Property::ALL {
        if p.binary_only() && !binary {
            entries.push(PropertyVerdict::not_applicable(p));
            continue;
        }
        let witness = match p {
            Property::Uniqueness => c.uniqueness()?,
            Property::Acyclicity => c.acyclicity(),
            Property::Unambiguity => c.unambiguity(),
            Property::Relevance => c.relevance(),
            Property::Counterfactuality => c.counterfactuality()?,
            Property::DisAgreement => c.dis_agreement(),
            Property::Coherence => c.coherence()?,
            Property::BipolarReinforcement => c.bipolar_reinforcement()?,
        };
        entries.push(PropertyVerdict::from_check(p, witness));
    }
    Ok(PropertyReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::RxContext;
    use crate::model::tests::pizza_spec;
    use crate::Assignment;

    fn pizza() -> CausalModel {
        CausalModel::new(&pizza_spec()).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn edges(list: &[(&str, &str)]) -> BTreeSet<Edge> {
        list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn synthetic(args: &[&str], attacks: &[(&str, &str)], supports: &[(&str, &str)]) -> ReinforcementExplanation {
        ReinforcementExplanation {
            arguments: set(args),
            attacks: edges(attacks),
            supports: edges(supports),
            context: RxContext {
                input: Input::default(),
                interventions: vec![],
                values: Assignment::default(),
            },
        }
    }

    fn rx_for(m: &CausalModel, u: &str) -> (Input, ReinforcementExplanation) {
        let input = Input::parse(u).unwrap();
        let rx = extract_rx(m, &input, &[], &ArgumentPolicy::All).unwrap();
        (input, rx)
    }

    #[test]
    fn accepted_sets() {
        let m = pizza();
        let (_, rx) = rx_for(&m, "U1=1,U2=0");
        assert_eq!(accepted_arguments(&m, &rx).unwrap(), set(&["U1", "V1", "V2"]));
        let (_, rx) = rx_for(&m, "U1=0,U2=0");
        assert!(accepted_arguments(&m, &rx).unwrap().is_empty());
    }

    #[test]
    fn internal_coherence_shapes() {
        let rx = synthetic(&["a", "b", "c"], &[("b", "c")], &[("a", "b")]);
        let w = check_internal_coherence(&rx, &set(&["a", "c"])).unwrap();
        assert_eq!(w, Some(Path(vec!["a".into(), "b".into(), "c".into()])));
        // attack first, then support
        let rx = synthetic(&["a", "b", "c"], &[("a", "b")], &[("b", "c")]);
        assert!(check_internal_coherence(&rx, &set(&["a", "c"])).unwrap().is_some());
        // support after support after attack is still attack-shaped only at an end
        let rx = synthetic(&["a", "b", "c", "d"], &[("b", "c")], &[("a", "b"), ("c", "d")]);
        assert!(check_internal_coherence(&rx, &set(&["a", "d"])).unwrap().is_none());
        let rx = synthetic(&["a"], &[], &[]);
        assert!(check_internal_coherence(&rx, &set(&["a"])).unwrap().is_none());
    }

    #[test]
    fn external_coherence_shapes() {
        let rx = synthetic(&["a", "b", "z"], &[("b", "z")], &[("a", "z")]);
        let w = check_external_coherence(&rx, &set(&["a", "b"])).unwrap().unwrap();
        assert_eq!(w.z, "z");
        assert_eq!(w.x, "a");
        assert_eq!(w.y, "b");
        assert!(check_external_coherence(&rx, &BTreeSet::new()).unwrap().is_none());
        // x = z with zero support edges
        let rx = synthetic(&["a", "b"], &[("b", "a")], &[]);
        assert!(check_external_coherence(&rx, &set(&["a", "b"])).unwrap().is_some());
    }

    #[test]
    fn subset_must_be_arguments() {
        let rx = synthetic(&["a"], &[], &[]);
        assert!(matches!(
            check_internal_coherence(&rx, &set(&["q"])),
            Err(ModelError::Mismatch(_))
        ));
    }

    #[test]
    fn pizza_all_pass() {
        let m = pizza();
        for u in ["U1=1,U2=0", "U1=1,U2=1", "U1=0,U2=0", "U1=0,U2=1"] {
            let (input, rx) = rx_for(&m, u);
            let r = verify_properties(&m, &input, &rx).unwrap();
            assert_eq!(r.entries.len(), 8);
            assert!(r.passed(), "{u}:\n{r}");
            assert!(r.entries.iter().all(|e| e.applicable));
        }
    }

    #[test]
    fn gradual_models_skip_binary_properties() {
        let m = crate::dsl::parse_model(
            "domain L { values low < mid < high }
             exo A : L
             exo B : L
             endo C : L = max(A, B)",
        )
        .unwrap();
        let (input, rx) = rx_for(&m, "A=mid,B=low");
        // raising B to high lifts C past mid
        assert_eq!(rx.supports, edges(&[("A", "C"), ("B", "C")]));
        let r = verify_properties(&m, &input, &rx).unwrap();
        assert!(r.passed(), "{r}");
        let na: Vec<Property> = r.entries.iter().filter(|e| !e.applicable).map(|e| e.property).collect();
        assert_eq!(na, [Property::Counterfactuality, Property::DisAgreement, Property::Coherence]);
    }

    #[test]
    fn corrupted_explanations_fail_with_witnesses() {
        let m = pizza();
        let (input, mut rx) = rx_for(&m, "U1=1,U2=0");
        // Swap the attack into the supports.
        rx.attacks.clear();
        rx.supports.insert(("U2".into(), "V1".into()));
        let r = verify_properties(&m, &input, &rx).unwrap();
        let failed: Vec<Property> = r.failures().map(|e| e.property).collect();
        assert!(failed.contains(&Property::Uniqueness));
        assert!(failed.contains(&Property::DisAgreement));
        assert!(failed.contains(&Property::BipolarReinforcement));
        assert_eq!(
            r.get(Property::DisAgreement).unwrap().witness,
            Some(Witness::Values {
                from: "U2".into(),
                to: "V1".into(),
                from_value: "0".into(),
                to_value: "1".into()
            })
        );

        let (input, mut rx) = rx_for(&m, "U1=1,U2=0");
        rx.supports.insert(("U1".into(), "V2".into()));
        rx.attacks.insert(("U1".into(), "V1".into()));
        let r = verify_properties(&m, &input, &rx).unwrap();
        assert_eq!(
            r.get(Property::Relevance).unwrap().witness,
            Some(Witness::Edge { from: "U1".into(), to: "V2".into() })
        );
        assert_eq!(
            r.get(Property::Unambiguity).unwrap().witness,
            Some(Witness::Edge { from: "U1".into(), to: "V1".into() })
        );

        let (input, mut rx) = rx_for(&m, "U1=1,U2=0");
        rx.supports.insert(("V2".into(), "U1".into()));
        let r = verify_properties(&m, &input, &rx).unwrap();
        assert!(matches!(r.get(Property::Acyclicity).unwrap().witness, Some(Witness::Cycle { .. })));
    }

    #[test]
    fn mismatch_detected() {
        let m = pizza();
        let (_, rx) = rx_for(&m, "U1=1,U2=0");
        let other = Input::parse("U1=0,U2=0").unwrap();
        assert!(matches!(verify_properties(&m, &other, &rx), Err(ModelError::Mismatch(_))));
    }

    #[test]
    fn report_text() {
        let m = pizza();
        let (input, rx) = rx_for(&m, "U1=1,U2=1");
        let text = verify_properties(&m, &input, &rx).unwrap().to_string();
        assert_eq!(text.lines().count(), 8);
        assert!(text.lines().all(|l| l.starts_with("PASS")));
    }
}

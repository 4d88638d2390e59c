//! Influence graphs and argumentative explanations.
//!
//! An explanation mould is a list of relation characterisations, each a
//! boolean test over an influence edge in a fixed scenario. Forging applies
//! every characterisation to every influence, picks the argument set by
//! policy and restricts the relations to it. The reinforcement mould
//! classifies an edge as an attack or a support depending on how the child
//! responds when the parent alone is moved up or down its domain.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::Scenario;
use crate::{Assignment, CausalModel, Edge, Input, Intervention, ModelError, ValueOrdering};

/// Variables of a model and the parent-to-child edges between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfluenceGraph {
    pub nodes: BTreeSet<String>,
    pub influences: BTreeSet<Edge>,
}

impl InfluenceGraph {
    pub fn contains(&self, from: &str, to: &str) -> bool {
        self.influences
            .contains(&(from.to_string(), to.to_string()))
    }
}

pub fn influence_graph(model: &CausalModel) -> InfluenceGraph {
    let nodes = model.variables().iter().map(|v| v.name.clone()).collect();
    let influences = model
        .endogenous()
        .flat_map(|v| {
            model
                .parents(&v.name)
                .into_iter()
                .map(move |p| (p.to_string(), v.name.clone()))
        })
        .collect();
    InfluenceGraph { nodes, influences }
}

/// A model evaluated under one scenario, shared by all characterisations.
#[derive(Debug, Clone)]
pub struct ExplanationContext<'a> {
    model: &'a CausalModel,
    input: Input,
    interventions: Vec<Intervention>,
    scenario: Scenario,
    values: Vec<usize>,
}

impl<'a> ExplanationContext<'a> {
    pub fn new(
        model: &'a CausalModel,
        input: &Input,
        interventions: &[Intervention],
    ) -> Result<Self, ModelError> {
        let scenario = model.scenario(input, interventions)?;
        let values = model.evaluate_scenario(&scenario);
        Ok(ExplanationContext {
            model,
            input: input.clone(),
            interventions: interventions.to_vec(),
            scenario,
            values,
        })
    }

    pub fn model(&self) -> &'a CausalModel {
        self.model
    }

    pub fn input(&self) -> &Input {
        &self.input
    }

    pub fn interventions(&self) -> &[Intervention] {
        &self.interventions
    }

    pub fn assignment(&self) -> Assignment {
        self.model.assignment_from(&self.values)
    }

    /// Current value of `var`.
    pub fn value(&self, var: &str) -> Option<&str> {
        let i = self.model.var_index(var)?;
        Some(self.model.value_name(i, self.values[i]))
    }

    /// Value `child` takes when `parent` alone is set to `value`.
    pub fn outcome(&self, parent: &str, value: &str, child: &str) -> Result<String, ModelError> {
        let p = self.index(parent)?;
        let c = self.index(child)?;
        let d = self.model.domain_at(p);
        let v = d.index_of(value).ok_or_else(|| ModelError::ValueNotInDomain {
            domain: d.name().to_string(),
            value: value.to_string(),
        })?;
        let env = self.model.evaluate_scenario(&self.scenario.with_set(p, v));
        Ok(self.model.value_name(c, env[c]).to_string())
    }

    fn index(&self, var: &str) -> Result<usize, ModelError> {
        self.model
            .var_index(var)
            .ok_or_else(|| ModelError::UnknownVariable(var.to_string()))
    }

    fn outcomes(&self, p: usize, c: usize, alternatives: &[usize]) -> Vec<usize> {
        alternatives
            .iter()
            .map(|&v| self.model.evaluate_scenario(&self.scenario.with_set(p, v))[c])
            .collect()
    }

    /// Tests the reinforcement conditions for `edge` in one direction.
    ///
    /// With `attack` set, raising the parent may never raise the child,
    /// lowering it may never lower the child, and some move must change the
    /// child strictly in that direction. Otherwise the mirror image.
    fn reinforces(&self, edge: (&str, &str), attack: bool) -> bool {
        let (Some(p), Some(c)) = (self.model.var_index(edge.0), self.model.var_index(edge.1)) else {
            return false;
        };
        let (below, above) = self.model.domain_at(p).alternatives_idx(self.values[p]);
        let dc = self.model.domain_at(c);
        let cur = self.values[c];
        // Attacks want the child to move against the parent.
        let (up_ok, down_ok) = if attack {
            (ValueOrdering::Less, ValueOrdering::Greater)
        } else {
            (ValueOrdering::Greater, ValueOrdering::Less)
        };
        let mut strict = false;
        for (alts, want) in [(&above, up_ok), (&below, down_ok)] {
            for out in self.outcomes(p, c, alts) {
                match dc.compare_idx(out, cur) {
                    ValueOrdering::Equal => {}
                    o if o == want => strict = true,
                    _ => return false,
                }
            }
        }
        strict
    }
}

/// A named boolean test over influence edges.
pub trait RelationCharacterisation: Send + Sync {
    fn name(&self) -> &str;
    fn holds(&self, ctx: &ExplanationContext<'_>, edge: (&str, &str)) -> bool;
}

/// Edges where moving the parent pushes the child the opposite way.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReinforcementAttack;

/// Edges where moving the parent pushes the child the same way.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReinforcementSupport;

impl RelationCharacterisation for ReinforcementAttack {
    fn name(&self) -> &str {
        "attack"
    }

    fn holds(&self, ctx: &ExplanationContext<'_>, edge: (&str, &str)) -> bool {
        ctx.reinforces(edge, true)
    }
}

impl RelationCharacterisation for ReinforcementSupport {
    fn name(&self) -> &str {
        "support"
    }

    fn holds(&self, ctx: &ExplanationContext<'_>, edge: (&str, &str)) -> bool {
        ctx.reinforces(edge, false)
    }
}

/// A non-empty list of characterisations with distinct names.
pub struct ExplanationMould {
    characterisations: Vec<Box<dyn RelationCharacterisation>>,
}

impl std::fmt::Debug for ExplanationMould {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}

impl ExplanationMould {
    pub fn new(characterisations: Vec<Box<dyn RelationCharacterisation>>) -> Result<Self, ModelError> {
        if characterisations.is_empty() {
            return Err(ModelError::InvalidMould("a mould needs at least one characterisation".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &characterisations {
            if !seen.insert(c.name().to_string()) {
                return Err(ModelError::InvalidMould(format!(
                    "characterisation `{}` appears twice",
                    c.name()
                )));
            }
        }
        Ok(ExplanationMould { characterisations })
    }

    /// The attack/support mould behind reinforcement explanations.
    pub fn reinforcement() -> Self {
        ExplanationMould {
            characterisations: vec![Box::new(ReinforcementAttack), Box::new(ReinforcementSupport)],
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.characterisations.iter().map(|c| c.name())
    }
}

/// How the argument set of an explanation is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgumentPolicy {
    /// Every variable.
    #[default]
    All,
    /// Variables incident to at least one forged relation.
    Involved,
    /// Involved variables with a relation path to the target, plus the target.
    Focused(String),
    /// A caller-supplied set. Used to re-forge over a known argument set.
    Fixed(BTreeSet<String>),
}

impl ArgumentPolicy {
    /// Parses `all`, `involved` or `focused:<var>`.
    pub fn parse(text: &str) -> Option<Self> {
        match text.trim() {
            "all" => Some(ArgumentPolicy::All),
            "involved" => Some(ArgumentPolicy::Involved),
            t => t
                .strip_prefix("focused:")
                .filter(|v| !v.is_empty())
                .map(|v| ArgumentPolicy::Focused(v.to_string())),
        }
    }
}

impl std::fmt::Display for ArgumentPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArgumentPolicy::All => f.write_str("all"),
            ArgumentPolicy::Involved => f.write_str("involved"),
            ArgumentPolicy::Focused(v) => write!(f, "focused:{v}"),
            ArgumentPolicy::Fixed(s) => {
                write!(f, "fixed:{}", s.iter().cloned().collect::<Vec<_>>().join(","))
            }
        }
    }
}

/// Classification of one influence by the reinforcement mould.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Attack,
    Support,
    None,
}

/// An argumentation framework with one relation per characterisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgumentativeExplanation {
    pub arguments: BTreeSet<String>,
    /// Keyed by characterisation name.
    pub relations: BTreeMap<String, BTreeSet<Edge>>,
}

/// Forges an explanation in an existing context.
pub fn forge_in(
    ctx: &ExplanationContext<'_>,
    mould: &ExplanationMould,
    policy: &ArgumentPolicy,
) -> Result<ArgumentativeExplanation, ModelError> {
    let graph = influence_graph(ctx.model());
    let edges: Vec<&Edge> = graph.influences.iter().collect();
    let full: Vec<(String, BTreeSet<Edge>)> = mould
        .characterisations
        .iter()
        .map(|c| {
            let held: Vec<bool> = edges
                .par_iter()
                .map(|e| c.holds(ctx, (&e.0, &e.1)))
                .collect();
            let rel = edges
                .iter()
                .zip(held)
                .filter(|(_, h)| *h)
                .map(|(e, _)| (*e).clone())
                .collect();
            (c.name().to_string(), rel)
        })
        .collect();

    let arguments = select_arguments(&graph, &full, policy)?;
    let relations = full
        .into_iter()
        .map(|(name, rel)| {
            let kept = rel
                .into_iter()
                .filter(|(a, b)| arguments.contains(a) && arguments.contains(b))
                .collect();
            (name, kept)
        })
        .collect();
    Ok(ArgumentativeExplanation {
        arguments,
        relations,
    })
}

fn select_arguments(
    graph: &InfluenceGraph,
    relations: &[(String, BTreeSet<Edge>)],
    policy: &ArgumentPolicy,
) -> Result<BTreeSet<String>, ModelError> {
    let involved = || {
        relations
            .iter()
            .flat_map(|(_, r)| r.iter())
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect::<BTreeSet<_>>()
    };
    match policy {
        ArgumentPolicy::All => Ok(graph.nodes.clone()),
        ArgumentPolicy::Involved => Ok(involved()),
        ArgumentPolicy::Focused(target) => {
            if !graph.nodes.contains(target) {
                return Err(ModelError::UnknownVariable(target.clone()));
            }
            // Walk relation edges backwards from the target.
            let mut preds: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
            for (a, b) in relations.iter().flat_map(|(_, r)| r.iter()) {
                preds.entry(b).or_default().push(a);
            }
            let mut seen = BTreeSet::from([target.clone()]);
            let mut queue = VecDeque::from([target.as_str()]);
            while let Some(n) = queue.pop_front() {
                for &p in preds.get(n).into_iter().flatten() {
                    if seen.insert(p.to_string()) {
                        queue.push_back(p);
                    }
                }
            }
            Ok(seen)
        }
        ArgumentPolicy::Fixed(set) => {
            if let Some(v) = set.iter().find(|v| !graph.nodes.contains(*v)) {
                return Err(ModelError::UnknownVariable(v.clone()));
            }
            Ok(set.clone())
        }
    }
}

/// Forges an explanation of `model` under `input` with any mould.
pub fn forge_explanation(
    model: &CausalModel,
    input: &Input,
    interventions: &[Intervention],
    mould: &ExplanationMould,
    policy: &ArgumentPolicy,
) -> Result<ArgumentativeExplanation, ModelError> {
    let ctx = ExplanationContext::new(model, input, interventions)?;
    forge_in(&ctx, mould, policy)
}

/// Classifies a single influence edge under the reinforcement mould.
pub fn characterise_reinforcement(
    model: &CausalModel,
    input: &Input,
    interventions: &[Intervention],
    edge: (&str, &str),
) -> Result<Relation, ModelError> {
    if !model.parents(edge.1).contains(&edge.0) || model.variable(edge.1).is_none() {
        return Err(ModelError::NotAnInfluence(edge.0.to_string(), edge.1.to_string()));
    }
    let ctx = ExplanationContext::new(model, input, interventions)?;
    let attack = ReinforcementAttack.holds(&ctx, edge);
    let support = ReinforcementSupport.holds(&ctx, edge);
    Ok(match (attack, support) {
        (true, false) => Relation::Attack,
        (false, true) => Relation::Support,
        (false, false) => Relation::None,
        (true, true) => unreachable!("attack and support conditions are exclusive"),
    })
}

/// The scenario an explanation was forged in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RxContext {
    pub input: Input,
    pub interventions: Vec<Intervention>,
    pub values: Assignment,
}

/// A bipolar argumentation framework forged by the reinforcement mould.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReinforcementExplanation {
    pub arguments: BTreeSet<String>,
    pub attacks: BTreeSet<Edge>,
    pub supports: BTreeSet<Edge>,
    pub context: RxContext,
}

impl ReinforcementExplanation {
    /// Value of an argument in the explained scenario.
    pub fn value(&self, arg: &str) -> Option<&str> {
        self.context.values.get(arg)
    }

    pub fn relation(&self, from: &str, to: &str) -> Relation {
        let e = (from.to_string(), to.to_string());
        if self.attacks.contains(&e) {
            Relation::Attack
        } else if self.supports.contains(&e) {
            Relation::Support
        } else {
            Relation::None
        }
    }
}

pub(crate) fn rx_in(
    ctx: &ExplanationContext<'_>,
    policy: &ArgumentPolicy,
) -> Result<ReinforcementExplanation, ModelError> {
    let mut af = forge_in(ctx, &ExplanationMould::reinforcement(), policy)?;
    Ok(ReinforcementExplanation {
        arguments: af.arguments,
        attacks: af.relations.remove("attack").unwrap_or_default(),
        supports: af.relations.remove("support").unwrap_or_default(),
        context: RxContext {
            input: ctx.input.clone(),
            interventions: ctx.interventions.clone(),
            values: ctx.assignment(),
        },
    })
}

/// Extracts the reinforcement explanation of `model` under `input`.
///
/// Interventions are part of the scenario: alternatives for an edge are
/// layered on top of them.
pub fn extract_rx(
    model: &CausalModel,
    input: &Input,
    interventions: &[Intervention],
    policy: &ArgumentPolicy,
) -> Result<ReinforcementExplanation, ModelError> {
    let ctx = ExplanationContext::new(model, input, interventions)?;
    rx_in(&ctx, policy)
}

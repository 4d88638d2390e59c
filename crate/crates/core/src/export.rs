//! JSON, DOT and plain-text renderings of explanations and models.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::explain::{influence_graph, ArgumentPolicy};
use crate::verify::accepted_arguments;
use crate::{CausalModel, PropertyReport, ReinforcementExplanation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentEntry {
    /// Present only for binary models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepted: Option<bool>,
    pub kind: String,
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterventionEntry {
    pub value: String,
    pub variable: String,
}

/// Machine-readable form of an explanation and its property report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplanationDocument {
    pub arguments: Vec<ArgumentEntry>,
    pub attacks: Vec<[String; 2]>,
    pub input: BTreeMap<String, String>,
    pub interventions: Vec<InterventionEntry>,
    pub model: String,
    pub policy: String,
    pub properties: PropertyReport,
    pub supports: Vec<[String; 2]>,
}

impl ExplanationDocument {
    pub fn new(
        model_name: &str,
        model: &CausalModel,
        rx: &ReinforcementExplanation,
        policy: &ArgumentPolicy,
        properties: PropertyReport,
    ) -> Self {
        let accepted = accepted_arguments(model, rx).ok();
        let arguments = rx
            .arguments
            .iter()
            .map(|a| ArgumentEntry {
                accepted: accepted.as_ref().map(|s| s.contains(a)),
                kind: model
                    .variable(a)
                    .map_or("unknown", |v| v.kind.as_str())
                    .to_string(),
                name: a.clone(),
                value: rx.value(a).unwrap_or_default().to_string(),
            })
            .collect();
        let pairs = |rel: &std::collections::BTreeSet<crate::Edge>| {
            rel.iter().map(|(a, b)| [a.clone(), b.clone()]).collect()
        };
        let mut interventions: Vec<InterventionEntry> = rx
            .context
            .interventions
            .iter()
            .map(|i| InterventionEntry {
                value: i.value.clone(),
                variable: i.variable.clone(),
            })
            .collect();
        interventions.sort_by(|a, b| (&a.variable, &a.value).cmp(&(&b.variable, &b.value)));
        interventions.dedup();
        ExplanationDocument {
            arguments,
            attacks: pairs(&rx.attacks),
            input: rx
                .context
                .input
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            interventions,
            model: model_name.to_string(),
            policy: policy.to_string(),
            properties,
            supports: pairs(&rx.supports),
        }
    }

    /// Pretty-printed JSON with keys sorted at every level.
    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }
}

pub(crate) fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // serde_json's default map is ordered, so a round trip through Value sorts keys.
    let v = serde_json::to_value(value).expect("documents serialize");
    serde_json::to_string_pretty(&v).expect("values serialize")
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering; nodes are labelled `name=value`.
pub fn export_dot(rx: &ReinforcementExplanation) -> String {
    let mut out = String::from("digraph rx {\n");
    for a in &rx.arguments {
        let label = format!("{a}={}", rx.value(a).unwrap_or("?"));
        writeln!(out, "  {} [label={}];", quote(a), quote(&label)).unwrap();
    }
    let mut edges: Vec<(&str, &str, &str)> = rx
        .attacks
        .iter()
        .map(|(a, b)| (a.as_str(), b.as_str(), "attack"))
        .chain(rx.supports.iter().map(|(a, b)| (a.as_str(), b.as_str(), "support")))
        .collect();
    edges.sort();
    for (a, b, style) in edges {
        writeln!(out, "  {} -> {} [style={style}];", quote(a), quote(b)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Terminal rendering: scenario, argument values, then one line per relation.
pub fn export_text(rx: &ReinforcementExplanation) -> String {
    let mut out = format!("input: {}\n", rx.context.input);
    if !rx.context.interventions.is_empty() {
        let iv: Vec<String> = rx.context.interventions.iter().map(ToString::to_string).collect();
        writeln!(out, "do: {}", iv.join(" ")).unwrap();
    }
    let args: Vec<String> = rx
        .arguments
        .iter()
        .map(|a| format!("{a}={}", rx.value(a).unwrap_or("?")))
        .collect();
    writeln!(out, "arguments: {}", args.join(" ")).unwrap();
    for (a, b) in &rx.attacks {
        writeln!(out, "attack {a} -> {b}").unwrap();
    }
    for (a, b) in &rx.supports {
        writeln!(out, "support {a} -> {b}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainEntry {
    pub name: String,
    /// Covering pairs `[lower, upper]` of the order.
    pub order: Vec<[String; 2]>,
    pub values: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableEntry {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equation: Option<String>,
    pub kind: String,
    pub name: String,
    pub parents: Vec<String>,
}

/// Structure of a model as served to clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub binary: bool,
    pub domains: Vec<DomainEntry>,
    pub influences: Vec<[String; 2]>,
    pub name: String,
    pub variables: Vec<VariableEntry>,
}

impl ModelSummary {
    pub fn new(name: &str, model: &CausalModel) -> Self {
        ModelSummary {
            binary: model.is_binary(),
            domains: model
                .domains()
                .iter()
                .map(|d| DomainEntry {
                    name: d.name().to_string(),
                    order: d.covering_pairs().into_iter().map(|(a, b)| [a, b]).collect(),
                    values: d.values().to_vec(),
                })
                .collect(),
            influences: influence_graph(model)
                .influences
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
            name: name.to_string(),
            variables: model
                .variables()
                .iter()
                .map(|v| VariableEntry {
                    domain: v.domain.clone(),
                    equation: model.equation(&v.name).map(ToString::to_string),
                    kind: v.kind.as_str().to_string(),
                    name: v.name.clone(),
                    parents: model.parents(&v.name).into_iter().map(String::from).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_sorted_json(self)
    }
}

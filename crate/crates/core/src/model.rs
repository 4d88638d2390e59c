//! Causal models: declarations, validation and evaluation under interventions.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::expr::{self, CompileError, Scope, Term};
use crate::{Domain, Expr, ModelError, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VariableKind {
    Exogenous,
    Endogenous,
}

impl VariableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VariableKind::Exogenous => "exogenous",
            VariableKind::Endogenous => "endogenous",
        }
    }
}

/// A variable as declared, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub kind: VariableKind,
    pub domain: String,
    pub equation: Option<Expr>,
    /// Explicit parent list; when absent the parents are the free variables of the equation.
    pub parents: Option<Vec<String>>,
}

impl VariableDecl {
    pub fn exogenous(name: impl Into<String>, domain: impl Into<String>) -> Self {
        VariableDecl {
            name: name.into(),
            kind: VariableKind::Exogenous,
            domain: domain.into(),
            equation: None,
            parents: None,
        }
    }

    pub fn endogenous(name: impl Into<String>, domain: impl Into<String>, equation: Expr) -> Self {
        VariableDecl {
            name: name.into(),
            kind: VariableKind::Endogenous,
            domain: domain.into(),
            equation: Some(equation),
            parents: None,
        }
    }
}

/// Unvalidated model declarations. Turn into a [`CausalModel`] with [`CausalModel::new`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ModelSpec {
    pub domains: Vec<Domain>,
    pub variables: Vec<VariableDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `spec` describes a well-formed acyclic causal model.
pub fn validate_model(spec: &ModelSpec) -> ValidationReport {
    match check(spec) {
        Ok(_) => ValidationReport::default(),
        Err(violations) => ValidationReport { violations },
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VariableKind,
    pub domain: String,
}

#[derive(Debug, Clone)]
struct Equation {
    body: Expr,
    parents: Vec<usize>,
    code: Term,
}

/// A validated, immutable causal model.
///
/// Domains and variables are kept sorted by name, so two models built from
/// the same declarations in different orders compare equal.
#[derive(Debug, Clone)]
pub struct CausalModel {
    domains: Vec<Domain>,
    vars: Vec<Variable>,
    var_domain: Vec<usize>,
    index: HashMap<String, usize>,
    equations: Vec<Option<Equation>>,
    topo: Vec<usize>,
    binary: bool,
}

impl PartialEq for CausalModel {
    fn eq(&self, other: &Self) -> bool {
        self.domains == other.domains
            && self.vars == other.vars
            && self
                .equations
                .iter()
                .zip(&other.equations)
                .all(|(a, b)| a.as_ref().map(|e| &e.body) == b.as_ref().map(|e| &e.body))
    }
}

impl Eq for CausalModel {}

struct Checked {
    domains: Vec<Domain>,
    decls: Vec<VariableDecl>,
}

fn check(spec: &ModelSpec) -> Result<CausalModel, Vec<Violation>> {
    let mut violations = Vec::new();
    if spec.variables.is_empty() {
        violations.push(Violation::EmptyModel);
    }

    let mut domains: Vec<Domain> = Vec::new();
    for d in &spec.domains {
        if domains.iter().any(|x| x.name() == d.name()) {
            violations.push(Violation::DuplicateDomain(d.name().to_string()));
        } else {
            domains.push(d.clone());
        }
    }
    domains.sort_by(|a, b| a.name().cmp(b.name()));
    let domain_index: HashMap<String, usize> = domains
        .iter()
        .enumerate()
        .map(|(i, d)| (d.name().to_string(), i))
        .collect();

    let mut decls: Vec<VariableDecl> = Vec::new();
    for v in &spec.variables {
        if decls.iter().any(|x| x.name == v.name) {
            violations.push(Violation::DuplicateVariable(v.name.clone()));
        } else {
            decls.push(v.clone());
        }
    }
    decls.sort_by(|a, b| a.name.cmp(&b.name));
    let checked = Checked { domains, decls };

    let index: HashMap<String, usize> = checked
        .decls
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name.clone(), i))
        .collect();
    let mut var_domain = vec![usize::MAX; checked.decls.len()];
    for (i, v) in checked.decls.iter().enumerate() {
        match domain_index.get(&v.domain) {
            Some(&d) => var_domain[i] = d,
            None => violations.push(Violation::UnknownDomain {
                variable: v.name.clone(),
                domain: v.domain.clone(),
            }),
        }
        match (v.kind, &v.equation) {
            (VariableKind::Exogenous, Some(_)) => {
                violations.push(Violation::ExogenousEquation(v.name.clone()))
            }
            (VariableKind::Endogenous, None) => {
                violations.push(Violation::MissingEquation(v.name.clone()))
            }
            _ => {}
        }
    }

    // Parent sets, restricted to known variables.
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); checked.decls.len()];
    let mut refs_ok = vec![true; checked.decls.len()];
    for (i, v) in checked.decls.iter().enumerate() {
        let (VariableKind::Endogenous, Some(body)) = (v.kind, &v.equation) else {
            continue;
        };
        let used = body.free_vars();
        for name in &used {
            match index.get(name) {
                Some(&p) => parents[i].push(p),
                None => {
                    refs_ok[i] = false;
                    violations.push(Violation::UnknownVariable {
                        equation: v.name.clone(),
                        name: name.clone(),
                    });
                }
            }
        }
        parents[i].sort_unstable();
        if let Some(declared) = &v.parents {
            let declared_set: BTreeSet<&String> = declared.iter().collect();
            if declared_set != used.iter().collect::<BTreeSet<_>>() {
                violations.push(Violation::ParentMismatch {
                    variable: v.name.clone(),
                    declared: declared.clone(),
                    used: used.iter().cloned().collect(),
                });
            }
        }
    }

    let (topo, cycles) = topological_order(&parents);
    for cycle in cycles {
        violations.push(Violation::Cycle(
            cycle.into_iter().map(|i| checked.decls[i].name.clone()).collect(),
        ));
    }

    let domain_lookup: HashMap<String, (usize, usize)> = index
        .iter()
        .filter(|(_, &i)| var_domain[i] != usize::MAX)
        .map(|(n, &i)| (n.clone(), (i, var_domain[i])))
        .collect();
    let scope = Scope {
        domains: &checked.domains,
        vars: &domain_lookup,
    };
    let mut equations: Vec<Option<Equation>> = vec![None; checked.decls.len()];
    for (i, v) in checked.decls.iter().enumerate() {
        let (VariableKind::Endogenous, Some(body)) = (v.kind, &v.equation) else {
            continue;
        };
        if var_domain[i] == usize::MAX || !refs_ok[i] {
            continue;
        }
        match expr::compile(body, var_domain[i], &scope) {
            Ok(code) => {
                let mut body = body.clone();
                canonicalize_tables(&mut body, &checked.domains, &domain_lookup);
                equations[i] = Some(Equation {
                    body,
                    parents: parents[i].clone(),
                    code,
                });
            }
            Err(e) => violations.push(match e {
                CompileError::UnknownVariable(name) => Violation::UnknownVariable {
                    equation: v.name.clone(),
                    name,
                },
                CompileError::UndeclaredValue(value) => Violation::UndeclaredValue {
                    equation: v.name.clone(),
                    value,
                },
                CompileError::Type { message, path } => Violation::Type {
                    equation: v.name.clone(),
                    message,
                    path,
                },
                CompileError::Table(message) => Violation::Table {
                    equation: v.name.clone(),
                    message,
                },
            }),
        }
    }

    if !violations.is_empty() {
        return Err(violations);
    }
    let vars: Vec<Variable> = checked
        .decls
        .iter()
        .map(|v| Variable {
            name: v.name.clone(),
            kind: v.kind,
            domain: v.domain.clone(),
        })
        .collect();
    let binary = var_domain.iter().all(|&d| checked.domains[d].is_binary());
    let topo = topo
        .into_iter()
        .filter(|&i| vars[i].kind == VariableKind::Endogenous)
        .collect();
    Ok(CausalModel {
        domains: checked.domains,
        vars,
        var_domain,
        index,
        equations,
        topo,
        binary,
    })
}

/// Sorts table rows by argument values in declared domain order.
fn canonicalize_tables(body: &mut Expr, domains: &[Domain], vars: &HashMap<String, (usize, usize)>) {
    body.tables_mut(&mut |t| {
        let arg_domains: Vec<&Domain> = t.args.iter().map(|a| &domains[vars[a].1]).collect();
        t.rows.sort_by_cached_key(|(key, _)| {
            key.iter()
                .zip(&arg_domains)
                .map(|(v, d)| d.index_of(v).unwrap_or(usize::MAX))
                .collect::<Vec<_>>()
        });
    });
}

/// Kahn's algorithm, smallest index first. Returns the order and any cycles
/// (as strongly connected groups of the remaining nodes).
fn topological_order(parents: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = parents.len();
    let mut children = vec![Vec::new(); n];
    let mut pending: Vec<usize> = parents.iter().map(Vec::len).collect();
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: BTreeSet<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &c in &children[i] {
            pending[c] -= 1;
            if pending[c] == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == n {
        return (order, Vec::new());
    }
    let stuck: Vec<usize> = (0..n).filter(|&i| pending[i] > 0).collect();
    let reach = |from: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            for &c in &children[x] {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            }
        }
        seen
    };
    let reachable: HashMap<usize, Vec<bool>> = stuck.iter().map(|&i| (i, reach(i))).collect();
    let mut assigned = vec![false; n];
    let mut cycles = Vec::new();
    for &i in &stuck {
        if assigned[i] || !reachable[&i][i] {
            continue;
        }
        let group: Vec<usize> = stuck
            .iter()
            .copied()
            .filter(|&j| j == i || (reachable[&i][j] && reachable[&j][i]))
            .collect();
        group.iter().for_each(|&j| assigned[j] = true);
        cycles.push(group);
    }
    (order, cycles)
}

/// A resolved input plus interventions, in the model's internal value encoding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    input: Vec<usize>,
    overrides: Vec<Option<usize>>,
}

impl Scenario {
    /// The same scenario with `set(var = value)` layered on top.
    pub(crate) fn with_set(&self, var: usize, value: usize) -> Scenario {
        let mut s = self.clone();
        s.overrides[var] = Some(value);
        s
    }
}

impl CausalModel {
    pub fn new(spec: &ModelSpec) -> Result<Self, ModelError> {
        check(spec).map_err(ModelError::Invalid)
    }

    /// Declarations equivalent to this model, sorted by name.
    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            domains: self.domains.clone(),
            variables: self
                .vars
                .iter()
                .zip(&self.equations)
                .map(|(v, eq)| VariableDecl {
                    name: v.name.clone(),
                    kind: v.kind,
                    domain: v.domain.clone(),
                    equation: eq.as_ref().map(|e| e.body.clone()),
                    parents: None,
                })
                .collect(),
        }
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn domain(&self, name: &str) -> Option<&Domain> {
        self.domains.iter().find(|d| d.name() == name)
    }

    /// All variables, sorted by name.
    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn exogenous(&self) -> impl Iterator<Item = &Variable> {
        self.vars.iter().filter(|v| v.kind == VariableKind::Exogenous)
    }

    pub fn endogenous(&self) -> impl Iterator<Item = &Variable> {
        self.vars.iter().filter(|v| v.kind == VariableKind::Endogenous)
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.index.get(name).map(|&i| &self.vars[i])
    }

    pub(crate) fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn var_name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub(crate) fn domain_at(&self, var: usize) -> &Domain {
        &self.domains[self.var_domain[var]]
    }

    pub fn domain_of(&self, var: &str) -> Option<&Domain> {
        self.var_index(var).map(|i| self.domain_at(i))
    }

    pub fn equation(&self, var: &str) -> Option<&Expr> {
        self.var_index(var)
            .and_then(|i| self.equations[i].as_ref())
            .map(|e| &e.body)
    }

    /// Parents of `var`, sorted by name.
    pub fn parents(&self, var: &str) -> Vec<&str> {
        self.var_index(var)
            .map(|i| self.parent_indices(i).iter().map(|&p| self.var_name(p)).collect())
            .unwrap_or_default()
    }

    pub(crate) fn parent_indices(&self, var: usize) -> &[usize] {
        self.equations[var].as_ref().map_or(&[], |e| &e.parents)
    }

    /// Whether every variable ranges over the canonical binary domain.
    pub fn is_binary(&self) -> bool {
        self.binary
    }

    /// Endogenous variables in evaluation order.
    pub fn topological_order(&self) -> Vec<&str> {
        self.topo.iter().map(|&i| self.var_name(i)).collect()
    }

    pub(crate) fn value_name(&self, var: usize, value: usize) -> &str {
        self.domain_at(var).value(value)
    }

    fn value_index(&self, var: usize, value: &str) -> Result<usize, ModelError> {
        let d = self.domain_at(var);
        d.index_of(value).ok_or_else(|| ModelError::ValueNotInDomain {
            domain: d.name().to_string(),
            value: value.to_string(),
        })
    }

    /// Resolves an input and interventions against the model.
    pub fn scenario(&self, input: &Input, interventions: &[Intervention]) -> Result<Scenario, ModelError> {
        let n = self.vars.len();
        let mut values = vec![0; n];
        for (name, value) in &input.values {
            let i = self
                .var_index(name)
                .ok_or_else(|| ModelError::UnknownVariable(name.clone()))?;
            if self.vars[i].kind != VariableKind::Exogenous {
                return Err(ModelError::InputNotExogenous(name.clone()));
            }
            values[i] = self.value_index(i, value)?;
        }
        if let Some(v) = self.exogenous().find(|v| !input.values.contains_key(&v.name)) {
            return Err(ModelError::MissingInput(v.name.clone()));
        }
        let mut overrides = vec![None; n];
        for iv in interventions {
            let i = self
                .var_index(&iv.variable)
                .ok_or_else(|| ModelError::UnknownVariable(iv.variable.clone()))?;
            let v = self.value_index(i, &iv.value)?;
            match overrides[i] {
                Some(prev) if prev != v => {
                    return Err(ModelError::ConflictingInterventions(iv.variable.clone()))
                }
                _ => overrides[i] = Some(v),
            }
        }
        Ok(Scenario {
            input: values,
            overrides,
        })
    }

    /// Evaluates every variable under the scenario, in the internal encoding.
    pub(crate) fn evaluate_scenario(&self, s: &Scenario) -> Vec<usize> {
        let mut env = vec![0; self.vars.len()];
        for (i, v) in self.vars.iter().enumerate() {
            if v.kind == VariableKind::Exogenous {
                env[i] = s.overrides[i].unwrap_or(s.input[i]);
            }
        }
        for &i in &self.topo {
            env[i] = match s.overrides[i] {
                Some(v) => v,
                None => self.equations[i]
                    .as_ref()
                    .expect("endogenous variables have equations")
                    .code
                    .eval(&env, &self.domains),
            };
        }
        env
    }

    pub(crate) fn assignment_from(&self, env: &[usize]) -> Assignment {
        Assignment {
            values: self
                .vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.name.clone(), self.value_name(i, env[i]).to_string()))
                .collect(),
        }
    }

    pub(crate) fn input_from(&self, values: &[usize]) -> Input {
        Input {
            values: self
                .vars
                .iter()
                .enumerate()
                .filter(|(_, v)| v.kind == VariableKind::Exogenous)
                .map(|(i, v)| (v.name.clone(), self.value_name(i, values[i]).to_string()))
                .collect(),
        }
    }

    /// Values of every variable given `input`, after applying `interventions`.
    pub fn evaluate(&self, input: &Input, interventions: &[Intervention]) -> Result<Assignment, ModelError> {
        let s = self.scenario(input, interventions)?;
        Ok(self.assignment_from(&self.evaluate_scenario(&s)))
    }

    /// Number of distinct inputs, saturating at `usize::MAX`.
    pub fn input_space_size(&self) -> usize {
        self.exogenous()
            .map(|v| self.domain(&v.domain).map_or(1, Domain::len))
            .try_fold(1usize, |acc, k| acc.checked_mul(k))
            .unwrap_or(usize::MAX)
    }

    /// Every input, in lexicographic order of (variable name, declared value order).
    pub fn enumerate_inputs(&self) -> impl Iterator<Item = Input> + '_ {
        let exo: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.vars[i].kind == VariableKind::Exogenous)
            .collect();
        let radices: Vec<usize> = exo.iter().map(|&i| self.domain_at(i).len()).collect();
        let total = self.input_space_size();
        (0..total).map(move |mut k| {
            let mut values = vec![0; self.vars.len()];
            for (pos, &i) in exo.iter().enumerate().rev() {
                values[i] = k % radices[pos];
                k /= radices[pos];
            }
            self.input_from(&values)
        })
    }
}

/// Evaluates `model` under `input` and `interventions`.
pub fn evaluate(model: &CausalModel, input: &Input, interventions: &[Intervention]) -> Result<Assignment, ModelError> {
    model.evaluate(input, interventions)
}

fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ModelError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|item| match item.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => {
                Ok((k.trim().to_string(), v.trim().to_string()))
            }
            _ => Err(ModelError::MalformedAssignment(item.to_string())),
        })
        .collect()
}

fn write_pairs(f: &mut fmt::Formatter<'_>, values: &BTreeMap<String, String>, sep: &str) -> fmt::Result {
    for (i, (k, v)) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(sep)?;
        }
        write!(f, "{k}={v}")?;
    }
    Ok(())
}

/// Values for the exogenous variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Input {
    values: BTreeMap<String, String>,
}

impl Input {
    pub fn new<K: Into<String>, V: Into<String>>(pairs: impl IntoIterator<Item = (K, V)>) -> Self {
        Input {
            values: pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }

    /// Parses `U1=1,U2=0` (commas or whitespace separate pairs).
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut values = BTreeMap::new();
        for (k, v) in parse_pairs(text)? {
            if values.insert(k.clone(), v).is_some() {
                return Err(ModelError::MalformedAssignment(format!("{k} assigned twice")));
            }
        }
        Ok(Input { values })
    }

    pub fn get(&self, var: &str) -> Option<&str> {
        self.values.get(var).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pairs(f, &self.values, ",")
    }
}

/// `set(variable = value)`: a do-intervention on an endogenous variable, or a
/// reassignment of an exogenous one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intervention {
    pub variable: String,
    pub value: String,
}

impl Intervention {
    pub fn new(variable: impl Into<String>, value: impl Into<String>) -> Self {
        Intervention {
            variable: variable.into(),
            value: value.into(),
        }
    }

    /// Parses one `V=v` pair.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        match parse_pairs(text)?.as_slice() {
            [(k, v)] => Ok(Intervention::new(k.clone(), v.clone())),
            _ => Err(ModelError::MalformedAssignment(text.to_string())),
        }
    }

    /// Parses a list of `V=v` pairs separated by commas or whitespace.
    pub fn parse_list(text: &str) -> Result<Vec<Self>, ModelError> {
        Ok(parse_pairs(text)?
            .into_iter()
            .map(|(k, v)| Intervention::new(k, v))
            .collect())
    }
}

impl fmt::Display for Intervention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.value)
    }
}

/// A value for every variable of a model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    values: BTreeMap<String, String>,
}

impl Assignment {
    pub fn get(&self, var: &str) -> Option<&str> {
        self.values.get(var).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl FromIterator<(String, String)> for Assignment {
    fn from_iter<T: IntoIterator<Item = (String, String)>>(iter: T) -> Self {
        Assignment {
            values: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_pairs(f, &self.values, " ")
    }
}

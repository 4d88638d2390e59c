use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{CausalModel, CmpOp, Domain, Expr, Input, ModelSpec, TableExpr, VariableDecl};

/// Shape of the single value domain shared by every variable of a generated model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainProfile {
    Binary,
    /// A total order of `k` values; `k = 3` gives `low < mid < high`.
    Chain(usize),
    /// A random partial order over `k` values.
    RandomPoset(usize),
}

impl fmt::Display for DomainProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainProfile::Binary => f.write_str("binary"),
            DomainProfile::Chain(k) => write!(f, "chain{k}"),
            DomainProfile::RandomPoset(k) => write!(f, "poset{k}"),
        }
    }
}

impl FromStr for DomainProfile {
    type Err = String;

    /// Accepts `binary`, `chainK` and `posetK`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |rest: &str| {
            rest.trim_start_matches(':')
                .parse::<usize>()
                .map_err(|_| format!("bad size in profile `{s}`"))
        };
        if s == "binary" {
            Ok(DomainProfile::Binary)
        } else if let Some(rest) = s.strip_prefix("chain") {
            Ok(DomainProfile::Chain(num(rest)?))
        } else if let Some(rest) = s.strip_prefix("poset") {
            Ok(DomainProfile::RandomPoset(num(rest)?))
        } else {
            Err(format!("unknown domain profile `{s}` (expected binary, chainK or posetK)"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquationProfile {
    Expression,
    RandomTable,
    /// Alternates between the two per model.
    Mixed,
}

impl fmt::Display for EquationProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EquationProfile::Expression => "expression",
            EquationProfile::RandomTable => "table",
            EquationProfile::Mixed => "mixed",
        })
    }
}

impl FromStr for EquationProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "expression" | "expr" => Ok(EquationProfile::Expression),
            "table" => Ok(EquationProfile::RandomTable),
            "mixed" => Ok(EquationProfile::Mixed),
            _ => Err(format!("unknown equation profile `{s}` (expected expression, table or mixed)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub seed: u64,
    /// Number of models in a campaign.
    pub models: usize,
    pub max_vars: usize,
    pub max_parents: usize,
    pub domain_profile: DomainProfile,
    pub equation_profile: EquationProfile,
    /// Inputs sampled per model when the input space exceeds `exhaustive_cap`.
    pub inputs_per_model: usize,
    pub exhaustive_cap: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 0,
            models: 500,
            max_vars: 8,
            max_parents: 3,
            domain_profile: DomainProfile::Binary,
            equation_profile: EquationProfile::Mixed,
            inputs_per_model: 64,
            exhaustive_cap: 1024,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.max_vars == 0 {
            return Err("max_vars must be at least 1".into());
        }
        match self.domain_profile {
            DomainProfile::Chain(0) | DomainProfile::RandomPoset(0) => {
                Err("domain size must be at least 1".into())
            }
            _ => Ok(()),
        }
    }

    /// Generator for model `index`; independent of every other index.
    pub(crate) fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

fn profile_domain(profile: DomainProfile, rng: &mut impl Rng) -> Domain {
    match profile {
        DomainProfile::Binary => Domain::binary("Bool"),
        DomainProfile::Chain(3) => Domain::chain("Level", ["low", "mid", "high"]),
        DomainProfile::Chain(k) => Domain::chain("Chain", (0..k).map(|i| format!("c{i}"))),
        DomainProfile::RandomPoset(k) => {
            let values: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
            let mut order = Vec::new();
            for i in 0..k {
                for j in i + 1..k {
                    if rng.random_bool(0.4) {
                        order.push((values[i].clone(), values[j].clone()));
                    }
                }
            }
            Domain::new("Poset", values, &order).expect("edges go forward, so the order is acyclic")
        }
    }
}

struct ExprGen<'a, R> {
    rng: &'a mut R,
    parents: &'a [String],
    domain: &'a Domain,
}

impl<R: Rng> ExprGen<'_, R> {
    fn lit(&mut self) -> Expr {
        Expr::lit(self.domain.values().choose(self.rng).expect("non-empty").clone())
    }

    fn leaf(&mut self) -> Expr {
        match self.parents.choose(self.rng) {
            Some(p) if self.rng.random_bool(0.85) => Expr::var(p.clone()),
            _ => self.lit(),
        }
    }

    fn op(&mut self) -> CmpOp {
        *CmpOp::ALL.choose(self.rng).expect("non-empty")
    }

    fn term(&mut self, depth: usize) -> Expr {
        if depth == 0 || self.rng.random_bool(0.3) {
            return self.leaf();
        }
        let binary = self.domain.is_binary();
        let total = self.domain.is_total();
        match self.rng.random_range(0..4) {
            0 | 1 if binary => self.cond(depth),
            0 => Expr::ite(self.cond(depth - 1), self.term(depth - 1), self.term(depth - 1)),
            // min/max arguments stay leaves so their type is always inferable
            2 if total => Expr::Min(vec![self.leaf(), self.leaf()]),
            3 if total => Expr::Max(vec![self.leaf(), self.leaf()]),
            _ => Expr::ite(self.cond(depth - 1), self.term(depth - 1), self.term(depth - 1)),
        }
    }

    fn cond(&mut self, depth: usize) -> Expr {
        let binary = self.domain.is_binary();
        if depth == 0 || self.rng.random_bool(0.25) {
            return if binary {
                self.leaf()
            } else {
                Expr::cmp(self.op(), self.leaf(), self.leaf())
            };
        }
        match self.rng.random_range(0..4) {
            0 => Expr::not(self.cond(depth - 1)),
            1 => Expr::and(self.cond(depth - 1), self.cond(depth - 1)),
            2 => Expr::or(self.cond(depth - 1), self.cond(depth - 1)),
            _ => Expr::cmp(self.op(), self.term(depth - 1), self.term(depth - 1)),
        }
    }

    fn table(&mut self) -> Expr {
        let k = self.domain.len();
        let n = self.parents.len();
        let rows = (0..k.pow(n as u32))
            .map(|mut idx| {
                let mut key = vec![String::new(); n];
                for slot in key.iter_mut().rev() {
                    *slot = self.domain.value(idx % k).to_string();
                    idx /= k;
                }
                (key, self.domain.values().choose(self.rng).expect("non-empty").clone())
            })
            .collect();
        Expr::Table(TableExpr {
            args: self.parents.to_vec(),
            rows,
        })
    }
}

pub(crate) fn generate_with(params: &GeneratorParams, index: usize, rng: &mut ChaCha8Rng) -> CausalModel {
    let domain = profile_domain(params.domain_profile, rng);
    let n = rng.random_range(1..=params.max_vars);
    let n_exo = if n == 1 { 1 } else { rng.random_range(1..n) };
    let mut names: Vec<String> = (1..=n_exo).map(|i| format!("U{i}")).collect();
    let mut variables: Vec<VariableDecl> = names
        .iter()
        .map(|u| VariableDecl::exogenous(u.clone(), domain.name()))
        .collect();
    let use_table = match params.equation_profile {
        EquationProfile::Expression => false,
        EquationProfile::RandomTable => true,
        EquationProfile::Mixed => index % 2 == 1,
    };
    for i in 1..=n - n_exo {
        let max = params.max_parents.min(names.len());
        let count = if max == 0 || rng.random_bool(0.05) {
            0
        } else {
            rng.random_range(1..=max)
        };
        let mut parents: Vec<String> = rand::seq::index::sample(rng, names.len(), count)
            .into_iter()
            .map(|j| names[j].clone())
            .collect();
        parents.sort();
        let mut g = ExprGen {
            rng: &mut *rng,
            parents: &parents,
            domain: &domain,
        };
        let body = if parents.is_empty() {
            g.lit()
        } else if use_table {
            g.table()
        } else {
            g.term(3)
        };
        let name = format!("V{i}");
        variables.push(VariableDecl::endogenous(name.clone(), domain.name(), body));
        names.push(name);
    }
    let spec = ModelSpec {
        domains: vec![domain],
        variables,
    };
    CausalModel::new(&spec).unwrap_or_else(|e| panic!("generated model {index} is invalid: {e}"))
}

/// Model `index` of the campaign described by `params`.
pub fn generate_model_at(params: &GeneratorParams, index: usize) -> CausalModel {
    generate_with(params, index, &mut params.rng(index))
}

/// The first model of the campaign described by `params`.
pub fn generate_model(params: &GeneratorParams) -> CausalModel {
    generate_model_at(params, 0)
}

/// Every input if there are at most `cap` of them, otherwise `count` uniform samples.
pub(crate) fn sample_inputs(model: &CausalModel, cap: usize, count: usize, rng: &mut impl Rng) -> Vec<Input> {
    if model.input_space_size() <= cap {
        return model.enumerate_inputs().collect();
    }
    (0..count)
        .map(|_| {
            Input::new(model.exogenous().map(|v| {
                let d = model.domain(&v.domain).expect("validated");
                (v.name.clone(), d.values().choose(rng).expect("non-empty").clone())
            }))
        })
        .collect()
}

use std::fmt;

use thiserror::Error;

/// Errors raised while constructing domains or evaluating a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("domain `{0}` has no values")]
    EmptyDomain(String),
    #[error("domain `{domain}` declares value `{value}` more than once")]
    DuplicateValue { domain: String, value: String },
    #[error("order of domain `{domain}` references undeclared value `{value}`")]
    UndeclaredOrderValue { domain: String, value: String },
    #[error("order of domain `{domain}` is cyclic: `{a}` and `{b}` lie below each other")]
    CyclicOrder { domain: String, a: String, b: String },
    #[error("value `{value}` is not in domain `{domain}`")]
    ValueNotInDomain { domain: String, value: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("input does not assign exogenous variable `{0}`")]
    MissingInput(String),
    #[error("input assigns endogenous variable `{0}`; use an intervention instead")]
    InputNotExogenous(String),
    #[error("conflicting interventions on `{0}`")]
    ConflictingInterventions(String),
    #[error("`{0}` is not a valid `name=value` assignment")]
    MalformedAssignment(String),
    #[error("`({0}, {1})` is not an influence of the model")]
    NotAnInfluence(String, String),
    #[error("invalid explanation mould: {0}")]
    InvalidMould(String),
    #[error("model is not binary")]
    NotBinary,
    #[error("explanation does not belong to this model: {0}")]
    Mismatch(String),
    #[error("invalid model: {}", DisplayViolations(.0))]
    Invalid(Vec<Violation>),
}

struct DisplayViolations<'a>(&'a [Violation]);

impl fmt::Display for DisplayViolations<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A well-formedness problem found by [`validate_model`](crate::validate_model).
///
/// Violations are data: validation never fails, it reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("model declares no variables")]
    EmptyModel,
    #[error("domain `{0}` is declared more than once")]
    DuplicateDomain(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(ModelError),
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("variable `{variable}` uses unknown domain `{domain}`")]
    UnknownDomain { variable: String, domain: String },
    #[error("endogenous variable `{0}` has no equation")]
    MissingEquation(String),
    #[error("exogenous variable `{0}` must not have an equation")]
    ExogenousEquation(String),
    #[error("equation for `{equation}` references unknown variable `{name}`")]
    UnknownVariable { equation: String, name: String },
    #[error("equation for `{equation}` uses undeclared value `{value}`")]
    UndeclaredValue { equation: String, value: String },
    #[error("equation for `{variable}` declares parents {declared:?} but its body uses {used:?}")]
    ParentMismatch {
        variable: String,
        declared: Vec<String>,
        used: Vec<String>,
    },
    #[error("equation for `{equation}` is ill-typed: {message}")]
    Type {
        equation: String,
        message: String,
        /// Child-index path from the equation body to the offending node.
        path: Vec<usize>,
    },
    #[error("table for `{equation}` is invalid: {message}")]
    Table { equation: String, message: String },
    #[error("cyclic dependency between {}", .0.join(", "))]
    Cycle(Vec<String>),
}

impl Violation {
    /// Name of the declaration the violation is attached to, if any.
    pub fn subject(&self) -> Option<&str> {
        match self {
            Violation::EmptyModel => None,
            Violation::DuplicateDomain(d) => Some(d),
            Violation::InvalidDomain(e) => match e {
                ModelError::EmptyDomain(d) => Some(d),
                ModelError::DuplicateValue { domain, .. }
                | ModelError::UndeclaredOrderValue { domain, .. }
                | ModelError::CyclicOrder { domain, .. } => Some(domain),
                _ => None,
            },
            Violation::DuplicateVariable(v)
            | Violation::MissingEquation(v)
            | Violation::ExogenousEquation(v) => Some(v),
            Violation::UnknownDomain { variable, .. } => Some(variable),
            Violation::UnknownVariable { equation, .. }
            | Violation::UndeclaredValue { equation, .. }
            | Violation::Type { equation, .. }
            | Violation::Table { equation, .. } => Some(equation),
            Violation::ParentMismatch { variable, .. } => Some(variable),
            Violation::Cycle(vars) => vars.first().map(String::as_str),
        }
    }
}

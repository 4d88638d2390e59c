//! Causal model evaluation and argumentative explanation.
//!
//! The crate evaluates structural causal models over finite partially
//! ordered domains, forges bipolar argumentation frameworks (reinforcement
//! explanations) from them, and checks the formal properties those
//! explanations are expected to satisfy.
//!
//! ```
//! use causal_forge::{dsl, explain::{extract_rx, ArgumentPolicy}, Input};
//!
//! let model = dsl::parse_model(
//!     "domain Bool { values 0 < 1 }
//!      exo U1 : Bool
//!      exo U2 : Bool
//!      endo V1 : Bool = U1 and not U2
//!      endo V2 : Bool = V1",
//! ).unwrap();
//! let input = Input::parse("U1=1,U2=0").unwrap();
//! let rx = extract_rx(&model, &input, &[], &ArgumentPolicy::All).unwrap();
//! assert!(rx.attacks.contains(&("U2".to_string(), "V1".to_string())));
//! ```

pub mod domain;
pub mod dsl;
mod error;
pub mod explain;
pub mod export;
pub mod expr;
pub mod fuzz;
pub mod model;
pub mod verify;

pub use domain::{Alternatives, Domain, ValueOrdering};
pub use error::{ModelError, Violation};
pub use explain::{ArgumentPolicy, InfluenceGraph, ReinforcementExplanation, Relation};
pub use expr::{CmpOp, Expr, TableExpr};
pub use model::{
    evaluate, validate_model, Assignment, CausalModel, Input, Intervention, ModelSpec, Scenario,
    ValidationReport, VariableDecl, VariableKind,
};
pub use verify::{PropertyReport, PropertyVerdict};

/// A directed edge between two named variables or arguments.
pub type Edge = (String, String);

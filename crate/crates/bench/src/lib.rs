//! Fixtures shared by the benchmarks.

use causal_forge::dsl::parse_model;
use causal_forge::fuzz::{generate_model_at, DomainProfile, EquationProfile, GeneratorParams};
use causal_forge::{CausalModel, Input};

pub const PIZZA: &str = include_str!("../../../models/pizza.cm");

pub fn pizza() -> CausalModel {
    parse_model(PIZZA).expect("fixture parses")
}

/// Generator settings for a benchmark-sized model.
pub fn params(max_vars: usize, profile: DomainProfile) -> GeneratorParams {
    GeneratorParams {
        seed: 7,
        models: 1,
        max_vars,
        max_parents: 3,
        domain_profile: profile,
        equation_profile: EquationProfile::Mixed,
        ..Default::default()
    }
}

/// A generated model with `max_vars` variables and its first input.
pub fn generated(max_vars: usize, profile: DomainProfile) -> (CausalModel, Input) {
    let m = generate_model_at(&params(max_vars, profile), 0);
    let u = m.enumerate_inputs().next().expect("finite domains are non-empty");
    (m, u)
}

//! Random model generation, reference oracles and verification campaigns.

mod campaign;
mod generate;
mod oracle;

pub use campaign::{
    cross_checks, parse_counterexample, replay, run_campaign, run_campaign_with, CampaignReport,
    CheckStats, Counterexample, CounterexampleError, Fault, COHERENCE_ORACLE,
    COHERENCE_ORACLE_MAX_ARGS, ORACLE_EQUIVALENCE, POLICY_CONSISTENCY, ROUND_TRIP,
};
pub use generate::{generate_model, generate_model_at, DomainProfile, EquationProfile, GeneratorParams};
pub use oracle::{brute_force_external_coherence, brute_force_internal_coherence, naive_evaluate};

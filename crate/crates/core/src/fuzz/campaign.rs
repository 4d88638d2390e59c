use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generate::{generate_with, sample_inputs, GeneratorParams};
use super::oracle::{brute_force_external_coherence, brute_force_internal_coherence, naive_evaluate};
use crate::dsl::{parse_model, serialize_model, ParseError};
use crate::explain::{rx_in, ArgumentPolicy, ExplanationContext};
use crate::verify::{accepted_arguments, check_external_coherence, check_internal_coherence, verify_properties, Property};
use crate::{CausalModel, Input, Intervention, ModelError, ReinforcementExplanation};

/// Largest explanation checked against the brute-force coherence oracle.
pub const COHERENCE_ORACLE_MAX_ARGS: usize = 8;

pub const ORACLE_EQUIVALENCE: &str = "oracle-equivalence";
pub const COHERENCE_ORACLE: &str = "coherence-oracle";
pub const ROUND_TRIP: &str = "round-trip";
pub const POLICY_CONSISTENCY: &str = "policy-consistency";

/// A deliberate bug applied to every forged explanation, for testing the
/// harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Moves the first attack of every explanation into the supports.
    AttackAsSupport,
}

impl Fault {
    fn apply(self, rx: &mut ReinforcementExplanation) {
        if self == Fault::AttackAsSupport {
            if let Some(e) = rx.attacks.pop_first() {
                rx.supports.insert(e);
            }
        }
    }
}

/// A failing case, replayable from its text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub check: String,
    pub model_index: usize,
    pub model_text: String,
    pub input: Input,
    pub interventions: Vec<Intervention>,
    pub detail: String,
}

impl Counterexample {
    /// The model in concrete syntax followed by `input` and `do` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}: {}\n{}", self.check, self.detail.replace('\n', " "), self.model_text);
        if !out.ends_with('\n') {
            out.push('\n');
        }
        let pairs: Vec<String> = self.input.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("input {}\n", pairs.join(" ")));
        if !self.interventions.is_empty() {
            let iv: Vec<String> = self.interventions.iter().map(ToString::to_string).collect();
            out.push_str(&format!("do {}\n", iv.join(" ")));
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CounterexampleError {
    #[error("missing `input` line")]
    MissingInput,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{0}")]
    Parse(#[from] ParseError),
}

/// Splits a counterexample file into its model, input and interventions.
pub fn parse_counterexample(text: &str) -> Result<(CausalModel, Input, Vec<Intervention>), CounterexampleError> {
    let mut model = String::new();
    let mut input = None;
    let mut interventions = Vec::new();
    for line in text.lines() {
        let t = line.trim_start();
        if let Some(rest) = t.strip_prefix("input ") {
            input = Some(Input::parse(rest)?);
        } else if let Some(rest) = t.strip_prefix("do ") {
            interventions.extend(Intervention::parse_list(rest)?);
        } else {
            model.push_str(line);
            model.push('\n');
        }
    }
    let input = input.ok_or(CounterexampleError::MissingInput)?;
    Ok((parse_model(&model)?, input, interventions))
}

/// Re-runs the property checks on a counterexample, returning each failing
/// property with its witness text.
pub fn replay(text: &str, fault: Fault) -> Result<Vec<(String, String)>, CounterexampleError> {
    let (model, input, interventions) = parse_counterexample(text)?;
    let ctx = ExplanationContext::new(&model, &input, &interventions)?;
    let mut rx = rx_in(&ctx, &ArgumentPolicy::All)?;
    fault.apply(&mut rx);
    let report = verify_properties(&model, &input, &rx)?;
    Ok(report
        .failures()
        .map(|f| {
            let w = f.witness.as_ref().map(ToString::to_string).unwrap_or_default();
            (f.property.name().to_string(), w)
        })
        .collect())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckStats {
    pub checked: usize,
    pub failed: usize,
    pub not_applicable: usize,
}

/// Aggregate result of a campaign. Equality ignores the duration.
#[derive(Debug, Clone, Default)]
pub struct CampaignReport {
    pub models: usize,
    pub inputs: usize,
    /// Keyed by property or cross-check name.
    pub checks: BTreeMap<String, CheckStats>,
    /// First counterexample per failing check, in model order.
    pub counterexamples: BTreeMap<String, Counterexample>,
    pub duration: Duration,
}

impl PartialEq for CampaignReport {
    fn eq(&self, other: &Self) -> bool {
        self.models == other.models
            && self.inputs == other.inputs
            && self.checks == other.checks
            && self.counterexamples == other.counterexamples
    }
}

impl CampaignReport {
    pub fn total_failures(&self) -> usize {
        self.checks.values().map(|c| c.failed).sum()
    }

    pub fn stats(&self, check: &str) -> CheckStats {
        self.checks.get(check).cloned().unwrap_or_default()
    }

    fn record(&mut self, check: &str, failure: Option<Counterexample>) {
        let s = self.checks.entry(check.to_string()).or_default();
        s.checked += 1;
        if let Some(cx) = failure {
            s.failed += 1;
            self.counterexamples.entry(check.to_string()).or_insert(cx);
        }
    }

    fn not_applicable(&mut self, check: &str) {
        self.checks.entry(check.to_string()).or_default().not_applicable += 1;
    }

    fn merge(&mut self, other: CampaignReport) {
        self.models += other.models;
        self.inputs += other.inputs;
        for (k, s) in other.checks {
            let e = self.checks.entry(k).or_default();
            e.checked += s.checked;
            e.failed += s.failed;
            e.not_applicable += s.not_applicable;
        }
        for (k, cx) in other.counterexamples {
            self.counterexamples.entry(k).or_insert(cx);
        }
    }
}

impl fmt::Display for CampaignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "models: {}", self.models)?;
        writeln!(f, "inputs: {}", self.inputs)?;
        writeln!(f, "{:<24}{:>10}{:>8}{:>8}", "check", "checked", "failed", "n/a")?;
        for (k, s) in &self.checks {
            writeln!(f, "{k:<24}{:>10}{:>8}{:>8}", s.checked, s.failed, s.not_applicable)?;
        }
        writeln!(f, "failures: {}", self.total_failures())?;
        writeln!(f, "duration: {:.3}s", self.duration.as_secs_f64())?;
        for (k, cx) in &self.counterexamples {
            writeln!(f, "\ncounterexample for {k} (model {}):", cx.model_index)?;
            f.write_str(&cx.to_text())?;
        }
        Ok(())
    }
}

fn random_interventions(model: &CausalModel, rng: &mut ChaCha8Rng) -> Vec<Intervention> {
    let vars = model.variables();
    let n = rng.random_range(1..=2.min(vars.len()));
    rand::seq::index::sample(rng, vars.len(), n)
        .into_iter()
        .map(|i| {
            let v = &vars[i];
            let d = model.domain(&v.domain).expect("validated");
            Intervention::new(v.name.clone(), d.values().choose(rng).expect("non-empty").clone())
        })
        .collect()
}

struct ModelRun<'a> {
    index: usize,
    model: &'a CausalModel,
    text: &'a str,
    fault: Fault,
    report: CampaignReport,
}

impl ModelRun<'_> {
    fn cx(&self, check: &str, input: &Input, interventions: &[Intervention], detail: String) -> Counterexample {
        Counterexample {
            check: check.to_string(),
            model_index: self.index,
            model_text: self.text.to_string(),
            input: input.clone(),
            interventions: interventions.to_vec(),
            detail,
        }
    }

    fn explain_and_verify(
        &mut self,
        input: &Input,
        interventions: &[Intervention],
    ) -> Result<ReinforcementExplanation, ModelError> {
        let ctx = ExplanationContext::new(self.model, input, interventions)?;
        let mut rx = rx_in(&ctx, &ArgumentPolicy::All)?;
        self.fault.apply(&mut rx);
        let report = verify_properties(self.model, input, &rx)?;
        for e in &report.entries {
            if !e.applicable {
                self.report.not_applicable(e.property.name());
                continue;
            }
            let failure = e.witness.as_ref().map(|w| self.cx(e.property.name(), input, interventions, w.to_string()));
            self.report.record(e.property.name(), failure);
        }

        // Restricted policies must agree with the full explanation on the arguments they keep.
        let mut policies = vec![ArgumentPolicy::Involved];
        if let Some(v) = self.model.endogenous().last() {
            policies.push(ArgumentPolicy::Focused(v.name.clone()));
        }
        for p in policies {
            let mut sub = rx_in(&ctx, &p)?;
            self.fault.apply(&mut sub);
            let keep = |e: &(String, String)| sub.arguments.contains(&e.0) && sub.arguments.contains(&e.1);
            let ok = sub.arguments.is_subset(&rx.arguments)
                && sub.attacks == rx.attacks.iter().filter(|e| keep(e)).cloned().collect()
                && sub.supports == rx.supports.iter().filter(|e| keep(e)).cloned().collect();
            let failure = (!ok).then(|| self.cx(POLICY_CONSISTENCY, input, interventions, format!("policy {p} disagrees")));
            self.report.record(POLICY_CONSISTENCY, failure);
        }
        Ok(rx)
    }

    fn check_oracle(&mut self, input: &Input, interventions: &[Intervention]) {
        let fast = self.model.evaluate(input, interventions);
        let slow = naive_evaluate(self.model, input, interventions);
        let failure = (fast != slow).then(|| {
            self.cx(ORACLE_EQUIVALENCE, input, interventions, format!("evaluate {fast:?} but naive {slow:?}"))
        });
        self.report.record(ORACLE_EQUIVALENCE, failure);
    }

    fn check_coherence_oracle(&mut self, rx: &ReinforcementExplanation, input: &Input, rng: &mut ChaCha8Rng) {
        if rx.arguments.len() > COHERENCE_ORACLE_MAX_ARGS {
            return;
        }
        let mut subsets = vec![rx.arguments.clone()];
        if let Ok(acc) = accepted_arguments(self.model, rx) {
            subsets.push(acc);
        }
        subsets.push(rx.arguments.iter().filter(|_| rng.random_bool(0.5)).cloned().collect());
        for s in subsets {
            let internal = check_internal_coherence(rx, &s).map(|w| w.is_none());
            let external = check_external_coherence(rx, &s).map(|w| w.is_none());
            let bi = brute_force_internal_coherence(rx, &s);
            let be = brute_force_external_coherence(rx, &s);
            let ok = internal == Ok(bi) && external == Ok(be);
            let failure = (!ok).then(|| {
                self.cx(
                    COHERENCE_ORACLE,
                    input,
                    &rx.context.interventions,
                    format!(
                        "subset {s:?}: reachability {internal:?}/{external:?}, enumeration {bi}/{be}"
                    ),
                )
            });
            self.report.record(COHERENCE_ORACLE, failure);
        }
    }
}

fn run_model(params: &GeneratorParams, index: usize, fault: Fault) -> CampaignReport {
    let mut rng = params.rng(index);
    let model = generate_with(params, index, &mut rng);
    let text = serialize_model(&model);
    let mut run = ModelRun {
        index,
        model: &model,
        text: &text,
        fault,
        report: CampaignReport {
            models: 1,
            ..Default::default()
        },
    };

    let round_trip = parse_model(&text);
    let failure = match &round_trip {
        Ok(m) if *m == model => None,
        Ok(_) => Some("re-parsed model differs".to_string()),
        Err(e) => Some(format!("serialized model does not parse: {e}")),
    }
    .map(|d| run.cx(ROUND_TRIP, &Input::default(), &[], d));
    run.report.record(ROUND_TRIP, failure);

    let inputs = sample_inputs(&model, params.exhaustive_cap, params.inputs_per_model, &mut rng);
    run.report.inputs = inputs.len();
    for input in &inputs {
        let scenarios = [Vec::new(), random_interventions(&model, &mut rng)];
        for iv in &scenarios {
            run.check_oracle(input, iv);
            match run.explain_and_verify(input, iv) {
                Ok(rx) => run.check_coherence_oracle(&rx, input, &mut rng),
                Err(e) => {
                    let cx = run.cx("engine-error", input, iv, e.to_string());
                    run.report.record("engine-error", Some(cx));
                }
            }
        }
    }
    for p in Property::ALL {
        run.report.checks.entry(p.name().to_string()).or_default();
    }
    run.report
}

/// Runs a campaign with an injected fault; see [`run_campaign`].
pub fn run_campaign_with(params: &GeneratorParams, fault: Fault) -> CampaignReport {
    let start = Instant::now();
    let parts: Vec<CampaignReport> = (0..params.models)
        .into_par_iter()
        .map(|i| run_model(params, i, fault))
        .collect();
    let mut report = CampaignReport::default();
    for p in parts {
        report.merge(p);
    }
    report.duration = start.elapsed();
    report
}

/// Generates `params.models` models and, for every sampled input with and
/// without a random intervention, forges and verifies the explanation and
/// cross-checks the evaluator, the coherence checks and serialization.
///
/// The report depends only on `params`, apart from its duration.
pub fn run_campaign(params: &GeneratorParams) -> CampaignReport {
    run_campaign_with(params, Fault::None)
}

/// Names of the checks a campaign records besides the properties.
pub fn cross_checks() -> BTreeSet<&'static str> {
    BTreeSet::from([ORACLE_EQUIVALENCE, COHERENCE_ORACLE, ROUND_TRIP, POLICY_CONSISTENCY])
}

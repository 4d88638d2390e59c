use std::io::Write;
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use causal_forge::explain::{extract_rx, influence_graph, ArgumentPolicy};
use causal_forge::export::{export_dot, export_text, ExplanationDocument};
use causal_forge::fuzz::{run_campaign, DomainProfile, EquationProfile, GeneratorParams};
use causal_forge::verify::verify_properties;
use causal_forge::{Input, Intervention};

use crate::{load_model, service, LoadedModel};

#[derive(Debug, Parser)]
#[command(name = "causal-forge", version, about = "Evaluate causal models and explain their outcomes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and report diagnostics.
    Validate { file: PathBuf },
    /// Print the value of every variable.
    Eval {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, value_enum, default_value_t = EvalFormat::Text)]
        format: EvalFormat,
    },
    /// Forge the reinforcement explanation for a scenario.
    Explain {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// all, involved or focused:<var>
        #[arg(long, default_value = "all", value_parser = parse_policy)]
        policy: ArgumentPolicy,
        #[arg(long, value_enum, default_value_t = ExplainFormat::Text)]
        format: ExplainFormat,
    },
    /// Check the explanation's properties; exits 1 if any applicable one fails.
    Verify {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value = "all", value_parser = parse_policy)]
        policy: ArgumentPolicy,
        #[arg(long, value_enum, default_value_t = EvalFormat::Text)]
        format: EvalFormat,
    },
    /// Run a randomized verification campaign; exits 1 on any failure.
    Fuzz(FuzzArgs),
    /// Serve the model over HTTP.
    Serve {
        file: PathBuf,
        #[arg(long, env = "CAUSAL_FORGE_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "CAUSAL_FORGE_BIND", default_value = "127.0.0.1")]
        bind: IpAddr,
    },
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    pub file: PathBuf,
    /// Exogenous values, e.g. `U1=1,U2=0`.
    #[arg(long, default_value = "")]
    pub input: String,
    /// Intervention `VAR=VALUE`; repeatable.
    #[arg(long = "do", value_name = "VAR=VALUE")]
    pub interventions: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub models: usize,
    /// binary, chainK or posetK
    #[arg(long, default_value = "binary")]
    pub profile: DomainProfile,
    /// expression, table or mixed
    #[arg(long, default_value = "mixed")]
    pub equations: EquationProfile,
    #[arg(long, default_value_t = 8)]
    pub max_vars: usize,
    #[arg(long, default_value_t = 3)]
    pub max_parents: usize,
    /// Inputs sampled per model when the input space exceeds the cap.
    #[arg(long, default_value_t = 64)]
    pub inputs_per_model: usize,
    /// Enumerate every input when there are at most this many.
    #[arg(long, default_value_t = 1024)]
    pub exhaustive_cap: usize,
    /// Write each counterexample to `<dir>/<check>.cm`.
    #[arg(long)]
    pub counterexamples: Option<PathBuf>,
}

impl FuzzArgs {
    pub fn params(&self) -> GeneratorParams {
        GeneratorParams {
            seed: self.seed,
            models: self.models,
            max_vars: self.max_vars,
            max_parents: self.max_parents,
            domain_profile: self.profile,
            equation_profile: self.equations,
            inputs_per_model: self.inputs_per_model,
            exhaustive_cap: self.exhaustive_cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExplainFormat {
    Json,
    Dot,
    Text,
}

fn parse_policy(s: &str) -> Result<ArgumentPolicy, String> {
    ArgumentPolicy::parse(s).ok_or_else(|| format!("unknown policy `{s}` (expected all, involved or focused:<var>)"))
}

/// How a command ended, mapped to an exit status by [`run`].
enum Outcome {
    Ok,
    /// Checks ran and something failed.
    Failed,
    /// Bad arguments or an unreadable model.
    Usage(String),
}

impl From<std::io::Error> for Outcome {
    fn from(e: std::io::Error) -> Self {
        Outcome::Usage(e.to_string())
    }
}

fn load(path: &Path) -> Result<LoadedModel, Outcome> {
    load_model(path).map_err(|e| Outcome::Usage(e.message))
}

fn scenario(args: &ScenarioArgs) -> Result<(LoadedModel, Input, Vec<Intervention>), Outcome> {
    let model = load(&args.file)?;
    let input = Input::parse(&args.input).map_err(|e| Outcome::Usage(format!("--input: {e}")))?;
    let mut ivs = Vec::new();
    for text in &args.interventions {
        ivs.push(Intervention::parse(text).map_err(|e| Outcome::Usage(format!("--do: {e}")))?);
    }
    // Surface bad variables or values as usage errors before doing any work.
    model
        .document
        .model
        .scenario(&input, &ivs)
        .map_err(|e| Outcome::Usage(e.to_string()))?;
    Ok((model, input, ivs))
}

fn usage<E: std::fmt::Display>(e: E) -> Outcome {
    Outcome::Usage(e.to_string())
}

fn validate(file: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, Outcome> {
    match load_model(file) {
        Ok(m) => {
            let model = &m.document.model;
            writeln!(
                out,
                "{}: ok ({} variables, {} exogenous, {} influences{})",
                file.display(),
                model.variables().len(),
                model.exogenous().count(),
                influence_graph(model).influences.len(),
                if model.is_binary() { ", binary" } else { "" }
            )?;
            Ok(Outcome::Ok)
        }
        Err(e) if e.syntax => Err(Outcome::Usage(e.message)),
        Err(e) => {
            writeln!(err, "{}", e.message)?;
            Ok(Outcome::Failed)
        }
    }
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, Outcome> {
    match command {
        Command::Validate { file } => validate(&file, out, err),
        Command::Eval { scenario: s, format } => {
            let (m, input, ivs) = scenario(&s)?;
            let a = m.document.model.evaluate(&input, &ivs).map_err(usage)?;
            match format {
                EvalFormat::Text => writeln!(out, "{a}")?,
                EvalFormat::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(a.as_map()).expect("maps serialize")
                )?,
            }
            Ok(Outcome::Ok)
        }
        Command::Explain {
            scenario: s,
            policy,
            format,
        } => {
            let (m, input, ivs) = scenario(&s)?;
            let model = &m.document.model;
            let rx = extract_rx(model, &input, &ivs, &policy).map_err(usage)?;
            match format {
                ExplainFormat::Text => write!(out, "{}", export_text(&rx))?,
                ExplainFormat::Dot => write!(out, "{}", export_dot(&rx))?,
                ExplainFormat::Json => {
                    let report = verify_properties(model, &input, &rx).map_err(usage)?;
                    let doc = ExplanationDocument::new(&m.name, model, &rx, &policy, report);
                    writeln!(out, "{}", doc.to_json())?;
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Verify {
            scenario: s,
            policy,
            format,
        } => {
            let (m, input, ivs) = scenario(&s)?;
            let model = &m.document.model;
            let rx = extract_rx(model, &input, &ivs, &policy).map_err(usage)?;
            let report = verify_properties(model, &input, &rx).map_err(usage)?;
            match format {
                EvalFormat::Text => write!(out, "{report}")?,
                EvalFormat::Json => writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).expect("reports serialize")
                )?,
            }
            Ok(if report.passed() { Outcome::Ok } else { Outcome::Failed })
        }
        Command::Fuzz(args) => {
            let params = args.params();
            params.validate().map_err(Outcome::Usage)?;
            let report = run_campaign(&params);
            write!(out, "{report}")?;
            if let Some(dir) = &args.counterexamples {
                std::fs::create_dir_all(dir)?;
                for (check, cx) in &report.counterexamples {
                    std::fs::write(dir.join(format!("{check}.cm")), cx.to_text())?;
                }
            }
            Ok(if report.total_failures() == 0 {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Command::Serve { file, port, bind } => {
            let m = load(&file)?;
            let addr = std::net::SocketAddr::new(bind, port);
            let runtime = tokio::runtime::Runtime::new()?;
            writeln!(err, "serving {} on http://{addr}", m.name)?;
            runtime.block_on(service::serve(m, addr))?;
            Ok(Outcome::Ok)
        }
    }
}

/// Runs a parsed command line and returns the process exit status:
/// 0 on success, 1 when checks fail, 2 on usage or input errors.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let outcome = execute(cli.command, out, err).unwrap_or_else(|e| e);
    match outcome {
        Outcome::Ok => 0,
        Outcome::Failed => 1,
        Outcome::Usage(msg) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let cli = Cli::try_parse_from(std::iter::once("causal-forge").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn pizza() -> String {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/pizza.cm").to_string()
    }

    #[test]
    fn eval_prints_assignment() {
        let (code, out, _) = run_args(&["eval", &pizza(), "--input", "U1=0,U2=0"]);
        assert_eq!(code, 0);
        assert_eq!(out, "U1=0 U2=0 V1=0 V2=0\n");
    }

    #[test]
    fn bad_input_is_usage_error() {
        let (code, _, err) = run_args(&["eval", &pizza(), "--input", "U1=2,U2=0"]);
        assert_eq!(code, 2);
        assert!(err.contains("not in domain"), "{err}");
        let (code, _, _) = run_args(&["eval", &pizza(), "--input", "U1=1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn policy_parser() {
        assert!(Cli::try_parse_from(["causal-forge", "explain", "x.cm", "--policy", "bogus"]).is_err());
        assert!(Cli::try_parse_from(["causal-forge", "explain", "x.cm", "--policy", "focused:V1"]).is_ok());
    }

    #[test]
    fn fuzz_rejects_bad_params() {
        let (code, _, err) = run_args(&["fuzz", "--models", "1", "--max-vars", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("max_vars"));
    }
}

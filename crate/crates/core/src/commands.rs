//! Command-line surface. Every command returns an [`Outcome`] instead of
//! printing or exiting, so it can be driven in-process.
//!
//! Exit codes: 0 success, 1 usage/parse/validation error, 2 infeasible
//! trace or failed ordering, 3 feasible trace violating ND1, 4 no attack
//! or witness exists.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::adversary::{weaker_on_corpus, AdversaryKind, CorpusEntry};
use crate::analysis::{sweep, SweepConfig, SweepRange};
use crate::attack::{
    adversary_verdict, assess, detect_nd1_violation, layout_inequalities, nd2_witness, plan_attack, AttackError,
    AttackRequest, Variant,
};
use crate::event::Trace;
use crate::feasibility::check_setting_feasible;
use crate::io::report::{AttackSummary, CheckReport, CheckStatus, Format, Report, WitnessSummary};
use crate::io::scenario::{AttackSection, Scenario};
use crate::io::table::sweep_csv;
use crate::io::tracefile::{parse_trace, write_trace};
use crate::io::LoadError;
use crate::params::{InaccuracyParams, SystemParams};
use crate::protocol::ProtocolSpec;
use crate::scalar::Scalar;
use crate::setting::Arithmetic;
use crate::sim::golden_corpus;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_ATTACK: i32 = 3;
pub const EXIT_NO_ATTACK: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "sndkit", version, about = "Check neighbor discovery traces and synthesize relay attacks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Require rational distances and match times exactly.
    #[arg(long, global = true, conflicts_with = "approx")]
    pub exact: bool,
    /// Approximate irrational distances and match times within EPSILON.
    #[arg(long, global = true, value_name = "EPSILON")]
    pub approx: Option<Scalar>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: FormatArg,
    /// Output file (check, sweep, order) or directory (attack, witness, corpus).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every feasibility checker and ND1 detection on a trace.
    Check {
        scenario: PathBuf,
        trace: PathBuf,
    },
    /// Synthesize a relay attack for the scenario's protocol.
    Attack {
        scenario: PathBuf,
        /// single-relay or wormhole; defaults to the scenario's [attack] section.
        #[arg(long)]
        variant: Option<Variant>,
        #[arg(long)]
        protocol: Option<ProtocolSpec>,
        #[arg(long)]
        adversary: Option<AdversaryKind>,
        /// Reference A-B distance; defaults to R.
        #[arg(long)]
        d_ab: Option<Scalar>,
        /// A-B distance in the attack setting.
        #[arg(long)]
        target: Option<Scalar>,
    },
    /// Emit a two-node run in which A discovers B at the given distance.
    Witness {
        scenario: PathBuf,
        #[arg(long)]
        distance: Scalar,
        #[arg(long)]
        protocol: Option<ProtocolSpec>,
    },
    /// Tabulate closed-form boundaries against attack synthesis.
    Sweep {
        /// Base parameters; a 100 m radio with 40 ns relays when absent.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// name=start:end:step, repeatable; the first varies slowest.
        #[arg(long = "range", required = true)]
        ranges: Vec<String>,
        #[arg(long, default_value = "single-relay")]
        variant: Variant,
        #[arg(long)]
        protocol: Option<ProtocolSpec>,
        #[arg(long)]
        adversary: Option<AdversaryKind>,
    },
    /// Test inclusion between two adversary models on a trace corpus.
    Order {
        /// Directory of <name>.toml scenario and <name>.jsonl trace pairs.
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        weaker: AdversaryKind,
        #[arg(long)]
        stronger: AdversaryKind,
        /// Turn adversarial broadcasts into directional sends first.
        #[arg(long)]
        rename: bool,
    },
    /// Write the built-in golden corpus.
    Corpus {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub arithmetic: Option<Arithmetic>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl From<&GlobalArgs> for Options {
    fn from(g: &GlobalArgs) -> Self {
        let arithmetic = match (&g.approx, g.exact) {
            (Some(epsilon), _) => Some(Arithmetic::Approx { epsilon: epsilon.clone() }),
            (None, true) => Some(Arithmetic::Exact),
            (None, false) => None,
        };
        let format = match g.format {
            FormatArg::Text => Format::Text,
            FormatArg::Structured => Format::Structured,
        };
        Options { arithmetic, format, out: g.out.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error("{path}: {source}")]
    Load { path: String, source: LoadError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CommandError + '_ {
    move |source| CommandError::Io { path: path.display().to_string(), source }
}

fn read(path: &Path) -> Result<String, CommandError> {
    fs::read_to_string(path).map_err(io_err(path))
}

fn write(path: &Path, text: &str) -> Result<(), CommandError> {
    fs::write(path, text).map_err(io_err(path))
}

pub fn load_scenario(path: &Path, arithmetic: Option<&Arithmetic>) -> Result<Scenario, CommandError> {
    let load = |source| CommandError::Load { path: path.display().to_string(), source };
    Scenario::parse_with(&read(path)?, arithmetic).map_err(load)
}

pub fn load_trace(path: &Path) -> Result<Trace, CommandError> {
    parse_trace(&read(path)?).map_err(|source| CommandError::Load { path: path.display().to_string(), source })
}

/// Setting, protocol and adversary feasibility plus ND1 detection.
pub fn check_trace(sc: &Scenario, trace: &Trace) -> CheckReport {
    CheckReport::new(
        sc.protocol.name().into(),
        sc.adversary.kind.name().into(),
        check_setting_feasible(trace, &sc.setting, &sc.params),
        sc.protocol.check(trace, &sc.setting, &sc.params),
        adversary_verdict(trace, &sc.setting, &sc.params, sc.adversary.kind),
        detect_nd1_violation(trace, &sc.setting),
    )
}

/// Latest event end in the trace, or 1 for an empty trace.
fn horizon_for(trace: &Trace, at_least: &Scalar) -> Scalar {
    trace.iter().map(|e| e.end()).fold(at_least.clone(), Scalar::max)
}

#[derive(Debug, Clone, Default)]
pub struct AttackArgs {
    pub variant: Option<Variant>,
    pub protocol: Option<ProtocolSpec>,
    pub adversary: Option<AdversaryKind>,
    pub d_ab: Option<Scalar>,
    pub target: Option<Scalar>,
}

/// Named output files, in a fixed order.
pub type Files = Vec<(String, String)>;

/// Plan and assess an attack. Files are produced only when one exists.
pub fn attack_from_scenario(sc: &Scenario, args: &AttackArgs) -> Result<(AttackSummary, Files), AttackError> {
    let section = sc.attack.clone();
    let variant = args
        .variant
        .or(section.as_ref().map(|s| s.variant))
        .unwrap_or(Variant::SingleRelay);
    let protocol = args.protocol.clone().unwrap_or_else(|| sc.protocol.clone());
    let adversary = args.adversary.unwrap_or(sc.adversary.kind);
    let d_ab = args
        .d_ab
        .clone()
        .or_else(|| section.as_ref().and_then(|s| s.d_ab.clone()))
        .unwrap_or_else(|| sc.params.nd_range.clone());
    let target = args.target.clone().or_else(|| section.as_ref().and_then(|s| s.target.clone()));
    let placement = if args.variant.is_some_and(|v| Some(v) != section.as_ref().map(|s| s.variant)) {
        None
    } else {
        section.as_ref().and_then(|s| s.placement.clone())
    };
    let request = AttackRequest { variant, d_ab: d_ab.clone(), placement, target, protocol: protocol.clone(), adversary };
    let mut summary = AttackSummary {
        variant: variant.name().into(),
        protocol: protocol.name().into(),
        adversary: adversary.name().into(),
        d_ab: d_ab.clone(),
        status: "infeasible".into(),
        reason: None,
        placement: None,
        deltas: None,
        inequalities: Vec::new(),
        assessment: None,
        files: Vec::new(),
    };
    let plan = match plan_attack(&request, &sc.params) {
        Ok(plan) => plan,
        Err(AttackError::PlacementInfeasible(reason) | AttackError::NoWitness(reason)) => {
            if let Some(p) = &request.placement {
                summary.inequalities = layout_inequalities(variant, &d_ab, p, &sc.params).unwrap_or_default();
            }
            summary.reason = Some(reason);
            return Ok((summary, Vec::new()));
        }
        Err(e) => return Err(e),
    };
    let assessment = assess(&plan, &sc.params);
    summary.placement = Some(plan.placement.clone());
    summary.deltas = Some(plan.deltas.clone());
    summary.inequalities = plan.inequalities.clone();
    if !assessment.success {
        let failed: Vec<&str> = [
            ("setting", &assessment.setting),
            ("protocol", &assessment.protocol),
            ("adversary", &assessment.adversary),
        ]
        .into_iter()
        .filter(|(_, v)| !v.ok)
        .map(|(n, _)| n)
        .collect();
        summary.reason = Some(if failed.is_empty() {
            "relay trace does not violate ND1".into()
        } else {
            format!("relay trace fails {} feasibility", failed.join(", "))
        });
        summary.assessment = Some(assessment);
        return Ok((summary, Vec::new()));
    }
    summary.status = "attack".into();
    summary.assessment = Some(assessment);

    let attack_sc = Scenario {
        params: sc.params.clone(),
        setting: plan.attack.clone(),
        protocol: protocol.clone(),
        adversary: crate::adversary::AdversaryModel::new(adversary, sc.params.delta_relay.clone()),
        horizon: horizon_for(&plan.relay_trace, &sc.horizon),
        attack: Some(AttackSection {
            variant,
            d_ab: Some(d_ab),
            target: None,
            placement: Some(plan.placement.clone()),
        }),
    };
    let reference_sc = Scenario {
        setting: plan.reference.clone(),
        horizon: horizon_for(&plan.base_trace, &sc.horizon),
        attack: None,
        ..attack_sc.clone()
    };
    let files: Files = vec![
        ("attack-scenario.toml".into(), attack_sc.to_toml()),
        ("reference-scenario.toml".into(), reference_sc.to_toml()),
        ("base.jsonl".into(), write_trace(&plan.base_trace)),
        ("relay.jsonl".into(), write_trace(&plan.relay_trace)),
    ];
    summary.files = files.iter().map(|(n, _)| n.clone()).chain(["summary.json".to_owned()]).collect();
    Ok((summary, files))
}

/// A two-node run at distance `d`, checked against every predicate.
pub fn witness_from_scenario(
    sc: &Scenario,
    protocol: Option<&ProtocolSpec>,
    d: &Scalar,
) -> Result<(WitnessSummary, Files), AttackError> {
    let protocol = protocol.cloned().unwrap_or_else(|| sc.protocol.clone());
    let (setting, trace) = nd2_witness(&protocol, d, &sc.params)?;
    let wsc = Scenario {
        params: sc.params.clone(),
        setting,
        protocol: protocol.clone(),
        adversary: sc.adversary.clone(),
        horizon: horizon_for(&trace, &sc.horizon),
        attack: None,
    };
    let checks = check_trace(&wsc, &trace);
    if checks.status != CheckStatus::Ok {
        return Err(AttackError::NoWitness(format!("generated run fails its own checks:\n{}", checks.text())));
    }
    let files: Files =
        vec![("witness-scenario.toml".into(), wsc.to_toml()), ("witness.jsonl".into(), write_trace(&trace))];
    let summary = WitnessSummary {
        protocol: protocol.name().into(),
        distance: d.clone(),
        checks,
        files: files.iter().map(|(n, _)| n.clone()).chain(["summary.json".to_owned()]).collect(),
    };
    Ok((summary, files))
}

fn write_dir(dir: &Path, files: &Files, summary_json: &str) -> Result<(), CommandError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (name, text) in files {
        write(&dir.join(name), text)?;
    }
    write(&dir.join("summary.json"), summary_json)
}

fn emit(opts: &Options, report: &impl Report, code: i32) -> Result<Outcome, CommandError> {
    let text = report.render(opts.format);
    if let Some(path) = &opts.out {
        write(path, &text)?;
    }
    Ok(Outcome::new(code, text))
}

/// Base parameters for sweeps without a scenario: metres and nanoseconds.
pub fn default_sweep_params() -> SystemParams {
    SystemParams::new(Scalar::ratio(3, 10), Scalar::ratio(3, 10), Scalar::from_int(100), Scalar::from_int(40), Scalar::one())
        .expect("valid defaults")
}

/// Load every `<name>.toml` + `<name>.jsonl` pair in `dir`, sorted by name.
pub fn load_corpus(dir: &Path, arithmetic: Option<&Arithmetic>) -> Result<Vec<CorpusEntry>, CommandError> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok())
        .filter_map(|e| {
            let p = e.path();
            (p.extension()? == "toml").then(|| p.file_stem()?.to_str().map(String::from)).flatten()
        })
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let sc = load_scenario(&dir.join(format!("{name}.toml")), arithmetic)?;
            let trace = load_trace(&dir.join(format!("{name}.jsonl")))?;
            Ok(CorpusEntry { name, setting: sc.setting, params: sc.params, trace })
        })
        .collect()
}

/// Scenario files for corpus entries; the protocol and adversary recorded
/// are placeholders since ordering checks use only setting and params.
pub fn corpus_files(corpus: &[CorpusEntry]) -> Files {
    let mut out = Vec::new();
    for entry in corpus {
        let sc = Scenario::new(
            entry.params.clone(),
            entry.setting.clone(),
            ProtocolSpec::Pt,
            AdversaryKind::DyT,
            horizon_for(&entry.trace, &Scalar::one()),
        );
        out.push((format!("{}.toml", entry.name), sc.to_toml()));
        out.push((format!("{}.jsonl", entry.name), write_trace(&entry.trace)));
    }
    out
}

fn run_inner(cli: &Cli) -> Result<Outcome, CommandError> {
    let opts = Options::from(&cli.global);
    let arith = opts.arithmetic.as_ref();
    match &cli.command {
        Command::Check { scenario, trace } => {
            let sc = load_scenario(scenario, arith)?;
            let trace = load_trace(trace)?;
            let report = check_trace(&sc, &trace);
            emit(&opts, &report, report.status.exit_code())
        }
        Command::Attack { scenario, variant, protocol, adversary, d_ab, target } => {
            let sc = load_scenario(scenario, arith)?;
            let args = AttackArgs {
                variant: *variant,
                protocol: protocol.clone(),
                adversary: *adversary,
                d_ab: d_ab.clone(),
                target: target.clone(),
            };
            let (mut summary, files) =
                attack_from_scenario(&sc, &args).map_err(|e| CommandError::Invalid(e.to_string()))?;
            match &opts.out {
                Some(dir) if summary.succeeded() => {
                    let json = summary.render(Format::Structured);
                    write_dir(dir, &files, &json)?;
                }
                _ => summary.files.clear(),
            }
            let code = if summary.succeeded() { EXIT_OK } else { EXIT_NO_ATTACK };
            Ok(Outcome::new(code, summary.render(opts.format)))
        }
        Command::Witness { scenario, distance, protocol } => {
            let sc = load_scenario(scenario, arith)?;
            match witness_from_scenario(&sc, protocol.as_ref(), distance) {
                Ok((mut summary, files)) => {
                    match &opts.out {
                        Some(dir) => write_dir(dir, &files, &summary.render(Format::Structured))?,
                        None => summary.files.clear(),
                    }
                    Ok(Outcome::new(EXIT_OK, summary.render(opts.format)))
                }
                Err(e @ AttackError::OutOfRange { .. }) => {
                    Ok(Outcome { code: EXIT_NO_ATTACK, stdout: String::new(), stderr: format!("{e}\n") })
                }
                Err(e) => Err(CommandError::Invalid(e.to_string())),
            }
        }
        Command::Sweep { scenario, ranges, variant, protocol, adversary } => {
            let (params, base_protocol, base_adversary) = match scenario {
                Some(p) => {
                    let sc = load_scenario(p, arith)?;
                    (sc.params, sc.protocol, sc.adversary.kind)
                }
                None => (default_sweep_params(), ProtocolSpec::Pt, AdversaryKind::Relay),
            };
            let protocol = protocol.clone().unwrap_or(base_protocol);
            let ranges = ranges
                .iter()
                .map(|r| r.parse::<SweepRange>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CommandError::Invalid(e.to_string()))?;
            let config = SweepConfig {
                params,
                inacc: protocol.inaccuracy().cloned().unwrap_or_else(InaccuracyParams::exact),
                protocol,
                variant: *variant,
                adversary: adversary.unwrap_or(base_adversary),
                ranges,
            };
            let rows = sweep(&config).map_err(|e| CommandError::Invalid(e.to_string()))?;
            let names: Vec<&str> = config.ranges.iter().map(|r| r.param.name()).collect();
            let table = sweep_csv(&rows, &names);
            if let Some(path) = &opts.out {
                write(path, &table)?;
            }
            Ok(Outcome::new(EXIT_OK, table))
        }
        Command::Order { corpus, weaker, stronger, rename } => {
            let entries = load_corpus(corpus, arith)?;
            let report = weaker_on_corpus(*weaker, *stronger, &entries, *rename);
            let code = if report.holds() { EXIT_OK } else { EXIT_INFEASIBLE };
            emit(&opts, &report, code)
        }
        Command::Corpus { seed } => {
            let dir = opts
                .out
                .as_ref()
                .ok_or_else(|| CommandError::Invalid("corpus needs --out <directory>".into()))?;
            let corpus = golden_corpus(&mut ChaCha8Rng::seed_from_u64(*seed));
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            let files = corpus_files(&corpus);
            for (name, text) in &files {
                write(&dir.join(name), text)?;
            }
            Ok(Outcome::new(EXIT_OK, format!("wrote {} traces to {}\n", corpus.len(), dir.display())))
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    run_inner(cli).unwrap_or_else(|e| Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") })
}

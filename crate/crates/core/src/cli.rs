//! Command-line front end. [`run`] is pure: it returns the exit code and
//! both output streams instead of printing.

use crate::derive::{check, derivation_from_json, derivation_to_json};
use crate::iso::{isomorphic_with, IsoError, IsoVerdict};
use crate::lambda::{beta_eta_nf, beta_nf, compose_terms, fhp_inverse, fhp_term, recognize_fhp, Term, DEFAULT_BETA_BUDGET};
use crate::paths::{agrees, agrees_s, agrees_set, format_path_set, Frame, PathKind};
use crate::preorder::{leq, LeqKind, LeqProof};
use crate::rewrite::{normalize_with, RewriteConfig, RewriteError, RewriteStep, Strategy};
use crate::syntax::{parse_context, parse_path, parse_path_set, parse_term, parse_type, AnyPath, ParseError};
use crate::witness::WitnessError;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;
pub const EXIT_INTERNAL: i32 = 70;

#[derive(Parser, Debug)]
#[command(name = "tyiso", version, about = "Normalisation and isomorphism of intersection and union types")]
struct Cli {
    /// Rewriting strategy: lo, ri or random.
    #[arg(long, global = true, default_value = "lo", value_parser = parse_strategy_name)]
    strategy: String,
    /// Seed for the random strategy.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    step_budget: u64,
    #[arg(long, global = true, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    spine_cap: u64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

fn parse_strategy_name(s: &str) -> Result<String, String> {
    s.parse::<Strategy>().map(|_| s.to_string())
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the normal form of a type.
    Normalize {
        ty: String,
        /// Print the rewrite trace as JSON.
        #[arg(long)]
        trace: bool,
    },
    /// Compare two types; exit 0 isomorphic, 1 not isomorphic, 2 unknown.
    Iso { a: String, b: String },
    /// Print the witness pair of two isomorphic types as JSON.
    Witness { a: String, b: String },
    /// Decide the preorder between basic intersections or unions.
    Leq {
        a: String,
        b: String,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Check a typing derivation stored as JSON.
    CheckDerivation { file: String },
    /// Finite hereditary permutations.
    Fhp {
        #[command(subcommand)]
        op: FhpCmd,
    },
    /// Paths and contexts.
    Paths {
        #[command(subcommand)]
        op: PathsCmd,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Meet,
    Join,
}

#[derive(Subcommand, Debug)]
enum FhpCmd {
    /// Print the shape of a term, if it is a permutator.
    Recognize { term: String },
    /// Print the inverse permutator.
    Invert { term: String },
    /// Print the β-normal form of `λx. P (Q x)`.
    Compose { p: String, q: String },
    /// Print the βη-normal form of a term, or of the composition of several.
    Nf {
        #[arg(required = true)]
        terms: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PathsCmd {
    /// Whether a type agrees with a path (`RL`), a box path (`RL#`) or a set (`{L, RL}`).
    Agree { ty: String, path: String },
    /// The path of a one-hole context written with `[]`.
    Context {
        context: String,
        #[arg(long, value_enum)]
        kind: PathKindArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathKindArg {
    D,
    S,
}

/// Outcome of a command: exit code, standard output, diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { code: 0, stdout, stderr: String::new() }
    }

    fn with_code(code: i32, stdout: String) -> Self {
        Output { code, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Output { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

enum Failure {
    Parse(ParseError),
    Internal(String),
    NoInput(String),
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure::Parse(e)
    }
}

impl From<RewriteError> for Failure {
    fn from(e: RewriteError) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<IsoError> for Failure {
    fn from(e: IsoError) -> Self {
        Failure::Internal(e.to_string())
    }
}

impl From<WitnessError> for Failure {
    fn from(e: WitnessError) -> Self {
        Failure::Internal(e.to_string())
    }
}

struct Config {
    strategy: Strategy,
    rewrite: RewriteConfig,
    json: bool,
}

pub fn run<S: AsRef<str>>(argv: &[S]) -> Output {
    let args = std::iter::once("tyiso").chain(argv.iter().map(AsRef::as_ref));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() { Output { code: EXIT_USAGE, stdout: String::new(), stderr: text } } else { Output::ok(text) };
        }
    };
    let strategy = match cli.strategy.parse::<Strategy>().expect("validated by clap") {
        Strategy::Random(_) => Strategy::Random(cli.seed.unwrap_or(0)),
        s => s,
    };
    let cfg = Config {
        strategy,
        rewrite: RewriteConfig { step_budget: cli.step_budget as usize, spine_cap: cli.spine_cap as usize },
        json: cli.json,
    };
    match dispatch(&cli.cmd, &cfg) {
        Ok(out) => out,
        Err(Failure::Parse(e)) => Output::fail(EXIT_PARSE, e),
        Err(Failure::Internal(e)) => Output::fail(EXIT_INTERNAL, e),
        Err(Failure::NoInput(e)) => Output::fail(EXIT_NOINPUT, e),
    }
}

fn dispatch(cmd: &Cmd, cfg: &Config) -> Result<Output, Failure> {
    match cmd {
        Cmd::Normalize { ty, trace } => normalize_cmd(ty, *trace, cfg),
        Cmd::Iso { a, b } => iso_cmd(a, b, cfg),
        Cmd::Witness { a, b } => witness_cmd(a, b, cfg),
        Cmd::Leq { a, b, kind } => leq_cmd(a, b, *kind),
        Cmd::CheckDerivation { file } => check_cmd(file),
        Cmd::Fhp { op } => fhp_cmd(op),
        Cmd::Paths { op } => paths_cmd(op),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialise");
    s.push('\n');
    s
}

fn frame_name(f: &Frame) -> &'static str {
    match f {
        Frame::ArrowLhs(_) => "ArrowLhs",
        Frame::ArrowRhs(_) => "ArrowRhs",
        Frame::AndLeft(_) => "AndLeft",
        Frame::AndRight(_) => "AndRight",
        Frame::OrLeft(_) => "OrLeft",
        Frame::OrRight(_) => "OrRight",
    }
}

fn step_json(s: &RewriteStep) -> Value {
    let position: Vec<&str> = s.redex.context.frames.iter().map(frame_name).collect();
    let mut v = json!({
        "rule": s.redex.rule.name(),
        "position": position,
        "before": s.before.to_string(),
        "after": s.after.to_string(),
    });
    if let Some(e) = &s.redex.erasure {
        v["paths"] = json!(e.paths.iter().map(|p| p.to_string()).collect::<Vec<_>>());
    }
    v
}

fn normalize_cmd(src: &str, trace: bool, cfg: &Config) -> Result<Output, Failure> {
    let t = parse_type(src)?;
    let (nf, tr) = normalize_with(&t, cfg.strategy, &cfg.rewrite)?;
    if trace || cfg.json {
        let mut v = json!({"schema": 1, "input": t.to_string(), "normal": nf.to_string()});
        if trace {
            v["steps"] = json!(tr.steps.iter().map(step_json).collect::<Vec<_>>());
        }
        return Ok(Output::ok(pretty(&v)));
    }
    Ok(Output::ok(format!("{nf}\n")))
}

fn nf_text(t: &Term) -> String {
    beta_eta_nf(t, DEFAULT_BETA_BUDGET).map(|n| n.to_string()).unwrap_or_else(|_| t.to_string())
}

fn iso_cmd(a: &str, b: &str, cfg: &Config) -> Result<Output, Failure> {
    let (ta, tb) = (parse_type(a)?, parse_type(b)?);
    let verdict = isomorphic_with(&ta, &tb, cfg.strategy, &cfg.rewrite)?;
    let code = match &verdict {
        IsoVerdict::Isomorphic(_) => 0,
        IsoVerdict::NotIsomorphic(_) => 1,
        IsoVerdict::Unknown(_) => 2,
    };
    if cfg.json {
        let mut v = json!({"schema": 1, "verdict": verdict.name(), "a": ta.to_string(), "b": tb.to_string()});
        match &verdict {
            IsoVerdict::Isomorphic(w) => {
                v["forward"] = json!(nf_text(&w.forward_term));
                v["backward"] = json!(nf_text(&w.backward_term));
            }
            IsoVerdict::NotIsomorphic(r) => {
                v["normal_a"] = json!(r.normal_a.to_string());
                v["normal_b"] = json!(r.normal_b.to_string());
                v["reason"] = json!(r.reason());
            }
            IsoVerdict::Unknown(r) => {
                v["normal_a"] = json!(r.normal_a.to_string());
                v["normal_b"] = json!(r.normal_b.to_string());
                v["widths"] = json!(r.profile.widths);
                v["pairing"] = json!(r.pairing);
            }
        }
        return Ok(Output::with_code(code, pretty(&v)));
    }
    let text = match &verdict {
        IsoVerdict::Isomorphic(w) => format!("Isomorphic\nforward: {}\nbackward: {}\n", nf_text(&w.forward_term), nf_text(&w.backward_term)),
        IsoVerdict::NotIsomorphic(r) => format!("NotIsomorphic: {}\n{}\n{}\n", r.reason(), r.normal_a, r.normal_b),
        IsoVerdict::Unknown(r) => format!("Unknown\n{}\n{}\n", r.normal_a, r.normal_b),
    };
    Ok(Output::with_code(code, text))
}

fn witness_cmd(a: &str, b: &str, cfg: &Config) -> Result<Output, Failure> {
    let (ta, tb) = (parse_type(a)?, parse_type(b)?);
    let verdict = isomorphic_with(&ta, &tb, cfg.strategy, &cfg.rewrite)?;
    let IsoVerdict::Isomorphic(w) = verdict else {
        let code = if matches!(verdict, IsoVerdict::NotIsomorphic(_)) { 1 } else { 2 };
        return Ok(Output { code, stdout: String::new(), stderr: format!("no witness: {}\n", verdict.name()) });
    };
    let (_, tra) = normalize_with(&ta, cfg.strategy, &cfg.rewrite)?;
    let (_, trb) = normalize_with(&tb, cfg.strategy, &cfg.rewrite)?;
    let v = json!({
        "schema": 1,
        "source": w.source.to_string(),
        "target": w.target.to_string(),
        "forward": w.forward_term.to_string(),
        "backward": w.backward_term.to_string(),
        "forward_nf": nf_text(&w.forward_term),
        "backward_nf": nf_text(&w.backward_term),
        "derivations": {"forward": derivation_to_json(&w.forward), "backward": derivation_to_json(&w.backward)},
        "steps": {
            "source": tra.steps.iter().map(step_json).collect::<Vec<_>>(),
            "target": trb.steps.iter().map(step_json).collect::<Vec<_>>(),
        },
    });
    Ok(Output::ok(pretty(&v)))
}

fn proof_json(p: &LeqProof) -> Value {
    json!({
        "kind": format!("{:?}", p.kind),
        "lhs": p.lhs.to_string(),
        "rhs": p.rhs.to_string(),
        "rule": format!("{:?}", p.rule),
        "extra": p.extra,
        "pairing": p.pairing,
        "children": p.children.iter().map(|(a, b)| json!([proof_json(a), proof_json(b)])).collect::<Vec<_>>(),
        "e": p.e_set().iter().map(|q| q.to_string()).collect::<Vec<_>>(),
    })
}

fn leq_cmd(a: &str, b: &str, kind: KindArg) -> Result<Output, Failure> {
    let (ta, tb) = (parse_type(a)?, parse_type(b)?);
    let kind = match kind {
        KindArg::Meet => LeqKind::Meet,
        KindArg::Join => LeqKind::Join,
    };
    match leq(&ta, &tb, kind) {
        Ok(p) => Ok(Output::ok(pretty(&json!({"schema": 1, "related": true, "e": format_path_set(p.e_set()), "proof": proof_json(&p)})))),
        Err(e) => Ok(Output::with_code(1, pretty(&json!({"schema": 1, "related": false, "reason": e.to_string()})))),
    }
}

fn check_cmd(file: &str) -> Result<Output, Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| Failure::NoInput(format!("{file}: {e}")))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Parse(ParseError { message: e.to_string(), span: Default::default() }))?;
    let d = derivation_from_json(&v).map_err(|e| match e {
        crate::derive::JsonError::Parse(p) => Failure::Parse(p),
        other => Failure::Parse(ParseError { message: other.to_string(), span: Default::default() }),
    })?;
    match check(&d) {
        Ok(()) => Ok(Output::ok(format!("ok: {}\n", d.concl))),
        Err(e) => Ok(Output { code: 1, stdout: String::new(), stderr: format!("invalid derivation: {e}\n") }),
    }
}

fn fhp_cmd(op: &FhpCmd) -> Result<Output, Failure> {
    match op {
        FhpCmd::Recognize { term } => {
            let t = parse_term(term)?;
            match recognize_fhp(&t) {
                Ok(shape) => Ok(Output::ok(format!("{shape}\n"))),
                Err(e) => Ok(Output { code: 1, stdout: String::new(), stderr: format!("{e}\n") }),
            }
        }
        FhpCmd::Invert { term } => {
            let t = parse_term(term)?;
            match recognize_fhp(&t) {
                Ok(shape) => Ok(Output::ok(format!("{}\n", fhp_term(&fhp_inverse(&shape))))),
                Err(e) => Ok(Output { code: 1, stdout: String::new(), stderr: format!("{e}\n") }),
            }
        }
        FhpCmd::Compose { p, q } => {
            let c = compose_terms(&parse_term(p)?, &parse_term(q)?);
            let n = beta_nf(&c, DEFAULT_BETA_BUDGET).map_err(|e| Failure::Internal(e.to_string()))?;
            Ok(Output::ok(format!("{n}\n")))
        }
        FhpCmd::Nf { terms } => {
            let ts = terms.iter().map(|s| parse_term(s)).collect::<Result<Vec<_>, _>>()?;
            let t = ts.into_iter().reduce(|p, q| compose_terms(&p, &q)).expect("at least one term");
            let n = beta_eta_nf(&t, DEFAULT_BETA_BUDGET).map_err(|e| Failure::Internal(e.to_string()))?;
            Ok(Output::ok(format!("{n}\n")))
        }
    }
}

fn paths_cmd(op: &PathsCmd) -> Result<Output, Failure> {
    match op {
        PathsCmd::Agree { ty, path } => {
            let t = parse_type(ty)?;
            let ok = if path.trim_start().starts_with('{') || path.contains(',') {
                agrees_set(&t, &parse_path_set(path)?)
            } else {
                match parse_path(path)? {
                    AnyPath::D(p) => agrees(&t, &p),
                    AnyPath::S(p) => agrees_s(&t, &p),
                }
            };
            Ok(Output::ok(format!("{ok}\n")))
        }
        PathsCmd::Context { context, kind } => {
            let c = parse_context(context)?;
            let kind = match kind {
                PathKindArg::D => PathKind::D,
                PathKindArg::S => PathKind::S,
            };
            match crate::paths::path_of_context(&c, kind) {
                Some(p) => Ok(Output::ok(format!("{p}\n"))),
                None => Ok(Output::with_code(1, "undefined\n".to_string())),
            }
        }
    }
}

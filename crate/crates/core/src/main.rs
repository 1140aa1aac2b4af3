use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fairlab::check::{check_equal, check_refines, diagnostics, Verdict};
use fairlab::crosscheck::{compare_terms, exhaustive_terms};
use fairlab::denote::{Evaluator, DEFAULT_CAP};
use fairlab::error::EvalError;
use fairlab::laws::{self, revalidate, run_suite, ReportStatus, SuiteConfig};
use fairlab::oracle::Budget;
use fairlab::scenarios::{all_examples, run_example};
use fairlab::state::{StateSpace, Status, Window};
use fairlab::syntax::{parse, Command};

#[derive(Parser)]
#[command(name = "fairlab", version, about = "Trace semantics and law checker for fair concurrent refinement")]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Window, sampling and output settings. Unset values take per-command
/// defaults.
#[derive(Args)]
struct RunArgs {
    /// Number of program states |Σ|.
    #[arg(long, global = true)]
    states: Option<usize>,
    /// Longest finite trace N.
    #[arg(long, global = true)]
    bound: Option<usize>,
    /// Longest lasso prefix K.
    #[arg(long = "lasso-prefix", global = true)]
    lasso_prefix: Option<usize>,
    /// Longest lasso period L.
    #[arg(long = "lasso-period", global = true)]
    lasso_period: Option<usize>,
    /// Bindings per quantified law.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Depth of generated terms.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Automaton node cap per subterm.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: usize,
    /// Read terms from a file, one per line.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Summarise the window denotation of a term.
    Eval {
        term: Option<String>,
        /// List every observation.
        #[arg(long)]
        traces: bool,
    },
    /// Check two terms for equality up to the window.
    Equal { lhs: Option<String>, rhs: Option<String> },
    /// Check `lhs ⊑ rhs` up to the window.
    Refines { lhs: Option<String>, rhs: Option<String> },
    /// Run the law catalog.
    Laws {
        /// Run a single law (or mutant) by name.
        #[arg(long)]
        only: Option<String>,
        /// Also run the mutated laws, which must be refuted.
        #[arg(long)]
        mutants: bool,
    },
    /// Run the motivating examples.
    Examples,
    /// Compare the engine with the membership oracle on every small term.
    OracleCheck,
}

/// A failure that maps to exit code 2.
struct Usage(String);

impl From<EvalError> for Usage {
    fn from(e: EvalError) -> Self {
        Usage(e.to_string())
    }
}

struct Defaults {
    states: usize,
    window: (usize, usize, usize),
    depth: usize,
}

const GENERAL: Defaults = Defaults {
    states: 2,
    window: (5, 3, 3),
    depth: 3,
};

const ORACLE: Defaults = Defaults {
    states: 1,
    window: (3, 1, 2),
    depth: 2,
};

impl RunArgs {
    fn space(&self, d: &Defaults) -> Result<StateSpace, Usage> {
        StateSpace::new(self.states.unwrap_or(d.states)).map_err(|e| Usage(e.to_string()))
    }

    fn window(&self, d: &Defaults) -> Result<Window, Usage> {
        Window::new(
            self.bound.unwrap_or(d.window.0),
            self.lasso_prefix.unwrap_or(d.window.1),
            self.lasso_period.unwrap_or(d.window.2),
        )
        .map_err(|e| Usage(e.to_string()))
    }

    fn evaluator(&self) -> Result<Evaluator, Usage> {
        Ok(Evaluator::with_cap(self.space(&GENERAL)?, self.window(&GENERAL)?, self.cap))
    }

    /// Terms from argv, or from `--file` when given.
    fn terms(&self, argv: &[&Option<String>]) -> Result<Vec<Command>, Usage> {
        let sources: Vec<String> = match &self.file {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| Usage(format!("{}: {e}", path.display())))?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect(),
            None => argv.iter().filter_map(|t| (*t).clone()).collect(),
        };
        if sources.len() != argv.len() {
            return Err(Usage(format!("expected {} term(s), got {}", argv.len(), sources.len())));
        }
        sources
            .iter()
            .map(|s| {
                parse(s).map_err(|e| {
                    let caret = if e.line == 1 {
                        format!("\n  {s}\n  {}^", " ".repeat(e.column.saturating_sub(1)))
                    } else {
                        String::new()
                    };
                    Usage(format!("parse error at {e}{caret}"))
                })
            })
            .collect()
    }
}

fn emit(format: Format, text: &str, value: serde_json::Value) {
    match format {
        Format::Text => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("serializable")),
    }
}

fn verdict_json(v: &Verdict) -> serde_json::Value {
    json!({
        "relation": v.relation,
        "window": v.window,
        "witness": v.witness.as_ref().map(|w| json!({"side": w.side, "observation": w.observation.to_string()})),
    })
}

fn eval(run: &RunArgs, term: &Option<String>, traces: bool) -> Result<bool, Usage> {
    let c = run.terms(&[term])?.remove(0);
    let mut ev = run.evaluator()?;
    let d = ev.denote(&c)?;
    let diag = diagnostics(&d);
    let count = |s: Status| d.traces().filter(|t| t.status == s).count();
    let (t, a, i) = (count(Status::Terminated), count(Status::Aborted), count(Status::Incomplete));
    let mut text = format!(
        "{c}\nwindow {} over {} states\ntraces: {t} terminated, {a} aborted, {i} incomplete\nlassos: {}\n",
        d.window(),
        d.space().size(),
        d.lasso_count()
    );
    let horizon = diag.progress_horizon.map_or("-".to_string(), |h| h.to_string());
    let _ = writeln!(
        text,
        "terminates: {}, aborts: {}, infinite: {}, progress horizon: {horizon}",
        diag.has_terminated, diag.has_aborted, diag.has_lasso
    );
    let mut members = Vec::new();
    if traces {
        members.extend(d.traces().map(|t| t.to_string()));
        members.extend(d.lassos().map(|l| l.to_string()));
        for m in &members {
            let _ = writeln!(text, "  {m}");
        }
    }
    let mut value = json!({
        "term": c.to_string(),
        "window": d.window(),
        "states": d.space().size(),
        "traces": {"terminated": t, "aborted": a, "incomplete": i},
        "lassos": d.lasso_count(),
        "diagnostics": diag,
    });
    if traces {
        value["members"] = json!(members);
    }
    emit(run.format, &text, value);
    Ok(true)
}

fn compare(run: &RunArgs, lhs: &Option<String>, rhs: &Option<String>, refines: bool) -> Result<bool, Usage> {
    let mut terms = run.terms(&[lhs, rhs])?;
    let (r, l) = (terms.pop().unwrap(), terms.pop().unwrap());
    let mut ev = run.evaluator()?;
    let v = if refines {
        check_refines(&mut ev, &l, &r)?
    } else {
        check_equal(&mut ev, &l, &r)?
    };
    let ok = if refines { v.holds_refines() } else { v.holds_equal() };
    emit(run.format, &format!("{v}\n"), verdict_json(&v));
    Ok(ok)
}

fn run_laws(run: &RunArgs, only: Option<&str>, with_mutants: bool) -> Result<bool, Usage> {
    if let Some(name) = only {
        if laws::find(name).is_none() {
            return Err(Usage(format!("unknown law `{name}`")));
        }
    }
    let space = run.space(&GENERAL)?;
    let mut cfg = SuiteConfig::new(space, run.window(&GENERAL)?);
    cfg.samples = run.samples.unwrap_or(cfg.samples);
    cfg.depth = run.depth.unwrap_or(GENERAL.depth);
    cfg.seed = run.seed;
    cfg.cap = run.cap;
    let report = run_suite(&cfg, only, with_mutants);
    let mut text = String::new();
    for r in &report.laws {
        let _ = writeln!(
            text,
            "{:<40} {:<7} instances={} skipped={} ({:.2?})",
            r.law,
            format!("{:?}", r.status).to_lowercase(),
            r.instances,
            r.skipped,
            r.elapsed
        );
        for v in &r.violations {
            let _ = writeln!(text, "    {:?} {} {}", v.bindings, v.witness_side, v.witness);
        }
    }
    for r in &report.mutants {
        let verdict = if r.status == ReportStatus::Fail { "refuted" } else { "NOT refuted" };
        let _ = writeln!(text, "{:<40} {verdict}", r.law);
        for v in &r.violations {
            let confirmed = revalidate(v, space, Budget { unroll: 3, multiples: 3 })?;
            let _ = writeln!(
                text,
                "    {:?} {} {} (oracle {})",
                v.bindings,
                v.witness_side,
                v.witness,
                if confirmed { "confirms" } else { "disagrees" }
            );
        }
    }
    let failed = report.laws.iter().filter(|r| r.status == ReportStatus::Fail).count();
    let _ = writeln!(
        text,
        "{} laws, {failed} failing, window {} over {} states, seed {}",
        report.laws.len(),
        cfg.window,
        space.size(),
        cfg.seed
    );
    emit(run.format, &text, serde_json::to_value(&report).expect("serializable"));
    Ok(report.ok())
}

fn run_examples(run: &RunArgs) -> Result<bool, Usage> {
    let window = run.window(&GENERAL)?;
    let mut text = String::new();
    let mut outcomes = Vec::new();
    for case in all_examples() {
        let o = run_example(&case, window)?;
        let d = &o.diagnostics;
        let _ = writeln!(
            text,
            "{:<11} {:<4} {}\n    expected {:?}: terminates={} aborts={} infinite={} horizon={} preempting lasso={}",
            o.name,
            if o.passed { "ok" } else { "FAIL" },
            case.program,
            o.expected,
            d.has_terminated,
            d.has_aborted,
            d.has_lasso,
            d.progress_horizon.map_or("-".to_string(), |h| h.to_string()),
            o.preempting_lasso.as_deref().unwrap_or("-"),
        );
        outcomes.push(o);
    }
    let ok = outcomes.iter().all(|o| o.passed);
    emit(run.format, &text, json!(outcomes));
    Ok(ok)
}

fn oracle_check(run: &RunArgs) -> Result<bool, Usage> {
    let space = run.space(&ORACLE)?;
    let window = run.window(&ORACLE)?;
    let depth = run.depth.unwrap_or(ORACLE.depth);
    let terms = exhaustive_terms(depth);
    let (r, total) = compare_terms(&terms, space, window, Budget::default(), 20)?;
    let mut text = format!(
        "{} terms of depth <= {depth} x {} observations at window {window} over {} states: {total} disagreements ({:.1?})\n",
        r.terms,
        r.observations,
        space.size(),
        r.elapsed
    );
    for d in &r.disagreements {
        let _ = writeln!(text, "    {} at {}: engine says {}", d.term, d.observation, d.engine);
    }
    let value = json!({
        "terms": r.terms,
        "observations": r.observations,
        "disagreements": total,
        "window": window,
        "states": space.size(),
        "examples": r.disagreements.iter().map(|d| json!({
            "term": d.term.to_string(),
            "observation": d.observation.to_string(),
            "engine": d.engine,
        })).collect::<Vec<_>>(),
    });
    emit(run.format, &text, value);
    Ok(total == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = &cli.run;
    let result = match &cli.cmd {
        Cmd::Eval { term, traces } => eval(run, term, *traces),
        Cmd::Equal { lhs, rhs } => compare(run, lhs, rhs, false),
        Cmd::Refines { lhs, rhs } => compare(run, lhs, rhs, true),
        Cmd::Laws { only, mutants } => run_laws(run, only.as_deref(), *mutants),
        Cmd::Examples => run_examples(run),
        Cmd::OracleCheck => oracle_check(run),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(msg)) => {
            eprintln!("fairlab: {msg}");
            ExitCode::from(2)
        }
    }
}

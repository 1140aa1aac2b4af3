//! One line per acceptance criterion; exits non-zero if any fails.

use std::time::{Duration, Instant};

use rand::SeedableRng;

use fairlab::check::check_equal;
use fairlab::crosscheck::{compare_terms, exhaustive_terms};
use fairlab::denote::Evaluator;
use fairlab::gen::{random_command, Shape};
use fairlab::laws::{mutants, revalidate, run_suite, ReportStatus, SuiteConfig, SuiteReport};
use fairlab::oracle::Budget;
use fairlab::scenarios::{build_example, run_example};
use fairlab::state::{StateSpace, Window};
use fairlab::syntax::parse;

struct Line {
    ok: bool,
    detail: String,
}

fn report(id: u32, title: &str, line: Line, elapsed: Duration) -> bool {
    println!(
        "[{}] {id}. {title}: {} ({:.1?})",
        if line.ok { "PASS" } else { "FAIL" },
        line.detail,
        elapsed
    );
    line.ok
}

fn default_window() -> Window {
    Window::new(5, 3, 3).unwrap()
}

fn law_suite(suites: &[(usize, SuiteReport)], elapsed: Duration) -> Line {
    let mut problems = Vec::new();
    let mut laws = 0;
    let mut min_instances = usize::MAX;
    for (size, s) in suites {
        laws = s.laws.len();
        for r in &s.laws {
            if r.status != ReportStatus::Pass {
                problems.push(format!("{} at |Σ|={size}: {:?}", r.law, r.status));
            }
            if r.instances > 1 {
                min_instances = min_instances.min(r.instances);
            }
        }
    }
    let ok = problems.is_empty() && laws >= 52 && min_instances >= 100 && elapsed <= Duration::from_secs(600);
    Line {
        ok,
        detail: if problems.is_empty() {
            format!("{laws} laws x |Σ| in {{1,2}} at {}, min {min_instances} bindings per quantified law", default_window())
        } else {
            problems.join("; ")
        },
    }
}

fn closed_identities() -> Line {
    let identities = [
        ("term && fair", "fin(alpha)"),
        ("skip && fair", "fin(eps)"),
        ("fair ; fair", "fair"),
        ("fair || chaos", "fair"),
        ("om(pi ; pi) || om(pi ; eps + pi)", "nil"),
    ];
    let mut checked = 0;
    let mut failures = Vec::new();
    for size in [1, 2] {
        let space = StateSpace::new(size).unwrap();
        for n in 0..=5 {
            for k in 0..=3 {
                for l in 1..=3 {
                    let w = Window::new(n, k, l).unwrap();
                    let mut ev = Evaluator::new(space, w);
                    for (lhs, rhs) in identities {
                        let v = check_equal(&mut ev, &parse(lhs).unwrap(), &parse(rhs).unwrap()).unwrap();
                        checked += 1;
                        if !v.holds_equal() {
                            failures.push(format!("{lhs} = {rhs} at |Σ|={size} {w}: {v}"));
                        }
                    }
                }
            }
        }
    }
    Line {
        ok: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{checked} identity checks over every window N<=5, K<=3, L<=3")
        } else {
            failures.join("; ")
        },
    }
}

fn mutation(suite: &SuiteReport, space: StateSpace) -> Line {
    let mut parts = Vec::new();
    let mut ok = suite.mutants.len() == mutants().len();
    for r in &suite.mutants {
        let Some(v) = r.violations.first() else {
            ok = false;
            parts.push(format!("{} not refuted", r.law));
            continue;
        };
        let confirmed = revalidate(v, space, Budget { unroll: 3, multiples: 3 }).unwrap();
        ok &= confirmed;
        parts.push(format!(
            "{} by {} {}{}",
            r.law,
            v.witness_side,
            v.witness,
            if confirmed { "" } else { " (oracle disagrees)" }
        ));
    }
    Line { ok, detail: parts.join("; ") }
}

fn oracle_equivalence() -> (Line, Duration) {
    let start = Instant::now();
    let terms = exhaustive_terms(2);
    let space = StateSpace::new(1).unwrap();
    let w = Window::new(3, 1, 2).unwrap();
    let (r, total) = compare_terms(&terms, space, w, Budget::default(), 3).unwrap();
    let elapsed = start.elapsed();
    let ok = total == 0 && elapsed <= Duration::from_secs(60);
    let mut detail = format!("{} terms x {} observations, {total} disagreements", r.terms, r.observations);
    for d in &r.disagreements {
        detail.push_str(&format!("; {} at {}", d.term, d.observation));
    }
    (Line { ok, detail }, elapsed)
}

fn examples() -> Line {
    let w = default_window();
    let run = |name| run_example(&build_example(name).unwrap(), w).unwrap();
    let (e1, e2) = (run("example1"), run("example2"));
    let (unfair, fair) = (run("ex-term"), run("fair-term"));
    let stuck = e1.passed && !e1.diagnostics.has_lasso;
    let alive = e2.diagnostics.has_lasso;
    let preempted = unfair.preempting_lasso.is_some();
    let rescued = fair.preempting_lasso.is_none() && fair.passed;
    Line {
        ok: stuck && alive && preempted && rescued,
        detail: format!(
            "example1 stuck={stuck}, example2 has_lasso={alive}, unfair pre-emption {}, fair wrapping removes it={rescued}",
            unfair.preempting_lasso.as_deref().unwrap_or("missing")
        ),
    }
}

fn fair_parallel(suite: &SuiteReport) -> Line {
    let wanted = [
        "fair-parallel-commutes",
        "fair-parallel-distrib",
        "fair-par-monotonic",
        "fair-parallel-nil",
        "absorb-fair-skip",
        "fair-parallel-associative",
    ];
    let mut ok = true;
    let parts: Vec<String> = wanted
        .iter()
        .map(|name| match suite.laws.iter().find(|r| r.law == *name) {
            Some(r) => {
                ok &= r.status == ReportStatus::Pass && r.instances >= 100;
                format!("{name} {}", r.instances)
            }
            None => {
                ok = false;
                format!("{name} missing")
            }
        })
        .collect();
    Line { ok, detail: parts.join(", ") }
}

fn round_trip() -> Line {
    let space = StateSpace::new(2).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for i in 0..1000 {
        let shape = Shape { depth: i % 6, derived: true, powers: true, wide_choice: true };
        let c = random_command(&mut rng, space, shape);
        if parse(&c.to_string()).ok().as_ref() != Some(&c) {
            failures += 1;
        }
    }
    Line {
        ok: failures == 0,
        detail: format!("1000 ASTs of depth <= 5, {failures} failures"),
    }
}

fn main() {
    let mut all = true;

    let start = Instant::now();
    let mut suites = Vec::new();
    for size in [1, 2] {
        let cfg = SuiteConfig::new(StateSpace::new(size).unwrap(), default_window());
        suites.push((size, run_suite(&cfg, None, true)));
    }
    let suite_time = start.elapsed();
    all &= report(1, "law suite", law_suite(&suites, suite_time), suite_time);

    let t = Instant::now();
    all &= report(2, "closed-form fairness identities", closed_identities(), t.elapsed());

    let t = Instant::now();
    let two = StateSpace::new(2).unwrap();
    all &= report(3, "mutation sensitivity", mutation(&suites[1].1, two), t.elapsed());

    let (line, elapsed) = oracle_equivalence();
    all &= report(4, "oracle equivalence", line, elapsed);

    let t = Instant::now();
    all &= report(5, "motivating examples", examples(), t.elapsed());

    let t = Instant::now();
    all &= report(6, "fair-parallel algebra", fair_parallel(&suites[1].1), t.elapsed());

    let t = Instant::now();
    all &= report(7, "parser round-trip", round_trip(), t.elapsed());

    if !all {
        std::process::exit(1);
    }
}

use fairlab::check::{check_equal, check_refines, diagnostics, Relation, Side};
use fairlab::denote::{denote, Evaluator};
use fairlab::laws::{catalog, find, generate_bindings, run_law, LawRelation, ReportStatus, SuiteConfig, Value};
use fairlab::oracle::{oracle_member, Budget};
use fairlab::state::{Lasso, Observation, StateSpace, Status, Step, Trace, Window};
use fairlab::syntax::{parse, Command};

fn space(n: usize) -> StateSpace {
    StateSpace::new(n).unwrap()
}

fn tr(steps: Vec<Step>, status: Status) -> Trace {
    Trace::new(0, steps, status).unwrap()
}

fn e00() -> Step {
    Step::env(0, 0)
}

fn finite_set(src: &str, n: usize, w: Window) -> Vec<Trace> {
    denote(&parse(src).unwrap(), space(n), w).unwrap().traces().collect()
}

#[test]
fn nil_denotes_empty_terminated_and_incomplete() {
    let w = Window::new(2, 0, 1).unwrap();
    let d = denote(&parse("nil").unwrap(), space(1), w).unwrap();
    let mut got: Vec<Trace> = d.traces().collect();
    got.sort();
    let mut want = vec![tr(vec![], Status::Terminated), tr(vec![], Status::Incomplete)];
    want.sort();
    assert_eq!(got, want);
    assert_eq!(d.lasso_count(), 0);
}

#[test]
fn om_eps_at_the_smallest_window() {
    let w = Window::new(1, 0, 1).unwrap();
    let mut got = finite_set("om(eps)", 1, w);
    got.sort();
    let mut want = vec![
        tr(vec![], Status::Terminated),
        tr(vec![], Status::Incomplete),
        tr(vec![e00()], Status::Terminated),
        tr(vec![e00()], Status::Incomplete),
    ];
    want.sort();
    assert_eq!(got, want);
    let d = denote(&parse("om(eps)").unwrap(), space(1), w).unwrap();
    let lassos: Vec<&Lasso> = d.lassos().collect();
    assert_eq!(lassos, vec![&Lasso::new(0, vec![], vec![e00()]).unwrap()]);
}

#[test]
fn pi_par_pi_is_magic() {
    for n in [1, 2] {
        let w = Window::new(3, 1, 2).unwrap();
        let d = denote(&parse("pi || pi").unwrap(), space(n), w).unwrap();
        let m = denote(&Command::Magic, space(n), w).unwrap();
        assert_eq!(d, m);
        assert_eq!(d.trace_count(), n);
        assert!(d.traces().all(|t| t.is_empty() && t.status == Status::Incomplete));
    }
}

#[test]
fn term_fair_is_finite_alpha_across_windows() {
    for n in [1, 2] {
        for bound in 0..=5 {
            let w = Window::new(bound, 1, 2).unwrap();
            let mut ev = Evaluator::new(space(n), w);
            let v = check_equal(&mut ev, &parse("term && fair").unwrap(), &parse("fin(alpha)").unwrap()).unwrap();
            assert!(v.holds_equal(), "{n} {w}: {v}");
        }
    }
}

#[test]
fn oracle_membership_examples() {
    let s = space(1);
    let b = Budget::default();
    let m = |src: &str, o: Observation| oracle_member(&parse(src).unwrap(), s, &o, b).unwrap();
    assert!(m("om(eps)", Observation::Finite(tr(vec![e00()], Status::Terminated))));
    let lasso = Observation::Infinite(Lasso::new(0, vec![], vec![e00()]).unwrap());
    assert!(!m("fin(eps)", lasso.clone()));
    assert!(m("om(eps)", lasso));
    let p00 = Step::program(0, 0);
    assert!(!m("magic ; pi", Observation::Finite(tr(vec![p00], Status::Incomplete))));
    assert!(m("magic ; pi", Observation::Finite(tr(vec![], Status::Incomplete))));
}

#[test]
fn equality_examples() {
    let mut ev = Evaluator::new(space(2), Window::new(5, 3, 3).unwrap());
    let eq = |ev: &mut Evaluator, l: &str, r: &str| check_equal(ev, &parse(l).unwrap(), &parse(r).unwrap()).unwrap();
    assert!(eq(&mut ev, "fair ; fair", "fair").holds_equal());
    assert!(eq(&mut ev, "skip && fair", "fin(eps)").holds_equal());
    let v = eq(&mut ev, "fin(eps)", "om(eps)");
    assert_eq!(v.relation, Relation::RefinedBy);
    let w = v.witness.unwrap();
    assert_eq!(w.side, Side::Right);
    match w.observation {
        Observation::Infinite(l) => {
            assert!(l.prefix.is_empty());
            assert_eq!(l.period, vec![Step::env(l.initial, l.initial)]);
        }
        other => panic!("expected a lasso, got {other}"),
    }
}

#[test]
fn refinement_examples() {
    let mut ev = Evaluator::new(space(2), Window::new(5, 3, 3).unwrap());
    let (chaos, fair) = (parse("chaos").unwrap(), parse("fair").unwrap());
    assert!(check_refines(&mut ev, &chaos, &fair).unwrap().holds_refines());
    let v = check_refines(&mut ev, &fair, &chaos).unwrap();
    assert!(!v.holds_refines());
    let w = v.witness.unwrap();
    assert_eq!(w.side, Side::Right);
    let Observation::Infinite(l) = &w.observation else { panic!("lasso witness expected") };
    assert!(l.prefix.iter().chain(&l.period).all(|s| !s.is_program()));
}

#[test]
fn introducing_fair_is_a_refinement() {
    use fairlab::gen::{random_command, Shape};
    use rand::SeedableRng;
    let s = space(1);
    let mut ev = Evaluator::new(s, Window::new(4, 2, 2).unwrap());
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let shape = Shape { depth: 3, derived: true, powers: true, wide_choice: false };
    for _ in 0..100 {
        let c = random_command(&mut rng, s, shape);
        let cf = Command::conj(c.clone(), Command::Fair);
        let v = check_refines(&mut ev, &c, &cf).unwrap();
        assert!(v.holds_refines(), "{c}: {v}");
    }
}

#[test]
fn diagnostics_examples() {
    let w = Window::new(5, 3, 3).unwrap();
    let magic = diagnostics(&denote(&Command::Magic, space(2), w).unwrap());
    assert!(!magic.has_terminated && !magic.has_aborted && !magic.has_lasso);
    assert_eq!(magic.progress_horizon, Some(0));
    let skip = diagnostics(&denote(&Command::Skip, space(2), w).unwrap());
    assert!(skip.has_terminated && !skip.has_aborted && skip.has_lasso);
    assert_eq!(skip.progress_horizon, None);
}

#[test]
fn catalog_examples() {
    let tf = find("term-fair").unwrap();
    assert_eq!(tf.relation, LawRelation::Equal);
    assert!(tf.is_closed());
    assert_eq!(find("sync-interchange-seq").unwrap().relation, LawRelation::Refines);
    assert!(find("fair-termination").unwrap().premise_tags().contains(&"term-refined"));
    assert!(catalog().len() >= 52);
}

#[test]
fn binding_examples() {
    let s = space(2);
    let assoc = find("seq-assoc").unwrap();
    let five: Vec<_> = generate_bindings(&assoc, s, 3, 0).take(5).collect();
    assert_eq!(five.len(), 5);
    for b in &five {
        for v in ["c0", "c1", "c2"] {
            assert!(matches!(b.get(v), Some(Value::Command(_))), "{v}");
        }
    }

    let st = find("sync-termination").unwrap();
    for b in generate_bindings(&st, s, 3, 0).take(20) {
        for v in ["c", "d"] {
            let Some(Value::Command(c)) = b.get(v) else { panic!("{v} unbound") };
            let Command::Conj(_, fin) = c else { panic!("{c} lacks the fin(alpha) conjunct") };
            assert_eq!(**fin, parse("fin(alpha)").unwrap());
        }
    }

    let distrib = find("fair-parallel-distrib").unwrap();
    for b in generate_bindings(&distrib, s, 3, 0).take(200) {
        let Some(Value::Set(d)) = b.get("D") else { panic!("D unbound") };
        assert!(!d.is_empty());
    }
}

#[test]
fn term_fair_passes_at_the_default_window() {
    let cfg = SuiteConfig::new(space(2), Window::new(5, 3, 3).unwrap());
    let r = run_law(&find("term-fair").unwrap(), &cfg, false);
    assert_eq!(r.status, ReportStatus::Pass);
    assert_eq!(r.instances, 1);
}

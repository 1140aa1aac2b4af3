use super::{Derived, LawRelation, LawSpec, Premise, Sort};

const DERIVED_NAMES: [&str; 4] = ["Id", "iota", "ab", "B"];

/// Free `$names` of the templates, in order of first appearance.
fn free_vars(templates: &[&str]) -> Vec<String> {
    let mut bound: Vec<String> = Vec::new();
    let mut seen: Vec<String> = Vec::new();
    for t in templates {
        let mut rest: &str = t;
        while let Some(i) = rest.find('$') {
            let before = &rest[..i];
            rest = &rest[i + 1..];
            let n = rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(rest.len());
            let name = rest[..n].to_string();
            if before.trim_end().ends_with("{+") {
                bound.push(name);
            } else if !bound.contains(&name)
                && !DERIVED_NAMES.contains(&name.as_str())
                && !seen.contains(&name)
            {
                seen.push(name);
            }
        }
    }
    seen
}

fn law(name: &'static str, relation: LawRelation, sides: &[&'static str]) -> LawSpec {
    let quantifiers = free_vars(sides)
        .into_iter()
        .map(|v| {
            let sort = Sort::of_var(&v);
            (v, sort)
        })
        .collect();
    LawSpec {
        name,
        quantifiers,
        premises: Vec::new(),
        hypothesis: None,
        sides: sides.to_vec(),
        relation,
        derived: Vec::new(),
    }
}

fn eq(name: &'static str, sides: &[&'static str]) -> LawSpec {
    law(name, LawRelation::Equal, sides)
}

fn refines(name: &'static str, lhs: &'static str, rhs: &'static str) -> LawSpec {
    law(name, LawRelation::Refines, &[lhs, rhs])
}

impl LawSpec {
    fn premise(mut self, var: &'static str, p: Premise) -> Self {
        self.premises.push((var, p));
        self
    }

    fn derive(mut self, d: Derived) -> Self {
        self.derived.push(d);
        self
    }

    fn given(mut self, h: &'static str, k: &'static str) -> Self {
        self.hypothesis = Some((h, k));
        for v in free_vars(&[h, k]) {
            if !self.quantifiers.iter().any(|(q, _)| *q == v) {
                let sort = Sort::of_var(&v);
                self.quantifiers.push((v, sort));
            }
        }
        self
    }
}

pub fn catalog() -> Vec<LawSpec> {
    use Premise::*;
    vec![
        // sequential composition
        eq("seq-assoc", &["$c0 ; ($c1 ; $c2)", "($c0 ; $c1) ; $c2"]),
        eq("seq-identity", &["$c ; nil", "$c", "nil ; $c"]),
        eq("seq-annihilation-left", &["abort ; $c", "abort"]),
        eq("seq-distr-right", &["{+ $x in $C : $x} ; $d", "{+ $x in $C : $x ; $d}"]),
        eq("seq-distr-left", &["$c ; {+ $x in $D : $x}", "{+ $x in $D : $c ; $x}"]),
        // synchronisation, for both || and &&
        eq("sync-assoc", &["$c0 $op ($c1 $op $c2)", "($c0 $op $c1) $op $c2"]),
        eq("sync-commutative", &["$c $op $d", "$d $op $c"]),
        eq("sync-id", &["$c $op $Id", "$c"]),
        eq("sync-inf-distrib", &["$c $op {+ $x in $D : $x}", "{+ $x in $D : $c $op $x}"]),
        eq("sync-env", &["$a $op $iota", "$a"]),
        eq("sync-nil-nil", &["nil $op nil", "nil"]),
        eq("sync-nil-atomic", &["nil $op ($a ; $c)", "magic"]),
        eq("par-closure", &["$a $op $b", "$ab"]).derive(Derived::AtomSync),
        eq("sync-interchange-seq-atomic", &["($a ; $c) $op ($b ; $d)", "($a $op $b) ; ($c $op $d)"]),
        eq("sync-inf", &["inf($a) $op inf($b)", "inf($a $op $b)"]),
        refines("sync-interchange-seq", "($c0 ; $d0) $op ($c1 ; $d1)", "($c0 $op $c1) ; ($d0 $op $d1)"),
        // parallel and weak conjunction
        eq("par-abort", &["$c || abort", "abort"]),
        eq("conjoin-abort", &["$c && abort", "abort"]),
        eq("conjoin-idempotent", &["$c && $c", "$c"]),
        eq("par-pi-pi", &["pi || pi", "magic"]),
        eq("conjoin-pi-env", &["pi && eps", "magic"]),
        eq("conjoin-par-finite", &["$c && pow(alpha, $i)", "$c || pow(eps, $i)"]),
        eq("conjoin-par-infinite", &["$c && inf(alpha)", "$c || inf(eps)"]),
        eq(
            "sync-initial",
            &[
                "($c0 && pow(alpha, $i)) ; $d0 || ($c1 && pow(alpha, $i)) ; $d1",
                "(($c0 && pow(alpha, $i)) || ($c1 && pow(alpha, $i))) ; ($d0 || $d1)",
            ],
        )
        .premise("c0", AlphaTotal("i"))
        .premise("c1", AlphaTotal("i")),
        eq(
            "conjoin-sync-initial",
            &[
                "($c0 && pow(alpha, $i)) ; $d0 && ($c1 && pow(alpha, $i)) ; $d1",
                "($c0 && $c1 && pow(alpha, $i)) ; ($d0 && $d1)",
            ],
        )
        .premise("c0", AlphaTotal("i"))
        .premise("c1", AlphaTotal("i")),
        refines("conjoin-interchange-par", "($c0 || $d0) && ($c1 || $d1)", "($c0 && $c1) || ($d0 && $d1)"),
        // iteration
        eq("finite-unfold", &["fin($c)", "nil + $c ; fin($c)"]),
        eq("omega-unfold", &["om($c)", "nil + $c ; om($c)"]),
        eq("isolation", &["om($c)", "fin($c) + inf($c)"]),
        eq("finite-iteration", &["fin($c)", "{+ $k in 0..$B : pow($c, $k)}"]).derive(Derived::IterationBound),
        refines("omega-induction", "om($c) ; $d", "$x")
            .given("$d + $c ; $x", "$x")
            .premise("x", OmegaWitness),
        refines("finite-induction", "$x", "fin($c) ; $d")
            .given("$x", "$d + $c ; $x")
            .premise("x", FiniteWitness),
        eq("finite-leapfrog", &["$c ; fin($d ; $c)", "fin($c ; $d) ; $c"]),
        eq("omega-leapfrog", &["$c ; om($d ; $c)", "om($c ; $d) ; $c"]),
        eq("omega-decomposition", &["om($c + $d)", "om($c) ; om($d ; om($c))"]),
        eq(
            "finite-finite-prefix",
            &[
                "fin($a) ; $c || fin($b) ; $d",
                "fin($a || $b) ; (($c || $d) + ($c || $b ; fin($b) ; $d) + ($a ; fin($a) ; $c || $d))",
            ],
        ),
        eq(
            "finite-omega-prefix",
            &[
                "fin($a) ; $c || om($b) ; $d",
                "fin($a || $b) ; (($c || $d) + ($c || $b ; om($b) ; $d) + ($a ; fin($a) ; $c || $d))",
            ],
        ),
        eq("iterate-pi-par-pi", &["om(pi ; $c) || om(pi ; $d)", "nil"]),
        eq(
            "iterate-pi-sync-atomic",
            &["om(pi ; $c) $op $a ; $d", "(pi $op $a) ; ($c ; om(pi ; $c) $op $d)"],
        ),
        eq("distribute-infeasible-suffix", &["$c $op $d ; magic", "($c $op $d) ; magic"]),
        eq("infinite-annihilates", &["($c && inf(alpha)) ; $d1", "($c && inf(alpha)) ; $d2"]),
        eq(
            "sync-termination",
            &["($c ; fin($a) || $d ; fin($b)) ; (om($a) || om($b))", "$c ; om($a) || $d ; om($b)"],
        )
        .premise("c", ConjFin)
        .premise("d", ConjFin),
        eq("par-skip", &["($c ; skip || $d ; skip) ; skip", "$c ; skip || $d ; skip"]),
        // fairness
        refines("chaos-fair", "chaos", "fair"),
        refines("introduce-fair", "$c", "$c && fair"),
        eq("fair-fair", &["fair ; fair", "fair"]),
        refines("fair-distrib-seq", "($c ; $d) && fair", "($c && fair) ; ($d && fair)"),
        eq("skip-fair", &["skip && fair", "fin(eps)"]),
        eq("term-fair", &["term && fair", "fin(alpha)"]),
        refines("fair-termination", "fin(alpha)", "$c && fair").premise("c", TermRefined),
        // fair concurrency
        eq("fair-par-fair-expand", &["fair || fair", "fin(eps) ; (nil + pi ; (fair || fair))"]),
        refines("fair-par-fair", "fair", "fair || fair"),
        refines("fair-distrib-par-both", "($c || $d) && fair", "($c && fair) || ($d && fair)"),
        eq("fair-par-chaos-expand", &["fair || chaos", "fin(eps) ; (nil + pi ; (fair || chaos))"]),
        eq("fair-par-chaos", &["fair || chaos", "fair"]),
        refines("fair-distrib-par-one", "($c || $d) && fair", "($c && fair) || $d"),
        // fair parallel
        eq("fair-parallel-commutes", &["$c ||f $d", "$d ||f $c"]),
        eq("fair-parallel-distrib", &["$c ||f {+ $x in $D : $x}", "{+ $x in $D : $c ||f $x}"]),
        refines("fair-par-monotonic", "$c ||f $d1", "$c ||f $d2").premise("d1", RefinesPair("d2")),
        eq("fair-parallel-nil", &["$c ||f nil", "($c && fair) ; skip"]),
        refines("introduce-fair-skip", "$c ||f $d", "(($c ||f $d) && fair) ; skip"),
        eq(
            "finite-absorb-fair-skip",
            &[
                "((($c && fin(alpha)) ||f ($d && fin(alpha))) && fair) ; skip",
                "($c && fin(alpha)) ||f ($d && fin(alpha))",
            ],
        ),
        eq(
            "infinite-absorb-fair-skip",
            &["((($c && inf(alpha)) ||f $d) && fair) ; skip", "($c && inf(alpha)) ||f $d"],
        ),
        eq("absorb-fair-skip", &["(($c ||f $d) && fair) ; skip", "$c ||f $d"]),
        eq("fair-parallel-associative", &["($c ||f $d) ||f $e", "$c ||f ($d ||f $e)"]),
    ]
}

/// Known-false variants; each must be refuted within the window.
pub fn mutants() -> Vec<LawSpec> {
    vec![
        eq("mutant-pi-par-pi", &["pi || pi", "pi"]),
        eq("mutant-term-conj-chaos", &["term && chaos", "fin(alpha)"]),
        refines("mutant-fair-refines-chaos", "fair", "chaos"),
        refines(
            "mutant-fair-distrib-par-both-reverse",
            "($c && fair) || ($d && fair)",
            "($c || $d) && fair",
        ),
    ]
}

pub fn find(name: &str) -> Option<LawSpec> {
    catalog().into_iter().chain(mutants()).find(|l| l.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_size_and_unique_names() {
        let laws = catalog();
        assert_eq!(laws.len(), 65);
        let mut names: Vec<_> = laws.iter().map(|l| l.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 65);
    }

    #[test]
    fn quantifier_inference() {
        let l = find("sync-inf-distrib").unwrap();
        assert_eq!(
            l.quantifiers,
            vec![
                ("c".to_string(), Sort::Command),
                ("op".to_string(), Sort::SyncOp),
                ("D".to_string(), Sort::CommandSet { nonempty: true })
            ]
        );
        let t = find("term-fair").unwrap();
        assert!(t.is_closed());
        assert_eq!(t.relation, LawRelation::Equal);
        let f = find("fair-termination").unwrap();
        assert_eq!(f.premise_tags(), vec!["term-refined"]);
        assert_eq!(find("sync-interchange-seq").unwrap().relation, LawRelation::Refines);
        let o = find("omega-induction").unwrap();
        assert!(o.is_sampled_implication());
        assert_eq!(o.quantifiers.len(), 3);
    }

    #[test]
    fn premises_name_quantified_variables() {
        for l in catalog() {
            for (v, p) in &l.premises {
                assert!(l.quantifiers.iter().any(|(q, _)| q == v), "{}: {v}", l.name);
                if let Premise::RefinesPair(w) | Premise::AlphaTotal(w) = p {
                    assert!(l.quantifiers.iter().any(|(q, _)| q == w), "{}: {w}", l.name);
                }
            }
        }
    }
}

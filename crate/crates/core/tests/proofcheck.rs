mod common;

use evlogic::proofcheck::{
    canonical_e5, canonical_e6, canonical_e6_with, canonical_h1, check_proof_text, Justification,
    ProofLine,
};
use evlogic::semantics::{SemanticsError, Valuation};
use evlogic::{
    check_proof, match_axiom, parse, AxiomId, EvidentialStructure, Formula, Proof, ProofVerdict,
    Signature,
};
use rand::Rng;

use common::{random_distribution, random_ev_formula, random_space, rng};

fn structures(seed: u64, sig: &Signature, n: usize) -> Vec<EvidentialStructure> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let space = random_space(&mut r, sig, true);
            let priors = (0..2)
                .map(|_| random_distribution(&mut r, sig.n_hyp(), true))
                .collect();
            EvidentialStructure::full(space, priors).unwrap()
        })
        .collect()
}

/// Holds at every world of every structure where it is defined.
fn sound(f: &Formula, ms: &[EvidentialStructure]) -> bool {
    ms.iter().all(|m| {
        m.worlds()
            .all(|w| match m.satisfies(w, &Valuation::new(), f) {
                Ok(b) => b,
                Err(SemanticsError::UndefinedPosterior(_)) => true,
                Err(e) => panic!("{e}"),
            })
    })
}

fn line(formula: Formula, by: Justification) -> ProofLine {
    ProofLine { formula, by }
}

#[test]
fn tautology_instances_are_valid() {
    let sig = Signature::numbered(2, 2).unwrap();
    let ms = structures(41, &sig, 20);
    let mut r = rng(42);
    let mut accepted = 0;
    for _ in 0..300 {
        let a = random_ev_formula(&mut r, &sig, 2);
        let b = random_ev_formula(&mut r, &sig, 2);
        let candidates = [
            a.clone().or(a.clone().not()),
            a.clone().implies(b.clone().implies(a.clone())),
            a.clone().and(b.clone()).implies(b.clone().and(a.clone())),
            a.clone().implies(b.clone()),
        ];
        for f in candidates {
            if match_axiom(&f, AxiomId::Taut, &sig) {
                assert!(sound(&f, &ms), "{f}");
                accepted += 1;
            }
        }
    }
    assert!(accepted >= 900, "{accepted}");
}

#[test]
fn linear_implications_are_decided_exactly() {
    let sig = Signature::numbered(2, 2).unwrap();
    let p = |t: &str| parse(t, &sig).unwrap();
    let mut r = rng(43);
    for _ in 0..200 {
        let a: i64 = r.gen_range(-6..=6);
        let b: i64 = r.gen_range(-6..=6);
        let f = p(&format!(
            "Pr0(h1) - we(ob1, h2) >= {a}/4 => Pr0(h1) - we(ob1, h2) >= {b}/4"
        ));
        assert_eq!(match_axiom(&f, AxiomId::Ineq, &sig), a >= b, "{f}");
        let g = p(&format!(
            "Pr0(h1) >= {a}/4 & Pr(h2) >= {b}/4 => 2*Pr0(h1) + Pr(h2) >= {}/4",
            2 * a + b
        ));
        assert!(match_axiom(&g, AxiomId::Ineq, &sig), "{g}");
        let strict = p(&format!("Pr0(h1) > {a}/4 => Pr0(h1) >= {a}/4"));
        assert!(match_axiom(&strict, AxiomId::Ineq, &sig));
        let converse = p(&format!("Pr0(h1) >= {a}/4 => Pr0(h1) > {a}/4"));
        assert!(!match_axiom(&converse, AxiomId::Ineq, &sig));
    }
    // a facts-of-probability claim is not linear arithmetic
    assert!(!match_axiom(&p("Pr0(h1) >= 0"), AxiomId::Ineq, &sig));
    assert!(match_axiom(
        &p("Pr0(h1) >= 0 => Pr0(h1) + 1 >= 1"),
        AxiomId::Ineq,
        &sig
    ));
}

#[test]
fn derivations_by_modus_ponens_are_sound() {
    let sig = Signature::numbered(3, 2).unwrap();
    let ms = structures(44, &sig, 15);
    let mut r = rng(45);
    let axioms = [
        canonical_h1(&sig),
        canonical_e5(&sig, "ob1", "h2"),
        parse("Pr0(h1 & h2) + Pr0(h1 & ~h2) - Pr0(h1) = 0", &sig).unwrap(),
        parse("we(ob2, true) = 1", &sig).unwrap(),
    ];
    let ids = [AxiomId::H1, AxiomId::E5, AxiomId::Pr3, AxiomId::E1];
    for _ in 0..100 {
        let k = r.gen_range(0..axioms.len());
        let extra = random_ev_formula(&mut r, &sig, 2);
        let premise = axioms[k].clone();
        let weakened = extra.clone().implies(premise.clone());
        let proof = Proof {
            lines: vec![
                line(premise.clone(), Justification::Axiom(ids[k])),
                line(
                    premise.clone().implies(weakened.clone()),
                    Justification::Axiom(AxiomId::Taut),
                ),
                line(weakened.clone(), Justification::Mp(1, 2)),
            ],
        };
        assert_eq!(check_proof(&proof, &sig), ProofVerdict::Accepted);
        assert!(sound(&weakened, &ms), "{weakened}");
    }
}

#[test]
fn bad_proofs_are_rejected_at_the_right_line() {
    let sig = Signature::numbered(2, 2).unwrap();
    let h1 = canonical_h1(&sig);
    let taut = parse("(h1 | h2) => (ob1 | ~ob1)", &sig).unwrap();
    let goal = parse("ob1 | ~ob1", &sig).unwrap();
    let base = vec![
        line(h1.clone(), Justification::Axiom(AxiomId::H1)),
        line(taut, Justification::Axiom(AxiomId::Taut)),
    ];
    let with = |by: Justification, f: Formula| {
        let mut lines = base.clone();
        lines.push(line(f, by));
        Proof { lines }
    };
    assert!(check_proof(&with(Justification::Mp(1, 2), goal.clone()), &sig).is_accepted());
    let rejected_at = |p: &Proof| match check_proof(p, &sig) {
        ProofVerdict::Rejected { line, .. } => line,
        ProofVerdict::Accepted => 0,
    };
    assert_eq!(rejected_at(&with(Justification::Mp(2, 1), goal.clone())), 3);
    assert_eq!(rejected_at(&with(Justification::Mp(1, 3), goal.clone())), 3);
    assert_eq!(rejected_at(&with(Justification::Mp(0, 2), goal.clone())), 3);
    assert_eq!(rejected_at(&with(Justification::Mp(1, 2), h1.clone())), 3);
    assert_eq!(
        rejected_at(&with(Justification::Axiom(AxiomId::O1), goal)),
        3
    );
    let mislabeled = Proof {
        lines: vec![line(h1, Justification::Axiom(AxiomId::O1))],
    };
    assert_eq!(rejected_at(&mislabeled), 1);
    let ill_formed = Proof {
        lines: vec![line(
            Formula::Hyp("h9".into()),
            Justification::Axiom(AxiomId::Taut),
        )],
    };
    let verdict = check_proof(&ill_formed, &sig);
    assert!(
        verdict
            .to_string()
            .starts_with("rejected at line 1: ill-formed"),
        "{verdict}"
    );
}

#[test]
fn verdicts_survive_rendering_and_reparsing() {
    let sig = Signature::numbered(2, 3).unwrap();
    let mut r = rng(46);
    for _ in 0..200 {
        let a = random_ev_formula(&mut r, &sig, 2);
        let b = random_ev_formula(&mut r, &sig, 2);
        let proof = Proof {
            lines: vec![
                line(a.clone(), Justification::Axiom(AxiomId::Taut)),
                line(
                    a.clone().implies(b.clone()),
                    Justification::Axiom(AxiomId::Ineq),
                ),
                line(b, Justification::Mp(1, 2)),
            ],
        };
        let text: Vec<(String, Justification)> = proof
            .lines
            .iter()
            .map(|l| (l.formula.to_string(), l.by))
            .collect();
        assert_eq!(check_proof(&proof, &sig), check_proof_text(&text, &sig));
    }
    let broken = vec![("h1 &".to_string(), Justification::Axiom(AxiomId::Taut))];
    let verdict = check_proof_text(&broken, &sig);
    assert!(verdict.to_string().contains("parse error"), "{verdict}");
}

#[test]
fn realizability_axiom_holds_in_every_structure() {
    for (n_h, n_o) in [(1, 1), (2, 2), (3, 2), (2, 4)] {
        let sig = Signature::numbered(n_h, n_o).unwrap();
        let e6 = canonical_e6(&sig);
        assert!(match_axiom(&e6, AxiomId::E6, &sig));
        let renamed: Vec<String> = (0..n_o).map(|i| format!("v{i}")).collect();
        let other = canonical_e6_with(&sig, &renamed).unwrap();
        assert!(match_axiom(&other, AxiomId::E6, &sig));
        for m in structures(47, &sig, 30) {
            assert!(evlogic::evidence::check_weight_table(m.weights()).is_realizable());
        }
    }
    let sig = Signature::numbered(2, 2).unwrap();
    let same = vec!["x".to_string(), "x".to_string()];
    assert!(canonical_e6_with(&sig, &same).is_none());
}

#[test]
fn axiom_names_parse() {
    for id in AxiomId::ALL {
        assert_eq!(id.name().parse::<AxiomId>(), Ok(id));
    }
    assert!("Pr5".parse::<AxiomId>().is_err());
}

mod common;

use evlogic::formula::{parse_term, BasicTerm, HypFormula, Monomial, Polynomial};
use evlogic::semantics::{SemanticsError, StructureError, Valuation};
use evlogic::{parse, EvidentialStructure, Rational, Signature, Validity, World};
use num_traits::Zero;
use rand::Rng;

use common::{q, random_distribution, random_ev_formula, random_space, rng};

fn random_structure(r: &mut impl Rng, sig: &Signature, zeros: bool) -> EvidentialStructure {
    let space = random_space(r, sig, zeros);
    let priors = (0..r.gen_range(1..=3))
        .map(|_| random_distribution(r, sig.n_hyp(), zeros))
        .collect();
    EvidentialStructure::full(space, priors).unwrap()
}

fn single(term: BasicTerm) -> Polynomial {
    Polynomial::new(vec![Monomial::basic(
        Rational::from_integer(1.into()),
        term,
    )])
}

#[test]
fn terms_agree_with_the_evidence_module() {
    let mut r = rng(31);
    for _ in 0..100 {
        let sig = Signature::numbered(r.gen_range(1..=4), r.gen_range(1..=4)).unwrap();
        let m = random_structure(&mut r, &sig, true);
        let v = Valuation::new();
        for w in m.worlds() {
            for (h, name) in sig.hypotheses().iter().enumerate() {
                let rho = HypFormula::atom(name.clone());
                let prior = m
                    .eval_term(w, &v, &single(BasicTerm::Prior(rho.clone())))
                    .unwrap();
                assert_eq!(&prior, m.prior(w).mass(h));
                let post = m.eval_term(w, &v, &single(BasicTerm::Posterior(rho.clone())));
                match m.space().posterior(m.prior(w), w.ob) {
                    Ok(d) => assert_eq!(&post.unwrap(), d.mass(h)),
                    Err(_) => assert_eq!(post, Err(SemanticsError::UndefinedPosterior(w))),
                }
                for (o, ob) in sig.observations().iter().enumerate() {
                    let we = m
                        .eval_term(w, &v, &single(BasicTerm::Weight(ob.clone(), rho.clone())))
                        .unwrap();
                    assert_eq!(we, m.space().weight_of(o, h));
                }
            }
        }
    }
}

#[test]
fn hypothesis_and_observation_atoms_read_the_state() {
    let sig = Signature::numbered(3, 2).unwrap();
    let m = random_structure(&mut rng(32), &sig, false);
    let v = Valuation::new();
    for w in m.worlds() {
        for (h, name) in sig.hypotheses().iter().enumerate() {
            let f = parse(name, &sig).unwrap();
            assert_eq!(m.satisfies(w, &v, &f), Ok(w.h == h));
        }
        for (o, name) in sig.observations().iter().enumerate() {
            let f = parse(name, &sig).unwrap();
            assert_eq!(m.satisfies(w, &v, &f), Ok(w.ob == o));
        }
    }
}

#[test]
fn closed_formulas_ignore_the_valuation() {
    let mut r = rng(33);
    for _ in 0..200 {
        let sig = Signature::numbered(r.gen_range(1..=3), r.gen_range(1..=3)).unwrap();
        let m = random_structure(&mut r, &sig, false);
        let f = random_ev_formula(&mut r, &sig, 4);
        let mut v = Valuation::new();
        for name in ["x", "y", "z"] {
            v.insert(name.to_string(), common::random_rational(&mut r));
        }
        for w in m.worlds() {
            assert_eq!(
                m.satisfies(w, &Valuation::new(), &f),
                m.satisfies(w, &v, &f)
            );
        }
    }
}

#[test]
fn open_formulas_use_the_valuation() {
    let sig = Signature::numbered(2, 2).unwrap();
    let m = random_structure(&mut rng(34), &sig, false);
    let w = m.worlds().next().unwrap();
    let f = parse("x * Pr0(h1) >= 0", &sig).unwrap();
    let mut v = Valuation::new();
    assert_eq!(
        m.satisfies(w, &v, &f),
        Err(SemanticsError::UnboundVariable("x".into()))
    );
    v.insert("x".into(), q(-1, 1));
    let negative = m.satisfies(w, &v, &f).unwrap();
    assert_eq!(negative, m.prior(w).mass(0).is_zero());
    v.insert("x".into(), q(1, 1));
    assert_eq!(m.satisfies(w, &v, &f), Ok(true));
    assert!(matches!(m.valid_in(&f), Err(SemanticsError::Open(_))));
    let quantified = parse("forall x (x * Pr0(h1) >= 0)", &sig).unwrap();
    assert_eq!(m.valid_in(&quantified), Err(SemanticsError::Quantified));
}

#[test]
fn validity_reports_a_failing_world() {
    let mut r = rng(35);
    for _ in 0..100 {
        let sig = Signature::numbered(r.gen_range(1..=3), r.gen_range(1..=3)).unwrap();
        let m = random_structure(&mut r, &sig, false);
        let f = random_ev_formula(&mut r, &sig, 3);
        match m.valid_in(&f).unwrap() {
            Validity::Valid => {
                for w in m.worlds() {
                    assert_eq!(m.satisfies(w, &Valuation::new(), &f), Ok(true));
                }
            }
            Validity::Refuted(w) => assert_eq!(m.satisfies(w, &Valuation::new(), &f), Ok(false)),
            Validity::Undefined(w) => panic!("priors have full support, yet undefined at {w:?}"),
        }
    }
}

#[test]
fn undefined_posteriors_surface_in_validity() {
    let sig = Signature::numbered(2, 2).unwrap();
    let space = evlogic::evidence::EvidenceSpace::new(
        sig.clone(),
        vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]],
    )
    .unwrap();
    let prior = evlogic::evidence::Distribution::point(2, 0);
    let m = EvidentialStructure::new(space, vec![(1, 1)], vec![prior]).unwrap();
    let f = parse("Pr(h1) >= 0", &sig).unwrap();
    let w = World {
        h: 1,
        ob: 1,
        prior: 0,
    };
    assert_eq!(m.valid_in(&f), Ok(Validity::Undefined(w)));
    // atoms without the posterior still evaluate
    assert_eq!(
        m.valid_in(&parse("Pr0(h1) = 1", &sig).unwrap()),
        Ok(Validity::Valid)
    );
}

#[test]
fn structures_validate_their_parts() {
    let sig = Signature::numbered(2, 2).unwrap();
    let space = random_space(&mut rng(36), &sig, false);
    let uniform = evlogic::evidence::Distribution::uniform(2);
    assert_eq!(
        EvidentialStructure::new(space.clone(), vec![], vec![uniform.clone()]).unwrap_err(),
        StructureError::NoStates
    );
    assert_eq!(
        EvidentialStructure::new(space.clone(), vec![(0, 0)], vec![]).unwrap_err(),
        StructureError::NoPriors
    );
    assert_eq!(
        EvidentialStructure::new(space.clone(), vec![(2, 0)], vec![uniform]).unwrap_err(),
        StructureError::StateOutOfRange(2, 0)
    );
    let three = evlogic::evidence::Distribution::uniform(3);
    assert!(matches!(
        EvidentialStructure::new(space, vec![(0, 0)], vec![three]),
        Err(StructureError::PriorLength { .. })
    ));
}

#[test]
fn polynomial_terms_multiply_and_add() {
    let sig = Signature::numbered(2, 2).unwrap();
    let m = random_structure(&mut rng(37), &sig, false);
    let v = Valuation::new();
    for w in m.worlds() {
        let p = |t: &str| m.eval_term(w, &v, &parse_term(t, &sig).unwrap()).unwrap();
        let a = p("Pr0(h1)");
        let b = p("we(ob2, h2)");
        assert_eq!(p("3*Pr0(h1)*we(ob2, h2) - Pr0(h1)"), q(3, 1) * &a * &b - &a);
        assert_eq!(p("Pr0(h1)^2"), &a * &a);
        assert_eq!(p("Pr0(h1 | h2) - Pr0(true)"), Rational::zero());
    }
}

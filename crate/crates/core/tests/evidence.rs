mod common;

use evlogic::evidence::{
    check_weight_table, combine, reconstruct, verify_certificate, Distribution, EvidenceError,
    EvidenceSpace, Realizability, Rejection, WeightTable,
};
use evlogic::formula::HypothesisSet;
use evlogic::{Rational, Signature};
use num_traits::{One, Zero};
use rand::Rng;

use common::{q, random_distribution, random_space, rng};

fn subsets(n: usize) -> impl Iterator<Item = HypothesisSet> {
    (0u32..1 << n)
        .map(move |mask| HypothesisSet::from_indices(n, (0..n).filter(|&h| mask >> h & 1 == 1)))
}

fn random_sig(r: &mut impl Rng) -> Signature {
    Signature::numbered(r.gen_range(1..=4), r.gen_range(1..=4)).unwrap()
}

#[test]
fn weights_are_probability_measures() {
    let mut r = rng(11);
    for _ in 0..200 {
        let sig = random_sig(&mut r);
        let e = random_space(&mut r, &sig, true);
        let n = sig.n_hyp();
        for o in 0..sig.n_obs() {
            assert!(e.weight(o, &HypothesisSet::all(n)).is_one());
            assert!(e.weight(o, &HypothesisSet::from_indices(n, [])).is_zero());
            for a in subsets(n) {
                let w = e.weight(o, &a);
                assert!(w >= Rational::zero() && w <= Rational::one());
                let rest = e.weight(o, &a.complement());
                assert_eq!(w + rest, Rational::one());
            }
        }
    }
}

#[test]
fn weight_is_additive_on_disjoint_sets() {
    let mut r = rng(12);
    for _ in 0..100 {
        let sig = random_sig(&mut r);
        let e = random_space(&mut r, &sig, true);
        let n = sig.n_hyp();
        for a in subsets(n) {
            for b in subsets(n) {
                if a.iter().any(|h| b.contains(h)) {
                    continue;
                }
                let union = HypothesisSet::from_indices(n, a.iter().chain(b.iter()));
                for o in 0..sig.n_obs() {
                    assert_eq!(e.weight(o, &union), e.weight(o, &a) + e.weight(o, &b));
                }
            }
        }
    }
}

#[test]
fn shafer_weight_is_one_on_the_likeliest_hypothesis() {
    let mut r = rng(13);
    for _ in 0..100 {
        let sig = random_sig(&mut r);
        let e = random_space(&mut r, &sig, true);
        let n = sig.n_hyp();
        for o in 0..sig.n_obs() {
            let best = (0..n).max_by_key(|&h| e.likelihood(h, o).clone()).unwrap();
            let single = HypothesisSet::from_indices(n, [best]);
            assert!(e.shafer_weight(o, &single).unwrap().is_one());
            for a in subsets(n).filter(|a| !a.is_empty()) {
                let s = e.shafer_weight(o, &a).unwrap();
                assert!(s >= Rational::zero() && s <= Rational::one());
            }
        }
        let empty = HypothesisSet::from_indices(n, []);
        assert_eq!(e.shafer_weight(0, &empty), Err(EvidenceError::EmptySet));
    }
}

#[test]
fn combination_is_commutative_associative_with_uniform_identity() {
    let mut r = rng(14);
    for _ in 0..300 {
        let n = r.gen_range(1..=5);
        let a = random_distribution(&mut r, n, false);
        let b = random_distribution(&mut r, n, true);
        let c = random_distribution(&mut r, n, false);
        assert_eq!(combine(&a, &b), combine(&b, &a));
        let left = combine(&combine(&a, &b).unwrap(), &c).unwrap();
        let right = combine(&a, &combine(&b, &c).unwrap()).unwrap();
        assert_eq!(left, right);
        assert_eq!(combine(&b, &Distribution::uniform(n)).unwrap(), b);
    }
}

#[test]
fn combination_of_disjoint_supports_is_undefined() {
    let a = Distribution::point(3, 0);
    let b = Distribution::point(3, 2);
    assert_eq!(combine(&a, &b), Err(EvidenceError::DisjointSupport));
    let short: Distribution<Rational> = Distribution::uniform(2);
    assert!(matches!(
        combine(&a, &short),
        Err(EvidenceError::Dimension { .. })
    ));
}

#[test]
fn sequential_updates_match_a_single_product_update() {
    let mut r = rng(15);
    let mut checked = 0;
    while checked < 200 {
        let sig = random_sig(&mut r);
        let e = random_space(&mut r, &sig, false);
        let prior = random_distribution(&mut r, sig.n_hyp(), false);
        let o1 = r.gen_range(0..sig.n_obs());
        let o2 = r.gen_range(0..sig.n_obs());
        let step = e.posterior(&prior, o1).unwrap();
        let twice = e.posterior(&step, o2).unwrap();
        let joint: Vec<Rational> = (0..sig.n_hyp())
            .map(|h| prior.mass(h) * e.likelihood(h, o1) * e.likelihood(h, o2))
            .collect();
        let z: Rational = joint.iter().cloned().sum();
        let expected: Vec<Rational> = joint.into_iter().map(|v| v / &z).collect();
        assert_eq!(twice.masses(), expected.as_slice());
        checked += 1;
    }
}

#[test]
fn construction_rejects_bad_spaces() {
    let sig = Signature::numbered(2, 2).unwrap();
    let bad_sum = EvidenceSpace::new(
        sig.clone(),
        vec![vec![q(1, 2), q(1, 3)], vec![q(1, 2), q(1, 2)]],
    );
    assert!(matches!(bad_sum, Err(EvidenceError::RowSum { .. })));
    let irrelevant = EvidenceSpace::new(
        sig.clone(),
        vec![
            vec![Rational::one(), Rational::zero()],
            vec![Rational::one(), Rational::zero()],
        ],
    );
    assert_eq!(
        irrelevant.unwrap_err(),
        EvidenceError::Irrelevant("ob2".into())
    );
    let negative = EvidenceSpace::new(
        sig.clone(),
        vec![vec![q(3, 2), q(-1, 2)], vec![q(1, 2), q(1, 2)]],
    );
    assert!(matches!(negative, Err(EvidenceError::OutOfRange { .. })));
    let short = EvidenceSpace::new(sig, vec![vec![Rational::one()]]);
    assert!(matches!(short, Err(EvidenceError::Dimension { .. })));
    assert!(matches!(
        Distribution::new(vec![q(1, 2), q(1, 3)]),
        Err(EvidenceError::MassSum(_))
    ));
}

#[test]
fn log_likelihood_needs_two_hypotheses_and_handles_zeros() {
    let sig = Signature::numbered(2, 2).unwrap();
    let e = EvidenceSpace::new(
        sig,
        vec![
            vec![Rational::one(), Rational::zero()],
            vec![q(1, 2), q(1, 2)],
        ],
    )
    .unwrap();
    assert_eq!(e.log_likelihood(0, 0).unwrap().to_string(), "log2(2)");
    assert_eq!(e.log_likelihood(1, 0).unwrap().to_string(), "-inf");
    assert_eq!(e.log_likelihood(1, 1).unwrap().to_string(), "+inf");
    let three = random_space(&mut rng(1), &Signature::numbered(3, 2).unwrap(), false);
    assert_eq!(three.log_likelihood(0, 0), Err(EvidenceError::Arity(3)));
}

#[test]
fn every_rejection_certificate_verifies() {
    let mut r = rng(16);
    let mut rejected = 0;
    let mut accepted = 0;
    for _ in 0..400 {
        let sig = Signature::numbered(r.gen_range(2..=4), r.gen_range(1..=4)).unwrap();
        // rows drawn independently are usually not a weight table
        let entries: Vec<Vec<Rational>> = (0..sig.n_obs())
            .map(|_| common::random_masses(&mut r, sig.n_hyp(), true))
            .collect();
        let t = WeightTable::new(sig, entries).unwrap();
        match check_weight_table(&t) {
            Realizability::Realizable(w) => {
                assert!(w.verify(&t));
                let e = reconstruct(&t, &w).unwrap();
                assert_eq!(e.tabulate(), t);
                accepted += 1;
            }
            Realizability::NotRealizable(Rejection::NoPositiveSolution { certificate }) => {
                assert!(verify_certificate(&t, &certificate), "{certificate:?}");
                rejected += 1;
            }
            Realizability::NotRealizable(other) => panic!("rows were measures: {other}"),
        }
    }
    assert!(
        rejected > 50 && accepted > 50,
        "{rejected} rejected, {accepted} accepted"
    );
}

#[test]
fn rows_that_are_not_measures_are_named() {
    let sig = Signature::numbered(2, 2).unwrap();
    let t = WeightTable::new(sig, vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 4)]]).unwrap();
    match check_weight_table(&t) {
        Realizability::NotRealizable(Rejection::NotAMeasure { observation, sum }) => {
            assert_eq!((observation, sum), (1, q(3, 4)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn reconstruct_rejects_bad_witnesses() {
    let sig = Signature::numbered(2, 2).unwrap();
    let t = random_space(&mut rng(2), &sig, false).tabulate();
    let zero = evlogic::evidence::WitnessVector {
        x: vec![Rational::one(), Rational::zero()],
    };
    assert!(matches!(
        reconstruct(&t, &zero),
        Err(EvidenceError::InvalidWitness(_))
    ));
    let short = evlogic::evidence::WitnessVector {
        x: vec![Rational::one()],
    };
    assert!(matches!(
        reconstruct(&t, &short),
        Err(EvidenceError::InvalidWitness(_))
    ));
}

#[test]
fn floating_point_agrees_with_exact_arithmetic() {
    let mut r = rng(17);
    for _ in 0..100 {
        let sig = random_sig(&mut r);
        let exact = random_space(&mut r, &sig, true);
        let rows: Vec<Vec<f64>> = exact
            .likelihoods()
            .iter()
            .map(|row| row.iter().map(evlogic::Scalar::to_f64).collect())
            .collect();
        let float = EvidenceSpace::<f64>::new(sig.clone(), rows).unwrap();
        for o in 0..sig.n_obs() {
            for h in 0..sig.n_hyp() {
                let a = evlogic::Scalar::to_f64(&exact.weight_of(o, h));
                assert!((a - float.weight_of(o, h)).abs() < 1e-12);
            }
        }
        assert!(check_weight_table(&float.tabulate()).is_realizable());
    }
}

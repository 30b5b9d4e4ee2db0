use apinc::engine::{density_increment_step, digit_restricted_set, increment_holds, szemeredi_search, IncrementOutcome, Oracle};
use apinc::gowers::DenseSet;
use apinc::oracle::brute_ap_count;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn is_genuine(a: &DenseSet, ap: &[u64]) -> bool {
    ap.len() >= 3 && ap[1] > ap[0] && ap.windows(2).all(|w| w[1] - w[0] == ap[1] - ap[0]) && ap.iter().all(|x| a.contains(*x))
}

#[test]
fn random_half_density_sets_yield_progressions() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let a = DenseSet::new(4096, (1..=4096).filter(|_| rng.gen_bool(0.5)).collect()).unwrap();
        let t = szemeredi_search(&a, 3, 8, Oracle::default()).unwrap();
        let IncrementOutcome::ApFound { progression } = &t.outcome else { panic!("{:?}", t.outcome) };
        assert_eq!(t.steps.len(), 1);
        assert!(is_genuine(&a, progression));
    }
}

#[test]
fn digit_set_trace() {
    let a = digit_restricted_set(6);
    assert_eq!((a.n(), a.len()), (729, 64));
    assert_eq!(brute_ap_count(&a, 3).unwrap(), 0);
    let t = szemeredi_search(&a, 3, 8, Oracle::default()).unwrap();
    eprint!("{}", t.to_json_lines());
    assert!(t.densities_increase());
    assert!(matches!(&t.outcome, IncrementOutcome::Inconclusive { reason, .. } if reason == "length-floor"));
    assert!(t.steps.iter().filter(|s| s.part.is_some()).count() >= 1);
    for s in &t.steps {
        if let (Some(p), Some(d), Some(delta)) = (s.part, s.new_density, s.delta) {
            let sub = (d * p.len() as f64).round() as usize;
            let len_a = (s.density * s.n as f64).round() as usize;
            assert!(increment_holds(len_a, s.n, sub, p.len(), delta, 2f64.powi(-30)));
        }
    }
}

#[test]
fn increment_step_is_exact() {
    let a = digit_restricted_set(6);
    let IncrementOutcome::Incremented { part, set, witness, new_density } = density_increment_step(&a, 3, Oracle::default(), 8).unwrap() else {
        panic!()
    };
    assert!(increment_holds(a.len(), a.n(), set.len(), part.len(), witness.delta, 0.0));
    assert!(new_density >= a.density() + witness.delta / 4.0);
    for (i, x) in part.elements().enumerate() {
        assert_eq!(set.contains(i as u64 + 1), a.contains(x as u64));
    }
}

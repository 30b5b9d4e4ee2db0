use apinc::cert::PartitionCertificate;
use apinc::format::{parse_phase, parse_sequence};
use apinc::gowers::{ap_count, gowers_norm_with, DenseSet, GroupFunction, NormMethod};
use apinc::nil::{partition_nilsequence, LipschitzFunction, Nilmanifold};
use apinc::oracle::{brute_ap_count, brute_gowers, max_ap_free, verify};
use apinc::polyphase::{partition_polyphase, PolyPhase};
use apinc::Progression;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_set(rng: &mut ChaCha8Rng, n: u64, p: f64) -> DenseSet {
    DenseSet::new(n, (1..=n).filter(|_| rng.gen_bool(p)).collect()).unwrap()
}

#[test]
fn golden_table_reverifies() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/max_ap_free.json")).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(doc["provenance"].as_str().unwrap().contains("--example golden"));
    let values = doc["values"].as_array().unwrap();
    assert_eq!(values.len(), 20);
    for v in values {
        let n = v["N"].as_u64().unwrap();
        assert_eq!(max_ap_free(n, 3).unwrap(), v["r"].as_u64().unwrap(), "N = {n}");
    }
}

#[test]
fn ap_counts_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let n = rng.gen_range(1..200);
        let p = rng.gen_range(0.05..0.9);
        let a = random_set(&mut rng, n, p);
        for k in 3..=5 {
            assert_eq!(ap_count(&a, k, true).unwrap(), brute_ap_count(&a, k).unwrap(), "{a:?} k={k}");
        }
    }
}

#[test]
fn norms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let m = rng.gen_range(2..14);
        let f = GroupFunction::from_fn(m, |_| Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..6.3))).unwrap();
        for k in 2..=3 {
            let want = brute_gowers(&f, k).unwrap();
            for method in [NormMethod::Direct, NormMethod::Auto] {
                let got = gowers_norm_with(&f, k, method).unwrap();
                assert!((got - want).abs() < 2f64.powi(-30), "{got} vs {want}");
            }
        }
    }
}

#[test]
fn phase_certificates_verify() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..12 {
        let deg = rng.gen_range(1..=3);
        let coeffs: Vec<f64> = (0..=deg).map(|_| rng.gen::<f64>()).collect();
        let phi = PolyPhase::binomial_f64(&coeffs).unwrap();
        let base = rng.gen_range(-50..50);
        let p = Progression::new(base, rng.gen_range(1..5), rng.gen_range(1..600)).unwrap();
        let eps = rng.gen_range(0.02..0.3);
        let cert = partition_polyphase(&phi, &p, eps).unwrap();
        let back = PartitionCertificate::from_json_str(&cert.to_json_string()).unwrap();
        let report = verify(&back).unwrap();
        assert!(report.ok, "{:?} on {p:?}: {report:?}", coeffs);
    }
    let half = parse_phase("0.5 n").unwrap();
    let cert = partition_polyphase(&half, &Progression::interval(1, 100).unwrap(), 0.1).unwrap();
    assert!(cert.diam_witness.iter().all(|&d| d == 0.0));
    assert!(verify(&cert).unwrap().ok);
}

#[test]
fn nil_certificates_verify() {
    let cases = [
        (Nilmanifold::torus(2), "sqrt(2) n; 1/3 n + sqrt(5) n^2", "char:1,1", 600, 0.2),
        (Nilmanifold::heisenberg(), "sqrt(2) n; sqrt(3) n; 0", "cutoff:1,0@1", 2000, 0.1),
        (Nilmanifold::heisenberg(), "1/2 n; sqrt(7) n; 1/3 n", "vertical:1", 300, 0.3),
    ];
    for (m, seq, name, len, eps) in cases {
        let g = parse_sequence(seq, &m).unwrap();
        let f = LipschitzFunction::parse(name).unwrap();
        let cert = partition_nilsequence(&m, &g, &f, &Progression::interval(1, len).unwrap(), eps).unwrap();
        let report = verify(&PartitionCertificate::from_json_str(&cert.to_json_string()).unwrap()).unwrap();
        assert!(report.ok, "{seq}: {report:?}");
        assert!((report.max_diam - cert.max_witness()).abs() < 1e-9);
    }
}

#[test]
fn corrupted_certificate_is_rejected() {
    let phi = parse_phase("sqrt(2) n").unwrap();
    let mut cert = partition_polyphase(&phi, &Progression::interval(1, 300).unwrap(), 0.1).unwrap();
    let i = cert.parts.iter().position(|q| q.len() >= 3).unwrap();
    let q = cert.parts[i];
    cert.parts[i] = Progression::new(q.base(), q.step(), q.len() - 1).unwrap();
    let j = (i + 1) % cert.parts.len();
    let r = cert.parts[j];
    cert.parts[j] = Progression::new(r.base(), r.step(), r.len() + 1).unwrap();
    let report = verify(&cert).unwrap();
    assert!(!report.ok);
    assert!(report.reasons.iter().any(|x| x == "parts-not-disjoint" || x == "coverage-gap"), "{report:?}");
}

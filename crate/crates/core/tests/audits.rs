use opcone::audit::{audit_dimension, audit_homogeneity, audit_pairing, audit_qubit, audit_theory, Postulate, Verdict};
use opcone::cone::{self, ConeKind, ConeSpace, Family};
use opcone::io::{examples, parse_theory, to_report};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Direct self-duality check: the cone's own witness construction separates
/// every sampled non-member and never fires on members.
fn directly_self_dual(s: &ConeSpace, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..300).all(|_| {
        let x = s.sample_gaussian(&mut rng);
        let member = cone::in_cone(&x, 1e-9);
        match s.dual_witness(&x, 1e-9) {
            Some(w) => !member && cone::in_dual_cone(&x, &w).unwrap() < 0.0,
            None => member,
        }
    })
}

#[test]
fn distinguishing_verdict_matches_direct_self_duality() {
    for f in Family::all() {
        for n in 1..=4 {
            let s = ConeSpace::new(ConeKind::new(f, n)).unwrap();
            let report = audit_pairing(&s, 11);
            let row = report.evidence("max C(x, witness) over non-cone samples").unwrap();
            assert_eq!(row.status == Verdict::Pass, directly_self_dual(&s, 11), "{s}");
        }
    }
}

#[test]
fn complex_family_passes_the_premise_bundle_and_real_family_does_not() {
    let q = ConeSpace::quantum(2);
    assert_eq!(audit_homogeneity(&q, 30, 2).verdict, Verdict::Pass);
    assert_eq!(audit_pairing(&q, 2).verdict, Verdict::Pass);
    assert_eq!(audit_dimension(&q, &q).1.verdict, Verdict::Pass);
    let t = parse_theory(examples::QUBIT_BORN, "qubit-born.theory").unwrap();
    assert_eq!(audit_qubit(&t, 2).verdict, Verdict::Pass);

    let r = ConeSpace::rebit(2);
    assert_eq!(audit_homogeneity(&r, 30, 2).verdict, Verdict::Pass);
    assert_eq!(audit_pairing(&r, 2).verdict, Verdict::Pass);
    assert_eq!(audit_dimension(&r, &r).1.verdict, Verdict::Fail);
}

#[test]
fn every_report_carries_evidence() {
    for (name, text) in examples::all() {
        let t = parse_theory(text, name).unwrap();
        for r in audit_theory(&t, &Postulate::all(), 4) {
            assert!(!r.evidence.is_empty(), "{name}: {}", r.postulate);
        }
    }
}

#[test]
fn trivial_system_linearity_reports_dimension_one() {
    let text = "[[systems]]\nname = \"t\"\nfamily = \"quantum-complex\"\nn = 1\n";
    let t = parse_theory(text, "trivial.theory").unwrap();
    let r = &audit_theory(&t, &[Postulate::Linearity], 0)[0];
    assert_eq!(r.verdict, Verdict::Pass);
    assert_eq!(r.evidence("system t dimension").unwrap().value, 1.0);
}

#[test]
fn classical_only_theory_has_no_qubit() {
    let text = "[[systems]]\nname = \"bit\"\nfamily = \"classical\"\nn = 2\n";
    let t = parse_theory(text, "bit.theory").unwrap();
    assert_eq!(audit_qubit(&t, 0).verdict, Verdict::Fail);
}

#[test]
fn seeds_change_samples_but_not_verdicts() {
    let t = parse_theory(examples::INSTRUMENT_CHAIN, "instrument-chain.theory").unwrap();
    let a = to_report(&audit_theory(&t, &Postulate::all(), 1)).unwrap();
    let b = to_report(&audit_theory(&t, &Postulate::all(), 2)).unwrap();
    assert_ne!(a, b);
    let verdicts = |s: u64| audit_theory(&t, &Postulate::all(), s).iter().map(|r| r.verdict).collect::<Vec<_>>();
    assert_eq!(verdicts(1), verdicts(2));
}

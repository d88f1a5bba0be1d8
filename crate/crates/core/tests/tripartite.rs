use entcert::criteria::SearchBudget;
use entcert::linalg::{c, identity, CVector};
use entcert::sampling::{random_unitary, random_vector, seeded};
use entcert::structure::classical_side;
use entcert::tripartite::{
    classify_pairs, generalized_ghz, ghz_test, purification_defect, reduced_pair, Pair, TripartitePure,
};
use entcert::{Side, Verdict, C64};
use proptest::prelude::*;
use rand::Rng;

fn random_pure(seed: u64) -> TripartitePure {
    let mut rng = seeded(seed);
    let dims = (rng.random_range(2..4), rng.random_range(2..4), rng.random_range(2..4));
    TripartitePure::new(dims, random_vector(&mut rng, dims.0 * dims.1 * dims.2)).unwrap()
}

fn all_classical(psi: &TripartitePure) -> bool {
    [Pair::AB, Pair::AC, Pair::BC].iter().all(|&p| {
        let rho = reduced_pair(psi, p);
        classical_side(&rho, Side::A).0 && classical_side(&rho, Side::B).0
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_and_complement_share_spectrum(seed in any::<u64>()) {
        let psi = random_pure(seed);
        for pair in [Pair::AB, Pair::AC, Pair::BC] {
            prop_assert!(purification_defect(&psi, pair) <= 1e-10);
        }
    }

    #[test]
    fn ghz_test_matches_classical_reductions(seed in any::<u64>(), ghz in any::<bool>()) {
        let mut rng = seeded(seed);
        let psi = if ghz {
            let coeffs: Vec<C64> = (0..3).map(|_| c(rng.random_range(0.1..1.0), 0.0)).collect();
            let g = generalized_ghz(&coeffs).unwrap();
            g.apply_local(&random_unitary(&mut rng, 3), &random_unitary(&mut rng, 3), &random_unitary(&mut rng, 3)).unwrap()
        } else {
            random_pure(seed)
        };
        let out = ghz_test(&psi, &SearchBudget::with_seed(seed)).unwrap();
        prop_assert_eq!(out.is_ghz, ghz);
        prop_assert_eq!(all_classical(&psi), ghz);
    }

    #[test]
    fn pair_verdicts_never_claim_two_bound_entangled_pairs(seed in any::<u64>()) {
        let cls = classify_pairs(&random_pure(seed), &SearchBudget::with_seed(seed)).unwrap();
        let bound = cls.pairs.iter().filter(|p| matches!(p.verdict.verdict, Verdict::PptEntangled { .. })).count();
        prop_assert!(bound < 2);
    }
}

#[test]
fn ghz_coefficients_are_recovered_in_order() {
    let mut rng = seeded(3);
    let psi = generalized_ghz(&[c(0.2, 0.0), c(0.9, 0.0), c(0.4, 0.0)]).unwrap();
    let psi = psi
        .apply_local(&random_unitary(&mut rng, 3), &random_unitary(&mut rng, 3), &random_unitary(&mut rng, 3))
        .unwrap();
    let out = ghz_test(&psi, &SearchBudget::default()).unwrap();
    assert!(out.is_ghz && out.undistillable_route && out.zero_discord_route);
    let got = out.coefficients.unwrap();
    for (g, want) in got.iter().zip([0.9, 0.4, 0.2]) {
        assert!((g - want).abs() < 1e-9, "{got:?}");
    }
}

#[test]
fn canonical_form_is_gauge_fixed() {
    let mut rng = seeded(8);
    let d = 3;
    let avs: Vec<CVector> = (0..d).map(|_| random_vector(&mut rng, 2)).collect();
    let mut amps = CVector::zeros(2 * d * d);
    for (i, a) in avs.iter().enumerate() {
        for x in 0..2 {
            amps[(x * d + i) * d + i] = a[x];
        }
    }
    let psi = TripartitePure::new((2, d, d), amps)
        .unwrap()
        .apply_local(&identity(2), &random_unitary(&mut rng, d), &random_unitary(&mut rng, d))
        .unwrap();
    let cls = classify_pairs(&psi, &SearchBudget::default()).unwrap();
    assert!(cls.both_ppt());
    for rec in &cls.pairs {
        assert!(matches!(rec.verdict.verdict, Verdict::Separable { .. }));
    }
    let form = cls.canonical_form.unwrap();
    for a in &form.a_vectors {
        let first = a.iter().find(|z| z.norm() > 1e-12).unwrap();
        assert!(first.im.abs() < 1e-12 && first.re > 0.0);
    }
}

#[test]
fn w_state_pairs_are_distillable() {
    // |001⟩ + |010⟩ + |100⟩: every pair is NPT.
    let mut amps = CVector::zeros(8);
    for k in [1, 2, 4] {
        amps[k] = c(1.0, 0.0);
    }
    let psi = TripartitePure::new((2, 2, 2), amps).unwrap();
    let cls = classify_pairs(&psi, &SearchBudget::default()).unwrap();
    assert!(!cls.both_ppt());
    assert!(cls.canonical_form.is_none());
    for rec in &cls.pairs {
        assert!(matches!(rec.verdict.verdict, Verdict::Distillable { .. }), "{:?}", rec.pair);
    }
    assert!(!ghz_test(&psi, &SearchBudget::default()).unwrap().is_ghz);
}

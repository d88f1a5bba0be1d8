use entcert::criteria::{
    classify_rank_le_max, find_witness, full_rank_property, is_ppt, reduction_criterion, schmidt2_witness,
    trivially_distillable, FullRankSide, SearchBudget,
};
use entcert::linalg::{c, identity, kron_vec, CVector};
use entcert::sampling::{random_ilo, random_vector, seeded};
use entcert::{BipartiteState, Verdict};
use proptest::prelude::*;
use rand::Rng;

fn separable(seed: u64) -> BipartiteState {
    let mut rng = seeded(seed);
    let (m, n) = (rng.random_range(2..4), rng.random_range(2..5));
    let k = rng.random_range(1..=m * n + 1);
    let vs: Vec<CVector> = (0..k)
        .map(|_| kron_vec(&random_vector(&mut rng, m), &random_vector(&mut rng, n)))
        .collect();
    BipartiteState::from_vectors(m, n, &vs).unwrap()
}

fn generic(seed: u64) -> BipartiteState {
    let mut rng = seeded(seed);
    let (m, n) = (rng.random_range(2..4), rng.random_range(2..4));
    let r = rng.random_range(1..=m * n);
    let vs: Vec<CVector> = (0..r).map(|_| random_vector(&mut rng, m * n)).collect();
    BipartiteState::from_vectors(m, n, &vs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ppt_states_trigger_no_distillability_test(seed in any::<u64>()) {
        let rho = separable(seed);
        prop_assert!(is_ppt(&rho).0);
        prop_assert!(!reduction_criterion(&rho).0);
        prop_assert!(trivially_distillable(&rho).is_none());
        prop_assert!(schmidt2_witness(&rho, &SearchBudget::with_seed(seed)).is_none());
        for side in [FullRankSide::Right, FullRankSide::Left] {
            prop_assert!(full_rank_property(&rho, side, &SearchBudget::with_seed(seed)).holds());
        }
    }

    #[test]
    fn witnesses_revalidate(seed in any::<u64>()) {
        let rho = generic(seed);
        if let Some(w) = find_witness(&rho, &SearchBudget::with_seed(seed)) {
            let rel = w.validate(&rho).unwrap();
            prop_assert!(rel < -rho.tolerance().psd_tol);
            prop_assert!(!is_ppt(&rho).0);
        }
    }

    #[test]
    fn full_rank_verdict_survives_local_operators(seed in any::<u64>()) {
        let rho = generic(seed);
        let mut rng = seeded(seed ^ 7);
        let (m, n) = rho.dims();
        let moved = rho.apply_local(Some(&random_ilo(&mut rng, m)), Some(&random_ilo(&mut rng, n))).unwrap();
        for side in [FullRankSide::Right, FullRankSide::Left] {
            let a = full_rank_property(&rho, side, &SearchBudget::with_seed(seed)).holds();
            let b = full_rank_property(&moved, side, &SearchBudget::with_seed(seed)).holds();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn reduction_violation_gives_schmidt_rank_two_witness(seed in any::<u64>()) {
        let rho = generic(seed);
        if reduction_criterion(&rho).0 {
            let w = schmidt2_witness(&rho, &SearchBudget::with_seed(seed));
            prop_assert!(w.is_some());
            prop_assert!(w.unwrap().validate(&rho).is_ok());
        }
    }

    #[test]
    fn rank_at_most_local_rank_is_always_decided(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let (m, n) = (rng.random_range(2..4), rng.random_range(2..5));
        let r = rng.random_range(1..=m.max(n));
        let vs: Vec<CVector> = (0..r).map(|_| random_vector(&mut rng, m * n)).collect();
        let rho = BipartiteState::from_vectors(m, n, &vs).unwrap();
        let (la, lb) = rho.local_ranks();
        prop_assume!(rho.rank() <= la.max(lb));
        let cert = classify_rank_le_max(&rho, &SearchBudget::with_seed(seed)).unwrap();
        let ppt = is_ppt(&rho).0;
        match &cert.verdict {
            Verdict::Separable { .. } => prop_assert!(ppt),
            Verdict::Distillable { .. } => prop_assert!(!ppt),
            other => prop_assert!(false, "undecided verdict {}", other.name()),
        }
        cert.validate(&rho).unwrap();
    }
}

#[test]
fn noisy_maximally_entangled_state_crosses_ppt_boundary_at_one_third() {
    // p|Φ⟩⟨Φ| + (1-p) I/4 is PPT exactly for p ≤ 1/3.
    let phi = entcert::state::max_entangled(2).normalize();
    for (p, ppt) in [(0.3, true), (0.36, false)] {
        let m = (&phi * phi.adjoint()) * c(p, 0.0) + identity(4) * c((1.0 - p) / 4.0, 0.0);
        let rho = BipartiteState::new(2, 2, m).unwrap();
        assert_eq!(is_ppt(&rho).0, ppt, "p = {p}");
        assert_eq!(reduction_criterion(&rho).0, !ppt, "p = {p}");
    }
}

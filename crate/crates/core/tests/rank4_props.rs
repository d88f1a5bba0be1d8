use entcert::criteria::{is_ppt, SearchBudget};
use entcert::families::{classify_checkerboard, make_checkerboard, CheckerboardParams};
use entcert::linalg::{c, kron_vec, CVector};
use entcert::rank4::decide_rank4;
use entcert::sampling::{random_ilo, random_vector, seeded};
use entcert::{BipartiteState, Verdict};
use proptest::prelude::*;

fn rank4_state(seed: u64) -> BipartiteState {
    let mut rng = seeded(seed);
    let (m, n) = [(3, 3), (2, 3), (2, 4), (3, 4)][(seed % 4) as usize];
    let products = (seed / 4 % 5) as usize;
    let vs: Vec<CVector> = (0..4)
        .map(|k| {
            if k < products {
                kron_vec(&random_vector(&mut rng, m), &random_vector(&mut rng, n))
            } else {
                random_vector(&mut rng, m * n)
            }
        })
        .collect();
    BipartiteState::from_vectors(m, n, &vs).unwrap()
}

fn kind(v: &Verdict) -> &'static str {
    match v {
        Verdict::Separable { .. } | Verdict::Ppt { .. } => "no-entanglement-found",
        other => other.name(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_agree_with_partial_transpose(seed in any::<u64>()) {
        let rho = rank4_state(seed);
        let cert = decide_rank4(&rho, &SearchBudget::with_seed(seed)).unwrap();
        let ppt = is_ppt(&rho).0;
        match &cert.verdict {
            Verdict::Separable { products } => {
                prop_assert!(ppt);
                prop_assert!(products.len() <= 4 || rho.dim_a() * rho.dim_b() <= 6);
                cert.validate(&rho).unwrap();
            }
            Verdict::Distillable { .. } => {
                prop_assert!(!ppt);
                cert.validate(&rho).unwrap();
            }
            Verdict::PptEntangled { .. } => prop_assert!(ppt),
            _ => {}
        }
    }

    #[test]
    fn verdict_survives_local_operators(seed in any::<u64>()) {
        let rho = rank4_state(seed);
        let mut rng = seeded(seed ^ 11);
        let (m, n) = rho.dims();
        let moved = rho.apply_local(Some(&random_ilo(&mut rng, m)), Some(&random_ilo(&mut rng, n))).unwrap();
        let a = decide_rank4(&rho, &SearchBudget::with_seed(seed)).unwrap();
        let b = decide_rank4(&moved, &SearchBudget::with_seed(seed)).unwrap();
        prop_assert_eq!(kind(&a.verdict), kind(&b.verdict));
    }

    #[test]
    fn product_in_range_is_never_ppt_entangled(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let mut vs = vec![kron_vec(&random_vector(&mut rng, 3), &random_vector(&mut rng, 3))];
        // Small perturbations of products: some PPT, some not.
        vs.extend((0..3).map(|_| {
            kron_vec(&random_vector(&mut rng, 3), &random_vector(&mut rng, 3)) + random_vector(&mut rng, 9) * c(0.05, 0.0)
        }));
        let rho = BipartiteState::from_vectors(3, 3, &vs).unwrap();
        let cert = decide_rank4(&rho, &SearchBudget::with_seed(seed)).unwrap();
        let bound = matches!(cert.verdict, Verdict::PptEntangled { .. });
        prop_assert!(!bound, "PPT-entangled verdict with a product vector in range");
    }

    #[test]
    fn checkerboard_npt_is_never_separable(seed in any::<u64>()) {
        let rho = make_checkerboard(&CheckerboardParams::random(&mut seeded(seed))).unwrap();
        prop_assert_eq!(rho.rank(), 4);
        let cert = classify_checkerboard(&rho, &SearchBudget::with_seed(seed)).unwrap();
        if !is_ppt(&rho).0 {
            let wrong = matches!(cert.verdict, Verdict::Separable { .. } | Verdict::Ppt { .. } | Verdict::PptEntangled { .. });
            prop_assert!(!wrong, "NPT checkerboard given {}", cert.verdict.name());
        }
    }
}

use entcert::criteria::is_ppt;
use entcert::linalg::{kron_vec, CMatrix, CVector};
use entcert::sampling::{random_ilo, random_vector, seeded};
use entcert::structure::{classical_side, decompose_b_direct_seeded};
use entcert::{BipartiteState, Side};
use proptest::prelude::*;
use rand::Rng;

/// Direct sum over B of `count` random pieces on `2 ⊗ 2`, then a random ILO.
fn direct_sum(seed: u64, count: usize) -> BipartiteState {
    let mut rng = seeded(seed);
    let n = 2 * count;
    let mut vs = Vec::new();
    for k in 0..count {
        let rank = rng.random_range(1..4);
        for _ in 0..rank {
            let piece = random_vector(&mut rng, 4);
            let mut v = CVector::zeros(2 * n);
            for a in 0..2 {
                for b in 0..2 {
                    v[a * n + 2 * k + b] = piece[a * 2 + b];
                }
            }
            vs.push(v);
        }
    }
    let rho = BipartiteState::from_vectors(2, n, &vs).unwrap();
    rho.apply_local(Some(&random_ilo(&mut rng, 2)), Some(&random_ilo(&mut rng, n))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decomposition_reassembles_with_orthogonal_b_ranges(seed in any::<u64>(), count in 1usize..4) {
        let rho = direct_sum(seed, count);
        let d = decompose_b_direct_seeded(&rho, seed);
        prop_assert_eq!(d.len(), count);
        let scale = rho.matrix().norm();
        prop_assert!((d.reassemble() - rho.matrix()).norm() <= 1e-8 * scale);
        let marginals: Vec<CMatrix> = d.components.iter().map(|c| c.reduce(Side::B)).collect();
        for i in 0..marginals.len() {
            for j in i + 1..marginals.len() {
                let overlap = (&marginals[i] * &marginals[j]).norm();
                prop_assert!(overlap <= 1e-8 * marginals[i].norm() * marginals[j].norm());
            }
        }
    }

    #[test]
    fn components_are_irreducible(seed in any::<u64>(), count in 2usize..4) {
        let d = decompose_b_direct_seeded(&direct_sum(seed, count), seed);
        for comp in &d.components {
            prop_assert_eq!(decompose_b_direct_seeded(comp, seed ^ 5).len(), 1);
        }
    }

    #[test]
    fn component_count_survives_local_operators(seed in any::<u64>(), count in 1usize..4) {
        let rho = direct_sum(seed, count);
        let mut rng = seeded(seed ^ 9);
        let (m, n) = rho.dims();
        let moved = rho.apply_local(Some(&random_ilo(&mut rng, m)), Some(&random_ilo(&mut rng, n))).unwrap();
        prop_assert_eq!(decompose_b_direct_seeded(&moved, seed).len(), count);
    }

    #[test]
    fn classical_states_are_ppt(seed in any::<u64>()) {
        // Σ_i σ_i ⊗ |b_i⟩⟨b_i| with orthonormal |b_i⟩ from a random unitary.
        let mut rng = seeded(seed);
        let u = entcert::sampling::random_unitary(&mut rng, 3);
        let vs: Vec<CVector> = (0..3)
            .flat_map(|i| {
                let b = u.column(i).into_owned();
                (0..2).map(|_| kron_vec(&random_vector(&mut rng, 2), &b)).collect::<Vec<_>>()
            })
            .collect();
        let rho = BipartiteState::from_vectors(2, 3, &vs).unwrap();
        let (classical, basis) = classical_side(&rho, Side::B);
        prop_assert!(classical);
        prop_assert!(basis.is_some());
        prop_assert!(is_ppt(&rho).0);
    }
}

#[test]
fn generic_entangled_state_is_not_classical() {
    let mut rng = seeded(1);
    let rho = BipartiteState::from_vectors(2, 2, &[random_vector(&mut rng, 4), random_vector(&mut rng, 4)]).unwrap();
    assert!(!classical_side(&rho, Side::B).0);
    assert!(!classical_side(&rho, Side::A).0);
}

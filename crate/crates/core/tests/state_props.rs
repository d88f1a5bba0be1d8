use entcert::linalg::{rank, CMatrix, CVector};
use entcert::sampling::{random_ilo, random_vector, seeded};
use entcert::state::{partial_transpose_matrix, PureState};
use entcert::{BipartiteState, Side, ToleranceConfig};
use proptest::prelude::*;

fn random_state(seed: u64) -> BipartiteState {
    let mut rng = seeded(seed);
    let m = 1 + (seed % 4) as usize;
    let n = 1 + (seed / 4 % 4) as usize;
    let r = 1 + (seed / 16 % (m * n) as u64) as usize;
    let vs: Vec<CVector> = (0..r).map(|_| random_vector(&mut rng, m * n)).collect();
    BipartiteState::from_vectors(m, n, &vs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>()) {
        let rho = random_state(seed);
        let (m, n) = rho.dims();
        let twice = partial_transpose_matrix(&rho.partial_transpose(), m, n);
        prop_assert_eq!(&twice, rho.matrix());
    }

    #[test]
    fn partial_transpose_keeps_trace_and_transposes_marginal(seed in any::<u64>()) {
        let rho = random_state(seed);
        let (m, n) = rho.dims();
        let g = rho.partial_transpose();
        prop_assert!((g.trace() - rho.matrix().trace()).norm() <= 1e-12 * rho.trace());
        let ga = CMatrix::from_fn(m, m, |i, j| (0..n).map(|k| g[(i * n + k, j * n + k)]).sum());
        prop_assert!((ga - rho.reduce(Side::A).transpose()).norm() <= 1e-12 * rho.trace());
    }

    #[test]
    fn sector_matches_block_pencil(seed in any::<u64>()) {
        let rho = random_state(seed);
        let mut rng = seeded(seed ^ 1);
        let x = random_vector(&mut rng, rho.dim_a());
        let pencil = rho.block_form().pencil(&x);
        let direct = rho.sector(&x, Side::A).unwrap();
        prop_assert!((pencil.adjoint() * &pencil - &direct).norm() <= 1e-10 * direct.norm().max(1e-300));
    }

    #[test]
    fn block_form_reconstructs(seed in any::<u64>()) {
        let rho = random_state(seed);
        let back = rho.block_form().reconstruct();
        prop_assert!((back - rho.matrix()).norm() <= 1e-10 * rho.matrix().norm());
    }

    #[test]
    fn invertible_local_operators_keep_ranks(seed in any::<u64>()) {
        let rho = random_state(seed);
        let mut rng = seeded(seed ^ 2);
        let (m, n) = rho.dims();
        let moved = rho.apply_local(Some(&random_ilo(&mut rng, m)), Some(&random_ilo(&mut rng, n))).unwrap();
        prop_assert_eq!(moved.rank(), rho.rank());
        prop_assert_eq!(moved.local_ranks(), rho.local_ranks());
    }

    #[test]
    fn schmidt_rank_survives_local_operators(seed in any::<u64>(), k in 1usize..4) {
        let mut rng = seeded(seed);
        let (m, n) = (3, 4);
        // Σ_{i<k} |a_i⟩|b_i⟩ has Schmidt rank k for generic vectors.
        let amps = (0..k).fold(CVector::zeros(m * n), |acc, _| {
            acc + random_vector(&mut rng, m).kronecker(&random_vector(&mut rng, n))
        });
        let tol = ToleranceConfig::default();
        let psi = PureState::new(m, n, amps).unwrap();
        prop_assert_eq!(psi.schmidt_rank(&tol), k);
        let moved = psi.apply_local(&random_ilo(&mut rng, m), &random_ilo(&mut rng, n)).unwrap();
        prop_assert_eq!(moved.schmidt_rank(&tol), k);
    }
}

#[test]
fn tensor_multiplies_dims_trace_and_rank() {
    let a = random_state(5);
    let b = random_state(22);
    let t = a.tensor(&b);
    assert_eq!(t.dims(), (a.dim_a() * b.dim_a(), a.dim_b() * b.dim_b()));
    assert!((t.trace() - a.trace() * b.trace()).abs() < 1e-9 * t.trace());
    assert_eq!(rank(t.matrix(), t.tolerance()), a.rank() * b.rank());
}

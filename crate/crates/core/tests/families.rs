use entcert::criteria::{is_ppt, SearchBudget};
use entcert::families::*;
use entcert::linalg::c;
use entcert::rank4::decide_rank4;
use entcert::sampling::seeded;
use entcert::structure::decompose_b_direct;
use entcert::Verdict;

#[test]
fn random_npt_checkerboards_are_distillable() {
    let mut rng = seeded(77);
    for t in 0..60 {
        let p = CheckerboardParams::random(&mut rng);
        let rho = make_checkerboard(&p).unwrap();
        let ppt = is_ppt(&rho).0;
        let cert = classify_checkerboard(&rho, &SearchBudget::with_seed(t)).unwrap();
        if !ppt {
            assert!(matches!(cert.verdict, Verdict::Distillable { .. }));
            cert.validate(&rho).unwrap();
        }
    }
}

#[test]
fn constraint_chain_instances_are_ppt() {
    for (phase, r, k) in [(0.3, c(0.7, 0.2), c(1.1, -0.4)), (2.0, c(-0.5, 0.9), c(0.3, 0.8)), (0.0, c(1.0, 0.0), c(1.0, 0.0))] {
        let p = CheckerboardParams::ppt_instance(phase, r, k).unwrap();
        let rho = make_checkerboard(&p).unwrap();
        let (ppt, min) = is_ppt(&rho);
        assert!(ppt, "min eig {min}");
        let cert = classify_checkerboard(&rho, &SearchBudget::default()).unwrap();
        assert!(!matches!(cert.verdict, Verdict::Distillable { .. } | Verdict::Undecided { .. }));
    }
}

#[test]
fn tiles_complement_is_ppt_entangled() {
    let rho = upb_tiles_state().unwrap();
    let cert = decide_rank4(&rho, &SearchBudget::default()).unwrap();
    assert!(matches!(cert.verdict, Verdict::PptEntangled { .. }), "{:?}", cert.trail);
}

#[test]
fn shifts_cut_is_separable() {
    let rho = upb_shifts_state([std::f64::consts::FRAC_PI_4; 3], Cut::A).unwrap();
    let cert = decide_rank4(&rho, &SearchBudget::default()).unwrap();
    assert!(matches!(cert.verdict, Verdict::Separable { .. }), "{:?}", cert.trail);
}

#[test]
fn reducible_example_has_two_components() {
    let d = decompose_b_direct(&reducible_example().unwrap());
    assert_eq!(d.len(), 2);
}

#[test]
fn label_state_values() {
    let s = 0.5f64.sqrt();
    let bell = vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
    let prod = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let spec = |p: Vec<f64>, comps: Vec<Vec<_>>| LabelStateSpec {
        probabilities: p,
        label_a: false,
        label_b: true,
        dims: (2, 2),
        components: comps,
    };
    assert!((label_state_entanglement(&spec(vec![1.0], vec![bell.clone()])).unwrap() - 1.0).abs() < 1e-12);
    assert!(label_state_entanglement(&spec(vec![0.5, 0.5], vec![prod.clone(), prod.clone()])).unwrap().abs() < 1e-12);
    assert!((label_state_entanglement(&spec(vec![0.5, 0.5], vec![bell.clone(), prod.clone()])).unwrap() - 0.5).abs() < 1e-12);
    assert!(label_state_entanglement(&spec(vec![0.5, 0.6], vec![bell.clone(), prod.clone()])).is_err());
    let rho = label_state(&spec(vec![0.5, 0.5], vec![bell, prod])).unwrap();
    assert_eq!(rho.dims(), (2, 4));
    assert!(decompose_b_direct(&rho).is_reducible());
}

#[test]
fn werner_regimes() {
    use entcert::criteria::schmidt2_witness;
    for n in [2, 3, 4] {
        // PPT up to φ = 1/n, one-copy distillable beyond φ = 1/2.
        let below = werner(n, 0.9 / n as f64).unwrap();
        assert!(is_ppt(&below).0);
        let above = werner(n, 0.75).unwrap();
        assert!(!is_ppt(&above).0);
        let w = schmidt2_witness(&above, &SearchBudget::default()).expect("witness");
        w.validate(&above).unwrap();
    }
}

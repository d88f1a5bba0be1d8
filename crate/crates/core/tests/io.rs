use entcert::io::{format_hex, parse_hex, parse_state_file, render_state_file, StateData};
use entcert::sampling::{random_vector, seeded};
use entcert::{BipartiteState, Error};
use proptest::prelude::*;

proptest! {
    #[test]
    fn hex_floats_round_trip(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        let back = parse_hex(&format_hex(x)).unwrap();
        prop_assert_eq!(back.to_bits(), x.to_bits());
    }

    #[test]
    fn bipartite_files_round_trip_exactly(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let vs: Vec<_> = (0..3).map(|_| random_vector(&mut rng, 6)).collect();
        let rho = BipartiteState::from_vectors(2, 3, &vs).unwrap();
        let text = render_state_file(&StateData::Bipartite(rho.clone())).unwrap();
        let loaded = parse_state_file(&text).unwrap();
        let StateData::Bipartite(back) = loaded.data else { panic!("wrong kind") };
        prop_assert_eq!(back.matrix(), rho.matrix());
    }
}

#[test]
fn decimal_and_hex_entries_mix() {
    let src = r#"{"version": 1, "kind": "bipartite", "dims": [1, 2],
        "data": [[[0.5, 0], [0, 0]], [[0, 0], ["0x1p-1", "0x0p+0"]]]}"#;
    let loaded = parse_state_file(src).unwrap();
    let StateData::Bipartite(rho) = loaded.data else { panic!("wrong kind") };
    assert_eq!(rho.matrix()[(1, 1)].re, 0.5);
    assert!(loaded.digest.starts_with("sha256:"));
}

#[test]
fn tolerance_overrides_are_read() {
    let src = r#"{"version": 1, "kind": "fixture", "data": {"name": "upb_tiles_3x3"},
        "tolerance": {"residual_tol": 1e-7}}"#;
    let loaded = parse_state_file(src).unwrap();
    assert_eq!(loaded.tolerance.unwrap().residual_tol, Some(1e-7));
}

#[test]
fn errors_name_their_position() {
    let src = "{\"version\": 1,\n \"kind\": \"bipartite\",\n \"dims\": [2, 2],\n \"data\": [[[1, 0], [0, 0]], [nope]]}";
    match parse_state_file(src) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
}

#[test]
fn wrong_version_and_kind_are_rejected() {
    assert!(parse_state_file(r#"{"version": 2, "kind": "bipartite", "dims": [1, 1], "data": [[[1, 0]]]}"#).is_err());
    assert!(parse_state_file(r#"{"version": 1, "kind": "quartite", "dims": [1, 1], "data": [[[1, 0]]]}"#).is_err());
}

#[test]
fn non_hermitian_input_is_rejected() {
    let src = r#"{"version": 1, "kind": "bipartite", "dims": [1, 2], "data": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]}"#;
    assert!(parse_state_file(src).is_err());
}

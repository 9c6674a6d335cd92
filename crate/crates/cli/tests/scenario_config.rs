use entdyn_cli::config::{Amplitude, ModelKind, StateSpec};
use entdyn_cli::oracle::{parse_pairs, OracleArgs, OracleId};
use entdyn_cli::{CliError, EstimatorId, Scenario};

const QUBIT: &str = r#"
name = "psi"
dims = [2, 2]
estimators = ["wootters", "bell_dephasing"]
seed = 7
state.kind = "bell"
state.bell = "psi_plus"
model.kind = "dephasing"
model.gamma = 1.0
time.t_max = 3.0
"#;

fn two_term(dims: [usize; 2], m: [usize; 2], n: [usize; 2], model: &str, estimators: &str) -> String {
    format!(
        r#"
name = "tt"
dims = [{}, {}]
estimators = {estimators}
state.kind = "two_term"
state.a = 0.5
state.b = [0.8660254037844386, 0.0]
state.m = [{}, {}]
state.n = [{}, {}]
model.kind = "{model}"
"#,
        dims[0], dims[1], m[0], m[1], n[0], n[1]
    )
}

fn config_error(r: Result<Scenario, CliError>) -> String {
    match r {
        Err(e @ CliError::Config(_)) => {
            assert_eq!(e.exit_code(), 2);
            e.to_string()
        }
        other => panic!("expected a configuration error, got {other:?}"),
    }
}

#[test]
fn dotted_keys_fill_nested_sections() {
    let s = Scenario::from_toml(QUBIT, &[]).unwrap();
    assert_eq!(s.dims, [2, 2]);
    assert_eq!(s.seed, 7);
    assert_eq!(s.state, StateSpec::Bell { bell: "psi_plus".into() });
    assert_eq!(s.model.kind, ModelKind::Dephasing);
    assert_eq!(s.time.n_points, 200);
    assert_eq!(s.estimators, vec![EstimatorId::WOOTTERS, EstimatorId::Oracle(OracleId::BellDephasing)]);
    assert_eq!(s.export.boundary_threshold, 1e-3);
}

#[test]
fn overrides_take_precedence() {
    let s = Scenario::from_toml(
        QUBIT,
        &[
            "model.kind=thermal".into(),
            "model.nbar=0.2".into(),
            "estimators=[\"wootters\", \"bell_thermal\"]".into(),
            "seed=11".into(),
        ],
    )
    .unwrap();
    assert_eq!(s.model.kind, ModelKind::Thermal);
    assert_eq!(s.model.nbar, 0.2);
    assert_eq!(s.seed, 11);
    assert_eq!(s.oracle_args(OracleId::BellThermal).unwrap().nbar, 0.2);
}

#[test]
fn scenario_round_trips_through_toml() {
    let s = Scenario::from_toml(
        &two_term([3, 3], [0, 2], [2, 0], "dephasing", r#"["quasipure", "two_term_dephasing"]"#),
        &[],
    )
    .unwrap();
    let again = Scenario::from_toml(&s.to_toml().unwrap(), &[]).unwrap();
    assert_eq!(s, again);
    match again.state {
        StateSpec::TwoTerm { b: Amplitude::Complex([re, im]), .. } => assert_eq!((re, im), (0.8660254037844386, 0.0)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn wootters_is_rejected_on_qudits() {
    let msg = config_error(Scenario::from_toml(QUBIT, &["dims=[3, 3]".into()]));
    assert!(msg.contains("wootters"), "{msg}");
}

#[test]
fn oracles_must_match_their_family() {
    // dephasing curve requested for a zero-temperature run
    config_error(Scenario::from_toml(QUBIT, &["model.kind=\"zero_temperature\"".into()]));
    // thermal curve for a two-term state
    config_error(Scenario::from_toml(
        &two_term([3, 3], [0, 2], [2, 0], "thermal", r#"["quasipure", "bell_thermal"]"#),
        &[],
    ));
    // the 0m/m0 family needs mirrored levels
    config_error(Scenario::from_toml(
        &two_term([3, 3], [0, 2], [1, 0], "zero_temperature", r#"["quasipure", "zero_t_0m_m0"]"#),
        &[],
    ));
    config_error(Scenario::from_toml(
        &two_term([3, 3], [0, 0], [2, 1], "zero_temperature", r#"["block", "zero_t_00mm"]"#),
        &[],
    ));
    let ok =
        Scenario::from_toml(&two_term([3, 3], [0, 0], [2, 2], "zero_temperature", r#"["block", "zero_t_00mm"]"#), &[])
            .unwrap();
    assert_eq!(ok.oracle_args(OracleId::ZeroT00mm).unwrap().n, (2, 2));
    assert_eq!(ok.block_level(), 2);
}

#[test]
fn malformed_scenarios_are_configuration_errors() {
    config_error(Scenario::from_toml("name = 'x'", &[]));
    config_error(Scenario::from_toml(QUBIT, &["estimators=[]".into()]));
    config_error(Scenario::from_toml(QUBIT, &["estimators=[\"wootters\", \"wootters\"]".into()]));
    config_error(Scenario::from_toml(QUBIT, &["estimators=[\"nonsense\"]".into()]));
    config_error(Scenario::from_toml(QUBIT, &["model.typo=1".into()]));
    config_error(Scenario::from_toml(QUBIT, &["time.t_max=-1".into()]));
    config_error(Scenario::from_toml(QUBIT, &["state.bell=\"chi\"".into()]));
    config_error(Scenario::from_toml(QUBIT, &["no_equals_sign".into()]));
    config_error(Scenario::from_toml(QUBIT, &["name.inner=1".into()]));
}

#[test]
fn core_domain_errors_map_to_exit_code_two() {
    let err = Scenario::from_toml(&two_term([3, 3], [0, 3], [3, 0], "dephasing", r#"["quasipure"]"#), &[]).unwrap_err();
    assert!(matches!(err, CliError::Core(_)), "{err:?}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn explicit_amplitudes_are_normalised() {
    let text = r#"
name = "amp"
dims = [2, 2]
estimators = ["wootters"]
state.kind = "amplitudes"
state.re = [1.0, 0.0, 0.0, 1.0]
model.kind = "dephasing"
"#;
    let s = Scenario::from_toml(text, &[]).unwrap();
    let psi = s.state.build(s.hilbert_dims().unwrap()).unwrap();
    assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-15);
    config_error(Scenario::from_toml(text, &["state.im=[1.0]".into()]));
}

#[test]
fn oracle_parameters() {
    let pairs = parse_pairs("gamma=2, nbar=0.1,kind=phi_minus").unwrap();
    let args = OracleArgs::from_pairs(&pairs, OracleId::BellThermal).unwrap();
    assert_eq!((args.gamma, args.nbar), (2.0, 0.1));
    assert_eq!(args.kind.name(), "phi_minus");

    let args = OracleArgs::from_pairs(&parse_pairs("a=0.5,m=2").unwrap(), OracleId::ZeroT00mm).unwrap();
    assert!((args.b.re - 0.75f64.sqrt()).abs() < 1e-15);
    assert_eq!((args.m, args.n), ((0, 0), (2, 2)));
    // e^{-1} at m=2, Γt=0.5 for the symmetric 0m/m0 state
    let args = OracleArgs::from_pairs(&parse_pairs("m=2").unwrap(), OracleId::ZeroT0mM0).unwrap();
    assert!((OracleId::ZeroT0mM0.eval(&args, 0.5).unwrap() - (-1.0f64).exp()).abs() < 1e-15);

    assert!(parse_pairs("gamma").is_err());
    assert!(OracleArgs::from_pairs(&parse_pairs("zeta=1").unwrap(), OracleId::BellDephasing).is_err());
    assert!(OracleArgs::from_pairs(&parse_pairs("a=2").unwrap(), OracleId::ZeroT0mM0).is_err());
    assert!("bell_nothing".parse::<OracleId>().is_err());
    for id in OracleId::ALL {
        assert_eq!(id.name().parse::<OracleId>().unwrap(), id);
        assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{}\"", id.name()));
    }
}

use unitint_cli::scenario::{Path, Scenario};

const BASE: &str = r#""t_end": 1.0, "steps": 10"#;

fn parse(body: &str) -> Result<Scenario, String> {
    Scenario::parse(&format!("{{{body}, {BASE}}}"))
}

#[test]
fn defaults() {
    let s = parse(r#""id": "a", "N": 2, "n": 1, "family": "spin_half", "B": [0, 0, 1]"#).unwrap();
    assert_eq!(s.paths, [Path::Factorized, Path::Oracle]);
    assert_eq!(s.oracle_steps(), 40);
    assert_eq!(s.z_max, 10.0);
    assert!(s.tolerances.is_empty());
}

#[test]
fn shape_rules() {
    let cases = [
        r#""id": "a", "N": 3, "n": 1, "family": "spin_half", "B": [0, 0, 1]"#,
        r#""id": "a", "N": 4, "n": 1, "family": "so5", "F": [[0,0,0,0,0],[0,0,0,0,0],[0,0,0,0,0],[0,0,0,0,0],[0,0,0,0,0]]"#,
        r#""id": "a", "N": 4, "n": 3, "family": "trig_random""#,
        r#""id": "a", "N": 1, "n": 1, "family": "trig_random""#,
        r#""id": "a/b", "N": 2, "n": 1, "family": "trig_random""#,
        r#""id": "a", "N": 4, "n": 2, "family": "trig_random", "paths": ["hierarchical"]"#,
        r#""id": "a", "N": 4, "n": 2, "family": "trig_random", "paths": ["bloch"]"#,
        r#""id": "a", "N": 2, "n": 1, "family": "trig_random", "Z_max": 1.0"#,
        r#""id": "a", "N": 2, "n": 1, "family": "trig_random", "paths": []"#,
        r#""id": "a", "N": 2, "n": 1, "family": "constant", "H": [[[1, 0]]]"#,
    ];
    for body in cases {
        assert!(parse(body).is_err(), "{body}");
    }
}

#[test]
fn tolerance_rules() {
    let ok = parse(r#""id": "a", "N": 2, "n": 1, "family": "trig_random", "tolerances": {"distance": 1e-6, "phase_split": 1e-9}"#);
    assert!(ok.is_ok(), "{ok:?}");
    let bad = [
        r#""tolerances": {"speed": 1}"#,
        r#""paths": ["oracle"], "tolerances": {"distance": 1}"#,
        r#""paths": ["factorized"], "tolerances": {"oracle_error": 1}"#,
    ];
    for extra in bad {
        let body = format!(r#""id": "a", "N": 2, "n": 1, "family": "trig_random", {extra}"#);
        assert!(parse(&body).is_err(), "{extra}");
    }
    let body = r#""id": "a", "N": 4, "n": 2, "family": "trig_random", "tolerances": {"phase_split": 1}"#;
    assert!(parse(body).is_err());
}

#[test]
fn hamiltonians_build() {
    let piecewise = r#""id": "p", "N": 2, "n": 1, "family": "piecewise", "pieces": [
        {"start": 0, "H": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]},
        {"start": 0.5, "H": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]]}
    ]"#;
    let h = parse(piecewise).unwrap().hamiltonian().unwrap();
    assert_eq!(h.eval(0.7).unwrap()[(0, 1)].re, 1.0);
    assert_eq!(h.eval(0.2).unwrap()[(0, 0)].re, 1.0);

    let trig = parse(r#""id": "t", "N": 5, "n": 2, "family": "trig_random", "seed": 3"#).unwrap();
    let (a, b) = (trig.hamiltonian().unwrap(), trig.hamiltonian().unwrap());
    assert_eq!(a.eval(0.3).unwrap(), b.eval(0.3).unwrap());
    assert_eq!(a.dim(), 5);
}

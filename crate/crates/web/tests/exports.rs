use consensus_lab_web::{critical_table_json, lambda2_curve_json, simulate_json, MAX_NODES};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn cycle_curve_flags_the_first_unstable_size() {
    let v = parse(lambda2_curve_json("cycle", 2, &[0.5, 1.0, 1.0], 3, 20, false).unwrap());
    assert_eq!(v["critical_n"], 9);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 18);
    assert_eq!(records[0]["N"], 3);
    assert_eq!(records[5]["system_stable"], true);
    assert_eq!(records[6]["system_stable"], false);
}

#[test]
fn critical_table_matches_the_cli_sweep() {
    let v = parse(critical_table_json(&[2, 4], &[2, 3], &[0.1, 0.8, 1.0], 60).unwrap());
    let cells: Vec<(u64, u64, Value)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            (
                c["q"].as_u64().unwrap(),
                c["n"].as_u64().unwrap(),
                c["critical_n"].clone(),
            )
        })
        .collect();
    assert_eq!(
        cells,
        vec![
            (2, 2, Value::Null),
            (2, 3, Value::from(9)),
            (4, 2, Value::Null),
            (4, 3, Value::from(20)),
        ]
    );
}

#[test]
fn simulation_is_downsampled_and_classified() {
    let v = parse(simulate_json("cycle", 2, 8, &[0.5, 1.0, 1.0], 200.0, 1, false).unwrap());
    assert_eq!(v["classification"], "consensus");
    assert_eq!(v["system_stable"], true);
    let times = v["times"].as_array().unwrap();
    assert!(times.len() <= 401 && times.len() > 300);
    let offsets = v["offsets"].as_array().unwrap();
    assert_eq!(offsets.len(), 8);
    assert!(offsets[0]
        .as_array()
        .unwrap()
        .iter()
        .all(|x| x.as_f64() == Some(0.0)));

    let v = parse(simulate_json("cycle", 2, 9, &[0.5, 1.0, 1.0], 200.0, 1, false).unwrap());
    assert_eq!(v["classification"], "diverging");
    assert_eq!(v["system_stable"], false);
}

#[test]
fn bad_requests_are_errors() {
    assert!(lambda2_curve_json("hypercube", 2, &[1.0], 2, 10, false).is_err());
    assert!(lambda2_curve_json("cycle", 2, &[], 2, 10, false).is_err());
    assert!(simulate_json("cycle", 2, MAX_NODES + 1, &[1.0, 1.0], 10.0, 1, false).is_err());
    assert!(critical_table_json(&[3], &[3], &[0.1, 0.8, 1.0], 20).is_err());
}

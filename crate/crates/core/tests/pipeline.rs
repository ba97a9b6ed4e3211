use crnlab::dynamics::{export, simulate, RatePolicy, SimulateOptions};
use crnlab::jets::{run_jet_experiment, DominationOptions, Frame, JetSchedule};
use crnlab::{classify, fixtures, parse_network, report, ClassifyOptions};

#[test]
fn parsed_tempering_drives_simulation_and_exports() {
    let parsed = parse_network(fixtures::TRIANGLE_STRONG.text).unwrap();
    let temp = parsed.tempering.expect("fixture carries rates");
    let net = parsed.network;
    let policy = RatePolicy::PiecewiseConstant { dt: 0.5, seed: 11 };
    let opts = SimulateOptions { record_dt: 0.1, ..SimulateOptions::default() };
    let traj = simulate(&net, &temp, &policy, &[1.0, 1.0], 5.0, &opts).unwrap();
    assert!(traj.rate_log.iter().all(|s| temp.contains(&s.rates)));
    assert!(traj.states.iter().flatten().all(|v| *v > 0.0));
    let csv = export::to_csv(&traj, &net).unwrap();
    assert_eq!(csv.lines().count(), traj.times.len() + 1);
    let again = simulate(&net, &temp, &policy, &[1.0, 1.0], 5.0, &opts).unwrap();
    assert_eq!(traj, again);
}

#[test]
fn classification_report_serializes_in_envelope() {
    let net = fixtures::SINGLE_CONVERSION.network();
    let r = classify(&net, &ClassifyOptions::default()).unwrap();
    let json = report::to_json("classify", None, &r);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["result"]["endotactic"], false);
    assert_eq!(v["result"]["witness"], serde_json::json!(["-1", "1"]));
    assert_eq!(v["result"]["verdict"], "exact");
}

#[test]
fn jet_experiment_on_reverse_lotka_volterra() {
    let net = fixtures::REVERSE_LOTKA_VOLTERRA.network();
    let frame = Frame::new(vec![vec![0.0, -1.0], vec![-1.0, 0.0]]).unwrap();
    let exp = run_jet_experiment(&net, &frame, &JetSchedule::default(), 1, 500, &DominationOptions::default()).unwrap();
    assert_eq!(exp.reactions.len(), 3);
    assert!(exp.domination.all_dominated);
    serde_json::to_string(&exp).unwrap();
}

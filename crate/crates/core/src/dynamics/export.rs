//! Trajectory exports: CSV, JSON and an SVG phase-plane plot.

use std::fmt::Write;

use super::{g_along, DynamicsError, Trajectory};
use crate::network::ReactionNetwork;
use crate::svg::line_plot;

/// Columns `t, x_1..x_n, g, dg_dt`.
pub fn to_csv(traj: &Trajectory, net: &ReactionNetwork) -> Result<String, DynamicsError> {
    let series = g_along(traj, net)?;
    let mut s = String::from("t");
    for sp in net.species() {
        s.push(',');
        s.push_str(&sp.name);
    }
    s.push_str(",g,dg_dt\n");
    for ((t, x), l) in traj.times.iter().zip(&traj.states).zip(&series) {
        let _ = write!(s, "{t:e}");
        for v in x {
            let _ = write!(s, ",{v:e}");
        }
        let _ = writeln!(s, ",{:e},{:e}", l.g, l.dg_dt);
    }
    Ok(s)
}

pub fn to_json(traj: &Trajectory) -> serde_json::Value {
    serde_json::to_value(traj).expect("trajectory serializes")
}

/// Phase-plane plot of species `i` against species `j`.
pub fn phase_plane_svg(traj: &Trajectory, net: &ReactionNetwork, i: usize, j: usize) -> String {
    let pts: Vec<(f64, f64)> = traj.states.iter().map(|x| (x[i], x[j])).collect();
    line_plot(&pts, &net.species()[i].name, &net.species()[j].name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{simulate, RatePolicy, SimulateOptions};
    use crate::network::Tempering;
    use crate::parse::parse_network;

    #[test]
    fn csv_layout() {
        let n = parse_network("A -> B").unwrap().network;
        let t = Tempering::fixed(&n, &[1.0]).unwrap();
        let tr = simulate(&n, &t, &RatePolicy::ConstantMid, &[1.0, 1.0], 0.5, &SimulateOptions::default()).unwrap();
        let csv = to_csv(&tr, &n).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,A,B,g,dg_dt"));
        assert_eq!(lines.count(), tr.times.len());
        assert!(phase_plane_svg(&tr, &n, 0, 1).contains("<path"));
        assert!(to_json(&tr)["times"].is_array());
    }
}

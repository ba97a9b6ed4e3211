//! Dormand–Prince 5(4) with first-same-as-last stages.

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights (equal to the last row of `A`).
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h_init: 1e-3, h_min: 1e-12, h_max: f64::INFINITY, max_steps: 5_000_000 }
    }
}

/// Result of one attempted step.
pub enum Attempt {
    Accepted { y: Vec<f64>, k_last: Vec<f64>, h_next: f64 },
    Rejected { h_next: f64 },
}

/// One Dormand–Prince step of size `h` from `(t, y)` with `k1 = f(t, y)`.
///
/// `f` returns `false` if it cannot be evaluated at the given state; the step
/// is then rejected. A step producing any coordinate `<= 0` is rejected too.
pub fn attempt<F>(f: &mut F, t: f64, y: &[f64], k1: &[f64], h: f64, ctl: &StepControl) -> Attempt
where
    F: FnMut(f64, &[f64], &mut [f64]) -> bool,
{
    let n = y.len();
    let mut k: Vec<Vec<f64>> = vec![k1.to_vec()];
    let mut tmp = vec![0.0; n];
    for s in 1..7 {
        for i in 0..n {
            let mut acc = y[i];
            for (j, kj) in k.iter().enumerate() {
                acc += h * A[s][j] * kj[i];
            }
            tmp[i] = acc;
        }
        if tmp.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
            return Attempt::Rejected { h_next: 0.25 * h };
        }
        let mut ks = vec![0.0; n];
        if !f(t + C[s] * h, &tmp, &mut ks) {
            return Attempt::Rejected { h_next: 0.25 * h };
        }
        k.push(ks);
    }
    // stage 7 is evaluated at the fifth-order solution
    let y5 = tmp;
    let mut err = 0.0f64;
    for i in 0..n {
        let mut e = 0.0;
        for s in 0..7 {
            e += h * (B5[s] - B4[s]) * k[s][i];
        }
        let sc = ctl.atol + ctl.rtol * y[i].abs().max(y5[i].abs());
        err = err.max((e / sc).abs());
    }
    if !err.is_finite() {
        return Attempt::Rejected { h_next: 0.25 * h };
    }
    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
    let h_next = (h * factor).min(ctl.h_max);
    if err <= 1.0 {
        Attempt::Accepted { y: y5, k_last: k.pop().expect("seven stages"), h_next }
    } else {
        Attempt::Rejected { h_next: h * factor.min(1.0) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_rows_sum_to_nodes() {
        for s in 0..7 {
            let sum: f64 = A[s].iter().sum();
            assert!((sum - C[s]).abs() < 1e-14, "row {s}");
        }
        assert!((B4.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((B5.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_decay_step() {
        let mut f = |_t: f64, y: &[f64], out: &mut [f64]| {
            out[0] = -y[0];
            true
        };
        let ctl = StepControl::default();
        match attempt(&mut f, 0.0, &[1.0], &[-1.0], 0.01, &ctl) {
            Attempt::Accepted { y, .. } => assert!((y[0] - (-0.01f64).exp()).abs() < 1e-13),
            Attempt::Rejected { .. } => panic!("rejected"),
        }
    }
}

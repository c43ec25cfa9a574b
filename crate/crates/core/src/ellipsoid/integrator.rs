//! Dormand–Prince 5(4) with a projection hook applied after every accepted step.

use nalgebra::DVector;

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
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

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `y' = f(y)` (autonomous) from 0 to `duration` with mixed
/// absolute/relative error control, calling `project` after each accepted step.
pub fn dopri5<F, P>(mut f: F, mut project: P, y0: DVector<f64>, duration: f64, tol: f64) -> Result<(DVector<f64>, StepStats)>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
    P: FnMut(&mut DVector<f64>),
{
    let mut stats = StepStats::default();
    if duration == 0.0 {
        return Ok((y0, stats));
    }
    let dir = duration.signum();
    let total = duration.abs();
    let mut y = y0;
    let mut t = 0.0;
    let mut h = (0.01 * total).min(0.01);
    let mut k0 = f(&y);
    while t < total {
        if t + h > total {
            h = total - t;
        }
        if h < 1e-14 * total.max(1.0) {
            return Err(Error::Integration(format!("step size underflow at t = {}", dir * t)));
        }
        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        k.push(k0.clone());
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate().take(s) {
                if A[s][j] != 0.0 {
                    ys.axpy(dir * h * A[s][j], kj, 1.0);
                }
            }
            k.push(f(&ys));
        }
        let mut y5 = y.clone();
        let mut err = DVector::zeros(y.len());
        for s in 0..7 {
            y5.axpy(dir * h * B5[s], &k[s], 1.0);
            err.axpy(dir * h * (B5[s] - B4[s]), &k[s], 1.0);
        }
        let norm = err
            .iter()
            .zip(y.iter().zip(y5.iter()))
            .map(|(e, (a, b))| (e / (tol * (1.0 + a.abs().max(b.abs())))).powi(2))
            .sum::<f64>()
            .sqrt()
            / (y.len() as f64).sqrt();
        if norm <= 1.0 {
            t += h;
            y = y5;
            project(&mut y);
            k0 = f(&y);
            stats.accepted += 1;
        } else {
            stats.rejected += 1;
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok((y, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let y0 = DVector::from_vec(vec![1.0, 0.0]);
        let (y, _) = dopri5(
            |y| DVector::from_vec(vec![y[1], -y[0]]),
            |_| {},
            y0,
            std::f64::consts::TAU,
            1e-12,
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }
}

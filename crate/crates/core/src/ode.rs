//! Adaptive Dormand-Prince 5(4) integrator for complex first-order systems.

use crate::error::{Result, ScatterError};
use crate::linalg::C64;

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, h_max: f64::INFINITY, max_steps: 2_000_000 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrate `y' = f(x, y)` from `x0` to `x1` (either direction), overwriting `y`.
pub fn integrate<F>(f: F, x0: f64, x1: f64, y: &mut [C64], opts: &OdeOptions) -> Result<()>
where
    F: Fn(f64, &[C64], &mut [C64]),
{
    let dim = y.len();
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let span = (x1 - x0).abs();
    if span == 0.0 {
        return Ok(());
    }
    let mut x = x0;
    let mut h = (span / 100.0).min(opts.h_max).max(1e-6 * span);
    let mut k = vec![vec![C64::new(0.0, 0.0); dim]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); dim];
    let mut y5 = vec![C64::new(0.0, 0.0); dim];
    f(x, y, &mut k[0]);
    let mut steps = 0;
    while (x1 - x) * dir > 1e-14 * span.max(1.0) {
        steps += 1;
        if steps > opts.max_steps {
            return Err(ScatterError::StiffIntegration { x });
        }
        h = h.min(opts.h_max).min((x1 - x).abs());
        let hs = h * dir;
        macro_rules! stage {
            ($idx:expr, $cx:expr, [$(($a:expr, $j:expr)),*]) => {{
                for i in 0..dim {
                    let mut s = y[i];
                    $( s += k[$j][i] * ($a * hs); )*
                    tmp[i] = s;
                }
                let (head, tail) = k.split_at_mut($idx);
                let _ = head;
                f(x + $cx * hs, &tmp, &mut tail[0]);
            }};
        }
        stage!(1, C2, [(A21, 0)]);
        stage!(2, C3, [(A31, 0), (A32, 1)]);
        stage!(3, C4, [(A41, 0), (A42, 1), (A43, 2)]);
        stage!(4, C5, [(A51, 0), (A52, 1), (A53, 2), (A54, 3)]);
        stage!(5, 1.0, [(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)]);
        for i in 0..dim {
            y5[i] = y[i]
                + (k[0][i] * B1 + k[2][i] * B3 + k[3][i] * B4 + k[4][i] * B5 + k[5][i] * B6) * hs;
        }
        {
            let (head, tail) = k.split_at_mut(6);
            let _ = head;
            f(x + hs, &y5, &mut tail[0]);
        }
        let mut err: f64 = 0.0;
        for i in 0..dim {
            let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6
                + k[6][i] * E7)
                * hs;
            let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            err = err.max(e.norm() / sc);
        }
        if err <= 1.0 || h <= 1e-14 * span.max(1.0) {
            x += hs;
            y.copy_from_slice(&y5);
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_returns_exact_phase() {
        let mut y = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        integrate(
            |_x, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0] * 4.0;
            },
            0.0,
            3.0,
            &mut y,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0].re - (6.0f64).cos()).abs() < 1e-10);
        assert!((y[1].re + 2.0 * (6.0f64).sin()).abs() < 1e-10);
    }

    #[test]
    fn backward_integration() {
        let mut y = vec![C64::new(1.0, 0.0)];
        integrate(|_x, y, dy| dy[0] = y[0] * C64::new(0.0, 1.0), 1.0, 0.0, &mut y, &OdeOptions::default())
            .unwrap();
        assert!((y[0] - C64::new(0.0, -1.0).exp()).norm() < 1e-11);
    }
}

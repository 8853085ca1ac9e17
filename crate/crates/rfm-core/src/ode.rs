//! Adaptive Dormand-Prince 5(4) integration for boundary-point trajectories.

use crate::error::RfmError;

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
// 5th order weights
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// embedded 4th order weights
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

/// Integrate dy/dt = f(t, y) from t0 to t1 (either direction) with embedded
/// error control at the given absolute/relative tolerance.
pub fn integrate<F, const N: usize>(
    f: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
) -> Result<[f64; N], RfmError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if t0 == t1 {
        return Ok(y0);
    }
    let dir = if t1 > t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = dir * ((t1 - t0).abs() / 10.0).min(0.1).max(1e-8);
    let hmin = (t1 - t0).abs() * 1e-14;

    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);
    let mut steps = 0usize;
    while (t1 - t) * dir > 0.0 {
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        steps += 1;
        if steps > 1_000_000 || h.abs() < hmin {
            return Err(RfmError::IntegrationFailure(t));
        }
        let yk = |coefs: &[(f64, usize)], y: &[f64; N], k: &[[f64; N]; 7]| {
            let mut out = *y;
            for &(c, j) in coefs {
                for i in 0..N {
                    out[i] += h * c * k[j][i];
                }
            }
            out
        };
        k[1] = f(t + C[1] * h, &yk(&[(A21, 0)], &y, &k));
        k[2] = f(t + C[2] * h, &yk(&[(A31, 0), (A32, 1)], &y, &k));
        k[3] = f(t + C[3] * h, &yk(&[(A41, 0), (A42, 1), (A43, 2)], &y, &k));
        k[4] = f(t + C[4] * h, &yk(&[(A51, 0), (A52, 1), (A53, 2), (A54, 3)], &y, &k));
        k[5] = f(
            t + C[5] * h,
            &yk(&[(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)], &y, &k),
        );
        let y5 = yk(&[(B1, 0), (B3, 2), (B4, 3), (B5, 4), (B6, 5)], &y, &k);
        k[6] = f(t + h, &y5);
        let y4 = yk(&[(E1, 0), (E3, 2), (E4, 3), (E5, 4), (E6, 5), (E7, 6)], &y, &k);

        let mut err: f64 = 0.0;
        for i in 0..N {
            let sc = atol + rtol * y[i].abs().max(y5[i].abs());
            err = err.max(((y5[i] - y4[i]) / sc).abs());
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            k[0] = k[6]; // first-same-as-last
        }
        let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
        h *= factor.clamp(0.2, 5.0);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let y = integrate(|_, y: &[f64; 1]| [-y[0]], [1.0], 0.0, 1.0, 1e-10, 1e-12).unwrap();
        assert!((y[0] - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn circular_orbit_and_backward_inverse() {
        let f = |_: f64, y: &[f64; 2]| [-y[1], y[0]];
        let fwd = integrate(f, [1.0, 0.0], 0.0, 2.3, 1e-10, 1e-10).unwrap();
        assert!((fwd[0] - 2.3f64.cos()).abs() < 1e-8);
        assert!((fwd[1] - 2.3f64.sin()).abs() < 1e-8);
        let back = integrate(f, fwd, 2.3, 0.0, 1e-10, 1e-10).unwrap();
        assert!((back[0] - 1.0).abs() < 1e-8);
        assert!(back[1].abs() < 1e-8);
    }

    #[test]
    fn tolerance_halving_is_stable() {
        let f = |t: f64, y: &[f64; 2]| {
            [
                (std::f64::consts::PI * t / 10.0).cos() * (y[1] * 2.0).sin(),
                -(std::f64::consts::PI * t / 10.0).cos() * (y[0] * 2.0).sin(),
            ]
        };
        let a = integrate(f, [0.3, 0.6], 0.0, 1.0, 1e-10, 1e-10).unwrap();
        let b = integrate(f, [0.3, 0.6], 0.0, 1.0, 5e-11, 5e-11).unwrap();
        assert!((a[0] - b[0]).abs() <= 1e-8);
        assert!((a[1] - b[1]).abs() <= 1e-8);
    }
}

//! Adaptive embedded Runge-Kutta integration (Dormand-Prince 5(4)) with
//! cubic Hermite dense output.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("right-hand side rejected state (left domain) at t={0}")]
    LeftDomain(f64),
    #[error("step size underflow at t={0}")]
    StepUnderflow(f64),
    #[error("exceeded {0} steps")]
    TooManySteps(usize),
}

/// Accepted steps of an adaptive integration, with state derivatives for
/// Hermite interpolation in between.
#[derive(Clone)]
pub struct OdePath {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub dys: Vec<Vec<f64>>,
}

impl OdePath {
    pub fn dim(&self) -> usize {
        self.ys[0].len()
    }

    pub fn t_end(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// Cubic Hermite interpolation of the state at `t`.
    pub fn sample(&self, t: f64, out: &mut [f64]) {
        let n = self.ts.len();
        let forward = self.ts[n - 1] >= self.ts[0];
        // locate the bracketing accepted step
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let before = if forward { self.ts[mid] <= t } else { self.ts[mid] >= t };
            if before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.ts[hi] - self.ts[lo];
        if h == 0.0 {
            out.copy_from_slice(&self.ys[lo]);
            return;
        }
        let s = (t - self.ts[lo]) / h;
        let (h00, h10, h01, h11) = hermite_basis(s);
        for i in 0..out.len() {
            out[i] = h00 * self.ys[lo][i]
                + h10 * h * self.dys[lo][i]
                + h01 * self.ys[hi][i]
                + h11 * h * self.dys[hi][i];
        }
    }

    /// Hermite interpolation of the state derivative at `t`.
    pub fn sample_deriv(&self, t: f64, out: &mut [f64]) {
        let n = self.ts.len();
        let forward = self.ts[n - 1] >= self.ts[0];
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let before = if forward { self.ts[mid] <= t } else { self.ts[mid] >= t };
            if before {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let h = self.ts[hi] - self.ts[lo];
        if h == 0.0 {
            out.copy_from_slice(&self.dys[lo]);
            return;
        }
        let s = (t - self.ts[lo]) / h;
        // derivatives of the Hermite basis wrt t
        let d00 = (6.0 * s * s - 6.0 * s) / h;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = (-6.0 * s * s + 6.0 * s) / h;
        let d11 = 3.0 * s * s - 2.0 * s;
        for i in 0..out.len() {
            out[i] = d00 * self.ys[lo][i]
                + d10 * self.dys[lo][i]
                + d01 * self.ys[hi][i]
                + d11 * self.dys[hi][i];
        }
    }
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

// Dormand-Prince 5(4) tableau
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = f(t, y)` from `t0` to `t1`. The callback writes the
/// derivative into its third argument and returns `false` when the state has
/// left the admissible domain.
pub fn integrate_adaptive<F>(
    mut f: F,
    y0: &[f64],
    t0: f64,
    t1: f64,
    rtol: f64,
    atol: f64,
    max_steps: usize,
) -> Result<OdePath, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> bool,
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut dy = vec![0.0; n];
    if !f(t, &y, &mut dy) {
        return Err(OdeError::LeftDomain(t));
    }

    let mut path = OdePath {
        ts: vec![t],
        ys: vec![y.clone()],
        dys: vec![dy.clone()],
    };
    if span == 0.0 {
        return Ok(path);
    }

    let mut h = (span / 100.0).min(1e-2).max(span * 1e-12) * dir;
    let mut k = vec![vec![0.0; n]; 7];
    k[0].copy_from_slice(&dy);
    let mut ytmp = vec![0.0; n];
    let mut y5 = vec![0.0; n];

    for step in 0.. {
        if step >= max_steps {
            return Err(OdeError::TooManySteps(max_steps));
        }
        if (t - t1) * dir >= 0.0 {
            break;
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < span * 1e-15 {
            return Err(OdeError::StepUnderflow(t));
        }

        let mut rejected_domain = false;
        for s in 0..6 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s + 1) {
                    acc += A[s][j] * kj[i];
                }
                ytmp[i] = y[i] + h * acc;
            }
            let c = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0][s];
            let (head, tail) = k.split_at_mut(s + 1);
            let _ = head;
            if !f(t + c * h, &ytmp, &mut tail[0]) {
                rejected_domain = true;
                break;
            }
        }
        if rejected_domain {
            // shrink into the domain; give up once the step underflows
            h *= 0.5;
            if h.abs() < span * 1e-14 {
                return Err(OdeError::LeftDomain(t));
            }
            continue;
        }
        // 5th order solution is stage 7's evaluation point (FSAL)
        y5.copy_from_slice(&ytmp);
        // error estimate against the embedded 4th order solution
        let mut errnorm = 0.0f64;
        for i in 0..n {
            let mut acc4 = B4[6] * k[6][i];
            for (j, kj) in k.iter().enumerate().take(6) {
                acc4 += B4[j] * kj[i];
            }
            let y4 = y[i] + h * acc4;
            let scale = atol + rtol * y[i].abs().max(y5[i].abs());
            let e = (y5[i] - y4) / scale;
            errnorm += e * e;
        }
        errnorm = (errnorm / n as f64).sqrt();

        if errnorm <= 1.0 {
            t += h;
            y.copy_from_slice(&y5);
            let (head, tail) = k.split_at_mut(6);
            head[0].copy_from_slice(&tail[0]); // FSAL
            path.ts.push(t);
            path.ys.push(y.clone());
            path.dys.push(k[0].clone());
        }
        let factor = if errnorm == 0.0 {
            5.0
        } else {
            (0.9 * errnorm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(path)
}

/// Fixed-step classical RK4, for transport equations along precomputed
/// strips where the driving data is only available by interpolation.
pub fn rk4_step<F>(f: &mut F, t: f64, y: &mut [f64], h: f64)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    f(t, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k1[i];
    }
    f(t + 0.5 * h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + 0.5 * h * k2[i];
    }
    f(t + 0.5 * h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + h * k3[i];
    }
    f(t + h, &tmp, &mut k4);
    for i in 0..n {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_roundtrip() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
            true
        };
        let path =
            integrate_adaptive(f, &[1.0, 0.0], 0.0, 2.0 * std::f64::consts::PI, 1e-12, 1e-14, 1_000_000)
                .unwrap();
        let last = path.ys.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-9, "x(2pi) = {}", last[0]);
        assert!(last[1].abs() < 1e-9);
        // dense output mid-span
        let mut out = [0.0; 2];
        path.sample(std::f64::consts::FRAC_PI_2, &mut out);
        assert!(out[0].abs() < 1e-6);
        assert!((out[1] + 1.0).abs() < 1e-6);
    }

    #[test]
    fn backward_integration() {
        let f = |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[0];
            true
        };
        let path = integrate_adaptive(f, &[1.0], 0.0, -1.0, 1e-10, 1e-12, 100_000).unwrap();
        let last = path.ys.last().unwrap();
        assert!((last[0] - (-1.0f64).exp()).abs() < 1e-9);
    }
}

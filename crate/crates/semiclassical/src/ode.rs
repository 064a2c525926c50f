//! Adaptive Dormand–Prince 5(4) integrator with 4th-order dense output,
//! specialized to the small fixed-size real systems used by the classical
//! dynamics.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (last accepted time)")]
    StepSizeUnderflow { t: f64 },
    #[error("step limit exceeded at t = {t}")]
    TooManySteps { t: f64 },
}

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// dense-output weights
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const MAX_STEPS: usize = 2_000_000;

/// One accepted step with its interpolation coefficients.
#[derive(Clone, Debug)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Evaluate the interpolant at `t ∈ [t0, t0 + h]`.
    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut y = [0.0; N];
        for i in 0..N {
            let [c1, c2, c3, c4, c5] = [
                self.cont[0][i],
                self.cont[1][i],
                self.cont[2][i],
                self.cont[3][i],
                self.cont[4][i],
            ];
            y[i] = c1 + s * (c2 + s1 * (c3 + s * (c4 + s1 * c5)));
        }
        y
    }
}

/// Integration result over `[0, t_end]` with dense output on every step.
#[derive(Clone, Debug)]
pub struct OdeSolution<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
    pub t_end: f64,
    pub y_end: [f64; N],
}

impl<const N: usize> OdeSolution<N> {
    /// Evaluate the solution at `t ∈ [0, t_end]` via the per-step
    /// interpolants.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if self.steps.is_empty() || t >= self.t_end {
            return self.y_end;
        }
        let idx = self
            .steps
            .partition_point(|s| s.t0 + s.h < t)
            .min(self.steps.len() - 1);
        self.steps[idx].eval(t)
    }
}

fn rms_error<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], atol: f64, rtol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..N {
        let sc = atol + rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc) * (err[i] / sc);
    }
    (acc / N as f64).sqrt()
}

/// Integrate `y' = f(t, y)` from `t = 0` to `t_end ≥ 0`.
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    rtol: f64,
    atol: f64,
) -> Result<OdeSolution<N>, OdeError> {
    assert!(t_end >= 0.0);
    let mut steps = Vec::new();
    let mut t = 0.0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if t_end == 0.0 {
        return Ok(OdeSolution { steps, t_end, y_end: y });
    }

    // conservative initial step from the first derivative scale
    let scale0: f64 = (0..N)
        .map(|i| (k1[i] / (atol + rtol * y[i].abs())).powi(2))
        .sum::<f64>()
        .sqrt();
    let mut h = (0.01 / (1.0 + scale0)).min(t_end).max(1e-10);

    let mut count = 0usize;
    while t < t_end {
        if count > MAX_STEPS {
            return Err(OdeError::TooManySteps { t });
        }
        count += 1;
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(OdeError::StepSizeUnderflow { t });
        }
        if t + h > t_end {
            h = t_end - t;
        }

        let mut ys = [0.0; N];
        for i in 0..N {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        let k2 = f(t + h / 5.0, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        let k3 = f(t + 3.0 * h / 10.0, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        let k4 = f(t + 4.0 * h / 5.0, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        let k5 = f(t + 8.0 * h / 9.0, &ys);
        for i in 0..N {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let k6 = f(t + h, &ys);
        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        let k7 = f(t + h, &y1);

        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        let errn = rms_error(&err, &y, &y1, atol, rtol);

        if errn <= 1.0 {
            // accept: build the dense-output coefficients
            let mut cont = [[0.0; N]; 5];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                cont[0][i] = y[i];
                cont[1][i] = ydiff;
                cont[2][i] = bspl;
                cont[3][i] = ydiff - h * k7[i] - bspl;
                cont[4][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i]);
            }
            steps.push(DenseStep { t0: t, h, cont });
            t += h;
            y = y1;
            k1 = k7; // FSAL
        }

        let scale = (0.9 * errn.powf(-0.2)).clamp(0.2, 10.0);
        h *= scale;
    }

    Ok(OdeSolution { steps, t_end, y_end: y })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_motion_is_accurate() {
        // y'' = −y as a first-order system; exact solution (cos t, −sin t)
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let sol = integrate(&f, [1.0, 0.0], 10.0, 1e-10, 1e-10).unwrap();
        let got = sol.y_end;
        assert!((got[0] - (10.0f64).cos()).abs() < 1e-8);
        assert!((got[1] + (10.0f64).sin()).abs() < 1e-8);
    }

    #[test]
    fn dense_output_matches_solution() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let sol = integrate(&f, [1.0, 0.0], 7.0, 1e-10, 1e-10).unwrap();
        for k in 0..70 {
            let t = 0.1 * k as f64;
            let y = sol.eval(t);
            assert!((y[0] - t.cos()).abs() < 1e-7, "t = {t}");
            assert!((y[1] + t.sin()).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn stiff_decay_finishes() {
        let f = |_t: f64, y: &[f64; 1]| [-50.0 * y[0]];
        let sol = integrate(&f, [1.0], 2.0, 1e-9, 1e-12).unwrap();
        assert!((sol.y_end[0] - (-100.0f64).exp()).abs() < 1e-9);
    }
}

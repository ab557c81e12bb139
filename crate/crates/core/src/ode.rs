//! Dormand-Prince 5(4) with Hairer's fourth-order continuous extension,
//! specialised to complex state vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::params::OdeTolerance;
use crate::C64;

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

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Why an integration stopped early.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeFailure<E> {
    /// The step size collapsed below floating-point resolution.
    StepUnderflow { t: f64 },
    /// More than `max_steps` accepted or rejected steps.
    TooManySteps { t: f64 },
    /// The state became non-finite.
    NonFinite { t: f64 },
    /// The caller's per-step guard rejected the state.
    Guard(E),
}

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub tol: OdeTolerance,
    pub max_steps: usize,
    /// Upper bound on the step, `None` for unbounded.
    pub h_max: Option<f64>,
}

impl Dopri5 {
    pub fn new(tol: OdeTolerance) -> Self {
        Self {
            tol,
            max_steps: 5_000_000,
            h_max: None,
        }
    }

    /// Integrates `y' = f(t, y)` from `grid[0]` with `y(grid[0]) = y0` and
    /// returns the dense-output solution at every grid point.
    ///
    /// `guard` runs on every accepted step; returning `Err` aborts.
    pub fn solve<F, G, E>(
        &self,
        mut f: F,
        y0: &[C64],
        grid: &[f64],
        mut guard: G,
    ) -> Result<Vec<Vec<C64>>, OdeFailure<E>>
    where
        F: FnMut(f64, &[C64], &mut [C64]),
        G: FnMut(f64, &[C64]) -> Result<(), E>,
    {
        let n = y0.len();
        let mut out = Vec::with_capacity(grid.len());
        let Some(&t_start) = grid.first() else {
            return Ok(out);
        };
        let t_end = *grid.last().unwrap();
        let mut next = 0;
        while next < grid.len() && grid[next] <= t_start {
            out.push(y0.to_vec());
            next += 1;
        }
        if next == grid.len() {
            return Ok(out);
        }

        let mut t = t_start;
        let mut y = y0.to_vec();
        let mut k1 = vec![C64::default(); n];
        let mut k2 = k1.clone();
        let mut k3 = k1.clone();
        let mut k4 = k1.clone();
        let mut k5 = k1.clone();
        let mut k6 = k1.clone();
        let mut k7 = k1.clone();
        let mut stage = k1.clone();
        let mut y_new = k1.clone();
        let mut dense = k1.clone();

        f(t, &y, &mut k1);
        let mut h = self.initial_step(&mut f, t, &y, &k1, t_end - t, &mut stage, &mut k2);
        let mut err_prev: f64 = 1e-4;
        let mut reject_streak = false;
        let mut steps = 0usize;

        while next < grid.len() {
            steps += 1;
            if steps > self.max_steps {
                return Err(OdeFailure::TooManySteps { t });
            }
            if t + h > t_end {
                h = t_end - t;
            }
            if let Some(hm) = self.h_max {
                h = h.min(hm);
            }
            if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(OdeFailure::StepUnderflow { t });
            }

            combine(&mut stage, &y, h, &[(A21, &k1)]);
            f(t + C2 * h, &stage, &mut k2);
            combine(&mut stage, &y, h, &[(A31, &k1), (A32, &k2)]);
            f(t + C3 * h, &stage, &mut k3);
            combine(&mut stage, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            f(t + C4 * h, &stage, &mut k4);
            combine(
                &mut stage,
                &y,
                h,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            );
            f(t + C5 * h, &stage, &mut k5);
            combine(
                &mut stage,
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            f(t + h, &stage, &mut k6);
            combine(
                &mut y_new,
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            f(t + h, &y_new, &mut k7);

            let mut acc = 0.0;
            let mut finite = true;
            for i in 0..n {
                let e =
                    (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7)
                        * h;
                let scale = |a: f64, b: f64| self.tol.atol + self.tol.rtol * a.abs().max(b.abs());
                let sr = scale(y[i].re, y_new[i].re);
                let si = scale(y[i].im, y_new[i].im);
                acc += (e.re / sr) * (e.re / sr) + (e.im / si) * (e.im / si);
                finite &= y_new[i].re.is_finite() && y_new[i].im.is_finite();
            }
            let err = libm::sqrt(acc / (2 * n).max(1) as f64);
            if !finite || !err.is_finite() {
                if h < 16.0 * f64::EPSILON * t.abs().max(1.0) * 1e3 {
                    return Err(OdeFailure::NonFinite { t });
                }
                h *= 0.1;
                reject_streak = true;
                continue;
            }

            if err <= 1.0 {
                // Lund-stabilized controller, as in Hairer's DOPRI5.
                let fac = libm::pow(err.max(1e-10), 0.17) / libm::pow(err_prev, 0.04) / 0.9;
                let fac = fac.clamp(0.1, 5.0);
                let mut h_next = h / fac;
                if reject_streak {
                    h_next = h_next.min(h);
                }
                err_prev = err.max(1e-4);

                for i in 0..n {
                    let dy = y_new[i] - y[i];
                    let bspl = k1[i] * h - dy;
                    dense[i] = (k1[i] * D1
                        + k3[i] * D3
                        + k4[i] * D4
                        + k5[i] * D5
                        + k6[i] * D6
                        + k7[i] * D7)
                        * h;
                    // Reuse the stage buffers for the interpolation coefficients.
                    k2[i] = dy;
                    k3[i] = bspl;
                    k4[i] = dy - k7[i] * h - bspl;
                }
                let t_new = t + h;
                let last = t_new >= t_end;
                while next < grid.len() && (grid[next] <= t_new || (last && grid[next] <= t_end)) {
                    let theta = ((grid[next] - t) / h).clamp(0.0, 1.0);
                    let theta1 = 1.0 - theta;
                    out.push(
                        (0..n)
                            .map(|i| {
                                y[i] + (k2[i]
                                    + (k3[i] + (k4[i] + dense[i] * theta1) * theta) * theta1)
                                    * theta
                            })
                            .collect(),
                    );
                    next += 1;
                }

                t = t_new;
                core::mem::swap(&mut y, &mut y_new);
                core::mem::swap(&mut k1, &mut k7);
                guard(t, &y).map_err(OdeFailure::Guard)?;
                h = h_next;
                reject_streak = false;
            } else {
                let fac = (libm::pow(err, 0.17) / 0.9).min(5.0);
                h /= fac;
                reject_streak = true;
            }
        }
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn initial_step<F>(
        &self,
        f: &mut F,
        t: f64,
        y: &[C64],
        f0: &[C64],
        span: f64,
        scratch: &mut [C64],
        f1: &mut [C64],
    ) -> f64
    where
        F: FnMut(f64, &[C64], &mut [C64]),
    {
        let n = y.len().max(1) as f64;
        let sc = |z: &C64, w: &C64| self.tol.atol + self.tol.rtol * z.norm().max(w.norm());
        let d0 = libm::sqrt(y.iter().map(|v| sq(v.norm() / sc(v, v))).sum::<f64>() / n);
        let d1 = libm::sqrt(
            y.iter()
                .zip(f0)
                .map(|(v, d)| sq(d.norm() / sc(v, v)))
                .sum::<f64>()
                / n,
        );
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span.abs());
        for i in 0..y.len() {
            scratch[i] = y[i] + f0[i] * h0;
        }
        f(t + h0, scratch, f1);
        let d2 = libm::sqrt(
            y.iter()
                .zip(f0.iter().zip(f1.iter()))
                .map(|(v, (a, b))| sq((b - a).norm() / sc(v, v)))
                .sum::<f64>()
                / n,
        ) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            libm::pow(0.01 / d1.max(d2), 0.2)
        };
        (100.0 * h0).min(h1).min(span.abs()).max(1e-12)
    }
}

fn sq(x: f64) -> f64 {
    x * x
}

fn combine(dst: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &Vec<C64>)]) {
    for i in 0..dst.len() {
        let mut acc = C64::default();
        for (a, k) in terms {
            acc += k[i] * *a;
        }
        dst[i] = y[i] + acc * h;
    }
}

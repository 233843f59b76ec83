//! Adaptive Dormand-Prince 5(4) integrator with the fourth-order continuous
//! extension, used by every initial-value problem in the crate.
//!
//! Accepted steps are handed to an observer together with their dense
//! interpolant, which is how callers locate events and resample paths.

use crate::error::{Error, Result};

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

// difference between the fifth- and fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

pub type State<const N: usize> = [f64; N];

/// One accepted step with its interpolant.
#[derive(Clone, Debug)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: State<N>,
    pub y1: State<N>,
    cont: [State<N>; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn h(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t0.min(self.t1) && t <= self.t0.max(self.t1)
    }

    /// Interpolated state at `t` within the step.
    pub fn eval(&self, t: f64) -> State<N> {
        let theta = (t - self.t0) / self.h();
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.cont;
        std::array::from_fn(|i| {
            r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])))
        })
    }

    /// First root of `g(t, y(t))` inside the step, assuming `g` changes sign
    /// between the endpoints. Bisection on the interpolant to full precision.
    pub fn locate<G>(&self, g: G) -> Option<f64>
    where
        G: Fn(f64, &State<N>) -> f64,
    {
        let (mut a, mut b) = (self.t0, self.t1);
        let mut ga = g(a, &self.y0);
        let gb = g(b, &self.y1);
        if ga == 0.0 {
            return Some(a);
        }
        if gb == 0.0 {
            return Some(b);
        }
        if ga.signum() == gb.signum() {
            return None;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            let gm = g(m, &self.eval(m));
            if gm == 0.0 {
                return Some(m);
            }
            if gm.signum() == ga.signum() {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }
}

/// What the observer wants after seeing an accepted step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Control {
    Continue,
    /// Stop; the final state is the interpolant at the given time.
    StopAt(f64),
}

#[derive(Clone, Debug)]
pub struct Solution<const N: usize> {
    pub t: f64,
    pub y: State<N>,
    pub steps: usize,
    pub rejected: usize,
    /// True when the observer requested the stop.
    pub stopped: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Upper bound on `|h|`; `f64::INFINITY` means none.
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 2_000_000,
            h_max: f64::INFINITY,
        }
    }
}

fn axpy<const N: usize>(y: &State<N>, h: f64, terms: &[(f64, &State<N>)]) -> State<N> {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn finite<const N: usize>(y: &State<N>) -> bool {
    y.iter().all(|v| v.is_finite())
}

impl Dopri5 {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    fn err_norm<const N: usize>(&self, y0: &State<N>, y1: &State<N>, e: &State<N>) -> f64 {
        let s: f64 = (0..N)
            .map(|i| {
                let sc = self.abs_tol + self.rel_tol * y0[i].abs().max(y1[i].abs());
                (e[i] / sc).powi(2)
            })
            .sum();
        (s / N as f64).sqrt()
    }

    fn initial_step<const N: usize, F>(&self, f: &F, t0: f64, y0: &State<N>, f0: &State<N>, dir: f64) -> f64
    where
        F: Fn(f64, &State<N>) -> State<N>,
    {
        let sc: State<N> = std::array::from_fn(|i| self.abs_tol + self.rel_tol * y0[i].abs());
        let norm = |v: &State<N>| {
            ((0..N).map(|i| (v[i] / sc[i]).powi(2)).sum::<f64>() / N as f64).sqrt()
        };
        let d0 = norm(y0);
        let d1 = norm(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.h_max);
        let y1 = axpy(y0, dir * h0, &[(1.0, f0)]);
        let f1 = f(t0 + dir * h0, &y1);
        let diff: State<N> = std::array::from_fn(|i| f1[i] - f0[i]);
        let d2 = norm(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 5.0)
        };
        (100.0 * h0).min(h1).min(self.h_max)
    }

    /// Integrates `y' = f(t, y)` from `t0` towards `t_end`, calling
    /// `observe` on every accepted step.
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: F,
        t0: f64,
        y0: State<N>,
        t_end: f64,
        mut observe: O,
    ) -> Result<Solution<N>>
    where
        F: Fn(f64, &State<N>) -> State<N>,
        O: FnMut(&DenseStep<N>) -> Control,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        if !finite(&y) || !finite(&k1) {
            return Err(Error::Integration {
                t,
                reason: "non-finite initial state or derivative".into(),
            });
        }
        let mut h = self.initial_step(&f, t, &y, &k1, dir);
        let mut steps = 0usize;
        let mut rejected = 0usize;
        let mut last_rejected = false;

        while (t_end - t) * dir > 0.0 {
            if steps + rejected >= self.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: format!("step budget of {} exhausted", self.max_steps),
                });
            }
            let h_min = 16.0 * f64::EPSILON * t.abs().max(1.0);
            if h < h_min {
                return Err(Error::Integration {
                    t,
                    reason: format!("step size underflow (h = {h:e})"),
                });
            }
            let mut hs = dir * h.min(self.h_max);
            if (t + hs - t_end) * dir > 0.0 {
                hs = t_end - t;
            }

            let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * hs, &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + hs,
                &axpy(&y, hs, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y1 = axpy(
                &y,
                hs,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + hs, &y1);

            let err_vec: State<N> = std::array::from_fn(|i| {
                hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            });
            let err = if finite(&y1) && finite(&k7) {
                self.err_norm(&y, &y1, &err_vec)
            } else {
                f64::INFINITY
            };

            if err <= 1.0 {
                let r2: State<N> = std::array::from_fn(|i| y1[i] - y[i]);
                let r3: State<N> = std::array::from_fn(|i| hs * k1[i] - r2[i]);
                let r4: State<N> = std::array::from_fn(|i| r2[i] - hs * k7[i] - r3[i]);
                let r5: State<N> = std::array::from_fn(|i| {
                    hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                });
                let step = DenseStep {
                    t0: t,
                    t1: t + hs,
                    y0: y,
                    y1,
                    cont: [y, r2, r3, r4, r5],
                };
                steps += 1;
                match observe(&step) {
                    Control::Continue => {}
                    Control::StopAt(ts) => {
                        let ts = ts.clamp(step.t0.min(step.t1), step.t0.max(step.t1));
                        return Ok(Solution {
                            t: ts,
                            y: step.eval(ts),
                            steps,
                            rejected,
                            stopped: true,
                        });
                    }
                }
                t = step.t1;
                y = y1;
                k1 = k7;
                let mut fac = 0.9 * err.max(1e-10).powf(-0.2);
                fac = fac.clamp(0.2, 10.0);
                if last_rejected {
                    fac = fac.min(1.0);
                }
                h = hs.abs() * fac;
                last_rejected = false;
            } else {
                rejected += 1;
                last_rejected = true;
                let fac = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = hs.abs() * fac;
            }
        }
        Ok(Solution {
            t,
            y,
            steps,
            rejected,
            stopped: false,
        })
    }
}

//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with dense output.
//!
//! Fixed-size states (`[T; N]`) keep the hot loop allocation free. Each
//! accepted step stores its continuous-extension coefficients so the
//! solution can be evaluated anywhere in range with 4th-order accuracy.

use crate::error::{Error, Result};
use crate::real::{lit, Real};

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

// 5th minus embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension (Hairer & Wanner, DOPRI5 `contd5`)
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Dense-output record of one accepted step on [t, t + h].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseStep<T, const N: usize> {
    pub t: T,
    pub h: T,
    coeffs: [[T; N]; 5],
}

impl<T: Real, const N: usize> DenseStep<T, N> {
    pub fn end(&self) -> T {
        self.t + self.h
    }

    pub fn start_state(&self) -> [T; N] {
        self.coeffs[0]
    }

    pub fn end_state(&self) -> [T; N] {
        let mut y = self.coeffs[0];
        for (yi, di) in y.iter_mut().zip(self.coeffs[1]) {
            *yi = *yi + di;
        }
        y
    }

    /// Interpolated state at `t` (expected within the step).
    pub fn eval(&self, t: T) -> [T; N] {
        let theta = (t - self.t) / self.h;
        let theta1 = T::one() - theta;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        std::array::from_fn(|i| {
            r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])))
        })
    }
}

/// Piecewise dense solution over the integrated range.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T, const N: usize> {
    steps: Vec<DenseStep<T, N>>,
    /// Set when the stop predicate ended the integration before `t_end`.
    pub stopped_early: bool,
}

impl<T: Real, const N: usize> Solution<T, N> {
    pub fn steps(&self) -> &[DenseStep<T, N>] {
        &self.steps
    }

    pub fn start(&self) -> T {
        self.steps.first().map(|s| s.t).unwrap_or_else(T::nan)
    }

    pub fn end(&self) -> T {
        self.steps.last().map(|s| s.end()).unwrap_or_else(T::nan)
    }

    pub fn final_state(&self) -> [T; N] {
        self.steps.last().expect("non-empty solution").end_state()
    }

    /// Index of the step containing `t`.
    pub fn locate(&self, t: T) -> Result<usize> {
        let (start, end) = (self.start(), self.end());
        if self.steps.is_empty() || !(t >= start && t <= end) {
            return Err(Error::OutOfRange {
                t: t.to_f64_lossy(),
                start: start.to_f64_lossy(),
                end: end.to_f64_lossy(),
            });
        }
        let idx = self.steps.partition_point(|s| s.end() < t);
        Ok(idx.min(self.steps.len() - 1))
    }

    pub fn eval(&self, t: T) -> Result<[T; N]> {
        let i = self.locate(t)?;
        Ok(self.steps[i].eval(t))
    }
}

/// Adaptive Dormand–Prince 5(4) settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Dopri5<T, const N: usize> {
    pub rtol: T,
    pub atol: [T; N],
    pub initial_step: Option<T>,
    pub max_step: Option<T>,
    pub max_steps: usize,
}

impl<T: Real, const N: usize> Dopri5<T, N> {
    pub fn new(rtol: T, atol: T) -> Self {
        Self {
            rtol,
            atol: [atol; N],
            initial_step: None,
            max_step: None,
            max_steps: 2_000_000,
        }
    }

    pub fn with_atol(mut self, atol: [T; N]) -> Self {
        self.atol = atol;
        self
    }

    pub fn with_initial_step(mut self, h: T) -> Self {
        self.initial_step = Some(h);
        self
    }

    pub fn with_max_step(mut self, h: T) -> Self {
        self.max_step = Some(h);
        self
    }

    fn error_norm(&self, y: &[T; N], y_new: &[T; N], err: &[T; N]) -> T {
        let mut acc = T::zero();
        for i in 0..N {
            let sc = self.atol[i] + self.rtol * y[i].abs().max(y_new[i].abs());
            let e = err[i] / sc;
            acc = acc + e * e;
        }
        (acc / lit(N as f64)).sqrt()
    }

    fn initial_step_guess<F>(&self, rhs: &mut F, t0: T, y0: &[T; N], f0: &[T; N], span: T) -> T
    where
        F: FnMut(T, &[T; N]) -> [T; N],
    {
        // Hairer's starting step heuristic
        let mut d0 = T::zero();
        let mut d1 = T::zero();
        for i in 0..N {
            let sc = self.atol[i] + self.rtol * y0[i].abs();
            d0 = d0 + (y0[i] / sc).powi(2);
            d1 = d1 + (f0[i] / sc).powi(2);
        }
        let n = lit::<T>(N as f64);
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let tiny = lit::<T>(1e-5);
        let mut h0 = if d0 < tiny || d1 < tiny {
            lit::<T>(1e-6) * span
        } else {
            lit::<T>(0.01) * d0 / d1
        };
        h0 = h0.min(span);
        let y1: [T; N] = std::array::from_fn(|i| y0[i] + h0 * f0[i]);
        let f1 = rhs(t0 + h0, &y1);
        let mut d2 = T::zero();
        for i in 0..N {
            let sc = self.atol[i] + self.rtol * y0[i].abs();
            d2 = d2 + ((f1[i] - f0[i]) / sc).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= lit(1e-15) {
            (h0 * lit(1e-3)).max(lit::<T>(1e-6) * span)
        } else {
            (lit::<T>(0.01) / dm).powf(lit(0.2))
        };
        (lit::<T>(100.0) * h0).min(h1).min(span)
    }

    /// Integrate from `t0` to `t_end` (> t0). `stop` is called after every
    /// accepted step with the new time and state; returning `true` ends the
    /// integration there.
    pub fn solve<F, S>(
        &self,
        mut rhs: F,
        t0: T,
        y0: [T; N],
        t_end: T,
        mut stop: S,
    ) -> Result<Solution<T, N>>
    where
        F: FnMut(T, &[T; N]) -> [T; N],
        S: FnMut(T, &[T; N]) -> bool,
    {
        if !(t_end > t0) {
            return Err(crate::error::invalid("t_end", "must exceed the start time"));
        }
        let span = t_end - t0;
        let h_max = self.max_step.unwrap_or(span);
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        let mut h = match self.initial_step {
            Some(h) => h,
            None => self.initial_step_guess(&mut rhs, t0, &y0, &k1, span),
        }
        .min(h_max);
        let mut steps = Vec::new();
        let mut rejected_last = false;
        let safety = lit::<T>(0.9);
        let fac_min = lit::<T>(0.2);
        let fac_max = lit::<T>(10.0);
        let mut count = 0usize;

        loop {
            if count >= self.max_steps {
                return Err(Error::TooManySteps(self.max_steps));
            }
            count += 1;
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }
            if h <= T::epsilon() * lit::<T>(16.0) * t.abs().max(span * T::epsilon()) {
                return Err(Error::StepUnderflow {
                    t: t.to_f64_lossy(),
                });
            }

            let stage = |y: &[T; N], ks: &[(&[T; N], f64)]| -> [T; N] {
                std::array::from_fn(|i| {
                    let mut acc = T::zero();
                    for (k, a) in ks {
                        acc = acc + lit::<T>(*a) * k[i];
                    }
                    y[i] + h * acc
                })
            };

            let y2 = stage(&y, &[(&k1, A21)]);
            let k2 = rhs(t + lit::<T>(C2) * h, &y2);
            let y3 = stage(&y, &[(&k1, A31), (&k2, A32)]);
            let k3 = rhs(t + lit::<T>(C3) * h, &y3);
            let y4 = stage(&y, &[(&k1, A41), (&k2, A42), (&k3, A43)]);
            let k4 = rhs(t + lit::<T>(C4) * h, &y4);
            let y5 = stage(&y, &[(&k1, A51), (&k2, A52), (&k3, A53), (&k4, A54)]);
            let k5 = rhs(t + lit::<T>(C5) * h, &y5);
            let y6 = stage(
                &y,
                &[(&k1, A61), (&k2, A62), (&k3, A63), (&k4, A64), (&k5, A65)],
            );
            let k6 = rhs(t + h, &y6);
            let y_new = stage(
                &y,
                &[(&k1, A71), (&k3, A73), (&k4, A74), (&k5, A75), (&k6, A76)],
            );
            let k7 = rhs(t + h, &y_new);

            let err: [T; N] = std::array::from_fn(|i| {
                h * (lit::<T>(E1) * k1[i]
                    + lit::<T>(E3) * k3[i]
                    + lit::<T>(E4) * k4[i]
                    + lit::<T>(E5) * k5[i]
                    + lit::<T>(E6) * k6[i]
                    + lit::<T>(E7) * k7[i])
            });
            let e = self.error_norm(&y, &y_new, &err);
            if !e.is_finite() {
                h = h * fac_min;
                rejected_last = true;
                continue;
            }

            if e <= T::one() {
                let r2: [T; N] = std::array::from_fn(|i| y_new[i] - y[i]);
                let r3: [T; N] = std::array::from_fn(|i| h * k1[i] - r2[i]);
                let r4: [T; N] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
                let r5: [T; N] = std::array::from_fn(|i| {
                    h * (lit::<T>(D1) * k1[i]
                        + lit::<T>(D3) * k3[i]
                        + lit::<T>(D4) * k4[i]
                        + lit::<T>(D5) * k5[i]
                        + lit::<T>(D6) * k6[i]
                        + lit::<T>(D7) * k7[i])
                });
                steps.push(DenseStep {
                    t,
                    h,
                    coeffs: [y, r2, r3, r4, r5],
                });
                t = if last { t_end } else { t + h };
                y = y_new;
                k1 = k7;
                if last {
                    return Ok(Solution {
                        steps,
                        stopped_early: false,
                    });
                }
                if stop(t, &y) {
                    return Ok(Solution {
                        steps,
                        stopped_early: true,
                    });
                }
                let mut fac = safety * e.max(lit(1e-10)).powf(lit(-0.2));
                fac = fac
                    .min(if rejected_last { T::one() } else { fac_max })
                    .max(fac_min);
                h = (h * fac).min(h_max);
                rejected_last = false;
            } else {
                let fac = (safety * e.powf(lit(-0.2))).max(fac_min);
                h = h * fac;
                rejected_last = true;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let solver = Dopri5::<f64, 1>::new(1e-10, 1e-14);
        let sol = solver
            .solve(|_, y| [y[0]], 0.0, [1.0], 5.0, |_, _| false)
            .unwrap();
        let end = sol.final_state()[0];
        assert!((end / 5f64.exp() - 1.0).abs() < 1e-9);
        // dense output between nodes
        for t in [0.013, 1.7, 3.33, 4.999] {
            let v = sol.eval(t).unwrap()[0];
            assert!((v / t.exp() - 1.0).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let solver = Dopri5::<f64, 2>::new(1e-11, 1e-13);
        let sol = solver
            .solve(|_, y| [y[1], -y[0]], 0.0, [0.0, 1.0], 30.0, |_, _| false)
            .unwrap();
        let mut t = 0.0;
        while t < 30.0 {
            let y = sol.eval(t).unwrap();
            assert!((y[0] - t.sin()).abs() < 1e-9, "t={t}");
            assert!((y[1] - t.cos()).abs() < 1e-9, "t={t}");
            t += 0.377;
        }
    }

    #[test]
    fn stop_predicate() {
        let solver = Dopri5::<f64, 1>::new(1e-8, 1e-12);
        let sol = solver
            .solve(|_, _| [1.0], 0.0, [0.0], 100.0, |_, y| y[0] > 10.0)
            .unwrap();
        assert!(sol.stopped_early);
        assert!(sol.end() < 100.0 && sol.final_state()[0] > 10.0);
    }

    #[test]
    fn out_of_range_lookup() {
        let solver = Dopri5::<f64, 1>::new(1e-8, 1e-12);
        let sol = solver
            .solve(|_, y| [-y[0]], 0.0, [1.0], 1.0, |_, _| false)
            .unwrap();
        assert!(matches!(sol.eval(1.5), Err(Error::OutOfRange { .. })));
        assert!(matches!(sol.eval(-0.1), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn step_limit() {
        let mut solver = Dopri5::<f64, 1>::new(1e-8, 1e-12);
        solver.max_steps = 3;
        let r = solver.solve(|t, _| [(50.0 * t).cos()], 0.0, [0.0], 100.0, |_, _| false);
        assert!(matches!(r, Err(Error::TooManySteps(3))));
    }

    #[test]
    fn single_precision() {
        let solver = Dopri5::<f32, 1>::new(1e-5, 1e-7);
        let sol = solver
            .solve(|_, y| [-y[0]], 0.0, [1.0], 2.0, |_, _| false)
            .unwrap();
        assert!((sol.final_state()[0] - (-2.0f32).exp()).abs() < 1e-5);
    }
}

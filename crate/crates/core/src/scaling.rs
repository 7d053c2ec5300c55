//! Self-similar expansion of the condensate: the scale factor b(t), its
//! proper time, and the background density and flow it implies.
//!
//! With ρ0(t) = ρ0(0)/b^D and v0 = (ḃ/b) r, the Thomas-Fermi scaling
//! solution obeys
//!
//! ```text
//! b̈ = −ω_ext²(t) b + ω0² / b^p,   p = D(N−1) + 1,   b(0) = 1, ḃ(0) = 0.
//! ```
//!
//! The single exponent p reproduces b̈ = ω0²/b³ for the flat cases and
//! b̈ = ω0²/b⁴ for the quartic 3D gas.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::exponent::{ratio_to_real, Dimension, ScalingPowers};
use crate::ode::{Dopri5, Solution};
use crate::real::{lit, Real};

/// Relative distance of ḃ from its asymptote below which the trajectory
/// counts as linear (b ≈ α(t − t_off)).
pub const ASYMPTOTE_TOLERANCE: f64 = 1e-3;

/// External trap frequency for t ≥ 0. For t < 0 the trap is always at ω0.
#[derive(Clone)]
pub enum Schedule<T> {
    /// Trap switched off instantaneously at t = 0.
    FreeExpansion,
    /// Trap held at ω0 forever.
    Static,
    /// Arbitrary ω_ext(t) ≥ 0 for t ≥ 0.
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T> fmt::Debug for Schedule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::FreeExpansion => f.write_str("FreeExpansion"),
            Schedule::Static => f.write_str("Static"),
            Schedule::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExpansionProtocol<T> {
    pub initial_frequency: T,
    pub schedule: Schedule<T>,
}

impl<T: Real> ExpansionProtocol<T> {
    pub fn free(omega0: T) -> Result<Self> {
        Self::new(omega0, Schedule::FreeExpansion)
    }

    pub fn new(omega0: T, schedule: Schedule<T>) -> Result<Self> {
        if !(omega0 > T::zero()) {
            return Err(invalid("initial_frequency", "must be positive"));
        }
        Ok(Self {
            initial_frequency: omega0,
            schedule,
        })
    }

    pub fn external_frequency(&self, t: T) -> T {
        if t < T::zero() {
            return self.initial_frequency;
        }
        match &self.schedule {
            Schedule::FreeExpansion => T::zero(),
            Schedule::Static => self.initial_frequency,
            Schedule::Custom(f) => f(t).max(T::zero()),
        }
    }
}

/// b̈ for the scaling solution.
pub fn scale_ode_rhs<T: Real>(
    b: T,
    t: T,
    protocol: &ExpansionProtocol<T>,
    powers: ScalingPowers,
) -> Result<T> {
    if !(b > T::zero()) {
        return Err(invalid("b", "scale factor must be positive"));
    }
    Ok(acceleration(
        b,
        t,
        protocol,
        ratio_to_real(powers.restoring_power()),
    ))
}

fn acceleration<T: Real>(b: T, t: T, protocol: &ExpansionProtocol<T>, p: T) -> T {
    let w = protocol.external_frequency(t);
    let w0 = protocol.initial_frequency;
    -w * w * b + w0 * w0 / b.powf(p)
}

/// Closed-form free expansion of the flat 2D gas: b = √(1 + ω0²t²).
pub fn analytic_scale_2d<T: Real>(t: T, omega0: T) -> (T, T) {
    let b = (T::one() + omega0 * omega0 * t * t).sqrt();
    (b, omega0 * omega0 * t / b)
}

/// Anything that supplies (b, ḃ) over a time range.
pub trait Expansion<T: Real> {
    fn scale_at(&self, t: T) -> Result<(T, T)>;
    fn time_range(&self) -> (T, T);
    /// Linear late-time asymptote, if reached.
    fn asymptote(&self) -> Option<LinearExpansion<T>>;
}

/// Purely linear expansion b = α (t − t_off), valid for t > t_off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearExpansion<T> {
    pub alpha: T,
    pub t_offset: T,
}

impl<T: Real> LinearExpansion<T> {
    pub fn new(alpha: T, t_offset: T) -> Result<Self> {
        if !(alpha > T::zero()) {
            return Err(invalid("alpha", "must be positive"));
        }
        Ok(Self { alpha, t_offset })
    }
}

impl<T: Real> Expansion<T> for LinearExpansion<T> {
    fn scale_at(&self, t: T) -> Result<(T, T)> {
        if !(t > self.t_offset) {
            return Err(Error::OutOfRange {
                t: t.to_f64_lossy(),
                start: self.t_offset.to_f64_lossy(),
                end: f64::INFINITY,
            });
        }
        Ok((self.alpha * (t - self.t_offset), self.alpha))
    }

    fn time_range(&self) -> (T, T) {
        (self.t_offset, T::infinity())
    }

    fn asymptote(&self) -> Option<LinearExpansion<T>> {
        Some(*self)
    }
}

/// Integrated scale-factor history.
#[derive(Debug, Clone)]
pub struct ScaleTrajectory<T> {
    pub powers: ScalingPowers,
    pub initial_frequency: T,
    pub tolerance: T,
    solution: Solution<T, 2>,
    /// (t, b, ḃ) at every accepted step boundary, starting at t = 0.
    pub samples: Vec<(T, T, T)>,
    /// (t, τ) at the same times, in the proper-time convention of
    /// [`proper_time`].
    pub proper_time_samples: Vec<(T, T)>,
    /// Late-time ḃ from the energy integral, when the trap is off at the end.
    pub asymptotic_velocity: Option<T>,
    /// Whether ḃ is within [`ASYMPTOTE_TOLERANCE`] of the asymptote at the end.
    pub converged: bool,
}

/// Integrates the scale-factor equation from b(0) = 1, ḃ(0) = 0 to `t_max`
/// with relative tolerance `tolerance`.
pub fn integrate_scale_factor<T: Real>(
    protocol: &ExpansionProtocol<T>,
    powers: ScalingPowers,
    t_max: T,
    tolerance: T,
) -> Result<ScaleTrajectory<T>> {
    if !(t_max > T::zero()) {
        return Err(invalid("t_max", "must be positive"));
    }
    if !(tolerance > lit(1e-14) && tolerance < lit(1e-4)) {
        return Err(invalid("tolerance", "must lie in (1e-14, 1e-4)"));
    }
    let w0 = protocol.initial_frequency;
    let p: T = ratio_to_real(powers.restoring_power());
    // b ≥ 1 and ḃ ~ ω0, so the absolute floors only matter near ḃ(0) = 0
    let solver = Dopri5::new(tolerance, tolerance * lit(1e-3))
        .with_atol([tolerance * lit(1e-3), tolerance * w0 * lit(1e-3)]);
    let solution = solver.solve(
        |t, y| {
            [
                y[1],
                acceleration(y[0].max(T::min_positive_value()), t, protocol, p),
            ]
        },
        T::zero(),
        [T::one(), T::zero()],
        t_max,
        |_, _| false,
    )?;

    let mut samples = Vec::with_capacity(solution.steps().len() + 1);
    samples.push((T::zero(), T::one(), T::zero()));
    for step in solution.steps() {
        let [b, db] = step.end_state();
        samples.push((step.end(), b, db));
    }

    let (t_end, b_end, db_end) = *samples.last().unwrap();
    let free_at_end = protocol.external_frequency(t_end) == T::zero();
    let (asymptotic_velocity, converged) = if free_at_end && db_end > T::zero() {
        // ½ḃ² + ω0² b^{1−p}/(p−1) is conserved once the trap is off
        let alpha = (db_end * db_end
            + lit::<T>(2.0) * w0 * w0 * b_end.powf(T::one() - p) / (p - T::one()))
        .sqrt();
        (
            Some(alpha),
            (alpha - db_end) / alpha <= lit(ASYMPTOTE_TOLERANCE),
        )
    } else {
        (None, false)
    };

    let mut trajectory = ScaleTrajectory {
        powers,
        initial_frequency: w0,
        tolerance,
        solution,
        samples,
        proper_time_samples: Vec::new(),
        asymptotic_velocity,
        converged,
    };
    let tau = proper_time(&trajectory)?;
    trajectory.proper_time_samples = trajectory
        .samples
        .iter()
        .map(|&(t, _, _)| (t, tau.integral.up_to_index_end(t)))
        .collect();
    Ok(trajectory)
}

impl<T: Real> ScaleTrajectory<T> {
    pub fn dimension(&self) -> Dimension {
        self.powers.dimension
    }

    pub fn end_time(&self) -> T {
        self.solution.end()
    }

    /// (b, ḃ) at `t` from the dense output; t < 0 returns the trapped state.
    pub fn state(&self, t: T) -> Result<(T, T)> {
        if t <= T::zero() {
            return Ok((T::one(), T::zero()));
        }
        let [b, db] = self.solution.eval(t)?;
        Ok((b, db))
    }

    /// Offset of the linear asymptote b ≈ α (t − t_off), fitted at the end.
    pub fn asymptote_offset(&self) -> Option<T> {
        let alpha = self.asymptotic_velocity?;
        let (t, b, _) = *self.samples.last()?;
        Some(t - b / alpha)
    }

    /// Linear asymptote, when the trajectory has converged onto it.
    pub fn linear_asymptote(&self) -> Option<LinearExpansion<T>> {
        if !self.converged {
            return None;
        }
        LinearExpansion::new(self.asymptotic_velocity?, self.asymptote_offset()?).ok()
    }

    /// First integral ½ḃ² + ω0² b^{−(p−1)}/(p−1) of the free expansion.
    pub fn energy(&self, b: T, db: T) -> T {
        let p: T = ratio_to_real(self.powers.restoring_power());
        let w0 = self.initial_frequency;
        lit::<T>(0.5) * db * db + w0 * w0 * b.powf(T::one() - p) / (p - T::one())
    }

    /// ∫ b^power dt with Gauss-Legendre quadrature on every dense step.
    pub fn power_integral(&self, power: T) -> PowerIntegral<'_, T> {
        let mut cumulative = Vec::with_capacity(self.solution.steps().len() + 1);
        let mut acc = T::zero();
        cumulative.push(acc);
        for step in self.solution.steps() {
            acc = acc + gauss_legendre(step.t, step.end(), |t| step.eval(t)[0].powf(power));
            cumulative.push(acc);
        }
        let tail_from_end = self
            .linear_asymptote()
            .filter(|_| power < -T::one())
            .map(|_| {
                let &(_, b, _) = self.samples.last().unwrap();
                self.free_tail(b, power)
            });
        PowerIntegral {
            trajectory: self,
            power,
            cumulative,
            tail_from_end,
        }
    }

    /// ∫_{b0}^∞ b^e db / ḃ(b) with ḃ(b) from the conserved energy, assuming
    /// the trap stays off. Substituting u = b0/b gives a smooth integrand
    /// apart from u^{−e−2} at the origin, handled by a dyadic mesh.
    fn free_tail(&self, b0: T, e: T) -> T {
        let p: T = ratio_to_real(self.powers.restoring_power());
        let w0 = self.initial_frequency;
        let two_e = lit::<T>(2.0) * self.energy(T::one(), T::zero());
        let integrand = |u: T| {
            if u <= T::zero() {
                return T::zero();
            }
            let b = b0 / u;
            let v2 = two_e - lit::<T>(2.0) * w0 * w0 * b.powf(T::one() - p) / (p - T::one());
            u.powf(-e - lit(2.0)) / v2.max(T::min_positive_value()).sqrt()
        };
        let mut acc = T::zero();
        let mut hi = T::one();
        for _ in 0..64 {
            let lo = hi * lit(0.5);
            acc = acc + gauss_legendre(lo, hi, integrand);
            hi = lo;
        }
        acc * b0.powf(e + T::one())
    }
}

impl<T: Real> Expansion<T> for ScaleTrajectory<T> {
    fn scale_at(&self, t: T) -> Result<(T, T)> {
        self.state(t)
    }

    fn time_range(&self) -> (T, T) {
        (T::zero(), self.end_time())
    }

    fn asymptote(&self) -> Option<LinearExpansion<T>> {
        self.linear_asymptote()
    }
}

const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// 8-point Gauss-Legendre rule on [a, b].
pub(crate) fn gauss_legendre<T: Real>(a: T, b: T, f: impl Fn(T) -> T) -> T {
    let half = (b - a) * lit(0.5);
    let mid = (a + b) * lit(0.5);
    let mut acc = T::zero();
    for (&x, &w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
        let dx = half * lit(x);
        acc = acc + lit::<T>(w) * (f(mid - dx) + f(mid + dx));
    }
    acc * half
}

/// Cumulative ∫_0^t b^power dt' over a trajectory, with the closed-form tail
/// of the linear regime for t beyond the last sample.
#[derive(Debug, Clone)]
pub struct PowerIntegral<'a, T> {
    trajectory: &'a ScaleTrajectory<T>,
    power: T,
    cumulative: Vec<T>,
    tail_from_end: Option<T>,
}

impl<'a, T: Real> PowerIntegral<'a, T> {
    pub fn power(&self) -> T {
        self.power
    }

    fn up_to_index_end(&self, t: T) -> T {
        self.up_to(t).unwrap_or_else(|_| T::nan())
    }

    /// ∫_0^t b^power dt'. Beyond the trajectory end the linear asymptote is
    /// integrated analytically (requires convergence).
    pub fn up_to(&self, t: T) -> Result<T> {
        let traj = self.trajectory;
        if t <= T::zero() {
            return Ok(t);
        }
        let end = traj.end_time();
        if t > end {
            let lin = traj.linear_asymptote().ok_or_else(|| {
                Error::NotConverged(format!("cannot extend beyond t = {}", end.to_f64_lossy()))
            })?;
            let total = *self.cumulative.last().unwrap();
            return Ok(total + linear_power_integral(lin, self.power, end, t));
        }
        let steps = traj.solution.steps();
        let i = traj.solution.locate(t)?;
        let step = &steps[i];
        Ok(self.cumulative[i] + gauss_legendre(step.t, t, |s| step.eval(s)[0].powf(self.power)))
    }

    /// ∫_t^∞ b^power dt', finite when power < −1 and the trajectory has
    /// reached its linear asymptote; `None` signals divergence.
    pub fn remaining(&self, t: T) -> Result<Option<T>> {
        let traj = self.trajectory;
        let Some(lin) = traj.linear_asymptote() else {
            return Ok(None);
        };
        let Some(tail_from_end) = self.tail_from_end else {
            return Ok(None);
        };
        let end = traj.end_time();
        if t >= end {
            // b beyond the last sample from the linear asymptote
            let b = lin.alpha * (t - lin.t_offset);
            return Ok(Some(traj.free_tail(b, self.power)));
        }
        let total = *self.cumulative.last().unwrap();
        Ok(Some(total - self.up_to(t)? + tail_from_end))
    }
}

fn linear_power_integral<T: Real>(lin: LinearExpansion<T>, e: T, from: T, to: T) -> T {
    let b0 = lin.alpha * (from - lin.t_offset);
    let b1 = lin.alpha * (to - lin.t_offset);
    if (e + T::one()).abs() < T::epsilon() {
        (b1 / b0).ln() / lin.alpha
    } else {
        (b1.powf(e + T::one()) - b0.powf(e + T::one())) / (lin.alpha * (e + T::one()))
    }
}

/// Proper time τ(t) of the co-moving frame.
#[derive(Debug, Clone)]
pub struct ProperTime<'a, T> {
    integral: PowerIntegral<'a, T>,
    scale: T,
    pub flat_convention: bool,
}

impl<'a, T: Real> ProperTime<'a, T> {
    pub fn at(&self, t: T) -> Result<T> {
        Ok(self.scale * self.integral.up_to(t)?)
    }

    /// τ(∞), finite whenever the expansion is asymptotically linear.
    pub fn limit(&self) -> Result<Option<T>> {
        Ok(self.integral.remaining(T::zero())?.map(|r| self.scale * r))
    }

    /// Multiplies by √A(0)·c_N(0) to obtain the dimensionful general-branch
    /// proper time.
    pub fn scaled(mut self, factor: T) -> Self {
        self.scale = self.scale * factor;
        self
    }
}

/// Proper time of the trajectory.
///
/// Flat (D, N) use τ = ∫dt/b². Otherwise τ = √A(0) c_N(0) ∫ b^e dt with
/// √A·c_N ∝ b^e; the returned value is in units of √A(0) c_N(0) (apply
/// [`ProperTime::scaled`] for the dimensionful form).
pub fn proper_time<T: Real>(trajectory: &ScaleTrajectory<T>) -> Result<ProperTime<'_, T>> {
    let powers = trajectory.powers;
    if powers.is_flat() {
        return Ok(ProperTime {
            integral: trajectory.power_integral(lit(-2.0)),
            scale: T::one(),
            flat_convention: true,
        });
    }
    let e = powers
        .proper_time_power()
        .ok_or(Error::ConformalFactorUndefined)?;
    Ok(ProperTime {
        integral: trajectory.power_integral(ratio_to_real(e)),
        scale: T::one(),
        flat_convention: false,
    })
}

/// Background density, flow velocity and co-moving position at (t, r).
#[derive(Debug, Clone, PartialEq)]
pub struct BackgroundFields<T> {
    pub density: T,
    pub velocity: Vec<T>,
    pub comoving: Vec<T>,
}

pub fn background_fields<T: Real>(
    trajectory: &ScaleTrajectory<T>,
    initial_density: T,
    t: T,
    r: &[T],
) -> Result<BackgroundFields<T>> {
    if r.len() != trajectory.dimension().get() as usize {
        return Err(invalid("r", "length must equal the spatial dimension"));
    }
    let (b, db) = trajectory.state(t)?;
    let hubble = db / b;
    Ok(BackgroundFields {
        density: initial_density / b.powi(trajectory.dimension().get() as i32),
        velocity: r.iter().map(|&x| hubble * x).collect(),
        comoving: r.iter().map(|&x| x / b).collect(),
    })
}

/// Classical factors of the scaling map ψ(t, r) = e^{iφ} b^{−D/2} ψ̃(τ, r/b).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingMap<T> {
    pub amplitude: T,
    /// φ = m v0²/2 (ħ = 1).
    pub phase: T,
}

pub fn scaling_map_amplitude<T: Real>(
    dimension: Dimension,
    b: T,
    mass: T,
    velocity_squared: T,
) -> Result<ScalingMap<T>> {
    if !(b > T::zero()) {
        return Err(invalid("b", "scale factor must be positive"));
    }
    Ok(ScalingMap {
        amplitude: b.powf(-dimension.as_real::<T>() / lit(2.0)),
        phase: mass * velocity_squared / lit(2.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Exponent;

    fn pw(d: u8, n: i64, m: i64) -> ScalingPowers {
        ScalingPowers::new(Dimension::new(d).unwrap(), Exponent::new(n, m).unwrap())
    }

    #[test]
    fn rhs_examples() {
        let free = ExpansionProtocol::free(1.3_f64).unwrap();
        let a = scale_ode_rhs(1.0, 0.0, &free, pw(2, 2, 1)).unwrap();
        assert!((a - 1.69).abs() < 1e-14);
        let a = scale_ode_rhs(2.0, 5.0, &free, pw(3, 2, 1)).unwrap();
        assert!((a - 1.69 / 16.0).abs() < 1e-14);
        // N = 5/3 in 3D has the same restoring power as the flat 2D gas
        let a = scale_ode_rhs(1.7, 1.0, &free, pw(3, 5, 3)).unwrap();
        let b = scale_ode_rhs(1.7, 1.0, &free, pw(2, 2, 1)).unwrap();
        assert_eq!(a, b);
        assert!(scale_ode_rhs(0.0, 0.0, &free, pw(2, 2, 1)).is_err());
    }

    #[test]
    fn analytic_2d() {
        assert_eq!(analytic_scale_2d(0.0_f64, 2.0), (1.0, 0.0));
        let (b, _) = analytic_scale_2d(0.5_f64, 2.0);
        assert!((b - 2f64.sqrt()).abs() < 1e-15);
        let (_, db) = analytic_scale_2d(1e9_f64, 2.0);
        assert!((db - 2.0).abs() < 1e-9);
    }

    #[test]
    fn static_trap_stays_put() {
        let proto = ExpansionProtocol::new(1.0_f64, Schedule::Static).unwrap();
        let traj = integrate_scale_factor(&proto, pw(2, 2, 1), 50.0, 1e-10).unwrap();
        for &(_, b, db) in &traj.samples {
            assert!((b - 1.0).abs() < 1e-12 && db.abs() < 1e-12);
        }
        assert!(traj.asymptotic_velocity.is_none());
        assert!(!traj.converged);
        let tau = proper_time(&traj).unwrap();
        assert!((tau.at(20.0).unwrap() - 20.0).abs() < 1e-9);
        assert_eq!(tau.limit().unwrap(), None);
    }

    #[test]
    fn tolerance_and_range_validation() {
        let proto = ExpansionProtocol::free(1.0_f64).unwrap();
        assert!(integrate_scale_factor(&proto, pw(2, 2, 1), 10.0, 1e-3).is_err());
        assert!(integrate_scale_factor(&proto, pw(2, 2, 1), 10.0, 1e-15).is_err());
        assert!(integrate_scale_factor(&proto, pw(2, 2, 1), -1.0, 1e-8).is_err());
    }

    #[test]
    fn background_field_examples() {
        let proto = ExpansionProtocol::free(1.0_f64).unwrap();
        let traj = integrate_scale_factor(&proto, pw(2, 2, 1), 10.0, 1e-10).unwrap();
        let f = background_fields(&traj, 4.0, 0.0, &[1.0, 2.0]).unwrap();
        assert_eq!(f.density, 4.0);
        assert_eq!(f.velocity, vec![0.0, 0.0]);
        assert_eq!(f.comoving, vec![1.0, 2.0]);
        // b = 2 at t = √3
        let f = background_fields(&traj, 4.0, 3f64.sqrt(), &[1.0, 0.0]).unwrap();
        assert!((f.density - 1.0).abs() < 1e-9);
        assert!(background_fields(&traj, 4.0, 11.0, &[1.0, 0.0]).is_err());
        assert!(background_fields(&traj, 4.0, 1.0, &[1.0]).is_err());
    }

    #[test]
    fn scaling_map_examples() {
        let m = scaling_map_amplitude(Dimension::TWO, 1.0_f64, 1.0, 0.0).unwrap();
        assert_eq!((m.amplitude, m.phase), (1.0, 0.0));
        let m = scaling_map_amplitude(Dimension::TWO, 4.0_f64, 1.0, 0.0).unwrap();
        assert!((m.amplitude - 0.25).abs() < 1e-15);
        let m = scaling_map_amplitude(Dimension::THREE, 2.0_f64, 3.0, 2.0).unwrap();
        assert!((m.amplitude - 2f64.powf(-1.5)).abs() < 1e-15);
        assert_eq!(m.phase, 3.0);
        assert!(scaling_map_amplitude(Dimension::TWO, 0.0_f64, 1.0, 0.0).is_err());
    }
}

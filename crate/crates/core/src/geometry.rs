//! Effective acoustic metric of the expanding condensate and its horizons.
//!
//! Phonons see the Painlevé-Gullstrand-Lemaître line element
//!
//! ```text
//! ds² = A [(c² − v0²) dt² + 2 v0·dr dt − dr²],   A = (c/g_N)^{2/(D−1)}.
//! ```

use crate::condensate::DerivedParams;
use crate::error::{invalid, Error, Result};
use crate::exponent::{ratio_to_real, Dimension, Exponent, ScalingPowers};
use crate::real::{lit, Real};
use crate::scaling::ScaleTrajectory;

/// Conformal factor A = (c/g_N)^{2/(D−1)}.
///
/// In one dimension a metric only exists when c/g_N is constant, which is
/// the case N = 3; A is then free and set to 1.
pub fn conformal_factor<T: Real>(
    sound_speed: T,
    coupling: T,
    dimension: Dimension,
    exponent: Exponent,
) -> Result<T> {
    if dimension == Dimension::ONE {
        return if exponent.ratio() == 3.into() {
            Ok(T::one())
        } else {
            Err(Error::ConformalFactorUndefined)
        };
    }
    if !(sound_speed > T::zero() && coupling > T::zero()) {
        return Err(invalid("conformal_factor", "c and g_N must be positive"));
    }
    let d: T = dimension.as_real();
    Ok((sound_speed / coupling).powf(lit::<T>(2.0) / (d - T::one())))
}

/// Small square matrix of size D + 1 (at most 4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix<T> {
    pub size: usize,
    pub entries: [[T; 4]; 4],
}

impl<T: Real> Matrix<T> {
    fn zeros(size: usize) -> Self {
        Self {
            size,
            entries: [[T::zero(); 4]; 4],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i][j]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                let mut acc = T::zero();
                for k in 0..self.size {
                    acc = acc + self.entries[i][k] * other.entries[k][j];
                }
                out.entries[i][j] = acc;
            }
        }
        out
    }

    /// Largest |M − 1| entry.
    pub fn distance_from_identity(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.size {
            for j in 0..self.size {
                let id = if i == j { T::one() } else { T::zero() };
                worst = worst.max((self.entries[i][j] - id).abs());
            }
        }
        worst
    }
}

/// Acoustic metric at one event.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveMetric<T> {
    pub conformal_factor: T,
    pub sound_speed: T,
    pub flow_velocity: Vec<T>,
    pub dimension: Dimension,
    pub exponent: Exponent,
}

impl<T: Real> EffectiveMetric<T> {
    pub fn new(
        conformal_factor: T,
        sound_speed: T,
        flow_velocity: Vec<T>,
        dimension: Dimension,
        exponent: Exponent,
    ) -> Result<Self> {
        if flow_velocity.len() != dimension.get() as usize {
            return Err(invalid(
                "flow_velocity",
                "length must equal the spatial dimension",
            ));
        }
        if !(conformal_factor > T::zero() && sound_speed > T::zero()) {
            return Err(invalid("metric", "A and c must be positive"));
        }
        Ok(Self {
            conformal_factor,
            sound_speed,
            flow_velocity,
            dimension,
            exponent,
        })
    }

    /// Metric of the scaling solution at (t, r).
    pub fn at(
        derived: &DerivedParams<T>,
        trajectory: &ScaleTrajectory<T>,
        t: T,
        r: &[T],
    ) -> Result<Self> {
        let powers = derived.powers();
        if r.len() != derived.dimension.get() as usize {
            return Err(invalid("r", "length must equal the spatial dimension"));
        }
        let (b, db) = trajectory.state(t)?;
        let c = derived.sound_speed * b.powf(-ratio_to_real::<T>(powers.sound_speed_decay()));
        let g = derived.effective_coupling * b.powf(-ratio_to_real::<T>(powers.coupling_decay()));
        let a = conformal_factor(c, g, derived.dimension, derived.exponent)?;
        let v = r.iter().map(|&x| db / b * x).collect();
        Self::new(a, c, v, derived.dimension, derived.exponent)
    }

    fn flow_squared(&self) -> T {
        self.flow_velocity
            .iter()
            .fold(T::zero(), |acc, &v| acc + v * v)
    }

    /// g00, vanishing where |v0| = c.
    pub fn g00(&self) -> T {
        let c = self.sound_speed;
        self.conformal_factor * (c * c - self.flow_squared())
    }

    pub fn covariant(&self) -> Matrix<T> {
        let n = self.flow_velocity.len() + 1;
        let a = self.conformal_factor;
        let mut m = Matrix::zeros(n);
        m.entries[0][0] = self.g00();
        for (i, &v) in self.flow_velocity.iter().enumerate() {
            m.entries[0][i + 1] = a * v;
            m.entries[i + 1][0] = a * v;
            m.entries[i + 1][i + 1] = -a;
        }
        m
    }

    pub fn contravariant(&self) -> Matrix<T> {
        let n = self.flow_velocity.len() + 1;
        let ac2 = self.conformal_factor * self.sound_speed * self.sound_speed;
        let c2 = self.sound_speed * self.sound_speed;
        let mut m = Matrix::zeros(n);
        m.entries[0][0] = T::one() / ac2;
        for (i, &vi) in self.flow_velocity.iter().enumerate() {
            m.entries[0][i + 1] = vi / ac2;
            m.entries[i + 1][0] = vi / ac2;
            for (j, &vj) in self.flow_velocity.iter().enumerate() {
                let delta = if i == j { c2 } else { T::zero() };
                m.entries[i + 1][j + 1] = -(delta - vi * vj) / ac2;
            }
        }
        m
    }
}

/// Exponent of b in A·b² and whether it vanishes.
///
/// For D = 1 the exponent is not defined; flatness then means N = 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flatness {
    pub exponent: Option<num_rational::Rational64>,
    pub is_flat: bool,
}

pub fn flatness_exponent(dimension: Dimension, exponent: Exponent) -> Flatness {
    let powers = ScalingPowers::new(dimension, exponent);
    Flatness {
        exponent: powers.spatial_factor_power(),
        is_flat: powers.is_flat(),
    }
}

/// c_N(t) = c_N(0) b^{−D(N−1)/2}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundSpeedHistory<T> {
    pub initial: T,
    pub decay: T,
}

impl<T: Real> SoundSpeedHistory<T> {
    pub fn new(initial: T, powers: ScalingPowers) -> Self {
        Self {
            initial,
            decay: ratio_to_real(powers.sound_speed_decay()),
        }
    }

    pub fn at_scale(&self, b: T) -> T {
        self.initial * b.powf(-self.decay)
    }

    pub fn at(&self, trajectory: &ScaleTrajectory<T>, t: T) -> Result<T> {
        Ok(self.at_scale(trajectory.state(t)?.0))
    }
}

pub fn sound_speed_history<T: Real>(
    initial: T,
    trajectory: &ScaleTrajectory<T>,
) -> SoundSpeedHistory<T> {
    SoundSpeedHistory::new(initial, trajectory.powers)
}

/// Horizon size, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HorizonSize<T> {
    Finite(T),
    Infinite,
}

impl<T: Real> HorizonSize<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            HorizonSize::Finite(x) => Some(x),
            HorizonSize::Infinite => None,
        }
    }

    /// Value with infinity mapped to `T::infinity()`.
    pub fn value(self) -> T {
        self.finite().unwrap_or_else(T::infinity)
    }
}

/// Co-moving particle horizon Δρ(t) = c_N(0) ∫_t^∞ dt'/b^{1+D(N−1)/2}.
pub fn particle_horizon<T: Real>(
    trajectory: &ScaleTrajectory<T>,
    initial_sound_speed: T,
    t: T,
) -> Result<HorizonSize<T>> {
    let q: T = ratio_to_real(trajectory.powers.horizon_power());
    let integral = trajectory.power_integral(-q);
    Ok(match integral.remaining(t)? {
        Some(r) => HorizonSize::Finite(initial_sound_speed * r),
        None => HorizonSize::Infinite,
    })
}

/// Lab-frame apparent horizon r = c_N(0) b^{1−D(N−1)/2}/ḃ.
pub fn apparent_horizon<T: Real>(
    trajectory: &ScaleTrajectory<T>,
    initial_sound_speed: T,
    t: T,
) -> Result<HorizonSize<T>> {
    let (b, db) = trajectory.state(t)?;
    let s: T = ratio_to_real(trajectory.powers.sound_speed_decay());
    Ok(apparent_radius(initial_sound_speed, s, b, db))
}

fn apparent_radius<T: Real>(c0: T, decay: T, b: T, db: T) -> HorizonSize<T> {
    if db <= T::zero() {
        HorizonSize::Infinite
    } else {
        HorizonSize::Finite(c0 * b.powf(T::one() - decay) / db)
    }
}

/// Late-time limit of the apparent horizon on the linear asymptote.
pub fn settled_apparent_horizon<T: Real>(
    trajectory: &ScaleTrajectory<T>,
    initial_sound_speed: T,
) -> Option<HorizonSize<T>> {
    let lin = trajectory.linear_asymptote()?;
    let s: T = ratio_to_real(trajectory.powers.sound_speed_decay());
    Some(if s == T::one() {
        HorizonSize::Finite(initial_sound_speed / lin.alpha)
    } else if s > T::one() {
        HorizonSize::Finite(T::zero())
    } else {
        HorizonSize::Infinite
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSample<T> {
    pub t: T,
    pub apparent: HorizonSize<T>,
    pub particle: HorizonSize<T>,
}

/// Horizon histories over the trajectory samples.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonReport<T> {
    pub samples: Vec<HorizonSample<T>>,
    pub settled_apparent: Option<HorizonSize<T>>,
}

impl<T: Real> HorizonReport<T> {
    /// Whether Δρ strictly decreases across all finite samples.
    pub fn particle_strictly_decreasing(&self) -> bool {
        self.samples
            .windows(2)
            .all(|w| match (w[0].particle, w[1].particle) {
                (HorizonSize::Finite(a), HorizonSize::Finite(b)) => b < a,
                (HorizonSize::Infinite, _) => true,
                _ => false,
            })
    }
}

pub fn horizon_report<T: Real>(
    trajectory: &ScaleTrajectory<T>,
    initial_sound_speed: T,
) -> Result<HorizonReport<T>> {
    let q: T = ratio_to_real(trajectory.powers.horizon_power());
    let s: T = ratio_to_real(trajectory.powers.sound_speed_decay());
    let integral = trajectory.power_integral(-q);
    let samples = trajectory
        .samples
        .iter()
        .map(|&(t, b, db)| {
            let particle = match integral.remaining(t)? {
                Some(r) => HorizonSize::Finite(initial_sound_speed * r),
                None => HorizonSize::Infinite,
            };
            Ok(HorizonSample {
                t,
                apparent: apparent_radius(initial_sound_speed, s, b, db),
                particle,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HorizonReport {
        samples,
        settled_apparent: settled_apparent_horizon(trajectory, initial_sound_speed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossing<T> {
    At(T),
    NotCrossed,
}

impl<T: Real> Crossing<T> {
    pub fn time(self) -> Option<T> {
        match self {
            Crossing::At(t) => Some(t),
            Crossing::NotCrossed => None,
        }
    }
}

/// Earliest t in the trajectory range where 2π/κ ≥ Δρ(t).
pub fn horizon_crossing_time<T: Real>(
    kappa: T,
    trajectory: &ScaleTrajectory<T>,
    initial_sound_speed: T,
) -> Result<Crossing<T>> {
    if !(kappa > T::zero()) {
        return Err(invalid("kappa", "must be positive"));
    }
    let wavelength = T::TAU() / kappa;
    let q: T = ratio_to_real(trajectory.powers.horizon_power());
    let integral = trajectory.power_integral(-q);
    let excess = |t: T| -> Result<Option<T>> {
        Ok(integral
            .remaining(t)?
            .map(|r| initial_sound_speed * r - wavelength))
    };
    let Some(f0) = excess(T::zero())? else {
        return Ok(Crossing::NotCrossed);
    };
    if f0 <= T::zero() {
        return Ok(Crossing::At(T::zero()));
    }
    let mut hi = trajectory.end_time();
    if excess(hi)?.unwrap_or(T::one()) > T::zero() {
        return Ok(Crossing::NotCrossed);
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid)?.unwrap_or(T::one()) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Crossing::At(hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    #[test]
    fn conformal_examples() {
        let d3 = Dimension::THREE;
        assert_eq!(
            conformal_factor(1.0_f64, 1.0, d3, Exponent::QUARTIC).unwrap(),
            1.0
        );
        let a = conformal_factor(3.0_f64, 2.0, Dimension::TWO, Exponent::QUARTIC).unwrap();
        assert!((a - 2.25).abs() < 1e-15);
        let a =
            conformal_factor(3.0_f64, 2.0, Dimension::ONE, Exponent::new(3, 1).unwrap()).unwrap();
        assert_eq!(a, 1.0);
        assert!(conformal_factor(3.0_f64, 2.0, Dimension::ONE, Exponent::QUARTIC).is_err());
    }

    #[test]
    fn static_metric_is_diagonal() {
        let m = EffectiveMetric::new(
            2.0_f64,
            3.0,
            vec![0.0, 0.0],
            Dimension::TWO,
            Exponent::QUARTIC,
        )
        .unwrap();
        let g = m.covariant();
        assert_eq!(g.get(0, 0), 18.0);
        assert_eq!(g.get(1, 1), -2.0);
        assert_eq!(g.get(0, 1), 0.0);
    }

    #[test]
    fn sonic_point_has_zero_g00() {
        let m = EffectiveMetric::new(
            1.5_f64,
            2.0,
            vec![1.2, 1.6],
            Dimension::TWO,
            Exponent::QUARTIC,
        )
        .unwrap();
        assert!(m.g00().abs() < 1e-14);
    }

    #[test]
    fn flatness_examples() {
        let f = flatness_exponent(Dimension::TWO, Exponent::QUARTIC);
        assert!(f.is_flat);
        assert_eq!(f.exponent, Some(Rational64::from_integer(0)));
        assert!(flatness_exponent(Dimension::THREE, Exponent::new(5, 3).unwrap()).is_flat);
        let f = flatness_exponent(Dimension::THREE, Exponent::QUARTIC);
        assert!(!f.is_flat);
        assert_eq!(f.exponent, Some(Rational64::new(1, 2)));
        assert!(!flatness_exponent(Dimension::TWO, Exponent::new(3, 1).unwrap()).is_flat);
        let f = flatness_exponent(Dimension::ONE, Exponent::new(3, 1).unwrap());
        assert!(f.is_flat && f.exponent.is_none());
    }

    #[test]
    fn sound_speed_examples() {
        let q2 = ScalingPowers::new(Dimension::TWO, Exponent::QUARTIC);
        let h = SoundSpeedHistory::new(1.0_f64, q2);
        assert_eq!(h.at_scale(1.0), 1.0);
        assert!((h.at_scale(2.0) - 0.5).abs() < 1e-15);
        let h = SoundSpeedHistory::new(
            1.0_f64,
            ScalingPowers::new(Dimension::THREE, Exponent::QUARTIC),
        );
        assert!((h.at_scale(4.0) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn apparent_radius_edge_cases() {
        assert_eq!(
            apparent_radius(1.0_f64, 1.0, 1.0, 0.0),
            HorizonSize::Infinite
        );
        assert_eq!(
            apparent_radius(2.0_f64, 1.0, 5.0, 0.5),
            HorizonSize::Finite(4.0)
        );
    }
}

//! Spatial dimension and self-coupling exponent, with the exact rational
//! powers of the scale factor that the background quantities follow.
//!
//! With ρ0 ∝ b^-D every background quantity is a power of b. Keeping those
//! powers as rationals makes flatness checks exact (N = 5/3 in 3D is flat,
//! not "flat up to rounding").

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::real::Real;

/// Number of spatial dimensions D ∈ {1, 2, 3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(u8);

impl Dimension {
    pub const ONE: Dimension = Dimension(1);
    pub const TWO: Dimension = Dimension(2);
    pub const THREE: Dimension = Dimension(3);

    pub fn new(d: u8) -> Result<Self> {
        match d {
            1..=3 => Ok(Dimension(d)),
            _ => Err(invalid("dimension", format!("{d} not in {{1, 2, 3}}"))),
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    fn rational(self) -> Rational64 {
        Rational64::from_integer(self.0 as i64)
    }

    pub fn as_real<T: Real>(self) -> T {
        T::lit(self.0 as f64)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Self-coupling exponent N of the |ψ|^{2N} interaction, stored exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Exponent(Rational64);

impl Exponent {
    pub const QUARTIC: Exponent = Exponent(Rational64::new_raw(2, 1));

    /// Accepts N > 1. N = 1 is an ideal gas without sound.
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(invalid("exponent", "zero denominator"));
        }
        Self::from_ratio(Rational64::new(numer, denom))
    }

    pub fn from_ratio(n: Rational64) -> Result<Self> {
        if n <= Rational64::one() {
            return Err(Error::NoSound(n.to_string()));
        }
        Ok(Exponent(n))
    }

    pub fn ratio(self) -> Rational64 {
        self.0
    }

    pub fn as_real<T: Real>(self) -> T {
        T::lit(self.0.to_f64().expect("finite rational"))
    }

    pub fn is_quartic(self) -> bool {
        self == Self::QUARTIC
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Parses "2", "5/3" or a terminating decimal such as "1.5".
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || invalid("exponent", format!("cannot parse `{s}` as a rational"));
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            return Self::new(n, d);
        }
        if let Some((whole, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let denom = 10i64.pow(frac.len() as u32);
            let whole: i64 = if whole.is_empty() {
                0
            } else {
                whole.parse().map_err(|_| bad())?
            };
            let frac: i64 = frac.parse().map_err(|_| bad())?;
            let sign = if s.starts_with('-') { -1 } else { 1 };
            return Self::new(whole * denom + sign * frac, denom);
        }
        let n: i64 = s.parse().map_err(|_| bad())?;
        Self::new(n, 1)
    }
}

/// Exact scale-factor powers for a given (D, N).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingPowers {
    pub dimension: Dimension,
    pub exponent: Exponent,
}

impl ScalingPowers {
    pub fn new(dimension: Dimension, exponent: Exponent) -> Self {
        Self {
            dimension,
            exponent,
        }
    }

    /// p in b̈ = ω0²/b^p for free expansion: p = D(N−1)+1.
    pub fn restoring_power(&self) -> Rational64 {
        self.dimension.rational() * (self.exponent.0 - 1) + 1
    }

    /// c_N ∝ b^{-D(N-1)/2}; returns the (positive) magnitude D(N−1)/2.
    pub fn sound_speed_decay(&self) -> Rational64 {
        self.dimension.rational() * (self.exponent.0 - 1) / 2
    }

    /// Exponent of b in A·b²: 2 + D(N−3)/(D−1); `None` for D = 1.
    pub fn spatial_factor_power(&self) -> Option<Rational64> {
        let d = self.dimension.rational();
        if self.dimension == Dimension::ONE {
            return None;
        }
        Some(Rational64::from_integer(2) + d * (self.exponent.0 - 3) / (d - 1))
    }

    /// Whether the co-moving metric is flat, i.e. N = 1 + 2/D.
    pub fn is_flat(&self) -> bool {
        self.exponent.0 == Rational64::one() + Rational64::new(2, self.dimension.0 as i64)
    }

    /// Power e with √A·c_N ∝ b^e (general proper-time integrand), D ≥ 2.
    ///
    /// For flat (D, N) this equals −2.
    pub fn proper_time_power(&self) -> Option<Rational64> {
        if self.dimension == Dimension::ONE {
            return None;
        }
        let d = self.dimension.rational();
        let n = self.exponent.0;
        Some(d * (n - 3) / ((d - 1) * 2) - d * (n - 1) / 2)
    }

    /// Power q of the particle-horizon integrand b^{-q}: q = 1 + D(N−1)/2.
    pub fn horizon_power(&self) -> Rational64 {
        Rational64::one() + self.sound_speed_decay()
    }

    /// g_N ∝ b^{-D(N-2)}; returns D(N−2) (zero for quartic coupling).
    pub fn coupling_decay(&self) -> Rational64 {
        let r = self.dimension.rational() * (self.exponent.0 - 2);
        if r.is_zero() {
            Rational64::zero()
        } else {
            r
        }
    }
}

pub(crate) fn ratio_to_real<T: Real>(r: Rational64) -> T {
    T::lit(*r.numer() as f64 / *r.denom() as f64)
}

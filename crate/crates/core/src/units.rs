//! SI constants and the conversion layer into internal natural units.
//!
//! Every formula inside the crate is written with ħ = 1. A [`NaturalUnits`]
//! value fixes a length unit and a time unit; the mass unit then follows from
//! ħ = 1 as `ħ·T/L²`. The defaults (1 μm, 1 ms) keep atomic masses, trap
//! frequencies and healing lengths of laboratory condensates at order one.

use crate::real::Real;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Unified atomic mass unit (kg).
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

/// Length and time units of an ħ = 1 system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaturalUnits<T> {
    length_m: T,
    time_s: T,
}

impl<T: Real> Default for NaturalUnits<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-6), T::lit(1e-3))
    }
}

impl<T: Real> NaturalUnits<T> {
    pub fn new(length_m: T, time_s: T) -> Self {
        assert!(length_m > T::zero() && time_s > T::zero());
        Self { length_m, time_s }
    }

    pub fn length_unit_m(&self) -> T {
        self.length_m
    }

    pub fn time_unit_s(&self) -> T {
        self.time_s
    }

    /// Mass unit in kg implied by ħ = 1.
    pub fn mass_unit_kg(&self) -> T {
        T::lit(HBAR) * self.time_s / (self.length_m * self.length_m)
    }

    /// Energy unit in J (ħ / T).
    pub fn energy_unit_j(&self) -> T {
        T::lit(HBAR) / self.time_s
    }

    pub fn length(&self, metres: T) -> T {
        metres / self.length_m
    }

    pub fn length_to_si(&self, value: T) -> T {
        value * self.length_m
    }

    pub fn time(&self, seconds: T) -> T {
        seconds / self.time_s
    }

    pub fn time_to_si(&self, value: T) -> T {
        value * self.time_s
    }

    pub fn frequency(&self, rad_per_s: T) -> T {
        rad_per_s * self.time_s
    }

    pub fn frequency_to_si(&self, value: T) -> T {
        value / self.time_s
    }

    pub fn mass(&self, kg: T) -> T {
        kg / self.mass_unit_kg()
    }

    pub fn velocity_to_si(&self, value: T) -> T {
        value * self.length_m / self.time_s
    }

    pub fn energy(&self, joules: T) -> T {
        joules / self.energy_unit_j()
    }

    pub fn energy_to_si(&self, value: T) -> T {
        value * self.energy_unit_j()
    }

    /// Temperature (K) expressed as the energy k_B T in natural units.
    pub fn temperature(&self, kelvin: T) -> T {
        self.energy(kelvin * T::lit(BOLTZMANN))
    }

    pub fn temperature_to_si(&self, energy: T) -> T {
        self.energy_to_si(energy) / T::lit(BOLTZMANN)
    }

    /// Number density in m^-D.
    pub fn density_to_si(&self, value: T, dimension: u8) -> T {
        value / self.length_m.powi(dimension as i32)
    }

    /// Wavenumber in m^-1.
    pub fn wavenumber(&self, per_m: T) -> T {
        per_m * self.length_m
    }

    pub fn wavenumber_to_si(&self, value: T) -> T {
        value / self.length_m
    }

    /// A quantity carrying `length_power` powers of length (e.g. a D-dimensional
    /// correlation spectrum in m^D).
    pub fn length_power_to_si(&self, value: T, length_power: i32) -> T {
        value * self.length_m.powi(length_power)
    }
}

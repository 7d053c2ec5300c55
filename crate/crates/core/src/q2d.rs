//! Phonons of the trapped quasi-2D gas and the density-contrast spectrum they
//! leave behind after free expansion.
//!
//! The flat 2D gas scales perfectly: in co-moving coordinates the state does
//! not evolve, so the initial Bogoliubov spectrum is already the frozen one.
//!
//! Fourier convention for all spectra:
//! C(κ) = ∫d^Dρ e^{iκ·ρ} ⟨δρ(0)δρ(ρ)⟩ / ρ0².

use crate::condensate::DerivedParams;
use crate::error::{invalid, Error, Result};
use crate::exponent::{Dimension, Exponent};
use crate::real::{lit, Real};

/// ω_k with ω² = μk²/m + k⁴/4m².
pub fn bogoliubov_frequency<T: Real>(k: T, mu: T, mass: T) -> T {
    let kin = k * k / (lit::<T>(2.0) * mass);
    (kin * (kin + lit::<T>(2.0) * mu)).sqrt()
}

/// One quantized phonon, amplitudes per unit quantization volume:
/// δS_k = phase_amplitude (â + â†), δρ_k = density_amplitude · i(â − â†).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovMode<T> {
    pub wavenumber: T,
    pub frequency: T,
    pub phase_amplitude: T,
    pub density_amplitude: T,
}

impl<T: Real> BogoliubovMode<T> {
    pub const PER_UNIT_VOLUME: &'static str = "per unit quantization volume";

    pub fn new(k: T, coupling: T, density: T, mass: T) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(invalid("k", "mode wavenumber must be positive"));
        }
        if !(coupling > T::zero() && density > T::zero() && mass > T::zero()) {
            return Err(invalid(
                "mode",
                "coupling, density and mass must be positive",
            ));
        }
        let omega = bogoliubov_frequency(k, coupling * density, mass);
        let stiffness = coupling + k * k / (lit::<T>(4.0) * mass * density);
        Ok(Self {
            wavenumber: k,
            frequency: omega,
            phase_amplitude: (stiffness / (lit::<T>(2.0) * omega)).sqrt(),
            density_amplitude: (omega / (lit::<T>(2.0) * stiffness)).sqrt(),
        })
    }

    pub fn pairing(&self) -> T {
        self.phase_amplitude * self.density_amplitude
    }
}

/// C_2D(κ) = g κ / (μ √(4mμ + κ²)).
pub fn density_spectrum_2d<T: Real>(kappa: T, coupling: T, mu: T, mass: T) -> T {
    if kappa <= T::zero() {
        return T::zero();
    }
    coupling * kappa / (mu * (lit::<T>(4.0) * mass * mu + kappa * kappa).sqrt())
}

/// C_2D(κ) − g/μ, the spectrum without its local contact term.
pub fn subtracted_spectrum_2d<T: Real>(kappa: T, coupling: T, mu: T, mass: T) -> T {
    if kappa <= T::zero() {
        return -coupling / mu;
    }
    // g/μ (κ/√(4mμ+κ²) − 1) rewritten to avoid cancellation at large κ
    let s = (lit::<T>(4.0) * mass * mu + kappa * kappa).sqrt();
    -coupling / mu * lit::<T>(4.0) * mass * mu / (s * (s + kappa))
}

/// Relative density contrast inside a window of area ξ².
pub fn windowed_contrast<T: Real>(spectrum_value: T, healing_length: T) -> T {
    spectrum_value / (healing_length * healing_length)
}

/// Inputs of the 2D spectrum taken from the trapped state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Q2dParams<T> {
    pub coupling: T,
    pub chemical_potential: T,
    pub mass: T,
    pub peak_density: T,
    pub healing_length: T,
}

impl<T: Real> Q2dParams<T> {
    pub fn from_derived(derived: &DerivedParams<T>) -> Result<Self> {
        if derived.dimension != Dimension::TWO || derived.exponent != Exponent::QUARTIC {
            return Err(Error::Unsupported(
                "the 2D spectrum needs D = 2 with quartic interaction".into(),
            ));
        }
        Ok(Self {
            coupling: derived.effective_coupling,
            chemical_potential: derived.chemical_potential,
            mass: derived.mass,
            peak_density: derived.peak_density,
            healing_length: derived.healing_length,
        })
    }

    pub fn spectrum(&self, kappa: T) -> T {
        density_spectrum_2d(kappa, self.coupling, self.chemical_potential, self.mass)
    }

    pub fn subtracted(&self, kappa: T) -> T {
        subtracted_spectrum_2d(kappa, self.coupling, self.chemical_potential, self.mass)
    }

    /// The same gas with density diluted to ρ0/b² and co-moving lengths
    /// stretched by b.
    pub fn rescaled(&self, b: T) -> Self {
        let b2 = b * b;
        Self {
            coupling: self.coupling,
            chemical_potential: self.chemical_potential / b2,
            mass: self.mass,
            peak_density: self.peak_density / b2,
            healing_length: self.healing_length * b,
        }
    }

    /// Large-κ contact term g/μ bounding C from above.
    pub fn saturation(&self) -> T {
        self.coupling / self.chemical_potential
    }

    /// Small-κ slope C/κ → g/(2μ√(mμ)).
    pub fn small_kappa_slope(&self) -> T {
        let mu = self.chemical_potential;
        self.coupling / (lit::<T>(2.0) * mu * (self.mass * mu).sqrt())
    }

    pub fn mode(&self, k: T) -> Result<BogoliubovMode<T>> {
        BogoliubovMode::new(k, self.coupling, self.peak_density, self.mass)
    }
}

/// Sampled spectrum on a κ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub kappa: Vec<T>,
    pub values: Vec<T>,
    pub dimension: Dimension,
    pub convention: &'static str,
}

pub const FOURIER_CONVENTION: &str = "C(k) = int d^D rho exp(i k.rho) <drho(0) drho(rho)> / rho0^2";

impl<T: Real> Spectrum<T> {
    pub fn sample(dimension: Dimension, kappa: Vec<T>, f: impl Fn(T) -> T) -> Self {
        let values = kappa.iter().map(|&k| f(k)).collect();
        Self {
            kappa,
            values,
            dimension,
            convention: FOURIER_CONVENTION,
        }
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }
}

/// n uniformly spaced points in log10 between `lo` and `hi`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi > lo) || n < 2 {
        return Err(invalid(
            "kappa grid",
            "need 0 < lo < hi and at least two points",
        ));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / T::from_usize(n - 1).unwrap();
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + step * T::from_usize(i).unwrap()).exp()
            }
        })
        .collect())
}

/// Default occupation below which a mode counts as quantum dominated.
pub const QUANTUM_OCCUPATION_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalOccupation<T> {
    pub occupation: T,
    pub quantum_dominated: bool,
}

/// Bose-Einstein occupation of a mode of frequency ω at temperature k_B T
/// (both in natural units, ħ = 1).
pub fn thermal_occupation<T: Real>(
    omega: T,
    temperature: T,
    threshold: T,
) -> Result<ThermalOccupation<T>> {
    if temperature < T::zero() {
        return Err(invalid("temperature", "must be non-negative"));
    }
    let occupation = if temperature == T::zero() {
        T::zero()
    } else {
        T::one() / (omega / temperature).exp_m1()
    };
    Ok(ThermalOccupation {
        occupation,
        quantum_dominated: occupation < threshold,
    })
}

/// k_B T at which the mode reaches occupation n: ħω / ln(1 + 1/n).
pub fn temperature_for_occupation<T: Real>(omega: T, occupation: T) -> Result<T> {
    if !(occupation > T::zero()) {
        return Err(invalid("occupation", "must be positive"));
    }
    Ok(omega / (T::one() / occupation).ln_1p())
}

//! Static condensate model: species constants, trap geometry, interaction
//! law, and the Thomas-Fermi ground state with everything derived from it.
//!
//! Inputs are SI. [`thomas_fermi`] converts them into a [`NaturalUnits`]
//! system (ħ = 1) and returns [`DerivedParams`] in those units together with
//! the unit system, so downstream kernels never see SI values.

use crate::error::{invalid, Error, Result};
use crate::exponent::{Dimension, Exponent, ScalingPowers};
use crate::real::{lit, Real};
use crate::special::gamma;
use crate::units::{NaturalUnits, ATOMIC_MASS_UNIT};

/// Built-in species constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeciesEntry {
    pub key: &'static str,
    pub mass_u: f64,
    pub scattering_length_m: f64,
    pub note: &'static str,
}

pub const SPECIES_TABLE: &[SpeciesEntry] = &[
    SpeciesEntry {
        key: "sodium-23",
        mass_u: 22.989_769_28,
        scattering_length_m: 2.8e-9,
        note: "s-wave scattering length of the disk-shaped sodium scenario",
    },
    SpeciesEntry {
        key: "rubidium-87",
        mass_u: 86.909_180_527,
        scattering_length_m: 5.3e-9,
        note: "chosen so that 1e7 atoms at 200 Hz give a Thomas-Fermi radius of 12.2 um",
    },
];

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies<T> {
    pub name: String,
    /// kg
    pub mass: T,
    /// m
    pub scattering_length: T,
}

impl<T: Real> AtomSpecies<T> {
    pub fn new(name: impl Into<String>, mass: T, scattering_length: T) -> Result<Self> {
        if !(mass > T::zero()) {
            return Err(invalid("mass", "must be positive"));
        }
        if !(scattering_length > T::zero()) {
            return Err(invalid("scattering_length", "must be positive"));
        }
        Ok(Self {
            name: name.into(),
            mass,
            scattering_length,
        })
    }

    /// Looks up a species in [`SPECIES_TABLE`].
    pub fn lookup(key: &str) -> Option<Self> {
        SPECIES_TABLE.iter().find(|e| e.key == key).map(|e| Self {
            name: e.key.to_string(),
            mass: T::lit(e.mass_u * ATOMIC_MASS_UNIT),
            scattering_length: T::lit(e.scattering_length_m),
        })
    }

    pub fn sodium_23() -> Self {
        Self::lookup("sodium-23").unwrap()
    }

    pub fn rubidium_87() -> Self {
        Self::lookup("rubidium-87").unwrap()
    }
}

/// Harmonic trap. Frequencies are angular (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapGeometry<T> {
    pub dimension: Dimension,
    pub longitudinal_frequency: T,
    /// Tight confinement frequency, present iff D < 3.
    pub transverse_frequency: Option<T>,
}

impl<T: Real> TrapGeometry<T> {
    pub fn new(dimension: Dimension, longitudinal: T, transverse: Option<T>) -> Result<Self> {
        if !(longitudinal > T::zero()) {
            return Err(invalid("longitudinal_frequency", "must be positive"));
        }
        match (dimension.get() < 3, transverse) {
            (true, None) => {
                return Err(invalid(
                    "transverse_frequency",
                    "required for a lower-dimensional condensate",
                ))
            }
            (false, Some(_)) => {
                return Err(invalid("transverse_frequency", "not used for D = 3"));
            }
            (true, Some(w)) if !(w > longitudinal) => {
                return Err(invalid(
                    "transverse_frequency",
                    "must exceed the longitudinal frequency (tight confinement)",
                ));
            }
            _ => {}
        }
        Ok(Self {
            dimension,
            longitudinal_frequency: longitudinal,
            transverse_frequency: transverse,
        })
    }

    pub fn isotropic_3d(omega0: T) -> Result<Self> {
        Self::new(Dimension::THREE, omega0, None)
    }
}

/// Where the bare coupling g comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coupling<T> {
    /// g = 4π a_s/m, reduced onto the transverse ground state when D < 3.
    /// Only meaningful for quartic (N = 2) interactions.
    FromScattering,
    /// Coupling of the D-dimensional |ψ|^{2N} term, given directly in the
    /// natural units of the computation (energy · length^{D(N−1)}).
    Natural(T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionLaw<T> {
    pub exponent: Exponent,
    pub coupling: Coupling<T>,
}

impl<T: Real> InteractionLaw<T> {
    pub fn s_wave() -> Self {
        Self {
            exponent: Exponent::QUARTIC,
            coupling: Coupling::FromScattering,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensateSpec<T> {
    pub species: AtomSpecies<T>,
    pub trap: TrapGeometry<T>,
    pub atom_number: f64,
    pub interaction: InteractionLaw<T>,
}

impl<T: Real> CondensateSpec<T> {
    pub fn new(
        species: AtomSpecies<T>,
        trap: TrapGeometry<T>,
        atom_number: f64,
        interaction: InteractionLaw<T>,
    ) -> Result<Self> {
        if !(atom_number >= 1.0) || !atom_number.is_finite() {
            return Err(invalid("atom_number", "need at least one atom"));
        }
        let d = trap.dimension;
        let n = interaction.exponent;
        if d == Dimension::ONE && n != Exponent::new(3, 1)? {
            return Err(Error::Unsupported(format!(
                "one-dimensional condensates require N = 3, got N = {n}"
            )));
        }
        match interaction.coupling {
            Coupling::FromScattering if !n.is_quartic() => {
                return Err(Error::Unsupported(format!(
                    "coupling from the scattering length needs N = 2, got N = {n}; give the coupling explicitly"
                )));
            }
            Coupling::Natural(g) if !(g > T::zero()) => {
                return Err(invalid("coupling", "must be positive"));
            }
            _ => {}
        }
        Ok(Self {
            species,
            trap,
            atom_number,
            interaction,
        })
    }

    pub fn dimension(&self) -> Dimension {
        self.trap.dimension
    }

    pub fn powers(&self) -> ScalingPowers {
        ScalingPowers::new(self.trap.dimension, self.interaction.exponent)
    }

    /// 10^5 sodium atoms in a 10 Hz × 790 Hz pancake trap.
    pub fn sodium_q2d() -> Self {
        let tau = T::TAU();
        Self::new(
            AtomSpecies::sodium_23(),
            TrapGeometry::new(Dimension::TWO, tau * lit(10.0), Some(tau * lit(790.0))).unwrap(),
            1e5,
            InteractionLaw::s_wave(),
        )
        .unwrap()
    }

    /// 10^7 rubidium-87 atoms in a spherical 200 Hz trap.
    pub fn rubidium_3d() -> Self {
        Self::new(
            AtomSpecies::rubidium_87(),
            TrapGeometry::isotropic_3d(T::TAU() * lit(200.0)).unwrap(),
            1e7,
            InteractionLaw::s_wave(),
        )
        .unwrap()
    }
}

/// Static parameters of the trapped ground state, in natural units (ħ = 1).
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams<T> {
    pub units: NaturalUnits<T>,
    pub dimension: Dimension,
    pub exponent: Exponent,
    pub atom_number: f64,
    pub mass: T,
    pub scattering_length: T,
    /// Longitudinal trap frequency ω0.
    pub trap_frequency: T,
    /// Coupling g of the D-dimensional theory.
    pub bare_coupling: T,
    pub chemical_potential: T,
    pub peak_density: T,
    pub healing_length: T,
    pub sound_speed: T,
    pub thomas_fermi_radius: T,
    pub transverse_width: Option<T>,
    pub reduced_coupling: Option<T>,
    pub effective_coupling: T,
}

impl<T: Real> DerivedParams<T> {
    pub fn powers(&self) -> ScalingPowers {
        ScalingPowers::new(self.dimension, self.exponent)
    }

    pub fn healing_length_m(&self) -> T {
        self.units.length_to_si(self.healing_length)
    }

    pub fn thomas_fermi_radius_m(&self) -> T {
        self.units.length_to_si(self.thomas_fermi_radius)
    }

    pub fn transverse_width_m(&self) -> Option<T> {
        self.transverse_width.map(|a| self.units.length_to_si(a))
    }

    pub fn sound_speed_m_per_s(&self) -> T {
        self.units.velocity_to_si(self.sound_speed)
    }

    pub fn chemical_potential_j(&self) -> T {
        self.units.energy_to_si(self.chemical_potential)
    }

    pub fn peak_density_si(&self) -> T {
        self.units
            .density_to_si(self.peak_density, self.dimension.get())
    }

    /// Diluteness √(a_s³ ρ0) of a 3D cloud.
    pub fn diluteness(&self) -> T {
        (self.scattering_length.powi(3) * self.peak_density).sqrt()
    }

    /// Lowest phonon frequency 2π c/R of the trapped cloud (natural units).
    pub fn lowest_phonon_frequency(&self) -> T {
        T::TAU() * self.sound_speed / self.thomas_fermi_radius
    }

    /// Thomas-Fermi profile ρ(r) = ρ0 (1 − r²/R²)^{1/(N−1)} inside the cloud.
    pub fn density_profile(&self, r: T) -> T {
        let x = T::one() - (r / self.thomas_fermi_radius).powi(2);
        if x <= T::zero() {
            return T::zero();
        }
        let q = T::one() / (self.exponent.as_real::<T>() - T::one());
        self.peak_density * x.powf(q)
    }
}

/// ∫|φ0|⁴ over a transverse Gaussian ground state of width a_z = 1/√(mω_z),
/// raised to the number of confined directions.
fn transverse_quartic_integral<T: Real>(mass: T, omega_z: T, confined: u8) -> T {
    (mass * omega_z / T::TAU()).sqrt().powi(confined as i32)
}

/// Coupling of the quasi-2D theory: g_∥ = g·√(m ω_z / 2π), natural units.
pub fn reduce_coupling<T: Real>(g3d: T, mass: T, omega_z: T) -> Result<T> {
    reduce_coupling_to(Dimension::TWO, g3d, mass, omega_z)
}

/// Coupling reduced onto the transverse harmonic ground state for a
/// D-dimensional condensate (3 − D tightly confined directions).
pub fn reduce_coupling_to<T: Real>(dimension: Dimension, g3d: T, mass: T, omega_z: T) -> Result<T> {
    if !(g3d > T::zero()) {
        return Err(invalid("g3d", "must be positive"));
    }
    if !(mass > T::zero()) {
        return Err(invalid("mass", "must be positive"));
    }
    if !(omega_z > T::zero()) {
        return Err(invalid("omega_z", "must be positive"));
    }
    Ok(g3d * transverse_quartic_integral(mass, omega_z, 3 - dimension.get()))
}

/// g_N = g · N(N−1)/2 · ρ0^{N−2}.
pub fn effective_coupling<T: Real>(g: T, exponent: Exponent, density: T) -> Result<T> {
    if !(density > T::zero()) {
        return Err(invalid("density", "must be positive"));
    }
    let n = exponent.as_real::<T>();
    let prefactor = n * (n - T::one()) / lit(2.0);
    if exponent.is_quartic() {
        Ok(g * prefactor)
    } else {
        Ok(g * prefactor * density.powf(n - lit(2.0)))
    }
}

/// ω_ξ = c_N / ξ.
pub fn sound_frequency_at_healing_scale<T: Real>(derived: &DerivedParams<T>) -> T {
    derived.sound_speed / derived.healing_length
}

/// Thomas-Fermi ground state in the default natural units (1 μm, 1 ms).
pub fn thomas_fermi<T: Real>(spec: &CondensateSpec<T>) -> Result<DerivedParams<T>> {
    thomas_fermi_in(spec, NaturalUnits::default())
}

/// Thomas-Fermi ground state of a harmonic trap for arbitrary (D, N).
///
/// The profile ρ(r) = ρ0 (1 − r²/R²)^{q}, q = 1/(N−1), with
/// μ = (gN/2) ρ0^{N−1} = ½ m ω0² R², integrates to a closed form in terms of a
/// Beta function, which is inverted for μ.
pub fn thomas_fermi_in<T: Real>(
    spec: &CondensateSpec<T>,
    units: NaturalUnits<T>,
) -> Result<DerivedParams<T>> {
    let d = spec.trap.dimension;
    let dim = d.as_real::<T>();
    let mass = units.mass(spec.species.mass);
    let a_s = units.length(spec.species.scattering_length);
    let omega0 = units.frequency(spec.trap.longitudinal_frequency);
    let omega_z = spec.trap.transverse_frequency.map(|w| units.frequency(w));
    let transverse_width = omega_z.map(|w| (T::one() / (mass * w)).sqrt());

    let (g, reduced) = match spec.interaction.coupling {
        Coupling::FromScattering => {
            let g3d = lit::<T>(4.0) * T::PI() * a_s / mass;
            match omega_z {
                Some(wz) => {
                    let g = reduce_coupling_to(d, g3d, mass, wz)?;
                    (g, Some(g))
                }
                None => (g3d, None),
            }
        }
        Coupling::Natural(g) => (g, None),
    };

    let n = spec.interaction.exponent.as_real::<T>();
    let q = T::one() / (n - T::one());
    let half_d = dim / lit(2.0);
    let two = lit::<T>(2.0);
    // surface of the unit sphere in D dimensions and the radial Beta integral
    let sphere = two * T::PI().powf(half_d) / gamma(half_d)?;
    let beta = gamma(half_d)? * gamma(q + T::one())? / gamma(half_d + q + T::one())?;
    let k = sphere * beta / two
        * (two / (g * n)).powf(q)
        * (two / (mass * omega0 * omega0)).powf(half_d);
    let atoms = T::lit(spec.atom_number);
    let mu = (atoms / k).powf(T::one() / (q + half_d));

    let radius = (two * mu / (mass * omega0 * omega0)).sqrt();
    let peak_density = (two * mu / (g * n)).powf(q);
    let g_n = effective_coupling(g, spec.interaction.exponent, peak_density)?;
    let sound_speed = (g_n * peak_density / mass).sqrt();
    let healing_length = T::one() / (mass * sound_speed);

    Ok(DerivedParams {
        units,
        dimension: d,
        exponent: spec.interaction.exponent,
        atom_number: spec.atom_number,
        mass,
        scattering_length: a_s,
        trap_frequency: omega0,
        bare_coupling: g,
        chemical_potential: mu,
        peak_density,
        healing_length,
        sound_speed,
        thomas_fermi_radius: radius,
        transverse_width,
        reduced_coupling: reduced,
        effective_coupling: g_n,
    })
}

/// Which inequality of the scale hierarchy ξ ≫ a_⊥ ≫ a_s a check tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidityKind {
    /// ξ ≫ a_⊥: transverse excitations are not mixed in by interactions.
    ModeMixing,
    /// a_⊥ ≫ a_s: the s-wave mean-field description holds.
    GrossPitaevskii,
}

impl ValidityKind {
    pub fn key(self) -> &'static str {
        match self {
            ValidityKind::ModeMixing => "healing_length_over_transverse_width",
            ValidityKind::GrossPitaevskii => "transverse_width_over_scattering_length",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityCheck<T> {
    pub kind: ValidityKind,
    pub ratio: T,
    pub threshold: T,
    pub passed: bool,
}

/// Minimum ratios for "≫".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityThresholds<T> {
    pub mode_mixing: T,
    pub gross_pitaevskii: T,
}

impl<T: Real> Default for ValidityThresholds<T> {
    fn default() -> Self {
        Self {
            mode_mixing: T::one(),
            gross_pitaevskii: lit(3.0),
        }
    }
}

impl<T: Real> ValidityThresholds<T> {
    pub fn uniform(factor: T) -> Self {
        Self {
            mode_mixing: factor,
            gross_pitaevskii: factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport<T> {
    pub checks: Vec<ValidityCheck<T>>,
}

impl<T: Real> ValidityReport<T> {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidityCheck<T>> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Evaluates ξ ≫ a_⊥ ≫ a_s. Three-dimensional clouds have no transverse
/// width and produce an empty report.
pub fn validate_dimensional_reduction<T: Real>(
    derived: &DerivedParams<T>,
    thresholds: ValidityThresholds<T>,
) -> ValidityReport<T> {
    let mut checks = Vec::new();
    if let Some(a_perp) = derived.transverse_width {
        let ratio = derived.healing_length / a_perp;
        checks.push(ValidityCheck {
            kind: ValidityKind::ModeMixing,
            ratio,
            threshold: thresholds.mode_mixing,
            passed: ratio >= thresholds.mode_mixing,
        });
        let ratio = a_perp / derived.scattering_length;
        checks.push(ValidityCheck {
            kind: ValidityKind::GrossPitaevskii,
            ratio,
            threshold: thresholds.gross_pitaevskii,
            passed: ratio >= thresholds.gross_pitaevskii,
        });
    }
    ValidityReport { checks }
}

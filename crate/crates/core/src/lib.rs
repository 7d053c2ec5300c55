//! Expanding Bose-Einstein condensates as analogue cosmologies.
//!
//! The crate computes the Thomas-Fermi ground state of a trapped gas, the
//! self-similar scale factor b(t) after release, the effective acoustic
//! metric with its horizons, and the frozen phonon spectra in quasi-2D and
//! 3D. Everything is generic over the scalar (`f32` or `f64`) through
//! [`Real`]; exact powers of b are kept as rationals. Internally ħ = 1 with
//! lengths in μm and times in ms by default, see [`units::NaturalUnits`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod condensate;
pub mod error;
pub mod exponent;
pub mod geometry;
pub mod ode;
pub mod q2d;
pub mod real;
pub mod scaling;
pub mod special;
pub mod threed;
pub mod units;

pub use condensate::{
    thomas_fermi, thomas_fermi_in, AtomSpecies, CondensateSpec, Coupling, DerivedParams,
    InteractionLaw, TrapGeometry,
};
pub use error::{Error, Result};
pub use exponent::{Dimension, Exponent, ScalingPowers};
pub use geometry::{EffectiveMetric, HorizonReport, HorizonSize};
pub use q2d::{Q2dParams, Spectrum};
pub use real::Real;
pub use scaling::{
    integrate_scale_factor, proper_time, Expansion, ExpansionProtocol, LinearExpansion,
    ScaleTrajectory, Schedule,
};
pub use threed::{FrozenSpectrum3D, ModeEvolution, ThreeDParams};
pub use units::NaturalUnits;

pub type Species = AtomSpecies<f64>;
pub type Trap = TrapGeometry<f64>;
pub type Condensate = CondensateSpec<f64>;
pub type Derived = DerivedParams<f64>;
pub type Protocol = ExpansionProtocol<f64>;
pub type Trajectory = ScaleTrajectory<f64>;
pub type Metric = EffectiveMetric<f64>;
pub type Horizons = HorizonReport<f64>;
pub type Q2d = Q2dParams<f64>;
pub type ThreeD = ThreeDParams<f64>;
pub type Modes = ModeEvolution<f64>;
pub type Spectrum3D = FrozenSpectrum3D<f64>;
pub type Units = NaturalUnits<f64>;

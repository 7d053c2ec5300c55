//! Scenario files: JSON with SI units spelled out in every key.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use bec_analogue::condensate::{ValidityThresholds, SPECIES_TABLE};
use bec_analogue::{
    AtomSpecies, CondensateSpec, Coupling, Dimension, ExpansionProtocol, Exponent, InteractionLaw,
    Schedule, TrapGeometry,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    SodiumQ2d,
    Rubidium3d,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::SodiumQ2d, Preset::Rubidium3d];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SodiumQ2d => "sodium-q2d",
            Preset::Rubidium3d => "rubidium-3d",
        }
    }

    pub fn config(self) -> ScenarioConfig {
        match self {
            Preset::SodiumQ2d => ScenarioConfig {
                name: self.name().into(),
                condensate: CondensateConfig {
                    species: SpeciesConfig::key("sodium-23"),
                    atom_number: 1e5,
                    dimension: 2,
                    omega0_rad_per_s: TAU * 10.0,
                    omega_perp_rad_per_s: Some(TAU * 790.0),
                    exponent: "2".into(),
                    coupling_natural: None,
                },
                protocol: ProtocolConfig::default(),
                analysis: Analysis::everything(),
                numeric: NumericConfig::default(),
                validity: ValidityConfig::default(),
            },
            Preset::Rubidium3d => ScenarioConfig {
                name: self.name().into(),
                condensate: CondensateConfig {
                    species: SpeciesConfig::key("rubidium-87"),
                    atom_number: 1e7,
                    dimension: 3,
                    omega0_rad_per_s: TAU * 200.0,
                    omega_perp_rad_per_s: None,
                    exponent: "2".into(),
                    coupling_natural: None,
                },
                protocol: ProtocolConfig::default(),
                analysis: Analysis::everything(),
                numeric: NumericConfig::default(),
                validity: ValidityConfig::default(),
            },
        }
    }
}

impl FromStr for Preset {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown preset `{s}`")))
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Derive,
    Evolve,
    Horizons,
    #[serde(rename = "spectrum2d")]
    Spectrum2d,
    #[serde(rename = "spectrum3d")]
    Spectrum3d,
    Report,
}

impl Analysis {
    pub fn everything() -> Vec<Analysis> {
        vec![
            Analysis::Derive,
            Analysis::Evolve,
            Analysis::Horizons,
            Analysis::Spectrum2d,
            Analysis::Spectrum3d,
            Analysis::Report,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub condensate: CondensateConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default = "Analysis::everything")]
    pub analysis: Vec<Analysis>,
    #[serde(default)]
    pub numeric: NumericConfig,
    #[serde(default)]
    pub validity: ValidityConfig,
}

/// A table key, optionally with overrides, or a fully inlined species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub key: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_kg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scattering_length_m: Option<f64>,
}

impl SpeciesConfig {
    pub fn key(key: &str) -> Self {
        Self {
            key: Some(key.into()),
            mass_kg: None,
            scattering_length_m: None,
        }
    }

    pub fn resolve(&self) -> Result<AtomSpecies<f64>, CliError> {
        let base = match &self.key {
            Some(k) => Some(AtomSpecies::<f64>::lookup(k).ok_or_else(|| {
                let known: Vec<_> = SPECIES_TABLE.iter().map(|e| e.key).collect();
                CliError::Config(format!(
                    "condensate.species.key: unknown species `{k}` (known: {})",
                    known.join(", ")
                ))
            })?),
            None => None,
        };
        let name = self.key.clone().unwrap_or_else(|| "custom".into());
        let mass = self.mass_kg.or(base.as_ref().map(|b| b.mass));
        let a_s = self
            .scattering_length_m
            .or(base.as_ref().map(|b| b.scattering_length));
        match (mass, a_s) {
            (Some(m), Some(a)) => AtomSpecies::new(name, m, a).map_err(|e| CliError::Config(format!("condensate.species: {e}"))),
            _ => Err(CliError::Config(
                "condensate.species: give a known `key` or both `mass_kg` and `scattering_length_m`".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CondensateConfig {
    pub species: SpeciesConfig,
    pub atom_number: f64,
    pub dimension: u8,
    /// Trap frequency along the expanding directions.
    pub omega0_rad_per_s: f64,
    /// Tight transverse frequency for D < 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_perp_rad_per_s: Option<f64>,
    /// Interaction exponent N as "2", "5/3" or a decimal.
    #[serde(default = "default_exponent")]
    pub exponent: String,
    /// Coupling in natural units (ħ = 1, μm, ms); required for N ≠ 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_natural: Option<f64>,
}

fn default_exponent() -> String {
    "2".into()
}

impl CondensateConfig {
    pub fn to_spec(&self) -> Result<CondensateSpec<f64>, CliError> {
        let cfg = |field: &str, e: bec_analogue::Error| {
            CliError::Config(format!("condensate.{field}: {e}"))
        };
        let dim = Dimension::new(self.dimension).map_err(|e| cfg("dimension", e))?;
        let exponent: Exponent = self.exponent.parse().map_err(|e| cfg("exponent", e))?;
        let trap = TrapGeometry::new(dim, self.omega0_rad_per_s, self.omega_perp_rad_per_s)
            .map_err(|e| cfg("omega0_rad_per_s", e))?;
        let coupling = match self.coupling_natural {
            Some(g) => Coupling::Natural(g),
            None => Coupling::FromScattering,
        };
        CondensateSpec::new(
            self.species.resolve()?,
            trap,
            self.atom_number,
            InteractionLaw { exponent, coupling },
        )
        .map_err(|e| cfg("atom_number", e))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "schedule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProtocolConfig {
    /// Trap switched off at t = 0.
    #[default]
    Free,
    /// Trap kept on.
    Static,
    /// ω_ext falls linearly from ω0 to zero over `duration_s`.
    LinearRamp { duration_s: f64 },
}

impl ProtocolConfig {
    /// Protocol in natural units for a trap at `omega0` (natural units).
    pub fn to_protocol(
        &self,
        omega0: f64,
        time_unit_s: f64,
    ) -> Result<ExpansionProtocol<f64>, CliError> {
        let schedule = match *self {
            ProtocolConfig::Free => Schedule::FreeExpansion,
            ProtocolConfig::Static => Schedule::Static,
            ProtocolConfig::LinearRamp { duration_s } => {
                if !(duration_s > 0.0) {
                    return Err(CliError::Config(
                        "protocol.duration_s: must be positive".into(),
                    ));
                }
                let d = duration_s / time_unit_s;
                Schedule::Custom(Arc::new(move |t: f64| omega0 * (1.0 - t / d).max(0.0)))
            }
        };
        ExpansionProtocol::new(omega0, schedule)
            .map_err(|e| CliError::Config(format!("protocol: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericConfig {
    /// Relative tolerance of the scale-factor integration.
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    /// Relative tolerance of the 3D mode integrations.
    #[serde(default = "default_mode_tolerance")]
    pub mode_tolerance: f64,
    /// Integration range; defaults to 1e5/ω0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max_s: Option<f64>,
    /// κ grid bounds; defaults depend on the dimension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_min_per_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_max_per_m: Option<f64>,
    #[serde(default = "default_kappa_points")]
    pub kappa_points: usize,
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_mode_tolerance() -> f64 {
    1e-10
}

fn default_kappa_points() -> usize {
    64
}

impl Default for NumericConfig {
    fn default() -> Self {
        Self {
            tolerance: default_tolerance(),
            mode_tolerance: default_mode_tolerance(),
            t_max_s: None,
            kappa_min_per_m: None,
            kappa_max_per_m: None,
            kappa_points: default_kappa_points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityConfig {
    /// Minimum ξ/a_⊥.
    #[serde(default = "default_mode_mixing")]
    pub mode_mixing: f64,
    /// Minimum a_⊥/a_s.
    #[serde(default = "default_gp")]
    pub gross_pitaevskii: f64,
}

fn default_mode_mixing() -> f64 {
    ValidityThresholds::<f64>::default().mode_mixing
}

fn default_gp() -> f64 {
    ValidityThresholds::<f64>::default().gross_pitaevskii
}

impl Default for ValidityConfig {
    fn default() -> Self {
        Self {
            mode_mixing: default_mode_mixing(),
            gross_pitaevskii: default_gp(),
        }
    }
}

impl ValidityConfig {
    pub fn thresholds(&self) -> ValidityThresholds<f64> {
        ValidityThresholds {
            mode_mixing: self.mode_mixing,
            gross_pitaevskii: self.gross_pitaevskii,
        }
    }
}

impl ScenarioConfig {
    /// Checks everything that does not need the physics pipeline.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.name.trim().is_empty() {
            return Err(CliError::Config("name: must not be empty".into()));
        }
        self.condensate.to_spec()?;
        let n = &self.numeric;
        if !(n.tolerance > 1e-14 && n.tolerance < 1e-4) {
            return Err(CliError::Config(
                "numeric.tolerance: must lie in (1e-14, 1e-4)".into(),
            ));
        }
        if !(n.mode_tolerance > 1e-14 && n.mode_tolerance < 1e-4) {
            return Err(CliError::Config(
                "numeric.mode_tolerance: must lie in (1e-14, 1e-4)".into(),
            ));
        }
        if let Some(t) = n.t_max_s {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config("numeric.t_max_s: must be positive".into()));
            }
        }
        for (field, v) in [
            ("kappa_min_per_m", n.kappa_min_per_m),
            ("kappa_max_per_m", n.kappa_max_per_m),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(CliError::Config(format!(
                        "numeric.{field}: must be positive"
                    )));
                }
            }
        }
        if let (Some(lo), Some(hi)) = (n.kappa_min_per_m, n.kappa_max_per_m) {
            if !(hi > lo) {
                return Err(CliError::Config(
                    "numeric.kappa_max_per_m: must exceed kappa_min_per_m".into(),
                ));
            }
        }
        if n.kappa_points < 2 {
            return Err(CliError::Config(
                "numeric.kappa_points: need at least 2".into(),
            ));
        }
        let v = &self.validity;
        if !(v.mode_mixing > 0.0 && v.gross_pitaevskii > 0.0) {
            return Err(CliError::Config(
                "validity: thresholds must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Whether the condensate matches a preset exactly, so published
    /// values apply.
    pub fn matching_preset(&self) -> Option<Preset> {
        Preset::ALL.into_iter().find(|p| {
            p.config().condensate == self.condensate && self.protocol == ProtocolConfig::Free
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

/// Parses a scenario from JSON text with field-level diagnostics.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

/// A preset name or a path to a JSON scenario.
pub fn load_scenario(source: &str) -> Result<ScenarioConfig, CliError> {
    if let Ok(p) = source.parse::<Preset>() {
        return Ok(p.config());
    }
    let path = Path::new(source);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "`{source}` is neither a preset ({}) nor an existing file",
            Preset::ALL.map(|p| p.name()).join(", ")
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_scenario(&text)
}

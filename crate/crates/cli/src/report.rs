//! The run report and its comparison table against published values.

use serde::Serialize;

use crate::config::Preset;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceRow {
    pub key: &'static str,
    pub citation: &'static str,
    pub quantity: &'static str,
    pub unit: &'static str,
    pub computed: f64,
    pub published: f64,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<&'static str>,
}

impl AcceptanceRow {
    pub fn new(
        key: &'static str,
        citation: &'static str,
        quantity: &'static str,
        unit: &'static str,
        computed: f64,
        published: f64,
    ) -> Self {
        Self {
            key,
            citation,
            quantity,
            unit,
            computed,
            published,
            ratio: computed / published,
            note: None,
        }
    }

    pub fn with_note(mut self, note: &'static str) -> Self {
        self.note = Some(note);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    /// `validity:<check>` or `band:<clip>`.
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedSummary {
    pub species: String,
    pub dimension: u8,
    pub exponent: String,
    pub atom_number: f64,
    pub mass_kg: f64,
    pub scattering_length_m: f64,
    pub omega0_rad_per_s: f64,
    pub chemical_potential_j: f64,
    pub peak_density_si: f64,
    pub healing_length_m: f64,
    pub sound_speed_m_per_s: f64,
    pub thomas_fermi_radius_m: f64,
    pub transverse_width_m: Option<f64>,
    pub effective_coupling_natural: f64,
    pub lowest_phonon_frequency_rad_per_s: f64,
    pub healing_frequency_rad_per_s: f64,
    pub diluteness: f64,
    pub is_flat: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityRow {
    pub check: &'static str,
    pub ratio: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub t_max_s: f64,
    pub steps: usize,
    pub final_scale_factor: f64,
    pub asymptotic_velocity_per_s: Option<f64>,
    pub alpha_tilde: Option<f64>,
    pub converged: bool,
    /// τ(∞) in seconds (flat cases) or ∫b^e dt in seconds (general branch).
    pub proper_time_limit_s: Option<f64>,
    pub proper_time_convention: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonSummary {
    pub settled_apparent_m: Option<f64>,
    pub particle_at_release_m: Option<f64>,
    pub particle_strictly_decreasing: bool,
    pub caveat: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupancyPoint {
    pub temperature_k: f64,
    pub occupation: f64,
    pub quantum_dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum2dSummary {
    pub points: usize,
    pub contrast_at_two_pi_over_xi: f64,
    pub saturation: f64,
    pub small_kappa_slope_m3: f64,
    pub temperature_scale_at_inverse_xi_k: f64,
    pub temperature_for_occupation_threshold_k: f64,
    pub occupation_threshold: f64,
    pub occupancy_curve: Vec<OccupancyPoint>,
    pub convention: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum3dSummary {
    pub points: usize,
    pub in_band_points: usize,
    pub alpha_tilde: f64,
    pub kappa_max_per_m: f64,
    pub prefactor: f64,
    pub max_contrast_estimate: f64,
    pub max_contrast_direct: f64,
    pub healing_to_trap_ratio: f64,
    pub slope_phase_closed_form: Option<f64>,
    pub slope_density_closed_form: Option<f64>,
    pub numeric_modes_frozen: usize,
    pub slope_phase_numeric: Option<f64>,
    pub slope_density_numeric: Option<f64>,
    pub numeric_phase_max_deviation: Option<f64>,
    pub temperature_scale_at_kappa_max_k: f64,
    pub convention: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub verb: String,
    pub preset: Option<String>,
    pub stages: Vec<String>,
    pub derived: DerivedSummary,
    pub validity: Vec<ValidityRow>,
    pub trajectory: Option<TrajectorySummary>,
    pub horizons: Option<HorizonSummary>,
    pub spectrum2d: Option<Spectrum2dSummary>,
    pub spectrum3d: Option<Spectrum3dSummary>,
    pub acceptance: Vec<AcceptanceRow>,
    pub warnings: Vec<Warning>,
    pub files: Vec<String>,
}

impl RunReport {
    pub fn row(&self, key: &str) -> Option<&AcceptanceRow> {
        self.acceptance.iter().find(|r| r.key == key)
    }
}

/// Comparison rows for a preset run, from whichever stages ran.
pub fn acceptance_rows(preset: Preset, report: &RunReport) -> Vec<AcceptanceRow> {
    let d = &report.derived;
    let mut rows = Vec::new();
    match preset {
        Preset::SodiumQ2d => {
            if let Some(a_z) = d.transverse_width_m {
                rows.push(AcceptanceRow::new(
                    "transverse_width",
                    "sodium-q2d/a_z",
                    "transverse oscillator length a_z",
                    "m",
                    a_z,
                    0.746e-6,
                ));
            }
            rows.push(AcceptanceRow::new(
                "healing_length",
                "sodium-q2d/xi",
                "healing length",
                "m",
                d.healing_length_m,
                1.34e-6,
            ));
            if let Some(s) = &report.spectrum2d {
                rows.push(AcceptanceRow::new(
                    "contrast",
                    "sodium-q2d/contrast",
                    "C(2pi/xi)/xi^2",
                    "1",
                    s.contrast_at_two_pi_over_xi,
                    0.0179,
                ));
                rows.push(
                    AcceptanceRow::new(
                        "temperature_scale",
                        "sodium-q2d/temperature",
                        "hbar omega(1/xi)/k_B",
                        "K",
                        s.temperature_scale_at_inverse_xi_k,
                        0.1e-9,
                    )
                    .with_note(
                        "criterion behind the published figure is unspecified; not asserted",
                    ),
                );
            }
            if let Some(h) = &report.horizons {
                if let Some(r) = h.settled_apparent_m {
                    rows.push(
                        AcceptanceRow::new(
                            "apparent_horizon",
                            "sodium-q2d/apparent-horizon",
                            "settled apparent horizon c0/omega0",
                            "m",
                            r,
                            3.28e-6,
                        )
                        .with_note("formula value; the published figure is 10x smaller than c0/omega0 for these parameters"),
                    );
                }
            }
        }
        Preset::Rubidium3d => {
            rows.push(AcceptanceRow::new(
                "thomas_fermi_radius",
                "rubidium-3d/radius",
                "Thomas-Fermi radius",
                "m",
                d.thomas_fermi_radius_m,
                12.2e-6,
            ));
            rows.push(AcceptanceRow::new(
                "lowest_phonon_frequency",
                "rubidium-3d/omega-min",
                "2 pi c0 / R",
                "1/s",
                d.lowest_phonon_frequency_rad_per_s,
                5582.0,
            ));
            if let Some(s) = &report.spectrum3d {
                rows.push(AcceptanceRow::new(
                    "alpha_tilde",
                    "rubidium-3d/alpha",
                    "asymptotic expansion rate / omega0",
                    "1",
                    s.alpha_tilde,
                    0.82,
                ));
                rows.push(AcceptanceRow::new(
                    "prefactor",
                    "rubidium-3d/prefactor",
                    "maximum-contrast prefactor",
                    "1",
                    s.prefactor,
                    30.3,
                ));
                rows.push(
                    AcceptanceRow::new(
                        "max_contrast",
                        "rubidium-3d/max-contrast",
                        "kappa_max^3 C_3D(kappa_max)",
                        "1",
                        s.max_contrast_estimate,
                        0.02,
                    )
                    .with_note("published as an order of magnitude"),
                );
                rows.push(
                    AcceptanceRow::new(
                        "temperature_scale",
                        "rubidium-3d/temperature",
                        "hbar omega(kappa_max)/k_B",
                        "K",
                        s.temperature_scale_at_kappa_max_k,
                        3.9e-9,
                    )
                    .with_note(
                        "criterion behind the published figure is unspecified; not asserted",
                    ),
                );
            }
        }
    }
    rows
}

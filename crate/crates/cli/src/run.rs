//! Runs the stages of a scenario and writes the run directory.

use std::path::Path;

use bec_analogue::condensate::{
    sound_frequency_at_healing_scale, validate_dimensional_reduction, DerivedParams,
};
use bec_analogue::geometry::horizon_report;
use bec_analogue::q2d::{
    bogoliubov_frequency, log_grid, temperature_for_occupation, thermal_occupation,
    windowed_contrast, Q2dParams, FOURIER_CONVENTION, QUANTUM_OCCUPATION_THRESHOLD,
};
use bec_analogue::threed::{
    integrate_mode, log_log_slope, max_contrast_estimate, FrozenSpectrum3D, ModeEvolution,
    ModeSettings, ThreeDParams,
};
use bec_analogue::{
    integrate_scale_factor, proper_time, thomas_fermi, Dimension, Exponent, ScaleTrajectory,
};
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Analysis, ScenarioConfig};
use crate::error::CliError;
use crate::output::{num, Csv, RunDir};
use crate::report::{
    acceptance_rows, DerivedSummary, HorizonSummary, OccupancyPoint, RunReport, Spectrum2dSummary,
    Spectrum3dSummary, TrajectorySummary, ValidityRow, Warning,
};

/// Default integration range in units of 1/ω0.
pub const DEFAULT_T_MAX_OMEGA0: f64 = 1e5;
/// Number of 3D mode histories written to modes.csv.
const MODE_HISTORIES: usize = 3;

/// CLI verbs in dependency order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Derive,
    Evolve,
    Horizons,
    Spectrum2d,
    Spectrum3d,
    Report,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Derive => "derive",
            Verb::Evolve => "evolve",
            Verb::Horizons => "horizons",
            Verb::Spectrum2d => "spectrum2d",
            Verb::Spectrum3d => "spectrum3d",
            Verb::Report => "report",
        }
    }
}

/// Stages a verb needs for this scenario.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Plan {
    pub evolve: bool,
    pub horizons: bool,
    pub spectrum2d: bool,
    pub spectrum3d: bool,
    pub report: bool,
}

fn supports_2d(dim: Dimension, n: Exponent) -> bool {
    dim == Dimension::TWO && n == Exponent::QUARTIC
}

fn supports_3d(dim: Dimension, n: Exponent) -> bool {
    dim == Dimension::THREE && n == Exponent::QUARTIC
}

pub fn plan(verb: Verb, config: &ScenarioConfig) -> Result<Plan, CliError> {
    let spec = config.condensate.to_spec()?;
    let (dim, n) = (spec.dimension(), spec.interaction.exponent);
    let mut p = Plan::default();
    match verb {
        Verb::Derive => {}
        Verb::Evolve => p.evolve = true,
        Verb::Horizons => {
            p.evolve = true;
            p.horizons = true;
        }
        Verb::Spectrum2d => {
            if !supports_2d(dim, n) {
                return Err(CliError::Config(
                    "spectrum2d needs dimension 2 with exponent 2".into(),
                ));
            }
            p.spectrum2d = true;
        }
        Verb::Spectrum3d => {
            if !supports_3d(dim, n) {
                return Err(CliError::Config(
                    "spectrum3d needs dimension 3 with exponent 2".into(),
                ));
            }
            p.evolve = true;
            p.spectrum3d = true;
        }
        Verb::Report => {
            let wants = |a| config.analysis.contains(&a);
            p.horizons = wants(Analysis::Horizons);
            p.spectrum2d = wants(Analysis::Spectrum2d) && supports_2d(dim, n);
            p.spectrum3d = wants(Analysis::Spectrum3d) && supports_3d(dim, n);
            p.evolve = wants(Analysis::Evolve) || p.horizons || p.spectrum3d;
            p.report = true;
        }
    }
    Ok(p)
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    verb: &'static str,
    complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed_stage: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    files: Vec<String>,
    conventions: Conventions,
    config: &'a ScenarioConfig,
}

#[derive(Debug, Serialize)]
struct Conventions {
    fourier: &'static str,
    internal_units: &'static str,
    csv: &'static str,
}

fn conventions() -> Conventions {
    Conventions {
        fourier: FOURIER_CONVENTION,
        internal_units: "hbar = 1, length 1 um, time 1 ms; all outputs in SI",
        csv: "header row, comma separated, decimal point, 13 significant digits",
    }
}

/// Runs `verb` and writes its artifacts to `out`. On failure the manifest is
/// still written, listing the files produced so far and the failing stage.
pub fn run(config: &ScenarioConfig, verb: Verb, out: &Path) -> Result<RunReport, CliError> {
    config.validate()?;
    let mut dir = RunDir::create(out)?;
    let result = Pipeline::new(config, verb, &mut dir).and_then(|p| p.execute());
    let (complete, failed_stage, error) = match &result {
        Ok(_) => (true, None, None),
        Err(e @ CliError::Numeric { stage, .. }) => (false, Some(*stage), Some(e.to_string())),
        Err(e) => (false, None, Some(e.to_string())),
    };
    let mut files = dir.files().to_vec();
    files.push("manifest.json".into());
    let manifest = Manifest {
        scenario: &config.name,
        verb: verb.name(),
        complete,
        failed_stage,
        error,
        files,
        conventions: conventions(),
        config,
    };
    dir.write_json("manifest.json", &manifest)?;
    let mut report = result?;
    report.files = dir.files().to_vec();
    Ok(report)
}

struct Pipeline<'a> {
    config: &'a ScenarioConfig,
    verb: Verb,
    plan: Plan,
    dir: &'a mut RunDir,
    derived: DerivedParams<f64>,
    warnings: Vec<Warning>,
    stages: Vec<String>,
}

impl<'a> Pipeline<'a> {
    fn new(config: &'a ScenarioConfig, verb: Verb, dir: &'a mut RunDir) -> Result<Self, CliError> {
        let plan = plan(verb, config)?;
        let spec = config.condensate.to_spec()?;
        let derived = thomas_fermi(&spec).map_err(CliError::stage("derive"))?;
        Ok(Self {
            config,
            verb,
            plan,
            dir,
            derived,
            warnings: Vec::new(),
            stages: vec!["derive".into()],
        })
    }

    fn execute(mut self) -> Result<RunReport, CliError> {
        let derived_summary = self.derive()?;
        let validity = self.validity();

        let mut trajectory_summary = None;
        let mut horizons = None;
        let mut spectrum2d = None;
        let mut spectrum3d = None;

        let trajectory = if self.plan.evolve {
            let (traj, summary) = self.evolve()?;
            trajectory_summary = Some(summary);
            Some(traj)
        } else {
            None
        };
        if self.plan.horizons {
            horizons = Some(self.horizons(trajectory.as_ref().unwrap())?);
        }
        if self.plan.spectrum2d {
            spectrum2d = Some(self.spectrum2d()?);
        }
        if self.plan.spectrum3d {
            spectrum3d = Some(self.spectrum3d(trajectory.as_ref().unwrap())?);
        }

        let preset = self.config.matching_preset();
        let mut report = RunReport {
            scenario: self.config.name.clone(),
            verb: self.verb.name().into(),
            preset: preset.map(|p| p.name().to_string()),
            stages: self.stages.clone(),
            derived: derived_summary,
            validity,
            trajectory: trajectory_summary,
            horizons,
            spectrum2d,
            spectrum3d,
            acceptance: Vec::new(),
            warnings: std::mem::take(&mut self.warnings),
            files: Vec::new(),
        };
        if let Some(p) = preset {
            report.acceptance = acceptance_rows(p, &report);
        }
        if self.plan.report {
            self.stages.push("report".into());
            report.stages = self.stages.clone();
            report.files = self.dir.files().to_vec();
            report.files.push("report.json".into());
            self.dir.write_json("report.json", &report)?;
        }
        Ok(report)
    }

    fn derive(&mut self) -> Result<DerivedSummary, CliError> {
        let d = &self.derived;
        let u = d.units;
        let summary = DerivedSummary {
            species: self.config.condensate.species.resolve()?.name,
            dimension: d.dimension.get(),
            exponent: d.exponent.to_string(),
            atom_number: d.atom_number,
            mass_kg: self.config.condensate.species.resolve()?.mass,
            scattering_length_m: u.length_to_si(d.scattering_length),
            omega0_rad_per_s: u.frequency_to_si(d.trap_frequency),
            chemical_potential_j: d.chemical_potential_j(),
            peak_density_si: d.peak_density_si(),
            healing_length_m: d.healing_length_m(),
            sound_speed_m_per_s: d.sound_speed_m_per_s(),
            thomas_fermi_radius_m: d.thomas_fermi_radius_m(),
            transverse_width_m: d.transverse_width_m(),
            effective_coupling_natural: d.effective_coupling,
            lowest_phonon_frequency_rad_per_s: u.frequency_to_si(d.lowest_phonon_frequency()),
            healing_frequency_rad_per_s: u.frequency_to_si(sound_frequency_at_healing_scale(d)),
            diluteness: d.diluteness(),
            is_flat: d.powers().is_flat(),
        };
        self.dir.write_json("derived.json", &summary)?;
        Ok(summary)
    }

    fn validity(&mut self) -> Vec<ValidityRow> {
        let report =
            validate_dimensional_reduction(&self.derived, self.config.validity.thresholds());
        let rows = report
            .checks
            .iter()
            .map(|c| ValidityRow {
                check: c.kind.key(),
                ratio: c.ratio,
                threshold: c.threshold,
                passed: c.passed,
            })
            .collect();
        for c in report.failures() {
            self.warnings.push(Warning {
                kind: format!("validity:{}", c.kind.key()),
                message: format!("ratio {:.4} below threshold {}", c.ratio, c.threshold),
            });
        }
        rows
    }

    fn evolve(&mut self) -> Result<(ScaleTrajectory<f64>, TrajectorySummary), CliError> {
        self.stages.push("evolve".into());
        let d = &self.derived;
        let u = d.units;
        let protocol = self
            .config
            .protocol
            .to_protocol(d.trap_frequency, u.time_unit_s())?;
        let t_max = match self.config.numeric.t_max_s {
            Some(t) => u.time(t),
            None => DEFAULT_T_MAX_OMEGA0 / d.trap_frequency,
        };
        let traj =
            integrate_scale_factor(&protocol, d.powers(), t_max, self.config.numeric.tolerance)
                .map_err(CliError::stage("evolve"))?;
        let tau = proper_time(&traj).map_err(CliError::stage("evolve"))?;
        let tau_limit = tau.limit().map_err(CliError::stage("evolve"))?;

        let mut csv = Csv::new(&["t_s", "b", "bdot_per_s", "tau_s"]);
        for (&(t, b, db), &(_, tau)) in traj.samples.iter().zip(&traj.proper_time_samples) {
            csv.row(&[
                num(u.time_to_si(t)),
                num(b),
                num(u.frequency_to_si(db)),
                num(u.time_to_si(tau)),
            ]);
        }
        self.dir.write_text("trajectory.csv", &csv.into_string())?;

        let &(_, b_end, _) = traj.samples.last().unwrap();
        let summary = TrajectorySummary {
            t_max_s: u.time_to_si(traj.end_time()),
            steps: traj.samples.len() - 1,
            final_scale_factor: b_end,
            asymptotic_velocity_per_s: traj.asymptotic_velocity.map(|a| u.frequency_to_si(a)),
            alpha_tilde: traj.asymptotic_velocity.map(|a| a / d.trap_frequency),
            converged: traj.converged,
            proper_time_limit_s: tau_limit.map(|t| u.time_to_si(t)),
            proper_time_convention: if tau.flat_convention {
                "tau = int dt / b^2"
            } else {
                "tau / (sqrt(A(0)) c(0)) = int b^e dt"
            },
        };
        Ok((traj, summary))
    }

    fn horizons(&mut self, traj: &ScaleTrajectory<f64>) -> Result<HorizonSummary, CliError> {
        self.stages.push("horizons".into());
        let d = &self.derived;
        let u = d.units;
        let report = horizon_report(traj, d.sound_speed).map_err(CliError::stage("horizons"))?;
        let mut csv = Csv::new(&["t_s", "r_apparent_m", "delta_rho_particle_m"]);
        for s in &report.samples {
            csv.row(&[
                num(u.time_to_si(s.t)),
                num(u.length_to_si(s.apparent.value())),
                num(u.length_to_si(s.particle.value())),
            ]);
        }
        self.dir.write_text("horizons.csv", &csv.into_string())?;
        Ok(HorizonSummary {
            settled_apparent_m: report
                .settled_apparent
                .and_then(|h| h.finite())
                .map(|r| u.length_to_si(r)),
            particle_at_release_m: report
                .samples
                .first()
                .and_then(|s| s.particle.finite())
                .map(|r| u.length_to_si(r)),
            particle_strictly_decreasing: report.particle_strictly_decreasing(),
            caveat: "valid for wavelengths much longer than the healing length",
        })
    }

    fn kappa_grid(&self, default_lo: f64, default_hi: f64) -> Result<Vec<f64>, CliError> {
        let u = self.derived.units;
        let n = &self.config.numeric;
        let lo = n
            .kappa_min_per_m
            .map(|k| u.wavenumber(k))
            .unwrap_or(default_lo);
        let hi = n
            .kappa_max_per_m
            .map(|k| u.wavenumber(k))
            .unwrap_or(default_hi);
        log_grid(lo, hi, n.kappa_points)
            .map_err(|e| CliError::Config(format!("numeric.kappa grid: {e}")))
    }

    fn spectrum2d(&mut self) -> Result<Spectrum2dSummary, CliError> {
        self.stages.push("spectrum2d".into());
        let d = &self.derived;
        let u = d.units;
        let p = Q2dParams::from_derived(d).map_err(CliError::stage("spectrum2d"))?;
        let xi = p.healing_length;
        let grid = self.kappa_grid(1e-2 / xi, 1e2 / xi)?;
        let values: Vec<f64> = grid.par_iter().map(|&k| p.spectrum(k)).collect();
        let mut csv = Csv::new(&["kappa_per_m", "C_m2", "C_over_xi2"]);
        for (&k, &c) in grid.iter().zip(&values) {
            csv.row(&[
                num(u.wavenumber_to_si(k)),
                num(u.length_power_to_si(c, 2)),
                num(windowed_contrast(c, xi)),
            ]);
        }
        self.dir.write_text("spectrum.csv", &csv.into_string())?;

        let omega = p
            .mode(1.0 / xi)
            .map_err(CliError::stage("spectrum2d"))?
            .frequency;
        let threshold = QUANTUM_OCCUPATION_THRESHOLD;
        let t_thr =
            temperature_for_occupation(omega, threshold).map_err(CliError::stage("spectrum2d"))?;
        let occupancy_curve = log_grid(omega * 1e-2, omega * 1e2, 41)
            .map_err(CliError::stage("spectrum2d"))?
            .into_iter()
            .map(|t| {
                let n = thermal_occupation(omega, t, threshold)
                    .map_err(CliError::stage("spectrum2d"))?;
                Ok(OccupancyPoint {
                    temperature_k: u.temperature_to_si(t),
                    occupation: n.occupation,
                    quantum_dominated: n.quantum_dominated,
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(Spectrum2dSummary {
            points: grid.len(),
            contrast_at_two_pi_over_xi: windowed_contrast(
                p.spectrum(std::f64::consts::TAU / xi),
                xi,
            ),
            saturation: p.saturation(),
            small_kappa_slope_m3: u.length_power_to_si(p.small_kappa_slope(), 3),
            temperature_scale_at_inverse_xi_k: u.temperature_to_si(omega),
            temperature_for_occupation_threshold_k: u.temperature_to_si(t_thr),
            occupation_threshold: threshold,
            occupancy_curve,
            convention: FOURIER_CONVENTION,
        })
    }

    fn spectrum3d(&mut self, traj: &ScaleTrajectory<f64>) -> Result<Spectrum3dSummary, CliError> {
        self.stages.push("spectrum3d".into());
        let d = &self.derived;
        let u = d.units;
        let alpha =
            match traj.asymptotic_velocity {
                Some(a) if traj.converged => a,
                _ => return Err(CliError::Numeric {
                    stage: "spectrum3d",
                    source: bec_analogue::Error::NotConverged(
                        "scale factor has not reached its linear asymptote; raise numeric.t_max_s"
                            .into(),
                    ),
                }),
            };
        let params = ThreeDParams::new(d, alpha).map_err(CliError::stage("spectrum3d"))?;
        let est = max_contrast_estimate(&params);
        let grid = self.kappa_grid(est.kappa_max * 1e-2, est.kappa_max)?;
        let spectrum = FrozenSpectrum3D::closed_form(params, grid.clone());

        let settings = ModeSettings {
            tolerance: self.config.numeric.mode_tolerance,
            ..ModeSettings::default()
        };
        let t_end = traj.end_time();
        let modes: Vec<Option<ModeEvolution<f64>>> = grid
            .par_iter()
            .map(|&k| {
                integrate_mode(
                    k,
                    params.sound_speed,
                    params.coupling,
                    traj,
                    None,
                    t_end,
                    settings,
                )
                .ok()
            })
            .collect();
        let norm = params.coupling * params.peak_density;
        let numeric: Vec<Option<(f64, f64)>> = modes
            .iter()
            .map(|m| {
                m.as_ref()
                    .and_then(|m| m.frozen)
                    .map(|f| (f.phi.norm_sqr(), f.momentum.norm_sqr() / (norm * norm)))
            })
            .collect();

        let mut csv = Csv::new(&[
            "kappa_per_m",
            "phase_variance_m3",
            "C3D_m3",
            "in_band",
            "phase_variance_numeric_m3",
            "C3D_numeric_m3",
        ]);
        for i in 0..grid.len() {
            let (pv, c) = numeric[i].unwrap_or((f64::NAN, f64::NAN));
            csv.row(&[
                num(u.wavenumber_to_si(grid[i])),
                num(u.length_power_to_si(spectrum.phase_variance[i], 3)),
                num(u.length_power_to_si(spectrum.density[i], 3)),
                spectrum.in_band[i].to_string(),
                num(u.length_power_to_si(pv, 3)),
                num(u.length_power_to_si(c, 3)),
            ]);
        }
        self.dir.write_text("spectrum.csv", &csv.into_string())?;
        self.write_mode_histories(&modes)?;

        let out_of_band = spectrum.in_band.iter().filter(|b| !**b).count();
        if out_of_band > 0 {
            self.warnings.push(Warning {
                kind: "band:kappa_above_cutoff".into(),
                message: format!(
                    "{out_of_band} grid points lie above kappa_max and are flagged out of band"
                ),
            });
        }
        if est.short_expansion {
            self.warnings.push(Warning {
                kind: "band:short_linear_expansion".into(),
                message: format!("omega_xi/omega0 = {:.3} is below 10", est.healing_ratio),
            });
        }

        let in_band: Vec<usize> = (0..grid.len()).filter(|&i| spectrum.in_band[i]).collect();
        let pick = |v: &[f64]| in_band.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let ks = pick(&grid);
        let frozen: Vec<usize> = in_band
            .iter()
            .copied()
            .filter(|&i| numeric[i].is_some())
            .collect();
        let kn: Vec<f64> = frozen.iter().map(|&i| grid[i]).collect();
        let pvn: Vec<f64> = frozen.iter().map(|&i| numeric[i].unwrap().0).collect();
        let cn: Vec<f64> = frozen.iter().map(|&i| numeric[i].unwrap().1).collect();
        let deviation = frozen
            .iter()
            .map(|&i| (numeric[i].unwrap().0 / spectrum.phase_variance[i] - 1.0).abs())
            .fold(None, |acc: Option<f64>, x| {
                Some(acc.map_or(x, |a| a.max(x)))
            });
        let d = &self.derived;
        let omega_kmax = bogoliubov_frequency(est.kappa_max, d.chemical_potential, d.mass);

        Ok(Spectrum3dSummary {
            points: grid.len(),
            in_band_points: in_band.len(),
            alpha_tilde: params.alpha_tilde(),
            kappa_max_per_m: u.wavenumber_to_si(est.kappa_max),
            prefactor: est.prefactor,
            max_contrast_estimate: est.estimate,
            max_contrast_direct: est.direct,
            healing_to_trap_ratio: est.healing_ratio,
            slope_phase_closed_form: log_log_slope(&ks, &pick(&spectrum.phase_variance)).ok(),
            slope_density_closed_form: log_log_slope(&ks, &pick(&spectrum.density)).ok(),
            numeric_modes_frozen: numeric.iter().filter(|n| n.is_some()).count(),
            slope_phase_numeric: log_log_slope(&kn, &pvn).ok(),
            slope_density_numeric: log_log_slope(&kn, &cn).ok(),
            numeric_phase_max_deviation: deviation,
            temperature_scale_at_kappa_max_k: u.temperature_to_si(omega_kmax),
            convention: FOURIER_CONVENTION,
        })
    }

    fn write_mode_histories(
        &mut self,
        modes: &[Option<ModeEvolution<f64>>],
    ) -> Result<(), CliError> {
        let u = self.derived.units;
        let n = modes.len();
        let mut picks: Vec<usize> = (0..MODE_HISTORIES)
            .map(|j| j * (n - 1) / (MODE_HISTORIES - 1).max(1))
            .collect();
        picks.dedup();
        let mut csv = Csv::new(&[
            "kappa_per_m",
            "t_s",
            "re_phi",
            "im_phi",
            "abs_phi_dot_per_s",
        ]);
        for i in picks {
            let Some(m) = &modes[i] else { continue };
            for s in &m.samples {
                // φ is per unit volume: report it in SI (m^{3/2})
                let phi: Complex<f64> = s.phi * u.length_power_to_si(1.0, 3).sqrt();
                csv.row(&[
                    num(u.wavenumber_to_si(m.kappa)),
                    num(u.time_to_si(s.t)),
                    num(phi.re),
                    num(phi.im),
                    num(u.frequency_to_si(s.phi_dot.norm()) * u.length_power_to_si(1.0, 3).sqrt()),
                ]);
            }
        }
        self.dir.write_text("modes.csv", &csv.into_string())?;
        Ok(())
    }
}

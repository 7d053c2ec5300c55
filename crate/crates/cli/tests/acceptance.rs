//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use bec_analogue::condensate::{thomas_fermi, CondensateSpec};
use bec_analogue::exponent::{Dimension, Exponent, ScalingPowers};
use bec_analogue::geometry::conformal_factor;
use bec_analogue::geometry::{apparent_horizon, horizon_report, particle_horizon, EffectiveMetric};
use bec_analogue::q2d::{
    density_spectrum_2d, log_grid, subtracted_spectrum_2d, thermal_occupation, Q2dParams,
};
use bec_analogue::scaling::{
    analytic_scale_2d, integrate_scale_factor, proper_time, ExpansionProtocol,
};
use bec_analogue::special::{
    gamma, hankel1, hankel1_asymptotic, hankel1_derivative, hankel1_series, BesselOrder, SWITCH,
};
use bec_analogue::threed::{
    frozen_phase_variance, integrate_mode, log_log_slope, max_contrast_estimate, vacuum_mode,
    FrozenSpectrum3D, ModeSettings, ThreeDParams,
};
use bec_analogue::LinearExpansion;
use bec_analogue_cli::{run, Preset, RunReport, Verb};

/// One measured quantity against its bound.
struct Check {
    label: String,
    passed: bool,
    detail: String,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn within(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        let err = (value - target).abs();
        self.0.push(Check {
            label: label.into(),
            passed: err <= tol,
            detail: format!("{value:.6e} vs {target:.6e} (|diff| {err:.2e}, tol {tol:.1e})"),
        });
    }

    fn relative(&mut self, label: &str, value: f64, target: f64, tol: f64) {
        let err = (value / target - 1.0).abs();
        self.0.push(Check {
            label: label.into(),
            passed: err <= tol,
            detail: format!("{value:.6e} vs {target:.6e} (rel {err:.2e}, tol {tol:.1e})"),
        });
    }

    fn below(&mut self, label: &str, value: f64, bound: f64) {
        self.0.push(Check {
            label: label.into(),
            passed: value <= bound,
            detail: format!("{value:.3e} <= {bound:.1e}"),
        });
    }

    fn holds(&mut self, label: &str, passed: bool, detail: String) {
        self.0.push(Check {
            label: label.into(),
            passed,
            detail,
        });
    }
}

fn report_for(preset: Preset, dir: &Path) -> RunReport {
    run(&preset.config(), Verb::Report, dir).expect("preset run")
}

fn sodium_q2d(c: &mut Checks) {
    let dir = tempfile::tempdir().unwrap();
    let r = report_for(Preset::SodiumQ2d, dir.path());
    c.relative(
        "a_z [m]",
        r.derived.transverse_width_m.unwrap(),
        0.746e-6,
        0.01,
    );
    c.relative("xi [m]", r.derived.healing_length_m, 1.34e-6, 0.02);
    let contrast = r.spectrum2d.as_ref().unwrap().contrast_at_two_pi_over_xi;
    c.within("C(2pi/xi)/xi^2", contrast, 0.0179, 5e-4);
}

fn rubidium_3d(c: &mut Checks) {
    let dir = tempfile::tempdir().unwrap();
    let r = report_for(Preset::Rubidium3d, dir.path());
    c.relative("R_TF [m]", r.derived.thomas_fermi_radius_m, 12.2e-6, 0.02);
    c.relative(
        "2 pi c_s / R [1/s]",
        r.derived.lowest_phonon_frequency_rad_per_s,
        5582.0,
        0.02,
    );
    let est = r.spectrum3d.as_ref().unwrap().max_contrast_estimate;
    c.holds(
        "max contrast estimate in [0.015, 0.022]",
        (0.015..=0.022).contains(&est),
        format!("{est:.5}"),
    );
}

fn prefactor(c: &mut Checks) {
    let derived = thomas_fermi(&CondensateSpec::<f64>::rubidium_3d()).unwrap();
    let proto = ExpansionProtocol::free(derived.trap_frequency).unwrap();
    let traj = integrate_scale_factor(
        &proto,
        derived.powers(),
        1e5 / derived.trap_frequency,
        1e-10,
    )
    .unwrap();
    let params = ThreeDParams::new(&derived, traj.asymptotic_velocity.unwrap()).unwrap();
    c.within(
        "alpha / omega0",
        params.alpha_tilde(),
        (2.0_f64 / 3.0).sqrt(),
        1e-4,
    );
    c.within(
        "prefactor",
        max_contrast_estimate(&params).prefactor,
        30.3,
        0.1,
    );
}

fn scale_factor_oracle(c: &mut Checks) {
    let tol = 1e-10;
    let w0 = 1.0;
    let t_max = 100.0 / w0;
    let proto = ExpansionProtocol::free(w0).unwrap();
    let traj = integrate_scale_factor(
        &proto,
        ScalingPowers::new(Dimension::TWO, Exponent::QUARTIC),
        t_max,
        tol,
    )
    .unwrap();
    let tau = proper_time(&traj).unwrap();
    let (mut worst_b, mut worst_tau) = (0.0_f64, 0.0_f64);
    for i in 1..=4000 {
        let t = t_max * i as f64 / 4000.0;
        let (b, _) = traj.state(t).unwrap();
        let (be, _) = analytic_scale_2d(t, w0);
        worst_b = worst_b.max((b / be - 1.0).abs());
        let te = (w0 * t).atan() / w0;
        worst_tau = worst_tau.max((tau.at(t).unwrap() / te - 1.0).abs());
    }
    c.below("b(t) vs sqrt(1 + w0^2 t^2), rel", worst_b, 1e-8);
    c.below("tau(t) vs arctan(w0 t)/w0, rel", worst_tau, 1e-8);
    let e0 = traj.energy(1.0, 0.0);
    let drift = traj
        .samples
        .iter()
        .map(|&(_, b, db)| (traj.energy(b, db) / e0 - 1.0).abs())
        .fold(0.0, f64::max);
    c.below("energy drift, rel", drift, 10.0 * tol);
}

fn mode_oracle(c: &mut Checks) {
    let g = 0.05;
    let lin = LinearExpansion::new((2.0_f64 / 3.0).sqrt(), -0.3).unwrap();
    let kappas = log_grid(1.0, 100.0, 20).unwrap();
    let modes: Vec<_> = kappas
        .iter()
        .map(|&k| integrate_mode(k, 1.0, g, &lin, None, 1e12, ModeSettings::default()).unwrap())
        .collect();
    let mut worst = 0.0_f64;
    let mut worst_frozen = 0.0_f64;
    for m in &modes {
        for s in &m.samples {
            let (phi, dphi) = vacuum_mode(m.kappa, s.t, lin, 1.0, g).unwrap();
            worst = worst.max((s.phi - phi).norm() / phi.norm());
            worst = worst.max((s.phi_dot - dphi).norm() / dphi.norm());
        }
        let f = m.frozen.unwrap();
        let v = frozen_phase_variance(m.kappa, g, lin.alpha, 1.0);
        worst_frozen = worst_frozen.max((f.phi.norm_sqr() / v - 1.0).abs());
    }
    c.below("numeric vs Hankel mode, rel", worst, 1e-6);
    c.below(
        "frozen phase variance vs closed form, rel",
        worst_frozen,
        5e-3,
    );
    // gρ0 = m c0² with c0 = 1
    let (rho0, mass) = (2.0, g * 2.0);
    let params = ThreeDParams {
        coupling: g,
        mass,
        peak_density: rho0,
        sound_speed: 1.0,
        healing_length: 1.0 / mass,
        scattering_length: 1e-3,
        trap_frequency: 1.0,
        alpha: lin.alpha,
    };
    let spec = FrozenSpectrum3D::from_modes(params, &modes).unwrap();
    let sp = log_log_slope(&spec.kappa, &spec.phase_variance).unwrap();
    let sd = log_log_slope(&spec.kappa, &spec.density).unwrap();
    c.within("phase slope", sp, -4.0 / 3.0, 0.01);
    c.within("density slope", sd, 4.0 / 3.0, 0.01);
}

fn horizon_suite(c: &mut Checks) {
    let (w0, c0, g0) = (1.0_f64, 1.0, 0.5);
    let proto = ExpansionProtocol::free(w0).unwrap();
    let traj = integrate_scale_factor(
        &proto,
        ScalingPowers::new(Dimension::TWO, Exponent::QUARTIC),
        2e3 / w0,
        1e-10,
    )
    .unwrap();
    let r = apparent_horizon(&traj, c0, 1e3 / w0)
        .unwrap()
        .finite()
        .unwrap();
    c.relative("apparent horizon at 1e3/w0 vs c0/w0", r, c0 / w0, 1e-3);
    let d = particle_horizon(&traj, c0, 0.0).unwrap().finite().unwrap();
    c.relative(
        "particle horizon at release vs c0 pi/(2 w0)",
        d,
        c0 * PI / (2.0 * w0),
        1e-3,
    );
    let mut worst = 0.0_f64;
    for &t in &[0.3, 1.0, 10.0, 500.0] {
        let (b, db) = traj.state(t).unwrap();
        let r = apparent_horizon(&traj, c0, t).unwrap().finite().unwrap();
        let cs = c0 / b;
        let a = conformal_factor(cs, g0, Dimension::TWO, Exponent::QUARTIC).unwrap();
        let v = db / b * r;
        let m =
            EffectiveMetric::new(a, cs, vec![v, 0.0], Dimension::TWO, Exponent::QUARTIC).unwrap();
        worst = worst.max(m.g00().abs() / (a * cs * cs));
    }
    c.below("|g00| / (A c^2) at r_horizon", worst, 1e-10);

    let dir = tempfile::tempdir().unwrap();
    let rep = report_for(Preset::SodiumQ2d, dir.path());
    let settled = rep.horizons.as_ref().unwrap().settled_apparent_m.unwrap();
    let formula = rep.derived.sound_speed_m_per_s / rep.derived.omega0_rad_per_s;
    c.relative(
        "sodium settled apparent horizon vs c0/w0",
        settled,
        formula,
        1e-8,
    );
    let row = rep.row("apparent_horizon").unwrap();
    c.holds(
        "sodium apparent horizon reported with its published ratio",
        row.published == 3.28e-6 && (row.ratio - settled / 3.28e-6).abs() < 1e-12,
        format!(
            "{:.4e} m, ratio {:.3} to the published 3.28e-6 m",
            row.computed, row.ratio
        ),
    );
}

// mpmath, 40 digits
const GAMMA_ONE_THIRD: f64 = 2.678_938_534_707_747_633_655_692_940_974_677_644_129;
const GAMMA_TWO_THIRDS: f64 = 1.354_117_939_426_400_416_945_288_028_154_513_785_519;

fn special_functions(c: &mut Checks) {
    let mut worst = 0.0_f64;
    for nu in [1.0 / 3.0, 2.0 / 3.0] {
        let order = BesselOrder::new(nu).unwrap();
        for x in log_grid(1e-3, 1e2, 41).unwrap() {
            let h = hankel1(order, x).unwrap();
            let dh = hankel1_derivative(order, x).unwrap();
            let w = h.re * dh.im - dh.re * h.im;
            worst = worst.max((w * PI * x / 2.0 - 1.0).abs());
        }
    }
    c.below("Wronskian J Y' - J' Y vs 2/(pi x), rel", worst, 1e-10);
    c.relative(
        "Gamma(1/3)",
        gamma(1.0 / 3.0).unwrap(),
        GAMMA_ONE_THIRD,
        1e-12,
    );
    c.relative(
        "Gamma(2/3)",
        gamma(2.0 / 3.0).unwrap(),
        GAMMA_TWO_THIRDS,
        1e-12,
    );
    let mut jump = 0.0_f64;
    for nu in [1.0 / 3.0, 2.0 / 3.0] {
        let s = hankel1_series(nu, SWITCH);
        let a = hankel1_asymptotic(nu, SWITCH);
        jump = jump.max((s - a).norm() / a.norm());
    }
    c.below("series/asymptotic crossover jump, rel", jump, 1e-9);
}

fn files_in(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

fn property_suite(c: &mut Checks) {
    let sodium =
        Q2dParams::from_derived(&thomas_fermi(&CondensateSpec::sodium_q2d()).unwrap()).unwrap();
    let (g, mu, m, xi) = (
        sodium.coupling,
        sodium.chemical_potential,
        sodium.mass,
        sodium.healing_length,
    );
    let grid = log_grid(1e-4 / xi, 1e4 / xi, 400).unwrap();
    let values: Vec<f64> = grid
        .iter()
        .map(|&k| density_spectrum_2d(k, g, mu, m))
        .collect();
    let monotone = values.windows(2).all(|w| w[1] > w[0]);
    let bounded = values.iter().all(|&v| v > 0.0 && v <= g / mu);
    c.holds(
        "C_2D increasing and within (0, g/mu]",
        monotone && bounded,
        format!("{} points", grid.len()),
    );

    let mut tail = 0.0_f64;
    for &kx in &[1e3, 1e4, 1e5] {
        let k = kx / xi;
        let ratio = subtracted_spectrum_2d(2.0 * k, g, mu, m) / subtracted_spectrum_2d(k, g, mu, m);
        tail = tail.max((ratio - 0.25).abs());
    }
    c.below(
        "subtracted tail: |C(2k)/C(k) - 1/4| at k xi >= 1e3",
        tail,
        1e-3,
    );

    let mut scaling = 0.0_f64;
    for &b in &[1.0, 3.7, 42.0, 800.0] {
        for &kx in &[1e-3, 0.5, 2.0 * PI, 300.0] {
            let k = kx / xi;
            let lab = sodium.rescaled(b).spectrum(k / b) / (b * b);
            scaling = scaling.max((lab / sodium.spectrum(k) - 1.0).abs());
        }
    }
    c.below("perfect-scaling spectrum invariance, rel", scaling, 1e-12);

    let mut decreasing = true;
    for preset in Preset::ALL {
        let derived = thomas_fermi(&preset.config().condensate.to_spec().unwrap()).unwrap();
        let proto = ExpansionProtocol::free(derived.trap_frequency).unwrap();
        let traj = integrate_scale_factor(
            &proto,
            derived.powers(),
            1e4 / derived.trap_frequency,
            1e-10,
        )
        .unwrap();
        decreasing &= horizon_report(&traj, derived.sound_speed)
            .unwrap()
            .particle_strictly_decreasing();
    }
    c.holds(
        "particle horizon strictly decreasing (both presets)",
        decreasing,
        String::new(),
    );

    let (n, e) = (
        thermal_occupation(1.0_f64, 1.0, 0.01).unwrap().occupation,
        std::f64::consts::E,
    );
    c.relative("n(hbar w = k_B T)", n, 1.0 / (e - 1.0), 1e-14);

    let mut identical = true;
    for preset in Preset::ALL {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        report_for(preset, a.path());
        report_for(preset, b.path());
        let (fa, fb) = (files_in(a.path()), files_in(b.path()));
        identical &= !fa.is_empty() && fa == fb;
    }
    c.holds(
        "CLI CSV outputs byte-identical across runs",
        identical,
        String::new(),
    );
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    body: fn(&mut Checks),
}

fn main() {
    let criteria = [
        Criterion {
            name: "sodium quasi-2D scenario",
            budget: Duration::from_secs(1),
            body: sodium_q2d,
        },
        Criterion {
            name: "rubidium 3D scenario",
            budget: Duration::from_secs(1),
            body: rubidium_3d,
        },
        Criterion {
            name: "contrast prefactor and alpha",
            budget: Duration::from_secs(1),
            body: prefactor,
        },
        Criterion {
            name: "scale-factor oracle",
            budget: Duration::from_secs(1),
            body: scale_factor_oracle,
        },
        Criterion {
            name: "3D mode oracle",
            budget: Duration::from_secs(30),
            body: mode_oracle,
        },
        Criterion {
            name: "horizon suite",
            budget: Duration::from_secs(5),
            body: horizon_suite,
        },
        Criterion {
            name: "special-function identities",
            budget: Duration::from_secs(5),
            body: special_functions,
        },
        Criterion {
            name: "property suite",
            budget: Duration::from_secs(10),
            body: property_suite,
        },
    ];
    let mut failed = 0;
    for (i, cr) in criteria.iter().enumerate() {
        let mut checks = Checks::default();
        let start = Instant::now();
        (cr.body)(&mut checks);
        let elapsed = start.elapsed();
        checks.holds(
            "runtime",
            elapsed <= cr.budget,
            format!(
                "{:.3} s of {} s",
                elapsed.as_secs_f64(),
                cr.budget.as_secs()
            ),
        );
        let ok = checks.0.iter().all(|c| c.passed);
        println!(
            "{} {}. {}",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            cr.name
        );
        for c in &checks.0 {
            println!(
                "       {} {}: {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.label,
                c.detail
            );
        }
        if !ok {
            failed += 1;
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

use bec_analogue::condensate::{thomas_fermi, CondensateSpec, TrapGeometry};
use bec_analogue::exponent::Dimension;
use bec_analogue::q2d::{
    density_spectrum_2d, subtracted_spectrum_2d, temperature_for_occupation, thermal_occupation,
    windowed_contrast, Q2dParams,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn sodium() -> Q2dParams<f64> {
    Q2dParams::from_derived(&thomas_fermi(&CondensateSpec::sodium_q2d()).unwrap()).unwrap()
}

#[test]
fn sodium_headline_contrast() {
    let derived = thomas_fermi(&CondensateSpec::<f64>::sodium_q2d()).unwrap();
    let p = Q2dParams::from_derived(&derived).unwrap();
    let xi = p.healing_length;
    let contrast = windowed_contrast(p.spectrum(2.0 * PI / xi), xi);
    assert!((contrast - 0.0179).abs() < 5e-4, "{contrast}");
    // closed form: at κ = 2π/ξ the contrast depends only on a_s/a_z
    let ratio = derived.scattering_length / derived.transverse_width.unwrap();
    let oracle = 2.0 * 2f64.sqrt() * PI.powf(1.5) / (1.0 + PI * PI).sqrt() * ratio;
    assert!((contrast / oracle - 1.0).abs() < 1e-12);
}

#[test]
fn contrast_tracks_scattering_over_width() {
    // tighter confinement raises a_s/a_z and the contrast in proportion
    let base = CondensateSpec::<f64>::sodium_q2d();
    let mut tight = base.clone();
    tight.trap =
        TrapGeometry::new(Dimension::TWO, 2.0 * PI * 10.0, Some(2.0 * PI * 3160.0)).unwrap();
    let c = |spec: &CondensateSpec<f64>| {
        let d = thomas_fermi(spec).unwrap();
        let p = Q2dParams::from_derived(&d).unwrap();
        (
            windowed_contrast(p.spectrum(2.0 * PI / p.healing_length), p.healing_length),
            d.scattering_length / d.transverse_width.unwrap(),
        )
    };
    let (c0, r0) = c(&base);
    let (c1, r1) = c(&tight);
    assert!((c1 / c0 - r1 / r0).abs() < 1e-10);
    assert!((r1 / r0 - 2.0).abs() < 1e-10);
}

#[test]
fn small_kappa_slope_by_richardson() {
    let p = sodium();
    let f = |h: f64| p.spectrum(h) / h;
    let h = 1e-3 / p.healing_length;
    // C/κ is even in κ, so eliminate the h² term
    let r = (4.0 * f(h / 2.0) - f(h)) / 3.0;
    assert!((r / p.small_kappa_slope() - 1.0).abs() < 1e-8);
}

#[test]
fn tail_quarters_when_kappa_doubles() {
    let p = sodium();
    let k = 1e4 / p.healing_length;
    let ratio = p.subtracted(2.0 * k) / p.subtracted(k);
    assert!((ratio - 0.25).abs() < 1e-7);
    assert!(p.subtracted(k) < 0.0);
}

#[test]
fn mode_amplitudes_reproduce_spectrum() {
    // |δρ_k|² / ρ0² is the spectrum when amplitudes are per unit volume
    let p = sodium();
    for &kx in &[0.1, 1.0, 6.0, 40.0] {
        let k = kx / p.healing_length;
        let m = p.mode(k).unwrap();
        let from_mode = m.density_amplitude.powi(2) / p.peak_density.powi(2);
        assert!((from_mode / p.spectrum(k) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sodium_temperature_scale() {
    let derived = thomas_fermi(&CondensateSpec::<f64>::sodium_q2d()).unwrap();
    let p = Q2dParams::from_derived(&derived).unwrap();
    let omega = p.mode(1.0 / p.healing_length).unwrap().frequency;
    let kelvin = derived.units.temperature_to_si(omega);
    assert!((kelvin / 1.31e-8 - 1.0).abs() < 1e-2, "{kelvin}");
    let t01 = temperature_for_occupation(omega, 0.01).unwrap();
    let n = thermal_occupation(omega, t01, 0.01).unwrap();
    assert!((n.occupation - 0.01).abs() < 1e-14);
}

proptest! {
    #[test]
    fn spectrum_monotone_and_bounded(
        g in 1e-3f64..10.0, mu in 1e-3f64..10.0, m in 1e-2f64..10.0,
        k1 in 1e-4f64..1e4, k2 in 1e-4f64..1e4,
    ) {
        let (lo, hi) = (k1.min(k2), k1.max(k2));
        let a = density_spectrum_2d(lo, g, mu, m);
        let b = density_spectrum_2d(hi, g, mu, m);
        prop_assert!(a >= 0.0);
        prop_assert!(b <= g / mu);
        if hi > lo * (1.0 + 1e-9) {
            prop_assert!(b > a);
        }
        prop_assert!(subtracted_spectrum_2d(hi, g, mu, m) < 0.0);
    }

    #[test]
    fn perfect_scaling_invariance(b in 1.0f64..1e3, kx in 1e-3f64..1e3) {
        let p = sodium();
        let k = kx / p.healing_length;
        let lab = p.rescaled(b).spectrum(k / b) / (b * b);
        prop_assert!((lab / p.spectrum(k) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonical_pairing(kx in 1e-4f64..1e4) {
        let p = sodium();
        let m = p.mode(kx / p.healing_length).unwrap();
        prop_assert!((m.pairing() - 0.5).abs() < 1e-14);
        prop_assert!(m.frequency > 0.0);
    }
}

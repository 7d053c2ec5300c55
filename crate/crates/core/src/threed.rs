//! Phonon modes of the expanding 3D gas with quartic interaction.
//!
//! In co-moving coordinates the phase fluctuation φ_κ obeys
//!
//! ```text
//! φ̈ + 3 (ḃ/b) φ̇ + c0² κ² / b⁵ φ = 0.
//! ```
//!
//! In the linear regime b = α t the solutions are (1/t) H_{2/3}(z) with
//! z = (2/3) c0 κ α^{−5/2} t^{−3/2}. H^{(1)} is the positive-frequency member
//! because z decreases in time, so e^{iz} ∼ e^{−i∫ω_ad dt}. Normalised so that
//! b³ (φ φ̇* − φ* φ̇) = i g, its amplitude per unit volume is √(πg/(6α³)).

use num_complex::Complex;

use crate::condensate::DerivedParams;
use crate::error::{invalid, Error, Result};
use crate::exponent::{Dimension, Exponent};
use crate::ode::{Dopri5, Solution};
use crate::real::{lit, Real};
use crate::scaling::{Expansion, LinearExpansion};
use crate::special::{gamma, hankel1, hankel1_derivative, BesselOrder};

/// Default margin ω_ad ≥ factor · ḃ/b required at the start of an integration.
pub const ADIABATIC_START_FACTOR: f64 = 20.0;
/// Default freezing criterion |φ̇| (b/ḃ) / |φ|.
pub const FREEZE_THRESHOLD: f64 = 1e-6;

/// ω_ad = c0 κ / b^{5/2}.
pub fn adiabatic_frequency<T: Real>(kappa: T, c0: T, b: T) -> T {
    c0 * kappa / b.powf(lit(2.5))
}

/// φ̈ on an arbitrary background.
pub fn mode_ode_rhs<T: Real, E: Expansion<T>>(
    t: T,
    phi: Complex<T>,
    phi_dot: Complex<T>,
    kappa: T,
    c0: T,
    background: &E,
) -> Result<Complex<T>> {
    let (b, db) = background.scale_at(t)?;
    let w2 = c0 * c0 * kappa * kappa / b.powi(5);
    Ok(-phi_dot * (lit::<T>(3.0) * db / b) - phi * w2)
}

/// Both Hankel solutions and their time derivatives, unnormalised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelBasis<T> {
    pub argument: T,
    pub positive: (Complex<T>, Complex<T>),
    pub negative: (Complex<T>, Complex<T>),
}

impl<T: Real> HankelBasis<T> {
    /// b³ (u₊ u̇₋ − u₋ u̇₊) with b = α t; equals 6iα³/π.
    pub fn wronskian(&self, b: T) -> Complex<T> {
        let (u1, d1) = self.positive;
        let (u2, d2) = self.negative;
        (u1 * d2 - u2 * d1) * b.powi(3)
    }
}

/// (1/t) H^{(1,2)}_{2/3}(z) at time `t` since the linear-asymptote origin.
pub fn analytic_mode<T: Real>(kappa: T, t: T, alpha: T, c0: T) -> Result<HankelBasis<T>> {
    if !(t > T::zero()) {
        return Err(invalid("t", "analytic modes need t > 0 on b = αt"));
    }
    if !(kappa > T::zero() && alpha > T::zero() && c0 > T::zero()) {
        return Err(invalid("mode", "κ, α and c0 must be positive"));
    }
    let nu = BesselOrder::two_thirds();
    let z = lit::<T>(2.0 / 3.0) * c0 * kappa * alpha.powf(lit(-2.5)) * t.powf(lit(-1.5));
    let h = hankel1(nu, z)?;
    let dh = hankel1_derivative(nu, z)?;
    let dz = -lit::<T>(1.5) * z / t;
    let u = h / t;
    let du = -h / (t * t) + dh * (dz / t);
    Ok(HankelBasis {
        argument: z,
        positive: (u, du),
        negative: (u.conj(), du.conj()),
    })
}

/// |C| with φ = C u₊ per unit volume: √(π g / (6 α³)).
pub fn mode_normalization<T: Real>(coupling: T, alpha: T) -> T {
    (T::PI() * coupling / (lit::<T>(6.0) * alpha.powi(3))).sqrt()
}

/// Normalised positive-frequency mode (φ, φ̇) on the linear asymptote.
pub fn vacuum_mode<T: Real>(
    kappa: T,
    t: T,
    asymptote: LinearExpansion<T>,
    c0: T,
    coupling: T,
) -> Result<(Complex<T>, Complex<T>)> {
    let basis = analytic_mode(kappa, t - asymptote.t_offset, asymptote.alpha, c0)?;
    let n = mode_normalization(coupling, asymptote.alpha);
    Ok((basis.positive.0 * n, basis.positive.1 * n))
}

/// Latest time on the linear asymptote at which ω_ad ≥ factor · ḃ/b.
pub fn latest_adiabatic_start<T: Real>(
    kappa: T,
    c0: T,
    asymptote: LinearExpansion<T>,
    factor: T,
) -> T {
    // c0 κ / (α s)^{5/2} = factor / s
    let s = (c0 * kappa / (factor * asymptote.alpha.powf(lit(2.5)))).powf(lit(2.0 / 3.0));
    asymptote.t_offset + s
}

/// Latest time on `background` with ω_ad · b/ḃ ≥ factor, by bisection
/// (the ratio decreases monotonically during expansion).
pub fn adiabatic_start<T: Real, E: Expansion<T>>(
    kappa: T,
    c0: T,
    background: &E,
    asymptote: LinearExpansion<T>,
    factor: T,
) -> Result<T> {
    let (start, end) = background.time_range();
    let ratio = |t: T| -> Result<T> {
        let (b, db) = background.scale_at(t)?;
        Ok(if db > T::zero() {
            adiabatic_frequency(kappa, c0, b) * b / db
        } else {
            T::infinity()
        })
    };
    let guess = latest_adiabatic_start(kappa, c0, asymptote, factor);
    let mut hi = (guess + (guess - start).abs()).min(end);
    let mut lo = start + (hi - start) * lit(1e-12);
    if ratio(lo)? < factor {
        let (b, db) = background.scale_at(lo)?;
        return Err(Error::ModeAlreadyFrozen {
            omega_ad: adiabatic_frequency(kappa, c0, b).to_f64_lossy(),
            required: (factor * db / b).to_f64_lossy(),
        });
    }
    if ratio(hi)? >= factor {
        return Ok(hi);
    }
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if ratio(mid)? >= factor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSource {
    Numeric,
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSample<T> {
    pub t: T,
    pub phi: Complex<T>,
    pub phi_dot: Complex<T>,
}

/// Late-time data of a frozen mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenMode<T> {
    pub time: T,
    /// φ at the freezing time.
    pub phi: Complex<T>,
    /// Limit of the canonical momentum b³φ̇.
    pub momentum: Complex<T>,
}

impl<T: Real> FrozenMode<T> {
    pub fn value(&self) -> T {
        self.phi.norm()
    }
}

#[derive(Debug, Clone)]
pub struct ModeEvolution<T> {
    pub kappa: T,
    pub samples: Vec<ModeSample<T>>,
    pub frozen: Option<FrozenMode<T>>,
    pub source: ModeSource,
    /// |φ̇ − (−iω_ad − H/4) φ| / |ω_ad φ| at the start.
    pub wkb_residual: T,
    /// |φ̇ + iω_ad φ| / |ω_ad φ| at the start.
    pub wkb_residual_leading: T,
    solution: Option<Solution<T, 4>>,
}

impl<T: Real> ModeEvolution<T> {
    pub fn start(&self) -> T {
        self.samples[0].t
    }

    pub fn end(&self) -> T {
        self.samples.last().unwrap().t
    }

    /// (φ, φ̇) from the dense output of a numeric evolution.
    pub fn at<E: Expansion<T>>(&self, t: T, background: &E) -> Result<(Complex<T>, Complex<T>)> {
        let sol = self
            .solution
            .as_ref()
            .ok_or_else(|| Error::Unsupported("dense output needs a numeric evolution".into()))?;
        let y = sol.eval(t)?;
        let (b, _) = background.scale_at(t)?;
        let phi = Complex::new(y[0], y[1]);
        Ok((phi, Complex::new(y[2], y[3]) / b.powi(3)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSettings<T> {
    pub start_factor: T,
    pub tolerance: T,
    pub freeze_threshold: T,
}

impl<T: Real> Default for ModeSettings<T> {
    fn default() -> Self {
        Self {
            start_factor: lit(ADIABATIC_START_FACTOR),
            tolerance: lit(1e-11),
            freeze_threshold: lit(FREEZE_THRESHOLD),
        }
    }
}

/// Integrates one mode from the adiabatic vacuum through freezing.
///
/// Initial data at `t_start` (default: the latest admissible start on the
/// background's linear asymptote) are the normalised positive-frequency
/// Hankel solution. The integration stops at `t_end` or once the mode is
/// frozen.
pub fn integrate_mode<T: Real, E: Expansion<T>>(
    kappa: T,
    c0: T,
    coupling: T,
    background: &E,
    t_start: Option<T>,
    t_end: T,
    settings: ModeSettings<T>,
) -> Result<ModeEvolution<T>> {
    if !(kappa > T::zero()) {
        return Err(invalid("kappa", "must be positive"));
    }
    let lin = background
        .asymptote()
        .ok_or_else(|| Error::NotConverged("background has no linear asymptote".into()))?;
    let t0 = match t_start {
        Some(t) => t,
        None => adiabatic_start(kappa, c0, background, lin, settings.start_factor)?,
    };
    let (b0, db0) = background.scale_at(t0)?;
    let omega0 = adiabatic_frequency(kappa, c0, b0);
    let hubble0 = db0 / b0;
    let required = settings.start_factor * hubble0;
    // small slack for the default start, which sits exactly on the bound
    if omega0 < required * (T::one() - lit(1e-9)) {
        return Err(Error::ModeAlreadyFrozen {
            omega_ad: omega0.to_f64_lossy(),
            required: required.to_f64_lossy(),
        });
    }
    if !(t_end > t0) {
        return Err(invalid("t_end", "must exceed the start time"));
    }

    let (phi0, dphi0) = vacuum_mode(kappa, t0, lin, c0, coupling)?;
    let pi0 = dphi0 * b0.powi(3);
    let wkb_residual_leading =
        (dphi0 + Complex::<T>::i() * phi0 * omega0).norm() / (omega0 * phi0.norm());
    let first_order = phi0 * Complex::new(-hubble0 / lit(4.0), -omega0);
    let wkb_residual = (dphi0 - first_order).norm() / (omega0 * phi0.norm());

    let rtol = settings.tolerance;
    let floor = lit::<T>(1e-3) * rtol;
    let atol = [
        floor * phi0.norm(),
        floor * phi0.norm(),
        floor * pi0.norm(),
        floor * pi0.norm(),
    ];
    let w2 = c0 * c0 * kappa * kappa;
    let mut failure = None;
    let threshold = settings.freeze_threshold;
    let solution = Dopri5::new(rtol, floor).with_atol(atol).solve(
        |t, y| match background.scale_at(t) {
            Ok((b, _)) => {
                let b3 = b.powi(3);
                let b2 = b * b;
                [y[2] / b3, y[3] / b3, -w2 * y[0] / b2, -w2 * y[1] / b2]
            }
            Err(e) => {
                failure.get_or_insert(e);
                [T::zero(); 4]
            }
        },
        t0,
        [phi0.re, phi0.im, pi0.re, pi0.im],
        t_end,
        |t, y| {
            let Ok((b, db)) = background.scale_at(t) else {
                return true;
            };
            let phi = (y[0] * y[0] + y[1] * y[1]).sqrt();
            let pi = (y[2] * y[2] + y[3] * y[3]).sqrt();
            pi / b.powi(3) * (b / db) < threshold * phi
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let solution = solution?;

    let mut samples = Vec::with_capacity(solution.steps().len() + 1);
    samples.push(ModeSample {
        t: t0,
        phi: phi0,
        phi_dot: dphi0,
    });
    for step in solution.steps() {
        let t = step.end();
        let y = step.end_state();
        let (b, _) = background.scale_at(t)?;
        samples.push(ModeSample {
            t,
            phi: Complex::new(y[0], y[1]),
            phi_dot: Complex::new(y[2], y[3]) / b.powi(3),
        });
    }

    let frozen = if solution.stopped_early {
        let last = *samples.last().unwrap();
        let (b, _) = background.scale_at(last.t)?;
        // π̇ = −c0²κ²φ/b² integrated over the remaining linear expansion
        let momentum = last.phi_dot * b.powi(3) - last.phi * (w2 / (lin.alpha * b));
        Some(FrozenMode {
            time: last.t,
            phi: last.phi,
            momentum,
        })
    } else {
        None
    };

    Ok(ModeEvolution {
        kappa,
        samples,
        frozen,
        source: ModeSource::Numeric,
        wkb_residual,
        wkb_residual_leading,
        solution: Some(solution),
    })
}

/// Samples of the normalised analytic mode at the given times.
pub fn analytic_evolution<T: Real>(
    kappa: T,
    c0: T,
    coupling: T,
    asymptote: LinearExpansion<T>,
    times: &[T],
) -> Result<ModeEvolution<T>> {
    if times.is_empty() {
        return Err(invalid("times", "need at least one sample time"));
    }
    let samples = times
        .iter()
        .map(|&t| {
            let (phi, phi_dot) = vacuum_mode(kappa, t, asymptote, c0, coupling)?;
            Ok(ModeSample { t, phi, phi_dot })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = samples[0];
    let s = first.t - asymptote.t_offset;
    let omega = adiabatic_frequency(kappa, c0, asymptote.alpha * s);
    let wkb_residual_leading =
        (first.phi_dot + Complex::<T>::i() * first.phi * omega).norm() / (omega * first.phi.norm());
    let first_order = first.phi * Complex::new(-T::one() / (lit::<T>(4.0) * s), -omega);
    let wkb_residual = (first.phi_dot - first_order).norm() / (omega * first.phi.norm());
    Ok(ModeEvolution {
        kappa,
        samples,
        frozen: None,
        source: ModeSource::Analytic,
        wkb_residual,
        wkb_residual_leading,
        solution: None,
    })
}

fn gamma_lit<T: Real>(x: f64) -> T {
    gamma(lit::<T>(x)).expect("Γ at a positive argument")
}

/// ⟨φ_κ²⟩ = (g/6π) Γ(2/3)² 3^{4/3} α^{1/3} c0^{−4/3} κ^{−4/3}.
pub fn frozen_phase_variance<T: Real>(kappa: T, coupling: T, alpha: T, c0: T) -> T {
    let g23: T = gamma_lit(2.0 / 3.0);
    coupling / (lit::<T>(6.0) * T::PI())
        * g23
        * g23
        * lit::<T>(3.0).powf(lit(4.0 / 3.0))
        * alpha.cbrt()
        * (c0 * kappa).powf(lit(-4.0 / 3.0))
}

/// C_3D = (Γ(1/3)² 3^{2/3} / 6π) ξ c0^{1/3} κ^{4/3} / (ρ0 α^{1/3}).
pub fn density_spectrum_3d<T: Real>(kappa: T, healing_length: T, c0: T, density: T, alpha: T) -> T {
    if kappa <= T::zero() {
        return T::zero();
    }
    let g13: T = gamma_lit(1.0 / 3.0);
    g13 * g13 * lit::<T>(3.0).powf(lit(2.0 / 3.0)) / (lit::<T>(6.0) * T::PI())
        * healing_length
        * c0.cbrt()
        * kappa.powf(lit(4.0 / 3.0))
        / (density * alpha.cbrt())
}

/// 4√π Γ(1/3)² α̃^{3/4} / 3^{1/3}.
pub fn max_contrast_prefactor<T: Real>(alpha_tilde: T) -> T {
    let g13: T = gamma_lit(1.0 / 3.0);
    lit::<T>(4.0) * T::PI().sqrt() * g13 * g13 * alpha_tilde.powf(lit(0.75)) / lit::<T>(3.0).cbrt()
}

/// Inputs of the 3D closed forms, natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeDParams<T> {
    pub coupling: T,
    pub mass: T,
    pub peak_density: T,
    pub sound_speed: T,
    pub healing_length: T,
    pub scattering_length: T,
    pub trap_frequency: T,
    /// Late-time ḃ in natural frequency units.
    pub alpha: T,
}

impl<T: Real> ThreeDParams<T> {
    /// Combines the trapped state with the trajectory's asymptotic velocity.
    pub fn new(derived: &DerivedParams<T>, alpha: T) -> Result<Self> {
        if derived.dimension != Dimension::THREE || derived.exponent != Exponent::QUARTIC {
            return Err(Error::Unsupported(
                "the 3D mode equation needs D = 3 with quartic interaction".into(),
            ));
        }
        if !(alpha > T::zero()) {
            return Err(invalid("alpha", "must be positive"));
        }
        Ok(Self {
            coupling: derived.effective_coupling,
            mass: derived.mass,
            peak_density: derived.peak_density,
            sound_speed: derived.sound_speed,
            healing_length: derived.healing_length,
            scattering_length: derived.scattering_length,
            trap_frequency: derived.trap_frequency,
            alpha,
        })
    }

    pub fn alpha_tilde(&self) -> T {
        self.alpha / self.trap_frequency
    }

    /// ω_ξ = c0/ξ.
    pub fn healing_frequency(&self) -> T {
        self.sound_speed / self.healing_length
    }

    pub fn phase_variance(&self, kappa: T) -> T {
        frozen_phase_variance(kappa, self.coupling, self.alpha, self.sound_speed)
    }

    pub fn density_spectrum(&self, kappa: T) -> T {
        density_spectrum_3d(
            kappa,
            self.healing_length,
            self.sound_speed,
            self.peak_density,
            self.alpha,
        )
    }

    /// κ_max = (1/ξ)(α/ω_ξ)^{1/4}.
    pub fn kappa_max(&self) -> T {
        (self.alpha / self.healing_frequency()).powf(lit(0.25)) / self.healing_length
    }

    pub fn diluteness(&self) -> T {
        (self.scattering_length.powi(3) * self.peak_density).sqrt()
    }
}

/// Minimal healing-to-trap frequency ratio for which the linear-expansion
/// estimate is meaningful.
pub const MIN_HEALING_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxContrast<T> {
    pub kappa_max: T,
    pub prefactor: T,
    /// prefactor · √(a_s³ρ0) · (ω_ξ/ω0)^{−3/4}.
    pub estimate: T,
    /// κ_max³ C_3D(κ_max) evaluated directly.
    pub direct: T,
    pub healing_ratio: T,
    /// ω_ξ/ω0 below [`MIN_HEALING_RATIO`].
    pub short_expansion: bool,
}

pub fn max_contrast_estimate<T: Real>(params: &ThreeDParams<T>) -> MaxContrast<T> {
    let kappa_max = params.kappa_max();
    let prefactor = max_contrast_prefactor(params.alpha_tilde());
    let healing_ratio = params.healing_frequency() / params.trap_frequency;
    MaxContrast {
        kappa_max,
        prefactor,
        estimate: prefactor * params.diluteness() * healing_ratio.powf(lit(-0.75)),
        direct: kappa_max.powi(3) * params.density_spectrum(kappa_max),
        healing_ratio,
        short_expansion: healing_ratio < lit(MIN_HEALING_RATIO),
    }
}

/// Suppression ξ/l_z of the density contrast when integrating over a
/// line of sight of length l_z.
pub fn projection_suppression<T: Real>(healing_length: T, depth: T) -> Result<T> {
    if !(healing_length > T::zero()) || depth <= healing_length {
        return Err(invalid("depth", "line-of-sight length must exceed ξ"));
    }
    Ok(healing_length / depth)
}

/// Frozen phase and density spectra on a κ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenSpectrum3D<T> {
    pub kappa: Vec<T>,
    pub phase_variance: Vec<T>,
    pub density: Vec<T>,
    pub in_band: Vec<bool>,
    pub kappa_max: T,
    pub params: ThreeDParams<T>,
}

impl<T: Real> FrozenSpectrum3D<T> {
    pub fn closed_form(params: ThreeDParams<T>, kappa: Vec<T>) -> Self {
        let kappa_max = params.kappa_max();
        Self {
            phase_variance: kappa.iter().map(|&k| params.phase_variance(k)).collect(),
            density: kappa.iter().map(|&k| params.density_spectrum(k)).collect(),
            in_band: kappa.iter().map(|&k| k <= kappa_max).collect(),
            kappa,
            kappa_max,
            params,
        }
    }

    /// Spectrum assembled from frozen numeric modes: ⟨φ²⟩ = |φ∞|² and
    /// C_3D = |π∞|² / (g ρ0)².
    pub fn from_modes(params: ThreeDParams<T>, modes: &[ModeEvolution<T>]) -> Result<Self> {
        let kappa_max = params.kappa_max();
        let norm = params.coupling * params.peak_density;
        let mut out = Self {
            kappa: Vec::with_capacity(modes.len()),
            phase_variance: Vec::with_capacity(modes.len()),
            density: Vec::with_capacity(modes.len()),
            in_band: Vec::with_capacity(modes.len()),
            kappa_max,
            params,
        };
        for m in modes {
            let f = m.frozen.ok_or_else(|| {
                Error::NotConverged(format!(
                    "mode κ = {} did not freeze",
                    m.kappa.to_f64_lossy()
                ))
            })?;
            out.kappa.push(m.kappa);
            out.phase_variance.push(f.phi.norm_sqr());
            out.density.push(f.momentum.norm_sqr() / (norm * norm));
            out.in_band.push(m.kappa <= kappa_max);
        }
        Ok(out)
    }
}

/// Least-squares slope of log y against log x.
pub fn log_log_slope<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("slope", "need at least two matching points"));
    }
    if x.iter().chain(y).any(|&v| !(v > T::zero())) {
        return Err(invalid("slope", "log-log fit needs positive data"));
    }
    let n = T::from_usize(x.len()).unwrap();
    let lx: Vec<T> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<T> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().fold(T::zero(), |a, &v| a + v) / n;
    let my = ly.iter().fold(T::zero(), |a, &v| a + v) / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&a, &b) in lx.iter().zip(&ly) {
        sxy = sxy + (a - mx) * (b - my);
        sxx = sxx + (a - mx) * (a - mx);
    }
    Ok(sxy / sxx)
}

//! Gamma function and fractional-order Bessel and Hankel functions of real
//! argument.
//!
//! Only small non-integer orders are needed (the 3D mode functions use
//! ν = 2/3 and its neighbours ±1/3), so a two-branch evaluation suffices:
//! the ascending power series below [`SWITCH`] and the Hankel asymptotic
//! expansion above it. No recurrences are used.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::{lit, Real};

/// Argument at which evaluation switches from the power series to the
/// asymptotic expansion. Both branches are accurate to ~1e-11 there.
pub const SWITCH: f64 = 12.0;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for real x away from the non-positive integers.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    if x <= T::zero() && x == x.round() {
        return Err(Error::GammaPole(x.to_f64_lossy()));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked<T: Real>(x: T) -> T {
    let half = lit::<T>(0.5);
    if x < half {
        // Γ(x)Γ(1−x) = π / sin(πx)
        let pi = T::PI();
        return pi / ((pi * x).sin() * gamma_unchecked(T::one() - x));
    }
    let x = x - T::one();
    let mut acc = lit::<T>(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + lit::<T>(c) / (x + lit(i as f64));
    }
    let t = x + lit::<T>(LANCZOS_G) + half;
    (T::TAU()).sqrt() * t.powf(x + half) * (-t).exp() * acc
}

/// Order of a Bessel function: finite, non-integer, |ν| < 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder<T>(T);

impl<T: Real> BesselOrder<T> {
    pub fn new(nu: T) -> Result<Self> {
        let two = lit::<T>(2.0);
        if !nu.is_finite() || nu.abs() >= two {
            return Err(crate::error::invalid("nu", format!("{nu} outside (-2, 2)")));
        }
        if (nu - nu.round()).abs() < lit(1e-9) {
            return Err(crate::error::invalid(
                "nu",
                format!("integer order {nu} is not supported"),
            ));
        }
        Ok(Self(nu))
    }

    pub fn one_third() -> Self {
        Self(lit(1.0 / 3.0))
    }

    pub fn two_thirds() -> Self {
        Self(lit(2.0 / 3.0))
    }

    pub fn value(self) -> T {
        self.0
    }
}

fn check_arg<T: Real>(x: T) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveArgument(x.to_f64_lossy()))
    }
}

/// Ascending series Σ (−x²/4)^k / (k! Γ(k+ν+1)) · (x/2)^ν.
pub fn bessel_j_series<T: Real>(nu: T, x: T) -> T {
    let half_x = x * lit(0.5);
    let q = -half_x * half_x;
    let mut term = half_x.powf(nu) / gamma_unchecked(nu + T::one());
    let mut sum = term;
    let eps = T::epsilon() * lit(0.25);
    let mut k = T::zero();
    loop {
        k = k + T::one();
        term = term * q / (k * (k + nu));
        sum = sum + term;
        if k > half_x && term.abs() <= eps * sum.abs() {
            break;
        }
        if k > lit(500.0) {
            break;
        }
    }
    sum
}

/// H^{(1)}_ν from the power-series branch, via Y_ν = (J_ν cos νπ − J_{−ν}) / sin νπ.
pub fn hankel1_series<T: Real>(nu: T, x: T) -> Complex<T> {
    let (s, c) = (nu * T::PI()).sin_cos();
    let j = bessel_j_series(nu, x);
    let jm = bessel_j_series(-nu, x);
    Complex::new(j, (j * c - jm) / s)
}

/// H^{(1)}_ν from the large-argument Hankel expansion,
/// √(2/πx) e^{i(x − νπ/2 − π/4)} Σ i^k a_k(ν) / x^k.
pub fn hankel1_asymptotic<T: Real>(nu: T, x: T) -> Complex<T> {
    let mu = lit::<T>(4.0) * nu * nu;
    let eps = T::epsilon() * lit(0.25);
    let mut a = T::one();
    let mut sum = Complex::new(T::one(), T::zero());
    let mut ik = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let mut prev = T::infinity();
    let mut k = 0usize;
    loop {
        k += 1;
        let kk = lit::<T>(k as f64);
        let odd = lit::<T>((2 * k - 1) as f64);
        a = a * (mu - odd * odd) / (lit::<T>(8.0) * kk * x);
        ik = ik * i;
        let mag = a.abs();
        // stop at the smallest term of the divergent series
        if mag > prev || k > 200 {
            break;
        }
        sum = sum + ik * a;
        if mag <= eps {
            break;
        }
        prev = mag;
    }
    let phase = x - nu * T::FRAC_PI_2() - T::FRAC_PI_4();
    let amp = (lit::<T>(2.0) / (T::PI() * x)).sqrt();
    Complex::from_polar(amp, phase) * sum
}

/// Hankel function of the first kind H^{(1)}_ν(x) = J_ν(x) + i Y_ν(x).
pub fn hankel1<T: Real>(nu: BesselOrder<T>, x: T) -> Result<Complex<T>> {
    check_arg(x)?;
    Ok(hankel1_unchecked(nu.0, x))
}

fn hankel1_unchecked<T: Real>(nu: T, x: T) -> Complex<T> {
    if x < lit(SWITCH) {
        hankel1_series(nu, x)
    } else {
        hankel1_asymptotic(nu, x)
    }
}

/// Hankel function of the second kind, the complex conjugate of H^{(1)} for real ν, x.
pub fn hankel2<T: Real>(nu: BesselOrder<T>, x: T) -> Result<Complex<T>> {
    hankel1(nu, x).map(|h| h.conj())
}

pub fn bessel_j<T: Real>(nu: BesselOrder<T>, x: T) -> Result<T> {
    check_arg(x)?;
    if x < lit(SWITCH) {
        Ok(bessel_j_series(nu.0, x))
    } else {
        Ok(hankel1_asymptotic(nu.0, x).re)
    }
}

pub fn bessel_y<T: Real>(nu: BesselOrder<T>, x: T) -> Result<T> {
    hankel1(nu, x).map(|h| h.im)
}

/// d/dx H^{(1)}_ν(x), from H'_ν = H_{ν−1} − (ν/x) H_ν (or the ν+1 form when
/// ν−1 leaves the supported range).
pub fn hankel1_derivative<T: Real>(nu: BesselOrder<T>, x: T) -> Result<Complex<T>> {
    check_arg(x)?;
    let v = nu.0;
    let h = hankel1_unchecked(v, x);
    let one = T::one();
    if v - one > lit(-2.0) {
        Ok(hankel1_unchecked(v - one, x) - h * (v / x))
    } else {
        Ok(h * (v / x) - hankel1_unchecked(v + one, x))
    }
}

/// One row of the identity check table printed by `selftest`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: String,
    pub computed: f64,
    pub expected: f64,
    pub rel_error: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    fn new(name: String, computed: f64, expected: f64, tolerance: f64) -> Self {
        let rel_error = ((computed - expected) / expected).abs();
        Self {
            name,
            computed,
            expected,
            rel_error,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.rel_error <= self.tolerance
    }
}

/// Identity checks: Wronskians, gamma values and recurrence, branch continuity.
/// Errors are relative.
pub fn identity_table() -> Vec<IdentityCheck> {
    let mut rows = Vec::new();
    for nu in [1.0 / 3.0, 2.0 / 3.0] {
        let order = BesselOrder::new(nu).unwrap();
        for x in [1e-3, 0.01, 0.1, 1.0, 5.0, 11.9, 12.1, 50.0, 100.0] {
            let h = hankel1(order, x).unwrap();
            let dh = hankel1_derivative(order, x).unwrap();
            // J Y' − J' Y
            let w = h.re * dh.im - dh.re * h.im;
            rows.push(IdentityCheck::new(
                format!("wronskian nu={nu:.4} x={x}"),
                w,
                2.0 / (std::f64::consts::PI * x),
                1e-10,
            ));
        }
        let s = hankel1_series(nu, SWITCH);
        let a = hankel1_asymptotic(nu, SWITCH);
        rows.push(IdentityCheck::new(
            format!("branch continuity nu={nu:.4}"),
            (s - a).norm() / a.norm() + 1.0,
            1.0,
            1e-9,
        ));
    }
    rows.push(IdentityCheck::new(
        "gamma(1/2) = sqrt(pi)".into(),
        gamma(0.5).unwrap(),
        std::f64::consts::PI.sqrt(),
        1e-12,
    ));
    rows.push(IdentityCheck::new(
        "gamma(1/3)gamma(2/3) = 2pi/sqrt(3)".into(),
        gamma(1.0 / 3.0).unwrap() * gamma(2.0 / 3.0).unwrap(),
        2.0 * std::f64::consts::PI / 3f64.sqrt(),
        1e-12,
    ));
    for x in [0.3, 2.7, 13.1] {
        rows.push(IdentityCheck::new(
            format!("gamma({x}+1) = {x} gamma({x})"),
            gamma(x + 1.0).unwrap(),
            x * gamma(x).unwrap(),
            1e-12,
        ));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        let pi = std::f64::consts::PI;
        assert!((gamma(0.5_f64).unwrap() / pi.sqrt() - 1.0_f64).abs() < 1e-14);
        assert!((gamma(1.0_f64).unwrap() - 1.0_f64).abs() < 1e-14);
        assert!((gamma(5.0_f64).unwrap() - 24.0_f64).abs() < 1e-12);
        assert!((gamma(-0.5_f64).unwrap() / (-2.0 * pi.sqrt()) - 1.0_f64).abs() < 1e-13);
    }

    #[test]
    fn gamma_poles() {
        assert!(matches!(gamma(0.0_f64), Err(Error::GammaPole(_))));
        assert!(matches!(gamma(-3.0_f64), Err(Error::GammaPole(_))));
    }

    #[test]
    fn gamma_f32() {
        let g: f32 = gamma(1.0f32 / 3.0).unwrap();
        assert!((g - 2.678_938_5).abs() < 1e-5);
    }

    #[test]
    fn order_validation() {
        assert!(BesselOrder::new(1.0_f64).is_err());
        assert!(BesselOrder::new(-2.0_f64).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(BesselOrder::new(1.4_f64).is_ok());
    }

    #[test]
    fn non_positive_argument() {
        let nu = BesselOrder::<f64>::two_thirds();
        assert!(matches!(
            hankel1(nu, 0.0),
            Err(Error::NonPositiveArgument(_))
        ));
        assert!(bessel_j(nu, -1.0).is_err());
    }

    #[test]
    fn identity_table_passes() {
        for row in identity_table() {
            assert!(row.passed(), "{row:?}");
        }
    }

    #[test]
    fn negative_order_relation() {
        // H^{(1)}_{−ν} = e^{iνπ} H^{(1)}_ν
        for x in [0.2, 3.0, 20.0] {
            let nu = 2.0 / 3.0;
            let a = hankel1(BesselOrder::new(-nu).unwrap(), x).unwrap();
            let b = hankel1(BesselOrder::new(nu).unwrap(), x).unwrap()
                * Complex::from_polar(1.0, nu * std::f64::consts::PI);
            assert!((a - b).norm() / b.norm() < 1e-12, "x={x}");
        }
    }
}

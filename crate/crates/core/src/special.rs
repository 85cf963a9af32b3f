//! Bessel functions of the first kind for real order ν ≥ 0, the normalized
//! kernel J_ν(t)/t^ν, and the Fourier transform of the normalized surface
//! measure of a sphere.
//!
//! Evaluation strategy for `J_ν(t)`:
//!
//! * `t < 12`: ascending power series (half-integer orders switch to the
//!   elementary spherical-Bessel closed forms once `t ≥ max(ν + 1.5, 2)`).
//! * `t ≥ 12` and `ν² ≤ t`: Hankel asymptotic expansion, truncated at its
//!   smallest term. For half-integer orders the expansion terminates and is
//!   exact.
//! * `t ≥ 12`, `ν² > t`: Hankel at the fractional orders `ν₀`, `ν₀ + 1`
//!   followed by upward recurrence (stable while the order stays below `t`);
//!   the series is used when `ν > t`.

use crate::error::{domain, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Switch argument between the power series and the asymptotic expansion.
pub const SERIES_SWITCH: f64 = 12.0;

/// Order ν of a Bessel function; finite and nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return domain(format!("Bessel order must be finite and >= 0, got {nu}"));
        }
        Ok(Self(nu))
    }

    /// The order ν = (n − 1)/2 attached to the sphere S^n.
    pub fn for_sphere(n: usize) -> Self {
        Self((n as f64 - 1.0) / 2.0)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_half_integer(self) -> bool {
        let twice = 2.0 * self.0;
        twice.fract() == 0.0 && (twice as i64) % 2 == 1
    }

    /// Where the direct Hankel expansion takes over from the series.
    pub fn switch_point(self) -> f64 {
        SERIES_SWITCH.max(self.0 * self.0)
    }
}

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

/// Γ(x) for x > 0 (Lanczos, g = 7). Relative error is a few 1e-15 for
/// moderate x and grows to about 1e-13 near the overflow at 171.6.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    // Split the power to stay finite up to Γ(171.6).
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * a
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).abs().ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    let mut a = LANCZOS[0];
    for (k, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + k as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Sum of `Σ_k (−1)^k (t²/4)^k / (k! Γ(k+ν+1))`, i.e. `J_ν(t) / (t/2)^ν`.
fn reduced_series(nu: f64, t: f64) -> f64 {
    let q = 0.25 * t * t;
    let mut term = (-ln_gamma(nu + 1.0)).exp();
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() && k > 0.5 * t {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Power series for J_ν(t).
pub fn bessel_j_series(nu: f64, t: f64) -> f64 {
    if t == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    reduced_series(nu, t) * (nu * (0.5 * t).ln()).exp()
}

/// Hankel asymptotic expansion of J_ν(t), truncated at its smallest term.
pub fn bessel_j_asymptotic(nu: f64, t: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut a = 1.0_f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = a * (mu - odd * odd) / (k as f64 * 8.0 * t);
        if next == 0.0 {
            break;
        }
        if next.abs() >= last {
            break;
        }
        last = next.abs();
        a = next;
        match k % 4 {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    let c = (0.5 * nu + 0.25) * PI;
    let (st, ct) = t.sin_cos();
    let (sc, cc) = c.sin_cos();
    let cos_chi = ct * cc + st * sc;
    let sin_chi = st * cc - ct * sc;
    (2.0 / (PI * t)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Spherical-Bessel closed form for J_{n+1/2}(t): upward recurrence from
/// j₀ = sin t / t and j₁ = sin t / t² − cos t / t.
fn half_integer_closed_form(nu: f64, t: f64) -> f64 {
    let n = (nu - 0.5).round() as usize;
    let (s, c) = t.sin_cos();
    let j0 = s / t;
    let value = if n == 0 {
        j0
    } else {
        let mut jm = j0;
        let mut j = s / (t * t) - c / t;
        for l in 1..n {
            let next = (2 * l + 1) as f64 / t * j - jm;
            jm = j;
            j = next;
        }
        j
    };
    (2.0 * t / PI).sqrt() * value
}

fn upward_from_fractional(nu: f64, t: f64) -> f64 {
    let base = nu.fract();
    let steps = (nu - base).round() as usize;
    let mut jm = bessel_j_asymptotic(base, t);
    if steps == 0 {
        return jm;
    }
    let mut j = bessel_j_asymptotic(base + 1.0, t);
    for l in 1..steps {
        let mu = base + l as f64;
        let next = 2.0 * mu / t * j - jm;
        jm = j;
        j = next;
    }
    j
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Regime {
    Series,
    ClosedForm,
    Asymptotic,
    Recurrence,
}

fn regime(order: BesselOrder, t: f64) -> Regime {
    let nu = order.value();
    if t < SERIES_SWITCH {
        if order.is_half_integer() && nu <= 64.0 && t >= (nu + 1.5).max(2.0) {
            Regime::ClosedForm
        } else {
            Regime::Series
        }
    } else if nu * nu <= t || order.is_half_integer() && nu < 1.0 {
        Regime::Asymptotic
    } else if nu <= t {
        Regime::Recurrence
    } else {
        Regime::Series
    }
}

pub(crate) fn j_unchecked(order: BesselOrder, t: f64) -> f64 {
    let nu = order.value();
    if t == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    match regime(order, t) {
        Regime::Series => bessel_j_series(nu, t),
        Regime::ClosedForm => half_integer_closed_form(nu, t),
        Regime::Asymptotic => bessel_j_asymptotic(nu, t),
        Regime::Recurrence => upward_from_fractional(nu, t),
    }
}

fn check_arg(t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return domain(format!("argument must be finite and >= 0, got {t}"));
    }
    Ok(())
}

/// J_ν(t) for ν ≥ 0, t ≥ 0.
pub fn bessel_j(order: BesselOrder, t: f64) -> Result<f64> {
    check_arg(t)?;
    Ok(j_unchecked(order, t))
}

pub(crate) fn kernel_unchecked(order: BesselOrder, t: f64) -> f64 {
    let nu = order.value();
    if regime(order, t) == Regime::Series {
        // J_ν(t)/t^ν = 2^{-ν} Σ ..., no division near t = 0.
        reduced_series(nu, t) * (-nu * std::f64::consts::LN_2).exp()
    } else {
        j_unchecked(order, t) / t.powf(nu)
    }
}

/// J_ν(t) / t^ν, continued by its limit 1 / (2^ν Γ(ν+1)) at t = 0.
pub fn normalized_kernel(order: BesselOrder, t: f64) -> Result<f64> {
    check_arg(t)?;
    Ok(kernel_unchecked(order, t))
}

/// Fourier transform of the normalized (probability) surface measure on
/// S^n ⊂ R^{n+1}, as a function of the frequency radius:
/// `σ̂_n(s) = Γ(ν+1) 2^ν · J_ν(2πs)/(2πs)^ν` with ν = (n−1)/2, so σ̂_n(0) = 1.
#[derive(Debug, Clone, Copy)]
pub struct SphereFt {
    order: BesselOrder,
    scale: f64,
}

impl SphereFt {
    pub fn new(sphere_dim: usize) -> Result<Self> {
        if sphere_dim < 1 {
            return domain("sphere dimension must be >= 1");
        }
        let order = BesselOrder::for_sphere(sphere_dim);
        let nu = order.value();
        Ok(Self {
            order,
            scale: gamma(nu + 1.0) * 2f64.powf(nu),
        })
    }

    /// σ̂_n(s); callers guarantee s ≥ 0 (the transform is even).
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        self.scale * kernel_unchecked(self.order, 2.0 * PI * s.abs())
    }
}

pub fn sphere_ft(sphere_dim: usize, s: f64) -> Result<f64> {
    check_arg(s)?;
    Ok(SphereFt::new(sphere_dim)?.eval(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn j(nu: f64, t: f64) -> f64 {
        bessel_j(BesselOrder::new(nu).unwrap(), t).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(1.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(2.5), 1.329_340_388_179_137, max_relative = 1e-13);
        assert_relative_eq!(gamma(7.3), 1_271.423_633_663_909, max_relative = 1e-13);
        assert_relative_eq!(
            gamma(20.2),
            2.205_742_826_412_368_6e17,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            ln_gamma(171.5),
            9.483_367_566_824_8e307_f64.ln(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn basic_values() {
        assert_eq!(j(0.0, 0.0), 1.0);
        assert_eq!(j(1.0, 0.0), 0.0);
        assert!(j(0.5, PI).abs() < 1e-15);
        assert_relative_eq!(j(1.0, 1.0), 0.440_050_585_744_933_5, max_relative = 1e-13);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BesselOrder::new(-0.5).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        let o = BesselOrder::new(1.0).unwrap();
        assert!(bessel_j(o, -1.0).is_err());
        assert!(bessel_j(o, f64::INFINITY).is_err());
        assert!(normalized_kernel(o, -1e-3).is_err());
        assert!(sphere_ft(0, 1.0).is_err());
        assert!(sphere_ft(2, -1.0).is_err());
    }

    #[test]
    fn kernel_limits() {
        let k = |nu: f64, t: f64| normalized_kernel(BesselOrder::new(nu).unwrap(), t).unwrap();
        assert_relative_eq!(k(1.0, 0.0), 0.5, max_relative = 1e-15);
        assert_relative_eq!(k(1.0, 1e-9), 0.5, max_relative = 1e-12);
        assert_relative_eq!(k(1.0, 1.0), 0.440_050_585_744_933_5, max_relative = 1e-13);
        assert_relative_eq!(k(1.5, 0.0), 0.265_961_520_267_621_8, max_relative = 1e-13);
        // Continuous across the series switch.
        for nu in [0.0, 0.5, 1.0, 1.5, 2.3] {
            let a = k(nu, SERIES_SWITCH - 1e-12);
            let b = k(nu, SERIES_SWITCH);
            assert!((a - b).abs() < 1e-10, "nu={nu}: {a} vs {b}");
        }
    }

    #[test]
    fn sphere_ft_closed_forms() {
        assert_eq!(sphere_ft(2, 0.0).unwrap(), 1.0);
        assert!(sphere_ft(2, 1.0).unwrap().abs() < 1e-15);
        for s in [0.1, 0.37, 2.2, 13.0, 40.5] {
            let x = 2.0 * PI * s;
            assert_relative_eq!(sphere_ft(2, s).unwrap(), x.sin() / x, epsilon = 1e-14);
            assert_relative_eq!(sphere_ft(1, s).unwrap(), j(0.0, x), epsilon = 1e-15);
        }
        // n = 3: 2 J_1(2πs)/(2πs); at s = 1/2 this is 2 J_1(π)/π.
        assert_relative_eq!(
            sphere_ft(3, 0.5).unwrap(),
            0.181_191_754_987_415_25,
            max_relative = 1e-12
        );
    }
}

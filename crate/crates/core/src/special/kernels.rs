//! Imaginary-order kernels on shifted contours, the Whittaker weight and the
//! Voronoi kernels.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::{bessel_jn, ln_gamma_f};
use super::quad::{integrate_panels, Tolerance};
use crate::error::{domain, Result};

fn tol() -> Tolerance {
    Tolerance { abs: 1e-15, rel: 1e-12, max_intervals: 40_000 }
}

/// `cosh(pi t / 2) K_{it}(y)`.
///
/// Uses `K_{it}(y) = e^{-t b} int_0^inf e^{-y cos b cosh u} cos(t u - y sin b sinh u) du`
/// with the contour tilted by `b = pi/2 - 1/|t|`, which removes the
/// `e^{pi t / 2}` cancellation.
pub fn bessel_k_imag(t: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain("K_it requires y > 0");
    }
    let t = t.abs();
    if let Some(v) = k_imag_hankel(t, y) {
        return Ok(v);
    }
    k_imag_contour(t, y)
}

/// Large-argument expansion of `K_it`; `None` unless the terms fall below `1e-16`.
fn k_imag_hankel(t: f64, y: f64) -> Option<f64> {
    if y < 25.0 {
        return None;
    }
    let mu = -4.0 * t * t;
    let (mut sum, mut term) = (0.0, 1.0f64);
    for k in 0..200u32 {
        sum += term;
        let odd = (2 * k + 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * (k + 1) as f64 * y);
        if next.abs() < 1e-16 * sum.abs() {
            let weight = 0.5 * ((FRAC_PI_2 * t - y).exp() + (-FRAC_PI_2 * t - y).exp());
            return Some(weight * (PI / (2.0 * y)).sqrt() * sum);
        }
        if next.abs() >= term.abs() {
            return None;
        }
        term = next;
    }
    None
}

fn k_imag_contour(t: f64, y: f64) -> Result<f64> {
    let beta = if t <= 2.0 / PI { 0.0 } else { FRAC_PI_2 - 1.0 / t };
    let (sb, cb) = beta.sin_cos();
    let yc = y * cb;
    let mut top = 0.5f64;
    while yc * top.cosh() < 50.0 && top < 700.0 {
        top *= 1.1;
    }
    let panels = 50 + ((t * top + y * sb * top.sinh()) / 2.0) as usize;
    let v = integrate_panels(
        |u: f64| (-yc * u.cosh()).exp() * (t * u - y * sb * u.sinh()).cos(),
        0.0,
        top,
        panels,
        tol(),
    )?;
    let pref = 0.5 * ((t * (FRAC_PI_2 - beta)).exp() + (-t * (FRAC_PI_2 + beta)).exp());
    Ok(pref * v)
}

/// `F_t(x) = (2/pi) int_0^inf cos(x cosh u) cos(2 t u) du`, so that
/// `Y_{2it}(x) + Y_{-2it}(x) = -2 cosh(pi t) F_t(x)` and `F_0 = -Y_0`.
///
/// Evaluated along `u(s) = s + i a tanh s`, where the integrand decays.
pub fn f_kernel(t: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("F_t requires x > 0");
    }
    let t = t.abs();
    match f_kernel_hankel(t, x) {
        Some(v) => Ok(v),
        None => f_kernel_contour(t, x),
    }
}

fn f_kernel_contour(t: f64, x: f64) -> Result<f64> {
    let a = FRAC_PI_2.min(1.0 / (1.0 + 2.0 * t));
    let decay = |s: f64| x * s.sinh() * (a * s.tanh()).sin();
    let mut top = 0.05f64;
    while decay(top) < 50.0 && top < 700.0 {
        top *= 1.1;
    }
    let panels = 200 + ((x * top.cosh() + 2.0 * t * top) / 2.0) as usize;
    let i = Complex64::i();
    let v = integrate_panels(
        |s: f64| {
            let th = s.tanh();
            let u = Complex64::new(s, a * th);
            let du = Complex64::new(1.0, a * (1.0 - th * th));
            ((i * x * u.cosh()).exp() * (2.0 * t * u).cos() * du).re
        },
        0.0,
        top,
        panels,
        tol(),
    )?;
    Ok(2.0 / PI * v)
}

/// Large-argument expansion; `None` unless the terms fall below `1e-16`.
/// Both orders `+-2it` share `mu = -16 t^2`, so the series is real.
fn f_kernel_hankel(t: f64, x: f64) -> Option<f64> {
    if x < 25.0 {
        return None;
    }
    let mu = -16.0 * t * t;
    let (mut p, mut q) = (0.0, 0.0);
    let mut term = 1.0f64;
    let mut k = 0u32;
    loop {
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        let odd = (2 * k + 1) as f64;
        let next = term * (mu - odd * odd) / (8.0 * (k + 1) as f64 * x);
        if next.abs() < 1e-16 {
            break;
        }
        if next.abs() >= term.abs() || k > 200 {
            return None;
        }
        term = next;
        k += 1;
    }
    let chi = x - FRAC_PI_4;
    Some(-(2.0 / (PI * x)).sqrt() * (chi.sin() * p + chi.cos() * q))
}

/// `Y_{2it}(y) + Y_{-2it}(y)`, real for real `t`.
pub fn bessel_y_imag_pair(t: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain("Y pair requires y > 0");
    }
    Ok(-2.0 * (PI * t).cosh() * f_kernel(t, y)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ArchimedeanParameter {
    Holomorphic { k: u32 },
    Maass { t: f64 },
}

impl ArchimedeanParameter {
    pub fn holomorphic(k: u32) -> Result<Self> {
        if k < 2 || !k.is_multiple_of(2) {
            return domain(format!("weight {k} must be even and at least 2"));
        }
        Ok(Self::Holomorphic { k })
    }

    pub fn maass(t: f64) -> Result<Self> {
        if !t.is_finite() {
            return domain("spectral parameter must be finite");
        }
        Ok(Self::Maass { t })
    }

    pub fn t(&self) -> f64 {
        match *self {
            Self::Holomorphic { k } => (k as f64 - 1.0) / 2.0,
            Self::Maass { t } => t,
        }
    }

    pub fn t_star(&self) -> f64 {
        1.0 + self.t().abs()
    }
}

/// The weight `W_f(y)` attached to a cusp form with the given parameter.
pub fn whittaker_weight(p: &ArchimedeanParameter, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain("weight requires y > 0");
    }
    match *p {
        ArchimedeanParameter::Holomorphic { k } => {
            let k = k as f64;
            let l = -0.5 * ln_gamma_f(k) + 0.5 * k * (4.0 * PI * y).ln() - 2.0 * PI * y;
            Ok(l.exp())
        }
        ArchimedeanParameter::Maass { t } => Ok(y.sqrt() * bessel_k_imag(t, 2.0 * PI * y)?),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoronoiKernel {
    pub param: ArchimedeanParameter,
    pub sign: Sign,
}

pub fn voronoi_kernel(kern: &VoronoiKernel, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return domain("kernel requires y > 0");
    }
    let x = 4.0 * PI * y;
    match (kern.param, kern.sign) {
        (ArchimedeanParameter::Holomorphic { .. }, Sign::Minus) => Ok(0.0),
        (ArchimedeanParameter::Holomorphic { k }, Sign::Plus) => Ok(2.0 * PI * bessel_jn(k as i32 - 1, x)),
        (ArchimedeanParameter::Maass { t }, Sign::Plus) => Ok(-2.0 * PI * f_kernel(t, x)?),
        (ArchimedeanParameter::Maass { t }, Sign::Minus) => Ok(4.0 * bessel_k_imag(2.0 * t, x)?),
    }
}

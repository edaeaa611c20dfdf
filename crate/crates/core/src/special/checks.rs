//! Numerical checks of the Bessel identities and size bounds.

use serde::Serialize;

use super::bessel::{bessel_j_real, bessel_jn, bessel_k_real, bessel_y_real};
use super::kernels::{bessel_k_imag, whittaker_weight, ArchimedeanParameter};
use super::quad::{integrate, Tolerance};
use crate::error::{domain, Result};
use crate::oscillatory::SmoothWindow;

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceReport {
    pub order: f64,
    pub max_discrepancy_j: f64,
    pub max_discrepancy_k: f64,
    /// Largest `|J_r'|`, `|K_r'|` seen; the discrepancies are absolute.
    pub scale_j: f64,
    pub scale_k: f64,
}

/// Central differences of `J_r`, `K_r` against `(J_{r-1} - J_{r+1})/2` and
/// `-(K_{r-1} + K_{r+1})/2`.
pub fn check_derivative_recurrences(order: f64, y_grid: &[f64]) -> Result<RecurrenceReport> {
    let h = 1e-5;
    let mut dj = 0.0f64;
    let mut dk = 0.0f64;
    let (mut sj, mut sk) = (0.0f64, 0.0f64);
    for &y in y_grid {
        if y <= 2.0 * h {
            return domain("grid points must exceed the difference step");
        }
        let fd = (bessel_j_real(order, y + h)? - bessel_j_real(order, y - h)?) / (2.0 * h);
        let rhs = 0.5 * (bessel_j_real(order - 1.0, y)? - bessel_j_real(order + 1.0, y)?);
        dj = dj.max((fd - rhs).abs());
        sj = sj.max(rhs.abs());
        let fd = (bessel_k_real(order, y + h)? - bessel_k_real(order, y - h)?) / (2.0 * h);
        let rhs = -0.5 * (bessel_k_real(order - 1.0, y)? + bessel_k_real(order + 1.0, y)?);
        dk = dk.max((fd - rhs).abs());
        sk = sk.max(rhs.abs());
    }
    Ok(RecurrenceReport { order, max_discrepancy_j: dj, max_discrepancy_k: dk, scale_j: sj, scale_k: sk })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    J,
    Y,
    K,
}

impl Family {
    pub fn eval(self, order: f64, x: f64) -> Result<f64> {
        match self {
            Family::J => bessel_j_real(order, x),
            Family::Y => bessel_y_real(order, x),
            Family::K => bessel_k_real(order, x),
        }
    }

    /// Sign in `int g Z_r = sign (2/alpha) int (g' sqrt y - r g / (2 sqrt y)) Z_{r+1}`,
    /// from `(w^{r+1} Z_{r+1}(w))' = +-w^{r+1} Z_r(w)`.
    pub fn ibp_sign(self) -> f64 {
        match self {
            Family::J | Family::Y => -1.0,
            Family::K => 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IbpReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
    pub passed: bool,
}

/// Both sides of one integration by parts against `Z_r(alpha sqrt y)`.
pub fn check_ibp_identity(g: &SmoothWindow, order: f64, alpha: f64, family: Family) -> Result<IbpReport> {
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    let (lo, hi) = g.support();
    if lo <= 0.0 {
        return domain("window must be supported in (0, inf)");
    }
    let tol = Tolerance { abs: 1e-15, rel: 1e-11, max_intervals: 5_000 };
    let mut failure = None;
    let mut guard = |v: Result<f64>| match v {
        Ok(x) => x,
        Err(e) => {
            failure = Some(e);
            0.0
        }
    };
    let lhs = integrate(|y: f64| g.value(y) * guard(family.eval(order, alpha * y.sqrt())), lo, hi, tol)?;
    let inner = integrate(
        |y: f64| {
            let s = y.sqrt();
            let w = g.derivative(y) * s - 0.5 * order * g.value(y) / s;
            if w == 0.0 {
                0.0
            } else {
                w * guard(family.eval(order + 1.0, alpha * s))
            }
        },
        lo,
        hi,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let rhs = family.ibp_sign() * 2.0 / alpha * inner;
    let diff = (lhs - rhs).abs();
    let rel_err = diff / lhs.abs().max(rhs.abs()).max(1e-300);
    Ok(IbpReport { lhs, rhs, rel_err, passed: rel_err <= 1e-6 || diff <= 1e-12 })
}

#[derive(Debug, Clone, Serialize)]
pub struct FittedBound {
    pub instances: usize,
    pub constant: f64,
    pub worst_point: String,
}

impl FittedBound {
    fn new() -> Self {
        Self { instances: 0, constant: 0.0, worst_point: String::new() }
    }

    fn push(&mut self, ratio: f64, point: impl FnOnce() -> String) {
        self.instances += 1;
        if ratio > self.constant || ratio.is_nan() {
            self.constant = ratio;
            self.worst_point = point();
        }
    }
}

/// `cosh(pi t/2)|K_it(w)|` against `min(t^(-1/3), |w^2 - t^2|^(-1/4))`.
pub fn check_kbessel_transition_bound(t: f64, w_grid: &[f64]) -> Result<FittedBound> {
    if t < 2.0 {
        return domain("transition bound is stated for t >= 2");
    }
    let mut fb = FittedBound::new();
    for &w in w_grid {
        let v = bessel_k_imag(t, w)?.abs();
        let d = (w * w - t * t).abs();
        let shape = if d == 0.0 { t.powf(-1.0 / 3.0) } else { t.powf(-1.0 / 3.0).min(d.powf(-0.25)) };
        fb.push(v / shape, || format!("t={t} w={w}"));
    }
    Ok(fb)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// `|J_k(y)| (1 + y^(1/2)) / (1 + k)` over `k = 1..=20`, `y` in `[1e-2, 1e3]`.
pub fn bessel_j_size_sweep() -> FittedBound {
    let mut fb = FittedBound::new();
    for k in 1..=20 {
        for &y in &log_grid(1e-2, 1e3, 120) {
            let r = bessel_jn(k, y).abs() * (1.0 + y.sqrt()) / (1.0 + k as f64);
            fb.push(r, || format!("k={k} y={y:.4e}"));
        }
    }
    fb
}

/// `cosh(pi t/2)|K_it(y)|` against `((1+t)/y)^0.1 (1 + y/(1+t))^-3`.
pub fn bessel_k_size_sweep() -> Result<FittedBound> {
    let mut fb = FittedBound::new();
    for t in [0.0, 1.0, 5.0, 20.0] {
        for &y in &log_grid(1e-3, 1e3, 60) {
            let v = bessel_k_imag(t, y)?.abs();
            let shape = ((1.0 + t) / y).powf(0.1) * (1.0 + y / (1.0 + t)).powi(-3);
            fb.push(v / shape, || format!("t={t} y={y:.4e}"));
        }
    }
    Ok(fb)
}

fn weight_derivative(p: &ArchimedeanParameter, y: f64, j: u32) -> Result<f64> {
    let h = 1e-3 * y;
    let w = |x: f64| whittaker_weight(p, x);
    Ok(match j {
        0 => w(y)?,
        1 => (-w(y + 2.0 * h)? + 8.0 * w(y + h)? - 8.0 * w(y - h)? + w(y - 2.0 * h)?) / (12.0 * h),
        2 => {
            (-w(y + 2.0 * h)? + 16.0 * w(y + h)? - 30.0 * w(y)? + 16.0 * w(y - h)? - w(y - 2.0 * h)?)
                / (12.0 * h * h)
        }
        _ => return domain("only j <= 2 is checked"),
    })
}

/// `|W^(j)(y)|` against `t*^(1/2) (t*/y)^(j + 0.1) (1 + y/t*)^-3`.
pub fn weight_derivative_sweep() -> Result<FittedBound> {
    let mut params = Vec::new();
    for k in [2, 4, 12] {
        params.push(ArchimedeanParameter::holomorphic(k)?);
    }
    for t in [0.0, 1.0, 5.0] {
        params.push(ArchimedeanParameter::maass(t)?);
    }
    let mut fb = FittedBound::new();
    for p in &params {
        let ts = p.t_star();
        for j in 0..=2u32 {
            for &y in &log_grid(1e-2, 1e2, 50) {
                let d = weight_derivative(p, y, j)?.abs();
                let shape = ts.sqrt() * (ts / y).powf(j as f64 + 0.1) * (1.0 + y / ts).powi(-3);
                fb.push(d / shape, || format!("{p:?} j={j} y={y:.4e}"));
            }
        }
    }
    Ok(fb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_examples() {
        let r = check_derivative_recurrences(1.0, &[2.0]).unwrap();
        assert!(r.max_discrepancy_j < 1e-8);
        let r = check_derivative_recurrences(0.0, &[1.0]).unwrap();
        assert!(r.max_discrepancy_j < 1e-8 && r.max_discrepancy_k < 1e-8);
        let r = check_derivative_recurrences(0.3, &[0.5, 3.0, 17.0]).unwrap();
        assert!(r.max_discrepancy_j < 1e-8 && r.max_discrepancy_k < 1e-8, "{r:?}");
    }

    #[test]
    fn ibp_examples() {
        let g = SmoothWindow::canonical();
        assert!(check_ibp_identity(&g, 0.0, 1.0, Family::J).unwrap().passed);
        assert!(check_ibp_identity(&g, 0.0, 2.0, Family::K).unwrap().passed);
        assert!(check_ibp_identity(&g, 0.0, 1.0, Family::Y).unwrap().passed);
        let r = check_ibp_identity(&g, 0.0, 50.0, Family::J).unwrap();
        assert!(r.passed && r.lhs.abs() < 1e-2, "{r:?}");
    }

    #[test]
    fn transition_examples() {
        let fb = check_kbessel_transition_bound(10.0, &[1.0, 10.0, 20.0]).unwrap();
        assert!(fb.constant <= 10.0);
    }
}

//! The test function `phi_{A,B}(x) = i^(B-A) J_A(x) x^(-B)` and its two
//! Bessel transforms, in closed form and by quadrature.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{big, big_one};
use crate::error::{domain, Error, Result};
use crate::special::bessel::bessel_jn;
use crate::special::kernels::f_kernel;
use crate::special::quad::{integrate_panels, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct TestFunction {
    a: u32,
    b: u32,
}

impl TestFunction {
    pub fn new(a: u32, b: u32) -> Result<Self> {
        if b < 2 || b >= a {
            return domain(format!("need 2 <= B < A, got A={a}, B={b}"));
        }
        if !(a - b).is_multiple_of(2) {
            return domain(format!("A={a} and B={b} must have the same parity"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// `i^(B-A)`, which is `+-1`.
    pub fn sign(&self) -> f64 {
        if ((self.a - self.b) / 2).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    fn half_sum(&self) -> i64 {
        (self.a + self.b) as i64 / 2
    }
}

pub fn phi_eval(tf: &TestFunction, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("phi requires x > 0");
    }
    Ok(tf.sign() * bessel_jn(tf.a as i32, x) * x.powi(-(tf.b as i32)))
}

/// A value `over_pi / pi` with `over_pi` exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    #[serde(serialize_with = "ser_ratio")]
    pub over_pi: BigRational,
    pub value: f64,
}

fn ser_ratio<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl ClosedForm {
    fn from_over_pi(over_pi: BigRational) -> Self {
        let value = over_pi.to_f64().unwrap_or(f64::NAN) / PI;
        Self { over_pi, value }
    }
}

fn factorial(n: u32) -> BigRational {
    (1..=n as i64).fold(big_one(), |acc, k| acc * big(k))
}

/// `B!/2^(B+1) * prod_j (shift + ((A+B)/2 - j)^2)^(-1)`, multiplied in the given order.
fn closed_product(tf: &TestFunction, shift: &BigRational, reverse: bool) -> Result<BigRational> {
    let mut js: Vec<i64> = (0..=tf.b as i64).collect();
    if reverse {
        js.reverse();
    }
    let mut prod = factorial(tf.b) / BigRational::from_integer(num_bigint::BigInt::from(2u32).pow(tf.b + 1));
    for j in js {
        let m = tf.half_sum() - j;
        let f = shift + big(m * m);
        if f.is_zero() {
            return Err(Error::Degenerate(format!("vanishing factor at j={j}")));
        }
        prod /= f;
    }
    Ok(prod)
}

fn dot_shift(k: u32) -> Result<BigRational> {
    if k < 2 || !k.is_multiple_of(2) {
        return domain(format!("k={k} must be even and at least 2"));
    }
    let km1 = k as i64 - 1;
    Ok(-BigRational::new((km1 * km1).into(), 4.into()))
}

pub fn dot_transform_closed(tf: &TestFunction, k: u32) -> Result<ClosedForm> {
    Ok(ClosedForm::from_over_pi(closed_product(tf, &dot_shift(k)?, false)?))
}

/// The same product accumulated in reverse order; must agree exactly.
pub fn dot_transform_closed_reversed(tf: &TestFunction, k: u32) -> Result<BigRational> {
    closed_product(tf, &dot_shift(k)?, true)
}

/// Closed form at spectral parameter with `t^2 = t_squared`; negative values
/// stand for `t = i tau` and are admitted for `tau^2 <= (7/64)^2`.
pub fn tilde_transform_closed(tf: &TestFunction, t_squared: &BigRational) -> Result<ClosedForm> {
    if t_squared.is_negative() {
        let th = crate::arith::theta();
        if -t_squared > &th * &th {
            return domain("imaginary spectral parameter beyond 7/64");
        }
    }
    Ok(ClosedForm::from_over_pi(closed_product(tf, t_squared, false)?))
}

pub fn tilde_transform_closed_real(tf: &TestFunction, t: f64) -> Result<ClosedForm> {
    let r = BigRational::from_float(t).ok_or_else(|| Error::Domain("t must be finite".into()))?;
    tilde_transform_closed(tf, &(&r * &r))
}

/// Coefficients `c_k` with `f(y) = sqrt(2/(pi y)) Re[e^{iy} sum_k c_k y^-k]`
/// for large `y`; `mu2 = 4 nu^2` and `rot` the phase rotation.
fn hankel_coefficients(mu2: f64, rot: Complex64, y0: f64) -> Vec<Complex64> {
    let mut out = Vec::new();
    let mut a = 1.0f64;
    let mut ik = Complex64::new(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 0..60 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            a *= (mu2 - odd * odd) / (8.0 * k as f64);
            ik *= Complex64::i();
        }
        let mag = a.abs() / y0.powi(k);
        if k > 0 && (mag > last || mag < 1e-20) {
            break;
        }
        out.push(ik * a * rot);
        last = mag;
    }
    out
}

fn j_coefficients(order: f64, y0: f64) -> Vec<Complex64> {
    let rot = Complex64::from_polar(1.0, -(order * PI / 2.0 + FRAC_PI_4));
    hankel_coefficients(4.0 * order * order, rot, y0)
}

fn f_coefficients(t: f64, y0: f64) -> Vec<Complex64> {
    let rot = Complex64::i() * Complex64::from_polar(1.0, -FRAC_PI_4);
    hankel_coefficients(-16.0 * t * t, rot, y0)
}

/// `int_Y^inf y^(-p) e^(2iy) dy` by its asymptotic expansion in `1/Y`.
fn osc_tail(p: f64, y: f64) -> Complex64 {
    let two_i = Complex64::new(0.0, 2.0);
    let mut term = Complex64::new(y.powf(-p), 0.0);
    let mut sum = term;
    for m in 0..80 {
        term *= (p + m as f64) / (y * two_i);
        sum += term;
        if term.norm() < 1e-22 * sum.norm() {
            break;
        }
    }
    -(two_i * y).exp() / two_i * sum
}

/// `int_Y^inf y^(-B-1) f(y) g(y) dy` for two functions with Hankel coefficients.
fn product_tail(cf: &[Complex64], cg: &[Complex64], b: u32, y: f64) -> f64 {
    let mut total = 0.0;
    for (k, a) in cf.iter().enumerate() {
        for (l, g) in cg.iter().enumerate() {
            let p = (b + 2) as f64 + (k + l) as f64;
            let flat = (a * g.conj()).re * y.powf(1.0 - p) / (p - 1.0);
            let osc = (a * g * osc_tail(p, y)).re;
            total += flat + osc;
        }
    }
    total / PI
}

/// Asymptotic `F_t(x)` for large `x` (used inside the transform quadrature).
fn f_kernel_asymptotic(coef: &[Complex64], x: f64) -> f64 {
    let mut h = Complex64::new(0.0, 0.0);
    let mut p = 1.0;
    for c in coef {
        h += c * p;
        p /= x;
    }
    (2.0 / (PI * x)).sqrt() * (Complex64::from_polar(1.0, x) * h).re
}

fn quad_tol() -> Tolerance {
    Tolerance { abs: 1e-17, rel: 1e-13, max_intervals: 20_000 }
}

fn cutoff(extra: f64) -> f64 {
    (300.0 + 2.0 * extra).ceil()
}

fn finish(v: f64, what: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Convergence(format!("{what} produced a non-finite value")))
    }
}

/// `i^k int_0^inf J_{k-1}(y) phi(y) dy / y` by panel quadrature on `[0, Y]`
/// plus the Hankel expansion of the product on `[Y, inf)`.
pub fn dot_transform_quadrature(tf: &TestFunction, k: u32) -> Result<f64> {
    if k < 2 || !k.is_multiple_of(2) {
        return domain(format!("k={k} must be even and at least 2"));
    }
    let a = tf.a as f64;
    let mu = k as f64 - 1.0;
    let y0 = cutoff(a * a + mu * mu);
    let b = tf.b as i32;
    let head = integrate_panels(
        |y: f64| {
            if y == 0.0 {
                0.0
            } else {
                bessel_jn(k as i32 - 1, y) * bessel_jn(tf.a as i32, y) * y.powi(-b - 1)
            }
        },
        0.0,
        y0,
        (y0 / 2.0) as usize,
        quad_tol(),
    )?;
    let tail = product_tail(&j_coefficients(mu, y0), &j_coefficients(a, y0), tf.b, y0);
    let ik = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    finish(ik * tf.sign() * (head + tail), "dot transform")
}

/// `int_0^inf F_t(y) phi(y) dy / y`, where `F_t` is the real kernel equal to
/// `i/(2 sinh pi t) (J_{2it} - J_{-2it})`; `t = 0` is covered directly.
pub fn tilde_transform_quadrature(tf: &TestFunction, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return domain("t must be finite");
    }
    let t = t.abs();
    let a = tf.a as f64;
    let y0 = cutoff(a * a + 4.0 * t * t);
    let b = tf.b as i32;
    let switch = 40.0 + 8.0 * t * t;
    let fc = f_coefficients(t, switch);
    let mut err = None;
    let head = integrate_panels(
        |y: f64| {
            if y == 0.0 {
                return 0.0;
            }
            let f = if y >= switch {
                f_kernel_asymptotic(&fc, y)
            } else {
                match f_kernel(t, y) {
                    Ok(v) => v,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            };
            f * bessel_jn(tf.a as i32, y) * y.powi(-b - 1)
        },
        0.0,
        y0,
        (y0 / 2.0) as usize,
        quad_tol(),
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    let tail = product_tail(&f_coefficients(t, y0), &j_coefficients(a, y0), tf.b, y0);
    finish(tf.sign() * (head + tail), "tilde transform")
}

/// Exact positivity of the closed forms on the stated ranges.
pub fn dot_positive_range(tf: &TestFunction) -> Result<bool> {
    let mut ok = true;
    for k in (2..=tf.a - tf.b).step_by(2) {
        ok &= closed_product(tf, &dot_shift(k)?, false)? > BigRational::zero();
    }
    Ok(ok)
}

#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub value_at_zero: f64,
    pub derivative_at_zero: f64,
    pub constant: f64,
}

/// `phi(0)`, `phi'(0)` and the smallest `C` with `|phi^(j)(y)| <= C (1+y)^-2.1`, `j <= 3`.
pub fn decay_admissibility(tf: &TestFunction) -> Result<AdmissibilityReport> {
    let phi = |y: f64| -> f64 {
        if y == 0.0 {
            0.0
        } else {
            tf.sign() * bessel_jn(tf.a as i32, y) * y.powi(-(tf.b as i32))
        }
    };
    let h0 = 1e-4;
    let value_at_zero = phi(1e-12);
    let derivative_at_zero = (phi(h0) - phi(0.0)) / h0;
    let mut c = 0.0f64;
    let h = 1e-2;
    for &y in &crate::special::checks::log_grid(0.05, 2000.0, 400) {
        let f = |d: f64| phi(y + d * h);
        let d1 = (f(1.0) - f(-1.0)) / (2.0 * h);
        let d2 = (f(1.0) - 2.0 * f(0.0) + f(-1.0)) / (h * h);
        let d3 = (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h * h * h);
        let w = (1.0 + y).powf(2.1);
        for v in [f(0.0), d1, d2, d3] {
            c = c.max(v.abs() * w);
        }
    }
    Ok(AdmissibilityReport { value_at_zero, derivative_at_zero, constant: c })
}

//! Bessel functions of real order.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use statrs::function::gamma::{gamma, ln_gamma};

use super::quad::{integrate, integrate_panels, Tolerance};
use crate::error::{domain, Result};

/// Hankel's asymptotic series (P, Q) for `4 nu^2 = mu2`, summed while the
/// terms decrease. `mu2` may be negative (imaginary order).
pub fn hankel_pq(mu2: f64, x: f64) -> (f64, f64) {
    let mut p = 1.0f64;
    let mut q = 0.0f64;
    let mut term = 1.0f64;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        term *= (mu2 - odd * odd) / (8.0 * k as f64 * x);
        let mag = term.abs();
        if mag > last || mag < 1e-18 * p.abs().max(1e-300) {
            if mag < last {
                add_term(&mut p, &mut q, k, term);
            }
            break;
        }
        add_term(&mut p, &mut q, k, term);
        last = mag;
    }
    (p, q)
}

fn add_term(p: &mut f64, q: &mut f64, k: usize, term: f64) {
    let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    if k.is_multiple_of(2) {
        *p += sign * term;
    } else {
        *q += sign * term;
    }
}

fn j01_asymptotic(n: i32, x: f64) -> f64 {
    let nu = n as f64;
    let (p, q) = hankel_pq(4.0 * nu * nu, x);
    let w = x - nu * FRAC_PI_2 - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}

/// Backward recurrence normalised by `J_0 + 2 sum J_2k = 1`.
fn jn_miller(n: usize, x: f64) -> f64 {
    let top = n.max(x as usize) + 30 + (40.0 * (n.max(x as usize) as f64 + 1.0)).sqrt() as usize;
    let start = top + (top % 2);
    let mut jp1 = 0.0f64;
    let mut j = 1e-300f64;
    let mut sum = 0.0;
    let mut ans = 0.0;
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            ans *= 1e-250;
            sum *= 1e-250;
        }
        // j now holds J_{k-1}
        if k - 1 == n {
            ans = j;
        }
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            sum += 2.0 * j;
        }
    }
    sum += j;
    ans / sum
}

/// Integer-order `J_n(x)` for `x > 0`.
pub fn bessel_jn(n: i32, x: f64) -> f64 {
    if n < 0 {
        let v = bessel_jn(-n, x);
        return if n % 2 == 0 { v } else { -v };
    }
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let nf = n as f64;
    if x < 25.0 || nf >= x {
        return jn_miller(n as usize, x);
    }
    let mut jm = j01_asymptotic(0, x);
    if n == 0 {
        return jm;
    }
    let mut j = j01_asymptotic(1, x);
    for k in 1..n {
        let next = 2.0 * k as f64 / x * j - jm;
        jm = j;
        j = next;
    }
    j
}

fn is_integer(nu: f64) -> bool {
    nu.fract() == 0.0 && nu.abs() < 1e6
}

fn recip_gamma(z: f64) -> f64 {
    if z <= 0.0 && z.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma(z)
    }
}

fn j_series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let q = -h * h;
    let mut sum = 0.0;
    let mut term_pow = 1.0;
    let mut fact = 1.0;
    for m in 0..400 {
        if m > 0 {
            term_pow *= q;
            fact *= m as f64;
        }
        let t = term_pow / fact * recip_gamma(m as f64 + nu + 1.0);
        sum += t;
        if m > 5 && t.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum * h.powf(nu)
}

fn tail_limit(x: f64, grow: f64) -> f64 {
    // smallest t with x sinh t - grow t > 60
    let mut t = 1.0f64;
    while x * t.sinh() - grow * t < 60.0 {
        t *= 1.2;
        if t > 800.0 {
            break;
        }
    }
    t
}

fn tight() -> Tolerance {
    Tolerance { abs: 1e-15, rel: 1e-13, max_intervals: 20_000 }
}

fn j_schlafli(nu: f64, x: f64) -> Result<f64> {
    let panels = 4 + (x.abs() + nu.abs()) as usize / 2;
    let a = integrate_panels(|th: f64| (x * th.sin() - nu * th).cos(), 0.0, PI, panels, tight())? / PI;
    let s = (nu * PI).sin();
    if s == 0.0 {
        return Ok(a);
    }
    let top = tail_limit(x, -nu);
    let b = integrate(|t: f64| (-x * t.sinh() - nu * t).exp(), 0.0, top, tight())?;
    Ok(a - s / PI * b)
}

/// `J_nu(x)` for real order and `x > 0`.
pub fn bessel_j_real(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("J requires y > 0");
    }
    if is_integer(nu) {
        return Ok(bessel_jn(nu as i32, x));
    }
    if x <= 4.0 || x * x < 0.1 * (nu.abs() + 1.0) {
        return Ok(j_series(nu, x));
    }
    j_schlafli(nu, x)
}

/// `Y_nu(x)` for real order and `x > 0`, from Schlafli's integral.
pub fn bessel_y_real(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("Y requires y > 0");
    }
    if nu < 0.0 {
        let a = -nu;
        let (s, c) = (a * PI).sin_cos();
        let j = if s == 0.0 { 0.0 } else { bessel_j_real(a, x)? };
        return Ok(s * j + c * bessel_y_real(a, x)?);
    }
    let panels = 4 + (x + nu) as usize / 2;
    let a = integrate_panels(|th: f64| (x * th.sin() - nu * th).sin(), 0.0, PI, panels, tight())? / PI;
    let c = (nu * PI).cos();
    let top = tail_limit(x, nu);
    let b = integrate(
        |t: f64| (nu * t - x * t.sinh()).exp() + c * (-nu * t - x * t.sinh()).exp(),
        0.0,
        top,
        tight(),
    )?;
    Ok(a - b / PI)
}

/// `K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt`.
pub fn bessel_k_real(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain("K requires y > 0");
    }
    let nu = nu.abs();
    // scale out exp(-x) so large arguments do not underflow early
    let mut top = 1.0f64;
    while x * (top.cosh() - 1.0) - nu * top < 60.0 && top < 800.0 {
        top *= 1.2;
    }
    let v = integrate(
        |t: f64| (-x * (t.cosh() - 1.0) + nu * t).exp() * 0.5 * (1.0 + (-2.0 * nu * t).exp()),
        0.0,
        top,
        tight(),
    )?;
    Ok(v * (-x).exp())
}

/// `ln Gamma` exposed for the log-domain weight evaluation.
pub fn ln_gamma_f(x: f64) -> f64 {
    ln_gamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn integer_order_reference_values() {
        assert!(rel(bessel_jn(1, 1.0), 0.440_050_585_744_933_5) < 1e-13);
        assert!(rel(bessel_jn(5, 2.0), 0.007_039_629_755_871_685) < 1e-12);
        assert!(rel(bessel_jn(4, 1.0), 0.002_476_638_964_109_955_3) < 1e-12);
        assert!(rel(bessel_jn(1, 4.0 * PI), -0.970_945_749_985_082_5 / (2.0 * PI)) < 1e-12);
        assert!((bessel_jn(0, 1e-8) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn large_argument_matches_both_branches() {
        // the Miller and forward branches meet at n = x
        for &(n, x) in &[(30, 30.5), (60, 61.0), (100, 200.0), (3, 1000.0), (100, 1e4)] {
            let a = bessel_jn(n, x);
            let b = j_schlafli(n as f64, x).unwrap();
            assert!((a - b).abs() < 1e-11 * (1.0 + a.abs() / 1e-3), "n={n} x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.3, 2.0, 11.0, 40.0, 333.0] {
            let j = (2.0 / (PI * x)).sqrt() * x.sin();
            let y = -(2.0 / (PI * x)).sqrt() * x.cos();
            assert!((bessel_j_real(0.5, x).unwrap() - j).abs() < 1e-12);
            assert!((bessel_y_real(0.5, x).unwrap() - y).abs() < 1e-12);
            let k = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!(rel(bessel_k_real(0.5, x).unwrap(), k) < 1e-11);
            let jm = (2.0 / (PI * x)).sqrt() * x.cos();
            assert!((bessel_j_real(-0.5, x).unwrap() - jm).abs() < 1e-12);
        }
    }

    #[test]
    fn y_and_k_reference_values() {
        assert!(rel(bessel_y_real(0.0, 1.0).unwrap(), 0.088_256_964_215_676_96) < 1e-11);
        assert!(rel(bessel_y_real(0.0, 4.0).unwrap(), -0.016_940_739_325_064_992) < 1e-10);
        assert!(rel(bessel_k_real(0.0, 1.0).unwrap(), 0.421_024_438_240_708_34) < 1e-12);
        assert!(rel(bessel_k_real(0.0, 10.0).unwrap(), 0.000_017_780_062_316_167_65) < 1e-11);
        assert!(rel(bessel_k_real(0.0, 2.0 * PI).unwrap(), 0.000_916_584_360_904_370_3) < 1e-11);
    }
}

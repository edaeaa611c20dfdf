//! Smooth dyadic windows, exponential sums against them, Dirichlet
//! approximation and integrals of Voronoi kernels.

use std::f64::consts::{LN_2, PI};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::e_frac;
use crate::error::{domain, Result};
use crate::special::kernels::{voronoi_kernel, VoronoiKernel};
use crate::special::quad::{integrate_panels, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Shape {
    /// `exp(-1/(1 - v^2))` with `v = log2 s`.
    LogBump,
    /// `LogBump` divided by the sum of its dyadic dilates.
    Partition,
}

fn psi(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let v = s.log2();
    if v.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - v * v)).exp()
    }
}

fn dpsi(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    let v = s.log2();
    if v.abs() >= 1.0 {
        return 0.0;
    }
    let w = 1.0 - v * v;
    psi(s) * (-2.0 * v / (w * w)) / (s * LN_2)
}

fn dilate_sum(s: f64) -> (f64, f64) {
    let v = s.log2().floor() as i32;
    let mut d = 0.0;
    let mut dd = 0.0;
    for k in (v - 1)..=(v + 1) {
        let sc = 2f64.powi(-k);
        d += psi(s * sc);
        dd += dpsi(s * sc) * sc;
    }
    (d, dd)
}

impl Shape {
    pub fn value(self, s: f64) -> f64 {
        match self {
            Shape::LogBump => psi(s),
            Shape::Partition => {
                let p = psi(s);
                if p == 0.0 {
                    0.0
                } else {
                    p / dilate_sum(s).0
                }
            }
        }
    }

    pub fn derivative(self, s: f64) -> f64 {
        match self {
            Shape::LogBump => dpsi(s),
            Shape::Partition => {
                let p = psi(s);
                if p == 0.0 {
                    return 0.0;
                }
                let (d, dd) = dilate_sum(s);
                (dpsi(s) * d - p * dd) / (d * d)
            }
        }
    }
}

/// `x -> shape(1 + (x - Z)/T)`: support `(Z - T/2, Z + T)`, derivatives of size `T^-j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothWindow {
    pub z: f64,
    pub t: f64,
    pub shape: Shape,
}

impl SmoothWindow {
    pub fn new(z: f64, t: f64, shape: Shape) -> Result<Self> {
        if !(z >= 1.0) || !(t >= 1.0) || t > z {
            return domain(format!("window needs 1 <= T <= Z, got Z={z}, T={t}"));
        }
        Ok(Self { z, t, shape })
    }

    /// The fixed bump supported on `[1, 4]`.
    pub fn canonical() -> Self {
        Self { z: 2.0, t: 2.0, shape: Shape::LogBump }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.z - 0.5 * self.t, self.z + self.t)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.shape.value(1.0 + (x - self.z) / self.t)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.shape.derivative(1.0 + (x - self.z) / self.t) / self.t
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicPartition {
    pub levels: Vec<f64>,
}

impl DyadicPartition {
    /// Levels `2^0, ..., 2^m` with `2^(m-1) > x_max`.
    pub fn up_to(x_max: f64) -> Self {
        let m = x_max.max(1.0).log2().ceil() as i32 + 2;
        Self { levels: (0..=m).map(|v| 2f64.powi(v)).collect() }
    }

    pub fn sum_at(&self, x: f64) -> f64 {
        self.levels.iter().map(|&z| Shape::Partition.value(x / z)).sum()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub max_deviation: f64,
    pub worst_x: f64,
}

pub fn partition_check(p: &DyadicPartition, x_grid: &[f64]) -> Result<PartitionReport> {
    let mut rep = PartitionReport { max_deviation: 0.0, worst_x: f64::NAN };
    for &x in x_grid {
        if x < 1.0 {
            return domain("partition identity is only claimed for x >= 1");
        }
        let d = (p.sum_at(x) - 1.0).abs();
        if d >= rep.max_deviation {
            rep.max_deviation = d;
            rep.worst_x = x;
        }
    }
    Ok(rep)
}

/// A frequency for `e(alpha m)`: exact rational when possible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Frequency {
    Rational { num: i64, den: i64 },
    Real(f64),
}

impl Frequency {
    /// Distance to the nearest integer.
    pub fn dist_to_integer(&self) -> f64 {
        match *self {
            Frequency::Rational { num, den } => {
                let r = num.rem_euclid(den);
                r.min(den - r) as f64 / den as f64
            }
            Frequency::Real(a) => (a - a.round()).abs(),
        }
    }

    pub fn phase(&self, m: i64) -> num_complex::Complex64 {
        match *self {
            Frequency::Rational { num, den } => e_frac(num as i128 * m as i128, den as u64),
            Frequency::Real(a) => {
                let f = a - a.floor();
                let x = (f * m as f64).rem_euclid(1.0);
                num_complex::Complex64::from_polar(1.0, 2.0 * PI * x)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub sum_abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// `|sum_m e(alpha m) Phi(m)|` against `Z (T ||alpha||)^-j`.
pub fn poisson_decay_check(w: &SmoothWindow, alpha: Frequency, j: u32) -> Result<DecayReport> {
    let d = alpha.dist_to_integer();
    if d == 0.0 {
        return domain("alpha must not be an integer");
    }
    if j < 2 {
        return domain("decay order j must be at least 2");
    }
    let (lo, hi) = w.support();
    let s: num_complex::Complex64 =
        (lo.ceil() as i64..=hi.floor() as i64).map(|m| alpha.phase(m) * w.value(m as f64)).sum();
    let bound = w.z * (w.t * d).powi(-(j as i32));
    Ok(DecayReport { sum_abs: s.norm(), bound, ratio: s.norm() / bound })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RationalApproximation {
    pub x: f64,
    pub a: i64,
    pub q: i64,
    pub h: f64,
    pub beta: f64,
    #[serde(skip)]
    pub beta_exact: BigRational,
}

impl RationalApproximation {
    pub fn satisfies_invariants(&self, x: &BigRational, h: &BigRational) -> bool {
        let q = BigRational::from_integer(self.q.into());
        let a = BigRational::from_integer(self.a.into());
        let beta = x - a / &q;
        self.a.gcd(&self.q) == 1
            && self.q >= 1
            && &q <= h
            && beta == self.beta_exact
            && beta.abs() * &q * h <= BigRational::one()
    }
}

fn reduce_mod_one(x: &BigRational) -> BigRational {
    x - BigRational::from_integer(x.floor().to_integer())
}

/// Last continued-fraction convergent `a/q` of `x` with `q <= H`, using the
/// exact rational value of `x` (not reduced mod 1; `a` carries the integer part).
pub fn dirichlet_approximate_exact(x: &BigRational, h: &BigRational) -> Result<RationalApproximation> {
    if h < &BigRational::one() {
        return domain("H must be at least 1");
    }
    let int_part = x.floor().to_integer();
    let frac = reduce_mod_one(x);
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    // convergent 0/1 of the fractional part
    let mut r = frac.clone();
    let mut best = (p1.clone(), q1.clone());
    while !r.is_zero() {
        let inv = r.recip();
        let ai = inv.floor().to_integer();
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        if BigRational::from_integer(q2.clone()) > *h {
            break;
        }
        best = (p2.clone(), q2.clone());
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        r = inv - BigRational::from_integer(ai);
    }
    let (pa, qa) = best;
    let a = &pa + &int_part * &qa;
    let beta = x - BigRational::new(a.clone(), qa.clone());
    let to64 = |v: &BigInt| v.to_i64().ok_or_else(|| crate::error::Error::Domain("convergent overflows i64".into()));
    Ok(RationalApproximation {
        x: x.to_f64().unwrap_or(f64::NAN),
        a: to64(&a)?,
        q: to64(&qa)?,
        h: h.to_f64().unwrap_or(f64::NAN),
        beta: beta.to_f64().unwrap_or(f64::NAN),
        beta_exact: beta,
    })
}

/// Float front end: the double `x` is treated as the exact dyadic rational it is.
pub fn dirichlet_approximate(x: f64, h: f64) -> Result<RationalApproximation> {
    let xr = BigRational::from_float(x).ok_or_else(|| crate::error::Error::Domain("x must be finite".into()))?;
    let hr = BigRational::from_float(h).ok_or_else(|| crate::error::Error::Domain("H must be finite".into()))?;
    dirichlet_approximate_exact(&xr, &hr)
}

/// `int g(xi) J(alpha sqrt xi) d xi` over the window support.
pub fn voronoi_integral(w: &SmoothWindow, kern: &VoronoiKernel, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return domain("alpha must be positive");
    }
    let (lo, hi) = w.support();
    let osc = 2.0 * alpha * (hi.sqrt() - lo.sqrt());
    let panels = 16 + (4.0 * osc) as usize + (4.0 * (hi - lo) / w.t) as usize;
    let tol = Tolerance { abs: 1e-11 * w.z, rel: 1e-10, max_intervals: 20_000 };
    let mut err = None;
    let v = integrate_panels(
        |xi: f64| {
            let g = w.value(xi);
            if g == 0.0 {
                return 0.0;
            }
            match voronoi_kernel(kern, alpha * xi.sqrt()) {
                Ok(k) => g * k,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        },
        lo,
        hi,
        panels,
        tol,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Major-arc bound `eps * t*^(3/2) q (|beta|^(3/2) Z + t*^(3/2) / Z^(1/2))`.
pub fn major_arc_size(q: u64, beta: f64, z: f64, t_star: f64, eps_factor: f64) -> Result<f64> {
    if q < 1 || z < 1.0 || t_star < 1.0 {
        return domain("need q >= 1, Z >= 1, t* >= 1");
    }
    Ok(eps_factor * t_star.powf(1.5) * q as f64 * (beta.abs().powf(1.5) * z + t_star.powf(1.5) / z.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_examples() {
        let p = DyadicPartition::up_to(2f64.powi(21));
        for x in [1.0, 3.7, 2f64.powi(20), 1.5, 1000.0] {
            assert!((p.sum_at(x) - 1.0).abs() <= 1e-12, "x={x}");
        }
    }

    #[test]
    fn window_support() {
        let w = SmoothWindow::new(64.0, 8.0, Shape::Partition).unwrap();
        let (lo, hi) = w.support();
        assert!(lo >= 32.0 && hi <= 128.0);
        assert_eq!(w.value(lo), 0.0);
        assert_eq!(w.value(hi), 0.0);
        assert!(w.value(64.0) > 0.0);
        assert!(SmoothWindow::new(4.0, 8.0, Shape::LogBump).is_err());
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        for shape in [Shape::LogBump, Shape::Partition] {
            let w = SmoothWindow::new(10.0, 3.0, shape).unwrap();
            for i in 1..40 {
                let x = 8.5 + i as f64 * 0.1;
                let h = 1e-6;
                let fd = (w.value(x + h) - w.value(x - h)) / (2.0 * h);
                assert!((fd - w.derivative(x)).abs() < 1e-7, "{shape:?} x={x}");
            }
        }
    }

    #[test]
    fn approximation_examples() {
        let third = BigRational::new(1.into(), 3.into());
        let r = dirichlet_approximate_exact(&third, &BigRational::from_integer(10.into())).unwrap();
        assert_eq!((r.a, r.q), (1, 3));
        assert!(r.beta_exact.is_zero());

        let r = dirichlet_approximate(PI - 3.0, 100.0).unwrap();
        assert_eq!((r.a, r.q), (1, 7));
        assert!((r.beta.abs() - 1.2644892673496777e-3).abs() < 1e-12);
        assert!(r.beta.abs() <= 1.0 / 700.0);

        let r = dirichlet_approximate(0.5 + 1e-9, 10.0).unwrap();
        assert_eq!((r.a, r.q), (1, 2));
    }

    #[test]
    fn major_arc_examples() {
        assert!((major_arc_size(1, 0.0, 1e6, 1.0, 1.0).unwrap() - 1e-3).abs() < 1e-15);
        let v = major_arc_size(10, 1e-6, 1e6, 2.0, 1.0).unwrap();
        let want = 2f64.powf(1.5) * 10.0 * (1e-3 + 2f64.powf(1.5) / 1e3);
        assert!((v - want).abs() < 1e-12);
        assert!((v - 0.1083).abs() < 1e-4);
        let v2 = major_arc_size(20, 1e-6, 1e6, 2.0, 1.0).unwrap();
        assert_eq!(v2, 2.0 * v);
    }

    #[test]
    fn decay_example() {
        let w = SmoothWindow::new(256.0, 256.0, Shape::LogBump).unwrap();
        let r = poisson_decay_check(&w, Frequency::Rational { num: 1, den: 2 }, 2).unwrap();
        assert!(r.ratio <= 100.0);
        assert!(poisson_decay_check(&w, Frequency::Rational { num: 3, den: 1 }, 2).is_err());
    }
}

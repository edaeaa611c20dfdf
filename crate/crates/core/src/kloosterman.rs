//! Twisted Kloosterman sums by direct summation over the units mod c.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::arith::{divisors, mod_inverse, Angle, DirichletCharacter};
use crate::error::{domain, Result};

#[derive(Debug, Clone)]
pub struct KloostermanQuery<'a> {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub chi: &'a DirichletCharacter,
}

impl<'a> KloostermanQuery<'a> {
    pub fn new(m: i64, n: i64, c: u64, chi: &'a DirichletCharacter) -> Result<Self> {
        if c == 0 {
            return domain("c must be positive");
        }
        if !c.is_multiple_of(chi.modulus().value()) {
            return domain(format!("character modulus {} does not divide c = {c}", chi.modulus()));
        }
        Ok(Self { m, n, c, chi })
    }

    /// Phases of the individual terms, in increasing order of `a`.
    pub fn term_angles(&self) -> impl Iterator<Item = Angle> + '_ {
        let c = self.c;
        (0..c).filter(move |&a| (a as i128).gcd(&(c as i128)) == 1).map(move |a| {
            let abar = mod_inverse(a as i64, c).expect("unit") as i128;
            let num = (self.m as i128 * abar + self.n as i128 * a as i128).rem_euclid(c as i128);
            let phase = Angle::new(num as i64, c as i64);
            let chi = self.chi.angle(a as i128).expect("unit mod c is a unit mod N");
            phase.add(chi.neg())
        })
    }

    /// The sum as a formal combination of roots of unity: angle -> multiplicity.
    pub fn exact_terms(&self) -> BTreeMap<Angle, i64> {
        let mut out = BTreeMap::new();
        for t in self.term_angles() {
            *out.entry(t).or_insert(0) += 1;
        }
        out
    }
}

pub fn kloosterman_sum(q: &KloostermanQuery) -> Complex64 {
    q.term_angles().map(Angle::exp).sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct WeilReport {
    pub value: (f64, f64),
    pub abs: f64,
    pub bound: f64,
    pub ratio: f64,
}

/// Compares `|S|` with `tau(c) gcd(m, n, c)^(1/2) c^(1/2)`.
pub fn kloosterman_weil_check(q: &KloostermanQuery) -> WeilReport {
    let s = kloosterman_sum(q);
    let g = (q.m as i128).gcd(&(q.n as i128)).gcd(&(q.c as i128)) as f64;
    let tau = divisors(q.c).len() as f64;
    let bound = tau * g.sqrt() * (q.c as f64).sqrt();
    WeilReport { value: (s.re, s.im), abs: s.norm(), bound, ratio: s.norm() / bound }
}

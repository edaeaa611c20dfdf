//! The sets of quadruples `(c, s, r1, r2)` with
//! `N | u^2 d1 d2 c + u (d1 r2 + d2 r1) + s` and their size bounds.

use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{is_square, SquarefreeModulus};
use crate::error::{domain, Error, Result};
use crate::oscillatory::{dirichlet_approximate_exact, RationalApproximation};

pub const DEFAULT_BOX_CAP: u128 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Quad {
    pub c: i64,
    pub s: i64,
    pub r1: i64,
    pub r2: i64,
}

#[derive(Debug, Clone)]
pub struct CountingInstance {
    pub c: f64,
    pub s: f64,
    pub r: f64,
    pub r_tilde: f64,
    pub d1: i64,
    pub d2: i64,
    pub u: i64,
    pub n: SquarefreeModulus,
    pub approx: Option<RationalApproximation>,
    pub box_cap: u128,
}

impl CountingInstance {
    pub fn new(c: f64, s: f64, r: f64, r_tilde: f64, d1: i64, d2: i64, u: i64, n: SquarefreeModulus) -> Result<Self> {
        if !(c > 0.0) || s < 0.0 || r < 0.0 || r_tilde < 0.0 {
            return domain("need C > 0 and S, R, R~ >= 0");
        }
        if d1 < 1 || d2 < 1 {
            return domain("d1, d2 must be positive");
        }
        Ok(Self { c, s, r, r_tilde, d1, d2, u, n, approx: None, box_cap: DEFAULT_BOX_CAP })
    }

    /// Attach the convergent of `u/N` with denominator at most `H`.
    pub fn with_approximation(mut self, h: f64) -> Result<Self> {
        let nv = self.n.value() as f64;
        if !(h >= 1.0) || h > nv {
            return domain("need 1 <= H <= N");
        }
        let x = BigRational::new(self.u.into(), (self.n.value() as i64).into());
        let hr = BigRational::from_float(h).ok_or_else(|| Error::Domain("H must be finite".into()))?;
        let a = dirichlet_approximate_exact(&x, &hr)?;
        if !a.satisfies_invariants(&x, &hr) {
            return Err(Error::Degenerate("approximation failed its own invariants".into()));
        }
        self.approx = Some(a);
        Ok(self)
    }

    fn c_range(&self) -> (i64, i64) {
        let lo = self.c.ceil() as i64;
        let hi = (2.0 * self.c).ceil() as i64 - 1;
        (lo.max(1), hi)
    }

    fn box_volume(&self) -> u128 {
        let (lo, hi) = self.c_range();
        let nc = (hi - lo + 1).max(0) as u128;
        let w = |x: f64| 2 * x.floor() as u128 + 1;
        nc * w(self.s) * w(self.r) * w(self.r_tilde)
    }

    fn check_cap(&self) -> Result<()> {
        let v = self.box_volume();
        if v > self.box_cap {
            return Err(Error::ResourceCap { what: "counting box".into(), needed: v, cap: self.box_cap });
        }
        Ok(())
    }

    fn residue(&self, c: i64, r1: i64, r2: i64) -> i128 {
        let u = self.u as i128;
        u * u * (self.d1 * self.d2) as i128 * c as i128 + u * (self.d1 as i128 * r2 as i128 + self.d2 as i128 * r1 as i128)
    }

    pub fn satisfies(&self, q: &Quad) -> bool {
        (self.residue(q.c, q.r1, q.r2) + q.s as i128).rem_euclid(self.n.value() as i128) == 0
    }
}

/// For each `(c, r1, r2)` the admissible `s` form one residue class mod `N`.
pub fn enumerate_a(inst: &CountingInstance) -> Result<Vec<Quad>> {
    inst.check_cap()?;
    let (clo, chi) = inst.c_range();
    let (sm, rm, rtm) = (inst.s.floor() as i64, inst.r.floor() as i64, inst.r_tilde.floor() as i64);
    let n = inst.n.value() as i128;
    let mut out = Vec::new();
    for c in clo..=chi {
        for r1 in -rm..=rm {
            for r2 in -rtm..=rtm {
                let s0 = (-inst.residue(c, r1, r2)).rem_euclid(n) as i64;
                let first = s0 - ((s0 + sm) / n as i64) * n as i64;
                let mut s = first;
                while s <= sm {
                    if s >= -sm {
                        out.push(Quad { c, s, r1, r2 });
                    }
                    s += n as i64;
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Independent enumerator: `s` outermost, the full divisibility test on every point.
pub fn enumerate_a_naive(inst: &CountingInstance) -> Result<Vec<Quad>> {
    inst.check_cap()?;
    let (clo, chi) = inst.c_range();
    let (sm, rm, rtm) = (inst.s.floor() as i64, inst.r.floor() as i64, inst.r_tilde.floor() as i64);
    let mut out = Vec::new();
    for s in -sm..=sm {
        for r2 in -rtm..=rtm {
            for r1 in -rm..=rm {
                for c in clo..=chi {
                    let q = Quad { c, s, r1, r2 };
                    let v = inst.u as i128 * inst.u as i128 * inst.d1 as i128 * inst.d2 as i128 * c as i128
                        + inst.u as i128 * (inst.d1 as i128 * r2 as i128 + inst.d2 as i128 * r1 as i128)
                        + s as i128;
                    if v % inst.n.value() as i128 == 0 {
                        out.push(q);
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Elements of the plain set with `sc - r1 r2` a square (zero included).
pub fn enumerate_a_square(inst: &CountingInstance) -> Result<Vec<Quad>> {
    if inst.d1 != 1 || inst.d2 != 1 {
        return domain("the square set is defined for d1 = d2 = 1");
    }
    Ok(enumerate_a(inst)?.into_iter().filter(is_square_quad).collect())
}

pub fn is_square_quad(q: &Quad) -> bool {
    is_square(q.s as i128 * q.c as i128 - q.r1 as i128 * q.r2 as i128)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    Plain,
    Square,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub count: usize,
    pub bound_value: f64,
    pub ratio: f64,
}

/// Right-hand side for the plain set, all `(...)^eps` factors set to 1.
pub fn plain_bound(inst: &CountingInstance, a: &RationalApproximation) -> f64 {
    let (c, s, r, rt) = (inst.c, inst.s, inst.r, inst.r_tilde);
    let n = inst.n.value() as f64;
    let q = a.q as f64;
    let w = inst.d1 as f64 * rt + inst.d2 as f64 * r;
    c * r.min(rt) * (s * w / n + s * q / n + w * w / (q * a.h) + w / q + 1.0)
}

/// Right-hand side for the square set, all `(...)^eps` factors set to 1.
pub fn square_bound(inst: &CountingInstance, a: &RationalApproximation) -> f64 {
    let (c, s, r, rt) = (inst.c, inst.s, inst.r, inst.r_tilde);
    let n = inst.n.value() as f64;
    let q = a.q as f64;
    let w = r + rt;
    c * s * w / n + c * s * q / n + c * w * w / (q * a.h) + c * w / q + c + (s * c).sqrt() * q * r.min(rt) / n
}

pub fn quadruple_bound_check(inst: &CountingInstance, which: Which) -> Result<BoundReport> {
    let a = inst.approx.as_ref().ok_or_else(|| Error::Domain("the bound needs a rational approximation".into()))?;
    let (count, bound_value) = match which {
        Which::Plain => (enumerate_a(inst)?.len(), plain_bound(inst, a)),
        Which::Square => (enumerate_a_square(inst)?.len(), square_bound(inst, a)),
    };
    Ok(BoundReport { count, bound_value, ratio: count as f64 / bound_value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(c: f64, s: f64, r: f64, rt: f64, u: i64, n: u64) -> CountingInstance {
        CountingInstance::new(c, s, r, rt, 1, 1, u, SquarefreeModulus::new(n).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        assert!(enumerate_a(&inst(1.0, 0.0, 0.0, 0.0, 1, 5)).unwrap().is_empty());
        assert_eq!(enumerate_a(&inst(1.0, 0.0, 0.0, 0.0, 5, 5)).unwrap(), vec![Quad { c: 1, s: 0, r1: 0, r2: 0 }]);
        let i = inst(10.0, 5.0, 3.0, 3.0, 1, 7);
        let a = enumerate_a(&i).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, enumerate_a_naive(&i).unwrap());
        assert!(a.iter().all(|q| i.satisfies(q) && (10..20).contains(&q.c)));
    }

    #[test]
    fn square_examples() {
        let i = inst(8.0, 8.0, 4.0, 4.0, 3, 11);
        let sq = enumerate_a_square(&i).unwrap();
        let all = enumerate_a(&i).unwrap();
        let filtered: Vec<Quad> = all.iter().copied().filter(is_square_quad).collect();
        assert_eq!(sq, filtered);
        assert!(is_square_quad(&Quad { c: 1, s: 1, r1: 1, r2: 1 }));
        let d = CountingInstance::new(1.0, 1.0, 1.0, 1.0, 2, 1, 1, SquarefreeModulus::new(5).unwrap()).unwrap();
        assert!(enumerate_a_square(&d).is_err());
    }

    #[test]
    fn box_cap() {
        let mut i = inst(1000.0, 1000.0, 100.0, 100.0, 1, 7);
        i.box_cap = 1000;
        assert!(matches!(enumerate_a(&i), Err(Error::ResourceCap { .. })));
    }

    #[test]
    fn boundary_ties_included() {
        let i = inst(2.0, 3.0, 1.0, 1.0, 0, 1);
        let a = enumerate_a(&i).unwrap();
        // c in {2, 3}, |s| <= 3, |r1|, |r2| <= 1, N = 1 accepts all
        assert_eq!(a.len(), 2 * 7 * 3 * 3);
    }

    #[test]
    fn bound_needs_approximation() {
        let i = inst(4.0, 4.0, 2.0, 2.0, 3, 11);
        assert!(quadruple_bound_check(&i, Which::Plain).is_err());
        let i = i.with_approximation(5.0).unwrap();
        let r = quadruple_bound_check(&i, Which::Plain).unwrap();
        assert!(r.ratio.is_finite());
    }
}

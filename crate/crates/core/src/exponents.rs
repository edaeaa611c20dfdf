//! Exact exponent bookkeeping for products of powers of `N, t*, Z, L, H, q`.
//!
//! Everything here is rational arithmetic; log-scale comparisons are made in
//! units of `log N`, with `tau = log t* / log N` ranging over an interval.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Symbol {
    N,
    TStar,
    Z,
    L,
    H,
    Q,
}

impl Symbol {
    fn name(self) -> &'static str {
        match self {
            Symbol::N => "N",
            Symbol::TStar => "t*",
            Symbol::Z => "Z",
            Symbol::L => "L",
            Symbol::H => "H",
            Symbol::Q => "q",
        }
    }
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Product of symbol powers; zero exponents are never stored.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentMonomial(BTreeMap<Symbol, BigRational>);

impl ExponentMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn power(s: Symbol, e: BigRational) -> Self {
        Self::one().with(s, e)
    }

    /// Multiply by `s^e`.
    pub fn with(mut self, s: Symbol, e: BigRational) -> Self {
        let v = self.0.remove(&s).unwrap_or_else(BigRational::zero) + e;
        if !v.is_zero() {
            self.0.insert(s, v);
        }
        self
    }

    pub fn exponent(&self, s: Symbol) -> BigRational {
        self.0.get(&s).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.0.keys().copied()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pow(&self, e: &BigRational) -> Self {
        self.0.iter().fold(Self::one(), |m, (s, x)| m.with(*s, x * e))
    }

    pub fn inv(&self) -> Self {
        self.pow(&-BigRational::one())
    }

    /// Replace each listed symbol by a monomial.
    pub fn substitute(&self, subs: &BTreeMap<Symbol, ExponentMonomial>) -> Self {
        self.0.iter().fold(Self::one(), |m, (s, e)| match subs.get(s) {
            Some(r) => monomial_mul(&m, &r.pow(e)),
            None => m.with(*s, e.clone()),
        })
    }

    fn only_base(&self) -> Result<()> {
        match self.symbols().find(|s| !matches!(s, Symbol::N | Symbol::TStar)) {
            Some(s) => domain(format!("symbol {} left after substitution", s.name())),
            None => Ok(()),
        }
    }

    /// `log(monomial) / log N` at `log t* = tau log N`.
    pub fn log_size(&self, tau: &BigRational) -> Result<BigRational> {
        self.only_base()?;
        Ok(self.exponent(Symbol::N) + self.exponent(Symbol::TStar) * tau)
    }

    /// Trade `t*` excess above `keep` for `N` using `t* <= N^tau_max`.
    pub fn absorb_tstar(&self, keep: &BigRational, tau_max: &BigRational) -> Self {
        let excess = self.exponent(Symbol::TStar) - keep;
        if !excess.is_positive() {
            return self.clone();
        }
        self.clone().with(Symbol::TStar, -excess.clone()).with(Symbol::N, excess * tau_max)
    }
}

impl fmt::Display for ExponentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(s, e)| format!("{}^({})", s.name(), e)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl Serialize for ExponentMonomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

pub fn monomial_mul(a: &ExponentMonomial, b: &ExponentMonomial) -> ExponentMonomial {
    b.0.iter().fold(a.clone(), |m, (s, e)| m.with(*s, e.clone()))
}

/// A sum of monomials, read as their maximum up to constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExponentBound {
    pub monomials: Vec<ExponentMonomial>,
    /// Whether a `P^eps` factor was dropped.
    pub up_to_eps: bool,
}

impl ExponentBound {
    pub fn new(monomials: Vec<ExponentMonomial>, up_to_eps: bool) -> Result<Self> {
        let mut out: Vec<ExponentMonomial> = Vec::new();
        for m in monomials {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return domain("a bound needs at least one term");
        }
        Ok(Self { monomials: out, up_to_eps })
    }

    pub fn scale(&self, m: &ExponentMonomial) -> Self {
        Self { monomials: self.monomials.iter().map(|x| monomial_mul(x, m)).collect(), up_to_eps: self.up_to_eps }
    }

    /// Term-wise square root, valid up to a constant factor.
    pub fn sqrt(&self) -> Self {
        let h = rat(1, 2);
        Self { monomials: self.monomials.iter().map(|x| x.pow(&h)).collect(), up_to_eps: self.up_to_eps }
    }

    pub fn same_terms(&self, other: &Self) -> bool {
        let mut a = self.monomials.clone();
        let mut b = other.monomials.clone();
        a.sort();
        b.sort();
        a == b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Serialize)]
pub struct Constraint {
    pub lhs: ExponentMonomial,
    pub rel: Relation,
    pub rhs: ExponentMonomial,
    pub label: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ConstraintSet {
    pub relations: Vec<Constraint>,
}

impl ConstraintSet {
    pub fn push(&mut self, lhs: ExponentMonomial, rel: Relation, rhs: ExponentMonomial, label: &str) {
        self.relations.push(Constraint { lhs, rel, rhs, label: label.into() });
    }

    /// The admissible range of the Z, L, H parameters: `1 <= t* <= N^(1/165)`,
    /// `N^(9/10) <= Z <= t* N`, `max(N^(1/100), t*^3) <= L <= N`, `t* L^2 <= H <= N`.
    pub fn standard() -> Self {
        use Symbol::*;
        let p = ExponentMonomial::power;
        let mut c = Self::default();
        c.push(ExponentMonomial::one(), Relation::Le, p(TStar, rat(1, 1)), "t* >= 1");
        c.push(p(TStar, rat(1, 1)), Relation::Le, p(N, rat(1, 165)), "t* <= N^(1/165)");
        c.push(p(Z, rat(1, 1)), Relation::Le, p(TStar, rat(1, 1)).with(N, rat(1, 1)), "Z <= t* N");
        c.push(p(Z, rat(1, 1)), Relation::Ge, p(N, rat(9, 10)), "Z >= N^(9/10)");
        c.push(p(L, rat(1, 1)), Relation::Ge, p(N, rat(1, 100)), "L >= N^(1/100)");
        c.push(p(L, rat(1, 1)), Relation::Ge, p(TStar, rat(3, 1)), "L >= t*^3");
        c.push(p(L, rat(1, 1)), Relation::Le, p(N, rat(1, 1)), "L <= N");
        c.push(p(H, rat(1, 1)), Relation::Ge, p(TStar, rat(1, 1)).with(L, rat(2, 1)), "H >= t* L^2");
        c.push(p(H, rat(1, 1)), Relation::Le, p(N, rat(1, 1)), "H <= N");
        c
    }

    /// Interval of `tau` cut out by the relations that only involve `N, t*`.
    pub fn tau_interval(&self) -> Result<(BigRational, BigRational)> {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for r in &self.relations {
            let d = monomial_mul(&r.lhs, &r.rhs.inv());
            if d.only_base().is_err() {
                continue;
            }
            // a + b tau (<=, =, >=) 0
            let (a, b) = (d.exponent(Symbol::N), d.exponent(Symbol::TStar));
            let (le, ge) = match r.rel {
                Relation::Le => (true, false),
                Relation::Ge => (false, true),
                Relation::Eq => (true, true),
            };
            if b.is_zero() {
                if (le && a.is_positive()) || (ge && a.is_negative()) {
                    return Err(Error::Degenerate(format!("constraint '{}' is infeasible", r.label)));
                }
                continue;
            }
            let root = -a / &b;
            let upper = |b: &BigRational| b.is_positive();
            for (want, is_le) in [(le, true), (ge, false)] {
                if !want {
                    continue;
                }
                if upper(&b) == is_le {
                    hi = Some(hi.map_or(root.clone(), |h| h.min(root.clone())));
                } else {
                    lo = Some(lo.map_or(root.clone(), |l| l.max(root.clone())));
                }
            }
        }
        match (lo, hi) {
            (Some(l), Some(h)) if l <= h => Ok((l, h)),
            (Some(_), Some(_)) => Err(Error::Degenerate("empty range for t*".into())),
            _ => Err(Error::Degenerate("t* is not bounded on both sides".into())),
        }
    }

    pub fn corners(&self) -> Result<[BigRational; 2]> {
        let (l, h) = self.tau_interval()?;
        Ok([l, h])
    }

    /// Every relation after substitution, checked at both ends of the `tau` range.
    /// Relations that still mention an unsubstituted symbol are skipped.
    pub fn violations(&self, subs: &BTreeMap<Symbol, ExponentMonomial>) -> Result<Vec<String>> {
        let corners = self.corners()?;
        let mut bad = Vec::new();
        for r in &self.relations {
            let d = monomial_mul(&r.lhs.substitute(subs), &r.rhs.substitute(subs).inv());
            if d.only_base().is_err() {
                continue;
            }
            for tau in &corners {
                let v = d.log_size(tau)?;
                let ok = match r.rel {
                    Relation::Le => !v.is_positive(),
                    Relation::Ge => !v.is_negative(),
                    Relation::Eq => v.is_zero(),
                };
                if !ok {
                    bad.push(format!("{} at tau = {}", r.label, tau));
                }
            }
        }
        Ok(bad)
    }
}

/// The term of `b` that is largest at some corner of the `tau` range; ties
/// go to the canonically smallest monomial.
pub fn dominant_monomial(
    b: &ExponentBound,
    c: &ConstraintSet,
    subs: &BTreeMap<Symbol, ExponentMonomial>,
) -> Result<ExponentMonomial> {
    let corners = c.corners()?;
    let mut best: Option<(BigRational, ExponentMonomial)> = None;
    let mut terms: Vec<ExponentMonomial> = b.monomials.iter().map(|m| m.substitute(subs)).collect();
    terms.sort();
    for m in terms {
        for tau in &corners {
            let v = m.log_size(tau)?;
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, m.clone()));
            }
        }
    }
    Ok(best.expect("bounds are nonempty").1)
}

/// Exact Gaussian elimination; `None` when singular.
fn solve_linear(mut a: Vec<Vec<BigRational>>, mut rhs: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for k in col..n {
                    let t = &f * &a[col][k];
                    a[r][k] -= t;
                }
                let t = &f * &rhs[col];
                rhs[r] -= t;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &a[i][i]).collect())
}

/// Choose each unknown as a monomial in `reduce_to` so that all `terms` agree.
pub fn solve_balance(
    terms: &[ExponentMonomial],
    unknowns: &[Symbol],
    reduce_to: &[Symbol],
) -> Result<BTreeMap<Symbol, ExponentMonomial>> {
    if terms.len() != unknowns.len() + 1 {
        return domain("need exactly one more term than unknowns");
    }
    for m in terms {
        if let Some(s) = m.symbols().find(|s| !unknowns.contains(s) && !reduce_to.contains(s)) {
            return domain(format!("symbol {} is neither unknown nor a base", s.name()));
        }
    }
    let mut out: BTreeMap<Symbol, ExponentMonomial> = unknowns.iter().map(|&u| (u, ExponentMonomial::one())).collect();
    // the system separates by base symbol: one copy per base
    for &base in reduce_to {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for w in terms.windows(2) {
            rows.push(unknowns.iter().map(|&u| w[0].exponent(u) - w[1].exponent(u)).collect());
            rhs.push(w[1].exponent(base) - w[0].exponent(base));
        }
        let x = solve_linear(rows, rhs).ok_or_else(|| Error::Singular("balance equations are singular".into()))?;
        for (u, v) in unknowns.iter().zip(x) {
            let m = out.remove(u).expect("seeded").with(base, v);
            out.insert(*u, m);
        }
    }
    Ok(out)
}

fn mono(parts: &[(Symbol, BigRational)]) -> ExponentMonomial {
    parts.iter().fold(ExponentMonomial::one(), |m, (s, e)| m.with(*s, e.clone()))
}

/// Minor-arc bound: `t*^5 L^(theta/2) (t* Z^(1/4) L^(7/8) H^(1/2) N^(-3/4)
/// + (t* L Z)^(1/2) (q N)^(-1/2) + Z^(1/2) L^(-1/4) N^(-1/2)) + t*^(9/2) L^(-1/2)`.
pub fn minor_arc_bound(theta: &BigRational) -> ExponentBound {
    use Symbol::*;
    let h = theta / BigInt::from(2);
    let terms = vec![
        mono(&[(TStar, rat(6, 1)), (L, &h + rat(7, 8)), (Z, rat(1, 4)), (H, rat(1, 2)), (N, rat(-3, 4))]),
        mono(&[(TStar, rat(11, 2)), (L, &h + rat(1, 2)), (Z, rat(1, 2)), (Q, rat(-1, 2)), (N, rat(-1, 2))]),
        mono(&[(TStar, rat(5, 1)), (L, &h - rat(1, 4)), (Z, rat(1, 2)), (N, rat(-1, 2))]),
        mono(&[(TStar, rat(9, 2)), (L, rat(-1, 2))]),
    ];
    ExponentBound { monomials: terms, up_to_eps: true }
}

/// Major-arc bound: `t*^(3/2) (q Z N^(-3/2) + Z H^(-3/2) + t*^(3/2) q Z^(-1/2))`.
pub fn major_arc_bound() -> ExponentBound {
    use Symbol::*;
    let terms = vec![
        mono(&[(TStar, rat(3, 2)), (Q, rat(1, 1)), (Z, rat(1, 1)), (N, rat(-3, 2))]),
        mono(&[(TStar, rat(3, 2)), (Z, rat(1, 1)), (H, rat(-3, 2))]),
        mono(&[(TStar, rat(3, 1)), (Q, rat(1, 1)), (Z, rat(-1, 2))]),
    ];
    ExponentBound { monomials: terms, up_to_eps: true }
}

/// Off-diagonal plus diagonal bound for the amplified second moment:
/// `t*^2 L^theta (t*^2 Z^(1/2) L^(15/4) H N^(-3/2) + t* L^3 Z (q N)^(-1) + Z L^(3/2) N^(-1)) + t* L`.
pub fn amplified_second_moment(theta: &BigRational) -> ExponentBound {
    use Symbol::*;
    let terms = vec![
        mono(&[(TStar, rat(4, 1)), (L, theta + rat(15, 4)), (Z, rat(1, 2)), (H, rat(1, 1)), (N, rat(-3, 2))]),
        mono(&[(TStar, rat(3, 1)), (L, theta + rat(3, 1)), (Z, rat(1, 1)), (Q, rat(-1, 1)), (N, rat(-1, 1))]),
        mono(&[(TStar, rat(2, 1)), (L, theta + rat(3, 2)), (Z, rat(1, 1)), (N, rat(-1, 1))]),
        mono(&[(TStar, rat(1, 1)), (L, rat(1, 1))]),
    ];
    ExponentBound { monomials: terms, up_to_eps: true }
}

/// Square root of the second moment, times the `t*^4 L^(-1)` from dividing by
/// the amplifier length and the transform normalisation.
pub fn pointwise_from_second_moment(b: &ExponentBound) -> ExponentBound {
    b.sqrt().scale(&mono(&[(Symbol::TStar, rat(4, 1)), (Symbol::L, rat(-1, 1))]))
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEntry {
    pub regime: String,
    pub term: usize,
    pub reduced: ExponentMonomial,
    #[serde(serialize_with = "ser_rats")]
    pub log_size_at_corners: Vec<BigRational>,
}

fn ser_rat<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

fn ser_rats<S: Serializer>(r: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(r.iter().map(|x| x.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalExponents {
    pub h: ExponentMonomial,
    pub l: ExponentMonomial,
    #[serde(serialize_with = "ser_rat")]
    pub exponent_n: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub exponent_tstar: BigRational,
    pub q0: ExponentMonomial,
    pub range_violations: Vec<String>,
    pub minor_arc_terms: Vec<ExponentMonomial>,
    pub minor_arc_absorbed: Vec<ExponentMonomial>,
    pub major_arc_terms: Vec<ExponentMonomial>,
    pub trace: Vec<TraceEntry>,
}

/// Push `sym` to whichever end of `[lo, hi]` makes `m` largest.
fn worst_endpoint(m: &ExponentMonomial, sym: Symbol, lo: &ExponentMonomial, hi: &ExponentMonomial) -> ExponentMonomial {
    let e = m.exponent(sym);
    let sub = if e.is_positive() { hi } else { lo };
    m.substitute(&[(sym, sub.clone())].into_iter().collect())
}

/// Balance the critical terms, substitute, split at `q0 = N^(1/3)` and take
/// the largest surviving term over the `t*` range.
pub fn final_exponents(theta: &BigRational) -> Result<FinalExponents> {
    use Symbol::*;
    let cons = ConstraintSet::standard();
    let corners = cons.corners()?;
    let b1 = minor_arc_bound(theta);
    let b2 = major_arc_bound();
    let z_top = mono(&[(TStar, rat(1, 1)), (N, rat(1, 1))]);
    let z_bottom = mono(&[(N, rat(9, 10))]);
    let zsub: BTreeMap<Symbol, ExponentMonomial> = [(Z, z_top.clone())].into_iter().collect();
    let critical = [b1.monomials[0].substitute(&zsub), b1.monomials[2].substitute(&zsub), b2.monomials[1].substitute(&zsub)];
    let solved = solve_balance(&critical, &[H, L], &[N, TStar])?;
    let range_violations = cons.violations(&solved)?;
    let q0 = mono(&[(N, rat(1, 3))]);
    let one = ExponentMonomial::one();

    let mut trace = Vec::new();
    let mut reduce = |regime: &str, b: &ExponentBound, q_lo: &ExponentMonomial, q_hi: &ExponentMonomial| {
        let mut out = Vec::new();
        for (i, m) in b.monomials.iter().enumerate() {
            let m = m.substitute(&solved);
            let m = worst_endpoint(&m, Z, &z_bottom, &z_top);
            let q_hi = q_hi.substitute(&solved);
            let m = worst_endpoint(&m, Q, q_lo, &q_hi);
            let sizes = corners.iter().map(|t| m.log_size(t)).collect::<Result<Vec<_>>>()?;
            trace.push(TraceEntry { regime: regime.into(), term: i, reduced: m.clone(), log_size_at_corners: sizes });
            out.push(m);
        }
        Ok::<_, Error>(out)
    };
    // q in [q0, H] on the minor arcs, q in [1, q0] on the major arcs
    let t1 = reduce("minor arcs, q >= q0", &b1, &q0, &mono(&[(H, rat(1, 1))]))?;
    let t2 = reduce("major arcs, q < q0", &b2, &one, &q0)?;
    let all = ExponentBound::new(t1.iter().chain(&t2).cloned().collect(), true)?;
    let winner = dominant_monomial(&all, &cons, &BTreeMap::new())?;

    // the displayed forms keep q free
    let keep_q = |b: &ExponentBound| -> Vec<ExponentMonomial> {
        let mut seen: Vec<ExponentMonomial> = Vec::new();
        for m in &b.monomials {
            let m = worst_endpoint(&m.substitute(&solved), Z, &z_bottom, &z_top);
            if !seen.contains(&m) {
                seen.push(m);
            }
        }
        seen
    };
    let minor_arc_terms = keep_q(&b1);
    let dominant_t = winner.exponent(TStar);
    let tau_max = corners[1].clone();
    let minor_arc_absorbed = minor_arc_terms.iter().map(|m| m.absorb_tstar(&dominant_t, &tau_max)).collect();
    let major_arc_terms = keep_q(&b2);

    Ok(FinalExponents {
        h: solved[&H].clone(),
        l: solved[&L].clone(),
        exponent_n: winner.exponent(N),
        exponent_tstar: winner.exponent(TStar),
        q0,
        range_violations,
        minor_arc_terms,
        minor_arc_absorbed,
        major_arc_terms,
        trace,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HybridReport {
    #[serde(serialize_with = "ser_rats")]
    pub weights: Vec<BigRational>,
    #[serde(serialize_with = "ser_rat")]
    pub exponent_tstar: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub exponent_n: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub final_exponent: BigRational,
    /// Whether the stated `1/2300` is implied by the computed exponent.
    pub stated_is_weaker: bool,
}

/// Weights `w1 + w2 = 1` with `X^w1 Y^w2 = (t* N)^e` for `X = t*^5 N^(-1/37)`,
/// `Y = t*^(-1/12)`; `min(X, Y)` is at most that geometric mean.
pub fn hybrid_combination() -> Result<HybridReport> {
    use Symbol::*;
    let x = mono(&[(TStar, rat(5, 1)), (N, rat(-1, 37))]);
    let y = mono(&[(TStar, rat(-1, 12))]);
    // w1 (x_t - x_n) + (1 - w1)(y_t - y_n) = 0
    let dx = x.exponent(TStar) - x.exponent(N);
    let dy = y.exponent(TStar) - y.exponent(N);
    if dx == dy {
        return Err(Error::Singular("no weighting equalises the exponents".into()));
    }
    let w1 = -&dy / (&dx - &dy);
    let w2 = BigRational::one() - &w1;
    if w1.is_negative() || w2.is_negative() {
        return Err(Error::Degenerate("weights fall outside [0, 1]".into()));
    }
    let m = monomial_mul(&x.pow(&w1), &y.pow(&w2));
    let e = m.exponent(N);
    Ok(HybridReport {
        weights: vec![w1, w2],
        exponent_tstar: m.exponent(TStar),
        exponent_n: e.clone(),
        stated_is_weaker: e <= -rat(1, 2300),
        final_exponent: e,
    })
}

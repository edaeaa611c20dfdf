//! Modular arithmetic on square-free moduli and Dirichlet characters with
//! exact root-of-unity values.

use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// The exponent 7/64 towards the Ramanujan conjecture.
pub fn theta() -> BigRational {
    BigRational::new(7.into(), 64.into())
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Extended gcd: returns (g, x, y) with ax + by = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Multiplicative inverse of `a` modulo `c`, in `[0, c)`.
pub fn mod_inverse(a: i64, c: u64) -> Result<u64> {
    if c == 0 {
        return domain("modulus must be positive");
    }
    let (g, x, _) = ext_gcd(a as i128, c as i128);
    if g != 1 {
        return domain(format!("{a} is not invertible modulo {c}"));
    }
    Ok(x.rem_euclid(c as i128) as u64)
}

/// Largest `e` with `p^e | n`.
pub fn p_adic_valuation(n: i128, p: u64) -> Result<u32> {
    if n == 0 {
        return domain("valuation of zero");
    }
    if p < 2 {
        return domain("valuation base must be prime");
    }
    let p = p as i128;
    let mut n = n.abs();
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Representative of `a mod m` in `(-m/2, m/2]`.
pub fn centered(a: i128, m: i128) -> i128 {
    let r = a.rem_euclid(m);
    if 2 * r > m {
        r - m
    } else {
        r
    }
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_square(n: i128) -> bool {
    n >= 0 && {
        let r = isqrt(n as u128);
        r * r == n as u128
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SquarefreeModulus {
    value: u64,
    primes: Vec<u64>,
}

impl SquarefreeModulus {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return domain("modulus must be positive");
        }
        let f = factorize(value);
        if f.iter().any(|&(_, e)| e > 1) {
            return domain(format!("{value} is not square-free"));
        }
        Ok(Self { value, primes: f.into_iter().map(|(p, _)| p).collect() })
    }

    pub fn one() -> Self {
        Self { value: 1, primes: Vec::new() }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_coprime(&self, a: i128) -> bool {
        a.gcd(&(self.value as i128)) == 1
    }
}

impl fmt::Display for SquarefreeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Primes `p` in `[lo, hi]` with `p` not dividing the modulus.
pub fn primes_in_interval(lo: f64, hi: f64, excluded: &SquarefreeModulus) -> Vec<u64> {
    if !(hi >= lo) || hi < 2.0 {
        return Vec::new();
    }
    let a = lo.max(2.0).ceil() as u64;
    let b = hi.floor() as u64;
    (a..=b).filter(|&p| is_prime(p) && !excluded.value.is_multiple_of(p)).collect()
}

/// A point of Q/Z, kept reduced in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Angle(Ratio<i64>);

impl Angle {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let r = Ratio::new(num.rem_euclid(den), den.abs());
        Angle(r)
    }

    pub fn zero() -> Self {
        Angle(Ratio::zero())
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn add(self, other: Angle) -> Angle {
        let s = self.0 + other.0;
        Angle::new(*s.numer(), *s.denom())
    }

    pub fn neg(self) -> Angle {
        Angle::new(-*self.0.numer(), *self.0.denom())
    }

    pub fn scale(self, k: i64) -> Angle {
        let n = (*self.0.numer() as i128 * k as i128).rem_euclid(*self.0.denom() as i128);
        Angle::new(n as i64, *self.0.denom())
    }

    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }

    /// e(x) = exp(2 pi i x).
    pub fn exp(self) -> Complex64 {
        Complex64::from_polar(1.0, std::f64::consts::TAU * self.to_f64())
    }
}

/// `e(num/den)` with the fraction reduced exactly before the float step.
pub fn e_frac(num: i128, den: u64) -> Complex64 {
    let r = num.rem_euclid(den as i128);
    Complex64::from_polar(1.0, std::f64::consts::TAU * (r as f64 / den as f64))
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let fs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
    (2..p)
        .find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("primitive root exists")
}

/// Character component at one prime: chi_p(g^j) = e(k j / (p - 1)).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Component {
    p: u64,
    k: u64,
    log: Vec<u32>,
}

impl Component {
    fn new(p: u64, k: u64) -> Self {
        let g = primitive_root(p);
        let mut log = vec![0u32; p as usize];
        let mut x = 1u64;
        for j in 0..(p - 1).max(1) {
            log[x as usize] = j as u32;
            x = mul_mod(x, g, p);
        }
        Self { p, k: k % (p - 1).max(1), log }
    }

    fn order(&self) -> u64 {
        (self.p - 1).max(1)
    }

    fn angle(&self, a: i128) -> Angle {
        let r = a.rem_euclid(self.p as i128) as usize;
        let j = self.log[r] as i64;
        Angle::new(self.k as i64 * j, self.order() as i64)
    }
}

/// A Dirichlet character modulo a square-free integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: SquarefreeModulus,
    components: Vec<Component>,
}

impl DirichletCharacter {
    pub fn trivial(modulus: SquarefreeModulus) -> Self {
        let exps = vec![0; modulus.primes().len()];
        Self::from_exponents(modulus, &exps).expect("trivial exponents are valid")
    }

    /// Character with `chi_p(g_p) = e(k_p / (p - 1))`, `g_p` the least primitive root mod `p`.
    pub fn from_exponents(modulus: SquarefreeModulus, exponents: &[u64]) -> Result<Self> {
        if exponents.len() != modulus.primes().len() {
            return domain("need one exponent per prime factor");
        }
        let components = modulus
            .primes()
            .iter()
            .zip(exponents)
            .map(|(&p, &k)| Component::new(p, k))
            .collect();
        Ok(Self { modulus, components })
    }

    /// The product of Legendre symbols over the odd primes of the modulus.
    pub fn real(modulus: SquarefreeModulus) -> Self {
        let exps: Vec<u64> = modulus.primes().iter().map(|&p| (p - 1) / 2).collect();
        Self::from_exponents(modulus, &exps).expect("valid exponents")
    }

    /// All even characters modulo `modulus`, in lexicographic exponent order.
    pub fn all_even(modulus: &SquarefreeModulus) -> Vec<Self> {
        let orders: Vec<u64> = modulus.primes().iter().map(|&p| (p - 1).max(1)).collect();
        let total: u64 = orders.iter().product();
        let mut out = Vec::new();
        for idx in 0..total {
            let mut rest = idx;
            let mut exps = vec![0u64; orders.len()];
            for i in (0..orders.len()).rev() {
                exps[i] = rest % orders[i];
                rest /= orders[i];
            }
            let chi = Self::from_exponents(modulus.clone(), &exps).expect("valid exponents");
            if chi.is_even() {
                out.push(chi);
            }
        }
        out
    }

    pub fn modulus(&self) -> &SquarefreeModulus {
        &self.modulus
    }

    pub fn exponents(&self) -> Vec<u64> {
        self.components.iter().map(|c| c.k).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.components.iter().all(|c| c.k == 0)
    }

    pub fn is_even(&self) -> bool {
        self.angle(-1).map(|a| a == Angle::zero()).unwrap_or(false)
    }

    /// The exact value as an angle, or `None` when `gcd(a, N) > 1`.
    pub fn angle(&self, a: i128) -> Option<Angle> {
        if !self.modulus.is_coprime(a) {
            return None;
        }
        Some(self.components.iter().fold(Angle::zero(), |acc, c| acc.add(c.angle(a))))
    }

    pub fn conj(&self) -> Self {
        let exps: Vec<u64> = self.components.iter().map(|c| (c.order() - c.k) % c.order()).collect();
        Self::from_exponents(self.modulus.clone(), &exps).expect("valid exponents")
    }

    /// Restriction to the primes dividing `d`, as a character modulo `gcd(N, d)`.
    pub fn restrict(&self, d: u64) -> Self {
        let keep: Vec<&Component> = self.components.iter().filter(|c| d.is_multiple_of(c.p)).collect();
        let m: u64 = keep.iter().map(|c| c.p).product();
        let modulus = SquarefreeModulus::new(m).expect("divisor of square-free is square-free");
        let exps: Vec<u64> = keep.iter().map(|c| c.k).collect();
        Self::from_exponents(modulus, &exps).expect("valid exponents")
    }

    pub fn eval(&self, a: i128) -> Complex64 {
        char_eval(self, a)
    }
}

pub fn char_eval(chi: &DirichletCharacter, a: i128) -> Complex64 {
    match chi.angle(a) {
        None => Complex64::new(0.0, 0.0),
        Some(t) if t == Angle::zero() => Complex64::new(1.0, 0.0),
        Some(t) if t == Angle::new(1, 2) => Complex64::new(-1.0, 0.0),
        Some(t) => t.exp(),
    }
}

/// Parse `trivial`, `real` or a comma list of per-prime exponents.
pub fn parse_character(spec: &str, modulus: SquarefreeModulus) -> Result<DirichletCharacter> {
    match spec.trim() {
        "" | "trivial" => Ok(DirichletCharacter::trivial(modulus)),
        "real" => Ok(DirichletCharacter::real(modulus)),
        s => {
            let exps: std::result::Result<Vec<u64>, _> = s.split(',').map(|x| x.trim().parse()).collect();
            match exps {
                Ok(e) => DirichletCharacter::from_exponents(modulus, &e),
                Err(_) => domain(format!("bad character spec '{s}'")),
            }
        }
    }
}

pub(crate) fn big(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

pub(crate) fn big_one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(n: u64) -> SquarefreeModulus {
        SquarefreeModulus::new(n).unwrap()
    }

    #[test]
    fn char_eval_examples() {
        assert_eq!(char_eval(&DirichletCharacter::trivial(sf(15)), 4), Complex64::new(1.0, 0.0));
        assert_eq!(char_eval(&DirichletCharacter::real(sf(7)), 7), Complex64::new(0.0, 0.0));
        assert_eq!(char_eval(&DirichletCharacter::real(sf(3)), 2), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(mod_inverse(1, 7).unwrap(), 1);
        assert_eq!(mod_inverse(2, 5).unwrap(), 3);
        assert_eq!(mod_inverse(4, 9).unwrap(), 7);
        assert!(mod_inverse(3, 9).is_err());
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(8, 2).unwrap(), 3);
        assert_eq!(p_adic_valuation(15, 2).unwrap(), 0);
        assert_eq!(p_adic_valuation(360, 3).unwrap(), 2);
        assert!(p_adic_valuation(0, 3).is_err());
    }

    #[test]
    fn primes_examples() {
        assert_eq!(primes_in_interval(10.0, 20.0, &sf(21)), vec![11, 13, 17, 19]);
        assert_eq!(primes_in_interval(10.0, 20.0, &sf(143)), vec![17, 19]);
        assert!(primes_in_interval(14.0, 16.0, &SquarefreeModulus::one()).is_empty());
    }

    #[test]
    fn rejects_non_squarefree() {
        assert!(SquarefreeModulus::new(12).is_err());
        assert_eq!(SquarefreeModulus::new(30).unwrap().primes(), &[2, 3, 5]);
    }

    #[test]
    fn primality_against_sieve() {
        let n = 5000;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for i in 0..n {
            assert_eq!(is_prime(i as u64), sieve[i], "{i}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn even_characters() {
        let n = sf(35);
        let evens = DirichletCharacter::all_even(&n);
        // half of the 24 characters are even
        assert_eq!(evens.len(), 12);
        assert!(evens.iter().all(|c| c.eval(-1) == Complex64::new(1.0, 0.0)));
        assert!(!DirichletCharacter::real(sf(3)).is_even());
        assert!(DirichletCharacter::real(sf(5)).is_even());
    }

    #[test]
    fn character_values_are_roots_of_unity() {
        let chi = DirichletCharacter::from_exponents(sf(77), &[1, 3]).unwrap();
        for a in 1..77 {
            let v = chi.eval(a);
            if a % 7 == 0 || a % 11 == 0 {
                assert_eq!(v.norm(), 0.0);
            } else {
                assert!((v.norm() - 1.0).abs() < 1e-14);
            }
        }
    }
}

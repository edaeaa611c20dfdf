//! Hecke eigenvalue systems and the prime / prime-square amplifier.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::arith::{factorize, is_prime, primes_in_interval, Angle, DirichletCharacter, SquarefreeModulus};
use crate::error::{domain, Error, Result};

/// Multiplicative `lambda(n)` from prime values via
/// `lambda(p^(k+1)) = lambda(p) lambda(p^k) - chi(p) lambda(p^(k-1))`.
#[derive(Debug, Clone)]
pub struct HeckeSystem {
    chi: DirichletCharacter,
    prime_values: BTreeMap<u64, Complex64>,
    powers: HashMap<u64, Vec<Complex64>>,
}

impl HeckeSystem {
    pub fn new(chi: DirichletCharacter, prime_values: BTreeMap<u64, Complex64>) -> Result<Self> {
        if let Some(p) = prime_values.keys().find(|&&p| !is_prime(p)) {
            return domain(format!("{p} is not prime"));
        }
        Ok(Self { chi, prime_values, powers: HashMap::new() })
    }

    /// `lambda(p) = 2 cos(theta_p)` with `theta_p` uniform, for every prime up to `limit`.
    pub fn sato_tate<R: Rng>(chi: DirichletCharacter, limit: u64, rng: &mut R) -> Self {
        let values = (2..=limit)
            .filter(|&p| is_prime(p))
            .map(|p| (p, Complex64::new(2.0 * rng.gen_range(0.0..std::f64::consts::PI).cos(), 0.0)))
            .collect();
        Self { chi, prime_values: values, powers: HashMap::new() }
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn prime_value(&self, p: u64) -> Result<Complex64> {
        self.prime_values.get(&p).copied().ok_or_else(|| Error::Domain(format!("no eigenvalue assigned at p = {p}")))
    }

    fn prime_power(&mut self, p: u64, k: u32) -> Result<Complex64> {
        let lp = self.prime_value(p)?;
        let chip = self.chi.eval(p as i128);
        let row = self.powers.entry(p).or_insert_with(|| vec![Complex64::one(), lp]);
        while row.len() <= k as usize {
            let j = row.len();
            let next = lp * row[j - 1] - chip * row[j - 2];
            row.push(next);
        }
        Ok(row[k as usize])
    }

    pub fn hecke_extend(&mut self, n: u64) -> Result<Complex64> {
        if n == 0 {
            return domain("n must be positive");
        }
        let mut v = Complex64::one();
        for (p, k) in factorize(n) {
            v *= self.prime_power(p, k)?;
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Amplifier {
    pub l: f64,
    pub lambda1: Vec<u64>,
    pub lambda2: Vec<u64>,
    #[serde(serialize_with = "ser_coefficients")]
    pub coefficients: BTreeMap<u64, Complex64>,
    #[serde(skip)]
    chi: Option<DirichletCharacter>,
}

fn ser_coefficients<S: serde::Serializer>(c: &BTreeMap<u64, Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeMap;
    let mut m = s.serialize_map(Some(c.len()))?;
    for (k, v) in c {
        m.serialize_entry(&k.to_string(), &[v.re, v.im])?;
    }
    m.end()
}

impl Amplifier {
    fn from_primes(sys: &HeckeSystem, l: f64, primes: Vec<u64>, squares: Vec<u64>) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for &p in &primes {
            coefficients.insert(p, sys.prime_value(p)? * sys.chi.eval(p as i128).conj());
        }
        for &p in &squares {
            // -conj(chi(p)) at p^2 makes each prime contribute exactly 1
            coefficients.insert(p * p, -sys.chi.eval(p as i128).conj());
        }
        let lambda2 = squares.iter().map(|p| p * p).collect();
        Ok(Self { l, lambda1: primes, lambda2, coefficients, chi: Some(sys.chi.clone()) })
    }

    pub fn support(&self) -> Vec<u64> {
        self.coefficients.keys().copied().collect()
    }
}

/// Primes in `[L, 2L]` coprime to `N` and their squares.
pub fn build_amplifier(sys: &HeckeSystem, l: f64, n: &SquarefreeModulus) -> Result<Amplifier> {
    if !(l >= 2.0) {
        return domain("L must be at least 2");
    }
    let primes = primes_in_interval(l, 2.0 * l, n);
    Amplifier::from_primes(sys, l, primes.clone(), primes)
}

/// Primes up to `sqrt(L)` and their squares, coprime to `N`.
pub fn build_is_amplifier(sys: &HeckeSystem, l: f64, n: &SquarefreeModulus) -> Result<Amplifier> {
    if !(l >= 4.0) {
        return domain("L must be at least 4");
    }
    let primes = primes_in_interval(2.0, l.sqrt() + 1e-12, n);
    Amplifier::from_primes(sys, l, primes.clone(), primes)
}

pub fn amplifier_diagonal_value(sys: &mut HeckeSystem, amp: &Amplifier) -> Result<Complex64> {
    if amp.chi.as_ref() != Some(&sys.chi) {
        return Err(Error::Domain("amplifier was built from a different character".into()));
    }
    let mut total = Complex64::zero();
    for (&ell, &a) in &amp.coefficients {
        total += sys.hecke_extend(ell)? * a;
    }
    Ok(total)
}

/// Finite formal sums `sum c_j e(theta_j)` with rational `c_j` and `theta_j` in Q/Z.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CyclotomicSum(BTreeMap<Angle, BigRational>);

impl CyclotomicSum {
    pub fn constant(c: BigRational) -> Self {
        Self::term(c, Angle::zero())
    }

    pub fn term(c: BigRational, theta: Angle) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert(theta, c);
        }
        Self(m)
    }

    /// `chi(a)`, or the empty sum when `a` shares a factor with the modulus.
    pub fn character(chi: &DirichletCharacter, a: i128) -> Self {
        match chi.angle(a) {
            Some(t) => Self::term(BigRational::one(), t),
            None => Self::default(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.0.clone();
        for (t, c) in &other.0 {
            let e = m.entry(*t).or_insert_with(BigRational::zero);
            *e += c;
            if e.is_zero() {
                m.remove(t);
            }
        }
        Self(m)
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|(t, c)| (*t, -c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::default();
        for (t1, c1) in &self.0 {
            for (t2, c2) in &other.0 {
                out = out.add(&Self::term(c1 * c2, t1.add(*t2)));
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|(t, c)| (t.neg(), c.clone())).collect())
    }

    /// The rational number this sum equals, when it is supported on angle 0.
    ///
    /// Distinct angles are not linearly independent in general, so a sum with
    /// other support may still be rational; callers only rely on the
    /// sufficient direction.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self.0.len() {
            0 => Some(BigRational::zero()),
            1 => self.0.get(&Angle::zero()).cloned(),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        use num_traits::ToPrimitive;
        self.0.iter().map(|(t, c)| t.exp() * c.to_f64().unwrap_or(f64::NAN)).sum()
    }
}

/// The diagonal sum with rational `lambda(p)` and exact character values.
pub fn amplifier_diagonal_exact(
    chi: &DirichletCharacter,
    prime_values: &BTreeMap<u64, BigRational>,
    primes: &[u64],
) -> Result<CyclotomicSum> {
    let mut total = CyclotomicSum::default();
    for &p in primes {
        let lp = prime_values.get(&p).ok_or_else(|| Error::Domain(format!("no eigenvalue assigned at p = {p}")))?;
        let lam = CyclotomicSum::constant(lp.clone());
        let chip = CyclotomicSum::character(chi, p as i128);
        let lam2 = lam.mul(&lam).add(&chip.neg());
        let alpha1 = lam.mul(&chip.conj());
        let alpha2 = chip.conj().neg();
        total = total.add(&lam.mul(&alpha1)).add(&lam2.mul(&alpha2));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::ComplexFloat;

    fn sq(n: u64) -> SquarefreeModulus {
        SquarefreeModulus::new(n).unwrap()
    }

    fn fixed_system(chi: DirichletCharacter) -> HeckeSystem {
        let vals = [(2, 0.3), (3, -1.1), (5, 0.7), (7, 1.9), (11, 1.2), (13, -0.4), (17, 0.9), (19, 2.0)];
        HeckeSystem::new(chi, vals.iter().map(|&(p, v)| (p, Complex64::new(v, 0.0))).collect()).unwrap()
    }

    #[test]
    fn extension_examples() {
        let mut s = fixed_system(DirichletCharacter::trivial(sq(21)));
        assert_eq!(s.hecke_extend(1).unwrap(), Complex64::one());
        assert!((s.hecke_extend(4).unwrap().re - (0.09 - 1.0)).abs() < 1e-15);
        assert!((s.hecke_extend(6).unwrap().re - 0.3 * -1.1).abs() < 1e-15);
        // 3 | 21: chi(3) = 0, so lambda(9) = lambda(3)^2
        assert!((s.hecke_extend(9).unwrap().re - 1.21).abs() < 1e-15);
        assert!(s.hecke_extend(23).is_err());
    }

    #[test]
    fn amplifier_examples() {
        let mut s = fixed_system(DirichletCharacter::trivial(sq(21)));
        let amp = build_amplifier(&s, 10.0, &sq(21)).unwrap();
        assert_eq!(amp.support(), vec![11, 13, 17, 19, 121, 169, 289, 361]);
        let v = amplifier_diagonal_value(&mut s, &amp).unwrap();
        assert!((v - Complex64::new(4.0, 0.0)).abs() < 1e-12);
        for l2 in &amp.lambda2 {
            assert!((amp.coefficients[l2].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn real_character_mod_five() {
        let chi = DirichletCharacter::real(sq(5));
        let mut s = fixed_system(chi);
        let amp = build_amplifier(&s, 10.0, &sq(5)).unwrap();
        let v = amplifier_diagonal_value(&mut s, &amp).unwrap();
        assert!((v - Complex64::new(amp.lambda1.len() as f64, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn empty_and_small_amplifiers() {
        let mut s = fixed_system(DirichletCharacter::trivial(sq(2 * 3)));
        let amp = build_amplifier(&s, 2.0, &sq(6)).unwrap();
        assert!(amp.support().is_empty());
        assert_eq!(amplifier_diagonal_value(&mut s, &amp).unwrap(), Complex64::zero());
        let is = build_is_amplifier(&s, 4.0, &SquarefreeModulus::one()).unwrap();
        assert_eq!(is.support(), vec![2, 4]);
        let is = build_is_amplifier(&s, 100.0, &SquarefreeModulus::one()).unwrap();
        assert_eq!(is.lambda1, vec![2, 3, 5, 7]);
    }

    #[test]
    fn mismatched_system() {
        let s = fixed_system(DirichletCharacter::trivial(sq(5)));
        let amp = build_amplifier(&s, 10.0, &sq(5)).unwrap();
        let mut other = fixed_system(DirichletCharacter::real(sq(5)));
        assert!(amplifier_diagonal_value(&mut other, &amp).is_err());
    }

    #[test]
    fn exact_identity() {
        let chi = DirichletCharacter::from_exponents(sq(35), &[1, 2]).unwrap();
        let vals: BTreeMap<u64, BigRational> =
            [(11, (3, 4)), (13, (-5, 7)), (17, (1, 1)), (19, (0, 1))]
                .iter()
                .map(|&(p, (a, b))| (p, BigRational::new(a.into(), b.into())))
                .collect();
        let primes = primes_in_interval(10.0, 20.0, &sq(35));
        let v = amplifier_diagonal_exact(&chi, &vals, &primes).unwrap();
        assert_eq!(v.as_rational(), Some(BigRational::from_integer(4.into())));
    }
}

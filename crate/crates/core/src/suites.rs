//! Property sweeps shared by the test suite and the command-line verifier.
//!
//! Each property runs deterministically from a seed and reports the largest
//! observed ratio (or discrepancy) against a pinned limit.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::amplifier::{
    amplifier_diagonal_exact, amplifier_diagonal_value, build_amplifier, build_is_amplifier, HeckeSystem,
};
use crate::arith::{
    char_eval, divisors, is_prime, mod_inverse, p_adic_valuation, primes_in_interval, Angle, DirichletCharacter,
    SquarefreeModulus,
};
use crate::counting::{
    count_admissible_a, enumerate_a, enumerate_a_naive, enumerate_a_square, enumerate_r_n_matrices,
    enumerate_r_n_matrices_naive, geometric_sum, is_square_quad, quadruple_bound_check, m0_shape, matrix_count_split,
    CongruenceReductionInstance, CountingInstance, MatrixCountInstance, Which,
};
use crate::error::Error;
use crate::exponents::{
    minor_arc_bound, major_arc_bound, amplified_second_moment, pointwise_from_second_moment, rat, solve_balance,
    final_exponents, hybrid_combination, ExponentMonomial, Symbol,
};
use crate::kloosterman::KloostermanQuery;
use crate::oscillatory::{
    dirichlet_approximate_exact, poisson_decay_check, partition_check, voronoi_integral, DyadicPartition, Frequency,
    Shape, SmoothWindow,
};
use crate::special::checks::{
    bessel_j_size_sweep, bessel_k_size_sweep, check_derivative_recurrences, check_ibp_identity, check_kbessel_transition_bound,
    log_grid, weight_derivative_sweep, Family,
};
use crate::special::{
    bessel_k_imag, bessel_y_imag_pair, voronoi_kernel, ArchimedeanParameter, Sign, VoronoiKernel,
};
use crate::transforms::{
    decay_admissibility, dot_positive_range, dot_transform_closed, dot_transform_closed_reversed,
    dot_transform_quadrature, tilde_transform_closed, tilde_transform_closed_real, tilde_transform_quadrature,
    TestFunction,
};

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub box_cap: u128,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 20_240_601, box_cap: crate::counting::DEFAULT_BOX_CAP }
    }
}

impl SuiteConfig {
    /// Independent stream per property so results do not depend on selection.
    fn rng(&self, id: &str) -> ChaCha8Rng {
        let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropertyOutcome {
    pub id: String,
    pub anchor: String,
    pub instances: usize,
    /// Largest observed ratio or discrepancy; the quantity compared with `limit`.
    pub fitted_constant: Option<f64>,
    pub limit: Option<f64>,
    /// A secondary statistic where one applies (e.g. a fitted slope).
    pub max_ratio: Option<f64>,
    pub passed: bool,
    pub resource_capped: bool,
    pub errors: Vec<String>,
}

/// Running state of one property.
struct Run {
    id: &'static str,
    anchor: &'static str,
    instances: usize,
    worst: f64,
    worst_at: String,
    secondary: Option<f64>,
    errors: Vec<String>,
    capped: bool,
    failed: bool,
}

impl Run {
    fn new(p: &Property) -> Self {
        Self {
            id: p.id,
            anchor: p.anchor,
            instances: 0,
            worst: 0.0,
            worst_at: String::new(),
            secondary: None,
            errors: Vec::new(),
            capped: false,
            failed: false,
        }
    }

    fn observe(&mut self, v: f64, at: impl FnOnce() -> String) {
        self.instances += 1;
        if v.is_nan() || v > self.worst {
            self.worst = if v.is_nan() { f64::INFINITY } else { v };
            self.worst_at = at();
        }
    }

    /// A yes/no instance; a `false` is recorded as an error.
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.instances += 1;
        if !ok {
            self.failed = true;
            if self.errors.len() < 20 {
                self.errors.push(what());
            }
        }
    }

    fn error(&mut self, e: Error, at: impl FnOnce() -> String) {
        self.instances += 1;
        self.failed = true;
        if matches!(e, Error::ResourceCap { .. }) {
            self.capped = true;
        }
        if self.errors.len() < 20 {
            self.errors.push(format!("{}: {e}", at()));
        }
    }

    fn finish(self, limit: Option<f64>) -> PropertyOutcome {
        let within = limit.is_none_or(|l| self.worst <= l);
        let mut errors = self.errors;
        if !within && !self.worst_at.is_empty() {
            errors.push(format!("limit exceeded at {}", self.worst_at));
        }
        PropertyOutcome {
            id: self.id.into(),
            anchor: self.anchor.into(),
            instances: self.instances,
            fitted_constant: limit.map(|_| self.worst),
            limit,
            max_ratio: self.secondary,
            passed: within && !self.failed,
            resource_capped: self.capped,
            errors,
        }
    }
}

pub struct Property {
    pub id: &'static str,
    pub anchor: &'static str,
    run: fn(&SuiteConfig, Run) -> PropertyOutcome,
}

impl Property {
    pub fn run(&self, cfg: &SuiteConfig) -> PropertyOutcome {
        (self.run)(cfg, Run::new(self))
    }
}

/// `*` matches any run of characters; everything else is literal.
pub fn glob_match(pattern: &str, id: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == id;
    }
    let mut rest = id;
    for (i, part) in parts.iter().enumerate() {
        if i == 0 {
            match rest.strip_prefix(part) {
                Some(r) => rest = r,
                None => return false,
            }
        } else if i == parts.len() - 1 {
            return rest.ends_with(part);
        } else {
            match rest.find(part) {
                Some(k) => rest = &rest[k + part.len()..],
                None => return false,
            }
        }
    }
    true
}

pub fn select(pattern: &str) -> Vec<Property> {
    registry().into_iter().filter(|p| glob_match(pattern, p.id)).collect()
}

pub fn run_selected(cfg: &SuiteConfig, pattern: &str) -> Vec<PropertyOutcome> {
    select(pattern).iter().map(|p| p.run(cfg)).collect()
}

macro_rules! prop {
    ($id:expr, $anchor:expr, $f:expr) => {
        Property { id: $id, anchor: $anchor, run: $f }
    };
}

pub fn registry() -> Vec<Property> {
    vec![
        prop!("arith/char-multiplicative", "character values multiply: chi(ab) = chi(a) chi(b)", arith_char_mult),
        prop!("arith/mod-inverse-involution", "modular inverse is an involution", arith_inverse),
        prop!("arith/valuation-additive", "p-adic valuation of a product is additive", arith_valuation),
        prop!("arith/primes-in-interval", "amplifier primes are prime and coprime to the level", arith_primes),
        prop!("kloosterman/symmetry", "untwisted Kloosterman sums are symmetric in m, n", kl_symmetry),
        prop!("kloosterman/conjugation", "conjugating the character swaps m and n; conj(S) = chi(-1) S_conj(chi)", kl_conjugation),
        prop!("kloosterman/periodicity", "Kloosterman sums are periodic in m and n modulo c", kl_periodicity),
        prop!("kloosterman/multiplicativity", "twisted multiplicativity over coprime moduli", kl_multiplicativity),
        prop!("special/bessel-j-size", "|J_k(y)| << (1+k)/(1+y^(1/2))", sp_bessel_j_size),
        prop!("special/bessel-k-size", "cosh(pi t/2)|K_it(y)| << ((1+t)/y)^eps (1+y/(1+t))^-A", sp_bessel_k_size),
        prop!("special/k-transition", "cosh(pi t/2)|K_it(w)| << min(t^-1/3, |w^2-t^2|^-1/4)", sp_transition),
        prop!("special/weight-derivatives", "Whittaker weight derivatives W^(j)(y) << t*^1/2 (t*/y)^(j+eps)(1+y/t*)^-A", sp_weight),
        prop!("special/derivative-recurrence", "Z_r' = (Z_{r-1} - Z_{r+1})/2 and K_r' = -(K_{r-1} + K_{r+1})/2", sp_recurrence),
        prop!("special/ibp-identity", "one integration by parts against Z_r(alpha sqrt y)", sp_ibp),
        prop!("special/minus-kernel-holomorphic", "the minus Voronoi kernel vanishes for holomorphic forms", sp_minus_zero),
        prop!("special/even-in-t", "imaginary-order kernels are even in t", sp_even),
        prop!("transforms/closed-vs-quadrature", "Bessel transforms of phi_{A,B} agree with their Gamma-ratio closed forms", tr_closed_vs_quad),
        prop!("transforms/positivity", "holomorphic and Maass transforms of phi_{A,B} are positive", tr_positivity),
        prop!("transforms/decay-admissibility", "phi(0) = phi'(0) = 0 and phi^(j)(y) << (1+y)^-2-eps", tr_admissibility),
        prop!("transforms/exactness", "closed forms are rational multiples of 1/pi, order independent", tr_exactness),
        prop!("oscillatory/dirichlet", "continued-fraction approximation with q <= H and |x - a/q| <= 1/(qH)", os_dirichlet),
        prop!("oscillatory/partition", "dyadic partition of unity sums to 1", os_partition),
        prop!("oscillatory/window-derivatives", "window derivatives Phi^(j) << T^-j", os_window),
        prop!("oscillatory/poisson-decay", "sum_m e(alpha m) Phi(m) << Z (T ||alpha||)^-j", os_decay),
        prop!("oscillatory/voronoi-integral", "kernel integrals I << Z^(3/4) t*/alpha^(1/2), with extra decay when alpha sqrt(Z/2) >= 2t*", os_vintegral),
        prop!("counting/dual-oracle", "quadruple enumeration matches an independent loop order", ct_dual),
        prop!("counting/divisibility", "every quadruple satisfies N | u^2 d1 d2 c + u(d1 r2 + d2 r1) + s", ct_divisibility),
        prop!("counting/square-subset", "square-case quadruples are the plain ones with sc - r1 r2 a square", ct_square),
        prop!("counting/quadruple-bounds", "quadruple counts against the two-case bound with q, H from Dirichlet approximation", ct_bounds),
        prop!("counting/reduction", "residue reduction: congruence, multiplicity <= (c, l1, l2), valuation inequality", ct_reduction),
        prop!("counting/matrices-complete", "determinant-n matrix enumeration matches a naive search", ct_matrices),
        prop!("counting/upper-triangular-count", "M0(delta) << n^eps (1 + sqrt(n delta) y)", ct_m0),
        prop!("counting/geometric-sum", "sum_g k(u(z, gz)) << T + T^(1/2) n + T^(1/2) n^(1/2) y", ct_geometric),
        prop!("amplifier/diagonal-identity", "sum_l lambda(l) alpha(l) = #primes in [L, 2L]", am_diagonal),
        prop!("amplifier/hecke-relation", "lambda(m) lambda(n) = sum_{d | (m,n)} chi(d) lambda(mn/d^2)", am_hecke),
        prop!("amplifier/square-coefficients", "amplifier coefficients at prime squares have modulus 1", am_squares),
        prop!("exponents/reproduction", "balanced parameter choice and final exponents", ex_reproduction),
        prop!("exponents/z-grid", "the worst Z lies at an endpoint of [N^(9/10), t* N]", ex_zgrid),
        prop!("exponents/back-substitution", "the balanced terms coincide after substitution", ex_back),
        prop!("exponents/second-moment", "square root of the second-moment bound gives the pointwise bound", ex_second_moment),
    ]
}

fn sq(n: u64) -> SquarefreeModulus {
    SquarefreeModulus::new(n).expect("square-free literal")
}

fn squarefree_upto<R: Rng>(rng: &mut R, lo: u64, hi: u64) -> SquarefreeModulus {
    loop {
        if let Ok(m) = SquarefreeModulus::new(rng.gen_range(lo..=hi)) {
            return m;
        }
    }
}

fn random_character<R: Rng>(rng: &mut R, m: &SquarefreeModulus) -> DirichletCharacter {
    let exps: Vec<u64> = m.primes().iter().map(|&p| rng.gen_range(0..(p - 1).max(1))).collect();
    DirichletCharacter::from_exponents(m.clone(), &exps).expect("exponents in range")
}

// ---------------------------------------------------------------- arith

fn arith_char_mult(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..40 {
        let m = squarefree_upto(&mut rng, 2, 300);
        let chi = random_character(&mut rng, &m);
        let n = m.value() as i128;
        for _ in 0..25 {
            let (a, b) = (rng.gen_range(1..n.max(2)), rng.gen_range(1..n.max(2)));
            let lhs = chi.angle(a * b % n);
            let rhs = chi.angle(a).zip(chi.angle(b)).map(|(x, y)| x.add(y));
            r.check(lhs == rhs, || format!("N={n} a={a} b={b}"));
        }
    }
    r.finish(None)
}

fn arith_inverse(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..500 {
        let c: u64 = rng.gen_range(2..100_000);
        let a: i64 = rng.gen_range(-1_000_000..1_000_000);
        if a.gcd(&(c as i64)) != 1 {
            continue;
        }
        let ok = mod_inverse(a, c)
            .and_then(|x| mod_inverse(x as i64, c))
            .map(|y| y as i64 == a.rem_euclid(c as i64));
        r.check(ok.unwrap_or(false), || format!("a={a} c={c}"));
    }
    r.finish(None)
}

fn arith_valuation(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..500 {
        let p = [2u64, 3, 5, 7, 11, 13][rng.gen_range(0..6)];
        let m: i128 = rng.gen_range(1..1_000_000) * if rng.gen() { 1 } else { -1 };
        let n: i128 = rng.gen_range(1..1_000_000);
        let ok = (|| Ok::<_, Error>(p_adic_valuation(m * n, p)? == p_adic_valuation(m, p)? + p_adic_valuation(n, p)?))();
        r.check(ok.unwrap_or(false), || format!("m={m} n={n} p={p}"));
    }
    r.finish(None)
}

fn arith_primes(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..50 {
        let m = squarefree_upto(&mut rng, 1, 10_000);
        let l: f64 = rng.gen_range(2.0..2000.0);
        for p in primes_in_interval(l, 2.0 * l, &m) {
            let trial = (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
            r.check(trial && is_prime(p) && !m.value().is_multiple_of(p) && (p as f64) >= l, || format!("p={p} N={}", m.value()));
        }
    }
    r.finish(None)
}

// ---------------------------------------------------------------- kloosterman

fn kl_terms(m: i64, n: i64, c: u64, chi: &DirichletCharacter) -> Option<BTreeMap<Angle, i64>> {
    KloostermanQuery::new(m, n, c, chi).ok().map(|q| q.exact_terms())
}

fn random_modulus_for<R: Rng>(rng: &mut R, chi_mod: u64, max: u64) -> u64 {
    chi_mod * rng.gen_range(1..=(max / chi_mod).max(1))
}

fn kl_symmetry(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..200 {
        let c: u64 = rng.gen_range(1..400);
        let chi = DirichletCharacter::trivial(SquarefreeModulus::one());
        let (m, n) = (rng.gen_range(-500..500), rng.gen_range(-500..500));
        r.check(kl_terms(m, n, c, &chi) == kl_terms(n, m, c, &chi), || format!("m={m} n={n} c={c}"));
    }
    r.finish(None)
}

fn kl_conjugation(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..200 {
        let level = squarefree_upto(&mut rng, 1, 60);
        let chi = random_character(&mut rng, &level);
        let c = random_modulus_for(&mut rng, level.value(), 400);
        let (m, n) = (rng.gen_range(-300..300), rng.gen_range(-300..300));
        let conj = chi.conj();
        let a = kl_terms(m, n, c, &conj);
        r.check(a.is_some() && a == kl_terms(n, m, c, &chi), || format!("swap: N={} c={c} m={m} n={n}", level.value()));
        // conj(S_chi(m, n; c)) = chi(-1) S_conj(chi)(m, n; c)
        let sign = if chi.is_even() { Angle::zero() } else { Angle::new(1, 2) };
        let lhs: Option<BTreeMap<Angle, i64>> = kl_terms(m, n, c, &chi).map(|t| t.into_iter().map(|(k, v)| (k.neg(), v)).collect());
        let rhs: Option<BTreeMap<Angle, i64>> = a.map(|t| t.into_iter().map(|(k, v)| (k.add(sign), v)).collect());
        r.check(lhs == rhs, || format!("conj: N={} c={c} m={m} n={n}", level.value()));
    }
    r.finish(None)
}

fn kl_periodicity(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..200 {
        let level = squarefree_upto(&mut rng, 1, 60);
        let chi = random_character(&mut rng, &level);
        let c = random_modulus_for(&mut rng, level.value(), 400);
        let (m, n) = (rng.gen_range(-300..300), rng.gen_range(-300..300));
        let ci = c as i64;
        let base = kl_terms(m, n, c, &chi);
        r.check(base == kl_terms(m + ci, n, c, &chi) && base == kl_terms(m, n - ci, c, &chi), || {
            format!("N={} c={c} m={m} n={n}", level.value())
        });
    }
    r.finish(Some(0.0))
}

fn kl_multiplicativity(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    let mut done = 0;
    while done < 150 {
        let c1: u64 = rng.gen_range(1..60);
        let c2: u64 = rng.gen_range(1..60);
        if c1.gcd(&c2) != 1 {
            continue;
        }
        done += 1;
        // character of square-free modulus dividing c1 c2
        let sqf: Vec<u64> = divisors(c1 * c2).into_iter().filter(|&d| SquarefreeModulus::new(d).is_ok()).collect();
        let level = sq(sqf[rng.gen_range(0..sqf.len())]);
        let chi = random_character(&mut rng, &level);
        let chi1 = chi.restrict(level.value().gcd(&c1));
        let chi2 = chi.restrict(level.value().gcd(&c2));
        let (m, n) = (rng.gen_range(-200i64..200), rng.gen_range(-200i64..200));
        let res = (|| {
            let i2 = mod_inverse(c2 as i64, c1)? as i64;
            let i1 = mod_inverse(c1 as i64, c2)? as i64;
            let whole = crate::kloosterman::kloosterman_sum(&KloostermanQuery::new(m, n, c1 * c2, &chi)?);
            let a = crate::kloosterman::kloosterman_sum(&KloostermanQuery::new(m * i2, n * i2, c1, &chi1)?);
            let b = crate::kloosterman::kloosterman_sum(&KloostermanQuery::new(m * i1, n * i1, c2, &chi2)?);
            Ok::<_, Error>((whole - a * b).norm())
        })();
        match res {
            Ok(d) => r.observe(d, || format!("c1={c1} c2={c2} m={m} n={n}")),
            Err(e) => r.error(e, || format!("c1={c1} c2={c2}")),
        }
    }
    r.finish(Some(1e-10))
}

// ---------------------------------------------------------------- special

fn sp_bessel_j_size(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let fb = bessel_j_size_sweep();
    r.instances = fb.instances;
    r.worst = fb.constant;
    r.worst_at = fb.worst_point;
    r.finish(Some(5.0))
}

fn sp_bessel_k_size(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    match bessel_k_size_sweep() {
        Ok(fb) => {
            r.instances = fb.instances;
            r.worst = fb.constant;
            r.worst_at = fb.worst_point;
        }
        Err(e) => r.error(e, || "sweep".into()),
    }
    r.finish(Some(50.0))
}

/// Pinned: the bound carries an unspecified constant.
pub const TRANSITION_LIMIT: f64 = 10.0;
/// Pinned: the bound carries an unspecified constant.
pub const WEIGHT_LIMIT: f64 = 50.0;

fn sp_transition(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for t in [2.0, 5.0, 10.0, 20.0, 50.0] {
        match check_kbessel_transition_bound(t, &log_grid(0.05, 8.0 * t, 80)) {
            Ok(fb) => {
                r.instances += fb.instances - 1;
                r.observe(fb.constant, || fb.worst_point.clone());
            }
            Err(e) => r.error(e, || format!("t={t}")),
        }
    }
    r.finish(Some(TRANSITION_LIMIT))
}

fn sp_weight(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    match weight_derivative_sweep() {
        Ok(fb) => {
            r.instances = fb.instances;
            r.worst = fb.constant;
            r.worst_at = fb.worst_point;
        }
        Err(e) => r.error(e, || "sweep".into()),
    }
    r.finish(Some(WEIGHT_LIMIT))
}

fn sp_recurrence(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let grid = [0.5, 1.0, 2.0, 3.7, 8.0, 15.0, 30.0];
    for order in [0.0, 0.3, 1.0, 2.5, 5.0, 10.0] {
        match check_derivative_recurrences(order, &grid) {
            Ok(rep) => {
                // absolute below unit size, relative above (K_r blows up at small y)
                r.observe(rep.max_discrepancy_j / rep.scale_j.max(1.0), || format!("J order {order}"));
                r.observe(rep.max_discrepancy_k / rep.scale_k.max(1.0), || format!("K order {order}"));
            }
            Err(e) => r.error(e, || format!("order {order}")),
        }
    }
    r.finish(Some(1e-8))
}

fn sp_ibp(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let windows = [SmoothWindow::canonical(), SmoothWindow { z: 8.0, t: 4.0, shape: Shape::LogBump }];
    for g in &windows {
        for family in [Family::J, Family::Y, Family::K] {
            for order in [0.0, 0.5, 1.0, 3.0] {
                for alpha in [0.5, 1.0, 2.0, 5.0] {
                    match check_ibp_identity(g, order, alpha, family) {
                        Ok(rep) => r.check(rep.passed, || format!("{family:?} r={order} alpha={alpha} Z={}: {rep:?}", g.z)),
                        Err(e) => r.error(e, || format!("{family:?} r={order} alpha={alpha}")),
                    }
                }
            }
        }
    }
    r.finish(None)
}

fn sp_minus_zero(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for k in (2..=40).step_by(2) {
        let p = ArchimedeanParameter::holomorphic(k).expect("even weight");
        let kern = VoronoiKernel { param: p, sign: Sign::Minus };
        for &y in &log_grid(1e-3, 1e3, 30) {
            r.check(voronoi_kernel(&kern, y).map(|v| v == 0.0).unwrap_or(false), || format!("k={k} y={y}"));
        }
    }
    r.finish(None)
}

fn sp_even(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for t in [0.3, 1.0, 4.0, 12.0] {
        for &y in &log_grid(1e-2, 1e2, 12) {
            let res = (|| {
                let a = (bessel_k_imag(t, y)? - bessel_k_imag(-t, y)?).abs();
                let b = (bessel_y_imag_pair(t, y)? - bessel_y_imag_pair(-t, y)?).abs();
                Ok::<_, Error>(a.max(b))
            })();
            match res {
                Ok(d) => r.observe(d, || format!("t={t} y={y}")),
                Err(e) => r.error(e, || format!("t={t} y={y}")),
            }
        }
    }
    r.finish(Some(0.0))
}

// ---------------------------------------------------------------- transforms

/// The shipped test-function family.
pub fn transform_family() -> Vec<TestFunction> {
    [(8, 2), (10, 2), (12, 2), (8, 4), (10, 4), (12, 4)]
        .iter()
        .map(|&(a, b)| TestFunction::new(a, b).expect("valid family"))
        .collect()
}

/// Relative discrepancies between quadrature and closed forms over a grid.
pub fn transform_grid(family: &[TestFunction], ks: &[u32], ts: &[f64]) -> Vec<(String, crate::Result<f64>)> {
    let mut out = Vec::new();
    for tf in family {
        for &k in ks {
            let res = (|| {
                let c = dot_transform_closed(tf, k)?.value;
                let q = dot_transform_quadrature(tf, k)?;
                Ok(((q - c) / c).abs())
            })();
            out.push((format!("A={} B={} k={k}", tf.a(), tf.b()), res));
        }
        for &t in ts {
            let res = (|| {
                let c = tilde_transform_closed_real(tf, t)?.value;
                let q = tilde_transform_quadrature(tf, t)?;
                Ok(((q - c) / c).abs())
            })();
            out.push((format!("A={} B={} t={t}", tf.a(), tf.b()), res));
        }
    }
    out
}

fn tr_closed_vs_quad(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for (at, res) in transform_grid(&transform_family(), &[2, 4, 6, 8], &[0.1, 0.5, 1.0, 2.0, 5.0]) {
        match res {
            Ok(d) => r.observe(d, || at),
            Err(e) => r.error(e, || at),
        }
    }
    r.finish(Some(1e-6))
}

/// Exact positivity over the grid `t = j/4`, `j <= 80`, and `t = i tau`, `|tau| <= 7/64`.
pub fn positivity_failures(tf: &TestFunction) -> crate::Result<Vec<String>> {
    let mut bad = Vec::new();
    if !dot_positive_range(tf)? {
        bad.push("holomorphic range".into());
    }
    let mut t2s: Vec<BigRational> = (0..=80).map(|j| rat(j * j, 16)).collect();
    t2s.extend((1..=7).map(|j| -rat(j * j, 64 * 64)));
    for t2 in t2s {
        if !tilde_transform_closed(tf, &t2)?.over_pi.is_positive() {
            bad.push(format!("t^2 = {t2}"));
        }
    }
    Ok(bad)
}

fn tr_positivity(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut fam = transform_family();
    fam.push(TestFunction::new(13, 3).expect("odd pair"));
    for tf in &fam {
        match positivity_failures(tf) {
            Ok(bad) => r.check(bad.is_empty(), || format!("A={} B={}: {bad:?}", tf.a(), tf.b())),
            Err(e) => r.error(e, || format!("A={} B={}", tf.a(), tf.b())),
        }
    }
    r.finish(None)
}

/// Pinned: the decay constant is a property of the fixed family.
pub const ADMISSIBILITY_LIMIT: f64 = 1.0;

fn tr_admissibility(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for tf in &transform_family() {
        match decay_admissibility(tf) {
            Ok(rep) => {
                r.check(rep.value_at_zero.abs() < 1e-12 && rep.derivative_at_zero.abs() < 1e-6, || {
                    format!("A={} B={}: {rep:?}", tf.a(), tf.b())
                });
                r.observe(rep.constant, || format!("A={} B={}", tf.a(), tf.b()));
            }
            Err(e) => r.error(e, || format!("A={} B={}", tf.a(), tf.b())),
        }
    }
    r.finish(Some(ADMISSIBILITY_LIMIT))
}

fn tr_exactness(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for tf in &transform_family() {
        for k in (2..=30).step_by(2) {
            let res = (|| Ok::<_, Error>(dot_transform_closed(tf, k)?.over_pi == dot_transform_closed_reversed(tf, k)?))();
            r.check(res.unwrap_or(false), || format!("A={} B={} k={k}", tf.a(), tf.b()));
        }
    }
    r.finish(None)
}

// ---------------------------------------------------------------- oscillatory

fn os_dirichlet(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for _ in 0..300 {
        let den: i64 = rng.gen_range(1..1_000_000);
        let x = rat(rng.gen_range(0..den), den);
        let h = rat(rng.gen_range(1..100_000), rng.gen_range(1..100));
        let h = if h < rat(1, 1) { rat(1, 1) } else { h };
        match dirichlet_approximate_exact(&x, &h) {
            Ok(a) => r.check(a.satisfies_invariants(&x, &h), || format!("x={x} H={h}")),
            Err(e) => r.error(e, || format!("x={x} H={h}")),
        }
    }
    r.finish(None)
}

fn os_partition(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let p = DyadicPartition::up_to(2f64.powi(31));
    match partition_check(&p, &log_grid(1.0, 2f64.powi(30), 2000)) {
        Ok(rep) => {
            r.instances = 2000;
            r.worst = rep.max_deviation;
        }
        Err(e) => r.error(e, || "grid".into()),
    }
    r.finish(Some(1e-12))
}

/// Largest `|Phi^(j)| T^j` over a grid, by central differences of `Phi`.
pub fn window_derivative_constants(w: &SmoothWindow) -> [f64; 5] {
    let (lo, hi) = w.support();
    let h = 2e-2 * w.t;
    let mut c = [0.0f64; 5];
    let n = 600;
    for i in 0..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let f = |k: f64| w.value(x + k * h);
        let d = [
            f(0.0),
            (f(1.0) - f(-1.0)) / (2.0 * h),
            (f(1.0) - 2.0 * f(0.0) + f(-1.0)) / (h * h),
            (f(2.0) - 2.0 * f(1.0) + 2.0 * f(-1.0) - f(-2.0)) / (2.0 * h.powi(3)),
            (f(2.0) - 4.0 * f(1.0) + 6.0 * f(0.0) - 4.0 * f(-1.0) + f(-2.0)) / h.powi(4),
        ];
        for j in 0..5 {
            c[j] = c[j].max(d[j].abs() * w.t.powi(j as i32));
        }
    }
    c
}

/// Scale invariance: `|Phi^(j)| T^j` may drift by at most this factor across `(Z, T)`.
pub const WINDOW_DRIFT_LIMIT: f64 = 1.001;
/// Pinned: the fourth-derivative constant of the partition shape is about `3.7e5`.
pub const WINDOW_LIMIT: f64 = 1e6;

fn os_window(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut largest = 0.0f64;
    for shape in [Shape::LogBump, Shape::Partition] {
        let mut per_j = [(f64::INFINITY, 0.0f64); 5];
        for (z, t) in [(2.0, 1.0), (2.0, 2.0), (64.0, 8.0), (1e3, 10.0), (1e3, 1e3), (1e5, 37.0)] {
            let c = window_derivative_constants(&SmoothWindow { z, t, shape });
            for j in 0..5 {
                per_j[j].0 = per_j[j].0.min(c[j]);
                per_j[j].1 = per_j[j].1.max(c[j]);
                largest = largest.max(c[j]);
            }
        }
        for (j, (lo, hi)) in per_j.iter().enumerate() {
            r.observe(hi / lo, || format!("j={j} {shape:?}"));
        }
    }
    r.secondary = Some(largest);
    r.check(largest <= WINDOW_LIMIT, || format!("largest constant {largest}"));
    r.finish(Some(WINDOW_DRIFT_LIMIT))
}

pub const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

/// Ratios over `Z in 2^8..2^14`, four frequencies, `T in {16, 64, Z}` with `T ||alpha|| >= 2`.
pub fn decay_sweep(j: u32) -> Vec<(String, crate::Result<f64>)> {
    let alphas = [
        Frequency::Rational { num: 1, den: 2 },
        Frequency::Rational { num: 3, den: 10 },
        Frequency::Rational { num: 1, den: 7 },
        Frequency::Real(GOLDEN_FRACTION),
    ];
    let mut out = Vec::new();
    for e in 8..=14 {
        let z = 2f64.powi(e);
        for a in &alphas {
            for t in [16.0, 64.0, z] {
                if t * a.dist_to_integer() < 2.0 {
                    continue;
                }
                let res = SmoothWindow::new(z, t, Shape::LogBump).and_then(|w| poisson_decay_check(&w, *a, j)).map(|d| d.ratio);
                out.push((format!("j={j} Z={z} T={t} alpha={a:?}"), res));
            }
        }
    }
    out
}

/// Least-squares slope of `log |sum|` against `log T` at `Z = 2^14`, `alpha = 0.3`,
/// over the points above the rounding floor `100 eps Z` of at most `Z` unit-size terms.
pub fn decay_slope() -> crate::Result<(f64, usize)> {
    let z = 2f64.powi(14);
    let alpha = Frequency::Rational { num: 3, den: 10 };
    let mut pts = Vec::new();
    for e in 3..=12 {
        let t = 2f64.powi(e);
        let rep = poisson_decay_check(&SmoothWindow::new(z, t, Shape::LogBump)?, alpha, 2)?;
        if rep.sum_abs > 100.0 * f64::EPSILON * z {
            pts.push((t.ln(), rep.sum_abs.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::Degenerate("too few points above the rounding floor".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx, pts.len()))
}

fn os_decay(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for j in [2, 3] {
        for (at, res) in decay_sweep(j) {
            match res {
                Ok(v) => r.observe(v, || at),
                Err(e) => r.error(e, || at),
            }
        }
    }
    match decay_slope() {
        Ok((s, _)) => {
            r.secondary = Some(s);
            // the steepest required decay is j = 3
            r.check(s <= -3.0 + 0.2, || format!("slope {s}"));
        }
        Err(e) => r.error(e, || "slope".into()),
    }
    r.finish(Some(100.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct VoronoiFits {
    pub instances: usize,
    pub first: f64,
    pub ibp1: f64,
    pub ibp2: f64,
    pub ibp_instances: usize,
}

/// Kernel integrals over a grid of parameters against both size bounds.
pub fn voronoi_fits() -> crate::Result<VoronoiFits> {
    let params = [
        ArchimedeanParameter::holomorphic(2)?,
        ArchimedeanParameter::holomorphic(6)?,
        ArchimedeanParameter::maass(0.0)?,
        ArchimedeanParameter::maass(1.0)?,
        ArchimedeanParameter::maass(3.0)?,
    ];
    let mut f = VoronoiFits { instances: 0, first: 0.0, ibp1: 0.0, ibp2: 0.0, ibp_instances: 0 };
    for p in &params {
        let ts = p.t_star();
        for sign in [Sign::Plus, Sign::Minus] {
            let kern = VoronoiKernel { param: *p, sign };
            for z in [8.0, 32.0, 128.0] {
                for t in [1.0, z / 4.0, z] {
                    let w = SmoothWindow::new(z, t, Shape::LogBump)?;
                    for alpha in [0.25, 1.0, 4.0, 16.0] {
                        let i = voronoi_integral(&w, &kern, alpha)?.abs();
                        let base = z.powf(0.75) * ts / alpha.sqrt();
                        f.instances += 1;
                        f.first = f.first.max(i / base);
                        if alpha * (z / 2.0).sqrt() >= 2.0 * ts {
                            let gain = (z.sqrt() / t + ts / z.sqrt()) / alpha;
                            f.ibp_instances += 1;
                            f.ibp1 = f.ibp1.max(i / (gain * base));
                            f.ibp2 = f.ibp2.max(i / (gain * gain * base));
                        }
                    }
                }
            }
        }
    }
    Ok(f)
}

fn os_vintegral(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    match voronoi_fits() {
        Ok(f) => {
            r.instances = f.instances;
            r.worst = f.first;
            r.worst_at = "size bound".into();
            r.check(f.ibp1 <= 50.0, || format!("one integration by parts: {}", f.ibp1));
            r.check(f.ibp2 <= 50.0, || format!("two integrations by parts: {}", f.ibp2));
            r.instances = f.instances;
            r.secondary = Some(f.ibp1.max(f.ibp2));
        }
        Err(e) => r.error(e, || "grid".into()),
    }
    r.finish(Some(20.0))
}

// ---------------------------------------------------------------- counting

/// Level `N <= 100`, prime or a product of two primes.
fn random_level<R: Rng>(rng: &mut R) -> SquarefreeModulus {
    loop {
        let n: u64 = rng.gen_range(11..=100);
        if let Ok(m) = SquarefreeModulus::new(n) {
            if m.primes().len() <= 2 {
                return m;
            }
        }
    }
}

/// Random quadruple-counting instance with boxes in `[1, 20]` and a Dirichlet
/// approximation of `u/N`.
pub fn random_counting_instance<R: Rng>(rng: &mut R, square: bool) -> crate::Result<CountingInstance> {
    let n = random_level(rng);
    let nv = n.value();
    let u = loop {
        let u = rng.gen_range(1..nv as i64);
        if n.is_coprime(u as i128) {
            break u;
        }
    };
    let (d1, d2) = if square { (1, 1) } else { (rng.gen_range(1..=3), rng.gen_range(1..=3)) };
    let mut b = || (rng.gen_range(1.0f64..20.0) * 4.0).round() / 4.0;
    let (c, s, r1, r2) = (b(), b(), b(), b());
    let h = rng.gen_range(1.0..=nv as f64).floor();
    let inst = CountingInstance::new(c, s, r1, r2, d1, d2, u, n)?;
    inst.with_approximation(h)
}

fn ct_dual(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for i in 0..220 {
        let res = random_counting_instance(&mut rng, i % 2 == 0).and_then(|mut inst| {
            inst.box_cap = cfg.box_cap;
            Ok(enumerate_a(&inst)? == enumerate_a_naive(&inst)?)
        });
        match res {
            Ok(ok) => r.check(ok, || format!("instance {i}")),
            Err(e) => r.error(e, || format!("instance {i}")),
        }
    }
    r.finish(None)
}

fn ct_divisibility(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for i in 0..100 {
        let res = random_counting_instance(&mut rng, false).and_then(|inst| {
            let all = enumerate_a(&inst)?;
            let nv = inst.n.value() as i128;
            Ok(all.iter().all(|q| {
                // independent recomputation with residues reduced first
                let u = (inst.u as i128).rem_euclid(nv);
                let t = (u * u % nv) * ((inst.d1 * inst.d2) as i128 % nv) % nv * (q.c as i128).rem_euclid(nv)
                    + u * ((inst.d1 as i128 * q.r2 as i128 + inst.d2 as i128 * q.r1 as i128).rem_euclid(nv))
                    + q.s as i128;
                t.rem_euclid(nv) == 0
            }))
        });
        match res {
            Ok(ok) => r.check(ok, || format!("instance {i}")),
            Err(e) => r.error(e, || format!("instance {i}")),
        }
    }
    r.finish(None)
}

fn ct_square(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for i in 0..100 {
        let res = random_counting_instance(&mut rng, true).and_then(|inst| {
            let all: BTreeSet<_> = enumerate_a(&inst)?.into_iter().collect();
            let sq = enumerate_a_square(&inst)?;
            let naive: Vec<_> = all.iter().copied().filter(|q| {
                let v = q.s as i128 * q.c as i128 - q.r1 as i128 * q.r2 as i128;
                v >= 0 && {
                    let f = (v as f64).sqrt().round() as i128;
                    (f - 1..=f + 1).any(|g| g >= 0 && g * g == v)
                }
            }).collect();
            Ok(sq.iter().all(|q| all.contains(q) && is_square_quad(q)) && sq == naive)
        });
        match res {
            Ok(ok) => r.check(ok, || format!("instance {i}")),
            Err(e) => r.error(e, || format!("instance {i}")),
        }
    }
    r.finish(None)
}

/// Pinned global constant for both quadruple bounds.
pub const QUADRUPLE_LIMIT: f64 = 1e4;

fn ct_bounds(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for i in 0..240 {
        let square = i % 2 == 1;
        let res = random_counting_instance(&mut rng, square).and_then(|inst| {
            let a = quadruple_bound_check(&inst, Which::Plain)?;
            let b = if square { Some(quadruple_bound_check(&inst, Which::Square)?) } else { None };
            Ok((a, b, inst))
        });
        match res {
            Ok((a, b, inst)) => {
                let at = || format!("N={} u={} C={} S={} R={} R~={} d=({},{})", inst.n.value(), inst.u, inst.c, inst.s, inst.r, inst.r_tilde, inst.d1, inst.d2);
                r.observe(a.ratio, at);
                if let Some(b) = b {
                    r.observe(b.ratio, at);
                }
            }
            Err(e) => r.error(e, || format!("instance {i}")),
        }
    }
    r.finish(Some(QUADRUPLE_LIMIT))
}

fn ct_reduction(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    let mut made = 0;
    while made < 120 {
        let n = random_level(&mut rng);
        let pick = |rng: &mut ChaCha8Rng| loop {
            let l = rng.gen_range(1..=60i64);
            if n.is_coprime(l as i128) {
                break l;
            }
        };
        let (l1, l2) = (pick(&mut rng), pick(&mut rng));
        // c often shares factors with l1, l2
        let c = if rng.gen_bool(0.5) { l1.gcd(&l2) * rng.gen_range(1..=6) } else { rng.gen_range(1..=40) };
        let (d1, d2) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let u = rng.gen_range(0..n.value() as i64);
        let (r1, r2) = (rng.gen_range(5.0..500.0), rng.gen_range(5.0..500.0));
        made += 1;
        let res = CongruenceReductionInstance::new(l1, l2, d1, d2, c, u, n.clone(), r1, r2).and_then(|mut i| {
            i.box_cap = cfg.box_cap;
            count_admissible_a(&i)
        });
        match res {
            Ok(rep) => r.check(rep.clean(), || format!("N={} l=({l1},{l2}) c={c}: {rep:?}", n.value())),
            Err(e) => r.error(e, || format!("N={} c={c}", n.value())),
        }
    }
    r.finish(None)
}

/// Random instances whose entry bound fits in a naive box of side `bound`.
pub fn random_matrix_instances<R: Rng>(rng: &mut R, count: usize, bound: f64) -> Vec<MatrixCountInstance> {
    let mut out = Vec::new();
    while out.len() < count {
        let level = loop {
            if let Ok(m) = SquarefreeModulus::new(rng.gen_range(1..=10)) {
                break m;
            }
        };
        let n = rng.gen_range(1..=20i64);
        let x = rng.gen_range(-0.5..0.5);
        let y = rng.gen_range(0.5..2.0);
        let delta = rng.gen_range(0.0..1.0);
        if let Ok(i) = MatrixCountInstance::new(x, y, n, level, delta) {
            if i.entry_bound() <= bound {
                out.push(i);
            }
        }
    }
    out
}

fn ct_matrices(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for (k, mut inst) in random_matrix_instances(&mut rng, 60, 60.0).into_iter().enumerate() {
        inst.box_cap = cfg.box_cap;
        let res = (|| Ok::<_, Error>(enumerate_r_n_matrices(&inst)? == enumerate_r_n_matrices_naive(&inst, 60)?))();
        match res {
            Ok(ok) => r.check(ok, || format!("instance {k}: {inst:?}")),
            Err(e) => r.error(e, || format!("instance {k}")),
        }
    }
    r.finish(None)
}

fn ct_m0(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for k in 0..200 {
        let level = loop {
            if let Ok(m) = SquarefreeModulus::new(rng.gen_range(1..=30)) {
                break m;
            }
        };
        let n = loop {
            let n = rng.gen_range(1..=500i64);
            if level.is_coprime(n as i128) {
                break n;
            }
        };
        let y = (rng.gen_range(-3.0f64..3.0)).exp();
        let delta = (rng.gen_range(-6.0f64..1.0)).exp();
        let res = MatrixCountInstance::new(rng.gen_range(-0.5..0.5), y, n, level, delta)
            .and_then(|mut i| {
                i.box_cap = cfg.box_cap;
                Ok((matrix_count_split(&i)?, m0_shape(&i), i))
            });
        match res {
            Ok((s, shape, i)) => {
                r.check(s.m == s.m0 + s.mstar, || format!("split {k}"));
                r.observe(s.m0 as f64 / shape, || format!("n={} y={} delta={}", i.n, i.y, i.delta));
            }
            Err(e) => r.error(e, || format!("instance {k}")),
        }
    }
    r.finish(Some(100.0))
}

/// Kernel sums are truncated at `u < 16`; the majorant's tail beyond is `O(T^(1/2) 16^(-1/2))` per matrix.
pub const GEOMETRIC_DELTA_MAX: f64 = 16.0;

fn ct_geometric(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for k in 0..40 {
        let level = loop {
            if let Ok(m) = SquarefreeModulus::new(rng.gen_range(1..=10)) {
                break m;
            }
        };
        let n = loop {
            let n = rng.gen_range(1..=20i64);
            if level.is_coprime(n as i128) {
                break n;
            }
        };
        let x = rng.gen_range(-0.5..0.5);
        let y = rng.gen_range((3f64.sqrt() / 2.0 / level.value() as f64).max(0.2)..3.0);
        for t in [4.0, 16.0, 64.0] {
            match geometric_sum(x, y, n, level.clone(), t, GEOMETRIC_DELTA_MAX) {
                Ok(g) => r.observe(g.ratio, || format!("N={} n={n} z={x}+{y}i T={t}", level.value())),
                Err(e) => r.error(e, || format!("instance {k}")),
            }
        }
    }
    let _ = cfg;
    r.finish(Some(1e3))
}

// ---------------------------------------------------------------- amplifier

fn random_system<R: Rng>(rng: &mut R, limit: u64) -> (HeckeSystem, SquarefreeModulus) {
    let level = squarefree_upto(rng, 1, 1000);
    let chi = random_character(rng, &level);
    (HeckeSystem::sato_tate(chi, limit, rng), level)
}

fn am_diagonal(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for k in 0..50 {
        let l: f64 = rng.gen_range(11.0..400.0);
        let (mut sys, level) = random_system(&mut rng, 900);
        let res = (|| {
            let amp = build_amplifier(&sys, l, &level)?;
            let v = amplifier_diagonal_value(&mut sys, &amp)?;
            let count = amp.lambda1.len() as f64;
            let is = build_is_amplifier(&sys, l, &level)?;
            let w = amplifier_diagonal_value(&mut sys, &is)?;
            let rel = (v - Complex64::new(count, 0.0)).norm() / count.max(1.0);
            let rel_is = (w - Complex64::new(is.lambda1.len() as f64, 0.0)).norm() / (is.lambda1.len() as f64).max(1.0);
            // exact path: rational eigenvalues near the float ones
            let vals: BTreeMap<u64, BigRational> = amp
                .lambda1
                .iter()
                .map(|&p| (p, BigRational::from_float(sys.prime_value(p).map(|c| c.re).unwrap_or(0.0)).unwrap_or_else(BigRational::zero)))
                .collect();
            let exact = amplifier_diagonal_exact(sys.chi(), &vals, &amp.lambda1)?;
            let exact_ok = exact.as_rational() == Some(BigRational::from_integer((amp.lambda1.len() as i64).into()));
            Ok::<_, Error>((rel.max(rel_is), exact_ok, count))
        })();
        match res {
            Ok((rel, exact_ok, count)) => {
                r.observe(rel, || format!("system {k} L={l}"));
                r.check(exact_ok, || format!("exact identity, system {k}"));
                r.check(count >= 1.0, || format!("empty amplifier at L={l}"));
            }
            Err(e) => r.error(e, || format!("system {k}")),
        }
    }
    r.finish(Some(1e-9))
}

fn am_hecke(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for k in 0..10 {
        let (mut sys, level) = random_system(&mut rng, 10_000);
        let chi = sys.chi().clone();
        for _ in 0..30 {
            let draw = |rng: &mut ChaCha8Rng| loop {
                let m = rng.gen_range(1..=10_000u64);
                if level.is_coprime(m as i128) {
                    break m;
                }
            };
            let (m, n) = (draw(&mut rng), draw(&mut rng));
            let res = (|| {
                let lhs = sys.hecke_extend(m)? * sys.hecke_extend(n)?;
                let mut rhs = Complex64::zero();
                for d in divisors(m.gcd(&n)) {
                    rhs += char_eval(&chi, d as i128) * sys.hecke_extend(m / d * (n / d))?;
                }
                Ok::<_, Error>((lhs - rhs).norm() / lhs.norm().max(1.0))
            })();
            match res {
                Ok(d) => r.observe(d, || format!("system {k} m={m} n={n}")),
                Err(e) => r.error(e, || format!("system {k} m={m} n={n}")),
            }
        }
    }
    r.finish(Some(1e-10))
}

fn am_squares(cfg: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    let mut rng = cfg.rng(r.id);
    for k in 0..50 {
        let (sys, level) = random_system(&mut rng, 900);
        let l: f64 = rng.gen_range(4.0..400.0);
        match build_amplifier(&sys, l, &level) {
            Ok(amp) => {
                for p2 in &amp.lambda2 {
                    r.observe((amp.coefficients[p2].norm() - 1.0).abs(), || format!("system {k} l={p2}"));
                }
                r.instances += 1;
            }
            Err(e) => r.error(e, || format!("system {k}")),
        }
    }
    r.finish(Some(1e-15))
}

// ---------------------------------------------------------------- exponents

fn ex_reproduction(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    use Symbol::*;
    let th = crate::arith::theta();
    match final_exponents(&th) {
        Ok(rep) => {
            let mono = |a: BigRational, b: BigRational| ExponentMonomial::power(N, a).with(TStar, b);
            r.check(rep.h == mono(rat(313, 457), rat(-1803, 914)), || format!("H = {}", rep.h));
            r.check(rep.l == mono(rat(64, 457), rat(96, 457)), || format!("L = {}", rep.l));
            r.check(rep.exponent_n == rat(-25, 914), || format!("N exponent {}", rep.exponent_n));
            r.check(rep.exponent_tstar == rat(9979, 1828), || format!("t* exponent {}", rep.exponent_tstar));
            r.check(rep.exponent_n <= rat(-1, 37) && rep.exponent_tstar <= rat(11, 2), || "weaker than stated".into());
            r.check(rep.range_violations.is_empty(), || format!("{:?}", rep.range_violations));
            let second = mono(rat(71, 914), rat(11181, 1828)).with(Q, rat(-1, 2));
            r.check(rep.minor_arc_terms.contains(&second), || "second minor-arc term".into());
            let absorbed = mono(rat(6158, 75405), rat(9979, 1828)).with(Q, rat(-1, 2));
            r.check(rep.minor_arc_absorbed.contains(&absorbed), || "absorbed second term".into());
        }
        Err(e) => r.error(e, || "final_exponents".into()),
    }
    match hybrid_combination() {
        Ok(t2) => {
            r.check(t2.weights == vec![rat(37, 2269), rat(2232, 2269)], || format!("weights {:?}", t2.weights));
            r.check(t2.final_exponent == rat(-1, 2269) && t2.exponent_tstar == rat(-1, 2269), || "hybrid exponent".into());
        }
        Err(e) => r.error(e, || "hybrid_combination".into()),
    }
    r.finish(None)
}

fn ex_zgrid(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    use Symbol::*;
    let th = crate::arith::theta();
    let rep = match final_exponents(&th) {
        Ok(x) => x,
        Err(e) => {
            r.error(e, || "final_exponents".into());
            return r.finish(None);
        }
    };
    let subs: BTreeMap<Symbol, ExponentMonomial> = [(H, rep.h.clone()), (L, rep.l.clone())].into_iter().collect();
    let target = ExponentMonomial::power(N, rep.exponent_n.clone()).with(TStar, rep.exponent_tstar.clone());
    let corners = [rat(0, 1), rat(1, 165)];
    // Z = N^zeta t*^(k tau-fraction) on a refined grid between the endpoints
    for b in [minor_arc_bound(&th), major_arc_bound()] {
        for m in &b.monomials {
            for i in 0..=20 {
                let zeta = rat(9, 10) + rat(i, 200);
                for tz in [rat(0, 1), rat(1, 2), rat(1, 1)] {
                    if zeta > rat(1, 1) && tz.is_zero() {
                        continue;
                    }
                    let z = ExponentMonomial::power(N, zeta.clone()).with(TStar, tz.clone());
                    let mut s = subs.clone();
                    s.insert(Z, z);
                    // q = q0 is extremal whichever sign the q-exponent has
                    s.insert(Q, ExponentMonomial::power(N, rat(1, 3)));
                    let reduced = m.substitute(&s);
                    let ok = corners.iter().all(|tau| match (reduced.log_size(tau), target.log_size(tau)) {
                        (Ok(a), Ok(b)) => a <= b,
                        _ => false,
                    });
                    r.check(ok, || format!("{m} at Z = N^{zeta} t*^{tz}"));
                }
            }
        }
    }
    r.finish(None)
}

fn ex_back(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    use Symbol::*;
    let th = crate::arith::theta();
    let b1 = minor_arc_bound(&th);
    let b2 = major_arc_bound();
    let zs: BTreeMap<_, _> = [(Z, ExponentMonomial::power(N, rat(1, 1)).with(TStar, rat(1, 1)))].into_iter().collect();
    let terms = [b1.monomials[0].substitute(&zs), b1.monomials[2].substitute(&zs), b2.monomials[1].substitute(&zs)];
    match solve_balance(&terms, &[H, L], &[N, TStar]) {
        Ok(s) => {
            let vals: Vec<_> = terms.iter().map(|t| t.substitute(&s)).collect();
            r.check(vals.windows(2).all(|w| w[0] == w[1]), || format!("{vals:?}"));
        }
        Err(e) => r.error(e, || "solve_balance".into()),
    }
    r.finish(None)
}

fn ex_second_moment(_: &SuiteConfig, mut r: Run) -> PropertyOutcome {
    for th in [crate::arith::theta(), rat(0, 1), rat(1, 2)] {
        let b = pointwise_from_second_moment(&amplified_second_moment(&th));
        r.check(b.same_terms(&minor_arc_bound(&th)), || format!("theta = {th}"));
    }
    r.finish(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn globbing() {
        assert!(glob_match("transforms/*", "transforms/positivity"));
        assert!(glob_match("*", "a/b"));
        assert!(glob_match("*/pos*", "transforms/positivity"));
        assert!(!glob_match("counting/*", "transforms/positivity"));
        assert!(glob_match("exact", "exact"));
        assert!(select("nothing/*").is_empty());
    }

    #[test]
    fn ids_are_unique() {
        let ids: BTreeSet<_> = registry().iter().map(|p| p.id).collect();
        assert_eq!(ids.len(), registry().len());
    }
}

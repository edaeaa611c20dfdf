//! Reduction of the off-diagonal amplified sum to the quadruple count: each
//! unit `a` mod `Nc` gives residues `r1, r2` with `r1 r2 + l1 l2 = s c`.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::arith::{centered, factorize, mod_inverse, p_adic_valuation, SquarefreeModulus};
use crate::error::{domain, Error, Result};

#[derive(Debug, Clone)]
pub struct CongruenceReductionInstance {
    pub l1: i64,
    pub l2: i64,
    pub d1: i64,
    pub d2: i64,
    pub c: i64,
    pub u: i64,
    pub n: SquarefreeModulus,
    pub r1_max: f64,
    pub r2_max: f64,
    pub box_cap: u128,
}

impl CongruenceReductionInstance {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        l1: i64,
        l2: i64,
        d1: i64,
        d2: i64,
        c: i64,
        u: i64,
        n: SquarefreeModulus,
        r1_max: f64,
        r2_max: f64,
    ) -> Result<Self> {
        if l1 < 1 || l2 < 1 || d1 < 1 || d2 < 1 || c < 1 {
            return domain("l1, l2, d1, d2, c must be positive");
        }
        if !(r1_max > 0.0 && r2_max > 0.0) {
            return domain("R1, R2 must be positive");
        }
        if (l1 * l2).gcd(&(n.value() as i64)) != 1 {
            return domain("l1 l2 must be coprime to N");
        }
        Ok(Self { l1, l2, d1, d2, c, u, n, r1_max, r2_max, box_cap: super::DEFAULT_BOX_CAP })
    }

    fn modulus(&self) -> i64 {
        self.n.value() as i64 * self.c
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub num_a: usize,
    pub num_rs_pairs: usize,
    pub max_multiplicity: usize,
    pub multiplicity_limit: i64,
    pub congruence_violations: usize,
    pub valuation_violations: usize,
}

impl ReductionReport {
    pub fn clean(&self) -> bool {
        self.congruence_violations == 0
            && self.valuation_violations == 0
            && self.max_multiplicity as i64 <= self.multiplicity_limit
    }
}

/// `v_p(s) >= min(v_p(l1) + v_p(l2) - v_p(c), v_p(l1), v_p(l2), v_p(c))` at every `p | c`.
pub fn valuation_inequality_holds(s: i128, l1: i64, l2: i64, c: i64) -> Result<bool> {
    if s == 0 {
        return Ok(true);
    }
    for (p, _) in factorize(c as u64) {
        let vs = p_adic_valuation(s, p)? as i64;
        let v1 = p_adic_valuation(l1 as i128, p)? as i64;
        let v2 = p_adic_valuation(l2 as i128, p)? as i64;
        let vc = p_adic_valuation(c as i128, p)? as i64;
        if vs < (v1 + v2 - vc).min(v1).min(v2).min(vc) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn count_admissible_a(inst: &CongruenceReductionInstance) -> Result<ReductionReport> {
    let m = inst.modulus();
    if m as u128 > inst.box_cap {
        return Err(Error::ResourceCap { what: "residues mod Nc".into(), needed: m as u128, cap: inst.box_cap });
    }
    let (mm, c) = (m as i128, inst.c as i128);
    let (l1, l2) = (inst.l1 as i128, inst.l2 as i128);
    let uc1 = inst.d1 as i128 * inst.u as i128 * c;
    let uc2 = inst.d2 as i128 * inst.u as i128 * c;
    let mut pairs: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let (mut num_a, mut cong_bad, mut vps_bad) = (0, 0, 0);
    for a in 0..m {
        if a.gcd(&m) != 1 {
            continue;
        }
        let abar = mod_inverse(a, m as u64)? as i128;
        let r1 = centered(l1 * abar - uc1, mm) as i64;
        let r2 = centered(-l2 * a as i128 - uc2, mm) as i64;
        if (r1 as f64).abs() > inst.r1_max || (r2 as f64).abs() > inst.r2_max {
            continue;
        }
        num_a += 1;
        *pairs.entry((r1, r2)).or_default() += 1;
        let lhs = (uc1 + r1 as i128) * (uc2 + r2 as i128) + l1 * l2;
        if lhs.rem_euclid(mm) != 0 {
            cong_bad += 1;
        }
        let num = r1 as i128 * r2 as i128 + l1 * l2;
        if num.rem_euclid(c) != 0 || !valuation_inequality_holds(num / c, inst.l1, inst.l2, inst.c)? {
            vps_bad += 1;
        }
    }
    Ok(ReductionReport {
        num_a,
        num_rs_pairs: pairs.len(),
        max_multiplicity: pairs.values().copied().max().unwrap_or(0),
        multiplicity_limit: inst.c.gcd(&inst.l1).gcd(&inst.l2),
        congruence_violations: cong_bad,
        valuation_violations: vps_bad,
    })
}

//! Integer echelon bases of spanning families, and the distinguished forms
//! built from them: the weight 2 forms `H_m = q^-m + O(q^2)` (level 27) or
//! `q^-m + O(q^3)` (level 36), and the weight 0 functions `psi_p` with a single
//! pole of order `p` at infinity.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::is_prime;
use crate::error::{Error, Result};
use crate::eta::{auxiliary_quotient, catalog_form, EtaQuotient, Form};
use crate::qseries::QSeries;

/// Rows with strictly increasing leading exponents and leading coefficient 1,
/// fully reduced: each row vanishes at the pivot exponents of all other rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonBasis {
    rows: Vec<QSeries>,
}

impl EchelonBasis {
    pub fn rows(&self) -> &[QSeries] {
        &self.rows
    }

    pub fn pivots(&self) -> Vec<i64> {
        self.rows.iter().map(QSeries::order).collect()
    }

    pub fn row(&self, pivot: i64) -> Option<&QSeries> {
        self.rows.iter().find(|r| r.order() == pivot)
    }
}

/// Integer Gaussian elimination with unit pivots, from the most negative
/// leading exponent upward, followed by back-substitution.
///
/// Members sharing a leading exponent are combined by the Euclidean algorithm
/// on their leading coefficients, so the result does not depend on the input
/// order. Members that reduce to zero (within their precision) are dropped; a
/// pivot whose leading coefficient is not `+-1` is an error.
pub fn echelonize(family: &[QSeries]) -> Result<EchelonBasis> {
    let mut pending: Vec<QSeries> = family.to_vec();
    let mut rows: BTreeMap<i64, QSeries> = BTreeMap::new();
    loop {
        pending.retain(|f| !f.is_zero());
        let Some(e) = pending.iter().map(QSeries::order).min() else {
            break;
        };
        let (mut at_e, rest): (Vec<QSeries>, Vec<QSeries>) =
            pending.drain(..).partition(|f| f.order() == e);
        pending = rest;
        if let Some(row) = rows.get(&e) {
            for f in at_e {
                let lead = f.leading_coefficient().cloned().unwrap_or_default();
                pending.push(f.sub(&row.scale(&lead)));
            }
            continue;
        }
        while at_e.len() > 1 {
            at_e.sort_by_key(|f| f.leading_coefficient().map(|c| c.abs()));
            let pivot = at_e.swap_remove(0);
            let lead = pivot.leading_coefficient().cloned().unwrap_or_default();
            let mut next = vec![pivot.clone()];
            for f in at_e.drain(..) {
                let q = f.leading_coefficient().cloned().unwrap_or_default() / &lead;
                let r = f.sub(&pivot.scale(&q));
                if !r.is_zero() && r.order() == e {
                    next.push(r);
                } else {
                    pending.push(r);
                }
            }
            at_e = next;
        }
        let mut f = at_e.pop().expect("at least one member at the minimal exponent");
        let lead = f.leading_coefficient().cloned().unwrap_or_default();
        if !lead.abs().is_one() {
            return Err(Error::Elimination { exponent: e, pivot: lead.to_string() });
        }
        if lead.is_negative() {
            f = -&f;
        }
        rows.insert(e, f);
    }

    let pivots: Vec<i64> = rows.keys().copied().collect();
    for (i, &e) in pivots.iter().enumerate() {
        let mut row = rows[&e].clone();
        for &higher in &pivots[i + 1..] {
            if higher >= row.prec() {
                break;
            }
            let c = row.coefficient(higher)?;
            if !c.is_zero() {
                row = row.sub(&rows[&higher].scale(&c));
            }
        }
        rows.insert(e, row);
    }
    Ok(EchelonBasis { rows: rows.into_values().collect() })
}

fn require_level(level: u64) -> Result<()> {
    match level {
        27 | 36 => Ok(()),
        _ => Err(Error::InvalidArgument(format!("spanning families exist for levels 27 and 36, not {level}"))),
    }
}

fn check_holomorphic(eq: &EtaQuotient, level: u64) -> Result<()> {
    if eq.holomorphic_away_from_infinity(level)? {
        Ok(())
    } else {
        Err(Error::Unconstructible(format!("generator {eq} has a pole at a finite cusp of level {level}")))
    }
}

/// `L(2z)` as an eta quotient of level 36.
fn l36_doubled() -> EtaQuotient {
    auxiliary_quotient(Form::L36).expect("catalog form").rescale(2)
}

/// The forms `g L1^d`, `g L1^d L2` (level 27) or `g L(2z)^d` (level 36) whose
/// leading exponent is at least `-max_pole`, each known to precision `prec`.
pub fn spanning_family(level: u64, max_pole: i64, prec: i64) -> Result<Vec<QSeries>> {
    require_level(level)?;
    let min_prec = if level == 27 { 2 } else { 3 };
    if prec < min_prec {
        return Err(Error::InvalidArgument(format!("level {level} families need prec >= {min_prec}")));
    }
    let gen_prec = prec + max_pole.max(0) + 1;
    let g = catalog_form(Form::Newform(level), gen_prec)?;
    let (step, extra) = if level == 27 {
        let l1 = auxiliary_quotient(Form::L1).expect("catalog form");
        let l2 = auxiliary_quotient(Form::L2).expect("catalog form");
        check_holomorphic(&l1, 27)?;
        check_holomorphic(&l2, 27)?;
        (l1.expand(gen_prec)?, Some(l2.expand(gen_prec)?))
    } else {
        let l = l36_doubled();
        check_holomorphic(&l, 36)?;
        (l.expand(gen_prec)?, None)
    };

    let mut family = Vec::new();
    let mut keep = |f: QSeries| -> Result<bool> {
        if f.order() < -max_pole {
            return Ok(false);
        }
        if f.prec() < prec {
            return Err(Error::InsufficientPrecision { needed: prec, available: f.prec() });
        }
        family.push(f.truncate(prec));
        Ok(true)
    };
    let mut cur = g;
    loop {
        let mut any = keep(cur.clone())?;
        if let Some(l2) = &extra {
            any |= keep(cur.mul(l2))?;
        }
        if !any {
            break;
        }
        cur = cur.mul(&step);
    }
    Ok(family)
}

/// The unique `H_m` with integer coefficients and principal part `q^-m`:
/// `q^-m + O(q^2)` at level 27 (`m >= -1`, `m != 0`) and `q^-m + O(q^3)` at
/// level 36 (`m >= -1` odd).
pub fn build_h(level: u64, m: i64, prec: i64) -> Result<QSeries> {
    require_level(level)?;
    let valid = match level {
        27 => m >= -1 && m != 0,
        _ => m >= -1 && m % 2 != 0,
    };
    if !valid {
        return Err(Error::Unconstructible(format!("H_{m} at level {level}")));
    }
    let zero_through = if level == 27 { 1 } else { 2 };
    let basis = echelonize(&spanning_family(level, m.max(1), prec)?)?;
    let h = basis
        .row(-m)
        .ok_or_else(|| Error::Unconstructible(format!("H_{m} at level {level}: no pivot at q^{}", -m)))?
        .truncate(prec);
    for e in (-m + 1)..=zero_through.min(prec - 1) {
        if !h.coefficient(e)?.is_zero() {
            return Err(Error::Unconstructible(format!(
                "H_{m} at level {level}: nonzero coefficient at q^{e}"
            )));
        }
    }
    Ok(h)
}

/// `psi_2 = L(2z) = q^-2 + O(q^4)` and `psi_3 = L(z) L(2z) - 1 = q^-3 + O(q^3)`,
/// the level 36 functions from which every `psi_p` is built.
pub fn level36_generators(prec: i64) -> Result<(QSeries, QSeries)> {
    let psi2 = l36_doubled().expand(prec)?;
    let l = catalog_form(Form::L36, prec)?;
    let psi3 = l.mul(&psi2).sub(&QSeries::one(prec));
    Ok((psi2, psi3))
}

/// A weight 0 function `psi_p = q^-p + c q + O(q^4)` (level 27) or
/// `q^-p + c q + O(q^7)` (level 36).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Psi {
    pub series: QSeries,
    /// The coefficient `c` of `q`.
    pub q_coefficient: BigInt,
}

/// Builds `psi_p` as an integer polynomial in `L1, L2` (level 27, `p = 2 mod 3`)
/// or in `psi_2 = L(2z)`, `psi_3 = L(z) L(2z) - 1` (level 36, `p = 5 mod 6`).
pub fn build_psi(level: u64, p: u64, prec: i64) -> Result<Psi> {
    require_level(level)?;
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let (class_ok, gap) = match level {
        27 => (p % 3 == 2, 4),
        _ => (p % 6 == 5, 7),
    };
    if !class_ok {
        return Err(Error::Unconstructible(format!("psi_{p} at level {level}: wrong residue class")));
    }
    let pole = p as i64;
    let gen_prec = prec.max(2) + pole + 2;
    let (x, y) = if level == 27 {
        (
            auxiliary_quotient(Form::L1).expect("catalog form").expand(gen_prec)?,
            auxiliary_quotient(Form::L2).expect("catalog form").expand(gen_prec)?,
        )
    } else {
        level36_generators(gen_prec)?
    };

    // Monomials x^a y^b have a pole of order 2a + 3b. Keep the one with the
    // smallest `a` for each pole order in the residue class of -p.
    let admissible = |a: i64, b: i64| match level {
        27 => a % 3 == 1,
        _ => a % 3 == 1 && b % 2 == 1,
    };
    let mut by_pole: BTreeMap<i64, (i64, i64)> = BTreeMap::new();
    for a in 0..=pole / 2 {
        for b in 0..=(pole - 2 * a) / 3 {
            if admissible(a, b) {
                by_pole.entry(2 * a + 3 * b).or_insert((a, b));
            }
        }
    }
    let mut family = Vec::with_capacity(by_pole.len());
    for &(a, b) in by_pole.values() {
        family.push(x.pow(a)?.mul(&y.pow(b)?));
    }
    let basis = echelonize(&family)?;
    let series = basis
        .row(-pole)
        .ok_or_else(|| Error::Unconstructible(format!("psi_{p} at level {level}: no pivot at q^-{p}")))?
        .clone();
    if series.prec() < prec {
        return Err(Error::InsufficientPrecision { needed: prec, available: series.prec() });
    }
    let series = series.truncate(prec);
    for e in (-pole + 1)..gap.min(prec) {
        if e != 1 && !series.coefficient(e)?.is_zero() {
            return Err(Error::Unconstructible(format!(
                "psi_{p} at level {level}: nonzero coefficient at q^{e}"
            )));
        }
    }
    let q_coefficient = if prec > 1 { series.coefficient(1)? } else { BigInt::zero() };
    Ok(Psi { series, q_coefficient })
}

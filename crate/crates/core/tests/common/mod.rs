//! Independent oracles and property runners shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use qmod_core::eta::{curves, EtaQuotient};
use qmod_core::operators::{apply_u, apply_v, jacobi, kronecker, theta};
use qmod_core::spans::{build_h, echelonize, spanning_family};
use qmod_core::verify::support_lattice;
use qmod_core::{catalog_form, Form, QSeries};

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

pub fn series(entries: &[(i64, i64)], prec: i64) -> QSeries {
    QSeries::new(entries.iter().copied(), prec).unwrap()
}

/// Small random Laurent series.
pub fn arb_series() -> impl Strategy<Value = QSeries> {
    (-4i64..4, prop::collection::vec(-9i64..10, 0..10), 0i64..4).prop_map(|(start, cs, slack)| {
        let prec = start + cs.len() as i64 + slack;
        QSeries::new(cs.iter().enumerate().map(|(i, &c)| (start + i as i64, c)), prec).unwrap()
    })
}

/// Series with leading coefficient 1 or -1.
pub fn arb_unit_series() -> impl Strategy<Value = QSeries> {
    (-4i64..4, prop::bool::ANY, prop::collection::vec(-9i64..10, 0..10), 1i64..4).prop_map(
        |(start, neg, cs, slack)| {
            let lead = if neg { -1 } else { 1 };
            let prec = start + cs.len() as i64 + slack + 1;
            let entries = std::iter::once((start, lead))
                .chain(cs.iter().enumerate().map(|(i, &c)| (start + 1 + i as i64, c)));
            QSeries::new(entries, prec).unwrap()
        },
    )
}

/// Both series agree below their common precision.
pub fn agree(a: &QSeries, b: &QSeries) -> bool {
    let p = a.prec().min(b.prec());
    a.truncate(p) == b.truncate(p)
}

/// Schoolbook product with the truncation rule written out directly.
pub fn naive_mul(f: &QSeries, g: &QSeries) -> QSeries {
    let prec = (f.prec() + g.order()).min(g.prec() + f.order());
    let mut acc: BTreeMap<i64, BigInt> = BTreeMap::new();
    for (a, x) in f.terms() {
        for (b, y) in g.terms() {
            *acc.entry(a + b).or_default() += x * y;
        }
    }
    QSeries::new(acc.into_iter().filter(|(e, _)| *e < prec), prec).unwrap()
}

/// `prod_{n >= 1} (1 - x^n)` to `x^bound`, multiplying factor by factor.
pub fn naive_euler_product(bound: usize) -> Vec<BigInt> {
    let mut poly = vec![BigInt::zero(); bound];
    poly[0] = BigInt::one();
    for n in 1..bound {
        for i in (n..bound).rev() {
            let t = poly[i - n].clone();
            poly[i] -= t;
        }
    }
    poly
}

/// Naive expansion of `prod eta(delta z)^r` with integral shift, to `prec`.
pub fn naive_eta_quotient(factors: &[(usize, i64)], prec: i64) -> QSeries {
    let shift: i64 = factors.iter().map(|&(d, r)| d as i64 * r).sum::<i64>() / 24;
    let len = (prec - shift).max(0) as usize;
    let mut poly = vec![BigInt::zero(); len];
    if len > 0 {
        poly[0] = BigInt::one();
    }
    for &(d, r) in factors {
        for _ in 0..r.unsigned_abs() {
            for n in 1.. {
                let step = n * d;
                if step >= len {
                    break;
                }
                if r > 0 {
                    for i in (step..len).rev() {
                        let t = poly[i - step].clone();
                        poly[i] -= t;
                    }
                } else {
                    // divide by (1 - x^step): a running sum.
                    for i in step..len {
                        let t = poly[i - step].clone();
                        poly[i] += t;
                    }
                }
            }
        }
    }
    QSeries::new(poly.into_iter().enumerate().map(|(i, c)| (shift + i as i64, c)), prec).unwrap()
}

fn pow_mod(mut b: i64, mut e: i64, m: i64) -> i64 {
    let mut r = 1i64;
    b = b.rem_euclid(m);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// Kronecker symbol from its definition: factor `n`, Euler's criterion at odd
/// primes, the mod 8 rule at 2, the sign rule at -1.
pub fn kronecker_brute(d: i64, n: i64) -> i8 {
    if n == 0 {
        return i8::from(d.abs() == 1);
    }
    let mut result = if n < 0 && d < 0 { -1 } else { 1 };
    let mut n = n.abs();
    let mut q = 2;
    while n > 1 {
        if q * q > n {
            q = n;
        }
        while n % q == 0 {
            n /= q;
            let s = if q == 2 {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                match pow_mod(d, (q - 1) / 2, q) {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                }
            };
            result *= s;
        }
        q += 1;
    }
    result
}

pub type Outcome = Result<(), String>;

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Outcome {
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn prop_ring_laws(cases: u32) -> Outcome {
    run(cases, (arb_series(), arb_series(), arb_series()), |(f, g, h)| {
        prop_assert_eq!(f.add(&g), g.add(&f));
        prop_assert_eq!(f.mul(&g), g.mul(&f));
        prop_assert_eq!(f.mul(&g), naive_mul(&f, &g));
        prop_assert!(agree(&f.mul(&g).mul(&h), &f.mul(&g.mul(&h))));
        prop_assert!(agree(&f.mul(&g.add(&h)), &f.mul(&g).add(&f.mul(&h))));
        prop_assert!(f.sub(&f).is_zero());
        prop_assert_eq!(f.mul(&QSeries::one(f.prec().max(1) + 8)).truncate(f.prec()), f.clone());
        Ok(())
    })
}

pub fn prop_invert_round_trip(cases: u32) -> Outcome {
    run(cases, arb_unit_series(), |f| {
        let inv = f.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(inv.prec(), f.prec() - 2 * f.order());
        let one = f.mul(&inv);
        prop_assert_eq!(one.clone(), QSeries::one(one.prec()));
        let back = inv.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(agree(&back, &f));
        Ok(())
    })
}

pub fn prop_u_v_sections(cases: u32) -> Outcome {
    run(cases, (arb_series(), 1u64..6), |(f, m)| {
        prop_assert_eq!(apply_u(&apply_v(&f, m), m), f.clone());
        let proj = apply_v(&apply_u(&f, m), m);
        for e in f.order().min(proj.prec())..proj.prec() {
            let expected = if e.rem_euclid(m as i64) == 0 { f.coefficient(e).unwrap() } else { BigInt::zero() };
            prop_assert_eq!(proj.coefficient(e).unwrap(), expected);
        }
        let mn = m + 1;
        prop_assert_eq!(apply_u(&apply_u(&f, m), mn), apply_u(&f, m * mn));
        Ok(())
    })
}

pub fn prop_theta_leibniz(cases: u32) -> Outcome {
    run(cases, (arb_series(), arb_series()), |(f, g)| {
        let lhs = theta(&f.mul(&g));
        let rhs = theta(&f).mul(&g).add(&f.mul(&theta(&g)));
        prop_assert!(agree(&lhs, &rhs));
        Ok(())
    })
}

/// The pentagonal expansion of `eta(24z)` against a factor-by-factor product,
/// and two eta quotients against naive expansions.
pub fn pentagonal_oracle(bound: usize) -> Outcome {
    let naive = naive_euler_product(bound);
    let eta24 = EtaQuotient::new(&[(24, 1)], 24).map_err(|e| e.to_string())?;
    let prec = 24 * bound as i64;
    let fast = eta24.expand(prec).map_err(|e| e.to_string())?;
    for (n, c) in naive.iter().enumerate() {
        let e = 1 + 24 * n as i64;
        if e >= prec {
            break;
        }
        if fast.coefficient(e).unwrap() != *c {
            return Err(format!("eta(24z) differs at q^{e}"));
        }
    }
    if fast.terms().any(|(e, _)| (e - 1) % 24 != 0) {
        return Err("eta(24z) has support off 1 mod 24".into());
    }
    for (factors, level, p) in [
        (vec![(3usize, 2i64), (9, 2)], 27u64, 400i64),
        (vec![(3, 1), (9, 6), (27, -3)], 27, 400),
        (vec![(4, -2), (8, 8), (16, -2)], 64, 300),
    ] {
        let signed: Vec<(u64, i64)> = factors.iter().map(|&(d, r)| (d as u64, r)).collect();
        let fast = EtaQuotient::new(&signed, level).unwrap().expand(p).map_err(|e| e.to_string())?;
        if fast != naive_eta_quotient(&factors, p) {
            return Err(format!("eta quotient {factors:?} differs from the naive product"));
        }
    }
    Ok(())
}

pub fn kronecker_oracle(n_max: i64) -> Outcome {
    for d in (-40i64..=40).chain([-163, -84, 120, 1001]) {
        for n in -60..=n_max {
            let (fast, slow) = (kronecker(d, n), kronecker_brute(d, n));
            if fast != slow {
                return Err(format!("({d} | {n}): got {fast}, brute force {slow}"));
            }
        }
    }
    for n in (1..=n_max).step_by(2) {
        for a in [-7i64, -3, -1, 2, 5, 6, 10, 13, 9999] {
            if i64::from(jacobi(a, n)) != i64::from(kronecker_brute(a, n)) {
                return Err(format!("jacobi({a}, {n}) disagrees"));
            }
        }
    }
    Ok(())
}

/// Exponents of every catalog `g_N` and `G_N` lie in the expected classes.
pub fn support_oracle(prec: i64) -> Outcome {
    for c in curves() {
        let (modulus, g_class, big_g_class) = support_lattice(c.level);
        for (form, class) in [(Form::Newform(c.level), g_class), (Form::MockDerivative(c.level), big_g_class)] {
            let f = catalog_form(form, prec).map_err(|e| e.to_string())?;
            if let Some((e, _)) = f.terms().find(|(e, _)| e.rem_euclid(modulus) != class) {
                return Err(format!("{form} has a term at q^{e}, outside {class} mod {modulus}"));
            }
            if f.leading_coefficient() != Some(&BigInt::one()) {
                return Err(format!("{form} is not normalized"));
            }
        }
    }
    Ok(())
}

/// `H_m` does not depend on the order of the spanning family.
pub fn prop_h_uniqueness(cases: u32) -> Outcome {
    const PREC: i64 = 30;
    for (level, ms) in [(27u64, vec![-1i64, 1, 2, 4, 5]), (36, vec![-1, 1, 5, 7])] {
        for m in ms {
            let family = spanning_family(level, m.max(1), PREC).map_err(|e| e.to_string())?;
            let h = build_h(level, m, PREC).map_err(|e| e.to_string())?;
            run(cases, Just(family).prop_shuffle(), |fam| {
                let basis = echelonize(&fam).map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(basis.row(-m), Some(&h));
                Ok(())
            })
            .map_err(|e| format!("H_{m} at level {level}: {e}"))?;
        }
    }
    Ok(())
}

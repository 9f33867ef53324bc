//! Small integer helpers shared by the series and verification code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Deterministic trial-division primality test. Only small primes occur here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// `base^exp` as an `i64`, or `None` on overflow.
pub fn checked_pow(base: u64, exp: u32) -> Option<i64> {
    let v = base.checked_pow(exp)?;
    i64::try_from(v).ok()
}

/// p-adic valuation of a nonzero integer; `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Some(v);
        }
        n = q;
        v += 1;
    }
}

/// `n mod m` in `[0, m)`.
pub fn modulo(n: &BigInt, m: &BigInt) -> BigInt {
    n.mod_floor(m)
}

pub fn big_pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub fn sign_pow(e: u32) -> BigInt {
    if e.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Ceiling division for a possibly negative numerator and positive divisor.
pub fn ceil_div(n: i64, d: i64) -> i64 {
    debug_assert!(d > 0);
    n.div_euclid(d) + i64::from(n.rem_euclid(d) != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_prime(1));
        assert!(is_prime(4913 / 289));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&BigInt::from(-24), 2), Some(3));
        assert_eq!(valuation(&BigInt::from(7), 2), Some(0));
        assert_eq!(valuation(&BigInt::zero(), 5), None);
    }

    #[test]
    fn ceil_division() {
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(6, 2), 3);
        assert_eq!(ceil_div(-3, 2), -1);
        assert_eq!(ceil_div(-4, 2), -2);
        assert_eq!(ceil_div(0, 5), 0);
    }
}

//! Operators on q-expansions: `U_m`, `V_m`, `Theta = q d/dq`, prime-power Hecke
//! operators, and twists by Kronecker characters.

use num_bigint::BigInt;

use crate::arith::{big_pow, ceil_div, checked_pow, is_prime};
use crate::error::{Error, Result};
use crate::qseries::QSeries;

/// `sum a(n) q^n -> sum a(mn) q^n`. Precision becomes `ceil(prec / m)`.
pub fn apply_u(f: &QSeries, m: u64) -> QSeries {
    assert!(m > 0, "U_m needs m > 0");
    let m = i64::try_from(m).expect("U index overflow");
    let prec = ceil_div(f.prec(), m);
    f.reindex(prec, |e| (e % m == 0).then(|| e / m))
}

/// `sum a(n) q^n -> sum a(n) q^(mn)`. Precision becomes `m (prec - 1) + 1`.
pub fn apply_v(f: &QSeries, m: u64) -> QSeries {
    apply_v_capped(f, m, i64::MAX)
}

/// `V_m` with the result truncated to at most `cap`.
fn apply_v_capped(f: &QSeries, m: u64, cap: i64) -> QSeries {
    assert!(m > 0, "V_m needs m > 0");
    let m = i64::try_from(m).expect("V index overflow");
    let full = (f.prec() - 1)
        .checked_mul(m)
        .and_then(|x| x.checked_add(1))
        .expect("q-exponent overflow");
    let prec = full.min(cap);
    f.reindex(prec, |e| Some(e.checked_mul(m).expect("q-exponent overflow")))
}

/// `Theta = q d/dq`: `a(e) -> e a(e)`.
pub fn theta(f: &QSeries) -> QSeries {
    f.map_terms(|e, c| c * e)
}

/// Weight `k` Hecke operator of prime-power index,
/// `f | T_k(p^n) = sum_{j=0}^{n} p^((k-1)j) f | U(p^(n-j)) | V(p^j)`.
///
/// The precision is the minimum over the terms, which for any useful input
/// is `ceil(prec / p^n)`.
pub fn hecke(f: &QSeries, k: u32, p: u64, n: u32) -> Result<QSeries> {
    if k == 0 {
        return Err(Error::InvalidArgument("Hecke weight must be at least 1".into()));
    }
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("Hecke index exponent must be at least 1".into()));
    }
    let pow = |e: u32| {
        checked_pow(p, e).ok_or_else(|| Error::InvalidArgument(format!("{p}^{e} overflows")))
    };
    let mut target = i64::MAX;
    for j in 0..=n {
        let u_prec = ceil_div(f.prec(), pow(n - j)?);
        let v_prec = (u_prec - 1).saturating_mul(pow(j)?).saturating_add(1);
        target = target.min(v_prec);
    }
    let mut acc = QSeries::zero(target);
    for j in 0..=n {
        let term = apply_v_capped(&apply_u(f, pow(n - j)? as u64), pow(j)? as u64, target);
        let scalar = big_pow(p, (k - 1) * j);
        acc = acc.add(&term.scale(&scalar));
    }
    Ok(acc)
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> i8 {
    assert!(n > 0 && n % 2 == 1, "Jacobi symbol needs odd positive modulus");
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(d | n)`.
pub fn kronecker(d: i64, n: i64) -> i8 {
    if n == 0 {
        return i8::from(d == 1 || d == -1);
    }
    let mut result = 1i8;
    let mut n = n;
    if n < 0 {
        n = n.checked_neg().expect("kronecker modulus overflow");
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(d, n)
}

/// The character `n -> (D | n)` attached to a discriminant `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KroneckerCharacter {
    disc: i64,
}

impl KroneckerCharacter {
    pub fn new(disc: i64) -> Result<Self> {
        if disc == 0 || !matches!(disc.rem_euclid(4), 0 | 1) {
            return Err(Error::UnsupportedDiscriminant(disc));
        }
        Ok(KroneckerCharacter { disc })
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn value(&self, n: i64) -> i8 {
        kronecker(self.disc, n)
    }

    /// `f (x) chi`: `a(e) -> chi(e) a(e)` at every exponent, negative ones included.
    pub fn twist(&self, f: &QSeries) -> QSeries {
        f.map_terms(|e, c| match self.value(e) {
            1 => c.clone(),
            -1 => -c,
            _ => BigInt::default(),
        })
    }
}

/// Twist by the Kronecker symbol of discriminant `disc`.
pub fn twist(f: &QSeries, disc: i64) -> QSeries {
    KroneckerCharacter { disc }.twist(f)
}

/// Whether `p` is inert in Q(sqrt -3) (`cm_disc = -3`) or Q(i) (`cm_disc = -4`).
/// Ramified primes are not inert.
pub fn is_inert(p: u64, cm_disc: i64) -> Result<bool> {
    match cm_disc {
        -3 => Ok(p % 3 == 2),
        -4 => Ok(p % 4 == 3),
        d => Err(Error::UnsupportedDiscriminant(d)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn s(entries: &[(i64, i64)], prec: i64) -> QSeries {
        QSeries::new(entries.iter().copied(), prec).unwrap()
    }

    #[test]
    fn u_operator() {
        let f = s(&[(-2, 1), (3, 7), (4, 3)], 6);
        assert_eq!(apply_u(&f, 2), s(&[(-1, 1), (2, 3)], 3));
        assert_eq!(apply_u(&f, 1), f);
        // negative precision rounds up
        assert_eq!(apply_u(&s(&[(-6, 1)], -3), 2), s(&[(-3, 1)], -1));
    }

    #[test]
    fn v_operator() {
        assert_eq!(apply_v(&s(&[(1, 1)], 2), 3), s(&[(3, 1)], 4));
        let f = s(&[(-1, 2), (0, 1), (2, -5)], 4);
        assert_eq!(apply_u(&apply_v(&f, 5), 5), f);
    }

    #[test]
    fn theta_operator() {
        assert_eq!(theta(&s(&[(-3, 1)], 2)), s(&[(-3, -3)], 2));
        assert!(theta(&s(&[(0, 9)], 4)).is_zero());
        assert_eq!(theta(&s(&[(0, 9)], 4)).prec(), 4);
    }

    #[test]
    fn hecke_index_p_closed_form() {
        let f = s(&[(-1, 1), (2, -1), (5, 4), (6, 3), (8, -7), (10, 2), (12, 1)], 13);
        let t = hecke(&f, 2, 2, 1).unwrap();
        assert_eq!(t.prec(), 7);
        for e in -1..7 {
            let mut expected = f.coefficient(2 * e).unwrap();
            if e % 2 == 0 {
                expected += f.coefficient(e / 2).unwrap() * 2;
            }
            assert_eq!(t.coefficient(e).unwrap(), expected, "e = {e}");
        }
    }

    #[test]
    fn hecke_argument_errors() {
        let f = s(&[(1, 1)], 10);
        assert!(hecke(&f, 0, 2, 1).is_err());
        assert!(hecke(&f, 2, 4, 1).is_err());
        assert!(hecke(&f, 2, 2, 0).is_err());
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(8, 1), 1);
        assert_eq!(kronecker(8, 2), 0);
        assert_eq!(kronecker(8, 3), -1);
        assert_eq!(kronecker(8, 7), 1);
        assert_eq!(kronecker(12, 5), -1);
        assert_eq!(kronecker(8, -1), 1);
        assert_eq!(kronecker(12, -1), 1);
        assert_eq!(kronecker(-4, -1), -1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(8, 0), 0);
    }

    #[test]
    fn twisting() {
        assert_eq!(twist(&s(&[(1, 1), (5, -2)], 6), 8), s(&[(1, 1), (5, 2)], 6));
        assert!(twist(&QSeries::zero(7), 8).is_zero());
        let f = s(&[(-1, 1), (1, 3), (2, 4), (3, -1), (4, 9)], 5);
        let back = twist(&twist(&f, 8), 8);
        assert_eq!(back, s(&[(-1, 1), (1, 3), (3, -1)], 5));
        assert!(KroneckerCharacter::new(7).is_err());
        assert_eq!(KroneckerCharacter::new(12).unwrap().value(11), 1);
    }

    #[test]
    fn inert_primes() {
        assert!(is_inert(3, -4).unwrap());
        assert!(!is_inert(5, -4).unwrap());
        assert!(!is_inert(2, -4).unwrap());
        assert!(is_inert(2, -3).unwrap());
        assert!(!is_inert(3, -3).unwrap());
        assert!(is_inert(11, -3).unwrap());
        assert_eq!(is_inert(5, -7), Err(Error::UnsupportedDiscriminant(-7)));
    }

    #[test]
    fn u_then_v_projects_onto_multiples() {
        let f = s(&[(-4, 1), (-3, 2), (0, 5), (3, 1), (6, -2), (7, 1)], 8);
        let proj = apply_v(&apply_u(&f, 3), 3);
        assert_eq!(proj.prec(), 7);
        for e in -4..7 {
            let expected = if e % 3 == 0 { f.coefficient(e).unwrap() } else { BigInt::zero() };
            assert_eq!(proj.coefficient(e).unwrap(), expected);
        }
    }
}

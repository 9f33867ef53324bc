//! Truncated Laurent series in `q` with exact integer coefficients.
//!
//! A [`QSeries`] is `f = sum_{e < prec} a(e) q^e + O(q^prec)`: every coefficient
//! below `prec` is known exactly, nothing at or above it is. All operations
//! propagate precision conservatively and never report a coefficient they
//! cannot certify.
//!
//! Storage is a dense coefficient vector offset by the order of the series,
//! trimmed so that the first and last stored entries are nonzero. Products
//! iterate over the nonzero entries of the sparser factor, so lacunary series
//! (eta products, `V`-images) multiply in time proportional to their support.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};

/// p-adic valuation of an integer or of a (range of a) series. `Infinite`
/// is the valuation of zero and orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn of(n: &BigInt, p: u64) -> Self {
        arith::valuation(n, p).map_or(Valuation::Infinite, Valuation::Finite)
    }

    /// Valuation after multiplying by `p^k`.
    pub fn shifted(self, k: u32) -> Self {
        match self {
            Valuation::Finite(v) => Valuation::Finite(v + k),
            Valuation::Infinite => Valuation::Infinite,
        }
    }

    pub fn is_at_least(self, bound: u32) -> bool {
        self >= Valuation::Finite(bound)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QSeries {
    /// Exponent of `coeffs[0]`. Equal to `prec` for the zero series.
    start: i64,
    coeffs: Vec<BigInt>,
    prec: i64,
}

fn add_prec(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("q-exponent overflow")
}

fn exp_of(start: i64, idx: usize) -> i64 {
    add_prec(start, i64::try_from(idx).expect("q-exponent overflow"))
}

impl QSeries {
    /// Builds a series from `(exponent, coefficient)` pairs. Repeated exponents
    /// are summed; zero coefficients are dropped.
    pub fn new<I, C>(entries: I, prec: i64) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut pairs: Vec<(i64, BigInt)> = Vec::new();
        for (e, c) in entries {
            if e >= prec {
                return Err(Error::ExponentBeyondPrecision { exponent: e, prec });
            }
            pairs.push((e, c.into()));
        }
        let Some(lo) = pairs.iter().map(|(e, _)| *e).min() else {
            return Ok(Self::zero(prec));
        };
        let hi = pairs.iter().map(|(e, _)| *e).max().unwrap_or(lo);
        let len = usize::try_from(hi - lo + 1).expect("series span too large");
        let mut coeffs = vec![BigInt::zero(); len];
        for (e, c) in pairs {
            coeffs[(e - lo) as usize] += c;
        }
        Ok(Self::from_dense(lo, coeffs, prec))
    }

    pub fn zero(prec: i64) -> Self {
        QSeries { start: prec, coeffs: Vec::new(), prec }
    }

    /// `1 + O(q^prec)`; the zero series when `prec <= 0`.
    pub fn one(prec: i64) -> Self {
        Self::monomial(0, BigInt::one(), prec)
    }

    /// `c q^e + O(q^prec)`; truncated away when `e >= prec`.
    pub fn monomial(e: i64, c: BigInt, prec: i64) -> Self {
        if e >= prec {
            return Self::zero(prec);
        }
        Self::from_dense(e, vec![c], prec)
    }

    /// Normalizes a dense block `coeffs[i] = a(start + i)`, dropping entries at
    /// or beyond `prec` and trimming zeros at both ends.
    pub(crate) fn from_dense(start: i64, mut coeffs: Vec<BigInt>, prec: i64) -> Self {
        if start >= prec {
            return Self::zero(prec);
        }
        let keep = usize::try_from(prec - start).unwrap_or(usize::MAX);
        coeffs.truncate(keep);
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Self::zero(prec);
        }
        coeffs.drain(..lead);
        QSeries { start: exp_of(start, lead), coeffs, prec }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// Least exponent with a nonzero coefficient; `prec` for the zero series.
    pub fn order(&self) -> i64 {
        self.start
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> Option<&BigInt> {
        self.coeffs.first()
    }

    /// Largest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| exp_of(self.start, self.coeffs.len() - 1))
    }

    pub fn coefficient(&self, e: i64) -> Result<BigInt> {
        if e >= self.prec {
            return Err(Error::InsufficientPrecision { needed: e + 1, available: self.prec });
        }
        Ok(self.get(e).cloned().unwrap_or_default())
    }

    fn get(&self, e: i64) -> Option<&BigInt> {
        if e < self.start {
            return None;
        }
        self.coeffs.get(usize::try_from(e - self.start).ok()?)
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (exp_of(self.start, i), c))
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Forgets every coefficient at or above `prec`.
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        Self::from_dense(self.start, self.coeffs.clone(), prec)
    }

    /// Applies `a(e) -> op(e, a(e))` termwise; precision is unchanged.
    pub fn map_terms<F>(&self, mut op: F) -> Self
    where
        F: FnMut(i64, &BigInt) -> BigInt,
    {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if c.is_zero() { BigInt::zero() } else { op(exp_of(self.start, i), c) })
            .collect();
        Self::from_dense(self.start, coeffs, self.prec)
    }

    /// Rebuilds a series from nonzero terms with new exponents. `reindex`
    /// must be strictly increasing; terms it maps to `None` are dropped.
    pub(crate) fn reindex<F>(&self, prec: i64, mut reindex: F) -> Self
    where
        F: FnMut(i64) -> Option<i64>,
    {
        let mapped: Vec<(i64, BigInt)> = self
            .terms()
            .filter_map(|(e, c)| reindex(e).filter(|&n| n < prec).map(|n| (n, c.clone())))
            .collect();
        match mapped.first() {
            None => Self::zero(prec),
            Some(&(lo, _)) => {
                let hi = mapped.last().map_or(lo, |t| t.0);
                let mut coeffs = vec![BigInt::zero(); (hi - lo + 1) as usize];
                for (n, c) in mapped {
                    coeffs[(n - lo) as usize] = c;
                }
                Self::from_dense(lo, coeffs, prec)
            }
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero(self.prec);
        }
        self.map_terms(|_, c| c * k)
    }

    /// Coefficientwise sum; precision is the smaller of the two.
    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let prec = self.prec.min(other.prec);
        let lo = self.start.min(other.start);
        if lo >= prec {
            return Self::zero(prec);
        }
        let hi = [self.degree(), other.degree()]
            .into_iter()
            .flatten()
            .max()
            .map_or(lo, |h| h.min(prec - 1));
        let mut coeffs = vec![BigInt::zero(); (hi - lo + 1).max(0) as usize];
        for (e, c) in self.terms().take_while(|(e, _)| *e <= hi) {
            coeffs[(e - lo) as usize] += c;
        }
        for (e, c) in other.terms().take_while(|(e, _)| *e <= hi) {
            if negate {
                coeffs[(e - lo) as usize] -= c;
            } else {
                coeffs[(e - lo) as usize] += c;
            }
        }
        Self::from_dense(lo, coeffs, prec)
    }

    /// Cauchy product. The precision is `min(f.prec + order(g), g.prec + order(f))`,
    /// with the zero series taking its precision as its order.
    pub fn mul(&self, other: &Self) -> Self {
        let prec = add_prec(self.prec, other.order()).min(add_prec(other.prec, self.order()));
        if self.is_zero() || other.is_zero() {
            return Self::zero(prec);
        }
        let start = add_prec(self.start, other.start);
        let len = usize::try_from(prec - start).unwrap_or(0);
        if len == 0 {
            return Self::zero(prec);
        }
        let (sparse, dense) = if self.nonzero_count() <= other.nonzero_count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in sparse.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            let span = (len - i).min(dense.coeffs.len());
            let target = &mut out[i..i + span];
            let unit = a.abs().is_one();
            for (slot, b) in target.iter_mut().zip(&dense.coeffs[..span]) {
                if b.is_zero() {
                    continue;
                }
                if unit {
                    if a.is_positive() {
                        *slot += b;
                    } else {
                        *slot -= b;
                    }
                } else {
                    *slot += a * b;
                }
            }
        }
        Self::from_dense(start, out, prec)
    }

    /// Multiplicative inverse of a series whose leading coefficient is `+1` or
    /// `-1`. The result is known to precision `prec - 2 * order`.
    pub fn invert(&self) -> Result<Self> {
        let Some(lead) = self.leading_coefficient() else {
            return Err(Error::NotInvertible("zero series".into()));
        };
        if !lead.abs().is_one() {
            return Err(Error::NotInvertible(format!("leading coefficient {lead} is not a unit")));
        }
        let v = self.start;
        let out_prec = self.prec - 2 * v;
        let len = usize::try_from(self.prec - v).expect("positive for nonzero series");
        let unit = lead.clone();
        let f = &self.coeffs;
        let support: Vec<usize> = (1..f.len()).filter(|&k| !f[k].is_zero()).collect();
        let mut g: Vec<BigInt> = Vec::with_capacity(len);
        g.push(unit.clone());
        for n in 1..len {
            let mut acc = BigInt::zero();
            for &k in support.iter().take_while(|&&k| k <= n) {
                acc += &f[k] * &g[n - k];
            }
            // g(n) = -u * acc, with u = 1/u for a unit.
            g.push(if unit.is_positive() { -acc } else { acc });
        }
        Ok(Self::from_dense(-v, g, out_prec))
    }

    /// Integer power by repeated squaring; negative exponents go through
    /// [`QSeries::invert`].
    ///
    /// `pow(f, 0)` for nonzero `f` is `1 + O(q^(prec - 2*order))`, the precision
    /// `f * f^-1` would certify. For the zero series it is `1 + O(q^0)`, i.e.
    /// nothing is known.
    pub fn pow(&self, k: i64) -> Result<Self> {
        match k.cmp(&0) {
            Ordering::Equal => {
                if self.is_zero() {
                    Ok(Self::zero(0))
                } else {
                    Ok(Self::one(self.prec - 2 * self.start))
                }
            }
            Ordering::Less => self.invert()?.pow(-k),
            Ordering::Greater => {
                let mut result: Option<Self> = None;
                let mut base = self.clone();
                let mut e = k as u64;
                loop {
                    if e & 1 == 1 {
                        result = Some(match result {
                            None => base.clone(),
                            Some(r) => r.mul(&base),
                        });
                    }
                    e >>= 1;
                    if e == 0 {
                        break;
                    }
                    base = base.mul(&base);
                }
                Ok(result.expect("k > 0"))
            }
        }
    }

    /// Minimum p-adic valuation of the coefficients at exponents in `[lo, hi)`.
    pub fn padic_valuation_range(&self, p: u64, lo: i64, hi: i64) -> Result<Valuation> {
        if hi > self.prec {
            return Err(Error::InsufficientPrecision { needed: hi, available: self.prec });
        }
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty range [{lo}, {hi})")));
        }
        if !arith::is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not prime")));
        }
        Ok(self
            .terms()
            .filter(|(e, _)| *e >= lo && *e < hi)
            .map(|(_, c)| Valuation::of(c, p))
            .min()
            .unwrap_or(Valuation::Infinite))
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::add(self, rhs)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::sub(self, rhs)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        QSeries::mul(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.map_terms(|_, c| -c)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => f.write_str("q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{mag}*q^{e}")?,
            }
        }
        if first {
            write!(f, "O(q^{})", self.prec)
        } else {
            write!(f, " + O(q^{})", self.prec)
        }
    }
}

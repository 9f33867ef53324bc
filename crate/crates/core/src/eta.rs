//! Dedekind eta quotients and the catalog of named forms.
//!
//! An eta quotient `prod eta(delta z)^r` is expanded as
//! `q^s prod_delta (q^delta; q^delta)_inf^r` with `s = sum delta*r / 24`.
//! Each Euler product `(x; x)_inf` is the pentagonal series
//! `sum_k (-1)^k x^(k(3k-1)/2)`, whose coefficients are all `0` or `+-1`, so a
//! full quotient is built by multiplying and dividing a single dense buffer by
//! sparse unit-coefficient series in place.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::arith::ceil_div;
use crate::error::{Error, Result};
use crate::operators;
use crate::qseries::QSeries;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    factors: Vec<(u64, i64)>,
    level: u64,
}

impl EtaQuotient {
    /// `factors` are `(delta, r)` pairs for `eta(delta z)^r`. Deltas must be
    /// positive and distinct; factors with `r = 0` are dropped.
    pub fn new(factors: &[(u64, i64)], level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidEtaQuotient("level must be positive".into()));
        }
        let mut out: Vec<(u64, i64)> = Vec::with_capacity(factors.len());
        for &(delta, r) in factors {
            if delta == 0 {
                return Err(Error::InvalidEtaQuotient("delta must be positive".into()));
            }
            if out.iter().any(|&(d, _)| d == delta) {
                return Err(Error::InvalidEtaQuotient(format!("repeated delta {delta}")));
            }
            if r != 0 {
                out.push((delta, r));
            }
        }
        Ok(EtaQuotient { factors: out, level })
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// `24 * shift`, always an integer.
    fn shift_numerator(&self) -> i64 {
        self.factors.iter().map(|&(d, r)| d as i64 * r).sum()
    }

    /// Leading exponent `sum delta*r / 24` of the expansion.
    pub fn shift(&self) -> Result<i64> {
        let num = self.shift_numerator();
        if num % 24 != 0 {
            return Err(Error::NonIntegralShift { numerator: num });
        }
        Ok(num / 24)
    }

    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.factors.iter().map(|&(_, r)| r).sum(), 2)
    }

    /// The quotient for `f(tz)`: every delta and the level scale by `t`.
    pub fn rescale(&self, t: u64) -> Self {
        EtaQuotient {
            factors: self.factors.iter().map(|&(d, r)| (d * t, r)).collect(),
            level: self.level * t,
        }
    }

    /// The q-expansion to absolute precision `prec`.
    pub fn expand(&self, prec: i64) -> Result<QSeries> {
        let shift = self.shift()?;
        if prec <= shift {
            return Err(Error::InsufficientPrecision { needed: shift + 1, available: prec });
        }
        // Every factor is a series in x = q^g.
        let g = self.factors.iter().fold(0u64, |acc, &(d, _)| acc.gcd(&d)).max(1);
        let len = ceil_div(prec - shift, g as i64) as usize;
        let mut buf = vec![BigInt::zero(); len];
        buf[0] = BigInt::one();
        for &(delta, r) in &self.factors {
            let pent = pentagonal_terms(len, (delta / g) as usize);
            for _ in 0..r.unsigned_abs() {
                if r > 0 {
                    mul_in_place(&mut buf, &pent);
                } else {
                    div_in_place(&mut buf, &pent);
                }
            }
        }
        Ok(spread(shift, g as i64, buf, prec))
    }

    /// Orders of vanishing at the cusps of `Gamma_0(level)`, one entry per
    /// divisor `d` of `level` (the cusps `c/d`). The entry for `d = level` is the
    /// order at infinity.
    pub fn cusp_orders(&self, level: u64) -> Result<Vec<(u64, Ratio<i64>)>> {
        for &(delta, _) in &self.factors {
            if !level.is_multiple_of(delta) {
                return Err(Error::LevelMismatch { delta, level });
            }
        }
        let n = level as i64;
        Ok(divisors(level)
            .into_iter()
            .map(|d| {
                let di = d as i64;
                let width = di.gcd(&(n / di));
                let sum: Ratio<i64> = self
                    .factors
                    .iter()
                    .map(|&(delta, r)| {
                        let g = di.gcd(&(delta as i64));
                        Ratio::new(g * g * r, width * di * delta as i64)
                    })
                    .sum();
                (d, sum * Ratio::new(n, 24))
            })
            .collect())
    }

    /// True when the quotient has nonnegative order at every cusp other
    /// than infinity.
    pub fn holomorphic_away_from_infinity(&self, level: u64) -> Result<bool> {
        Ok(self
            .cusp_orders(level)?
            .iter()
            .filter(|(d, _)| *d != level)
            .all(|(_, ord)| !ord.is_negative()))
    }
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (d, r)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({d},{r})")?;
        }
        f.write_str("]")
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Nonzero terms `(exponent, sign)` of `prod_{n>=1} (1 - x^(step*n))` below
/// `len`, excluding the constant term, sorted by exponent.
fn pentagonal_terms(len: usize, step: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for k in 1usize.. {
        let minus = k * (3 * k - 1) / 2 * step;
        if minus >= len {
            break;
        }
        let positive = k % 2 == 0;
        out.push((minus, positive));
        let plus = k * (3 * k + 1) / 2 * step;
        if plus < len {
            out.push((plus, positive));
        }
    }
    out.sort_unstable();
    out
}

/// `buf <- buf * P` for a pentagonal series `P` (constant term 1).
fn mul_in_place(buf: &mut [BigInt], pent: &[(usize, bool)]) {
    for n in (1..buf.len()).rev() {
        let (lo, hi) = buf.split_at_mut(n);
        let target = &mut hi[0];
        for &(k, positive) in pent.iter().take_while(|(k, _)| *k <= n) {
            let src = &lo[n - k];
            if src.is_zero() {
                continue;
            }
            if positive {
                *target += src;
            } else {
                *target -= src;
            }
        }
    }
}

/// `buf <- buf / P`, solving `P * new = old` from the bottom up.
fn div_in_place(buf: &mut [BigInt], pent: &[(usize, bool)]) {
    for n in 1..buf.len() {
        let (lo, hi) = buf.split_at_mut(n);
        let target = &mut hi[0];
        for &(k, positive) in pent.iter().take_while(|(k, _)| *k <= n) {
            let src = &lo[n - k];
            if src.is_zero() {
                continue;
            }
            if positive {
                *target -= src;
            } else {
                *target += src;
            }
        }
    }
}

/// `sum buf[i] q^(shift + g*i) + O(q^prec)`.
fn spread(shift: i64, g: i64, buf: Vec<BigInt>, prec: i64) -> QSeries {
    if g == 1 {
        return QSeries::from_dense(shift, buf, prec);
    }
    let used = buf.iter().rposition(|c| !c.is_zero()).map_or(0, |i| i + 1);
    let mut dense = vec![BigInt::zero(); (used.max(1) - 1) * g as usize + 1];
    for (i, c) in buf.into_iter().take(used).enumerate() {
        dense[i * g as usize] = c;
    }
    QSeries::from_dense(shift, dense, prec)
}

/// `f(z) -> f(tz)` on q-expansions, i.e. `q -> q^t`.
pub fn substitute_qpower(f: &QSeries, t: u64) -> QSeries {
    operators::apply_v(f, t)
}

/// The five conductors whose CM newforms are eta quotients.
pub const LEVELS: [u64; 5] = [27, 32, 36, 64, 144];

/// A named entry of the catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Form {
    /// The weight 2 newform `g_N`.
    Newform(u64),
    /// The weight 2 form `G_N`, derivative of the Weierstrass mock modular form.
    MockDerivative(u64),
    /// `eta^4(9z) / (eta(3z) eta^3(27z)) = q^-2 + q + ...`
    L1,
    /// `eta^3(3z) / eta^3(27z) = q^-3 - 3 + ...`
    L2,
    /// `eta(6z) eta^3(9z) / (eta(3z) eta^3(18z)) = q^-1 + ...`
    L36,
}

impl Form {
    pub const ALL: [Form; 13] = [
        Form::Newform(27),
        Form::Newform(32),
        Form::Newform(36),
        Form::Newform(64),
        Form::Newform(144),
        Form::MockDerivative(27),
        Form::MockDerivative(32),
        Form::MockDerivative(36),
        Form::MockDerivative(64),
        Form::MockDerivative(144),
        Form::L1,
        Form::L2,
        Form::L36,
    ];
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Form::Newform(n) => write!(f, "g{n}"),
            Form::MockDerivative(n) => write!(f, "G{n}"),
            Form::L1 => f.write_str("L1"),
            Form::L2 => f.write_str("L2"),
            Form::L36 => f.write_str("L36"),
        }
    }
}

impl FromStr for Form {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Form::ALL
            .iter()
            .find(|f| f.to_string() == s)
            .copied()
            .ok_or_else(|| Error::UnknownForm(s.to_string()))
    }
}

/// How a catalog form is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Eta(EtaQuotient),
    /// `base` twisted by the Kronecker character of discriminant `disc`.
    Twist { base: Form, disc: i64 },
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Eta(eq) => write!(f, "{eq}"),
            Recipe::Twist { base, disc } => write!(f, "twist({base},{disc})"),
        }
    }
}

/// One of the five CM elliptic curves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub level: u64,
    /// Discriminant of the CM field: `-3` for Q(sqrt -3), `-4` for Q(i).
    pub cm_disc: i64,
    pub newform: Recipe,
    /// Second recipe for the newform (twist of a lower-level newform), when known.
    pub newform_twist: Option<Recipe>,
    pub mock_derivative: Recipe,
    /// Weierstrass coefficients `(a1, a2, a3, a4, a6)`.
    pub weierstrass: [i64; 5],
}

fn eta(factors: &[(u64, i64)], level: u64) -> Recipe {
    Recipe::Eta(EtaQuotient::new(factors, level).expect("catalog entries are well formed"))
}

pub fn curves() -> &'static [CurveSpec] {
    static CURVES: OnceLock<Vec<CurveSpec>> = OnceLock::new();
    CURVES.get_or_init(|| {
        vec![
            CurveSpec {
                level: 27,
                cm_disc: -3,
                newform: eta(&[(3, 2), (9, 2)], 27),
                newform_twist: None,
                mock_derivative: eta(&[(3, 1), (9, 6), (27, -3)], 27),
                weierstrass: [0, 0, 1, 0, -7],
            },
            CurveSpec {
                level: 32,
                cm_disc: -4,
                newform: eta(&[(4, 2), (8, 2)], 32),
                newform_twist: None,
                mock_derivative: eta(&[(4, 2), (16, 6), (32, -4)], 32),
                weierstrass: [0, 0, 0, 4, 0],
            },
            CurveSpec {
                level: 36,
                cm_disc: -3,
                newform: eta(&[(6, 4)], 36),
                newform_twist: None,
                mock_derivative: eta(&[(6, 3), (12, 1), (18, 3), (36, -3)], 36),
                weierstrass: [0, 0, 0, 0, 1],
            },
            CurveSpec {
                level: 64,
                cm_disc: -4,
                newform: eta(&[(4, -2), (8, 8), (16, -2)], 64),
                newform_twist: Some(Recipe::Twist { base: Form::Newform(32), disc: 8 }),
                mock_derivative: Recipe::Twist { base: Form::MockDerivative(32), disc: 8 },
                weierstrass: [0, 0, 0, -4, 0],
            },
            CurveSpec {
                level: 144,
                cm_disc: -3,
                newform: eta(&[(6, -4), (12, 12), (24, -4)], 144),
                newform_twist: Some(Recipe::Twist { base: Form::Newform(36), disc: 12 }),
                mock_derivative: Recipe::Twist { base: Form::MockDerivative(36), disc: 12 },
                weierstrass: [0, 0, 0, 0, -1],
            },
        ]
    })
}

pub fn curve(level: u64) -> Result<&'static CurveSpec> {
    curves()
        .iter()
        .find(|c| c.level == level)
        .ok_or_else(|| Error::InvalidArgument(format!("no curve of conductor {level}")))
}

/// The eta quotient behind `L1`, `L2` or `L36`.
pub fn auxiliary_quotient(form: Form) -> Option<EtaQuotient> {
    let (factors, level): (&[(u64, i64)], u64) = match form {
        Form::L1 => (&[(3, -1), (9, 4), (27, -3)], 27),
        Form::L2 => (&[(3, 3), (27, -3)], 27),
        Form::L36 => (&[(3, -1), (6, 1), (9, 3), (18, -3)], 18),
        _ => return None,
    };
    Some(EtaQuotient::new(factors, level).expect("catalog entries are well formed"))
}

pub fn recipe(form: Form) -> Result<Recipe> {
    match form {
        Form::Newform(n) => Ok(curve(n)?.newform.clone()),
        Form::MockDerivative(n) => Ok(curve(n)?.mock_derivative.clone()),
        _ => Ok(Recipe::Eta(auxiliary_quotient(form).expect("auxiliary form"))),
    }
}

/// Expands a recipe, normalizing the leading coefficient to `+1`.
pub fn expand_recipe(recipe: &Recipe, prec: i64) -> Result<QSeries> {
    let series = match recipe {
        Recipe::Eta(eq) => eq.expand(prec)?,
        Recipe::Twist { base, disc } => operators::twist(&catalog_form(*base, prec)?, *disc),
    };
    match series.leading_coefficient() {
        Some(c) if c.is_negative() => Ok(-&series),
        _ => Ok(series),
    }
}

pub fn catalog_form(form: Form, prec: i64) -> Result<QSeries> {
    expand_recipe(&recipe(form)?, prec)
}

/// Human-readable catalog, one record per line:
/// `name level [(delta,r),...] cm_disc (a1,a2,a3,a4,a6)`. Twist recipes print
/// as `twist(base,disc)` in the factor slot.
pub fn catalog_manifest() -> String {
    let mut out = String::new();
    for c in curves() {
        let [a1, a2, a3, a4, a6] = c.weierstrass;
        let tail = format!("{} ({a1},{a2},{a3},{a4},{a6})", c.cm_disc);
        let mut push = |name: String, recipe: &Recipe| {
            out.push_str(&format!("{name} {} {recipe} {tail}\n", c.level));
        };
        push(format!("g{}", c.level), &c.newform);
        if let Some(tw) = &c.newform_twist {
            push(format!("g{}", c.level), tw);
        }
        push(format!("G{}", c.level), &c.mock_derivative);
    }
    out
}

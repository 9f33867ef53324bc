//! Finite verification of the congruences and identities satisfied by the
//! catalog forms. Every check returns a [`CheckReport`] carrying exact witness
//! values; a report passes iff every expected witness equals the actual one.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{big_pow, checked_pow, is_prime, modulo, primes_up_to, sign_pow};
use crate::error::{Error, Result};
use crate::eta::{curve, curves, recipe, CurveSpec, Form, Recipe};
use crate::operators::{apply_u, hecke, is_inert, kronecker, theta, twist};
use crate::qseries::{QSeries, Valuation};
use crate::spans::{build_h, build_psi};

/// Default precision ceiling for a single expansion.
pub const DEFAULT_PREC_CEILING: i64 = 1_000_000;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub params: Params,
    pub passed: bool,
    pub expected: BTreeMap<String, String>,
    pub actual: BTreeMap<String, String>,
    pub notes: String,
}

impl CheckReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// Accumulates witnesses for one report.
struct Witnesses {
    check_id: &'static str,
    params: Params,
    expected: BTreeMap<String, String>,
    actual: BTreeMap<String, String>,
    first_failure: Option<String>,
    notes: Vec<String>,
}

impl Witnesses {
    fn new(check_id: &'static str, params: Params) -> Self {
        Witnesses {
            check_id,
            params,
            expected: BTreeMap::new(),
            actual: BTreeMap::new(),
            first_failure: None,
            notes: Vec::new(),
        }
    }

    fn record(&mut self, key: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        let key = key.into();
        let (e, a) = (expected.to_string(), actual.to_string());
        if e != a && self.first_failure.is_none() {
            self.first_failure = Some(format!("{key}: expected {e}, got {a}"));
        }
        self.expected.insert(key.clone(), e);
        self.actual.insert(key, a);
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn finish(self) -> CheckReport {
        let passed = self.expected == self.actual;
        let mut notes = self.notes;
        if let Some(f) = self.first_failure {
            notes.insert(0, format!("FAILED {f}"));
        }
        CheckReport {
            check_id: self.check_id.to_string(),
            params: self.params,
            passed,
            expected: self.expected,
            actual: self.actual,
            notes: notes.join("; "),
        }
    }
}

/// Memoized catalog expansions, safe to share between threads.
///
/// Each form keeps its highest-precision expansion; smaller requests are
/// served by truncation. Concurrent requests for the same form wait on that
/// form's slot instead of expanding twice.
#[derive(Default)]
pub struct ExpansionCache {
    slots: Mutex<HashMap<Form, Arc<Mutex<Option<QSeries>>>>>,
}

impl ExpansionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, form: Form, prec: i64) -> Result<QSeries> {
        let slot = {
            let mut slots = self.slots.lock().expect("cache lock poisoned");
            Arc::clone(slots.entry(form).or_default())
        };
        let mut guard = slot.lock().expect("cache slot poisoned");
        if let Some(series) = guard.as_ref() {
            if series.prec() >= prec {
                return Ok(series.truncate(prec));
            }
        }
        let series = match recipe(form)? {
            Recipe::Eta(_) => crate::eta::catalog_form(form, prec)?,
            // Twisted forms reuse the cached base expansion.
            tw @ Recipe::Twist { .. } => self.expand_twist(&tw, prec)?,
        };
        *guard = Some(series.clone());
        Ok(series)
    }

    fn expand_twist(&self, recipe: &Recipe, prec: i64) -> Result<QSeries> {
        let Recipe::Twist { base, disc } = recipe else {
            unreachable!("expand_twist called on an eta recipe");
        };
        let series = twist(&self.get(*base, prec)?, *disc);
        Ok(match series.leading_coefficient() {
            Some(c) if c < &BigInt::zero() => -&series,
            _ => series,
        })
    }

    /// Expands each form once at the largest precision requested for it.
    pub fn prefetch(&self, requests: impl IntoIterator<Item = (Form, i64)>) -> Result<()> {
        let mut max: BTreeMap<Form, i64> = BTreeMap::new();
        for (form, prec) in requests {
            let e = max.entry(form).or_insert(prec);
            *e = (*e).max(prec);
        }
        // Bases of twists first, so twisted forms hit the cache.
        let (twists, plain): (Vec<_>, Vec<_>) = max
            .into_iter()
            .partition(|(f, _)| matches!(recipe(*f), Ok(Recipe::Twist { .. })));
        plain.into_par_iter().try_for_each(|(f, p)| self.get(f, p).map(|_| ()))?;
        twists.into_par_iter().try_for_each(|(f, p)| self.get(f, p).map(|_| ()))
    }
}

fn p_power(p: u64, e: u32) -> Result<i64> {
    checked_pow(p, e).ok_or_else(|| Error::InvalidArgument(format!("{p}^{e} overflows")))
}

/// Why `p` cannot be used with `curve`, or `None` when it is eligible: `p`
/// must be an inert prime not dividing the level, and at least 5 for the
/// levels 36 and 144.
pub fn ineligibility(curve: &CurveSpec, p: u64) -> Option<&'static str> {
    if !is_prime(p) {
        return Some("not prime");
    }
    if !is_inert(p, curve.cm_disc).unwrap_or(false) {
        return Some("not inert in the CM field");
    }
    if matches!(curve.level, 36 | 144) && p < 5 {
        return Some("p | N or p < 5");
    }
    if curve.level.is_multiple_of(p) {
        return Some("p | N");
    }
    None
}

fn require_eligible(curve: &CurveSpec, p: u64) -> Result<()> {
    match ineligibility(curve, p) {
        None => Ok(()),
        Some(reason) => Err(Error::InvalidArgument(format!("p = {p} for level {}: {reason}", curve.level))),
    }
}

fn require_psi_class(level: u64, p: u64) -> Result<()> {
    let ok = is_prime(p)
        && match level {
            27 => p % 3 == 2,
            36 => p % 6 == 5,
            _ => false,
        };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("p = {p} is not admissible at level {level}")))
    }
}

/// Compares two series on their shared precision. Returns the shared
/// precision, the lowest compared exponent, and the first differing exponent.
fn first_difference(a: &QSeries, b: &QSeries) -> (i64, i64, Option<i64>) {
    let shared = a.prec().min(b.prec());
    let lo = a.order().min(b.order()).min(shared);
    let diff = a.truncate(shared).sub(&b.truncate(shared));
    let first = (!diff.is_zero()).then(|| diff.order());
    (shared, lo, first)
}

fn mismatch_label(first: Option<i64>) -> String {
    first.map_or_else(|| "none".to_string(), |e| format!("q^{e}"))
}

/// Checks on one shared expansion cache.
#[derive(Default)]
pub struct Verifier {
    cache: ExpansionCache,
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cache(&self) -> &ExpansionCache {
        &self.cache
    }

    /// `C(n)`, the n-th coefficient of `G_N`.
    pub fn mock_coefficient(&self, level: u64, n: i64) -> Result<BigInt> {
        self.cache.get(Form::MockDerivative(level), n + 1)?.coefficient(n)
    }

    /// `v_p(C(p^(2m+1))) = m`.
    pub fn check_valuation(&self, curve: &CurveSpec, p: u64, m: u32) -> Result<CheckReport> {
        require_eligible(curve, p)?;
        let n = p_power(p, 2 * m + 1)?;
        let c = self.mock_coefficient(curve.level, n)?;
        let mut w = Witnesses::new(
            "valuation",
            Params { level: Some(curve.level), p: Some(p), m: Some(m), prec: Some(n + 1), ..Params::default() },
        );
        w.record("v_p(C(p^(2m+1)))", m, Valuation::of(&c, p));
        w.note(format!("C({n}) = {c}"));
        Ok(w.finish())
    }

    /// `v_p(G | U(p^(2m+1)) - C(p^(2m+1)) g) >= 2m + 1` on the first `k`
    /// coefficients. Together with the valuation check this is the limit
    /// statement `v_p(G | U / C - g) >= m + 1`, without dividing.
    pub fn check_limit(&self, curve: &CurveSpec, p: u64, m: u32, k: i64) -> Result<CheckReport> {
        require_eligible(curve, p)?;
        if k < 1 {
            return Err(Error::InvalidArgument("K must be positive".into()));
        }
        let n = p_power(p, 2 * m + 1)?;
        let g_prec = n.checked_mul(k).and_then(|x| x.checked_add(1)).ok_or_else(|| {
            Error::InvalidArgument("precision overflow".into())
        })?;
        let big_g = self.cache.get(Form::MockDerivative(curve.level), g_prec)?;
        let g = self.cache.get(Form::Newform(curve.level), k + 1)?;
        let c = big_g.coefficient(n)?;
        let u = apply_u(&big_g, n as u64);
        let diff = u.sub(&g.scale(&c));
        let hi = k + 1;
        let lo = u.order().min(g.order()).min(hi);
        let val = diff.padic_valuation_range(p, lo, hi)?;
        let bound = 2 * m + 1;
        let mut w = Witnesses::new(
            "limit",
            Params { level: Some(curve.level), p: Some(p), m: Some(m), prec: Some(g_prec), k: Some(k), ..Params::default() },
        );
        w.record(format!("v_p(G|U(p^(2m+1)) - C*g) >= {bound}"), true, val.is_at_least(bound));
        w.note(format!("min valuation {val} on exponents [{lo}, {hi}); C({n}) = {c}"));
        Ok(w.finish())
    }

    /// `C(p^(2m+1)) = (-1)^m p^m C(p) (mod p^(m+1))` at level 27 or 36.
    pub fn check_congruence(&self, level: u64, p: u64, m: u32) -> Result<CheckReport> {
        require_psi_class(level, p)?;
        let n = p_power(p, 2 * m + 1)?;
        let c_n = self.mock_coefficient(level, n)?;
        let c_p = self.mock_coefficient(level, p as i64)?;
        let modulus = big_pow(p, m + 1);
        let rhs = sign_pow(m) * big_pow(p, m) * &c_p;
        let mut w = Witnesses::new(
            "congruence",
            Params { level: Some(level), p: Some(p), m: Some(m), ..Params::default() },
        );
        w.record(
            format!("C(p^(2m+1)) mod {modulus}"),
            modulo(&rhs, &modulus),
            modulo(&c_n, &modulus),
        );
        w.note(format!("C({n}) = {c_n}; C({p}) = {c_p}"));
        Ok(w.finish())
    }

    /// `G | T_2(p^n) = p^n H_(p^n) + C(p^n) g` coefficientwise.
    pub fn check_hecke_decomposition(&self, level: u64, p: u64, n: u32, prec: i64) -> Result<CheckReport> {
        let ok = is_prime(p)
            && match level {
                27 => p != 3,
                36 => p >= 5,
                _ => false,
            };
        if !ok || n == 0 {
            return Err(Error::InvalidArgument(format!("p = {p}, n = {n} not admissible at level {level}")));
        }
        let pn = p_power(p, n)?;
        let big_g = self.cache.get(Form::MockDerivative(level), prec * pn)?;
        let lhs = hecke(&big_g, 2, p, n)?;
        let h = build_h(level, pn, prec)?;
        let g = self.cache.get(Form::Newform(level), prec)?;
        let c = big_g.coefficient(pn)?;
        let rhs = h.scale(&BigInt::from(pn)).add(&g.scale(&c));
        let (shared, lo, first) = first_difference(&lhs, &rhs);
        let mut w = Witnesses::new(
            "hecke-decomposition",
            Params { level: Some(level), p: Some(p), n: Some(n), prec: Some(prec), ..Params::default() },
        );
        w.record("first mismatch", "none", mismatch_label(first));
        w.note(format!("compared exponents [{lo}, {shared}) ({} coefficients); C({pn}) = {c}", shared - lo));
        Ok(w.finish())
    }

    /// `G | T_2(p) = -Theta(psi_p)`, and for `m <= m_max` the congruence
    /// `G | U(p^(2m+1)) = (-1)^(m+1) p^m Theta(psi_p) (mod p^(m+1))`.
    pub fn check_theta_psi(&self, level: u64, p: u64, prec: i64, m_max: u32) -> Result<CheckReport> {
        require_psi_class(level, p)?;
        let psi = build_psi(level, p, prec)?;
        let theta_psi = theta(&psi.series);
        let top = p_power(p, 2 * m_max + 1)?.max(p as i64);
        let big_g = self.cache.get(Form::MockDerivative(level), prec * top)?;
        let lhs = hecke(&big_g, 2, p, 1)?;
        let (shared, lo, first) = first_difference(&lhs, &-&theta_psi);
        let mut w = Witnesses::new(
            "theta-psi",
            Params { level: Some(level), p: Some(p), m: Some(m_max), prec: Some(prec), ..Params::default() },
        );
        w.record("G|T2(p) + Theta(psi_p): first nonzero", "none", mismatch_label(first));
        w.note(format!("identity compared on exponents [{lo}, {shared})"));
        for m in 0..=m_max {
            let n = p_power(p, 2 * m + 1)?;
            let u = apply_u(&big_g, n as u64);
            let rhs = theta_psi.scale(&(sign_pow(m + 1) * big_pow(p, m)));
            let diff = u.sub(&rhs);
            let hi = diff.prec();
            let lo = u.order().min(rhs.order()).min(hi);
            let val = diff.padic_valuation_range(p, lo, hi)?;
            w.record(format!("U-congruence mod p^{} holds (m = {m})", m + 1), true, val.is_at_least(m + 1));
            w.note(format!("m = {m}: valuation {val} on exponents [{lo}, {hi})"));
        }
        Ok(w.finish())
    }

    /// The constant term of `G psi_p` vanishes and `psi_p = q^-p - C(p) q + ...`.
    pub fn check_residue(&self, level: u64, p: u64, prec: i64) -> Result<CheckReport> {
        require_psi_class(level, p)?;
        let prec = prec.max(2);
        let psi = build_psi(level, p, prec)?;
        let big_g = self.cache.get(Form::MockDerivative(level), prec.max(p as i64 + 2))?;
        let product = big_g.mul(&psi.series);
        let constant = product.coefficient(0)?;
        let c_p = big_g.coefficient(p as i64)?;
        let mut w = Witnesses::new(
            "residue",
            Params { level: Some(level), p: Some(p), prec: Some(prec), ..Params::default() },
        );
        w.record("constant term of G*psi_p", 0, &constant);
        w.record("C_p (q-coefficient of psi_p)", -&c_p, &psi.q_coefficient);
        w.note(format!("C({p}) = {c_p}"));
        Ok(w.finish())
    }

    /// `p` does not divide `C(p)`.
    pub fn check_nondivisibility(&self, curve: &CurveSpec, p: u64) -> Result<CheckReport> {
        require_eligible(curve, p)?;
        let c = self.mock_coefficient(curve.level, p as i64)?;
        let mut w = Witnesses::new(
            "nondivisibility",
            Params { level: Some(curve.level), p: Some(p), ..Params::default() },
        );
        w.record("v_p(C(p))", 0, Valuation::of(&c, p));
        w.note(format!("C({p}) = {c}"));
        Ok(w.finish())
    }

    /// Level 64 and 144 forms against twists of the level 32 and 36 forms,
    /// and the commutation of twisting with `U(p^(2m+1))`.
    pub fn check_twist_consistency(&self, prec: i64, samples: &[(u64, u32)], coeffs: i64) -> Result<CheckReport> {
        let mut w = Witnesses::new("twist", Params { prec: Some(prec), k: Some(coeffs), ..Params::default() });
        for level in [64, 144] {
            let c = curve(level)?;
            let eta_form = crate::eta::expand_recipe(&c.newform, prec)?;
            let twisted = crate::eta::expand_recipe(c.newform_twist.as_ref().expect("twist recipe"), prec)?;
            let (shared, _, first) = first_difference(&eta_form, &twisted);
            w.record(format!("g{level}: eta quotient vs twist, first mismatch"), "none", mismatch_label(first));
            w.note(format!("g{level} compared below q^{shared}"));
        }
        for &(p, m) in samples {
            let n = p_power(p, 2 * m + 1)?;
            let need = coeffs.checked_mul(n).and_then(|x| x.checked_add(1)).ok_or_else(|| {
                Error::InvalidArgument("precision overflow".into())
            })?;
            for (base, disc) in [(32u64, 8i64), (36, 12)] {
                let g = self.cache.get(Form::MockDerivative(base), need)?;
                let lhs = apply_u(&twist(&g, disc), n as u64);
                let chi = BigInt::from(kronecker(disc, n));
                let rhs = twist(&apply_u(&g, n as u64), disc).scale(&chi);
                let (_, _, first) = first_difference(&lhs, &rhs);
                w.record(
                    format!("(G{base} x chi{disc})|U({p}^{}) commutation, first mismatch", 2 * m + 1),
                    "none",
                    mismatch_label(first),
                );
            }
        }
        Ok(w.finish())
    }

    /// Support lattices of `g` and `G`. At level 27 also `C(p^(2m)) = 0` and
    /// `G | T_2(p^(2m)) = p^(2m) H_(p^(2m))` for a few small `p^(2m)`.
    pub fn check_support(&self, curve: &CurveSpec, prec: i64) -> Result<CheckReport> {
        let (modulus, g_class, big_g_class) = support_lattice(curve.level);
        let mut w = Witnesses::new(
            "support",
            Params { level: Some(curve.level), prec: Some(prec), ..Params::default() },
        );
        for (form, class) in [(Form::Newform(curve.level), g_class), (Form::MockDerivative(curve.level), big_g_class)] {
            let f = self.cache.get(form, prec)?;
            let stray = f.terms().map(|(e, _)| e).find(|e| e.rem_euclid(modulus) != class);
            w.record(
                format!("{form} exponent outside {class} mod {modulus}"),
                "none",
                stray.map_or_else(|| "none".to_string(), |e| format!("q^{e}")),
            );
        }
        if curve.level == 27 {
            const SAMPLES: [(u64, u32); 3] = [(2, 1), (2, 2), (5, 1)];
            const HECKE_PREC: i64 = 30;
            for (p, m) in SAMPLES {
                let n = p_power(p, 2 * m)?;
                let big_g = self.cache.get(Form::MockDerivative(27), HECKE_PREC * n)?;
                w.record(format!("C({n})"), 0, big_g.coefficient(n)?);
                let lhs = hecke(&big_g, 2, p, 2 * m)?;
                let rhs = build_h(27, n, HECKE_PREC)?.scale(&BigInt::from(n));
                let (_, _, first) = first_difference(&lhs, &rhs);
                w.record(format!("G27|T2({n}) - {n}*H_{n}: first nonzero"), "none", mismatch_label(first));
            }
            w.note(format!("Hecke identities compared below q^{HECKE_PREC}"));
        }
        Ok(w.finish())
    }
}

/// `(modulus, class of g, class of G)`: exponents of `g` and `G` lie in these
/// residue classes.
pub fn support_lattice(level: u64) -> (i64, i64, i64) {
    match level {
        27 => (3, 1, 2),
        32 | 64 => (4, 1, 3),
        _ => (6, 1, 5),
    }
}

/// Which primes to run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeSelection {
    List(Vec<u64>),
    /// Every prime up to the bound (filtered per curve by eligibility).
    UpTo(u64),
}

impl PrimeSelection {
    fn primes(&self) -> Vec<u64> {
        match self {
            PrimeSelection::List(v) => v.clone(),
            PrimeSelection::UpTo(b) => primes_up_to(*b),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridConfig {
    pub levels: Vec<u64>,
    pub primes: PrimeSelection,
    /// `None` picks, per prime, the largest `m` with `K p^(2m+1) <= ceiling`.
    pub m_max: Option<u32>,
    pub k: i64,
    pub prec_ceiling: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Skipped {
    pub level: u64,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GridOutcome {
    pub reports: Vec<CheckReport>,
    pub skipped: Vec<Skipped>,
}

impl GridOutcome {
    pub fn passed(&self) -> usize {
        self.reports.iter().filter(|r| r.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn summary(&self) -> String {
        format!("PASSED {}/{} (skipped {})", self.passed(), self.reports.len(), self.skipped.len())
    }
}

/// Canonical report order: level, p, m, check id.
pub fn sort_reports(reports: &mut [CheckReport]) {
    reports.sort_by(|a, b| {
        (a.params.level, a.params.p, a.params.m, &a.check_id, &a.params)
            .cmp(&(b.params.level, b.params.p, b.params.m, &b.check_id, &b.params))
    });
}

impl Verifier {
    /// Runs the valuation and limit checks over a grid of curves, primes and
    /// `m`. Ineligible primes and runs over the precision ceiling are reported
    /// as skipped.
    pub fn run_theorem_grid(&self, config: &GridConfig) -> Result<GridOutcome> {
        let mut tasks: Vec<(&'static CurveSpec, u64, u32)> = Vec::new();
        let mut skipped = Vec::new();
        for &level in &config.levels {
            let c = curve(level)?;
            for p in config.primes.primes() {
                if let Some(reason) = ineligibility(c, p) {
                    skipped.push(Skipped { level, p, m: None, reason: reason.to_string() });
                    continue;
                }
                let fits = |m: u32| {
                    p_power(p, 2 * m + 1)
                        .ok()
                        .and_then(|n| n.checked_mul(config.k))
                        .is_some_and(|need| need <= config.prec_ceiling)
                };
                match config.m_max {
                    Some(m_max) => {
                        for m in 0..=m_max {
                            if fits(m) {
                                tasks.push((c, p, m));
                            } else {
                                skipped.push(Skipped {
                                    level,
                                    p,
                                    m: Some(m),
                                    reason: format!("K*p^(2m+1) exceeds precision ceiling {}", config.prec_ceiling),
                                });
                            }
                        }
                    }
                    None => {
                        if !fits(0) {
                            skipped.push(Skipped {
                                level,
                                p,
                                m: Some(0),
                                reason: format!("K*p exceeds precision ceiling {}", config.prec_ceiling),
                            });
                        }
                        let mut m = 0;
                        while fits(m) {
                            tasks.push((c, p, m));
                            m += 1;
                        }
                    }
                }
            }
        }

        let mut requests = Vec::new();
        for &(c, p, m) in &tasks {
            let n = p_power(p, 2 * m + 1)?;
            requests.push((Form::MockDerivative(c.level), n * config.k + 1));
            requests.push((Form::Newform(c.level), config.k + 1));
        }
        self.cache.prefetch(requests)?;

        let nested: Vec<Vec<CheckReport>> = tasks
            .par_iter()
            .map(|&(c, p, m)| -> Result<Vec<CheckReport>> {
                Ok(vec![self.check_valuation(c, p, m)?, self.check_limit(c, p, m, config.k)?])
            })
            .collect::<Result<_>>()?;
        let mut reports: Vec<CheckReport> = nested.into_iter().flatten().collect();
        sort_reports(&mut reports);
        skipped.sort();
        Ok(GridOutcome { reports, skipped })
    }
}

/// All five curves in catalog order.
pub fn all_levels() -> Vec<u64> {
    curves().iter().map(|c| c.level).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eligibility_rules() {
        let c36 = curve(36).unwrap();
        assert_eq!(ineligibility(c36, 2), Some("p | N or p < 5"));
        assert_eq!(ineligibility(c36, 5), None);
        assert_eq!(ineligibility(c36, 7), Some("not inert in the CM field"));
        assert_eq!(ineligibility(curve(27).unwrap(), 2), None);
        assert_eq!(ineligibility(curve(32).unwrap(), 3), None);
        assert_eq!(ineligibility(curve(64).unwrap(), 9), Some("not prime"));
    }

    #[test]
    fn report_passes_iff_witnesses_agree() {
        let mut w = Witnesses::new("x", Params::default());
        w.record("a", 1, 1);
        assert!(w.finish().passed);
        let mut w = Witnesses::new("x", Params::default());
        w.record("a", 1, 1);
        w.record("b", 2, 3);
        let r = w.finish();
        assert!(!r.passed);
        assert!(r.notes.starts_with("FAILED b: expected 2, got 3"));
    }

    #[test]
    fn cache_serves_truncations() {
        let cache = ExpansionCache::new();
        let big = cache.get(Form::MockDerivative(27), 60).unwrap();
        let small = cache.get(Form::MockDerivative(27), 10).unwrap();
        assert_eq!(small, big.truncate(10));
        assert_eq!(cache.get(Form::MockDerivative(64), 30).unwrap().prec(), 30);
    }

    #[test]
    fn valuation_small_cases() {
        let v = Verifier::new();
        let c27 = curve(27).unwrap();
        assert!(v.check_valuation(c27, 2, 0).unwrap().passed);
        assert_eq!(v.mock_coefficient(27, 2).unwrap(), BigInt::from(-1));
        assert!(v.check_valuation(curve(32).unwrap(), 3, 0).unwrap().passed);
        assert!(v.check_valuation(c27, 7, 0).is_err());
    }

    #[test]
    fn report_json_shape() {
        let v = Verifier::new();
        let r = v.check_nondivisibility(curve(27).unwrap(), 2).unwrap().to_json();
        assert_eq!(r["check_id"], "nondivisibility");
        assert_eq!(r["params"]["level"], 27);
        assert_eq!(r["passed"], true);
        assert_eq!(r["expected"]["v_p(C(p))"], "0");
        assert!(r["notes"].as_str().unwrap().contains("C(2) = -1"));
    }
}

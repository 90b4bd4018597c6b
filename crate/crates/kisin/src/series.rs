//! Truncated power/Laurent series in `u` over `GF(p^f)` with explicit
//! precision tracking.
//!
//! A series is stored as its first known nonzero coefficient index
//! (`lowest`), a dense coefficient block, and a precision: either `Exact`
//! (a Laurent polynomial, all coefficients known) or `Mod(N)` (coefficients
//! of degree `< N` known, the rest undetermined).  Arithmetic propagates
//! precision pessimistically with the usual non-archimedean rules, so a
//! verdict read off a series is either certain or detectably unavailable.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::min;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::field::{FFElt, FinField};

/// Absolute precision of a series: known modulo `u^N`, or exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prec {
    Exact,
    Mod(i64),
}

impl Prec {
    pub fn min_with(self, other: Prec) -> Prec {
        match (self, other) {
            (Prec::Exact, q) => q,
            (p, Prec::Exact) => p,
            (Prec::Mod(a), Prec::Mod(b)) => Prec::Mod(min(a, b)),
        }
    }

    pub fn shift(self, k: i64) -> Prec {
        match self {
            Prec::Exact => Prec::Exact,
            Prec::Mod(n) => Prec::Mod(n + k),
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Prec::Exact)
    }

    /// True if coefficients of degree < n are all known.
    pub fn covers(self, n: i64) -> bool {
        match self {
            Prec::Exact => true,
            Prec::Mod(m) => m >= n,
        }
    }
}

/// Valuation of a series, as far as the precision can tell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Val {
    /// First nonzero coefficient sits at this index.
    Exact(i64),
    /// Zero to precision: the valuation is at least this (the precision).
    AtLeast(i64),
    /// Exactly the zero series.
    Infinite,
}

impl Val {
    /// Lower bound usable in pessimistic precision propagation.
    pub fn lower_bound(self) -> Option<i64> {
        match self {
            Val::Exact(v) => Some(v),
            Val::AtLeast(v) => Some(v),
            Val::Infinite => None,
        }
    }

    pub fn exact(self) -> Option<i64> {
        match self {
            Val::Exact(v) => Some(v),
            _ => None,
        }
    }
}

/// A truncated power/Laurent series over `GF(p^f)`.
#[derive(Debug, Clone)]
pub struct USeries {
    field: Arc<FinField>,
    lowest: i64,
    coeffs: Vec<FFElt>,
    prec: Prec,
}

impl PartialEq for USeries {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.lowest == other.lowest
            && self.coeffs == other.coeffs
            && self.prec == other.prec
    }
}
impl Eq for USeries {}

impl USeries {
    /// Builds a series from raw data and normalizes it: coefficients at or
    /// above the precision are dropped, leading/trailing zeros trimmed.
    pub fn new(field: Arc<FinField>, lowest: i64, coeffs: Vec<FFElt>, prec: Prec) -> USeries {
        let mut s = USeries { field, lowest, coeffs, prec };
        s.normalize();
        s
    }

    pub fn zero(field: Arc<FinField>) -> USeries {
        USeries { field, lowest: 0, coeffs: Vec::new(), prec: Prec::Exact }
    }

    /// Zero to precision `n`: all coefficients below `n` vanish, the rest
    /// are unknown.
    pub fn zero_prec(field: Arc<FinField>, n: i64) -> USeries {
        USeries { field, lowest: 0, coeffs: Vec::new(), prec: Prec::Mod(n) }
    }

    pub fn one(field: Arc<FinField>) -> USeries {
        USeries::monomial(field, FFElt::ONE, 0)
    }

    pub fn monomial(field: Arc<FinField>, c: FFElt, n: i64) -> USeries {
        if c.is_zero() {
            USeries::zero(field)
        } else {
            USeries { field, lowest: n, coeffs: vec![c], prec: Prec::Exact }
        }
    }

    /// Convenience constructor from `(exponent, integer coefficient)` terms.
    pub fn from_terms(field: &Arc<FinField>, terms: &[(i64, i64)]) -> USeries {
        let mut s = USeries::zero(field.clone());
        for &(n, c) in terms {
            let elt = field.from_int(c);
            s = s.add(&USeries::monomial(field.clone(), elt, n)).expect("same field");
        }
        s
    }

    fn normalize(&mut self) {
        if let Prec::Mod(n) = self.prec {
            // drop unknown coefficients
            if self.lowest >= n {
                self.coeffs.clear();
            } else {
                let keep = (n - self.lowest).min(self.coeffs.len() as i64).max(0) as usize;
                self.coeffs.truncate(keep);
            }
        }
        while self.coeffs.first().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.remove(0);
            self.lowest += 1;
        }
        while self.coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.lowest = 0;
        }
    }

    pub fn field(&self) -> &Arc<FinField> {
        &self.field
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    /// Valuation as far as the precision can tell.
    pub fn val(&self) -> Val {
        if let Some(_) = self.coeffs.first() {
            Val::Exact(self.lowest)
        } else {
            match self.prec {
                Prec::Exact => Val::Infinite,
                Prec::Mod(n) => Val::AtLeast(n),
            }
        }
    }

    /// True if the series is exactly zero.
    pub fn is_zero_exact(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_exact()
    }

    /// True if every known coefficient vanishes.
    pub fn is_zero_to_prec(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `u^n`; `None` if it is not covered by the precision.
    pub fn coeff(&self, n: i64) -> Option<FFElt> {
        if !self.prec.covers(n + 1) {
            return None;
        }
        if n < self.lowest || n >= self.lowest + self.coeffs.len() as i64 {
            Some(FFElt::ZERO)
        } else {
            Some(self.coeffs[(n - self.lowest) as usize])
        }
    }

    /// Iterates over the known nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, FFElt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, &c)| (self.lowest + i as i64, c))
    }

    fn check_field(&self, other: &USeries) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MismatchedField)
        }
    }

    pub fn add(&self, other: &USeries) -> Result<USeries> {
        self.check_field(other)?;
        let prec = self.prec.min_with(other.prec);
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            return Ok(USeries { field: self.field.clone(), lowest: 0, coeffs: Vec::new(), prec });
        }
        let lo = min(
            if self.coeffs.is_empty() { i64::MAX } else { self.lowest },
            if other.coeffs.is_empty() { i64::MAX } else { other.lowest },
        );
        let hi = (self.lowest + self.coeffs.len() as i64).max(other.lowest + other.coeffs.len() as i64);
        let mut coeffs = vec![FFElt::ZERO; (hi - lo) as usize];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[(self.lowest + i as i64 - lo) as usize] = c;
        }
        for (i, &c) in other.coeffs.iter().enumerate() {
            let idx = (other.lowest + i as i64 - lo) as usize;
            coeffs[idx] = self.field.add(coeffs[idx], c);
        }
        Ok(USeries::new(self.field.clone(), lo, coeffs, prec))
    }

    pub fn neg(&self) -> USeries {
        let coeffs = self.coeffs.iter().map(|&c| self.field.neg(c)).collect();
        USeries { field: self.field.clone(), lowest: self.lowest, coeffs, prec: self.prec }
    }

    pub fn sub(&self, other: &USeries) -> Result<USeries> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &USeries) -> Result<USeries> {
        self.check_field(other)?;
        // prec = min(a.prec + val(b), b.prec + val(a)), with the pessimistic
        // lower bound standing in for an uncertain valuation.
        let prec = match (self.prec, other.prec) {
            (Prec::Exact, Prec::Exact) => Prec::Exact,
            _ => {
                let pa = match (self.prec, other.val().lower_bound()) {
                    (Prec::Exact, _) => Prec::Exact,
                    (Prec::Mod(n), Some(v)) => Prec::Mod(n + v),
                    // other is exactly zero: product is exactly zero
                    (Prec::Mod(_), None) => Prec::Exact,
                };
                let pb = match (other.prec, self.val().lower_bound()) {
                    (Prec::Exact, _) => Prec::Exact,
                    (Prec::Mod(n), Some(v)) => Prec::Mod(n + v),
                    (Prec::Mod(_), None) => Prec::Exact,
                };
                pa.min_with(pb)
            }
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Ok(USeries { field: self.field.clone(), lowest: 0, coeffs: Vec::new(), prec });
        }
        let lo = self.lowest + other.lowest;
        let mut coeffs = vec![FFElt::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = self.field.add(coeffs[i + j], self.field.mul(a, b));
            }
        }
        Ok(USeries::new(self.field.clone(), lo, coeffs, prec))
    }

    pub fn mul_elt(&self, c: FFElt) -> USeries {
        if c.is_zero() {
            return match self.prec {
                Prec::Exact => USeries::zero(self.field.clone()),
                // zero times un unknown tail is still unknown past the bound
                Prec::Mod(n) => USeries::zero_prec(self.field.clone(), n + self.val().lower_bound().unwrap_or(0)),
            };
        }
        let coeffs = self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect();
        USeries { field: self.field.clone(), lowest: self.lowest, coeffs, prec: self.prec }
    }

    /// Multiplication by the monomial `u^k`.
    pub fn shift(&self, k: i64) -> USeries {
        let mut s = USeries {
            field: self.field.clone(),
            lowest: self.lowest + k,
            coeffs: self.coeffs.clone(),
            prec: self.prec.shift(k),
        };
        if s.coeffs.is_empty() {
            s.lowest = 0;
        }
        s
    }

    /// Two-sided inverse.  Works directly for monomials and for series of
    /// finite precision; a non-monomial exact series has no finite
    /// representation of its inverse, use [`USeries::inv_to`].
    pub fn inv(&self) -> Result<USeries> {
        match self.prec {
            Prec::Exact => {
                if self.coeffs.is_empty() {
                    return Err(Error::ZeroToPrecision);
                }
                if self.coeffs.len() == 1 {
                    let c = self.field.inv(self.coeffs[0])?;
                    return Ok(USeries::monomial(self.field.clone(), c, -self.lowest));
                }
                Err(Error::PrecisionInsufficient(
                    "inverse of a non-monomial exact series needs a target precision".into(),
                ))
            }
            Prec::Mod(n) => {
                let v = match self.val() {
                    Val::Exact(v) => v,
                    _ => return Err(Error::ZeroToPrecision),
                };
                self.inv_to(n - 2 * v)
            }
        }
    }

    /// Inverse known modulo `u^target`.
    pub fn inv_to(&self, target: i64) -> Result<USeries> {
        let v = match self.val() {
            Val::Exact(v) => v,
            _ => return Err(Error::ZeroToPrecision),
        };
        // a monomial inverts exactly whatever the target
        if self.prec.is_exact() && self.coeffs.len() == 1 {
            let c = self.field.inv(self.coeffs[0])?;
            return Ok(USeries::monomial(self.field.clone(), c, -v));
        }
        // justified output precision: prec(a) - 2 val(a), capped by target
        let out_prec = match self.prec {
            Prec::Exact => target,
            Prec::Mod(n) => min(target, n - 2 * v),
        };
        let len = (out_prec + v).max(0) as usize; // unit-part coefficients needed
        let unit0 = self.coeffs[0];
        let inv0 = self.field.inv(unit0)?;
        let mut inv_coeffs = vec![FFElt::ZERO; len];
        if len > 0 {
            inv_coeffs[0] = inv0;
            for n in 1..len {
                // b_n = -inv0 * sum_{k=1..n} a_k b_{n-k}
                let mut acc = FFElt::ZERO;
                for k in 1..=n {
                    let a_k = if k < self.coeffs.len() { self.coeffs[k] } else { FFElt::ZERO };
                    if a_k.is_zero() {
                        continue;
                    }
                    acc = self.field.add(acc, self.field.mul(a_k, inv_coeffs[n - k]));
                }
                inv_coeffs[n] = self.field.neg(self.field.mul(inv0, acc));
            }
        }
        Ok(USeries::new(self.field.clone(), -v, inv_coeffs, Prec::Mod(out_prec)))
    }

    /// The Frobenius substitution: `x -> x^p` on coefficients, `u -> u^p`.
    /// An unknown tail term of degree `>= N` maps to degree `>= pN`, so the
    /// output precision is `p` times the input precision.
    pub fn phi(&self) -> USeries {
        let p = self.field.p() as i64;
        let prec = match self.prec {
            Prec::Exact => Prec::Exact,
            Prec::Mod(n) => Prec::Mod(p * n),
        };
        if self.coeffs.is_empty() {
            return USeries { field: self.field.clone(), lowest: 0, coeffs: Vec::new(), prec };
        }
        let lo = p * self.lowest;
        let len = (self.coeffs.len() - 1) * p as usize + 1;
        let mut coeffs = vec![FFElt::ZERO; len];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * p as usize] = self.field.frobenius(c);
        }
        USeries::new(self.field.clone(), lo, coeffs, prec)
    }

    /// Truncates to precision `n` (known modulo `u^n`).
    pub fn truncate(&self, n: i64) -> USeries {
        let prec = self.prec.min_with(Prec::Mod(n));
        USeries::new(self.field.clone(), self.lowest, self.coeffs.clone(), prec)
    }

    /// The terms of degree `< n`.  Fully determined (hence exact) whenever
    /// the precision covers them.
    pub fn take_below(&self, n: i64) -> USeries {
        let mut coeffs = self.coeffs.clone();
        if self.lowest < n {
            let keep = ((n - self.lowest) as usize).min(coeffs.len());
            coeffs.truncate(keep);
        } else {
            coeffs.clear();
        }
        let prec = if self.prec.covers(n) { Prec::Exact } else { self.prec };
        USeries::new(self.field.clone(), self.lowest, coeffs, prec)
    }

    /// The terms of degree `>= n`, divided by `u^n`.
    pub fn take_from(&self, n: i64) -> USeries {
        let mut s = self.clone();
        if s.lowest < n {
            let drop = ((n - s.lowest) as usize).min(s.coeffs.len());
            s.coeffs.drain(..drop);
            s.lowest = n;
        }
        s.lowest -= n;
        s.prec = s.prec.shift(-n);
        s.normalize();
        s
    }

    /// True when all known coefficients agree and the comparison is
    /// justified below `upto`.
    pub fn agrees_with(&self, other: &USeries, upto: i64) -> bool {
        for n in min(self.lowest, other.lowest)..upto {
            match (self.coeff(n), other.coeff(n)) {
                (Some(a), Some(b)) if a == b => {}
                (None, _) | (_, None) => return true, // beyond shared precision
                _ => return false,
            }
        }
        true
    }

    /// Certain integrality check: `Ok(true)`/`Ok(false)` when decidable.
    pub fn is_integral(&self) -> Result<bool> {
        match self.val() {
            Val::Exact(v) => Ok(v >= 0),
            Val::Infinite => Ok(true),
            Val::AtLeast(n) => {
                if n >= 0 {
                    Ok(true)
                } else {
                    Err(Error::PrecisionInsufficient("valuation sign undecidable".into()))
                }
            }
        }
    }

    /// Certain `val >= bound` check.
    pub fn val_at_least(&self, bound: i64) -> Result<bool> {
        match self.val() {
            Val::Exact(v) => Ok(v >= bound),
            Val::Infinite => Ok(true),
            Val::AtLeast(n) => {
                if n >= bound {
                    Ok(true)
                } else {
                    Err(Error::PrecisionInsufficient("valuation bound undecidable".into()))
                }
            }
        }
    }

    /// Canonical text form, e.g. `1 + 2*u^3` or `a^2*u^4 + u^6`.
    pub fn render(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (n, c) in self.terms() {
            let coeff = self.field.format_elt(c);
            let needs_parens = coeff.contains('+');
            let coeff = if needs_parens { alloc::format!("({coeff})") } else { coeff };
            let mut term = String::new();
            if n == 0 {
                term.push_str(&coeff);
            } else {
                let upart = if n == 1 { String::from("u") } else { alloc::format!("u^{n}") };
                if coeff == "1" {
                    term.push_str(&upart);
                } else {
                    write!(term, "{coeff}*{upart}").unwrap();
                }
            }
            parts.push(term);
        }
        let body = if parts.is_empty() { String::from("0") } else { parts.join(" + ") };
        match self.prec {
            Prec::Exact => body,
            Prec::Mod(n) => alloc::format!("{body} + O(u^{n})"),
        }
    }
}

impl core::fmt::Display for USeries {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(out, "{}", self.render())
    }
}

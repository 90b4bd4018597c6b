//! Classification of simple objects by periodic integer sequences.
//!
//! A periodic sequence `(n_i)` with `0 <= n_i <= e*r` names the module
//! `M(n_i)` with `phi(e_i) = u^(n_i) e_(i+1)` (indices cyclic).  Its
//! numeric invariants are the base-p folds
//! `s_i = n_i p^(d-1) + n_(i+1) p^(d-2) + ... + n_(i+d-1)` and the exact
//! rationals `t_i = s_i / (p^d - 1)` taken modulo 1; the sequence is in
//! the class S when the `t_i` are pairwise distinct.  All congruence
//! tests are integer arithmetic on the `s_i`; fractions only appear in
//! reports.
//!
//! The greatest element of the lattice poset of `M(n_i)` has a closed
//! form: reduce `s_i` modulo `p^d - 1` to `s'_i` with quotient `q_i`, and
//! let `m_i` be the leading base-p digit of `s'_i` (equivalently digit
//! `i` of the `d`-digit expansion of `s'_0`).  Rescaling the basis by
//! `u^(-q_i)` exhibits `M(m_i)`; the relation `p q_i + m_i = q_(i+1) + n_i`
//! pins the digit alignment and is verified on every output.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FFElt, FinField};
use crate::matrix::SeriesMatrix;
use crate::module::{Height, PhiModule};
use crate::series::USeries;

/// Reduced fraction in `[0, 1)`, used for the invariants `t_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Frac {
    pub num: i64,
    pub den: i64,
}

impl Frac {
    /// `num/den` reduced modulo 1.
    pub fn new_mod1(num: i64, den: i64) -> Frac {
        debug_assert!(den > 0);
        let num = num.rem_euclid(den);
        let g = gcd64(num, den);
        Frac { num: num / g, den: den / g }
    }
}

impl core::fmt::Display for Frac {
    fn fmt(&self, out: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(out, "{}/{}", self.num, self.den)
    }
}

fn gcd64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs().max(1), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A periodic sequence naming a (candidate) simple object, stored with
/// its minimal period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleSeq {
    pub p: u32,
    pub f: u32,
    pub e: u32,
    pub r: Height,
    n: Vec<u32>,
}

/// All derived invariants of a sequence.
#[derive(Debug, Clone)]
pub struct SeqInvariants {
    pub d: usize,
    pub s: Vec<i64>,
    pub t: Vec<Frac>,
    pub in_s: bool,
    pub in_smax: bool,
    pub in_smin: bool,
}

impl SimpleSeq {
    pub fn new(p: u32, f: u32, e: u32, r: Height, period: &[u32]) -> Result<SimpleSeq> {
        if period.is_empty() {
            return Err(Error::Invalid("empty period".to_string()));
        }
        if let Some(er) = r.er(e) {
            if period.iter().any(|&n| n as i64 > er) {
                return Err(Error::Invalid(format!("sequence value exceeds e*r = {er}")));
            }
        }
        // reduce to the minimal period
        let len = period.len();
        let mut d = len;
        'outer: for cand in 1..len {
            if len % cand != 0 {
                continue;
            }
            for i in 0..len {
                if period[i] != period[i % cand] {
                    continue 'outer;
                }
            }
            d = cand;
            break;
        }
        let n = period[..d].to_vec();
        (p as i64)
            .checked_pow(d as u32)
            .ok_or_else(|| Error::Invalid("p^d overflows".to_string()))?;
        Ok(SimpleSeq { p, f, e, r, n })
    }

    pub fn period(&self) -> &[u32] {
        &self.n
    }

    /// The dimension: the smallest period.
    pub fn d(&self) -> usize {
        self.n.len()
    }

    fn pd_minus_1(&self) -> i64 {
        (self.p as i64).pow(self.d() as u32) - 1
    }

    /// `s_i = n_i p^(d-1) + n_(i+1) p^(d-2) + ... + n_(i+d-1)`.
    pub fn s_vector(&self) -> Vec<i64> {
        let d = self.d();
        let p = self.p as i64;
        (0..d)
            .map(|i| {
                let mut acc = 0i64;
                for j in 0..d {
                    acc = acc * p + self.n[(i + j) % d] as i64;
                }
                acc
            })
            .collect()
    }

    /// `t_i = s_i / (p^d - 1)` in `[0, 1)`.
    pub fn t_vector(&self) -> Vec<Frac> {
        let den = self.pd_minus_1().max(1);
        self.s_vector().into_iter().map(|s| Frac::new_mod1(s, den)).collect()
    }

    /// Membership in S: the `t_i` are pairwise distinct modulo 1,
    /// equivalently the `s_i` are pairwise distinct modulo `p^d - 1`.
    pub fn in_s(&self) -> bool {
        let den = self.pd_minus_1();
        let mut residues: Vec<i64> = self.s_vector().iter().map(|s| s.rem_euclid(den)).collect();
        residues.sort_unstable();
        residues.windows(2).all(|w| w[0] != w[1])
    }

    /// `m = min(er, p-1)`, the value cap of the maximal class.
    pub fn value_cap(&self) -> i64 {
        match self.r.er(self.e) {
            Some(er) => er.min(self.p as i64 - 1),
            None => self.p as i64 - 1,
        }
    }

    /// Values in `[0, m]`, excluding the constant sequence `p-1`.
    pub fn in_smax(&self) -> bool {
        let cap = self.value_cap();
        if self.n.iter().any(|&x| x as i64 > cap) {
            return false;
        }
        !(self.n.iter().all(|&x| x as i64 == self.p as i64 - 1))
    }

    /// Values in `[er-m, er]`, excluding the constant sequence `er-(p-1)`.
    pub fn in_smin(&self) -> Result<bool> {
        let er = self.r.er(self.e).ok_or(Error::UnboundedHeight)?;
        let cap = self.value_cap();
        if self.n.iter().any(|&x| (x as i64) < er - cap) {
            return Ok(false);
        }
        Ok(!(self.n.iter().all(|&x| x as i64 == er - (self.p as i64 - 1))))
    }

    pub fn invariants(&self) -> Result<SeqInvariants> {
        Ok(SeqInvariants {
            d: self.d(),
            s: self.s_vector(),
            t: self.t_vector(),
            in_s: self.in_s(),
            in_smax: self.in_smax(),
            in_smin: if self.r.is_finite() { self.in_smin()? } else { false },
        })
    }

    /// The module `M(n_i)` over the given field, which must be
    /// `GF(p^f)` for this sequence's parameters.
    pub fn build_module(&self, field: &Arc<FinField>) -> Result<PhiModule> {
        if field.p() != self.p || field.f() != self.f {
            return Err(Error::ParameterMismatch("field does not match the sequence".to_string()));
        }
        let d = self.d();
        let frob = SeriesMatrix::from_fn(field.clone(), d, d, |i, j| {
            if (j + 1) % d == i {
                USeries::monomial(field.clone(), FFElt::ONE, self.n[j] as i64)
            } else {
                USeries::zero(field.clone())
            }
        });
        PhiModule::new_unchecked(field.clone(), self.e, self.r, frob)
    }

    /// The dual sequence `(er - n_i)`.
    pub fn dual_seq(&self) -> Result<SimpleSeq> {
        let er = self.r.er(self.e).ok_or(Error::UnboundedHeight)?;
        let n: Vec<u32> = self.n.iter().map(|&x| (er - x as i64) as u32).collect();
        SimpleSeq::new(self.p, self.f, self.e, self.r, &n)
    }

    /// Closed form of the greatest element: the maximal-class sequence
    /// `(m_i)` and the rescaling exponents `(q_i)`.  Requires membership
    /// in S (outside it the output period degenerates, which is reported
    /// rather than computed).
    pub fn max_closed_form(&self) -> Result<(SimpleSeq, Vec<i64>)> {
        if !self.in_s() {
            return Err(Error::NotInS);
        }
        let (m, q) = max_rescale_exponents(self.p as i64, &self.n)?;
        let seq = SimpleSeq::new(self.p, self.f, self.e, self.r, &m)?;
        Ok((seq, q))
    }

    /// Closed form of the smallest element: `er - max_closed_form(er - n)`.
    pub fn min_closed_form(&self) -> Result<SimpleSeq> {
        let er = self.r.er(self.e).ok_or(Error::UnboundedHeight)?;
        let dual = self.dual_seq()?;
        if !dual.in_s() {
            return Err(Error::NotInS);
        }
        let (mx, _) = dual.max_closed_form()?;
        // expand back to this period length before dualizing entrywise
        let d = self.d().max(mx.d());
        let n: Vec<u32> = (0..d).map(|i| (er - mx.n[i % mx.d()] as i64) as u32).collect();
        SimpleSeq::new(self.p, self.f, self.e, self.r, &n)
    }

    /// Tame inertia weights: the maximal-class digits (the base-p digits
    /// of `t`), as a sorted multiset.
    pub fn tame_weights(&self) -> Result<Vec<u32>> {
        let (mx, _) = self.max_closed_form()?;
        let d = self.d();
        let mut w: Vec<u32> = (0..d).map(|i| mx.n[i % mx.d()]).collect();
        w.sort_unstable();
        Ok(w)
    }
}

/// Raw closed-form arithmetic on a period: quotients `q_i` and digits
/// `m_i`, with the defining relation `p q_i + m_i = q_(i+1) + n_i`
/// verified.  Valid for any periodic exponent cycle; the caller decides
/// whether membership in S is required.
pub(crate) fn max_rescale_exponents(p: i64, n: &[u32]) -> Result<(Vec<u32>, Vec<i64>)> {
    let d = n.len();
    let modulus = p
        .checked_pow(d as u32)
        .ok_or_else(|| Error::Invalid("p^d overflows".to_string()))?
        - 1;
    let mut s = Vec::with_capacity(d);
    for i in 0..d {
        let mut acc = 0i64;
        for j in 0..d {
            acc = acc * p + n[(i + j) % d] as i64;
        }
        s.push(acc);
    }
    let lead = p.pow(d as u32 - 1);
    let mut m = Vec::with_capacity(d);
    let mut q = Vec::with_capacity(d);
    for &si in &s {
        let sp = si.rem_euclid(modulus);
        q.push((si - sp) / modulus);
        m.push((sp / lead) as u32);
    }
    for i in 0..d {
        let lhs = p * q[i] + m[i] as i64;
        let rhs = q[(i + 1) % d] + n[i] as i64;
        if lhs != rhs {
            return Err(Error::Invalid(format!(
                "digit relation failed at index {i}: p q_i + m_i = {lhs}, q_(i+1) + n_i = {rhs}"
            )));
        }
    }
    Ok((m, q))
}

/// Smallest nonnegative shift `b` with `b_seq[(i+b) mod d] = a_seq[i]`
/// for all `i`, witnessing an isomorphism of the named modules.  For
/// sequences in S the absence of a shift certifies non-isomorphism.
pub fn iso_simple(a: &SimpleSeq, b: &SimpleSeq) -> Result<Option<usize>> {
    if a.p != b.p || a.f != b.f || a.e != b.e || a.r != b.r {
        return Err(Error::ParameterMismatch("iso test needs equal (p, f, e, r)".to_string()));
    }
    if a.d() != b.d() {
        return Ok(None);
    }
    let d = a.d();
    'shift: for s in 0..d {
        for i in 0..d {
            if b.n[(i + s) % d] != a.n[i] {
                continue 'shift;
            }
        }
        return Ok(Some(s));
    }
    Ok(None)
}

/// Description of the solutions of `phi^d(x) = u^s x` in `M(n_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobSolution {
    /// The unique coordinate index carrying solutions.
    pub index: usize,
    /// Exponent: solutions are `alpha u^v e_index`.
    pub v: i64,
    /// GF(p)-degree of the scalar field `k ∩ GF(p^d)`.
    pub scalar_degree: u32,
}

/// Solves `phi^d(x) = u^exp x` in `M(n_i)` (integral solutions) or in
/// `M(n_i)[1/u]` (`laurent = true`): nonzero solutions exist exactly when
/// `exp - s_i` is a (nonnegative, resp. arbitrary) multiple of `p^d - 1`
/// for the necessarily unique index `i`.
pub fn solve_frob_eq(seq: &SimpleSeq, exp: i64, laurent: bool) -> Result<Option<FrobSolution>> {
    if !seq.in_s() {
        return Err(Error::NotInS);
    }
    if exp < 0 {
        return Err(Error::Invalid("exponent must be nonnegative".to_string()));
    }
    let den = seq.pd_minus_1();
    let mut found: Option<FrobSolution> = None;
    for (i, &si) in seq.s_vector().iter().enumerate() {
        let diff = exp - si;
        if diff.rem_euclid(den) != 0 {
            continue;
        }
        let v = diff.div_euclid(den);
        if !laurent && v < 0 {
            continue;
        }
        if found.is_some() {
            return Err(Error::NotInS); // distinct t_i rule this out
        }
        found = Some(FrobSolution {
            index: i,
            v,
            scalar_degree: crate::field::gcd(seq.f, seq.d() as u32),
        });
    }
    Ok(found)
}

/// Whether the greatest elements of the two named modules are isomorphic:
/// `t = p^b t'` modulo 1 for some shift `b`, as an exact integer
/// congruence over the common denominator.
pub fn same_max_class(a: &SimpleSeq, b: &SimpleSeq) -> Result<bool> {
    if a.p != b.p {
        return Err(Error::ParameterMismatch("class test needs equal p".to_string()));
    }
    let p = a.p as i128;
    let (da, db) = (a.d() as u32, b.d() as u32);
    let l = lcm32(da, db);
    let big = p.checked_pow(l).ok_or_else(|| Error::Invalid("p^lcm overflows".to_string()))? - 1;
    let da_den = p.pow(da) - 1;
    let db_den = p.pow(db) - 1;
    let sa = a.s_vector()[0] as i128 * (big / da_den);
    let sb = b.s_vector()[0] as i128 * (big / db_den);
    let mut pb = 1i128;
    for _ in 0..l {
        if (sa - pb * sb).rem_euclid(big) == 0 {
            return Ok(true);
        }
        pb = pb * p % big;
    }
    Ok(false)
}

fn lcm32(a: u32, b: u32) -> u32 {
    a / crate::field::gcd(a, b) * b
}

/// Recognizes a purely cyclic monomial Frobenius matrix: every column has
/// a single nonzero entry that is an exact monomial with coefficient 1,
/// and the positions form one cycle.  Returns the basis indices along the
/// cycle and the exponent sequence read along it.
pub fn detect_cyclic(m: &PhiModule) -> Result<Option<(Vec<usize>, Vec<u32>)>> {
    let d = m.rank();
    if d == 0 {
        return Ok(None);
    }
    let mut row_of = vec![usize::MAX; d];
    let mut exp_of = vec![0u32; d];
    for j in 0..d {
        let mut nonzero = None;
        for i in 0..d {
            let entry = m.frob().at(i, j);
            if entry.is_zero_exact() {
                continue;
            }
            let mut terms = entry.terms();
            match (entry.prec().is_exact(), terms.next(), terms.next()) {
                (true, Some((n, c)), None) if c == FFElt::ONE && n >= 0 => {
                    if nonzero.is_some() {
                        return Ok(None);
                    }
                    nonzero = Some((i, n as u32));
                }
                _ => return Ok(None),
            }
        }
        match nonzero {
            Some((i, n)) => {
                row_of[j] = i;
                exp_of[j] = n;
            }
            None => return Ok(None),
        }
    }
    let mut seen = vec![false; d];
    let mut positions = Vec::with_capacity(d);
    let mut seq = Vec::with_capacity(d);
    let mut cur = 0usize;
    for _ in 0..d {
        if seen[cur] {
            return Ok(None);
        }
        seen[cur] = true;
        positions.push(cur);
        seq.push(exp_of[cur]);
        cur = row_of[cur];
    }
    if cur != 0 {
        return Ok(None);
    }
    Ok(Some((positions, seq)))
}

/// CSV classification table: one row per sequence.
pub fn classification_csv(rows: &[SimpleSeq]) -> Result<String> {
    use core::fmt::Write;
    let mut out = String::from("n,d,s,t,in_s,in_smax,in_smin,max_class,weights\n");
    for seq in rows {
        let inv = seq.invariants()?;
        let n_str: Vec<String> = seq.period().iter().map(|x| x.to_string()).collect();
        let s_str: Vec<String> = inv.s.iter().map(|x| x.to_string()).collect();
        let t_str: Vec<String> = inv.t.iter().map(|x| x.to_string()).collect();
        let (max_class, weights) = if inv.in_s {
            let (mx, _) = seq.max_closed_form()?;
            let m_str: Vec<String> = mx.period().iter().map(|x| x.to_string()).collect();
            let w: Vec<String> = seq.tame_weights()?.iter().map(|x| x.to_string()).collect();
            (m_str.join(" "), w.join(" "))
        } else {
            ("-".to_string(), "-".to_string())
        };
        let _ = writeln!(
            out,
            "\"{}\",{},\"{}\",\"{}\",{},{},{},\"{}\",\"{}\"",
            n_str.join(" "),
            inv.d,
            s_str.join(" "),
            t_str.join(" "),
            inv.in_s,
            inv.in_smax,
            inv.in_smin,
            max_class,
            weights
        );
    }
    Ok(out)
}

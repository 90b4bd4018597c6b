//! The inclusion-ordered set of height-bounded lattices inside `M[1/u]`,
//! its supremum/infimum structure, and the greatest/smallest-element
//! functors with their abelian-category consequences.
//!
//! A lattice is stored by its canonical Hermite basis relative to the
//! standard coordinates of an ambient module, so equality of lattices is
//! structural equality of bases.  Membership in the height-`r` poset is
//! decided exactly: the Frobenius matrix in the lattice basis must be
//! integral, and `u^(er)` times its inverse as well.
//!
//! The poset is enumerated exhaustively inside the proven window
//! `u^t M ⊆ L ⊆ u^(-t) M`, `t = floor((er+1)/(p-1))`: every member's
//! canonical basis is lower-triangular with pivot exponents in `[-t, t]`
//! and reduced entries, a finite list.  The greatest element (`max_r`)
//! only needs the sublattices containing `M`, the smallest (`min_r`) only
//! those contained in it, which keeps the searches small; `min_r` is
//! computed by the duality route and cross-checked against the direct
//! census whenever that is feasible.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::field::FFElt;
use crate::matrix::SeriesMatrix;
use crate::module::{self, Height, PhiModule, PhiMorphism};
use crate::series::{USeries, Val};
use crate::simple;

/// A full-rank `k[[u]]`-lattice inside `M[1/u]`, in canonical Hermite
/// coordinates relative to the ambient standard basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    ambient: PhiModule,
    basis: SeriesMatrix,
}

impl Lattice {
    /// The standard lattice (identity basis).
    pub fn standard(ambient: &PhiModule) -> Lattice {
        let basis = SeriesMatrix::identity(ambient.field().clone(), ambient.rank());
        Lattice { ambient: ambient.clone(), basis }
    }

    /// Canonicalizes a generating set (columns) into a lattice.
    pub fn from_generators(ambient: &PhiModule, gens: &SeriesMatrix) -> Result<Lattice> {
        if gens.rows() != ambient.rank() {
            return Err(Error::DimensionMismatch("generator rows must match ambient rank".to_string()));
        }
        let basis = SeriesMatrix::hnf_lattice(gens, ambient.work_prec())?;
        Ok(Lattice { ambient: ambient.clone(), basis })
    }

    /// Trusts that `basis` is already in canonical form.
    pub(crate) fn from_canonical(ambient: &PhiModule, basis: SeriesMatrix) -> Lattice {
        Lattice { ambient: ambient.clone(), basis }
    }

    pub fn ambient(&self) -> &PhiModule {
        &self.ambient
    }

    pub fn basis(&self) -> &SeriesMatrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// `u^k * L`.
    pub fn rescale(&self, k: i64) -> Lattice {
        Lattice { ambient: self.ambient.clone(), basis: self.basis.shift(k) }
    }

    pub fn is_standard(&self) -> bool {
        self.basis == SeriesMatrix::identity(self.ambient.field().clone(), self.rank())
    }

    fn basis_inverse(&self) -> Result<SeriesMatrix> {
        // canonical bases are triangular with monomial pivots, so the
        // determinant is an exact monomial and the inverse is exact
        let det = self.basis.determinant()?;
        let adj = self.basis.adjugate()?;
        let det_inv = det.inv()?;
        adj.scale(&det_inv)
    }

    /// The matrix of the ambient Frobenius in this lattice's basis:
    /// `B^(-1) A phi(B)`.
    pub fn phi_matrix(&self) -> Result<SeriesMatrix> {
        let binv = self.basis_inverse()?;
        binv.mul(&self.ambient.frob().mul(&self.basis.map_phi())?)
    }

    /// The lattice viewed as a module in its own basis (same parameters).
    pub fn as_module(&self) -> Result<PhiModule> {
        PhiModule::new_unchecked(
            self.ambient.field().clone(),
            self.ambient.e(),
            self.ambient.r(),
            self.phi_matrix()?,
        )
    }

    /// Membership in the height-`r` poset: the lattice is phi-stable and
    /// satisfies the height bound.  For an unbounded ambient only
    /// stability is required.
    pub fn in_fr(&self) -> Result<bool> {
        let a = self.phi_matrix()?;
        if !a.is_integral()? {
            return Ok(false);
        }
        match self.ambient.er() {
            None => Ok(true),
            Some(er) => {
                // largest divisor exponent = val(det) - min val of the
                // (d-1)-minors; both sides exact for canonical bases
                if self.rank() == 0 {
                    return Ok(true);
                }
                let det_val = match a.determinant()?.val() {
                    Val::Exact(v) => v,
                    Val::Infinite => return Ok(false),
                    Val::AtLeast(_) => {
                        return Err(Error::PrecisionInsufficient("lattice determinant".to_string()))
                    }
                };
                let adj = a.adjugate()?;
                let mut min_adj: Option<i64> = None;
                for i in 0..adj.rows() {
                    for j in 0..adj.cols() {
                        match adj.at(i, j).val() {
                            Val::Exact(v) => min_adj = Some(min_adj.map_or(v, |m: i64| m.min(v))),
                            Val::Infinite => {}
                            Val::AtLeast(n) => {
                                if min_adj.map_or(true, |m| n <= m) {
                                    return Err(Error::PrecisionInsufficient(
                                        "lattice height check".to_string(),
                                    ));
                                }
                            }
                        }
                    }
                }
                let min_adj = if self.rank() == 1 { 0 } else { min_adj.unwrap_or(0) };
                Ok(det_val - min_adj <= er)
            }
        }
    }

    /// Supremum in the poset: the sum, computed in `M[1/u]`.
    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_same_ambient(other)?;
        let gens = self.basis.hstack(&other.basis)?;
        Lattice::from_generators(&self.ambient, &gens)
    }

    /// Infimum in the poset: the intersection, via the dual-lattice
    /// identity (the dual of a sum is the intersection of duals).
    pub fn intersection(&self, other: &Lattice) -> Result<Lattice> {
        self.check_same_ambient(other)?;
        let d1 = dual_basis(&self.basis)?;
        let d2 = dual_basis(&other.basis)?;
        let gens = d1.hstack(&d2)?;
        let sum_dual = SeriesMatrix::hnf_lattice(&gens, self.ambient.work_prec())?;
        let back = dual_basis(&sum_dual)?;
        let basis = SeriesMatrix::hnf_lattice(&back, self.ambient.work_prec())?;
        Ok(Lattice { ambient: self.ambient.clone(), basis })
    }

    /// `other ⊆ self`, decided exactly.
    pub fn contains(&self, other: &Lattice) -> Result<bool> {
        self.check_same_ambient(other)?;
        let binv = self.basis_inverse()?;
        binv.mul(&other.basis)?.is_integral()
    }

    /// Elementary divisor exponents of the basis relative to the standard
    /// lattice (negative exponents for directions sticking out of it).
    pub fn divisors_rel_std(&self) -> Result<Vec<i64>> {
        if self.rank() == 0 {
            return Ok(Vec::new());
        }
        // shift to an integral matrix, take divisors, shift back
        let mut min_val = 0i64;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                if let Val::Exact(v) = self.basis.at(i, j).val() {
                    min_val = min_val.min(v);
                }
            }
        }
        let shifted = self.basis.shift(-min_val);
        let divs = shifted.divisors_via_minors()?;
        Ok(divs.into_iter().map(|a| a + min_val).collect())
    }

    fn check_same_ambient(&self, other: &Lattice) -> Result<()> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(Error::ParameterMismatch("lattices live in different ambients".to_string()))
        }
    }
}

/// Basis of the dual lattice with respect to the standard pairing:
/// the inverse transpose, rescaled by a unit column factor to stay exact.
fn dual_basis(basis: &SeriesMatrix) -> Result<SeriesMatrix> {
    let det = basis.determinant()?;
    let v = match det.val() {
        Val::Exact(v) => v,
        _ => return Err(Error::SingularToPrecision),
    };
    // lattice((B^T)^-1) = lattice(adj(B^T)) shifted by -val(det); dropping
    // the unit part of the determinant only rescales columns by units
    Ok(basis.transpose().adjugate()?.shift(-v))
}

// ---------------------------------------------------------------------------
// census enumeration
// ---------------------------------------------------------------------------

/// Checks the exhaustive-census size guard: the window data carries
/// `2*d*t` coefficients over `k`, and `|k|^(2dt)` must stay below `2^24`.
fn census_guard(q: u32, d: usize, t: i64) -> Result<()> {
    let cells = 2 * d as u64 * t.max(0) as u64;
    let mut acc: u64 = 1;
    let mut bits = 0u32;
    for _ in 0..cells {
        acc = acc.saturating_mul(q as u64);
        if acc > (1 << 24) {
            while acc > 1 {
                acc >>= 1;
                bits += 1;
            }
            return Err(Error::GuardExceeded { bits });
        }
    }
    Ok(())
}

/// Visits every canonical lower-triangular basis with pivot exponents in
/// `[piv_lo, piv_hi]` and entry supports in `[ent_lo, pivot)`, pruning
/// pivot combinations whose exponent sum falls outside `sum_range`.
fn visit_triangular_bases(
    m: &PhiModule,
    piv_lo: i64,
    piv_hi: i64,
    ent_lo: i64,
    sum_range: (i64, i64),
    mut visit: impl FnMut(&SeriesMatrix) -> Result<()>,
) -> Result<()> {
    let d = m.rank();
    let field = m.field().clone();
    let q = field.q() as u64;
    if d == 0 {
        let empty = SeriesMatrix::zero(field, 0, 0);
        return visit(&empty);
    }
    let mut pivots = vec![piv_lo; d];
    loop {
        let sum: i64 = pivots.iter().sum();
        if sum >= sum_range.0 && sum <= sum_range.1 {
            // entry (i, j), i > j, has support [ent_lo, pivots[i])
            let mut slots: Vec<(usize, usize, i64)> = Vec::new(); // (i, j, exponent)
            for i in 1..d {
                for j in 0..i {
                    for n in ent_lo..pivots[i] {
                        slots.push((i, j, n));
                    }
                }
            }
            let mut digits = vec![0u64; slots.len()];
            loop {
                let basis = SeriesMatrix::from_fn(field.clone(), d, d, |i, j| {
                    if i == j {
                        USeries::monomial(field.clone(), FFElt::ONE, pivots[i])
                    } else if i > j {
                        let mut s = USeries::zero(field.clone());
                        for (slot, digit) in slots.iter().zip(digits.iter()) {
                            if slot.0 == i && slot.1 == j && *digit != 0 {
                                s = s
                                    .add(&USeries::monomial(field.clone(), FFElt(*digit as u32), slot.2))
                                    .expect("same field");
                            }
                        }
                        s
                    } else {
                        USeries::zero(field.clone())
                    }
                });
                visit(&basis)?;
                // odometer
                let mut idx = 0;
                loop {
                    if idx == digits.len() {
                        break;
                    }
                    digits[idx] += 1;
                    if digits[idx] < q {
                        break;
                    }
                    digits[idx] = 0;
                    idx += 1;
                }
                if idx == digits.len() {
                    break;
                }
            }
        }
        // pivot odometer
        let mut idx = 0;
        loop {
            if idx == d {
                return Ok(());
            }
            pivots[idx] += 1;
            if pivots[idx] <= piv_hi {
                break;
            }
            pivots[idx] = piv_lo;
            idx += 1;
        }
    }
}

/// The poset of height-bounded lattices, with cover relations.
#[derive(Debug, Clone)]
pub struct FrPoset {
    pub ambient: PhiModule,
    pub elements: Vec<Lattice>,
    /// Cover pairs `(i, j)`: element `i` is covered by element `j`.
    pub covers: Vec<(usize, usize)>,
    pub max_index: usize,
    pub min_index: usize,
}

impl FrPoset {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains_lattice(&self, l: &Lattice) -> bool {
        self.elements.iter().any(|e| e == l)
    }

    /// Longest chain, counted in elements.
    pub fn longest_chain(&self) -> usize {
        let n = self.elements.len();
        if n == 0 {
            return 0;
        }
        let mut longest = vec![1usize; n];
        // covers go from smaller to larger; process in an order compatible
        // with inclusion (by relative index, i.e. valuation of det)
        let mut order: Vec<usize> = (0..n).collect();
        let key = |i: usize| -> i64 {
            self.elements[i]
                .basis()
                .determinant()
                .ok()
                .and_then(|d| d.val().exact())
                .unwrap_or(0)
        };
        order.sort_by_key(|&i| core::cmp::Reverse(key(i)));
        for &i in &order {
            for &(lo, hi) in &self.covers {
                if lo == i {
                    longest[hi] = longest[hi].max(longest[i] + 1);
                }
            }
        }
        longest.into_iter().max().unwrap_or(1)
    }

    /// DOT rendering of the Hasse diagram: nodes are labelled by the
    /// elementary divisors of the lattice relative to the standard one,
    /// greatest and smallest elements are marked.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fr_poset {\n  rankdir=BT;\n");
        for (i, l) in self.elements.iter().enumerate() {
            let divs = l.divisors_rel_std().unwrap_or_default();
            let mut label = format!("{divs:?}");
            if i == self.max_index {
                label.push_str(" (Max)");
            }
            if i == self.min_index {
                label.push_str(" (Min)");
            }
            let shape = if i == self.max_index || i == self.min_index {
                ", shape=box"
            } else {
                ""
            };
            let _ = writeln!(out, "  n{i} [label=\"{label}\"{shape}];");
        }
        for (lo, hi) in &self.covers {
            let _ = writeln!(out, "  n{lo} -> n{hi};");
        }
        out.push_str("}\n");
        out
    }

    /// CSV table: one row per element with its relative elementary
    /// divisors and flags.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("divisors,in_fr,is_max,is_min,basis\n");
        for (i, l) in self.elements.iter().enumerate() {
            let divs = l.divisors_rel_std().unwrap_or_default();
            let div_str: Vec<String> = divs.iter().map(|d| d.to_string()).collect();
            let mut basis_str = String::new();
            for r in 0..l.rank() {
                for c in 0..l.rank() {
                    if r != 0 || c != 0 {
                        basis_str.push(';');
                    }
                    let _ = write!(basis_str, "{}", l.basis().at(r, c));
                }
            }
            let _ = writeln!(
                out,
                "\"{}\",true,{},{},\"{}\"",
                div_str.join(" "),
                i == self.max_index,
                i == self.min_index,
                basis_str
            );
        }
        out
    }
}

fn sort_lattices(elements: &mut Vec<Lattice>) {
    elements.sort_by_key(|l| {
        let divs = l.divisors_rel_std().unwrap_or_default();
        let mut dump = String::new();
        for i in 0..l.rank() {
            for j in 0..l.rank() {
                let _ = write!(dump, "{}|", l.basis().at(i, j));
            }
        }
        (divs, dump)
    });
}

/// Exhaustively enumerates the poset of height-`r` lattices in
/// `M[1/u]`, with cover relations.  Requires a finite height bound and a
/// window small enough for the census guard.
pub fn enumerate_fr(m: &PhiModule) -> Result<FrPoset> {
    if !m.r().is_finite() {
        return Err(Error::UnboundedHeight);
    }
    let er = m.er().unwrap();
    let t = m.t_bound()?;
    census_guard(m.field().q(), m.rank(), t)?;
    let det_val = match m.frob().determinant()?.val() {
        Val::Exact(v) => v,
        _ => return Err(Error::SingularToPrecision),
    };
    let p = m.field().p() as i64;
    let d = m.rank() as i64;
    // 0 <= val det A_L = det_val + (p-1) * sum(pivots) <= d*er
    let lo = ceil_div(-det_val, p - 1);
    let hi = (d * er - det_val).div_euclid(p - 1);
    let mut elements: Vec<Lattice> = Vec::new();
    visit_triangular_bases(m, -t, t, -t, (lo, hi), |basis| {
        let l = Lattice::from_canonical(m, basis.clone());
        if l.in_fr()? {
            elements.push(l);
        }
        Ok(())
    })?;
    sort_lattices(&mut elements);
    build_poset(m, elements)
}

fn build_poset(m: &PhiModule, elements: Vec<Lattice>) -> Result<FrPoset> {
    let n = elements.len();
    if n == 0 {
        return Err(Error::Invalid("the poset is empty".to_string()));
    }
    let mut leq = vec![false; n * n]; // leq[i*n+j]: i subset of j
    for i in 0..n {
        for j in 0..n {
            if i == j {
                leq[i * n + j] = true;
            } else {
                leq[i * n + j] = elements[j].contains(&elements[i])?;
            }
        }
    }
    let mut covers = Vec::new();
    for i in 0..n {
        'pair: for j in 0..n {
            if i == j || !leq[i * n + j] {
                continue;
            }
            for k in 0..n {
                if k != i && k != j && leq[i * n + k] && leq[k * n + j] {
                    continue 'pair;
                }
            }
            covers.push((i, j));
        }
    }
    let mut max_index = None;
    let mut min_index = None;
    for i in 0..n {
        if (0..n).all(|j| leq[j * n + i]) {
            max_index = Some(i);
        }
        if (0..n).all(|j| leq[i * n + j]) {
            min_index = Some(i);
        }
    }
    let (Some(max_index), Some(min_index)) = (max_index, min_index) else {
        return Err(Error::Invalid(
            "enumerated poset has no unique greatest/smallest element".to_string(),
        ));
    };
    Ok(FrPoset { ambient: m.clone(), elements, covers, max_index, min_index })
}

fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + if a.rem_euclid(b) != 0 { 1 } else { 0 }
}

// ---------------------------------------------------------------------------
// Max and Min
// ---------------------------------------------------------------------------

/// Result of `max_r`/`min_r`: the object in its own basis, its lattice in
/// the ambient coordinates, and the canonical morphism (`M -> Max` resp.
/// `Min -> M`).
#[derive(Debug, Clone)]
pub struct MaxMinResult {
    pub module: PhiModule,
    pub lattice: Lattice,
    pub inclusion: PhiMorphism,
}

/// All height-admissible lattices containing the standard one.
fn census_above(m: &PhiModule) -> Result<Vec<Lattice>> {
    let t = m.t_bound()?;
    census_guard(m.field().q(), m.rank(), t)?;
    let std = Lattice::standard(m);
    let mut out = Vec::new();
    visit_triangular_bases(m, -t, 0, -t, (-t * m.rank() as i64, 0), |basis| {
        let l = Lattice::from_canonical(m, basis.clone());
        if l.contains(&std)? && l.in_fr()? {
            out.push(l);
        }
        Ok(())
    })?;
    sort_lattices(&mut out);
    Ok(out)
}

/// All height-admissible lattices inside the standard one that still
/// contain `u^t M`.
fn census_below(m: &PhiModule) -> Result<Vec<Lattice>> {
    let t = m.t_bound()?;
    census_guard(m.field().q(), m.rank(), t)?;
    let std = Lattice::standard(m);
    let mut out = Vec::new();
    visit_triangular_bases(m, 0, t, 0, (0, t * m.rank() as i64), |basis| {
        let l = Lattice::from_canonical(m, basis.clone());
        if std.contains(&l)? && l.in_fr()? {
            out.push(l);
        }
        Ok(())
    })?;
    sort_lattices(&mut out);
    Ok(out)
}

/// The greatest element of the height-`r` poset of `M[1/u]`, with the
/// canonical inclusion of `M` into it.
///
/// Uses the exhaustive census when the guard admits it; purely cyclic
/// monomial modules fall back to the closed form from the simple-object
/// classification.
pub fn max_r(m: &PhiModule) -> Result<MaxMinResult> {
    let lattice = match census_above(m) {
        Ok(list) => {
            // the top is the supremum of the list; it must itself be listed
            let mut top = Lattice::standard(m);
            for l in &list {
                top = top.sum(l)?;
            }
            if !list.iter().any(|l| l == &top) {
                return Err(Error::Invalid("census top escaped the window".to_string()));
            }
            top
        }
        Err(Error::GuardExceeded { bits }) => match simple::detect_cyclic(m)? {
            Some((positions, seq)) => {
                let (_, q) = simple::max_rescale_exponents(m.field().p() as i64, &seq)?;
                let mut exps = vec![0i64; m.rank()];
                for (slot, pos) in positions.iter().enumerate() {
                    exps[*pos] = -q[slot];
                }
                Lattice::from_canonical(m, SeriesMatrix::diag_monomials(m.field().clone(), &exps))
            }
            None => return Err(Error::GuardExceeded { bits }),
        },
        Err(e) => return Err(e),
    };
    let module = lattice.as_module()?;
    let binv = lattice.basis_inverse()?;
    let inclusion = PhiMorphism::new(m.clone(), module.clone(), binv)?;
    Ok(MaxMinResult { module, lattice, inclusion })
}

/// The smallest element of the height-`r` poset of `M[1/u]`, with the
/// canonical inclusion into `M`.  Computed by the duality route
/// (`Min(M) = dual(Max(dual M))`) and cross-checked against the direct
/// census minimum whenever that is feasible.
pub fn min_r(m: &PhiModule) -> Result<MaxMinResult> {
    if !m.r().is_finite() {
        return Err(Error::UnboundedHeight);
    }
    let md = m.dual()?;
    let mx = max_r(&md)?;
    let back = dual_basis(mx.lattice.basis())?;
    let basis = SeriesMatrix::hnf_lattice(&back, m.work_prec())?;
    let lattice = Lattice::from_canonical(m, basis);
    if let Ok(list) = census_below(m) {
        let mut bottom = Lattice::standard(m);
        for l in &list {
            bottom = bottom.intersection(l)?;
        }
        if bottom != lattice {
            return Err(Error::Invalid(
                "duality route and census disagree on the smallest element".to_string(),
            ));
        }
    }
    let module = lattice.as_module()?;
    let inclusion = PhiMorphism::new(module.clone(), m.clone(), lattice.basis().clone())?;
    Ok(MaxMinResult { module, lattice, inclusion })
}

/// Whether the canonical map into the greatest element is an isomorphism.
pub fn is_maximal(m: &PhiModule) -> Result<bool> {
    Ok(max_r(m)?.lattice.is_standard())
}

/// Whether the canonical map from the smallest element is an isomorphism.
pub fn is_minimal(m: &PhiModule) -> Result<bool> {
    Ok(min_r(m)?.lattice.is_standard())
}

// ---------------------------------------------------------------------------
// abelian-category operations in the maximal/minimal subcategories
// ---------------------------------------------------------------------------

fn require_maximal(fm: &PhiMorphism) -> Result<()> {
    if !is_maximal(&fm.source)? || !is_maximal(&fm.target)? {
        return Err(Error::NotMaximal);
    }
    Ok(())
}

fn require_minimal(fm: &PhiMorphism) -> Result<()> {
    if !is_minimal(&fm.source)? || !is_minimal(&fm.target)? {
        return Err(Error::NotMinimal);
    }
    Ok(())
}

/// Kernel in the maximal subcategory: the plain kernel, which is already
/// maximal there.
pub fn kernel_max(fm: &PhiMorphism) -> Result<PhiModule> {
    require_maximal(fm)?;
    let (ker, _) = module::kernel(fm)?;
    if ker.rank() > 0 && !is_maximal(&ker)? {
        return Err(Error::Invalid("kernel of a map of maximal objects must be maximal".to_string()));
    }
    Ok(ker)
}

/// Cokernel in the maximal subcategory: the greatest element applied to
/// the torsion-free cokernel.
pub fn cokernel_max(fm: &PhiMorphism) -> Result<PhiModule> {
    require_maximal(fm)?;
    let cok = module::cokernel_mod_torsion(fm)?;
    if cok.module.rank() == 0 {
        return Ok(cok.module);
    }
    Ok(max_r(&cok.module)?.module)
}

/// Image in the maximal subcategory.
pub fn image_max(fm: &PhiMorphism) -> Result<PhiModule> {
    require_maximal(fm)?;
    let (im, _) = module::image(fm)?;
    if im.rank() == 0 {
        return Ok(im);
    }
    Ok(max_r(&im)?.module)
}

/// Kernel in the minimal subcategory: the smallest element applied to the
/// plain kernel.
pub fn kernel_min(fm: &PhiMorphism) -> Result<PhiModule> {
    require_minimal(fm)?;
    let (ker, _) = module::kernel(fm)?;
    if ker.rank() == 0 {
        return Ok(ker);
    }
    Ok(min_r(&ker)?.module)
}

/// Cokernel in the minimal subcategory: the torsion-free cokernel, which
/// is already minimal there.
pub fn cokernel_min(fm: &PhiMorphism) -> Result<PhiModule> {
    require_minimal(fm)?;
    let cok = module::cokernel_mod_torsion(fm)?;
    if cok.module.rank() > 0 && !is_minimal(&cok.module)? {
        return Err(Error::Invalid(
            "torsion-free cokernel of a map of minimal objects must be minimal".to_string(),
        ));
    }
    Ok(cok.module)
}

// ---------------------------------------------------------------------------
// induced maps on suprema
// ---------------------------------------------------------------------------

/// A morphism between lattices presented by one matrix in the shared
/// ambient coordinates.
#[derive(Debug, Clone)]
pub struct LatticeMorphism {
    pub source: Lattice,
    pub target: Lattice,
    pub ambient_mat: SeriesMatrix,
}

impl LatticeMorphism {
    /// The rebased matrix `B_t^(-1) F B_s` of the map in the lattice bases.
    pub fn rebased(&self) -> Result<SeriesMatrix> {
        let tinv = self.target.basis_inverse()?;
        tinv.mul(&self.ambient_mat.mul(self.source.basis())?)
    }
}

/// The unique morphism induced on suprema: all inputs must restrict one
/// ambient map; the result is that map rebased to the sup lattices.
pub fn sup_map(maps: &[LatticeMorphism]) -> Result<LatticeMorphism> {
    let first = maps.first().ok_or_else(|| Error::Invalid("sup of no morphisms".to_string()))?;
    for m in maps.iter().skip(1) {
        if m.source.ambient() != first.source.ambient() || m.target.ambient() != first.target.ambient() {
            return Err(Error::ParameterMismatch("sup_map inputs share no ambient".to_string()));
        }
        if m.ambient_mat != first.ambient_mat {
            return Err(Error::InconsistentSup);
        }
    }
    let mut sup_src = first.source.clone();
    let mut sup_tgt = first.target.clone();
    for m in maps.iter().skip(1) {
        sup_src = sup_src.sum(&m.source)?;
        sup_tgt = sup_tgt.sum(&m.target)?;
    }
    let out = LatticeMorphism {
        source: sup_src,
        target: sup_tgt,
        ambient_mat: first.ambient_mat.clone(),
    };
    if !out.rebased()?.is_integral()? {
        return Err(Error::InconsistentSup);
    }
    Ok(out)
}

//! Free `k[[u]]`-modules with a semilinear Frobenius of bounded height,
//! their morphisms and the surrounding category structure.
//!
//! A module of rank `d` is presented by the `d x d` matrix of its
//! Frobenius on the standard basis (column `j` holds the coordinates of
//! `phi(e_j)`); semilinearity then forces `phi(x) = A * phi_series(x)` on
//! coordinate vectors.  The height condition `u^(er) M ⊂ <im phi>` is
//! equivalent to all elementary divisor exponents of `A` being at most
//! `e*r`, which is how it is checked.
//!
//! Morphisms are `k[[u]]`-linear maps commuting with Frobenius:
//! `F * A_src = A_tgt * phi(F)`.  Hom spaces are computed as the kernel of
//! the induced GF(p)-linear system on series coefficients, solved at the
//! working precision and at its double; a dimension mismatch between the
//! two runs is reported as a precision failure rather than silently
//! trusted.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FFElt, FinField};
use crate::matrix::SeriesMatrix;
use crate::series::{Prec, USeries, Val};

/// Height bound of a module: the exponent `r` in `u^(er) M ⊂ <im phi>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Height {
    Finite(u32),
    Unbounded,
}

impl Height {
    pub fn er(&self, e: u32) -> Option<i64> {
        match self {
            Height::Finite(r) => Some(*r as i64 * e as i64),
            Height::Unbounded => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Height::Finite(_))
    }
}

/// A free `k[[u]]`-module of finite rank with semilinear Frobenius.
#[derive(Debug, Clone)]
pub struct PhiModule {
    field: Arc<FinField>,
    e: u32,
    r: Height,
    frob: SeriesMatrix,
}

impl PartialEq for PhiModule {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.e == other.e && self.r == other.r && self.frob == other.frob
    }
}
impl Eq for PhiModule {}

/// One validation check with its witness.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub witness: String,
}

/// Outcome of [`PhiModule::validate`].
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl PhiModule {
    /// Builds a module and checks it is a valid object (integral Frobenius,
    /// injective `id ⊗ phi`, height bound).
    pub fn new(field: Arc<FinField>, e: u32, r: Height, frob: SeriesMatrix) -> Result<PhiModule> {
        let m = PhiModule::new_unchecked(field, e, r, frob)?;
        let report = m.validate()?;
        if let Some(fail) = report.first_failure() {
            return Err(Error::Invalid(format!("{}: {}", fail.name, fail.witness)));
        }
        Ok(m)
    }

    /// Builds a module without running the validator (shape checks only).
    pub fn new_unchecked(field: Arc<FinField>, e: u32, r: Height, frob: SeriesMatrix) -> Result<PhiModule> {
        if frob.rows() != frob.cols() {
            return Err(Error::NonSquare);
        }
        if *frob.field() != field {
            return Err(Error::MismatchedField);
        }
        if e == 0 {
            return Err(Error::Invalid("ramification index e must be at least 1".to_string()));
        }
        Ok(PhiModule { field, e, r, frob })
    }

    /// The rank-1 module with `phi = 1`.
    pub fn unit(field: Arc<FinField>, e: u32, r: Height) -> PhiModule {
        let frob = SeriesMatrix::identity(field.clone(), 1);
        PhiModule { field, e, r, frob }
    }

    /// The rank-0 module.
    pub fn zero_module(field: Arc<FinField>, e: u32, r: Height) -> PhiModule {
        let frob = SeriesMatrix::zero(field.clone(), 0, 0);
        PhiModule { field, e, r, frob }
    }

    pub fn field(&self) -> &Arc<FinField> {
        &self.field
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn r(&self) -> Height {
        self.r
    }

    /// `e*r`, when the height bound is finite.
    pub fn er(&self) -> Option<i64> {
        self.r.er(self.e)
    }

    pub fn rank(&self) -> usize {
        self.frob.rows()
    }

    pub fn frob(&self) -> &SeriesMatrix {
        &self.frob
    }

    /// Same parameters `(p, f, e, r)`.
    pub fn same_params(&self, other: &PhiModule) -> bool {
        self.field == other.field && self.e == other.e && self.r == other.r
    }

    /// Returns a copy regarded at a different height bound.
    pub fn with_height(&self, r: Height) -> PhiModule {
        PhiModule { field: self.field.clone(), e: self.e, r, frob: self.frob.clone() }
    }

    /// Elementary divisor exponents of the Frobenius matrix.
    pub fn divisors(&self) -> Result<Vec<i64>> {
        self.frob.divisors_via_minors()
    }

    /// Largest divisor exponent: the smallest `s` with `u^s M ⊂ <im phi>`.
    pub fn exact_height(&self) -> Result<i64> {
        Ok(self.divisors()?.last().copied().unwrap_or(0))
    }

    /// Largest degree appearing among the known terms of the Frobenius
    /// matrix entries.
    pub fn max_entry_degree(&self) -> i64 {
        let mut deg = 0i64;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                for (n, _) in self.frob.at(i, j).terms() {
                    deg = deg.max(n);
                }
            }
        }
        deg
    }

    /// The census window exponent: height-bounded lattices all lie between
    /// `u^t M` and `u^-t M`.
    pub fn t_bound(&self) -> Result<i64> {
        let p = self.field.p() as i64;
        let es = match self.r {
            Height::Finite(r) => self.e as i64 * r as i64,
            Height::Unbounded => {
                // smallest multiple of e at least the exact height
                let h = self.exact_height()?;
                let e = self.e as i64;
                e * ((h + e - 1) / e)
            }
        };
        Ok((es + 1) / (p - 1))
    }

    /// Working precision for series computations attached to this module.
    pub fn work_prec(&self) -> i64 {
        let p = self.field.p() as i64;
        let d = self.rank() as i64;
        let er = match self.r {
            Height::Finite(r) => self.e as i64 * r as i64,
            Height::Unbounded => self.exact_height().unwrap_or(0).max(1),
        };
        let t = (er + 1) / (p - 1);
        let maxdeg = self.max_entry_degree();
        er * (d + 1) + p * (t + maxdeg) + 8
    }

    /// Runs all object checks, reporting each with a witness.
    pub fn validate(&self) -> Result<ValidationReport> {
        let mut checks = Vec::new();
        let integral = self.frob.is_integral()?;
        checks.push(CheckResult {
            name: "entries-integral",
            passed: integral,
            witness: if integral {
                "all Frobenius entries have nonnegative valuation".to_string()
            } else {
                "some Frobenius entry has negative valuation".to_string()
            },
        });
        if !integral {
            return Ok(ValidationReport { checks });
        }
        let det = self.frob.determinant()?;
        let det_ok = !det.is_zero_to_prec();
        checks.push(CheckResult {
            name: "det-nonzero",
            passed: det_ok,
            witness: match det.val() {
                Val::Exact(v) => format!("det has valuation {v}"),
                _ => "determinant vanishes to precision".to_string(),
            },
        });
        if !det_ok {
            return Ok(ValidationReport { checks });
        }
        let divisors = self.divisors()?;
        match self.r {
            Height::Finite(_) => {
                let bound = self.er().unwrap();
                let worst = divisors.iter().copied().max().unwrap_or(0);
                checks.push(CheckResult {
                    name: "height",
                    passed: worst <= bound,
                    witness: format!("divisors {divisors:?}, bound e*r = {bound}"),
                });
            }
            Height::Unbounded => {
                checks.push(CheckResult {
                    name: "height",
                    passed: true,
                    witness: format!("divisors {divisors:?}, no bound (r = inf)"),
                });
            }
        }
        Ok(ValidationReport { checks })
    }

    /// Applies the semilinear Frobenius to a coordinate vector of
    /// `M[1/u]`: coefficients are twisted first, then the matrix acts.
    pub fn apply_phi(&self, v: &[USeries]) -> Result<Vec<USeries>> {
        let twisted: Vec<USeries> = v.iter().map(|s| s.phi()).collect();
        self.frob.mul_vec(&twisted)
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &PhiModule) -> Result<PhiModule> {
        if !self.same_params(other) {
            return Err(Error::ParameterMismatch("direct sum needs equal (p,f,e,r)".to_string()));
        }
        let da = self.rank();
        let db = other.rank();
        let frob = SeriesMatrix::from_fn(self.field.clone(), da + db, da + db, |i, j| {
            if i < da && j < da {
                self.frob.at(i, j).clone()
            } else if i >= da && j >= da {
                other.frob.at(i - da, j - da).clone()
            } else {
                USeries::zero(self.field.clone())
            }
        });
        Ok(PhiModule { field: self.field.clone(), e: self.e, r: self.r, frob })
    }

    /// Block-triangular extension of `quot` by `sub` with the given
    /// cocycle block.  The height bound is re-validated: triangularity
    /// does not guarantee it.
    pub fn extension_build(sub: &PhiModule, quot: &PhiModule, cocycle: &SeriesMatrix) -> Result<PhiModule> {
        if !sub.same_params(quot) {
            return Err(Error::ParameterMismatch("extension needs equal (p,f,e,r)".to_string()));
        }
        let (ds, dq) = (sub.rank(), quot.rank());
        if cocycle.rows() != ds || cocycle.cols() != dq {
            return Err(Error::DimensionMismatch(format!(
                "cocycle must be {}x{}, got {}x{}",
                ds,
                dq,
                cocycle.rows(),
                cocycle.cols()
            )));
        }
        if !cocycle.is_integral()? {
            return Err(Error::Invalid("cocycle entries must be integral".to_string()));
        }
        let frob = SeriesMatrix::from_fn(sub.field.clone(), ds + dq, ds + dq, |i, j| {
            if i < ds && j < ds {
                sub.frob.at(i, j).clone()
            } else if i >= ds && j >= ds {
                quot.frob.at(i - ds, j - ds).clone()
            } else if i < ds && j >= ds {
                cocycle.at(i, j - ds).clone()
            } else {
                USeries::zero(sub.field.clone())
            }
        });
        let m = PhiModule { field: sub.field.clone(), e: sub.e, r: sub.r, frob };
        if let Some(bound) = m.er() {
            let worst = m.exact_height()?;
            if worst > bound {
                return Err(Error::HeightViolated { divisor: worst, bound });
            }
        }
        Ok(m)
    }

    /// Dual module: Frobenius matrix `u^(er) * (A^T)^(-1)`, the mod-p
    /// specialization of the pairing `<phi x, phi' y> = u^(er) phi<x, y>`
    /// (with the constant normalized to 1).  Needs a finite height bound.
    pub fn dual(&self) -> Result<PhiModule> {
        let prec = 2 * self.work_prec() + 8;
        self.dual_at(prec)
    }

    pub fn dual_at(&self, prec: i64) -> Result<PhiModule> {
        let er = self.er().ok_or(Error::UnboundedHeight)?;
        let inv_t = self.frob.transpose().inverse_laurent(prec)?;
        let frob = inv_t.shift(er);
        if !frob.is_integral()? {
            return Err(Error::Invalid("dual Frobenius is not integral".to_string()));
        }
        Ok(PhiModule { field: self.field.clone(), e: self.e, r: self.r, frob })
    }
}

/// A module morphism: `k[[u]]`-linear map commuting with the Frobenii.
#[derive(Debug, Clone)]
pub struct PhiMorphism {
    pub source: PhiModule,
    pub target: PhiModule,
    pub mat: SeriesMatrix,
}

impl PhiMorphism {
    pub fn new(source: PhiModule, target: PhiModule, mat: SeriesMatrix) -> Result<PhiMorphism> {
        if mat.rows() != target.rank() || mat.cols() != source.rank() {
            return Err(Error::DimensionMismatch(format!(
                "morphism matrix must be {}x{}, got {}x{}",
                target.rank(),
                source.rank(),
                mat.rows(),
                mat.cols()
            )));
        }
        Ok(PhiMorphism { source, target, mat })
    }

    pub fn identity(m: &PhiModule) -> PhiMorphism {
        PhiMorphism {
            source: m.clone(),
            target: m.clone(),
            mat: SeriesMatrix::identity(m.field().clone(), m.rank()),
        }
    }

    pub fn zero(source: &PhiModule, target: &PhiModule) -> PhiMorphism {
        PhiMorphism {
            source: source.clone(),
            target: target.clone(),
            mat: SeriesMatrix::zero(source.field().clone(), target.rank(), source.rank()),
        }
    }

    /// Checks the semilinear commutation `F A_src = A_tgt phi(F)` on all
    /// coefficients below `upto`.
    pub fn commutes_to(&self, upto: i64) -> Result<bool> {
        let lhs = self.mat.mul(self.source.frob())?;
        let rhs = self.target.frob().mul(&self.mat.map_phi())?;
        for i in 0..lhs.rows() {
            for j in 0..lhs.cols() {
                if !lhs.at(i, j).agrees_with(rhs.at(i, j), upto) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Morphism matrix entries are all integral.
    pub fn is_integral(&self) -> Result<bool> {
        self.mat.is_integral()
    }
}

// ---------------------------------------------------------------------------
// hom spaces
// ---------------------------------------------------------------------------

/// GF(p)-matrix of multiplication by a fixed field element, acting on
/// polynomial-basis coordinates.
fn mul_matrix(field: &FinField, elt: FFElt) -> Vec<u8> {
    let f = field.f() as usize;
    let p = field.p();
    let mut cols = vec![0u8; f * f];
    for c in 0..f {
        let image = field.mul(elt, field.gen_pow(c as u32));
        let mut x = image.0;
        for row in 0..f {
            cols[row * f + c] = (x % p) as u8;
            x /= p;
        }
    }
    cols
}

fn frob_matrix(field: &FinField) -> Vec<u8> {
    let f = field.f() as usize;
    let p = field.p();
    let mut cols = vec![0u8; f * f];
    for c in 0..f {
        let image = field.frobenius(field.gen_pow(c as u32));
        let mut x = image.0;
        for row in 0..f {
            cols[row * f + c] = (x % p) as u8;
            x /= p;
        }
    }
    cols
}

fn mat_mul_fp(a: &[u8], b: &[u8], f: usize, p: u32) -> Vec<u8> {
    let mut out = vec![0u8; f * f];
    for i in 0..f {
        for k in 0..f {
            let aik = a[i * f + k] as u32;
            if aik == 0 {
                continue;
            }
            for j in 0..f {
                out[i * f + j] = ((out[i * f + j] as u32 + aik * b[k * f + j] as u32) % p) as u8;
            }
        }
    }
    out
}

/// Dense GF(p) nullspace via row reduction; returns a canonical basis of
/// the kernel (one vector per free column, in increasing column order).
fn nullspace_fp(mut rows: Vec<Vec<u8>>, ncols: usize, p: u32) -> Vec<Vec<u8>> {
    let inv = |a: u32| -> u32 {
        let mut result = 1u64;
        let mut base = a as u64;
        let mut n = p as u64 - 2;
        while n > 0 {
            if n & 1 == 1 {
                result = result * base % p as u64;
            }
            base = base * base % p as u64;
            n >>= 1;
        }
        result as u32
    };
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0usize;
    for col in 0..ncols {
        let mut pr = None;
        for r in rank..rows.len() {
            if rows[r][col] != 0 {
                pr = Some(r);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        rows.swap(rank, pr);
        let piv_inv = inv(rows[rank][col] as u32);
        for x in rows[rank].iter_mut() {
            *x = ((*x as u32 * piv_inv) % p) as u8;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let factor = row[col] as u32;
            for (x, pv) in row.iter_mut().zip(pivot_row.iter()) {
                *x = ((*x as u32 + (p - factor) * *pv as u32) % p) as u8;
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    let mut basis = Vec::new();
    for col in 0..ncols {
        if pivot_of_col[col].is_some() {
            continue;
        }
        let mut v = vec![0u8; ncols];
        v[col] = 1;
        for c in 0..ncols {
            if let Some(r) = pivot_of_col[c] {
                let val = rows[r][col] as u32;
                if val != 0 {
                    v[c] = ((p - val) % p) as u8;
                }
            }
        }
        basis.push(v);
    }
    basis
}

struct HomSystem<'a> {
    a: &'a PhiModule,
    b: &'a PhiModule,
    n: i64,
}

impl<'a> HomSystem<'a> {
    /// Solves `F A_a = A_b phi(F)` modulo `u^n` for integral `F` with
    /// entries of degree < n, as a GF(p)-linear system.
    fn solve(&self) -> Result<Vec<Vec<u8>>> {
        let field = self.a.field();
        let p = field.p();
        let f = field.f() as usize;
        let da = self.a.rank();
        let db = self.b.rank();
        let n = self.n;
        let nn = n as usize;

        if !self.a.frob().min_prec().covers(n) || !self.b.frob().min_prec().covers(n) {
            return Err(Error::PrecisionInsufficient(
                "Frobenius entries do not cover the hom working precision".to_string(),
            ));
        }

        let sigma = frob_matrix(field);
        let mut mul_cache: alloc::collections::BTreeMap<u32, Vec<u8>> = alloc::collections::BTreeMap::new();

        let ncols = db * da * nn * f;
        let col_index = |i: usize, j: usize, m: usize, c: usize| ((i * da + j) * nn + m) * f + c;

        let mut rows: Vec<Vec<u8>> = Vec::new();
        for i in 0..db {
            for k in 0..da {
                for deg in 0..nn {
                    let mut block = vec![vec![0u8; ncols]; f];
                    // (F * A_a)[i][k] coefficient at `deg`:
                    //   sum_j sum_m F[i][j][m] * A_a[j][k][deg - m]
                    for j in 0..da {
                        for m in 0..=deg {
                            let coeff = self.a.frob().at(j, k).coeff((deg - m) as i64).ok_or_else(|| {
                                Error::PrecisionInsufficient("hom system coefficient".to_string())
                            })?;
                            if coeff.is_zero() {
                                continue;
                            }
                            let mm = mul_cache
                                .entry(coeff.0)
                                .or_insert_with(|| mul_matrix(field, coeff))
                                .clone();
                            for cr in 0..f {
                                for cc in 0..f {
                                    let v = mm[cr * f + cc];
                                    if v != 0 {
                                        let col = col_index(i, j, m, cc);
                                        block[cr][col] = ((block[cr][col] as u32 + v as u32) % p) as u8;
                                    }
                                }
                            }
                        }
                    }
                    // -(A_b * phi(F))[i][k] coefficient at `deg`:
                    //   sum_j sum_{pm <= deg} A_b[i][j][deg - pm] * sigma(F[j][k][m])
                    for j in 0..db {
                        let mut m = 0usize;
                        while (p as usize) * m <= deg {
                            let rem = deg - (p as usize) * m;
                            let coeff = self.b.frob().at(i, j).coeff(rem as i64).ok_or_else(|| {
                                Error::PrecisionInsufficient("hom system coefficient".to_string())
                            })?;
                            if !coeff.is_zero() {
                                let mm = mul_cache
                                    .entry(coeff.0)
                                    .or_insert_with(|| mul_matrix(field, coeff))
                                    .clone();
                                let comp = mat_mul_fp(&mm, &sigma, f, p);
                                for cr in 0..f {
                                    for cc in 0..f {
                                        let v = comp[cr * f + cc];
                                        if v != 0 {
                                            let col = col_index(j, k, m, cc);
                                            block[cr][col] =
                                                ((block[cr][col] as u32 + (p - v as u32)) % p) as u8;
                                        }
                                    }
                                }
                            }
                            m += 1;
                        }
                    }
                    for row in block {
                        if row.iter().any(|&x| x != 0) {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        Ok(nullspace_fp(rows, ncols, p))
    }

    fn vector_to_matrix(&self, v: &[u8]) -> SeriesMatrix {
        let field = self.a.field();
        let p = field.p();
        let f = field.f() as usize;
        let da = self.a.rank();
        let db = self.b.rank();
        let nn = self.n as usize;
        SeriesMatrix::from_fn(field.clone(), db, da, |i, j| {
            let mut coeffs = Vec::with_capacity(nn);
            for m in 0..nn {
                let mut enc = 0u32;
                let mut place = 1u32;
                for c in 0..f {
                    let digit = v[((i * da + j) * nn + m) * f + c] as u32;
                    enc += digit * place;
                    place *= p;
                }
                coeffs.push(FFElt(enc));
            }
            USeries::new(field.clone(), 0, coeffs, Prec::Mod(self.n))
        })
    }
}

/// GF(p)-basis of the space of morphisms `a -> b` with integral entries.
pub fn hom_space(a: &PhiModule, b: &PhiModule) -> Result<Vec<PhiMorphism>> {
    let n = a.work_prec().max(b.work_prec());
    hom_space_at(a, b, n)
}

pub fn hom_space_at(a: &PhiModule, b: &PhiModule, n: i64) -> Result<Vec<PhiMorphism>> {
    if a.field() != b.field() || a.e() != b.e() {
        return Err(Error::ParameterMismatch("hom needs equal (p, f, e)".to_string()));
    }
    let sys1 = HomSystem { a, b, n };
    let basis1 = sys1.solve()?;
    let sys2 = HomSystem { a, b, n: 2 * n };
    let basis2 = sys2.solve()?;
    if basis1.len() != basis2.len() {
        return Err(Error::PrecisionNotStabilized);
    }
    // A solution of the truncated system persists when it is visible at
    // both scales.  Top-boundary freedom (coefficients whose constraints
    // fall beyond the cutoff) is filtered out by keeping only solutions
    // whose restriction to degrees < n stays independent; true morphisms
    // are separated by their low coefficients, so nothing real is lost.
    let field = a.field();
    let p = field.p();
    let f = field.f() as usize;
    let da = a.rank();
    let db = b.rank();
    let nn = n as usize;
    let project = |v: &[u8]| -> Vec<u8> {
        let mut out = Vec::with_capacity(db * da * nn * f);
        for i in 0..db {
            for j in 0..da {
                for m in 0..nn {
                    for c in 0..f {
                        out.push(v[((i * da + j) * (2 * nn) + m) * f + c]);
                    }
                }
            }
        }
        out
    };
    // incremental RREF over the projections: rows are kept mutually
    // reduced, so a single forward pass decides independence
    let mut reduced: Vec<(usize, Vec<u8>)> = Vec::new(); // (lead, row)
    let mut kept: Vec<&Vec<u8>> = Vec::new();
    'next: for v in &basis2 {
        let mut w = project(v);
        for (lead, r) in &reduced {
            if w[*lead] != 0 {
                let factor = w[*lead] as u32;
                for (x, y) in w.iter_mut().zip(r.iter()) {
                    *x = ((*x as u32 + (p - factor) * *y as u32) % p) as u8;
                }
            }
        }
        let Some(lead) = w.iter().position(|&x| x != 0) else {
            continue 'next;
        };
        let lead_inv = {
            let mut result = 1u64;
            let mut base = w[lead] as u64;
            let mut t = p as u64 - 2;
            while t > 0 {
                if t & 1 == 1 {
                    result = result * base % p as u64;
                }
                base = base * base % p as u64;
                t >>= 1;
            }
            result as u32
        };
        for x in w.iter_mut() {
            *x = ((*x as u32 * lead_inv) % p) as u8;
        }
        for (_, r) in reduced.iter_mut() {
            if r[lead] != 0 {
                let factor = r[lead] as u32;
                for (x, y) in r.iter_mut().zip(w.iter()) {
                    *x = ((*x as u32 + (p - factor) * *y as u32) % p) as u8;
                }
            }
        }
        reduced.push((lead, w));
        kept.push(v);
    }
    kept.iter()
        .map(|v| PhiMorphism::new(a.clone(), b.clone(), sys2.vector_to_matrix(v)))
        .collect()
}

/// Searches the GF(p)-span of a hom basis for an element invertible over
/// `k[[u]]` (unit determinant).  `Ok(None)` means the span was exhausted
/// and contains no isomorphism.
pub fn find_invertible(homs: &[PhiMorphism]) -> Result<Option<PhiMorphism>> {
    const MAX_COMBOS: u64 = 4_000_000;
    if homs.is_empty() {
        return Ok(None);
    }
    let first = &homs[0];
    if first.source.rank() != first.target.rank() {
        return Ok(None);
    }
    let p = first.source.field().p() as u64;
    let dim = homs.len();
    if dim > 12 {
        return Err(Error::Invalid("hom span too large to exhaust".to_string()));
    }
    let mut combos = 1u64;
    for _ in 0..dim {
        combos = combos.saturating_mul(p);
        if combos > MAX_COMBOS {
            return Err(Error::Invalid("hom span too large to exhaust".to_string()));
        }
    }
    let field = first.source.field().clone();
    let mut digits = vec![0u32; dim];
    for _ in 1..combos {
        let mut idx = 0;
        loop {
            digits[idx] += 1;
            if digits[idx] < p as u32 {
                break;
            }
            digits[idx] = 0;
            idx += 1;
        }
        let mut mat = SeriesMatrix::zero(field.clone(), first.mat.rows(), first.mat.cols());
        for (digit, h) in digits.iter().zip(homs.iter()) {
            if *digit == 0 {
                continue;
            }
            let scaled = h.mat.scale(&USeries::monomial(field.clone(), field.from_int(*digit as i64), 0))?;
            mat = mat.add(&scaled)?;
        }
        let det = mat.determinant()?;
        if let Val::Exact(0) = det.val() {
            return Ok(Some(PhiMorphism::new(first.source.clone(), first.target.clone(), mat)?));
        }
    }
    Ok(None)
}

/// Result of a general isomorphism test.
#[derive(Debug, Clone)]
pub enum IsoOutcome {
    Isomorphic(PhiMorphism),
    NotIsomorphic,
    Undecided,
}

/// Isomorphism test for general modules: rank and divisor invariants
/// first, then exhaustion of the hom span for an invertible element.
pub fn iso_general(a: &PhiModule, b: &PhiModule) -> Result<IsoOutcome> {
    if a.field() != b.field() {
        return Err(Error::MismatchedField);
    }
    if a.rank() != b.rank() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    let mut da = a.divisors()?;
    let mut db = b.divisors()?;
    da.sort_unstable();
    db.sort_unstable();
    if da != db {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    let homs = hom_space(a, b)?;
    if homs.is_empty() {
        return Ok(IsoOutcome::NotIsomorphic);
    }
    match find_invertible(&homs) {
        Ok(Some(f)) => Ok(IsoOutcome::Isomorphic(f)),
        Ok(None) => Ok(IsoOutcome::NotIsomorphic),
        Err(_) => Ok(IsoOutcome::Undecided),
    }
}

// ---------------------------------------------------------------------------
// kernels, images, cokernels
// ---------------------------------------------------------------------------

/// Solves `B X = M` for `X` over `k[[u]]`, where `B` has full column rank
/// and the columns of `M` lie in the span of `B`.
pub(crate) fn solve_in_span(b: &SeriesMatrix, m: &SeriesMatrix, work_prec: i64) -> Result<SeriesMatrix> {
    let rect = b.smith_rect(work_prec)?;
    if rect.rank != b.cols() {
        return Err(Error::RankDeficient);
    }
    let y = rect.left_inv.mul(m)?;
    for i in rect.rank..y.rows() {
        for j in 0..y.cols() {
            if let Val::Exact(_) = y.at(i, j).val() {
                return Err(Error::Invalid("columns are not in the span".to_string()));
            }
        }
    }
    let top = SeriesMatrix::from_fn(b.field().clone(), rect.rank, y.cols(), |i, j| {
        y.at(i, j).shift(-rect.divisors[i])
    });
    rect.right_inv.mul(&top)
}

/// Kernel of a morphism: a free module with the induced Frobenius, plus
/// its inclusion into the source.
pub fn kernel(fm: &PhiMorphism) -> Result<(PhiModule, PhiMorphism)> {
    let work = fm.source.work_prec().max(fm.target.work_prec());
    let rect = fm.mat.smith_rect(work)?;
    let da = fm.source.rank();
    let c = da - rect.rank;
    let basis = SeriesMatrix::from_fn(fm.source.field().clone(), da, c, |i, j| {
        rect.right_inv.at(i, rect.rank + j).clone()
    });
    let (basis, pivots) = SeriesMatrix::hnf_cols(&basis, work)?;
    if pivots.len() != c {
        return Err(Error::RankDeficient);
    }
    let rhs = fm.source.frob().mul(&basis.map_phi())?;
    let induced = if c == 0 {
        SeriesMatrix::zero(fm.source.field().clone(), 0, 0)
    } else {
        solve_in_span(&basis, &rhs, work)?
    };
    let module = PhiModule::new_unchecked(fm.source.field().clone(), fm.source.e(), fm.source.r(), induced)?;
    let incl = PhiMorphism::new(module.clone(), fm.source.clone(), basis)?;
    Ok((module, incl))
}

/// Image of a morphism: the saturated span of the matrix columns inside
/// the target, with the induced Frobenius and its inclusion.
pub fn image(fm: &PhiMorphism) -> Result<(PhiModule, PhiMorphism)> {
    let work = fm.source.work_prec().max(fm.target.work_prec());
    let (basis, _pivots) = SeriesMatrix::hnf_cols(&fm.mat, work)?;
    let c = basis.cols();
    let rhs = fm.target.frob().mul(&basis.map_phi())?;
    let induced = if c == 0 {
        SeriesMatrix::zero(fm.target.field().clone(), 0, 0)
    } else {
        solve_in_span(&basis, &rhs, work)?
    };
    let module = PhiModule::new_unchecked(fm.target.field().clone(), fm.target.e(), fm.target.r(), induced)?;
    let incl = PhiMorphism::new(module.clone(), fm.target.clone(), basis)?;
    Ok((module, incl))
}

/// Cokernel data: the free part with its induced Frobenius, the lengths of
/// the dropped `u`-torsion summands, and the projection from the target.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub module: PhiModule,
    pub torsion_lengths: Vec<i64>,
    pub projection: SeriesMatrix,
}

/// Cokernel of a morphism with its `u`-torsion dropped.
pub fn cokernel_mod_torsion(fm: &PhiMorphism) -> Result<Cokernel> {
    let work = fm.source.work_prec().max(fm.target.work_prec());
    let rect = fm.mat.smith_rect(work)?;
    let db = fm.target.rank();
    let free_rank = db - rect.rank;
    let torsion_lengths: Vec<i64> = rect.divisors.iter().copied().filter(|&a| a > 0).collect();
    let conj = rect.left_inv.mul(&fm.target.frob().mul(&rect.left.map_phi())?)?;
    // bottom-left block must vanish: the saturated image is phi-stable
    for i in rect.rank..db {
        for j in 0..rect.rank {
            if let Val::Exact(_) = conj.at(i, j).val() {
                return Err(Error::Invalid("saturated image is not phi-stable".to_string()));
            }
        }
    }
    let induced = SeriesMatrix::from_fn(fm.target.field().clone(), free_rank, free_rank, |i, j| {
        conj.at(rect.rank + i, rect.rank + j).clone()
    });
    let module = PhiModule::new_unchecked(fm.target.field().clone(), fm.target.e(), fm.target.r(), induced)?;
    let projection = SeriesMatrix::from_fn(fm.target.field().clone(), free_rank, db, |i, j| {
        rect.left_inv.at(rect.rank + i, j).clone()
    });
    Ok(Cokernel { module, torsion_lengths, projection })
}

//! Matrix algebra over `k[[u]]` and its fraction field `k((u))`.
//!
//! `k[[u]]` is a discrete valuation ring, so normal forms reduce to
//! valuation bookkeeping: Smith form pivots on the entry of minimal
//! valuation, the Hermite form of a lattice basis is lower-triangular with
//! monic monomial pivots `u^(b_i)` and entries below each pivot reduced
//! modulo `u^(b_i)`.  Both are computed with precision-carrying series;
//! every pivot decision is either certain or fails with a precision error.

use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{FFElt, FinField};
use crate::series::{Prec, USeries, Val};

/// Dense rectangular matrix of series, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesMatrix {
    field: Arc<FinField>,
    rows: usize,
    cols: usize,
    entries: Vec<USeries>,
}

/// Result of [`SeriesMatrix::smith_normal_form`]:
/// `left * diag(u^divisors) * right = original`, with `left` and `right`
/// invertible over `k[[u]]` and nondecreasing divisor exponents.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub left: SeriesMatrix,
    pub divisors: Vec<i64>,
    pub right: SeriesMatrix,
}

/// Full bookkeeping for the rectangular Smith algorithm, used by kernel,
/// image and cokernel computations.
#[derive(Debug, Clone)]
pub(crate) struct SmithRect {
    pub left: SeriesMatrix,
    pub left_inv: SeriesMatrix,
    pub right: SeriesMatrix,
    pub right_inv: SeriesMatrix,
    pub divisors: Vec<i64>,
    pub rank: usize,
}

/// Outcome of membership solving against a lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    Inside(Vec<USeries>),
    Outside,
}

impl SeriesMatrix {
    pub fn new(field: Arc<FinField>, rows: usize, cols: usize, entries: Vec<USeries>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        for e in &entries {
            if *e.field() != field {
                return Err(Error::MismatchedField);
            }
        }
        Ok(SeriesMatrix { field, rows, cols, entries })
    }

    pub fn from_fn(field: Arc<FinField>, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> USeries) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        SeriesMatrix { field, rows, cols, entries }
    }

    pub fn zero(field: Arc<FinField>, rows: usize, cols: usize) -> Self {
        let z = USeries::zero(field.clone());
        SeriesMatrix { field, rows, cols, entries: vec![z; rows * cols] }
    }

    pub fn identity(field: Arc<FinField>, n: usize) -> Self {
        Self::from_fn(field.clone(), n, n, |i, j| {
            if i == j {
                USeries::one(field.clone())
            } else {
                USeries::zero(field.clone())
            }
        })
    }

    /// Diagonal matrix of monomials `u^(exps[i])`.
    pub fn diag_monomials(field: Arc<FinField>, exps: &[i64]) -> Self {
        let n = exps.len();
        Self::from_fn(field.clone(), n, n, |i, j| {
            if i == j {
                USeries::monomial(field.clone(), FFElt::ONE, exps[i])
            } else {
                USeries::zero(field.clone())
            }
        })
    }

    pub fn field(&self) -> &Arc<FinField> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &USeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: USeries) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<USeries> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn transpose(&self) -> SeriesMatrix {
        Self::from_fn(self.field.clone(), self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Horizontal concatenation.
    pub fn hstack(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch("hstack row mismatch".to_string()));
        }
        Ok(Self::from_fn(self.field.clone(), self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        }))
    }

    /// Minimum precision over the entries.
    pub fn min_prec(&self) -> Prec {
        self.entries.iter().fold(Prec::Exact, |acc, e| acc.min_with(e.prec()))
    }

    pub fn mul(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        if self.field != other.field {
            return Err(Error::MismatchedField);
        }
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = SeriesMatrix::zero(self.field.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = USeries::zero(self.field.clone());
                for k in 0..self.cols {
                    let term = self.at(i, k).mul(other.at(k, j))?;
                    acc = acc.add(&term)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[USeries]) -> Result<Vec<USeries>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch("matrix-vector size mismatch".to_string()));
        }
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut acc = USeries::zero(self.field.clone());
            for k in 0..self.cols {
                acc = acc.add(&self.at(i, k).mul(&v[k])?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    pub fn add(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix add".to_string()));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.at(i, j).add(other.at(i, j))?);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SeriesMatrix) -> Result<SeriesMatrix> {
        self.add(&other.scale_elt_neg())
    }

    fn scale_elt_neg(&self) -> SeriesMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.neg();
        }
        out
    }

    /// Multiplies every entry by `u^k`.
    pub fn shift(&self, k: i64) -> SeriesMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.shift(k);
        }
        out
    }

    pub fn scale(&self, s: &USeries) -> Result<SeriesMatrix> {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.mul(s)?;
        }
        Ok(out)
    }

    /// Entrywise Frobenius substitution.
    pub fn map_phi(&self) -> SeriesMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.phi();
        }
        out
    }

    /// All entries integral, with certainty.
    pub fn is_integral(&self) -> Result<bool> {
        for e in &self.entries {
            if !e.is_integral()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// All entries of valuation at least `bound`, with certainty.
    pub fn vals_at_least(&self, bound: i64) -> Result<bool> {
        for e in &self.entries {
            if !e.val_at_least(bound)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Exact equality of all entries.
    pub fn eq_exact(&self, other: &SeriesMatrix) -> bool {
        self == other
    }

    /// Determinant by subset dynamic programming (fine for desk-scale
    /// dimensions).
    pub fn determinant(&self) -> Result<USeries> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(USeries::one(self.field.clone()));
        }
        if n > 12 {
            return Err(Error::Invalid("determinant dimension cap exceeded".to_string()));
        }
        // dp[mask] = det of submatrix on rows 0..k and column set mask,
        // k = popcount(mask)
        let size = 1usize << n;
        let mut dp: Vec<Option<USeries>> = vec![None; size];
        dp[0] = Some(USeries::one(self.field.clone()));
        for mask in 1..size {
            let k = (mask as u32).count_ones() as usize - 1; // row index
            let mut acc = USeries::zero(self.field.clone());
            let mut pos = 0usize; // position of j within mask
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let sub = dp[mask ^ (1 << j)].as_ref().expect("dp order").clone();
                let term = sub.mul(self.at(k, j))?;
                acc = if (k + pos) % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
                pos += 1;
            }
            dp[mask] = Some(acc);
        }
        Ok(dp[size - 1].take().expect("full mask"))
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> SeriesMatrix {
        SeriesMatrix::from_fn(self.field.clone(), self.rows - 1, self.cols - 1, |i, j| {
            let si = if i < skip_row { i } else { i + 1 };
            let sj = if j < skip_col { j } else { j + 1 };
            self.at(si, sj).clone()
        })
    }

    /// Adjugate matrix: `adj(A) * A = det(A) * I`.
    pub fn adjugate(&self) -> Result<SeriesMatrix> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(SeriesMatrix::zero(self.field.clone(), 0, 0));
        }
        let mut out = SeriesMatrix::zero(self.field.clone(), n, n);
        for i in 0..n {
            for j in 0..n {
                let cof = self.minor(j, i).determinant()?;
                let signed = if (i + j) % 2 == 0 { cof } else { cof.neg() };
                out.set(i, j, signed);
            }
        }
        Ok(out)
    }

    /// Inverse over `k((u))`; unit parts of the determinant are inverted to
    /// precision `work_prec`.
    pub fn inverse_laurent(&self, work_prec: i64) -> Result<SeriesMatrix> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let det = self.determinant()?;
        if det.is_zero_to_prec() {
            return Err(Error::SingularToPrecision);
        }
        let det_inv = det.inv_to(work_prec)?;
        let adj = self.adjugate()?;
        let mut out = adj;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = out.at(i, j).mul(&det_inv)?;
                out.set(i, j, e);
            }
        }
        Ok(out)
    }

    /// Valuation of the determinant, if certain.
    pub fn det_val(&self) -> Result<Val> {
        Ok(self.determinant()?.val())
    }

    /// Elementary divisor exponents via valuations of minor gcds, entirely
    /// from determinants (exact for polynomial matrices).  Returns the
    /// exponents in nondecreasing order; errors if the matrix is singular
    /// to precision.
    pub fn divisors_via_minors(&self) -> Result<Vec<i64>> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut gcd_vals = Vec::with_capacity(n + 1);
        gcd_vals.push(0i64);
        for k in 1..=n {
            let mut best: Option<i64> = None;
            let mut uncertain_floor: Option<i64> = None;
            for rows in subsets(n, k) {
                for cols in subsets(n, k) {
                    let sub = SeriesMatrix::from_fn(self.field.clone(), k, k, |i, j| {
                        self.at(rows[i], cols[j]).clone()
                    });
                    match sub.determinant()?.val() {
                        Val::Exact(v) => {
                            best = Some(best.map_or(v, |b: i64| b.min(v)));
                        }
                        Val::AtLeast(m) => {
                            uncertain_floor = Some(uncertain_floor.map_or(m, |f: i64| f.min(m)));
                        }
                        Val::Infinite => {}
                    }
                }
            }
            match best {
                Some(v) => {
                    if let Some(floor) = uncertain_floor {
                        if floor <= v {
                            return Err(Error::PrecisionInsufficient(
                                "minor valuation undecidable".to_string(),
                            ));
                        }
                    }
                    gcd_vals.push(v);
                }
                None => {
                    if uncertain_floor.is_some() {
                        return Err(Error::PrecisionInsufficient(
                            "minor rank undecidable".to_string(),
                        ));
                    }
                    return Err(Error::SingularToPrecision);
                }
            }
        }
        Ok((1..=n).map(|k| gcd_vals[k] - gcd_vals[k - 1]).collect())
    }

    /// Smith normal form of a square matrix that is invertible over
    /// `k((u))`: pivot on the entry of minimal valuation (ties broken by
    /// lowest row, then column), clear its row and column, recurse.
    pub fn smith_normal_form(&self, work_prec: i64) -> Result<SmithDecomposition> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let rect = self.smith_rect(work_prec)?;
        if rect.rank != self.rows {
            return Err(Error::SingularToPrecision);
        }
        Ok(SmithDecomposition { left: rect.left, divisors: rect.divisors, right: rect.right })
    }

    pub(crate) fn smith_rect(&self, work_prec: i64) -> Result<SmithRect> {
        let mut s = self.clone();
        let mut left = SeriesMatrix::identity(self.field.clone(), self.rows);
        let mut left_inv = left.clone();
        let mut right = SeriesMatrix::identity(self.field.clone(), self.cols);
        let mut right_inv = right.clone();
        let mut divisors = Vec::new();

        let steps = self.rows.min(self.cols);
        for k in 0..steps {
            // pivot search over the trailing block
            let mut best: Option<(i64, usize, usize)> = None;
            let mut uncertain_floor: Option<i64> = None;
            for i in k..self.rows {
                for j in k..self.cols {
                    match s.at(i, j).val() {
                        Val::Exact(v) => {
                            if best.map_or(true, |(bv, _, _)| v < bv) {
                                best = Some((v, i, j));
                            }
                        }
                        Val::AtLeast(m) => {
                            uncertain_floor = Some(uncertain_floor.map_or(m, |f: i64| f.min(m)));
                        }
                        Val::Infinite => {}
                    }
                }
            }
            let (v, pi, pj) = match best {
                Some(b) => {
                    if let Some(floor) = uncertain_floor {
                        if floor <= b.0 {
                            return Err(Error::PrecisionInsufficient("smith pivot undecidable".to_string()));
                        }
                    }
                    b
                }
                None => {
                    if uncertain_floor.is_some() {
                        return Err(Error::PrecisionInsufficient("smith rank undecidable".to_string()));
                    }
                    break; // trailing block exactly zero: rank = k
                }
            };

            if pi != k {
                s.swap_rows(k, pi);
                left.swap_cols(k, pi);
                left_inv.swap_rows(k, pi);
            }
            if pj != k {
                s.swap_cols(k, pj);
                right.swap_rows(k, pj);
                right_inv.swap_cols(k, pj);
            }

            // normalize pivot to the monic monomial u^v: divide row k by the
            // unit part w = pivot * u^-v
            let w = s.at(k, k).shift(-v);
            let w_inv = w.inv_to(work_prec)?;
            for j in k..self.cols {
                let e = s.at(k, j).mul(&w_inv)?;
                s.set(k, j, e);
            }
            s.set(k, k, USeries::monomial(self.field.clone(), FFElt::ONE, v));
            // left column op: col_k *= w ; left_inv row op: row_k *= w_inv
            for i in 0..self.rows {
                let e = left.at(i, k).mul(&w)?;
                left.set(i, k, e);
            }
            for j in 0..self.rows {
                let e = left_inv.at(k, j).mul(&w_inv)?;
                left_inv.set(k, j, e);
            }

            // clear column k; zero-to-precision entries still contribute
            // their uncertainty, only exact zeros are skipped
            for i in 0..self.rows {
                if i == k || s.at(i, k).is_zero_exact() {
                    continue;
                }
                let q = s.at(i, k).shift(-v);
                for j in k..self.cols {
                    let e = s.at(i, j).sub(&q.mul(s.at(k, j))?)?;
                    s.set(i, j, e);
                }
                // left: col_k += q * col_i ; left_inv: row_i -= q * row_k
                for t in 0..self.rows {
                    let e = left.at(t, k).add(&q.mul(left.at(t, i))?)?;
                    left.set(t, k, e);
                }
                for t in 0..self.rows {
                    let e = left_inv.at(i, t).sub(&q.mul(left_inv.at(k, t))?)?;
                    left_inv.set(i, t, e);
                }
            }

            // clear row k; column k of s is now supported at the pivot, so
            // these ops touch nothing below it
            for j in 0..self.cols {
                if j == k || s.at(k, j).is_zero_exact() {
                    continue;
                }
                let q = s.at(k, j).shift(-v);
                for t in 0..self.rows {
                    let e = s.at(t, j).sub(&q.mul(s.at(t, k))?)?;
                    s.set(t, j, e);
                }
                // right: row_k += q * row_j ; right_inv: col_j -= q * col_k
                for t in 0..self.cols {
                    let e = right.at(k, t).add(&q.mul(right.at(j, t))?)?;
                    right.set(k, t, e);
                }
                for t in 0..self.cols {
                    let e = right_inv.at(t, j).sub(&q.mul(right_inv.at(t, k))?)?;
                    right_inv.set(t, j, e);
                }
            }

            divisors.push(v);
        }

        // nondecreasing by min-valuation pivoting
        debug_assert!(divisors.windows(2).all(|w| w[0] <= w[1]));
        let rank = divisors.len();
        Ok(SmithRect { left, left_inv, right, right_inv, divisors, rank })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Canonical lattice basis (column-style Hermite form) of the column
    /// span of `gens`: lower-triangular, monic monomial pivots `u^(b_i)` on
    /// the diagonal, and every entry below a pivot row reduced modulo the
    /// valuation of its row pivot.  Two generating sets span the same
    /// lattice exactly when their canonical bases coincide.
    ///
    /// Requires the span to have full rank (`rows` columns worth); see
    /// [`SeriesMatrix::hnf_cols`] for the rank-deficient variant.
    pub fn hnf_lattice(gens: &SeriesMatrix, work_prec: i64) -> Result<SeriesMatrix> {
        let (h, pivots) = Self::hnf_cols(gens, work_prec)?;
        if pivots.len() != gens.rows {
            return Err(Error::RankDeficient);
        }
        Ok(h)
    }

    /// General column Hermite form: returns the canonical basis (one column
    /// per pivot) together with the pivot rows.
    pub fn hnf_cols(gens: &SeriesMatrix, work_prec: i64) -> Result<(SeriesMatrix, Vec<usize>)> {
        let d = gens.rows;
        let field = gens.field.clone();
        let mut remaining: Vec<Vec<USeries>> = (0..gens.cols).map(|j| gens.column(j)).collect();
        let mut placed: Vec<(usize, Vec<USeries>)> = Vec::new(); // (pivot row, column)

        for row in 0..d {
            // pick the remaining column with minimal certain valuation at `row`
            let mut best: Option<(i64, usize)> = None;
            let mut uncertain_floor: Option<i64> = None;
            for (idx, col) in remaining.iter().enumerate() {
                match col[row].val() {
                    Val::Exact(v) => {
                        if best.map_or(true, |(bv, _)| v < bv) {
                            best = Some((v, idx));
                        }
                    }
                    Val::AtLeast(m) => {
                        uncertain_floor = Some(uncertain_floor.map_or(m, |f: i64| f.min(m)));
                    }
                    Val::Infinite => {}
                }
            }
            let (v, idx) = match best {
                Some(b) => {
                    if let Some(floor) = uncertain_floor {
                        if floor <= b.0 {
                            return Err(Error::PrecisionInsufficient("hnf pivot undecidable".to_string()));
                        }
                    }
                    b
                }
                None => {
                    if uncertain_floor.is_some() {
                        return Err(Error::PrecisionInsufficient("hnf pivot undecidable".to_string()));
                    }
                    continue; // no pivot in this row
                }
            };
            let mut piv = remaining.swap_remove(idx);
            // normalize: make the pivot entry the monic monomial u^v
            let w_inv = piv[row].shift(-v).inv_to(work_prec)?;
            for e in piv.iter_mut() {
                *e = e.mul(&w_inv)?;
            }
            piv[row] = USeries::monomial(field.clone(), FFElt::ONE, v);
            // eliminate this row from the other columns; zero-to-precision
            // entries still propagate their uncertainty into lower rows,
            // while the eliminated entry itself is zero by construction
            for col in remaining.iter_mut() {
                if col[row].is_zero_exact() {
                    continue;
                }
                let q = col[row].shift(-v);
                for (e, pe) in col.iter_mut().zip(piv.iter()) {
                    *e = e.sub(&q.mul(pe)?)?;
                }
                col[row] = USeries::zero(field.clone());
            }
            placed.push((row, piv));
        }

        // leftover columns must be in the span, i.e. zero to precision
        for col in &remaining {
            for e in col {
                if let Val::Exact(_) = e.val() {
                    return Err(Error::PrecisionInsufficient(
                        "nonzero residual column after elimination".to_string(),
                    ));
                }
            }
        }

        // reduce entries at each pivot row: the entry at (placed[i].0,
        // column j) is cut down modulo u^(b_i) for j < i.  Working upward
        // in i keeps later pivot rows unreduced when they are touched.
        for i in 1..placed.len() {
            let (prow, pcol) = {
                let (r, ref c) = placed[i];
                (r, c.clone())
            };
            let b_i = match pcol[prow].val() {
                Val::Exact(v) => v,
                _ => unreachable!("pivot is a monomial"),
            };
            for j in 0..i {
                let q = placed[j].1[prow].take_from(b_i);
                if !q.is_zero_exact() {
                    for (t, pe) in placed[j].1.iter_mut().zip(pcol.iter()) {
                        *t = t.sub(&q.mul(pe)?)?;
                    }
                }
                // the reduced entry must be fully determined below the bound
                let reduced = placed[j].1[prow].clone();
                if !reduced.prec().covers(b_i) {
                    return Err(Error::PrecisionInsufficient("hnf reduction not covered".to_string()));
                }
                placed[j].1[prow] = reduced.take_below(b_i);
            }
        }

        let pivots: Vec<usize> = placed.iter().map(|(r, _)| *r).collect();
        let h = SeriesMatrix::from_fn(field.clone(), d, placed.len(), |i, j| placed[j].1[i].clone());
        Ok((h, pivots))
    }

    /// Coordinates of `v` in the given lattice basis, or `Outside` when a
    /// coordinate has certainly negative valuation.
    pub fn solve_membership(basis: &SeriesMatrix, v: &[USeries], work_prec: i64) -> Result<Membership> {
        if basis.rows != basis.cols {
            return Err(Error::NonSquare);
        }
        if v.len() != basis.rows {
            return Err(Error::DimensionMismatch("vector length".to_string()));
        }
        let inv = basis.inverse_laurent(work_prec)?;
        let coords = inv.mul_vec(v)?;
        let mut all_integral = true;
        for c in &coords {
            match c.val() {
                Val::Exact(w) if w < 0 => return Ok(Membership::Outside),
                Val::Exact(_) | Val::Infinite => {}
                Val::AtLeast(n) => {
                    if n < 0 {
                        all_integral = false;
                    }
                }
            }
        }
        if !all_integral {
            return Err(Error::PrecisionInsufficient(
                "membership undecidable at this precision".to_string(),
            ));
        }
        Ok(Membership::Inside(coords))
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FinField;

    fn f3() -> Arc<FinField> {
        FinField::prime(3).unwrap()
    }

    fn m(field: &Arc<FinField>, rows: usize, cols: usize, data: &[&[(i64, i64)]]) -> SeriesMatrix {
        assert_eq!(data.len(), rows * cols);
        let entries = data.iter().map(|terms| USeries::from_terms(field, terms)).collect();
        SeriesMatrix::new(field.clone(), rows, cols, entries).unwrap()
    }

    #[test]
    fn mul_examples() {
        let k = f3();
        let a = m(&k, 2, 2, &[&[(1, 1)], &[(0, 1)], &[], &[(1, 1)]]); // [[u,1],[0,u]]
        let id = SeriesMatrix::identity(k.clone(), 2);
        assert_eq!(id.mul(&a).unwrap(), a);
        // diag(u,1) * diag(1,u) = diag(u,u)
        let d1 = SeriesMatrix::diag_monomials(k.clone(), &[1, 0]);
        let d2 = SeriesMatrix::diag_monomials(k.clone(), &[0, 1]);
        assert_eq!(d1.mul(&d2).unwrap(), SeriesMatrix::diag_monomials(k.clone(), &[1, 1]));
        // [[u,1],[0,u]]^2 = [[u^2, 2u],[0, u^2]] over GF(3)
        let sq = a.mul(&a).unwrap();
        let expect = m(&k, 2, 2, &[&[(2, 1)], &[(1, 2)], &[], &[(2, 1)]]);
        assert_eq!(sq, expect);
    }

    #[test]
    fn determinant_examples() {
        let k = f3();
        let d = SeriesMatrix::diag_monomials(k.clone(), &[2, 3]);
        assert_eq!(d.determinant().unwrap(), USeries::from_terms(&k, &[(5, 1)]));
        let id = SeriesMatrix::identity(k.clone(), 3);
        assert_eq!(id.determinant().unwrap(), USeries::one(k.clone()));
        let a = m(&k, 2, 2, &[&[(1, 1)], &[(0, 1)], &[], &[(1, 1)]]);
        assert_eq!(a.determinant().unwrap(), USeries::from_terms(&k, &[(2, 1)]));
    }

    #[test]
    fn smith_examples() {
        let k = f3();
        // diag(1, u^2) -> divisors (0, 2)
        let d = SeriesMatrix::diag_monomials(k.clone(), &[0, 2]);
        let snf = d.smith_normal_form(20).unwrap();
        assert_eq!(snf.divisors, vec![0, 2]);
        // [[u,1],[0,u]] -> divisors (0, 2): the unit entry is the pivot
        let a = m(&k, 2, 2, &[&[(1, 1)], &[(0, 1)], &[], &[(1, 1)]]);
        let snf = a.smith_normal_form(20).unwrap();
        assert_eq!(snf.divisors, vec![0, 2]);
        // identity
        let id = SeriesMatrix::identity(k.clone(), 3);
        assert_eq!(id.smith_normal_form(20).unwrap().divisors, vec![0, 0, 0]);
        // divisors also via minors
        assert_eq!(a.divisors_via_minors().unwrap(), vec![0, 2]);
    }

    #[test]
    fn smith_reassembles() {
        let k = f3();
        let a = m(
            &k,
            2,
            2,
            &[&[(1, 1), (2, 2)], &[(0, 2), (1, 1)], &[(3, 1)], &[(1, 2)]],
        );
        let snf = a.smith_normal_form(24).unwrap();
        let diag = SeriesMatrix::diag_monomials(k.clone(), &snf.divisors);
        let back = snf.left.mul(&diag).unwrap().mul(&snf.right).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(back.at(i, j).agrees_with(a.at(i, j), 12), "entry {i}{j}");
            }
        }
        // unit transforms
        assert_eq!(snf.left.det_val().unwrap().exact(), Some(0));
        assert_eq!(snf.right.det_val().unwrap().exact(), Some(0));
        // divisor sum = det valuation
        let dv: i64 = snf.divisors.iter().sum();
        assert_eq!(a.det_val().unwrap().exact(), Some(dv));
    }

    #[test]
    fn inverse_examples() {
        let k = f3();
        let d = SeriesMatrix::diag_monomials(k.clone(), &[2, 0]);
        let inv = d.inverse_laurent(20).unwrap();
        assert_eq!(inv.at(0, 0).val().exact(), Some(-2));
        let id = SeriesMatrix::identity(k.clone(), 2);
        let inv_id = id.inverse_laurent(20).unwrap();
        assert!(inv_id.at(0, 0).agrees_with(&USeries::one(k.clone()), 20));
        // inverse([[u,1],[0,u]]) = [[u^-1, -u^-2],[0, u^-1]]
        let a = m(&k, 2, 2, &[&[(1, 1)], &[(0, 1)], &[], &[(1, 1)]]);
        let ainv = a.inverse_laurent(20).unwrap();
        let prod = a.mul(&ainv).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { USeries::one(k.clone()) } else { USeries::zero(k.clone()) };
                assert!(prod.at(i, j).agrees_with(&expect, 15));
            }
        }
        assert_eq!(ainv.at(0, 0).val().exact(), Some(-1));
        assert_eq!(ainv.at(0, 1).val().exact(), Some(-2));
        assert_eq!(ainv.at(1, 1).val().exact(), Some(-1));
    }

    #[test]
    fn hnf_examples() {
        let k = f3();
        // columns {e1, e2, u e1} -> identity basis
        let gens = m(&k, 2, 3, &[&[(0, 1)], &[], &[(1, 1)], &[], &[(0, 1)], &[]]);
        let h = SeriesMatrix::hnf_lattice(&gens, 20).unwrap();
        assert_eq!(h, SeriesMatrix::identity(k.clone(), 2));
        // columns {u^-1 e1, u e2}: already canonical
        let gens = m(&k, 2, 2, &[&[(-1, 1)], &[], &[], &[(1, 1)]]);
        let h = SeriesMatrix::hnf_lattice(&gens, 20).unwrap();
        assert_eq!(h, SeriesMatrix::diag_monomials(k.clone(), &[-1, 1]));
        // columns {e1+e2, e2, u e1} -> identity
        let gens = m(&k, 2, 3, &[&[(0, 1)], &[], &[(1, 1)], &[(0, 1)], &[(0, 1)], &[]]);
        let h = SeriesMatrix::hnf_lattice(&gens, 20).unwrap();
        assert_eq!(h, SeriesMatrix::identity(k.clone(), 2));
    }

    #[test]
    fn hnf_idempotent_and_unit_invariant() {
        let k = f3();
        let b = m(&k, 2, 2, &[&[(1, 1)], &[], &[(0, 1), (1, 1)], &[(2, 1)]]);
        let h = SeriesMatrix::hnf_lattice(&b, 24).unwrap();
        let h2 = SeriesMatrix::hnf_lattice(&h, 24).unwrap();
        assert_eq!(h, h2);
        // right-multiplying the generators by a unit matrix keeps the basis
        let unit = m(&k, 2, 2, &[&[(0, 1)], &[(0, 2), (1, 1)], &[], &[(0, 1), (1, 1)]]);
        let bu = b.mul(&unit).unwrap();
        let hu = SeriesMatrix::hnf_lattice(&bu, 24).unwrap();
        assert_eq!(h, hu);
        // column permutation and redundant augmentation
        let swapped = m(&k, 2, 2, &[&[], &[(1, 1)], &[(2, 1)], &[(0, 1), (1, 1)]]);
        let hs = SeriesMatrix::hnf_lattice(&swapped, 24).unwrap();
        assert_eq!(h, hs);
        let aug = b.hstack(&b).unwrap();
        assert_eq!(SeriesMatrix::hnf_lattice(&aug, 24).unwrap(), h);
    }

    #[test]
    fn hnf_rank_deficient() {
        let k = f3();
        let gens = m(&k, 2, 2, &[&[(0, 1)], &[(1, 1)], &[], &[]]);
        assert!(matches!(SeriesMatrix::hnf_lattice(&gens, 20), Err(Error::RankDeficient)));
    }

    #[test]
    fn membership_examples() {
        let k = f3();
        let id = SeriesMatrix::identity(k.clone(), 2);
        let v = vec![USeries::from_terms(&k, &[(1, 1)]), USeries::one(k.clone())];
        match SeriesMatrix::solve_membership(&id, &v, 20).unwrap() {
            Membership::Inside(coords) => {
                assert_eq!(coords[0], USeries::from_terms(&k, &[(1, 1)]));
                assert_eq!(coords[1], USeries::one(k.clone()));
            }
            _ => panic!("expected inside"),
        }
        // basis diag(u,1), v = (1,0): coordinate u^-1 -> outside
        let b = SeriesMatrix::diag_monomials(k.clone(), &[1, 0]);
        let v = vec![USeries::one(k.clone()), USeries::zero(k.clone())];
        assert_eq!(SeriesMatrix::solve_membership(&b, &v, 20).unwrap(), Membership::Outside);
        // basis [[u,1],[0,u]], v = (1,0) -> outside
        let b = m(&k, 2, 2, &[&[(1, 1)], &[(0, 1)], &[], &[(1, 1)]]);
        assert_eq!(SeriesMatrix::solve_membership(&b, &v, 20).unwrap(), Membership::Outside);
    }

    #[test]
    fn membership_roundtrip() {
        let k = f3();
        let b = m(&k, 2, 2, &[&[(1, 1)], &[(0, 1)], &[], &[(1, 1)]]);
        let x = vec![USeries::from_terms(&k, &[(0, 2), (1, 1)]), USeries::from_terms(&k, &[(2, 1)])];
        let v = b.mul_vec(&x).unwrap();
        match SeriesMatrix::solve_membership(&b, &v, 24).unwrap() {
            Membership::Inside(coords) => {
                for (got, want) in coords.iter().zip(x.iter()) {
                    assert!(got.agrees_with(want, 12));
                }
            }
            _ => panic!("expected inside"),
        }
    }
}

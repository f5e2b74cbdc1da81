//! Dense matrices over `K[T^±]` and Smith normal form.
//!
//! `K[T^±]` is Euclidean for the support-window size, so the classical
//! elementary-operation algorithm applies. The decomposition tracks the
//! transforms and their inverses, so soundness (`U·M·V = D`, unit
//! determinants) can be checked exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::scalar::{ExactScalar, FieldCtx};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<LaurentPoly>>", into = "Vec<Vec<LaurentPoly>>")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<LaurentPoly>, // row-major
}

impl TryFrom<Vec<Vec<LaurentPoly>>> for Matrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        Matrix::from_rows(rows)
    }
}

impl From<Matrix> for Vec<Vec<LaurentPoly>> {
    fn from(m: Matrix) -> Self {
        (0..m.rows).map(|i| (0..m.cols).map(|j| m.at(i, j).clone()).collect()).collect()
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![LaurentPoly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<LaurentPoly>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::ShapeMismatch("ragged rows".into()));
            }
        }
        Ok(Matrix { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> LaurentPoly) -> Self {
        let mut m = Matrix::zero(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_scalar_rows(rows: Vec<Vec<ExactScalar>>) -> Result<Self> {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(LaurentPoly::constant).collect())
                .collect(),
        )
    }

    pub fn scalar_diag(diag: Vec<ExactScalar>) -> Self {
        let n = diag.len();
        let mut m = Matrix::zero(n, n);
        for (i, c) in diag.into_iter().enumerate() {
            m.set(i, i, LaurentPoly::constant(c));
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &LaurentPoly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: LaurentPoly) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(LaurentPoly::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn neg(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(LaurentPoly::neg).collect() }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} + {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.add(b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, other: &Matrix, ctx: &FieldCtx) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul(b, ctx);
                    let cur = out.at(i, j).add(&prod);
                    out.set(i, j, cur);
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentPoly, ctx: &FieldCtx) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|e| e.mul(c, ctx)).collect(),
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.cols {
            return Err(Error::ShapeMismatch("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(Matrix { rows: self.rows + other.rows, cols: self.cols, data })
    }

    /// Places `self` to the left of `other`.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows {
            return Err(Error::ShapeMismatch("hstack row mismatch".into()));
        }
        Ok(Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        }))
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.at(rows.start + i, cols.start + j).clone()
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn row_addmul(&mut self, dst: usize, src: usize, f: &LaurentPoly, ctx: &FieldCtx) {
        if f.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.at(dst, j).add(&self.at(src, j).mul(f, ctx));
            self.set(dst, j, v);
        }
    }

    fn col_addmul(&mut self, dst: usize, src: usize, f: &LaurentPoly, ctx: &FieldCtx) {
        if f.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.at(i, dst).add(&self.at(i, src).mul(f, ctx));
            self.set(i, dst, v);
        }
    }

    fn scale_row(&mut self, r: usize, c: &LaurentPoly, ctx: &FieldCtx) {
        for j in 0..self.cols {
            let v = self.at(r, j).mul(c, ctx);
            self.set(r, j, v);
        }
    }

    fn scale_col(&mut self, cidx: usize, c: &LaurentPoly, ctx: &FieldCtx) {
        for i in 0..self.rows {
            let v = self.at(i, cidx).mul(c, ctx);
            self.set(i, cidx, v);
        }
    }

    /// Two-row unimodular combination: rows (r1, r2) ← L·(r1, r2) for a
    /// 2×2 matrix `L` with unit determinant.
    fn rows_2x2(&mut self, r1: usize, r2: usize, l: &[LaurentPoly; 4], ctx: &FieldCtx) {
        for j in 0..self.cols {
            let a = self.at(r1, j).clone();
            let b = self.at(r2, j).clone();
            self.set(r1, j, l[0].mul(&a, ctx).add(&l[1].mul(&b, ctx)));
            self.set(r2, j, l[2].mul(&a, ctx).add(&l[3].mul(&b, ctx)));
        }
    }

    fn cols_2x2(&mut self, c1: usize, c2: usize, r: &[LaurentPoly; 4], ctx: &FieldCtx) {
        for i in 0..self.rows {
            let a = self.at(i, c1).clone();
            let b = self.at(i, c2).clone();
            self.set(i, c1, a.mul(&r[0], ctx).add(&b.mul(&r[2], ctx)));
            self.set(i, c2, a.mul(&r[1], ctx).add(&b.mul(&r[3], ctx)));
        }
    }

    /// Laplace expansion with column-subset memoization; fine for the small
    /// matrices appearing here.
    pub fn determinant(&self, ctx: &FieldCtx) -> Result<LaurentPoly> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(LaurentPoly::one());
        }
        if n > 16 {
            return Err(Error::ShapeMismatch("determinant limited to 16x16".into()));
        }
        // memo[mask] = det of the submatrix on rows (n-popcount..n) and column set mask
        let mut memo: std::collections::HashMap<u32, LaurentPoly> = std::collections::HashMap::new();
        memo.insert(0, LaurentPoly::one());
        fn go(
            m: &Matrix,
            mask: u32,
            memo: &mut std::collections::HashMap<u32, LaurentPoly>,
            ctx: &FieldCtx,
        ) -> LaurentPoly {
            if let Some(v) = memo.get(&mask) {
                return v.clone();
            }
            let k = mask.count_ones() as usize;
            let row = k - 1;
            let mut acc = LaurentPoly::zero();
            let mut idx = 0usize;
            for j in 0..m.cols() {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let entry = m.at(row, j);
                if !entry.is_zero() {
                    let sub = go(m, mask & !(1 << j), memo, ctx);
                    let term = entry.mul(&sub, ctx);
                    // expansion along the local last row: sign (−1)^{(k−1)+idx}
                    acc = if ((k - 1) + idx) % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
                }
                idx += 1;
            }
            memo.insert(mask, acc.clone());
            acc
        }
        let full = (1u32 << n) - 1;
        Ok(go(self, full, &mut memo, ctx))
    }

    /// Inverse over `K[T^±]`; exists exactly when the determinant is a unit.
    pub fn inverse(&self, ctx: &FieldCtx) -> Result<Matrix> {
        let det = self.determinant(ctx)?;
        if !det.is_unit() {
            return Err(Error::InvariantViolation(format!(
                "matrix is not invertible over K[T^\u{b1}] (det = {det})"
            )));
        }
        let n = self.rows;
        let det_inv = LaurentPoly::monomial(
            -det.min_exp().unwrap(),
            ctx.inv(&det.coeff(det.min_exp().unwrap()))?,
        );
        let mut adj = Matrix::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                // cofactor C_ji for the adjugate
                let minor = Matrix::from_fn(n - 1, n - 1, |r, c| {
                    let rr = if r < j { r } else { r + 1 };
                    let cc = if c < i { c } else { c + 1 };
                    self.at(rr, cc).clone()
                });
                let mut cof = minor.determinant(ctx).expect("square minor");
                if (i + j) % 2 == 1 {
                    cof = cof.neg();
                }
                adj.set(i, j, cof.mul(&det_inv, ctx));
            }
        }
        Ok(adj)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.at(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// `U·M·V = D` with `U, V` invertible over `K[T^±]`, `D` diagonal with the
/// divisibility chain, diagonal entries in canonical normal form.
#[derive(Debug, Clone)]
pub struct Smith {
    pub u: Matrix,
    pub u_inv: Matrix,
    pub d: Matrix,
    pub v: Matrix,
    pub v_inv: Matrix,
}

impl Smith {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let n = self.d.rows().min(self.d.cols());
        (0..n).filter(|&i| !self.d.at(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<LaurentPoly> {
        let n = self.d.rows().min(self.d.cols());
        (0..n).map(|i| self.d.at(i, i).clone()).filter(|p| !p.is_zero()).collect()
    }
}

struct SmithWork<'a> {
    d: Matrix,
    u: Matrix,
    u_inv: Matrix,
    v: Matrix,
    v_inv: Matrix,
    ctx: &'a FieldCtx,
}

impl<'a> SmithWork<'a> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn row_addmul(&mut self, dst: usize, src: usize, f: &LaurentPoly) {
        self.d.row_addmul(dst, src, f, self.ctx);
        self.u.row_addmul(dst, src, f, self.ctx);
        self.u_inv.col_addmul(src, dst, &f.neg(), self.ctx);
    }

    fn col_addmul(&mut self, dst: usize, src: usize, f: &LaurentPoly) {
        self.d.col_addmul(dst, src, f, self.ctx);
        self.v.col_addmul(dst, src, f, self.ctx);
        self.v_inv.row_addmul(src, dst, &f.neg(), self.ctx);
    }

    fn scale_row_unit(&mut self, r: usize, unit: &LaurentPoly) -> Result<()> {
        // unit is a monomial c·T^k; inverse is (1/c)·T^{-k}
        let unit_inv = LaurentPoly::monomial(
            -unit.min_exp().ok_or(Error::ZeroPolynomial)?,
            self.ctx.inv(&unit.coeff(unit.min_exp().unwrap()))?,
        );
        self.d.scale_row(r, &unit_inv, self.ctx);
        self.u.scale_row(r, &unit_inv, self.ctx);
        self.u_inv.scale_col(r, unit, self.ctx);
        Ok(())
    }

    /// Bezout combination of rows (r1, r2) pivoting on column `c`.
    fn bezout_rows(&mut self, r1: usize, r2: usize, c: usize) -> Result<()> {
        let a = self.d.at(r1, c).clone();
        let b = self.d.at(r2, c).clone();
        let (g, x, y) = a.xgcd(&b, self.ctx)?;
        let a_g = a.div_rem(&g, self.ctx)?.0;
        let b_g = b.div_rem(&g, self.ctx)?.0;
        let l = [x.clone(), y.clone(), b_g.neg(), a_g.clone()];
        let l_inv = [a_g, y.neg(), b_g, x];
        self.d.rows_2x2(r1, r2, &l, self.ctx);
        self.u.rows_2x2(r1, r2, &l, self.ctx);
        // u_inv ← u_inv · L⁻¹ acting on columns (r1, r2):
        // (A·L⁻¹) has col r1 = l_inv[0]·col r1 + l_inv[2]·col r2, etc.
        let r = [l_inv[0].clone(), l_inv[1].clone(), l_inv[2].clone(), l_inv[3].clone()];
        self.u_inv.cols_2x2(r1, r2, &r, self.ctx);
        Ok(())
    }

    fn bezout_cols(&mut self, c1: usize, c2: usize, r: usize) -> Result<()> {
        let a = self.d.at(r, c1).clone();
        let b = self.d.at(r, c2).clone();
        let (g, x, y) = a.xgcd(&b, self.ctx)?;
        let a_g = a.div_rem(&g, self.ctx)?.0;
        let b_g = b.div_rem(&g, self.ctx)?.0;
        // right factor R = [[x, -b/g], [y, a/g]], det 1
        let rm = [x.clone(), b_g.neg(), y.clone(), a_g.clone()];
        let rm_inv = [a_g, b_g, y.neg(), x];
        self.d.cols_2x2(c1, c2, &rm, self.ctx);
        self.v.cols_2x2(c1, c2, &rm, self.ctx);
        // v_inv ← R⁻¹ · v_inv acting on rows (c1, c2)
        self.v_inv.rows_2x2(c1, c2, &rm_inv, self.ctx);
        Ok(())
    }
}

/// Smith normal form over `K[T^±]`.
///
/// Pivot selection is deterministic: smallest support window first, ties by
/// the lexicographic order of the normalized form, then by position.
pub fn smith_normal_form(m: &Matrix, ctx: &FieldCtx) -> Result<Smith> {
    let rows = m.rows();
    let cols = m.cols();
    let mut w = SmithWork {
        d: m.clone(),
        u: Matrix::identity(rows),
        u_inv: Matrix::identity(rows),
        v: Matrix::identity(cols),
        v_inv: Matrix::identity(cols),
        ctx,
    };

    let mut t = 0;
    while t < rows.min(cols) {
        // deterministic pivot: minimal (window, canonical form) in the block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let e = w.d.at(i, j);
                if e.is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        let cur = e.normalize_unit(ctx)?;
                        let prev = w.d.at(bi, bj).normalize_unit(ctx)?;
                        if cur.canonical_cmp(&prev) == std::cmp::Ordering::Less {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);

        'pivot: loop {
            // clear column t below the pivot
            for i in t + 1..rows {
                if w.d.at(i, t).is_zero() {
                    continue;
                }
                let (quot, rem) = w.d.at(i, t).div_rem(w.d.at(t, t), ctx)?;
                if rem.is_zero() {
                    w.row_addmul(i, t, &quot.neg());
                } else {
                    w.bezout_rows(t, i, t)?;
                }
            }
            // clear row t to the right of the pivot
            let mut row_dirty = false;
            for j in t + 1..cols {
                if w.d.at(t, j).is_zero() {
                    continue;
                }
                let (quot, rem) = w.d.at(t, j).div_rem(w.d.at(t, t), ctx)?;
                if rem.is_zero() {
                    w.col_addmul(j, t, &quot.neg());
                } else {
                    w.bezout_cols(t, j, t)?;
                    row_dirty = true;
                }
            }
            // column ops may have disturbed the cleared column
            if row_dirty || (t + 1..rows).any(|i| !w.d.at(i, t).is_zero()) {
                continue 'pivot;
            }
            // divisibility sweep: the pivot must divide the remaining block
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.d.at(i, j).divides(w.d.at(t, t), ctx) {
                        w.row_addmul(t, i, &LaurentPoly::one());
                        continue 'pivot;
                    }
                }
            }
            break;
        }

        // canonical associate on the diagonal
        let pivot = w.d.at(t, t).clone();
        let canon = pivot.normalize_unit(ctx)?;
        let unit = pivot.div_rem(&canon, ctx)?.0;
        w.scale_row_unit(t, &unit)?;
        t += 1;
    }

    Ok(Smith { u: w.u, u_inv: w.u_inv, d: w.d, v: w.v, v_inv: w.v_inv })
}

/// A basis of `ker(m)` together with coordinates for rewriting vectors of the
/// kernel in that basis.
#[derive(Debug, Clone)]
pub struct KernelData {
    /// Columns form a free basis of the kernel.
    pub basis: Matrix,
    v_inv: Matrix,
    kernel_cols: Vec<usize>,
}

impl KernelData {
    pub fn rank(&self) -> usize {
        self.kernel_cols.len()
    }

    /// Rewrites the columns of `vecs` (which must lie in the kernel) in the
    /// kernel basis: returns `x` with `basis·x = vecs`.
    pub fn express(&self, vecs: &Matrix, ctx: &FieldCtx) -> Result<Matrix> {
        let coords = self.v_inv.mul(vecs, ctx)?;
        for i in 0..coords.rows() {
            if self.kernel_cols.contains(&i) {
                continue;
            }
            for j in 0..coords.cols() {
                if !coords.at(i, j).is_zero() {
                    return Err(Error::InvariantViolation(
                        "vector outside the kernel passed to express()".into(),
                    ));
                }
            }
        }
        Ok(Matrix::from_fn(self.kernel_cols.len(), coords.cols(), |i, j| {
            coords.at(self.kernel_cols[i], j).clone()
        }))
    }
}

/// Kernel of `m` as a map `R^cols → R^rows`.
pub fn kernel(m: &Matrix, ctx: &FieldCtx) -> Result<KernelData> {
    let snf = smith_normal_form(m, ctx)?;
    let rank_bound = m.rows().min(m.cols());
    let kernel_cols: Vec<usize> = (0..m.cols())
        .filter(|&j| j >= rank_bound || snf.d.at(j, j).is_zero())
        .collect();
    let basis = Matrix::from_fn(m.cols(), kernel_cols.len(), |i, j| {
        snf.v.at(i, kernel_cols[j]).clone()
    });
    Ok(KernelData { basis, v_inv: snf.v_inv, kernel_cols })
}

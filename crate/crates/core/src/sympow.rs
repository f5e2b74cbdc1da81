//! Symmetric powers of complexes via the full tensor-power construction.
//!
//! `Sym^n(E)` is computed the long way: build `E^{⊗n}` with differentials
//! `(−1)^{i_1+⋯+i_{k−1}} d^{i_k}`, let `Σ_n` act with Koszul signs, apply the
//! symmetrizer `(1/n!)·Σ_σ σ` (characteristic 0), and take the image
//! subcomplex. This is the independent oracle against which the closed-form
//! two-term path is checked.

use std::collections::{BTreeMap, HashMap};

use num::rational::BigRational;
use num::Zero;

use crate::complex::Complex;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::Matrix;
use crate::scalar::{ExactScalar, FieldCtx};

const SIZE_LIMIT: usize = 10_000;

/// A pure tensor basis element: one `(degree, index)` slot per factor.
type Word = Vec<(i64, usize)>;

/// Sparse column: row → coefficient.
type QCol = BTreeMap<usize, BigRational>;
type PolyCol = BTreeMap<usize, LaurentPoly>;

struct TensorPower {
    n: usize,
    /// words per total degree, in lexicographic order
    words: BTreeMap<i64, Vec<Word>>,
    index: HashMap<Word, (i64, usize)>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

/// Koszul sign of moving slot `k` to slot `sigma[k]`: one `(−1)^{i_k·i_ℓ}`
/// per inverted pair.
fn koszul_sign(sigma: &[usize], degs: &[i64]) -> i64 {
    let mut odd_inversions = 0;
    for k in 0..sigma.len() {
        for l in k + 1..sigma.len() {
            if sigma[k] > sigma[l] && degs[k].rem_euclid(2) == 1 && degs[l].rem_euclid(2) == 1 {
                odd_inversions += 1;
            }
        }
    }
    if odd_inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl TensorPower {
    fn build(x: &Complex, n: usize) -> Result<Self> {
        let gens: Vec<(i64, usize)> = x
            .terms()
            .iter()
            .flat_map(|(&d, &r)| (0..r).map(move |k| (d, k)))
            .collect();
        let total = gens.len().checked_pow(n as u32).ok_or(Error::SymSizeLimit(usize::MAX))?;
        if total > SIZE_LIMIT {
            return Err(Error::SymSizeLimit(total));
        }
        let mut words: BTreeMap<i64, Vec<Word>> = BTreeMap::new();
        let mut cur: Word = Vec::with_capacity(n);
        fn enumerate(
            gens: &[(i64, usize)],
            n: usize,
            cur: &mut Word,
            words: &mut BTreeMap<i64, Vec<Word>>,
        ) {
            if cur.len() == n {
                let deg: i64 = cur.iter().map(|(d, _)| d).sum();
                words.entry(deg).or_default().push(cur.clone());
                return;
            }
            for &g in gens {
                cur.push(g);
                enumerate(gens, n, cur, words);
                cur.pop();
            }
        }
        enumerate(&gens, n, &mut cur, &mut words);
        for ws in words.values_mut() {
            ws.sort();
        }
        let mut index = HashMap::new();
        for (&d, ws) in &words {
            for (i, w) in ws.iter().enumerate() {
                index.insert(w.clone(), (d, i));
            }
        }
        Ok(TensorPower { n, words, index })
    }

    fn rank(&self, d: i64) -> usize {
        self.words.get(&d).map(Vec::len).unwrap_or(0)
    }

    /// Sparse columns of the total differential leaving degree `d`.
    fn differential(&self, x: &Complex, d: i64, _ctx: &FieldCtx) -> Vec<PolyCol> {
        let Some(ws) = self.words.get(&d) else { return Vec::new() };
        let mut cols = vec![PolyCol::new(); ws.len()];
        for (ci, w) in ws.iter().enumerate() {
            for k in 0..self.n {
                let (dk, bk) = w[k];
                let dm = x.diff_at(dk);
                if dm.is_zero() {
                    continue;
                }
                let sign_exp: i64 = w[..k].iter().map(|(deg, _)| deg).sum();
                let negative = sign_exp.rem_euclid(2) == 1;
                for a in 0..x.rank_at(dk + 1) {
                    let e = dm.at(a, bk);
                    if e.is_zero() {
                        continue;
                    }
                    let mut w2 = w.clone();
                    w2[k] = (dk + 1, a);
                    let (_, row) = self.index[&w2];
                    let term = if negative { e.neg() } else { e.clone() };
                    let slot = cols[ci].entry(row).or_insert_with(LaurentPoly::zero);
                    *slot = slot.add(&term);
                    if slot.is_zero() {
                        cols[ci].remove(&row);
                    }
                }
            }
        }
        cols
    }

    /// Signed permutation matrix of `σ` on the degree-`d` term, as sparse
    /// columns (each a single entry ±1).
    fn action(&self, sigma: &[usize], d: i64) -> Vec<(usize, i64)> {
        let Some(ws) = self.words.get(&d) else { return Vec::new() };
        ws.iter()
            .map(|w| {
                let degs: Vec<i64> = w.iter().map(|(deg, _)| *deg).collect();
                let mut w2 = vec![(0i64, 0usize); self.n];
                for k in 0..self.n {
                    w2[sigma[k]] = w[k];
                }
                let (_, row) = self.index[&w2];
                (row, koszul_sign(sigma, &degs))
            })
            .collect()
    }

    /// Sparse columns of the symmetrizer on the degree-`d` term.
    fn symmetrizer(&self, d: i64) -> Vec<QCol> {
        let rank = self.rank(d);
        let mut cols = vec![QCol::new(); rank];
        let perms = permutations(self.n);
        let factor = BigRational::new(1.into(), (perms.len() as i64).into());
        for sigma in &perms {
            for (ci, (row, sign)) in self.action(sigma, d).into_iter().enumerate() {
                let c = cols[ci].entry(row).or_insert_with(BigRational::zero);
                *c += if sign > 0 { factor.clone() } else { -factor.clone() };
                if c.is_zero() {
                    cols[ci].remove(&row);
                }
            }
        }
        cols
    }
}

/// Reduced column echelon basis of the span of `cols`; returns the basis
/// columns together with their pivot rows, sorted by pivot row.
fn column_echelon(cols: &[QCol]) -> Vec<(usize, QCol)> {
    let mut basis: Vec<(usize, QCol)> = Vec::new();
    for col in cols {
        let mut c = col.clone();
        for (p, b) in &basis {
            if let Some(f) = c.get(p).cloned() {
                for (r, v) in b {
                    let e = c.entry(*r).or_insert_with(BigRational::zero);
                    *e -= &f * v;
                    if e.is_zero() {
                        c.remove(r);
                    }
                }
            }
        }
        let Some((&pivot, _)) = c.iter().next() else { continue };
        let lead = c[&pivot].clone();
        for v in c.values_mut() {
            *v /= lead.clone();
        }
        for (_, b) in basis.iter_mut() {
            if let Some(f) = b.get(&pivot).cloned() {
                let mut updates = Vec::new();
                for (r, v) in &c {
                    updates.push((*r, &f * v));
                }
                for (r, delta) in updates {
                    let e = b.entry(r).or_insert_with(BigRational::zero);
                    *e -= delta;
                    if e.is_zero() {
                        b.remove(&r);
                    }
                }
            }
        }
        basis.push((pivot, c));
    }
    basis.sort_by_key(|(p, _)| *p);
    basis
}

fn qcol_to_polycol(c: &QCol) -> PolyCol {
    c.iter()
        .map(|(&r, v)| (r, LaurentPoly::constant(ExactScalar::from_rational(v.clone()))))
        .collect()
}

/// `Sym^n(X)` as the image of the symmetrizer inside `X^{⊗n}`.
pub fn sym_power_oracle(x: &Complex, n: usize, ctx: &FieldCtx) -> Result<Complex> {
    if n == 0 {
        return Ok(Complex::concentrated(x.base(), 0, 1));
    }
    let tp = TensorPower::build(x, n)?;
    // basis of the symmetric part per degree
    let mut bases: BTreeMap<i64, Vec<(usize, QCol)>> = BTreeMap::new();
    for &d in tp.words.keys() {
        let b = column_echelon(&tp.symmetrizer(d));
        if !b.is_empty() {
            bases.insert(d, b);
        }
    }
    let mut terms = BTreeMap::new();
    for (&d, b) in &bases {
        terms.insert(d, b.len());
    }
    let mut diffs = BTreeMap::new();
    for (&d, b) in &bases {
        let Some(b_next) = bases.get(&(d + 1)) else {
            if tp.rank(d + 1) > 0 {
                // target degree has no symmetric part; differential must vanish
                let dcols = tp.differential(x, d, ctx);
                for (_, col) in b.iter().map(|(p, c)| (p, c)) {
                    let img = apply_sparse(&dcols, &qcol_to_polycol(col), ctx);
                    if !img.is_empty() {
                        return Err(Error::InvariantViolation(
                            "symmetrizer image not closed under the differential".into(),
                        ));
                    }
                }
            }
            continue;
        };
        let dcols = tp.differential(x, d, ctx);
        let mut m = Matrix::zero(b_next.len(), b.len());
        for (j, (_, col)) in b.iter().enumerate() {
            let img = apply_sparse(&dcols, &qcol_to_polycol(col), ctx);
            // coordinates in the reduced echelon basis = values at pivot rows
            let mut coords = vec![LaurentPoly::zero(); b_next.len()];
            for (i, (p, _)) in b_next.iter().enumerate() {
                if let Some(v) = img.get(p) {
                    coords[i] = v.clone();
                }
            }
            // exactness check: basis·coords must reproduce img
            let mut recon: PolyCol = PolyCol::new();
            for (i, (_, bc)) in b_next.iter().enumerate() {
                if coords[i].is_zero() {
                    continue;
                }
                for (&r, v) in bc {
                    let term = coords[i].mul(&LaurentPoly::constant(ExactScalar::from_rational(v.clone())), ctx);
                    let e = recon.entry(r).or_insert_with(LaurentPoly::zero);
                    *e = e.add(&term);
                    if e.is_zero() {
                        recon.remove(&r);
                    }
                }
            }
            if recon != img {
                return Err(Error::InvariantViolation(
                    "symmetrizer image not closed under the differential".into(),
                ));
            }
            for (i, c) in coords.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        if !m.is_zero() {
            diffs.insert(d, m);
        }
    }
    Complex::new(x.base(), terms, diffs, ctx)
}

/// Applies a sparse matrix (given by columns) to a sparse vector.
fn apply_sparse(cols: &[PolyCol], v: &PolyCol, ctx: &FieldCtx) -> PolyCol {
    let mut out = PolyCol::new();
    for (&j, coeff) in v {
        for (&r, e) in &cols[j] {
            let term = e.mul(coeff, ctx);
            let slot = out.entry(r).or_insert_with(LaurentPoly::zero);
            *slot = slot.add(&term);
            if slot.is_zero() {
                out.remove(&r);
            }
        }
    }
    out
}

/// Checks `ρ(σ)∘d = d∘ρ(σ)` for every adjacent transposition, degree by
/// degree. This validates the Koszul sign rule.
pub fn action_commutes_with_differential(x: &Complex, n: usize, ctx: &FieldCtx) -> Result<bool> {
    if n < 2 {
        return Ok(true);
    }
    let tp = TensorPower::build(x, n)?;
    for k in 0..n - 1 {
        let mut sigma: Vec<usize> = (0..n).collect();
        sigma.swap(k, k + 1);
        for &d in tp.words.keys() {
            if tp.rank(d + 1) == 0 {
                continue;
            }
            let dcols = tp.differential(x, d, ctx);
            let act_d = tp.action(&sigma, d);
            let act_next = tp.action(&sigma, d + 1);
            for (col, &(arow, asign)) in act_d.iter().enumerate() {
                // d(σ·e_col) = asign · column arow of D
                let lhs: PolyCol = dcols[arow]
                    .iter()
                    .map(|(&r, e)| (r, if asign > 0 { e.clone() } else { e.neg() }))
                    .collect();
                // σ(d(e_col))
                let mut rhs = PolyCol::new();
                for (&r, e) in &dcols[col] {
                    let (r2, s2) = act_next[r];
                    let term = if s2 > 0 { e.clone() } else { e.neg() };
                    let slot = rhs.entry(r2).or_insert_with(LaurentPoly::zero);
                    *slot = slot.add(&term);
                    if slot.is_zero() {
                        rhs.remove(&r2);
                    }
                }
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Checks `P∘P = P` for the symmetrizer, exactly.
pub fn symmetrizer_idempotent(x: &Complex, n: usize, _ctx: &FieldCtx) -> Result<bool> {
    if n == 0 {
        return Ok(true);
    }
    let tp = TensorPower::build(x, n)?;
    for &d in tp.words.keys() {
        let p = tp.symmetrizer(d);
        for (j, col) in p.iter().enumerate() {
            // (P·P) e_j = P applied to column j
            let mut pp = QCol::new();
            for (&r, v) in col {
                for (&r2, v2) in &p[r] {
                    let e = pp.entry(r2).or_insert_with(BigRational::zero);
                    *e += v * v2;
                    if e.is_zero() {
                        pp.remove(&r2);
                    }
                }
            }
            if &pp != &p[j] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{sym_power_fast, Base};

    fn ctx() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    fn t_minus(c: i64) -> LaurentPoly {
        LaurentPoly::t_minus(&ExactScalar::from_int(c))
    }

    fn e_triv(c: &FieldCtx) -> Complex {
        Complex::two_term(Base::Ring, 0, t_minus(1), c).unwrap()
    }

    fn e_cyc_shift(c: &FieldCtx) -> Complex {
        let qt1 = LaurentPoly::binomial(1, ExactScalar::from_int(3), 0, ExactScalar::from_int(-1));
        Complex::two_term(Base::Ring, 0, qt1, c).unwrap().shift(-1, c)
    }

    #[test]
    fn oracle_equals_fast_path_in_cohomology() {
        let c = ctx();
        for e in [e_triv(&c), e_cyc_shift(&c)] {
            for n in 1..=4usize {
                let fast = sym_power_fast(&e, n, &c).unwrap();
                let slow = sym_power_oracle(&e, n, &c).unwrap();
                assert_eq!(
                    fast.cohomology(&c).unwrap(),
                    slow.cohomology(&c).unwrap(),
                    "n = {n}"
                );
            }
        }
    }

    #[test]
    fn sym_square_of_even_odd_lines() {
        let c = ctx();
        // K ⊕ K[−1]: Sym² has dims (1, 1, 0): the odd square dies
        let x = Complex::new(
            Base::Field,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::new(),
            &c,
        )
        .unwrap();
        let s = sym_power_oracle(&x, 2, &c).unwrap();
        let h = s.cohomology(&c).unwrap();
        assert_eq!(h.dims(), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(s.rank_at(2), 0);
    }

    #[test]
    fn oracle_identity_at_n1() {
        let c = ctx();
        let e = e_triv(&c);
        assert_eq!(sym_power_oracle(&e, 1, &c).unwrap(), e);
    }

    #[test]
    fn action_commutes_for_small_powers() {
        let c = ctx();
        for e in [e_triv(&c), e_cyc_shift(&c)] {
            for n in 2..=4usize {
                assert!(action_commutes_with_differential(&e, n, &c).unwrap(), "n = {n}");
            }
        }
        // a mixed-rank field-base complex
        let d = Matrix::from_scalar_rows(vec![
            vec![ExactScalar::from_int(1), ExactScalar::zero()],
            vec![ExactScalar::zero(), ExactScalar::zero()],
        ])
        .unwrap();
        let x = Complex::new(
            Base::Field,
            BTreeMap::from([(0, 2), (1, 2)]),
            BTreeMap::from([(0, d)]),
            &c,
        )
        .unwrap();
        for n in 2..=3usize {
            assert!(action_commutes_with_differential(&x, n, &c).unwrap());
        }
    }

    #[test]
    fn symmetrizer_is_idempotent() {
        let c = ctx();
        for n in 2..=4usize {
            assert!(symmetrizer_idempotent(&e_triv(&c), n, &c).unwrap());
        }
    }

    #[test]
    fn size_limit_enforced() {
        let c = ctx();
        let x = Complex::concentrated(Base::Field, 0, 11);
        assert!(matches!(sym_power_oracle(&x, 4, &c), Err(Error::SymSizeLimit(_))));
    }
}

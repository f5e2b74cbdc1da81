//! Bounded cochain complexes over `K` or `K[T^±]`.
//!
//! Terms are free modules given by ranks; differentials are matrices with
//! `d^{i+1} ∘ d^i = 0` validated at construction. Cohomology is computed by
//! Smith normal form over the ring base, which specializes to rank counting
//! over the field base.
//!
//! Conventions, fixed once:
//!   shift   (X[k])^i = X^{i+k}, differential scaled by (−1)^k;
//!   dual    (X^∨)^i = (X^{−i})^∨, differential (−1)^{i+1}·dᵗ.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::{kernel, Matrix};
use crate::module::{module_from_presentation, FgModule};
use crate::scalar::FieldCtx;

/// The base of a complex: the field `K` or the Laurent ring `K[T^±]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Base {
    #[serde(rename = "K")]
    Field,
    #[serde(rename = "K[T\u{b1}]")]
    Ring,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    base: Base,
    terms: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, Matrix>,
}

impl Complex {
    /// Validates shapes, `d∘d = 0`, and (over the field base) that all
    /// entries are constants.
    pub fn new(base: Base, terms: BTreeMap<i64, usize>, diffs: BTreeMap<i64, Matrix>, ctx: &FieldCtx) -> Result<Self> {
        let terms: BTreeMap<i64, usize> = terms.into_iter().filter(|(_, r)| *r > 0).collect();
        let rank = |d: i64| terms.get(&d).copied().unwrap_or(0);
        let mut kept = BTreeMap::new();
        for (&d, m) in &diffs {
            if m.rows() != rank(d + 1) || m.cols() != rank(d) {
                return Err(Error::ShapeMismatch(format!(
                    "differential at degree {d} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    rank(d + 1),
                    rank(d)
                )));
            }
            if base == Base::Field {
                for i in 0..m.rows() {
                    for j in 0..m.cols() {
                        let e = m.at(i, j);
                        if !e.is_zero() && (e.min_exp() != Some(0) || e.max_exp() != Some(0)) {
                            return Err(Error::ShapeMismatch(
                                "field-base complex with non-constant entries".into(),
                            ));
                        }
                    }
                }
            }
            if !m.is_zero() {
                kept.insert(d, m.clone());
            }
        }
        let out = Complex { base, terms, diffs: kept };
        for (&d, m) in &out.diffs {
            if let Some(next) = out.diffs.get(&(d + 1)) {
                if !next.mul(m, ctx)?.is_zero() {
                    return Err(Error::NotAComplex(d));
                }
            }
        }
        Ok(out)
    }

    /// Re-validates an already-built complex (used after deserialization).
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        Complex::new(self.base, self.terms.clone(), self.diffs.clone(), ctx).map(|_| ())
    }

    /// The zero complex.
    pub fn empty(base: Base) -> Self {
        Complex { base, terms: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// A single free term in one degree.
    pub fn concentrated(base: Base, degree: i64, rank: usize) -> Self {
        let mut terms = BTreeMap::new();
        if rank > 0 {
            terms.insert(degree, rank);
        }
        Complex { base, terms, diffs: BTreeMap::new() }
    }

    /// `[R --f--> R]` in degrees `[a, a+1]`.
    pub fn two_term(base: Base, a: i64, f: LaurentPoly, ctx: &FieldCtx) -> Result<Self> {
        Complex::new(
            base,
            BTreeMap::from([(a, 1), (a + 1, 1)]),
            BTreeMap::from([(a, Matrix::from_rows(vec![vec![f]])?)]),
            ctx,
        )
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn terms(&self) -> &BTreeMap<i64, usize> {
        &self.terms
    }

    pub fn rank_at(&self, degree: i64) -> usize {
        self.terms.get(&degree).copied().unwrap_or(0)
    }

    /// Differential leaving `degree`; zero matrix of the right shape when absent.
    pub fn diff_at(&self, degree: i64) -> Matrix {
        self.diffs
            .get(&degree)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.rank_at(degree + 1), self.rank_at(degree)))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn total_rank(&self) -> usize {
        self.terms.values().sum()
    }

    /// `(X[k])^i = X^{i+k}`; differentials pick up `(−1)^k`.
    pub fn shift(&self, k: i64, ctx: &FieldCtx) -> Self {
        let terms = self.terms.iter().map(|(&d, &r)| (d - k, r)).collect();
        let sign = if k.rem_euclid(2) == 0 {
            LaurentPoly::one()
        } else {
            LaurentPoly::from_int(-1)
        };
        let diffs = self
            .diffs
            .iter()
            .map(|(&d, m)| (d - k, m.scale(&sign, ctx)))
            .collect();
        Complex { base: self.base, terms, diffs }
    }

    /// `(X^∨)^i = (X^{−i})^∨` with transposed differentials and Koszul signs.
    pub fn dual(&self, ctx: &FieldCtx) -> Self {
        let terms: BTreeMap<i64, usize> = self.terms.iter().map(|(&d, &r)| (-d, r)).collect();
        let mut diffs = BTreeMap::new();
        for (&d, m) in &self.diffs {
            // d_X: X^d → X^{d+1} dualizes to (X^∨)^{-d-1} → (X^∨)^{-d}
            let deg = -d - 1;
            let sign = if (deg + 1).rem_euclid(2) == 0 { 1 } else { -1 };
            let mt = if sign == 1 {
                m.transpose()
            } else {
                m.transpose().scale(&LaurentPoly::from_int(-1), ctx)
            };
            if !mt.is_zero() {
                diffs.insert(deg, mt);
            }
        }
        Complex { base: self.base, terms, diffs }
    }

    /// Direct sum.
    pub fn direct_sum(&self, other: &Complex, ctx: &FieldCtx) -> Result<Complex> {
        assert_eq!(self.base, other.base, "direct sum across bases");
        let mut terms = BTreeMap::new();
        let degrees: std::collections::BTreeSet<i64> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .copied()
            .collect();
        for &d in &degrees {
            let r = self.rank_at(d) + other.rank_at(d);
            if r > 0 {
                terms.insert(d, r);
            }
        }
        let mut diffs = BTreeMap::new();
        for &d in &degrees {
            let (a, b) = (self.diff_at(d), other.diff_at(d));
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let rows = self.rank_at(d + 1) + other.rank_at(d + 1);
            let cols = self.rank_at(d) + other.rank_at(d);
            let m = Matrix::from_fn(rows, cols, |i, j| {
                let (r1, c1) = (self.rank_at(d + 1), self.rank_at(d));
                if i < r1 && j < c1 {
                    a.at(i, j).clone()
                } else if i >= r1 && j >= c1 {
                    b.at(i - r1, j - c1).clone()
                } else {
                    LaurentPoly::zero()
                }
            });
            diffs.insert(d, m);
        }
        Complex::new(self.base, terms, diffs, ctx)
    }

    /// Total complex of the bigraded tensor product, with Koszul signs on the
    /// second factor.
    pub fn tensor(&self, other: &Complex, ctx: &FieldCtx) -> Result<Complex> {
        assert_eq!(self.base, other.base, "tensor across bases");
        if self.is_empty() || other.is_empty() {
            return Ok(Complex::empty(self.base));
        }
        // offsets[n][i] = starting index of the X^i ⊗ Y^{n-i} block in degree n
        let mut terms: BTreeMap<i64, usize> = BTreeMap::new();
        let mut offsets: BTreeMap<i64, BTreeMap<i64, usize>> = BTreeMap::new();
        for (&i, &ri) in &self.terms {
            for (&j, &rj) in &other.terms {
                let n = i + j;
                let entry = terms.entry(n).or_insert(0);
                offsets.entry(n).or_default().insert(i, *entry);
                *entry += ri * rj;
            }
        }
        let mut diffs = BTreeMap::new();
        for (&n, &rank_n) in &terms {
            let rank_next = terms.get(&(n + 1)).copied().unwrap_or(0);
            if rank_next == 0 {
                continue;
            }
            let mut m = Matrix::zero(rank_next, rank_n);
            let blocks_n = &offsets[&n];
            for (&i, &off) in blocks_n {
                let j = n - i;
                let ri = self.rank_at(i);
                let rj = other.rank_at(j);
                // d_X ⊗ id : block (i,j) → block (i+1, j)
                let dx = self.diff_at(i);
                if !dx.is_zero() {
                    if let Some(&off_dst) = offsets.get(&(n + 1)).and_then(|b| b.get(&(i + 1))) {
                        for a in 0..self.rank_at(i + 1) {
                            for a2 in 0..ri {
                                let e = dx.at(a, a2);
                                if e.is_zero() {
                                    continue;
                                }
                                for b in 0..rj {
                                    m.set(off_dst + a * rj + b, off + a2 * rj + b, e.clone());
                                }
                            }
                        }
                    }
                }
                // (−1)^i id ⊗ d_Y : block (i,j) → block (i, j+1)
                let dy = other.diff_at(j);
                if !dy.is_zero() {
                    if let Some(&off_dst) = offsets.get(&(n + 1)).and_then(|b| b.get(&i)) {
                        let rj_next = other.rank_at(j + 1);
                        let sign = if i.rem_euclid(2) == 0 { 1 } else { -1 };
                        for b in 0..rj_next {
                            for b2 in 0..rj {
                                let e = dy.at(b, b2);
                                if e.is_zero() {
                                    continue;
                                }
                                let e = if sign == 1 { e.clone() } else { e.neg() };
                                for a in 0..ri {
                                    m.set(off_dst + a * rj_next + b, off + a * rj + b2, e.clone());
                                }
                            }
                        }
                    }
                }
            }
            if !m.is_zero() {
                diffs.insert(n, m);
            }
        }
        Complex::new(self.base, terms, diffs, ctx)
    }

    /// `H^i = ker d^i / im d^{i−1}` degree by degree; zero entries omitted.
    pub fn cohomology(&self, ctx: &FieldCtx) -> Result<GradedCohomology> {
        let mut out = BTreeMap::new();
        for (&d, &rank_d) in &self.terms {
            let d_out = self.diff_at(d);
            let d_in = self.diff_at(d - 1);
            let ker = kernel(&d_out, ctx)?;
            let rels = if d_in.cols() == 0 {
                Matrix::zero(ker.rank(), 0)
            } else {
                ker.express(&d_in, ctx)?
            };
            let h = module_from_presentation(ker.rank(), &rels, ctx)?;
            debug_assert!(ker.rank() <= rank_d);
            if !h.is_zero() {
                out.insert(d, h);
            }
        }
        Ok(GradedCohomology(out))
    }

    /// Alternating sum of term ranks (field base: of dimensions).
    pub fn euler_characteristic(&self) -> i64 {
        self.terms
            .iter()
            .map(|(&d, &r)| if d.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }
}

/// Symmetric power of a two-term rank-1 complex in adjacent degrees `[a, a+1]`.
///
/// For `a` even the result is a two-term rank-1 complex in `[na, na+1]`; for
/// `a` odd, in `[n(a+1)−1, n(a+1)]`. Either way the differential is the same
/// 1×1 map, every other graded piece being killed by the Koszul signs.
pub fn sym_power_fast(e: &Complex, n: usize, ctx: &FieldCtx) -> Result<Complex> {
    if n == 0 {
        return Ok(Complex::concentrated(e.base(), 0, 1));
    }
    let degrees: Vec<i64> = e.terms().keys().copied().collect();
    if degrees.len() != 2 || degrees[1] != degrees[0] + 1 {
        return Err(Error::BadSymShape);
    }
    let a = degrees[0];
    if e.rank_at(a) != 1 || e.rank_at(a + 1) != 1 {
        return Err(Error::BadSymShape);
    }
    if n == 1 {
        return Ok(e.clone());
    }
    let d = e.diff_at(a).at(0, 0).clone();
    let bracket = Complex::two_term(e.base(), 0, d, ctx)?;
    let nn = n as i64;
    let shift = if a.rem_euclid(2) == 0 { -nn * a } else { 1 - nn * (a + 1) };
    Ok(bracket.shift(shift, ctx))
}

/// Cohomology presented degree by degree as module normal forms. Over the
/// field base every entry is free and `free_rank` is the dimension.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GradedCohomology(pub BTreeMap<i64, FgModule>);

impl GradedCohomology {
    pub fn at(&self, degree: i64) -> FgModule {
        self.0.get(&degree).cloned().unwrap_or_else(FgModule::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.keys().copied()
    }

    /// Dimensions per degree (field base only).
    pub fn dims(&self) -> BTreeMap<i64, usize> {
        self.0.iter().map(|(&d, m)| (d, m.dim())).collect()
    }

    /// Alternating sum of free ranks.
    pub fn euler_characteristic(&self) -> i64 {
        self.0
            .iter()
            .map(|(&d, m)| {
                let r = m.free_rank as i64;
                if d.rem_euclid(2) == 0 {
                    r
                } else {
                    -r
                }
            })
            .sum()
    }
}

impl fmt::Display for GradedCohomology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (d, m) in &self.0 {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "H^{d} = {m}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ComplexRepr {
    base: Base,
    terms: BTreeMap<String, usize>,
    diffs: BTreeMap<String, Matrix>,
}

impl Serialize for Complex {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexRepr {
            base: self.base,
            terms: self.terms.iter().map(|(d, r)| (d.to_string(), *r)).collect(),
            diffs: self.diffs.iter().map(|(d, m)| (d.to_string(), m.clone())).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Complex {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = ComplexRepr::deserialize(de)?;
        let parse = |s: &str| s.parse::<i64>().map_err(|e| D::Error::custom(format!("bad degree {s:?}: {e}")));
        let mut terms = BTreeMap::new();
        for (k, v) in &repr.terms {
            terms.insert(parse(k)?, *v);
        }
        let mut diffs = BTreeMap::new();
        for (k, v) in repr.diffs {
            diffs.insert(parse(&k)?, v);
        }
        // structural validation needs a ctx only for d∘d = 0; defer that to
        // the caller via `Complex::new` — here we re-check shapes only.
        let rank = |d: i64| terms.get(&d).copied().unwrap_or(0);
        for (&d, m) in &diffs {
            if m.rows() != rank(d + 1) || m.cols() != rank(d) {
                return Err(D::Error::custom(format!("differential shape mismatch at degree {d}")));
            }
        }
        Ok(Complex { base: repr.base, terms, diffs })
    }
}

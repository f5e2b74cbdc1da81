//! The Laurent polynomial ring `R = K[T^±]`.
//!
//! `R` is a localization of `K[T]`, hence a PID; its units are the monomials
//! `c·T^k`. The canonical associate of a nonzero element is monic with
//! lowest exponent 0 and nonzero constant term, so normal forms can be
//! compared structurally.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, FieldCtx};

/// A Laurent polynomial, stored as exponent → nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, ExactScalar>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, ExactScalar::one())
    }

    /// The coordinate `T`.
    pub fn t() -> Self {
        Self::monomial(1, ExactScalar::one())
    }

    pub fn monomial(exp: i64, coeff: ExactScalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        LaurentPoly { coeffs }
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(ExactScalar::from_int(n))
    }

    /// Builds from a list of `(exponent, coefficient)` terms, merging duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, ExactScalar)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    /// `c1·T^{e1} + c0·T^{e0}`, the workhorse for the linear generators.
    pub fn binomial(e1: i64, c1: ExactScalar, e0: i64, c0: ExactScalar) -> Self {
        Self::from_terms([(e1, c1), (e0, c0)])
    }

    /// `T - c`.
    pub fn t_minus(c: &ExactScalar) -> Self {
        Self::binomial(1, ExactScalar::one(), 0, -c)
    }

    fn add_term(&mut self, exp: i64, coeff: ExactScalar) {
        if coeff.is_zero() {
            return;
        }
        match self.coeffs.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    o.insert(sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).map(ExactScalar::is_one).unwrap_or(false)
    }

    /// A unit of `K[T^±]` is a single monomial.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn coeff(&self, exp: i64) -> ExactScalar {
        self.coeffs.get(&exp).cloned().unwrap_or_else(ExactScalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &ExactScalar)> {
        self.coeffs.iter()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Width of the support window; the Euclidean size function on `R`.
    /// Zero for units, `None` for the zero polynomial.
    pub fn window(&self) -> Option<i64> {
        Some(self.max_exp()? - self.min_exp()?)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            out.add_term(*e, -c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn mul(&self, other: &Self, ctx: &FieldCtx) -> Self {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                out.add_term(e1 + e2, ctx.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar, ctx: &FieldCtx) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, k)| (*e, ctx.mul(k, c))).collect() }
    }

    pub fn mul_monomial(&self, exp: i64, c: &ExactScalar, ctx: &FieldCtx) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly { coeffs: self.coeffs.iter().map(|(e, k)| (*e + exp, ctx.mul(k, c))).collect() }
    }

    /// Substitutes `T ↦ c·T` (coefficientwise twist by powers of `c`).
    pub fn substitute_t_scaled(&self, c: &ExactScalar, ctx: &FieldCtx) -> Result<Self> {
        let mut out = LaurentPoly::zero();
        for (e, k) in &self.coeffs {
            let factor = if *e >= 0 {
                let mut acc = ExactScalar::one();
                for _ in 0..*e {
                    acc = ctx.mul(&acc, c);
                }
                acc
            } else {
                let cinv = ctx.inv(c)?;
                let mut acc = ExactScalar::one();
                for _ in 0..(-*e) {
                    acc = ctx.mul(&acc, &cinv);
                }
                acc
            };
            out.add_term(*e, ctx.mul(k, &factor));
        }
        Ok(out)
    }

    pub fn evaluate(&self, x: &ExactScalar, ctx: &FieldCtx) -> Result<ExactScalar> {
        let mut acc = ExactScalar::zero();
        for (e, k) in &self.coeffs {
            let p = if *e >= 0 {
                let mut v = ExactScalar::one();
                for _ in 0..*e {
                    v = ctx.mul(&v, x);
                }
                v
            } else {
                let xi = ctx.inv(x)?;
                let mut v = ExactScalar::one();
                for _ in 0..(-*e) {
                    v = ctx.mul(&v, &xi);
                }
                v
            };
            acc = &acc + &ctx.mul(k, &p);
        }
        Ok(acc)
    }

    /// The unique associate with lowest exponent 0 and leading coefficient 1.
    pub fn normalize_unit(&self, ctx: &FieldCtx) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let min = self.min_exp().unwrap();
        let lead = self.coeff(self.max_exp().unwrap());
        let lead_inv = ctx.inv(&lead)?;
        Ok(self.mul_monomial(-min, &lead_inv, ctx))
    }

    /// Division with remainder: `self = quot·div + rem` with `rem` either zero
    /// or of strictly smaller window than `div`.
    pub fn div_rem(&self, div: &Self, ctx: &FieldCtx) -> Result<(Self, Self)> {
        if div.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if div.is_unit() {
            let e = div.min_exp().unwrap();
            let c_inv = ctx.inv(&div.coeff(e))?;
            return Ok((self.mul_monomial(-e, &c_inv, ctx), LaurentPoly::zero()));
        }
        let mut rem = self.clone();
        let mut quot = LaurentPoly::zero();
        let div_win = div.window().unwrap();
        let div_lead = div.coeff(div.max_exp().unwrap());
        let div_lead_inv = ctx.inv(&div_lead)?;
        while !rem.is_zero() && rem.window().unwrap() >= div_win {
            let shift = rem.max_exp().unwrap() - div.max_exp().unwrap();
            let factor = ctx.mul(&rem.coeff(rem.max_exp().unwrap()), &div_lead_inv);
            let mono = LaurentPoly::monomial(shift, factor);
            rem = rem.sub(&mono.mul(div, ctx));
            quot = quot.add(&mono);
        }
        Ok((quot, rem))
    }

    /// True when `div` divides `self` exactly.
    pub fn divides(&self, div: &Self, ctx: &FieldCtx) -> bool {
        match self.div_rem(div, ctx) {
            Ok((_, rem)) => rem.is_zero(),
            Err(_) => false,
        }
    }

    /// Extended gcd: returns `(g, x, y)` with `x·self + y·other = g`, `g` in
    /// canonical normal form (or zero when both inputs are zero).
    pub fn xgcd(&self, other: &Self, ctx: &FieldCtx) -> Result<(Self, Self, Self)> {
        // Euclid on the window size; invariants rX·a + rY·b = r.
        let mut r0 = self.clone();
        let mut x0 = LaurentPoly::one();
        let mut y0 = LaurentPoly::zero();
        let mut r1 = other.clone();
        let mut x1 = LaurentPoly::zero();
        let mut y1 = LaurentPoly::one();
        while !r1.is_zero() {
            let (q, rem) = r0.div_rem(&r1, ctx)?;
            let x2 = x0.sub(&q.mul(&x1, ctx));
            let y2 = y0.sub(&q.mul(&y1, ctx));
            r0 = r1;
            x0 = x1;
            y0 = y1;
            r1 = rem;
            x1 = x2;
            y1 = y2;
        }
        if r0.is_zero() {
            return Ok((LaurentPoly::zero(), LaurentPoly::zero(), LaurentPoly::zero()));
        }
        // Normalize the gcd and push the unit into the cofactors.
        let norm = r0.normalize_unit(ctx)?;
        let unit = r0.div_rem(&norm, ctx)?.0; // r0 = unit·norm with unit a monomial
        let unit_inv = LaurentPoly::monomial(
            -unit.min_exp().unwrap(),
            ctx.inv(&unit.coeff(unit.min_exp().unwrap()))?,
        );
        Ok((norm, x0.mul(&unit_inv, ctx), y0.mul(&unit_inv, ctx)))
    }

    /// Lexicographic comparison of normalized forms, used for deterministic
    /// pivot tie-breaks and torsion ordering: first by window (degree), then
    /// by coefficients from the top down.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self.window(), other.window()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(a), Some(b)) if a != b => return a.cmp(&b),
            _ => {}
        }
        let w = self.window().unwrap();
        for k in (0..=w).rev() {
            let ca = self.coeff(self.min_exp().unwrap() + k);
            let cb = other.coeff(other.min_exp().unwrap() + k);
            let ord = (ca.a.clone(), ca.b.clone()).cmp(&(cb.a.clone(), cb.b.clone()));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match *e {
                0 => write!(f, "{}", c)?,
                1 if c.is_one() => write!(f, "T")?,
                1 => write!(f, "({})T", c)?,
                _ if c.is_one() => write!(f, "T^{}", e)?,
                _ => write!(f, "({})T^{}", c, e)?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<(i64, ExactScalar)>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr { terms: self.coeffs.iter().map(|(e, c)| (*e, c.clone())).collect() }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(de)?;
        for window in repr.terms.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(D::Error::custom("terms must be sorted by ascending exponent"));
            }
        }
        Ok(LaurentPoly::from_terms(repr.terms))
    }
}

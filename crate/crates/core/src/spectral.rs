//! The spectral side: weight-decomposed tables of shifted modules on the
//! parameter space.
//!
//! The trivial component of the parameter stack is a torus with coordinate
//! `T` (the value of an unramified character on a uniformizer). The rank-1
//! universal family decomposes into two two-term complexes: one supported at
//! the trivial point `T = 1` and one at the cyclotomic point where
//! `q·Φ(T) = 1`. Charts around the two points compute symmetric powers of
//! either block; gluing produces the weight-indexed table, and the
//! normalization applies a degree shear plus a coordinate translation by a
//! square root of the cyclotomic character.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::complex::{sym_power_fast, Base, Complex, GradedCohomology};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::Matrix;
use crate::module::FgModule;
use crate::report::CheckReport;
use crate::scalar::{ExactScalar, FieldCtx, HalfInt};
use crate::sympow::sym_power_oracle;
use crate::weil_deligne::WdRep;

/// Which rank-1 family the table describes: the standard one (`Φ = T`) or
/// its dual (`Φ = T⁻¹`). The direction fixes the cyclotomic support point
/// and the translation used by normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyDirection {
    Std,
    Dual,
}

impl FamilyDirection {
    /// Frobenius coordinate of the family.
    pub fn frobenius(self) -> LaurentPoly {
        match self {
            FamilyDirection::Std => LaurentPoly::t(),
            FamilyDirection::Dual => LaurentPoly::monomial(-1, ExactScalar::one()),
        }
    }

    /// Exponent sign in the normalization translation `T ↦ q^{−ε/2}·T`.
    fn epsilon(self) -> i64 {
        match self {
            FamilyDirection::Std => 1,
            FamilyDirection::Dual => -1,
        }
    }
}

/// One table cell: a module normal form placed in a cohomological degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub module: FgModule,
    pub degree: i64,
}

impl fmt::Display for TableEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.module, self.degree)
    }
}

/// Weight-indexed table of shifted modules on one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedTable {
    pub component: String,
    pub normalized: bool,
    pub family: FamilyDirection,
    pub n_max: i64,
    pub weights: BTreeMap<i64, Vec<TableEntry>>,
}

impl GradedTable {
    pub fn entries_at(&self, weight: i64) -> &[TableEntry] {
        self.weights.get(&weight).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| weight | entry |\n|---|---|\n");
        for (w, entries) in &self.weights {
            let cell = if entries.is_empty() {
                "0".to_string()
            } else {
                entries.iter().map(TableEntry::to_string).collect::<Vec<_>>().join(", ")
            };
            out.push_str(&format!("| {w} | {cell} |\n"));
        }
        out
    }
}

impl Serialize for GradedTable {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            component: &'a str,
            normalized: bool,
            family: FamilyDirection,
            n_max: i64,
            weights: Weights<'a>,
        }
        struct Weights<'a>(&'a BTreeMap<i64, Vec<TableEntry>>);
        impl Serialize for Weights<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = ser.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(&k.to_string(), v)?;
                }
                map.end()
            }
        }
        Repr {
            component: &self.component,
            normalized: self.normalized,
            family: self.family,
            n_max: self.n_max,
            weights: Weights(&self.weights),
        }
        .serialize(ser)
    }
}

/// The two affine charts covering the component: the complement of the
/// trivial point and the complement of the cyclotomic point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// `{Φ ≠ 1}` — the trivial point removed.
    AwayFromTrivial,
    /// `{q·Φ ≠ 1}` — the cyclotomic point removed.
    AwayFromCyclotomic,
}

#[derive(Debug, Clone)]
pub struct ChartData {
    pub chart: Chart,
    pub family: FamilyDirection,
    pub n_max: i64,
    /// The polynomial inverted on this chart, in normal form.
    pub denominator: LaurentPoly,
    /// Per weight, the two-term complex (or 0/free line) living there.
    pub weights: BTreeMap<i64, Complex>,
}

/// The building blocks of the rank-1 universal family: the block supported
/// at the trivial point (`Φ − 1`) and at the cyclotomic point (`q·Φ − 1`),
/// both in degrees `[0, 1]`.
pub fn family_blocks(family: FamilyDirection, ctx: &FieldCtx) -> Result<(Complex, Complex)> {
    let phi = family.frobenius();
    let one = LaurentPoly::one();
    let q = LaurentPoly::constant(ExactScalar::from_int(ctx.q() as i64));
    let triv = Complex::two_term(Base::Ring, 0, phi.sub(&one), ctx)?;
    let cyc = Complex::two_term(Base::Ring, 0, phi.mul(&q, ctx).sub(&one), ctx)?;
    Ok((triv, cyc))
}

/// The perfect complex of the universal rank-1 family on a component:
/// `[R --(Φ−1, 0)--> R² --(0, qΦ−1)--> R]` on the trivial component, the
/// zero complex on every other component.
pub fn universal_complex(component: &str, ctx: &FieldCtx) -> Result<Complex> {
    universal_complex_for(component, FamilyDirection::Std, ctx)
}

pub fn universal_complex_for(
    component: &str,
    family: FamilyDirection,
    ctx: &FieldCtx,
) -> Result<Complex> {
    if component != "triv" {
        return Ok(Complex::empty(Base::Ring));
    }
    let phi = family.frobenius();
    let rep = WdRep::unramified_character(Base::Ring, phi, ctx)?;
    crate::weil_deligne::wd_complex(&rep, ctx)
}

/// Chart-local computation of the weight decomposition up to `n_max`.
///
/// Away from the trivial point the family is the cyclotomic block shifted by
/// one, so positive weights carry `Sym^n(E_cyc[−1])` in degrees `[2n−1, 2n]`
/// and negative weights vanish; away from the cyclotomic point the family is
/// the trivial block, so negative weights carry `Sym^n(E_triv^∨)` in degrees
/// `[−1, 0]` and positive weights vanish. Weight 0 is a free line on both.
pub fn chart_compute(
    chart: Chart,
    n_max: i64,
    family: FamilyDirection,
    ctx: &FieldCtx,
) -> Result<ChartData> {
    assert!(n_max >= 1, "n_max must be at least 1");
    let (triv, cyc) = family_blocks(family, ctx)?;
    let denominator = match chart {
        Chart::AwayFromTrivial => triv.diff_at(0).at(0, 0).normalize_unit(ctx)?,
        Chart::AwayFromCyclotomic => cyc.diff_at(0).at(0, 0).normalize_unit(ctx)?,
    };
    let mut weights = BTreeMap::new();
    weights.insert(0, Complex::concentrated(Base::Ring, 0, 1));
    for n in 1..=n_max {
        match chart {
            Chart::AwayFromTrivial => {
                weights.insert(n, sym_power_fast(&cyc.shift(-1, ctx), n as usize, ctx)?);
                weights.insert(-n, Complex::empty(Base::Ring));
            }
            Chart::AwayFromCyclotomic => {
                weights.insert(-n, sym_power_fast(&triv.dual(ctx), n as usize, ctx)?);
                weights.insert(n, Complex::empty(Base::Ring));
            }
        }
    }
    Ok(ChartData { chart, family, n_max, denominator, weights })
}

fn entries_from_cohomology(h: &GradedCohomology) -> Vec<TableEntry> {
    h.0.iter().map(|(&d, m)| TableEntry { module: m.clone(), degree: d }).collect()
}

/// Glues the two charts into the global weight table.
///
/// The charts must agree after localizing away from both marked points (the
/// torsion weights are supported at exactly one of them); the weight-0 lines
/// glue to a free line — the transition over the overlap is multiplication
/// by the trivial-block equation, a unit there.
pub fn glue(u1: &ChartData, uq: &ChartData, ctx: &FieldCtx) -> Result<GradedTable> {
    let (away_triv, away_cyc) = match (u1.chart, uq.chart) {
        (Chart::AwayFromTrivial, Chart::AwayFromCyclotomic) => (u1, uq),
        (Chart::AwayFromCyclotomic, Chart::AwayFromTrivial) => (uq, u1),
        _ => {
            return Err(Error::InvariantViolation("glue needs one chart of each kind".into()));
        }
    };
    if away_triv.n_max != away_cyc.n_max {
        return Err(Error::RangeMismatch(away_triv.n_max, away_cyc.n_max));
    }
    if away_triv.family != away_cyc.family {
        return Err(Error::InvariantViolation("glue across different families".into()));
    }
    let overlap = [away_triv.denominator.clone(), away_cyc.denominator.clone()];
    let n_max = away_triv.n_max;
    let mut weights = BTreeMap::new();
    for w in -n_max..=n_max {
        let ha = away_triv.weights[&w].cohomology(ctx)?;
        let hb = away_cyc.weights[&w].cohomology(ctx)?;
        // chart agreement on the overlap
        let loc = |h: &GradedCohomology| -> Result<BTreeMap<i64, FgModule>> {
            let mut out = BTreeMap::new();
            for (&d, m) in &h.0 {
                let l = m.localize(&overlap, ctx)?;
                if !l.is_zero() {
                    out.insert(d, l);
                }
            }
            Ok(out)
        };
        if loc(&ha)? != loc(&hb)? {
            return Err(Error::ChartMismatch(w));
        }
        // nonzero-weight entries live on exactly one chart; weight 0 glues
        // the two free lines into one
        let entries = if w == 0 {
            let fa = ha.at(0);
            let fb = hb.at(0);
            if fa != FgModule::free(1) || fb != FgModule::free(1) {
                return Err(Error::InvariantViolation(
                    "weight 0 must be a free line on each chart".into(),
                ));
            }
            vec![TableEntry { module: FgModule::free(1), degree: 0 }]
        } else if !ha.is_zero() {
            entries_from_cohomology(&ha)
        } else {
            entries_from_cohomology(&hb)
        };
        weights.insert(w, entries);
    }
    Ok(GradedTable {
        component: "triv".to_string(),
        normalized: false,
        family: away_triv.family,
        n_max,
        weights,
    })
}

/// The glued unnormalized table for a family, straight through the charts.
pub fn lsheaf_table(n_max: i64, family: FamilyDirection, ctx: &FieldCtx) -> Result<GradedTable> {
    let u1 = chart_compute(Chart::AwayFromTrivial, n_max, family, ctx)?;
    let uq = chart_compute(Chart::AwayFromCyclotomic, n_max, family, ctx)?;
    glue(&u1, &uq, ctx)
}

/// Normalization: shear the weight-`w` part by `[w·z_hat]` (degree drops by
/// `w·z_hat`) and pull back along the translation `T ↦ q^{−ε·z_hat/2}·T`,
/// renormalizing torsion generators.
pub fn normalize_table(t: &GradedTable, z_hat: i64, ctx: &FieldCtx) -> Result<GradedTable> {
    let c = ctx.q_power(HalfInt(-t.family.epsilon() * z_hat));
    let mut weights = BTreeMap::new();
    for (&w, entries) in &t.weights {
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let mut torsion = Vec::with_capacity(e.module.torsion.len());
            for f in &e.module.torsion {
                torsion.push(f.substitute_t_scaled(&c, ctx)?.normalize_unit(ctx)?);
            }
            torsion.sort_by(|a, b| a.canonical_cmp(b));
            out.push(TableEntry {
                module: FgModule { free_rank: e.module.free_rank, torsion },
                degree: e.degree - w * z_hat,
            });
        }
        weights.insert(w, out);
    }
    Ok(GradedTable {
        component: t.component.clone(),
        normalized: z_hat != 0,
        family: t.family,
        n_max: t.n_max,
        weights,
    })
}

/// Inverse of [`normalize_table`]: shear back and translate `T ↦ q^{ε·z/2}T`.
pub fn denormalize_table(t: &GradedTable, z_hat: i64, ctx: &FieldCtx) -> Result<GradedTable> {
    let c = ctx.q_power(HalfInt(t.family.epsilon() * z_hat));
    let mut weights = BTreeMap::new();
    for (&w, entries) in &t.weights {
        let mut out = Vec::with_capacity(entries.len());
        for e in entries {
            let mut torsion = Vec::with_capacity(e.module.torsion.len());
            for f in &e.module.torsion {
                torsion.push(f.substitute_t_scaled(&c, ctx)?.normalize_unit(ctx)?);
            }
            torsion.sort_by(|a, b| a.canonical_cmp(b));
            out.push(TableEntry {
                module: FgModule { free_rank: e.module.free_rank, torsion },
                degree: e.degree + w * z_hat,
            });
        }
        weights.insert(w, out);
    }
    Ok(GradedTable {
        component: t.component.clone(),
        normalized: false,
        family: t.family,
        n_max: t.n_max,
        weights,
    })
}

/// The normalized table of the standard family (`z_hat = 1`).
pub fn normalized_lsheaf_table(n_max: i64, ctx: &FieldCtx) -> Result<GradedTable> {
    normalize_table(&lsheaf_table(n_max, FamilyDirection::Std, ctx)?, 1, ctx)
}

/// Functional equation at table level: the normalized standard table at
/// weight `n` must equal the normalized dual table at weight `−n`.
pub fn functional_equation_check(n_max: i64, ctx: &FieldCtx) -> Result<CheckReport> {
    let std_norm = normalized_lsheaf_table(n_max, ctx)?;
    let dual_norm = normalize_table(&lsheaf_table(n_max, FamilyDirection::Dual, ctx)?, 1, ctx)?;
    Ok(compare_fe_tables(&std_norm, &dual_norm))
}

/// Compares `std[n]` against `dual[−n]`, entry by entry.
pub fn compare_fe_tables(std_norm: &GradedTable, dual_norm: &GradedTable) -> CheckReport {
    let mut report = CheckReport::new("spectral_functional_equation");
    if std_norm.n_max != dual_norm.n_max {
        report.fail("range", format!("n_max {} vs {}", std_norm.n_max, dual_norm.n_max));
        return report;
    }
    for n in -std_norm.n_max..=std_norm.n_max {
        let lhs = std_norm.entries_at(n);
        let rhs = dual_norm.entries_at(-n);
        report.record(
            n.to_string(),
            lhs == rhs,
            format!(
                "weight {n}: {} vs dual {}",
                lhs.iter().map(TableEntry::to_string).collect::<Vec<_>>().join(","),
                rhs.iter().map(TableEntry::to_string).collect::<Vec<_>>().join(",")
            ),
        );
    }
    report
}

/// Kinds of single-entry corruption used by mutation tests and the CLI's
/// fault-injection mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Replace a torsion root: `T − c` becomes `T − (c+1)`.
    TorsionRoot,
    /// Shift the entry's degree by one.
    Placement,
    /// Move the entry to the opposite weight.
    Weight,
}

/// Corrupts one weight of the table; used to demonstrate that the checks
/// genuinely fail on perturbed inputs.
pub fn inject_fault(t: &GradedTable, weight: i64, fault: Fault, ctx: &FieldCtx) -> Result<GradedTable> {
    let mut out = t.clone();
    let entries = out
        .weights
        .get_mut(&weight)
        .ok_or_else(|| Error::InvariantViolation(format!("no weight {weight} in table")))?;
    match fault {
        Fault::TorsionRoot => {
            for e in entries.iter_mut() {
                if let Some(f) = e.module.torsion.first_mut() {
                    *f = f.add(&LaurentPoly::one()).normalize_unit(ctx)?;
                    return Ok(out);
                }
            }
            // no torsion at this weight: corrupt the free rank instead
            entries.first_mut().map(|e| e.module.free_rank += 1);
        }
        Fault::Placement => {
            if let Some(e) = entries.first_mut() {
                e.degree += 1;
            }
        }
        Fault::Weight => {
            let moved = entries.clone();
            out.weights.insert(weight, Vec::new());
            out.weights.insert(-weight, moved);
        }
    }
    Ok(out)
}

/// Graded piece of the rank-2 story at a parameter point: `Sym^n` of the
/// three-term cohomology complex, through the symmetrizer oracle.
pub fn hecke_graded_piece(phi: &WdRep, n: usize, ctx: &FieldCtx) -> Result<GradedCohomology> {
    if phi.base != Base::Field || phi.dim != 2 {
        return Err(Error::InvariantViolation(
            "graded pieces are computed for 2-dimensional field-base representations".into(),
        ));
    }
    let c = crate::weil_deligne::wd_complex(phi, ctx)?;
    sym_power_oracle(&c, n, ctx)?.cohomology(ctx)
}

/// Which Borel a spectral Eisenstein token is induced from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Borel {
    Standard,
    Opposite,
}

/// Opaque spectral Eisenstein token: the torus datum is a free line on the
/// first factor and a skyscraper at `point` on the second, with a central
/// weight and a shift. No internal structure is modeled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisSpec {
    pub borel: Borel,
    pub point: ExactScalar,
    pub weight: i64,
    pub shift: i64,
}

impl fmt::Display for EisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.borel {
            Borel::Standard => "B",
            Borel::Opposite => "B\u{0304}",
        };
        write!(
            f,
            "EisSpec_{b}(O \u{22a0} point T={}, weight {})[{}]",
            self.point, self.weight, self.shift
        )
    }
}

/// One row of the rank-2 spectral table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeckeSpecRow {
    /// A bare Eisenstein token.
    Eis(EisSpec),
    /// `O_Par → L₀ → Eis(...)`, the weight-0 fiber sequence.
    FiberSeqZero { first: String, eis: EisSpec },
    /// `SymPiece(n) → L_n → Eis(...)`, the positive-weight fiber sequence.
    FiberSeqSym { sym_weight: i64, eis: EisSpec },
}

impl fmt::Display for HeckeSpecRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeSpecRow::Eis(e) => write!(f, "{e}"),
            HeckeSpecRow::FiberSeqZero { first, eis } => {
                write!(f, "FiberSeq({first} \u{2192} L_0 \u{2192} {eis})")
            }
            HeckeSpecRow::FiberSeqSym { sym_weight, eis } => {
                write!(f, "FiberSeq(SymPiece({sym_weight}) \u{2192} L_{sym_weight} \u{2192} {eis})")
            }
        }
    }
}

/// The unnormalized rank-2 spectral table as opaque tokens: negative weights
/// are a single Eisenstein row at the trivial point; weight 0 and positive
/// weights are fiber-sequence descriptors.
pub fn hecke_lsheaf_table(n_max: i64) -> BTreeMap<i64, HeckeSpecRow> {
    let mut rows = BTreeMap::new();
    for n in -n_max..=n_max {
        let eis = EisSpec {
            borel: Borel::Opposite,
            point: ExactScalar::one(),
            weight: n,
            shift: 0,
        };
        let row = match n {
            n if n < 0 => HeckeSpecRow::Eis(eis),
            0 => HeckeSpecRow::FiberSeqZero { first: "O_Par".to_string(), eis },
            _ => HeckeSpecRow::FiberSeqSym { sym_weight: n, eis },
        };
        rows.insert(n, row);
    }
    rows
}

/// The normalized rank-2 spectral table. Negative weights and the weight-0
/// quotient come from shearing and translating the direct description
/// (point moves to `q^{1/2}`, shift `[n]`); positive weights are routed
/// through the functional equation — the dual family's table at `−n` — which
/// lands at the point `q^{−1/2}` with shift `[−n]` on the standard Borel.
pub fn hecke_lsheaf_normalized(n_max: i64, ctx: &FieldCtx) -> BTreeMap<i64, HeckeSpecRow> {
    let q_half = ctx.q_power(HalfInt(1));
    let q_neg_half = ctx.q_power(HalfInt(-1));
    let mut rows = BTreeMap::new();
    for n in -n_max..=n_max {
        let row = if n < 0 {
            HeckeSpecRow::Eis(EisSpec {
                borel: Borel::Opposite,
                point: q_half.clone(),
                weight: n,
                shift: n,
            })
        } else if n == 0 {
            HeckeSpecRow::FiberSeqZero {
                first: "O_Par".to_string(),
                eis: EisSpec {
                    borel: Borel::Opposite,
                    point: q_half.clone(),
                    weight: 0,
                    shift: 0,
                },
            }
        } else {
            HeckeSpecRow::Eis(EisSpec {
                borel: Borel::Standard,
                point: q_neg_half.clone(),
                weight: n,
                shift: -n,
            })
        };
        rows.insert(n, row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(q: u64) -> FieldCtx {
        FieldCtx::new(q).unwrap()
    }

    fn t_minus_scalar(c: &FieldCtx, e: HalfInt) -> LaurentPoly {
        LaurentPoly::t_minus(&c.q_power(e))
    }

    /// The expected unnormalized table: weight 0 free; weight −n torsion
    /// `(T−1)` at degree 0; weight n torsion `(qT−1)` at degree 2n.
    fn expected_unnormalized(c: &FieldCtx, n_max: i64) -> BTreeMap<i64, Vec<TableEntry>> {
        let t1 = LaurentPoly::t_minus(&ExactScalar::one());
        let qt1 = LaurentPoly::binomial(
            1,
            ExactScalar::from_int(c.q() as i64),
            0,
            ExactScalar::from_int(-1),
        )
        .normalize_unit(c)
        .unwrap();
        let mut out = BTreeMap::new();
        out.insert(0, vec![TableEntry { module: FgModule::free(1), degree: 0 }]);
        for n in 1..=n_max {
            out.insert(
                -n,
                vec![TableEntry {
                    module: FgModule { free_rank: 0, torsion: vec![t1.clone()] },
                    degree: 0,
                }],
            );
            out.insert(
                n,
                vec![TableEntry {
                    module: FgModule { free_rank: 0, torsion: vec![qt1.clone()] },
                    degree: 2 * n,
                }],
            );
        }
        out
    }

    /// The expected normalized table: weight ∓n torsion `(T−q^{±1/2})` at
    /// degree `|n|`.
    fn expected_normalized(c: &FieldCtx, n_max: i64) -> BTreeMap<i64, Vec<TableEntry>> {
        let mut out = BTreeMap::new();
        out.insert(0, vec![TableEntry { module: FgModule::free(1), degree: 0 }]);
        for n in 1..=n_max {
            out.insert(
                -n,
                vec![TableEntry {
                    module: FgModule { free_rank: 0, torsion: vec![t_minus_scalar(c, HalfInt(1))] },
                    degree: n,
                }],
            );
            out.insert(
                n,
                vec![TableEntry {
                    module: FgModule { free_rank: 0, torsion: vec![t_minus_scalar(c, HalfInt(-1))] },
                    degree: n,
                }],
            );
        }
        out
    }

    #[test]
    fn universal_complex_shape() {
        let c = ctx(3);
        let u = universal_complex("triv", &c).unwrap();
        assert_eq!(u.rank_at(0), 1);
        assert_eq!(u.rank_at(1), 2);
        assert_eq!(u.rank_at(2), 1);
        let h = u.cohomology(&c).unwrap();
        let t1 = LaurentPoly::t_minus(&ExactScalar::one());
        let qt1 = LaurentPoly::binomial(1, ExactScalar::from_int(3), 0, ExactScalar::from_int(-1));
        assert_eq!(h.at(1), FgModule::cyclic(&t1, &c).unwrap());
        assert_eq!(h.at(2), FgModule::cyclic(&qt1, &c).unwrap());

        assert!(universal_complex("ramified", &c).unwrap().is_empty());
    }

    #[test]
    fn chart_values() {
        let c = ctx(2);
        let u1 = chart_compute(Chart::AwayFromTrivial, 2, FamilyDirection::Std, &c).unwrap();
        // weight 1 on the chart away from T=1: H² ≅ R/(qT−1) at degree 2
        let h = u1.weights[&1].cohomology(&c).unwrap();
        let qt1 = LaurentPoly::binomial(1, ExactScalar::from_int(2), 0, ExactScalar::from_int(-1));
        assert_eq!(h.at(2), FgModule::cyclic(&qt1, &c).unwrap());
        assert!(u1.weights[&-1].is_empty());

        let uq = chart_compute(Chart::AwayFromCyclotomic, 2, FamilyDirection::Std, &c).unwrap();
        // weight −2 on the chart away from T=q⁻¹: H⁰ ≅ R/(T−1) at degree 0
        let h = uq.weights[&-2].cohomology(&c).unwrap();
        let t1 = LaurentPoly::t_minus(&ExactScalar::one());
        assert_eq!(h.at(0), FgModule::cyclic(&t1, &c).unwrap());
        // weight 0 is a free line on both charts
        assert_eq!(u1.weights[&0].cohomology(&c).unwrap().at(0), FgModule::free(1));
        assert_eq!(uq.weights[&0].cohomology(&c).unwrap().at(0), FgModule::free(1));
    }

    #[test]
    fn glued_table_matches_expected_decomposition() {
        for q in [2u64, 3, 4] {
            let c = ctx(q);
            let t = lsheaf_table(5, FamilyDirection::Std, &c).unwrap();
            assert_eq!(t.weights, expected_unnormalized(&c, 5), "q = {q}");
        }
    }

    #[test]
    fn glue_is_chart_order_independent() {
        let c = ctx(3);
        let u1 = chart_compute(Chart::AwayFromTrivial, 3, FamilyDirection::Std, &c).unwrap();
        let uq = chart_compute(Chart::AwayFromCyclotomic, 3, FamilyDirection::Std, &c).unwrap();
        assert_eq!(glue(&u1, &uq, &c).unwrap(), glue(&uq, &u1, &c).unwrap());
    }

    #[test]
    fn normalized_table_matches_expected() {
        for q in [2u64, 3, 4] {
            let c = ctx(q);
            let t = normalized_lsheaf_table(5, &c).unwrap();
            assert_eq!(t.weights, expected_normalized(&c, 5), "q = {q}");
        }
    }

    #[test]
    fn normalization_round_trip() {
        let c = ctx(3);
        let t = lsheaf_table(4, FamilyDirection::Std, &c).unwrap();
        let back = denormalize_table(&normalize_table(&t, 1, &c).unwrap(), 1, &c).unwrap();
        assert_eq!(back.weights, t.weights);
        // shear by 0 is the identity on weights
        let un = normalize_table(&t, 0, &c).unwrap();
        assert_eq!(un.weights, t.weights);
    }

    #[test]
    fn functional_equation_passes() {
        for q in [2u64, 3, 4] {
            let c = ctx(q);
            let r = functional_equation_check(5, &c).unwrap();
            assert!(r.overall(), "q = {q}: {r}");
        }
    }

    #[test]
    fn functional_equation_mutations_fail() {
        let c = ctx(2);
        let std_norm = normalized_lsheaf_table(4, &c).unwrap();
        let dual_norm =
            normalize_table(&lsheaf_table(4, FamilyDirection::Dual, &c).unwrap(), 1, &c).unwrap();
        for fault in [Fault::TorsionRoot, Fault::Placement, Fault::Weight] {
            for w in [-3i64, -1, 2] {
                let bad = inject_fault(&std_norm, w, fault, &c).unwrap();
                let r = compare_fe_tables(&bad, &dual_norm);
                assert!(!r.overall(), "fault {fault:?} at weight {w} went undetected");
                // the report names the offending weight
                assert!(r.failures().any(|(k, _)| k == &w.to_string() || k == &(-w).to_string()));
            }
        }
    }

    #[test]
    fn hecke_graded_piece_of_trivial_parameter() {
        let c = ctx(3);
        let phi = WdRep::new(
            Base::Field,
            2,
            Matrix::identity(2),
            Matrix::zero(2, 2),
            crate::weil_deligne::Inertia::trivial(),
            &c,
        )
        .unwrap();
        let h = hecke_graded_piece(&phi, 2, &c).unwrap();
        assert_eq!(h.dims(), BTreeMap::from([(0, 3), (1, 4), (2, 1)]));
        // n = 1 is the plain cohomology
        let h1 = hecke_graded_piece(&phi, 1, &c).unwrap();
        assert_eq!(h1.dims(), BTreeMap::from([(0, 2), (1, 2)]));
    }

    #[test]
    fn hecke_graded_piece_of_acyclic_parameter() {
        let c = ctx(3);
        let q_inv = c.q_power(HalfInt::from_int(-1));
        let phi_mat = Matrix::scalar_diag(vec![ExactScalar::one(), q_inv]);
        let mut n = Matrix::zero(2, 2);
        n.set(1, 0, LaurentPoly::one());
        let phi = WdRep::new(
            Base::Field,
            2,
            phi_mat,
            n,
            crate::weil_deligne::Inertia::trivial(),
            &c,
        )
        .unwrap();
        for k in 1..=3usize {
            let h = hecke_graded_piece(&phi, k, &c).unwrap();
            assert!(h.is_zero(), "Sym^{k} of an acyclic complex must be acyclic");
        }
    }

    #[test]
    fn hecke_graded_piece_euler_characteristic() {
        let c = ctx(3);
        let phi = WdRep::new(
            Base::Field,
            2,
            Matrix::identity(2),
            Matrix::zero(2, 2),
            crate::weil_deligne::Inertia::trivial(),
            &c,
        )
        .unwrap();
        // χ of the underlying complex is 0, so χ(Sym^n) = 0 for n ≥ 1
        for n in 1..=4usize {
            let h = hecke_graded_piece(&phi, n, &c).unwrap();
            assert_eq!(h.euler_characteristic(), 0, "n = {n}");
        }
    }

    #[test]
    fn hecke_tokens() {
        let c = ctx(2);
        let un = hecke_lsheaf_table(3);
        assert!(matches!(un[&-2], HeckeSpecRow::Eis(_)));
        assert!(matches!(&un[&0], HeckeSpecRow::FiberSeqZero { first, .. } if first == "O_Par"));
        assert!(matches!(un[&3], HeckeSpecRow::FiberSeqSym { sym_weight: 3, .. }));

        let norm = hecke_lsheaf_normalized(3, &c);
        let q_half = c.q_power(HalfInt(1));
        let q_neg_half = c.q_power(HalfInt(-1));
        match &norm[&-2] {
            HeckeSpecRow::Eis(e) => {
                assert_eq!(e.borel, Borel::Opposite);
                assert_eq!(e.point, q_half);
                assert_eq!(e.shift, -2);
            }
            other => panic!("unexpected row {other:?}"),
        }
        match &norm[&3] {
            HeckeSpecRow::Eis(e) => {
                assert_eq!(e.borel, Borel::Standard);
                assert_eq!(e.point, q_neg_half);
                assert_eq!(e.shift, -3);
            }
            other => panic!("unexpected row {other:?}"),
        }
    }

    #[test]
    fn table_json_uses_string_weight_keys() {
        let c = ctx(3);
        let t = lsheaf_table(1, FamilyDirection::Std, &c).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert!(v["weights"].get("-1").is_some());
        assert_eq!(v["component"], "triv");
        assert_eq!(v["normalized"], false);
    }
}

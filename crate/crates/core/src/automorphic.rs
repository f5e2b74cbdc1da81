//! The automorphic side: component-indexed tables of smooth characters and
//! compactly-induced tokens on the degree components of the torus.
//!
//! Everything here is symbolic. A character is a half-integer power of the
//! norm (ramified finite parts are out of scope); the function spaces
//! `C_c^∞(F)` and `C_c^∞(F^×)` are opaque tokens that absorb character
//! twists, which is all the table-level comparisons ever use.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::report::CheckReport;
use crate::scalar::HalfInt;

/// An unramified smooth character `norm^e`, `e ∈ (1/2)·Z`; its value on a
/// uniformizer is `q^{−e}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothCharacter {
    pub norm_exponent: HalfInt,
}

impl SmoothCharacter {
    pub fn trivial() -> Self {
        SmoothCharacter { norm_exponent: HalfInt(0) }
    }

    pub fn norm(e: HalfInt) -> Self {
        SmoothCharacter { norm_exponent: e }
    }

    pub fn inverse(self) -> Self {
        SmoothCharacter { norm_exponent: -self.norm_exponent }
    }

    pub fn twist(self, e: HalfInt) -> Self {
        SmoothCharacter { norm_exponent: self.norm_exponent + e }
    }
}

impl fmt::Display for SmoothCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.norm_exponent == HalfInt(0) {
            write!(f, "triv")
        } else {
            write!(f, "norm^{}", self.norm_exponent)
        }
    }
}

/// Which compactly-supported function space a token stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CcSpace {
    /// `C_c^∞(F)` — functions on the whole line.
    Line,
    /// `C_c^∞(F^×)` — functions on the units.
    Units,
}

impl fmt::Display for CcSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CcSpace::Line => write!(f, "Cc(F)"),
            CcSpace::Units => write!(f, "Cc(F\u{d7})"),
        }
    }
}

/// One component's descriptor in a rank-1 period table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoEntry {
    Character(SmoothCharacter),
    /// `Cc(space) ⊗ norm^{twist}`.
    Cc { space: CcSpace, twist: HalfInt },
}

impl AutoEntry {
    /// Pullback along inversion: characters invert; twists on tokens invert.
    pub fn inverse(&self) -> AutoEntry {
        match self {
            AutoEntry::Character(chi) => AutoEntry::Character(chi.inverse()),
            AutoEntry::Cc { space, twist } => AutoEntry::Cc { space: *space, twist: -*twist },
        }
    }

    pub fn twist(&self, e: HalfInt) -> AutoEntry {
        match self {
            AutoEntry::Character(chi) => AutoEntry::Character(chi.twist(e)),
            AutoEntry::Cc { space, twist } => AutoEntry::Cc { space: *space, twist: *twist + e },
        }
    }
}

impl fmt::Display for AutoEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AutoEntry::Character(chi) => write!(f, "{chi}"),
            AutoEntry::Cc { space, twist } if twist.halves() == 0 => write!(f, "{space}"),
            AutoEntry::Cc { space, twist } => write!(f, "{space} \u{2297} norm^{twist}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodEntry {
    pub descriptor: AutoEntry,
    pub degree: i64,
}

impl fmt::Display for PeriodEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} @ {}", self.descriptor, self.degree)
    }
}

/// Component-indexed table on the degree decomposition of the torus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodTable {
    pub normalized: bool,
    pub n_max: i64,
    pub components: BTreeMap<i64, PeriodEntry>,
}

impl PeriodTable {
    pub fn entry_at(&self, n: i64) -> Option<&PeriodEntry> {
        self.components.get(&n)
    }

    pub fn markdown(&self) -> String {
        let mut out = String::new();
        out.push_str("| component | entry |\n|---|---|\n");
        for (n, e) in &self.components {
            out.push_str(&format!("| {n} | {e} |\n"));
        }
        out
    }
}

impl Serialize for PeriodTable {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            normalized: bool,
            n_max: i64,
            components: Components<'a>,
        }
        struct Components<'a>(&'a BTreeMap<i64, PeriodEntry>);
        impl Serialize for Components<'_> {
            fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = ser.serialize_map(Some(self.0.len()))?;
                for (k, v) in self.0 {
                    map.serialize_entry(&k.to_string(), v)?;
                }
                map.end()
            }
        }
        Repr { normalized: self.normalized, n_max: self.n_max, components: Components(&self.components) }
            .serialize(ser)
    }
}

/// The unnormalized rank-1 period table: trivial character on negative
/// components, `C_c^∞(F)` on the degree-0 component, `norm` at degree `2n`
/// on positive components.
pub fn iwasawa_period_table(n_max: i64) -> PeriodTable {
    assert!(n_max >= 1);
    let mut components = BTreeMap::new();
    for n in -n_max..=n_max {
        let entry = if n < 0 {
            PeriodEntry {
                descriptor: AutoEntry::Character(SmoothCharacter::trivial()),
                degree: 0,
            }
        } else if n == 0 {
            PeriodEntry {
                descriptor: AutoEntry::Cc { space: CcSpace::Line, twist: HalfInt(0) },
                degree: 0,
            }
        } else {
            PeriodEntry {
                descriptor: AutoEntry::Character(SmoothCharacter::norm(HalfInt::from_int(1))),
                degree: 2 * n,
            }
        };
        components.insert(n, entry);
    }
    PeriodTable { normalized: false, n_max, components }
}

/// The degree twist: tensor component `n` by `norm^{−eta/2}` and shift by
/// `[n·eta]` (degree drops by `n·eta`). `eta = 0` is the identity
/// (unimodular case).
pub fn degree_twist(t: &PeriodTable, eta: i64) -> PeriodTable {
    let half = HalfInt(-eta);
    let mut components = BTreeMap::new();
    for (&n, e) in &t.components {
        components.insert(
            n,
            PeriodEntry { descriptor: e.descriptor.twist(half), degree: e.degree - n * eta },
        );
    }
    PeriodTable { normalized: t.normalized || eta != 0, n_max: t.n_max, components }
}

/// The normalized rank-1 period table (`eta = 1`).
pub fn normalized_period_table(n_max: i64) -> PeriodTable {
    degree_twist(&iwasawa_period_table(n_max), 1)
}

/// Comparison rule for `C_c` tokens: the Line token rewrites to the Units
/// token component by component, and either token absorbs integral norm
/// twists (Fourier transform shifts the twist by one). Character entries
/// must agree on the nose.
pub fn auto_entries_match(a: &AutoEntry, b: &AutoEntry) -> bool {
    match (a, b) {
        (AutoEntry::Character(x), AutoEntry::Character(y)) => x == y,
        (AutoEntry::Cc { twist: ta, .. }, AutoEntry::Cc { twist: tb, .. }) => {
            (ta.halves() - tb.halves()) % 2 == 0
        }
        _ => false,
    }
}

/// The functional equation on the automorphic side: the normalized table of
/// the dual action is the componentwise inverse of the standard one at the
/// mirrored component; component 0 is matched through the Fourier rule.
pub fn period_fe_check(n_max: i64) -> CheckReport {
    let std_norm = normalized_period_table(n_max);
    let mut report = CheckReport::new("automorphic_functional_equation");
    for n in -n_max..=n_max {
        let Some(entry) = std_norm.entry_at(n) else {
            report.fail(n.to_string(), "missing component".to_string());
            continue;
        };
        // dual table at component n: inverse of the standard entry at −n,
        // same degree
        let mirrored = std_norm.entry_at(-n).expect("component in range");
        let dual_entry =
            PeriodEntry { descriptor: mirrored.descriptor.inverse(), degree: mirrored.degree };
        let ok = auto_entries_match(&entry.descriptor, &dual_entry.descriptor)
            && entry.degree == dual_entry.degree;
        report.record(
            n.to_string(),
            ok,
            format!("component {n}: {} vs dual {}", entry, dual_entry),
        );
    }
    report
}

/// One row of the rank-2 automorphic table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeckeAutoRow {
    /// Geometric Eisenstein token with torus datum `Cc(F^×) ⊠ character`.
    Eis { borel: BorelAuto, torus_char: SmoothCharacter, shift: i64 },
    /// `W_ψ ↪ P₀ → Eis(...)`, the degree-0 short exact sequence.
    FiberSeqZero { whittaker: String, eis_borel: BorelAuto, eis_char: SmoothCharacter },
    /// Unnormalized rows: `cInd` of a character with a placement.
    CInd { character: SmoothCharacter, degree: i64 },
    /// Unnormalized degree-0 row: functions on the rank-2 quotient.
    CcQuotient,
}

/// Which Borel a geometric Eisenstein token is induced from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BorelAuto {
    Standard,
    Opposite,
}

impl fmt::Display for HeckeAutoRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeckeAutoRow::Eis { borel, torus_char, shift } => {
                let b = match borel {
                    BorelAuto::Standard => "B",
                    BorelAuto::Opposite => "B\u{0304}",
                };
                write!(f, "Eis_{b}!(Cc(F\u{d7}) \u{22a0} {torus_char})[{shift}]")
            }
            HeckeAutoRow::FiberSeqZero { whittaker, eis_borel, eis_char } => {
                let b = match eis_borel {
                    BorelAuto::Standard => "B",
                    BorelAuto::Opposite => "B\u{0304}",
                };
                write!(f, "FiberSeq({whittaker} \u{21aa} P_0 \u{2192} Eis_{b}!(Cc(F\u{d7}) \u{22a0} {eis_char}))")
            }
            HeckeAutoRow::CInd { character, degree } => {
                write!(f, "cInd({character}) @ {degree}")
            }
            HeckeAutoRow::CcQuotient => write!(f, "Cc(G/A)"),
        }
    }
}

/// The normalized rank-2 period table: negative components are standard
/// Eisenstein tokens with `norm^{−1/2}` at shift `[n]`; positive components
/// use the opposite Borel with `norm^{1/2}` at shift `[−n]`; the degree-0
/// component is the Whittaker short exact sequence.
pub fn hecke_period_table(n_max: i64) -> BTreeMap<i64, HeckeAutoRow> {
    let mut rows = BTreeMap::new();
    for n in -n_max..=n_max {
        let row = if n < 0 {
            HeckeAutoRow::Eis {
                borel: BorelAuto::Standard,
                torus_char: SmoothCharacter::norm(HalfInt(-1)),
                shift: n,
            }
        } else if n == 0 {
            HeckeAutoRow::FiberSeqZero {
                whittaker: "W_psi".to_string(),
                eis_borel: BorelAuto::Standard,
                eis_char: SmoothCharacter::norm(HalfInt(-1)),
            }
        } else {
            HeckeAutoRow::Eis {
                borel: BorelAuto::Opposite,
                torus_char: SmoothCharacter::norm(HalfInt(1)),
                shift: -n,
            }
        };
        rows.insert(n, row);
    }
    rows
}

/// The unnormalized rank-2 rows: `cInd` of `norm^{∓1}` placed at degree
/// `∓2n`, and functions on the quotient at the degree-0 component.
pub fn hecke_period_unnormalized(n_max: i64) -> BTreeMap<i64, HeckeAutoRow> {
    let mut rows = BTreeMap::new();
    for n in -n_max..=n_max {
        let row = match n {
            n if n < 0 => HeckeAutoRow::CInd {
                character: SmoothCharacter::norm(HalfInt::from_int(-1)),
                degree: -2 * n,
            },
            0 => HeckeAutoRow::CcQuotient,
            _ => HeckeAutoRow::CInd {
                character: SmoothCharacter::norm(HalfInt::from_int(1)),
                degree: 2 * n,
            },
        };
        rows.insert(n, row);
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unnormalized_table_values() {
        let t = iwasawa_period_table(3);
        assert_eq!(
            t.entry_at(-3).unwrap(),
            &PeriodEntry {
                descriptor: AutoEntry::Character(SmoothCharacter::trivial()),
                degree: 0
            }
        );
        assert_eq!(
            t.entry_at(0).unwrap(),
            &PeriodEntry {
                descriptor: AutoEntry::Cc { space: CcSpace::Line, twist: HalfInt(0) },
                degree: 0
            }
        );
        assert_eq!(
            t.entry_at(2).unwrap(),
            &PeriodEntry {
                descriptor: AutoEntry::Character(SmoothCharacter::norm(HalfInt::from_int(1))),
                degree: 4
            }
        );
    }

    #[test]
    fn degree_twist_values() {
        let t = normalized_period_table(3);
        // component −2: norm^{−1/2} placed at degree 2 (placement [−2])
        assert_eq!(
            t.entry_at(-2).unwrap(),
            &PeriodEntry {
                descriptor: AutoEntry::Character(SmoothCharacter::norm(HalfInt(-1))),
                degree: 2
            }
        );
        // component 1: norm^{1/2} at degree 1 (placement [−1])
        assert_eq!(
            t.entry_at(1).unwrap(),
            &PeriodEntry {
                descriptor: AutoEntry::Character(SmoothCharacter::norm(HalfInt(1))),
                degree: 1
            }
        );
        // component 0: Cc(F) ⊗ norm^{−1/2} at degree 0
        assert_eq!(
            t.entry_at(0).unwrap(),
            &PeriodEntry {
                descriptor: AutoEntry::Cc { space: CcSpace::Line, twist: HalfInt(-1) },
                degree: 0
            }
        );
    }

    #[test]
    fn eta_zero_is_identity() {
        let t = iwasawa_period_table(4);
        assert_eq!(degree_twist(&t, 0).components, t.components);
    }

    #[test]
    fn twist_untwist_round_trip() {
        let t = iwasawa_period_table(4);
        let back = degree_twist(&degree_twist(&t, 1), -1);
        assert_eq!(back.components, t.components);
    }

    #[test]
    fn automorphic_fe_passes() {
        for n_max in [1, 3, 5] {
            let r = period_fe_check(n_max);
            assert!(r.overall(), "{r}");
        }
    }

    #[test]
    fn normalized_components_are_inversion_symmetric() {
        let t = normalized_period_table(5);
        for n in 1..=5i64 {
            let plus = t.entry_at(n).unwrap();
            let minus = t.entry_at(-n).unwrap();
            assert_eq!(plus.descriptor, minus.descriptor.inverse());
            assert_eq!(plus.degree, minus.degree);
        }
    }

    #[test]
    fn hecke_rows() {
        let rows = hecke_period_table(2);
        assert_eq!(
            rows[&-1],
            HeckeAutoRow::Eis {
                borel: BorelAuto::Standard,
                torus_char: SmoothCharacter::norm(HalfInt(-1)),
                shift: -1
            }
        );
        assert!(matches!(&rows[&0], HeckeAutoRow::FiberSeqZero { whittaker, .. } if whittaker == "W_psi"));
        assert_eq!(
            rows[&2],
            HeckeAutoRow::Eis {
                borel: BorelAuto::Opposite,
                torus_char: SmoothCharacter::norm(HalfInt(1)),
                shift: -2
            }
        );
    }

    #[test]
    fn unnormalized_hecke_rows_mirror() {
        let rows = hecke_period_unnormalized(3);
        assert_eq!(
            rows[&2],
            HeckeAutoRow::CInd { character: SmoothCharacter::norm(HalfInt::from_int(1)), degree: 4 }
        );
        // entry(n) = (inverse character of entry(−n), mirrored placement)
        for n in 1..=3i64 {
            match (&rows[&n], &rows[&-n]) {
                (
                    HeckeAutoRow::CInd { character: cp, degree: dp },
                    HeckeAutoRow::CInd { character: cm, degree: dm },
                ) => {
                    assert_eq!(*cp, cm.inverse());
                    assert_eq!(*dp, *dm);
                }
                other => panic!("unexpected rows {other:?}"),
            }
        }
    }

    #[test]
    fn cc_token_matching_rules() {
        let line = AutoEntry::Cc { space: CcSpace::Line, twist: HalfInt(-1) };
        let units = AutoEntry::Cc { space: CcSpace::Units, twist: HalfInt(1) };
        // twist difference is integral: Fourier absorbs it
        assert!(auto_entries_match(&line, &units));
        let units_half_off = AutoEntry::Cc { space: CcSpace::Units, twist: HalfInt(0) };
        assert!(!auto_entries_match(&line, &units_half_off));
        let chi = AutoEntry::Character(SmoothCharacter::trivial());
        assert!(!auto_entries_match(&line, &chi));
    }

    #[test]
    fn period_table_json_round_trip_components() {
        let t = normalized_period_table(2);
        let v = serde_json::to_value(&t).unwrap();
        assert!(v["components"].get("-2").is_some());
        assert_eq!(v["normalized"], true);
    }
}

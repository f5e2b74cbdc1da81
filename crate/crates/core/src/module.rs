//! Finitely generated modules over `K[T^±]` in normal form.
//!
//! `K[T^±]` is a PID, so every finitely generated module is a free part plus
//! cyclic torsion factors. The torsion generators are kept in canonical unit
//! normal form and sorted, so module equality is structural equality.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::laurent::LaurentPoly;
use crate::matrix::{smith_normal_form, Matrix};
use crate::scalar::FieldCtx;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FgModule {
    #[serde(rename = "free")]
    pub free_rank: usize,
    pub torsion: Vec<LaurentPoly>,
}

impl FgModule {
    pub fn zero() -> Self {
        FgModule { free_rank: 0, torsion: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgModule { free_rank: rank, torsion: Vec::new() }
    }

    /// A single cyclic torsion factor `R/(f)`, normalizing the generator.
    pub fn cyclic(f: &LaurentPoly, ctx: &FieldCtx) -> Result<Self> {
        let n = f.normalize_unit(ctx)?;
        if n.is_one() {
            return Ok(FgModule::zero());
        }
        Ok(FgModule { free_rank: 0, torsion: vec![n] })
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Dimension when the module is a `K`-vector space (no torsion can occur
    /// over the field base, where all nonzero "polynomials" are units).
    pub fn dim(&self) -> usize {
        debug_assert!(self.torsion.is_empty(), "dim() on a module with torsion");
        self.free_rank
    }

    /// Direct sum, re-sorting torsion into the canonical order.
    pub fn direct_sum(&self, other: &FgModule) -> FgModule {
        let mut torsion = self.torsion.clone();
        torsion.extend(other.torsion.iter().cloned());
        torsion.sort_by(|a, b| a.canonical_cmp(b));
        FgModule { free_rank: self.free_rank + other.free_rank, torsion }
    }

    /// Localization at the multiplicative set generated by `inverted`:
    /// torsion factors supported inside the inverted locus die.
    pub fn localize(&self, inverted: &[LaurentPoly], ctx: &FieldCtx) -> Result<FgModule> {
        let mut torsion = Vec::new();
        for f in &self.torsion {
            let mut g = f.clone();
            loop {
                let mut divided = false;
                for p in inverted {
                    while !g.is_unit() && g.divides(p, ctx) {
                        g = g.div_rem(p, ctx)?.0;
                        divided = true;
                    }
                }
                if !divided {
                    break;
                }
            }
            if !g.is_unit() {
                torsion.push(g.normalize_unit(ctx)?);
            }
        }
        torsion.sort_by(|a, b| a.canonical_cmp(b));
        Ok(FgModule { free_rank: self.free_rank, torsion })
    }
}

impl fmt::Display for FgModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("R".to_string()),
            r => parts.push(format!("R^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("R/({t})"));
        }
        write!(f, "{}", parts.join(" \u{2295} "))
    }
}

/// Cokernel of `rels: R^k → R^gens` in normal form. `rels` must have `gens`
/// rows; its columns are the relations.
pub fn module_from_presentation(gens: usize, rels: &Matrix, ctx: &FieldCtx) -> Result<FgModule> {
    assert_eq!(rels.rows(), gens, "relation matrix must have `gens` rows");
    let snf = smith_normal_form(rels, ctx)?;
    let mut torsion: Vec<LaurentPoly> = snf
        .diagonal()
        .into_iter()
        .filter(|d| !d.is_unit())
        .collect();
    torsion.sort_by(|a, b| a.canonical_cmp(b));
    Ok(FgModule { free_rank: gens - snf.rank(), torsion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ExactScalar;

    fn ctx() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    fn t_minus(c: i64) -> LaurentPoly {
        LaurentPoly::t_minus(&ExactScalar::from_int(c))
    }

    #[test]
    fn free_module_from_no_relations() {
        let c = ctx();
        let m = module_from_presentation(1, &Matrix::zero(1, 0), &c).unwrap();
        assert_eq!(m, FgModule::free(1));
    }

    #[test]
    fn single_torsion_factor() {
        let c = ctx();
        let rels = Matrix::from_rows(vec![vec![t_minus(1)]]).unwrap();
        let m = module_from_presentation(1, &rels, &c).unwrap();
        assert_eq!(m, FgModule { free_rank: 0, torsion: vec![t_minus(1)] });
    }

    #[test]
    fn column_relation_mixes_generators() {
        let c = ctx();
        // one relation (T−1)·e1 + (T−1)·e2 = 0 on two generators
        let rels = Matrix::from_rows(vec![vec![t_minus(1)], vec![t_minus(1)]]).unwrap();
        let m = module_from_presentation(2, &rels, &c).unwrap();
        assert_eq!(m, FgModule { free_rank: 1, torsion: vec![t_minus(1)] });
    }

    #[test]
    fn localization_kills_supported_torsion() {
        let c = ctx();
        let m = FgModule { free_rank: 2, torsion: vec![t_minus(1), t_minus(2)] };
        let loc = m.localize(&[t_minus(1)], &c).unwrap();
        assert_eq!(loc, FgModule { free_rank: 2, torsion: vec![t_minus(2)] });
    }

    #[test]
    fn module_json_shape() {
        let m = FgModule { free_rank: 1, torsion: vec![t_minus(1)] };
        let json = serde_json::to_value(&m).unwrap();
        assert!(json.get("free").is_some());
        assert!(json.get("torsion").is_some());
        let back: FgModule = serde_json::from_value(json).unwrap();
        assert_eq!(back, m);
    }
}

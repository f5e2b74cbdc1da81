//! Weil–Deligne representations and their group cohomology.
//!
//! A representation is a triple `(Φ, N, inertia)` on a free module over `K`
//! or `K[T^±]`, with `Φ·N·Φ⁻¹ = q⁻¹·N`, a nilpotent `N`, and inertia acting
//! through a finite cyclic quotient normalized by `Φ`. Cohomology is the
//! three-term complex
//!
//! ```text
//!   [ M^I --(Fr−1, N)--> M^I ⊕ M^I --(N, 1−q·Fr)--> M^I ]
//! ```
//!
//! concentrated in degrees 0..2, built on the inertia invariants.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Base, Complex, GradedCohomology};
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::matrix::{kernel, Matrix};
use crate::module::FgModule;
use crate::scalar::{ExactScalar, FieldCtx, HalfInt};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Inertia {
    Trivial(String), // the literal "trivial"
    Finite { order: u32, generator: Matrix },
}

impl Inertia {
    pub fn trivial() -> Self {
        Inertia::Trivial("trivial".to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WdRep {
    pub base: Base,
    pub dim: usize,
    pub frobenius: Matrix,
    pub nilpotent: Matrix,
    pub inertia: Inertia,
}

impl WdRep {
    /// Validates every structural invariant; each failure names the relation
    /// it violates.
    pub fn new(
        base: Base,
        dim: usize,
        frobenius: Matrix,
        nilpotent: Matrix,
        inertia: Inertia,
        ctx: &FieldCtx,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvariantViolation("dim must be positive".into()));
        }
        if let Inertia::Trivial(tag) = &inertia {
            if tag != "trivial" {
                return Err(Error::InvariantViolation(format!(
                    "inertia must be \"trivial\" or a finite generator, got {tag:?}"
                )));
            }
        }
        for (name, m) in [("frobenius", &frobenius), ("nilpotent", &nilpotent)] {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::InvariantViolation(format!(
                    "{name} must be {dim}x{dim}, got {}x{}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        let det = frobenius.determinant(ctx)?;
        let invertible = match base {
            Base::Field => !det.is_zero(),
            Base::Ring => det.is_unit(),
        };
        if !invertible {
            return Err(Error::InvariantViolation("frobenius is not invertible".into()));
        }
        // N nilpotent: N^dim = 0
        let mut p = Matrix::identity(dim);
        for _ in 0..dim {
            p = p.mul(&nilpotent, ctx)?;
        }
        if !p.is_zero() {
            return Err(Error::InvariantViolation("nilpotent: N^dim != 0".into()));
        }
        // Φ·N·Φ⁻¹ = q⁻¹·N, checked as q·Φ·N = N·Φ
        let q = LaurentPoly::constant(ExactScalar::from_int(ctx.q() as i64));
        let lhs = frobenius.mul(&nilpotent, ctx)?.scale(&q, ctx);
        let rhs = nilpotent.mul(&frobenius, ctx)?;
        if lhs != rhs {
            return Err(Error::InvariantViolation(
                "frobenius-nilpotent relation Ad(Fr)N = q^{-1}N fails".into(),
            ));
        }
        if let Inertia::Finite { order, generator } = &inertia {
            if *order == 0 {
                return Err(Error::InvariantViolation("inertia order must be positive".into()));
            }
            if generator.rows() != dim || generator.cols() != dim {
                return Err(Error::InvariantViolation("inertia generator has wrong shape".into()));
            }
            let mut pow = Matrix::identity(dim);
            for _ in 0..*order {
                pow = pow.mul(generator, ctx)?;
            }
            if pow != Matrix::identity(dim) {
                return Err(Error::InvariantViolation("inertia generator order fails".into()));
            }
            let gn = generator.mul(&nilpotent, ctx)?;
            let ng = nilpotent.mul(generator, ctx)?;
            if gn != ng {
                return Err(Error::InvariantViolation("inertia must commute with N".into()));
            }
            // Fr normalizes inertia: Φ·γ·Φ⁻¹ is some power of γ,
            // checked as Φ·γ = γ^j·Φ for some j
            let fg = frobenius.mul(generator, ctx)?;
            let mut found = false;
            let mut gj = Matrix::identity(dim);
            for _ in 0..*order {
                if gj.mul(&frobenius, ctx)? == fg {
                    found = true;
                    break;
                }
                gj = gj.mul(generator, ctx)?;
            }
            if !found {
                return Err(Error::InvariantViolation(
                    "frobenius does not normalize the inertia image".into(),
                ));
            }
        }
        Ok(WdRep { base, dim, frobenius, nilpotent, inertia })
    }

    pub fn unramified_character(base: Base, phi: LaurentPoly, ctx: &FieldCtx) -> Result<Self> {
        WdRep::new(
            base,
            1,
            Matrix::from_rows(vec![vec![phi]])?,
            Matrix::zero(1, 1),
            Inertia::trivial(),
            ctx,
        )
    }

    /// Re-validates a deserialized representation.
    pub fn validate(&self, ctx: &FieldCtx) -> Result<()> {
        WdRep::new(
            self.base,
            self.dim,
            self.frobenius.clone(),
            self.nilpotent.clone(),
            self.inertia.clone(),
            ctx,
        )
        .map(|_| ())
    }
}

/// Inertia invariants with Frobenius and `N` restricted to them.
#[derive(Debug, Clone)]
pub struct InertiaInvariants {
    /// Columns span `ker(γ − 1)` (the whole space for trivial inertia).
    pub basis: Matrix,
    pub frobenius: Matrix,
    pub nilpotent: Matrix,
}

pub fn inertia_invariants(rep: &WdRep, ctx: &FieldCtx) -> Result<InertiaInvariants> {
    match &rep.inertia {
        Inertia::Trivial(_) => Ok(InertiaInvariants {
            basis: Matrix::identity(rep.dim),
            frobenius: rep.frobenius.clone(),
            nilpotent: rep.nilpotent.clone(),
        }),
        Inertia::Finite { generator, .. } => {
            let g_minus_1 = generator.add(&Matrix::identity(rep.dim).neg())?;
            let ker = kernel(&g_minus_1, ctx)?;
            // Φ and N preserve the fixed space because they commute with γ
            // up to powers; rewrite their action in the kernel basis.
            let phi = ker.express(&rep.frobenius.mul(&ker.basis, ctx)?, ctx)?;
            let n = ker.express(&rep.nilpotent.mul(&ker.basis, ctx)?, ctx)?;
            Ok(InertiaInvariants { basis: ker.basis.clone(), frobenius: phi, nilpotent: n })
        }
    }
}

/// The three-term cohomology complex in degrees 0..2.
pub fn wd_complex(rep: &WdRep, ctx: &FieldCtx) -> Result<Complex> {
    let inv = inertia_invariants(rep, ctx)?;
    let k = inv.frobenius.rows();
    if k == 0 {
        return Ok(Complex::empty(rep.base));
    }
    let id = Matrix::identity(k);
    let q = LaurentPoly::constant(ExactScalar::from_int(ctx.q() as i64));
    // d0 = (Fr − 1, N)ᵗ, d1 = (N, 1 − q·Fr); d1∘d0 = 0 encodes the relation
    let d0 = inv.frobenius.add(&id.neg())?.vstack(&inv.nilpotent)?;
    let d1 = inv.nilpotent.hstack(&id.add(&inv.frobenius.scale(&q, ctx).neg())?)?;
    Complex::new(
        rep.base,
        BTreeMap::from([(0, k), (1, 2 * k), (2, k)]),
        BTreeMap::from([(0, d0), (1, d1)]),
        ctx,
    )
    .map_err(|e| match e {
        Error::NotAComplex(_) => {
            Error::InvariantViolation("frobenius-nilpotent relation Ad(Fr)N = q^{-1}N fails".into())
        }
        other => other,
    })
}

/// Cohomology in degrees 0, 1, 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HVector(pub [FgModule; 3]);

impl HVector {
    pub fn dims(&self) -> [usize; 3] {
        [self.0[0].dim(), self.0[1].dim(), self.0[2].dim()]
    }

    pub fn free_ranks(&self) -> [usize; 3] {
        [self.0[0].free_rank, self.0[1].free_rank, self.0[2].free_rank]
    }
}

impl fmt::Display for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

pub fn wd_cohomology(rep: &WdRep, ctx: &FieldCtx) -> Result<HVector> {
    let h = wd_complex(rep, ctx)?.cohomology(ctx)?;
    for d in h.degrees() {
        debug_assert!((0..=2).contains(&d), "cohomology outside degrees 0..2");
    }
    Ok(HVector([h.at(0), h.at(1), h.at(2)]))
}

pub fn wd_graded_cohomology(rep: &WdRep, ctx: &FieldCtx) -> Result<GradedCohomology> {
    wd_complex(rep, ctx)?.cohomology(ctx)
}

/// The Tate dual `M^∨(1)`: `Φ ↦ q⁻¹(Φ⁻¹)ᵗ`, `N ↦ −Nᵗ`, `γ ↦ (γ⁻¹)ᵗ`.
pub fn tate_dual_rep(rep: &WdRep, ctx: &FieldCtx) -> Result<WdRep> {
    let q_inv = LaurentPoly::constant(ctx.q_power(HalfInt::from_int(-1)));
    let phi = rep.frobenius.inverse(ctx)?.transpose().scale(&q_inv, ctx);
    let n = rep.nilpotent.transpose().neg();
    let inertia = match &rep.inertia {
        Inertia::Trivial(_) => Inertia::trivial(),
        Inertia::Finite { order, generator } => {
            let mut inv = Matrix::identity(rep.dim);
            for _ in 0..(order - 1) {
                inv = inv.mul(generator, ctx)?;
            }
            Inertia::Finite { order: *order, generator: inv.transpose() }
        }
    };
    WdRep::new(rep.base, rep.dim, phi, n, inertia, ctx)
}

/// `h⁰ − h¹ + h²` on free ranks; zero for every field-base representation.
pub fn euler_char(rep: &WdRep, ctx: &FieldCtx) -> Result<i64> {
    let h = wd_cohomology(rep, ctx)?;
    let [h0, h1, h2] = h.free_ranks();
    Ok(h0 as i64 - h1 as i64 + h2 as i64)
}

/// A random field-base representation with trivial inertia: a direct sum of
/// "strings" `α, q⁻¹α, …` with level-raising nilpotent entries, so the
/// Frobenius relation holds by construction.
pub fn random_wdrep<R: Rng>(rng: &mut R, ctx: &FieldCtx, max_dim: usize) -> WdRep {
    let dim = rng.random_range(1..=max_dim.max(1));
    let heads: Vec<ExactScalar> = vec![
        ExactScalar::one(),
        ExactScalar::from_int(2),
        ExactScalar::from_int(-1),
        ExactScalar::from_ratio(1, 2),
        ExactScalar::from_ratio(3, 2),
        ctx.q_power(HalfInt::from_int(1)),
        ctx.q_power(HalfInt::from_int(-1)),
    ];
    let q_inv = ctx.q_power(HalfInt::from_int(-1));
    let mut diag = Vec::with_capacity(dim);
    let mut string_of = Vec::with_capacity(dim);
    let mut level_of = Vec::with_capacity(dim);
    let mut string_id = 0usize;
    while diag.len() < dim {
        let len = rng.random_range(1..=(dim - diag.len()));
        let head = heads[rng.random_range(0..heads.len())].clone();
        let mut val = head;
        for level in 0..len {
            diag.push(val.clone());
            string_of.push(string_id);
            level_of.push(level);
            val = ctx.mul(&val, &q_inv);
        }
        string_id += 1;
    }
    let phi = Matrix::scalar_diag(diag);
    let mut n = Matrix::zero(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            // N: level k → level k+1 within a string keeps Ad(Fr)N = q⁻¹N
            if string_of[i] == string_of[j] && level_of[i] == level_of[j] + 1 && rng.random_bool(0.7)
            {
                n.set(i, j, LaurentPoly::constant(ExactScalar::from_int(rng.random_range(1..=3))));
            }
        }
    }
    WdRep::new(Base::Field, dim, phi, n, Inertia::trivial(), ctx)
        .expect("construction satisfies the invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn ctx() -> FieldCtx {
        FieldCtx::new(3).unwrap()
    }

    fn scalar_mat(entries: Vec<Vec<i64>>) -> Matrix {
        Matrix::from_scalar_rows(
            entries
                .into_iter()
                .map(|r| r.into_iter().map(ExactScalar::from_int).collect())
                .collect(),
        )
        .unwrap()
    }

    fn trivial_char(c: &FieldCtx) -> WdRep {
        WdRep::unramified_character(Base::Field, LaurentPoly::one(), c).unwrap()
    }

    fn cyclotomic_char(c: &FieldCtx) -> WdRep {
        let q_inv = LaurentPoly::constant(c.q_power(HalfInt::from_int(-1)));
        WdRep::unramified_character(Base::Field, q_inv, c).unwrap()
    }

    fn steinberg(c: &FieldCtx) -> WdRep {
        let q_inv = c.q_power(HalfInt::from_int(-1));
        let phi = Matrix::scalar_diag(vec![ExactScalar::one(), q_inv]);
        let mut n = Matrix::zero(2, 2);
        n.set(1, 0, LaurentPoly::one());
        WdRep::new(Base::Field, 2, phi, n, Inertia::trivial(), c).unwrap()
    }

    #[test]
    fn h_vectors_of_basic_characters() {
        let c = ctx();
        assert_eq!(wd_cohomology(&trivial_char(&c), &c).unwrap().dims(), [1, 1, 0]);
        assert_eq!(wd_cohomology(&cyclotomic_char(&c), &c).unwrap().dims(), [0, 1, 1]);
        assert_eq!(wd_cohomology(&steinberg(&c), &c).unwrap().dims(), [0, 0, 0]);
    }

    #[test]
    fn euler_characteristic_vanishes() {
        let c = ctx();
        for rep in [trivial_char(&c), cyclotomic_char(&c), steinberg(&c)] {
            assert_eq!(euler_char(&rep, &c).unwrap(), 0);
        }
    }

    #[test]
    fn rank_one_family_over_the_ring() {
        let c = ctx();
        let rep = WdRep::unramified_character(Base::Ring, LaurentPoly::t(), &c).unwrap();
        let h = wd_cohomology(&rep, &c).unwrap();
        let t1 = LaurentPoly::t_minus(&ExactScalar::one());
        let qt1 = LaurentPoly::binomial(1, ExactScalar::from_int(3), 0, ExactScalar::from_int(-1));
        assert!(h.0[0].is_zero());
        assert_eq!(h.0[1], FgModule::cyclic(&t1, &c).unwrap());
        assert_eq!(h.0[2], FgModule::cyclic(&qt1, &c).unwrap());
    }

    #[test]
    fn inertia_invariants_examples() {
        let c = ctx();
        // γ = diag(1, −1) of order 2, Φ = diag(2, 5)
        let gamma = scalar_mat(vec![vec![1, 0], vec![0, -1]]);
        let phi = scalar_mat(vec![vec![2, 0], vec![0, 5]]);
        let rep = WdRep::new(
            Base::Field,
            2,
            phi,
            Matrix::zero(2, 2),
            Inertia::Finite { order: 2, generator: gamma },
            &c,
        )
        .unwrap();
        let inv = inertia_invariants(&rep, &c).unwrap();
        assert_eq!(inv.basis.cols(), 1);
        assert_eq!(inv.frobenius, scalar_mat(vec![vec![2]]));

        // γ = −1 on a line: no invariants, all cohomology vanishes
        let rep = WdRep::new(
            Base::Field,
            1,
            scalar_mat(vec![vec![1]]),
            Matrix::zero(1, 1),
            Inertia::Finite { order: 2, generator: scalar_mat(vec![vec![-1]]) },
            &c,
        )
        .unwrap();
        let h = wd_cohomology(&rep, &c).unwrap();
        assert_eq!(h.dims(), [0, 0, 0]);
    }

    #[test]
    fn tate_duality_on_characters() {
        let c = ctx();
        let dual = tate_dual_rep(&trivial_char(&c), &c).unwrap();
        assert_eq!(dual, cyclotomic_char(&c));
        let st_dual = tate_dual_rep(&steinberg(&c), &c).unwrap();
        assert_eq!(wd_cohomology(&st_dual, &c).unwrap().dims(), [0, 0, 0]);
    }

    #[test]
    fn duality_reverses_h_vectors_randomized() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let rep = random_wdrep(&mut rng, &c, 4);
            let h = wd_cohomology(&rep, &c).unwrap().dims();
            let hd = wd_cohomology(&tate_dual_rep(&rep, &c).unwrap(), &c).unwrap().dims();
            assert_eq!(h[0], hd[2]);
            assert_eq!(h[1], hd[1]);
            assert_eq!(h[2], hd[0]);
            assert_eq!(h[0] as i64 - h[1] as i64 + h[2] as i64, 0);
        }
    }

    #[test]
    fn cohomology_invariant_under_conjugation() {
        let c = ctx();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rep = random_wdrep(&mut rng, &c, 3);
            let d = rep.dim;
            // unit-triangular conjugator with small integer entries
            let mut p = Matrix::identity(d);
            for i in 0..d {
                for j in 0..i {
                    p.set(i, j, LaurentPoly::from_int(rng.random_range(-2..=2)));
                }
            }
            let p_inv = p.inverse(&c).unwrap();
            let conj = |m: &Matrix| p.mul(m, &c).unwrap().mul(&p_inv, &c).unwrap();
            let rep2 = WdRep::new(
                rep.base,
                d,
                conj(&rep.frobenius),
                conj(&rep.nilpotent),
                Inertia::trivial(),
                &c,
            )
            .unwrap();
            assert_eq!(
                wd_cohomology(&rep, &c).unwrap().dims(),
                wd_cohomology(&rep2, &c).unwrap().dims()
            );
        }
    }

    #[test]
    fn invalid_reps_are_rejected() {
        let c = ctx();
        // non-nilpotent N
        let bad = WdRep::new(
            Base::Field,
            1,
            scalar_mat(vec![vec![1]]),
            scalar_mat(vec![vec![1]]),
            Inertia::trivial(),
            &c,
        );
        assert!(matches!(bad, Err(Error::InvariantViolation(msg)) if msg.contains("nilpotent")));
        // broken Frobenius relation: Φ = 1, N = E21 on dim 2
        let mut n = Matrix::zero(2, 2);
        n.set(1, 0, LaurentPoly::one());
        let bad = WdRep::new(Base::Field, 2, Matrix::identity(2), n, Inertia::trivial(), &c);
        assert!(matches!(bad, Err(Error::InvariantViolation(msg)) if msg.contains("relation")));
        // singular Frobenius
        let bad = WdRep::new(
            Base::Field,
            1,
            Matrix::zero(1, 1),
            Matrix::zero(1, 1),
            Inertia::trivial(),
            &c,
        );
        assert!(matches!(bad, Err(Error::InvariantViolation(msg)) if msg.contains("invertible")));
    }

    #[test]
    fn wdrep_json_round_trip() {
        let c = ctx();
        let rep = steinberg(&c);
        let json = serde_json::to_string(&rep).unwrap();
        let back: WdRep = serde_json::from_str(&json).unwrap();
        back.validate(&c).unwrap();
        assert_eq!(back, rep);

        let with_inertia = WdRep::new(
            Base::Field,
            1,
            scalar_mat(vec![vec![1]]),
            Matrix::zero(1, 1),
            Inertia::Finite { order: 2, generator: scalar_mat(vec![vec![-1]]) },
            &c,
        )
        .unwrap();
        let json = serde_json::to_string(&with_inertia).unwrap();
        assert!(json.contains("\"order\":2"));
        let back: WdRep = serde_json::from_str(&json).unwrap();
        assert_eq!(back, with_inertia);
    }
}

//! Finite-group multiplicity computations: double cosets, fixed-vector
//! dimensions through characters, and the Mackey cross-check tying them
//! together.
//!
//! Groups are explicit multiplication tables (the component groups arising
//! here are small); character tables are restricted to rational values,
//! which covers the symmetric, dihedral and quaternion fixtures.

use std::collections::{BTreeSet, VecDeque};

use num::rational::BigRational;
use num::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::report::CheckReport;

/// A finite group given by its multiplication table, with conjugacy-class
/// data precomputed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    class_of: Vec<usize>,
    classes: Vec<Vec<usize>>,
}

impl FiniteGroup {
    /// Validates the group axioms in full (the orders here are tiny).
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::BadGroupTable("empty table".into()));
        }
        if order > 48 {
            return Err(Error::BadGroupTable(format!("order {order} exceeds the supported 48")));
        }
        for row in &table {
            if row.len() != order || row.iter().any(|&x| x >= order) {
                return Err(Error::BadGroupTable("table is not square over 0..order".into()));
            }
        }
        // identity
        let mut identity = None;
        for e in 0..order {
            if (0..order).all(|x| table[e][x] == x && table[x][e] == x) {
                identity = Some(e);
                break;
            }
        }
        let identity = identity.ok_or_else(|| Error::BadGroupTable("no identity element".into()))?;
        // inverses
        let mut inverse = vec![usize::MAX; order];
        for x in 0..order {
            match (0..order).find(|&y| table[x][y] == identity && table[y][x] == identity) {
                Some(y) => inverse[x] = y,
                None => return Err(Error::BadGroupTable(format!("element {x} has no inverse"))),
            }
        }
        // associativity
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::BadGroupTable(format!(
                            "associativity fails at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        // conjugacy classes
        let mut class_of = vec![usize::MAX; order];
        let mut classes = Vec::new();
        for x in 0..order {
            if class_of[x] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut class = BTreeSet::new();
            for g in 0..order {
                class.insert(table[table[g][x]][inverse[g]]);
            }
            let class: Vec<usize> = class.into_iter().collect();
            for &y in &class {
                class_of[y] = id;
            }
            classes.push(class);
        }
        Ok(FiniteGroup { order, table, identity, inverse, class_of, classes })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn element_order(&self, x: usize) -> usize {
        let mut n = 1;
        let mut y = x;
        while y != self.identity {
            y = self.mul(y, x);
            n += 1;
        }
        n
    }

    /// Closure of a subset under products and inverses.
    pub fn generated_subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        seen.insert(self.identity);
        let mut queue: VecDeque<usize> = gens.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            if !seen.insert(x) {
                continue;
            }
            queue.push_back(self.inv(x));
            let snapshot: Vec<usize> = seen.iter().copied().collect();
            for y in snapshot {
                queue.push_back(self.mul(x, y));
                queue.push_back(self.mul(y, x));
            }
        }
        seen.into_iter().collect()
    }

    /// Every subgroup, by closure-extension from the cyclic ones.
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        found.insert(vec![self.identity]);
        let mut queue: VecDeque<Vec<usize>> = VecDeque::new();
        queue.push_back(vec![self.identity]);
        while let Some(sub) = queue.pop_front() {
            for x in 0..self.order {
                if sub.binary_search(&x).is_ok() {
                    continue;
                }
                let mut gens = sub.clone();
                gens.push(x);
                let bigger = self.generated_subgroup(&gens);
                if found.insert(bigger.clone()) {
                    queue.push_back(bigger);
                }
            }
        }
        found.into_iter().collect()
    }

    /// Center of the group.
    pub fn center(&self) -> Vec<usize> {
        (0..self.order)
            .filter(|&z| (0..self.order).all(|x| self.mul(z, x) == self.mul(x, z)))
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct GroupRepr {
    order: usize,
    table: Vec<Vec<usize>>,
}

impl Serialize for FiniteGroup {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        GroupRepr { order: self.order, table: self.table.clone() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FiniteGroup {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = GroupRepr::deserialize(de)?;
        if repr.table.len() != repr.order {
            return Err(D::Error::custom("order does not match the table size"));
        }
        FiniteGroup::new(repr.table).map_err(D::Error::custom)
    }
}

/// A validated subgroup, stored as sorted element indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Subgroup(Vec<usize>);

impl Subgroup {
    pub fn new(g: &FiniteGroup, mut elements: Vec<usize>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&x| x >= g.order()) {
            return Err(Error::NotASubgroup("element index out of range".into()));
        }
        if elements.binary_search(&g.identity()).is_err() {
            return Err(Error::NotASubgroup("missing the identity".into()));
        }
        for &a in &elements {
            if elements.binary_search(&g.inv(a)).is_err() {
                return Err(Error::NotASubgroup(format!("not closed under inverse at {a}")));
            }
            for &b in &elements {
                if elements.binary_search(&g.mul(a, b)).is_err() {
                    return Err(Error::NotASubgroup(format!("not closed under product at ({a},{b})")));
                }
            }
        }
        Ok(Subgroup(elements))
    }

    pub fn trivial(g: &FiniteGroup) -> Self {
        Subgroup(vec![g.identity()])
    }

    pub fn full(g: &FiniteGroup) -> Self {
        Subgroup((0..g.order()).collect())
    }

    /// Marks the subgroup as central, verifying the claim.
    pub fn central(g: &FiniteGroup, elements: Vec<usize>) -> Result<Self> {
        let sub = Subgroup::new(g, elements)?;
        let center = g.center();
        for &z in &sub.0 {
            if center.binary_search(&z).is_err() {
                return Err(Error::NotASubgroup(format!("element {z} is not central")));
            }
        }
        Ok(sub)
    }

    pub fn elements(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Number of `A\G/B` double cosets by orbit enumeration; also returns the
/// orbit sizes (they partition the group).
pub fn double_cosets(g: &FiniteGroup, a: &Subgroup, b: &Subgroup) -> (usize, Vec<usize>) {
    let mut seen = vec![false; g.order()];
    let mut sizes = Vec::new();
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut queue = VecDeque::from([x]);
        seen[x] = true;
        while let Some(y) = queue.pop_front() {
            orbit.push(y);
            for &aa in a.elements() {
                for &bb in b.elements() {
                    let z = g.mul(g.mul(aa, y), bb);
                    if !seen[z] {
                        seen[z] = true;
                        queue.push_back(z);
                    }
                }
            }
        }
        sizes.push(orbit.len());
    }
    (sizes.len(), sizes)
}

pub fn double_coset_count(g: &FiniteGroup, a: &Subgroup, b: &Subgroup) -> usize {
    double_cosets(g, a, b).0
}

/// `Σ_H #(Z\G/H)` over the listed subgroups.
pub fn prasad_sum(g: &FiniteGroup, z: &Subgroup, h_list: &[Subgroup]) -> usize {
    h_list.iter().map(|h| double_coset_count(g, z, h)).sum()
}

/// A rational character table: rows are irreducible characters, columns the
/// conjugacy classes in the group's canonical class order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharacterTable {
    values: Vec<Vec<BigRational>>,
}

impl CharacterTable {
    /// Validates shape and exact column orthogonality
    /// `Σ_ρ χ_ρ(C_i)·χ_ρ(C_j) = δ_ij·|G|/|C_i|`.
    pub fn new(g: &FiniteGroup, values: Vec<Vec<BigRational>>) -> Result<Self> {
        let k = g.classes().len();
        if values.len() != k {
            return Err(Error::BadCharacterTable(format!(
                "{} irreducibles for {} classes",
                values.len(),
                k
            )));
        }
        for row in &values {
            if row.len() != k {
                return Err(Error::BadCharacterTable("ragged rows".into()));
            }
        }
        let order = BigRational::from_integer((g.order() as i64).into());
        for i in 0..k {
            for j in 0..k {
                let mut sum = BigRational::zero();
                for row in &values {
                    sum += &row[i] * &row[j];
                }
                let expected = if i == j {
                    &order / BigRational::from_integer((g.classes()[i].len() as i64).into())
                } else {
                    BigRational::zero()
                };
                if sum != expected {
                    return Err(Error::BadCharacterTable(format!(
                        "column orthogonality fails at classes ({i},{j})"
                    )));
                }
            }
        }
        Ok(CharacterTable { values })
    }

    /// Builds from per-element character values, checking class constancy.
    pub fn from_element_values(g: &FiniteGroup, rows: Vec<Vec<i64>>) -> Result<Self> {
        let mut values = Vec::with_capacity(rows.len());
        for row in &rows {
            if row.len() != g.order() {
                return Err(Error::BadCharacterTable("row length differs from group order".into()));
            }
            let mut class_vals = vec![None; g.classes().len()];
            for (x, &v) in row.iter().enumerate() {
                let c = g.class_of(x);
                match class_vals[c] {
                    None => class_vals[c] = Some(v),
                    Some(w) if w == v => {}
                    Some(w) => {
                        return Err(Error::BadCharacterTable(format!(
                            "character not constant on a class: {w} vs {v}"
                        )));
                    }
                }
            }
            values.push(
                class_vals
                    .into_iter()
                    .map(|v| BigRational::from_integer(v.expect("class covered").into()))
                    .collect(),
            );
        }
        CharacterTable::new(g, values)
    }

    pub fn num_irreps(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, rho: usize, class: usize) -> &BigRational {
        &self.values[rho][class]
    }

    pub fn dim(&self, rho: usize, g: &FiniteGroup) -> usize {
        let d = self.value(rho, g.class_of(g.identity()));
        debug_assert!(d.is_integer());
        let v: i64 = d.to_integer().try_into().expect("small dimension");
        v as usize
    }
}

impl Serialize for CharacterTable {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .values
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| {
                        if v.denom().is_one() {
                            v.numer().to_string()
                        } else {
                            format!("{}/{}", v.numer(), v.denom())
                        }
                    })
                    .collect()
            })
            .collect();
        rows.serialize(ser)
    }
}

/// Raw rows as parsed from JSON; validation happens against a group.
pub fn character_rows_from_json(rows: &[Vec<String>]) -> Result<Vec<Vec<BigRational>>> {
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let mut r = Vec::with_capacity(row.len());
        for s in row {
            let mut parts = s.splitn(2, '/');
            let n: num::BigInt = parts
                .next()
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| Error::BadCharacterTable(format!("bad value {s:?}: {e}")))?;
            let d: num::BigInt = match parts.next() {
                None => 1.into(),
                Some(d) => d
                    .trim()
                    .parse()
                    .map_err(|e| Error::BadCharacterTable(format!("bad value {s:?}: {e}")))?,
            };
            r.push(BigRational::new(n, d));
        }
        out.push(r);
    }
    Ok(out)
}

/// `dim ρ^H = (1/|H|)·Σ_{h∈H} χ_ρ(h)`, asserted integral.
pub fn fixed_dim(g: &FiniteGroup, ct: &CharacterTable, rho: usize, h: &Subgroup) -> Result<usize> {
    let mut sum = BigRational::zero();
    for &x in h.elements() {
        sum += ct.value(rho, g.class_of(x));
    }
    let avg = sum / BigRational::from_integer((h.len() as i64).into());
    if !avg.is_integer() {
        return Err(Error::BadCharacterTable(format!(
            "fixed-vector dimension {avg} is not an integer"
        )));
    }
    let v: i64 = avg
        .to_integer()
        .try_into()
        .map_err(|_| Error::BadCharacterTable("fixed dimension out of range".into()))?;
    if v < 0 {
        return Err(Error::BadCharacterTable("negative fixed dimension".into()));
    }
    Ok(v as usize)
}

/// Mackey identity: `#(A\G/B) = Σ_ρ dim ρ^A · dim ρ^B` exactly.
pub fn mackey_check(g: &FiniteGroup, ct: &CharacterTable, a: &Subgroup, b: &Subgroup) -> Result<bool> {
    let lhs = double_coset_count(g, a, b);
    let mut rhs = 0usize;
    for rho in 0..ct.num_irreps() {
        rhs += fixed_dim(g, ct, rho, a)? * fixed_dim(g, ct, rho, b)?;
    }
    Ok(lhs == rhs)
}

/// The multiplicity `Σ_H dim ρ^H` together with the statement that the
/// higher extension groups vanish: representations of a finite group in
/// characteristic zero form a semisimple category.
pub fn higher_ext_vanishing_report(
    g: &FiniteGroup,
    ct: &CharacterTable,
    rho: usize,
    h_list: &[Subgroup],
) -> Result<(usize, CheckReport)> {
    let mut report = CheckReport::new("multiplicity_with_ext_vanishing");
    let mut total = 0usize;
    for (i, h) in h_list.iter().enumerate() {
        let d = fixed_dim(g, ct, rho, h)?;
        total += d;
        report.pass(format!("lift_{i}_fixed_dim_{d}"));
    }
    report.pass("ext_i_vanishes_for_i_positive: semisimple category in characteristic 0");
    Ok((total, report))
}

/// Fixture groups with their rational character tables.
pub mod fixtures {
    use super::*;

    fn perms(n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![vec![]];
        for k in 0..n {
            let mut next = Vec::new();
            for p in out {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    next.push(q);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    fn cycle_type(p: &[usize]) -> Vec<usize> {
        let n = p.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = p[x];
                len += 1;
            }
            cycles.push(len);
        }
        cycles.sort_unstable();
        cycles.reverse();
        cycles
    }

    fn symmetric_group_with(
        n: usize,
        char_of_type: &[(&[usize], Vec<i64>)],
    ) -> (FiniteGroup, CharacterTable) {
        let elements = perms(n);
        let index: std::collections::HashMap<Vec<usize>, usize> =
            elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let order = elements.len();
        let mut table = vec![vec![0; order]; order];
        for (i, p) in elements.iter().enumerate() {
            for (j, q) in elements.iter().enumerate() {
                // (p∘q)(x) = p(q(x))
                let pq: Vec<usize> = (0..n).map(|x| p[q[x]]).collect();
                table[i][j] = index[&pq];
            }
        }
        let g = FiniteGroup::new(table).expect("symmetric group");
        let mut rows = Vec::new();
        for irrep in 0..char_of_type[0].1.len() {
            let mut row = Vec::with_capacity(order);
            for p in &elements {
                let t = cycle_type(p);
                let (_, vals) = char_of_type
                    .iter()
                    .find(|(ty, _)| *ty == t.as_slice())
                    .expect("cycle type covered");
                row.push(vals[irrep]);
            }
            rows.push(row);
        }
        let ct = CharacterTable::from_element_values(&g, rows).expect("character table");
        (g, ct)
    }

    /// `S₃` with irreducibles (trivial, sign, standard 2-dimensional).
    pub fn s3() -> (FiniteGroup, CharacterTable) {
        symmetric_group_with(
            3,
            &[
                (&[1, 1, 1], vec![1, 1, 2]),
                (&[2, 1], vec![1, -1, 0]),
                (&[3], vec![1, 1, -1]),
            ],
        )
    }

    /// `S₄` with its five rational irreducibles.
    pub fn s4() -> (FiniteGroup, CharacterTable) {
        symmetric_group_with(
            4,
            &[
                (&[1, 1, 1, 1], vec![1, 1, 2, 3, 3]),
                (&[2, 1, 1], vec![1, -1, 0, 1, -1]),
                (&[2, 2], vec![1, 1, 2, -1, -1]),
                (&[3, 1], vec![1, 1, -1, 0, 0]),
                (&[4], vec![1, -1, 0, -1, 1]),
            ],
        )
    }

    /// The dihedral group of order 8, elements `r^a s^b` indexed `a + 4b`.
    pub fn d4() -> (FiniteGroup, CharacterTable) {
        let order = 8;
        let idx = |a: i64, b: i64| -> usize {
            (a.rem_euclid(4) + 4 * b.rem_euclid(2)) as usize
        };
        let mut table = vec![vec![0; order]; order];
        for a1 in 0..4i64 {
            for b1 in 0..2i64 {
                for a2 in 0..4i64 {
                    for b2 in 0..2i64 {
                        // (r^{a1} s^{b1})(r^{a2} s^{b2}) = r^{a1 + (−1)^{b1} a2} s^{b1+b2}
                        let a = a1 + if b1 == 0 { a2 } else { -a2 };
                        table[idx(a1, b1)][idx(a2, b2)] = idx(a, b1 + b2);
                    }
                }
            }
        }
        let g = FiniteGroup::new(table).expect("dihedral group");
        // per element r^a s^b
        let val = |f: &dyn Fn(i64, i64) -> i64| -> Vec<i64> {
            let mut row = vec![0; order];
            for a in 0..4i64 {
                for b in 0..2i64 {
                    row[idx(a, b)] = f(a, b);
                }
            }
            row
        };
        let rows = vec![
            val(&|_, _| 1),
            val(&|_, b| if b == 0 { 1 } else { -1 }),
            val(&|a, _| if a % 2 == 0 { 1 } else { -1 }),
            val(&|a, b| if (a + b) % 2 == 0 { 1 } else { -1 }),
            val(&|a, b| {
                if b != 0 {
                    0
                } else if a == 0 {
                    2
                } else if a == 2 {
                    -2
                } else {
                    0
                }
            }),
        ];
        let ct = CharacterTable::from_element_values(&g, rows).expect("character table");
        (g, ct)
    }

    /// The quaternion group, elements `±1, ±i, ±j, ±k` indexed
    /// `0,1,2,3,4,5,6,7` in that order.
    pub fn q8() -> (FiniteGroup, CharacterTable) {
        // sign s ∈ {0,1}, axis x ∈ {1=1, i=2, j=3, k=4}; index = 2(x−1)+s
        let mul_axis = |x: usize, y: usize| -> (usize, usize) {
            match (x, y) {
                (1, y) => (y, 0),
                (x, 1) => (x, 0),
                (2, 2) | (3, 3) | (4, 4) => (1, 1),
                (2, 3) => (4, 0),
                (3, 2) => (4, 1),
                (3, 4) => (2, 0),
                (4, 3) => (2, 1),
                (4, 2) => (3, 0),
                (2, 4) => (3, 1),
                _ => unreachable!(),
            }
        };
        let order = 8;
        let mut table = vec![vec![0; order]; order];
        for x in 1..=4usize {
            for s1 in 0..2usize {
                for y in 1..=4usize {
                    for s2 in 0..2usize {
                        let (z, s3) = mul_axis(x, y);
                        let s = (s1 + s2 + s3) % 2;
                        table[2 * (x - 1) + s1][2 * (y - 1) + s2] = 2 * (z - 1) + s;
                    }
                }
            }
        }
        let g = FiniteGroup::new(table).expect("quaternion group");
        let val = |f: &dyn Fn(usize, usize) -> i64| -> Vec<i64> {
            let mut row = vec![0; order];
            for x in 1..=4usize {
                for s in 0..2usize {
                    row[2 * (x - 1) + s] = f(x, s);
                }
            }
            row
        };
        let rows = vec![
            val(&|_, _| 1),
            val(&|x, _| if x <= 2 { 1 } else { -1 }),     // kernel {±1, ±i}
            val(&|x, _| if x == 1 || x == 3 { 1 } else { -1 }), // kernel {±1, ±j}
            val(&|x, _| if x == 1 || x == 4 { 1 } else { -1 }), // kernel {±1, ±k}
            val(&|x, s| match (x, s) {
                (1, 0) => 2,
                (1, 1) => -2,
                _ => 0,
            }),
        ];
        let ct = CharacterTable::from_element_values(&g, rows).expect("character table");
        (g, ct)
    }

    /// Looks up a fixture by name.
    pub fn by_name(name: &str) -> Option<(FiniteGroup, CharacterTable)> {
        match name {
            "s3" => Some(s3()),
            "s4" => Some(s4()),
            "d4" => Some(d4()),
            "q8" => Some(q8()),
            _ => None,
        }
    }

    /// Index of a transposition in the sorted-permutation ordering of `S₃`
    /// (the permutation swapping 0 and 1).
    pub fn s3_transposition(g: &FiniteGroup) -> usize {
        (0..g.order()).find(|&x| g.element_order(x) == 2).expect("transposition")
    }

    /// Index of a 3-cycle in `S₃`.
    pub fn s3_three_cycle(g: &FiniteGroup) -> usize {
        (0..g.order()).find(|&x| g.element_order(x) == 3).expect("3-cycle")
    }
}

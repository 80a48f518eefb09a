//! Graded vector spaces and sparse multilinear maps with mechanical Koszul
//! signs.
//!
//! Every sign in the engine comes from one rule: moving an operator of
//! internal degree `d` past arguments of total degree `e` costs `(-1)^{de}`.
//! Operators are [`MultilinearMap`]s; each entry must satisfy the degree rule
//! `deg(out) = sum deg(in_i) + internal_degree`.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::SparseVec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Grading {
    Z,
    Z2,
}

/// A finite graded space: an ordered basis of named, graded elements.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSpace {
    pub grading: Grading,
    basis: Vec<(String, i64)>,
}

impl GradedSpace {
    pub fn new(grading: Grading, basis: Vec<(String, i64)>) -> Result<Arc<Self>> {
        let mut seen = std::collections::BTreeSet::new();
        for (name, _) in &basis {
            if !seen.insert(name.clone()) {
                return Err(Error::Invalid(format!("duplicate basis name {name:?}")));
            }
        }
        let basis = basis
            .into_iter()
            .map(|(n, d)| match grading {
                Grading::Z => (n, d),
                Grading::Z2 => (n, d.rem_euclid(2)),
            })
            .collect();
        Ok(Arc::new(GradedSpace { grading, basis }))
    }

    pub fn empty(grading: Grading) -> Arc<Self> {
        Arc::new(GradedSpace {
            grading,
            basis: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].1
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|(n, _)| n == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &str, i64)> {
        self.basis
            .iter()
            .enumerate()
            .map(|(i, (n, d))| (i, n.as_str(), *d))
    }

    /// Degree addition respecting the grading group.
    pub fn add_deg(&self, a: i64, b: i64) -> i64 {
        match self.grading {
            Grading::Z => a + b,
            Grading::Z2 => (a + b).rem_euclid(2),
        }
    }

    /// The shifted space `V[k]`: same names, `V[k]^d = V^{d+k}`.
    pub fn shift(&self, k: i64) -> Arc<GradedSpace> {
        Arc::new(GradedSpace {
            grading: self.grading,
            basis: self
                .basis
                .iter()
                .map(|(n, d)| match self.grading {
                    Grading::Z => (n.clone(), d - k),
                    Grading::Z2 => (n.clone(), (d - k).rem_euclid(2)),
                })
                .collect(),
        })
    }

    /// Folds a Z-graded space onto Z/2.
    pub fn fold_z2(&self) -> Arc<GradedSpace> {
        Arc::new(GradedSpace {
            grading: Grading::Z2,
            basis: self
                .basis
                .iter()
                .map(|(n, d)| (n.clone(), d.rem_euclid(2)))
                .collect(),
        })
    }

    pub fn word_degree(&self, word: &[u32]) -> i64 {
        let mut d = 0;
        for &i in word {
            d = self.add_deg(d, self.degree(i as usize));
        }
        d
    }
}

/// `(-1)^{(sum moved)(sum passed)}` as an integer sign.
pub fn koszul_sign(degrees_moved_left: &[i64], degrees_passed: &[i64]) -> i64 {
    let a: i64 = degrees_moved_left.iter().map(|d| d.rem_euclid(2)).sum();
    let b: i64 = degrees_passed.iter().map(|d| d.rem_euclid(2)).sum();
    if (a * b).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Sign for moving a single operator of degree `op_degree` past arguments of
/// total degree `args_degree`.
pub fn pass_sign(op_degree: i64, args_degree: i64) -> i64 {
    if (op_degree.rem_euclid(2) * args_degree.rem_euclid(2)).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn scalar_sign(field: FieldSpec, sign: i64) -> Scalar {
    debug_assert!(sign == 1 || sign == -1);
    field.from_i64(sign)
}

/// A sparse multilinear map between graded spaces.
///
/// `sources[i]` is the space of the i-th input slot (algebra maps use the
/// same space in every slot, module maps mix spaces). Arity-0 maps are
/// elements of the target.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearMap {
    pub sources: Vec<Arc<GradedSpace>>,
    pub target: Arc<GradedSpace>,
    pub internal_degree: i64,
    pub field: FieldSpec,
    entries: BTreeMap<Vec<u32>, SparseVec>,
}

impl MultilinearMap {
    pub fn zero(
        sources: Vec<Arc<GradedSpace>>,
        target: Arc<GradedSpace>,
        internal_degree: i64,
        field: FieldSpec,
    ) -> Self {
        MultilinearMap {
            sources,
            target,
            internal_degree,
            field,
            entries: BTreeMap::new(),
        }
    }

    pub fn uniform(
        source: Arc<GradedSpace>,
        arity: usize,
        target: Arc<GradedSpace>,
        internal_degree: i64,
        field: FieldSpec,
    ) -> Self {
        Self::zero(vec![source; arity], target, internal_degree, field)
    }

    pub fn identity(space: Arc<GradedSpace>, field: FieldSpec) -> Self {
        let mut m = Self::zero(vec![space.clone()], space.clone(), 0, field);
        for i in 0..space.dim() {
            m.add_entry(&[i as u32], SparseVec::singleton(i, field.one()))
                .expect("identity respects degrees");
        }
        m
    }

    pub fn arity(&self) -> usize {
        self.sources.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|v| v.is_zero())
    }

    pub fn input_degree(&self, key: &[u32]) -> i64 {
        let mut d = 0;
        for (slot, &i) in key.iter().enumerate() {
            d = self.target.add_deg(d, self.sources[slot].degree(i as usize));
        }
        d
    }

    /// Adds `value` to the entry at `key`, enforcing the degree rule.
    pub fn add_entry(&mut self, key: &[u32], value: SparseVec) -> Result<()> {
        if key.len() != self.arity() {
            return Err(Error::DimensionMismatch(format!(
                "key of length {}, arity {}",
                key.len(),
                self.arity()
            )));
        }
        let want = self
            .target
            .add_deg(self.input_degree(key), self.internal_degree);
        for (i, v) in value.iter() {
            if v.field() != self.field {
                return Err(Error::FieldMismatch("map entry".into()));
            }
            if self.target.degree(i) != want {
                return Err(Error::DegreeRule(format!(
                    "entry {:?} -> {} has degree {}, expected {}",
                    key,
                    self.target.name(i),
                    self.target.degree(i),
                    want
                )));
            }
        }
        if value.is_zero() {
            return Ok(());
        }
        match self.entries.get_mut(key) {
            Some(v) => {
                let mut merged = v.clone();
                merged.add_scaled(&value, &self.field.one());
                if merged.is_zero() {
                    self.entries.remove(key);
                } else {
                    *v = merged;
                }
            }
            None => {
                self.entries.insert(key.to_vec(), value);
            }
        }
        Ok(())
    }

    pub fn eval(&self, key: &[u32]) -> Option<&SparseVec> {
        self.entries.get(key)
    }

    /// Evaluates on a tuple, returning a zero vector when absent.
    pub fn eval_or_zero(&self, key: &[u32]) -> SparseVec {
        self.entries.get(key).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<u32>, &SparseVec)> {
        self.entries.iter()
    }

    pub fn scale(&mut self, c: &Scalar) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for v in self.entries.values_mut() {
            v.scale(c);
        }
    }

    pub fn add(&mut self, other: &MultilinearMap) -> Result<()> {
        if self.sources != other.sources
            || self.target != other.target
            || self.internal_degree != other.internal_degree
        {
            return Err(Error::SpaceMismatch("adding incompatible maps".into()));
        }
        for (k, v) in other.entries() {
            self.add_entry(k, v.clone())?;
        }
        Ok(())
    }

    /// `outer .. (id^r (x) inner (x) id^t)` with the mechanical Koszul sign
    /// `(-1)^{deg(inner) * deg(first r inputs)}` applied per entry.
    pub fn compose_at(&self, position: usize, inner: &MultilinearMap) -> Result<MultilinearMap> {
        if position >= self.arity() {
            return Err(Error::DimensionMismatch(format!(
                "slot {position} of an arity-{} map",
                self.arity()
            )));
        }
        if *inner.target != *self.sources[position] {
            return Err(Error::SpaceMismatch(format!(
                "inner target does not feed slot {position}"
            )));
        }
        let mut sources = Vec::with_capacity(self.arity() + inner.arity() - 1);
        sources.extend_from_slice(&self.sources[..position]);
        sources.extend_from_slice(&inner.sources);
        sources.extend_from_slice(&self.sources[position + 1..]);
        let mut out = MultilinearMap::zero(
            sources,
            self.target.clone(),
            self.target
                .add_deg(self.internal_degree, inner.internal_degree),
            self.field,
        );
        // index inner entries by output basis element
        let mut by_out: BTreeMap<usize, Vec<(&Vec<u32>, &Scalar)>> = BTreeMap::new();
        for (k, v) in inner.entries() {
            for (i, c) in v.iter() {
                by_out.entry(i).or_default().push((k, c));
            }
        }
        for (okey, oval) in self.entries() {
            let mid = okey[position] as usize;
            let Some(hits) = by_out.get(&mid) else {
                continue;
            };
            let mut prefix_deg = 0i64;
            for (slot, &i) in okey[..position].iter().enumerate() {
                prefix_deg += self.sources[slot].degree(i as usize);
            }
            let sign = pass_sign(inner.internal_degree, prefix_deg);
            for (ikey, c) in hits {
                let mut key = Vec::with_capacity(out.arity());
                key.extend_from_slice(&okey[..position]);
                key.extend_from_slice(ikey);
                key.extend_from_slice(&okey[position + 1..]);
                let mut val = oval.clone();
                let factor = &(*c * &scalar_sign(self.field, sign));
                val.scale(factor);
                out.add_entry(&key, val)?;
            }
        }
        Ok(out)
    }
}

/// Moves a degree-shift operator `s` of degree `shift` through the inputs of
/// an operation: converts `f: V1 (x) ... (x) Vn -> T` to
/// `s . f . (s^{-1})^{(x)n}` acting on the shifted slots listed in
/// `shift_slots`. Used for the decalage between the m- and b-conventions and
/// for module maps with one unshifted slot.
pub fn conjugate_by_shift(
    map: &MultilinearMap,
    shift_slots: &[bool],
    new_sources: Vec<Arc<GradedSpace>>,
    new_target: Arc<GradedSpace>,
    target_shifted: bool,
    shift: i64,
) -> Result<MultilinearMap> {
    assert_eq!(shift_slots.len(), map.arity());
    // internal degree changes by shift per shifted input (s^{-1} has degree
    // +shift) and by -shift when the target is shifted
    let mut delta = 0i64;
    for &s in shift_slots {
        if s {
            delta += shift;
        }
    }
    if target_shifted {
        delta -= shift;
    }
    let internal = new_target.add_deg(map.internal_degree, delta);
    let mut out = MultilinearMap::zero(new_sources, new_target, internal, map.field);
    for (key, val) in map.entries() {
        // sign: each s^{-1} (degree +shift, attached to a shifted slot) moves
        // past the arguments to its left, measured in the *new* (shifted)
        // degrees
        let mut sign = 1i64;
        let mut left_deg = 0i64;
        for (slot, &i) in key.iter().enumerate() {
            if shift_slots[slot] {
                sign *= pass_sign(shift, left_deg);
            }
            left_deg += out.sources[slot].degree(i as usize);
        }
        let mut v = val.clone();
        v.scale(&scalar_sign(map.field, sign));
        out.add_entry(key, v)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1], &[1]), -1);
        assert_eq!(koszul_sign(&[0], &[5]), 1);
        assert_eq!(koszul_sign(&[1, 1], &[1]), 1);
    }

    #[test]
    fn shift_examples() {
        let v = GradedSpace::new(Grading::Z, vec![("e".into(), 0)]).unwrap();
        let w = v.shift(1);
        assert_eq!(w.degree(0), -1);
        let same = v.shift(0);
        assert_eq!(*same, *v);
        let round = w.shift(-1);
        assert_eq!(*round, *v);
        // an odd generator lands in degree 0 after one shift
        let l = GradedSpace::new(Grading::Z, vec![("xi".into(), 1)]).unwrap();
        assert_eq!(l.shift(1).degree(0), 0);
    }

    /// Shifted multiplication table of the dual numbers k[eps]/(eps^2).
    fn dual_numbers_b2() -> (Arc<GradedSpace>, MultilinearMap) {
        let w = GradedSpace::new(Grading::Z, vec![("1".into(), -1), ("eps".into(), -1)]).unwrap();
        let mut b2 = MultilinearMap::uniform(w.clone(), 2, w.clone(), 1, q());
        let neg = q().from_i64(-1);
        b2.add_entry(&[0, 0], SparseVec::singleton(0, neg.clone())).unwrap();
        b2.add_entry(&[0, 1], SparseVec::singleton(1, neg.clone())).unwrap();
        b2.add_entry(&[1, 0], SparseVec::singleton(1, neg)).unwrap();
        (w, b2)
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let (w, b2) = dual_numbers_b2();
        let id = MultilinearMap::identity(w, q());
        for r in 0..2 {
            let c = b2.compose_at(r, &id).unwrap();
            assert_eq!(c, b2);
        }
    }

    #[test]
    fn square_zero_differential() {
        // m1(x) = y on a two-step complex: b1 . b1 = 0
        let w = GradedSpace::new(Grading::Z, vec![("x".into(), -1), ("y".into(), 0)]).unwrap();
        let mut b1 = MultilinearMap::uniform(w.clone(), 1, w, 1, q());
        b1.add_entry(&[0], SparseVec::singleton(1, q().one())).unwrap();
        let sq = b1.compose_at(0, &b1).unwrap();
        assert!(sq.is_zero());
    }

    #[test]
    fn associativity_as_composition_identity() {
        // shifted associativity: b2(b2 (x) id) + b2(id (x) b2) = 0, where the
        // second term carries the mechanical sign
        let (_, b2) = dual_numbers_b2();
        let left = b2.compose_at(0, &b2).unwrap();
        let right = b2.compose_at(1, &b2).unwrap();
        assert!(!left.is_zero());
        assert!(!right.is_zero());
        let mut sum = left;
        sum.add(&right).unwrap();
        assert!(sum.is_zero());
    }

    #[test]
    fn disjoint_insertions_interchange() {
        let w = GradedSpace::new(
            Grading::Z,
            vec![("x".into(), -1), ("y".into(), 0), ("z".into(), 1)],
        )
        .unwrap();
        let mut b1 = MultilinearMap::uniform(w.clone(), 1, w.clone(), 1, q());
        b1.add_entry(&[0], SparseVec::singleton(1, q().one())).unwrap();
        b1.add_entry(&[1], SparseVec::singleton(2, q().one())).unwrap();
        let mut b2 = MultilinearMap::uniform(w.clone(), 2, w, 1, q());
        b2.add_entry(&[0, 0], SparseVec::singleton(0, q().one())).unwrap();
        b2.add_entry(&[0, 1], SparseVec::singleton(1, q().one())).unwrap();
        b2.add_entry(&[1, 0], SparseVec::singleton(1, q().one())).unwrap();
        b2.add_entry(&[1, 1], SparseVec::singleton(2, q().one())).unwrap();
        // insert b1 at slot 0 and b2 at slot 1 of b2, in both orders
        let first = b2.compose_at(0, &b1).unwrap().compose_at(1, &b2).unwrap();
        let mut second = b2.compose_at(1, &b2).unwrap().compose_at(0, &b1).unwrap();
        // operators of degrees 1 and 1 pass each other: sign -1
        second.scale(&q().from_i64(pass_sign(1, 1)));
        assert!(!first.is_zero());
        assert_eq!(first, second);
    }

    #[test]
    fn degree_rule_enforced() {
        let w = GradedSpace::new(Grading::Z, vec![("x".into(), 0), ("y".into(), 5)]).unwrap();
        let mut f = MultilinearMap::uniform(w.clone(), 1, w, 1, q());
        assert!(f.add_entry(&[0], SparseVec::singleton(1, q().one())).is_err());
    }

    #[test]
    fn z2_signs_match_z_signs_mod_two() {
        for a in 0..4i64 {
            for b in 0..4i64 {
                let z = koszul_sign(&[a], &[b]);
                let z2 = koszul_sign(&[a.rem_euclid(2)], &[b.rem_euclid(2)]);
                assert_eq!(z, z2);
            }
        }
    }
}

//! Sparse exact linear algebra: echelon forms, rank, kernel, solve, and the
//! Jordan block profile of a nilpotent map.
//!
//! Everything here is deterministic. Ranks are computed by a left-looking
//! sparse elimination with a fill-aware pivot choice; whenever a basis is
//! exposed (kernel vectors, solutions) it is read off the reduced row echelon
//! form, which is unique, so outputs do not depend on internal pivot order.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use serde::Serialize;
use std::collections::BTreeMap;

/// A sparse vector: sorted `(index, nonzero scalar)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVec {
    pub entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn new() -> Self {
        SparseVec { entries: Vec::new() }
    }

    pub fn singleton(i: usize, s: Scalar) -> Self {
        if s.is_zero() {
            Self::new()
        } else {
            SparseVec { entries: vec![(i, s)] }
        }
    }

    pub fn from_map(m: BTreeMap<usize, Scalar>) -> Self {
        SparseVec {
            entries: m.into_iter().filter(|(_, s)| !s.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|k| &self.entries[k].1)
    }

    pub fn add_scaled(&mut self, other: &SparseVec, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            match (self.entries.get(i), other.entries.get(j)) {
                (Some((a, x)), Some((b, y))) if a == b => {
                    let v = x + &(y * c);
                    if !v.is_zero() {
                        out.push((*a, v));
                    }
                    i += 1;
                    j += 1;
                }
                (Some((a, x)), Some((b, _))) if a < b => {
                    out.push((*a, x.clone()));
                    i += 1;
                }
                (Some(_), Some((b, y))) => {
                    out.push((*b, y * c));
                    j += 1;
                }
                (Some((a, x)), None) => {
                    out.push((*a, x.clone()));
                    i += 1;
                }
                (None, Some((b, y))) => {
                    out.push((*b, y * c));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        self.entries = out;
    }

    pub fn scale(&mut self, c: &Scalar) {
        if c.is_zero() {
            self.entries.clear();
        } else {
            for (_, v) in &mut self.entries {
                *v *= c;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.entries.iter().map(|(i, s)| (*i, s))
    }
}

/// A sparse matrix over one fixed field, stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: FieldSpec,
    row_data: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize, field: FieldSpec) -> Self {
        SparseMatrix {
            rows,
            cols,
            field,
            row_data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize, field: FieldSpec) -> Self {
        let mut m = Self::zero(n, n, field);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from `(row, col, value)` triples; mixed fields are
    /// rejected, repeated positions are summed.
    pub fn from_triples(
        rows: usize,
        cols: usize,
        field: FieldSpec,
        triples: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Result<Self> {
        let mut acc: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triples {
            if v.field() != field {
                return Err(Error::FieldMismatch(format!(
                    "entry ({r},{c}) lives in {}, matrix in {}",
                    v.field(),
                    field
                )));
            }
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r},{c}) out of {rows}x{cols}"
                )));
            }
            let slot = acc[r].entry(c).or_insert_with(|| field.zero());
            *slot += &v;
        }
        Ok(SparseMatrix {
            rows,
            cols,
            field,
            row_data: acc.into_iter().map(SparseVec::from_map).collect(),
        })
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.rows && c < self.cols);
        let row = &mut self.row_data[r];
        match row.entries.binary_search_by_key(&c, |(j, _)| *j) {
            Ok(k) => {
                if v.is_zero() {
                    row.entries.remove(k);
                } else {
                    row.entries[k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.entries.insert(k, (c, v));
                }
            }
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.row_data[r].get(c).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.row_data[r]
    }

    pub fn nnz(&self) -> usize {
        self.row_data.iter().map(|r| r.entries.len()).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::zero(self.cols, self.rows, self.field);
        for (r, row) in self.row_data.iter().enumerate() {
            for (c, v) in row.iter() {
                t.row_data[c].entries.push((r, v.clone()));
            }
        }
        // column order within each transposed row is already increasing in r
        t
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (r, row) in self.row_data.iter().enumerate() {
            let mut acc = self.field.zero();
            let mut any = false;
            for (c, x) in row.iter() {
                if let Some(y) = v.get(c) {
                    acc += &(x * y);
                    any = true;
                }
            }
            if any && !acc.is_zero() {
                out.insert(r, acc);
            }
        }
        SparseVec::from_map(out)
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch("matrix product".into()));
        }
        let mut out = SparseMatrix::zero(self.rows, other.cols, self.field);
        for (r, row) in self.row_data.iter().enumerate() {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, x) in row.iter() {
                for (c, y) in other.row_data[k].iter() {
                    let slot = acc.entry(c).or_insert_with(|| self.field.zero());
                    *slot += &(x * y);
                }
            }
            out.row_data[r] = SparseVec::from_map(acc);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.row_data.iter().all(|r| r.is_zero())
    }

    pub fn check_single_field(&self) -> Result<()> {
        for row in &self.row_data {
            for (_, v) in row.iter() {
                if v.field() != self.field {
                    return Err(Error::FieldMismatch(format!(
                        "entry in {} inside a {} matrix",
                        v.field(),
                        self.field
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    /// Pivot rows in echelon order; row `i` has leading 1 in `pivots[i]`.
    pub rows: Vec<SparseVec>,
    pub pivots: Vec<usize>,
    pub cols: usize,
    pub field: FieldSpec,
}

impl SparseMatrix {
    /// Forward elimination only; returns the rank.
    pub fn rank(&self) -> usize {
        self.echelon_rows().len()
    }

    fn echelon_rows(&self) -> Vec<SparseVec> {
        // bucket active rows by leading column; repeatedly clear the lowest
        // leading column, preferring the sparsest candidate as pivot
        let mut buckets: BTreeMap<usize, Vec<SparseVec>> = BTreeMap::new();
        for row in &self.row_data {
            if let Some((c, _)) = row.entries.first() {
                buckets.entry(*c).or_default().push(row.clone());
            }
        }
        let mut pivot_rows: Vec<SparseVec> = Vec::new();
        while let Some((&c, _)) = buckets.iter().next() {
            let mut cand = buckets.remove(&c).unwrap();
            let best = cand
                .iter()
                .enumerate()
                .min_by_key(|(i, r)| (r.entries.len(), *i))
                .map(|(i, _)| i)
                .unwrap();
            let mut pivot = cand.swap_remove(best);
            let inv = pivot.entries[0].1.inverse().expect("nonzero pivot");
            pivot.scale(&inv);
            for mut r in cand {
                let lead = r.entries[0].1.clone();
                r.add_scaled(&pivot, &-lead);
                if let Some((c2, _)) = r.entries.first() {
                    buckets.entry(*c2).or_default().push(r);
                }
            }
            pivot_rows.push(pivot);
        }
        pivot_rows
    }

    /// Reduced row echelon form (unique, hence canonical).
    pub fn rref(&self) -> Rref {
        let mut rows = self.echelon_rows();
        let pivots: Vec<usize> = rows.iter().map(|r| r.entries[0].0).collect();
        // back-eliminate above each pivot, last pivot first
        for i in (0..rows.len()).rev() {
            let pivot_row = rows[i].clone();
            let pc = pivots[i];
            for j in 0..i {
                if let Some(v) = rows[j].get(pc) {
                    let c = -v.clone();
                    rows[j].add_scaled(&pivot_row, &c);
                }
            }
        }
        Rref {
            rows,
            pivots,
            cols: self.cols,
            field: self.field,
        }
    }
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Canonical kernel basis: one vector per free column, echelon-ordered,
    /// with the free coordinate set to 1.
    pub fn kernel_basis(&self) -> Vec<SparseVec> {
        let pivot_set: BTreeMap<usize, usize> = self
            .pivots
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i))
            .collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains_key(&free) {
                continue;
            }
            let mut v: BTreeMap<usize, Scalar> = BTreeMap::new();
            v.insert(free, self.field.one());
            for (pc, pr) in &pivot_set {
                if let Some(x) = self.rows[*pr].get(free) {
                    v.insert(*pc, -x.clone());
                }
            }
            basis.push(SparseVec::from_map(v));
        }
        basis
    }
}

/// Rank and canonical kernel basis of `m`.
pub fn rank_kernel(m: &SparseMatrix) -> Result<(usize, Vec<SparseVec>)> {
    m.check_single_field()?;
    let r = m.rref();
    Ok((r.rank(), r.kernel_basis()))
}

/// Solves `m x = rhs` exactly. Free variables are set to zero in echelon
/// order; returns `None` when the system is inconsistent.
pub fn solve(m: &SparseMatrix, rhs: &SparseVec) -> Result<Option<SparseVec>> {
    if let Some((i, _)) = rhs.entries.last() {
        if *i >= m.rows {
            return Err(Error::DimensionMismatch(format!(
                "rhs touches row {i}, matrix has {}",
                m.rows
            )));
        }
    }
    // augment with the rhs as an extra column
    let mut aug = SparseMatrix::zero(m.rows, m.cols + 1, m.field);
    for r in 0..m.rows {
        aug.row_data[r] = m.row_data[r].clone();
        if let Some(v) = rhs.get(r) {
            aug.row_data[r].entries.push((m.cols, v.clone()));
        }
    }
    let rr = aug.rref();
    let mut x: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (i, &pc) in rr.pivots.iter().enumerate() {
        if pc == m.cols {
            return Ok(None); // pivot in the augmented column: inconsistent
        }
        if let Some(v) = rr.rows[i].get(m.cols) {
            x.insert(pc, v.clone());
        }
    }
    Ok(Some(SparseVec::from_map(x)))
}

/// Shape of a finite module over the truncated polynomial ring k[u]/(u^n).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UModuleReport {
    pub dim: usize,
    pub num_blocks: usize,
    /// `block_multiplicities[s]` = number of Jordan blocks of size `s+1`.
    pub block_multiplicities: Vec<usize>,
    pub free_over_trunc: bool,
}

/// Decomposes the nilpotent action of `u` (with `u^n = 0`) into Jordan
/// blocks and decides flatness (= freeness) over k[u]/(u^n).
pub fn nilpotent_module_structure(u: &SparseMatrix, n: usize) -> Result<UModuleReport> {
    if u.rows != u.cols {
        return Err(Error::DimensionMismatch(format!(
            "nilpotent map must be square, got {}x{}",
            u.rows, u.cols
        )));
    }
    if n == 0 {
        return Err(Error::Invalid("u-order must be positive".into()));
    }
    let dim = u.rows;
    // ranks of u^0 .. u^n; u^n must vanish
    let mut ranks = Vec::with_capacity(n + 1);
    ranks.push(dim);
    let mut power = u.clone();
    for s in 1..=n {
        ranks.push(power.rank());
        if s == n {
            if ranks[n] != 0 {
                return Err(Error::NotNilpotent { n });
            }
            break;
        }
        power = power.mul(u)?;
    }
    // blocks of size >= s: rank u^{s-1} - rank u^s, with rank u^{n+1} = 0
    let rank_at = |s: usize| -> usize {
        if s > n {
            0
        } else {
            ranks[s]
        }
    };
    let at_least = |s: usize| rank_at(s - 1) - rank_at(s);
    let mut mult = Vec::with_capacity(n);
    for s in 1..=n {
        mult.push(at_least(s) - at_least(s + 1));
    }
    let num_blocks = dim - ranks[1];
    let free = dim == n * num_blocks;
    debug_assert_eq!(
        mult.iter().enumerate().map(|(i, m)| (i + 1) * m).sum::<usize>(),
        dim
    );
    Ok(UModuleReport {
        dim,
        num_blocks,
        block_multiplicities: mult,
        free_over_trunc: free,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn qm(rows: usize, cols: usize, entries: &[(usize, usize, i64)]) -> SparseMatrix {
        SparseMatrix::from_triples(
            rows,
            cols,
            q(),
            entries.iter().map(|&(r, c, v)| (r, c, q().from_i64(v))),
        )
        .unwrap()
    }

    #[test]
    fn empty_matrix() {
        let m = SparseMatrix::zero(0, 0, q());
        let (rank, kernel) = rank_kernel(&m).unwrap();
        assert_eq!(rank, 0);
        assert!(kernel.is_empty());
    }

    #[test]
    fn identity_has_full_rank() {
        let m = SparseMatrix::identity(2, q());
        let (rank, kernel) = rank_kernel(&m).unwrap();
        assert_eq!(rank, 2);
        assert!(kernel.is_empty());
    }

    #[test]
    fn rank_one_kernel() {
        // [[1,2],[2,4]]: rank 1, kernel spanned by (-2, 1)
        let m = qm(2, 2, &[(0, 0, 1), (0, 1, 2), (1, 0, 2), (1, 1, 4)]);
        let (rank, kernel) = rank_kernel(&m).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(kernel.len(), 1);
        assert_eq!(kernel[0].get(0), Some(&q().from_i64(-2)));
        assert_eq!(kernel[0].get(1), Some(&q().from_i64(1)));
        // kernel vectors are killed exactly
        assert!(m.mul_vec(&kernel[0]).is_zero());
    }

    #[test]
    fn solve_identity() {
        let m = SparseMatrix::identity(2, q());
        let rhs = SparseVec::from_map([(0, q().from_i64(3)), (1, q().from_i64(5))].into());
        let x = solve(&m, &rhs).unwrap().unwrap();
        assert_eq!(x, rhs);
    }

    #[test]
    fn solve_underdetermined_frees_zeroed() {
        let m = qm(1, 2, &[(0, 0, 1), (0, 1, 1)]);
        let rhs = SparseVec::singleton(0, q().from_i64(2));
        let x = solve(&m, &rhs).unwrap().unwrap();
        assert_eq!(x.get(0), Some(&q().from_i64(2)));
        assert_eq!(x.get(1), None);
    }

    #[test]
    fn solve_inconsistent() {
        let m = qm(2, 1, &[(0, 0, 1), (1, 0, 1)]);
        let rhs = SparseVec::from_map([(0, q().from_i64(1)), (1, q().from_i64(2))].into());
        assert_eq!(solve(&m, &rhs).unwrap(), None);
    }

    #[test]
    fn u_zero_order_one() {
        let u = SparseMatrix::zero(2, 2, q());
        let rep = nilpotent_module_structure(&u, 1).unwrap();
        assert_eq!(rep.dim, 2);
        assert_eq!(rep.num_blocks, 2);
        assert_eq!(rep.block_multiplicities, vec![2]);
        assert!(rep.free_over_trunc);
    }

    #[test]
    fn jordan_block_regular() {
        let u = qm(2, 2, &[(0, 1, 1)]);
        let rep = nilpotent_module_structure(&u, 2).unwrap();
        assert_eq!(rep.dim, 2);
        assert_eq!(rep.num_blocks, 1);
        assert_eq!(rep.block_multiplicities, vec![0, 1]);
        assert!(rep.free_over_trunc);
    }

    #[test]
    fn skyscraper_not_flat() {
        let u = SparseMatrix::zero(1, 1, q());
        let rep = nilpotent_module_structure(&u, 2).unwrap();
        assert_eq!(rep.dim, 1);
        assert_eq!(rep.num_blocks, 1);
        assert_eq!(rep.block_multiplicities, vec![1, 0]);
        assert!(!rep.free_over_trunc);
    }

    #[test]
    fn non_nilpotent_rejected() {
        let u = SparseMatrix::identity(2, q());
        assert!(matches!(
            nilpotent_module_structure(&u, 2),
            Err(Error::NotNilpotent { .. })
        ));
    }

    #[test]
    fn mixed_field_rejected() {
        let mut m = SparseMatrix::zero(1, 1, q());
        m.row_data[0] = SparseVec::singleton(0, FieldSpec::prime(5).unwrap().one());
        assert!(rank_kernel(&m).is_err());
    }
}

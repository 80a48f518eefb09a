//! Finite matrix presentations of one degree window of a (truncated)
//! complex, with per-degree exactness flags and homology.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::linalg::{rank_kernel, SparseMatrix};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    /// no basis element beyond the truncation can touch this degree
    Exact,
    /// truncation may hide contributions; the number is window/L-relative
    Truncated,
}

#[derive(Debug, Clone)]
pub struct BasisTag {
    pub label: String,
    /// tensor length of the underlying word, for truncation bookkeeping
    pub length: usize,
}

/// One cohomological-degree window of a complex, as explicit matrices
/// `d : C^d -> C^{d+1}`.
#[derive(Debug, Clone)]
pub struct ComplexSlice {
    pub field: FieldSpec,
    pub window: (i64, i64),
    pub basis: BTreeMap<i64, Vec<BasisTag>>,
    pub diff: BTreeMap<i64, SparseMatrix>,
    pub flags: BTreeMap<i64, Exactness>,
    /// degrees outside the window that held basis elements; homology next to
    /// them is window-limited
    pub clipped: std::collections::BTreeSet<i64>,
}

impl ComplexSlice {
    pub fn dim(&self, degree: i64) -> usize {
        self.basis.get(&degree).map(|b| b.len()).unwrap_or(0)
    }

    /// `d . d = 0` for every composable pair inside the window.
    pub fn check_d_squared(&self) -> Result<()> {
        for (&d, m) in &self.diff {
            if let Some(next) = self.diff.get(&(d + 1)) {
                if m.rows != next.cols {
                    return Err(Error::DimensionMismatch(format!(
                        "slice degree {d}: {}x{} then {}x{}",
                        m.rows, m.cols, next.rows, next.cols
                    )));
                }
                let sq = next.mul(m)?;
                if !sq.is_zero() {
                    return Err(Error::Invalid(format!(
                        "differential does not square to zero at degree {d}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Homology dimensions per degree. The first and last window degrees
    /// are reported as truncated since one of the two neighbouring
    /// differentials is missing.
    pub fn homology(&self) -> Result<Vec<HomologyEntry>> {
        let degrees: Vec<i64> = self.basis.keys().copied().collect();
        let results: Vec<Result<HomologyEntry>> = degrees
            .par_iter()
            .map(|&d| {
                let n = self.dim(d);
                let out_rank_kernel = match self.diff.get(&d) {
                    Some(m) => {
                        let (r, _) = rank_kernel(m)?;
                        (r, n - r)
                    }
                    None => (0, n),
                };
                let in_rank = match self.diff.get(&(d - 1)) {
                    Some(m) => m.rank(),
                    None => 0,
                };
                let boundary_missing = self.clipped.contains(&(d - 1));
                let outgoing_missing = self.clipped.contains(&(d + 1));
                let mut flag = *self.flags.get(&d).unwrap_or(&Exactness::Truncated);
                if boundary_missing || outgoing_missing {
                    flag = Exactness::Truncated;
                }
                Ok(HomologyEntry {
                    degree: d,
                    dim: out_rank_kernel.1 - in_rank,
                    flag,
                })
            })
            .collect();
        results.into_iter().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomologyEntry {
    pub degree: i64,
    pub dim: usize,
    pub flag: Exactness,
}

/// Generic slice assembly from an item enumeration and a differential rule.
///
/// `items` lists the slice basis (any orderable key); `apply` produces the
/// differential of one item. Outputs that fall outside the stored basis are
/// an error unless `quotient` is set, in which case they are projected away
/// (used for arity-raising differentials truncated as quotient complexes).
pub struct SliceBuilder<T: Ord + Clone> {
    pub field: FieldSpec,
    pub window: (i64, i64),
    pub quotient: bool,
    items: BTreeMap<T, (i64, usize, BasisTag)>,
    per_degree: BTreeMap<i64, Vec<T>>,
}

impl<T: Ord + Clone + std::fmt::Debug + Send + Sync> SliceBuilder<T> {
    pub fn new(
        field: FieldSpec,
        window: (i64, i64),
        quotient: bool,
        items: Vec<(T, i64, BasisTag)>,
    ) -> Result<Self> {
        if window.0 > window.1 {
            return Err(Error::WindowEmpty);
        }
        let mut per_degree: BTreeMap<i64, Vec<T>> = BTreeMap::new();
        let mut map = BTreeMap::new();
        for (key, deg, tag) in items {
            if deg < window.0 || deg > window.1 {
                continue;
            }
            let list = per_degree.entry(deg).or_default();
            let pos = list.len();
            list.push(key.clone());
            if map.insert(key, (deg, pos, tag)).is_some() {
                return Err(Error::Invalid("duplicate slice basis item".into()));
            }
        }
        Ok(SliceBuilder {
            field,
            window,
            quotient,
            items: map,
            per_degree,
        })
    }

    pub fn items_of_degree(&self, d: i64) -> &[T] {
        self.per_degree.get(&d).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn position(&self, key: &T) -> Option<(i64, usize)> {
        self.items.get(key).map(|(d, p, _)| (*d, *p))
    }

    pub fn build(
        self,
        apply: impl Fn(&T) -> Vec<(T, Scalar)> + Sync,
        flags: impl Fn(i64) -> Exactness,
    ) -> Result<ComplexSlice> {
        let mut basis = BTreeMap::new();
        for (&d, list) in &self.per_degree {
            basis.insert(
                d,
                list.iter()
                    .map(|k| self.items[k].2.clone())
                    .collect::<Vec<_>>(),
            );
        }
        let mut diff = BTreeMap::new();
        for (&d, list) in &self.per_degree {
            let rows = self
                .per_degree
                .get(&(d + 1))
                .map(|v| v.len())
                .unwrap_or(0);
            let columns: Vec<Vec<(usize, usize, Scalar)>> = list
                .par_iter()
                .enumerate()
                .map(|(col, key)| {
                    let mut entries = Vec::new();
                    for (out, c) in apply(key) {
                        match self.items.get(&out) {
                            Some((dd, row, _)) => {
                                debug_assert_eq!(*dd, d + 1, "differential must have degree +1");
                                entries.push((*row, col, c));
                            }
                            None => {
                                if !self.quotient {
                                    panic!(
                                        "differential leaves the slice at degree {d} (item {:?})",
                                        out
                                    );
                                }
                            }
                        }
                    }
                    entries
                })
                .collect();
            let m = SparseMatrix::from_triples(
                rows,
                list.len(),
                self.field,
                columns.into_iter().flatten(),
            )?;
            diff.insert(d, m);
        }
        let mut flag_map = BTreeMap::new();
        for &d in self.per_degree.keys() {
            flag_map.insert(d, flags(d));
        }
        // degrees in window with no basis at all still get a flag so empty
        // windows read as exact zeros where appropriate
        for d in self.window.0..=self.window.1 {
            flag_map.entry(d).or_insert_with(|| flags(d));
            basis.entry(d).or_default();
        }
        Ok(ComplexSlice {
            field: self.field,
            window: self.window,
            basis,
            diff,
            flags: flag_map,
        })
    }
}

/// Decides whether any word of length `> max_len` can land in degree `d`
/// (or a neighbour), given that a length-`n` item has degree in
/// `[base_min + n*letter_min, base_max + n*letter_max]`.
///
/// Used to mark degrees as exact: if no longer word reaches `d-1..=d+1`,
/// enlarging the truncation cannot change the homology at `d`.
pub fn reachable_beyond(
    max_len: usize,
    base: Option<(i64, i64)>,
    letter: Option<(i64, i64)>,
    d: i64,
) -> bool {
    let Some((base_min, base_max)) = base else {
        return false; // no marked part at all means no items
    };
    let Some((letter_min, letter_max)) = letter else {
        return false; // no letters: only bounded lengths exist
    };
    for probe in [d - 1, d, d + 1] {
        // exists n > max_len with base_min + n*letter_min <= probe and
        // probe <= base_max + n*letter_max
        let a = probe - base_min; // need n*letter_min <= a
        let b = probe - base_max; // need n*letter_max >= b
        // each constraint bounds n from one side; intersect with n > max_len
        let mut lo: i128 = max_len as i128 + 1;
        let mut hi: i128 = i128::MAX;
        let mut infeasible = false;
        match letter_min.cmp(&0) {
            std::cmp::Ordering::Greater => hi = hi.min(div_floor(a as i128, letter_min as i128)),
            std::cmp::Ordering::Equal => infeasible |= a < 0,
            std::cmp::Ordering::Less => lo = lo.max(div_ceil(a as i128, letter_min as i128)),
        }
        match letter_max.cmp(&0) {
            std::cmp::Ordering::Greater => lo = lo.max(div_ceil(b as i128, letter_max as i128)),
            std::cmp::Ordering::Equal => infeasible |= b > 0,
            std::cmp::Ordering::Less => hi = hi.min(div_floor(b as i128, letter_max as i128)),
        }
        if !infeasible && lo <= hi {
            return true;
        }
    }
    false
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

/// Degree range of the letters of a space, `None` when empty.
pub fn degree_range(space: &crate::graded::GradedSpace) -> Option<(i64, i64)> {
    let mut it = space.iter().map(|(_, _, d)| d);
    let first = it.next()?;
    let mut lo = first;
    let mut hi = first;
    for d in it {
        lo = lo.min(d);
        hi = hi.max(d);
    }
    Some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reachability_degree_zero_algebra() {
        // letters of degree -1, marked part degree 0: a length-n word has
        // degree exactly -n, so degrees > -(L+1)+1 are safe
        assert!(!reachable_beyond(6, Some((0, 0)), Some((-1, -1)), -5));
        assert!(reachable_beyond(6, Some((0, 0)), Some((-1, -1)), -6));
        assert!(reachable_beyond(6, Some((0, 0)), Some((-1, -1)), -9));
    }

    #[test]
    fn reachability_mixed_letters() {
        // letters of degrees -1 and 0: long words reach every degree <= 0,
        // so every degree below 2 is contaminated
        assert!(reachable_beyond(6, Some((0, 0)), Some((-1, 0)), 0));
        assert!(reachable_beyond(6, Some((0, 0)), Some((-1, 0)), 1));
        assert!(!reachable_beyond(6, Some((0, 0)), Some((-1, 0)), 2));
    }

    #[test]
    fn reachability_empty_space() {
        assert!(!reachable_beyond(6, None, Some((-1, -1)), 0));
        assert!(!reachable_beyond(6, Some((0, 0)), None, 0));
    }
}

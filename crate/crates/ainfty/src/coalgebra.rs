//! Truncated tensor coalgebras, coderivations, quiver coalgebras and the
//! finite subcoalgebra closure.
//!
//! All statements about `T(V)` are made on the finite truncation by word
//! length `L` and reported as such. Coderivations never increase word length,
//! so words of length `<= L` form an invariant subspace.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::graded::{pass_sign, scalar_sign, GradedSpace, MultilinearMap};
use crate::linalg::{rank_kernel, SparseMatrix, SparseVec};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A formal linear combination of tensor words.
pub type WordSum = BTreeMap<Vec<u32>, Scalar>;

pub fn word_sum_add(acc: &mut WordSum, word: Vec<u32>, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&word) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                acc.remove(&word);
            }
        }
        None => {
            acc.insert(word, c);
        }
    }
}

/// The tensor coalgebra `T(W)` truncated at word length `L`, with the
/// deconcatenation coproduct. In counital mode the empty word is a basis
/// element; the non-counital mode `T_+` keeps lengths `1..=L` and drops the
/// splittings with an empty side.
#[derive(Debug, Clone)]
pub struct TensorCoalgebra {
    pub space: Arc<GradedSpace>,
    pub max_len: usize,
    pub counital: bool,
    words: Vec<Vec<u32>>,
    index: BTreeMap<Vec<u32>, usize>,
}

impl TensorCoalgebra {
    pub fn new(space: Arc<GradedSpace>, max_len: usize, counital: bool) -> Self {
        let mut words = Vec::new();
        let min_len = if counital { 0 } else { 1 };
        for len in min_len..=max_len {
            enumerate_words(space.dim(), len, &mut words);
        }
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        TensorCoalgebra {
            space,
            max_len,
            counital,
            words,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn word(&self, i: usize) -> &[u32] {
        &self.words[i]
    }

    pub fn words(&self) -> &[Vec<u32>] {
        &self.words
    }

    pub fn index_of(&self, word: &[u32]) -> Option<usize> {
        self.index.get(word).copied()
    }

    /// All deconcatenations of a word. Splits with an empty side appear only
    /// in counital mode.
    pub fn coproduct(&self, word: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
        let n = word.len();
        let range = if self.counital { 0..=n } else { 1..=n.saturating_sub(1) };
        let mut out = Vec::new();
        for i in range {
            if !self.counital && (i == 0 || i == n) {
                continue;
            }
            out.push((word[..i].to_vec(), word[i..].to_vec()));
        }
        out
    }

    pub fn word_degree(&self, word: &[u32]) -> i64 {
        self.space.word_degree(word)
    }
}

/// Enumerates all length-`len` words over `dim` letters in lexicographic
/// order, appending to `out`.
pub fn enumerate_words_pub(dim: usize, len: usize, out: &mut Vec<Vec<u32>>) {
    enumerate_words(dim, len, out)
}

fn enumerate_words(dim: usize, len: usize, out: &mut Vec<Vec<u32>>) {
    if len == 0 {
        out.push(Vec::new());
        return;
    }
    if dim == 0 {
        return;
    }
    let mut word = vec![0u32; len];
    loop {
        out.push(word.clone());
        // lexicographic increment
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if (word[pos] as usize) + 1 < dim {
                word[pos] += 1;
                for w in word.iter_mut().skip(pos + 1) {
                    *w = 0;
                }
                break;
            }
        }
    }
}

/// A coderivation of `T_+(W)` given by its Taylor coefficients
/// `b_n : W^{(x)n} -> W`.
#[derive(Debug, Clone)]
pub struct Coderivation {
    pub space: Arc<GradedSpace>,
    pub field: FieldSpec,
    /// `taylor[n-1]` is the arity-`n` coefficient; missing arities are zero.
    pub taylor: Vec<MultilinearMap>,
}

impl Coderivation {
    /// Builds the coderivation with the given Taylor coefficients. An
    /// arity-0 component would move the marked point and is rejected.
    pub fn extend(
        space: Arc<GradedSpace>,
        field: FieldSpec,
        taylor: Vec<MultilinearMap>,
    ) -> Result<Self> {
        for t in &taylor {
            if t.arity() == 0 {
                return Err(Error::MarkedPoint);
            }
            if *t.target != *space || t.sources.iter().any(|s| **s != *space) {
                return Err(Error::SpaceMismatch(
                    "Taylor coefficient on the wrong space".into(),
                ));
            }
        }
        let mut by_arity: Vec<MultilinearMap> = Vec::new();
        for t in taylor {
            let n = t.arity();
            while by_arity.len() < n {
                let k = by_arity.len() + 1;
                by_arity.push(MultilinearMap::uniform(
                    space.clone(),
                    k,
                    space.clone(),
                    t.internal_degree,
                    field,
                ));
            }
            by_arity[n - 1].add(&t)?;
        }
        Ok(Coderivation {
            space,
            field,
            taylor: by_arity,
        })
    }

    pub fn coefficient(&self, arity: usize) -> Option<&MultilinearMap> {
        self.taylor.get(arity.wrapping_sub(1))
    }

    pub fn max_arity(&self) -> usize {
        self.taylor.len()
    }

    /// Applies the induced endomorphism of `T(W)` to one word:
    /// `Q(w_1..w_N) = sum_{r,s} +- (w_1..w_r, b_s(w_{r+1}..w_{r+s}), ..)`,
    /// the sign being the Koszul cost of moving `b_s` past the prefix.
    pub fn apply_word(&self, word: &[u32]) -> WordSum {
        let mut out = WordSum::new();
        self.apply_word_into(word, &self.field.one(), &mut out);
        out
    }

    pub fn apply_word_into(&self, word: &[u32], coeff: &Scalar, out: &mut WordSum) {
        let n = word.len();
        for s in 1..=self.taylor.len().min(n) {
            let b = &self.taylor[s - 1];
            if b.is_zero() {
                continue;
            }
            for r in 0..=(n - s) {
                let prefix_deg = self.space.word_degree(&word[..r]);
                let sign = pass_sign(b.internal_degree, prefix_deg);
                if let Some(val) = b.eval(&word[r..r + s]) {
                    for (i, c) in val.iter() {
                        let mut w = Vec::with_capacity(n - s + 1);
                        w.extend_from_slice(&word[..r]);
                        w.push(i as u32);
                        w.extend_from_slice(&word[r + s..]);
                        let total = &(c * coeff) * &scalar_sign(self.field, sign);
                        word_sum_add(out, w, total);
                    }
                }
            }
        }
    }

    pub fn apply_sum(&self, ws: &WordSum) -> WordSum {
        let mut out = WordSum::new();
        for (w, c) in ws {
            self.apply_word_into(w, c, &mut out);
        }
        out
    }

    /// Matrix of the coderivation on the truncation `T_{<=L}(W)`.
    pub fn matrix(&self, coalg: &TensorCoalgebra) -> SparseMatrix {
        let mut triples = Vec::new();
        for (j, w) in coalg.words().iter().enumerate() {
            for (w2, c) in self.apply_word(w) {
                let i = coalg
                    .index_of(&w2)
                    .expect("coderivation does not increase length");
                triples.push((i, j, c));
            }
        }
        SparseMatrix::from_triples(coalg.dim(), coalg.dim(), self.field, triples)
            .expect("consistent field")
    }

    /// Taylor coefficients of `Q . Q` up to arity `max_arity`; all zero iff
    /// the quadratic relations hold up to that arity.
    pub fn square_taylor(&self, max_arity: usize) -> Vec<MultilinearMap> {
        let mut out = Vec::new();
        for n in 1..=max_arity {
            let mut coeff = MultilinearMap::uniform(
                self.space.clone(),
                n,
                self.space.clone(),
                2,
                self.field,
            );
            let mut words = Vec::new();
            enumerate_words(self.space.dim(), n, &mut words);
            for w in words {
                let once = self.apply_word(&w);
                let twice = self.apply_sum(&once);
                let mut val: BTreeMap<usize, Scalar> = BTreeMap::new();
                for (w2, c) in twice {
                    if w2.len() == 1 {
                        val.insert(w2[0] as usize, c);
                    }
                }
                coeff
                    .add_entry(&w, SparseVec::from_map(val))
                    .expect("degree rule for Q^2");
            }
            out.push(coeff);
        }
        out
    }

    /// Checks `Delta . Q = (Q (x) id + id (x) Q) . Delta` on every word of
    /// the truncation.
    pub fn is_coderivation_on(&self, coalg: &TensorCoalgebra) -> bool {
        for w in coalg.words() {
            // left side: coproduct of Q(w)
            let mut lhs: BTreeMap<(Vec<u32>, Vec<u32>), Scalar> = BTreeMap::new();
            for (qw, c) in self.apply_word(w) {
                for (a, b) in coalg.coproduct(&qw) {
                    add_pair(&mut lhs, (a, b), c.clone());
                }
            }
            // right side: Q acting on either tensor factor, with the Koszul
            // sign on the second
            let mut rhs: BTreeMap<(Vec<u32>, Vec<u32>), Scalar> = BTreeMap::new();
            for (a, b) in coalg.coproduct(w) {
                for (qa, c) in self.apply_word(&a) {
                    add_pair(&mut rhs, (qa, b.clone()), c);
                }
                let sign = pass_sign(1, self.space.word_degree(&a));
                for (qb, c) in self.apply_word(&b) {
                    add_pair(
                        &mut rhs,
                        (a.clone(), qb),
                        &c * &scalar_sign(self.field, sign),
                    );
                }
            }
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

fn add_pair(
    acc: &mut BTreeMap<(Vec<u32>, Vec<u32>), Scalar>,
    key: (Vec<u32>, Vec<u32>),
    c: Scalar,
) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&key) {
        Some(v) => {
            *v += &c;
            if v.is_zero() {
                acc.remove(&key);
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

/// A quiver with graded arrow spaces; its coalgebra of paths.
#[derive(Debug, Clone)]
pub struct QuiverCoalgebra {
    pub vertices: Vec<String>,
    /// arrows as `(name, source vertex, target vertex, degree)`
    pub arrows: Vec<(String, usize, usize, i64)>,
    pub max_len: usize,
    /// basis: trivial paths first, then composable paths by length
    paths: Vec<QuiverPath>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum QuiverPath {
    Trivial(usize),
    Arrows(Vec<usize>),
}

impl QuiverCoalgebra {
    pub fn new(
        vertices: Vec<String>,
        arrows: Vec<(String, usize, usize, i64)>,
        max_len: usize,
    ) -> Self {
        let mut paths: Vec<QuiverPath> = (0..vertices.len()).map(QuiverPath::Trivial).collect();
        let mut frontier: Vec<Vec<usize>> = (0..arrows.len()).map(|a| vec![a]).collect();
        for _len in 1..=max_len {
            let mut next = Vec::new();
            for p in &frontier {
                paths.push(QuiverPath::Arrows(p.clone()));
                let last = p[p.len() - 1];
                for (a, arr) in arrows.iter().enumerate() {
                    if arrows[last].2 == arr.1 {
                        let mut q = p.clone();
                        q.push(a);
                        next.push(q);
                    }
                }
            }
            frontier = next;
        }
        QuiverCoalgebra {
            vertices,
            arrows,
            max_len,
            paths,
        }
    }

    pub fn dim(&self) -> usize {
        self.paths.len()
    }

    pub fn path(&self, i: usize) -> &QuiverPath {
        &self.paths[i]
    }

    pub fn index_of(&self, p: &QuiverPath) -> Option<usize> {
        self.paths.iter().position(|q| q == p)
    }

    pub fn path_name(&self, p: &QuiverPath) -> String {
        match p {
            QuiverPath::Trivial(i) => format!("1_{}", self.vertices[*i]),
            QuiverPath::Arrows(arr) => arr
                .iter()
                .map(|&a| self.arrows[a].0.clone())
                .collect::<Vec<_>>()
                .join("*"),
        }
    }

    pub fn source(&self, p: &QuiverPath) -> usize {
        match p {
            QuiverPath::Trivial(i) => *i,
            QuiverPath::Arrows(a) => self.arrows[a[0]].1,
        }
    }

    pub fn target(&self, p: &QuiverPath) -> usize {
        match p {
            QuiverPath::Trivial(i) => *i,
            QuiverPath::Arrows(a) => self.arrows[a[a.len() - 1]].2,
        }
    }

    /// All `n+1` splittings of a path, including the trivial-path flanks.
    pub fn coproduct(&self, p: &QuiverPath) -> Result<Vec<(QuiverPath, QuiverPath)>> {
        match p {
            QuiverPath::Trivial(i) => Ok(vec![(QuiverPath::Trivial(*i), QuiverPath::Trivial(*i))]),
            QuiverPath::Arrows(arr) => {
                for win in arr.windows(2) {
                    if self.arrows[win[0]].2 != self.arrows[win[1]].1 {
                        return Err(Error::NonComposable(format!(
                            "{} then {}",
                            self.arrows[win[0]].0, self.arrows[win[1]].0
                        )));
                    }
                }
                let n = arr.len();
                let mut out = Vec::with_capacity(n + 1);
                for m in 0..=n {
                    let left = if m == 0 {
                        QuiverPath::Trivial(self.arrows[arr[0]].1)
                    } else {
                        QuiverPath::Arrows(arr[..m].to_vec())
                    };
                    let right = if m == n {
                        QuiverPath::Trivial(self.arrows[arr[n - 1]].2)
                    } else {
                        QuiverPath::Arrows(arr[m..].to_vec())
                    };
                    out.push((left, right));
                }
                Ok(out)
            }
        }
    }

    /// Counit: 1 on trivial paths, 0 on longer ones.
    pub fn counit(&self, p: &QuiverPath) -> bool {
        matches!(p, QuiverPath::Trivial(_))
    }
}

/// A finite coalgebra presented by structure constants, the common interface
/// for the closure algorithm.
#[derive(Debug, Clone)]
pub struct FiniteCoalgebra {
    pub field: FieldSpec,
    pub names: Vec<String>,
    /// `delta[k]` lists `(i, j, c)` with `Delta(e_k) = sum c e_i (x) e_j`.
    pub delta: Vec<Vec<(usize, usize, Scalar)>>,
}

impl FiniteCoalgebra {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn from_tensor(coalg: &TensorCoalgebra, field: FieldSpec) -> Self {
        let names = coalg
            .words()
            .iter()
            .map(|w| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    w.iter()
                        .map(|&i| coalg.space.name(i as usize).to_string())
                        .collect::<Vec<_>>()
                        .join("*")
                }
            })
            .collect();
        let delta = coalg
            .words()
            .iter()
            .map(|w| {
                coalg
                    .coproduct(w)
                    .into_iter()
                    .filter_map(|(a, b)| {
                        let ia = coalg.index_of(&a)?;
                        let ib = coalg.index_of(&b)?;
                        Some((ia, ib, field.one()))
                    })
                    .collect()
            })
            .collect();
        FiniteCoalgebra {
            field,
            names,
            delta,
        }
    }

    pub fn from_quiver(q: &QuiverCoalgebra, field: FieldSpec) -> Self {
        let names = (0..q.dim()).map(|i| q.path_name(q.path(i))).collect();
        let delta = (0..q.dim())
            .map(|i| {
                q.coproduct(q.path(i))
                    .expect("stored paths are composable")
                    .into_iter()
                    .map(|(a, b)| {
                        (
                            q.index_of(&a).expect("split stays in basis"),
                            q.index_of(&b).expect("split stays in basis"),
                            field.one(),
                        )
                    })
                    .collect()
            })
            .collect();
        FiniteCoalgebra {
            field,
            names,
            delta,
        }
    }

    /// Coproduct of a vector, as a `dim x dim` matrix `M` with
    /// `Delta(x) = sum M[i][j] e_i (x) e_j`.
    pub fn coproduct_matrix(&self, x: &SparseVec) -> SparseMatrix {
        let mut triples = Vec::new();
        for (k, c) in x.iter() {
            for (i, j, d) in &self.delta[k] {
                triples.push((*i, *j, c * d));
            }
        }
        SparseMatrix::from_triples(self.dim(), self.dim(), self.field, triples).expect("field ok")
    }

    /// Coassociativity on every basis element.
    pub fn is_coassociative(&self) -> bool {
        let dim = self.dim();
        for k in 0..dim {
            let mut lhs: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
            let mut rhs: BTreeMap<(usize, usize, usize), Scalar> = BTreeMap::new();
            for (i, j, c) in &self.delta[k] {
                for (a, b, d) in &self.delta[*i] {
                    let key = (*a, *b, *j);
                    let v = c * d;
                    lhs.entry(key)
                        .and_modify(|x| *x += &v)
                        .or_insert_with(|| v.clone());
                }
                for (a, b, d) in &self.delta[*j] {
                    let key = (*i, *a, *b);
                    let v = c * d;
                    rhs.entry(key)
                        .and_modify(|x| *x += &v)
                        .or_insert_with(|| v.clone());
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                return false;
            }
        }
        true
    }
}

/// The finite-dimensional subcoalgebra generated by `x`: the span of
/// `x`, the `a_i`, `b_i` with `Delta(x) = sum a_i (x) b_i` (a rank
/// factorization), and the `c_ij` with `Delta(a_i) = sum a_j (x) c_ij`.
/// Returns a reduced-echelon basis of that span.
pub fn subcoalgebra_closure(coalg: &FiniteCoalgebra, x: &SparseVec) -> Result<Vec<SparseVec>> {
    let dim = coalg.dim();
    let field = coalg.field;
    let m = coalg.coproduct_matrix(x);
    let rref = m.rref();
    // rank factorization M = A B: B = nonzero rows of rref(M); the columns
    // of A are the pivot columns of M itself
    let b_vecs: Vec<SparseVec> = rref.rows.clone();
    let mt = m.transpose();
    let a_vecs: Vec<SparseVec> = rref.pivots.iter().map(|&c| mt.row(c).clone()).collect();
    // c_ij: solve A . y = column of Delta(a_i) for each i and each column
    let a_mat = {
        let mut triples = Vec::new();
        for (k, a) in a_vecs.iter().enumerate() {
            for (r, v) in a.iter() {
                triples.push((r, k, v.clone()));
            }
        }
        SparseMatrix::from_triples(dim, a_vecs.len(), field, triples)?
    };
    let mut c_vecs: Vec<SparseVec> = Vec::new();
    for a in &a_vecs {
        let n = coalg.coproduct_matrix(a);
        // y_col solves A y = N[:, col]; row k of the solutions, gathered over
        // col, is c_{i k}
        let mut c_rows: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); a_vecs.len()];
        let nt = n.transpose();
        for col in 0..dim {
            let rhs = nt.row(col).clone();
            if rhs.is_zero() {
                continue;
            }
            let y = crate::linalg::solve(&a_mat, &rhs)?.ok_or_else(|| {
                Error::Inconsistent("coproduct not expressible in the a_i (not coassociative?)".into())
            })?;
            for (k, v) in y.iter() {
                c_rows[k].insert(col, v.clone());
            }
        }
        for r in c_rows {
            c_vecs.push(SparseVec::from_map(r));
        }
    }
    // assemble the span and reduce to a canonical echelon basis
    let mut all = vec![x.clone()];
    all.extend(a_vecs);
    all.extend(b_vecs);
    all.extend(c_vecs);
    let span = {
        let mut triples = Vec::new();
        for (r, v) in all.iter().enumerate() {
            for (c, s) in v.iter() {
                triples.push((r, c, s.clone()));
            }
        }
        SparseMatrix::from_triples(all.len(), dim, field, triples)?
    };
    let basis = span.rref().rows;
    debug_assert!(is_subcoalgebra(coalg, &basis));
    Ok(basis)
}

/// Membership check `Delta(S) (subset) S (x) S`.
pub fn is_subcoalgebra(coalg: &FiniteCoalgebra, basis: &[SparseVec]) -> bool {
    let dim = coalg.dim();
    let field = coalg.field;
    let span = {
        let mut triples = Vec::new();
        for (r, v) in basis.iter().enumerate() {
            for (c, s) in v.iter() {
                triples.push((r, c, s.clone()));
            }
        }
        SparseMatrix::from_triples(basis.len(), dim, field, triples).expect("field ok")
    };
    let base_rank = span.rank();
    for v in basis {
        let m = coalg.coproduct_matrix(v);
        // rows of m must lie in span(basis), and columns likewise
        for probe in [m.clone(), m.transpose()] {
            let mut triples = Vec::new();
            for (r, row) in (0..span.rows).map(|r| (r, span.row(r))) {
                for (c, s) in row.iter() {
                    triples.push((r, c, s.clone()));
                }
            }
            let mut extra = span.rows;
            for r in 0..probe.rows {
                let row = probe.row(r);
                if row.is_zero() {
                    continue;
                }
                for (c, s) in row.iter() {
                    triples.push((extra, c, s.clone()));
                }
                extra += 1;
            }
            let stacked =
                SparseMatrix::from_triples(extra, dim, field, triples).expect("field ok");
            if stacked.rank() != base_rank {
                return false;
            }
        }
    }
    true
}

/// Rank of the span of a list of vectors, a convenience used by callers that
/// need dimension counts of subspaces.
pub fn span_rank(dim: usize, field: FieldSpec, vecs: &[SparseVec]) -> usize {
    let mut triples = Vec::new();
    for (r, v) in vecs.iter().enumerate() {
        for (c, s) in v.iter() {
            triples.push((r, c, s.clone()));
        }
    }
    SparseMatrix::from_triples(vecs.len(), dim, field, triples)
        .map(|m| rank_kernel(&m).map(|(r, _)| r).unwrap_or(0))
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Grading;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn contr_space() -> Arc<GradedSpace> {
        // shifted CONTR: m1(x) = y with |x| = 0, |y| = 1 downstairs
        GradedSpace::new(Grading::Z, vec![("x".into(), -1), ("y".into(), 0)]).unwrap()
    }

    #[test]
    fn leibniz_on_two_letters() {
        let w = contr_space();
        let mut b1 = MultilinearMap::uniform(w.clone(), 1, w.clone(), 1, q());
        b1.add_entry(&[0], SparseVec::singleton(1, q().one())).unwrap();
        let cod = Coderivation::extend(w.clone(), q(), vec![b1]).unwrap();
        let out = cod.apply_word(&[0, 0]);
        // Q(x (x) x) = y (x) x + (-1)^{|x|} x (x) y = y (x) x - x (x) y
        assert_eq!(out.get(&vec![1, 0]), Some(&q().one()));
        assert_eq!(out.get(&vec![0, 1]), Some(&q().from_i64(-1)));
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn zero_taylor_zero_endomorphism() {
        let w = contr_space();
        let cod = Coderivation::extend(w.clone(), q(), vec![]).unwrap();
        assert!(cod.apply_word(&[0, 1, 0]).is_empty());
    }

    #[test]
    fn arity_zero_component_rejected() {
        let w = contr_space();
        let elem = MultilinearMap::zero(vec![], w.clone(), 1, q());
        assert!(matches!(
            Coderivation::extend(w, q(), vec![elem]),
            Err(Error::MarkedPoint)
        ));
    }

    #[test]
    fn coderivation_identity_holds() {
        let w = contr_space();
        let mut b1 = MultilinearMap::uniform(w.clone(), 1, w.clone(), 1, q());
        b1.add_entry(&[0], SparseVec::singleton(1, q().one())).unwrap();
        let cod = Coderivation::extend(w.clone(), q(), vec![b1]).unwrap();
        let coalg = TensorCoalgebra::new(w, 4, false);
        assert!(cod.is_coderivation_on(&coalg));
    }

    #[test]
    fn square_of_differential_vanishes() {
        let w = contr_space();
        let mut b1 = MultilinearMap::uniform(w.clone(), 1, w.clone(), 1, q());
        b1.add_entry(&[0], SparseVec::singleton(1, q().one())).unwrap();
        let cod = Coderivation::extend(w, q(), vec![b1]).unwrap();
        assert!(cod.square_taylor(4).iter().all(|m| m.is_zero()));
    }

    #[test]
    fn coassociativity_of_truncated_tensor_coalgebra() {
        let w = contr_space();
        for counital in [false, true] {
            let coalg = TensorCoalgebra::new(w.clone(), 3, counital);
            let fc = FiniteCoalgebra::from_tensor(&coalg, q());
            assert!(fc.is_coassociative());
        }
    }

    fn qa2_coalgebra() -> QuiverCoalgebra {
        QuiverCoalgebra::new(
            vec!["1".into(), "2".into()],
            vec![("a".into(), 0, 1, 0)],
            3,
        )
    }

    #[test]
    fn quiver_coproduct_examples() {
        let qc = qa2_coalgebra();
        let triv = QuiverPath::Trivial(0);
        assert_eq!(
            qc.coproduct(&triv).unwrap(),
            vec![(QuiverPath::Trivial(0), QuiverPath::Trivial(0))]
        );
        let e12 = QuiverPath::Arrows(vec![0]);
        let split = qc.coproduct(&e12).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(split[0], (QuiverPath::Trivial(0), e12.clone()));
        assert_eq!(split[1], (e12.clone(), QuiverPath::Trivial(1)));
    }

    #[test]
    fn quiver_two_step_path_three_splittings() {
        // two composable arrows a: 1 -> 2, b: 2 -> 3
        let qc = QuiverCoalgebra::new(
            vec!["1".into(), "2".into(), "3".into()],
            vec![("a".into(), 0, 1, 0), ("b".into(), 1, 2, 0)],
            3,
        );
        let ab = QuiverPath::Arrows(vec![0, 1]);
        let split = qc.coproduct(&ab).unwrap();
        assert_eq!(split.len(), 3);
        let fc = FiniteCoalgebra::from_quiver(&qc, q());
        assert!(fc.is_coassociative());
    }

    #[test]
    fn non_composable_rejected() {
        let qc = qa2_coalgebra();
        let bad = QuiverPath::Arrows(vec![0, 0]);
        assert!(qc.coproduct(&bad).is_err());
    }

    #[test]
    fn closure_of_primitive_element() {
        let v = GradedSpace::new(Grading::Z, vec![("x".into(), 0)]).unwrap();
        let coalg = TensorCoalgebra::new(v, 2, true);
        let fc = FiniteCoalgebra::from_tensor(&coalg, q());
        let xi = coalg.index_of(&[0]).unwrap();
        let basis = subcoalgebra_closure(&fc, &SparseVec::singleton(xi, q().one())).unwrap();
        // span {1, x}
        assert_eq!(basis.len(), 2);
        assert!(is_subcoalgebra(&fc, &basis));
    }

    #[test]
    fn closure_of_grouplike() {
        let v = GradedSpace::new(Grading::Z, vec![("x".into(), 0)]).unwrap();
        let coalg = TensorCoalgebra::new(v, 2, true);
        let fc = FiniteCoalgebra::from_tensor(&coalg, q());
        let one = coalg.index_of(&[]).unwrap();
        let basis = subcoalgebra_closure(&fc, &SparseVec::singleton(one, q().one())).unwrap();
        assert_eq!(basis.len(), 1);
    }

    #[test]
    fn closure_of_quiver_arrow() {
        let qc = qa2_coalgebra();
        let fc = FiniteCoalgebra::from_quiver(&qc, q());
        let e12 = fc.names.iter().position(|n| n == "a").unwrap();
        let basis = subcoalgebra_closure(&fc, &SparseVec::singleton(e12, q().one())).unwrap();
        // span {1_1, 1_2, a}
        assert_eq!(basis.len(), 3);
        assert!(is_subcoalgebra(&fc, &basis));
    }
}

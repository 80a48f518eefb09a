//! A-infinity algebras and morphisms: validation, opposites, unit
//! adjunction, cohomology, weak units, composition and minimal models.
//!
//! Operations are stored in the shifted convention: `b_n : W^{(x)n} -> W`
//! with `W = A[1]`, every `b_n` of internal degree `+1`. The translation to
//! the classical `m_n : A^{(x)n} -> A[2-n]` is the decalage conjugation by
//! the shift operator, with all signs produced mechanically.

use crate::coalgebra::{word_sum_add, Coderivation, WordSum};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::graded::{
    conjugate_by_shift, koszul_sign, scalar_sign, GradedSpace, Grading, MultilinearMap,
};
use crate::linalg::{rank_kernel, solve, SparseMatrix, SparseVec};
use std::collections::BTreeMap;
use std::sync::Arc;

/// Shifted operation table built from classical multiplications: for each
/// `m_n` of internal degree `2-n` produce `b_n = s . m_n . (s^{-1})^{(x)n}`.
pub fn b_from_m(m: &MultilinearMap, shifted: Arc<GradedSpace>) -> Result<MultilinearMap> {
    let n = m.arity();
    conjugate_by_shift(
        m,
        &vec![true; n],
        vec![shifted.clone(); n],
        shifted,
        true,
        1,
    )
}

/// Inverse decalage: recovers `m_n` from `b_n`. The inverse of
/// `(s^{-1})^{(x)n}` is `(-1)^{n(n-1)/2} s^{(x)n}`.
pub fn m_from_b(b: &MultilinearMap, unshifted: Arc<GradedSpace>) -> Result<MultilinearMap> {
    let n = b.arity();
    let mut m = conjugate_by_shift(
        b,
        &vec![true; n],
        vec![unshifted.clone(); n],
        unshifted,
        true,
        -1,
    )?;
    let comb = (n * n.saturating_sub(1) / 2) as i64;
    m.scale(&scalar_sign(b.field, if comb % 2 == 0 { 1 } else { -1 }));
    Ok(m)
}

/// A finite-dimensional A-infinity algebra.
#[derive(Debug, Clone)]
pub struct AInftyAlgebra {
    /// underlying space with its own (unshifted) grading
    pub space: Arc<GradedSpace>,
    /// `W = A[1]`, the space the stored operations act on
    pub shifted: Arc<GradedSpace>,
    pub field: FieldSpec,
    /// Taylor coefficients `b_n`, all of internal degree `+1`
    pub ops: Coderivation,
    pub strict_unit: Option<usize>,
    /// word length up to which the relations were last verified
    pub certificate: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationReport {
    pub pass: bool,
    pub checked_arity: usize,
    pub first_failing_arity: Option<usize>,
    pub witness: Option<Vec<String>>,
}

impl AInftyAlgebra {
    /// Builds an algebra from shifted operations. `b_n` must act on
    /// `space[1]` with internal degree `+1`.
    pub fn from_b_ops(
        space: Arc<GradedSpace>,
        field: FieldSpec,
        b_ops: Vec<MultilinearMap>,
        strict_unit: Option<usize>,
    ) -> Result<Self> {
        let shifted = space.shift(1);
        for b in &b_ops {
            if b.internal_degree != 1 {
                return Err(Error::DegreeRule(format!(
                    "b_{} has internal degree {}, expected +1",
                    b.arity(),
                    b.internal_degree
                )));
            }
        }
        let ops = Coderivation::extend(shifted.clone(), field, b_ops)?;
        let alg = AInftyAlgebra {
            space,
            shifted,
            field,
            ops,
            strict_unit,
            certificate: None,
        };
        if let Some(u) = strict_unit {
            alg.verify_strict_unit(u)?;
        }
        Ok(alg)
    }

    /// Builds an algebra from classical multiplications `m_n` (internal
    /// degree `2-n` each).
    pub fn from_m_ops(
        space: Arc<GradedSpace>,
        field: FieldSpec,
        m_ops: Vec<MultilinearMap>,
        strict_unit: Option<usize>,
    ) -> Result<Self> {
        let shifted = space.shift(1);
        let mut b_ops = Vec::with_capacity(m_ops.len());
        for m in m_ops {
            let expect = match space.grading {
                Grading::Z => 2 - m.arity() as i64,
                Grading::Z2 => (2 - m.arity() as i64).rem_euclid(2),
            };
            if m.internal_degree != expect {
                return Err(Error::DegreeRule(format!(
                    "m_{} has internal degree {}, expected {}",
                    m.arity(),
                    m.internal_degree,
                    expect
                )));
            }
            b_ops.push(b_from_m(&m, shifted.clone())?);
        }
        Self::from_b_ops(space, field, b_ops, strict_unit)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn n_max(&self) -> usize {
        self.ops.max_arity()
    }

    pub fn b_op(&self, n: usize) -> Option<&MultilinearMap> {
        self.ops.coefficient(n).filter(|m| !m.is_zero())
    }

    /// Classical multiplication table `m_n` recovered by inverse decalage.
    pub fn m_op(&self, n: usize) -> Result<MultilinearMap> {
        match self.ops.coefficient(n) {
            Some(b) => m_from_b(b, self.space.clone()),
            None => {
                let internal = match self.space.grading {
                    Grading::Z => 2 - n as i64,
                    Grading::Z2 => (2 - n as i64).rem_euclid(2),
                };
                Ok(MultilinearMap::uniform(
                    self.space.clone(),
                    n,
                    self.space.clone(),
                    internal,
                    self.field,
                ))
            }
        }
    }

    /// Marks the algebra as validated up to word length `L`.
    pub fn validated(mut self, max_len: usize) -> Result<Self> {
        let report = check_relations(&self, max_len);
        if !report.pass {
            return Err(Error::Invalid(format!(
                "relations fail at arity {:?}, witness {:?}",
                report.first_failing_arity, report.witness
            )));
        }
        self.certificate = Some(max_len);
        Ok(self)
    }

    fn verify_strict_unit(&self, unit: usize) -> Result<()> {
        if self.space.degree(unit) != 0 {
            return Err(Error::MissingUnit(format!(
                "declared unit {} has degree {}",
                self.space.name(unit),
                self.space.degree(unit)
            )));
        }
        let dim = self.dim();
        for n in 1..=self.n_max() {
            let m = self.m_op(n)?;
            if m.is_zero() {
                continue;
            }
            let mut key = vec![0u32; n];
            loop {
                if key.iter().any(|&i| i as usize == unit) {
                    let val = m.eval_or_zero(&key);
                    let ok = if n == 2 {
                        let other = if key[0] as usize == unit { key[1] } else { key[0] };
                        val == SparseVec::singleton(other as usize, self.field.one())
                    } else {
                        val.is_zero()
                    };
                    if !ok {
                        return Err(Error::MissingUnit(format!(
                            "unit identity fails for m_{} at {:?}",
                            n,
                            key.iter()
                                .map(|&i| self.space.name(i as usize))
                                .collect::<Vec<_>>()
                        )));
                    }
                }
                if !next_key(&mut key, dim) {
                    break;
                }
            }
        }
        Ok(())
    }

    /// The homological vector field as a matrix acting on words of length
    /// `<= max_len` over `W`.
    pub fn coderivation(&self) -> &Coderivation {
        &self.ops
    }
}

fn next_key(key: &mut [u32], dim: usize) -> bool {
    let mut pos = key.len();
    loop {
        if pos == 0 {
            return false;
        }
        pos -= 1;
        if (key[pos] as usize) + 1 < dim {
            key[pos] += 1;
            for k in key.iter_mut().skip(pos + 1) {
                *k = 0;
            }
            return true;
        }
    }
}

/// Checks the quadratic relations up to arity `max_len` through the
/// coderivation square.
pub fn check_relations(alg: &AInftyAlgebra, max_len: usize) -> RelationReport {
    for (idx, coeff) in alg.ops.square_taylor(max_len).iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let arity = idx + 1;
        let witness = coeff
            .entries()
            .find(|(_, v)| !v.is_zero())
            .map(|(k, _)| {
                k.iter()
                    .map(|&i| alg.space.name(i as usize).to_string())
                    .collect()
            });
        return RelationReport {
            pass: false,
            checked_arity: max_len,
            first_failing_arity: Some(arity),
            witness,
        };
    }
    RelationReport {
        pass: true,
        checked_arity: max_len,
        first_failing_arity: None,
        witness: None,
    }
}

/// The same relations expanded directly as
/// `sum_{r+s+t=n} b_{r+1+t} (id^r (x) b_s (x) id^t)`; an independent second
/// route used to cross-check the coderivation machinery.
pub fn direct_relation_defect(alg: &AInftyAlgebra, arity: usize) -> Result<MultilinearMap> {
    let mut total = MultilinearMap::uniform(
        alg.shifted.clone(),
        arity,
        alg.shifted.clone(),
        2,
        alg.field,
    );
    for s in 1..=arity.min(alg.n_max()) {
        let Some(inner) = alg.ops.coefficient(s) else {
            continue;
        };
        if inner.is_zero() {
            continue;
        }
        let outer_arity = arity - s + 1;
        if outer_arity > alg.n_max() {
            continue;
        }
        let Some(outer) = alg.ops.coefficient(outer_arity) else {
            continue;
        };
        if outer.is_zero() {
            continue;
        }
        for r in 0..outer_arity {
            total.add(&outer.compose_at(r, inner)?)?;
        }
    }
    Ok(total)
}

/// The opposite algebra: arguments reversed with the full Koszul reversal
/// sign in shifted degrees. On elements of degree zero this reduces to the
/// classical `m_n^{op}(a_1,..,a_n) = (-1)^{n(n-1)/2} m_n(a_n,..,a_1)`.
///
/// With this sign convention a strict unit `1` of `A` turns into the strict
/// unit `-1` of the opposite, which is not a basis element, so the result
/// carries no declared unit. The weak unit survives and is found by
/// [`weak_unit_check`].
pub fn opposite(alg: &AInftyAlgebra) -> Result<AInftyAlgebra> {
    let mut ops = Vec::new();
    for n in 1..=alg.n_max() {
        let Some(b) = alg.ops.coefficient(n) else {
            continue;
        };
        let mut op = MultilinearMap::uniform(
            alg.shifted.clone(),
            n,
            alg.shifted.clone(),
            1,
            alg.field,
        );
        for (key, val) in b.entries() {
            let degs: Vec<i64> = key
                .iter()
                .map(|&i| alg.shifted.degree(i as usize))
                .collect();
            let mut sign = 1i64;
            for i in 0..degs.len() {
                for j in (i + 1)..degs.len() {
                    sign *= koszul_sign(&[degs[i]], &[degs[j]]);
                }
            }
            let mut rev = key.clone();
            rev.reverse();
            let mut v = val.clone();
            v.scale(&scalar_sign(alg.field, sign));
            op.add_entry(&rev, v)?;
        }
        ops.push(op);
    }
    AInftyAlgebra::from_b_ops(alg.space.clone(), alg.field, ops, None)
}

/// Adjoins a strict unit: `A_1 = A (+) k.1` with `m_2(1,a) = m_2(a,1) = a`,
/// `m_2(1,1) = 1` and `m_n(..,1,..) = 0` for `n != 2`.
pub fn adjoin_unit(alg: &AInftyAlgebra) -> Result<AInftyAlgebra> {
    let mut names: Vec<(String, i64)> = alg
        .space
        .iter()
        .map(|(_, n, d)| (n.to_string(), d))
        .collect();
    let mut unit_name = "1".to_string();
    while names.iter().any(|(n, _)| *n == unit_name) {
        unit_name.push('\'');
    }
    names.push((unit_name, 0));
    let unit = names.len() - 1;
    let big = GradedSpace::new(alg.space.grading, names)?;
    let mut m_ops: Vec<MultilinearMap> = Vec::new();
    let n_top = alg.n_max().max(2);
    for n in 1..=n_top {
        let old = alg.m_op(n)?;
        let internal = match big.grading {
            Grading::Z => 2 - n as i64,
            Grading::Z2 => (2 - n as i64).rem_euclid(2),
        };
        let mut new = MultilinearMap::uniform(big.clone(), n, big.clone(), internal, alg.field);
        for (key, val) in old.entries() {
            new.add_entry(key, val.clone())?;
        }
        if n == 2 {
            for i in 0..big.dim() {
                new.add_entry(
                    &[unit as u32, i as u32],
                    SparseVec::singleton(i, alg.field.one()),
                )?;
                if i != unit {
                    new.add_entry(
                        &[i as u32, unit as u32],
                        SparseVec::singleton(i, alg.field.one()),
                    )?;
                }
            }
        }
        m_ops.push(new);
    }
    AInftyAlgebra::from_m_ops(big, alg.field, m_ops, Some(unit))
}

/// Cohomology of the tangent complex `(A, m_1)` on a degree window, with
/// deterministic echelon representatives and the induced `m_2` product.
#[derive(Debug, Clone)]
pub struct CohomologyReport {
    pub window: (i64, i64),
    /// `(degree, dim)` for each degree in the window
    pub dims: Vec<(i64, usize)>,
    /// representatives as vectors in `A`, tagged with their degree
    pub representatives: Vec<(i64, SparseVec)>,
    /// `product[i][j]` = coordinates of `[r_i . r_j]` in the representatives
    pub product: Vec<Vec<SparseVec>>,
}

/// Splitting data for one graded space with a differential.
pub(crate) struct Splitting {
    /// representative cocycles, one per homology class, with degrees
    pub reps: Vec<(i64, SparseVec)>,
    /// image basis vectors with degrees
    pub image: Vec<(i64, SparseVec)>,
}

pub(crate) fn split_complex(
    space: &GradedSpace,
    field: FieldSpec,
    d_matrix: &MultilinearMap,
) -> Result<Splitting> {
    // degrees present in the space
    let mut degrees: Vec<i64> = space.iter().map(|(_, _, d)| d).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let index_by_degree = |d: i64| -> Vec<usize> {
        space
            .iter()
            .filter(|(_, _, dd)| *dd == d)
            .map(|(i, _, _)| i)
            .collect()
    };
    let mut reps = Vec::new();
    let mut image = Vec::new();
    for &d in &degrees {
        let dom = index_by_degree(d);
        let cod = index_by_degree(space.add_deg(d, 1));
        // matrix of m_1 from degree d to d+1
        let mut triples = Vec::new();
        for (cj, &j) in dom.iter().enumerate() {
            if let Some(v) = d_matrix.eval(&[j as u32]) {
                for (i, c) in v.iter() {
                    let ri = cod.iter().position(|&x| x == i).expect("degree rule");
                    triples.push((ri, cj, c.clone()));
                }
            }
        }
        let m = SparseMatrix::from_triples(cod.len(), dom.len(), field, triples)?;
        let (_, kernel) = rank_kernel(&m)?;
        // image of the incoming differential, in degree-d coordinates
        let prev = index_by_degree(space.add_deg(d, -1));
        let mut img_rows = Vec::new();
        for &j in &prev {
            if let Some(v) = d_matrix.eval(&[j as u32]) {
                let mut row = BTreeMap::new();
                for (i, c) in v.iter() {
                    if let Some(pos) = dom.iter().position(|&x| x == i) {
                        row.insert(pos, c.clone());
                    }
                }
                let row = SparseVec::from_map(row);
                if !row.is_zero() {
                    img_rows.push(row);
                }
            }
        }
        let img_mat = {
            let mut triples = Vec::new();
            for (r, v) in img_rows.iter().enumerate() {
                for (c, s) in v.iter() {
                    triples.push((r, c, s.clone()));
                }
            }
            SparseMatrix::from_triples(img_rows.len(), dom.len(), field, triples)?
        };
        let img_basis = img_mat.rref().rows;
        // representatives: kernel vectors independent of the image span
        let mut span = img_basis.clone();
        let mut span_rank = span.len();
        for k in kernel {
            let mut test = span.clone();
            test.push(k.clone());
            let r = stack_rank(dom.len(), field, &test)?;
            if r > span_rank {
                span = test;
                span_rank = r;
                reps.push((d, embed(&k, &dom)));
            }
        }
        for b in img_basis {
            image.push((d, embed(&b, &dom)));
        }
    }
    Ok(Splitting { reps, image })
}

fn stack_rank(cols: usize, field: FieldSpec, rows: &[SparseVec]) -> Result<usize> {
    let mut triples = Vec::new();
    for (r, v) in rows.iter().enumerate() {
        for (c, s) in v.iter() {
            triples.push((r, c, s.clone()));
        }
    }
    Ok(SparseMatrix::from_triples(rows.len(), cols, field, triples)?.rank())
}

fn embed(local: &SparseVec, positions: &[usize]) -> SparseVec {
    SparseVec::from_map(
        local
            .iter()
            .map(|(i, c)| (positions[i], c.clone()))
            .collect(),
    )
}

pub fn cohomology(alg: &AInftyAlgebra, window: (i64, i64)) -> Result<CohomologyReport> {
    if window.0 > window.1 {
        return Err(Error::WindowEmpty);
    }
    let m1 = alg.m_op(1)?;
    let split = split_complex(&alg.space, alg.field, &m1)?;
    let reps: Vec<(i64, SparseVec)> = split
        .reps
        .iter()
        .filter(|(d, _)| *d >= window.0 && *d <= window.1)
        .cloned()
        .collect();
    let mut dims = Vec::new();
    for d in window.0..=window.1 {
        if alg.space.grading == Grading::Z2 && !(0..=1).contains(&d) {
            continue;
        }
        dims.push((d, reps.iter().filter(|(dd, _)| *dd == d).count()));
    }
    // product table: project m_2(r_i, r_j) back to representatives modulo the
    // image of m_1
    let m2 = alg.m_op(2)?;
    let mut product = Vec::new();
    for (_, ri) in &reps {
        let mut row = Vec::new();
        for (_, rj) in &reps {
            let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (i, ci) in ri.iter() {
                for (j, cj) in rj.iter() {
                    if let Some(v) = m2.eval(&[i as u32, j as u32]) {
                        let c = ci * cj;
                        for (t, ct) in v.iter() {
                            let slot = out.entry(t).or_insert_with(|| alg.field.zero());
                            *slot += &(ct * &c);
                        }
                    }
                }
            }
            let vec = SparseVec::from_map(out);
            row.push(project_to_reps(alg, &split, &reps, &vec)?);
        }
        product.push(row);
    }
    Ok(CohomologyReport {
        window,
        dims,
        representatives: reps,
        product,
    })
}

/// Expresses a cocycle as representative coordinates modulo exact vectors.
fn project_to_reps(
    alg: &AInftyAlgebra,
    split: &Splitting,
    reps: &[(i64, SparseVec)],
    v: &SparseVec,
) -> Result<SparseVec> {
    if v.is_zero() {
        return Ok(SparseVec::new());
    }
    // solve [image | reps] x = v, read off the rep coordinates
    let dim = alg.space.dim();
    let cols: Vec<&SparseVec> = split
        .image
        .iter()
        .map(|(_, b)| b)
        .chain(reps.iter().map(|(_, r)| r))
        .collect();
    let mut triples = Vec::new();
    for (c, col) in cols.iter().enumerate() {
        for (r, s) in col.iter() {
            triples.push((r, c, s.clone()));
        }
    }
    let m = SparseMatrix::from_triples(dim, cols.len(), alg.field, triples)?;
    let x = solve(&m, v)?.ok_or_else(|| {
        Error::Inconsistent("product of cocycles is not a cocycle; relations must fail".into())
    })?;
    let offset = split.image.len();
    Ok(SparseVec::from_map(
        x.iter()
            .filter(|(i, _)| *i >= offset)
            .map(|(i, c)| (i - offset, c.clone()))
            .collect(),
    ))
}

#[derive(Debug, Clone)]
pub struct WeakUnitReport {
    pub window: (i64, i64),
    pub is_weakly_unital_on_window: bool,
    /// coordinates of the unit class in the degree-zero representatives
    pub unit_class: Option<SparseVec>,
}

/// Looks for a class `u` in `H^0` with `u.x = x.u = x` for every class `x`
/// on the window. The verdict is window-relative by construction.
pub fn weak_unit_check(alg: &AInftyAlgebra, window: (i64, i64)) -> Result<WeakUnitReport> {
    let coh = cohomology(alg, window)?;
    let h0: Vec<usize> = coh
        .representatives
        .iter()
        .enumerate()
        .filter(|(_, (d, _))| *d == 0)
        .map(|(i, _)| i)
        .collect();
    let total = coh.representatives.len();
    if h0.is_empty() || total == 0 {
        return Ok(WeakUnitReport {
            window,
            is_weakly_unital_on_window: false,
            unit_class: None,
        });
    }
    // unknowns: coefficients u_k over the H^0 representatives;
    // equations: for each class x_j and each coordinate: (u.x_j - x_j) = 0
    // and (x_j.u - x_j) = 0
    let rows = 2 * total * total;
    let mut triples = Vec::new();
    let mut rhs_map = BTreeMap::new();
    let mut row = 0;
    for j in 0..total {
        for t in 0..total {
            // sum_k u_k * product[h0_k][j][t] = delta_{j,t}
            for (col, &k) in h0.iter().enumerate() {
                if let Some(c) = coh.product[k][j].get(t) {
                    triples.push((row, col, c.clone()));
                }
            }
            if j == t {
                rhs_map.insert(row, alg.field.one());
            }
            row += 1;
            for (col, &k) in h0.iter().enumerate() {
                if let Some(c) = coh.product[j][k].get(t) {
                    triples.push((row, col, c.clone()));
                }
            }
            if j == t {
                rhs_map.insert(row, alg.field.one());
            }
            row += 1;
        }
    }
    let m = SparseMatrix::from_triples(rows, h0.len(), alg.field, triples)?;
    let rhs = SparseVec::from_map(rhs_map);
    let sol = solve(&m, &rhs)?;
    match sol {
        Some(u) => {
            let unit = SparseVec::from_map(
                u.iter().map(|(i, c)| (h0[i], c.clone())).collect(),
            );
            Ok(WeakUnitReport {
                window,
                is_weakly_unital_on_window: true,
                unit_class: Some(unit),
            })
        }
        None => Ok(WeakUnitReport {
            window,
            is_weakly_unital_on_window: false,
            unit_class: None,
        }),
    }
}

/// An A-infinity morphism in shifted form: `f_n : W_A^{(x)n} -> W_B`, all of
/// internal degree 0.
#[derive(Debug, Clone)]
pub struct AInftyMorphism {
    pub source: Arc<AInftyAlgebra>,
    pub target: Arc<AInftyAlgebra>,
    pub taylor: Vec<MultilinearMap>,
}

impl AInftyMorphism {
    pub fn new(
        source: Arc<AInftyAlgebra>,
        target: Arc<AInftyAlgebra>,
        taylor: Vec<MultilinearMap>,
    ) -> Result<Self> {
        let mut by_arity: Vec<MultilinearMap> = Vec::new();
        for t in taylor {
            if t.arity() == 0 {
                return Err(Error::MarkedPoint);
            }
            if t.internal_degree != 0 {
                return Err(Error::DegreeRule(format!(
                    "f_{} has internal degree {}, expected 0",
                    t.arity(),
                    t.internal_degree
                )));
            }
            if t.sources.iter().any(|s| **s != *source.shifted) || *t.target != *target.shifted {
                return Err(Error::SpaceMismatch("morphism Taylor coefficient".into()));
            }
            let n = t.arity();
            while by_arity.len() < n {
                let k = by_arity.len() + 1;
                by_arity.push(MultilinearMap::uniform(
                    source.shifted.clone(),
                    k,
                    target.shifted.clone(),
                    0,
                    source.field,
                ));
            }
            by_arity[n - 1].add(&t)?;
        }
        Ok(AInftyMorphism {
            source,
            target,
            taylor: by_arity,
        })
    }

    pub fn identity(alg: Arc<AInftyAlgebra>) -> Self {
        let f1 = MultilinearMap::identity(alg.shifted.clone(), alg.field);
        AInftyMorphism {
            source: alg.clone(),
            target: alg,
            taylor: vec![f1],
        }
    }

    pub fn coefficient(&self, n: usize) -> Option<&MultilinearMap> {
        self.taylor.get(n.wrapping_sub(1)).filter(|m| !m.is_zero())
    }

    /// Applies the induced coalgebra map `F : T_+(W_A) -> T_+(W_B)` to one
    /// word: the sum over all splittings into nonempty blocks, each block fed
    /// to the matching Taylor coefficient. All coefficients have degree 0,
    /// so no Koszul signs arise.
    pub fn apply_word(&self, word: &[u32]) -> WordSum {
        let field = self.source.field;
        let mut out = WordSum::new();
        if word.is_empty() {
            return out;
        }
        // state: partial output words with coefficients, consumed prefix
        let mut states: Vec<(Vec<u32>, Scalar)> = vec![(Vec::new(), field.one())];
        let mut frontier: BTreeMap<usize, Vec<(Vec<u32>, Scalar)>> = BTreeMap::new();
        frontier.insert(0, states.drain(..).collect());
        while let Some((pos, bucket)) = frontier.pop_first() {
            if pos == word.len() {
                for (w, c) in bucket {
                    word_sum_add(&mut out, w, c);
                }
                continue;
            }
            for s in 1..=(word.len() - pos).min(self.taylor.len()) {
                let f = &self.taylor[s - 1];
                if f.is_zero() {
                    continue;
                }
                if let Some(v) = f.eval(&word[pos..pos + s]) {
                    let next = frontier.entry(pos + s).or_default();
                    for (i, c) in v.iter() {
                        for (w, cw) in &bucket {
                            let mut w2 = w.clone();
                            w2.push(i as u32);
                            next.push((w2, cw * c));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn apply_sum(&self, ws: &WordSum) -> WordSum {
        let mut out = WordSum::new();
        for (w, c) in ws {
            for (w2, c2) in self.apply_word(w) {
                word_sum_add(&mut out, w2, &c2 * c);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphismReport {
    pub pass: bool,
    pub checked_len: usize,
    pub witness: Option<Vec<String>>,
    /// agreement of the coalgebra-level condition with the explicit
    /// low-arity sign equations; `None` when the cross-check was skipped
    pub explicit_formula_agrees: Option<bool>,
}

/// Checks `F . Q_A = Q_B . F` on all words of length `<= max_len`, plus the
/// explicit sign equations at arities `<= 3` as an independent cross-check.
pub fn check_morphism(f: &AInftyMorphism, max_len: usize) -> Result<MorphismReport> {
    let mut witness = None;
    let mut pass = true;
    let dim = f.source.shifted.dim();
    'outer: for len in 1..=max_len {
        let mut word = vec![0u32; len];
        loop {
            let mut lhs = WordSum::new();
            for (qw, c) in f.source.ops.apply_word(&word) {
                for (fw, c2) in f.apply_word(&qw) {
                    word_sum_add(&mut lhs, fw, &c2 * &c);
                }
            }
            let rhs = f.target.ops.apply_sum(&f.apply_word(&word));
            if lhs != rhs {
                pass = false;
                witness = Some(
                    word.iter()
                        .map(|&i| f.source.space.name(i as usize).to_string())
                        .collect(),
                );
                break 'outer;
            }
            if !next_key(&mut word, dim) {
                break;
            }
        }
        if dim == 0 {
            break;
        }
    }
    let short = 3.min(max_len);
    let explicit = explicit_morphism_equations(f, short)?;
    let agrees = match explicit {
        None => None,
        Some(e) => Some(e == coalgebra_condition_up_to(f, short)),
    };
    Ok(MorphismReport {
        pass,
        checked_len: max_len,
        witness,
        explicit_formula_agrees: agrees,
    })
}

/// Coalgebra-level verdict restricted to short words, used to compare
/// against the explicit equations on the same range.
fn coalgebra_condition_up_to(f: &AInftyMorphism, max_len: usize) -> bool {
    let dim = f.source.shifted.dim();
    for len in 1..=max_len {
        if dim == 0 {
            break;
        }
        let mut word = vec![0u32; len];
        loop {
            let mut lhs = WordSum::new();
            for (qw, c) in f.source.ops.apply_word(&word) {
                for (fw, c2) in f.apply_word(&qw) {
                    word_sum_add(&mut lhs, fw, &c2 * &c);
                }
            }
            let rhs = f.target.ops.apply_sum(&f.apply_word(&word));
            if lhs != rhs {
                return false;
            }
            if !next_key(&mut word, dim) {
                break;
            }
        }
    }
    true
}

/// Evaluates the classical componentwise morphism equations (with the
/// epsilon/gamma sign exponents) on all tuples of arity `<= max_arity`.
/// Returns `None` if there is nothing to check.
fn explicit_morphism_equations(f: &AInftyMorphism, max_arity: usize) -> Result<Option<bool>> {
    let a_space = &f.source.space;
    let dim = a_space.dim();
    if dim == 0 || max_arity == 0 {
        return Ok(None);
    }
    // unshifted data
    let m_a: Vec<MultilinearMap> = (1..=f.source.n_max().max(max_arity))
        .map(|n| f.source.m_op(n))
        .collect::<Result<_>>()?;
    let m_b: Vec<MultilinearMap> = (1..=f.target.n_max().max(max_arity))
        .map(|n| f.target.m_op(n))
        .collect::<Result<_>>()?;
    let f_m: Vec<MultilinearMap> = (1..=f.taylor.len().max(max_arity))
        .map(|n| match f.taylor.get(n - 1) {
            Some(b) => {
                let mut m = conjugate_by_shift(
                    b,
                    &vec![true; n],
                    vec![f.source.space.clone(); n],
                    f.target.space.clone(),
                    true,
                    -1,
                )?;
                let comb = (n * (n - 1) / 2) as i64;
                m.scale(&scalar_sign(f.source.field, if comb % 2 == 0 { 1 } else { -1 }));
                Ok(m)
            }
            None => Ok(MultilinearMap::zero(
                vec![f.source.space.clone(); n],
                f.target.space.clone(),
                1 - n as i64,
                f.source.field,
            )),
        })
        .collect::<Result<_>>()?;
    let field = f.source.field;
    let eval =
        |m: &MultilinearMap, args: &[(usize, Scalar)]| -> BTreeMap<usize, Scalar> {
            // multilinear evaluation of one map on vectors given as
            // (basis index, coeff) singletons
            let key: Vec<u32> = args.iter().map(|(i, _)| *i as u32).collect();
            let mut out = BTreeMap::new();
            if let Some(v) = m.eval(&key) {
                let mut c = field.one();
                for (_, s) in args {
                    c *= s;
                }
                for (t, ct) in v.iter() {
                    out.insert(t, ct * &c);
                }
            }
            out
        };
    let mut all_agree = true;
    for n in 1..=max_arity {
        let mut key = vec![0u32; n];
        loop {
            let degs: Vec<i64> = key.iter().map(|&i| a_space.degree(i as usize)).collect();
            // left side: sum over increasing split points l_1 < .. < l_i = n
            let mut lhs: BTreeMap<usize, Scalar> = BTreeMap::new();
            for split in compositions(n) {
                let i = split.len();
                if i > m_b.len() {
                    continue;
                }
                // l_p = prefix sums
                let mut l = vec![0usize];
                for part in &split {
                    l.push(l.last().unwrap() + part);
                }
                // gamma_i
                let mut gamma: i64 = 0;
                for p in 1..i {
                    gamma += (i - p) as i64 * (l[p] as i64 - l[p - 1] as i64 - 1);
                    let nu: i64 = ((p + 1)..=i)
                        .map(|mm| 1 - l[mm] as i64 + l[mm - 1] as i64)
                        .sum();
                    let degsum: i64 = (l[p - 1]..l[p]).map(|q| degs[q]).sum();
                    gamma += nu * degsum;
                }
                // evaluate m_i^B(f(block_1), .., f(block_i))
                let mut blocks: Vec<BTreeMap<usize, Scalar>> = Vec::with_capacity(i);
                for p in 0..i {
                    let part = &key[l[p]..l[p + 1]];
                    let fmap = &f_m[part.len() - 1];
                    let mut acc = BTreeMap::new();
                    if let Some(v) = fmap.eval(part) {
                        for (t, c) in v.iter() {
                            acc.insert(t, c.clone());
                        }
                    }
                    blocks.push(acc);
                }
                let sign = scalar_sign(field, if gamma.rem_euclid(2) == 0 { 1 } else { -1 });
                // expand the multi-block product through m_i^B
                let mut combos: Vec<(Vec<(usize, Scalar)>, Scalar)> =
                    vec![(Vec::new(), sign)];
                for b in &blocks {
                    let mut next = Vec::new();
                    for (prefix, c) in &combos {
                        for (t, ct) in b {
                            let mut p2 = prefix.clone();
                            p2.push((*t, field.one()));
                            next.push((p2, c * ct));
                        }
                    }
                    combos = next;
                }
                for (args, c) in combos {
                    for (t, ct) in eval(&m_b[i - 1], &args) {
                        let slot = lhs.entry(t).or_insert_with(|| field.zero());
                        *slot += &(&ct * &c);
                    }
                }
            }
            lhs.retain(|_, v| !v.is_zero());
            // right side: sum over s + r = n + 1, insertion position j
            let mut rhs: BTreeMap<usize, Scalar> = BTreeMap::new();
            for r in 1..=n.min(m_a.len()) {
                let s = n + 1 - r;
                if s > f_m.len() {
                    continue;
                }
                for j in 1..=s {
                    let eps: i64 = r as i64 * degs[..j - 1].iter().sum::<i64>()
                        + (j as i64 - 1)
                        + r as i64 * (s as i64 - j as i64);
                    let inner = eval(
                        &m_a[r - 1],
                        &key[j - 1..j - 1 + r]
                            .iter()
                            .map(|&i| (i as usize, field.one()))
                            .collect::<Vec<_>>(),
                    );
                    let sign = scalar_sign(field, if eps.rem_euclid(2) == 0 { 1 } else { -1 });
                    for (mid, cmid) in inner {
                        let mut args: Vec<(usize, Scalar)> = Vec::with_capacity(s);
                        for &i in &key[..j - 1] {
                            args.push((i as usize, field.one()));
                        }
                        args.push((mid, cmid.clone()));
                        for &i in &key[j - 1 + r..] {
                            args.push((i as usize, field.one()));
                        }
                        for (t, ct) in eval(&f_m[s - 1], &args) {
                            let slot = rhs.entry(t).or_insert_with(|| field.zero());
                            *slot += &(&ct * &sign);
                        }
                    }
                }
            }
            rhs.retain(|_, v| !v.is_zero());
            if lhs != rhs {
                all_agree = false;
            }
            if !next_key(&mut key, dim) {
                break;
            }
        }
        if !all_agree {
            break;
        }
    }
    Ok(Some(all_agree))
}

/// Homotopy-transfer data on the shifted space: a deterministic splitting
/// `W = H (+) im(b_1) (+) C` with homotopy `h` such that
/// `b_1 h + h b_1 = id - i p`, `h i = 0`, `p h = 0`, `h h = 0`.
struct TransferData {
    h_space: Arc<GradedSpace>,
    include: MultilinearMap,  // H -> W, degree 0
    project: MultilinearMap,  // W -> H, degree 0
    homotopy: MultilinearMap, // W -> W, degree -1
}

fn transfer_splitting(alg: &AInftyAlgebra) -> Result<TransferData> {
    let w = &alg.shifted;
    let field = alg.field;
    let b1 = match alg.ops.coefficient(1) {
        Some(b) => b.clone(),
        None => MultilinearMap::uniform(w.clone(), 1, w.clone(), 1, field),
    };
    let mut degrees: Vec<i64> = w.iter().map(|(_, _, d)| d).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let by_degree = |d: i64| -> Vec<usize> {
        w.iter().filter(|(_, _, dd)| *dd == d).map(|(i, _, _)| i).collect()
    };
    // choose, per degree: kernel basis, complement C (standard basis vectors
    // off the kernel pivots), representatives H extending the image
    let mut reps: Vec<(i64, SparseVec)> = Vec::new();
    let mut c_basis: BTreeMap<i64, Vec<SparseVec>> = BTreeMap::new();
    for &d in &degrees {
        let dom = by_degree(d);
        let cod = by_degree(w.add_deg(d, 1));
        let mut triples = Vec::new();
        for (cj, &j) in dom.iter().enumerate() {
            if let Some(v) = b1.eval(&[j as u32]) {
                for (i, c) in v.iter() {
                    let ri = cod.iter().position(|&x| x == i).expect("degree rule");
                    triples.push((ri, cj, c.clone()));
                }
            }
        }
        let m = SparseMatrix::from_triples(cod.len(), dom.len(), field, triples)?;
        let rref = m.rref();
        let kernel = rref.kernel_basis();
        let kernel_pivots: Vec<usize> = {
            // pivot coordinates of the kernel span
            let mut t = Vec::new();
            for (r, v) in kernel.iter().enumerate() {
                for (c, s) in v.iter() {
                    t.push((r, c, s.clone()));
                }
            }
            SparseMatrix::from_triples(kernel.len(), dom.len(), field, t)?
                .rref()
                .pivots
        };
        let comp: Vec<SparseVec> = (0..dom.len())
            .filter(|j| !kernel_pivots.contains(j))
            .map(|j| SparseVec::singleton(dom[j], field.one()))
            .collect();
        c_basis.insert(d, comp);
        // image from the previous degree
        let prev = by_degree(w.add_deg(d, -1));
        let mut img_rows = Vec::new();
        for &j in &prev {
            if let Some(v) = b1.eval(&[j as u32]) {
                let mut local = BTreeMap::new();
                for (i, c) in v.iter() {
                    if let Some(pos) = dom.iter().position(|&x| x == i) {
                        local.insert(pos, c.clone());
                    }
                }
                let row = SparseVec::from_map(local);
                if !row.is_zero() {
                    img_rows.push(row);
                }
            }
        }
        let img = {
            let mut t = Vec::new();
            for (r, v) in img_rows.iter().enumerate() {
                for (c, s) in v.iter() {
                    t.push((r, c, s.clone()));
                }
            }
            SparseMatrix::from_triples(img_rows.len(), dom.len(), field, t)?.rref().rows
        };
        let mut span = img.clone();
        let mut rank = span.len();
        for k in kernel {
            let mut test = span.clone();
            test.push(k.clone());
            let r = stack_rank(dom.len(), field, &test)?;
            if r > rank {
                span = test;
                rank = r;
                reps.push((d, embed(&k, &dom)));
            }
        }
    }
    // name representatives; reuse the basis name when the class is a plain
    // basis vector
    let names: Vec<(String, i64)> = reps
        .iter()
        .enumerate()
        .map(|(k, (d, v))| {
            let name = if v.entries.len() == 1 && v.entries[0].1.is_one() {
                w.name(v.entries[0].0).to_string()
            } else {
                format!("h{k}")
            };
            (name, *d)
        })
        .collect();
    let h_space = GradedSpace::new(w.grading, names)?;
    let mut include = MultilinearMap::zero(vec![h_space.clone()], w.clone(), 0, field);
    for (k, (_, v)) in reps.iter().enumerate() {
        include.add_entry(&[k as u32], v.clone())?;
    }
    // projection and homotopy by solving against the assembled basis
    // [b_1(C_{d-1}) | H_d | C_d] of each degree slice
    let mut project = MultilinearMap::zero(vec![w.clone()], h_space.clone(), 0, field);
    let mut homotopy = MultilinearMap::zero(vec![w.clone()], w.clone(), -1, field);
    for &d in &degrees {
        let dom = by_degree(d);
        let c_prev: &[SparseVec] = c_basis
            .get(&w.add_deg(d, -1))
            .map(|v| v.as_slice())
            .unwrap_or(&[]);
        // images b_1(c) for c in C_{d-1}, in W coordinates
        let b_cols: Vec<SparseVec> = c_prev
            .iter()
            .map(|c| apply_linear(&b1, c, field))
            .collect();
        let h_cols: Vec<(usize, SparseVec)> = reps
            .iter()
            .enumerate()
            .filter(|(_, (dd, _))| *dd == d)
            .map(|(k, (_, v))| (k, v.clone()))
            .collect();
        let c_cols = c_basis.get(&d).cloned().unwrap_or_default();
        let cols: Vec<SparseVec> = b_cols
            .iter()
            .cloned()
            .chain(h_cols.iter().map(|(_, v)| v.clone()))
            .chain(c_cols.iter().cloned())
            .collect();
        let mut t = Vec::new();
        for (c, col) in cols.iter().enumerate() {
            for (r, s) in col.iter() {
                t.push((r, c, s.clone()));
            }
        }
        let basis_mat = SparseMatrix::from_triples(w.dim(), cols.len(), field, t)?;
        for &j in &dom {
            let e = SparseVec::singleton(j, field.one());
            let x = solve(&basis_mat, &e)?.ok_or_else(|| {
                Error::Inconsistent("splitting basis does not span".into())
            })?;
            // projection: the H-coordinates
            let mut pvec = BTreeMap::new();
            for (i, c) in x.iter() {
                if i >= b_cols.len() && i < b_cols.len() + h_cols.len() {
                    pvec.insert(h_cols[i - b_cols.len()].0, c.clone());
                }
            }
            project.add_entry(&[j as u32], SparseVec::from_map(pvec))?;
            // homotopy: pull B-coordinates back through b_1|C
            let mut hvec: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (i, c) in x.iter() {
                if i < b_cols.len() {
                    for (r, s) in c_prev[i].iter() {
                        let slot = hvec.entry(r).or_insert_with(|| field.zero());
                        *slot += &(s * c);
                    }
                }
            }
            homotopy.add_entry(&[j as u32], SparseVec::from_map(hvec))?;
        }
    }
    Ok(TransferData {
        h_space,
        include,
        project,
        homotopy,
    })
}

fn apply_linear(m: &MultilinearMap, v: &SparseVec, field: FieldSpec) -> SparseVec {
    let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
    for (i, c) in v.iter() {
        if let Some(img) = m.eval(&[i as u32]) {
            for (t, s) in img.iter() {
                let slot = out.entry(t).or_insert_with(|| field.zero());
                *slot += &(s * c);
            }
        }
    }
    SparseVec::from_map(out)
}

/// Minimal model by homotopy transfer over the deterministic echelon
/// splitting: returns `(M, f)` with `m_1^M = 0` and `f : M -> A` a
/// quasi-isomorphism whose linear part is the chosen inclusion of
/// representatives. Tree sums run up to arity `n_max_out`.
pub fn minimal_model(
    alg: &Arc<AInftyAlgebra>,
    n_max_out: usize,
) -> Result<(Arc<AInftyAlgebra>, AInftyMorphism)> {
    if alg.field != FieldSpec::Rationals {
        return Err(Error::CharZeroRequired(
            "homotopy transfer divides by integers".into(),
        ));
    }
    let data = transfer_splitting(alg)?;
    let field = alg.field;
    // tree recursion: t_1 = include; t_n = -h(lambda_n); b'_n = p(lambda_n)
    // where lambda_n = sum_{s>=2} sum_{n_1+..+n_s=n} b_s(t_{n_1} (x) .. (x) t_{n_s}).
    // Every t has internal degree 0, so no Koszul signs arise in the blocks;
    // the minus on the homotopy leg is forced by the arity-2 morphism
    // identity under the h b_1 + b_1 h = id - i p convention.
    let mut t_maps: Vec<MultilinearMap> = vec![data.include.clone()];
    let mut b_prime: Vec<MultilinearMap> = Vec::new();
    for n in 2..=n_max_out.max(2) {
        let mut lambda = MultilinearMap::zero(
            vec![data.h_space.clone(); n],
            alg.shifted.clone(),
            1,
            field,
        );
        for s in 2..=n.min(alg.n_max()) {
            let Some(bs) = alg.ops.coefficient(s) else {
                continue;
            };
            if bs.is_zero() {
                continue;
            }
            for split in compositions_into(n, s) {
                if split.iter().any(|&p| p > t_maps.len()) {
                    continue;
                }
                // insert blocks right-to-left so slot positions stay fixed
                let mut acc = bs.clone();
                for slot in (0..s).rev() {
                    acc = acc.compose_at(slot, &t_maps[split[slot] - 1])?;
                }
                lambda.add(&acc)?;
            }
        }
        let mut t_next = data.homotopy.compose_at(0, &lambda)?;
        t_next.scale(&field.from_i64(-1));
        t_maps.push(t_next);
        b_prime.push(data.project.compose_at(0, &lambda)?);
    }
    let minimal_space = data.h_space.shift(-1);
    let minimal = Arc::new(AInftyAlgebra::from_b_ops(
        minimal_space,
        field,
        b_prime.into_iter().filter(|m| !m.is_zero()).collect(),
        None,
    )?);
    let f = AInftyMorphism::new(
        minimal.clone(),
        alg.clone(),
        t_maps.into_iter().filter(|m| !m.is_zero()).collect(),
    )?;
    Ok((minimal, f))
}

/// Ordered compositions of `n` into exactly `s` positive parts.
fn compositions_into(n: usize, s: usize) -> Vec<Vec<usize>> {
    if s == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(s - 1) {
        for rest in compositions_into(n - first, s - 1) {
            let mut c = vec![first];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

/// Ordered compositions of `n` into positive parts.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for rest in compositions(n - first) {
            let mut c = vec![first];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

/// Taylor coefficients of the composite coalgebra map `G . F`.
pub fn compose_morphisms(g: &AInftyMorphism, f: &AInftyMorphism) -> Result<AInftyMorphism> {
    if !Arc::ptr_eq(&f.target, &g.source) && *f.target.space != *g.source.space {
        return Err(Error::SpaceMismatch("composition target/source".into()));
    }
    let n_top = f.taylor.len() * g.taylor.len().max(1);
    let mut taylor = Vec::new();
    for n in 1..=n_top.max(1) {
        let mut coeff = MultilinearMap::uniform(
            f.source.shifted.clone(),
            n,
            g.target.shifted.clone(),
            0,
            f.source.field,
        );
        // (g . f)_n = sum over splittings of n into k blocks of
        // g_k (f_{n_1} (x) .. (x) f_{n_k}); degree-0 coefficients compose
        // without signs
        for split in compositions(n) {
            let k = split.len();
            let Some(gk) = g.taylor.get(k - 1) else {
                continue;
            };
            if gk.is_zero() {
                continue;
            }
            if split.iter().any(|&p| p > f.taylor.len()) {
                continue;
            }
            let mut word = vec![0u32; n];
            loop {
                // evaluate each f-block
                let mut mids: Vec<Vec<(usize, Scalar)>> = Vec::with_capacity(k);
                let mut offset = 0;
                let mut dead = false;
                for &p in &split {
                    let fp = &f.taylor[p - 1];
                    match fp.eval(&word[offset..offset + p]) {
                        Some(v) if !v.is_zero() => {
                            mids.push(v.iter().map(|(i, c)| (i, c.clone())).collect())
                        }
                        _ => {
                            dead = true;
                            break;
                        }
                    }
                    offset += p;
                }
                if !dead {
                    let mut combos: Vec<(Vec<u32>, Scalar)> =
                        vec![(Vec::new(), f.source.field.one())];
                    for m in &mids {
                        let mut next = Vec::new();
                        for (prefix, c) in &combos {
                            for (i, ci) in m {
                                let mut p2 = prefix.clone();
                                p2.push(*i as u32);
                                next.push((p2, c * ci));
                            }
                        }
                        combos = next;
                    }
                    for (gkey, c) in combos {
                        if let Some(v) = gk.eval(&gkey) {
                            let mut vv = v.clone();
                            vv.scale(&c);
                            coeff.add_entry(&word, vv)?;
                        }
                    }
                }
                if !next_key(&mut word, f.source.shifted.dim()) {
                    break;
                }
            }
            if f.source.shifted.dim() == 0 {
                break;
            }
        }
        taylor.push(coeff);
    }
    AInftyMorphism::new(f.source.clone(), g.target.clone(), taylor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn decalage_round_trip() {
        for alg in fixtures::all_valid() {
            for n in 1..=alg.n_max() {
                let m = alg.m_op(n).unwrap();
                if m.is_zero() {
                    continue;
                }
                let b = b_from_m(&m, alg.shifted.clone()).unwrap();
                assert_eq!(
                    b,
                    alg.ops.coefficient(n).unwrap().clone(),
                    "decalage mismatch for {n}"
                );
                let m2 = m_from_b(&b, alg.space.clone()).unwrap();
                assert_eq!(m, m2, "round trip broken at arity {n}");
            }
        }
    }

    #[test]
    fn fixtures_pass_relations_by_both_routes() {
        for alg in fixtures::all_valid() {
            let rep = check_relations(&alg, 6);
            assert!(rep.pass, "{:?}", rep);
            for n in 1..=6 {
                let defect = direct_relation_defect(&alg, n).unwrap();
                assert!(defect.is_zero(), "direct route fails at arity {n}");
            }
        }
    }

    #[test]
    fn broken_fixture_fails_at_arity_three() {
        let alg = fixtures::broken();
        let rep = check_relations(&alg, 6);
        assert!(!rep.pass);
        assert_eq!(rep.first_failing_arity, Some(3));
        assert_eq!(
            rep.witness,
            Some(vec!["a".to_string(), "a".to_string(), "a".to_string()])
        );
        // both routes agree on failure
        let defect = direct_relation_defect(&alg, 3).unwrap();
        assert!(!defect.is_zero());
    }

    #[test]
    fn opposite_involutive_and_valid() {
        for alg in fixtures::all_valid() {
            let op = opposite(&alg).unwrap();
            assert!(check_relations(&op, 6).pass);
            let opop = opposite(&op).unwrap();
            for n in 1..=alg.n_max() {
                assert_eq!(
                    alg.ops.coefficient(n).map(|m| m.clone()),
                    opop.ops.coefficient(n).map(|m| m.clone())
                );
            }
        }
    }

    #[test]
    fn opposite_classical_sign_on_degree_zero() {
        let d = fixtures::dual_numbers();
        let op = opposite(&d).unwrap();
        let m2 = d.m_op(2).unwrap();
        let m2op = op.m_op(2).unwrap();
        // m2^op(a,b) = (-1)^{2*1/2} m2(b,a) = -m2(b,a)
        for (key, val) in m2.entries() {
            let rev = vec![key[1], key[0]];
            let mut expect = val.clone();
            expect.scale(&d.field.from_i64(-1));
            assert_eq!(m2op.eval_or_zero(&rev), expect);
        }
    }

    #[test]
    fn adjoin_unit_examples() {
        // zero algebra gains a bare unit
        let zero = fixtures::zero_algebra();
        let k = adjoin_unit(&zero).unwrap();
        assert_eq!(k.dim(), 1);
        assert!(check_relations(&k, 5).pass);
        // CONTR keeps its differential
        let contr = fixtures::contractible();
        let c1 = adjoin_unit(&contr).unwrap();
        assert_eq!(c1.dim(), 3);
        assert!(check_relations(&c1, 6).pass);
        let m1 = c1.m_op(1).unwrap();
        assert!(!m1.is_zero());
        // dual numbers: old unit and the new one are distinct
        let d1 = adjoin_unit(&fixtures::dual_numbers()).unwrap();
        assert_eq!(d1.dim(), 3);
        assert!(check_relations(&d1, 6).pass);
    }

    #[test]
    fn cohomology_examples() {
        let contr = fixtures::contractible();
        let rep = cohomology(&contr, (-1, 2)).unwrap();
        assert!(rep.dims.iter().all(|(_, n)| *n == 0));

        let d = fixtures::dual_numbers();
        let rep = cohomology(&d, (0, 0)).unwrap();
        assert_eq!(rep.dims, vec![(0, 2)]);

        let lam = fixtures::exterior_line();
        let rep = cohomology(&lam, (0, 1)).unwrap();
        assert_eq!(rep.dims, vec![(0, 1), (1, 1)]);
    }

    #[test]
    fn weak_unit_examples() {
        let d = fixtures::dual_numbers();
        let rep = weak_unit_check(&d, (0, 0)).unwrap();
        assert!(rep.is_weakly_unital_on_window);
        // the unit class is the class of the basis unit
        let u = rep.unit_class.unwrap();
        assert!(!u.is_zero());

        let zero_mult = fixtures::zero_multiplication();
        let rep = weak_unit_check(&zero_mult, (0, 0)).unwrap();
        assert!(!rep.is_weakly_unital_on_window);

        let c1 = adjoin_unit(&fixtures::contractible()).unwrap();
        let rep = weak_unit_check(&c1, (-1, 2)).unwrap();
        assert!(rep.is_weakly_unital_on_window);
    }

    #[test]
    fn identity_and_zero_morphisms_check() {
        let d = Arc::new(fixtures::dual_numbers());
        let id = AInftyMorphism::identity(d.clone());
        let rep = check_morphism(&id, 5).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.explicit_formula_agrees, Some(true));

        let zero = AInftyMorphism::new(d.clone(), d.clone(), vec![]).unwrap();
        let rep = check_morphism(&zero, 4).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn quotient_morphism_d_to_k() {
        // eps -> 0, 1 -> 1 is a morphism of unital algebras
        let d = Arc::new(fixtures::dual_numbers());
        let k = Arc::new(fixtures::unit_algebra());
        let mut f1 = MultilinearMap::zero(
            vec![d.shifted.clone()],
            k.shifted.clone(),
            0,
            d.field,
        );
        f1.add_entry(&[0], SparseVec::singleton(0, d.field.one())).unwrap();
        let f = AInftyMorphism::new(d, k, vec![f1]).unwrap();
        let rep = check_morphism(&f, 5).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.explicit_formula_agrees, Some(true));
    }

    #[test]
    fn minimal_model_of_minimal_is_identity() {
        let d = Arc::new(fixtures::dual_numbers());
        let (m, f) = minimal_model(&d, 4).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.b_op(1).is_none());
        for n in 2..=2 {
            assert_eq!(
                m.ops.coefficient(n).map(|x| x.clone()),
                d.ops.coefficient(n).map(|x| x.clone())
            );
        }
        assert!(check_morphism(&f, 5).unwrap().pass);
        // applying the construction twice is stable
        let (m2, f2) = minimal_model(&m, 4).unwrap();
        assert_eq!(m2.dim(), m.dim());
        assert_eq!(
            m2.ops.coefficient(2).map(|x| x.clone()),
            m.ops.coefficient(2).map(|x| x.clone())
        );
        assert!(check_morphism(&f2, 4).unwrap().pass);
    }

    #[test]
    fn minimal_model_of_contractible_is_zero() {
        let c = Arc::new(fixtures::contractible());
        let (m, f) = minimal_model(&c, 4).unwrap();
        assert_eq!(m.dim(), 0);
        assert!(check_relations(&m, 4).pass);
        assert!(check_morphism(&f, 4).unwrap().pass);
    }

    #[test]
    fn massey_transfer_has_nonzero_m3() {
        let a = Arc::new(fixtures::massey());
        let (m, f) = minimal_model(&a, 6).unwrap();
        assert_eq!(m.dim(), 2);
        assert!(m.b_op(1).is_none());
        assert!(m.b_op(2).is_none(), "induced product must vanish");
        let b3 = m.b_op(3).expect("transferred m3");
        // witness: the triple (x,x,x) maps onto the degree-2 class
        let x = m.space.index_of("x").unwrap() as u32;
        assert!(!b3.eval_or_zero(&[x, x, x]).is_zero());
        assert!(check_relations(&m, 6).pass);
        assert!(check_morphism(&f, 6).unwrap().pass, "transfer morphism");
        // independent oracle: the arity-4 quadratic relation expanded directly
        let defect = direct_relation_defect(&m, 4).unwrap();
        assert!(defect.is_zero());
    }

    #[test]
    fn transfer_splitting_side_conditions() {
        let a = Arc::new(fixtures::massey());
        let data = transfer_splitting(&a).unwrap();
        let b1 = a.ops.coefficient(1).unwrap();
        // b1 h + h b1 = id - i p
        let mut lhs = b1.compose_at(0, &data.homotopy).unwrap();
        lhs.add(&data.homotopy.compose_at(0, b1).unwrap()).unwrap();
        let mut rhs = MultilinearMap::identity(a.shifted.clone(), a.field);
        let mut ip = data.include.compose_at(0, &data.project).unwrap();
        ip.scale(&a.field.from_i64(-1));
        rhs.add(&ip).unwrap();
        assert_eq!(lhs, rhs);
        // side conditions
        assert!(data.homotopy.compose_at(0, &data.include).unwrap().is_zero());
        assert!(data.project.compose_at(0, &data.homotopy).unwrap().is_zero());
        assert!(data.homotopy.compose_at(0, &data.homotopy).unwrap().is_zero());
    }

    #[test]
    fn minimal_model_rejects_prime_fields() {
        let sp = GradedSpace::new(Grading::Z, vec![("e".into(), 0)]).unwrap();
        let f5 = FieldSpec::prime(5).unwrap();
        let mut m2 = MultilinearMap::uniform(sp.clone(), 2, sp.clone(), 0, f5);
        m2.add_entry(&[0, 0], SparseVec::singleton(0, f5.one())).unwrap();
        let a = Arc::new(AInftyAlgebra::from_m_ops(sp, f5, vec![m2], None).unwrap());
        assert!(matches!(
            minimal_model(&a, 3),
            Err(Error::CharZeroRequired(_))
        ));
    }

    #[test]
    fn composition_matches_by_hand_expansion() {
        let d = Arc::new(fixtures::dual_numbers());
        let id = AInftyMorphism::identity(d.clone());
        let f = {
            // a random-ish valid endomorphism: identity plus nilpotent f_2
            let mut f2 = MultilinearMap::uniform(d.shifted.clone(), 2, d.shifted.clone(), 0, d.field);
            // f_2(1,1) = eps keeps degree 0? |1|+|1| = -2, target must be -2+0:
            // no basis element there, so f_2 must stay zero on this fixture;
            // use f_1 = id and check composition identities instead
            let _ = &mut f2;
            AInftyMorphism::identity(d.clone())
        };
        let c = compose_morphisms(&id, &f).unwrap();
        assert!(check_morphism(&c, 4).unwrap().pass);
        // (g.f)_1 = g_1 f_1
        assert_eq!(
            c.taylor[0],
            MultilinearMap::identity(d.shifted.clone(), d.field)
        );
    }
}

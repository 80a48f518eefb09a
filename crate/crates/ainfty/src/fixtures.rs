//! The in-repo fixture corpus. Every algebra used in tests, the acceptance
//! suite and the shipped JSON files is built here.

use crate::ainfinity::AInftyAlgebra;
use crate::field::FieldSpec;
use crate::graded::{GradedSpace, Grading, MultilinearMap};
use crate::linalg::SparseVec;
use std::collections::BTreeMap;
use std::sync::Arc;

fn q() -> FieldSpec {
    FieldSpec::Rationals
}

fn space(names: &[(&str, i64)]) -> Arc<GradedSpace> {
    GradedSpace::new(
        Grading::Z,
        names.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
    )
    .expect("fixture basis")
}

fn m_table(
    sp: &Arc<GradedSpace>,
    arity: usize,
    entries: &[(&[u32], &[(usize, i64)])],
) -> MultilinearMap {
    let internal = 2 - arity as i64;
    let mut m = MultilinearMap::uniform(sp.clone(), arity, sp.clone(), internal, q());
    for (key, val) in entries {
        let mut v: BTreeMap<usize, crate::field::Scalar> = BTreeMap::new();
        for (i, c) in val.iter() {
            v.insert(*i, q().from_i64(*c));
        }
        m.add_entry(key, SparseVec::from_map(v)).expect("fixture entry");
    }
    m
}

/// `K`: the ground field as a unital algebra on one generator.
pub fn unit_algebra() -> AInftyAlgebra {
    let sp = space(&[("1", 0)]);
    let m2 = m_table(&sp, 2, &[(&[0, 0], &[(0, 1)])]);
    AInftyAlgebra::from_m_ops(sp, q(), vec![m2], Some(0)).unwrap()
}

/// The dg-line: the same one-dimensional table with no declared unit.
pub fn dg_line() -> AInftyAlgebra {
    let sp = space(&[("e", 0)]);
    let m2 = m_table(&sp, 2, &[(&[0, 0], &[(0, 1)])]);
    AInftyAlgebra::from_m_ops(sp, q(), vec![m2], None).unwrap()
}

/// `D`: dual numbers k[eps]/(eps^2) in degree zero.
pub fn dual_numbers() -> AInftyAlgebra {
    let sp = space(&[("1", 0), ("eps", 0)]);
    let m2 = m_table(
        &sp,
        2,
        &[
            (&[0, 0], &[(0, 1)]),
            (&[0, 1], &[(1, 1)]),
            (&[1, 0], &[(1, 1)]),
        ],
    );
    AInftyAlgebra::from_m_ops(sp, q(), vec![m2], Some(0)).unwrap()
}

/// `Lambda`: k<xi>/(xi^2) with deg xi = 1 and zero differential.
pub fn exterior_line() -> AInftyAlgebra {
    let sp = space(&[("1", 0), ("xi", 1)]);
    let m2 = m_table(
        &sp,
        2,
        &[
            (&[0, 0], &[(0, 1)]),
            (&[0, 1], &[(1, 1)]),
            (&[1, 0], &[(1, 1)]),
        ],
    );
    AInftyAlgebra::from_m_ops(sp, q(), vec![m2], Some(0)).unwrap()
}

/// `CONTR`: two generators with m1(x) = y and nothing else; contractible.
pub fn contractible() -> AInftyAlgebra {
    let sp = space(&[("x", 0), ("y", 1)]);
    let mut m1 = MultilinearMap::uniform(sp.clone(), 1, sp.clone(), 1, q());
    m1.add_entry(&[0], SparseVec::singleton(1, q().one())).unwrap();
    AInftyAlgebra::from_m_ops(sp, q(), vec![m1], None).unwrap()
}

/// `QA2`: the path algebra of the quiver `1 --a--> 2` in degree zero.
/// Strictly unital as an algebra, but the unit `e1 + e2` is not a basis
/// element, so no strict unit is declared here.
pub fn quiver_a2() -> AInftyAlgebra {
    let sp = space(&[("e1", 0), ("e2", 0), ("a", 0)]);
    let m2 = m_table(
        &sp,
        2,
        &[
            (&[0, 0], &[(0, 1)]),
            (&[1, 1], &[(1, 1)]),
            (&[0, 2], &[(2, 1)]),
            (&[2, 1], &[(2, 1)]),
        ],
    );
    AInftyAlgebra::from_m_ops(sp, q(), vec![m2], None).unwrap()
}

/// A deliberately broken table: m2(a,a) = b, m2(a,b) = a violates
/// associativity at (a,a,a).
pub fn broken() -> AInftyAlgebra {
    let sp = space(&[("a", 0), ("b", 0)]);
    let m2 = m_table(&sp, 2, &[(&[0, 0], &[(1, 1)]), (&[0, 1], &[(0, 1)])]);
    AInftyAlgebra::from_m_ops(sp, q(), vec![m2], None).unwrap()
}

/// A four-dimensional dg-algebra whose minimal model has a nonzero m3:
/// deg x = deg y = 1, deg z = deg w = 2, with m1(y) = z and products
/// x.x = z, x.y = y.x = w. The class of x squares to zero because x.x is a
/// boundary, and the secondary triple product on it survives as 2w.
pub fn massey() -> AInftyAlgebra {
    let sp = space(&[("x", 1), ("y", 1), ("z", 2), ("w", 2)]);
    let mut m1 = MultilinearMap::uniform(sp.clone(), 1, sp.clone(), 1, q());
    m1.add_entry(&[1], SparseVec::singleton(2, q().one())).unwrap();
    let m2 = m_table(
        &sp,
        2,
        &[
            (&[0, 0], &[(2, 1)]),
            (&[0, 1], &[(3, 1)]),
            (&[1, 0], &[(3, 1)]),
        ],
    );
    AInftyAlgebra::from_m_ops(sp, q(), vec![m1, m2], None).unwrap()
}

/// The zero algebra on the zero space.
pub fn zero_algebra() -> AInftyAlgebra {
    let sp = GradedSpace::empty(Grading::Z);
    AInftyAlgebra::from_m_ops(sp, q(), vec![], None).unwrap()
}

/// A nonzero space with all operations zero; valid but not weakly unital.
pub fn zero_multiplication() -> AInftyAlgebra {
    let sp = space(&[("a", 0)]);
    AInftyAlgebra::from_m_ops(sp, q(), vec![], None).unwrap()
}

/// Frobenius pairing on the dual numbers: (1,eps) = (eps,1) = 1, degree 0.
pub fn frobenius_pairing_dual() -> Vec<(usize, usize, i64)> {
    vec![(0, 1, 1), (1, 0, 1)]
}

/// Frobenius pairing on the exterior line: (1,xi) = (xi,1) = 1, degree 1.
pub fn frobenius_pairing_exterior() -> Vec<(usize, usize, i64)> {
    vec![(0, 1, 1), (1, 0, 1)]
}

/// All fixtures expected to satisfy the relations.
pub fn all_valid() -> Vec<AInftyAlgebra> {
    vec![
        unit_algebra(),
        dg_line(),
        dual_numbers(),
        exterior_line(),
        contractible(),
        quiver_a2(),
        massey(),
        zero_algebra(),
        zero_multiplication(),
    ]
}

/// Named variants of the valid fixtures, handy for report labels.
pub fn all_valid_named() -> Vec<(&'static str, AInftyAlgebra)> {
    vec![
        ("unit_k", unit_algebra()),
        ("dg_line", dg_line()),
        ("dual_numbers", dual_numbers()),
        ("exterior_line", exterior_line()),
        ("contractible", contractible()),
        ("quiver_a2", quiver_a2()),
        ("massey", massey()),
    ]
}

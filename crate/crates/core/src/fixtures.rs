//! Built-in spaces and families.

use crate::algebra::{BBProbSpace, StructuredAlgebra};
use crate::error::{Error, Result};
use crate::faces::{FaceAssignment, Faces};
use crate::rational::q;
use crate::AlgebraElement;

pub const FIXTURES: &[&str] = &["scalar", "diag2", "diag2-bad", "m2-scalar"];

fn ints(v: &[i64]) -> Vec<crate::Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// B = A = Q, E = id.
pub fn scalar() -> BBProbSpace {
    let r = StructuredAlgebra::rationals();
    BBProbSpace::new(r.clone(), r, vec![ints(&[1])], vec![ints(&[1])], vec![ints(&[1])]).expect("scalar fixture")
}

/// B = diagonal 2x2 matrices inside A = M_2, E = diagonal part.
pub fn diag2() -> BBProbSpace {
    let a = StructuredAlgebra::matrix_algebra(2);
    let b = StructuredAlgebra::diagonal_algebra(2);
    // A basis: E11, E12, E21, E22
    let e = vec![ints(&[1, 0]), ints(&[0, 0]), ints(&[0, 0]), ints(&[0, 1])];
    let emb = vec![ints(&[1, 0, 0, 0]), ints(&[0, 0, 0, 1])];
    BBProbSpace::new(a, b, e, emb.clone(), emb).expect("diag2 fixture")
}

/// diag2 with E(T) = T_12 · 1: neither unital nor bimodular.
pub fn diag2_bad() -> BBProbSpace {
    let a = StructuredAlgebra::matrix_algebra(2);
    let b = StructuredAlgebra::diagonal_algebra(2);
    let e = vec![ints(&[0, 0]), ints(&[1, 1]), ints(&[0, 0]), ints(&[0, 0])];
    let emb = vec![ints(&[1, 0, 0, 0]), ints(&[0, 0, 0, 1])];
    BBProbSpace::new(a, b, e, emb.clone(), emb).expect("diag2-bad fixture")
}

/// B = Q, A = M_2, E = the (1,1) entry.
pub fn m2_scalar() -> BBProbSpace {
    let a = StructuredAlgebra::matrix_algebra(2);
    let b = StructuredAlgebra::rationals();
    let e = vec![ints(&[1]), ints(&[0]), ints(&[0]), ints(&[0])];
    let emb = vec![ints(&[1, 0, 0, 1])];
    BBProbSpace::new(a, b, e, emb.clone(), emb).expect("m2-scalar fixture")
}

pub fn by_name(name: &str) -> Result<BBProbSpace> {
    match name {
        "scalar" => Ok(scalar()),
        "diag2" => Ok(diag2()),
        "diag2-bad" => Ok(diag2_bad()),
        "m2-scalar" => Ok(m2_scalar()),
        other => Err(Error::Parse(format!("unknown fixture {other:?}; expected one of {FIXTURES:?}"))),
    }
}

/// Two colours of faces inside m2-scalar, one generator per face.
/// Matrix-unit coefficients are listed in the order E11, E12, E21, E22.
pub fn m2_scalar_family(space: &BBProbSpace) -> FaceAssignment<AlgebraElement> {
    let a = space.algebra();
    let el = |c: &[i64]| a.element_i64(c).expect("M2 element");
    FaceAssignment::new(vec![
        (1, Faces { left: vec![el(&[1, 1, 0, 2])], right: vec![el(&[2, 0, 1, 1])], boolean: vec![el(&[1, 1, 1, 0])] }),
        (2, Faces { left: vec![el(&[1, 0, 1, 1])], right: vec![el(&[0, 1, 1, 3])], boolean: vec![el(&[2, 1, 0, 1])] }),
    ])
    .expect("distinct colours")
}

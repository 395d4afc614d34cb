//! Finite-dimensional unital algebras over Q and B-B-valued probability spaces.

use crate::error::{Error, Result};
use crate::linalg::{rank, Matrix};
use crate::rational::{fmt_q, fmt_vec, from_rats, q, to_rats, Rat, Q};
use crate::report::Report;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

const MAX_JSON_DIM: usize = 32;

/// A unital associative algebra given by structure constants in a fixed basis.
#[derive(Clone, Debug)]
pub struct StructuredAlgebra {
    labels: Vec<String>,
    /// `table[i * dim + j]` is the sparse expansion of `e_i e_j`.
    table: Vec<Vec<(usize, Q)>>,
    unit: Vec<Q>,
    fingerprint: u64,
}

impl PartialEq for StructuredAlgebra {
    fn eq(&self, o: &Self) -> bool {
        self.fingerprint == o.fingerprint
    }
}

/// An element together with the fingerprint of the algebra it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    fp: u64,
    coeffs: Vec<Q>,
}

impl AlgebraElement {
    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn fingerprint(&self) -> u64 {
        self.fp
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|x| x.is_zero())
    }

    fn same(&self, o: &Self) -> Result<()> {
        if self.fp != o.fp || self.coeffs.len() != o.coeffs.len() {
            return Err(Error::MismatchedAlgebra);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(AlgebraElement { fp: self.fp, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        Ok(AlgebraElement { fp: self.fp, coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a - b).collect() })
    }

    pub fn scale(&self, c: &Q) -> Self {
        AlgebraElement { fp: self.fp, coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn to_strings(&self) -> Vec<String> {
        fmt_vec(&self.coeffs)
    }
}

#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    dim: usize,
    #[serde(default)]
    labels: Vec<String>,
    /// Nonzero structure constants `[i, j, k, c]`: `e_i e_j` has coefficient `c` on `e_k`.
    mult: Vec<(usize, usize, usize, Rat)>,
    unit: Vec<Rat>,
}

impl StructuredAlgebra {
    /// Builds and validates an algebra. `mult[i][j]` is the expansion of `e_i e_j`.
    pub fn new(labels: Vec<String>, mult: Vec<Vec<Vec<Q>>>, unit: Vec<Q>) -> Result<Self> {
        let dim = labels.len();
        if mult.len() != dim {
            return Err(Error::SizeMismatch { expected: dim, found: mult.len() });
        }
        let mut table = Vec::with_capacity(dim * dim);
        for row in &mult {
            if row.len() != dim {
                return Err(Error::SizeMismatch { expected: dim, found: row.len() });
            }
            for prod in row {
                if prod.len() != dim {
                    return Err(Error::SizeMismatch { expected: dim, found: prod.len() });
                }
                table.push(prod.iter().cloned().enumerate().filter(|(_, c)| !c.is_zero()).collect());
            }
        }
        Self::from_table(labels, table, unit)
    }

    fn from_table(labels: Vec<String>, table: Vec<Vec<(usize, Q)>>, unit: Vec<Q>) -> Result<Self> {
        let dim = labels.len();
        if unit.len() != dim {
            return Err(Error::SizeMismatch { expected: dim, found: unit.len() });
        }
        let mut h = DefaultHasher::new();
        labels.hash(&mut h);
        for (idx, prod) in table.iter().enumerate() {
            for (k, c) in prod {
                (idx, k, fmt_q(c)).hash(&mut h);
            }
        }
        for c in &unit {
            fmt_q(c).hash(&mut h);
        }
        let alg = StructuredAlgebra { labels, table, unit, fingerprint: h.finish() };
        if let Some((i, j, k)) = alg.associativity_violation() {
            return Err(Error::Invalid(format!("not associative on basis triple ({i},{j},{k})")));
        }
        if let Some(i) = alg.unit_violation() {
            return Err(Error::Invalid(format!("unit fails on basis element {i}")));
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn element(&self, coeffs: Vec<Q>) -> Result<AlgebraElement> {
        if coeffs.len() != self.dim() {
            return Err(Error::SizeMismatch { expected: self.dim(), found: coeffs.len() });
        }
        Ok(AlgebraElement { fp: self.fingerprint, coeffs })
    }

    pub fn element_i64(&self, coeffs: &[i64]) -> Result<AlgebraElement> {
        self.element(coeffs.iter().map(|&c| q(c)).collect())
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        let mut c = vec![Q::zero(); self.dim()];
        c[i] = Q::one();
        AlgebraElement { fp: self.fingerprint, coeffs: c }
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement { fp: self.fingerprint, coeffs: vec![Q::zero(); self.dim()] }
    }

    pub fn one(&self) -> AlgebraElement {
        AlgebraElement { fp: self.fingerprint, coeffs: self.unit.clone() }
    }

    pub fn owns(&self, x: &AlgebraElement) -> bool {
        x.fp == self.fingerprint && x.coeffs.len() == self.dim()
    }

    fn check(&self, x: &AlgebraElement) -> Result<()> {
        if self.owns(x) {
            Ok(())
        } else {
            Err(Error::MismatchedAlgebra)
        }
    }

    /// Sparse expansion of `e_i e_j`.
    pub fn basis_product(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.table[i * self.dim() + j]
    }

    fn mul_raw(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let n = self.dim();
        let mut out = vec![Q::zero(); n];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in &self.table[i * n + j] {
                    out[*k] += &xy * c;
                }
            }
        }
        out
    }

    pub fn mul(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(AlgebraElement { fp: self.fingerprint, coeffs: self.mul_raw(&a.coeffs, &b.coeffs) })
    }

    pub fn product(&self, xs: &[AlgebraElement]) -> Result<AlgebraElement> {
        let mut acc = self.one();
        for x in xs {
            acc = self.mul(&acc, x)?;
        }
        Ok(acc)
    }

    /// Matrix of `y -> x y` in the basis.
    pub fn left_mul_matrix(&self, x: &AlgebraElement) -> Result<Matrix> {
        self.check(x)?;
        let cols: Vec<Vec<Q>> = (0..self.dim()).map(|j| self.mul_raw(&x.coeffs, &self.basis(j).coeffs)).collect();
        Ok(Matrix::from_cols(&cols, self.dim()))
    }

    /// Matrix of `y -> y x` in the basis.
    pub fn right_mul_matrix(&self, x: &AlgebraElement) -> Result<Matrix> {
        self.check(x)?;
        let cols: Vec<Vec<Q>> = (0..self.dim()).map(|j| self.mul_raw(&self.basis(j).coeffs, &x.coeffs)).collect();
        Ok(Matrix::from_cols(&cols, self.dim()))
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.table[i * n + j] == self.table[j * n + i]))
    }

    pub fn associativity_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul_raw(&self.basis(i).coeffs, &self.basis(j).coeffs);
                for k in 0..n {
                    let ek = self.basis(k).coeffs;
                    let l = self.mul_raw(&ij, &ek);
                    let jk = self.mul_raw(&self.basis(j).coeffs, &ek);
                    let r = self.mul_raw(&self.basis(i).coeffs, &jk);
                    if l != r {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn unit_violation(&self) -> Option<usize> {
        (0..self.dim()).find(|&i| {
            let e = self.basis(i).coeffs;
            self.mul_raw(&self.unit, &e) != e || self.mul_raw(&e, &self.unit) != e
        })
    }

    /// The field Q as a one-dimensional algebra.
    pub fn rationals() -> Self {
        Self::new(vec!["1".into()], vec![vec![vec![q(1)]]], vec![q(1)]).expect("Q is an algebra")
    }

    /// The full matrix algebra M_n with matrix-unit basis `E_ij` (row-major).
    pub fn matrix_algebra(n: usize) -> Self {
        let d = n * n;
        let labels = (0..d).map(|x| format!("E{}{}", x / n + 1, x % n + 1)).collect();
        let mut table = vec![Vec::new(); d * d];
        for a in 0..d {
            for b in 0..d {
                let (i, j) = (a / n, a % n);
                let (k, l) = (b / n, b % n);
                if j == k {
                    table[a * d + b] = vec![(i * n + l, Q::one())];
                }
            }
        }
        let unit = (0..d).map(|x| if x / n == x % n { Q::one() } else { Q::zero() }).collect();
        Self::from_table(labels, table, unit).expect("matrix algebra")
    }

    /// Diagonal n x n matrices with basis of diagonal idempotents.
    pub fn diagonal_algebra(n: usize) -> Self {
        let labels = (0..n).map(|i| format!("d{}", i + 1)).collect();
        let mut table = vec![Vec::new(); n * n];
        for i in 0..n {
            table[i * n + i] = vec![(i, Q::one())];
        }
        Self::from_table(labels, table, vec![Q::one(); n]).expect("diagonal algebra")
    }

    /// Upper-triangular 2 x 2 matrices with basis E11, E12, E22.
    pub fn upper_triangular2() -> Self {
        // indices: 0 = E11, 1 = E12, 2 = E22
        let mut table = vec![Vec::new(); 9];
        table[0] = vec![(0, Q::one())];
        table[1] = vec![(1, Q::one())];
        table[3 + 2] = vec![(1, Q::one())];
        table[2 * 3 + 2] = vec![(2, Q::one())];
        let labels = vec!["E11".into(), "E12".into(), "E22".into()];
        Self::from_table(labels, table, vec![q(1), q(0), q(1)]).expect("T2")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let mut mult = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in &self.table[i * n + j] {
                    mult.push((i, j, *k, Rat(c.clone())));
                }
            }
        }
        serde_json::to_value(AlgebraJson { dim: n, labels: self.labels.clone(), mult, unit: to_rats(&self.unit) })
            .expect("algebra serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let raw: AlgebraJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: AlgebraJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: AlgebraJson) -> Result<Self> {
        let n = raw.dim;
        if n == 0 || n > MAX_JSON_DIM {
            return Err(Error::Parse(format!("algebra dimension {n} outside 1..={MAX_JSON_DIM}")));
        }
        let labels = if raw.labels.is_empty() {
            (0..n).map(|i| format!("e{}", i + 1)).collect()
        } else if raw.labels.len() == n {
            raw.labels
        } else {
            return Err(Error::SizeMismatch { expected: n, found: raw.labels.len() });
        };
        let mut dense = vec![vec![vec![Q::zero(); n]; n]; n];
        for (i, j, k, c) in raw.mult {
            if i >= n || j >= n || k >= n {
                return Err(Error::Parse(format!("structure constant index ({i},{j},{k}) out of range")));
            }
            dense[i][j][k] += c.0;
        }
        Self::new(labels, dense, from_rats(raw.unit))
    }
}

/// A B-B-valued probability space (A, E, L, R) with all maps in fixed bases.
#[derive(Clone, Debug)]
pub struct BBProbSpace {
    a: StructuredAlgebra,
    b: StructuredAlgebra,
    /// `e_images[i]` = E(f_i) in B coordinates.
    e_images: Vec<Vec<Q>>,
    /// `left_images[j]` = L(e_j) in A coordinates.
    left_images: Vec<Vec<Q>>,
    right_images: Vec<Vec<Q>>,
}

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    #[serde(rename = "A")]
    a: serde_json::Value,
    #[serde(rename = "B")]
    b: serde_json::Value,
    expectation: Vec<Vec<Rat>>,
    left_embed: Vec<Vec<Rat>>,
    right_embed: Vec<Vec<Rat>>,
}

impl BBProbSpace {
    /// Shapes are validated here; the axioms are checked by [`BBProbSpace::check_bb_axioms`].
    pub fn new(
        a: StructuredAlgebra,
        b: StructuredAlgebra,
        e_images: Vec<Vec<Q>>,
        left_images: Vec<Vec<Q>>,
        right_images: Vec<Vec<Q>>,
    ) -> Result<Self> {
        let (da, db) = (a.dim(), b.dim());
        let check = |v: &Vec<Vec<Q>>, outer: usize, inner: usize| -> Result<()> {
            if v.len() != outer {
                return Err(Error::SizeMismatch { expected: outer, found: v.len() });
            }
            for x in v {
                if x.len() != inner {
                    return Err(Error::SizeMismatch { expected: inner, found: x.len() });
                }
            }
            Ok(())
        };
        check(&e_images, da, db)?;
        check(&left_images, db, da)?;
        check(&right_images, db, da)?;
        Ok(BBProbSpace { a, b, e_images, left_images, right_images })
    }

    pub fn algebra(&self) -> &StructuredAlgebra {
        &self.a
    }

    pub fn base(&self) -> &StructuredAlgebra {
        &self.b
    }

    pub fn expect(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.a.owns(x) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut out = vec![Q::zero(); self.b.dim()];
        for (i, c) in x.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&self.e_images[i]) {
                *o += c * e;
            }
        }
        self.b.element(out)
    }

    fn embed(&self, images: &[Vec<Q>], b: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.b.owns(b) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut out = vec![Q::zero(); self.a.dim()];
        for (j, c) in b.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, e) in out.iter_mut().zip(&images[j]) {
                *o += c * e;
            }
        }
        self.a.element(out)
    }

    /// L_b in A.
    pub fn left(&self, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.embed(&self.left_images, b)
    }

    /// R_b in A.
    pub fn right(&self, b: &AlgebraElement) -> Result<AlgebraElement> {
        self.embed(&self.right_images, b)
    }

    /// Basis of the left algebra (commutant of every R_b) or the right
    /// algebra (commutant of every L_b). Boolean means left.
    pub fn side_basis(&self, side: crate::bnc::Side) -> Result<Vec<AlgebraElement>> {
        let da = self.a.dim();
        let mut rows: Vec<Vec<Q>> = Vec::new();
        for j in 0..self.b.dim() {
            let e = self.b.basis(j);
            let y = match side {
                crate::bnc::Side::Right => self.left(&e)?,
                _ => self.right(&e)?,
            };
            // x y - y x = (R_y - L_y) x
            let m = self.a.right_mul_matrix(&y)?.sub(&self.a.left_mul_matrix(&y)?);
            rows.extend((0..da).map(|i| m.row(i).to_vec()));
        }
        if rows.is_empty() {
            return Ok((0..da).map(|i| self.a.basis(i)).collect());
        }
        let m = Matrix::from_rows(rows, da).expect("rectangular");
        crate::linalg::nullspace(&m).into_iter().map(|v| self.a.element(v)).collect()
    }

    /// A seeded random element of the given side with small rational coefficients.
    pub fn random_side_element<R: rand::Rng>(&self, side: crate::bnc::Side, rng: &mut R) -> Result<AlgebraElement> {
        let mut acc = self.a.zero();
        for x in self.side_basis(side)? {
            let c = crate::rational::qr(rng.gen_range(-3..=3), rng.gen_range(1..=2));
            acc = acc.add(&x.scale(&c))?;
        }
        Ok(acc)
    }

    /// Checks every axiom on basis elements; each axiom is one claim.
    pub fn check_bb_axioms(&self) -> Report {
        let mut rep = Report::new();
        let (a, b) = (&self.a, &self.b);
        let (da, db) = (a.dim(), b.dim());
        let show = |x: &AlgebraElement| json!(x.to_strings());

        let assoc_a = a.associativity_violation();
        rep.record("A-associative", assoc_a.is_none(), || json!(assoc_a));
        let assoc_b = b.associativity_violation();
        rep.record("B-associative", assoc_b.is_none(), || json!(assoc_b));
        let unit_a = a.unit_violation();
        rep.record("A-unital", unit_a.is_none(), || json!(unit_a));
        let unit_b = b.unit_violation();
        rep.record("B-unital", unit_b.is_none(), || json!(unit_b));

        let l1 = self.left(&b.one()).unwrap();
        rep.record("left-unital", l1 == a.one(), || json!({ "L(1)": show(&l1) }));
        let r1 = self.right(&b.one()).unwrap();
        rep.record("right-unital", r1 == a.one(), || json!({ "R(1)": show(&r1) }));

        let li: Vec<AlgebraElement> = (0..db).map(|i| self.left(&b.basis(i)).unwrap()).collect();
        let ri: Vec<AlgebraElement> = (0..db).map(|i| self.right(&b.basis(i)).unwrap()).collect();
        for i in 0..db {
            for j in 0..db {
                let bij = b.mul(&b.basis(i), &b.basis(j)).unwrap();
                let lhs = self.left(&bij).unwrap();
                let rhs = a.mul(&li[i], &li[j]).unwrap();
                rep.record("left-homomorphism", lhs == rhs, || json!({ "i": i, "j": j }));
                let lhs = self.right(&bij).unwrap();
                let rhs = a.mul(&ri[j], &ri[i]).unwrap();
                rep.record("right-antihomomorphism", lhs == rhs, || json!({ "i": i, "j": j }));
                let lr = a.mul(&li[i], &ri[j]).unwrap();
                let rl = a.mul(&ri[j], &li[i]).unwrap();
                rep.record("faces-commute", lr == rl, || json!({ "left": i, "right": j }));
            }
        }
        let lrank = rank(&self.left_images);
        rep.record("left-injective", lrank == db, || json!({ "rank": lrank }));
        let rrank = rank(&self.right_images);
        rep.record("right-injective", rrank == db, || json!({ "rank": rrank }));

        let e1 = self.expect(&a.one()).unwrap();
        rep.record("expectation-unital", e1 == b.one(), || json!({ "E(1)": show(&e1) }));
        for t in 0..da {
            let tt = a.basis(t);
            let et = self.expect(&tt).unwrap();
            for i in 0..db {
                for j in 0..db {
                    let x = a.product(&[li[i].clone(), ri[j].clone(), tt.clone()]).unwrap();
                    let lhs = self.expect(&x).unwrap();
                    let rhs = b.product(&[b.basis(i), et.clone(), b.basis(j)]).unwrap();
                    rep.record("expectation-bimodular", lhs == rhs, || {
                        json!({ "T": t, "left": i, "right": j, "lhs": show(&lhs), "rhs": show(&rhs) })
                    });
                }
                let tl = self.expect(&a.mul(&tt, &li[i]).unwrap()).unwrap();
                let tr = self.expect(&a.mul(&tt, &ri[i]).unwrap()).unwrap();
                rep.record("expectation-balanced", tl == tr, || {
                    json!({ "T": t, "b": i, "E(TL)": show(&tl), "E(TR)": show(&tr) })
                });
            }
        }
        rep
    }

    pub fn to_json(&self) -> serde_json::Value {
        let conv = |v: &Vec<Vec<Q>>| v.iter().map(|x| to_rats(x)).collect::<Vec<_>>();
        serde_json::to_value(SpaceJson {
            a: self.a.to_json(),
            b: self.b.to_json(),
            expectation: conv(&self.e_images),
            left_embed: conv(&self.left_images),
            right_embed: conv(&self.right_images),
        })
        .expect("space serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: SpaceJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let a = StructuredAlgebra::from_json(&raw.a)?;
        let b = StructuredAlgebra::from_json(&raw.b)?;
        let conv = |v: Vec<Vec<Rat>>| v.into_iter().map(from_rats).collect::<Vec<_>>();
        Self::new(a, b, conv(raw.expectation), conv(raw.left_embed), conv(raw.right_embed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_units_multiply() {
        let m = StructuredAlgebra::matrix_algebra(2);
        let e12 = m.basis(1);
        let e21 = m.basis(2);
        assert_eq!(m.mul(&e12, &e21).unwrap(), m.basis(0));
        assert!(m.mul(&e12, &e12).unwrap().is_zero());
        assert!(!m.is_commutative());
    }

    #[test]
    fn mismatched_algebras_are_rejected() {
        let m = StructuredAlgebra::matrix_algebra(2);
        let d = StructuredAlgebra::diagonal_algebra(2);
        assert_eq!(m.mul(&m.one(), &d.one()), Err(Error::MismatchedAlgebra));
        assert_eq!(m.one().add(&d.one()), Err(Error::MismatchedAlgebra));
    }

    #[test]
    fn nonassociative_table_is_rejected() {
        // e0 unit, e1*e1 = e0 + e1 is fine; break it by making e1*e1 = e2 with no closure.
        let mut mult = vec![vec![vec![Q::zero(); 2]; 2]; 2];
        mult[0][0][0] = q(1);
        mult[0][1][1] = q(1);
        mult[1][0][1] = q(1);
        mult[1][1][0] = q(2);
        assert!(StructuredAlgebra::new(vec!["1".into(), "x".into()], mult.clone(), vec![q(1), q(0)]).is_ok());
        mult[1][1][1] = q(1);
        mult[1][0][0] = q(1);
        assert!(StructuredAlgebra::new(vec!["1".into(), "x".into()], mult, vec![q(1), q(0)]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let t = StructuredAlgebra::upper_triangular2();
        let back = StructuredAlgebra::from_json(&t.to_json()).unwrap();
        assert_eq!(back.fingerprint(), t.fingerprint());
    }
}

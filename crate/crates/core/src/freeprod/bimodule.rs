//! B-B bimodules with a specified B summand, and the bimodule attached to a
//! B-B-valued probability space.

use crate::algebra::{AlgebraElement, BBProbSpace, StructuredAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, Echelon, Matrix, Quotient};
use crate::rational::Q;
use num_traits::Zero;

/// Column-sparse copy of a matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseCols {
    pub rows: usize,
    pub cols: Vec<Vec<(usize, Q)>>,
}

impl SparseCols {
    pub fn from_matrix(m: &Matrix) -> Self {
        let cols = (0..m.cols())
            .map(|j| (0..m.rows()).filter(|&i| !m.get(i, j).is_zero()).map(|i| (i, m.get(i, j).clone())).collect())
            .collect();
        SparseCols { rows: m.rows(), cols }
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, c) in &self.cols[j] {
                out[*i] += x * c;
            }
        }
        out
    }
}

/// X = B ⊕ X°, coordinates always listed B first. B acts on its summand by
/// multiplication and leaves X° invariant.
#[derive(Clone, Debug)]
pub struct Bimodule {
    base: StructuredAlgebra,
    kernel_labels: Vec<String>,
    /// Actions of the basis of B on X°.
    left: Vec<Matrix>,
    right: Vec<Matrix>,
    full_left: Vec<Matrix>,
    full_right: Vec<Matrix>,
    sparse_left: Vec<SparseCols>,
    sparse_right: Vec<SparseCols>,
}

impl Bimodule {
    pub fn new(base: StructuredAlgebra, kernel_labels: Vec<String>, left: Vec<Matrix>, right: Vec<Matrix>) -> Result<Self> {
        let (bd, kd) = (base.dim(), kernel_labels.len());
        for m in left.iter().chain(&right) {
            if m.rows() != kd || m.cols() != kd {
                return Err(Error::SizeMismatch { expected: kd, found: m.rows().max(m.cols()) });
            }
        }
        if left.len() != bd || right.len() != bd {
            return Err(Error::SizeMismatch { expected: bd, found: left.len().min(right.len()) });
        }
        let mut full_left = Vec::with_capacity(bd);
        let mut full_right = Vec::with_capacity(bd);
        for i in 0..bd {
            let e = base.basis(i);
            full_left.push(base.left_mul_matrix(&e)?.direct_sum(&left[i]));
            full_right.push(base.right_mul_matrix(&e)?.direct_sum(&right[i]));
        }
        let sparse_left = left.iter().map(SparseCols::from_matrix).collect();
        let sparse_right = right.iter().map(SparseCols::from_matrix).collect();
        let m = Bimodule { base, kernel_labels, left, right, full_left, full_right, sparse_left, sparse_right };
        m.validate()?;
        Ok(m)
    }

    /// X° = 0.
    pub fn trivial(base: StructuredAlgebra) -> Result<Self> {
        let n = base.dim();
        Self::new(base, vec![], vec![Matrix::zeros(0, 0); n], vec![Matrix::zeros(0, 0); n])
    }

    /// X° = B with the regular actions.
    pub fn regular(base: StructuredAlgebra) -> Result<Self> {
        let labels = base.labels().iter().map(|l| format!("x{l}")).collect();
        let left = (0..base.dim()).map(|i| base.left_mul_matrix(&base.basis(i))).collect::<Result<Vec<_>>>()?;
        let right = (0..base.dim()).map(|i| base.right_mul_matrix(&base.basis(i))).collect::<Result<Vec<_>>>()?;
        Self::new(base, labels, left, right)
    }

    fn validate(&self) -> Result<()> {
        let b = &self.base;
        let n = b.dim();
        let combo = |ms: &[Matrix], x: &AlgebraElement| -> Matrix {
            let mut acc = Matrix::zeros(self.kdim(), self.kdim());
            for (c, m) in x.coeffs().iter().zip(ms) {
                if !c.is_zero() {
                    acc = acc.add(&m.scale(c));
                }
            }
            acc
        };
        let id = Matrix::identity(self.kdim());
        if combo(&self.left, &b.one()) != id || combo(&self.right, &b.one()) != id {
            return Err(Error::Invalid("unit of B must act as the identity".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let ij = b.mul(&b.basis(i), &b.basis(j))?;
                if combo(&self.left, &ij) != self.left[i].mul(&self.left[j]) {
                    return Err(Error::Invalid(format!("left action not multiplicative at ({i},{j})")));
                }
                if combo(&self.right, &ij) != self.right[j].mul(&self.right[i]) {
                    return Err(Error::Invalid(format!("right action not multiplicative at ({i},{j})")));
                }
                if self.left[i].mul(&self.right[j]) != self.right[j].mul(&self.left[i]) {
                    return Err(Error::Invalid(format!("left and right actions do not commute at ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &StructuredAlgebra {
        &self.base
    }

    pub fn bdim(&self) -> usize {
        self.base.dim()
    }

    pub fn kdim(&self) -> usize {
        self.kernel_labels.len()
    }

    pub fn dim(&self) -> usize {
        self.bdim() + self.kdim()
    }

    pub fn kernel_labels(&self) -> &[String] {
        &self.kernel_labels
    }

    pub fn labels(&self) -> Vec<String> {
        self.base.labels().iter().chain(&self.kernel_labels).cloned().collect()
    }

    pub fn kernel_left(&self, i: usize) -> &SparseCols {
        &self.sparse_left[i]
    }

    pub fn kernel_right(&self, i: usize) -> &SparseCols {
        &self.sparse_right[i]
    }

    pub fn kernel_left_matrix(&self, i: usize) -> &Matrix {
        &self.left[i]
    }

    pub fn kernel_right_matrix(&self, i: usize) -> &Matrix {
        &self.right[i]
    }

    fn combine(&self, ms: &[Matrix], b: &AlgebraElement) -> Result<Matrix> {
        if !self.base.owns(b) {
            return Err(Error::MismatchedAlgebra);
        }
        let mut acc = Matrix::zeros(self.dim(), self.dim());
        for (c, m) in b.coeffs().iter().zip(ms) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        Ok(acc)
    }

    /// Left action of `b` on all of X.
    pub fn left_action(&self, b: &AlgebraElement) -> Result<Matrix> {
        self.combine(&self.full_left, b)
    }

    pub fn right_action(&self, b: &AlgebraElement) -> Result<Matrix> {
        self.combine(&self.full_right, b)
    }

    pub fn unit_vector(&self) -> Vec<Q> {
        let mut v = self.base.one().coeffs().to_vec();
        v.resize(self.dim(), Q::zero());
        v
    }

    /// `T` lies in L_l(X): it commutes with every right action.
    pub fn is_left_operator(&self, t: &Matrix) -> bool {
        self.full_right.iter().all(|r| t.mul(r) == r.mul(t))
    }

    /// `T` lies in L_r(X): it commutes with every left action.
    pub fn is_right_operator(&self, t: &Matrix) -> bool {
        self.full_left.iter().all(|l| t.mul(l) == l.mul(t))
    }

    /// Y = X ⊕ X with Y° = X° ⊕ X. Coordinates [ξ1 | ξ2] are already B first.
    pub fn doubled(&self) -> Result<Bimodule> {
        let mut labels: Vec<String> = self.kernel_labels.iter().map(|l| format!("1:{l}")).collect();
        labels.extend(self.labels().iter().map(|l| format!("2:{l}")));
        let left = (0..self.bdim()).map(|i| self.left[i].direct_sum(&self.full_left[i])).collect();
        let right = (0..self.bdim()).map(|i| self.right[i].direct_sum(&self.full_right[i])).collect();
        Bimodule::new(self.base.clone(), labels, left, right)
    }
}

/// Operators on the doubled module Y = X ⊕ X built from an operator `z` on X.
pub mod doubled_ops {
    use super::*;

    /// T_Z(ξ1 ⊕ ξ2) = Z ξ2 ⊕ 0.
    pub fn t_op(z: &Matrix) -> Matrix {
        let d = z.rows();
        let mut m = Matrix::zeros(2 * d, 2 * d);
        m.place(0, d, z);
        m
    }

    /// S(ξ1 ⊕ ξ2) = 0 ⊕ ξ1.
    pub fn s_op(d: usize) -> Matrix {
        let mut m = Matrix::zeros(2 * d, 2 * d);
        m.place(d, 0, &Matrix::identity(d));
        m
    }

    /// D_Z = Z ⊕ Z.
    pub fn d_op(z: &Matrix) -> Matrix {
        z.direct_sum(z)
    }
}

/// The bimodule X = B ⊕ ker E / N of a space, N spanned by T L_b - T R_b,
/// with the representation θ of A on X.
#[derive(Clone, Debug)]
pub struct SpaceModule {
    pub module: Bimodule,
    /// θ of each basis element of A.
    theta: Vec<Matrix>,
    a_fingerprint: u64,
}

impl SpaceModule {
    pub fn theta(&self, x: &AlgebraElement) -> Result<Matrix> {
        if x.fingerprint() != self.a_fingerprint || x.dim() != self.theta.len() {
            return Err(Error::MismatchedAlgebra);
        }
        let d = self.module.dim();
        let mut acc = Matrix::zeros(d, d);
        for (c, m) in x.coeffs().iter().zip(&self.theta) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        Ok(acc)
    }

    pub fn theta_basis(&self, i: usize) -> &Matrix {
        &self.theta[i]
    }
}

pub fn build_bimodule_from_space(space: &BBProbSpace) -> Result<SpaceModule> {
    let (a, b) = (space.algebra(), space.base());
    let (da, db) = (a.dim(), b.dim());
    let mut e_mat = Matrix::zeros(db, da);
    for t in 0..da {
        let et = space.expect(&a.basis(t))?;
        for (i, c) in et.coeffs().iter().enumerate() {
            e_mat.set(i, t, c.clone());
        }
    }
    let kernel = nullspace(&e_mat);
    let li: Vec<AlgebraElement> = (0..db).map(|i| space.left(&b.basis(i))).collect::<Result<_>>()?;
    let ri: Vec<AlgebraElement> = (0..db).map(|i| space.right(&b.basis(i))).collect::<Result<_>>()?;
    let mut relations = Vec::new();
    for t in 0..da {
        for i in 0..db {
            let x = a.mul(&a.basis(t), &li[i])?.sub(&a.mul(&a.basis(t), &ri[i])?)?;
            relations.push(x.coeffs().to_vec());
        }
    }
    let kernel_ech = Echelon::new(&kernel, da);
    if relations.iter().any(|r| !kernel_ech.contains(r)) {
        return Err(Error::Invalid("expectation is not balanced: T L_b - T R_b leaves ker E".into()));
    }
    let quot = Quotient::new(&kernel, &relations, da);
    let qd = quot.dim();
    let labels: Vec<String> = (0..qd)
        .map(|r| {
            let rep = quot.representative(r);
            let lead = rep.iter().position(|x| !x.is_zero()).unwrap_or(0);
            format!("[{}]", a.labels()[lead])
        })
        .collect();
    let d = db + qd;
    // image of v ∈ A in X: E(v) ⊕ q(v - L_{E(v)})
    let image = |v: &AlgebraElement| -> Result<Vec<Q>> {
        let ev = space.expect(v)?;
        let rest = v.sub(&space.left(&ev)?)?;
        let coords = quot
            .coords(rest.coeffs())
            .ok_or_else(|| Error::Invalid("E(L_b) differs from b; the space is not unital".into()))?;
        let mut col = ev.coeffs().to_vec();
        col.extend(coords);
        Ok(col)
    };
    let mut theta = Vec::with_capacity(da);
    for t in 0..da {
        let tt = a.basis(t);
        let mut cols = Vec::with_capacity(d);
        for j in 0..db {
            cols.push(image(&a.mul(&tt, &li[j])?)?);
        }
        for r in 0..qd {
            let rep = a.element(quot.representative(r).to_vec())?;
            cols.push(image(&a.mul(&tt, &rep)?)?);
        }
        theta.push(Matrix::from_cols(&cols, d));
    }
    let combo = |x: &AlgebraElement| -> Matrix {
        let mut acc = Matrix::zeros(d, d);
        for (c, m) in x.coeffs().iter().zip(&theta) {
            if !c.is_zero() {
                acc = acc.add(&m.scale(c));
            }
        }
        acc
    };
    let kernel_block = |m: &Matrix| -> Matrix {
        let mut k = Matrix::zeros(qd, qd);
        for i in 0..qd {
            for j in 0..qd {
                k.set(i, j, m.get(db + i, db + j).clone());
            }
        }
        k
    };
    let left: Vec<Matrix> = li.iter().map(|x| kernel_block(&combo(x))).collect();
    let right: Vec<Matrix> = ri.iter().map(|x| kernel_block(&combo(x))).collect();
    let module = Bimodule::new(b.clone(), labels, left, right)?;
    for i in 0..db {
        if combo(&li[i]) != module.full_left[i] || combo(&ri[i]) != module.full_right[i] {
            return Err(Error::Invalid("B summand is not a sub-bimodule; check the space axioms".into()));
        }
    }
    Ok(SpaceModule { module, theta, a_fingerprint: a.fingerprint() })
}

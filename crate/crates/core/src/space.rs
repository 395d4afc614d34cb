//! Spaces in which operator words have B-valued expectations.

use crate::algebra::{AlgebraElement, BBProbSpace, StructuredAlgebra};
use crate::bnc::Side;
use crate::error::Result;
use crate::linalg::Echelon;
use std::fmt::Debug;
use std::hash::Hash;

/// One factor of a word: an element of the space or an embedded copy of B.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Letter<E> {
    Elem(E),
    /// L_b
    Left(AlgebraElement),
    /// R_b
    Right(AlgebraElement),
}

pub trait MomentSpace {
    type Elem: Clone + Eq + Hash + Debug;

    fn base(&self) -> &StructuredAlgebra;

    /// E of the product of the letters, left to right.
    fn expect(&self, word: &[Letter<Self::Elem>]) -> Result<AlgebraElement>;

    /// Membership in the left algebra (commutes with every R_b) or the right
    /// algebra (commutes with every L_b). Boolean elements are left elements.
    fn in_side(&self, x: &Self::Elem, side: Side) -> Result<bool>;

    fn is_zero_product(&self, word: &[Letter<Self::Elem>]) -> Result<bool>;

    /// Whether `x` lies in the span of the given words. `None` when the space
    /// cannot decide it.
    fn span_contains(&self, _gens: &[Vec<Letter<Self::Elem>>], _x: &[Letter<Self::Elem>]) -> Result<Option<bool>> {
        Ok(None)
    }

    fn describe(&self, x: &Self::Elem) -> String;
}

impl BBProbSpace {
    pub fn evaluate(&self, word: &[Letter<AlgebraElement>]) -> Result<AlgebraElement> {
        let a = self.algebra();
        let mut acc = a.one();
        for l in word {
            let x = match l {
                Letter::Elem(x) => x.clone(),
                Letter::Left(b) => self.left(b)?,
                Letter::Right(b) => self.right(b)?,
            };
            acc = a.mul(&acc, &x)?;
        }
        Ok(acc)
    }
}

impl MomentSpace for BBProbSpace {
    type Elem = AlgebraElement;

    fn base(&self) -> &StructuredAlgebra {
        BBProbSpace::base(self)
    }

    fn expect(&self, word: &[Letter<AlgebraElement>]) -> Result<AlgebraElement> {
        BBProbSpace::expect(self, &self.evaluate(word)?)
    }

    fn in_side(&self, x: &AlgebraElement, side: Side) -> Result<bool> {
        let a = self.algebra();
        let b = BBProbSpace::base(self);
        for i in 0..b.dim() {
            let e = b.basis(i);
            let y = match side {
                Side::Left | Side::Bool => self.right(&e)?,
                Side::Right => self.left(&e)?,
            };
            if a.mul(x, &y)? != a.mul(&y, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn is_zero_product(&self, word: &[Letter<AlgebraElement>]) -> Result<bool> {
        Ok(self.evaluate(word)?.is_zero())
    }

    fn span_contains(&self, gens: &[Vec<Letter<AlgebraElement>>], x: &[Letter<AlgebraElement>]) -> Result<Option<bool>> {
        let vs = gens.iter().map(|g| self.evaluate(g).map(|e| e.coeffs().to_vec())).collect::<Result<Vec<_>>>()?;
        let ech = Echelon::new(&vs, self.algebra().dim());
        Ok(Some(ech.contains(self.evaluate(x)?.coeffs())))
    }

    fn describe(&self, x: &AlgebraElement) -> String {
        let labels = self.algebra().labels();
        let terms: Vec<String> = x
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !num_traits::Zero::is_zero(*c))
            .map(|(i, c)| format!("{}*{}", crate::rational::fmt_q(c), labels[i]))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

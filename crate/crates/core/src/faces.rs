//! Assignments of left, right and Boolean faces to colours.

use crate::bnc::Side;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::space::{Letter, MomentSpace};
use serde_json::json;

/// Generators of the faces of one colour.
#[derive(Clone, Debug)]
pub struct Faces<E> {
    pub left: Vec<E>,
    pub right: Vec<E>,
    pub boolean: Vec<E>,
}

impl<E> Faces<E> {
    pub fn side(&self, s: Side) -> &[E] {
        match s {
            Side::Left => &self.left,
            Side::Right => &self.right,
            Side::Bool => &self.boolean,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FaceAssignment<E> {
    pub colours: Vec<u32>,
    pub faces: Vec<Faces<E>>,
}

impl<E: Clone> FaceAssignment<E> {
    pub fn new(entries: Vec<(u32, Faces<E>)>) -> Result<Self> {
        let (colours, faces): (Vec<u32>, Vec<Faces<E>>) = entries.into_iter().unzip();
        let mut sorted = colours.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != colours.len() {
            return Err(Error::Colouring("colour listed twice".into()));
        }
        Ok(FaceAssignment { colours, faces })
    }

    pub fn index_of(&self, colour: u32) -> Result<usize> {
        self.colours.iter().position(|&c| c == colour).ok_or_else(|| Error::Colouring(format!("unknown colour {colour}")))
    }

    pub fn get(&self, colour: u32) -> Result<&Faces<E>> {
        Ok(&self.faces[self.index_of(colour)?])
    }

    pub fn generators(&self, colour: u32, side: Side) -> Result<&[E]> {
        Ok(self.get(colour)?.side(side))
    }
}

/// Side memberships of every generator, and closure of each Boolean face
/// under L_b · L_b' checked on generators against words of length at most 2.
pub fn check_faces<S: MomentSpace>(space: &S, fa: &FaceAssignment<S::Elem>) -> Result<Report> {
    let mut rep = Report::new();
    let b = space.base();
    for (c, f) in fa.colours.iter().zip(&fa.faces) {
        for side in [Side::Left, Side::Right, Side::Bool] {
            let id = format!("{}-face-side", side.name());
            rep.touch(&id);
            for (i, x) in f.side(side).iter().enumerate() {
                let ok = space.in_side(x, side)?;
                rep.record(&id, ok, || json!({ "colour": c, "index": i, "element": space.describe(x) }));
            }
        }
        let mut span: Vec<Vec<Letter<S::Elem>>> = f.boolean.iter().map(|g| vec![Letter::Elem(g.clone())]).collect();
        for g in &f.boolean {
            for h in &f.boolean {
                span.push(vec![Letter::Elem(g.clone()), Letter::Elem(h.clone())]);
            }
        }
        for (gi, g) in f.boolean.iter().enumerate() {
            for i in 0..b.dim() {
                for j in 0..b.dim() {
                    let w = vec![Letter::Left(b.basis(i)), Letter::Elem(g.clone()), Letter::Left(b.basis(j))];
                    if let Some(ok) = space.span_contains(&span, &w)? {
                        rep.record("boolean-face-closure", ok, || json!({ "colour": c, "generator": gi, "b": i, "b'": j }));
                    }
                }
            }
        }
    }
    Ok(rep)
}

//! Free-free-Boolean families: the doubled-bimodule embedding into a free
//! product, the axioms of a bi-free ffb system, and independence checked by
//! comparing moments with a free-product representation.

use crate::algebra::{AlgebraElement, BBProbSpace};
use crate::bnc::{lr_replacement, ChiMap, EpsilonMap, Side};
use crate::error::{Error, Result};
use crate::faces::{check_faces, FaceAssignment, Faces};
use crate::freeprod::bimodule::{build_bimodule_from_space, doubled_ops, Bimodule, SparseCols, SpaceModule};
use crate::freeprod::lrdecomp::{direct_word, verify_lr_split, LrOperand};
use crate::freeprod::{FpVector, FreeProduct, OpRef, OperatorModel, Prim};
use crate::linalg::Matrix;
use crate::moments::{FfbSlot, MomentEngine};
use crate::report::Report;
use crate::space::{Letter, MomentSpace};
use itertools::Itertools;
use serde_json::json;
use std::collections::HashMap;
use std::sync::Arc;

const SHAPE_SIDES: [Side; 3] = [Side::Left, Side::Right, Side::Bool];

/// Operators ℓ_k, r_k, m_k of a family on the bimodules X_k.
pub trait Representation<E> {
    fn modules(&self) -> Vec<(u32, Bimodule)>;

    /// The operator on X_k standing for `x` in face `side` of colour `colour`.
    fn represent(&self, colour: u32, side: Side, x: &E) -> Result<Matrix>;
}

/// Every face represented through θ on the module of the whole space.
pub struct ThetaRepresentation {
    module: SpaceModule,
    colours: Vec<u32>,
}

impl ThetaRepresentation {
    pub fn new(space: &BBProbSpace, colours: &[u32]) -> Result<Self> {
        Ok(ThetaRepresentation { module: build_bimodule_from_space(space)?, colours: colours.to_vec() })
    }
}

impl Representation<AlgebraElement> for ThetaRepresentation {
    fn modules(&self) -> Vec<(u32, Bimodule)> {
        self.colours.iter().map(|&c| (c, self.module.module.clone())).collect()
    }

    fn represent(&self, _: u32, _: Side, x: &AlgebraElement) -> Result<Matrix> {
        self.module.theta(x)
    }
}

/// A word of a family: shape χ̂, colouring ε̂ and generators substituted.
#[derive(Clone, Debug)]
pub struct FamilyWord<E> {
    pub chi_hat: ChiMap,
    pub eps_hat: EpsilonMap,
    pub elems: Vec<E>,
}

impl<E: Clone> FamilyWord<E> {
    pub fn letters(&self) -> Vec<Letter<E>> {
        self.elems.iter().cloned().map(Letter::Elem).collect()
    }
}

/// All words of length `n` with sides from `sides` and any colouring, one
/// per generator substitution.
pub fn family_words<E: Clone>(fam: &FaceAssignment<E>, n: usize, sides: &[Side]) -> Vec<FamilyWord<E>> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    for shape in std::iter::repeat_n(sides.iter().copied(), n).multi_cartesian_product() {
        for cols in std::iter::repeat_n(fam.colours.iter().copied(), n).multi_cartesian_product() {
            let lists: Vec<&[E]> =
                shape.iter().zip(&cols).map(|(s, c)| fam.generators(*c, *s).unwrap_or(&[])).collect();
            if lists.iter().any(|l| l.is_empty()) {
                continue;
            }
            for elems in lists.iter().map(|l| l.iter().cloned()).multi_cartesian_product() {
                out.push(FamilyWord { chi_hat: ChiMap::new(shape.clone()), eps_hat: EpsilonMap::new(cols.clone()), elems });
            }
        }
    }
    out
}

/// Evaluates μ̃_1(Z_1) ⋯ μ̃_n(Z_n) 1_B, with P_k λ_k(m_k(Z)) P_k on Boolean slots.
fn represented_word<E: Clone + Eq + std::hash::Hash>(
    fp: &FreeProduct,
    rep: &dyn Representation<E>,
    cache: &mut HashMap<(u32, Side, E), Arc<SparseCols>>,
    w: &FamilyWord<E>,
) -> Result<FpVector> {
    let mut v = fp.unit();
    for i in (0..w.elems.len()).rev() {
        let (s, c) = (w.chi_hat.sides()[i], w.eps_hat.colours()[i]);
        let k = fp.index_of(c)?;
        let key = (c, s, w.elems[i].clone());
        let op = match cache.get(&key) {
            Some(op) => op.clone(),
            None => {
                let op = Arc::new(SparseCols::from_matrix(&rep.represent(c, s, &w.elems[i])?));
                cache.insert(key, op.clone());
                op
            }
        };
        v = match s {
            Side::Left => fp.lambda(k, &op, &v)?,
            Side::Right => fp.rho(k, &op, &v)?,
            Side::Bool => {
                let pv = fp.proj(k, &v);
                fp.proj(k, &fp.lambda(k, &op, &pv)?)
            }
        };
    }
    Ok(v)
}

/// Compares every moment of the family up to `word_cap` letters with the
/// moment of its image under λ, ρ and P_k λ(·) P_k on the free product of
/// the representation modules.
pub fn check_ffb_independence<S: MomentSpace>(
    space: &S,
    fam: &FaceAssignment<S::Elem>,
    rep: &dyn Representation<S::Elem>,
    word_cap: usize,
) -> Result<Report> {
    let fp = FreeProduct::new(rep.modules(), word_cap.max(1))?;
    let mut cache = HashMap::new();
    let mut out = Report::new();
    out.touch("ffb-moment");
    for n in 1..=word_cap {
        for w in family_words(fam, n, &SHAPE_SIDES) {
            let lhs = space.expect(&w.letters())?;
            let rhs = fp.p(&represented_word(&fp, rep, &mut cache, &w)?);
            out.record("ffb-moment", lhs.coeffs() == rhs.coeffs(), || {
                json!({
                    "chi_hat": w.chi_hat.to_string(),
                    "eps_hat": w.eps_hat.to_string(),
                    "word": w.elems.iter().map(|x| space.describe(x)).collect::<Vec<_>>(),
                    "space": lhs.to_strings(),
                    "represented": rhs.to_strings(),
                })
            });
        }
    }
    Ok(out)
}

/// Generators of one colour of a bi-free ffb system.
#[derive(Clone, Debug)]
pub struct SystemPart<E> {
    pub left: Vec<E>,
    pub right: Vec<E>,
    pub c: Vec<E>,
    pub d: Vec<E>,
}

#[derive(Clone, Debug)]
pub struct FfbSystem<E> {
    pub colours: Vec<u32>,
    pub parts: Vec<SystemPart<E>>,
}

/// Every way to place at most `budget` letters from `gens` into `slots` slots.
fn fillings<E: Clone>(slots: usize, budget: usize, gens: &[E]) -> Vec<Vec<Vec<E>>> {
    if slots == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for len in 0..=budget {
        let words: Vec<Vec<E>> = if len == 0 {
            vec![Vec::new()]
        } else {
            std::iter::repeat_n(gens.iter().cloned(), len).multi_cartesian_product().collect()
        };
        if words.is_empty() {
            continue;
        }
        let rest = fillings(slots - 1, budget - len, gens);
        for w in &words {
            for r in &rest {
                let mut f = Vec::with_capacity(slots);
                f.push(w.clone());
                f.extend(r.iter().cloned());
                out.push(f);
            }
        }
    }
    out
}

/// a_0 x_1 a_1 x_2 ... x_m a_m for letters x and fillings a.
fn interleave<E: Clone>(fill: &[Vec<E>], xs: &[E]) -> Vec<Letter<E>> {
    let mut w = Vec::new();
    for (i, a) in fill.iter().enumerate() {
        w.extend(a.iter().cloned().map(Letter::Elem));
        if i < xs.len() {
            w.push(Letter::Elem(xs[i].clone()));
        }
    }
    w
}

/// The three defining properties of a bi-free ffb system, on generator
/// substitutions with at most `word_cap` letters from alg(A^ℓ, A^r) and
/// alternation depth n ≤ max(1, word_cap / 2).
pub fn check_ffb_system<S: MomentSpace>(space: &S, sys: &FfbSystem<S::Elem>, word_cap: usize) -> Result<Report> {
    let mut rep = Report::new();
    for id in ["system-sides", "annihilation-c", "annihilation-d", "boolean-moment-c", "boolean-moment-d"] {
        rep.touch(id);
    }
    let describe = |w: &[Letter<S::Elem>]| -> Vec<String> {
        w.iter()
            .map(|l| match l {
                Letter::Elem(x) => space.describe(x),
                Letter::Left(b) => format!("L{:?}", b.to_strings()),
                Letter::Right(b) => format!("R{:?}", b.to_strings()),
            })
            .collect()
    };
    let alternations = (word_cap / 2).max(1);
    for (colour, part) in sys.colours.iter().zip(&sys.parts) {
        let sides = [
            (&part.left, vec![Side::Left]),
            (&part.right, vec![Side::Right]),
            (&part.c, vec![Side::Left]),
            (&part.d, vec![Side::Left, Side::Right]),
        ];
        for (gens, ss) in sides {
            for x in gens {
                for s in &ss {
                    let ok = space.in_side(x, *s)?;
                    rep.record("system-sides", ok, || json!({ "colour": colour, "element": space.describe(x), "side": s.name() }));
                }
            }
        }
        let a_gens: Vec<S::Elem> = part.left.iter().chain(&part.right).cloned().collect();
        let a_words: Vec<Vec<S::Elem>> = (0..=word_cap)
            .flat_map(|m| {
                if m == 0 {
                    vec![Vec::new()]
                } else {
                    std::iter::repeat_n(a_gens.iter().cloned(), m).multi_cartesian_product().collect()
                }
            })
            .collect();
        for (id, xs) in [("annihilation-c", &part.c), ("annihilation-d", &part.d)] {
            for x1 in xs {
                for x2 in xs {
                    for a in &a_words {
                        let w = interleave(&[vec![], a.clone(), vec![]], &[x1.clone(), x2.clone()]);
                        let ok = space.is_zero_product(&w)?;
                        rep.record(id, ok, || json!({ "colour": colour, "word": describe(&w) }));
                    }
                }
            }
        }
        // E(𝔸 X 𝔸 (Y 𝔸 X)^n 𝔸) for (X, Y) = (C', D') and (D', C').
        for (id, first, second) in [("boolean-moment-c", &part.c, &part.d), ("boolean-moment-d", &part.d, &part.c)] {
            for n in 0..=alternations {
                let pattern: Vec<&Vec<S::Elem>> =
                    std::iter::once(first).chain((0..n).flat_map(|_| [second, first])).collect();
                let choices: Vec<Vec<S::Elem>> =
                    pattern.iter().map(|l| l.iter().cloned()).multi_cartesian_product().collect();
                let fills = fillings(pattern.len() + 1, word_cap, &a_gens);
                for xs in &choices {
                    for f in &fills {
                        let w = interleave(f, xs);
                        let v = space.expect(&w)?;
                        rep.record(id, v.is_zero(), || {
                            json!({ "colour": colour, "n": n, "word": describe(&w), "value": v.to_strings() })
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// The image of a family under the doubled-bimodule construction: for each
/// colour k, α_ℓ(Z) = λ_k(D_Z), α_r(Z) = ρ_k(D_Z), α_b(Z) = λ_k(T_Z) ρ_k(S),
/// acting on the free product of copies of Y = X ⊕ X.
pub struct FfbEmbedding {
    pub module: SpaceModule,
    pub doubled: Bimodule,
    model: OperatorModel,
    source: FaceAssignment<AlgebraElement>,
    /// α images, face by face, in the order of the source generators.
    family: FaceAssignment<OpRef>,
    system: FfbSystem<OpRef>,
    /// Component index and operator on Y_k behind each constructed operator.
    witness: HashMap<OpRef, (usize, Matrix)>,
    /// α_b(Z) ↦ (λ_k(T_Z), ρ_k(S)).
    pairs: HashMap<OpRef, (OpRef, OpRef)>,
}

fn describe_elem(space: &BBProbSpace, x: &AlgebraElement) -> String {
    MomentSpace::describe(space, x)
}

impl FfbEmbedding {
    pub fn model(&self) -> &OperatorModel {
        &self.model
    }

    pub fn free_product(&self) -> &Arc<FreeProduct> {
        self.model.free_product()
    }

    pub fn source(&self) -> &FaceAssignment<AlgebraElement> {
        &self.source
    }

    /// The family {(α_ℓ(A^ℓ_k), α_r(A^r_k), α_b(A^b_k))}.
    pub fn family(&self) -> &FaceAssignment<OpRef> {
        &self.family
    }

    /// {(Ã^ℓ_k, Ã^r_k, C'_k, D'_k)}.
    pub fn system(&self) -> &FfbSystem<OpRef> {
        &self.system
    }

    /// The Boolean factors (C', D') of α_b(Z).
    pub fn pair(&self, x: &OpRef) -> Option<&(OpRef, OpRef)> {
        self.pairs.get(x)
    }

    pub fn witness(&self, x: &OpRef) -> Option<&(usize, Matrix)> {
        self.witness.get(x)
    }

    /// The system with S replaced by the identity in every D'_k.
    pub fn corrupted_system(&self) -> FfbSystem<OpRef> {
        let mut sys = self.system.clone();
        let id = Arc::new(SparseCols::from_matrix(&Matrix::identity(self.doubled.dim())));
        for (k, part) in sys.parts.iter_mut().enumerate() {
            part.d = vec![OpRef::rho(format!("rho{}(I)", sys.colours[k]), k, id.clone())];
        }
        sys
    }

    /// Slots of a word over [`Self::family`] with each α_b(Z) split into its factors.
    pub fn ffb_slots(&self, w: &FamilyWord<OpRef>) -> Vec<FfbSlot<OpRef>> {
        w.elems
            .iter()
            .zip(w.chi_hat.sides())
            .map(|(x, s)| match (s, self.pairs.get(x)) {
                (Side::Bool, Some((c, d))) => FfbSlot::Pair(c.clone(), d.clone()),
                _ => FfbSlot::Single(x.clone()),
            })
            .collect()
    }

    fn split(&self, w: &FamilyWord<OpRef>) -> Vec<OpRef> {
        self.ffb_slots(w)
            .into_iter()
            .flat_map(|s| match s {
                FfbSlot::Single(x) => vec![x],
                FfbSlot::Pair(c, d) => vec![c, d],
            })
            .collect()
    }
}

impl Representation<OpRef> for FfbEmbedding {
    fn modules(&self) -> Vec<(u32, Bimodule)> {
        self.family.colours.iter().map(|&c| (c, self.doubled.clone())).collect()
    }

    fn represent(&self, colour: u32, _: Side, x: &OpRef) -> Result<Matrix> {
        match self.witness.get(x) {
            Some((k, m)) if self.family.colours.get(*k) == Some(&colour) => Ok(m.clone()),
            _ => Err(Error::Invalid(format!("{} has no representing operator of colour {colour}", x.label()))),
        }
    }
}

/// Builds the embedding of a family of a space and checks the side tags of
/// S, T_Z, D_Z, the telescoping identity behind the construction, and
/// preservation of single-colour moments up to `word_cap` letters.
pub fn embed_ffb_family(
    space: &BBProbSpace,
    fam: &FaceAssignment<AlgebraElement>,
    word_cap: usize,
) -> Result<(FfbEmbedding, Report)> {
    let axioms = space.check_bb_axioms();
    if !axioms.all_pass() {
        return Err(Error::Invalid(format!("space fails the B-B axioms:\n{}", axioms.to_text())));
    }
    let mut rep = Report::new();
    rep.absorb("faces", check_faces(space, fam)?);
    let module = build_bimodule_from_space(space)?;
    let doubled = module.module.doubled()?;
    let d = module.module.dim();
    let comps: Vec<(u32, Bimodule)> = fam.colours.iter().map(|&c| (c, doubled.clone())).collect();
    let fp = Arc::new(FreeProduct::new(comps, 2 * word_cap + 6)?);
    let s_mat = doubled_ops::s_op(d);
    let s_cols = Arc::new(SparseCols::from_matrix(&s_mat));
    rep.record("side-tags", doubled.is_left_operator(&s_mat) && doubled.is_right_operator(&s_mat), || {
        json!({ "operator": "S", "expected": "left and right" })
    });

    let mut witness = HashMap::new();
    let mut pairs = HashMap::new();
    let mut faces = Vec::new();
    let mut parts = Vec::new();
    for (k, (&c, f)) in fam.colours.iter().zip(&fam.faces).enumerate() {
        let s_op = OpRef::rho(format!("rho{c}(S)"), k, s_cols.clone());
        witness.insert(s_op.clone(), (k, s_mat.clone()));
        let mut image = |side: Side, z: &AlgebraElement, rep: &mut Report| -> Result<OpRef> {
            let th = module.theta(z)?;
            let name = describe_elem(space, z);
            let (m, ok, op) = match side {
                Side::Left => {
                    let m = doubled_ops::d_op(&th);
                    let ok = doubled.is_left_operator(&m);
                    let op = OpRef::lambda(format!("lambda{c}(D[{name}])"), k, Arc::new(SparseCols::from_matrix(&m)));
                    (m, ok, op)
                }
                Side::Right => {
                    let m = doubled_ops::d_op(&th);
                    let ok = doubled.is_right_operator(&m);
                    let op = OpRef::rho(format!("rho{c}(D[{name}])"), k, Arc::new(SparseCols::from_matrix(&m)));
                    (m, ok, op)
                }
                Side::Bool => {
                    let m = doubled_ops::t_op(&th);
                    let ok = doubled.is_left_operator(&m);
                    let op = OpRef::lambda(format!("lambda{c}(T[{name}])"), k, Arc::new(SparseCols::from_matrix(&m)));
                    (m, ok, op)
                }
            };
            rep.record("side-tags", ok, || json!({ "colour": c, "side": side.name(), "element": name }));
            witness.insert(op.clone(), (k, m));
            Ok(op)
        };
        let left = f.left.iter().map(|z| image(Side::Left, z, &mut rep)).collect::<Result<Vec<_>>>()?;
        let right = f.right.iter().map(|z| image(Side::Right, z, &mut rep)).collect::<Result<Vec<_>>>()?;
        let cs = f.boolean.iter().map(|z| image(Side::Bool, z, &mut rep)).collect::<Result<Vec<_>>>()?;
        let mut boolean = Vec::new();
        for c_op in &cs {
            let ab = OpRef::product(format!("{}{}", c_op.label(), s_op.label()), &[c_op.clone(), s_op.clone()]);
            let tm = witness[c_op].1.mul(&s_mat);
            witness.insert(ab.clone(), (k, tm));
            pairs.insert(ab.clone(), (c_op.clone(), s_op.clone()));
            boolean.push(ab);
        }
        faces.push((c, Faces { left: left.clone(), right: right.clone(), boolean }));
        parts.push(SystemPart { left, right, c: cs, d: vec![s_op] });
    }
    let family = FaceAssignment::new(faces)?;
    let system = FfbSystem { colours: fam.colours.clone(), parts };
    let emb = FfbEmbedding {
        module,
        doubled,
        model: OperatorModel::new(fp),
        source: fam.clone(),
        family,
        system,
        witness,
        pairs,
    };
    telescoping(space, &emb, &mut rep)?;
    moment_preservation(space, &emb, word_cap, &mut rep)?;
    Ok((emb, rep))
}

/// D_{Z_1} S D_{Z_2} T_A D_{Z_3} S D_{Z_4} 1_B = 0 ⊕ θ(Z_1 Z_2 A Z_3 Z_4) 1_B, and
/// D_{Z_1} S D_{Z_2} 1_B = 0 ⊕ θ(Z_1 Z_2) 1_B, with Z_i ∈ {1} ∪ A^ℓ ∪ A^r.
fn telescoping(space: &BBProbSpace, emb: &FfbEmbedding, rep: &mut Report) -> Result<()> {
    let a = space.algebra();
    let d = emb.module.module.dim();
    let s = doubled_ops::s_op(d);
    let unit = {
        let mut u = emb.module.module.unit_vector();
        u.extend(vec![crate::rational::zero(); d]);
        u
    };
    let second = |x: &AlgebraElement| -> Result<Vec<crate::Q>> {
        let mut v = vec![crate::rational::zero(); d];
        v.extend(emb.module.theta(x)?.apply(&emb.module.module.unit_vector()));
        Ok(v)
    };
    rep.touch("telescoping");
    for f in &emb.source.faces {
        let zs: Vec<AlgebraElement> = std::iter::once(a.one()).chain(f.left.iter().cloned()).chain(f.right.iter().cloned()).collect();
        for (z1, z2) in zs.iter().cartesian_product(&zs) {
            let (d1, d2) = (doubled_ops::d_op(&emb.module.theta(z1)?), doubled_ops::d_op(&emb.module.theta(z2)?));
            let v = d1.apply(&s.apply(&d2.apply(&unit)));
            let want = second(&a.mul(z1, z2)?)?;
            rep.record("telescoping", v == want, || json!({ "word": [describe_elem(space, z1), "S", describe_elem(space, z2)] }));
            for (z3, z4) in zs.iter().cartesian_product(&zs) {
                for b in &f.boolean {
                    let t = doubled_ops::t_op(&emb.module.theta(b)?);
                    let (d3, d4) = (doubled_ops::d_op(&emb.module.theta(z3)?), doubled_ops::d_op(&emb.module.theta(z4)?));
                    let inner = d3.apply(&s.apply(&d4.apply(&unit)));
                    let v = d1.apply(&s.apply(&d2.apply(&t.apply(&inner))));
                    let prod = a.product(&[z1.clone(), z2.clone(), b.clone(), z3.clone(), z4.clone()])?;
                    let want = second(&prod)?;
                    rep.record("telescoping", v == want, || {
                        let word: Vec<String> = [z1, z2, b, z3, z4].iter().map(|x| describe_elem(space, x)).collect();
                        json!({ "word": word })
                    });
                }
            }
        }
    }
    Ok(())
}

fn moment_preservation(space: &BBProbSpace, emb: &FfbEmbedding, word_cap: usize, rep: &mut Report) -> Result<()> {
    rep.touch("moment-preservation");
    for (k, &c) in emb.source.colours.iter().enumerate() {
        let src = FaceAssignment::new(vec![(c, emb.source.faces[k].clone())])?;
        let img = FaceAssignment::new(vec![(c, emb.family.faces[k].clone())])?;
        for n in 1..=word_cap {
            for (w, wi) in family_words(&src, n, &SHAPE_SIDES).into_iter().zip(family_words(&img, n, &SHAPE_SIDES)) {
                let lhs = space.expect(&space.evaluate(&w.letters())?)?;
                let rhs = emb.model.expect(&wi.letters())?;
                rep.record("moment-preservation", lhs.coeffs() == rhs.coeffs(), || {
                    json!({
                        "colour": c,
                        "chi_hat": w.chi_hat.to_string(),
                        "word": w.elems.iter().map(|x| describe_elem(space, x)).collect::<Vec<_>>(),
                        "space": lhs.to_strings(),
                        "image": rhs.to_strings(),
                    })
                });
            }
        }
    }
    Ok(())
}

/// The argument that an ffb system yields free-free-Boolean independence,
/// replayed on the embedding: independence against the representation at
/// `word_cap`, and for words of at most `pipeline_cap` letters each step
/// of the comparison (splitting Boolean letters, transfer to the
/// representation, the projected word identity, the diagram split, and the
/// vanishing expectation of the removed diagrams).
pub fn verify_system_gives_ffb(emb: &FfbEmbedding, word_cap: usize, pipeline_cap: usize) -> Result<Report> {
    let mut rep = Report::new();
    rep.absorb("independence", check_ffb_independence(emb.model(), emb.family(), emb, word_cap)?);
    let rfp = FreeProduct::new(emb.modules(), (2 * pipeline_cap).max(1))?;
    let mut operands: HashMap<(OpRef, Side), LrOperand> = HashMap::new();
    let mut cache = HashMap::new();
    for id in ["z-to-t", "bifree-transfer", "projected-word", "superfluous-expectation-zero"] {
        rep.touch(id);
    }
    for n in 1..=pipeline_cap {
        for w in family_words(emb.family(), n, &SHAPE_SIDES) {
            let fctx = lr_replacement(&w.chi_hat)?;
            let eps = fctx.expand_eps(&w.eps_hat)?;
            let ts = emb.split(&w);
            let t_letters: Vec<Letter<OpRef>> = ts.iter().cloned().map(Letter::Elem).collect();
            let witness = || json!({ "chi_hat": w.chi_hat.to_string(), "eps_hat": w.eps_hat.to_string() });

            let ez = emb.model.expect(&w.letters())?;
            let et = emb.model.expect(&t_letters)?;
            rep.record("z-to-t", ez == et, witness);

            let mut ops = Vec::with_capacity(ts.len());
            for (i, t) in ts.iter().enumerate() {
                let side = fctx.chi().sides()[i];
                let key = (t.clone(), side);
                let op = match operands.get(&key) {
                    Some(o) => o.clone(),
                    None => {
                        let (_, m) = emb.witness(t).ok_or_else(|| Error::Invalid(format!("no witness for {}", t.label())))?;
                        let o = LrOperand::new(&rfp, side, eps.colours()[i], m.clone())?;
                        operands.insert(key, o.clone());
                        o
                    }
                };
                ops.push(op);
            }
            let direct = direct_word(&rfp, &ops, &[])?;
            let er = rfp.p(&direct);
            rep.record("bifree-transfer", et.coeffs() == er.coeffs(), witness);

            let projected = fctx.bool_positions();
            let primed = direct_word(&rfp, &ops, &projected)?;
            let tilde = represented_word(&rfp, emb, &mut cache, &w)?;
            rep.record("projected-word", primed == tilde, witness);

            let (lr, residual) = verify_lr_split(&rfp, &ops, &projected)?;
            rep.absorb("lr", lr);
            rep.record("superfluous-expectation-zero", rfp.p(&residual).is_zero(), || {
                json!({ "chi_hat": w.chi_hat.to_string(), "eps_hat": w.eps_hat.to_string(), "residual": rfp.vector_json(&residual) })
            });
        }
    }
    Ok(rep)
}

/// Vanishing of E_π outside BNC_ffb, the moment-cumulant formula over BNC_ffb and the
/// vanishing of mixed full cumulants, on every word of the embedded family
/// with at most `max_len` letters.
pub fn ffb_cumulant_checks(emb: &FfbEmbedding, max_len: usize) -> Result<Report> {
    let engine = MomentEngine::new(emb.model());
    let mut rep = Report::new();
    for id in ["vanishing-outside-ffb", "ffb-moment-cumulant", "ffb-kappa-formula", "kappa-full-vanishes"] {
        rep.touch(id);
    }
    for n in 1..=max_len {
        for w in family_words(emb.family(), n, &SHAPE_SIDES) {
            let fctx = lr_replacement(&w.chi_hat)?;
            let slots = emb.ffb_slots(&w);
            rep.absorb("", engine.ffb_vanishing_check(&fctx, &w.eps_hat, &slots)?);
            let f = engine.ffb_moment_formula(&fctx, &w.eps_hat, &slots)?;
            let witness = || {
                json!({
                    "chi_hat": w.chi_hat.to_string(),
                    "eps_hat": w.eps_hat.to_string(),
                    "lhs": f.lhs.to_strings(),
                    "rhs": f.rhs.to_strings(),
                    "kappa": f.kappa_full.to_strings(),
                    "kappa_ffb": f.kappa_full_ffb.to_strings(),
                })
            };
            rep.record("ffb-moment-cumulant", f.residual.is_zero(), witness);
            rep.record("ffb-kappa-formula", f.kappa_full == f.kappa_full_ffb, witness);
            rep.absorb("", engine.kappa_constancy_check(&fctx, &w.eps_hat, &slots)?);
        }
    }
    Ok(rep)
}

/// Wraps a space and shifts the expectation of every word that mixes
/// colours, for negative controls.
pub struct Perturbed<'a, S: MomentSpace> {
    inner: &'a S,
    colour_of: HashMap<S::Elem, u32>,
    shift: AlgebraElement,
}

impl<'a, S: MomentSpace> Perturbed<'a, S> {
    pub fn new(inner: &'a S, fam: &FaceAssignment<S::Elem>, shift: AlgebraElement) -> Self {
        let mut colour_of = HashMap::new();
        for (c, f) in fam.colours.iter().zip(&fam.faces) {
            for x in f.left.iter().chain(&f.right).chain(&f.boolean) {
                colour_of.insert(x.clone(), *c);
            }
        }
        Perturbed { inner, colour_of, shift }
    }
}

impl<S: MomentSpace> MomentSpace for Perturbed<'_, S> {
    type Elem = S::Elem;

    fn base(&self) -> &crate::algebra::StructuredAlgebra {
        self.inner.base()
    }

    fn expect(&self, word: &[Letter<S::Elem>]) -> Result<AlgebraElement> {
        let v = self.inner.expect(word)?;
        let cols: Vec<u32> =
            word.iter().filter_map(|l| if let Letter::Elem(x) = l { self.colour_of.get(x).copied() } else { None }).collect();
        if cols.windows(2).any(|p| p[0] != p[1]) {
            v.add(&self.shift)
        } else {
            Ok(v)
        }
    }

    fn in_side(&self, x: &S::Elem, side: Side) -> Result<bool> {
        self.inner.in_side(x, side)
    }

    fn is_zero_product(&self, word: &[Letter<S::Elem>]) -> Result<bool> {
        self.inner.is_zero_product(word)
    }

    fn describe(&self, x: &S::Elem) -> String {
        self.inner.describe(x)
    }
}

/// Copies of the module of a space joined in a free product, with faces
/// realized as λ_k(θ(Z)), ρ_k(θ(Z)) and P_k λ_k(θ(Z)) P_k. Families drawn
/// this way are bi-free (and free-free-Boolean) by construction.
pub struct ThetaModel {
    rep: ThetaRepresentation,
    model: OperatorModel,
}

impl ThetaModel {
    pub fn new(space: &BBProbSpace, colours: &[u32], depth: usize) -> Result<Self> {
        let rep = ThetaRepresentation::new(space, colours)?;
        let fp = FreeProduct::new(rep.modules(), depth)?;
        Ok(ThetaModel { rep, model: OperatorModel::new(Arc::new(fp)) })
    }

    pub fn model(&self) -> &OperatorModel {
        &self.model
    }

    pub fn module(&self) -> &SpaceModule {
        &self.rep.module
    }

    pub fn operator(&self, colour: u32, side: Side, z: &AlgebraElement, label: &str) -> Result<OpRef> {
        let k = self.model.free_product().index_of(colour)?;
        let t = Arc::new(SparseCols::from_matrix(&self.rep.module.theta(z)?));
        Ok(match side {
            Side::Left => OpRef::lambda(format!("lambda{colour}({label})"), k, t),
            Side::Right => OpRef::rho(format!("rho{colour}({label})"), k, t),
            Side::Bool => OpRef::new(
                format!("P{colour}lambda{colour}({label})P{colour}"),
                vec![Prim::Proj(k), Prim::Lambda(k, t), Prim::Proj(k)],
            ),
        })
    }
}

//! Module-valued representations of the shape category.
//!
//! A representation assigns to every object of Q a module over the
//! coefficient algebra and to every generating arrow a module map,
//! functorially. Internally this is a single diagram over the tensor
//! category of the shape with the algebra; the helpers here move between
//! the two pictures: values are slices over a fixed Q-object, arrow data
//! comes in per-vertex blocks.

use crate::category::{HomElt, Label};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rep::{Context, DiagMap, Diagram, HomBasis, SumLayout};
use crate::serre::SerreData;
use std::collections::BTreeMap;
use std::sync::Arc;

#[derive(Clone)]
pub struct Representation {
    pub ctx: Arc<Context>,
    pub diag: Diagram,
}

impl std::fmt::Debug for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Rep{:?}", self.diag)
    }
}

#[derive(Clone)]
pub struct RepMorphism {
    pub ctx: Arc<Context>,
    pub map: DiagMap,
}

impl std::fmt::Debug for RepMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RepMorphism[{:?}]", self.map)
    }
}

impl Representation {
    /// Wraps and validates a product-category diagram.
    pub fn new(ctx: Arc<Context>, diag: Diagram) -> Result<Representation> {
        diag.validate()?;
        Ok(Representation { ctx, diag })
    }

    pub fn zero(ctx: &Arc<Context>) -> Result<Representation> {
        Ok(Representation { ctx: ctx.clone(), diag: Diagram::zero(ctx.product()?) })
    }

    pub fn field(&self) -> crate::scalar::FieldSpec {
        self.ctx.field()
    }

    /// Q-objects carrying a nonzero value.
    pub fn q_support(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.diag.support().iter().map(|&o| self.ctx.split(o).0).collect();
        out.dedup();
        out
    }

    /// The value at a Q-object, as a module over the coefficient algebra.
    pub fn value(&self, q: usize) -> Diagram {
        slice_at(&self.ctx, &self.diag, q)
    }

    pub fn value_dim(&self, q: usize) -> usize {
        (0..self.ctx.a_objects()).map(|v| self.diag.dim(self.ctx.obj(q, v))).sum()
    }

    pub fn total_dim(&self) -> usize {
        self.diag.total_dim()
    }

    pub fn is_zero(&self) -> bool {
        self.diag.is_zero()
    }

    /// Dimension vector keyed by Q-object label.
    pub fn dim_vector(&self) -> BTreeMap<String, usize> {
        self.q_support()
            .into_iter()
            .map(|q| (self.ctx.cat.label(q).to_string(), self.value_dim(q)))
            .collect()
    }

    pub fn same_ctx(&self, other: &Representation) -> bool {
        Arc::ptr_eq(&self.ctx, &other.ctx)
    }
}

fn slice_at(ctx: &Arc<Context>, diag: &Diagram, q: usize) -> Diagram {
    let mut dims = BTreeMap::new();
    for v in 0..ctx.a_objects() {
        let d = diag.dim(ctx.obj(q, v));
        if d > 0 {
            dims.insert(v, d);
        }
    }
    let mut maps = BTreeMap::new();
    for bi in 0..ctx.alg.cat.arrows().len() {
        let m = diag.map_of(ctx.a_arrow(q, bi));
        if !m.is_zero() {
            maps.insert(bi, m);
        }
    }
    Diagram::new_unchecked(ctx.alg.cat.clone(), dims, maps)
}

/// The action of a Q-hom element on a representation, as a module map
/// between the values at its endpoints.
pub fn act_value(ctx: &Arc<Context>, diag: &Diagram, h: &HomElt) -> DiagMap {
    let src = slice_at(ctx, diag, h.src);
    let tgt = slice_at(ctx, diag, h.tgt);
    let mut comps = BTreeMap::new();
    for v in 0..ctx.a_objects() {
        let (ds, dt) = (src.dim(v), tgt.dim(v));
        if ds == 0 || dt == 0 {
            continue;
        }
        let mut acc = Matrix::zero(dt, ds, ctx.field());
        for (k, c) in h.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let b = &ctx.cat.hom_basis(h.src, h.tgt)[k];
            let m = if b.length == 0 {
                Matrix::identity(ds, ctx.field())
            } else {
                diag.act_word(&ctx.lift_word(&b.word, v))
            };
            acc = acc.add(&m.scale(c));
        }
        if !acc.is_zero() {
            comps.insert(v, acc);
        }
    }
    DiagMap::new_unchecked(src, tgt, comps)
}

/// Piecewise construction data for a representation: a module per object
/// and per-vertex blocks for the arrows that meet the support.
pub struct RepBuilder {
    ctx: Arc<Context>,
    values: BTreeMap<usize, Diagram>,
    arrows: BTreeMap<usize, BTreeMap<usize, Matrix>>,
}

impl RepBuilder {
    pub fn new(ctx: &Arc<Context>) -> RepBuilder {
        RepBuilder { ctx: ctx.clone(), values: BTreeMap::new(), arrows: BTreeMap::new() }
    }

    pub fn value(mut self, q: usize, module: Diagram) -> Self {
        assert!(Arc::ptr_eq(&module.cat, &self.ctx.alg.cat), "value must be a module over the coefficient algebra");
        self.values.insert(q, module);
        self
    }

    /// Sets the block of a Q-arrow at an algebra vertex.
    pub fn arrow_block(mut self, q_arrow: usize, vertex: usize, m: Matrix) -> Self {
        self.arrows.entry(q_arrow).or_default().insert(vertex, m);
        self
    }

    pub fn build(self) -> Result<Representation> {
        let prod = self.ctx.product()?;
        let mut dims = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for (&q, module) in &self.values {
            for v in 0..self.ctx.a_objects() {
                let d = module.dim(v);
                if d > 0 {
                    dims.insert(self.ctx.obj(q, v), d);
                }
            }
            for bi in 0..self.ctx.alg.cat.arrows().len() {
                let m = module.map_of(bi);
                if !m.is_zero() {
                    maps.insert(self.ctx.a_arrow(q, bi), m);
                }
            }
        }
        for (&ai, blocks) in &self.arrows {
            for (&v, m) in blocks {
                if m.is_zero() {
                    continue;
                }
                maps.insert(self.ctx.q_arrow(ai, v), m.clone());
            }
        }
        let diag = Diagram::new(prod, dims, maps)?;
        Ok(Representation { ctx: self.ctx, diag })
    }
}

/// The stalk representation: a module placed at one object, zero arrows.
pub fn stalk_rep(ctx: &Arc<Context>, q: usize, module: &Diagram) -> Result<Representation> {
    RepBuilder::new(ctx).value(q, module.clone()).build()
}

/// The induced (projective) representation `Q(q,-) (x) M`: arrows act by
/// postcomposition on the left factor. Requires `M` projective over the
/// coefficient algebra.
pub fn proj_rep(ctx: &Arc<Context>, q: usize, module: &Diagram) -> Result<Representation> {
    if !ctx.cat.out_closed(q) {
        return Err(Error::Window(format!(
            "projective at {} is not fully realized; enlarge the window",
            ctx.cat.label(q)
        )));
    }
    if !module.is_projective()? {
        return Err(Error::Rep("multiplicity module is not projective over the coefficient algebra".into()));
    }
    Ok(Representation { ctx: ctx.clone(), diag: induce(ctx, q, module)? })
}

/// `Q(q,-) (x) M` as a raw diagram, without the projectivity check.
pub fn induce(ctx: &Arc<Context>, q: usize, module: &Diagram) -> Result<Diagram> {
    let prod = ctx.product()?;
    let field = ctx.field();
    let mut dims = BTreeMap::new();
    for p in 0..ctx.q_objects() {
        let dq = ctx.cat.hom_dim(q, p);
        if dq == 0 {
            continue;
        }
        for v in 0..ctx.a_objects() {
            let dv = module.dim(v);
            if dv > 0 {
                dims.insert(ctx.obj(p, v), dq * dv);
            }
        }
    }
    let mut maps = BTreeMap::new();
    // Q-arrows: left-composition tensor identity. Layout at (p, v) is
    // (basis of Q(q,p)) major, module coordinate minor.
    for (ai, arr) in ctx.cat.arrows().iter().enumerate() {
        let (dp, dt) = (ctx.cat.hom_dim(q, arr.src), ctx.cat.hom_dim(q, arr.tgt));
        if dp == 0 || dt == 0 {
            continue;
        }
        let ae = ctx.cat.arrow_elt(ai);
        let mut left = Matrix::zero(dt, dp, field);
        for j in 0..dp {
            let c = ctx.cat.compose(&ae, &ctx.cat.basis_elt(q, arr.src, j));
            for i in 0..dt {
                left.set(i, j, c.coords[i].clone());
            }
        }
        for v in 0..ctx.a_objects() {
            let dv = module.dim(v);
            if dv == 0 {
                continue;
            }
            let m = kron(&left, &Matrix::identity(dv, field));
            if !m.is_zero() {
                maps.insert(ctx.q_arrow(ai, v), m);
            }
        }
    }
    // Algebra arrows: identity tensor module action.
    for (bi, barr) in ctx.alg.cat.arrows().iter().enumerate() {
        let act = module.map_of(bi);
        if act.is_zero() {
            continue;
        }
        for p in 0..ctx.q_objects() {
            let dq = ctx.cat.hom_dim(q, p);
            if dq == 0 {
                continue;
            }
            let m = kron(&Matrix::identity(dq, field), &act);
            maps.insert(ctx.a_arrow(p, bi), m);
        }
        let _ = barr;
    }
    Ok(Diagram::new_unchecked(prod, dims, maps))
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let mut m = Matrix::zero(a.rows() * b.rows(), a.cols() * b.cols(), a.field());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if a.at(i, j).is_zero() {
                continue;
            }
            m.set_block(i * b.rows(), j * b.cols(), &b.scale(a.at(i, j)));
        }
    }
    m
}

/// The coinduced (injective) representation, realized through Serre
/// duality as the induced representation at the inverse Serre image.
/// Requires `M` injective over the coefficient algebra.
pub fn inj_rep(
    ctx: &Arc<Context>,
    serre: &SerreData,
    q: usize,
    module: &Diagram,
) -> Result<Representation> {
    let Some(sq) = serre.apply_inv(q) else {
        return Err(Error::Window(format!(
            "Serre inverse of {} is not defined on this window",
            ctx.cat.label(q)
        )));
    };
    let op = ctx.alg.cat.opposite()?;
    if !module.is_injective(&Arc::new(op))? {
        return Err(Error::Rep("multiplicity module is not injective over the coefficient algebra".into()));
    }
    Ok(Representation { ctx: ctx.clone(), diag: induce(ctx, sq, module)? })
}

/// Basis of natural A-linear transformations between two representations.
pub fn hom_space(x: &Representation, y: &Representation) -> HomBasis {
    assert!(x.same_ctx(y), "representations over different contexts");
    HomBasis::compute(&x.diag, &y.diag)
}

pub fn kernel(phi: &RepMorphism) -> (Representation, RepMorphism) {
    let (k, incl) = phi.map.kernel();
    (
        Representation { ctx: phi.ctx.clone(), diag: k },
        RepMorphism { ctx: phi.ctx.clone(), map: incl },
    )
}

pub fn cokernel(phi: &RepMorphism) -> (Representation, RepMorphism) {
    let (c, proj) = phi.map.cokernel();
    (
        Representation { ctx: phi.ctx.clone(), diag: c },
        RepMorphism { ctx: phi.ctx.clone(), map: proj },
    )
}

pub fn image(phi: &RepMorphism) -> (Representation, RepMorphism) {
    let (im, incl) = phi.map.image();
    (
        Representation { ctx: phi.ctx.clone(), diag: im },
        RepMorphism { ctx: phi.ctx.clone(), map: incl },
    )
}

pub fn direct_sum(xs: &[&Representation]) -> Result<(Representation, SumLayout)> {
    let ctx = xs.first().expect("nonempty sum").ctx.clone();
    let parts: Vec<&Diagram> = xs.iter().map(|x| &x.diag).collect();
    let layout = SumLayout::new(&ctx.product()?, &parts);
    Ok((Representation { ctx, diag: layout.total.clone() }, layout))
}

/// The natural isomorphism `Hom(Q(q,-) (x) M, X) = Hom_A(M, X(q))`,
/// returned as matrices between the two hom bases (mutually inverse).
pub struct YonedaIso {
    pub rep_hom: HomBasis,
    pub module_hom: HomBasis,
    pub fwd: Matrix,
    pub bwd: Matrix,
}

pub fn yoneda(ctx: &Arc<Context>, q: usize, module: &Diagram, x: &Representation) -> Result<YonedaIso> {
    let p = proj_rep(ctx, q, module)?;
    let rep_hom = hom_space(&p, x);
    let module_hom = HomBasis::compute(module, &x.value(q));
    let field = ctx.field();

    // Forward: restrict a morphism to the identity-generator columns at q.
    let restrict = |phi: &DiagMap| -> DiagMap {
        let mut comps = BTreeMap::new();
        for v in 0..ctx.a_objects() {
            let dv = module.dim(v);
            let xq = x.diag.dim(ctx.obj(q, v));
            if dv == 0 || xq == 0 {
                continue;
            }
            // Identity basis element of Q(q,q) is index 0; its block of
            // columns is the first dv columns.
            let m = phi.comp_of(ctx.obj(q, v)).block(0, 0, xq, dv);
            if !m.is_zero() {
                comps.insert(v, m);
            }
        }
        DiagMap::new_unchecked(module.clone(), x.value(q), comps)
    };
    let mut fwd = Matrix::zero(module_hom.dim(), rep_hom.dim(), field);
    for (j, phi) in rep_hom.basis.iter().enumerate() {
        let f = restrict(phi);
        let coords = module_hom
            .coords_of(&f)
            .ok_or_else(|| Error::Other("restriction left the module hom space".into()))?;
        for (i, c) in coords.into_iter().enumerate() {
            fwd.set(i, j, c);
        }
    }

    // Backward: extend a module map along the action of the category.
    let extend = |f: &DiagMap| -> DiagMap {
        let mut comps = BTreeMap::new();
        for pobj in 0..ctx.q_objects() {
            let dq = ctx.cat.hom_dim(q, pobj);
            if dq == 0 {
                continue;
            }
            for v in 0..ctx.a_objects() {
                let dv = module.dim(v);
                let xp = x.diag.dim(ctx.obj(pobj, v));
                if dv == 0 || xp == 0 {
                    continue;
                }
                let mut m = Matrix::zero(xp, dq * dv, field);
                for bi in 0..dq {
                    let b = &ctx.cat.hom_basis(q, pobj)[bi];
                    let act = if b.length == 0 {
                        Matrix::identity(x.diag.dim(ctx.obj(q, v)), field)
                    } else {
                        x.diag.act_word(&ctx.lift_word(&b.word, v))
                    };
                    let block = act.mul(&f.comp_of(v));
                    m.set_block(0, bi * dv, &block);
                }
                if !m.is_zero() {
                    comps.insert(ctx.obj(pobj, v), m);
                }
            }
        }
        DiagMap::new_unchecked(p.diag.clone(), x.diag.clone(), comps)
    };
    let mut bwd = Matrix::zero(rep_hom.dim(), module_hom.dim(), field);
    for (j, f) in module_hom.basis.iter().enumerate() {
        let phi = extend(f);
        let coords = rep_hom
            .coords_of(&phi)
            .ok_or_else(|| Error::Other("extension is not natural".into()))?;
        for (i, c) in coords.into_iter().enumerate() {
            bwd.set(i, j, c);
        }
    }
    Ok(YonedaIso { rep_hom, module_hom, fwd, bwd })
}

/// Labels a Q-object set for reports.
pub fn labels_of(ctx: &Arc<Context>, qs: &[usize]) -> Vec<Label> {
    qs.iter().map(|&q| ctx.cat.label(q).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{KCategory, QuiverSpec, Window};
    use crate::rep::Algebra;
    use crate::scalar::FieldSpec;

    fn ctx_cpx(lo: i64, hi: i64) -> Arc<Context> {
        let cat = Arc::new(
            KCategory::build(&QuiverSpec::chain_complex(), FieldSpec::Q, Window::new(lo, hi)).unwrap(),
        );
        Context::new(cat, Algebra::field(FieldSpec::Q))
    }

    fn q(ctx: &Arc<Context>, n: i64) -> usize {
        ctx.cat.index_of(&Label::Int(n)).unwrap()
    }

    #[test]
    fn stalk_and_proj_shapes() {
        let ctx = ctx_cpx(-3, 3);
        let k1 = ctx.alg.free_module(1);
        let s = stalk_rep(&ctx, q(&ctx, 0), &k1).unwrap();
        assert_eq!(s.total_dim(), 1);
        assert_eq!(s.value_dim(q(&ctx, 0)), 1);

        let p = proj_rep(&ctx, q(&ctx, 0), &k1).unwrap();
        assert_eq!(p.value_dim(q(&ctx, 0)), 1);
        assert_eq!(p.value_dim(q(&ctx, -1)), 1);
        assert_eq!(p.total_dim(), 2);
        assert!(p.diag.is_projective().unwrap());

        let z = stalk_rep(&ctx, q(&ctx, 2), &ctx.alg.free_module(2)).unwrap();
        assert_eq!(z.value_dim(q(&ctx, 2)), 2);
    }

    #[test]
    fn inj_rep_via_serre() {
        let ctx = ctx_cpx(-3, 3);
        let serre = crate::serre::find_serre(&ctx.cat).unwrap();
        let k1 = ctx.alg.free_module(1);
        let i = inj_rep(&ctx, &serre, q(&ctx, 0), &k1).unwrap();
        assert_eq!(i.value_dim(q(&ctx, 1)), 1);
        assert_eq!(i.value_dim(q(&ctx, 0)), 1);
        assert_eq!(i.total_dim(), 2);
    }

    #[test]
    fn hom_dims_and_yoneda() {
        let ctx = ctx_cpx(-3, 3);
        let k1 = ctx.alg.free_module(1);
        let s0 = stalk_rep(&ctx, q(&ctx, 0), &k1).unwrap();
        let iso = yoneda(&ctx, q(&ctx, 0), &k1, &s0).unwrap();
        assert_eq!(iso.rep_hom.dim(), 1);
        assert_eq!(iso.module_hom.dim(), 1);
        let rt = iso.fwd.mul(&iso.bwd);
        assert_eq!(rt, Matrix::identity(1, FieldSpec::Q));
        let rt2 = iso.bwd.mul(&iso.fwd);
        assert_eq!(rt2, Matrix::identity(1, FieldSpec::Q));

        // Projective self-hom round trip.
        let p = proj_rep(&ctx, q(&ctx, 0), &k1).unwrap();
        let iso = yoneda(&ctx, q(&ctx, 0), &k1, &p).unwrap();
        assert_eq!(iso.rep_hom.dim(), iso.module_hom.dim());
        let d = iso.rep_hom.dim();
        assert_eq!(iso.fwd.mul(&iso.bwd), Matrix::identity(d, FieldSpec::Q));

        // Supported away from the out-neighborhood: both sides vanish.
        let far = stalk_rep(&ctx, q(&ctx, 2), &k1).unwrap();
        let iso = yoneda(&ctx, q(&ctx, 0), &k1, &far).unwrap();
        assert_eq!(iso.rep_hom.dim(), 0);
        assert_eq!(iso.module_hom.dim(), 0);
    }

    #[test]
    fn bound_quiver_representation_round_trip() {
        // Dual numbers as coefficient algebra over the chain-complex shape.
        let cat = Arc::new(
            KCategory::build(&QuiverSpec::chain_complex(), FieldSpec::Fp(5), Window::new(-2, 2)).unwrap(),
        );
        let alg = Algebra::bound_quiver(
            &QuiverSpec::finite(
                vec![Label::Named("v".into())],
                vec![crate::category::ArrowSpec {
                    name: "x".into(),
                    src: Label::Named("v".into()),
                    tgt: Label::Named("v".into()),
                }],
                vec![crate::category::RelationScheme::power("x", 2)],
            ),
            FieldSpec::Fp(5),
        )
        .unwrap();
        let ctx = Context::new(cat, alg);
        let free = ctx.alg.free_module(1);
        assert_eq!(free.total_dim(), 2);
        let p = proj_rep(&ctx, q(&ctx, 0), &free).unwrap();
        assert_eq!(p.total_dim(), 4);
        assert!(p.diag.is_projective().unwrap());
        // The simple module is not projective over the dual numbers.
        let simple = ctx.alg.simple(0, 1);
        assert!(proj_rep(&ctx, q(&ctx, 0), &simple).is_err());
        let s = stalk_rep(&ctx, q(&ctx, 0), &simple).unwrap();
        assert_eq!(s.total_dim(), 1);
    }
}

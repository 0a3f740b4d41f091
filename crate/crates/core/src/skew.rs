//! The skew-polynomial ring F_{q^m}[x; θ, δ] and generalized operator
//! evaluation.
//!
//! Multiplication follows the commutation rule x·a = θ(a)x + δ(a). The
//! evaluation map used throughout is the *operator* evaluation
//! f(b)_a = Σ f_i D_a^i(b) built from D_a(b) = θ(b)a + δ(b); for a fixed
//! evaluation parameter a it is a ring homomorphism onto the generated
//! operator algebra, which the brute-force tests below exercise.

use std::sync::Arc;

use crate::error::Error;
use crate::field::{FieldElem, OreCtx};
use crate::linalg::MatFqm;
use crate::sum_rank::Composition;
use crate::Result;

fn same_ctx(a: &OreCtx, b: &OreCtx) -> bool {
    a.theta_l() == b.theta_l()
        && a.gamma() == b.gamma()
        && a.field.p() == b.field.p()
        && a.field.modulus() == b.field.modulus()
}

/// A skew polynomial with ascending coefficients in canonical trimmed form.
#[derive(Clone)]
pub struct SkewPoly {
    ctx: OreCtx,
    coeffs: Vec<FieldElem>,
}

impl PartialEq for SkewPoly {
    fn eq(&self, other: &Self) -> bool {
        same_ctx(&self.ctx, &other.ctx) && self.coeffs == other.coeffs
    }
}

impl Eq for SkewPoly {}

impl std::fmt::Debug for SkewPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c: Vec<u64> = self.coeffs.iter().map(|e| e.index()).collect();
        write!(f, "SkewPoly{:?}", c)
    }
}

impl SkewPoly {
    pub fn new(ctx: OreCtx, mut coeffs: Vec<FieldElem>) -> SkewPoly {
        while coeffs.last() == Some(&FieldElem::ZERO) {
            coeffs.pop();
        }
        SkewPoly { ctx, coeffs }
    }

    pub fn zero(ctx: OreCtx) -> SkewPoly {
        SkewPoly { ctx, coeffs: vec![] }
    }

    pub fn one(ctx: OreCtx) -> SkewPoly {
        SkewPoly::new(ctx, vec![FieldElem::ONE])
    }

    /// The monomial c·x^deg.
    pub fn monomial(ctx: OreCtx, c: FieldElem, deg: usize) -> SkewPoly {
        let mut coeffs = vec![FieldElem::ZERO; deg + 1];
        coeffs[deg] = c;
        SkewPoly::new(ctx, coeffs)
    }

    pub fn ctx(&self) -> &OreCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &SkewPoly) -> SkewPoly {
        assert!(same_ctx(&self.ctx, &other.ctx), "mixed skew-poly contexts");
        let f = &self.ctx.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| f.add(self.coeff(i), other.coeff(i)))
            .collect();
        SkewPoly::new(self.ctx.clone(), coeffs)
    }

    /// Left multiplication by a constant: c·(Σ g_i x^i) = Σ (c·g_i) x^i.
    pub fn scale(&self, c: FieldElem) -> SkewPoly {
        let f = &self.ctx.field;
        SkewPoly::new(
            self.ctx.clone(),
            self.coeffs.iter().map(|&g| f.mul(c, g)).collect(),
        )
    }

    /// Multiplication by x on the left: x·(Σ g_i x^i) = Σ θ(g_i)x^{i+1} + δ(g_i)x^i.
    fn shift_once(&self) -> SkewPoly {
        if self.is_zero() {
            return self.clone();
        }
        let f = &self.ctx.field;
        let mut out = vec![FieldElem::ZERO; self.coeffs.len() + 1];
        for (i, &g) in self.coeffs.iter().enumerate() {
            out[i + 1] = f.add(out[i + 1], self.ctx.theta_apply(g));
            out[i] = f.add(out[i], self.ctx.der_apply(g));
        }
        SkewPoly::new(self.ctx.clone(), out)
    }
}

/// Skew product f·g under x·a = θ(a)x + δ(a).
pub fn sp_mul(f: &SkewPoly, g: &SkewPoly) -> SkewPoly {
    assert!(same_ctx(f.ctx(), g.ctx()), "mixed skew-poly contexts");
    let mut acc = SkewPoly::zero(f.ctx.clone());
    let mut shifted = g.clone(); // x^i · g
    for i in 0..f.coeffs.len() {
        let fi = f.coeffs[i];
        if !fi.is_zero() {
            acc = acc.add(&shifted.scale(fi));
        }
        if i + 1 < f.coeffs.len() {
            shifted = shifted.shift_once();
        }
    }
    acc
}

/// The evaluation operator D_a(b) = θ(b)·a + δ(b).
pub fn op_d(ctx: &OreCtx, a: FieldElem, b: FieldElem) -> FieldElem {
    let f = &ctx.field;
    f.add(f.mul(ctx.theta_apply(b), a), ctx.der_apply(b))
}

/// Iterated operator D_a^i(b).
pub fn op_d_pow(ctx: &OreCtx, a: FieldElem, b: FieldElem, i: usize) -> FieldElem {
    let mut cur = b;
    for _ in 0..i {
        cur = op_d(ctx, a, cur);
    }
    cur
}

/// Inverse operator D_a^{−i}(b) = θ^{−i}(b / N_i(a)); zero derivation only.
pub fn op_d_inv_pow(ctx: &OreCtx, a: FieldElem, b: FieldElem, i: usize) -> Result<FieldElem> {
    if !ctx.is_zero_derivation() {
        return Err(Error::NonzeroDerivation);
    }
    if i == 0 {
        return Ok(b);
    }
    if a.is_zero() {
        return Err(Error::ZeroEvaluationParameter);
    }
    let n = ctx.gen_norm(a, i);
    let quotient = ctx.field.div(b, n)?;
    Ok(ctx.theta_pow_apply(-(i as i64), quotient))
}

/// Generalized operator evaluation f(b)_a = Σ f_i D_a^i(b).
pub fn gen_op_eval(f: &SkewPoly, b: FieldElem, a: FieldElem) -> FieldElem {
    let fld = &f.ctx().field;
    let mut acc = FieldElem::ZERO;
    let mut cur = b;
    for (i, &fi) in f.coeffs().iter().enumerate() {
        if !fi.is_zero() {
            acc = fld.add(acc, fld.mul(fi, cur));
        }
        if i + 1 < f.coeffs().len() {
            cur = op_d(f.ctx(), a, cur);
        }
    }
    acc
}

/// Blockwise operator application D_a(x) = (D_{a_1}(x^(1)) | … | D_{a_ℓ}(x^(ℓ))).
pub fn op_apply_vec(
    ctx: &OreCtx,
    a_vec: &[FieldElem],
    x: &[FieldElem],
    comp: &Composition,
) -> Result<Vec<FieldElem>> {
    if a_vec.len() != comp.ell() {
        return Err(Error::ShapeMismatch(format!(
            "{} evaluation parameters for {} blocks",
            a_vec.len(),
            comp.ell()
        )));
    }
    if x.len() != comp.n() {
        return Err(Error::ShapeMismatch(format!(
            "vector length {} does not match composition total {}",
            x.len(),
            comp.n()
        )));
    }
    let mut out = Vec::with_capacity(x.len());
    for (i, &a) in a_vec.iter().enumerate() {
        for idx in comp.block_range(i) {
            out.push(op_d(ctx, a, x[idx]));
        }
    }
    Ok(out)
}

/// Row-wise [`op_apply_vec`] on a matrix.
pub fn op_apply_mat(
    ctx: &OreCtx,
    a_vec: &[FieldElem],
    m: &MatFqm,
    comp: &Composition,
) -> Result<MatFqm> {
    let rows: Result<Vec<Vec<FieldElem>>> = (0..m.rows())
        .map(|r| op_apply_vec(ctx, a_vec, m.row(r), comp))
        .collect();
    MatFqm::from_rows(Arc::clone(m.field()), rows?)
}

/// The stacking operator Γ_a^j(G) = (G; D_a(G); …; D_a^j(G)), built by
/// iterating the one-step operator on the previous block.
pub fn gamma_stack(
    ctx: &OreCtx,
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    j: usize,
) -> Result<MatFqm> {
    let mut out = g.clone();
    let mut prev = g.clone();
    for _ in 0..j {
        prev = op_apply_mat(ctx, a_vec, &prev, comp)?;
        out = out.vstack(&prev)?;
    }
    Ok(out)
}

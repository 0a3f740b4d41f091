//! (Generalized) linearized Reed–Solomon codes in the sum-rank metric.
//!
//! A GLRS code is specified by locators β (blockwise F_q-independent),
//! evaluation parameters a (representatives of distinct nontrivial conjugacy
//! classes), nonzero block multipliers v, and a dimension k. Its canonical
//! generator stacks k rows of blockwise operator powers of β, scaled per
//! block — encoding a message polynomial f of degree < k places the
//! generalized operator evaluations v_i·f(β_t)_{a_i} in block i.
//!
//! The Moore rank law (rank of the d-row stack is min(d, n)) and with it the
//! MSRD property hold in the Frobenius-power regime gcd(l, m) = 1; for the
//! identity automorphism each Moore block collapses to a single projective
//! point, so validation additionally bounds k by the number of blocks there.

use rand::Rng;

use crate::error::Error;
use crate::field::{FieldElem, OreCtx};
use crate::linalg::{expand_over_fq, MatFqm, RowSpace};
use crate::skew::{gen_op_eval, op_apply_vec, SkewPoly};
use crate::sum_rank::{random_full_weight_vector, BlockVector, Composition};
use crate::Result;

/// Defining data of a GLRS code.
#[derive(Clone, Debug)]
pub struct GlrsParams {
    pub beta: BlockVector,
    /// One evaluation parameter per block.
    pub a: Vec<FieldElem>,
    /// One nonzero multiplier per block.
    pub v: Vec<FieldElem>,
    pub k: usize,
    pub ore: OreCtx,
}

/// How [`random_glrs`] chooses block multipliers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MultiplierMode {
    /// v = (1, …, 1): a plain LRS code.
    Ones,
    /// Independent uniform nonzero multipliers.
    Random,
}

/// A code presented by a full-rank generator matrix, with the block structure
/// and operator context it lives in.
#[derive(Clone, Debug)]
pub struct CodeInstance {
    pub generator: MatFqm,
    pub comp: Composition,
    pub ore: OreCtx,
}

impl CodeInstance {
    pub fn new(generator: MatFqm, comp: Composition, ore: OreCtx) -> Result<CodeInstance> {
        if generator.cols() != comp.n() {
            return Err(Error::ShapeMismatch(format!(
                "generator has {} columns but composition totals {}",
                generator.cols(),
                comp.n()
            )));
        }
        if generator.rank() != generator.rows() {
            return Err(Error::BadDimension(
                "generator matrix must have full row rank".into(),
            ));
        }
        Ok(CodeInstance {
            generator,
            comp,
            ore,
        })
    }

    pub fn k(&self) -> usize {
        self.generator.rows()
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }
}

impl GlrsParams {
    pub fn comp(&self) -> &Composition {
        &self.beta.comp
    }

    pub fn n(&self) -> usize {
        self.beta.comp.n()
    }

    pub fn ell(&self) -> usize {
        self.beta.comp.ell()
    }

    /// The code as a public object: canonical generator plus context.
    pub fn instance(&self) -> Result<CodeInstance> {
        CodeInstance::new(
            canonical_generator(self)?,
            self.comp().clone(),
            self.ore.clone(),
        )
    }
}

/// Check every GLRS parameter invariant.
pub fn validate_params(p: &GlrsParams) -> Result<()> {
    let comp = p.comp();
    let n = comp.n();
    let ell = comp.ell();
    let field = &p.ore.field;

    if p.a.len() != ell || p.v.len() != ell {
        return Err(Error::ShapeMismatch(format!(
            "{} evaluation parameters / {} multipliers for {} blocks",
            p.a.len(),
            p.v.len(),
            ell
        )));
    }
    if p.k == 0 || p.k > n {
        return Err(Error::BadDimension(format!(
            "dimension k={} outside 1..={}",
            p.k, n
        )));
    }
    for &part in comp.parts() {
        if part > field.m() {
            return Err(Error::PartExceedsM {
                part,
                m: field.m(),
            });
        }
    }
    for (i, block) in p.beta.blocks().enumerate() {
        if expand_over_fq(field, block).rank() != block.len() {
            return Err(Error::DependentLocators { block: i });
        }
    }
    for (i, &ai) in p.a.iter().enumerate() {
        if p.ore.is_trivial_class(ai) {
            return Err(Error::ConjugacyViolation(format!(
                "a_{i} lies in the trivial conjugacy class"
            )));
        }
        for (j, &aj) in p.a.iter().enumerate().take(i) {
            if p.ore.same_class(aj, ai) {
                return Err(Error::ConjugacyViolation(format!(
                    "a_{j} and a_{i} are conjugate"
                )));
            }
        }
    }
    for (i, &vi) in p.v.iter().enumerate() {
        if vi.is_zero() {
            return Err(Error::ZeroMultiplier { block: i });
        }
    }
    if p.ore.is_identity_theta() && p.k > ell {
        return Err(Error::BadDimension(format!(
            "identity automorphism: dimension k={} cannot exceed the number of blocks {ell}",
            p.k
        )));
    }
    Ok(())
}

/// The generalized Moore matrix M_d(x)_a: row i is the blockwise operator
/// D_a applied i times to x.
pub fn moore_matrix(
    ore: &OreCtx,
    x: &BlockVector,
    a_vec: &[FieldElem],
    d: usize,
) -> Result<MatFqm> {
    let mut rows: Vec<Vec<FieldElem>> = Vec::with_capacity(d);
    let mut cur = x.data.clone();
    for i in 0..d {
        if i > 0 {
            cur = op_apply_vec(ore, a_vec, &cur, &x.comp)?;
        }
        rows.push(cur.clone());
    }
    MatFqm::from_rows(std::sync::Arc::clone(&ore.field), rows)
}

/// Canonical k×n generator: block i is v_i times the k-row Moore block of
/// β^(i) with respect to a_i.
pub fn canonical_generator(p: &GlrsParams) -> Result<MatFqm> {
    validate_params(p)?;
    let moore = moore_matrix(&p.ore, &p.beta, &p.a, p.k)?;
    let field = &p.ore.field;
    let comp = p.comp();
    let mut g = moore;
    for (i, &vi) in p.v.iter().enumerate() {
        if vi == FieldElem::ONE {
            continue;
        }
        for c in comp.block_range(i) {
            for r in 0..p.k {
                let cur = g.get(r, c);
                g.set(r, c, field.mul(vi, cur));
            }
        }
    }
    Ok(g)
}

/// Encode a message polynomial: block i carries v_i·f(β_t)_{a_i}.
pub fn encode(p: &GlrsParams, f: &SkewPoly) -> Result<BlockVector> {
    if let Some(deg) = f.degree() {
        if deg >= p.k {
            return Err(Error::DegreeTooLarge {
                degree: deg,
                bound: p.k,
                what: "message polynomial",
            });
        }
    }
    let field = &p.ore.field;
    let comp = p.comp();
    let mut data = Vec::with_capacity(p.n());
    for (i, block) in p.beta.blocks().enumerate() {
        for &b in block {
            data.push(field.mul(p.v[i], gen_op_eval(f, b, p.a[i])));
        }
    }
    BlockVector::new(data, comp.clone())
}

/// Dual description of a zero-derivation LRS code.
#[derive(Clone, Debug)]
pub struct DualLrs {
    /// Dual locators, normalized so the first nonzero entry is 1.
    pub alpha: BlockVector,
    /// Dual evaluation parameters θ^{−1}(a_i).
    pub a_dual: Vec<FieldElem>,
    pub k_dual: usize,
    /// The context (θ^{−1}, δ = 0) the dual code lives in.
    pub ore: OreCtx,
}

/// Compute the dual LRS description: α solves the syndrome equations
/// Σ_{i,t} α_t^(i) D_{a_i}^{h−1}(β_t^(i)) = 0 for h = 1..n−1 — that system's
/// coefficient matrix is exactly the (n−1)-row Moore matrix of β, so the
/// solution is its right kernel (one-dimensional in the Frobenius-power
/// regime). The dual code is then the span of the (n−k)-row Moore matrix of
/// α with respect to (θ^{−1}, θ^{−1}(a)).
pub fn dual_lrs_zero_derivation(p: &GlrsParams) -> Result<DualLrs> {
    validate_params(p)?;
    if !p.ore.is_zero_derivation() {
        return Err(Error::NonzeroDerivation);
    }
    if p.v.iter().any(|&vi| vi != FieldElem::ONE) {
        return Err(Error::NontrivialMultipliers);
    }
    let n = p.n();
    if p.k >= n {
        return Err(Error::BadDimension(format!(
            "dual description needs k < n (k={}, n={n})",
            p.k
        )));
    }
    let field = &p.ore.field;
    let syndrome = moore_matrix(&p.ore, &p.beta, &p.a, n - 1)?;
    let kernel = syndrome.right_kernel();
    if kernel.rows() == 0 {
        return Err(Error::KernelNotOneDimensional { dim: 0 });
    }
    // Free-variable convention solution, scaled to first nonzero entry 1.
    let mut alpha = kernel.row(0).to_vec();
    let lead = alpha
        .iter()
        .copied()
        .find(|c| !c.is_zero())
        .expect("kernel basis rows are nonzero");
    let inv = field.inv(lead)?;
    for c in alpha.iter_mut() {
        *c = field.mul(inv, *c);
    }
    let a_dual: Vec<FieldElem> = p
        .a
        .iter()
        .map(|&ai| p.ore.theta_pow_apply(-1, ai))
        .collect();
    Ok(DualLrs {
        alpha: BlockVector::new(alpha, p.comp().clone())?,
        a_dual,
        k_dual: n - p.k,
        ore: p.ore.dual()?,
    })
}

/// Sample a uniformly random valid GLRS instance for the given context,
/// composition, and dimension.
pub fn random_glrs<R: Rng + ?Sized>(
    ore: &OreCtx,
    comp: &Composition,
    k: usize,
    mode: MultiplierMode,
    rng: &mut R,
) -> Result<GlrsParams> {
    let field = &ore.field;
    let beta = random_full_weight_vector(field, comp, rng)?;
    let a = ore.sample_class_reps(comp.ell(), rng)?;
    let v = match mode {
        MultiplierMode::Ones => vec![FieldElem::ONE; comp.ell()],
        MultiplierMode::Random => (0..comp.ell()).map(|_| field.random_nonzero(rng)).collect(),
    };
    let params = GlrsParams {
        beta,
        a,
        v,
        k,
        ore: ore.clone(),
    };
    validate_params(&params)?;
    Ok(params)
}

/// Row space of the code generated by `params` — the verification oracle
/// used by recovery: two parameter sets describe the same code iff these
/// spaces are equal.
pub fn code_row_space(params: &GlrsParams) -> Result<RowSpace> {
    Ok(RowSpace::of(&canonical_generator(params)?))
}

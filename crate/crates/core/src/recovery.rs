//! Parameter recovery: given a generator matrix of a disguised (G)LRS code,
//! reconstruct canonical parameters (β, a, v).
//!
//! Two stages mirror the distinguishers:
//!
//! * (a, v) for identity-automorphism instances via the column-extracted GRS
//!   code and a Sidelnikov–Shestakov solve;
//! * β for any automorphism (zero derivation, known a) via either the dual
//!   kernel of the Γ-stack plus a linearized syndrome system, or the
//!   (k−1)-fold intersection chain inverted blockwise.
//!
//! Every successful recovery is verified unconditionally by comparing the
//! reduced row echelon form of the canonical generator built from the
//! recovered parameters against that of the input, so recovery can never
//! silently return wrong parameters.

use crate::codes::{canonical_generator, GlrsParams};
use crate::distinguishers::unscale_blocks;
use crate::error::Error;
use crate::field::{FieldCtx, FieldElem, OreCtx};
use crate::linalg::MatFqm;
use crate::skew::{gamma_stack, op_apply_mat, op_d_inv_pow};
use crate::sum_rank::{BlockVector, Composition};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Which β-recovery route produced the parameters.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryMethod {
    /// Sidelnikov–Shestakov on the column code (θ = Id stage one).
    SquareSs,
    /// Dual kernel of the Γ-stack plus the linearized syndrome system.
    OverbeckDual,
    /// Iterated intersection chain inverted blockwise.
    Intersection,
    /// Full pipeline: stage one followed by a β route.
    Combined,
}

/// Outcome of a successful recovery. `verified` is always true for reports
/// returned by this module; failures surface as errors instead.
#[derive(Clone, Debug)]
pub struct RecoveryReport {
    pub params: GlrsParams,
    pub verified: bool,
    pub method: RecoveryMethod,
}

/// Choice of β-recovery route for [`recover_full`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteChoice {
    /// Try the route suited to the automorphism first, then the other.
    #[default]
    Auto,
    Dual,
    Intersection,
}

/// Optional side information for [`recover_full`].
#[derive(Clone, Debug, Default)]
pub struct RecoveryOptions {
    /// Known evaluation parameters (skips stage one; required for θ ≠ Id).
    pub known_a: Option<Vec<FieldElem>>,
    /// Known block multipliers (defaults to all ones when `known_a` is set).
    pub known_v: Option<Vec<FieldElem>>,
    pub route: RouteChoice,
}

/// One column per block (the first), preserving row count: for θ = Id GLRS
/// codes the result generates a GRS code of dimension min(k, ℓ).
pub fn extract_grs_column_code(g: &MatFqm, comp: &Composition) -> Result<MatFqm> {
    if g.cols() != comp.n() {
        return Err(Error::ShapeMismatch(format!(
            "generator has {} columns but composition totals {}",
            g.cols(),
            comp.n()
        )));
    }
    let field = Arc::clone(g.field());
    Ok(MatFqm::from_fn(field, g.rows(), comp.ell(), |r, i| {
        g.get(r, comp.block_range(i).start)
    }))
}

/// Generator of GRS_k(points, mults): row e has entries mults_j · points_j^e.
fn grs_generator(
    field: &Arc<FieldCtx>,
    points: &[FieldElem],
    mults: &[FieldElem],
    k: usize,
) -> MatFqm {
    MatFqm::from_fn(Arc::clone(field), k, points.len(), |e, j| {
        field.mul(mults[j], field.pow(points[j], e as u64))
    })
}

/// η_j = Π_{t≠j}(points_j − points_t)⁻¹, defined for pairwise-distinct points.
fn lagrange_eta(field: &Arc<FieldCtx>, points: &[FieldElem]) -> Result<Vec<FieldElem>> {
    let mut out = Vec::with_capacity(points.len());
    for (j, &pj) in points.iter().enumerate() {
        let mut prod = FieldElem::ONE;
        for (t, &pt) in points.iter().enumerate() {
            if t != j {
                prod = field.mul(prod, field.sub(pj, pt));
            }
        }
        out.push(field.inv(prod)?);
    }
    Ok(out)
}

/// Solve for multipliers making GRS(points, ·) equal the row space of the
/// rref basis `r`: the dual multiplier vector w spans the kernel of the
/// system Σ_j R[row][j] · points_j^e · w_j = 0, and c = η / w.
fn solve_grs_multipliers(
    r: &MatFqm,
    points: &[FieldElem],
) -> Option<Vec<FieldElem>> {
    let field = Arc::clone(r.field());
    let k = r.rows();
    let ell = r.cols();
    let rows = k * (ell - k);
    let mut sys = MatFqm::zeros(Arc::clone(&field), rows, ell);
    let mut idx = 0;
    for row in 0..k {
        for e in 0..ell - k {
            for j in 0..ell {
                let coeff = field.mul(r.get(row, j), field.pow(points[j], e as u64));
                sys.set(idx, j, coeff);
            }
            idx += 1;
        }
    }
    let kernel = sys.right_kernel();
    if kernel.rows() != 1 {
        return None;
    }
    let eta = lagrange_eta(&field, points).ok()?;
    let mut mults = Vec::with_capacity(ell);
    for j in 0..ell {
        let w = kernel.get(0, j);
        if w.is_zero() {
            return None;
        }
        mults.push(field.mul(eta[j], field.inv(w).ok()?));
    }
    Some(mults)
}

/// Shift all points by a common offset so every point is nonzero; an affine
/// substitution x ↦ x + w permutes polynomials of degree < k bijectively, so
/// the GRS code and its multipliers are unchanged.
fn shift_points_nonzero(field: &Arc<FieldCtx>, points: &[FieldElem]) -> Result<Vec<FieldElem>> {
    'outer: for widx in 0..field.order() {
        let w = field.element(widx)?;
        let mut shifted = Vec::with_capacity(points.len());
        for &p in points {
            let s = field.add(p, w);
            if s.is_zero() {
                continue 'outer;
            }
            shifted.push(s);
        }
        return Ok(shifted);
    }
    Err(Error::StructureNotFound(
        "no affine shift avoids zero points".into(),
    ))
}

/// Sidelnikov–Shestakov: given a generator of a GRS code of dimension
/// 1 < k < ℓ, return pairwise-distinct nonzero points and nonzero
/// multipliers reproducing its row space (verified internally by rref
/// equality). Points are pinned via the first two pivot columns and the
/// unknown row-scaling ratio is swept over the field.
pub fn sidelnikov_shestakov(ggrs: &MatFqm) -> Result<(Vec<FieldElem>, Vec<FieldElem>)> {
    let field = Arc::clone(ggrs.field());
    let ell = ggrs.cols();
    let rr = ggrs.rref();
    let k = rr.rank;
    if k <= 1 || k >= ell {
        return Err(Error::PreconditionViolated(format!(
            "Sidelnikov–Shestakov needs 1 < dim < ℓ (dim={k}, ℓ={ell})"
        )));
    }
    let r = MatFqm::from_rows(
        Arc::clone(&field),
        (0..k).map(|i| rr.mat.row(i).to_vec()).collect(),
    )?;
    let pivots = rr.pivots.clone();
    let nonpivots: Vec<usize> = (0..ell).filter(|j| !pivots.contains(j)).collect();

    // A GRS rref has no zero entry in non-pivot columns (each row polynomial
    // vanishes only at the other pivots).
    for &j in &nonpivots {
        for row in 0..k {
            if r.get(row, j).is_zero() {
                return Err(Error::StructureNotFound(
                    "zero entry in a non-pivot column of the echelon form".into(),
                ));
            }
        }
    }

    if k == ell - 1 {
        return ss_from_dual_vector(&r);
    }

    // u_j = R[0][j]/R[1][j] is a Möbius image of the point of column j; with
    // the first two pivot points pinned to 0 and 1 the only remaining
    // unknown is the ratio κ of the two rows' leading coefficients.
    let q0 = nonpivots[0];
    let q1 = nonpivots[1];
    let mut u = vec![FieldElem::ZERO; ell];
    for &j in &nonpivots {
        u[j] = field.div(r.get(0, j), r.get(1, j))?;
    }

    'kappa: for kidx in 1..field.order() {
        let kappa = field.element(kidx)?;
        let mut points = vec![FieldElem::ZERO; ell];
        points[pivots[0]] = FieldElem::ZERO;
        points[pivots[1]] = FieldElem::ONE;
        // non-pivot points: u_j = κ(α_j − 1)/α_j  ⇒  α_j = κ/(κ − u_j)
        for &j in &nonpivots {
            let denom = field.sub(kappa, u[j]);
            if denom.is_zero() {
                continue 'kappa;
            }
            points[j] = field.div(kappa, denom)?;
        }
        // remaining pivot points from rows r ≥ 2 via two reference columns:
        // R[0][j]/R[r][j] = μ_r (α_j − α_{p_r})/α_j is linear in (μ_r, μ_r·α_{p_r})
        let mut ok = true;
        for t in 2..k {
            let vq0 = field.div(r.get(0, q0), r.get(t, q0))?;
            let vq1 = field.div(r.get(0, q1), r.get(t, q1))?;
            // μ·α_{q} − ν = v_q·α_q for q ∈ {q0, q1}
            let det = field.sub(points[q1], points[q0]);
            if det.is_zero() {
                ok = false;
                break;
            }
            let b0 = field.mul(vq0, points[q0]);
            let b1 = field.mul(vq1, points[q1]);
            // subtract the two equations to isolate μ
            let mu = field.div(field.sub(b1, b0), det)?;
            if mu.is_zero() {
                ok = false;
                break;
            }
            let nu = field.sub(field.mul(mu, points[q0]), b0);
            points[pivots[t]] = field.div(nu, mu)?;
        }
        if !ok {
            continue 'kappa;
        }
        // all points must be pairwise distinct
        let mut seen = std::collections::HashSet::new();
        if !points.iter().all(|p| seen.insert(p.index())) {
            continue 'kappa;
        }
        let shifted = shift_points_nonzero(&field, &points)?;
        let Some(mults) = solve_grs_multipliers(&r, &shifted) else {
            continue 'kappa;
        };
        let candidate = grs_generator(&field, &shifted, &mults, k);
        if candidate.rref().mat == rr.mat {
            return Ok((shifted, mults));
        }
    }
    Err(Error::StructureNotFound(
        "no point/multiplier assignment reproduces the code".into(),
    ))
}

/// Codimension-one case: the dual is spanned by a single vector h, and any
/// distinct nonzero points work with multipliers c_j = (h_j Π_{t≠j}(α_j − α_t))⁻¹.
fn ss_from_dual_vector(r: &MatFqm) -> Result<(Vec<FieldElem>, Vec<FieldElem>)> {
    let field = Arc::clone(r.field());
    let ell = r.cols();
    let kernel = r.right_kernel();
    if kernel.rows() != 1 {
        return Err(Error::KernelNotOneDimensional { dim: kernel.rows() });
    }
    let mut points = Vec::with_capacity(ell);
    let mut idx = 1;
    while points.len() < ell {
        points.push(field.element(idx)?);
        idx += 1;
    }
    let eta = lagrange_eta(&field, &points)?;
    let mut mults = Vec::with_capacity(ell);
    for j in 0..ell {
        let h = kernel.get(0, j);
        if h.is_zero() {
            return Err(Error::StructureNotFound(
                "dual vector has a zero coordinate".into(),
            ));
        }
        mults.push(field.mul(eta[j], field.inv(h)?));
    }
    let candidate = grs_generator(&field, &points, &mults, r.rows());
    if candidate.rref().mat != r.rref().mat {
        return Err(Error::StructureNotFound(
            "dual-vector reconstruction failed verification".into(),
        ));
    }
    Ok((points, mults))
}

/// Stage one for θ = Id: recover evaluation parameters and block multipliers.
///
/// When the column-extracted code is the whole space (ℓ ≤ k) or
/// one-dimensional (k = 1), any distinct nonzero points work and the
/// multipliers can be normalized away; otherwise Sidelnikov–Shestakov on the
/// extracted GRS code yields them.
pub fn recover_a_v(
    g: &MatFqm,
    comp: &Composition,
    ore: &OreCtx,
) -> Result<(Vec<FieldElem>, Vec<FieldElem>)> {
    if !ore.is_identity_theta() || !ore.is_zero_derivation() {
        return Err(Error::UnsupportedRegime(
            "locator recovery needs the identity automorphism and zero derivation".into(),
        ));
    }
    let ell = comp.ell();
    let k = g.rows();
    if ell <= k || k == 1 {
        let a = ore.first_class_reps(ell)?;
        return Ok((a, vec![FieldElem::ONE; ell]));
    }
    let column_code = extract_grs_column_code(g, comp)?;
    sidelnikov_shestakov(&column_code)
}

/// β-recovery via the dual code: the right kernel of the (n−k−1)-fold
/// Γ-stack must be one-dimensional; its generator α feeds the syndrome
/// system, linearized by applying θ^{1−h} to equation h, whose kernel in
/// turn must be exactly β up to a scalar.
pub fn recover_beta_dual(
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    ore: &OreCtx,
) -> Result<BlockVector> {
    if !ore.is_zero_derivation() {
        return Err(Error::NonzeroDerivation);
    }
    let field = &ore.field;
    let k = g.rows();
    let n = g.cols();
    if k >= n {
        return Err(Error::BadDimension(format!(
            "dual β-recovery needs k < n (k={k}, n={n})"
        )));
    }
    let stack = gamma_stack(ore, g, a_vec, comp, n - k - 1)?;
    let kernel = stack.right_kernel();
    if kernel.rows() != 1 {
        return Err(Error::KernelNotOneDimensional { dim: kernel.rows() });
    }
    // syndrome system: for h = 1..n−1,
    //   Σ_{i,j} θ^{1−h}(α_j^{(i)} N_{h−1}(a_i)) · β_j^{(i)} = 0
    let mut sys = MatFqm::zeros(Arc::clone(field), n - 1, n);
    for h in 1..n {
        for (i, range) in (0..comp.ell()).map(|i| (i, comp.block_range(i))) {
            let norm = ore.gen_norm(a_vec[i], h - 1);
            for col in range {
                let coeff = field.mul(kernel.get(0, col), norm);
                sys.set(h - 1, col, ore.theta_pow_apply(1 - h as i64, coeff));
            }
        }
    }
    let beta_kernel = sys.right_kernel();
    if beta_kernel.rows() != 1 {
        return Err(Error::KernelNotOneDimensional {
            dim: beta_kernel.rows(),
        });
    }
    let beta = BlockVector::new(beta_kernel.row(0).to_vec(), comp.clone())?;
    check_block_independence(field, &beta)?;
    Ok(beta)
}

/// β-recovery via the intersection chain: the (k−1)-fold intersection of
/// derived row spaces is spanned by a single vector of the form
/// c·D_a^{k−1}(β), inverted blockwise.
pub fn recover_beta_intersection(
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    ore: &OreCtx,
) -> Result<BlockVector> {
    if !ore.is_zero_derivation() {
        return Err(Error::NonzeroDerivation);
    }
    let field = &ore.field;
    let k = g.rows();
    let mut inter = crate::linalg::RowSpace::of(g);
    let mut derived = g.clone();
    for _ in 1..k {
        derived = op_apply_mat(ore, a_vec, &derived, comp)?;
        inter = crate::linalg::row_space_intersection(inter.basis(), &derived)?;
    }
    if inter.dim() != 1 {
        return Err(Error::IntersectionNotOneDimensional { dim: inter.dim() });
    }
    let gvec = inter.basis().row(0).to_vec();
    let mut beta = Vec::with_capacity(comp.n());
    for i in 0..comp.ell() {
        for col in comp.block_range(i) {
            beta.push(op_d_inv_pow(ore, a_vec[i], gvec[col], k - 1)?);
        }
    }
    let beta = BlockVector::new(beta, comp.clone())?;
    check_block_independence(field, &beta)?;
    Ok(beta)
}

fn check_block_independence(field: &Arc<FieldCtx>, beta: &BlockVector) -> Result<()> {
    for i in 0..beta.comp.ell() {
        let block = beta.block(i);
        let expanded = crate::linalg::expand_over_fq(field, block);
        if expanded.rank() != block.len() {
            return Err(Error::DegenerateSolution(format!(
                "recovered locator block {i} is F_q-linearly dependent"
            )));
        }
    }
    Ok(())
}

/// θ = Id with k = ℓ: the code is a direct sum of one-dimensional block
/// codes, so each block projection must have rank one and any spanning
/// vector serves as the locator block.
fn beta_from_block_projections(g: &MatFqm, comp: &Composition) -> Result<BlockVector> {
    let field = Arc::clone(g.field());
    let mut beta = Vec::with_capacity(comp.n());
    for i in 0..comp.ell() {
        let range = comp.block_range(i);
        let block = MatFqm::from_fn(Arc::clone(&field), g.rows(), range.len(), |r, c| {
            g.get(r, range.start + c)
        });
        let rr = block.rref();
        if rr.rank != 1 {
            return Err(Error::StructureNotFound(format!(
                "block {i} projection has rank {} instead of 1",
                rr.rank
            )));
        }
        beta.extend_from_slice(rr.mat.row(0));
    }
    let beta = BlockVector::new(beta, comp.clone())?;
    check_block_independence(&field, &beta)?;
    Ok(beta)
}

/// Deterministic locator blocks for the full-space code: a prefix of the
/// F_q-basis of F_{q^m} per block.
fn basis_prefix_beta(field: &Arc<FieldCtx>, comp: &Composition) -> Result<BlockVector> {
    let basis = field.fq_basis();
    let mut beta = Vec::with_capacity(comp.n());
    for i in 0..comp.ell() {
        beta.extend_from_slice(&basis[..comp.parts()[i]]);
    }
    BlockVector::new(beta, comp.clone())
}

fn verify_params(params: &GlrsParams, g_rref: &MatFqm) -> Result<()> {
    let canonical = canonical_generator(params)?;
    if canonical.rref().mat == *g_rref {
        Ok(())
    } else {
        Err(Error::VerificationFailed)
    }
}

/// Full recovery pipeline.
///
/// For θ = Id the stage-one recovery runs from scratch; for other
/// automorphisms the evaluation parameters must be supplied in `options`.
/// The derivation must be zero. The returned report is always verified:
/// the canonical generator built from the recovered parameters spans
/// exactly the input row space.
pub fn recover_full(
    g: &MatFqm,
    comp: &Composition,
    ore: &OreCtx,
    options: &RecoveryOptions,
) -> Result<RecoveryReport> {
    if !ore.is_zero_derivation() {
        return Err(Error::UnsupportedRegime(
            "recovery with a nonzero derivation is not supported".into(),
        ));
    }
    if g.cols() != comp.n() {
        return Err(Error::ShapeMismatch(format!(
            "generator has {} columns but composition totals {}",
            g.cols(),
            comp.n()
        )));
    }
    let field = &ore.field;
    let rr = g.rref();
    let k = rr.rank;
    if k == 0 {
        return Err(Error::BadDimension("zero input code".into()));
    }
    let n = comp.n();
    let ell = comp.ell();
    let basis = MatFqm::from_rows(
        Arc::clone(field),
        (0..k).map(|i| rr.mat.row(i).to_vec()).collect(),
    )?;
    let g_rref = basis.rref().mat.clone();

    // stage one: evaluation parameters and multipliers
    let (a, v, stage_one_ran) = match (&options.known_a, ore.is_identity_theta()) {
        (Some(a), _) => {
            if a.len() != ell {
                return Err(Error::ShapeMismatch(format!(
                    "{} evaluation parameters for {} blocks",
                    a.len(),
                    ell
                )));
            }
            let v = options
                .known_v
                .clone()
                .unwrap_or_else(|| vec![FieldElem::ONE; ell]);
            (a.clone(), v, false)
        }
        (None, true) => {
            if k == n {
                // full space: any valid parameters generate it
                if ell < n {
                    return Err(Error::StructureNotFound(
                        "full space with θ = Id needs singleton blocks".into(),
                    ));
                }
                let params = GlrsParams {
                    beta: basis_prefix_beta(field, comp)?,
                    a: ore.first_class_reps(ell)?,
                    v: vec![FieldElem::ONE; ell],
                    k,
                    ore: ore.clone(),
                };
                verify_params(&params, &g_rref)?;
                return Ok(RecoveryReport {
                    params,
                    verified: true,
                    method: RecoveryMethod::Combined,
                });
            }
            let (a, v) = recover_a_v(&basis, comp, ore)?;
            (a, v, true)
        }
        (None, false) => {
            return Err(Error::UnsupportedRegime(
                "recovery for a non-identity automorphism needs known evaluation parameters"
                    .into(),
            ));
        }
    };

    let unscaled = unscale_blocks(&basis, comp, &v)?;

    // stage two: locator recovery
    let (beta, route) = if ore.is_identity_theta() && k == ell {
        (beta_from_block_projections(&unscaled, comp)?, None)
    } else {
        let order: [RouteChoice; 2] = if ore.is_identity_theta() {
            [RouteChoice::Intersection, RouteChoice::Dual]
        } else {
            [RouteChoice::Dual, RouteChoice::Intersection]
        };
        let attempts: Vec<RouteChoice> = match options.route {
            RouteChoice::Auto => order.to_vec(),
            forced => vec![forced],
        };
        let mut found = None;
        let mut last_err = None;
        for attempt in attempts {
            let res = match attempt {
                RouteChoice::Dual => recover_beta_dual(&unscaled, &a, comp, ore),
                RouteChoice::Intersection => {
                    recover_beta_intersection(&unscaled, &a, comp, ore)
                }
                RouteChoice::Auto => unreachable!(),
            };
            match res {
                Ok(beta) => {
                    found = Some((beta, attempt));
                    break;
                }
                Err(e) => last_err = Some(e),
            }
        }
        match found {
            Some((beta, route)) => (beta, Some(route)),
            None => {
                let err = last_err.expect("at least one attempt");
                return Err(match options.route {
                    RouteChoice::Auto => {
                        Error::StructureNotFound(format!("no β route succeeded: {err}"))
                    }
                    _ => err,
                });
            }
        }
    };

    let params = GlrsParams {
        beta,
        a,
        v,
        k,
        ore: ore.clone(),
    };
    verify_params(&params, &g_rref)?;
    let method = match (stage_one_ran, route) {
        (true, _) => RecoveryMethod::Combined,
        (false, Some(RouteChoice::Dual)) => RecoveryMethod::OverbeckDual,
        (false, Some(RouteChoice::Intersection)) => RecoveryMethod::Intersection,
        (false, _) => RecoveryMethod::Combined,
    };
    Ok(RecoveryReport {
        params,
        verified: true,
        method,
    })
}

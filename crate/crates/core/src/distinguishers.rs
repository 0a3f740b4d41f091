//! Distinguishers that separate (G)LRS codes from random codes given only a
//! generator matrix.
//!
//! Three statistics are implemented, each compared against the value a
//! structured code must produce and the value a random code typically
//! produces:
//!
//! * square code (identity automorphism): dim(C ⋆ C) = min(ℓ, 2k−1) for
//!   GLRS, versus min(n, k(k+1)/2) for random codes;
//! * Overbeck-like Γ-stack: rank Γ_a^j(G) = k+j for LRS, versus
//!   min((j+1)k, n) for random codes — scrambling G by any invertible S
//!   only multiplies the stack by a block-triangular invertible matrix
//!   (powers of θ and δ applied to S on the diagonal), so the statistic is
//!   basis-independent for every derivation;
//! * intersection chain: dim ∩_{i≤j} ⟨D_a^i(G)⟩ = k−j for LRS, versus
//!   max(2k−n, 0)-style generic intersections for random codes.
//!
//! Block multipliers destroy the Γ law (the operator pulls θ(v_i) out of
//! block i, mixing scalings across derivative orders), which is why GLRS
//! instances are handled by sweeping candidate multipliers and unscaling.

use crate::error::Error;
use crate::field::{FieldCtx, FieldElem, OreCtx};
use crate::linalg::{row_space_intersection, MatFqm, RowSpace};
use crate::skew::gamma_stack;
use crate::sum_rank::Composition;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Outcome of a distinguisher run.
///
/// `structured` holds iff the observed statistic equals the value forced by
/// the structured-code law. When the statistic differs, the code is
/// *certainly* not (G)LRS for the queried parameters; when it matches, a
/// random code could in principle collide, so `certainty` is false.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub structured: bool,
    /// Observed dimension/rank.
    pub statistic: usize,
    /// Value a structured code must produce.
    pub threshold: usize,
    /// Value a random code typically produces.
    pub baseline: usize,
    /// True exactly when the verdict is a guaranteed exclusion.
    pub certainty: bool,
}

impl Verdict {
    fn from_statistic(statistic: usize, threshold: usize, baseline: usize) -> Verdict {
        Verdict {
            structured: statistic == threshold,
            statistic,
            threshold,
            baseline,
            certainty: statistic != threshold,
        }
    }
}

/// Coordinatewise (Schur/star) product of two vectors.
pub fn star_product(
    field: &Arc<FieldCtx>,
    x: &[FieldElem],
    y: &[FieldElem],
) -> Result<Vec<FieldElem>> {
    if x.len() != y.len() {
        return Err(Error::ShapeMismatch(format!(
            "star product of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter()
        .zip(y.iter())
        .map(|(&a, &b)| field.mul(a, b))
        .collect())
}

/// Dimension of the square code C ⋆ C: the span of all pairwise star
/// products of rows of `g` (products of the k(k+1)/2 row pairs suffice).
pub fn square_code_dim(g: &MatFqm) -> Result<usize> {
    let field = Arc::clone(g.field());
    let mut rows = Vec::with_capacity(g.rows() * (g.rows() + 1) / 2);
    for i in 0..g.rows() {
        for j in i..g.rows() {
            rows.push(star_product(&field, g.row(i), g.row(j))?);
        }
    }
    Ok(MatFqm::from_rows(field, rows)?.rank())
}

/// Square-code distinguisher for identity-automorphism instances.
///
/// Requires 2 < k ≤ n/2 so the structured value min(ℓ, 2k−1) and the random
/// value min(n, k(k+1)/2) can differ.
pub fn square_distinguisher(g: &MatFqm, comp: &Composition) -> Result<Verdict> {
    let k = g.rows();
    let n = g.cols();
    if comp.n() != n {
        return Err(Error::ShapeMismatch(format!(
            "generator has {n} columns but composition totals {}",
            comp.n()
        )));
    }
    if !(2 < k && 2 * k <= n) {
        return Err(Error::PreconditionViolated(format!(
            "square distinguisher needs 2 < k <= n/2 (k={k}, n={n})"
        )));
    }
    let statistic = square_code_dim(g)?;
    let threshold = comp.ell().min(2 * k - 1);
    let baseline = n.min(k * (k + 1) / 2);
    Ok(Verdict::from_statistic(statistic, threshold, baseline))
}

/// Smallest j ≥ 1 with k+j < min((j+1)k, n); such j exists iff 1 < k < n−1.
pub fn overbeck_default_j(k: usize, n: usize) -> Result<usize> {
    for j in 1..=n.saturating_sub(k) {
        if k + j < ((j + 1) * k).min(n) {
            return Ok(j);
        }
    }
    Err(Error::NoValidJ { k, n })
}

/// Overbeck-like distinguisher: compare rank Γ_a^j(G) against k+j.
///
/// With `j = None` the smallest usable stacking depth is chosen. An explicit
/// j must satisfy j ≤ n−k and k+j < min((j+1)k, n), otherwise the statistic
/// cannot separate structured from random codes.
pub fn overbeck_distinguisher(
    ore: &OreCtx,
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    j: Option<usize>,
) -> Result<Verdict> {
    let k = g.rows();
    let n = g.cols();
    let j = match j {
        None => overbeck_default_j(k, n)?,
        Some(j) => {
            if j == 0 || j > n.saturating_sub(k) {
                return Err(Error::BadJ {
                    j,
                    why: format!("outside 1..=n-k = 1..={}", n.saturating_sub(k)),
                });
            }
            if k + j >= ((j + 1) * k).min(n) {
                return Err(Error::BadJ {
                    j,
                    why: format!("k+j = {} does not undercut min((j+1)k, n) = {}", k + j, ((j + 1) * k).min(n)),
                });
            }
            j
        }
    };
    let stack = gamma_stack(ore, g, a_vec, comp, j)?;
    let statistic = stack.rank();
    let threshold = k + j;
    let baseline = ((j + 1) * k).min(n);
    Ok(Verdict::from_statistic(statistic, threshold, baseline))
}

/// Dimension of the j-fold intersection ∩_{i=0}^{j} ⟨D_a^i(G)⟩, computed by
/// iterated pairwise intersection. Equals k−j for an LRS code.
pub fn intersection_chain(
    ore: &OreCtx,
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    j: usize,
) -> Result<usize> {
    let k = g.rows();
    if j >= k {
        return Err(Error::BadJ {
            j,
            why: format!("intersection chain needs j <= k-1 = {}", k.saturating_sub(1)),
        });
    }
    let mut inter = RowSpace::of(g);
    let mut derived = g.clone();
    for _ in 1..=j {
        derived = crate::skew::op_apply_mat(ore, a_vec, &derived, comp)?;
        inter = row_space_intersection(inter.basis(), &derived)?;
    }
    Ok(inter.dim())
}

/// Verdict wrapper around [`intersection_chain`]: structured iff the chain
/// dimension is exactly k−j; a generic pair of k-dim spaces intersects in
/// dimension max(2k−n, 0), which iterates to max((j+1)k − j·n, 0).
pub fn intersection_distinguisher(
    ore: &OreCtx,
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    j: usize,
) -> Result<Verdict> {
    let k = g.rows();
    let n = g.cols();
    let statistic = intersection_chain(ore, g, a_vec, comp, j)?;
    let threshold = k - j;
    let baseline = ((j + 1) * k).saturating_sub(j * n);
    Ok(Verdict::from_statistic(statistic, threshold, baseline))
}

/// Divide block i of `g` by v_i (the inverse of the GLRS multiplier action).
pub fn unscale_blocks(g: &MatFqm, comp: &Composition, v: &[FieldElem]) -> Result<MatFqm> {
    if v.len() != comp.ell() {
        return Err(Error::ShapeMismatch(format!(
            "{} multipliers for {} blocks",
            v.len(),
            comp.ell()
        )));
    }
    if g.cols() != comp.n() {
        return Err(Error::ShapeMismatch(format!(
            "generator has {} columns but composition totals {}",
            g.cols(),
            comp.n()
        )));
    }
    let field = Arc::clone(g.field());
    let mut out = g.clone();
    for (i, &vi) in v.iter().enumerate() {
        let inv = field.inv(vi)?;
        if inv == FieldElem::ONE {
            continue;
        }
        for c in comp.block_range(i) {
            for r in 0..g.rows() {
                let cur = out.get(r, c);
                out.set(r, c, field.mul(inv, cur));
            }
        }
    }
    Ok(out)
}

/// Result of a successful multiplier sweep.
#[derive(Clone, Debug)]
pub struct MultiplierSweep {
    /// Found multipliers, normalized with v_1 = 1.
    pub v: Vec<FieldElem>,
    /// Number of candidates tested, including the successful one.
    pub tried: u64,
    pub verdict: Verdict,
}

/// Lexicographically smallest tuple of `len` entries in [1, max] with the
/// given sum, or None if infeasible.
fn graded_first(len: usize, sum: u64, max: u64) -> Option<Vec<u64>> {
    if sum < len as u64 || sum > len as u64 * max {
        return None;
    }
    let mut out = Vec::with_capacity(len);
    let mut rem = sum;
    for pos in 0..len {
        let left = (len - pos - 1) as u64;
        let e = if rem > left * max { rem - left * max } else { 1 };
        out.push(e);
        rem -= e;
    }
    Some(out)
}

/// Advance `cur` to the next tuple in graded-lexicographic order (by sum,
/// then lexicographically) over entries in [1, max]. Returns false when
/// exhausted.
fn graded_next(cur: &mut Vec<u64>, max: u64) -> bool {
    let len = cur.len();
    if len == 0 {
        return false;
    }
    let total: u64 = cur.iter().sum();
    // next tuple with the same sum: increment the rightmost position whose
    // suffix can absorb the change, then minimize the suffix
    for i in (0..len - 1).rev() {
        let tail_sum: u64 = cur[i..].iter().sum();
        let t = (len - i - 1) as u64;
        for cand in cur[i] + 1..=max {
            if tail_sum < cand + t {
                break; // suffix entries would drop below 1
            }
            let rem = tail_sum - cand;
            if rem > t * max {
                continue; // suffix cannot absorb this much yet
            }
            cur[i] = cand;
            let suffix = graded_first(len - i - 1, rem, max).unwrap();
            cur[i + 1..].copy_from_slice(&suffix);
            return true;
        }
    }
    // move to the first tuple of the next sum
    match graded_first(len, total + 1, max) {
        Some(next) => {
            *cur = next;
            true
        }
        None => false,
    }
}

/// Search for block multipliers that expose LRS structure: candidates v with
/// v_1 = 1 are enumerated in graded-lexicographic order of element indexes;
/// for each, the blocks of G are unscaled by v and the Overbeck statistic is
/// tested. Returns the first structured candidate or `BudgetExhausted`.
pub fn glrs_multiplier_sweep(
    ore: &OreCtx,
    g: &MatFqm,
    a_vec: &[FieldElem],
    comp: &Composition,
    j: Option<usize>,
    budget: u64,
) -> Result<MultiplierSweep> {
    let field = &ore.field;
    let ell = comp.ell();
    let max = field.order() - 1;
    let mut tail = vec![1u64; ell.saturating_sub(1)]; // indexes of v_2..v_ℓ
    let mut tried = 0u64;
    loop {
        if tried >= budget {
            return Err(Error::BudgetExhausted { tried });
        }
        tried += 1;
        let mut v = Vec::with_capacity(ell);
        v.push(FieldElem::ONE);
        for &idx in &tail {
            v.push(field.element(idx)?);
        }
        let unscaled = unscale_blocks(g, comp, &v)?;
        let verdict = overbeck_distinguisher(ore, &unscaled, a_vec, comp, j)?;
        if verdict.structured {
            return Ok(MultiplierSweep { v, tried, verdict });
        }
        if tail.is_empty() || !graded_next(&mut tail, max) {
            return Err(Error::BudgetExhausted { tried });
        }
    }
}

//! Compositions, block views, and the sum-rank metric.
//!
//! A vector x ∈ F_{q^m}^n is split by a composition n = n_1 + … + n_ℓ into
//! blocks x = (x^(1) | … | x^(ℓ)); its sum-rank weight is the sum over blocks
//! of the number of F_q-linearly independent entries. Codes in this crate
//! measure distance in this metric.

use std::sync::Arc;

use rand::Rng;

use crate::error::Error;
use crate::field::{size_guard, FieldCtx, FieldElem, DEFAULT_ENUM_GUARD};
use crate::linalg::{expand_over_fq, MatFqm};
use crate::Result;

/// An integer composition n = n_1 + … + n_ℓ with all parts positive.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Composition> {
        if parts.is_empty() || parts.iter().any(|&p| p == 0) {
            return Err(Error::MalformedInput(
                "composition parts must be positive".into(),
            ));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Total length n.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of blocks ℓ.
    pub fn ell(&self) -> usize {
        self.parts.len()
    }

    /// Index range of block i inside a flat length-n vector.
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        let start: usize = self.parts[..i].iter().sum();
        start..start + self.parts[i]
    }

    /// Multiplicities λ of the distinct part values, ordered by first
    /// appearance: (2,2,3) → (2,1).
    pub fn lambda(&self) -> Vec<usize> {
        let mut values: Vec<usize> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for &p in &self.parts {
            match values.iter().position(|&v| v == p) {
                Some(j) => counts[j] += 1,
                None => {
                    values.push(p);
                    counts.push(1);
                }
            }
        }
        counts
    }

    /// Groups of block indexes sharing a part value, ordered by first
    /// appearance. Length-class-preserving permutations must permute within
    /// these groups.
    pub fn length_classes(&self) -> Vec<Vec<usize>> {
        let mut values: Vec<usize> = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for (i, &p) in self.parts.iter().enumerate() {
            match values.iter().position(|&v| v == p) {
                Some(j) => groups[j].push(i),
                None => {
                    values.push(p);
                    groups.push(vec![i]);
                }
            }
        }
        groups
    }
}

/// A vector over F_{q^m} together with the composition that blocks it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BlockVector {
    pub data: Vec<FieldElem>,
    pub comp: Composition,
}

impl BlockVector {
    pub fn new(data: Vec<FieldElem>, comp: Composition) -> Result<BlockVector> {
        if data.len() != comp.n() {
            return Err(Error::ShapeMismatch(format!(
                "vector length {} does not match composition total {}",
                data.len(),
                comp.n()
            )));
        }
        Ok(BlockVector { data, comp })
    }

    pub fn block(&self, i: usize) -> &[FieldElem] {
        &self.data[self.comp.block_range(i)]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[FieldElem]> {
        (0..self.comp.ell()).map(move |i| self.block(i))
    }
}

/// wt(x) = Σ_i rk_q(x^(i)).
pub fn sum_rank_weight(field: &Arc<FieldCtx>, x: &BlockVector) -> usize {
    x.blocks()
        .map(|b| expand_over_fq(field, b).rank())
        .sum()
}

/// d(x, y) = wt(x − y); both vectors must carry the same composition.
pub fn sum_rank_dist(field: &Arc<FieldCtx>, x: &BlockVector, y: &BlockVector) -> Result<usize> {
    if x.comp != y.comp {
        return Err(Error::ShapeMismatch(
            "sum-rank distance needs matching compositions".into(),
        ));
    }
    let diff: Vec<FieldElem> = x
        .data
        .iter()
        .zip(y.data.iter())
        .map(|(&a, &b)| field.sub(a, b))
        .collect();
    Ok(sum_rank_weight(
        field,
        &BlockVector::new(diff, x.comp.clone())?,
    ))
}

/// Random vector of full sum-rank weight n: every block has F_q-independent
/// entries (possible iff every part is at most m).
pub fn random_full_weight_vector<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    comp: &Composition,
    rng: &mut R,
) -> Result<BlockVector> {
    let m = field.m();
    for &part in comp.parts() {
        if part > m {
            return Err(Error::PartExceedsM { part, m });
        }
    }
    let mut data = Vec::with_capacity(comp.n());
    for &part in comp.parts() {
        loop {
            let block: Vec<FieldElem> = (0..part).map(|_| field.random_elem(rng)).collect();
            if expand_over_fq(field, &block).rank() == part {
                data.extend_from_slice(&block);
                break;
            }
        }
    }
    BlockVector::new(data, comp.clone())
}

/// Exact minimum sum-rank distance of the code spanned by `g`, by enumerating
/// all q^(m·k) − 1 nonzero messages. Guarded by the enumeration cap.
pub fn min_distance_bruteforce(
    field: &Arc<FieldCtx>,
    g: &MatFqm,
    comp: &Composition,
) -> Result<usize> {
    let k = g.rows();
    if k == 0 {
        return Err(Error::BadDimension(
            "minimum distance of the zero code is undefined".into(),
        ));
    }
    if g.cols() != comp.n() {
        return Err(Error::ShapeMismatch(format!(
            "generator has {} columns but composition totals {}",
            g.cols(),
            comp.n()
        )));
    }
    let guard = size_guard(DEFAULT_ENUM_GUARD);
    let total = (field.order() as u128).checked_pow(k as u32);
    match total {
        Some(t) if t <= guard as u128 => {}
        _ => {
            return Err(Error::SizeGuardExceeded {
                what: "codeword enumeration q^(m*k)",
                needed: total
                    .map(|t| t.min(u64::MAX as u128) as u64)
                    .unwrap_or(u64::MAX),
                guard,
            })
        }
    }
    let order = field.order();
    let mut best = usize::MAX;
    let mut msg = vec![0u64; k];
    loop {
        // odometer increment over message vectors
        let mut pos = 0;
        while pos < k {
            msg[pos] += 1;
            if msg[pos] < order {
                break;
            }
            msg[pos] = 0;
            pos += 1;
        }
        if pos == k {
            break;
        }
        let mvec: Vec<FieldElem> = msg.iter().map(|&i| field.element(i).unwrap()).collect();
        let cw = g.mul_left_vec(&mvec)?;
        let wt = sum_rank_weight(field, &BlockVector::new(cw, comp.clone())?);
        if wt < best {
            best = wt;
            if best == 0 {
                break; // degenerate generator; cannot get lower
            }
        }
    }
    Ok(best)
}

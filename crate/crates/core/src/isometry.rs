//! Linear and semilinear isometries of the sum-rank metric and their action
//! on GLRS parameters.
//!
//! An F_{q^m}-linear isometry is a triple (c, M, π): target block i receives
//! c_i · x^(π^{−1}(i)) · M_i with c_i ≠ 0, M_i ∈ GL(n_i, F_q), and π a
//! permutation of blocks that preserves block lengths. A semilinear isometry
//! additionally applies a field automorphism σ = (x ↦ x^(p^t)) to every
//! entry afterwards. `transport_params` realizes the fact that the image of
//! a GLRS code under any such isometry is again GLRS, with explicitly
//! transformed parameters (and derivation constant γ ↦ σ(γ)).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::codes::{canonical_generator, validate_params, GlrsParams};
use crate::error::Error;
use crate::field::{AutMap, FieldCtx, FieldElem, OreCtx};
use crate::linalg::MatFqm;
use crate::sum_rank::{BlockVector, Composition};
use crate::Result;

/// An F_{q^m}-linear sum-rank isometry.
#[derive(Clone, Debug)]
pub struct LinearIsometry {
    comp: Composition,
    /// Nonzero scalar per target block.
    c: Vec<FieldElem>,
    /// Invertible n_i×n_i matrix over F_q per target block.
    mats: Vec<MatFqm>,
    /// Permutation stored as images: source block j lands at position pi[j].
    pi: Vec<usize>,
    /// Cached inverse permutation: inv_pi[i] is the source of target i.
    inv_pi: Vec<usize>,
}

/// A semilinear isometry: linear part followed by a field automorphism.
#[derive(Clone, Debug)]
pub struct SemilinearIsometry {
    pub lin: LinearIsometry,
    pub aut: AutMap,
}

impl LinearIsometry {
    pub fn new(
        comp: Composition,
        c: Vec<FieldElem>,
        mats: Vec<MatFqm>,
        pi: Vec<usize>,
    ) -> Result<LinearIsometry> {
        let ell = comp.ell();
        if c.len() != ell || mats.len() != ell || pi.len() != ell {
            return Err(Error::ShapeMismatch(format!(
                "isometry parts sized {}/{}/{} for {} blocks",
                c.len(),
                mats.len(),
                pi.len(),
                ell
            )));
        }
        let mut seen = vec![false; ell];
        for &img in &pi {
            if img >= ell || seen[img] {
                return Err(Error::MalformedInput(
                    "pi is not a permutation of the blocks".into(),
                ));
            }
            seen[img] = true;
        }
        for (j, &img) in pi.iter().enumerate() {
            if comp.parts()[j] != comp.parts()[img] {
                return Err(Error::LengthClassViolation(format!(
                    "pi moves block {j} (length {}) to position {img} (length {})",
                    comp.parts()[j],
                    comp.parts()[img]
                )));
            }
        }
        for (i, &ci) in c.iter().enumerate() {
            if ci.is_zero() {
                return Err(Error::ZeroMultiplier { block: i });
            }
        }
        for (i, m) in mats.iter().enumerate() {
            let ni = comp.parts()[i];
            if m.rows() != ni || m.cols() != ni {
                return Err(Error::ShapeMismatch(format!(
                    "block matrix {i} is {}x{}, expected {ni}x{ni}",
                    m.rows(),
                    m.cols()
                )));
            }
            let field = m.field();
            for r in 0..ni {
                for col in 0..ni {
                    if !field.is_in_fq(m.get(r, col)) {
                        return Err(Error::MalformedInput(format!(
                            "block matrix {i} has an entry outside F_q"
                        )));
                    }
                }
            }
            if m.rank() != ni {
                return Err(Error::NotInvertible(format!(
                    "block matrix {i} is singular"
                )));
            }
        }
        let mut inv_pi = vec![0usize; ell];
        for (j, &img) in pi.iter().enumerate() {
            inv_pi[img] = j;
        }
        Ok(LinearIsometry {
            comp,
            c,
            mats,
            pi,
            inv_pi,
        })
    }

    pub fn identity(field: &Arc<FieldCtx>, comp: &Composition) -> LinearIsometry {
        let c = vec![FieldElem::ONE; comp.ell()];
        let mats = comp
            .parts()
            .iter()
            .map(|&ni| MatFqm::identity(Arc::clone(field), ni))
            .collect();
        let pi = (0..comp.ell()).collect();
        LinearIsometry::new(comp.clone(), c, mats, pi).expect("identity isometry is valid")
    }

    pub fn comp(&self) -> &Composition {
        &self.comp
    }

    pub fn c(&self) -> &[FieldElem] {
        &self.c
    }

    pub fn mats(&self) -> &[MatFqm] {
        &self.mats
    }

    pub fn pi(&self) -> &[usize] {
        &self.pi
    }

    fn apply_slice(&self, data: &[FieldElem]) -> Result<Vec<FieldElem>> {
        if data.len() != self.comp.n() {
            return Err(Error::ShapeMismatch(format!(
                "vector length {} for composition total {}",
                data.len(),
                self.comp.n()
            )));
        }
        let field = self.mats[0].field();
        let mut out = Vec::with_capacity(data.len());
        for i in 0..self.comp.ell() {
            let src = self.inv_pi[i];
            let block = &data[self.comp.block_range(src)];
            let ni = self.comp.parts()[i];
            for col in 0..ni {
                let mut acc = FieldElem::ZERO;
                for (t, &x) in block.iter().enumerate() {
                    acc = field.add(acc, field.mul(x, self.mats[i].get(t, col)));
                }
                out.push(field.mul(self.c[i], acc));
            }
        }
        Ok(out)
    }
}

impl SemilinearIsometry {
    pub fn linear(lin: LinearIsometry) -> SemilinearIsometry {
        SemilinearIsometry {
            lin,
            aut: AutMap::identity(),
        }
    }

    pub fn identity(field: &Arc<FieldCtx>, comp: &Composition) -> SemilinearIsometry {
        SemilinearIsometry::linear(LinearIsometry::identity(field, comp))
    }

    pub fn is_linear(&self) -> bool {
        self.aut.is_identity()
    }
}

/// Apply a linear isometry to a blocked vector.
pub fn apply_linear(iso: &LinearIsometry, x: &BlockVector) -> Result<BlockVector> {
    if x.comp != *iso.comp() {
        return Err(Error::ShapeMismatch(
            "vector and isometry compositions differ".into(),
        ));
    }
    BlockVector::new(iso.apply_slice(&x.data)?, x.comp.clone())
}

/// Apply a semilinear isometry: linear action, then the automorphism on
/// every entry.
pub fn apply_semilinear(iso: &SemilinearIsometry, x: &BlockVector) -> Result<BlockVector> {
    let lin = apply_linear(&iso.lin, x)?;
    if iso.aut.is_identity() {
        return Ok(lin);
    }
    let field = iso.lin.mats[0].field();
    let data = lin
        .data
        .iter()
        .map(|&e| field.aut_apply(iso.aut, e))
        .collect();
    BlockVector::new(data, lin.comp)
}

/// Row-wise action on a generator matrix.
pub fn apply_semilinear_mat(iso: &SemilinearIsometry, m: &MatFqm) -> Result<MatFqm> {
    let field = Arc::clone(m.field());
    let rows: Result<Vec<Vec<FieldElem>>> = (0..m.rows())
        .map(|r| {
            let acted = iso.lin.apply_slice(m.row(r))?;
            Ok(if iso.aut.is_identity() {
                acted
            } else {
                acted.iter().map(|&e| field.aut_apply(iso.aut, e)).collect()
            })
        })
        .collect();
    MatFqm::from_rows(field, rows?)
}

/// Composition (second ∘ first): apply `first`, then `second`.
pub fn compose(second: &SemilinearIsometry, first: &SemilinearIsometry) -> Result<SemilinearIsometry> {
    if second.lin.comp != first.lin.comp {
        return Err(Error::ShapeMismatch(
            "cannot compose isometries over different compositions".into(),
        ));
    }
    let field = Arc::clone(first.lin.mats[0].field());
    let d = field.tower_degree();
    let ell = first.lin.comp.ell();
    // σ₂ ∘ lin₂ ∘ σ₁ ∘ lin₁ = (σ₂σ₁) ∘ lin₂' ∘ lin₁ with lin₂' the σ₁^{-1}
    // twist of lin₂ (its constants and matrix entries pass through σ₁^{-1};
    // F_q is preserved, so lin₂' is still a valid isometry).
    let aut1_inv = first.aut.inverse(d);
    let twist = |e: FieldElem| field.aut_apply(aut1_inv, e);
    let c2: Vec<FieldElem> = second.lin.c.iter().map(|&e| twist(e)).collect();
    let mats2: Vec<MatFqm> = second.lin.mats.iter().map(|m| m.map(twist)).collect();

    let mut pi = vec![0usize; ell];
    let mut c = vec![FieldElem::ZERO; ell];
    let mut mats = Vec::with_capacity(ell);
    for j in 0..ell {
        pi[j] = second.lin.pi[first.lin.pi[j]];
    }
    for i in 0..ell {
        let mid = second.lin.inv_pi[i];
        c[i] = field.mul(c2[i], first.lin.c[mid]);
        mats.push(first.lin.mats[mid].matmul(&mats2[i])?);
    }
    let lin = LinearIsometry::new(first.lin.comp.clone(), c, mats, pi)?;
    let aut = AutMap::new(first.aut.t() + second.aut.t(), d);
    Ok(SemilinearIsometry { lin, aut })
}

/// Transport GLRS parameters along a semilinear isometry: the image code is
/// GLRS with blocks β̂^(i) = σ(β^(π^{−1}(i)) M_i), â_i = σ(a_{π^{−1}(i)}),
/// v̂_i = σ(c_i v_{π^{−1}(i)}), in the context with derivation constant σ(γ).
pub fn transport_params(iso: &SemilinearIsometry, p: &GlrsParams) -> Result<GlrsParams> {
    validate_params(p)?;
    if *iso.lin.comp() != *p.comp() {
        return Err(Error::ShapeMismatch(
            "isometry and code compositions differ".into(),
        ));
    }
    let field = Arc::clone(&p.ore.field);
    let sigma = |e: FieldElem| field.aut_apply(iso.aut, e);

    let acted_beta = iso.lin.apply_slice(&p.beta.data)?;
    let ell = p.ell();
    let mut beta_hat = Vec::with_capacity(p.n());
    let mut a_hat = Vec::with_capacity(ell);
    let mut v_hat = Vec::with_capacity(ell);
    for i in 0..ell {
        let src = iso.lin.inv_pi[i];
        // the c_i scalar belongs to the multiplier, not the locators
        let ci_inv = field.inv(iso.lin.c[i])?;
        for idx in p.comp().block_range(i) {
            beta_hat.push(sigma(field.mul(ci_inv, acted_beta[idx])));
        }
        a_hat.push(sigma(p.a[src]));
        v_hat.push(sigma(field.mul(iso.lin.c[i], p.v[src])));
    }
    let ore_hat = OreCtx::new(
        Arc::clone(&field),
        p.ore.theta_l(),
        sigma(p.ore.gamma()),
    )?;
    let out = GlrsParams {
        beta: BlockVector::new(beta_hat, p.comp().clone())?,
        a: a_hat,
        v: v_hat,
        k: p.k,
        ore: ore_hat,
    };
    validate_params(&out)?;
    Ok(out)
}

/// Uniformly random linear isometry for the composition.
pub fn random_linear_isometry<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    comp: &Composition,
    rng: &mut R,
) -> LinearIsometry {
    let ell = comp.ell();
    let c: Vec<FieldElem> = (0..ell).map(|_| field.random_nonzero(rng)).collect();
    let mats: Vec<MatFqm> = comp
        .parts()
        .iter()
        .map(|&ni| MatFqm::random_invertible_fq(Arc::clone(field), ni, rng))
        .collect();
    // length-class-preserving permutation: shuffle within each class
    let mut pi = vec![0usize; ell];
    for group in comp.length_classes() {
        let mut targets = group.clone();
        targets.shuffle(rng);
        for (src, &dst) in group.iter().zip(targets.iter()) {
            pi[*src] = dst;
        }
    }
    LinearIsometry::new(comp.clone(), c, mats, pi).expect("sampled isometry parts are valid")
}

/// Random semilinear isometry; with `semilinear` false the automorphism is
/// pinned to the identity.
pub fn random_semilinear_isometry<R: Rng + ?Sized>(
    field: &Arc<FieldCtx>,
    comp: &Composition,
    semilinear: bool,
    rng: &mut R,
) -> SemilinearIsometry {
    let lin = random_linear_isometry(field, comp, rng);
    let aut = if semilinear {
        AutMap::new(rng.gen_range(0..field.tower_degree()), field.tower_degree())
    } else {
        AutMap::identity()
    };
    SemilinearIsometry { lin, aut }
}

/// A disguised code: the published generator, the secret isometry, and the
/// secret row scrambler.
#[derive(Clone, Debug)]
pub struct Disguise {
    pub public_g: MatFqm,
    pub iso: SemilinearIsometry,
    pub scramble: MatFqm,
}

/// Publish S · ι(G_canonical) for a random invertible S and random isometry
/// ι — the attacker-visible object whose structure the distinguishers and
/// recovery routines operate on.
pub fn random_disguise<R: Rng + ?Sized>(
    p: &GlrsParams,
    semilinear: bool,
    rng: &mut R,
) -> Result<Disguise> {
    let field = Arc::clone(&p.ore.field);
    let g = canonical_generator(p)?;
    let iso = random_semilinear_isometry(&field, p.comp(), semilinear, rng);
    let acted = apply_semilinear_mat(&iso, &g)?;
    let scramble = MatFqm::random_invertible(field, p.k, rng);
    let public_g = scramble.matmul(&acted)?;
    Ok(Disguise {
        public_g,
        iso,
        scramble,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{code_row_space, random_glrs, MultiplierMode};
    use crate::linalg::RowSpace;
    use crate::sum_rank::{random_full_weight_vector, sum_rank_weight};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn e(i: u64) -> FieldElem {
        FieldElem(i as u32)
    }

    fn gf9() -> Arc<FieldCtx> {
        Arc::new(FieldCtx::new(3, 1, 2).unwrap())
    }

    #[test]
    fn identity_isometry_fixes_vectors() {
        let f = gf9();
        let comp = Composition::new(vec![2, 2]).unwrap();
        let iso = LinearIsometry::identity(&f, &comp);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let x = random_full_weight_vector(&f, &comp, &mut rng).unwrap();
            assert_eq!(apply_linear(&iso, &x).unwrap(), x);
        }
    }

    #[test]
    fn block_swap_action() {
        let f = gf9();
        let comp = Composition::new(vec![2, 2]).unwrap();
        let mats = vec![
            MatFqm::identity(Arc::clone(&f), 2),
            MatFqm::identity(Arc::clone(&f), 2),
        ];
        let iso =
            LinearIsometry::new(comp.clone(), vec![e(1), e(1)], mats, vec![1, 0]).unwrap();
        let x = BlockVector::new(vec![e(1), e(2), e(3), e(4)], comp).unwrap();
        let y = apply_linear(&iso, &x).unwrap();
        assert_eq!(y.data, vec![e(3), e(4), e(1), e(2)]);
    }

    #[test]
    fn construction_rejects_invalid_parts() {
        let f = gf9();
        let comp = Composition::new(vec![2, 1]).unwrap();
        let good_mats = || {
            vec![
                MatFqm::identity(Arc::clone(&f), 2),
                MatFqm::identity(Arc::clone(&f), 1),
            ]
        };
        // permutation must preserve block lengths
        assert!(matches!(
            LinearIsometry::new(comp.clone(), vec![e(1), e(1)], good_mats(), vec![1, 0]),
            Err(Error::LengthClassViolation(_))
        ));
        // zero block scalar
        assert!(matches!(
            LinearIsometry::new(comp.clone(), vec![e(0), e(1)], good_mats(), vec![0, 1]),
            Err(Error::ZeroMultiplier { block: 0 })
        ));
        // singular block matrix
        let mats = vec![
            MatFqm::zeros(Arc::clone(&f), 2, 2),
            MatFqm::identity(Arc::clone(&f), 1),
        ];
        assert!(matches!(
            LinearIsometry::new(comp.clone(), vec![e(1), e(1)], mats, vec![0, 1]),
            Err(Error::NotInvertible(_))
        ));
        // entries must lie in F_q (z = e(3) is outside F_3)
        let mut m = MatFqm::identity(Arc::clone(&f), 2);
        m.set(0, 1, e(3));
        let mats = vec![m, MatFqm::identity(Arc::clone(&f), 1)];
        assert!(matches!(
            LinearIsometry::new(comp.clone(), vec![e(1), e(1)], mats, vec![0, 1]),
            Err(Error::MalformedInput(_))
        ));
        // pi not a permutation
        assert!(matches!(
            LinearIsometry::new(comp, vec![e(1), e(1)], good_mats(), vec![0, 0]),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn isometries_preserve_sum_rank_weight() {
        let f = Arc::new(FieldCtx::new(2, 2, 2).unwrap());
        let comp = Composition::new(vec![2, 1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = BlockVector::new(
                (0..5).map(|_| f.random_elem(&mut rng)).collect(),
                comp.clone(),
            )
            .unwrap();
            let wt = sum_rank_weight(&f, &x);
            let lin = random_linear_isometry(&f, &comp, &mut rng);
            let y = apply_linear(&lin, &x).unwrap();
            assert_eq!(sum_rank_weight(&f, &y), wt);
            let semi = random_semilinear_isometry(&f, &comp, true, &mut rng);
            let z = apply_semilinear(&semi, &x).unwrap();
            assert_eq!(sum_rank_weight(&f, &z), wt);
        }
        // zero maps to zero
        let zero = BlockVector::new(vec![e(0); 5], comp.clone()).unwrap();
        let semi = random_semilinear_isometry(&f, &comp, true, &mut rng);
        assert!(apply_semilinear(&semi, &zero)
            .unwrap()
            .data
            .iter()
            .all(|c| c.is_zero()));
    }

    #[test]
    fn semilinear_with_identity_aut_is_linear() {
        let f = gf9();
        let comp = Composition::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lin = random_linear_isometry(&f, &comp, &mut rng);
        let semi = SemilinearIsometry::linear(lin.clone());
        let x = random_full_weight_vector(&f, &comp, &mut rng).unwrap();
        assert_eq!(
            apply_semilinear(&semi, &x).unwrap(),
            apply_linear(&lin, &x).unwrap()
        );
    }

    #[test]
    fn composition_matches_sequential_application() {
        let f = Arc::new(FieldCtx::new(2, 2, 2).unwrap());
        let comp = Composition::new(vec![2, 2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let iso1 = random_semilinear_isometry(&f, &comp, true, &mut rng);
            let iso2 = random_semilinear_isometry(&f, &comp, true, &mut rng);
            let both = compose(&iso2, &iso1).unwrap();
            let x = BlockVector::new(
                (0..5).map(|_| f.random_elem(&mut rng)).collect(),
                comp.clone(),
            )
            .unwrap();
            let seq = apply_semilinear(&iso2, &apply_semilinear(&iso1, &x).unwrap()).unwrap();
            let fused = apply_semilinear(&both, &x).unwrap();
            assert_eq!(seq, fused);
        }
    }

    #[test]
    fn transport_under_identity_is_identity() {
        let f = gf9();
        let ore = OreCtx::new(Arc::clone(&f), 1, e(0)).unwrap();
        let comp = Composition::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_glrs(&ore, &comp, 2, MultiplierMode::Random, &mut rng).unwrap();
        let iso = SemilinearIsometry::identity(&f, &comp);
        let t = transport_params(&iso, &p).unwrap();
        assert_eq!(t.beta.data, p.beta.data);
        assert_eq!(t.a, p.a);
        assert_eq!(t.v, p.v);
        assert_eq!(t.ore.gamma(), p.ore.gamma());
    }

    #[test]
    fn transport_predicts_the_image_code() {
        // For random isometries (linear and semilinear, zero and nonzero γ)
        // the canonical generator of the transported parameters spans the
        // image of the code.
        let f = gf9();
        let f16 = Arc::new(FieldCtx::new(2, 2, 2).unwrap());
        let cases: Vec<(OreCtx, Composition)> = vec![
            (
                OreCtx::new(Arc::clone(&f), 1, e(0)).unwrap(),
                Composition::new(vec![2, 2]).unwrap(),
            ),
            (
                OreCtx::new(Arc::clone(&f), 1, f.primitive()).unwrap(),
                Composition::new(vec![2, 1]).unwrap(),
            ),
            (
                OreCtx::new(Arc::clone(&f16), 1, e(9)).unwrap(),
                Composition::new(vec![2, 2, 2]).unwrap(),
            ),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for (ore, comp) in &cases {
            for semilinear in [false, true] {
                for _ in 0..20 {
                    let p =
                        random_glrs(ore, comp, 2, MultiplierMode::Random, &mut rng).unwrap();
                    let iso =
                        random_semilinear_isometry(&ore.field, comp, semilinear, &mut rng);
                    let g = canonical_generator(&p).unwrap();
                    let image = RowSpace::of(&apply_semilinear_mat(&iso, &g).unwrap());
                    let t = transport_params(&iso, &p).unwrap();
                    assert_eq!(code_row_space(&t).unwrap(), image);
                    // γ transports through the automorphism
                    assert_eq!(
                        t.ore.gamma(),
                        ore.field.aut_apply(iso.aut, ore.gamma())
                    );
                }
            }
        }
    }

    #[test]
    fn disguise_has_full_rank_and_expected_row_space() {
        let f = gf9();
        let ore = OreCtx::new(Arc::clone(&f), 1, e(0)).unwrap();
        let comp = Composition::new(vec![2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for semilinear in [false, true] {
            for _ in 0..20 {
                let p = random_glrs(&ore, &comp, 2, MultiplierMode::Random, &mut rng).unwrap();
                let d = random_disguise(&p, semilinear, &mut rng).unwrap();
                assert_eq!(d.public_g.rank(), 2);
                let t = transport_params(&d.iso, &p).unwrap();
                assert_eq!(RowSpace::of(&d.public_g), code_row_space(&t).unwrap());
                if !semilinear {
                    assert!(d.iso.is_linear());
                }
            }
        }
    }
}

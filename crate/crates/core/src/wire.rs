//! JSON wire formats.
//!
//! Field elements travel as ascending F_p coefficient arrays, matrices as
//! arrays of rows of coefficient arrays, and the field context as
//! `{"p":…,"s":…,"m":…,"modulus":[…]}`. These are the schemas the CLI
//! reads and writes; they are deliberately redundant (every file embeds the
//! field) so each file can be interpreted on its own.

use crate::codes::GlrsParams;
use crate::error::Error;
use crate::field::{FieldCtx, FieldElem, OreCtx};
use crate::isometry::{LinearIsometry, SemilinearIsometry};
use crate::linalg::MatFqm;
use crate::recovery::RecoveryMethod;
use crate::sum_rank::{BlockVector, Composition};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// `{"p":int,"s":int,"m":int,"modulus":[int,…]}`
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WireField {
    pub p: u64,
    pub s: usize,
    pub m: usize,
    pub modulus: Vec<u64>,
}

impl WireField {
    pub fn from_ctx(field: &FieldCtx) -> WireField {
        WireField {
            p: field.p(),
            s: field.s(),
            m: field.m(),
            modulus: field.modulus().to_vec(),
        }
    }

    pub fn to_ctx(&self) -> Result<Arc<FieldCtx>> {
        Ok(Arc::new(FieldCtx::with_modulus(
            self.p,
            self.s,
            self.m,
            self.modulus.clone(),
        )?))
    }
}

pub fn elem_to_wire(field: &FieldCtx, e: FieldElem) -> Vec<u64> {
    field.coeffs(e)
}

pub fn elem_from_wire(field: &FieldCtx, coeffs: &[u64]) -> Result<FieldElem> {
    field.elem_from_coeffs(coeffs)
}

pub fn vec_to_wire(field: &FieldCtx, v: &[FieldElem]) -> Vec<Vec<u64>> {
    v.iter().map(|&e| elem_to_wire(field, e)).collect()
}

pub fn vec_from_wire(field: &FieldCtx, v: &[Vec<u64>]) -> Result<Vec<FieldElem>> {
    v.iter().map(|c| elem_from_wire(field, c)).collect()
}

pub fn mat_to_wire(mat: &MatFqm) -> Vec<Vec<Vec<u64>>> {
    (0..mat.rows())
        .map(|r| vec_to_wire(mat.field(), mat.row(r)))
        .collect()
}

pub fn mat_from_wire(field: &Arc<FieldCtx>, rows: &[Vec<Vec<u64>>]) -> Result<MatFqm> {
    let data = rows
        .iter()
        .map(|row| vec_from_wire(field, row))
        .collect::<Result<Vec<_>>>()?;
    MatFqm::from_rows(Arc::clone(field), data)
}

/// `{"beta":[…],"a":[…],"v":[…],"comp":[…],"k":int,"theta_l":int,"gamma":[…]}`
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WireParams {
    pub beta: Vec<Vec<u64>>,
    pub a: Vec<Vec<u64>>,
    pub v: Vec<Vec<u64>>,
    pub comp: Vec<usize>,
    pub k: usize,
    pub theta_l: usize,
    pub gamma: Vec<u64>,
}

impl WireParams {
    pub fn from_params(p: &GlrsParams) -> WireParams {
        let field = &p.ore.field;
        WireParams {
            beta: vec_to_wire(field, &p.beta.data),
            a: vec_to_wire(field, &p.a),
            v: vec_to_wire(field, &p.v),
            comp: p.comp().parts().to_vec(),
            k: p.k,
            theta_l: p.ore.theta_l(),
            gamma: elem_to_wire(field, p.ore.gamma()),
        }
    }

    pub fn to_params(&self, field: &Arc<FieldCtx>) -> Result<GlrsParams> {
        let gamma = elem_from_wire(field, &self.gamma)?;
        let ore = OreCtx::new(Arc::clone(field), self.theta_l, gamma)?;
        let comp = Composition::new(self.comp.clone())?;
        let beta = BlockVector::new(vec_from_wire(field, &self.beta)?, comp)?;
        Ok(GlrsParams {
            beta,
            a: vec_from_wire(field, &self.a)?,
            v: vec_from_wire(field, &self.v)?,
            k: self.k,
            ore,
        })
    }
}

/// `{"c":[…],"M":[[[…]]],"pi":[…],"aut_t":int}`
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct WireIsometry {
    pub c: Vec<Vec<u64>>,
    #[serde(rename = "M")]
    pub mats: Vec<Vec<Vec<Vec<u64>>>>,
    pub pi: Vec<usize>,
    pub aut_t: usize,
}

impl WireIsometry {
    pub fn from_isometry(iso: &SemilinearIsometry) -> WireIsometry {
        let field = Arc::clone(iso.lin.mats()[0].field());
        WireIsometry {
            c: vec_to_wire(&field, iso.lin.c()),
            mats: iso.lin.mats().iter().map(mat_to_wire).collect(),
            pi: iso.lin.pi().to_vec(),
            aut_t: iso.aut.t(),
        }
    }

    pub fn to_isometry(
        &self,
        field: &Arc<FieldCtx>,
        comp: &Composition,
    ) -> Result<SemilinearIsometry> {
        let c = vec_from_wire(field, &self.c)?;
        let mats = self
            .mats
            .iter()
            .map(|m| mat_from_wire(field, m))
            .collect::<Result<Vec<_>>>()?;
        let lin = LinearIsometry::new(comp.clone(), c, mats, self.pi.clone())?;
        Ok(SemilinearIsometry {
            lin,
            aut: crate::field::AutMap::new(self.aut_t, field.tower_degree()),
        })
    }
}

/// Contents of `secret_params.json`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SecretFile {
    pub field: WireField,
    pub params: WireParams,
}

/// Contents of `public_generator.json`: everything an attacker sees.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PublicFile {
    pub field: WireField,
    pub comp: Vec<usize>,
    pub k: usize,
    pub theta_l: usize,
    pub gamma: Vec<u64>,
    pub generator: Vec<Vec<Vec<u64>>>,
}

impl PublicFile {
    /// Field, Ore context, composition, and generator matrix.
    pub fn decode(&self) -> Result<(Arc<FieldCtx>, OreCtx, Composition, MatFqm)> {
        let field = self.field.to_ctx()?;
        let gamma = elem_from_wire(&field, &self.gamma)?;
        let ore = OreCtx::new(Arc::clone(&field), self.theta_l, gamma)?;
        let comp = Composition::new(self.comp.clone())?;
        let generator = mat_from_wire(&field, &self.generator)?;
        if generator.cols() != comp.n() {
            return Err(Error::ShapeMismatch(format!(
                "generator has {} columns but composition totals {}",
                generator.cols(),
                comp.n()
            )));
        }
        Ok((field, ore, comp, generator))
    }
}

/// Contents of `disguise.json`. `gamma` is the derivation parameter of the
/// disguised code (the automorphism image of the original).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DisguiseFile {
    pub field: WireField,
    pub comp: Vec<usize>,
    pub scramble: Vec<Vec<Vec<u64>>>,
    pub isometry: WireIsometry,
    pub gamma: Vec<u64>,
}

/// Recovery report as written by the CLI: params, method, verified, timing.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct RecoveryFile {
    pub field: WireField,
    pub params: WireParams,
    pub method: RecoveryMethod,
    pub verified: bool,
    pub timing_ms: f64,
}

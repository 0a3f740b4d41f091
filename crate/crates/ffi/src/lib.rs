//! C ABI for the sumrank library.
//!
//! Everything crosses the boundary either as a plain scalar, as an opaque
//! handle ([`SrkContext`], [`SrkPublicCode`]) created and destroyed by the
//! matching `srk_*_new`/`srk_*_free` pair, or as a NUL-terminated UTF-8 JSON
//! string. The JSON payloads are exactly the documents the `sumrank` CLI
//! reads and writes (`public_generator.json`, `secret_params.json`, recovery
//! reports, experiment summaries), so artifacts move freely between the two.
//!
//! Conventions:
//! - every function returns an [`SrkStatus`]; anything but `Ok` (and
//!   `Unstructured`, which is a definite negative verdict rather than a
//!   failure) means the out-parameters were left untouched,
//! - strings returned through `*mut *mut c_char` are owned by the caller and
//!   must be released with [`srk_string_free`],
//! - on failure a human-readable detail message is kept per thread and can be
//!   fetched with [`srk_last_error_message`],
//! - no call ever unwinds across the boundary; panics surface as
//!   [`SrkStatus::Internal`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use sumrank::codes::{random_glrs, GlrsParams, MultiplierMode};
use sumrank::distinguishers::{
    glrs_multiplier_sweep, intersection_distinguisher, overbeck_distinguisher,
    square_distinguisher, unscale_blocks, Verdict,
};
use sumrank::experiment::{records_to_csv, run_experiment, ExperimentConfig, ExperimentMethod};
use sumrank::field::{AutMap, FieldCtx, FieldElem, OreCtx};
use sumrank::isometry::{random_disguise, transport_params};
use sumrank::linalg::MatFqm;
use sumrank::recovery::{recover_full, RecoveryOptions, RouteChoice};
use sumrank::sum_rank::Composition;
use sumrank::wire::{
    elem_to_wire, mat_to_wire, DisguiseFile, PublicFile, RecoveryFile, SecretFile, WireField,
    WireIsometry, WireParams,
};
use sumrank::Error;

/// Result code of every `srk_*` call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SrkStatus {
    /// Success; for distinguishers: the code looks structured.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    Utf8 = 2,
    /// Malformed JSON, inconsistent wire data, or invalid parameters.
    Malformed = 3,
    /// Definite negative: the distinguisher statistic rules the family out.
    Unstructured = 4,
    /// Recovery terminated without a verified parameter set.
    RecoveryFailed = 5,
    /// No statistic could be computed (budget, depth, or precondition).
    Inconclusive = 6,
    /// The parameter regime is outside what the operation supports.
    Unsupported = 7,
    /// A panic was caught at the boundary; state may be stale.
    Internal = 8,
}

/// Distinguisher selector for [`srk_distinguish`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SrkMethod {
    /// Square-code dimension (θ = Id only, no side information needed).
    Square = 0,
    /// Overbeck Γ-stack rank; needs evaluation parameters.
    Overbeck = 1,
    /// Intersection-chain dimension; needs evaluation parameters.
    Intersection = 2,
}

/// β-recovery route selector for [`srk_recover`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SrkRoute {
    /// Try the route suited to the automorphism first, then the other.
    Auto = 0,
    Dual = 1,
    Intersection = 2,
}

/// Block-multiplier mode for [`srk_keygen`].
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SrkMultipliers {
    /// v = (1, …, 1): a plain LRS instance.
    Ones = 0,
    /// Independent uniform nonzero multipliers.
    Random = 1,
}

/// Opaque field tower F_p ⊂ F_q ⊂ F_{q^m} together with an operator context
/// (θ = φ^l, δ = γ(id − θ)).
pub struct SrkContext {
    field: Arc<FieldCtx>,
    ore: OreCtx,
}

/// Opaque parsed public code: field, operator context, block composition and
/// generator matrix, as advertised by a `public_generator.json` document.
pub struct SrkPublicCode {
    field: Arc<FieldCtx>,
    ore: OreCtx,
    comp: Composition,
    generator: MatFqm,
    k: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg).unwrap_or_else(|_| CString::new("invalid error text").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

/// Status for a library error, with the detail recorded as the last error.
fn fail(err: Error) -> SrkStatus {
    let status = match &err {
        Error::BudgetExhausted { .. }
        | Error::NoValidJ { .. }
        | Error::PreconditionViolated(_) => SrkStatus::Inconclusive,
        Error::StructureNotFound(_)
        | Error::VerificationFailed
        | Error::KernelNotOneDimensional { .. }
        | Error::IntersectionNotOneDimensional { .. }
        | Error::DegenerateSolution(_) => SrkStatus::RecoveryFailed,
        Error::UnsupportedRegime(_) => SrkStatus::Unsupported,
        _ => SrkStatus::Malformed,
    };
    set_last_error(err.to_string());
    status
}

fn fail_malformed(msg: impl Into<String>) -> SrkStatus {
    set_last_error(msg.into());
    SrkStatus::Malformed
}

/// Run a closure, converting panics into `Internal` instead of unwinding
/// across the ABI boundary.
fn guarded(f: impl FnOnce() -> SrkStatus) -> SrkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic across ffi boundary".into());
            set_last_error(msg);
            SrkStatus::Internal
        }
    }
}

/// # Safety
/// `ptr` must be null or a valid NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, SrkStatus> {
    if ptr.is_null() {
        set_last_error("unexpected null string argument".into());
        return Err(SrkStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|e| {
        set_last_error(format!("string argument is not UTF-8: {e}"));
        SrkStatus::Utf8
    })
}

/// # Safety
/// `out` must be a valid pointer. JSON never contains NUL bytes, so the
/// conversion cannot fail for the strings this library produces.
unsafe fn write_out_string(out: *mut *mut c_char, text: String) -> SrkStatus {
    match CString::new(text) {
        Ok(cstring) => {
            *out = cstring.into_raw();
            SrkStatus::Ok
        }
        Err(_) => fail_malformed("produced text contains an interior NUL byte"),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializing plain data cannot fail")
}

/// Version of the underlying library, as a static string (do not free).
#[no_mangle]
pub extern "C" fn srk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static one-line description of a status code (do not free).
#[no_mangle]
pub extern "C" fn srk_status_message(status: SrkStatus) -> *const c_char {
    let text: &'static str = match status {
        SrkStatus::Ok => "ok\0",
        SrkStatus::NullArgument => "a required pointer argument was null\0",
        SrkStatus::Utf8 => "an input string was not valid UTF-8\0",
        SrkStatus::Malformed => "malformed input or invalid parameters\0",
        SrkStatus::Unstructured => "definite negative: statistic rules the family out\0",
        SrkStatus::RecoveryFailed => "no verified parameter set was found\0",
        SrkStatus::Inconclusive => "no statistic could be computed\0",
        SrkStatus::Unsupported => "parameter regime is not supported here\0",
        SrkStatus::Internal => "internal panic caught at the boundary\0",
    };
    text.as_ptr() as *const c_char
}

/// Detail message of the most recent failure on this thread, or null if none
/// was recorded. The caller owns the string (release with
/// [`srk_string_free`]).
#[no_mangle]
pub extern "C" fn srk_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match &*slot.borrow() {
        Some(msg) => msg.clone().into_raw(),
        None => std::ptr::null_mut(),
    })
}

/// Release a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must be null or a pointer previously returned by an `srk_*` call.
#[no_mangle]
pub unsafe extern "C" fn srk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a field tower F_p ⊂ F_{p^s} ⊂ F_{(p^s)^m} with the operator context
/// θ = φ^l, δ = γ(id − θ). `gamma`/`gamma_len` give γ as ascending base-p
/// coefficients; a null or empty array means γ = 0. On success `*out` owns
/// the context (release with [`srk_context_free`]).
///
/// # Safety
/// `gamma` must point to `gamma_len` readable values (or be null with
/// `gamma_len = 0`); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srk_context_new(
    p: u64,
    s: usize,
    m: usize,
    theta_l: usize,
    gamma: *const u64,
    gamma_len: usize,
    out: *mut *mut SrkContext,
) -> SrkStatus {
    if out.is_null() || (gamma.is_null() && gamma_len != 0) {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let coeffs: Vec<u64> = if gamma_len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(gamma, gamma_len).to_vec()
    };
    guarded(|| {
        let field = match FieldCtx::new(p, s, m) {
            Ok(f) => Arc::new(f),
            Err(e) => return fail(e),
        };
        let gamma = match field.elem_from_coeffs(&coeffs) {
            Ok(g) => g,
            Err(e) => return fail(e),
        };
        let ore = match OreCtx::new(Arc::clone(&field), theta_l, gamma) {
            Ok(o) => o,
            Err(e) => return fail(e),
        };
        *out = Box::into_raw(Box::new(SrkContext { field, ore }));
        SrkStatus::Ok
    })
}

/// Release a context created by [`srk_context_new`]. Null is a no-op.
///
/// # Safety
/// `ctx` must be null or a pointer returned by [`srk_context_new`].
#[no_mangle]
pub unsafe extern "C" fn srk_context_free(ctx: *mut SrkContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// Describe a context as a JSON object: `p`, `s`, `m`, `q`, `order`,
/// `theta_l`, `gamma` (coefficients), `identity_theta`, `zero_derivation`
/// and `conjugacy_classes` (number of nontrivial classes).
///
/// # Safety
/// `ctx` must be a live context handle; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srk_context_describe(
    ctx: *const SrkContext,
    out_json: *mut *mut c_char,
) -> SrkStatus {
    if ctx.is_null() || out_json.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let ctx = &*ctx;
    guarded(|| {
        let doc = serde_json::json!({
            "p": ctx.field.p(),
            "s": ctx.field.s(),
            "m": ctx.field.m(),
            "q": ctx.field.q(),
            "order": ctx.field.order(),
            "theta_l": ctx.ore.theta_l(),
            "gamma": elem_to_wire(&ctx.field, ctx.ore.gamma()),
            "identity_theta": ctx.ore.is_identity_theta(),
            "zero_derivation": ctx.ore.is_zero_derivation(),
            "conjugacy_classes": ctx.ore.class_count(),
        });
        write_out_string(out_json, to_json(&doc))
    })
}

/// Sample a fresh disguised instance, seeded deterministically. The result
/// is one JSON object with fields `secret`, `public` and `disguise`, each
/// byte-compatible with the file of the same role written by the CLI
/// (`secret_params.json`, `public_generator.json`, `disguise.json`). The
/// secret holds the transported parameters, which canonically describe the
/// public code.
///
/// # Safety
/// `ctx` must be a live context handle, `comp` must point to `comp_len`
/// readable values, and `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srk_keygen(
    ctx: *const SrkContext,
    comp: *const usize,
    comp_len: usize,
    k: usize,
    multipliers: SrkMultipliers,
    semilinear: bool,
    seed: u64,
    out_json: *mut *mut c_char,
) -> SrkStatus {
    if ctx.is_null() || comp.is_null() || out_json.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let ctx = &*ctx;
    let parts = std::slice::from_raw_parts(comp, comp_len).to_vec();
    guarded(|| {
        let comp = match Composition::new(parts.clone()) {
            Ok(c) => c,
            Err(e) => return fail(e),
        };
        let mode = match multipliers {
            SrkMultipliers::Ones => MultiplierMode::Ones,
            SrkMultipliers::Random => MultiplierMode::Random,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bundle = (|| -> sumrank::Result<serde_json::Value> {
            let params = random_glrs(&ctx.ore, &comp, k, mode, &mut rng)?;
            let disguise = random_disguise(&params, semilinear, &mut rng)?;
            let transported = transport_params(&disguise.iso, &params)?;
            let wire_field = WireField::from_ctx(&ctx.field);
            let secret = SecretFile {
                field: wire_field.clone(),
                params: WireParams::from_params(&transported),
            };
            let public = PublicFile {
                field: wire_field.clone(),
                comp: comp.parts().to_vec(),
                k,
                theta_l: transported.ore.theta_l(),
                gamma: elem_to_wire(&ctx.field, transported.ore.gamma()),
                generator: mat_to_wire(&disguise.public_g),
            };
            let disguise_file = DisguiseFile {
                field: wire_field,
                comp: comp.parts().to_vec(),
                scramble: mat_to_wire(&disguise.scramble),
                isometry: WireIsometry::from_isometry(&disguise.iso),
                gamma: elem_to_wire(&ctx.field, transported.ore.gamma()),
            };
            Ok(serde_json::json!({
                "secret": secret,
                "public": public,
                "disguise": disguise_file,
            }))
        })();
        match bundle {
            Ok(doc) => write_out_string(out_json, to_json(&doc)),
            Err(e) => fail(e),
        }
    })
}

/// Parse a `public_generator.json` document into an opaque handle (release
/// with [`srk_public_free`]).
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srk_public_parse(
    json: *const c_char,
    out: *mut *mut SrkPublicCode,
) -> SrkStatus {
    if out.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let text = match read_str(json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| {
        let file: PublicFile = match serde_json::from_str(text) {
            Ok(f) => f,
            Err(e) => return fail_malformed(e.to_string()),
        };
        match file.decode() {
            Ok((field, ore, comp, generator)) => {
                *out = Box::into_raw(Box::new(SrkPublicCode {
                    field,
                    ore,
                    comp,
                    generator,
                    k: file.k,
                }));
                SrkStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Release a handle created by [`srk_public_parse`]. Null is a no-op.
///
/// # Safety
/// `code` must be null or a pointer returned by [`srk_public_parse`].
#[no_mangle]
pub unsafe extern "C" fn srk_public_free(code: *mut SrkPublicCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Describe a parsed public code as a JSON object: `p`, `s`, `m`, `theta_l`,
/// `gamma`, `comp`, `n`, `k` and `generator_rank`.
///
/// # Safety
/// `code` must be a live handle; `out_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srk_public_describe(
    code: *const SrkPublicCode,
    out_json: *mut *mut c_char,
) -> SrkStatus {
    if code.is_null() || out_json.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let code = &*code;
    guarded(|| {
        let doc = serde_json::json!({
            "p": code.field.p(),
            "s": code.field.s(),
            "m": code.field.m(),
            "theta_l": code.ore.theta_l(),
            "gamma": elem_to_wire(&code.field, code.ore.gamma()),
            "comp": code.comp.parts(),
            "n": code.comp.n(),
            "k": code.k,
            "generator_rank": code.generator.rank(),
        });
        write_out_string(out_json, to_json(&doc))
    })
}

/// Known evaluation parameters, decoded from an optional secret document.
unsafe fn known_params(
    code: &SrkPublicCode,
    secret_json: *const c_char,
) -> Result<Option<GlrsParams>, SrkStatus> {
    if secret_json.is_null() {
        return Ok(None);
    }
    let text = read_str(secret_json)?;
    let secret: SecretFile =
        serde_json::from_str(text).map_err(|e| fail_malformed(e.to_string()))?;
    match secret.params.to_params(&code.field) {
        Ok(p) => Ok(Some(p)),
        Err(e) => Err(fail(e)),
    }
}

/// Run one distinguisher against a parsed public code.
///
/// `secret_json` may be null for [`SrkMethod::Square`]; the Γ-stack and
/// intersection methods need evaluation parameters and accept a
/// `secret_params.json` document. `j < 0` selects the method's default
/// depth. With `sweep_derivations` the statistic is retried over the
/// automorphism orbit of γ; with `sweep_multipliers` unknown block
/// multipliers are searched (`budget = 0` keeps the default of 10000
/// candidates).
///
/// Returns `Ok` and writes the verdict JSON when the structured-code law
/// holds, `Unstructured` (verdict still written when `out_verdict_json` is
/// non-null) when the statistic rules the family out, `Inconclusive` when no
/// statistic could be computed.
///
/// # Safety
/// `code` must be a live handle; `secret_json` must be null or a valid
/// string; `out_verdict_json` may be null when the verdict body is not
/// needed.
#[no_mangle]
pub unsafe extern "C" fn srk_distinguish(
    code: *const SrkPublicCode,
    method: SrkMethod,
    secret_json: *const c_char,
    j: i64,
    sweep_derivations: bool,
    sweep_multipliers: bool,
    budget: u64,
    out_verdict_json: *mut *mut c_char,
) -> SrkStatus {
    if code.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let code = &*code;
    let known = match known_params(code, secret_json) {
        Ok(k) => k,
        Err(status) => return status,
    };
    guarded(|| {
        let depth = if j < 0 { None } else { Some(j as usize) };
        let run = |ore: &OreCtx| -> sumrank::Result<Verdict> {
            match method {
                SrkMethod::Square => square_distinguisher(&code.generator, &code.comp),
                SrkMethod::Overbeck | SrkMethod::Intersection => {
                    let known = known.as_ref().ok_or_else(|| {
                        Error::MalformedInput(
                            "this method needs evaluation parameters: pass a secret document"
                                .into(),
                        )
                    })?;
                    if sweep_multipliers {
                        let budget = if budget == 0 { 10_000 } else { budget };
                        let sweep = glrs_multiplier_sweep(
                            ore,
                            &code.generator,
                            &known.a,
                            &code.comp,
                            depth,
                            budget,
                        )?;
                        return Ok(sweep.verdict);
                    }
                    let unscaled = unscale_blocks(&code.generator, &code.comp, &known.v)?;
                    match method {
                        SrkMethod::Overbeck => {
                            overbeck_distinguisher(ore, &unscaled, &known.a, &code.comp, depth)
                        }
                        SrkMethod::Intersection => intersection_distinguisher(
                            ore,
                            &unscaled,
                            &known.a,
                            &code.comp,
                            depth.unwrap_or(1),
                        ),
                        SrkMethod::Square => unreachable!(),
                    }
                }
            }
        };

        // the code is structured iff it is structured for some automorphism
        // image of γ, so sweep the orbit when asked
        let gammas: Vec<FieldElem> = if sweep_derivations {
            let mut seen = Vec::new();
            for t in 0..code.field.tower_degree() {
                let image = code.field.aut_apply(
                    AutMap::new(t, code.field.tower_degree()),
                    code.ore.gamma(),
                );
                if !seen.contains(&image) {
                    seen.push(image);
                }
            }
            seen
        } else {
            vec![code.ore.gamma()]
        };

        let mut last: Option<sumrank::Result<Verdict>> = None;
        for gamma in gammas {
            let ore = match OreCtx::new(Arc::clone(&code.field), code.ore.theta_l(), gamma) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            let res = run(&ore);
            let structured = matches!(&res, Ok(v) if v.structured);
            last = Some(res);
            if structured {
                break;
            }
        }
        match last.expect("at least one derivation candidate") {
            Ok(verdict) => {
                if !out_verdict_json.is_null() {
                    let status = write_out_string(out_verdict_json, to_json(&verdict));
                    if status != SrkStatus::Ok {
                        return status;
                    }
                }
                if verdict.structured {
                    SrkStatus::Ok
                } else {
                    set_last_error(format!(
                        "statistic {} differs from the structured value {}",
                        verdict.statistic, verdict.threshold
                    ));
                    SrkStatus::Unstructured
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// Recover evaluation parameters, multipliers and code locators from a
/// parsed public code, and verify them against its row space.
///
/// `secret_json` may carry a `secret_params.json` document whose evaluation
/// parameters and multipliers are taken as known (required when θ ≠ Id). On
/// success writes a recovery report JSON (same schema as the CLI report:
/// `field`, `params`, `method`, `verified`, `timing_ms`).
///
/// # Safety
/// `code` must be a live handle; `secret_json` must be null or a valid
/// string; `out_report_json` must be valid.
#[no_mangle]
pub unsafe extern "C" fn srk_recover(
    code: *const SrkPublicCode,
    route: SrkRoute,
    secret_json: *const c_char,
    out_report_json: *mut *mut c_char,
) -> SrkStatus {
    if code.is_null() || out_report_json.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let code = &*code;
    let known = match known_params(code, secret_json) {
        Ok(k) => k,
        Err(status) => return status,
    };
    guarded(|| {
        let mut options = RecoveryOptions {
            route: match route {
                SrkRoute::Auto => RouteChoice::Auto,
                SrkRoute::Dual => RouteChoice::Dual,
                SrkRoute::Intersection => RouteChoice::Intersection,
            },
            ..RecoveryOptions::default()
        };
        if let Some(params) = known {
            options.known_a = Some(params.a);
            options.known_v = Some(params.v);
        }
        let start = std::time::Instant::now();
        match recover_full(&code.generator, &code.comp, &code.ore, &options) {
            Ok(report) => {
                let file = RecoveryFile {
                    field: WireField::from_ctx(&code.field),
                    params: WireParams::from_params(&report.params),
                    method: report.method,
                    verified: report.verified,
                    timing_ms: start.elapsed().as_secs_f64() * 1e3,
                };
                write_out_string(out_report_json, to_json(&file))
            }
            Err(e) => fail(e),
        }
    })
}

/// Request body for [`srk_experiment`]; mirrors the CLI `experiment`
/// arguments.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentRequest {
    p: u64,
    s: usize,
    m: usize,
    #[serde(default)]
    theta_l: usize,
    /// γ as ascending base-p coefficients; empty means zero.
    #[serde(default)]
    gamma: Vec<u64>,
    comp: Vec<usize>,
    k: usize,
    #[serde(default = "default_trials")]
    trials: usize,
    #[serde(default)]
    seed: u64,
    method: ExperimentMethod,
    #[serde(default)]
    multipliers: WireMultipliers,
    #[serde(default)]
    semilinear: bool,
    #[serde(default)]
    j: Option<usize>,
    #[serde(default)]
    budget: Option<u64>,
}

fn default_trials() -> usize {
    100
}

#[derive(Deserialize, Default, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum WireMultipliers {
    #[default]
    Ones,
    Random,
}

/// Run a seeded structured-vs-random campaign. The request is a JSON object
/// with fields `p`, `s`, `m`, `comp`, `k`, `method` (one of `"square"`,
/// `"overbeck"`, `"intersection"`, `"recover"`, `"wrong_rep"`) and optional
/// `theta_l`, `gamma`, `trials` (default 100), `seed`, `multipliers`
/// (`"ones"`/`"random"`), `semilinear`, `j`, `budget`. The response carries
/// `summary` (rates and counts) and `csv` (the per-trial table, identical
/// bytes to the CLI's `trials.csv` for the same request and seed).
///
/// # Safety
/// `config_json` must be a valid NUL-terminated string; `out_json` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn srk_experiment(
    config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> SrkStatus {
    if out_json.is_null() {
        set_last_error("unexpected null pointer argument".into());
        return SrkStatus::NullArgument;
    }
    let text = match read_str(config_json) {
        Ok(t) => t,
        Err(status) => return status,
    };
    guarded(|| {
        let req: ExperimentRequest = match serde_json::from_str(text) {
            Ok(r) => r,
            Err(e) => return fail_malformed(e.to_string()),
        };
        let cfg = ExperimentConfig {
            p: req.p,
            s: req.s,
            m: req.m,
            theta_l: req.theta_l,
            gamma: req.gamma,
            comp: req.comp,
            k: req.k,
            trials: req.trials,
            seed: req.seed,
            method: req.method,
            multipliers: match req.multipliers {
                WireMultipliers::Ones => MultiplierMode::Ones,
                WireMultipliers::Random => MultiplierMode::Random,
            },
            semilinear: req.semilinear,
            j: req.j,
            budget: req.budget,
        };
        match run_experiment(&cfg) {
            Ok(outcome) => {
                let doc = serde_json::json!({
                    "summary": outcome.summary,
                    "csv": records_to_csv(&outcome.records),
                });
                write_out_string(out_json, to_json(&doc))
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstring(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    /// Take ownership of an out-string and free the C allocation.
    unsafe fn take(ptr: *mut c_char) -> String {
        assert!(!ptr.is_null());
        let text = CStr::from_ptr(ptr).to_str().unwrap().to_string();
        srk_string_free(ptr);
        text
    }

    fn new_context(p: u64, s: usize, m: usize, theta_l: usize) -> *mut SrkContext {
        let mut ctx: *mut SrkContext = ptr::null_mut();
        let status =
            unsafe { srk_context_new(p, s, m, theta_l, ptr::null(), 0, &mut ctx) };
        assert_eq!(status, SrkStatus::Ok);
        assert!(!ctx.is_null());
        ctx
    }

    fn keygen_json(ctx: *const SrkContext, comp: &[usize], k: usize, seed: u64) -> String {
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            srk_keygen(
                ctx,
                comp.as_ptr(),
                comp.len(),
                k,
                SrkMultipliers::Random,
                true,
                seed,
                &mut out,
            )
        };
        assert_eq!(status, SrkStatus::Ok);
        unsafe { take(out) }
    }

    #[test]
    fn version_and_status_messages_are_static_strings() {
        let version = unsafe { CStr::from_ptr(srk_version()) }.to_str().unwrap();
        assert!(!version.is_empty());
        for status in [
            SrkStatus::Ok,
            SrkStatus::NullArgument,
            SrkStatus::Utf8,
            SrkStatus::Malformed,
            SrkStatus::Unstructured,
            SrkStatus::RecoveryFailed,
            SrkStatus::Inconclusive,
            SrkStatus::Unsupported,
            SrkStatus::Internal,
        ] {
            let msg = unsafe { CStr::from_ptr(srk_status_message(status)) };
            assert!(!msg.to_str().unwrap().is_empty());
        }
    }

    #[test]
    fn context_describe_reports_the_tower() {
        let ctx = new_context(3, 1, 2, 1);
        let mut out: *mut c_char = ptr::null_mut();
        let status = unsafe { srk_context_describe(ctx, &mut out) };
        assert_eq!(status, SrkStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
        assert_eq!(doc["p"], 3);
        assert_eq!(doc["q"], 3);
        assert_eq!(doc["order"], 9);
        assert_eq!(doc["theta_l"], 1);
        assert_eq!(doc["zero_derivation"], true);
        assert_eq!(doc["conjugacy_classes"], 2);
        unsafe { srk_context_free(ctx) };
    }

    #[test]
    fn context_rejects_bad_towers() {
        let mut ctx: *mut SrkContext = ptr::null_mut();
        let status = unsafe { srk_context_new(4, 1, 2, 0, ptr::null(), 0, &mut ctx) };
        assert_eq!(status, SrkStatus::Malformed);
        let detail = unsafe { take(srk_last_error_message()) };
        assert!(detail.contains("prime"), "unexpected detail: {detail}");

        // γ ≠ 0 with θ = Id is rejected at construction
        let gamma = [1u64];
        let status =
            unsafe { srk_context_new(3, 1, 2, 0, gamma.as_ptr(), gamma.len(), &mut ctx) };
        assert_eq!(status, SrkStatus::Malformed);
    }

    #[test]
    fn keygen_is_deterministic_per_seed() {
        let ctx = new_context(3, 1, 2, 1);
        let first = keygen_json(ctx, &[2, 2], 2, 11);
        let second = keygen_json(ctx, &[2, 2], 2, 11);
        let third = keygen_json(ctx, &[2, 2], 2, 12);
        assert_eq!(first, second);
        assert_ne!(first, third);
        let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
        for key in ["secret", "public", "disguise"] {
            assert!(doc[key].is_object(), "missing {key}");
        }
        unsafe { srk_context_free(ctx) };
    }

    #[test]
    fn keygen_distinguish_recover_round_trip() {
        let ctx = new_context(3, 1, 2, 1);
        let bundle: serde_json::Value =
            serde_json::from_str(&keygen_json(ctx, &[2, 2], 2, 7)).unwrap();
        let public = cstring(&bundle["public"].to_string());
        let secret = cstring(&bundle["secret"].to_string());

        let mut code: *mut SrkPublicCode = ptr::null_mut();
        assert_eq!(
            unsafe { srk_public_parse(public.as_ptr(), &mut code) },
            SrkStatus::Ok
        );

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { srk_public_describe(code, &mut out) },
            SrkStatus::Ok
        );
        let desc: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
        assert_eq!(desc["n"], 4);
        assert_eq!(desc["k"], 2);
        assert_eq!(desc["generator_rank"], 2);

        // Γ-stack distinguisher flags the instance as structured
        let mut verdict_out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            srk_distinguish(
                code,
                SrkMethod::Overbeck,
                secret.as_ptr(),
                -1,
                false,
                false,
                0,
                &mut verdict_out,
            )
        };
        assert_eq!(status, SrkStatus::Ok);
        let verdict: Verdict = serde_json::from_str(&unsafe { take(verdict_out) }).unwrap();
        assert!(verdict.structured);
        assert_eq!(verdict.statistic, verdict.threshold);

        // recovery produces a verified report
        let mut report_out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            srk_recover(code, SrkRoute::Auto, secret.as_ptr(), &mut report_out)
        };
        assert_eq!(status, SrkStatus::Ok);
        let report: serde_json::Value =
            serde_json::from_str(&unsafe { take(report_out) }).unwrap();
        assert_eq!(report["verified"], true);
        assert_eq!(report["method"], "overbeck_dual");

        unsafe { srk_public_free(code) };
        unsafe { srk_context_free(ctx) };
    }

    #[test]
    fn distinguish_without_parameters_is_malformed() {
        let ctx = new_context(3, 1, 2, 1);
        let bundle: serde_json::Value =
            serde_json::from_str(&keygen_json(ctx, &[2, 2], 2, 3)).unwrap();
        let public = cstring(&bundle["public"].to_string());
        let mut code: *mut SrkPublicCode = ptr::null_mut();
        assert_eq!(
            unsafe { srk_public_parse(public.as_ptr(), &mut code) },
            SrkStatus::Ok
        );
        let status = unsafe {
            srk_distinguish(
                code,
                SrkMethod::Overbeck,
                ptr::null(),
                -1,
                false,
                false,
                0,
                ptr::null_mut(),
            )
        };
        assert_eq!(status, SrkStatus::Malformed);
        let detail = unsafe { take(srk_last_error_message()) };
        assert!(detail.contains("evaluation parameters"), "{detail}");
        unsafe { srk_public_free(code) };
        unsafe { srk_context_free(ctx) };
    }

    #[test]
    fn random_code_comes_back_unstructured() {
        let field = Arc::new(FieldCtx::new(2, 2, 3).unwrap());
        let ore = OreCtx::new(Arc::clone(&field), 1, FieldElem::ZERO).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = loop {
            let g = MatFqm::random(Arc::clone(&field), 3, 9, &mut rng);
            if g.rank() == 3 {
                break g;
            }
        };
        let a: Vec<FieldElem> = ore.sample_class_reps(3, &mut rng).unwrap();
        let public = PublicFile {
            field: WireField::from_ctx(&field),
            comp: vec![3, 3, 3],
            k: 3,
            theta_l: 1,
            gamma: elem_to_wire(&field, FieldElem::ZERO),
            generator: mat_to_wire(&g),
        };
        let secret = SecretFile {
            field: WireField::from_ctx(&field),
            params: WireParams::from_params(&GlrsParams {
                beta: sumrank::sum_rank::BlockVector::new(
                    vec![FieldElem::ONE; 9],
                    Composition::new(vec![3, 3, 3]).unwrap(),
                )
                .unwrap(),
                a,
                v: vec![FieldElem::ONE; 3],
                k: 3,
                ore: ore.clone(),
            }),
        };
        let public = cstring(&serde_json::to_string(&public).unwrap());
        let secret = cstring(&serde_json::to_string(&secret).unwrap());

        let mut code: *mut SrkPublicCode = ptr::null_mut();
        assert_eq!(
            unsafe { srk_public_parse(public.as_ptr(), &mut code) },
            SrkStatus::Ok
        );
        let mut verdict_out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            srk_distinguish(
                code,
                SrkMethod::Overbeck,
                secret.as_ptr(),
                -1,
                false,
                false,
                0,
                &mut verdict_out,
            )
        };
        assert_eq!(status, SrkStatus::Unstructured);
        let verdict: Verdict = serde_json::from_str(&unsafe { take(verdict_out) }).unwrap();
        assert!(!verdict.structured);
        assert!(verdict.certainty);

        let mut report_out: *mut c_char = ptr::null_mut();
        let status = unsafe {
            srk_recover(code, SrkRoute::Auto, secret.as_ptr(), &mut report_out)
        };
        assert_eq!(status, SrkStatus::RecoveryFailed);
        assert!(report_out.is_null());

        unsafe { srk_public_free(code) };
    }

    #[test]
    fn malformed_and_null_inputs_are_reported() {
        let mut code: *mut SrkPublicCode = ptr::null_mut();
        let truncated = cstring("{\"field\": {\"p\": 3");
        assert_eq!(
            unsafe { srk_public_parse(truncated.as_ptr(), &mut code) },
            SrkStatus::Malformed
        );
        assert_eq!(
            unsafe { srk_public_parse(ptr::null(), &mut code) },
            SrkStatus::NullArgument
        );
        assert_eq!(
            unsafe { srk_public_parse(truncated.as_ptr(), ptr::null_mut()) },
            SrkStatus::NullArgument
        );
        let not_utf8 = [0xffu8, 0xfe, 0x00];
        assert_eq!(
            unsafe {
                srk_public_parse(not_utf8.as_ptr() as *const c_char, &mut code)
            },
            SrkStatus::Utf8
        );
        unsafe { srk_string_free(ptr::null_mut()) };
        unsafe { srk_public_free(ptr::null_mut()) };
        unsafe { srk_context_free(ptr::null_mut()) };
    }

    #[test]
    fn experiment_matches_the_library_and_is_deterministic() {
        // wide context: a random code is essentially never accidentally
        // structured here, so the false-positive rate is exactly zero
        let request = cstring(
            r#"{"p":2,"s":2,"m":3,"theta_l":1,"comp":[3,3,3],"k":3,
                "trials":6,"seed":123,"method":"overbeck",
                "multipliers":"random","semilinear":true,"j":1}"#,
        );
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(
            unsafe { srk_experiment(request.as_ptr(), &mut out) },
            SrkStatus::Ok
        );
        let first: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
        assert_eq!(
            unsafe { srk_experiment(request.as_ptr(), &mut out) },
            SrkStatus::Ok
        );
        let second: serde_json::Value = serde_json::from_str(&unsafe { take(out) }).unwrap();
        assert_eq!(first, second);
        assert_eq!(first["summary"]["tp_rate"], 1.0);
        assert_eq!(first["summary"]["fp_rate"], 0.0);

        let cfg = ExperimentConfig {
            p: 2,
            s: 2,
            m: 3,
            theta_l: 1,
            gamma: vec![],
            comp: vec![3, 3, 3],
            k: 3,
            trials: 6,
            seed: 123,
            method: ExperimentMethod::Overbeck,
            multipliers: MultiplierMode::Random,
            semilinear: true,
            j: Some(1),
            budget: None,
        };
        let outcome = run_experiment(&cfg).unwrap();
        assert_eq!(first["csv"], records_to_csv(&outcome.records));

        let bad = cstring(r#"{"p":3,"s":1,"m":2,"comp":[2,2],"k":2,"method":"sideways"}"#);
        assert_eq!(
            unsafe { srk_experiment(bad.as_ptr(), &mut out) },
            SrkStatus::Malformed
        );
    }

    #[test]
    fn generated_header_covers_the_surface() {
        let header = std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/include/sumrank.h"
        ))
        .expect("build script generates include/sumrank.h");
        for symbol in [
            "SrkStatus",
            "SrkContext",
            "SrkPublicCode",
            "srk_context_new",
            "srk_keygen",
            "srk_public_parse",
            "srk_distinguish",
            "srk_recover",
            "srk_experiment",
            "srk_last_error_message",
            "srk_string_free",
        ] {
            assert!(header.contains(symbol), "header lacks {symbol}");
        }
    }
}

//! Command-line experiment harness for sum-rank structured codes: instance
//! generation, disguising, distinguishing, parameter recovery, and
//! Monte-Carlo campaigns.
//!
//! Exit codes: 0 = structured / success, 2 = malformed input or unsupported
//! configuration, 3 = unstructured / recovery failed, 4 = inconclusive
//! (budget exhausted or no usable statistic for these parameters).

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use sumrank::codes::{canonical_generator, GlrsParams, MultiplierMode};
use sumrank::distinguishers::{
    glrs_multiplier_sweep, intersection_distinguisher, overbeck_distinguisher,
    square_distinguisher, unscale_blocks, Verdict,
};
use sumrank::error::Error;
use sumrank::experiment::{records_to_csv, run_experiment, ExperimentConfig, ExperimentMethod};
use sumrank::field::{FieldCtx, FieldElem, OreCtx};
use sumrank::isometry::{random_disguise, transport_params};
use sumrank::linalg::MatFqm;
use sumrank::recovery::{recover_full, RecoveryOptions, RouteChoice};
use sumrank::sum_rank::Composition;
use sumrank::wire::{
    elem_to_wire, mat_to_wire, DisguiseFile, PublicFile, RecoveryFile, SecretFile, WireField,
    WireIsometry, WireParams,
};

const EXIT_OK: u8 = 0;
const EXIT_MALFORMED: u8 = 2;
const EXIT_NEGATIVE: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(
    name = "sumrank",
    about = "Construct, disguise, distinguish, and recover sum-rank structured codes",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a disguised instance: secret parameters, public generator,
    /// and the disguise transcript.
    Keygen(KeygenArgs),
    /// Run a distinguisher on a public generator file.
    Distinguish(DistinguishArgs),
    /// Recover canonical parameters from a public generator file.
    Recover(RecoverArgs),
    /// Run a Monte-Carlo campaign of structured vs random trials.
    Experiment(ExperimentArgs),
    /// Summarize a JSON artifact produced by this tool.
    Inspect(InspectArgs),
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field tower as p,s,m (F_p ⊂ F_{p^s} ⊂ F_{p^(s·m)})
    #[arg(long, value_parser = parse_triple)]
    field: (u64, usize, usize),
    /// Automorphism exponent: θ = φ^l with φ the q-power Frobenius
    #[arg(long = "theta-l", default_value_t = 0)]
    theta_l: usize,
    /// Derivation parameter γ as comma-separated F_p coefficients
    #[arg(long, default_value = "0", value_delimiter = ',')]
    gamma: Vec<u64>,
}

impl FieldArgs {
    fn build(&self) -> sumrank::Result<(Arc<FieldCtx>, OreCtx)> {
        let (p, s, m) = self.field;
        let field = Arc::new(FieldCtx::new(p, s, m)?);
        let gamma = field.elem_from_coeffs(&self.gamma)?;
        let ore = OreCtx::new(Arc::clone(&field), self.theta_l, gamma)?;
        Ok((field, ore))
    }
}

#[derive(Args)]
struct KeygenArgs {
    #[command(flatten)]
    field: FieldArgs,
    /// Block composition, e.g. 2,2
    #[arg(long, value_delimiter = ',', required = true)]
    comp: Vec<usize>,
    /// Code dimension
    #[arg(long)]
    k: usize,
    /// Block multipliers of the secret code
    #[arg(long, value_enum, default_value_t = MultArg::Ones)]
    multipliers: MultArg,
    /// Apply a field automorphism as part of the disguise
    #[arg(long, default_value_t = false)]
    semilinear: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct DistinguishArgs {
    /// Public generator file (as written by keygen)
    #[arg(long)]
    public: PathBuf,
    #[arg(long, value_enum)]
    method: DistMethod,
    /// Secret parameter file supplying evaluation parameters (and
    /// multipliers) for the overbeck/intersection methods
    #[arg(long = "a-file")]
    a_file: Option<PathBuf>,
    /// Stacking depth (overbeck) or chain length (intersection)
    #[arg(long)]
    j: Option<usize>,
    /// Try every derivation equivalent under the automorphism group
    #[arg(long = "sweep-derivations", default_value_t = false)]
    sweep_derivations: bool,
    /// Sweep candidate block multipliers instead of reading them from a file
    #[arg(long = "sweep-multipliers", default_value_t = false)]
    sweep_multipliers: bool,
    /// Candidate budget for the multiplier sweep
    #[arg(long)]
    budget: Option<u64>,
}

#[derive(Args)]
struct RecoverArgs {
    /// Public generator file (as written by keygen)
    #[arg(long)]
    public: PathBuf,
    /// Secret parameter file supplying known evaluation parameters and
    /// multipliers (required for non-identity automorphisms)
    #[arg(long = "a-file")]
    a_file: Option<PathBuf>,
    /// β-recovery route
    #[arg(long, value_enum, default_value_t = RouteArg::Auto)]
    route: RouteArg,
    /// Write the recovery report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    field: FieldArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    comp: Vec<usize>,
    #[arg(long)]
    k: usize,
    /// Structured trials per campaign (the same number of random trials runs)
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    method: ExpMethod,
    #[arg(long, value_enum, default_value_t = MultArg::Ones)]
    multipliers: MultArg,
    #[arg(long, default_value_t = false)]
    semilinear: bool,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    /// Output directory for trials.csv and summary.json
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct InspectArgs {
    /// Any JSON artifact written by this tool
    #[arg(long)]
    file: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MultArg {
    Ones,
    Random,
}

impl From<MultArg> for MultiplierMode {
    fn from(m: MultArg) -> MultiplierMode {
        match m {
            MultArg::Ones => MultiplierMode::Ones,
            MultArg::Random => MultiplierMode::Random,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DistMethod {
    Square,
    Overbeck,
    Intersection,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpMethod {
    Square,
    Overbeck,
    Intersection,
    Recover,
    WrongRep,
}

impl From<ExpMethod> for ExperimentMethod {
    fn from(m: ExpMethod) -> ExperimentMethod {
        match m {
            ExpMethod::Square => ExperimentMethod::Square,
            ExpMethod::Overbeck => ExperimentMethod::Overbeck,
            ExpMethod::Intersection => ExperimentMethod::Intersection,
            ExpMethod::Recover => ExperimentMethod::Recover,
            ExpMethod::WrongRep => ExperimentMethod::WrongRep,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteArg {
    Auto,
    Dual,
    Intersection,
}

impl From<RouteArg> for RouteChoice {
    fn from(r: RouteArg) -> RouteChoice {
        match r {
            RouteArg::Auto => RouteChoice::Auto,
            RouteArg::Dual => RouteChoice::Dual,
            RouteArg::Intersection => RouteChoice::Intersection,
        }
    }
}

fn parse_triple(s: &str) -> Result<(u64, usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected p,s,m".into());
    }
    let p = parts[0].trim().parse().map_err(|e| format!("p: {e}"))?;
    let sv = parts[1].trim().parse().map_err(|e| format!("s: {e}"))?;
    let m = parts[2].trim().parse().map_err(|e| format!("m: {e}"))?;
    Ok((p, sv, m))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Keygen(args) => cmd_keygen(&args),
        Cmd::Distinguish(args) => cmd_distinguish(&args),
        Cmd::Recover(args) => cmd_recover(&args),
        Cmd::Experiment(args) => cmd_experiment(&args),
        Cmd::Inspect(args) => cmd_inspect(&args),
    };
    match code {
        Ok(c) => ExitCode::from(c),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_MALFORMED)
        }
    }
}

/// Errors that prevented computing a statistic at all.
fn inconclusive(err: &Error) -> bool {
    matches!(
        err,
        Error::BudgetExhausted { .. } | Error::NoValidJ { .. } | Error::PreconditionViolated(_)
    )
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_keygen(args: &KeygenArgs) -> Result<u8, String> {
    let (field, ore) = args.field.build().map_err(|e| e.to_string())?;
    let comp = Composition::new(args.comp.clone()).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let params = sumrank::codes::random_glrs(
        &ore,
        &comp,
        args.k,
        args.multipliers.into(),
        &mut rng,
    )
    .map_err(|e| e.to_string())?;
    let disguise =
        random_disguise(&params, args.semilinear, &mut rng).map_err(|e| e.to_string())?;
    // the transported parameters canonically describe the public code
    let transported =
        transport_params(&disguise.iso, &params).map_err(|e| e.to_string())?;

    std::fs::create_dir_all(&args.out).map_err(|e| e.to_string())?;
    let wire_field = WireField::from_ctx(&field);
    let secret = SecretFile {
        field: wire_field.clone(),
        params: WireParams::from_params(&transported),
    };
    let public = PublicFile {
        field: wire_field.clone(),
        comp: comp.parts().to_vec(),
        k: args.k,
        theta_l: transported.ore.theta_l(),
        gamma: elem_to_wire(&field, transported.ore.gamma()),
        generator: mat_to_wire(&disguise.public_g),
    };
    let disguise_file = DisguiseFile {
        field: wire_field,
        comp: comp.parts().to_vec(),
        scramble: mat_to_wire(&disguise.scramble),
        isometry: WireIsometry::from_isometry(&disguise.iso),
        gamma: elem_to_wire(&field, transported.ore.gamma()),
    };
    write_json(&args.out.join("secret_params.json"), &secret)?;
    write_json(&args.out.join("public_generator.json"), &public)?;
    write_json(&args.out.join("disguise.json"), &disguise_file)?;
    println!(
        "wrote secret_params.json, public_generator.json, disguise.json to {}",
        args.out.display()
    );
    Ok(EXIT_OK)
}

/// Run one configured distinguisher against a generator under a specific
/// Ore context.
fn run_method(
    args: &DistinguishArgs,
    ore: &OreCtx,
    g: &MatFqm,
    comp: &Composition,
    known: Option<&GlrsParams>,
) -> sumrank::Result<Verdict> {
    match args.method {
        DistMethod::Square => square_distinguisher(g, comp),
        DistMethod::Overbeck | DistMethod::Intersection => {
            let known = known.ok_or_else(|| {
                Error::MalformedInput(
                    "this method needs evaluation parameters: pass --a-file".into(),
                )
            })?;
            if args.sweep_multipliers {
                let budget = args.budget.unwrap_or(10_000);
                let sweep =
                    glrs_multiplier_sweep(ore, g, &known.a, comp, args.j, budget)?;
                return Ok(sweep.verdict);
            }
            let unscaled = unscale_blocks(g, comp, &known.v)?;
            match args.method {
                DistMethod::Overbeck => {
                    overbeck_distinguisher(ore, &unscaled, &known.a, comp, args.j)
                }
                DistMethod::Intersection => intersection_distinguisher(
                    ore,
                    &unscaled,
                    &known.a,
                    comp,
                    args.j.unwrap_or(1),
                ),
                DistMethod::Square => unreachable!(),
            }
        }
    }
}

fn cmd_distinguish(args: &DistinguishArgs) -> Result<u8, String> {
    let public: PublicFile = read_json(&args.public)?;
    let (field, ore, comp, g) = public.decode().map_err(|e| e.to_string())?;
    let known: Option<GlrsParams> = match &args.a_file {
        Some(path) => {
            let secret: SecretFile = read_json(path)?;
            Some(secret.params.to_params(&field).map_err(|e| e.to_string())?)
        }
        None => None,
    };

    // derivation sweep: the code is structured iff it is structured for any
    // automorphism image of γ, so try each in turn
    let gammas: Vec<FieldElem> = if args.sweep_derivations {
        let mut seen = Vec::new();
        for t in 0..field.tower_degree() {
            let image = field.aut_apply(sumrank::field::AutMap::new(t, field.tower_degree()), ore.gamma());
            if !seen.contains(&image) {
                seen.push(image);
            }
        }
        seen
    } else {
        vec![ore.gamma()]
    };

    let mut last: Option<sumrank::Result<Verdict>> = None;
    for gamma in gammas {
        let ore_g = match OreCtx::new(Arc::clone(&field), ore.theta_l(), gamma) {
            Ok(o) => o,
            Err(e) => return Err(e.to_string()),
        };
        let res = run_method(args, &ore_g, &g, &comp, known.as_ref());
        let structured = matches!(&res, Ok(v) if v.structured);
        last = Some(res);
        if structured {
            break;
        }
    }
    match last.expect("at least one derivation candidate") {
        Ok(verdict) => {
            println!("{}", serde_json::to_string(&verdict).map_err(|e| e.to_string())?);
            Ok(if verdict.structured {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Err(e) if inconclusive(&e) => {
            eprintln!("inconclusive: {e}");
            Ok(EXIT_INCONCLUSIVE)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_recover(args: &RecoverArgs) -> Result<u8, String> {
    let public: PublicFile = read_json(&args.public)?;
    let (field, ore, comp, g) = public.decode().map_err(|e| e.to_string())?;
    let mut options = RecoveryOptions {
        route: args.route.into(),
        ..RecoveryOptions::default()
    };
    if let Some(path) = &args.a_file {
        let secret: SecretFile = read_json(path)?;
        let params = secret.params.to_params(&field).map_err(|e| e.to_string())?;
        options.known_a = Some(params.a);
        options.known_v = Some(params.v);
    }
    let start = std::time::Instant::now();
    match recover_full(&g, &comp, &ore, &options) {
        Ok(report) => {
            let file = RecoveryFile {
                field: WireField::from_ctx(&field),
                params: WireParams::from_params(&report.params),
                method: report.method,
                verified: report.verified,
                timing_ms: start.elapsed().as_secs_f64() * 1e3,
            };
            match &args.out {
                Some(path) => write_json(path, &file)?,
                None => println!(
                    "{}",
                    serde_json::to_string_pretty(&file).map_err(|e| e.to_string())?
                ),
            }
            Ok(EXIT_OK)
        }
        Err(
            e @ (Error::StructureNotFound(_)
            | Error::VerificationFailed
            | Error::KernelNotOneDimensional { .. }
            | Error::IntersectionNotOneDimensional { .. }
            | Error::DegenerateSolution(_)),
        ) => {
            eprintln!("recovery failed: {e}");
            Ok(EXIT_NEGATIVE)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<u8, String> {
    let (p, s, m) = args.field.field;
    let cfg = ExperimentConfig {
        p,
        s,
        m,
        theta_l: args.field.theta_l,
        gamma: args.field.gamma.clone(),
        comp: args.comp.clone(),
        k: args.k,
        trials: args.trials,
        seed: args.seed,
        method: args.method.into(),
        multipliers: args.multipliers.into(),
        semilinear: args.semilinear,
        j: args.j,
        budget: args.budget,
    };
    let outcome = run_experiment(&cfg).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&args.out).map_err(|e| e.to_string())?;
    let csv = records_to_csv(&outcome.records);
    let csv_path = args.out.join("trials.csv");
    std::fs::write(&csv_path, &csv).map_err(|e| format!("{}: {e}", csv_path.display()))?;
    write_json(&args.out.join("summary.json"), &outcome.summary)?;
    println!(
        "{}",
        serde_json::to_string(&outcome.summary).map_err(|e| e.to_string())?
    );
    Ok(EXIT_OK)
}

fn cmd_inspect(args: &InspectArgs) -> Result<u8, String> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    // recovery reports carry a params field too, so match them first
    if let Ok(report) = serde_json::from_str::<RecoveryFile>(&text) {
        println!(
            "{}",
            serde_json::json!({
                "kind": "recovery_report",
                "method": report.method,
                "verified": report.verified,
                "k": report.params.k,
                "timing_ms": report.timing_ms,
            })
        );
        return Ok(EXIT_OK);
    }
    if let Ok(secret) = serde_json::from_str::<SecretFile>(&text) {
        let field = secret.field.to_ctx().map_err(|e| e.to_string())?;
        let params = secret.params.to_params(&field).map_err(|e| e.to_string())?;
        let canonical = canonical_generator(&params).map_err(|e| e.to_string())?;
        println!(
            "{}",
            serde_json::json!({
                "kind": "secret_params",
                "field_order": field.order(),
                "q": field.q(),
                "comp": params.comp().parts(),
                "n": params.n(),
                "k": params.k,
                "theta_l": params.ore.theta_l(),
                "zero_derivation": params.ore.is_zero_derivation(),
                "canonical_rank": canonical.rank(),
            })
        );
        return Ok(EXIT_OK);
    }
    if let Ok(public) = serde_json::from_str::<PublicFile>(&text) {
        let (field, ore, comp, g) = public.decode().map_err(|e| e.to_string())?;
        println!(
            "{}",
            serde_json::json!({
                "kind": "public_generator",
                "field_order": field.order(),
                "q": field.q(),
                "comp": comp.parts(),
                "n": comp.n(),
                "k": public.k,
                "rank": g.rank(),
                "theta_l": ore.theta_l(),
                "zero_derivation": ore.is_zero_derivation(),
            })
        );
        return Ok(EXIT_OK);
    }
    if let Ok(disguise) = serde_json::from_str::<DisguiseFile>(&text) {
        println!(
            "{}",
            serde_json::json!({
                "kind": "disguise",
                "comp": disguise.comp,
                "pi": disguise.isometry.pi,
                "aut_t": disguise.isometry.aut_t,
            })
        );
        return Ok(EXIT_OK);
    }
    Err(format!(
        "{}: not a recognized artifact",
        args.file.display()
    ))
}

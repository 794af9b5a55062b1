//! Command-line front end.
//!
//! Exit codes: 0 success, 1 semantic failure (invalid measure, failed
//! construction or check), 2 input or parse failure.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::algebra::{Block, CanonicalProjection};
use crate::constructor::{build_vector_measure, DirectionRegistry, Sign, VectorMeasure};
use crate::error::Error;
use crate::io;
use crate::measure::ProjectionMeasure;
use crate::space::{BaseProjection, Space};
use crate::tolerance;
use crate::verify::{
    linear_fit_residual, matrix_oracle_suite, measure_law_suite, random_registry, rng_from_seed,
    split_spot_checks, truncation_suite, LawTolerances,
};

/// Number of random directions sampled by `validate` and by the linear-fit diagnostic.
const VALIDATE_DIRECTIONS: usize = 32;
const FIT_DIRECTIONS: usize = 64;

#[derive(Debug, Parser)]
#[command(
    name = "vecmeasure",
    version,
    about = "Orthogonal vector measures on M ⊗ M₂"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the measure axioms on a deterministic sample of projections.
    Validate {
        space: PathBuf,
        measure: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Construct μ and write it as an artifact.
    Build {
        space: PathBuf,
        measure: PathBuf,
        registry: PathBuf,
        #[command(flatten)]
        sign: SignArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a stored μ on a projection literal.
    Eval {
        artifact: PathBuf,
        projection: PathBuf,
        /// Measure file; when given, m(p) is printed and compared with ‖μ(p)‖².
        #[arg(long)]
        measure: Option<PathBuf>,
    },
    /// Construct μ and run every verification suite.
    Verify {
        space: PathBuf,
        measure: PathBuf,
        registry: PathBuf,
        #[command(flatten)]
        sign: SignArg,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Tighter tolerance for the norm law, in [1e-15, 1e-9].
        #[arg(long)]
        tolerance_norm: Option<f64>,
        #[arg(long, hide = true)]
        corrupt: bool,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct SignArg {
    /// Solution branch: +1 or -1.
    #[arg(long = "sign", default_value = "+1", value_parser = parse_sign, allow_hyphen_values = true)]
    pub sign: Sign,
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "+1" | "1" => Ok(Sign::Plus),
        "-1" => Ok(Sign::Minus),
        other => Err(format!("expected +1 or -1, got `{other}`")),
    }
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Semantic(String),
    Input(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

fn input(e: Error) -> Failure {
    Failure::Input(e.to_string())
}

fn semantic(e: Error) -> Failure {
    Failure::Semantic(e.to_string())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out) {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Semantic(msg) | Failure::Input(msg)) = &f;
            eprintln!("vecmeasure: {msg}");
            f.exit_code()
        }
    }
}

pub fn run(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Validate {
            space,
            measure,
            seed,
        } => {
            let space = io::load_space(&space).map_err(input)?;
            let m = io::load_measure(&space, &measure).map_err(input)?;
            validate(&m, seed, out)
        }
        Command::Build {
            space,
            measure,
            registry,
            sign,
            out: path,
        } => {
            let (m, registry) = load_inputs(&space, &measure, &registry)?;
            let mu = build_vector_measure(&m, &registry, sign.sign).map_err(semantic)?;
            io::write_artifact(&mu, &path).map_err(input)?;
            Ok(())
        }
        Command::Eval {
            artifact,
            projection,
            measure,
        } => {
            let mu = io::load_artifact(&artifact).map_err(input)?;
            let p = io::load_projection(mu.space(), &projection).map_err(input)?;
            let m = measure
                .map(|path| io::load_measure(mu.space(), &path))
                .transpose()
                .map_err(input)?;
            eval(&mu, &p, m.as_ref(), out)
        }
        Command::Verify {
            space,
            measure,
            registry,
            sign,
            seed,
            trials,
            tolerance_norm,
            corrupt,
        } => {
            let mut tol = LawTolerances::default();
            if let Some(t) = tolerance_norm {
                if !(tolerance::OVERRIDE_FLOOR..=tolerance::NORM_LAW).contains(&t) {
                    return Err(Failure::Input(format!(
                        "--tolerance-norm must lie in [{:e}, {:e}], got {t:e}",
                        tolerance::OVERRIDE_FLOOR,
                        tolerance::NORM_LAW
                    )));
                }
                tol.norm = t;
            }
            let (m, registry) = load_inputs(&space, &measure, &registry)?;
            let mut mu = build_vector_measure(&m, &registry, sign.sign).map_err(semantic)?;
            if corrupt {
                mu.perturb_base(0, 1e-3);
                mu.perturb_quadruple(1, 0, 1e-3);
            }
            verify(&m, &mu, seed, trials, tol, out)
        }
    }
}

fn load_inputs(
    space: &std::path::Path,
    measure: &std::path::Path,
    registry: &std::path::Path,
) -> Result<(ProjectionMeasure, DirectionRegistry), Failure> {
    let space = io::load_space(space).map_err(input)?;
    let m = io::load_measure(&space, measure).map_err(input)?;
    let registry = io::load_registry(&space, registry).map_err(input)?;
    Ok((m, registry))
}

fn single_atom(space: &Space, atom: usize, block: Block) -> CanonicalProjection {
    let mut blocks = vec![Block::Zero; space.len()];
    blocks[atom] = block;
    CanonicalProjection::from_blocks(space, &blocks).expect("valid block")
}

/// Diagonal blocks at every atom, then either the measure's own rank-one
/// entries (tables) or the subalgebras of seeded random directions.
pub fn validation_samples(m: &ProjectionMeasure, seed: u64) -> Vec<CanonicalProjection> {
    let space = m.space();
    let mut samples = Vec::new();
    for atom in 0..space.len() {
        for block in [Block::Upper, Block::Lower, Block::Identity] {
            samples.push(single_atom(space, atom, block));
        }
    }
    let tabulated: Vec<Option<Vec<Block>>> = (0..space.len())
        .map(|atom| m.tabulated_blocks(atom))
        .collect();
    if tabulated.iter().any(Option::is_some) {
        for (atom, blocks) in tabulated.iter().enumerate() {
            for block in blocks.iter().flatten() {
                samples.push(single_atom(space, atom, *block));
            }
        }
    } else {
        let registry = random_registry(space, VALIDATE_DIRECTIONS, &mut rng_from_seed(seed));
        let full = BaseProjection::full(space);
        let empty = BaseProjection::empty(space);
        for d in registry.directions() {
            samples.push(d.subalgebra_projection(&full, &empty).expect("same space"));
        }
    }
    samples
}

fn validate(m: &ProjectionMeasure, seed: u64, out: &mut dyn Write) -> Result<(), Failure> {
    let samples = validation_samples(m, seed);
    let report = m.validate(&samples);
    for v in &report.violations {
        let line = json!({
            "check": v.check,
            "atom": v.atom,
            "magnitude": v.magnitude,
            "detail": v.detail,
        });
        writeln!(out, "{line}").map_err(|e| input(e.into()))?;
    }
    let summary = json!({
        "valid": report.is_valid(),
        "checked": report.checked,
        "violations": report.violations.len(),
    });
    writeln!(out, "{summary}").map_err(|e| input(e.into()))?;
    if report.is_valid() {
        Ok(())
    } else {
        let atoms: Vec<&str> = report
            .violations
            .iter()
            .filter_map(|v| v.atom.as_deref())
            .collect();
        Err(Failure::Semantic(format!(
            "measure is invalid ({} violations; atoms: {})",
            report.violations.len(),
            if atoms.is_empty() {
                "-".to_string()
            } else {
                atoms.join(", ")
            }
        )))
    }
}

fn eval(
    mu: &VectorMeasure,
    p: &CanonicalProjection,
    m: Option<&ProjectionMeasure>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let value = mu.evaluate(p).map_err(semantic)?;
    let space = mu.space();
    let component = |values: &[f64]| -> Value {
        Value::Object(
            space
                .atoms()
                .iter()
                .zip(values)
                .map(|(a, v)| (a.id.clone(), json!(v)))
                .collect::<Map<String, Value>>(),
        )
    };
    let norm_sq = value.norm_sq();
    let measure = m.map(|m| m.eval(p)).transpose().map_err(semantic)?;
    let line = json!({
        "first": component(value.first()),
        "second": component(value.second()),
        "norm_sq": norm_sq,
        "measure": measure,
    });
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(&line).expect("serializable")
    )
    .map_err(|e| input(e.into()))?;
    if let (Some(expected), Some(m)) = (measure, m) {
        let scale = m.total().map_err(semantic)?;
        if (norm_sq - expected).abs() > tolerance::scaled(tolerance::NORM_LAW, scale) {
            return Err(Failure::Semantic(format!(
                "‖μ(p)‖² = {norm_sq} disagrees with m(p) = {expected}"
            )));
        }
    }
    Ok(())
}

fn verify(
    m: &ProjectionMeasure,
    mu: &VectorMeasure,
    seed: u64,
    trials: usize,
    tol: LawTolerances,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let mut report = matrix_oracle_suite(mu.space(), seed, trials);
    report.merge(measure_law_suite(m, mu, trials, seed, tol));
    report.merge(truncation_suite(m, mu, trials / 10, seed));
    report.merge(split_spot_checks(m, mu, seed));
    out.write_all(report.to_json_lines().as_bytes())
        .map_err(|e| input(e.into()))?;
    for note in report.notes() {
        eprintln!("note: {note}");
    }

    // Tables are only defined on their own entries, so fall back to the registry.
    let random = random_registry(mu.space(), FIT_DIRECTIONS, &mut rng_from_seed(seed));
    let registered = mu.registry();
    let fit = linear_fit_residual(m, random.directions())
        .map(|r| (r, FIT_DIRECTIONS))
        .or_else(|_| {
            linear_fit_residual(m, registered.directions()).map(|r| (r, registered.len()))
        });
    match fit {
        Ok((r, n)) => eprintln!("linear-fit relative residual over {n} directions: {r:.6}"),
        Err(_) => eprintln!("linear-fit relative residual: not available for this measure"),
    }

    let failed: Vec<&str> = report.failures().map(|r| r.check.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Semantic(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

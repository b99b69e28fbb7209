//! Batch front-end: parse a job, dispatch to the library, emit deterministic
//! JSON. Exit codes: 0 ok, 1 domain error (with a stable machine-readable
//! code in the report), 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use padic_prep::characters::{eval_ideal_at_char, Character, CharacterJson};
use padic_prep::coeff::ScalarJson;
use padic_prep::frobenius::{FrobeniusAction, FrobeniusJson, LevelLoss};
use padic_prep::linearize::{
    self, EvaluationMap, EvaluationMapJson, IdealJson, IdealPresentation,
};
use padic_prep::series::SeriesJson;
use padic_prep::homology::{ComplexJson, FreeComplex};
use padic_prep::weierstrass;
use padic_prep::{Context, Coords, Error, MultiSeries, PadicScalar};

mod selftest;

#[derive(Parser)]
#[command(
    name = "padic-prep",
    about = "Weierstrass preparation, equivariant ideal linearization, characters, and Koszul windows over truncated p-adic series rings",
    version
)]
struct Cli {
    /// Odd prime of the coefficient field.
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// Retained unit digits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Total-degree truncation of the series layer.
    #[arg(long, global = true)]
    degree: Option<u32>,
    /// Seed for all randomness; falls back to PADIC_PREP_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weierstrass division of g by a regular f.
    Divide {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Weierstrass preparation f = distinguished * unit.
    Prepare {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Stability of an ideal under the diagonal action.
    PhiCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write a unit as c * h / h^phi.
    Trivialize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Linearize an equivariant prime ideal onto a one-variable line.
    Linearize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        frobenius: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Sample characters along a recovered line.
    CharSubgroup {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        samples: u32,
        #[arg(long)]
        output: PathBuf,
    },
    /// Evaluate an ideal's generators at a character.
    CharEval {
        #[arg(long)]
        ideal: PathBuf,
        #[arg(long = "char")]
        character: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Emit the Koszul complex on n variables.
    Koszul {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Verify the support window of a perfect complex.
    Window {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the built-in invariant suite.
    Selftest,
}

#[derive(Serialize)]
struct Report {
    status: &'static str,
    error_code: Option<String>,
    message: Option<String>,
    payload: Option<String>,
    precision_loss: u32,
    elapsed_ms: u128,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(&cli) {
        Ok(outcome) => {
            let report = Report {
                status: "ok",
                error_code: None,
                message: None,
                payload: outcome.payload.map(|p| p.display().to_string()),
                precision_loss: outcome.precision_loss,
                elapsed_ms: started.elapsed().as_millis(),
            };
            println!("{}", serde_json::to_string(&report).unwrap());
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            let report = Report {
                status: "error",
                error_code: Some(e.code().to_string()),
                message: Some(e.to_string()),
                payload: None,
                precision_loss: 0,
                elapsed_ms: started.elapsed().as_millis(),
            };
            println!("{}", serde_json::to_string(&report).unwrap());
            ExitCode::from(1)
        }
    }
}

struct Outcome {
    payload: Option<PathBuf>,
    precision_loss: u32,
}

enum CliError {
    Usage(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

fn context_of(cli: &Cli) -> Result<Context, CliError> {
    let prime = cli
        .prime
        .ok_or_else(|| CliError::Usage("missing required flag --prime".into()))?;
    let precision = cli
        .precision
        .ok_or_else(|| CliError::Usage("missing required flag --precision".into()))?;
    let degree = cli
        .degree
        .ok_or_else(|| CliError::Usage("missing required flag --degree".into()))?;
    Ok(Context::new(prime, precision, degree)?)
}

fn seed_of(cli: &Cli) -> u64 {
    cli.seed
        .or_else(|| {
            std::env::var("PADIC_PREP_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(0)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Domain(Error::Parse(format!("{}: {e}", path.display()))))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Domain(Error::Parse(format!("{}: {e}", path.display()))))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Domain(Error::Parse(e.to_string())))?;
    text.push('\n');
    std::fs::write(path, text)
        .map_err(|e| CliError::Domain(Error::Parse(format!("{}: {e}", path.display()))))
}

#[derive(Deserialize)]
struct DivideJob {
    f: SeriesJson,
    g: SeriesJson,
}

#[derive(Serialize)]
struct DivideOut {
    regular_order: u32,
    quotient: SeriesJson,
    remainders: Vec<SeriesJson>,
}

#[derive(Deserialize)]
struct PrepareJob {
    f: SeriesJson,
}

#[derive(Serialize)]
struct PrepareOut {
    regular_order: u32,
    distinguished: SeriesJson,
    unit: SeriesJson,
}

#[derive(Serialize)]
struct PhiCheckOut {
    stable: bool,
}

#[derive(Deserialize)]
struct TrivializeJob {
    unit: SeriesJson,
}

#[derive(Serialize)]
struct TrivializeOut {
    constant: ScalarJson,
    cofactor: SeriesJson,
    loss: u32,
    levels: Vec<LevelLoss>,
}

#[derive(Serialize)]
struct SampleOut {
    x: ScalarJson,
    character: CharacterJson,
}

#[derive(Serialize)]
struct CharSubgroupOut {
    samples: Vec<SampleOut>,
}

#[derive(Serialize)]
struct CharEvalOut {
    values: Vec<ScalarJson>,
    in_vanishing_locus: bool,
}

#[derive(Serialize)]
struct ProfileEntry {
    degree: i64,
    dim: usize,
}

#[derive(Serialize)]
struct WindowOut {
    a: i64,
    b: i64,
    window_ok: bool,
    profile: Vec<ProfileEntry>,
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Divide { input, output } => {
            let ctx = context_of(cli)?;
            let job: DivideJob = read_json(input)?;
            let f = MultiSeries::from_json(ctx, &job.f)?;
            let g = MultiSeries::from_json(ctx, &job.g)?;
            let div = weierstrass::divide(&g, &f)?;
            let out = DivideOut {
                regular_order: div.regular_order,
                quotient: div.quotient.to_json(),
                remainders: div.remainders.iter().map(|r| r.to_json()).collect(),
            };
            write_json(output, &out)?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::Prepare { input, output } => {
            let ctx = context_of(cli)?;
            let job: PrepareJob = read_json(input)?;
            let f = MultiSeries::from_json(ctx, &job.f)?;
            let fact = weierstrass::prepare(&f)?;
            let out = PrepareOut {
                regular_order: fact.degree,
                distinguished: fact.distinguished.to_json(),
                unit: fact.unit.to_json(),
            };
            write_json(output, &out)?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::PhiCheck { input, frobenius, output } => {
            let ctx = context_of(cli)?;
            let ideal: IdealJson = read_json(input)?;
            let ideal = IdealPresentation::from_json(ctx, &ideal)?;
            let phi: FrobeniusJson = read_json(frobenius)?;
            let phi = FrobeniusAction::from_json(ctx, &phi)?;
            let stable = linearize::is_phi_stable(&ideal, &phi)?;
            write_json(output, &PhiCheckOut { stable })?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::Trivialize { input, frobenius, output } => {
            let ctx = context_of(cli)?;
            let job: TrivializeJob = read_json(input)?;
            let unit = MultiSeries::from_json(ctx, &job.unit)?;
            let phi: FrobeniusJson = read_json(frobenius)?;
            let phi = FrobeniusAction::from_json(ctx, &phi)?;
            let t = padic_prep::frobenius::trivialize_unit(&unit, &phi)?;
            let out = TrivializeOut {
                constant: t.constant.to_json(),
                cofactor: t.cofactor.to_json(),
                loss: t.loss,
                levels: t.levels.clone(),
            };
            write_json(output, &out)?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: t.loss })
        }
        Command::Linearize { input, frobenius, output } => {
            let ctx = context_of(cli)?;
            let ideal: IdealJson = read_json(input)?;
            let mut ideal = IdealPresentation::from_json(ctx, &ideal)?;
            if ideal.coords() == Coords::T {
                ideal = ideal.change_coords(Coords::X)?;
            }
            let phi: FrobeniusJson = read_json(frobenius)?;
            let phi = FrobeniusAction::from_json(ctx, &phi)?;
            let map = linearize::linearize_phi_ideal(&ideal, &phi)?;
            write_json(output, &map.to_json())?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::CharSubgroup { map, samples, output } => {
            let ctx = context_of(cli)?;
            let map_json: EvaluationMapJson = read_json(map)?;
            let map = EvaluationMap::from_json(ctx, &map_json)?;
            let xs = sample_parameters(ctx, *samples, seed_of(cli));
            let mut out = CharSubgroupOut { samples: Vec::with_capacity(xs.len()) };
            for x in &xs {
                let chi = linearize::character_on_line(&map, x)?;
                out.samples.push(SampleOut { x: x.to_json(), character: chi.to_json() });
            }
            write_json(output, &out)?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::CharEval { ideal, character, output } => {
            let ctx = context_of(cli)?;
            let ideal_json: IdealJson = read_json(ideal)?;
            let ideal = IdealPresentation::from_json(ctx, &ideal_json)?;
            let chi: CharacterJson = read_json(character)?;
            let chi = Character::from_json(ctx, &chi)?;
            let values = eval_ideal_at_char(&ideal, &chi)?;
            let out = CharEvalOut {
                in_vanishing_locus: values.iter().all(|v| v.is_negligible()),
                values: values.iter().map(|v| v.to_json()).collect(),
            };
            write_json(output, &out)?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::Koszul { n, output } => {
            let kos = FreeComplex::koszul(*n)?;
            write_json(output, &kos.to_json())?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::Window { input, output } => {
            let cx: ComplexJson = read_json(input)?;
            let cx = FreeComplex::from_json(&cx)?;
            let report = cx.check_window()?;
            let out = WindowOut {
                a: report.a,
                b: report.b,
                window_ok: report.window_ok,
                profile: report
                    .profile
                    .dims
                    .iter()
                    .map(|(&degree, &dim)| ProfileEntry { degree, dim })
                    .collect(),
            };
            write_json(output, &out)?;
            Ok(Outcome { payload: Some(output.clone()), precision_loss: 0 })
        }
        Command::Selftest => {
            selftest::run(seed_of(cli))?;
            Ok(Outcome { payload: None, precision_loss: 0 })
        }
    }
}

/// Deterministic sample parameters in `l * Z_l`, drawn from the seed.
fn sample_parameters(ctx: Context, count: u32, seed: u64) -> Vec<PadicScalar> {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let l = ctx.prime();
    (0..count)
        .map(|_| {
            let digits = (ctx.precision() - 1).min(6);
            let bound = l.saturating_pow(digits).max(2);
            let u = rng.gen_range(0..bound);
            PadicScalar::from_integer(ctx, (u as i64) * l as i64)
        })
        .collect()
}

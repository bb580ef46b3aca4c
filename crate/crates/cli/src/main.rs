//! Command-line front end: every library operation over the shared
//! JSON/CSV file formats, with deterministic seeding and JSON-only
//! structured output on stdout (diagnostics go to stderr).
//!
//! Exit codes: 0 success / Equivalent / property holds, 1 negative
//! result (NotEquivalent, inconsistent, property violated),
//! 2 Degenerate, 3 invalid input, 4 internal error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};

use stereoshape::action::{
    act, nonproper_witness, printed_example_report, scalar_stabilizer_check, FullTransform,
    RestrictedTransform, WITNESS_TOL,
};
use stereoshape::consistency::{pairwise_consistent, theorem_report};
use stereoshape::equivalence::{degeneracy_check, recover_transform, EquivalenceStatus};
use stereoshape::error::Error;
use stereoshape::io;
use stereoshape::linalg::{random_config, singular_values, ConfigClass, ConfigMatrix, Tolerances};
use stereoshape::projection::{iota, ImageMatrix};
use stereoshape::suites;

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_DEGENERATE: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Parser)]
#[command(
    name = "stereoshape",
    about = "Group actions on 4xn point configurations, perspective projection, \
             orbit equivalence, and finite-structure consistency checks",
    version
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Relative singular-value cutoff for numerical rank.
    #[arg(long, global = true, default_value_t = 1e-9)]
    rank_tol: f64,

    /// Relative residual bound for consistency decisions.
    #[arg(long, global = true, default_value_t = 1e-8)]
    residual_tol: f64,

    /// Absolute threshold below which an entry counts as zero.
    #[arg(long, global = true, default_value_t = 1e-12)]
    zero_tol: f64,

    /// Master seed for randomized commands (falls back to the
    /// STEREOSHAPE_SEED environment variable, then to 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Write the JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn tolerances(&self) -> Result<Tolerances, Error> {
        Tolerances::new(self.rank_tol, self.residual_tol, self.zero_tol)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| {
            std::env::var("STEREOSHAPE_SEED")
                .ok()
                .and_then(|v| v.parse().ok())
                .unwrap_or(0)
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Apply the perspective map to a configuration matrix.
    Project {
        /// Configuration matrix file (JSON, or CSV by extension).
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
    },
    /// Apply a transform (g, d) to a configuration matrix.
    Act {
        /// Configuration matrix file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Transform file {"g": [16 row-major], "d": [n]}.
        #[arg(long, value_name = "FILE")]
        transform: PathBuf,
        /// Require the transform to be restricted (affine bottom row).
        #[arg(long)]
        restricted: bool,
    },
    /// Decide orbit equivalence of two images, printing the full
    /// decision (recovered transform, residual, ranks).
    Recover {
        /// Two image files: first P, then Q.
        #[arg(long = "in", value_name = "FILE", num_args = 1, action = clap::ArgAction::Append)]
        inputs: Vec<PathBuf>,
    },
    /// Decide orbit equivalence, printing a compact status report.
    Equiv {
        #[arg(long = "in", value_name = "FILE", num_args = 1, action = clap::ArgAction::Append)]
        inputs: Vec<PathBuf>,
    },
    /// Report the ranks governing uniqueness of the recovery.
    Degen {
        #[arg(long = "in", value_name = "FILE", num_args = 1, action = clap::ArgAction::Append)]
        inputs: Vec<PathBuf>,
    },
    /// Show that the full action has non-trivial stabilizers: the
    /// scalar pair fixes a random configuration.
    DemoNonfree {
        /// Scalar to test (random pairs when omitted).
        #[arg(long)]
        lambda: Option<f64>,
        /// Number of random (lambda, configuration) pairs.
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Point count of sampled configurations.
        #[arg(long, default_value_t = 6)]
        cols: usize,
    },
    /// Build the non-properness witness family g_t = diag(t,1,1,1)
    /// with p = e2.
    DemoNonproper {
        /// Scales for the family.
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 100.0, 1000.0])]
        scales: Vec<f64>,
    },
    /// Evaluate the printed diagonal-stabilizer example.
    DemoPaperExample {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Check a finite structure: theorem report, or pairwise
    /// consistency of supplied representations.
    Consistency {
        /// Structure file.
        #[arg(long = "in", value_name = "FILE")]
        input: PathBuf,
        /// Representation files ({"mapping": {...}}); two or more turn
        /// the command into a pairwise-consistency check.
        #[arg(long = "rep", value_name = "FILE", action = clap::ArgAction::Append)]
        reps: Vec<PathBuf>,
        /// Optional target structure for the representations
        /// (defaults to the source structure).
        #[arg(long, value_name = "FILE")]
        target: Option<PathBuf>,
    },
    /// Run the full verification battery and print a summary.
    Suite {
        /// Trial count for the randomized batteries.
        #[arg(long, default_value_t = 1000)]
        trials: u32,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            if kind == ErrorKind::DisplayHelp || kind == ErrorKind::DisplayVersion {
                print!("{e}");
                return ExitCode::from(EXIT_OK);
            }
            eprintln!("{e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Numerical(_) => EXIT_INTERNAL,
                _ => EXIT_INVALID,
            };
            ExitCode::from(code)
        }
    }
}

fn emit(common: &CommonArgs, json: String) -> Result<(), Error> {
    match &common.out {
        Some(path) => fs::write(path, json + "\n")
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn read_text(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn load_matrix(path: &PathBuf) -> Result<DMatrix<f64>, Error> {
    let text = read_text(path)?;
    io::matrix_from_named_text(&path.to_string_lossy(), &text)
}

fn load_config(path: &PathBuf) -> Result<ConfigMatrix, Error> {
    ConfigMatrix::new(load_matrix(path)?)
}

fn load_image(path: &PathBuf) -> Result<ImageMatrix, Error> {
    ImageMatrix::new(load_matrix(path)?)
}

fn load_image_pair(inputs: &[PathBuf]) -> Result<(ImageMatrix, ImageMatrix), Error> {
    if inputs.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "expected exactly two --in files, got {}",
            inputs.len()
        )));
    }
    Ok((load_image(&inputs[0])?, load_image(&inputs[1])?))
}

fn status_exit(status: EquivalenceStatus) -> u8 {
    match status {
        EquivalenceStatus::Equivalent => EXIT_OK,
        EquivalenceStatus::NotEquivalent => EXIT_NEGATIVE,
        EquivalenceStatus::Degenerate => EXIT_DEGENERATE,
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    let tol = cli.common.tolerances()?;
    match &cli.command {
        Command::Project { input } => {
            let x = load_config(input)?;
            let image = iota(&x, &tol)?;
            emit(&cli.common, io::matrix_to_json(image.matrix()))?;
            Ok(EXIT_OK)
        }
        Command::Act {
            input,
            transform,
            restricted,
        } => {
            let a = load_config(input)?;
            let (g, d) = io::transform_from_json(&read_text(transform)?)?;
            let moved = if *restricted {
                let t = RestrictedTransform::new(g, d, &tol)?;
                act(t.as_full(), &a)?
            } else {
                let t = FullTransform::new(g, d, &tol)?;
                act(&t, &a)?
            };
            emit(&cli.common, io::matrix_to_json(moved.matrix()))?;
            Ok(EXIT_OK)
        }
        Command::Recover { inputs } => {
            let (p, q) = load_image_pair(inputs)?;
            let decision = recover_transform(&p, &q, &tol)?;
            emit(
                &cli.common,
                serde_json::to_string(&decision).expect("decision serializes"),
            )?;
            Ok(status_exit(decision.status))
        }
        Command::Equiv { inputs } => {
            let (p, q) = load_image_pair(inputs)?;
            let decision = recover_transform(&p, &q, &tol)?;
            let compact = serde_json::json!({
                "status": decision.status,
                "residual": decision.residual,
            });
            emit(&cli.common, compact.to_string())?;
            Ok(status_exit(decision.status))
        }
        Command::Degen { inputs } => {
            let (p, q) = load_image_pair(inputs)?;
            let report = degeneracy_check(&p, &q, &tol)?;
            let ok = report.rank4_ok;
            emit(
                &cli.common,
                serde_json::to_string(&report).expect("report serializes"),
            )?;
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::DemoNonfree {
            lambda,
            trials,
            cols,
        } => {
            let seed = cli.common.seed();
            match lambda {
                Some(lambda) => {
                    let a = random_config(*cols, seed, ConfigClass::M, &tol)?;
                    let fixed = scalar_stabilizer_check(*lambda, &a, &tol)?;
                    let json = serde_json::json!({
                        "lambda": lambda,
                        "fixed": fixed,
                        "seed": seed,
                        "cols": cols,
                    });
                    emit(&cli.common, json.to_string())?;
                    Ok(if fixed { EXIT_OK } else { EXIT_NEGATIVE })
                }
                None => {
                    let result = suites::scalar_stabilizer_battery(*trials, seed, &tol)?;
                    let passed = result.passed;
                    emit(
                        &cli.common,
                        serde_json::to_string(&result).expect("result serializes"),
                    )?;
                    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
                }
            }
        }
        Command::DemoNonproper { scales } => {
            let p = DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]);
            let mut entries = Vec::new();
            let mut all_ok = true;
            for &scale in scales {
                let g = DMatrix::from_diagonal(&DVector::from_vec(vec![scale, 1.0, 1.0, 1.0]));
                let w = nonproper_witness(&g, &p, &tol)?;
                let block = w.result.view((0, 0), (4, 4));
                let gram_defect =
                    (block.transpose() * block - DMatrix::<f64>::identity(4, 4)).amax();
                let p_defect = (w.result.column(4) - &p).norm();
                let operator_norm = singular_values(&g)?[0];
                all_ok &= gram_defect < WITNESS_TOL && p_defect < WITNESS_TOL;
                entries.push(serde_json::json!({
                    "scale": scale,
                    "orthonormality_defect": gram_defect,
                    "p_defect": p_defect,
                    "operator_norm": operator_norm,
                    "d_prime": w.d_prime.iter().copied().collect::<Vec<f64>>(),
                }));
            }
            emit(
                &cli.common,
                serde_json::json!({"family": entries, "in_witness_set": all_ok}).to_string(),
            )?;
            Ok(if all_ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::DemoPaperExample {
            alpha,
            beta,
            gamma,
            delta,
        } => {
            let report = printed_example_report(*alpha, *beta, *gamma, *delta, &tol)?;
            let holds = report.holds;
            emit(
                &cli.common,
                serde_json::to_string(&report).expect("report serializes"),
            )?;
            Ok(if holds { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Consistency { input, reps, target } => {
            let source = io::structure_from_json(&read_text(input)?)?;
            if reps.is_empty() {
                let report = theorem_report(&source)?;
                let ok = report.theorem_respected;
                emit(
                    &cli.common,
                    serde_json::to_string(&report).expect("report serializes"),
                )?;
                return Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE });
            }
            let target = match target {
                Some(path) => io::structure_from_json(&read_text(path)?)?,
                None => source.clone(),
            };
            let maps: Result<Vec<_>, Error> = reps
                .iter()
                .map(|path| io::representation_from_json(&read_text(path)?, &source, &target))
                .collect();
            let report = pairwise_consistent(&maps?)?;
            let ok = report.consistent;
            emit(
                &cli.common,
                serde_json::to_string(&report).expect("report serializes"),
            )?;
            Ok(if ok { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Suite { trials } => {
            let seed = cli.common.seed();
            let results = suites::acceptance_battery(seed, *trials, &tol)?;
            let all_passed = results.iter().all(|r| r.passed);
            for r in &results {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                eprintln!("[{tag}] {:<34} {}", r.name, r.detail);
            }
            let json = serde_json::json!({
                "seed": seed,
                "trials": trials,
                "criteria": results,
                "all_passed": all_passed,
            });
            emit(&cli.common, json.to_string())?;
            Ok(if all_passed { EXIT_OK } else { EXIT_NEGATIVE })
        }
    }
}

//! The `solenoid` command line.
//!
//! Every subcommand prints a short human summary to stdout and, with
//! `--json-out PATH`, writes a JSON document. Exit codes: 0 success,
//! 2 invalid input, 3 a verification or estimator-quality failure, 1 I/O.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::classify::{self, ClassifierConfig, MapSpec, BUILTINS};
use crate::conjugacy::{verify_conjugacy, PerturbedToralMap, SinePerturbation, SmaleConjugacy, SmaleSystem, ToralConjugacy};
use crate::cover::verify_cover_identities;
use crate::error::{Error, Result};
use crate::linalg::{toral_entropy, IntMatrix};
use crate::mme::{
    entropy_sft, unstable_length_scaling_check, weights_csv, LinearModelPath, TransitionMatrix, UnstableNormalization,
};
use crate::rational::TorusPoint;
use crate::shadowing::{shadow_many, uniqueness_epsilon, LinearToralSystem, ProductHyperbolicSystem};
use crate::solenoid::{random_vector, verify_solenoid_laws, Solenoid};

const CAT: &str = "[[2,1],[1,1]]";

#[derive(Debug, Parser)]
#[command(name = "solenoid", version, about = "Toral solenoids, shadowing, conjugacies and attractor classification")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the full result as JSON to this path.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    /// Classifier configuration (JSON); omitted fields keep their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact solenoid laws and cover identities on random rational points.
    VerifyIdentities {
        /// Integer matrix as JSON; repeatable. Defaults to [[2]] and the cat map.
        #[arg(long = "matrix")]
        matrices: Vec<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Shadow random pseudo-orbits of a hyperbolic toral automorphism.
    Shadow {
        #[arg(long, default_value = CAT)]
        matrix: String,
        /// Per-step jump size L.
        #[arg(long, default_value_t = 0.01)]
        size: f64,
        /// Window half-width J.
        #[arg(long, default_value_t = 50)]
        half_width: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Check a conjugacy `h ∘ σ = f ∘ h` on random samples.
    Conjugacy(ConjugacyArgs),
    /// Topological entropy.
    Entropy(EntropyArgs),
    /// Unstable cylinder weights of a subshift of finite type as CSV.
    Weights {
        /// 0/1 transition matrix as JSON. Defaults to the golden mean shift.
        #[arg(long, default_value = "[[1,1],[1,0]]")]
        sft: String,
        #[arg(long, default_value_t = 4)]
        max_len: usize,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Signed unstable length of a piecewise-linear path and its image.
    Length {
        #[arg(long, default_value = CAT)]
        matrix: String,
        /// Path vertices in ℝᵏ as JSON.
        #[arg(long, default_value = "[[0,0],[1,0],[1,1]]")]
        vertices: String,
        #[arg(long, value_enum, default_value_t = Normalization::UnitLength)]
        normalization: Normalization,
    },
    /// Attractor class from (dim Λ, dim E^u).
    Classify { dim_lambda: usize, dim_eu: usize },
    /// Full classification pipeline on built-in or JSON-described systems.
    Report {
        /// Built-in name; repeatable. Defaults to every builtin.
        #[arg(long = "builtin")]
        builtins: Vec<String>,
        /// JSON file holding one map spec or an array of them.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Export the orbit cloud of the first spec as CSV.
        #[arg(long)]
        cloud_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConjugacyKind {
    Smale,
    Toral,
}

#[derive(Debug, Args)]
pub struct ConjugacyArgs {
    #[arg(value_enum)]
    pub kind: ConjugacyKind,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Smale: depth of the limit.
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
    /// Toral: perturbation size ε.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    /// Toral: window half-width J.
    #[arg(long, default_value_t = 60)]
    pub half_width: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct EntropyArgs {
    /// Hyperbolic toral automorphism as JSON.
    #[arg(long)]
    pub matrix: Option<String>,
    /// 0/1 transition matrix as JSON.
    #[arg(long)]
    pub sft: Option<String>,
    /// Built-in system; entropy as the sum of positive Lyapunov exponents.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Normalization {
    UnitLength,
    FirstComponent,
}

/// Result of a subcommand: the JSON document and whether every check passed.
pub struct Outcome {
    pub json: Value,
    pub passed: bool,
}

fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn parse_matrix(text: &str) -> Result<IntMatrix> {
    parse_json("matrix", text)
}

fn parse_sft(text: &str) -> Result<TransitionMatrix> {
    TransitionMatrix::from_rows(&parse_json::<Vec<Vec<u8>>>("transition matrix", text)?)
}

fn load_config(path: Option<&Path>) -> Result<ClassifierConfig> {
    let config = match path {
        Some(p) => parse_json("config", &fs::read_to_string(p)?)?,
        None => ClassifierConfig::default(),
    };
    config.validate()?;
    Ok(config)
}

fn load_specs(builtins: &[String], spec: Option<&Path>) -> Result<Vec<MapSpec>> {
    let mut specs = Vec::new();
    if let Some(p) = spec {
        let value: Value = parse_json("spec", &fs::read_to_string(p)?)?;
        let list = match value {
            Value::Array(items) => items,
            one => vec![one],
        };
        for item in list {
            let s: MapSpec = serde_json::from_value(item).map_err(|e| Error::Parse(format!("spec: {e}")))?;
            s.validate()?;
            specs.push(s);
        }
    }
    for name in builtins {
        specs.push(MapSpec::builtin(name)?);
    }
    if specs.is_empty() {
        for name in BUILTINS {
            specs.push(MapSpec::builtin(name)?);
        }
    }
    Ok(specs)
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::VerifyIdentities { matrices, samples } => {
            let matrices = if matrices.is_empty() {
                vec![IntMatrix::new(vec![vec![2]])?, parse_matrix(CAT)?]
            } else {
                matrices.iter().map(|m| parse_matrix(m)).collect::<Result<_>>()?
            };
            let mut passed = true;
            let mut out = Vec::new();
            for a in &matrices {
                let laws = verify_solenoid_laws(a, *samples, cli.seed)?;
                let cover = verify_cover_identities(a, *samples, cli.seed)?;
                for c in laws.checks.iter().chain(&cover.checks) {
                    println!("{:<5} A = {a}  {} ({} failures / {})", c.status, c.identity, c.failures, c.samples);
                }
                passed &= laws.all_passed() && cover.all_passed();
                out.push(json!({ "matrix": a, "solenoid_laws": laws.checks, "cover_identities": cover.checks }));
            }
            Ok(Outcome {
                json: json!({ "seed": cli.seed, "samples": samples, "results": out, "passed": passed }),
                passed,
            })
        }
        Command::Shadow {
            matrix,
            size,
            half_width,
            count,
            tol,
        } => {
            let system = LinearToralSystem::new(&parse_matrix(matrix)?)?;
            let k = system.splitting().dim();
            let orbits = (0..*count)
                .map(|_| {
                    let start: Vec<f64> = (0..k).map(|_| rand::Rng::random(&mut rng)).collect();
                    system.random_pseudo_orbit(&start, *half_width, *size, &mut rng)
                })
                .collect::<Result<Vec<_>>>()?;
            let results = shadow_many(&system, &orbits, *tol)?;
            let rates = system.rates();
            let bound = rates.shadow_bound(*size);
            let max_residual = results.iter().map(|r| r.achieved_sup).fold(0.0, f64::max);
            let passed = max_residual <= bound + 1e-6;
            let eps = uniqueness_epsilon(1.0, rates.c, 1.0, rates.lambda, rates.mu, *half_width as u32)?;
            println!(
                "{count} pseudo-orbits, L = {size}, J = {half_width}: max residual {max_residual:.6e}, bound {bound:.6e} -> {}",
                if passed { "ok" } else { "exceeded" }
            );
            Ok(Outcome {
                json: json!({
                    "rates": rates,
                    "size": size,
                    "half_width": half_width,
                    "bound": bound,
                    "max_residual": max_residual,
                    "uniqueness_epsilon": eps,
                    "converged": results.iter().all(|r| r.converged),
                    "shadows": results.iter().map(|r| &r.point).collect::<Vec<_>>(),
                    "passed": passed,
                }),
                passed,
            })
        }
        Command::Conjugacy(args) => {
            let report = match args.kind {
                ConjugacyKind::Smale => {
                    let space = Solenoid::new(IntMatrix::new(vec![vec![2]])?)?;
                    let samples: Vec<_> = (0..args.samples).map(|_| space.random_point(&mut rng, 64)).collect();
                    let h = SmaleConjugacy {
                        system: SmaleSystem::default(),
                        depth: args.depth,
                    };
                    verify_conjugacy(&h, &samples, args.tol)?
                }
                ConjugacyKind::Toral => {
                    let map = PerturbedToralMap::new(parse_matrix(CAT)?, SinePerturbation::planar(args.eps))?;
                    let samples: Vec<_> = (0..args.samples)
                        .map(|_| TorusPoint::new(random_vector(&mut rng, 2, 64)))
                        .collect();
                    let h = ToralConjugacy {
                        map,
                        half_width: args.half_width,
                        tol: 1e-13,
                    };
                    verify_conjugacy(&h, &samples, args.tol)?
                }
            };
            println!(
                "{}: max residual {:.3e} over {} samples (tol {:.1e}) -> {}",
                report.name,
                report.max_residual,
                report.samples,
                report.tolerance,
                if report.passed { "ok" } else { "exceeded" }
            );
            Ok(Outcome {
                passed: report.passed,
                json: serde_json::to_value(&report)?,
            })
        }
        Command::Entropy(args) => {
            let json = if let Some(m) = &args.matrix {
                let h = toral_entropy(&parse_matrix(m)?)?;
                println!("toral entropy {h:.12}");
                json!({ "kind": "toral", "entropy": h })
            } else if let Some(s) = &args.sft {
                let perron = entropy_sft(&parse_sft(s)?)?;
                println!("SFT entropy {:.12}", perron.h);
                json!({ "kind": "sft", "entropy": perron.h, "perron": perron })
            } else {
                let name = args.builtin.as_deref().expect("clap requires one source");
                let config = load_config(cli.config.as_deref())?;
                let spec = MapSpec::builtin(name)?;
                let lyap = classify::lyapunov_spectrum(
                    &spec,
                    config.lyapunov_transient,
                    config.lyapunov_steps,
                    cli.seed,
                    config.max_restarts,
                )?;
                let h = lyap.positive_sum();
                println!("{name}: sum of positive Lyapunov exponents {h:.6}");
                json!({ "kind": "lyapunov", "entropy": h, "lyapunov": lyap })
            };
            Ok(Outcome { json, passed: true })
        }
        Command::Weights { sft, max_len, out } => {
            let perron = entropy_sft(&parse_sft(sft)?)?;
            let csv = weights_csv(&perron, *max_len)?;
            match out {
                Some(p) => fs::write(p, &csv)?,
                None => print!("{csv}"),
            }
            Ok(Outcome {
                json: json!({ "perron": perron, "max_len": max_len }),
                passed: true,
            })
        }
        Command::Length {
            matrix,
            vertices,
            normalization,
        } => {
            let normalization = match normalization {
                Normalization::UnitLength => UnstableNormalization::UnitLength,
                Normalization::FirstComponent => UnstableNormalization::FirstComponent,
            };
            let path = LinearModelPath::new(&parse_matrix(matrix)?, parse_json("vertices", vertices)?)?
                .with_normalization(normalization);
            let check = unstable_length_scaling_check(&path);
            println!(
                "l^u = {:.12}, l^u(A path) = {:.12}, ratio {}",
                check.original,
                check.image,
                check.ratio.map_or("undefined".into(), |r| format!("{r:.12}"))
            );
            Ok(Outcome {
                json: json!({ "normalization": normalization, "scaling": check }),
                passed: true,
            })
        }
        Command::Classify { dim_lambda, dim_eu } => {
            let class = classify::classify(*dim_lambda, *dim_eu)?;
            println!("{class}: {}", class.description());
            Ok(Outcome {
                json: json!({ "dim_lambda": dim_lambda, "dim_eu": dim_eu, "class_label": class }),
                passed: true,
            })
        }
        Command::Report {
            builtins,
            spec,
            cloud_csv,
        } => {
            let config = load_config(cli.config.as_deref())?;
            let specs = load_specs(builtins, spec.as_deref())?;
            if let Some(p) = cloud_csv {
                let cloud = classify::generate_orbit(&specs[0], config.transient, config.count, cli.seed)?;
                cloud.write_csv(std::io::BufWriter::new(fs::File::create(p)?))?;
            }
            let reports = classify::report_many(&specs, &config, cli.seed)
                .into_iter()
                .collect::<Result<Vec<_>>>()?;
            for r in &reports {
                println!(
                    "{:<24} box {:.3} (r^2 {:.4})  exponents {:?}  dim {} / E^u {}  -> {}{}",
                    r.spec_name,
                    r.box_dimension.estimate,
                    r.box_dimension.r_squared,
                    r.lyapunov.exponents.iter().map(|e| (e * 1e4).round() / 1e4).collect::<Vec<_>>(),
                    r.dim_lambda,
                    r.dim_eu,
                    r.class_label,
                    if r.quality.passed {
                        String::new()
                    } else {
                        format!("  [quality: {}]", r.quality.issues.join("; "))
                    }
                );
            }
            let passed = reports.iter().all(|r| r.quality.passed);
            let json = if reports.len() == 1 {
                serde_json::to_value(&reports[0])?
            } else {
                serde_json::to_value(&reports)?
            };
            Ok(Outcome { json, passed })
        }
    }
}

/// Exit code for an error: 2 for bad input, 3 for estimator failures, 1 for I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Stage { source, .. } => exit_code(source),
        Error::Divergence { .. } | Error::FrameDegenerate { .. } => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Parses `args`, runs the command, writes `--json-out`, and returns the exit code.
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
    let outcome = run(&cli).and_then(|o| {
        if let Some(p) = &cli.json_out {
            fs::write(p, serde_json::to_string_pretty(&o.json)? + "\n")?;
        }
        Ok(o)
    });
    match outcome {
        Ok(o) if o.passed => 0,
        Ok(_) => 3,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        main_with_args(std::iter::once("solenoid").chain(args.iter().copied()))
    }

    #[test]
    fn classify_exit_codes() {
        assert_eq!(code(&["classify", "1", "1"]), 0);
        assert_eq!(code(&["classify", "1", "0"]), 2);
    }

    #[test]
    fn invalid_input_is_two() {
        assert_eq!(code(&["entropy", "--matrix", "[[1,1],[0,1]]"]), 2);
        assert_eq!(code(&["entropy", "--matrix", "not json"]), 2);
        assert_eq!(code(&["report", "--builtin", "plykin"]), 2);
        assert_eq!(code(&["nonsense"]), 2);
    }

    #[test]
    fn json_out_written() {
        let dir = std::env::temp_dir().join(format!("solenoid-cli-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("entropy.json");
        assert_eq!(code(&["entropy", "--sft", "[[1,1],[1,0]]", "--json-out", path.to_str().unwrap()]), 0);
        let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert!((v["entropy"].as_f64().unwrap() - 0.481_211_825_059_603_4).abs() < 1e-12);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn small_shadow_run_succeeds() {
        assert_eq!(code(&["shadow", "--count", "3", "--half-width", "10"]), 0);
    }

    #[test]
    fn shallow_smale_conjugacy_is_three() {
        assert_eq!(code(&["conjugacy", "smale", "--depth", "1", "--samples", "10"]), 3);
        assert_eq!(code(&["conjugacy", "smale", "--depth", "40", "--samples", "10"]), 0);
    }
}

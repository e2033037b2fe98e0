//! Command-line front end.
//!
//! Exit codes: 0 success (or all suites pass), 1 a suite failed, 2 invalid
//! input file or arguments, 3 unknown measure, suite or catalog name,
//! 4 dimension or label mismatch.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use monogamy_core::entropy;
use monogamy_core::io;
use monogamy_core::keyrates::{self, optimize_csecret1, optimize_ed1};
use monogamy_core::monogamy::{self, SuiteOptions, VerificationReport, SUITES};
use monogamy_core::povm::{self, Povm};
use monogamy_core::qstate::{catalog_by_name, CatalogEntry, QState};
use monogamy_core::squashed::optimize_squashed_ub;
use monogamy_core::variational::{self, BoundDirection, Budget, OptimizationResult};
use monogamy_core::Error;

const MEASURES: [&str; 11] = [
    "entropy",
    "mi",
    "cmi",
    "coherent",
    "eof",
    "wootters",
    "holevo",
    "csecret",
    "ed1",
    "squashed",
    "duality",
];

#[derive(Parser, Debug)]
#[command(name = "monogamy", version, about = "Correlation measures and monogamy checks for small quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args, Debug)]
struct Output {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(clap::Args, Debug)]
struct Search {
    /// Objective evaluations per optimizer run.
    #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Seeds; the first one drives optimizers, all of them drive suites.
    #[arg(long = "seed")]
    seeds: Vec<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one measure on a state file.
    Compute {
        /// One of: entropy, mi, cmi, coherent, eof, wootters, holevo, csecret, ed1, squashed, duality.
        measure: String,
        #[arg(long)]
        state: PathBuf,
        /// Fixed POVM for holevo or csecret instead of a search.
        #[arg(long)]
        povm: Option<PathBuf>,
        /// Comma-separated subsystem labels. For entropy, the marginal to
        /// evaluate; otherwise the measure runs on that marginal with the
        /// subsystems in the given order.
        #[arg(long, value_delimiter = ',')]
        part: Vec<String>,
        /// Maximum extension dimension for squashed.
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long = "gap-tol", default_value_t = 1e-3)]
        gap_tol: f64,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Run verification suites.
    Verify {
        /// Suite names (repeatable): thm1, cor1, cor2, main5, ssa, chain, squashed_chain, prop1, antisym.
        #[arg(long = "suite", required = true)]
        suites: Vec<String>,
        /// Check a single state instead of random inputs (thm1, cor1, cor2, main5).
        #[arg(long)]
        state: Option<PathBuf>,
        /// Number of random inputs when no --seed is given (seeds 0..trials).
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long = "gap-tol", default_value_t = 1e-3)]
        gap_tol: f64,
        #[command(flatten)]
        search: Search,
        #[command(flatten)]
        output: Output,
    },
    /// Export a catalog state as a state file.
    Catalog {
        /// One of: singlet, bell_phi, ghz, w, antisym_qutrit, max_classical_corr, werner, ginibre.
        name: String,
        /// Werner parameter.
        #[arg(long)]
        p: Option<f64>,
        /// Ginibre subsystem dimensions.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Ginibre rank.
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::UnknownMeasure(_) | Error::UnknownSuite(_) | Error::UnknownCatalog(_) => 3,
        Error::DimensionMismatch(_) | Error::UnknownLabel(_) | Error::OverlappingSelectors(_) => 4,
        _ => 2,
    }
}

fn emit(output: &Output, report: &Value, summary: &str) -> Result<(), Error> {
    let body = match output.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
        Format::Text => summary.to_string(),
    };
    match &output.out {
        Some(path) => {
            std::fs::write(path, body)?;
            print!("{summary}");
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn budget_of(search: &Search) -> Budget {
    Budget::new(search.budget as usize).with_seed(search.seeds.first().copied().unwrap_or(0))
}

fn refs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn labels_n(state: &QState, n: usize, measure: &str) -> Result<Vec<String>, Error> {
    if state.labels().len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{measure} needs {n} subsystems, state has {:?}",
            state.labels()
        )));
    }
    Ok(state.labels().to_vec())
}

fn optimized<T>(r: &OptimizationResult<T>, argument: Value) -> Value {
    json!({
        "value": r.value,
        "direction": r.direction,
        "evaluations": r.evaluations,
        "restarts_used": r.restarts_used,
        "converged": r.converged,
        "gap_estimate": r.gap_estimate,
        "argument": argument,
    })
}

fn exact(value: f64) -> Value {
    json!({ "value": value, "direction": BoundDirection::Exact, "converged": true })
}

fn read_povm_opt(path: &Option<PathBuf>) -> Result<Option<Povm>, Error> {
    path.as_deref().map(io::read_povm).transpose()
}

#[allow(clippy::too_many_arguments)]
fn compute(
    measure: &str,
    state_path: &Path,
    povm_path: &Option<PathBuf>,
    part: &[String],
    cap: Option<usize>,
    gap_tol: f64,
    search: &Search,
) -> Result<Value, Error> {
    if !MEASURES.contains(&measure) {
        return Err(Error::UnknownMeasure(measure.to_string()));
    }
    let mut state = io::read_state(state_path)?.to_density();
    if measure != "entropy" && !part.is_empty() {
        let sel = refs(part);
        state = state.partial_trace(&sel)?.reorder(&sel)?;
    }
    let budget = budget_of(search);
    let l = state.labels().to_vec();
    let mut report = match measure {
        "entropy" => {
            let sel = if part.is_empty() { l.clone() } else { part.to_vec() };
            let mut r = exact(entropy::marginal_entropy(&state, &refs(&sel))?);
            r["part"] = json!(sel);
            r
        }
        "mi" => exact(entropy::mutual_information(&state, &[&l[0]], &refs(&l[1..]))?),
        "cmi" => {
            if l.len() < 3 {
                return Err(Error::DimensionMismatch("cmi needs at least three subsystems".into()));
            }
            exact(entropy::conditional_mutual_information(&state, &[&l[0]], &[&l[1]], &refs(&l[2..]))?)
        }
        "coherent" => {
            let l = labels_n(&state, 2, measure)?;
            exact(entropy::coherent_information(&state, &[&l[0]], &[&l[1]])?)
        }
        "eof" => {
            labels_n(&state, 2, measure)?;
            let r = variational::optimize_eof(&state, &budget)?;
            optimized(&r, io::ensemble_to_json(&r.argument))
        }
        "wootters" => {
            let mut r = exact(variational::wootters_eof(&state)?);
            r["concurrence"] = json!(variational::concurrence(&state)?);
            r
        }
        "holevo" => {
            let l = labels_n(&state, 2, measure)?;
            match read_povm_opt(povm_path)? {
                Some(p) => {
                    let mut r = json!({
                        "value": povm::holevo_quantity(&state, &p)?,
                        "direction": BoundDirection::Lower,
                        "converged": true,
                    });
                    r["argument"] = io::povm_to_json(&p);
                    r
                }
                None => {
                    let r = variational::optimize_holevo_on(&state, &l[1], &budget, &[])?;
                    optimized(&r, io::povm_to_json(&r.argument))
                }
            }
        }
        "csecret" => {
            let l = labels_n(&state, 3, measure)?;
            match read_povm_opt(povm_path)? {
                Some(p) => {
                    let others: Vec<&String> = l.iter().filter(|x| x.as_str() != p.target()).collect();
                    if others.len() != 2 {
                        return Err(Error::UnknownLabel(p.target().to_string()));
                    }
                    let v = keyrates::csecret1_value(&state, &p, &[others[0]], &[others[1]])?;
                    json!({
                        "value": v,
                        "direction": BoundDirection::Lower,
                        "converged": true,
                        "argument": io::povm_to_json(&p),
                    })
                }
                None => {
                    let r = optimize_csecret1(&state, &l[1], &[&l[0]], &[&l[2]], &budget)?;
                    optimized(&r, io::povm_to_json(&r.argument))
                }
            }
        }
        "ed1" => {
            let l = labels_n(&state, 2, measure)?;
            let r = optimize_ed1(&state, &l[1], &budget)?;
            optimized(&r, io::instrument_to_json(&r.argument))
        }
        "squashed" => {
            labels_n(&state, 2, measure)?;
            let r = optimize_squashed_ub(&state, cap, &budget, &[])?;
            optimized(&r, io::extension_to_json(&r.argument))
        }
        "duality" => {
            labels_n(&state, 2, measure)?;
            let d = variational::duality_drive(&state, &budget, gap_tol)?;
            json!({
                "value": d.duality_gap,
                "direction": BoundDirection::Exact,
                "f_best": d.f_best,
                "g_best": d.g_best,
                "s_a": d.s_a,
                "independent_gap": d.independent_gap,
                "rounds": d.rounds,
                "evaluations": d.evaluations,
                "converged": d.converged,
                "ensemble": io::ensemble_to_json(&d.ensemble),
                "povm": io::povm_to_json(&d.povm),
            })
        }
        _ => unreachable!("measure list checked above"),
    };
    report["measure"] = json!(measure);
    if !part.is_empty() {
        report["part"] = json!(part);
    }
    report["state"] = json!(state_path.display().to_string());
    report["budget"] = json!(budget);
    Ok(report)
}

fn compute_summary(v: &Value) -> String {
    let mut s = format!(
        "measure={} value={:.9} direction={}",
        v["measure"].as_str().unwrap_or("?"),
        v["value"].as_f64().unwrap_or(f64::NAN),
        v["direction"].as_str().unwrap_or("?")
    );
    if let Some(e) = v.get("evaluations") {
        s.push_str(&format!(" evaluations={e}"));
    }
    if let Some(c) = v.get("converged") {
        s.push_str(&format!(" converged={c}"));
    }
    s.push('\n');
    s
}

fn verify(
    suites: &[String],
    state_path: &Option<PathBuf>,
    trials: u64,
    gap_tol: f64,
    search: &Search,
) -> Result<VerificationReport, Error> {
    if let Some(bad) = suites.iter().find(|s| !SUITES.contains(&s.as_str())) {
        return Err(Error::UnknownSuite(bad.clone()));
    }
    if gap_tol.is_nan() || gap_tol <= 0.0 {
        return Err(Error::InvalidParameter("--gap-tol must be positive".into()));
    }
    let opts = SuiteOptions {
        budget: budget_of(search),
        gap_tol,
    };
    let seeds: Vec<u64> = if search.seeds.is_empty() {
        (0..trials).collect()
    } else {
        search.seeds.clone()
    };
    match state_path {
        None => monogamy::run_suite(&refs(suites), &seeds, &opts),
        Some(path) => {
            let state = io::read_state(path)?.to_density();
            let reports = suites
                .iter()
                .map(|s| match s.as_str() {
                    "thm1" => Ok(monogamy::verify_thm1(&state, &opts)),
                    "cor1" => Ok(monogamy::verify_cor1(&state, &opts)),
                    "cor2" => Ok(monogamy::verify_cor2_single_letter(&state, &opts)),
                    "main5" => Ok(monogamy::verify_main5_single_letter(&state)),
                    other => Err(Error::InvalidParameter(format!(
                        "suite {other} does not take --state"
                    ))),
                })
                .collect::<Result<Vec<_>, Error>>()?;
            Ok(VerificationReport::merge(&suites.join(","), reports, &seeds))
        }
    }
}

fn catalog_cmd(
    name: &str,
    p: Option<f64>,
    dims: Option<Vec<usize>>,
    rank: Option<usize>,
    seed: u64,
    out: &Option<PathBuf>,
) -> Result<(), Error> {
    if !CatalogEntry::NAMES.contains(&name) {
        return Err(Error::UnknownCatalog(name.to_string()));
    }
    let state = catalog_by_name(name, p, dims, rank, seed)?;
    let v = io::state_to_json(&state);
    match out {
        Some(path) => {
            io::write_json(path, &v)?;
            // re-ingest to validate what was written
            io::read_state(path)?;
            println!("wrote {name} ({} dims {:?}) to {}", state.labels().join(","), state.dims(), path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&v)?),
    }
    Ok(())
}

fn configure_threads() {
    if let Some(n) = std::env::var("MONOGAMY_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Compute {
            measure,
            state,
            povm,
            part,
            cap,
            gap_tol,
            search,
            output,
        } => {
            let report = compute(&measure, &state, &povm, &part, cap, gap_tol, &search)?;
            emit(&output, &report, &compute_summary(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suites,
            state,
            trials,
            gap_tol,
            search,
            output,
        } => {
            let report = verify(&suites, &state, trials, gap_tol, &search)?;
            emit(&output, &report.to_json(), &report.summary_table())?;
            Ok(if report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Catalog {
            name,
            p,
            dims,
            rank,
            seed,
            out,
        } => {
            catalog_cmd(&name, p, dims, rank, seed, &out)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

//! Command-line front end. Exit codes: 0 pass, 1 verification failure,
//! 2 usage or format error, 3 size limit exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nnrank::bounds::{
    bounds_report, exactify_factorization, heuristic_nnr_ub, matrix_to_floats, BoundsOptions,
    HeuristicOptions,
};
use nnrank::cohen_rothblum as cr;
use nnrank::gadgets::{
    build_b, build_b0, eliminate_variable, format_partial, format_trace, parse_partial,
    wrap_gadget, GadgetTrace,
};
use nnrank::graphred::{certify_reduction_ub, parse_graph, reduce_graph};
use nnrank::matrix::{
    format_factorization, format_matrix, parse_factorization, parse_matrix, ExactMatrix,
};
use nnrank::scalar::{scalar_parse, ExactScalar, ScalarDomain};
use nnrank::Error;

#[derive(Parser)]
#[command(name = "nnrank", version, about = "Exact nonnegative-rank gadgets and verifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gadget constructions.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Graph-to-matrix reduction.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Lower/upper bound report for a matrix.
    Bounds(BoundsArgs),
    /// The 21x21 separation pipeline.
    #[command(subcommand)]
    Cr(CrCmd),
    /// Validates a factorization against a matrix.
    Check(CheckArgs),
}

#[derive(Subcommand)]
enum GadgetCmd {
    /// Prints the 4x4 cyclic matrix.
    B0,
    /// Prints B(alpha_1..alpha_n).
    B {
        /// Scalar tokens, rationals or `p+qr2` quadratics.
        #[arg(long, num_args = 1.., required = true)]
        alpha: Vec<String>,
    },
    /// Wraps blocks A, B, c with parameter s.
    Wrap {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        s: String,
        #[arg(long)]
        r: usize,
    },
    /// Eliminates one variable of a partial matrix.
    Eliminate {
        #[arg(long)]
        partial: PathBuf,
        #[arg(long)]
        var: String,
        #[arg(long)]
        r: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ReduceCmd {
    /// Eliminates all variables of X(G); prints matrix, trace, predicted rank.
    Graph {
        #[arg(long)]
        input: PathBuf,
        /// Treat x_uv and x_vu as one variable (unsupported; see error).
        #[arg(long)]
        identify_vars: bool,
    },
    /// Lifts a minimum-cover factorization through the reduction and validates.
    Certify {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    max_rank: Option<usize>,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Try to round the heuristic witness to exact rationals.
    #[arg(long)]
    denom_bound: Option<u64>,
}

#[derive(Subcommand)]
enum CrCmd {
    /// Rebuilds the 21x21 matrix from gadget eliminations and compares.
    RebuildM,
    /// Validates the 19-term real witness.
    #[command(name = "verify-19")]
    Verify19,
    /// Prints the 25 symbolic order-4 minors.
    Minors,
    /// Verifies the no-rational-point certificate.
    CertifyRational,
    /// Samples rational points and checks the rank never drops below 4.
    Probe {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs the full separation chain.
    Report {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    factorization: PathBuf,
}

/// FAIL with exit 1, as opposed to a usage or format problem (exit 2).
fn fail(msg: &str) -> ExitCode {
    eprintln!("FAIL: {msg}");
    ExitCode::from(1)
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::TooLarge(_) => 3,
        Error::ValidationFailure(_)
        | Error::CertificateFailure(_)
        | Error::ReconstructionMismatch(_, _)
        | Error::NotAClique(_, _)
        | Error::NotACover
        | Error::InvalidCover(_)
        | Error::PreconditionNotCertified(_) => 1,
        _ => 2,
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| Error::MalformedMatrix(format!("cannot read {}: {e}", path.display())))
}

fn read_matrix(path: &PathBuf) -> Result<ExactMatrix, Error> {
    parse_matrix(&read(path)?)
}

fn parse_scalar_auto(tok: &str) -> Result<ExactScalar, Error> {
    let s = scalar_parse(tok, ScalarDomain::Quad)?;
    // A plain rational stays in the rational domain.
    if s.parts().1 == num::rational::BigRational::from_integer(0.into()) {
        s.into_domain(ScalarDomain::Rat)
    } else {
        Ok(s)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Gadget(cmd) => run_gadget(cmd),
        Command::Reduce(cmd) => run_reduce(cmd),
        Command::Bounds(args) => run_bounds(args),
        Command::Cr(cmd) => run_cr(cmd),
        Command::Check(args) => run_check(args),
    }
}

fn run_gadget(cmd: GadgetCmd) -> Result<(), Error> {
    match cmd {
        GadgetCmd::B0 => print!("{}", format_matrix(&build_b0())),
        GadgetCmd::B { alpha } => {
            let alphas: Vec<ExactScalar> = alpha
                .iter()
                .map(|t| parse_scalar_auto(t))
                .collect::<Result<_, _>>()?;
            print!("{}", format_matrix(&build_b(&alphas)?));
        }
        GadgetCmd::Wrap { a, b, c, s, r } => {
            let wrapped = wrap_gadget(
                &read_matrix(&a)?,
                &read_matrix(&b)?,
                &read_matrix(&c)?,
                &parse_scalar_auto(&s)?,
                r,
            )?;
            print!("{}", format_matrix(&wrapped));
        }
        GadgetCmd::Eliminate { partial, var, r } => {
            let pm = parse_partial(&read(&partial)?)?;
            let (next, step) = eliminate_variable(&pm, &var, r)?;
            print!("{}", format_partial(&next));
            print!(
                "{}",
                format_trace(&GadgetTrace {
                    initial_rows: pm.rows(),
                    initial_cols: pm.cols(),
                    steps: vec![step],
                })
            );
        }
    }
    Ok(())
}

fn run_reduce(cmd: ReduceCmd) -> Result<(), Error> {
    match cmd {
        ReduceCmd::Graph {
            input,
            identify_vars,
        } => {
            if identify_vars {
                return Err(Error::MalformedGraph(
                    "--identify-vars is unsupported: an identified variable occupies two rows \
                     and the row gadget cannot eliminate it; use independent variables"
                        .into(),
                ));
            }
            let g = parse_graph(&read(&input)?)?;
            let (m, trace, predicted) = reduce_graph(&g)?;
            print!("{}", format_matrix(&m));
            print!("{}", format_trace(&trace));
            println!("predicted_nnr={predicted}");
        }
        ReduceCmd::Certify { input } => {
            let g = parse_graph(&read(&input)?)?;
            let (m, _, predicted) = reduce_graph(&g)?;
            let f = certify_reduction_ub(&g)?;
            let report = m.validate_factorization(&f)?;
            if !report.pass() {
                return Err(Error::ValidationFailure(
                    "lifted cover factorization does not validate".into(),
                ));
            }
            println!("reduction upper bound certified: {} terms on {}x{}", f.terms.len(), m.rows(), m.cols());
            println!("terms={}", f.terms.len());
            println!("predicted_nnr={predicted}");
            println!("valid=true");
        }
    }
    Ok(())
}

fn run_bounds(args: BoundsArgs) -> Result<(), Error> {
    let m = read_matrix(&args.matrix)?;
    let opts = BoundsOptions {
        heuristic: HeuristicOptions {
            restarts: args.restarts,
            iters: args.iters,
            tol: args.tol,
            seed: args.seed,
        },
        max_rank: args.max_rank,
        cell_limit: None,
    };
    let report = bounds_report(&m, &opts)?;
    println!("conventional rank:     {}", report.rank_lb);
    println!("rectangle cover bound: {}", report.rect_lb);
    match report.heur_ub {
        Some(ub) => println!("heuristic upper bound: {ub}"),
        None => println!("heuristic upper bound: none found"),
    }
    match report.pinned {
        Some(r) => println!("nonnegative rank pinned at {r}"),
        None => println!(
            "bounds do not meet; heuristic failure is evidence only, not a certificate"
        ),
    }
    if let (Some(bound), Some(ub)) = (args.denom_bound, report.heur_ub) {
        let floats = matrix_to_floats(&m);
        let witness = heuristic_nnr_ub(&floats, ub, &opts.heuristic);
        let exact = witness.and_then(|w| exactify_factorization(&w, &m, bound));
        match exact {
            Some(f) => {
                print!("{}", format_factorization(&f));
                println!("exactified=true");
            }
            None => println!("exactified=false"),
        }
    }
    println!("rank_lb={}", report.rank_lb);
    println!("rect_lb={}", report.rect_lb);
    println!(
        "heur_ub={}",
        report.heur_ub.map_or("none".into(), |x| x.to_string())
    );
    println!(
        "pinned={}",
        report.pinned.map_or("none".into(), |x| x.to_string())
    );
    Ok(())
}

fn run_cr(cmd: CrCmd) -> Result<(), Error> {
    match cmd {
        CrCmd::RebuildM => {
            let (m, trace) = cr::rebuild_m_from_gadgets()?;
            println!(
                "rebuilt {}x{} matrix in {} eliminations; matches the stored matrix",
                m.rows(),
                m.cols(),
                trace.steps.len()
            );
            println!("rebuild=PASS");
        }
        CrCmd::Verify19 => {
            let f = cr::build_m_factorization_19()?;
            println!(
                "19-term nonnegative factorization over Q(sqrt 2) validated exactly ({} terms)",
                f.terms.len()
            );
            println!("terms={}", f.terms.len());
            println!("verify19=PASS");
        }
        CrCmd::Minors => {
            for ((di, dj), p) in cr::symbolic_minors_c() {
                println!("minor[{di}][{dj}] = {p}");
            }
        }
        CrCmd::CertifyRational => {
            let report = cr::certify_no_rational_point()?;
            println!(
                "no rational point: {} minors, {} identities, {} candidate roots excluded",
                report.minors_computed, report.identities_checked, report.roots_excluded
            );
            println!("certify_rational=PASS");
        }
        CrCmd::Probe { samples, seed } => {
            let report = cr::probe_rational_points(samples, seed)?;
            println!(
                "{} rational points probed: rank 4 at {}, rank 5 at {}, none below 4",
                report.samples, report.rank4, report.rank5
            );
            println!("samples={}", report.samples);
            println!("rank4={}", report.rank4);
            println!("rank5={}", report.rank5);
            println!("min_rank={}", report.min_rank);
        }
        CrCmd::Report { samples, seed } => {
            let report = cr::separation_report(samples, seed)?;
            println!("conventional rank of M: {}", report.rank_m);
            println!(
                "real nonnegative rank <= {} (validated {}-term witness)",
                report.real_ub_terms, report.real_ub_terms
            );
            println!(
                "rational nonnegative rank >= {} (certificate: {} identities, {} roots excluded)",
                report.rational_lb,
                report.certificate.identities_checked,
                report.certificate.roots_excluded
            );
            println!(
                "probe: {} samples, rank 4 at {}, rank 5 at {}",
                report.probe.samples, report.probe.rank4, report.probe.rank5
            );
            println!("rank_m={}", report.rank_m);
            println!("real_ub={}", report.real_ub_terms);
            println!("rational_lb={}", report.rational_lb);
            println!("report=PASS");
        }
    }
    Ok(())
}

fn run_check(args: CheckArgs) -> Result<(), Error> {
    let m = read_matrix(&args.matrix)?;
    let f = parse_factorization(&read(&args.factorization)?)?;
    let report = m.validate_factorization(&f)?;
    if report.pass() {
        println!("factorization validates: {} terms", f.terms.len());
        println!("check=PASS");
        Ok(())
    } else {
        let detail = match (&report.first_negative, &report.first_mismatch) {
            (Some(coord), _) => format!("negative factor entry at {coord:?}"),
            (_, Some((i, j))) => format!("first mismatch at ({i}, {j})"),
            _ => "unknown".into(),
        };
        Err(Error::ValidationFailure(detail))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success; real usage
            // errors map to exit 2.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = error_code(&e);
            if code == 1 {
                fail(&e.to_string())
            } else {
                eprintln!("error: {e}");
                ExitCode::from(code)
            }
        }
    }
}

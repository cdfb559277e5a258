//! Command-line front end: decompose tensors from files, verify results,
//! and print rank diagnostics.
//!
//! Exit codes: 0 success, 1 I/O or format problems, 2 no convergence (or an
//! error above tolerance), 3 inconsistent linear systems (rank too low).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use symdec::catalecticant::{cat_rank, dimension_gap, generic_rank, DEFAULT_RANK_TOL};
use symdec::decompose::{
    decompose_all, decompose_numeric, decomposition_error, reduce_length, Decomposition, Rank,
};
use symdec::genmat::parameterize;
use symdec::symtensor::SymTensor;
use symdec::syssolve::SolveConfig;
use symdec::{Error, Result};
use symdec_cli::files;

/// Relative error at or below which `verify` reports success.
const VERIFY_REL_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "symdec",
    about = "Symmetric tensor decomposition over the complex numbers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a tensor into a sum of rank-one powers
    Decompose(DecomposeArgs),
    /// Recompute a decomposition's error against its tensor
    Verify {
        tensor: PathBuf,
        decomposition: PathBuf,
    },
    /// Catalecticant rank of a tensor (a lower bound on its rank)
    Catrank {
        tensor: PathBuf,
        /// Relative singular-value cutoff
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        tol: f64,
    },
    /// Generic rank and dimension gap for a tensor shape
    Genrank { n_plus_1: usize, m: u32 },
}

#[derive(Args)]
struct DecomposeArgs {
    input: PathBuf,
    /// Number of rank-one terms, or `auto` for the generic rank
    #[arg(long, default_value = "auto")]
    rank: String,
    #[arg(long, value_enum, default_value_t = Mode::Numeric)]
    mode: Mode,
    /// RNG seed; defaults to $SYMDEC_SEED, then 0
    #[arg(long)]
    seed: Option<u64>,
    /// Relative error at or below which the run counts as a success
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Restart budget for the nonlinear solves
    #[arg(long)]
    restarts: Option<usize>,
    /// Try to shorten each result afterwards
    #[arg(long)]
    reduce: bool,
    /// Output file (gains `.1`, `.2`, ... suffixes in all mode); stdout when
    /// absent
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// One decomposition via the numeric pipeline
    Numeric,
    /// As many inequivalent decompositions as the restart budget finds
    All,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Decompose(args) => cmd_decompose(&args),
        Command::Verify {
            tensor,
            decomposition,
        } => cmd_verify(&tensor, &decomposition),
        Command::Catrank { tensor, tol } => cmd_catrank(&tensor, tol),
        Command::Genrank { n_plus_1, m } => cmd_genrank(n_plus_1, m),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InconsistentSystem { .. } => 3,
                Error::NoConvergence { .. } => 2,
                _ => 1,
            })
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn read_tensor(path: &Path) -> Result<SymTensor> {
    files::parse_tensor(&read_text(path)?)
}

fn env_seed() -> u64 {
    match std::env::var("SYMDEC_SEED") {
        Ok(s) => match s.parse() {
            Ok(v) => v,
            Err(_) => {
                log::warn!("ignoring unparsable SYMDEC_SEED=`{s}`");
                0
            }
        },
        Err(_) => 0,
    }
}

fn relative(err: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        err
    } else {
        err / scale
    }
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<u8> {
    let f = read_tensor(&args.input)?;
    let n = f.n_vars();
    let m = f.order();
    let rank = match args.rank.as_str() {
        "auto" => Rank::Auto,
        s => Rank::Fixed(s.parse().map_err(|_| {
            Error::Format(format!(
                "--rank must be a positive integer or `auto`, got `{s}`"
            ))
        })?),
    };
    let r = match rank {
        Rank::Auto => generic_rank(n, m).value,
        Rank::Fixed(k) => k,
    };
    if r == 0 {
        return Err(Error::Format("--rank must be at least 1".into()));
    }
    let mut cfg = SolveConfig {
        seed: args.seed.unwrap_or_else(env_seed),
        ..SolveConfig::default()
    };
    if let Some(k) = args.restarts {
        cfg.max_restarts = k;
    }

    // Report the geometry up front. The numeric driver can still succeed on
    // direct fits when no generating matrix exists; the all-mode search
    // cannot, so there the inconsistency exits with its advisory.
    println!("rank r = {r}");
    match parameterize(&f, r, 1e-8) {
        Ok(param) => {
            let l = param.omega_len();
            let d = dimension_gap(n, m, r).min(l);
            println!("free parameters l = {l}, affine constraints d = {d}");
        }
        Err(e @ Error::InconsistentSystem { .. }) => match args.mode {
            Mode::All => return Err(e),
            Mode::Numeric => println!("border system inconsistent; relying on direct fits"),
        },
        Err(e) => return Err(e),
    }

    let mut decs: Vec<Decomposition> = match args.mode {
        Mode::Numeric => vec![decompose_numeric(&f, rank, &cfg)?],
        Mode::All => {
            let ds = decompose_all(&f, r, &cfg)?;
            println!(
                "found {} decomposition{}",
                ds.len(),
                if ds.len() == 1 { "" } else { "s" }
            );
            if ds.is_empty() {
                return Err(Error::NoConvergence {
                    best_residual: f64::INFINITY,
                    attempts: cfg.max_restarts,
                    best: None,
                });
            }
            ds
        }
    };
    if args.reduce {
        decs = decs.iter().map(|d| reduce_length(&f, d, &cfg)).collect();
    }

    let fnorm = f.norm();
    let mut worst: f64 = 0.0;
    for (i, dec) in decs.iter().enumerate() {
        let abs = decomposition_error(&f, dec.vectors())?;
        let rel = relative(abs, fnorm);
        worst = worst.max(rel);
        println!(
            "decomposition {}: {} terms, error = {:.3e} (relative {:.3e})",
            i + 1,
            dec.len(),
            abs,
            rel
        );
        let text = files::serialize_decomposition(dec, abs);
        match &args.output {
            Some(path) => {
                let target = match args.mode {
                    Mode::Numeric => path.clone(),
                    Mode::All => PathBuf::from(format!("{}.{}", path.display(), i + 1)),
                };
                std::fs::write(&target, text)
                    .map_err(|e| Error::Format(format!("{}: {e}", target.display())))?;
                println!("wrote {}", target.display());
            }
            None => print!("{text}"),
        }
    }
    Ok(if worst <= args.tol { 0 } else { 2 })
}

fn cmd_verify(tensor: &Path, dec_path: &Path) -> Result<u8> {
    let f = read_tensor(tensor)?;
    let (dec, stored) = files::parse_decomposition(&read_text(dec_path)?)?;
    if dec.n_vars() != f.n_vars() || dec.order() != f.order() {
        return Err(Error::Dimension(format!(
            "decomposition shape (n+1, m) = ({}, {}) vs tensor ({}, {})",
            dec.n_vars() + 1,
            dec.order(),
            f.n_vars() + 1,
            f.order()
        )));
    }
    let abs = decomposition_error(&f, dec.vectors())?;
    let rel = relative(abs, f.norm());
    println!("error = {abs:.6e} absolute, {rel:.6e} relative (file header: {stored:.6e})");
    Ok(if rel <= VERIFY_REL_TOL { 0 } else { 2 })
}

fn cmd_catrank(tensor: &Path, tol: f64) -> Result<u8> {
    let f = read_tensor(tensor)?;
    let r = cat_rank(&f, tol);
    println!("catalecticant rank = {r}");
    Ok(0)
}

fn cmd_genrank(n_plus_1: usize, m: u32) -> Result<u8> {
    if n_plus_1 == 0 || m == 0 {
        return Err(Error::Format("n_plus_1 and m must be positive".into()));
    }
    let g = generic_rank(n_plus_1 - 1, m);
    let note = if g.quadratic {
        " (order 2: matrix rank, outside the dimension-count formula)"
    } else if g.exceptional {
        " (exceptional shape)"
    } else {
        ""
    };
    println!("generic rank = {}{}", g.value, note);
    println!(
        "dimension gap at rank {} = {}",
        g.value,
        dimension_gap(n_plus_1 - 1, m, g.value)
    );
    Ok(0)
}

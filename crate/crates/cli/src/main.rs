//! `hqsd`: sweeps of the worked examples and a randomized no-go stress test.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heralded::discrimination::{brute_force_min_error, helstrom_pure, nogo_certificate, random_pure_pair, random_trials};
use heralded::experiments::{
    read_csv, run_sweep, tmsv_cutoff, tmsv_herald, validate_csv_rows, write_csv, BackendSelection, ExampleKind, FixedParams,
    Grid, SweepRow, SweepSpec, SweptParam,
};
use heralded::Error;

const DEFAULT_SEED: u64 = 20240917;

#[derive(Parser, Debug)]
#[command(name = "hqsd", version, about = "Heralded binary state discrimination in truncated Fock spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Environment |2>, perfect photon counting.
    Example1(SweepArgs),
    /// Environment |alpha> (real alpha), perfect photon counting.
    Example2 {
        /// Coherent amplitude of the environment.
        #[arg(long, default_value_t = 0.6, allow_negative_numbers = true)]
        alpha: f64,
        /// Fock cutoff per mode [default: ceil(alpha^2 + 10|alpha| + 20)].
        #[arg(long)]
        cutoff: Option<usize>,
        /// Largest photon count reported [default: smallest k >= 3 with Poisson tail < 1e-15].
        #[arg(long)]
        k_max: Option<usize>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Environment |2>, pure-loss channel before photon counting.
    Lossy {
        /// Transmissivity of the loss channel.
        #[arg(long, default_value_t = 0.5)]
        tau: f64,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Environment heralded from a two-mode squeezed vacuum.
    Tmsv {
        /// Squeezing parameter r.
        #[arg(long, default_value_t = 0.5)]
        squeezing: f64,
        /// Idler photon count that heralds the environment.
        #[arg(long, default_value_t = 2)]
        herald: usize,
        /// Fock cutoff per mode [default: smallest c with tanh(r)^(2c) <= 1e-12, at least herald + 2].
        #[arg(long)]
        cutoff: Option<usize>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Random instances through the no-go certificate, and random pairs against the brute-force oracle.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Prior of the second hypothesis.
    #[arg(long, default_value_t = 0.3)]
    q: f64,
    /// Beam-splitter transmissivity (ignored when sweeping eta).
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    /// Angle of the second input state, radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    theta: f64,
    /// Parameter swept over the grid.
    #[arg(long, value_enum, default_value_t = Swept::Eta)]
    sweep: Swept,
    /// Grid as start:stop:step.
    #[arg(long, default_value = "0.02:0.98:0.02", value_parser = parse_grid)]
    grid: Grid,
    /// Backends to write.
    #[arg(long, value_enum, default_value_t = BackendArg::Both)]
    backend: BackendArg,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Number of random instances, and of random oracle pairs.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Dimension range for system and environment, lo:hi or a single value.
    #[arg(long, default_value = "2:6", value_parser = parse_range)]
    dims: (usize, usize),
    /// POVM outcome count range, lo:hi or a single value.
    #[arg(long, default_value = "1:4", value_parser = parse_range)]
    n_povm: (usize, usize),
    /// Oracle grid resolution per angle.
    #[arg(long, default_value_t = 200)]
    resolution: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Swept {
    Eta,
    Q,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BackendArg {
    ClosedForm,
    Engine,
    Both,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err("expected start:stop:step".into());
    }
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    Grid::new(num(parts[0])?, num(parts[1])?, num(parts[2])?).map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let num = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CrossCheck { .. } => 2,
            Error::InvariantViolation { .. } => 3,
            _ => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fixed_zero(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.000000000000".into()
    } else {
        s
    }
}

fn run_sweep_command(example: ExampleKind, args: &SweepArgs, cutoff: Option<usize>, k_max: Option<usize>) -> Result<(), Failure> {
    let swept = match args.sweep {
        Swept::Eta => SweptParam::Eta,
        Swept::Q => SweptParam::Q,
    };
    let spec = SweepSpec {
        example,
        fixed: FixedParams {
            q: args.q,
            eta: args.eta,
            theta: args.theta,
        },
        swept,
        grid: args.grid,
        cutoff,
        k_max,
        backend: match args.backend {
            BackendArg::ClosedForm => BackendSelection::ClosedForm,
            BackendArg::Engine => BackendSelection::Engine,
            BackendArg::Both => BackendSelection::Both,
        },
    };
    let rows = run_sweep(&spec)?;
    write_and_revalidate(&args.out, &rows)?;
    println!("{}", summary(example.name(), swept, &rows, &args.out));
    Ok(())
}

fn write_and_revalidate(path: &Path, rows: &[SweepRow]) -> Result<(), Failure> {
    let file = File::create(path).map_err(Error::from)?;
    write_csv(BufWriter::new(file), rows)?;
    let reloaded = read_csv(File::open(path).map_err(Error::from)?)?;
    validate_csv_rows(&reloaded).map_err(|e| Failure {
        code: 3,
        message: format!("written CSV failed revalidation: {e}"),
    })
}

fn summary(name: &str, swept: SweptParam, rows: &[SweepRow], out: &Path) -> String {
    let points = rows.iter().map(|r| r.value.to_bits()).collect::<std::collections::BTreeSet<_>>().len();
    let Some(worst) = rows.iter().min_by(|a, b| a.eval.margin.total_cmp(&b.eval.margin)) else {
        return format!("{name}: empty grid, wrote header only to {}", out.display());
    };
    let best = rows
        .iter()
        .flat_map(|r| {
            r.eval
                .branches
                .iter()
                .enumerate()
                .filter_map(move |(k, b)| b.p_err.map(|e| (r.eval.p_me - e, k, r.value)))
        })
        .max_by(|a, b| a.0.total_cmp(&b.0));
    let advantage = match best {
        Some((adv, k, v)) => format!("best conditional advantage {adv:.6e} at k={k} {}={v}", swept.name()),
        None => "no conditional branch".into(),
    };
    format!(
        "{name}: {points} points, {} rows, min margin {:.6e} at {}={}, {advantage}, wrote {}",
        rows.len(),
        worst.eval.margin,
        swept.name(),
        worst.value,
        out.display()
    )
}

fn verify(args: &VerifyArgs) -> Result<(), Failure> {
    let (dlo, dhi) = args.dims;
    let (nlo, nhi) = args.n_povm;
    if dlo < 2 {
        return Err(Failure {
            code: 1,
            message: "--dims must be at least 2".into(),
        });
    }
    if nlo < 1 {
        return Err(Failure {
            code: 1,
            message: "--n-povm must be at least 1".into(),
        });
    }
    if args.resolution < 2 {
        return Err(Failure {
            code: 1,
            message: "--resolution must be at least 2".into(),
        });
    }
    let trials = random_trials(args.seed, args.trials as usize, dlo..=dhi, nlo..=nhi);
    let violation = |what: String, seed: u64| Failure {
        code: 3,
        message: format!("{what} (master seed {}, trial seed {seed})", args.seed),
    };

    let mut worst_margin = f64::INFINITY;
    for t in &trials {
        let cert = t.instance().and_then(|inst| nogo_certificate(&inst)).map_err(|e| {
            violation(
                format!("instance dims {}x{} with {} outcomes: {e}", t.dim_s, t.dim_e, t.n_povm),
                t.seed,
            )
        })?;
        if (cert.bookkeeping_total() - 1.0).abs() > 1e-10 {
            return Err(violation(format!("probability bookkeeping totals {}", cert.bookkeeping_total()), t.seed));
        }
        worst_margin = worst_margin.min(cert.margin);
    }

    let mut worst_gap = f64::NEG_INFINITY;
    for t in &trials {
        let (a, b, q) = random_pure_pair(t.seed, t.dim_s).map_err(|e| violation(e.to_string(), t.seed))?;
        let helstrom = helstrom_pure(&a, &b, q).map_err(|e| violation(e.to_string(), t.seed))?;
        let oracle = brute_force_min_error(&a, &b, q, args.resolution).map_err(|e| violation(e.to_string(), t.seed))?;
        let gap = oracle - helstrom;
        if gap < -1e-12 {
            return Err(violation(format!("oracle error {oracle} undercuts the Helstrom bound {helstrom}"), t.seed));
        }
        worst_gap = worst_gap.max(gap);
    }

    println!(
        "verify: {} instances, worst margin {}, worst oracle gap {:.6e} at resolution {}, seed {}",
        trials.len(),
        fixed_zero(worst_margin),
        worst_gap,
        args.resolution,
        args.seed
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Example1(args) => run_sweep_command(ExampleKind::Example1, &args, None, None),
        Command::Example2 {
            alpha,
            cutoff,
            k_max,
            sweep,
        } => run_sweep_command(ExampleKind::Example2 { alpha }, &sweep, cutoff, k_max),
        Command::Lossy { tau, sweep } => run_sweep_command(ExampleKind::Lossy { tau }, &sweep, None, None),
        Command::Tmsv {
            squeezing,
            herald,
            cutoff,
            sweep,
        } => {
            let c = cutoff.unwrap_or_else(|| tmsv_cutoff(squeezing).max(herald + 2));
            let (prob, _) = tmsv_herald(squeezing, herald, c)?;
            println!("tmsv: herald probability {prob:.6e} for idler count {herald}, cutoff {c}");
            run_sweep_command(ExampleKind::Tmsv { squeezing, herald }, &sweep, Some(c), None)
        }
        Command::Verify(args) => verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

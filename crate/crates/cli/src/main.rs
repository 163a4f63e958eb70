//! `bridgetail`: height statistics of weighted lattice-path bridges.
//!
//! Every subcommand reads a jump polynomial from `-p/--poly`, runs one
//! library operation, and prints JSON (default) or CSV on stdout. Exit
//! status is 0 on success (including verify suites whose checks fail), 1 on
//! a domain error such as an unparsable walk or a violated precondition,
//! and 2 on command-line usage errors.

mod commands;
mod verify;

use bridgetail_core::walk::ArithMode;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "bridgetail",
    version,
    about = "Height statistics of weighted lattice-path bridges"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Structural constants of a walk: period, tau, rho, moments
    Analyze(AnalyzeArgs),
    /// Tables of bounded-walk weights from the step recurrence
    Enumerate(EnumerateArgs),
    /// Tail-probability expansion at one (n, x), optionally compared with an
    /// exact oracle
    Tail(TailArgs),
    /// Full tail-expansion dump: monomial and Hermite bases, denominators
    Expand(ExpandArgs),
    /// Kernel roots, singularities, and domination scans
    Roots(RootsArgs),
    /// Named verification suites over exact and numeric identities
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Jump weights as `jump:weight` pairs, e.g. "-1:1/2,1:1/2"
    #[arg(short = 'p', long = "poly", allow_hyphen_values = true)]
    poly: String,
    /// Working precision in decimal digits
    #[arg(long, default_value_t = bridgetail_core::DEFAULT_DIGITS)]
    precision: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct EnumerateArgs {
    #[command(flatten)]
    common: Common,
    /// Number of steps to tabulate
    #[arg(long = "n", allow_hyphen_values = true)]
    n: i64,
    /// Optional altitude ceiling
    #[arg(long = "h", allow_hyphen_values = true)]
    h: Option<i64>,
    /// Arithmetic mode
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

#[derive(Args)]
struct TailArgs {
    #[command(flatten)]
    common: Common,
    /// Bridge length
    #[arg(long = "n", allow_hyphen_values = true)]
    n: i64,
    /// Height in units of sigma sqrt(n)
    #[arg(long = "x", allow_hyphen_values = true)]
    x: String,
    /// Highest power of n^(-1/2) kept in the expansion
    #[arg(long, default_value_t = 7)]
    order: usize,
    /// Oracle to compare against
    #[arg(long, value_enum, default_value_t = CompareArg::None)]
    compare: CompareArg,
    /// Arithmetic mode for the dp oracle
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    common: Common,
    /// Highest power of n^(-1/2) kept in the expansion
    #[arg(long, default_value_t = 2)]
    order: usize,
}

#[derive(Args)]
struct RootsArgs {
    #[command(flatten)]
    common: Common,
    /// Grid size of the domination scan
    #[arg(long, default_value_t = 40)]
    samples: usize,
    /// Scan the circle |z| = RADIUS instead of the real axis
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Suite to run
    #[arg(long, value_enum)]
    suite: SuiteArg,
    /// Sample count: scan grid sizes or random draws, per suite
    #[arg(long)]
    samples: Option<usize>,
    /// Length bound used by the periodic and rayleigh-scan suites
    #[arg(long = "n", allow_hyphen_values = true)]
    n: Option<i64>,
    /// Series order used by the series suite
    #[arg(long)]
    order: Option<usize>,
    /// Seed for randomized sample draws
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for ArithMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => ArithMode::Exact,
            ModeArg::Float => ArithMode::Float,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CompareArg {
    Andre,
    Dp,
    None,
}

impl From<CompareArg> for commands::CompareKind {
    fn from(c: CompareArg) -> Self {
        match c {
            CompareArg::Andre => commands::CompareKind::Andre,
            CompareArg::Dp => commands::CompareKind::Dp,
            CompareArg::None => commands::CompareKind::None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Domination,
    Periodic,
    Series,
    WmIdentity,
    BhIdentity,
    RayleighScan,
}

impl From<SuiteArg> for verify::SuiteKind {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Domination => verify::SuiteKind::Domination,
            SuiteArg::Periodic => verify::SuiteKind::Periodic,
            SuiteArg::Series => verify::SuiteKind::Series,
            SuiteArg::WmIdentity => verify::SuiteKind::WmIdentity,
            SuiteArg::BhIdentity => verify::SuiteKind::BhIdentity,
            SuiteArg::RayleighScan => verify::SuiteKind::RayleighScan,
        }
    }
}

fn dispatch(command: Command) -> (FormatArg, bridgetail_core::Result<commands::Output>) {
    match command {
        Command::Analyze(a) => (
            a.common.format,
            commands::run_analyze(&a.common.poly, a.common.precision),
        ),
        Command::Enumerate(a) => (
            a.common.format,
            commands::run_enumerate(&a.common.poly, a.n, a.h, a.mode.into()),
        ),
        Command::Tail(a) => (
            a.common.format,
            commands::run_tail(
                &a.common.poly,
                a.n,
                &a.x,
                a.order,
                a.common.precision,
                a.compare.into(),
                a.mode.into(),
            ),
        ),
        Command::Expand(a) => (
            a.common.format,
            commands::run_expand(&a.common.poly, a.order, a.common.precision),
        ),
        Command::Roots(a) => (
            a.common.format,
            commands::run_roots(
                &a.common.poly,
                a.samples,
                a.radius.as_deref(),
                a.common.precision,
            ),
        ),
        Command::Verify(a) => {
            let opts = verify::SuiteOptions {
                samples: a.samples,
                n: a.n,
                order: a.order,
                seed: a.seed,
                digits: a.common.precision,
            };
            (
                a.common.format,
                verify::run_verify(&a.common.poly, a.suite.into(), &opts),
            )
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let (format, result) = dispatch(cli.command);
    match result {
        Ok(out) => match format {
            FormatArg::Json => {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("render json"))
            }
            FormatArg::Csv => print!("{}", out.csv),
        },
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

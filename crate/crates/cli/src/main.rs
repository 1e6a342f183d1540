//! `fqdioph`: experiments in Diophantine approximation over `F_q((X^-1))`.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "fqdioph", version, about = "Diophantine approximation over F_q((X^-1))")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Field: `p`, `p^r` or `p^r:c_r,...,c_0` (modulus coefficients, high to low).
    #[arg(long, global = true, default_value = "2")]
    pub field: String,

    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Worker threads for commands that parallelize.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    /// Upper limit on enumerated candidates for exhaustive searches.
    #[arg(long, global = true, default_value_t = 1u128 << 100)]
    pub budget: u128,

    /// Leave the timestamp out of the output, making it byte-reproducible.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    /// File of `key = value` lines supplying defaults for any flag.
    #[arg(long, global = true)]
    pub config: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a series, report norms and digits, optionally combine with a second one.
    Series(SeriesArgs),
    /// Continued fraction expansion, convergents and the bounded-quotient test.
    Cf(CfArgs),
    /// Badness constant min ‖q‖^m ⟨qA⟩^n under a height cap, with a minimizer.
    Badness(BadnessArgs),
    /// A Dirichlet approximation vector at height k^t.
    Dirichlet(DirichletArgs),
    /// Successive minima of a parallelepiped.
    Sucmin(BoxArgs),
    /// Haar measure of a parallelepiped.
    Measure(BoxArgs),
    /// The polar parallelepiped.
    Polar(BoxArgs),
    /// Minima of a parallelepiped and its polar, and their pairing.
    Duality(DualityArgs),
    /// Play the (α, β)-game.
    Game {
        #[command(subcommand)]
        action: GameAction,
    },
    /// Certify ‖q‖^m ⟨qA⟩^n > K for every q under a height cap.
    Certify(CertifyArgs),
    /// Dimension lower bounds, packing counts and box counts.
    Dim {
        #[command(subcommand)]
        action: DimAction,
    },
    /// Empirical constants for the strategy, with optional inequality sampling.
    Calibrate(CalibrateArgs),
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    /// Series in the text grammar, e.g. "X^2 + 1 + X^-3" or "(X)/(X^2 + 1)".
    #[arg(long)]
    pub x: String,
    /// Second operand.
    #[arg(long)]
    pub y: Option<String>,
    #[arg(long, value_enum, requires = "y")]
    pub op: Option<SeriesOp>,
    /// Report digits down to this exponent.
    #[arg(long, default_value_t = -10, allow_hyphen_values = true)]
    pub low: i64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Args, Debug)]
pub struct CfArgs {
    #[arg(long)]
    pub x: String,
    /// Maximum number of partial quotients.
    #[arg(long, default_value_t = 10)]
    pub terms: usize,
    /// Also run the bounded-quotient test to this depth.
    #[arg(long)]
    pub is_bad: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BadnessArgs {
    /// m×n matrix, rows split by ';' and entries by ','.
    #[arg(long)]
    pub a: String,
    /// Height cap exponent: q ranges over 0 < ‖q‖ <= k^cap.
    #[arg(long)]
    pub cap: i64,
}

#[derive(Args, Debug)]
pub struct DirichletArgs {
    #[arg(long)]
    pub a: String,
    /// Height exponent t ≥ 1.
    #[arg(long)]
    pub t: usize,
}

#[derive(Args, Debug)]
pub struct BoxArgs {
    /// Invertible d×d matrix.
    #[arg(long)]
    pub a: String,
    /// Comma-separated bound exponents c_i = k^{e_i}; zeros when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub e: Option<String>,
    /// Degree bound for the certified enumeration; the reduced basis is used when omitted.
    #[arg(long)]
    pub degree_bound: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DualityArgs {
    /// Invertible (m+n)×(m+n) matrix; alternatively use --c.
    #[arg(long, conflicts_with = "c")]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub e: Option<String>,
    /// m×n matrix for the structured box built from [[C, I], [I, 0]].
    #[arg(long)]
    pub c: Option<String>,
    /// R = k^r for the structured box.
    #[arg(long, default_value_t = 1)]
    pub r: i64,
    /// Level exponent of the structured box.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub level: i64,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub degree_bound: usize,
}

#[derive(Subcommand, Debug)]
pub enum GameAction {
    Run(GameRunArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhiteName {
    WhiteLiteral,
    WhiteAvoid,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlackName {
    BlackRandom,
    BlackGreedy,
    BlackStdin,
}

#[derive(Args, Debug)]
pub struct GameRunArgs {
    #[arg(long, value_enum, default_value_t = WhiteName::WhiteAvoid)]
    pub white: WhiteName,
    #[arg(long, value_enum, default_value_t = BlackName::BlackRandom)]
    pub black: BlackName,
    #[arg(long, default_value = "1/4")]
    pub alpha: String,
    #[arg(long, default_value = "1/2")]
    pub beta: String,
    /// Full rounds, one White and one Black move each.
    #[arg(long, default_value_t = 24)]
    pub rounds: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// R = k^r.
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Largest height exponent White inspects.
    #[arg(long, default_value_t = 6)]
    pub horizon: usize,
    /// Centre of B_1 (zero matrix when omitted).
    #[arg(long)]
    pub center: Option<String>,
    /// Radius of B_1.
    #[arg(long, default_value = "1")]
    pub radius: String,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    /// Output of `game run` (or a JSON-lines transcript); '-' reads standard input.
    #[arg(long, default_value = "-", conflicts_with = "point")]
    pub input: String,
    /// Certify this matrix instead of a game's limit point.
    #[arg(long)]
    pub point: Option<String>,
    /// Height cap exponent.
    #[arg(long)]
    pub cap: i64,
    /// R = k^r; taken from the game output when present.
    #[arg(long)]
    pub r: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum DimAction {
    /// log N(β) / |log αβ|.
    Bound(DimBoundArgs),
    /// Packing counts N(β).
    Pack(DimPackArgs),
    /// Surviving digit cells of the truncated badly approximable set.
    Boxcount(BoxcountArgs),
}

#[derive(Args, Debug)]
pub struct DimBoundArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long, required_unless_present = "j_max")]
    pub beta: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Tabulate β = k^-j for j from 1 up to this value instead.
    #[arg(long)]
    pub j_max: Option<u32>,
}

#[derive(Args, Debug)]
pub struct DimPackArgs {
    #[arg(long)]
    pub beta: String,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// List the centres of the maximal family.
    #[arg(long)]
    pub centers: bool,
}

#[derive(Args, Debug)]
pub struct BoxcountArgs {
    /// Threshold K as "0", "1" or "k^E".
    #[arg(long, allow_hyphen_values = true)]
    pub threshold: String,
    /// Height cap exponent.
    #[arg(long)]
    pub cap: i64,
    /// Finest resolution k^-t.
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct CalibrateArgs {
    /// Shapes to sweep, e.g. "1x1,2x1,1x2".
    #[arg(long, default_value = "1x1")]
    pub shapes: String,
    #[arg(long, default_value = "1/4")]
    pub alpha: String,
    #[arg(long, default_value = "1/2")]
    pub beta: String,
    /// σ exponent.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub sigma: i64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Also sample the inequalities with the calibrated constants.
    #[arg(long)]
    pub check: bool,
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let mut cmd = Cli::command();
    cmd.build();
    let matches = match cmd.clone().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => e.exit(),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let echo = output::echo(&cmd, &matches);
    let code = commands::run(&cli, echo);
    ExitCode::from(code)
}

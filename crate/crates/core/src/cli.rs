//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and returns the process exit code (0 success, 2 bad input, 3 internal fault).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::allocator::{
    optimize_allocation, tradeoff_curve, unicast_tail_cutoff, CurveOptions, Scheme, Strategy, TradeoffCurve,
};
use crate::analytic::{
    cutset_lower_bound, grouped_expected_rate_exact, hpf_expected_rate, peak_rate, GroupUserLaws,
    HpfMode,
};
use crate::bitsim::{
    effective_allocation, simulate_expected_rate, trial_transcript, Library, SimParams,
    DEFAULT_SEGMENT_BITS,
};
use crate::error::{Error, Result};
use crate::popularity::{
    load_profile, partition_factor_two, partition_head_relative, partition_two_group,
    FileGrouping, PopularityProfile,
};
use crate::probability::{coupon_bound_check, distinct_count_distribution};

/// Seed used by randomized commands when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_140_101;

#[derive(Debug, Parser)]
#[command(name = "coded-caching", version, about = "Coded caching with nonuniform popularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Peak rate R(M, N, K) of decentralized coded caching, or the cut-set bound.
    Rate(RateArgs),
    /// Expected rate when every user caches the most popular whole files.
    Hpf(HpfArgs),
    /// Partition files into popularity groups.
    Group(GroupArgs),
    /// Split the cache memory across popularity groups.
    Allocate(AllocateArgs),
    /// Memory-rate tradeoff curves as CSV.
    Tradeoff(TradeoffArgs),
    /// Bit-level Monte Carlo simulation of the grouped scheme.
    Simulate(SimulateArgs),
    /// Law of the number of distinct requests under uniform demands.
    Coupon(CouponArgs),
}

#[derive(Debug, Args)]
struct PopularityArgs {
    /// Number of files for a built-in profile.
    #[arg(long = "files", visible_alias = "N", required_unless_present = "popularity_file")]
    files: Option<usize>,
    /// Zipf exponent; without it the built-in profile is uniform.
    #[arg(long, conflicts_with = "popularity_file", allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Flat head of this many files followed by an n^-alpha tail (alpha defaults to 2).
    #[arg(long, conflicts_with = "popularity_file")]
    head_tail: Option<usize>,
    /// Popularity table: `<file_id>,<weight>` per line.
    #[arg(long, conflicts_with = "files")]
    popularity_file: Option<PathBuf>,
}

impl PopularityArgs {
    fn load(&self) -> Result<PopularityProfile> {
        if let Some(path) = &self.popularity_file {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
            })?;
            return Ok(load_profile(&text)?.profile);
        }
        let n = self.files.expect("clap enforces a popularity source");
        match (self.head_tail, self.alpha) {
            (Some(head), alpha) => PopularityProfile::head_tail(n, head, alpha.unwrap_or(2.0)),
            (None, Some(alpha)) => PopularityProfile::zipf(n, alpha),
            (None, None) => PopularityProfile::uniform(n),
        }
    }

    fn alpha(&self) -> Option<f64> {
        match (self.head_tail, self.alpha) {
            (Some(_), a) => Some(a.unwrap_or(2.0)),
            (None, a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum GroupingChoice {
    FactorTwo,
    HeadRelative,
    TwoGroup,
    Explicit,
}

#[derive(Debug, Args)]
struct GroupingArgs {
    /// Grouping rule; defaults to the one matching the allocation strategy.
    #[arg(long, value_enum)]
    grouping: Option<GroupingChoice>,
    /// Group boundaries for `--grouping explicit`, e.g. `0,4,16,100`.
    #[arg(long, value_delimiter = ',')]
    boundaries: Vec<usize>,
}

impl GroupingArgs {
    fn build(
        &self,
        profile: &PopularityProfile,
        users: usize,
        strategy: Strategy,
        memory: f64,
    ) -> Result<FileGrouping> {
        let choice = self.grouping.unwrap_or(match strategy {
            Strategy::TwoGroup => GroupingChoice::TwoGroup,
            _ if !self.boundaries.is_empty() => GroupingChoice::Explicit,
            _ => GroupingChoice::FactorTwo,
        });
        if strategy == Strategy::Hpf && self.grouping.is_none() {
            if memory.fract() != 0.0 || memory > profile.len() as f64 {
                return Err(Error::InvalidArgument(format!(
                    "hpf allocation caches whole files; --memory {memory} is not a whole number of files"
                )));
            }
            return FileGrouping::hpf_split(profile, memory as usize);
        }
        match choice {
            GroupingChoice::FactorTwo => Ok(partition_factor_two(profile)),
            GroupingChoice::HeadRelative => Ok(partition_head_relative(profile)),
            GroupingChoice::TwoGroup => partition_two_group(profile, users),
            GroupingChoice::Explicit => {
                if self.boundaries.is_empty() {
                    return Err(Error::InvalidArgument(
                        "--grouping explicit needs --boundaries".into(),
                    ));
                }
                FileGrouping::explicit(profile, self.boundaries.clone())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Evaluator {
    /// Achievable peak rate.
    Peak,
    /// Cut-set lower bound.
    Cutset,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[arg(long = "memory", visible_alias = "M", allow_negative_numbers = true)]
    memory: f64,
    #[arg(long = "files", visible_alias = "N")]
    files: usize,
    /// Number of users (may be fractional for the peak rate).
    #[arg(long = "users", visible_alias = "K", allow_negative_numbers = true)]
    users: f64,
    #[arg(long, value_enum, default_value = "peak")]
    evaluator: Evaluator,
}

#[derive(Debug, Args)]
struct HpfArgs {
    #[command(flatten)]
    popularity: PopularityArgs,
    /// Number of whole files cached by every user.
    #[arg(long = "memory", visible_alias = "M", allow_negative_numbers = true)]
    memory: usize,
    #[arg(long = "users", visible_alias = "K")]
    users: usize,
}

#[derive(Debug, Args)]
struct GroupArgs {
    #[command(flatten)]
    popularity: PopularityArgs,
    #[command(flatten)]
    grouping: GroupingArgs,
    /// Users; only the two-group rule depends on it.
    #[arg(long = "users", visible_alias = "K", default_value_t = 1)]
    users: usize,
}

#[derive(Debug, Args)]
struct AllocateArgs {
    #[command(flatten)]
    popularity: PopularityArgs,
    #[command(flatten)]
    grouping: GroupingArgs,
    #[arg(long = "memory", visible_alias = "M", allow_negative_numbers = true)]
    memory: f64,
    #[arg(long = "users", visible_alias = "K")]
    users: usize,
    /// uniform, optimized, hpf or two_group.
    #[arg(long, default_value = "optimized")]
    allocation: Strategy,
}

#[derive(Debug, Args)]
struct TradeoffArgs {
    #[command(flatten)]
    popularity: PopularityArgs,
    #[arg(long = "users", visible_alias = "K")]
    users: usize,
    /// Comma-separated memory values; defaults to 0, 1, ..., N.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    memory_grid: Vec<f64>,
    /// Schemes to include (comma-separated); defaults to all.
    #[arg(long, value_delimiter = ',')]
    scheme: Vec<Scheme>,
    /// Serve the low-popularity groups by unicast (needs a Zipf exponent above 1).
    #[arg(long)]
    tail_unicast: bool,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    popularity: PopularityArgs,
    #[command(flatten)]
    grouping: GroupingArgs,
    #[arg(long = "memory", visible_alias = "M", allow_negative_numbers = true)]
    memory: f64,
    #[arg(long = "users", visible_alias = "K")]
    users: usize,
    #[arg(long, default_value = "uniform")]
    allocation: Strategy,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Bits per file.
    #[arg(long, default_value_t = 1 << 14)]
    file_bits: usize,
    /// Width of the independently coded file segments.
    #[arg(long, default_value_t = DEFAULT_SEGMENT_BITS)]
    segment_bits: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Append the message list of the first trial.
    #[arg(long)]
    dump_transcript: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CouponArgs {
    #[arg(long = "files", visible_alias = "N")]
    files: usize,
    #[arg(long = "users", visible_alias = "K")]
    users: usize,
}

/// Rounds to 12 significant digits and prints the shortest form of the result.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                2
            } else {
                let _ = write!(out, "{e}");
                0
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(output) => match output {
            Output::Stdout(text) => match out.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: writing output: {e}");
                    2
                }
            },
            Output::File(path, text) => match fs::write(&path, text) {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                    2
                }
            },
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_internal() {
                3
            } else {
                2
            }
        }
    }
}

enum Output {
    Stdout(String),
    File(PathBuf, String),
}

fn to(path: Option<PathBuf>, text: String) -> Output {
    match path {
        Some(p) => Output::File(p, text),
        None => Output::Stdout(text),
    }
}

fn execute(command: Command) -> Result<Output> {
    match command {
        Command::Rate(a) => cmd_rate(a),
        Command::Hpf(a) => cmd_hpf(a),
        Command::Group(a) => cmd_group(a),
        Command::Allocate(a) => cmd_allocate(a),
        Command::Tradeoff(a) => cmd_tradeoff(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Coupon(a) => cmd_coupon(a),
    }
}

fn cmd_rate(a: RateArgs) -> Result<Output> {
    let v = match a.evaluator {
        Evaluator::Peak => peak_rate(a.memory, a.files, a.users)?,
        Evaluator::Cutset => {
            if a.users.fract() != 0.0 || a.users < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "the cut-set bound needs a whole number of users, got {}",
                    a.users
                )));
            }
            if a.memory.is_nan() || a.memory < 0.0 || a.files == 0 {
                return Err(Error::InvalidArgument("need M >= 0 and N >= 1".into()));
            }
            cutset_lower_bound(a.memory, a.files, a.users as usize)
        }
    };
    Ok(Output::Stdout(format!("{}\n", fmt12(v))))
}

fn cmd_hpf(a: HpfArgs) -> Result<Output> {
    let profile = a.popularity.load()?;
    let uni = hpf_expected_rate(&profile, a.memory, a.users, HpfMode::Unicast)?;
    let multi = hpf_expected_rate(&profile, a.memory, a.users, HpfMode::Multicast)?;
    Ok(Output::Stdout(format!(
        "mode,rate\nunicast,{}\nmulticast,{}\n",
        fmt12(uni),
        fmt12(multi)
    )))
}

fn cmd_group(a: GroupArgs) -> Result<Output> {
    let profile = a.popularity.load()?;
    let grouping = a.grouping.build(&profile, a.users, Strategy::Uniform, 0.0)?;
    let mut text = String::from("group,start,end,size,mass\n");
    for l in 0..grouping.num_groups() {
        let r = grouping.files(l);
        text.push_str(&format!(
            "{l},{},{},{},{}\n",
            r.start,
            r.end,
            r.len(),
            fmt12(grouping.mass(l))
        ));
    }
    Ok(Output::Stdout(text))
}

fn cmd_allocate(a: AllocateArgs) -> Result<Output> {
    let profile = a.popularity.load()?;
    let grouping = a.grouping.build(&profile, a.users, a.allocation, a.memory)?;
    let alloc = optimize_allocation(&grouping, a.memory, a.users, a.allocation)?;
    let laws = GroupUserLaws::new(&grouping, a.users);
    let mut text = String::from("group,size,mass,memory,expected_rate\n");
    for (l, &m) in alloc.budgets().iter().enumerate() {
        text.push_str(&format!(
            "{l},{},{},{},{}\n",
            grouping.size(l),
            fmt12(grouping.mass(l)),
            fmt12(m),
            fmt12(laws.expected_rate(l, m))
        ));
    }
    let total = grouped_expected_rate_exact(&grouping, &alloc, a.users)?;
    text.push_str(&format!(
        "total,{},1,{},{}\n",
        grouping.num_files(),
        fmt12(alloc.total()),
        fmt12(total)
    ));
    Ok(Output::Stdout(text))
}

/// Renders a curve as CSV with header `M,<scheme>...`.
pub fn curve_csv(curve: &TradeoffCurve) -> String {
    let mut text = String::from("M");
    for s in &curve.schemes {
        text.push(',');
        text.push_str(s.name());
    }
    text.push('\n');
    for p in &curve.points {
        text.push_str(&fmt12(p.memory));
        for s in &curve.schemes {
            text.push(',');
            text.push_str(&fmt12(p.rates[s]));
        }
        text.push('\n');
    }
    text
}

fn cmd_tradeoff(a: TradeoffArgs) -> Result<Output> {
    let profile = a.popularity.load()?;
    let grid = if a.memory_grid.is_empty() {
        (0..=profile.len()).map(|m| m as f64).collect()
    } else {
        a.memory_grid.clone()
    };
    let schemes = if a.scheme.is_empty() {
        Scheme::ALL.to_vec()
    } else {
        a.scheme.clone()
    };
    let mut options = CurveOptions::default();
    if a.tail_unicast {
        let alpha = a.popularity.alpha().ok_or_else(|| {
            Error::InvalidArgument("--tail-unicast needs --alpha or --head-tail".into())
        })?;
        let cutoff = unicast_tail_cutoff(&profile, alpha, a.users)?;
        options.unicast_tail = Some(cutoff);
    }
    let curve = tradeoff_curve(&profile, a.users, &grid, &schemes, options)?;
    Ok(to(a.output, curve_csv(&curve)))
}

fn cmd_simulate(a: SimulateArgs) -> Result<Output> {
    let profile = a.popularity.load()?;
    let grouping = a.grouping.build(&profile, a.users, a.allocation, a.memory)?;
    let alloc = optimize_allocation(&grouping, a.memory, a.users, a.allocation)?;
    let params = SimParams {
        file_bits: a.file_bits,
        library_seed: a.seed,
        segment_bits: a.segment_bits,
        verify: true,
    };
    let summary = simulate_expected_rate(
        &params, &profile, &grouping, &alloc, a.users, a.trials, a.seed,
    )?;
    let effective = effective_allocation(&grouping, &alloc, a.file_bits)?;
    let analytic = grouped_expected_rate_exact(&grouping, &effective, a.users)?;
    let gap = if analytic > 0.0 {
        (summary.mean - analytic) / analytic
    } else {
        0.0
    };
    let xor: usize = summary.trials.iter().map(|t| t.xor_groups).sum();
    let parity: usize = summary.trials.iter().map(|t| t.parity_groups).sum();
    let mut text = String::from("quantity,value\n");
    for (k, v) in [
        ("trials", a.trials.to_string()),
        ("file_bits", a.file_bits.to_string()),
        ("seed", a.seed.to_string()),
        ("mean_rate", fmt12(summary.mean)),
        ("half_width_95", fmt12(summary.half_width)),
        ("analytic_rate", fmt12(analytic)),
        ("relative_gap", fmt12(gap)),
        ("xor_deliveries", xor.to_string()),
        ("parity_deliveries", parity.to_string()),
    ] {
        text.push_str(&format!("{k},{v}\n"));
    }
    if a.dump_transcript {
        let library = Library::generate(profile.len(), a.file_bits, a.seed)?;
        let (_, demand, transcript) =
            trial_transcript(&library, &profile, &grouping, &alloc, a.users, &params, a.seed, 0)?;
        text.push('\n');
        let requests: Vec<String> = demand.as_slice().iter().map(|d| d.to_string()).collect();
        text.push_str(&format!("# demand {}\n", requests.join(",")));
        text.push_str(&transcript.dump());
    }
    Ok(to(a.output, text))
}

fn cmd_coupon(a: CouponArgs) -> Result<Output> {
    let dist = distinct_count_distribution(a.files, a.users)?;
    let check = coupon_bound_check(a.files, a.users)?;
    let mut text = String::from("distinct,probability,tail\n");
    for j in 1..=dist.pmf.len() {
        text.push_str(&format!("{j},{},{}\n", fmt12(dist.prob(j)), fmt12(dist.tail(j))));
    }
    text.push_str(&format!(
        "\ns_star,tail_probability,holds\n{},{},{}\n",
        check.s_star,
        fmt12(check.probability),
        check.holds
    ));
    Ok(Output::Stdout(text))
}

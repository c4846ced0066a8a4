mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use padic_rigid::Error;

#[derive(Parser, Debug)]
#[command(name = "padic-rigid", version, about = "Finite-precision p-adic constructions and checks")]
pub struct Cli {
    /// Root seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Working precision N (digits mod p^N); each command has its own default.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub precision: Option<u32>,

    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw random p-adic numbers, trees, vectors and supported elements.
    #[command(subcommand)]
    Sample(SampleCmd),
    /// Search for a low-height relation among p-adic values.
    Independence(IndependenceArgs),
    /// Build and probe the labelled module construction.
    #[command(subcommand)]
    Corner(CornerCmd),
    /// Run the freeness pipeline on nearly uniform samples.
    FreeCheck(FreeCheckArgs),
    /// Realize a ring as an endomorphism ring, pair by pair.
    #[command(subcommand)]
    Zassenhaus(ZassenhausCmd),
    /// Density of primes modulo which a polynomial has a root.
    Density(DensityArgs),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Mc(McCmd),
    /// Run the acceptance criteria.
    Acceptance(AcceptanceArgs),
}

#[derive(Subcommand, Debug)]
pub enum SampleCmd {
    /// Uniform element of Z/p^N.
    Uniform {
        #[arg(long, default_value_t = 5)]
        p: u64,
    },
    /// Random tree of digits with every branch value.
    Tree {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 4)]
        depth: u32,
    },
    /// Value of one branch, given as a 0/1 string.
    Branch {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long)]
        branch: String,
    },
    /// Nearly uniform vector at precision N.
    NearlyUniform {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
    },
    /// Supported elements a_n with one entry per label.
    Supported {
        #[arg(long, default_value_t = 5)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value = "0,1,2")]
        labels: String,
        #[arg(long)]
        window: Option<usize>,
    },
}

#[derive(Args, Debug)]
pub struct IndependenceArgs {
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// Comma-separated integers, reduced mod p^N.
    #[arg(long, conflicts_with = "branches")]
    pub values: Option<String>,
    /// Use this many branch values of one random tree instead of --values.
    #[arg(long)]
    pub branches: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 10)]
    pub height: u64,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Saved model from `corner build`; built from the flags below otherwise.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Ring file or bundled ring name.
    #[arg(long, default_value = "integers")]
    pub ring: String,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    #[arg(long, default_value_t = 8)]
    pub cap: u32,
    #[arg(long, default_value_t = 10)]
    pub height: u64,
    #[arg(long, default_value_t = 3)]
    pub module_rank: usize,
    #[arg(long, default_value = "0,1,2")]
    pub labels: String,
    #[arg(long, default_value_t = 2)]
    pub generators_per_label: usize,
}

#[derive(Subcommand, Debug)]
pub enum CornerCmd {
    /// Build a model and print it.
    Build(ModelArgs),
    /// Decide membership of a vector in G^A.
    Member {
        #[command(flatten)]
        model: ModelArgs,
        /// Label subset A, comma-separated.
        #[arg(long = "set", default_value = "")]
        set: String,
        /// Sparse vector `index:value,...`.
        #[arg(long, conflicts_with = "generator")]
        vector: Option<String>,
        /// Position of a generator of the model.
        #[arg(long)]
        generator: Option<usize>,
    },
    /// Apply an additive map to G^A and test the image against G^D.
    Rigidity {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "from", default_value = "0")]
        from: String,
        #[arg(long = "to", default_value = "0")]
        to: String,
        /// `random`, `identity`, or `mult:c0,c1,...` for a ring element.
        #[arg(long, default_value = "random")]
        map: String,
    },
}

#[derive(Args, Debug)]
pub struct FreeCheckArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 8)]
    pub rank_window: usize,
    #[arg(long, default_value_t = 3)]
    pub num_random: usize,
    #[arg(long, default_value_t = 1.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Denominator cap K; defaults to ceil(N/2).
    #[arg(long)]
    pub cap: Option<u32>,
}

#[derive(Subcommand, Debug)]
pub enum ZassenhausCmd {
    Realize {
        /// Ring file or bundled ring name.
        #[arg(long)]
        ring: String,
        /// Pairs file (`[{"a": [..], "e": [..]}, ..]`) or `auto`.
        #[arg(long, default_value = "auto")]
        pairs: String,
        #[arg(long, default_value_t = 10_000)]
        budget: u64,
        #[arg(long = "box", default_value_t = 3)]
        box_bound: u64,
        #[arg(long)]
        deterministic_only: bool,
    },
}

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long)]
    pub poly: String,
    #[arg(long, default_value_t = 100_000)]
    pub bound: u64,
}

#[derive(Subcommand, Debug)]
pub enum McCmd {
    /// Invertibility of a uniform n x n matrix over F_q.
    Gl {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Any registered experiment, e.g. `containment:p=2,k=2,n=4,alpha=1.5`.
    Run {
        #[arg(long)]
        experiment: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
}

#[derive(Args, Debug)]
pub struct AcceptanceArgs {
    /// `all`, or criterion names or numbers, comma-separated.
    #[arg(default_value = "all")]
    pub suite: String,
}

/// Failure of one invocation, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidParameter(_) | Error::UnknownExperiment(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("PADIC_RIGID_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("PADIC_RIGID_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Domain(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| commands::run(&cli));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod run;

/// Algebraic geometry over finite algebras and finite representations.
#[derive(Debug, Parser)]
#[command(name = "algeo", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit line-oriented `key: value` output.
    #[arg(long, global = true)]
    pub report: bool,
    /// Output format; `dot` is accepted by `lattice` only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest affine space or representation point space.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_points: usize,
    /// Largest number of enumerated terms.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_terms: usize,
    /// Largest number of candidate systems in `equiv`.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_systems: usize,
    /// Largest generated subalgebra, product or brute-force map space.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_elements: usize,
    /// Largest constructed group in `rep-triangular` and `rep-wreath`.
    #[arg(long, global = true, default_value_t = 2_048)]
    pub max_group_order: usize,
    /// Largest space whose subsets `lattice --mode exhaustive` may test.
    #[arg(long, global = true, default_value_t = 16)]
    pub max_exhaustive_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exhaustive,
    Generators,
    Auto,
}

#[derive(Debug, Args)]
pub struct Space {
    /// Algebra file.
    #[arg(long)]
    pub algebra: PathBuf,
    /// Number of variables `n` of the affine space `H^n`.
    #[arg(long)]
    pub vars: usize,
}

#[derive(Debug, Args)]
pub struct RepSpace {
    /// Representation file.
    #[arg(long)]
    pub rep: PathBuf,
    /// Number of module variables.
    #[arg(long)]
    pub xvars: usize,
    /// Number of group variables.
    #[arg(long, default_value_t = 0)]
    pub yvars: usize,
    /// File of action terms, one per line; each is read as `term ≡ 0`.
    #[arg(long)]
    pub terms: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the solution set of a system.
    Solve {
        #[command(flatten)]
        space: Space,
        /// System file; omitted means the empty system.
        #[arg(long)]
        system: Option<PathBuf>,
    },
    /// Print the least algebraic set containing a set of points.
    ClosureSet {
        #[command(flatten)]
        space: Space,
        /// Point file, one `(a1,...,an)` per line.
        #[arg(long)]
        points: PathBuf,
    },
    /// Decide whether a pair lies in the closure of a system.
    ClosurePair {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        system: Option<PathBuf>,
        /// The pair, written `lhs = rhs`.
        #[arg(long)]
        pair: String,
    },
    /// Decide whether a set of points is algebraic.
    Algebraic {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        points: PathBuf,
    },
    /// Enumerate the lattice of algebraic sets.
    Lattice {
        #[command(flatten)]
        space: Space,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Bounded geometric-equivalence test and separation criterion.
    Equiv {
        /// The two algebra files.
        #[arg(long = "algebra", num_args = 1, required = true)]
        algebras: Vec<PathBuf>,
        /// Largest number of variables searched.
        #[arg(long, default_value_t = 1)]
        vars: usize,
        /// Largest term height.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        /// Largest number of equations per candidate system.
        #[arg(long, default_value_t = 1)]
        system_limit: usize,
    },
    /// List the identities of an algebra among terms up to a height.
    Identities {
        #[command(flatten)]
        space: Space,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Decide a quasi-identity `premises => conclusion`.
    Quasi {
        #[command(flatten)]
        space: Space,
        /// Premises as a system file.
        #[arg(long)]
        system: Option<PathBuf>,
        /// Conclusion, written `lhs = rhs`.
        #[arg(long)]
        conclusion: String,
    },
    /// Shrink a system to an irredundant subsystem with the same solutions.
    Reduce {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        system: PathBuf,
    },
    /// Pull a closed system back along a substitution.
    Pullback {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        system: Option<PathBuf>,
        /// Substitution file: line `i` is the image of `y_i`, a term in the
        /// variables of the target space.
        #[arg(long)]
        substitution: PathBuf,
        /// A pair over the source variables, written with `x` variables.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Print the solution set of an action-type system.
    RepSolve {
        #[command(flatten)]
        space: RepSpace,
    },
    /// Decide whether an action term vanishes on the solutions of a system.
    RepClosure {
        #[command(flatten)]
        space: RepSpace,
        /// The candidate action term.
        #[arg(long)]
        term: String,
    },
    /// Build the triangular product of two representations.
    RepTriangular {
        /// The two representation files.
        #[arg(long = "rep", num_args = 1, required = true)]
        reps: Vec<PathBuf>,
    },
    /// Build the wreath product of a representation with a group.
    RepWreath {
        #[arg(long)]
        rep: PathBuf,
        /// Group file: `group N` followed by the table.
        #[arg(long)]
        group: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("algeo: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

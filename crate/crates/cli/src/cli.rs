//! Argument parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(name = "quantclass", version, about = "Invariants, decompositions and interpretability checks for relations and quantifier families")]
pub struct Cli {
    /// Largest family or subset enumeration a search may materialize.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub max_family: u64,
    /// Largest estimated number of elementary steps of one search.
    #[arg(long, global = true, default_value_t = 2_000_000_000)]
    pub max_work: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

/// A relation read from a file.
#[derive(Debug, Args)]
pub struct RelArgs {
    pub file: PathBuf,
    /// Name of the structure in the file.
    #[arg(long)]
    pub rel: String,
}

/// The universe and fixed parameter relations.
#[derive(Debug, Args)]
pub struct Context {
    /// Relation file whose structures become parameters.
    pub file: Option<PathBuf>,
    /// Universe size, needed when no file is given.
    #[arg(long)]
    pub universe: Option<u32>,
    /// A named family `NAME=SPEC` for second-order quantifiers.
    #[arg(long = "family", value_name = "NAME=SPEC")]
    pub families: Vec<String>,
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    /// File holding the formula.
    #[arg(long, conflicts_with = "formula", required_unless_present = "formula")]
    pub phi: Option<PathBuf>,
    /// The formula itself.
    #[arg(long)]
    pub formula: Option<String>,
}

#[derive(Debug, Args)]
pub struct InterpArgs {
    #[command(flatten)]
    pub context: Context,
    #[command(flatten)]
    pub phi: FormulaArgs,
    /// Free element variables, defaults to x0, x1, ...
    #[arg(long, value_delimiter = ',')]
    pub vars: Vec<String>,
    /// The interpreted family.
    #[arg(long)]
    pub k1: String,
    /// Witness families, one per arity used.
    #[arg(long, required = true)]
    pub k2: Vec<String>,
    /// List every member with its witnesses.
    #[arg(long)]
    pub entries: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Mon,
    Inj,
    System,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// λ'₀, λ₀ and λ₁ of a relation, with witnesses.
    Invariants(RelArgs),
    /// A core relation from which the relation is recovered.
    Decompose {
        #[command(flatten)]
        rel: RelArgs,
        #[arg(long, value_enum)]
        kind: Kind,
    },
    /// A definable set of λ₀ elements.
    ExtractMon(RelArgs),
    /// Unary functions encoding a relation outside a set.
    Encode {
        #[command(flatten)]
        rel: RelArgs,
        /// Comma separated elements of the set.
        #[arg(long, default_value = "")]
        set: String,
        /// Write the encoding as a relation file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The relation defined by a formula.
    Eval {
        #[command(flatten)]
        context: Context,
        #[command(flatten)]
        phi: FormulaArgs,
        #[arg(long, value_delimiter = ',')]
        vars: Vec<String>,
    },
    /// Whether a formula defines a family.
    CheckDef {
        #[command(flatten)]
        context: Context,
        #[command(flatten)]
        phi: FormulaArgs,
        #[arg(long)]
        k: String,
    },
    /// Checks a first-order interpretation of one family in another.
    CheckInterp(InterpArgs),
    /// Like check-interp, allowing second-order quantifiers in the formula.
    CheckExp(InterpArgs),
    /// Searches a bounded space of formulas for an interpretation.
    SearchInterp {
        #[command(flatten)]
        context: Context,
        #[arg(long)]
        k1: String,
        #[arg(long)]
        k2: String,
        #[arg(long, default_value_t = 2)]
        max_witnesses: usize,
        #[arg(long, default_value_t = 0)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        #[arg(long, default_value_t = 0)]
        max_so_depth: usize,
        #[arg(long)]
        entries: bool,
    },
    /// Chains two interpretations.
    Compose {
        #[command(flatten)]
        context: Context,
        #[arg(long, conflicts_with = "formula12", required_unless_present = "formula12")]
        phi12: Option<PathBuf>,
        #[arg(long)]
        formula12: Option<String>,
        #[arg(long, conflicts_with = "formula23", required_unless_present = "formula23")]
        phi23: Option<PathBuf>,
        #[arg(long)]
        formula23: Option<String>,
        #[arg(long, value_delimiter = ',')]
        vars12: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        vars23: Vec<String>,
        #[arg(long)]
        k1: String,
        #[arg(long)]
        k2: String,
        #[arg(long, required = true)]
        k3: Vec<String>,
        #[arg(long)]
        entries: bool,
    },
    /// Counts or lists the members of a family.
    Family {
        spec: String,
        #[command(flatten)]
        context: Context,
        #[arg(long)]
        list: bool,
    },
}

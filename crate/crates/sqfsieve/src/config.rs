//! Resolved run configuration shared by the CLI and library callers.

use std::path::PathBuf;

use num_rational::BigRational;
use sqfsieve_core::arithstat::{InfiniteCondition, LocalCondition, QuadraticWeight, Sign, Variant};
use sqfsieve_core::geosieve::Equation;
use sqfsieve_core::localdensity::Method;
use sqfsieve_core::{Family, FormVector, DEFAULT_BUDGET, DEFAULT_SEED};

/// Environment variable naming the cache directory when no flag is given.
pub const CACHE_ENV: &str = "SQFSIEVE_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            _ => Err(format!("unknown format '{s}' (json, csv, table)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveKind {
    F3Reduce,
    F4Reduce,
    G3Node,
    G2Witness,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::F3Reduce => "f3-reduce",
            MoveKind::F4Reduce => "f4-reduce",
            MoveKind::G3Node => "g3-node",
            MoveKind::G2Witness => "g2-witness",
        }
    }

    /// Family the move acts on.
    pub fn family(self) -> Family {
        match self {
            MoveKind::F3Reduce => Family::F3,
            MoveKind::F4Reduce => Family::F4,
            MoveKind::G3Node => Family::G3,
            MoveKind::G2Witness => Family::G2,
        }
    }
}

impl std::str::FromStr for MoveKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "f3-reduce" | "f3" => Ok(MoveKind::F3Reduce),
            "f4-reduce" | "f4" => Ok(MoveKind::F4Reduce),
            "g3-node" | "g3" => Ok(MoveKind::G3Node),
            "g2-witness" | "g2" => Ok(MoveKind::G2Witness),
            _ => Err(format!("unknown move '{s}' (f3-reduce, f4-reduce, g3-node, g2-witness)")),
        }
    }
}

/// Which constant table `constants` prints.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstantKind {
    Zeta { s: u32 },
    Thm11 { variant: Variant },
    Cor12 { cutoff: u64 },
    SigmaLimit {
        inf: InfiniteCondition,
        overrides: Vec<(u64, BigRational)>,
        weight: QuadraticWeight,
    },
    Unramified { sign: Sign },
    CohenLenstra { group: Vec<u64>, sign: Sign },
    Aut { group: Vec<u64> },
    R2,
    /// Limit of the squarefree density of binary cubic discriminants.
    F3Density,
}

/// Whether a mass lookup goes through the closed form or the étale tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MassSource {
    Closed(LocalCondition),
    Table { unramified_only: bool },
    Infinite(InfiniteCondition),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Disc { form: FormVector },
    Cp { family: Family, primes: Vec<u64>, method: Method, samples: u64 },
    Density { family: Family, n: u64, cutoff: u64, trial_bound: u64, samples: Option<u64> },
    Tail { family: Family, r: u64, ms: Vec<u64>, skew: Option<Vec<BigRational>> },
    Variety { family: Family, rs: Vec<u64>, equations: Vec<Equation> },
    Histogram { family: Family, n: u64, primes: Vec<u64> },
    Move { kind: MoveKind, p: u64, form: Option<FormVector>, samples: u64, bound: i64 },
    Embed { form: Option<FormVector>, samples: u64, bound: i64 },
    Mass { n: u32, primes: Vec<u64>, source: MassSource },
    Constants { kind: ConstantKind, n: u32 },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Disc { .. } => "disc",
            Command::Cp { .. } => "cp",
            Command::Density { .. } => "density",
            Command::Tail { .. } => "tail",
            Command::Variety { .. } => "variety",
            Command::Histogram { .. } => "histogram",
            Command::Move { .. } => "move",
            Command::Embed { .. } => "embed",
            Command::Mass { .. } => "mass",
            Command::Constants { .. } => "constants",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub budget: u64,
    pub threads: usize,
    /// `None` disables the local-density cache.
    pub cache_dir: Option<PathBuf>,
    /// `None` selects the command's default: a bare value where one exists, JSON otherwise.
    pub format: Option<Format>,
    /// Decimal digits for real constants.
    pub precision: u32,
    /// Record wall-clock seconds in reports. Off by default so that output is reproducible.
    pub timing: bool,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            seed: DEFAULT_SEED,
            budget: DEFAULT_BUDGET,
            threads: default_threads(),
            cache_dir: None,
            format: None,
            precision: 20,
            timing: false,
        }
    }
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

/// Flag beats environment; `no_cache` beats both.
pub fn resolve_cache_dir(flag: Option<PathBuf>, no_cache: bool) -> Option<PathBuf> {
    if no_cache {
        return None;
    }
    flag.or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

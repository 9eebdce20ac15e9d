//! `sqfsieve` command-line tool.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use sqfsieve_core::arith::primes_up_to;
use sqfsieve_core::arithstat::{InfiniteCondition, LocalCondition, QuadraticWeight, Sign, Variant};
use sqfsieve_core::forms::parse_rational;
use sqfsieve_core::geosieve::{Equation, DEFAULT_TRIAL_BOUND};
use sqfsieve_core::localdensity::Method;
use sqfsieve_core::{Family, DEFAULT_BUDGET, DEFAULT_SEED};

use sqfsieve::config::{default_threads, resolve_cache_dir, ConstantKind, MassSource, MoveKind};
use sqfsieve::run::parse_form;
use sqfsieve::{execute, Command, Format, RunConfig, RunError};

#[derive(Parser, Debug)]
#[command(name = "sqfsieve", version, about = "Squarefree values of discriminant polynomials: local densities, box sieves, moves and constants")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    /// Family id (W1, F3, G2, G3, F4, G4); a positional family wins.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Box radius N.
    #[arg(long = "N", global = true)]
    big_n: Option<u64>,
    /// Prime p (repeat or comma-separate for several).
    #[arg(long, global = true, value_delimiter = ',')]
    p: Vec<u64>,
    /// Prime cutoff P.
    #[arg(long, global = true)]
    cutoff: Option<u64>,
    /// Tail thresholds M.
    #[arg(long = "M", global = true, value_delimiter = ',')]
    big_m: Vec<u64>,
    /// Box radius r (repeat or comma-separate for several).
    #[arg(long, global = true, value_delimiter = ',')]
    r: Vec<u64>,
    /// Sample count for Monte Carlo runs and batch checks.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Degree n for field-count constants and masses.
    #[arg(long, global = true)]
    n: Option<u32>,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED, value_parser = parse_u64)]
    seed: u64,
    /// Maximum residues or lattice points a single scan may visit.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Local-density cache directory (overrides SQFSIEVE_CACHE).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Disable the local-density cache.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Decimal digits for real constants.
    #[arg(long, global = true, default_value_t = 20)]
    precision: u32,
    /// Include wall-clock seconds in reports.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the discriminant of a form: `disc f3 0,1,1,0` or `disc F3:0,1,1,0`.
    Disc {
        #[arg(num_args = 1..=2, required = true)]
        args: Vec<String>,
    },
    /// Local counts c_p of residues mod p² with p² | f.
    Cp {
        family: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Hensel)]
        method: MethodArg,
    },
    /// Squarefree density over [−N, N]^m with the finite Euler product for comparison.
    Density {
        family: Option<String>,
        /// Trial-division bound for squarefree tests (at least the prime cutoff).
        #[arg(long)]
        trial_bound: Option<u64>,
    },
    /// Counts of box points with p² | f for some prime p > M.
    Tail {
        family: Option<String>,
        /// Skew vector t with product 1, comma-separated rationals.
        #[arg(long, value_delimiter = ',')]
        skew: Option<Vec<String>>,
    },
    /// Lattice points on the variety cut out by the given equations.
    Variety {
        family: Option<String>,
        #[arg(long = "eq", value_enum, value_delimiter = ',', default_value = "disc")]
        equations: Vec<EquationArg>,
    },
    /// Box counts of strong and weak multiples of p².
    Histogram { family: Option<String> },
    /// Apply one reduction move to a form, or check it on sampled instances.
    Move {
        #[arg(value_parser = parse_move)]
        kind: MoveKind,
        form: Option<String>,
        /// Coefficient bound for sampled instances.
        #[arg(long, default_value_t = 30)]
        bound: i64,
    },
    /// The g2 → f4 embedding and its discriminant identity.
    Embed {
        form: Option<String>,
        #[arg(long, default_value_t = 100)]
        bound: i64,
    },
    /// Local masses of étale algebras.
    Mass {
        #[arg(long, value_enum, default_value_t = MassArg::Sqf)]
        condition: MassArg,
    },
    /// Field-count constants and related tables.
    Constants {
        #[arg(value_enum)]
        which: ConstantArg,
        #[arg(long, value_enum, default_value_t = VariantArg::Sqf)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = SignArg::Plus)]
        sign: SignArg,
        /// Abelian group as cyclic factor orders, e.g. `3` or `2,2`.
        #[arg(long, value_delimiter = ',')]
        group: Vec<u64>,
        /// Argument of zeta.
        #[arg(long, default_value_t = 3)]
        s: u32,
        #[arg(long, value_enum, default_value_t = InfArg::All)]
        inf: InfArg,
        /// Local mass override `p=mass`, repeatable.
        #[arg(long = "mass")]
        masses: Vec<String>,
        /// Count quadratic fields with weight 1 instead of ½.
        #[arg(long)]
        unweighted: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    Bruteforce,
    Hensel,
    Montecarlo,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EquationArg {
    Disc,
    LastPartial,
    PencilDegenerate,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MassArg {
    Sqf,
    Fund,
    Simple,
    Table,
    TableUnramified,
    Infinite,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ConstantArg {
    Zeta,
    Thm11,
    Cor12,
    Sigmalimit,
    Unramified,
    CohenLenstra,
    Aut,
    R2,
    F3Density,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VariantArg {
    Sqf,
    Fund,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SignArg {
    Plus,
    Minus,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum InfArg {
    All,
    TotallyReal,
    OneComplex,
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let s = s.trim();
    match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    }
    .map_err(|e| e.to_string())
}

fn parse_move(s: &str) -> Result<MoveKind, String> {
    s.parse()
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn family_of(positional: Option<&str>, g: &Global) -> Result<Family, RunError> {
    let id = positional.or(g.family.as_deref()).ok_or_else(|| usage("a family is required (positional or --family)"))?;
    Ok(id.parse()?)
}

fn single_p(g: &Global) -> Result<u64, RunError> {
    match g.p.as_slice() {
        [p] => Ok(*p),
        [] => Err(usage("--p is required")),
        _ => Err(usage("a single --p is expected")),
    }
}

fn build_command(cmd: Cmd, g: &Global) -> Result<Command, RunError> {
    Ok(match cmd {
        Cmd::Disc { args } => {
            let (fam, text) = match args.as_slice() {
                [text] => (g.family.as_deref().map(str::parse).transpose()?, text.as_str()),
                [fam, text] => (Some(fam.parse()?), text.as_str()),
                _ => unreachable!("clap bounds the argument count"),
            };
            Command::Disc { form: parse_form(fam, text)? }
        }
        Cmd::Cp { family, method } => {
            let family = family_of(family.as_deref(), g)?;
            let primes = if !g.p.is_empty() {
                g.p.clone()
            } else if let Some(c) = g.cutoff {
                primes_up_to(c)
            } else {
                return Err(usage("give --p or --cutoff"));
            };
            let method = match method {
                MethodArg::Bruteforce => Method::BruteForce,
                MethodArg::Hensel => Method::Hensel,
                MethodArg::Montecarlo => Method::MonteCarlo,
            };
            Command::Cp { family, primes, method, samples: g.samples.unwrap_or(1_000_000) }
        }
        Cmd::Density { family, trial_bound } => {
            let cutoff = g.cutoff.unwrap_or(50);
            Command::Density {
                family: family_of(family.as_deref(), g)?,
                n: g.big_n.unwrap_or(30),
                cutoff,
                trial_bound: trial_bound.unwrap_or(DEFAULT_TRIAL_BOUND.max(cutoff)),
                samples: g.samples,
            }
        }
        Cmd::Tail { family, skew } => {
            let r = match g.r.as_slice() {
                [r] => *r,
                [] => 40,
                _ => return Err(usage("tail takes a single --r")),
            };
            let ms = if g.big_m.is_empty() { vec![5, 10, 20, 40] } else { g.big_m.clone() };
            let skew = skew
                .map(|v| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<BigRational>, _>>())
                .transpose()?;
            Command::Tail { family: family_of(family.as_deref(), g)?, r, ms, skew }
        }
        Cmd::Variety { family, equations } => Command::Variety {
            family: family_of(family.as_deref(), g)?,
            rs: if g.r.is_empty() { vec![5, 10, 20] } else { g.r.clone() },
            equations: equations
                .into_iter()
                .map(|e| match e {
                    EquationArg::Disc => Equation::Disc,
                    EquationArg::LastPartial => Equation::LastPartial,
                    EquationArg::PencilDegenerate => Equation::PencilDegenerate,
                })
                .collect(),
        },
        Cmd::Histogram { family } => Command::Histogram {
            family: family_of(family.as_deref(), g)?,
            n: g.big_n.unwrap_or(30),
            primes: if g.p.is_empty() { primes_up_to(g.cutoff.unwrap_or(7)) } else { g.p.clone() },
        },
        Cmd::Move { kind, form, bound } => Command::Move {
            kind,
            p: single_p(g)?,
            form: form.map(|f| parse_form(Some(kind.family()), &f)).transpose()?,
            samples: g.samples.unwrap_or(1000),
            bound,
        },
        Cmd::Embed { form, bound } => Command::Embed {
            form: form.map(|f| parse_form(Some(Family::G2), &f)).transpose()?,
            samples: g.samples.unwrap_or(100_000),
            bound,
        },
        Cmd::Mass { condition } => {
            let n = g.n.ok_or_else(|| usage("--n is required"))?;
            let primes = if !g.p.is_empty() { g.p.clone() } else { primes_up_to(g.cutoff.unwrap_or(11)) };
            let source = match condition {
                MassArg::Sqf => MassSource::Closed(LocalCondition::SqfDisc),
                MassArg::Fund => MassSource::Closed(LocalCondition::FundDisc),
                MassArg::Simple => MassSource::Closed(LocalCondition::AllSimplyRamified),
                MassArg::Table => MassSource::Table { unramified_only: false },
                MassArg::TableUnramified => MassSource::Table { unramified_only: true },
                MassArg::Infinite => MassSource::Infinite(InfiniteCondition::All),
            };
            Command::Mass { n, primes, source }
        }
        Cmd::Constants { which, variant, sign, group, s, inf, masses, unweighted } => {
            let sign = match sign {
                SignArg::Plus => Sign::Plus,
                SignArg::Minus => Sign::Minus,
            };
            let needs_group = || if group.is_empty() { Err(usage("--group is required")) } else { Ok(group.clone()) };
            let kind = match which {
                ConstantArg::Zeta => ConstantKind::Zeta { s },
                ConstantArg::Thm11 => ConstantKind::Thm11 {
                    variant: match variant {
                        VariantArg::Sqf => Variant::Sqf,
                        VariantArg::Fund => Variant::Fund,
                    },
                },
                ConstantArg::Cor12 => ConstantKind::Cor12 { cutoff: g.cutoff.unwrap_or(1_000_000) },
                ConstantArg::Sigmalimit => ConstantKind::SigmaLimit {
                    inf: match inf {
                        InfArg::All => InfiniteCondition::All,
                        InfArg::TotallyReal => InfiniteCondition::TotallyReal,
                        InfArg::OneComplex => InfiniteCondition::OneComplexPlace,
                    },
                    overrides: masses.iter().map(|m| parse_override(m)).collect::<Result<_, _>>()?,
                    weight: if unweighted { QuadraticWeight::Unweighted } else { QuadraticWeight::AutWeighted },
                },
                ConstantArg::Unramified => ConstantKind::Unramified { sign },
                ConstantArg::CohenLenstra => ConstantKind::CohenLenstra { group: needs_group()?, sign },
                ConstantArg::Aut => ConstantKind::Aut { group: needs_group()? },
                ConstantArg::R2 => ConstantKind::R2,
                ConstantArg::F3Density => ConstantKind::F3Density,
            };
            Command::Constants { kind, n: g.n.unwrap_or(3) }
        }
    })
}

fn parse_override(s: &str) -> Result<(u64, BigRational), RunError> {
    let (p, m) = s.split_once('=').ok_or_else(|| usage(format!("expected p=mass, got '{s}'")))?;
    let p = p.trim().parse().map_err(|_| usage(format!("bad prime in '{s}'")))?;
    Ok((p, parse_rational(m)?))
}

fn config(cli: Cli) -> Result<RunConfig, RunError> {
    let g = cli.global;
    let command = build_command(cli.command, &g)?;
    Ok(RunConfig {
        command,
        seed: g.seed,
        budget: g.budget,
        threads: g.threads.unwrap_or_else(default_threads),
        cache_dir: resolve_cache_dir(g.cache_dir.clone(), g.no_cache),
        format: g.format.map(|f| match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        }),
        precision: g.precision,
        timing: g.timing,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = config(cli).and_then(|cfg| execute(&cfg).map(|r| r.render(cfg.format)));
    match result {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, RunError::Usage(_)) {
                eprintln!("run `sqfsieve --help` for usage");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

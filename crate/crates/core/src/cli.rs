//! Command-line front end. Exit status 0 means yes or success, 1 means a
//! negative answer, 2 means a usage, input or runtime error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::constraints::{first_violation, ConstraintError, ConstraintSet, Substitution};
use crate::equational::AxiomSchema;
use crate::gen::{self, TypeGen};
use crate::matching::{
    extract_valuation, extract_valuation_unary, sat3_to_matching, sat3_to_matching_unary,
    solve_matching_bounded, unary_budget, MatchingBudget, MatchingError, Sat3Instance,
};
use crate::rank1::{rank1_transform, solve_rank1, SetBudget};
use crate::reduction::{
    build_constraints, compile_strategy, play_is_won, word_count, CompileLimits, PlayRecord,
    ReductionError, SolutionPlayer, Variant,
};
use crate::subtyping::{subtype, type_equal};
use crate::tiling::{
    default_horizon, solve_spiral_game, StrategyTree, Tile, TilingError, TilingSystem,
};
use crate::types::{organize, parse_type, ParseError, Type};

/// Environment variable capping the number of components of a compiled
/// substitution's `'alpha` image.
pub const MAX_COMPONENTS_ENV: &str = "ITU_MAX_COMPONENTS";

#[derive(Debug, Parser)]
#[command(name = "itu", version, about = "Intersection type unification toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Ct,
    CtPrime,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Ct => Variant::Standard,
            VariantArg::CtPrime => Variant::OmegaFree,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpoilerArg {
    /// Every Spoiler behaviour, one play each.
    Exhaustive,
    /// Uniformly random tiles (see `--seed`).
    Random,
    /// Always the first tile.
    First,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether the first type is a subtype of the second.
    Subtype { lhs: String, rhs: String },
    /// Decide whether two types are equal.
    Equal { lhs: String, rhs: String },
    /// Print the organized form of a type.
    Organize { ty: String },
    /// Check a substitution file against a constraint file.
    Verify {
        constraints: PathBuf,
        substitution: PathBuf,
    },
    /// Solve a DIMACS 3-SAT file through its matching encoding.
    Match {
        file: PathBuf,
        /// Use the single-constant encoding.
        #[arg(long)]
        unary: bool,
        /// Write the generated constraints here.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Solve a spiral tiling game and print Constructor's strategy.
    SolveGame {
        file: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Emit the constraint system of a tiling system.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ct")]
        variant: VariantArg,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Solve the game and emit the substitution compiled from the strategy.
    CompileStrategy {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "ct")]
        variant: VariantArg,
        #[arg(long)]
        horizon: Option<usize>,
        /// Allow words up to this length in the `'alpha` image.
        #[arg(long)]
        max_length: Option<usize>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Play the game as Constructor from a solution of the constraints.
    Play {
        file: PathBuf,
        substitution: PathBuf,
        #[arg(long, value_enum, default_value = "ct")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "exhaustive")]
        spoiler: SpoilerArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for a rank 1 solution of a constraint file.
    Rank1 {
        constraints: PathBuf,
        #[arg(long, default_value_t = 3)]
        budget_card: usize,
        #[arg(long, default_value_t = 6)]
        budget_depth: usize,
        /// Print the first set-constraint systems instead of solving.
        #[arg(long)]
        systems: Option<usize>,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
    },
    /// Check random instances of every axiom schema.
    Axioms {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{path}: {source}")]
    Constraints {
        path: String,
        source: ConstraintError,
    },
    #[error("{path}: {source}")]
    Tiling { path: String, source: TilingError },
    #[error("{0}")]
    Matching(#[from] MatchingError),
    #[error("{0}")]
    Reduction(#[from] ReductionError),
    #[error("{MAX_COMPONENTS_ENV} must be a positive integer, got `{0}`")]
    BadLimit(String),
    #[error("{0}")]
    Other(String),
}

type Outcome = Result<bool, CliError>;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => out
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn load_constraints(path: &Path) -> Result<ConstraintSet, CliError> {
    ConstraintSet::parse_lenient(&read(path)?).map_err(|source| CliError::Constraints {
        path: path.display().to_string(),
        source,
    })
}

fn load_substitution(path: &Path) -> Result<Substitution, CliError> {
    Substitution::parse(&read(path)?).map_err(|source| CliError::Constraints {
        path: path.display().to_string(),
        source,
    })
}

fn load_tiling(path: &Path) -> Result<TilingSystem, CliError> {
    TilingSystem::parse(&read(path)?).map_err(|source| CliError::Tiling {
        path: path.display().to_string(),
        source,
    })
}

fn yes_no(answer: bool, out: &mut dyn Write) -> Outcome {
    let _ = writeln!(out, "{}", if answer { "yes" } else { "no" });
    Ok(answer)
}

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn tile_names(t: &TilingSystem, word: &[Tile]) -> String {
    if word.is_empty() {
        "(start)".to_string()
    } else {
        t.word_names(word)
    }
}

fn print_strategy(t: &TilingSystem, f: &StrategyTree, out: &mut dyn Write) {
    for (node, d) in f.constructor_moves() {
        let _ = writeln!(out, "{} => {}", tile_names(t, node), t.tile_name(d));
    }
}

fn print_play(t: &TilingSystem, p: &PlayRecord, out: &mut dyn Write) {
    let _ = writeln!(out, "{}: {:?}", tile_names(t, &p.moves), p.outcome);
}

fn compile_limits(max_length: Option<usize>, tiles: usize) -> Result<CompileLimits, CliError> {
    if let Some(len) = max_length {
        return Ok(CompileLimits {
            max_tiles: usize::MAX,
            max_length: len,
        });
    }
    match std::env::var(MAX_COMPONENTS_ENV) {
        Ok(raw) => {
            let cap: u128 = raw
                .trim()
                .parse()
                .ok()
                .filter(|&c| c > 0)
                .ok_or_else(|| CliError::BadLimit(raw.clone()))?;
            let mut len = 0;
            while word_count(tiles, len + 1) <= cap && len < 64 {
                len += 1;
            }
            Ok(CompileLimits {
                max_tiles: usize::MAX,
                max_length: len,
            })
        }
        Err(_) => Ok(CompileLimits::default()),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Outcome {
    match command {
        Command::Subtype { lhs, rhs } => {
            let (l, r) = (parse_type(&lhs)?, parse_type(&rhs)?);
            yes_no(subtype(&l, &r), out)
        }
        Command::Equal { lhs, rhs } => {
            let (l, r) = (parse_type(&lhs)?, parse_type(&rhs)?);
            yes_no(type_equal(&l, &r), out)
        }
        Command::Organize { ty } => {
            let _ = writeln!(out, "{}", organize(&parse_type(&ty)?));
            Ok(true)
        }
        Command::Verify {
            constraints,
            substitution,
        } => {
            let cs = load_constraints(&constraints)?;
            let s = load_substitution(&substitution)?;
            match first_violation(&s, &cs) {
                None => yes_no(true, out),
                Some(i) => {
                    let _ = writeln!(out, "no: violated {}", cs.constraints[i]);
                    Ok(false)
                }
            }
        }
        Command::Match {
            file,
            unary,
            output,
        } => {
            let f = Sat3Instance::parse_dimacs(&read(&file)?)?;
            let (cs, budget) = if unary {
                (sat3_to_matching_unary(&f), unary_budget(f.variables.len()))
            } else {
                (sat3_to_matching(&f), MatchingBudget::default())
            };
            if let Some(p) = &output {
                write_or_print(Some(p), &cs.to_string(), out)?;
            }
            match solve_matching_bounded(&cs, &budget)? {
                Some(s) => {
                    let valuation = if unary {
                        extract_valuation_unary(&s, &f)?
                    } else {
                        extract_valuation(&s, &f)?
                    };
                    let lits: Vec<String> = f
                        .variables
                        .iter()
                        .zip(&valuation)
                        .map(|(v, &b)| if b { v.clone() } else { format!("-{v}") })
                        .collect();
                    let _ = writeln!(out, "satisfiable: {}", lits.join(" "));
                    Ok(true)
                }
                None => {
                    let _ = writeln!(out, "unsatisfiable");
                    Ok(false)
                }
            }
        }
        Command::SolveGame { file, horizon } => {
            let t = load_tiling(&file)?;
            match solve_spiral_game(&t, horizon) {
                Some(sol) => {
                    let _ = writeln!(
                        out,
                        "Constructor wins within {} added tiles",
                        sol.worst_case_added
                    );
                    print_strategy(&t, &sol.strategy, out);
                    Ok(true)
                }
                None => {
                    let h = horizon.unwrap_or_else(|| default_horizon(&t));
                    let _ = writeln!(out, "no winning strategy for Constructor (horizon {h})");
                    Ok(false)
                }
            }
        }
        Command::Reduce {
            file,
            variant,
            output,
        } => {
            let t = load_tiling(&file)?;
            let cs = build_constraints(&t, variant.into())?;
            write_or_print(output.as_deref(), &cs.to_string(), out)?;
            Ok(true)
        }
        Command::CompileStrategy {
            file,
            variant,
            horizon,
            max_length,
            output,
        } => {
            let t = load_tiling(&file)?;
            let Some(sol) = solve_spiral_game(&t, horizon) else {
                let _ = writeln!(out, "no winning strategy for Constructor");
                return Ok(false);
            };
            let limits = compile_limits(max_length, t.tile_count())?;
            let s = compile_strategy(&t, &sol.strategy, variant.into(), &limits)?;
            write_or_print(output.as_deref(), &s.to_string(), out)?;
            Ok(true)
        }
        Command::Play {
            file,
            substitution,
            variant,
            spoiler,
            seed,
        } => {
            let t = load_tiling(&file)?;
            let s = load_substitution(&substitution)?;
            let player = SolutionPlayer::new(&t, &s, variant.into())?;
            let plays = match spoiler {
                SpoilerArg::Exhaustive => player.all_plays()?,
                SpoilerArg::First => vec![player.play(&mut |_| 0)?],
                SpoilerArg::Random => {
                    let mut r = gen::rng(seed);
                    let k = t.tile_count();
                    vec![player.play(&mut |_| r.gen_range(0..k))?]
                }
            };
            for p in &plays {
                print_play(&t, p, out);
            }
            let won = plays.iter().filter(|p| play_is_won(&t, p)).count();
            let _ = writeln!(out, "Constructor won {won} of {} plays", plays.len());
            Ok(won == plays.len())
        }
        Command::Rank1 {
            constraints,
            budget_card,
            budget_depth,
            systems,
            output,
        } => {
            let cs = load_constraints(&constraints)?;
            if let Some(n) = systems {
                for (i, sys) in rank1_transform(&cs).take(n).enumerate() {
                    let omega: Vec<String> =
                        sys.omega_vars.iter().map(|v| format!("'{v}")).collect();
                    let _ = writeln!(out, "# system {} (omega: {})", i + 1, omega.join(" "));
                    let _ = write!(out, "{}", sys.system);
                }
                return Ok(true);
            }
            let budget = SetBudget {
                max_card: budget_card,
                max_depth: budget_depth,
                ..SetBudget::default()
            };
            match solve_rank1(&cs, budget) {
                Some(s) => {
                    write_or_print(output.as_deref(), &s.to_string(), out)?;
                    Ok(true)
                }
                None => {
                    let _ = writeln!(out, "no rank 1 solution within the budget");
                    Ok(false)
                }
            }
        }
        Command::Axioms { trials, seed, jobs } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| CliError::Other(e.to_string()))?;
            let gen = TypeGen::default();
            let reports: Vec<_> = pool.install(|| {
                AxiomSchema::ALL
                    .par_iter()
                    .enumerate()
                    .map(|(i, &schema)| {
                        gen::fuzz_axiom(schema, &gen, trials, seed.wrapping_add(i as u64))
                    })
                    .collect()
            });
            let mut all = true;
            for r in &reports {
                let ok = r.failures.is_empty();
                all &= ok;
                let _ = writeln!(
                    out,
                    "{:<6} {} {}/{}",
                    r.schema.name(),
                    if ok { "pass" } else { "FAIL" },
                    r.trials - r.failures.len(),
                    r.trials
                );
                if let Some(args) = r.failures.first() {
                    let shown: Vec<String> = args.iter().map(Type::to_string).collect();
                    let _ = writeln!(out, "  counterexample: {}", shown.join(" ; "));
                }
            }
            Ok(all)
        }
    }
}

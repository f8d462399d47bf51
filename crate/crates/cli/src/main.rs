mod checks;
mod render;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use orbit_atlas_core::catalog::{load_catalog, Catalog};
use orbit_atlas_core::classify::{classify, parse_point_mod, parse_point_rational, partition_census, DEFAULT_CENSUS_BUDGET};
use orbit_atlas_core::oracle::{enumerate_borel_orbits, jacobian_rank_dim, refine_check, DEFAULT_ORACLE_BUDGET};
use orbit_atlas_core::order::hasse;
use orbit_atlas_core::witness::certify;
use orbit_atlas_core::Error;

#[derive(Parser)]
#[command(name = "orbit-atlas", version, about = "Borel orbits on the nilradical in types A1 to A4")]
struct Cli {
    /// Worker threads for the parallel stages; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Table,
    Csv,
}

#[derive(Args)]
struct RankArg {
    /// Root system: A1, A2, A3 or A4.
    #[arg(long = "type", value_name = "TYPE", value_parser = parse_type)]
    rank: usize,
}

fn parse_type(s: &str) -> Result<usize, String> {
    match s {
        "A1" => Ok(1),
        "A2" => Ok(2),
        "A3" => Ok(3),
        "A4" => Ok(4),
        _ => Err(format!("`{s}` is not one of A1, A2, A3, A4")),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the catalog.
    Orbits {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Name the stratum of a point given in canonical root order.
    Classify {
        #[command(flatten)]
        rank: RankArg,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Work over F_p instead of the rationals.
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Count the points of every stratum over F_q.
    Census {
        #[command(flatten)]
        rank: RankArg,
        /// Field size, a prime
        #[arg(long)]
        q: u64,
        /// Refuse to run when q^N exceeds this many points
        #[arg(long, default_value_t = DEFAULT_CENSUS_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Enumerate B(F_q)-orbits by brute force and check the catalog refines them.
    Oracle {
        #[command(flatten)]
        rank: RankArg,
        /// Field size, a prime
        #[arg(long)]
        q: u64,
        /// Refuse to run when q^N exceeds this many points
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Audit dimensions by Jacobian rank.
    Dims {
        #[command(flatten)]
        rank: RankArg,
        /// Random orbit points per record besides the representative.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Closure order and its Hasse diagram.
    Hasse {
        #[command(flatten)]
        rank: RankArg,
        /// Write the diagram in DOT form to this file.
        #[arg(long, value_name = "FILE")]
        dot: Option<std::path::PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Forward containment and witness verification for every record.
    Verify {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Run every check for one rank.
    CheckAll {
        #[command(flatten)]
        rank: RankArg,
        #[arg(long, default_value_t = DEFAULT_CENSUS_BUDGET)]
        budget: u128,
    },
}

/// A run that completed; `failure` carries the first counterexample.
pub struct Outcome {
    pub output: String,
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome { output, failure: None }
    }

    fn check(output: String, failure: Option<String>) -> Self {
        Outcome { output, failure }
    }
}

fn is_input_error(e: &anyhow::Error) -> bool {
    matches!(
        e.downcast_ref::<Error>(),
        Some(
            Error::Parse { .. }
                | Error::UnknownVariable(_)
                | Error::Point(_)
                | Error::NotPrime(_)
                | Error::Rank(_)
                | Error::Budget { .. }
        )
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot set up {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.output.as_bytes());
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(f) => {
                    eprintln!("check failed: {f}");
                    ExitCode::from(1)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { 2 } else { 1 })
        }
    }
}

fn catalog(n: usize) -> anyhow::Result<Catalog> {
    load_catalog(n).with_context(|| format!("loading the A{n} catalog"))
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cmd: Command) -> anyhow::Result<Outcome> {
    Ok(match cmd {
        Command::Orbits { rank, format } => {
            let cat = catalog(rank.rank)?;
            match format {
                Format::Json => Outcome::ok(cat.to_json()),
                _ => Outcome::ok(render::orbits_table(&cat)),
            }
        }
        Command::Classify { rank, point, modulus, format } => {
            let cat = catalog(rank.rank)?;
            let res = match modulus {
                Some(p) => classify(&cat, &parse_point_mod(&point, rank.rank, p)?)?,
                None => classify(&cat, &parse_point_rational(&point, rank.rank)?)?,
            };
            match format {
                Format::Json => Outcome::ok(json(&res)),
                _ => Outcome::ok(format!("{}\n", res.orbit_id)),
            }
        }
        Command::Census { rank, q, budget, format } => {
            let c = partition_census(&catalog(rank.rank)?, q, budget)?;
            Outcome::ok(match format {
                Format::Json => json(&c),
                Format::Csv => c.to_csv(),
                Format::Table => render::census_table(&c),
            })
        }
        Command::Oracle { rank, q, budget, format } => {
            let cat = catalog(rank.rank)?;
            let part = enumerate_borel_orbits(rank.rank, q, budget)?;
            let report = refine_check(&cat, &part)?;
            let failure = report.violations.first().cloned();
            let out = match format {
                Format::Json => json(&serde_json::json!({
                    "refine": report,
                    "stability": part.stability,
                    "class_sizes_divide_group_order": part.sizes_divide_group_order(),
                })),
                _ => render::oracle_table(&report, &part),
            };
            let failure = failure.or_else(|| (!part.sizes_divide_group_order()).then(|| "an orbit size does not divide |B(F_q)|".into()));
            Outcome::check(out, failure)
        }
        Command::Dims { rank, samples, format } => {
            let cat = catalog(rank.rank)?;
            let reports = cat.orbits.iter().map(|r| jacobian_rank_dim(r, samples)).collect::<Result<Vec<_>, _>>()?;
            let failure = reports
                .iter()
                .find(|r| !r.matches())
                .map(|r| format!("{}: Jacobian dimension {} but catalog dimension {}", r.id, r.dim, r.catalog_dim));
            let out = match format {
                Format::Json => json(&reports),
                _ => render::dims_table(&reports),
            };
            Outcome::check(out, failure)
        }
        Command::Hasse { rank, dot, format } => {
            let p = hasse(&catalog(rank.rank)?)?;
            if let Some(path) = dot {
                std::fs::write(&path, p.emit_dot()).with_context(|| format!("writing {}", path.display()))?;
            }
            let failure = p.invariant_violations().into_iter().next();
            let out = match format {
                Format::Json => p.to_json(),
                _ => render::hasse_table(&p),
            };
            Outcome::check(out, failure)
        }
        Command::Verify { rank, format } => {
            let cat = catalog(rank.rank)?;
            let certs: Vec<_> = cat.orbits.iter().map(certify).collect();
            let failure = certs.iter().find(|c| !c.certified()).map(|c| {
                let why = match (&c.forward_error, &c.verdict.status) {
                    (Some(e), _) => e.clone(),
                    (None, s) => format!("{s:?}"),
                };
                format!("{} not certified: {why}", c.orbit_id)
            });
            let out = match format {
                Format::Json => json(&certs),
                _ => render::verify_table(&certs),
            };
            Outcome::check(out, failure)
        }
        Command::CheckAll { rank, budget } => {
            let results = checks::run_all(&catalog(rank.rank)?, budget)?;
            let failure = results.iter().find(|r| r.failure.is_some()).map(|r| format!("{}: {}", r.name, r.failure.as_deref().unwrap_or("")));
            Outcome::check(checks::render(&results), failure)
        }
    })
}

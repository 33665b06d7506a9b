//! `parcong`: partition tables, congruence verification suites, the
//! theta-type congruence search, and the family figure data.
//!
//! Exit codes: 0 success, 1 verification failure (or runtime error),
//! 2 usage error, 3 search finished with budget-limited verdicts present.

mod suites;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use parcong_core::arith::primes_in;
use parcong_core::congruence::{
    figure_pairs, run_search, SearchGrid, SearchParams, VerdictRecord, VerdictStatus,
    VERDICT_CSV_HEADER,
};
use parcong_core::partitions::{pr_exact, pr_mod, read_table, table_path, write_table, TableCache};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "parcong",
    version,
    about = "exact colored-partition congruence toolkit"
)]
struct Cli {
    /// worker threads for grid tasks (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Build partition-table cache files, one per (r, ell)
    PrTable(PrTableArgs),
    /// Run a named verification suite and write its report
    Verify(VerifyArgs),
    /// Rule theta-type congruences in or out over a parameter grid
    Search(SearchArgs),
    /// Emit the eta-family pairs behind the figure data
    FigurePairs(FigureArgs),
}

#[derive(Args)]
struct PrTableArgs {
    /// comma-separated color counts, e.g. "1,17" or "3,5,7,9"
    #[arg(long, value_delimiter = ',', default_value = "1")]
    r: Vec<u64>,
    #[arg(long, default_value_t = 5)]
    ell_min: u64,
    #[arg(long, default_value_t = 13)]
    ell_max: u64,
    /// largest argument n stored in each table
    #[arg(long, default_value_t = 10_000)]
    n_max: u64,
    /// write exact big-integer tables (header ell=0) instead of mod tables
    #[arg(long)]
    exact: bool,
    #[arg(long, default_value = "cache")]
    cache_dir: PathBuf,
    /// overwrite cache files that fail checksum validation
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum Suite {
    Ramanujan,
    Lemma27,
    Etafamily,
    Abnormal,
    Decomposition,
}

impl Suite {
    fn name(&self) -> &'static str {
        match self {
            Suite::Ramanujan => "ramanujan",
            Suite::Lemma27 => "lemma27",
            Suite::Etafamily => "etafamily",
            Suite::Abnormal => "abnormal",
            Suite::Decomposition => "decomposition",
        }
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// which suite to run
    #[arg(value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 50)]
    ell_max: u64,
    #[arg(long, default_value_t = 2000)]
    trunc: i64,
    #[arg(long, default_value_t = 2000)]
    n_max: u64,
    #[arg(long, default_value = "cache")]
    cache_dir: PathBuf,
    /// fail instead of computing tables missing from the cache directory
    #[arg(long)]
    no_build: bool,
    /// report destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SearchArgs {
    /// comma-separated odd color counts (default: 3,5,...,23)
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u64>>,
    #[arg(long, default_value_t = 5)]
    ell_min: u64,
    #[arg(long, default_value_t = 200)]
    ell_max: u64,
    #[arg(long, default_value_t = 5)]
    m_min: u64,
    #[arg(long, default_value_t = 200)]
    m_max: u64,
    /// restrict to one class; both 0 and -1 run when omitted
    #[arg(long, allow_hyphen_values = true, value_parser = clap::value_parser!(i8).range(-1..=0))]
    delta: Option<i8>,
    /// truncation used to classify candidate generating functions
    #[arg(long, default_value_t = 2000)]
    trunc: i64,
    /// witness candidates examined per m are capped at budget-factor * m
    #[arg(long, default_value_t = 4)]
    budget_factor: u64,
    /// never scan witness arguments t beyond this bound
    #[arg(long, default_value_t = 100_000)]
    t_cap: u64,
    /// coefficients probed by the per-class triviality check
    #[arg(long, default_value_t = 2000)]
    ram_probe: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long, default_value_t = 501)]
    r_max: u64,
    #[arg(long, default_value_t = 1583)]
    ell_max: u64,
    /// 1 for the eta lines, 2 for the eta^3 lines
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    case: u8,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::PrTable(args) => cmd_pr_table(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Search(args) => cmd_search(&args),
        Command::FigurePairs(args) => cmd_figure_pairs(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            f.write_all(content.as_bytes())?;
        }
        None => {
            print!("{content}");
        }
    }
    Ok(())
}

fn cmd_pr_table(args: &PrTableArgs) -> Result<ExitCode> {
    std::fs::create_dir_all(&args.cache_dir)
        .with_context(|| format!("creating cache dir {}", args.cache_dir.display()))?;
    let ells: Vec<Option<u64>> = if args.exact {
        vec![None]
    } else {
        primes_in(args.ell_min.max(5), args.ell_max)
            .into_iter()
            .map(Some)
            .collect()
    };
    for &r in &args.r {
        for &ell in &ells {
            if let Some(l) = ell {
                if r % l == 0 {
                    eprintln!("skip: ell = {l} divides r = {r}");
                    continue;
                }
            }
            let path = table_path(&args.cache_dir, r, ell);
            if path.exists() {
                match read_table(&path) {
                    Ok(existing) if existing.n_max() >= args.n_max => {
                        println!("ok (cached): {}", path.display());
                        continue;
                    }
                    Ok(_) => {} // valid but shorter: rebuild
                    Err(e) => {
                        if !args.force {
                            bail!(
                                "{} failed validation ({e}); rerun with --force to overwrite",
                                path.display()
                            );
                        }
                        eprintln!("overwriting invalid cache file {}", path.display());
                    }
                }
            }
            let table = match ell {
                Some(l) => pr_mod(r, l, args.n_max)?,
                None => pr_exact(r, args.n_max)?,
            };
            write_table(&path, &table)?;
            println!("wrote: {}", path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let checks = suites::run_suite(args)?;
    let all_pass = checks.iter().all(|c| c.passed);
    let content = match args.format {
        Some(Format::Json) => serde_json::to_string_pretty(&checks)? + "\n",
        Some(Format::Csv) => {
            let mut s = String::from("suite,check,params,trunc,expected,observed,passed,detail\n");
            for c in &checks {
                s.push_str(&c.csv_line());
                s.push('\n');
            }
            s
        }
        None => {
            let mut s = String::new();
            for c in &checks {
                s.push_str(&c.text_line());
                s.push('\n');
            }
            s.push_str(&format!(
                "{}: {} checks, {} failed\n",
                args.suite.name(),
                checks.len(),
                checks.iter().filter(|c| !c.passed).count()
            ));
            s
        }
    };
    write_output(&args.out, &content)?;
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_search(args: &SearchArgs) -> Result<ExitCode> {
    let rs: Vec<u64> = match &args.r {
        Some(rs) => {
            if let Some(bad) = rs.iter().find(|&&r| r % 2 == 0) {
                eprintln!("usage error: search requires odd r values (got {bad})");
                return Ok(ExitCode::from(2));
            }
            rs.clone()
        }
        None => (3..24).step_by(2).collect(),
    };
    let deltas = match args.delta {
        Some(d) => vec![d],
        None => vec![0, -1],
    };
    for &r in &rs {
        for ell in primes_in(args.ell_min.max(5), args.ell_max) {
            if r % ell == 0 {
                eprintln!("skip: ell = {ell} divides r = {r}");
            }
        }
    }
    let grid = SearchGrid {
        rs,
        ell_min: args.ell_min,
        ell_max: args.ell_max,
        m_min: args.m_min,
        m_max: args.m_max,
        deltas,
        params: SearchParams {
            t_budget_factor: args.budget_factor,
            t_cap: args.t_cap,
            ram_probe: args.ram_probe,
            min_candidates: 64,
        },
        detect_trunc: args.trunc,
    };
    let cache = Arc::new(TableCache::new());
    let outcome = run_search(&cache, &grid)?;

    // shapes keyed by candidate triple, for the notes column
    let shapes: BTreeMap<(u64, u64, i8), _> = outcome
        .candidates
        .iter()
        .map(|c| ((c.r, c.ell, c.delta), c.shape))
        .collect();
    let records: Vec<VerdictRecord> = outcome
        .verdicts
        .iter()
        .map(|v| {
            let shape = shapes.get(&(v.r, v.ell, v.delta)).copied().flatten();
            v.to_record(shape.as_ref())
        })
        .collect();

    let counts = |status: VerdictStatus| {
        outcome
            .verdicts
            .iter()
            .filter(|v| v.status == status)
            .count()
    };
    let summary = format!(
        "# cells={} ruled_out={} candidate={} trivial={} candidate_triples={} budget_limited={}\n",
        outcome.verdicts.len(),
        counts(VerdictStatus::RuledOut),
        counts(VerdictStatus::Candidate),
        counts(VerdictStatus::TrivialRamanujan),
        outcome.candidates.len(),
        outcome.budget_limited,
    );
    let content = match args.format {
        Format::Csv => {
            let mut s = String::from(VERDICT_CSV_HEADER);
            s.push('\n');
            for rec in &records {
                s.push_str(&rec.csv_line());
                s.push('\n');
            }
            s.push_str(&summary);
            s
        }
        Format::Json => serde_json::to_string_pretty(&records)? + "\n",
    };
    write_output(&args.out, &content)?;
    eprint!("{summary}");
    Ok(if outcome.budget_limited {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_figure_pairs(args: &FigureArgs) -> Result<ExitCode> {
    let cache = TableCache::new();
    let pairs = figure_pairs(&cache, args.r_max, args.ell_max, args.case)?;
    // every emitted row must sit on its line; cheap to re-validate here
    for p in &pairs {
        let expect = if args.case == 1 {
            p.a * (p.ell - 1) - 1
        } else {
            p.a * (p.ell - 1) - 3
        };
        assert_eq!(p.r, expect, "line relation for {:?}", (p.r, p.ell));
    }
    let content = match args.format {
        Format::Csv => {
            let mut s = String::from("r,ell,a\n");
            for p in &pairs {
                s.push_str(&format!("{},{},{}\n", p.r, p.ell, p.a));
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&pairs)? + "\n",
    };
    write_output(&args.out, &content)?;
    eprintln!("# {} case-{} pairs", pairs.len(), args.case);
    Ok(ExitCode::SUCCESS)
}

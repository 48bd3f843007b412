//! Command-line driver: symbol calculus, structure-table builds with
//! caching, verification suites, and report rendering.

mod report;
mod tablefile;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use vertexalg::coeff::{MultiPoly, Var};
use vertexalg::diffpoly::{FAM_U, FAM_W};
use vertexalg::lalg::derived::{u3_suite, virasoro_element};
use vertexalg::lalg::{build_table_with_pool, RankPool, SamplingPolicy, TableConfig};
use vertexalg::par::Parallelism;
use vertexalg::psido::{psido_inv, psido_mul, PsiDoSymbol};
use vertexalg::verify::{run_suite, VerifyConfig, VerifyContext, SUITES};

#[derive(Parser)]
#[command(
    name = "vertexalg",
    version,
    about = "Exact calculator for free-boson vertex algebras: symbol calculus, OPE structure tables, verification suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pseudo-differential symbol calculus.
    Psido {
        #[command(subcommand)]
        op: PsidoOp,
    },
    /// Build (or load from cache) the structure table.
    Table(TableArgs),
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Summarize a table file or a verification report.
    Report {
        /// Path to a JSON artifact produced by `table` or `verify`.
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum PsidoOp {
    /// Product of a generic order-lambda symbol with a generic order-mu symbol.
    Mul {
        /// Number of coefficients to compute.
        #[arg(long, alias = "truncation", default_value_t = 2)]
        trunc: u16,
    },
    /// Inverse of a generic order-lambda symbol.
    Inv {
        /// Number of coefficients to compute.
        #[arg(long, alias = "truncation", default_value_t = 2)]
        trunc: u16,
    },
    /// Multiply a generic symbol by its inverse (identity up to truncation).
    Roundtrip {
        #[arg(long, alias = "truncation", default_value_t = 3)]
        trunc: u16,
    },
}

#[derive(Args, Clone)]
struct TableArgs {
    /// Largest tabulated generator pair sum `i + j`.
    #[arg(long, default_value_t = 5)]
    pair_cutoff: u16,
    /// Largest tabulated result weight.
    #[arg(long, default_value_t = 6)]
    weight_cutoff: u32,
    /// Most negative tabulated mode index.
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    s_min: i32,
    /// Sampling budget per entry (samples plus held-out ranks).
    #[arg(long, default_value_t = 16)]
    budget: usize,
    /// Output path for the table JSON.
    #[arg(long, default_value = "table.json")]
    out: PathBuf,
    /// Cache directory (defaults to $VERTEXALG_CACHE or .vertexalg-cache).
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Rebuild even if a corrupted cache entry is present.
    #[arg(long)]
    force: bool,
    /// Disable the worker pool.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// Suite to run (repeatable); `all` runs everything.
    #[arg(long, default_value = "all")]
    suite: Vec<String>,
    /// Use a previously built table file instead of rebuilding.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Seed for the randomized spot checks.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// Base grid of tensor ranks for the bialgebra certificates.
    #[arg(long, value_delimiter = ',', default_values_t = [3u16, 4, 5])]
    grid: Vec<u16>,
    /// Output format for stdout.
    #[arg(long, default_value = "text")]
    format: String,
    /// Disable the worker pool.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Psido { op } => {
            cmd_psido(op)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Table(args) => cmd_table(&args).map(|_| ExitCode::SUCCESS),
        Command::Verify(args) => cmd_verify(&args),
        Command::Report { input } => {
            cmd_report(&input)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_psido(op: PsidoOp) -> Result<()> {
    match op {
        PsidoOp::Mul { trunc } => {
            let a = PsiDoSymbol::generic(FAM_W, MultiPoly::var(Var::Lambda), trunc);
            let b = PsiDoSymbol::generic(FAM_U, MultiPoly::var(Var::Mu), trunc);
            let p = psido_mul(&a, &b, trunc)?;
            println!("{}", p);
        }
        PsidoOp::Inv { trunc } => {
            let a = PsiDoSymbol::generic(FAM_U, MultiPoly::var(Var::Lambda), trunc);
            let inv = psido_inv(&a, trunc)?;
            println!("{}", inv);
        }
        PsidoOp::Roundtrip { trunc } => {
            let a = PsiDoSymbol::generic(FAM_U, MultiPoly::var(Var::Lambda), trunc);
            let inv = psido_inv(&a, trunc)?;
            let prod = psido_mul(&a, &inv, trunc)?;
            println!("{}", prod);
            if !prod.is_identity_up_to(trunc) {
                bail!("round trip is not the identity");
            }
            println!("identity up to truncation {trunc}");
        }
    }
    Ok(())
}

fn cache_root(args: &TableArgs) -> PathBuf {
    args.cache_dir
        .clone()
        .or_else(|| std::env::var_os("VERTEXALG_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(".vertexalg-cache"))
}

fn config_fingerprint(args: &TableArgs) -> String {
    let key = format!(
        "{}|pair={}|weight={}|smin={}|budget={}|v={}",
        tablefile::SCHEMA,
        args.pair_cutoff,
        args.weight_cutoff,
        args.s_min,
        args.budget,
        env!("CARGO_PKG_VERSION"),
    );
    hex::encode(&Sha256::digest(key.as_bytes())[..8])
}

fn cmd_table(args: &TableArgs) -> Result<tablefile::TableFile> {
    let mode = if args.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    let cache_dir = cache_root(args);
    let cache_path = cache_dir.join(format!("table-{}.json", config_fingerprint(args)));
    if cache_path.exists() && !args.force {
        let text = std::fs::read_to_string(&cache_path)
            .with_context(|| format!("reading cache {}", cache_path.display()))?;
        let file = tablefile::parse(&text)
            .and_then(|f| tablefile::from_file(&f).map(|_| f))
            .with_context(|| {
                format!(
                    "cache entry {} is corrupted or version-mismatched; \
                     pass --force to rebuild",
                    cache_path.display()
                )
            })?;
        eprintln!("cache hit: {}", cache_path.display());
        std::fs::write(&args.out, tablefile::render(&file))?;
        return Ok(file);
    }
    let pool = RankPool::new();
    let config = TableConfig {
        pair_cutoff: args.pair_cutoff,
        weight_cutoff: args.weight_cutoff,
        s_min: args.s_min,
    };
    let policy = SamplingPolicy {
        start: None,
        budget: args.budget,
    };
    eprintln!(
        "building table: i+j <= {}, weight <= {}, s >= {}",
        config.pair_cutoff, config.weight_cutoff, config.s_min
    );
    let table = build_table_with_pool(&pool, config, policy, mode)?;
    // normalization ledger from the derived elements
    let mut ledger = BTreeMap::new();
    let vira = virasoro_element(&pool, &[3, 4])?;
    ledger.insert("kappa".to_string(), vira.kappa.to_string());
    let u3 = u3_suite(&pool, &[4, 5])?;
    ledger.insert("sigma".to_string(), u3.sigma.to_string());
    let file = tablefile::to_file(&table, ledger)?;
    let rendered = tablefile::render(&file);
    std::fs::create_dir_all(&cache_dir).ok();
    std::fs::write(&cache_path, &rendered)
        .with_context(|| format!("writing cache {}", cache_path.display()))?;
    std::fs::write(&args.out, &rendered)
        .with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!("wrote {} ({} entries)", args.out.display(), file.entries.len());
    Ok(file)
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode> {
    let mode = if args.sequential {
        Parallelism::Sequential
    } else {
        Parallelism::Parallel
    };
    let config = VerifyConfig {
        mode,
        seed: args.seed,
        sample_budget: 16,
        grid: args.grid.clone(),
    };
    let ctx = match &args.table {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let file = tablefile::parse(&text)?;
            let table = tablefile::from_file(&file)?;
            let defaults = TableConfig::default();
            if table.config.pair_cutoff < defaults.pair_cutoff
                || table.config.weight_cutoff < defaults.weight_cutoff
            {
                eprintln!(
                    "note: loaded table covers i+j <= {}, weight <= {}; \
                     table-driven suites check only what it contains",
                    table.config.pair_cutoff, table.config.weight_cutoff
                );
            }
            VerifyContext::with_table(config, table)
        }
        None => VerifyContext::new(config),
    };
    let selected: Vec<String> = if args.suite.iter().any(|s| s == "all") {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        args.suite.clone()
    };
    let mut reports = Vec::new();
    for suite in &selected {
        let rep = run_suite(suite, &ctx)?;
        if args.format == "text" {
            print!("{}", report::render_text(&rep));
        }
        reports.push(rep);
    }
    let all_passed = reports.iter().all(|r| r.passed());
    let json = report::to_json(&reports);
    if args.format == "json" {
        println!("{}", serde_json::to_string_pretty(&json)?);
    }
    if let Some(path) = &args.json {
        std::fs::write(path, serde_json::to_string_pretty(&json)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if args.format == "text" {
        println!(
            "overall: {}",
            if all_passed { "PASS" } else { "FAIL" }
        );
    }
    Ok(if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_report(input: &Path) -> Result<()> {
    let text =
        std::fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    match value.get("schema").and_then(|s| s.as_str()) {
        Some(tablefile::SCHEMA) => {
            let file = tablefile::parse(&text)?;
            tablefile::from_file(&file).context("table file failed validation")?;
            println!("structure table {}", input.display());
            println!(
                "  cutoffs: i+j <= {}, weight <= {}, s >= {}",
                file.meta.cutoffs.pair, file.meta.cutoffs.weight, file.meta.cutoffs.s_min
            );
            println!("  entries: {}", file.entries.len());
            println!("  version: {}", file.meta.version);
            println!("  hash: {} (verified)", &file.meta.hash[..16]);
            for (k, v) in &file.meta.ledger {
                println!("  ledger {k} = {v}");
            }
            // observed interpolation degrees against the generator pair sum
            let excess = file
                .meta
                .degrees
                .iter()
                .map(|d| d[3] - (d[0] + d[2]))
                .max()
                .unwrap_or(0);
            println!("  max interpolation degree minus (i+j): {excess}");
        }
        _ if value.get("suites").is_some() => {
            print!("{}", report::render_json_summary(&value)?);
        }
        _ => bail!("unrecognized artifact {}", input.display()),
    }
    Ok(())
}

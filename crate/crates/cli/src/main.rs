use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fquad_core::functors::FunctorRegistry;
use fquad_core::{Error, QuadSpace};
use fquad_verify::{parse_roster, CheckConfig, CheckRegistry, CheckReport, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "fquad", version, about = "Quadratic spaces over F2, functors on Tq and their verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print dimension, radical, Arf invariant and normal form of each space.
    Classify {
        /// Space expressions such as `H0+H1`, `x0`, `H0^3` or a JSON file.
        #[arg(required = true)]
        spaces: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print functor dimensions, one row per functor and one column per space.
    Table {
        /// The first functor, e.g. `iso:x1`, `m:a=1` or `L:a=1,n=2`.
        functor: String,
        #[arg(required = true)]
        spaces: Vec<String>,
        /// Further functors, one row each.
        #[arg(long = "functor", short = 'f')]
        more: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run checks; exit 0 iff every selected check passes.
    Verify(RunArgs),
    /// Run checks and write JSON and CSV reports to `--out`.
    Export(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Check names, or `all`.
    #[arg(default_value = "all")]
    checks: Vec<String>,
    /// Comma-separated space expressions, or `default`.
    #[arg(long, default_value = "default")]
    roster: String,
    /// `0`, `1` or `both`.
    #[arg(long, default_value = "both")]
    alpha: String,
    #[arg(long, default_value_t = 3)]
    nmax: usize,
    #[arg(long, default_value_t = 2)]
    dmax: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Seeded morphism triples for the category laws.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for `<check>.json` and `<check>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Bad input (exit 2) versus a failure while computing (exit 1).
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::UnknownFunctor { .. } | Error::InvalidParameter(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Classify { spaces, format } => classify(&spaces, format),
        Command::Table {
            functor,
            spaces,
            more,
            format,
        } => table(&functor, &more, &spaces, format),
        Command::Verify(args) => verify(&args, false),
        Command::Export(args) => verify(&args, true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn classify(spaces: &[String], format: Format) -> Result<bool, Failure> {
    let mut records = Vec::new();
    for expr in spaces {
        let w = QuadSpace::parse(expr)?;
        let radical = w.radical().dim();
        let (arf, normal) = if w.is_nondegenerate() {
            let c = w.classify()?;
            (Some(c.arf as u8), Some(c.normal_form_name()))
        } else {
            (None, None)
        };
        records.push((expr.clone(), w.dim(), radical, arf, normal));
    }
    match format {
        Format::Text => {
            for (expr, dim, radical, arf, normal) in &records {
                let line = match (arf, normal) {
                    (Some(a), Some(n)) => format!("dim {dim}, nondegenerate, Arf {a}, ≅ {n}"),
                    _ => format!("dim {dim}, radical dim {radical}, degenerate"),
                };
                if records.len() == 1 {
                    println!("{line}");
                } else {
                    println!("{expr}: {line}");
                }
            }
        }
        Format::Json => {
            let out: Vec<Value> = records
                .iter()
                .map(|(expr, dim, radical, arf, normal)| {
                    json!({
                        "space": expr,
                        "dim": dim,
                        "radical_dim": radical,
                        "nondegenerate": arf.is_some(),
                        "arf": arf,
                        "normal_form": normal,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Format::Csv => {
            println!("space,dim,radical_dim,nondegenerate,arf,normal_form");
            for (expr, dim, radical, arf, normal) in &records {
                let arf = arf.map(|a| a.to_string()).unwrap_or_default();
                let normal = normal.clone().unwrap_or_default();
                println!("{expr},{dim},{radical},{},{arf},{normal}", !arf.is_empty());
            }
        }
    }
    Ok(true)
}

fn table(first: &str, more: &[String], spaces: &[String], format: Format) -> Result<bool, Failure> {
    let registry = FunctorRegistry::new();
    let objects = spaces
        .iter()
        .map(|s| QuadSpace::parse(s))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows: Vec<(String, Vec<usize>)> = Vec::new();
    for name in std::iter::once(first).chain(more.iter().map(String::as_str)) {
        let f = registry.parse(name)?;
        let dims = objects.iter().map(|w| f.dim(w)).collect::<Result<Vec<_>, _>>()?;
        rows.push((name.to_string(), dims));
    }
    match format {
        Format::Text => {
            let mut header = vec!["functor".to_string()];
            header.extend(spaces.iter().cloned());
            let mut cells = vec![header];
            for (name, dims) in &rows {
                let mut line = vec![name.clone()];
                line.extend(dims.iter().map(usize::to_string));
                cells.push(line);
            }
            let widths: Vec<usize> = (0..cells[0].len())
                .map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
                .collect();
            for line in &cells {
                let padded: Vec<String> = line
                    .iter()
                    .zip(&widths)
                    .map(|(c, &w)| format!("{c:<w$}"))
                    .collect();
                println!("{}", padded.join("  ").trim_end());
            }
        }
        Format::Json => {
            let out: Vec<Value> = rows
                .iter()
                .map(|(name, dims)| {
                    let values: serde_json::Map<String, Value> =
                        spaces.iter().cloned().zip(dims.iter().map(|&d| json!(d))).collect();
                    json!({ "functor": name, "dims": values })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Format::Csv => {
            println!("functor,{}", spaces.join(","));
            for (name, dims) in &rows {
                let dims: Vec<String> = dims.iter().map(usize::to_string).collect();
                println!("\"{name}\",{}", dims.join(","));
            }
        }
    }
    Ok(true)
}

fn config(args: &RunArgs) -> Result<CheckConfig, Failure> {
    let alphas = match args.alpha.as_str() {
        "0" => vec![false],
        "1" => vec![true],
        "both" => vec![false, true],
        other => return Err(Failure::Usage(format!("--alpha must be 0, 1 or both, got `{other}`"))),
    };
    Ok(CheckConfig {
        roster: parse_roster(&args.roster)?,
        alphas,
        n_max: args.nmax,
        d_max: args.dmax,
        seed: args.seed,
        samples: args.samples,
        ..CheckConfig::default()
    })
}

fn verify(args: &RunArgs, export: bool) -> Result<bool, Failure> {
    let registry = CheckRegistry::new();
    let names: Vec<&str> = if args.checks.iter().any(|c| c == "all") {
        registry.names()
    } else {
        args.checks.iter().map(String::as_str).collect()
    };
    if let Some(bad) = names.iter().find(|n| registry.get(n).is_none()) {
        return Err(Failure::Usage(format!(
            "unknown check `{bad}`; expected one of: all, {}",
            registry.names().join(", ")
        )));
    }
    let cfg = config(args)?;
    let reports = registry.run_many(&names, &cfg);
    let out = match (&args.out, export) {
        (Some(dir), _) => Some(dir.clone()),
        (None, true) => Some(PathBuf::from("reports")),
        (None, false) => None,
    };
    if let Some(dir) = &out {
        write_reports(dir, &reports).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    }
    if export {
        for r in &reports {
            println!("{} {}", if r.passed { "PASS" } else { "FAIL" }, r.check);
        }
    } else {
        print_reports(&reports, args.format);
    }
    Ok(reports.iter().all(|r| r.passed))
}

fn write_reports(dir: &Path, reports: &[CheckReport]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for r in reports {
        fs::write(dir.join(format!("{}.json", r.check)), r.to_json() + "\n")?;
        fs::write(dir.join(format!("{}.csv", r.check)), r.to_csv())?;
    }
    Ok(())
}

fn print_reports(reports: &[CheckReport], format: Format) {
    match format {
        Format::Text => {
            for r in reports {
                print!("{}", r.to_text());
            }
            let passed = reports.iter().filter(|r| r.passed).count();
            println!("{passed}/{} checks passed", reports.len());
        }
        Format::Json => {
            let all: Vec<Value> = reports
                .iter()
                .map(|r| serde_json::to_value(r).expect("json"))
                .collect();
            println!("{}", serde_json::to_string_pretty(&all).expect("json"));
        }
        Format::Csv => {
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    println!();
                }
                print!("{}", r.to_csv());
            }
        }
    }
}

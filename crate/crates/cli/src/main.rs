mod config;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use config::RunConfig;
use twistlab::averages::AverageReport;
use twistlab::coeffs::{make_provider, ProviderKind};
use twistlab::cutoff::{CutoffSpec, Variant};
use twistlab::lvalue::{LValue, TwistContext};
use twistlab::quadclass::{class_group, Discriminant};
use twistlab::sweep::{plot_csv, plot_points, sweep, trend_slope};

#[derive(Parser)]
#[command(name = "twistlab", version, about = "Class group twists of GL(n) L-functions")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduced forms, class number and unit count of an order.
    Classgroup {
        #[arg(short = 'd', long = "d0", allow_hyphen_values = true)]
        d0: i64,
        #[arg(short = 'c', long, default_value_t = 1)]
        c: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// One twisted L-value as a CSV row.
    Lvalue {
        /// `ramanujan_delta`, `weight2_level11`, or a provider as JSON.
        #[arg(long)]
        provider: String,
        #[arg(short = 'd', long = "d0", allow_hyphen_values = true)]
        d0: i64,
        #[arg(short = 'c', long, default_value_t = 1)]
        c: u64,
        #[arg(long = "chi", default_value_t = 0)]
        chi_index: usize,
        #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        delta_im: f64,
        #[arg(long, default_value_t = 0.1)]
        width: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the cells of a TOML config and write reports.
    Sweep { config: PathBuf },
}

enum Failure {
    Config(String),
    Domain(twistlab::Error),
    Io(String),
}

impl From<twistlab::Error> for Failure {
    fn from(e: twistlab::Error) -> Self {
        Failure::Domain(e)
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn parse_provider(s: &str) -> Result<ProviderKind, Failure> {
    let value = if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| Failure::Config(format!("--provider: {e}")))?
    } else {
        serde_json::Value::String(s.to_string())
    };
    serde_json::from_value(value).map_err(|e| Failure::Config(format!("--provider: {e}")))
}

fn cmd_classgroup(d0: i64, c: u64, json: Option<PathBuf>) -> Result<i32, Failure> {
    let disc = Discriminant::new(d0, c)?;
    let g = class_group(disc)?;
    println!("D = {} (d0 = {}, c = {})", disc.d(), d0, c);
    println!("h = {}, w = {}", g.h, g.w_k);
    println!("{:>8} {:>8} {:>8} {:>6}", "a", "b", "c", "order");
    for (i, f) in g.forms.iter().enumerate() {
        println!("{:>8} {:>8} {:>8} {:>6}", f.a, f.b, f.c, g.element_order(i));
    }
    if let Some(p) = json {
        std::fs::write(&p, serde_json::to_string_pretty(&g.to_json()).expect("json")).map_err(|e| io_err(&p, e))?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_lvalue(provider: &str, d0: i64, c: u64, chi_index: usize, delta: Complex64, width: f64, tol: f64, json: Option<PathBuf>) -> Result<i32, Failure> {
    let kind = parse_provider(provider)?;
    let disc = Discriminant::new(d0, c)?;
    let g = class_group(disc)?;
    let variant = if delta == Complex64::new(0.5, 0.0) { Variant::Central } else { Variant::strip(delta) };
    let spec = CutoffSpec { variant, target_tol: tol, ..CutoffSpec::central(width) };
    spec.validate()?;
    let small = make_provider(&kind, 16)?;
    let n = TwistContext::new(&small, &g)?.plan(&spec)?.n_max;
    let pi = make_provider(&kind, n)?;
    let mut ctx = TwistContext::new(&pi, &g)?;
    ctx.character(chi_index)?;
    let v: LValue = match variant {
        Variant::Central => ctx.central_value(chi_index, &spec)?,
        Variant::Strip { .. } => ctx.strip_value(chi_index, delta, &spec)?,
    };
    let source = if v.root_number_numeric { "numeric" } else { "formula" };
    println!("# W = {:.12} ({source}), Y = {}, terms = {}, err = {:.3e}", v.root_number, v.big_y, v.terms, v.err());
    println!("{}", LValue::CSV_HEADER);
    println!("{}", v.csv_row());
    if let Some(p) = json {
        std::fs::write(&p, serde_json::to_string_pretty(&v.to_json()).expect("json")).map_err(|e| io_err(&p, e))?;
    }
    Ok(0)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| io_err(path, e))
}

fn cmd_sweep(path: &Path) -> Result<i32, Failure> {
    let cfg = RunConfig::load(path).map_err(Failure::Config)?;
    let cells = cfg.expand();
    if let Some(j) = cfg.output.journal.as_ref().and_then(|j| j.parent()).filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(j).map_err(|e| io_err(j, e))?;
    }
    let outcome = sweep(&cells, cfg.output.journal.as_deref())?;
    let cfg_json = serde_json::to_string(&cfg).expect("config serialises");
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);

    let mut csv = format!("# generated_unix_time = {stamp}\n# config = {cfg_json}\n{}\n", AverageReport::CSV_HEADER);
    for e in &outcome.entries {
        if let Some(r) = &e.report {
            csv.push_str(&r.csv_row());
            csv.push('\n');
        }
    }
    write_file(&cfg.output.csv, &csv)?;
    if let Some(p) = &cfg.output.json {
        let doc = serde_json::json!({ "config": cfg, "entries": outcome.entries });
        write_file(p, &serde_json::to_string_pretty(&doc).expect("json"))?;
    }
    if let Some(p) = &cfg.output.plot {
        write_file(p, &format!("# config = {cfg_json}\n{}", plot_csv(&outcome.entries)))?;
    }

    let mut code = 0;
    for e in &outcome.entries {
        if let Some(msg) = &e.error {
            eprintln!("cell d0={} c={} failed: {msg}", e.cell.d0, e.cell.c);
            code = code.max(e.error_code.unwrap_or(2));
        }
    }
    let points = plot_points(&outcome.entries);
    match trend_slope(&points) {
        Some(s) => println!("trend: slope of ln rel_error against ln|D| = {s:.4} over {} cells", points.len()),
        None => println!("trend: fewer than two usable cells"),
    }
    println!("cells: {} total, {} evaluated, {} read from journal", cells.len(), outcome.evaluated, cells.len() - outcome.evaluated);
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: --jobs: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Classgroup { d0, c, json } => cmd_classgroup(d0, c, json),
        Command::Lvalue { provider, d0, c, chi_index, delta, delta_im, width, tol, json } => {
            cmd_lvalue(&provider, d0, c, chi_index, Complex64::new(delta, delta_im), width, tol, json)
        }
        Command::Sweep { config } => cmd_sweep(&config),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fks::config::RunConfig;
use fks::driver::{self, StudyConfig, StudyStep};
use fks::output;
use fks_core::problems::Problem;
use fks_core::Scheme;

#[derive(Parser)]
#[command(
    name = "fks",
    version,
    about = "Fast kinetic schemes for the BGK equation"
)]
struct Cli {
    /// Output directory (overrides configuration files).
    #[arg(long, global = true, env = "FKS_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one problem with one scheme.
    Run(RunArgs),
    /// Vortex convergence study.
    Converge(ConvergeArgs),
    /// Time fixed cycle counts of several schemes.
    Bench(BenchArgs),
    /// List the shipped problems.
    ListProblems,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file in `section.key = value` format.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    /// Extra `key=value` overrides applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long, default_value = "hofks")]
    scheme: String,
    /// Cells per direction.
    #[arg(long, value_delimiter = ',', default_value = "25,50,100")]
    meshes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    velocity_nodes: usize,
    #[arg(long, default_value_t = 15.0)]
    velocity_bound: f64,
    #[arg(long, default_value_t = 1e-4)]
    tau: f64,
    #[arg(long, default_value_t = 1.0)]
    t_final: f64,
    #[arg(long, default_value_t = 0.5)]
    cfl: f64,
    /// Use the CFL step on every mesh instead of dt ~ dx^2.
    #[arg(long)]
    cfl_steps: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value = "sod2d")]
    problem: String,
    #[arg(long, value_delimiter = ',', default_value = "fks,hofks")]
    schemes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "50,100")]
    meshes: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    cycles: usize,
}

fn problem(name: &str) -> anyhow::Result<Problem> {
    Problem::from_name(name)
        .with_context(|| format!("unknown problem `{name}` (see `fks list-problems`)"))
}

fn scheme(name: &str) -> anyhow::Result<Scheme> {
    Scheme::from_name(name).with_context(|| format!("unknown scheme `{name}`"))
}

fn out_dir(cli: &Option<PathBuf>) -> PathBuf {
    cli.clone().unwrap_or_else(|| PathBuf::from("output"))
}

fn run(args: RunArgs, dir: Option<PathBuf>) -> anyhow::Result<()> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading {}", p.display()))?,
        None => RunConfig::new(Problem::Sod1d, Scheme::Fks),
    };
    if let Some(p) = &args.problem {
        cfg.problem = problem(p)?;
    }
    if let Some(s) = &args.scheme {
        cfg.scheme = scheme(s)?;
    }
    for (i, kv) in args.set.iter().enumerate() {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("`{kv}` is not KEY=VALUE"))?;
        cfg.set(k.trim(), v.trim(), i + 1)?;
    }
    if let Some(d) = dir {
        cfg.output_dir = d;
    }
    let out = driver::run(&cfg)?;
    println!(
        "{} / {}: {} cycles, {:.3} s ({:.3e} s/cycle, {:.3e} s/cell)",
        cfg.problem.name(),
        cfg.scheme,
        out.cycles,
        out.timing.wall,
        out.timing.time_per_cycle(),
        out.timing.time_per_cell()
    );
    if let Some((l1, linf)) = out.errors {
        println!("density errors: L1 {l1:.4e}, Linf {linf:.4e}");
    }
    println!("output in {}", cfg.output_dir.display());
    Ok(())
}

fn converge(args: ConvergeArgs, dir: Option<PathBuf>) -> anyhow::Result<()> {
    let study = StudyConfig {
        velocity_nodes: args.velocity_nodes,
        velocity_bound: args.velocity_bound,
        tau: args.tau,
        t_final: args.t_final,
        cfl: args.cfl,
        step: if args.cfl_steps {
            StudyStep::Cfl
        } else {
            StudyStep::Quadratic
        },
        ..StudyConfig::new(scheme(&args.scheme)?, args.meshes)
    };
    let result = driver::convergence_study(&study)?;
    let dir = out_dir(&dir);
    let table = output::errors_csv(study.scheme.name(), &result.report);
    output::write_atomic(&dir.join("errors.csv"), &table)?;
    let rows: Vec<_> = result
        .report
        .meshes
        .iter()
        .zip(&result.timings)
        .map(|(m, t)| {
            (
                "vortex2d".to_string(),
                format!("{}-{}", study.scheme, m.cells),
                *t,
            )
        })
        .collect();
    output::write_atomic(&dir.join("timing.csv"), &output::timing_csv(&rows))?;
    print!("{table}");
    Ok(())
}

fn bench(args: BenchArgs, dir: Option<PathBuf>) -> anyhow::Result<()> {
    let p = problem(&args.problem)?;
    let schemes = args
        .schemes
        .iter()
        .map(|s| scheme(s))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let rows = driver::bench(p, &schemes, &args.meshes, args.cycles)?;
    let table: Vec<_> = rows
        .iter()
        .map(|r| (p.name().to_string(), r.scheme.name().to_string(), r.timing))
        .collect();
    let csv = output::timing_csv(&table);
    output::write_atomic(&out_dir(&dir).join("timing.csv"), &csv)?;
    print!("{csv}");
    for (cells, ratio) in driver::cost_ratios(&rows) {
        println!("hofks/fks cost per cycle on {cells} cells per direction: {ratio:.2}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = cli.output_dir;
    let result = match cli.command {
        Command::Run(a) => run(a, dir),
        Command::Converge(a) => converge(a, dir),
        Command::Bench(a) => bench(a, dir),
        Command::ListProblems => {
            for p in Problem::ALL {
                println!("{:<12} {}", p.name(), p.description());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperbolic_cgc::config::JobConfig;
use hyperbolic_cgc::num_complex::Complex64;
use hyperbolic_cgc::pipeline::{load_config, run_pipeline, Stage};
use hyperbolic_cgc::report::Report;
use hyperbolic_cgc::verify::{run_all, verify_report};

#[derive(Parser)]
#[command(name = "cgc", version, about = "Constant Gaussian curvature surfaces in hyperbolic 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the Gauss equation and write u.csv.
    Solve(JobArgs),
    /// Also integrate the extended frame for each lambda.
    Frame(JobArgs),
    /// Also build surfaces and write meshes.
    Mesh(JobArgs),
    /// Meshes along the associated family (eight unit lambdas by default).
    Family(JobArgs),
    /// Frame at lambda0 and its Gauss map.
    Gaussmap(JobArgs),
    /// Constant curvature data from a harmonic seed (mode = "converse").
    Converse(JobArgs),
    /// Run the built-in acceptance suite.
    Verify {
        /// Write the report here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Seed {
    Umbilic,
    Cylinder,
}

#[derive(Args)]
struct JobArgs {
    #[arg(long, conflicts_with = "seed")]
    config: Option<PathBuf>,
    /// Built-in job used when no config is given.
    #[arg(long, value_enum)]
    seed: Option<Seed>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Spectral parameter as RE,IM; repeat for several. Replaces the config list.
    #[arg(long = "lambda", value_name = "RE,IM", value_parser = parse_complex, allow_hyphen_values = true)]
    lambdas: Vec<Complex64>,
    #[arg(long)]
    at_lambda0: bool,
    /// Nodes per side of the grid.
    #[arg(long)]
    grid: Option<usize>,
    /// Also copy the report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(Complex64::new(num(re)?, num(im)?))
}

fn job(args: &JobArgs) -> hyperbolic_cgc::Result<JobConfig> {
    let n = args.grid.unwrap_or(65);
    let mut cfg = match (&args.config, args.seed) {
        (Some(path), _) => load_config(path)?,
        (None, Some(Seed::Cylinder)) => JobConfig::cylinder(n),
        (None, _) => JobConfig::umbilic(n),
    };
    if let Some(n) = args.grid {
        cfg.n = n;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if !args.lambdas.is_empty() {
        cfg.lambdas = args.lambdas.clone();
    }
    cfg.lambda0 |= args.at_lambda0;
    Ok(cfg)
}

fn run_job(stage: Stage, args: &JobArgs) -> hyperbolic_cgc::Result<Report> {
    let cfg = job(args)?;
    let out = run_pipeline(&cfg, stage)?;
    for f in &out.files {
        println!("wrote {}", f.display());
    }
    if let Some(path) = &args.report {
        out.report.write(path)?;
    }
    Ok(out.report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => run_job(Stage::Solve, a),
        Command::Frame(a) => run_job(Stage::Frame, a),
        Command::Mesh(a) => run_job(Stage::Mesh, a),
        Command::Family(a) => run_job(Stage::Family, a),
        Command::Gaussmap(a) => run_job(Stage::GaussMap, a),
        Command::Converse(a) => run_job(Stage::Converse, a),
        Command::Verify { report } => {
            let results = run_all();
            for r in &results {
                eprintln!("{}", r.line());
            }
            let rep = verify_report(&results);
            match report {
                Some(path) => rep.write(path).map(|_| rep),
                None => {
                    print!("{}", rep.render());
                    Ok(rep)
                }
            }
        }
    };
    match result {
        Ok(report) => {
            if !report.passed() {
                eprintln!("failed: {}", report.failures().join(", "));
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

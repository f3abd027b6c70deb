use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rcpp::generate::generate_instance;
use rcpp::oracle::{brute_force_opt, enumerate_packable_rectangles, solve_dw_lp, OracleLimits};
use rcpp::patterns::{enumerate_patterns, write_pattern_dump};
use rcpp::render::{render_solution, render_svg};
use rcpp::solver::{enumeration_options, solve, table_header, Profile, SolveConfig, SolveReport};
use rcpp::validate::validate_solution;
use rcpp::{parse_instance, parse_solution, write_instance, write_solution, Instance};

/// Recursive circle packing: pack rings into the fewest rectangles.
#[derive(Parser)]
#[command(name = "rcpp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Enumerate circular patterns and print counts.
    Enumerate(EnumerateArgs),
    /// Solve an instance and write a report.
    Solve(SolveArgs),
    /// Check a solution file or report against an instance (exit 0 if valid, 1 if not).
    Validate(ValidateArgs),
    /// Draw a solution as SVG.
    Render(RenderArgs),
    /// Brute-force values for a tiny instance.
    #[command(hide = true)]
    Oracle(OracleArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long = "types", short = 'T')]
    types: usize,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// output path; stdout when omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// limit profile: `paper` or `desk`
    #[arg(long, default_value = "paper")]
    profile: Profile,
    /// file with `key = value` lines, applied after the profile
    #[arg(long)]
    config: Option<PathBuf>,
    /// `key=value` override, applied last; may be repeated
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// fixed thread count and no timings in the report (the default)
    #[arg(long, overrides_with = "no_deterministic")]
    deterministic: bool,
    #[arg(long = "no-deterministic", overrides_with = "deterministic")]
    no_deterministic: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// seconds per verification call during enumeration
    #[arg(long)]
    enumeration_call_limit: Option<f64>,
    #[arg(long)]
    enumeration_budget: Option<f64>,
    #[arg(long)]
    verification_call_limit: Option<f64>,
    #[arg(long)]
    verification_budget: Option<f64>,
    #[arg(long)]
    pricing_limit: Option<f64>,
    #[arg(long)]
    total_time_limit: Option<f64>,
    #[arg(long)]
    ip_node_limit: Option<u64>,
    #[arg(long)]
    geometry_node_limit: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<SolveConfig> {
        let mut c = SolveConfig::from_profile(self.profile);
        if let Some(path) = &self.config {
            let text = read(path)?;
            c.apply_file(&text).with_context(|| format!("in {}", path.display()))?;
        }
        let flags: [(&str, Option<String>); 9] = [
            ("enumeration_call_limit", self.enumeration_call_limit.map(|v| v.to_string())),
            ("enumeration_budget", self.enumeration_budget.map(|v| v.to_string())),
            ("verification_call_limit", self.verification_call_limit.map(|v| v.to_string())),
            ("verification_budget", self.verification_budget.map(|v| v.to_string())),
            ("pricing_limit", self.pricing_limit.map(|v| v.to_string())),
            ("total_time_limit", self.total_time_limit.map(|v| v.to_string())),
            ("ip_node_limit", self.ip_node_limit.map(|v| v.to_string())),
            ("geometry_node_limit", self.geometry_node_limit.map(|v| v.to_string())),
            ("tolerance", self.tolerance.map(|v| v.to_string())),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                c.set(k, &v)?;
            }
        }
        if let Some(t) = self.threads {
            c.threads = t;
        }
        c.deterministic = !self.no_deterministic;
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .with_context(|| format!("`--set {kv}`: expected KEY=VALUE"))?;
            c.set(k.trim(), v.trim())?;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct EnumerateArgs {
    instance: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    /// write the pattern dump here
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    config: ConfigArgs,
    /// report path; `<instance>.report.json` when omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// also write the incumbent as a solution file
    #[arg(long)]
    solution: Option<PathBuf>,
    /// also draw the incumbent
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    /// solution file or solve report
    solution: PathBuf,
    #[arg(long, default_value_t = rcpp::DEFAULT_TOLERANCE)]
    tolerance: f64,
}

#[derive(Args)]
struct RenderArgs {
    /// solution file, or a solve report together with `--instance`
    solution: PathBuf,
    svg: PathBuf,
    #[arg(long)]
    instance: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    let mut inst = parse_instance(&read(path)?).with_context(|| format!("in {}", path.display()))?;
    if inst.name.is_empty() {
        inst.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(inst)
}

fn looks_like_json(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate(a) => {
            let inst = generate_instance(a.types, a.alpha, a.beta, a.gamma, a.seed)?;
            let text = write_instance(&inst);
            match a.out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate(a) => {
            let inst = load_instance(&a.instance)?;
            let config = a.config.build()?;
            let start = Instant::now();
            let sets = enumerate_patterns(&inst, &enumeration_options(&config));
            println!(
                "feasible={} unknown={} infeasible={} candidates={} time={:.3}s",
                sets.feasible.len(),
                sets.unknown.len(),
                sets.infeasible.len(),
                sets.stats.candidates,
                start.elapsed().as_secs_f64()
            );
            if let Some(p) = a.dump {
                write(&p, &write_pattern_dump(&sets))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(a) => {
            let inst = load_instance(&a.instance)?;
            let config = a.config.build()?;
            let report = solve(&inst, &config)?;
            let out = a
                .out
                .unwrap_or_else(|| a.instance.with_extension("report.json"));
            write(&out, &report.to_json())?;
            if let Some(p) = a.solution {
                write(&p, &write_solution(&inst, &report.incumbent))?;
            }
            if let Some(p) = a.svg {
                write(&p, &render_solution(&inst, &report.incumbent))?;
            }
            println!("{}", table_header());
            println!("{}", report.table_row(inst.num_types(), inst.ring_count()));
            println!("{}", report.summary_line());
            Ok(ExitCode::from(report.status.exit_code() as u8))
        }
        Command::Validate(a) => {
            let inst = load_instance(&a.instance)?;
            let text = read(&a.solution)?;
            let solution = if looks_like_json(&text) {
                SolveReport::from_json(&text)
                    .with_context(|| format!("in {}", a.solution.display()))?
                    .incumbent
            } else {
                parse_solution(&text)
                    .with_context(|| format!("in {}", a.solution.display()))?
                    .solution
            };
            let v = validate_solution(&inst, &solution, a.tolerance);
            if v.feasible {
                println!("valid: {} rectangles", solution.rectangle_count);
                Ok(ExitCode::SUCCESS)
            } else {
                println!("invalid: {} violations", v.violations.len());
                for x in &v.violations {
                    println!("  {:?} rings={:?} magnitude={:e}", x.kind, x.rings, x.magnitude);
                }
                Ok(ExitCode::from(1))
            }
        }
        Command::Render(a) => {
            let text = read(&a.solution)?;
            let svg = if looks_like_json(&text) {
                let Some(ip) = a.instance else {
                    bail!("rendering a report needs --instance");
                };
                let inst = load_instance(&ip)?;
                let report = SolveReport::from_json(&text)?;
                render_solution(&inst, &report.incumbent)
            } else {
                render_svg(&parse_solution(&text)?)
            };
            write(&a.svg, &svg)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle(a) => {
            let inst = load_instance(&a.instance)?;
            let limits = OracleLimits::default();
            let f = enumerate_packable_rectangles(&inst, &limits)?;
            println!("packable={}", f.len());
            println!("dw_lp={}", solve_dw_lp(&inst, &limits)?);
            println!("optimum={}", brute_force_opt(&inst, &limits)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

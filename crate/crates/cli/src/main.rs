//! `kpc`: generate, solve, export and benchmark knapsack-with-conflicts instances.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kpc_core::campaign::{
    aggregate, render_markdown, run_campaign, write_csv, CampaignConfig, InstanceRecord,
    InstanceSource, SolverKind, DEFAULT_TIME_LIMIT,
};
use kpc_core::gen::{family_specs, generate, Family, SplitMix64};
use kpc_core::{
    read_instance, solve_bb_with, solve_oracle, to_lp_string, write_instance, write_lp,
};
use kpc_core::{BoundKind, Instance, SolverOptions, Status};

#[derive(Debug, Parser)]
#[command(
    name = "kpc",
    version,
    about = "Knapsack problem with conflicts toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write every instance of a benchmark family as .kpc files.
    Generate(GenerateArgs),
    /// Solve one instance and print status, profit and bound.
    Solve(SolveArgs),
    /// Write an instance as a CPLEX LP model.
    ExportLp(ExportArgs),
    /// Solve a directory or a generated family and write CSV plus Markdown tables.
    Bench(BenchArgs),
    /// Cross-check branch and bound against exhaustive search on random instances.
    OracleCheck(OracleCheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Set1,
    Set2,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Set1 => Family::Set1,
            FamilyArg::Set2 => Family::Set2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Bb,
    Oracle,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundArg {
    Dantzig,
    CliqueRoot,
    Clique,
}

impl From<BoundArg> for BoundKind {
    fn from(b: BoundArg) -> Self {
        match b {
            BoundArg::Dantzig => BoundKind::Dantzig,
            BoundArg::CliqueRoot => BoundKind::CliqueRoot,
            BoundArg::Clique => BoundKind::CliqueDynamic,
        }
    }
}

#[derive(Debug, Args)]
struct SolverFlags {
    /// Seconds per instance.
    #[arg(long, default_value_t = DEFAULT_TIME_LIMIT)]
    time_limit: f64,
    /// Stop after this many search nodes.
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, value_enum, default_value = "bb")]
    solver: SolverArg,
    /// Upper bound used by branch and bound.
    #[arg(long, value_enum, default_value = "clique")]
    bound: BoundArg,
}

impl SolverFlags {
    fn config(&self, jobs: usize) -> CampaignConfig {
        CampaignConfig {
            time_limit: self.time_limit,
            node_limit: self.node_limit,
            solver: match self.solver {
                SolverArg::Bb => SolverKind::BranchAndBound,
                SolverArg::Oracle => SolverKind::Oracle,
            },
            bound: self.bound.into(),
            jobs,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Master seed mixed into every instance seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; files land under `<out>/<family>/...`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// Instance in .kpc format.
    path: PathBuf,
    #[command(flatten)]
    solver: SolverFlags,
    /// Also write the result as a one-row CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExportArgs {
    path: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Solve every .kpc file below this directory.
    #[arg(long, conflicts_with = "family", required_unless_present = "family")]
    dir: Option<PathBuf>,
    /// Solve a generated family without writing instance files.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep only instances whose name starts with one of these prefixes.
    #[arg(long)]
    filter: Vec<String>,
    #[command(flatten)]
    solver: SolverFlags,
    /// Worker threads.
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Per-instance CSV.
    #[arg(long)]
    out: PathBuf,
    /// Markdown tables; defaults to the CSV path with an .md extension.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleCheckArgs {
    #[arg(long, default_value_t = 500)]
    count: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    min_items: usize,
    #[arg(long, default_value_t = 18)]
    max_items: usize,
    #[arg(long, value_enum, default_value = "clique")]
    bound: BoundArg,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => cmd_generate(&args),
        Command::Solve(args) => cmd_solve(&args),
        Command::ExportLp(args) => cmd_export(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // library errors already embed their source in the message
            let mut message = e.to_string();
            for cause in e.chain().skip(1) {
                let cause = cause.to_string();
                if !message.ends_with(&cause) {
                    message = format!("{message}: {cause}");
                }
            }
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let mut count = 0usize;
    let mut last_dir = PathBuf::new();
    for spec in family_specs(args.family.into(), args.seed) {
        let inst = generate(&spec)?;
        let path = args.out.join(spec.relative_path());
        let dir = path.parent().expect("relative paths have a parent");
        if dir != last_dir {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            last_dir = dir.to_path_buf();
        }
        write_instance(&inst, &path)?;
        count += 1;
    }
    println!("wrote {count} instances to {}", args.out.display());
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let inst = read_instance(&args.path)?;
    let result = args.solver.config(1).solve(&inst)?;
    println!("{} {}", result.status, result.profit());
    if let Some(best) = &result.best {
        println!("weight {}", best.weight);
    }
    println!("upper_bound {}", result.upper_bound);
    println!("gap_percent {:.6}", result.gap_percent);
    println!("nodes {}", result.nodes);
    println!("seconds {:.6}", result.wall_time);
    if let Some(best) = &result.best {
        let items: Vec<String> = best.selected.iter().map(usize::to_string).collect();
        println!("items {}", items.join(" "));
    }
    if let Some(path) = &args.csv {
        let record = InstanceRecord::from_result(inst.name(), &result);
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_csv(&[record], file)?;
    }
    Ok(())
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let inst = read_instance(&args.path)?;
    match &args.out {
        Some(out) => write_lp(&inst, out)?,
        None => io::stdout().write_all(to_lp_string(&inst).as_bytes())?,
    }
    Ok(())
}

fn kpc_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.with_context(|| format!("walking {}", dir.display()))?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "kpc") {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let keep = |name: &str| {
        args.filter.is_empty() || args.filter.iter().any(|f| name.starts_with(f.as_str()))
    };
    let sources: Vec<InstanceSource> = match (&args.dir, args.family) {
        (Some(dir), _) => {
            let files = kpc_files(dir)?;
            files
                .into_iter()
                .filter(|p| {
                    let rel = p.strip_prefix(dir).unwrap_or(p);
                    keep(&rel.with_extension("").to_string_lossy())
                })
                .map(InstanceSource::File)
                .collect()
        }
        (None, Some(family)) => family_specs(family.into(), args.seed)
            .into_iter()
            .filter(|s| keep(&s.instance_name()))
            .map(InstanceSource::Generated)
            .collect(),
        (None, None) => bail!("either --dir or --family is required"),
    };
    if sources.is_empty() {
        bail!("no instances selected");
    }
    log::info!("solving {} instances", sources.len());
    let run = run_campaign(&sources, &args.solver.config(args.jobs))?;
    for (label, message) in &run.skipped {
        eprintln!("skipped {label}: {message}");
    }

    let csv =
        File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    write_csv(&run.records, BufWriter::new(csv))?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.with_extension("md"));
    let markdown = render_markdown(&aggregate(&run.records));
    fs::write(&report_path, &markdown)
        .with_context(|| format!("writing {}", report_path.display()))?;

    let optimal = run
        .records
        .iter()
        .filter(|r| r.status == Status::Optimal)
        .count();
    println!(
        "{} solved, {} optimal, {} skipped; wrote {} and {}",
        run.records.len(),
        optimal,
        run.skipped.len(),
        args.out.display(),
        report_path.display()
    );
    Ok(())
}

/// Profits and weights in `[1, 100]`, each pair in conflict with
/// probability `tenths / 10`, capacity between a fifth and a half of the total weight.
fn random_instance(rng: &mut SplitMix64, n: usize, tenths: u64, name: String) -> Result<Instance> {
    let profits: Vec<u64> = (0..n).map(|_| rng.uniform(1, 100)).collect();
    let weights: Vec<u64> = (0..n).map(|_| rng.uniform(1, 100)).collect();
    let total: u64 = weights.iter().sum();
    let capacity = rng.uniform(total / 5, total / 2);
    let edges = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.below(10) < tenths)
        .collect();
    Ok(Instance::new(name, profits, weights, capacity, edges)?)
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<()> {
    if args.min_items > args.max_items || args.max_items > 30 {
        bail!("item range must satisfy min <= max <= 30");
    }
    let mut rng = SplitMix64::new(args.seed);
    let options = SolverOptions {
        bound: args.bound.into(),
        ..Default::default()
    };
    let span = (args.max_items - args.min_items + 1) as u64;
    let mut mismatches = 0usize;
    for k in 0..args.count {
        let n = args.min_items + rng.below(span) as usize;
        let tenths = (k % 10) as u64;
        let inst = random_instance(&mut rng, n, tenths, format!("check{k}_n{n}_d0.{tenths}"))?;
        let bb = solve_bb_with(&inst, &options)?;
        let oracle = solve_oracle(&inst)?;
        if bb.status != Status::Optimal || bb.profit() != oracle.profit() {
            mismatches += 1;
            eprintln!(
                "{}: branch and bound {} {} vs oracle {}",
                inst.name(),
                bb.status,
                bb.profit(),
                oracle.profit()
            );
        }
    }
    println!("checked {} instances, {mismatches} mismatches", args.count);
    if mismatches > 0 {
        bail!("{mismatches} mismatches");
    }
    Ok(())
}

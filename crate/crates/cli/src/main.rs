use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gldp::bench::{
    build_milp, emit_profile, instance_to_json, load_instance, mps_string, read_records_csv, run_bench, table_csv,
    write_records_csv, Axis, BenchConfig, Concept, Instance,
};
use gldp::builders::{gen_scheduling, gen_strip};
use gldp::gdp::{validate, Pass};
use gldp::milp::{solve_bb, BbConfig};

#[derive(Parser)]
#[command(name = "gldp", version, about = "Disjunctive program reformulation and branch-and-bound benchmarking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance as JSON.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Number of jobs or rectangles.
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the disjunctive model of an instance and print its statistics.
    Build {
        instance: PathBuf,
        #[arg(long)]
        concept: Concept,
    },
    /// Lower an instance to a MILP and print model statistics.
    Reformulate {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Solve one (instance, concept, reformulation) triple.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        limits: Limits,
        /// Also print every variable of the incumbent.
        #[arg(long)]
        solution: bool,
    },
    /// Run a benchmark suite and write results, table and profile CSVs.
    Bench(BenchArgs),
    /// Performance profile CSV from a results CSV.
    Profile {
        results: PathBuf,
        #[arg(long, default_value = "time")]
        axis: Axis,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the MILP of an instance in free MPS format.
    ExportMps {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Scheduling,
    Strip,
}

#[derive(Args)]
struct ModelArgs {
    instance: PathBuf,
    #[arg(long)]
    concept: Concept,
    #[arg(long)]
    reform: Pass,
    /// Align disjuncts to one left-hand side, tightened to the variable boxes, so that RHR applies.
    #[arg(long)]
    auto_align: bool,
}

impl ModelArgs {
    fn build(&self) -> Result<gldp::gdp::MilpModel> {
        let inst = load_instance(&self.instance).with_context(|| format!("loading {}", self.instance.display()))?;
        Ok(build_milp(&inst, self.concept, self.reform, self.auto_align)?)
    }
}

#[derive(Args)]
struct Limits {
    #[arg(long, default_value_t = 1e-4)]
    rel_gap: f64,
    /// Seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
}

impl Limits {
    fn config(&self) -> Result<BbConfig> {
        if self.rel_gap.is_nan() || self.rel_gap < 0.0 {
            bail!("--rel-gap must be nonnegative");
        }
        let time_limit = match self.time_limit {
            Some(t) if t.is_finite() && t > 0.0 => Some(Duration::from_secs_f64(t)),
            Some(t) => bail!("--time-limit must be positive, got {t}"),
            None => None,
        };
        Ok(BbConfig { rel_gap: self.rel_gap, time_limit, node_limit: self.node_limit })
    }
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files; when none are given a suite is generated.
    instances: Vec<PathBuf>,
    /// Kind of generated suite.
    #[arg(long, value_enum, default_value = "scheduling")]
    kind: Kind,
    /// Generated sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5, 6, 7])]
    sizes: Vec<usize>,
    /// Generated instances per size.
    #[arg(long, default_value_t = 3)]
    count: u64,
    /// First seed of the generated suite.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concepts to run; all concepts matching the instances by default.
    #[arg(long, value_delimiter = ',')]
    concept: Vec<Concept>,
    #[arg(long, value_delimiter = ',', default_values_t = Pass::ALL)]
    reform: Vec<Pass>,
    #[arg(long)]
    auto_align: bool,
    #[command(flatten)]
    limits: Limits,
    /// Output directory.
    #[arg(short, long, default_value = "bench_out")]
    out: PathBuf,
}

fn write_or_print(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_milp_stats(model: &gldp::gdp::MilpModel) {
    println!("model: {}", model.name);
    println!("reformulation: {}", model.pass);
    println!("continuous: {}", model.continuous_count());
    println!("binary: {}", model.binary_count());
    println!("rows: {}", model.rows.len());
    println!("nonzeros: {}", model.rows.iter().map(|r| r.row.terms().len()).sum::<usize>());
    for (kind, count) in model.row_census() {
        println!("rows.{kind}: {count}");
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".into(), |v| format!("{v}"))
}

fn bench(args: &BenchArgs) -> Result<()> {
    let config = BenchConfig { bb: args.limits.config()?, auto_align: args.auto_align };
    let instances: Vec<(String, Instance)> = if args.instances.is_empty() {
        let mut out = Vec::new();
        for &n in &args.sizes {
            for seed in args.seed..args.seed + args.count {
                out.push(match args.kind {
                    Kind::Scheduling => (format!("sched_n{n}_s{seed}"), Instance::Scheduling(gen_scheduling(n, seed))),
                    Kind::Strip => (format!("strip_n{n}_s{seed}"), Instance::Strip(gen_strip(n, seed))),
                });
            }
        }
        out
    } else {
        args.instances
            .iter()
            .map(|p| {
                let id = p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned());
                load_instance(p).with_context(|| format!("loading {}", p.display())).map(|i| (id, i))
            })
            .collect::<Result<_>>()?
    };
    let concepts: Vec<Concept> = if args.concept.is_empty() {
        let mut c = Vec::new();
        if instances.iter().any(|(_, i)| matches!(i, Instance::Scheduling(_))) {
            c.extend(Concept::SCHEDULING);
        }
        if instances.iter().any(|(_, i)| matches!(i, Instance::Strip(_))) {
            c.extend(Concept::STRIP);
        }
        c
    } else {
        args.concept.clone()
    };

    let outcome = run_bench(&instances, &concepts, &args.reform, &config);
    for r in &outcome.rejected {
        eprintln!("rejected {} {}_{}: {}", r.instance, r.concept, r.reformulation, r.reason);
    }
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let results = args.out.join("results.csv");
    write_records_csv(&outcome.records, fs::File::create(&results)?)?;
    let time_limit = args.limits.time_limit;
    fs::write(args.out.join("table.csv"), table_csv(&outcome.records, time_limit))?;
    if !outcome.records.is_empty() {
        fs::write(args.out.join("profile_time.csv"), emit_profile(&outcome.records, Axis::Time))?;
        fs::write(args.out.join("profile_gap.csv"), emit_profile(&outcome.records, Axis::Gap))?;
    }
    let solved = outcome.records.iter().filter(|r| r.status.is_solved()).count();
    println!(
        "{} runs ({} solved), {} rejected; wrote {}",
        outcome.records.len(),
        solved,
        outcome.rejected.len(),
        args.out.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { kind, n, seed, output } => {
            let inst = match kind {
                Kind::Scheduling => Instance::Scheduling(gen_scheduling(n, seed)),
                Kind::Strip => Instance::Strip(gen_strip(n, seed)),
            };
            write_or_print(output.as_deref(), &instance_to_json(&inst))
        }
        Command::Build { instance, concept } => {
            let inst = load_instance(&instance).with_context(|| format!("loading {}", instance.display()))?;
            let gdp = concept.build(&inst)?;
            println!("model: {}", gdp.name);
            println!("continuous: {}", gdp.vars.len());
            println!("boolean: {}", gdp.bools.len());
            println!("global rows: {}", gdp.globals.len());
            println!("disjunctions: {}", gdp.disjunctions.len());
            println!("disjuncts: {}", gdp.disjunctions.iter().map(|d| d.disjuncts.len()).sum::<usize>());
            println!("logic rows: {}", gdp.logic.len());
            let diags = validate(&gdp);
            for d in &diags {
                println!("invalid: {d}");
            }
            if !diags.is_empty() {
                bail!("{} validation errors", diags.len());
            }
            Ok(())
        }
        Command::Reformulate { model } => {
            print_milp_stats(&model.build()?);
            Ok(())
        }
        Command::Solve { model, limits, solution } => {
            let milp = model.build()?;
            let r = solve_bb(&milp, &limits.config()?);
            println!("status: {}", r.status.label());
            println!("objective: {}", fmt_opt(r.objective));
            println!("bound: {}", r.bound);
            println!("gap_percent: {}", gldp::bench::gap_percent(r.objective, r.bound));
            println!("root_bound: {}", fmt_opt(r.root_bound));
            println!("nodes: {}", r.nodes);
            println!("lp_iterations: {}", r.lp_iterations);
            println!("time_s: {:.3}", r.wall_time.as_secs_f64());
            if let (true, Some(x)) = (solution, &r.solution) {
                for (v, value) in milp.vars.iter().zip(x) {
                    println!("{} = {value}", v.name);
                }
            }
            Ok(())
        }
        Command::Bench(args) => bench(&args),
        Command::Profile { results, axis, output } => {
            let f = fs::File::open(&results).with_context(|| format!("opening {}", results.display()))?;
            let records = read_records_csv(f)?;
            if records.is_empty() {
                bail!("{} has no records", results.display());
            }
            write_or_print(output.as_deref(), &emit_profile(&records, axis))
        }
        Command::ExportMps { model, output } => write_or_print(output.as_deref(), &mps_string(&model.build()?)),
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use swarmline_cli::experiment::{
    run_experiment, AlgorithmKind, ExperimentConfig, ExperimentRecord,
};
use swarmline_cli::report::{format_float, write_results_csv, write_stats_csv};
use swarmline_cli::spec::MixedModelSpec;
use swarmline_cli::{generate_mixed_model, parse_alb};
use swarmline_core::encoding::{multiple_random_keys_decode, random_keys_decode};
use swarmline_core::pipeline::{run_simultaneous, PipelineConfig, SelectionMetric};
use swarmline_core::sequencing::derive_process_times;

#[derive(Parser)]
#[command(
    name = "swarmline",
    about = "Assembly line balancing and mixed-model sequencing with swarm optimizers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the simultaneous balancing + sequencing pipeline once.
    Solve(SolveArgs),
    /// Run a repeated batch and emit results + statistics CSVs.
    Experiment(ExperimentArgs),
    /// Synthesize a mixed-model spec from a base .alb file.
    Generate(GenerateArgs),
    /// Decode a random position into a balance and a sequence (debugging).
    Decode(DecodeArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Solution approach.
    #[arg(long, default_value = "fss-sar")]
    algorithm: String,
    /// Base RNG seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Iteration budget per search stage.
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    /// Fish (or particles) per school.
    #[arg(long, default_value_t = 30)]
    school_size: usize,
    /// Distinct balancings handed to the sequencing stage.
    #[arg(long, default_value_t = 10)]
    archive_n: usize,
    /// Workstation length in cycle-time units.
    #[arg(long = "L", default_value_t = 0.95)]
    station_length: f64,
    /// Workplaces allowed per workstation.
    #[arg(long, default_value_t = 3)]
    max_workplaces: usize,
}

#[derive(Args)]
struct SolveArgs {
    /// Mixed-model spec (TOML) produced by `generate`.
    spec: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Write a one-row results CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Mixed-model spec (TOML) produced by `generate`.
    spec: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Algorithms to compare; repeat the flag or omit for all four.
    #[arg(long = "algorithms", value_delimiter = ',')]
    algorithms: Vec<String>,
    /// Pipeline runs per algorithm.
    #[arg(long, default_value_t = 45)]
    repetitions: usize,
    /// Raw runs averaged into one ANOVA observation.
    #[arg(long, default_value_t = 15)]
    group_size: usize,
    /// Output directory for results.csv and stats.csv.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    /// Base single-model .alb file.
    base: PathBuf,
    /// Number of models to synthesize.
    #[arg(long, default_value_t = 50)]
    models: usize,
    /// Total units in the production plan.
    #[arg(long, default_value_t = 998)]
    plan_size: u32,
    /// Generator seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Instance label recorded in result files.
    #[arg(long)]
    name: Option<String>,
    /// Where to write the spec TOML.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DecodeArgs {
    /// Mixed-model spec (TOML) produced by `generate`.
    spec: PathBuf,
    /// Seed for the random position being decoded.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Workstation length in cycle-time units.
    #[arg(long = "L", default_value_t = 0.95)]
    station_length: f64,
    /// Workplaces allowed per workstation.
    #[arg(long, default_value_t = 3)]
    max_workplaces: usize,
    /// How many sequence slots to print.
    #[arg(long, default_value_t = 20)]
    sequence_head: usize,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Solve(args) => solve(args),
        Command::Experiment(args) => experiment(args),
        Command::Generate(args) => generate(args),
        Command::Decode(args) => decode(args),
    }
}

fn load_spec(path: &Path) -> Result<MixedModelSpec> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read spec {}", path.display()))?;
    MixedModelSpec::from_toml(&text)
        .with_context(|| format!("cannot parse spec {}", path.display()))
}

fn parse_algorithm(raw: &str) -> Result<AlgorithmKind> {
    raw.parse::<AlgorithmKind>().map_err(anyhow::Error::from)
}

fn solve(args: SolveArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let algorithm = parse_algorithm(&args.search.algorithm)?;
    let instance = spec.to_instance(args.search.max_workplaces)?;
    let pipeline = PipelineConfig {
        balancing_search: algorithm.optimizer(
            instance.num_tasks(),
            args.search.school_size,
            args.search.iterations,
            args.search.seed,
        ),
        sequencing_search: algorithm.optimizer(
            spec.plan_size as usize,
            args.search.school_size,
            args.search.iterations,
            args.search.seed.wrapping_add(0x5EED_0FF5),
        ),
        archive_n: args.search.archive_n,
        selection_metric: SelectionMetric::CompletedWork,
        station_length: args.search.station_length,
    };
    let started = std::time::Instant::now();
    let report = run_simultaneous(&instance, &pipeline)?;
    let wall_time_ms = started.elapsed().as_millis();
    let best = &report.best;

    println!("instance       {}", spec.name);
    println!("algorithm      {algorithm}");
    println!("candidates     {}", report.candidates.len());
    println!("workstations   {}", best.balance.num_workstations);
    println!("workplaces     {}", best.balance.num_workplaces());
    println!("completed work {}", format_float(best.completed_work));
    println!("workload       {}", format_float(best.workload));
    println!("CW/WL          {}", format_float(best.cw_wl_ratio));
    println!("IUC balancing  {}", best.iuc_balancing);
    println!("IUC sequencing {}", best.iuc_sequencing);

    if let Some(out) = args.out {
        let record = ExperimentRecord {
            run_id: 0,
            algorithm: algorithm.label().to_string(),
            instance: spec.name.clone(),
            seed: args.search.seed,
            completed_work: best.completed_work,
            workload: best.workload,
            num_workplaces: best.balance.num_workplaces(),
            iuc_balancing: best.iuc_balancing,
            iuc_sequencing: best.iuc_sequencing,
            wall_time_ms,
        };
        write_results_csv(&[record], &out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let algorithms = if args.algorithms.is_empty() {
        AlgorithmKind::ALL.to_vec()
    } else {
        args.algorithms
            .iter()
            .map(|raw| parse_algorithm(raw))
            .collect::<Result<Vec<_>>>()?
    };
    let config = ExperimentConfig {
        group_size: args.group_size,
        school_size: args.search.school_size,
        iterations: args.search.iterations,
        seq_school_size: args.search.school_size,
        seq_iterations: args.search.iterations,
        archive_n: args.search.archive_n,
        station_length: args.search.station_length,
        max_workplaces: args.search.max_workplaces,
        ..ExperimentConfig::new(algorithms, args.repetitions, args.search.seed)
    };
    let output = run_experiment(&spec, &config)?;
    for failure in &output.failures {
        eprintln!(
            "run {} ({}) failed: {}",
            failure.run_id, failure.algorithm, failure.error
        );
    }
    if output.records.is_empty() {
        bail!("every run failed; nothing to write");
    }
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let results_path = args.out.join("results.csv");
    write_results_csv(&output.records, &results_path)?;
    println!("wrote {} ({} records)", results_path.display(), output.records.len());
    match &output.stats {
        Some(stats) => {
            let stats_path = args.out.join("stats.csv");
            write_stats_csv(stats, &stats_path)?;
            println!("wrote {}", stats_path.display());
            for metric in &stats.metrics {
                println!(
                    "{:<8} F = {} (df {}, {})",
                    metric.metric,
                    format_float(metric.anova.f_statistic),
                    metric.anova.df_between,
                    metric.anova.df_within
                );
            }
        }
        None => println!("stats omitted: batch too small or irregular to analyze"),
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.base)
        .with_context(|| format!("cannot read {}", args.base.display()))?;
    let base = parse_alb(&text)?;
    let name = args.name.unwrap_or_else(|| {
        format!("t{}_m{}_seed{}", base.num_tasks, args.models, args.seed)
    });
    let spec = generate_mixed_model(&base, args.models, args.plan_size, args.seed, name)?;
    fs::write(&args.out, spec.to_toml())
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    println!(
        "wrote {} ({} tasks, {} models, plan {})",
        args.out.display(),
        spec.base.num_tasks,
        spec.num_models(),
        spec.plan_size
    );
    Ok(())
}

fn decode(args: DecodeArgs) -> Result<()> {
    let spec = load_spec(&args.spec)?;
    let instance = spec.to_instance(args.max_workplaces)?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let space = swarmline_core::swarm::default_space(instance.num_tasks());
    let position = space.sample(&mut rng);
    let perm = random_keys_decode(&position);
    let balance = swarmline_core::balancing::decode_balancing(&perm, &instance)?;

    println!("permutation: {:?}", perm.order);
    println!(
        "decoded balance: {} workstations, {} workplaces, objective {}",
        balance.num_workstations,
        balance.num_workplaces(),
        format_float(-balance.fitness)
    );
    for (index, workplace) in balance.workplaces.iter().enumerate() {
        let tasks: Vec<usize> = workplace.tasks.iter().map(|t| t + 1).collect();
        println!(
            "  station {} workplace {}: load {} (displacement {}) tasks {:?}",
            workplace.station + 1,
            index + 1,
            format_float(workplace.load),
            format_float(workplace.displacement_time),
            tasks
        );
    }

    let seq_instance =
        derive_process_times(&balance, instance.models(), &instance, args.station_length);
    let seq_space = swarmline_core::swarm::default_space(seq_instance.total_jobs());
    let seq_position = seq_space.sample(&mut rng);
    let sequence = multiple_random_keys_decode(&seq_position, &seq_instance.production_levels)?;
    let (completed, workload) =
        swarmline_core::sequencing::evaluate_totals(&sequence, &seq_instance);
    let head: Vec<usize> = sequence
        .slots
        .iter()
        .take(args.sequence_head)
        .copied()
        .collect();
    println!(
        "decoded sequence: {} jobs, CW {} / WL {}; first slots {:?}",
        sequence.len(),
        format_float(completed),
        format_float(workload),
        head
    );
    Ok(())
}

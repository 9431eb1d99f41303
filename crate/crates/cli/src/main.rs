//! `nosub`: generate instances, compute optima, run experiments and print
//! decision traces.

use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use nosub::cost::{brute_force_opt, DEFAULT_SUBSET_BUDGET};
use nosub::harness::{format_trace, run_experiment, AlgorithmSpec, ExperimentConfig, InstanceSpec, OrderChoice};
use nosub::instances::GeneratedInstance;
use nosub::online::run_stream;
use nosub::{uniform_permutation, CostKind, CostModel, Error, Result, Rng};

#[derive(Parser)]
#[command(name = "nosub", version, about = "Online no-substitution k-clustering harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance; writes the dataset and `<file>.meta.json`.
    Gen {
        /// geometric_groups | increasing_gaps | k_maximal_series | separated_blobs | blobs
        generator: String,
        /// Generator parameters as key=value (values are JSON, e.g. sizes=[3,5]).
        params: Vec<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print the brute-force optimum as JSON.
    Opt {
        #[arg(short)]
        k: usize,
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value = "squared_euclidean")]
        model: CostKind,
        #[arg(long, default_value_t = DEFAULT_SUBSET_BUDGET)]
        budget: u128,
    },
    /// Run an experiment config and write report.csv and report.json.
    Run {
        #[arg(short, long)]
        config: PathBuf,
        /// Report directory; defaults to the config's `output`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Stream one dataset and print `index,take|skip,reason` per arrival.
    Trace {
        /// first_point | random_index | doubling | three_phase | max_distance | fft | take_all
        #[arg(short, long)]
        algorithm: String,
        #[arg(short, long)]
        input: PathBuf,
        /// `given` or `random:SEED`
        #[arg(long, default_value = "given")]
        order: OrderChoice,
        #[arg(short)]
        k: Option<usize>,
        /// Growth factor for doubling.
        #[arg(short)]
        c: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        alpha2: Option<f64>,
        /// Seed for the algorithm's own randomness.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "squared_euclidean")]
        model: CostKind,
    },
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn parse_params(pairs: &[String]) -> Result<Value> {
    let mut map = Map::new();
    for pair in pairs {
        let (key, raw) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected key=value, got `{pair}`")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        map.insert(key.trim().to_string(), value);
    }
    Ok(Value::Object(map))
}

fn gen(generator: String, params: &[String], output: &Path) -> Result<()> {
    let spec = InstanceSpec {
        file: None,
        generator: Some(generator),
        params: Some(parse_params(params)?),
    };
    let instance = spec.resolve(None, 0)?;
    instance.save(output)?;
    eprintln!("wrote {} points to {}", instance.n(), output.display());
    Ok(())
}

fn opt(k: usize, input: &Path, model: CostKind, budget: u128) -> Result<()> {
    let instance = GeneratedInstance::load(input)?;
    let data = &instance.dataset;
    let res = brute_force_opt(data, k, &CostModel::new(model)?, budget)?;
    let points: Vec<&[f64]> = res.centers.iter().map(|&i| data[i].coords()).collect();
    let out = json!({
        "k": k,
        "model": model,
        "cost": res.cost,
        "centers": res.centers,
        "center_points": points,
    });
    emit(&(serde_json::to_string_pretty(&out)? + "\n"))
}

fn run(config: &Path, output: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let dir = match (output, &cfg.output) {
        (Some(dir), _) => dir,
        (None, Some(out)) => match &cfg.base_dir {
            Some(base) if out.is_relative() => base.join(out),
            _ => out.clone(),
        },
        (None, None) => {
            return Err(Error::Config {
                path: "output".into(),
                message: "no output directory; pass -o".into(),
            })
        }
    };
    let report = run_experiment(&cfg)?;
    report.write(&dir)?;
    eprintln!("wrote {} trials to {}", report.rows.len(), dir.display());
    emit(&(serde_json::to_string_pretty(&report.aggregates)? + "\n"))
}

fn algorithm_spec(
    name: &str,
    k: Option<usize>,
    c: Option<f64>,
    alpha: Option<f64>,
    alpha2: Option<f64>,
) -> Result<AlgorithmSpec> {
    let need_k = || k.ok_or_else(|| Error::InvalidArgument(format!("{name} needs -k")));
    Ok(match name {
        "first_point" => AlgorithmSpec::FirstPoint,
        "random_index" => AlgorithmSpec::RandomIndex,
        "doubling" => AlgorithmSpec::Doubling { c: c.unwrap_or(2.0) },
        "three_phase" => AlgorithmSpec::ThreePhase {
            k: need_k()?,
            alpha,
            alpha2,
            take_first_point: true,
            offline: Default::default(),
        },
        "max_distance" => AlgorithmSpec::MaxDistance,
        "fft" => AlgorithmSpec::Fft { k: need_k()? },
        "take_all" => AlgorithmSpec::TakeAll,
        other => return Err(Error::InvalidArgument(format!("unknown algorithm `{other}`"))),
    })
}

#[allow(clippy::too_many_arguments)]
fn trace(
    algorithm: &str,
    input: &Path,
    order: OrderChoice,
    k: Option<usize>,
    c: Option<f64>,
    alpha: Option<f64>,
    alpha2: Option<f64>,
    seed: u64,
    model: CostKind,
) -> Result<()> {
    let spec = algorithm_spec(algorithm, k, c, alpha, alpha2)?;
    let instance = GeneratedInstance::load(input)?;
    let n = instance.n();
    let order = match order {
        OrderChoice::Given => instance.intended_order.clone(),
        OrderChoice::Random(s) => uniform_permutation(n, &mut Rng::new(s, 0))?,
    };
    let mut clusterer = spec.build(n, CostModel::new(model)?, Rng::new(seed, 0))?;
    let trace = run_stream(&mut clusterer, &instance.dataset, &order)?;
    eprintln!("centers taken: {} of {n}", trace.num_centers());
    emit(&format_trace(&trace))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen {
            generator,
            params,
            output,
        } => gen(generator, &params, &output),
        Command::Opt {
            k,
            input,
            model,
            budget,
        } => opt(k, &input, model, budget),
        Command::Run { config, output } => run(&config, output),
        Command::Trace {
            algorithm,
            input,
            order,
            k,
            c,
            alpha,
            alpha2,
            seed,
            model,
        } => trace(&algorithm, &input, order, k, c, alpha, alpha2, seed, model),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

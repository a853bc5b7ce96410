//! Command-line interface: argument definitions and subcommand implementations.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::grid::{estimate_runtime, run_grid, to_json, write_csv, write_timings_csv};
use crate::map::{roughness_map, MapOptions, WINDOW_SIDES};
use crate::raster::{read_raster, write_raster};
use crate::sample_io::{read_sample, write_sample};
use crate::MonotonicClock;
use gi0_core::{
    estimate_all, fit_and_test, gi0_sample, sample_contaminated, Clock, ContaminationSpec, EstimatorConfig,
    EstimatorKind, Gi0Params, GridSpec, Kernel, NoClock, Sample,
};

#[derive(Parser)]
#[command(name = "gi0", version, about = "Roughness estimation for the G_I^0 speckle model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Draw a sample, optionally contaminated, and write it as text.
    Sample(SampleArgs),
    /// Run the four estimators on a sample file and print a JSON report.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo grid and write per-cell statistics as CSV.
    Mc(McArgs),
    /// Fit alpha, simulate from the fit and run a two-sample KS test.
    Kstest(KsArgs),
    /// Estimate alpha in a sliding window over a raster.
    Map(MapArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    None,
    Case1,
    Case2,
    Case3,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelArg {
    Ig,
    Gamma,
}

#[derive(Args)]
struct KernelOpts {
    /// Kernel of the density estimate used by the triangular estimator.
    #[arg(long, value_enum, default_value = "ig")]
    kernel: KernelArg,
    /// Kernel bandwidth; defaults to n^(-1/2)/5.
    #[arg(long)]
    bandwidth: Option<f64>,
}

impl KernelOpts {
    fn config(&self) -> Result<EstimatorConfig> {
        let config = EstimatorConfig {
            kernel: match self.kernel {
                KernelArg::Ig => Kernel::InverseGaussian,
                KernelArg::Gamma => Kernel::Gamma,
            },
            bandwidth: self.bandwidth,
            ..EstimatorConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
pub struct SampleArgs {
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long)]
    looks: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Scale; defaults to the unit-mean value -alpha - 1.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, value_enum, default_value = "none")]
    contaminate: CaseArg,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Roughness of the Case 1 contaminant.
    #[arg(long, allow_negative_numbers = true)]
    alpha2: Option<f64>,
    /// Constant of Case 2.
    #[arg(long)]
    c: Option<f64>,
    /// Scale exponent of Case 3.
    #[arg(long)]
    k: Option<u32>,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct EstimateArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    looks: f64,
    #[command(flatten)]
    kernel: KernelOpts,
    /// Include wall times (makes the report non-reproducible).
    #[arg(long)]
    timing: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
pub struct McArgs {
    /// Grid specification in JSON; the built-in default grid when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Overrides the base seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write the results as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write mean wall time per estimator to this CSV.
    #[arg(long)]
    timings: Option<PathBuf>,
    /// Print the extrapolated runtime and exit.
    #[arg(long)]
    estimate_only: bool,
    /// No progress lines on standard error.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
pub struct KsArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    looks: f64,
    #[arg(long, default_value = "triangular")]
    estimator: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    kernel: KernelOpts,
    /// Print a CSV row instead of JSON.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
pub struct MapArgs {
    /// Raster sidecar (.json) or text matrix.
    #[arg(long, short)]
    input: PathBuf,
    /// Output sidecar path; the payload is written next to it with extension .f32.
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long)]
    looks: f64,
    #[arg(long, default_value_t = 11)]
    window: usize,
    #[arg(long, default_value = "triangular")]
    estimator: String,
    #[arg(long)]
    parallelism: Option<usize>,
    #[command(flatten)]
    kernel: KernelOpts,
}

fn parse_estimator(name: &str) -> Result<EstimatorKind> {
    EstimatorKind::parse(name).with_context(|| format!("unknown estimator {name:?} (ML, Mom12, LogCum, Triangular)"))
}

fn check_looks(looks: f64) -> Result<()> {
    if !(looks >= 1.0 && looks.is_finite()) {
        bail!("--looks must be finite and >= 1");
    }
    Ok(())
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_sample(path: &Path) -> Result<Sample> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_sample(BufReader::new(f)).with_context(|| format!("cannot read sample {}", path.display()))
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    check_looks(a.looks)?;
    let params = match a.gamma {
        Some(g) => Gi0Params::new(a.alpha, g, a.looks)?,
        None => {
            if a.alpha.is_nan() || a.alpha >= -1.0 {
                bail!("--alpha must be < -1 under the unit-mean convention (or pass --gamma)");
            }
            Gi0Params::unit_mean(a.alpha, a.looks)?
        }
    };
    if a.n == 0 {
        bail!("--n must be >= 1");
    }
    let spec = match a.contaminate {
        CaseArg::None => ContaminationSpec::None,
        CaseArg::Case1 => ContaminationSpec::Case1 {
            epsilon: a.epsilon,
            alpha2: a.alpha2.context("case1 needs --alpha2")?,
        },
        CaseArg::Case2 => ContaminationSpec::Case2 { epsilon: a.epsilon, c_value: a.c.context("case2 needs --c")? },
        CaseArg::Case3 => ContaminationSpec::Case3 { epsilon: a.epsilon, k_exponent: a.k.context("case3 needs --k")? },
    };
    spec.validate()?;
    let sample = match spec {
        ContaminationSpec::None => gi0_sample(&params, a.n, a.seed)?,
        _ => sample_contaminated(&params, &spec, a.n, a.seed)?,
    };
    let header = vec![
        ("gi0 sample".to_owned(), format!("version {}", env!("CARGO_PKG_VERSION"))),
        ("alpha".to_owned(), params.alpha().to_string()),
        ("gamma".to_owned(), params.gamma().to_string()),
        ("looks".to_owned(), params.looks().to_string()),
        ("n".to_owned(), a.n.to_string()),
        ("seed".to_owned(), a.seed.to_string()),
        ("contamination".to_owned(), serde_json::to_string(&spec)?),
    ];
    write_sample(open_output(a.output.as_deref())?, &sample, &header)?;
    Ok(())
}

fn na(v: Option<f64>) -> Value {
    v.map_or_else(|| json!("NA"), |x| json!(x))
}

fn cmd_estimate(a: EstimateArgs) -> Result<()> {
    check_looks(a.looks)?;
    let sample = load_sample(&a.input)?;
    let config = a.kernel.config()?;
    let clock = MonotonicClock::new();
    let clock: &dyn Clock = if a.timing { &clock } else { &NoClock };
    let outcomes = estimate_all(&sample, a.looks, &config, clock);
    let estimates: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            let mut v = json!({
                "estimator": o.estimator.name(),
                "status": o.status,
                "alpha_hat": na(o.alpha_hat),
                "objective_value": o.objective_value,
                "iterations": o.iterations,
                "at_boundary": o.at_boundary,
            });
            if a.timing {
                v["elapsed_seconds"] = json!(o.elapsed);
            }
            v
        })
        .collect();
    let report = json!({
        "input": a.input.display().to_string(),
        "n": sample.len(),
        "looks": a.looks,
        "kernel": config.kernel,
        "bandwidth": config.bandwidth.unwrap_or_else(|| gi0_core::default_bandwidth(sample.len())),
        "estimates": estimates,
    });
    let mut out = open_output(a.output.as_deref())?;
    writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
    Ok(())
}

fn cmd_mc(a: McArgs) -> Result<()> {
    let mut spec: GridSpec = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("invalid grid config {}", p.display()))?
        }
        None => GridSpec::default(),
    };
    if let Some(r) = a.replicates {
        spec.replicates = r;
    }
    if let Some(s) = a.seed {
        spec.base_seed = s;
    }
    spec.validate()?;
    let parallelism = a.parallelism.unwrap_or_else(default_parallelism);
    if parallelism == 0 {
        bail!("--parallelism must be >= 1");
    }
    let replicate_count = spec.cell_count() * spec.replicates;
    if a.estimate_only || replicate_count >= 10_000 {
        let secs = estimate_runtime(&spec, parallelism)?;
        if a.estimate_only {
            println!("estimated runtime: {secs:.0} s for {} cells x {} replicates", spec.cell_count(), spec.replicates);
            return Ok(());
        }
        if secs > 600.0 {
            eprintln!(
                "warning: estimated runtime {:.1} h ({} cells x {} replicates on {parallelism} threads)",
                secs / 3600.0,
                spec.cell_count(),
                spec.replicates
            );
        }
    }
    let results = run_grid(&spec, parallelism, !a.quiet)?;
    write_csv(open_output(a.output.as_deref())?, &results)?;
    if let Some(p) = &a.json {
        fs::write(p, to_json(&results)? + "\n").with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = &a.timings {
        write_timings_csv(BufWriter::new(File::create(p)?), &results)?;
    }
    Ok(())
}

fn cmd_kstest(a: KsArgs) -> Result<()> {
    check_looks(a.looks)?;
    let sample = load_sample(&a.input)?;
    let kind = parse_estimator(&a.estimator)?;
    let report = fit_and_test(&sample, a.looks, kind, a.seed, &a.kernel.config()?)?;
    if a.csv {
        let f = |v: Option<f64>| v.map_or_else(|| "NA".to_owned(), |x| x.to_string());
        println!("estimator,status,alpha_hat,statistic,p_value,n_x,n_y");
        println!(
            "{},{:?},{},{},{},{},{}",
            kind.name(),
            report.status,
            f(report.alpha_hat),
            f(report.statistic),
            f(report.p_value),
            report.n_x,
            report.n_y
        );
    } else {
        let mut v = serde_json::to_value(report)?;
        v["p_value_method"] = json!("asymptotic Kolmogorov distribution");
        println!("{}", serde_json::to_string_pretty(&v)?);
    }
    Ok(())
}

fn cmd_map(a: MapArgs) -> Result<()> {
    check_looks(a.looks)?;
    if !WINDOW_SIDES.contains(&a.window) {
        bail!("--window must be one of 3, 5, 7, 9, 11");
    }
    let input = read_raster(&a.input)?;
    let opts = MapOptions {
        window: a.window,
        looks: a.looks,
        estimator: parse_estimator(&a.estimator)?,
        config: a.kernel.config()?,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.parallelism.unwrap_or_else(default_parallelism).max(1))
        .build()?;
    let out = pool.install(|| roughness_map(&input, &opts));
    write_raster(&a.output, &out)?;
    Ok(())
}

/// Runs one parsed invocation.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sample(a) => cmd_sample(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Kstest(a) => cmd_kstest(a),
        Command::Map(a) => cmd_map(a),
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use schatten_core::funcalc::{divided_difference_symbol, strictify};
use schatten_core::linalg::schatten_norm;
use schatten_core::schur::{oscillatory_symbol, OscillatorySpec};
use schatten_core::{Descriptor, KernelParams, ScalarFunction, SchurSymbol};
use schatten_lab::config::{parse_exponent, RunConfig};
use schatten_lab::estimate::estimate_norm;
use schatten_lab::experiments::{
    full, growth, kernel, lipschitz, reconstruction, reduction, theorem2,
};
use schatten_lab::io::{format_float, read_matrix, read_symbol, write_kernel_csv, write_matrix};
use schatten_lab::report::{parameter_hash, ExperimentReport};

/// Schur multiplier norms on Schatten classes: kernel builds, norm estimates
/// and the experiment suites.
#[derive(Debug, Parser)]
#[command(name = "schatten-lab", version)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (default: $SCHATTEN_LAB_OUT, then ./schatten-lab-out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the kernel g and check its representation residuals.
    Kernel(KernelArgs),
    /// Estimate one multiplier norm.
    Norm(NormArgs),
    /// Run an experiment suite.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
struct KernelArgs {
    /// Start from the built-in grid, ignoring the config file's kernel section.
    #[arg(long)]
    defaults: bool,
    #[arg(long)]
    x_extent: Option<f64>,
    #[arg(long)]
    x_step: Option<f64>,
    #[arg(long)]
    s_extent: Option<f64>,
    #[arg(long)]
    s_step: Option<f64>,
    #[arg(long)]
    cutoff_width: Option<f64>,
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    #[arg(long)]
    starts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct SymbolSource {
    /// Symbol matrix JSON: {"n": .., "re": [[..]], "im": [[..]]}.
    #[arg(long)]
    symbol: Option<PathBuf>,
    /// All-ones n×n symbol.
    #[arg(long)]
    ones: Option<usize>,
    /// Divided-difference symbol of this function on --lambdas: a kind such
    /// as `absolute-value`, or a JSON descriptor.
    #[arg(long, requires = "lambdas")]
    function: Option<String>,
    /// Oscillatory symbol |μ_k − μ_l|^{is} on these points (needs --s).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        requires = "s"
    )]
    mus: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct NormArgs {
    #[command(flatten)]
    source: SymbolSource,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambdas: Option<Vec<f64>>,
    /// Replace f by (f(x) + εx)/(1 + ε).
    #[arg(long)]
    strictify: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// Schatten exponent in (1, ∞).
    #[arg(long, value_parser = parse_exponent)]
    p: f64,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Witness output path (default: <out>/norm-witness-<hash>.json).
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lipschitz,
    Theorem2,
    LemmaGrowth,
    Reconstruction,
    IntegerReduction,
    Full,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    suite: Suite,
    /// Start from the built-in configuration, ignoring --config.
    #[arg(long)]
    defaults: bool,
    /// Exponent grid, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_exponent)]
    p: Option<Vec<f64>>,
    /// Size grid, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<usize>,
    #[command(flatten)]
    estimator: EstimatorArgs,
}

fn base_config(cli: &Cli, defaults: bool) -> anyhow::Result<RunConfig> {
    let mut config = match (&cli.config, defaults) {
        (Some(path), false) => RunConfig::from_file(path)?,
        _ => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if cli.out.is_some() {
        config.out = cli.out.clone();
    }
    if cli.threads.is_some() {
        config.threads = cli.threads;
    }
    Ok(config)
}

fn apply_estimator(config: &mut RunConfig, args: &EstimatorArgs) {
    if let Some(v) = args.starts {
        config.estimator.starts = v;
    }
    if let Some(v) = args.max_iters {
        config.estimator.max_iters = v;
    }
    if let Some(v) = args.tol {
        config.estimator.tol = v;
    }
}

fn finish(config: &RunConfig) -> anyhow::Result<()> {
    config.validate()?;
    if let Some(threads) = config.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("building the thread pool")?;
    }
    Ok(())
}

/// Writes the reports, prints where they went and any failures; true when
/// every check passed.
fn emit(config: &RunConfig, reports: &[ExperimentReport]) -> anyhow::Result<bool> {
    let dir = config.output_dir();
    let mut passed = true;
    for report in reports {
        let (csv, json) = report.write(&dir)?;
        println!(
            "{}: {} rows -> {}, {}",
            report.experiment_id,
            report.table.rows.len(),
            csv.display(),
            json.display()
        );
        for line in report.failure_listing() {
            eprintln!("FAIL {line}");
        }
        passed &= report.passed();
    }
    Ok(passed)
}

fn cmd_kernel(cli: &Cli, args: &KernelArgs) -> anyhow::Result<bool> {
    let mut config = base_config(cli, false)?;
    if args.defaults {
        config.kernel = KernelParams::default();
    }
    let k = &mut config.kernel;
    for (slot, value) in [
        (&mut k.x_extent, args.x_extent),
        (&mut k.x_step, args.x_step),
        (&mut k.s_extent, args.s_extent),
        (&mut k.s_step, args.s_step),
        (&mut k.cutoff_width, args.cutoff_width),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    finish(&config)?;
    let g = kernel::build(&config.kernel)?;
    let (report, residuals) = kernel::residual_report(&config, &g)?;
    let dir = config.output_dir();
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv = dir.join(format!("kernel-{}.csv", report.hash()));
    write_kernel_csv(&csv, &g)?;
    println!("kernel: {} points -> {}", g.len(), csv.display());
    println!("max residual: {}", format_float(residuals.max_residual()));
    emit(&config, &[report])
}

fn parse_function(text: &str) -> anyhow::Result<ScalarFunction> {
    let json = if text.trim_start().starts_with('{') {
        text.to_owned()
    } else {
        serde_json::json!({ "kind": text }).to_string()
    };
    let descriptor: Descriptor =
        serde_json::from_str(&json).with_context(|| format!("bad function {text:?}"))?;
    Ok(ScalarFunction::new(descriptor)?)
}

fn norm_symbol(args: &NormArgs) -> anyhow::Result<SchurSymbol> {
    let src = &args.source;
    if let Some(path) = &src.symbol {
        return Ok(read_symbol(path)?);
    }
    if let Some(n) = src.ones {
        if n == 0 {
            bail!("--ones needs a positive size");
        }
        return Ok(SchurSymbol::ones(n));
    }
    if let Some(text) = &src.function {
        let mut f = parse_function(text)?;
        if let Some(eps) = args.strictify {
            f = if f.is_nondecreasing() {
                strictify(&f, eps)?
            } else {
                if !(eps > 0.0 && eps.is_finite()) {
                    bail!("--strictify needs a positive epsilon");
                }
                ScalarFunction::new(Descriptor::Combination {
                    identity_weight: eps / (1.0 + eps),
                    inner_weight: 1.0 / (1.0 + eps),
                    inner: Box::new(f.descriptor().clone()),
                })?
            };
        }
        let lambdas = args.lambdas.as_deref().unwrap_or_default();
        return Ok(divided_difference_symbol(&f, lambdas)?);
    }
    if let Some(mus) = &src.mus {
        let s = args.s.context("--mus needs --s")?;
        return Ok(oscillatory_symbol(&OscillatorySpec::new(mus.clone(), s)?));
    }
    bail!("no symbol source given")
}

fn cmd_norm(cli: &Cli, args: &NormArgs) -> anyhow::Result<bool> {
    let mut config = base_config(cli, false)?;
    apply_estimator(&mut config, &args.estimator);
    finish(&config)?;
    let phi = norm_symbol(args)?;
    let est = estimate_norm(&phi, args.p, &config.estimator)?;

    let path = match &args.witness {
        Some(path) => path.clone(),
        None => {
            let dir = config.output_dir();
            std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            let key = serde_json::json!({
                "config": config.echo(),
                "p": format_float(args.p),
                "symbol": schatten_lab::io::MatrixFile::from_matrix(phi.coefficients())?,
            });
            dir.join(format!("norm-witness-{}.json", parameter_hash(&key)))
        }
    };
    write_matrix(&path, &est.witness)?;
    let w = read_matrix(&path)?;
    let ratio = schatten_norm(&phi.apply(&w)?, args.p)? / schatten_norm(&w, args.p)?;
    let witness_ok = (ratio - est.value).abs() <= 1e-9 * est.value.max(1.0);

    println!("value: {}", format_float(est.value));
    println!("p: {}", format_float(est.p));
    println!("n: {}", phi.dim());
    println!("iterations: {}", est.iterations);
    println!("starts: {}", est.starts);
    println!("converged: {}", est.converged);
    println!("witness: {}", path.display());
    println!(
        "witness_check: {}",
        if witness_ok { "ok" } else { "failed" }
    );
    if !witness_ok {
        eprintln!(
            "FAIL witness ratio {} differs from estimate {}",
            ratio, est.value
        );
    }
    Ok(witness_ok)
}

fn cmd_experiment(cli: &Cli, args: &ExperimentArgs) -> anyhow::Result<bool> {
    let mut config = base_config(cli, args.defaults)?;
    apply_estimator(&mut config, &args.estimator);
    if let Some(p) = &args.p {
        config.suite.p_grid = p.clone();
        config.suite.growth_p_grid = p.clone();
    }
    if let Some(n) = &args.n {
        config.suite.n_grid = n.clone();
        config.suite.growth_n_grid = n.clone();
    }
    if let Some(trials) = args.trials {
        config.suite.trials = trials;
    }
    finish(&config)?;

    let reports = match args.suite {
        Suite::Lipschitz => vec![lipschitz::run(&config)?.report],
        Suite::Theorem2 => vec![theorem2::run(&config)?.report],
        Suite::LemmaGrowth => vec![growth::run(&config)?.report],
        Suite::Reconstruction => {
            let g = kernel::build(&config.kernel)?;
            vec![reconstruction::run(&config, &g)?]
        }
        Suite::IntegerReduction => vec![
            reduction::run_reduction(&config)?,
            reduction::run_restriction(&config)?,
        ],
        Suite::Full => {
            let reports = full::run(&config)?;
            let passed = emit(&config, &reports)?;
            let index = full::write_all(&config, &reports, &config.output_dir())?;
            println!("full: index -> {}", index.display());
            return Ok(passed);
        }
    };
    emit(&config, &reports)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Kernel(args) => cmd_kernel(&cli, args),
        Command::Norm(args) => cmd_norm(&cli, args),
        Command::Experiment(args) => cmd_experiment(&cli, args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

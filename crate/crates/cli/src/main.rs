use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dyadic_lab::lab::{run_experiment, Config, Experiment, Exponent, Report};

#[derive(Parser)]
#[command(name = "dyadic-lab", version, about = "Numerical experiments on bi-parameter dyadic model operators and their commutators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact verification suites.
    Verify {
        suite: Suite,
        #[command(flatten)]
        opts: Opts,
    },
    /// Commutator norm estimates across resolutions.
    Norms(Opts),
    /// Empirical constant of the product-BMO duality estimate.
    Duality(Opts),
    /// Restricted weak-type test through the exceptional set.
    WeakType(Opts),
    /// Norm growth against complexity.
    ComplexitySweep(Opts),
    /// Weighted sum of paraproducts and shifts.
    Synthesis(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Measures,
}

#[derive(Args)]
struct Opts {
    /// TOML file with the same keys as the flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for report.json and tables/*.csv; without it the report
    /// is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Mesh resolution.
    #[arg(long = "L")]
    level: Option<u8>,
    #[arg(long)]
    n: Option<u8>,
    #[arg(long)]
    m: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Monte-Carlo grid samples.
    #[arg(long)]
    shifts: Option<usize>,
    /// Rational exponents such as 4/3.
    #[arg(long)]
    p: Option<Exponent>,
    #[arg(long)]
    q: Option<Exponent>,
    #[arg(long)]
    r: Option<Exponent>,
    /// Complexity, e.g. 1,0,1.
    #[arg(long, value_parser = parse_triple)]
    k: Option<[u8; 3]>,
    #[arg(long, value_parser = parse_triple)]
    v: Option<[u8; 3]>,
    #[arg(long)]
    kmax: Option<u8>,
    /// Resolutions to compare, e.g. 4,5,6.
    #[arg(long, value_delimiter = ',')]
    levels: Option<Vec<u8>>,
    /// Duality collection sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    density: Option<f64>,
    /// Enumerate every grid pair instead of sampling.
    #[arg(long)]
    exact_expectation: bool,
}

fn parse_triple(s: &str) -> std::result::Result<[u8; 3], String> {
    let v: Vec<u8> = s.split(',').map(|x| x.trim().parse::<u8>().map_err(|e| format!("`{x}`: {e}"))).collect::<std::result::Result<_, _>>()?;
    v.try_into().map_err(|_| format!("`{s}` needs three comma-separated entries"))
}

impl Opts {
    fn config(&self, experiment: Experiment) -> Result<Config> {
        let mut c = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => Config::default(),
        };
        c.experiment = experiment;
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $(if let Some(x) = self.$f.clone() { c.$g = x; })* };
        }
        set!(level => level, n => n, m => m, seed => seed, trials => trials, shifts => shifts, p => p, q => q,
            r => r, k => k, v => v, kmax => kmax, levels => levels, sizes => sizes, alpha => alpha, density => density);
        c.exact_expectation |= self.exact_expectation;
        Ok(c)
    }
}

fn emit(report: &Report, out: Option<&PathBuf>) -> Result<()> {
    for a in &report.assertions {
        eprintln!("{} {}: {:e} ({})", if a.passed { "pass" } else { "FAIL" }, a.name, a.value, a.detail);
    }
    match out {
        Some(dir) => report.write(dir).with_context(|| format!("writing to {}", dir.display()))?,
        None => println!("{}", report.to_json()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, opts) = match &cli.command {
        Command::Verify { suite: Suite::Identities, opts } => (Experiment::Identities, opts),
        Command::Verify { suite: Suite::Measures, opts } => (Experiment::Measures, opts),
        Command::Norms(o) => (Experiment::Norms, o),
        Command::Duality(o) => (Experiment::Duality, o),
        Command::WeakType(o) => (Experiment::WeakType, o),
        Command::ComplexitySweep(o) => (Experiment::ComplexitySweep, o),
        Command::Synthesis(o) => (Experiment::Synthesis, o),
    };
    let report = match opts.config(experiment).and_then(|c| Ok(run_experiment(&c)?)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&report, opts.out.as_ref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use clap::{Args, Parser, Subcommand};
use fasris::experiment::{
    comparison_methods, eta_report, fit_blocks_report, load_config, parse_methods, parse_values,
    point_rows, write_csv, write_sweep, EvalSettings, SweepSpec, SweepVariable, ThresholdMode,
};
use fasris::{Error, FitDomain, Result, SystemParams};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Outage of a fluid-antenna receiver behind a reconfigurable intelligent surface.
#[derive(Parser, Debug)]
#[command(name = "fasris", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Number of fluid-antenna ports.
    #[arg(long = "K", global = true)]
    k: Option<usize>,
    /// Number of RIS elements.
    #[arg(long = "M", global = true)]
    m: Option<usize>,
    /// Aperture in wavelengths.
    #[arg(long = "W", global = true)]
    w: Option<f64>,
    /// Mean power of the transmitter-RIS links.
    #[arg(long, global = true)]
    eps1: Option<f64>,
    /// Mean power of the RIS-port links.
    #[arg(long, global = true)]
    eps2: Option<f64>,
    /// Transmit power.
    #[arg(long, global = true)]
    power: Option<f64>,
    /// Noise power.
    #[arg(long, global = true)]
    noise: Option<f64>,
    /// Target rate in bit/s/Hz.
    #[arg(long, global = true)]
    rate: Option<f64>,
    /// `e-psi`, `rate-snr` or an explicit gain threshold.
    #[arg(long, global = true, default_value = "e-psi")]
    threshold: String,
    /// Comma-separated methods: gamma, gaussian-fbc, gaussian-vbc, mc-exact, mc-decomposition.
    #[arg(long, global = true)]
    methods: Option<String>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true, default_value_t = fasris::experiment::DEFAULT_TRIALS)]
    trials: u64,
    /// Monte Carlo seed, shared by every point of a sweep.
    #[arg(long, global = true, env = "FASRIS_SEED", default_value_t = 1)]
    seed: u64,
    /// Outer Gauss–Chebyshev parameter U (U + 1 nodes).
    #[arg(long, global = true, default_value_t = fasris::gamma_outage::DEFAULT_ORDER)]
    outer_order: usize,
    /// Inner Gauss–Chebyshev parameter.
    #[arg(long, global = true, default_value_t = fasris::gamma_outage::DEFAULT_ORDER)]
    inner_order: usize,
    /// Gauss–Hermite order for the Gaussian baselines.
    #[arg(long, global = true, default_value_t = fasris::gaussian::DEFAULT_HERMITE_ORDER)]
    hermite_order: usize,
    /// Matrix the block model is fitted to: jakes or pearson.
    #[arg(long, global = true, default_value = "jakes")]
    fit: String,
    /// Output file (CSV).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key = value file with scenario parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the requested methods at one scenario.
    Point,
    /// Sweep K, M or W and write a CSV with a plot script next to it.
    Sweep {
        #[arg(long)]
        vary: String,
        /// `start:stop:step` or a comma list; defaults to the reference grid.
        #[arg(long)]
        values: Option<String>,
        /// Fill the runtime_ms column (makes the CSV run-dependent).
        #[arg(long)]
        timing: bool,
    },
    /// Print the fitted block-correlation structure.
    FitBlocks,
    /// Print the gain correlation as a function of channel correlation.
    Eta {
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
}

impl Common {
    fn params(&self) -> Result<SystemParams> {
        let mut p = SystemParams::default();
        if let Some(path) = &self.config {
            p = load_config(path, p)?;
        }
        if let Some(k) = self.k {
            p.k = k;
        }
        if let Some(m) = self.m {
            p.m = m;
        }
        if let Some(w) = self.w {
            p.w = w;
        }
        if let Some(x) = self.eps1 {
            p.eps1 = x;
        }
        if let Some(x) = self.eps2 {
            p.eps2 = x;
        }
        if let Some(x) = self.power {
            p.tx_power = x;
        }
        if let Some(x) = self.noise {
            p.noise_power = x;
        }
        if let Some(x) = self.rate {
            p.rate = x;
        }
        p.validate()?;
        Ok(p)
    }

    fn settings(&self, timing: bool) -> Result<EvalSettings> {
        Ok(EvalSettings {
            outer_order: self.outer_order,
            inner_order: self.inner_order,
            hermite_order: self.hermite_order,
            mc_trials: self.trials,
            seed: self.seed,
            fit: self.fit.parse()?,
            timing,
        })
    }
}

fn log_run(p: &SystemParams, threshold: ThresholdMode, settings: &EvalSettings) {
    eprintln!(
        "# M={} K={} W={} eps1={} eps2={} power={} noise={} rate={} threshold={} fit={} trials={} seed={}",
        p.m,
        p.k,
        p.w,
        p.eps1,
        p.eps2,
        p.tx_power,
        p.noise_power,
        p.rate,
        threshold,
        settings.fit,
        settings.mc_trials,
        settings.seed
    );
}

fn default_values(variable: SweepVariable, p: &SystemParams) -> Vec<f64> {
    match variable {
        SweepVariable::K => SweepSpec::ports().values,
        SweepVariable::M => SweepSpec::elements(p.w, p.k).values,
        SweepVariable::W => SweepSpec::apertures(p.m, p.k).values,
    }
}

fn run(cli: Cli) -> Result<()> {
    let common = &cli.common;
    let params = common.params()?;
    let threshold: ThresholdMode = common.threshold.parse()?;
    match cli.command {
        Command::Point => {
            let settings = common.settings(false)?;
            let methods = match &common.methods {
                Some(text) => parse_methods(text)?,
                None => comparison_methods(),
            };
            log_run(&params, threshold, &settings);
            let rows = point_rows(&params, &methods, threshold, &settings)?;
            match &common.out {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|source| Error::Io {
                        path: path.display().to_string(),
                        source,
                    })?;
                    write_csv(&rows, &settings, file, path)
                }
                None => write_csv(
                    &rows,
                    &settings,
                    std::io::stdout().lock(),
                    Path::new("<stdout>"),
                ),
            }
        }
        Command::Sweep {
            vary,
            values,
            timing,
        } => {
            let settings = common.settings(timing)?;
            let variable: SweepVariable = vary.parse()?;
            let out = common
                .out
                .clone()
                .ok_or_else(|| Error::Usage("sweep needs --out <path>".into()))?;
            let spec = SweepSpec {
                variable,
                values: match values {
                    Some(text) => parse_values(&text)?,
                    None => default_values(variable, &params),
                },
                fixed: params,
                methods: match &common.methods {
                    Some(text) => parse_methods(text)?,
                    None => comparison_methods(),
                },
                threshold,
            };
            log_run(&params, threshold, &settings);
            let script = write_sweep(&spec, &settings, &out)?;
            eprintln!("wrote {} and {}", out.display(), script.display());
            Ok(())
        }
        Command::FitBlocks => {
            let fit: FitDomain = common.fit.parse()?;
            let (_, report) = fit_blocks_report(&params, fit)?;
            print!("{report}");
            Ok(())
        }
        Command::Eta { points } => {
            print!("{}", eta_report(&params, points)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fasris: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

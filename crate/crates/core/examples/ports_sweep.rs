//! Outage versus the number of ports at M = 5, W = 1, written as CSV with a
//! matplotlib script next to it. Usage: `ports_sweep [out.csv] [trials]`.

use fasris::experiment::{write_sweep, EvalSettings, SweepSpec};
use std::path::PathBuf;

fn main() -> fasris::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "ports.csv".into()));
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let settings = EvalSettings {
        mc_trials: trials,
        seed: 2,
        ..Default::default()
    };
    let script = write_sweep(&SweepSpec::ports(), &settings, &out)?;
    println!("wrote {} and {}", out.display(), script.display());
    Ok(())
}

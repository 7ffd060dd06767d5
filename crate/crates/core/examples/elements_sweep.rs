//! Outage versus the number of RIS elements for (W, K) = (1, 5) and (1.5, 7).
//! Usage: `elements_sweep [out-dir] [trials]`.

use fasris::experiment::{write_sweep, EvalSettings, SweepSpec};
use std::path::PathBuf;

fn main() -> fasris::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let settings = EvalSettings {
        mc_trials: trials,
        seed: 3,
        ..Default::default()
    };
    for (w, k) in [(1.0, 5), (1.5, 7)] {
        let out = dir.join(format!("elements_w{w}_k{k}.csv"));
        let script = write_sweep(&SweepSpec::elements(w, k), &settings, &out)?;
        println!("wrote {} and {}", out.display(), script.display());
    }
    Ok(())
}

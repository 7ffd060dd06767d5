//! Outage versus aperture for (M, K) = (5, 5) and (10, 7).
//! Usage: `aperture_sweep [out-dir] [trials]`.

use fasris::experiment::{write_sweep, EvalSettings, SweepSpec};
use std::path::PathBuf;

fn main() -> fasris::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let settings = EvalSettings {
        mc_trials: trials,
        seed: 4,
        ..Default::default()
    };
    for (m, k) in [(5, 5), (10, 7)] {
        let out = dir.join(format!("aperture_m{m}_k{k}.csv"));
        let script = write_sweep(&SweepSpec::apertures(m, k), &settings, &out)?;
        println!("wrote {} and {}", out.display(), script.display());
    }
    Ok(())
}

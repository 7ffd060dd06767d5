//! Every method at one scenario. Usage: `outage_point [M] [K] [W] [trials]`.

use fasris::experiment::{run_point, EvalSettings, ThresholdMode};
use fasris::{Method, SystemParams};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> fasris::Result<()> {
    let params = SystemParams::new(arg(1, 5), arg(2, 5), arg(3, 1.0));
    let settings = EvalSettings {
        mc_trials: arg(4, 1_000_000),
        seed: 7,
        ..Default::default()
    };
    let estimates = run_point(&params, &Method::ALL, ThresholdMode::EPsi, &settings)?;
    println!("M = {}, K = {}, W = {}", params.m, params.k, params.w);
    for e in &estimates {
        let se = e
            .std_error
            .map(|s| format!("+/- {s:.5}"))
            .unwrap_or_default();
        println!(
            "{:<17} {:.5} {:<14} {} ms",
            e.method.tag(),
            e.p_out,
            se,
            e.diagnostic("runtime_ms").unwrap_or("?")
        );
    }
    Ok(())
}

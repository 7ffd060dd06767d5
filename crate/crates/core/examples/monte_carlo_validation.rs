//! Checks the simulator against the analytic second-order statistics and the
//! Gamma quadrature against its own generative model.

use fasris::gamma_outage::{gamma_params, outage_gamma};
use fasris::monte_carlo::exact_gain_statistics;
use fasris::{build_port_correlation, channel_moments, fit_port_blocks, simulate_decomposition};
use fasris::{FitDomain, SystemParams};

fn main() -> fasris::Result<()> {
    let params = SystemParams::new(5, 5, 1.0);
    let moments = channel_moments(&params);
    let stats = exact_gain_statistics(&params, 1_000_000, 11)?;
    let corr = build_port_correlation(&params)?;

    println!("port  mean (sim / exact)     variance (sim / exact)");
    for k in 0..params.k {
        println!(
            "{k:>4}  {:.4} / {:.4}        {:.4} / {:.4}",
            stats.mean[k], moments.mean, stats.variance[k], moments.variance
        );
    }
    println!("\ncorrelation with port 0 (sim / eta)");
    for k in 1..params.k {
        println!(
            "{k:>4}  {:.4} / {:.4}",
            stats.correlation[(0, k)],
            corr.omega[(0, k)]
        );
    }

    println!("\nGamma quadrature vs sampled decomposition, threshold = E_psi");
    for (m, k, w) in [(2, 3, 1.0), (5, 7, 1.5), (10, 7, 1.0)] {
        let p = SystemParams::new(m, k, w);
        let lambda = channel_moments(&p).mean;
        let s = fit_port_blocks(&p, FitDomain::Jakes)?;
        let q = outage_gamma(&p, &s, lambda, 64, 64)?;
        let mc = simulate_decomposition(&gamma_params(&p), &s, lambda, 1_000_000, 5)?;
        let se = mc.std_error.unwrap_or(0.0);
        println!(
            "M={m:<3} K={k} W={w:<4} quadrature {:.5}  sampled {:.5} +/- {:.5}  ({:+.1} se)",
            q.p_out,
            mc.p_out,
            se,
            (q.p_out - mc.p_out) / se
        );
    }
    Ok(())
}

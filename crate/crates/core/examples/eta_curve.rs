//! Correlation between two port gains as a function of the correlation of
//! their RIS-side channels, next to the Jakes coefficient at each port spacing.

use fasris::channel::{eta_floor_closed_form, pearson_eta};
use fasris::{build_port_correlation, SystemParams};

fn main() -> fasris::Result<()> {
    let params = SystemParams::new(5, 8, 1.0);

    println!("{:>6} {:>10}", "g", "eta(g)");
    for i in 0..=10 {
        let g = f64::from(i) / 10.0;
        println!("{g:>6.2} {:>10.6}", pearson_eta(g, &params)?);
    }
    println!("floor (closed form) = {:.10}", eta_floor_closed_form());

    let corr = build_port_correlation(&params)?;
    println!("\nK = {}, W = {}", params.k, params.w);
    println!("{:>8} {:>10} {:>10}", "spacing", "g", "eta(|g|)");
    for d in 0..params.k {
        println!(
            "{d:>8} {:>10.6} {:>10.6}",
            corr.g[(0, d)],
            corr.eta_by_distance[d]
        );
    }
    Ok(())
}

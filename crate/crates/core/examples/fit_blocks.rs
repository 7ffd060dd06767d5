//! Block-correlation fits for a few port counts, in both fitting domains.

use fasris::experiment::fit_blocks_report;
use fasris::{FitDomain, SystemParams};

fn main() -> fasris::Result<()> {
    for k in [2, 5, 7, 10] {
        for fit in [FitDomain::Jakes, FitDomain::Pearson] {
            let (structure, report) = fit_blocks_report(&SystemParams::new(5, k, 1.0), fit)?;
            print!("{report}");
            println!("mean intra-block rho = {:.4}\n", structure.mean_intra_rho());
        }
    }
    Ok(())
}

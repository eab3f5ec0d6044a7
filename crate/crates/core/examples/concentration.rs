//! The modified Aubin-Talenti family as ε → 0 for N = 2, p = 1.5.

use mtlab::constants::ExponentPair;
use mtlab::experiments::sweep_concentration;
use mtlab::families::DEFAULT_EPSILONS;
use mtlab::radial::QuadratureSpec;

fn main() -> mtlab::Result<()> {
    let pair = ExponentPair::new(2, 1.5)?;
    let report = sweep_concentration(&pair, &DEFAULT_EPSILONS, &QuadratureSpec::default())?;
    for series in ["lq_power", "f_p", "h"] {
        println!("{series}");
        for row in report.series(series) {
            println!("  eps = {:.0e}  value = {:.10}  target = {:.10}", row.parameter, row.computed, row.target);
        }
    }
    for c in &report.checks {
        println!("{:?} {}: {} ({})", c.kind, c.name, c.passed, c.detail);
    }
    Ok(())
}

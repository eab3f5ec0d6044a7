//! F_p(s) against exp(α_2 s²) as p → 2.

use mtlab::experiments::{grid_toward, pointwise_limit_study};
use mtlab::radial::QuadratureSpec;

fn main() -> mtlab::Result<()> {
    let grid = grid_toward(2.0, 1.9, 2.0 - 1e-6, 6)?;
    let report = pointwise_limit_study(2, &[0.3, 1.0, 3.0], &grid, &QuadratureSpec::default())?;
    for row in &report.rows {
        println!(
            "{:<10} s = {:<5} 2 - p = {:.0e}  rel gap = {:.3e}",
            row.series,
            row.aux.map_or("-".to_string(), |s| s.to_string()),
            2.0 - row.parameter,
            row.rel_gap
        );
    }
    Ok(())
}

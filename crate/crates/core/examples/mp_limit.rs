//! M_p approaches the Carleson-Chang limit as p → N.

use mtlab::experiments::{grid_toward, sweep_mp_limit};

fn main() -> mtlab::Result<()> {
    for dim in [2u32, 3, 4] {
        let n = f64::from(dim);
        let grid = grid_toward(n, n - 0.1, n - 1e-5, 5)?;
        let report = sweep_mp_limit(dim, &grid)?;
        println!("N = {dim}");
        for row in report.series("gamma_form") {
            println!("  N - p = {:.0e}  M_p = {:.12}  gap = {:.3e}", n - row.parameter, row.computed, row.abs_gap);
        }
        for c in &report.checks {
            println!("  {}: {}", c.name, if c.passed { "ok" } else { "FAILED" });
        }
    }
    Ok(())
}

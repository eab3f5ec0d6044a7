//! Randomized inequality suites with a fixed seed.

use mtlab::experiments::{verify_suite, Suite};
use mtlab::radial::QuadratureSpec;

fn main() -> mtlab::Result<()> {
    let quad = QuadratureSpec::default();
    for suite in Suite::ALL {
        let report = verify_suite(suite.name(), 2000, 7, None, &quad)?;
        let worst = report.rows.iter().map(|r| r.computed).fold(f64::INFINITY, f64::min);
        println!("{:<13} trials {:>5}  worst margin {worst:+.3e}  pass {}", suite.name(), report.rows.len(), report.passed());
    }
    Ok(())
}

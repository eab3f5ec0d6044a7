//! Rescaled F_p functional against the Moser-Trudinger functional for
//! fixed unit-norm profiles.

use mtlab::experiments::{grid_toward, semicontinuity_study};
use mtlab::families::make_moser;
use mtlab::radial::{PiecewiseLinear, QuadratureSpec, RadialProfile};

fn main() -> mtlab::Result<()> {
    let grid = grid_toward(2.0, 1.9, 2.0 - 1e-5, 5)?;
    let tent = PiecewiseLinear::tent(std::f64::consts::PI.powf(-0.5));
    let profiles = vec![
        ("tent".to_string(), RadialProfile::from(tent)),
        ("moser(2)".to_string(), make_moser(2, 2.0)?),
    ];
    let report = semicontinuity_study(2, &grid, &profiles, &QuadratureSpec::default())?;
    for row in report.rows.iter().filter(|r| r.series.starts_with("rescaled")) {
        println!("{:<18} 2 - p = {:.0e}  {:.10}  -> {:.10}", row.series, 2.0 - row.parameter, row.computed, row.target);
    }
    Ok(())
}

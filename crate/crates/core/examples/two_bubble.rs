//! Two half-energy tents, the second rescaled by n.

use mtlab::constants::ExponentPair;
use mtlab::experiments::two_bubble_study;
use mtlab::families::{half_energy_tent, DEFAULT_BUBBLE_SCALES};
use mtlab::radial::{QuadratureSpec, RadialProfile};

fn main() -> mtlab::Result<()> {
    let pair = ExponentPair::new(2, 1.5)?;
    let tent: RadialProfile = half_energy_tent(&pair)?.into();
    let report = two_bubble_study(&pair, &DEFAULT_BUBBLE_SCALES, &tent, &tent, &QuadratureSpec::default())?;
    for row in &report.rows {
        println!("{:<14} n = {:>4}  {:.12}  (limit {:.12})", row.series, row.parameter, row.computed, row.target);
    }
    Ok(())
}

//! Multistart ascent of the rescaled functional on a small mesh.

use mtlab::constants::{ClosedFormConstants, ExponentPair};
use mtlab::maximizer::{maximize, MaximizerConfig};
use mtlab::radial::QuadratureSpec;

fn main() -> mtlab::Result<()> {
    let pair = ExponentPair::new(2, 1.5)?;
    let cfg = MaximizerConfig {
        knots: 16,
        max_iters: 40,
        ..MaximizerConfig::default()
    };
    let res = maximize(&pair, &cfg, &QuadratureSpec::default())?;
    for (i, s) in res.starts.iter().enumerate() {
        println!(
            "{i} {:<22} {:<17} {:.8} -> {:.8}  r_half = {:.3e}",
            s.init.to_string(),
            s.outcome.to_string(),
            s.initial_value,
            s.value,
            s.half_energy_radius
        );
    }
    let m_p = ClosedFormConstants::new(&pair)?.m_p.unwrap();
    println!("best {:.10} from start {} (analytic: {}), M_p = {m_p:.10}", res.value, res.winner, res.winner_is_analytic);
    Ok(())
}

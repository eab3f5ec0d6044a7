//! Closed-form constants for a few (N, p) pairs.

use mtlab::constants::{ClosedFormConstants, ExponentPair};

fn main() -> mtlab::Result<()> {
    println!("{:>3} {:>6} {:>10} {:>14} {:>14} {:>14}", "N", "p", "S_p", "M_p", "M_p (Gamma)", "CC(N)");
    for (n, p) in [(2, 1.5), (2, 1.9), (3, 2.0), (3, 2.9), (4, 3.5), (2, 1.2)] {
        let pair = ExponentPair::new(n, p)?;
        let c = ClosedFormConstants::new(&pair)?;
        let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.10}"));
        println!(
            "{n:>3} {p:>6} {:>10.6} {:>14} {:>14} {:>14.10}",
            c.sobolev,
            show(c.m_p),
            show(c.m_p_gamma_form),
            c.cc_limit
        );
    }
    Ok(())
}

//! Pointwise radial bound for a Moser profile, and the Alvino form at p = N.

use mtlab::constants::ExponentPair;
use mtlab::families::MoserProfile;
use mtlab::radial::{alvino_bound, radial_bound, radial_lemma_check, QuadratureSpec, RadialProfile};

fn main() -> mtlab::Result<()> {
    let quad = QuadratureSpec::default();
    let moser = MoserProfile::new(2, 3.0)?;
    let edge = moser.plateau_radius();
    let u = RadialProfile::analytic(moser);
    let pair = ExponentPair::new(2, 1.8)?;
    let radii = [1e-3, edge, 0.2, 0.5, 0.9];
    let report = radial_lemma_check(&u, &pair, &radii, &quad)?;
    println!("‖∇u‖_p = {:.10}", report.grad_norm);
    for pt in &report.points {
        println!("r = {:.4e}  |u| = {:.8}  bound = {:.8}  margin = {:+.3e}", pt.radius, pt.value, pt.bound, pt.margin);
    }
    println!("Alvino bound versus p = N - 1e-6:");
    let near = ExponentPair::new(2, 2.0 - 1e-6)?;
    for r in [0.1, 0.5, 0.9] {
        println!("  r = {r}  {:.8}  {:.8}", alvino_bound(2, r)?, radial_bound(&near, r)?);
    }
    Ok(())
}

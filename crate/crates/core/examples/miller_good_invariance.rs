//! A Miller–Good change of variables rewrites the potential but leaves
//! the transmission probability unchanged.
//!
//! cargo run --release --example miller_good_invariance

use transmission_bounds::bounds::TrialFunction;
use transmission_bounds::millergood::{transform_with_j, verify_invariance, CoordinateChange};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::SolverConfig;

fn main() -> transmission_bounds::Result<()> {
    let cfg = SolverConfig::default();
    let slice = EnergySlice::new(PotentialProfile::named("sech2", &Params::new())?, 0.8)?;

    let bump = TrialFunction::bump(1.0, 0.6, 0.3, 1.2);
    let mg = transform_with_j(&slice, &bump)?;
    println!("X'(x) = 1 + 0.6 sech²((x - 0.3)/1.2)");
    println!("{:>6} {:>10} {:>12} {:>12}", "x", "X(x)", "k²(x)", "K²(X)");
    for i in 0..=8 {
        let x = -4.0 + i as f64;
        let big = mg.X_of_x(x);
        println!("{x:>6.1} {big:>10.5} {:>12.6} {:>12.6}", slice.k2(x), mg.k2_transformed(big));
    }

    println!();
    let changes = [
        ("j constant 2", CoordinateChange::Jacobian(TrialFunction::constant(2.0))),
        ("j bump", CoordinateChange::Jacobian(bump)),
        ("J tanh interpolant", CoordinateChange::Amplitude(TrialFunction::tanh_interpolant(1.0, 1.5, 0.0, 1.0))),
    ];
    for (label, change) in &changes {
        let r = verify_invariance(&slice, change, &cfg)?;
        println!("{label:<20} T = {:.12}  T' = {:.12}  |ΔT| = {:.1e}", r.t_original, r.t_transformed, r.difference);
    }
    Ok(())
}

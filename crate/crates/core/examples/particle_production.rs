//! Read the scattering problem as a parametric oscillator: the Bogoliubov
//! coefficients give the number of produced particles, and every
//! transmission bound turns into an upper bound on that number.
//!
//! cargo run --release --example particle_production

use transmission_bounds::bounds::to_particle_bound;
use transmission_bounds::optimize::{best_bound, OptimizeConfig};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::{transmission, SolverConfig};

fn main() -> transmission_bounds::Result<()> {
    let p = PotentialProfile::named("sech2", &Params::new())?;
    println!("{:>5} {:>12} {:>12} {:>14} {:>12}", "E", "|α|²", "|β|²", "|α|²-|β|²-1", "N bound");
    for e in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let slice = EnergySlice::new(p.clone(), e)?;
        let r = transmission(&slice, &SolverConfig::default())?;
        // |α|² = 1/T and |β|² = R/T for unit incoming flux.
        let alpha2 = 1.0 / r.transmission;
        let beta2 = r.reflection / r.transmission;
        let best = best_bound(&slice, &OptimizeConfig::default());
        let n = to_particle_bound(&best).map(|b| b.n_bound).unwrap_or(f64::INFINITY);
        println!("{e:>5.2} {alpha2:>12.6} {beta2:>12.6} {:>14.1e} {n:>12.6}", alpha2 - beta2 - 1.0);
    }
    Ok(())
}

//! Below the top of a barrier the low-energy bound can be far stronger
//! than the older quadratic one. Compare them on a wide shallow and a tall
//! narrow square barrier of equal area.
//!
//! cargo run --release --example low_energy_stringency

use transmission_bounds::bounds::{bound_low_energy, bound_old_low_energy};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::{transmission, SolverConfig};

fn main() -> transmission_bounds::Result<()> {
    for (v0, l) in [(0.01, 100.0), (100.0, 0.01)] {
        let params = Params::from([("V0".to_string(), v0), ("L".to_string(), l)]);
        let p = PotentialProfile::named("square", &params)?;
        println!("V0 = {v0}, L = {l}");
        println!("{:>8} {:>12} {:>12} {:>12}", "E/V0", "T", "new", "old");
        for f in [0.1, 0.5, 0.9, 1.5] {
            let slice = EnergySlice::new(p.clone(), f * v0)?;
            let t = transmission(&slice, &SolverConfig::default())?.transmission;
            let new = bound_low_energy(&slice)?.bound;
            let old = bound_old_low_energy(&slice)?.bound;
            println!("{f:>8.2} {t:>12.4e} {new:>12.4e} {old:>12.4e}");
        }
        println!();
    }
    Ok(())
}

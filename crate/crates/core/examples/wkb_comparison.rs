//! Tunnelling through a square barrier: the two WKB estimates against the
//! rigorous WKB-like bound and the exact answer. The estimates are not
//! bounds and can sit on either side of T.
//!
//! cargo run --release --example wkb_comparison

use transmission_bounds::bounds::{bound_wkb_like, wkb_estimate};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::{transmission, SolverConfig};

fn main() -> transmission_bounds::Result<()> {
    let params = Params::from([("V0".to_string(), 1.0), ("L".to_string(), 10.0)]);
    let p = PotentialProfile::named("square", &params)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "E", "T", "sech² est", "exp est", "bound");
    for e in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let slice = EnergySlice::new(p.clone(), e)?;
        let t = transmission(&slice, &SolverConfig::default())?.transmission;
        let w = wkb_estimate(&slice)?;
        let b = bound_wkb_like(&slice)?;
        println!("{e:>5.2} {t:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", w.sech2_form, w.exp_form, b.bound);
    }
    Ok(())
}

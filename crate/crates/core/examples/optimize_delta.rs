//! Scan the free cut-off Δ of the two Δ-dependent bounds and compare the
//! scan with the optimiser's choice.
//!
//! cargo run --release --example optimize_delta

use transmission_bounds::bounds::{bound_delta_mg, bound_special, SpecialCase};
use transmission_bounds::optimize::{optimize_delta, DeltaFamily, OptimizeConfig};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};

fn main() -> transmission_bounds::Result<()> {
    let p = PotentialProfile::named("gaussian", &Params::from([("V0".to_string(), 2.0)]))?;
    let slice = EnergySlice::new(p, 1.0)?;
    let k = slice.k_inf()?;

    println!("{:>8} {:>14} {:>14}", "Δ/k∞", "delta-cut", "delta-mg");
    for i in 1..=10 {
        let d = k * i as f64 / 10.0;
        let cut = bound_special(&slice, &SpecialCase::DeltaCut(d)).map(|b| b.bound).unwrap_or(f64::NAN);
        let mg = bound_delta_mg(&slice, d).map(|b| b.bound).unwrap_or(f64::NAN);
        println!("{:>8.2} {cut:>14.8} {mg:>14.8}", d / k);
    }

    let cfg = OptimizeConfig::default();
    for (label, fam) in [("delta-cut", DeltaFamily::DeltaCut), ("delta-mg", DeltaFamily::DeltaMg)] {
        let r = optimize_delta(&slice, fam, &cfg)?;
        println!(
            "{label}: best Δ/k∞ = {:.4}, T ≥ {:.8} after {} evaluations",
            r.best_params["delta"] / k,
            r.best_bound.bound,
            r.evaluations
        );
    }
    Ok(())
}

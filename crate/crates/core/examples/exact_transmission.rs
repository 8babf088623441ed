//! Exact transmission for the built-in potentials, compared with the
//! closed forms where one exists.
//!
//! cargo run --release --example exact_transmission

use transmission_bounds::profiles::{make_corpus, EnergySlice};
use transmission_bounds::solver::{oracle_transmission, transmission, SolverConfig};

fn main() -> transmission_bounds::Result<()> {
    let cfg = SolverConfig::default();
    println!("{:<14} {:>6} {:>18} {:>18} {:>10} {:>8}", "potential", "E", "T", "T_closed", "|defect|", "grid");
    for p in make_corpus() {
        let threshold = p.v_minus_inf().max(p.v_plus_inf());
        for e in [threshold + 0.25, threshold + 1.0, threshold + 4.0] {
            let slice = EnergySlice::new(p.clone(), e)?;
            let r = transmission(&slice, &cfg)?;
            let closed = match oracle_transmission(p.name(), p.params(), e) {
                Ok(t) => format!("{t:.15}"),
                Err(_) => "-".to_string(),
            };
            println!(
                "{:<14} {:>6.2} {:>18.15} {:>18} {:>10.1e} {:>8}",
                p.name(),
                e,
                r.transmission,
                closed,
                r.unitarity_defect,
                r.grid_size
            );
        }
    }
    Ok(())
}

//! Every bound family on one potential and energy, next to the exact T.
//! Families whose preconditions fail are listed with the reason.
//!
//! cargo run --release --example bound_catalog -- [potential] [energy]

use transmission_bounds::bounds::{
    bound_basic, bound_basic_weak, bound_chi_form, bound_delta_mg, bound_improved, bound_low_energy,
    bound_old_low_energy, bound_schwartzian, bound_special, bound_wkb_like, BoundResult, ImprovedForm, SpecialCase,
    TrialFunction,
};
use transmission_bounds::optimize::{best_bound, OptimizeConfig};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::{transmission, SolverConfig};
use transmission_bounds::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "gaussian".into());
    let energy: f64 = args.next().map(|s| s.parse().expect("energy must be a number")).unwrap_or(1.5);
    let slice = EnergySlice::new(PotentialProfile::named(&name, &Params::new())?, energy)?;
    let t = transmission(&slice, &SolverConfig::default())?.transmission;
    println!("{name} at E = {energy}: T = {t:.12}\n");

    let k = slice.k_inf()?;
    let h_k = TrialFunction::local_wave_number(&slice);
    let one = TrialFunction::constant(1.0);
    let h_const = TrialFunction::constant(k);
    let rows: Vec<(&str, Result<BoundResult>)> = vec![
        ("basic, h = k", bound_basic(&slice, &h_k)),
        ("weak, h = k", bound_basic_weak(&slice, &h_k)),
        ("hconst", bound_special(&slice, &SpecialCase::HConst)),
        ("monotone-h", bound_special(&slice, &SpecialCase::MonotoneH(None))),
        ("single-extremum", bound_special(&slice, &SpecialCase::SingleExtremum(None))),
        ("kmin", bound_special(&slice, &SpecialCase::KMin)),
        ("delta-cut, Δ = k∞/2", bound_special(&slice, &SpecialCase::DeltaCut(0.5 * k))),
        ("improved HJ, J = 1", bound_improved(&slice, ImprovedForm::BigHBigJ, &h_const, &one)),
        ("chi-form, χ = 0", bound_chi_form(&slice, &h_const, &TrialFunction::constant(0.0))),
        ("schwartzian", bound_schwartzian(&slice)),
        ("low-energy", bound_low_energy(&slice)),
        ("old low-energy", bound_old_low_energy(&slice)),
        ("wkb-like", bound_wkb_like(&slice)),
        ("delta-mg, Δ = k∞/2", bound_delta_mg(&slice, 0.5 * k)),
        ("best", Ok(best_bound(&slice, &OptimizeConfig::default()))),
    ];
    for (label, r) in rows {
        match r {
            Ok(b) if b.divergent => println!("{label:<22} divergent"),
            Ok(b) => println!("{label:<22} θ = {:<12.6} T ≥ {:<12.8} slack {:.2e}", b.theta, b.bound, t - b.bound),
            Err(e) => println!("{label:<22} n/a ({e})"),
        }
    }
    Ok(())
}

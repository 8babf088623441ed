//! Acceptance suite. Runs every criterion in sequence (so wall-clock limits
//! are measured without other tests competing for the CPU), prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.
//! Built without the libtest harness so the report is never captured.
//!
//! cargo test --test acceptance

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use transmission_bounds::bounds::{
    bound_basic, bound_basic_weak, bound_chi_form, bound_delta_mg, bound_improved, bound_low_energy,
    bound_old_low_energy, bound_schwartzian, bound_special, bound_wkb_like, k2_min, sech2, to_particle_bound,
    wkb_estimate, BoundResult, ImprovedForm, SpecialCase, TrialFunction,
};
use transmission_bounds::cli::{sweep_row, ConfigFile, Settings};
use transmission_bounds::millergood::{verify_invariance, CoordinateChange};
use transmission_bounds::optimize::{best_bound, OptimizeConfig};
use transmission_bounds::profiles::{make_corpus, EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::{transmission, SolverConfig};
use transmission_bounds::Error;

type Outcome = Result<String, String>;

fn params(kv: &[(&str, f64)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn slice(name: &str, kv: &[(&str, f64)], e: f64) -> EnergySlice {
    EnergySlice::new(PotentialProfile::named(name, &params(kv)).unwrap(), e).unwrap()
}

fn exact_t(s: &EnergySlice) -> f64 {
    transmission(s, &SolverConfig::default()).unwrap().transmission
}

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

// Closed forms, written out here independently of the library.

fn square_t(v0: f64, l: f64, e: f64) -> f64 {
    let d = e - v0;
    let ratio = if d > 0.0 {
        (d.sqrt() * l).sin().powi(2) / d
    } else if d < 0.0 {
        ((-d).sqrt() * l).sinh().powi(2) / -d
    } else {
        l * l
    };
    1.0 / (1.0 + v0 * v0 * ratio / (4.0 * e))
}

fn step_t(v0: f64, e: f64) -> f64 {
    let (a, b) = (e.sqrt(), (e - v0).sqrt());
    4.0 * a * b / (a + b).powi(2)
}

fn sech2_t(v0: f64, a: f64, e: f64) -> f64 {
    let s = (PI * e.sqrt() * a).sinh().powi(2);
    let disc = 1.0 - 4.0 * v0 * a * a;
    let c = if disc >= 0.0 { (0.5 * PI * disc.sqrt()).cos() } else { (0.5 * PI * (-disc).sqrt()).cosh() };
    s / (s + c * c)
}

fn c1_oracles() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for i in 1..=50 {
        let f = 10.0 * i as f64 / 50.0;
        let cases = [
            (slice("square", &[("V0", 1.0), ("L", 1.0)], f), square_t(1.0, 1.0, f)),
            (slice("sharp-step", &[("V0", 1.0)], 1.0 + f), step_t(1.0, 1.0 + f)),
            (slice("sech2", &[("V0", 1.0), ("a", 1.0)], f), sech2_t(1.0, 1.0, f)),
        ];
        for (s, t) in cases {
            worst = worst.max((exact_t(&s) - t).abs());
            n += 1;
        }
    }
    let el = start.elapsed();
    check(
        worst < 1e-6 && el < Duration::from_secs(10),
        format!("{n} energies, max |T - T_closed| = {worst:.2e} (< 1e-6), {:.2} s (< 10 s)", el.as_secs_f64()),
    )
}

/// Default-parameter bounds at one slice; precondition failures are skipped.
fn default_bounds(s: &EnergySlice) -> Vec<(String, Result<BoundResult, Error>)> {
    let p = s.profile();
    let (c, w) = (p.center(), p.scale());
    let (km, kp) = (s.k_minus_inf(), s.k_plus_inf());
    let positive = k2_min(s, s.window().unwrap()) > 0.0;
    let big_h = if km == kp { TrialFunction::constant(km) } else { TrialFunction::tanh_interpolant(km, kp, c, w) };
    let h = if positive { TrialFunction::local_wave_number(s) } else { big_h.clone() };
    let big_j = TrialFunction::bump(1.0, 0.5, c, 2.0 * w);
    let chi = TrialFunction::sech_bump(0.0, 0.3, c, w);
    let d = km.min(kp);
    let mut out: Vec<(String, Result<BoundResult, Error>)> = vec![
        ("basic".into(), bound_basic(s, &h)),
        ("basic-interp".into(), bound_basic(s, &big_h)),
        ("weak".into(), bound_basic_weak(s, &h)),
        ("hconst".into(), bound_special(s, &SpecialCase::HConst)),
        ("monotone-h".into(), bound_special(s, &SpecialCase::MonotoneH(None))),
        ("single-extremum".into(), bound_special(s, &SpecialCase::SingleExtremum(None))),
        ("delta-cut".into(), bound_special(s, &SpecialCase::DeltaCut(d))),
        ("kmin".into(), bound_special(s, &SpecialCase::KMin)),
        ("chi-form".into(), bound_chi_form(s, &big_h, &chi)),
        ("schwartzian".into(), bound_schwartzian(s)),
        ("low-energy".into(), bound_low_energy(s)),
        ("old-low-energy".into(), bound_old_low_energy(s)),
        ("wkb-like".into(), bound_wkb_like(s)),
        ("delta-mg".into(), bound_delta_mg(s, d)),
    ];
    let hj2 = big_h.mul(&big_j.powf(2.0));
    out.push(("improved-HJ".into(), bound_improved(s, ImprovedForm::BigHBigJ, &big_h, &big_j)));
    out.push(("improved-hJ".into(), bound_improved(s, ImprovedForm::HBigJ, &hj2, &big_j)));
    out.push(("improved-hj".into(), bound_improved(s, ImprovedForm::Hj, &hj2, &big_j.powf(-2.0))));
    out
}

fn c2_soundness(thetas: &mut Vec<f64>) -> Outcome {
    let start = Instant::now();
    let cfg = OptimizeConfig::default();
    let mut checked = 0usize;
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for p in make_corpus() {
        let thr = p.v_minus_inf().max(p.v_plus_inf());
        for i in 1..=50 {
            let e = thr + 3.0 * i as f64 / 50.0;
            let s = EnergySlice::new(p.clone(), e).unwrap();
            let t = exact_t(&s);
            let mut results = default_bounds(&s);
            let best = best_bound(&s, &cfg);
            for d in best.diagnostics.iter().filter(|d| d.name.starts_with("candidate:")) {
                let b = BoundResult::new(best.family, f64::NAN, Params::new(), Vec::new());
                results.push((d.name.clone(), Ok(BoundResult { bound: d.value, ..b })));
            }
            results.push(("best".into(), Ok(best)));
            for (name, r) in results {
                match r {
                    Ok(b) if b.divergent => {}
                    Ok(b) => {
                        checked += 1;
                        if b.theta.is_finite() {
                            thetas.push(b.theta);
                        }
                        worst = worst.max(b.bound - t);
                        if b.bound > t + 1e-8 {
                            violations.push(format!("{} E={e} {name}: {} > {t}", p.name(), b.bound));
                        }
                    }
                    Err(e) if e.is_precondition() => {}
                    Err(x) => errors.push(format!("{} E={e} {name}: {x}", p.name())),
                }
            }
        }
    }
    let el = start.elapsed();
    for v in violations.iter().chain(&errors).take(10) {
        println!("    {v}");
    }
    check(
        violations.is_empty() && errors.is_empty() && el < Duration::from_secs(60),
        format!(
            "{checked} bounds on 7 potentials x 50 energies, {} violations, {} numerical errors, \
             max(bound - T) = {worst:.2e} (<= 1e-8), {:.1} s (< 60 s)",
            violations.len(),
            errors.len(),
            el.as_secs_f64()
        ),
    )
}

fn c3_saturation() -> Outcome {
    let (v0, l, e) = (1.0, 2.0, 0.5);
    let s = slice("square", &[("V0", v0), ("L", l)], e);
    let closed = sech2(v0 * l / (2.0 * e.sqrt()));
    let hc = bound_special(&s, &SpecialCase::HConst).unwrap().bound;
    let t = exact_t(&s);
    let da = (hc - closed).abs().max((t - closed).abs());

    let e = 1.7;
    let s = slice("sharp-step", &[("V0", 1.0)], e);
    let closed = step_t(1.0, e);
    let weak = bound_basic_weak(&s, &TrialFunction::local_wave_number(&s)).unwrap().bound;
    let t = exact_t(&s);
    let db = (weak - closed).abs().max((t - closed).abs());
    check(da < 1e-6 && db < 1e-6, format!("square at E = V0/2: {da:.2e}; sharp step, h = k: {db:.2e} (< 1e-6)"))
}

fn c4_invariance() -> Outcome {
    let cfg = SolverConfig::default();
    let mut worst: f64 = 0.0;
    let mut n = 0;
    let cases = [
        slice("sech2", &[], 0.7),
        slice("gaussian", &[], 1.3),
        slice("smooth-square", &[], 0.6),
        slice("square", &[], 2.0),
    ];
    for s in &cases {
        let c = s.profile().center();
        let changes = [
            CoordinateChange::Jacobian(TrialFunction::constant(2.5)),
            CoordinateChange::Jacobian(TrialFunction::bump(1.0, 0.8, c + 0.2, 1.1)),
            CoordinateChange::Jacobian(TrialFunction::tanh_interpolant(1.0, 1.8, c, 1.0)),
            CoordinateChange::Amplitude(TrialFunction::tanh_interpolant(1.0, 0.7, c, 1.5)),
        ];
        for ch in &changes {
            let r = verify_invariance(s, ch, &cfg).map_err(|e| format!("{}: {e}", s.profile().name()))?;
            worst = worst.max(r.difference);
            n += 1;
        }
    }
    check(worst < 1e-6, format!("{n} transforms on 4 potentials, max |T' - T| = {worst:.2e} (< 1e-6)"))
}

fn c5_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let cases = [slice("sech2", &[], 0.8), slice("gaussian", &[], 2.0), slice("step", &[], 1.6)];
    for s in &cases {
        let (km, kp) = (s.k_minus_inf(), s.k_plus_inf());
        let big_h = TrialFunction::tanh_interpolant(km, kp, 0.1, 1.3);
        let big_j = TrialFunction::bump(1.0, 0.4, -0.2, 0.9);
        let h = big_h.mul(&big_j.powf(2.0));
        let j = big_j.powf(-2.0);
        let a = bound_improved(s, ImprovedForm::BigHBigJ, &big_h, &big_j).unwrap().theta;
        let b = bound_improved(s, ImprovedForm::HBigJ, &h, &big_j).unwrap().theta;
        let c = bound_improved(s, ImprovedForm::Hj, &h, &j).unwrap().theta;
        worst = worst.max((a - b).abs()).max((a - c).abs()).max((b - c).abs());
    }
    check(worst < 1e-8, format!("3 slices, max theta spread across forms = {worst:.2e} (< 1e-8)"))
}

fn c6_reductions() -> Outcome {
    let mut msgs = Vec::new();
    let mut ok = true;

    let mut d_improved: f64 = 0.0;
    for s in [slice("gaussian", &[], 1.5), slice("sech2", &[], 0.5), slice("step", &[], 2.0)] {
        let (km, kp) = (s.k_minus_inf(), s.k_plus_inf());
        let h = TrialFunction::tanh_interpolant(km, kp, 0.3, 0.8);
        let one = TrialFunction::constant(1.0);
        let base = bound_basic(&s, &h).unwrap().theta;
        for form in [ImprovedForm::BigHBigJ, ImprovedForm::HBigJ, ImprovedForm::Hj] {
            d_improved = d_improved.max((bound_improved(&s, form, &h, &one).unwrap().theta - base).abs());
        }
    }
    ok &= d_improved < 1e-10;
    msgs.push(format!("J = 1 vs baseline {d_improved:.1e} (< 1e-10)"));

    let s = slice("gaussian", &[], 1.5);
    let kmin = k2_min(&s, s.window().unwrap()).sqrt();
    let target = bound_special(&s, &SpecialCase::KMin).unwrap().theta;
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-4, 1e-6, 1e-8] {
        let th = bound_special(&s, &SpecialCase::DeltaCut(kmin * (1.0 + eps))).unwrap().theta;
        last = (th - target).abs();
    }
    ok &= last < 1e-6;
    msgs.push(format!("delta-cut -> kmin {last:.1e} (< 1e-6)"));

    let mut exact = true;
    for s in [slice("gaussian", &[], 1.5), slice("zero", &[], 1.0), slice("sech2", &[], 3.0)] {
        let w = bound_wkb_like(&s).unwrap();
        let h = bound_special(&s, &SpecialCase::HConst).unwrap();
        let zeros = ["penetration", "kappa_peak", "width"].iter().all(|n| w.diagnostic(n) == Some(0.0));
        exact &= zeros && w.diagnostic("allowed") == Some(h.theta) && w.theta == h.theta && w.bound == h.bound;
    }
    ok &= exact;
    msgs.push(format!("wkb-like = hconst termwise: {exact}"));
    check(ok, msgs.join("; "))
}

fn c7_stringency() -> Outcome {
    // Condition sqrt(V_max) < (1/2) * integral of V, in units with 2m = 1.
    let wide = (0.01, 100.0);
    let tall = (100.0, 0.01);
    let holds = |(v0, l): (f64, f64)| v0.sqrt() < 0.5 * v0 * l;
    if !holds(wide) || holds(tall) {
        return Err("test barriers do not straddle the condition".into());
    }
    let thetas = |(v0, l): (f64, f64), e: f64| {
        let s = slice("square", &[("V0", v0), ("L", l)], e);
        (bound_low_energy(&s).unwrap().theta, bound_old_low_energy(&s).unwrap().theta)
    };
    let mut ok = true;
    let mut msgs = Vec::new();
    for f in [1e-3, 1e-2] {
        let (n, o) = thetas(wide, f * wide.0);
        ok &= n < o;
        msgs.push(format!("wide E={:.0e}: new {n:.3} < old {o:.3}", f * wide.0));
        let (n, o) = thetas(tall, f * tall.0);
        ok &= n > o;
        msgs.push(format!("tall E={:.0e}: new {n:.3} > old {o:.3}", f * tall.0));
    }
    check(ok, msgs.join("; "))
}

fn c8_bogoliubov(thetas: &[f64]) -> Outcome {
    let mut worst: f64 = 0.0;
    for &th in thetas {
        let b = BoundResult::new(transmission_bounds::bounds::BoundFamily::Basic, th, Params::new(), Vec::new());
        let n = to_particle_bound(&b).unwrap().n_bound;
        let s = b.bound;
        let lhs = (1.0 - s) / s;
        let sinh2 = th.sinh().powi(2);
        worst = worst.max((lhs - sinh2).abs() / sinh2.max(1.0)).max((n - sinh2).abs() / sinh2.max(1.0));
    }
    let settings = Settings::from_config(&ConfigFile::default()).unwrap();
    let mut worst_n: f64 = 0.0;
    for e in [0.3, 0.9, 2.5] {
        let row = sweep_row(&slice("gaussian", &[], e), &settings).unwrap();
        let n = (1.0 - row.t_exact) / row.t_exact;
        worst_n = worst_n.max((row.n_exact - n).abs() / n.max(1.0));
    }
    check(
        worst < 1e-12 && worst_n < 1e-12,
        format!(
            "{} thetas, max rel |(1-sech^2)/sech^2 - sinh^2| = {worst:.1e}; N_exact column {worst_n:.1e} (< 1e-12)",
            thetas.len()
        ),
    )
}

fn c9_wkb() -> Outcome {
    let s = slice("square", &[("V0", 1.0), ("L", 10.0)], 0.5);
    let w = wkb_estimate(&s).unwrap();
    let b = bound_wkb_like(&s).unwrap().bound;
    let t = exact_t(&s);
    let ratio = w.exp_form / w.sech2_form;
    check(
        w.penetration_integral >= 5.0 && (0.9..=1.1).contains(&ratio) && b <= t,
        format!(
            "integral kappa = {:.3}, exp/sech^2 = {ratio:.6} in [0.9, 1.1], bound {b:.3e} <= T {t:.3e}",
            w.penetration_integral
        ),
    )
}

fn c10_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_tbound"))
            .args(["sweep", "--potential", "gaussian", "--params", "V0=2", "--emin", "0.1", "--emax", "4", "--n", "50"])
            .output()
            .expect("run tbound")
    };
    let a = run();
    let b = run();
    if !a.status.success() || !b.status.success() {
        return Err(format!("sweep failed: {}", String::from_utf8_lossy(&a.stderr)));
    }
    let lines = a.stdout.iter().filter(|&&c| c == b'\n').count();
    check(
        a.stdout == b.stdout && lines == 51,
        format!("two sweeps of {} rows, byte-identical: {}", lines - 1, a.stdout == b.stdout),
    )
}

fn main() {
    let mut thetas = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("oracle equivalence", c1_oracles()),
        ("soundness sweep", c2_soundness(&mut thetas)),
        ("saturation", c3_saturation()),
        ("Miller-Good invariance", c4_invariance()),
        ("form equivalence", c5_forms()),
        ("reduction lattice", c6_reductions()),
        ("stringency condition", c7_stringency()),
        ("Bogoliubov identity", c8_bogoliubov(&thetas)),
        ("WKB sanity", c9_wkb()),
        ("CLI determinism", c10_determinism()),
    ];
    let mut failed = 0;
    for (i, (name, r)) in results.iter().enumerate() {
        match r {
            Ok(m) => println!("PASS {:>2} {name}: {m}", i + 1),
            Err(m) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {m}", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

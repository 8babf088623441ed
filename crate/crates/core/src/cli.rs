//! Command-line front end shared by the `tbound` binary.
//!
//! Results go to `out`, warnings and errors to `err`. Exit codes: 0 ok,
//! 1 numerical failure, 2 usage error, 3 violated precondition.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_basic, bound_basic_weak, bound_delta_mg, bound_improved, bound_low_energy, bound_old_low_energy,
    bound_schwartzian, bound_special, bound_wkb_like, to_particle_bound, wkb_estimate, BoundResult, ImprovedForm,
    SpecialCase, TrialFunction,
};
use crate::error::Error;
use crate::millergood::{verify_invariance, CoordinateChange};
use crate::numerics::NumericsConfig;
use crate::optimize::{best_bound, optimize_delta, optimize_trial, DeltaFamily, OptimizeConfig, TrialSearch};
use crate::profiles::{EnergySlice, Params, PotentialProfile, CORPUS};
use crate::solver::{oracle_transmission, transmission, SolverConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// Column order of the sweep output.
pub const SWEEP_HEADER: [&str; 12] = [
    "E",
    "T_exact",
    "R_exact",
    "unitarity_defect",
    "b_hconst",
    "b_low_energy",
    "b_wkb_like",
    "b_delta_mg",
    "b_schwartzian",
    "b_best",
    "N_exact",
    "N_bound_best",
];

#[derive(Debug, Parser)]
#[command(name = "tbound", version, about = "Exact transmission and rigorous lower bounds for 1D barriers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// Potential name (see `corpus`).
    #[arg(long)]
    potential: String,
    /// Parameter overrides, `k1=v1,k2=v2`.
    #[arg(long, default_value = "")]
    params: String,
    /// File of `key = value` lines overriding numeric defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluation budget per optimised trial family.
    #[arg(long)]
    budget: Option<usize>,
    /// Asymptotic flatness threshold.
    #[arg(long)]
    tail_tol: Option<f64>,
    /// Relative convergence threshold of the solver.
    #[arg(long)]
    refine_tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate exact T and every headline bound over an energy grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        emin: f64,
        #[arg(long)]
        emax: f64,
        #[arg(long, default_value_t = 50)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Spacing::Linear)]
        spacing: Spacing,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Emit NaN rows instead of aborting when the solver fails.
        #[arg(long)]
        keep_going: bool,
    },
    /// Evaluate one bound family at one energy (JSON).
    Bound {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        energy: f64,
        /// hconst, monotone-h, single-extremum, delta-cut, kmin, basic, weak,
        /// improved, low-energy, old-low-energy, wkb-like, wkb-estimate,
        /// delta-mg, schwartzian, best.
        #[arg(long)]
        family: String,
        #[arg(long)]
        delta: Option<f64>,
        /// Optimise the free parameter(s) of the family.
        #[arg(long)]
        optimize: bool,
        /// Improved-bound form: hj, hJ or HJ.
        #[arg(long, default_value = "HJ")]
        form: String,
    },
    /// Check that a Miller–Good transform leaves T unchanged.
    Invariance {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        energy: f64,
        /// identity, constant, bump, sech-bump, interp or exp.
        #[arg(long, default_value = "identity")]
        j: String,
        /// Parameters of the j family, `k1=v1,...`.
        #[arg(long, default_value = "")]
        j_params: String,
        /// `j` uses X' = f, `J` uses X' = f^-2.
        #[arg(long, default_value = "j")]
        form: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// List the built-in potentials and their default parameters.
    Corpus {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

/// Numeric settings readable from a `--config` file.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub tail_tol: Option<f64>,
    pub root_tol: Option<f64>,
    pub max_depth: Option<u32>,
    pub n_scan: Option<usize>,
    pub divergence_tol: Option<f64>,
    pub n_init: Option<usize>,
    pub refine_tol: Option<f64>,
    pub max_refine: Option<u32>,
    pub budget: Option<usize>,
    pub delta_grid: Option<usize>,
    pub golden_evals: Option<usize>,
}

/// Every tunable, after merging defaults, config file and flags.
#[derive(Debug, Clone)]
pub struct Settings {
    pub numerics: NumericsConfig,
    pub solver: SolverConfig,
    pub optimize: OptimizeConfig,
}

impl Settings {
    pub fn from_config(file: &ConfigFile) -> Result<Self, Error> {
        let mut s = Settings {
            numerics: NumericsConfig::default(),
            solver: SolverConfig::default(),
            optimize: OptimizeConfig::default(),
        };
        let q = &mut s.numerics.quad;
        if let Some(v) = file.abs_tol {
            q.abs_tol = v;
        }
        if let Some(v) = file.rel_tol {
            q.rel_tol = v;
        }
        if let Some(v) = file.tail_tol {
            q.tail_tol = v;
            s.solver.tail_tol = v;
        }
        if let Some(v) = file.max_depth {
            q.max_depth = v;
        }
        if let Some(v) = file.root_tol {
            s.numerics.root_tol = v;
        }
        if let Some(v) = file.n_scan {
            s.numerics.n_scan = v;
        }
        if let Some(v) = file.divergence_tol {
            s.numerics.divergence_tol = v;
        }
        if let Some(v) = file.n_init {
            s.solver.n_init = v;
        }
        if let Some(v) = file.refine_tol {
            s.solver.refine_tol = v;
        }
        if let Some(v) = file.max_refine {
            s.solver.max_refine = v;
        }
        if let Some(v) = file.budget {
            s.optimize.budget = v;
        }
        if let Some(v) = file.delta_grid {
            s.optimize.delta_grid = v;
        }
        if let Some(v) = file.golden_evals {
            s.optimize.golden_evals = v;
        }
        Ok(s)
    }

    fn validate(&self) -> Result<(), Error> {
        self.numerics.validate()?;
        self.solver.validate()?;
        self.optimize.validate()
    }
}

/// Parse `k1=v1,k2=v2`; an empty string gives no overrides.
pub fn parse_params(s: &str) -> Result<Params, Error> {
    let mut p = Params::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) =
            item.split_once('=').ok_or_else(|| Error::InvalidParam(format!("expected key=value, got `{item}`")))?;
        let v: f64 =
            v.trim().parse().map_err(|_| Error::InvalidParam(format!("`{}` is not a number in `{item}`", v.trim())))?;
        if p.insert(k.trim().to_string(), v).is_some() {
            return Err(Error::InvalidParam(format!("parameter `{}` given twice", k.trim())));
        }
    }
    Ok(p)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownProfile(_)
        | Error::UnknownParam { .. }
        | Error::InvalidParam(_)
        | Error::InvalidEnergy { .. }
        | Error::InvalidConfig(_) => EXIT_USAGE,
        e if e.is_precondition() => EXIT_PRECONDITION,
        _ => EXIT_NUMERIC,
    }
}

/// Fixed scientific format with 12 significant digits; `NaN` for missing values.
pub fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.11e}")
    }
}

/// Parse `args` (including the program name) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Sweep { common, emin, emax, n, spacing, format, keep_going } => {
            cmd_sweep(&common, emin, emax, n, spacing, format, keep_going, out, err)
        }
        Command::Bound { common, energy, family, delta, optimize, form } => {
            cmd_bound(&common, energy, &family, delta, optimize, &form, out)
        }
        Command::Invariance { common, energy, j, j_params, form, tol } => {
            cmd_invariance(&common, energy, &j, &j_params, &form, tol, out)
        }
        Command::Corpus { format } => cmd_corpus(format, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn settings(common: &Common) -> Result<Settings, Error> {
    let file = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str::<ConfigFile>(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {}", path.display(), e.message())))?
        }
        None => ConfigFile::default(),
    };
    let mut s = Settings::from_config(&file)?;
    if let Some(b) = common.budget {
        s.optimize.budget = b;
    }
    if let Some(t) = common.tail_tol {
        s.numerics.quad.tail_tol = t;
        s.solver.tail_tol = t;
    }
    if let Some(t) = common.refine_tol {
        s.solver.refine_tol = t;
    }
    s.validate()?;
    Ok(s)
}

fn profile(common: &Common) -> Result<PotentialProfile, Error> {
    PotentialProfile::named(&common.potential, &parse_params(&common.params)?)
}

fn slice_at(p: &PotentialProfile, e: f64, s: &Settings) -> Result<EnergySlice, Error> {
    EnergySlice::new(p.clone(), e)?.with_numerics(s.numerics)
}

/// One row of the sweep table.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "E")]
    pub energy: f64,
    #[serde(rename = "T_exact")]
    pub t_exact: f64,
    #[serde(rename = "R_exact")]
    pub r_exact: f64,
    pub unitarity_defect: f64,
    pub b_hconst: f64,
    pub b_low_energy: f64,
    pub b_wkb_like: f64,
    pub b_delta_mg: f64,
    pub b_schwartzian: f64,
    pub b_best: f64,
    #[serde(rename = "N_exact")]
    pub n_exact: f64,
    #[serde(rename = "N_bound_best")]
    pub n_bound_best: f64,
    /// Family that produced `b_best`.
    pub best_family: Option<String>,
    /// Optimised Δ behind `b_delta_mg`.
    pub delta_mg_delta: Option<f64>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl SweepRow {
    pub fn values(&self) -> [f64; 12] {
        [
            self.energy,
            self.t_exact,
            self.r_exact,
            self.unitarity_defect,
            self.b_hconst,
            self.b_low_energy,
            self.b_wkb_like,
            self.b_delta_mg,
            self.b_schwartzian,
            self.b_best,
            self.n_exact,
            self.n_bound_best,
        ]
    }
}

fn bound_value(r: Result<BoundResult, Error>, what: &str, warnings: &mut Vec<String>) -> f64 {
    match r {
        Ok(b) if b.divergent => f64::NAN,
        Ok(b) => b.bound,
        Err(e) => {
            if !e.is_precondition() {
                warnings.push(format!("{what}: {e}"));
            }
            f64::NAN
        }
    }
}

/// Compute one sweep row. Solver failures are returned as errors; bound
/// failures become `NaN` cells.
pub fn sweep_row(slice: &EnergySlice, s: &Settings) -> Result<SweepRow, Error> {
    let exact = transmission(slice, &s.solver)?;
    let mut warnings = Vec::new();
    let b_hconst = bound_value(bound_special(slice, &SpecialCase::HConst), "hconst", &mut warnings);
    let b_low_energy = bound_value(bound_low_energy(slice), "low-energy", &mut warnings);
    let b_wkb_like = bound_value(bound_wkb_like(slice), "wkb-like", &mut warnings);
    let dmg = optimize_delta(slice, DeltaFamily::DeltaMg, &s.optimize);
    let delta_mg_delta = dmg.as_ref().ok().and_then(|r| r.best_params.get("delta").copied());
    let b_delta_mg = bound_value(dmg.map(|r| r.best_bound), "delta-mg", &mut warnings);
    let b_schwartzian = bound_value(bound_schwartzian(slice), "schwartzian", &mut warnings);
    let best = best_bound(slice, &s.optimize);
    let (b_best, n_bound_best, best_family) = if best.divergent {
        (f64::NAN, f64::NAN, None)
    } else {
        let n = to_particle_bound(&best).map(|p| p.n_bound).unwrap_or(f64::NAN);
        (best.bound, n, Some(best.family.to_string()))
    };
    let t = exact.transmission;
    Ok(SweepRow {
        energy: slice.energy(),
        t_exact: t,
        r_exact: exact.reflection,
        unitarity_defect: exact.unitarity_defect,
        b_hconst,
        b_low_energy,
        b_wkb_like,
        b_delta_mg,
        b_schwartzian,
        b_best,
        n_exact: (1.0 - t) / t,
        n_bound_best,
        best_family,
        delta_mg_delta,
        warnings,
    })
}

fn nan_row(e: f64, warning: String) -> SweepRow {
    SweepRow {
        energy: e,
        t_exact: f64::NAN,
        r_exact: f64::NAN,
        unitarity_defect: f64::NAN,
        b_hconst: f64::NAN,
        b_low_energy: f64::NAN,
        b_wkb_like: f64::NAN,
        b_delta_mg: f64::NAN,
        b_schwartzian: f64::NAN,
        b_best: f64::NAN,
        n_exact: f64::NAN,
        n_bound_best: f64::NAN,
        best_family: None,
        delta_mg_delta: None,
        warnings: vec![warning],
    }
}

/// Energies for a sweep, linearly or logarithmically spaced.
fn energy_grid(emin: f64, emax: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let f = i as f64 / (n - 1) as f64;
            if i == n - 1 {
                return emax;
            }
            match spacing {
                Spacing::Linear => emin + (emax - emin) * f,
                Spacing::Log => (emin.ln() + (emax.ln() - emin.ln()) * f).exp(),
            }
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    common: &Common,
    emin: f64,
    emax: f64,
    n: usize,
    spacing: Spacing,
    format: Format,
    keep_going: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Error> {
    let s = settings(common)?;
    let p = profile(common)?;
    if n < 2 {
        return Err(Error::InvalidConfig(format!("--n must be at least 2, got {n}")));
    }
    if !(emax > emin) {
        return Err(Error::InvalidConfig(format!("--emax ({emax}) must exceed --emin ({emin})")));
    }
    let threshold = p.v_minus_inf().max(p.v_plus_inf());
    if !(emin > threshold) {
        return Err(Error::InvalidEnergy { energy: emin, threshold });
    }
    if matches!(spacing, Spacing::Log) && !(emin > 0.0) {
        return Err(Error::InvalidConfig("log spacing needs emin > 0".into()));
    }
    let energies = energy_grid(emin, emax, n, spacing);
    let rows: Vec<Result<SweepRow, Error>> =
        energies.par_iter().map(|&e| slice_at(&p, e, &s).and_then(|sl| sweep_row(&sl, &s))).collect();

    let mut table = Vec::with_capacity(rows.len());
    let mut failed = false;
    for (e, r) in energies.iter().zip(rows) {
        match r {
            Ok(row) => table.push(row),
            Err(x) if keep_going => {
                failed = true;
                table.push(nan_row(*e, format!("E = {e}: {x}")));
            }
            Err(x) => return Err(x),
        }
    }
    for row in &table {
        for w in &row.warnings {
            let _ = writeln!(err, "warning: E = {}: {w}", fmt_value(row.energy));
        }
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(SWEEP_HEADER).map_err(io_err)?;
            for row in &table {
                w.write_record(row.values().iter().map(|&v| fmt_value(v))).map_err(io_err)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
            out.write_all(&bytes).map_err(output_err)?;
        }
        Format::Json => {
            let doc = serde_json::json!({
                "potential": p.name(),
                "params": p.params(),
                "rows": table,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("rows serialise")).map_err(output_err)?;
        }
    }
    Ok(if failed { EXIT_NUMERIC } else { EXIT_OK })
}

fn io_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => output_err(e),
        k => Error::InvalidConfig(format!("csv: {k:?}")),
    }
}

/// Output failures are not numerical ones; a closed pipe is not an error at all.
fn output_err(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        std::process::exit(EXIT_OK);
    }
    Error::InvalidConfig(format!("cannot write output: {e}"))
}

fn cmd_bound(
    common: &Common,
    energy: f64,
    family: &str,
    delta: Option<f64>,
    optimize: bool,
    form: &str,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let s = settings(common)?;
    let p = profile(common)?;
    let slice = slice_at(&p, energy, &s)?;
    let k_lo = slice.k_minus_inf().min(slice.k_plus_inf());
    let mut extra = serde_json::Map::new();
    let result: BoundResult = match family {
        "wkb-estimate" => {
            let w = wkb_estimate(&slice)?;
            let doc = serde_json::json!({ "family": "wkb-estimate", "estimate": w, "note": "ESTIMATE, not a bound" });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialise")).map_err(output_err)?;
            return Ok(EXIT_OK);
        }
        "hconst" => bound_special(&slice, &SpecialCase::HConst)?,
        "monotone-h" => bound_special(&slice, &SpecialCase::MonotoneH(None))?,
        "single-extremum" => bound_special(&slice, &SpecialCase::SingleExtremum(None))?,
        "kmin" => bound_special(&slice, &SpecialCase::KMin)?,
        "delta-cut" | "delta-mg" => {
            let fam = if family == "delta-cut" { DeltaFamily::DeltaCut } else { DeltaFamily::DeltaMg };
            if optimize {
                let r = optimize_delta(&slice, fam, &s.optimize)?;
                extra.insert("evaluations".into(), r.evaluations.into());
                r.best_bound
            } else {
                let d = delta.unwrap_or(k_lo);
                match fam {
                    DeltaFamily::DeltaCut => bound_special(&slice, &SpecialCase::DeltaCut(d))?,
                    DeltaFamily::DeltaMg => bound_delta_mg(&slice, d)?,
                }
            }
        }
        "basic" | "weak" => {
            let h = default_h(&slice)?;
            if family == "basic" {
                bound_basic(&slice, &h)?
            } else {
                bound_basic_weak(&slice, &h)?
            }
        }
        "improved" => {
            let form = ImprovedForm::parse(form)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown improved form `{form}` (hj, hJ, HJ)")))?;
            improved_default(&slice, form, optimize, &s, &mut extra)?
        }
        "low-energy" => bound_low_energy(&slice)?,
        "old-low-energy" => bound_old_low_energy(&slice)?,
        "wkb-like" => bound_wkb_like(&slice)?,
        "schwartzian" => bound_schwartzian(&slice)?,
        "best" => best_bound(&slice, &s.optimize),
        other => return Err(Error::InvalidConfig(format!("unknown bound family `{other}`"))),
    };
    let particle = to_particle_bound(&result).ok();
    let mut doc = serde_json::to_value(&result).expect("serialise");
    if let serde_json::Value::Object(m) = &mut doc {
        m.insert("energy".into(), energy.into());
        m.insert("particle_bound".into(), serde_json::to_value(particle).expect("serialise"));
        m.extend(extra);
    }
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialise")).map_err(output_err)?;
    Ok(EXIT_OK)
}

/// `h = k` where that is positive, otherwise `h = k∞`.
fn default_h(slice: &EnergySlice) -> Result<TrialFunction, Error> {
    let w = slice.window()?;
    if crate::bounds::k2_min(slice, w) > 0.0 {
        Ok(TrialFunction::local_wave_number(slice))
    } else {
        Ok(TrialFunction::constant(slice.k_inf()?))
    }
}

fn improved_default(
    slice: &EnergySlice,
    form: ImprovedForm,
    optimize: bool,
    s: &Settings,
    extra: &mut serde_json::Map<String, serde_json::Value>,
) -> Result<BoundResult, Error> {
    let k = slice.k_inf()?;
    let big_j = if optimize {
        let b = TrialSearch::JBump.default_box(slice);
        let r = optimize_trial(slice, TrialSearch::JBump, &b, s.optimize.budget)?;
        extra.insert("evaluations".into(), r.evaluations.into());
        extra.insert("budget_exhausted".into(), r.budget_exhausted.into());
        let get = |n: &str| r.best_params.get(n).copied();
        TrialFunction::bump(
            1.0,
            get("amplitude").unwrap_or(0.0),
            get("center").unwrap_or(0.0),
            get("width").unwrap_or(1.0),
        )
    } else {
        TrialFunction::constant(1.0)
    };
    let big_h = TrialFunction::constant(k);
    match form {
        ImprovedForm::BigHBigJ => bound_improved(slice, form, &big_h, &big_j),
        ImprovedForm::HBigJ => bound_improved(slice, form, &big_h.mul(&big_j.powf(2.0)), &big_j),
        ImprovedForm::Hj => bound_improved(slice, form, &big_h.mul(&big_j.powf(2.0)), &big_j.powf(-2.0)),
    }
}

fn trial_from_cli(name: &str, params: &Params) -> Result<TrialFunction, Error> {
    let allowed: &[&str] = match name {
        "identity" => &[],
        "constant" => &["c"],
        "bump" | "sech-bump" => &["amplitude", "center", "width"],
        "interp" => &["left", "right", "center", "width"],
        "exp" => &["rate"],
        other => return Err(Error::InvalidConfig(format!("unknown j family `{other}`"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::InvalidParam(format!("j family `{name}` has no parameter `{k}`")));
    }
    let g = |k: &str, d: f64| params.get(k).copied().unwrap_or(d);
    Ok(match name {
        "identity" => TrialFunction::constant(1.0),
        "constant" => TrialFunction::constant(g("c", 2.0)),
        "bump" => TrialFunction::bump(1.0, g("amplitude", 0.5), g("center", 0.0), g("width", 1.0)),
        "sech-bump" => TrialFunction::sech_bump(1.0, g("amplitude", 1.0), g("center", 0.0), g("width", 1.0)),
        "interp" => TrialFunction::tanh_interpolant(g("left", 1.0), g("right", 2.0), g("center", 0.0), g("width", 1.0)),
        _ => {
            let rate = g("rate", 0.1);
            TrialFunction::from_jet(move |x| (x * rate).exp())
        }
    })
}

fn cmd_invariance(
    common: &Common,
    energy: f64,
    j: &str,
    j_params: &str,
    form: &str,
    tol: f64,
    out: &mut dyn Write,
) -> Result<i32, Error> {
    let s = settings(common)?;
    let p = profile(common)?;
    let slice = slice_at(&p, energy, &s)?;
    let t = trial_from_cli(j, &parse_params(j_params)?)?;
    let change = match form {
        "j" => CoordinateChange::Jacobian(t),
        "J" => CoordinateChange::Amplitude(t),
        other => return Err(Error::InvalidConfig(format!("unknown form `{other}` (j or J)"))),
    };
    let r = verify_invariance(&slice, &change, &s.solver)?;
    let pass = r.difference < tol;
    let doc = serde_json::json!({
        "potential": p.name(),
        "energy": energy,
        "j": j,
        "form": form,
        "T_original": r.t_original,
        "T_transformed": r.t_transformed,
        "difference": r.difference,
        "tol": tol,
        "pass": pass,
    });
    writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("serialise")).map_err(output_err)?;
    Ok(if pass { EXIT_OK } else { EXIT_NUMERIC })
}

fn cmd_corpus(format: Format, out: &mut dyn Write) -> Result<i32, Error> {
    let mut entries = Vec::new();
    for (name, _) in CORPUS {
        let p = PotentialProfile::named(name, &Params::new())?;
        let oracle = oracle_transmission(name, p.params(), p.v_minus_inf().max(p.v_plus_inf()) + 1.0).is_ok();
        entries.push((p, oracle));
    }
    match format {
        Format::Csv => {
            writeln!(out, "name,params,v_minus_inf,v_plus_inf,smooth,closed_form").map_err(output_err)?;
            for (p, oracle) in &entries {
                let params: Vec<String> = p.params().iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(
                    out,
                    "{},\"{}\",{},{},{},{}",
                    p.name(),
                    params.join(","),
                    fmt_value(p.v_minus_inf()),
                    fmt_value(p.v_plus_inf()),
                    p.is_smooth(),
                    oracle
                )
                .map_err(output_err)?;
            }
        }
        Format::Json => {
            let list: Vec<_> = entries
                .iter()
                .map(|(p, oracle)| {
                    serde_json::json!({
                        "name": p.name(),
                        "params": p.params(),
                        "v_minus_inf": p.v_minus_inf(),
                        "v_plus_inf": p.v_plus_inf(),
                        "smooth": p.is_smooth(),
                        "closed_form": oracle,
                    })
                })
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&list).expect("serialise")).map_err(output_err)?;
        }
    }
    Ok(EXIT_OK)
}

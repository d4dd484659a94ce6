//! `spindecay` command line: one JSON config in, JSON or CSV out.
//!
//! Exit codes: 0 success, 1 validation or computation failure, 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ModelChoice, RunConfig};
use crate::constants::MM2_PER_S;
use crate::{
    derive, diagnostics, no_collision_attenuation, relaxation, simulate, thermal_integrals, torrey_attenuation,
    transverse_attenuation, validation, CollisionIntegrals, Error, GasConditions, GeometricCrossSection,
    GradientWaveform, HardSphereModel, MCConfig, RelaxationParams,
};

pub const XSEC_HEADER: [&str; 3] = ["k_over_hbar_a", "sigma_U_over_pi_a2", "im_sigma_I_over_pi_a2"];
pub const DECAY_HEADER: [&str; 6] =
    ["t", "attenuation_2nd_order", "attenuation_classical", "attenuation_nocollision", "phase_re", "phase_im"];

#[derive(Debug, Parser)]
#[command(name = "spindecay", version, about = "Transverse spin decay of a dilute spin-1/2 gas in a field gradient")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON run configuration; defaults to ³He at 293 K, 7 atm, no gradient.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Overrides the seed in the config (mc, validate).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Validity diagnostics for the configured gas and waveform.
    Params,
    /// σ_U and Im σ_I over a ka/ħ grid.
    Xsec,
    /// Collision rate and diffusion constant.
    Relax,
    /// Second-order, classical and collisionless attenuation over time.
    Decay,
    /// Monte Carlo random-walk estimate of the attenuation.
    Mc,
    /// Run the acceptance checks.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter { .. } | Error::Domain { .. } => 2,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

struct Rendered {
    json: Value,
    csv: Option<(Vec<String>, Vec<Vec<f64>>)>,
    default: Format,
    /// Exit code when the output was produced successfully.
    code: i32,
    warnings: Vec<String>,
}

impl Rendered {
    fn json(json: Value) -> Self {
        Rendered { json, csv: None, default: Format::Json, code: 0, warnings: Vec::new() }
    }

    fn table(header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
        let json = Value::Array(
            rows.iter()
                .map(|r| Value::Object(header.iter().cloned().zip(r.iter().map(|v| json!(v))).collect()))
                .collect(),
        );
        Rendered { json, csv: Some((header, rows)), default: Format::Csv, code: 0, warnings: Vec::new() }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, Failure> {
    let config = load_config(cli)?;
    let rendered = match cli.command {
        Command::Params => params(&config)?,
        Command::Xsec => xsec(&config)?,
        Command::Relax => relax(&config)?,
        Command::Decay => decay(&config)?,
        Command::Mc => mc(&config, cli.seed)?,
        Command::Validate => validate(&config, cli.seed)?,
    };
    for w in &rendered.warnings {
        eprintln!("warning: {w}");
    }
    let format = cli.format.unwrap_or(rendered.default);
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&rendered.json).expect("serializable") + "\n",
        Format::Csv => {
            let (header, rows) = rendered.csv.as_ref().ok_or_else(|| Failure::input("this command has no CSV output; use --format json"))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).map_err(|e| Failure { code: 1, message: e.to_string() })?;
            for r in rows {
                w.write_record(r.iter().map(|v| v.to_string())).map_err(|e| Failure { code: 1, message: e.to_string() })?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure { code: 1, message: e.to_string() })?).expect("utf-8")
        }
    };
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure { code: 1, message: e.to_string() })?;
        }
    }
    Ok(rendered.code)
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    match &cli.config {
        None => Ok(RunConfig::helium3(GradientWaveform::zero())),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
        }
    }
}

pub fn collision_integrals(gas: &GasConditions, model: ModelChoice) -> crate::Result<CollisionIntegrals> {
    match model {
        ModelChoice::HardSphere => thermal_integrals(&HardSphereModel::for_gas(gas)?, gas.temperature),
        ModelChoice::Geometric => thermal_integrals(&GeometricCrossSection::for_gas(gas)?, gas.temperature),
    }
}

fn relaxation_for(config: &RunConfig) -> crate::Result<RelaxationParams> {
    relaxation(&derive(&config.gas)?, &collision_integrals(&config.gas, config.collision_model)?)
}

fn params(config: &RunConfig) -> Result<Rendered, Failure> {
    let report = diagnostics(&config.gas, config.waveform.peak_f())?;
    let warnings = report
        .failing()
        .map(|f| format!("{} = {:.4e} violates the {} bound {:e}", f.name, f.value, f.bound, f.threshold))
        .collect::<Vec<_>>();
    let mut json = serde_json::to_value(&report).expect("serializable");
    json["warnings"] = json!(warnings);
    Ok(Rendered { warnings, ..Rendered::json(json) })
}

fn xsec(config: &RunConfig) -> Result<Rendered, Failure> {
    let grid = config.xsec.grid()?;
    let rows = grid
        .par_iter()
        .map(|&x| {
            let r = HardSphereModel::reduced_cross_sections(x, 1e-9)?;
            Ok(vec![x, r.transport, r.interference.im])
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut out = Rendered::table(&XSEC_HEADER, rows);
    if let Some(&x) = grid.first() {
        if x < crate::gas::MIN_KA_OVER_HBAR {
            out.warnings.push(format!("grid starts at ka/hbar = {x}, below the short-wavelength range"));
        }
    }
    Ok(out)
}

fn relax(config: &RunConfig) -> Result<Rendered, Failure> {
    let r = relaxation_for(config)?;
    let mut out = Rendered::json(json!({ "alpha_per_s": r.alpha, "D_mm2_per_s": r.diffusion / MM2_PER_S }));
    out.csv = Some((vec!["alpha_per_s".into(), "D_mm2_per_s".into()], vec![vec![r.alpha, r.diffusion / MM2_PER_S]]));
    Ok(out)
}

fn decay(config: &RunConfig) -> Result<Rendered, Failure> {
    let w = &config.waveform;
    let t_end = config.decay.t_end_s.unwrap_or_else(|| w.duration());
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Failure::input("decay needs decay.t_end_s or a waveform with finite duration"));
    }
    if config.decay.points < 2 {
        return Err(Failure::input("decay.points must be at least 2"));
    }
    let relax = relaxation_for(config)?;
    let gas = &config.gas;
    let u = w.direction();
    let x = u.map(|c| c * config.decay.position_m);
    let n = config.decay.points;
    let mut rows = Vec::with_capacity(n);
    let mut warning = None;
    for i in 0..n {
        let t = t_end * i as f64 / (n - 1) as f64;
        let second = transverse_attenuation(w, &relax, gas.gyromagnetic_ratio, t, x)?;
        let classical = torrey_attenuation(w, relax.diffusion, gas.gyromagnetic_ratio, t, x)?;
        let ballistic = no_collision_attenuation(w, gas.temperature, gas.particle_mass, gas.gyromagnetic_ratio, t)?;
        if warning.is_none() {
            warning = second.validity_warning.clone().map(|m| format!("from t = {t:e} s: {m}"));
        }
        rows.push(vec![t, second.attenuation, classical.magnitude, ballistic.magnitude, second.phase.re, second.phase.im]);
    }
    let mut out = Rendered::table(&DECAY_HEADER, rows);
    out.warnings.extend(warning);
    Ok(out)
}

fn mc(config: &RunConfig, seed: Option<u64>) -> Result<Rendered, Failure> {
    let gas = &config.gas;
    let opts = &config.mc;
    let rate = match opts.collision_rate_per_s {
        Some(r) => r,
        None => relaxation_for(config)?.alpha,
    };
    let seed = seed.unwrap_or(opts.seed);
    let mut mc = MCConfig::new(config.waveform.clone(), gas.temperature, gas.particle_mass, gas.gyromagnetic_ratio, rate, opts.n_particles, seed);
    if let Some(t) = opts.t_end_s {
        mc = mc.with_t_end(t);
    }
    if let Some(dt) = opts.dt_s {
        mc.dt = dt;
    }
    mc.phase_reference = opts.phase_reference;
    let r = simulate(&mc)?;
    let mut out = Rendered::json(json!({
        "mean_re": r.mean_attenuation.re,
        "mean_im": r.mean_attenuation.im,
        "std_error": r.std_error,
        "n_particles": r.n_particles,
        "seed": r.seed,
    }));
    out.csv = Some((
        ["mean_re", "mean_im", "std_error", "n_particles", "seed"].iter().map(|s| s.to_string()).collect(),
        vec![vec![r.mean_attenuation.re, r.mean_attenuation.im, r.std_error, r.n_particles as f64, r.seed as f64]],
    ));
    Ok(out)
}

fn validate(config: &RunConfig, seed: Option<u64>) -> Result<Rendered, Failure> {
    let report = validation::run_all(&config.gas, seed.unwrap_or(config.mc.seed))?;
    for c in &report.criteria {
        eprintln!("{}", c.line());
    }
    let all_pass = report.all_pass();
    let json = json!({ "all_pass": all_pass, "criteria": report.criteria });
    Ok(Rendered { code: if all_pass { 0 } else { 1 }, ..Rendered::json(json) })
}

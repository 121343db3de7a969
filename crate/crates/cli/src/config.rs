//! Run configuration.
//!
//! A JSON document with an optional `mode`, a model given either by a
//! `physical` or a `dimensionless` section, and optional `solver`, `isotherm`
//! and `output` sections. Every key not listed below is rejected, and all
//! offending keys are reported at once.

use std::path::PathBuf;

use adsorb_core::analysis::{SweepGrid, SweepSettings};
use adsorb_core::model::{nondimensionalize, require_admissible, PhysicalParameters};
use adsorb_core::ode::Tolerances;
use adsorb_core::pde::PdeSettings;
use adsorb_core::{DimensionlessParameters, ReactionOrders, WaveSettings};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Tolerance on the α/q_e isotherm link when a config gives both.
pub const CONSISTENCY_TOL: f64 = 1e-8;

const TOP_KEYS: &[&str] = &["mode", "physical", "dimensionless", "solver", "isotherm", "output"];
const PHYSICAL_KEYS: &[&str] =
    &["epsilon", "u_in", "k_ad", "k_de", "c_in", "q_max", "rho_b", "column_length", "diffusion", "m", "n"];
const DIMENSIONLESS_KEYS: &[&str] = &["da", "pe", "q_e", "alpha", "m", "n", "ell"];
const SOLVER_KEYS: &[&str] = &[
    "wave_rel_tol",
    "wave_abs_tol",
    "seed_delta",
    "f_stop_low",
    "f_stop_high",
    "tail_floor",
    "half_window",
    "max_steps",
    "explicit_from_pe",
    "pde_rel_tol",
    "pde_abs_tol",
    "pde_max_steps",
    "n_cells",
    "t_end",
    "samples",
    "front_levels",
    "fit_window",
    "eta_star",
    "threshold_lo",
    "threshold_hi",
    "pe_grid",
];
const ISOTHERM_KEYS: &[&str] = &["c_in", "c_max", "points", "k_l", "q_max", "m", "n"];
const OUTPUT_KEYS: &[&str] = &["dir", "format"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Nondim,
    Wave,
    Pde,
    Sweep,
    Isotherm,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Nondim => "nondim",
            Mode::Wave => "wave",
            Mode::Pde => "pde",
            Mode::Sweep => "sweep",
            Mode::Isotherm => "isotherm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    mode: Option<Mode>,
    physical: Option<PhysicalSection>,
    dimensionless: Option<DimensionlessSection>,
    #[serde(default)]
    solver: SolverSection,
    isotherm: Option<IsothermSection>,
    #[serde(default)]
    output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicalSection {
    epsilon: f64,
    u_in: f64,
    k_ad: f64,
    k_de: f64,
    c_in: f64,
    q_max: f64,
    rho_b: f64,
    column_length: f64,
    diffusion: Option<f64>,
    m: u32,
    n: u32,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct DimensionlessSection {
    da: Option<f64>,
    pe: Option<f64>,
    q_e: Option<f64>,
    alpha: Option<f64>,
    m: Option<u32>,
    n: Option<u32>,
    ell: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    wave_rel_tol: Option<f64>,
    wave_abs_tol: Option<f64>,
    seed_delta: Option<f64>,
    f_stop_low: Option<f64>,
    f_stop_high: Option<f64>,
    tail_floor: Option<f64>,
    half_window: Option<f64>,
    max_steps: Option<usize>,
    explicit_from_pe: Option<f64>,
    pde_rel_tol: Option<f64>,
    pde_abs_tol: Option<f64>,
    pde_max_steps: Option<usize>,
    n_cells: Option<usize>,
    t_end: Option<f64>,
    samples: Option<usize>,
    front_levels: Option<Vec<f64>>,
    fit_window: Option<(f64, f64)>,
    eta_star: Option<f64>,
    threshold_lo: Option<f64>,
    threshold_hi: Option<f64>,
    pe_grid: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct IsothermSection {
    c_in: Option<Vec<f64>>,
    c_max: Option<f64>,
    points: Option<usize>,
    k_l: Option<f64>,
    q_max: Option<f64>,
    m: Option<u32>,
    n: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutputSection {
    dir: Option<PathBuf>,
    format: Option<Format>,
}

/// Fully resolved solver knobs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub wave_rel_tol: f64,
    pub wave_abs_tol: f64,
    pub seed_delta: f64,
    pub f_stop_low: f64,
    pub f_stop_high: f64,
    pub tail_floor: f64,
    pub half_window: f64,
    pub max_steps: usize,
    pub explicit_from_pe: Option<f64>,
    pub pde_rel_tol: f64,
    pub pde_abs_tol: f64,
    pub pde_max_steps: usize,
    pub n_cells: usize,
    /// Only resolved in pde mode, where the column length is known.
    pub t_end: Option<f64>,
    pub samples: usize,
    pub front_levels: Vec<f64>,
    pub fit_window: Option<(f64, f64)>,
    pub eta_star: f64,
    pub threshold_lo: f64,
    pub threshold_hi: f64,
    pub pe_grid: Vec<f64>,
}

impl SolverConfig {
    pub fn wave_settings(&self) -> WaveSettings {
        WaveSettings {
            tol: Tolerances::new(self.wave_rel_tol, self.wave_abs_tol),
            f_stop_low: self.f_stop_low,
            f_stop_high: self.f_stop_high,
            seed_delta: self.seed_delta,
            tail_floor: self.tail_floor,
            half_window: self.half_window,
            max_steps: self.max_steps,
            explicit_from_pe: self.explicit_from_pe,
        }
    }

    pub fn pde_settings(&self) -> PdeSettings {
        PdeSettings {
            tol: Tolerances::new(self.pde_rel_tol, self.pde_abs_tol),
            max_steps: self.pde_max_steps,
        }
    }

    pub fn sweep_settings(&self) -> SweepSettings {
        SweepSettings {
            wave: self.wave_settings(),
            eta_star: self.eta_star,
            threshold_lo: self.threshold_lo,
            threshold_hi: self.threshold_hi,
        }
    }

    pub fn sweep_grid(&self) -> Result<SweepGrid, CliError> {
        Ok(SweepGrid::new(self.pe_grid.clone())?)
    }

    /// Fit window for front tracking: the second half of the run unless given.
    pub fn fit_window_or_default(&self) -> Option<(f64, f64)> {
        self.fit_window.or(self.t_end.map(|t| (0.5 * t, t)))
    }
}

/// Isotherm evaluation points and constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsothermConfig {
    pub c_in: Vec<f64>,
    pub k_l: f64,
    pub q_max: f64,
    pub orders: ReactionOrders,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub format: Format,
}

/// Validated configuration with every default applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub physical: Option<PhysicalParameters>,
    /// Absent only in isotherm mode without a model section.
    pub params: Option<DimensionlessParameters>,
    pub solver: SolverConfig,
    pub isotherm: Option<IsothermConfig>,
    pub output: OutputConfig,
}

/// The part of a resolved config that determines the artifacts; the output
/// directory is left out so that relocated runs hash identically.
#[derive(Serialize)]
struct Fingerprint<'a> {
    mode: Mode,
    physical: &'a Option<PhysicalParameters>,
    params: &'a Option<DimensionlessParameters>,
    solver: &'a SolverConfig,
    isotherm: &'a Option<IsothermConfig>,
    format: Format,
}

impl RunConfig {
    /// Model parameters, required by every mode except isotherm.
    pub fn params(&self) -> Result<&DimensionlessParameters, CliError> {
        self.params
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("{} mode needs a model section", self.mode.name())))
    }

    /// Canonical JSON of the resolved configuration.
    pub fn canonical_json(&self) -> String {
        let fp = Fingerprint {
            mode: self.mode,
            physical: &self.physical,
            params: &self.params,
            solver: &self.solver,
            isotherm: &self.isotherm,
            format: self.output.format,
        };
        serde_json::to_string(&fp).expect("resolved config is serializable")
    }

    /// SHA-256 of [`RunConfig::canonical_json`], hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }
}

/// Command-line overrides applied on top of the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed_delta: Option<f64>,
}

fn unknown_keys(doc: &Value) -> Result<Vec<String>, CliError> {
    let top =
        doc.as_object().ok_or_else(|| CliError::Config("configuration must be a JSON object".into()))?;
    let mut bad = Vec::new();
    for (key, value) in top {
        let allowed = match key.as_str() {
            "physical" => PHYSICAL_KEYS,
            "dimensionless" => DIMENSIONLESS_KEYS,
            "solver" => SOLVER_KEYS,
            "isotherm" => ISOTHERM_KEYS,
            "output" => OUTPUT_KEYS,
            k if TOP_KEYS.contains(&k) => continue,
            _ => {
                bad.push(key.clone());
                continue;
            }
        };
        if let Some(section) = value.as_object() {
            bad.extend(
                section.keys().filter(|k| !allowed.contains(&k.as_str())).map(|k| format!("{key}.{k}")),
            );
        }
    }
    Ok(bad)
}

fn orders(m: Option<u32>, n: Option<u32>) -> Result<ReactionOrders, CliError> {
    match (m, n) {
        (Some(m), Some(n)) => Ok(ReactionOrders::new(m, n)?),
        _ => Err(CliError::Config("reaction orders m and n are required".into())),
    }
}

fn resolve_model(
    doc: &Document,
) -> Result<(Option<PhysicalParameters>, Option<DimensionlessParameters>), CliError> {
    let dimless = doc.dimensionless.as_ref();
    match (&doc.physical, dimless) {
        (Some(ph), d) => {
            if let Some(d) = d {
                let extra = d.da.is_some()
                    || d.q_e.is_some()
                    || d.alpha.is_some()
                    || d.m.is_some()
                    || d.n.is_some()
                    || d.ell.is_some();
                if extra {
                    return Err(CliError::Config(
                        "both physical and dimensionless sections specify the model; \
                         only dimensionless.pe may accompany a physical section"
                            .into(),
                    ));
                }
            }
            let physical = PhysicalParameters {
                epsilon: ph.epsilon,
                u_in: ph.u_in,
                k_ad: ph.k_ad,
                k_de: ph.k_de,
                c_in: ph.c_in,
                q_max: ph.q_max,
                rho_b: ph.rho_b,
                column_length: ph.column_length,
                diffusion: ph.diffusion,
                orders: ReactionOrders::new(ph.m, ph.n)?,
            };
            let mut params = nondimensionalize(&physical)?;
            if let Some(pe) = d.and_then(|d| d.pe) {
                params = params.with_pe(pe)?;
            }
            Ok((Some(physical), Some(params)))
        }
        (None, Some(d)) => {
            let da = d.da.ok_or_else(|| CliError::Config("dimensionless.da is required".into()))?;
            let pe = d.pe.unwrap_or(0.0);
            let orders = orders(d.m, d.n)?;
            let mut params = match (d.alpha, d.q_e) {
                (Some(alpha), Some(q_e)) => {
                    DimensionlessParameters::from_parts(da, pe, alpha, q_e, orders, CONSISTENCY_TOL)?
                }
                (Some(alpha), None) => DimensionlessParameters::from_alpha(da, pe, alpha, orders)?,
                (None, Some(q_e)) => DimensionlessParameters::from_qe(da, pe, q_e, orders)?,
                (None, None) => {
                    return Err(CliError::Config("dimensionless section needs q_e or alpha".into()))
                }
            };
            if let Some(ell) = d.ell {
                params = params.with_ell(ell)?;
            }
            Ok((None, Some(params)))
        }
        (None, None) => Ok((None, None)),
    }
}

fn resolve_isotherm(
    section: Option<&IsothermSection>,
    physical: Option<&PhysicalParameters>,
) -> Result<IsothermConfig, CliError> {
    let empty = IsothermSection::default();
    let s = section.unwrap_or(&empty);
    let need = |v: Option<f64>, from: Option<f64>, name: &str| {
        v.or(from).ok_or_else(|| {
            CliError::Config(format!("isotherm.{name} is required without a physical section"))
        })
    };
    let k_l = need(s.k_l, physical.map(|p| p.k_l()), "k_l")?;
    let q_max = need(s.q_max, physical.map(|p| p.q_max), "q_max")?;
    let orders = match (s.m, s.n, physical) {
        (None, None, Some(p)) => p.orders,
        (m, n, p) => orders(m.or(p.map(|p| p.orders.m)), n.or(p.map(|p| p.orders.n)))?,
    };
    let c_in = match &s.c_in {
        Some(list) => {
            if list.is_empty() {
                return Err(CliError::Config("isotherm.c_in is empty".into()));
            }
            list.clone()
        }
        None => {
            let c_max = need(s.c_max, physical.map(|p| 2.0 * p.c_in), "c_max")?;
            if !(c_max > 0.0) {
                return Err(CliError::Config(format!("isotherm.c_max must be positive, got {c_max}")));
            }
            let points = s.points.unwrap_or(64).max(1);
            (1..=points).map(|k| c_max * k as f64 / points as f64).collect()
        }
    };
    Ok(IsothermConfig { c_in, k_l, q_max, orders })
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Config(format!("solver.{name} must be positive, got {v}")))
    }
}

fn resolve_solver(
    s: &SolverSection,
    mode: Mode,
    params: Option<&DimensionlessParameters>,
) -> Result<SolverConfig, CliError> {
    let wave = WaveSettings::default();
    let pde = PdeSettings::default();
    let sweep = SweepSettings::default();
    let t_end = match (mode, s.t_end) {
        (Mode::Pde, Some(t)) => Some(positive("t_end", t)?),
        // Long enough for the front to cross the column twice over.
        (Mode::Pde, None) => {
            let p = params.ok_or_else(|| CliError::Config("pde mode needs a model section".into()))?;
            let ell = p.ell().ok_or_else(|| {
                CliError::Config(
                    "pde mode needs the column length: dimensionless.ell or a physical section".into(),
                )
            })?;
            Some(2.0 * ell / p.velocity())
        }
        (_, t) => t,
    };
    let threshold_lo = s.threshold_lo.unwrap_or(sweep.threshold_lo);
    let threshold_hi = s.threshold_hi.unwrap_or(sweep.threshold_hi);
    if !(0.0 < threshold_lo && threshold_lo <= threshold_hi && threshold_hi < 1.0) {
        return Err(CliError::Config(format!(
            "thresholds must satisfy 0 < lo <= hi < 1, got lo={threshold_lo}, hi={threshold_hi}"
        )));
    }
    let front_levels = s.front_levels.clone().unwrap_or_else(|| vec![0.25, 0.5, 0.75]);
    if let Some(l) = front_levels.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
        return Err(CliError::Config(format!("front levels must lie in (0, 1), got {l}")));
    }
    if let Some((a, b)) = s.fit_window {
        if !(b > a) {
            return Err(CliError::Config(format!("fit_window must be increasing, got [{a}, {b}]")));
        }
    }
    let pe_grid = s.pe_grid.clone().unwrap_or_else(|| SweepGrid::standard().values().to_vec());
    SweepGrid::new(pe_grid.clone())?;
    Ok(SolverConfig {
        wave_rel_tol: positive("wave_rel_tol", s.wave_rel_tol.unwrap_or(wave.tol.rel))?,
        wave_abs_tol: positive("wave_abs_tol", s.wave_abs_tol.unwrap_or(wave.tol.abs))?,
        seed_delta: positive("seed_delta", s.seed_delta.unwrap_or(wave.seed_delta))?,
        f_stop_low: positive("f_stop_low", s.f_stop_low.unwrap_or(wave.f_stop_low))?,
        f_stop_high: positive("f_stop_high", s.f_stop_high.unwrap_or(wave.f_stop_high))?,
        tail_floor: positive("tail_floor", s.tail_floor.unwrap_or(wave.tail_floor))?,
        half_window: positive("half_window", s.half_window.unwrap_or(wave.half_window))?,
        max_steps: s.max_steps.unwrap_or(wave.max_steps),
        explicit_from_pe: s.explicit_from_pe,
        pde_rel_tol: positive("pde_rel_tol", s.pde_rel_tol.unwrap_or(pde.tol.rel))?,
        pde_abs_tol: positive("pde_abs_tol", s.pde_abs_tol.unwrap_or(pde.tol.abs))?,
        pde_max_steps: s.pde_max_steps.unwrap_or(pde.max_steps),
        n_cells: s.n_cells.unwrap_or(400),
        t_end,
        samples: s.samples.unwrap_or(201).max(2),
        front_levels,
        fit_window: s.fit_window,
        eta_star: positive("eta_star", s.eta_star.unwrap_or(sweep.eta_star))?,
        threshold_lo,
        threshold_hi,
        pe_grid,
    })
}

/// Parses and validates a configuration document for the given subcommand.
pub fn parse_config(text: &str, mode: Mode, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("malformed JSON: {e}")))?;
    let bad = unknown_keys(&value)?;
    if !bad.is_empty() {
        return Err(CliError::UnknownKeys(bad));
    }
    let mut doc: Document =
        serde_json::from_value(value).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))?;
    if let Some(m) = doc.mode {
        if m != mode {
            return Err(CliError::Config(format!(
                "configuration is for mode {} but {} was requested",
                m.name(),
                mode.name()
            )));
        }
    }
    if let Some(delta) = overrides.seed_delta {
        doc.solver.seed_delta = Some(delta);
    }

    let (physical, params) = resolve_model(&doc)?;
    if params.is_none() && mode != Mode::Isotherm {
        return Err(CliError::Config(format!(
            "{} mode needs a physical or a dimensionless section",
            mode.name()
        )));
    }
    if matches!(mode, Mode::Wave | Mode::Sweep) {
        require_admissible(params.as_ref().expect("checked above"))?;
    }
    let isotherm = match mode {
        Mode::Isotherm => Some(resolve_isotherm(doc.isotherm.as_ref(), physical.as_ref())?),
        _ => None,
    };
    let solver = resolve_solver(&doc.solver, mode, params.as_ref())?;
    let output = OutputConfig {
        dir: overrides.out.clone().or(doc.output.dir).unwrap_or_else(|| PathBuf::from("out")),
        format: doc.output.format.unwrap_or_default(),
    };
    Ok(RunConfig { mode, physical, params, solver, isotherm, output })
}

use std::path::PathBuf;

use adsorb_core::analysis::run_sweep;
use adsorb_core::model::{analyze_equilibria, sips_isotherm};
use adsorb_core::pde::{
    breakthrough_time, mass_balance_residual, solve_pde, track_front, uniform_sampling, SpatialGrid,
};
use adsorb_core::wave::solve_wave;
use log::info;
use serde_json::{json, Value};

use crate::config::{Mode, RunConfig};
use crate::error::CliError;
use crate::output::{metadata, write_artifacts, Artifact, Header, Table};

/// Computes every artifact of a run without touching the file system.
pub fn render(config: &RunConfig) -> Result<Vec<Artifact>, CliError> {
    let header = Header::new(config.hash());
    match config.mode {
        Mode::Nondim => render_nondim(config, &header),
        Mode::Wave => render_wave(config, &header),
        Mode::Pde => render_pde(config, &header),
        Mode::Sweep => render_sweep(config, &header),
        Mode::Isotherm => render_isotherm(config, &header),
    }
}

/// Renders and writes the artifacts into the configured output directory.
pub fn run(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let artifacts = render(config)?;
    write_artifacts(&config.output.dir, &artifacts)
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn render_nondim(config: &RunConfig, header: &Header) -> Result<Vec<Artifact>, CliError> {
    let p = config.params()?;
    let body = json!({
        "parameters": p,
        "physical": config.physical,
        "velocity": p.velocity(),
        "equilibria": analyze_equilibria(p),
    });
    Ok(vec![Artifact::json("nondim", &metadata(header, body))])
}

fn render_wave(config: &RunConfig, header: &Header) -> Result<Vec<Artifact>, CliError> {
    let p = config.params()?;
    let profile = solve_wave(p, &config.solver.wave_settings())?;
    info!("wave at Pe = {}: {} nodes", p.pe(), profile.len());
    let mut table = Table::new(vec!["eta", "F", "G"]);
    for i in 0..profile.len() {
        table.push(vec![profile.eta[i], profile.f[i], profile.g[i]]);
    }
    let (lo, hi) = profile.window();
    let body = json!({
        "kind": if p.pe() > 0.0 { "full" } else { "leading-order" },
        "velocity": profile.velocity,
        "pe": profile.pe,
        "normalized": profile.normalized,
        "window": [lo, hi],
        "points": profile.len(),
        "parameters": p,
    });
    Ok(vec![
        Artifact::table("wave", &table, header, config.output.format),
        Artifact::json("wave_meta", &metadata(header, body)),
    ])
}

fn render_pde(config: &RunConfig, header: &Header) -> Result<Vec<Artifact>, CliError> {
    let p = config.params()?;
    let s = &config.solver;
    let ell = p.ell().ok_or_else(|| CliError::Config("pde mode needs the column length".into()))?;
    let t_end = s.t_end.expect("t_end is resolved in pde mode");
    let grid = SpatialGrid::new(ell, s.n_cells)?;
    let sol = solve_pde(p, &grid, t_end, &uniform_sampling(t_end, s.samples), &s.pde_settings())?;
    info!("pde: {} accepted steps", sol.accepted_steps);

    let x = grid.nodes();
    let mut snapshots = Table::new(vec!["t", "x", "c", "q"]);
    for (k, &t) in sol.times.iter().enumerate() {
        for (i, &xi) in x.iter().enumerate() {
            snapshots.push(vec![t, xi, sol.c[k][i], sol.q[k][i]]);
        }
    }
    let mut outlet = Table::new(vec!["t", "c_outlet"]);
    for (&t, &c) in sol.times.iter().zip(&sol.breakthrough) {
        outlet.push(vec![t, c]);
    }

    let window = s.fit_window_or_default().expect("t_end is resolved in pde mode");
    let mut fronts = Table::new(vec!["level", "t", "position"]);
    let mut fits = Vec::new();
    for &level in &s.front_levels {
        match track_front(&sol, level, window) {
            Ok(track) => {
                for &(t, pos) in &track.positions {
                    fronts.push(vec![level, t, pos]);
                }
                fits.push(json!({"level": level, "fitted_speed": track.fitted_speed, "fit_window": window}));
            }
            Err(e) => fits.push(json!({"level": level, "fitted_speed": null, "note": e.to_string()})),
        }
    }

    let residual = mass_balance_residual(&sol);
    let worst = residual.iter().copied().fold(0.0, f64::max);
    let (c_min, c_max, q_min, q_max) = sol.bounds();
    let t_lo = breakthrough_time(&sol, s.threshold_lo).ok();
    let t_hi = breakthrough_time(&sol, s.threshold_hi).ok();
    let body = json!({
        "parameters": p,
        "grid": {"ell": ell, "n_cells": grid.n_cells(), "spacing": grid.spacing(),
                 "cell_peclet": if p.pe() > 0.0 { finite_or_null(grid.spacing() / p.pe()) } else { Value::Null }},
        "t_end": t_end,
        "accepted_steps": sol.accepted_steps,
        "wave_velocity": p.velocity(),
        "fronts": fits,
        "max_mass_balance_residual": worst,
        "breakthrough_times": {"threshold_lo": s.threshold_lo, "t_lo": t_lo,
                               "threshold_hi": s.threshold_hi, "t_hi": t_hi},
        "bounds": {"c_min": c_min, "c_max": c_max, "q_min": q_min, "q_max": q_max},
    });
    let f = config.output.format;
    Ok(vec![
        Artifact::table("pde_snapshots", &snapshots, header, f),
        Artifact::table("breakthrough", &outlet, header, f),
        Artifact::table("front", &fronts, header, f),
        Artifact::json("pde_meta", &metadata(header, body)),
    ])
}

fn render_sweep(config: &RunConfig, header: &Header) -> Result<Vec<Artifact>, CliError> {
    let p = config.params()?;
    let settings = config.solver.sweep_settings();
    let records = run_sweep(p, &config.solver.sweep_grid()?, &settings)?;
    let mut table = Table::new(vec!["pe", "l2_error", "t_window", "e_bt"]);
    let mut failures = Vec::new();
    for r in &records {
        table.push(vec![r.pe, r.l2_error, r.t_window, r.e_bt]);
        if let Some(f) = &r.failure {
            failures.push(json!({"pe": r.pe, "failure": f}));
        }
    }
    let t0 = records.iter().find(|r| r.pe == 0.0).map(|r| r.t_window);
    let body = json!({
        "parameters": p.with_pe(0.0)?,
        "eta_star": settings.eta_star,
        "thresholds": [settings.threshold_lo, settings.threshold_hi],
        "leading_order_t_window": t0,
        "points": records.len(),
        "failures": failures,
    });
    Ok(vec![
        Artifact::table("sweep", &table, header, config.output.format),
        Artifact::json("sweep_meta", &metadata(header, body)),
    ])
}

fn render_isotherm(config: &RunConfig, header: &Header) -> Result<Vec<Artifact>, CliError> {
    let iso = config.isotherm.as_ref().expect("isotherm section is resolved in isotherm mode");
    let mut table = Table::new(vec!["c_in", "q_e"]);
    for &c in &iso.c_in {
        table.push(vec![c, sips_isotherm(c, iso.k_l, iso.q_max, iso.orders)?]);
    }
    Ok(vec![Artifact::table("isotherm", &table, header, config.output.format)])
}

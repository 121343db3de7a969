//! Method-of-lines solver for the column equations
//!
//! ```text
//! Da c_t + c_x = Pe c_xx − q_t,      q_t = α c^m (1 − q)^n − (1 − α) q^n,
//! c − Pe c_x = 1 at x = 0,           c_x = 0 at x = ell,
//! ```
//!
//! starting from a clean bed. Space is discretized with second-order central
//! differences on a uniform grid; the boundary concentrations are eliminated
//! through three-point one-sided stencils, so the unknowns are the interior
//! concentrations and the adsorbed fraction at every node. Two extra states
//! accumulate the inlet and outlet fluxes for the mass audit. Time stepping
//! uses the adaptive Dormand–Prince pair with dense output at sample instants.

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DimensionlessParameters, ReactionOrders};
use crate::ode::{Dopri5, Flow, IntegratorOptions, OdeSystem, Tolerances};

/// Uniform grid on [0, ell] with `n_cells` nodes including both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialGrid {
    ell: f64,
    n_cells: usize,
}

impl SpatialGrid {
    pub const MIN_NODES: usize = 16;

    pub fn new(ell: f64, n_cells: usize) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0) {
            return Err(Error::Domain(format!("column length must be positive, got {ell}")));
        }
        if n_cells < Self::MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least {} nodes, got {n_cells}",
                Self::MIN_NODES
            )));
        }
        Ok(Self { ell, n_cells })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn spacing(&self) -> f64 {
        self.ell / (self.n_cells - 1) as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_cells).map(|i| if i + 1 == self.n_cells { self.ell } else { i as f64 * h }).collect()
    }

    /// Grid with half the spacing; every node of `self` is a node of the result.
    pub fn refined(&self) -> Self {
        Self { ell: self.ell, n_cells: 2 * self.n_cells - 1 }
    }
}

/// Numerical settings of a PDE run.
#[derive(Debug, Clone, PartialEq)]
pub struct PdeSettings {
    pub tol: Tolerances,
    pub max_steps: usize,
}

impl Default for PdeSettings {
    fn default() -> Self {
        Self { tol: Tolerances::new(1e-6, 1e-9), max_steps: 50_000_000 }
    }
}

/// Sampled space-time solution. Field rows are indexed by sample instant,
/// columns by grid node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdeSolution {
    pub grid: SpatialGrid,
    pub times: Vec<f64>,
    pub c: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    /// Outlet concentration c(ell, t) at each sample instant.
    pub breakthrough: Vec<f64>,
    /// Time-integrated boundary fluxes c − Pe c_x at the inlet and outlet.
    pub inlet_flux: Vec<f64>,
    pub outlet_flux: Vec<f64>,
    pub params: DimensionlessParameters,
    pub accepted_steps: usize,
}

/// Level-crossing positions of the concentration front and their linear fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrontTrack {
    pub level: f64,
    /// (t, x/ell) for every sample instant at which the level is crossed.
    pub positions: Vec<(f64, f64)>,
    /// Slope of the least-squares line x(t) over the fit window, in units of x per unit t.
    pub fitted_speed: f64,
    pub fit_window: (f64, f64),
}

/// Net adsorption rate α c^m (1 − q)^n − (1 − α) q^n.
pub fn step_kinetics(c: f64, q: f64, params: &DimensionlessParameters) -> f64 {
    let ReactionOrders { m, n } = params.orders();
    let alpha = params.alpha();
    alpha * c.powi(m as i32) * (1.0 - q).powi(n as i32) - (1.0 - alpha) * q.powi(n as i32)
}

/// Boundary concentrations implied by the inlet Robin and outlet Neumann
/// conditions, given the first and last two interior values.
fn boundary_values(c1: f64, c2: f64, cm1: f64, cm2: f64, pe: f64, h: f64) -> (f64, f64) {
    let r = pe / (2.0 * h);
    let inlet = (1.0 + r * (4.0 * c1 - c2)) / (1.0 + 3.0 * r);
    let outlet = (4.0 * cm1 - cm2) / 3.0;
    (inlet, outlet)
}

/// Time derivatives of a full nodal state.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRates {
    /// dc/dt at every node; the boundary entries follow from the eliminated
    /// boundary conditions.
    pub dc: Vec<f64>,
    pub dq: Vec<f64>,
    /// Boundary concentrations recomputed from the interior values.
    pub c_inlet: f64,
    pub c_outlet: f64,
    /// c − Pe c_x − 1 at the inlet, evaluated with the one-sided stencil.
    pub inlet_residual: f64,
}

/// Evaluates the semi-discrete right-hand side on a nodal state. The
/// boundary entries of `c` are ignored and replaced by the values the
/// boundary conditions impose on the interior ones.
pub fn assemble_rhs(
    c: &[f64],
    q: &[f64],
    params: &DimensionlessParameters,
    grid: &SpatialGrid,
) -> Result<FieldRates> {
    let n = grid.n_cells();
    if c.len() != n || q.len() != n {
        return Err(Error::InvalidArgument(format!(
            "fields must have {n} nodal values, got c={}, q={}",
            c.len(),
            q.len()
        )));
    }
    let system = ColumnSystem::new(params, grid)?;
    let mut state = vec![0.0; system.dim()];
    state[..n - 2].copy_from_slice(&c[1..n - 1]);
    state[n - 2..2 * n - 2].copy_from_slice(q);
    let mut rates = vec![0.0; system.dim()];
    system.rhs(0.0, &state, &mut rates);

    let h = grid.spacing();
    let pe = params.pe();
    let (c0, cn) = boundary_values(c[1], c[2], c[n - 2], c[n - 3], pe, h);
    let interior = &rates[..n - 2];
    let (d0, dn) = {
        let r = pe / (2.0 * h);
        let d1 = interior[0];
        let d2 = interior[1];
        let (dm1, dm2) = (interior[n - 3], interior[n - 4]);
        (r * (4.0 * d1 - d2) / (1.0 + 3.0 * r), (4.0 * dm1 - dm2) / 3.0)
    };
    let mut dc = Vec::with_capacity(n);
    dc.push(d0);
    dc.extend_from_slice(interior);
    dc.push(dn);
    let inlet_residual = c0 - pe * (-3.0 * c0 + 4.0 * c[1] - c[2]) / (2.0 * h) - 1.0;
    Ok(FieldRates { dc, dq: rates[n - 2..2 * n - 2].to_vec(), c_inlet: c0, c_outlet: cn, inlet_residual })
}

/// Semi-discrete column. State layout: interior concentrations c_1..c_{N−2},
/// adsorbed fractions q_0..q_{N−1}, cumulative inlet flux, cumulative outlet flux.
struct ColumnSystem<'a> {
    params: &'a DimensionlessParameters,
    nodes: usize,
    h: f64,
}

impl<'a> ColumnSystem<'a> {
    fn new(params: &'a DimensionlessParameters, grid: &SpatialGrid) -> Result<Self> {
        if params.da() <= 0.0 {
            return Err(Error::DegenerateSystem("Da = 0 removes the accumulation term".into()));
        }
        Ok(Self { params, nodes: grid.n_cells(), h: grid.spacing() })
    }

    fn interior(&self) -> usize {
        self.nodes - 2
    }

    /// Full nodal concentration from a state vector.
    fn concentration(&self, state: &[f64], out: &mut [f64]) {
        let m = self.interior();
        let c = &state[..m];
        let (c0, cn) = boundary_values(c[0], c[1], c[m - 1], c[m - 2], self.params.pe(), self.h);
        out[0] = c0;
        out[1..=m].copy_from_slice(c);
        out[m + 1] = cn;
    }
}

impl OdeSystem for ColumnSystem<'_> {
    fn dim(&self) -> usize {
        2 * self.nodes
    }

    fn rhs(&self, _t: f64, state: &[f64], d: &mut [f64]) {
        let n = self.nodes;
        let m = self.interior();
        let p = self.params;
        let (pe, da, h) = (p.pe(), p.da(), self.h);
        let c = &state[..m];
        let q = &state[m..m + n];
        let (c0, cn) = boundary_values(c[0], c[1], c[m - 1], c[m - 2], pe, h);
        let node = |i: usize| -> f64 {
            if i == 0 {
                c0
            } else if i == n - 1 {
                cn
            } else {
                c[i - 1]
            }
        };

        let (dc, rest) = d.split_at_mut(m);
        let (dq, flux) = rest.split_at_mut(n);
        dq[0] = step_kinetics(c0, q[0], p);
        dq[n - 1] = step_kinetics(cn, q[n - 1], p);
        let inv_2h = 0.5 / h;
        let inv_h2 = 1.0 / (h * h);
        for i in 1..n - 1 {
            let (cl, ci, cr) = (node(i - 1), c[i - 1], node(i + 1));
            let rate = step_kinetics(ci, q[i], p);
            dq[i] = rate;
            let cx = (cr - cl) * inv_2h;
            let cxx = (cr - 2.0 * ci + cl) * inv_h2;
            dc[i - 1] = (pe * cxx - cx - rate) / da;
        }
        let (c1, c2) = (node(1), node(2));
        let (cm1, cm2) = (node(n - 2), node(n - 3));
        flux[0] = c0 - pe * (-3.0 * c0 + 4.0 * c1 - c2) * inv_2h;
        flux[1] = cn - pe * (3.0 * cn - 4.0 * cm1 + cm2) * inv_2h;
    }
}

fn check_sampling(t_end: f64, sampling: &[f64]) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Domain(format!("t_end must be positive, got {t_end}")));
    }
    if sampling.is_empty() {
        return Err(Error::InvalidArgument("no sample instants requested".into()));
    }
    if !sampling.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("sample instants must be strictly increasing".into()));
    }
    if sampling[0] < 0.0 || sampling[sampling.len() - 1] > t_end {
        return Err(Error::InvalidArgument(format!("sample instants must lie in [0, {t_end}]")));
    }
    Ok(())
}

/// `count` equally spaced instants from 0 to `t_end` inclusive.
pub fn uniform_sampling(t_end: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    (0..count).map(|k| if k + 1 == count { t_end } else { t_end * k as f64 / (count - 1) as f64 }).collect()
}

/// Solves the column problem from a clean bed.
pub fn solve_pde(
    params: &DimensionlessParameters,
    grid: &SpatialGrid,
    t_end: f64,
    sampling: &[f64],
    settings: &PdeSettings,
) -> Result<PdeSolution> {
    let zeros = vec![0.0; grid.n_cells()];
    solve_pde_from(params, grid, &zeros, &zeros, t_end, sampling, settings)
}

/// Solves the column problem from the given nodal state. Boundary entries of
/// `c0` are replaced by the values the boundary conditions impose.
pub fn solve_pde_from(
    params: &DimensionlessParameters,
    grid: &SpatialGrid,
    c0: &[f64],
    q0: &[f64],
    t_end: f64,
    sampling: &[f64],
    settings: &PdeSettings,
) -> Result<PdeSolution> {
    check_sampling(t_end, sampling)?;
    let n = grid.n_cells();
    if c0.len() != n || q0.len() != n {
        return Err(Error::InvalidArgument(format!("initial fields must have {n} nodal values")));
    }
    let system = ColumnSystem::new(params, grid)?;
    let pe = params.pe();
    let cell_peclet = grid.spacing() / pe;
    if !(cell_peclet < 2.0) {
        warn!(
            "cell Péclet number spacing/Pe = {cell_peclet:.3} ≥ 2: central advection may oscillate; \
             use at least {} nodes",
            (grid.ell() / (2.0 * pe)).ceil() as usize + 2
        );
    }

    let m = system.interior();
    let mut y0 = vec![0.0; system.dim()];
    y0[..m].copy_from_slice(&c0[1..n - 1]);
    y0[m..m + n].copy_from_slice(q0);

    let mut sol = PdeSolution {
        grid: *grid,
        times: Vec::with_capacity(sampling.len()),
        c: Vec::with_capacity(sampling.len()),
        q: Vec::with_capacity(sampling.len()),
        breakthrough: Vec::with_capacity(sampling.len()),
        inlet_flux: Vec::with_capacity(sampling.len()),
        outlet_flux: Vec::with_capacity(sampling.len()),
        params: *params,
        accepted_steps: 0,
    };
    // The initial snapshot is the given data itself; the inlet condition
    // only constrains the boundary value for t > 0.
    let mut next = 0;
    if sampling[0] == 0.0 {
        sol.times.push(0.0);
        sol.c.push(c0.to_vec());
        sol.q.push(q0.to_vec());
        sol.breakthrough.push(c0[n - 1]);
        sol.inlet_flux.push(0.0);
        sol.outlet_flux.push(0.0);
        next = 1;
    }
    let mut record = |t: f64, state: &[f64]| {
        let mut c = vec![0.0; n];
        system.concentration(state, &mut c);
        sol.times.push(t);
        sol.breakthrough.push(c[n - 1]);
        sol.c.push(c);
        sol.q.push(state[m..m + n].to_vec());
        sol.inlet_flux.push(state[m + n]);
        sol.outlet_flux.push(state[m + n + 1]);
    };
    let opts = IntegratorOptions::new(settings.tol).with_max_steps(settings.max_steps);
    let mut buf = vec![0.0; system.dim()];
    let summary = Dopri5::new(opts).integrate(&system, 0.0, &y0, t_end, |step| {
        while next < sampling.len() && sampling[next] <= step.t {
            let ts = sampling[next];
            if ts == step.t {
                record(ts, step.y);
            } else {
                step.interpolate(ts, &mut buf);
                record(ts, &buf);
            }
            next += 1;
        }
        Flow::Continue
    })?;
    sol.accepted_steps = summary.accepted;
    Ok(sol)
}

impl PdeSolution {
    /// First sample index at or after `t`.
    fn index_from(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t)
    }

    /// Whether the outlet series is non-decreasing to `tol` from time `after` on.
    pub fn breakthrough_monotone_after(&self, after: f64, tol: f64) -> bool {
        let start = self.index_from(after);
        self.breakthrough[start..].windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Extreme values (c_min, c_max, q_min, q_max) over all samples.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let fold = |rows: &Vec<Vec<f64>>| {
            rows.iter()
                .flatten()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
        };
        let (cl, ch) = fold(&self.c);
        let (ql, qh) = fold(&self.q);
        (cl, ch, ql, qh)
    }
}

/// First time the outlet concentration reaches `threshold`, linearly interpolated between samples.
pub fn breakthrough_time(sol: &PdeSolution, threshold: f64) -> Result<f64> {
    let b = &sol.breakthrough;
    let k = b
        .iter()
        .position(|&v| v >= threshold)
        .ok_or_else(|| Error::NotFound(format!("outlet never reaches c = {threshold}")))?;
    if k == 0 {
        return Ok(sol.times[0]);
    }
    let (t0, t1) = (sol.times[k - 1], sol.times[k]);
    let (b0, b1) = (b[k - 1], b[k]);
    Ok(t0 + (threshold - b0) / (b1 - b0) * (t1 - t0))
}

/// Position of the first downward crossing of `level` by a nodal profile.
fn crossing(x: &[f64], c: &[f64], level: f64) -> Option<f64> {
    (0..c.len() - 1).find_map(|i| {
        let (a, b) = (c[i], c[i + 1]);
        if a >= level && b < level {
            Some(x[i] + (a - level) / (a - b) * (x[i + 1] - x[i]))
        } else {
            None
        }
    })
}

/// Tracks where c crosses `level` at each sample and fits a straight line
/// x(t) over `fit_window`.
pub fn track_front(sol: &PdeSolution, level: f64, fit_window: (f64, f64)) -> Result<FrontTrack> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!("level must lie in (0, 1), got {level}")));
    }
    if !(fit_window.1 > fit_window.0) {
        return Err(Error::InvalidArgument("empty fit window".into()));
    }
    let x = sol.grid.nodes();
    let ell = sol.grid.ell();
    let positions: Vec<(f64, f64)> = sol
        .times
        .iter()
        .zip(&sol.c)
        .filter_map(|(&t, c)| crossing(&x, c, level).map(|p| (t, p / ell)))
        .collect();

    let fit: Vec<(f64, f64)> = positions
        .iter()
        .filter(|(t, _)| *t >= fit_window.0 && *t <= fit_window.1)
        .map(|&(t, p)| (t, p * ell))
        .collect();
    if fit.len() < 2 {
        return Err(Error::NotFound(format!(
            "level {level} is crossed at fewer than two samples in [{}, {}]",
            fit_window.0, fit_window.1
        )));
    }
    let k = fit.len() as f64;
    let t_mean = fit.iter().map(|p| p.0).sum::<f64>() / k;
    let x_mean = fit.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = fit.iter().map(|(t, x)| (t - t_mean) * (x - x_mean)).sum();
    let sxx: f64 = fit.iter().map(|(t, _)| (t - t_mean).powi(2)).sum();
    Ok(FrontTrack { level, positions, fitted_speed: sxy / sxx, fit_window })
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1]))
}

/// Relative global mass-balance defect at each sample instant:
/// |∫flux_in − ∫flux_out − Da ∫c dx − ∫q dx| / max(∫flux_in, 1e-12).
pub fn mass_balance_residual(sol: &PdeSolution) -> Vec<f64> {
    let h = sol.grid.spacing();
    let da = sol.params.da();
    (0..sol.times.len())
        .map(|k| {
            let stored = da * trapezoid(&sol.c[k], h) + trapezoid(&sol.q[k], h);
            let net = sol.inlet_flux[k] - sol.outlet_flux[k];
            (net - stored).abs() / sol.inlet_flux[k].max(1e-12)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pe: f64) -> DimensionlessParameters {
        DimensionlessParameters::from_qe(0.5, pe, 0.7, ReactionOrders::new(1, 1).unwrap()).unwrap()
    }

    #[test]
    fn kinetics_examples() {
        let p = params(0.1);
        assert!(step_kinetics(1.0, 0.7, &p).abs() < 1e-15);
        assert_eq!(step_kinetics(0.0, 0.0, &p), 0.0);
        assert!((step_kinetics(1.0, 0.0, &p) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn grid_rules() {
        let g = SpatialGrid::new(2.0, 21).unwrap();
        assert!((g.spacing() - 0.1).abs() < 1e-15);
        assert_eq!(g.nodes()[20], 2.0);
        assert_eq!(g.refined().n_cells(), 41);
        assert!(SpatialGrid::new(1.0, 15).is_err());
        assert!(SpatialGrid::new(0.0, 20).is_err());
    }

    #[test]
    fn saturated_state_is_steady() {
        let p = params(0.1);
        let g = SpatialGrid::new(5.0, 32).unwrap();
        let r = assemble_rhs(&[1.0; 32], &[0.7; 32], &p, &g).unwrap();
        assert!(r.dc.iter().chain(&r.dq).all(|v| v.abs() < 1e-13));
        assert!(r.inlet_residual.abs() < 1e-15);
    }

    #[test]
    fn clean_bed_is_driven_by_inlet() {
        let p = params(0.1);
        let g = SpatialGrid::new(5.0, 32).unwrap();
        let r = assemble_rhs(&[0.0; 32], &[0.0; 32], &p, &g).unwrap();
        assert!(r.dc[1] > 0.0);
        assert!(r.c_inlet > 0.0 && r.inlet_residual.abs() < 1e-15);
    }

    #[test]
    fn stencils_exact_on_linear_data() {
        let p = params(0.1);
        let ell = 4.0;
        let g = SpatialGrid::new(ell, 41).unwrap();
        let x = g.nodes();
        let c: Vec<f64> = x.iter().map(|x| 1.0 - x / (2.0 * ell)).collect();
        let q = vec![0.0; 41];
        let r = assemble_rhs(&c, &q, &p, &g).unwrap();
        // with q = 0 the kinetic term is α c, so Da dc/dt + α c = −c_x = 1/(2 ell)
        for (i, &ci) in c.iter().enumerate().take(39).skip(2) {
            let lhs = p.da() * r.dc[i] + step_kinetics(ci, 0.0, &p);
            assert!((lhs - 1.0 / (2.0 * ell)).abs() < 1e-12, "node {i}: {lhs}");
        }
    }

    #[test]
    fn zero_da_cannot_be_built() {
        let o = ReactionOrders::new(1, 1).unwrap();
        assert!(DimensionlessParameters::from_qe(0.0, 0.1, 0.7, o).is_err());
    }

    #[test]
    fn tiny_horizon_returns_initial_data() {
        let p = params(0.1);
        let g = SpatialGrid::new(4.0, 41).unwrap();
        let s = solve_pde(&p, &g, 1e-12, &[0.0, 1e-12], &PdeSettings::default()).unwrap();
        assert!(s.c[0].iter().chain(&s.q[0]).all(|&v| v == 0.0));
        assert!(s.c[1][1..].iter().all(|&v| v.abs() < 1e-9));
        assert_eq!(mass_balance_residual(&s)[0], 0.0);
    }

    #[test]
    fn saturated_fixed_point_persists() {
        let p = params(0.1);
        let g = SpatialGrid::new(4.0, 41).unwrap();
        let s =
            solve_pde_from(&p, &g, &[1.0; 41], &[0.7; 41], 50.0, &[0.0, 25.0, 50.0], &PdeSettings::default())
                .unwrap();
        for (c, q) in s.c.iter().zip(&s.q) {
            assert!(c.iter().all(|v| (v - 1.0).abs() < 1e-9));
            assert!(q.iter().all(|v| (v - 0.7).abs() < 1e-9));
        }
    }

    #[test]
    fn front_fit_on_synthetic_wave() {
        let p = params(0.1);
        let g = SpatialGrid::new(40.0, 4001).unwrap();
        let x = g.nodes();
        let v = 0.8;
        let times: Vec<f64> = (0..21).map(|k| k as f64).collect();
        let c: Vec<Vec<f64>> =
            times.iter().map(|t| x.iter().map(|x| 1.0 / (1.0 + (x - 5.0 - v * t).exp())).collect()).collect();
        let sol = PdeSolution {
            grid: g,
            breakthrough: c.iter().map(|r| r[r.len() - 1]).collect(),
            q: c.clone(),
            inlet_flux: times.clone(),
            outlet_flux: vec![0.0; times.len()],
            times,
            c,
            params: p,
            accepted_steps: 0,
        };
        let track = track_front(&sol, 0.5, (0.0, 20.0)).unwrap();
        assert!((track.fitted_speed - v).abs() < 1e-6, "{}", track.fitted_speed);
        assert!(track.positions.iter().all(|&(_, s)| (0.0..=1.0).contains(&s)));
        assert!(matches!(track_front(&sol, 0.5, (30.0, 40.0)), Err(Error::NotFound(_))));
    }
}

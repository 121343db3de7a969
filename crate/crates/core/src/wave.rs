//! Travelling-wave profiles c(x,t) = F(η), q(x,t) = G(η) with η = x − x_f − v(t − t_f).
//!
//! With far-field states F(−∞) = 1, G(−∞) = q_e and F(+∞) = G(+∞) = 0, the
//! wave speed is v = 1/(q_e + Da), G is slaved to F through
//!
//! ```text
//! G = q_e F − Pe (q_e + Da) F'
//! ```
//!
//! and F solves the second-order equation
//!
//! ```text
//! Pe F'' = q_e v F' + α F^m (1 − G)^n − (1 − α) G^n .
//! ```
//!
//! Written as x = F, y = F' this is a slow-fast system with Pe as the small
//! parameter. At Pe = 0 it collapses onto the critical slow set
//! y = q_e^(n−1)(q_e + Da) p(x), which is itself the leading-order profile.
//!
//! The full heteroclinic is traced by integrating backwards in η from a seed
//! on the slow set close to F = 0. Backwards in η the fast direction is
//! strongly attracting, so the implicit integrator relaxes onto the slow
//! manifold and follows it up to F = 1. Forward in η the same direction is
//! repelling, so the tail below the seed is continued along the slow set.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::model::{equilibrium_polynomial, require_admissible, DimensionlessParameters, ReactionOrders};
use crate::ode::{Dopri5, Flow, IntegratorOptions, OdeSystem, Sdirk4, StepView, Tolerances};

/// Far-field limits of (F, G) upstream (η → −∞) and downstream (η → +∞).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarFieldStates {
    pub f0: f64,
    pub g0: f64,
    pub f_inf: f64,
    pub g_inf: f64,
}

impl FarFieldStates {
    /// Saturated inlet state behind the front, clean bed ahead of it.
    pub fn column(q_e: f64) -> Self {
        Self { f0: 1.0, g0: q_e, f_inf: 0.0, g_inf: 0.0 }
    }
}

/// Front speed from the integrated mass balance between the two far fields.
pub fn wave_velocity_general(states: &FarFieldStates, da: f64) -> Result<f64> {
    let df = states.f0 - states.f_inf;
    let denom = states.g0 - states.g_inf + da * df;
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateStates(format!("G0 - Ginf + Da (F0 - Finf) = {denom}")));
    }
    Ok(df / denom)
}

/// Adsorbed fraction on the wave, G = q_e F − Pe (q_e + Da) F'.
pub fn g_from_f(f: f64, f_prime: f64, params: &DimensionlessParameters) -> f64 {
    params.q_e() * f - params.pe() * (params.q_e() + params.da()) * f_prime
}

/// F' of the leading-order (Pe = 0) wave equation. The Pe stored in `params` is ignored.
pub fn leading_order_rhs(f: f64, params: &DimensionlessParameters) -> f64 {
    let ReactionOrders { m, n } = params.orders();
    let (q_e, alpha) = (params.q_e(), params.alpha());
    let bracket =
        (1.0 - alpha) * f.powi(n as i32) - alpha * f.powi(m as i32) * (1.0 / q_e - f).powi(n as i32);
    (q_e + params.da()) * q_e.powi(n as i32 - 1) * bracket
}

/// Critical slow set y = q_e^(n−1) (q_e + Da) p(x).
pub fn slow_set(x: f64, params: &DimensionlessParameters) -> f64 {
    let n = params.orders().n as i32;
    params.q_e().powi(n - 1) * (params.q_e() + params.da()) * equilibrium_polynomial(x, params)
}

/// Reaction term P(x, Pe·y) of the slow-fast form, together with its partial
/// derivatives in x and y.
fn reaction_term(x: f64, y: f64, params: &DimensionlessParameters) -> (f64, f64, f64) {
    let ReactionOrders { m, n } = params.orders();
    let (m, n) = (m as i32, n as i32);
    let (q_e, alpha) = (params.q_e(), params.alpha());
    let s = params.pe() * (q_e + params.da());
    // u is the adsorbed fraction G on the wave, w = 1 − G.
    let u = q_e * x - s * y;
    let w = 1.0 - u;
    let un1 = u.powi(n - 1);
    let wn1 = w.powi(n - 1);
    let xm = x.powi(m);
    let p = (1.0 - alpha) * un1 * u - alpha * xm * wn1 * w;
    let nf = n as f64;
    let dp_dx =
        (1.0 - alpha) * nf * un1 * q_e - alpha * (m as f64 * x.powi(m - 1) * wn1 * w - xm * nf * wn1 * q_e);
    let dp_dy = -(1.0 - alpha) * nf * un1 * s - alpha * xm * nf * wn1 * s;
    (p, dp_dx, dp_dy)
}

/// Right-hand side (x', y') of the full wave system for Pe > 0.
pub fn full_system_rhs(x: f64, y: f64, params: &DimensionlessParameters) -> Result<(f64, f64)> {
    let pe = params.pe();
    if pe <= 0.0 {
        return Err(Error::InvalidArgument(
            "full wave system requires Pe > 0; use leading_order_rhs at Pe = 0".into(),
        ));
    }
    let (p, _, _) = reaction_term(x, y, params);
    let qv = params.q_e() * params.velocity();
    Ok((y, (qv * y - p) / pe))
}

/// Closed-form leading-order wave for m = n = 1: F(η) = 1/(1 + exp(k η)) with k = α (q_e + Da).
pub fn closed_form_wave_11(params: &DimensionlessParameters, eta: f64) -> Result<f64> {
    let o = params.orders();
    if o.m != 1 || o.n != 1 {
        return Err(Error::Domain(format!("closed-form wave needs m = n = 1, got m={}, n={}", o.m, o.n)));
    }
    let k = params.alpha() * (params.q_e() + params.da());
    let z = k * eta;
    Ok(if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    })
}

/// Sampled travelling-wave profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveProfile {
    pub eta: Vec<f64>,
    pub f: Vec<f64>,
    /// dF/dη at each node.
    pub f_prime: Vec<f64>,
    pub g: Vec<f64>,
    pub velocity: f64,
    pub pe: f64,
    /// η has been shifted so that F(0) = 1/2.
    pub normalized: bool,
}

impl WaveProfile {
    /// Rebuilds a profile from (η, F, G) columns. F' is recovered from G when
    /// Pe > 0 and from the leading-order equation when Pe = 0.
    pub fn from_columns(
        eta: Vec<f64>,
        f: Vec<f64>,
        g: Vec<f64>,
        params: &DimensionlessParameters,
        normalized: bool,
    ) -> Result<Self> {
        if eta.len() != f.len() || eta.len() != g.len() || eta.len() < 2 {
            return Err(Error::InvalidArgument("profile columns must have equal length ≥ 2".into()));
        }
        if !eta.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("eta must be strictly increasing".into()));
        }
        let pe = params.pe();
        let f_prime = if pe > 0.0 {
            let s = pe * (params.q_e() + params.da());
            f.iter().zip(&g).map(|(&fv, &gv)| (params.q_e() * fv - gv) / s).collect()
        } else {
            f.iter().map(|&fv| leading_order_rhs(fv, params)).collect()
        };
        Ok(Self { eta, f, f_prime, g, velocity: params.velocity(), pe, normalized })
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    /// (η_min, η_max).
    pub fn window(&self) -> (f64, f64) {
        (self.eta[0], self.eta[self.eta.len() - 1])
    }

    /// Monotone cubic Hermite interpolant of F built on the exact node slopes.
    pub fn interpolant(&self) -> MonotoneCubic {
        MonotoneCubic::with_slopes(self.eta.clone(), self.f.clone(), self.f_prime.clone())
    }

    /// η where F equals `level`.
    pub fn eta_at(&self, level: f64) -> Option<f64> {
        self.interpolant().locate(level)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.first_non_decreasing().is_none()
    }

    /// Index of the first node where F fails to decrease.
    fn first_non_decreasing(&self) -> Option<usize> {
        self.f.windows(2).position(|w| w[1] >= w[0])
    }

    fn require_decreasing(&self, what: &str) -> Result<()> {
        match self.first_non_decreasing() {
            None => Ok(()),
            Some(i) => Err(Error::Convergence(format!(
                "{what} profile is not strictly decreasing at eta={:.6e} (F={:.17e}, next {:.17e})",
                self.eta[i],
                self.f[i],
                self.f[i + 1]
            ))),
        }
    }

    /// Checks the structural invariants every returned profile satisfies.
    pub fn check_invariants(&self, q_e: f64) -> std::result::Result<(), String> {
        if !self.eta.windows(2).all(|w| w[1] > w[0]) {
            return Err("eta not strictly increasing".into());
        }
        if !self.is_strictly_decreasing() {
            return Err("F not strictly decreasing".into());
        }
        let (first, last) = (self.f[0], self.f[self.len() - 1]);
        if first <= 1.0 - 1e-4 || last >= 1e-4 {
            return Err(format!("endpoints do not reach the far fields: F={first}, F={last}"));
        }
        if let Some(g) = self.g.iter().find(|&&g| !(g >= -1e-12 && g <= q_e + 1e-6)) {
            return Err(format!("G={g} outside [0, q_e]"));
        }
        if self.normalized {
            let mid = self.interpolant().eval(0.0);
            if (mid - 0.5).abs() >= 1e-8 {
                return Err(format!("F(0) = {mid}"));
            }
        }
        Ok(())
    }
}

/// Largest |F' − slow_set(F)| over profile nodes with F in `f_range` and η in `eta_range`.
pub fn slow_manifold_distance(
    profile: &WaveProfile,
    params: &DimensionlessParameters,
    f_range: (f64, f64),
    eta_range: (f64, f64),
) -> Result<f64> {
    let mut worst: Option<f64> = None;
    for ((&eta, &f), &fp) in profile.eta.iter().zip(&profile.f).zip(&profile.f_prime) {
        if (f_range.0..=f_range.1).contains(&f) && (eta_range.0..=eta_range.1).contains(&eta) {
            let d = (fp - slow_set(f, params)).abs();
            worst = Some(worst.map_or(d, |w: f64| w.max(d)));
        }
    }
    worst.ok_or_else(|| Error::Coverage("no profile nodes in the requested range".into()))
}

/// Numerical settings for wave computations.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSettings {
    pub tol: Tolerances,
    /// Forward integration stops once F falls below this value...
    pub f_stop_low: f64,
    /// ...and backward integration once F exceeds 1 minus this value.
    pub f_stop_high: f64,
    /// Distance from F = 0 of the slow-set seed for the full wave.
    pub seed_delta: f64,
    /// Floor of the slow-set tail appended below the seed.
    pub tail_floor: f64,
    /// Profiles cover at least [−half_window, half_window] after normalization.
    pub half_window: f64,
    pub max_steps: usize,
    /// Use the explicit integrator for Pe at or above this value.
    pub explicit_from_pe: Option<f64>,
}

impl Default for WaveSettings {
    fn default() -> Self {
        Self {
            tol: Tolerances::new(1e-8, 1e-10),
            f_stop_low: 1e-6,
            f_stop_high: 1e-6,
            seed_delta: 1e-6,
            tail_floor: 1e-8,
            half_window: 20.0,
            max_steps: 500_000,
            explicit_from_pe: None,
        }
    }
}

impl WaveSettings {
    fn options(&self) -> IntegratorOptions {
        IntegratorOptions::new(self.tol).with_max_steps(self.max_steps)
    }
}

const DIVERGENCE_BAND: (f64, f64) = (-0.1, 1.1);
const ETA_LIMIT: f64 = 1e15;
/// Local η extent after which the backward wave integration restarts its origin.
const SEGMENT_SPAN: f64 = 1e3;
/// Behind the front F is indistinguishable from 1 once 1 − F drops below this.
const SATURATED: f64 = 1e-13;

/// (ln F)' = F'/F on the leading-order equation. Both reaction terms carry a
/// factor F, so this is regular down to F = 0.
fn log_rate(f: f64, params: &DimensionlessParameters) -> f64 {
    let ReactionOrders { m, n } = params.orders();
    let (q_e, alpha) = (params.q_e(), params.alpha());
    let bracket =
        (1.0 - alpha) * f.powi(n as i32 - 1) - alpha * f.powi(m as i32 - 1) * (1.0 / q_e - f).powi(n as i32);
    (q_e + params.da()) * q_e.powi(n as i32 - 1) * bracket
}

struct LeadingOrderSystem<'a>(&'a DimensionlessParameters);

impl OdeSystem for LeadingOrderSystem<'_> {
    fn dim(&self) -> usize {
        1
    }
    fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) {
        d[0] = leading_order_rhs(y[0], self.0);
    }
}

/// Leading-order equation (equivalently the slow-set flow) in u = ln F, used
/// ahead of the front where F decays over many orders of magnitude.
struct LogTailSystem<'a>(&'a DimensionlessParameters);

impl OdeSystem for LogTailSystem<'_> {
    fn dim(&self) -> usize {
        1
    }
    fn rhs(&self, _t: f64, y: &[f64], d: &mut [f64]) {
        d[0] = log_rate(y[0].exp(), self.0);
    }
}

/// Integrates the tail ahead of the front from F(eta0) = f_start until F falls
/// below `floor` and eta reaches `eta_min`.
fn log_tail(
    params: &DimensionlessParameters,
    settings: &WaveSettings,
    f_start: f64,
    floor: f64,
    eta_min: f64,
) -> Result<Branch> {
    let mut branch = Branch::default();
    let opts = settings.options();
    Dopri5::new(opts).integrate(&LogTailSystem(params), 0.0, &[f_start.ln()], ETA_LIMIT, |step| {
        let pieces = node_pieces(step.y_prev[0].exp(), step.y[0].exp());
        let mut u = [0.0];
        for j in 1..=pieces {
            let eta = sub_node(step, j, pieces, &mut u);
            let f = u[0].exp();
            branch.push(eta, f, f * log_rate(f, params));
        }
        let f = step.y[0].exp();
        if f < floor && step.t >= eta_min {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    // F reaches zero only asymptotically; a collapse to 0 means underflow, not divergence.
    if let Some(i) = branch.f.iter().position(|&f| f <= 0.0 || !f.is_finite()) {
        return Err(Error::Divergence { eta: branch.eta[i], f: branch.f[i] });
    }
    Ok(branch)
}

struct FullWaveSystem<'a> {
    params: &'a DimensionlessParameters,
    qv: f64,
}

impl OdeSystem for FullWaveSystem<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, _t: f64, s: &[f64], d: &mut [f64]) {
        let (p, _, _) = reaction_term(s[0], s[1], self.params);
        d[0] = s[1];
        d[1] = (self.qv * s[1] - p) / self.params.pe();
    }

    fn jacobian(&self, _t: f64, s: &[f64], jac: &mut DMatrix<f64>) {
        let (_, px, py) = reaction_term(s[0], s[1], self.params);
        let pe = self.params.pe();
        jac[(0, 0)] = 0.0;
        jac[(0, 1)] = 1.0;
        jac[(1, 0)] = -px / pe;
        jac[(1, 1)] = (self.qv - py) / pe;
    }
}

/// Largest change of F, ln F or ln(1 − F) between stored nodes.
const NODE_INCREMENT: f64 = 0.05;

/// Number of nodes to store inside a step from F = a to F = b so that
/// consecutive nodes differ by at most [`NODE_INCREMENT`] in F, ln F and ln(1 − F).
fn node_pieces(a: f64, b: f64) -> usize {
    let log_gap = |x: f64, y: f64| {
        if x > 0.0 && y > 0.0 {
            (x / y).ln().abs()
        } else {
            0.0
        }
    };
    let spread = (a - b).abs().max(log_gap(a, b)).max(log_gap(1.0 - a, 1.0 - b));
    ((spread / NODE_INCREMENT).ceil() as usize).clamp(1, 1000)
}

/// Fills `out` with the state at the `j`-th of `pieces` equal subdivisions of
/// the step and returns its abscissa; the last one is the step end itself.
fn sub_node(step: &StepView, j: usize, pieces: usize, out: &mut [f64]) -> f64 {
    if j == pieces {
        out.copy_from_slice(step.y);
        return step.t;
    }
    let t = step.t_prev + (step.t - step.t_prev) * j as f64 / pieces as f64;
    step.interpolate(t, out);
    t
}

/// Collected nodes of one integration branch.
#[derive(Default)]
struct Branch {
    eta: Vec<f64>,
    f: Vec<f64>,
    fp: Vec<f64>,
    diverged: Option<(f64, f64)>,
}

impl Branch {
    fn push(&mut self, eta: f64, f: f64, fp: f64) {
        self.eta.push(eta);
        self.f.push(f);
        self.fp.push(fp);
    }

    /// Records the step and reports whether F has left the admissible strip.
    fn record(&mut self, step: &StepView, fp: f64) -> bool {
        let f = step.y[0];
        self.push(step.t, f, fp);
        if !(DIVERGENCE_BAND.0..=DIVERGENCE_BAND.1).contains(&f) || !f.is_finite() {
            self.diverged = Some((step.t, f));
            return true;
        }
        false
    }
}

/// Leading-order (Pe = 0) profile, anchored by starting at F(0) = 1/2.
pub fn solve_leading_order(params: &DimensionlessParameters, settings: &WaveSettings) -> Result<WaveProfile> {
    require_admissible(params)?;
    let system = LeadingOrderSystem(params);
    let solver = Dopri5::new(settings.options());
    let w = settings.half_window;

    let ahead = log_tail(params, settings, 0.5, settings.f_stop_low, w)?;

    let mut behind = Branch::default();
    solver.integrate(&system, 0.0, &[0.5], -ETA_LIMIT, |step| {
        let pieces = node_pieces(step.y_prev[0], step.y[0]);
        let mut v = [0.0];
        for j in 1..pieces {
            let eta = sub_node(step, j, pieces, &mut v);
            behind.push(eta, v[0], leading_order_rhs(v[0], params));
        }
        if behind.record(step, step.dydt[0]) {
            return Flow::Stop;
        }
        let f = step.y[0];
        if (f > 1.0 - settings.f_stop_high && step.t <= -w) || 1.0 - f < SATURATED {
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    if let Some((eta, f)) = behind.diverged {
        return Err(Error::Divergence { eta, f });
    }

    let mut eta: Vec<f64> = behind.eta.iter().rev().copied().collect();
    let mut f: Vec<f64> = behind.f.iter().rev().copied().collect();
    let mut fp: Vec<f64> = behind.fp.iter().rev().copied().collect();
    eta.push(0.0);
    f.push(0.5);
    fp.push(leading_order_rhs(0.5, params));
    eta.extend_from_slice(&ahead.eta);
    f.extend_from_slice(&ahead.f);
    fp.extend_from_slice(&ahead.fp);

    let g = f.iter().map(|&v| params.q_e() * v).collect();
    let profile =
        WaveProfile { eta, f, f_prime: fp, g, velocity: params.velocity(), pe: 0.0, normalized: true };
    profile.require_decreasing("leading-order")?;
    Ok(profile)
}

/// Heteroclinic of the full second-order wave equation for Pe > 0, normalized to F(0) = 1/2.
pub fn solve_full_wave(params: &DimensionlessParameters, settings: &WaveSettings) -> Result<WaveProfile> {
    let pe = params.pe();
    if pe <= 0.0 {
        return Err(Error::InvalidArgument(
            "solve_full_wave requires Pe > 0; use solve_leading_order for Pe = 0".into(),
        ));
    }
    require_admissible(params)?;
    let delta = settings.seed_delta;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidArgument(format!("seed delta must lie in (0, 1/2), got {delta}")));
    }
    let w = settings.half_window;
    let system = FullWaveSystem { params, qv: params.q_e() * params.velocity() };
    let seed = [delta, slow_set(delta, params)];

    // Backward branch: from the seed up to the saturated state. For m > 1 the
    // seed may sit 1e6..1e12 away from the front, so the integration restarts
    // from a fresh origin whenever the local η exceeds SEGMENT_SPAN; node
    // positions are later assembled relative to the segment holding F = 1/2.
    let mut opts = settings.options();
    // The seed is O(δ): keep the absolute tolerance below the relative one at that scale.
    opts.tol.abs = opts.tol.abs.min(opts.tol.rel * delta);
    let use_explicit = settings.explicit_from_pe.is_some_and(|p| pe >= p);
    let mut segments: Vec<Branch> = Vec::new();
    let mut spans: Vec<f64> = Vec::new();
    // (segment, local η, rough global η) of the F = 1/2 crossing.
    let mut half: Option<(usize, f64, f64)> = None;
    let mut state = seed.to_vec();
    let mut origin = 0.0;
    let mut steps = 0;
    loop {
        let k = segments.len();
        let mut branch = Branch::default();
        let mut done = false;
        let observer = |step: &StepView| {
            if branch.record(step, step.y[1]) {
                return Flow::Stop;
            }
            if half.is_none() && step.y[0] >= 0.5 {
                let (x0, x1) = (step.y_prev[0], step.y[0]);
                let s = if x1 > x0 { (0.5 - x0) / (x1 - x0) } else { 1.0 };
                let local = step.t_prev + s * (step.t - step.t_prev);
                half = Some((k, local, origin + local));
            }
            done = match half {
                Some(_) if 1.0 - step.y[0] < SATURATED => true,
                Some((_, _, h)) => step.y[0] > 1.0 - settings.f_stop_high && origin + step.t <= h - w,
                None => false,
            };
            if done || step.t < -SEGMENT_SPAN {
                Flow::Stop
            } else {
                Flow::Continue
            }
        };
        let summary = if use_explicit {
            Dopri5::new(opts.clone()).integrate(&system, 0.0, &state, -ETA_LIMIT, observer)?
        } else {
            Sdirk4::new(opts.clone()).integrate(&system, 0.0, &state, -ETA_LIMIT, observer)?
        };
        if let Some((eta, f)) = branch.diverged {
            return Err(Error::Divergence { eta: origin + eta, f });
        }
        segments.push(branch);
        if done {
            break;
        }
        steps += summary.accepted;
        origin += summary.t;
        if !summary.stopped || origin < -ETA_LIMIT || steps > settings.max_steps {
            return Err(Error::Convergence("backward integration never reached F = 1".into()));
        }
        spans.push(summary.t);
        state = summary.y;
        opts.h_init = Some(summary.h_next);
    }
    let (k_half, local_half, rough_half) =
        half.ok_or_else(|| Error::Convergence("profile never crossed F = 1/2".into()))?;

    // Origin of segment k relative to the origin of the half-crossing segment,
    // summed outward from that segment so nearby positions stay exact.
    let relative_origin = |k: usize| -> f64 {
        if k >= k_half {
            spans[k_half..k].iter().sum()
        } else {
            -spans[k..k_half].iter().rev().sum::<f64>()
        }
    };

    // Tail below the seed, continued along the slow set.
    let ahead = log_tail(params, settings, delta, settings.tail_floor, rough_half + w)?;

    let mut eta = Vec::new();
    let mut f = Vec::new();
    let mut fp = Vec::new();
    for (k, branch) in segments.iter().enumerate().rev() {
        let base = relative_origin(k);
        for i in (0..branch.eta.len()).rev() {
            eta.push(base + branch.eta[i] - local_half);
            f.push(branch.f[i]);
            fp.push(branch.fp[i]);
        }
    }
    let seed_eta = relative_origin(0) - local_half;
    eta.push(seed_eta);
    f.push(seed[0]);
    fp.push(seed[1]);
    eta.extend(ahead.eta.iter().map(|e| seed_eta + e));
    f.extend_from_slice(&ahead.f);
    fp.extend_from_slice(&ahead.fp);

    let raw = MonotoneCubic::with_slopes(eta.clone(), f.clone(), fp.clone());
    let shift = raw.locate(0.5).ok_or_else(|| Error::Convergence("profile never crossed F = 1/2".into()))?;
    for e in eta.iter_mut() {
        *e -= shift;
    }
    let g = f.iter().zip(&fp).map(|(&fv, &d)| g_from_f(fv, d, params)).collect();
    let profile = WaveProfile { eta, f, f_prime: fp, g, velocity: params.velocity(), pe, normalized: true };
    profile.require_decreasing("full wave")?;
    Ok(profile)
}

/// Dispatches on Pe: leading-order profile at Pe = 0, full heteroclinic otherwise.
pub fn solve_wave(params: &DimensionlessParameters, settings: &WaveSettings) -> Result<WaveProfile> {
    if params.pe() > 0.0 {
        solve_full_wave(params, settings)
    } else {
        solve_leading_order(params, settings)
    }
}

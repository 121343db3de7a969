//! Adaptive one-step integrators.
//!
//! [`Dopri5`] is the Dormand–Prince 5(4) pair with its continuous extension,
//! used for the method-of-lines PDE and the non-stiff scalar wave equations.
//! [`Sdirk4`] is an L-stable singly diagonally implicit Runge–Kutta method of
//! order 4 with an embedded order-3 solution, used for the stiff
//! travelling-wave system.
//!
//! Both integrate in either direction of the independent variable and report
//! every accepted step to an observer, which may stop the integration early.

use nalgebra::DMatrix;
use thiserror::Error;

mod dopri5;
mod sdirk;

pub use dopri5::Dopri5;
pub use sdirk::Sdirk4;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t={t:.6e} (h={h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },
    #[error("maximum number of steps ({steps}) exceeded at t={t:.6e}")]
    MaxStepsExceeded { t: f64, steps: usize },
    #[error("non-finite state at t={t:.6e}")]
    NonFinite { t: f64 },
}

/// Right-hand side of y' = f(t, y).
pub trait OdeSystem {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);

    /// ∂f/∂y. The default uses forward differences.
    fn jacobian(&self, t: f64, y: &[f64], jac: &mut DMatrix<f64>) {
        let n = self.dim();
        let mut f0 = vec![0.0; n];
        let mut f1 = vec![0.0; n];
        let mut yp = y.to_vec();
        self.rhs(t, y, &mut f0);
        for j in 0..n {
            let delta = f64::EPSILON.sqrt() * y[j].abs().max(1e-8);
            yp[j] = y[j] + delta;
            self.rhs(t, &yp, &mut f1);
            yp[j] = y[j];
            for i in 0..n {
                jac[(i, j)] = (f1[i] - f0[i]) / delta;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerances {
    pub const fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// RMS norm of `err` scaled by `abs + rel * max(|a|, |b|)`.
    pub(crate) fn error_norm(&self, err: &[f64], a: &[f64], b: &[f64]) -> f64 {
        let sum: f64 = err
            .iter()
            .zip(a.iter().zip(b))
            .map(|(e, (x, y))| {
                let sk = self.abs + self.rel * x.abs().max(y.abs());
                (e / sk).powi(2)
            })
            .sum();
        (sum / err.len() as f64).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct IntegratorOptions {
    pub tol: Tolerances,
    /// Initial step magnitude; estimated when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl IntegratorOptions {
    pub fn new(tol: Tolerances) -> Self {
        Self { tol, h_init: None, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

/// Observer verdict after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

pub(crate) trait Interpolant {
    fn eval(&self, t: f64, out: &mut [f64]);
}

/// An accepted step as seen by an observer.
pub struct StepView<'a> {
    pub t_prev: f64,
    pub t: f64,
    pub y_prev: &'a [f64],
    pub y: &'a [f64],
    /// f(t, y) at the end of the step.
    pub dydt: &'a [f64],
    interp: &'a dyn Interpolant,
}

impl StepView<'_> {
    /// Continuous output inside [t_prev, t].
    pub fn interpolate(&self, t: f64, out: &mut [f64]) {
        self.interp.eval(t, out);
    }
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub t: f64,
    pub y: Vec<f64>,
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
    /// True when the observer requested the stop.
    pub stopped: bool,
    /// Step magnitude the controller would have tried next; useful to resume.
    pub h_next: f64,
}

/// Hairer's starting step heuristic for a method of order `order`.
pub(crate) fn initial_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    direction: f64,
    order: i32,
    tol: &Tolerances,
    h_max: f64,
) -> f64 {
    let n = y0.len();
    let sk: Vec<f64> = y0.iter().map(|y| tol.abs + tol.rel * y.abs()).collect();
    let rms = |v: &[f64]| -> f64 {
        (v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = rms(y0);
    let d1 = rms(f0);
    let mut h = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(h_max);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, f)| y + direction * h * f).collect();
    let mut f1 = vec![0.0; n];
    sys.rhs(t0 + direction * h, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (1e-6f64).max(h * 1e-3) } else { (0.01 / dm).powf(1.0 / (order as f64 + 1.0)) };
    (100.0 * h).min(h1).min(h_max)
}

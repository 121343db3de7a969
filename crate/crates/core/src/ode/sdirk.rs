use nalgebra::{DMatrix, DVector};

use super::{initial_step, Flow, IntegratorOptions, Interpolant, OdeError, OdeSystem, StepView, Summary};

const STAGES: usize = 5;
const GAMMA: f64 = 0.25;

// Hairer & Wanner, Solving ODEs II, Table 6.5 (SDIRK4, L-stable, stiffly accurate).
pub(crate) const C: [f64; STAGES] = [0.25, 0.75, 11.0 / 20.0, 0.5, 1.0];
pub(crate) const A: [[f64; STAGES]; STAGES] = [
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [0.5, 0.25, 0.0, 0.0, 0.0],
    [17.0 / 50.0, -1.0 / 25.0, 0.25, 0.0, 0.0],
    [371.0 / 1360.0, -137.0 / 2720.0, 15.0 / 544.0, 0.25, 0.0],
    [25.0 / 24.0, -49.0 / 48.0, 125.0 / 16.0, -85.0 / 12.0, 0.25],
];
pub(crate) const B: [f64; STAGES] = A[4];
pub(crate) const B_HAT: [f64; STAGES] = [59.0 / 48.0, -17.0 / 96.0, 225.0 / 32.0, -85.0 / 12.0, 0.0];

const SAFETY: f64 = 0.9;
const NEWTON_MAX_ITER: usize = 8;
const NEWTON_TOL: f64 = 0.02;

/// Singly diagonally implicit Runge–Kutta method of order 4 with simplified
/// Newton iterations and Shampine's filtered error estimate.
#[derive(Debug, Clone)]
pub struct Sdirk4 {
    opts: IntegratorOptions,
}

struct DenseHermite<'a> {
    t_prev: f64,
    h: f64,
    y0: &'a [f64],
    f0: &'a [f64],
    y1: &'a [f64],
    f1: &'a [f64],
}

impl Interpolant for DenseHermite<'_> {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t_prev) / self.h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        for (i, o) in out.iter_mut().enumerate() {
            *o = h00 * self.y0[i] + h10 * self.h * self.f0[i] + h01 * self.y1[i] + h11 * self.h * self.f1[i];
        }
    }
}

enum StepOutcome {
    Done { err_norm: f64 },
    NewtonFailed,
}

impl Sdirk4 {
    pub fn new(opts: IntegratorOptions) -> Self {
        Self { opts }
    }

    pub fn integrate<S, O>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        mut observer: O,
    ) -> Result<Summary, OdeError>
    where
        S: OdeSystem + ?Sized,
        O: FnMut(&StepView) -> Flow,
    {
        let n = sys.dim();
        assert_eq!(y0.len(), n);
        let tol = self.opts.tol;
        let direction = if t_end >= t0 { 1.0 } else { -1.0 };

        let mut t = t0;
        let mut y = y0.to_vec();
        let mut f0 = vec![0.0; n];
        sys.rhs(t, &y, &mut f0);
        let mut rhs_evals = 1;

        let h_max = self.opts.h_max.min((t_end - t0).abs());
        if h_max == 0.0 {
            return Ok(Summary { t, y, accepted: 0, rejected: 0, rhs_evals, stopped: false, h_next: 0.0 });
        }
        let mut h = match self.opts.h_init {
            Some(h) => h.min(h_max),
            None => {
                rhs_evals += 1;
                initial_step(sys, t, &y, &f0, direction, 4, &tol, h_max)
            }
        };

        let mut jac = DMatrix::zeros(n, n);
        let mut k = vec![vec![0.0; n]; STAGES];
        let mut y_new = vec![0.0; n];
        let mut f_new = vec![0.0; n];
        let (mut accepted, mut rejected) = (0usize, 0usize);
        let mut jac_current = false;

        loop {
            if accepted + rejected >= self.opts.max_steps {
                return Err(OdeError::MaxStepsExceeded { t, steps: self.opts.max_steps });
            }
            let remaining = (t_end - t).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            if last {
                h = remaining;
            }
            if h <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
                return Err(OdeError::StepSizeUnderflow { t, h });
            }
            let hs = direction * h;

            if !jac_current {
                sys.jacobian(t, &y, &mut jac);
                jac_current = true;
            }
            let outcome = self.attempt(sys, t, hs, &y, &f0, &jac, &mut k, &mut y_new, &mut rhs_evals);

            match outcome {
                StepOutcome::NewtonFailed => {
                    rejected += 1;
                    h *= 0.25;
                    continue;
                }
                StepOutcome::Done { err_norm } => {
                    let fac = (SAFETY * err_norm.max(1e-10).powf(-0.25)).clamp(0.2, 4.0);
                    if err_norm <= 1.0 {
                        accepted += 1;
                        let t_new = if last { t_end } else { t + hs };
                        // stiffly accurate: the last stage derivative is f(t_new, y_new)
                        f_new.copy_from_slice(&k[STAGES - 1]);
                        let dense =
                            DenseHermite { t_prev: t, h: hs, y0: &y, f0: &f0, y1: &y_new, f1: &f_new };
                        let view = StepView {
                            t_prev: t,
                            t: t_new,
                            y_prev: &y,
                            y: &y_new,
                            dydt: &f_new,
                            interp: &dense,
                        };
                        let flow = observer(&view);
                        std::mem::swap(&mut y, &mut y_new);
                        std::mem::swap(&mut f0, &mut f_new);
                        t = t_new;
                        jac_current = false;
                        if flow == Flow::Stop || last {
                            return Ok(Summary {
                                t,
                                y,
                                accepted,
                                rejected,
                                rhs_evals,
                                stopped: flow == Flow::Stop,
                                h_next: (h * fac).min(self.opts.h_max),
                            });
                        }
                        h = (h * fac).min(self.opts.h_max);
                    } else {
                        rejected += 1;
                        h *= fac.min(0.9);
                    }
                }
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn attempt<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t: f64,
        hs: f64,
        y: &[f64],
        f0: &[f64],
        jac: &DMatrix<f64>,
        k: &mut [Vec<f64>],
        y_new: &mut [f64],
        rhs_evals: &mut usize,
    ) -> StepOutcome {
        let n = y.len();
        let tol = &self.opts.tol;
        let hg = hs * GAMMA;
        let iteration = DMatrix::<f64>::identity(n, n) - jac * hg;
        let Some(lu) = iteration.lu().try_inverse() else {
            return StepOutcome::NewtonFailed;
        };

        let sk: Vec<f64> = y.iter().map(|v| tol.abs + tol.rel * v.abs()).collect();
        let scaled = |v: &DVector<f64>| -> f64 {
            (v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / n as f64).sqrt()
        };

        let mut base = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut fz = vec![0.0; n];
        for stage in 0..STAGES {
            for i in 0..n {
                let mut acc = 0.0;
                for j in 0..stage {
                    acc += A[stage][j] * k[j][i];
                }
                base[i] = y[i] + hs * acc;
            }
            let guess = if stage == 0 { f0 } else { &k[stage - 1] };
            for i in 0..n {
                z[i] = base[i] + hg * guess[i];
            }
            let tz = t + C[stage] * hs;
            let mut converged = false;
            let mut prev_norm = f64::INFINITY;
            for _ in 0..NEWTON_MAX_ITER {
                sys.rhs(tz, &z, &mut fz);
                *rhs_evals += 1;
                let residual = DVector::from_iterator(n, (0..n).map(|i| base[i] + hg * fz[i] - z[i]));
                let delta = &lu * residual;
                if !delta.iter().all(|v| v.is_finite()) {
                    return StepOutcome::NewtonFailed;
                }
                for i in 0..n {
                    z[i] += delta[i];
                }
                let norm = scaled(&delta);
                if norm <= NEWTON_TOL {
                    converged = true;
                    break;
                }
                if norm > 0.9 * prev_norm && prev_norm.is_finite() {
                    break;
                }
                prev_norm = norm;
            }
            if !converged {
                return StepOutcome::NewtonFailed;
            }
            for i in 0..n {
                k[stage][i] = (z[i] - base[i]) / hg;
            }
        }
        y_new.copy_from_slice(&z);
        // Replace the algebraic stage derivative by f(y_new) for the dense output.
        sys.rhs(t + hs, y_new, &mut fz);
        *rhs_evals += 1;

        let err = DVector::from_iterator(
            n,
            (0..n).map(|i| hs * (0..STAGES).map(|s| (B[s] - B_HAT[s]) * k[s][i]).sum::<f64>()),
        );
        let filtered = &lu * err;
        let err_vec: Vec<f64> = filtered.iter().copied().collect();
        let err_norm = tol.error_norm(&err_vec, y, y_new);
        k[STAGES - 1].copy_from_slice(&fz);
        if !err_norm.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            return StepOutcome::Done { err_norm: 1e10 };
        }
        StepOutcome::Done { err_norm }
    }
}

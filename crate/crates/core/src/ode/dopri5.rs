use super::{initial_step, Flow, IntegratorOptions, Interpolant, OdeError, OdeSystem, StepView, Summary};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// continuous extension
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Dormand–Prince 5(4) with PI step control and 4th-order dense output.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    opts: IntegratorOptions,
}

struct DenseDopri<'a> {
    t_prev: f64,
    h: f64,
    cont: [&'a [f64]; 5],
}

impl Interpolant for DenseDopri<'_> {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t_prev) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = self.cont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

impl Dopri5 {
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
        let mut k1 = vec![0.0; n];
        let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
            (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut ytmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        let mut err = vec![0.0; n];
        let mut cont: [Vec<f64>; 5] = std::array::from_fn(|_| vec![0.0; n]);

        sys.rhs(t, &y, &mut k1);
        let mut rhs_evals = 1;
        let h_max = self.opts.h_max.min((t_end - t0).abs());
        let mut h = match self.opts.h_init {
            Some(h) => h.min(h_max),
            None => {
                rhs_evals += 1;
                initial_step(sys, t, &y, &k1, direction, 5, &tol, h_max)
            }
        };
        if h_max == 0.0 {
            return Ok(Summary { t, y, accepted: 0, rejected: 0, rhs_evals, stopped: false, h_next: 0.0 });
        }

        let mut fac_old: f64 = 1e-4;
        let mut last_rejected = false;
        let (mut accepted, mut rejected) = (0usize, 0usize);

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

            for i in 0..n {
                ytmp[i] = y[i] + hs * A21 * k1[i];
            }
            sys.rhs(t + C2 * hs, &ytmp, &mut k2);
            for i in 0..n {
                ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
            }
            sys.rhs(t + C3 * hs, &ytmp, &mut k3);
            for i in 0..n {
                ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            sys.rhs(t + C4 * hs, &ytmp, &mut k4);
            for i in 0..n {
                ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            sys.rhs(t + C5 * hs, &ytmp, &mut k5);
            for i in 0..n {
                ytmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let t_new = if last { t_end } else { t + hs };
            sys.rhs(t_new, &ytmp, &mut k6);
            for i in 0..n {
                y_new[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
            }
            sys.rhs(t_new, &y_new, &mut k7);
            rhs_evals += 6;

            for i in 0..n {
                err[i] = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            }
            let mut err_norm = tol.error_norm(&err, &y, &y_new);
            if !err_norm.is_finite() {
                err_norm = 1e10;
            }

            let fac11 = err_norm.powf(0.2 - BETA * 0.75);
            let fac = (fac11 / fac_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;

            if err_norm <= 1.0 {
                fac_old = err_norm.max(1e-4);
                accepted += 1;

                for i in 0..n {
                    let ydiff = y_new[i] - y[i];
                    let bspl = hs * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - hs * k7[i] - bspl;
                    cont[4][i] =
                        hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let dense =
                    DenseDopri { t_prev: t, h: hs, cont: [&cont[0], &cont[1], &cont[2], &cont[3], &cont[4]] };
                let view = StepView { t_prev: t, t: t_new, y_prev: &y, y: &y_new, dydt: &k7, interp: &dense };
                let flow = observer(&view);

                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                t = t_new;

                if last_rejected {
                    h_new = h_new.min(h);
                }
                if flow == Flow::Stop || last {
                    return Ok(Summary {
                        t,
                        y,
                        accepted,
                        rejected,
                        rhs_evals,
                        stopped: flow == Flow::Stop,
                        h_next: h_new.min(self.opts.h_max),
                    });
                }
                last_rejected = false;
            } else {
                h_new = h / (fac11 / SAFETY).min(1.0 / FAC_MIN);
                last_rejected = true;
                if accepted >= 1 {
                    rejected += 1;
                }
            }
            h = h_new.min(self.opts.h_max);
        }
    }
}

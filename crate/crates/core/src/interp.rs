//! Monotone cubic Hermite interpolation and scalar root bracketing.

/// Bisection on a sign-changing bracket. Returns `None` when `f(lo)` and
/// `f(hi)` share a sign.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Some(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Piecewise cubic Hermite interpolant whose node slopes are limited with the
/// Fritsch–Carlson conditions, so monotone data yields a monotone curve.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    /// `x` must be strictly increasing. `slopes` are derivative estimates at
    /// the nodes (exact derivatives when available).
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, slopes: Vec<f64>) -> Self {
        assert!(x.len() >= 2, "need at least two nodes");
        assert_eq!(x.len(), y.len());
        assert_eq!(x.len(), slopes.len());
        debug_assert!(x.windows(2).all(|w| w[1] > w[0]), "nodes must increase");
        let mut d = slopes;
        for k in 0..x.len() - 1 {
            let delta = (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
            if delta == 0.0 {
                d[k] = 0.0;
                d[k + 1] = 0.0;
                continue;
            }
            let mut a = d[k] / delta;
            let mut b = d[k + 1] / delta;
            if a < 0.0 {
                d[k] = 0.0;
                a = 0.0;
            }
            if b < 0.0 {
                d[k + 1] = 0.0;
                b = 0.0;
            }
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let tau = 3.0 / r2.sqrt();
                d[k] = tau * a * delta;
                d[k + 1] = tau * b * delta;
            }
        }
        Self { x, y, d }
    }

    /// Slopes from the Fritsch–Butland weighted harmonic mean of neighbouring secants.
    pub fn from_data(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2);
        let secant = |k: usize| (y[k + 1] - y[k]) / (x[k + 1] - x[k]);
        let mut d = vec![0.0; n];
        d[0] = secant(0);
        d[n - 1] = secant(n - 2);
        for k in 1..n - 1 {
            let (s0, s1) = (secant(k - 1), secant(k));
            if s0 * s1 > 0.0 {
                let (h0, h1) = (x[k] - x[k - 1], x[k + 1] - x[k]);
                let w0 = 2.0 * h1 + h0;
                let w1 = h1 + 2.0 * h0;
                d[k] = (w0 + w1) / (w0 / s0 + w1 / s1);
            }
        }
        Self::with_slopes(x, y, d)
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    fn eval_on(&self, k: usize, t: f64) -> f64 {
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }

    /// Interpolated value; clamps to the end values outside the node range.
    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x_max() {
            return self.y[self.y.len() - 1];
        }
        self.eval_on(self.segment(t), t)
    }

    /// Abscissa where the interpolant first reaches `level`, scanning left to right.
    pub fn locate(&self, level: f64) -> Option<f64> {
        let k = (0..self.x.len() - 1).find(|&k| {
            let (a, b) = (self.y[k] - level, self.y[k + 1] - level);
            a == 0.0 || a.signum() != b.signum()
        })?;
        bisect(|t| self.eval_on(k, t) - level, self.x[k], self.x[k + 1], 1e-15 * (1.0 + self.x[k].abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_with_exact_slopes() {
        let f = |x: f64| 1.0 + x + 0.1 * x * x * x;
        let df = |x: f64| 1.0 + 0.3 * x * x;
        let xs: Vec<f64> = (0..6).map(|i| i as f64 * 0.7).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        let ds = xs.iter().map(|&x| df(x)).collect();
        let c = MonotoneCubic::with_slopes(xs, ys, ds);
        for i in 0..50 {
            let t = i as f64 * 0.07;
            assert!((c.eval(t) - f(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_data_stays_monotone() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![1.0, 0.99, 0.5, 0.01, 0.0];
        let c = MonotoneCubic::from_data(xs, ys);
        let mut prev = f64::INFINITY;
        for i in 0..=400 {
            let v = c.eval(i as f64 * 0.01);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn locate_inverts() {
        let xs: Vec<f64> = (0..41).map(|i| -10.0 + 0.5 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| 1.0 / (1.0 + x.exp())).collect();
        let ds: Vec<f64> = ys.iter().map(|&y| -y * (1.0 - y)).collect();
        let c = MonotoneCubic::with_slopes(xs, ys, ds);
        let x = c.locate(0.5).unwrap();
        assert!(x.abs() < 1e-12);
        assert!((c.eval(x) - 0.5).abs() < 1e-14);
        assert!(c.locate(2.0).is_none());
    }

    #[test]
    fn bisect_brackets() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}

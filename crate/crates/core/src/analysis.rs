//! Sensitivity of travelling waves to axial dispersion.
//!
//! For each Pe on a grid the full wave is compared with the leading-order
//! wave through the L² distance of the normalized profiles on [−η*, η*] and
//! through the time the outlet concentration needs to climb from a low to a
//! high threshold.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DimensionlessParameters;
use crate::wave::{solve_full_wave, solve_leading_order, WaveProfile, WaveSettings};

/// Number of uniform intervals of the common quadrature grid.
pub const L2_INTERVALS: usize = 2000;

/// Ordered, non-negative Pe values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pe_values: Vec<f64>,
}

impl SweepGrid {
    pub fn new(pe_values: Vec<f64>) -> Result<Self> {
        if pe_values.is_empty() {
            return Err(Error::InvalidArgument("empty Pe grid".into()));
        }
        if let Some(v) = pe_values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Domain(format!("Pe values must be finite and non-negative, got {v}")));
        }
        if !pe_values.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("Pe values must be strictly increasing".into()));
        }
        Ok(Self { pe_values })
    }

    /// Pe = 0, ten equispaced values in (0, 0.5] and five in (0.5, 1.5].
    pub fn standard() -> Self {
        let mut pe_values = vec![0.0];
        pe_values.extend((1..=10).map(|k| 0.05 * k as f64));
        pe_values.extend((1..=5).map(|k| 0.5 + 0.2 * k as f64));
        Self { pe_values }
    }

    pub fn values(&self) -> &[f64] {
        &self.pe_values
    }
}

/// Result for one Pe. Quantities are NaN when `failure` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub pe: f64,
    pub l2_error: f64,
    pub t_window: f64,
    pub e_bt: f64,
    pub failure: Option<String>,
}

impl SweepRecord {
    fn failed(pe: f64, err: &Error) -> Self {
        Self {
            pe,
            l2_error: f64::NAN,
            t_window: f64::NAN,
            e_bt: f64::NAN,
            failure: Some(format!("{}: {err}", err.kind())),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

fn require_normalized_cover(p: &WaveProfile, eta_star: f64, which: &str) -> Result<()> {
    if !p.normalized {
        return Err(Error::InvalidArgument(format!("{which} profile is not normalized")));
    }
    let (lo, hi) = p.window();
    if lo > -eta_star || hi < eta_star {
        return Err(Error::Coverage(format!(
            "{which} profile covers [{lo}, {hi}], needs [-{eta_star}, {eta_star}]"
        )));
    }
    Ok(())
}

/// L² distance between two normalized profiles on [−η*, η*], trapezoidal
/// rule on `intervals` uniform intervals.
pub fn l2_profile_error_with(
    full: &WaveProfile,
    leading: &WaveProfile,
    eta_star: f64,
    intervals: usize,
) -> Result<f64> {
    if !(eta_star > 0.0) || intervals == 0 {
        return Err(Error::InvalidArgument("eta_star and interval count must be positive".into()));
    }
    require_normalized_cover(full, eta_star, "full")?;
    require_normalized_cover(leading, eta_star, "leading-order")?;
    let (a, b) = (full.interpolant(), leading.interpolant());
    let h = 2.0 * eta_star / intervals as f64;
    let sq = |i: usize| {
        let eta = -eta_star + h * i as f64;
        let d = a.eval(eta) - b.eval(eta);
        d * d
    };
    let interior: f64 = (1..intervals).map(sq).sum();
    let integral = h * (interior + 0.5 * (sq(0) + sq(intervals)));
    Ok(integral.sqrt())
}

pub fn l2_profile_error(full: &WaveProfile, leading: &WaveProfile, eta_star: f64) -> Result<f64> {
    l2_profile_error_with(full, leading, eta_star, L2_INTERVALS)
}

/// Time for the outlet concentration to rise from `lo` to `hi` as the wave passes.
pub fn breakthrough_window_time(profile: &WaveProfile, hi: f64, lo: f64) -> Result<f64> {
    if !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(Error::Domain(format!("need 0 < lo <= hi < 1, got lo={lo}, hi={hi}")));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let interp = profile.interpolant();
    let locate = |level: f64| {
        interp.locate(level).ok_or_else(|| {
            Error::Coverage(format!(
                "profile does not bracket F = {level} (range {} .. {})",
                profile.f[profile.len() - 1],
                profile.f[0]
            ))
        })
    };
    let (eta_lo, eta_hi) = (locate(lo)?, locate(hi)?);
    Ok((eta_lo - eta_hi) / profile.velocity)
}

/// Signed relative deviation (t_pe − t_0)/t_0.
pub fn breakthrough_error(t_pe: f64, t_0: f64) -> Result<f64> {
    if !(t_0 > 0.0) {
        return Err(Error::Domain(format!("reference time must be positive, got {t_0}")));
    }
    Ok((t_pe - t_0) / t_0)
}

/// Settings of a sweep beyond the wave solver itself.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub wave: WaveSettings,
    pub eta_star: f64,
    pub threshold_lo: f64,
    pub threshold_hi: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { wave: WaveSettings::default(), eta_star: 20.0, threshold_lo: 1e-4, threshold_hi: 1e-2 }
    }
}

/// Runs the sensitivity sweep. The leading-order profile is computed once;
/// positive Pe values are solved in parallel and a failing point is recorded
/// with its error instead of aborting the sweep. Records follow grid order.
pub fn run_sweep(
    params: &DimensionlessParameters,
    grid: &SweepGrid,
    settings: &SweepSettings,
) -> Result<Vec<SweepRecord>> {
    let leading = solve_leading_order(&params.with_pe(0.0)?, &settings.wave)?;
    let t0 = breakthrough_window_time(&leading, settings.threshold_hi, settings.threshold_lo)?;

    let point = |pe: f64| -> Result<SweepRecord> {
        if pe == 0.0 {
            return Ok(SweepRecord { pe, l2_error: 0.0, t_window: t0, e_bt: 0.0, failure: None });
        }
        let full = solve_full_wave(&params.with_pe(pe)?, &settings.wave)?;
        let l2_error = l2_profile_error(&full, &leading, settings.eta_star)?;
        let t_window = breakthrough_window_time(&full, settings.threshold_hi, settings.threshold_lo)?;
        let e_bt = breakthrough_error(t_window, t0)?;
        Ok(SweepRecord { pe, l2_error, t_window, e_bt, failure: None })
    };

    Ok(grid
        .values()
        .par_iter()
        .map(|&pe| point(pe).unwrap_or_else(|e| SweepRecord::failed(pe, &e)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ReactionOrders;
    use crate::wave::closed_form_wave_11;

    fn params11(pe: f64) -> DimensionlessParameters {
        DimensionlessParameters::from_qe(0.1, pe, 0.7, ReactionOrders::new(1, 1).unwrap()).unwrap()
    }

    fn logistic_profile() -> WaveProfile {
        let p = params11(0.0);
        let eta: Vec<f64> = (0..=1200).map(|i| -30.0 + 0.05 * i as f64).collect();
        let f: Vec<f64> = eta.iter().map(|&e| closed_form_wave_11(&p, e).unwrap()).collect();
        let g = f.iter().map(|v| 0.7 * v).collect();
        WaveProfile::from_columns(eta, f, g, &p, true).unwrap()
    }

    #[test]
    fn standard_grid_has_sixteen_points() {
        let g = SweepGrid::standard();
        assert_eq!(g.values().len(), 16);
        assert_eq!(g.values()[0], 0.0);
        assert!((g.values()[10] - 0.5).abs() < 1e-15);
        assert!((g.values()[15] - 1.5).abs() < 1e-12);
        assert!(SweepGrid::new(g.values().to_vec()).is_ok());
        assert!(SweepGrid::new(vec![0.1, 0.1]).is_err());
        assert!(SweepGrid::new(vec![-0.1]).is_err());
    }

    #[test]
    fn identical_profiles_have_zero_error() {
        let p = logistic_profile();
        assert_eq!(l2_profile_error(&p, &p, 20.0).unwrap(), 0.0);
    }

    #[test]
    fn constant_offset_error() {
        let p = logistic_profile();
        let mut q = p.clone();
        for v in q.f.iter_mut() {
            *v += 1e-3;
        }
        let e = l2_profile_error(&q, &p, 20.0).unwrap();
        assert!((e - 1e-3 * 40f64.sqrt()).abs() < 1e-12, "{e}");
    }

    #[test]
    fn coverage_is_checked() {
        let p = logistic_profile();
        assert!(matches!(l2_profile_error(&p, &p, 40.0), Err(Error::Coverage(_))));
    }

    #[test]
    fn window_time_matches_logistic() {
        let p = logistic_profile();
        let exact = (9999f64.ln() - 99f64.ln()) / 0.56 / 1.25;
        let t = breakthrough_window_time(&p, 1e-2, 1e-4).unwrap();
        assert!(((t - exact) / exact).abs() < 1e-6, "{t} vs {exact}");
        assert_eq!(breakthrough_window_time(&p, 1e-3, 1e-3).unwrap(), 0.0);
        assert!(matches!(breakthrough_window_time(&p, 1e-2, 1e-20), Err(Error::Coverage(_))));
    }

    #[test]
    fn relative_error_definition() {
        assert_eq!(breakthrough_error(2.0, 2.0).unwrap(), 0.0);
        assert!((breakthrough_error(1.05 * 3.0, 3.0).unwrap() - 0.05).abs() < 1e-15);
        assert!(breakthrough_error(1.0, 1.1).unwrap() < 0.0);
        assert!(breakthrough_error(1.0, 0.0).is_err());
    }

    #[test]
    fn zero_only_grid() {
        let r = run_sweep(&params11(0.0), &SweepGrid::new(vec![0.0]).unwrap(), &SweepSettings::default())
            .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!((r[0].l2_error, r[0].e_bt), (0.0, 0.0));
    }
}

use adsorb_core::analysis::{
    breakthrough_window_time, l2_profile_error, l2_profile_error_with, run_sweep, SweepGrid, SweepSettings,
};
use adsorb_core::wave::{solve_full_wave, solve_leading_order};
use adsorb_core::{DimensionlessParameters, ReactionOrders, WaveSettings};

fn params(m: u32, n: u32, da: f64) -> DimensionlessParameters {
    DimensionlessParameters::from_qe(da, 0.0, 0.7, ReactionOrders::new(m, n).unwrap()).unwrap()
}

#[test]
fn standard_sweep_grows_with_dispersion() {
    let records = run_sweep(&params(1, 1, 0.1), &SweepGrid::standard(), &SweepSettings::default()).unwrap();
    assert_eq!(records.len(), 16);
    assert!(records.iter().all(|r| r.is_ok()), "{records:?}");
    assert_eq!(records[0].l2_error, 0.0);
    assert_eq!(records[0].e_bt, 0.0);
    for w in records.windows(2) {
        assert!(w[1].l2_error > w[0].l2_error, "e not increasing at Pe = {}", w[1].pe);
        assert!(w[1].t_window > w[0].t_window);
    }
    for r in &records[1..] {
        assert!(r.e_bt > 0.0, "e_BT({}) = {}", r.pe, r.e_bt);
    }
    // Nearly linear: the secant slope changes by well under a factor of two.
    let slope = |r: &adsorb_core::analysis::SweepRecord| r.l2_error / r.pe;
    let (first, last) = (slope(&records[1]), slope(&records[15]));
    assert!(last / first > 0.5 && last / first < 2.0, "slopes {first} .. {last}");
}

#[test]
fn coarse_grid_ordering_for_all_families() {
    let grid = SweepGrid::new(vec![0.0, 0.01, 0.1, 0.5, 1.0, 1.5]).unwrap();
    for &(m, n) in &[(1, 1), (1, 2), (2, 2), (1, 3), (2, 3), (3, 4)] {
        let r = run_sweep(&params(m, n, 0.1), &grid, &SweepSettings::default()).unwrap();
        assert!(r.iter().all(|x| x.is_ok()), "({m},{n}): {r:?}");
        for w in r.windows(2) {
            assert!(w[1].l2_error > w[0].l2_error, "({m},{n}) at Pe = {}", w[1].pe);
        }
        assert!(r[1].l2_error < 0.02, "({m},{n}): e(0.01) = {}", r[1].l2_error);
        assert!(r[1..].iter().all(|x| x.l2_error > 0.0 && x.e_bt > 0.0));
    }
}

#[test]
fn quadrature_is_resolved() {
    let settings = WaveSettings::default();
    let p = params(2, 3, 0.1);
    let leading = solve_leading_order(&p, &settings).unwrap();
    for &pe in &[0.01, 0.5, 1.5] {
        let full = solve_full_wave(&p.with_pe(pe).unwrap(), &settings).unwrap();
        let e1 = l2_profile_error(&full, &leading, 20.0).unwrap();
        let e2 = l2_profile_error_with(&full, &leading, 20.0, 4000).unwrap();
        assert!((e1 - e2).abs() < 1e-6, "Pe = {pe}: {e1} vs {e2}");
    }
}

#[test]
fn leading_order_window_matches_logistic() {
    let prof = solve_leading_order(&params(1, 1, 0.1), &WaveSettings::default()).unwrap();
    let exact = (9999f64.ln() - 99f64.ln()) / 0.56 / 1.25;
    let t = breakthrough_window_time(&prof, 1e-2, 1e-4).unwrap();
    assert!(((t - exact) / exact).abs() < 1e-6, "{t} vs {exact}");
}

#[test]
fn failed_points_are_marked_not_fatal() {
    let settings = SweepSettings {
        wave: WaveSettings { seed_delta: 0.75, ..WaveSettings::default() },
        ..SweepSettings::default()
    };
    // Only full-wave solves use the seed, so the Pe = 0 point still succeeds.
    match run_sweep(&params(1, 1, 0.1), &SweepGrid::new(vec![0.0, 0.1]).unwrap(), &settings) {
        Ok(r) => {
            assert_eq!(r.len(), 2);
            assert!(r[0].is_ok());
            assert!(r[1].failure.as_deref().unwrap().starts_with("invalid-argument"), "{:?}", r[1]);
            assert!(r[1].l2_error.is_nan());
        }
        Err(e) => panic!("sweep aborted: {e}"),
    }
}

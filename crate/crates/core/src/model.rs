//! Column parameters, Sips kinetics and the equilibrium structure of the
//! leading-order wave equation.
//!
//! Dimensional quantities live in [`PhysicalParameters`]; everything the
//! solvers consume is expressed through [`DimensionlessParameters`], whose
//! adsorption weight `alpha` and equilibrium fraction `q_e` are tied by the
//! nondimensional isotherm
//!
//! ```text
//! alpha / (1 - alpha) = (q_e / (1 - q_e))^n
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::bisect;

/// Relative tolerance for the alpha/q_e isotherm link.
pub const ISOTHERM_CONSISTENCY_TOL: f64 = 1e-12;

/// Offset from the endpoints of (0, 1) used to bracket interior equilibria.
const ROOT_BRACKET_OFFSET: f64 = 1e-10;

/// Global reaction orders (m for the contaminant, n for the adsorbent).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReactionOrders {
    pub m: u32,
    pub n: u32,
}

impl ReactionOrders {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain(format!(
                "reaction orders must be positive integers, got m={m}, n={n}"
            )));
        }
        Ok(Self { m, n })
    }

    /// Physisorption orders, m = n = 1.
    pub fn physisorption() -> Self {
        Self { m: 1, n: 1 }
    }

    #[inline]
    pub(crate) fn mi(&self) -> i32 {
        self.m as i32
    }

    #[inline]
    pub(crate) fn ni(&self) -> i32 {
        self.n as i32
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {value}")))
    }
}

fn require_open_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {value}")))
    }
}

/// Dimensional column and kinetics parameters (SI units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParameters {
    /// Void fraction of the bed.
    pub epsilon: f64,
    /// Inlet velocity, m/s.
    pub u_in: f64,
    /// Effective adsorption rate.
    pub k_ad: f64,
    /// Effective desorption rate.
    pub k_de: f64,
    /// Inlet concentration, kg/m³.
    pub c_in: f64,
    /// Maximum adsorbed fraction.
    pub q_max: f64,
    /// Bed density, kg/m³.
    pub rho_b: f64,
    /// Column length, m.
    pub column_length: f64,
    /// Axial dispersion, m²/s. `None` leaves Pe at zero; callers then set it
    /// explicitly with [`DimensionlessParameters::with_pe`].
    pub diffusion: Option<f64>,
    pub orders: ReactionOrders,
}

impl PhysicalParameters {
    pub fn validate(&self) -> Result<()> {
        require_open_unit("epsilon", self.epsilon)?;
        require_open_unit("q_max", self.q_max)?;
        require_positive("u_in", self.u_in)?;
        require_positive("k_ad", self.k_ad)?;
        require_positive("k_de", self.k_de)?;
        require_positive("c_in", self.c_in)?;
        require_positive("rho_b", self.rho_b)?;
        require_positive("column_length", self.column_length)?;
        if let Some(d) = self.diffusion {
            require_positive("diffusion", d)?;
        }
        ReactionOrders::new(self.orders.m, self.orders.n)?;
        Ok(())
    }

    /// Column and kinetics values of the reference activated-carbon experiment
    /// (physisorption orders, no dispersion set).
    pub fn reference() -> Self {
        Self {
            epsilon: 0.3357,
            u_in: 0.13,
            k_ad: 1.13,
            k_de: 2.173e-4,
            c_in: 2.835,
            q_max: 0.358,
            rho_b: 377.25,
            column_length: 5.4e-3,
            diffusion: None,
            orders: ReactionOrders::physisorption(),
        }
    }

    /// Langmuir–Sips constant k_L = k_ad / k_de.
    pub fn k_l(&self) -> f64 {
        self.k_ad / self.k_de
    }
}

/// Raw mass-action rate constants before conversion to adsorbed-fraction form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawKinetics {
    pub kappa_ad: f64,
    /// May be zero for a purely adsorbing reaction.
    pub kappa_de: f64,
    pub c_sat: f64,
}

impl RawKinetics {
    pub fn new(kappa_ad: f64, kappa_de: f64, c_sat: f64) -> Result<Self> {
        require_positive("kappa_ad", kappa_ad)?;
        require_positive("c_sat", c_sat)?;
        if !(kappa_de.is_finite() && kappa_de >= 0.0) {
            return Err(Error::Domain(format!("kappa_de must be non-negative, got {kappa_de}")));
        }
        Ok(Self { kappa_ad, kappa_de, c_sat })
    }
}

/// Nondimensional model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessParameters {
    da: f64,
    pe: f64,
    alpha: f64,
    q_e: f64,
    orders: ReactionOrders,
    ell: Option<f64>,
    length_scale: Option<f64>,
    time_scale: Option<f64>,
}

impl DimensionlessParameters {
    /// Builds parameters from the equilibrium fraction; alpha follows from the isotherm.
    pub fn from_qe(da: f64, pe: f64, q_e: f64, orders: ReactionOrders) -> Result<Self> {
        let alpha = alpha_from_qe(q_e, orders.n)?;
        Self::checked(da, pe, alpha, q_e, orders)
    }

    /// Builds parameters from the adsorption weight; q_e follows from the isotherm.
    pub fn from_alpha(da: f64, pe: f64, alpha: f64, orders: ReactionOrders) -> Result<Self> {
        let q_e = qe_from_alpha(alpha, orders.n)?;
        Self::checked(da, pe, alpha, q_e, orders)
    }

    /// Builds parameters from both alpha and q_e, which must satisfy the
    /// isotherm to `tol` relative. q_e is kept and alpha re-derived from it, so
    /// the stored pair is consistent to [`ISOTHERM_CONSISTENCY_TOL`].
    pub fn from_parts(
        da: f64,
        pe: f64,
        alpha: f64,
        q_e: f64,
        orders: ReactionOrders,
        tol: f64,
    ) -> Result<Self> {
        require_open_unit("alpha", alpha)?;
        require_open_unit("q_e", q_e)?;
        let mismatch = isotherm_mismatch(alpha, q_e, orders.n);
        if mismatch > tol {
            return Err(Error::Inconsistent { alpha, q_e, n: orders.n, mismatch });
        }
        Self::from_qe(da, pe, q_e, orders)
    }

    fn checked(da: f64, pe: f64, alpha: f64, q_e: f64, orders: ReactionOrders) -> Result<Self> {
        require_positive("da", da)?;
        if !(pe.is_finite() && pe >= 0.0) {
            return Err(Error::Domain(format!("pe must be non-negative, got {pe}")));
        }
        require_open_unit("alpha", alpha)?;
        require_open_unit("q_e", q_e)?;
        ReactionOrders::new(orders.m, orders.n)?;
        let mismatch = isotherm_mismatch(alpha, q_e, orders.n);
        if mismatch > ISOTHERM_CONSISTENCY_TOL {
            return Err(Error::Inconsistent { alpha, q_e, n: orders.n, mismatch });
        }
        Ok(Self { da, pe, alpha, q_e, orders, ell: None, length_scale: None, time_scale: None })
    }

    pub fn with_pe(mut self, pe: f64) -> Result<Self> {
        if !(pe.is_finite() && pe >= 0.0) {
            return Err(Error::Domain(format!("pe must be non-negative, got {pe}")));
        }
        self.pe = pe;
        Ok(self)
    }

    pub fn with_ell(mut self, ell: f64) -> Result<Self> {
        require_positive("ell", ell)?;
        self.ell = Some(ell);
        Ok(self)
    }

    pub fn da(&self) -> f64 {
        self.da
    }
    pub fn pe(&self) -> f64 {
        self.pe
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn q_e(&self) -> f64 {
        self.q_e
    }
    pub fn orders(&self) -> ReactionOrders {
        self.orders
    }
    /// Nondimensional column length, known when built from physical data or set explicitly.
    pub fn ell(&self) -> Option<f64> {
        self.ell
    }
    pub fn length_scale(&self) -> Option<f64> {
        self.length_scale
    }
    pub fn time_scale(&self) -> Option<f64> {
        self.time_scale
    }

    /// Wave speed 1/(q_e + Da).
    pub fn velocity(&self) -> f64 {
        1.0 / (self.q_e + self.da)
    }

    /// a = 1/q_e.
    pub fn a(&self) -> f64 {
        1.0 / self.q_e
    }
}

/// Relative distance between α and the value the isotherm assigns to q_e.
///
/// Measured on α rather than on the odds α/(1−α): close to α = 1 the odds
/// amplify the rounding of α itself far beyond any useful tolerance.
pub fn isotherm_mismatch(alpha: f64, q_e: f64, n: u32) -> f64 {
    let s = (q_e / (1.0 - q_e)).powi(n as i32);
    let implied = s / (1.0 + s);
    ((alpha - implied) / alpha).abs()
}

/// Sips isotherm: q_e = q_max s / (1 + s) with s = (k_L c_in^m)^(1/n).
pub fn sips_isotherm(c_in: f64, k_l: f64, q_max: f64, orders: ReactionOrders) -> Result<f64> {
    require_positive("c_in", c_in)?;
    require_positive("k_L", k_l)?;
    require_positive("q_max", q_max)?;
    ReactionOrders::new(orders.m, orders.n)?;
    let s = (k_l * c_in.powi(orders.mi())).powf(1.0 / orders.n as f64);
    if s.is_infinite() {
        return Ok(q_max);
    }
    Ok(q_max * s / (1.0 + s))
}

/// Equilibrium adsorbed fraction from the column weight before and after saturation.
pub fn equilibrium_fraction_from_masses(m_final: f64, m_initial: f64) -> Result<f64> {
    if !(m_initial > 0.0) {
        return Err(Error::Domain(format!("initial mass must be positive, got {m_initial}")));
    }
    if m_final < m_initial {
        return Err(Error::Domain(format!("final mass {m_final} is below the initial mass {m_initial}")));
    }
    Ok((m_final - m_initial) / m_initial)
}

/// Converts raw mass-action constants to the effective rates of the
/// adsorbed-fraction kinetics. Returns `(k_ad, k_de)`.
pub fn convert_raw_rates(
    raw: &RawKinetics,
    rho_b: f64,
    epsilon: f64,
    orders: ReactionOrders,
) -> Result<(f64, f64)> {
    require_positive("rho_b", rho_b)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let scale = (rho_b / (1.0 - epsilon)).powi(orders.ni() - 1);
    let k_ad = raw.kappa_ad * scale;
    let k_de = raw.c_sat.powi(orders.mi()) * raw.kappa_de * scale;
    Ok((k_ad, k_de))
}

/// Scales the dimensional problem onto the reaction time scale and the
/// corresponding front length scale.
pub fn nondimensionalize(p: &PhysicalParameters) -> Result<DimensionlessParameters> {
    p.validate()?;
    let n = p.orders.ni();
    let ads = p.k_ad * p.c_in.powi(p.orders.mi());
    let time_scale = p.q_max.powi(1 - n) / (ads + p.k_de);
    let length_scale = p.epsilon * time_scale * p.u_in * p.c_in / (p.rho_b * p.q_max);
    let da = length_scale / (time_scale * p.u_in);
    let pe = p.diffusion.map_or(0.0, |d| d / (p.u_in * length_scale));
    let alpha = ads / (ads + p.k_de);
    let mut out = DimensionlessParameters::from_alpha(da, pe, alpha, p.orders)?;
    out.ell = Some(p.column_length / length_scale);
    out.length_scale = Some(length_scale);
    out.time_scale = Some(time_scale);
    Ok(out)
}

/// Equilibrium fraction from the adsorption weight via the nondimensional isotherm.
pub fn qe_from_alpha(alpha: f64, n: u32) -> Result<f64> {
    require_open_unit("alpha", alpha)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let r = (alpha / (1.0 - alpha)).powf(1.0 / n as f64);
    Ok(r / (1.0 + r))
}

/// Inverse of [`qe_from_alpha`].
pub fn alpha_from_qe(q_e: f64, n: u32) -> Result<f64> {
    require_open_unit("q_e", q_e)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let s = (q_e / (1.0 - q_e)).powi(n as i32);
    Ok(s / (1.0 + s))
}

/// Equilibrium polynomial p(x) whose zeros are the rest states of the
/// leading-order wave equation, in the form α((a−1)^n x^n − x^m (a−x)^n).
///
/// Uses 1 − α = α(a − 1)^n, so p(0) and p(1) vanish exactly.
pub fn equilibrium_polynomial(x: f64, params: &DimensionlessParameters) -> f64 {
    let (m, n) = (params.orders.mi(), params.orders.ni());
    let a = params.a();
    params.alpha * ((a - 1.0).powi(n) * x.powi(n) - x.powi(m) * (a - x).powi(n))
}

/// p(x) = (1 − α) x^n − α x^m (a − x)^n, evaluated without the isotherm substitution.
pub fn equilibrium_polynomial_expanded(x: f64, params: &DimensionlessParameters) -> f64 {
    let (m, n) = (params.orders.mi(), params.orders.ni());
    let a = params.a();
    (1.0 - params.alpha) * x.powi(n) - params.alpha * x.powi(m) * (a - x).powi(n)
}

/// Reduced factor q(x) = x^(n−m) − ((a − x)/(a − 1))^n with p = α(a−1)^n x^m q.
pub fn reduced_polynomial(x: f64, params: &DimensionlessParameters) -> f64 {
    let (m, n) = (params.orders.mi(), params.orders.ni());
    let a = params.a();
    x.powi(n - m) - ((a - x) / (a - 1.0)).powi(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumReason {
    /// m ≤ n: every solution in (0,1) decreases from 1 to 0.
    #[serde(rename = "m<=n")]
    OrdersAdmissible,
    /// m > n and a < m/(m−n): a rest state c* in (0,1) blocks the connection to 0.
    InteriorEquilibrium,
    /// m > n and a ≥ m/(m−n): solutions in (0,1) increase.
    IncreasingSolutions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRoot {
    pub x: f64,
    pub multiple: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub orders: ReactionOrders,
    pub admissible: bool,
    pub roots_in_unit_interval: Vec<EquilibriumRoot>,
    pub interior_equilibrium: Option<f64>,
    pub reason: EquilibriumReason,
}

/// Classifies the rest states of the leading-order equation on [0, 1].
pub fn analyze_equilibria(params: &DimensionlessParameters) -> EquilibriumReport {
    let ReactionOrders { m, n } = params.orders;
    let a = params.a();
    let admissible = m <= n;

    // p'(1) = α(a−1)^(n−1) [(n−m)(a−1) + n]; it vanishes when a = m/(m−n).
    let slope_at_one = (n as f64 - m as f64) * (a - 1.0) + n as f64;
    let one_is_multiple = slope_at_one.abs() <= 1e-12 * n as f64;

    let mut roots = vec![EquilibriumRoot { x: 0.0, multiple: m.min(n) > 1 }];
    let mut interior = None;
    let reason = if admissible {
        EquilibriumReason::OrdersAdmissible
    } else if a < m as f64 / (m - n) as f64 && !one_is_multiple {
        let root =
            bisect(|x| reduced_polynomial(x, params), ROOT_BRACKET_OFFSET, 1.0 - ROOT_BRACKET_OFFSET, 1e-13);
        interior = root;
        if let Some(c) = root {
            roots.push(EquilibriumRoot { x: c, multiple: false });
        }
        EquilibriumReason::InteriorEquilibrium
    } else {
        EquilibriumReason::IncreasingSolutions
    };
    roots.push(EquilibriumRoot { x: 1.0, multiple: one_is_multiple });

    EquilibriumReport {
        orders: params.orders,
        admissible,
        roots_in_unit_interval: roots,
        interior_equilibrium: interior,
        reason,
    }
}

/// Fails with [`Error::Existence`] unless a decreasing wave to the clean state exists.
pub fn require_admissible(params: &DimensionlessParameters) -> Result<()> {
    let report = analyze_equilibria(params);
    if report.admissible {
        Ok(())
    } else {
        Err(Error::Existence(Box::new(report)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn orders(m: u32, n: u32) -> ReactionOrders {
        ReactionOrders::new(m, n).unwrap()
    }

    fn reference_with_pe(pe: f64) -> PhysicalParameters {
        let mut p = PhysicalParameters::reference();
        let base = nondimensionalize(&p).unwrap();
        p.diffusion = Some(pe * p.u_in * base.length_scale().unwrap());
        p
    }

    #[test]
    fn zero_orders_rejected() {
        assert!(ReactionOrders::new(0, 1).is_err());
        assert!(ReactionOrders::new(1, 0).is_err());
    }

    #[test]
    fn sips_symmetry_point_and_saturation() {
        for &(m, n) in &[(1, 1), (1, 2), (2, 3), (3, 1)] {
            let o = orders(m, n);
            // k_L c^m = 1
            let c: f64 = 2.0;
            let k_l = 1.0 / c.powi(m as i32);
            assert_relative_eq!(sips_isotherm(c, k_l, 0.4, o).unwrap(), 0.2, epsilon = 1e-15);
            let big = sips_isotherm(1e300, 1.0, 0.4, o).unwrap();
            assert_relative_eq!(big, 0.4, max_relative = 1e-12);
        }
    }

    #[test]
    fn sips_reference_value() {
        let q = sips_isotherm(2.835, 1.13 / 2.173e-4, 0.358, orders(1, 1)).unwrap();
        // s = 14742.1…, q = 0.358 s/(1+s)
        assert!((q - 0.3579757).abs() < 1e-7, "{q}");
        assert!(q < 0.358);
    }

    #[test]
    fn sips_rejects_nonpositive_inputs() {
        let o = orders(1, 1);
        assert!(sips_isotherm(0.0, 1.0, 0.3, o).is_err());
        assert!(sips_isotherm(1.0, -1.0, 0.3, o).is_err());
        assert!(sips_isotherm(1.0, 1.0, 0.0, o).is_err());
    }

    #[test]
    fn masses() {
        assert_eq!(equilibrium_fraction_from_masses(10.0, 10.0).unwrap(), 0.0);
        assert_relative_eq!(equilibrium_fraction_from_masses(10.5, 10.0).unwrap(), 0.05, epsilon = 1e-15);
        assert_relative_eq!(equilibrium_fraction_from_masses(13.58, 10.0).unwrap(), 0.358, epsilon = 1e-14);
        assert!(equilibrium_fraction_from_masses(10.0, 0.0).is_err());
        assert!(equilibrium_fraction_from_masses(9.0, 10.0).is_err());
    }

    #[test]
    fn raw_rate_conversion() {
        let raw = RawKinetics::new(2.0, 1.0, 3.0).unwrap();
        let (k_ad, k_de) = convert_raw_rates(&raw, 100.0, 0.5, orders(1, 2)).unwrap();
        assert_relative_eq!(k_ad, 400.0, epsilon = 1e-12);
        assert_relative_eq!(k_de, 600.0, epsilon = 1e-12);

        let raw = RawKinetics::new(1.7, 0.3, 2.0).unwrap();
        let (k_ad, k_de) = convert_raw_rates(&raw, 377.0, 0.33, orders(2, 1)).unwrap();
        assert_eq!(k_ad, 1.7);
        assert_relative_eq!(k_de, 4.0 * 0.3, epsilon = 1e-15);

        let raw = RawKinetics::new(1.0, 0.0, 2.0).unwrap();
        let (_, k_de) = convert_raw_rates(&raw, 10.0, 0.5, orders(1, 3)).unwrap();
        assert_eq!(k_de, 0.0);

        assert!(convert_raw_rates(&raw, 10.0, 1.0, orders(1, 1)).is_err());
    }

    #[test]
    fn nondimensionalize_reference_values() {
        let d = nondimensionalize(&reference_with_pe(0.1)).unwrap();
        // independent evaluation of the scale definitions: τ = 0.312133 s, L = 2.85940e-4 m
        assert!((d.time_scale().unwrap() - 0.312133).abs() < 1e-6);
        assert!((d.length_scale().unwrap() - 2.85940e-4).abs() < 1e-9);
        assert!((d.da() - 7.047e-3).abs() < 5e-6);
        assert!((d.alpha() - 0.999932).abs() < 1e-6);
        assert!((d.ell().unwrap() - 18.88).abs() < 0.01);
        assert_relative_eq!(d.pe(), 0.1, max_relative = 1e-12);
        // n = 1 makes the isotherm the identity
        assert_relative_eq!(d.q_e(), d.alpha(), max_relative = 1e-12);

        let p = PhysicalParameters::reference();
        let da_direct = p.epsilon * p.c_in / (p.rho_b * p.q_max);
        assert_relative_eq!(d.da(), da_direct, max_relative = 1e-12);
    }

    #[test]
    fn nondimensionalize_vanishing_desorption() {
        let mut p = PhysicalParameters::reference();
        p.k_de = 1e-14;
        let d = nondimensionalize(&p).unwrap();
        assert!(1.0 - d.alpha() < 1e-13);
    }

    #[test]
    fn qe_alpha_examples() {
        for &a in &[0.1, 0.37, 0.9] {
            assert_relative_eq!(qe_from_alpha(a, 1).unwrap(), a, max_relative = 1e-14);
        }
        for n in 1..=4 {
            assert_relative_eq!(qe_from_alpha(0.5, n).unwrap(), 0.5, epsilon = 1e-15);
        }
        let q = qe_from_alpha(0.999932, 2).unwrap();
        assert!((q - 0.991821).abs() < 1e-6, "{q}");
        assert_relative_eq!(alpha_from_qe(q, 2).unwrap(), 0.999932, max_relative = 1e-12);
        assert!(qe_from_alpha(0.0, 1).is_err());
        assert!(qe_from_alpha(1.0, 1).is_err());
    }

    #[test]
    fn qe_alpha_round_trip_grid() {
        for n in 1..=4 {
            for k in 1..=99 {
                let a = k as f64 / 100.0;
                let back = alpha_from_qe(qe_from_alpha(a, n).unwrap(), n).unwrap();
                assert!(((back - a) / a).abs() < 1e-12, "n={n} alpha={a} back={back}");
            }
        }
    }

    #[test]
    fn inconsistent_parts_rejected() {
        let o = orders(1, 2);
        assert!(DimensionlessParameters::from_parts(0.1, 0.0, 0.7, 0.7, o, 1e-8).is_err());
        let ok = DimensionlessParameters::from_parts(0.1, 0.0, 0.7, 0.7, orders(1, 1), 1e-8);
        assert!(ok.is_ok());
    }

    #[test]
    fn polynomial_forms_agree() {
        let p = DimensionlessParameters::from_qe(0.1, 0.0, 0.7, orders(1, 1)).unwrap();
        assert_relative_eq!(equilibrium_polynomial(0.5, &p), -0.175, epsilon = 1e-14);
        assert_relative_eq!(equilibrium_polynomial_expanded(0.5, &p), -0.175, epsilon = 1e-14);
        for &(m, n) in &[(1, 2), (2, 2), (3, 4), (2, 1), (4, 1)] {
            let p = DimensionlessParameters::from_qe(0.3, 0.0, 0.63, orders(m, n)).unwrap();
            for k in 0..=20 {
                let x = k as f64 / 20.0;
                let f1 = equilibrium_polynomial(x, &p);
                let f2 = equilibrium_polynomial_expanded(x, &p);
                assert!((f1 - f2).abs() < 1e-13, "m={m} n={n} x={x}: {f1} vs {f2}");
                if x > 0.0 {
                    let a = p.a();
                    let f3 =
                        p.alpha() * (a - 1.0).powi(n as i32) * x.powi(m as i32) * reduced_polynomial(x, &p);
                    assert!((f1 - f3).abs() < 1e-12);
                }
            }
            assert_eq!(equilibrium_polynomial(0.0, &p), 0.0);
            assert_eq!(equilibrium_polynomial(1.0, &p), 0.0);
        }
    }

    #[test]
    fn interior_root_m2_n1() {
        let p = DimensionlessParameters::from_qe(0.1, 0.0, 0.7, orders(2, 1)).unwrap();
        let r = p.a() - 1.0;
        assert!(equilibrium_polynomial(r, &p).abs() < 1e-14);
        let report = analyze_equilibria(&p);
        assert!(!report.admissible);
        assert_eq!(report.reason, EquilibriumReason::InteriorEquilibrium);
        let c = report.interior_equilibrium.unwrap();
        assert!((c - 3.0 / 7.0).abs() < 1e-12, "{c}");
        assert_eq!(report.roots_in_unit_interval.len(), 3);
    }

    #[test]
    fn increasing_solutions_m2_n1() {
        let p = DimensionlessParameters::from_qe(0.1, 0.0, 0.4, orders(2, 1)).unwrap();
        let report = analyze_equilibria(&p);
        assert!(!report.admissible);
        assert_eq!(report.reason, EquilibriumReason::IncreasingSolutions);
        assert!(report.interior_equilibrium.is_none());
        let xs: Vec<f64> = report.roots_in_unit_interval.iter().map(|r| r.x).collect();
        assert_eq!(xs, vec![0.0, 1.0]);
    }

    #[test]
    fn physisorption_is_admissible() {
        let p = DimensionlessParameters::from_qe(0.1, 0.0, 0.7, orders(1, 1)).unwrap();
        let report = analyze_equilibria(&p);
        assert!(report.admissible);
        assert_eq!(report.reason, EquilibriumReason::OrdersAdmissible);
        assert!(report.interior_equilibrium.is_none());
        assert!(require_admissible(&p).is_ok());
        let bad = DimensionlessParameters::from_qe(0.1, 0.0, 0.7, orders(2, 1)).unwrap();
        assert!(matches!(require_admissible(&bad), Err(Error::Existence(_))));
    }
}

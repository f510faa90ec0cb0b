//! Agmon-type actions and weights: `S`, `S(α)`, `S_η`, `S_±(γ)`, `Φ_ε`.
//!
//! Everything here reduces to integrals of `√V` (or a cutoff variant) along
//! the line. The integrands have square-root kinks exactly at the potential
//! wells, so the adaptive quadrature is always split there.

use crate::potential::{PotentialSpec, SealedPotential};
use crate::quad;
use crate::{Complex64, Error, Result};

const REL_TOL: f64 = 1e-11;
const ABS_TOL: f64 = 1e-13;

/// Bundle of actions attached to one `(sealed potential, α, γ)` triple.
#[derive(Clone, Copy, Debug)]
pub struct ComplexAction {
    /// Agmon distance `S = ∫_{x_ℓ}^{x_r} √V`.
    pub s: f64,
    /// `S(α) = e^{iα/2} S`.
    pub s_alpha: Complex64,
    /// `S_η = cos(α/2) ∫_{x_ℓ}^{x_r-η} √V`.
    pub s_eta: f64,
    /// `S_-(γ) = cos(α/2) ∫_{x_ℓ-γ}^{x_ℓ} √V_{ℓ,A}`.
    pub s_minus_gamma: f64,
    /// `S_+(γ) = cos(α/2) ∫_{x_ℓ}^{x_ℓ+γ} √V_{ℓ,A}`.
    pub s_plus_gamma: f64,
    pub alpha: f64,
}

/// Agmon weight `Φ_ε(x) = √(1-ε) |∫_{x_ℓ}^x cos(α/2) √V_{ℓ,A}(s) ds|`.
///
/// `V_{ℓ,A}` is the sealed potential times a smooth plateau equal to 1 on
/// `[-A, A]` and 0 outside `[-2A, 2A]`.
#[derive(Clone)]
pub struct AgmonWeight {
    sealed: SealedPotential,
    pub alpha: f64,
    pub epsilon: f64,
    pub a_cut: f64,
}

/// Smoothstep plateau: 1 on `[-a, a]`, 0 outside `[-2a, 2a]`.
fn plateau(x: f64, a: f64) -> f64 {
    let t = (x.abs() - a) / a;
    if t <= 0.0 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        1.0 - t * t * (3.0 - 2.0 * t)
    }
}

/// `∫_a^b √V` by adaptive Gauss–Kronrod, split at the wells.
///
/// Errors with [`Error::Domain`] if `V` is found negative on the interval.
pub fn agmon_action(v: impl Fn(f64) -> f64 + Copy, a: f64, b: f64, splits: &[f64]) -> Result<f64> {
    if a > b {
        return Err(Error::Contract("agmon_action expects a ≤ b".into()));
    }
    // sample for negativity beyond round-off
    let n = 64;
    for i in 0..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        if v(x) < -1e-12 {
            return Err(Error::Domain(format!("V({x}) = {} < 0", v(x))));
        }
    }
    quad::integrate_split(
        move |x| v(x).max(0.0).sqrt(),
        a,
        b,
        splits,
        REL_TOL,
        ABS_TOL,
    )
}

/// `S(α) = e^{iα/2} ∫_{x_ℓ}^{x_r} √V`.
pub fn complex_action(spec: &PotentialSpec, alpha: f64) -> Result<Complex64> {
    check_alpha(alpha)?;
    let s = agmon_action(
        |x| spec.eval(x, 0),
        spec.x_left(),
        spec.x_right(),
        &[spec.x_left(), spec.x_right()],
    )?;
    Ok(Complex64::from_polar(s, alpha / 2.0))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.abs() >= std::f64::consts::PI {
        return Err(Error::Contract(format!(
            "alpha = {alpha} must lie in (-π, π)"
        )));
    }
    Ok(())
}

/// Fills `S_η`, `S_±(γ)` (with the cutoff potential) and `S(α)` for one seal.
pub fn truncated_actions(
    sealed: &SealedPotential,
    alpha: f64,
    gamma: f64,
) -> Result<ComplexAction> {
    check_alpha(alpha)?;
    if gamma < 0.0 {
        return Err(Error::Contract("gamma must be nonnegative".into()));
    }
    let spec = &sealed.base;
    let (xl, xr) = (spec.x_left(), spec.x_right());
    let cos_half = (alpha / 2.0).cos();
    let s = agmon_action(|x| spec.eval(x, 0), xl, xr, &[xl, xr])?;
    let s_eta = cos_half * agmon_action(|x| spec.eval(x, 0), xl, xr - sealed.eta, &[xl])?;
    let a_cut = 2.0 * xr;
    let v_cut = |x: f64| sealed.eval(x, 0) * plateau(x, a_cut);
    let xw = sealed.kept_well();
    let s_minus = cos_half * agmon_action(v_cut, xw - gamma, xw, &[xw])?;
    let s_plus = cos_half * agmon_action(v_cut, xw, xw + gamma, &[xw])?;
    Ok(ComplexAction {
        s,
        s_alpha: Complex64::from_polar(s, alpha / 2.0),
        s_eta,
        s_minus_gamma: s_minus,
        s_plus_gamma: s_plus,
        alpha,
    })
}

impl AgmonWeight {
    pub fn new(sealed: &SealedPotential, alpha: f64, epsilon: f64, a_cut: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Contract(format!(
                "epsilon = {epsilon} must lie in (0, 1)"
            )));
        }
        if a_cut < sealed.base.x_right() {
            return Err(Error::Contract(
                "A_cut must contain [x_ℓ, x_r] in [-A_cut, A_cut]".into(),
            ));
        }
        Ok(AgmonWeight {
            sealed: sealed.clone(),
            alpha,
            epsilon,
            a_cut,
        })
    }

    /// Default cutoff `A_cut = 2 x_r`.
    pub fn with_default_cut(sealed: &SealedPotential, alpha: f64, epsilon: f64) -> Result<Self> {
        Self::new(sealed, alpha, epsilon, 2.0 * sealed.base.x_right())
    }

    fn integrand(&self, x: f64) -> f64 {
        let v = self.sealed.eval(x, 0) * plateau(x, self.a_cut);
        (self.alpha / 2.0).cos() * v.max(0.0).sqrt()
    }

    /// `Φ_ε(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let xw = self.sealed.kept_well();
        let (a, b) = if x < xw { (x, xw) } else { (xw, x) };
        let i = quad::integrate_split(
            |s| self.integrand(s),
            a,
            b,
            &[self.sealed.base.x_left(), self.sealed.base.x_right()],
            REL_TOL,
            ABS_TOL,
        )?;
        Ok((1.0 - self.epsilon).sqrt() * i.abs())
    }

    /// `Φ_ε` sampled along a sorted grid (cumulative quadrature, one pass).
    pub fn on_grid(&self, grid: &[f64]) -> Vec<f64> {
        let xw = self.sealed.kept_well();
        let cum = quad::cumulative(|s| self.integrand(s), grid);
        // value of the cumulative integral at the well, by local refinement
        let at_well = match grid.binary_search_by(|p| p.partial_cmp(&xw).unwrap()) {
            Ok(i) => cum[i],
            Err(i) if i == 0 => {
                cum[0]
                    - quad::integrate(|s| self.integrand(s), xw, grid[0], REL_TOL, ABS_TOL)
                        .unwrap_or(0.0)
            }
            Err(i) if i == grid.len() => {
                *cum.last().unwrap()
                    + quad::integrate(
                        |s| self.integrand(s),
                        *grid.last().unwrap(),
                        xw,
                        REL_TOL,
                        ABS_TOL,
                    )
                    .unwrap_or(0.0)
            }
            Err(i) => {
                cum[i - 1]
                    + quad::integrate(|s| self.integrand(s), grid[i - 1], xw, REL_TOL, ABS_TOL)
                        .unwrap_or(0.0)
            }
        };
        cum.iter()
            .map(|&c| (1.0 - self.epsilon).sqrt() * (c - at_well).abs())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::SealSide;

    fn quartic() -> PotentialSpec {
        PotentialSpec::quartic()
    }

    #[test]
    fn quartic_action_closed_form() {
        // ∫_{-1}^{1} (1 - s²) ds = 4/3
        let s = agmon_action(|x| quartic().eval(x, 0), -1.0, 1.0, &[-1.0, 1.0]).unwrap();
        assert!((s - 4.0 / 3.0).abs() < 1e-10, "S = {s}");
    }

    #[test]
    fn empty_interval_is_zero() {
        let s = agmon_action(|x| quartic().eval(x, 0), 0.3, 0.3, &[]).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn figure_action_matches_reference_quadrature() {
        // frozen from 40-digit reference quadrature
        let reference = 1.849_666_874_598_450_7;
        let f = PotentialSpec::figure();
        let s = agmon_action(|x| f.eval(x, 0), -1.0, 1.0, &[-1.0, 1.0]).unwrap();
        assert!((s - reference).abs() < 1e-9, "S = {s}");

        // independent oracle: composite Simpson with Richardson refinement
        let simpson = |n: usize| {
            let h = 2.0 / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                let a = -1.0 + i as f64 * h;
                let m = a + 0.5 * h;
                let b = a + h;
                let g = |x: f64| f.eval(x, 0).max(0.0).sqrt();
                acc += h / 6.0 * (g(a) + 4.0 * g(m) + g(b));
            }
            acc
        };
        let s1 = simpson(20_000);
        let s2 = simpson(40_000);
        let extrap = s2 + (s2 - s1) / 15.0;
        assert!((s - extrap).abs() < 1e-9, "GK {s} vs Simpson {extrap}");
    }

    #[test]
    fn negative_potential_is_domain_error() {
        let r = agmon_action(|x| 1.0 - x * x, -2.0, 2.0, &[]);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn complex_action_phase() {
        let q = quartic();
        let s0 = complex_action(&q, 0.0).unwrap();
        assert!((s0.im).abs() < 1e-14);
        assert!((s0.re - 4.0 / 3.0).abs() < 1e-10);
        let a = std::f64::consts::FRAC_PI_2;
        let s = complex_action(&q, a).unwrap();
        let expect = Complex64::from_polar(4.0 / 3.0, a / 2.0);
        assert!((s - expect).norm() < 1e-10);
        // exact phase relation
        let rot = Complex64::from_polar(1.0, a / 2.0);
        assert!((s - rot * s0).norm() < 1e-12);
        assert!(complex_action(&q, std::f64::consts::PI).is_err());
    }

    #[test]
    fn truncated_actions_limits() {
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        // γ = 0 → S_±(0) = 0
        let act = truncated_actions(&sealed, 0.0, 0.0).unwrap();
        assert_eq!(act.s_minus_gamma, 0.0);
        assert_eq!(act.s_plus_gamma, 0.0);
        // S_η → S cos(α/2) as η → 0
        let tight = q.seal(SealSide::RightSealed, 1e-4, 1.0).unwrap();
        let act_tight = truncated_actions(&tight, 0.0, 0.1).unwrap();
        assert!((act_tight.s_eta - 4.0 / 3.0).abs() < 1e-7);
        assert!(act.s_eta <= act.s + 1e-14);
        // α = 2.8: S_η = cos(1.4) ∫_{-1}^{0.75} (1-s²) ds, closed form
        let act28 = truncated_actions(&sealed, 2.8, 0.2).unwrap();
        let exact = |x: f64| x - x.powi(3) / 3.0;
        let expect = (1.4_f64).cos() * (exact(0.75) - exact(-1.0));
        assert!((act28.s_eta - expect).abs() < 1e-10);
    }

    #[test]
    fn truncated_actions_monotonicity() {
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        let mut prev = (0.0, 0.0);
        for i in 1..=8 {
            let act = truncated_actions(&sealed, 0.7, 0.1 * i as f64).unwrap();
            assert!(act.s_minus_gamma >= prev.0 - 1e-14);
            assert!(act.s_plus_gamma >= prev.1 - 1e-14);
            prev = (act.s_minus_gamma, act.s_plus_gamma);
        }
    }

    #[test]
    fn action_additivity() {
        let q = quartic();
        let v = |x: f64| q.eval(x, 0);
        let (a, b, c) = (-1.7, -0.4, 1.3);
        let whole = agmon_action(v, a, c, &[-1.0, 1.0]).unwrap();
        let left = agmon_action(v, a, b, &[-1.0]).unwrap();
        let right = agmon_action(v, b, c, &[1.0]).unwrap();
        assert!((whole - left - right).abs() < 1e-9 * whole.abs());
    }

    #[test]
    fn weight_at_well_and_midpoint() {
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        let w = AgmonWeight::new(&sealed, 0.0, 1e-12, 5.0).unwrap();
        assert!(w.eval(-1.0).unwrap().abs() < 1e-13);
        // ε → 0, x = 0: ∫_{-1}^0 (1-s²) = 2/3; Σ vanishes left of x_r - η
        assert!((w.eval(0.0).unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn weight_sees_the_seal() {
        // Σ ≥ 0 increases the right-side integral: Φ(x_r) > Φ(2x_ℓ - x_r)
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        let w = AgmonWeight::with_default_cut(&sealed, 0.3, 0.2).unwrap();
        let right = w.eval(q.x_right()).unwrap();
        let left = w.eval(2.0 * q.x_left() - q.x_right()).unwrap();
        assert!(right > left + 1e-6, "right {right} vs left {left}");
    }

    #[test]
    fn weight_cutoff_independent_inside_window() {
        // values inside [-A_cut, A_cut] must not depend on the cutoff choice
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        let w1 = AgmonWeight::new(&sealed, 0.4, 0.2, 2.0).unwrap();
        let w2 = AgmonWeight::new(&sealed, 0.4, 0.2, 4.0).unwrap();
        for i in 0..=20 {
            let x = -2.0 + 0.2 * i as f64;
            let d = (w1.eval(x).unwrap() - w2.eval(x).unwrap()).abs();
            assert!(d < 1e-10, "cutoff dependence {d} at x = {x}");
        }
    }

    #[test]
    fn weight_grid_matches_pointwise() {
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        let w = AgmonWeight::with_default_cut(&sealed, 0.9, 0.35).unwrap();
        let grid: Vec<f64> = (0..=80).map(|i| -2.0 + 0.05 * i as f64).collect();
        let vals = w.on_grid(&grid);
        for (i, &x) in grid.iter().enumerate().step_by(13) {
            assert!((vals[i] - w.eval(x).unwrap()).abs() < 1e-8);
        }
        // nondecreasing in |x - x_ℓ| on each side
        let iw = grid.iter().position(|&x| x >= -1.0).unwrap();
        for i in iw..grid.len() - 1 {
            assert!(vals[i + 1] >= vals[i] - 1e-12);
        }
        for i in 0..iw.saturating_sub(1) {
            assert!(vals[i] >= vals[i + 1] - 1e-12);
        }
    }

    #[test]
    fn weight_rejects_bad_epsilon() {
        let q = quartic();
        let sealed = q.seal(SealSide::RightSealed, 0.25, 1.0).unwrap();
        assert!(AgmonWeight::new(&sealed, 0.0, 0.0, 5.0).is_err());
        assert!(AgmonWeight::new(&sealed, 0.0, 1.0, 5.0).is_err());
    }
}

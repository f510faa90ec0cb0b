//! Symmetric double-well potentials, sealed (simple-well) variants, and
//! local quadratic models.

pub mod expr;

use crate::{Error, Result};
use expr::{Expr, Jet3};

/// Which builtin (or custom) potential a spec wraps.
#[derive(Clone, Debug)]
pub enum PotentialKind {
    /// `V(x) = (1 - x²)²`, wells at ±1.
    Quartic,
    /// `V(x) = 4(1 - x²)²/(2 + x⁴)`, wells at ±1.
    Figure,
    /// Closed-form expression over `{x, +, -, *, /, ^, exp, sqrt}`.
    Custom { expr: String, ast: Expr },
}

/// A validated symmetric double-well potential with derivatives up to order 3.
///
/// Wells sit at `x_ℓ < 0 < x_r = -x_ℓ`, with `V(x_ℓ) = 0` and
/// `V''(x_ℓ) = vpp > 0`.
#[derive(Clone, Debug)]
pub struct PotentialSpec {
    kind: PotentialKind,
    x_left: f64,
    v0: f64,
    vpp: f64,
    v_inf: f64,
}

/// Side at which a [`SealedPotential`] places its bump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SealSide {
    /// Bump at `x_ℓ`; the right well is kept.
    LeftSealed,
    /// Bump at `x_r`; the left well is kept (the paper's simple-well setup).
    RightSealed,
}

/// `V + Σ` with a C^∞ bump `Σ` closing one well.
#[derive(Clone, Debug)]
pub struct SealedPotential {
    pub base: PotentialSpec,
    pub side: SealSide,
    pub eta: f64,
    pub amplitude: f64,
}

/// Harmonic approximation `(vpp/2)(x - x_ℓ)²` with frequency `a = √(vpp/2)`.
#[derive(Clone, Copy, Debug)]
pub struct QuadraticModel {
    pub center: f64,
    pub a: f64,
    pub vpp: f64,
}

/// Report produced by [`PotentialSpec::validate`].
#[derive(Clone, Debug)]
pub struct DiagnosticsReport {
    pub evenness_defect: f64,
    pub positivity_defect: f64,
    pub min_value_defect: f64,
    pub min_slope_defect: f64,
    pub vpp: f64,
    pub v_inf_estimate: f64,
    pub passed: bool,
    pub messages: Vec<String>,
}

impl PotentialSpec {
    pub fn quartic() -> Self {
        PotentialSpec {
            kind: PotentialKind::Quartic,
            x_left: -1.0,
            v0: 1.0,
            vpp: 8.0,
            v_inf: 1.0,
        }
    }

    pub fn figure() -> Self {
        PotentialSpec {
            kind: PotentialKind::Figure,
            x_left: -1.0,
            v0: 2.0,
            vpp: 32.0 / 3.0,
            v_inf: 1.0,
        }
    }

    /// Build a spec from a closed-form expression; derivatives come from the
    /// forward-mode jet evaluator. `x_well` is the left minimum (< 0).
    pub fn custom(expr_src: &str, x_well: f64) -> Result<Self> {
        if x_well >= 0.0 {
            return Err(Error::Contract("x_well must be negative".into()));
        }
        let ast = expr::parse(expr_src)?;
        let j = ast.eval(Jet3::variable(x_well));
        let j0 = ast.eval(Jet3::variable(0.0));
        let spec = PotentialSpec {
            kind: PotentialKind::Custom {
                expr: expr_src.to_string(),
                ast,
            },
            x_left: x_well,
            v0: j0.v,
            vpp: j.d2,
            v_inf: 0.0,
        };
        let mut spec = spec;
        spec.v_inf = spec.estimate_v_inf(2.0 * x_well.abs() + 2.0);
        Ok(spec)
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        -self.x_left
    }

    /// V(0) > 0, the barrier height at the midpoint.
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// V''(x_ℓ) > 0.
    pub fn vpp(&self) -> f64 {
        self.vpp
    }

    pub fn v_inf(&self) -> f64 {
        self.v_inf
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    fn estimate_v_inf(&self, x_far: f64) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..=200 {
            let x = x_far + i as f64 * 0.05;
            m = m.min(self.eval(x, 0)).min(self.eval(-x, 0));
        }
        m
    }

    /// `V^{(order)}(x)` for `order ∈ {0,1,2,3}`.
    pub fn eval(&self, x: f64, order: usize) -> f64 {
        assert!(order <= 3, "derivative order must be in 0..=3");
        match &self.kind {
            PotentialKind::Quartic => {
                let u = 1.0 - x * x;
                match order {
                    0 => u * u,
                    1 => 4.0 * x.powi(3) - 4.0 * x,
                    2 => 12.0 * x * x - 4.0,
                    _ => 24.0 * x,
                }
            }
            PotentialKind::Figure => {
                // V = 4(1-x²)²/(2+x⁴); derivatives in reduced rational form
                let d = x.powi(4) + 2.0;
                match order {
                    0 => {
                        let u = 1.0 - x * x;
                        4.0 * u * u / d
                    }
                    1 => 16.0 * x * (x.powi(4) + x * x - 2.0) / (d * d),
                    2 => {
                        16.0 * (-3.0 * x.powi(8) - 5.0 * x.powi(6)
                            + 24.0 * x.powi(4)
                            + 6.0 * x * x
                            - 4.0)
                            / d.powi(3)
                    }
                    _ => {
                        96.0 * x
                            * (2.0 * x.powi(10) + 5.0 * x.powi(8) - 40.0 * x.powi(6)
                                - 20.0 * x.powi(4)
                                + 40.0 * x * x
                                + 4.0)
                            / d.powi(4)
                    }
                }
            }
            PotentialKind::Custom { ast, .. } => ast.eval(Jet3::variable(x)).deriv(order),
        }
    }

    /// Evenness, positivity and nondegeneracy diagnostics on a sampling grid.
    /// Report-only: never errors.
    pub fn validate(&self, grid: &[f64]) -> DiagnosticsReport {
        let mut messages = Vec::new();
        let scale = grid
            .iter()
            .map(|&x| self.eval(x, 0).abs())
            .fold(0.0_f64, f64::max)
            .max(1.0);

        let mut evenness = 0.0_f64;
        let mut positivity = 0.0_f64;
        for &x in grid {
            evenness = evenness.max((self.eval(x, 0) - self.eval(-x, 0)).abs());
            let near_well = (x - self.x_left).abs() < 1e-6 || (x - self.x_right()).abs() < 1e-6;
            if !near_well {
                positivity = positivity.max(-self.eval(x, 0));
            }
        }
        let min_value_defect = self.eval(self.x_left, 0).abs();
        let min_slope_defect = self.eval(self.x_left, 1).abs();
        let v_inf_estimate = self.estimate_v_inf(2.0 * self.x_right() + 2.0);

        let tol = 1e-10 * scale;
        let mut passed = true;
        if self.x_left >= 0.0 {
            passed = false;
            messages.push("left minimum must satisfy x_ℓ < 0 (minima not distinct)".into());
        }
        if evenness > tol {
            passed = false;
            messages.push(format!("evenness defect {evenness:.3e} exceeds {tol:.3e}"));
        }
        if positivity > tol {
            passed = false;
            messages.push(format!("potential dips below zero by {positivity:.3e}"));
        }
        if min_value_defect > tol || min_slope_defect > 1e-8 * scale {
            passed = false;
            messages.push(format!(
                "x_ℓ is not a critical zero: V = {min_value_defect:.3e}, V' = {min_slope_defect:.3e}"
            ));
        }
        if self.vpp <= 1e-8 * scale {
            passed = false;
            messages.push(format!("degenerate minimum: V''(x_ℓ) = {:.3e}", self.vpp));
        }
        if v_inf_estimate <= 0.0 {
            passed = false;
            messages.push(format!(
                "potential not bounded below at infinity: inf estimate {v_inf_estimate:.3e}"
            ));
        }
        DiagnosticsReport {
            evenness_defect: evenness,
            positivity_defect: positivity,
            min_value_defect,
            min_slope_defect,
            vpp: self.vpp,
            v_inf_estimate,
            passed,
            messages,
        }
    }

    /// Close one well with a bump `Σ(x) = amplitude·exp(-1/(1-t²))`,
    /// `t = (x - x_r)/η` (reflected for [`SealSide::LeftSealed`]).
    pub fn seal(&self, side: SealSide, eta: f64, amplitude: f64) -> Result<SealedPotential> {
        if !(eta > 0.0 && eta < self.x_right()) {
            return Err(Error::Contract(format!(
                "seal width eta = {eta} must lie in (0, x_r = {})",
                self.x_right()
            )));
        }
        if amplitude <= 0.0 {
            return Err(Error::Contract("seal amplitude must be positive".into()));
        }
        Ok(SealedPotential {
            base: self.clone(),
            side,
            eta,
            amplitude,
        })
    }

    /// Seal with the default knobs `η = (x_r - x_ℓ)/8`, `amplitude = max(1, V(0))`.
    pub fn seal_default(&self, side: SealSide) -> Result<SealedPotential> {
        let eta = (self.x_right() - self.x_left) / 8.0;
        self.seal(side, eta, self.v0.max(1.0))
    }

    pub fn quadratic_model(&self) -> Result<QuadraticModel> {
        if self.vpp <= 0.0 {
            return Err(Error::Contract(format!(
                "V''(x_ℓ) = {} must be positive",
                self.vpp
            )));
        }
        Ok(QuadraticModel {
            center: self.x_left,
            a: (self.vpp / 2.0).sqrt(),
            vpp: self.vpp,
        })
    }
}

impl SealedPotential {
    /// Center of the bump: `x_r` for right-sealed, `x_ℓ` for left-sealed.
    pub fn bump_center(&self) -> f64 {
        match self.side {
            SealSide::RightSealed => self.base.x_right(),
            SealSide::LeftSealed => self.base.x_left(),
        }
    }

    /// The well that remains open.
    pub fn kept_well(&self) -> f64 {
        match self.side {
            SealSide::RightSealed => self.base.x_left(),
            SealSide::LeftSealed => self.base.x_right(),
        }
    }

    /// `Σ^{(order)}(x)`; identically zero outside `(center-η, center+η)`.
    pub fn sigma(&self, x: f64, order: usize) -> f64 {
        assert!(order <= 3);
        let t = (x - self.bump_center()) / self.eta;
        // the bump and all its derivatives vanish to every order at |t| = 1;
        // cut slightly inside to keep the jet arithmetic away from 0·∞
        if 1.0 - t * t < 1e-9 {
            return 0.0;
        }
        // amplitude · exp(-1/(1-t²)) differentated through the jet, with the
        // inner chain rule picking up 1/η per order
        let tj = Jet3 {
            v: t,
            d1: 1.0 / self.eta,
            d2: 0.0,
            d3: 0.0,
        };
        let one = Jet3::constant(1.0);
        let g = -(one / (one - tj * tj));
        let b = g.exp();
        self.amplitude * b.deriv(order)
    }

    /// `V_ℓ^{(order)}(x) = V^{(order)} + Σ^{(order)}`.
    pub fn eval(&self, x: f64, order: usize) -> f64 {
        self.base.eval(x, order) + self.sigma(x, order)
    }

    pub fn quadratic_model(&self) -> Result<QuadraticModel> {
        let qm = self.base.quadratic_model()?;
        Ok(QuadraticModel {
            center: self.kept_well(),
            ..qm
        })
    }

    /// Mirror image: the seal moved to the other well.
    pub fn reflected(&self) -> SealedPotential {
        SealedPotential {
            base: self.base.clone(),
            side: match self.side {
                SealSide::RightSealed => SealSide::LeftSealed,
                SealSide::LeftSealed => SealSide::RightSealed,
            },
            eta: self.eta,
            amplitude: self.amplitude,
        }
    }
}

impl QuadraticModel {
    pub fn eval(&self, x: f64, order: usize) -> f64 {
        let t = x - self.center;
        match order {
            0 => 0.5 * self.vpp * t * t,
            1 => self.vpp * t,
            2 => self.vpp,
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_pointwise_values() {
        let q = PotentialSpec::quartic();
        assert_eq!(q.eval(0.0, 0), 1.0);
        // V'' = 12x² - 4 at x = 1
        assert_eq!(q.eval(1.0, 2), 8.0);
        assert_eq!(q.vpp(), 8.0);
    }

    #[test]
    fn figure_pointwise_values() {
        let f = PotentialSpec::figure();
        assert_eq!(f.eval(0.0, 0), 2.0);
        assert!((f.vpp() - 32.0 / 3.0).abs() < 1e-12);
        // hand-reduced rational derivatives vs the jet evaluator on the
        // same closed form
        let ast = expr::parse("4*(1 - x^2)^2/(2 + x^4)").unwrap();
        for i in 0..60 {
            let x = -3.0 + 0.1 * i as f64;
            let j = ast.eval(Jet3::variable(x));
            for order in 0..=3 {
                let scale = 1.0 + j.deriv(order).abs();
                assert!(
                    (f.eval(x, order) - j.deriv(order)).abs() < 1e-11 * scale,
                    "order {order} mismatch at x = {x}"
                );
            }
        }
    }

    #[test]
    fn validate_builtins_pass() {
        let grid: Vec<f64> = (0..=1000).map(|i| -5.0 + 0.01 * i as f64).collect();
        for spec in [PotentialSpec::quartic(), PotentialSpec::figure()] {
            let rep = spec.validate(&grid);
            assert!(rep.passed, "{:?}", rep.messages);
            assert!(rep.evenness_defect < 1e-12);
        }
    }

    #[test]
    fn validate_rejects_single_well() {
        // V = x² with the two claimed minima collapsing at 0
        let mut spec = PotentialSpec::custom("x^2", -1.0).unwrap();
        spec.x_left = 0.0; // claim x_ℓ = x_r = 0
        let grid: Vec<f64> = (0..=100).map(|i| -2.0 + 0.04 * i as f64).collect();
        let rep = spec.validate(&grid);
        assert!(!rep.passed);
    }

    #[test]
    fn validate_rejects_degenerate_minimum() {
        // V = (1-x²)³ has V''(±1) = 0
        let spec = PotentialSpec::custom("(1 - x^2)^3", -1.0).unwrap();
        assert!(spec.vpp().abs() < 1e-12);
        let grid: Vec<f64> = (0..=100).map(|i| -1.0 + 0.02 * i as f64).collect();
        let rep = spec.validate(&grid);
        assert!(!rep.passed);
    }

    #[test]
    fn seal_bump_profile() {
        let q = PotentialSpec::quartic();
        let s = q.seal(SealSide::RightSealed, 0.5, 1.0).unwrap();
        // Σ(x_r) = amplitude · e^{-1}
        assert!((s.sigma(1.0, 0) - (-1.0_f64).exp()).abs() < 1e-15);
        // support
        assert_eq!(s.sigma(0.5, 0), 0.0);
        assert_eq!(s.sigma(1.5, 0), 0.0);
        // V_ℓ(x_ℓ) = 0 and V_ℓ ≥ V with equality off the support
        assert_eq!(s.eval(-1.0, 0), 0.0);
        for i in 0..=100 {
            let x = -2.0 + 0.04 * i as f64;
            assert!(s.eval(x, 0) >= q.eval(x, 0) - 1e-15);
            if x <= 0.5 {
                assert_eq!(s.eval(x, 0), q.eval(x, 0));
            }
        }
    }

    #[test]
    fn seal_rejects_wide_bump() {
        let q = PotentialSpec::quartic();
        assert!(q.seal(SealSide::RightSealed, 1.0, 1.0).is_err());
    }

    #[test]
    fn sigma_derivatives_match_differences() {
        let q = PotentialSpec::quartic();
        let s = q.seal(SealSide::RightSealed, 0.25, 1.3).unwrap();
        let d = 1e-5;
        for &x in &[0.8, 0.93, 1.0, 1.11, 1.2] {
            let fd1 = (s.sigma(x + d, 0) - s.sigma(x - d, 0)) / (2.0 * d);
            let fd2 = (s.sigma(x + d, 0) - 2.0 * s.sigma(x, 0) + s.sigma(x - d, 0)) / (d * d);
            assert!((s.sigma(x, 1) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()));
            assert!((s.sigma(x, 2) - fd2).abs() < 1e-3 * (1.0 + fd2.abs()));
        }
    }

    #[test]
    fn quadratic_model_frequencies() {
        assert_eq!(
            PotentialSpec::quartic().quadratic_model().unwrap().a,
            2.0
        );
        // vpp = 2 → a = 1
        let c = PotentialSpec::custom("0.25*(1 - x^2)^2", -1.0).unwrap();
        assert!((c.vpp() - 2.0).abs() < 1e-12);
        assert!((c.quadratic_model().unwrap().a - 1.0).abs() < 1e-13);
        // figure: a = √(16/3)
        let f = PotentialSpec::figure().quadratic_model().unwrap();
        assert!((f.a - (16.0_f64 / 3.0).sqrt()).abs() < 1e-13);
        // a² · 2 = V''(x_ℓ)
        let q = PotentialSpec::quartic();
        let a = q.quadratic_model().unwrap().a;
        assert_eq!(2.0 * a * a, q.eval(q.x_left(), 2));
    }
}

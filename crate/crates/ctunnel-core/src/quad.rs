//! Adaptive Gauss–Kronrod quadrature.
//!
//! A (G7, K15) pair drives an interval-bisection loop. Integrands here are
//! smooth except for square-root kinks at potential minima, so callers split
//! at the known kink locations and the adaptive loop handles the rest.

use crate::{Error, Result};
use num_complex::Complex64;

// 15-point Kronrod nodes on [-1, 1] (symmetric; nonnegative half listed).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];

// Embedded 7-point Gauss weights (on the odd-indexed Kronrod nodes).
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Scalar types that can be accumulated by the quadrature driver.
pub trait QuadScalar: Copy + std::ops::Add<Output = Self> + std::ops::Sub<Output = Self> {
    fn zero() -> Self;
    fn scale(self, s: f64) -> Self;
    fn abs(self) -> f64;
}

impl QuadScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl QuadScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

/// One (G7, K15) panel: returns the K15 value and |K15 - G7| as error estimate.
fn gk15<T: QuadScalar>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let mut kron = T::zero();
    let mut gauss = T::zero();
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let contrib = if x == 0.0 {
            f(c)
        } else {
            f(c - r * x) + f(c + r * x)
        };
        kron = kron + contrib.scale(wk);
        if i % 2 == 1 {
            gauss = gauss + contrib.scale(WG[i / 2]);
        }
    }
    let kron = kron.scale(r);
    let gauss = gauss.scale(r);
    ((kron), (kron - gauss).abs())
}

/// Adaptive integration of `f` over `[a, b]`.
///
/// Bisects the worst panel until the summed error estimate is below
/// `rel_tol·|I| + abs_tol`. Panels are split largest-error-first from a
/// simple stack; the final sum runs in a fixed order so results are
/// reproducible.
pub fn integrate<T: QuadScalar>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    struct Panel<T> {
        a: f64,
        b: f64,
        value: T,
        err: f64,
    }
    let (v0, e0) = gk15(&f, a, b);
    let mut panels = vec![Panel {
        a,
        b,
        value: v0,
        err: e0,
    }];
    for _ in 0..2000 {
        let total: f64 = panels.iter().map(|p| p.value.abs()).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= rel_tol * total + abs_tol {
            let mut sum = T::zero();
            panels.sort_by(|p, q| p.a.partial_cmp(&q.a).unwrap());
            for p in &panels {
                sum = sum + p.value;
            }
            return Ok(sum);
        }
        // split the worst panel
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.err.partial_cmp(&q.err).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            // interval exhausted at machine precision; accept its estimate
            panels.push(Panel {
                a: p.a,
                b: p.b,
                value: p.value,
                err: 0.0,
            });
            continue;
        }
        let (vl, el) = gk15(&f, p.a, m);
        let (vr, er) = gk15(&f, m, p.b);
        panels.push(Panel {
            a: p.a,
            b: m,
            value: vl,
            err: el,
        });
        panels.push(Panel {
            a: m,
            b: p.b,
            value: vr,
            err: er,
        });
    }
    Err(Error::Numeric(format!(
        "quadrature failed to converge on [{a}, {b}]"
    )))
}

/// Adaptive integration with forced panel boundaries at `splits`
/// (used to isolate the √V kinks at the potential wells).
pub fn integrate_split<T: QuadScalar>(
    f: impl Fn(f64) -> T + Copy,
    a: f64,
    b: f64,
    splits: &[f64],
    rel_tol: f64,
    abs_tol: f64,
) -> Result<T> {
    if a == b {
        return Ok(T::zero());
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = splits.iter().copied().filter(|&s| s > lo && s < hi).collect();
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut sum = T::zero();
    let mut left = lo;
    for &c in cuts.iter().chain(std::iter::once(&hi)) {
        sum = sum + integrate(f, left, c, rel_tol, abs_tol)?;
        left = c;
    }
    Ok(sum.scale(sign))
}

/// Cumulative integral of a smooth `f` along a sorted grid: returns
/// `F[i] = ∫_{grid[0]}^{grid[i]} f`. Each cell uses a single K15 panel,
/// which is plenty for the smooth integrands this crate feeds it.
pub fn cumulative<T: QuadScalar>(f: impl Fn(f64) -> T, grid: &[f64]) -> Vec<T> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = T::zero();
    out.push(acc);
    for w in grid.windows(2) {
        let (v, _) = gk15(&f, w[0], w[1]);
        acc = acc + v;
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| x * x * x - 2.0 * x + 1.0, -1.0, 3.0, 1e-12, 1e-14).unwrap();
        // ∫ x³-2x+1 = x⁴/4 - x² + x
        let exact = (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn sqrt_kink_with_split() {
        // ∫_{-1}^{1} |x|^{1/2} dx = 4/3
        let v = integrate_split(|x: f64| x.abs().sqrt(), -1.0, 1.0, &[0.0], 1e-12, 1e-14).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-10, "got {v}");
    }

    #[test]
    fn empty_interval() {
        let v = integrate(|x: f64| x.exp(), 2.0, 2.0, 1e-10, 0.0).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^{2π} e^{ix} dx = 0
        let v = integrate(
            |x| Complex64::new(x.cos(), x.sin()),
            0.0,
            2.0 * std::f64::consts::PI,
            1e-12,
            1e-14,
        )
        .unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.03).collect();
        let cum = cumulative(|x| x.cos(), &grid);
        for (i, &x) in grid.iter().enumerate() {
            assert!((cum[i] - x.sin()).abs() < 1e-13);
        }
    }
}

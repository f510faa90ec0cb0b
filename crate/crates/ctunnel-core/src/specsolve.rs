//! Discretization of `-h²∂²ₓ + e^{iα}·(potential)` on `[-X, X]` with
//! Dirichlet ends, dense non-Hermitian eigensolves, Riesz projectors by
//! contour quadrature, and spectral diagnostics (clusters, localization,
//! refinement studies).

use crate::{Complex64, Error, Result};
use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

/// Discretization scheme for `-∂²ₓ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// 4th-order central differences on a uniform grid. The resulting matrix
    /// is complex symmetric (equal to its own transpose), which is the
    /// discrete form of the conjugation symmetry `Jℒ = ℒ*J`.
    Fd4,
    /// Chebyshev collocation (differentiation matrix squared, interior rows).
    Chebyshev,
}

/// Which potential was discretized; drives symmetry diagnostics.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialTag {
    Double,
    LeftSealed,
    RightSealed,
    QuadraticModel,
}

/// Dense discretization of one operator instance.
pub struct DiscreteOperator {
    pub alpha: f64,
    pub h: f64,
    pub x_half_width: f64,
    pub n_points: usize,
    pub scheme: Scheme,
    pub tag: PotentialTag,
    /// Interior nodes, sorted ascending.
    pub grid: Vec<f64>,
    /// Trapezoid quadrature weights matching `grid` (Dirichlet ends).
    pub weights: Vec<f64>,
    pub matrix: Mat<c64>,
    /// ∞-norm of the matrix, used to scale residual tolerances.
    pub norm_scale: f64,
}

/// Low-lying spectrum in the disk `D(0, R·h)`.
pub struct SpectrumResult {
    pub radius_mult: f64,
    pub eigenvalues: Vec<Complex64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`, L²-normalized with
    /// the trapezoid weights.
    pub eigenvectors: Mat<c64>,
    pub residuals: Vec<f64>,
    pub clusters: Vec<Vec<usize>>,
    /// Set when a cluster of size ≥ 3 shows up (under-resolved grid).
    pub cluster_anomaly: bool,
}

/// Contour-integral spectral projector.
pub struct RieszProjector {
    pub center: Complex64,
    pub radius: f64,
    pub n_contour: usize,
    pub matrix: Mat<c64>,
    pub singular_values: Vec<f64>,
    pub numeric_rank: usize,
    pub idempotency_defect: f64,
}

/// Refinement-ladder report; `diffs[k] = |μ(k+1) - μ(k)|`.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub eigenvalues: Vec<Complex64>,
    pub diffs: Vec<f64>,
    /// Estimated discretization error of the finest rung.
    pub error_estimate: f64,
    pub converged: bool,
}

pub const RANK_TOL: f64 = 1e-6;
pub const PROJ_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-8;

fn c(z: Complex64) -> c64 {
    c64::new(z.re, z.im)
}

fn nc(z: c64) -> Complex64 {
    Complex64::new(z.re, z.im)
}

/// Assemble the dense matrix of `-h²∂² + e^{iα}·pot` with Dirichlet ends.
///
/// `x_half_width` must leave room past the outer well (`X > x_r + 1` for the
/// potentials used here); `n_points` are interior nodes.
pub fn assemble(
    pot: &dyn Fn(f64) -> f64,
    tag: PotentialTag,
    alpha: f64,
    h: f64,
    x_half_width: f64,
    n_points: usize,
    scheme: Scheme,
) -> Result<DiscreteOperator> {
    if h <= 0.0 {
        return Err(Error::Contract("h must be positive".into()));
    }
    if n_points < 200 {
        return Err(Error::Config(format!(
            "n_points = {n_points} too small (need ≥ 200)"
        )));
    }
    let x = x_half_width;
    let phase = c64::new(alpha.cos(), alpha.sin());
    let n = n_points;
    let (grid, weights, mut m) = match scheme {
        Scheme::Fd4 => {
            let dx = 2.0 * x / (n as f64 + 1.0);
            let grid: Vec<f64> = (1..=n).map(|i| -x + dx * i as f64).collect();
            let weights = vec![dx; n];
            // -h² ∂² ≈ -h²/(12Δx²) [-1 16 -30 16 -1]; truncation by zero
            // extension keeps the matrix symmetric under transpose
            let cstencil = h * h / (12.0 * dx * dx);
            let mut m = Mat::<c64>::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = c64::new(30.0 * cstencil, 0.0) + phase * pot(grid[i]);
                if i + 1 < n {
                    m[(i, i + 1)] = c64::new(-16.0 * cstencil, 0.0);
                    m[(i + 1, i)] = c64::new(-16.0 * cstencil, 0.0);
                }
                if i + 2 < n {
                    m[(i, i + 2)] = c64::new(cstencil, 0.0);
                    m[(i + 2, i)] = c64::new(cstencil, 0.0);
                }
            }
            (grid, weights, m)
        }
        Scheme::Chebyshev => {
            // Trefethen's differentiation matrix on N+1 Chebyshev points,
            // squared and restricted to the interior
            let nn = n + 1; // polynomial degree; nodes 0..=nn
            let nodes: Vec<f64> = (0..=nn)
                .map(|j| x * (std::f64::consts::PI * j as f64 / nn as f64).cos())
                .collect();
            let cweight = |j: usize| -> f64 {
                if j == 0 || j == nn {
                    2.0
                } else {
                    1.0
                }
            };
            let mut d = Mat::<f64>::zeros(nn + 1, nn + 1);
            for i in 0..=nn {
                for j in 0..=nn {
                    if i != j {
                        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                        d[(i, j)] = cweight(i) / cweight(j) * sign / (nodes[i] - nodes[j]);
                    }
                }
                let mut row_sum = 0.0;
                for j in 0..=nn {
                    if i != j {
                        row_sum += d[(i, j)];
                    }
                }
                d[(i, i)] = -row_sum; // negative-sum trick
            }
            let d2 = &d * &d;
            // interior nodes in ascending order are indices nn-1 .. 1
            let grid: Vec<f64> = (1..nn).rev().map(|j| nodes[j]).collect();
            let mut m = Mat::<c64>::zeros(n, n);
            for (r, jr) in (1..nn).rev().enumerate() {
                for (s, js) in (1..nn).rev().enumerate() {
                    m[(r, s)] = c64::new(-h * h * d2[(jr, js)], 0.0);
                }
                m[(r, r)] += phase * pot(grid[r]);
            }
            // trapezoid weights on the nonuniform grid (Dirichlet ends)
            let mut weights = vec![0.0; n];
            for i in 0..n {
                let lo = if i == 0 { -x } else { grid[i - 1] };
                let hi = if i == n - 1 { x } else { grid[i + 1] };
                weights[i] = 0.5 * (hi - lo);
            }
            (grid, weights, m)
        }
    };
    // ∞-norm
    let mut norm_scale = 0.0_f64;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += nc(m[(i, j)]).norm();
        }
        norm_scale = norm_scale.max(row);
    }
    let _ = &mut m;
    Ok(DiscreteOperator {
        alpha,
        h,
        x_half_width,
        n_points,
        scheme,
        tag,
        grid,
        weights,
        matrix: m,
        norm_scale,
    })
}

impl DiscreteOperator {
    /// L² norm with the operator's quadrature weights.
    pub fn norm_l2(&self, v: &[Complex64]) -> f64 {
        v.iter()
            .zip(&self.weights)
            .map(|(z, w)| z.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Weighted inner product `⟨u, v⟩ = Σ w_i u_i conj(v_i)` (Hermitian).
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter()
            .zip(v)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b.conj() * w)
            .sum()
    }

    /// Bilinear pairing `⟨u, v̄⟩ = Σ w_i u_i v_i` (no conjugation) — the
    /// natural pairing for this complex-symmetric operator.
    pub fn bilinear(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        u.iter()
            .zip(v)
            .zip(&self.weights)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }

    /// `(M - μ)v` residual norm divided by ‖v‖.
    pub fn relative_residual(&self, mu: Complex64, v: &[Complex64]) -> f64 {
        let n = self.n_points;
        let mut r = vec![Complex64::default(); n];
        for i in 0..n {
            let mut acc = c64::new(0.0, 0.0);
            for j in 0..n {
                acc += self.matrix[(i, j)] * c(v[j]);
            }
            r[i] = nc(acc) - mu * v[i];
        }
        self.norm_l2(&r) / self.norm_l2(v)
    }
}

/// Dense eigensolve keeping eigenvalues in `D(0, R·h)`, sorted by modulus
/// (ties by argument). Eigenvectors are weight-normalized.
pub fn low_lying_spectrum(op: &DiscreteOperator, radius_mult: f64) -> Result<SpectrumResult> {
    let n = op.n_points;
    let evd = op
        .matrix
        .eigen()
        .map_err(|e| Error::Numeric(format!("dense eigensolve failed: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let cutoff = radius_mult * op.h;
    let mut kept: Vec<usize> = (0..n)
        .filter(|&k| nc(s.column_vector()[k]).norm() < cutoff)
        .collect();
    kept.sort_by(|&p, &q| {
        let a = nc(s.column_vector()[p]);
        let b = nc(s.column_vector()[q]);
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap()
            .then(a.arg().partial_cmp(&b.arg()).unwrap())
    });
    let mut eigenvalues = Vec::with_capacity(kept.len());
    let mut vectors = Mat::<c64>::zeros(n, kept.len());
    let mut residuals = Vec::with_capacity(kept.len());
    for (col, &k) in kept.iter().enumerate() {
        let mu = nc(s.column_vector()[k]);
        let mut v: Vec<Complex64> = (0..n).map(|i| nc(u[(i, k)])).collect();
        let nrm = op.norm_l2(&v);
        for z in v.iter_mut() {
            *z /= nrm;
        }
        let res = op.relative_residual(mu, &v);
        if res > RESIDUAL_TOL * op.norm_scale.max(1.0) {
            return Err(Error::Numeric(format!(
                "eigenpair residual {res:.3e} exceeds tolerance for μ = {mu}"
            )));
        }
        for i in 0..n {
            vectors[(i, col)] = c(v[i]);
        }
        eigenvalues.push(mu);
        residuals.push(res);
    }
    Ok(SpectrumResult {
        radius_mult,
        eigenvalues,
        eigenvectors: vectors,
        residuals,
        clusters: Vec::new(),
        cluster_anomaly: false,
    })
}

/// Greedy clustering of sorted eigenvalues with threshold `0.3·a·h`.
///
/// Returns the clusters (index groups); flags an anomaly if one has size ≥ 3.
pub fn cluster_eigenvalues(
    result: &mut SpectrumResult,
    h: f64,
    a: f64,
) -> Result<&Vec<Vec<usize>>> {
    let threshold = 0.3 * a * h;
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &mu) in result.eigenvalues.iter().enumerate() {
        let joined = clusters.last_mut().is_some_and(|cl| {
            cl.iter()
                .any(|&j| (result.eigenvalues[j] - mu).norm() < threshold)
        });
        if joined {
            clusters.last_mut().unwrap().push(i);
        } else {
            clusters.push(vec![i]);
        }
    }
    result.cluster_anomaly = clusters.iter().any(|cl| cl.len() >= 3);
    result.clusters = clusters;
    Ok(&result.clusters)
}

/// Riesz projector `P = (2πi)^{-1} ∮ (z - ℒ)^{-1} dz` on a circle, by the
/// trapezoid rule (spectrally accurate on circles). Each node costs one
/// dense LU solve.
///
/// `known_eigenvalues` are used to enforce the contour-placement margin: no
/// eigenvalue may lie within `0.1·radius` of the contour.
pub fn riesz_projector(
    op: &DiscreteOperator,
    known_eigenvalues: &[Complex64],
    center: Complex64,
    radius: f64,
    n_contour: usize,
) -> Result<RieszProjector> {
    for &mu in known_eigenvalues {
        let d = ((mu - center).norm() - radius).abs();
        if d < 0.1 * radius {
            return Err(Error::Contour(format!(
                "eigenvalue {mu} lies within 0.1·radius of the contour"
            )));
        }
    }
    let n = op.n_points;
    let mut p = Mat::<c64>::zeros(n, n);
    let id = Mat::<c64>::identity(n, n);
    for k in 0..n_contour {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n_contour as f64;
        let zk = center + Complex64::from_polar(radius, theta);
        // (z - L) X = I
        let mut zm = Mat::<c64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                zm[(i, j)] = if i == j {
                    c(zk) - op.matrix[(i, j)]
                } else {
                    -op.matrix[(i, j)]
                };
            }
        }
        let lu = zm.partial_piv_lu();
        let x = lu.solve(&id);
        // (1/2πi)∮ f dz ≈ (r/m) Σ e^{iθ_k} f(z_k)
        let w = c(Complex64::from_polar(radius / n_contour as f64, theta));
        for i in 0..n {
            for j in 0..n {
                p[(i, j)] += w * x[(i, j)];
            }
        }
    }
    // SVD for rank and norm diagnostics
    let svd = p
        .svd()
        .map_err(|e| Error::Numeric(format!("projector SVD failed: {e:?}")))?;
    let sv: Vec<f64> = (0..n).map(|i| svd.S().column_vector()[i].re).collect();
    let numeric_rank = if sv[0] <= RANK_TOL {
        0
    } else {
        sv.iter().filter(|&&s| s > RANK_TOL * sv[0]).count()
    };
    // ‖P² - P‖ via spectral norm of the difference
    let p2 = &p * &p;
    let mut diff = p2;
    for i in 0..n {
        for j in 0..n {
            diff[(i, j)] -= p[(i, j)];
        }
    }
    let idem = operator_norm(&diff)?;
    Ok(RieszProjector {
        center,
        radius,
        n_contour,
        matrix: p,
        singular_values: sv,
        numeric_rank,
        idempotency_defect: idem,
    })
}

fn operator_norm(m: &Mat<c64>) -> Result<f64> {
    let svd = m
        .svd()
        .map_err(|e| Error::Numeric(format!("SVD failed: {e:?}")))?;
    Ok(svd.S().column_vector()[0].re)
}

/// `‖(ℒ - z)^{-1}‖₂` via the smallest singular value of `ℒ - z`.
pub fn resolvent_norm(op: &DiscreteOperator, z: Complex64) -> Result<f64> {
    let n = op.n_points;
    let mut zm = Mat::<c64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            zm[(i, j)] = op.matrix[(i, j)];
        }
        zm[(i, i)] -= c(z);
    }
    let svd = zm
        .svd()
        .map_err(|e| Error::Numeric(format!("SVD failed: {e:?}")))?;
    let smin = svd.S().column_vector()[n - 1].re;
    if smin <= 1e-14 * op.norm_scale {
        return Err(Error::NearSpectrum(format!(
            "z = {z} is numerically on the spectrum (σ_min = {smin:.3e})"
        )));
    }
    Ok(1.0 / smin)
}

/// `sup_window |ψ(x)| e^{Φ(x)/h} / ‖ψ‖` for a grid eigenvector `ψ` and weight
/// samples `phi` on `op.grid`.
///
/// The sup is restricted to `window = (lo, hi)`: outside a neighborhood of
/// the kept well the true signal `|ψ|e^{Φ/h}` drops below the eigensolver's
/// floating-point floor and the product would measure amplified noise rather
/// than the eigenfunction.
pub fn localization_check(
    op: &DiscreteOperator,
    psi: &[Complex64],
    phi: &[f64],
    h: f64,
    window: (f64, f64),
) -> f64 {
    let nrm = op.norm_l2(psi);
    let mut sup = 0.0_f64;
    for (i, &x) in op.grid.iter().enumerate() {
        if x < window.0 || x > window.1 {
            continue;
        }
        sup = sup.max(psi[i].norm() * (phi[i] / h).exp());
    }
    sup / nrm
}

/// Cauchy-convergence study of the smallest-modulus eigenvalue along a
/// ladder of `(X, n_points)` rungs.
pub fn convergence_check(
    pot: &dyn Fn(f64) -> f64,
    tag: PotentialTag,
    alpha: f64,
    h: f64,
    scheme: Scheme,
    ladder: &[(f64, usize)],
) -> Result<ConvergenceReport> {
    if ladder.len() < 3 {
        return Err(Error::Contract("ladder needs at least 3 rungs".into()));
    }
    let mut eigenvalues = Vec::with_capacity(ladder.len());
    for &(x, n) in ladder {
        let op = assemble(pot, tag, alpha, h, x, n, scheme)?;
        let spec = low_lying_spectrum(&op, 4.0)?;
        let mu = *spec.eigenvalues.first().ok_or_else(|| {
            Error::Numeric("no eigenvalue found in D(0, 4h) on a ladder rung".into())
        })?;
        eigenvalues.push(mu);
    }
    let diffs: Vec<f64> = eigenvalues
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .collect();
    let converged = diffs.windows(2).all(|d| d[1] < 0.5 * d[0] + 1e-14);
    let error_estimate = *diffs.last().unwrap();
    if !converged {
        return Err(Error::Numeric(format!(
            "eigenvalue ladder not Cauchy-converging: diffs {diffs:?}"
        )));
    }
    Ok(ConvergenceReport {
        eigenvalues,
        diffs,
        error_estimate,
        converged,
    })
}

/// Extract column `k` of the eigenvector matrix as a `Vec<Complex64>`.
pub fn eigenvector(result: &SpectrumResult, k: usize) -> Vec<Complex64> {
    (0..result.eigenvectors.nrows())
        .map(|i| nc(result.eigenvectors[(i, k)]))
        .collect()
}

//! Chain energies `f_n(x) = Σ f(x_i, x_{i+1})`, their gradients and
//! tridiagonal Hessians, and the Morse margin.
//!
//! The Hessian of a nearest-neighbor chain couples only adjacent sites, so
//! it is symmetric tridiagonal; the smallest absolute eigenvalue comes from
//! Sturm-sequence bisection rather than a dense factorization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

use crate::potentials::{PairPotential, TrigPotential};

#[derive(Debug, Error)]
pub enum LatticeError {
    /// One of the chain-rule bounds on the gradient or Hessian failed at a
    /// sampled configuration.
    #[error("{kind} estimate violated: ratio {ratio} at config {witness:?}")]
    EstimateViolation { kind: EstimateKind, ratio: f64, witness: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Gradient,
    Hessian,
}

impl std::fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EstimateKind::Gradient => write!(f, "gradient"),
            EstimateKind::Hessian => write!(f, "Hessian"),
        }
    }
}

/// Whether a chain lives on the torus (angles) or on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Torus,
    Line,
}

/// A chain configuration `(x_0, …, x_n)`, `n ≥ 1`.
///
/// Torus configurations are canonicalized into `[0, 2π)` at construction
/// and comparison; intermediate arithmetic elsewhere works on lifts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeConfig {
    coords: Vec<f64>,
    mode: Mode,
}

/// Reduces an angle to the canonical representative in `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

impl LatticeConfig {
    pub fn torus(coords: Vec<f64>) -> Self {
        assert!(coords.len() >= 2, "a chain needs at least two sites");
        let coords = coords.into_iter().map(wrap_angle).collect();
        Self { coords, mode: Mode::Torus }
    }

    pub fn line(coords: Vec<f64>) -> Self {
        assert!(coords.len() >= 2, "a chain needs at least two sites");
        Self { coords, mode: Mode::Line }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Number of interaction pairs; the chain has `n + 1` sites.
    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    /// ℓ∞ distance, wrap-aware on the torus.
    pub fn dist_inf(&self, other: &[f64]) -> f64 {
        assert_eq!(self.coords.len(), other.len());
        self.coords
            .iter()
            .zip(other)
            .map(|(&a, &b)| match self.mode {
                Mode::Line => (a - b).abs(),
                Mode::Torus => {
                    let d = (a - b).rem_euclid(TAU);
                    d.min(TAU - d)
                }
            })
            .fold(0.0, f64::max)
    }
}

/// The symmetric tridiagonal Hessian of a chain energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagHessian {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagHessian {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn matvec(&self, u: &[f64]) -> Vec<f64> {
        let n = self.size();
        assert_eq!(u.len(), n);
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * u[i];
            if i > 0 {
                v += self.offdiag[i - 1] * u[i - 1];
            }
            if i + 1 < n {
                v += self.offdiag[i] * u[i + 1];
            }
            out[i] = v;
        }
        out
    }

    /// Gershgorin enclosure of the spectrum.
    fn spectral_bounds(&self) -> (f64, f64) {
        let n = self.size();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `t` (Sturm sequence / LDLᵀ
    /// pivot signs).
    pub fn eigen_count_below(&self, t: f64) -> usize {
        let n = self.size();
        if n == 0 {
            return 0;
        }
        let scale = self
            .diag
            .iter()
            .chain(self.offdiag.iter())
            .fold(1.0f64, |m, &v| m.max(v.abs()));
        let guard = 1e-30 * scale;
        let mut count = 0;
        let mut q = self.diag[0] - t;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let q_safe = if q.abs() < guard {
                if q < 0.0 {
                    -guard
                } else {
                    guard
                }
            } else {
                q
            };
            q = (self.diag[i] - t) - self.offdiag[i - 1] * self.offdiag[i - 1] / q_safe;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th eigenvalue (ascending, 0-based) by bisection on the Sturm
    /// count, to absolute width `tol`.
    fn kth_eigenvalue(&self, k: usize, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.eigen_count_below(mid) >= k + 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Smallest absolute eigenvalue, to absolute tolerance `1e-10` or
    /// better.
    ///
    /// For a symmetric matrix this equals `inf_{‖u‖=1} ‖H·u‖`. Only the two
    /// eigenvalues bracketing zero are located, each by Sturm bisection.
    pub fn min_abs_eigenvalue(&self) -> f64 {
        let n = self.size();
        let (lo, hi) = self.spectral_bounds();
        let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        let below = self.eigen_count_below(0.0);
        let mut best = f64::INFINITY;
        if below >= 1 {
            // Largest eigenvalue < 0.
            let lam = self.kth_eigenvalue(below - 1, lo - tol, 0.0, tol);
            best = best.min(lam.abs());
        }
        if below < n {
            // Smallest eigenvalue ≥ 0.
            let lam = self.kth_eigenvalue(below, -tol, hi + tol, tol);
            best = best.min(lam.abs());
        }
        best
    }

    /// Solves `T·x = rhs` by Gaussian elimination with partial pivoting on
    /// the three-band structure. Returns `None` on a (numerically) singular
    /// pivot.
    pub fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.size();
        assert_eq!(rhs.len(), n);
        if n == 1 {
            if self.diag[0].abs() < 1e-300 {
                return None;
            }
            return Some(vec![rhs[0] / self.diag[0]]);
        }
        // Band storage with one fill-in diagonal above the superdiagonal.
        let mut d = self.diag.clone();
        let mut du = self.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let dl = self.offdiag.clone();
        let mut b = rhs.to_vec();

        let scale = d
            .iter()
            .chain(du.iter())
            .fold(1.0f64, |m, &v| m.max(v.abs()));
        let tiny = 1e-14 * scale;

        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < tiny {
                    return None;
                }
                let factor = dl[i] / d[i];
                d[i + 1] -= factor * du[i];
                b[i + 1] -= factor * b[i];
            } else {
                // Swap rows i and i+1; fills in one extra upper diagonal.
                let factor = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - factor * tmp;
                du[i] = tmp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -factor * du2[i];
                }
                b.swap(i, i + 1);
                b[i + 1] -= factor * b[i];
            }
        }
        if d[n - 1].abs() < tiny {
            return None;
        }
        // Back substitution over the (at most) three stored upper bands.
        let mut x = vec![0.0; n];
        x[n - 1] = b[n - 1] / d[n - 1];
        if n >= 2 {
            x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        Some(x)
    }
}

/// Total chain energy `Σ pot(x_i, x_{i+1})`.
pub fn energy<P: PairPotential + ?Sized>(pot: &P, cfg: &LatticeConfig) -> f64 {
    let x = cfg.coords();
    (0..cfg.n()).map(|i| pot.value(x[i], x[i + 1])).sum()
}

/// Gradient of the chain energy.
///
/// Site `0` only sees its right pair, site `n` only its left pair, and
/// interior sites get `∂₂` of the left pair plus `∂₁` of the right pair.
pub fn gradient<P: PairPotential + ?Sized>(pot: &P, cfg: &LatticeConfig) -> Vec<f64> {
    let x = cfg.coords();
    let n = cfg.n();
    let mut g = vec![0.0; n + 1];
    for i in 0..n {
        g[i] += pot.partial((1, 0), x[i], x[i + 1]);
        g[i + 1] += pot.partial((0, 1), x[i], x[i + 1]);
    }
    g
}

/// Tridiagonal Hessian of the chain energy.
pub fn hessian<P: PairPotential + ?Sized>(pot: &P, cfg: &LatticeConfig) -> TridiagHessian {
    let x = cfg.coords();
    let n = cfg.n();
    let mut diag = vec![0.0; n + 1];
    let mut offdiag = vec![0.0; n];
    for i in 0..n {
        diag[i] += pot.partial((2, 0), x[i], x[i + 1]);
        diag[i + 1] += pot.partial((0, 2), x[i], x[i + 1]);
        offdiag[i] = pot.partial((1, 1), x[i], x[i + 1]);
    }
    TridiagHessian { diag, offdiag }
}

/// Gradient and Hessian in one pass over the pairs.
pub fn gradient_and_hessian<P: PairPotential + ?Sized>(
    pot: &P,
    coords: &[f64],
) -> (Vec<f64>, TridiagHessian) {
    let n = coords.len() - 1;
    let mut g = vec![0.0; n + 1];
    let mut diag = vec![0.0; n + 1];
    let mut offdiag = vec![0.0; n];
    for i in 0..n {
        let jet = pot.jet2(coords[i], coords[i + 1]);
        g[i] += jet.d10;
        g[i + 1] += jet.d01;
        diag[i] += jet.d20;
        diag[i + 1] += jet.d02;
        offdiag[i] = jet.d11;
    }
    (g, TridiagHessian { diag, offdiag })
}

/// The Morse margin `max_i |∂f_n/∂x_i| + inf_{‖u‖=1} ‖Hess·u‖`.
///
/// Strictly positive at every point of a compact domain iff the energy is a
/// Morse function there.
pub fn morse_margin<P: PairPotential + ?Sized>(pot: &P, cfg: &LatticeConfig) -> f64 {
    let g = gradient(pot, cfg);
    let h = hessian(pot, cfg);
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    gmax + h.min_abs_eigenvalue()
}

/// Outcome of sampling the chain-rule estimates
/// `max_i |∂f_n/∂x_i| ≤ 2‖∇f‖∞` and `‖Hess·u‖ ≤ 5‖∇²f‖∞‖u‖`.
#[derive(Debug, Clone, Serialize)]
pub struct HessianEstimateReport {
    pub n: usize,
    pub trials: usize,
    /// Largest observed `max_i |∂f_n/∂x_i| / (2‖∇f‖∞)`.
    pub grad_ratio: f64,
    /// Largest observed `‖Hess·u‖ / (5‖∇²f‖∞)` over unit vectors `u`.
    pub hess_ratio: f64,
    /// Both denominators vanished (the zero potential); the inequalities
    /// hold vacuously.
    pub vacuous: bool,
}

/// Samples random torus configurations and unit vectors and checks the two
/// sup-norm estimates, with the norms bounded by coefficient sums.
pub fn verify_hessian_estimates(
    f: &TrigPotential,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<HessianEstimateReport, LatticeError> {
    assert!(n >= 1 && trials >= 1);
    let grad_bound = 2.0 * f.grad_sup_bound();
    let hess_bound = 5.0 * f.hess_sup_bound();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grad_ratio = 0.0f64;
    let mut hess_ratio = 0.0f64;

    for _ in 0..trials {
        let coords: Vec<f64> = (0..=n).map(|_| rng.random_range(0.0..TAU)).collect();
        let cfg = LatticeConfig::torus(coords.clone());
        let g = gradient(f, &cfg);
        let h = hessian(f, &cfg);

        let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if grad_bound > 0.0 {
            let r = gmax / grad_bound;
            if r > 1.0 + 1e-12 {
                return Err(LatticeError::EstimateViolation {
                    kind: EstimateKind::Gradient,
                    ratio: r,
                    witness: coords,
                });
            }
            grad_ratio = grad_ratio.max(r);
        } else if gmax > 1e-14 {
            return Err(LatticeError::EstimateViolation {
                kind: EstimateKind::Gradient,
                ratio: f64::INFINITY,
                witness: coords,
            });
        }

        let u = random_unit_vector(&mut rng, n + 1);
        let hu = h.matvec(&u);
        let norm = hu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if hess_bound > 0.0 {
            let r = norm / hess_bound;
            if r > 1.0 + 1e-12 {
                return Err(LatticeError::EstimateViolation {
                    kind: EstimateKind::Hessian,
                    ratio: r,
                    witness: coords,
                });
            }
            hess_ratio = hess_ratio.max(r);
        } else if norm > 1e-14 {
            return Err(LatticeError::EstimateViolation {
                kind: EstimateKind::Hessian,
                ratio: f64::INFINITY,
                witness: coords,
            });
        }
    }

    Ok(HessianEstimateReport {
        n,
        trials,
        grad_ratio,
        hess_ratio,
        vacuous: grad_bound == 0.0 && hess_bound == 0.0,
    })
}

/// Gaussian sampling (Box–Muller) normalized to the unit sphere.
fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim)
            .map(|_| {
                let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.random_range(0.0..TAU);
                (-2.0 * u1.ln()).sqrt() * u2.cos()
            })
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            return v;
        }
    }
}

//! The correspondence between generating functions and area-preserving
//! twist maps.
//!
//! A generating function `H` with `∂₁∂₂H > 0` defines a map `F = Φ(H)` by
//! `(x', y') = F(x, y)  ⟺  y = ∂₁H(x, x'), y' = −∂₂H(x, x')`.
//! The forward direction needs one monotone implicit solve per evaluation;
//! the reverse direction ([`recover_generating`]) rebuilds `H` from a
//! black-box map by integrating the closed one-form `g₁ dx + g₂ dx'`.

use serde::Serialize;
use thiserror::Error;

use crate::potentials::GeneratingFunction;

#[derive(Debug, Error)]
pub enum TwistError {
    /// `∂₁∂₂H > 0` could be certified neither by coefficients nor by dense
    /// sampling.
    #[error("twist condition not satisfied: coefficient margin {margin}, sampled minimum {sampled_min}")]
    TwistViolation { margin: f64, sampled_min: f64 },
    /// The monotone implicit solve did not reach its residual target; this
    /// signals a violated twist precondition rather than a tuning problem.
    #[error("implicit solve stalled: residual {residual} after {iters} iterations")]
    NonConvergence { residual: f64, iters: usize },
    /// The reconstructed one-form is not closed, so the sampled map is not
    /// area-preserving.
    #[error("one-form not closed at ({x}, {xp}): |d1 g2 - d2 g1| = {value}")]
    ClosednessViolation { x: f64, xp: f64, value: f64 },
}

/// Residual target of the implicit solves. One extra Newton step after
/// reaching it polishes the root to near machine precision.
const SOLVE_TOL: f64 = 1e-13;
const SOLVE_MAX_ITERS: usize = 100;

/// An area-preserving twist map backed by a generating function.
#[derive(Debug, Clone)]
pub struct TwistMap {
    source: GeneratingFunction,
    twist_margin: f64,
}

impl TwistMap {
    /// Wraps a generating function, certifying the twist condition.
    ///
    /// A positive coefficient margin is a global proof; otherwise a dense
    /// sample of `∂₁∂₂H` over one period square must stay positive, which
    /// accepts the map without certifying it.
    pub fn new(source: GeneratingFunction) -> Result<Self, TwistError> {
        let margin = source.twist_margin();
        if margin > 0.0 {
            return Ok(Self { source, twist_margin: margin });
        }
        let mut sampled_min = f64::INFINITY;
        let m = 64;
        for i in 0..m {
            for j in 0..m {
                let x = std::f64::consts::TAU * i as f64 / m as f64;
                let y = std::f64::consts::TAU * j as f64 / m as f64;
                sampled_min = sampled_min.min(source.eval_derivative((1, 1), (x, y)));
            }
        }
        if sampled_min > 0.0 {
            Ok(Self { source, twist_margin: margin })
        } else {
            Err(TwistError::TwistViolation { margin, sampled_min })
        }
    }

    pub fn generating(&self) -> &GeneratingFunction {
        &self.source
    }

    /// Cached `1 − Σ|amp·k·l|`; positive iff the twist is certified.
    pub fn twist_margin(&self) -> f64 {
        self.twist_margin
    }

    /// Solves `∂₁H(x, ·) = target` for the second argument.
    ///
    /// The map `x' ↦ ∂₁H(x, x')` is strictly increasing with derivative
    /// `∂₁∂₂H` and grows by `2π` per period, so a Newton iteration
    /// safeguarded by a sign-change bracket always converges.
    fn solve_second_arg(&self, x: f64, target: f64) -> Result<f64, TwistError> {
        let pad = self.source.a.abs() + self.source.periodic.sup_norm_bound((1, 0)) + 1.0;
        let (mut lo, mut hi) = (target - pad, target + pad);
        let mut xp = target - self.source.a;
        let residual = |xp: f64| self.source.eval_derivative((1, 0), (x, xp)) - target;
        let mut r = residual(xp);
        for iters in 0..SOLVE_MAX_ITERS {
            if r.abs() <= SOLVE_TOL * (1.0 + target.abs()) {
                // One clean-up step; the twist derivative is bounded away
                // from zero so this is safe even at the root.
                let slope = self.source.eval_derivative((1, 1), (x, xp));
                if slope > 0.0 {
                    xp -= residual(xp) / slope;
                }
                return Ok(xp);
            }
            if r > 0.0 {
                hi = hi.min(xp);
            } else {
                lo = lo.max(xp);
            }
            let slope = self.source.eval_derivative((1, 1), (x, xp));
            let newton = xp - r / slope;
            xp = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            r = residual(xp);
            if iters + 1 == SOLVE_MAX_ITERS {
                return Err(TwistError::NonConvergence { residual: r.abs(), iters: SOLVE_MAX_ITERS });
            }
        }
        unreachable!()
    }

    /// Solves `∂₂H(·, xp) = target` for the first argument.
    fn solve_first_arg(&self, xp: f64, target: f64) -> Result<f64, TwistError> {
        let pad = self.source.b.abs() + self.source.periodic.sup_norm_bound((0, 1)) + 1.0;
        let (mut lo, mut hi) = (target - pad, target + pad);
        let mut x = target - self.source.b;
        let residual = |x: f64| self.source.eval_derivative((0, 1), (x, xp)) - target;
        let mut r = residual(x);
        for iters in 0..SOLVE_MAX_ITERS {
            if r.abs() <= SOLVE_TOL * (1.0 + target.abs()) {
                let slope = self.source.eval_derivative((1, 1), (x, xp));
                if slope > 0.0 {
                    x -= residual(x) / slope;
                }
                return Ok(x);
            }
            if r > 0.0 {
                hi = hi.min(x);
            } else {
                lo = lo.max(x);
            }
            let slope = self.source.eval_derivative((1, 1), (x, xp));
            let newton = x - r / slope;
            x = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            r = residual(x);
            if iters + 1 == SOLVE_MAX_ITERS {
                return Err(TwistError::NonConvergence { residual: r.abs(), iters: SOLVE_MAX_ITERS });
            }
        }
        unreachable!()
    }

    /// `F(x, y)`.
    pub fn forward(&self, point: (f64, f64)) -> Result<(f64, f64), TwistError> {
        let (x, y) = point;
        let xp = self.solve_second_arg(x, y)?;
        let yp = -self.source.eval_derivative((0, 1), (x, xp));
        Ok((xp, yp))
    }

    /// `F⁻¹(x', y')`.
    pub fn inverse(&self, point: (f64, f64)) -> Result<(f64, f64), TwistError> {
        let (xp, yp) = point;
        let x = self.solve_first_arg(xp, -yp)?;
        let y = self.source.eval_derivative((1, 0), (x, xp));
        Ok((x, y))
    }

    /// Exact Jacobian `DF` by implicit differentiation; its determinant is
    /// one in exact arithmetic.
    pub fn jacobian(&self, point: (f64, f64)) -> Result<[[f64; 2]; 2], TwistError> {
        let (x, y) = point;
        let xp = self.solve_second_arg(x, y)?;
        Ok(self.jacobian_at_image(x, xp))
    }

    /// Forward image and Jacobian from a single implicit solve.
    pub fn forward_with_jacobian(&self, point: (f64, f64)) -> Result<((f64, f64), [[f64; 2]; 2]), TwistError> {
        let (x, y) = point;
        let xp = self.solve_second_arg(x, y)?;
        let yp = -self.source.eval_derivative((0, 1), (x, xp));
        Ok(((xp, yp), self.jacobian_at_image(x, xp)))
    }

    fn jacobian_at_image(&self, x: f64, xp: f64) -> [[f64; 2]; 2] {
        let s = self.source.eval_derivative((1, 1), (x, xp));
        let h11 = self.source.eval_derivative((2, 0), (x, xp));
        let h22 = self.source.eval_derivative((0, 2), (x, xp));
        let dxp_dx = -h11 / s;
        let dxp_dy = 1.0 / s;
        // y' = −∂₂H(x, x'(x,y)) by the chain rule.
        let dyp_dx = -s - h22 * dxp_dx;
        let dyp_dy = -h22 * dxp_dy;
        [[dxp_dx, dxp_dy], [dyp_dx, dyp_dy]]
    }
}

/// A generating function reconstructed on a rectangular grid.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratingTable {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major: `values[i * ys.len() + j] = H(xs[i], ys[j])`.
    pub values: Vec<f64>,
    /// Accumulated quadrature error estimate.
    pub quad_error: f64,
}

impl GeneratingTable {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.ys.len() + j]
    }

    /// Largest deviation from a reference function over the grid.
    pub fn max_deviation(&self, reference: impl Fn(f64, f64) -> f64) -> f64 {
        let mut worst = 0.0f64;
        for (i, &x) in self.xs.iter().enumerate() {
            for (j, &y) in self.ys.iter().enumerate() {
                worst = worst.max((self.value(i, j) - reference(x, y)).abs());
            }
        }
        worst
    }
}

/// Grid and tolerance choices for [`recover_generating`].
#[derive(Debug, Clone, Copy)]
pub struct RecoverOptions {
    pub nx: usize,
    pub ny: usize,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    /// Absolute tolerance per quadrature panel.
    pub panel_tol: f64,
    /// Closedness threshold on `|∂₁g₂ − ∂₂g₁|`.
    pub closedness_tol: f64,
}

impl Default for RecoverOptions {
    fn default() -> Self {
        Self {
            nx: 50,
            ny: 50,
            x_range: (0.0, std::f64::consts::TAU),
            y_range: (0.0, std::f64::consts::TAU),
            panel_tol: 1e-8,
            closedness_tol: 1e-6,
        }
    }
}

/// Reconstructs a generating function from a black-box twist map.
///
/// For each `(x, x')` the fiber solve `p₁(F(x, y)) = x'` yields
/// `g₁ = y` and `g₂ = −p₂(F(x, y))`; closedness of `g₁ dx + g₂ dx'` is the
/// sampled area-preservation check, and the table is the line integral from
/// the origin along axis-parallel paths, normalized to `H(0,0) = c`.
pub fn recover_generating(
    map: &dyn Fn(f64, f64) -> (f64, f64),
    c: f64,
    opts: &RecoverOptions,
) -> Result<GeneratingTable, TwistError> {
    let sampler = FiberSampler::new(map);

    // Closedness first: a non-area-preserving map must be rejected, not
    // integrated.
    let step = 1e-4;
    for i in 0..8 {
        for j in 0..8 {
            let x = opts.x_range.0 + (opts.x_range.1 - opts.x_range.0) * (i as f64 + 0.5) / 8.0;
            let xp = opts.y_range.0 + (opts.y_range.1 - opts.y_range.0) * (j as f64 + 0.5) / 8.0;
            let d1g2 = (sampler.g2(x + step, xp) - sampler.g2(x - step, xp)) / (2.0 * step);
            let d2g1 = (sampler.g1(x, xp + step) - sampler.g1(x, xp - step)) / (2.0 * step);
            let value = (d1g2 - d2g1).abs();
            if value > opts.closedness_tol {
                return Err(TwistError::ClosednessViolation { x, xp, value });
            }
        }
    }

    let xs = linspace(opts.x_range.0, opts.x_range.1, opts.nx);
    let ys = linspace(opts.y_range.0, opts.y_range.1, opts.ny);
    let mut values = vec![0.0; opts.nx * opts.ny];
    let mut quad_error = 0.0;

    // Horizontal leg along x' = 0, accumulated column by column.
    let mut axis = Vec::with_capacity(opts.nx);
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &x in &xs {
        let (v, e) = integrate(&|t| sampler.g1(t, 0.0), prev, x, opts.panel_tol);
        acc += v;
        quad_error += e;
        axis.push(acc);
        prev = x;
    }

    // Vertical legs, accumulated row by row within each column.
    for (i, &x) in xs.iter().enumerate() {
        let mut acc = axis[i];
        let mut prev = 0.0;
        for (j, &y) in ys.iter().enumerate() {
            let (v, e) = integrate(&|t| sampler.g2(x, t), prev, y, opts.panel_tol);
            acc += v;
            quad_error += e;
            values[i * opts.ny + j] = c + acc;
            prev = y;
        }
    }

    Ok(GeneratingTable { xs, ys, values, quad_error })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Fiber solves against a black-box twist map.
struct FiberSampler<'a> {
    map: &'a dyn Fn(f64, f64) -> (f64, f64),
}

impl<'a> FiberSampler<'a> {
    fn new(map: &'a dyn Fn(f64, f64) -> (f64, f64)) -> Self {
        Self { map }
    }

    /// The `y` with `p₁(F(x, y)) = xp`. Since `F − Θ` is periodic,
    /// `y ↦ p₁F(x, y)` is an increasing degree-one circle lift and a
    /// bracket of width a few periods always captures the root.
    fn solve_fiber(&self, x: f64, xp: f64) -> f64 {
        let f = |y: f64| (self.map)(x, y).0 - xp;
        let (mut lo, mut hi) = (xp - 1.0, xp + 1.0);
        let mut flo = f(lo);
        let mut fhi = f(hi);
        let mut guard = 0;
        while flo > 0.0 {
            lo -= std::f64::consts::TAU;
            flo = f(lo);
            guard += 1;
            assert!(guard < 64, "fiber bracket expansion ran away; map is not a twist map");
        }
        while fhi < 0.0 {
            hi += std::f64::consts::TAU;
            fhi = f(hi);
            guard += 1;
            assert!(guard < 64, "fiber bracket expansion ran away; map is not a twist map");
        }
        // Secant with bisection safeguard.
        let mut a = lo;
        let mut b = hi;
        let mut fa = flo;
        let mut fb = fhi;
        for _ in 0..200 {
            let mid = if (fb - fa).abs() > 1e-300 {
                let s = b - fb * (b - a) / (fb - fa);
                if s > a && s < b {
                    s
                } else {
                    0.5 * (a + b)
                }
            } else {
                0.5 * (a + b)
            };
            let fm = f(mid);
            if fm.abs() <= 1e-13 * (1.0 + xp.abs()) || (b - a) < 1e-15 * (1.0 + mid.abs()) {
                return mid;
            }
            if fm < 0.0 {
                a = mid;
                fa = fm;
            } else {
                b = mid;
                fb = fm;
            }
        }
        0.5 * (a + b)
    }

    fn g1(&self, x: f64, xp: f64) -> f64 {
        self.solve_fiber(x, xp)
    }

    fn g2(&self, x: f64, xp: f64) -> f64 {
        let y = self.solve_fiber(x, xp);
        -(self.map)(x, y).1
    }
}

// 5-point Gauss–Legendre nodes and weights on [-1, 1].
const GL5_NODES: [f64; 5] = [
    -0.906179845938663992797626878299,
    -0.538469310105683091036314420700,
    0.0,
    0.538469310105683091036314420700,
    0.906179845938663992797626878299,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236926885056189087514264040720,
    0.478628670499366468041291514836,
    0.568888888888888888888888888889,
    0.478628670499366468041291514836,
    0.236926885056189087514264040720,
];

fn gl5(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive composite Gauss–Legendre integration of `f` from `a` to `b`
/// (either orientation). Returns the value and an error estimate.
fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panel_tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> (f64, f64) {
        let whole = gl5(f, a, b);
        let mid = 0.5 * (a + b);
        let split = gl5(f, a, mid) + gl5(f, mid, b);
        let err = (whole - split).abs();
        if err <= tol || depth >= 18 {
            (split, err)
        } else {
            let (l, el) = panel(f, a, mid, 0.5 * tol, depth + 1);
            let (r, er) = panel(f, mid, b, 0.5 * tol, depth + 1);
            (l + r, el + er)
        }
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (v, e) = panel(f, lo, hi, panel_tol, 0);
    (sign * v, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{TrigPotential, TrigTerm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, TAU};

    fn pure_twist() -> TwistMap {
        TwistMap::new(GeneratingFunction::pure_twist()).unwrap()
    }

    fn cos_x_twist(eps: f64) -> TwistMap {
        let h = GeneratingFunction::new(0.0, 0.0, 0.0, TrigPotential::new(vec![TrigTerm::new(1, 0, eps, 0.0)]));
        TwistMap::new(h).unwrap()
    }

    fn random_twist(rng: &mut ChaCha8Rng, min_margin: f64) -> TwistMap {
        loop {
            let terms: Vec<TrigTerm> = (0..rng.random_range(1..4))
                .map(|_| {
                    TrigTerm::new(
                        rng.random_range(-2..=2),
                        rng.random_range(-2..=2),
                        rng.random_range(-0.2..0.2),
                        rng.random_range(-3.0..3.0),
                    )
                })
                .collect();
            let h = GeneratingFunction::new(
                rng.random_range(-0.5..0.5),
                rng.random_range(-0.5..0.5),
                rng.random_range(-1.0..1.0),
                TrigPotential::new(terms),
            );
            if h.twist_margin() > min_margin {
                return TwistMap::new(h).unwrap();
            }
        }
    }

    #[test]
    fn pure_twist_is_quarter_rotation() {
        let f = pure_twist();
        let (xp, yp) = f.forward((3.0, 5.0)).unwrap();
        assert!((xp - 5.0).abs() < 1e-12 && (yp + 3.0).abs() < 1e-12);
        let (x, y) = f.inverse((5.0, -3.0)).unwrap();
        assert!((x - 3.0).abs() < 1e-12 && (y - 5.0).abs() < 1e-12);
        let j = f.jacobian((0.3, -0.8)).unwrap();
        assert_eq!(j, [[0.0, 1.0], [-1.0, 0.0]]);
    }

    #[test]
    fn cosine_perturbation_has_closed_form() {
        // H = x·x' + ε·cos x gives x' = y + ε·sin x, y' = −x.
        let f = cos_x_twist(0.1);
        let (xp, yp) = f.forward((FRAC_PI_2, 0.0)).unwrap();
        assert!((xp - 0.1).abs() < 1e-12, "got {xp}");
        assert!((yp + FRAC_PI_2).abs() < 1e-12, "got {yp}");
        let (x, y) = f.inverse((0.1, -FRAC_PI_2)).unwrap();
        assert!((x - FRAC_PI_2).abs() < 1e-10 && y.abs() < 1e-10);
    }

    #[test]
    fn implicit_equation_fixed_point() {
        // H = x·x' + cos(x'): at (0, 0), ∂₁H = x' = 0, y' = −(0 − sin 0) = 0.
        let h = GeneratingFunction::new(0.0, 0.0, 0.0, TrigPotential::new(vec![TrigTerm::new(0, 1, 1.0, 0.0)]));
        let f = TwistMap::new(h).unwrap();
        let (xp, yp) = f.forward((0.0, 0.0)).unwrap();
        assert!(xp.abs() < 1e-12 && yp.abs() < 1e-12);
    }

    #[test]
    fn round_trip_and_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let f = random_twist(&mut rng, 0.2);
            for _ in 0..100 {
                let p = (rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0));
                let q = f.forward(p).unwrap();
                let back = f.inverse(q).unwrap();
                assert!((back.0 - p.0).abs() < 1e-10 && (back.1 - p.1).abs() < 1e-10);

                // F(p + m) − F(p) = Θ(m) for m ∈ (2πℤ)².
                let (mx, my) = (rng.random_range(-2..=2) as f64 * TAU, rng.random_range(-2..=2) as f64 * TAU);
                let shifted = f.forward((p.0 + mx, p.1 + my)).unwrap();
                assert!((shifted.0 - q.0 - my).abs() < 1e-9, "conjugation periodicity in x'");
                assert!((shifted.1 - q.1 + mx).abs() < 1e-9, "conjugation periodicity in y'");
            }
        }
    }

    #[test]
    fn jacobian_determinant_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let f = random_twist(&mut rng, 0.2);
            for _ in 0..100 {
                let p = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
                let j = f.jacobian(p).unwrap();
                let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                assert!((det - 1.0).abs() < 1e-10, "det {det}");
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let f = random_twist(&mut rng, 0.3);
            for _ in 0..20 {
                let (x, y) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let j = f.jacobian((x, y)).unwrap();
                let h = 1e-5;
                let fx_p = f.forward((x + h, y)).unwrap();
                let fx_m = f.forward((x - h, y)).unwrap();
                let fy_p = f.forward((x, y + h)).unwrap();
                let fy_m = f.forward((x, y - h)).unwrap();
                let fd = [
                    [(fx_p.0 - fx_m.0) / (2.0 * h), (fy_p.0 - fy_m.0) / (2.0 * h)],
                    [(fx_p.1 - fx_m.1) / (2.0 * h), (fy_p.1 - fy_m.1) / (2.0 * h)],
                ];
                for r in 0..2 {
                    for c in 0..2 {
                        assert!((j[r][c] - fd[r][c]).abs() < 1e-6, "entry ({r},{c}): {} vs {}", j[r][c], fd[r][c]);
                    }
                }
            }
        }
    }

    #[test]
    fn twist_derivative_of_image_matches_inverse_mixed_partial() {
        // ∂₂(p₁∘F) = 1/∂₁∂₂H at the image fiber, checked with a
        // Richardson-extrapolated central difference.
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let f = random_twist(&mut rng, 0.5);
        for _ in 0..50 {
            let (x, y) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let j = f.jacobian((x, y)).unwrap();
            let analytic = j[0][1];
            assert!(analytic > 0.0, "twist condition at the sample");
            let d = |h: f64| {
                let p = f.forward((x, y + h)).unwrap().0;
                let m = f.forward((x, y - h)).unwrap().0;
                (p - m) / (2.0 * h)
            };
            let h = 1e-3;
            let fd = (4.0 * d(0.5 * h) - d(h)) / 3.0;
            assert!((analytic - fd).abs() < 1e-10, "{analytic} vs {fd}");
        }
    }

    #[test]
    fn recover_pure_twist() {
        let f = pure_twist();
        let map = move |x: f64, y: f64| f.forward((x, y)).unwrap();
        let opts = RecoverOptions { nx: 21, ny: 21, ..Default::default() };
        let table = recover_generating(&map, 0.0, &opts).unwrap();
        let dev = table.max_deviation(|x, y| x * y);
        assert!(dev < 1e-8, "deviation {dev}");
    }

    #[test]
    fn recover_cosine_round_trip() {
        let f = cos_x_twist(0.1);
        let h = f.generating().clone();
        let c = h.value(0.0, 0.0);
        assert!((c - 0.1).abs() < 1e-15);
        let map = move |x: f64, y: f64| f.forward((x, y)).unwrap();
        let opts = RecoverOptions { nx: 21, ny: 21, ..Default::default() };
        let table = recover_generating(&map, c, &opts).unwrap();
        let dev = table.max_deviation(|x, y| h.value(x, y));
        assert!(dev < 1e-6, "deviation {dev}");
    }

    #[test]
    fn non_area_preserving_map_is_rejected() {
        // (x, y) ↦ (y, −x + 0.3·cos x) has Jacobian determinant 1 + 0.3·sin x.
        let map = |x: f64, y: f64| (y, -x + 0.3 * x.cos());
        let res = recover_generating(&map, 0.0, &RecoverOptions::default());
        match res {
            Err(TwistError::ClosednessViolation { value, .. }) => assert!(value > 1e-6),
            other => panic!("expected ClosednessViolation, got {other:?}"),
        }
    }

    #[test]
    fn twist_violation_detected() {
        // Large mixed term: ∂₁∂₂H = 1 − 3·cos(x+x') changes sign.
        let h = GeneratingFunction::new(0.0, 0.0, 0.0, TrigPotential::new(vec![TrigTerm::new(1, 1, 3.0, 0.0)]));
        match TwistMap::new(h) {
            Err(TwistError::TwistViolation { sampled_min, .. }) => assert!(sampled_min <= 0.0),
            other => panic!("expected TwistViolation, got {other:?}"),
        }
    }
}

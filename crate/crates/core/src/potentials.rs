//! Trigonometric potentials on the 2-torus and generating functions.
//!
//! Everything here is a finite cosine sum, so partial derivatives are exact
//! (a derivative just shifts the phase by a quarter turn) and sup-norms have
//! rigorous coefficient-sum bounds. Those one-sided bounds are what the
//! stability certificates are built on, so none of them may be replaced by
//! sampling.

use serde::{Deserialize, Serialize};

/// Highest partial-derivative order supported per variable.
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

/// One cosine term `amp · cos(k·x + l·y + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub k: i32,
    pub l: i32,
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

impl TrigTerm {
    pub fn new(k: i32, l: i32, amp: f64, phase: f64) -> Self {
        Self { k, l, amp, phase }
    }
}

/// A finite trigonometric polynomial on `(ℝ/2πℤ)²`.
///
/// The value and every partial derivative are `(2πℤ)²`-periodic term by
/// term.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrigPotential {
    pub terms: Vec<TrigTerm>,
}

/// Evaluates `cos(u + s·π/2)` without perturbing the argument.
#[inline]
fn cos_shifted(u: f64, quarter_turns: u32) -> f64 {
    match quarter_turns % 4 {
        0 => u.cos(),
        1 => -u.sin(),
        2 => -u.cos(),
        _ => u.sin(),
    }
}

#[inline]
fn int_pow(base: f64, exp: u32) -> f64 {
    base.powi(exp as i32)
}

impl TrigPotential {
    pub fn new(terms: Vec<TrigTerm>) -> Self {
        Self { terms }
    }

    /// The zero potential.
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    /// Exact partial derivative `∂ₓᵃ ∂ᵧᵇ p` at `point`.
    ///
    /// Each term differentiates to `amp·kᵃ·lᵇ·cos(kx+ly+phase+(a+b)π/2)`.
    /// Orders above [`MAX_DERIVATIVE_ORDER`] per variable are rejected.
    pub fn eval_derivative(&self, order: (u32, u32), point: (f64, f64)) -> f64 {
        let (a, b) = order;
        assert!(
            a <= MAX_DERIVATIVE_ORDER && b <= MAX_DERIVATIVE_ORDER,
            "derivative order ({a},{b}) exceeds cap {MAX_DERIVATIVE_ORDER}"
        );
        let (x, y) = point;
        self.terms
            .iter()
            .map(|t| {
                let u = t.k as f64 * x + t.l as f64 * y + t.phase;
                let factor = t.amp * int_pow(t.k as f64, a) * int_pow(t.l as f64, b);
                factor * cos_shifted(u, a + b)
            })
            .sum()
    }

    /// Coefficient-sum bound `Σ |amp|·|k|ᵃ·|l|ᵇ ≥ sup |∂ₓᵃ∂ᵧᵇ p|`.
    ///
    /// Never underestimates, which is what the certificates require.
    pub fn sup_norm_bound(&self, order: (u32, u32)) -> f64 {
        let (a, b) = order;
        self.terms
            .iter()
            .map(|t| t.amp.abs() * int_pow(t.k.unsigned_abs() as f64, a) * int_pow(t.l.unsigned_abs() as f64, b))
            .sum()
    }

    /// Coefficient-sum bound on the gradient sup-norm `max_i sup |∂_i p|`.
    pub fn grad_sup_bound(&self) -> f64 {
        self.sup_norm_bound((1, 0)).max(self.sup_norm_bound((0, 1)))
    }

    /// Coefficient-sum bound on the Hessian sup-norm `max_ij sup |∂_i∂_j p|`.
    pub fn hess_sup_bound(&self) -> f64 {
        self.sup_norm_bound((2, 0))
            .max(self.sup_norm_bound((1, 1)))
            .max(self.sup_norm_bound((0, 2)))
    }

    /// Scales every amplitude by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| TrigTerm { amp: s * t.amp, ..*t })
                .collect(),
        }
    }

    /// Term-wise difference `self − other`, merged to canonical form.
    ///
    /// Identical wavevectors cancel exactly, so `p.sub(&p)` has no terms and
    /// all its sup-norm bounds are zero.
    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|t| TrigTerm { amp: -t.amp, ..*t }));
        Self { terms }.merged()
    }

    /// Merges terms with the same wavevector into a single cosine.
    ///
    /// Uses `cos(kx+ly+φ) = cos(−kx−ly−φ)` to put every term on the
    /// half-lattice `k > 0 ∨ (k = 0 ∧ l ≥ 0)` and accumulates the
    /// quadrature components, so exact cancellations produce no term at all.
    pub fn merged(&self) -> Self {
        use std::collections::BTreeMap;
        // (k, l) -> (A, B) with the group summing to A·cos(u) − B·sin(u).
        let mut acc: BTreeMap<(i32, i32), (f64, f64)> = BTreeMap::new();
        for t in &self.terms {
            let flip = t.k < 0 || (t.k == 0 && t.l < 0);
            let (k, l, phase) = if flip { (-t.k, -t.l, -t.phase) } else { (t.k, t.l, t.phase) };
            let e = acc.entry((k, l)).or_insert((0.0, 0.0));
            e.0 += t.amp * phase.cos();
            e.1 += t.amp * phase.sin();
        }
        let scale: f64 = self.terms.iter().map(|t| t.amp.abs()).sum::<f64>().max(1.0);
        let terms = acc
            .into_iter()
            .filter_map(|((k, l), (aa, bb))| {
                let amp = aa.hypot(bb);
                if amp <= 1e-15 * scale {
                    None
                } else {
                    Some(TrigTerm { k, l, amp, phase: bb.atan2(aa) })
                }
            })
            .collect();
        Self { terms }
    }
}

/// One cosine term `amp · cos(k·x + phase)` of a function on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleTerm {
    pub k: i32,
    pub amp: f64,
    #[serde(default)]
    pub phase: f64,
}

/// A finite trigonometric polynomial on the circle `ℝ/2πℤ`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CircleFunction {
    pub terms: Vec<CircleTerm>,
}

impl CircleFunction {
    pub fn new(terms: Vec<CircleTerm>) -> Self {
        Self { terms }
    }

    /// `cos(x)`, the standard height function with two critical points.
    pub fn cosine() -> Self {
        Self { terms: vec![CircleTerm { k: 1, amp: 1.0, phase: 0.0 }] }
    }

    /// Exact derivative `h⁽ᵃ⁾(x)`.
    pub fn eval_derivative(&self, order: u32, x: f64) -> f64 {
        assert!(order <= MAX_DERIVATIVE_ORDER, "derivative order {order} exceeds cap");
        self.terms
            .iter()
            .map(|t| {
                let factor = t.amp * int_pow(t.k as f64, order);
                factor * cos_shifted(t.k as f64 * x + t.phase, order)
            })
            .sum()
    }

    /// Coefficient-sum bound `Σ |amp|·|k|ᵃ ≥ sup |h⁽ᵃ⁾|`.
    pub fn sup_norm_bound(&self, order: u32) -> f64 {
        self.terms
            .iter()
            .map(|t| t.amp.abs() * int_pow(t.k.unsigned_abs() as f64, order))
            .sum()
    }

    /// The separable potential `g(x,y) = h(x) + h(y)`.
    pub fn separable_sum(&self) -> TrigPotential {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            terms.push(TrigTerm { k: t.k, l: 0, amp: t.amp, phase: t.phase });
            terms.push(TrigTerm { k: 0, l: t.k, amp: t.amp, phase: t.phase });
        }
        TrigPotential { terms }
    }
}

/// A generating function `H(x,x') = x·x' + a·x + b·x' + c + P(x,x')`,
/// with `P` doubly periodic.
///
/// This is exactly the family for which both `∂₁H − x'` and `∂₂H − x` are
/// `(2πℤ)²`-periodic. The mixed second derivative is `1 + ∂₁∂₂P`, so
/// [`GeneratingFunction::twist_margin`] certifies the twist condition
/// globally whenever the periodic part is small enough.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "GeneratingFunctionRepr", into = "GeneratingFunctionRepr")]
pub struct GeneratingFunction {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub periodic: TrigPotential,
}

/// Wire format: the periodic part's terms are inlined next to a, b, c.
#[derive(Serialize, Deserialize)]
struct GeneratingFunctionRepr {
    #[serde(default)]
    a: f64,
    #[serde(default)]
    b: f64,
    #[serde(default)]
    c: f64,
    #[serde(default)]
    terms: Vec<TrigTerm>,
}

impl From<GeneratingFunctionRepr> for GeneratingFunction {
    fn from(r: GeneratingFunctionRepr) -> Self {
        Self { a: r.a, b: r.b, c: r.c, periodic: TrigPotential::new(r.terms) }
    }
}

impl From<GeneratingFunction> for GeneratingFunctionRepr {
    fn from(g: GeneratingFunction) -> Self {
        Self { a: g.a, b: g.b, c: g.c, terms: g.periodic.terms }
    }
}

impl GeneratingFunction {
    pub fn new(a: f64, b: f64, c: f64, periodic: TrigPotential) -> Self {
        Self { a, b, c, periodic }
    }

    /// The pure twist `H(x,x') = x·x'`, whose map is the quarter rotation.
    pub fn pure_twist() -> Self {
        Self::new(0.0, 0.0, 0.0, TrigPotential::zero())
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        x * y + self.a * x + self.b * y + self.c + self.periodic.eval_derivative((0, 0), (x, y))
    }

    /// Exact partial derivative `∂₁ᵃ ∂₂ᵇ H`.
    pub fn eval_derivative(&self, order: (u32, u32), point: (f64, f64)) -> f64 {
        let p = self.periodic.eval_derivative(order, point);
        let (x, y) = point;
        match order {
            (0, 0) => p + x * y + self.a * x + self.b * y + self.c,
            (1, 0) => p + y + self.a,
            (0, 1) => p + x + self.b,
            (1, 1) => p + 1.0,
            _ => p,
        }
    }

    /// `1 − Σ|amp·k·l|` over the periodic part.
    ///
    /// A positive return rigorously certifies `∂₁∂₂H > 0` everywhere; a
    /// nonpositive return only means "not certified by coefficients".
    pub fn twist_margin(&self) -> f64 {
        let sum: f64 = self
            .periodic
            .terms
            .iter()
            .map(|t| (t.amp * t.k as f64 * t.l as f64).abs())
            .sum();
        1.0 - sum
    }
}

/// All pair derivatives needed for one gradient-plus-Hessian evaluation.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairJet {
    pub d10: f64,
    pub d01: f64,
    pub d20: f64,
    pub d11: f64,
    pub d02: f64,
}

/// A two-site interaction with exact derivatives: the common face of
/// [`TrigPotential`] (torus chains) and [`GeneratingFunction`] (line chains).
pub trait PairPotential: Sync {
    fn value(&self, x: f64, y: f64) -> f64;

    /// Partial derivative `∂₁ᵃ∂₂ᵇ` at `(x, y)`; orders capped at
    /// [`MAX_DERIVATIVE_ORDER`] per variable.
    fn partial(&self, order: (u32, u32), x: f64, y: f64) -> f64;

    /// First and second derivatives in one pass. The default just calls
    /// [`PairPotential::partial`] five times; implementations override it
    /// with a shared-subexpression version since this dominates Newton
    /// iteration cost.
    fn jet2(&self, x: f64, y: f64) -> PairJet {
        PairJet {
            d10: self.partial((1, 0), x, y),
            d01: self.partial((0, 1), x, y),
            d20: self.partial((2, 0), x, y),
            d11: self.partial((1, 1), x, y),
            d02: self.partial((0, 2), x, y),
        }
    }
}

impl PairPotential for TrigPotential {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.eval_derivative((0, 0), (x, y))
    }

    fn partial(&self, order: (u32, u32), x: f64, y: f64) -> f64 {
        self.eval_derivative(order, (x, y))
    }

    fn jet2(&self, x: f64, y: f64) -> PairJet {
        let mut jet = PairJet::default();
        for t in &self.terms {
            let (k, l) = (t.k as f64, t.l as f64);
            let (s, c) = (k * x + l * y + t.phase).sin_cos();
            let (asin, acos) = (t.amp * s, t.amp * c);
            jet.d10 -= k * asin;
            jet.d01 -= l * asin;
            jet.d20 -= k * k * acos;
            jet.d11 -= k * l * acos;
            jet.d02 -= l * l * acos;
        }
        jet
    }
}

impl PairPotential for GeneratingFunction {
    fn value(&self, x: f64, y: f64) -> f64 {
        GeneratingFunction::value(self, x, y)
    }

    fn partial(&self, order: (u32, u32), x: f64, y: f64) -> f64 {
        self.eval_derivative(order, (x, y))
    }

    fn jet2(&self, x: f64, y: f64) -> PairJet {
        let mut jet = self.periodic.jet2(x, y);
        jet.d10 += y + self.a;
        jet.d01 += x + self.b;
        jet.d11 += 1.0;
        jet
    }
}

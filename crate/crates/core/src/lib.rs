//! Critical points of one-dimensional lattice energies.
//!
//! A chain of `n+1` sites with nearest-neighbor interaction `f` has total
//! energy `f_n(x) = Σ f(x_i, x_{i+1})`. This crate evaluates such energies,
//! counts and certifies their critical points, and exposes the twist-map
//! machinery that turns the counting problem into one-dimensional root
//! finding:
//!
//! - [`potentials`]: trigonometric potentials on the 2-torus and generating
//!   functions `H(x,x') = x·x' + a·x + b·x' + c + P(x,x')`.
//! - [`lattice_energy`]: energy, gradient, tridiagonal Hessian, and the
//!   Morse margin of a chain.
//! - [`twist_map`]: the correspondence between generating functions and
//!   area-preserving twist maps, in both directions.
//! - [`critical_counting`]: critical-point search by twist-map shooting and
//!   by multistart Newton, with Morse indices and growth rates.
//! - [`stability_certificate`]: quantitative certificates that pin the count
//!   at `d^{n+1}` for perturbations of separable potentials.
//! - [`tangency_lab`]: an explicit area-preserving map with a hyperbolic
//!   fixed point and a homoclinic connection, with its diagnostics.
//! - [`bezout_bounds`]: Bézout-type upper bounds and Morse-inequality lower
//!   bounds on the counts.

pub mod bezout_bounds;
pub mod critical_counting;
pub mod lattice_energy;
pub mod ode;
pub mod potentials;
pub mod stability_certificate;
pub mod tangency_lab;
pub mod twist_map;

pub use potentials::{CircleFunction, GeneratingFunction, PairPotential, TrigPotential, TrigTerm};

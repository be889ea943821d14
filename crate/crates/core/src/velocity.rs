//! Quadrature over the one-dimensional Maxwell distribution
//! (1/(u√π))·exp(−v²/u²) of axial velocities.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::hermite::GaussHermite;
use serde::{Deserialize, Serialize};

use crate::error::{require, Result};
use crate::model::{AtomModel, Environment};

/// How velocity nodes are placed.
///
/// Gauss–Hermite is exact for polynomial integrands but its node spacing
/// near v = 0 (≈ π·u/√(2n)) is far coarser than the homogeneous linewidth
/// for any practical n, so sharp Lorentzian velocity profiles are only
/// resolved by the uniformly spaced trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureRule {
    GaussHermite,
    /// Uniform nodes over ±half_span·u with normalized Maxwell weights.
    Trapezoid { half_span: f64 },
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::Trapezoid { half_span: 5.0 }
    }
}

pub const DEFAULT_VELOCITY_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    u: f64,
}

/// Gauss–Hermite grid for the thermal distribution of `env`.
pub fn make_velocity_grid(atom: &AtomModel, env: &Environment, n_nodes: usize) -> Result<VelocityGrid> {
    VelocityGrid::with_rule(atom, env, n_nodes, QuadratureRule::GaussHermite)
}

impl VelocityGrid {
    pub fn with_rule(
        atom: &AtomModel,
        env: &Environment,
        n_nodes: usize,
        rule: QuadratureRule,
    ) -> Result<Self> {
        atom.validate()?;
        env.validate()?;
        require(n_nodes >= 2, "n_nodes", n_nodes as f64, "must be >= 2")?;
        let u = env.most_probable_speed(atom);
        match rule {
            QuadratureRule::GaussHermite => Ok(Self::gauss_hermite(u, n_nodes)),
            QuadratureRule::Trapezoid { half_span } => {
                require(half_span > 0.0, "half_span", half_span, "must be > 0")?;
                Ok(Self::trapezoid(u, n_nodes, half_span))
            }
        }
    }

    /// Default production grid: 4096 trapezoid nodes over ±5u.
    pub fn thermal(atom: &AtomModel, env: &Environment) -> Result<Self> {
        Self::with_rule(atom, env, DEFAULT_VELOCITY_NODES, QuadratureRule::default())
    }

    fn gauss_hermite(u: f64, n: usize) -> Self {
        let rule = GaussHermite::new(NonZeroUsize::new(n).expect("n >= 2"));
        let mut pairs: Vec<(f64, f64)> = rule.iter().map(|(x, w)| (*x, *w)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Golub–Welsch nodes are symmetric only to rounding; enforce it.
        let n = pairs.len();
        for i in 0..n / 2 {
            let x = 0.5 * (pairs[n - 1 - i].0 - pairs[i].0);
            let w = 0.5 * (pairs[n - 1 - i].1 + pairs[i].1);
            pairs[i] = (-x, w);
            pairs[n - 1 - i] = (x, w);
        }
        if n % 2 == 1 {
            pairs[n / 2].0 = 0.0;
        }
        let norm = PI.sqrt();
        let nodes = pairs.iter().map(|p| u * p.0).collect();
        let mut weights: Vec<f64> = pairs.iter().map(|p| p.1 / norm).collect();
        renormalize(&mut weights);
        Self { nodes, weights, u }
    }

    fn trapezoid(u: f64, n: usize, half_span: f64) -> Self {
        let denom = (n - 1) as f64;
        let xs: Vec<f64> = (0..n)
            .map(|i| half_span * ((2 * i) as f64 - denom) / denom)
            .collect();
        let mut weights: Vec<f64> = xs.iter().map(|x| (-x * x).exp()).collect();
        renormalize(&mut weights);
        Self {
            nodes: xs.iter().map(|x| u * x).collect(),
            weights,
            u,
        }
    }

    /// A single node at rest carrying all the weight.
    pub fn at_rest(u: f64) -> Self {
        Self {
            nodes: vec![0.0],
            weights: vec![1.0],
            u,
        }
    }

    /// Arbitrary nodes and weights; weights are renormalized to sum to one.
    pub fn from_parts(nodes: Vec<f64>, mut weights: Vec<f64>, u: f64) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(crate::Error::InvalidInput(
                "velocity nodes and weights must be non-empty and of equal length".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(crate::Error::InvalidInput(
                "velocity nodes must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) || weights.iter().sum::<f64>() <= 0.0 {
            return Err(crate::Error::InvalidInput(
                "velocity weights must be non-negative with a positive sum".into(),
            ));
        }
        renormalize(&mut weights);
        Ok(Self { nodes, weights, u })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Most probable speed the grid was built for (m/s).
    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Σ w_i g(v_i) in ascending node order.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut g: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * g(*v))
            .sum()
    }
}

fn renormalize(weights: &mut [f64]) {
    let s: f64 = weights.iter().sum();
    for w in weights.iter_mut() {
        *w /= s;
    }
}

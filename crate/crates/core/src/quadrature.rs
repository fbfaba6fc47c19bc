//! Gauss–Legendre rules mapped to `[0, 1]` and graded partitions for
//! integrands with endpoint singularities.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Gauss–Legendre rule on the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl UnitRule {
    /// `points`-point rule; `points == 0` is promoted to 1.
    pub fn new(points: usize) -> Self {
        let degree = NonZeroUsize::new(points).unwrap_or(NonZeroUsize::MIN);
        let rule = GaussLegendre::new(degree);
        let (nodes, weights) = rule
            .nodes()
            .zip(rule.weights())
            .map(|(&x, &w)| (0.5 * (x + 1.0), 0.5 * w))
            .unzip();
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(node, weight)` pairs on `[0, 1]`.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `(node, weight)` pairs mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let len = b - a;
        self.pairs().map(move |(t, w)| (a + len * t, len * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over `pieces` (consecutive breakpoints).
    pub fn integrate_pieces(&self, pieces: &[f64], mut f: impl FnMut(f64) -> f64) -> f64 {
        pieces
            .windows(2)
            .map(|p| self.integrate(p[0], p[1], &mut f))
            .sum()
    }
}

/// Which end of an interval a graded partition refines toward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Toward {
    Left,
    Right,
}

/// Breakpoints of `[a, b]` with `levels` dyadic halvings toward one end,
/// e.g. `levels = 2` toward the left gives `a, a + L/4, a + L/2, b`.
pub fn graded_breakpoints(a: f64, b: f64, levels: u32, toward: Toward) -> Vec<f64> {
    let len = b - a;
    let mut fractions: Vec<f64> = (1..=levels).rev().map(|s| 0.5f64.powi(s as i32)).collect();
    fractions.insert(0, 0.0);
    fractions.push(1.0);
    match toward {
        Toward::Left => fractions.iter().map(|&t| a + len * t).collect(),
        Toward::Right => fractions.iter().rev().map(|&t| b - len * t).collect(),
    }
}

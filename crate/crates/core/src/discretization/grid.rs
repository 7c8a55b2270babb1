use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform nodes on `[1, R]`, endpoints included, with trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    outer_radius: T,
    nodes: Vec<T>,
    h: T,
    weights: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    pub fn new(n_r: usize, outer_radius: T) -> Result<Self> {
        if n_r < 3 {
            return Err(Error::TooFewPoints(n_r));
        }
        if !(outer_radius > T::one()) || !outer_radius.is_finite() {
            return Err(Error::BadDomain(format!(
                "outer radius {outer_radius} must exceed 1"
            )));
        }
        let h = (outer_radius - T::one()) / T::from_usize_lossy(n_r - 1);
        let mut nodes: Vec<T> = (0..n_r)
            .map(|i| T::one() + h * T::from_usize_lossy(i))
            .collect();
        nodes[n_r - 1] = outer_radius;
        let half = h / T::lit(2.0);
        let weights = (0..n_r)
            .map(|i| if i == 0 || i == n_r - 1 { half } else { h })
            .collect();
        Ok(Self {
            outer_radius,
            nodes,
            h,
            weights,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    #[inline]
    pub fn outer_radius(&self) -> T {
        self.outer_radius
    }

    #[inline]
    pub fn spacing(&self) -> T {
        self.h
    }

    #[inline]
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// Trapezoid weights for `int_1^R f dr`.
    #[inline]
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `r^p` sampled on the nodes, the usual radial weight.
    pub fn power(&self, p: T) -> Vec<T> {
        self.nodes.iter().map(|&r| r.powf(p)).collect()
    }
}

/// Uniform radial grid with `n_r` nodes on `[1, R]`.
pub fn build_grid<T: Real>(n_r: usize, outer_radius: T) -> Result<RadialGrid<T>> {
    RadialGrid::new(n_r, outer_radius)
}

//! Uniform node grid on [-d, d].
//!
//! N nodes x_i = -d + i·h with h = 2d/(N-1); the endpoints are nodes. Fluxes
//! live on the N+1 interfaces: the two domain ends plus the N-1 midpoints
//! between adjacent nodes. The control volume of an interior node spans the
//! two midpoints around it (width h); the boundary nodes own half cells
//! (width h/2), so the volume widths double as trapezoid quadrature weights
//! and sum exactly to 2d.

use crate::error::{Result, SolverError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    d: f64,
    nodes: usize,
}

impl Grid {
    pub fn new(d: f64, nodes: usize) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(SolverError::Validation(format!("half-width d must be positive, got {d}")));
        }
        if nodes < 3 {
            return Err(SolverError::Validation(format!("need at least 3 grid nodes, got {nodes}")));
        }
        Ok(Self { d, nodes })
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Interval length 2d.
    pub fn length(&self) -> f64 {
        2.0 * self.d
    }

    /// Node spacing h = 2d/(N-1).
    pub fn h(&self) -> f64 {
        2.0 * self.d / ((self.nodes - 1) as f64)
    }

    /// Position of node i.
    pub fn node(&self, i: usize) -> f64 {
        -self.d + self.h() * (i as f64)
    }

    /// Position of interface j, j = 0..=N: the domain ends for j = 0 and
    /// j = N, otherwise the midpoint between nodes j-1 and j.
    pub fn interface(&self, j: usize) -> f64 {
        if j == 0 {
            -self.d
        } else if j == self.nodes {
            self.d
        } else {
            -self.d + self.h() * (j as f64 - 0.5)
        }
    }

    /// Control-volume width of node i (h, halved at the two ends). These are
    /// the trapezoid weights of the discrete integral over [-d, d].
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.nodes - 1 {
            0.5 * self.h()
        } else {
            self.h()
        }
    }

    /// Trapezoid-weighted integral of a node field.
    pub fn integrate<'a, I: IntoIterator<Item = &'a f64>>(&self, values: I) -> f64 {
        crate::kahan::neumaier_sum(
            values.into_iter().enumerate().map(|(i, v)| self.weight(i) * v),
        )
    }

    /// Trapezoid-weighted mean of a node field.
    pub fn mean<'a, I: IntoIterator<Item = &'a f64>>(&self, values: I) -> f64 {
        self.integrate(values) / self.length()
    }
}

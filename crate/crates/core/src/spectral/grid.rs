use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic square `[-L/2, L/2)^2` sampled on `n x n` points.
///
/// Index `i` along an axis sits at `x_i = -L/2 + i*dx`; index `k` in the
/// transform carries the wavenumber `2*pi*k'/L` where `k'` is `k` folded
/// into `[-n/2, n/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid2D {
    n: usize,
    box_length: f64,
}

impl Grid2D {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!(
                "n must be a power of two and at least 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::Grid(format!(
                "box_length must be positive, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    /// Area of one cell, the weight of the rectangle rule.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        let dx = self.dx();
        dx * dx
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.dx()
    }

    /// Signed integer mode of transform index `k`.
    #[inline]
    pub fn mode(&self, k: usize) -> i64 {
        let half = (self.n / 2) as i64;
        let k = k as i64;
        if k < half {
            k
        } else {
            k - self.n as i64
        }
    }

    #[inline]
    pub fn wavenumber(&self, k: usize) -> f64 {
        2.0 * PI * self.mode(k) as f64 / self.box_length
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coord(i)).collect()
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.wavenumber(k)).collect()
    }

    /// `|xi|^2` on the full lattice, row-major.
    pub fn laplacian_symbol(&self) -> Vec<f64> {
        let xi = self.wavenumbers();
        let mut out = Vec::with_capacity(self.len());
        for a in &xi {
            for b in &xi {
                out.push(a * a + b * b);
            }
        }
        out
    }

    /// Grid with the same `n` and a box scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.box_length * factor)
    }

    /// Index of the point at the origin.
    #[inline]
    pub fn origin_index(&self) -> usize {
        self.n / 2
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.n == other.n && self.box_length.to_bits() == other.box_length.to_bits()
    }

    pub(crate) fn check_same(&self, other: &Grid2D) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "grid mismatch: ({}, {}) vs ({}, {})",
                self.n, self.box_length, other.n, other.box_length
            )))
        }
    }
}

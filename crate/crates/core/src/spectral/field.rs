use num_complex::Complex64;

use super::fft;
use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Which representation a [`Field`] currently holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Physical,
    /// Unnormalized DFT coefficients of the physical samples.
    Spectral,
}

/// Complex samples of a function on a [`Grid2D`], row-major with the `x2`
/// index varying fastest.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid2D,
    values: Vec<Complex64>,
    space: Space,
}

impl Field {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            space: Space::Physical,
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>, space: Space) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            space,
        })
    }

    /// Samples `f(x1, x2)` at every grid point.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let x = grid.coords();
        let mut values = Vec::with_capacity(grid.len());
        for &x1 in &x {
            for &x2 in &x {
                values.push(f(x1, x2));
            }
        }
        Self {
            grid,
            values,
            space: Space::Physical,
        }
    }

    pub fn from_real_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |a, b| Complex64::new(f(a, b), 0.0))
    }

    /// `amplitude * exp(-(x1^2/s1^2 + x2^2/s2^2)/2)`.
    pub fn gaussian(grid: Grid2D, amplitude: f64, width_x1: f64, width_x2: f64) -> Self {
        Self::from_real_fn(grid, |a, b| {
            amplitude * (-0.5 * (a * a / (width_x1 * width_x1) + b * b / (width_x2 * width_x2))).exp()
        })
    }

    #[inline]
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    #[inline]
    pub fn space(&self) -> Space {
        self.space
    }

    #[inline]
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n() + j]
    }

    pub fn into_spectral(mut self) -> Self {
        if self.space == Space::Physical {
            fft::forward(&mut self.values, self.grid.n());
            self.space = Space::Spectral;
        }
        self
    }

    pub fn into_physical(mut self) -> Self {
        if self.space == Space::Spectral {
            fft::inverse(&mut self.values, self.grid.n());
            self.space = Space::Physical;
        }
        self
    }

    pub fn to_spectral(&self) -> Self {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Self {
        self.clone().into_physical()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn sup_abs(&self) -> f64 {
        let phys;
        let vals = match self.space {
            Space::Physical => &self.values,
            Space::Spectral => {
                phys = self.to_physical();
                &phys.values
            }
        };
        vals.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Same grid, physical `|u|^2` as a real-valued field.
    pub fn density(&self) -> Field {
        let phys = self.to_physical();
        let values = phys
            .values
            .iter()
            .map(|v| Complex64::new(v.norm_sqr(), 0.0))
            .collect();
        Field {
            grid: self.grid,
            values,
            space: Space::Physical,
        }
    }

    pub fn scaled(&self, c: Complex64) -> Field {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `self - other` in physical space.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
        Ok(Field {
            grid: self.grid,
            values,
            space: Space::Physical,
        })
    }

    /// Continuous L2 norm by the rectangle rule.
    pub fn l2_norm(&self) -> f64 {
        super::functionals::mass(self).sqrt()
    }

    /// Returns the field with every sample multiplied by `exp(i*a*x1)`.
    pub fn phase_tilt_x1(&self, a: f64) -> Field {
        let phys = self.to_physical();
        let x = self.grid.coords();
        let n = self.grid.n();
        let mut out = phys;
        for (i, &x1) in x.iter().enumerate() {
            let rot = Complex64::from_polar(1.0, a * x1);
            for v in &mut out.values[i * n..(i + 1) * n] {
                *v *= rot;
            }
        }
        out
    }

    /// Cyclic shift by whole cells; `(s1, s2)` moves content toward larger indices.
    pub fn roll(&self, s1: isize, s2: isize) -> Field {
        let phys = self.to_physical();
        let n = self.grid.n() as isize;
        let mut values = vec![Complex64::new(0.0, 0.0); phys.values.len()];
        for i in 0..n {
            let ti = (i + s1).rem_euclid(n);
            for j in 0..n {
                let tj = (j + s2).rem_euclid(n);
                values[(ti * n + tj) as usize] = phys.values[(i * n + j) as usize];
            }
        }
        Field {
            grid: self.grid,
            values,
            space: Space::Physical,
        }
    }

    /// Largest `|Im|` relative to the field's RMS magnitude.
    pub(crate) fn relative_imag(&self) -> f64 {
        let rms = (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.values.len() as f64).sqrt();
        let max_im = self.values.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
        if rms == 0.0 {
            0.0
        } else {
            max_im / rms
        }
    }
}

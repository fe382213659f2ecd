//! Grid, field storage, FFTs, the nonlocal operators and the quadrature functionals.

pub mod fft;
mod field;
pub mod functionals;
mod grid;
pub mod interp;
pub mod operators;

pub use field::{Field, Space};
pub use functionals::{
    energy, first_moment, gradient_norm_sq, l4_norm_4, mass, quartic_term, second_moment,
    SecondMoment,
};
pub use grid::Grid2D;
pub use operators::{apply_b, apply_l, OperatorParams, ZeroMode};

/// `Delta u` evaluated spectrally.
pub fn laplacian(u: &Field) -> Field {
    let mut spec = u.to_spectral();
    operators::apply_symbol(&mut spec, |a, b| -(a * a + b * b), false);
    spec.into_physical()
}

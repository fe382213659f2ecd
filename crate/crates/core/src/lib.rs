//! Pseudo-spectral laboratory for the elliptic-elliptic Davey–Stewartson system
//!
//! `i u_t + Delta u + L(|u|^2) u = 0`, `L = nu I + gamma B`, where `B` is the
//! Fourier multiplier with symbol `xi1^2 / |xi|^2`.
//!
//! The crate computes ground states and the sharp Gagliardo–Nirenberg type
//! constant, time-steps the Cauchy problem with an exact-substep Strang
//! splitting, and measures blow-up and mass concentration on snapshots.

pub mod app;
pub mod concentration;
pub mod error;
pub mod evolution;
pub mod exact;
pub mod ground_state;
pub mod io;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use spectral::{Field, Grid2D, OperatorParams, Space};

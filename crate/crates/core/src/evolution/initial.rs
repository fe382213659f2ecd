//! Initial data with negative energy.

use crate::error::{Error, Result};
use crate::spectral::{energy, Field, Grid2D, OperatorParams};

/// Aspect ratios tried by [`negative_energy_gaussian`]; the profile is
/// `exp(-x1^2 k/2 - x2^2/(2k))`, narrow across `x1` so that its spectrum
/// sits where the symbol of `B` is close to 1.
pub const DEFAULT_ASPECTS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
const GROWTH: f64 = 1.25;
const MAX_AMPLITUDE: f64 = 1e4;

#[derive(Clone, Debug)]
pub struct NegativeEnergyData {
    pub field: Field,
    pub amplitude: f64,
    pub aspect: f64,
    pub energy: f64,
}

fn profile(grid: Grid2D, amplitude: f64, aspect: f64) -> Field {
    let s = aspect.sqrt();
    Field::gaussian(grid, amplitude, 1.0 / s, s)
}

/// Amplitude continuation `A <- 1.25 A` from `A = 1` for each aspect ratio
/// until `E < 0`. Returns `None` if nothing is found below `A = 1e4`.
pub fn search_negative_energy(
    grid: Grid2D,
    p: &OperatorParams,
    aspects: &[f64],
) -> Option<NegativeEnergyData> {
    for &aspect in aspects {
        let mut a = 1.0;
        while a <= MAX_AMPLITUDE {
            let field = profile(grid, a, aspect);
            let e = energy(&field, p);
            if e < 0.0 {
                return Some(NegativeEnergyData {
                    field,
                    amplitude: a,
                    aspect,
                    energy: e,
                });
            }
            a *= GROWTH;
        }
    }
    None
}

/// Negative-energy Gaussian for the blow-up experiments. Errors when
/// `-nu >= gamma`, where no such data exist.
pub fn negative_energy_gaussian(grid: Grid2D, p: &OperatorParams) -> Result<NegativeEnergyData> {
    if !p.admits_negative_energy() {
        return Err(Error::Domain(format!(
            "no negative-energy data exist for nu = {}, gamma = {} (need -nu < gamma)",
            p.nu(),
            p.gamma()
        )));
    }
    search_negative_energy(grid, p, &DEFAULT_ASPECTS).ok_or_else(|| {
        Error::Domain("amplitude continuation found no negative-energy Gaussian".into())
    })
}

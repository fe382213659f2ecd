use dsbu::evolution::{run, virial_check, DtPolicy, EvolveConfig, SimulationState, StopReason};
use dsbu::spectral::{energy, gradient_norm_sq, Field, Grid2D, OperatorParams};

// For a real Gaussian under the free flow, int |x|^2 |u|^2 = V0 + 4 G t^2 exactly,
// G = ||grad u0||^2, and the first moment of the current vanishes at t = 0.
#[test]
fn nearly_free_gaussian_second_moment_grows_at_four_g() {
    let g = Grid2D::new(128, 24.0).unwrap();
    let p = OperatorParams::new(1, 1.0).unwrap();
    let u0 = Field::gaussian(g, 1e-6, 1.0, 1.0);
    let g0 = gradient_norm_sq(&u0);
    let e0 = energy(&u0, &p);
    let cfg = EvolveConfig::new(g.dx(), 0.5, 0.025).with_dt(DtPolicy::Fixed(1.0 / 256.0));
    let out = run(SimulationState::new(u0, p), &cfg).unwrap();
    assert_eq!(out.stop, StopReason::Completed);
    let fit = virial_check(&out.records, e0).unwrap();
    assert!((fit.coeffs[2] / (4.0 * g0) - 1.0).abs() < 1e-6, "{:?} vs 4G = {}", fit.coeffs, 4.0 * g0);
    assert!(fit.coeffs[1].abs() < 1e-6 * g0);
    // in terms of E = G/2 - Q/4 the coefficient is 8E, twice the stated 4E
    assert!((fit.coeffs[2] / (8.0 * e0) - 1.0).abs() < 1e-6);
    assert!((fit.leading_coeff_error - 1.0).abs() < 1e-6);
}

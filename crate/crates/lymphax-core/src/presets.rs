//! Reference parameter set: a collecting lymphatic from rat mesentery.
//!
//! These are the defaults used by the scenario runner and the tests; every
//! value can be overridden per vessel or per valve.

use crate::efmc::EfmcParams;
use crate::units;
use crate::valve::ValveParams;
use crate::wall::{LymphProperties, TubeLawParams, VesselGeometry, VesselWall, WallStiffness};

/// Radius at zero transmural pressure (m).
pub const R0: f64 = 47.7e-6;
/// Wall thickness at zero transmural pressure (m), `0.3 r0`.
pub const H0: f64 = 0.3 * R0;
/// Lymphangion length (m).
pub const LENGTH: f64 = 1.5e-3;
/// Minimum (relaxed) Young modulus (Pa).
pub const E_MIN: f64 = 35_000.0;
/// Maximum (contracted) Young modulus (Pa).
pub const E_MAX: f64 = 135_000.0;
/// Poisson ratio.
pub const NU: f64 = 0.5;
/// Lymph density (kg/m^3).
pub const RHO: f64 = 998.0;
/// Lymph dynamic viscosity (Pa s), 1 cP.
pub const MU: f64 = 1.0e-3;
/// Velocity-profile parameter.
pub const GAMMA: f64 = 2.0;
/// Stretch-activation reference area as a multiple of `A0`.
pub const A_CA_OVER_A0: f64 = 7.75;

pub fn reference_geometry() -> VesselGeometry {
    VesselGeometry::new(R0, H0, LENGTH, 0.0).expect("reference geometry is valid")
}

pub fn reference_law() -> TubeLawParams {
    TubeLawParams::new(0.5, -5.0, 19.0, 1.0e-16).expect("reference tube law is valid")
}

pub fn reference_stiffness() -> WallStiffness {
    WallStiffness::new(E_MIN, E_MAX, NU).expect("reference stiffness is valid")
}

pub fn reference_wall() -> VesselWall {
    VesselWall::new(reference_geometry(), reference_stiffness(), reference_law())
}

pub fn reference_lymph() -> LymphProperties {
    LymphProperties::new(RHO, MU, GAMMA).expect("reference lymph properties are valid")
}

/// Contraction-model parameters with the stimulus growth rates calibrated to
/// `f_min = 3 /min` and `f_Ca = 20 /min`.
pub fn reference_efmc() -> EfmcParams {
    let a0 = reference_geometry().a0;
    EfmcParams::builder()
        .fhn(100.0, 0.5, 25.0, 3.0, 0.0)
        .contraction_rates(110.0, 3.0)
        .activation(0.1, 10.0)
        .stretch(10.0, A_CA_OVER_A0 * a0)
        .shear_inhibition(0.8, units::dyne_cm2_to_pa(6.0), 1.2)
        .frequencies(units::per_min_to_hz(3.0), units::per_min_to_hz(20.0), 2.0)
        .build()
        .expect("reference EFMC parameters are valid")
}

/// Healthy valve between (or at the end of) reference lymphangions.
pub fn reference_valve(a0_ref: f64) -> ValveParams {
    ValveParams::new(10.0, 10.0, 0.0, 0.0, 1.0, 0.0, 0.1e-3, a0_ref)
        .expect("reference valve parameters are valid")
}

//! Unit conversions.
//!
//! All model state is SI internally (m, s, kg, Pa). Experimental inputs and
//! report outputs use the conventional lymphatic units (cmH2O, um, uL/min,
//! uL/h, nL, dyne/cm2); conversions are centralised here so no factor is ever
//! typed twice.

/// Pascal per centimetre of water.
pub const PA_PER_CMH2O: f64 = 98.0665;

/// Pascal per dyne/cm2.
pub const PA_PER_DYNE_CM2: f64 = 0.1;

/// Dynamic viscosity: Pa.s per centipoise.
pub const PA_S_PER_CP: f64 = 1.0e-3;

pub fn cmh2o_to_pa(p: f64) -> f64 {
    p * PA_PER_CMH2O
}

pub fn pa_to_cmh2o(p: f64) -> f64 {
    p / PA_PER_CMH2O
}

pub fn dyne_cm2_to_pa(t: f64) -> f64 {
    t * PA_PER_DYNE_CM2
}

pub fn pa_to_dyne_cm2(t: f64) -> f64 {
    t / PA_PER_DYNE_CM2
}

pub fn um_to_m(x: f64) -> f64 {
    x * 1.0e-6
}

pub fn m_to_um(x: f64) -> f64 {
    x * 1.0e6
}

/// Flow: m3/s to uL/min.
pub fn m3s_to_ul_min(q: f64) -> f64 {
    q * 6.0e10
}

/// Flow: m3/s to uL/h.
pub fn m3s_to_ul_h(q: f64) -> f64 {
    q * 3.6e12
}

/// Volume: m3 to nL.
pub fn m3_to_nl(v: f64) -> f64 {
    v * 1.0e12
}

/// Frequency: Hz to 1/min.
pub fn hz_to_per_min(f: f64) -> f64 {
    f * 60.0
}

pub fn per_min_to_hz(f: f64) -> f64 {
    f / 60.0
}

/// Velocity: m/s to mm/s.
pub fn ms_to_mm_s(u: f64) -> f64 {
    u * 1.0e3
}

/// Stroke work: Pa.m3 to nL.cmH2O.
pub fn pam3_to_nl_cmh2o(w: f64) -> f64 {
    m3_to_nl(w) / PA_PER_CMH2O
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    #[test]
    fn round_trips() {
        assert_relative_eq!(super::pa_to_cmh2o(super::cmh2o_to_pa(3.7)), 3.7);
        assert_relative_eq!(super::cmh2o_to_pa(1.0), 98.0665);
        assert_relative_eq!(super::dyne_cm2_to_pa(6.0), 0.6);
        // 1 uL/min = 1e-9/60 m3/s
        assert_relative_eq!(super::m3s_to_ul_min(1.0e-9 / 60.0), 1.0);
        assert_relative_eq!(super::m3s_to_ul_h(1.0e-9 / 3600.0), 1.0);
    }
}

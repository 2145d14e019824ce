//! Tube law and wall mechanics of a single lymphangion.
//!
//! The closure between pressure and cross-sectional area is
//!
//! ```text
//! p = K(s) * psi(A; A0) + p_e
//! psi(a) = a^m - a^n + C (a^z - 1),       a = A / A0
//! K(s)   = E(s) / (12 (1 - nu^2)) * (h0 / r0)^3
//! E(s)   = E_min + s (E_max - E_min),     s in [0, 1]
//! ```
//!
//! with `m >= 0`, `n <= 0`, `z >= 0`, `C >= 0`, so `psi` is strictly
//! increasing and the squared wave speed `c^2 = (K/rho) [m a^m - n a^n +
//! C z a^z]` is always non-negative. The contraction state `s` stiffens the
//! wall between the relaxed and contracted Young moduli.

use crate::math::{FastPow, FloatExt};
use crate::{ParamError, SimError};

/// Exponents and coefficient of the elastic tube law.
#[derive(Debug, Clone, Copy)]
pub struct TubeLawParams {
    pub m: f64,
    pub n: f64,
    pub z: f64,
    pub c: f64,
    pow_m: FastPow,
    pow_n: FastPow,
    pow_z: FastPow,
    pow_m1: FastPow,
    pow_z1: FastPow,
    /// Antiderivative term for the `n` exponent: `-n/(n+1) a^(n+1)`, or
    /// `ln a` when `n = -1`.
    n_term: FluxTerm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum FluxTerm {
    Pow { coef: f64, pow: FastPow },
    Log,
}

impl TubeLawParams {
    pub fn new(m: f64, n: f64, z: f64, c: f64) -> Result<Self, ParamError> {
        if !(m >= 0.0) {
            return Err(ParamError::new("m", "must be >= 0", m));
        }
        if !(n <= 0.0) {
            return Err(ParamError::new("n", "must be <= 0", n));
        }
        if !(z >= 0.0) {
            return Err(ParamError::new("z", "must be >= 0", z));
        }
        if !(c >= 0.0) {
            return Err(ParamError::new("C", "must be >= 0", c));
        }
        let n_term = if n == -1.0 {
            FluxTerm::Log
        } else {
            FluxTerm::Pow {
                coef: -n / (n + 1.0),
                pow: FastPow::new(n + 1.0),
            }
        };
        Ok(Self {
            m,
            n,
            z,
            c,
            pow_m: FastPow::new(m),
            pow_n: FastPow::new(n),
            pow_z: FastPow::new(z),
            pow_m1: FastPow::new(m + 1.0),
            pow_z1: FastPow::new(z + 1.0),
            n_term,
        })
    }

    /// `psi(a) = a^m - a^n + C (a^z - 1)` for `a = A/A0 > 0`.
    #[inline]
    pub fn psi(&self, a: f64) -> f64 {
        self.pow_m.eval(a) - self.pow_n.eval(a) + self.c * (self.pow_z.eval(a) - 1.0)
    }

    /// `d psi / d a = m a^(m-1) - n a^(n-1) + C z a^(z-1)`.
    #[inline]
    pub fn dpsi_da(&self, a: f64) -> f64 {
        self.wave_bracket(a) / a
    }

    /// `m a^m - n a^n + C z a^z`; `c^2 = (K/rho) * wave_bracket(a)`.
    /// Non-negative for any admissible parameter set.
    #[inline]
    pub fn wave_bracket(&self, a: f64) -> f64 {
        self.m * self.pow_m.eval(a) - self.n * self.pow_n.eval(a)
            + self.c * self.z * self.pow_z.eval(a)
    }

    /// Antiderivative `B(a)` with `B'(a) = wave_bracket(a)`; the momentum
    /// flux is `q^2/A + (K/rho) A0 B(A/A0)` (integration constant dropped).
    #[inline]
    pub fn flux_bracket(&self, a: f64) -> f64 {
        let m_term = self.m / (self.m + 1.0) * self.pow_m1.eval(a);
        let z_term = self.c * self.z / (self.z + 1.0) * self.pow_z1.eval(a);
        let n_term = match self.n_term {
            FluxTerm::Pow { coef, pow } => coef * pow.eval(a),
            FluxTerm::Log => a.ln_(),
        };
        m_term + n_term + z_term
    }

    /// Locus function of genuine nonlinearity:
    /// `G(a) = m(m+2) a^m - n(n+2) a^n + C z (z+2) a^z`.
    /// Where `G != 0` both characteristic fields are genuinely nonlinear.
    #[inline]
    pub fn genuine_nonlinearity(&self, a: f64) -> f64 {
        self.m * (self.m + 2.0) * self.pow_m.eval(a)
            - self.n * (self.n + 2.0) * self.pow_n.eval(a)
            + self.c * self.z * (self.z + 2.0) * self.pow_z.eval(a)
    }

    /// True if `psi` is constant (all terms degenerate), i.e. not invertible.
    fn is_degenerate(&self) -> bool {
        self.m == 0.0 && self.n == 0.0 && self.c * self.z == 0.0
    }
}

/// Geometry of one lymphangion at zero transmural pressure.
#[derive(Debug, Clone, Copy)]
pub struct VesselGeometry {
    /// Radius at zero transmural pressure (m).
    pub r0: f64,
    /// Wall thickness at zero transmural pressure (m).
    pub h0: f64,
    /// Cross-sectional area at equilibrium (m^2), `pi r0^2`.
    pub a0: f64,
    /// Lymphangion length (m).
    pub length: f64,
    /// External pressure (Pa).
    pub p_e: f64,
}

impl VesselGeometry {
    pub fn new(r0: f64, h0: f64, length: f64, p_e: f64) -> Result<Self, ParamError> {
        if !(r0 > 0.0) {
            return Err(ParamError::new("r0", "must be > 0", r0));
        }
        if !(h0 > 0.0) {
            return Err(ParamError::new("h0", "must be > 0", h0));
        }
        if !(length > 0.0) {
            return Err(ParamError::new("length", "must be > 0", length));
        }
        Ok(Self {
            r0,
            h0,
            a0: core::f64::consts::PI * r0 * r0,
            length,
            p_e,
        })
    }
}

/// Relaxed/contracted Young moduli and Poisson ratio.
#[derive(Debug, Clone, Copy)]
pub struct WallStiffness {
    pub e_min: f64,
    pub e_max: f64,
    pub nu: f64,
}

impl WallStiffness {
    pub fn new(e_min: f64, e_max: f64, nu: f64) -> Result<Self, ParamError> {
        if !(e_min > 0.0) {
            return Err(ParamError::new("E_min", "must be > 0", e_min));
        }
        if !(e_max >= e_min) {
            return Err(ParamError::new("E_max", "must be >= E_min", e_max));
        }
        if !(0.0..1.0).contains(&nu) {
            return Err(ParamError::new("nu", "must be in [0, 1)", nu));
        }
        Ok(Self { e_min, e_max, nu })
    }
}

/// Bulk properties of lymph and the velocity-profile parameter.
///
/// The friction force per unit length is `f = 2 (gamma + 2) pi mu u` and the
/// Coriolis coefficient `alpha` is fixed to 1.
#[derive(Debug, Clone, Copy)]
pub struct LymphProperties {
    /// Density (kg/m^3).
    pub rho: f64,
    /// Dynamic viscosity (Pa s).
    pub mu: f64,
    /// Velocity-profile parameter (2 for a parabolic profile).
    pub gamma: f64,
    /// Coriolis coefficient, fixed to 1.
    pub alpha: f64,
}

impl LymphProperties {
    pub fn new(rho: f64, mu: f64, gamma: f64) -> Result<Self, ParamError> {
        if !(rho > 0.0) {
            return Err(ParamError::new("rho", "must be > 0", rho));
        }
        if !(mu >= 0.0) {
            return Err(ParamError::new("mu", "must be >= 0", mu));
        }
        if !(gamma > 0.0) {
            return Err(ParamError::new("gamma", "must be > 0", gamma));
        }
        Ok(Self {
            rho,
            mu,
            gamma,
            alpha: 1.0,
        })
    }

    /// Friction coefficient `2 (gamma + 2) pi mu` (Pa s).
    #[inline]
    pub fn friction_coef(&self) -> f64 {
        2.0 * (self.gamma + 2.0) * core::f64::consts::PI * self.mu
    }
}

/// Complete wall description of one lymphangion.
#[derive(Debug, Clone, Copy)]
pub struct VesselWall {
    pub geometry: VesselGeometry,
    pub stiffness: WallStiffness,
    pub law: TubeLawParams,
    /// `(h0/r0)^3 / (12 (1 - nu^2))`, so that `K(s) = E(s) * k_geom`.
    k_geom: f64,
}

impl VesselWall {
    pub fn new(
        geometry: VesselGeometry,
        stiffness: WallStiffness,
        law: TubeLawParams,
    ) -> Self {
        let ratio = geometry.h0 / geometry.r0;
        let k_geom = ratio * ratio * ratio / (12.0 * (1.0 - stiffness.nu * stiffness.nu));
        Self {
            geometry,
            stiffness,
            law,
            k_geom,
        }
    }

    /// Contraction-modulated stiffness `K(s)` (Pa). Monotone nondecreasing
    /// in `s`; `K(1)/K(0) = E_max/E_min`.
    pub fn stiffness_k(&self, s: f64) -> Result<f64, SimError> {
        if !(0.0..=1.0).contains(&s) {
            return Err(SimError::Domain {
                op: "stiffness_k",
                what: "s",
                value: s,
            });
        }
        Ok(self.stiffness_k_unchecked(s))
    }

    #[inline]
    pub(crate) fn stiffness_k_unchecked(&self, s: f64) -> f64 {
        let e = self.stiffness.e_min + s * (self.stiffness.e_max - self.stiffness.e_min);
        e * self.k_geom
    }

    /// Tube-law pressure `p = K(s) psi(A/A0) + p_e` (Pa).
    pub fn pressure(&self, area: f64, s: f64) -> Result<f64, SimError> {
        if !(area > 0.0) {
            return Err(SimError::Domain {
                op: "pressure",
                what: "A",
                value: area,
            });
        }
        let k = self.stiffness_k(s)?;
        Ok(k * self.law.psi(area / self.geometry.a0) + self.geometry.p_e)
    }

    /// Wave speed `c = sqrt((K/rho) [m a^m - n a^n + C z a^z])` (m/s).
    pub fn wave_speed(&self, area: f64, s: f64, rho: f64) -> Result<f64, SimError> {
        if !(area > 0.0) {
            return Err(SimError::Domain {
                op: "wave_speed",
                what: "A",
                value: area,
            });
        }
        let k = self.stiffness_k(s)?;
        Ok((k / rho * self.law.wave_bracket(area / self.geometry.a0)).sqrt_())
    }

    /// Invert the tube law: the unique `A` with `pressure(A, s) = p`.
    ///
    /// Safeguarded Newton within a bracket that starts at
    /// `[1e-6 A0, 1e3 A0]` and expands geometrically. With `n = 0` the law is
    /// bounded below and pressures beneath the bound are reported out of
    /// range.
    pub fn area_from_pressure(&self, p: f64, s: f64) -> Result<f64, SimError> {
        let k = self.stiffness_k(s)?;
        let law = &self.law;
        if law.is_degenerate() {
            return if p == self.geometry.p_e {
                Ok(self.geometry.a0)
            } else {
                Err(SimError::OutOfRange {
                    op: "area_from_pressure",
                    value: p,
                })
            };
        }
        let target = (p - self.geometry.p_e) / k;

        // Bracket in a = A/A0, expanded geometrically when needed.
        let mut lo = 1.0e-6;
        let mut hi = 1.0e3;
        while law.psi(lo) > target {
            lo *= 0.1;
            if lo < 1.0e-30 {
                return Err(SimError::OutOfRange {
                    op: "area_from_pressure",
                    value: p,
                });
            }
        }
        while law.psi(hi) < target {
            hi *= 10.0;
            if hi > 1.0e30 {
                return Err(SimError::OutOfRange {
                    op: "area_from_pressure",
                    value: p,
                });
            }
        }

        // Newton with bisection safeguard on the monotone psi.
        let mut a = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = law.psi(a) - target;
            if f > 0.0 {
                hi = a;
            } else {
                lo = a;
            }
            let df = law.dpsi_da(a);
            let mut next = if df > 0.0 { a - f / df } else { a };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - a).abs_();
            a = next;
            if step <= 1.0e-14 * a || hi - lo <= 1.0e-14 * a {
                return Ok(a * self.geometry.a0);
            }
        }
        Err(SimError::Convergence {
            op: "area_from_pressure",
            iterations: 200,
            residual: law.psi(a) - target,
        })
    }

    /// [`Self::area_from_pressure`] warm-started from a previous solution.
    /// Plain Newton from the guess, falling back to the bracketed solve.
    pub fn area_from_pressure_with_guess(
        &self,
        p: f64,
        s: f64,
        guess: f64,
    ) -> Result<f64, SimError> {
        if guess.is_finite() && guess > 0.0 && !self.law.is_degenerate() {
            let k = self.stiffness_k(s)?;
            let target = (p - self.geometry.p_e) / k;
            let law = &self.law;
            let mut a = guess / self.geometry.a0;
            for _ in 0..25 {
                let f = law.psi(a) - target;
                let df = law.dpsi_da(a);
                if !(df > 0.0) {
                    break;
                }
                let next = a - f / df;
                if !(next > 0.0) || !next.is_finite() {
                    break;
                }
                let step = (next - a).abs_();
                a = next;
                if step <= 1.0e-13 * a {
                    return Ok(a * self.geometry.a0);
                }
            }
        }
        self.area_from_pressure(p, s)
    }
}

/// Wall state of one lymphangion frozen at a contraction level, bundled with
/// the fluid properties. One is built per vessel per time step; all flux,
/// wave-speed and boundary evaluations go through it.
#[derive(Debug, Clone, Copy)]
pub struct TubeContext<'a> {
    pub law: &'a TubeLawParams,
    /// Equilibrium area (m^2).
    pub a0: f64,
    /// Stiffness at the frozen contraction state (Pa).
    pub k: f64,
    /// `K / rho` (m^2/s^2).
    pub k_over_rho: f64,
    /// External pressure (Pa).
    pub p_e: f64,
    /// Friction coefficient over density, `2 (gamma+2) pi mu / rho` (m^2/s).
    pub friction_over_rho: f64,
}

impl<'a> TubeContext<'a> {
    pub fn new(wall: &'a VesselWall, s: f64, props: &LymphProperties) -> Self {
        let k = wall.stiffness_k_unchecked(s.clamp(0.0, 1.0));
        Self {
            law: &wall.law,
            a0: wall.geometry.a0,
            k,
            k_over_rho: k / props.rho,
            p_e: wall.geometry.p_e,
            friction_over_rho: props.friction_coef() / props.rho,
        }
    }

    /// Tube-law pressure at area `A` (Pa).
    #[inline]
    pub fn pressure_of(&self, area: f64) -> f64 {
        self.k * self.law.psi(area / self.a0) + self.p_e
    }

    /// Wave speed at area `A` (m/s).
    #[inline]
    pub fn wave_speed_of(&self, area: f64) -> f64 {
        (self.k_over_rho * self.law.wave_bracket(area / self.a0)).sqrt_()
    }

    /// Density-normalised internal pressure force `P(A)` in the momentum
    /// flux `F2 = q^2/A + P(A)`; `dP/dA = c^2`.
    #[inline]
    pub fn pressure_potential(&self, area: f64) -> f64 {
        self.k_over_rho * self.a0 * self.law.flux_bracket(area / self.a0)
    }

    /// Physical flux `(q, q^2/A + P(A))`.
    #[inline]
    pub fn flux(&self, area: f64, flow: f64) -> (f64, f64) {
        (flow, flow * flow / area + self.pressure_potential(area))
    }
}

/// Wall shear stress `tau = -u mu (gamma + 2) / r` (Pa), with `u = q/A` and
/// `r = sqrt(A/pi)`. Odd in `q`; opposes the flow direction.
pub fn wall_shear_stress(area: f64, flow: f64, props: &LymphProperties) -> Result<f64, SimError> {
    if !(area > 0.0) {
        return Err(SimError::Domain {
            op: "wall_shear_stress",
            what: "A",
            value: area,
        });
    }
    Ok(wall_shear_stress_unchecked(area, flow, props))
}

#[inline]
pub(crate) fn wall_shear_stress_unchecked(area: f64, flow: f64, props: &LymphProperties) -> f64 {
    let u = flow / area;
    let r = (area / core::f64::consts::PI).sqrt_();
    -u * props.mu * (props.gamma + 2.0) / r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::units;
    use approx::assert_relative_eq;

    fn table_law() -> TubeLawParams {
        TubeLawParams::new(0.5, -5.0, 19.0, 1.0e-16).unwrap()
    }

    fn table_wall() -> VesselWall {
        presets::reference_wall()
    }

    #[test]
    fn psi_vanishes_at_equilibrium() {
        assert_eq!(table_law().psi(1.0), 0.0);
    }

    #[test]
    fn psi_at_four_a0_matches_direct_evaluation() {
        // Independent route: plain powf arithmetic.
        let a: f64 = 4.0;
        let expected = a.powf(0.5) - a.powf(-5.0) + 1.0e-16 * (a.powf(19.0) - 1.0);
        assert_relative_eq!(table_law().psi(a), expected, max_relative = 1e-14);
        assert_relative_eq!(table_law().psi(a), 1.99905, max_relative = 1e-5);
    }

    #[test]
    fn psi_diverges_to_minus_infinity_for_small_area() {
        let law = table_law();
        let mut prev = law.psi(1.0e-2);
        for k in 3..10 {
            let cur = law.psi(10f64.powi(-k));
            assert!(cur < prev);
            prev = cur;
        }
        assert!(prev < -1.0e9);
    }

    #[test]
    fn psi_strictly_increasing_under_sign_constraints() {
        // Sampled monotonicity over several admissible parameter sets.
        let laws = [
            table_law(),
            TubeLawParams::new(10.0, -1.5, 0.0, 0.0).unwrap(),
            TubeLawParams::new(0.0, -1.0, 2.0, 0.3).unwrap(),
            TubeLawParams::new(2.0, 0.0, 7.5, 1.0).unwrap(),
        ];
        for law in &laws {
            let mut prev = f64::NEG_INFINITY;
            for i in 0..1000 {
                // log grid over a in [1e-2, 1e2]
                let a = 10f64.powf(-2.0 + 4.0 * i as f64 / 999.0);
                let cur = law.psi(a);
                assert!(cur > prev, "psi not increasing at a={a}");
                prev = cur;
            }
        }
    }

    #[test]
    fn stiffness_matches_reference_values() {
        let wall = table_wall();
        assert_relative_eq!(wall.stiffness_k(0.0).unwrap(), 105.0, max_relative = 1e-12);
        assert_relative_eq!(wall.stiffness_k(1.0).unwrap(), 405.0, max_relative = 1e-12);
        // ratio is exact by construction
        let ratio = wall.stiffness_k(1.0).unwrap() / wall.stiffness_k(0.0).unwrap();
        assert_relative_eq!(
            ratio,
            wall.stiffness.e_max / wall.stiffness.e_min,
            max_relative = 1e-15
        );
        assert!(wall.stiffness_k(-0.1).is_err());
        assert!(wall.stiffness_k(1.1).is_err());
    }

    #[test]
    fn stiffness_constant_for_degenerate_range() {
        let geom = table_wall().geometry;
        let stiff = WallStiffness::new(35_000.0, 35_000.0, 0.5).unwrap();
        let wall = VesselWall::new(geom, stiff, table_law());
        assert_eq!(wall.stiffness_k(0.0).unwrap(), wall.stiffness_k(1.0).unwrap());
    }

    #[test]
    fn pressure_reference_point() {
        let wall = table_wall();
        let a0 = wall.geometry.a0;
        assert_relative_eq!(wall.pressure(a0, 0.0).unwrap(), 0.0, epsilon = 1e-12);
        let p = wall.pressure(4.0 * a0, 0.0).unwrap();
        assert_relative_eq!(p, 209.9, max_relative = 1e-4);
        assert_relative_eq!(units::pa_to_cmh2o(p), 2.1404, max_relative = 1e-4);
    }

    #[test]
    fn area_from_pressure_round_trips() {
        let wall = table_wall();
        let a0 = wall.geometry.a0;
        assert_relative_eq!(
            wall.area_from_pressure(wall.geometry.p_e, 0.0).unwrap(),
            a0,
            max_relative = 1e-12
        );
        let p = wall.pressure(4.0 * a0, 0.0).unwrap();
        let a = wall.area_from_pressure(p, 0.0).unwrap();
        assert_relative_eq!(a / a0, 4.0, max_relative = 1e-9);

        // -5 to 30 cmH2O at several contraction levels
        for s in [0.0, 0.5, 1.0] {
            for i in 0..=70 {
                let p = units::cmh2o_to_pa(-5.0 + 0.5 * i as f64);
                let a = wall.area_from_pressure(p, s).unwrap();
                let back = wall.pressure(a, s).unwrap();
                let scale = p.abs().max(1.0);
                assert!(
                    (back - p).abs() <= 1e-10 * scale,
                    "roundtrip failed at p={p} s={s}: {back}"
                );
            }
        }
    }

    #[test]
    fn area_from_pressure_reports_out_of_range_for_bounded_law() {
        // n = 0: psi bounded below by -(1 + C)
        let geom = table_wall().geometry;
        let law = TubeLawParams::new(0.5, 0.0, 2.0, 1.0).unwrap();
        let wall = VesselWall::new(geom, table_wall().stiffness, law);
        let k = wall.stiffness_k(0.0).unwrap();
        let below = geom.p_e - 2.1 * k; // below the infimum p_e - 2 K
        assert!(matches!(
            wall.area_from_pressure(below, 0.0),
            Err(SimError::OutOfRange { .. })
        ));
    }

    #[test]
    fn wave_speed_reference_and_finite_difference() {
        let wall = table_wall();
        let props = presets::reference_lymph();
        let a0 = wall.geometry.a0;
        let c = wall.wave_speed(a0, 0.0, props.rho).unwrap();
        assert_relative_eq!(c, (105.0 * 5.5 / 998.0f64).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(c, 0.7607, max_relative = 1e-4);

        // c^2 = (A/rho) dp/dA via central differences
        for s in [0.0, 0.7] {
            for a_ratio in [0.5, 1.0, 2.0, 4.0, 6.5, 8.0] {
                let a = a_ratio * a0;
                let h = 1.0e-6 * a;
                let dp = (wall.pressure(a + h, s).unwrap() - wall.pressure(a - h, s).unwrap())
                    / (2.0 * h);
                let c2 = wall.wave_speed(a, s, props.rho).unwrap().powi(2);
                assert_relative_eq!(c2, a / props.rho * dp, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn wave_speed_zero_for_flat_law() {
        let geom = table_wall().geometry;
        let law = TubeLawParams::new(0.0, 0.0, 0.0, 0.0).unwrap();
        let wall = VesselWall::new(geom, table_wall().stiffness, law);
        assert_eq!(wall.wave_speed(geom.a0, 0.0, 998.0).unwrap(), 0.0);
    }

    #[test]
    fn wall_shear_stress_signs() {
        let props = presets::reference_lymph();
        let a = 7.0e-9;
        assert_eq!(wall_shear_stress(a, 0.0, &props).unwrap(), 0.0);
        for q in [1.0e-10, 3.3e-9, 2.0e-8] {
            let plus = wall_shear_stress(a, q, &props).unwrap();
            let minus = wall_shear_stress(a, -q, &props).unwrap();
            assert!(plus < 0.0);
            assert_relative_eq!(plus, -minus, max_relative = 1e-15);
        }
        assert!(wall_shear_stress(-1.0, 1.0, &props).is_err());
    }

    #[test]
    fn genuine_nonlinearity_has_a_root_for_reference_law() {
        let law = table_law();
        // scan a log grid over [1e-3, 1e2] for a sign change
        let mut sign_changes = 0;
        let mut prev = law.genuine_nonlinearity(1.0e-3);
        for i in 1..=500 {
            let a = 10f64.powf(-3.0 + 5.0 * i as f64 / 500.0);
            let cur = law.genuine_nonlinearity(a);
            if prev.signum() != cur.signum() {
                sign_changes += 1;
            }
            prev = cur;
        }
        assert!(sign_changes >= 1);

        let degenerate = TubeLawParams::new(0.0, 0.0, 3.0, 0.0).unwrap();
        for a in [0.3, 1.0, 5.0] {
            assert_eq!(degenerate.genuine_nonlinearity(a), 0.0);
        }
    }

    #[test]
    fn construction_rejects_bad_signs() {
        assert!(TubeLawParams::new(-0.1, -5.0, 19.0, 1e-16).is_err());
        assert!(TubeLawParams::new(0.5, 0.1, 19.0, 1e-16).is_err());
        assert!(TubeLawParams::new(0.5, -5.0, -1.0, 1e-16).is_err());
        assert!(TubeLawParams::new(0.5, -5.0, 19.0, -1e-16).is_err());
        assert!(VesselGeometry::new(-1.0, 1.0, 1.0, 0.0).is_err());
        assert!(WallStiffness::new(2.0, 1.0, 0.5).is_err());
        assert!(WallStiffness::new(1.0, 2.0, 1.0).is_err());
        assert!(LymphProperties::new(0.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn flux_bracket_derivative_matches_wave_bracket() {
        // also exercises the log branch at n = -1
        let laws = [
            table_law(),
            TubeLawParams::new(0.5, -1.0, 3.0, 0.2).unwrap(),
        ];
        for law in &laws {
            for a in [0.4, 1.0, 2.7, 6.0] {
                let h = 1.0e-7 * a;
                let fd = (law.flux_bracket(a + h) - law.flux_bracket(a - h)) / (2.0 * h);
                assert_relative_eq!(fd, law.wave_bracket(a), max_relative = 1e-7);
            }
        }
    }
}

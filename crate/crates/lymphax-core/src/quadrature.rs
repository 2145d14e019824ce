//! Gauss-Legendre quadrature for the Riemann-invariant integral.
//!
//! Rarefaction relations and the valve/pressure boundary solves all need
//! `int c(tau)/tau dtau` between two areas. The integrand is smooth on any
//! positive interval, so a 32-point rule per segment converges spectrally;
//! wide intervals are split geometrically so that no segment spans more than
//! a factor-two ratio in area. The same routine backs every caller, so the
//! exact-solver and coupling integrals agree bit for bit.

use crate::math::FloatExt;
use crate::wall::TubeContext;

/// Positive half of the 32-point Gauss-Legendre rule on [-1, 1]
/// (nodes are symmetric, weights equal for +-x).
const GL32: [(f64, f64); 16] = [
    (0.04830766568773831623, 0.09654008851472780057),
    (0.1444719615827964935, 0.09563872007927485942),
    (0.2392873622521370745, 0.09384439908080456564),
    (0.3318686022821276498, 0.09117387869576388471),
    (0.4213512761306353454, 0.08765209300440381114),
    (0.50689990893222939, 0.08331192422694675522),
    (0.587715757240762329, 0.07819389578707030647),
    (0.663044266930215201, 0.07234579410884850623),
    (0.7321821187402896804, 0.06582222277636184684),
    (0.794483795967942407, 0.05868409347853554715),
    (0.8493676137325699701, 0.0509980592623761762),
    (0.896321155766052124, 0.04283589802222668066),
    (0.9349060759377396892, 0.0342738629130214331),
    (0.9647622555875064308, 0.02539206530926205946),
    (0.9856115115452683354, 0.01627439473090567061),
    (0.9972638618494815635, 0.0070186100094700966),
];

/// Positive half of the 8-point rule, used on near-degenerate intervals
/// where it is already exact to rounding for the smooth integrand.
const GL8: [(f64, f64); 4] = [
    (0.1834346424956498049, 0.3626837833783619830),
    (0.5255324099163289858, 0.3137066458778872873),
    (0.7966664774136267395, 0.2223810344533744705),
    (0.9602898564975362317, 0.1012285362903762592),
];

/// Largest area ratio allowed within one quadrature segment.
const MAX_SEGMENT_RATIO: f64 = 2.0;
/// Below this interval ratio the 8-point rule is used.
const NARROW_RATIO: f64 = 1.05;

/// 32-point Gauss-Legendre approximation of `int_a^b f(x) dx`.
pub fn gauss_legendre_32(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for &(x, w) in GL32.iter() {
        sum += w * (f(mid + half * x) + f(mid - half * x));
    }
    sum * half
}

/// 8-point Gauss-Legendre approximation of `int_a^b f(x) dx`.
pub fn gauss_legendre_8(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for &(x, w) in GL8.iter() {
        sum += w * (f(mid + half * x) + f(mid - half * x));
    }
    sum * half
}

/// Generalized-Riemann-invariant integral `int_{a_from}^{a_to} c(tau)/tau dtau`
/// over cross-sectional area, signed with the integration direction.
pub fn gri_integral(ctx: &TubeContext<'_>, a_from: f64, a_to: f64) -> f64 {
    debug_assert!(a_from > 0.0 && a_to > 0.0);
    if a_from == a_to {
        return 0.0;
    }
    let (lo, hi, sign) = if a_from < a_to {
        (a_from, a_to, 1.0)
    } else {
        (a_to, a_from, -1.0)
    };
    let ratio = hi / lo;
    // Boundary solves integrate over one CFL step's worth of area change;
    // the low-order rule is exact to rounding there and much cheaper.
    if ratio <= NARROW_RATIO {
        let f = |tau: f64| ctx.wave_speed_of(tau) / tau;
        return sign * gauss_legendre_8(&f, lo, hi);
    }
    let segments = if ratio <= MAX_SEGMENT_RATIO {
        1
    } else {
        // smallest count with per-segment ratio <= MAX_SEGMENT_RATIO
        let raw = ratio.ln_() / MAX_SEGMENT_RATIO.ln_();
        let mut n = raw as usize + 1;
        if (raw - raw as usize as f64).abs_() < 1e-12 {
            n = raw as usize;
        }
        n.max(1)
    };
    let growth = (ratio.ln_() / segments as f64).exp_();
    let f = |tau: f64| ctx.wave_speed_of(tau) / tau;
    let mut total = 0.0;
    let mut left = lo;
    for k in 0..segments {
        let right = if k + 1 == segments { hi } else { left * growth };
        total += gauss_legendre_32(&f, left, right);
        left = right;
    }
    sign * total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::wall::{TubeContext, TubeLawParams, VesselWall};
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exactness() {
        // exact for polynomials up to degree 63
        let f = |x: f64| 3.0 * x.powi(7) - x.powi(4) + 2.0 * x - 5.0;
        let exact = |x: f64| 3.0 / 8.0 * x.powi(8) - x.powi(5) / 5.0 + x * x - 5.0 * x;
        let got = gauss_legendre_32(&f, -0.3, 1.7);
        assert_relative_eq!(got, exact(1.7) - exact(-0.3), max_relative = 1e-14);
    }

    fn context_for(law: TubeLawParams, s: f64) -> (VesselWall, f64) {
        let wall = VesselWall::new(
            presets::reference_geometry(),
            presets::reference_stiffness(),
            law,
        );
        (wall, s)
    }

    #[test]
    fn gri_integral_matches_closed_form_single_exponent() {
        // wave_bracket = m a^m with n = 0 dropped via C = 0:
        // for m = 1: c = sqrt((K/rho) A/A0), so
        // int c/tau dtau = 2 sqrt(K/rho) (sqrt(a_hi) - sqrt(a_lo))
        // (note psi with n = 0 contributes a constant, wave bracket kills it)
        let law = TubeLawParams::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let (wall, s) = context_for(law, 0.0);
        let props = presets::reference_lymph();
        let ctx = TubeContext::new(&wall, s, &props);
        let a0 = wall.geometry.a0;
        let k_over_rho = wall.stiffness_k(s).unwrap() / props.rho;
        for (lo, hi) in [(0.5, 1.0), (1.0, 4.0), (0.1, 60.0), (3.0, 3.0000001)] {
            let got = gri_integral(&ctx, lo * a0, hi * a0);
            let exact = 2.0 * k_over_rho.sqrt() * (hi.sqrt() - lo.sqrt());
            assert_relative_eq!(got, exact, max_relative = 1e-12);
            // antisymmetric in the bounds
            assert_relative_eq!(
                gri_integral(&ctx, hi * a0, lo * a0),
                -got,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn gri_integral_segment_refinement_converged() {
        // reference law: halving segment width further must not move the result
        let wall = presets::reference_wall();
        let props = presets::reference_lymph();
        let ctx = TubeContext::new(&wall, 0.3, &props);
        let a0 = wall.geometry.a0;
        for (lo, hi) in [(0.2, 8.0), (1.0, 1.5), (0.01, 90.0)] {
            let coarse = gri_integral(&ctx, lo * a0, hi * a0);
            // manual fine partition: 64 geometric segments
            let f = |tau: f64| ctx.wave_speed_of(tau) / tau;
            let n = 64;
            let growth = ((hi / lo).ln() / n as f64).exp();
            let mut fine = 0.0;
            let mut left = lo * a0;
            for k in 0..n {
                let right = if k + 1 == n { hi * a0 } else { left * growth };
                fine += gauss_legendre_32(&f, left, right);
                left = right;
            }
            assert_relative_eq!(coarse, fine, max_relative = 1e-12);
        }
    }

    #[test]
    fn low_order_rule_polynomial_exactness() {
        // exact for polynomials up to degree 15
        let f = |x: f64| x.powi(15) - 2.0 * x.powi(9) + x;
        let exact = |x: f64| x.powi(16) / 16.0 - 0.2 * x.powi(10) + 0.5 * x * x;
        let got = gauss_legendre_8(&f, 0.2, 1.3);
        assert_relative_eq!(got, exact(1.3) - exact(0.2), max_relative = 1e-13);
    }

    #[test]
    fn narrow_interval_rule_agrees_with_dense_rule() {
        let wall = presets::reference_wall();
        let props = presets::reference_lymph();
        let ctx = TubeContext::new(&wall, 0.6, &props);
        let a0 = wall.geometry.a0;
        for (lo, hi) in [(3.0, 3.0449), (6.2, 6.21), (0.9, 0.900004)] {
            let narrow = gri_integral(&ctx, lo * a0, hi * a0);
            let f = |tau: f64| ctx.wave_speed_of(tau) / tau;
            let dense = gauss_legendre_32(&f, lo * a0, hi * a0);
            assert_relative_eq!(narrow, dense, max_relative = 1e-13);
        }
    }

    #[test]
    fn gri_integral_zero_width() {
        let wall = presets::reference_wall();
        let props = presets::reference_lymph();
        let ctx = TubeContext::new(&wall, 0.0, &props);
        assert_eq!(gri_integral(&ctx, 5.0e-9, 5.0e-9), 0.0);
    }
}

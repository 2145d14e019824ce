//! Exact solver for the Riemann problem of the lymph-flow system with
//! constant wall parameters.
//!
//! For piecewise-constant data `(A_L, u_L | A_R, u_R)` the subcritical
//! solution consists of two nonlinear waves separated by a star region with
//! constant `(A*, u*)`. Each wave is
//!
//! * a rarefaction when `A* <= A_K`, resolved through the Generalized
//!   Riemann Invariant `u -+ int c(A)/A dA = const`, or
//! * a shock when `A* > A_K`, resolved through the Rankine-Hugoniot
//!   conditions of the conservative fluxes, which give
//!   `|u* - u_K| = sqrt((P(A*) - P(A_K)) (A* - A_K) / (A* A_K))`
//!   with `P` the density-normalised pressure force of the momentum flux.
//!
//! The star area is the root of the monotone two-wave function
//! `f_L(A*) + f_R(A*) + u_R - u_L`, found by Newton iteration with a
//! bisection safeguard. The solution is self-similar in `xi = x/t` and can
//! be sampled anywhere in the fan.

use crate::math::FloatExt;
use crate::quadrature::gri_integral;
use crate::wall::TubeContext;
use crate::SimError;

/// Piecewise-constant initial data.
#[derive(Debug, Clone, Copy)]
pub struct RiemannStates {
    pub a_left: f64,
    pub u_left: f64,
    pub a_right: f64,
    pub u_right: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveKind {
    Shock,
    Rarefaction,
}

/// One of the two waves: a shock has `head == tail == S`.
#[derive(Debug, Clone, Copy)]
pub struct Wave {
    pub kind: WaveKind,
    /// Speed of the leading edge (m/s).
    pub head: f64,
    /// Speed of the trailing edge (m/s).
    pub tail: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RiemannSolution {
    pub states: RiemannStates,
    pub a_star: f64,
    pub u_star: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
}

const MAX_ITER: u32 = 100;
const U_TOL: f64 = 1.0e-12;

/// Wave function of one side: change of velocity across the wave as a
/// function of the star area.
fn wave_function(ctx: &TubeContext<'_>, a_star: f64, a_k: f64) -> f64 {
    if a_star <= a_k {
        gri_integral(ctx, a_k, a_star)
    } else {
        let dp = ctx.pressure_potential(a_star) - ctx.pressure_potential(a_k);
        (dp * (a_star - a_k) / (a_star * a_k)).max(0.0).sqrt_()
    }
}

fn wave_function_derivative(ctx: &TubeContext<'_>, a_star: f64, a_k: f64) -> f64 {
    if a_star <= a_k {
        ctx.wave_speed_of(a_star) / a_star
    } else {
        let p_star = ctx.pressure_potential(a_star);
        let p_k = ctx.pressure_potential(a_k);
        let g = (p_star - p_k) * (a_star - a_k) / (a_star * a_k);
        if g <= 0.0 {
            return ctx.wave_speed_of(a_star) / a_star;
        }
        let c2 = ctx.wave_speed_of(a_star).powi(2);
        let dg = c2 * (1.0 / a_k - 1.0 / a_star) + (p_star - p_k) / (a_star * a_star);
        0.5 * dg / g.sqrt_()
    }
}

/// Solve for the star state. Rejects supercritical data (`|u| >= c`).
pub fn solve_riemann(
    ctx: &TubeContext<'_>,
    states: &RiemannStates,
) -> Result<RiemannSolution, SimError> {
    for (a, u, what) in [
        (states.a_left, states.u_left, "left state"),
        (states.a_right, states.u_right, "right state"),
    ] {
        if !(a > 0.0) {
            return Err(SimError::Domain {
                op: "solve_riemann",
                what: "A",
                value: a,
            });
        }
        let c = ctx.wave_speed_of(a);
        if u.abs_() >= c {
            return Err(SimError::Domain {
                op: "solve_riemann",
                what,
                value: u / c,
            });
        }
    }

    let phi = |a: f64| {
        wave_function(ctx, a, states.a_left) + wave_function(ctx, a, states.a_right)
            + states.u_right
            - states.u_left
    };

    // bracket the root; phi is increasing in A*
    let mut lo = states.a_left.min(states.a_right) / 10.0;
    let mut hi = states.a_left.max(states.a_right) * 10.0;
    let mut expansions = 0;
    while phi(lo) > 0.0 {
        lo *= 0.1;
        expansions += 1;
        if expansions > 60 {
            return Err(SimError::Convergence {
                op: "solve_riemann (bracket)",
                iterations: expansions,
                residual: phi(lo),
            });
        }
    }
    while phi(hi) < 0.0 {
        hi *= 10.0;
        expansions += 1;
        if expansions > 60 {
            return Err(SimError::Convergence {
                op: "solve_riemann (bracket)",
                iterations: expansions,
                residual: phi(hi),
            });
        }
    }

    let mut a = 0.5 * (states.a_left + states.a_right);
    if !(a > lo && a < hi) {
        a = 0.5 * (lo + hi);
    }
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let f = phi(a);
        if f.abs_() < U_TOL {
            converged = true;
            break;
        }
        if f > 0.0 {
            hi = a;
        } else {
            lo = a;
        }
        let df = wave_function_derivative(ctx, a, states.a_left)
            + wave_function_derivative(ctx, a, states.a_right);
        let mut next = if df > 0.0 { a - f / df } else { 0.5 * (lo + hi) };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        a = next;
    }
    if !converged {
        return Err(SimError::Convergence {
            op: "solve_riemann",
            iterations: MAX_ITER,
            residual: phi(a),
        });
    }

    let a_star = a;
    let f_l = wave_function(ctx, a_star, states.a_left);
    let f_r = wave_function(ctx, a_star, states.a_right);
    let u_star = 0.5 * (states.u_left + states.u_right) + 0.5 * (f_r - f_l);

    let c_star = ctx.wave_speed_of(a_star);
    let left_wave = if a_star <= states.a_left {
        Wave {
            kind: WaveKind::Rarefaction,
            head: states.u_left - ctx.wave_speed_of(states.a_left),
            tail: u_star - c_star,
        }
    } else {
        let q_l = states.a_left * states.u_left;
        let s = (a_star * u_star - q_l) / (a_star - states.a_left);
        Wave {
            kind: WaveKind::Shock,
            head: s,
            tail: s,
        }
    };
    let right_wave = if a_star <= states.a_right {
        Wave {
            kind: WaveKind::Rarefaction,
            head: states.u_right + ctx.wave_speed_of(states.a_right),
            tail: u_star + c_star,
        }
    } else {
        let q_r = states.a_right * states.u_right;
        let s = (q_r - a_star * u_star) / (states.a_right - a_star);
        Wave {
            kind: WaveKind::Shock,
            head: s,
            tail: s,
        }
    };

    Ok(RiemannSolution {
        states: *states,
        a_star,
        u_star,
        left_wave,
        right_wave,
    })
}

/// Sample the self-similar solution at `xi = x/t`.
pub fn sample(ctx: &TubeContext<'_>, solution: &RiemannSolution, xi: f64) -> (f64, f64) {
    let st = &solution.states;
    // left of the left wave?
    match solution.left_wave.kind {
        WaveKind::Shock => {
            if xi <= solution.left_wave.head {
                return (st.a_left, st.u_left);
            }
        }
        WaveKind::Rarefaction => {
            if xi <= solution.left_wave.head {
                return (st.a_left, st.u_left);
            }
            if xi < solution.left_wave.tail {
                return sample_fan(ctx, st.a_left, st.u_left, solution.a_star, xi, -1.0);
            }
        }
    }
    // right of the right wave?
    match solution.right_wave.kind {
        WaveKind::Shock => {
            if xi >= solution.right_wave.head {
                return (st.a_right, st.u_right);
            }
        }
        WaveKind::Rarefaction => {
            if xi >= solution.right_wave.head {
                return (st.a_right, st.u_right);
            }
            if xi > solution.right_wave.tail {
                return sample_fan(ctx, st.a_right, st.u_right, solution.a_star, xi, 1.0);
            }
        }
    }
    (solution.a_star, solution.u_star)
}

/// Interior of a rarefaction fan: find the area whose characteristic speed
/// equals `xi`, with the velocity tied to the outer state by the GRI.
/// `family` is -1 for the left (u - c) wave and +1 for the right (u + c).
fn sample_fan(
    ctx: &TubeContext<'_>,
    a_outer: f64,
    u_outer: f64,
    a_star: f64,
    xi: f64,
    family: f64,
) -> (f64, f64) {
    // GRI of the wave family: u - family * int c/A dA = const
    let u_of = |a: f64| u_outer + family * gri_integral(ctx, a_outer, a);
    // characteristic speed through the fan
    let lambda = |a: f64| u_of(a) + family * ctx.wave_speed_of(a);
    let (mut lo, mut hi) = if a_star < a_outer {
        (a_star, a_outer)
    } else {
        (a_outer, a_star)
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let lam = lambda(mid);
        // lambda increases with a for the -1 family inside a left fan
        // (head to tail) and decreases for the +1 family; orient by probing
        let increasing = lambda(hi) >= lambda(lo);
        if (lam < xi) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1.0e-14 * hi {
            break;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, u_of(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::wall::TubeContext;
    use approx::assert_relative_eq;

    fn ctx_parts() -> (crate::wall::VesselWall, crate::wall::LymphProperties) {
        (presets::reference_wall(), presets::reference_lymph())
    }

    #[test]
    fn identical_states_give_degenerate_solution() {
        let (wall, props) = ctx_parts();
        let ctx = TubeContext::new(&wall, 0.0, &props);
        let a0 = wall.geometry.a0;
        let states = RiemannStates {
            a_left: 2.0 * a0,
            u_left: 0.05,
            a_right: 2.0 * a0,
            u_right: 0.05,
        };
        let sol = solve_riemann(&ctx, &states).unwrap();
        assert_relative_eq!(sol.a_star, 2.0 * a0, max_relative = 1e-10);
        assert_relative_eq!(sol.u_star, 0.05, max_relative = 1e-9);
        let (a, u) = sample(&ctx, &sol, -1.0);
        assert_relative_eq!(a, 2.0 * a0, max_relative = 1e-9);
        assert_relative_eq!(u, 0.05, max_relative = 1e-9);
    }

    #[test]
    fn reference_problem_is_left_rarefaction_right_shock() {
        let (wall, props) = ctx_parts();
        let ctx = TubeContext::new(&wall, 0.0, &props);
        let a0 = wall.geometry.a0;
        let states = RiemannStates {
            a_left: 4.0 * a0,
            u_left: 0.0,
            a_right: 3.0 * a0,
            u_right: 0.0,
        };
        let sol = solve_riemann(&ctx, &states).unwrap();
        assert_eq!(sol.left_wave.kind, WaveKind::Rarefaction);
        assert_eq!(sol.right_wave.kind, WaveKind::Shock);
        assert!(sol.a_star > 3.0 * a0 && sol.a_star < 4.0 * a0);
        assert!(sol.u_star > 0.0);

        // entropy: characteristics converge into the shock
        let lambda2_star = sol.u_star + ctx.wave_speed_of(sol.a_star);
        let lambda2_right = ctx.wave_speed_of(3.0 * a0);
        let s = sol.right_wave.head;
        assert!(lambda2_star > s && s > lambda2_right);

        // Rankine-Hugoniot residuals on both conservation laws
        let q_star = sol.a_star * sol.u_star;
        let q_r = 0.0;
        let f_star = ctx.flux(sol.a_star, q_star);
        let f_r = ctx.flux(3.0 * a0, q_r);
        let rh1 = f_star.0 - f_r.0 - s * (sol.a_star - 3.0 * a0);
        let rh2 = f_star.1 - f_r.1 - s * (q_star - q_r);
        assert!(rh1.abs() / f_star.0.abs().max(1e-30) < 1e-9, "RH mass {rh1:e}");
        assert!(
            rh2.abs() / f_star.1.abs().max(1e-30) < 1e-9,
            "RH momentum {rh2:e}"
        );
    }

    #[test]
    fn rarefaction_keeps_invariant_constant_and_sampling_is_monotone() {
        let (wall, props) = ctx_parts();
        let ctx = TubeContext::new(&wall, 0.0, &props);
        let a0 = wall.geometry.a0;
        let states = RiemannStates {
            a_left: 4.0 * a0,
            u_left: 0.0,
            a_right: 3.0 * a0,
            u_right: 0.0,
        };
        let sol = solve_riemann(&ctx, &states).unwrap();
        let head = sol.left_wave.head;
        let tail = sol.left_wave.tail;
        assert!(head < tail);
        // u + int c/A dA is the same at every sampled fan point
        let invariant_at = |a: f64, u: f64| u + gri_integral(&ctx, a0, a);
        let reference = invariant_at(4.0 * a0, 0.0);
        let mut last_a = f64::INFINITY;
        for k in 0..=20 {
            let xi = head + (tail - head) * k as f64 / 20.0;
            let (a, u) = sample(&ctx, &sol, xi);
            assert!((invariant_at(a, u) - reference).abs() < 1.0e-9);
            assert!(a <= last_a + 1e-18, "area not monotone through the fan");
            last_a = a;
        }
        // far-field sampling returns the data
        let (a, u) = sample(&ctx, &sol, -1.0e3);
        assert_eq!((a, u), (4.0 * a0, 0.0));
        let (a, u) = sample(&ctx, &sol, 1.0e3);
        assert_eq!((a, u), (3.0 * a0, 0.0));
    }

    #[test]
    fn two_shock_and_two_rarefaction_patterns() {
        let (wall, props) = ctx_parts();
        let ctx = TubeContext::new(&wall, 0.0, &props);
        let a0 = wall.geometry.a0;
        // converging flow: both waves are shocks
        let states = RiemannStates {
            a_left: 3.0 * a0,
            u_left: 0.1,
            a_right: 3.0 * a0,
            u_right: -0.1,
        };
        let sol = solve_riemann(&ctx, &states).unwrap();
        assert_eq!(sol.left_wave.kind, WaveKind::Shock);
        assert_eq!(sol.right_wave.kind, WaveKind::Shock);
        assert!(sol.a_star > 3.0 * a0);
        assert_relative_eq!(sol.u_star, 0.0, epsilon = 1e-12);
        // diverging flow: both waves are rarefactions
        let states = RiemannStates {
            a_left: 3.0 * a0,
            u_left: -0.1,
            a_right: 3.0 * a0,
            u_right: 0.1,
        };
        let sol = solve_riemann(&ctx, &states).unwrap();
        assert_eq!(sol.left_wave.kind, WaveKind::Rarefaction);
        assert_eq!(sol.right_wave.kind, WaveKind::Rarefaction);
        assert!(sol.a_star < 3.0 * a0);
    }

    #[test]
    fn supercritical_data_rejected() {
        let (wall, props) = ctx_parts();
        let ctx = TubeContext::new(&wall, 0.0, &props);
        let a0 = wall.geometry.a0;
        let c = ctx.wave_speed_of(3.0 * a0);
        let states = RiemannStates {
            a_left: 3.0 * a0,
            u_left: 1.5 * c,
            a_right: 3.0 * a0,
            u_right: 0.0,
        };
        assert!(solve_riemann(&ctx, &states).is_err());
    }
}

//! Boundary flux construction at lymphangion interfaces.
//!
//! Valve interfaces: once the valve ODEs produce the flow `q_v` at the new
//! time level, the boundary state of each adjacent vessel is the area `A*`
//! satisfying the Riemann-invariant relation
//!
//! ```text
//! F(A*) = q_v + A* (-u_n + beta int_{A_n}^{A*} c(tau)/tau dtau) = 0
//! ```
//!
//! with `beta = +1` at a vessel's right end (the vessel is upstream of the
//! valve) and `beta = -1` at a left end (downstream of the valve). The
//! boundary flux is then the physical flux of `(A*, q_v)`.
//!
//! Pressure interfaces: the imposed pressure fixes the boundary area through
//! the tube-law inverse and the same invariant gives the flow explicitly.

use crate::math::FloatExt;
use crate::quadrature::gri_integral;
use crate::wall::{TubeContext, VesselWall};
use crate::SimError;

/// Which end of the vessel the interface touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySide {
    /// Left end of the vessel (`beta = -1`, vessel is downstream).
    Left,
    /// Right end of the vessel (`beta = +1`, vessel is upstream).
    Right,
}

impl BoundarySide {
    #[inline]
    pub fn beta(self) -> f64 {
        match self {
            BoundarySide::Left => -1.0,
            BoundarySide::Right => 1.0,
        }
    }
}

/// Pressure difference across a valve from the adjacent cell pressures at
/// the current time level, falling back to the prescribed programs at the
/// collector ends. `upstream`/`downstream` carry the neighbouring vessels'
/// boundary-cell pressures when those vessels exist.
pub fn assemble_dp(
    upstream_cell: Option<f64>,
    downstream_cell: Option<f64>,
    p_in: Option<f64>,
    p_out: Option<f64>,
) -> Result<f64, SimError> {
    let p_u = upstream_cell.or(p_in).ok_or(SimError::Config(
        "valve has neither an upstream lymphangion nor an inflow pressure program",
    ))?;
    let p_d = downstream_cell.or(p_out).ok_or(SimError::Config(
        "valve has neither a downstream lymphangion nor an outflow pressure program",
    ))?;
    Ok(p_u - p_d)
}

const MAX_ITER: u32 = 100;

/// Boundary state `(A*, q*)` imposed by a known valve flow. Newton with the
/// analytic derivative `F'(A*) = -u_n + beta int + beta c(A*)`, started at
/// `A_n` and safeguarded by a bracket.
pub fn boundary_state_from_valve_flow(
    ctx: &TubeContext<'_>,
    q_v: f64,
    a_n: f64,
    u_n: f64,
    side: BoundarySide,
) -> Result<(f64, f64), SimError> {
    if !(a_n > 0.0) {
        return Err(SimError::Domain {
            op: "boundary_state_from_valve_flow",
            what: "A_n",
            value: a_n,
        });
    }
    let beta = side.beta();
    let tol = 1.0e-12 * q_v.abs_().max(1.0);

    // Fast path: plain Newton from A_n. The root sits within one CFL step
    // of A_n, so this converges in a few iterations; the invariant integral
    // is shared between the residual and its derivative.
    let mut a = a_n;
    for _ in 0..30 {
        let integral = gri_integral(ctx, a_n, a);
        let f = q_v + a * (-u_n + beta * integral);
        let df = -u_n + beta * integral + beta * ctx.wave_speed_of(a);
        if f.abs_() <= tol && df != 0.0 {
            return Ok((a, q_v));
        }
        let next = a - f / df;
        if !(next > 0.0) || !next.is_finite() {
            break;
        }
        let step = (next - a).abs_();
        a = next;
        if step <= 1.0e-13 * a {
            let f = q_v + a * (-u_n + beta * gri_integral(ctx, a_n, a));
            if f.abs_() <= tol {
                return Ok((a, q_v));
            }
            break;
        }
    }
    bracketed_valve_flow_solve(ctx, q_v, a_n, u_n, beta, tol)
}

/// Bisection-safeguarded fallback for the rare states where plain Newton
/// wanders off.
fn bracketed_valve_flow_solve(
    ctx: &TubeContext<'_>,
    q_v: f64,
    a_n: f64,
    u_n: f64,
    beta: f64,
    tol: f64,
) -> Result<(f64, f64), SimError> {
    let residual = |a: f64| q_v + a * (-u_n + beta * gri_integral(ctx, a_n, a));

    let mut lo = a_n;
    let mut hi = a_n;
    let f_n = residual(a_n);
    if f_n.abs_() <= tol {
        return Ok((a_n, q_v));
    }
    let mut expansions = 0;
    let (mut f_lo, mut f_hi) = (f_n, f_n);
    while f_lo * f_hi > 0.0 {
        lo *= 0.7;
        hi *= 1.4;
        f_lo = residual(lo);
        f_hi = residual(hi);
        expansions += 1;
        if expansions > 120 {
            return Err(SimError::Convergence {
                op: "boundary_state_from_valve_flow (bracket)",
                iterations: expansions,
                residual: f_n,
            });
        }
    }
    let increasing = f_hi > f_lo;

    // Newton safeguarded by bisection; iterate the area to relative
    // convergence, then accept against the residual tolerance.
    let mut a = a_n.clamp(lo, hi);
    for _ in 0..MAX_ITER {
        let f = residual(a);
        if (f > 0.0) == increasing {
            hi = a;
        } else {
            lo = a;
        }
        let df = -u_n + beta * gri_integral(ctx, a_n, a) + beta * ctx.wave_speed_of(a);
        let mut next = a - f / df;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let step = (next - a).abs_();
        a = next;
        if step <= 1.0e-13 * a {
            break;
        }
    }
    let f = residual(a);
    if f.abs_() <= tol {
        Ok((a, q_v))
    } else {
        Err(SimError::Convergence {
            op: "boundary_state_from_valve_flow",
            iterations: MAX_ITER,
            residual: f,
        })
    }
}

/// Boundary state `(A_I, q*)` imposed by a pressure program: the area comes
/// from the tube-law inverse at the current contraction state and the flow
/// from the Riemann invariant,
/// `q* = A_I (u_n - beta int_{A_n}^{A_I} c(tau)/tau dtau)`.
pub fn boundary_state_from_pressure(
    ctx: &TubeContext<'_>,
    wall: &VesselWall,
    s: f64,
    p_program: f64,
    a_n: f64,
    u_n: f64,
    side: BoundarySide,
) -> Result<(f64, f64), SimError> {
    let a_i = wall.area_from_pressure(p_program, s)?;
    let beta = side.beta();
    let q = a_i * (u_n - beta * gri_integral(ctx, a_n, a_i));
    Ok((a_i, q))
}

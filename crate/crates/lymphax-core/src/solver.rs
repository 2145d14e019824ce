//! Second-order finite-volume update for one lymphangion.
//!
//! The conserved variables `Q = (A, q)` obey
//!
//! ```text
//! dQ/dt + dF/dx = S,    F = (q, q^2/A + P(A)),   S = (0, -f u / rho)
//! ```
//!
//! Interior fluxes use the SLIC scheme: MUSCL reconstruction with limited
//! slopes, a Hancock half-step (including half the friction source), and the
//! FORCE flux on the evolved face values. The friction source of the final
//! update is evaluated on the half-step cell averages, making the source
//! integration second order in time. Boundary fluxes (`F_{1/2}`,
//! `F_{M+1/2}`) are supplied by the valve/pressure coupling and written into
//! the workspace before the update.

use crate::math::FloatExt;
use crate::wall::TubeContext;
use crate::{ParamError, SimError};

use alloc::vec;
use alloc::vec::Vec;

/// Uniform 1D grid over one lymphangion.
#[derive(Debug, Clone)]
pub struct Grid1D {
    /// Cell count.
    pub m: usize,
    /// Cell width (m).
    pub dx: f64,
    /// Vessel length (m).
    pub length: f64,
}

impl Grid1D {
    pub fn new(length: f64, m: usize) -> Result<Self, ParamError> {
        if m < 3 {
            return Err(ParamError::new("cells", "need at least 3 cells", m as f64));
        }
        if !(length > 0.0) {
            return Err(ParamError::new("length", "must be > 0", length));
        }
        Ok(Self {
            m,
            dx: length / m as f64,
            length,
        })
    }

    /// Centre coordinate of cell `i` (m).
    pub fn cell_center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    /// Index of the cell used for "centre of the lymphangion" probes.
    pub fn center_cell(&self) -> usize {
        self.m / 2
    }
}

/// Per-cell conserved state of one lymphangion.
#[derive(Debug, Clone)]
pub struct ConservedField {
    /// Cross-sectional areas (m^2).
    pub a: Vec<f64>,
    /// Flows (m^3/s).
    pub q: Vec<f64>,
}

impl ConservedField {
    pub fn uniform(m: usize, a: f64, q: f64) -> Self {
        Self {
            a: vec![a; m],
            q: vec![q; m],
        }
    }

    /// Vessel volume `int A dx` (m^3).
    pub fn volume(&self, dx: f64) -> f64 {
        self.a.iter().sum::<f64>() * dx
    }
}

/// Slope limiter for the MUSCL reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Limiter {
    #[default]
    Minmod,
    Superbee,
    /// Zero slopes: falls back to the first-order FORCE scheme.
    Zero,
}

impl Limiter {
    #[inline]
    fn slope(self, left: f64, right: f64) -> f64 {
        match self {
            Limiter::Minmod => {
                if left * right <= 0.0 {
                    0.0
                } else if left.abs_() < right.abs_() {
                    left
                } else {
                    right
                }
            }
            Limiter::Superbee => {
                if left * right <= 0.0 {
                    0.0
                } else {
                    let sign = if left > 0.0 { 1.0 } else { -1.0 };
                    let l = left.abs_();
                    let r = right.abs_();
                    sign * ((2.0 * l).min(r)).max(l.min(2.0 * r))
                }
            }
            Limiter::Zero => 0.0,
        }
    }
}

/// Physical flux `(q, q^2/A + P(A))` with domain checking.
pub fn physical_flux(ctx: &TubeContext<'_>, area: f64, flow: f64) -> Result<(f64, f64), SimError> {
    if !(area > 0.0) {
        return Err(SimError::Domain {
            op: "physical_flux",
            what: "A",
            value: area,
        });
    }
    Ok(ctx.flux(area, flow))
}

/// FORCE flux: the mean of the Lax-Friedrichs and Richtmyer two-step fluxes.
/// Reduces to the physical flux for equal states.
pub fn force_flux(
    ctx: &TubeContext<'_>,
    left: (f64, f64),
    right: (f64, f64),
    dt: f64,
    dx: f64,
) -> Result<(f64, f64), SimError> {
    let fl = physical_flux(ctx, left.0, left.1)?;
    let fr = physical_flux(ctx, right.0, right.1)?;
    let nu = dx / dt;
    let lf = (
        0.5 * (fl.0 + fr.0) - 0.5 * nu * (right.0 - left.0),
        0.5 * (fl.1 + fr.1) - 0.5 * nu * (right.1 - left.1),
    );
    let rm = (
        0.5 * (left.0 + right.0) - 0.5 / nu * (fr.0 - fl.0),
        0.5 * (left.1 + right.1) - 0.5 / nu * (fr.1 - fl.1),
    );
    let frm = physical_flux(ctx, rm.0, rm.1)?;
    Ok((0.5 * (lf.0 + frm.0), 0.5 * (lf.1 + frm.1)))
}

/// Friction source on the momentum equation, `-f u / rho = -(2(gamma+2) pi
/// mu / rho) u` per unit area... evaluated as `-friction_over_rho * u`.
#[inline]
fn momentum_source(ctx: &TubeContext<'_>, area: f64, flow: f64) -> f64 {
    -ctx.friction_over_rho * flow / area
}

/// Reusable per-vessel buffers for the SLIC update.
#[derive(Debug, Clone)]
pub struct SlicWorkspace {
    /// Interface fluxes, `m + 1` entries; `[0]` and `[m]` are the boundary
    /// fluxes supplied by the coupling layer.
    pub flux: Vec<(f64, f64)>,
    /// Half-step cell averages used for the second-order source.
    pub mid: Vec<(f64, f64)>,
    evolved_left: Vec<(f64, f64)>,
    evolved_right: Vec<(f64, f64)>,
}

impl SlicWorkspace {
    pub fn new(m: usize) -> Self {
        Self {
            flux: vec![(0.0, 0.0); m + 1],
            mid: vec![(0.0, 0.0); m],
            evolved_left: vec![(0.0, 0.0); m],
            evolved_right: vec![(0.0, 0.0); m],
        }
    }
}

/// MUSCL-Hancock reconstruction/evolution and FORCE fluxes on the interior
/// interfaces `3/2 .. M-1/2`; fills `ws.flux[1..m]` and the half-step states
/// `ws.mid`. Ghost cells are zeroth-order extrapolated, which zeroes the
/// limited slope of the edge cells. Returns the number of cells that fell
/// back to first order to keep the reconstruction positive.
pub fn compute_interior_fluxes(
    ctx: &TubeContext<'_>,
    field: &ConservedField,
    dt: f64,
    dx: f64,
    limiter: Limiter,
    ws: &mut SlicWorkspace,
) -> Result<u32, SimError> {
    let m = field.a.len();
    let mut fallbacks = 0u32;
    let half_ratio = 0.5 * dt / dx;
    let half_dt = 0.5 * dt;

    for i in 0..m {
        let a = field.a[i];
        let q = field.q[i];
        if !(a > 0.0) {
            return Err(SimError::Domain {
                op: "compute_interior_fluxes",
                what: "A",
                value: a,
            });
        }
        // limited slopes; zero beyond the domain (zeroth-order ghosts)
        let (dal, dql) = if i > 0 {
            (a - field.a[i - 1], q - field.q[i - 1])
        } else {
            (0.0, 0.0)
        };
        let (dar, dqr) = if i + 1 < m {
            (field.a[i + 1] - a, field.q[i + 1] - q)
        } else {
            (0.0, 0.0)
        };
        let mut slope_a = limiter.slope(dal, dar);
        let mut slope_q = limiter.slope(dql, dqr);

        // positivity of the reconstructed faces
        if a - 0.5 * slope_a.abs_() <= 0.0 {
            slope_a = 0.0;
            slope_q = 0.0;
            fallbacks += 1;
        }

        let left = (a - 0.5 * slope_a, q - 0.5 * slope_q);
        let right = (a + 0.5 * slope_a, q + 0.5 * slope_q);
        let f_left = ctx.flux(left.0, left.1);
        let f_right = ctx.flux(right.0, right.1);

        // Hancock half-step, with half the friction source folded in
        let da = half_ratio * (f_left.0 - f_right.0);
        let dq = half_ratio * (f_left.1 - f_right.1) + half_dt * momentum_source(ctx, a, q);
        let evo_l = (left.0 + da, left.1 + dq);
        let evo_r = (right.0 + da, right.1 + dq);
        if !(evo_l.0 > 0.0 && evo_r.0 > 0.0) {
            return Err(SimError::Domain {
                op: "compute_interior_fluxes",
                what: "evolved face A",
                value: evo_l.0.min(evo_r.0),
            });
        }
        ws.evolved_left[i] = evo_l;
        ws.evolved_right[i] = evo_r;
        ws.mid[i] = (a + da, q + dq);
    }

    for i in 1..m {
        ws.flux[i] = force_flux(ctx, ws.evolved_right[i - 1], ws.evolved_left[i], dt, dx)?;
    }
    Ok(fallbacks)
}

/// Conservative update with the second-order (midpoint) friction source.
/// On a positivity violation the offending cell and its area are reported.
pub fn apply_update(
    ctx: &TubeContext<'_>,
    field: &mut ConservedField,
    dt: f64,
    dx: f64,
    ws: &SlicWorkspace,
) -> Result<(), (usize, f64)> {
    let m = field.a.len();
    let ratio = dt / dx;
    for i in 0..m {
        let a_new = field.a[i] - ratio * (ws.flux[i + 1].0 - ws.flux[i].0);
        let (a_mid, q_mid) = ws.mid[i];
        let src = momentum_source(ctx, a_mid, q_mid);
        let q_new = field.q[i] - ratio * (ws.flux[i + 1].1 - ws.flux[i].1) + dt * src;
        if !(a_new > 0.0) {
            return Err((i, a_new));
        }
        field.a[i] = a_new;
        field.q[i] = q_new;
    }
    Ok(())
}

/// Stable time step of one vessel: `CFL * dx / max_i(|u_i| + c_i)`.
pub fn vessel_dt(ctx: &TubeContext<'_>, field: &ConservedField, dx: f64, cfl: f64) -> f64 {
    let mut speed: f64 = 0.0;
    for (&a, &q) in field.a.iter().zip(field.q.iter()) {
        let u = q / a;
        speed = speed.max(u.abs_() + ctx.wave_speed_of(a));
    }
    if speed > 0.0 {
        cfl * dx / speed
    } else {
        f64::INFINITY
    }
}

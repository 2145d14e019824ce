//! Two-stage Lobatto IIIC implicit Runge-Kutta integrator.
//!
//! Butcher tableau
//!
//! ```text
//! 0 | 1/2  -1/2
//! 1 | 1/2   1/2
//! --+-----------
//!   | 1/2   1/2
//! ```
//!
//! Second order, L-stable, stiffly accurate; stability function
//! `R(z) = 1 / (1 - z + z^2/2)`. The stage system is solved by Newton
//! iteration with an analytic Jacobian supplied by the caller; a failing
//! solve is retried on internally halved steps before giving up.
//!
//! The valve and contraction subsystems are integrated with this scheme at
//! the (small) advective time step, with their couplings to the flow field
//! frozen over the step, so the right-hand sides are autonomous here.

use crate::math::{solve_dense, FloatExt};
use thiserror::Error;

/// Stage coefficients of the two-stage Lobatto IIIC tableau.
pub const STAGE_MATRIX: [[f64; 2]; 2] = [[0.5, -0.5], [0.5, 0.5]];
/// Quadrature weights.
pub const WEIGHTS: [f64; 2] = [0.5, 0.5];
/// Stage abscissae.
pub const ABSCISSAE: [f64; 2] = [0.0, 1.0];

const NEWTON_TOL: f64 = 1.0e-12;
const NEWTON_MAX_ITER: u32 = 50;
const MAX_HALVINGS: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OdeError {
    /// Stage Newton iteration failed to converge even after step halving.
    #[error("stage Newton iteration diverged")]
    StageDivergence,
    /// An event-measuring routine observed no event.
    #[error("no event observed within the integration window")]
    NoEvent,
}

/// Advance `y` by `dt`. `rhs` evaluates the time derivative, `jac` its
/// Jacobian on the branch active at the evaluation point.
pub fn lobatto_iiic_step<const N: usize>(
    y: &[f64; N],
    dt: f64,
    rhs: &impl Fn(&[f64; N]) -> [f64; N],
    jac: &impl Fn(&[f64; N]) -> [[f64; N]; N],
) -> Result<[f64; N], OdeError> {
    step_with_halving(y, dt, rhs, jac, MAX_HALVINGS)
}

fn step_with_halving<const N: usize>(
    y: &[f64; N],
    dt: f64,
    rhs: &impl Fn(&[f64; N]) -> [f64; N],
    jac: &impl Fn(&[f64; N]) -> [[f64; N]; N],
    halvings_left: u32,
) -> Result<[f64; N], OdeError> {
    match single_step(y, dt, rhs, jac) {
        Ok(next) => Ok(next),
        Err(e) => {
            if halvings_left == 0 {
                return Err(e);
            }
            let half = 0.5 * dt;
            let mid = step_with_halving(y, half, rhs, jac, halvings_left - 1)?;
            step_with_halving(&mid, half, rhs, jac, halvings_left - 1)
        }
    }
}

fn single_step<const N: usize>(
    y: &[f64; N],
    dt: f64,
    rhs: &impl Fn(&[f64; N]) -> [f64; N],
    jac: &impl Fn(&[f64; N]) -> [[f64; N]; N],
) -> Result<[f64; N], OdeError> {
    assert!(N <= 4, "stage solver sized for systems up to 4 unknowns");

    let f0 = rhs(y);
    let mut k = [f0, f0]; // stage derivatives, seeded with the explicit slope

    let dim = 2 * N;
    let mut mat = [0.0f64; 64]; // (2N)^2 <= 64
    let mut newton_rhs = [0.0f64; 8];

    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let mut stage_states = [[0.0f64; N]; 2];
        for si in 0..2 {
            for j in 0..N {
                stage_states[si][j] =
                    y[j] + dt * (STAGE_MATRIX[si][0] * k[0][j] + STAGE_MATRIX[si][1] * k[1][j]);
            }
        }

        // residuals G_i = k_i - f(Y_i)
        let mut max_residual = 0.0f64;
        let mut scale = 1.0f64;
        for si in 0..2 {
            let f = rhs(&stage_states[si]);
            for j in 0..N {
                let g = k[si][j] - f[j];
                newton_rhs[si * N + j] = -g;
                max_residual = max_residual.max(g.abs_());
                scale = scale.max(k[si][j].abs_());
            }
        }
        if !max_residual.is_finite() {
            return Err(OdeError::StageDivergence);
        }
        if max_residual == 0.0 {
            converged = true;
            break;
        }

        // dG = I - dt (A (x) J(Y_i)), assembled blockwise
        let j0 = jac(&stage_states[0]);
        let j1 = jac(&stage_states[1]);
        for r in 0..dim {
            for c in 0..dim {
                mat[r * dim + c] = 0.0;
            }
            mat[r * dim + r] = 1.0;
        }
        for row in 0..N {
            for col in 0..N {
                mat[row * dim + col] -= dt * STAGE_MATRIX[0][0] * j0[row][col];
                mat[row * dim + (N + col)] -= dt * STAGE_MATRIX[0][1] * j0[row][col];
                mat[(N + row) * dim + col] -= dt * STAGE_MATRIX[1][0] * j1[row][col];
                mat[(N + row) * dim + (N + col)] -= dt * STAGE_MATRIX[1][1] * j1[row][col];
            }
        }
        if !solve_dense(&mut mat[..dim * dim], &mut newton_rhs[..dim], dim) {
            return Err(OdeError::StageDivergence);
        }
        let mut max_update = 0.0f64;
        for si in 0..2 {
            for j in 0..N {
                k[si][j] += newton_rhs[si * N + j];
                max_update = max_update.max(newton_rhs[si * N + j].abs_());
            }
        }
        if !max_update.is_finite() {
            return Err(OdeError::StageDivergence);
        }
        // stop on the Newton update: for stiff systems the attainable
        // residual is limited by rounding amplified through the Jacobian
        if max_update <= NEWTON_TOL * scale {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(OdeError::StageDivergence);
    }
    let mut next = *y;
    for j in 0..N {
        next[j] = y[j] + dt * (WEIGHTS[0] * k[0][j] + WEIGHTS[1] * k[1][j]);
    }
    Ok(next)
}

/// Analytic stability function `R(z)` of the scheme, derived from the
/// tableau: `R(z) = 1 + z b^T (I - z A)^{-1} 1 = 1 / (1 - z + z^2/2)`.
pub fn stability_function(z: f64) -> f64 {
    1.0 / (1.0 - z + 0.5 * z * z)
}

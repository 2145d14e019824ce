//! Lumped-parameter valve model.
//!
//! The flow `q_v` across a valve obeys
//!
//! ```text
//! dq_v/dt = (dp - R(xi) q_v - B(xi) q_v |q_v|) / L(xi)
//! ```
//!
//! with Bernoulli resistance `B = rho / (2 A_eff^2)`, inertia
//! `L = rho L_eff / A_eff`, Poiseuille resistance
//! `R = 2 (gamma+2) pi mu L_eff / A_eff^2`, and an opening state `xi` in
//! [0, 1] driving the effective area between `M_rg A0` (closed) and
//! `M_st A0` (open). `M_st < 1` models a stenotic valve, `M_rg > 0` a
//! regurgitant one that cannot block backflow.

use crate::math::FloatExt;
use crate::ode::{self, OdeError};
use crate::wall::LymphProperties;
use crate::ParamError;

/// Fraction of `A0_ref` kept as a lower bound on the effective area, so the
/// coefficients stay finite with a fully closed healthy valve. The residual
/// leak is negligible (six orders of magnitude below the open valve).
pub const EFFECTIVE_AREA_FLOOR: f64 = 1.0e-6;

#[derive(Debug, Clone, Copy)]
pub struct ValveParams {
    /// Opening rate coefficient (1/(Pa s)).
    pub k_vo: f64,
    /// Closure rate coefficient (1/(Pa s)).
    pub k_vc: f64,
    /// Opening threshold pressure difference (Pa).
    pub dp_open: f64,
    /// Closure threshold pressure difference (Pa).
    pub dp_close: f64,
    /// Maximum opening fraction; `< 1` is a stenosis.
    pub m_st: f64,
    /// Minimum closure fraction; `> 0` is regurgitation.
    pub m_rg: f64,
    /// Effective length (m).
    pub l_eff: f64,
    /// Reference area (m^2): mean of the adjacent equilibrium areas.
    pub a0_ref: f64,
}

impl ValveParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        k_vo: f64,
        k_vc: f64,
        dp_open: f64,
        dp_close: f64,
        m_st: f64,
        m_rg: f64,
        l_eff: f64,
        a0_ref: f64,
    ) -> Result<Self, ParamError> {
        if !(k_vo > 0.0) {
            return Err(ParamError::new("K_vo", "must be > 0", k_vo));
        }
        if !(k_vc > 0.0) {
            return Err(ParamError::new("K_vc", "must be > 0", k_vc));
        }
        if !(0.0..=1.0).contains(&m_st) {
            return Err(ParamError::new("M_st", "must be in [0, 1]", m_st));
        }
        if !(0.0..=1.0).contains(&m_rg) {
            return Err(ParamError::new("M_rg", "must be in [0, 1]", m_rg));
        }
        if m_rg > m_st {
            return Err(ParamError::new("M_rg", "cannot exceed M_st", m_rg));
        }
        if !(l_eff > 0.0) {
            return Err(ParamError::new("L_eff", "must be > 0", l_eff));
        }
        if !(a0_ref > 0.0) {
            return Err(ParamError::new("A0_ref", "must be > 0", a0_ref));
        }
        Ok(Self {
            k_vo,
            k_vc,
            dp_open,
            dp_close,
            m_st,
            m_rg,
            l_eff,
            a0_ref,
        })
    }

    /// Effective area at opening state `xi`, floored away from zero.
    pub fn effective_area(&self, xi: f64) -> Result<f64, crate::SimError> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(crate::SimError::Domain {
                op: "effective_area",
                what: "xi",
                value: xi,
            });
        }
        Ok(self.effective_area_unchecked(xi))
    }

    #[inline]
    pub(crate) fn effective_area_unchecked(&self, xi: f64) -> f64 {
        let a = (self.m_rg + xi * (self.m_st - self.m_rg)) * self.a0_ref;
        a.max(EFFECTIVE_AREA_FLOOR * self.a0_ref)
    }
}

/// Flow and opening state of one valve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValveState {
    /// Flow across the valve (m^3/s).
    pub q_v: f64,
    /// Opening state in [0, 1].
    pub xi: f64,
}

impl ValveState {
    pub const CLOSED: Self = Self { q_v: 0.0, xi: 0.0 };
}

/// `(B, L, R)` at opening state `xi`.
pub fn valve_coefficients(
    xi: f64,
    params: &ValveParams,
    props: &LymphProperties,
) -> (f64, f64, f64) {
    let a_eff = params.effective_area_unchecked(xi);
    let b = props.rho / (2.0 * a_eff * a_eff);
    let l = props.rho * params.l_eff / a_eff;
    let r = props.friction_coef() * params.l_eff / (a_eff * a_eff);
    (b, l, r)
}

/// `dq_v/dt` for a frozen pressure difference `dp` (Pa).
pub fn valve_flow_rhs(
    state: &ValveState,
    dp: f64,
    params: &ValveParams,
    props: &LymphProperties,
) -> f64 {
    let (b, l, r) = valve_coefficients(state.xi, params, props);
    (dp - r * state.q_v - b * state.q_v * state.q_v.abs_()) / l
}

/// `dxi/dt`: opening above `dp_open`, closing below `dp_close`, frozen in
/// between. Both branches vanish at their saturated end, keeping `xi` in
/// [0, 1].
pub fn valve_state_rhs(xi: f64, dp: f64, params: &ValveParams) -> f64 {
    if dp > params.dp_open {
        params.k_vo * (1.0 - xi) * (dp - params.dp_open)
    } else if dp < params.dp_close {
        params.k_vc * xi * (dp - params.dp_close)
    } else {
        0.0
    }
}

/// Combined right-hand side for `(q_v, xi)`.
pub fn valve_rhs(
    state: &ValveState,
    dp: f64,
    params: &ValveParams,
    props: &LymphProperties,
) -> [f64; 2] {
    [
        valve_flow_rhs(state, dp, params, props),
        valve_state_rhs(state.xi, dp, params),
    ]
}

/// Jacobian of [`valve_rhs`] on the active branch.
pub fn valve_jacobian(
    state: &ValveState,
    dp: f64,
    params: &ValveParams,
    props: &LymphProperties,
) -> [[f64; 2]; 2] {
    let q = state.q_v;
    let a_eff = params.effective_area_unchecked(state.xi);
    let (b, l, r) = valve_coefficients(state.xi, params, props);
    let floored = a_eff <= EFFECTIVE_AREA_FLOOR * params.a0_ref;
    let da_dxi = if floored {
        0.0
    } else {
        (params.m_st - params.m_rg) * params.a0_ref
    };
    // dB/dxi = -2 B A'/A, dR/dxi = -2 R A'/A, dL/dxi = -L A'/A
    let ratio = da_dxi / a_eff;
    let db = -2.0 * b * ratio;
    let dr = -2.0 * r * ratio;
    let dl = -l * ratio;
    let fq = dp - r * q - b * q * q.abs_();
    let mut jac = [[0.0; 2]; 2];
    jac[0][0] = (-r - 2.0 * b * q.abs_()) / l;
    jac[0][1] = (-dr * q - db * q * q.abs_()) / l - fq * dl / (l * l);
    if dp > params.dp_open {
        jac[1][1] = -params.k_vo * (dp - params.dp_open);
    } else if dp < params.dp_close {
        jac[1][1] = params.k_vc * (dp - params.dp_close);
    }
    jac
}

/// Advance `(q_v, xi)` by one implicit step under a frozen `dp`; `xi` is
/// clamped back to [0, 1] against integrator rounding.
pub fn valve_step(
    state: &ValveState,
    dp: f64,
    dt: f64,
    params: &ValveParams,
    props: &LymphProperties,
) -> Result<ValveState, OdeError> {
    let y = ode::lobatto_iiic_step(
        &[state.q_v, state.xi],
        dt,
        &|y| {
            valve_rhs(
                &ValveState { q_v: y[0], xi: y[1] },
                dp,
                params,
                props,
            )
        },
        &|y| {
            valve_jacobian(
                &ValveState { q_v: y[0], xi: y[1] },
                dp,
                params,
                props,
            )
        },
    )?;
    Ok(ValveState {
        q_v: y[0],
        xi: y[1].clamp(0.0, 1.0),
    })
}

/// Closed-form steady flow satisfying `dp = R q + B q |q|` at fixed `xi`.
pub fn steady_flow(xi: f64, dp: f64, params: &ValveParams, props: &LymphProperties) -> f64 {
    let (b, _, r) = valve_coefficients(xi, params, props);
    let q_abs = (-r + (r * r + 4.0 * b * dp.abs_()).sqrt_()) / (2.0 * b);
    if dp >= 0.0 {
        q_abs
    } else {
        -q_abs
    }
}

//! Electro-fluid-mechanical contraction model.
//!
//! Four ODEs per lymphangion couple an excitable (FitzHugh-Nagumo-like)
//! oscillator to the wall mechanics:
//!
//! ```text
//! dv/dt = a1 [ v (v - a2)(1 - a3 v) - w + v I ]
//! dw/dt = b1 v - b2 w
//! dI/dt = f_I(Abar, taubar, v, w, I)
//! ds/dt = f_s(v, w, s)
//! ```
//!
//! The stimulus `I` accumulates while `(v, w)` sit inside the activation
//! region `sqrt(v^2 + w^2) <= R_I`, at a rate combining a baseline calcium
//! influx, a stretch-activated influx growing with the space-averaged area
//! `Abar`, and a shear-induced inhibition `f_NO` decreasing with the
//! space-averaged wall shear stress `taubar`. Once the origin destabilises
//! (`I` past the trigger level) the oscillator fires an action potential,
//! the contraction state `s` rises towards 1 while `v > 0` and relaxes
//! afterwards, and `I` decays until the next cycle.

use crate::math::{FastPow, FloatExt};
use crate::ode::{self, OdeError};
use crate::ParamError;

use alloc::vec::Vec;

/// Parameters of the contraction model.
///
/// Use [`EfmcParams::builder`]; the stimulus growth rates `k_ca1`/`k_ca2`
/// are calibrated from `(f_min, f_ca, t_excited)` unless explicitly set.
#[derive(Debug, Clone, Copy)]
pub struct EfmcParams {
    /// FHN rate (1/s).
    pub a1: f64,
    /// FHN excitation threshold.
    pub a2: f64,
    /// FHN cubic coefficient.
    pub a3: f64,
    /// Recovery growth rate (1/s).
    pub b1: f64,
    /// Recovery decay rate (1/s); the stability analysis assumes 0.
    pub b2: f64,
    /// Contraction rise rate (1/s).
    pub c1: f64,
    /// Contraction decay rate (1/s).
    pub c2: f64,
    /// Radius of the activation region.
    pub r_i: f64,
    /// Stimulus decay rate outside the activation region (1/s).
    pub k_rel: f64,
    /// Baseline stimulus growth rate (1/s).
    pub k_ca1: f64,
    /// Stretch-activated stimulus growth rate (1/s).
    pub k_ca2: f64,
    /// Stretch exponent.
    pub n_ca: f64,
    /// Reference stretch area (m^2).
    pub a_ca: f64,
    /// Shear inhibition strength, in [0, 1].
    pub k_no: f64,
    /// Reference wall shear stress (Pa).
    pub tau_no: f64,
    /// Shear inhibition exponent.
    pub n_no: f64,
    /// Calibrated minimum frequency at vanishing stretch (Hz).
    pub f_min: f64,
    /// Calibrated frequency at `Abar = A_Ca` (Hz).
    pub f_ca: f64,
    /// Duration of one excitable excursion (s).
    pub t_excited: f64,
    pow_n_ca: FastPow,
}

/// Builder for [`EfmcParams`].
#[derive(Debug, Clone, Copy)]
pub struct EfmcParamsBuilder {
    a1: f64,
    a2: f64,
    a3: f64,
    b1: f64,
    b2: f64,
    c1: f64,
    c2: f64,
    r_i: f64,
    k_rel: f64,
    n_ca: f64,
    a_ca: f64,
    k_no: f64,
    tau_no: f64,
    n_no: f64,
    f_min: f64,
    f_ca: f64,
    t_excited: f64,
    k_ca_override: Option<(f64, f64)>,
}

impl EfmcParams {
    pub fn builder() -> EfmcParamsBuilder {
        EfmcParamsBuilder {
            a1: f64::NAN,
            a2: f64::NAN,
            a3: f64::NAN,
            b1: f64::NAN,
            b2: 0.0,
            c1: f64::NAN,
            c2: f64::NAN,
            r_i: f64::NAN,
            k_rel: f64::NAN,
            n_ca: f64::NAN,
            a_ca: f64::NAN,
            k_no: f64::NAN,
            tau_no: f64::NAN,
            n_no: f64::NAN,
            f_min: f64::NAN,
            f_ca: f64::NAN,
            t_excited: f64::NAN,
            k_ca_override: None,
        }
    }

    /// Trigger stimulus bounds: the origin is unstable for `I > a2` and the
    /// eigenvalues are real beyond `a2 + 2 sqrt(b1/a1)`.
    pub fn i_trigger_min(&self) -> f64 {
        self.a2
    }

    pub fn i_trigger_max(&self) -> f64 {
        self.a2 + 2.0 * (self.b1 / self.a1).sqrt_()
    }

    /// Default trigger value: the mean of the bounds.
    pub fn i_trigger_mean(&self) -> f64 {
        self.a2 + (self.b1 / self.a1).sqrt_()
    }

    /// Stimulus growth rate at a given mean area and shear,
    /// `(k_ca1 + k_ca2 (Abar/A_Ca)^n_Ca) f_NO(taubar)` (1/s).
    #[inline]
    pub fn stimulus_growth(&self, a_bar: f64, tau_bar: f64) -> f64 {
        (self.k_ca1 + self.k_ca2 * self.pow_n_ca.eval(a_bar / self.a_ca)) * f_no(tau_bar, self)
    }
}

impl EfmcParamsBuilder {
    pub fn fhn(mut self, a1: f64, a2: f64, a3: f64, b1: f64, b2: f64) -> Self {
        self.a1 = a1;
        self.a2 = a2;
        self.a3 = a3;
        self.b1 = b1;
        self.b2 = b2;
        self
    }

    pub fn contraction_rates(mut self, c1: f64, c2: f64) -> Self {
        self.c1 = c1;
        self.c2 = c2;
        self
    }

    pub fn activation(mut self, r_i: f64, k_rel: f64) -> Self {
        self.r_i = r_i;
        self.k_rel = k_rel;
        self
    }

    pub fn stretch(mut self, n_ca: f64, a_ca: f64) -> Self {
        self.n_ca = n_ca;
        self.a_ca = a_ca;
        self
    }

    pub fn shear_inhibition(mut self, k_no: f64, tau_no: f64, n_no: f64) -> Self {
        self.k_no = k_no;
        self.tau_no = tau_no;
        self.n_no = n_no;
        self
    }

    /// Frequencies in Hz; `t_excited` in seconds.
    pub fn frequencies(mut self, f_min: f64, f_ca: f64, t_excited: f64) -> Self {
        self.f_min = f_min;
        self.f_ca = f_ca;
        self.t_excited = t_excited;
        self
    }

    /// Bypass calibration with explicit stimulus growth rates.
    pub fn k_ca(mut self, k_ca1: f64, k_ca2: f64) -> Self {
        self.k_ca_override = Some((k_ca1, k_ca2));
        self
    }

    pub fn build(self) -> Result<EfmcParams, ParamError> {
        if !(self.a1 > 0.0) {
            return Err(ParamError::new("a1", "must be > 0", self.a1));
        }
        if !(self.b1 > 0.0) {
            return Err(ParamError::new("b1", "must be > 0", self.b1));
        }
        if self.b2 != 0.0 {
            return Err(ParamError::new("b2", "must be 0", self.b2));
        }
        if !(self.c1 >= 0.0) {
            return Err(ParamError::new("c1", "must be >= 0", self.c1));
        }
        if !(self.c2 >= 0.0) {
            return Err(ParamError::new("c2", "must be >= 0", self.c2));
        }
        if !(self.r_i > 0.0) {
            return Err(ParamError::new("R_I", "must be > 0", self.r_i));
        }
        if !(self.k_rel >= 0.0) {
            return Err(ParamError::new("k_rel", "must be >= 0", self.k_rel));
        }
        if !(self.a_ca > 0.0) {
            return Err(ParamError::new("A_Ca", "must be > 0", self.a_ca));
        }
        if !(0.0..=1.0).contains(&self.k_no) {
            return Err(ParamError::new("k_NO", "must be in [0, 1]", self.k_no));
        }
        if !(self.tau_no > 0.0) {
            return Err(ParamError::new("tau_NO", "must be > 0", self.tau_no));
        }
        let mut params = EfmcParams {
            a1: self.a1,
            a2: self.a2,
            a3: self.a3,
            b1: self.b1,
            b2: self.b2,
            c1: self.c1,
            c2: self.c2,
            r_i: self.r_i,
            k_rel: self.k_rel,
            k_ca1: 0.0,
            k_ca2: 0.0,
            n_ca: self.n_ca,
            a_ca: self.a_ca,
            k_no: self.k_no,
            tau_no: self.tau_no,
            n_no: self.n_no,
            f_min: self.f_min,
            f_ca: self.f_ca,
            t_excited: self.t_excited,
            pow_n_ca: FastPow::new(self.n_ca),
        };
        let (k_ca1, k_ca2) = match self.k_ca_override {
            Some(pair) => pair,
            None => derive_k_ca(&params)?,
        };
        params.k_ca1 = k_ca1;
        params.k_ca2 = k_ca2;
        Ok(params)
    }
}

/// State of the contraction model of one lymphangion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfmcState {
    /// Excitable variable.
    pub v: f64,
    /// Recovery variable.
    pub w: f64,
    /// Stimulus.
    pub i: f64,
    /// Contraction state, in [0, 1].
    pub s: f64,
}

impl EfmcState {
    pub const fn new(v: f64, w: f64, i: f64, s: f64) -> Self {
        Self { v, w, i, s }
    }

    /// Rest state with a small seed on the excitable variable; with
    /// `v = w = 0` exactly the trajectory never leaves the origin.
    pub const fn seeded(v0: f64) -> Self {
        Self::new(v0, 0.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.v, self.w, self.i, self.s]
    }

    pub fn from_array(y: [f64; 4]) -> Self {
        Self::new(y[0], y[1], y[2], y[3])
    }

    /// Distance of `(v, w)` from the stationary point.
    pub fn phase_radius(&self) -> f64 {
        (self.v * self.v + self.w * self.w).sqrt_()
    }
}

/// Shear-induced inhibition factor, bounded by `1 - k_NO` (strong shear) and
/// `1` (no shear).
pub fn f_no(tau_bar: f64, params: &EfmcParams) -> f64 {
    let x = (tau_bar / params.tau_no).abs_().powf_(params.n_no);
    1.0 - params.k_no * (2.0 / (1.0 + (-x).exp_()) - 1.0)
}

/// Stimulus dynamics: growth inside the activation region, exponential decay
/// outside of it.
pub fn f_i(a_bar: f64, tau_bar: f64, state: &EfmcState, params: &EfmcParams) -> f64 {
    if state.phase_radius() <= params.r_i {
        params.stimulus_growth(a_bar, tau_bar)
    } else {
        -state.i * params.k_rel
    }
}

/// Contraction-state dynamics: rises while the action potential is positive,
/// relaxes once the recovery variable falls back below 1.
pub fn f_s(state: &EfmcState, params: &EfmcParams) -> f64 {
    if state.v > 0.0 {
        params.c1 * state.v * state.w * (1.0 - state.s)
    } else {
        -params.c2 * state.s * (1.0 - state.w).max(0.0)
    }
}

/// The modified FHN core: time derivatives of `(v, w)` for a given stimulus.
pub fn fhn_rhs(v: f64, w: f64, i: f64, params: &EfmcParams) -> (f64, f64) {
    let dv = params.a1 * (v * (v - params.a2) * (1.0 - params.a3 * v) - w + v * i);
    let dw = params.b1 * v - params.b2 * w;
    (dv, dw)
}

/// Full right-hand side `(dv, dw, dI, ds)`.
pub fn efmc_rhs(state: &EfmcState, a_bar: f64, tau_bar: f64, params: &EfmcParams) -> [f64; 4] {
    let (dv, dw) = fhn_rhs(state.v, state.w, state.i, params);
    [
        dv,
        dw,
        f_i(a_bar, tau_bar, state, params),
        f_s(state, params),
    ]
}

/// Jacobian of [`efmc_rhs`] on the branch active at `state`.
pub fn efmc_jacobian(
    state: &EfmcState,
    _a_bar: f64,
    _tau_bar: f64,
    params: &EfmcParams,
) -> [[f64; 4]; 4] {
    let (v, w, s) = (state.v, state.w, state.s);
    let mut jac = [[0.0; 4]; 4];
    // dv row
    jac[0][0] = params.a1
        * ((v - params.a2) * (1.0 - params.a3 * v) + v * (1.0 - params.a3 * v)
            - params.a3 * v * (v - params.a2)
            + state.i);
    jac[0][1] = -params.a1;
    jac[0][2] = params.a1 * v;
    // dw row
    jac[1][0] = params.b1;
    jac[1][1] = -params.b2;
    // dI row: constant inside the activation region, decay outside
    if state.phase_radius() > params.r_i {
        jac[2][2] = -params.k_rel;
    }
    // ds row
    if v > 0.0 {
        jac[3][0] = params.c1 * w * (1.0 - s);
        jac[3][1] = params.c1 * v * (1.0 - s);
        jac[3][3] = -params.c1 * v * w;
    } else {
        let gate = 1.0 - w;
        if gate > 0.0 {
            jac[3][1] = params.c2 * s;
            jac[3][3] = -params.c2 * gate;
        }
    }
    jac
}

/// Nature of the stationary point `(v, w) = (0, 0)` as a function of the
/// stimulus level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryClass {
    StableNode,
    StableSpiral,
    UnstableSpiral,
    UnstableNode,
}

/// Classify the stationary point by the eigenvalues
/// `[-a1 (a2 - I) +- sqrt(a1^2 (a2 - I)^2 - 4 a1 b1)] / 2`.
pub fn classify_stationary(i: f64, params: &EfmcParams) -> StationaryClass {
    let spread = 2.0 * (params.b1 / params.a1).sqrt_();
    if i < params.a2 - spread {
        StationaryClass::StableNode
    } else if i < params.a2 {
        StationaryClass::StableSpiral
    } else if i <= params.a2 + spread {
        StationaryClass::UnstableSpiral
    } else {
        StationaryClass::UnstableNode
    }
}

/// Calibrate the stimulus growth rates so that the contraction frequency is
/// `f_min` at vanishing stretch and `f_ca` at `Abar = A_Ca` (zero shear):
///
/// ```text
/// k_ca1 = Imean / (1/f_min - t_excited)
/// k_ca2 = Imean / (1/f_ca - t_excited) - k_ca1
/// ```
pub fn derive_k_ca(params: &EfmcParams) -> Result<(f64, f64), ParamError> {
    let i_trigger = params.i_trigger_mean();
    let t_act_max = 1.0 / params.f_min - params.t_excited;
    let t_act_ca = 1.0 / params.f_ca - params.t_excited;
    if !(t_act_max > 0.0) {
        return Err(ParamError::new(
            "f_min",
            "activation time 1/f_min - t_excited must be > 0",
            params.f_min,
        ));
    }
    if !(t_act_ca > 0.0) {
        return Err(ParamError::new(
            "f_ca",
            "activation time 1/f_ca - t_excited must be > 0",
            params.f_ca,
        ));
    }
    if params.f_ca < params.f_min {
        return Err(ParamError::new("f_ca", "must be >= f_min", params.f_ca));
    }
    let k_ca1 = i_trigger / t_act_max;
    let k_ca2 = i_trigger / t_act_ca - k_ca1;
    Ok((k_ca1, k_ca2))
}

/// Contraction frequency predicted from the activation-time model,
/// `f = 1 / (t_excited + I / stimulus_growth)` (Hz).
///
/// Strictly decreasing in `|taubar|` and strictly increasing in `Abar`.
pub fn predicted_frequency(a_bar: f64, tau_bar: f64, i_trigger: f64, params: &EfmcParams) -> f64 {
    let t_activation = i_trigger / params.stimulus_growth(a_bar, tau_bar);
    1.0 / (params.t_excited + t_activation)
}

/// Advance the contraction model by one implicit step at frozen `Abar`,
/// `taubar`; clamps `s` to [0, 1] and `I` to non-negative values.
pub fn efmc_step(
    state: &EfmcState,
    a_bar: f64,
    tau_bar: f64,
    dt: f64,
    params: &EfmcParams,
) -> Result<EfmcState, OdeError> {
    let y = ode::lobatto_iiic_step(
        &state.as_array(),
        dt,
        &|y| efmc_rhs(&EfmcState::from_array(*y), a_bar, tau_bar, params),
        &|y| efmc_jacobian(&EfmcState::from_array(*y), a_bar, tau_bar, params),
    )?;
    let mut next = EfmcState::from_array(y);
    next.s = next.s.clamp(0.0, 1.0);
    next.i = next.i.max(0.0);
    Ok(next)
}

/// One contraction onset: the time the trajectory left the activation region.
#[derive(Debug, Clone, Copy)]
pub struct OnsetTimes {
    pub exit: f64,
    pub reentry: f64,
}

/// Integrate the model uncoupled from the PDEs (fixed `Abar`, `taubar`) and
/// record every excursion out of the activation region.
pub fn collect_excursions(
    params: &EfmcParams,
    state0: EfmcState,
    a_bar: f64,
    tau_bar: f64,
    dt: f64,
    t_end: f64,
) -> Result<Vec<OnsetTimes>, OdeError> {
    let mut state = state0;
    let mut t = 0.0;
    let mut excursions: Vec<OnsetTimes> = Vec::new();
    let mut outside = state.phase_radius() > params.r_i;
    let mut exit_time = if outside { Some(0.0) } else { None };
    while t < t_end {
        state = efmc_step(&state, a_bar, tau_bar, dt, params)?;
        t += dt;
        let now_outside = state.phase_radius() > params.r_i;
        if now_outside && !outside {
            exit_time = Some(t);
        } else if !now_outside && outside {
            if let Some(exit) = exit_time.take() {
                excursions.push(OnsetTimes {
                    exit,
                    reentry: t,
                });
            }
        }
        outside = now_outside;
    }
    Ok(excursions)
}

/// Measure the excursion duration of the uncoupled cycle, i.e. the time from
/// leaving the activation region to re-entering it. Can be used to override
/// the default `t_excited`.
pub fn measure_t_excited(params: &EfmcParams, dt: f64) -> Result<f64, OdeError> {
    // Plenty of time for at least two cycles at the minimum frequency.
    let t_end = 3.0 / params.f_min;
    let tiny_area = 1.0e-6 * params.a_ca;
    let excursions = collect_excursions(params, EfmcState::seeded(0.1), tiny_area, 0.0, dt, t_end)?;
    match excursions.last() {
        Some(e) => Ok(e.reentry - e.exit),
        None => Err(OdeError::NoEvent),
    }
}

/// Measure the realised contraction frequency of the uncoupled model at
/// fixed `Abar`, `taubar` from the spacing of consecutive onsets (Hz). The
/// first interval is discarded as transient.
pub fn measure_frequency(
    params: &EfmcParams,
    a_bar: f64,
    tau_bar: f64,
    dt: f64,
    cycles: usize,
) -> Result<f64, OdeError> {
    let f_guess = predicted_frequency(a_bar, tau_bar, params.i_trigger_mean(), params);
    let t_end = (cycles as f64 + 2.5) / f_guess;
    let excursions = collect_excursions(params, EfmcState::seeded(0.1), a_bar, tau_bar, dt, t_end)?;
    if excursions.len() < 3 {
        return Err(OdeError::NoEvent);
    }
    let onsets: Vec<f64> = excursions.iter().map(|e| e.exit).collect();
    // mean inter-onset interval, skipping the first (transient) one
    let first = 1;
    let span = onsets[onsets.len() - 1] - onsets[first];
    Ok((onsets.len() - 1 - first) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use approx::assert_relative_eq;

    #[test]
    fn f_no_bounds_and_reference_value() {
        let p = presets::reference_efmc();
        assert_eq!(f_no(0.0, &p), 1.0);
        assert_relative_eq!(f_no(1.0e9, &p), 1.0 - p.k_no, max_relative = 1e-12);
        assert_relative_eq!(f_no(-1.0e9, &p), 1.0 - p.k_no, max_relative = 1e-12);
        // tau = tau_NO with k_NO = 0.8
        let expected = 1.0 - 0.8 * (2.0 / (1.0 + (-1.0f64).exp()) - 1.0);
        assert_relative_eq!(f_no(p.tau_no, &p), expected, max_relative = 1e-12);
        assert_relative_eq!(f_no(p.tau_no, &p), 0.63031, max_relative = 1e-4);
    }

    #[test]
    fn f_i_branches() {
        let p = presets::reference_efmc();
        let inside = EfmcState::new(0.0, 0.0, 0.3, 0.0);
        assert_relative_eq!(
            f_i(p.a_ca, 0.0, &inside, &p),
            p.k_ca1 + p.k_ca2,
            max_relative = 1e-12
        );
        // stretch term suppressed 2^n_ca at half the reference area
        assert_relative_eq!(
            f_i(0.5 * p.a_ca, 0.0, &inside, &p),
            p.k_ca1 + p.k_ca2 * 0.5f64.powi(10),
            max_relative = 1e-12
        );
        let outside = EfmcState::new(0.2, 0.2, 0.0, 0.0);
        assert_eq!(f_i(p.a_ca, 0.0, &outside, &p), 0.0);
        let outside_with_i = EfmcState::new(0.2, 0.2, 0.4, 0.0);
        assert_relative_eq!(
            f_i(p.a_ca, 0.0, &outside_with_i, &p),
            -0.4 * p.k_rel,
            max_relative = 1e-12
        );
        // region test uses <= on the boundary
        let boundary = EfmcState::new(p.r_i, 0.0, 1.0, 0.0);
        assert!(f_i(p.a_ca, 0.0, &boundary, &p) > 0.0);
    }

    #[test]
    fn f_s_branches() {
        let p = presets::reference_efmc();
        assert_eq!(f_s(&EfmcState::new(0.1, 0.2, 0.0, 1.0), &p), 0.0);
        assert_eq!(f_s(&EfmcState::new(-0.1, 1.3, 0.0, 0.7), &p), 0.0);
        assert_relative_eq!(
            f_s(&EfmcState::new(0.02, 0.1, 0.0, 0.0), &p),
            0.22,
            max_relative = 1e-12
        );
        let relaxing = f_s(&EfmcState::new(-0.01, 0.2, 0.0, 0.5), &p);
        assert_relative_eq!(relaxing, -p.c2 * 0.5 * 0.8, max_relative = 1e-12);
    }

    #[test]
    fn origin_is_stationary_for_any_stimulus() {
        let p = presets::reference_efmc();
        for i in [0.0, 0.3, 0.9, 5.0] {
            let rhs = efmc_rhs(&EfmcState::new(0.0, 0.0, i, 0.0), p.a_ca, 0.0, &p);
            assert_eq!(rhs[0], 0.0);
            assert_eq!(rhs[1], 0.0);
            assert_eq!(rhs[3], 0.0);
        }
    }

    #[test]
    fn classification_reference_thresholds() {
        // a1 = 100, b1 = 3, a2 = 0.5 -> thresholds 0.15359 / 0.5 / 0.84641
        let p = presets::reference_efmc();
        assert_eq!(classify_stationary(0.0, &p), StationaryClass::StableNode);
        assert_eq!(classify_stationary(0.3, &p), StationaryClass::StableSpiral);
        assert_eq!(
            classify_stationary(0.5 + 1.0e-12, &p),
            StationaryClass::UnstableSpiral
        );
        assert_eq!(classify_stationary(1.0, &p), StationaryClass::UnstableNode);
    }

    #[test]
    fn k_ca_calibration_reference_values() {
        let p = presets::reference_efmc();
        let i_mean = p.i_trigger_mean();
        assert_relative_eq!(i_mean, 0.5 + 0.03f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(i_mean, 0.67321, max_relative = 1e-5);
        assert_relative_eq!(p.k_ca1, i_mean / 18.0, max_relative = 1e-12);
        assert_relative_eq!(p.k_ca1, 0.037400, max_relative = 1e-4);
        assert_relative_eq!(p.k_ca2, i_mean / 1.0 - p.k_ca1, max_relative = 1e-12);
        assert_relative_eq!(p.k_ca2, 0.63581, max_relative = 1e-5);
    }

    #[test]
    fn k_ca_degenerate_calibration() {
        let a0 = presets::reference_geometry().a0;
        let p = EfmcParams::builder()
            .fhn(100.0, 0.5, 25.0, 3.0, 0.0)
            .contraction_rates(110.0, 3.0)
            .activation(0.1, 10.0)
            .stretch(10.0, 7.75 * a0)
            .shear_inhibition(0.8, 0.6, 1.2)
            .frequencies(10.0 / 60.0, 10.0 / 60.0, 2.0)
            .build()
            .unwrap();
        assert_relative_eq!(p.k_ca2, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn calibration_rejects_nonpositive_activation_time() {
        let a0 = presets::reference_geometry().a0;
        let result = EfmcParams::builder()
            .fhn(100.0, 0.5, 25.0, 3.0, 0.0)
            .contraction_rates(110.0, 3.0)
            .activation(0.1, 10.0)
            .stretch(10.0, 7.75 * a0)
            .shear_inhibition(0.8, 0.6, 1.2)
            .frequencies(40.0 / 60.0, 45.0 / 60.0, 2.0)
            .build();
        assert!(result.is_err());
    }

    #[test]
    fn predicted_frequency_hits_calibration_endpoints() {
        let p = presets::reference_efmc();
        let i_mean = p.i_trigger_mean();
        let f_at_ca = predicted_frequency(p.a_ca, 0.0, i_mean, &p);
        assert_relative_eq!(f_at_ca, p.f_ca, max_relative = 1e-10);
        let f_at_zero = predicted_frequency(1.0e-9 * p.a_ca, 0.0, i_mean, &p);
        assert_relative_eq!(f_at_zero, p.f_min, max_relative = 1e-10);
    }

    #[test]
    fn predicted_frequency_monotonicity_and_band_order() {
        let p = presets::reference_efmc();
        let i_mean = p.i_trigger_mean();
        // decreasing in |tau|
        let mut prev = predicted_frequency(p.a_ca, 0.0, i_mean, &p);
        for k in 1..100 {
            let tau = 0.05 * k as f64;
            let f = predicted_frequency(p.a_ca, tau, i_mean, &p);
            assert!(f < prev);
            assert_relative_eq!(
                f,
                predicted_frequency(p.a_ca, -tau, i_mean, &p),
                max_relative = 1e-14
            );
            prev = f;
        }
        // increasing in Abar
        let mut prev = predicted_frequency(0.01 * p.a_ca, 0.0, i_mean, &p);
        for k in 1..100 {
            let a = (0.01 + 0.08 * k as f64) * p.a_ca;
            let f = predicted_frequency(a, 0.0, i_mean, &p);
            assert!(f > prev);
            prev = f;
        }
        // band ordering for any (Abar, taubar)
        for a in [0.5 * p.a_ca, p.a_ca, 1.3 * p.a_ca] {
            for tau in [0.0, 0.3, 1.2] {
                let f_max = predicted_frequency(a, tau, p.i_trigger_max(), &p);
                let f_mean = predicted_frequency(a, tau, p.i_trigger_mean(), &p);
                let f_min = predicted_frequency(a, tau, p.i_trigger_min(), &p);
                assert!(f_max < f_mean && f_mean < f_min);
            }
        }
    }

    #[test]
    fn origin_traps_exact_zero_initial_condition() {
        let p = presets::reference_efmc();
        let mut state = EfmcState::new(0.0, 0.0, 0.0, 0.0);
        for _ in 0..20_000 {
            state = efmc_step(&state, p.a_ca, 0.0, 1.0e-3, &p).unwrap();
        }
        assert_eq!(state.v, 0.0);
        assert_eq!(state.w, 0.0);
        assert_eq!(state.s, 0.0);
        // the stimulus still accumulates, but nothing fires
        assert!(state.i > 1.0);
    }

    #[test]
    fn constant_stimulus_decay_and_escape() {
        let p = presets::reference_efmc();
        // I below a2: trajectory decays to the origin
        let i_low = p.a2 - 0.05;
        let (mut v, mut w) = (0.4 * p.r_i, 0.2 * p.r_i);
        let dt = 1.0e-4;
        for _ in 0..100_000 {
            let (dv, dw) = fhn_rhs(v, w, i_low, &p);
            v += dt * dv;
            w += dt * dw;
        }
        assert!((v * v + w * w).sqrt() < 1.0e-4);

        // I above a2 + 2 sqrt(b1/a1): trajectory escapes the activation ball
        let i_high = p.i_trigger_max() + 0.05;
        let (mut v, mut w) = (1.0e-3, 0.0);
        let mut escaped = false;
        for _ in 0..1_000_000 {
            let (dv, dw) = fhn_rhs(v, w, i_high, &p);
            v += dt * dv;
            w += dt * dw;
            if (v * v + w * w).sqrt() > p.r_i {
                escaped = true;
                break;
            }
        }
        assert!(escaped);
    }

    #[test]
    fn contraction_state_stays_in_unit_interval() {
        let p = presets::reference_efmc();
        let mut state = EfmcState::seeded(0.1);
        let mut s_max: f64 = 0.0;
        for _ in 0..400_000 {
            state = efmc_step(&state, 7.9 * crate::presets::reference_geometry().a0, 0.0, 2.5e-4, &p)
                .unwrap();
            assert!((0.0..=1.0).contains(&state.s));
            assert!(state.i >= 0.0);
            s_max = s_max.max(state.s);
        }
        // the cycle actually produced contractions
        assert!(s_max > 0.5);
    }

    #[test]
    fn measured_excursion_time_near_two_seconds() {
        let p = presets::reference_efmc();
        let t_exc = measure_t_excited(&p, 5.0e-4).unwrap();
        assert!((1.0..3.5).contains(&t_exc), "t_excited = {t_exc}");
    }

    #[test]
    fn jacobian_matches_finite_differences_on_smooth_branches() {
        let p = presets::reference_efmc();
        let states = [
            EfmcState::new(0.02, 0.01, 0.3, 0.2),   // inside ball, v > 0
            EfmcState::new(0.3, 0.2, 0.4, 0.5),     // outside ball, v > 0
            EfmcState::new(-0.2, 0.3, 0.1, 0.5),    // outside ball, v < 0
        ];
        let a_bar = p.a_ca;
        for state in &states {
            let jac = efmc_jacobian(state, a_bar, 0.0, &p);
            let y0 = state.as_array();
            for col in 0..4 {
                let h = 1.0e-7 * (1.0 + y0[col].abs());
                let mut yp = y0;
                let mut ym = y0;
                yp[col] += h;
                ym[col] -= h;
                let fp = efmc_rhs(&EfmcState::from_array(yp), a_bar, 0.0, &p);
                let fm = efmc_rhs(&EfmcState::from_array(ym), a_bar, 0.0, &p);
                for row in 0..4 {
                    let fd = (fp[row] - fm[row]) / (2.0 * h);
                    assert!(
                        (fd - jac[row][col]).abs() <= 1.0e-5 * (1.0 + fd.abs()),
                        "J[{row}][{col}] analytic {} vs fd {fd}",
                        jac[row][col]
                    );
                }
            }
        }
    }
}

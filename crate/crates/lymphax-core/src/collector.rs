//! Collector assembly and the coupled time loop.
//!
//! A collector is an ordered chain of lymphangions with an interface at each
//! junction and at both ends. Interior interfaces always carry valves; the
//! terminal interfaces carry either a valve fed by the prescribed reservoir
//! pressure (a chain "in situ"), an imposed-pressure boundary (a cannulated
//! chain), or a transmissive boundary (verification runs).
//!
//! One step advances every subsystem in a fixed order:
//!
//! 1. take the data at `t^n`,
//! 2. compute the global time step from the CFL condition over all vessels,
//! 3. integrate every valve ODE pair with the pressure difference frozen at
//!    `t^n`,
//! 4. build the boundary fluxes from the new valve flows (or the imposed
//!    pressures) through the Riemann-invariant solves,
//! 5. build the interior SLIC fluxes with the contraction state at `t^n`,
//! 6. build the friction sources (second order, half-step states),
//! 7. apply the conservative update,
//! 8. integrate each vessel's contraction ODEs with the space-averaged area
//!    and wall shear stress at `t^{n+1}`.
//!
//! The loop is deterministic: identical configurations produce bit-identical
//! trajectories.

use crate::coupling::{assemble_dp, boundary_state_from_pressure, boundary_state_from_valve_flow, BoundarySide};
use crate::efmc::{efmc_step, EfmcParams, EfmcState};
use crate::solver::{
    apply_update, compute_interior_fluxes, vessel_dt, ConservedField, Grid1D, Limiter,
    SlicWorkspace,
};
use crate::valve::{valve_step, ValveParams, ValveState};
use crate::wall::{wall_shear_stress_unchecked, LymphProperties, TubeContext, VesselWall};
use crate::{ParamError, SimError};

use alloc::vec::Vec;

/// Prescribed boundary pressure as a function of time.
#[derive(Debug, Clone)]
pub enum PressureProgram {
    Constant(f64),
    /// Piecewise-linear `(t, p)` breakpoints; clamped outside the range.
    Breakpoints(Vec<(f64, f64)>),
}

impl PressureProgram {
    pub fn constant(p: f64) -> Self {
        PressureProgram::Constant(p)
    }

    pub fn breakpoints(points: Vec<(f64, f64)>) -> Result<Self, ParamError> {
        if points.is_empty() {
            return Err(ParamError::new("breakpoints", "must not be empty", 0.0));
        }
        for pair in points.windows(2) {
            if !(pair[1].0 > pair[0].0) {
                return Err(ParamError::new(
                    "breakpoints",
                    "times must be strictly increasing",
                    pair[1].0,
                ));
            }
        }
        Ok(PressureProgram::Breakpoints(points))
    }

    /// Pressure at time `t` (Pa).
    pub fn at(&self, t: f64) -> f64 {
        match self {
            PressureProgram::Constant(p) => *p,
            PressureProgram::Breakpoints(pts) => {
                if t <= pts[0].0 {
                    return pts[0].1;
                }
                if t >= pts[pts.len() - 1].0 {
                    return pts[pts.len() - 1].1;
                }
                let idx = pts.partition_point(|&(tp, _)| tp <= t);
                let (t0, p0) = pts[idx - 1];
                let (t1, p1) = pts[idx];
                p0 + (p1 - p0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

/// Valve parameters without the reference area, which the collector derives
/// from the adjacent vessels (their mean equilibrium area).
#[derive(Debug, Clone, Copy)]
pub struct ValveSpec {
    pub k_vo: f64,
    pub k_vc: f64,
    pub dp_open: f64,
    pub dp_close: f64,
    pub m_st: f64,
    pub m_rg: f64,
    pub l_eff: f64,
}

impl Default for ValveSpec {
    fn default() -> Self {
        Self {
            k_vo: 10.0,
            k_vc: 10.0,
            dp_open: 0.0,
            dp_close: 0.0,
            m_st: 1.0,
            m_rg: 0.0,
            l_eff: 0.1e-3,
        }
    }
}

/// Boundary condition at one interface.
#[derive(Debug, Clone, Copy)]
pub enum BoundarySpec {
    Valve(ValveSpec),
    /// Imposed reservoir pressure (terminal interfaces only).
    Pressure,
    /// Zeroth-order outflow (verification runs; terminal interfaces only).
    Transmissive,
}

/// One lymphangion of the chain.
#[derive(Debug, Clone)]
pub struct VesselSpec {
    pub wall: VesselWall,
    pub efmc: EfmcParams,
    pub cells: usize,
    /// Initial excitable seed `v(0)`.
    pub v0: f64,
}

struct Vessel {
    wall: VesselWall,
    efmc_params: EfmcParams,
    grid: Grid1D,
    field: ConservedField,
    efmc: EfmcState,
    ws: SlicWorkspace,
}

enum Interface {
    Valve {
        params: ValveParams,
        state: ValveState,
    },
    Pressure {
        /// Warm start for the tube-law inversion.
        last_area: f64,
    },
    Transmissive,
}

/// Numerical options of the time loop.
#[derive(Debug, Clone, Copy)]
pub struct NumericsConfig {
    pub cfl: f64,
    pub limiter: Limiter,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            cfl: 0.9,
            limiter: Limiter::Minmod,
        }
    }
}

/// Recording options of [`Collector::run`].
#[derive(Debug, Clone, Copy)]
pub struct RunConfig {
    /// Final time (s).
    pub t_output: f64,
    /// Record every `record_stride`-th step (plus the initial and final states).
    pub record_stride: usize,
    /// Also keep full per-cell frames (memory-heavy; scalar probes are
    /// always recorded).
    pub full_frames: bool,
}

impl RunConfig {
    pub fn new(t_output: f64) -> Self {
        Self {
            t_output,
            record_stride: 10,
            full_frames: false,
        }
    }
}

/// Recorded state of one vessel over time. Scalar probes are taken at the
/// centre cell; `volume` is `int A dx` over the whole vessel.
#[derive(Debug, Clone, Default)]
pub struct VesselSeries {
    pub center_cell: usize,
    pub a_center: Vec<f64>,
    pub q_center: Vec<f64>,
    pub p_center: Vec<f64>,
    pub tau_center: Vec<f64>,
    pub volume: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub stimulus: Vec<f64>,
    pub s: Vec<f64>,
    pub a_bar: Vec<f64>,
    pub tau_bar: Vec<f64>,
    /// Per-cell `(A, q)` frames, populated only with `full_frames`.
    pub frames: Vec<Frame>,
}

#[derive(Debug, Clone)]
pub struct Frame {
    pub a: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ValveSeries {
    pub q_v: Vec<f64>,
    pub xi: Vec<f64>,
}

/// Recorded trajectory of a run.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub time: Vec<f64>,
    pub vessels: Vec<VesselSeries>,
    /// Indexed by interface; `None` where the interface carries no valve.
    pub valves: Vec<Option<ValveSeries>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }
}

/// Result of a run: the trajectory recorded so far and the failure, if any.
/// A partial trajectory is always available for post-mortem analysis.
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub error: Option<SimError>,
}

pub struct Collector {
    props: LymphProperties,
    vessels: Vec<Vessel>,
    interfaces: Vec<Interface>,
    p_in: PressureProgram,
    p_out: PressureProgram,
    numerics: NumericsConfig,
    t: f64,
    steps: u64,
    slope_fallbacks: u64,
}

impl Collector {
    /// Assemble a chain. `interfaces` must hold `vessels.len() + 1` entries;
    /// interior interfaces must be valves; pressure and transmissive
    /// boundaries are only valid at the ends. The initial state is
    /// `p(x, 0) = P_in(0)`, `u(x, 0) = 0`, seeded contraction ODEs and
    /// closed valves.
    pub fn new(
        vessels: Vec<VesselSpec>,
        interfaces: Vec<BoundarySpec>,
        p_in: PressureProgram,
        p_out: PressureProgram,
        props: LymphProperties,
        numerics: NumericsConfig,
    ) -> Result<Self, SimError> {
        if vessels.is_empty() {
            return Err(SimError::Config("a collector needs at least one lymphangion"));
        }
        if interfaces.len() != vessels.len() + 1 {
            return Err(SimError::Config(
                "interface count must be lymphangion count + 1",
            ));
        }
        if !(numerics.cfl > 0.0 && numerics.cfl < 1.0) {
            return Err(SimError::Config("CFL must lie in (0, 1)"));
        }
        let last = interfaces.len() - 1;
        let p0 = p_in.at(0.0);

        let mut built_vessels = Vec::with_capacity(vessels.len());
        for spec in &vessels {
            let grid = Grid1D::new(spec.wall.geometry.length, spec.cells)?;
            let a_init = spec.wall.area_from_pressure(p0, 0.0)?;
            built_vessels.push(Vessel {
                field: ConservedField::uniform(spec.cells, a_init, 0.0),
                efmc: EfmcState::seeded(spec.v0),
                ws: SlicWorkspace::new(spec.cells),
                grid,
                wall: spec.wall,
                efmc_params: spec.efmc,
            });
        }

        let mut built_interfaces = Vec::with_capacity(interfaces.len());
        for (k, spec) in interfaces.iter().enumerate() {
            match spec {
                BoundarySpec::Valve(v) => {
                    // reference area: mean of the adjacent equilibrium areas
                    let a0_ref = match (k.checked_sub(1), (k < vessels.len()).then_some(k)) {
                        (Some(up), Some(down)) => {
                            0.5 * (vessels[up].wall.geometry.a0 + vessels[down].wall.geometry.a0)
                        }
                        (Some(up), None) => vessels[up].wall.geometry.a0,
                        (None, Some(down)) => vessels[down].wall.geometry.a0,
                        (None, None) => unreachable!(),
                    };
                    let params = ValveParams::new(
                        v.k_vo, v.k_vc, v.dp_open, v.dp_close, v.m_st, v.m_rg, v.l_eff, a0_ref,
                    )?;
                    built_interfaces.push(Interface::Valve {
                        params,
                        state: ValveState::CLOSED,
                    });
                }
                BoundarySpec::Pressure => {
                    if k != 0 && k != last {
                        return Err(SimError::Config(
                            "imposed-pressure boundaries are only valid at the collector ends",
                        ));
                    }
                    let neighbour = if k == 0 { 0 } else { k - 1 };
                    built_interfaces.push(Interface::Pressure {
                        last_area: built_vessels[neighbour].field.a[0],
                    });
                }
                BoundarySpec::Transmissive => {
                    if k != 0 && k != last {
                        return Err(SimError::Config(
                            "transmissive boundaries are only valid at the collector ends",
                        ));
                    }
                    built_interfaces.push(Interface::Transmissive);
                }
            }
        }

        Ok(Self {
            props,
            vessels: built_vessels,
            interfaces: built_interfaces,
            p_in,
            p_out,
            numerics,
            t: 0.0,
            steps: 0,
            slope_fallbacks: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    /// Cells that needed a first-order slope fallback so far.
    pub fn slope_fallbacks(&self) -> u64 {
        self.slope_fallbacks
    }

    pub fn vessel_count(&self) -> usize {
        self.vessels.len()
    }

    pub fn cells_of(&self, vessel: usize) -> usize {
        self.vessels[vessel].grid.m
    }

    /// Access a vessel's current conserved field (test and analysis hook).
    pub fn field(&self, vessel: usize) -> &ConservedField {
        &self.vessels[vessel].field
    }

    /// Overwrite a vessel's conserved field (verification runs set Riemann
    /// data directly).
    pub fn set_field(&mut self, vessel: usize, a: Vec<f64>, q: Vec<f64>) {
        assert_eq!(a.len(), self.vessels[vessel].grid.m);
        assert_eq!(q.len(), self.vessels[vessel].grid.m);
        self.vessels[vessel].field = ConservedField { a, q };
    }

    pub fn efmc_state(&self, vessel: usize) -> EfmcState {
        self.vessels[vessel].efmc
    }

    pub fn valve_state(&self, interface: usize) -> Option<ValveState> {
        match &self.interfaces[interface] {
            Interface::Valve { state, .. } => Some(*state),
            _ => None,
        }
    }

    /// Total lymph volume in the chain (m^3).
    pub fn total_volume(&self) -> f64 {
        self.vessels
            .iter()
            .map(|v| v.field.volume(v.grid.dx))
            .sum()
    }

    fn boundary_pressure(&self, vessel: usize, side: BoundarySide) -> f64 {
        let v = &self.vessels[vessel];
        let ctx = TubeContext::new(&v.wall, v.efmc.s, &self.props);
        let cell = match side {
            BoundarySide::Left => 0,
            BoundarySide::Right => v.grid.m - 1,
        };
        ctx.pressure_of(v.field.a[cell])
    }

    /// Advance the chain by one globally CFL-limited step (capped at
    /// `dt_cap`). Returns the step actually taken.
    pub fn step(&mut self, dt_cap: f64) -> Result<f64, SimError> {
        let n_vessels = self.vessels.len();
        let last_interface = self.interfaces.len() - 1;

        // 2: global time step
        let mut dt = dt_cap;
        for v in &self.vessels {
            let ctx = TubeContext::new(&v.wall, v.efmc.s, &self.props);
            dt = dt.min(vessel_dt(&ctx, &v.field, v.grid.dx, self.numerics.cfl));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(SimError::Config("no finite positive time step available"));
        }

        // 3: valve ODEs with dp frozen at t^n
        for k in 0..=last_interface {
            let upstream = (k > 0).then(|| self.boundary_pressure(k - 1, BoundarySide::Right));
            let downstream =
                (k < n_vessels).then(|| self.boundary_pressure(k, BoundarySide::Left));
            if let Interface::Valve { params, state } = &self.interfaces[k] {
                let dp = assemble_dp(
                    upstream,
                    downstream,
                    (k == 0).then(|| self.p_in.at(self.t)),
                    (k == last_interface).then(|| self.p_out.at(self.t)),
                )?;
                let next = valve_step(state, dp, dt, params, &self.props).map_err(|_| {
                    SimError::OdeFailure {
                        context: "valve",
                        time: self.t,
                    }
                })?;
                match &mut self.interfaces[k] {
                    Interface::Valve { state, .. } => *state = next,
                    _ => unreachable!(),
                }
            }
        }

        // 4: boundary fluxes from the new valve flows / imposed pressures
        let mut boundary_fluxes: Vec<((f64, f64), (f64, f64))> = Vec::with_capacity(n_vessels);
        for (j, v) in self.vessels.iter().enumerate() {
            let ctx = TubeContext::new(&v.wall, v.efmc.s, &self.props);
            let m = v.grid.m;
            let flux_of = |interface: usize, side: BoundarySide| -> Result<(f64, f64), SimError> {
                let (cell, beta_is_left) = match side {
                    BoundarySide::Left => (0, true),
                    BoundarySide::Right => (m - 1, false),
                };
                let a_n = v.field.a[cell];
                let u_n = v.field.q[cell] / a_n;
                match &self.interfaces[interface] {
                    Interface::Valve { state, .. } => {
                        let (a_star, q_star) =
                            boundary_state_from_valve_flow(&ctx, state.q_v, a_n, u_n, side)?;
                        Ok(ctx.flux(a_star, q_star))
                    }
                    Interface::Pressure => {
                        let p = if beta_is_left {
                            self.p_in.at(self.t)
                        } else {
                            self.p_out.at(self.t)
                        };
                        let (a_i, q_star) = boundary_state_from_pressure(
                            &ctx, &v.wall, v.efmc.s, p, a_n, u_n, side,
                        )?;
                        Ok(ctx.flux(a_i, q_star))
                    }
                    Interface::Transmissive => Ok(ctx.flux(a_n, v.field.q[cell])),
                }
            };
            let left = flux_of(j, BoundarySide::Left)?;
            let right = flux_of(j + 1, BoundarySide::Right)?;
            boundary_fluxes.push((left, right));
        }

        // 5-7: interior fluxes, sources, conservative update
        for (j, v) in self.vessels.iter_mut().enumerate() {
            let Vessel {
                wall,
                field,
                ws,
                grid,
                efmc,
                ..
            } = v;
            let ctx = TubeContext::new(wall, efmc.s, &self.props);
            let fallbacks = compute_interior_fluxes(
                &ctx,
                field,
                dt,
                grid.dx,
                self.numerics.limiter,
                ws,
            )?;
            self.slope_fallbacks += u64::from(fallbacks);
            ws.flux[0] = boundary_fluxes[j].0;
            ws.flux[grid.m] = boundary_fluxes[j].1;
            apply_update(&ctx, field, dt, grid.dx, ws).map_err(|(cell, area)| {
                SimError::PositivityLoss {
                    vessel: j,
                    cell,
                    time: self.t,
                    area,
                }
            })?;
        }

        // 8: contraction ODEs with the space-averaged area and WSS at t^{n+1}
        for v in &mut self.vessels {
            let m = v.grid.m as f64;
            let a_bar = v.field.a.iter().sum::<f64>() / m;
            let tau_bar = v
                .field
                .a
                .iter()
                .zip(v.field.q.iter())
                .map(|(&a, &q)| wall_shear_stress_unchecked(a, q, &self.props))
                .sum::<f64>()
                / m;
            v.efmc = efmc_step(&v.efmc, a_bar, tau_bar, dt, &v.efmc_params).map_err(|_| {
                SimError::OdeFailure {
                    context: "contraction model",
                    time: self.t,
                }
            })?;
        }

        self.t += dt;
        self.steps += 1;
        Ok(dt)
    }

    fn record(&self, trajectory: &mut Trajectory, full: bool) {
        trajectory.time.push(self.t);
        for (j, v) in self.vessels.iter().enumerate() {
            let series = &mut trajectory.vessels[j];
            let ctx = TubeContext::new(&v.wall, v.efmc.s, &self.props);
            let c = v.grid.center_cell();
            series.a_center.push(v.field.a[c]);
            series.q_center.push(v.field.q[c]);
            series.p_center.push(ctx.pressure_of(v.field.a[c]));
            series
                .tau_center
                .push(wall_shear_stress_unchecked(v.field.a[c], v.field.q[c], &self.props));
            series.volume.push(v.field.volume(v.grid.dx));
            series.v.push(v.efmc.v);
            series.w.push(v.efmc.w);
            series.stimulus.push(v.efmc.i);
            series.s.push(v.efmc.s);
            let m = v.grid.m as f64;
            series
                .a_bar
                .push(v.field.a.iter().sum::<f64>() / m);
            series.tau_bar.push(
                v.field
                    .a
                    .iter()
                    .zip(v.field.q.iter())
                    .map(|(&a, &q)| wall_shear_stress_unchecked(a, q, &self.props))
                    .sum::<f64>()
                    / m,
            );
            if full {
                series.frames.push(Frame {
                    a: v.field.a.clone(),
                    q: v.field.q.clone(),
                });
            }
        }
        for (k, interface) in self.interfaces.iter().enumerate() {
            if let Interface::Valve { state, .. } = interface {
                let series = trajectory.valves[k].as_mut().expect("valve series exists");
                series.q_v.push(state.q_v);
                series.xi.push(state.xi);
            }
        }
    }

    /// Advance to `t_output`, recording snapshots every `record_stride`
    /// steps (plus the initial and final states). On failure the partial
    /// trajectory is returned alongside the error.
    pub fn run(&mut self, cfg: &RunConfig) -> RunOutcome {
        let mut trajectory = Trajectory {
            time: Vec::new(),
            vessels: (0..self.vessels.len())
                .map(|j| VesselSeries {
                    center_cell: self.vessels[j].grid.center_cell(),
                    ..VesselSeries::default()
                })
                .collect(),
            valves: self
                .interfaces
                .iter()
                .map(|i| match i {
                    Interface::Valve { .. } => Some(ValveSeries::default()),
                    _ => None,
                })
                .collect(),
        };
        self.record(&mut trajectory, cfg.full_frames);
        let stride = cfg.record_stride.max(1);
        let t_end = cfg.t_output;
        let eps = 1.0e-12 * t_end.max(1.0);
        let mut steps_since_record = 0usize;
        while self.t < t_end - eps {
            match self.step(t_end - self.t) {
                Ok(_) => {
                    steps_since_record += 1;
                    if steps_since_record >= stride || self.t >= t_end - eps {
                        self.record(&mut trajectory, cfg.full_frames);
                        steps_since_record = 0;
                    }
                }
                Err(e) => {
                    return RunOutcome {
                        trajectory,
                        error: Some(e),
                    };
                }
            }
        }
        RunOutcome {
            trajectory,
            error: None,
        }
    }
}

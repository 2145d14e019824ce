//! Cycle detection, lymphodynamical indexes, pressure-sweep maps and the
//! local sensitivity harness.
//!
//! A lymphatic cycle runs from one contraction onset to the next, where an
//! onset is the contraction state rising through 0.05 (with hysteresis:
//! detection re-arms only after `s` falls back below 0.01). Indexes are
//! computed on the last complete cycle after a transient is discarded, in
//! the units conventional for the field (diameters in um, volumes in nL,
//! flows in uL/h, pressures in cmH2O, shear in dyne/cm2).

use crate::collector::{
    BoundarySpec, Collector, NumericsConfig, PressureProgram, RunConfig, Trajectory, ValveSpec,
    VesselSpec,
};
use crate::efmc::EfmcParams;
use crate::math::FloatExt;
use crate::units;
use crate::wall::{LymphProperties, TubeLawParams, VesselGeometry, VesselWall, WallStiffness};
use crate::SimError;

use alloc::vec::Vec;

/// Onset threshold on the contraction state.
pub const ONSET_THRESHOLD: f64 = 0.05;
/// Re-arm threshold; `s` must fall below this before a new onset counts.
pub const REARM_THRESHOLD: f64 = 0.01;
/// Default transient discarded before indexes are computed (s).
pub const DEFAULT_TRANSIENT: f64 = 30.0;

/// One detected cycle (SI units), end-diastole to end-diastole.
#[derive(Debug, Clone, Copy)]
pub struct CycleRecord {
    pub t_start: f64,
    pub t_end: f64,
    /// End-systolic (minimum) diameter at the centre cell (m).
    pub esd: f64,
    /// End-diastolic (maximum) diameter at the centre cell (m).
    pub edd: f64,
    /// Peak (end-systolic) pressure at the centre cell (Pa).
    pub esp: f64,
    /// Minimum (end-diastolic) pressure at the centre cell (Pa).
    pub edp: f64,
    /// Minimum vessel volume (m^3).
    pub esv: f64,
    /// Maximum vessel volume (m^3).
    pub edv: f64,
}

fn diameter_of(area: f64) -> f64 {
    2.0 * (area / core::f64::consts::PI).sqrt_()
}

/// Contraction onset times of one vessel: `s` rising through the onset
/// threshold, with hysteresis against integrator ripple.
pub fn detect_onsets(trajectory: &Trajectory, vessel: usize) -> Vec<f64> {
    let s = &trajectory.vessels[vessel].s;
    let mut onsets = Vec::new();
    let mut armed = true;
    for (k, &sv) in s.iter().enumerate() {
        if armed && sv >= ONSET_THRESHOLD {
            onsets.push(trajectory.time[k]);
            armed = false;
        } else if !armed && sv < REARM_THRESHOLD {
            armed = true;
        }
    }
    onsets
}

/// Cycles of one vessel whose start lies past the transient. Returns an
/// empty list for a non-contracting trajectory (a valid outcome under
/// strong inhibition).
pub fn detect_cycles(trajectory: &Trajectory, vessel: usize, transient: f64) -> Vec<CycleRecord> {
    let onsets = detect_onsets(trajectory, vessel);
    let series = &trajectory.vessels[vessel];
    let time = &trajectory.time;
    let mut cycles = Vec::new();
    for pair in onsets.windows(2) {
        let (t_start, t_end) = (pair[0], pair[1]);
        if t_start < transient {
            continue;
        }
        let k0 = time.partition_point(|&t| t < t_start);
        let k1 = time.partition_point(|&t| t < t_end);
        if k1 <= k0 + 1 {
            continue;
        }
        // end-diastolic quantities are sampled at the instant of maximum
        // volume (the vessel at its fullest, before the wall stiffens);
        // end-systolic ones are the in-cycle extrema
        let mut a_min = f64::INFINITY;
        let mut p_max = f64::NEG_INFINITY;
        let mut vol_min = f64::INFINITY;
        let mut k_ed = k0;
        for k in k0..k1 {
            a_min = a_min.min(series.a_center[k]);
            p_max = p_max.max(series.p_center[k]);
            vol_min = vol_min.min(series.volume[k]);
            if series.volume[k] > series.volume[k_ed] {
                k_ed = k;
            }
        }
        cycles.push(CycleRecord {
            t_start,
            t_end,
            esd: diameter_of(a_min),
            edd: diameter_of(series.a_center[k_ed]),
            esp: p_max,
            edp: series.p_center[k_ed],
            esv: vol_min,
            edv: series.volume[k_ed],
        });
    }
    cycles
}

/// Lymphodynamical indexes of one vessel over its last complete cycle, in
/// reporting units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexReport {
    pub frequency_per_min: f64,
    pub ef: f64,
    pub sv_nl: f64,
    pub fpf_per_min: f64,
    pub cpf_ul_h: f64,
    pub cpfi: f64,
    pub amp_um: f64,
    pub sw_nl_cmh2o: f64,
    pub mean_flow_ul_h: f64,
    pub mean_wss_dyne_cm2: f64,
    pub mean_pressure_cmh2o: f64,
    pub peak_velocity_mm_s: f64,
    pub esd_um: f64,
    pub edd_um: f64,
    pub esp_cmh2o: f64,
    pub edp_cmh2o: f64,
    pub cycles_detected: usize,
}

/// Index columns in the order used by sensitivity tables.
pub const INDEX_NAMES: [&str; 12] = [
    "frequency",
    "ef",
    "sv",
    "fpf",
    "cpf",
    "mean_wss",
    "esd",
    "edd",
    "esp",
    "edp",
    "mean_pressure",
    "mean_flow",
];

impl IndexReport {
    /// The sensitivity-analysis index vector, ordered as [`INDEX_NAMES`].
    pub fn as_sensitivity_vector(&self) -> [f64; 12] {
        [
            self.frequency_per_min,
            self.ef,
            self.sv_nl,
            self.fpf_per_min,
            self.cpf_ul_h,
            self.mean_wss_dyne_cm2,
            self.esd_um,
            self.edd_um,
            self.esp_cmh2o,
            self.edp_cmh2o,
            self.mean_pressure_cmh2o,
            self.mean_flow_ul_h,
        ]
    }
}

fn trapezoid_mean(time: &[f64], values: &[f64], k0: usize, k1: usize) -> f64 {
    let mut integral = 0.0;
    for k in k0..k1 - 1 {
        integral += 0.5 * (values[k] + values[k + 1]) * (time[k + 1] - time[k]);
    }
    integral / (time[k1 - 1] - time[k0])
}

/// Indexes from the last complete cycle; `None` when no cycle was detected.
pub fn compute_indexes(
    cycles: &[CycleRecord],
    trajectory: &Trajectory,
    vessel: usize,
) -> Option<IndexReport> {
    let cycle = cycles.last()?;
    let series = &trajectory.vessels[vessel];
    let time = &trajectory.time;
    let k0 = time.partition_point(|&t| t < cycle.t_start);
    let k1 = time.partition_point(|&t| t < cycle.t_end);
    if k1 <= k0 + 1 {
        return None;
    }

    let freq_hz = 1.0 / (cycle.t_end - cycle.t_start);
    let ef = 1.0 - cycle.esv / cycle.edv;
    let sv = cycle.edv - cycle.esv;
    let fpf_hz = ef * freq_hz;
    let cpf = sv * freq_hz; // m^3/s

    // area of the pressure-volume loop, closed over the cycle and signed so
    // that a work-producing cycle (ejection at high pressure) is positive
    let mut sw = 0.0;
    for k in k0..k1 - 1 {
        sw -= 0.5 * (series.p_center[k] + series.p_center[k + 1])
            * (series.volume[k + 1] - series.volume[k]);
    }
    sw -= 0.5 * (series.p_center[k1 - 1] + series.p_center[k0])
        * (series.volume[k0] - series.volume[k1 - 1]);

    let q_mean = trapezoid_mean(time, &series.q_center, k0, k1);
    let wss_mean = trapezoid_mean(time, &series.tau_center, k0, k1);
    let p_mean = trapezoid_mean(time, &series.p_center, k0, k1);
    let cpfi = (cpf / q_mean).abs_();
    let peak_velocity = series.a_center[k0..k1]
        .iter()
        .zip(series.q_center[k0..k1].iter())
        .map(|(&a, &q)| (q / a).abs_())
        .fold(0.0f64, f64::max);

    Some(IndexReport {
        frequency_per_min: units::hz_to_per_min(freq_hz),
        ef,
        sv_nl: units::m3_to_nl(sv),
        fpf_per_min: units::hz_to_per_min(fpf_hz),
        cpf_ul_h: units::m3s_to_ul_h(cpf),
        cpfi,
        amp_um: units::m_to_um(cycle.edd - cycle.esd),
        sw_nl_cmh2o: units::pam3_to_nl_cmh2o(sw),
        mean_flow_ul_h: units::m3s_to_ul_h(q_mean),
        mean_wss_dyne_cm2: units::pa_to_dyne_cm2(wss_mean),
        mean_pressure_cmh2o: units::pa_to_cmh2o(p_mean),
        peak_velocity_mm_s: units::ms_to_mm_s(peak_velocity),
        esd_um: units::m_to_um(cycle.esd),
        edd_um: units::m_to_um(cycle.edd),
        esp_cmh2o: units::pa_to_cmh2o(cycle.esp),
        edp_cmh2o: units::pa_to_cmh2o(cycle.edp),
        cycles_detected: cycles.len(),
    })
}

/// Convenience: run cycle detection and index computation in one call.
pub fn indexes_of(trajectory: &Trajectory, vessel: usize, transient: f64) -> Option<IndexReport> {
    let cycles = detect_cycles(trajectory, vessel, transient);
    compute_indexes(&cycles, trajectory, vessel)
}

// ---------------------------------------------------------------------------
// Scenario building for parametric studies
// ---------------------------------------------------------------------------

/// Scalar parameters of a single-lymphangion study, the knobs exercised by
/// the sweeps and the sensitivity analysis. SI units throughout.
#[derive(Debug, Clone, Copy)]
pub struct StudyParams {
    pub r0: f64,
    pub h0_over_r0: f64,
    pub length: f64,
    pub p_e: f64,
    pub e_min: f64,
    pub e_max: f64,
    pub nu: f64,
    pub rho: f64,
    pub mu: f64,
    pub gamma: f64,
    pub law_m: f64,
    pub law_n: f64,
    pub law_z: f64,
    pub law_c: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub c1: f64,
    pub c2: f64,
    pub r_i: f64,
    pub k_rel: f64,
    pub n_ca: f64,
    pub a_ca_over_a0: f64,
    pub k_no: f64,
    pub tau_no: f64,
    pub n_no: f64,
    pub f_min: f64,
    pub f_ca: f64,
    pub t_excited: f64,
    pub k_vo: f64,
    pub k_vc: f64,
    pub l_eff: f64,
    pub v0: f64,
}

impl Default for StudyParams {
    fn default() -> Self {
        Self {
            r0: crate::presets::R0,
            h0_over_r0: 0.3,
            length: crate::presets::LENGTH,
            p_e: 0.0,
            e_min: crate::presets::E_MIN,
            e_max: crate::presets::E_MAX,
            nu: crate::presets::NU,
            rho: crate::presets::RHO,
            mu: crate::presets::MU,
            gamma: crate::presets::GAMMA,
            law_m: 0.5,
            law_n: -5.0,
            law_z: 19.0,
            law_c: 1.0e-16,
            a1: 100.0,
            a2: 0.5,
            a3: 25.0,
            b1: 3.0,
            c1: 110.0,
            c2: 3.0,
            r_i: 0.1,
            k_rel: 10.0,
            n_ca: 10.0,
            a_ca_over_a0: crate::presets::A_CA_OVER_A0,
            k_no: 0.8,
            tau_no: units::dyne_cm2_to_pa(6.0),
            n_no: 1.2,
            f_min: units::per_min_to_hz(3.0),
            f_ca: units::per_min_to_hz(20.0),
            t_excited: 2.0,
            k_vo: 10.0,
            k_vc: 10.0,
            l_eff: 0.1e-3,
            v0: 0.1,
        }
    }
}

impl StudyParams {
    pub fn wall(&self) -> Result<VesselWall, SimError> {
        let geometry =
            VesselGeometry::new(self.r0, self.h0_over_r0 * self.r0, self.length, self.p_e)?;
        let stiffness = WallStiffness::new(self.e_min, self.e_max, self.nu)?;
        let law = TubeLawParams::new(self.law_m, self.law_n, self.law_z, self.law_c)?;
        Ok(VesselWall::new(geometry, stiffness, law))
    }

    pub fn efmc(&self, a0: f64) -> Result<EfmcParams, SimError> {
        Ok(EfmcParams::builder()
            .fhn(self.a1, self.a2, self.a3, self.b1, 0.0)
            .contraction_rates(self.c1, self.c2)
            .activation(self.r_i, self.k_rel)
            .stretch(self.n_ca, self.a_ca_over_a0 * a0)
            .shear_inhibition(self.k_no, self.tau_no, self.n_no)
            .frequencies(self.f_min, self.f_ca, self.t_excited)
            .build()?)
    }

    pub fn lymph(&self) -> Result<LymphProperties, SimError> {
        Ok(LymphProperties::new(self.rho, self.mu, self.gamma)?)
    }

    pub fn valve_spec(&self) -> ValveSpec {
        ValveSpec {
            k_vo: self.k_vo,
            k_vc: self.k_vc,
            dp_open: 0.0,
            dp_close: 0.0,
            m_st: 1.0,
            m_rg: 0.0,
            l_eff: self.l_eff,
        }
    }

    /// A single lymphangion between two terminal valves fed by constant
    /// reservoir pressures (the sweep configuration).
    pub fn single_vessel_collector(
        &self,
        p_in: f64,
        p_out: f64,
        cells: usize,
    ) -> Result<Collector, SimError> {
        let wall = self.wall()?;
        let vessel = VesselSpec {
            efmc: self.efmc(wall.geometry.a0)?,
            wall,
            cells,
            v0: self.v0,
        };
        Collector::new(
            alloc::vec![vessel],
            alloc::vec![
                BoundarySpec::Valve(self.valve_spec()),
                BoundarySpec::Valve(self.valve_spec()),
            ],
            PressureProgram::constant(p_in),
            PressureProgram::constant(p_out),
            self.lymph()?,
            NumericsConfig::default(),
        )
    }
}

// ---------------------------------------------------------------------------
// Pressure sweep
// ---------------------------------------------------------------------------

/// Grid specification of the `P_in x P_out` map (pressures in Pa).
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub p_in_values: Vec<f64>,
    pub p_out_values: Vec<f64>,
    pub t_output: f64,
    pub cells: usize,
    pub record_stride: usize,
    pub transient: f64,
    pub base: StudyParams,
}

impl SweepSpec {
    /// Evenly spaced values over `[lo, hi]` (pressures in Pa).
    pub fn pressure_range(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        if count <= 1 {
            return alloc::vec![lo];
        }
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }

    /// All grid points in row-major order (`p_in` outer, `p_out` inner).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.p_in_values.len() * self.p_out_values.len());
        for &p_in in &self.p_in_values {
            for &p_out in &self.p_out_values {
                pts.push((p_in, p_out));
            }
        }
        pts
    }
}

/// Outcome of one sweep point.
#[derive(Debug, Clone)]
pub enum PointOutcome {
    Report(IndexReport),
    /// The run finished but no complete cycle was detected.
    NonContracting,
    /// The run failed; the error is kept for the gap report.
    Failed(SimError),
}

/// Run one `(p_in, p_out)` grid point.
pub fn run_sweep_point(spec: &SweepSpec, p_in: f64, p_out: f64) -> PointOutcome {
    let collector = match spec.base.single_vessel_collector(p_in, p_out, spec.cells) {
        Ok(c) => c,
        Err(e) => return PointOutcome::Failed(e),
    };
    run_collector_point(collector, spec.t_output, spec.record_stride, spec.transient, 0)
}

/// Run a prepared collector and reduce it to the indexes of `vessel`.
pub fn run_collector_point(
    mut collector: Collector,
    t_output: f64,
    record_stride: usize,
    transient: f64,
    vessel: usize,
) -> PointOutcome {
    let outcome = collector.run(&RunConfig {
        t_output,
        record_stride,
        full_frames: false,
    });
    if let Some(e) = outcome.error {
        return PointOutcome::Failed(e);
    }
    match indexes_of(&outcome.trajectory, vessel, transient) {
        Some(report) => PointOutcome::Report(report),
        None => PointOutcome::NonContracting,
    }
}

/// Serial sweep over the grid, row-major. The per-point work is exposed via
/// [`run_sweep_point`] so callers can parallelise while keeping this exact
/// ordering.
pub fn sweep_grid(spec: &SweepSpec) -> Vec<((f64, f64), PointOutcome)> {
    spec.points()
        .into_iter()
        .map(|(p_in, p_out)| ((p_in, p_out), run_sweep_point(spec, p_in, p_out)))
        .collect()
}

// ---------------------------------------------------------------------------
// Local sensitivity analysis
// ---------------------------------------------------------------------------

/// Parameters exercised by the sensitivity analysis, in table order.
pub const SENSITIVITY_PARAMS: [&str; 22] = [
    "r0",
    "a1",
    "a2",
    "a3",
    "b1",
    "c1",
    "c2",
    "R_I",
    "k_rel",
    "n_Ca",
    "A_Ca/A0",
    "k_NO",
    "tau_NO",
    "n_NO",
    "K_vo",
    "K_vc",
    "L_eff",
    "rho",
    "mu",
    "gamma",
    "E_max",
    "E_min",
];

/// Write entry `name = value` into a parameter set.
pub fn apply_sensitivity_param(params: &mut StudyParams, name: &str, value: f64) {
    match name {
        "r0" => params.r0 = value,
        "a1" => params.a1 = value,
        "a2" => params.a2 = value,
        "a3" => params.a3 = value,
        "b1" => params.b1 = value,
        "c1" => params.c1 = value,
        "c2" => params.c2 = value,
        "R_I" => params.r_i = value,
        "k_rel" => params.k_rel = value,
        "n_Ca" => params.n_ca = value,
        "A_Ca/A0" => params.a_ca_over_a0 = value,
        "k_NO" => params.k_no = value,
        "tau_NO" => params.tau_no = value,
        "n_NO" => params.n_no = value,
        "K_vo" => params.k_vo = value,
        "K_vc" => params.k_vc = value,
        "L_eff" => params.l_eff = value,
        "rho" => params.rho = value,
        "mu" => params.mu = value,
        "gamma" => params.gamma = value,
        "E_max" => params.e_max = value,
        "E_min" => params.e_min = value,
        other => panic!("unknown sensitivity parameter `{other}`"),
    }
}

/// Read entry `name` from a parameter set.
pub fn read_sensitivity_param(params: &StudyParams, name: &str) -> f64 {
    match name {
        "r0" => params.r0,
        "a1" => params.a1,
        "a2" => params.a2,
        "a3" => params.a3,
        "b1" => params.b1,
        "c1" => params.c1,
        "c2" => params.c2,
        "R_I" => params.r_i,
        "k_rel" => params.k_rel,
        "n_Ca" => params.n_ca,
        "A_Ca/A0" => params.a_ca_over_a0,
        "k_NO" => params.k_no,
        "tau_NO" => params.tau_no,
        "n_NO" => params.n_no,
        "K_vo" => params.k_vo,
        "K_vc" => params.k_vc,
        "L_eff" => params.l_eff,
        "rho" => params.rho,
        "mu" => params.mu,
        "gamma" => params.gamma,
        "E_max" => params.e_max,
        "E_min" => params.e_min,
        other => panic!("unknown sensitivity parameter `{other}`"),
    }
}

/// One local sensitivity matrix: entries in percent, `NaN` marking probe
/// points whose index was unavailable.
#[derive(Debug, Clone)]
pub struct SensitivityMatrix {
    /// `entries[i][j]`: parameter `i`, index `j`.
    pub entries: Vec<[f64; 12]>,
}

/// Central-difference local sensitivity of an index vector with respect to
/// each coordinate of `x`:
/// `S_ij = sgn(x_i) (P_j(x + eps x_i e_i) - P_j(x - eps x_i e_i)) / (2 eps |P_j(x)|) * 100`.
///
/// `eval` returns `None` (or non-finite entries) when an index is
/// unavailable at a probe point; the affected entries are `NaN`.
pub fn local_sensitivity_matrix(
    eval: &mut impl FnMut(&[f64]) -> Option<[f64; 12]>,
    x: &[f64],
    epsilon: f64,
) -> SensitivityMatrix {
    let base = eval(x);
    let mut entries = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let mut row = [f64::NAN; 12];
        if let Some(base) = base {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[i] = x[i] * (1.0 + epsilon);
            xm[i] = x[i] * (1.0 - epsilon);
            if let (Some(pp), Some(pm)) = (eval(&xp), eval(&xm)) {
                for j in 0..12 {
                    if base[j].is_finite()
                        && base[j] != 0.0
                        && pp[j].is_finite()
                        && pm[j].is_finite()
                    {
                        row[j] = x[i].signum() * (pp[j] - pm[j])
                            / (2.0 * epsilon * base[j].abs_())
                            * 100.0;
                    }
                }
            }
        }
        entries.push(row);
    }
    SensitivityMatrix { entries }
}

/// Aggregated sensitivities: percentile-trimmed mean and standard deviation
/// per `(parameter, index)` entry.
#[derive(Debug, Clone)]
pub struct SensitivityResult {
    pub mean: Vec<[f64; 12]>,
    pub sd: Vec<[f64; 12]>,
    /// Number of finite samples that survived trimming, per entry.
    pub samples: Vec<[usize; 12]>,
}

/// Interpolated quantile (type 7) of already-sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = p * (n - 1) as f64;
    let lo = h as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Trim bounds: the 3rd and 97th percentiles of the samples.
pub fn trim_bounds(values: &[f64]) -> (f64, f64) {
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    (quantile_sorted(&sorted, 0.03), quantile_sorted(&sorted, 0.97))
}

/// Keep samples inside `[lo, hi]`. Applying the same bounds again is a
/// no-op, so trimming is idempotent once the bounds are fixed.
pub fn apply_trim(values: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    values
        .iter()
        .copied()
        .filter(|v| *v >= lo && *v <= hi)
        .collect()
}

/// Percentile-trimmed mean and population standard deviation across the
/// replicate matrices.
pub fn aggregate_sensitivity(matrices: &[SensitivityMatrix]) -> SensitivityResult {
    assert!(matrices.len() >= 2, "need at least two replicates");
    let n_params = matrices[0].entries.len();
    let mut mean = Vec::with_capacity(n_params);
    let mut sd = Vec::with_capacity(n_params);
    let mut samples = Vec::with_capacity(n_params);
    for i in 0..n_params {
        let mut mean_row = [f64::NAN; 12];
        let mut sd_row = [f64::NAN; 12];
        let mut n_row = [0usize; 12];
        for j in 0..12 {
            let finite: Vec<f64> = matrices
                .iter()
                .map(|m| m.entries[i][j])
                .filter(|v| v.is_finite())
                .collect();
            if finite.is_empty() {
                continue;
            }
            let (lo, hi) = trim_bounds(&finite);
            let kept = apply_trim(&finite, lo, hi);
            if kept.is_empty() {
                continue;
            }
            let m = kept.iter().sum::<f64>() / kept.len() as f64;
            let var = kept.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / kept.len() as f64;
            mean_row[j] = m;
            sd_row[j] = var.sqrt_();
            n_row[j] = kept.len();
        }
        mean.push(mean_row);
        sd.push(sd_row);
        samples.push(n_row);
    }
    SensitivityResult { mean, sd, samples }
}

/// Map a uniform draw in [0, 1) to `[lo_frac, hi_frac] * reference`.
pub fn perturb_uniform(reference: f64, lo_frac: f64, hi_frac: f64, unit: f64) -> f64 {
    reference * (lo_frac + (hi_frac - lo_frac) * unit)
}

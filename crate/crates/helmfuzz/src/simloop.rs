//! Closed-loop executor: reference model -> error signals -> fuzzy
//! controller -> saturated rudder -> vessel, with per-step logging and
//! summary metrics.
//!
//! One run is strictly sequential and owns all mutable state; separate
//! runs share nothing and may execute in parallel.

use thiserror::Error;

use crate::fis::{FisDefinition, FisError, DEFAULT_GRID_POINTS};
use crate::guidance::{CommandSchedule, DepthProfile, ReferenceConfig, ReferenceModel};
use crate::vessel::{depth_ratio, shallow_water_coeff, step_rk4, InvalidDepth, VesselParams, VesselState};

/// Heading band used by the settling-time metric, rad (1 degree).
pub const SETTLE_BAND: f64 = std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("t = {t} s: {source}")]
    Depth { t: f64, source: InvalidDepth },
    #[error("t = {t} s: controller failure: {source}")]
    Controller { t: f64, source: FisError },
    #[error("cannot compute metrics of an empty log")]
    EmptyLog,
}

/// Scaling applied around the fuzzy engine: inputs are multiplied before
/// fuzzification, the crisp output after defuzzification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub psi: f64,
    pub r: f64,
    pub output: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        Self {
            psi: 1.0,
            r: 1.0,
            output: 1.0,
        }
    }
}

/// Everything one closed-loop run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub fis: FisDefinition,
    pub vessel: VesselParams,
    pub reference: ReferenceConfig,
    pub schedule: CommandSchedule,
    pub depth: DepthProfile,
    /// Simulated duration, s.
    pub t_end: f64,
    /// Integrator and controller step, s.
    pub dt: f64,
    pub gains: ControllerGains,
    /// Defuzzifier grid resolution.
    pub grid_points: usize,
}

/// One logged instant. Angles in rad, rates in rad/s, depth in m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimRecord {
    pub t: f64,
    pub psi_cmd: f64,
    pub psi_d: f64,
    pub psi: f64,
    pub psi_err: f64,
    pub r_d: f64,
    pub r: f64,
    pub r_err: f64,
    /// Controller output before the actuator.
    pub delta_cmd: f64,
    /// Rudder actually applied over the following step.
    pub delta_applied: f64,
    pub h: f64,
    pub zeta: f64,
    pub yuv: f64,
}

/// Uniformly sampled run log; record k sits at t = k * dt.
#[derive(Debug, Clone, PartialEq)]
pub struct SimLog {
    records: Vec<SimRecord>,
}

impl SimLog {
    pub fn from_records(records: Vec<SimRecord>) -> Self {
        Self { records }
    }

    pub fn records(&self) -> &[SimRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Run summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// Largest |psi_d - psi| seen, rad.
    pub max_abs_psi_err: f64,
    pub rms_psi_err: f64,
    /// Largest |rudder| applied, rad.
    pub max_abs_delta: f64,
    /// First time after the last command switch from which |psi - psi_cmd|
    /// stays inside [`SETTLE_BAND`] to the end; `None` if it never does.
    pub settle_time: Option<f64>,
}

/// Scaled, defuzzified and saturated rudder command for one error pair.
pub fn autopilot_command(
    fis: &FisDefinition,
    psi_err: f64,
    r_err: f64,
    gains: &ControllerGains,
    rudder_limit: f64,
) -> Result<f64, FisError> {
    let raw = raw_command(fis, psi_err, r_err, gains, DEFAULT_GRID_POINTS)?;
    Ok(raw.clamp(-rudder_limit, rudder_limit))
}

fn raw_command(
    fis: &FisDefinition,
    psi_err: f64,
    r_err: f64,
    gains: &ControllerGains,
    grid_points: usize,
) -> Result<f64, FisError> {
    Ok(gains.output * fis.evaluate_with_grid(gains.psi * psi_err, gains.r * r_err, grid_points)?)
}

/// Fixed-step closed loop. The rudder and the water depth are held constant
/// over each step (zero-order hold); record k is the consistent snapshot at
/// t = k * dt, so a run of length `t_end` yields `floor(t_end / dt) + 1`
/// records. Identical scenarios produce bit-identical logs.
pub fn run_scenario(scenario: &Scenario) -> Result<SimLog, SimError> {
    assert!(scenario.t_end > 0.0, "t_end must be positive");
    assert!(scenario.dt > 0.0, "dt must be positive");
    assert!(
        scenario.gains.psi > 0.0 && scenario.gains.r > 0.0 && scenario.gains.output > 0.0,
        "controller gains must be positive"
    );

    let steps = (scenario.t_end / scenario.dt).floor() as usize;
    let mut reference =
        ReferenceModel::new(scenario.reference).expect("reference constants already validated");
    let mut state = VesselState::at_speed(scenario.vessel.speed);
    let mut records = Vec::with_capacity(steps + 1);
    let mut previous_delta = 0.0;

    for k in 0..=steps {
        let t = k as f64 * scenario.dt;
        let psi_cmd = scenario.schedule.command_at(t);
        let h = scenario.depth.depth_at(t);
        let zeta = depth_ratio(scenario.vessel.draft, h)
            .map_err(|source| SimError::Depth { t, source })?;
        let yuv = shallow_water_coeff(zeta);

        let psi_err = reference.psi_d() - state.psi;
        let r_err = reference.r_d() - state.r;
        let delta_cmd = raw_command(
            &scenario.fis,
            psi_err,
            r_err,
            &scenario.gains,
            scenario.grid_points,
        )
        .map_err(|source| SimError::Controller { t, source })?;
        let delta_applied = apply_actuator(
            delta_cmd,
            previous_delta,
            &scenario.vessel,
            scenario.dt,
        );

        records.push(SimRecord {
            t,
            psi_cmd,
            psi_d: reference.psi_d(),
            psi: state.psi,
            psi_err,
            r_d: reference.r_d(),
            r: state.r,
            r_err,
            delta_cmd,
            delta_applied,
            h,
            zeta,
            yuv,
        });

        if k < steps {
            reference.step(psi_cmd, scenario.dt);
            state = step_rk4(&state, delta_applied, &scenario.vessel, h, scenario.dt)
                .map_err(|source| SimError::Depth { t, source })?;
            previous_delta = delta_applied;
        }
    }
    Ok(SimLog { records })
}

fn apply_actuator(command: f64, previous: f64, vessel: &VesselParams, dt: f64) -> f64 {
    let saturated = command.clamp(-vessel.rudder_limit, vessel.rudder_limit);
    if vessel.rudder_rate_limit > 0.0 {
        let slew = vessel.rudder_rate_limit * dt;
        saturated.clamp(previous - slew, previous + slew)
    } else {
        saturated
    }
}

pub fn compute_metrics(log: &SimLog) -> Result<Metrics, SimError> {
    let records = log.records();
    if records.is_empty() {
        return Err(SimError::EmptyLog);
    }
    let mut max_abs_psi_err = 0.0_f64;
    let mut sum_sq = 0.0;
    let mut max_abs_delta = 0.0_f64;
    for rec in records {
        max_abs_psi_err = max_abs_psi_err.max(rec.psi_err.abs());
        sum_sq += rec.psi_err * rec.psi_err;
        max_abs_delta = max_abs_delta.max(rec.delta_applied.abs());
    }
    let rms_psi_err = (sum_sq / records.len() as f64).sqrt();

    let last_switch = (1..records.len())
        .rev()
        .find(|&k| records[k].psi_cmd != records[k - 1].psi_cmd)
        .unwrap_or(0);
    let mut settle_idx = Some(last_switch);
    for k in (last_switch..records.len()).rev() {
        if (records[k].psi - records[k].psi_cmd).abs() >= SETTLE_BAND {
            settle_idx = if k + 1 < records.len() { Some(k + 1) } else { None };
            break;
        }
    }
    Ok(Metrics {
        max_abs_psi_err,
        rms_psi_err,
        max_abs_delta,
        settle_time: settle_idx.map(|k| records[k].t),
    })
}

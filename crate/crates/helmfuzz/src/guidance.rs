//! Desired-state generation: a second-order reference model shapes step
//! heading commands into smooth (psi_d, r_d) trajectories, command
//! schedules pick the active command over time, and depth profiles describe
//! the water depth along the run.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("natural frequency must be positive, got {0}")]
    InvalidNaturalFrequency(f64),
    #[error("damping ratio must be at least 1 for a monotone desired path, got {0}")]
    InvalidDamping(f64),
    #[error("command schedule must not be empty")]
    EmptySchedule,
    #[error("command schedule must start at t = 0, got {0}")]
    ScheduleStart(f64),
    #[error("command schedule times must be strictly increasing at t = {0}")]
    ScheduleOrder(f64),
    #[error("depth profile must not be empty")]
    EmptyDepthProfile,
    #[error("depth profile knots must be strictly increasing at t = {0}")]
    DepthKnotOrder(f64),
    #[error("depth must be positive and finite, got {0}")]
    InvalidDepthValue(f64),
}

/// Constants of the reference model, kept separate from its state so a
/// scenario can be cloned and re-run from rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConfig {
    /// Natural frequency, rad/s.
    pub omega_n: f64,
    /// Damping ratio; at least 1 so the desired path never overshoots.
    pub zeta_d: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        // Settles in roughly 2000-3000 s, the time scale of a large tanker.
        Self {
            omega_n: 0.003,
            zeta_d: 1.0,
        }
    }
}

/// Second-order filter producing the desired heading and heading rate:
///
/// ```text
/// psi_d_ddot = omega_n^2 (psi_cmd - psi_d) - 2 zeta_d omega_n psi_d_dot
/// ```
///
/// integrated with RK4. One simulation run owns one model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceModel {
    omega_n: f64,
    zeta_d: f64,
    psi_d: f64,
    r_d: f64,
}

impl ReferenceModel {
    pub fn new(config: ReferenceConfig) -> Result<Self, GuidanceError> {
        if !(config.omega_n.is_finite() && config.omega_n > 0.0) {
            return Err(GuidanceError::InvalidNaturalFrequency(config.omega_n));
        }
        if !(config.zeta_d.is_finite() && config.zeta_d >= 1.0) {
            return Err(GuidanceError::InvalidDamping(config.zeta_d));
        }
        Ok(Self {
            omega_n: config.omega_n,
            zeta_d: config.zeta_d,
            psi_d: 0.0,
            r_d: 0.0,
        })
    }

    pub fn psi_d(&self) -> f64 {
        self.psi_d
    }

    pub fn r_d(&self) -> f64 {
        self.r_d
    }

    /// Advances the desired state by `dt` toward `psi_cmd` and returns the
    /// updated `(psi_d, r_d)`.
    pub fn step(&mut self, psi_cmd: f64, dt: f64) -> (f64, f64) {
        debug_assert!(dt > 0.0, "time step must be positive");
        let accel = |psi: f64, r: f64| {
            self.omega_n * self.omega_n * (psi_cmd - psi) - 2.0 * self.zeta_d * self.omega_n * r
        };
        let (k1p, k1r) = (self.r_d, accel(self.psi_d, self.r_d));
        let (k2p, k2r) = (
            self.r_d + 0.5 * dt * k1r,
            accel(self.psi_d + 0.5 * dt * k1p, self.r_d + 0.5 * dt * k1r),
        );
        let (k3p, k3r) = (
            self.r_d + 0.5 * dt * k2r,
            accel(self.psi_d + 0.5 * dt * k2p, self.r_d + 0.5 * dt * k2r),
        );
        let (k4p, k4r) = (
            self.r_d + dt * k3r,
            accel(self.psi_d + dt * k3p, self.r_d + dt * k3r),
        );
        self.psi_d += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        self.r_d += dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        (self.psi_d, self.r_d)
    }
}

/// Piecewise-constant heading command: `(t_start, psi_cmd)` pairs with
/// strictly increasing times, the first at t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandSchedule {
    entries: Vec<(f64, f64)>,
}

impl CommandSchedule {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self, GuidanceError> {
        let first = entries.first().ok_or(GuidanceError::EmptySchedule)?;
        if first.0 != 0.0 {
            return Err(GuidanceError::ScheduleStart(first.0));
        }
        for pair in entries.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(GuidanceError::ScheduleOrder(pair[1].0));
            }
        }
        Ok(Self { entries })
    }

    /// Single command active from t = 0.
    pub fn step_command(psi_cmd: f64) -> Self {
        Self {
            entries: vec![(0.0, psi_cmd)],
        }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Command of the latest entry with `t_start <= t`; a switch time
    /// belongs to the new command.
    pub fn command_at(&self, t: f64) -> f64 {
        self.entries
            .iter()
            .rev()
            .find(|(t0, _)| *t0 <= t)
            .map(|(_, cmd)| *cmd)
            .unwrap_or(self.entries[0].1)
    }
}

/// Water depth over time: constant, or linear interpolation between knots
/// clamped at both ends.
#[derive(Debug, Clone, PartialEq)]
pub enum DepthProfile {
    Constant(f64),
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl DepthProfile {
    pub fn constant(h: f64) -> Result<Self, GuidanceError> {
        if !(h.is_finite() && h > 0.0) {
            return Err(GuidanceError::InvalidDepthValue(h));
        }
        Ok(Self::Constant(h))
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self, GuidanceError> {
        if knots.is_empty() {
            return Err(GuidanceError::EmptyDepthProfile);
        }
        for &(_, h) in &knots {
            if !(h.is_finite() && h > 0.0) {
                return Err(GuidanceError::InvalidDepthValue(h));
            }
        }
        for pair in knots.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(GuidanceError::DepthKnotOrder(pair[1].0));
            }
        }
        Ok(Self::PiecewiseLinear(knots))
    }

    pub fn depth_at(&self, t: f64) -> f64 {
        match self {
            DepthProfile::Constant(h) => *h,
            DepthProfile::PiecewiseLinear(knots) => {
                if t <= knots[0].0 {
                    return knots[0].1;
                }
                let last = knots[knots.len() - 1];
                if t >= last.0 {
                    return last.1;
                }
                for pair in knots.windows(2) {
                    let (t0, h0) = pair[0];
                    let (t1, h1) = pair[1];
                    if t <= t1 {
                        return h0 + (h1 - h0) * (t - t0) / (t1 - t0);
                    }
                }
                last.1
            }
        }
    }
}

//! Tanker plant model: depth ratio, shallow-water sway-damping correction,
//! linear non-dimensional sway-yaw dynamics, planar kinematics, and a
//! classical RK4 stepper.
//!
//! The sway-yaw equations use the prime system (time scale L/U):
//!
//! ```text
//! v'_dot = (Yv + Yuv(zeta)) v' + (Yr - 1) r' + Yd delta
//! r'_dot = Nv v' + Nr r' + Nd delta
//! ```
//!
//! with v = v' U, r = r' U / L. Surge is held constant at the design speed;
//! heading integrates the yaw rate and position follows the planar
//! kinematics x_dot = u cos(psi) - v sin(psi), y_dot = u sin(psi) + v cos(psi).

use thiserror::Error;

/// Metres per second in one knot.
pub const KNOT_MS: f64 = 0.5144;

/// Depth ratio above which the shallow-water correction engages.
const SHALLOW_ONSET_RATIO: f64 = 0.8;

/// Scale of the shallow-water sway-damping correction.
const SHALLOW_EFFECT_GAIN: f64 = -0.85;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("water depth {h} m does not exceed draft {draft} m")]
pub struct InvalidDepth {
    pub h: f64,
    pub draft: f64,
}

/// Draft over under-keel clearance, `T / (h - T)`. Large values mean
/// shallow water.
pub fn depth_ratio(draft: f64, h: f64) -> Result<f64, InvalidDepth> {
    if h <= draft {
        return Err(InvalidDepth { h, draft });
    }
    Ok(draft / (h - draft))
}

/// Shallow-water correction to the sway damping derivative: zero in deep
/// water, `-0.85 (1 - 0.8 / zeta)` once the depth ratio reaches 0.8.
/// Continuous at the switch and bounded in (-0.85, 0].
pub fn shallow_water_coeff(zeta: f64) -> f64 {
    if zeta < SHALLOW_ONSET_RATIO {
        0.0
    } else {
        SHALLOW_EFFECT_GAIN * (1.0 - SHALLOW_ONSET_RATIO / zeta)
    }
}

/// Hull dimensions and non-dimensional hydrodynamic derivatives.
///
/// The defaults describe a 304.8 m tanker at 16 knots with coefficients
/// chosen so the sway-yaw system stays stable over the whole depth range
/// and positive rudder starts a starboard turn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselParams {
    /// Length between perpendiculars, m.
    pub length: f64,
    /// Design (surge) speed, m/s.
    pub speed: f64,
    /// Draft to design waterline, m.
    pub draft: f64,
    pub y_v: f64,
    pub y_r: f64,
    pub y_d: f64,
    pub n_v: f64,
    pub n_r: f64,
    pub n_d: f64,
    /// Hard rudder saturation, rad.
    pub rudder_limit: f64,
    /// Rudder slew limit, rad/s; 0 disables the rate limiter.
    pub rudder_rate_limit: f64,
}

impl Default for VesselParams {
    fn default() -> Self {
        Self {
            length: 304.8,
            speed: 16.0 * KNOT_MS,
            draft: 18.46,
            y_v: -0.90,
            y_r: 0.40,
            y_d: 0.30,
            n_v: -0.30,
            n_r: -0.75,
            n_d: 0.35,
            rudder_limit: 35.0_f64.to_radians(),
            rudder_rate_limit: 0.0,
        }
    }
}

impl VesselParams {
    /// Non-dimensional sway-yaw system matrix with the depth effect applied
    /// to the sway damping term.
    pub fn sway_yaw_matrix(&self, zeta: f64) -> [[f64; 2]; 2] {
        [
            [self.y_v + shallow_water_coeff(zeta), self.y_r - 1.0],
            [self.n_v, self.n_r],
        ]
    }
}

/// Plant state: body velocities, heading and earth-fixed position.
/// The heading is kept unwrapped so error signals stay continuous.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct VesselState {
    /// Surge velocity, m/s (held constant at the design speed).
    pub u: f64,
    /// Sway velocity, m/s.
    pub v: f64,
    /// Yaw rate, rad/s.
    pub r: f64,
    /// Heading, rad, unwrapped.
    pub psi: f64,
    /// Earth-fixed position, m.
    pub x: f64,
    pub y: f64,
}

impl VesselState {
    /// Straight-ahead run at the given surge speed, everything else zero.
    pub fn at_speed(u: f64) -> Self {
        Self {
            u,
            ..Self::default()
        }
    }

    fn add_scaled(&self, d: &VesselState, s: f64) -> VesselState {
        VesselState {
            u: self.u + s * d.u,
            v: self.v + s * d.v,
            r: self.r + s * d.r,
            psi: self.psi + s * d.psi,
            x: self.x + s * d.x,
            y: self.y + s * d.y,
        }
    }
}

/// Time derivative of the state under rudder angle `delta` at water depth
/// `h`. The caller keeps `|delta|` within the rudder limit.
pub fn vessel_derivative(
    state: &VesselState,
    delta: f64,
    params: &VesselParams,
    h: f64,
) -> Result<VesselState, InvalidDepth> {
    debug_assert!(
        delta.abs() <= params.rudder_limit + 1e-12,
        "rudder command {delta} exceeds the limit {}",
        params.rudder_limit
    );
    let zeta = depth_ratio(params.draft, h)?;
    let yuv = shallow_water_coeff(zeta);
    let u_over_l = params.speed / params.length;
    let v_nd = state.v / params.speed;
    let r_nd = state.r / u_over_l;
    let v_dot_nd = (params.y_v + yuv) * v_nd + (params.y_r - 1.0) * r_nd + params.y_d * delta;
    let r_dot_nd = params.n_v * v_nd + params.n_r * r_nd + params.n_d * delta;
    Ok(VesselState {
        u: 0.0,
        v: v_dot_nd * params.speed * u_over_l,
        r: r_dot_nd * u_over_l * u_over_l,
        psi: state.r,
        x: state.u * state.psi.cos() - state.v * state.psi.sin(),
        y: state.u * state.psi.sin() + state.v * state.psi.cos(),
    })
}

/// Classical fourth-order Runge-Kutta step with rudder and depth held
/// constant across the step.
pub fn step_rk4(
    state: &VesselState,
    delta: f64,
    params: &VesselParams,
    h: f64,
    dt: f64,
) -> Result<VesselState, InvalidDepth> {
    debug_assert!(dt > 0.0, "time step must be positive");
    let k1 = vessel_derivative(state, delta, params, h)?;
    let k2 = vessel_derivative(&state.add_scaled(&k1, dt / 2.0), delta, params, h)?;
    let k3 = vessel_derivative(&state.add_scaled(&k2, dt / 2.0), delta, params, h)?;
    let k4 = vessel_derivative(&state.add_scaled(&k3, dt), delta, params, h)?;
    Ok(state
        .add_scaled(&k1, dt / 6.0)
        .add_scaled(&k2, dt / 3.0)
        .add_scaled(&k3, dt / 3.0)
        .add_scaled(&k4, dt / 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_ratio_matches_hand_arithmetic() {
        assert!((depth_ratio(18.46, 24.0).unwrap() - 3.3321).abs() < 1e-3);
        assert!((depth_ratio(18.46, 200.0).unwrap() - 0.10168).abs() < 1e-4);
        // The two canonical regimes split near 100 m of water.
        assert!(depth_ratio(18.46, 100.0).unwrap() < 0.8);
        assert!((depth_ratio(18.46, 100.0).unwrap() - 0.2264).abs() < 1e-4);
    }

    #[test]
    fn depth_ratio_rejects_depth_at_or_below_draft() {
        assert_eq!(
            depth_ratio(18.46, 18.46),
            Err(InvalidDepth {
                h: 18.46,
                draft: 18.46
            })
        );
        assert!(depth_ratio(18.46, 10.0).is_err());
    }

    #[test]
    fn shallow_water_coeff_branches() {
        assert_eq!(shallow_water_coeff(0.10168), 0.0);
        assert_eq!(shallow_water_coeff(0.8), 0.0);
        assert!((shallow_water_coeff(3.3321) - (-0.6459)).abs() < 1e-3);
        // Shallower water always damps sway more than any deep-water state.
        let params = VesselParams::default();
        for zeta in [0.9, 1.5, 3.34] {
            assert!(params.y_v + shallow_water_coeff(zeta) < params.y_v);
        }
    }

    #[test]
    fn shallow_water_coeff_is_continuous_monotone_bounded() {
        let mut prev = shallow_water_coeff(0.8);
        for k in 1..=1000 {
            let zeta = 0.8 + 10.0 * k as f64 / 1000.0;
            let y = shallow_water_coeff(zeta);
            assert!(y <= prev + 1e-15, "not non-increasing at {zeta}");
            assert!(y <= 0.0 && y > -0.85);
            prev = y;
        }
        // Approaching the onset from below and above agree.
        assert!((shallow_water_coeff(0.8 + 1e-12)).abs() < 1e-11);
    }

    #[test]
    fn equilibrium_straight_run() {
        let params = VesselParams::default();
        let state = VesselState::at_speed(params.speed);
        let d = vessel_derivative(&state, 0.0, &params, 200.0).unwrap();
        assert_eq!(d.v, 0.0);
        assert_eq!(d.r, 0.0);
        assert_eq!(d.psi, 0.0);
        assert_eq!(d.y, 0.0);
        assert!((d.x - params.speed).abs() < 1e-12);
    }

    #[test]
    fn positive_rudder_starts_starboard_turn() {
        let params = VesselParams::default();
        let state = VesselState::at_speed(params.speed);
        let d = vessel_derivative(&state, 0.1, &params, 200.0).unwrap();
        assert!(d.r > 0.0);
    }

    #[test]
    fn rk4_straight_line_advances_x() {
        let params = VesselParams::default();
        let state = VesselState::at_speed(params.speed);
        let next = step_rk4(&state, 0.0, &params, 200.0, 1.0).unwrap();
        assert!((next.x - params.speed).abs() < 1e-9);
        assert_eq!(next.psi, 0.0);
        assert_eq!(next.y, 0.0);
        assert_eq!(next.u, params.speed);
    }

    #[test]
    fn rk4_full_step_close_to_two_half_steps() {
        let params = VesselParams::default();
        let mut state = VesselState::at_speed(params.speed);
        state.v = 0.4;
        state.r = 0.002;
        state.psi = 0.3;
        let delta = 0.2;
        let full = step_rk4(&state, delta, &params, 50.0, 2.0).unwrap();
        let half = step_rk4(&state, delta, &params, 50.0, 1.0).unwrap();
        let half2 = step_rk4(&half, delta, &params, 50.0, 1.0).unwrap();
        for (a, b) in [
            (full.v, half2.v),
            (full.r, half2.r),
            (full.psi, half2.psi),
            (full.x, half2.x),
            (full.y, half2.y),
        ] {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_rudder_converges_to_linear_steady_state() {
        let params = VesselParams::default();
        let delta = 5.0_f64.to_radians();
        let h = 200.0;
        // Independent route: solve A x = -B delta for the 2x2 system.
        let zeta = depth_ratio(params.draft, h).unwrap();
        let m = params.sway_yaw_matrix(zeta);
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let rhs = [-params.y_d * delta, -params.n_d * delta];
        let v_nd = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
        let r_nd = (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det;
        let r_expected = r_nd * params.speed / params.length;
        assert!((r_nd / delta - 0.4545).abs() < 1e-3);

        let mut state = VesselState::at_speed(params.speed);
        for _ in 0..3000 {
            state = step_rk4(&state, delta, &params, h, 1.0).unwrap();
        }
        assert!(
            ((state.r - r_expected) / r_expected).abs() < 1e-3,
            "r = {} expected {}",
            state.r,
            r_expected
        );
        let v_expected = v_nd * params.speed;
        assert!(((state.v - v_expected) / v_expected).abs() < 1e-3);
    }

    #[test]
    fn kinematics_preserve_planar_speed() {
        let params = VesselParams::default();
        for k in 0..100 {
            let psi = -3.0 + 6.0 * k as f64 / 99.0;
            let v = -2.0 + 4.0 * k as f64 / 99.0;
            let state = VesselState {
                u: params.speed,
                v,
                r: 0.0,
                psi,
                x: 0.0,
                y: 0.0,
            };
            let d = vessel_derivative(&state, 0.0, &params, 200.0).unwrap();
            let speed2 = d.x * d.x + d.y * d.y;
            assert!((speed2 - (params.speed * params.speed + v * v)).abs() < 1e-9);
        }
    }
}

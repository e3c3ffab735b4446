//! Ready-made scenarios: the two 45-degree course changes (shallow and deep
//! water) and the multi-command run over a depth ramp.

use crate::fis::DEFAULT_GRID_POINTS;
use crate::guidance::{CommandSchedule, DepthProfile, ReferenceConfig};
use crate::ruledsl::builtin_fis;
use crate::simloop::{ControllerGains, Scenario};
use crate::vessel::VesselParams;

/// Baseline scenario: builtin controller, default tanker, zero command,
/// deep water. Config files and sweeps start from this.
pub fn default_scenario() -> Scenario {
    Scenario {
        fis: builtin_fis(),
        vessel: VesselParams::default(),
        reference: ReferenceConfig::default(),
        schedule: CommandSchedule::step_command(0.0),
        depth: DepthProfile::Constant(200.0),
        t_end: 12000.0,
        dt: 1.0,
        gains: ControllerGains::default(),
        grid_points: DEFAULT_GRID_POINTS,
    }
}

/// 45-degree course change in 24 m of water (shallow).
pub fn fig4() -> Scenario {
    let mut scenario = default_scenario();
    scenario.schedule = CommandSchedule::step_command(45.0_f64.to_radians());
    scenario.depth = DepthProfile::Constant(24.0);
    scenario
}

/// 45-degree course change in 200 m of water (deep).
pub fn fig5() -> Scenario {
    let mut scenario = default_scenario();
    scenario.schedule = CommandSchedule::step_command(45.0_f64.to_radians());
    scenario.depth = DepthProfile::Constant(200.0);
    scenario
}

/// Heading sequence 10, 20, -5 degrees while the water depth ramps from
/// 24 m to 200 m over the run.
pub fn fig6() -> Scenario {
    let deg = std::f64::consts::PI / 180.0;
    let mut scenario = default_scenario();
    scenario.schedule = CommandSchedule::new(vec![
        (0.0, 10.0 * deg),
        (4000.0, 20.0 * deg),
        (8000.0, -5.0 * deg),
    ])
    .expect("preset schedule is ordered");
    scenario.depth = DepthProfile::piecewise_linear(vec![(0.0, 24.0), (12000.0, 200.0)])
        .expect("preset depth ramp is ordered");
    scenario
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "fig4" => Some(fig4()),
        "fig5" => Some(fig5()),
        "fig6" => Some(fig6()),
        _ => None,
    }
}

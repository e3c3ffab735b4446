//! Sectioned key-value scenario files.
//!
//! ```text
//! [vessel]
//! length = 304.8            # m
//! rudder_limit_deg = 35.0
//!
//! [schedule]
//! step_deg = 0 45           # t_start_s  psi_cmd_deg
//!
//! [depth]
//! constant = 24             # m
//!
//! [sim]
//! t_end = 12000
//! dt = 1.0
//! ```
//!
//! Every key overrides the matching field of a base scenario; unknown
//! sections or keys are rejected with the offending line number. Angle
//! keys exist in radian form and, with the `_deg` suffix, in degree form.

use std::fmt;
use std::path::{Path, PathBuf};

use helmfuzz::guidance::{CommandSchedule, DepthProfile};
use helmfuzz::ruledsl::{builtin_fis, parse_fis};
use helmfuzz::simloop::Scenario;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Section {
    Vessel,
    Reference,
    Controller,
    Schedule,
    Depth,
    Sim,
    Output,
}

impl Section {
    fn parse(name: &str) -> Option<Section> {
        match name {
            "vessel" => Some(Section::Vessel),
            "reference" => Some(Section::Reference),
            "controller" => Some(Section::Controller),
            "schedule" => Some(Section::Schedule),
            "depth" => Some(Section::Depth),
            "sim" => Some(Section::Sim),
            "output" => Some(Section::Output),
            _ => None,
        }
    }
}

/// Scenario plus the presentation options from `[output]`.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub scenario: Scenario,
    pub plot_title: Option<String>,
}

/// Reads and applies a config file on top of `base`. Relative controller
/// paths resolve against the config file's directory.
pub fn load_config(path: &Path, base: &Scenario) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(0, format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text, base, path.parent())
}

pub fn parse_config(
    text: &str,
    base: &Scenario,
    fis_dir: Option<&Path>,
) -> Result<LoadedConfig, ConfigError> {
    let mut scenario = base.clone();
    let mut plot_title = None;
    let mut section: Option<Section> = None;
    let mut seen: Vec<(Section, String)> = Vec::new();
    let mut schedule: Vec<(usize, f64, f64)> = Vec::new();
    let mut depth_constant: Option<(usize, f64)> = None;
    let mut depth_knots: Vec<(usize, f64, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| ConfigError::new(line, "unterminated section header"))?
                .trim();
            section = Some(
                Section::parse(name)
                    .ok_or_else(|| ConfigError::new(line, format!("unknown section [{name}]")))?,
            );
            continue;
        }
        let section =
            section.ok_or_else(|| ConfigError::new(line, "key outside of any [section]"))?;
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| ConfigError::new(line, "expected 'key = value'"))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::new(line, format!("key '{key}' has no value")));
        }

        // Repeatable keys handle their own accumulation.
        let repeatable = matches!(
            (section, key),
            (Section::Schedule, "step") | (Section::Schedule, "step_deg") | (Section::Depth, "knot")
        );
        if !repeatable {
            let tag = (section, canonical_key(key).to_owned());
            if seen.contains(&tag) {
                return Err(ConfigError::new(line, format!("duplicate key '{key}'")));
            }
            seen.push(tag);
        }

        match section {
            Section::Vessel => apply_vessel_key(&mut scenario, line, key, value)?,
            Section::Reference => apply_reference_key(&mut scenario, line, key, value)?,
            Section::Controller => {
                apply_controller_key(&mut scenario, line, key, value, fis_dir)?
            }
            Section::Schedule => {
                let (t, cmd) = parse_pair(line, key, value)?;
                let cmd = match key {
                    "step" => cmd,
                    "step_deg" => cmd.to_radians(),
                    other => {
                        return Err(ConfigError::new(
                            line,
                            format!("unknown key '{other}' in [schedule]"),
                        ))
                    }
                };
                if let Some(&(_, prev, _)) = schedule.last() {
                    if t <= prev {
                        return Err(ConfigError::new(
                            line,
                            format!("schedule times must be strictly increasing, got {t} after {prev}"),
                        ));
                    }
                }
                schedule.push((line, t, cmd));
            }
            Section::Depth => match key {
                "constant" => {
                    if !depth_knots.is_empty() {
                        return Err(ConfigError::new(
                            line,
                            "cannot mix 'constant' with 'knot' entries",
                        ));
                    }
                    depth_constant = Some((line, parse_number(line, key, value)?));
                }
                "knot" => {
                    if depth_constant.is_some() {
                        return Err(ConfigError::new(
                            line,
                            "cannot mix 'knot' entries with 'constant'",
                        ));
                    }
                    let (t, h) = parse_pair(line, key, value)?;
                    if let Some(&(_, prev, _)) = depth_knots.last() {
                        if t <= prev {
                            return Err(ConfigError::new(
                                line,
                                format!("depth knots must be strictly increasing, got {t} after {prev}"),
                            ));
                        }
                    }
                    depth_knots.push((line, t, h));
                }
                other => {
                    return Err(ConfigError::new(
                        line,
                        format!("unknown key '{other}' in [depth]"),
                    ))
                }
            },
            Section::Sim => match key {
                "t_end" => {
                    scenario.t_end = parse_positive(line, key, value)?;
                }
                "dt" => {
                    scenario.dt = parse_positive(line, key, value)?;
                }
                other => {
                    return Err(ConfigError::new(line, format!("unknown key '{other}' in [sim]")))
                }
            },
            Section::Output => match key {
                "plot_title" => plot_title = Some(value.to_owned()),
                other => {
                    return Err(ConfigError::new(
                        line,
                        format!("unknown key '{other}' in [output]"),
                    ))
                }
            },
        }
    }

    if !schedule.is_empty() {
        let first_line = schedule[0].0;
        let entries: Vec<(f64, f64)> = schedule.iter().map(|&(_, t, c)| (t, c)).collect();
        scenario.schedule = CommandSchedule::new(entries)
            .map_err(|e| ConfigError::new(first_line, e.to_string()))?;
    }
    if let Some((line, h)) = depth_constant {
        scenario.depth =
            DepthProfile::constant(h).map_err(|e| ConfigError::new(line, e.to_string()))?;
    } else if !depth_knots.is_empty() {
        let first_line = depth_knots[0].0;
        let knots: Vec<(f64, f64)> = depth_knots.iter().map(|&(_, t, h)| (t, h)).collect();
        scenario.depth = DepthProfile::piecewise_linear(knots)
            .map_err(|e| ConfigError::new(first_line, e.to_string()))?;
    }

    Ok(LoadedConfig {
        scenario,
        plot_title,
    })
}

/// The radian and degree spellings of a key count as the same assignment.
fn canonical_key(key: &str) -> &str {
    key.strip_suffix("_deg").unwrap_or(key)
}

fn apply_vessel_key(
    scenario: &mut Scenario,
    line: usize,
    key: &str,
    value: &str,
) -> Result<(), ConfigError> {
    let vessel = &mut scenario.vessel;
    match key {
        "length" => vessel.length = parse_positive(line, key, value)?,
        "speed" => vessel.speed = parse_positive(line, key, value)?,
        "draft" => vessel.draft = parse_positive(line, key, value)?,
        "yv" => vessel.y_v = parse_number(line, key, value)?,
        "yr" => vessel.y_r = parse_number(line, key, value)?,
        "yd" => vessel.y_d = parse_number(line, key, value)?,
        "nv" => vessel.n_v = parse_number(line, key, value)?,
        "nr" => vessel.n_r = parse_number(line, key, value)?,
        "nd" => vessel.n_d = parse_number(line, key, value)?,
        "rudder_limit" => vessel.rudder_limit = parse_positive(line, key, value)?,
        "rudder_limit_deg" => {
            vessel.rudder_limit = parse_positive(line, key, value)?.to_radians()
        }
        "rudder_rate_limit" => vessel.rudder_rate_limit = parse_non_negative(line, key, value)?,
        "rudder_rate_limit_deg" => {
            vessel.rudder_rate_limit = parse_non_negative(line, key, value)?.to_radians()
        }
        other => {
            return Err(ConfigError::new(
                line,
                format!("unknown key '{other}' in [vessel]"),
            ))
        }
    }
    Ok(())
}

fn apply_reference_key(
    scenario: &mut Scenario,
    line: usize,
    key: &str,
    value: &str,
) -> Result<(), ConfigError> {
    match key {
        "omega_n" => scenario.reference.omega_n = parse_positive(line, key, value)?,
        "zeta_d" => {
            let zeta = parse_number(line, key, value)?;
            if zeta < 1.0 {
                return Err(ConfigError::new(
                    line,
                    format!("zeta_d must be at least 1 for a monotone desired path, got {zeta}"),
                ));
            }
            scenario.reference.zeta_d = zeta;
        }
        other => {
            return Err(ConfigError::new(
                line,
                format!("unknown key '{other}' in [reference]"),
            ))
        }
    }
    Ok(())
}

fn apply_controller_key(
    scenario: &mut Scenario,
    line: usize,
    key: &str,
    value: &str,
    fis_dir: Option<&Path>,
) -> Result<(), ConfigError> {
    match key {
        "fis" => {
            if value == "builtin" {
                scenario.fis = builtin_fis();
            } else {
                let mut path = PathBuf::from(value);
                if path.is_relative() {
                    if let Some(dir) = fis_dir {
                        path = dir.join(path);
                    }
                }
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    ConfigError::new(line, format!("cannot read {}: {e}", path.display()))
                })?;
                scenario.fis = parse_fis(&text).map_err(|e| {
                    ConfigError::new(line, format!("{}: {e}", path.display()))
                })?;
            }
        }
        "gain_psi" => scenario.gains.psi = parse_positive(line, key, value)?,
        "gain_r" => scenario.gains.r = parse_positive(line, key, value)?,
        "gain_out" => scenario.gains.output = parse_positive(line, key, value)?,
        "grid_points" => {
            let n: usize = value.parse().map_err(|_| {
                ConfigError::new(line, format!("'{key}' expects an integer, got '{value}'"))
            })?;
            if n < 2 {
                return Err(ConfigError::new(line, "grid_points must be at least 2"));
            }
            scenario.grid_points = n;
        }
        other => {
            return Err(ConfigError::new(
                line,
                format!("unknown key '{other}' in [controller]"),
            ))
        }
    }
    Ok(())
}

fn parse_number(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    if value.split_whitespace().count() != 1 {
        return Err(ConfigError::new(
            line,
            format!("'{key}' expects a single number, got '{value}'"),
        ));
    }
    let number: f64 = value.parse().map_err(|_| {
        ConfigError::new(line, format!("'{key}' expects a number, got '{value}'"))
    })?;
    if !number.is_finite() {
        return Err(ConfigError::new(line, format!("'{key}' must be finite")));
    }
    Ok(number)
}

fn parse_positive(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let number = parse_number(line, key, value)?;
    if number <= 0.0 {
        return Err(ConfigError::new(
            line,
            format!("'{key}' must be positive, got {number}"),
        ));
    }
    Ok(number)
}

fn parse_non_negative(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let number = parse_number(line, key, value)?;
    if number < 0.0 {
        return Err(ConfigError::new(
            line,
            format!("'{key}' must not be negative, got {number}"),
        ));
    }
    Ok(number)
}

fn parse_pair(line: usize, key: &str, value: &str) -> Result<(f64, f64), ConfigError> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(ConfigError::new(
            line,
            format!("'{key}' expects two numbers, got '{value}'"),
        ));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| ConfigError::new(line, format!("'{key}': bad number '{}'", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| ConfigError::new(line, format!("'{key}': bad number '{}'", parts[1])))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(ConfigError::new(line, format!("'{key}' values must be finite")));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use helmfuzz::presets::default_scenario;

    fn base() -> Scenario {
        default_scenario()
    }

    #[test]
    fn full_config_applies_every_section() {
        let text = "\
# course change in shallow water
[vessel]
draft = 18.46
rudder_limit_deg = 35.0

[reference]
omega_n = 0.004
zeta_d = 1.2

[controller]
fis = builtin
gain_psi = 1.5
grid_points = 501

[schedule]
step_deg = 0 45
step_deg = 4000 -10

[depth]
knot = 0 24
knot = 9000 150

[sim]
t_end = 9000
dt = 0.5

[output]
plot_title = shallow course change
";
        let loaded = parse_config(text, &base(), None).unwrap();
        let s = &loaded.scenario;
        assert!((s.vessel.rudder_limit - 35.0_f64.to_radians()).abs() < 1e-15);
        assert_eq!(s.reference.omega_n, 0.004);
        assert_eq!(s.reference.zeta_d, 1.2);
        assert_eq!(s.gains.psi, 1.5);
        assert_eq!(s.grid_points, 501);
        assert_eq!(s.schedule.entries().len(), 2);
        assert!((s.schedule.command_at(4000.0) + 10.0_f64.to_radians()).abs() < 1e-15);
        assert_eq!(s.depth.depth_at(0.0), 24.0);
        assert_eq!(s.t_end, 9000.0);
        assert_eq!(s.dt, 0.5);
        assert_eq!(loaded.plot_title.as_deref(), Some("shallow course change"));
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = "[vessel]\nlength = 300\nbeam = 47\n";
        let err = parse_config(text, &base(), None).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("beam"));
    }

    #[test]
    fn unknown_section_is_rejected() {
        let err = parse_config("[waves]\nheight = 2\n", &base(), None).unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn key_outside_section_is_rejected() {
        let err = parse_config("dt = 1\n", &base(), None).unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("section"));
    }

    #[test]
    fn duplicate_keys_are_rejected_across_suffix_forms() {
        let text = "[vessel]\nrudder_limit = 0.6\nrudder_limit_deg = 35\n";
        let err = parse_config(text, &base(), None).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("duplicate"));
    }

    #[test]
    fn underdamped_reference_is_rejected_at_load() {
        let err = parse_config("[reference]\nzeta_d = 0.7\n", &base(), None).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("at least 1"));
    }

    #[test]
    fn schedule_times_must_increase() {
        let text = "[schedule]\nstep_deg = 0 10\nstep_deg = 0 20\n";
        let err = parse_config(text, &base(), None).unwrap_err();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn depth_forms_are_exclusive() {
        let text = "[depth]\nconstant = 24\nknot = 0 24\n";
        let err = parse_config(text, &base(), None).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(err.message.contains("mix"));
    }

    #[test]
    fn nonpositive_dt_is_rejected() {
        let err = parse_config("[sim]\ndt = 0\n", &base(), None).unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn missing_fis_file_reports_the_line() {
        let text = "[controller]\nfis = /nonexistent/controller.fis\n";
        let err = parse_config(text, &base(), None).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("cannot read"));
    }
}

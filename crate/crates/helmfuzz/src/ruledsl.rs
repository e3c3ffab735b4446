//! Textual `.fis` format for controller definitions, plus the built-in
//! seven-set tanker controller.
//!
//! The format is line oriented, UTF-8, `#` starts a comment:
//!
//! ```text
//! var psi_err range -0.4 0.4
//! set psi_err ZE tri -0.133 0.0 0.133
//! rule if psi_err is ZE and r_err is ZE then rudder is ZE
//! ```
//!
//! Parsing is strict: unknown directives, duplicate sets, conflicting or
//! missing rules are all rejected with the offending line number. The
//! variables must be exactly `psi_err`, `r_err` and `rudder`, each with all
//! seven sets, and the rule table must be complete (49 rules).

use thiserror::Error;

use crate::fis::{FisDefinition, FisError, Label, LinguisticVariable, RuleMatrix, TriangularMf};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

const VAR_NAMES: [&str; 3] = ["psi_err", "r_err", "rudder"];

fn var_slot(name: &str) -> Option<usize> {
    VAR_NAMES.iter().position(|&n| n == name)
}

#[derive(Debug, Default)]
struct VarBuilder {
    decl_line: Option<usize>,
    range: (f64, f64),
    sets: [Option<(usize, TriangularMf)>; 7],
}

/// Parses a `.fis` source into a validated [`FisDefinition`].
pub fn parse_fis(source: &str) -> Result<FisDefinition, ParseError> {
    let mut vars: [VarBuilder; 3] = Default::default();
    let mut rules: [[Option<(usize, Label)>; 7]; 7] = [[None; 7]; 7];
    let mut rule_count = 0usize;
    let mut last_line = 0usize;

    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens[0] {
            "var" => parse_var(line, &tokens, &mut vars)?,
            "set" => parse_set(line, &tokens, &mut vars)?,
            "rule" => parse_rule(line, &tokens, &mut rules, &mut rule_count)?,
            other => {
                return Err(ParseError::new(line, format!("unknown directive '{other}'")));
            }
        }
    }

    let eof = last_line.max(1);

    let mut built: Vec<LinguisticVariable> = Vec::with_capacity(3);
    for (slot, var) in vars.iter().enumerate() {
        let name = VAR_NAMES[slot];
        if var.decl_line.is_none() {
            return Err(ParseError::new(eof, format!("missing 'var {name}' declaration")));
        }
        let mut sets = Vec::with_capacity(7);
        for (k, entry) in var.sets.iter().enumerate() {
            match entry {
                Some((_, mf)) => sets.push(*mf),
                None => {
                    return Err(ParseError::new(
                        eof,
                        format!("variable '{name}' is missing set {}", Label::ALL[k]),
                    ));
                }
            }
        }
        // Cross-set ordering is also checked by LinguisticVariable::new, but
        // doing it here lets the error point at the offending set line.
        for k in 0..6 {
            let (line_hi, hi) = var.sets[k + 1].unwrap();
            let (_, lo) = var.sets[k].unwrap();
            if lo.b() >= hi.b() {
                return Err(ParseError::new(
                    line_hi,
                    format!(
                        "core of {} ({}) must exceed core of {} ({})",
                        Label::ALL[k + 1],
                        hi.b(),
                        Label::ALL[k],
                        lo.b()
                    ),
                ));
            }
            if lo.c() <= hi.a() {
                return Err(ParseError::new(
                    line_hi,
                    format!(
                        "set {} must overlap {}: {} ends at {} but {} starts at {}",
                        Label::ALL[k + 1],
                        Label::ALL[k],
                        Label::ALL[k],
                        lo.c(),
                        Label::ALL[k + 1],
                        hi.a()
                    ),
                ));
            }
        }
        let sets: [TriangularMf; 7] = sets.try_into().unwrap();
        let variable = LinguisticVariable::new(name, var.range, sets)
            .map_err(|e| ParseError::new(eof, fis_message(e)))?;
        built.push(variable);
    }

    if rule_count < 49 {
        return Err(ParseError::new(
            eof,
            format!("incomplete rule matrix: {rule_count} of 49 rules defined"),
        ));
    }
    let mut table = [[Label::Ze; 7]; 7];
    for (i, row) in rules.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            table[i][j] = cell.unwrap().1;
        }
    }
    let matrix = RuleMatrix::new(table).map_err(|e| ParseError::new(eof, fis_message(e)))?;

    let rudder = built.pop().unwrap();
    let r_error = built.pop().unwrap();
    let psi_error = built.pop().unwrap();
    FisDefinition::new(psi_error, r_error, rudder, matrix)
        .map_err(|e| ParseError::new(eof, fis_message(e)))
}

fn fis_message(err: FisError) -> String {
    match err {
        FisError::Invalid(msg) => msg,
        other => other.to_string(),
    }
}

fn parse_var(line: usize, tokens: &[&str], vars: &mut [VarBuilder; 3]) -> Result<(), ParseError> {
    if tokens.len() != 5 || tokens[2] != "range" {
        return Err(ParseError::new(
            line,
            "expected 'var <name> range <lo> <hi>'",
        ));
    }
    let slot = var_slot(tokens[1]).ok_or_else(|| {
        ParseError::new(
            line,
            format!(
                "unknown variable '{}': expected psi_err, r_err or rudder",
                tokens[1]
            ),
        )
    })?;
    if vars[slot].decl_line.is_some() {
        return Err(ParseError::new(
            line,
            format!("variable '{}' declared twice", tokens[1]),
        ));
    }
    let lo = parse_real(line, tokens[3])?;
    let hi = parse_real(line, tokens[4])?;
    if lo >= hi {
        return Err(ParseError::new(
            line,
            format!("range must satisfy lo < hi, got {lo} {hi}"),
        ));
    }
    vars[slot].decl_line = Some(line);
    vars[slot].range = (lo, hi);
    Ok(())
}

fn parse_set(line: usize, tokens: &[&str], vars: &mut [VarBuilder; 3]) -> Result<(), ParseError> {
    if tokens.len() != 7 || tokens[3] != "tri" {
        return Err(ParseError::new(
            line,
            "expected 'set <var> <LABEL> tri <a> <b> <c>'",
        ));
    }
    let slot = var_slot(tokens[1]).ok_or_else(|| {
        ParseError::new(
            line,
            format!(
                "unknown variable '{}': expected psi_err, r_err or rudder",
                tokens[1]
            ),
        )
    })?;
    if vars[slot].decl_line.is_none() {
        return Err(ParseError::new(
            line,
            format!("set references '{}' before its var declaration", tokens[1]),
        ));
    }
    let label = Label::parse(tokens[2])
        .ok_or_else(|| ParseError::new(line, format!("unknown label '{}'", tokens[2])))?;
    if let Some((first, _)) = vars[slot].sets[label.index()] {
        return Err(ParseError::new(
            line,
            format!(
                "duplicate set ({}, {label}): first defined at line {first}",
                tokens[1]
            ),
        ));
    }
    let a = parse_real(line, tokens[4])?;
    let b = parse_real(line, tokens[5])?;
    let c = parse_real(line, tokens[6])?;
    let mf = TriangularMf::new(a, b, c).map_err(|e| ParseError::new(line, fis_message(e)))?;
    vars[slot].sets[label.index()] = Some((line, mf));
    Ok(())
}

fn parse_rule(
    line: usize,
    tokens: &[&str],
    rules: &mut [[Option<(usize, Label)>; 7]; 7],
    rule_count: &mut usize,
) -> Result<(), ParseError> {
    let shape_ok = tokens.len() == 13
        && tokens[1] == "if"
        && tokens[3] == "is"
        && tokens[5] == "and"
        && tokens[7] == "is"
        && tokens[9] == "then"
        && tokens[11] == "is";
    if !shape_ok {
        return Err(ParseError::new(
            line,
            "expected 'rule if psi_err is <LABEL> and r_err is <LABEL> then rudder is <LABEL>'",
        ));
    }
    for (token, expected) in [(tokens[2], "psi_err"), (tokens[6], "r_err"), (tokens[10], "rudder")]
    {
        if token != expected {
            return Err(ParseError::new(
                line,
                format!("rule must reference '{expected}' here, got '{token}'"),
            ));
        }
    }
    let psi = Label::parse(tokens[4])
        .ok_or_else(|| ParseError::new(line, format!("unknown label '{}'", tokens[4])))?;
    let r = Label::parse(tokens[8])
        .ok_or_else(|| ParseError::new(line, format!("unknown label '{}'", tokens[8])))?;
    let out = Label::parse(tokens[12])
        .ok_or_else(|| ParseError::new(line, format!("unknown label '{}'", tokens[12])))?;
    if let Some((first, _)) = rules[psi.index()][r.index()] {
        return Err(ParseError::new(
            line,
            format!(
                "conflicting rule: antecedent (psi_err {psi}, r_err {r}) already defined at line {first}"
            ),
        ));
    }
    rules[psi.index()][r.index()] = Some((line, out));
    *rule_count += 1;
    Ok(())
}

fn parse_real(line: usize, token: &str) -> Result<f64, ParseError> {
    let value: f64 = token
        .parse()
        .map_err(|_| ParseError::new(line, format!("expected a number, got '{token}'")))?;
    if !value.is_finite() {
        return Err(ParseError::new(line, format!("number must be finite, got '{token}'")));
    }
    Ok(value)
}

/// Canonical serialization: variables in psi_err, r_err, rudder order, sets
/// in label order, rules row-major with psi_err outermost. Reals print with
/// enough digits to round-trip exactly.
pub fn serialize_fis(fis: &FisDefinition) -> String {
    let mut out = String::new();
    for var in [fis.psi_error(), fis.r_error(), fis.rudder()] {
        let (lo, hi) = var.range();
        out.push_str(&format!(
            "var {} range {} {}\n",
            var.name(),
            fmt_real(lo),
            fmt_real(hi)
        ));
        for label in Label::ALL {
            let mf = var.set(label);
            out.push_str(&format!(
                "set {} {} tri {} {} {}\n",
                var.name(),
                label,
                fmt_real(mf.a()),
                fmt_real(mf.b()),
                fmt_real(mf.c())
            ));
        }
    }
    for psi in Label::ALL {
        for r in Label::ALL {
            out.push_str(&format!(
                "rule if psi_err is {psi} and r_err is {r} then rudder is {}\n",
                fis.rules().output(psi, r)
            ));
        }
    }
    out
}

fn fmt_real(value: f64) -> String {
    if value == value.trunc() {
        format!("{value:.1}")
    } else {
        format!("{value}")
    }
}

const HEADING_ERROR_RANGE: (f64, f64) = (-0.4, 0.4);
const HEADING_ERROR_SETS: [(f64, f64, f64); 7] = [
    (-0.530, -0.400, -0.266),
    (-0.400, -0.266, -0.133),
    (-0.266, -0.133, 0.000),
    (-0.133, 0.000, 0.133),
    (0.000, 0.133, 0.266),
    (0.133, 0.266, 0.400),
    (0.266, 0.400, 0.530),
];

const RATE_ERROR_RANGE: (f64, f64) = (-0.01, 0.01);
const RATE_ERROR_SETS: [(f64, f64, f64); 7] = [
    (-0.1333, -0.01, -0.006665),
    (-0.01, -0.006665, -0.003335),
    (-0.006665, -0.003335, 0.0),
    (-0.003335, 0.0, 0.003335),
    (0.0, 0.003335, 0.006665),
    (0.003335, 0.006665, 0.01),
    (0.006665, 0.01, 0.1333),
];

const RUDDER_RANGE: (f64, f64) = (-0.8, 0.8);
const RUDDER_SETS: [(f64, f64, f64); 7] = [
    (-1.067, -0.8, -0.5333),
    (-0.8, -0.5333, -0.2667),
    (-0.5333, -0.2667, 0.0),
    (-0.2667, 0.0, 0.2667),
    (0.0, 0.2667, 0.5333),
    (0.2667, 0.5333, 0.8),
    (0.5333, 0.8, 1.067),
];

const RULE_TABLE: [[Label; 7]; 7] = {
    use Label::{Bn, Bp, Mn, Mp, Sn, Sp, Ze};
    [
        [Bn, Bn, Mn, Mn, Sn, Sn, Ze],
        [Bn, Mn, Mn, Sn, Sn, Ze, Sp],
        [Mn, Mn, Sn, Sn, Ze, Sp, Sp],
        [Mn, Sn, Sn, Ze, Sp, Sp, Mp],
        [Sn, Sn, Ze, Sp, Sp, Mp, Mp],
        [Sn, Ze, Sp, Sp, Mp, Mp, Bp],
        [Ze, Sp, Sp, Mp, Mp, Bp, Bp],
    ]
};

fn variable_from(
    name: &str,
    range: (f64, f64),
    triples: &[(f64, f64, f64); 7],
) -> LinguisticVariable {
    let mut sets = Vec::with_capacity(7);
    for &(a, b, c) in triples {
        sets.push(TriangularMf::new(a, b, c).expect("builtin breakpoints are ordered"));
    }
    let sets: [TriangularMf; 7] = sets.try_into().unwrap();
    LinguisticVariable::new(name, range, sets).expect("builtin sets are consistent")
}

/// The stock controller this crate ships: heading error and heading-rate
/// error in radians, rudder deflection in radians, and the 49-rule table.
/// `assets/builtin.fis` holds the same definition in canonical text form.
pub fn builtin_fis() -> FisDefinition {
    FisDefinition::new(
        variable_from("psi_err", HEADING_ERROR_RANGE, &HEADING_ERROR_SETS),
        variable_from("r_err", RATE_ERROR_RANGE, &RATE_ERROR_SETS),
        variable_from("rudder", RUDDER_RANGE, &RUDDER_SETS),
        RuleMatrix::new(RULE_TABLE).expect("builtin rule table is antisymmetric"),
    )
    .expect("builtin controller is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn builtin_matches_published_breakpoints() {
        let fis = builtin_fis();
        let bn = fis.psi_error().set(Label::Bn);
        assert_eq!((bn.a(), bn.b(), bn.c()), (-0.530, -0.400, -0.266));
        let bp = fis.rudder().set(Label::Bp);
        assert_eq!((bp.a(), bp.b(), bp.c()), (0.5333, 0.8000, 1.0670));
        assert_eq!(fis.rules().output(Label::Sp, Label::Mp), Label::Mp);
        assert_eq!(fis.rules().output(Label::Bn, Label::Bn), Label::Bn);
        assert_eq!(fis.rules().output(Label::Bn, Label::Bp), Label::Ze);
    }

    #[test]
    fn serialization_is_canonical() {
        let text = serialize_fis(&builtin_fis());
        assert_eq!(text.lines().filter(|l| l.starts_with("rule ")).count(), 49);
        assert!(text.contains("set rudder ZE tri -0.2667 0.0 0.2667"));
        assert!(text.starts_with("var psi_err range -0.4 0.4\n"));
    }

    #[test]
    fn round_trip_preserves_builtin() {
        let fis = builtin_fis();
        let parsed = parse_fis(&serialize_fis(&fis)).unwrap();
        assert_eq!(parsed, fis);
    }

    #[test]
    fn shipped_asset_is_the_builtin() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/builtin.fis");
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, serialize_fis(&builtin_fis()));
        assert_eq!(parse_fis(&text).unwrap(), builtin_fis());
    }

    #[test]
    fn truncated_rule_table_is_rejected() {
        let mut text = serialize_fis(&builtin_fis());
        let cut = text.rfind("rule ").unwrap();
        text.truncate(cut);
        let err = parse_fis(&text).unwrap_err();
        assert!(err.message.contains("incomplete rule matrix: 48 of 49"));
        assert!(err.line > 0);
    }

    #[test]
    fn set_line_parses_breakpoints() {
        let mut text = serialize_fis(&builtin_fis());
        text = text.replace(
            "set psi_err ZE tri -0.133 0.0 0.133",
            "set psi_err ZE tri -0.133 0.0 0.133 # core at zero",
        );
        let fis = parse_fis(&text).unwrap();
        let ze = fis.psi_error().set(Label::Ze);
        assert_eq!((ze.a(), ze.b(), ze.c()), (-0.133, 0.0, 0.133));
    }

    #[test]
    fn swapped_breakpoints_report_their_line() {
        let text = serialize_fis(&builtin_fis())
            .replace("set rudder SP tri 0.0 0.2667 0.5333", "set rudder SP tri 0.2667 0.0 0.5333");
        let err = parse_fis(&text).unwrap_err();
        assert!(err.message.contains("a <= b <= c"));
        let source = serialize_fis(&builtin_fis());
        let expected_line = source
            .lines()
            .position(|l| l.contains("set rudder SP"))
            .unwrap()
            + 1;
        assert_eq!(err.line, expected_line);
    }
}

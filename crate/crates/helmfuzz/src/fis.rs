//! Mamdani fuzzy inference: triangular membership functions, min-AND rule
//! firing, min implication, max aggregation, and centroid defuzzification
//! on a fixed quadrature grid.
//!
//! Everything here is a pure function of its arguments. A [`FisDefinition`]
//! is immutable after construction and safe to evaluate from many threads.

use std::fmt;

use thiserror::Error;

/// Grid samples used by the centroid defuzzifier unless overridden.
pub const DEFAULT_GRID_POINTS: usize = 1001;

/// Aggregate area below this threshold means no rule fired; with the seven
/// overlapping sets and input clamping this is unreachable, so hitting it
/// signals a broken definition.
pub const MIN_AGGREGATE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FisError {
    /// A definition violates a structural constraint.
    #[error("{0}")]
    Invalid(String),
    /// The aggregated output carries no area.
    #[error("zero activation: aggregated output area is below 1e-12")]
    ZeroActivation,
}

/// The seven linguistic labels shared by every variable of this controller,
/// ordered big negative to big positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Bn,
    Mn,
    Sn,
    Ze,
    Sp,
    Mp,
    Bp,
}

impl Label {
    pub const ALL: [Label; 7] = [
        Label::Bn,
        Label::Mn,
        Label::Sn,
        Label::Ze,
        Label::Sp,
        Label::Mp,
        Label::Bp,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Label> {
        Self::ALL.get(index).copied()
    }

    /// Sign-mirrored label: BN <-> BP, MN <-> MP, SN <-> SP, ZE fixed.
    pub fn negated(self) -> Label {
        Self::ALL[6 - self.index()]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Bn => "BN",
            Label::Mn => "MN",
            Label::Sn => "SN",
            Label::Ze => "ZE",
            Label::Sp => "SP",
            Label::Mp => "MP",
            Label::Bp => "BP",
        }
    }

    pub fn parse(token: &str) -> Option<Label> {
        Self::ALL.iter().copied().find(|l| l.as_str() == token)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Triangular membership function with feet `a`, `c` and core `b`.
///
/// Degenerate edges (`a == b` or `b == c`) are allowed; the vertical edge
/// evaluates to 1 at the core and the function stays total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangularMf {
    a: f64,
    b: f64,
    c: f64,
}

impl TriangularMf {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, FisError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(a <= b && b <= c) {
            return Err(FisError::Invalid(format!(
                "triangular breakpoints must be finite with a <= b <= c, got {a} {b} {c}"
            )));
        }
        Ok(Self { a, b, c })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Membership of `x`: 0 outside `[a, c]`, 1 at the core, linear on the
    /// edges.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.a || x > self.c {
            0.0
        } else if x == self.b {
            1.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.c - x) / (self.c - self.b)
        }
    }
}

/// A named universe of discourse carrying exactly seven triangular sets,
/// one per [`Label`] in label order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticVariable {
    name: String,
    range: (f64, f64),
    sets: [TriangularMf; 7],
}

impl LinguisticVariable {
    pub fn new(
        name: &str,
        range: (f64, f64),
        sets: [TriangularMf; 7],
    ) -> Result<Self, FisError> {
        if name.is_empty() {
            return Err(FisError::Invalid("variable name must not be empty".into()));
        }
        if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
            return Err(FisError::Invalid(format!(
                "range of '{name}' must be finite with lo < hi, got {} {}",
                range.0, range.1
            )));
        }
        for i in 0..6 {
            let (l0, l1) = (Label::ALL[i], Label::ALL[i + 1]);
            if sets[i].b() >= sets[i + 1].b() {
                return Err(FisError::Invalid(format!(
                    "cores of '{name}' must be strictly increasing: {l0} core {} vs {l1} core {}",
                    sets[i].b(),
                    sets[i + 1].b()
                )));
            }
            if sets[i].c() <= sets[i + 1].a() {
                return Err(FisError::Invalid(format!(
                    "adjacent sets {l0} and {l1} of '{name}' must overlap: \
                     {l0} ends at {} but {l1} starts at {}",
                    sets[i].c(),
                    sets[i + 1].a()
                )));
            }
        }
        Ok(Self {
            name: name.to_owned(),
            range,
            sets,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn sets(&self) -> &[TriangularMf; 7] {
        &self.sets
    }

    pub fn set(&self, label: Label) -> &TriangularMf {
        &self.sets[label.index()]
    }

    /// The interval between the outermost cores; crisp inputs are clamped
    /// onto it so extreme values activate the outer set at membership 1.
    pub fn core_span(&self) -> (f64, f64) {
        (self.sets[0].b(), self.sets[6].b())
    }

    /// Footprint of all sets (smallest left foot to largest right foot).
    pub fn support(&self) -> (f64, f64) {
        let lo = self.sets.iter().map(TriangularMf::a).fold(f64::INFINITY, f64::min);
        let hi = self.sets.iter().map(TriangularMf::c).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        let (lo, hi) = self.core_span();
        x.clamp(lo, hi)
    }

    /// Memberships of the clamped input in all seven sets, label order.
    pub fn fuzzify(&self, x: f64) -> [f64; 7] {
        let x = self.clamp(x);
        let mut mu = [0.0; 7];
        for (m, set) in mu.iter_mut().zip(self.sets.iter()) {
            *m = set.eval(x);
        }
        mu
    }
}

/// Complete 7x7 rule table: `output(psi_label, r_label)` names the rudder
/// consequent. Construction requires the table to be antisymmetric under
/// label negation, which is what makes the control surface odd.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMatrix {
    out: [[Label; 7]; 7],
}

impl RuleMatrix {
    pub fn new(out: [[Label; 7]; 7]) -> Result<Self, FisError> {
        for i in 0..7 {
            for j in 0..7 {
                let mirrored = out[6 - i][6 - j];
                if out[i][j].negated() != mirrored {
                    return Err(FisError::Invalid(format!(
                        "rule table is not antisymmetric: ({}, {}) -> {} requires \
                         ({}, {}) -> {}, found {}",
                        Label::ALL[i],
                        Label::ALL[j],
                        out[i][j],
                        Label::ALL[6 - i],
                        Label::ALL[6 - j],
                        out[i][j].negated(),
                        mirrored
                    )));
                }
            }
        }
        Ok(Self { out })
    }

    pub fn output(&self, psi: Label, r: Label) -> Label {
        self.out[psi.index()][r.index()]
    }
}

/// The controller's entire knowledge: two input variables, the rudder
/// output variable, and the rule table.
#[derive(Debug, Clone, PartialEq)]
pub struct FisDefinition {
    psi_error: LinguisticVariable,
    r_error: LinguisticVariable,
    rudder: LinguisticVariable,
    rules: RuleMatrix,
}

impl FisDefinition {
    /// Variable names are fixed for this artifact; anything else is a typo.
    pub fn new(
        psi_error: LinguisticVariable,
        r_error: LinguisticVariable,
        rudder: LinguisticVariable,
        rules: RuleMatrix,
    ) -> Result<Self, FisError> {
        for (var, expected) in [
            (&psi_error, "psi_err"),
            (&r_error, "r_err"),
            (&rudder, "rudder"),
        ] {
            if var.name() != expected {
                return Err(FisError::Invalid(format!(
                    "variable must be named '{expected}', got '{}'",
                    var.name()
                )));
            }
        }
        Ok(Self {
            psi_error,
            r_error,
            rudder,
            rules,
        })
    }

    pub fn psi_error(&self) -> &LinguisticVariable {
        &self.psi_error
    }

    pub fn r_error(&self) -> &LinguisticVariable {
        &self.r_error
    }

    pub fn rudder(&self) -> &LinguisticVariable {
        &self.rudder
    }

    pub fn rules(&self) -> &RuleMatrix {
        &self.rules
    }

    /// Fires all 49 rules with min-AND and collapses them into one clipped
    /// strength per output label (min implication followed by max
    /// aggregation over rules sharing a consequent).
    pub fn infer(&self, psi_err: f64, r_err: f64) -> Aggregate<'_> {
        let mu_psi = self.psi_error.fuzzify(psi_err);
        let mu_r = self.r_error.fuzzify(r_err);
        let mut strengths = [0.0_f64; 7];
        for (i, &mp) in mu_psi.iter().enumerate() {
            if mp <= 0.0 {
                continue;
            }
            for (j, &mr) in mu_r.iter().enumerate() {
                let strength = mp.min(mr);
                if strength <= 0.0 {
                    continue;
                }
                let out = self.rules.out[i][j].index();
                strengths[out] = strengths[out].max(strength);
            }
        }
        Aggregate {
            strengths,
            output: &self.rudder,
        }
    }

    /// Crisp rudder command for crisp inputs, using the default grid.
    pub fn evaluate(&self, psi_err: f64, r_err: f64) -> Result<f64, FisError> {
        self.evaluate_with_grid(psi_err, r_err, DEFAULT_GRID_POINTS)
    }

    pub fn evaluate_with_grid(
        &self,
        psi_err: f64,
        r_err: f64,
        grid_points: usize,
    ) -> Result<f64, FisError> {
        let aggregate = self.infer(psi_err, r_err);
        let (lo, hi) = self.rudder.support();
        defuzzify_centroid_with_grid(|z| aggregate.value(z), lo, hi, grid_points)
    }
}

/// Aggregated output membership function, callable over the rudder support.
#[derive(Debug, Clone, Copy)]
pub struct Aggregate<'a> {
    strengths: [f64; 7],
    output: &'a LinguisticVariable,
}

impl Aggregate<'_> {
    /// Max clipping strength per output label, label order.
    pub fn strengths(&self) -> &[f64; 7] {
        &self.strengths
    }

    /// Pointwise max over the clipped consequent sets.
    pub fn value(&self, z: f64) -> f64 {
        let mut best = 0.0_f64;
        for (set, &strength) in self.output.sets().iter().zip(self.strengths.iter()) {
            if strength <= 0.0 {
                continue;
            }
            best = best.max(strength.min(set.eval(z)));
        }
        best
    }

    pub fn support(&self) -> (f64, f64) {
        self.output.support()
    }
}

/// Centre of area of `mu` over `[lo, hi]` with the default grid.
pub fn defuzzify_centroid(mu: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64, FisError> {
    defuzzify_centroid_with_grid(mu, lo, hi, DEFAULT_GRID_POINTS)
}

/// Trapezoidal-rule centroid on a uniform grid of `grid_points` samples.
///
/// Grid nodes come from an endpoint-weighted interpolation so a symmetric
/// interval produces an exactly sign-symmetric grid.
pub fn defuzzify_centroid_with_grid(
    mu: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    grid_points: usize,
) -> Result<f64, FisError> {
    assert!(grid_points >= 2, "centroid grid needs at least two points");
    assert!(lo < hi, "centroid support must be a proper interval");
    let steps = (grid_points - 1) as f64;
    let mut weighted = 0.0;
    let mut area = 0.0;
    for k in 0..grid_points {
        let t = k as f64;
        let z = (lo * (steps - t) + hi * t) / steps;
        let w = if k == 0 || k == grid_points - 1 { 0.5 } else { 1.0 };
        let m = w * mu(z);
        area += m;
        weighted += m * z;
    }
    let h = (hi - lo) / steps;
    if area * h < MIN_AGGREGATE_AREA {
        Err(FisError::ZeroActivation)
    } else {
        Ok(weighted / area)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruledsl::builtin_fis;

    fn tri(a: f64, b: f64, c: f64) -> TriangularMf {
        TriangularMf::new(a, b, c).unwrap()
    }

    #[test]
    fn triangular_eval_matches_hand_values() {
        let ze = tri(-0.133, 0.0, 0.133);
        assert_eq!(ze.eval(0.0), 1.0);
        assert!((ze.eval(0.0665) - 0.5).abs() < 1e-12);
        assert_eq!(ze.eval(-0.133), 0.0);
        assert_eq!(ze.eval(0.133), 0.0);
        assert_eq!(ze.eval(0.2), 0.0);

        let sp = tri(0.0, 0.133, 0.266);
        assert!((sp.eval(0.2) - 0.4962).abs() < 1e-4);
    }

    #[test]
    fn triangular_degenerate_edges_are_total() {
        let left = tri(0.0, 0.0, 1.0);
        assert_eq!(left.eval(0.0), 1.0);
        assert_eq!(left.eval(-0.1), 0.0);
        assert!((left.eval(0.5) - 0.5).abs() < 1e-15);

        let right = tri(0.0, 1.0, 1.0);
        assert_eq!(right.eval(1.0), 1.0);
        assert_eq!(right.eval(1.1), 0.0);
        assert!((right.eval(0.5) - 0.5).abs() < 1e-15);

        let spike = tri(0.5, 0.5, 0.5);
        assert_eq!(spike.eval(0.5), 1.0);
        assert_eq!(spike.eval(0.4999), 0.0);
    }

    #[test]
    fn triangular_rejects_disorder() {
        assert!(TriangularMf::new(0.3, 0.2, 0.5).is_err());
        assert!(TriangularMf::new(0.0, 0.6, 0.5).is_err());
        assert!(TriangularMf::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn label_negation_mirrors() {
        assert_eq!(Label::Bn.negated(), Label::Bp);
        assert_eq!(Label::Ze.negated(), Label::Ze);
        assert_eq!(Label::Sp.negated(), Label::Sn);
        assert_eq!(Label::parse("MP"), Some(Label::Mp));
        assert_eq!(Label::parse("XX"), None);
    }

    #[test]
    fn fuzzify_at_core_is_a_singleton() {
        let fis = builtin_fis();
        let mu = fis.psi_error().fuzzify(0.0);
        assert_eq!(mu, [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fuzzify_clamps_to_outer_core() {
        let fis = builtin_fis();
        let mu = fis.psi_error().fuzzify(-10.0);
        assert_eq!(mu, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn fuzzify_rate_error_splits_between_neighbours() {
        let fis = builtin_fis();
        let mu = fis.r_error().fuzzify(0.005);
        assert!((mu[Label::Sp.index()] - 0.5).abs() < 1e-9);
        assert!((mu[Label::Mp.index()] - 0.5).abs() < 1e-9);
        for label in [Label::Bn, Label::Mn, Label::Sn, Label::Ze, Label::Bp] {
            assert_eq!(mu[label.index()], 0.0);
        }
    }

    #[test]
    fn at_most_two_adjacent_sets_active() {
        let fis = builtin_fis();
        for var in [fis.psi_error(), fis.r_error(), fis.rudder()] {
            let (lo, hi) = var.core_span();
            for k in 0..=2000 {
                let x = lo + (hi - lo) * k as f64 / 2000.0;
                let mu = var.fuzzify(x);
                let active: Vec<usize> =
                    (0..7).filter(|&i| mu[i] > 0.0).collect();
                assert!(!active.is_empty(), "{} has a gap at {x}", var.name());
                assert!(active.len() <= 2, "{} has {active:?} active at {x}", var.name());
                if active.len() == 2 {
                    assert_eq!(active[1] - active[0], 1);
                }
            }
        }
    }

    #[test]
    fn adjacent_memberships_partition_unity() {
        let fis = builtin_fis();
        for var in [fis.psi_error(), fis.r_error(), fis.rudder()] {
            let (lo, hi) = var.core_span();
            for k in 0..=1000 {
                let x = lo + (hi - lo) * k as f64 / 1000.0;
                let sum: f64 = var.fuzzify(x).iter().sum();
                assert!(
                    (sum - 1.0).abs() <= 1e-9,
                    "{} memberships sum to {sum} at {x}",
                    var.name()
                );
            }
        }
    }

    #[test]
    fn infer_at_outer_cores_fires_a_single_rule() {
        let fis = builtin_fis();
        let agg = fis.infer(-0.4, -0.01);
        let mut expected = [0.0; 7];
        expected[Label::Bn.index()] = 1.0;
        assert_eq!(agg.strengths(), &expected);
        // Aggregate equals the BN consequent at full height.
        let bn = fis.rudder().set(Label::Bn);
        for k in 0..=200 {
            let z = -1.067 + 2.134 * k as f64 / 200.0;
            assert_eq!(agg.value(z), bn.eval(z));
        }
    }

    #[test]
    fn infer_at_zero_fires_the_zero_rule() {
        let fis = builtin_fis();
        let agg = fis.infer(0.0, 0.0);
        let mut expected = [0.0; 7];
        expected[Label::Ze.index()] = 1.0;
        assert_eq!(agg.strengths(), &expected);
    }

    #[test]
    fn infer_opposed_big_errors_cancel() {
        let fis = builtin_fis();
        let agg = fis.infer(-0.4, 0.01);
        let mut expected = [0.0; 7];
        expected[Label::Ze.index()] = 1.0;
        assert_eq!(agg.strengths(), &expected);
    }

    #[test]
    fn centroid_of_symmetric_triangle_sits_at_core() {
        let fis = builtin_fis();
        let zero = fis.evaluate(0.0, 0.0).unwrap();
        assert!(zero.abs() < 1e-9, "zero fixed point returned {zero}");

        // psi_err and r_err both at the SP core: only SP -> SP fires.
        let sp = fis.evaluate(0.133, 0.003335).unwrap();
        assert!((sp - 0.2667).abs() < 1e-4, "SP centroid returned {sp}");
    }

    #[test]
    fn centroid_rejects_zero_activation() {
        let err = defuzzify_centroid(|_| 0.0, -1.0, 1.0).unwrap_err();
        assert_eq!(err, FisError::ZeroActivation);
    }

    #[test]
    fn clipped_sp_centroid_matches_dense_reference() {
        // psi_err halfway up the SP edge with r_err at the SP core clips
        // the SP consequent at exactly 0.5. The expected centroid was
        // computed once with a 100000-point trapezoidal quadrature and is
        // frozen here; the default 1001-point grid must stay within 1e-5.
        let fis = builtin_fis();
        let agg = fis.infer(0.0665, 0.003335);
        let mut expected = [0.0; 7];
        expected[Label::Sp.index()] = 0.5;
        assert_eq!(agg.strengths(), &expected);
        let value = fis.evaluate(0.0665, 0.003335).unwrap();
        assert!((value - 0.2666611109).abs() < 1e-5, "centroid {value}");
    }

    #[test]
    fn evaluation_is_deterministic() {
        let fis = builtin_fis();
        let a = fis.evaluate(0.1234, -0.0042).unwrap();
        let b = fis.evaluate(0.1234, -0.0042).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn rule_matrix_rejects_broken_mirror() {
        let fis = builtin_fis();
        let mut table = [[Label::Ze; 7]; 7];
        for (i, row) in table.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = fis.rules().output(Label::ALL[i], Label::ALL[j]);
            }
        }
        assert!(RuleMatrix::new(table).is_ok());
        table[0][0] = Label::Sp; // mirror cell (6,6) still says BP
        let err = RuleMatrix::new(table).unwrap_err();
        assert!(err.to_string().contains("antisymmetric"));
    }

    #[test]
    fn variable_rejects_gaps_and_disorder() {
        let sets_gap = [
            tri(-4.0, -3.0, -2.5),
            tri(-2.0, -1.5, -1.0), // gap between -2.5 and -2.0
            tri(-1.5, -1.0, -0.5),
            tri(-1.0, 0.0, 1.0),
            tri(0.5, 1.0, 1.5),
            tri(1.0, 1.5, 2.0),
            tri(1.5, 2.0, 4.0),
        ];
        assert!(LinguisticVariable::new("psi_err", (-3.0, 3.0), sets_gap).is_err());

        let sets_core_order = [
            tri(-4.0, -3.0, -2.0),
            tri(-3.0, -3.0, -1.0), // core not above BN's
            tri(-2.0, -1.0, 0.0),
            tri(-1.0, 0.0, 1.0),
            tri(0.0, 1.0, 2.0),
            tri(1.0, 2.0, 3.0),
            tri(2.0, 3.0, 4.0),
        ];
        assert!(LinguisticVariable::new("psi_err", (-3.0, 3.0), sets_core_order).is_err());
    }
}

//! Type-1 Mamdani fuzzy inference: fuzzification, rule evaluation with
//! min/max composition, and centroid defuzzification.
//!
//! Systems are built either programmatically or from the text definition
//! format handled by [`parser`]. A [`FuzzySystem`] is immutable after
//! construction and inference is pure, so one instance can be shared across
//! any number of concurrent simulation replications.

mod parser;

pub use parser::load_fls_definition;

use std::collections::BTreeMap;

use thiserror::Error;

/// Default number of discretization points for centroid defuzzification.
pub const DEFAULT_RESOLUTION: usize = 1001;

#[derive(Debug, Error)]
pub enum FuzzyError {
    #[error("membership function parameters out of order: {0}")]
    BadOrdering(String),
    #[error("variable '{variable}': term '{term}' support [{lo}, {hi}] exceeds universe [{ulo}, {uhi}]")]
    SupportOutsideUniverse {
        variable: String,
        term: String,
        lo: f64,
        hi: f64,
        ulo: f64,
        uhi: f64,
    },
    #[error("variable '{variable}': duplicate term '{term}'")]
    DuplicateTerm { variable: String, term: String },
    #[error("variable '{0}': universe is empty or inverted")]
    BadUniverse(String),
    #[error("line {line}, column {col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("rule {rule}: unknown variable '{variable}'")]
    UnknownVariable { rule: usize, variable: String },
    #[error("rule {rule}: variable '{variable}' has no term '{term}'")]
    UnknownTerm { rule: usize, variable: String, term: String },
    #[error("system has no rules")]
    NoRules,
    #[error("input variable '{0}' is not used by any rule")]
    UnusedInput(String),
    #[error("incomplete rule base: no rule fires at {point}")]
    IncompleteRuleBase { point: String },
    #[error("missing input variable '{0}'")]
    MissingInput(String),
    #[error("defuzzification resolution must be at least 3, got {0}")]
    BadResolution(usize),
}

/// Piecewise-linear membership function over a real universe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    Triangular { a: f64, b: f64, c: f64 },
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        if !(a <= b && b <= c) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
            return Err(FuzzyError::BadOrdering(format!("tri {a} {b} {c}")));
        }
        Ok(Self::Triangular { a, b, c })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        if !(a <= b && b <= c && c <= d)
            || !a.is_finite()
            || !b.is_finite()
            || !c.is_finite()
            || !d.is_finite()
        {
            return Err(FuzzyError::BadOrdering(format!("trap {a} {b} {c} {d}")));
        }
        Ok(Self::Trapezoidal { a, b, c, d })
    }

    /// Membership degree of `x`, in [0, 1]: piecewise-linear interpolation,
    /// 0 outside the support, 1 on the peak or plateau.
    pub fn membership(&self, x: f64) -> f64 {
        match *self {
            Self::Triangular { a, b, c } => {
                if x < a || x > c {
                    0.0
                } else if x == b {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (c - x) / (c - b)
                }
            }
            Self::Trapezoidal { a, b, c, d } => {
                if x < a || x > d {
                    0.0
                } else if x >= b && x <= c {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (d - x) / (d - c)
                }
            }
        }
    }

    /// Closed interval outside of which membership is zero.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Triangular { a, c, .. } => (a, c),
            Self::Trapezoidal { a, d, .. } => (a, d),
        }
    }
}

/// A named variable over a closed real interval with a set of named terms.
#[derive(Debug, Clone)]
pub struct LinguisticVariable {
    name: String,
    lo: f64,
    hi: f64,
    terms: Vec<(String, MembershipFunction)>,
}

impl LinguisticVariable {
    pub fn new(name: &str, lo: f64, hi: f64) -> Result<Self, FuzzyError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(FuzzyError::BadUniverse(name.to_string()));
        }
        Ok(Self { name: name.to_string(), lo, hi, terms: Vec::new() })
    }

    pub fn add_term(&mut self, term: &str, mf: MembershipFunction) -> Result<(), FuzzyError> {
        if self.terms.iter().any(|(n, _)| n == term) {
            return Err(FuzzyError::DuplicateTerm {
                variable: self.name.clone(),
                term: term.to_string(),
            });
        }
        let (slo, shi) = mf.support();
        if slo < self.lo || shi > self.hi {
            return Err(FuzzyError::SupportOutsideUniverse {
                variable: self.name.clone(),
                term: term.to_string(),
                lo: slo,
                hi: shi,
                ulo: self.lo,
                uhi: self.hi,
            });
        }
        self.terms.push((term.to_string(), mf));
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &MembershipFunction)> {
        self.terms.iter().map(|(n, m)| (n.as_str(), m))
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.iter().position(|(n, _)| n == term)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// One membership degree per term, keyed by term name.
    pub fn fuzzify(&self, x: f64) -> BTreeMap<String, f64> {
        self.terms
            .iter()
            .map(|(name, mf)| (name.clone(), mf.membership(x)))
            .collect()
    }
}

/// IF <antecedents ANDed> THEN <output term>. Stored by index into the
/// owning system's variables, resolved at construction time.
#[derive(Debug, Clone)]
pub struct Rule {
    /// (input variable index, term index) pairs; combined with min.
    pub antecedents: Vec<(usize, usize)>,
    /// Term index into the output variable.
    pub consequent: usize,
}

/// A rule by name, before resolution: the ANDed (variable, term)
/// antecedents and the consequent term of the output variable.
pub type NamedRule = (Vec<(String, String)>, String);

/// Mamdani output fuzzy set: the pointwise max over rules of each rule's
/// consequent clipped at its firing strength.
#[derive(Debug, Clone)]
pub struct AggregatedOutput {
    clipped: Vec<(f64, MembershipFunction)>,
}

impl AggregatedOutput {
    pub fn degree(&self, y: f64) -> f64 {
        self.clipped
            .iter()
            .map(|(strength, mf)| strength.min(mf.membership(y)))
            .fold(0.0, f64::max)
    }

    /// True when no rule fired with positive strength.
    pub fn is_empty(&self) -> bool {
        self.clipped.iter().all(|(s, _)| *s <= 0.0)
    }
}

/// Result of one inference: the crisp value plus a flag recording that the
/// zero-activation fallback (universe midpoint) was used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    pub crisp: f64,
    pub no_rule_fired: bool,
}

/// Immutable Mamdani system: input variables, one output variable, an
/// AND-only rule base and a defuzzification resolution.
#[derive(Debug, Clone)]
pub struct FuzzySystem {
    inputs: Vec<LinguisticVariable>,
    output: LinguisticVariable,
    rules: Vec<Rule>,
    resolution: usize,
}

/// Grid points per input dimension for the load-time completeness check.
const COMPLETENESS_GRID: usize = 101;

impl FuzzySystem {
    /// Validates the rule base (existence of every referenced variable and
    /// term, every input used, completeness over a grid) and returns the
    /// system. `rules` reference variables and terms by name.
    pub fn new(
        inputs: Vec<LinguisticVariable>,
        output: LinguisticVariable,
        rules: &[NamedRule],
        resolution: usize,
    ) -> Result<Self, FuzzyError> {
        if resolution < 3 {
            return Err(FuzzyError::BadResolution(resolution));
        }
        if rules.is_empty() {
            return Err(FuzzyError::NoRules);
        }
        let mut resolved = Vec::with_capacity(rules.len());
        for (i, (ants, cons)) in rules.iter().enumerate() {
            let rule_no = i + 1;
            let mut antecedents = Vec::with_capacity(ants.len());
            for (var, term) in ants {
                let vi = inputs.iter().position(|v| v.name() == var).ok_or_else(|| {
                    FuzzyError::UnknownVariable { rule: rule_no, variable: var.clone() }
                })?;
                let ti = inputs[vi].term_index(term).ok_or_else(|| FuzzyError::UnknownTerm {
                    rule: rule_no,
                    variable: var.clone(),
                    term: term.clone(),
                })?;
                antecedents.push((vi, ti));
            }
            let consequent =
                output.term_index(cons).ok_or_else(|| FuzzyError::UnknownTerm {
                    rule: rule_no,
                    variable: output.name().to_string(),
                    term: cons.clone(),
                })?;
            resolved.push(Rule { antecedents, consequent });
        }
        for input in &inputs {
            let idx = inputs.iter().position(|v| v.name() == input.name()).unwrap();
            if !resolved.iter().any(|r| r.antecedents.iter().any(|(vi, _)| *vi == idx)) {
                return Err(FuzzyError::UnusedInput(input.name().to_string()));
            }
        }
        let system = Self { inputs, output, rules: resolved, resolution };
        system.check_completeness()?;
        Ok(system)
    }

    /// Every point of a per-dimension grid must fire at least one rule with
    /// positive strength.
    fn check_completeness(&self) -> Result<(), FuzzyError> {
        let dims = self.inputs.len();
        let mut idx = vec![0usize; dims];
        let mut point = vec![0.0f64; dims];
        loop {
            for (d, var) in self.inputs.iter().enumerate() {
                let (lo, hi) = var.universe();
                // Endpoint-exact grid: the arithmetic form can overshoot hi
                // by one ulp and fall outside every support.
                point[d] = if idx[d] == COMPLETENESS_GRID - 1 {
                    hi
                } else {
                    lo + (hi - lo) * idx[d] as f64 / (COMPLETENESS_GRID - 1) as f64
                };
            }
            let fired = self.rules.iter().any(|r| self.firing_strength(r, &point) > 0.0);
            if !fired {
                let described = self
                    .inputs
                    .iter()
                    .zip(&point)
                    .map(|(v, x)| format!("{}={}", v.name(), x))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(FuzzyError::IncompleteRuleBase { point: described });
            }
            // odometer increment
            let mut d = 0;
            loop {
                if d == dims {
                    return Ok(());
                }
                idx[d] += 1;
                if idx[d] < COMPLETENESS_GRID {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
        }
    }

    fn firing_strength(&self, rule: &Rule, point: &[f64]) -> f64 {
        rule.antecedents.iter().fold(1.0f64, |acc, &(vi, ti)| {
            acc.min(self.inputs[vi].terms[ti].1.membership(point[vi]))
        })
    }

    pub fn inputs(&self) -> &[LinguisticVariable] {
        &self.inputs
    }

    pub fn output(&self) -> &LinguisticVariable {
        &self.output
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    fn input_vector(&self, inputs: &BTreeMap<String, f64>) -> Result<Vec<f64>, FuzzyError> {
        self.inputs
            .iter()
            .map(|var| {
                inputs
                    .get(var.name())
                    .map(|&x| var.clamp(x))
                    .ok_or_else(|| FuzzyError::MissingInput(var.name().to_string()))
            })
            .collect()
    }

    /// Min/max Mamdani composition: each rule's firing strength is the min
    /// over its antecedent degrees; the output set is the max over rules of
    /// the consequent clipped at that strength.
    pub fn evaluate_rules(
        &self,
        inputs: &BTreeMap<String, f64>,
    ) -> Result<AggregatedOutput, FuzzyError> {
        let point = self.input_vector(inputs)?;
        let clipped = self
            .rules
            .iter()
            .map(|rule| {
                (self.firing_strength(rule, &point), self.output.terms[rule.consequent].1)
            })
            .collect();
        Ok(AggregatedOutput { clipped })
    }

    /// Discrete centroid of `agg` over a uniform grid of `resolution` points
    /// on `[lo, hi]` (endpoints included). An identically-zero aggregate
    /// falls back to the universe midpoint; callers surface the
    /// `no_rule_fired` flag in the run log.
    pub fn defuzzify_centroid(
        agg: &AggregatedOutput,
        universe: (f64, f64),
        resolution: usize,
    ) -> Result<Inference, FuzzyError> {
        if resolution < 3 {
            return Err(FuzzyError::BadResolution(resolution));
        }
        let (lo, hi) = universe;
        let step = (hi - lo) / (resolution - 1) as f64;
        let mut weighted = 0.0;
        let mut total = 0.0;
        for i in 0..resolution {
            let y = if i == resolution - 1 { hi } else { lo + step * i as f64 };
            let d = agg.degree(y);
            weighted += y * d;
            total += d;
        }
        if total <= 0.0 {
            return Ok(Inference { crisp: (lo + hi) / 2.0, no_rule_fired: true });
        }
        let crisp = (weighted / total).clamp(lo, hi);
        Ok(Inference { crisp, no_rule_fired: false })
    }

    /// Full pipeline: clamp inputs to their universes, fuzzify, evaluate the
    /// rule base, defuzzify. The crisp result always lies inside the output
    /// universe.
    pub fn infer(&self, inputs: &BTreeMap<String, f64>) -> Result<Inference, FuzzyError> {
        let agg = self.evaluate_rules(inputs)?;
        Self::defuzzify_centroid(&agg, self.output.universe(), self.resolution)
    }

    /// Convenience wrapper building the input map from name/value pairs.
    pub fn infer_pairs(&self, pairs: &[(&str, f64)]) -> Result<Inference, FuzzyError> {
        let map = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        self.infer(&map)
    }
}

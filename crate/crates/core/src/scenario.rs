//! Declarative scenarios and the runner that turns them into reports.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "two_level"
//! measure = "System"
//! scope = ["Preparer", "System"]
//! wrap_policy = "error"          # or "warn"
//! expect_conserved = true        # exit status 2 if a ledger deviation exceeds 1e-10
//!
//! [mode]
//! kind = "exhaustive"            # or: kind = "sample", trials = 100000, seed = 7
//!
//! [[subsystems]]
//! label = "Preparer"
//! dim = 7
//! state = { kind = "basis", l = 0 }
//!
//! [[subsystems]]
//! label = "System"
//! dim = 7
//! state = { kind = "basis", l = 0 }
//!
//! [[chain]]
//! kind = "shift_prepare"
//! source = "Preparer"
//! target = "System"
//! profile = { kind = "explicit", terms = [{ l = -1, re = 1.0 }, { l = 1, re = 1.0 }] }
//! ```
//!
//! Profiles are `basis { l }`, `uniform { lo, hi }`, `gaussian { center,
//! width }` or `explicit { terms = [{ l, re, im }] }`; every profile is
//! normalized on load. Chain steps are `shift_prepare { source, target,
//! profile }`, `pointer_couple { source, meter }` and `swap { a, b }`.
//! An optional `[table1] outcome = l0` section adds the grand-preparer chain
//! report; it needs a grand-preparer followed by two shift-prepare steps
//! (grand-preparer to preparer, then preparer to system).

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

use crate::conservation::{
    branch_mean_offsets, chain_report, evolve, ledger_for, meter_untouched_check, table1_oracle, BranchOffsets,
    ChainReport, ConservationLedger, MeterCheck, Table1,
};
use crate::density::{entanglement_entropy, entanglement_entropy_of};
use crate::error::{Error, Result};
use crate::interactions::{InteractionKind, WrapPolicy};
use crate::lattice::ModeWavefunction;
use crate::measurement::{sample_counts, RNG_ALGORITHM};
use crate::report::{OutcomeRow, Report, Table1Block, SCHEMA_VERSION};
use crate::representations::frame_factorization_residual;
use crate::state::{CompositeState, SubsystemLabel};
use crate::tolerance::AMPLITUDE_TOL;

use num_complex::Complex64;

/// Largest accepted frame-factorization residual.
pub const FRAME_TOL: f64 = 1e-9;

/// Scenarios shipped with the crate, keyed by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("sec3_meter", include_str!("../scenarios/sec3_meter.toml")),
    ("sec4_two_level", include_str!("../scenarios/sec4_two_level.toml")),
    ("appendixA_chain", include_str!("../scenarios/appendixA_chain.toml")),
    ("sec6_swap", include_str!("../scenarios/sec6_swap.toml")),
    ("appendixB_frame", include_str!("../scenarios/appendixB_frame.toml")),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub l: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Named initial-state or shift profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    Basis { l: i64 },
    Uniform { lo: i64, hi: i64 },
    Gaussian { center: f64, width: f64 },
    Explicit { terms: Vec<Term> },
}

impl ProfileSpec {
    pub fn build(&self, dim: usize) -> Result<ModeWavefunction> {
        let dim = dim as i64;
        match self {
            ProfileSpec::Basis { l } => ModeWavefunction::basis_state(dim, *l),
            ProfileSpec::Uniform { lo, hi } => ModeWavefunction::uniform(dim, *lo, *hi),
            ProfileSpec::Gaussian { center, width } => ModeWavefunction::gaussian(dim, *center, *width),
            ProfileSpec::Explicit { terms } => {
                let terms = terms.iter().map(|t| (t.l, Complex64::new(t.re, t.im)));
                Ok(ModeWavefunction::superposition(dim, terms)?.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsystemSpec {
    pub label: SubsystemLabel,
    pub dim: usize,
    pub state: ProfileSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSpec {
    ShiftPrepare {
        source: SubsystemLabel,
        target: SubsystemLabel,
        profile: ProfileSpec,
    },
    PointerCouple {
        source: SubsystemLabel,
        meter: SubsystemLabel,
    },
    Swap {
        a: SubsystemLabel,
        b: SubsystemLabel,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    #[default]
    Exhaustive,
    Sample { trials: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Table1Spec {
    pub outcome: i64,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub subsystems: Vec<SubsystemSpec>,
    #[serde(default)]
    pub chain: Vec<StepSpec>,
    pub measure: SubsystemLabel,
    pub scope: Vec<SubsystemLabel>,
    #[serde(default)]
    pub mode: ModeSpec,
    #[serde(default)]
    pub wrap_policy: WrapPolicy,
    #[serde(default = "yes")]
    pub expect_conserved: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table1: Option<Table1Spec>,
}

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub wrap_policy: Option<WrapPolicy>,
}

/// Trials used when a seed override switches an exhaustive scenario to sampling.
pub const DEFAULT_TRIALS: u64 = 100_000;

impl ScenarioConfig {
    /// Parse and validate. Parse errors carry the line and column.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// A bundled scenario by name.
    pub fn bundled(name: &str) -> Result<Self> {
        let (_, text) = BUNDLED
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Config(format!("no bundled scenario named {name:?}")))?;
        Self::from_toml_str(text)
    }

    pub fn apply_overrides(&mut self, o: Overrides) {
        if let Some(w) = o.wrap_policy {
            self.wrap_policy = w;
        }
        if o.seed.is_some() || o.trials.is_some() {
            let (trials, seed) = match self.mode {
                ModeSpec::Sample { trials, seed } => (trials, seed),
                ModeSpec::Exhaustive => (DEFAULT_TRIALS, 0),
            };
            self.mode = ModeSpec::Sample {
                trials: o.trials.unwrap_or(trials),
                seed: o.seed.unwrap_or(seed),
            };
        }
    }

    fn dim_of(&self, label: SubsystemLabel) -> Option<usize> {
        self.subsystems.iter().find(|s| s.label == label).map(|s| s.dim)
    }

    fn require(&self, label: SubsystemLabel, field: &str) -> Result<usize> {
        self.dim_of(label)
            .ok_or_else(|| Error::Config(format!("{field}: subsystem {label} is not declared")))
    }

    /// Structural checks. The support-fit rule is checked by
    /// [`ScenarioConfig::check_support`].
    pub fn validate(&self) -> Result<()> {
        if self.subsystems.is_empty() {
            return Err(Error::Config("subsystems: at least one subsystem is required".into()));
        }
        for (i, s) in self.subsystems.iter().enumerate() {
            if self.subsystems[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::Config(format!("subsystems[{i}]: duplicate label {}", s.label)));
            }
            if s.dim == 0 {
                return Err(Error::Config(format!("subsystems[{i}].dim: must be positive")));
            }
            s.state
                .build(s.dim)
                .map_err(|e| Error::Config(format!("subsystems[{i}].state: {e}")))?;
        }
        for (i, step) in self.chain.iter().enumerate() {
            let field = format!("chain[{i}]");
            match step {
                StepSpec::ShiftPrepare { source, target, profile } => {
                    self.require(*source, &field)?;
                    let d = self.require(*target, &field)?;
                    profile
                        .build(d)
                        .map_err(|e| Error::Config(format!("{field}.profile: {e}")))?;
                }
                StepSpec::PointerCouple { source, meter } => {
                    self.require(*source, &field)?;
                    self.require(*meter, &field)?;
                }
                StepSpec::Swap { a, b } => {
                    self.require(*a, &field)?;
                    self.require(*b, &field)?;
                }
            }
        }
        self.require(self.measure, "measure")?;
        if self.scope.is_empty() {
            return Err(Error::Config("scope: must name at least one subsystem".into()));
        }
        for l in &self.scope {
            self.require(*l, "scope")?;
        }
        if let ModeSpec::Sample { trials: 0, .. } = self.mode {
            return Err(Error::Config("mode.trials: must be positive".into()));
        }
        if self.table1.is_some() {
            self.table1_profiles()?;
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<CompositeState> {
        let parts = self
            .subsystems
            .iter()
            .map(|s| Ok((s.label, s.state.build(s.dim)?)))
            .collect::<Result<Vec<_>>>()?;
        CompositeState::tensor(&parts)
    }

    pub fn interactions(&self) -> Result<Vec<InteractionKind>> {
        self.chain
            .iter()
            .map(|step| {
                Ok(match step {
                    StepSpec::ShiftPrepare { source, target, profile } => {
                        let d = self.require(*target, "chain")?;
                        InteractionKind::shift_prepare(*source, *target, profile.build(d)?)
                    }
                    StepSpec::PointerCouple { source, meter } => InteractionKind::pointer_couple(*source, *meter),
                    StepSpec::Swap { a, b } => InteractionKind::swap(*a, *b),
                })
            })
            .collect()
    }

    /// `(Phi_g, Phi_p, Psi)` for the grand-preparer chain report.
    fn table1_profiles(&self) -> Result<(ModeWavefunction, ModeWavefunction, ModeWavefunction)> {
        use SubsystemLabel::{GrandPreparer, Preparer, System};
        let bad = || {
            Error::Config(
                "table1: needs a GrandPreparer subsystem and a chain starting with \
                 shift_prepare(GrandPreparer -> Preparer), shift_prepare(Preparer -> System)"
                    .into(),
            )
        };
        let g = self.subsystems.iter().find(|s| s.label == GrandPreparer).ok_or_else(bad)?;
        let (p, s) = match self.chain.as_slice() {
            [StepSpec::ShiftPrepare { source: GrandPreparer, target: Preparer, profile: p }, StepSpec::ShiftPrepare { source: Preparer, target: System, profile: s }, ..] => {
                (p, s)
            }
            _ => return Err(bad()),
        };
        Ok((g.state.build(g.dim)?, p.build(g.dim)?, s.build(g.dim)?))
    }
}

/// Run a scenario end to end.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let initial = config.initial_state()?;
    let chain = config.interactions()?;
    let evolution = evolve(&initial, &chain, config.wrap_policy)?;
    let mut warnings = evolution.wrap_warnings.clone();

    // totals that leave the canonical window would alias under reduction
    for (which, state) in [("initial", &initial), ("final", evolution.last())] {
        let outside = state.total_outside_window(&config.scope)?;
        if !outside.is_empty() {
            let detail = format!("{which} scope totals {outside:?} fall outside the canonical window");
            match config.wrap_policy {
                WrapPolicy::Error => {
                    let dim = state.window_of(config.scope[0])?.dim();
                    return Err(Error::Wrap { dim, detail });
                }
                WrapPolicy::Warn => warnings.push(detail),
            }
        }
    }

    let ledger: ConservationLedger = ledger_for(&initial, evolution.last(), config.measure, &config.scope)?;

    let (seed, trials, counts) = match config.mode {
        ModeSpec::Exhaustive => (None, None, None),
        ModeSpec::Sample { trials, seed } => {
            let probs: Vec<f64> = ledger.per_outcome.iter().map(|e| e.probability).collect();
            (Some(seed), Some(trials), Some(sample_counts(&probs, seed, trials)))
        }
    };
    let outcomes = ledger
        .per_outcome
        .iter()
        .enumerate()
        .map(|(i, e)| OutcomeRow {
            outcome: e.outcome,
            probability: e.probability,
            deviation: e.deviation,
            post_distribution: e.post_distribution.clone(),
            count: counts.as_ref().map(|c| c[i]),
            frequency: match (&counts, trials) {
                (Some(c), Some(t)) => Some(c[i] as f64 / t as f64),
                _ => None,
            },
        })
        .collect();

    let table1 = match &config.table1 {
        Some(spec) => {
            let (g, p, s) = config.table1_profiles()?;
            let simulated: ChainReport = chain_report(&g, &p, &s, spec.outcome)?;
            let oracle: Table1 = table1_oracle(&g, &p, spec.outcome);
            let max_deviation = simulated.distributions.max_deviation(&oracle);
            Some(Table1Block {
                measured_value: spec.outcome,
                outcome_probability: simulated.outcome_probability,
                simulated: simulated.distributions,
                oracle,
                max_deviation,
            })
        }
        None => None,
    };

    let mut residuals = BTreeMap::new();
    let mut branch_offsets: BTreeMap<String, BranchOffsets> = BTreeMap::new();
    let mut meter_checks: BTreeMap<String, MeterCheck> = BTreeMap::new();
    for (i, step) in chain.iter().enumerate() {
        let after = &evolution.states[i + 1];
        let key = format!("step{i}:{step}");
        match step {
            InteractionKind::ShiftPrepare { source, target, profile } => {
                if after.labels().len() == 2 {
                    residuals.insert(key.clone(), frame_factorization_residual(after, *source, *target, profile)?);
                }
                branch_offsets.insert(key, branch_mean_offsets(evolution.last(), *target, *source)?);
            }
            InteractionKind::PointerCouple { meter, .. } => {
                meter_checks.insert(key, meter_untouched_check(&evolution.states[i], after, *meter)?);
            }
            InteractionKind::Swap { .. } => {}
        }
    }

    let last = evolution.last();
    let mut entropies = BTreeMap::new();
    if last.labels().len() > 1 {
        for &label in last.labels() {
            entropies.insert(label.to_string(), entanglement_entropy(last, label)?);
        }
        use SubsystemLabel::{Preparer, System};
        if last.contains(System) && last.contains(Preparer) {
            let pair = if last.labels().len() == 2 {
                0.0
            } else {
                entanglement_entropy_of(last, &[System, Preparer])?
            };
            let mi = entropies["System"] + entropies["Preparer"] - pair;
            entropies.insert("I(System:Preparer)".into(), mi.max(0.0));
        }
    }

    let max_deviation = ledger.max_deviation();
    let conserved = ledger.conserved();
    let mut violations = Vec::new();
    if config.expect_conserved && !conserved {
        violations.push(format!("ledger deviation {max_deviation:e} exceeds {AMPLITUDE_TOL:e}"));
    }
    if let Some(t) = &table1 {
        if t.max_deviation > AMPLITUDE_TOL {
            violations.push(format!("table1 deviation {:e} exceeds {AMPLITUDE_TOL:e}", t.max_deviation));
        }
    }
    for (k, r) in &residuals {
        if *r > FRAME_TOL {
            violations.push(format!("frame residual {r:e} at {k} exceeds {FRAME_TOL:e}"));
        }
    }
    for (k, m) in &meter_checks {
        if !m.untouched {
            violations.push(format!("meter disturbed at {k} (deviation {:e})", m.max_deviation));
        }
    }

    Ok(Report {
        schema_version: SCHEMA_VERSION,
        scenario: config.name.clone(),
        mode: match config.mode {
            ModeSpec::Exhaustive => "exhaustive".into(),
            ModeSpec::Sample { .. } => "sample".into(),
        },
        seed,
        trials,
        rng: seed.map(|_| RNG_ALGORITHM.to_string()),
        config: config.clone(),
        measured: config.measure,
        scope: config.scope.clone(),
        baseline: ledger.baseline,
        outcomes,
        max_deviation,
        conserved,
        expect_conserved: config.expect_conserved,
        table1,
        residuals,
        entropies,
        branch_offsets,
        meter_checks,
        violations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_parses() {
        for (name, _) in BUNDLED {
            let c = ScenarioConfig::bundled(name).unwrap();
            assert_eq!(&c.name, name);
        }
    }

    #[test]
    fn unknown_bundled_name() {
        assert!(matches!(ScenarioConfig::bundled("nope"), Err(Error::Config(_))));
    }

    #[test]
    fn parse_error_reports_location() {
        let text = "name = \"x\"\nmeasure = \"System\"\nscope = [\"System\"\n";
        let err = ScenarioConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn unknown_field_is_rejected() {
        let text = r#"
name = "x"
measure = "System"
scope = ["System"]
colour = "red"
[[subsystems]]
label = "System"
dim = 3
state = { kind = "basis", l = 0 }
"#;
        let err = ScenarioConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn undeclared_reference_names_the_field() {
        let text = r#"
name = "x"
measure = "System"
scope = ["System"]
[[subsystems]]
label = "System"
dim = 3
state = { kind = "basis", l = 0 }
[[chain]]
kind = "swap"
a = "System"
b = "Preparer"
"#;
        let err = ScenarioConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("chain[0]") && err.contains("Preparer"), "{err}");
    }

    #[test]
    fn zero_profile_is_rejected() {
        let text = r#"
name = "x"
measure = "System"
scope = ["System"]
[[subsystems]]
label = "System"
dim = 3
state = { kind = "explicit", terms = [{ l = 0, re = 0.0 }] }
"#;
        let err = ScenarioConfig::from_toml_str(text).unwrap_err().to_string();
        assert!(err.contains("subsystems[0].state"), "{err}");
    }

    #[test]
    fn overrides_switch_to_sampling() {
        let mut c = ScenarioConfig::bundled("sec4_two_level").unwrap();
        c.apply_overrides(Overrides { seed: Some(9), ..Default::default() });
        assert_eq!(c.mode, ModeSpec::Sample { trials: DEFAULT_TRIALS, seed: 9 });
        c.apply_overrides(Overrides { trials: Some(10), wrap_policy: Some(WrapPolicy::Warn), ..Default::default() });
        assert_eq!(c.mode, ModeSpec::Sample { trials: 10, seed: 9 });
        assert_eq!(c.wrap_policy, WrapPolicy::Warn);
    }

    #[test]
    fn wrapping_scenario_follows_policy() {
        let text = r#"
name = "wraps"
measure = "System"
scope = ["Preparer", "System"]
[[subsystems]]
label = "Preparer"
dim = 5
state = { kind = "basis", l = -2 }
[[subsystems]]
label = "System"
dim = 5
state = { kind = "basis", l = 0 }
[[chain]]
kind = "shift_prepare"
source = "Preparer"
target = "System"
profile = { kind = "uniform", lo = 0, hi = 1 }
"#;
        let mut c = ScenarioConfig::from_toml_str(text).unwrap();
        assert!(matches!(run_scenario(&c), Err(Error::Wrap { .. })));
        c.wrap_policy = WrapPolicy::Warn;
        let r = run_scenario(&c).unwrap();
        assert!(!r.warnings.is_empty());
    }
}

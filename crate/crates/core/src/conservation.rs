//! Per-outcome angular momentum bookkeeping.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::interactions::{InteractionKind, WrapPolicy};
use crate::lattice::ModeWavefunction;
use crate::measurement::outcome_table;
use crate::state::{max_abs_deviation, CompositeState, Distribution, SubsystemLabel};
use crate::tolerance::{AMPLITUDE_TOL, ZERO_PROBABILITY};

use SubsystemLabel::{GrandPreparer, Preparer, System};

/// Conditional total-L distribution for one measurement outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub outcome: i64,
    pub probability: f64,
    pub post_distribution: Distribution,
    /// Largest absolute difference between `post_distribution` and the baseline.
    pub deviation: f64,
}

/// Total angular momentum over `scope` before the chain, and conditioned on
/// every outcome of the final measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationLedger {
    pub scope: Vec<SubsystemLabel>,
    pub measured: SubsystemLabel,
    pub baseline: Distribution,
    pub per_outcome: Vec<LedgerEntry>,
}

impl ConservationLedger {
    pub fn max_deviation(&self) -> f64 {
        self.per_outcome.iter().map(|e| e.deviation).fold(0.0, f64::max)
    }

    pub fn probability_sum(&self) -> f64 {
        self.per_outcome.iter().map(|e| e.probability).sum()
    }

    /// Every outcome reproduces the baseline within `tol`.
    pub fn conserved_within(&self, tol: f64) -> bool {
        self.max_deviation() <= tol
    }

    pub fn conserved(&self) -> bool {
        self.conserved_within(AMPLITUDE_TOL)
    }
}

/// States produced by running a chain of interactions.
#[derive(Debug, Clone)]
pub struct Evolution {
    /// `states[0]` is the initial state, `states[i + 1]` follows step `i`.
    pub states: Vec<CompositeState>,
    pub wrap_warnings: Vec<String>,
}

impl Evolution {
    pub fn last(&self) -> &CompositeState {
        self.states.last().expect("evolution holds the initial state")
    }
}

pub fn evolve(initial: &CompositeState, chain: &[InteractionKind], policy: WrapPolicy) -> Result<Evolution> {
    let mut states = vec![initial.clone()];
    let mut wrap_warnings = Vec::new();
    for step in chain {
        let applied = step.apply(states.last().unwrap(), policy)?;
        wrap_warnings.extend(applied.wrap_warnings);
        states.push(applied.state);
    }
    Ok(Evolution { states, wrap_warnings })
}

/// Ledger of an already evolved state against the baseline of `initial`.
pub fn ledger_for(
    initial: &CompositeState,
    evolved: &CompositeState,
    measure: SubsystemLabel,
    scope: &[SubsystemLabel],
) -> Result<ConservationLedger> {
    let baseline = initial.total_l_distribution(scope)?;
    let mut per_outcome = Vec::new();
    for rec in outcome_table(evolved, measure)? {
        let post_distribution = rec.post_state.total_l_distribution(scope)?;
        let deviation = max_abs_deviation(&post_distribution, &baseline);
        per_outcome.push(LedgerEntry {
            outcome: rec.value,
            probability: rec.probability,
            post_distribution,
            deviation,
        });
    }
    Ok(ConservationLedger {
        scope: scope.to_vec(),
        measured: measure,
        baseline,
        per_outcome,
    })
}

/// Run `chain` on `initial`, measure `measure`, and compare the total
/// angular momentum over `scope` in each outcome with its initial value.
/// Shifts that wrap around the lattice are errors.
pub fn build_ledger(
    initial: &CompositeState,
    chain: &[InteractionKind],
    measure: SubsystemLabel,
    scope: &[SubsystemLabel],
) -> Result<ConservationLedger> {
    let evolution = evolve(initial, chain, WrapPolicy::Error)?;
    ledger_for(initial, evolution.last(), measure, scope)
}

/// Angular momentum distributions of the preparer and grand-preparer right
/// after the preparer is prepared, and after the system is found with
/// momentum `l0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub preparer_at_prep: Distribution,
    pub preparer_post_measure: Distribution,
    pub grandpreparer_at_prep: Distribution,
    pub grandpreparer_post_measure: Distribution,
}

impl Table1 {
    /// Largest entrywise difference from `other` across all four rows.
    pub fn max_deviation(&self, other: &Table1) -> f64 {
        [
            max_abs_deviation(&self.preparer_at_prep, &other.preparer_at_prep),
            max_abs_deviation(&self.preparer_post_measure, &other.preparer_post_measure),
            max_abs_deviation(&self.grandpreparer_at_prep, &other.grandpreparer_at_prep),
            max_abs_deviation(&self.grandpreparer_post_measure, &other.grandpreparer_post_measure),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn rows(&self) -> [&Distribution; 4] {
        [
            &self.preparer_at_prep,
            &self.preparer_post_measure,
            &self.grandpreparer_at_prep,
            &self.grandpreparer_post_measure,
        ]
    }

    /// Largest deviation of any row from unit total probability.
    pub fn normalization_error(&self) -> f64 {
        self.rows()
            .iter()
            .map(|d| (d.values().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Simulated grand-preparer chain, postselected on the system momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub measured_value: i64,
    /// Probability of finding the system at `measured_value`.
    pub outcome_probability: f64,
    pub distributions: Table1,
}

fn chain_dim(phi_g: &ModeWavefunction, phi_p: &ModeWavefunction, psi: &ModeWavefunction) -> Result<i64> {
    let d = phi_g.dim();
    if phi_p.dim() != d || psi.dim() != d {
        return Err(Error::DimMismatch(format!(
            "grand-preparer {d}, preparer {}, system {}",
            phi_p.dim(),
            psi.dim()
        )));
    }
    Ok(d as i64)
}

/// Simulate the chain: the grand-preparer (state `phi_g`) prepares the
/// preparer into `phi_p`, the preparer prepares the system into `psi`, and
/// the system is found at `l0`.
pub fn chain_report(
    phi_g: &ModeWavefunction,
    phi_p: &ModeWavefunction,
    psi: &ModeWavefunction,
    l0: i64,
) -> Result<ChainReport> {
    let d = chain_dim(phi_g, phi_p, psi)?;
    let initial = CompositeState::tensor(&[
        (GrandPreparer, phi_g.clone()),
        (Preparer, ModeWavefunction::basis_state(d, 0)?),
        (System, ModeWavefunction::basis_state(d, 0)?),
    ])?;
    let chain = [
        InteractionKind::shift_prepare(GrandPreparer, Preparer, phi_p.clone()),
        InteractionKind::shift_prepare(Preparer, System, psi.clone()),
    ];
    let evolution = evolve(&initial, &chain, WrapPolicy::Error)?;
    let prepared = &evolution.states[1];

    let record = outcome_table(evolution.last(), System)?
        .into_iter()
        .find(|r| r.value == l0)
        .ok_or(Error::ZeroProbability { label: System, value: l0 })?;
    let post = &record.post_state;

    Ok(ChainReport {
        measured_value: l0,
        outcome_probability: record.probability,
        distributions: Table1 {
            preparer_at_prep: prepared.marginal_distribution(Preparer)?,
            preparer_post_measure: post.marginal_distribution(Preparer)?,
            grandpreparer_at_prep: prepared.marginal_distribution(GrandPreparer)?,
            grandpreparer_post_measure: post.marginal_distribution(GrandPreparer)?,
        },
    })
}

/// The closed forms of the chain distributions, evaluated directly from the
/// profiles:
///
/// * preparer at preparation: `|Phi_p(l)|^2`
/// * preparer after the system is found at `l0`: `|Phi_p(l + l0)|^2`
/// * grand-preparer, both times: `sum_l |Phi_g(k + l)|^2 |Phi_p(l)|^2`
///
/// Indices are taken modulo the lattice size.
pub fn table1_oracle(phi_g: &ModeWavefunction, phi_p: &ModeWavefunction, l0: i64) -> Table1 {
    let w = phi_p.window();
    let preparer_at_prep = w.values().map(|l| (l, phi_p.amp(l).norm_sqr())).collect();
    let preparer_post_measure = w.values().map(|l| (l, phi_p.amp(l + l0).norm_sqr())).collect();
    let grand: Distribution = phi_g
        .window()
        .values()
        .map(|k| {
            let p = w
                .values()
                .map(|l| phi_g.amp(k + l).norm_sqr() * phi_p.amp(l).norm_sqr())
                .sum();
            (k, p)
        })
        .collect();
    Table1 {
        preparer_at_prep,
        preparer_post_measure,
        grandpreparer_at_prep: grand.clone(),
        grandpreparer_post_measure: grand,
    }
}

/// Mean momentum of the frame conditioned on each value of the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchOffsets {
    /// System value `m` -> conditional mean of the frame.
    pub means: BTreeMap<i64, f64>,
    /// `(m1, m2, mean(m2) - mean(m1))` for every pair `m1 < m2`.
    pub differences: Vec<(i64, i64, f64)>,
}

pub fn branch_mean_offsets(
    state: &CompositeState,
    sys: SubsystemLabel,
    frame: SubsystemLabel,
) -> Result<BranchOffsets> {
    let (ps, pf) = (state.position(sys)?, state.position(frame)?);
    let mut weight: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for (tuple, a) in state.amplitudes() {
        let p = a.norm_sqr();
        let e = weight.entry(tuple[ps]).or_default();
        e.0 += p;
        e.1 += p * tuple[pf] as f64;
    }
    let means: BTreeMap<i64, f64> = weight
        .into_iter()
        .filter(|(_, (p, _))| *p > ZERO_PROBABILITY)
        .map(|(m, (p, s))| (m, s / p))
        .collect();
    let entries: Vec<(i64, f64)> = means.iter().map(|(&m, &v)| (m, v)).collect();
    let mut differences = Vec::new();
    for (i, &(m1, v1)) in entries.iter().enumerate() {
        for &(m2, v2) in &entries[i + 1..] {
            differences.push((m1, m2, v2 - v1));
        }
    }
    Ok(BranchOffsets { means, differences })
}

/// Result of [`meter_untouched_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeterCheck {
    pub untouched: bool,
    pub max_deviation: f64,
}

/// Whether the meter's angular momentum is the same in `before` and
/// `after`.
///
/// The meter's own coordinate is a pointer that carries no angular
/// momentum, so its declared distribution is `{0: 1}` on both sides. Any
/// angular momentum exchanged with the meter body would have to show up as
/// a change in the total over the remaining (circle) subsystems, so that
/// total is compared as well. A transition that only moves the pointer
/// passes with deviation zero.
pub fn meter_untouched_check(
    before: &CompositeState,
    after: &CompositeState,
    meter: SubsystemLabel,
) -> Result<MeterCheck> {
    if meter.carries_angular_momentum() {
        return Err(Error::NotAMeter(meter));
    }
    before.position(meter)?;
    after.position(meter)?;
    // the pointer is declared to carry no angular momentum
    let meter_before = Distribution::from([(0, 1.0)]);
    let meter_after = Distribution::from([(0, 1.0)]);

    let circle = |s: &CompositeState| -> Vec<SubsystemLabel> {
        s.labels().iter().copied().filter(|l| l.carries_angular_momentum()).collect()
    };
    let (cb, ca) = (circle(before), circle(after));
    let mut sorted_b = cb.clone();
    let mut sorted_a = ca.clone();
    sorted_b.sort();
    sorted_a.sort();
    if sorted_b != sorted_a {
        return Err(Error::Invalid("before and after hold different subsystems".into()));
    }
    let recoil = if cb.is_empty() {
        0.0
    } else {
        max_abs_deviation(&before.total_l_distribution(&cb)?, &after.total_l_distribution(&ca)?)
    };
    let max_deviation = max_abs_deviation(&meter_before, &meter_after).max(recoil);
    Ok(MeterCheck { untouched: max_deviation <= AMPLITUDE_TOL, max_deviation })
}

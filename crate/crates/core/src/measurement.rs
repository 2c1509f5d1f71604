//! Projective measurement of one subsystem coordinate.
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`. Trial `i` of a run with base seed `s` draws from the
//! generator seeded with `s` and switched to stream `i`, so trials are
//! independent of the order they run in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::state::{CompositeState, SubsystemLabel};
use crate::tolerance::ZERO_PROBABILITY;

/// Name of the generator recorded in reports.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3), seed_from_u64, stream = trial index";

/// One possible result of measuring a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub label: SubsystemLabel,
    pub value: i64,
    pub probability: f64,
    pub post_state: CompositeState,
}

/// Every outcome of measuring `label` with probability above
/// [`ZERO_PROBABILITY`], in ascending order of value.
pub fn outcome_table(state: &CompositeState, label: SubsystemLabel) -> Result<Vec<OutcomeRecord>> {
    let marginal = state.marginal_distribution(label)?;
    let mut records = Vec::new();
    for (value, p) in marginal {
        if p <= ZERO_PROBABILITY {
            continue;
        }
        let (probability, post) = state.project(label, value)?;
        if let Some(post_state) = post {
            records.push(OutcomeRecord { label, value, probability, post_state });
        }
    }
    Ok(records)
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Index drawn from `probabilities` by inverse-CDF sampling.
pub fn draw_index<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> usize {
    let total: f64 = probabilities.iter().sum();
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, p) in probabilities.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probabilities.len().saturating_sub(1)
}

/// Draw one outcome with Born-rule probability. Deterministic in `seed`.
pub fn sample_outcome(state: &CompositeState, label: SubsystemLabel, seed: u64) -> Result<OutcomeRecord> {
    let table = outcome_table(state, label)?;
    let probs: Vec<f64> = table.iter().map(|r| r.probability).collect();
    let i = draw_index(&probs, &mut trial_rng(seed, 0));
    Ok(table.into_iter().nth(i).expect("outcome table is never empty for a normalized state"))
}

/// Counts of each table entry over `trials` seeded draws.
pub fn sample_counts(probabilities: &[f64], seed: u64, trials: u64) -> Vec<u64> {
    let mut counts = vec![0u64; probabilities.len()];
    for t in 0..trials {
        counts[draw_index(probabilities, &mut trial_rng(seed, t))] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ModeWavefunction;
    use crate::state::SubsystemLabel::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn entangled(alpha_sq: f64) -> CompositeState {
        CompositeState::from_terms(
            &[(System, 7), (Meter, 7)],
            [(vec![1, 1], c(alpha_sq.sqrt())), (vec![2, 2], c((1.0 - alpha_sq).sqrt()))],
        )
        .unwrap()
    }

    #[test]
    fn collapse_probabilities() {
        let table = outcome_table(&entangled(0.5), Meter).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!((table[0].value, table[1].value), (1, 2));
        assert_abs_diff_eq!(table[0].probability, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(table[1].probability, 0.5, epsilon = 1e-12);
        assert_eq!(table[0].post_state.amp(&[1, 1]), c(1.0));
        assert_eq!(table[1].post_state.amp(&[2, 2]), c(1.0));
    }

    #[test]
    fn eigenstate_gives_single_record() {
        let s = CompositeState::tensor(&[(System, ModeWavefunction::basis_state(5, -2).unwrap())]).unwrap();
        let table = outcome_table(&s, System).unwrap();
        assert_eq!(table.len(), 1);
        assert_eq!(table[0].probability, 1.0);
        assert_eq!(table[0].post_state, s);
    }

    #[test]
    fn unknown_label() {
        assert!(outcome_table(&entangled(0.5), Preparer).is_err());
        assert!(sample_outcome(&entangled(0.5), Preparer, 1).is_err());
    }

    #[test]
    fn repeated_measurement_is_stable() {
        for rec in outcome_table(&entangled(0.3), System).unwrap() {
            let again = outcome_table(&rec.post_state, System).unwrap();
            assert_eq!(again.len(), 1);
            assert_eq!(again[0].value, rec.value);
            assert_abs_diff_eq!(again[0].probability, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = entangled(0.5);
        let a = sample_outcome(&s, Meter, 42).unwrap();
        let b = sample_outcome(&s, Meter, 42).unwrap();
        assert_eq!(a, b);
        let det = CompositeState::tensor(&[(System, ModeWavefunction::basis_state(5, 1).unwrap())]).unwrap();
        for seed in 0..20 {
            assert_eq!(sample_outcome(&det, System, seed).unwrap().value, 1);
        }
    }

    #[test]
    fn sampling_frequency() {
        let n = 100_000u64;
        let counts = sample_counts(&[0.5, 0.5], 7, n);
        let f = counts[0] as f64 / n as f64;
        assert!((f - 0.5).abs() <= 3.0 * (0.25 / n as f64).sqrt(), "{f}");
    }
}

use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::TAU;

use angmom::density::entanglement_entropy;
use angmom::SubsystemLabel::{Meter, Preparer, System};
use angmom::*;

fn profile(dim: usize, lo: i64, raw: Vec<(f64, f64)>) -> ModeWavefunction {
    let mut terms: Vec<(i64, Complex64)> =
        raw.iter().enumerate().map(|(i, &(re, im))| (lo + i as i64, Complex64::new(re, im))).collect();
    terms.push((lo, Complex64::new(0.05, 0.0)));
    ModeWavefunction::superposition(dim as i64, terms).unwrap().0
}

/// `(dim, preparer profile, system profile)` whose supports fit the window
/// after a shift-prepare.
fn fitting_pair() -> impl Strategy<Value = (usize, ModeWavefunction, ModeWavefunction)> {
    (8usize..=24).prop_flat_map(|dim| {
        let q = (dim / 4) as i64;
        let amp = (-1.0f64..1.0, -1.0f64..1.0);
        (
            Just(dim),
            -(q - 1)..=0i64,
            proptest::collection::vec(amp.clone(), 1..=(q as usize)),
            -q..=0i64,
            proptest::collection::vec(amp, 1..=(q as usize + 1)),
        )
            .prop_map(|(dim, plo, praw, slo, sraw)| (dim, profile(dim, plo, praw), profile(dim, slo, sraw)))
    })
}

fn prepared(dim: usize, phi: &ModeWavefunction, psi: &ModeWavefunction) -> CompositeState {
    let rest = ModeWavefunction::basis_state(dim as i64, 0).unwrap();
    let s = CompositeState::tensor(&[(Preparer, phi.clone()), (System, rest)]).unwrap();
    shift_prepare(&s, Preparer, System, psi).unwrap()
}

fn arbitrary_mode() -> impl Strategy<Value = ModeWavefunction> {
    (1usize..=16).prop_flat_map(|dim| {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_map(move |raw| {
            let lo = -((dim / 2) as i64);
            profile(dim, lo, raw)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interactions_preserve_norm((dim, phi, psi) in fitting_pair()) {
        let s = prepared(dim, &phi, &psi);
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        let swapped = swap_states(&s, Preparer, System).unwrap();
        prop_assert!((swapped.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bipartite_entropies_agree((dim, phi, psi) in fitting_pair()) {
        let s = prepared(dim, &phi, &psi);
        let a = entanglement_entropy(&s, Preparer).unwrap();
        let b = entanglement_entropy(&s, System).unwrap();
        prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn joint_rotation_commutes_with_preparation((dim, phi, psi) in fitting_pair(), angle in -3.0f64..3.0) {
        let rest = ModeWavefunction::basis_state(dim as i64, 0).unwrap();
        let s = CompositeState::tensor(&[(Preparer, phi.clone()), (System, rest)]).unwrap();
        let rotate = |x: &CompositeState| x.rotate(Preparer, angle).unwrap().rotate(System, angle).unwrap();
        let a = rotate(&shift_prepare(&s, Preparer, System, &psi).unwrap());
        let b = shift_prepare(&rotate(&s), Preparer, System, &psi).unwrap();
        prop_assert!(a.max_amp_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn angle_transform_is_isometric(psi in arbitrary_mode()) {
        let phi = to_angle(&psi);
        prop_assert!((phi.norm() - psi.norm()).abs() < 1e-12);
        let back = to_momentum(&phi);
        for (x, y) in back.amplitudes().iter().zip(psi.amplitudes()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn shift_becomes_phase(psi in arbitrary_mode(), m in -20i64..20) {
        let d = psi.dim();
        let a = to_angle(&psi);
        let b = to_angle(&psi.shifted(m));
        for j in 0..d {
            let phase = Complex64::from_polar(1.0, TAU * (j as i64 * m).rem_euclid(d as i64) as f64 / d as f64);
            prop_assert!((b.amplitudes()[j] - phase * a.amplitudes()[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn outcome_mixture_reproduces_baseline((dim, phi, psi) in fitting_pair()) {
        // statistical conservation: the probability-weighted post-measurement
        // totals average back to the baseline, even for the system alone
        let s = prepared(dim, &phi, &psi);
        let ledger = build_ledger(&s, &[], System, &[System]).unwrap();
        let table = outcome_table(&s, System).unwrap();
        let mut mix = std::collections::BTreeMap::<i64, f64>::new();
        for r in &table {
            for (t, p) in r.post_state.total_l_distribution(&[System]).unwrap() {
                *mix.entry(t).or_default() += r.probability * p;
            }
        }
        prop_assert!(angmom::state::max_abs_deviation(&mix, &ledger.baseline) < 1e-12);
        prop_assert!((ledger.probability_sum() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn preparer_and_system_conserve_per_outcome((dim, phi, psi) in fitting_pair()) {
        let rest = ModeWavefunction::basis_state(dim as i64, 0).unwrap();
        let s = CompositeState::tensor(&[(Preparer, phi), (System, rest)]).unwrap();
        let chain = [InteractionKind::shift_prepare(Preparer, System, psi)];
        let ledger = build_ledger(&s, &chain, System, &[Preparer, System]).unwrap();
        prop_assert!(ledger.conserved(), "{}", ledger.max_deviation());
    }

    #[test]
    fn pointer_reads_the_system((dim, phi, psi) in fitting_pair()) {
        let s = prepared(dim, &phi, &psi);
        let terms = s.amplitudes().iter().map(|(t, a)| (vec![t[0], t[1], 0], *a));
        let s = CompositeState::from_terms(&[(Preparer, dim), (System, dim), (Meter, dim)], terms).unwrap();
        let read = pointer_couple(&s, System, Meter).unwrap();
        for t in read.amplitudes().keys() {
            prop_assert_eq!(t[1], t[2]);
        }
        prop_assert_eq!(
            read.marginal_distribution(System).unwrap(),
            s.marginal_distribution(System).unwrap()
        );
    }

    #[test]
    fn reordering_keeps_marginals((dim, phi, psi) in fitting_pair()) {
        let s = prepared(dim, &phi, &psi);
        let r = s.reordered(&[System, Preparer]).unwrap();
        prop_assert_eq!(r.labels(), &[System, Preparer]);
        for l in [Preparer, System] {
            let a = s.marginal_distribution(l).unwrap();
            let b = r.marginal_distribution(l).unwrap();
            prop_assert!(angmom::state::max_abs_deviation(&a, &b) < 1e-15);
        }
    }
}

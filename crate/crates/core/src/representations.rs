//! Angle representation of circle wavefunctions.
//!
//! The angle ket is `|theta> = sum_l exp(-i theta l) |l>`, so the angle
//! amplitude of a momentum wavefunction is
//!
//! ```text
//! psi~(theta_j) = D^{-1/2} sum_l exp(+i theta_j l) psi(l),   theta_j = 2 pi j / D
//! ```
//!
//! with `l` over the canonical window. Both directions are unit-normalized,
//! so on the `D`-point grid the transform is unitary and momentum shifts by
//! `m` become multiplication by `exp(i theta_j m)` exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::lattice::{ModeWavefunction, Window};
use crate::state::{CompositeState, SubsystemLabel};

/// Amplitudes at the grid angles `theta_j = 2 pi j / D`, `j = 0..D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleWavefunction {
    amps: Vec<Complex64>,
}

impl AngleWavefunction {
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::NonPositiveDim(0));
        }
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Angle of grid point `j`, in radians.
    pub fn angle(&self, j: usize) -> f64 {
        grid_angle(self.dim(), j)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn grid_angle(dim: usize, j: usize) -> f64 {
    TAU * j as f64 / dim as f64
}

/// `exp(i theta_j l) / sqrt(D)`, the kernel taking momentum amplitudes to
/// angle amplitudes.
fn kernel(dim: usize, j: usize, l: i64) -> Complex64 {
    // reduce j*l modulo D before forming the angle to keep the phase exact
    let k = (j as i64 * l).rem_euclid(dim as i64);
    Complex64::from_polar(1.0 / (dim as f64).sqrt(), grid_angle(dim, k as usize))
}

pub fn to_angle(psi: &ModeWavefunction) -> AngleWavefunction {
    let d = psi.dim();
    let w = psi.window();
    let amps = (0..d)
        .map(|j| w.values().map(|l| kernel(d, j, l) * psi.amp(l)).sum())
        .collect();
    AngleWavefunction { amps }
}

pub fn to_momentum(phi: &AngleWavefunction) -> ModeWavefunction {
    let d = phi.dim();
    let w = Window::new(d).expect("angle wavefunction has positive dim");
    let amps = w
        .values()
        .map(|l| {
            phi.amps
                .iter()
                .enumerate()
                .map(|(j, a)| kernel(d, j, l).conj() * a)
                .sum()
        })
        .collect();
    ModeWavefunction::from_window_amplitudes(amps).expect("positive dim")
}

/// Joint angle-basis amplitude table of a two-label state, indexed
/// `[(j_a, j_b)]` by grid positions of `a` and `b`.
pub fn joint_angle_amplitudes(
    state: &CompositeState,
    a: SubsystemLabel,
    b: SubsystemLabel,
) -> Result<DMatrix<Complex64>> {
    let mut found = state.labels().to_vec();
    found.sort();
    let mut expected = vec![a, b];
    expected.sort();
    if found != expected || a == b {
        return Err(Error::ExtraLabels { expected: vec![a, b], found: state.labels().to_vec() });
    }
    let (pa, pb) = (state.position(a)?, state.position(b)?);
    let (da, db) = (state.windows()[pa].dim(), state.windows()[pb].dim());

    // apply the transform one factor at a time: first along b, then along a
    let mut partial = DMatrix::<Complex64>::zeros(da, db);
    for (tuple, amp) in state.amplitudes() {
        let ia = state.windows()[pa].index(tuple[pa]);
        for jb in 0..db {
            partial[(ia, jb)] += kernel(db, jb, tuple[pb]) * amp;
        }
    }
    let wa = state.windows()[pa];
    let mut table = DMatrix::<Complex64>::zeros(da, db);
    for ja in 0..da {
        for la in wa.values() {
            let k = kernel(da, ja, la);
            let ia = wa.index(la);
            for jb in 0..db {
                table[(ja, jb)] += k * partial[(ia, jb)];
            }
        }
    }
    Ok(table)
}

/// Momentum profile of the frame implied by a prepared state and target:
/// `Phi(T) = sum_s conj(Psi(s)) amp(frame = T - s, sys = s)`.
///
/// For a state produced by shift-prepare this recovers the frame's initial
/// profile exactly.
pub fn implied_frame_profile(
    state: &CompositeState,
    frame: SubsystemLabel,
    sys: SubsystemLabel,
    target: &ModeWavefunction,
) -> Result<ModeWavefunction> {
    let (pf, ps) = (state.position(frame)?, state.position(sys)?);
    let w = state.windows()[pf];
    if state.windows()[ps].dim() != w.dim() || target.dim() != w.dim() {
        return Err(Error::DimMismatch(format!(
            "frame {}, system {}, target {}",
            w.dim(),
            state.windows()[ps].dim(),
            target.dim()
        )));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); w.dim()];
    for (tuple, a) in state.amplitudes() {
        let total = tuple[pf] + tuple[ps];
        amps[w.index(total)] += target.amp(tuple[ps]).conj() * a;
    }
    ModeWavefunction::from_window_amplitudes(amps)
}

/// How far the joint angle table of `state` is from the frame-relative form
/// `Phi~(theta_f) Psi~(theta_s - theta_f)`, as the largest absolute entry
/// difference after removing one global phase.
///
/// `Phi` is the frame profile implied by the state (see
/// [`implied_frame_profile`]). The global phase is fixed by aligning the
/// largest-magnitude entry of the model table.
pub fn frame_factorization_residual(
    state: &CompositeState,
    frame: SubsystemLabel,
    sys: SubsystemLabel,
    target: &ModeWavefunction,
) -> Result<f64> {
    let table = joint_angle_amplitudes(state, frame, sys)?;
    let phi = implied_frame_profile(state, frame, sys, target)?;
    let phi_t = to_angle(&phi);
    let psi_t = to_angle(target);
    let d = target.dim();

    let model = DMatrix::from_fn(d, d, |jf, js| {
        let rel = (js + d - jf) % d;
        phi_t.amps[jf] * psi_t.amps[rel]
    });
    let (mut best, mut idx) = (0.0, (0, 0));
    for jf in 0..d {
        for js in 0..d {
            let m = model[(jf, js)].norm();
            if m > best {
                best = m;
                idx = (jf, js);
            }
        }
    }
    let phase = if best > 0.0 && table[idx].norm() > 0.0 {
        let r = table[idx] / model[idx];
        r / r.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok((table - model * phase).iter().map(|c| c.norm()).fold(0.0, f64::max))
}

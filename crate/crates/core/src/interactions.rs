//! Angular-momentum-conserving interactions and their verifiers.
//!
//! Three interactions are provided:
//!
//! * [`InteractionKind::ShiftPrepare`]: a source particle prepares a target
//!   particle from `|0>` into a profile `Psi`, recoiling by the momentum it
//!   hands over: `|l>|0> -> sum_m Psi(m) |l - m>|m>`.
//! * [`InteractionKind::PointerCouple`]: a meter pointer records the source
//!   momentum, `|m>|q=0> -> |m>|q=m>`.
//! * [`InteractionKind::Swap`]: the two particles exchange states.
//!
//! Every interaction is a unitary on the full joint space. Shift-prepare is
//! only prescribed on the `|0>` fiber of the target; it is completed to a
//! unitary sector by sector of total momentum (see [`shift_completion`]).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{ModeWavefunction, Window};
use crate::state::{CompositeState, SubsystemLabel};
use crate::tolerance::{AMPLITUDE_TOL, DEFAULT_ENUMERATION_CAP, PRUNE};

/// What to do when a momentum shift leaves the canonical window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrapPolicy {
    #[default]
    Error,
    Warn,
}

/// A linear map described by its action on basis tuples.
pub trait BasisAction {
    fn name(&self) -> String;

    /// Check that the action is applicable to a joint space with this layout.
    fn validate(&self, labels: &[SubsystemLabel], windows: &[Window]) -> Result<()>;

    /// Image of one basis tuple. Output coordinates may lie outside the
    /// windows; callers reduce them.
    fn act(&self, labels: &[SubsystemLabel], windows: &[Window], tuple: &[i64]) -> Vec<(Vec<i64>, Complex64)>;
}

/// The interactions of a preparation/measurement chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InteractionKind {
    ShiftPrepare {
        source: SubsystemLabel,
        target: SubsystemLabel,
        profile: ModeWavefunction,
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

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InteractionKind::ShiftPrepare { source, target, .. } => {
                write!(f, "shift_prepare({source} -> {target})")
            }
            InteractionKind::PointerCouple { source, meter } => {
                write!(f, "pointer_couple({source} -> {meter})")
            }
            InteractionKind::Swap { a, b } => write!(f, "swap({a}, {b})"),
        }
    }
}

fn pos(labels: &[SubsystemLabel], label: SubsystemLabel) -> Result<usize> {
    labels
        .iter()
        .position(|&l| l == label)
        .ok_or(Error::UnknownLabel(label))
}

fn require_circle(label: SubsystemLabel) -> Result<()> {
    if label.carries_angular_momentum() {
        Ok(())
    } else {
        Err(Error::MeterNotAllowed(label))
    }
}

/// Unitary on the target coordinate of one total-momentum sector whose
/// column for target `0` is `profile` exactly.
///
/// Rows and columns are window positions of the target quantum number. The
/// remaining columns come from a Householder reflection that sends `|0>` to
/// the normalized profile, so the matrix is unitary iff `profile` is
/// normalized.
pub fn shift_completion(profile: &ModeWavefunction) -> DMatrix<Complex64> {
    let window = profile.window();
    let d = window.dim();
    let z = window.index(0);
    let raw = nalgebra::DVector::from_column_slice(profile.amplitudes());
    let n = raw.norm();
    let mut u = DMatrix::<Complex64>::identity(d, d);
    if n > f64::MIN_POSITIVE {
        let unit = &raw / Complex64::new(n, 0.0);
        let phase = if unit[z].norm() > 0.0 {
            unit[z] / unit[z].norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let aligned = &unit * phase.conj();
        let mut v = -aligned;
        v[z] += Complex64::new(1.0, 0.0);
        let vv = v.norm_squared();
        if vv > 1e-30 {
            let two = Complex64::new(2.0 / vv, 0.0);
            u -= &v * v.adjoint() * two;
        }
        u *= phase;
    }
    u.set_column(z, &raw);
    u
}

impl InteractionKind {
    pub fn shift_prepare(source: SubsystemLabel, target: SubsystemLabel, profile: ModeWavefunction) -> Self {
        InteractionKind::ShiftPrepare { source, target, profile }
    }

    pub fn pointer_couple(source: SubsystemLabel, meter: SubsystemLabel) -> Self {
        InteractionKind::PointerCouple { source, meter }
    }

    pub fn swap(a: SubsystemLabel, b: SubsystemLabel) -> Self {
        InteractionKind::Swap { a, b }
    }

    /// Labels the interaction touches.
    pub fn labels(&self) -> Vec<SubsystemLabel> {
        match self {
            InteractionKind::ShiftPrepare { source, target, .. } => vec![*source, *target],
            InteractionKind::PointerCouple { source, meter } => vec![*source, *meter],
            InteractionKind::Swap { a, b } => vec![*a, *b],
        }
    }

    /// Check state-dependent preconditions (fiducial `|0>` target or pointer).
    fn check_fiducial(&self, state: &CompositeState) -> Result<()> {
        let fiducial = match self {
            InteractionKind::ShiftPrepare { target, profile, .. } => {
                if !profile.is_normalized() {
                    return Err(Error::Invalid(format!(
                        "shift profile has norm {}, expected 1",
                        profile.norm()
                    )));
                }
                Some(*target)
            }
            InteractionKind::PointerCouple { meter, .. } => Some(*meter),
            InteractionKind::Swap { .. } => None,
        };
        if let Some(label) = fiducial {
            let p0 = state.marginal_distribution(label)?[&0];
            if p0 < 1.0 - AMPLITUDE_TOL {
                return Err(Error::NotFiducial { label, p0 });
            }
        }
        Ok(())
    }

    /// Apply to a state, honoring the wrap policy.
    pub fn apply(&self, state: &CompositeState, policy: WrapPolicy) -> Result<Applied> {
        self.check_fiducial(state)?;
        apply_action(self, state, policy)
    }
}

impl BasisAction for InteractionKind {
    fn name(&self) -> String {
        self.to_string()
    }

    fn validate(&self, labels: &[SubsystemLabel], windows: &[Window]) -> Result<()> {
        match self {
            InteractionKind::ShiftPrepare { source, target, profile } => {
                let (s, t) = (pos(labels, *source)?, pos(labels, *target)?);
                require_circle(*source)?;
                require_circle(*target)?;
                if s == t {
                    return Err(Error::DuplicateLabel(*source));
                }
                let d = windows[s].dim();
                if windows[t].dim() != d || profile.dim() != d {
                    return Err(Error::DimMismatch(format!(
                        "shift_prepare needs equal sizes: source {d}, target {}, profile {}",
                        windows[t].dim(),
                        profile.dim()
                    )));
                }
            }
            InteractionKind::PointerCouple { source, meter } => {
                let (s, m) = (pos(labels, *source)?, pos(labels, *meter)?);
                require_circle(*source)?;
                if meter.carries_angular_momentum() {
                    return Err(Error::NotAMeter(*meter));
                }
                if windows[m].dim() < windows[s].dim() {
                    return Err(Error::PointerOverflow {
                        meter_dim: windows[m].dim(),
                        source_dim: windows[s].dim(),
                    });
                }
            }
            InteractionKind::Swap { a, b } => {
                let (i, j) = (pos(labels, *a)?, pos(labels, *b)?);
                require_circle(*a)?;
                require_circle(*b)?;
                if i == j {
                    return Err(Error::DuplicateLabel(*a));
                }
                if windows[i].dim() != windows[j].dim() {
                    return Err(Error::DimMismatch(format!(
                        "swap needs equal sizes, got {} and {}",
                        windows[i].dim(),
                        windows[j].dim()
                    )));
                }
            }
        }
        Ok(())
    }

    fn act(&self, labels: &[SubsystemLabel], windows: &[Window], tuple: &[i64]) -> Vec<(Vec<i64>, Complex64)> {
        match self {
            InteractionKind::ShiftPrepare { source, target, profile } => {
                let (s, t) = (pos(labels, *source).unwrap(), pos(labels, *target).unwrap());
                let w = windows[t];
                let total = tuple[s] + tuple[t];
                let col = w.index(tuple[t]);
                // the |0> fiber is the profile itself
                let u = (tuple[t] != 0).then(|| shift_completion(profile));
                w.values()
                    .filter_map(|m| {
                        let c = match &u {
                            Some(u) => u[(w.index(m), col)],
                            None => profile.amp(m),
                        };
                        (c.norm() > PRUNE).then(|| {
                            let mut out = tuple.to_vec();
                            out[s] = total - m;
                            out[t] = m;
                            (out, c)
                        })
                    })
                    .collect()
            }
            InteractionKind::PointerCouple { source, meter } => {
                let (s, m) = (pos(labels, *source).unwrap(), pos(labels, *meter).unwrap());
                let mut out = tuple.to_vec();
                out[m] += tuple[s];
                vec![(out, Complex64::new(1.0, 0.0))]
            }
            InteractionKind::Swap { a, b } => {
                let (i, j) = (pos(labels, *a).unwrap(), pos(labels, *b).unwrap());
                let mut out = tuple.to_vec();
                out.swap(i, j);
                vec![(out, Complex64::new(1.0, 0.0))]
            }
        }
    }
}

/// Result of applying an interaction to a state.
#[derive(Debug, Clone)]
pub struct Applied {
    pub state: CompositeState,
    /// Human-readable notes about shifts that wrapped around the lattice.
    pub wrap_warnings: Vec<String>,
}

/// Apply any [`BasisAction`] to a state.
pub fn apply_action(action: &dyn BasisAction, state: &CompositeState, policy: WrapPolicy) -> Result<Applied> {
    let labels = state.labels();
    let windows = state.windows();
    action.validate(labels, windows)?;
    let mut wrapped: Option<(Vec<i64>, Vec<i64>)> = None;
    let evolved = state.map_basis(|tuple| {
        let out = action.act(labels, windows, tuple);
        if wrapped.is_none() {
            for (t, _) in &out {
                if t.iter().zip(windows).any(|(&l, w)| !w.contains(l)) {
                    wrapped = Some((tuple.to_vec(), t.clone()));
                    break;
                }
            }
        }
        out
    });
    let mut wrap_warnings = Vec::new();
    if let Some((from, to)) = wrapped {
        let detail = format!("{}: {from:?} -> {to:?}", action.name());
        let dim = windows.first().map_or(0, Window::dim);
        match policy {
            WrapPolicy::Error => return Err(Error::Wrap { dim, detail }),
            WrapPolicy::Warn => {
                log::warn!("lattice wrap in {detail}");
                wrap_warnings.push(detail);
            }
        }
    }
    Ok(Applied { state: evolved, wrap_warnings })
}

/// Prepare `target` from `|0>` into `profile` using `source` as the
/// momentum reservoir. Shifts that wrap around the lattice are errors.
pub fn shift_prepare(
    state: &CompositeState,
    source: SubsystemLabel,
    target: SubsystemLabel,
    profile: &ModeWavefunction,
) -> Result<CompositeState> {
    InteractionKind::shift_prepare(source, target, profile.clone())
        .apply(state, WrapPolicy::Error)
        .map(|a| a.state)
}

/// Record the momentum of `source` in the pointer of `meter`.
pub fn pointer_couple(state: &CompositeState, source: SubsystemLabel, meter: SubsystemLabel) -> Result<CompositeState> {
    InteractionKind::pointer_couple(source, meter)
        .apply(state, WrapPolicy::Error)
        .map(|a| a.state)
}

/// Exchange the states of `a` and `b`.
pub fn swap_states(state: &CompositeState, a: SubsystemLabel, b: SubsystemLabel) -> Result<CompositeState> {
    InteractionKind::swap(a, b)
        .apply(state, WrapPolicy::Error)
        .map(|a| a.state)
}

/// An ad hoc basis map, used to build counterexamples for the verifiers.
pub struct CustomAction<F> {
    pub name: String,
    pub map: F,
}

impl<F> BasisAction for CustomAction<F>
where
    F: Fn(&[SubsystemLabel], &[i64]) -> Vec<(Vec<i64>, Complex64)>,
{
    fn name(&self) -> String {
        self.name.clone()
    }

    fn validate(&self, _labels: &[SubsystemLabel], _windows: &[Window]) -> Result<()> {
        Ok(())
    }

    fn act(&self, labels: &[SubsystemLabel], _windows: &[Window], tuple: &[i64]) -> Vec<(Vec<i64>, Complex64)> {
        (self.map)(labels, tuple)
    }
}

/// Outcome of [`verify_unitary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryCheck {
    pub unitary: bool,
    /// Largest entry of `|U^dagger U - I|`.
    pub max_deviation: f64,
}

/// Outcome of [`verify_conserves_total_l`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConservationCheck {
    pub conserves: bool,
    /// First basis tuple (in zero-first enumeration order) whose image leaks
    /// into a different total-momentum sector.
    pub witness: Option<Vec<i64>>,
    /// Largest amplitude found outside the input's sector.
    pub max_leak: f64,
}

struct Enumeration {
    labels: Vec<SubsystemLabel>,
    windows: Vec<Window>,
}

impl Enumeration {
    fn new(layout: &[(SubsystemLabel, usize)], cap: usize) -> Result<Self> {
        let mut labels = Vec::new();
        let mut windows = Vec::new();
        for &(label, dim) in layout {
            if labels.contains(&label) {
                return Err(Error::DuplicateLabel(label));
            }
            labels.push(label);
            windows.push(Window::new(dim)?);
        }
        let size = windows
            .iter()
            .try_fold(1usize, |acc, w| acc.checked_mul(w.dim()))
            .unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::EnumerationCap { size, cap });
        }
        Ok(Self { labels, windows })
    }

    /// Every basis tuple, each coordinate running `0, 1, .., -1`.
    fn tuples(&self) -> Vec<Vec<i64>> {
        let mut out = vec![Vec::new()];
        for w in &self.windows {
            let mut next = Vec::with_capacity(out.len() * w.dim());
            for t in &out {
                for l in w.values_from_zero() {
                    let mut t = t.clone();
                    t.push(l);
                    next.push(t);
                }
            }
            out = next;
        }
        out
    }

    fn reduce(&self, t: &[i64]) -> Vec<i64> {
        t.iter().zip(&self.windows).map(|(&l, w)| w.canonical(l)).collect()
    }

    fn circle_window(&self) -> Result<Option<Window>> {
        let mut found: Option<Window> = None;
        for (l, w) in self.labels.iter().zip(&self.windows) {
            if !l.carries_angular_momentum() {
                continue;
            }
            match found {
                Some(prev) if prev != *w => {
                    return Err(Error::DimMismatch(format!(
                        "total angular momentum needs equal lattice sizes, got {} and {}",
                        prev.dim(),
                        w.dim()
                    )))
                }
                _ => found = Some(*w),
            }
        }
        Ok(found)
    }

    fn total(&self, window: Window, t: &[i64]) -> i64 {
        let s: i64 = self
            .labels
            .iter()
            .zip(t)
            .filter(|(l, _)| l.carries_angular_momentum())
            .map(|(_, &v)| v)
            .sum();
        window.canonical(s)
    }
}

/// Build the full matrix of `action` on the joint space described by
/// `layout` and check that its columns are orthonormal.
pub fn verify_unitary(
    action: &dyn BasisAction,
    layout: &[(SubsystemLabel, usize)],
    cap: Option<usize>,
) -> Result<UnitaryCheck> {
    let en = Enumeration::new(layout, cap.unwrap_or(DEFAULT_ENUMERATION_CAP))?;
    action.validate(&en.labels, &en.windows)?;
    let inputs = en.tuples();

    // rows[output tuple] = [(column, amplitude)]
    let mut rows: HashMap<Vec<i64>, Vec<(usize, Complex64)>> = HashMap::new();
    for (col, t) in inputs.iter().enumerate() {
        for (out, c) in action.act(&en.labels, &en.windows, t) {
            let entry = rows.entry(en.reduce(&out)).or_default();
            match entry.iter_mut().find(|(j, _)| *j == col) {
                Some((_, acc)) => *acc += c,
                None => entry.push((col, c)),
            }
        }
    }

    let mut gram: HashMap<(usize, usize), Complex64> = HashMap::new();
    for entries in rows.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                *gram.entry((i, j)).or_default() += a.conj() * b;
            }
        }
    }
    let mut worst: f64 = 0.0;
    for i in 0..inputs.len() {
        let d = gram.get(&(i, i)).copied().unwrap_or_default();
        worst = worst.max((d - Complex64::new(1.0, 0.0)).norm());
    }
    for (&(i, j), g) in &gram {
        if i != j {
            worst = worst.max(g.norm());
        }
    }
    Ok(UnitaryCheck { unitary: worst <= AMPLITUDE_TOL, max_deviation: worst })
}

/// Check that every basis tuple with total angular momentum `T` (meters
/// contributing zero) is mapped into the span of tuples with total `T`.
pub fn verify_conserves_total_l(
    action: &dyn BasisAction,
    layout: &[(SubsystemLabel, usize)],
    cap: Option<usize>,
) -> Result<ConservationCheck> {
    let en = Enumeration::new(layout, cap.unwrap_or(DEFAULT_ENUMERATION_CAP))?;
    action.validate(&en.labels, &en.windows)?;
    let Some(window) = en.circle_window()? else {
        return Ok(ConservationCheck { conserves: true, witness: None, max_leak: 0.0 });
    };
    let mut witness = None;
    let mut max_leak: f64 = 0.0;
    for t in en.tuples() {
        let before = en.total(window, &t);
        let mut leak: HashMap<Vec<i64>, Complex64> = HashMap::new();
        for (out, c) in action.act(&en.labels, &en.windows, &t) {
            let out = en.reduce(&out);
            if en.total(window, &out) != before {
                *leak.entry(out).or_default() += c;
            }
        }
        let worst = leak.values().map(|c| c.norm()).fold(0.0, f64::max);
        if worst > AMPLITUDE_TOL && witness.is_none() {
            witness = Some(t.clone());
        }
        max_leak = max_leak.max(worst);
    }
    Ok(ConservationCheck { conserves: witness.is_none(), witness, max_leak })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use SubsystemLabel::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_level(dim: i64) -> ModeWavefunction {
        ModeWavefunction::superposition(dim, [(-1, c(1.0)), (1, c(1.0))]).unwrap().0
    }

    fn zero(dim: i64) -> ModeWavefunction {
        ModeWavefunction::basis_state(dim, 0).unwrap()
    }

    #[test]
    fn shift_prepare_two_level() {
        let s0 = CompositeState::tensor(&[(Preparer, zero(7)), (System, zero(7))]).unwrap();
        let s1 = shift_prepare(&s0, Preparer, System, &two_level(7)).unwrap();
        let want = CompositeState::from_terms(
            &[(Preparer, 7), (System, 7)],
            [(vec![1, -1], c(1.0)), (vec![-1, 1], c(1.0))],
        )
        .unwrap();
        assert!(s1.max_amp_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn identity_profile_leaves_state() {
        let phi = ModeWavefunction::uniform(7, -1, 1).unwrap();
        let s0 = CompositeState::tensor(&[(Preparer, phi), (System, zero(7))]).unwrap();
        let s1 = shift_prepare(&s0, Preparer, System, &zero(7)).unwrap();
        assert!(s1.max_amp_diff(&s0).unwrap() < 1e-15);
    }

    #[test]
    fn shift_prepare_requires_fiducial_target() {
        let s0 = CompositeState::tensor(&[(Preparer, zero(7)), (System, two_level(7))]).unwrap();
        let r = shift_prepare(&s0, Preparer, System, &two_level(7));
        assert!(matches!(r, Err(Error::NotFiducial { label: System, .. })));
    }

    #[test]
    fn shift_prepare_dim_mismatch() {
        let s0 = CompositeState::tensor(&[(Preparer, zero(7)), (System, zero(5))]).unwrap();
        let r = shift_prepare(&s0, Preparer, System, &two_level(7));
        assert!(matches!(r, Err(Error::DimMismatch(_))));
    }

    #[test]
    fn wrap_is_an_error_by_default_and_a_warning_on_request() {
        let s0 = CompositeState::tensor(&[(Preparer, ModeWavefunction::basis_state(5, -2).unwrap()), (System, zero(5))])
            .unwrap();
        let kind = InteractionKind::shift_prepare(Preparer, System, two_level(5));
        assert!(matches!(kind.apply(&s0, WrapPolicy::Error), Err(Error::Wrap { .. })));
        let applied = kind.apply(&s0, WrapPolicy::Warn).unwrap();
        assert_eq!(applied.wrap_warnings.len(), 1);
        assert!(applied.state.is_normalized());
    }

    #[test]
    fn pointer_records_eigenvalue() {
        let s0 = CompositeState::tensor(&[(System, ModeWavefunction::basis_state(7, 2).unwrap()), (Meter, zero(7))])
            .unwrap();
        let s1 = pointer_couple(&s0, System, Meter).unwrap();
        assert_eq!(s1.amp(&[2, 2]), c(1.0));
        assert_eq!(s1.amplitudes().len(), 1);
    }

    #[test]
    fn pointer_errors() {
        let s0 = CompositeState::tensor(&[(System, zero(7)), (Meter, zero(5))]).unwrap();
        assert!(matches!(
            pointer_couple(&s0, System, Meter),
            Err(Error::PointerOverflow { meter_dim: 5, source_dim: 7 })
        ));
        let s0 = CompositeState::tensor(&[(System, zero(7)), (Meter, ModeWavefunction::basis_state(7, 1).unwrap())])
            .unwrap();
        assert!(matches!(pointer_couple(&s0, System, Meter), Err(Error::NotFiducial { .. })));
        let s0 = CompositeState::tensor(&[(System, zero(7)), (Preparer, zero(7))]).unwrap();
        assert!(matches!(pointer_couple(&s0, System, Preparer), Err(Error::NotAMeter(Preparer))));
    }

    #[test]
    fn swap_moves_superposition() {
        let (phi, _) = ModeWavefunction::superposition(7, [(1, c(0.6)), (2, Complex64::new(0.0, 0.8))]).unwrap();
        let s0 = CompositeState::tensor(&[(Preparer, phi.clone()), (System, zero(7))]).unwrap();
        let s1 = swap_states(&s0, Preparer, System).unwrap();
        let want = CompositeState::tensor(&[(Preparer, zero(7)), (System, phi)]).unwrap();
        assert!(s1.max_amp_diff(&want).unwrap() < 1e-15);
    }

    #[test]
    fn swap_transposes_entangled_amplitudes() {
        let s0 = CompositeState::from_terms(
            &[(Preparer, 5), (System, 5)],
            [(vec![1, -2], c(1.0)), (vec![0, 2], c(2.0)), (vec![-1, -1], Complex64::new(0.0, 1.0))],
        )
        .unwrap();
        let s1 = swap_states(&s0, Preparer, System).unwrap();
        for (t, a) in s0.amplitudes() {
            assert_eq!(s1.amp(&[t[1], t[0]]), *a);
        }
        let sym = CompositeState::tensor(&[(Preparer, two_level(5)), (System, two_level(5))]).unwrap();
        assert_eq!(swap_states(&sym, Preparer, System).unwrap(), sym);
    }

    #[test]
    fn swap_dim_mismatch() {
        let s0 = CompositeState::tensor(&[(Preparer, zero(7)), (System, zero(5))]).unwrap();
        assert!(matches!(swap_states(&s0, Preparer, System), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn completion_is_unitary_with_profile_column() {
        let (psi, _) = ModeWavefunction::superposition(
            6,
            [(-2, c(0.3)), (0, Complex64::new(-0.5, 0.2)), (1, Complex64::new(0.1, 0.9))],
        )
        .unwrap();
        let u = shift_completion(&psi);
        let gram = u.adjoint() * &u;
        let dev = (gram - DMatrix::<Complex64>::identity(6, 6)).camax();
        assert!(dev < 1e-14);
        let z = psi.window().index(0);
        for m in psi.window().values() {
            assert_eq!(u[(psi.window().index(m), z)], psi.amp(m));
        }
    }

    #[test]
    fn verifiers_accept_paper_interactions() {
        let psi = ModeWavefunction::gaussian(7, 0.5, 1.0).unwrap();
        let kind = InteractionKind::shift_prepare(Preparer, System, psi);
        let layout = [(Preparer, 7), (System, 7)];
        let u = verify_unitary(&kind, &layout, None).unwrap();
        assert!(u.unitary);
        assert!(u.max_deviation <= 1e-12, "{}", u.max_deviation);
        assert!(verify_conserves_total_l(&kind, &layout, None).unwrap().conserves);

        let kind = InteractionKind::pointer_couple(System, Meter);
        let layout = [(System, 7), (Meter, 7)];
        assert!(verify_unitary(&kind, &layout, None).unwrap().unitary);
        assert!(verify_conserves_total_l(&kind, &layout, None).unwrap().conserves);
    }

    #[test]
    fn unnormalized_profile_is_not_unitary() {
        let mut amps = vec![c(0.0); 7];
        amps[3] = c(0.9);
        let psi = ModeWavefunction::from_window_amplitudes(amps).unwrap();
        assert_abs_diff_eq!(psi.norm(), 0.9, epsilon = 1e-15);
        let kind = InteractionKind::shift_prepare(Preparer, System, psi);
        let u = verify_unitary(&kind, &[(Preparer, 7), (System, 7)], None).unwrap();
        assert!(!u.unitary);
    }

    #[test]
    fn kick_is_rejected_with_witness() {
        let kick = CustomAction {
            name: "kick".into(),
            map: |labels: &[SubsystemLabel], t: &[i64]| {
                let s = labels.iter().position(|&l| l == System).unwrap();
                let mut out = t.to_vec();
                out[s] += 1;
                vec![(out, c(1.0))]
            },
        };
        let layout = [(Preparer, 5), (System, 5)];
        assert!(verify_unitary(&kick, &layout, None).unwrap().unitary);
        let check = verify_conserves_total_l(&kick, &layout, None).unwrap();
        assert!(!check.conserves);
        assert_eq!(check.witness, Some(vec![0, 0]));
    }

    #[test]
    fn enumeration_cap() {
        let kind = InteractionKind::swap(Preparer, System);
        let r = verify_unitary(&kind, &[(Preparer, 200), (System, 200)], None);
        assert!(matches!(r, Err(Error::EnumerationCap { size: 40_000, cap: 10_000 })));
        assert!(verify_unitary(&kind, &[(Preparer, 200), (System, 200)], Some(40_000)).is_ok());
    }
}

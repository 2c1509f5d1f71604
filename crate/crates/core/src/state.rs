//! Joint states of several labeled subsystems.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{ModeWavefunction, Window};
use crate::tolerance::{AMPLITUDE_TOL, PRUNE};

/// Role of a subsystem in a scenario.
///
/// `Meter` holds a pointer variable that carries no angular momentum; the
/// other roles are particles on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SubsystemLabel {
    #[serde(alias = "S", alias = "system")]
    System,
    #[serde(alias = "P", alias = "preparer")]
    Preparer,
    #[serde(alias = "G", alias = "grand_preparer", alias = "grandpreparer")]
    GrandPreparer,
    #[serde(alias = "M", alias = "meter")]
    Meter,
}

impl SubsystemLabel {
    pub const ALL: [SubsystemLabel; 4] = [
        SubsystemLabel::System,
        SubsystemLabel::Preparer,
        SubsystemLabel::GrandPreparer,
        SubsystemLabel::Meter,
    ];

    /// Whether the subsystem's coordinate counts toward total angular momentum.
    pub fn carries_angular_momentum(self) -> bool {
        !matches!(self, SubsystemLabel::Meter)
    }

    pub fn short(self) -> &'static str {
        match self {
            SubsystemLabel::System => "S",
            SubsystemLabel::Preparer => "P",
            SubsystemLabel::GrandPreparer => "G",
            SubsystemLabel::Meter => "M",
        }
    }
}

impl fmt::Display for SubsystemLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SubsystemLabel::System => "System",
            SubsystemLabel::Preparer => "Preparer",
            SubsystemLabel::GrandPreparer => "GrandPreparer",
            SubsystemLabel::Meter => "Meter",
        };
        f.write_str(s)
    }
}

/// Probability mass function keyed by quantum number.
pub type Distribution = BTreeMap<i64, f64>;

/// Largest absolute difference between two mass functions over the union of
/// their keys.
pub fn max_abs_deviation(a: &Distribution, b: &Distribution) -> f64 {
    let keys: BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    keys.into_iter()
        .map(|k| (a.get(&k).copied().unwrap_or(0.0) - b.get(&k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// Sum in ascending order, so the result does not depend on the order the
/// terms were produced in.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.total_cmp(b));
    terms.into_iter().sum()
}

/// Normalized joint amplitudes over an ordered list of subsystems, stored
/// sparsely as quantum-number tuples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeState {
    labels: Vec<SubsystemLabel>,
    windows: Vec<Window>,
    amps: BTreeMap<Vec<i64>, Complex64>,
}

impl CompositeState {
    /// Product state of the given factors, in the given label order.
    pub fn tensor(parts: &[(SubsystemLabel, ModeWavefunction)]) -> Result<Self> {
        let mut labels = Vec::with_capacity(parts.len());
        for (label, _) in parts {
            if labels.contains(label) {
                return Err(Error::DuplicateLabel(*label));
            }
            labels.push(*label);
        }
        if parts.is_empty() {
            return Err(Error::Invalid("tensor of zero factors".into()));
        }
        let windows: Vec<Window> = parts.iter().map(|(_, psi)| psi.window()).collect();
        let mut amps: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        amps.insert(Vec::new(), Complex64::new(1.0, 0.0));
        for (_, psi) in parts {
            let mut next = BTreeMap::new();
            for (tuple, a) in &amps {
                for (l, b) in psi.window().values().zip(psi.amplitudes()) {
                    if b.norm() <= PRUNE {
                        continue;
                    }
                    let mut t = tuple.clone();
                    t.push(l);
                    next.insert(t, a * b);
                }
            }
            amps = next;
        }
        let mut state = Self { labels, windows, amps };
        state.renormalize()?;
        Ok(state)
    }

    /// Build from explicit basis terms. Coordinates are reduced into each
    /// label's window, repeated tuples are summed, and the result is
    /// normalized.
    pub fn from_terms<I>(layout: &[(SubsystemLabel, usize)], terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        let mut labels = Vec::new();
        let mut windows = Vec::new();
        for (label, dim) in layout {
            if labels.contains(label) {
                return Err(Error::DuplicateLabel(*label));
            }
            labels.push(*label);
            windows.push(Window::new(*dim)?);
        }
        let mut state = Self { labels, windows, amps: BTreeMap::new() };
        for (tuple, a) in terms {
            if tuple.len() != state.labels.len() {
                return Err(Error::Invalid(format!(
                    "tuple {tuple:?} has {} entries, expected {}",
                    tuple.len(),
                    state.labels.len()
                )));
            }
            let t = state.reduce(&tuple);
            *state.amps.entry(t).or_default() += a;
        }
        state.prune();
        state.renormalize()?;
        Ok(state)
    }

    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn windows(&self) -> &[Window] {
        &self.windows
    }

    pub fn dims(&self) -> Vec<usize> {
        self.windows.iter().map(Window::dim).collect()
    }

    pub fn contains(&self, label: SubsystemLabel) -> bool {
        self.labels.contains(&label)
    }

    pub fn position(&self, label: SubsystemLabel) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    pub fn window_of(&self, label: SubsystemLabel) -> Result<Window> {
        Ok(self.windows[self.position(label)?])
    }

    /// Nonzero amplitudes keyed by quantum-number tuple.
    pub fn amplitudes(&self) -> &BTreeMap<Vec<i64>, Complex64> {
        &self.amps
    }

    pub fn amp(&self, tuple: &[i64]) -> Complex64 {
        self.amps
            .get(&self.reduce(tuple))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= AMPLITUDE_TOL
    }

    /// Total dimension of the joint space.
    pub fn total_dim(&self) -> usize {
        self.windows.iter().map(Window::dim).product()
    }

    pub(crate) fn reduce(&self, tuple: &[i64]) -> Vec<i64> {
        tuple
            .iter()
            .zip(&self.windows)
            .map(|(&l, w)| w.canonical(l))
            .collect()
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() > PRUNE);
    }

    fn renormalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE {
            return Err(Error::ZeroState);
        }
        for a in self.amps.values_mut() {
            *a /= n;
        }
        Ok(())
    }

    /// Apply a linear map given by its action on basis tuples. Output tuples
    /// are reduced into the windows; the result is not renormalized.
    pub(crate) fn map_basis<F>(&self, mut f: F) -> Self
    where
        F: FnMut(&[i64]) -> Vec<(Vec<i64>, Complex64)>,
    {
        let mut out: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (tuple, a) in &self.amps {
            for (t, c) in f(tuple) {
                *out.entry(self.reduce(&t)).or_default() += a * c;
            }
        }
        let mut state = Self {
            labels: self.labels.clone(),
            windows: self.windows.clone(),
            amps: out,
        };
        state.prune();
        state
    }

    /// Marginal distribution of one label over its whole window.
    pub fn marginal_distribution(&self, label: SubsystemLabel) -> Result<Distribution> {
        let pos = self.position(label)?;
        let mut dist: Distribution = self.windows[pos].values().map(|l| (l, 0.0)).collect();
        for (tuple, a) in &self.amps {
            *dist.get_mut(&tuple[pos]).expect("tuple within window") += a.norm_sqr();
        }
        Ok(dist)
    }

    /// Mean quantum number of `label`.
    pub fn mean_of(&self, label: SubsystemLabel) -> Result<f64> {
        Ok(self
            .marginal_distribution(label)?
            .into_iter()
            .map(|(l, p)| l as f64 * p)
            .sum())
    }

    fn scope_window(&self, scope: &[SubsystemLabel]) -> Result<(Vec<usize>, Window)> {
        if scope.is_empty() {
            return Err(Error::EmptyScope);
        }
        let mut positions = Vec::new();
        let mut window: Option<Window> = None;
        for &label in scope {
            let pos = self.position(label)?;
            if !label.carries_angular_momentum() {
                continue;
            }
            let w = self.windows[pos];
            match window {
                Some(prev) if prev != w => {
                    return Err(Error::DimMismatch(format!(
                        "total angular momentum needs equal lattice sizes, got {} and {}",
                        prev.dim(),
                        w.dim()
                    )))
                }
                _ => window = Some(w),
            }
            if !positions.contains(&pos) {
                positions.push(pos);
            }
        }
        let window = window.unwrap_or(Window::new(1)?);
        Ok((positions, window))
    }

    /// Distribution of the summed angular momentum of the labels in `scope`.
    ///
    /// Meter labels contribute zero. Totals are reduced modulo the (common)
    /// lattice size into its canonical window. Only totals with nonzero
    /// probability are listed.
    pub fn total_l_distribution(&self, scope: &[SubsystemLabel]) -> Result<Distribution> {
        let (positions, window) = self.scope_window(scope)?;
        let mut bins: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
        for (tuple, a) in &self.amps {
            let total: i64 = positions.iter().map(|&p| tuple[p]).sum();
            bins.entry(window.canonical(total)).or_default().push(a.norm_sqr());
        }
        Ok(bins.into_iter().map(|(t, ps)| (t, ordered_sum(ps))).collect())
    }

    /// Scope totals, summed as plain integers, that fall outside the
    /// canonical window and would alias under modular reduction.
    pub fn total_outside_window(&self, scope: &[SubsystemLabel]) -> Result<Vec<i64>> {
        let (positions, window) = self.scope_window(scope)?;
        let mut bad: BTreeSet<i64> = BTreeSet::new();
        for tuple in self.amps.keys() {
            let total: i64 = positions.iter().map(|&p| tuple[p]).sum();
            if !window.contains(total) {
                bad.insert(total);
            }
        }
        Ok(bad.into_iter().collect())
    }

    /// Apply `exp(-i angle L)` to one label.
    pub fn rotate(&self, label: SubsystemLabel, angle: f64) -> Result<Self> {
        let pos = self.position(label)?;
        Ok(self.map_basis(|t| {
            vec![(t.to_vec(), Complex64::from_polar(1.0, -angle * t[pos] as f64))]
        }))
    }

    /// Project `label` onto `value`. Returns the probability and, when it is
    /// nonzero, the renormalized post-projection state.
    pub fn project(&self, label: SubsystemLabel, value: i64) -> Result<(f64, Option<Self>)> {
        let pos = self.position(label)?;
        let value = self.windows[pos].canonical(value);
        let amps: BTreeMap<Vec<i64>, Complex64> = self
            .amps
            .iter()
            .filter(|(t, _)| t[pos] == value)
            .map(|(t, a)| (t.clone(), *a))
            .collect();
        let p: f64 = amps.values().map(|a| a.norm_sqr()).sum();
        if p <= 0.0 {
            return Ok((0.0, None));
        }
        let mut post = Self {
            labels: self.labels.clone(),
            windows: self.windows.clone(),
            amps,
        };
        post.renormalize()?;
        Ok((p, Some(post)))
    }

    /// Remove a label whose coordinate is definite in every stored tuple.
    pub fn drop_definite(&self, label: SubsystemLabel) -> Result<Self> {
        let pos = self.position(label)?;
        let values: BTreeSet<i64> = self.amps.keys().map(|t| t[pos]).collect();
        if values.len() != 1 {
            return Err(Error::Invalid(format!(
                "{label} is not in a definite basis state (values {values:?})"
            )));
        }
        let mut labels = self.labels.clone();
        let mut windows = self.windows.clone();
        labels.remove(pos);
        windows.remove(pos);
        let amps = self
            .amps
            .iter()
            .map(|(t, a)| {
                let mut t = t.clone();
                t.remove(pos);
                (t, *a)
            })
            .collect();
        Ok(Self { labels, windows, amps })
    }

    /// Reorder the state so its labels follow `order`, which must be a
    /// permutation of the current labels.
    pub fn reordered(&self, order: &[SubsystemLabel]) -> Result<Self> {
        if order.len() != self.labels.len() {
            return Err(Error::ExtraLabels {
                expected: order.to_vec(),
                found: self.labels.clone(),
            });
        }
        let perm = order
            .iter()
            .map(|&l| self.position(l))
            .collect::<Result<Vec<_>>>()?;
        let windows = perm.iter().map(|&p| self.windows[p]).collect();
        let amps = self
            .amps
            .iter()
            .map(|(t, a)| (perm.iter().map(|&p| t[p]).collect(), *a))
            .collect();
        Ok(Self { labels: order.to_vec(), windows, amps })
    }

    /// `<self|other>`; both states must share labels and windows.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.labels != other.labels || self.windows != other.windows {
            return Err(Error::DimMismatch("states have different layouts".into()));
        }
        Ok(self
            .amps
            .iter()
            .filter_map(|(t, a)| other.amps.get(t).map(|b| a.conj() * b))
            .sum())
    }

    /// Largest amplitude difference from `other` over all tuples.
    pub fn max_amp_diff(&self, other: &Self) -> Result<f64> {
        if self.labels != other.labels || self.windows != other.windows {
            return Err(Error::DimMismatch("states have different layouts".into()));
        }
        let keys: BTreeSet<&Vec<i64>> = self.amps.keys().chain(other.amps.keys()).collect();
        Ok(keys
            .into_iter()
            .map(|k| {
                let a = self.amps.get(k).copied().unwrap_or_default();
                let b = other.amps.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max))
    }
}

impl fmt::Display for CompositeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.labels.iter().map(|l| l.short()).collect();
        let mut first = true;
        for (t, a) in &self.amps {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", a.re, a.im)?;
            for (name, l) in names.iter().zip(t) {
                write!(f, "|{l}>{name}")?;
            }
        }
        Ok(())
    }
}

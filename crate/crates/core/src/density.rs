//! Reduced density operators, fidelities and entanglement entropies.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice::{ModeWavefunction, Window};
use crate::state::{CompositeState, SubsystemLabel};
use crate::tolerance::AMPLITUDE_TOL;

/// Density matrix of one or more subsystems, indexed by the mixed-radix
/// window position of the kept labels (first label most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    labels: Vec<SubsystemLabel>,
    windows: Vec<Window>,
    matrix: DMatrix<Complex64>,
}

impl DensityOperator {
    pub fn labels(&self) -> &[SubsystemLabel] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Element `rho(l, l')` for a single-label operator.
    pub fn element(&self, l: i64, lp: i64) -> Complex64 {
        let w = self.windows[0];
        self.matrix[(w.index(l), w.index(lp))]
    }

    fn flat_index(&self, tuple: &[i64]) -> usize {
        flat_index(&self.windows, tuple)
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest `|rho - rho^dagger|` entry.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Hermitian, unit trace and positive semidefinite within tolerance.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_error() <= AMPLITUDE_TOL
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= AMPLITUDE_TOL
            && self.eigenvalues().first().is_none_or(|&e| e >= -AMPLITUDE_TOL)
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Von Neumann entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.log2())
            .sum::<f64>()
            .max(0.0)
    }

    /// Projector `|psi><psi|` on a single label.
    pub fn pure(label: SubsystemLabel, psi: &ModeWavefunction) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        let matrix = &v * v.adjoint();
        Self { labels: vec![label], windows: vec![psi.window()], matrix }
    }
}

fn flat_index(windows: &[Window], tuple: &[i64]) -> usize {
    windows
        .iter()
        .zip(tuple)
        .fold(0, |acc, (w, &l)| acc * w.dim() + w.index(l))
}

/// Partial trace over every label except `label`.
pub fn reduced_density(state: &CompositeState, label: SubsystemLabel) -> Result<DensityOperator> {
    reduced_density_of(state, &[label])
}

/// Partial trace over every label not in `keep`; the result is indexed in
/// the order of `keep`.
pub fn reduced_density_of(state: &CompositeState, keep: &[SubsystemLabel]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::EmptyScope);
    }
    let mut kept_pos = Vec::with_capacity(keep.len());
    for &label in keep {
        let p = state.position(label)?;
        if kept_pos.contains(&p) {
            return Err(Error::DuplicateLabel(label));
        }
        kept_pos.push(p);
    }
    let rest_pos: Vec<usize> = (0..state.labels().len()).filter(|p| !kept_pos.contains(p)).collect();
    let windows: Vec<Window> = kept_pos.iter().map(|&p| state.windows()[p]).collect();
    let n: usize = windows.iter().map(Window::dim).product();

    // group amplitudes by the traced-out coordinates
    let mut groups: HashMap<Vec<i64>, Vec<(usize, Complex64)>> = HashMap::new();
    for (tuple, a) in state.amplitudes() {
        let rest: Vec<i64> = rest_pos.iter().map(|&p| tuple[p]).collect();
        let kept: Vec<i64> = kept_pos.iter().map(|&p| tuple[p]).collect();
        groups.entry(rest).or_default().push((flat_index(&windows, &kept), *a));
    }

    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for entries in groups.values() {
        for &(i, a) in entries {
            for &(j, b) in entries {
                matrix[(i, j)] += a * b.conj();
            }
        }
    }
    Ok(DensityOperator { labels: keep.to_vec(), windows, matrix })
}

/// `<target|rho|target>`.
pub fn fidelity_to(target: &ModeWavefunction, rho: &DensityOperator) -> Result<f64> {
    if rho.labels.len() != 1 || rho.dim() != target.dim() {
        return Err(Error::DimMismatch(format!(
            "target has dim {}, density operator has dim {}",
            target.dim(),
            rho.dim()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(target.amplitudes());
    let f = (v.adjoint() * &rho.matrix * &v)[(0, 0)];
    Ok(f.re.clamp(0.0, 1.0))
}

/// Entropy of entanglement between `label` and the rest, in bits.
pub fn entanglement_entropy(state: &CompositeState, label: SubsystemLabel) -> Result<f64> {
    Ok(reduced_density(state, label)?.entropy())
}

/// Entropy of entanglement between the labels in `part` and the rest.
pub fn entanglement_entropy_of(state: &CompositeState, part: &[SubsystemLabel]) -> Result<f64> {
    Ok(reduced_density_of(state, part)?.entropy())
}

impl DensityOperator {
    /// Element addressed by full tuples of the kept labels.
    pub fn element_of(&self, row: &[i64], col: &[i64]) -> Complex64 {
        self.matrix[(self.flat_index(row), self.flat_index(col))]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use SubsystemLabel::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn product_gives_projector() {
        let psi = ModeWavefunction::superposition(5, [(0, c(1.0)), (2, Complex64::new(0.0, 2.0))])
            .unwrap()
            .0;
        let s = CompositeState::tensor(&[
            (Preparer, ModeWavefunction::basis_state(5, 1).unwrap()),
            (System, psi.clone()),
        ])
        .unwrap();
        let rho = reduced_density(&s, System).unwrap();
        let want = DensityOperator::pure(System, &psi);
        assert_abs_diff_eq!((rho.matrix() - want.matrix()).norm(), 0.0, epsilon = 1e-12);
        assert!(rho.is_valid());
        assert_abs_diff_eq!(entanglement_entropy(&s, System).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fidelity_to(&psi, &rho).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bell_like_entropy_is_one_bit() {
        // two equal Schmidt coefficients
        let s = CompositeState::from_terms(
            &[(System, 7), (Meter, 7)],
            [(vec![-1, -1], c(1.0)), (vec![1, 1], c(1.0))],
        )
        .unwrap();
        assert_abs_diff_eq!(entanglement_entropy(&s, System).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(entanglement_entropy(&s, Meter).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn unequal_schmidt_entropy() {
        let s = CompositeState::from_terms(
            &[(System, 7), (Meter, 7)],
            [(vec![1, 1], c(0.9f64.sqrt())), (vec![2, 2], c(0.1f64.sqrt()))],
        )
        .unwrap();
        let want = -0.9 * 0.9f64.log2() - 0.1 * 0.1f64.log2();
        assert_abs_diff_eq!(entanglement_entropy(&s, System).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn unknown_label_errors() {
        let s = CompositeState::tensor(&[(System, ModeWavefunction::basis_state(3, 0).unwrap())]).unwrap();
        assert!(matches!(reduced_density(&s, Meter), Err(Error::UnknownLabel(Meter))));
        assert!(matches!(entanglement_entropy(&s, Preparer), Err(Error::UnknownLabel(Preparer))));
    }

    #[test]
    fn fidelity_dim_mismatch() {
        let s = CompositeState::tensor(&[(System, ModeWavefunction::basis_state(3, 0).unwrap())]).unwrap();
        let rho = reduced_density(&s, System).unwrap();
        let t = ModeWavefunction::basis_state(4, 0).unwrap();
        assert!(matches!(fidelity_to(&t, &rho), Err(Error::DimMismatch(_))));
    }

    #[test]
    fn multi_label_partial_trace() {
        let s = CompositeState::from_terms(
            &[(GrandPreparer, 3), (Preparer, 3), (System, 3)],
            [(vec![0, 1, -1], c(1.0)), (vec![1, 0, -1], c(1.0)), (vec![-1, 1, 0], c(1.0))],
        )
        .unwrap();
        let rho = reduced_density_of(&s, &[Preparer, System]).unwrap();
        assert_eq!(rho.dim(), 9);
        assert!(rho.is_valid());
        let a = entanglement_entropy_of(&s, &[Preparer, System]).unwrap();
        let b = entanglement_entropy(&s, GrandPreparer).unwrap();
        assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        assert_abs_diff_eq!(rho.element_of(&[1, -1], &[1, -1]).re, 1.0 / 3.0, epsilon = 1e-12);
    }
}

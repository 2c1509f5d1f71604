//! Wavefunctions of a single circle degree of freedom on a cyclic
//! angular-momentum lattice.
//!
//! A lattice of size `D` holds the quantum numbers `l` of the canonical
//! window `[-floor(D/2), ceil(D/2) - 1]`. Any integer `l` is identified with
//! the unique window element congruent to it modulo `D`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tolerance::AMPLITUDE_TOL;

/// The canonical momentum window of a cyclic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    dim: usize,
}

impl Window {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NonPositiveDim(0));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Smallest quantum number in the window, `-floor(D/2)`.
    pub fn lo(&self) -> i64 {
        -((self.dim / 2) as i64)
    }

    /// Largest quantum number in the window, `ceil(D/2) - 1`.
    pub fn hi(&self) -> i64 {
        self.lo() + self.dim as i64 - 1
    }

    pub fn contains(&self, l: i64) -> bool {
        (self.lo()..=self.hi()).contains(&l)
    }

    /// Reduce `l` modulo `D` into the window.
    pub fn canonical(&self, l: i64) -> i64 {
        (l - self.lo()).rem_euclid(self.dim as i64) + self.lo()
    }

    /// Position of `l` (after reduction) in window order, `0..D`.
    pub fn index(&self, l: i64) -> usize {
        (l - self.lo()).rem_euclid(self.dim as i64) as usize
    }

    /// Quantum number stored at window position `idx`.
    pub fn value(&self, idx: usize) -> i64 {
        self.lo() + idx as i64
    }

    /// All quantum numbers in window order.
    pub fn values(&self) -> impl Iterator<Item = i64> + Clone {
        self.lo()..=self.hi()
    }

    /// Quantum numbers ordered by residue starting at zero: `0, 1, .., hi, lo, .., -1`.
    pub fn values_from_zero(&self) -> impl Iterator<Item = i64> + Clone {
        let w = *self;
        (0..self.dim as i64).map(move |k| w.canonical(k))
    }
}

pub(crate) fn check_dim(dim: i64) -> Result<usize> {
    if dim <= 0 {
        Err(Error::NonPositiveDim(dim))
    } else {
        Ok(dim as usize)
    }
}

/// Amplitudes of one circle degree of freedom over its momentum window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeWavefunction {
    window: Window,
    amps: Vec<Complex64>,
}

impl ModeWavefunction {
    /// The angular-momentum eigenstate `|l>`.
    pub fn basis_state(dim: i64, l: i64) -> Result<Self> {
        let window = Window::new(check_dim(dim)?)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); window.dim()];
        amps[window.index(l)] = Complex64::new(1.0, 0.0);
        Ok(Self { window, amps })
    }

    /// Place `terms` at their residues and normalize. Returns the state and
    /// the normalization factor that was applied to the raw amplitudes.
    ///
    /// Terms that reduce to the same residue are added.
    pub fn superposition<I>(dim: i64, terms: I) -> Result<(Self, f64)>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let window = Window::new(check_dim(dim)?)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); window.dim()];
        for (l, a) in terms {
            amps[window.index(l)] += a;
        }
        let mut psi = Self { window, amps };
        let factor = psi.normalize()?;
        Ok((psi, factor))
    }

    /// Build from amplitudes given in window order without normalizing.
    pub fn from_window_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let window = Window::new(amps.len())?;
        Ok(Self { window, amps })
    }

    /// Equal real amplitudes on `lo..=hi` (quantum numbers reduced mod `D`).
    pub fn uniform(dim: i64, lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::Invalid(format!("empty uniform window [{lo}, {hi}]")));
        }
        let terms = (lo..=hi).map(|l| (l, Complex64::new(1.0, 0.0)));
        Ok(Self::superposition(dim, terms)?.0)
    }

    /// Real Gaussian envelope `exp(-(l - center)^2 / (4 width^2))` sampled on
    /// the window.
    pub fn gaussian(dim: i64, center: f64, width: f64) -> Result<Self> {
        if width.is_nan() || width <= 0.0 {
            return Err(Error::Invalid(format!("gaussian width must be positive, got {width}")));
        }
        let window = Window::new(check_dim(dim)?)?;
        let terms = window.values().map(|l| {
            let x = (l as f64 - center) / width;
            (l, Complex64::new((-0.25 * x * x).exp(), 0.0))
        });
        Ok(Self::superposition(dim, terms)?.0)
    }

    /// Scale to unit norm; returns the factor applied.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if n <= f64::MIN_POSITIVE {
            return Err(Error::ZeroState);
        }
        let factor = 1.0 / n;
        for a in &mut self.amps {
            *a *= factor;
        }
        Ok(factor)
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn dim(&self) -> usize {
        self.window.dim()
    }

    /// Amplitude at quantum number `l` (reduced mod `D`).
    pub fn amp(&self, l: i64) -> Complex64 {
        self.amps[self.window.index(l)]
    }

    /// Amplitudes in window order.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= AMPLITUDE_TOL
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim(), other.dim())));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability of each quantum number, keyed by `l`.
    pub fn probabilities(&self) -> BTreeMap<i64, f64> {
        self.window
            .values()
            .zip(&self.amps)
            .map(|(l, a)| (l, a.norm_sqr()))
            .collect()
    }

    /// Quantum numbers whose amplitude magnitude exceeds `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<i64> {
        self.window
            .values()
            .zip(&self.amps)
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(l, _)| l)
            .collect()
    }

    /// Shift every component up by `m`: `|l> -> |l + m>` modulo `D`.
    pub fn shifted(&self, m: i64) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        for l in self.window.values() {
            amps[self.window.index(l + m)] = self.amp(l);
        }
        Self { window: self.window, amps }
    }

    /// Apply the rotation `exp(-i angle L)`.
    pub fn rotated(&self, angle: f64) -> Self {
        let amps = self
            .window
            .values()
            .zip(&self.amps)
            .map(|(l, a)| a * Complex64::from_polar(1.0, -angle * l as f64))
            .collect();
        Self { window: self.window, amps }
    }

    /// Mean angular momentum `sum_l l |psi(l)|^2`.
    pub fn mean(&self) -> f64 {
        self.window
            .values()
            .zip(&self.amps)
            .map(|(l, a)| l as f64 * a.norm_sqr())
            .sum()
    }
}

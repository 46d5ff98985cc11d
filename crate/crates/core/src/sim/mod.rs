// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Exact noisy simulation.
//!
//! [`DensityMatrix`] evolves `rho -> U rho U^dagger` and applies the local
//! depolarizing channel `(1 - lambda) rho + lambda Tr_Q[rho] (x) I/2^|Q|`
//! after every gate. [`trajectory_sample`] reaches the same distribution by
//! sampling Pauli errors on statevectors.

pub mod kernels;
mod trajectory;

use num_complex::Complex64;
use thiserror::Error;

use crate::ir::{Circuit, GateKind, GateOp, IrError, MarkedSet};
use crate::noise::{lambda_bound, NoiseError, NoiseProfile};

pub use trajectory::{trajectory_sample, StateVector};

use kernels::{apply_cx, apply_diag, apply_mask_phase, apply_mat2, deposit, insert_zeros, Mat2};

/// Density matrices above this width are refused; 4^12 amplitudes is 256 MiB.
pub const MAX_DENSITY_QUBITS: usize = 12;

const RENORM_INTERVAL: u64 = 1000;
const RENORM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0} qubits exceeds the simulator limit of {MAX_DENSITY_QUBITS}")]
    TooManyQubits(usize),
    #[error("invalid gate for {n}-qubit state: {detail}")]
    InvalidGate { n: usize, detail: String },
    #[error("trajectory sampling needs at least one shot")]
    ZeroShots,
    #[error("distribution over {got} qubits, marked set over {want}")]
    QubitMismatch { want: usize, got: usize },
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Ir(#[from] IrError),
}

fn check_gate(n: usize, g: &GateOp) -> Result<(), SimError> {
    let probe = Circuit::plain(n, vec![g.clone()]);
    match probe.validate().into_iter().next() {
        None => Ok(()),
        Some(detail) => Err(SimError::InvalidGate { n, detail }),
    }
}

fn gate_matrix(kind: GateKind) -> Mat2 {
    match kind {
        GateKind::Sx => kernels::sx(),
        GateKind::X => kernels::pauli_x(),
        GateKind::H => kernels::hadamard(),
        _ => unreachable!("{kind} has no dense 2x2 form"),
    }
}

/// Applies `g` (or its complex conjugate) to the qubits at `offset..offset+n`
/// of an amplitude vector.
pub(crate) fn apply_gate_at(state: &mut [Complex64], g: &GateOp, offset: usize, conjugate: bool) {
    let bit = |q: usize| q + offset;
    match g.kind {
        GateKind::Rz => {
            let (mut d0, mut d1) = kernels::rz_phases(g.angle.unwrap_or(0.0));
            if conjugate {
                d0 = d0.conj();
                d1 = d1.conj();
            }
            apply_diag(state, bit(g.qubits[0]), d0, d1);
        }
        GateKind::Sx | GateKind::X | GateKind::H => {
            let m = gate_matrix(g.kind);
            let m = if conjugate { kernels::conj(&m) } else { m };
            apply_mat2(state, bit(g.qubits[0]), &m);
        }
        GateKind::Cx => apply_cx(state, bit(g.qubits[0]), bit(g.qubits[1])),
        GateKind::McPhase => {
            let mask = g.qubits.iter().fold(0, |m, &q| m | 1 << bit(q));
            let phase = Complex64::from_polar(1.0, g.angle.unwrap_or(0.0));
            apply_mask_phase(state, mask, if conjugate { phase.conj() } else { phase });
        }
    }
}

/// Pauli operator `index` in base 4 over `qubits`, digit `k` selecting
/// `I, X, Y, Z` on `qubits[k]`.
pub(crate) fn pauli_digits(index: usize, k: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..k).map(move |j| (j, (index >> (2 * j)) & 3))
}

pub(crate) fn pauli_matrix(digit: usize) -> Option<Mat2> {
    match digit {
        0 => None,
        1 => Some(kernels::pauli_x()),
        2 => Some(kernels::pauli_y()),
        _ => Some(kernels::pauli_z()),
    }
}

/// A `2^n x 2^n` density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// `|0...0><0...0|`.
    pub fn zero_state(n: usize) -> Result<Self, SimError> {
        if n > MAX_DENSITY_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let mut data = vec![Complex64::default(); 1 << (2 * n)];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n, data })
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self, SimError> {
        let mut rho = DensityMatrix::zero_state(n)?;
        rho.data[0] = Complex64::default();
        let d = rho.dim();
        for i in 0..d {
            rho.data[i * d + i] = Complex64::new(1.0 / d as f64, 0.0);
        }
        Ok(rho)
    }

    /// `|psi><psi|`.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self, SimError> {
        let n = amplitudes.len().trailing_zeros() as usize;
        if n > MAX_DENSITY_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        let mut data = Vec::with_capacity(amplitudes.len() * amplitudes.len());
        for a in amplitudes {
            data.extend(amplitudes.iter().map(|b| a * b.conj()));
        }
        Ok(DensityMatrix { n, data })
    }

    /// Wraps raw row-major entries. The caller is responsible for them being
    /// a state.
    pub fn from_entries(n: usize, data: Vec<Complex64>) -> Result<Self, SimError> {
        if n > MAX_DENSITY_QUBITS {
            return Err(SimError::TooManyQubits(n));
        }
        assert_eq!(data.len(), 1 << (2 * n), "entry count must be 4^n");
        Ok(DensityMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).collect()
    }

    /// Largest `|rho_ij - conj(rho_ji)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise distance to `other`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply_gate(&mut self, g: &GateOp) -> Result<(), SimError> {
        check_gate(self.n, g)?;
        self.apply_gate_unchecked(g);
        Ok(())
    }

    fn apply_gate_unchecked(&mut self, g: &GateOp) {
        // Row index occupies the high n bits, column index the low n bits.
        apply_gate_at(&mut self.data, g, self.n, false);
        apply_gate_at(&mut self.data, g, 0, true);
    }

    /// Depolarizing channel with parameter `lambda` on `qubits`.
    pub fn apply_depolarizing(&mut self, qubits: &[usize], lambda: f64) -> Result<(), SimError> {
        self.check_qubits(qubits)?;
        let bound = lambda_bound(qubits.len());
        if !(lambda >= 0.0 && lambda <= bound * (1.0 + 4.0 * f64::EPSILON)) {
            return Err(NoiseError::LambdaOutOfBound {
                what: format!("depolarizing on {qubits:?}"),
                lambda,
                bound,
            }
            .into());
        }
        if lambda == 0.0 {
            return Ok(());
        }
        let n = self.n;
        let k = qubits.len();
        let local = 1usize << k;
        let row_bits: Vec<usize> = qubits.iter().map(|&q| q + n).collect();
        let col_bits: Vec<usize> = qubits.to_vec();
        let mut sorted: Vec<usize> = row_bits.iter().chain(&col_bits).copied().collect();
        sorted.sort_unstable();
        let keep = 1.0 - lambda;
        let spread = lambda / local as f64;

        let mut block = vec![0usize; local * local];
        for a in 0..local {
            for b in 0..local {
                block[a * local + b] = deposit(a, &row_bits) | deposit(b, &col_bits);
            }
        }
        for base in 0..self.data.len() >> (2 * k) {
            let base = insert_zeros(base, &sorted);
            let partial: Complex64 = (0..local).map(|a| self.data[base | block[a * local + a]]).sum();
            for &off in &block {
                self.data[base | off] *= keep;
            }
            for a in 0..local {
                self.data[base | block[a * local + a]] += partial * spread;
            }
        }
        Ok(())
    }

    /// Uniform Pauli channel: with probability `p` one of the `4^k - 1`
    /// non-identity Paulis on `qubits`, each equally likely.
    pub fn apply_pauli_channel(&mut self, qubits: &[usize], p: f64) -> Result<(), SimError> {
        self.check_qubits(qubits)?;
        let k = qubits.len();
        let count = (1usize << (2 * k)) - 1;
        let original = self.data.clone();
        self.data.iter_mut().for_each(|x| *x *= 1.0 - p);
        let weight = p / count as f64;
        for index in 1..=count {
            let mut term = original.clone();
            for (j, digit) in pauli_digits(index, k) {
                if let Some(m) = pauli_matrix(digit) {
                    apply_mat2(&mut term, qubits[j] + self.n, &m);
                    apply_mat2(&mut term, qubits[j], &kernels::conj(&m));
                }
            }
            for (x, t) in self.data.iter_mut().zip(term) {
                *x += t * weight;
            }
        }
        Ok(())
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<(), SimError> {
        let mut seen = 0usize;
        for &q in qubits {
            if q >= self.n || seen >> q & 1 == 1 {
                return Err(SimError::InvalidGate {
                    n: self.n,
                    detail: format!("bad qubit list {qubits:?}"),
                });
            }
            seen |= 1 << q;
        }
        if qubits.is_empty() {
            return Err(SimError::InvalidGate { n: self.n, detail: "empty qubit list".into() });
        }
        Ok(())
    }

    fn rescale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|x| *x *= factor);
    }
}

/// Probabilities over the `2^n` computational basis outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    pub n: usize,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn uniform(n: usize) -> Self {
        let d = 1usize << n;
        OutcomeDistribution { n, probabilities: vec![1.0 / d as f64; d] }
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

pub fn success_probability(dist: &OutcomeDistribution, marked: &MarkedSet) -> Result<f64, SimError> {
    if dist.n != marked.n() {
        return Err(SimError::QubitMismatch { want: marked.n(), got: dist.n });
    }
    Ok(marked.iter().map(|s| dist.probabilities[s as usize]).sum())
}

/// Density-matrix evolution applying the profile's channel after each gate.
#[derive(Debug, Clone)]
pub struct NoisyEvolution<'a> {
    rho: DensityMatrix,
    profile: &'a NoiseProfile,
    ops: u64,
    renormalizations: u64,
}

impl<'a> NoisyEvolution<'a> {
    pub fn new(n: usize, profile: &'a NoiseProfile) -> Result<Self, SimError> {
        Ok(NoisyEvolution { rho: DensityMatrix::zero_state(n)?, profile, ops: 0, renormalizations: 0 })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.rho
    }

    /// Times the trace drifted past tolerance and was rescaled.
    pub fn renormalizations(&self) -> u64 {
        self.renormalizations
    }

    pub fn run(&mut self, gates: &[GateOp]) -> Result<(), SimError> {
        for g in gates {
            check_gate(self.rho.n, g)?;
            let lambda = self.profile.lambda_for(g)?;
            self.rho.apply_gate_unchecked(g);
            self.rho.apply_depolarizing(&g.qubits, lambda)?;
            self.ops += 1;
            if self.ops.is_multiple_of(RENORM_INTERVAL) {
                let tr = self.rho.trace().re;
                if (tr - 1.0).abs() > RENORM_TOLERANCE {
                    self.rho.rescale(1.0 / tr);
                    self.renormalizations += 1;
                }
            }
        }
        Ok(())
    }

    pub fn distribution(&self) -> OutcomeDistribution {
        OutcomeDistribution { n: self.rho.n, probabilities: self.rho.diagonal() }
    }
}

/// Outcome distribution after the preamble and iterations `1..=upto`.
pub fn simulate(c: &Circuit, profile: &NoiseProfile, upto: usize) -> Result<OutcomeDistribution, SimError> {
    let truncated = c.truncate_after(upto)?;
    let mut evo = NoisyEvolution::new(c.n, profile)?;
    evo.run(&truncated.gates)?;
    Ok(evo.distribution())
}

/// Observed success after each iteration count `0..=T`, evolving one state
/// through the whole circuit.
pub fn sweep(c: &Circuit, profile: &NoiseProfile, marked: &MarkedSet) -> Result<Vec<(usize, f64)>, SimError> {
    if marked.n() != c.n {
        return Err(SimError::QubitMismatch { want: c.n, got: marked.n() });
    }
    let mut evo = NoisyEvolution::new(c.n, profile)?;
    evo.run(c.preamble_gates())?;
    let mut out = Vec::with_capacity(c.iteration_count() + 1);
    out.push((0, success_probability(&evo.distribution(), marked)?));
    for t in 1..=c.iteration_count() {
        evo.run(c.segment_gates(t)?)?;
        out.push((t, success_probability(&evo.distribution(), marked)?));
    }
    Ok(out)
}

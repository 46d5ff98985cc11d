// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{apply_gate_at, check_gate, pauli_digits, pauli_matrix, OutcomeDistribution, SimError};
use crate::ir::{Circuit, GateOp};
use crate::noise::NoiseProfile;

/// Pure-state amplitudes, little-endian in qubit index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn zero_state(n: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); 1 << n];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        StateVector { n, amplitudes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn apply_gate(&mut self, g: &GateOp) -> Result<(), SimError> {
        check_gate(self.n, g)?;
        apply_gate_at(&mut self.amplitudes, g, 0, false);
        Ok(())
    }

    /// Applies the Pauli string `index` (base-4 digits, `I X Y Z`) to `qubits`.
    fn apply_pauli(&mut self, qubits: &[usize], index: usize) {
        for (j, digit) in pauli_digits(index, qubits.len()) {
            if let Some(m) = pauli_matrix(digit) {
                super::kernels::apply_mat2(&mut self.amplitudes, qubits[j], &m);
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            acc += a.norm_sqr();
            if r < acc {
                return i;
            }
        }
        // Rounding left r above the final cumulative sum.
        self.amplitudes.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }
}

/// Empirical outcome distribution from `shots` Pauli-error trajectories.
///
/// After each gate an error fires with the gate's Pauli probability and
/// applies one of the `4^k - 1` non-identity Paulis uniformly. Shot `i` draws
/// from a ChaCha stream keyed by `(seed, i)`, so results do not depend on the
/// thread count.
pub fn trajectory_sample(
    c: &Circuit,
    profile: &NoiseProfile,
    shots: u64,
    seed: u64,
) -> Result<OutcomeDistribution, SimError> {
    if shots == 0 {
        return Err(SimError::ZeroShots);
    }
    let mut error_p = Vec::with_capacity(c.gates.len());
    for g in &c.gates {
        check_gate(c.n, g)?;
        error_p.push(profile.error_probability(g)?);
    }
    let dim = 1usize << c.n;

    let counts = (0..shots)
        .into_par_iter()
        .fold(
            || vec![0u64; dim],
            |mut counts, shot| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shot);
                let mut psi = StateVector::zero_state(c.n);
                for (g, &p) in c.gates.iter().zip(&error_p) {
                    apply_gate_at(&mut psi.amplitudes, g, 0, false);
                    if p > 0.0 && rng.gen::<f64>() < p {
                        let count = (1usize << (2 * g.qubits.len())) - 1;
                        psi.apply_pauli(&g.qubits, rng.gen_range(1..=count));
                    }
                }
                counts[psi.sample(&mut rng)] += 1;
                counts
            },
        )
        .reduce(
            || vec![0u64; dim],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let total = shots as f64;
    Ok(OutcomeDistribution {
        n: c.n,
        probabilities: counts.into_iter().map(|k| k as f64 / total).collect(),
    })
}

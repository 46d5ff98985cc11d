// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! In-place gate kernels over a little-endian amplitude vector: bit `b` of
//! an index is qubit `b`. A density matrix stored row-major is such a vector
//! over `2n` bits, so the same kernels serve both simulators.

use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn sx() -> Mat2 {
    let a = Complex64::new(0.5, 0.5);
    let b = Complex64::new(0.5, -0.5);
    [[a, b], [b, a]]
}

pub fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> Mat2 {
    [[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn hadamard() -> Mat2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn conj(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[0][1].conj()], [m[1][0].conj(), m[1][1].conj()]]
}

/// `rz(theta)` diagonal `(e^{-i theta/2}, e^{i theta/2})`.
pub fn rz_phases(theta: f64) -> (Complex64, Complex64) {
    (Complex64::from_polar(1.0, -theta / 2.0), Complex64::from_polar(1.0, theta / 2.0))
}

/// Applies a 2x2 matrix to bit `bit`.
pub fn apply_mat2(state: &mut [Complex64], bit: usize, m: &Mat2) {
    let stride = 1usize << bit;
    for block in state.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            let (x, y) = (*a, *b);
            *a = m[0][0] * x + m[0][1] * y;
            *b = m[1][0] * x + m[1][1] * y;
        }
    }
}

/// Applies `diag(d0, d1)` to bit `bit`.
pub fn apply_diag(state: &mut [Complex64], bit: usize, d0: Complex64, d1: Complex64) {
    let stride = 1usize << bit;
    for block in state.chunks_exact_mut(stride << 1) {
        let (lo, hi) = block.split_at_mut(stride);
        if d0 != ONE {
            lo.iter_mut().for_each(|a| *a *= d0);
        }
        hi.iter_mut().for_each(|b| *b *= d1);
    }
}

/// Swaps target amplitudes wherever the control bit is set.
pub fn apply_cx(state: &mut [Complex64], control: usize, target: usize) {
    let (cm, tm) = (1usize << control, 1usize << target);
    for i in 0..state.len() {
        if i & cm != 0 && i & tm == 0 {
            state.swap(i, i | tm);
        }
    }
}

/// Multiplies by `phase` wherever every bit in `mask` is set.
pub fn apply_mask_phase(state: &mut [Complex64], mask: usize, phase: Complex64) {
    for (i, a) in state.iter_mut().enumerate() {
        if i & mask == mask {
            *a *= phase;
        }
    }
}

/// Spreads the low bits of `value` over the positions in `bits` (ascending
/// order not required).
pub fn deposit(value: usize, bits: &[usize]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (k, &b)| acc | ((value >> k) & 1) << b)
}

/// Inserts zero bits at `sorted` positions into `value`.
pub fn insert_zeros(mut value: usize, sorted: &[usize]) -> usize {
    for &b in sorted {
        let low = value & ((1usize << b) - 1);
        value = ((value >> b) << (b + 1)) | low;
    }
    value
}

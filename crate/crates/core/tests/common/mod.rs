// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Dense-matrix oracles built from Kronecker products, independent of the
//! simulator's bit-twiddling kernels.

#![allow(dead_code)]

use ampopt_core::{GateKind, GateOp};
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn mat2(entries: [[Complex64; 2]; 2]) -> CMat {
    CMat::from_row_slice(2, 2, &[entries[0][0], entries[0][1], entries[1][0], entries[1][1]])
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn x() -> CMat {
    mat2([[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]])
}

pub fn y() -> CMat {
    mat2([[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]])
}

pub fn z() -> CMat {
    mat2([[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]])
}

pub fn h() -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    mat2([[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]])
}

pub fn sx() -> CMat {
    mat2([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]])
}

pub fn rz(theta: f64) -> CMat {
    mat2([
        [Complex64::from_polar(1.0, -theta / 2.0), c(0., 0.)],
        [c(0., 0.), Complex64::from_polar(1.0, theta / 2.0)],
    ])
}

pub fn proj(bit: usize) -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(bit, bit)] = c(1., 0.);
    m
}

/// Tensor product over qubits `n-1 .. 0` (qubit 0 is the least significant
/// index bit), with `ops[q]` on qubit `q`.
pub fn kron_all(ops: &[CMat]) -> CMat {
    let mut acc = CMat::identity(1, 1);
    for op in ops.iter().rev() {
        acc = acc.kronecker(op);
    }
    acc
}

/// `op` on qubit `q` of `n`.
pub fn embed(n: usize, q: usize, op: &CMat) -> CMat {
    let ops: Vec<CMat> = (0..n).map(|k| if k == q { op.clone() } else { identity(2) }).collect();
    kron_all(&ops)
}

pub fn gate_unitary(n: usize, g: &GateOp) -> CMat {
    match g.kind {
        GateKind::Rz => embed(n, g.qubits[0], &rz(g.angle.unwrap())),
        GateKind::Sx => embed(n, g.qubits[0], &sx()),
        GateKind::X => embed(n, g.qubits[0], &x()),
        GateKind::H => embed(n, g.qubits[0], &h()),
        GateKind::Cx => {
            let (ctl, tgt) = (g.qubits[0], g.qubits[1]);
            let off: Vec<CMat> = (0..n).map(|k| if k == ctl { proj(0) } else { identity(2) }).collect();
            let on: Vec<CMat> = (0..n)
                .map(|k| if k == ctl { proj(1) } else if k == tgt { x() } else { identity(2) })
                .collect();
            kron_all(&off) + kron_all(&on)
        }
        GateKind::McPhase => {
            let dim = 1 << n;
            let mask: usize = g.qubits.iter().map(|q| 1 << q).sum();
            let mut m = identity(dim);
            for i in 0..dim {
                if i & mask == mask {
                    m[(i, i)] = Complex64::from_polar(1.0, g.angle.unwrap());
                }
            }
            m
        }
    }
}

pub fn circuit_unitary(n: usize, gates: &[GateOp]) -> CMat {
    let mut u = identity(1 << n);
    for g in gates {
        u = gate_unitary(n, g) * u;
    }
    u
}

/// Distance between `a` and `b` after removing the best global phase.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let (mut pivot, mut best) = ((0, 0), 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            if b[(i, j)].norm() > best {
                best = b[(i, j)].norm();
                pivot = (i, j);
            }
        }
    }
    let phase = a[pivot] / b[pivot];
    let phase = phase / phase.norm();
    (a - b * phase).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

/// Small deterministic generator for test fixtures.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// A random full-rank density matrix `A A^dagger / Tr`.
pub fn random_density(n: usize, rng: &mut SplitMix) -> CMat {
    let d = 1 << n;
    let a = CMat::from_fn(d, d, |_, _| c(rng.unit() - 0.5, rng.unit() - 0.5));
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    rho / tr
}

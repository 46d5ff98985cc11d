// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Grover circuit synthesis over the `{rz, sx, cx}` basis.
//!
//! Each iteration is an oracle (one X-conjugated multi-controlled phase per
//! marked state) followed by the diffuser `H^n · X^n · MCPHASE(pi) · X^n · H^n`.
//! Multi-controlled phases are lowered without ancillas through the parity
//! expansion
//!
//! ```text
//! x_0 x_1 ... x_{k-1} = 2^{1-k} * sum_{S != {}} (-1)^{|S|-1} parity_S(x)
//! ```
//!
//! where each parity term is an `rz` on a qubit that holds the parity,
//! accumulated with CNOTs walked in Gray-code order. A k-qubit phase costs
//! `2^k - 1` rz and `2^k - 2` cx gates.
//!
//! All equivalences hold up to global phase.

use std::f64::consts::{FRAC_PI_2, PI};

use thiserror::Error;

use crate::ir::{AmplificationMeta, Circuit, GateKind, GateOp, MarkedSet};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("need at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("marked count {m} out of range for {n} qubits (need 1 <= m < 2^n)")]
    MarkedCountOutOfRange { m: u64, n: usize },
    #[error("marked set is over {got} qubits, expected {want}")]
    QubitMismatch { want: usize, got: usize },
    #[error("iteration override must be positive")]
    ZeroIterations,
}

/// Returns `(theta, t_opt)` for `m` marked states among `2^n`.
///
/// `t_opt` is `arccos(a) / (2 arcsin(a))` with `a = sqrt(m / 2^n)`, rounded to
/// the nearest integer and clamped to at least 1.
pub fn grover_params(m: u64, n: usize) -> Result<(f64, usize), SynthError> {
    if n >= 63 || m == 0 || m >= 1u64 << n {
        return Err(SynthError::MarkedCountOutOfRange { m, n });
    }
    let amplitude = (m as f64 / (n as f64).exp2()).sqrt();
    let theta = amplitude.asin();
    let ratio = amplitude.acos() / (2.0 * theta);
    Ok((theta, (ratio.round() as usize).max(1)))
}

/// Everything needed to build one Grover circuit.
#[derive(Debug, Clone)]
pub struct GroverSpec {
    pub n: usize,
    pub marked: MarkedSet,
    pub iterations_override: Option<usize>,
}

impl GroverSpec {
    pub fn new(marked: MarkedSet) -> Self {
        GroverSpec { n: marked.n(), marked, iterations_override: None }
    }

    pub fn with_iterations(mut self, t: usize) -> Self {
        self.iterations_override = Some(t);
        self
    }
}

/// Phase oracle flipping the sign of every marked state, lowered to basis
/// gates.
pub fn build_oracle(marked: &MarkedSet) -> Vec<GateOp> {
    lower_to_basis(&oracle_fragment(marked))
}

/// Diffuser `2|s><s| - I`, lowered to basis gates.
pub fn build_diffuser(n: usize) -> Result<Vec<GateOp>, SynthError> {
    if n < 2 {
        return Err(SynthError::TooFewQubits(n));
    }
    Ok(lower_to_basis(&diffuser_fragment(n)))
}

/// Front-end oracle using `X` and `McPhase`.
pub fn oracle_fragment(marked: &MarkedSet) -> Vec<GateOp> {
    let n = marked.n();
    let all: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    for state in marked.iter() {
        let zeros: Vec<usize> = (0..n).filter(|q| state >> q & 1 == 0).collect();
        out.extend(zeros.iter().map(|&q| GateOp::x(q)));
        out.push(GateOp::mcphase(PI, all.clone()));
        out.extend(zeros.iter().map(|&q| GateOp::x(q)));
    }
    out
}

/// Front-end diffuser using `H`, `X` and `McPhase`.
pub fn diffuser_fragment(n: usize) -> Vec<GateOp> {
    let mut out = Vec::with_capacity(4 * n + 1);
    out.extend((0..n).map(GateOp::h));
    out.extend((0..n).map(GateOp::x));
    out.push(GateOp::mcphase(PI, (0..n).collect()));
    out.extend((0..n).map(GateOp::x));
    out.extend((0..n).map(GateOp::h));
    out
}

/// Rewrites `H`, `X` and `McPhase` into `{rz, sx, cx}`; basis gates pass
/// through unchanged.
pub fn lower_to_basis(fragment: &[GateOp]) -> Vec<GateOp> {
    let mut out = Vec::with_capacity(fragment.len() * 3);
    for g in fragment {
        match g.kind {
            GateKind::Rz | GateKind::Sx | GateKind::Cx => out.push(g.clone()),
            GateKind::H => {
                let q = g.qubits[0];
                out.push(GateOp::rz(FRAC_PI_2, q));
                out.push(GateOp::sx(q));
                out.push(GateOp::rz(FRAC_PI_2, q));
            }
            GateKind::X => {
                let q = g.qubits[0];
                out.push(GateOp::sx(q));
                out.push(GateOp::sx(q));
            }
            GateKind::McPhase => {
                lower_mcphase(g.angle.unwrap_or(0.0), &g.qubits, &mut out);
            }
        }
    }
    out
}

/// Gray-code phase-polynomial lowering of a multi-controlled phase.
///
/// For each qubit `qubits[top]` in turn, walks every subset `T` of
/// `qubits[..top]` in Gray-code order so that `qubits[top]` holds
/// `x_top XOR parity_T(x)`, applying the rz for subset `T + {top}` at each
/// stop. The final Gray code word is a single bit, undone by one more CNOT.
fn lower_mcphase(angle: f64, qubits: &[usize], out: &mut Vec<GateOp>) {
    let k = qubits.len();
    if k == 0 {
        return;
    }
    let scale = angle / ((k - 1) as f64).exp2();
    for top in 0..k {
        let target = qubits[top];
        let mut prev_gray = 0u64;
        for i in 0..1u64 << top {
            let gray = i ^ (i >> 1);
            let flipped = gray ^ prev_gray;
            if flipped != 0 {
                out.push(GateOp::cx(qubits[flipped.trailing_zeros() as usize], target));
            }
            prev_gray = gray;
            let size = gray.count_ones() + 1;
            let sign = if size % 2 == 1 { 1.0 } else { -1.0 };
            out.push(GateOp::rz(sign * scale, target));
        }
        if prev_gray != 0 {
            out.push(GateOp::cx(qubits[prev_gray.trailing_zeros() as usize], target));
        }
    }
}

/// Uniform-superposition preamble `H^n`, lowered.
pub fn preamble(n: usize) -> Vec<GateOp> {
    lower_to_basis(&(0..n).map(GateOp::h).collect::<Vec<_>>())
}

/// Builds the full instrumented circuit: preamble plus one segment per
/// iteration, each segment being oracle then diffuser.
pub fn build_amplification_circuit(spec: &GroverSpec) -> Result<Circuit, SynthError> {
    let n = spec.n;
    if n < 2 {
        return Err(SynthError::TooFewQubits(n));
    }
    if spec.marked.n() != n {
        return Err(SynthError::QubitMismatch { want: n, got: spec.marked.n() });
    }
    let m = spec.marked.len() as u64;
    let (theta, t_opt) = grover_params(m, n)?;
    let iterations = match spec.iterations_override {
        Some(0) => return Err(SynthError::ZeroIterations),
        Some(t) => t,
        None => t_opt,
    };

    let mut body = build_oracle(&spec.marked);
    body.extend(build_diffuser(n)?);
    let meta = AmplificationMeta { theta, t_opt, m, n };
    Ok(Circuit::instrumented(n, preamble(n), vec![body; iterations], meta))
}

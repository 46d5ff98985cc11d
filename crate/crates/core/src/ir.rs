// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! In-memory circuit representation.
//!
//! A [`Circuit`] is a flat gate list plus the iteration structure of the
//! amplification loop. The four amplification intrinsics are not stored as
//! pseudo-gates: `amplification_begin(theta)` becomes [`AmplificationMeta`],
//! and each `iteration_begin`/`iteration_end` pair becomes one entry of
//! [`Circuit::segments`]. Everything in front of the first iteration is the
//! preamble.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("iteration {t} out of range (circuit has {count} iterations)")]
    IterationOutOfRange { t: usize, count: usize },
    #[error("invalid marked state {0:?}")]
    InvalidMarkedState(String),
    #[error("marked set is empty")]
    EmptyMarkedSet,
}

/// Gate kinds understood by the toolkit. Only `Rz`, `Sx` and `Cx` survive
/// lowering; the rest exist in front-end fragments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    Rz,
    Sx,
    Cx,
    X,
    H,
    /// Phase `e^{i angle}` on the all-ones state of its qubits.
    McPhase,
}

impl GateKind {
    pub const BASIS: [GateKind; 3] = [GateKind::Rz, GateKind::Sx, GateKind::Cx];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rz => "rz",
            GateKind::Sx => "sx",
            GateKind::Cx => "cx",
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::McPhase => "mcphase",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "rz" => GateKind::Rz,
            "sx" => GateKind::Sx,
            "cx" => GateKind::Cx,
            "x" => GateKind::X,
            "h" => GateKind::H,
            "mcphase" => GateKind::McPhase,
            _ => return None,
        })
    }

    /// Fixed arity, or `None` for the variable-width multi-controlled phase.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Rz | GateKind::Sx | GateKind::X | GateKind::H => Some(1),
            GateKind::Cx => Some(2),
            GateKind::McPhase => None,
        }
    }

    pub fn has_angle(self) -> bool {
        matches!(self, GateKind::Rz | GateKind::McPhase)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate application.
#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub angle: Option<f64>,
}

impl GateOp {
    pub fn rz(angle: f64, q: usize) -> Self {
        GateOp { kind: GateKind::Rz, qubits: vec![q], angle: Some(angle) }
    }

    pub fn sx(q: usize) -> Self {
        GateOp { kind: GateKind::Sx, qubits: vec![q], angle: None }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        GateOp { kind: GateKind::Cx, qubits: vec![control, target], angle: None }
    }

    pub fn x(q: usize) -> Self {
        GateOp { kind: GateKind::X, qubits: vec![q], angle: None }
    }

    pub fn h(q: usize) -> Self {
        GateOp { kind: GateKind::H, qubits: vec![q], angle: None }
    }

    pub fn mcphase(angle: f64, qubits: Vec<usize>) -> Self {
        GateOp { kind: GateKind::McPhase, qubits, angle: Some(angle) }
    }

    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    /// Describes every way this gate is malformed for an `n`-qubit circuit.
    fn check(&self, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        match self.kind.arity() {
            Some(a) if a != self.qubits.len() => out.push(format!(
                "{} expects {} qubit(s), got {}",
                self.kind,
                a,
                self.qubits.len()
            )),
            None if self.qubits.is_empty() => out.push(format!("{} has no qubits", self.kind)),
            _ => {}
        }
        for &q in &self.qubits {
            if q >= n {
                out.push(format!("qubit {q} out of range for {n}-qubit circuit"));
            }
        }
        let distinct: BTreeSet<_> = self.qubits.iter().collect();
        if distinct.len() != self.qubits.len() {
            out.push(format!("duplicate qubit in {} {:?}", self.kind, self.qubits));
        }
        match (self.kind.has_angle(), self.angle) {
            (true, None) => out.push(format!("{} is missing its angle", self.kind)),
            (true, Some(a)) if !a.is_finite() => {
                out.push(format!("{} has non-finite angle {a}", self.kind))
            }
            (false, Some(_)) => out.push(format!("{} does not take an angle", self.kind)),
            _ => {}
        }
        out
    }
}

/// Parameters announced by `amplification_begin`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplificationMeta {
    /// Initial amplitude angle, `arcsin(sqrt(m / 2^n))`.
    pub theta: f64,
    /// Noiseless optimal iteration count.
    pub t_opt: usize,
    /// Number of marked states.
    pub m: u64,
    pub n: usize,
}

impl AmplificationMeta {
    pub fn expected_theta(m: u64, n: usize) -> f64 {
        (m as f64 / (n as f64).exp2()).sqrt().asin()
    }
}

/// The set of winning basis states.
///
/// Bitstrings are read as binary numbers: the leftmost character is the most
/// significant bit, which is qubit `n - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSet {
    n: usize,
    states: BTreeSet<u64>,
}

impl MarkedSet {
    pub fn new(n: usize, states: impl IntoIterator<Item = u64>) -> Result<Self, IrError> {
        let states: BTreeSet<u64> = states.into_iter().collect();
        if states.is_empty() {
            return Err(IrError::EmptyMarkedSet);
        }
        if let Some(&bad) = states.iter().find(|&&s| n < 64 && s >> n != 0) {
            return Err(IrError::InvalidMarkedState(format!("{bad} does not fit in {n} qubits")));
        }
        Ok(MarkedSet { n, states })
    }

    /// Parses `n`-character binary strings such as `"11010"`.
    pub fn from_bitstrings<S: AsRef<str>>(n: usize, strings: &[S]) -> Result<Self, IrError> {
        let mut states = Vec::with_capacity(strings.len());
        for s in strings {
            let s = s.as_ref();
            if s.len() != n || !s.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(IrError::InvalidMarkedState(s.to_string()));
            }
            states.push(u64::from_str_radix(s, 2).map_err(|_| IrError::InvalidMarkedState(s.to_string()))?);
        }
        MarkedSet::new(n, states)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, state: u64) -> bool {
        self.states.contains(&state)
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.states.iter().copied()
    }

    pub fn bitstring(&self, state: u64) -> String {
        format!("{:0width$b}", state, width = self.n)
    }
}

/// A circuit over `n` qubits with optional amplification structure.
///
/// `preamble` and `segments` are gate-index ranges into `gates`. A circuit
/// without `meta` has no segments and its whole gate list is the preamble.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub gates: Vec<GateOp>,
    pub meta: Option<AmplificationMeta>,
    pub preamble: Range<usize>,
    pub segments: Vec<Range<usize>>,
}

impl Circuit {
    /// A plain circuit with no amplification structure.
    pub fn plain(n: usize, gates: Vec<GateOp>) -> Self {
        let len = gates.len();
        Circuit { n, gates, meta: None, preamble: 0..len, segments: Vec::new() }
    }

    /// Assembles a preamble followed by one segment per iteration.
    pub fn instrumented(
        n: usize,
        preamble: Vec<GateOp>,
        iterations: Vec<Vec<GateOp>>,
        meta: AmplificationMeta,
    ) -> Self {
        let mut gates = preamble;
        let preamble = 0..gates.len();
        let mut segments = Vec::with_capacity(iterations.len());
        for it in iterations {
            let start = gates.len();
            gates.extend(it);
            segments.push(start..gates.len());
        }
        Circuit { n, gates, meta: Some(meta), preamble, segments }
    }

    pub fn iteration_count(&self) -> usize {
        self.segments.len()
    }

    pub fn preamble_gates(&self) -> &[GateOp] {
        &self.gates[self.preamble.clone()]
    }

    /// Gates of iteration `t` (1-based) as a borrowed slice.
    pub fn segment_gates(&self, t: usize) -> Result<&[GateOp], IrError> {
        if t == 0 || t > self.segments.len() {
            return Err(IrError::IterationOutOfRange { t, count: self.segments.len() });
        }
        Ok(&self.gates[self.segments[t - 1].clone()])
    }

    /// All invariant violations; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, g) in self.gates.iter().enumerate() {
            for v in g.check(self.n) {
                out.push(format!("gate {i}: {v}"));
            }
        }

        if self.preamble.start != 0 {
            out.push("preamble does not start at gate 0".to_string());
        }
        if self.preamble.end < self.preamble.start {
            out.push("preamble range is reversed".to_string());
        }
        let mut cursor = self.preamble.end;
        for (i, seg) in self.segments.iter().enumerate() {
            if seg.end < seg.start {
                out.push(format!("segment {} range is reversed", i + 1));
            }
            if seg.start < cursor {
                out.push(format!("segments overlap at segment {}", i + 1));
            } else if seg.start > cursor {
                out.push(format!("gap before segment {}", i + 1));
            }
            cursor = cursor.max(seg.end);
        }
        if cursor != self.gates.len() {
            out.push(format!(
                "ranges cover {} gates but circuit has {}",
                cursor,
                self.gates.len()
            ));
        }

        match &self.meta {
            Some(meta) => {
                if meta.n != self.n {
                    out.push(format!("meta.n = {} but circuit has {} qubits", meta.n, self.n));
                }
                let space = if self.n < 64 { 1u64 << self.n } else { u64::MAX };
                if meta.m == 0 || meta.m >= space {
                    out.push(format!("marked count {} out of range", meta.m));
                } else {
                    let want = AmplificationMeta::expected_theta(meta.m, self.n);
                    if (meta.theta - want).abs() > 1e-12 {
                        out.push(format!("theta {} != arcsin(sqrt(m/2^n)) = {}", meta.theta, want));
                    }
                }
                if meta.t_opt == 0 {
                    out.push("t_opt must be at least 1".to_string());
                }
            }
            None => {
                if !self.segments.is_empty() {
                    out.push("segments present without amplification meta".to_string());
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Iteration `t` (1-based) as a standalone meta-less circuit.
    pub fn iteration_segment(&self, t: usize) -> Result<Circuit, IrError> {
        Ok(Circuit::plain(self.n, self.segment_gates(t)?.to_vec()))
    }

    /// Keeps the preamble and iterations `1..=t`, dropping everything later.
    pub fn truncate_after(&self, t: usize) -> Result<Circuit, IrError> {
        if t > self.segments.len() {
            return Err(IrError::IterationOutOfRange { t, count: self.segments.len() });
        }
        let end = match t {
            0 => self.preamble.end,
            _ => self.segments[t - 1].end,
        };
        Ok(Circuit {
            n: self.n,
            gates: self.gates[..end].to_vec(),
            meta: self.meta.clone(),
            preamble: self.preamble.clone(),
            segments: self.segments[..t].to_vec(),
        })
    }
}

// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Depolarizing noise profiles and per-segment noise accumulation.
//!
//! A profile assigns each gate kind a depolarizing parameter `lambda`. The
//! channel `(1 - lambda) rho + lambda I/d` on `a` qubits is the same map as a
//! uniform Pauli channel that applies a random non-identity Pauli with
//! probability `P = lambda (4^a - 1) / 4^a`. Segment noise is the probability
//! that at least one gate fired such an error, treating gates as independent.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{AmplificationMeta, Circuit, GateKind, GateOp};
use crate::synth;

#[derive(Debug, Error)]
pub enum NoiseError {
    #[error("lambda {lambda} for {what} is outside [0, {bound}]")]
    LambdaOutOfBound { what: String, lambda: f64, bound: f64 },
    #[error("profile has no lambda for gate kind `{0}`")]
    MissingKind(String),
    #[error("unknown gate kind `{0}` in profile")]
    UnknownKind(String),
    #[error("override for {kind} lists {got} qubit(s), expected {want}")]
    OverrideArity { kind: String, want: usize, got: usize },
    #[error("gate arity {0} not supported by the depolarizing model")]
    UnsupportedArity(usize),
    #[error("malformed profile: {0}")]
    Json(#[from] serde_json::Error),
}

/// Largest admissible `lambda` for a depolarizing channel on `arity` qubits,
/// `4^a / (4^a - 1)`.
pub fn lambda_bound(arity: usize) -> f64 {
    let d2 = 4f64.powi(arity as i32);
    d2 / (d2 - 1.0)
}

/// Converts a depolarizing parameter into the probability of a non-identity
/// Pauli error.
pub fn lambda_to_p(lambda: f64, arity: usize) -> Result<f64, NoiseError> {
    if arity == 0 || arity > 2 {
        return Err(NoiseError::UnsupportedArity(arity));
    }
    check_lambda(&format!("{arity}-qubit gate"), lambda, arity)?;
    let d2 = 4f64.powi(arity as i32);
    Ok((lambda * (d2 - 1.0) / d2).min(1.0))
}

fn check_lambda(what: &str, lambda: f64, arity: usize) -> Result<(), NoiseError> {
    let bound = lambda_bound(arity);
    // Allow representation error at the exact bound, e.g. 4.0/3.0.
    if !(lambda >= 0.0 && lambda <= bound * (1.0 + 4.0 * f64::EPSILON)) {
        return Err(NoiseError::LambdaOutOfBound { what: what.to_string(), lambda, bound });
    }
    Ok(())
}

/// Per-gate depolarizing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseProfile {
    pub name: String,
    lambda_by_kind: BTreeMap<GateKind, f64>,
    per_position: BTreeMap<(GateKind, Vec<usize>), f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileDoc {
    name: String,
    lambda: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<OverrideDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OverrideDoc {
    kind: String,
    qubits: Vec<usize>,
    lambda: f64,
}

impl NoiseProfile {
    /// Profile with one lambda per kind. Every basis kind must be present.
    pub fn new(
        name: impl Into<String>,
        lambdas: impl IntoIterator<Item = (GateKind, f64)>,
    ) -> Result<Self, NoiseError> {
        let mut lambda_by_kind = BTreeMap::new();
        for (kind, lambda) in lambdas {
            let arity = kind.arity().ok_or(NoiseError::UnknownKind(kind.name().to_string()))?;
            check_lambda(kind.name(), lambda, arity)?;
            lambda_by_kind.insert(kind, lambda);
        }
        for kind in GateKind::BASIS {
            if !lambda_by_kind.contains_key(&kind) {
                return Err(NoiseError::MissingKind(kind.name().to_string()));
            }
        }
        Ok(NoiseProfile { name: name.into(), lambda_by_kind, per_position: BTreeMap::new() })
    }

    /// `rz`, `sx` and `cx` lambdas, the layout of published device averages.
    pub fn uniform(name: impl Into<String>, rz: f64, sx: f64, cx: f64) -> Result<Self, NoiseError> {
        NoiseProfile::new(name, [(GateKind::Rz, rz), (GateKind::Sx, sx), (GateKind::Cx, cx)])
    }

    /// Every basis kind at zero.
    pub fn noiseless() -> Self {
        NoiseProfile::uniform("noiseless", 0.0, 0.0, 0.0).expect("zero is in bounds")
    }

    /// Every basis kind at its upper bound: each gate fully randomizes its
    /// qubits.
    pub fn maximal() -> Self {
        NoiseProfile::uniform("maximal", lambda_bound(1), lambda_bound(1), lambda_bound(2))
            .expect("bounds are in bounds")
    }

    /// Overrides the kind default for one exact qubit tuple.
    pub fn with_override(
        mut self,
        kind: GateKind,
        qubits: Vec<usize>,
        lambda: f64,
    ) -> Result<Self, NoiseError> {
        let want = kind.arity().ok_or(NoiseError::UnknownKind(kind.name().to_string()))?;
        if qubits.len() != want {
            return Err(NoiseError::OverrideArity {
                kind: kind.name().to_string(),
                want,
                got: qubits.len(),
            });
        }
        check_lambda(&format!("{} on {:?}", kind.name(), qubits), lambda, want)?;
        self.per_position.insert((kind, qubits), lambda);
        Ok(self)
    }

    pub fn from_json(text: &str) -> Result<Self, NoiseError> {
        let doc: ProfileDoc = serde_json::from_str(text)?;
        let mut lambdas = Vec::with_capacity(doc.lambda.len());
        for (key, lambda) in doc.lambda {
            let kind = parse_kind(&key)?;
            lambdas.push((kind, lambda));
        }
        let mut profile = NoiseProfile::new(doc.name, lambdas)?;
        for o in doc.overrides {
            profile = profile.with_override(parse_kind(&o.kind)?, o.qubits, o.lambda)?;
        }
        Ok(profile)
    }

    pub fn to_json(&self) -> String {
        let doc = ProfileDoc {
            name: self.name.clone(),
            lambda: self.lambda_by_kind.iter().map(|(k, &v)| (k.name().to_string(), v)).collect(),
            overrides: self
                .per_position
                .iter()
                .map(|((k, q), &v)| OverrideDoc { kind: k.name().to_string(), qubits: q.clone(), lambda: v })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("profile serializes")
    }

    pub fn kind_lambda(&self, kind: GateKind) -> Option<f64> {
        self.lambda_by_kind.get(&kind).copied()
    }

    /// Lambda for a concrete gate, honoring per-position overrides.
    pub fn lambda_for(&self, gate: &GateOp) -> Result<f64, NoiseError> {
        if !self.per_position.is_empty() {
            if let Some(&l) = self.per_position.get(&(gate.kind, gate.qubits.clone())) {
                return Ok(l);
            }
        }
        self.kind_lambda(gate.kind)
            .ok_or_else(|| NoiseError::MissingKind(gate.kind.name().to_string()))
    }

    /// Pauli error probability for a concrete gate.
    pub fn error_probability(&self, gate: &GateOp) -> Result<f64, NoiseError> {
        lambda_to_p(self.lambda_for(gate)?, gate.arity())
    }
}

fn parse_kind(key: &str) -> Result<GateKind, NoiseError> {
    match GateKind::from_name(key) {
        Some(k) if k.arity().is_some() => Ok(k),
        _ => Err(NoiseError::UnknownKind(key.to_string())),
    }
}

pub fn load_profile(text: &str) -> Result<NoiseProfile, NoiseError> {
    NoiseProfile::from_json(text)
}

/// Probability that a segment suffered at least one gate error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentNoise {
    pub noise_rate: f64,
}

/// Running product of survival probabilities `prod (1 - p)`.
///
/// Factors are multiplied in log space with Neumaier-compensated summation of
/// `ln(1 - p)`, which keeps 26k-factor products accurate and handles `p = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Survival {
    sum: f64,
    comp: f64,
    dead: bool,
}

impl Survival {
    pub fn new() -> Self {
        Survival::default()
    }

    pub fn absorb(&mut self, p: f64) {
        if p >= 1.0 {
            self.dead = true;
            return;
        }
        let term = (-p).ln_1p();
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn combine(&mut self, other: &Survival) {
        self.dead |= other.dead;
        self.absorb_log(other.sum);
        self.absorb_log(other.comp);
    }

    fn absorb_log(&mut self, term: f64) {
        let t = self.sum + term;
        if self.sum.abs() >= term.abs() {
            self.comp += (self.sum - t) + term;
        } else {
            self.comp += (term - t) + self.sum;
        }
        self.sum = t;
    }

    /// `1 - prod (1 - p)`.
    pub fn failure(&self) -> f64 {
        if self.dead {
            1.0
        } else {
            (-(self.sum + self.comp).exp_m1()).clamp(0.0, 1.0)
        }
    }
}

/// Noise accumulated over every gate of `segment`.
pub fn calculate_noise(segment: &[GateOp], profile: &NoiseProfile) -> Result<SegmentNoise, NoiseError> {
    let mut survival = Survival::new();
    for g in segment {
        survival.absorb(profile.error_probability(g)?);
    }
    Ok(SegmentNoise { noise_rate: survival.failure() })
}

/// Gate counts per kind, the shape of a published per-iteration tally.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateCounts {
    pub rz: usize,
    pub sx: usize,
    pub cx: usize,
}

impl GateCounts {
    pub fn new(rz: usize, sx: usize, cx: usize) -> Self {
        GateCounts { rz, sx, cx }
    }

    pub fn of(gates: &[GateOp]) -> Self {
        let mut c = GateCounts::default();
        for g in gates {
            match g.kind {
                GateKind::Rz => c.rz += 1,
                GateKind::Sx => c.sx += 1,
                GateKind::Cx => c.cx += 1,
                _ => {}
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.rz + self.sx + self.cx
    }
}

/// A fragment with exactly the requested gate counts. Single-qubit gates sit
/// on qubit 0 and `cx` on `(0, 1)`; `rz` angles are zero.
pub fn synthetic_segment(counts: GateCounts) -> Vec<GateOp> {
    let mut out = Vec::with_capacity(counts.total());
    out.extend((0..counts.rz).map(|_| GateOp::rz(0.0, 0)));
    out.extend((0..counts.sx).map(|_| GateOp::sx(0)));
    out.extend((0..counts.cx).map(|_| GateOp::cx(0, 1)));
    out
}

/// An instrumented stand-in circuit: the usual `H^n` preamble followed by
/// `iterations` copies of a synthetic segment. Only useful for prediction;
/// its unitary is meaningless.
pub fn synthetic_circuit(
    n: usize,
    m: u64,
    per_iteration: GateCounts,
    iterations: Option<usize>,
) -> Result<Circuit, synth::SynthError> {
    if n < 2 {
        return Err(synth::SynthError::TooFewQubits(n));
    }
    let (theta, t_opt) = synth::grover_params(m, n)?;
    let t = iterations.unwrap_or(t_opt);
    let body = synthetic_segment(per_iteration);
    Ok(Circuit::instrumented(
        n,
        synth::preamble(n),
        vec![body; t],
        AmplificationMeta { theta, t_opt, m, n },
    ))
}

// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Noise-aware truncation of amplitude-amplification circuits.
//!
//! The pipeline is:
//!
//! 1. [`synth`] builds a Grover circuit over `{rz, sx, cx}` and records its
//!    iteration structure ([`ir::Circuit::segments`]).
//! 2. [`predict`] walks the iterations, turns each gate's depolarizing
//!    parameter into an error probability ([`noise`]), and estimates the
//!    success probability of every truncation point without simulating.
//! 3. [`predict::optimize_circuit`] cuts the circuit after the best point.
//! 4. [`sim`] checks predictions against exact density-matrix evolution.
//!
//! Circuits are stored on disk as `.aaq` files ([`qasm`]).

pub mod ir;
pub mod noise;
pub mod predict;
pub mod qasm;
pub mod sim;
pub mod synth;

pub use ir::{AmplificationMeta, Circuit, GateKind, GateOp, MarkedSet};
pub use noise::{GateCounts, NoiseProfile};
pub use predict::{Criterion, PredictOptions, PredictionCurve};

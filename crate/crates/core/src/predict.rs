// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Analytic success prediction and inflection-point truncation.
//!
//! After `t` iterations the noiseless success probability is
//! `sin^2((2t + 1) theta)`. The predictor discounts it by the probability
//! that no gate in iterations `1..=t` erred, assuming every erroneous run
//! misses the marked states. The resulting estimate is a lower bound that
//! rises with amplification and decays with accumulated noise; its peak is
//! the iteration at which to stop.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ir::{Circuit, IrError};
use crate::noise::{calculate_noise, NoiseError, NoiseProfile, Survival};

#[derive(Debug, Error)]
pub enum PredictError {
    #[error("circuit carries no amplification metadata")]
    MissingMeta,
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// How the stopping iteration is chosen from a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Criterion {
    /// Iteration with the highest estimated success; ties go to the smaller
    /// iteration.
    #[default]
    Peak,
    /// Stop before the first iteration whose noiseless amplification is no
    /// larger than the cumulative noise.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PredictOptions {
    pub criterion: Criterion,
    /// Count the preamble's gate noise as iteration-zero noise.
    pub include_preamble_noise: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictionPoint {
    pub t: usize,
    pub amplification: f64,
    pub cumulative_noise: f64,
    pub estimated_success: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionCurve {
    pub theta: f64,
    /// Unamplified state, `t = 0`.
    pub baseline: PredictionPoint,
    /// One point per iteration, `t = 1..=T`.
    pub points: Vec<PredictionPoint>,
    pub inflection: usize,
    pub criterion: Criterion,
}

impl PredictionCurve {
    /// Baseline followed by every iteration point.
    pub fn all_points(&self) -> impl Iterator<Item = &PredictionPoint> {
        std::iter::once(&self.baseline).chain(self.points.iter())
    }

    pub fn point(&self, t: usize) -> Option<&PredictionPoint> {
        match t {
            0 => Some(&self.baseline),
            _ => self.points.get(t - 1),
        }
    }

    /// CSV with header `t,amplification,cumulative_noise,estimated_success`,
    /// numbers at 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,amplification,cumulative_noise,estimated_success\n");
        for p in self.all_points() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                p.t,
                format_sig12(p.amplification),
                format_sig12(p.cumulative_noise),
                format_sig12(p.estimated_success)
            );
        }
        out
    }
}

/// Decimal rendering with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// `sin^2((2t + 1) theta)` clamped to `[0, 1]`.
pub fn amplification_at(theta: f64, t: usize) -> f64 {
    let s = ((2 * t + 1) as f64 * theta).sin();
    (s * s).clamp(0.0, 1.0)
}

pub fn predict_curve(c: &Circuit, profile: &NoiseProfile) -> Result<PredictionCurve, PredictError> {
    predict_curve_with(c, profile, PredictOptions::default())
}

/// Builds the per-iteration curve in one pass over the gates.
pub fn predict_curve_with(
    c: &Circuit,
    profile: &NoiseProfile,
    options: PredictOptions,
) -> Result<PredictionCurve, PredictError> {
    let meta = c.meta.as_ref().ok_or(PredictError::MissingMeta)?;
    let theta = meta.theta;

    let mut survival = Survival::new();
    if options.include_preamble_noise {
        let pre = calculate_noise(c.preamble_gates(), profile)?;
        survival.absorb(pre.noise_rate);
    }
    let point = |t: usize, noise: f64| {
        let amplification = amplification_at(theta, t);
        PredictionPoint {
            t,
            amplification,
            cumulative_noise: noise,
            estimated_success: amplification * (1.0 - noise),
        }
    };
    let baseline = point(0, survival.failure());

    let mut points = Vec::with_capacity(c.iteration_count());
    for t in 1..=c.iteration_count() {
        let seg = calculate_noise(c.segment_gates(t)?, profile)?;
        survival.absorb(seg.noise_rate);
        points.push(point(t, survival.failure()));
    }

    let mut curve = PredictionCurve {
        theta,
        baseline,
        points,
        inflection: 0,
        criterion: options.criterion,
    };
    curve.inflection = find_inflection(&curve, options.criterion);
    Ok(curve)
}

/// Selects the stopping iteration under `criterion`.
pub fn find_inflection(curve: &PredictionCurve, criterion: Criterion) -> usize {
    match criterion {
        Criterion::Peak => {
            let mut best = &curve.baseline;
            for p in &curve.points {
                if p.estimated_success > best.estimated_success {
                    best = p;
                }
            }
            best.t
        }
        Criterion::Literal => curve
            .points
            .iter()
            .find(|p| p.amplification <= p.cumulative_noise)
            .map_or(curve.points.len(), |p| p.t - 1),
    }
}

/// Result of [`optimize_circuit`]: the truncated circuit plus the curve that
/// justified it.
#[derive(Debug, Clone)]
pub struct Optimized {
    pub circuit: Circuit,
    pub curve: PredictionCurve,
}

pub fn optimize_circuit(c: &Circuit, profile: &NoiseProfile) -> Result<Optimized, PredictError> {
    optimize_circuit_with(c, profile, PredictOptions::default())
}

/// Truncates `c` after its predicted inflection iteration.
pub fn optimize_circuit_with(
    c: &Circuit,
    profile: &NoiseProfile,
    options: PredictOptions,
) -> Result<Optimized, PredictError> {
    let curve = predict_curve_with(c, profile, options)?;
    let circuit = c.truncate_after(curve.inflection)?;
    Ok(Optimized { circuit, curve })
}

// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits nonzero if any fail.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use ampopt_core::noise::{lambda_to_p, synthetic_circuit};
use ampopt_core::predict::{amplification_at, find_inflection, predict_curve};
use ampopt_core::qasm::{emit, parse};
use ampopt_core::sim::{simulate, sweep, trajectory_sample, DensityMatrix, NoisyEvolution};
use ampopt_core::synth::{build_amplification_circuit, grover_params, GroverSpec};
use ampopt_core::{Circuit, Criterion, GateCounts, GateOp, MarkedSet, NoiseProfile};
use common::*;
use num_complex::Complex64;

const LAMBDAS: [f64; 5] = [0.002, 0.004, 0.006, 0.008, 0.01];

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn within(limit: Duration, elapsed: Duration, out: Outcome) -> Outcome {
    if out.ok && elapsed > limit {
        return fail(format!("{} but took {elapsed:.2?} (limit {limit:?})", out.detail));
    }
    out
}

fn grover5(iterations: Option<usize>) -> (Circuit, MarkedSet) {
    let marked = MarkedSet::from_bitstrings(5, &["11010"]).unwrap();
    let mut spec = GroverSpec::new(marked.clone());
    if let Some(t) = iterations {
        spec = spec.with_iterations(t);
    }
    (build_amplification_circuit(&spec).unwrap(), marked)
}

fn predicted_iterations() -> Outcome {
    let five = GateCounts::new(106, 18, 80);
    let mut cases: Vec<(usize, GateCounts, f64, f64, usize)> = LAMBDAS
        .iter()
        .zip([3, 3, 2, 2, 1])
        .map(|(&l, want)| (5, five, l, l, want))
        .collect();
    cases.push((7, GateCounts::new(402, 14, 376), 0.002, 0.0002, 7));
    cases.push((9, GateCounts::new(1562, 18, 1528), 0.002, 0.00002, 14));

    let mut got = Vec::new();
    for &(n, counts, sx, cx, want) in &cases {
        let c = synthetic_circuit(n, 1, counts, None).unwrap();
        let profile = NoiseProfile::uniform("table", 0.0, sx, cx).unwrap();
        let curve = predict_curve(&c, &profile).unwrap();
        let t = find_inflection(&curve, Criterion::Peak);
        if t != want {
            return fail(format!("n={n} sx={sx} cx={cx}: got {t}, want {want}"));
        }
        got.push(t);
    }
    pass(format!("inflections {got:?}"))
}

fn iteration_formula() -> Outcome {
    let cases = [((1, 5), 4), ((1, 7), 8), ((1, 9), 17), ((3, 5), 2)];
    for ((m, n), want) in cases {
        let t = grover_params(m, n).unwrap().1;
        if t != want {
            return fail(format!("m={m} n={n}: got {t}, want {want}"));
        }
    }
    pass("t_opt 4, 8, 17, 2")
}

fn conversion_factors() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = SplitMix(5);
    for _ in 0..1000 {
        let l = rng.unit();
        worst = worst.max((lambda_to_p(l, 1).unwrap() - 0.75 * l).abs());
        worst = worst.max((lambda_to_p(l, 2).unwrap() - 15.0 / 16.0 * l).abs());
    }
    let exact = lambda_to_p(1.0, 1).unwrap() == 0.75 && lambda_to_p(1.0, 2).unwrap() == 0.9375;
    if exact && worst <= f64::EPSILON {
        pass(format!("max deviation {worst:e}"))
    } else {
        fail(format!("factors off by {worst:e}"))
    }
}

fn to_sim(m: &CMat) -> DensityMatrix {
    let d = m.nrows();
    let data = (0..d * d).map(|i| m[(i / d, i % d)]).collect();
    DensityMatrix::from_entries(d.trailing_zeros() as usize, data).unwrap()
}

fn sim_diff(rho: &DensityMatrix, m: &CMat) -> f64 {
    let d = rho.dim();
    (0..d * d).map(|i| (rho.get(i / d, i % d) - m[(i / d, i % d)]).norm()).fold(0.0, f64::max)
}

fn channel_forms() -> Outcome {
    let mut rng = SplitMix(17);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let lambda = rng.unit();
        for n in 1..=2usize {
            let qubits: Vec<usize> = (0..n).collect();
            let rho = random_density(n, &mut rng);
            let p = lambda_to_p(lambda, n).unwrap();
            let mut convex = to_sim(&rho);
            convex.apply_depolarizing(&qubits, lambda).unwrap();
            let mut pauli = to_sim(&rho);
            pauli.apply_pauli_channel(&qubits, p).unwrap();
            worst = worst.max(convex.max_abs_diff(&pauli));

            // Dense uniform Pauli sum.
            let singles = [identity(2), x(), y(), z()];
            let mut oracle = &rho * c(1.0 - p, 0.0);
            let count = (1usize << (2 * n)) - 1;
            for idx in 1..=count {
                let ops: Vec<CMat> = (0..n).map(|j| singles[(idx >> (2 * j)) & 3].clone()).collect();
                let s = kron_all(&ops);
                oracle += &s * &rho * s.adjoint() * c(p / count as f64, 0.0);
            }
            worst = worst.max(sim_diff(&convex, &oracle));
        }
    }

    // Single-qubit ensemble after sx, two-qubit ensemble after h + cx.
    for lambda in LAMBDAS.iter().chain(&[0.5, 1.0]) {
        let mut rho = DensityMatrix::zero_state(1).unwrap();
        rho.apply_gate(&GateOp::sx(0)).unwrap();
        rho.apply_depolarizing(&[0], *lambda).unwrap();
        let psi = sx().column(0).into_owned();
        let want = &psi * psi.adjoint() * c(1.0 - lambda, 0.0) + identity(2) * c(lambda / 2.0, 0.0);
        worst = worst.max(sim_diff(&rho, &want));

        let mut rho = DensityMatrix::zero_state(2).unwrap();
        rho.apply_gate(&GateOp::h(0)).unwrap();
        rho.apply_gate(&GateOp::cx(0, 1)).unwrap();
        let bell = CMat::from_fn(4, 1, |i, _| {
            if i == 0 || i == 3 { c(std::f64::consts::FRAC_1_SQRT_2, 0.0) } else { c(0.0, 0.0) }
        });
        rho.apply_depolarizing(&[0, 1], *lambda).unwrap();
        let want = &bell * bell.adjoint() * c(1.0 - lambda, 0.0) + identity(4) * c(lambda / 4.0, 0.0);
        worst = worst.max(sim_diff(&rho, &want));
    }
    if worst > 1e-12 {
        return fail(format!("channel forms differ by {worst:e}"));
    }

    let (circuit, _) = grover5(None);
    let profile = NoiseProfile::uniform("u", 0.01, 0.01, 0.01).unwrap();
    let mut evo = NoisyEvolution::new(5, &profile).unwrap();
    let mut drift = 0.0f64;
    for g in &circuit.gates {
        evo.run(std::slice::from_ref(g)).unwrap();
        drift = drift.max((evo.state().trace() - Complex64::new(1.0, 0.0)).norm());
    }
    if drift > 1e-10 {
        return fail(format!("trace drifted by {drift:e}"));
    }
    pass(format!("max entry diff {worst:.1e}, trace drift {drift:.1e} over {} gates", circuit.gates.len()))
}

fn noiseless_run() -> Outcome {
    let (circuit, marked) = grover5(None);
    let theta = circuit.meta.as_ref().unwrap().theta;
    let swept = sweep(&circuit, &NoiseProfile::noiseless(), &marked).unwrap();
    let mut worst = 0.0f64;
    for &(t, observed) in &swept {
        worst = worst.max((observed - amplification_at(theta, t)).abs());
    }
    let last = swept[4].1;
    if swept.len() != 5 || worst > 1e-9 || last < 0.999 {
        return fail(format!("deviation {worst:e}, success(4) = {last}"));
    }
    pass(format!("deviation {worst:.1e}, success(4) = {last:.6}"))
}

fn noisy_shape() -> Outcome {
    let (circuit, marked) = grover5(Some(8));
    let mut summary = Vec::new();
    for &lambda in &LAMBDAS {
        let profile = NoiseProfile::uniform("u", 0.0, lambda, lambda).unwrap();
        let observed: Vec<f64> = sweep(&circuit, &profile, &marked).unwrap().into_iter().map(|(_, s)| s).collect();
        let curve = predict_curve(&circuit, &profile).unwrap();
        let predicted = curve.inflection;

        let peak = (0..observed.len()).fold(0, |best, t| if observed[t] > observed[best] { t } else { best });
        let rises = observed[..=peak].windows(2).all(|w| w[1] > w[0]);
        let falls = observed[peak..].windows(2).all(|w| w[1] < w[0]);
        if !(rises && falls) {
            return fail(format!("lambda={lambda}: curve is not single-peaked: {observed:?}"));
        }
        if peak.abs_diff(predicted) > 1 {
            return fail(format!("lambda={lambda}: observed peak {peak}, predicted {predicted}"));
        }
        for (pt, obs) in curve.all_points().zip(&observed) {
            if *obs < pt.estimated_success - 0.01 {
                return fail(format!(
                    "lambda={lambda} t={}: observed {obs} below estimate {}",
                    pt.t, pt.estimated_success
                ));
            }
        }
        summary.push(format!("{lambda}:{peak}/{predicted}"));
    }
    pass(format!("observed/predicted peaks {}", summary.join(" ")))
}

fn trajectory_agreement() -> Outcome {
    let (circuit, _) = grover5(Some(2));
    let profile = NoiseProfile::uniform("u", 0.001, 0.01, 0.01).unwrap();
    let shots = 100_000u64;
    let exact = simulate(&circuit, &profile, 2).unwrap();
    let sampled = trajectory_sample(&circuit, &profile, shots, 2026).unwrap();
    let mut worst = 0.0f64;
    for (s, e) in sampled.probabilities.iter().zip(&exact.probabilities) {
        let sigma = (e * (1.0 - e) / shots as f64).sqrt();
        let z = if sigma > 0.0 { (s - e).abs() / sigma } else if *s == 0.0 { 0.0 } else { f64::INFINITY };
        worst = worst.max(z);
    }
    if worst > 3.0 {
        return fail(format!("largest deviation {worst:.2} sigma"));
    }
    pass(format!("largest deviation {worst:.2} sigma over {} outcomes", exact.probabilities.len()))
}

fn round_trips() -> Outcome {
    let mut rng = SplitMix(2026);
    for i in 0..1000 {
        let n = 2 + (rng.next_u64() % 5) as usize;
        let space = 1u64 << n;
        let count = 1 + rng.next_u64() % (space - 1).min(4);
        let states: Vec<u64> = (0..count).map(|_| rng.next_u64() % space).collect();
        let marked = MarkedSet::new(n, states).unwrap();
        let t = 1 + (rng.next_u64() % 4) as usize;
        let c = build_amplification_circuit(&GroverSpec::new(marked).with_iterations(t)).unwrap();
        let text = match emit(&c) {
            Ok(text) => text,
            Err(e) => return fail(format!("case {i}: emit failed: {e}")),
        };
        match parse(&text) {
            Ok(back) if back == c => {}
            Ok(_) => return fail(format!("case {i}: parsed circuit differs")),
            Err(e) => return fail(format!("case {i}: {e}")),
        }
    }
    pass("1000 circuits")
}

fn nine_qubit_scale() -> Outcome {
    let marked = MarkedSet::from_bitstrings(9, &["101100111"]).unwrap();
    let circuit = build_amplification_circuit(&GroverSpec::new(marked.clone())).unwrap();
    if circuit.iteration_count() != 17 {
        return fail(format!("expected 17 iterations, got {}", circuit.iteration_count()));
    }
    let profile = NoiseProfile::uniform("u", 0.0, 0.002, 0.00002).unwrap();

    let start = Instant::now();
    let curve = predict_curve(&circuit, &profile).unwrap();
    let predict_time = start.elapsed();
    if predict_time > Duration::from_secs(1) {
        return fail(format!("prediction took {predict_time:.2?}"));
    }

    let start = Instant::now();
    let swept = sweep(&circuit, &profile, &marked).unwrap();
    let sim_time = start.elapsed();
    let best = swept.iter().map(|&(_, s)| s).fold(0.0, f64::max);
    if swept.len() != 18 || sim_time > Duration::from_secs(30 * 60) {
        return fail(format!("sweep incomplete or slow: {} points in {sim_time:.2?}", swept.len()));
    }
    pass(format!(
        "{} gates, predict {predict_time:.2?} (t*={}), sweep {sim_time:.2?} (best success {best:.4})",
        circuit.gates.len(),
        curve.inflection
    ))
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let checks: [(&str, Duration, Check); 9] = [
        ("predicted iterations from gate tallies", Duration::from_secs(1), predicted_iterations),
        ("optimal iteration formula", Duration::from_secs(1), iteration_formula),
        ("depolarizing to Pauli conversion", Duration::from_secs(1), conversion_factors),
        ("channel forms and trace preservation", Duration::from_secs(60), channel_forms),
        ("noiseless 5-qubit search", Duration::from_secs(10), noiseless_run),
        ("noisy 5-qubit curve shape", Duration::from_secs(120), noisy_shape),
        ("trajectory vs exact distribution", Duration::from_secs(60), trajectory_agreement),
        ("qasm round trip", Duration::from_secs(10), round_trips),
        ("9-qubit scale", Duration::from_secs(30 * 60), nine_qubit_scale),
    ];

    let mut failures = 0;
    for (i, (name, limit, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let raw = check();
        let elapsed = start.elapsed();
        let out = within(*limit, elapsed, raw);
        let tag = if out.ok { "PASS" } else { "FAIL" };
        println!("[{tag}] {}. {name} ({elapsed:.2?}): {}", i + 1, out.detail);
        if !out.ok {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", checks.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

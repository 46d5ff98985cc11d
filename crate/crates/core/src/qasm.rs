// Copyright 2026 The ampopt Authors
// SPDX-License-Identifier: Apache-2.0

//! Reader and writer for `.aaq` files: an OpenQASM 2.0 subset whose
//! amplification structure travels in comment pragmas, so the files stay
//! loadable by tools that know nothing about it.
//!
//! ```text
//! OPENQASM 2.0;
//! include "qelib1.inc";
//! qreg q[2];
//! h q[0];
//! h q[1];
//! // @ampopt amplification_begin theta=5.2359877559829882e-1 t_opt=1 m=1
//! // @ampopt iteration_begin
//! cx q[0],q[1];
//! // @ampopt iteration_end
//! // @ampopt amplification_end
//! ```
//!
//! `theta` is required on `amplification_begin`; `t_opt` and `m` are
//! optional and inferred from `theta` when missing.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ir::{AmplificationMeta, Circuit, GateKind, GateOp};
use crate::synth::grover_params;

const PRAGMA: &str = "// @ampopt";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QasmErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("unsupported statement `{0}`")]
    Unsupported(String),
    #[error("unbalanced intrinsic: {0}")]
    UnbalancedIntrinsic(String),
    #[error("qubit index {index} out of range for register of size {size}")]
    QubitOutOfRange { index: usize, size: usize },
    #[error("gate used before qreg declaration")]
    MissingQreg,
    #[error("more than one qreg declaration")]
    DuplicateQreg,
    #[error("invalid gate: {0}")]
    InvalidGate(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {kind}")]
pub struct QasmError {
    pub line: usize,
    pub column: usize,
    pub kind: QasmErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmitError {
    #[error("circuit is invalid: {}", .0.join("; "))]
    InvalidCircuit(Vec<String>),
    #[error("gate kind {0} has no serialized form; lower the circuit first")]
    Unserializable(GateKind),
}

/// Formats an angle with 17 significant digits, enough to re-parse to the
/// identical double.
pub fn format_angle(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn emit(c: &Circuit) -> Result<String, EmitError> {
    let violations = c.validate();
    if !violations.is_empty() {
        return Err(EmitError::InvalidCircuit(violations));
    }
    if let Some(g) = c.gates.iter().find(|g| g.kind == GateKind::McPhase) {
        return Err(EmitError::Unserializable(g.kind));
    }

    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(out, "qreg q[{}];", c.n);
    let gate_line = |out: &mut String, g: &GateOp| {
        let _ = match g.kind {
            GateKind::Rz => writeln!(out, "rz({}) q[{}];", format_angle(g.angle.unwrap_or(0.0)), g.qubits[0]),
            GateKind::Cx => writeln!(out, "cx q[{}],q[{}];", g.qubits[0], g.qubits[1]),
            _ => writeln!(out, "{} q[{}];", g.kind, g.qubits[0]),
        };
    };
    for g in c.preamble_gates() {
        gate_line(&mut out, g);
    }
    if let Some(meta) = &c.meta {
        let _ = writeln!(
            out,
            "{PRAGMA} amplification_begin theta={} t_opt={} m={}",
            format_angle(meta.theta),
            meta.t_opt,
            meta.m
        );
        for seg in &c.segments {
            let _ = writeln!(out, "{PRAGMA} iteration_begin");
            for g in &c.gates[seg.clone()] {
                gate_line(&mut out, g);
            }
            let _ = writeln!(out, "{PRAGMA} iteration_end");
        }
        let _ = writeln!(out, "{PRAGMA} amplification_end");
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    Preamble,
    Amplification,
    Iteration,
    Done,
}

struct Parser {
    line: usize,
    register: Option<(String, usize)>,
    saw_header: bool,
    gates: Vec<GateOp>,
    block: Block,
    meta: Option<(f64, Option<usize>, Option<u64>)>,
    preamble_end: usize,
    segments: Vec<std::ops::Range<usize>>,
    segment_start: usize,
}

pub fn parse(text: &str) -> Result<Circuit, QasmError> {
    let mut p = Parser {
        line: 0,
        register: None,
        saw_header: false,
        gates: Vec::new(),
        block: Block::Preamble,
        meta: None,
        preamble_end: 0,
        segments: Vec::new(),
        segment_start: 0,
    };
    for (i, raw) in text.lines().enumerate() {
        p.line = i + 1;
        p.parse_line(raw)?;
    }
    p.finish()
}

impl Parser {
    fn err(&self, column: usize, kind: QasmErrorKind) -> QasmError {
        QasmError { line: self.line, column, kind }
    }

    fn parse_line(&mut self, raw: &str) -> Result<(), QasmError> {
        let indent = raw.len() - raw.trim_start().len();
        let trimmed = raw.trim();
        if let Some(rest) = trimmed.strip_prefix(PRAGMA) {
            return self.pragma(rest.trim(), indent + 1);
        }
        let code = match raw.find("//") {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut offset = 0;
        let pieces: Vec<&str> = code.split(';').collect();
        let last = pieces.len() - 1;
        for (k, piece) in pieces.into_iter().enumerate() {
            let column = offset + piece.len() - piece.trim_start().len() + 1;
            offset += piece.len() + 1;
            let stmt = piece.trim();
            if k == last {
                if !stmt.is_empty() {
                    return Err(self.err(column, QasmErrorKind::Syntax(format!("missing `;` after `{stmt}`"))));
                }
                break;
            }
            if stmt.is_empty() {
                return Err(self.err(column, QasmErrorKind::Syntax("empty statement".into())));
            }
            self.statement(stmt, column)?;
        }
        Ok(())
    }

    fn statement(&mut self, stmt: &str, column: usize) -> Result<(), QasmError> {
        let word_end = stmt
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(stmt.len());
        let word = &stmt[..word_end];
        let rest = stmt[word_end..].trim_start();

        if !self.saw_header {
            if word == "OPENQASM" && rest == "2.0" {
                self.saw_header = true;
                return Ok(());
            }
            return Err(self.err(column, QasmErrorKind::Syntax("expected `OPENQASM 2.0;` header".into())));
        }
        match word {
            "OPENQASM" => Err(self.err(column, QasmErrorKind::Syntax("duplicate header".into()))),
            "include" => {
                if rest == "\"qelib1.inc\"" {
                    Ok(())
                } else {
                    Err(self.err(column, QasmErrorKind::Unsupported(stmt.to_string())))
                }
            }
            "qreg" => self.qreg(rest, column),
            "creg" | "measure" | "barrier" | "reset" | "gate" | "opaque" | "if" => {
                Err(self.err(column, QasmErrorKind::Unsupported(word.to_string())))
            }
            _ => {
                let gate = self.gate(word, rest, column)?;
                self.push_gate(gate, column)
            }
        }
    }

    fn qreg(&mut self, rest: &str, column: usize) -> Result<(), QasmError> {
        if self.register.is_some() {
            return Err(self.err(column, QasmErrorKind::DuplicateQreg));
        }
        let (name, size) = parse_indexed(rest)
            .ok_or_else(|| self.err(column, QasmErrorKind::Syntax(format!("bad qreg declaration `{rest}`"))))?;
        if size == 0 || size > 62 {
            return Err(self.err(column, QasmErrorKind::Syntax(format!("register size {size} not supported"))));
        }
        self.register = Some((name.to_string(), size));
        Ok(())
    }

    fn gate(&self, word: &str, rest: &str, column: usize) -> Result<GateOp, QasmError> {
        let kind = match GateKind::from_name(word) {
            Some(k) if k != GateKind::McPhase => k,
            _ => return Err(self.err(column, QasmErrorKind::UnknownGate(word.to_string()))),
        };
        let (name, size) = match &self.register {
            Some((name, size)) => (name.as_str(), *size),
            None => return Err(self.err(column, QasmErrorKind::MissingQreg)),
        };

        let (angle, operands) = if let Some(inner) = rest.strip_prefix('(') {
            let mut depth = 0usize;
            let close = inner
                .char_indices()
                .find(|&(_, ch)| match ch {
                    '(' => {
                        depth += 1;
                        false
                    }
                    ')' if depth == 0 => true,
                    ')' => {
                        depth -= 1;
                        false
                    }
                    _ => false,
                })
                .map(|(i, _)| i)
                .ok_or_else(|| self.err(column, QasmErrorKind::Syntax("unclosed `(`".into())))?;
            let value = eval_angle(&inner[..close])
                .map_err(|e| self.err(column, QasmErrorKind::Syntax(e)))?;
            (Some(value), inner[close + 1..].trim())
        } else {
            (None, rest)
        };
        if kind.has_angle() != angle.is_some() {
            let msg = if angle.is_some() { "takes no parameter" } else { "requires an angle" };
            return Err(self.err(column, QasmErrorKind::InvalidGate(format!("{word} {msg}"))));
        }

        let mut qubits = Vec::new();
        for operand in operands.split(',') {
            let operand = operand.trim();
            let (reg, index) = parse_indexed(operand)
                .ok_or_else(|| self.err(column, QasmErrorKind::Syntax(format!("bad operand `{operand}`"))))?;
            if reg != name {
                return Err(self.err(column, QasmErrorKind::Syntax(format!("unknown register `{reg}`"))));
            }
            if index >= size {
                return Err(self.err(column, QasmErrorKind::QubitOutOfRange { index, size }));
            }
            qubits.push(index);
        }
        let gate = GateOp { kind, qubits, angle };
        let probe = Circuit::plain(size, vec![gate.clone()]);
        if let Some(v) = probe.validate().into_iter().next() {
            return Err(self.err(column, QasmErrorKind::InvalidGate(v)));
        }
        Ok(gate)
    }

    fn push_gate(&mut self, gate: GateOp, column: usize) -> Result<(), QasmError> {
        match self.block {
            Block::Preamble | Block::Iteration => {
                self.gates.push(gate);
                Ok(())
            }
            Block::Amplification => Err(self.err(
                column,
                QasmErrorKind::UnbalancedIntrinsic("gate inside amplification block but outside any iteration".into()),
            )),
            Block::Done => Err(self.err(
                column,
                QasmErrorKind::UnbalancedIntrinsic("gate after amplification_end".into()),
            )),
        }
    }

    fn pragma(&mut self, body: &str, column: usize) -> Result<(), QasmError> {
        let mut words = body.split_whitespace();
        let name = words.next().unwrap_or("");
        let unbalanced = |p: &Parser, msg: &str| p.err(column, QasmErrorKind::UnbalancedIntrinsic(msg.to_string()));
        if !self.saw_header || self.register.is_none() {
            return Err(unbalanced(self, "intrinsic before header and qreg"));
        }
        if name != "amplification_begin" && words.clone().next().is_some() {
            return Err(self.err(column, QasmErrorKind::Syntax(format!("`{name}` takes no arguments"))));
        }
        match (name, self.block) {
            ("amplification_begin", Block::Preamble) => {
                let mut theta = None;
                let mut t_opt = None;
                let mut m = None;
                for kv in words {
                    let (key, value) = kv.split_once('=').ok_or_else(|| {
                        self.err(column, QasmErrorKind::Syntax(format!("expected key=value, got `{kv}`")))
                    })?;
                    let bad = || self.err(column, QasmErrorKind::Syntax(format!("bad value for {key}: `{value}`")));
                    match key {
                        "theta" => theta = Some(eval_angle(value).map_err(|_| bad())?),
                        "t_opt" => t_opt = Some(value.parse().map_err(|_| bad())?),
                        "m" => m = Some(value.parse().map_err(|_| bad())?),
                        _ => {
                            return Err(self.err(column, QasmErrorKind::Syntax(format!("unknown pragma key `{key}`"))))
                        }
                    }
                }
                let theta = theta.ok_or_else(|| {
                    self.err(column, QasmErrorKind::Syntax("amplification_begin requires theta=".into()))
                })?;
                self.meta = Some((theta, t_opt, m));
                self.preamble_end = self.gates.len();
                self.block = Block::Amplification;
            }
            ("iteration_begin", Block::Amplification) => {
                self.segment_start = self.gates.len();
                self.block = Block::Iteration;
            }
            ("iteration_end", Block::Iteration) => {
                self.segments.push(self.segment_start..self.gates.len());
                self.block = Block::Amplification;
            }
            ("amplification_end", Block::Amplification) => self.block = Block::Done,
            ("amplification_begin" | "iteration_begin" | "iteration_end" | "amplification_end", _) => {
                return Err(unbalanced(self, &format!("`{name}` not allowed here")));
            }
            _ => return Err(self.err(column, QasmErrorKind::Syntax(format!("unknown intrinsic `{name}`")))),
        }
        Ok(())
    }

    fn finish(self) -> Result<Circuit, QasmError> {
        let eof = |kind| QasmError { line: self.line.max(1), column: 1, kind };
        if !self.saw_header {
            return Err(eof(QasmErrorKind::Syntax("missing `OPENQASM 2.0;` header".into())));
        }
        let n = match &self.register {
            Some((_, size)) => *size,
            None => return Err(eof(QasmErrorKind::MissingQreg)),
        };
        match self.block {
            Block::Amplification | Block::Iteration => {
                return Err(eof(QasmErrorKind::UnbalancedIntrinsic("unterminated amplification block".into())))
            }
            Block::Preamble => return Ok(Circuit::plain(n, self.gates)),
            Block::Done => {}
        }
        let (theta, t_opt, m) = self.meta.expect("amplification block seen");
        let space = (n as f64).exp2();
        let m = m.unwrap_or_else(|| ((space * theta.sin().powi(2)).round() as u64).max(1));
        let t_opt = t_opt.unwrap_or_else(|| grover_params(m, n).map_or(1, |(_, t)| t));
        Ok(Circuit {
            n,
            gates: self.gates,
            meta: Some(AmplificationMeta { theta, t_opt, m, n }),
            preamble: 0..self.preamble_end,
            segments: self.segments,
        })
    }
}

/// Splits `name[123]`.
fn parse_indexed(s: &str) -> Option<(&str, usize)> {
    let open = s.find('[')?;
    let inner = s[open + 1..].strip_suffix(']')?;
    let name = s[..open].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return None;
    }
    Some((name, inner.trim().parse().ok()?))
}

/// Evaluates an angle: decimal literals, `pi`, unary minus, `+ - * /` and
/// parentheses.
pub fn eval_angle(src: &str) -> Result<f64, String> {
    let tokens = tokenize(src)?;
    let mut pos = 0;
    let v = expr(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(format!("trailing input in angle `{}`", src.trim()));
    }
    if !v.is_finite() {
        return Err(format!("angle `{}` is not finite", src.trim()));
    }
    Ok(v)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let bytes = src.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if "+-*/()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else if src[i..].starts_with("pi") {
            out.push(Tok::Num(std::f64::consts::PI));
            i += 2;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                i += 1;
                if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let lit = &src[start..i];
            out.push(Tok::Num(lit.parse().map_err(|_| format!("bad number `{lit}`"))?));
        } else {
            return Err(format!("unexpected `{c}` in angle"));
        }
    }
    Ok(out)
}

fn expr(t: &[Tok], pos: &mut usize) -> Result<f64, String> {
    let mut v = term(t, pos)?;
    while let Some(Tok::Op(op @ ('+' | '-'))) = t.get(*pos) {
        *pos += 1;
        let rhs = term(t, pos)?;
        v = if *op == '+' { v + rhs } else { v - rhs };
    }
    Ok(v)
}

fn term(t: &[Tok], pos: &mut usize) -> Result<f64, String> {
    let mut v = unary(t, pos)?;
    while let Some(Tok::Op(op @ ('*' | '/'))) = t.get(*pos) {
        *pos += 1;
        let rhs = unary(t, pos)?;
        v = if *op == '*' { v * rhs } else { v / rhs };
    }
    Ok(v)
}

fn unary(t: &[Tok], pos: &mut usize) -> Result<f64, String> {
    match t.get(*pos) {
        Some(Tok::Op('-')) => {
            *pos += 1;
            Ok(-unary(t, pos)?)
        }
        Some(Tok::Op('+')) => {
            *pos += 1;
            unary(t, pos)
        }
        Some(Tok::Num(v)) => {
            *pos += 1;
            Ok(*v)
        }
        Some(Tok::Op('(')) => {
            *pos += 1;
            let v = expr(t, pos)?;
            match t.get(*pos) {
                Some(Tok::Op(')')) => {
                    *pos += 1;
                    Ok(v)
                }
                _ => Err("missing `)`".into()),
            }
        }
        _ => Err("expected a number".into()),
    }
}

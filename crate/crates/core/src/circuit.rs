//! Circuit representation, the JSON circuit format, full-unitary
//! simulation, depth accounting and line routing.
//!
//! Gate order is execution order: `gates[0]` acts first, so the circuit
//! unitary is `U_last ··· U_0`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::gates::{
    a_gate, b_gate, heisenberg_evolution, pauli, rotation, standard_gate, xx, yy, zz, AGateParams,
    Axis, HeisenbergParams, StandardGate,
};
use crate::tensor::{phase_distance, unitarity_deviation, ComplexMatrix, WireSet, C64};

/// Largest register the simulator will build (4096 × 4096 dense).
pub const MAX_QUBITS: usize = 12;

/// Unitarity tolerance for inline custom matrices.
pub const CUSTOM_UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Rx,
    Ry,
    Rz,
    Cnot,
    Swap,
    Xx,
    Yy,
    Zz,
    A,
    Heis,
    B,
    Custom,
}

impl GateKind {
    pub const ALL: [GateKind; 18] = [
        GateKind::I,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cnot,
        GateKind::Swap,
        GateKind::Xx,
        GateKind::Yy,
        GateKind::Zz,
        GateKind::A,
        GateKind::Heis,
        GateKind::B,
        GateKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "I",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::Swap => "SWAP",
            GateKind::Xx => "XX",
            GateKind::Yy => "YY",
            GateKind::Zz => "ZZ",
            GateKind::A => "A",
            GateKind::Heis => "HEIS",
            GateKind::B => "B",
            GateKind::Custom => "custom",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::UnknownGate(name.to_string()))
    }

    /// Number of wires, `None` for custom gates (sized by their matrix).
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::I
            | GateKind::X
            | GateKind::Y
            | GateKind::Z
            | GateKind::H
            | GateKind::S
            | GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz => Some(1),
            GateKind::Custom => None,
            _ => Some(2),
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::Xx
            | GateKind::Yy
            | GateKind::Zz => 1,
            GateKind::A | GateKind::Heis => 3,
            _ => 0,
        }
    }
}

/// A gate from the library (or an inline matrix) applied to ordered wires.
#[derive(Clone, Debug, PartialEq)]
pub struct GateInstance {
    kind: GateKind,
    wires: Vec<usize>,
    params: Vec<f64>,
    matrix: Option<ComplexMatrix>,
}

impl GateInstance {
    pub fn new(kind: GateKind, wires: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        if kind == GateKind::Custom {
            return Err(Error::InvalidParameter(
                "custom gates need a matrix; use GateInstance::custom".into(),
            ));
        }
        let arity = kind.arity().expect("library gates have fixed arity");
        if wires.len() != arity {
            return Err(Error::InvalidWires(format!(
                "{} acts on {arity} wire(s), got {}",
                kind.name(),
                wires.len()
            )));
        }
        check_distinct(&wires)?;
        if params.len() != kind.param_count() {
            return Err(Error::InvalidParameter(format!(
                "{} takes {} parameter(s), got {}",
                kind.name(),
                kind.param_count(),
                params.len()
            )));
        }
        if let Some(bad) = params.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite parameter {bad}"
            )));
        }
        Ok(Self {
            kind,
            wires,
            params,
            matrix: None,
        })
    }

    pub fn named(name: &str, wires: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        Self::new(GateKind::from_name(name)?, wires, params)
    }

    /// Inline-matrix gate; the matrix must be `2^k × 2^k` for `k` wires
    /// and unitary within 1e-10.
    pub fn custom(matrix: ComplexMatrix, wires: Vec<usize>) -> Result<Self> {
        check_distinct(&wires)?;
        if wires.is_empty() || wires.len() > MAX_QUBITS {
            return Err(Error::InvalidWires(format!(
                "custom gate needs between 1 and {MAX_QUBITS} wires"
            )));
        }
        let dim = 1usize << wires.len();
        if matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                op: "custom gate",
                expected: format!("{dim}x{dim} for {} wire(s)", wires.len()),
                found: format!("{}x{}", matrix.rows(), matrix.cols()),
            });
        }
        if matrix
            .entries()
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        let deviation = unitarity_deviation(&matrix)?;
        if deviation >= CUSTOM_UNITARY_TOL {
            return Err(Error::NonUnitary {
                deviation,
                tol: CUSTOM_UNITARY_TOL,
            });
        }
        Ok(Self {
            kind: GateKind::Custom,
            wires,
            params: Vec::new(),
            matrix: Some(matrix),
        })
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target], vec![]).expect("distinct wires")
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b], vec![]).expect("distinct wires")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn custom_matrix(&self) -> Option<&ComplexMatrix> {
        self.matrix.as_ref()
    }

    pub fn touches(&self, wire: usize) -> bool {
        self.wires.contains(&wire)
    }

    /// Same operation on different wires.
    pub fn with_wires(&self, wires: Vec<usize>) -> Result<Self> {
        check_distinct(&wires)?;
        if wires.len() != self.wires.len() {
            return Err(Error::InvalidWires(format!(
                "{} acts on {} wire(s), got {}",
                self.name(),
                self.wires.len(),
                wires.len()
            )));
        }
        Ok(Self {
            wires,
            ..self.clone()
        })
    }

    /// Syntactic match of the operation, ignoring wires: same name,
    /// parameters within `tol`, and custom matrices within `tol` entrywise.
    pub fn same_operation(&self, other: &GateInstance, tol: f64) -> bool {
        self.kind == other.kind
            && self.wires.len() == other.wires.len()
            && self.params.len() == other.params.len()
            && self
                .params
                .iter()
                .zip(&other.params)
                .all(|(a, b)| (a - b).abs() <= tol)
            && match (&self.matrix, &other.matrix) {
                (Some(a), Some(b)) => a.approx_eq(b, tol),
                (None, None) => true,
                _ => false,
            }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let p = &self.params;
        match self.kind {
            GateKind::I => ComplexMatrix::identity(2),
            GateKind::X => pauli(Axis::X),
            GateKind::Y => pauli(Axis::Y),
            GateKind::Z => pauli(Axis::Z),
            GateKind::H => standard_gate(StandardGate::H),
            GateKind::S => standard_gate(StandardGate::S),
            GateKind::Rx => rotation(Axis::X, p[0]),
            GateKind::Ry => rotation(Axis::Y, p[0]),
            GateKind::Rz => rotation(Axis::Z, p[0]),
            GateKind::Cnot => standard_gate(StandardGate::Cnot),
            GateKind::Swap => standard_gate(StandardGate::Swap),
            GateKind::Xx => xx(p[0]),
            GateKind::Yy => yy(p[0]),
            GateKind::Zz => zz(p[0]),
            GateKind::A => a_gate(AGateParams::new(p[0], p[1], p[2])),
            GateKind::Heis => heisenberg_evolution(HeisenbergParams::new(p[0], p[1], p[2])),
            GateKind::B => b_gate(),
            GateKind::Custom => self.matrix.clone().expect("custom gate carries a matrix"),
        }
    }
}

fn check_distinct(wires: &[usize]) -> Result<()> {
    for (i, w) in wires.iter().enumerate() {
        if wires[..i].contains(w) {
            return Err(Error::InvalidWires(format!("duplicate wire {w}")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateInstance>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub gate_count: usize,
    pub depth: usize,
    pub two_qubit_count: usize,
    pub nonlocal_count: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::InvalidWires(
                "a circuit needs at least one qubit".into(),
            ));
        }
        Ok(Self {
            num_qubits,
            gates: Vec::new(),
        })
    }

    pub fn with_gates(num_qubits: usize, gates: Vec<GateInstance>) -> Result<Self> {
        let mut c = Self::new(num_qubits)?;
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, gate: GateInstance) -> Result<()> {
        if let Some(&w) = gate.wires.iter().find(|&&w| w >= self.num_qubits) {
            return Err(Error::InvalidWires(format!(
                "wire {w} out of range for a {}-qubit circuit",
                self.num_qubits
            )));
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn into_gates(self) -> Vec<GateInstance> {
        self.gates
    }

    /// `U_last ··· U_0` over the full register.
    pub fn to_unitary(&self) -> Result<ComplexMatrix> {
        if self.num_qubits > MAX_QUBITS {
            return Err(Error::RegisterTooLarge {
                qubits: self.num_qubits,
                max: MAX_QUBITS,
            });
        }
        let mut u = ComplexMatrix::identity(1 << self.num_qubits);
        for g in &self.gates {
            let ws = WireSet::new(g.wires.clone(), self.num_qubits)?;
            u.apply_on_wires(&g.matrix(), &ws)?;
        }
        Ok(u)
    }

    /// ASAP layering: a gate lands one layer after the latest layer of any
    /// earlier gate sharing one of its wires.
    pub fn depth(&self) -> usize {
        let mut frontier = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let layer = g.wires.iter().map(|&w| frontier[w]).max().unwrap_or(0) + 1;
            for &w in &g.wires {
                frontier[w] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }

    pub fn is_line_local(&self) -> bool {
        self.gates.iter().all(|g| !is_nonlocal(g))
    }

    pub fn stats(&self) -> CircuitStats {
        CircuitStats {
            gate_count: self.gates.len(),
            depth: self.depth(),
            two_qubit_count: self.gates.iter().filter(|g| g.wires.len() == 2).count(),
            nonlocal_count: self.gates.iter().filter(|g| is_nonlocal(g)).count(),
        }
    }

    /// Replaces every two-qubit gate on wires `(i, j)` with `|i − j| ≥ 2`
    /// by a SWAP chain that walks the far state down to the wire next to
    /// the near one, the gate on the adjacent pair, and the reversed chain.
    /// Costs `2(|i − j| − 1)` SWAPs per gate.
    pub fn route_line(&self) -> Circuit {
        let mut out = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            if !is_nonlocal(g) {
                out.push(g.clone());
                continue;
            }
            let (lo, hi) = (g.wires[0].min(g.wires[1]), g.wires[0].max(g.wires[1]));
            let chain: Vec<GateInstance> = (lo + 1..hi)
                .rev()
                .map(|w| GateInstance::swap(w, w + 1))
                .collect();
            out.extend(chain.iter().cloned());
            let moved: Vec<usize> = g
                .wires
                .iter()
                .map(|&w| if w == hi { lo + 1 } else { w })
                .collect();
            out.push(g.with_wires(moved).expect("distinct adjacent wires"));
            out.extend(chain.into_iter().rev());
        }
        Circuit {
            num_qubits: self.num_qubits,
            gates: out,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        circuit_from_value(&value)
    }

    /// Canonical JSON: fixed field order, one gate per line, numbers with
    /// 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        let _ = write!(
            out,
            "{{\n  \"qubits\": {},\n  \"gates\": [",
            self.num_qubits
        );
        for (i, g) in self.gates.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            write_gate(&mut out, g);
        }
        if !self.gates.is_empty() {
            out.push_str("\n  ");
        }
        out.push_str("]\n}\n");
        out
    }
}

fn is_nonlocal(g: &GateInstance) -> bool {
    g.wires.len() == 2 && g.wires[0].abs_diff(g.wires[1]) >= 2
}

pub fn parse(text: &str) -> Result<Circuit> {
    Circuit::parse(text)
}

pub fn serialize(c: &Circuit) -> String {
    c.to_json()
}

pub fn to_unitary(c: &Circuit) -> Result<ComplexMatrix> {
    c.to_unitary()
}

pub fn depth(c: &Circuit) -> usize {
    c.depth()
}

pub fn route_line(c: &Circuit) -> Circuit {
    c.route_line()
}

/// Phase distance between the two circuit unitaries.
pub fn circuit_phase_distance(a: &Circuit, b: &Circuit) -> Result<f64> {
    if a.num_qubits != b.num_qubits {
        return Err(Error::RegisterMismatch {
            left: a.num_qubits,
            right: b.num_qubits,
        });
    }
    phase_distance(&a.to_unitary()?, &b.to_unitary()?)
}

pub fn equivalent_up_to_phase(a: &Circuit, b: &Circuit, tol: f64) -> Result<bool> {
    Ok(circuit_phase_distance(a, b)? < tol)
}

fn write_gate(out: &mut String, g: &GateInstance) {
    let wires: Vec<String> = g.wires.iter().map(usize::to_string).collect();
    let _ = write!(
        out,
        "{{\"name\": \"{}\", \"wires\": [{}]",
        g.name(),
        wires.join(", ")
    );
    if !g.params.is_empty() {
        let params: Vec<String> = g.params.iter().map(|&p| format_g17(p)).collect();
        let _ = write!(out, ", \"params\": [{}]", params.join(", "));
    }
    if let Some(m) = &g.matrix {
        out.push_str(", \"matrix\": ");
        write_matrix(out, m);
    }
    out.push('}');
}

/// Writes a matrix as nested rows of `[re, im]` pairs.
pub fn write_matrix(out: &mut String, m: &ComplexMatrix) {
    out.push('[');
    for r in 0..m.rows() {
        if r > 0 {
            out.push_str(", ");
        }
        out.push('[');
        for (c, z) in m.row(r).iter().enumerate() {
            if c > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "[{}, {}]", format_g17(z.re), format_g17(z.im));
        }
        out.push(']');
    }
    out.push(']');
}

/// C's `%.17g`: 17 significant digits, trailing zeros stripped, exponent
/// form outside `[1e-4, 1e17)`. Negative zero prints as `0`.
pub fn format_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    assert!(x.is_finite(), "non-finite number in circuit JSON");
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..PRECISION).contains(&exp) {
        let fixed = format!("{:.*}", (PRECISION - 1 - exp) as usize, x);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn circuit_from_value(v: &Value) -> Result<Circuit> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema("$", "top level must be an object"))?;
    reject_unknown(obj, "$", &["qubits", "gates"])?;
    let qubits = obj
        .get("qubits")
        .ok_or_else(|| schema("$.qubits", "missing required field"))?
        .as_u64()
        .filter(|&q| q > 0)
        .ok_or_else(|| schema("$.qubits", "must be a positive integer"))? as usize;
    let gates = obj
        .get("gates")
        .ok_or_else(|| schema("$.gates", "missing required field"))?
        .as_array()
        .ok_or_else(|| schema("$.gates", "must be an array"))?;
    let mut circuit = Circuit::new(qubits)?;
    for (i, g) in gates.iter().enumerate() {
        let path = format!("$.gates[{i}]");
        let gate = gate_from_value(g, &path)?;
        circuit
            .push(gate)
            .map_err(|e| schema(format!("{path}.wires"), e.to_string()))?;
    }
    Ok(circuit)
}

fn reject_unknown(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn gate_from_value(v: &Value, path: &str) -> Result<GateInstance> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema(path, "gate must be an object"))?;
    reject_unknown(obj, path, &["name", "wires", "params", "matrix"])?;
    let name = obj
        .get("name")
        .and_then(Value::as_str)
        .ok_or_else(|| schema(format!("{path}.name"), "missing or non-string gate name"))?;
    let kind = GateKind::from_name(name)
        .map_err(|_| schema(format!("{path}.name"), format!("unknown gate '{name}'")))?;
    let wires_v = obj
        .get("wires")
        .and_then(Value::as_array)
        .ok_or_else(|| schema(format!("{path}.wires"), "missing or non-array wires"))?;
    let mut wires = Vec::with_capacity(wires_v.len());
    for (j, w) in wires_v.iter().enumerate() {
        let w = w.as_u64().ok_or_else(|| {
            schema(
                format!("{path}.wires[{j}]"),
                "wire must be a non-negative integer",
            )
        })?;
        wires.push(w as usize);
    }
    let mut params = Vec::new();
    if let Some(p) = obj.get("params") {
        let arr = p
            .as_array()
            .ok_or_else(|| schema(format!("{path}.params"), "params must be an array"))?;
        for (j, x) in arr.iter().enumerate() {
            params.push(
                x.as_f64().ok_or_else(|| {
                    schema(format!("{path}.params[{j}]"), "param must be a number")
                })?,
            );
        }
    }
    let matrix_v = obj.get("matrix");
    if kind == GateKind::Custom {
        if !params.is_empty() {
            return Err(schema(
                format!("{path}.params"),
                "custom gates take no params",
            ));
        }
        let m = matrix_v
            .ok_or_else(|| schema(format!("{path}.matrix"), "custom gate needs a matrix"))?;
        let matrix = matrix_from_value(m, &format!("{path}.matrix"))?;
        return GateInstance::custom(matrix, wires).map_err(|e| schema(path, e.to_string()));
    }
    if matrix_v.is_some() {
        return Err(schema(
            format!("{path}.matrix"),
            "only custom gates carry a matrix",
        ));
    }
    GateInstance::new(kind, wires, params).map_err(|e| schema(path, e.to_string()))
}

/// Parses nested rows of `[re, im]` pairs.
pub fn matrix_from_value(v: &Value, path: &str) -> Result<ComplexMatrix> {
    let rows = v
        .as_array()
        .filter(|r| !r.is_empty())
        .ok_or_else(|| schema(path, "matrix must be a non-empty array of rows"))?;
    let mut data = Vec::new();
    let mut ncols = None;
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| schema(format!("{path}[{r}]"), "row must be an array"))?;
        if *ncols.get_or_insert(row.len()) != row.len() {
            return Err(schema(format!("{path}[{r}]"), "ragged matrix"));
        }
        for (c, z) in row.iter().enumerate() {
            let pair = z
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| schema(format!("{path}[{r}][{c}]"), "entry must be [re, im]"))?;
            let re = pair[0].as_f64();
            let im = pair[1].as_f64();
            match (re, im) {
                (Some(re), Some(im)) => data.push(C64::new(re, im)),
                _ => {
                    return Err(schema(
                        format!("{path}[{r}][{c}]"),
                        "entry must be [re, im]",
                    ))
                }
            }
        }
    }
    ComplexMatrix::new(rows.len(), ncols.unwrap_or(0), data)
        .map_err(|e| schema(path, e.to_string()))
}

/// Random circuit over the library gates (no custom gates).
/// With `local_only`, two-qubit gates act on adjacent wires.
pub fn random_circuit<R: Rng + ?Sized>(
    num_qubits: usize,
    len: usize,
    local_only: bool,
    rng: &mut R,
) -> Circuit {
    let mut gates = Vec::with_capacity(len);
    for _ in 0..len {
        let kind = loop {
            let k = GateKind::ALL[rng.gen_range(0..GateKind::ALL.len() - 1)];
            if k.arity() == Some(1) || num_qubits >= 2 {
                break k;
            }
        };
        let wires = if kind.arity() == Some(1) {
            vec![rng.gen_range(0..num_qubits)]
        } else if local_only {
            let a = rng.gen_range(0..num_qubits - 1);
            if rng.gen_bool(0.5) {
                vec![a, a + 1]
            } else {
                vec![a + 1, a]
            }
        } else {
            let a = rng.gen_range(0..num_qubits);
            let b = loop {
                let b = rng.gen_range(0..num_qubits);
                if b != a {
                    break b;
                }
            };
            vec![a, b]
        };
        let params = (0..kind.param_count())
            .map(|_| rng.gen_range(-2.0 * PI..2.0 * PI))
            .collect();
        gates.push(GateInstance::new(kind, wires, params).expect("valid random gate"));
    }
    Circuit { num_qubits, gates }
}

//! Pentagon-template rewriting.
//!
//! For a fusion gate `T`, the five-gate sub-circuit (execution order)
//!
//! ```text
//! T(b,c)  SWAP(b,c)  T(a,b)  SWAP(b,c)  T(a,b)
//! ```
//!
//! equals `T(a,b) T(b,c)`. `compress` applies that rewrite left to right,
//! `expand` applies it right to left.

use std::collections::HashSet;
use std::str::FromStr;

use serde::Serialize;

use crate::certify::{certify_gate, CertificationReport, GateDescriptor};
use crate::circuit::{circuit_phase_distance, Circuit, GateInstance, GateKind};
use crate::error::{Error, Result};
use crate::tensor::ComplexMatrix;

/// Tolerance on parameters and custom-matrix entries when matching gates.
pub const MATCH_TOL: f64 = 1e-10;

/// Expansion never shrinks a circuit, so the fixed-point mode stops here.
pub const MAX_EXPAND_PASSES: usize = 64;

/// A two-qubit gate whose pentagon certification came back fusion.
#[derive(Clone, Debug)]
pub struct FusionGateDescriptor {
    gate: GateInstance,
    certification: CertificationReport,
}

impl FusionGateDescriptor {
    /// Certifies `gate` (its wires are ignored) and refuses non-fusion gates.
    pub fn new(gate: GateInstance, tol: f64) -> Result<Self> {
        if gate.wires().len() != 2 {
            return Err(Error::InvalidWires(format!(
                "fusion gate must act on 2 wires, {} acts on {}",
                gate.name(),
                gate.wires().len()
            )));
        }
        let gate = gate.with_wires(vec![0, 1])?;
        let desc = match gate.kind() {
            GateKind::Custom => GateDescriptor::custom(),
            _ => GateDescriptor::new(gate.name(), gate.params().to_vec()),
        };
        let certification = certify_gate(desc, &gate.matrix(), 2, tol)?;
        if !certification.is_fusion() {
            return Err(Error::NotFusion {
                residual: certification.residual,
                tol,
            });
        }
        Ok(Self {
            gate,
            certification,
        })
    }

    pub fn from_name(name: &str, params: Vec<f64>, tol: f64) -> Result<Self> {
        Self::new(GateInstance::named(name, vec![0, 1], params)?, tol)
    }

    pub fn from_matrix(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::new(GateInstance::custom(matrix, vec![0, 1])?, tol)
    }

    pub fn gate(&self) -> &GateInstance {
        &self.gate
    }

    pub fn certification(&self) -> &CertificationReport {
        &self.certification
    }

    /// `T` on `(a, b)`.
    pub fn on(&self, a: usize, b: usize) -> GateInstance {
        self.gate.with_wires(vec![a, b]).expect("distinct wires")
    }

    fn matches(&self, g: &GateInstance) -> bool {
        self.gate.same_operation(g, MATCH_TOL)
    }
}

/// Five-gate template on `(a, b, c)` in execution order.
pub fn pentagon_template(
    t: &FusionGateDescriptor,
    a: usize,
    b: usize,
    c: usize,
) -> Vec<GateInstance> {
    vec![
        t.on(b, c),
        GateInstance::swap(b, c),
        t.on(a, b),
        GateInstance::swap(b, c),
        t.on(a, b),
    ]
}

/// `T(a,b)` then `T(b,c)`.
pub fn pentagon_pair(t: &FusionGateDescriptor, a: usize, b: usize, c: usize) -> Vec<GateInstance> {
    vec![t.on(a, b), t.on(b, c)]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Compress,
    Expand,
}

impl FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compress" => Ok(Rule::Compress),
            "expand" => Ok(Rule::Expand),
            other => Err(Error::InvalidParameter(format!(
                "unknown rule '{other}' (expected compress or expand)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteSite {
    pub gate_indices: Vec<usize>,
    pub wires: (usize, usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RewriteReport {
    pub rule: Rule,
    pub passes: usize,
    pub sites_found: usize,
    pub sites_rewritten: usize,
    pub gate_count_before: usize,
    pub gate_count_after: usize,
    pub depth_before: usize,
    pub depth_after: usize,
    pub equivalence_verified: bool,
    /// `None` when verification was skipped.
    pub phase_distance: Option<f64>,
}

fn is_swap_on(g: &GateInstance, b: usize, c: usize) -> bool {
    g.kind() == GateKind::Swap && (g.wires() == [b, c] || g.wires() == [c, b])
}

fn touches_any(g: &GateInstance, wires: &[usize]) -> bool {
    wires.iter().any(|&w| g.touches(w))
}

/// Leftmost-first, non-overlapping template matches.
pub fn find_compress_sites(c: &Circuit, t: &FusionGateDescriptor) -> Vec<RewriteSite> {
    let gates = c.gates();
    let mut used = HashSet::new();
    let mut sites = Vec::new();
    for start in 0..gates.len() {
        if used.contains(&start) || !t.matches(&gates[start]) {
            continue;
        }
        if let Some(site) = match_template(gates, start, t, &used) {
            used.extend(site.gate_indices.iter().copied());
            sites.push(site);
        }
    }
    sites
}

fn match_template(
    gates: &[GateInstance],
    start: usize,
    t: &FusionGateDescriptor,
    used: &HashSet<usize>,
) -> Option<RewriteSite> {
    let (b, c) = (gates[start].wires()[0], gates[start].wires()[1]);
    let mut a = None;
    let mut indices = vec![start];
    let mut j = start + 1;
    while indices.len() < 5 && j < gates.len() {
        let g = &gates[j];
        j += 1;
        if !touches_any(g, &[b, c]) {
            continue;
        }
        if used.contains(&(j - 1)) {
            return None;
        }
        let ok = match indices.len() {
            1 | 3 => is_swap_on(g, b, c),
            2 => {
                let hit = t.matches(g) && g.wires()[1] == b && g.wires()[0] != c;
                if hit {
                    a = Some(g.wires()[0]);
                }
                hit
            }
            4 => t.matches(g) && g.wires() == [a.expect("bound at step 2"), b],
            _ => unreachable!(),
        };
        if !ok {
            return None;
        }
        indices.push(j - 1);
    }
    if indices.len() < 5 {
        return None;
    }
    let a = a.expect("bound at step 2");
    let (first, last) = (indices[0], indices[4]);
    let blocked = (first + 1..last)
        .filter(|k| !indices.contains(k))
        .any(|k| touches_any(&gates[k], &[a, b, c]));
    (!blocked).then_some(RewriteSite {
        gate_indices: indices,
        wires: (a, b, c),
    })
}

/// Leftmost-first, non-overlapping `T(a,b) … T(b,c)` pairs.
pub fn find_expand_sites(c: &Circuit, t: &FusionGateDescriptor) -> Vec<RewriteSite> {
    let gates = c.gates();
    let mut used = HashSet::new();
    let mut sites = Vec::new();
    for start in 0..gates.len() {
        if used.contains(&start) || !t.matches(&gates[start]) {
            continue;
        }
        let (a, b) = (gates[start].wires()[0], gates[start].wires()[1]);
        let Some(next) = (start + 1..gates.len()).find(|&k| touches_any(&gates[k], &[a, b])) else {
            continue;
        };
        let g = &gates[next];
        if used.contains(&next) || !t.matches(g) || g.wires()[0] != b || g.wires()[1] == a {
            continue;
        }
        let cw = g.wires()[1];
        if (start + 1..next).any(|k| gates[k].touches(cw)) {
            continue;
        }
        used.insert(start);
        used.insert(next);
        sites.push(RewriteSite {
            gate_indices: vec![start, next],
            wires: (a, b, cw),
        });
    }
    sites
}

fn apply_sites(
    c: &Circuit,
    t: &FusionGateDescriptor,
    rule: Rule,
    sites: &[RewriteSite],
) -> Circuit {
    let mut replaced = HashSet::new();
    let mut at_start = std::collections::HashMap::new();
    for s in sites {
        replaced.extend(s.gate_indices.iter().copied());
        let (a, b, cw) = s.wires;
        let new = match rule {
            Rule::Compress => pentagon_pair(t, a, b, cw),
            Rule::Expand => pentagon_template(t, a, b, cw),
        };
        at_start.insert(s.gate_indices[0], new);
    }
    let mut out = Vec::with_capacity(c.len());
    for (i, g) in c.gates().iter().enumerate() {
        if let Some(new) = at_start.remove(&i) {
            out.extend(new);
        } else if !replaced.contains(&i) {
            out.push(g.clone());
        }
    }
    Circuit::with_gates(c.num_qubits(), out).expect("wires come from the input circuit")
}

fn check_certified(t: &FusionGateDescriptor, tol: f64) -> Result<()> {
    let residual = t.certification.residual;
    if residual < tol {
        Ok(())
    } else {
        Err(Error::NotFusion { residual, tol })
    }
}

/// One pass: find, apply, optionally verify.
fn pass(
    c: &Circuit,
    t: &FusionGateDescriptor,
    rule: Rule,
    verify: bool,
    tol: f64,
) -> Result<(Circuit, usize, Option<f64>)> {
    let sites = match rule {
        Rule::Compress => find_compress_sites(c, t),
        Rule::Expand => find_expand_sites(c, t),
    };
    let out = apply_sites(c, t, rule, &sites);
    if !verify {
        return Ok((out, sites.len(), None));
    }
    let dist = circuit_phase_distance(c, &out)?;
    if dist < tol {
        return Ok((out, sites.len(), Some(dist)));
    }
    // Locate the first site whose rewrite breaks equivalence on its own.
    let site = sites.iter().position(|s| {
        let single = apply_sites(c, t, rule, std::slice::from_ref(s));
        circuit_phase_distance(c, &single).map_or(true, |d| d >= tol)
    });
    Err(Error::VerificationFailed {
        site,
        phase_distance: dist,
        tol,
    })
}

/// Rewrites `c` with `rule`. With `fixed_point`, repeats passes until no site
/// is found (expansion is capped at [`MAX_EXPAND_PASSES`]). On verification
/// failure nothing is returned but the error.
pub fn rewrite(
    c: &Circuit,
    t: &FusionGateDescriptor,
    rule: Rule,
    verify: bool,
    fixed_point: bool,
    tol: f64,
) -> Result<(Circuit, RewriteReport)> {
    check_certified(t, tol)?;
    let mut current = c.clone();
    let mut passes = 0;
    let mut sites_found = 0;
    loop {
        let (next, found, _) = pass(&current, t, rule, verify, tol)?;
        passes += 1;
        sites_found += found;
        current = next;
        let cap = rule == Rule::Expand && passes >= MAX_EXPAND_PASSES;
        if !fixed_point || found == 0 || cap {
            break;
        }
    }
    let phase_distance = if verify {
        Some(circuit_phase_distance(c, &current)?)
    } else {
        None
    };
    if let Some(d) = phase_distance {
        if d >= tol {
            return Err(Error::VerificationFailed {
                site: None,
                phase_distance: d,
                tol,
            });
        }
    }
    let report = RewriteReport {
        rule,
        passes,
        sites_found,
        sites_rewritten: sites_found,
        gate_count_before: c.len(),
        gate_count_after: current.len(),
        depth_before: c.depth(),
        depth_after: current.depth(),
        equivalence_verified: verify,
        phase_distance,
    };
    Ok((current, report))
}

pub fn compress(
    c: &Circuit,
    t: &FusionGateDescriptor,
    verify: bool,
    tol: f64,
) -> Result<(Circuit, RewriteReport)> {
    rewrite(c, t, Rule::Compress, verify, false, tol)
}

pub fn expand(
    c: &Circuit,
    t: &FusionGateDescriptor,
    verify: bool,
    tol: f64,
) -> Result<(Circuit, RewriteReport)> {
    rewrite(c, t, Rule::Expand, verify, false, tol)
}

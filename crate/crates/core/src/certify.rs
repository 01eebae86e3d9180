//! Fusion-operator certification, the A-gate / Heisenberg constraint
//! systems, parameter-grid scans and pattern-search refinement.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::equations::{pentagon_residual, Equation};
use crate::error::{Error, Result};
use crate::gates::{a_gate, heisenberg_evolution, AGateParams, HeisenbergParams};
use crate::tensor::{unitarity_deviation, ComplexMatrix, C64};

const FOUR_PI: f64 = 4.0 * PI;
const MAX_WITNESSES: usize = 5;

pub(crate) fn serialize_c64<S: Serializer>(z: &C64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

/// Name and parameters of the gate under test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateDescriptor {
    pub name: String,
    pub params: Vec<f64>,
}

impl GateDescriptor {
    pub fn new(name: impl Into<String>, params: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            params,
        }
    }

    pub fn custom() -> Self {
        Self::new("custom", Vec::new())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Fusion,
    NotFusion,
}

/// One entrywise disagreement between the two sides of the pentagon
/// equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    #[serde(serialize_with = "serialize_c64")]
    pub lhs: C64,
    #[serde(serialize_with = "serialize_c64")]
    pub rhs: C64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub gate_descriptor: GateDescriptor,
    pub equation: Equation,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
}

impl CertificationReport {
    pub fn is_fusion(&self) -> bool {
        self.verdict == Verdict::Fusion
    }
}

/// Certifies `t` (a `d² × d²` unitary) as a fusion operator.
pub fn certify(t: &ComplexMatrix, d: usize, tol: f64) -> Result<CertificationReport> {
    certify_gate(GateDescriptor::custom(), t, d, tol)
}

pub fn certify_gate(
    descriptor: GateDescriptor,
    t: &ComplexMatrix,
    d: usize,
    tol: f64,
) -> Result<CertificationReport> {
    if d == 0 || t.shape() != (d * d, d * d) {
        return Err(Error::DimensionMismatch {
            op: "certify",
            expected: format!("{0}x{0} operator for local dimension {d}", d * d),
            found: format!("{}x{}", t.rows(), t.cols()),
        });
    }
    let deviation = unitarity_deviation(t)?;
    if deviation >= tol {
        return Err(Error::NonUnitary { deviation, tol });
    }
    let eq = pentagon_residual(t, d)?;
    let mut mismatches: Vec<Witness> = Vec::new();
    for r in 0..eq.lhs.rows() {
        for c in 0..eq.lhs.cols() {
            let (lhs, rhs) = (eq.lhs.get(r, c), eq.rhs.get(r, c));
            if (lhs - rhs).norm() >= tol {
                mismatches.push(Witness {
                    row: r,
                    col: c,
                    lhs,
                    rhs,
                });
            }
        }
    }
    // largest first, ties broken by position
    mismatches.sort_by(|a, b| {
        (b.lhs - b.rhs)
            .norm()
            .total_cmp(&(a.lhs - a.rhs).norm())
            .then((a.row, a.col).cmp(&(b.row, b.col)))
    });
    mismatches.truncate(MAX_WITNESSES);
    let verdict = if eq.residual < tol {
        Verdict::Fusion
    } else {
        Verdict::NotFusion
    };
    Ok(CertificationReport {
        gate_descriptor: descriptor,
        equation: Equation::Pentagon,
        residual: eq.residual,
        tolerance: tol,
        verdict,
        witnesses: mismatches,
    })
}

/// Which parametrized two-qubit family a parameter triple belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GateFamily {
    #[serde(rename = "a_gate")]
    AGate,
    #[serde(rename = "heisenberg")]
    Heisenberg,
}

impl GateFamily {
    pub fn matrix(self, p: [f64; 3]) -> ComplexMatrix {
        match self {
            GateFamily::AGate => a_gate(AGateParams::new(p[0], p[1], p[2])),
            GateFamily::Heisenberg => heisenberg_evolution(HeisenbergParams::new(p[0], p[1], p[2])),
        }
    }

    pub fn point(self, p: [f64; 3]) -> ParameterPoint {
        match self {
            GateFamily::AGate => ParameterPoint::AGate(AGateParams::new(p[0], p[1], p[2])),
            GateFamily::Heisenberg => {
                ParameterPoint::Heisenberg(HeisenbergParams::new(p[0], p[1], p[2]))
            }
        }
    }
}

impl FromStr for GateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "a_gate" | "A" => Ok(GateFamily::AGate),
            "heis" | "heisenberg" | "HEIS" => Ok(GateFamily::Heisenberg),
            other => Err(Error::InvalidParameter(format!(
                "unknown gate family '{other}'"
            ))),
        }
    }
}

impl fmt::Display for GateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateFamily::AGate => "a_gate",
            GateFamily::Heisenberg => "heisenberg",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParameterPoint {
    AGate(AGateParams),
    Heisenberg(HeisenbergParams),
}

/// Entrywise `|LHS − RHS|` of the pentagon equation at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstraintResiduals {
    pub parameter_point: ParameterPoint,
    pub entry_residuals: Vec<Vec<f64>>,
    pub tolerance: f64,
    pub active_count: usize,
    pub max_residual: f64,
}

impl ConstraintResiduals {
    fn evaluate(point: ParameterPoint, u: &ComplexMatrix, tol: f64) -> Self {
        let eq = pentagon_residual(u, 2).expect("two-qubit family");
        let entry_residuals = eq.entry_residuals();
        let flat = entry_residuals.iter().flatten();
        let active_count = flat.clone().filter(|&&x| x > tol).count();
        let max_residual = flat.fold(0.0f64, |m, &x| m.max(x));
        Self {
            parameter_point: point,
            entry_residuals,
            tolerance: tol,
            active_count,
            max_residual,
        }
    }

    /// Positions whose residual exceeds the tolerance.
    pub fn active_positions(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (r, row) in self.entry_residuals.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x > self.tolerance {
                    out.push((r, c));
                }
            }
        }
        out
    }
}

pub fn a_gate_constraints(p: AGateParams, tol: f64) -> ConstraintResiduals {
    ConstraintResiduals::evaluate(ParameterPoint::AGate(p), &a_gate(p), tol)
}

pub fn heisenberg_constraints(p: HeisenbergParams, tol: f64) -> ConstraintResiduals {
    ConstraintResiduals::evaluate(ParameterPoint::Heisenberg(p), &heisenberg_evolution(p), tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorClass {
    IdentityUpToTolerance,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionPoint {
    pub family: GateFamily,
    pub parameters: [f64; 3],
    pub residual: f64,
    pub canonical_parameters: [f64; 3],
    pub operator_class: OperatorClass,
}

impl SolutionPoint {
    fn new(family: GateFamily, parameters: [f64; 3], residual: f64, tol: f64) -> Self {
        let u = family.matrix(parameters);
        let class = if (&u - &ComplexMatrix::identity(4)).frobenius_norm() < tol {
            OperatorClass::IdentityUpToTolerance
        } else {
            OperatorClass::Other
        };
        Self {
            family,
            parameters,
            residual,
            canonical_parameters: parameters.map(canonical_angle),
            operator_class: class,
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        self.family.matrix(self.parameters)
    }
}

/// Reduces an angle into `[0, 4π)`, snapping values within 1e-9 of either
/// end to 0.
pub fn canonical_angle(x: f64) -> f64 {
    let r = x.rem_euclid(FOUR_PI);
    if r < 1e-9 || FOUR_PI - r < 1e-9 {
        0.0
    } else {
        r
    }
}

/// Inclusive grid `lo, lo + step, …` up to `hi` (with 1e-9 relative slack).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl AxisRange {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err(Error::EmptyGrid(
                "range bounds and step must be finite".into(),
            ));
        }
        if step <= 0.0 {
            return Err(Error::EmptyGrid(format!(
                "step must be positive, got {step}"
            )));
        }
        if hi < lo {
            return Err(Error::EmptyGrid(format!("empty range {lo}:{hi}")));
        }
        Ok(Self { lo, hi, step })
    }

    /// `[lo, hi)` sampled at `step`.
    pub fn half_open(lo: f64, hi: f64, step: f64) -> Result<Self> {
        let r = Self::new(lo, hi, step)?;
        let n = ((hi - lo) / step - 1e-9).ceil() as usize;
        if n == 0 {
            return Err(Error::EmptyGrid(format!("empty range [{lo}, {hi})")));
        }
        Ok(Self {
            hi: lo + (n - 1) as f64 * step,
            ..r
        })
    }

    pub fn len(&self) -> usize {
        ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.lo + i as f64 * self.step)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanGrid {
    pub axes: [AxisRange; 3],
}

impl ScanGrid {
    pub fn uniform(axis: AxisRange) -> Self {
        Self { axes: [axis; 3] }
    }

    /// `[−2π, 2π)` per axis at step π/8.
    pub fn default_grid() -> Self {
        Self::uniform(AxisRange::half_open(-2.0 * PI, 2.0 * PI, PI / 8.0).expect("valid"))
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(AxisRange::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<[f64; 3]> {
        let [a, b, c] = self.axes;
        let mut out = Vec::with_capacity(self.len());
        for x in a.points() {
            for y in b.points() {
                for z in c.points() {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }
}

pub const DEFAULT_SCAN_TOL: f64 = 1e-9;

/// Returns one representative per operator class of grid points whose
/// pentagon residual is below `tol`, sorted by canonical parameters.
/// Runs on the rayon pool; see [`scan_serial`] for a single-threaded run.
pub fn scan(family: GateFamily, grid: &ScanGrid, tol: f64) -> Result<Vec<SolutionPoint>> {
    let hits: Vec<SolutionPoint> = grid
        .points()
        .into_par_iter()
        .filter_map(|p| evaluate_point(family, p, tol))
        .collect();
    Ok(merge_solutions(hits, tol))
}

pub fn scan_serial(family: GateFamily, grid: &ScanGrid, tol: f64) -> Result<Vec<SolutionPoint>> {
    let hits: Vec<SolutionPoint> = grid
        .points()
        .into_iter()
        .filter_map(|p| evaluate_point(family, p, tol))
        .collect();
    Ok(merge_solutions(hits, tol))
}

fn evaluate_point(family: GateFamily, p: [f64; 3], tol: f64) -> Option<SolutionPoint> {
    let residual = pentagon_residual(&family.matrix(p), 2).ok()?.residual;
    (residual < tol).then(|| SolutionPoint::new(family, p, residual, tol))
}

fn lex_cmp(a: &[f64; 3], b: &[f64; 3]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

fn merge_solutions(mut hits: Vec<SolutionPoint>, tol: f64) -> Vec<SolutionPoint> {
    hits.sort_by(|a, b| {
        lex_cmp(&a.canonical_parameters, &b.canonical_parameters)
            .then(lex_cmp(&a.parameters, &b.parameters))
    });
    let mut classes: Vec<(SolutionPoint, ComplexMatrix)> = Vec::new();
    for hit in hits {
        let u = hit.matrix();
        if !classes
            .iter()
            .any(|(_, rep)| (&u - rep).frobenius_norm() < tol)
        {
            classes.push((hit, u));
        }
    }
    classes.into_iter().map(|(p, _)| p).collect()
}

/// Result of [`refine`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RefineOutcome {
    Converged {
        point: SolutionPoint,
        iterations: usize,
    },
    Stagnated {
        best: [f64; 3],
        residual: f64,
        iterations: usize,
    },
}

impl RefineOutcome {
    pub fn converged(&self) -> Option<&SolutionPoint> {
        match self {
            RefineOutcome::Converged { point, .. } => Some(point),
            RefineOutcome::Stagnated { .. } => None,
        }
    }
}

const REFINE_INITIAL_STEP: f64 = 0.25;
const REFINE_MIN_STEP: f64 = 1e-12;

/// Compass search on the pentagon residual over the three parameters.
///
/// Each iteration polls the six axis directions at the current step and
/// moves to the best improving neighbour; if none improves, the step is
/// halved. Stops when the residual drops below `tol`, when the step falls
/// below 1e-12, or after `max_iters` iterations.
pub fn refine(
    p0: [f64; 3],
    family: GateFamily,
    max_iters: usize,
    tol: f64,
) -> Result<RefineOutcome> {
    if p0.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "starting point must be finite, got {p0:?}"
        )));
    }
    let objective = |p: [f64; 3]| {
        pentagon_residual(&family.matrix(p), 2)
            .map(|r| r.residual)
            .unwrap_or(f64::INFINITY)
    };
    let mut x = p0;
    let mut fx = objective(x);
    let mut step = REFINE_INITIAL_STEP;
    let mut iterations = 0;
    while fx >= tol && step >= REFINE_MIN_STEP && iterations < max_iters {
        iterations += 1;
        let mut best = (x, fx);
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut y = x;
                y[axis] += sign * step;
                let fy = objective(y);
                if fy < best.1 {
                    best = (y, fy);
                }
            }
        }
        if best.1 < fx {
            (x, fx) = best;
        } else {
            step *= 0.5;
        }
    }
    if fx < tol {
        Ok(RefineOutcome::Converged {
            point: SolutionPoint::new(family, x, fx, tol),
            iterations,
        })
    } else {
        Ok(RefineOutcome::Stagnated {
            best: x,
            residual: fx,
            iterations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{cnot, swap};
    use crate::tensor::{random_unitary, ONE};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    const TOL: f64 = 1e-10;

    #[test]
    fn certify_examples() {
        let id = certify(&ComplexMatrix::identity(4), 2, TOL).unwrap();
        assert_eq!(id.verdict, Verdict::Fusion);
        assert_eq!(id.residual, 0.0);
        assert!(id.witnesses.is_empty());

        assert!(certify(&cnot(), 2, TOL).unwrap().is_fusion());

        let a = certify(&a_gate(AGateParams::new(PI / 2.0, 0.0, 0.0)), 2, TOL).unwrap();
        assert_eq!(a.verdict, Verdict::NotFusion);
        // 8x8 oracle value
        assert!(
            (a.residual - 2.164784400584788).abs() < 1e-12,
            "{}",
            a.residual
        );
        assert_eq!(a.witnesses.len(), 5);
    }

    #[test]
    fn certify_refuses_non_unitary_and_bad_shapes() {
        let scaled = ComplexMatrix::identity(4).scale(C64::new(2.0, 0.0));
        assert!(matches!(
            certify(&scaled, 2, TOL),
            Err(Error::NonUnitary { .. })
        ));
        assert!(matches!(
            certify(&ComplexMatrix::identity(4), 3, TOL),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn certify_witnesses_are_sorted() {
        let r = certify(&swap(), 2, TOL).unwrap();
        assert_eq!(r.verdict, Verdict::NotFusion);
        let mags: Vec<f64> = r.witnesses.iter().map(|w| (w.lhs - w.rhs).norm()).collect();
        assert!(mags.windows(2).all(|w| w[0] >= w[1]));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["verdict"], "not_fusion");
        assert_eq!(json["witnesses"][0]["lhs"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn certify_verdict_matches_permutation_oracle() {
        // Basis-state tracing for permutation gates: both sides of the
        // pentagon equation are permutations of the 8 basis states.
        let perms: [[usize; 4]; 4] = [[0, 1, 3, 2], [0, 2, 1, 3], [1, 0, 2, 3], [0, 1, 2, 3]];
        for perm in perms {
            let t = ComplexMatrix::permutation(&perm);
            let apply = |p: &[usize; 4], hi: usize, lo: usize| {
                let out = p[hi * 2 + lo];
                (out >> 1, out & 1)
            };
            let mut agree = true;
            for s in 0..8 {
                let (x, y, z) = (s >> 2, (s >> 1) & 1, s & 1);
                // lhs: T12 then T23
                let (x1, y1) = apply(&perm, x, y);
                let (y2, z2) = apply(&perm, y1, z);
                let lhs = (x1, y2, z2);
                // rhs: T23, then T13, then T12
                let (ya, za) = apply(&perm, y, z);
                let (xb, zb) = apply(&perm, x, za);
                let (xc, yc) = apply(&perm, xb, ya);
                agree &= lhs == (xc, yc, zb);
            }
            assert_eq!(certify(&t, 2, TOL).unwrap().is_fusion(), agree, "{perm:?}");
        }
    }

    #[test]
    fn constraint_examples() {
        let zero = a_gate_constraints(AGateParams::new(0.0, 0.0, 0.0), TOL);
        assert_eq!(zero.max_residual, 0.0);
        assert_eq!(zero.active_count, 0);

        let odd = a_gate_constraints(AGateParams::new(0.0, 0.0, -2.0 * PI), TOL);
        assert!((odd.max_residual - 2.0).abs() < 1e-12);
        // -I: lhs = I, rhs = -I, so exactly the diagonal is active
        assert!((odd.entry_residuals[0][0] - 2.0).abs() < 1e-12);
        assert_eq!(odd.active_count, 8);

        let even = a_gate_constraints(AGateParams::new(0.0, 0.0, -4.0 * PI), TOL);
        assert!(even.max_residual < 1e-12);

        let h0 = heisenberg_constraints(HeisenbergParams::new(0.0, 0.0, 0.0), TOL);
        assert_eq!(h0.max_residual, 0.0);
        let h1 = heisenberg_constraints(HeisenbergParams::new(0.0, 0.0, -PI), TOL);
        assert!((h1.max_residual - 2.0).abs() < 1e-12);
        let h2 = heisenberg_constraints(HeisenbergParams::new(0.0, 0.0, -2.0 * PI), TOL);
        assert!(h2.max_residual < 1e-12);
    }

    #[test]
    fn constraint_support_is_parity_structured() {
        let c = a_gate_constraints(AGateParams::new(0.37, 1.21, -0.83), 1e-12);
        assert_eq!(c.active_count, 32);
        for (r, col) in c.active_positions() {
            // The A gate preserves 2-qubit parity, so only parity-matched
            // 3-qubit entries can be nonzero.
            assert_eq!((r.count_ones() + col.count_ones()) % 2, 0);
        }
    }

    #[test]
    fn constraint_verdict_agrees_with_certify() {
        let mut rng = StdRng::seed_from_u64(8);
        let mut points: Vec<AGateParams> = (0..50)
            .map(|_| {
                AGateParams::new(
                    rng.gen_range(-7.0..7.0),
                    rng.gen_range(-7.0..7.0),
                    rng.gen_range(-7.0..7.0),
                )
            })
            .collect();
        points.push(AGateParams::new(0.0, 0.0, 4.0 * PI));
        points.push(AGateParams::new(0.0, 0.0, 2.0 * PI));
        for p in points {
            let c = a_gate_constraints(p, TOL);
            let fusion = certify(&a_gate(p), 2, TOL).unwrap().is_fusion();
            assert_eq!(c.max_residual < TOL, fusion, "{p:?}");
        }
    }

    #[test]
    fn heisenberg_constraints_match_a_gate_constraints_under_doubling() {
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..100 {
            let p = HeisenbergParams::new(
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(-4.0..4.0),
            );
            let h = heisenberg_constraints(p, TOL);
            let a = a_gate_constraints(p.to_a_gate_params(), TOL);
            for (hr, ar) in h.entry_residuals.iter().zip(&a.entry_residuals) {
                for (x, y) in hr.iter().zip(ar) {
                    assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn axis_ranges() {
        assert_eq!(AxisRange::new(0.0, 0.0, 1.0).unwrap().len(), 1);
        assert_eq!(AxisRange::new(0.0, PI, PI / 2.0).unwrap().len(), 3);
        assert_eq!(AxisRange::new(0.0, 3.1416, 1.5708).unwrap().len(), 3);
        assert_eq!(ScanGrid::default_grid().axes[0].len(), 32);
        assert_eq!(ScanGrid::default_grid().len(), 32768);
        assert!(AxisRange::new(0.0, 1.0, 0.0).is_err());
        assert!(AxisRange::new(1.0, 0.0, 0.1).is_err());
        assert!(AxisRange::new(0.0, f64::NAN, 0.1).is_err());
        assert!(AxisRange::half_open(0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn canonical_angles() {
        assert_eq!(canonical_angle(0.0), 0.0);
        assert_eq!(canonical_angle(-7e-15), 0.0);
        assert_eq!(canonical_angle(4.0 * PI), 0.0);
        assert!((canonical_angle(-PI) - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn scan_examples() {
        let single = ScanGrid::uniform(AxisRange::new(0.0, 0.0, 1.0).unwrap());
        let s = scan(GateFamily::AGate, &single, DEFAULT_SCAN_TOL).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].residual, 0.0);

        let small = ScanGrid::uniform(AxisRange::new(0.0, PI, PI / 2.0).unwrap());
        let s = scan(GateFamily::AGate, &small, DEFAULT_SCAN_TOL).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].parameters, [0.0, 0.0, 0.0]);
        assert_eq!(s[0].operator_class, OperatorClass::IdentityUpToTolerance);

        // Oracle: exhaustive certify over the 27 points.
        let oracle: Vec<[f64; 3]> = small
            .points()
            .into_iter()
            .filter(|&p| {
                certify(&a_gate(AGateParams::new(p[0], p[1], p[2])), 2, 1e-9)
                    .unwrap()
                    .is_fusion()
            })
            .collect();
        assert_eq!(oracle, vec![[0.0, 0.0, 0.0]]);
    }

    #[test]
    fn quarter_pi_scan_excludes_minus_identity() {
        let grid = ScanGrid::uniform(AxisRange::half_open(-2.0 * PI, 2.0 * PI, PI / 4.0).unwrap());
        let sols = scan(GateFamily::AGate, &grid, 1e-9).unwrap();
        assert!(!sols.is_empty());
        let i4 = ComplexMatrix::identity(4);
        for s in &sols {
            assert!(s.matrix().approx_eq(&i4, 1e-9), "{s:?}");
        }
        // (0, 0, -2π) gives -I: not a solution
        assert!(
            !certify(&a_gate(AGateParams::new(0.0, 0.0, -2.0 * PI)), 2, 1e-9)
                .unwrap()
                .is_fusion()
        );
    }

    #[test]
    fn scan_is_worker_count_independent_and_shift_invariant() {
        let grid = ScanGrid::uniform(AxisRange::half_open(-2.0 * PI, 2.0 * PI, PI / 4.0).unwrap());
        let par = scan(GateFamily::Heisenberg, &grid, 1e-9).unwrap();
        let ser = scan_serial(GateFamily::Heisenberg, &grid, 1e-9).unwrap();
        assert_eq!(par, ser);

        let shifted =
            ScanGrid::uniform(AxisRange::half_open(2.0 * PI, 6.0 * PI, PI / 4.0).unwrap());
        let a = scan(GateFamily::AGate, &grid, 1e-9).unwrap();
        let b = scan(GateFamily::AGate, &shifted, 1e-9).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!(x.matrix().approx_eq(&y.matrix(), 1e-9));
        }
    }

    #[test]
    fn refine_examples() {
        let near = refine([1e-3, -1e-3, 1e-3], GateFamily::AGate, 10_000, TOL).unwrap();
        let p = near.converged().expect("converges near the identity");
        assert!(p.residual < TOL);
        assert!(p.parameters.iter().all(|x| x.abs() < 1e-2));
        assert!(certify(&p.matrix(), 2, TOL).unwrap().is_fusion());

        match refine([0.0; 3], GateFamily::AGate, 10, TOL).unwrap() {
            RefineOutcome::Converged { iterations, point } => {
                assert_eq!(iterations, 0);
                assert_eq!(point.residual, 0.0);
            }
            other => panic!("{other:?}"),
        }

        assert!(refine([f64::NAN, 0.0, 0.0], GateFamily::AGate, 10, TOL).is_err());
    }

    #[test]
    fn refine_from_far_start_is_pinned() {
        // Regression fixture: from (π/2, π/2, 0) the compass search walks
        // into the identity basin and converges in 83 iterations.
        let out = refine([PI / 2.0, PI / 2.0, 0.0], GateFamily::AGate, 10_000, TOL).unwrap();
        let RefineOutcome::Converged { point, iterations } = out else {
            panic!("expected convergence, got {out:?}");
        };
        assert_eq!(iterations, 83);
        assert_eq!(point.canonical_parameters, [0.0, 0.0, 0.0]);
        assert_eq!(point.operator_class, OperatorClass::IdentityUpToTolerance);
        assert!(certify(&point.matrix(), 2, TOL).unwrap().is_fusion());
    }

    #[test]
    fn refine_reports_stagnation_when_budget_runs_out() {
        let out = refine([PI / 2.0, PI / 2.0, 0.0], GateFamily::AGate, 5, TOL).unwrap();
        match out {
            RefineOutcome::Stagnated {
                residual,
                iterations,
                ..
            } => {
                assert_eq!(iterations, 5);
                assert!(residual >= TOL);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn refine_heisenberg_family() {
        let out = refine([0.01, 0.02, -0.01], GateFamily::Heisenberg, 10_000, TOL).unwrap();
        assert!(out.converged().is_some());
    }

    #[test]
    fn random_unitaries_are_not_fusion() {
        let mut rng = StdRng::seed_from_u64(10);
        for _ in 0..20 {
            let u = random_unitary(4, &mut rng);
            assert!(!certify(&u, 2, TOL).unwrap().is_fusion());
        }
        let minus = cnot().scale(-ONE);
        assert!(!certify(&minus, 2, TOL).unwrap().is_fusion());
    }
}

//! Gate constructors: Pauli and rotation gates, the standard gates, the
//! XX/YY/ZZ exponentials, the A and B gates, the two-site Heisenberg
//! evolution operator, and permutation fusion operators from finite groups.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64, I, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            _ => Err(Error::InvalidAxis(s.to_string())),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

pub fn pauli(axis: Axis) -> ComplexMatrix {
    match axis {
        Axis::X => ComplexMatrix::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        Axis::Y => ComplexMatrix::from_rows(&[[ZERO, -I], [I, ZERO]]),
        Axis::Z => ComplexMatrix::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// `cos(θ/2)·I − i·sin(θ/2)·σ_axis`.
pub fn rotation(axis: Axis, theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let id = ComplexMatrix::identity(2).scale(C64::new(c, 0.0));
    &id + &pauli(axis).scale(C64::new(0.0, -s))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardGate {
    H,
    S,
    Cnot,
    Swap,
}

impl FromStr for StandardGate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "H" => Ok(StandardGate::H),
            "S" => Ok(StandardGate::S),
            "CNOT" | "CX" => Ok(StandardGate::Cnot),
            "SWAP" => Ok(StandardGate::Swap),
            _ => Err(Error::UnknownGate(s.to_string())),
        }
    }
}

pub fn standard_gate(gate: StandardGate) -> ComplexMatrix {
    match gate {
        StandardGate::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            ComplexMatrix::from_real_rows(&[[h, h], [h, -h]])
        }
        StandardGate::S => ComplexMatrix::diagonal(&[ONE, I]),
        StandardGate::Cnot => ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]),
        StandardGate::Swap => ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]),
    }
}

pub fn standard_gate_by_name(name: &str) -> Result<ComplexMatrix> {
    Ok(standard_gate(name.parse()?))
}

pub fn cnot() -> ComplexMatrix {
    standard_gate(StandardGate::Cnot)
}

pub fn swap() -> ComplexMatrix {
    standard_gate(StandardGate::Swap)
}

/// `e^{i c/2 σx⊗σx}`.
pub fn xx(c1: f64) -> ComplexMatrix {
    let (s, c) = (c1 / 2.0).sin_cos();
    let (d, o) = (C64::new(c, 0.0), C64::new(0.0, s));
    ComplexMatrix::from_rows(&[
        [d, ZERO, ZERO, o],
        [ZERO, d, o, ZERO],
        [ZERO, o, d, ZERO],
        [o, ZERO, ZERO, d],
    ])
}

/// `e^{i c/2 σy⊗σy}`.
pub fn yy(c2: f64) -> ComplexMatrix {
    let (s, c) = (c2 / 2.0).sin_cos();
    let (d, o) = (C64::new(c, 0.0), C64::new(0.0, s));
    ComplexMatrix::from_rows(&[
        [d, ZERO, ZERO, -o],
        [ZERO, d, o, ZERO],
        [ZERO, o, d, ZERO],
        [-o, ZERO, ZERO, d],
    ])
}

/// `e^{i c/2 σz⊗σz}`.
pub fn zz(c3: f64) -> ComplexMatrix {
    let p = C64::from_polar(1.0, c3 / 2.0);
    ComplexMatrix::diagonal(&[p, p.conj(), p.conj(), p])
}

/// Parameters of the A gate, in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AGateParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl AGateParams {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Self {
        Self { c1, c2, c3 }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.c1, self.c2, self.c3]
    }
}

/// Two-site Heisenberg angles `θ_a = J_a·t` (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergParams {
    pub theta_x: f64,
    pub theta_y: f64,
    pub theta_z: f64,
}

impl HeisenbergParams {
    pub fn new(theta_x: f64, theta_y: f64, theta_z: f64) -> Self {
        Self {
            theta_x,
            theta_y,
            theta_z,
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.theta_x, self.theta_y, self.theta_z]
    }

    /// A-gate parameters describing the same operator. Each factor
    /// `e^{iθ_a σa⊗σa}` is the A-gate exponential at `c_a = 2θ_a`, so the
    /// map is a plain doubling; the closed form then depends on
    /// `θx − θy`, `θx + θy` and `θz`.
    pub fn to_a_gate_params(self) -> AGateParams {
        AGateParams::new(2.0 * self.theta_x, 2.0 * self.theta_y, 2.0 * self.theta_z)
    }
}

/// Closed form of the A gate (product of the three commuting exponentials).
pub fn a_gate(p: AGateParams) -> ComplexMatrix {
    let (sm, cm) = ((p.c1 - p.c2) / 2.0).sin_cos();
    let (sp, cp) = ((p.c1 + p.c2) / 2.0).sin_cos();
    let ep = C64::from_polar(1.0, p.c3 / 2.0);
    let em = ep.conj();
    let (a, b) = (ep * cm, I * ep * sm);
    let (c, d) = (em * cp, I * em * sp);
    ComplexMatrix::from_rows(&[
        [a, ZERO, ZERO, b],
        [ZERO, c, d, ZERO],
        [ZERO, d, c, ZERO],
        [b, ZERO, ZERO, a],
    ])
}

pub fn b_gate() -> ComplexMatrix {
    &xx(PI / 2.0) * &yy(PI / 4.0)
}

/// `e^{iθ σa⊗σa} = cos θ·I + i sin θ·σa⊗σa`.
pub fn heisenberg_component(axis: Axis, theta: f64) -> ComplexMatrix {
    let sigma = pauli(axis);
    let coupling = sigma.kron(&sigma);
    let (s, c) = theta.sin_cos();
    &ComplexMatrix::identity(4).scale(C64::new(c, 0.0)) + &coupling.scale(C64::new(0.0, s))
}

/// Two-site evolution operator `e^{iĤt}`, as the product of the three
/// component exponentials.
pub fn heisenberg_evolution(p: HeisenbergParams) -> ComplexMatrix {
    let x = heisenberg_component(Axis::X, p.theta_x);
    let y = heisenberg_component(Axis::Y, p.theta_y);
    let z = heisenberg_component(Axis::Z, p.theta_z);
    &(&z * &y) * &x
}

/// Multiplication table of a finite group on `{0..order}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    table: Vec<Vec<usize>>,
    identity_index: usize,
}

impl CayleyTable {
    /// Validates the Latin-square property, the existence of a two-sided
    /// identity, and associativity over all `order³` triples.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidCayleyTable("empty table".into()));
        }
        for (g, row) in table.iter().enumerate() {
            if row.len() != order {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {g} has {} entries, expected {order}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= order) {
                return Err(Error::InvalidCayleyTable(format!(
                    "entry {bad} in row {g} out of range"
                )));
            }
        }
        for i in 0..order {
            let mut row_seen = vec![false; order];
            let mut col_seen = vec![false; order];
            for j in 0..order {
                row_seen[table[i][j]] = true;
                col_seen[table[j][i]] = true;
            }
            if row_seen.contains(&false) {
                return Err(Error::InvalidCayleyTable(format!(
                    "row {i} is not a permutation"
                )));
            }
            if col_seen.contains(&false) {
                return Err(Error::InvalidCayleyTable(format!(
                    "column {i} is not a permutation"
                )));
            }
        }
        let identity_index = (0..order)
            .find(|&e| (0..order).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidCayleyTable("no identity element".into()))?;
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidCayleyTable(format!(
                            "not associative at ({a}, {b}, {c})"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            order,
            table,
            identity_index,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity_index(&self) -> usize {
        self.identity_index
    }

    pub fn product(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Self::new(table).expect("cyclic group table is valid")
    }

    pub fn direct_product(a: &CayleyTable, b: &CayleyTable) -> Self {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let table = (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| a.product(x / nb, y / nb) * nb + b.product(x % nb, y % nb))
                    .collect()
            })
            .collect();
        Self::new(table).expect("direct product of groups is a group")
    }

    /// Symmetric group on `k` letters; elements are permutations in
    /// lexicographic order and `g·h` is the composition `g ∘ h`.
    pub fn symmetric(k: usize) -> Self {
        let perms = permutations(k);
        let index = |p: &Vec<usize>| perms.iter().position(|q| q == p).unwrap();
        let table = perms
            .iter()
            .map(|g| {
                perms
                    .iter()
                    .map(|h| index(&h.iter().map(|&i| g[i]).collect()))
                    .collect()
            })
            .collect();
        Self::new(table).expect("symmetric group table is valid")
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// The fusion operator `(id ⊗ m) ∘ (δ ⊗ id)` of the group algebra, with
/// `δ(g) = g ⊗ g`: on basis vectors `g ⊗ h ↦ g ⊗ gh`.
pub fn group_algebra_fusion(g: &CayleyTable) -> ComplexMatrix {
    let n = g.order();
    let perm: Vec<usize> = (0..n * n)
        .map(|j| {
            let (a, b) = (j / n, j % n);
            a * n + g.product(a, b)
        })
        .collect();
    ComplexMatrix::permutation(&perm)
}

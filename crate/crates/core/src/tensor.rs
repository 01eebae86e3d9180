//! Dense complex matrices and the handful of tensor operations the rest of
//! the crate is built on.
//!
//! Qubit convention: in a register of `n` qubits, wire 0 is the leftmost
//! (most significant) tensor factor, so basis index `i` carries the state of
//! wire `w` in bit `n - 1 - w`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest operator dimension the crate will build (2^12).
pub const MAX_DIM: usize = 1 << 12;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                found: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for
    /// literal gate tables.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows[0].as_ref().len();
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged matrix literal");
            data.extend_from_slice(r);
        }
        Self {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    /// Permutation matrix sending basis vector `j` to `perm[j]`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.data[i * n + j] = ONE;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                expected: format!("{} rows", self.cols),
                found: format!("{} rows", other.rows),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = ComplexMatrix::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.data[(i * other.rows + k) * cols + j * other.cols + l] =
                            a * other.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.get(i, j).conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise `|self - other|`, with its position.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<(usize, usize, f64)> {
        self.check_same_shape(other, "max_abs_diff")?;
        let mut best = (0, 0, 0.0);
        for (idx, (a, b)) in self.data.iter().zip(&other.data).enumerate() {
            let d = (a - b).norm();
            if d > best.2 {
                best = (idx / self.cols, idx % self.cols, d);
            }
        }
        Ok(best)
    }

    /// Entrywise comparison with an absolute tolerance; `tol = 0` is exact
    /// equality. Shape mismatch compares unequal.
    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.shape() == other.shape()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).norm() <= tol)
    }

    /// True when every entry is exactly 0 or 1 with one 1 per row and column.
    pub fn is_permutation(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut col_seen = vec![false; n];
        for r in 0..n {
            let mut ones = 0;
            for (c, seen) in col_seen.iter_mut().enumerate() {
                let v = self.get(r, c);
                if v == ONE {
                    ones += 1;
                    if *seen {
                        return false;
                    }
                    *seen = true;
                } else if v != ZERO {
                    return false;
                }
            }
            if ones != 1 {
                return false;
            }
        }
        true
    }

    /// Applies `gate` to the listed wires of every column, i.e. replaces
    /// `self` by `embed(gate, wires) * self` without forming the embedding.
    pub fn apply_on_wires(&mut self, gate: &ComplexMatrix, wires: &WireSet) -> Result<()> {
        let n = wires.register_size();
        let k = wires.len();
        if self.rows != 1 << n {
            return Err(Error::DimensionMismatch {
                op: "apply_on_wires",
                expected: format!("{} rows", 1usize << n),
                found: format!("{} rows", self.rows),
            });
        }
        check_gate_dim(gate, k, "apply_on_wires")?;
        let offsets = wires.offsets();
        let mask = offsets.iter().fold(0, |acc, &o| acc | o);
        let dk = 1 << k;
        let mut buf = vec![ZERO; dk];
        for col in 0..self.cols {
            for base in (0..self.rows).filter(|b| b & mask == 0) {
                for s in 0..dk {
                    buf[s] = self.data[(base | offsets[s]) * self.cols + col];
                }
                for (r, &off) in offsets.iter().enumerate() {
                    let v: C64 = gate.row(r).iter().zip(&buf).map(|(g, x)| g * x).sum();
                    self.data[(base | off) * self.cols + col] = v;
                }
            }
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &ComplexMatrix, op: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op,
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub fn checked_sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other, "sub")?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

fn check_gate_dim(gate: &ComplexMatrix, k: usize, op: &'static str) -> Result<()> {
    let dk = 1usize << k;
    if gate.shape() != (dk, dk) {
        return Err(Error::DimensionMismatch {
            op,
            expected: format!("{dk}x{dk} operator for {k} wires"),
            found: format!("{}x{}", gate.rows, gate.cols),
        });
    }
    Ok(())
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

// Operator impls panic on shape mismatch; use `matmul` / `checked_sub` for
// fallible variants.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs)
            .expect("matrix difference shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "matrix sum shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Ordered, duplicate-free list of wires inside a register.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireSet {
    wires: Vec<usize>,
    register_size: usize,
}

impl WireSet {
    pub fn new(wires: Vec<usize>, register_size: usize) -> Result<Self> {
        if register_size == 0 {
            return Err(Error::InvalidWires("register size must be positive".into()));
        }
        for (i, &w) in wires.iter().enumerate() {
            if w >= register_size {
                return Err(Error::InvalidWires(format!(
                    "wire {w} out of range for a {register_size}-qubit register"
                )));
            }
            if wires[..i].contains(&w) {
                return Err(Error::InvalidWires(format!("duplicate wire {w}")));
            }
        }
        Ok(Self {
            wires,
            register_size,
        })
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    pub fn len(&self) -> usize {
        self.wires.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wires.is_empty()
    }

    pub fn register_size(&self) -> usize {
        self.register_size
    }

    /// Basis-index offset of each sub-index; sub-index bit `k - 1 - j` is
    /// the state of `wires[j]`.
    fn offsets(&self) -> Vec<usize> {
        let n = self.register_size;
        let k = self.wires.len();
        (0..1usize << k)
            .map(|s| {
                self.wires.iter().enumerate().fold(0, |acc, (j, &w)| {
                    if (s >> (k - 1 - j)) & 1 == 1 {
                        acc | 1 << (n - 1 - w)
                    } else {
                        acc
                    }
                })
            })
            .collect()
    }

    fn sub_index(&self, i: usize) -> usize {
        let n = self.register_size;
        self.wires
            .iter()
            .fold(0, |acc, &w| (acc << 1) | ((i >> (n - 1 - w)) & 1))
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    a.frobenius_norm()
}

/// The `d^2 x d^2` permutation `x ⊗ y ↦ y ⊗ x`.
pub fn twist(d: usize) -> ComplexMatrix {
    assert!(d >= 1, "twist dimension must be positive");
    let perm: Vec<usize> = (0..d * d).map(|j| (j % d) * d + j / d).collect();
    ComplexMatrix::permutation(&perm)
}

/// Lifts `op` to the full register of `target`, acting on the listed wires
/// in listed order and as the identity elsewhere.
pub fn embed(op: &ComplexMatrix, target: &WireSet) -> Result<ComplexMatrix> {
    check_gate_dim(op, target.len(), "embed")?;
    let n = target.register_size();
    let dim = 1usize << n;
    if dim > MAX_DIM {
        return Err(Error::RegisterTooLarge { qubits: n, max: 12 });
    }
    let mask = target.offsets().iter().fold(0, |acc, &o| acc | o);
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        let sr = target.sub_index(r);
        for c in (0..dim).filter(|c| (c & !mask) == (r & !mask)) {
            out.data[r * dim + c] = op.get(sr, target.sub_index(c));
        }
    }
    Ok(out)
}

pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unitarity_deviation(a)? < tol)
}

/// `‖A†A − I‖_F`.
pub fn unitarity_deviation(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows,
            cols: a.cols,
        });
    }
    let gram = &a.adjoint() * a;
    Ok((&gram - &ComplexMatrix::identity(a.rows)).frobenius_norm())
}

/// `min_{|φ|=1} ‖A − φB‖_F`.
///
/// The minimizing phase is `tr(B†A)/|tr(B†A)|`; the norm is then evaluated
/// directly rather than through `√(‖A‖² + ‖B‖² − 2|tr(A†B)|)`, which cancels
/// catastrophically when `A ≈ φB`.
pub fn phase_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    a.check_same_shape(b, "phase_distance")?;
    let overlap: C64 = a.data.iter().zip(&b.data).map(|(x, y)| y.conj() * x).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    Ok(a.data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Haar-ish random unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gaussian_c64(rng)).collect())
        .collect();
    for j in 0..dim {
        for k in 0..j {
            let proj: C64 = cols[k]
                .iter()
                .zip(&cols[j])
                .map(|(q, v)| q.conj() * v)
                .sum();
            let qk = cols[k].clone();
            for (v, q) in cols[j].iter_mut().zip(&qk) {
                *v -= proj * q;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for v in cols[j].iter_mut() {
            *v /= norm;
        }
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            m.set(i, j, v);
        }
    }
    m
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    // Box–Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = 2.0 * std::f64::consts::PI * u2;
    C64::new(r * t.cos(), r * t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]])
    }

    fn swap() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ])
    }

    #[test]
    fn matmul_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(matmul(&i2, &i2).unwrap(), i2);
        assert_eq!(matmul(&sigma_x(), &sigma_x()).unwrap(), i2);
        assert_eq!(
            matmul(&swap(), &swap()).unwrap(),
            ComplexMatrix::identity(4)
        );
    }

    #[test]
    fn matmul_rejects_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            matmul(&a, &b),
            Err(Error::DimensionMismatch { op: "matmul", .. })
        ));
    }

    #[test]
    fn new_checks_entry_count() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::new(0, 2, vec![]).is_err());
        assert!(ComplexMatrix::new(1, 2, vec![ONE; 2]).is_ok());
    }

    #[test]
    fn kron_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zz = kron(&sigma_z(), &sigma_z());
        let expected = ComplexMatrix::diagonal(&[ONE, -ONE, -ONE, ONE]);
        assert_eq!(zz, expected);
    }

    #[test]
    fn kron_is_associative_exactly() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_unitary(2, &mut rng);
            let b = random_unitary(2, &mut rng);
            let c = random_unitary(2, &mut rng);
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            // (a*b)*c vs a*(b*c) differ only in rounding of a triple product
            assert!(left.approx_eq(&right, 1e-15));
        }
    }

    #[test]
    fn twist_examples() {
        assert_eq!(twist(1), ComplexMatrix::identity(1));
        assert_eq!(twist(2), swap());
        let t3 = twist(3);
        assert_eq!(&t3 * &t3, ComplexMatrix::identity(9));
        assert!(t3.is_permutation());
        assert_eq!(t3.adjoint(), t3);
    }

    #[test]
    fn twist_swaps_tensor_factors() {
        let mut rng = StdRng::seed_from_u64(3);
        for d in 1..=4 {
            let a = random_unitary(d, &mut rng);
            let b = random_unitary(d, &mut rng);
            let t = twist(d);
            let lhs = &(&t * &kron(&a, &b)) * &t;
            assert!(lhs.approx_eq(&kron(&b, &a), 1e-13));
        }
    }

    #[test]
    fn embed_examples() {
        let i8 = ComplexMatrix::identity(8);
        let w01 = WireSet::new(vec![0, 1], 3).unwrap();
        assert_eq!(embed(&ComplexMatrix::identity(4), &w01).unwrap(), i8);

        let mut rng = StdRng::seed_from_u64(11);
        let t = random_unitary(4, &mut rng);
        let i2 = ComplexMatrix::identity(2);
        assert!(embed(&t, &w01).unwrap().approx_eq(&kron(&t, &i2), 0.0));

        let w02 = WireSet::new(vec![0, 2], 3).unwrap();
        let tau = kron(&i2, &twist(2));
        let expected = &(&tau * &kron(&t, &i2)) * &tau;
        assert!(embed(&t, &w02).unwrap().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn embed_respects_wire_order() {
        let cnot = ComplexMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]);
        let reversed = embed(&cnot, &WireSet::new(vec![1, 0], 2).unwrap()).unwrap();
        let expected = &(&swap() * &cnot) * &swap();
        assert_eq!(reversed, expected);
    }

    #[test]
    fn embed_rejects_mismatch() {
        let w = WireSet::new(vec![0], 2).unwrap();
        assert!(embed(&ComplexMatrix::identity(4), &w).is_err());
        assert!(WireSet::new(vec![0, 0], 2).is_err());
        assert!(WireSet::new(vec![2], 2).is_err());
    }

    #[test]
    fn apply_on_wires_matches_embed() {
        let mut rng = StdRng::seed_from_u64(5);
        for wires in [vec![0, 2], vec![3, 1], vec![2], vec![1, 3, 0]] {
            let ws = WireSet::new(wires.clone(), 4).unwrap();
            let u = random_unitary(1 << wires.len(), &mut rng);
            let base = random_unitary(16, &mut rng);
            let mut applied = base.clone();
            applied.apply_on_wires(&u, &ws).unwrap();
            let expected = &embed(&u, &ws).unwrap() * &base;
            assert!(applied.approx_eq(&expected, 1e-13));
        }
    }

    #[test]
    fn norm_and_unitarity_examples() {
        assert_eq!(frobenius_norm(&ComplexMatrix::identity(4)), 2.0);
        assert!(is_unitary(&swap(), 1e-12).unwrap());
        let two = ComplexMatrix::identity(2).scale(C64::new(2.0, 0.0));
        assert!(!is_unitary(&two, 1e-12).unwrap());
        let dev = unitarity_deviation(&two).unwrap();
        assert!((dev - 3.0 * 2f64.sqrt()).abs() < 1e-14);
        assert!(matches!(
            is_unitary(&ComplexMatrix::zeros(2, 3), 1e-12),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn phase_distance_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(phase_distance(&i4, &i4).unwrap(), 0.0);
        assert_eq!(phase_distance(&i4, &(-&i4)).unwrap(), 0.0);
        let d = phase_distance(&ComplexMatrix::identity(2), &sigma_z()).unwrap();
        assert!((d - 2.0).abs() < 1e-15);
        assert!(phase_distance(&i4, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn phase_distance_agrees_with_closed_form() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..50 {
            let a = random_unitary(4, &mut rng);
            let b = random_unitary(4, &mut rng);
            let overlap = (&a.adjoint() * &b).trace().norm();
            let closed = (a.frobenius_norm().powi(2) + b.frobenius_norm().powi(2) - 2.0 * overlap)
                .max(0.0)
                .sqrt();
            assert!((phase_distance(&a, &b).unwrap() - closed).abs() < 1e-10);
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = StdRng::seed_from_u64(1);
        for dim in [1, 2, 4, 8, 16] {
            assert!(is_unitary(&random_unitary(dim, &mut rng), 1e-12).unwrap());
        }
    }
}

//! Pentagon, Yang–Baxter and 3-cocycle equations as matrix residuals on
//! `V ⊗ V ⊗ V`.
//!
//! All products here are in operator order: the rightmost factor acts first.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::tensor::{twist, ComplexMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Pentagon,
    Ybe,
    Ybe13,
    Cocycle3,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntryMismatch {
    pub row: usize,
    pub col: usize,
    pub magnitude: f64,
}

/// Both sides of an evaluated equation with their Frobenius distance.
#[derive(Clone, Debug)]
pub struct EquationResidual {
    pub equation: Equation,
    pub residual: f64,
    pub lhs: ComplexMatrix,
    pub rhs: ComplexMatrix,
    pub max_entry_mismatch: EntryMismatch,
}

impl EquationResidual {
    fn from_sides(equation: Equation, lhs: ComplexMatrix, rhs: ComplexMatrix) -> Self {
        let diff = &lhs - &rhs;
        let (row, col, magnitude) = lhs.max_abs_diff(&rhs).expect("sides share a shape");
        Self {
            equation,
            residual: diff.frobenius_norm(),
            lhs,
            rhs,
            max_entry_mismatch: EntryMismatch {
                row,
                col,
                magnitude,
            },
        }
    }

    /// `|lhs − rhs|` entrywise.
    pub fn entry_residuals(&self) -> Vec<Vec<f64>> {
        (0..self.lhs.rows())
            .map(|r| {
                (0..self.lhs.cols())
                    .map(|c| (self.lhs.get(r, c) - self.rhs.get(r, c)).norm())
                    .collect()
            })
            .collect()
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.residual < tol
    }
}

impl Serialize for EquationResidual {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("EquationResidual", 3)?;
        st.serialize_field("equation", &self.equation)?;
        st.serialize_field("residual", &self.residual)?;
        st.serialize_field("max_entry_mismatch", &self.max_entry_mismatch)?;
        st.end()
    }
}

fn check_local_dim(t: &ComplexMatrix, d: usize, op: &'static str) -> Result<()> {
    if d == 0 || t.shape() != (d * d, d * d) {
        return Err(Error::DimensionMismatch {
            op,
            expected: format!("{0}x{0} operator for local dimension {d}", d * d),
            found: format!("{}x{}", t.rows(), t.cols()),
        });
    }
    Ok(())
}

/// `T ⊗ id`.
pub fn lift12(t: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_local_dim(t, d, "lift12")?;
    Ok(t.kron(&ComplexMatrix::identity(d)))
}

/// `id ⊗ T`.
pub fn lift23(t: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_local_dim(t, d, "lift23")?;
    Ok(ComplexMatrix::identity(d).kron(t))
}

/// `(id ⊗ τ)⁻¹ ∘ (T ⊗ id) ∘ (id ⊗ τ)`; τ is an involution so the inverse is
/// τ itself.
pub fn lift13(t: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    check_local_dim(t, d, "lift13")?;
    let tau = ComplexMatrix::identity(d).kron(&twist(d));
    Ok(&(&tau * &lift12(t, d)?) * &tau)
}

/// `T₂₃T₁₂ = T₁₂T₁₃T₂₃`.
pub fn pentagon_residual(t: &ComplexMatrix, d: usize) -> Result<EquationResidual> {
    let (t12, t13, t23) = (lift12(t, d)?, lift13(t, d)?, lift23(t, d)?);
    let lhs = &t23 * &t12;
    let rhs = &(&t12 * &t13) * &t23;
    Ok(EquationResidual::from_sides(Equation::Pentagon, lhs, rhs))
}

/// Braid form `R₁₂R₂₃R₁₂ = R₂₃R₁₂R₂₃`.
pub fn ybe_residual(r: &ComplexMatrix, d: usize) -> Result<EquationResidual> {
    let (r12, r23) = (lift12(r, d)?, lift23(r, d)?);
    let lhs = &(&r12 * &r23) * &r12;
    let rhs = &(&r23 * &r12) * &r23;
    Ok(EquationResidual::from_sides(Equation::Ybe, lhs, rhs))
}

/// `R₁₂R₁₃R₂₃ = R₂₃R₁₃R₁₂`.
pub fn ybe13_residual(r: &ComplexMatrix, d: usize) -> Result<EquationResidual> {
    let (r12, r13, r23) = (lift12(r, d)?, lift13(r, d)?, lift23(r, d)?);
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    Ok(EquationResidual::from_sides(Equation::Ybe13, lhs, rhs))
}

/// `(T'⊗id)(id⊗τ)(T'⊗id) = (id⊗T')(T'⊗id)(id⊗T')`.
pub fn cocycle3_residual(tp: &ComplexMatrix, d: usize) -> Result<EquationResidual> {
    let (t12, t23) = (lift12(tp, d)?, lift23(tp, d)?);
    let tau23 = ComplexMatrix::identity(d).kron(&twist(d));
    let lhs = &(&t12 * &tau23) * &t12;
    let rhs = &(&t23 * &t12) * &t23;
    Ok(EquationResidual::from_sides(Equation::Cocycle3, lhs, rhs))
}

/// `τ ∘ T`.
pub fn twisted(t: &ComplexMatrix, d: usize) -> Result<ComplexMatrix> {
    if t.rows() != d * d {
        return Err(Error::DimensionMismatch {
            op: "twisted",
            expected: format!("{} rows", d * d),
            found: format!("{} rows", t.rows()),
        });
    }
    twist(d).matmul(t)
}

/// Whether "T is a fusion operator ⇔ τ∘T satisfies the 3-cocycle
/// condition" holds for this `T` at tolerance `tol`.
pub fn check_street_duality(t: &ComplexMatrix, d: usize, tol: f64) -> Result<bool> {
    let fusion = pentagon_residual(t, d)?.holds(tol);
    let cocycle = cocycle3_residual(&twisted(t, d)?, d)?.holds(tol);
    Ok(fusion == cocycle)
}

/// Whether "R solves the braid YBE ⇔ τ∘R solves R₁₂R₁₃R₂₃ = R₂₃R₁₃R₁₂"
/// holds for this `R` at tolerance `tol`.
pub fn check_folklore_duality(r: &ComplexMatrix, d: usize, tol: f64) -> Result<bool> {
    let braid = ybe_residual(r, d)?.holds(tol);
    let qybe = ybe13_residual(&twisted(r, d)?, d)?.holds(tol);
    Ok(braid == qybe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{a_gate, cnot, swap, AGateParams};
    use crate::tensor::{embed, WireSet};

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn lift_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(lift12(&i4, 2).unwrap(), ComplexMatrix::identity(8));
        // Exchange of wires 1 and 3: |x,y,z> -> |z,y,x>.
        let perm: Vec<usize> = (0..8)
            .map(|j| ((j & 1) << 2) | (j & 2) | (j >> 2))
            .collect();
        assert_eq!(
            lift13(&swap(), 2).unwrap(),
            ComplexMatrix::permutation(&perm)
        );
        let t = a_gate(AGateParams::new(0.3, -1.2, 2.0));
        let w12 = WireSet::new(vec![1, 2], 3).unwrap();
        assert!(lift23(&t, 2)
            .unwrap()
            .approx_eq(&embed(&t, &w12).unwrap(), 0.0));
        let w02 = WireSet::new(vec![0, 2], 3).unwrap();
        assert!(lift13(&t, 2)
            .unwrap()
            .approx_eq(&embed(&t, &w02).unwrap(), 1e-15));
    }

    #[test]
    fn lift_rejects_wrong_dimension() {
        assert!(lift12(&ComplexMatrix::identity(4), 3).is_err());
        assert!(pentagon_residual(&ComplexMatrix::identity(3), 2).is_err());
        assert!(lift13(&ComplexMatrix::identity(1), 0).is_err());
    }

    #[test]
    fn pentagon_examples() {
        assert_eq!(
            pentagon_residual(&ComplexMatrix::identity(4), 2)
                .unwrap()
                .residual,
            0.0
        );
        assert!(pentagon_residual(&cnot(), 2).unwrap().residual < 1e-12);
        let sw = pentagon_residual(&swap(), 2).unwrap();
        assert!((sw.residual - 2.0 * SQRT2).abs() < 1e-12);
        assert_eq!(sw.max_entry_mismatch.magnitude, 1.0);
    }

    #[test]
    fn ybe_examples() {
        assert!(ybe_residual(&swap(), 2).unwrap().residual < 1e-12);
        assert!(
            ybe_residual(&ComplexMatrix::identity(4), 2)
                .unwrap()
                .residual
                < 1e-12
        );
        let cn = ybe_residual(&cnot(), 2).unwrap().residual;
        assert!((cn - 2.0 * 3f64.sqrt()).abs() < 1e-12, "{cn}");
    }

    #[test]
    fn ybe13_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(ybe13_residual(&i4, 2).unwrap().residual, 0.0);
        let tau_swap = twisted(&swap(), 2).unwrap();
        assert_eq!(tau_swap, i4);
        assert_eq!(ybe13_residual(&tau_swap, 2).unwrap().residual, 0.0);
        // SWAP itself also solves this form (oracle value 0).
        assert_eq!(ybe13_residual(&swap(), 2).unwrap().residual, 0.0);
        assert!(ybe13_residual(&cnot(), 2).unwrap().residual > 1.0);
    }

    #[test]
    fn cocycle_examples() {
        assert_eq!(cocycle3_residual(&swap(), 2).unwrap().residual, 0.0);
        let tau_cnot = twisted(&cnot(), 2).unwrap();
        assert_eq!(cocycle3_residual(&tau_cnot, 2).unwrap().residual, 0.0);
        let i = cocycle3_residual(&ComplexMatrix::identity(4), 2)
            .unwrap()
            .residual;
        assert!((i - 2.0 * SQRT2).abs() < 1e-12);
    }

    #[test]
    fn duality_examples() {
        assert!(check_street_duality(&cnot(), 2, 1e-10).unwrap());
        assert!(check_street_duality(&swap(), 2, 1e-10).unwrap());
        assert!(check_folklore_duality(&swap(), 2, 1e-10).unwrap());
        assert!(check_street_duality(&ComplexMatrix::identity(3), 2, 1e-10).is_err());
    }

    #[test]
    fn pentagon_phase_sensitivity() {
        let minus = cnot().scale(-crate::tensor::ONE);
        let r = pentagon_residual(&minus, 2).unwrap().residual;
        assert!((r - 4.0 * SQRT2).abs() < 1e-12);
    }

    #[test]
    fn residual_entries_and_serialization() {
        let r = pentagon_residual(&swap(), 2).unwrap();
        let entries = r.entry_residuals();
        let fro: f64 = entries.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        assert!((fro - r.residual).abs() < 1e-15);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["equation"], "pentagon");
    }
}

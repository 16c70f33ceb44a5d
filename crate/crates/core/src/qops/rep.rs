//! Fock space of the q-oscillator and the Verma module `V_J⁺`, materialized
//! on the first `dim` basis vectors.

use crate::rmatrix::WeightParam;
use crate::scalars::{bracket, int, pow, Matrix, Scalar};

/// `F_q⁺` truncated to `|0⟩ .. |dim-1⟩`. Columns are kets.
#[derive(Clone, Debug)]
pub struct FockRep {
    pub q: Scalar,
    pub dim: usize,
}

impl FockRep {
    pub fn new(q: Scalar, dim: usize) -> Self {
        FockRep { q, dim }
    }

    /// `a⁺|n⟩ = |n+1⟩`
    pub fn a_plus(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |r, c| if r == c + 1 { int(1) } else { int(0) })
    }

    /// `a⁻|n⟩ = (1 - q^{2n})|n-1⟩`
    pub fn a_minus(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |r, c| {
            if c == r + 1 {
                int(1) - pow(&self.q, 2 * c as i64)
            } else {
                int(0)
            }
        })
    }

    /// `q^{eN}`
    pub fn q_n(&self, e: i64) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |r, c| if r == c { pow(&self.q, e * r as i64) } else { int(0) })
    }

    /// `⟨m| op |n⟩`
    pub fn bra_ket(op: &Matrix, m: usize, n: usize) -> Scalar {
        op[(m, n)].clone()
    }
}

/// `π_J⁺` on `v_0 .. v_{dim-1}`.
#[derive(Clone, Debug)]
pub struct VermaRep {
    pub weight: WeightParam,
    pub q: Scalar,
    pub dim: usize,
}

impl VermaRep {
    pub fn new(weight: WeightParam, q: Scalar, dim: usize) -> Self {
        VermaRep { weight, q, dim }
    }

    fn x(&self) -> Scalar {
        self.weight.x(&self.q)
    }

    /// `E v_j = [q^j]/[q] v_{j-1}`
    pub fn e(&self) -> Matrix {
        let bq = bracket(&self.q);
        Matrix::from_fn(self.dim, self.dim, |r, c| {
            if c == r + 1 {
                bracket(&pow(&self.q, c as i64)) / &bq
            } else {
                int(0)
            }
        })
    }

    /// `F v_j = [q^{J-j}]/[q] v_{j+1}`
    pub fn f(&self) -> Matrix {
        let bq = bracket(&self.q);
        let x = self.x();
        Matrix::from_fn(self.dim, self.dim, |r, c| {
            if r == c + 1 {
                bracket(&(&x * pow(&self.q, -(c as i64)))) / &bq
            } else {
                int(0)
            }
        })
    }

    /// `q^{eH}`, `H v_j = (J - 2j) v_j`
    pub fn q_h(&self, e: i64) -> Matrix {
        let x = self.x();
        Matrix::from_fn(self.dim, self.dim, |r, c| {
            if r == c {
                pow(&x, e) * pow(&self.q, -2 * e * r as i64)
            } else {
                int(0)
            }
        })
    }

    /// `C = [q]² F E + {q^{H+1}}`
    pub fn casimir(&self) -> Matrix {
        let bq = bracket(&self.q);
        let fe = self.f().mul(&self.e()).scale(&(&bq * &bq));
        let brace = self.q_h(1).scale(&self.q).add(&self.q_h(-1).scale(&self.q.recip()));
        fe.add(&brace)
    }

    /// `{q^{J+1}}`
    pub fn casimir_value(&self) -> Scalar {
        let y = self.x() * &self.q;
        &y + y.recip()
    }
}

//! The I = 1 L-operator on `C² ⊗ V_J⁺`.

use super::WeightParam;
use crate::error::{Error, Result};
use crate::scalars::{bracket, pow, Matrix, Scalar, ScalarContext};
use num_traits::Zero;

/// Entries depend on μ only through `ν = μ q^{J/2}` and on `J` through `x = q^J`.
#[derive(Clone, Debug)]
pub struct LOperator {
    nu: Scalar,
    x: Scalar,
    q: Scalar,
    weight: WeightParam,
}

/// `L(μ)` for weight `J`. Generic weights have no rational `q^{J/2}`; use
/// [`LOperator::from_nu`] for those.
pub fn l_operator_fundamental(mu: &Scalar, wj: &WeightParam, ctx: &ScalarContext) -> Result<LOperator> {
    if mu.is_zero() {
        return Err(Error::Domain("mu = 0".into()));
    }
    let k = wj.integral().ok_or_else(|| {
        Error::Domain("q^{J/2} is not rational for a generic weight; build from nu".into())
    })?;
    LOperator::from_nu(mu * ctx.qhalf(k)?, wj.clone(), ctx.q())
}

impl LOperator {
    pub fn from_nu(nu: Scalar, weight: WeightParam, q: &Scalar) -> Result<Self> {
        if nu.is_zero() {
            return Err(Error::Domain("nu = 0".into()));
        }
        Ok(LOperator {
            x: weight.x(q),
            nu,
            q: q.clone(),
            weight,
        })
    }

    pub fn nu(&self) -> &Scalar {
        &self.nu
    }

    pub fn weight(&self) -> &WeightParam {
        &self.weight
    }

    /// `⟨a, v_j| L |b, v_{j'}⟩`, `a, b ∈ {0, 1}`.
    pub fn element(&self, a: i64, j: i64, b: i64, jp: i64) -> Scalar {
        let (nu, x, q) = (&self.nu, &self.x, &self.q);
        if !self.weight.contains(j) || !self.weight.contains(jp) {
            return Scalar::zero();
        }
        match (a, b) {
            (0, 0) if j == jp => nu * pow(q, -j) - pow(q, j) / nu,
            (1, 1) if j == jp => nu * pow(q, j) / x - x * pow(q, -j) / nu,
            // μ [q] F q^{-H/2}
            (0, 1) if j == jp + 1 => nu / x * pow(q, jp) * bracket(&(x * pow(q, -jp))),
            // μ^{-1} [q] q^{H/2} E
            (1, 0) if j + 1 == jp => x / nu * pow(q, 1 - jp) * bracket(&pow(q, jp)),
            _ => Scalar::zero(),
        }
    }

    /// Dense block on `C² ⊗ span(v_0..v_n)`, row index `2 j + a`.
    pub fn matrix(&self, n: i64) -> Matrix {
        let d = (n + 1) as usize;
        Matrix::from_fn(2 * d, 2 * d, |r, c| {
            self.element((r % 2) as i64, (r / 2) as i64, (c % 2) as i64, (c / 2) as i64)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::frac;

    #[test]
    fn diagonal_entry_on_basis_vector() {
        let ctx = ScalarContext::new(frac(2, 3), frac(1, 2), frac(1, 1)).unwrap();
        let mu = frac(5, 7);
        let l = l_operator_fundamental(&mu, &WeightParam::NonNeg(3), &ctx).unwrap();
        for j in 0..=3 {
            let e = 3 - 2 * j;
            let want = &mu * ctx.qhalf(e).unwrap() - ctx.qhalf(-e).unwrap() / &mu;
            assert_eq!(l.element(0, j, 0, j), want);
        }
        assert!(l.element(0, 4, 0, 4).is_zero());
    }
}

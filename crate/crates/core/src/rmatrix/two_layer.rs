//! Two-layer projection of the 3D R-matrix.

use super::{m_of, sigma, Idx4, WeightParam};
use crate::error::{Error, Result};
pub use crate::scalars::SumPolicy;
use crate::scalars::{geometric_tail, int, pow, qpochhammer, Scalar, ScalarContext};
use num_traits::Zero;

/// Spectral parameter `w` and the four fields.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet {
    pub w: Scalar,
    pub phi_h: Scalar,
    pub phi_v: Scalar,
    pub psi_h: Scalar,
    pub psi_v: Scalar,
}

impl FieldSet {
    pub fn new(w: Scalar, phi_h: Scalar, phi_v: Scalar, psi_h: Scalar, psi_v: Scalar) -> Result<Self> {
        let f = FieldSet {
            w,
            phi_h,
            phi_v,
            psi_h,
            psi_v,
        };
        if [&f.w, &f.phi_h, &f.phi_v, &f.psi_h, &f.psi_v]
            .iter()
            .any(|x| x.is_zero())
        {
            return Err(Error::Domain("fields must be nonzero".into()));
        }
        Ok(f)
    }

    /// `w = λ², φ_h = φ², φ_v = 1, ψ_h = 1, ψ_v = λ`
    pub fn from_lambda_phi(lambda: &Scalar, phi: &Scalar) -> Result<Self> {
        FieldSet::new(lambda * lambda, phi * phi, int(1), int(1), lambda.clone())
    }

    /// Swap horizontal and vertical fields.
    pub fn transposed(&self) -> Self {
        FieldSet {
            w: self.w.clone(),
            phi_h: self.phi_v.clone(),
            phi_v: self.phi_h.clone(),
            psi_h: self.psi_v.clone(),
            psi_v: self.psi_h.clone(),
        }
    }
}

/// 3D R-matrix element `R_{n1,n2,n3}^{m1,m2,m3}` with `n3 = k + n3_off`,
/// `m3 = k + m3_off`, written as `Σ coef·base^k`.
fn r3_geometric(n1: i64, n2: i64, n3_off: i64, m1: i64, m3_off: i64, q: &Scalar) -> Result<Vec<(Scalar, Scalar)>> {
    let q2 = q * q;
    let pre = pow(q, n2 * (n2 + 1) - (n2 - m1) * (n2 - m3_off));
    let pb = pow(q, n2 - m1);
    let mut out = Vec::with_capacity(n2 as usize + 1);
    for r in 0..=n2 {
        let c = qpochhammer(&pow(q, -2 * m1), &q2, n2 - r)? / qpochhammer(&q2, &q2, n2 - r)?
            * qpochhammer(&pow(q, 2 + 2 * n1), &q2, r)?
            / qpochhammer(&q2, &q2, r)?
            * pow(q, -2 * r * (n3_off + m1 + 1));
        if !c.is_zero() {
            out.push((&pre * c, &pb * pow(q, -2 * r)));
        }
    }
    Ok(out)
}

/// Two-layer entry `[𝓡_{I,J}(w)]_{i,j}^{i',j'}` with the k₁-sum in closed form.
pub fn rij_two_layer(
    ix: &Idx4,
    big_i: u32,
    big_j: u32,
    f: &FieldSet,
    q: &Scalar,
    policy: SumPolicy,
) -> Result<Scalar> {
    let [i, j, ip, jp] = *ix;
    let (bi, bj) = (big_i as i64, big_j as i64);
    if !(0..=bi).contains(&i) || !(0..=bi).contains(&ip) || !(0..=bj).contains(&j) || !(0..=bj).contains(&jp) {
        return Err(Error::Domain(format!("index {ix:?} outside ({big_i}, {big_j})")));
    }
    if i + j != ip + jp {
        return Ok(Scalar::zero());
    }
    let k0 = 0.max(ip - i);
    let a = r3_geometric(j, i, 0, jp, i - ip, q)?;
    let b = r3_geometric(bj - j, bi - i, i - ip, bj - jp, 0, q)?;
    let mut s = Scalar::zero();
    for (ca, ba) in &a {
        for (cb, bb) in &b {
            let r = &f.w * ba * bb;
            s += ca * cb * geometric_tail(&r, k0, policy)?;
        }
    }
    Ok(pow(&f.phi_h, i) * pow(&f.phi_v, j) * pow(&f.psi_h, ip - i) * pow(&f.psi_v, jp - j) * s)
}

/// Normalized `R_{I,J}(λ;φ) = σ q^I φ^{-I} 𝓡(λ², φ², 1, 1, λ)`.
pub fn rij_two_layer_proper(ix: &Idx4, big_i: u32, big_j: u32, ctx: &ScalarContext) -> Result<Scalar> {
    let f = FieldSet::from_lambda_phi(ctx.lambda(), ctx.phi())?;
    let m = m_of(&WeightParam::NonNeg(big_i), &WeightParam::NonNeg(big_j)).expect("finite");
    let raw = rij_two_layer(ix, big_i, big_j, &f, ctx.q(), SumPolicy::Continued)?;
    if raw.is_zero() {
        return Ok(raw);
    }
    Ok(sigma(big_i, big_j, m, ctx)? * ctx.qpow(big_i as i64) * pow(ctx.phi(), -(big_i as i64)) * raw)
}

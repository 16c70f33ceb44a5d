//! Index-dependent parts of the three analytic formulas.
//!
//! Each core is the entry divided by a λ-power and an index-independent
//! constant, so it depends on λ only through λ² and never needs `q^{1/2}`.

use super::{Idx4, WeightParam};
use crate::error::{Error, Result};
use crate::scalars::{
    int, phi_regularized, phi_regularized_in, poch_in, pow, qpochhammer, sign, Jet, Ring, Scalar,
};
use num_traits::Zero;

fn div(a: Scalar, b: Scalar, what: &str) -> Result<Scalar> {
    if b.is_zero() {
        Err(Error::Pole(format!("{what} vanishes")))
    } else {
        Ok(a / b)
    }
}

/// Single sum times `λ^{i+i'}`; equals 1 at (0,0,0,0).
pub fn single_core(
    ix: &Idx4,
    xi: &Scalar,
    xj: &Scalar,
    lam2: &Scalar,
    phi: &Scalar,
    q: &Scalar,
) -> Result<Scalar> {
    let [i, j, ip, jp] = *ix;
    let q2 = q * q;
    let xj_m2 = pow(xj, -2);
    let pre = sign(i)
        * pow(phi, 2 * i)
        * pow(q, i * i - i + i * j + ip * jp)
        * pow(xj, -2 * i)
        * pow(xi, ip - j)
        * qpochhammer(&xj_m2, &q2, j)?
        * qpochhammer(&(xi / (xj * lam2)), &q2, j - ip)?;
    let den = qpochhammer(&xj_m2, &q2, jp)?
        * qpochhammer(&q2, &q2, i)?
        * qpochhammer(&(lam2 * xi * xj).recip(), &q2, i + j)?;
    let pre = div(pre, den, "single-sum denominator")?;
    let ph = phi_regularized(
        i as u32,
        &[pow(q, -2 * ip), xj / (xi * lam2), lam2 * &q2 * xj / xi],
        &[pow(xi, -2), pow(q, 2 * (1 + j - ip)), &q2 * xj * xj * pow(q, -2 * (i + j))],
        &q2,
        &q2,
    );
    Ok(pre * ph)
}

/// Double sum over (k, l) divided by `λ^{i-i'}` and its constant.
pub fn double_core(
    ix: &Idx4,
    big_i: u32,
    xj: &Scalar,
    lam2: &Scalar,
    phi: &Scalar,
    q: &Scalar,
) -> Result<Scalar> {
    let [i, j, ip, jp] = *ix;
    let bi = big_i as i64;
    let q2 = q * q;
    let poch = |x: &Scalar, n: i64| qpochhammer(x, &q2, n);
    let mut sum = Scalar::zero();
    for k in 0..=i {
        let a = poch(&pow(q, -2 * i), k)?
            * poch(&pow(q, 2 + 2 * j), k)?
            * poch(&pow(q, -2 * jp), i - k)?
            / poch(&q2, k)?;
        if a.is_zero() {
            continue;
        }
        for l in 0..=(bi - i) {
            let b = poch(&pow(q, -2 * (bi - i)), l)?
                * poch(&(xj * xj * pow(q, 2 - 2 * j)), l)?
                * poch(&(pow(xj, -2) * pow(q, 2 * jp)), bi - i - l)?
                / poch(&q2, l)?;
            if b.is_zero() {
                continue;
            }
            let res = int(1) - lam2 * pow(q, bi - 2 * k - 2 * l) / xj;
            let t = sign(k + l) * pow(q, 2 * k * (ip - j) + 2 * l * (bi + j - i) - k * (k + 1) - l * (l + 1))
                * pow(xj, -2 * l);
            sum += div(t * &a * b, res, "resonant factor 1 - λ²q^{I-J-2k-2l}")?;
        }
    }
    let pre = pow(phi, 2 * i) * pow(q, i * i - bi * jp + i * jp - ip * ip + ip * j) * pow(xj, -i)
        / (qpochhammer(&q2, &q2, i)? * qpochhammer(&q2, &q2, bi - i)?);
    Ok(pre * sum)
}

/// Residue coefficient `c(s)` in any ring, with `y = q^{2J}`.
fn pole_c<R: Ring>(ix: &Idx4, bi: i64, s: i64, y: &R, q: &Scalar) -> Result<R> {
    let [i, j, ip, jp] = *ix;
    let c = |x: Scalar| R::from_scalar(&x);
    let q2 = c(q * q);
    let yinv = y
        .inverse()
        .ok_or_else(|| Error::Pole("q^{2J} = 0".into()))?;
    let t1 = poch_in(&c(pow(q, 2 * (bi - s))).times(&yinv), &q2, jp - i)?;
    let base = c(pow(q, -2 * s)).times(&yinv);
    let t2 = poch_in(&base, &q2, bi)?;
    let t3 = poch_in(&base, &q2, i + j)?
        .inverse()
        .ok_or_else(|| Error::Pole("(q^{-2(s+J)}; q²)_{i+j} vanishes identically".into()))?;
    let ph = phi_regularized_in(
        i as u32,
        &[c(pow(q, -2 * ip)), c(pow(q, -2 * s)), y.times(&c(pow(q, 2 * (1 - bi + s))))],
        &[c(pow(q, -2 * bi)), c(pow(q, 2 * (1 + jp - i))), y.times(&c(pow(q, 2 * (1 - i - j))))],
        &q2,
        &q2,
    )?;
    Ok(t1.times(&t2).times(&t3).times(&ph))
}

/// Pole expansion divided by `λ^{i-i'}` and its constant.
///
/// For integer `J` the coefficients `c(s)` are taken as limits from generic `J`.
pub fn pole_core(
    ix: &Idx4,
    big_i: u32,
    wj: &WeightParam,
    lam2: &Scalar,
    phi: &Scalar,
    q: &Scalar,
) -> Result<Scalar> {
    let [i, j, ip, jp] = *ix;
    let bi = big_i as i64;
    let q2 = q * q;
    let xj = wj.x(q);
    let xj_m2 = pow(&xj, -2);
    let mut sum = Scalar::zero();
    for s in 0..=bi {
        let cs = match wj.integral() {
            Some(k) => pole_c(ix, bi, s, &Jet::variable(&pow(q, 2 * k)), q)?.value_at_zero()?,
            None => pole_c(ix, bi, s, &(&xj * &xj), q)?,
        };
        if cs.is_zero() {
            continue;
        }
        let res = int(1) - lam2 * pow(q, bi - 2 * s) / &xj;
        let w = sign(s) * pow(q, s * (s - 1) - 2 * i * s)
            / (qpochhammer(&q2, &q2, s)? * qpochhammer(&q2, &q2, bi - s)?);
        sum += div(w * cs, res, "resonant factor 1 - λ²q^{I-J-2s}")?;
    }
    let pre = sign(i)
        * pow(phi, 2 * i)
        * pow(q, i * i + i * bi - i + i * j + ip * bi + ip * jp - bi * j)
        * pow(&xj, -3 * i)
        * qpochhammer(&xj_m2, &q2, j)?;
    let den = qpochhammer(&xj_m2, &q2, jp)? * qpochhammer(&q2, &q2, i)?;
    Ok(div(pre, den, "(q^{-2J}; q²)_{j'}")? * sum)
}

use super::{Ring, Scalar};
use crate::error::{Error, Result};
use num_traits::{One, Signed, Zero};

/// `(x; q)_n` for signed `n`; negative `n` means `1/(x q^n; q)_{-n}`.
pub fn qpochhammer(x: &Scalar, q: &Scalar, n: i64) -> Result<Scalar> {
    poch_in(x, q, n)
}

pub fn poch_in<R: Ring>(x: &R, q: &R, n: i64) -> Result<R> {
    if n >= 0 {
        let mut acc = R::ring_one();
        let mut t = x.clone();
        for _ in 0..n {
            acc = acc.times(&R::ring_one().minus(&t));
            t = t.times(q);
        }
        Ok(acc)
    } else {
        let start = x.times(
            &q.powi(n)
                .ok_or_else(|| Error::Pole("q is not invertible".into()))?,
        );
        let d = poch_in(&start, q, -n)?;
        d.inverse()
            .ok_or_else(|| Error::Pole(format!("(x q^{n}; q)_{} vanishes", -n)))
    }
}

/// Terminating `_{r+1}φ_r(q^{-n}, a; b; q, z)`.
pub fn phi_terminating(
    n: u32,
    a: &[Scalar],
    b: &[Scalar],
    q: &Scalar,
    z: &Scalar,
) -> Result<Scalar> {
    assert_eq!(a.len(), b.len(), "parameter lists must have equal length");
    let qn = super::pow(q, -(n as i64));
    let mut term = Scalar::one();
    let mut sum = Scalar::one();
    let mut qk = Scalar::one();
    for k in 0..n {
        // term_{k+1}/term_k
        let mut num = (Scalar::one() - &qn * &qk) * z;
        let mut den = Scalar::one() - &qk * q;
        for (a_s, b_s) in a.iter().zip(b) {
            num *= Scalar::one() - a_s * &qk;
            den *= Scalar::one() - b_s * &qk;
        }
        if den.is_zero() {
            return Err(Error::Pole(format!(
                "lower parameter degenerates at k = {}",
                k + 1
            )));
        }
        term = term * num / den;
        sum += &term;
        qk *= q;
    }
    Ok(sum)
}

/// Regularized terminating series: `Σ_k z^k (q^{-n})_k/(q)_k Π_s (a_s)_k (b_s q^k)_{n-k}`.
/// Never divides by a lower-parameter Pochhammer.
pub fn phi_regularized(
    n: u32,
    a: &[Scalar],
    b: &[Scalar],
    q: &Scalar,
    z: &Scalar,
) -> Scalar {
    phi_regularized_in(n, a, b, q, z).expect("q is not a root of unity")
}

pub fn phi_regularized_in<R: Ring>(n: u32, a: &[R], b: &[R], q: &R, z: &R) -> Result<R> {
    assert_eq!(a.len(), b.len(), "parameter lists must have equal length");
    let n = n as usize;
    let mut qp = Vec::with_capacity(n + 1);
    qp.push(R::ring_one());
    for k in 1..=n {
        qp.push(qp[k - 1].times(q));
    }
    let qinv = q
        .inverse()
        .ok_or_else(|| Error::Pole("q is not invertible".into()))?;
    let q_minus_n = qinv.powi(n as i64).expect("invertible");
    // (a_s; q)_k for k = 0..=n
    let a_poch: Vec<Vec<R>> = a
        .iter()
        .map(|a_s| {
            let mut v = Vec::with_capacity(n + 1);
            v.push(R::ring_one());
            for k in 0..n {
                let next = v[k].times(&R::ring_one().minus(&a_s.times(&qp[k])));
                v.push(next);
            }
            v
        })
        .collect();
    // (b_s q^k; q)_{n-k} = Π_{t=k}^{n-1} (1 - b_s q^t), as suffix products
    let b_tail: Vec<Vec<R>> = b
        .iter()
        .map(|b_s| {
            let mut v = vec![R::ring_one(); n + 1];
            for t in (0..n).rev() {
                v[t] = v[t + 1].times(&R::ring_one().minus(&b_s.times(&qp[t])));
            }
            v
        })
        .collect();
    let mut sum = R::ring_zero();
    let mut ratio = R::ring_one(); // z^k (q^{-n})_k/(q)_k
    for k in 0..=n {
        if k > 0 {
            let num = R::ring_one()
                .minus(&q_minus_n.times(&qp[k - 1]))
                .times(z);
            let den = R::ring_one().minus(&qp[k]);
            let inv = den
                .inverse()
                .ok_or_else(|| Error::Pole("(q; q)_k vanishes".into()))?;
            ratio = ratio.times(&num).times(&inv);
        }
        let mut t = ratio.clone();
        for s in 0..a.len() {
            t = t.times(&a_poch[s][k]).times(&b_tail[s][k]);
        }
        sum = sum.plus(&t);
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumPolicy {
    /// Closed form of the resummed series, valid wherever it is finite.
    Continued,
    /// Require every geometric ratio to be below 1 in absolute value.
    Convergent,
}

/// `Σ_{n ≥ n0} r^n = r^{n0} / (1 - r)`.
pub fn geometric_tail(r: &Scalar, n0: i64, policy: SumPolicy) -> Result<Scalar> {
    if policy == SumPolicy::Convergent && r.abs() >= Scalar::one() {
        return Err(Error::Convergence(super::fmt_scalar(r)));
    }
    if r.is_one() {
        return Err(Error::Pole("geometric ratio equals 1".into()));
    }
    Ok(super::pow(r, n0) / (Scalar::one() - r))
}

//! Matrix elements of the local operators `A₋^{(I)}(λ)` and `A₊^{(I)}(λ)` on
//! `F_q ⊗ V_I`, indexed `(n, i; n', i')`.

use crate::error::{Error, Result};
use crate::rmatrix::WeightParam;
use crate::scalars::{phi_regularized, pow, qpochhammer, sign, Scalar, ScalarContext};
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QSign {
    Plus,
    Minus,
}

impl QSign {
    /// `+1` for `A₊`, `-1` for `A₋`.
    pub fn as_i64(self) -> i64 {
        match self {
            QSign::Plus => 1,
            QSign::Minus => -1,
        }
    }

    /// Fock shift `n' - n` forced by conservation.
    pub fn shift(self, i: i64, ip: i64) -> i64 {
        match self {
            QSign::Minus => i - ip,
            QSign::Plus => ip - i,
        }
    }
}

impl std::str::FromStr for QSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(QSign::Plus),
            "minus" | "-" => Ok(QSign::Minus),
            _ => Err(Error::Domain(format!("sign must be plus or minus, got {s}"))),
        }
    }
}

fn check(n: i64, i: i64, np: i64, ip: i64, w: &WeightParam) -> Result<()> {
    if n < 0 || np < 0 {
        return Err(Error::Domain(format!("Fock index ({n}, {np}) negative")));
    }
    if !w.contains(i) || !w.contains(ip) {
        return Err(Error::Domain(format!("index ({i}, {ip}) outside weight {w}")));
    }
    Ok(())
}

/// The ₃φ̄₂ shared by both operators; `b = q^{2(1+n-c)}`.
fn phi32(i: i64, ip: i64, x: &Scalar, c: i64, n: i64, ctx: &ScalarContext) -> Scalar {
    let q = ctx.q();
    let q2 = q * q;
    let lam = ctx.lambda();
    phi_regularized(
        i as u32,
        &[pow(q, -2 * ip), lam * lam * q / x],
        &[pow(x, -2), pow(q, 2 * (1 + n - c))],
        &q2,
        &q2,
    )
}

/// `[A₋^{(I)}(λ)]_{n,i}^{n',i'}` for a finite weight.
pub fn a_minus_element(n: i64, i: i64, np: i64, ip: i64, w: &WeightParam, ctx: &ScalarContext) -> Result<Scalar> {
    check(n, i, np, ip, w)?;
    let big_i = w
        .finite()
        .ok_or_else(|| Error::Domain("use a_minus_rational for a generic weight".into()))? as i64;
    if i + n != ip + np {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let q2 = q * q;
    let lam = ctx.lambda();
    let x = pow(q, big_i);
    let pre = pow(ctx.phi(), 2 * n)
        * pow(lam, i - big_i)
        * pow(q, i * big_i + i * ip + n * (big_i - i - ip))
        * qpochhammer(&(lam * lam * pow(q, 1 - big_i + 2 * (ip - n))), &q2, big_i - i - ip)?
        / qpochhammer(&q2, &q2, i)?;
    Ok(pre * phi32(i, ip, &x, ip, n, ctx))
}

/// `A₋` with the index-independent factor `(-λ)^I (λ^{-2} q^{1-I}; q²)_I` removed.
///
/// Rational in `x = q^I`, so it extends to generic weights.
pub fn a_minus_rational(n: i64, i: i64, np: i64, ip: i64, w: &WeightParam, ctx: &ScalarContext) -> Result<Scalar> {
    check(n, i, np, ip, w)?;
    if i + n != ip + np {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let q2 = q * q;
    let lam = ctx.lambda();
    let x = w.x(q);
    let l2inv = pow(lam, -2);
    let e = ip - i - 2 * n;
    let ratio = qpochhammer(&(&l2inv * q * &x), &q2, n - ip)? / qpochhammer(&(&l2inv * q / &x), &q2, n + i)?;
    let pre = pow(ctx.phi(), 2 * n)
        * sign(i + ip)
        * pow(lam, -i - 2 * ip)
        * pow(&x, i + n + e)
        * pow(q, i * ip - n * (i + ip) - e * (i + ip))
        * ratio
        / qpochhammer(&q2, &q2, i)?;
    Ok(pre * phi32(i, ip, &x, ip, n, ctx))
}

/// The factor removed by [`a_minus_rational`], for a finite weight.
pub fn a_minus_stripped_factor(big_i: u32, ctx: &ScalarContext) -> Result<Scalar> {
    let q = ctx.q();
    let lam = ctx.lambda();
    let bi = big_i as i64;
    Ok(pow(&-lam, bi) * qpochhammer(&(pow(lam, -2) * pow(q, 1 - bi)), &(q * q), bi)?)
}

/// `[A₊^{(I)}(λ)]_{n,i}^{n',i'}`; analytic in `q^I`.
pub fn a_plus_element(n: i64, i: i64, np: i64, ip: i64, w: &WeightParam, ctx: &ScalarContext) -> Result<Scalar> {
    check(n, i, np, ip, w)?;
    if i + np != ip + n {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let q2 = q * q;
    let lam = ctx.lambda();
    let x = w.x(q);
    let pre = pow(ctx.phi(), -2 * n)
        * sign(i + ip)
        * pow(lam, -i)
        * pow(q, i * (i + 1) - ip * (ip + 1) + ip * i - n * (i + ip))
        * pow(&x, ip + n)
        * qpochhammer(&q2, &q2, np)?
        / (qpochhammer(&q2, &q2, n)? * qpochhammer(&q2, &q2, i)?);
    Ok(pre * phi32(i, ip, &x, i, n, ctx))
}

/// Either operator by sign.
pub fn a_element(s: QSign, n: i64, i: i64, np: i64, ip: i64, w: &WeightParam, ctx: &ScalarContext) -> Result<Scalar> {
    match s {
        QSign::Minus => a_minus_element(n, i, np, ip, w, ctx),
        QSign::Plus => a_plus_element(n, i, np, ip, w, ctx),
    }
}

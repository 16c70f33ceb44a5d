//! Exact rationals, q-Pochhammer symbols and terminating basic hypergeometric sums.

mod jet;
mod laurent;
mod linalg;
mod ring;
mod series;

pub use jet::Jet;
pub use laurent::{
    fit_laurent, reconstruct_laurent, reconstruct_laurent_many, sample_nodes, LaurentPoly,
};
pub use linalg::Matrix;
pub use ring::Ring;
pub use series::{
    geometric_tail, phi_regularized, phi_regularized_in, phi_terminating, poch_in, qpochhammer,
    SumPolicy,
};

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Exact rational number, always in lowest terms.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `n/d`. Panics on `d == 0`.
pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Integer power with negative exponents allowed (`x` must be nonzero then).
pub fn pow(x: &Scalar, e: i64) -> Scalar {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), e.unsigned_abs() as usize)
    }
}

pub fn sign(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// `[x] = x - 1/x`
pub fn bracket(x: &Scalar) -> Scalar {
    x - x.recip()
}

/// `{x} = x + 1/x`
pub fn brace(x: &Scalar) -> Scalar {
    x + x.recip()
}

/// Parse `n/d` or `n`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::Domain(format!("cannot parse rational '{s}'"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(n, d))
}

/// `n/d` with `/1` dropped.
pub fn fmt_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rational square root if `x` is a square of a rational.
pub fn rational_sqrt(x: &Scalar) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Scalar::new(n, d))
    } else {
        None
    }
}

/// Fixed-precision decimal rendering, for reports only.
pub fn to_decimal(x: &Scalar, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let scale = num_traits::pow(BigInt::from(10), digits);
    let scaled = (a * Scalar::from_integer(scale.clone())).round().to_integer();
    let ip = &scaled / &scale;
    let fp = &scaled % &scale;
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if digits > 0 {
        s.push('.');
        s.push_str(&format!("{:0>width$}", fp.to_string(), width = digits));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    PointEval,
    /// λ is formal; evaluators return Laurent polynomials in λ.
    LaurentInLambda,
}

/// Values of `q`, `λ`, `φ`.
///
/// `q` is always present. `p` with `p² = q` is present whenever `q` is the
/// square of a rational; formulas with half-integer q-powers need it and
/// return a domain error otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarContext {
    q: Scalar,
    p: Option<Scalar>,
    lambda: Scalar,
    phi: Scalar,
    mode: Mode,
}

impl ScalarContext {
    pub fn new(p: Scalar, lambda: Scalar, phi: Scalar) -> Result<Self> {
        if p.is_zero() || p.abs().is_one() {
            return Err(Error::Domain(format!("p = {} not allowed", fmt_scalar(&p))));
        }
        let ctx = ScalarContext {
            q: &p * &p,
            p: Some(p),
            lambda,
            phi,
            mode: Mode::PointEval,
        };
        ctx.check()
    }

    /// Context from `q` directly; `p` is recovered when `q` is a rational square.
    pub fn from_q(q: Scalar, lambda: Scalar, phi: Scalar) -> Result<Self> {
        if q.is_zero() || q.abs().is_one() {
            return Err(Error::Domain(format!("q = {} not allowed", fmt_scalar(&q))));
        }
        let p = rational_sqrt(&q);
        let ctx = ScalarContext {
            q,
            p,
            lambda,
            phi,
            mode: Mode::PointEval,
        };
        ctx.check()
    }

    fn check(self) -> Result<Self> {
        if self.lambda.is_zero() {
            return Err(Error::Domain("lambda = 0".into()));
        }
        if self.phi.is_zero() {
            return Err(Error::Domain("phi = 0".into()));
        }
        Ok(self)
    }

    pub fn laurent(mut self) -> Self {
        self.mode = Mode::LaurentInLambda;
        self
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn p(&self) -> Result<&Scalar> {
        self.p.as_ref().ok_or_else(|| {
            Error::Domain(format!(
                "q = {} has no rational square root; half-integer q-powers unavailable",
                fmt_scalar(&self.q)
            ))
        })
    }

    pub fn has_p(&self) -> bool {
        self.p.is_some()
    }

    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn phi(&self) -> &Scalar {
        &self.phi
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `q^e`
    pub fn qpow(&self, e: i64) -> Scalar {
        pow(&self.q, e)
    }

    /// `q^{e/2} = p^e`
    pub fn qhalf(&self, e: i64) -> Result<Scalar> {
        if e % 2 == 0 {
            Ok(pow(&self.q, e / 2))
        } else {
            Ok(pow(self.p()?, e))
        }
    }

    pub fn with_lambda(&self, lambda: Scalar) -> Self {
        assert!(!lambda.is_zero(), "lambda = 0");
        ScalarContext {
            lambda,
            ..self.clone()
        }
    }

    pub fn with_phi(&self, phi: Scalar) -> Self {
        assert!(!phi.is_zero(), "phi = 0");
        ScalarContext { phi, ..self.clone() }
    }

    /// `λ ↦ λ q^{e/2}`
    pub fn shift_lambda(&self, e: i64) -> Result<Self> {
        Ok(self.with_lambda(&self.lambda * self.qhalf(e)?))
    }

    /// Same λ, φ with `p ↦ 1/p`.
    pub fn invert_q(&self) -> Self {
        ScalarContext {
            q: self.q.recip(),
            p: self.p.as_ref().map(|p| p.recip()),
            ..self.clone()
        }
    }
}

impl fmt::Display for ScalarContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={} lambda={} phi={}",
            fmt_scalar(&self.q),
            fmt_scalar(&self.lambda),
            fmt_scalar(&self.phi)
        )
    }
}

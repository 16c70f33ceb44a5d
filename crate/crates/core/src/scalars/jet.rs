use super::{Ring, Scalar};
use crate::error::{Error, Result};
use num_traits::Zero;

/// Default number of known terms carried by exact constants.
const TERMS: i64 = 10;

/// Truncated Laurent series in a small parameter ε, known modulo `ε^prec`.
///
/// Used to take exact limits of expressions that are 0/0 at a point:
/// substitute `y0 + ε` and read the ε⁰ coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    val: i64,
    prec: i64,
    /// `c[k]` is the coefficient of `ε^(val+k)`; `c[0] != 0` unless empty.
    c: Vec<Scalar>,
}

impl Jet {
    pub fn constant(s: &Scalar) -> Jet {
        let mut c = vec![Scalar::zero(); TERMS as usize];
        c[0] = s.clone();
        Jet::normalized(0, TERMS, c)
    }

    /// `y0 + ε`
    pub fn variable(y0: &Scalar) -> Jet {
        let mut c = vec![Scalar::zero(); TERMS as usize];
        c[0] = y0.clone();
        c[1] = num_traits::One::one();
        Jet::normalized(0, TERMS, c)
    }

    fn normalized(val: i64, prec: i64, mut c: Vec<Scalar>) -> Jet {
        let lead = c.iter().position(|x| !x.is_zero());
        match lead {
            None => Jet {
                val: prec,
                prec,
                c: Vec::new(),
            },
            Some(k) => {
                c.drain(..k);
                Jet {
                    val: val + k as i64,
                    prec,
                    c,
                }
            }
        }
    }

    fn coeff(&self, e: i64) -> Scalar {
        if e < self.val || e >= self.prec {
            Scalar::zero()
        } else {
            self.c[(e - self.val) as usize].clone()
        }
    }

    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    /// Value at ε = 0.
    pub fn value_at_zero(&self) -> Result<Scalar> {
        if self.prec <= 0 {
            return Err(Error::Numeric(
                "series lost all precision before reaching the constant term".into(),
            ));
        }
        if self.c.is_empty() || self.val > 0 {
            return Ok(Scalar::zero());
        }
        if self.val < 0 {
            return Err(Error::Pole(format!(
                "limit diverges like eps^{}",
                self.val
            )));
        }
        Ok(self.c[0].clone())
    }
}

impl Ring for Jet {
    fn ring_zero() -> Self {
        Jet::constant(&Scalar::zero())
    }
    fn ring_one() -> Self {
        Jet::constant(&num_traits::One::one())
    }
    fn from_scalar(s: &Scalar) -> Self {
        Jet::constant(s)
    }
    fn plus(&self, o: &Self) -> Self {
        let prec = self.prec.min(o.prec);
        let lo = self.val.min(o.val).min(prec);
        let c = (lo..prec).map(|e| self.coeff(e) + o.coeff(e)).collect();
        Jet::normalized(lo, prec, c)
    }
    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.negate())
    }
    fn times(&self, o: &Self) -> Self {
        let val = self.val + o.val;
        let prec = (self.val + o.prec).min(o.val + self.prec);
        if prec <= val {
            return Jet::normalized(prec, prec, Vec::new());
        }
        let n = (prec - val) as usize;
        let mut c = vec![Scalar::zero(); n];
        for (a, x) in self.c.iter().enumerate().take(n) {
            if x.is_zero() {
                continue;
            }
            for (b, y) in o.c.iter().enumerate().take(n - a) {
                c[a + b] += x * y;
            }
        }
        Jet::normalized(val, prec, c)
    }
    fn negate(&self) -> Self {
        Jet {
            val: self.val,
            prec: self.prec,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }
    fn inverse(&self) -> Option<Self> {
        if self.c.is_empty() {
            return None;
        }
        let rel = (self.prec - self.val) as usize;
        let inv0 = self.c[0].recip();
        let mut d: Vec<Scalar> = Vec::with_capacity(rel);
        d.push(inv0.clone());
        for n in 1..rel {
            let mut s = Scalar::zero();
            for k in 1..=n.min(self.c.len() - 1) {
                s += &self.c[k] * &d[n - k];
            }
            d.push(-(&inv0 * s));
        }
        Some(Jet::normalized(-self.val, -self.val + rel as i64, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{frac, int};

    #[test]
    fn removable_singularity() {
        // ((y^2 - 1)/(y - 1)) at y = 1 is 2
        let y = Jet::variable(&int(1));
        let num = y.times(&y).minus(&Jet::ring_one());
        let den = y.minus(&Jet::ring_one());
        let r = num.times(&den.inverse().unwrap());
        assert_eq!(r.value_at_zero().unwrap(), int(2));
    }

    #[test]
    fn genuine_pole_detected() {
        let y = Jet::variable(&int(1));
        let den = y.minus(&Jet::ring_one());
        let r = Jet::constant(&frac(3, 2)).times(&den.inverse().unwrap());
        assert!(matches!(r.value_at_zero(), Err(Error::Pole(_))));
    }

    #[test]
    fn constants_behave_like_scalars() {
        let a = Jet::constant(&frac(2, 3));
        let b = Jet::constant(&frac(-5, 7));
        let r = a.times(&b).plus(&a).times(&b.inverse().unwrap());
        let s = (frac(2, 3) * frac(-5, 7) + frac(2, 3)) / frac(-5, 7);
        assert_eq!(r.value_at_zero().unwrap(), s);
    }
}

use super::{fmt_scalar, pow, Scalar};
use crate::error::{Error, Result};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Laurent polynomial with rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, Scalar>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(e: i64, c: Scalar) -> Self {
        let mut p = Self::default();
        p.add_term(e, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Scalar)>>(it: I) -> Self {
        let mut p = Self::default();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> Scalar {
        self.terms.get(&e).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// (min exponent, max exponent), `None` for the zero polynomial.
    pub fn span(&self) -> Option<(i64, i64)> {
        let lo = *self.terms.keys().next()?;
        let hi = *self.terms.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut s = Scalar::zero();
        for (e, c) in &self.terms {
            s += c * pow(x, *e);
        }
        s
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    /// `P(x) -> P(c x)`
    pub fn rescale_arg(&self, c: &Scalar) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, x)| (*e, x * pow(c, *e))))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-Scalar::one()))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term(e1 + e2, c1 * c2);
            }
        }
        r
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| format!("({})x^{}", fmt_scalar(c), e))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Laurent polynomial with exponents in `[lo, hi]` through the given samples
/// (Newton divided differences on `x^{-lo} f(x)`). Needs `hi - lo + 1` distinct nonzero nodes.
pub fn fit_laurent(samples: &[(Scalar, Scalar)], lo: i64, hi: i64) -> LaurentPoly {
    let d = (hi - lo) as usize;
    assert!(samples.len() > d, "need {} samples", d + 1);
    let xs: Vec<Scalar> = samples[..=d].iter().map(|s| s.0.clone()).collect();
    let mut dd: Vec<Scalar> = samples[..=d]
        .iter()
        .map(|(x, y)| y * pow(x, -lo))
        .collect();
    for k in 1..=d {
        for i in (k..=d).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - k]);
        }
    }
    // Horner on the Newton form, coefficients low -> high
    let mut poly: Vec<Scalar> = vec![dd[d].clone()];
    for k in (0..d).rev() {
        let mut next = vec![Scalar::zero(); poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * &xs[k];
        }
        next[0] += &dd[k];
        poly = next;
    }
    LaurentPoly::from_terms(poly.into_iter().enumerate().map(|(i, c)| (lo + i as i64, c)))
}

/// Reconstruct `f` as a Laurent polynomial with exponents in `[lo, hi]`, sampling at
/// successive nodes (nodes where `f` reports a pole are skipped) and confirming on
/// `checks` further nodes.
pub fn reconstruct_laurent<F>(
    f: F,
    nodes: impl Iterator<Item = Scalar>,
    lo: i64,
    hi: i64,
    checks: usize,
) -> Result<LaurentPoly>
where
    F: Fn(&Scalar) -> Result<Scalar>,
{
    let mut v = reconstruct_laurent_many(|x| f(x).map(|y| vec![y]), nodes, lo, hi, checks)?;
    Ok(v.pop().expect("one component"))
}

/// Vector-valued form of [`reconstruct_laurent`]: one polynomial per component.
pub fn reconstruct_laurent_many<F>(
    f: F,
    nodes: impl Iterator<Item = Scalar>,
    lo: i64,
    hi: i64,
    checks: usize,
) -> Result<Vec<LaurentPoly>>
where
    F: Fn(&Scalar) -> Result<Vec<Scalar>>,
{
    let need = (hi - lo + 1) as usize + checks;
    let mut samples: Vec<(Scalar, Vec<Scalar>)> = Vec::with_capacity(need);
    let mut skipped = 0usize;
    for x in nodes {
        if samples.len() == need {
            break;
        }
        if x.is_zero() || samples.iter().any(|(y, _)| *y == x) {
            continue;
        }
        match f(&x) {
            Ok(v) => samples.push((x, v)),
            Err(Error::Pole(_)) => {
                skipped += 1;
                if skipped > 64 {
                    return Err(Error::Fit("too many singular nodes".into()));
                }
            }
            Err(e) => return Err(e),
        }
    }
    if samples.len() < need {
        return Err(Error::Fit("ran out of sample nodes".into()));
    }
    let width = samples[0].1.len();
    let fit_n = (hi - lo + 1) as usize;
    let mut out = Vec::with_capacity(width);
    for comp in 0..width {
        let pts: Vec<(Scalar, Scalar)> = samples[..fit_n]
            .iter()
            .map(|(x, v)| (x.clone(), v[comp].clone()))
            .collect();
        let p = fit_laurent(&pts, lo, hi);
        for (x, v) in &samples[fit_n..] {
            if p.eval(x) != v[comp] {
                return Err(Error::Fit(format!(
                    "component {comp} is not a Laurent polynomial with exponents in [{lo}, {hi}]"
                )));
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Deterministic rational sample points away from 0 and ±1.
pub fn sample_nodes() -> impl Iterator<Item = Scalar> {
    (0i64..).map(|k| Scalar::new((2 * k + 3).into(), (3 * k + 11).into()) + Scalar::from_integer((k % 3).into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{frac, int};

    #[test]
    fn fit_recovers_polynomial() {
        let p = LaurentPoly::from_terms([(-2, frac(3, 5)), (0, int(-1)), (3, frac(7, 2))]);
        let samples: Vec<_> = (1..=6).map(|k| (frac(k, k + 2), p.eval(&frac(k, k + 2)))).collect();
        assert_eq!(fit_laurent(&samples, -2, 3), p);
    }

    #[test]
    fn reconstruct_detects_wrong_window() {
        let f = |x: &Scalar| Ok(pow(x, 5) + int(1));
        assert!(reconstruct_laurent(f, sample_nodes(), 0, 3, 2).is_err());
        let p = reconstruct_laurent(f, sample_nodes(), -1, 6, 2).unwrap();
        assert_eq!(p.span(), Some((0, 5)));
    }

    #[test]
    fn span_and_ops() {
        let a = LaurentPoly::from_terms([(-1, int(1)), (1, int(1))]);
        let b = a.mul(&a);
        assert_eq!(b.span(), Some((-2, 2)));
        assert_eq!(b.coeff(0), int(2));
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.rescale_arg(&int(2)).coeff(1), int(2));
    }
}

//! Higher-spin R-matrix `R_{I,J}(λ;φ)`.
//!
//! Four evaluators: the two-layer projection of the 3D R-matrix, the double
//! sum, the pole expansion and the single ₄φ̄₃ sum. The single sum is the
//! canonical one.

mod lop;
mod routes;
mod two_layer;
mod verify;

pub use lop::{l_operator_fundamental, LOperator};
pub use routes::{double_core, pole_core, single_core};
pub use two_layer::{rij_two_layer, rij_two_layer_proper, FieldSet, SumPolicy};
pub use verify::{
    contract_two_layer, generic, recurrence_oracle, recurrence_residuals, Reconstruction, reconstruct_from_recurrences, verify_symmetries,
    verify_ybe, verify_ybe_loperator, verify_ybe_reduced, verify_ybe_two_layer, Recurrence,
    YbeFields, YbeInput,
};

use crate::error::{Error, Result};
use crate::scalars::{
    fmt_scalar, pow, qpochhammer, reconstruct_laurent, sample_nodes, sign, LaurentPoly, Mode,
    Scalar, ScalarContext,
};
use num_traits::Zero;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt;

/// `[i, j, i', j']`
pub type Idx4 = [i64; 4];

/// Generic weight: `x` stands for `q^I` with `I` off the integers.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericWeight {
    x: Scalar,
    integral: Option<i64>,
}

impl GenericWeight {
    /// `x = q^k` is rejected for `|k|` up to this bound.
    pub const DEFAULT_BOUND: i64 = 24;

    pub fn new(x: Scalar, q: &Scalar) -> Result<Self> {
        Self::with_bound(x, q, Self::DEFAULT_BOUND)
    }

    pub fn with_bound(x: Scalar, q: &Scalar, bound: i64) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::Domain("generic weight x = 0".into()));
        }
        for k in -bound..=bound {
            if x == pow(q, k) {
                return Err(Error::Domain(format!(
                    "x = {} equals q^{k}; use an integer weight or GenericWeight::continued",
                    fmt_scalar(&x)
                )));
            }
        }
        Ok(GenericWeight { x, integral: None })
    }

    /// Verma module weight at an integer value, `x = q^k`, kept infinite-dimensional.
    pub fn continued(k: i64, q: &Scalar) -> Self {
        GenericWeight {
            x: pow(q, k),
            integral: Some(k),
        }
    }

    pub fn x(&self) -> &Scalar {
        &self.x
    }

    pub fn integral(&self) -> Option<i64> {
        self.integral
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightParam {
    NonNeg(u32),
    Generic(GenericWeight),
}

impl WeightParam {
    /// `q^I`
    pub fn x(&self, q: &Scalar) -> Scalar {
        match self {
            WeightParam::NonNeg(n) => pow(q, *n as i64),
            WeightParam::Generic(g) => g.x.clone(),
        }
    }

    pub fn finite(&self) -> Option<u32> {
        match self {
            WeightParam::NonNeg(n) => Some(*n),
            WeightParam::Generic(_) => None,
        }
    }

    /// Integer value when one is known (finite or continued).
    pub fn integral(&self) -> Option<i64> {
        match self {
            WeightParam::NonNeg(n) => Some(*n as i64),
            WeightParam::Generic(g) => g.integral,
        }
    }

    pub fn contains(&self, i: i64) -> bool {
        i >= 0 && self.finite().map_or(true, |n| i <= n as i64)
    }
}

impl fmt::Display for WeightParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightParam::NonNeg(n) => write!(f, "{n}"),
            WeightParam::Generic(g) => match g.integral {
                Some(k) => write!(f, "verma({k})"),
                None => write!(f, "x={}", fmt_scalar(&g.x)),
            },
        }
    }
}

/// `m(I,J)`; `None` for two generic weights.
pub fn m_of(wi: &WeightParam, wj: &WeightParam) -> Option<u32> {
    match (wi.finite(), wj.finite()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

pub fn conserved(ix: &Idx4) -> bool {
    ix[0] + ix[1] == ix[2] + ix[3]
}

fn check_indices(ix: &Idx4, wi: &WeightParam, wj: &WeightParam) -> Result<()> {
    if wi.contains(ix[0]) && wi.contains(ix[2]) && wj.contains(ix[1]) && wj.contains(ix[3]) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "index {:?} outside the range of weights ({wi}, {wj})",
            ix
        )))
    }
}

/// `σ_{I,J}(λ)` with an explicit `m`.
pub fn sigma(big_i: u32, big_j: u32, m: u32, ctx: &ScalarContext) -> Result<Scalar> {
    let (bi, bj, m) = (big_i as i64, big_j as i64, m as i64);
    let lam = ctx.lambda();
    let q = ctx.q();
    Ok(sign(m)
        * ctx.qhalf(bi * bj - m)?
        * pow(lam, -m)
        * qpochhammer(&(lam * lam * pow(q, -bi - bj)), &(q * q), m + 1)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Single,
    Double,
    Pole,
    TwoLayer,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Route::Single),
            "double" => Ok(Route::Double),
            "pole" => Ok(Route::Pole),
            "two-layer" => Ok(Route::TwoLayer),
            _ => Err(Error::Domain(format!("unknown route {s}"))),
        }
    }
}

fn lam_power(lam: &Scalar, e: i64) -> Scalar {
    pow(lam, e)
}

/// Index-independent factor of the single sum for two finite weights.
fn single_constant(bi: i64, bj: i64, m: i64, ctx: &ScalarContext) -> Result<Scalar> {
    let q = ctx.q();
    let lam = ctx.lambda();
    Ok(pow(ctx.phi(), -bi)
        * pow(lam, m)
        * ctx.qhalf(bi * bj + m)?
        * qpochhammer(&(pow(lam, -2) * pow(q, -bi - bj)), &(q * q), m)?)
}

/// Single-sum entry.
///
/// Both weights finite: the full normalization with `m = min(I,J)`.
/// Any generic weight: normalized so that the (0,0,0,0) entry is 1.
pub fn rij_single_sum(
    ix: &Idx4,
    wi: &WeightParam,
    wj: &WeightParam,
    ctx: &ScalarContext,
) -> Result<Scalar> {
    check_indices(ix, wi, wj)?;
    if !conserved(ix) {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let lam = ctx.lambda();
    let core = single_core(ix, &wi.x(q), &wj.x(q), &(lam * lam), ctx.phi(), q)?;
    let v = core * lam_power(lam, -(ix[0] + ix[2]));
    match (wi.finite(), wj.finite()) {
        (Some(a), Some(b)) => {
            let m = a.min(b) as i64;
            Ok(v * single_constant(a as i64, b as i64, m, ctx)?)
        }
        _ => Ok(v),
    }
}

/// Double-sum entry. `I` finite; `J` finite or generic.
pub fn rij_double_sum(
    ix: &Idx4,
    big_i: u32,
    wj: &WeightParam,
    ctx: &ScalarContext,
) -> Result<Scalar> {
    let wi = WeightParam::NonNeg(big_i);
    check_indices(ix, &wi, wj)?;
    if !conserved(ix) {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let lam = ctx.lambda();
    let l2 = lam * lam;
    let xj = wj.x(q);
    let core = double_core(ix, big_i, &xj, &l2, ctx.phi(), q)?;
    let v = core * lam_power(lam, ix[0] - ix[2]);
    match wj.finite() {
        Some(b) => {
            let (bi, bj) = (big_i as i64, b as i64);
            let m = bi.min(bj);
            let k = sign(m)
                * pow(ctx.phi(), -bi)
                * pow(lam, -m)
                * ctx.qhalf(3 * bi * bj + 4 * bi - m)?
                * qpochhammer(&(&l2 * pow(q, -bi - bj)), &(q * q), m + 1)?;
            Ok(v * k)
        }
        None => {
            let corner = double_core(&[0; 4], big_i, &xj, &l2, ctx.phi(), q)?;
            Ok(v / corner)
        }
    }
}

/// Pole-expansion entry. `I` finite; `J` finite or generic.
pub fn rij_pole_expansion(
    ix: &Idx4,
    big_i: u32,
    wj: &WeightParam,
    ctx: &ScalarContext,
) -> Result<Scalar> {
    let wi = WeightParam::NonNeg(big_i);
    check_indices(ix, &wi, wj)?;
    if !conserved(ix) {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let lam = ctx.lambda();
    let l2 = lam * lam;
    let v = pole_core(ix, big_i, wj, &l2, ctx.phi(), q)? * lam_power(lam, ix[0] - ix[2]);
    match wj.finite() {
        Some(b) => {
            let (bi, bj) = (big_i as i64, b as i64);
            let mut k = sign(bi)
                * pow(ctx.phi(), -bi)
                * pow(lam, -bi)
                * ctx.qhalf(3 * bi + 3 * bi * bj)?
                * qpochhammer(&(&l2 * pow(q, -bi - bj)), &(q * q), bi + 1)?;
            if bi > bj {
                // formula is normalized with m = I; restore m = min(I,J)
                k = k * sigma(big_i, b, b, ctx)? / sigma(big_i, b, big_i, ctx)?;
            }
            Ok(v * k)
        }
        None => {
            let corner = pole_core(&[0; 4], big_i, wj, &l2, ctx.phi(), q)?;
            Ok(v / corner)
        }
    }
}

/// `R_{I,J}(λ;1)` for a Verma weight `J` with `x = q^J`, normalized with
/// `m = I` and divided by `q^{IJ/2}`, so it is rational in `x`.
///
/// `J` need not be positive: `x = q^{-J-2}` gives the second Verma term of the
/// splitting relation.
pub fn rij_verma_reduced(ix: &Idx4, big_i: u32, x: &Scalar, ctx: &ScalarContext) -> Result<Scalar> {
    if !(0..=big_i as i64).contains(&ix[0]) || !(0..=big_i as i64).contains(&ix[2]) || ix[1] < 0 || ix[3] < 0 {
        return Err(Error::Domain(format!("index {ix:?} outside the range of weights ({big_i}, Verma)")));
    }
    if !conserved(ix) {
        return Ok(Scalar::zero());
    }
    let q = ctx.q();
    let lam = ctx.lambda();
    let l2 = lam * lam;
    let bi = big_i as i64;
    let core = double_core(ix, big_i, x, &l2, &Scalar::from_integer(1.into()), q)?;
    let k = sign(bi)
        * pow(lam, -bi)
        * ctx.qhalf(3 * bi)?
        * pow(x, bi)
        * qpochhammer(&(&l2 * pow(q, -bi) / x), &(q * q), bi + 1)?;
    Ok(core * lam_power(lam, ix[0] - ix[2]) * k)
}

/// Entry by any route (two-layer requires finite weights).
pub fn rij(
    route: Route,
    ix: &Idx4,
    wi: &WeightParam,
    wj: &WeightParam,
    ctx: &ScalarContext,
) -> Result<Scalar> {
    let need_i = || {
        wi.finite()
            .ok_or_else(|| Error::Domain("this route needs a finite first weight".into()))
    };
    match route {
        Route::Single => rij_single_sum(ix, wi, wj, ctx),
        Route::Double => rij_double_sum(ix, need_i()?, wj, ctx),
        Route::Pole => rij_pole_expansion(ix, need_i()?, wj, ctx),
        Route::TwoLayer => {
            let j = wj.finite().ok_or_else(|| {
                Error::Domain("the two-layer route needs finite weights".into())
            })?;
            rij_two_layer_proper(ix, need_i()?, j, ctx)
        }
    }
}

/// Conserved index tuples; for generic weights, those with `i + j ≤ max_total`.
pub fn index_tuples(wi: &WeightParam, wj: &WeightParam, max_total: i64) -> Vec<Idx4> {
    let top_i = wi.finite().map_or(max_total, |n| n as i64);
    let top_j = wj.finite().map_or(max_total, |n| n as i64);
    let mut out = Vec::new();
    for i in 0..=top_i {
        for j in 0..=top_j {
            if i + j > max_total {
                continue;
            }
            for ip in 0..=top_i {
                let jp = i + j - ip;
                if (0..=top_j).contains(&jp) {
                    out.push([i, j, ip, jp]);
                }
            }
        }
    }
    out
}

/// Matrix of R-matrix entries over conserved index tuples.
#[derive(Clone, Debug)]
pub struct SpinRMatrix {
    wi: WeightParam,
    wj: WeightParam,
    ctx: ScalarContext,
    entries: BTreeMap<Idx4, Scalar>,
    laurent: BTreeMap<Idx4, LaurentPoly>,
}

impl SpinRMatrix {
    /// Dense build for finite weights; banded (`i + j ≤ max_total`) otherwise.
    ///
    /// In `LaurentInLambda` mode the entries are Laurent polynomials in λ,
    /// reconstructed with exponents in `[-m, m]`; failure to fit is an error.
    pub fn build(
        wi: WeightParam,
        wj: WeightParam,
        route: Route,
        max_total: i64,
        ctx: &ScalarContext,
    ) -> Result<Self> {
        let tuples = index_tuples(&wi, &wj, max_total);
        let mut out = SpinRMatrix {
            wi,
            wj,
            ctx: ctx.clone(),
            entries: BTreeMap::new(),
            laurent: BTreeMap::new(),
        };
        match ctx.mode() {
            Mode::PointEval => {
                let vals: Vec<Result<(Idx4, Scalar)>> = tuples
                    .par_iter()
                    .map(|ix| Ok((*ix, rij(route, ix, &out.wi, &out.wj, ctx)?)))
                    .collect();
                for v in vals {
                    let (ix, x) = v?;
                    out.entries.insert(ix, x);
                }
            }
            Mode::LaurentInLambda => {
                let m = m_of(&out.wi, &out.wj)
                    .ok_or_else(|| Error::Domain("Laurent mode needs a finite weight".into()))?
                    as i64;
                let vals: Vec<Result<(Idx4, LaurentPoly)>> = tuples
                    .par_iter()
                    .map(|ix| {
                        let p = reconstruct_laurent(
                            |l| rij(route, ix, &out.wi, &out.wj, &ctx.with_lambda(l.clone())),
                            sample_nodes(),
                            -m,
                            m,
                            3,
                        )?;
                        Ok((*ix, p))
                    })
                    .collect();
                for v in vals {
                    let (ix, p) = v?;
                    out.laurent.insert(ix, p);
                }
            }
        }
        Ok(out)
    }

    pub fn weights(&self) -> (&WeightParam, &WeightParam) {
        (&self.wi, &self.wj)
    }

    pub fn context(&self) -> &ScalarContext {
        &self.ctx
    }

    /// Point value; zero for non-conserved or unstored tuples.
    pub fn get(&self, ix: &Idx4) -> Scalar {
        if let Some(v) = self.entries.get(ix) {
            return v.clone();
        }
        if let Some(p) = self.laurent.get(ix) {
            return p.eval(self.ctx.lambda());
        }
        Scalar::zero()
    }

    pub fn laurent_entry(&self, ix: &Idx4) -> Option<&LaurentPoly> {
        self.laurent.get(ix)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Idx4, &Scalar)> {
        self.entries.iter()
    }

    pub fn laurent_entries(&self) -> impl Iterator<Item = (&Idx4, &LaurentPoly)> {
        self.laurent.iter()
    }

    /// Widest λ-exponent range over all Laurent entries.
    pub fn degree_span(&self) -> Option<(i64, i64)> {
        self.laurent
            .values()
            .filter_map(|p| p.span())
            .reduce(|a, b| (a.0.min(b.0), a.1.max(b.1)))
    }

    /// Dense matrix with rows `(i,j)` and columns `(i',j')`, finite weights only.
    pub fn to_matrix(&self) -> Result<crate::scalars::Matrix> {
        let (a, b) = match (self.wi.finite(), self.wj.finite()) {
            (Some(a), Some(b)) => (a as usize + 1, b as usize + 1),
            _ => return Err(Error::Domain("dense form needs finite weights".into())),
        };
        Ok(crate::scalars::Matrix::from_fn(a * b, a * b, |r, c| {
            let ix = [(r / b) as i64, (r % b) as i64, (c / b) as i64, (c % b) as i64];
            self.get(&ix)
        }))
    }
}

/// `R_{I,I}(1;1) = q^{-I(I+1)/2}(q²;q²)_I P₁₂` up to the sign `(-1)^I`;
/// returns the constant `c` with `R_{I,I}(1;1) = c P₁₂`.
pub fn permutation_constant(big_i: u32, q: &Scalar) -> Result<Scalar> {
    let bi = big_i as i64;
    Ok(sign(bi) * pow(q, -(bi * (bi + 1)) / 2) * qpochhammer(&(q * q), &(q * q), bi)?)
}

/// Closed form of the (0,0,0,0) entry for finite weights.
pub fn corner_entry(big_i: u32, big_j: u32, ctx: &ScalarContext) -> Result<Scalar> {
    let (bi, bj) = (big_i as i64, big_j as i64);
    single_constant(bi, bj, bi.min(bj), ctx)
}

/// Entry of the I = 1 R-matrix in closed form (all four blocks).
pub fn r_one_closed(ix: &Idx4, big_j: u32, ctx: &ScalarContext) -> Result<Scalar> {
    let [i, j, ip, jp] = *ix;
    let bj = big_j as i64;
    let q = ctx.q();
    let lam = ctx.lambda();
    let phi = ctx.phi();
    let br = crate::scalars::bracket;
    let v = match (i, ip) {
        (0, 0) if j == jp => {
            phi.recip() * br(&(lam * ctx.qhalf(1 + bj - 2 * jp)?))
        }
        (0, 1) if j == jp + 1 => {
            phi.recip() * br(&pow(q, bj - jp)) * ctx.qhalf(2 * jp - bj + 1)?
        }
        (1, 0) if j + 1 == jp => phi * br(&pow(q, jp)) * ctx.qhalf(bj + 1 - 2 * jp)?,
        (1, 1) if j == jp => phi * br(&(lam * ctx.qhalf(1 - bj + 2 * jp)?)),
        _ => Scalar::zero(),
    };
    Ok(v)
}

/// Leading coefficients at `λ → 0` (`at_zero`) or `λ → ∞` of a diagonal entry.
pub fn leading_coefficient(
    ix: &Idx4,
    big_i: u32,
    big_j: u32,
    at_zero: bool,
    ctx: &ScalarContext,
) -> Result<Scalar> {
    let [i, j, ip, jp] = *ix;
    if i != ip || j != jp {
        return Ok(Scalar::zero());
    }
    let (bi, bj) = (big_i as i64, big_j as i64);
    let m = bi.min(bj);
    let e = (bi - 2 * i) * (bj - 2 * j);
    let base = pow(ctx.phi(), 2 * i - bi);
    if at_zero {
        Ok(base * sign(m) * ctx.qhalf(-m - e)?)
    } else {
        Ok(base * ctx.qhalf(m + e)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{frac, int};
    use num_traits::One;

    fn ctx() -> ScalarContext {
        ScalarContext::new(frac(2, 5), frac(3, 7), frac(5, 4)).unwrap()
    }

    #[test]
    fn verma_reduced_matches_finite_block_when_j_dominates() {
        let c = ctx().with_phi(int(1));
        for (a, b) in [(1u32, 1u32), (1, 3), (2, 2), (2, 3)] {
            let x = pow(c.q(), b as i64);
            let half = c.qhalf((a * b) as i64).unwrap();
            for ix in index_tuples(&WeightParam::NonNeg(a), &WeightParam::NonNeg(b), (a + b) as i64) {
                let want = rij_double_sum(&ix, a, &WeightParam::NonNeg(b), &c).unwrap();
                assert_eq!(rij_verma_reduced(&ix, a, &x, &c).unwrap() * &half, want, "{a} {b} {ix:?}");
            }
        }
    }

    #[test]
    fn generic_weight_rejects_powers_of_q() {
        let q = frac(1, 4);
        assert!(GenericWeight::new(frac(1, 16), &q).is_err());
        assert!(GenericWeight::new(int(16), &q).is_err());
        assert!(GenericWeight::new(frac(2, 7), &q).is_ok());
    }

    #[test]
    fn corner_matches_single_sum() {
        let c = ctx();
        for (a, b) in [(1, 1), (1, 2), (2, 1), (3, 2)] {
            let v = rij_single_sum(&[0; 4], &WeightParam::NonNeg(a), &WeightParam::NonNeg(b), &c)
                .unwrap();
            assert_eq!(v, corner_entry(a, b, &c).unwrap());
        }
    }

    #[test]
    fn out_of_range_is_domain_error() {
        let c = ctx();
        let r = rij_single_sum(&[2, 0, 2, 0], &WeightParam::NonNeg(1), &WeightParam::NonNeg(1), &c);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn non_conserved_is_zero() {
        let c = ctx();
        let w = WeightParam::NonNeg(2);
        assert_eq!(rij_single_sum(&[1, 1, 0, 0], &w, &w, &c).unwrap(), int(0));
        assert!(rij_double_sum(&[1, 1, 0, 1], 2, &w, &c).unwrap().is_zero());
    }

    #[test]
    fn permutation_constant_small() {
        let q = frac(1, 3);
        // I = 1: -q^{-1}(1 - q^2)
        assert_eq!(
            permutation_constant(1, &q).unwrap(),
            -(int(1) - frac(1, 9)) * int(3)
        );
        assert!(permutation_constant(0, &q).unwrap().is_one());
    }
}

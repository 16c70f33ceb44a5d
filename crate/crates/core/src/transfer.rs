//! Transfer matrices per sector: the Verma-trace `T̂_{J,I}` (exact geometric
//! resummation over the auxiliary module) and the finite trace `T_{J,I}`.

use crate::error::{Error, Result};
use crate::qops::{fock_trace, laurent_block, sector_basis, FockBandOperator, SectorBlock};
use crate::report::{IdentityReport, Residual, ResidualAcc};
use crate::rmatrix::{rij_double_sum, rij_pole_expansion, rij_single_sum, rij_verma_reduced, GenericWeight, WeightParam};
use crate::scalars::{bracket, pow, rational_sqrt, sign, LaurentPoly, Matrix, Scalar, ScalarContext, SumPolicy};
use num_traits::{One, Zero};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferKind {
    /// Trace over the Verma module `V_J⁺`.
    VermaTraceHat,
    /// Trace over the `(J+1)`-dimensional module; `J` a non-negative integer.
    FiniteTrace,
}

impl std::str::FromStr for TransferKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hat" => Ok(TransferKind::VermaTraceHat),
            "finite" => Ok(TransferKind::FiniteTrace),
            _ => Err(Error::Domain(format!("unknown transfer kind {s}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferSpec {
    pub aux: WeightParam,
    pub quantum: WeightParam,
    pub m: usize,
    pub kind: TransferKind,
}

impl TransferSpec {
    pub fn new(aux: WeightParam, quantum: WeightParam, m: usize, kind: TransferKind) -> Result<Self> {
        if kind == TransferKind::FiniteTrace && aux.finite().is_none() {
            return Err(Error::Domain("a finite trace needs a non-negative integer auxiliary weight".into()));
        }
        if quantum.finite().is_none() {
            return Err(Error::Domain("transfer matrices are built for finite quantum weights".into()));
        }
        if m == 0 {
            return Err(Error::Domain("site count must be positive".into()));
        }
        Ok(TransferSpec { aux, quantum, m, kind })
    }

    pub fn hat(aux: WeightParam, big_i: u32, m: usize) -> Result<Self> {
        Self::new(aux, WeightParam::NonNeg(big_i), m, TransferKind::VermaTraceHat)
    }

    pub fn finite(big_j: u32, big_i: u32, m: usize) -> Result<Self> {
        Self::new(WeightParam::NonNeg(big_j), WeightParam::NonNeg(big_i), m, TransferKind::FiniteTrace)
    }

    fn big_i(&self) -> u32 {
        self.quantum.finite().expect("checked in new")
    }
}

/// `h_I(λ) = Π_{k<I} [λ q^{I/2-k}]`, and 1 for `I ≤ 0`.
pub fn h_weight(big_i: i64, ctx: &ScalarContext) -> Result<Scalar> {
    let mut r = Scalar::one();
    for k in 0..big_i.max(0) {
        r *= bracket(&(ctx.lambda() * ctx.qhalf(big_i - 2 * k)?));
    }
    Ok(r)
}

/// `q^{J/2}`: from `p` for an integral weight, else the rational square root of `x`.
pub fn half_weight_power(aux: &WeightParam, ctx: &ScalarContext) -> Result<Scalar> {
    match aux.integral() {
        Some(j) => ctx.qhalf(j),
        None => rational_sqrt(&aux.x(ctx.q()))
            .ok_or_else(|| Error::Domain("q^{J/2} is irrational for this auxiliary weight".into())),
    }
}

/// Constant relating `T̂` to the reduced trace `B`: `φ^{-JM} q^{IJM/2}` for an
/// integral `J`. A non-integral `J` has no rational `φ^{-JM}`; that factor is then
/// dropped (the block is `φ^{JM} T̂`) like the formal `λ^{hM}` tags.
pub fn hat_prefactor(spec: &TransferSpec, ctx: &ScalarContext) -> Result<Scalar> {
    let m = spec.m as i64;
    let s = half_weight_power(&spec.aux, ctx)?;
    let base = pow(&s, spec.big_i() as i64 * m);
    Ok(match spec.aux.integral() {
        Some(j) => base * pow(ctx.phi(), -j * m),
        None => base,
    })
}

/// The local band `φ^{2n} R_{I,J}(λ;1)_{i,n}^{i',n'} / q^{IJ/2}` over the Verma index `n`.
fn verma_band(big_i: u32, x: &Scalar, ctx: &ScalarContext) -> Result<FockBandOperator> {
    let phi2 = ctx.phi() * ctx.phi();
    let xx = x.clone();
    let p2 = phi2.clone();
    FockBandOperator::from_entries(
        WeightParam::NonNeg(big_i),
        ctx.q().clone(),
        phi2,
        0,
        |i, ip| i - ip,
        move |n, i, np, ip| Ok(pow(&p2, n) * rij_verma_reduced(&[i, n, ip, np], big_i, &xx, ctx)?),
    )
}

/// `B = q^{-IJM/2} φ^{JM} T̂_{J,I}` on sector `l`: rational in `x = q^J`.
pub fn hat_reduced_block(x: &Scalar, big_i: u32, m: usize, l: i64, ctx: &ScalarContext, policy: SumPolicy) -> Result<SectorBlock> {
    let op = verma_band(big_i, x, ctx)?;
    fock_trace(&vec![&op; m], l, policy)
}

/// Sector block of the transfer matrix.
pub fn transfer_block(spec: &TransferSpec, l: i64, ctx: &ScalarContext, policy: SumPolicy) -> Result<SectorBlock> {
    match spec.kind {
        TransferKind::VermaTraceHat => {
            let b = hat_reduced_block(&spec.aux.x(ctx.q()), spec.big_i(), spec.m, l, ctx, policy)?;
            Ok(b.scale(&hat_prefactor(spec, ctx)?))
        }
        TransferKind::FiniteTrace => finite_block(spec.aux.finite().expect("checked"), spec.big_i(), spec.m, l, ctx),
    }
}

/// `R_{J,I}(λ;φ)` entry `[j, i, j', i']`, re-routed around removable poles.
fn finite_entry(ix: &[i64; 4], wj: &WeightParam, wi: &WeightParam, ctx: &ScalarContext) -> Result<Scalar> {
    let bj = wj.finite().expect("finite");
    match rij_single_sum(ix, wj, wi, ctx) {
        Err(Error::Pole(_)) => match rij_double_sum(ix, bj, wi, ctx) {
            Err(Error::Pole(_)) => rij_pole_expansion(ix, bj, wi, ctx),
            r => r,
        },
        r => r,
    }
}

fn finite_block(big_j: u32, big_i: u32, m: usize, l: i64, ctx: &ScalarContext) -> Result<SectorBlock> {
    let (wj, wi) = (WeightParam::NonNeg(big_j), WeightParam::NonNeg(big_i));
    let (dj, di) = (big_j as usize + 1, big_i as usize + 1);
    // local aux matrices L^{(i,i')}[j][j']
    let pairs: Vec<(usize, usize)> = (0..di).flat_map(|i| (0..di).map(move |ip| (i, ip))).collect();
    let locals = pairs
        .par_iter()
        .map(|&(i, ip)| {
            let mut mat = Matrix::zeros(dj, dj);
            for j in 0..dj {
                for jp in 0..dj {
                    mat[(j, jp)] = finite_entry(&[j as i64, i as i64, jp as i64, ip as i64], &wj, &wi, ctx)?;
                }
            }
            Ok(mat)
        })
        .collect::<Result<Vec<_>>>()?;
    let basis = sector_basis(&wi, m, l);
    let dim = basis.len();
    let cells: Vec<(usize, usize)> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).collect();
    let vals: Vec<Scalar> = cells
        .par_iter()
        .map(|&(r, c)| {
            let mut prod = Matrix::identity(dj);
            for k in 0..m {
                prod = prod.mul(&locals[basis[r][k] as usize * di + basis[c][k] as usize]);
            }
            (0..dj).fold(Scalar::zero(), |acc, j| acc + &prod[(j, j)])
        })
        .collect();
    let mut mat = Matrix::zeros(dim, dim);
    for ((r, c), v) in cells.into_iter().zip(vals) {
        mat[(r, c)] = v;
    }
    Ok(SectorBlock::new(l, m, basis, mat))
}

/// Residual of `h_{I-J}(λ)^M T_{J,I} = T̂_{J,I} - T̂_{-J-2,I}` on sector `l`.
pub fn verify_splitting(big_j: u32, big_i: u32, m: usize, l: i64, ctx: &ScalarContext) -> Result<IdentityReport> {
    IdentityReport::new("splitting")
        .param("J", big_j)
        .param("I", big_i)
        .param("M", m)
        .param("l", l)
        .param("q", crate::scalars::fmt_scalar(ctx.q()))
        .param("lambda", crate::scalars::fmt_scalar(ctx.lambda()))
        .param("phi", crate::scalars::fmt_scalar(ctx.phi()))
        .timed(|| {
            let bj = big_j as i64;
            let q = ctx.q();
            let fin = transfer_block(&TransferSpec::finite(big_j, big_i, m)?, l, ctx, SumPolicy::Continued)?;
            let up = TransferSpec::hat(WeightParam::Generic(GenericWeight::continued(bj, q)), big_i, m)?;
            let down = TransferSpec::hat(WeightParam::Generic(GenericWeight::continued(-bj - 2, q)), big_i, m)?;
            let rhs = transfer_block(&up, l, ctx, SumPolicy::Continued)?
                .sub(&transfer_block(&down, l, ctx, SumPolicy::Continued)?);
            let lhs = fin.scale(&pow(&h_weight(big_i as i64 - bj, ctx)?, m as i64));
            Ok(block_residual(&lhs, &rhs))
        })
}

/// Entrywise residual of two blocks.
pub fn block_residual(a: &SectorBlock, b: &SectorBlock) -> Residual {
    let mut acc = ResidualAcc::new();
    for (x, y) in a.matrix.entries().iter().zip(b.matrix.entries()) {
        acc.observe_pair(x, y);
    }
    acc.residual()
}

/// Extreme `λ`-coefficients of a Verma-trace block next to their closed forms.
#[derive(Clone, Debug)]
pub struct Asymptotics {
    pub degree: i64,
    /// Coefficient of `λ^{IM}`, and of `λ^{-IM}`.
    pub high: Matrix,
    pub low: Matrix,
    pub expected_high: Scalar,
    pub expected_low: Scalar,
    pub residual: Residual,
}

/// `λ → ∞` and `λ → 0` leading coefficients of `T̂_{J,I}` on sector `l`.
pub fn transfer_asymptotics(spec: &TransferSpec, l: i64, ctx: &ScalarContext) -> Result<Asymptotics> {
    if spec.kind != TransferKind::VermaTraceHat {
        return Err(Error::Domain("closed-form asymptotics are stated for the Verma trace".into()));
    }
    let im = spec.big_i() as i64 * spec.m as i64;
    let polys: Vec<LaurentPoly> = laurent_block(
        |lam| transfer_block(spec, l, &ctx.with_lambda(lam.clone()), SumPolicy::Continued),
        -im - 1,
        im + 1,
    )?;
    let dim = sector_basis(&spec.quantum, spec.m, l).len();
    let pick = |e: i64| Matrix::from_fn(dim, dim, |r, c| polys[r * dim + c].coeff(e));
    let (high, low) = (pick(im), pick(-im));
    let q = ctx.q();
    let p = ctx.p()?;
    let x = spec.aux.x(q);
    let m = spec.m as i64;
    let phi2m = pow(ctx.phi(), 2 * m);
    let pre = hat_prefactor(spec, ctx)?;
    let expected_high = &pre * pow(p, im) * pow(&x, -l) / (Scalar::one() - &phi2m * pow(q, 2 * l - im));
    let expected_low = &pre * sign(im) * pow(p, -im) * pow(&x, l - im) / (Scalar::one() - &phi2m * pow(q, im - 2 * l));
    let mut acc = ResidualAcc::new();
    for r in 0..dim {
        for c in 0..dim {
            let (eh, el) = if r == c { (expected_high.clone(), expected_low.clone()) } else { (Scalar::zero(), Scalar::zero()) };
            acc.observe_pair(&high[(r, c)], &eh);
            acc.observe_pair(&low[(r, c)], &el);
        }
    }
    let span_ok = polys.iter().all(|p| p.span().map_or(true, |(lo, hi)| lo >= -im && hi <= im));
    let residual = if span_ok { acc.residual() } else { Residual::MaxAbs(Scalar::one()) };
    Ok(Asymptotics { degree: im, high, low, expected_high, expected_low, residual })
}

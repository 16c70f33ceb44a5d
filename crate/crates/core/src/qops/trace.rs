//! Sector blocks and exact traces over an infinite auxiliary space.
//!
//! An operator on `aux ⊗ V_I` whose entries satisfy `n' = n + d(i,i')` is
//! stored as one Laurent polynomial per quantum pair: the entry equals
//! `ω^n P(q^n)` for `n ≥ nmin`. A chain trace is then a finite sum of
//! geometric series.

use super::local::{a_minus_element, a_plus_element, QSign};
use crate::error::{Error, Result};
use crate::rmatrix::WeightParam;
use crate::scalars::{
    fit_laurent, geometric_tail, pow, reconstruct_laurent_many, sample_nodes, LaurentPoly, Matrix,
    Scalar, ScalarContext, SumPolicy,
};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

/// Compositions `(i_1..i_M)` with `Σ i_k = l`, `0 ≤ i_k ≤ I`, in lexicographic order.
pub fn sector_basis(w: &WeightParam, m: usize, l: i64) -> Vec<Vec<i64>> {
    let cap = w.finite().map_or(l, |n| (n as i64).min(l));
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fn go(k: usize, m: usize, left: i64, cap: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == m {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let rest = (m - k - 1) as i64;
        for i in 0..=cap.min(left) {
            if left - i > rest * cap {
                continue;
            }
            cur.push(i);
            go(k + 1, m, left - i, cap, cur, out);
            cur.pop();
        }
    }
    if l >= 0 {
        go(0, m, l, cap, &mut cur, &mut out);
    }
    out
}

/// An operator restricted to one sector, in the [`sector_basis`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorBlock {
    pub l: i64,
    pub m: usize,
    pub basis: Vec<Vec<i64>>,
    pub matrix: Matrix,
}

impl SectorBlock {
    pub fn new(l: i64, m: usize, basis: Vec<Vec<i64>>, matrix: Matrix) -> Self {
        assert_eq!(basis.len(), matrix.rows());
        SectorBlock { l, m, basis, matrix }
    }

    pub fn identity(w: &WeightParam, m: usize, l: i64) -> Self {
        let basis = sector_basis(w, m, l);
        let n = basis.len();
        SectorBlock::new(l, m, basis, Matrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Same sector, new entries.
    pub fn with_matrix(&self, matrix: Matrix) -> Self {
        SectorBlock::new(self.l, self.m, self.basis.clone(), matrix)
    }

    pub fn mul(&self, o: &SectorBlock) -> SectorBlock {
        self.with_matrix(self.matrix.mul(&o.matrix))
    }

    pub fn scale(&self, c: &Scalar) -> SectorBlock {
        self.with_matrix(self.matrix.scale(c))
    }

    pub fn add(&self, o: &SectorBlock) -> SectorBlock {
        self.with_matrix(self.matrix.add(&o.matrix))
    }

    pub fn sub(&self, o: &SectorBlock) -> SectorBlock {
        self.with_matrix(self.matrix.sub(&o.matrix))
    }

    /// CSV rows `i,j,i_out,j_out,numerator,denominator`, where `i`/`i_out`
    /// are the row/column composition (space separated) and `j`/`j_out` the
    /// sector and site count.
    pub fn csv_rows(&self) -> Vec<[String; 6]> {
        let join = |v: &Vec<i64>| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut rows = Vec::new();
        for (r, a) in self.basis.iter().enumerate() {
            for (c, b) in self.basis.iter().enumerate() {
                let v = &self.matrix[(r, c)];
                rows.push([
                    join(a),
                    self.l.to_string(),
                    join(b),
                    self.l.to_string(),
                    v.numer().to_string(),
                    v.denom().to_string(),
                ]);
            }
        }
        rows
    }
}

/// One `(i, i')` band: entries `ω^n P(q^n)` at `n' = n + shift`, `n ≥ nmin`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandRecord {
    pub shift: i64,
    pub nmin: i64,
    pub poly: LaurentPoly,
}

/// Operator on `aux ⊗ V_I` with conserved band structure, stored per quantum pair.
#[derive(Clone, Debug)]
pub struct FockBandOperator {
    pub weight: WeightParam,
    pub q: Scalar,
    pub omega: Scalar,
    records: HashMap<(i64, i64), BandRecord>,
}

/// Largest exponent window tried when fitting a band.
const MAX_HALF_WIDTH: i64 = 96;
const CHECKS: i64 = 3;

fn fit_band<F>(entry: &F, i: i64, ip: i64, shift: i64, q: &Scalar, omega: &Scalar, start: i64) -> Result<BandRecord>
where
    F: Fn(i64, i64, i64, i64) -> Result<Scalar>,
{
    let nmin = 0.max(-shift);
    let mut cache: Vec<(Scalar, Scalar)> = Vec::new();
    let mut half = start.max(2);
    loop {
        let need = (2 * half + 1 + CHECKS) as usize;
        while cache.len() < need {
            let n = nmin + cache.len() as i64;
            let v = entry(n, i, n + shift, ip)? / pow(omega, n);
            cache.push((pow(q, n), v));
        }
        let fit_n = (2 * half + 1) as usize;
        let poly = fit_laurent(&cache[..fit_n], -half, half);
        if cache[fit_n..need].iter().all(|(v, y)| &poly.eval(v) == y) {
            return Ok(BandRecord { shift, nmin, poly });
        }
        half *= 2;
        if half > MAX_HALF_WIDTH {
            return Err(Error::Fit(format!(
                "band ({i}, {ip}) is not ω^n times a Laurent polynomial in q^n of half-width ≤ {MAX_HALF_WIDTH}"
            )));
        }
    }
}

impl FockBandOperator {
    /// Builds the band records from an entry oracle `(n, i, n', i') -> value`.
    /// `cap` bounds the quantum indices for a generic weight.
    pub fn from_entries<F>(
        weight: WeightParam,
        q: Scalar,
        omega: Scalar,
        cap: i64,
        shift: impl Fn(i64, i64) -> i64,
        entry: F,
    ) -> Result<Self>
    where
        F: Fn(i64, i64, i64, i64) -> Result<Scalar> + Sync,
    {
        let top = weight.finite().map_or(cap, |n| n as i64);
        let pairs: Vec<(i64, i64, i64)> = (0..=top)
            .flat_map(|i| (0..=top).map(move |ip| (i, ip)))
            .map(|(i, ip)| (i, ip, shift(i, ip)))
            .collect();
        let start = 2 * top + 2;
        let records = pairs
            .par_iter()
            .map(|&(i, ip, d)| fit_band(&entry, i, ip, d, &q, &omega, start).map(|r| ((i, ip), r)))
            .collect::<Result<HashMap<_, _>>>()?;
        Ok(FockBandOperator { weight, q, omega, records })
    }

    /// `A_±^{(I)}(λ)` from the local matrix elements. `cap` bounds quantum
    /// indices when `I` is generic (use the sector number).
    pub fn local(sign: QSign, weight: &WeightParam, cap: i64, ctx: &ScalarContext) -> Result<Self> {
        let q = ctx.q().clone();
        let phi2 = ctx.phi() * ctx.phi();
        match sign {
            QSign::Minus => {
                if weight.finite().is_none() {
                    return Err(Error::Domain(
                        "the A₋ trace needs a finite weight: the generic rational part is not ω^n times a Laurent polynomial".into(),
                    ));
                }
                Self::from_entries(weight.clone(), q, phi2, cap, |i, ip| sign.shift(i, ip), |n, i, np, ip| {
                    a_minus_element(n, i, np, ip, weight, ctx)
                })
            }
            QSign::Plus => {
                let omega = weight.x(&q) / phi2;
                Self::from_entries(weight.clone(), q, omega, cap, |i, ip| sign.shift(i, ip), |n, i, np, ip| {
                    a_plus_element(n, i, np, ip, weight, ctx)
                })
            }
        }
    }

    pub fn record(&self, i: i64, ip: i64) -> Option<&BandRecord> {
        self.records.get(&(i, ip))
    }

    /// The stored entry at `(n, i; n', i')`, reconstructed from its band.
    pub fn entry(&self, n: i64, i: i64, np: i64, ip: i64) -> Scalar {
        match self.records.get(&(i, ip)) {
            Some(r) if np == n + r.shift && n >= r.nmin => pow(&self.omega, n) * r.poly.eval(&pow(&self.q, n)),
            _ => Scalar::zero(),
        }
    }

    /// Largest `|exponent|` among the band polynomials.
    pub fn degree(&self) -> i64 {
        self.records
            .values()
            .filter_map(|r| r.poly.span())
            .map(|(lo, hi)| lo.abs().max(hi.abs()))
            .max()
            .unwrap_or(0)
    }
}

/// `Tr_aux(O_1 ⊗ … ⊗ O_M)` on sector `l`, without normalization. All
/// operators must share `q`, `ω` and the quantum weight.
pub fn fock_trace(ops: &[&FockBandOperator], l: i64, policy: SumPolicy) -> Result<SectorBlock> {
    let first = ops.first().ok_or_else(|| Error::Domain("empty operator chain".into()))?;
    if ops.iter().any(|o| o.omega != first.omega || o.q != first.q || o.weight != first.weight) {
        return Err(Error::Domain("trace chain mixes incompatible band operators".into()));
    }
    let m = ops.len();
    let q = &first.q;
    let ratio_base = pow(&first.omega, m as i64);
    let basis = sector_basis(&first.weight, m, l);
    let dim = basis.len();
    let cells: Vec<(usize, usize)> = (0..dim).flat_map(|r| (0..dim).map(move |c| (r, c))).collect();
    let vals = cells
        .par_iter()
        .map(|&(r, c)| chain_entry(ops, &basis[r], &basis[c], q, &first.omega, &ratio_base, policy))
        .collect::<Result<Vec<_>>>()?;
    let mut mat = Matrix::zeros(dim, dim);
    for ((r, c), v) in cells.into_iter().zip(vals) {
        mat[(r, c)] = v;
    }
    Ok(SectorBlock::new(l, m, basis, mat))
}

fn chain_entry(
    ops: &[&FockBandOperator],
    row: &[i64],
    col: &[i64],
    q: &Scalar,
    omega: &Scalar,
    ratio_base: &Scalar,
    policy: SumPolicy,
) -> Result<Scalar> {
    let mut off = 0i64;
    let mut off_sum = 0i64;
    let mut n0 = 0i64;
    let mut prod = LaurentPoly::constant(Scalar::one());
    for (k, op) in ops.iter().enumerate() {
        let rec = match op.record(row[k], col[k]) {
            Some(r) if !r.poly.is_zero() => r,
            _ => return Ok(Scalar::zero()),
        };
        n0 = n0.max(rec.nmin - off);
        prod = prod.mul(&rec.poly.rescale_arg(&pow(q, off)));
        off_sum += off;
        off += rec.shift;
    }
    if off != 0 {
        return Ok(Scalar::zero());
    }
    let mut s = Scalar::zero();
    for (e, c) in prod.terms() {
        s += c * geometric_tail(&(ratio_base * pow(q, e)), n0, policy)?;
    }
    Ok(pow(omega, off_sum) * s)
}

/// The trace divided by `Tr(φ^{2N} q^{-N⊗H}) = 1/(1 - φ^{2M} q^{2l} x^{-M})`, `x = q^I`.
pub fn normalized_fock_trace(ops: &[&FockBandOperator], l: i64, ctx: &ScalarContext, policy: SumPolicy) -> Result<SectorBlock> {
    let b = fock_trace(ops, l, policy)?;
    let norm = trace_normalization(&ops[0].weight, ops.len(), l, ctx);
    Ok(b.scale(&norm))
}

/// `1 - φ^{2M} q^{2l-IM}`
pub fn trace_normalization(w: &WeightParam, m: usize, l: i64, ctx: &ScalarContext) -> Scalar {
    let mi = m as i64;
    Scalar::one() - pow(ctx.phi(), 2 * mi) * pow(ctx.q(), 2 * l) * pow(&w.x(ctx.q()), -mi)
}

/// `A_±^{(I)}` on sector `l` together with the formal prefactor of `Q_± = λ^{±hM} A_±`.
#[derive(Clone, Debug)]
pub struct QOperatorBlock {
    pub sign: QSign,
    pub block: SectorBlock,
    /// Exponent `k` in the formal tag `λ^{k h}`.
    pub h_tag: i64,
}

impl QOperatorBlock {
    pub fn tag(&self) -> String {
        format!("lambda^({}h)", self.h_tag)
    }
}

/// The normalized trace of `A_±^{(I)}(λ)^{⊗M}` on sector `l`.
pub fn q_operator(sign: QSign, w: &WeightParam, m: usize, l: i64, ctx: &ScalarContext, policy: SumPolicy) -> Result<QOperatorBlock> {
    if m == 0 {
        return Err(Error::Domain("site count must be positive".into()));
    }
    let op = FockBandOperator::local(sign, w, l, ctx)?;
    let ops = vec![&op; m];
    let block = normalized_fock_trace(&ops, l, ctx, policy)?;
    Ok(QOperatorBlock { sign, block, h_tag: sign.as_i64() * m as i64 })
}

/// Entries of `f(λ)` as Laurent polynomials in `λ` with exponents in `[lo, hi]`, row-major.
pub fn laurent_block<F>(f: F, lo: i64, hi: i64) -> Result<Vec<LaurentPoly>>
where
    F: Fn(&Scalar) -> Result<SectorBlock>,
{
    reconstruct_laurent_many(|lam| f(lam).map(|b| b.matrix.entries().to_vec()), sample_nodes(), lo, hi, 3)
}

//! Yang-Baxter, symmetry and recurrence checks.

use super::{
    conserved, index_tuples, lop::LOperator, rij_single_sum, rij_two_layer, single_core, FieldSet,
    GenericWeight, Idx4, SumPolicy, WeightParam,
};
use crate::error::{Error, Result};
use crate::report::{Residual, ResidualAcc};
use crate::scalars::{int, pow, sign, Matrix, Scalar, ScalarContext};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;

/// Dense four-index table for finite weights.
struct Table {
    bi: i64,
    bj: i64,
    data: Vec<Scalar>,
}

impl Table {
    fn build<F>(bi: u32, bj: u32, f: F) -> Result<Table>
    where
        F: Fn(&Idx4) -> Result<Scalar> + Sync,
    {
        let (bi, bj) = (bi as i64, bj as i64);
        let (a, b) = (bi + 1, bj + 1);
        let n = (a * b * a * b) as usize;
        let data: Result<Vec<Scalar>> = (0..n)
            .into_par_iter()
            .map(|k| {
                let k = k as i64;
                let ix = [k / (b * a * b), (k / (a * b)) % b, (k / b) % a, k % b];
                if conserved(&ix) {
                    f(&ix)
                } else {
                    Ok(Scalar::zero())
                }
            })
            .collect();
        Ok(Table { bi, bj, data: data? })
    }

    fn get(&self, i: i64, j: i64, ip: i64, jp: i64) -> Option<&Scalar> {
        if i < 0 || ip < 0 || j < 0 || jp < 0 || i > self.bi || ip > self.bi || j > self.bj || jp > self.bj {
            return None;
        }
        let (a, b) = (self.bi + 1, self.bj + 1);
        Some(&self.data[(((i * b + j) * a + ip) * b + jp) as usize])
    }
}

/// `Σ R12 R13 R23 − Σ R23 R13 R12` over all conserved externals.
fn contract_ybe(n: [i64; 3], r12: &Table, r13: &Table, r23: &Table) -> Residual {
    let ext: Vec<[i64; 3]> = (0..=n[0])
        .flat_map(|a| (0..=n[1]).flat_map(move |b| (0..=n[2]).map(move |c| [a, b, c])))
        .collect();
    let accs: Vec<ResidualAcc> = ext
        .par_iter()
        .map(|&[i1, i2, i3]| {
            let mut acc = ResidualAcc::new();
            for o1 in 0..=n[0] {
                for o2 in 0..=n[1] {
                    let o3 = i1 + i2 + i3 - o1 - o2;
                    if !(0..=n[2]).contains(&o3) {
                        continue;
                    }
                    let mut lhs = Scalar::zero();
                    for a1 in 0..=n[0] {
                        let a2 = i1 + i2 - a1;
                        let a3 = a1 + i3 - o1;
                        if let (Some(x), Some(y), Some(z)) = (
                            r12.get(i1, i2, a1, a2),
                            r13.get(a1, i3, o1, a3),
                            r23.get(a2, a3, o2, o3),
                        ) {
                            lhs += x * y * z;
                        }
                    }
                    let mut rhs = Scalar::zero();
                    for a2 in 0..=n[1] {
                        let a3 = i2 + i3 - a2;
                        let a1 = i1 + a3 - o3;
                        if let (Some(x), Some(y), Some(z)) = (
                            r23.get(i2, i3, a2, a3),
                            r13.get(i1, a3, a1, o3),
                            r12.get(a1, a2, o1, o2),
                        ) {
                            rhs += x * y * z;
                        }
                    }
                    acc.observe_pair(&lhs, &rhs);
                }
            }
            acc
        })
        .collect();
    let mut total = ResidualAcc::new();
    for a in accs {
        total.absorb(a);
    }
    total.residual()
}

/// Independent fields of the two-layer Yang-Baxter equation; the rest are derived.
#[derive(Clone, Debug)]
pub struct YbeFields {
    pub w: Scalar,
    pub w2: Scalar,
    pub phi_h: Scalar,
    pub phi_v: Scalar,
    pub psi_h: Scalar,
    pub psi_v: Scalar,
    /// φ_h' (= φ_h'')
    pub phi_h1: Scalar,
    pub psi_h1: Scalar,
    pub psi_v1: Scalar,
    pub psi_h2: Scalar,
}

impl YbeFields {
    /// Field sets of the three factors.
    pub fn derive(&self) -> Result<[FieldSet; 3]> {
        let f12 = FieldSet::new(
            self.w.clone(),
            self.phi_h.clone(),
            self.phi_v.clone(),
            self.psi_h.clone(),
            self.psi_v.clone(),
        )?;
        let f13 = FieldSet::new(
            &self.w * &self.w2,
            self.phi_h1.clone(),
            self.phi_v.clone(),
            self.psi_h1.clone(),
            self.psi_v1.clone(),
        )?;
        let psi_v2 = &self.psi_h * &self.psi_v1 * &self.psi_h2 / (&self.phi_h * &self.psi_v * &self.psi_h1);
        let f23 = FieldSet::new(
            self.w2.clone(),
            self.phi_h1.clone(),
            self.phi_h.recip(),
            self.psi_h2.clone(),
            psi_v2,
        )?;
        Ok([f12, f13, f23])
    }
}

/// Two-layer form with all dependent fields derived.
pub fn verify_ybe_two_layer(n: [u32; 3], fields: &YbeFields, q: &Scalar) -> Result<Residual> {
    contract_two_layer(n, &fields.derive()?, q)
}

/// Contraction with explicit field sets for the factors 12, 13, 23.
pub fn contract_two_layer(n: [u32; 3], sets: &[FieldSet; 3], q: &Scalar) -> Result<Residual> {
    let [f12, f13, f23] = sets;
    let pol = SumPolicy::Continued;
    let r12 = Table::build(n[0], n[1], |ix| rij_two_layer(ix, n[0], n[1], &f12, q, pol))?;
    let r13 = Table::build(n[0], n[2], |ix| rij_two_layer(ix, n[0], n[2], &f13, q, pol))?;
    let r23 = Table::build(n[1], n[2], |ix| rij_two_layer(ix, n[1], n[2], &f23, q, pol))?;
    Ok(contract_ybe(n.map(|x| x as i64), &r12, &r13, &r23))
}

/// `R(λ)` up to its scalar normalization: `single_core · λ^{-(i+i')}`.
fn scaled_entry(ix: &Idx4, wi: &WeightParam, wj: &WeightParam, lam: &Scalar, phi: &Scalar, q: &Scalar) -> Result<Scalar> {
    Ok(single_core(ix, &wi.x(q), &wj.x(q), &(lam * lam), phi, q)? * pow(lam, -(ix[0] + ix[2])))
}

/// `R₁₂(λ₁;φ₁₂) R₁₃(λ₁λ₂;φ₁₃) R₂₃(λ₂;φ₂₃) = R₂₃ R₁₃ R₁₂` for finite weights.
/// Holds when `φ₁₂ = 1` and `φ₁₃ = φ₂₃`.
///
/// Each factor is used up to its overall scalar, which the equation ignores.
pub fn verify_ybe_reduced(
    n: [u32; 3],
    lam1: &Scalar,
    lam2: &Scalar,
    phis: &[Scalar; 3],
    q: &Scalar,
) -> Result<Residual> {
    let w = n.map(WeightParam::NonNeg);
    let l12 = lam1 * lam2;
    let r12 = Table::build(n[0], n[1], |ix| scaled_entry(ix, &w[0], &w[1], lam1, &phis[0], q))?;
    let r13 = Table::build(n[0], n[2], |ix| scaled_entry(ix, &w[0], &w[2], &l12, &phis[1], q))?;
    let r23 = Table::build(n[1], n[2], |ix| scaled_entry(ix, &w[1], &w[2], lam2, &phis[2], q))?;
    Ok(contract_ybe(n.map(|x| x as i64), &r12, &r13, &r23))
}

/// `L_{1,I}(μ) L_{1,J}(λμ) R̃ = R̃ L_{1,J}(λμ) L_{1,I}(μ)` on `C² ⊗ V_I⁺ ⊗ V_J⁺`,
/// restricted to total charge `≤ max_total` (the equation preserves it).
///
/// `R̃ = λ^{N_J} R_{I,J}(λ;1) λ^{-N_J}` absorbs the similarity relating the
/// L-operator to the I = 1 R-matrix. The L-operators are taken at
/// `ν_I = ρ`, `ν_J = ρκ`, which fixes `λ² = κ² q^I / q^J`.
pub fn verify_ybe_loperator(
    wi: &WeightParam,
    wj: &WeightParam,
    rho: &Scalar,
    kappa: &Scalar,
    max_total: i64,
    q: &Scalar,
) -> Result<Residual> {
    let (xi, xj) = (wi.x(q), wj.x(q));
    let lam2 = kappa * kappa * &xi / &xj;
    let li = LOperator::from_nu(rho.clone(), wi.clone(), q)?;
    let lj = LOperator::from_nu(rho * kappa, wj.clone(), q)?;
    let basis: Vec<[i64; 3]> = (0..=1)
        .flat_map(|a| {
            (0..=max_total).flat_map(move |i| (0..=max_total).map(move |j| [a, i, j]))
        })
        .filter(|[a, i, j]| a + i + j <= max_total && wi.contains(*i) && wj.contains(*j))
        .collect();
    let n = basis.len();
    let mut r_cache: HashMap<Idx4, Scalar> = HashMap::new();
    let mut rt = |ix: Idx4| -> Result<Scalar> {
        if let Some(v) = r_cache.get(&ix) {
            return Ok(v.clone());
        }
        let v = single_core(&ix, &xi, &xj, &lam2, &int(1), q)? * pow(&lam2, -ix[0]);
        r_cache.insert(ix, v.clone());
        Ok(v)
    };
    let mut m_li = Matrix::zeros(n, n);
    let mut m_lj = Matrix::zeros(n, n);
    let mut m_r = Matrix::zeros(n, n);
    for (r, &[a, i, j]) in basis.iter().enumerate() {
        for (c, &[b, ip, jp]) in basis.iter().enumerate() {
            if j == jp {
                m_li[(r, c)] = li.element(a, i, b, ip);
            }
            if i == ip {
                m_lj[(r, c)] = lj.element(a, j, b, jp);
            }
            if a == b && i + j == ip + jp {
                m_r[(r, c)] = rt([i, j, ip, jp])?;
            }
        }
    }
    let lhs = m_li.mul(&m_lj).mul(&m_r);
    let rhs = m_r.mul(&m_lj).mul(&m_li);
    let d = lhs.sub(&rhs);
    Ok(if d.is_zero() {
        Residual::ExactZero
    } else {
        Residual::MaxAbs(d.max_abs())
    })
}

/// Inputs for [`verify_ybe`].
#[derive(Clone, Debug)]
pub enum YbeInput {
    TwoLayer { n: [u32; 3], fields: YbeFields },
    Reduced { n: [u32; 3], lam1: Scalar, lam2: Scalar, phis: [Scalar; 3] },
    LOperator { wi: WeightParam, wj: WeightParam, rho: Scalar, kappa: Scalar, max_total: i64 },
}

pub fn verify_ybe(input: &YbeInput, q: &Scalar) -> Result<Residual> {
    match input {
        YbeInput::TwoLayer { n, fields } => verify_ybe_two_layer(*n, fields, q),
        YbeInput::Reduced { n, lam1, lam2, phis } => verify_ybe_reduced(*n, lam1, lam2, phis, q),
        YbeInput::LOperator { wi, wj, rho, kappa, max_total } => {
            verify_ybe_loperator(wi, wj, rho, kappa, *max_total, q)
        }
    }
}

/// Residuals of the transposition rule of the two-layer matrix, `P R P`,
/// spin flip and the `λ → 1/λ, q → 1/q` conjugation. Needs `q^{1/2}`.
pub fn verify_symmetries(big_i: u32, big_j: u32, ctx: &ScalarContext) -> Result<Vec<(&'static str, Residual)>> {
    ctx.p()?;
    let (bi, bj) = (big_i as i64, big_j as i64);
    let (wi, wj) = (WeightParam::NonNeg(big_i), WeightParam::NonNeg(big_j));
    let q = ctx.q();
    let lam = ctx.lambda();
    let phi = ctx.phi();
    let tuples = index_tuples(&wi, &wj, bi + bj);
    let run = |f: &(dyn Fn(&Idx4) -> Result<(Scalar, Scalar)> + Sync)| -> Result<Residual> {
        let pairs: Result<Vec<(Scalar, Scalar)>> = tuples.par_iter().map(f).collect();
        let mut acc = ResidualAcc::new();
        for (a, b) in pairs? {
            acc.observe_pair(&a, &b);
        }
        Ok(acc.residual())
    };

    let fields = FieldSet::new(lam * lam, phi * phi, phi * phi * phi, lam * phi, lam.clone())?;
    let ft = fields.transposed();
    let transpose = run(&|ix| {
        let [i, j, ip, jp] = *ix;
        let a = rij_two_layer(&[j, i, jp, ip], big_j, big_i, &fields, q, SumPolicy::Continued)?;
        let b = pow(q, bi - bj)
            * pow(&fields.w, i - ip)
            * rij_two_layer(ix, big_i, big_j, &ft, q, SumPolicy::Continued)?;
        Ok((a, b))
    })?;

    let unit = ctx.with_phi(int(1));
    let permutation = run(&|ix| {
        let [i, j, ip, jp] = *ix;
        Ok((
            rij_single_sum(ix, &wi, &wj, &unit)?,
            rij_single_sum(&[j, i, jp, ip], &wj, &wi, &unit)?,
        ))
    })?;

    let flipped = ctx.with_phi(phi.recip());
    let spin_flip = run(&|ix| {
        let [i, j, ip, jp] = *ix;
        Ok((
            rij_single_sum(ix, &wi, &wj, ctx)?,
            rij_single_sum(&[bi - i, bj - j, bi - ip, bj - jp], &wi, &wj, &flipped)?,
        ))
    })?;

    let inv = ctx.invert_q().with_lambda(lam.recip());
    let m = bi.min(bj);
    let d1 = |i: i64| pow(q, -i * (i - 1));
    let d2 = |j: i64| pow(q, -j * (j - 1) + j * (bj - bi));
    let inversion = run(&|ix| {
        let [i, j, ip, jp] = *ix;
        let lhs = rij_single_sum(ix, &wi, &wj, &inv)?;
        let rhs = sign(m) * d1(i) * d2(j) / (d1(ip) * d2(jp)) * rij_single_sum(ix, &wi, &wj, ctx)?;
        Ok((lhs, rhs))
    })?;

    Ok(vec![
        ("transpose", transpose),
        ("permutation", permutation),
        ("spin_flip", spin_flip),
        ("inversion", inversion),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recurrence {
    C1,
    C2,
    C3,
}

impl Recurrence {
    pub const ALL: [Recurrence; 3] = [Recurrence::C1, Recurrence::C2, Recurrence::C3];

    /// Referenced tuples and their coefficients at base `(i, j, i', j')`.
    fn terms(self, b: &Idx4, xi: &Scalar, xj: &Scalar, lam: &Scalar, q: &Scalar) -> [(Idx4, Scalar); 3] {
        let [i, j, ip, jp] = *b;
        let one = int(1);
        let l2 = lam * lam;
        let qp = |e: i64| pow(q, e);
        match self {
            Recurrence::C1 => [
                (
                    [i, j, ip, jp],
                    (&one - &l2 * qp(2 * (1 + i + j)) / (xi * xj)) * (&one - qp(2 + 2 * ip)),
                ),
                (
                    [i, j + 1, ip + 1, jp],
                    -(lam * qp(ip - j) * (&one - qp(2 * (1 + i + ip)) / (xi * xi)) * (&one - qp(2 + 2 * j))),
                ),
                (
                    [i + 1, j, ip + 1, jp],
                    -(qp(3 * j - jp) / xj
                        * (&one - qp(2 + 2 * i))
                        * (&one - &l2 * qp(2 * (1 + ip - j)) * xj / xi)),
                ),
            ],
            Recurrence::C2 => [
                (
                    [i, j + 1, ip, jp + 1],
                    lam * qp(i - j - 2 * ip - 2)
                        * xj
                        * (&one - qp(2 * (2 + j + jp)) / (xj * xj))
                        * (&one - qp(2 + 2 * ip)),
                ),
                (
                    [i, j + 1, ip + 1, jp],
                    -((&one - &l2 * qp(2 * i - 2 * jp) * xj / xi) * (&one - qp(2 + 2 * jp))),
                ),
                (
                    [i, j + 2, ip + 1, jp + 1],
                    qp(3 * i - ip - 1) / xi
                        * (&one - &l2 * xi * xj * qp(-2 * (1 + i + j)))
                        * (&one - qp(4 + 2 * j)),
                ),
            ],
            Recurrence::C3 => [
                (
                    [i, j, ip, jp],
                    lam * qp(3 + 3 * i - j) * xj / (xi * xi)
                        * (&one - xi * xi * qp(-2 * i))
                        * (&one - xj * xj * qp(-2 * (j + jp))),
                ),
                (
                    [i + 1, j - 1, ip, jp],
                    (&one - xj * xj * qp(2 * (1 - j))) * (&one - &l2 * qp(2 * (1 + i - jp)) * xj / xi),
                ),
                (
                    [i + 1, j, ip, jp + 1],
                    -(qp(3 + 3 * i - ip) / xi
                        * (&one - xj * xj * qp(-2 * jp))
                        * (&one - &l2 * xi * xj * qp(-2 * i - 2 * j))),
                ),
            ],
        }
    }
}

fn in_band(ix: &Idx4, wi: &WeightParam, wj: &WeightParam, max_total: i64) -> bool {
    let upper = |w: &WeightParam, v: i64| w.finite().map_or(true, |n| v <= n as i64);
    upper(wi, ix[0]) && upper(wi, ix[2]) && upper(wj, ix[1]) && upper(wj, ix[3]) && ix[0] + ix[1] <= max_total
}

fn has_negative(ix: &Idx4) -> bool {
    ix.iter().any(|&v| v < 0)
}

/// Admissible rows: base indices may step one past either edge of the block,
/// except `j' = -1` in C3 (that row lost a vanishing overall factor).
/// Every referenced tuple must have a negative index, lie in the band, or
/// carry an exactly vanishing coefficient, and at least one must survive.
fn admissible_rows(
    wi: &WeightParam,
    wj: &WeightParam,
    max_total: i64,
    lam: &Scalar,
    q: &Scalar,
) -> Vec<(Recurrence, Idx4, [(Idx4, Scalar); 3])> {
    let (xi, xj) = (wi.x(q), wj.x(q));
    let top = |w: &WeightParam| w.finite().map_or(max_total + 1, |n| (n as i64 + 1).min(max_total + 1));
    let (ti, tj) = (top(wi), top(wj));
    let mut out = Vec::new();
    for i in -1..=ti {
        for j in -1..=tj {
            if i + j > max_total + 1 {
                continue;
            }
            for ip in -1..=ti {
                let jp = i + j - ip;
                if jp < -1 || jp > tj {
                    continue;
                }
                let base = [i, j, ip, jp];
                for rec in Recurrence::ALL {
                    if rec == Recurrence::C3 && jp < 0 {
                        continue;
                    }
                    let t = rec.terms(&base, &xi, &xj, lam, q);
                    let live = |(ix, c): &(Idx4, Scalar)| !has_negative(ix) && !c.is_zero();
                    let ok = t.iter().all(|term| !live(term) || in_band(&term.0, wi, wj, max_total));
                    if ok && t.iter().any(live) {
                        out.push((rec, base, t));
                    }
                }
            }
        }
    }
    out
}

/// `R(λ;1)` up to normalization; negative indices give 0.
fn s_value(ix: &Idx4, wi: &WeightParam, wj: &WeightParam, lam: &Scalar, q: &Scalar) -> Result<Scalar> {
    if has_negative(ix) || !conserved(ix) {
        return Ok(Scalar::zero());
    }
    scaled_entry(ix, wi, wj, lam, &int(1), q)
}

/// Residual of each recurrence over all admissible tuples with `i + j ≤ max_total`.
pub fn recurrence_residuals(
    wi: &WeightParam,
    wj: &WeightParam,
    max_total: i64,
    ctx: &ScalarContext,
) -> Result<[(Recurrence, Residual, usize); 3]> {
    let lam = ctx.lambda();
    let q = ctx.q();
    let rows = admissible_rows(wi, wj, max_total, lam, q);
    let mut accs = [ResidualAcc::new(), ResidualAcc::new(), ResidualAcc::new()];
    let vals: Result<Vec<(Recurrence, Scalar)>> = rows
        .par_iter()
        .map(|(rec, _, t)| {
            let mut s = Scalar::zero();
            for (ix, c) in t.iter().filter(|(_, c)| !c.is_zero()) {
                s += c * s_value(ix, wi, wj, lam, q)?;
            }
            Ok((*rec, s))
        })
        .collect();
    for (rec, v) in vals? {
        accs[rec as usize].observe(&v);
    }
    Ok(Recurrence::ALL.map(|r| {
        let a = &accs[r as usize];
        (r, a.residual(), a.checked())
    }))
}

/// All three recurrences merged into one residual.
pub fn recurrence_oracle(wi: &WeightParam, wj: &WeightParam, max_total: i64, ctx: &ScalarContext) -> Result<Residual> {
    let r = recurrence_residuals(wi, wj, max_total, ctx)?;
    Ok(r.into_iter().fold(Residual::ExactZero, |acc, (_, x, _)| acc.merge(x)))
}

/// Outcome of solving the recurrences with `S_{0,0}^{0,0} = 1`.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Difference against the single-sum entries.
    pub residual: Residual,
}

impl Reconstruction {
    pub fn unique(&self) -> bool {
        self.rank == self.unknowns
    }
}

/// Solve the recurrences as a linear system over the band; compare with the
/// single-sum formula normalized the same way.
pub fn reconstruct_from_recurrences(
    wi: &WeightParam,
    wj: &WeightParam,
    max_total: i64,
    ctx: &ScalarContext,
) -> Result<Reconstruction> {
    let lam = ctx.lambda();
    let q = ctx.q();
    let unknowns = index_tuples(wi, wj, max_total);
    let col: HashMap<Idx4, usize> = unknowns.iter().enumerate().map(|(k, ix)| (*ix, k)).collect();
    let rows = admissible_rows(wi, wj, max_total, lam, q);
    let n = unknowns.len();
    let mut a = Matrix::zeros(rows.len() + 1, n);
    let mut b = Matrix::zeros(rows.len() + 1, 1);
    for (r, (_, _, t)) in rows.iter().enumerate() {
        for (ix, c) in t {
            if has_negative(ix) || c.is_zero() {
                continue;
            }
            let k = *col
                .get(ix)
                .ok_or_else(|| Error::Domain(format!("tuple {ix:?} outside the band")))?;
            a[(r, k)] += c;
        }
    }
    let last = rows.len();
    a[(last, col[&[0, 0, 0, 0]])] = Scalar::one();
    b[(last, 0)] = Scalar::one();
    let rank = a.rank();
    let sol = a
        .solve(&b)
        .ok_or_else(|| Error::Numeric("recurrence system is inconsistent".into()))?;
    let mut acc = ResidualAcc::new();
    for (k, ix) in unknowns.iter().enumerate() {
        acc.observe_pair(&sol[(k, 0)], &s_value(ix, wi, wj, lam, q)?);
    }
    Ok(Reconstruction {
        unknowns: n,
        equations: rows.len() + 1,
        rank,
        residual: acc.residual(),
    })
}

/// Convenience: a generic weight for tests and the CLI.
pub fn generic(x: Scalar, q: &Scalar) -> Result<WeightParam> {
    Ok(WeightParam::Generic(GenericWeight::new(x, q)?))
}

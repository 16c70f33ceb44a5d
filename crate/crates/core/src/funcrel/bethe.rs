//! Bethe roots of the `A±` eigenvalue polynomials, in multiprecision floating
//! point. This is the only inexact computation in the crate.
//!
//! The Laurent coefficients `C_e` of `A₊` and `A₋` on a sector all commute, so
//! one eigenvector of a random rational combination of them is a joint
//! eigenvector of the whole family. Each eigenvalue `Σ c_e λ^e` is turned into a
//! polynomial in `y = λ²`, whose roots give `λ_k² `.

use super::{a_block, wronskian};
use crate::error::{Error, Result};
use crate::qops::{laurent_block, QSign};
use crate::report::{IdentityReport, Residual};
use crate::scalars::{fmt_scalar, LaurentPoly, Matrix, Scalar};
use crate::ScalarContext;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::Float;
use serde::Serialize;

pub const DEFAULT_DIGITS: u32 = 40;
/// Residuals must stay below `10^{-DEFAULT_THRESHOLD_EXP}`.
pub const DEFAULT_THRESHOLD_EXP: u32 = 20;

const SEED: u64 = 0x5eed_b37e;

#[derive(Clone, Debug, Serialize)]
pub struct BetheState {
    /// `λ_k⁺`, `l` of them.
    pub plus_roots: Vec<String>,
    /// `λ_k⁻`, `IM - l` of them.
    pub minus_roots: Vec<String>,
    pub rho_plus: String,
    pub rho_minus: String,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BetheRootSet {
    pub l: i64,
    pub states: Vec<BetheState>,
}

// ---- a bare complex type over rug::Float ----

#[derive(Clone, Debug)]
struct Cx {
    re: Float,
    im: Float,
}

impl Cx {
    fn new(re: Float, im: Float) -> Cx {
        Cx { re, im }
    }

    fn real(x: Float) -> Cx {
        let p = x.prec();
        Cx::new(x, Float::new(p))
    }

    fn zero(prec: u32) -> Cx {
        Cx::new(Float::new(prec), Float::new(prec))
    }

    fn one(prec: u32) -> Cx {
        Cx::real(Float::with_val(prec, 1))
    }

    fn from_q(x: &Scalar, prec: u32) -> Cx {
        let n = Float::with_val(prec, Float::parse(x.numer().to_string()).expect("integer literal"));
        let d = Float::with_val(prec, Float::parse(x.denom().to_string()).expect("integer literal"));
        Cx::real(n / d)
    }

    fn prec(&self) -> u32 {
        self.re.prec()
    }

    fn add(&self, o: &Cx) -> Cx {
        let p = self.prec();
        Cx::new(Float::with_val(p, &self.re + &o.re), Float::with_val(p, &self.im + &o.im))
    }

    fn sub(&self, o: &Cx) -> Cx {
        let p = self.prec();
        Cx::new(Float::with_val(p, &self.re - &o.re), Float::with_val(p, &self.im - &o.im))
    }

    fn mul(&self, o: &Cx) -> Cx {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        Cx::new(re, im)
    }

    fn norm2(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    fn recip(&self) -> Cx {
        let n = self.norm2();
        Cx::new(Float::with_val(self.prec(), &self.re / &n), -Float::with_val(self.prec(), &self.im / &n))
    }

    fn div(&self, o: &Cx) -> Cx {
        self.mul(&o.recip())
    }

    fn powi(&self, e: i64) -> Cx {
        let mut base = if e < 0 { self.recip() } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut r = Cx::one(self.prec());
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        r
    }

    /// Principal square root.
    fn sqrt(&self) -> Cx {
        let p = self.prec();
        let r = self.abs();
        let re = (Float::with_val(p, &r + &self.re) / 2u32).sqrt();
        let mut im = (Float::with_val(p, &r - &self.re) / 2u32).sqrt();
        if self.im.is_sign_negative() {
            im = -im;
        }
        Cx::new(re, im)
    }

    fn fmt(&self, digits: usize) -> String {
        let p = self.prec();
        let tiny = Float::with_val(p, 10u32).pow(-(digits as i32) - 5) * self.abs();
        let s = |x: &Float| x.to_string_radix(10, Some(digits));
        let (re0, im0) = (Float::with_val(p, self.re.abs_ref()) <= tiny, Float::with_val(p, self.im.abs_ref()) <= tiny);
        match (re0, im0) {
            (_, true) => s(&self.re),
            (true, false) => format!("{}i", s(&self.im)),
            _ if self.im.is_sign_negative() => format!("{}-{}i", s(&self.re), s(&Float::with_val(p, self.im.abs_ref()))),
            _ => format!("{}+{}i", s(&self.re), s(&self.im)),
        }
    }
}

fn horner(coeffs_low_high: &[Cx], z: &Cx) -> Cx {
    let mut acc = Cx::zero(z.prec());
    for c in coeffs_low_high.iter().rev() {
        acc = acc.mul(z).add(c);
    }
    acc
}

/// All roots of a polynomial with simple roots (Durand–Kerner, then Newton).
fn simple_roots(coeffs_low_high: &[Cx], prec: u32) -> Result<Vec<Cx>> {
    let n = coeffs_low_high.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs_low_high[n].clone();
    let monic: Vec<Cx> = coeffs_low_high.iter().map(|c| c.div(&lead)).collect();
    // Fujiwara-style radius
    let mut radius = Float::with_val(prec, 1);
    for (k, c) in monic[..n].iter().enumerate() {
        let b = Float::with_val(prec, c.abs().root((n - k) as u32)) * 2u32;
        if b > radius {
            radius = b;
        }
    }
    let seed = Cx::new(Float::with_val(prec, 0.4), Float::with_val(prec, 0.9));
    let mut z: Vec<Cx> = (0..n)
        .map(|k| {
            let w = seed.powi(k as i64 + 1);
            let s = Float::with_val(prec, &radius / w.abs());
            Cx::new(Float::with_val(prec, &w.re * &s), Float::with_val(prec, &w.im * &s))
        })
        .collect();
    let eps = Float::with_val(prec, Float::with_val(prec, 2).pow(-(prec as i32) + 16));
    let mut converged = false;
    for _ in 0..2000 {
        let mut worst = Float::new(prec);
        for i in 0..n {
            let mut den = Cx::one(prec);
            for j in 0..n {
                if i != j {
                    den = den.mul(&z[i].sub(&z[j]));
                }
            }
            let step = horner(&monic, &z[i]).div(&den);
            let rel = Float::with_val(prec, step.abs() / (Float::with_val(prec, 1) + z[i].abs()));
            if rel > worst {
                worst = rel;
            }
            z[i] = z[i].sub(&step);
        }
        if worst.is_nan() {
            return Err(Error::Numeric("root iteration produced NaN".into()));
        }
        if worst < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric(format!("Durand–Kerner did not converge for a degree-{n} polynomial")));
    }
    let deriv: Vec<Cx> = (1..=n)
        .map(|k| {
            let c = &monic[k];
            Cx::new(Float::with_val(prec, &c.re * k as u32), Float::with_val(prec, &c.im * k as u32))
        })
        .collect();
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = horner(&deriv, r);
            if d.abs().is_zero() {
                return Err(Error::Numeric("multiple root in a squarefree polynomial".into()));
            }
            *r = r.sub(&horner(&monic, r).div(&d));
        }
    }
    Ok(z)
}

// ---- exact polynomial helpers, coefficients low -> high ----

fn trim(mut p: Vec<Scalar>) -> Vec<Scalar> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    if p.is_empty() {
        p.push(Scalar::zero());
    }
    p
}

fn poly_rem(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let f = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[k + i] -= &f * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn poly_gcd(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn poly_div_exact(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![Scalar::zero(); a.len() - db];
    for k in (0..q.len()).rev() {
        let f = &r[k + db] / &b[db];
        for (i, c) in b.iter().enumerate() {
            r[k + i] -= &f * c;
        }
        q[k] = f;
    }
    q
}

fn squarefree(p: &[Scalar]) -> Vec<Scalar> {
    let d: Vec<Scalar> = p.iter().enumerate().skip(1).map(|(k, c)| c * Scalar::from_integer((k as i64).into())).collect();
    if d.is_empty() {
        return p.to_vec();
    }
    let g = poly_gcd(p, &d);
    // monic gcd, so the result keeps the leading coefficient of p
    let lead = g.last().unwrap().clone();
    let g: Vec<Scalar> = g.iter().map(|c| c / &lead).collect();
    poly_div_exact(p, &g)
}

// ---- linear algebra over Cx ----

fn to_cx(m: &Matrix, prec: u32) -> Vec<Vec<Cx>> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| Cx::from_q(&m[(r, c)], prec)).collect()).collect()
}

fn mat_vec(m: &[Vec<Cx>], v: &[Cx]) -> Vec<Cx> {
    m.iter().map(|row| row.iter().zip(v).fold(Cx::zero(v[0].prec()), |a, (x, y)| a.add(&x.mul(y)))).collect()
}

/// Null space of `a` (square), by elimination with full pivoting.
fn null_space(mut a: Vec<Vec<Cx>>, tol: &Float) -> Vec<Vec<Cx>> {
    let n = a.len();
    let prec = tol.prec();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut rank = 0;
    while rank < n {
        let mut best = (rank, rank, Float::new(prec));
        for r in rank..n {
            for c in rank..n {
                let v = a[r][cols[c]].abs();
                if v > best.2 {
                    best = (r, c, v);
                }
            }
        }
        if best.2 <= *tol {
            break;
        }
        a.swap(rank, best.0);
        cols.swap(rank, best.1);
        let piv = a[rank][cols[rank]].recip();
        for c in 0..n {
            a[rank][c] = a[rank][c].mul(&piv);
        }
        for r in 0..n {
            if r != rank {
                let f = a[r][cols[rank]].clone();
                for c in 0..n {
                    let t = f.mul(&a[rank][c]);
                    a[r][c] = a[r][c].sub(&t);
                }
            }
        }
        rank += 1;
    }
    (rank..n)
        .map(|free| {
            let mut v = vec![Cx::zero(prec); n];
            v[cols[free]] = Cx::one(prec);
            for r in 0..rank {
                v[cols[r]] = Cx::zero(prec).sub(&a[r][cols[free]]);
            }
            v
        })
        .collect()
}

// ---- eigenvalue data ----

struct Family {
    lo: i64,
    coeffs: Vec<Matrix>,
}

fn family(s: QSign, big_i: u32, m: usize, l: i64, ctx: &ScalarContext) -> Result<Family> {
    let im = big_i as i64 * m as i64;
    let polys: Vec<LaurentPoly> = laurent_block(|lam| a_block(s, big_i, m, l, &ctx.with_lambda(lam.clone())), -im - 2, im + 2)?;
    let dim = (polys.len() as f64).sqrt().round() as usize;
    let (lo, hi) = polys
        .iter()
        .filter_map(|p| p.span())
        .fold((i64::MAX, i64::MIN), |(a, b), (x, y)| (a.min(x), b.max(y)));
    if lo > hi {
        return Err(Error::Numeric("A-block vanishes identically".into()));
    }
    let coeffs = (lo..=hi).map(|e| Matrix::from_fn(dim, dim, |r, c| polys[r * dim + c].coeff(e))).collect();
    Ok(Family { lo, coeffs })
}

/// Eigenvalue coefficients `c_e` of `fam` on the joint eigenvector `v`.
fn eigen_coeffs(fam: &Family, v: &[Cx], tol: &Float) -> Result<Vec<(i64, Cx)>> {
    let k = (0..v.len()).max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap()).unwrap();
    let mut out = Vec::new();
    for (j, c) in fam.coeffs.iter().enumerate() {
        let cv = mat_vec(&to_cx(c, v[0].prec()), v);
        let val = cv[k].div(&v[k]);
        for (x, y) in cv.iter().zip(v) {
            if x.sub(&val.mul(y)).abs() > Float::with_val(tol.prec(), tol * (Float::with_val(tol.prec(), 1) + cv[k].abs())) {
                return Err(Error::Numeric("Laurent coefficients are not simultaneously diagonal on this eigenspace".into()));
            }
        }
        out.push((fam.lo + j as i64, val));
    }
    Ok(out)
}

fn eval_eigen(c: &[(i64, Cx)], lam: &Cx) -> Cx {
    c.iter().fold(Cx::zero(lam.prec()), |a, (e, x)| a.add(&x.mul(&lam.powi(*e))))
}

/// Roots `λ_k` and normalization `ρ` of `Σ c_e λ^e = ρ Π [λ/λ_k]`, `d` roots.
fn roots_of(c: &[(i64, Cx)], d: i64, prec: u32) -> Result<(Vec<Cx>, Cx)> {
    let mut ys = vec![Cx::zero(prec); d as usize + 1];
    for (e, x) in c {
        let is_zero = x.abs() <= Float::with_val(prec, Float::with_val(prec, 2).pow(-(prec as i32) / 2));
        if is_zero {
            continue;
        }
        if e.abs() > d || (e + d).rem_euclid(2) != 0 {
            return Err(Error::Numeric(format!("eigenvalue has a λ^{e} term outside the expected span ±{d}")));
        }
        ys[((e + d) / 2) as usize] = x.clone();
    }
    if d > 0 && ys[0].abs().is_zero() {
        return Err(Error::Numeric("a Bethe root at λ = 0".into()));
    }
    let y_roots = simple_roots(&ys, prec)?;
    let lams: Vec<Cx> = y_roots.iter().map(|y| y.sqrt()).collect();
    let rho = lams.iter().fold(ys[d as usize].clone(), |a, x| a.mul(x));
    Ok((lams, rho))
}

/// `h_I(μ) = Π_{k<I} [μ p^{I-2k}]` at a complex point.
fn h_weight_cx(big_i: u32, mu: &Cx, p: &Cx) -> Cx {
    let mut r = Cx::one(mu.prec());
    for k in 0..big_i as i64 {
        let z = mu.mul(&p.powi(big_i as i64 - 2 * k));
        r = r.mul(&z.sub(&z.recip()));
    }
    r
}

/// `φ^{±2M} 𝒜(qλ)/𝒜(λ/q) + (h_I(λq^{1/2})/h_I(λq^{-1/2}))^M`, or `None` at a
/// root where `h_I(λq^{±1/2})` vanishes. There both `A₊` and `A₋` vanish and the
/// ratio form says nothing (this needs `I ≥ 2`).
fn bethe_residual(c: &[(i64, Cx)], root: &Cx, sgn: i64, big_i: u32, m: usize, ctx: &ScalarContext, prec: u32) -> Result<Option<Float>> {
    let q = Cx::from_q(ctx.q(), prec);
    // q^{1/2} need not be rational here
    let p = match ctx.p() {
        Ok(p) => Cx::from_q(p, prec),
        Err(_) => q.sqrt(),
    };
    let phi = Cx::from_q(ctx.phi(), prec);
    let mi = m as i64;
    let (hp, hm) = (h_weight_cx(big_i, &root.mul(&p), &p), h_weight_cx(big_i, &root.div(&p), &p));
    let tiny = Float::with_val(prec, Float::with_val(prec, 2).pow(-(prec as i32) / 2));
    if hp.abs() < tiny || hm.abs() < tiny {
        return Ok(None);
    }
    let lhs = phi.powi(2 * sgn * mi).mul(&eval_eigen(c, &root.mul(&q)).div(&eval_eigen(c, &root.div(&q))));
    Ok(Some(lhs.add(&hp.div(&hm).powi(mi)).abs()))
}

/// Bethe roots of every joint eigenstate of `A±` on sector `l`, with the worst
/// Bethe-equation residual reported against `10^{-threshold_exp}`.
pub fn bethe_roots(
    big_i: u32,
    m: usize,
    l: i64,
    ctx: &ScalarContext,
    digits: u32,
    threshold_exp: u32,
) -> Result<(BetheRootSet, IdentityReport)> {
    let im = big_i as i64 * m as i64;
    if l < 0 || l > im {
        return Err(Error::Domain(format!("sector {l} outside 0..={im}")));
    }
    if wronskian(big_i, m, l, ctx).is_zero() {
        return Err(Error::Domain("vanishing Wronskian: the Bethe equations degenerate".into()));
    }
    let prec = (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 64;
    let report = IdentityReport::new("bethe")
        .param("I", big_i)
        .param("M", m)
        .param("l", l)
        .param("q", fmt_scalar(ctx.q()))
        .param("phi", fmt_scalar(ctx.phi()))
        .param("digits", digits)
        .param("threshold", format!("1e-{threshold_exp}"));
    let mut set = BetheRootSet { l, states: vec![] };
    let mut singular = 0usize;
    let report = report.timed(|| {
        let plus = family(QSign::Plus, big_i, m, l, ctx)?;
        let minus = family(QSign::Minus, big_i, m, l, ctx)?;
        let dim = plus.coeffs[0].rows();
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let x = plus.coeffs.iter().chain(&minus.coeffs).fold(Matrix::zeros(dim, dim), |acc, c| {
            acc.add(&c.scale(&Scalar::new(rng.gen_range(1..=97i64).into(), rng.gen_range(1..=13i64).into())))
        });
        let cp = squarefree(&x.char_poly());
        let cpx: Vec<Cx> = cp.iter().map(|c| Cx::from_q(c, prec)).collect();
        let mus = simple_roots(&cpx, prec)?;
        let xc = to_cx(&x, prec);
        let tol = Float::with_val(prec, Float::with_val(prec, 2).pow(-(prec as i32) / 2))
            * Float::with_val(prec, 1 + xc.iter().flatten().fold(Float::new(prec), |a, z| a.max(&z.abs())));
        let threshold = Float::with_val(prec, Float::with_val(prec, 10).pow(-(threshold_exp as i32)));
        let mut worst = Float::new(prec);
        let mut total = 0;
        for mu in &mus {
            let shifted: Vec<Vec<Cx>> = xc
                .iter()
                .enumerate()
                .map(|(r, row)| row.iter().enumerate().map(|(c, z)| if r == c { z.sub(mu) } else { z.clone() }).collect())
                .collect();
            let ns = null_space(shifted, &tol);
            let v = ns.first().ok_or_else(|| Error::Numeric(format!("no eigenvector at eigenvalue {}", mu.fmt(12))))?;
            total += ns.len();
            let cplus = eigen_coeffs(&plus, v, &tol)?;
            let cminus = eigen_coeffs(&minus, v, &tol)?;
            let (rp, rho_p) = roots_of(&cplus, l, prec)?;
            let (rm, rho_m) = roots_of(&cminus, im - l, prec)?;
            for (roots, c, sgn) in [(&rp, &cplus, 1), (&rm, &cminus, -1)] {
                for r in roots.iter() {
                    let Some(res) = bethe_residual(c, r, sgn, big_i, m, ctx, prec)? else {
                        singular += 1;
                        continue;
                    };
                    if res.is_nan() || res > worst {
                        worst = res;
                    }
                }
            }
            let f = |v: &[Cx]| v.iter().map(|z| z.fmt(digits as usize)).collect();
            set.states.push(BetheState {
                plus_roots: f(&rp),
                minus_roots: f(&rm),
                rho_plus: rho_p.fmt(digits as usize),
                rho_minus: rho_m.fmt(digits as usize),
                multiplicity: ns.len(),
            });
        }
        if total != dim {
            return Err(Error::Numeric(format!("{total} eigenvectors found in a {dim}-dimensional sector: not diagonalizable at this precision")));
        }
        let pass = !worst.is_nan() && worst < threshold;
        Ok(Residual::Numeric { max: worst.to_string_radix(10, Some(6)), pass })
    })?;
    set.states.sort_by(|a, b| (&a.plus_roots, &a.minus_roots).cmp(&(&b.plus_roots, &b.minus_roots)));
    Ok((set, report.param("singular_roots", singular)))
}

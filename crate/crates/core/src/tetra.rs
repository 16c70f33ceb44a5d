//! The 3D R-matrix on three Fock spaces, its polynomials `Q_n`, dressing,
//! and an exact tetrahedron-equation checker.

use crate::error::Result;
use crate::report::{Residual, ResidualAcc};
use crate::scalars::{phi_regularized, pow, qpochhammer, Scalar};
use num_traits::{One, Zero};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::RwLock;

/// `(n1, n2, n3, n1', n2', n3')`
pub type Idx6 = [i64; 6];

fn conserved(ix: &Idx6) -> bool {
    ix[0] + ix[1] == ix[3] + ix[4] && ix[1] + ix[2] == ix[4] + ix[5]
}

/// `Q_n(x, y, z)` by iterating
/// `Q_{n+1}(x,y,z) = (x-1)(z-1) Q_n(xq², y, zq²) + xz(y-1) q^{2n} Q_n(x, yq², z)` from `Q_0 = 1`.
pub fn qn_recurrence(n: u32, x: &Scalar, y: &Scalar, z: &Scalar, q: &Scalar) -> Scalar {
    let q2 = q * q;
    let n = n as usize;
    // level k holds Q_k(x q^{2a}, y q^{2b}, z q^{2a}) for a + b = n - k, indexed by a
    let mut level: Vec<Scalar> = vec![Scalar::one(); n + 1];
    for k in 0..n {
        let width = n - k; // entries at level k+1: a in 0..width
        let mut next = Vec::with_capacity(width);
        for a in 0..width {
            let b = width - 1 - a;
            let xs = x * pow(&q2, a as i64);
            let ys = y * pow(&q2, b as i64);
            let zs = z * pow(&q2, a as i64);
            // Q_k at (a+1, b) is level[a+1]; at (a, b+1) is level[a]
            let v = (&xs - Scalar::one()) * (&zs - Scalar::one()) * &level[a + 1]
                + &xs * &zs * (&ys - Scalar::one()) * pow(&q2, k as i64) * &level[a];
            next.push(v);
        }
        level = next;
    }
    level.swap_remove(0)
}

/// `Q_n(x, y, z) = (-x)^n q^{n(n-1)} 2φ̄1(q^{-2n}, q^{2-2n}/(xy); q^{2-2n}/x; q², yz q^{2n})`.
pub fn qn_closed(n: u32, x: &Scalar, y: &Scalar, z: &Scalar, q: &Scalar) -> Scalar {
    let ni = n as i64;
    let q2 = q * q;
    let pre = pow(&-x, ni) * pow(q, ni * (ni - 1));
    let c = pow(q, 2 - 2 * ni);
    pre * phi_regularized(n, &[&c / (x * y)], &[&c / x], &q2, &(y * z * pow(q, 2 * ni)))
}

/// Matrix element of the 3D R-matrix, finite r-sum form.
///
/// Evaluated for any integers with `n2 >= 0`; negative `n3` is allowed so the
/// vanishing range `-(n2-n2') <= n3 <= -1` can be probed.
pub fn r3_formula(ix: &Idx6, q: &Scalar) -> Scalar {
    let [n1, n2, n3, m1, _m2, m3] = *ix;
    if !conserved(ix) || n2 < 0 {
        return Scalar::zero();
    }
    let q2 = q * q;
    let mut s = Scalar::zero();
    let a = pow(q, -2 * m1);
    let b = pow(q, 2 + 2 * n1);
    for r in 0..=n2 {
        let t = qpochhammer(&a, &q2, n2 - r).expect("nonneg length")
            / qpochhammer(&q2, &q2, n2 - r).expect("nonneg length")
            * qpochhammer(&b, &q2, r).expect("nonneg length")
            / qpochhammer(&q2, &q2, r).expect("nonneg length")
            * pow(q, -2 * r * (n3 + m1 + 1));
        s += t;
    }
    pow(q, n2 * (n2 + 1) - (n2 - m1) * (n2 - m3)) * s
}

/// Matrix element; zero for negative indices or when conservation fails.
pub fn r3_element(ix: &Idx6, q: &Scalar) -> Scalar {
    if ix.iter().any(|&n| n < 0) {
        return Scalar::zero();
    }
    r3_formula(ix, q)
}

/// Same element through `Q_{n2}` and the `1/(q²;q²)_{n2}` normalization.
pub fn r3_via_qn(ix: &Idx6, q: &Scalar, closed: bool) -> Scalar {
    let [_, n2, _, m1, m2, m3] = *ix;
    if ix.iter().any(|&n| n < 0) || !conserved(ix) {
        return Scalar::zero();
    }
    let (x, y, z) = (pow(q, -2 * m1), pow(q, -2 * m2), pow(q, -2 * m3));
    let qn = if closed {
        qn_closed(n2 as u32, &x, &y, &z, q)
    } else {
        qn_recurrence(n2 as u32, &x, &y, &z, q)
    };
    let q2 = q * q;
    pow(q, n2 * (n2 + 1) - (n2 - m1) * (n2 - m3)) / qpochhammer(&q2, &q2, n2).expect("nonneg")
        * qn
}

/// Dressing parameters for one `R_{ijk}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DressingFields {
    pub lambda: [Scalar; 3],
    pub mu: [Scalar; 3],
    pub c: [Scalar; 3],
}

impl DressingFields {
    pub fn unit() -> Self {
        let one = Scalar::one;
        DressingFields {
            lambda: [one(), one(), one()],
            mu: [one(), one(), one()],
            c: [one(), one(), one()],
        }
    }
}

/// `(μ_k/λ_i)^{n_j} R (λ_j/λ_k)^{n'_i} (μ_i/μ_j)^{n'_k}`, conjugated by `Π c^{N}`.
pub fn r3_dressed(ix: &Idx6, f: &DressingFields, q: &Scalar) -> Scalar {
    let base = r3_element(ix, q);
    if base.is_zero() {
        return base;
    }
    base * dressing_factor(ix, f)
}

fn dressing_factor(ix: &Idx6, f: &DressingFields) -> Scalar {
    let [n1, n2, n3, m1, m2, m3] = *ix;
    let (l, m, c) = (&f.lambda, &f.mu, &f.c);
    pow(&(&m[2] / &l[0]), n2)
        * pow(&(&l[1] / &l[2]), m1)
        * pow(&(&m[0] / &m[1]), m3)
        * pow(&c[0], n1 - m1)
        * pow(&c[1], n2 - m2)
        * pow(&c[2], n3 - m3)
}

/// Memoized element evaluator, safe to share between threads.
pub struct Tetra3Element {
    q: Scalar,
    memo: RwLock<HashMap<Idx6, Scalar>>,
}

impl Tetra3Element {
    pub fn new(q: Scalar) -> Self {
        Tetra3Element {
            q,
            memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn q(&self) -> &Scalar {
        &self.q
    }

    pub fn get(&self, ix: &Idx6) -> Scalar {
        if ix.iter().any(|&n| n < 0) || !conserved(ix) {
            return Scalar::zero();
        }
        if let Some(v) = self.memo.read().expect("memo poisoned").get(ix) {
            return v.clone();
        }
        let v = r3_element(ix, &self.q);
        self.memo
            .write()
            .expect("memo poisoned")
            .insert(*ix, v.clone());
        v
    }

    pub fn cached(&self) -> usize {
        self.memo.read().expect("memo poisoned").len()
    }
}

/// Dressing parameters on the six spaces of the tetrahedron equation.
#[derive(Clone, Debug, PartialEq)]
pub struct SixFields {
    pub lambda: [Scalar; 6],
    pub mu: [Scalar; 6],
    pub c: [Scalar; 6],
}

impl SixFields {
    fn for_spaces(&self, s: [usize; 3]) -> DressingFields {
        DressingFields {
            lambda: s.map(|k| self.lambda[k].clone()),
            mu: s.map(|k| self.mu[k].clone()),
            c: s.map(|k| self.c[k].clone()),
        }
    }
}

struct Dressed<'a> {
    r: &'a Tetra3Element,
    fields: Option<[DressingFields; 4]>,
}

impl Dressed<'_> {
    /// `which` = 0..4 for R_123, R_145, R_246, R_356
    fn el(&self, which: usize, ix: Idx6) -> Scalar {
        let v = self.r.get(&ix);
        match (&self.fields, v.is_zero()) {
            (Some(f), false) => v * dressing_factor(&ix, &f[which]),
            _ => v,
        }
    }
}

/// Both sides of the tetrahedron equation for fixed external indices
/// `[n1..n6, n1''..n6'']`.
///
/// Every internal index is fixed by conservation once one free index is
/// chosen; the free index ranges over `0..=S` with `S` the sum of the
/// incoming indices, and out-of-range choices give zero terms.
pub fn tetrahedron_sides(
    ext: &[i64; 12],
    r: &Tetra3Element,
    fields: Option<&SixFields>,
) -> (Scalar, Scalar) {
    let d = Dressed {
        r,
        fields: fields.map(|f| {
            [
                f.for_spaces([0, 1, 2]),
                f.for_spaces([0, 3, 4]),
                f.for_spaces([1, 3, 5]),
                f.for_spaces([2, 4, 5]),
            ]
        }),
    };
    let [n1, n2, n3, n4, n5, n6, o1, o2, o3, o4, o5, o6] = *ext;
    let bound: i64 = ext[..6].iter().sum();
    let mut lhs = Scalar::zero();
    // R_{n1 n2 n3}^{a1 a2 a3} R_{a1 n4 n5}^{o1 a4 a5} R_{a2 a4 n6}^{o2 o4 a6} R_{a3 a5 a6}^{o3 o5 o6}
    for a2 in 0..=bound {
        let a1 = n1 + n2 - a2;
        let a3 = n2 + n3 - a2;
        let a4 = a1 + n4 - o1;
        let a5 = n4 + n5 - a4;
        let a6 = a4 + n6 - o4;
        if [a1, a3, a4, a5, a6].iter().any(|&x| x < 0 || x > bound) {
            continue;
        }
        let t = d.el(0, [n1, n2, n3, a1, a2, a3]);
        if t.is_zero() {
            continue;
        }
        let t = t * d.el(1, [a1, n4, n5, o1, a4, a5]);
        if t.is_zero() {
            continue;
        }
        let t = t * d.el(2, [a2, a4, n6, o2, o4, a6]);
        if t.is_zero() {
            continue;
        }
        lhs += t * d.el(3, [a3, a5, a6, o3, o5, o6]);
    }
    let mut rhs = Scalar::zero();
    // R_{n3 n5 n6}^{b3 b5 b6} R_{n2 n4 b6}^{b2 b4 o6} R_{n1 b4 b5}^{b1 o4 o5} R_{b1 b2 b3}^{o1 o2 o3}
    for b5 in 0..=bound {
        let b3 = n3 + n5 - b5;
        let b6 = n5 + n6 - b5;
        let b4 = n4 + b6 - o6;
        let b2 = n2 + n4 - b4;
        let b1 = n1 + b4 - o4;
        if [b1, b2, b3, b4, b6].iter().any(|&x| x < 0 || x > bound) {
            continue;
        }
        let t = d.el(3, [n3, n5, n6, b3, b5, b6]);
        if t.is_zero() {
            continue;
        }
        let t = t * d.el(2, [n2, n4, b6, b2, b4, o6]);
        if t.is_zero() {
            continue;
        }
        let t = t * d.el(1, [n1, b4, b5, b1, o4, o5]);
        if t.is_zero() {
            continue;
        }
        rhs += t * d.el(0, [b1, b2, b3, o1, o2, o3]);
    }
    (lhs, rhs)
}

/// Exact residual of the tetrahedron equation at one external tuple.
pub fn verify_tetrahedron(
    ext: &[i64; 12],
    r: &Tetra3Element,
    fields: Option<&SixFields>,
) -> Result<Residual> {
    let (l, rr) = tetrahedron_sides(ext, r, fields);
    let mut acc = ResidualAcc::new();
    acc.observe_pair(&l, &rr);
    Ok(acc.residual())
}

/// All external tuples with entries in `0..=k`.
pub fn all_tuples(k: i64) -> Vec<[i64; 12]> {
    let base = (k + 1) as usize;
    let total = base.pow(12);
    (0..total)
        .map(|mut c| {
            let mut t = [0i64; 12];
            for slot in t.iter_mut() {
                *slot = (c % base) as i64;
                c /= base;
            }
            t
        })
        .collect()
}

/// Residual over many external tuples, in parallel; returns the residual and
/// the number of tuples whose two sides are nonzero.
pub fn verify_tetrahedron_batch(
    tuples: &[[i64; 12]],
    r: &Tetra3Element,
    fields: Option<&SixFields>,
) -> (Residual, usize) {
    let parts: Vec<(ResidualAcc, usize)> = tuples
        .par_iter()
        .map(|ext| {
            let (l, rr) = tetrahedron_sides(ext, r, fields);
            let mut acc = ResidualAcc::new();
            acc.observe_pair(&l, &rr);
            (acc, usize::from(!l.is_zero()))
        })
        .collect();
    let mut acc = ResidualAcc::new();
    let mut nontrivial = 0;
    for (a, n) in parts {
        acc.absorb(a);
        nontrivial += n;
    }
    (acc.residual(), nontrivial)
}

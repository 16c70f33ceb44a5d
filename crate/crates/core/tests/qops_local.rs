use num_traits::{One, Signed, ToPrimitive, Zero};
use sixv_core::qops::{
    a_minus_element, a_minus_rational, a_minus_stripped_factor, a_plus_element, FockRep, VermaRep,
};
use sixv_core::rmatrix::{rij_single_sum, GenericWeight, WeightParam};
use sixv_core::scalars::{brace, bracket, frac, int, pow, sign, Matrix, Scalar, ScalarContext};

const D: usize = 9;

fn ctx() -> ScalarContext {
    ScalarContext::new(frac(1, 3), frac(5, 7), frac(2, 5)).unwrap()
}

fn diag(f: impl Fn(i64) -> Scalar) -> Matrix {
    Matrix::from_fn(D, D, |r, c| if r == c { f(r as i64) } else { int(0) })
}

/// Compares `[A]_{n,i}^{n',i'}` with `⟨n| ops[i][i'] |n'⟩` for `n, n' ≤ 4`.
fn compare(big_i: u32, ops: &[Vec<Matrix>], f: impl Fn(i64, i64, i64, i64) -> Scalar) -> Vec<String> {
    let mut bad = Vec::new();
    for i in 0..=big_i as i64 {
        for ip in 0..=big_i as i64 {
            for n in 0..5 {
                for np in 0..5 {
                    let want = &ops[i as usize][ip as usize][(n as usize, np as usize)];
                    let got = f(n, i, np, ip);
                    if &got != want {
                        bad.push(format!("({n},{i};{np},{ip})"));
                    }
                }
            }
        }
    }
    bad
}

#[test]
fn fock_algebra_relations() {
    let q = frac(2, 7);
    let f = FockRep::new(q.clone(), D);
    let (ap, am) = (f.a_plus(), f.a_minus());
    let lhs = ap.mul(&am).scale(&q).sub(&am.mul(&ap).scale(&q.recip()));
    let q2n = f.q_n(2);
    let one_minus = Matrix::identity(D).sub(&ap.mul(&am));
    // the last ket is the truncation edge
    for r in 0..D - 1 {
        for c in 0..D - 1 {
            let want = if r == c { bracket(&q) } else { int(0) };
            assert_eq!(lhs[(r, c)], want);
            assert_eq!(q2n[(r, c)], one_minus[(r, c)]);
            assert_eq!(FockRep::bra_ket(&Matrix::identity(D), r, c), if r == c { int(1) } else { int(0) });
        }
    }
}

#[test]
fn verma_relations_and_casimir() {
    let q = frac(1, 3);
    for w in [WeightParam::NonNeg(3), WeightParam::Generic(GenericWeight::new(frac(4, 9), &q).unwrap())] {
        let v = VermaRep::new(w, q.clone(), 6);
        let (e, f) = (v.e(), v.f());
        let comm = e.mul(&f).sub(&f.mul(&e));
        let qh = v.q_h(1).sub(&v.q_h(-1)).scale(&bracket(&q).recip());
        let c = v.casimir();
        let qhe = v.q_h(1).mul(&e).mul(&v.q_h(-1));
        for r in 0..5 {
            for col in 0..5 {
                assert_eq!(comm[(r, col)], qh[(r, col)]);
                assert_eq!(qhe[(r, col)], e[(r, col)].clone() * &q * &q);
                let want = if r == col { v.casimir_value() } else { int(0) };
                assert_eq!(c[(r, col)], want);
            }
        }
        // the other ordering of the Casimir
        let c2 = e.mul(&f).scale(&(bracket(&q) * bracket(&q))).add(&v.q_h(1).scale(&q.recip())).add(&v.q_h(-1).scale(&q));
        for r in 0..5 {
            assert_eq!(c2[(r, r)], v.casimir_value());
        }
    }
}

#[test]
fn verma_integer_weight_has_finite_quotient() {
    // F v_J = 0, so v_0..v_J span an invariant subspace; v_{J+1} carries weight -J-2.
    let q = frac(1, 3);
    for j in 0..4u32 {
        let v = VermaRep::new(WeightParam::NonNeg(j), q.clone(), j as usize + 3);
        let f = v.f();
        assert!(f[(j as usize + 1, j as usize)].is_zero());
        assert!(!f[(j as usize + 2, j as usize + 1)].is_zero());
        assert_eq!(v.q_h(1)[(j as usize + 1, j as usize + 1)], pow(&q, -(j as i64) - 2));
    }
}

#[test]
fn a_minus_spin_half_closed_form() {
    let c = ctx();
    let (lam, phi, q) = (c.lambda().clone(), c.phi().clone(), c.q().clone());
    let fr = FockRep::new(q.clone(), D);
    let pre = diag(|n| pow(&phi, 2 * n));
    let qn = fr.q_n(1);
    let li = lam.recip();
    let ops = vec![
        vec![pre.mul(&diag(|n| bracket(&(&li * pow(&q, n))))), pre.mul(&fr.a_plus()).scale(&li)],
        vec![pre.mul(&fr.a_minus()).scale(&-q.recip()), pre.mul(&qn)],
    ];
    let w = WeightParam::NonNeg(1);
    let bad = compare(1, &ops, |n, i, np, ip| a_minus_element(n, i, np, ip, &w, &c).unwrap());
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn a_plus_spin_half_closed_form() {
    let c = ctx();
    let (lam, phi, q) = (c.lambda().clone(), c.phi().clone(), c.q().clone());
    let fr = FockRep::new(q.clone(), D);
    let pre = diag(|n| pow(&phi, -2 * n));
    let li = lam.recip();
    let ops = vec![
        vec![pre.mul(&fr.q_n(1)), pre.mul(&fr.a_minus()).scale(&-q.recip())],
        vec![pre.mul(&fr.a_plus()).scale(&li), pre.mul(&diag(|n| bracket(&(&li * pow(&q, n)))))],
    ];
    let w = WeightParam::NonNeg(1);
    let bad = compare(1, &ops, |n, i, np, ip| a_plus_element(n, i, np, ip, &w, &c).unwrap());
    assert!(bad.is_empty(), "{bad:?}");
}

fn spin_one_plus_ops(c: &ScalarContext) -> Vec<Vec<Matrix>> {
    let (lam, phi, q) = (c.lambda().clone(), c.phi().clone(), c.q().clone());
    let p = c.p().unwrap().clone();
    let fr = FockRep::new(q.clone(), D);
    let (ap, am) = (fr.a_plus(), fr.a_minus());
    let pre = diag(|n| pow(&phi, -2 * n));
    let qn = fr.q_n(1);
    let q2n = fr.q_n(2);
    let bq = brace(&q);
    let li = lam.recip();
    // [λ q^{-N ± 1/2}]
    let lm = diag(|n| bracket(&(&lam * pow(&q, -n) / &p)));
    let lp = diag(|n| bracket(&(&lam * pow(&q, -n) * &p)));
    let qi = q.recip();
    // the (1,2) entry carries q^{-3/2}{q}; a q^{-5/2} there would break the
    // gauge-invariant loop product with the (2,1) entry
    let mid = q2n.scale(&(&li * &bq)).sub(&Matrix::identity(D).scale(&(&li * &qi))).sub(&Matrix::identity(D).scale(&lam));
    let raw = vec![
        vec![q2n.clone(), am.mul(&qn).scale(&-&qi), am.mul(&am).scale(&(&qi * &qi))],
        vec![ap.mul(&qn).scale(&(&li * &bq)), mid, am.mul(&lp).scale(&(pow(&p, -3) * &bq))],
        vec![ap.mul(&ap).scale(&(&li * &li)), ap.mul(&lm).scale(&-(&p * &li)), lm.mul(&lp)],
    ];
    raw.into_iter().map(|row| row.into_iter().map(|m| pre.mul(&m)).collect()).collect()
}

#[test]
fn a_plus_spin_one_closed_form() {
    let c = ctx();
    let ops = spin_one_plus_ops(&c);
    let w = WeightParam::NonNeg(2);
    let bad = compare(2, &ops, |n, i, np, ip| a_plus_element(n, i, np, ip, &w, &c).unwrap());
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn a_minus_spin_one_is_the_reflected_plus_form() {
    // reflect rows and columns, φ -> 1/φ
    let c = ctx();
    let ops = spin_one_plus_ops(&c.with_phi(c.phi().recip()));
    let refl: Vec<Vec<Matrix>> = (0..3).map(|i| (0..3).map(|ip| ops[2 - i][2 - ip].clone()).collect()).collect();
    let w = WeightParam::NonNeg(2);
    let bad = compare(2, &refl, |n, i, np, ip| a_minus_element(n, i, np, ip, &w, &c).unwrap());
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn plus_equals_reflected_minus_with_inverted_field() {
    let c = ctx();
    let ci = c.with_phi(c.phi().recip());
    for big_i in 0..=3u32 {
        let w = WeightParam::NonNeg(big_i);
        let bi = big_i as i64;
        for n in 0..=4 {
            for np in 0..=4 {
                for i in 0..=bi {
                    for ip in 0..=bi {
                        assert_eq!(
                            a_plus_element(n, i, np, ip, &w, &c).unwrap(),
                            a_minus_element(n, bi - i, np, bi - ip, &w, &ci).unwrap(),
                            "I={big_i} ({n},{i};{np},{ip})"
                        );
                    }
                }
            }
        }
    }
}

/// `A₊(φ)` and the full transpose of the reflected `A₋(1/φ)` differ by left and right
/// diagonal factors: the ratio table has rank one.
#[test]
fn plus_is_diagonally_equivalent_to_transposed_minus() {
    let c = ctx();
    let ci = c.with_phi(c.phi().recip());
    for big_i in 1..=2u32 {
        let w = WeightParam::NonNeg(big_i);
        let bi = big_i as i64;
        let mut cells = std::collections::HashMap::new();
        for n in 0..=4 {
            for np in 0..=4 {
                for i in 0..=bi {
                    for ip in 0..=bi {
                        let a = a_plus_element(n, i, np, ip, &w, &c).unwrap();
                        let b = a_minus_element(np, bi - ip, n, bi - i, &w, &ci).unwrap();
                        assert_eq!(a.is_zero(), b.is_zero());
                        if !a.is_zero() {
                            cells.insert((n, i, np, ip), a / b);
                        }
                    }
                }
            }
        }
        for (&(n1, i1, m1, j1), r1) in &cells {
            for (&(n2, i2, m2, j2), r2) in &cells {
                if let (Some(r3), Some(r4)) = (cells.get(&(n1, i1, m2, j2)), cells.get(&(n2, i2, m1, j1))) {
                    assert_eq!(r1 * r2, r3 * r4);
                }
            }
        }
    }
}

#[test]
fn conservation_violating_entries_vanish() {
    let c = ctx();
    let w = WeightParam::NonNeg(2);
    assert!(a_minus_element(1, 0, 2, 0, &w, &c).unwrap().is_zero());
    assert!(a_plus_element(1, 1, 3, 0, &w, &c).unwrap().is_zero());
    assert!(a_minus_element(-1, 0, 0, 0, &w, &c).is_err());
    assert!(a_plus_element(0, 3, 0, 0, &w, &c).is_err());
}

#[test]
fn generic_minus_factorizes() {
    let c = ctx();
    let q = c.q().clone();
    for big_i in 0..=3u32 {
        let w = WeightParam::NonNeg(big_i);
        let cont = WeightParam::Generic(GenericWeight::continued(big_i as i64, &q));
        let k = a_minus_stripped_factor(big_i, &c).unwrap();
        for n in 0..=3 {
            for i in 0..=big_i as i64 {
                for ip in 0..=big_i as i64 {
                    let np = n + i - ip;
                    if np < 0 {
                        continue;
                    }
                    let full = a_minus_element(n, i, np, ip, &w, &c).unwrap();
                    assert_eq!(a_minus_rational(n, i, np, ip, &w, &c).unwrap() * &k, full);
                    assert_eq!(a_minus_rational(n, i, np, ip, &cont, &c).unwrap() * &k, full);
                    let np_plus = n + ip - i;
                    if np_plus >= 0 {
                        assert_eq!(
                            a_plus_element(n, i, np_plus, ip, &cont, &c).unwrap(),
                            a_plus_element(n, i, np_plus, ip, &w, &c).unwrap()
                        );
                    }
                }
            }
        }
    }
}

/// Leading `λ` power of `A₊` entries: `2i' - i` for `i > i'`, else `i`, with the
/// next term two orders down.
#[test]
fn plus_degree_profile() {
    let c = ctx();
    for big_i in 1..=2u32 {
        let w = WeightParam::NonNeg(big_i);
        for n in 0..=3i64 {
            for i in 0..=big_i as i64 {
                for ip in 0..=big_i as i64 {
                    let np = n + ip - i;
                    if np < 0 {
                        continue;
                    }
                    let poly = sixv_core::scalars::reconstruct_laurent(
                        |l| a_plus_element(n, i, np, ip, &w, &c.with_lambda(l.clone())),
                        sixv_core::scalars::sample_nodes(),
                        -8,
                        8,
                        3,
                    )
                    .unwrap();
                    let (_, hi) = poly.span().unwrap();
                    let want = if i > ip { 2 * ip - i } else { i };
                    assert_eq!(hi, want, "I={big_i} ({n},{i};{np},{ip})");
                    assert!(poly.coeff(hi - 1).is_zero());
                }
            }
        }
    }
}

#[test]
fn chain_exponent_identity() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
    for _ in 0..500 {
        let m = rng.gen_range(1..6usize);
        let big_i = rng.gen_range(1..4i64);
        let i: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=big_i)).collect();
        // same total, new distribution
        let mut ip = vec![0i64; m];
        let mut left: i64 = i.iter().sum();
        for k in 0..m {
            let room = big_i * (m - k - 1) as i64;
            let lo = (left - room).max(0);
            let hi = left.min(big_i);
            ip[k] = rng.gen_range(lo..=hi);
            left -= ip[k];
        }
        let mut n = vec![0i64; m + 1];
        n[0] = rng.gen_range(0..8) + 2 * big_i * m as i64;
        for k in 0..m {
            n[k + 1] = n[k] + i[k] - ip[k];
        }
        assert_eq!(n[m], n[0]);
        let lhs: i64 = (0..m).map(|k| (i[k] - ip[k]) * (n[k] + n[k + 1])).sum();
        let total: i64 = (0..m).map(|k| i[k] - ip[k]).sum();
        assert_eq!(lhs, total * total);
    }
}

/// `R_{J,I}(μ q^{-(J+1)/2}; φ)` times the compensating factor
/// `φ^J (-1)^{I-i} μ^{-i'} q^{(i-i')(n+n') + J(3i'-i)/2 + (i'-i)/2}` tends to `A₋(μ)`,
/// with relative error `O(q^J)`.
#[test]
fn minus_is_the_large_spin_limit() {
    // q^{1/2} must be rational, so q = 1/4
    let p = frac(1, 2);
    let mu = frac(3, 7);
    let phi = frac(2, 5);
    let c = ScalarContext::new(p.clone(), mu.clone(), phi.clone()).unwrap();
    let q = c.q().clone();
    for big_i in 1..=2u32 {
        let w = WeightParam::NonNeg(big_i);
        let bi = big_i as i64;
        let mut prev: Option<f64> = None;
        for big_j in [20u32, 24, 28] {
            let jj = big_j as i64;
            let cj = c.with_lambda(&mu * pow(&p, -(jj + 1)));
            let wj = WeightParam::NonNeg(big_j);
            let mut worst = 0f64;
            for n in 0..=3i64 {
                for i in 0..=bi {
                    for ip in 0..=bi {
                        let np = n + i - ip;
                        if np < 0 {
                            continue;
                        }
                        let r = rij_single_sum(&[n, i, np, ip], &wj, &w, &cj).unwrap();
                        let u = pow(&phi, jj)
                            * sign(bi - i)
                            * pow(&mu, -ip)
                            * pow(&q, (i - ip) * (n + np))
                            * pow(&p, jj * (3 * ip - i) + ip - i);
                        let a = a_minus_element(n, i, np, ip, &w, &c).unwrap();
                        let dev = (r * u / a - Scalar::one()).abs().to_f64().unwrap();
                        worst = worst.max(dev);
                    }
                }
            }
            assert!(worst < 64.0 * pow(&q, jj).to_f64().unwrap(), "I={big_i} J={big_j}: {worst:e}");
            if let Some(pv) = prev {
                assert!(worst <= pv);
            }
            prev = Some(worst);
        }
    }
}

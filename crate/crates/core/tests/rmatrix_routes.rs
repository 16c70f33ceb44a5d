use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixv_core::rmatrix::{
    corner_entry, index_tuples, leading_coefficient, permutation_constant, r_one_closed, rij,
    rij_double_sum, rij_pole_expansion, rij_single_sum, rij_two_layer, FieldSet, GenericWeight,
    Route, SpinRMatrix, SumPolicy, WeightParam,
};
use sixv_core::scalars::{frac, int, pow, qpochhammer, Scalar, ScalarContext};
use sixv_core::tetra::r3_element;
use sixv_core::Error;

fn nn(n: u32) -> WeightParam {
    WeightParam::NonNeg(n)
}

fn rand_rat(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Scalar {
    loop {
        let x = frac(rng.gen_range(lo..hi), rng.gen_range(2..13));
        if !x.is_zero() && !x.abs().is_one() {
            return x;
        }
    }
}

fn random_ctx(rng: &mut ChaCha8Rng) -> ScalarContext {
    let p = loop {
        let p = frac(rng.gen_range(1..9), rng.gen_range(2..12));
        if p.abs() != int(1) {
            break p;
        }
    };
    ScalarContext::new(p, rand_rat(rng, -9, 10), rand_rat(rng, -9, 10)).unwrap()
}

#[test]
fn four_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..2 {
        let ctx = random_ctx(&mut rng);
        for a in 1..=3u32 {
            for b in 1..=3u32 {
                for ix in index_tuples(&nn(a), &nn(b), 6) {
                    let s = rij_single_sum(&ix, &nn(a), &nn(b), &ctx).unwrap();
                    let d = rij_double_sum(&ix, a, &nn(b), &ctx).unwrap();
                    let p = rij_pole_expansion(&ix, a, &nn(b), &ctx).unwrap();
                    assert_eq!(s, d, "double {a} {b} {ix:?}");
                    assert_eq!(s, p, "pole {a} {b} {ix:?}");
                    if a <= 2 && b <= 2 {
                        let t = rij(Route::TwoLayer, &ix, &nn(a), &nn(b), &ctx).unwrap();
                        assert_eq!(s, t, "two-layer {a} {b} {ix:?}");
                    }
                }
            }
        }
    }
}

/// Brute-force k₁-sum of the two-layer formula, first `n` terms.
fn two_layer_partial(ix: &[i64; 4], bi: i64, bj: i64, w: &Scalar, q: &Scalar, n: i64) -> Scalar {
    let [i, j, ip, jp] = *ix;
    let mut s = Scalar::zero();
    for k1 in 0..n {
        let k2 = k1 + i - ip;
        if k2 < 0 {
            continue;
        }
        s += pow(w, k1)
            * r3_element(&[j, i, k1, jp, ip, k2], q)
            * r3_element(&[bj - j, bi - i, k2, bj - jp, bi - ip, k1], q);
    }
    s
}

#[test]
fn two_layer_closed_form_matches_partial_sums() {
    let q = frac(1, 2);
    let tol = pow(&frac(1, 10), 40);
    for (a, b) in [(1u32, 1u32), (1, 2), (2, 2)] {
        let w = pow(&q, (a + b + 1) as i64);
        let f = FieldSet::new(w.clone(), int(1), int(1), int(1), int(1)).unwrap();
        for ix in index_tuples(&nn(a), &nn(b), (a + b) as i64) {
            let exact = rij_two_layer(&ix, a, b, &f, &q, SumPolicy::Convergent).unwrap();
            let partial = two_layer_partial(&ix, a as i64, b as i64, &w, &q, 200);
            assert!((exact - partial).abs() < tol, "{ix:?}");
        }
    }
}

#[test]
fn two_layer_convergence_enforced_only_when_asked() {
    let q = frac(1, 2);
    let f = FieldSet::new(int(3), int(1), int(1), int(1), int(1)).unwrap();
    let ix = [1, 0, 0, 1];
    assert!(matches!(
        rij_two_layer(&ix, 1, 1, &f, &q, SumPolicy::Convergent),
        Err(Error::Convergence(_))
    ));
    assert!(rij_two_layer(&ix, 1, 1, &f, &q, SumPolicy::Continued).is_ok());
}

#[test]
fn two_layer_positivity() {
    let q = frac(1, 2);
    for a in 1..=2u32 {
        for b in 1..=2u32 {
            let w = pow(&q, (a + b) as i64) * frac(9, 10);
            let f = FieldSet::new(w, frac(3, 2), frac(2, 3), frac(5, 4), frac(1, 3)).unwrap();
            for ix in index_tuples(&nn(a), &nn(b), (a + b) as i64) {
                let v = rij_two_layer(&ix, a, b, &f, &q, SumPolicy::Convergent).unwrap();
                assert!(v > int(0), "{a} {b} {ix:?}");
            }
        }
    }
}

#[test]
fn spin_one_half_closed_form() {
    let ctx = ScalarContext::new(frac(2, 7), frac(5, 3), frac(-4, 9)).unwrap();
    for b in 1..=3u32 {
        for ix in index_tuples(&nn(1), &nn(b), 1 + b as i64) {
            let want = r_one_closed(&ix, b, &ctx).unwrap();
            assert_eq!(rij_double_sum(&ix, 1, &nn(b), &ctx).unwrap(), want, "{b} {ix:?}");
            assert_eq!(rij_single_sum(&ix, &nn(1), &nn(b), &ctx).unwrap(), want);
            assert_eq!(rij_pole_expansion(&ix, 1, &nn(b), &ctx).unwrap(), want);
        }
    }
}

#[test]
fn corner_entry_closed_form() {
    let ctx = ScalarContext::new(frac(3, 5), frac(7, 4), frac(2, 3)).unwrap();
    for a in 0..=3u32 {
        for b in 0..=3u32 {
            let m = a.min(b) as i64;
            let q = ctx.q();
            let lam = ctx.lambda();
            let want = pow(ctx.phi(), -(a as i64))
                * ctx.qhalf((a * b) as i64 + m).unwrap()
                * pow(lam, m)
                * qpochhammer(&(pow(lam, -2) * pow(q, -((a + b) as i64))), &(q * q), m).unwrap();
            assert_eq!(corner_entry(a, b, &ctx).unwrap(), want);
            assert_eq!(rij_double_sum(&[0; 4], a, &nn(b), &ctx).unwrap(), want);
        }
    }
}

#[test]
fn permutation_point() {
    for big_i in 1..=3u32 {
        let ctx = ScalarContext::from_q(frac(2, 5), int(1), int(1)).unwrap().laurent();
        let r = SpinRMatrix::build(nn(big_i), nn(big_i), Route::Single, 6, &ctx).unwrap();
        let c = permutation_constant(big_i, ctx.q()).unwrap();
        for ix in index_tuples(&nn(big_i), &nn(big_i), 6) {
            let want = if ix[0] == ix[3] && ix[1] == ix[2] { c.clone() } else { int(0) };
            assert_eq!(r.get(&ix), want, "{big_i} {ix:?}");
        }
    }
}

#[test]
fn degree_bound_and_asymptotics() {
    let ctx = ScalarContext::new(frac(2, 3), int(1), frac(3, 5)).unwrap().laurent();
    for a in 1..=3u32 {
        for b in 1..=3u32 {
            let r = SpinRMatrix::build(nn(a), nn(b), Route::Single, 6, &ctx).unwrap();
            let m = a.min(b) as i64;
            let (lo, hi) = r.degree_span().unwrap();
            assert!(-m <= lo && hi <= m);
            for (ix, p) in r.laurent_entries() {
                let c0 = leading_coefficient(ix, a, b, true, &ctx).unwrap();
                let c1 = leading_coefficient(ix, a, b, false, &ctx).unwrap();
                assert_eq!(p.coeff(-m), c0, "{a} {b} {ix:?}");
                assert_eq!(p.coeff(m), c1, "{a} {b} {ix:?}");
            }
        }
    }
}

#[test]
fn generic_weight_routes_agree() {
    let ctx = ScalarContext::from_q(frac(1, 3), frac(5, 7), frac(4, 3)).unwrap();
    let wj = WeightParam::Generic(GenericWeight::new(frac(3, 7), ctx.q()).unwrap());
    for ix in index_tuples(&nn(2), &wj, 5) {
        let s = rij_single_sum(&ix, &nn(2), &wj, &ctx).unwrap();
        assert_eq!(rij_pole_expansion(&ix, 2, &wj, &ctx).unwrap(), s, "{ix:?}");
        assert_eq!(rij_double_sum(&ix, 2, &wj, &ctx).unwrap(), s, "{ix:?}");
    }
    assert!(rij_single_sum(&[0; 4], &nn(2), &wj, &ctx).unwrap().is_one());
}

#[test]
fn continued_weight_matches_finite_block() {
    // an integer weight kept as a Verma module agrees with the finite one on 0..=J
    let ctx = ScalarContext::new(frac(2, 5), frac(3, 4), int(1)).unwrap();
    let fin = nn(2);
    let ver = WeightParam::Generic(GenericWeight::continued(2, ctx.q()));
    let norm = rij_single_sum(&[0; 4], &nn(2), &fin, &ctx).unwrap();
    for ix in index_tuples(&nn(2), &fin, 4) {
        let a = rij_single_sum(&ix, &nn(2), &fin, &ctx).unwrap() / &norm;
        let b = rij_pole_expansion(&ix, 2, &ver, &ctx).unwrap();
        assert_eq!(a, b, "{ix:?}");
    }
}

#[test]
fn resonant_lambda_is_a_pole_for_sums_only() {
    // λ² = q^{J-I}: first resonance of the double sum and pole expansion
    let p = frac(1, 3);
    let (a, b) = (1u32, 1u32);
    let ctx = ScalarContext::new(p, int(1), frac(2, 3)).unwrap();
    assert!(matches!(rij_double_sum(&[1, 0, 0, 1], a, &nn(b), &ctx), Err(Error::Pole(_))));
    assert!(matches!(rij_pole_expansion(&[1, 0, 0, 1], a, &nn(b), &ctx), Err(Error::Pole(_))));
    assert!(rij_single_sum(&[1, 0, 0, 1], &nn(a), &nn(b), &ctx).is_ok());
}

#[test]
fn lagrange_interpolation_identity() {
    // x^{n+1}(x^{-1};q)_{n+1} Σ_i (-1)^i q^{i(i+1)/2-ni} P(q^i)/((x-q^i)(q;q)_i(q;q)_{n-i}) = P(x)
    let q = frac(2, 7);
    let coeffs = [frac(3, 5), frac(-2, 3), int(4), frac(1, 9)];
    let poly = |x: &Scalar| {
        coeffs
            .iter()
            .enumerate()
            .fold(int(0), |s, (k, c)| s + c * pow(x, k as i64))
    };
    let n = 3i64;
    for x in [frac(5, 3), frac(-7, 2), frac(1, 11)] {
        let mut s = int(0);
        for i in 0..=n {
            let qi = pow(&q, i);
            let sgn = if i % 2 == 0 { int(1) } else { int(-1) };
            s += sgn * pow(&q, i * (i + 1) / 2 - n * i) * poly(&qi)
                / ((&x - &qi)
                    * qpochhammer(&q, &q, i).unwrap()
                    * qpochhammer(&q, &q, n - i).unwrap());
        }
        let lhs = pow(&x, n + 1) * qpochhammer(&x.recip(), &q, n + 1).unwrap() * s;
        assert_eq!(lhs, poly(&x));
    }
}

#[test]
fn proper_normalization_of_two_layer_corner() {
    let ctx = ScalarContext::new(frac(1, 2), frac(3, 2), frac(5, 7)).unwrap();
    let t = rij(Route::TwoLayer, &[0; 4], &nn(1), &nn(1), &ctx).unwrap();
    assert_eq!(t, corner_entry(1, 1, &ctx).unwrap());
}

use sixv_core::rmatrix::{
    contract_two_layer, generic, index_tuples, l_operator_fundamental, r_one_closed, reconstruct_from_recurrences,
    recurrence_residuals, rij_single_sum, verify_symmetries, verify_ybe_loperator,
    verify_ybe_reduced, verify_ybe_two_layer, WeightParam, YbeFields,
};
use sixv_core::scalars::{frac, int, pow, Scalar, ScalarContext};
use sixv_core::Residual;

fn nn(n: u32) -> WeightParam {
    WeightParam::NonNeg(n)
}

fn fields() -> YbeFields {
    YbeFields {
        w: frac(3, 7),
        w2: frac(-5, 4),
        phi_h: frac(2, 3),
        phi_v: frac(7, 5),
        psi_h: frac(4, 9),
        psi_v: frac(-3, 2),
        phi_h1: frac(5, 6),
        psi_h1: frac(9, 7),
        psi_v1: frac(2, 11),
        psi_h2: frac(-6, 5),
    }
}

#[test]
fn two_layer_ybe() {
    let q = frac(2, 5);
    for n in [[1, 1, 1], [1, 1, 2], [1, 2, 1], [2, 1, 1], [2, 2, 2]] {
        assert_eq!(verify_ybe_two_layer(n, &fields(), &q).unwrap(), Residual::ExactZero, "{n:?}");
    }
}

#[test]
fn two_layer_ybe_detects_broken_constraint() {
    let q = frac(2, 5);
    let mut sets = fields().derive().unwrap();
    assert!(contract_two_layer([1, 1, 1], &sets, &q).unwrap().passed());
    sets[2].phi_v = &sets[2].phi_v * int(2);
    assert!(!contract_two_layer([1, 1, 1], &sets, &q).unwrap().passed());
}

#[test]
fn reduced_ybe_all_small_triples() {
    let q = frac(3, 11);
    for a in 1..=2 {
        for b in 1..=2 {
            for c in 1..=2 {
                let r = verify_ybe_reduced([a, b, c], &frac(3, 4), &frac(5, 11), &[int(1), frac(3, 7), frac(3, 7)], &q)
                    .unwrap();
                assert_eq!(r, Residual::ExactZero, "{a}{b}{c}");
            }
        }
    }
}

#[test]
fn reduced_ybe_fails_with_mismatched_fields() {
    let q = frac(3, 11);
    let phis = [int(1), frac(3, 7), frac(2, 7)];
    let r = verify_ybe_reduced([1, 1, 1], &frac(3, 4), &frac(5, 11), &phis, &q).unwrap();
    assert!(!r.passed());
}

#[test]
fn loperator_ybe_generic_weights() {
    let q = frac(1, 3);
    let wi = generic(frac(2, 5), &q).unwrap();
    let wj = generic(frac(3, 7), &q).unwrap();
    let r = verify_ybe_loperator(&wi, &wj, &frac(5, 11), &frac(7, 3), 3, &q).unwrap();
    assert_eq!(r, Residual::ExactZero);
    // and for finite weights
    let r = verify_ybe_loperator(&nn(2), &nn(1), &frac(5, 11), &frac(7, 3), 4, &q).unwrap();
    assert_eq!(r, Residual::ExactZero);
}

#[test]
fn symmetry_suite() {
    let ctx = ScalarContext::new(frac(2, 5), frac(7, 3), frac(-3, 4)).unwrap();
    for (a, b) in [(1, 1), (1, 2), (2, 1), (2, 3), (3, 3)] {
        for (name, r) in verify_symmetries(a, b, &ctx).unwrap() {
            assert_eq!(r, Residual::ExactZero, "{name} at ({a},{b})");
        }
    }
}

#[test]
fn spin_flip_at_spin_half_is_sigma_x_conjugation() {
    let ctx = ScalarContext::new(frac(2, 5), frac(7, 3), frac(-3, 4)).unwrap();
    let inv = ctx.with_phi(ctx.phi().recip());
    for ix in index_tuples(&nn(1), &nn(1), 2) {
        let [i, j, ip, jp] = ix;
        let a = rij_single_sum(&ix, &nn(1), &nn(1), &ctx).unwrap();
        let b = rij_single_sum(&[1 - i, 1 - j, 1 - ip, 1 - jp], &nn(1), &nn(1), &inv).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn symmetries_need_half_powers() {
    let ctx = ScalarContext::from_q(frac(1, 2), frac(3, 2), int(1)).unwrap();
    assert!(verify_symmetries(1, 1, &ctx).is_err());
}

#[test]
fn recurrences_finite() {
    let ctx = ScalarContext::from_q(frac(1, 9), frac(5, 7), int(1)).unwrap();
    for a in 1..=3 {
        for b in 1..=3 {
            for (rec, r, n) in recurrence_residuals(&nn(a), &nn(b), 6, &ctx).unwrap() {
                assert_eq!(r, Residual::ExactZero, "{rec:?} at ({a},{b})");
                assert!(n > 0, "{rec:?} has no rows at ({a},{b})");
            }
        }
    }
}

#[test]
fn recurrences_generic() {
    let ctx = ScalarContext::from_q(frac(1, 3), frac(5, 7), int(1)).unwrap();
    let wj = generic(frac(5, 9), ctx.q()).unwrap();
    for (rec, r, n) in recurrence_residuals(&nn(2), &wj, 4, &ctx).unwrap() {
        assert_eq!(r, Residual::ExactZero, "{rec:?}");
        assert!(n > 0);
    }
}

#[test]
fn unique_reconstruction() {
    let ctx = ScalarContext::from_q(frac(1, 4), frac(3, 5), int(1)).unwrap();
    for (a, b) in [(1, 1), (2, 2), (1, 3), (3, 1)] {
        let r = reconstruct_from_recurrences(&nn(a), &nn(b), 6, &ctx).unwrap();
        assert!(r.unique(), "({a},{b}) rank {} of {}", r.rank, r.unknowns);
        assert_eq!(r.residual, Residual::ExactZero);
    }
}

#[test]
fn loperator_matches_spin_half_r_matrix() {
    // L(μ) = D R_{1,J}(λ;1) D^{-1}, μ = λ q^{1/2}, D = diag(1, λ^{-1})
    let ctx = ScalarContext::new(frac(3, 7), frac(5, 2), int(1)).unwrap();
    let lam = ctx.lambda().clone();
    let mu = &lam * ctx.p().unwrap();
    for b in 1..=3u32 {
        let l = l_operator_fundamental(&mu, &nn(b), &ctx).unwrap();
        for ix in index_tuples(&nn(1), &nn(b), 4) {
            let [a, j, c, jp] = ix;
            let r = r_one_closed(&ix, b, &ctx).unwrap();
            let want: Scalar = r * pow(&lam, c - a);
            assert_eq!(l.element(a, j, c, jp), want, "{b} {ix:?}");
        }
    }
}

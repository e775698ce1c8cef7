mod common;

use common::*;
use lowrank_core::linalg::{row_projection_error, projection_error, singular_values, truncated_svd};
use lowrank_core::oracles::{kahan_matrix, ones_plus_eps};
use lowrank_core::rrqr::max_exchange_growth;
use lowrank_core::skeleton::{
    build_row_surrogate_phi, cross_reconstruction, projective_reconstruction, skeleton_from_indices,
};
use lowrank_core::{
    evaluate_skeleton, rrqr_select, select_columns, select_skeleton_cross, select_skeleton_projective,
    select_skeleton_spectral, Error, MatrixF64, RrqrParams, SkeletonMode, Surrogate,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn assert_passed(rep: &lowrank_core::BoundReport) {
    let bad: Vec<_> = rep.failures().collect();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn projective_on_random_10x8() {
    let a = gaussian(&mut rng(21), 10, 8);
    let sel = select_skeleton_projective(&a, &Surrogate::Dense(best_rank_na(&a, 2)), 2).unwrap();
    let z = a.sub(&best_rank_na(&a, 2)).unwrap().fro_norm();
    assert!(sel.err.fro / z <= 6f64.sqrt());
    let rep = evaluate_skeleton(&a, &sel).unwrap();
    assert_passed(&rep);

    // oracle: C C^+ A R^+ R with nalgebra pseudoinverses
    let an = to_na(&a);
    let c = an.select_columns(&sel.col_indices);
    let r = an.select_rows(&sel.row_indices);
    let recon = &c * c.clone().pseudo_inverse(1e-12).unwrap() * &an * r.clone().pseudo_inverse(1e-12).unwrap() * &r;
    assert!(((&an - recon).norm() - sel.err.fro).abs() < 1e-10);
}

#[test]
fn projective_split() {
    let mut g = rng(22);
    for _ in 0..20 {
        let a = low_rank_plus_noise(&mut g, 9, 11, 3, 0.1);
        let sel = select_skeleton_projective(&a, &Surrogate::BestRank, 3).unwrap();
        let col = projection_error(&a, &a.select_columns(&sel.col_indices)).unwrap().fro;
        let row = row_projection_error(&a, &a.select_rows(&sel.row_indices)).unwrap().fro;
        assert!(sel.err.fro.powi(2) <= col * col + row * row + 1e-12);
    }
}

#[test]
fn projective_spanning_indices_give_zero() {
    let a = low_rank_plus_noise(&mut rng(23), 6, 7, 2, 0.0);
    let p = projective_reconstruction(&a, &[0, 1], &[0, 1]).unwrap();
    assert!(a.sub(&p).unwrap().fro_norm() < 1e-12 * a.fro_norm());
    let sel = skeleton_from_indices(&a, &[0, 1], &[0, 1], SkeletonMode::Projective).unwrap();
    let rep = evaluate_skeleton(&a, &sel).unwrap();
    assert!(rep.values["err_fro"] < 1e-12 * a.fro_norm());
}

#[test]
fn phi_properties() {
    let mut g = rng(24);
    let exact = low_rank_plus_noise(&mut g, 8, 6, 2, 0.0);
    let u = truncated_svd(&exact, 2, None).unwrap().u;
    let phi = build_row_surrogate_phi(&exact, &u, &[0, 1]).unwrap();
    assert!(phi.sub(&exact).unwrap().fro_norm() < 1e-10 * exact.fro_norm());

    for _ in 0..10 {
        let a = gaussian(&mut g, 9, 7);
        let z = best_rank_na(&a, 3);
        let t = truncated_svd(&z, 3, None).unwrap();
        // rows picked by column selection on the transpose
        let (rows, _) = select_columns(&a.transpose(), &Surrogate::RightRows(t.u.transpose()), 3).unwrap();
        let phi = build_row_surrogate_phi(&a, &t.u, &rows.indices).unwrap();
        let interp = phi.select_rows(&rows.indices).sub(&a.select_rows(&rows.indices)).unwrap();
        assert!(interp.max_abs() < 1e-12 * a.max_abs());
        let zf = a.sub(&z).unwrap().fro_norm();
        assert!(a.sub(&phi).unwrap().fro_norm() <= 2.0 * zf * (1.0 + 1e-9));
        let rank = to_na(&phi).rank(1e-10 * phi.fro_norm());
        assert_eq!(rank, 3);
    }
}

#[test]
fn cross_on_random_12x9() {
    let a = gaussian(&mut rng(25), 12, 9);
    let sel = select_skeleton_cross(&a, &Surrogate::BestRank, 3).unwrap();
    let z = a.sub(&best_rank_na(&a, 3)).unwrap();
    assert!(sel.err.fro / z.fro_norm() <= 4.0);
    let spec_bound = (1.0 + 3.0 * 5.0 * 6.0f64).sqrt() * sigma_na(&a)[3];
    assert!(sel.err.spec <= spec_bound * (1.0 + 1e-9));
    assert!(sel.identity_gap.unwrap() <= 1e-9 * a.fro_norm());
    assert_passed(&evaluate_skeleton(&a, &sel).unwrap());

    // C A_hat^{-1} R against nalgebra
    let an = to_na(&a);
    let ahat = an.select_rows(&sel.row_indices).select_columns(&sel.col_indices);
    let recon = an.select_columns(&sel.col_indices) * ahat.try_inverse().unwrap() * an.select_rows(&sel.row_indices);
    let ours = to_na(&cross_reconstruction(&a, &sel.row_indices, &sel.col_indices).unwrap());
    assert!((recon - ours).norm() < 1e-10 * a.fro_norm());
}

#[test]
fn cross_on_ones_plus_eps_picks_second_row_and_column() {
    let (n, eps) = (100, 1e-3);
    let a: MatrixF64 = ones_plus_eps(n, eps);
    let ones = MatrixF64::from_fn(n, n, |_, _| 1.0);
    let sel = select_skeleton_cross(&a, &Surrogate::Dense(ones), 1).unwrap();
    assert_eq!((sel.row_indices[0], sel.col_indices[0]), (1, 1));
    assert!(rel_close(sel.err.spec, eps, 1e-9));
    assert_passed(&evaluate_skeleton(&a, &sel).unwrap());
}

#[test]
fn ones_plus_eps_closed_forms() {
    let (n, eps) = (100usize, 1e-3);
    let a: MatrixF64 = ones_plus_eps(n, eps);
    let nm1 = (n - 1) as f64;
    let cases = [
        ((0, 0), nm1 * (1.0 - 1.0 / (1.0 + eps))),
        ((0, 1), eps * nm1.sqrt()),
        ((1, 1), eps),
    ];
    for ((i, j), want) in cases {
        let s = skeleton_from_indices(&a, &[i], &[j], SkeletonMode::Cross).unwrap();
        assert!(rel_close(s.err.spec, want, 1e-9), "({i},{j}): {} vs {want}", s.err.spec);
    }
    let sp = select_skeleton_spectral(&a, 1, RrqrParams::default()).unwrap();
    assert!(sp.err.spec <= eps * nm1.sqrt() * (1.0 + 1e-9));
}

#[test]
fn cross_rejects_singular_core() {
    let a = MatrixF64::from_rows(&[[0.0, 1.0, 2.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]).unwrap();
    assert!(matches!(cross_reconstruction(&a, &[0], &[0]), Err(Error::SingularAhat { .. })));
    assert!(matches!(cross_reconstruction(&a, &[0, 0], &[0, 1]), Err(Error::DimensionMismatch(_))));
}

#[test]
fn exact_rank_inputs_reconstruct() {
    let a = low_rank_plus_noise(&mut rng(26), 10, 12, 3, 0.0);
    for sel in [
        select_skeleton_projective(&a, &Surrogate::Dense(a.clone()), 3).unwrap(),
        select_skeleton_cross(&a, &Surrogate::Dense(a.clone()), 3).unwrap(),
    ] {
        assert!(sel.err.fro <= 1e-10 * a.fro_norm(), "{:?}", sel.mode);
    }
    let sp = select_skeleton_spectral(&a, 3, RrqrParams::default()).unwrap();
    assert!(sp.err.spec <= 1e-9 * singular_values(&a).unwrap()[0]);
}

#[test]
fn spectral_on_random_9x14() {
    let a = gaussian(&mut rng(27), 9, 14);
    let sel = select_skeleton_spectral(&a, 2, RrqrParams::default()).unwrap();
    let f = (1.0 + 2.0 * (8.0 + 4.0 + 1.0) * 7.0f64).sqrt();
    assert!(sel.err.spec <= f * sigma_na(&a)[2] * (1.0 + 1e-9));
    assert_passed(&evaluate_skeleton(&a, &sel).unwrap());
    // tall input goes through the transpose
    let t = a.transpose();
    let st = select_skeleton_spectral(&t, 2, RrqrParams::default()).unwrap();
    assert_passed(&evaluate_skeleton(&t, &st).unwrap());
}

#[test]
fn spectral_on_kahan() {
    for n in [10, 20, 30] {
        let a: MatrixF64 = kahan_matrix(n, 0.8).unwrap();
        for r in [n / 2, n - 1] {
            let sel = select_skeleton_spectral(&a, r, RrqrParams::default()).unwrap();
            assert_passed(&evaluate_skeleton(&a, &sel).unwrap());
        }
    }
}

#[test]
fn rrqr_on_kahan_beats_plain_pivoting() {
    let a: MatrixF64 = kahan_matrix(30, 0.8).unwrap();
    let r = 29;
    let q = rrqr_select(&a, r, RrqrParams::default()).unwrap();
    let sigma = sigma_na(&a);
    let err = to_na(&a.sub(&q.q.matmul(&q.r).unwrap()).unwrap()).singular_values().max();
    let bound = (1.0 + 4.0 * r as f64).sqrt() * sigma[r];
    assert!(err <= bound * (1.0 + 1e-8), "{err} > {bound}");
    let plain = projection_error(&a, &a.select_columns(&(0..r).collect::<Vec<_>>())).unwrap().spec;
    assert!(plain > bound);
}

fn leading_volume(a: &MatrixF64, idx: &[usize]) -> f64 {
    let c = to_na(&a.select_columns(idx));
    c.singular_values().iter().product()
}

#[test]
fn rrqr_smaller_rho_gives_at_least_the_volume() {
    let mut g = rng(28);
    for _ in 0..20 {
        let a = graded(&mut g, 10, 10, 0.7);
        let sigma = sigma_na(&a);
        let lo = rrqr_select(&a, 3, RrqrParams::new(1.05).unwrap()).unwrap();
        let hi = rrqr_select(&a, 3, RrqrParams::new(4.0).unwrap()).unwrap();
        for (q, rho) in [(&lo, 1.05), (&hi, 4.0)] {
            let err = to_na(&a.sub(&q.q.matmul(&q.r).unwrap()).unwrap()).singular_values().max();
            let bound = (1.0 + rho * rho * 21.0f64).sqrt() * sigma[3];
            assert!(err <= bound * (1.0 + 1e-8));
            assert!(max_exchange_growth(&a, &q.indices).unwrap() <= rho * (1.0 + 1e-9));
        }
        assert!(leading_volume(&a, &lo.indices) >= leading_volume(&a, &hi.indices) * (1.0 - 1e-12));
    }
}

#[test]
fn rrqr_is_a_local_volume_maximum() {
    let mut g = rng(29);
    for _ in 0..10 {
        let a = gaussian(&mut g, 7, 9);
        let rho = 1.5;
        let q = rrqr_select(&a, 3, RrqrParams::new(rho).unwrap()).unwrap();
        let v0 = leading_volume(&a, &q.indices);
        for i in 0..3 {
            for j in (0..9).filter(|j| !q.indices.contains(j)) {
                let mut s = q.indices.clone();
                s[i] = j;
                assert!(leading_volume(&a, &s) <= rho * v0 * (1.0 + 1e-9));
            }
        }
    }
}

#[test]
fn rrqr_rejects_bad_parameters() {
    assert!(RrqrParams::new(0.9).is_err());
    assert!(RrqrParams::new(f64::NAN).is_err());
    let a = MatrixF64::identity(3);
    assert!(matches!(rrqr_select(&a, 4, RrqrParams::default()), Err(Error::InvalidRank { .. })));
}

fn shapes() -> impl Strategy<Value = (usize, usize, usize, u64)> {
    (3usize..14, 3usize..14, any::<u64>()).prop_flat_map(|(m, n, seed)| {
        (Just(m), Just(n), 1..=m.min(n).min(5), Just(seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn skeleton_bounds_with_best_surrogate((m, n, r, seed) in shapes()) {
        let a = gaussian(&mut rng(seed), m, n);
        let z = best_rank_na(&a, r);
        let p = select_skeleton_projective(&a, &Surrogate::Dense(z.clone()), r).unwrap();
        let rep = evaluate_skeleton(&a, &p).unwrap();
        prop_assert!(rep.all_passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        match select_skeleton_cross(&a, &Surrogate::Dense(z), r) {
            Ok(c) => {
                let rep = evaluate_skeleton(&a, &c).unwrap();
                prop_assert!(rep.all_passed(), "{:?}", rep.failures().collect::<Vec<_>>());
            }
            Err(e) => {
                let degenerate = matches!(e, Error::SingularAhat { .. } | Error::SingularUhat { .. });
                prop_assert!(degenerate, "{:?}", e);
            }
        }
        let s = select_skeleton_spectral(&a, r, RrqrParams::default()).unwrap();
        let rep = evaluate_skeleton(&a, &s).unwrap();
        prop_assert!(rep.all_passed(), "{:?}", rep.failures().collect::<Vec<_>>());
    }

    #[test]
    fn cross_identity_and_interpolation((m, n, r, seed) in shapes()) {
        let a = low_rank_plus_noise(&mut rng(seed), m, n, r, 0.05);
        if let Ok(c) = select_skeleton_cross(&a, &Surrogate::BestRank, r) {
            prop_assert!(c.identity_gap.unwrap() <= 1e-9 * a.fro_norm());
            let recon = cross_reconstruction(&a, &c.row_indices, &c.col_indices).unwrap();
            let rows = recon.select_rows(&c.row_indices).sub(&a.select_rows(&c.row_indices)).unwrap();
            let cols = recon.select_columns(&c.col_indices).sub(&a.select_columns(&c.col_indices)).unwrap();
            prop_assert!(rows.max_abs() <= 1e-8 * a.max_abs());
            prop_assert!(cols.max_abs() <= 1e-8 * a.max_abs());
        }
    }
}

#[test]
fn complex_skeletons() {
    let mut g = rng(30);
    for _ in 0..5 {
        let a = gaussian_c(&mut g, 8, 10);
        for sel in [
            select_skeleton_projective(&a, &Surrogate::BestRank, 3).unwrap(),
            select_skeleton_cross(&a, &Surrogate::BestRank, 3).unwrap(),
            select_skeleton_spectral(&a, 3, RrqrParams::default()).unwrap(),
        ] {
            assert_passed(&evaluate_skeleton(&a, &sel).unwrap());
        }
    }
}

#[test]
fn singular_values_match_nalgebra() {
    // nalgebra oracles agree with the crate's singular values
    let a = gaussian(&mut rng(31), 5, 4);
    let ours = singular_values(&a).unwrap();
    let theirs: DMatrix<f64> = to_na(&a);
    let mut s: Vec<f64> = theirs.singular_values().iter().cloned().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    for (x, y) in ours.iter().zip(&s) {
        assert!((x - y).abs() < 1e-12);
    }
}

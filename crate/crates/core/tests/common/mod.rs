#![allow(dead_code)]

use lowrank_core::{Matrix, MatrixC64, MatrixF64};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut impl Rng, m: usize, n: usize) -> MatrixF64 {
    Matrix::from_fn(m, n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

pub fn gaussian_c(rng: &mut impl Rng, m: usize, n: usize) -> MatrixC64 {
    Matrix::from_fn(m, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn to_na(a: &MatrixF64) -> DMatrix<f64> {
    DMatrix::from_column_slice(a.rows(), a.cols(), a.as_slice())
}

pub fn from_na(a: &DMatrix<f64>) -> MatrixF64 {
    Matrix::from_col_major(a.nrows(), a.ncols(), a.as_slice().to_vec()).unwrap()
}

/// `r x n` with orthonormal rows, from nalgebra's QR of a Gaussian matrix.
pub fn orthonormal_rows(rng: &mut impl Rng, r: usize, n: usize) -> MatrixF64 {
    let g = to_na(&gaussian(rng, n, r));
    let q = g.qr().q();
    from_na(&q.transpose())
}

/// Rank-`r` signal with geometrically decaying spectrum plus noise of size `noise`.
pub fn low_rank_plus_noise(rng: &mut impl Rng, m: usize, n: usize, r: usize, noise: f64) -> MatrixF64 {
    let x = gaussian(rng, m, r);
    let y = gaussian(rng, r, n);
    let mut s = x.matmul(&y).unwrap();
    let e = gaussian(rng, m, n);
    for j in 0..n {
        for i in 0..m {
            s[(i, j)] += noise * e[(i, j)];
        }
    }
    s
}

/// Columns scaled by `decay^j`: graded, with slowly falling singular values.
pub fn graded(rng: &mut impl Rng, m: usize, n: usize, decay: f64) -> MatrixF64 {
    let g = gaussian(rng, m, n);
    Matrix::from_fn(m, n, |i, j| g[(i, j)] * decay.powi(j as i32))
}

/// Singular values from nalgebra.
pub fn sigma_na(a: &MatrixF64) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(a).singular_values().iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// `A_r` from nalgebra's SVD.
pub fn best_rank_na(a: &MatrixF64, r: usize) -> MatrixF64 {
    let svd = to_na(a).svd(true, true);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let u = svd.u.unwrap();
    let vt = svd.v_t.unwrap();
    let mut out = DMatrix::zeros(a.rows(), a.cols());
    for &k in &idx[..r] {
        out += svd.singular_values[k] * u.column(k) * vt.row(k);
    }
    from_na(&out)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

//! Column, skeleton (CUR) and submatrix selection for low-rank approximation,
//! with the error bounds each selection guarantees checked on every run.
//!
//! ```
//! use lowrank_core::bounds::column_bounds;
//! use lowrank_core::oracles::example_5x4;
//! use lowrank_core::{select_columns, MatrixF64, Surrogate};
//!
//! let a: MatrixF64 = example_5x4(1e-3);
//! let (sel, _) = select_columns(&a, &Surrogate::BestRank, 2).unwrap();
//! assert_eq!(sel.indices, vec![3, 1]);
//! let report = column_bounds(&sel, a.shape(), a.fro_norm());
//! assert!(report.get("cw_fro").unwrap().passed);
//! ```

pub mod bounds;
pub mod column_select;
pub mod error;
pub mod linalg;
pub mod matrix;
pub mod oracles;
pub mod rrqr;
pub mod scalar;
pub mod skeleton;
pub mod submatrix;
pub mod surrogate;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use scalar::{RealScalar, Scalar};
pub use bounds::{BoundCheck, BoundReport};
pub use column_select::{
    greedy_pivoted_qr_baseline, select_columns, select_columns_with, ColumnSelection, SelectionTrace,
};
pub use linalg::{NormPair, Svd, TruncatedSvd};
pub use oracles::OracleResult;
pub use rrqr::{rrqr_select, Rrqr, RrqrParams};
pub use skeleton::{
    evaluate_skeleton, select_skeleton_cross, select_skeleton_projective, select_skeleton_spectral,
    SkeletonMode, SkeletonSelection,
};
pub use submatrix::{select_submatrix, SubmatrixSelection};
pub use surrogate::{Surrogate, SurrogateFactors};

pub use num_complex::{Complex32, Complex64};

pub type MatrixF64 = Matrix<f64>;
pub type MatrixF32 = Matrix<f32>;
pub type MatrixC64 = Matrix<Complex64>;
pub type MatrixC32 = Matrix<Complex32>;
pub type SurrogateF64 = Surrogate<f64>;
pub type ColumnSelectionF64 = ColumnSelection<f64>;
pub type SkeletonSelectionF64 = SkeletonSelection<f64>;
pub type SubmatrixSelectionF64 = SubmatrixSelection<f64>;

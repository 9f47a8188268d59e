//! Exact linear algebra over the fields of a tower, subspace enumeration and
//! q-analog counting.

mod counting;
mod enumerate;
mod matrix;
mod subspace;

pub use counting::{
    big_pow, choose2, euler_phi, gaussian_binomial, gaussian_binomial_signed, gl_order, BigCount,
};
pub use enumerate::{enumerate_subspaces, visit_projective, Shard, SubspaceEnumerator};
pub use matrix::Matrix;
pub use subspace::Subspace;

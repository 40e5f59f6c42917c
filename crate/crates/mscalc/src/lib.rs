//! Exact computer algebra for graded sign calculus, L∞-algebras from
//! Gerstenhaber algebras, Cartan calculus on polynomial multivector fields,
//! multisymplectic bracket algebras, transfer of L∞-structures and
//! homotopy momentum maps.

pub mod error;
pub mod rat;
pub mod text;
pub mod signs;
pub mod poly;
pub mod multilinear;
pub mod random;
pub mod cartan;
pub mod linalg;
pub mod linfty;
pub mod msgeo;
pub mod transfer;
pub mod moment;
pub mod cli;

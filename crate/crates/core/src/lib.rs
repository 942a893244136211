//! Finite sections of similarity-conjugated Toeplitz operators `T_g⁻¹ T_f T_g`
//! on the Hardy space, their power bounds, Kreiss-type resolvent conditions,
//! executable checks of the associated inequalities, and a propagated-error
//! simulator for recursive schemes `u_n = B u_{n−1} + b_n`.

pub mod analysis;
pub mod error;
pub mod export;
pub mod linalg;
pub mod operators;
pub mod rng;
pub mod stability;
pub mod symbols;
pub mod theorems;

pub use error::{Error, Result};
pub use num_complex::Complex64;

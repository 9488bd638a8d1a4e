//! Conditional Szegő kernels, decay functions and zero statistics for random
//! polynomials whose Newton polytope is a prescribed lattice polytope `P ⊂ pΣ`.

pub mod character;
pub mod ensemble;
pub mod error;
pub mod linalg;
pub mod momentmap;
pub mod polytope;
pub mod roots;
pub mod scalar;
pub mod szego;
pub mod zerocurrent;

pub use error::{Error, Result};
pub use polytope::{ConeMembership, Face, Halfspace, LatticePolytope, PolytopeFile, Rational};
pub use scalar::Real;

pub type TorusPoint64 = momentmap::TorusPoint<f64>;
pub type NormalData64 = momentmap::NormalData<f64>;
pub type NormalSolver64<'a> = momentmap::NormalSolver<'a, f64>;
pub type PsiDensity64 = zerocurrent::PsiDensity<f64>;
pub type SzegoKernel64 = szego::SzegoKernel<f64>;
pub type ZeroStats64 = ensemble::ZeroStats<f64>;
pub type TorusPoint32 = momentmap::TorusPoint<f32>;

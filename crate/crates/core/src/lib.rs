//! Melnikov-function analysis for quartic Hamiltonians
//! `x² − y² + a x⁴ + b x² y² + c y⁴` under cubic perturbations.

pub mod abelian;
pub mod analyzer;
pub mod charts;
pub mod error;
pub mod family;
pub mod homoclinic;
pub mod hopf;
pub mod picard_fuchs;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod tracer;

pub use error::{Error, Result};
pub use family::{HamiltonianParams, Region, RegionLabel};

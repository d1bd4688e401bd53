//! Exact arithmetic on the curves `y^2 = x^q - x`: point counts, Frobenius
//! multiplicities, factored group orders, `ell`-torsion ranks and a Cantor
//! Jacobian for checking them.

pub mod cli;
pub mod counting;
pub mod cyclo;
pub mod ffield;
pub mod jacobian;
pub mod lpoly;
pub mod torsion;
pub mod verify;

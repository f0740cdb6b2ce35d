//! Solution densities of linear systems over F_p^n, randomized witnesses of
//! uncommonness for generic `2 × k` systems, and certificates that lift those
//! witnesses to larger systems by tensoring.

pub mod amplify;
pub mod analysis;
pub mod density;
pub mod error;
pub mod fp;
pub mod function;
pub mod interval;
pub mod linalg;
pub mod rng;
pub mod system;
pub mod witness;

pub use error::{Error, Result};
pub use fp::{GroupElement, PrimeModulus};
pub use system::{LinearSystem, SolutionSpace, SubsystemView};
pub use function::{FourierTable, GroupFunction};

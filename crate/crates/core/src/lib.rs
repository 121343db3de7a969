//! Fixed-bed adsorption with general kinetic orders: nondimensionalization,
//! equilibrium analysis, travelling-wave profiles, a method-of-lines PDE
//! solver and breakthrough analysis.

pub mod analysis;
pub mod error;
pub mod interp;
pub mod model;
pub mod ode;
pub mod pde;
pub mod wave;

pub use error::{Error, Result};
pub use model::{DimensionlessParameters, PhysicalParameters, ReactionOrders};
pub use wave::{WaveProfile, WaveSettings};

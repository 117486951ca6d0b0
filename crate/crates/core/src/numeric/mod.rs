//! Numerical building blocks shared by the physics modules.

pub mod fit;
pub mod ode;
pub mod quad;
pub mod roots;
pub mod special;

pub mod constants;
pub mod error;
pub mod exact;
pub mod numerics;
pub mod ode;
pub mod phase;
pub mod pohozaev;
pub mod profile;
pub mod render;
pub mod shooting;

pub use error::{Error, Result};

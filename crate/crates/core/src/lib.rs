pub mod distributions;
pub mod error;
pub mod extrapolate;
pub mod hankel;
pub mod multiindex;
pub mod quadrature;
pub mod rational;
pub mod seminorm;
pub mod special;
pub mod symbolic;
pub mod verify;

pub use error::{Error, Result};
pub use multiindex::MultiIndex;
pub use rational::Rational;
pub use special::MuVector;

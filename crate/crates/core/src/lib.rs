pub mod cli;
pub mod constraints;
pub mod dynamics;
pub mod error;
pub mod exponential;
pub mod geometry;
pub mod linalg;
pub mod named;
pub mod parse;
pub mod phase;
pub mod poly1;
pub mod qfi;
pub mod ring;

pub use error::{Error, Result};
pub use ring::{Monomial, Rational, RingElem};

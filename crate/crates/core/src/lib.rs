//! Diophantine approximation over the field of formal Laurent series `F_q((X^-1))`.

pub mod approx;
pub mod dimension;
pub mod error;
pub mod field;
pub mod game;
pub mod geom;
pub mod linalg;
pub mod magnitude;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod series;
pub mod white_strategy;

pub use error::{Error, Result};
pub use field::{FieldSpec, FqElem};
pub use magnitude::Magnitude;
pub use matrix::SeriesMatrix;
pub use poly::Poly;
pub use series::LaurentSeries;

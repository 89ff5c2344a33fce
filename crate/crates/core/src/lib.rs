//! Truncated cusped spaces for relatively hyperbolic group pairs.

pub mod presentation;
pub mod complex;
pub mod horoball;
pub mod cusped;
pub mod path;
pub mod metric;
pub mod homotopy;
pub mod excision;
pub mod export;

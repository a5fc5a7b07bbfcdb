//! Planar harmonic mappings `f = h + conj(g)` of the unit disk: evaluation,
//! transforms, Schwarz-Pick type bounds, univalence and linear connectivity
//! estimates.

pub mod analysis;
pub mod analytic;
pub mod bounds;
pub mod connectivity;
pub mod describe;
pub mod error;
pub mod falsify;
pub mod grid;
pub mod map;
pub mod series;
pub mod transforms;
pub mod univalence;

pub use num_complex::Complex64;

pub use analysis::{point_profile, sup_inf_lambda, sup_modulus, LambdaMode, PointProfile};
pub use analytic::Analytic;
pub use error::{HmapError, Result};
pub use grid::{GridPoint, GridSpec};
pub use map::{ClosedForm, HarmonicMap, NormalizedMap};
pub use series::Series;

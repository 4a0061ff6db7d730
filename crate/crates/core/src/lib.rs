//! Robust location estimation around quantile-average orderliness.
//!
//! * [`distmodel`] — parametric families, moments, Sobol/pseudo sampling
//! * [`estimators`] — L-type estimators on sorted samples
//! * [`kernels`] — U-statistic kernel sequences, weighted H-L means, median of means
//! * [`bounds`] — worst-case and concentration bounds, Lambert W
//! * [`orderliness`] — numerical orderliness and inequality checks

pub mod bounds;
pub mod distmodel;
pub mod error;
pub mod estimators;
pub mod kernels;
pub mod numeric;
pub mod orderliness;

pub use error::{Error, Result};

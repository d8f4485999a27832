//! Indoor radio-map generation: furnished floorplans, a deterministic ray
//! tracer, feature tensors for learned predictors, path-loss baselines and
//! evaluation metrics.
//!
//! The geometric and electromagnetic kernels are generic over the scalar type
//! through [`num::Real`]; the aliases below fix the double-precision types used
//! by the pipeline.

pub mod baselines;
pub mod dataset;
pub mod encode;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod metrics;
pub mod num;
pub mod pipeline;
pub mod propagation;
pub mod radiomap;
pub mod render;
pub mod scene;

pub use error::{Error, Result};
pub use radiomap::{MapSource, RadioMap};

pub type Vec2 = geometry::Vector2<f64>;
pub type Vec3 = geometry::Vector3<f64>;
pub type Vec2f = geometry::Vector2<f32>;
pub type Vec3f = geometry::Vector3<f32>;
pub type Complex = num_complex::Complex<f64>;

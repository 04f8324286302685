//! Inferential models, generalized fiducial sampling and confidence curves.

pub mod cli;
pub mod confcurve;
pub mod engine;
pub mod error;
pub mod fiducial;
pub mod model;
pub mod normal;
pub mod point;
pub mod randomset;
pub mod rng;
pub mod sets;
pub mod validate;

pub use error::{ImError, Result};
pub use model::{AuxDistribution, AuxSet, Association, Model, Norm, TieRule};
pub use point::Point;
pub use randomset::{builtin_discrete, builtin_randomset, nested_from_gamma, NestedFamily};
pub use sets::{IntSet, Interval, IntervalUnion, ParamSet, ParamSpace, Predicate};

/// Exact probability used by the discrete paths.
pub type Prob = num_rational::Ratio<i128>;

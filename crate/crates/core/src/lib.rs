//! Holomorphic hypothesis classes on the unit disk.

pub mod basis;
pub mod bergman;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod features;
pub mod hypothesis;
pub mod io;
pub mod learner;
pub mod loss;
pub mod pde;
pub mod point;
pub mod qp;
pub mod quadrature;
pub mod render;
pub mod robustness;

pub use basis::{Domain, FeatureKind, FeatureSet};
pub use dataset::{Dataset, LabeledSample};
pub use error::{Error, Result};
pub use hypothesis::Hypothesis;
pub use point::{ComplexPoint, Label};

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

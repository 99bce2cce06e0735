//! Bi-parameter dyadic harmonic analysis on the discretized torus: random
//! grids, Haar expansions, BMO norms, paraproducts, model operators and their
//! commutators, with an experiment runner in [`lab`].

pub mod analysis;
pub mod commutators;
pub mod dyadic;
pub mod error;
pub mod lab;
pub mod model;
pub mod norms;
pub mod paraproducts;
pub mod signal;

pub use error::{Error, Result};

#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/grids.md")]
    struct Grids;
    #[doc = include_str!("../../../book/src/haar.md")]
    struct Haar;
    #[doc = include_str!("../../../book/src/norms.md")]
    struct Norms;
    #[doc = include_str!("../../../book/src/paraproducts.md")]
    struct Paraproducts;
    #[doc = include_str!("../../../book/src/model-operators.md")]
    struct ModelOperators;
    #[doc = include_str!("../../../book/src/commutators.md")]
    struct Commutators;
    #[doc = include_str!("../../../book/src/experiments.md")]
    struct Experiments;
    #[doc = include_str!("../../../book/src/report-format.md")]
    struct ReportFormat;
}

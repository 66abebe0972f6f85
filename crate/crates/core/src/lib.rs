pub mod baseline;
pub mod codec;
pub mod error;
pub mod frontier;
pub mod generate;
pub mod linalg;
pub mod metrics;
pub mod mppf;
pub mod ngti;
pub mod problem;
pub mod prompt;
pub mod solver;
pub mod tpco;

pub use error::{Error, Result};
pub use problem::{Family, FamilyParams, ProblemInstance, Which};

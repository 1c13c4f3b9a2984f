//! Multipath matching pursuit for sparse signal recovery.
//!
//! Given `y = Φx + v` with `x` `K`-sparse, the solvers search over a tree of
//! candidate supports instead of a single greedy path. The breadth-first
//! variant ([`solvers::mmp_bf`]) grows `L` children per path per iteration;
//! the depth-first variant ([`solvers::mmp_df`]) traces full paths one at a
//! time in a fixed order and stops early once the residual is small enough.
//!
//! ```
//! use mmp::{SensingMatrix, solvers::{mmp_bf, SolverConfig}};
//!
//! let phi = SensingMatrix::identity(4);
//! let y = [0.0, 3.0, 0.0, -1.0];
//! let out = mmp_bf(&phi, &y, &SolverConfig::new(2, 2)).unwrap();
//! assert_eq!(out.support, vec![1, 3]);
//! ```

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod path;
mod real;
pub mod solvers;

pub use error::{MmpError, Result};
pub use linalg::{least_squares_project, LsFit, Measurement, SensingMatrix, SparseSignal};
pub use path::{extend_path, CandidateSet, Path};
pub use solvers::{Algorithm, RecoveryOutput, SearchStats, SolverConfig, Termination};

//! A pseudo-Boolean CDCL solver with pluggable conflict analysis, branching, deletion and restart
//! strategies.
//!
//! Constraints are normalized to `Σ αᵢℓᵢ ≥ δ` with arbitrary-precision coefficients. Conflict
//! analysis runs in one of three cutting-planes regimes (generalized resolution, RoundingSat-style
//! division, and division with partial weakening).
//!
//! ```
//! use pbcdcl::{config::preset, opb::parse_opb, search::{solve, Budget, Status}, Problem};
//!
//! let opb = parse_opb("+1 x1 +1 x2 >= 1 ;\n+1 ~x1 >= 1 ;").unwrap();
//! let problem = Problem::from_opb(&opb);
//! let result = solve(&problem, preset("roundingsat-default").unwrap(), &Budget::unlimited()).unwrap();
//! assert_eq!(result.status, Status::Sat);
//! assert_eq!(result.model.unwrap(), vec![false, false, true]);
//! ```

pub mod analysis;
pub mod bench;
pub mod config;
pub mod constraint;
pub mod deletion;
pub mod engine;
pub mod error;
pub mod heuristics;
pub mod literal;
pub mod normalize;
pub mod opb;
pub mod oracle;
pub mod problem;
pub mod quality;
pub mod restarts;
pub mod rules;
pub mod search;
pub mod trail;

pub use analysis::ProofSystem;
pub use config::SolverConfig;
pub use constraint::{Derived, PBConstraint, RawConstraint, Relation, Term};
pub use error::{BenchError, OpbError, SolverError};
pub use literal::{Literal, Var};
pub use problem::Problem;
pub use search::{Budget, SolveResult, Solver, Status};

//! # logwalk
//!
//! Solving normalized-Laplacian systems and estimating the spectral gap of
//! an undirected weighted graph using nothing but random walks and
//! Monte-Carlo counting.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`graph`] | edge-list loading, degrees, volume, components, diameter, image projection |
//! | [`walk`] | seedable random-walk engine and hit-probability estimation |
//! | [`estimators`] | Poisson and binomial pmf estimators with exact oracles |
//! | [`solver`] | entrywise estimation of `L† b` via Poisson-weighted walks |
//! | [`spectral`] | the two-point candidate set, `‖M^k v‖` estimation, λ₂ estimation |
//! | [`oracle`] | dense ground truth (Jacobi spectrum, pseudo-inverse, truncated series) |
//! | [`audit`] | register accounting for the strict algorithm paths |
//! | [`cli`] | the `logwalk` command-line front end |
//!
//! Every randomized routine takes a [`walk::RandomSource`]; equal sources give
//! bit-identical results regardless of how many worker threads are used.
//!
//! Two execution modes exist. [`Mode::Strict`] derives every internal
//! constant (number of terms, trial counts, failure budgets) from the
//! worst-case analysis and runs the loops verbatim through an audited
//! register file. Those trial counts are astronomically large even for tiny
//! graphs, so strict runs normally carry a [`StrictBudget`]. [`Mode::Practical`]
//! takes user sample budgets and reports achieved Hoeffding radii instead.
//!
//! ```no_run
//! use logwalk::graph::generators;
//! use logwalk::solver::{solve, SolveConfig};
//! use logwalk::walk::RandomSource;
//!
//! let g = generators::complete(3);
//! let b = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
//! let cfg = SolveConfig::practical(0.05, 0.1, 100_000).with_lambda(1.5);
//! let sol = solve(&g, &b, &cfg, &RandomSource::new(7)).unwrap();
//! println!("{:?}", sol.x);
//! ```

pub mod audit;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod graph;
pub mod oracle;
pub mod solver;
pub mod spectral;
pub mod walk;

mod mode;

pub use error::{Error, Result};
pub use graph::{ImageVector, WeightedGraph};
pub use mode::{Mode, PracticalBudget, StrictBudget};
pub use walk::RandomSource;

/// Tolerance for membership in the image of `L_G` (orthogonality to `u₁`).
pub const IMAGE_TOLERANCE: f64 = 1e-9;

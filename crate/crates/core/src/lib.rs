//! Uniform-weight prototype selection with partial optimal transport.
//!
//! A selection of `k` source points, each carrying weight `1/k`, is grown
//! greedily so that transporting the prototypes onto a target distribution
//! collects as much similarity as possible.
//!
//! ```
//! use uniprot::config::{ProblemSpec, SolverConfig};
//! use uniprot::selection::{select_uniprot, GainMode};
//! use uniprot::similarity::SimilarityMatrix;
//!
//! let s = SimilarityMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 3.0], vec![2.0, 2.0]])?;
//! let spec = ProblemSpec::uniform(s, 2)?;
//! let sel = select_uniprot(&spec, &SolverConfig::exact(), GainMode::Approx, None, None)?;
//! assert_eq!(sel.indices, [0, 1]);
//! assert_eq!(sel.weights, [0.5, 0.5]);
//! # Ok::<(), uniprot::Error>(())
//! ```
//!
//! [`transport`] has the exact and entropic solvers, [`objective`] the set
//! functions and gains, [`selection`] the greedy loop and baselines. The
//! guide in `book/` walks through each of them.

pub mod config;
pub mod coupling;
pub mod data;
pub mod error;
pub mod eval;
pub mod marginal;
pub mod objective;
pub mod selection;
pub mod similarity;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};

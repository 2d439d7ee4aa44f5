//! Degree-parameterized random graph models and their maximum likelihood
//! fitting.
//!
//! * [`alpha`]: the alpha-beta model of an undirected graph, whose degree
//!   sequence is a sufficient statistic.
//! * [`rasch`]: the beta-gamma (Rasch-type) model of a binary table, with row
//!   and column sums sufficient.
//! * [`block_em`]: a heterogeneous stochastic block model whose within-block
//!   subgraphs follow the alpha-beta model and whose between-block bipartite
//!   graphs follow the beta-gamma model, fitted by classification EM.
//! * [`generator`]: seeded sampling from these models.
//! * [`realizability`]: Erdős–Gallai and Gale–Ryser tests.
//! * [`cli`]: the `kbeta` command-line tool.

pub mod affinity;
pub mod alpha;
pub mod block_em;
pub mod cli;
pub mod experiment;
pub mod generator;
pub mod graph;
pub mod io;
pub mod rasch;
pub mod realizability;
pub mod report;
pub mod spectral;

pub use affinity::{Affinity, Limit};
pub use graph::{BipartiteTable, DegreeSequence, Graph, Margins, Partition};
pub use report::{FitError, FitReport, FitStatus, SolverOptions};

//! Random m-ary search trees, the urn ball process, exhaustive small-n laws
//! and Monte Carlo aggregation.

mod consistency;
mod exact;
mod mc;
mod stats;
mod tree;

pub use consistency::{urn_tree_consistency, ConsistencyReport};
pub use exact::{exact_small_n, ExactDist, EXACT_N_MAX};
pub use mc::{
    random_tree, run_mc, trial_rng, urn_functional, McConfig, SimMode, SIM_N_CAP, SIM_WORK_CAP,
};
pub use stats::{Moments, SimStats, CSV_HEADER};
pub use tree::{MSTree, Statistic, TreeStats, TypeIndex};

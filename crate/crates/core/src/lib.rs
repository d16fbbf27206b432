//! Exact solvers for vehicle routing on graphs of bounded treewidth.

pub mod instance;
pub mod partition;
pub mod decomposition;
pub mod routing;
pub mod vrp_dp;
pub mod binpack;
pub mod cvrp_dp;
pub mod compact;
pub mod limits;
pub mod oracle;
pub mod reductions;

pub use instance::*;

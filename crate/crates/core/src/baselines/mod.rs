//! The three comparison methods: NRL (Voronoi coverage planner), IQL
//! (independent Q-learners), and IAC (independent actor-critics). All
//! share the simulator and observation pipeline with EMAC.

pub mod iac;
pub mod iql;
pub mod nrl;

pub use iac::{iac_train, IacLearner};
pub use iql::{iql_train, q_regression_loss, IqlConfig, QLearner};
pub use nrl::{
    bfs_route, build_boundary_graph, greedy_visit_order, nrl_execute, plan_team, spiral_sweep,
    voronoi_partition, CoveragePlan, PlanError, VoronoiPartition, WaypointGraph,
};

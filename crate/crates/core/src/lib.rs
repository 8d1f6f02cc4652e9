//! Multi-agent coverage workbench.
//!
//! A team of agents with k×k imaging sensors must cover every cell of a
//! gridworld with random obstacles. The crate provides the simulator
//! (with wind, dropout, and communication-delay disturbances), the
//! egocentric observation pipeline, a small dense-network kernel with
//! analytic gradients, and four interchangeable coverage policies —
//! EMAC (embedding networks + triplet loss + centralized critic), the
//! independent learners IQL and IAC, and the non-learning Voronoi
//! planner NRL — behind one [`policy::CoveragePolicy`] trait.

pub mod baselines;
pub mod emac;
pub mod eval;
pub mod gradcheck;
pub mod io;
pub mod nn;
pub mod obs;
pub mod policy;
pub mod seed;
pub mod sim;

//! Exact rational geometry over DoF space.
//!
//! Regions are [`HalfspaceSystem`]s of `coeffs . x <= rhs` rows over named
//! variables. Projections use Fourier-Motzkin elimination with LP-based
//! redundancy pruning; optimization and inclusion tests use an exact
//! two-phase simplex with Bland's rule.

mod compare;
mod fm;
pub(crate) mod rational;
pub(crate) mod regions;
mod simplex;
mod system;

pub use compare::{polytope_contains, polytope_equal, polytope_includes, vertices};
pub use fm::{fourier_motzkin_eliminate, prune_redundant};
pub use rational::{parse_rational, parse_tau, rat, Rational};
pub use regions::{
    alignment_var, dof_var, lemma1_bounds, lemma3_outer, projected_region, raw_constraint_system,
    stream_var, sum_dof_formula, theorem1_region, DofPoint, ALLOCATION_VAR_COUNT, DOF_VARS,
};
pub use simplex::{feasible_point, simplex_max, LpSolution};
pub use system::{HalfspaceSystem, Inequality};

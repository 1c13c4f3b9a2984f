//! Exact restricted isometry constants of small matrices and the
//! recovery bounds built on them.

mod bounds;
pub mod instances;
mod rip;
mod verify;

pub use bounds::{
    bf_recovery_bound, bound_traces, cross_gram_check, first_iter_bound, gram_action_check, lemma_alpha_bound,
    lemma_beta_bound, noisy_constants, reference_conditions, residual_bounds, residual_bounds_with,
    spectral_norm_check, BoundTrace, GuaranteeConstants, Inequality, ReferenceCondition, ResidualBounds,
};
pub use rip::{binomial, rip_constant, RipReport, SUBSET_GUARD};
pub use verify::{required_order, verify_guarantee, verify_guarantee_with, GuaranteeReport};

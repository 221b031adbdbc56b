//! First-order behaviour in the selection strength: every quantity here is
//! the derivative in `α` at `α = 0` of its counterpart in
//! [`crate::diffusion`].

mod exact;
mod numeric;

pub use exact::{
    d_fixation_monomial, wf_monomial_report, FirstOrderReport, MonomialKind, MonomialPsi,
    WfFirstOrder,
};
pub use numeric::{
    d_conditioned_drift, d_fixation, d_green, d_spectrum, d_time_cond_down, d_time_cond_up,
    d_time_unconditional, FirstOrder,
};

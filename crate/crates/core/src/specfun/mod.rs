//! Special functions and quadrature rules used by the closed-form
//! expressions. Everything here is a pure function of its inputs.

mod expint;
mod gamma;
mod hyp2f1;
mod marcum;
mod quadrature;
mod series;

pub use expint::{exp_integral_ei, exp_scaled_e1, EULER_GAMMA};
pub use gamma::{
    erfc, gamma, log_gamma, lower_incomplete_gamma, regularized_gamma_p, regularized_gamma_pq,
    regularized_gamma_q,
};
pub(crate) use gamma::ln_gamma;
pub use hyp2f1::hyp2f1_at_minus1;
pub use marcum::marcum_q_half;
pub use quadrature::{
    chebyshev_gauss_rule, gauss_laguerre_rule, QuadratureKind, QuadratureRule, MAX_LAGUERRE_ORDER,
};
pub use series::{poisson_half_mixture_sum, poisson_mixture_sum, SeriesControl};

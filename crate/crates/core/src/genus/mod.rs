//! Twisted elliptic genera: the defining product, its theta-function form,
//! the V-twisted variants, the modular coefficients `a_n` and numerical
//! transformation checks.

mod an;
mod numeric;
mod series;
mod spec;

pub use an::{
    a_n_from_ell, a_n_series, build_a0, build_a1, build_a3, check_prop32, check_vanishing,
    lambda_minus_one_w0_dual, lambda_minus_one_w_dual, twisted_sum_ch,
};
pub use numeric::{
    check_modularity, genus_numeric, genus_numeric_variant, lattice_sign, ModularityQuery, ModularityReport, GAMMA_ID,
    GAMMA_S, GAMMA_T,
};
pub use series::{
    def_integrand, ell_def, ell_theta, ell_v, is_real, theta_integrand, theta_nullwert_product, v_factor_def,
    v_factor_theta, Form, GenusSeries, VVariant,
};
pub use spec::{
    random_p1v_zero_roots, random_spec, random_valid_spec, reference_specs, valid_families, Flag, ManifoldSpec, RandomSpecBounds,
    VData, C1M_ZERO, C1W_ZERO, P1V_ZERO, P1_MATCH,
};

#[cfg(test)]
mod tests;

//! Executable checks of the inequalities and identities, producing structured reports.

mod checks;
mod report;
mod suite;

pub use checks::{
    change_of_variables, check_cap_cover, check_duality, check_invariance, check_isoperimetric,
    check_representation, check_santalo, check_valuation, semicontinuity_experiment, symmetric_caps,
    CHANGE_OF_VARIABLES_TOL, SEMICONT_DECAY, SEMICONT_EXPONENTS, SEMICONT_GROWTH,
};
pub use report::{ext_equal, rel_diff, CheckStatus, VerificationReport, Witness};
pub use suite::{alternate_rule, run_suite, Suite, SuiteConfig};

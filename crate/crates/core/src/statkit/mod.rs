//! Statistics kernel: least squares, t/F tails, moments, correlation and
//! standardization.

mod descriptive;
mod dist;
mod ols;

pub use descriptive::{
    descriptive, mean, pearson, pearson_pairwise, sample_sd, zscore, CorrelationEntry, DescriptiveStats,
};
pub use dist::{f_sf, inc_beta, ln_gamma, student_t_sf, student_t_upper_quantile};
pub use ols::{ols_multi, ols_simple, RegressionResult};

/// Significance stars: `***` p < .001, `**` p < .01, `*` p < .05.
pub fn significance_stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

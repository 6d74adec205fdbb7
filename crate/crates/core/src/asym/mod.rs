//! Varadhan-limit sweeps with rate fitting, q-means of grid solutions and
//! the limit constants they converge to.

mod bracket;
mod constants;
mod fit;
mod limits;
mod pool;
mod qmean;
mod study;

pub use bracket::{bracket_field, phi_residual_scan, BracketReport, PhiResidualScan};
pub use constants::{big_c_constant, c_constant, erfc_moment};
pub use fit::{
    fit_model, fit_power, fit_through_origin, fit_two_term, richardson, select_model, theoretical_regime,
    Extrapolation, ModelFit, ModelSelection, OriginFit, PowerFit, RateModel, TwoTermFit,
};
pub use limits::{
    elliptic_qmean_limit, parabolic_qmean_limit, predicted_limit, qmean_limit, scaled_qmean, QMeanResult,
    QMeanSettings, QMeanStudy,
};
pub use pool::{par_map, thread_count, THREADS_ENV};
pub use qmean::{ball_sample, q_mean, q_objective, QSample};
pub use study::{
    cell_grid, check_sequence, fit_probe, varadhan_sweep, AsymStudy, FdSettings, Probe, ProbeFit, Source,
    SELECTION_MARGIN,
};

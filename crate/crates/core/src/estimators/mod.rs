mod anneal;
mod hitting;
mod moments;
mod rate;
mod sampling;
mod stats;
mod stopping;
mod tv;
mod uphill;

pub use anneal::{anneal, validate_anneal_schedule, AnnealSegment};
pub use hitting::{
    drift_bm_level_hitting,
    cluster_hitting, hitting_time_packing, survival_curve, ClusterHittingConfig, ClusterMomentReport, HittingSample, SurvivalPoint,
    SurvivingEnergy,
};
pub use moments::{exp_moment_estimate, ExpMomentEstimate};
pub use rate::{fit_exponential_rate, RateFit};
pub use sampling::{sample_invariant, InvariantSampling, SampleSet};
pub use stats::{
    clopper_pearson_lower, clopper_pearson_upper, ks_critical, ks_statistic, normal_quantile, write_series_csv, EstimateReport, MeanEstimate,
};
pub use stopping::{border_level, sigma_sequence, sigma_sequence_from_series, tau1, weighted_energy};
pub use tv::{tv_against_law, tv_distance_estimate, Binning, DEFAULT_BINS};
pub use uphill::{uphill_initial_state, uphill_stage_samples, UphillConfig};

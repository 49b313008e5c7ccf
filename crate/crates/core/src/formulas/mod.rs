//! Closed-form quantities: densities, functional-inequality bounds, hitting-time
//! moments, the cluster parameter schedule and the affine-diffusion spectral gap.

mod gap;
mod poincare;
mod prophit;
mod psi;
pub mod quadrature;
mod radial;
mod schedule;
mod tricomi;

pub use gap::{first_negative_zero, gap_table, spectral_gap_affine, write_gap_csv, GapRow, DEFAULT_WINDOW};
pub use poincare::{poincare_bounds, radial_poincare_upper, PoincareBounds};
pub use prophit::prophit_bound;
pub use psi::{psi_exp_moment, sigma_hat_mean, sigma_hat_second_moment_upper};
pub use radial::{radial_density, radial_normalizer_closed_form, reduced_invariant_log_density, RadialDensity};
pub use schedule::{check_conditions, schedule, uphill_moment_lower_bound, ClusterSchedule, ScheduleConditions};
pub use tricomi::{tricomi_u, tricomi_u_series};

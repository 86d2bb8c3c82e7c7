//! Full time-dependent models of driven cavity networks and the experiments
//! that validate their effective descriptions.

mod calibration;
mod peaks;
mod three_site;
mod two_site;

pub use calibration::{bessel_j, exact_modulation_index, exact_shift_harmonics, sideband_stark};
pub use peaks::{first_peak, period_average};
pub use three_site::{
    build_three_site, chiral_circulation, three_site_trajectory, CirculationReport, PumpQubit, SingleParticleModel,
    SiteModulation, ThreeSiteFullSpec, ThreeSiteMode,
};
pub use two_site::{
    build_two_site_effective, build_two_site_full, rabi_compare, DetuningCalibration, RabiComparison, Resonance,
    TwoSiteFullSpec, SAMPLES_PER_PERIOD,
};

/// Population threshold for peak detection.
pub const PEAK_THRESHOLD: f64 = 0.3;

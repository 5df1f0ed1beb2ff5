//! Studies assembled from the lower modules: operator-norm sweeps, the
//! sharpness threshold, the Fourier quadratic-form gap, the frequency
//! multiplier bound, and report emission.

pub mod report;
pub mod sharpness;
pub mod spectral;
pub mod sweep;

pub use report::{
    compare_golden, emit_report, load_config, load_report, run_study, Claim, GapConfig, MultiplierConfig, SharpnessConfig,
    StudyConfig, StudyReport, Tolerances,
};
pub use sharpness::{classify, sharpness_study, Convergence, SharpnessInput, SharpnessRow};
pub use spectral::{
    anisotropic_multiplier_check, musina_nazarov_check, musina_nazarov_gap, odd_bump_pair, quadratic_form,
    sign_changing_family, MultiplierReport,
};
pub use sweep::{operator_norm_sweep, operator_ratio, SweepCell, SweepConfig, SweepDomain, SweepReport, SweepVerdict};

#[cfg(test)]
mod tests;

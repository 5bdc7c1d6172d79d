//! Derived quantities: critical coupling, time-reversal asymmetry of the
//! resonant reflection, absorption maps, gain scans and generic sweeps.

mod critical;
mod maps;
mod sweep;

pub use critical::{
    check_threshold, chi, delta_chi, find_gamma_r0, find_reflection_minimum, golden_section_log,
    resonant_reflection, time_reversal_report, ReflectionMinimum, TimeReversalReport, MINIMIZER_TOL,
    THRESHOLD_EXCLUSION,
};
pub use maps::{absorption_map, amplification_scan, AbsorptionMap, AmplificationScan, ScanRow};
pub use sweep::{sweep, Axis, AxisParam, Observable, Spacing, SweepRow, SweepSpec, SweepTable};

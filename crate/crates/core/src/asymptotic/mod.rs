//! Asymptotic critical values: Rabier's `ν`, the Gaffney number, the
//! M-tameness deficiency, critical-value sampling and radius probes.

mod functions;
mod k0;
mod optimize;
mod probe;

pub use functions::{gaffney, is_rank_deficient, mtame_deficiency, nu, MatrixFunctionError, RANK_TOL};
pub use k0::{k0_sample, K0Options};
pub use probe::{
    kinf_probe, mtame_probe, Candidate, ProbeError, ProbeRecord, ProbeReport, ProbeSchedule, SeedCurve, TrackEvidence,
};

//! Empirical checks of the monitor: paired-execution noninterference,
//! clearance confinement, and a label oracle for straight-line code.

pub mod confine;
pub mod gen;
pub mod ni;
pub mod straight;

pub use confine::{check_body, check_confinement, ConfinementReport, ConfinementViolation};
pub use gen::{generate_program, generate_with, Construct, GenConfig, Weights};
pub use ni::{
    campaign, run_case, run_pair, CampaignConfig, CampaignSummary, FailureRecord, NiVerdict, PairError,
    SecretPair, Status, VACUITY_THRESHOLD,
};
pub use straight::{oracle_final_label, SetLabel, StraightLine};

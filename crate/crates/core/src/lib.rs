//! Bell-experiment simulation and causal-model diagnostics.
//!
//! The crate has three layers:
//!
//! * the experiments — an exact two-qubit oracle ([`quantum`]), closed-form
//!   tables and seeded samplers for the V1 / V2 / BIG-V family ([`bell`]);
//! * the causal machinery — DAGs with d-separation ([`causal`]) and discrete
//!   structural causal models with interventions, counterfactuals, and
//!   constrained (locked) colliders ([`scm`]);
//! * the diagnostics — independence tests, no-signalling and
//!   statistical-independence audits, the deterministic hidden-variable
//!   bound, CHSH, faithfulness reports, and fine-tuning sweeps
//!   ([`analysis`]), with the whole claim suite bundled in [`report`].
//!
//! Everything seeded is deterministic in the seed and independent of worker
//! count; see [`rng`] for the chunking rule.

pub mod analysis;
pub mod bell;
pub mod causal;
pub mod error;
pub mod quantum;
pub mod report;
pub mod rng;
pub mod scm;
pub mod table;

pub use analysis::{
    chsh_optimal_angles, chsh_value, counterfactual_support_report, exact_ci, exact_ci_deviation,
    faithfulness_report, fine_tuning_sweep, g2_ci_test, kernel_table, lhv_same_outcome_bound,
    no_signalling_check, si_check, si_check_scm, CiStatement, CiTestResult, DeterministicStrategy,
    FaithfulnessReport, Scenario, SupportReport, SweepResult, Verdict,
};
pub use bell::{
    closed_form_table, outcome_agreement, posterior_initial, preselect_dataset, preselect_table,
    read_csv, sample_trials, Dataset, DatasetSummary, ExperimentKind, Relation, Setting,
    SettingPolicy, TrialRecord,
};
pub use causal::{figure_graph, Dag, DependencyClaim, DependencyClaimSet, FigureId, FigureModel};
pub use error::{Error, Result};
pub use quantum::{
    correlation_e, joint_outcome_probability, make_state, measurement_projector, InitialLabel,
    MeasurementDirection, Outcome, StateVector,
};
pub use report::{run_acceptance, AcceptanceReport, ClaimResult, Fault};
pub use scm::{
    bigv_nonlocal_scm, bigv_retro_scm, constrain_collider, damascus_constrained, damascus_scm,
    ConstrainedScm, Constraint, Cpt, RetroMode, Scm,
};
pub use table::{Frame, FrameColumn, JointTable, VarDef};

//! Viscosity sweeps, the self-similar counterexample family and the verdicts
//! drawn from them.

pub mod checks;
pub mod config;
pub mod counterexample;
pub mod initial;
pub mod report;
pub mod scenarios;
pub mod sweep;

pub use checks::{
    frequency_equivalence_check, global_existence_experiment, higher_order_bound_check, higher_order_trend,
    no_instant_dissipation_check, summarize_global_existence, EquivalenceReport, GlobalExistenceReport,
    HigherOrderVerdict, InstantDissipationTable, Verdict,
};
pub use config::{Engine, SweepConfig};
pub use counterexample::{build_counterexample_family, LatticeEvaluator, LatticeRequest, RadialBump};
pub use initial::InitialRecipe;
pub use report::{CauchyEntry, Keyed, MemberReport, SweepReport};
pub use scenarios::{Scenario, ScenarioVerdicts};
pub use sweep::{run_sweep, SweepRun};

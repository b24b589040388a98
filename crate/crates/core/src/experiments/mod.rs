//! Prediction-versus-simulation checks, scenario generators, parameter
//! sweeps and trace classification.

mod dynamics;
mod random;
mod sweep;
mod verify;

pub use dynamics::{classify_dynamics, DynamicsLabel};
pub use random::{random_scenario, ScenarioConstraints};
pub use sweep::{realize, run_sweep, SweepParameter, SweepPoint, SweepRow, SweepSpec};
pub use verify::{
    lift_dimension, politeness_pad, verify_batch, verify_prediction, verify_with_trace,
    BatchItem, VerificationReport,
};

/// Maps `f` over `items`, in parallel when requested and the `parallel`
/// feature is enabled. Output order always follows input order.
pub(crate) fn ordered_map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

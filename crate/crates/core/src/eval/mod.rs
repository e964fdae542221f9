//! Repeated stratified cross-validation and the timing experiment.

mod cv;
mod scalability;

pub use cv::{
    cross_validate, stratified_folds, EmbeddingVariant, EvalConfig, EvalReport, FoldRecord, C_GRID,
    SIGMA_GRID,
};
pub use scalability::{
    er_graph, plot_data, scalability_run, time_embedding, timing_csv, timing_recipe, ScalabilityConfig,
    TimingRow,
};

/// Scale every vector to unit Euclidean length; zero vectors stay zero.
pub fn l2_normalize(rows: &mut [Vec<f64>]) {
    for r in rows {
        let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            r.iter_mut().for_each(|v| *v /= norm);
        }
    }
}

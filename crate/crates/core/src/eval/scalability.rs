use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_erdos_renyi, Graph};
use crate::rng::derive_seed;
use crate::train::{build_corpus, train, DataDrivenRecipe, TrainConfig};
use crate::walk::{enumerate_vocabulary, RandomWalkGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalabilityConfig {
    pub sizes: Vec<usize>,
    /// Expected degrees μ = n·p.
    pub mus: Vec<f64>,
    pub reps: usize,
    pub recipe: DataDrivenRecipe,
    pub seed: u64,
}

impl Default for ScalabilityConfig {
    fn default() -> Self {
        ScalabilityConfig {
            sizes: vec![10, 100, 1_000, 10_000, 30_000],
            mus: vec![2.0, 3.0, 4.0, 5.0],
            reps: 10,
            recipe: timing_recipe(),
            seed: 0,
        }
    }
}

/// One epoch of 100 batches of 100, 128-dimensional vectors, window 100.
pub fn timing_recipe() -> DataDrivenRecipe {
    DataDrivenRecipe {
        length: 10,
        walks_per_node: 201,
        train: TrainConfig {
            window: 100,
            epochs: 1,
            iterations: 100,
            batch_size: 100,
            ..TrainConfig::default()
        },
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub mu: f64,
    pub mean_seconds: f64,
    pub std_seconds: f64,
}

/// Corpus sampling plus training for one graph, in seconds.
pub fn time_embedding(graph: &Graph, recipe: &DataDrivenRecipe) -> Result<f64> {
    let start = Instant::now();
    let vocab = enumerate_vocabulary(recipe.length)?;
    let rwg = RandomWalkGraph::new(graph);
    let corpus = build_corpus(&rwg, &vocab, recipe.walks_per_node, recipe.train.seed)?;
    train(std::slice::from_ref(&corpus), &recipe.train)?;
    Ok(start.elapsed().as_secs_f64())
}

/// Erdős–Rényi graph with `p = min(μ/n, 1)`; redrawn while it has no edge.
pub fn er_graph(n: usize, mu: f64, seed: u64) -> Result<Graph> {
    let p = (mu / n as f64).min(1.0);
    for attempt in 0..1000 {
        let g = generate_erdos_renyi(n, p, derive_seed(seed, &[attempt]))?;
        if g.edge_count() > 0 {
            return Ok(g);
        }
    }
    Err(Error::Invalid(format!(
        "could not draw a graph with edges for n={n}, μ={mu}"
    )))
}

pub fn scalability_run(cfg: &ScalabilityConfig) -> Result<Vec<TimingRow>> {
    if cfg.sizes.iter().any(|&n| n < 2) {
        return Err(Error::Invalid("graph sizes must be at least 2".into()));
    }
    if cfg.mus.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(Error::Invalid("μ values must be positive".into()));
    }
    if cfg.reps == 0 {
        return Err(Error::Invalid("at least one repetition is needed".into()));
    }
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        for &mu in &cfg.mus {
            let times = (0..cfg.reps)
                .map(|r| {
                    let g = er_graph(n, mu, derive_seed(cfg.seed, &[n as u64, mu.to_bits(), r as u64]))?;
                    time_embedding(&g, &cfg.recipe)
                })
                .collect::<Result<Vec<f64>>>()?;
            let k = times.len() as f64;
            let mean = times.iter().sum::<f64>() / k;
            let std = (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / k).sqrt();
            log::info!("n={n} μ={mu}: {mean:.3}s ± {std:.3}");
            rows.push(TimingRow {
                n,
                mu,
                mean_seconds: mean,
                std_seconds: std,
            });
        }
    }
    Ok(rows)
}

pub fn timing_csv(rows: &[TimingRow]) -> String {
    let mut s = String::from("n,mu,mean_seconds,std_seconds\n");
    for r in rows {
        writeln!(s, "{},{},{},{}", r.n, r.mu, r.mean_seconds, r.std_seconds).unwrap();
    }
    s
}

/// One series per μ, x = n on a log axis, y = mean seconds.
pub fn plot_data(rows: &[TimingRow]) -> serde_json::Value {
    let mut mus: Vec<f64> = rows.iter().map(|r| r.mu).collect();
    mus.sort_by(f64::total_cmp);
    mus.dedup();
    let series: Vec<serde_json::Value> = mus
        .iter()
        .map(|&mu| {
            let pts: Vec<&TimingRow> = rows.iter().filter(|r| r.mu == mu).collect();
            serde_json::json!({
                "label": format!("μ = {mu}"),
                "mu": mu,
                "x": pts.iter().map(|r| r.n).collect::<Vec<_>>(),
                "y": pts.iter().map(|r| r.mean_seconds).collect::<Vec<_>>(),
                "y_std": pts.iter().map(|r| r.std_seconds).collect::<Vec<_>>(),
            })
        })
        .collect();
    serde_json::json!({
        "x_label": "number of nodes",
        "y_label": "seconds",
        "x_scale": "log",
        "series": series,
    })
}

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::model::{
    apply_gradients, loss_and_gradients, CandidateSampler, Example, GraphVectors, ModelParams, Softmax,
    WalkModel,
};
use super::Corpus;
use crate::error::{Error, Result};
use crate::rng::{self, Stream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Walk vector size d_a.
    pub walk_dim: usize,
    /// Graph vector size d_g.
    pub graph_dim: usize,
    /// Context half-width Δ.
    pub window: usize,
    pub epochs: usize,
    /// Batch steps per epoch.
    pub iterations: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    /// Rate reached on the last step; the decay is linear.
    pub final_learning_rate: f64,
    pub softmax: Softmax,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            walk_dim: 128,
            graph_dim: 128,
            window: 4,
            epochs: 100,
            iterations: 100,
            batch_size: 100,
            learning_rate: 0.1,
            final_learning_rate: 1e-4,
            softmax: Softmax::Sampled {
                candidates: 5,
                sampler: CandidateSampler::Uniform,
            },
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, eta: usize) -> Result<()> {
        let fail = |m: String| Err(Error::Invalid(m));
        if self.walk_dim == 0 || self.graph_dim == 0 {
            return fail("embedding dimensions must be positive".into());
        }
        if self.window == 0 {
            return fail("window must be at least 1".into());
        }
        if self.batch_size == 0 {
            return fail("batch size must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.final_learning_rate >= 0.0)
            || !self.learning_rate.is_finite()
            || !self.final_learning_rate.is_finite()
        {
            return fail("learning rates must be finite, the initial one positive".into());
        }
        if let Softmax::Sampled { candidates, .. } = self.softmax {
            if candidates == 0 || candidates >= eta {
                return fail(format!(
                    "candidate count {candidates} must be between 1 and η-1 = {}",
                    eta.saturating_sub(1)
                ));
            }
        }
        Ok(())
    }

    fn rate(&self, step: usize) -> f64 {
        let total = self.epochs * self.iterations;
        if total <= 1 {
            return self.learning_rate;
        }
        let t = step as f64 / (total - 1) as f64;
        self.learning_rate + (self.final_learning_rate - self.learning_rate) * t
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub params: ModelParams,
    /// Mean batch loss of every epoch.
    pub epoch_losses: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Inferred {
    pub vector: Vec<f64>,
    pub epoch_losses: Vec<f64>,
}

/// `(graph, sequence, position)` of every target with a full window.
fn windows(corpora: &[Corpus], delta: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (g, c) in corpora.iter().enumerate() {
        for (s, seq) in c.sequences().iter().enumerate() {
            for t in delta..seq.len().saturating_sub(delta) {
                out.push((g, s, t));
            }
        }
    }
    out
}

fn check_corpora(corpora: &[Corpus], cfg: &TrainConfig) -> Result<(usize, Vec<(usize, usize, usize)>)> {
    let first = corpora
        .first()
        .ok_or_else(|| Error::Invalid("no corpora to train on".into()))?;
    let (l, eta) = (first.length(), first.vocabulary_size());
    if corpora.iter().any(|c| c.length() != l) {
        return Err(Error::DimensionMismatch(
            "corpora use different walk lengths".into(),
        ));
    }
    cfg.validate(eta)?;
    let w = windows(corpora, cfg.window);
    if w.is_empty() {
        let t = corpora.iter().map(Corpus::walks_per_node).max().unwrap_or(0);
        return Err(Error::Invalid(format!(
            "no full context window: {t} walks per node is less than 2·window+1 = {}",
            2 * cfg.window + 1
        )));
    }
    Ok((eta, w))
}

enum Shared<'a> {
    Train(&'a mut WalkModel),
    Frozen(&'a WalkModel),
}

impl Shared<'_> {
    fn get(&self) -> &WalkModel {
        match self {
            Shared::Train(w) => w,
            Shared::Frozen(w) => w,
        }
    }
}

fn run(
    corpora: &[Corpus],
    windows: &[(usize, usize, usize)],
    cfg: &TrainConfig,
    mut walk: Shared<'_>,
    graphs: &mut GraphVectors,
    rng: &mut Stream,
) -> Result<Vec<f64>> {
    let delta = cfg.window;
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut step = 0;
    let mut batch = Vec::with_capacity(cfg.batch_size);
    for epoch in 0..cfg.epochs {
        let mut total = 0.0;
        for iteration in 0..cfg.iterations {
            batch.clear();
            for _ in 0..cfg.batch_size {
                let (g, s, t) = windows[rng.random_range(0..windows.len())];
                let seq = &corpora[g].sequences()[s];
                let mut context = Vec::with_capacity(2 * delta);
                context.extend_from_slice(&seq[t - delta..t]);
                context.extend_from_slice(&seq[t + 1..=t + delta]);
                batch.push(Example {
                    graph: g,
                    context,
                    target: seq[t],
                });
            }
            let (loss, grads) = loss_and_gradients(walk.get(), graphs, &batch, cfg.softmax, rng)?;
            if !loss.is_finite() {
                return Err(Error::Diverged { epoch, iteration });
            }
            let lr = cfg.rate(step);
            let shared = match &mut walk {
                Shared::Train(w) => Some(&mut **w),
                Shared::Frozen(_) => None,
            };
            apply_gradients(shared, graphs, &grads, lr);
            total += loss;
            step += 1;
        }
        epoch_losses.push(if cfg.iterations > 0 {
            total / cfg.iterations as f64
        } else {
            f64::NAN
        });
    }
    Ok(epoch_losses)
}

/// Train walk vectors, output layer and one vector per corpus jointly.
/// Single-threaded and bit-reproducible for a fixed seed.
pub fn train(corpora: &[Corpus], cfg: &TrainConfig) -> Result<TrainOutcome> {
    let (eta, windows) = check_corpora(corpora, cfg)?;
    let mut init = rng::stream(cfg.seed, &[0]);
    let mut walk = WalkModel::init(eta, cfg.walk_dim, cfg.graph_dim, &mut init);
    let mut graphs = GraphVectors::init(corpora.len(), cfg.graph_dim, &mut init);
    let mut rng = rng::stream(cfg.seed, &[1]);
    let epoch_losses = run(
        corpora,
        &windows,
        cfg,
        Shared::Train(&mut walk),
        &mut graphs,
        &mut rng,
    )?;
    log::info!(
        "trained {} graph vectors, final epoch loss {:?}",
        corpora.len(),
        epoch_losses.last()
    );
    Ok(TrainOutcome {
        params: ModelParams { walk, graphs },
        epoch_losses,
    })
}

/// Learn the vector of a new graph with the shared parameters frozen.
pub fn infer_embedding(walk: &WalkModel, corpus: &Corpus, cfg: &TrainConfig) -> Result<Inferred> {
    if corpus.vocabulary_size() != walk.eta() {
        return Err(Error::DimensionMismatch(format!(
            "corpus vocabulary has {} walks, model has {}",
            corpus.vocabulary_size(),
            walk.eta()
        )));
    }
    if cfg.graph_dim != walk.graph_dim() {
        return Err(Error::DimensionMismatch(format!(
            "config graph_dim {} but model graph_dim {}",
            cfg.graph_dim,
            walk.graph_dim()
        )));
    }
    let corpora = std::slice::from_ref(corpus);
    let (_, windows) = check_corpora(corpora, cfg)?;
    let mut graphs = GraphVectors::init(1, walk.graph_dim(), &mut rng::stream(cfg.seed, &[2]));
    let mut rng = rng::stream(cfg.seed, &[3]);
    let epoch_losses = run(
        corpora,
        &windows,
        cfg,
        Shared::Frozen(walk),
        &mut graphs,
        &mut rng,
    )?;
    Ok(Inferred {
        vector: graphs.row(0).to_vec(),
        epoch_losses,
    })
}

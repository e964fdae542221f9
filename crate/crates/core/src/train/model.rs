use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters shared by all graphs: walk vectors `W` (η × d_a), output
/// weights `U` (η × (d_a + d_g)) and output biases `b` (η).
#[derive(Clone, Debug, PartialEq)]
pub struct WalkModel {
    eta: usize,
    d_a: usize,
    d_g: usize,
    w: Vec<f64>,
    u: Vec<f64>,
    b: Vec<f64>,
}

/// One `d_g`-dimensional vector per graph.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphVectors {
    d_g: usize,
    data: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub walk: WalkModel,
    pub graphs: GraphVectors,
}

fn uniform(rng: &mut impl Rng, len: usize, half_width: f64) -> Vec<f64> {
    (0..len)
        .map(|_| rng.random_range(-half_width..=half_width))
        .collect()
}

impl WalkModel {
    pub fn zeros(eta: usize, d_a: usize, d_g: usize) -> Self {
        WalkModel {
            eta,
            d_a,
            d_g,
            w: vec![0.0; eta * d_a],
            u: vec![0.0; eta * (d_a + d_g)],
            b: vec![0.0; eta],
        }
    }

    /// `W` uniform in ±0.5/d_a, `U` and `b` zero.
    pub fn init(eta: usize, d_a: usize, d_g: usize, rng: &mut impl Rng) -> Self {
        let mut m = WalkModel::zeros(eta, d_a, d_g);
        m.w = uniform(rng, eta * d_a, 0.5 / d_a as f64);
        m
    }

    pub fn from_parts(
        eta: usize,
        d_a: usize,
        d_g: usize,
        w: Vec<f64>,
        u: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        if w.len() != eta * d_a || u.len() != eta * (d_a + d_g) || b.len() != eta {
            return Err(Error::DimensionMismatch(format!(
                "tensor sizes {}, {}, {} do not fit η={eta}, d_a={d_a}, d_g={d_g}",
                w.len(),
                u.len(),
                b.len()
            )));
        }
        Ok(WalkModel {
            eta,
            d_a,
            d_g,
            w,
            u,
            b,
        })
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn walk_dim(&self) -> usize {
        self.d_a
    }

    pub fn graph_dim(&self) -> usize {
        self.d_g
    }

    pub fn hidden_dim(&self) -> usize {
        self.d_a + self.d_g
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn w_mut(&mut self) -> &mut [f64] {
        &mut self.w
    }

    pub fn u_mut(&mut self) -> &mut [f64] {
        &mut self.u
    }

    pub fn b_mut(&mut self) -> &mut [f64] {
        &mut self.b
    }

    pub fn w_row(&self, i: usize) -> &[f64] {
        &self.w[i * self.d_a..(i + 1) * self.d_a]
    }

    pub fn u_row(&self, i: usize) -> &[f64] {
        let h = self.hidden_dim();
        &self.u[i * h..(i + 1) * h]
    }
}

impl GraphVectors {
    pub fn zeros(count: usize, d_g: usize) -> Self {
        GraphVectors {
            d_g,
            data: vec![0.0; count * d_g],
        }
    }

    /// Uniform in ±0.5/d_g.
    pub fn init(count: usize, d_g: usize, rng: &mut impl Rng) -> Self {
        GraphVectors {
            d_g,
            data: uniform(rng, count * d_g, 0.5 / d_g as f64),
        }
    }

    pub fn from_rows(rows: &[Vec<f64>], d_g: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != d_g) {
            return Err(Error::DimensionMismatch(format!(
                "graph vectors must have {d_g} entries"
            )));
        }
        Ok(GraphVectors {
            d_g,
            data: rows.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d_g
    }

    pub fn len(&self) -> usize {
        self.data.len().checked_div(self.d_g).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, g: usize) -> &[f64] {
        &self.data[g * self.d_g..(g + 1) * self.d_g]
    }

    pub fn row_mut(&mut self, g: usize) -> &mut [f64] {
        &mut self.data[g * self.d_g..(g + 1) * self.d_g]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|g| self.row(g).to_vec()).collect()
    }
}

/// One training triple: the context walks around position `t` of a
/// sequence of graph `graph`, and the walk at `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub graph: usize,
    pub context: Vec<usize>,
    pub target: usize,
}

/// Distribution of negative candidates for sampled softmax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSampler {
    Uniform,
    /// `P(c) = ln((c + 2) / (c + 1)) / ln(η + 1)`, classes ranked by
    /// vocabulary index.
    LogUniform,
}

impl fmt::Display for CandidateSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateSampler::Uniform => "uniform",
            CandidateSampler::LogUniform => "loguniform",
        })
    }
}

impl FromStr for CandidateSampler {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(CandidateSampler::Uniform),
            "loguniform" | "log-uniform" => Ok(CandidateSampler::LogUniform),
            _ => Err(Error::Invalid(format!(
                "unknown candidate sampler {s:?} (expected uniform or loguniform)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Softmax {
    Full,
    /// Target plus `candidates` distinct negatives, logits corrected by the
    /// log expected count of each negative.
    Sampled {
        candidates: usize,
        sampler: CandidateSampler,
    },
}

/// Gradients of the batch loss on the rows and entries it touches.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Gradients {
    pub w: BTreeMap<usize, Vec<f64>>,
    pub d: BTreeMap<usize, Vec<f64>>,
    pub u: BTreeMap<usize, Vec<f64>>,
    pub b: BTreeMap<usize, f64>,
}

fn add_into(map: &mut BTreeMap<usize, Vec<f64>>, key: usize, scale: f64, values: &[f64]) {
    let row = map.entry(key).or_insert_with(|| vec![0.0; values.len()]);
    for (r, v) in row.iter_mut().zip(values) {
        *r += scale * v;
    }
}

fn check_finite(values: &[f64], tensor: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { tensor })
    }
}

/// Negatives for one example as `(class, ln expected count)`, never
/// including the target.
fn sample_candidates(
    rng: &mut impl Rng,
    eta: usize,
    target: usize,
    k: usize,
    sampler: CandidateSampler,
) -> Vec<(usize, f64)> {
    if k == eta - 1 {
        return (0..eta).filter(|&c| c != target).map(|c| (c, 0.0)).collect();
    }
    match sampler {
        CandidateSampler::Uniform => {
            let log_q = (k as f64 / (eta - 1) as f64).ln();
            index::sample(rng, eta - 1, k)
                .into_iter()
                .map(|c| (if c >= target { c + 1 } else { c }, log_q))
                .collect()
        }
        CandidateSampler::LogUniform => {
            let log_range = ((eta + 1) as f64).ln();
            let p = |c: usize| (((c + 2) as f64) / ((c + 1) as f64)).ln() / log_range;
            let rest = 1.0 - p(target);
            let mut picked = Vec::with_capacity(k);
            let mut seen = HashSet::with_capacity(k);
            let mut tries = 0u64;
            while picked.len() < k {
                let x = (rng.random::<f64>() * log_range).exp();
                let c = ((x as usize).max(1) - 1).min(eta - 1);
                if c == target {
                    continue;
                }
                tries += 1;
                if seen.insert(c) {
                    picked.push(c);
                }
            }
            picked
                .into_iter()
                .map(|c| {
                    let q = -(tries as f64 * (-p(c) / rest).ln_1p()).exp_m1();
                    (c, q.ln())
                })
                .collect()
        }
    }
}

/// Mean cross-entropy of the batch and its exact gradients.
///
/// The hidden vector of an example is the mean of its context walk vectors
/// concatenated with its graph vector; logits are `b_i + U_i · h`.
pub fn loss_and_gradients(
    walk: &WalkModel,
    graphs: &GraphVectors,
    batch: &[Example],
    softmax: Softmax,
    rng: &mut impl Rng,
) -> Result<(f64, Gradients)> {
    let (eta, d_a) = (walk.eta, walk.d_a);
    if graphs.dim() != walk.d_g {
        return Err(Error::DimensionMismatch(format!(
            "graph vectors have {} entries, model expects {}",
            graphs.dim(),
            walk.d_g
        )));
    }
    if batch.is_empty() {
        return Err(Error::Invalid("empty batch".into()));
    }
    if let Softmax::Sampled { candidates, .. } = softmax {
        if candidates == 0 || candidates >= eta {
            return Err(Error::Invalid(format!(
                "candidate count {candidates} must be in 1..={}",
                eta.saturating_sub(1)
            )));
        }
    }

    let scale = 1.0 / batch.len() as f64;
    let mut grads = Gradients::default();
    let mut loss = 0.0;
    let mut h = vec![0.0; walk.hidden_dim()];
    let mut dh = vec![0.0; walk.hidden_dim()];

    for ex in batch {
        if ex.graph >= graphs.len()
            || ex.target >= eta
            || ex.context.is_empty()
            || ex.context.iter().any(|&c| c >= eta)
        {
            return Err(Error::Invalid(format!(
                "example out of range: graph {}, target {}, context {:?}",
                ex.graph, ex.target, ex.context
            )));
        }
        let ctx_scale = 1.0 / ex.context.len() as f64;
        h.fill(0.0);
        for &c in &ex.context {
            let row = walk.w_row(c);
            check_finite(row, "W")?;
            for (x, v) in h[..d_a].iter_mut().zip(row) {
                *x += v;
            }
        }
        for x in &mut h[..d_a] {
            *x *= ctx_scale;
        }
        let d = graphs.row(ex.graph);
        check_finite(d, "D")?;
        h[d_a..].copy_from_slice(d);

        // (class, logit correction); the target comes first
        let classes: Vec<(usize, f64)> = match softmax {
            Softmax::Full => (0..eta).map(|c| (c, 0.0)).collect(),
            Softmax::Sampled { candidates, sampler } => {
                let mut v = vec![(ex.target, 0.0)];
                v.extend(sample_candidates(rng, eta, ex.target, candidates, sampler));
                v
            }
        };
        let mut logits = Vec::with_capacity(classes.len());
        for &(c, log_q) in &classes {
            let u = walk.u_row(c);
            check_finite(u, "U")?;
            if !walk.b[c].is_finite() {
                return Err(Error::NonFinite { tensor: "b" });
            }
            logits.push(walk.b[c] + u.iter().zip(&h).map(|(a, b)| a * b).sum::<f64>() - log_q);
        }
        let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        let target_pos = classes.iter().position(|&(c, _)| c == ex.target).unwrap();
        loss += lse - logits[target_pos];

        dh.fill(0.0);
        for (pos, (&(c, _), &z)) in classes.iter().zip(&logits).enumerate() {
            let mut g = (z - lse).exp();
            if pos == target_pos {
                g -= 1.0;
            }
            let g = g * scale;
            add_into(&mut grads.u, c, g, &h);
            *grads.b.entry(c).or_insert(0.0) += g;
            for (x, u) in dh.iter_mut().zip(walk.u_row(c)) {
                *x += g * u;
            }
        }
        for &c in &ex.context {
            add_into(&mut grads.w, c, ctx_scale, &dh[..d_a]);
        }
        add_into(&mut grads.d, ex.graph, 1.0, &dh[d_a..]);
    }
    Ok((loss * scale, grads))
}

/// `θ ← θ − lr · ∇θ`. Shared parameters are left alone when `walk` is `None`.
pub fn apply_gradients(walk: Option<&mut WalkModel>, graphs: &mut GraphVectors, grads: &Gradients, lr: f64) {
    if let Some(walk) = walk {
        let (d_a, h) = (walk.d_a, walk.hidden_dim());
        for (&i, g) in &grads.w {
            for (p, g) in walk.w[i * d_a..(i + 1) * d_a].iter_mut().zip(g) {
                *p -= lr * g;
            }
        }
        for (&i, g) in &grads.u {
            for (p, g) in walk.u[i * h..(i + 1) * h].iter_mut().zip(g) {
                *p -= lr * g;
            }
        }
        for (&i, g) in &grads.b {
            walk.b[i] -= lr * g;
        }
    }
    for (&i, g) in &grads.d {
        for (p, g) in graphs.row_mut(i).iter_mut().zip(g) {
            *p -= lr * g;
        }
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use awe::eval::{
    cross_validate, l2_normalize, plot_data, scalability_run, timing_csv, EmbeddingVariant, EvalConfig,
    ScalabilityConfig,
};
use awe::export::{dense_records, feature_records, write_json, EmbeddingMatrix};
use awe::feature::{embed_collection, estimate_walk_count, FeatureRecipe, SamplingPlan};
use awe::graph::{class_ids, load_collection, DatasetFormat, GraphCollection};
use awe::kernel::{EmbeddingFingerprint, KernelSpec, PairwiseTable};
use awe::train::{
    embed_collection_dd, save_checkpoint, CandidateSampler, DataDrivenRecipe, Softmax, TrainConfig,
};
use awe::walk::{enumerate_vocabulary, RandomWalkGraph};

use crate::manifest::{beside, RunManifest};
use crate::{ClassifyArgs, DatasetArgs, EmbedDdArgs, EmbedFbArgs, EnumerateArgs, ScalabilityArgs, TrainArgs};

/// Exit code and message of a failed command.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<awe::Error> for Failure {
    fn from(e: awe::Error) -> Self {
        Failure {
            code: if e.is_validation() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CmdResult = Result<(), Failure>;

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure {
        code: 3,
        message: format!("{}: {e}", path.display()),
    }
}

fn create_dir(path: &Path) -> CmdResult {
    fs::create_dir_all(path).map_err(io_err(path))
}

/// Relative paths that do not exist are retried under `$AWE_DATA_DIR`.
fn resolve_dataset(path: &Path) -> PathBuf {
    if path.exists() || path.is_absolute() {
        return path.to_path_buf();
    }
    if let Some(dir) = std::env::var_os("AWE_DATA_DIR") {
        let candidate = Path::new(&dir).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn detect_format(dir: &Path, flag: &str) -> Result<DatasetFormat, Failure> {
    if flag != "auto" {
        return Ok(flag.parse()?);
    }
    let entries = fs::read_dir(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
    let names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    if names.iter().any(|n| n.ends_with("_A.txt")) {
        Ok(DatasetFormat::BenchmarkCollection)
    } else if names.iter().any(|n| n == "labels.txt") {
        Ok(DatasetFormat::EdgeListDir)
    } else {
        Err(invalid(format!(
            "{}: no *_A.txt or labels.txt found; pass --format",
            dir.display()
        )))
    }
}

fn load(args: &DatasetArgs) -> Result<(GraphCollection, PathBuf), Failure> {
    let path = resolve_dataset(&args.dataset);
    if !path.is_dir() {
        return Err(invalid(format!("dataset directory {} not found", path.display())));
    }
    let format = detect_format(&path, &args.format)?;
    let collection = load_collection(&path, format)?;
    if collection.is_empty() {
        return Err(invalid(format!("{} holds no graphs", path.display())));
    }
    log::info!(
        "loaded {} graphs, {} classes, {:.2} nodes on average",
        collection.len(),
        collection.num_classes(),
        collection.mean_node_count()
    );
    Ok((collection, path))
}

pub fn enumerate(a: EnumerateArgs, threads: Option<usize>) -> CmdResult {
    let vocab = enumerate_vocabulary(a.length)?;
    match &a.out {
        None => {
            let stdout = std::io::stdout();
            vocab
                .write_dump(std::io::BufWriter::new(stdout.lock()))
                .map_err(|e| Failure {
                    code: 3,
                    message: e.to_string(),
                })?;
        }
        Some(out) => {
            let mut file = std::io::BufWriter::new(fs::File::create(out).map_err(io_err(out))?);
            vocab.write_dump(&mut file).map_err(io_err(out))?;
            file.flush().map_err(io_err(out))?;
            let mut m = RunManifest::new("enumerate", threads);
            m.parameters = json!({ "l": a.length, "eta": vocab.len() });
            m.outputs.push(out.clone());
            m.write(&beside(out))?;
        }
    }
    Ok(())
}

pub fn embed_fb(a: EmbedFbArgs, threads: Option<usize>) -> CmdResult {
    let start = Instant::now();
    let exact = match a.mode.as_str() {
        "exact" => true,
        "sampled" => false,
        other => return Err(invalid(format!("--mode must be exact or sampled, not {other:?}"))),
    };
    if a.lengths.is_empty() {
        return Err(invalid("--l needs at least one walk length"));
    }
    let mut lengths = a.lengths.clone();
    lengths.sort_unstable();
    lengths.dedup();

    // every check before the first file is written
    let mut plans = Vec::new();
    for &l in &lengths {
        let vocab = enumerate_vocabulary(l)?;
        let recipe = if exact {
            FeatureRecipe::Exact { budget: a.budget }
        } else {
            let plan = match a.samples {
                Some(m) => SamplingPlan::fixed(m)?,
                None => SamplingPlan::from_bound(a.eps, a.delta, vocab.len())?,
            };
            FeatureRecipe::Sampled {
                samples: plan.samples,
                seed: awe::rng::derive_seed(a.seed, &[l as u64]),
            }
        };
        plans.push((l, vocab, recipe));
    }
    let (collection, dataset) = load(&a.data)?;
    if exact {
        for (l, _, _) in &plans {
            for (i, g) in collection.graphs.iter().enumerate() {
                let estimate = estimate_walk_count(&RandomWalkGraph::new(g), *l);
                if estimate > a.budget {
                    log::error!("graph {i} is too dense for exact mode at l={l}");
                    return Err(awe::Error::CostGuard {
                        estimate,
                        budget: a.budget,
                    }
                    .into());
                }
            }
        }
    }

    create_dir(&a.out)?;
    let mut manifest = RunManifest::new("embed-fb", threads);
    manifest.inputs.push(dataset.clone());
    let mut samples = BTreeMap::new();
    let mut per_length_seconds = BTreeMap::new();
    for (l, vocab, recipe) in &plans {
        let t = Instant::now();
        if let FeatureRecipe::Sampled { samples: m, seed } = recipe {
            println!("l={l}: eta={}, sampling m={m} walks per graph", vocab.len());
            samples.insert(l.to_string(), *m);
            manifest.seeds.push(*seed);
        } else {
            println!("l={l}: eta={}, exact enumeration", vocab.len());
        }
        let embeddings = embed_collection(&collection, vocab, *recipe)?;
        let csv = a.out.join(format!("fb_l{l}.csv"));
        let js = a.out.join(format!("fb_l{l}.json"));
        EmbeddingMatrix::from_feature(&embeddings).write_csv(&csv)?;
        write_json(&js, &feature_records(&embeddings))?;
        manifest.outputs.extend([csv, js]);
        per_length_seconds.insert(l.to_string(), t.elapsed().as_secs_f64());
    }
    manifest.parameters = json!({
        "dataset": dataset,
        "graphs": collection.len(),
        "mode": a.mode,
        "l": lengths,
        "eps": if exact || a.samples.is_some() { None } else { Some(a.eps) },
        "delta": if exact || a.samples.is_some() { None } else { Some(a.delta) },
        "samples": samples,
        "budget": if exact { Some(a.budget) } else { None },
        "seed": a.seed,
    });
    manifest.timings =
        json!({ "total_seconds": start.elapsed().as_secs_f64(), "per_length_seconds": per_length_seconds });
    manifest.write(&a.out.join("manifest.json"))?;
    Ok(())
}

fn train_config(t: &TrainArgs) -> Result<TrainConfig, Failure> {
    let softmax = match t.softmax.as_str() {
        "full" => Softmax::Full,
        "sampled" => Softmax::Sampled {
            candidates: t.candidates,
            sampler: t.sampler.parse::<CandidateSampler>()?,
        },
        other => {
            return Err(invalid(format!(
                "--softmax must be full or sampled, not {other:?}"
            )))
        }
    };
    Ok(TrainConfig {
        walk_dim: t.walk_dim,
        graph_dim: t.graph_dim,
        window: t.window,
        epochs: t.epochs,
        iterations: t.iterations,
        batch_size: t.batch,
        learning_rate: t.lr,
        final_learning_rate: t.final_lr,
        softmax,
        seed: t.seed,
    })
}

fn check_recipe(recipe: &DataDrivenRecipe) -> CmdResult {
    let vocab = enumerate_vocabulary(recipe.length)?;
    recipe.train.validate(vocab.len())?;
    let need = 2 * recipe.train.window + 1;
    if recipe.walks_per_node < need {
        return Err(invalid(format!(
            "--walks-per-node {} is too short for --window {}: need at least {need}",
            recipe.walks_per_node, recipe.train.window
        )));
    }
    Ok(())
}

pub fn embed_dd(a: EmbedDdArgs, threads: Option<usize>) -> CmdResult {
    let start = Instant::now();
    let recipe = DataDrivenRecipe {
        length: a.train.length,
        walks_per_node: a.train.walks_per_node,
        train: train_config(&a.train)?,
    };
    check_recipe(&recipe)?;
    let (collection, dataset) = load(&a.data)?;
    create_dir(&a.out)?;

    let outcome = embed_collection_dd(&collection, &recipe)?;
    let rows = outcome.params.graphs.to_rows();
    let csv = a.out.join("dd.csv");
    let js = a.out.join("dd.json");
    let model = a.out.join("model.bin");
    EmbeddingMatrix::from_dense(rows.clone()).write_csv(&csv)?;
    write_json(&js, &dense_records(&rows, recipe.length))?;
    save_checkpoint(&outcome.params, recipe.length, &model)?;
    if let (Some(first), Some(last)) = (outcome.epoch_losses.first(), outcome.epoch_losses.last()) {
        println!(
            "trained {} graph vectors: loss {first:.4} -> {last:.4}",
            rows.len()
        );
    }

    let mut manifest = RunManifest::new("embed-dd", threads);
    manifest.parameters = json!({
        "dataset": dataset,
        "graphs": collection.len(),
        "l": recipe.length,
        "walks_per_node": recipe.walks_per_node,
        "d_a": recipe.train.walk_dim,
        "d_g": recipe.train.graph_dim,
        "train": recipe.train,
        "epoch_losses": outcome.epoch_losses,
    });
    manifest.seeds.push(recipe.train.seed);
    manifest.inputs.push(dataset);
    manifest.outputs.extend([csv, js, model]);
    manifest.timings = json!({ "total_seconds": start.elapsed().as_secs_f64() });
    manifest.write(&a.out.join("manifest.json"))?;
    Ok(())
}

fn read_labels(path: &Path) -> Result<Vec<String>, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| invalid(format!("labels file {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn kernel_grid(a: &ClassifyArgs) -> Result<Vec<KernelSpec>, Failure> {
    let mut out = Vec::new();
    for k in &a.kernels {
        match k.as_str() {
            "inner" => out.push(KernelSpec::Inner),
            "poly" | "polynomial" => out.push(KernelSpec::Polynomial {
                c: a.poly_c,
                degree: a.poly_degree,
            }),
            "rbf" => out.extend(a.sigma.iter().map(|&sigma| KernelSpec::Rbf { sigma })),
            other => return Err(invalid(format!("unknown kernel {other:?} (inner, poly, rbf)"))),
        }
    }
    for k in &out {
        k.validate()?;
    }
    Ok(out)
}

pub fn classify(a: ClassifyArgs, threads: Option<usize>) -> CmdResult {
    let start = Instant::now();
    let mut manifest = RunManifest::new("classify", threads);
    let raw = match (&a.labels, &a.dataset) {
        (Some(path), _) => {
            manifest.inputs.push(path.clone());
            read_labels(path)?
        }
        (None, Some(ds)) => {
            let (c, path) = load(&DatasetArgs {
                dataset: ds.clone(),
                format: a.format.clone(),
            })?;
            manifest.inputs.push(path);
            c.labels.iter().map(|&l| c.class_names[l].clone()).collect()
        }
        (None, None) => return Err(invalid("pass --labels or --dataset")),
    };
    let (labels, class_names) = class_ids(&raw);
    let cfg = EvalConfig {
        folds: a.folds,
        repeats: a.repeats,
        c_grid: a.c_grid.clone(),
        kernels: kernel_grid(&a)?,
        seed: a.seed,
    };
    cfg.validate()?;

    let mut variants = Vec::new();
    for path in &a.embeddings {
        let mut m = EmbeddingMatrix::read_csv(path)?;
        if m.rows.len() != labels.len() {
            return Err(invalid(format!(
                "{} has {} graphs but there are {} labels",
                path.display(),
                m.rows.len(),
                labels.len()
            )));
        }
        if a.normalize {
            l2_normalize(&mut m.rows);
        }
        let name = path.file_stem().map_or_else(
            || path.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        let table = PairwiseTable::from_dense(
            &m.rows,
            EmbeddingFingerprint {
                mode: name.clone(),
                length: None,
                dim: m.columns.len(),
            },
        )?;
        variants.push(EmbeddingVariant { name, table });
        manifest.inputs.push(path.clone());
    }
    // fail on the fold split before any SVM is trained
    awe::eval::stratified_folds(&labels, cfg.folds, 0)?;

    let report = cross_validate(&labels, &variants, &cfg)?;
    write_json(&a.out, &report)?;
    println!(
        "accuracy {:.2}% ± {:.2} over {} folds",
        100.0 * report.mean,
        100.0 * report.std,
        report.folds.len()
    );
    manifest.parameters = json!({
        "config": cfg,
        "classes": class_names,
        "normalize": a.normalize,
    });
    manifest.seeds.push(a.seed);
    manifest.outputs.push(a.out.clone());
    manifest.timings = json!({
        "cross_validation_seconds": report.seconds,
        "total_seconds": start.elapsed().as_secs_f64(),
    });
    manifest.write(&beside(&a.out))?;
    Ok(())
}

pub fn scalability(a: ScalabilityArgs, threads: Option<usize>) -> CmdResult {
    let start = Instant::now();
    let recipe = DataDrivenRecipe {
        length: a.length,
        walks_per_node: a.walks_per_node,
        train: TrainConfig {
            walk_dim: a.dim,
            graph_dim: a.dim,
            window: a.window,
            epochs: a.epochs,
            iterations: a.iterations,
            batch_size: a.batch,
            seed: a.seed,
            ..TrainConfig::default()
        },
    };
    check_recipe(&recipe)?;
    if a.sizes.is_empty() || a.mus.is_empty() {
        return Err(invalid("--sizes and --mu must be nonempty"));
    }
    let cfg = ScalabilityConfig {
        sizes: a.sizes,
        mus: a.mus,
        reps: a.reps,
        recipe,
        seed: a.seed,
    };
    let rows = scalability_run(&cfg)?;
    create_dir(&a.out)?;
    let csv = a.out.join("timings.csv");
    let plot = a.out.join("plot.json");
    fs::write(&csv, timing_csv(&rows)).map_err(io_err(&csv))?;
    write_json(&plot, &plot_data(&rows))?;
    print!("{}", timing_csv(&rows));

    let mut manifest = RunManifest::new("scalability", threads);
    manifest.parameters = serde_json::to_value(&cfg).map_err(awe::Error::from)?;
    manifest.seeds.push(cfg.seed);
    manifest.outputs.extend([csv, plot]);
    manifest.timings = json!({ "total_seconds": start.elapsed().as_secs_f64() });
    manifest.write(&a.out.join("manifest.json"))?;
    Ok(())
}

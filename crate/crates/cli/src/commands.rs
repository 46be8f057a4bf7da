use std::fs;
use std::path::Path;

use bandgen_core::datasets::{self, bandwidth_report, load_jsonl, REPORT_TSV_HEADER};
use bandgen_core::metrics::{extract_stats, f1_pr, mmd_suite, spearman_r, MMDReport, PRReport};
use bandgen_core::model::{
    estimate_row_width_with, hyperopt, log_likelihood, reconstruction_auprc, sample, select_temperature, train,
    Checkpoint, ModelParams, SearchResult, TemperatureTrial,
};
use bandgen_core::ordering::{self, OrderingConfig};
use bandgen_core::rng::derive_seed;
use bandgen_core::{Error, Graph, OrderingFamily, Result};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;

use crate::artifacts::{adjacency_pgm, tagged_path, write_graphs, write_json};
use crate::cli::{
    Cli, Command, CorrelateArgs, DatasetArgs, EvalArgs, HyperoptArgs, Overrides, ReorderArgs, ReportArgs, SampleArgs,
    TrainArgs,
};
use crate::config::{resolve, RunConfig};

pub fn run(cli: Cli) -> Result<()> {
    if cli.workers == 0 {
        return Err(Error::Input("--workers must be at least 1".into()));
    }
    let file = cli.config.as_deref();
    let w = cli.workers;
    match cli.command {
        Command::Dataset(a) => cmd_dataset(&a, file),
        Command::Report(a) => cmd_report(&a, file),
        Command::Train(a) => cmd_train(&a, file, w),
        Command::Sample(a) => cmd_sample(&a, file, w),
        Command::Eval(a) => cmd_eval(&a, file, w),
        Command::Hyperopt(a) => cmd_hyperopt(&a, file, w),
        Command::Reorder(a) => cmd_reorder(&a, file),
        Command::Correlate(a) => cmd_correlate(&a, file),
    }
}

fn load_nonempty(path: &Path) -> Result<Vec<Graph>> {
    let graphs = load_jsonl(path)?;
    if graphs.is_empty() {
        return Err(Error::Input(format!("{} holds no graphs", path.display())));
    }
    Ok(graphs)
}

pub fn cmd_dataset(a: &DatasetArgs, file: Option<&Path>) -> Result<()> {
    let mut o = Overrides::default();
    o.set("kind", &a.kind).set("count", &a.count).set("seed", &a.seed).set("replicate", &a.replicate).set("split", &a.split);
    let cfg = resolve(&RunConfig::default(), o.0, file)?;
    let r = &cfg.run;
    if r.replicate == 0 {
        return Err(Error::Input("replicate must be at least 1".into()));
    }
    let graphs = datasets::replicate(&datasets::generate(r.kind, r.count, cfg.seed())?, r.replicate);
    write_graphs(&a.out, &graphs, "dataset", &cfg)?;
    println!("wrote {} {} graphs to {}", graphs.len(), r.kind, a.out.display());
    if !r.split.is_empty() {
        let fractions: [f64; 3] = r.split.as_slice().try_into().map_err(|_| {
            Error::Input(format!("split needs three fractions (train,val,test), got {}", r.split.len()))
        })?;
        let (tr, va, te) = datasets::split(graphs, fractions, cfg.seed())?;
        for (tag, part) in [("train", &tr), ("val", &va), ("test", &te)] {
            let path = tagged_path(&a.out, tag);
            write_graphs(&path, part, "dataset", &cfg)?;
            println!("wrote {} graphs to {}", part.len(), path.display());
        }
    }
    Ok(())
}

pub fn cmd_report(a: &ReportArgs, file: Option<&Path>) -> Result<()> {
    let mut o = Overrides::default();
    o.set("order", &a.order).set("seed", &a.seed);
    let cfg = resolve(&RunConfig::default(), o.0, file)?;
    let graphs = load_nonempty(&a.input)?;
    let name = match &a.name {
        Some(n) => n.clone(),
        None => a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
    };
    if name.contains(['\t', '\n']) {
        return Err(Error::Input("dataset name may not contain tabs or newlines".into()));
    }
    let report = bandwidth_report(&name, &graphs, &cfg.ordering());
    let row = report.tsv_row();
    fs::write(&a.out, format!("# config_hash: {}\n{REPORT_TSV_HEADER}\n{row}\n", cfg.hash()))?;
    println!("{REPORT_TSV_HEADER}\n{row}");
    Ok(())
}

/// Training and validation graphs: `--val` if given, else a seeded holdout.
fn train_val(data: &Path, val: Option<&Path>, cfg: &RunConfig) -> Result<(Vec<Graph>, Vec<Graph>)> {
    let graphs = load_nonempty(data)?;
    if let Some(v) = val {
        return Ok((graphs, load_jsonl(v)?));
    }
    let f = cfg.run.val_fraction;
    if !(0.0..1.0).contains(&f) {
        return Err(Error::Input(format!("val_fraction must be in [0, 1), got {f}")));
    }
    let (tr, va, _) = datasets::split(graphs, [1.0 - f, f, 0.0], cfg.seed())?;
    Ok((tr, va))
}

fn sized(cfg: &RunConfig, graphs: &[Graph]) -> Result<RunConfig> {
    let mut out = cfg.clone();
    if out.model.row_width.is_none() {
        let d = estimate_row_width_with(graphs, cfg.model.mode, &cfg.model_ordering(), cfg.run.baseline_samples)?;
        out.model.row_width = Some(d);
    }
    Ok(out)
}

pub fn cmd_train(a: &TrainArgs, file: Option<&Path>, workers: usize) -> Result<()> {
    let mut o = Overrides::default();
    a.model.overrides(&mut o);
    o.set("temp_grid", &a.temp_grid);
    let cfg = resolve(&RunConfig::default(), o.0, file)?;
    let (tr, va) = train_val(&a.data, a.val.as_deref(), &cfg)?;
    let sized = sized(&cfg, &tr)?;
    let mut model = sized.model.clone();
    let ord = cfg.model_ordering();
    let (params, history) = train(ModelParams::for_config(&model)?, &model, &tr, &va, &ord)?;
    println!("row_width: {}", params.row_width());
    if let (Some(e), Some(v)) = (history.best_epoch, history.best_val_bce) {
        println!("best_epoch: {e} val_bce: {v:.6}");
    }
    if !cfg.run.temp_grid.is_empty() {
        if va.is_empty() {
            return Err(Error::Input("temperature selection needs validation graphs".into()));
        }
        let (t, trials) =
            select_temperature(&params, &model, &va, &cfg.run.temp_grid, cfg.seed(), &cfg.metrics, workers)?;
        for TemperatureTrial { temperature, mmd } in &trials {
            println!("temperature {temperature}: mmd2 mean {:.6}", mmd.mean);
        }
        model.temperature = t;
        println!("temperature: {t}");
    }
    let mut ckpt = Checkpoint::new(&params, &model, &ord, history);
    ckpt.config_hash = Some(cfg.hash());
    ckpt.save(&a.out)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

/// Config for commands that start from a checkpoint: its model settings and
/// ordering replace the defaults before flags and the file apply.
fn from_checkpoint(ckpt: &Checkpoint) -> RunConfig {
    let mut base = RunConfig { model: ckpt.config.clone(), ..RunConfig::default() };
    base.run.tie_break = ckpt.ordering.tie_break;
    base
}

pub fn cmd_sample(a: &SampleArgs, file: Option<&Path>, workers: usize) -> Result<()> {
    let ckpt = Checkpoint::load(&a.ckpt)?;
    let params = ckpt.params()?;
    let mut o = Overrides::default();
    o.set("count", &a.count).set("temperature", &a.temp).set("seed", &a.seed).set("max_nodes", &a.max_nodes);
    let cfg = resolve(&from_checkpoint(&ckpt), o.0, file)?;
    let graphs = sample(&params, &cfg.model, cfg.run.count, cfg.seed(), workers)?;
    write_graphs(&a.out, &graphs, "sample", &cfg)?;
    println!("wrote {} graphs to {}", graphs.len(), a.out.display());
    Ok(())
}

#[derive(Serialize)]
struct EvalReport {
    mmd: MMDReport,
    f1_pr: PRReport,
    auprc: Option<f64>,
    mean_ll: Option<f64>,
    generated: usize,
    test: usize,
    config_echo: BTreeMap<String, Value>,
    config_hash: String,
}

pub fn cmd_eval(a: &EvalArgs, file: Option<&Path>, workers: usize) -> Result<()> {
    let ckpt = a.ckpt.as_deref().map(Checkpoint::load).transpose()?;
    let base = ckpt.as_ref().map(from_checkpoint).unwrap_or_default();
    let test = load_nonempty(&a.test)?;
    let mut o = Overrides::default();
    o.set("count", &Some(a.count.unwrap_or(test.len()))).set("temperature", &a.temp).set("seed", &a.seed);
    let cfg = resolve(&base, o.0, file)?;
    let params = ckpt.as_ref().map(Checkpoint::params).transpose()?;

    let generated = match (&a.generated, &params) {
        (Some(path), _) => load_nonempty(path)?,
        (None, Some(p)) => sample(p, &cfg.model, cfg.run.count, cfg.seed(), workers)?,
        (None, None) => return Err(Error::Input("eval needs --ckpt or --generated".into())),
    };
    let stats = cfg.metrics.stats();
    let gen_stats = extract_stats(&generated, &stats, workers)?;
    let test_stats = extract_stats(&test, &stats, workers)?;
    let mmd = mmd_suite(&gen_stats, &test_stats, &cfg.metrics.kernels());
    let f1 = f1_pr(&gen_stats, &test_stats, cfg.metrics.pr_k)?;

    let (auprc, mean_ll) = match (&params, &ckpt) {
        (Some(p), Some(c)) => {
            let ord = c.ordering.with_seed(cfg.seed());
            let auprc = reconstruction_auprc(p, &test, &ord)?;
            let mut total = 0.0;
            for (i, g) in test.iter().enumerate() {
                total += log_likelihood(p, g, &ord.with_seed(derive_seed(ord.seed, i as u64)))?;
            }
            (Some(auprc), Some(total / test.len() as f64))
        }
        _ => (None, None),
    };
    let report = EvalReport {
        mmd,
        f1_pr: f1,
        auprc,
        mean_ll,
        generated: generated.len(),
        test: test.len(),
        config_echo: cfg.flat(),
        config_hash: cfg.hash(),
    };
    write_json(&a.out, &report)?;
    println!("mmd2 mean: {:.6}  f1_pr: {:.4}", report.mmd.mean, report.f1_pr.f1);
    if let (Some(ap), Some(ll)) = (auprc, mean_ll) {
        println!("auprc: {ap:.4}  mean_ll: {ll:.4}");
    }
    Ok(())
}

#[derive(Serialize)]
struct HyperoptReport {
    search: SearchResult,
    row_width: usize,
    config_echo: BTreeMap<String, Value>,
    config_hash: String,
}

pub fn cmd_hyperopt(a: &HyperoptArgs, file: Option<&Path>, workers: usize) -> Result<()> {
    let mut o = Overrides::default();
    a.model.overrides(&mut o);
    o.set("trials", &a.trials).set("objective", &a.objective);
    let cfg = resolve(&RunConfig::default(), o.0, file)?;
    let (tr, va) = train_val(&a.data, a.val.as_deref(), &cfg)?;
    let sized = sized(&cfg, &tr)?;
    let search = hyperopt(
        &sized.model,
        &tr,
        &va,
        &cfg.model_ordering(),
        &cfg.search_space(),
        cfg.run.trials,
        cfg.run.objective,
        &cfg.metrics,
        workers,
    )?;
    let best = search.best_trial();
    println!("best trial {}: lr {} weight_decay {} objective {:.6}", best.index, best.lr, best.weight_decay, best.objective);
    let report = HyperoptReport {
        row_width: sized.model.width()?,
        search,
        config_echo: cfg.flat(),
        config_hash: cfg.hash(),
    };
    write_json(&a.out, &report)
}

pub fn cmd_reorder(a: &ReorderArgs, file: Option<&Path>) -> Result<()> {
    let mut o = Overrides::default();
    o.set("seed", &a.seed);
    let cfg = resolve(&RunConfig::default(), o.0, file)?;
    let graphs = load_nonempty(&a.input)?;
    let g = graphs
        .get(a.index)
        .ok_or_else(|| Error::Input(format!("index {} out of range for {} graphs", a.index, graphs.len())))?;
    let before_cfg = OrderingConfig { family: a.before, ..cfg.ordering() };
    let before = g.bandwidth_of_ordering(&ordering::order(g, &before_cfg)?)?;
    let cm = ordering::order(g, &OrderingConfig { family: OrderingFamily::Cm, ..cfg.ordering() })?;
    let after = g.bandwidth_of_ordering(&cm)?;
    println!("bandwidth: {before} -> {after}");
    if let Some(path) = &a.pgm {
        fs::write(path, adjacency_pgm(&g.apply_ordering(&cm)?, &cfg.hash()))?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct CorrelationReport {
    spearman_r: f64,
    runs: usize,
    datasets: Vec<String>,
    config_hash: String,
}

/// Savings and likelihood-gain columns of a runs table.
pub fn parse_runs(text: &str) -> Result<(Vec<String>, Vec<f64>, Vec<f64>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or_else(|| Error::Format("runs table is empty".into()))?;
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    let find = |names: &[&str]| {
        cols.iter()
            .position(|c| names.contains(c))
            .ok_or_else(|| Error::Format(format!("runs table needs a `{}` column", names[0])))
    };
    let s = find(&["savings", "savings_mean"])?;
    let d = find(&["delta_ll"])?;
    let name = cols.iter().position(|&c| c == "dataset");
    let (mut names, mut savings, mut delta) = (Vec::new(), Vec::new(), Vec::new());
    for (i, line) in lines {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Line { line: i + 1, detail: format!("expected {} fields, got {}", cols.len(), fields.len()) });
        }
        let num = |j: usize| {
            fields[j].parse::<f64>().map_err(|_| Error::Line { line: i + 1, detail: format!("`{}` is not a number", fields[j]) })
        };
        savings.push(num(s)?);
        delta.push(num(d)?);
        names.push(name.map(|j| fields[j].to_string()).unwrap_or_else(|| format!("run{}", names.len())));
    }
    Ok((names, savings, delta))
}

pub fn cmd_correlate(a: &CorrelateArgs, file: Option<&Path>) -> Result<()> {
    let cfg = resolve(&RunConfig::default(), Vec::new(), file)?;
    let (datasets, savings, delta) = parse_runs(&fs::read_to_string(&a.input)?)?;
    let r = spearman_r(&savings, &delta)?;
    println!("spearman_r: {r:.6} (runs: {})", savings.len());
    if let Some(path) = &a.out {
        let report = CorrelationReport { spearman_r: r, runs: savings.len(), datasets, config_hash: cfg.hash() };
        write_json(path, &report)?;
    }
    Ok(())
}

//! End-to-end acceptance checks. Prints one `[PASS]`/`[FAIL]` line per
//! criterion and exits non-zero if any fails.
//!
//! Set `BANDGEN_ZINC_JSONL` to a JSON-lines file of molecular graphs to also
//! check the molecular bandwidth figures.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bandgen_core::datasets::{self, bandwidth_report, erdos_renyi, gen_grids, load_jsonl};
use bandgen_core::metrics::{
    average_precision, extract_stats, f1_pr, laplacian_spectrum, mmd_suite, orbit_counts4, spearman_r, StatsConfig,
    KernelConfig, ORBITS,
};
use bandgen_core::model::{
    estimate_row_width_with, fit_sequence, gradient_check, reconstruction_auprc, sample, train, Batch, Mode,
    ModelConfig, ModelParams,
};
use bandgen_core::ordering::{self, exact_bandwidth, exact_bandwidth_within, OrderingConfig};
use bandgen_core::rng::derive_seed;
use bandgen_core::{savings_factor, Graph, OrderingFamily, TieBreak};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn ordered_bandwidth(g: &Graph, family: OrderingFamily, seed: u64) -> usize {
    let o = ordering::order(g, &OrderingConfig::new(family, seed)).unwrap();
    g.bandwidth_of_ordering(&o).unwrap()
}

fn median(v: &mut [usize]) -> f64 {
    v.sort_unstable();
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m] as f64
    } else {
        (v[m - 1] + v[m]) as f64 / 2.0
    }
}

fn exact_oracle() -> Outcome {
    let start = Instant::now();
    let (mut hits, mut violations) = (0, 0);
    for i in 0..200u64 {
        let seed = derive_seed(11, i);
        let n = 2 + (seed % 7) as usize;
        let p = 0.2 + 0.6 * ((seed >> 8) % 1000) as f64 / 1000.0;
        let g = erdos_renyi(n, p, seed);
        let exact = exact_bandwidth(&g).unwrap();
        for family in [OrderingFamily::Cm, OrderingFamily::Bfs, OrderingFamily::Dfs] {
            if ordered_bandwidth(&g, family, seed) < exact {
                violations += 1;
            }
        }
        if ordered_bandwidth(&g, OrderingFamily::Cm, seed) == exact {
            hits += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("C-M optimal on {hits}/200, {violations} heuristic values below optimum, {secs:.1}s");
    check(violations == 0 && hits >= 120 && secs < 120.0, msg.clone(), msg)
}

fn known_bandwidths() -> Outcome {
    let mut bad = Vec::new();
    for n in 2..=10 {
        if exact_bandwidth(&Graph::path(n)).unwrap() != 1 || ordered_bandwidth(&Graph::path(n), OrderingFamily::Cm, 0) != 1 {
            bad.push(format!("P{n}"));
        }
        if exact_bandwidth(&Graph::complete(n)).unwrap() != n - 1 {
            bad.push(format!("K{n}"));
        }
    }
    for n in 4..=8 {
        if exact_bandwidth(&Graph::cycle(n)).unwrap() != 2 {
            bad.push(format!("C{n}"));
        }
    }
    let grid = Graph::grid(3, 4);
    let det = OrderingConfig { tie_break: TieBreak::DegreeThenIndex, ..OrderingConfig::default() };
    let cm = grid.bandwidth_of_ordering(&ordering::order(&grid, &det).unwrap()).unwrap();
    if exact_bandwidth_within(&grid, 12).unwrap() != 3 || cm != 3 {
        bad.push("3x4 grid".into());
    }
    check(bad.is_empty(), "paths, cycles, cliques and the 3x4 grid match".into(), format!("mismatch on {bad:?}"))
}

fn cm_dominance() -> Outcome {
    let mut corpus = datasets::gen_community2(100, 5);
    corpus.extend(datasets::gen_grid2d());
    corpus.extend(datasets::gen_planar(100, 6).unwrap());
    let (mut cm, mut bfs) = (Vec::new(), Vec::new());
    for (i, g) in corpus.iter().enumerate() {
        let seed = derive_seed(21, i as u64);
        cm.push(ordered_bandwidth(g, OrderingFamily::Cm, seed));
        bfs.push(ordered_bandwidth(g, OrderingFamily::Bfs, seed));
    }
    let wins = cm.iter().zip(&bfs).filter(|(c, b)| c <= b).count();
    let share = wins as f64 / corpus.len() as f64;
    let (mc, mb) = (median(&mut cm), median(&mut bfs));
    let msg = format!("{} graphs, median C-M {mc} vs BFS {mb}, C-M <= BFS on {:.1}%", corpus.len(), 100.0 * share);
    check(mc <= mb && share >= 0.9, msg.clone(), msg)
}

fn savings_closed_form() -> Outcome {
    for n in 2..=50usize {
        for phi in 1..n {
            let mut band = 0usize;
            for i in 0..n {
                for j in i + 1..n {
                    if j - i <= phi {
                        band += 1;
                    }
                }
            }
            let expect = (n * (n - 1) / 2) as f64 / band as f64;
            if savings_factor(n, phi) != expect {
                return Err(format!("savings_factor({n}, {phi}) = {} but enumeration gives {expect}", savings_factor(n, phi)));
            }
        }
    }
    let Some(path) = std::env::var_os("BANDGEN_ZINC_JSONL") else {
        return Ok("closed form exact for n <= 50; molecular check skipped (BANDGEN_ZINC_JSONL unset)".into());
    };
    let graphs = load_jsonl(Path::new(&path)).map_err(|e| e.to_string())?;
    let r = bandwidth_report("zinc", &graphs, &OrderingConfig::default());
    let at_most_4 = r.fraction_at_most(4);
    let msg = format!(
        "closed form exact; molecules n {:.1}, bandwidth {:.2}, savings {:.2}, {:.1}% with bandwidth <= 4",
        r.n.mean,
        r.bandwidth.mean,
        r.savings.mean,
        100.0 * at_most_4
    );
    let within = (r.n.mean - 23.2).abs() <= 4.5
        && (r.bandwidth.mean - 3.3).abs() <= 0.8
        && (r.savings.mean - 3.9).abs() <= 1.0
        && at_most_4 >= 0.93;
    check(within, msg.clone(), msg)
}

fn gradients() -> Outcome {
    let start = Instant::now();
    // a triangle with a pendant node
    let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
    let seq = fit_sequence(&g, &Mode::Bwr.ordering(0), 2).map_err(|e| e.to_string())?;
    let batch = Batch::new(&[&seq, &seq]).map_err(|e| e.to_string())?;
    let params = ModelParams::init(3, 5, 4, 2, 17);
    let checks = gradient_check(&params, &batch.inputs, &batch.targets, &batch.lengths, 1e-5).map_err(|e| e.to_string())?;
    let worst = checks.iter().max_by(|a, b| a.rel_error.total_cmp(&b.rel_error)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("{} tensors, worst relative error {:.2e} on {}, {secs:.2}s", checks.len(), worst.rel_error, worst.name);
    check(worst.rel_error < 1e-4 && secs < 60.0, msg.clone(), msg)
}

/// The learning comparison: BwR and baseline models on small grids.
struct Desk {
    bwr_auprc: Vec<f64>,
    base_auprc: Vec<f64>,
    bwr_width: usize,
    base_width: usize,
    entries_ratio: f64,
    with_indicator_ratio: f64,
    first_bwr: (ModelParams, ModelConfig),
    elapsed: Duration,
}

fn desk_config(mode: Mode, seed: u64) -> ModelConfig {
    ModelConfig { mode, seed, epochs: 50, ..ModelConfig::desk() }
}

fn desk_run() -> Desk {
    let start = Instant::now();
    let grids = gen_grids(3, 6);
    let corpus = datasets::replicate(&grids, 5);
    let (mut bwr_auprc, mut base_auprc) = (Vec::new(), Vec::new());
    let mut first_bwr = None;
    for rep in 0..5u64 {
        let seed = derive_seed(31, rep);
        let (tr, va, te) = datasets::split(corpus.clone(), [0.6, 0.2, 0.2], seed).unwrap();
        for mode in [Mode::Bwr, Mode::Baseline] {
            let ord = mode.ordering(seed);
            let mut cfg = desk_config(mode, seed);
            cfg.row_width = Some(estimate_row_width_with(&tr, mode, &ord, 20_000).unwrap());
            let (params, _) = train(ModelParams::for_config(&cfg).unwrap(), &cfg, &tr, &va, &ord).unwrap();
            let auprc = reconstruction_auprc(&params, &te, &ord.with_seed(derive_seed(seed, 99))).unwrap();
            match mode {
                Mode::Bwr => bwr_auprc.push(auprc),
                Mode::Baseline => base_auprc.push(auprc),
            }
            if mode == Mode::Bwr && first_bwr.is_none() {
                first_bwr = Some((params, cfg));
            }
        }
    }
    // row widths sized on the whole mini-grid corpus; each graph predicts
    // (n + 1) rows of d - 1 edge entries plus the stop indicator
    let bwr_width = estimate_row_width_with(&grids, Mode::Bwr, &Mode::Bwr.ordering(0), 0).unwrap();
    let base_width =
        estimate_row_width_with(&grids, Mode::Baseline, &Mode::Baseline.ordering(0), 100_000).unwrap();
    let entries = |cols: usize| grids.iter().map(|g| ((g.n() + 1) * cols) as f64).sum::<f64>() / grids.len() as f64;
    Desk {
        bwr_auprc,
        base_auprc,
        bwr_width,
        base_width,
        entries_ratio: entries(base_width - 1) / entries(bwr_width - 1),
        with_indicator_ratio: entries(base_width) / entries(bwr_width),
        first_bwr: first_bwr.unwrap(),
        elapsed: start.elapsed(),
    }
}

fn band_guarantee(desk: &Desk) -> Outcome {
    let (params, cfg) = &desk.first_bwr;
    let d = params.row_width();
    let mut violations = 0;
    let mut total = 0;
    for (temp, seed) in [(1.0, 1), (2.0, 2)] {
        let c = ModelConfig { temperature: temp, max_nodes: 64, ..cfg.clone() };
        for g in sample(params, &c, 500, seed, 4).unwrap() {
            total += 1;
            if g.bandwidth() > d - 1 {
                violations += 1;
            }
        }
    }
    let msg = format!("{total} samples at temperatures 1 and 2, {violations} exceed bandwidth {}", d - 1);
    check(violations == 0, msg.clone(), msg)
}

fn desk_learning(desk: &Desk) -> Outcome {
    let wins = desk.bwr_auprc.iter().zip(&desk.base_auprc).filter(|(b, g)| b >= g).count();
    let pairs: Vec<String> =
        desk.bwr_auprc.iter().zip(&desk.base_auprc).map(|(b, g)| format!("{b:.3}/{g:.3}")).collect();
    let secs = desk.elapsed.as_secs_f64();
    let msg = format!("BwR/baseline test AUPRC {}, BwR wins {wins}/5, {secs:.0}s", pairs.join(" "));
    check(wins >= 4 && secs < 900.0, msg.clone(), msg)
}

fn output_space(desk: &Desk) -> Outcome {
    let msg = format!(
        "edge columns {} (BwR) vs {} (baseline), edge entries per graph ratio {:.2} ({:.2} counting the indicator)",
        desk.bwr_width - 1,
        desk.base_width - 1,
        desk.entries_ratio,
        desk.with_indicator_ratio
    );
    check(desk.entries_ratio >= 2.0, msg.clone(), msg)
}

fn metric_identities() -> Outcome {
    let graphs = datasets::gen_community2(20, 3);
    let stats = extract_stats(&graphs, &StatsConfig::default(), 1).unwrap();
    let mmd = mmd_suite(&stats, &stats, &KernelConfig::default());
    let pr = f1_pr(&stats, &stats, 5).unwrap();
    let labels = [true, false, false, true, false, true, false, false];
    let perfect: Vec<f64> = labels.iter().map(|&l| if l { 0.8 } else { 0.2 }).collect();
    let constant = vec![0.5; labels.len()];
    let prevalence = 3.0 / 8.0;
    let mut spectrum = laplacian_spectrum(&Graph::cycle(4)).unwrap();
    spectrum.sort_by(f64::total_cmp);
    let spectrum_ok = spectrum.iter().zip([0.0, 1.0, 1.0, 2.0]).all(|(a, b)| (a - b).abs() < 1e-8);
    let ok = mmd.mean < 1e-9
        && (pr.precision, pr.recall, pr.f1) == (1.0, 1.0, 1.0)
        && average_precision(&perfect, &labels) == 1.0
        && (average_precision(&constant, &labels) - prevalence).abs() < 1e-12
        && spectrum_ok;
    let msg = format!("self MMD2 {:.1e}, self F1 {}, C4 spectrum {spectrum:?}", mmd.mean, pr.f1);
    check(ok, msg.clone(), msg)
}

/// Orbit of `v` inside the connected induced subgraph on `nodes`, read off
/// the subgraph's edge count and the node's degree within it.
fn orbit_of(g: &Graph, nodes: &[usize], v: usize) -> usize {
    let deg = |u: usize| nodes.iter().filter(|&&w| w != u && g.has_edge(u, w)).count();
    let edges = nodes.iter().map(|&u| deg(u)).sum::<usize>() / 2;
    let max_deg = nodes.iter().map(|&u| deg(u)).max().unwrap();
    match (nodes.len(), edges, deg(v)) {
        (2, _, _) => 0,
        (3, 2, 1) => 1,
        (3, 2, _) => 2,
        (3, 3, _) => 3,
        (4, 3, d) if max_deg == 3 => if d == 3 { 7 } else { 6 },
        (4, 3, d) => if d == 1 { 4 } else { 5 },
        (4, 4, _) if max_deg == 2 => 8,
        (4, 4, d) => [9, 10, 11][d - 1],
        (4, 5, d) => if d == 2 { 12 } else { 13 },
        (4, 6, _) => 14,
        other => unreachable!("not a connected graphlet: {other:?}"),
    }
}

fn orbit_oracle() -> Outcome {
    for i in 0..50u64 {
        let seed = derive_seed(41, i);
        let n = 2 + (seed % 6) as usize;
        let g = erdos_renyi(n, 0.5, seed);
        let mut expect = vec![[0u64; ORBITS]; n];
        for mask in 1u32..(1 << n) {
            let nodes: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            if nodes.len() < 2 || nodes.len() > 4 || !g.induced(&nodes).is_connected() {
                continue;
            }
            for &v in &nodes {
                expect[v][orbit_of(&g, &nodes, v)] += 1;
            }
        }
        if orbit_counts4(&g) != expect {
            return Err(format!("graph {i} (n = {n}) disagrees with subset enumeration"));
        }
    }
    Ok("50 random graphs with n <= 7 match subset enumeration exactly".into())
}

fn bandgen(args: &[&str], dir: &Path) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bandgen"))
        .args(args)
        .current_dir(dir)
        .env_remove("BANDGEN_SEED")
        .output()
        .expect("bandgen runs");
    (out.status.success(), String::from_utf8_lossy(&out.stdout).into_owned(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    let graphs = gen_grids(3, 5);
    datasets::save_jsonl(d.join("grids.jsonl"), &graphs).map_err(|e| e.to_string())?;
    std::fs::write(
        d.join("run.toml"),
        "seed = 4\nhidden = 16\nmlp_hidden = 16\ngru_layers = 1\nepochs = 4\nbatches_per_epoch = 3\nbatch_size = 4\n",
    )
    .map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let ckpt = format!("{run}.ckpt.json");
        let eval = format!("{run}.eval.json");
        for args in [
            vec!["--config", "run.toml", "train", "--data", "grids.jsonl", "--out", ckpt.as_str()],
            vec!["--config", "run.toml", "eval", "--ckpt", ckpt.as_str(), "--test", "grids.jsonl", "--out", eval.as_str()],
        ] {
            let (ok, _, err) = bandgen(&args, d);
            if !ok {
                return Err(format!("bandgen {} failed: {err}", args[2]));
            }
        }
        let read = |f: &str| std::fs::read(d.join(f)).map_err(|e| e.to_string());
        outputs.push((read(&ckpt)?, read(&eval)?));
    }
    let same = outputs[0] == outputs[1];
    check(
        same,
        "two train + eval runs gave byte-identical checkpoints and reports".into(),
        "reruns differ".into(),
    )
}

fn correlation_path() -> Outcome {
    let r = spearman_r(&[1.0, 2.0, 2.0, 3.0], &[10.0, 20.0, 30.0, 40.0]).map_err(|e| e.to_string())?;
    let r_hand = 4.5 / (4.5f64 * 5.0).sqrt();
    let r2 = spearman_r(&[5.0, 5.0, 5.0, 1.0, 2.0], &[3.0, 1.0, 2.0, 2.0, 4.0]).map_err(|e| e.to_string())?;
    // ranks (4, 4, 4, 1, 2) and (4, 1, 2.5, 2.5, 5): sxy = -2.5, sxx = 8, syy = 9.5
    let r2_hand = -2.5 / (8.0f64 * 9.5).sqrt();
    if r != r_hand || (r2 - r2_hand).abs() > 1e-15 {
        return Err(format!("tied fixtures give {r} and {r2}, expected {r_hand} and {r2_hand}"));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let table = "dataset\tsavings\tdelta_ll\ncommunity2\t2.1\t0.4\nplanar\t4.8\t1.9\ngrid2d\t8.3\t2.5\n";
    std::fs::write(dir.path().join("runs.tsv"), table).map_err(|e| e.to_string())?;
    let (ok, out, err) = bandgen(&["correlate", "--in", "runs.tsv"], dir.path());
    let emitted = ok && out.starts_with("spearman_r: 1.000000");
    check(emitted, format!("tied fixtures exact; CLI printed `{}`", out.trim()), format!("CLI correlate: {out}{err}"))
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("exact-bandwidth oracle", exact_oracle()),
        ("known bandwidths", known_bandwidths()),
        ("C-M dominance over BFS", cm_dominance()),
        ("savings factor", savings_closed_form()),
        ("gradient check", gradients()),
    ];
    let desk = desk_run();
    results.push(("band guarantee on samples", band_guarantee(&desk)));
    results.push(("desk-scale AUPRC", desk_learning(&desk)));
    results.push(("output-space reduction", output_space(&desk)));
    results.push(("metric identities", metric_identities()));
    results.push(("orbit oracle", orbit_oracle()));
    results.push(("determinism", determinism()));
    results.push(("correlation analysis", correlation_path()));

    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name}: {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

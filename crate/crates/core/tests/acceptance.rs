// SPDX-License-Identifier: Apache-2.0

//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::path::Path;
use std::time::{Duration, Instant};

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::Rng;

use gcnfdr::embed::{embed, EmbeddingConfig, WalkConfig};
use gcnfdr::fault::{exhaustive_fdr, run_campaign, Workload};
use gcnfdr::fixtures;
use gcnfdr::gcn::{backward, forward, masked_mse_loss, GcnModel, TrainingSet};
use gcnfdr::graph::gml::{export_gml, import_gml};
use gcnfdr::graph::{adjacency_matrix, build_graph, normalize_adjacency, CircuitGraph, Node, NodeKind};
use gcnfdr::netlist::verilog;
use gcnfdr::pipeline::{Pipeline, PipelineConfig, REPORT};
use gcnfdr::seed;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, || format!("took {t:.2?}, limit {limit:?}"))
}

fn random_ff_graph(n: usize, density: f64, rng: &mut impl Rng) -> CircuitGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push((i, j));
            }
        }
    }
    CircuitGraph {
        nodes: (0..n)
            .map(|i| Node {
                name: format!("r{i}"),
                kind: NodeKind::FlipFlop,
            })
            .collect(),
        edges,
    }
}

fn uniform(r: usize, c: usize, rng: &mut impl Rng) -> Array2<f64> {
    Array2::from_shape_simple_fn((r, c), || rng.random_range(-1.0..1.0))
}

fn random_model(dims: &[usize], rng: &mut impl Rng) -> GcnModel {
    GcnModel::from_weights(dims.windows(2).map(|d| uniform(d[0], d[1], rng)).collect()).unwrap()
}

/// Dense `D^{-1/2}(A+I)D^{-1/2}` from the edge list.
fn dense_operator(g: &CircuitGraph) -> Array2<f64> {
    let n = g.len();
    let mut a = Array2::<f64>::eye(n);
    for &(u, v) in &g.edges {
        a[[u, v]] = 1.0;
        a[[v, u]] = 1.0;
    }
    let d: Vec<f64> = a.rows().into_iter().map(|r| r.sum()).collect();
    Array2::from_shape_fn((n, n), |(i, j)| a[[i, j]] / (d[i] * d[j]).sqrt())
}

/// Node-by-node aggregation over each closed neighbourhood.
fn per_node_forward(g: &CircuitGraph, x: &Array2<f64>, m: &GcnModel) -> Vec<f64> {
    let n = g.len();
    let mut nbrs: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    for &(u, v) in &g.edges {
        if !nbrs[u].contains(&v) {
            nbrs[u].push(v);
            nbrs[v].push(u);
        }
    }
    let mut h: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    let layers = m.weights.len();
    for (l, w) in m.weights.iter().enumerate() {
        h = (0..n)
            .map(|v| {
                (0..w.ncols())
                    .map(|k| {
                        let mut acc = 0.0;
                        for &u in &nbrs[v] {
                            let norm = ((nbrs[u].len() * nbrs[v].len()) as f64).sqrt();
                            for (j, &hu) in h[u].iter().enumerate() {
                                acc += hu * w[[j, k]] / norm;
                            }
                        }
                        if l + 1 == layers {
                            1.0 / (1.0 + (-acc).exp())
                        } else {
                            acc.tanh()
                        }
                    })
                    .collect()
            })
            .collect();
    }
    h.into_iter().map(|r| r[0]).collect()
}

fn gradient_oracle() -> Outcome {
    let start = Instant::now();
    let h = 1e-5;
    // below this magnitude the central difference is dominated by rounding
    let floor = 1e-6;
    let mut worst: f64 = 0.0;
    let mut rng = seed::rng(20_240_601);
    for _ in 0..10 {
        let n = rng.random_range(2..=10);
        let d = rng.random_range(1..=8);
        let g = random_ff_graph(n, 0.4, &mut rng);
        let s = normalize_adjacency(&adjacency_matrix(&g)).map_err(|e| e.to_string())?;
        let x = uniform(n, d, &mut rng);
        let m = random_model(&[d, 4, 2, 1], &mut rng);
        let k = rng.random_range(1..=n);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        idx.truncate(k);
        let labels = idx.iter().map(|_| rng.random_range(0.0..=1.0)).collect();
        let t = TrainingSet::new(&g, idx, labels).map_err(|e| e.to_string())?;
        let (_, cache) = forward(&s, x.view(), &m).map_err(|e| e.to_string())?;
        let grads = backward(&cache, &t, &s, &m).map_err(|e| e.to_string())?;
        let loss = |mm: &GcnModel| masked_mse_loss(forward(&s, x.view(), mm).unwrap().0.view(), &t);
        for (l, grad) in grads.iter().enumerate() {
            for ((r, c), &an) in grad.indexed_iter() {
                let mut p = m.clone();
                p.weights[l][[r, c]] += h;
                let mut q = m.clone();
                q.weights[l][[r, c]] -= h;
                let fd = (loss(&p) - loss(&q)) / (2.0 * h);
                worst = worst.max((fd - an).abs() / fd.abs().max(an.abs()).max(floor));
            }
        }
    }
    check(worst < 1e-5, || format!("max relative error {worst:e}"))?;
    within_time(start, Duration::from_secs(10))?;
    Ok(format!("max relative error {worst:.2e}, {:.2?}", start.elapsed()))
}

fn propagation_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = seed::rng(7_7_7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(1..=12);
        let d = rng.random_range(1..=8);
        let g = random_ff_graph(n, 0.3, &mut rng);
        let s = normalize_adjacency(&adjacency_matrix(&g)).map_err(|e| e.to_string())?;
        let x = uniform(n, d, &mut rng);
        let m = random_model(&[d, 4, 2, 1], &mut rng);
        let (z, _) = forward(&s, x.view(), &m).map_err(|e| e.to_string())?;
        for (a, b) in z.iter().zip(per_node_forward(&g, &x, &m)) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst < 1e-12, || format!("max abs diff {worst:e}"))?;
    within_time(start, Duration::from_secs(5))?;
    Ok(format!("max abs diff {worst:.2e}, {:.2?}", start.elapsed()))
}

fn graph_of(n: usize, edges: &[(usize, usize)]) -> CircuitGraph {
    CircuitGraph {
        nodes: (0..n)
            .map(|i| Node {
                name: format!("v{i}"),
                kind: NodeKind::Gate,
            })
            .collect(),
        edges: edges.to_vec(),
    }
}

fn normalization_invariants() -> Outcome {
    let op = |g: &CircuitGraph| normalize_adjacency(&adjacency_matrix(g)).unwrap();
    let tri = op(&graph_of(3, &[(0, 1), (1, 2), (2, 0)]));
    for i in 0..3 {
        for j in 0..3 {
            let v = tri.matrix().get(i, j);
            check(v == 1.0 / 3.0, || format!("triangle S[{i}][{j}] = {v}"))?;
        }
    }
    let edge = op(&graph_of(2, &[(0, 1)]));
    for i in 0..2 {
        for j in 0..2 {
            let v = edge.matrix().get(i, j);
            check(v == 0.5, || format!("edge S[{i}][{j}] = {v}"))?;
        }
    }
    let iso = op(&graph_of(3, &[(0, 1)]));
    check(iso.matrix().get(2, 2) == 1.0, || "isolated diagonal".into())?;
    check(
        (0..3).all(|j| j == 2 || iso.matrix().get(2, j) == 0.0),
        || "isolated row".into(),
    )?;

    // regular graphs: cycle, complete, Petersen
    let cycle: Vec<_> = (0..9).map(|i| (i, (i + 1) % 9)).collect();
    let complete: Vec<_> = (0..6).flat_map(|i| (i + 1..6).map(move |j| (i, j))).collect();
    let petersen: Vec<_> = (0..5)
        .flat_map(|i| [(i, (i + 1) % 5), (i, i + 5), (i + 5, (i + 2) % 5 + 5)])
        .collect();
    let mut worst_row: f64 = 0.0;
    for (n, e) in [(9, cycle), (6, complete), (10, petersen)] {
        let s = op(&graph_of(n, &e));
        for i in 0..n {
            let sum: f64 = s.matrix().row(i).map(|(_, v)| v).sum();
            worst_row = worst_row.max((sum - 1.0).abs());
        }
    }
    check(worst_row < 1e-12, || format!("regular row sum error {worst_row:e}"))?;

    let mut rng = seed::rng(3);
    for _ in 0..20 {
        let n = rng.random_range(1..=15);
        let g = random_ff_graph(n, 0.3, &mut rng);
        let s = op(&g);
        let dense = dense_operator(&g);
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (s.matrix().get(i, j), s.matrix().get(j, i));
                check(a.to_bits() == b.to_bits(), || format!("asymmetric at ({i}, {j})"))?;
                check((a - dense[[i, j]]).abs() < 1e-15, || format!("entry ({i}, {j})"))?;
            }
        }
    }
    Ok(format!("closed forms exact, regular row sums within {worst_row:.1e}"))
}

fn fault_injection_oracle() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut worst_margin = f64::INFINITY;
    for (name, src, n_cycles, k, direct, dead) in [
        ("sr4", fixtures::SR4, 64, 32, &["ff3"][..], &[][..]),
        (
            "lfsr_cmp",
            fixtures::LFSR_CMP,
            256,
            128,
            &["gt_q", "par_q"][..],
            &["dbg0", "dbg1", "dbg2", "dbg3"][..],
        ),
    ] {
        let n = verilog::parse(src).map_err(|e| e.to_string())?;
        let w = Workload::random(&n, n_cycles, 1).map_err(|e| e.to_string())?;
        let pairs = n.flipflop_cells().len() * n_cycles;
        check(pairs <= 100_000, || format!("{name}: {pairs} pairs"))?;
        let exact = exhaustive_fdr(&n, &w).map_err(|e| e.to_string())?;
        for ff in direct {
            let v = exact.get(ff).unwrap().fdr;
            check(v == 1.0, || format!("{name}/{ff}: exhaustive {v}, expected 1"))?;
        }
        for ff in dead {
            let v = exact.get(ff).unwrap().fdr;
            check(v == 0.0, || format!("{name}/{ff}: exhaustive {v}, expected 0"))?;
        }
        for s in 1..=5u64 {
            let sampled = run_campaign(&n, &w, k, s).map_err(|e| e.to_string())?;
            for (e, x) in sampled.entries.iter().zip(&exact.entries) {
                let p = x.fdr;
                let tol = 1.96 * (p * (1.0 - p) / e.injections as f64).sqrt() + 0.02;
                let dev = (e.fdr - p).abs();
                worst_margin = worst_margin.min(tol - dev);
                check(dev <= tol, || {
                    format!("{name}/{} seed {s}: sampled {} exhaustive {p} tol {tol}", e.flipflop, e.fdr)
                })?;
                checked += 1;
            }
            for ff in direct {
                check(sampled.get(ff).unwrap().fdr == 1.0, || format!("{name}/{ff} sampled seed {s}"))?;
            }
            for ff in dead {
                check(sampled.get(ff).unwrap().fdr == 0.0, || format!("{name}/{ff} sampled seed {s}"))?;
            }
        }
    }
    within_time(start, Duration::from_secs(60))?;
    Ok(format!(
        "{checked} flip-flop/seed checks, smallest margin {worst_margin:.4}, {:.2?}",
        start.elapsed()
    ))
}

fn gml_round_trip() -> Outcome {
    for (name, src) in [("sr4", fixtures::SR4), ("lfsr_cmp", fixtures::LFSR_CMP)] {
        let g = build_graph(&verilog::parse(src).map_err(|e| e.to_string())?);
        let first = export_gml(&g);
        let back = import_gml(&first).map_err(|e| format!("{name}: {e}"))?;
        let second = export_gml(&back);
        check(first == second, || format!("{name}: re-export differs"))?;
        check(back == g, || format!("{name}: imported graph differs"))?;
    }
    Ok("sr4, lfsr_cmp byte-identical".into())
}

fn write_config(dir: &Path, netlist: &str, extra: &str) -> std::path::PathBuf {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(netlist);
    let path = dir.join("config.json");
    let text = format!(
        r#"{{"netlist": {:?}, "workdir": "out", {extra}}}"#,
        fixture.to_str().unwrap()
    );
    std::fs::write(&path, text).unwrap();
    path
}

const LFSR_EXTRA: &str = r#""campaign": {"n_cycles": 256, "injections_per_ff": 128}, "training": {"count": 10}"#;

fn run_pipeline(dir: &Path, netlist: &str, extra: &str) -> Result<Pipeline, String> {
    let cfg = PipelineConfig::load(&write_config(dir, netlist, extra)).map_err(|e| e.to_string())?;
    let p = Pipeline::new(cfg).map_err(|e| e.to_string())?;
    p.run_all().map_err(|e| e.to_string())?;
    Ok(p)
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn scaled_analogue() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = run_pipeline(dir.path(), "lfsr_cmp.v", LFSR_EXTRA)?;
    let read = |f: &str| std::fs::read_to_string(p.artifact(f)).map_err(|e| format!("{f}: {e}"));

    let n = verilog::parse(fixtures::LFSR_CMP).unwrap();
    check(n.flipflop_cells().len() == 50, || "fixture size".into())?;

    let training = csv_rows(&read("training_set.csv")?);
    check(!training.is_empty() && training.len() <= 10, || format!("{} labeled", training.len()))?;

    let loss: Vec<f64> = csv_rows(&read("loss.csv")?).iter().map(|r| r[1].parse().unwrap()).collect();
    let (initial, last) = (loss[0], *loss.last().unwrap());
    check(last < 0.1 * initial, || format!("loss {last} vs initial {initial}"))?;

    let preds = csv_rows(&read("predictions.csv")?);
    let mut worst: f64 = 0.0;
    for r in &training {
        let pred: f64 = preds.iter().find(|p| p[0] == r[0]).ok_or("missing prediction")?[3]
            .parse()
            .unwrap();
        let label: f64 = r[2].parse().unwrap();
        worst = worst.max((pred - label).abs());
    }
    check(worst <= 0.15, || format!("trained flip-flop error {worst}"))?;

    let report = read(REPORT)?;
    for section in ["[ci]", "[histogram]", "[sorted_predicted]", "[sorted_simulated]"] {
        check(report.contains(section), || format!("report lacks {section}"))?;
    }
    let ci_rows = report.lines().filter(|l| l.starts_with("predicted,") || l.starts_with("simulated,")).count();
    check(ci_rows == 2, || "CI rows".into())?;
    for f in ["ci.dat", "hist_pred.dat", "hist_sim.dat", "sorted.dat"] {
        read(f)?;
    }
    within_time(start, Duration::from_secs(300))?;
    Ok(format!(
        "{} labeled, loss {initial:.3e} -> {last:.3e}, max trained error {worst:.4}, {:.2?}",
        training.len(),
        start.elapsed()
    ))
}

fn end_to_end_determinism() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let pa = run_pipeline(a.path(), "lfsr_cmp.v", LFSR_EXTRA)?;
    let pb = run_pipeline(b.path(), "lfsr_cmp.v", LFSR_EXTRA)?;
    let files = [
        "predictions.csv",
        "report.csv",
        "ci.dat",
        "hist_pred.dat",
        "hist_sim.dat",
        "sorted.dat",
    ];
    for f in files {
        let x = std::fs::read(pa.artifact(f)).map_err(|e| e.to_string())?;
        let y = std::fs::read(pb.artifact(f)).map_err(|e| e.to_string())?;
        check(x == y, || format!("{f} differs"))?;
    }
    Ok(format!("{} files byte-identical", files.len()))
}

fn permutation_equivariance() -> Outcome {
    let mut rng = seed::rng(88);
    let mut worst: f64 = 0.0;
    for src in [fixtures::SR4, fixtures::LFSR_CMP] {
        let g = build_graph(&verilog::parse(src).unwrap());
        let x = embed(&g, &WalkConfig::default(), &EmbeddingConfig::default())
            .map_err(|e| e.to_string())?
            .values()
            .clone();
        let s = normalize_adjacency(&adjacency_matrix(&g)).unwrap();
        for _ in 0..5 {
            let m = random_model(&[16, 4, 2, 1], &mut rng);
            let mut perm: Vec<usize> = (0..g.len()).collect();
            perm.shuffle(&mut rng);
            let pg = g.permuted(&perm).map_err(|e| e.to_string())?;
            let mut px = Array2::zeros(x.raw_dim());
            for (i, &pi) in perm.iter().enumerate() {
                px.row_mut(pi).assign(&x.row(i));
            }
            let ps = normalize_adjacency(&adjacency_matrix(&pg)).unwrap();
            let z: Array1<f64> = forward(&s, x.view(), &m).unwrap().0;
            let pz = forward(&ps, px.view(), &m).unwrap().0;
            for (i, &pi) in perm.iter().enumerate() {
                worst = worst.max((z[i] - pz[pi]).abs());
            }
        }
    }
    check(worst <= 1e-12, || format!("max diff {worst:e}"))?;
    Ok(format!("max diff {worst:.1e} over 10 relabelings"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("gradient oracle", gradient_oracle),
        ("propagation-rule equivalence", propagation_equivalence),
        ("normalization invariants", normalization_invariants),
        ("fault-injection oracle", fault_injection_oracle),
        ("GML round-trip", gml_round_trip),
        ("scaled-down analogue", scaled_analogue),
        ("end-to-end determinism", end_to_end_determinism),
        ("permutation equivariance", permutation_equivariance),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

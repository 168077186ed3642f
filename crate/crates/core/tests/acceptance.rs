//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::{end_to_end_gradient_error, gru_gradient_error, nml_gradient_error, oracle_walk, random_matrix, random_tree};
use syntrav::ambiguity::{collision_report, enumerate_trees, witness_trees, EnumerationSpec};
use syntrav::corpus::{synthetic_corpus, CorpusSpec};
use syntrav::encoder::SyntacticFeatureSet;
use syntrav::linearizer::{linearize_left, linearize_pair, linearize_right};
use syntrav::nml::nuclear_norm;
use syntrav::numerics::{mean_pairwise_distance, pca_2d, svd, Matrix, Rng};
use syntrav::prosody::{evaluate, train, upsample, TrainConfig, TrainingLog};
use syntrav::treebank::{build_vocabulary, ConstituentTree, LabelVocabulary};
use syntrav::Model;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("took {took:?}, limit {limit:?}"))
}

fn traversal_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = Rng::new(1);
    for k in 0..1000 {
        let t = random_tree(&mut rng, 8, 4);
        let v = build_vocabulary([&t]).unwrap();
        let names = |ids: &[syntrav::treebank::LabelId]| -> Vec<String> {
            ids.iter().map(|&i| v.label(i).unwrap().to_string()).collect()
        };
        let l = linearize_left(&t, &v).map_err(|e| e.to_string())?;
        let r = linearize_right(&t, &v).map_err(|e| e.to_string())?;
        ensure((names(&l.label_ids), l.word_positions) == oracle_walk(&t, false), || format!("left walk differs on tree {k}: {t}"))?;
        ensure((names(&r.label_ids), r.word_positions) == oracle_walk(&t, true), || format!("right walk differs on tree {k}: {t}"))?;
    }
    within(Duration::from_secs(5), start)?;
    Ok(format!("1000 trees in {:?}", start.elapsed()))
}

fn gradient_suite() -> Outcome {
    let start = Instant::now();
    let gru = (0..20).map(gru_gradient_error).fold(0.0, f64::max);
    let nml: Vec<f64> = (0..60).filter_map(nml_gradient_error).take(20).collect();
    let e2e = (0..20).map(|s| end_to_end_gradient_error(1000 + s)).fold(0.0, f64::max);
    let nml_max = nml.iter().copied().fold(0.0, f64::max);
    ensure(nml.len() == 20, || format!("only {} non-degenerate NML instances", nml.len()))?;
    ensure(gru <= 1e-5, || format!("GRU error {gru:e}"))?;
    ensure(nml_max <= 1e-4, || format!("NML error {nml_max:e}"))?;
    ensure(e2e <= 1e-5, || format!("end-to-end error {e2e:e}"))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!("max errors gru {gru:.1e}, nml {nml_max:.1e}, end-to-end {e2e:.1e}"))
}

fn svd_correctness() -> Outcome {
    let mut rng = Rng::new(3);
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let (m, n) = (rng.range_inclusive(1, 30), rng.range_inclusive(1, 30));
        let a = random_matrix(&mut rng, m, n);
        let r = svd(&a).map_err(|e| e.to_string())?;
        let tol = 1e-10 * a.frobenius_norm().max(1.0);
        let rec = r.reconstruct().sub(&a).max_abs();
        let ortho = |q: &Matrix| q.transpose().matmul(q).unwrap().sub(&Matrix::identity(q.cols())).max_abs();
        let err = rec.max(ortho(&r.u)).max(ortho(&r.v));
        ensure(err <= tol, || format!("matrix {k} ({m}x{n}): error {err:e}"))?;
        worst = worst.max(err / tol);
    }
    let diag = nuclear_norm(&Matrix::from_diag(&[3.0, 4.0])).unwrap();
    let ones = nuclear_norm(&Matrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap()).unwrap();
    ensure((diag - 7.0).abs() <= 1e-12, || format!("‖diag(3,4)‖* = {diag}"))?;
    ensure((ones - 2.0).abs() <= 1e-12, || format!("‖[[1,1],[1,1]]‖* = {ones}"))?;
    Ok(format!("1000 matrices, worst error {worst:.2} of tolerance"))
}

fn ambiguity() -> Outcome {
    let start = Instant::now();
    let spec = EnumerationSpec::new(3, &["A", "B"], 3);
    let trees = enumerate_trees(&spec).map_err(|e| e.to_string())?;
    let r = collision_report(&trees, &spec.vocabulary()).map_err(|e| e.to_string())?;
    ensure(r.left_collision_classes >= 1, || format!("{r:?}"))?;
    ensure(r.pair_collision_classes < r.left_collision_classes, || format!("{r:?}"))?;
    let [t1, t2] = witness_trees();
    let v = LabelVocabulary::from_labels(["A", "B", "P"]);
    let (p1, p2) = (linearize_pair(&t1, &v).unwrap(), linearize_pair(&t2, &v).unwrap());
    ensure(p1.left == p2.left && p1 != p2, || "witness pair does not separate".into())?;
    ensure(
        p1.right.word_positions == [3, 2] && p2.right.word_positions == [3, 1],
        || format!("witness right anchors {:?} {:?}", p1.right.word_positions, p2.right.word_positions),
    )?;
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{} trees, left classes {} vs pair classes {}",
        r.tree_count, r.left_collision_classes, r.pair_collision_classes
    ))
}

struct Run {
    model: Model,
    log: TrainingLog,
    took: Duration,
}

fn run_training(corpus: &[ConstituentTree], lambda: f64) -> Result<Run, String> {
    let start = Instant::now();
    let config = TrainConfig { lambda, ..TrainConfig::default() };
    let (model, log) = train(corpus, &config).map_err(|e| e.to_string())?;
    Ok(Run { model, log, took: start.elapsed() })
}

fn nml_effect(with: &Run, without: &Run) -> Outcome {
    let table = |r: &Run| r.model.encoder.embedding.weights.clone();
    let (nw, n0) = (nuclear_norm(&table(with)).unwrap(), nuclear_norm(&table(without)).unwrap());
    let (dw, d0) = (mean_pairwise_distance(&table(with)), mean_pairwise_distance(&table(without)));
    ensure(nw > n0, || format!("nuclear norm {nw} vs {n0}"))?;
    ensure(dw > d0, || format!("mean pairwise distance {dw} vs {d0}"))?;
    let took = with.took + without.took;
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("nuclear norm {nw:.3} vs {n0:.3}, mean distance {dw:.3} vs {d0:.3}"))
}

fn learnability(run: &Run, corpus: &[ConstituentTree]) -> Outcome {
    let m = evaluate(&run.model, corpus).map_err(|e| e.to_string())?;
    let first = run.log.epochs.first().unwrap().task_loss;
    let last = run.log.epochs.last().unwrap().task_loss;
    ensure(m.accuracy >= 0.85, || format!("accuracy {}", m.accuracy))?;
    ensure(m.accuracy >= m.majority_baseline + 0.10, || format!("accuracy {} vs majority {}", m.accuracy, m.majority_baseline))?;
    ensure(last < 0.5 * first, || format!("task loss {first} -> {last}"))?;
    ensure(run.took < Duration::from_secs(300), || format!("took {:?}", run.took))?;
    Ok(format!(
        "accuracy {:.4} (majority {:.4}), task loss {first:.4} -> {last:.2e}",
        m.accuracy, m.majority_baseline
    ))
}

fn loss_composition(run: &Run) -> Outcome {
    let lambda = run.log.lambda;
    ensure(lambda == 0.05, || format!("lambda {lambda}"))?;
    ensure(TrainConfig::default().learning_rate == 1e-3, || "learning rate is not 1e-3".into())?;
    let worst = run
        .log
        .steps
        .iter()
        .map(|s| (s.total_loss - (s.task_loss + lambda * s.nml)).abs())
        .fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("step residual {worst:e}"))?;
    ensure(!run.log.steps.is_empty(), || "no steps logged".into())?;
    Ok(format!("{} steps, worst residual {worst:.1e}", run.log.steps.len()))
}

fn outputs_once(seed: u64) -> Vec<String> {
    let mut rng = Rng::new(seed);
    let spec = CorpusSpec { sentences: 30, ..CorpusSpec::default() };
    let corpus = synthetic_corpus(&spec, &mut rng).unwrap();
    let vocab = build_vocabulary(&corpus).unwrap();
    let mut out: Vec<String> = corpus.iter().map(|t| serde_json::to_string(&linearize_pair(t, &vocab).unwrap()).unwrap()).collect();
    let config = TrainConfig { epochs: 3, seed, ..TrainConfig::default() };
    let (model, log) = train(&corpus, &config).unwrap();
    out.push(model.to_json());
    out.push(serde_json::to_string(&log).unwrap());
    out.push(serde_json::to_string(&pca_2d(&model.encoder.embedding.weights).unwrap()).unwrap());
    for t in &corpus {
        out.push(serde_json::to_string(&model.encode(t).unwrap()).unwrap());
    }
    let fam = EnumerationSpec::new(3, &["A", "B"], 2);
    let trees = enumerate_trees(&fam).unwrap();
    out.push(serde_json::to_string(&collision_report(&trees, &fam.vocabulary()).unwrap()).unwrap());
    out
}

fn determinism() -> Outcome {
    let a = outputs_once(42);
    let b = outputs_once(42);
    let c = outputs_once(43);
    ensure(a == b, || "repeated run differs".into())?;
    ensure(a != c, || "seed has no effect".into())?;
    Ok(format!("{} output records byte-identical across repeats", a.len()))
}

fn upsampling() -> Outcome {
    let mut rng = Rng::new(9);
    for k in 0..500 {
        let w = rng.range_inclusive(1, 12);
        let dim = rng.range_inclusive(1, 16);
        let counts: Vec<usize> = (0..w).map(|_| rng.range_inclusive(1, 8)).collect();
        let per_word: Vec<Vec<f64>> = (0..w).map(|_| (0..dim).map(|_| rng.uniform(-1e6, 1e6)).collect()).collect();
        let f = SyntacticFeatureSet { per_word };
        let out = upsample(&f, &counts).map_err(|e| e.to_string())?;
        ensure(out.rows() == counts.iter().sum::<usize>(), || format!("case {k}: row count"))?;
        let mut row = 0;
        for (i, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                let same = out.row(row).iter().zip(&f.per_word[i]).all(|(a, b)| a.to_bits() == b.to_bits());
                ensure(same, || format!("case {k}: row {row} differs from word {i}"))?;
                row += 1;
            }
        }
    }
    Ok("500 cases bit-identical".into())
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("PASS {n} {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL {n} {name}: {detail}");
        }
    };
    report(1, "traversal oracle", traversal_oracle());
    report(2, "gradient suite", gradient_suite());
    report(3, "svd correctness", svd_correctness());
    report(4, "ambiguity", ambiguity());

    let corpus = synthetic_corpus(&CorpusSpec::default(), &mut Rng::new(42)).expect("synthetic corpus");
    let with = run_training(&corpus, 0.05);
    let without = run_training(&corpus, 0.0);
    match (&with, &without) {
        (Ok(w), Ok(z)) => {
            report(5, "nml effect", nml_effect(w, z));
            report(6, "proxy learnability", learnability(w, &corpus));
            report(7, "loss composition", loss_composition(w));
        }
        _ => {
            let e = with.as_ref().err().or(without.as_ref().err()).cloned().unwrap_or_default();
            for (n, name) in [(5, "nml effect"), (6, "proxy learnability"), (7, "loss composition")] {
                report(n, name, Err(format!("training failed: {e}")));
            }
        }
    }
    report(8, "determinism", determinism());
    report(9, "upsampling", upsampling());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}

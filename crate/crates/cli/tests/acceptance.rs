//! Acceptance suite: runs every criterion and prints one PASS/FAIL line
//! each. Exits nonzero if any criterion fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use hmvi_core::clustering::{cluster, DEFAULT_MAX_ITER};
use hmvi_core::evaluation::synthetic::{generate, Shape};
use hmvi_core::evaluation::{ari, run_experiment_with, ExperimentConfig, ExperimentReport, Method};
use hmvi_core::imputer::Ablation;
use hmvi_core::metric::{complete_distance, object_distance};
use hmvi_core::neighbors::natural_neighbor_search;
use hmvi_core::{Dataset, DissimilarityModel, DistanceMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn metric_oracle() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cases = 60;
    let worst =
        (0..cases).map(|_| oracle::max_deviation(&oracle::Tiny::random(&mut rng, 12, 3, 3))).fold(0.0, f64::max);
    let elapsed = started.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(10),
        format!("{cases} datasets, max deviation {worst:.2e}, {}", secs(elapsed)),
    )
}

fn complete_pair_reduction() -> Outcome {
    let data = generate(Shape::MIXED, 11).dataset;
    let model = DissimilarityModel::fit(&data).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let (i, j) = (rng.gen_range(0..data.n()), rng.gen_range(0..data.n()));
        let plain = complete_distance(data.row(i), data.row(j), &model).expect("rows are complete");
        if object_distance(data.row(i), data.row(j), &model) != plain {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("1000 pairs, {mismatches} inexact"))
}

fn natural_neighbor_fixture() -> Outcome {
    let xs = [0.0f64, 1.0, 3.0, 10.0];
    let m = DistanceMatrix::from_fn(4, |i, j| (xs[i] - xs[j]).abs());
    let state = natural_neighbor_search(&m).unwrap();
    // by round 3 every point is in every other point's 3-NN, so all pairs
    // are mutual
    let expected: Vec<Vec<usize>> = (0..4).map(|i| (0..4).filter(|&j| j != i).collect()).collect();
    let fixture_ok = state.lambda == 3 && state.nan_sets == expected;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut asymmetric = 0;
    for _ in 0..100 {
        let n = rng.gen_range(3..30);
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
        let m =
            DistanceMatrix::from_fn(n, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
        let s = natural_neighbor_search(&m).unwrap();
        let ok = (0..n).all(|i| s.nan_sets[i].iter().all(|&j| s.nan_sets[j].contains(&i)));
        asymmetric += !ok as usize;
    }
    outcome(
        fixture_ok && asymmetric == 0,
        format!("lambda {}, sets {:?}; {asymmetric}/100 random matrices asymmetric", state.lambda, state.nan_sets),
    )
}

fn clustering_optimality() -> Outcome {
    let pts: [(f64, f64); 10] = [
        (0.0, 0.0),
        (0.3, 0.1),
        (0.1, 0.4),
        (-0.2, 0.2),
        (0.2, -0.3),
        (10.0, 10.0),
        (10.4, 9.9),
        (9.8, 10.3),
        (10.1, 10.5),
        (9.7, 9.6),
    ];
    let m = DistanceMatrix::from_fn(10, |i, j| ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt());
    let mut best = f64::INFINITY;
    for a in 0..10 {
        for b in a + 1..10 {
            best = best.min((0..10).map(|i| m.get(i, a).min(m.get(i, b))).sum());
        }
    }
    let mut optimal = 0;
    let mut monotone = true;
    for seed in 0..10 {
        let model = cluster(&m, 2, seed, DEFAULT_MAX_ITER).unwrap();
        optimal += ((model.cost() - best).abs() <= 1e-9 * best.max(1.0)) as usize;
        monotone &= model.cost_trace().windows(2).all(|w| w[1] <= w[0]);
    }
    outcome(optimal >= 9 && monotone, format!("optimal in {optimal}/10 seeds, cost non-increasing: {monotone}"))
}

/// The shared imputation grid behind criteria 5 to 8.
struct Grid {
    report: ExperimentReport,
    elapsed: Duration,
    incomplete: usize,
    modified: usize,
    runs: usize,
}

const RATES: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
const REPEATS: usize = 10;

fn run_grid() -> Grid {
    let fixture = generate(Shape::MIXED, 2024);
    let config = ExperimentConfig {
        dataset_name: "mixed".into(),
        methods: vec![
            Method::Hmvi(Ablation::Full),
            Method::Hmvi(Ablation::NoNaturalNeighbors),
            Method::Hmvi(Ablation::NoPreclustering),
            Method::Mms,
            Method::Knnmi,
        ],
        rates: RATES.to_vec(),
        repeats: REPEATS,
        base_seed: 7,
        ..ExperimentConfig::new(2)
    };
    let incomplete = AtomicUsize::new(0);
    let modified = AtomicUsize::new(0);
    let runs = AtomicUsize::new(0);
    let check = |_: Method, _: f64, corrupted: &Dataset, imputed: &Dataset| {
        runs.fetch_add(1, Ordering::Relaxed);
        if imputed.missing_count() > 0 {
            incomplete.fetch_add(1, Ordering::Relaxed);
        }
        let touched = (0..corrupted.n()).any(|i| {
            (0..corrupted.d()).any(|r| !corrupted.is_missing(i, r) && corrupted.get(i, r) != imputed.get(i, r))
        });
        if touched {
            modified.fetch_add(1, Ordering::Relaxed);
        }
    };
    let started = Instant::now();
    let report = run_experiment_with(&fixture.dataset, &fixture.labels, &config, check).unwrap();
    Grid {
        report,
        elapsed: started.elapsed(),
        incomplete: incomplete.into_inner(),
        modified: modified.into_inner(),
        runs: runs.into_inner(),
    }
}

fn completeness(grid: &Grid) -> Outcome {
    let expected = 5 * RATES.len() * REPEATS;
    let failed = grid.report.cells.iter().filter(|c| c.error.is_some()).count();
    let pass = grid.runs == expected
        && failed == 0
        && grid.incomplete == 0
        && grid.modified == 0
        && grid.elapsed < Duration::from_secs(300);
    outcome(
        pass,
        format!(
            "{}/{expected} runs, {failed} failed, {} incomplete, {} modified observed cells, {}",
            grid.runs,
            grid.incomplete,
            grid.modified,
            secs(grid.elapsed)
        ),
    )
}

fn mrmse(grid: &Grid, method: &str, rate: f64, repeat: usize) -> f64 {
    grid.report.cell(method, rate, repeat).and_then(|c| c.mrmse).unwrap_or(f64::INFINITY)
}

fn mean_mrmse(grid: &Grid, method: &str, rate: f64) -> f64 {
    grid.report.mean_of(method, rate).and_then(|m| m.mrmse).unwrap_or(f64::INFINITY)
}

/// Seeds in which `a` scores at most `b` (strictly less if `strict`).
fn wins(grid: &Grid, a: &str, b: &str, rate: f64, strict: bool) -> usize {
    (0..REPEATS)
        .filter(|&r| {
            let (x, y) = (mrmse(grid, a, rate, r), mrmse(grid, b, rate, r));
            if strict {
                x < y
            } else {
                x <= y
            }
        })
        .count()
}

fn beats_mms(grid: &Grid) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for rate in [0.1, 0.2, 0.3] {
        let (h, m) = (mean_mrmse(grid, "HMVI", rate), mean_mrmse(grid, "MMS", rate));
        let w = wins(grid, "HMVI", "MMS", rate, true);
        pass &= h < m && w >= 8;
        parts.push(format!("{:.0}%: {h:.4} vs {m:.4}, {w}/10", rate * 100.0));
    }
    outcome(pass, parts.join("; "))
}

fn ablation_order(grid: &Grid) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for rate in [0.1, 0.2, 0.3] {
        let (f, h1, h0) =
            (mean_mrmse(grid, "HMVI", rate), mean_mrmse(grid, "HMVI-1", rate), mean_mrmse(grid, "HMVI-0", rate));
        let (w1, w2) = (wins(grid, "HMVI", "HMVI-1", rate, false), wins(grid, "HMVI-1", "HMVI-0", rate, false));
        pass &= f <= h1 && h1 <= h0 && w1 >= 7 && w2 >= 7;
        parts.push(format!("{:.0}%: {f:.4} / {h1:.4} / {h0:.4}, {w1}/10 {w2}/10", rate * 100.0));
    }
    outcome(pass, parts.join("; "))
}

fn downstream_ari(grid: &Grid) -> Outcome {
    let mean_ari = |m: &str| grid.report.mean_of(m, 0.1).and_then(|r| r.ari).unwrap_or(f64::NAN);
    let (h, o) = (mean_ari("HMVI"), mean_ari("ORI"));
    outcome(h >= 0.8 * o, format!("ARI {h:.4} vs ORI {o:.4} (ratio {:.3})", h / o))
}

fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = fs::read_dir(a).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut other: Vec<_> = fs::read_dir(b).map_err(|e| e.to_string())?.map(|e| e.unwrap().file_name()).collect();
    other.sort();
    if names != other {
        return Err(format!("{} and {} list different files", a.display(), b.display()));
    }
    for name in &names {
        if fs::read(a.join(name)).unwrap() != fs::read(b.join(name)).unwrap() {
            return Err(format!("{} differs", a.join(name).display()));
        }
    }
    Ok(names.len())
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cwd = dir.path();
    let run = |args: &[&str]| -> Result<(), String> {
        let out =
            Command::new(env!("CARGO_BIN_EXE_hmvi")).args(args).current_dir(cwd).output().map_err(|e| e.to_string())?;
        if out.status.success() {
            Ok(())
        } else {
            Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr).trim()))
        }
    };
    let table = ["--schema", "gen/data.schema", "--labels", "class"];
    let runs: Vec<(&str, Vec<&str>)> = vec![
        ("gen", vec!["generate", "--shape", "mixed"]),
        ("inj", [&["inject", "--input", "gen/data.csv", "--rate", "0.2"][..], &table[..]].concat()),
        (
            "hmvi",
            [&["impute", "--input", "inj/corrupted.csv", "--method", "hmvi", "--k", "2"][..], &table[..]].concat(),
        ),
        (
            "hmvi1",
            [&["impute", "--input", "inj/corrupted.csv", "--ablation", "no_preclustering"][..], &table[..]].concat(),
        ),
        ("mms", [&["impute", "--input", "inj/corrupted.csv", "--method", "mms"][..], &table[..]].concat()),
        ("knnmi", [&["impute", "--input", "inj/corrupted.csv", "--method", "knnmi"][..], &table[..]].concat()),
        ("insp", [&["inspect", "--input", "inj/corrupted.csv"][..], &table[..]].concat()),
        (
            "eval",
            [
                &[
                    "evaluate",
                    "--input",
                    "gen/data.csv",
                    "--methods",
                    "hmvi,mms,knnmi",
                    "--rates",
                    "0.1,0.3",
                    "--repeats",
                    "2",
                ][..],
                &table[..],
            ]
            .concat(),
        ),
    ];
    let mut files = 0;
    for (out, args) in &runs {
        // no seed given: each run draws one and must record it
        let mut first = args.clone();
        first.extend(["--output", out]);
        let again = format!("{out}.replay");
        let manifest = format!("{out}/manifest.json");
        let checked = run(&first)
            .and_then(|()| run(&["replay", &manifest, "--output", &again]))
            .and_then(|()| same_tree(&cwd.join(out), &cwd.join(&again)));
        match checked {
            Ok(n) => files += n,
            Err(e) => return outcome(false, e),
        }
    }
    outcome(true, format!("{} runs replayed, {files} files identical", runs.len()))
}

/// Adjusted Rand index by direct enumeration of object pairs.
fn pair_counting_ari(a: &[usize], b: &[usize]) -> f64 {
    let n = a.len();
    let (mut both, mut in_a, mut in_b) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let (sa, sb) = (a[i] == a[j], b[i] == b[j]);
            both += (sa && sb) as u8 as f64;
            in_a += sa as u8 as f64;
            in_b += sb as u8 as f64;
        }
    }
    let pairs = (n * (n - 1) / 2) as f64;
    let expected = in_a * in_b / pairs;
    let max = (in_a + in_b) / 2.0;
    if max == expected {
        1.0
    } else {
        (both - expected) / (max - expected)
    }
}

fn ari_fixture() -> Outcome {
    let crossed = ari(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
    let same = ari(&[0, 0, 1, 2, 2], &[5, 5, 3, 1, 1]).unwrap();
    let oracle_crossed = pair_counting_ari(&[0, 0, 1, 1], &[0, 1, 0, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..25);
        let a: Vec<usize> = (0..n).map(|_| rng.gen_range(0..4)).collect();
        let b: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        worst = worst.max((ari(&a, &b).unwrap() - pair_counting_ari(&a, &b)).abs());
    }
    outcome(
        (crossed + 0.5).abs() <= 1e-12 && (oracle_crossed + 0.5).abs() <= 1e-12 && same == 1.0 && worst <= 1e-12,
        format!("crossed {crossed}, identical {same}, pair-counting oracle max deviation {worst:.1e}"),
    )
}

fn main() {
    let grid = run_grid();
    let criteria: Vec<(&str, Check)> = vec![
        ("metric oracle equivalence", Box::new(metric_oracle)),
        ("complete pairs need no rescaling", Box::new(complete_pair_reduction)),
        ("natural-neighbor fixture and symmetry", Box::new(natural_neighbor_fixture)),
        ("clustering optimality on two blobs", Box::new(clustering_optimality)),
        ("end-to-end completeness", Box::new(|| completeness(&grid))),
        ("HMVI beats MMS at 10-30%", Box::new(|| beats_mms(&grid))),
        ("ablation ordering HMVI <= HMVI-1 <= HMVI-0", Box::new(|| ablation_order(&grid))),
        ("downstream ARI at 10% missing", Box::new(|| downstream_ari(&grid))),
        ("CLI reruns from manifests", Box::new(cli_determinism)),
        ("ARI fixture", Box::new(ari_fixture)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        failed += !result.pass as usize;
        println!("{} {:>2} {name}: {}", if result.pass { "PASS" } else { "FAIL" }, i + 1, result.detail);
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

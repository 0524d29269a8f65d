//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the process fails if any criterion deviates from its expected
//! outcome.

use std::collections::{HashMap, HashSet};
use std::hash::{BuildHasherDefault, Hasher};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relugeo::erm::FitReport;
use relugeo::{
    cone, erm, geometry, jacobian, weight_map, Activation, ConeMembership, FitConfig, GridAnalysis,
    IndexSet, JacobianMode, NetworkSpec, ResponseMatrix, SampleMatrix, Weights,
};
use relugeo_cli::commands::{Command, FitArgs, ReplicateCommand};
use serde_json::Value;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

/// Criteria whose expectation is wrong. They still run unchanged and print
/// FAIL, but do not fail the suite; a pass here is reported as unexpected.
const KNOWN_FAILURES: &[(&str, &str)] = &[(
    "4 image dimension",
    "per-neuron rescaling leaves (p + q) d + q = 8 directions, not (p + q + 1) d + q = 10",
)];

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, format!("took {took:.2?}, limit {limit:?}"))
}

fn run_cli(cmd: Command) -> Value {
    relugeo_cli::run(&cmd).expect("command succeeds").0.results
}

fn nonclosed_sequence() -> Check {
    let start = Instant::now();
    let results = run_cli(Command::Replicate(ReplicateCommand::Nonclosed {
        k: vec![1.0, 10.0, 100.0, 1000.0, 1e6],
        dump: None,
        skip_fit: true,
        restarts: 1,
        max_iters: 1,
        seed: 0,
    }));
    within(Duration::from_secs(1), start)?;
    let rows = results["sequence"].as_array().ok_or("no sequence")?;
    ensure(rows.len() == 5, "expected five points")?;
    let mut worst: f64 = 0.0;
    let mut last_norm = f64::NEG_INFINITY;
    for row in rows {
        let k = row["k"].as_f64().unwrap();
        let dist = row["distance"].as_f64().unwrap();
        let norm = row["norm"].as_f64().unwrap();
        let rel = (dist - 5f64.sqrt() / k).abs() / (5f64.sqrt() / k);
        worst = worst.max(rel);
        ensure(norm > last_norm, format!("norm not increasing at k = {k}"))?;
        last_norm = norm;
    }
    ensure(worst <= 1e-9, format!("relative error {worst:e}"))?;
    Ok(format!(
        "max relative error {worst:.1e}, {:.2?}",
        start.elapsed()
    ))
}

fn erm_diagnosis() -> Check {
    let start = Instant::now();
    let results = run_cli(Command::Fit(FitArgs {
        sample: "paper_s".into(),
        response: "paper_t".into(),
        widths: vec![2, 2, 2],
        activation: Activation::Relu,
        config: None,
        restarts: Some(20),
        seed: Some(0),
        max_iters: Some(50_000),
    }));
    within(Duration::from_secs(60), start)?;
    let report: FitReport =
        serde_json::from_value(results["report"].clone()).map_err(|e| e.to_string())?;
    ensure(
        report.best_loss <= 1e-4,
        format!("loss {:e}", report.best_loss),
    )?;
    ensure(
        report.best_norm >= 1e3,
        format!("norm {:e}", report.best_norm),
    )?;
    ensure(
        report.classification == relugeo::AttainmentClass::SuspectedNonAttained,
        format!("classified {}", report.classification),
    )?;
    Ok(format!(
        "loss {:.2e}, norm {:.2e}, {}, {:.2?}",
        report.best_loss,
        report.best_norm,
        report.classification,
        start.elapsed()
    ))
}

// Grid oracle for the four-point sample s = 0, 1, 2, 3. With a, b, c, lambda
// on the 0.05 grid, every network output is an integer multiple of 0.0025,
// so the search runs exactly in integer units of 0.0025.

const UNIT_PER_ONE: i64 = 400;
const GRID_MAX: i64 = 100;
/// Largest residual, in units, that is still below 1e-2.
const NEAR: i64 = 3;
const CELL: i64 = 64;
const D_OFFSET: i64 = 40_000;

#[derive(Default)]
struct Mix(u64);

impl Hasher for Mix {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, _: &[u8]) {
        unreachable!("only u64 keys")
    }
    fn write_u64(&mut self, x: u64) {
        self.0 = (x ^ (x >> 29)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

/// Every distinct single-neuron output `c * relu(a s + b)`, indexed by the
/// coarse cell of its consecutive differences from the first entry.
struct NeuronOutputs {
    points: Vec<[i64; 4]>,
    cells: HashMap<u64, (usize, usize), BuildHasherDefault<Mix>>,
}

fn diffs(v: &[i64; 4]) -> [i64; 3] {
    [v[1] - v[0], v[2] - v[0], v[3] - v[0]]
}

fn cell_key(c: [i64; 3]) -> u64 {
    ((c[0] as u64) << 42) | ((c[1] as u64) << 21) | c[2] as u64
}

fn cell_of(d: [i64; 3]) -> u64 {
    cell_key(d.map(|x| (x + D_OFFSET) / CELL))
}

impl NeuronOutputs {
    fn build() -> Self {
        let mut hidden = HashSet::new();
        for a in -GRID_MAX..=GRID_MAX {
            for b in -GRID_MAX..=GRID_MAX {
                hidden.insert([0i64, 1, 2, 3].map(|s| (a * s + b).max(0)));
            }
        }
        let mut outputs = HashSet::new();
        for h in &hidden {
            for c in -GRID_MAX..=GRID_MAX {
                outputs.insert(h.map(|x| c * x));
            }
        }
        let mut points: Vec<[i64; 4]> = outputs.into_iter().collect();
        points.sort_by_key(|v| (cell_of(diffs(v)), *v));
        let mut cells = HashMap::default();
        let mut i = 0;
        while i < points.len() {
            let key = cell_of(diffs(&points[i]));
            let mut j = i;
            while j < points.len() && cell_of(diffs(&points[j])) == key {
                j += 1;
            }
            cells.insert(key, (i, j));
            i = j;
        }
        NeuronOutputs { points, cells }
    }

    /// Whether `first + second + lambda` lies within `NEAR` units of the
    /// target in every entry for some second neuron output and grid lambda.
    fn completes(&self, first: &[i64; 4], target: &[i64; 4]) -> bool {
        let dt = diffs(target);
        let df = diffs(first);
        let want: [i64; 3] = std::array::from_fn(|k| dt[k] - df[k]);
        if want.iter().any(|w| w.abs() > D_OFFSET + 2 * NEAR) {
            return false;
        }
        let lo = want.map(|w| (w - 2 * NEAR + D_OFFSET).max(0) / CELL);
        let hi = want.map(|w| (w + 2 * NEAR + D_OFFSET).min(2 * D_OFFSET) / CELL);
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    let Some(&(s, e)) = self.cells.get(&cell_key([x, y, z])) else {
                        continue;
                    };
                    for second in &self.points[s..e] {
                        let d2 = diffs(second);
                        if (0..3).any(|k| (d2[k] - want[k]).abs() > 2 * NEAR) {
                            continue;
                        }
                        let r: [i64; 4] = std::array::from_fn(|i| target[i] - first[i] - second[i]);
                        // lambda = 20 m units must lie within NEAR of every r_i.
                        let low = (r.iter().max().unwrap() - NEAR).max(-20 * GRID_MAX);
                        let high = (r.iter().min().unwrap() + NEAR).min(20 * GRID_MAX);
                        let m = low.div_euclid(20) + i64::from(low.rem_euclid(20) != 0);
                        if 20 * m <= high {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Grid search for a width-`d` network (`d` in 1..=2) within 1e-2 of
    /// the target in max norm.
    fn reaches(&self, target: &[i64; 4], d: usize) -> bool {
        match d {
            1 => self.completes(&[0; 4], target),
            2 => self
                .points
                .iter()
                .any(|first| self.completes(first, target)),
            _ => unimplemented!("grid oracle covers widths 1 and 2"),
        }
    }
}

fn membership_vs_grid() -> Check {
    let start = Instant::now();
    let oracle = NeuronOutputs::build();
    let to_units = |t: &[f64]| -> [i64; 4] { std::array::from_fn(|i| t[i] as i64 * UNIT_PER_ONE) };
    // The oracle must find targets known to be realizable on the grid.
    ensure(
        oracle.reaches(&to_units(&[0.0, 0.0, 1.0, 2.0]), 1),
        "oracle misses relu(s - 1)",
    )?;
    ensure(
        oracle.reaches(&to_units(&[2.0, 1.0, 0.0, 1.0]), 2),
        "oracle misses |s - 2|",
    )?;
    ensure(
        !oracle.reaches(&to_units(&[2.0, 1.0, 0.0, 1.0]), 1),
        "oracle finds |s - 2| at width 1",
    )?;

    let s = SampleMatrix::from_column(&[0.0, 1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    let mut summary = Vec::new();
    for d in [1, 2] {
        let mut members = 0;
        let mut non_members = 0;
        for idx in 0..625usize {
            let t: Vec<f64> = (0..4)
                .map(|i| ((idx / 5usize.pow(i)) % 5) as f64 - 2.0)
                .collect();
            let cert =
                geometry::membership_2layer_q1(&s, &t, d, 1e-6).map_err(|e| e.to_string())?;
            if cert.verdict.is_member() {
                members += 1;
                continue;
            }
            non_members += 1;
            // No grid point within 1e-2 also means none within 1e-3, so
            // every grid-reachable target has been labelled MEMBER.
            ensure(
                !oracle.reaches(&to_units(&t), d),
                format!("d = {d}: NON_MEMBER {t:?} is within 1e-2 of a grid network"),
            )?;
        }
        summary.push(format!(
            "d={d}: {members} member / {non_members} non-member"
        ));
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!("{}, {:.2?}", summary.join(", "), start.elapsed()))
}

fn dimension_counts() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut failures = Vec::new();
    for (p, d, q, n, expected) in [(2, 2, 1, 10, 7), (1, 2, 2, 50, 10)] {
        let spec = NetworkSpec::two_layer(p, d, q, Activation::Relu).map_err(|e| e.to_string())?;
        let mut ranks = Vec::new();
        for seed in 0..20 {
            let s = geometry::generate_monotone_sample(n, p, seed).map_err(|e| e.to_string())?;
            let r = geometry::numerical_image_dim(&spec, &s, 20, seed, 1e-8)
                .map_err(|e| e.to_string())?;
            ranks.push(r.numerical_rank_max);
        }
        let wrong: Vec<usize> = ranks.iter().copied().filter(|&r| r != expected).collect();
        notes.push(format!(
            "({p},{d},{q},{n}) ranks {:?}",
            ranks.iter().collect::<HashSet<_>>()
        ));
        if !wrong.is_empty() {
            failures.push(format!(
                "({p},{d},{q},{n}) expected {expected}, got {wrong:?}"
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..100 {
        let n = rng.random_range(2..=8);
        let p = rng.random_range(1..=3);
        let d = rng.random_range(1..=3);
        let q = rng.random_range(1..=2);
        let rank_cap = rng.random_range(1..=p);
        // Rows drawn from a rank_cap-dimensional subspace, some duplicated.
        let basis: Vec<Vec<f64>> = (0..rank_cap)
            .map(|_| (0..p).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            if i > 0 && rng.random_bool(0.2) {
                rows.push(rows[i - 1].clone());
                continue;
            }
            let coef: Vec<f64> = (0..rank_cap).map(|_| rng.random_range(-2.0..2.0)).collect();
            rows.push(
                (0..p)
                    .map(|j| (0..rank_cap).map(|k| coef[k] * basis[k][j]).sum())
                    .collect(),
            );
        }
        let s = SampleMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let spec = NetworkSpec::two_layer(p, d, q, Activation::Relu).map_err(|e| e.to_string())?;
        let r =
            geometry::numerical_image_dim(&spec, &s, 10, trial, 1e-8).map_err(|e| e.to_string())?;
        let bound = geometry::dim_upper_bound(&s, d, q);
        if r.numerical_rank_max > bound {
            failures.push(format!(
                "random sample {trial}: rank {} > bound {bound}",
                r.numerical_rank_max
            ));
        }
    }
    within(Duration::from_secs(120), start)?;
    if failures.is_empty() {
        Ok(format!(
            "{}, upper bound holds on 100 samples, {:.2?}",
            notes.join(", "),
            start.elapsed()
        ))
    } else {
        Err(failures.join("; "))
    }
}

fn relu_image(s: &SampleMatrix, a: &[f64], b: f64) -> Vec<f64> {
    s.rows()
        .iter()
        .map(|row| (row.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() + b).max(0.0))
        .collect()
}

fn cone_structure() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let n = rng.random_range(1..=8);
        let p = rng.random_range(1..=3);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let s = SampleMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let a: Vec<f64> = (0..p).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x = relu_image(&s, &a, rng.random_range(-2.0..2.0));
        match cone::cone_membership(&s, &x, None).map_err(|e| e.to_string())? {
            ConeMembership::Member { a, b, .. } => {
                let back = relu_image(&s, &a, b);
                let r = back
                    .iter()
                    .zip(&x)
                    .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
                worst = worst.max(r);
            }
            ConeMembership::NonMember => {
                return Err(format!("round trip {trial} reported NON_MEMBER"))
            }
        }
    }
    ensure(worst <= 2e-9, format!("witness residual {worst:e}"))?;

    let s = SampleMatrix::from_column(&[0.0, 1.0, 2.0]).map_err(|e| e.to_string())?;
    let faces: HashSet<u64> = cone::enumerate_faces(&s)
        .map_err(|e| e.to_string())?
        .index_sets()
        .iter()
        .map(|f| f.bits())
        .collect();
    let expected: HashSet<u64> = [
        vec![],
        vec![0],
        vec![0, 1],
        vec![0, 1, 2],
        vec![2],
        vec![1, 2],
    ]
    .into_iter()
    .map(|v| IndexSet::from_indices(v).bits())
    .collect();
    let mut brute = HashSet::new();
    for ai in -20..=20 {
        for bi in -60..=60 {
            let (a, b) = (ai as f64 * 0.25, bi as f64 * 0.125);
            brute.insert(IndexSet::from_indices((0..3).filter(|&i| a * i as f64 + b > 0.0)).bits());
        }
    }
    ensure(faces == expected, format!("faces {faces:?}"))?;
    ensure(brute == expected, format!("sign-pattern oracle {brute:?}"))?;
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "1000 round trips, max residual {worst:.1e}, 6 faces, {:.2?}",
        start.elapsed()
    ))
}

fn tanh_grid() -> Check {
    let start = Instant::now();
    let results = run_cli(Command::Replicate(ReplicateCommand::Tanh {
        center: vec![0.0, 2.0, 1.0],
        epsilon: 0.05,
        grid: 5,
        restarts: None,
        max_iters: None,
        seed: 0,
    }));
    within(Duration::from_secs(300), start)?;
    let grid: GridAnalysis =
        serde_json::from_value(results["grid"].clone()).map_err(|e| e.to_string())?;
    let center: relugeo::ChainAnalysis =
        serde_json::from_value(results["center"].clone()).map_err(|e| e.to_string())?;
    ensure(
        grid.points.len() == 125,
        format!("{} grid points", grid.points.len()),
    )?;
    for p in &grid.points {
        ensure(p.gap <= 1e-3, format!("{:?}: gap {:e}", p.target, p.gap))?;
        ensure(
            p.gap >= -1e-6,
            format!("{:?}: loss below the bound by {:e}", p.target, -p.gap),
        )?;
        ensure(
            p.best_norm >= 1e2,
            format!("{:?}: norm {:e}", p.target, p.best_norm),
        )?;
    }
    ensure(
        (center.best_loss - 0.5).abs() <= 1e-3,
        format!("center loss {}", center.best_loss),
    )?;
    let max_gap = grid
        .points
        .iter()
        .map(|p| p.gap)
        .fold(f64::NEG_INFINITY, f64::max);
    let min_norm = grid
        .points
        .iter()
        .map(|p| p.best_norm)
        .fold(f64::INFINITY, f64::min);
    Ok(format!(
        "125 points, max gap {max_gap:.1e}, min norm {min_norm:.1e}, center {:.6}, {:.2?}",
        center.best_loss,
        start.elapsed()
    ))
}

/// Smallest |pre-activation| over all hidden units and samples.
fn kink_margin(w: &Weights, depth: usize, s: &SampleMatrix) -> f64 {
    let mut margin = f64::INFINITY;
    for row in s.rows() {
        let mut x = nalgebra::DVector::from_vec(row);
        for l in 0..depth {
            let z = w.matrix(l) * &x + w.bias(l);
            if l + 1 < depth {
                margin = z.iter().fold(margin, |m, v| m.min(v.abs()));
                x = z.map(|v| v.max(0.0));
            }
        }
    }
    margin
}

fn gradient_integrity() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for act in [Activation::Relu, Activation::Tanh, Activation::Sigmoid] {
        let mut done = 0;
        while done < 100 {
            let depth = rng.random_range(2..=3);
            let widths: Vec<usize> = (0..=depth).map(|_| rng.random_range(1..=3)).collect();
            let spec = NetworkSpec::new(widths.clone(), act).map_err(|e| e.to_string())?;
            let n = rng.random_range(1..=5);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..widths[0])
                        .map(|_| rng.random_range(-2.0..2.0))
                        .collect()
                })
                .collect();
            let s = SampleMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
            let w = Weights::random(&spec, 1.0, &mut rng);
            if act == Activation::Relu && kink_margin(&w, depth, &s) < 1e-3 {
                continue;
            }
            let ja = jacobian(&spec, &w, &s, JacobianMode::Analytic).map_err(|e| e.to_string())?;
            let jf = jacobian(&spec, &w, &s, JacobianMode::FiniteDifference)
                .map_err(|e| e.to_string())?;
            let rel = (&ja - &jf).norm() / ja.norm().max(1e-12);
            worst = worst.max(rel);
            done += 1;
        }
    }
    ensure(worst <= 1e-5, format!("relative error {worst:e}"))?;
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "300 points, max relative error {worst:.1e}, {:.2?}",
        start.elapsed()
    ))
}

fn q1_consistency() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 50 {
        let n = rng.random_range(3..=6);
        let p = rng.random_range(1..=2);
        let d = rng.random_range(1..=2);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..p).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let t: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let s = SampleMatrix::from_rows(&rows).map_err(|e| e.to_string())?;
        let exact = match geometry::fit_distance_2layer_q1(&s, &t, d) {
            Ok(r) => r,
            Err(relugeo::Error::CapExceeded { .. }) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let spec = NetworkSpec::two_layer(p, d, 1, Activation::Relu).map_err(|e| e.to_string())?;
        let resp = ResponseMatrix::from_column(&t).map_err(|e| e.to_string())?;
        // Single restarts land in the global basin 12% of the time or more
        // on these instances; 32 restarts make a miss unlikely.
        let config = FitConfig {
            restarts: 32,
            seed: done,
            ..FitConfig::default()
        };
        let report = erm::fit(&spec, &s, &resp, &config).map_err(|e| e.to_string())?;
        let gap = (report.best_loss - exact.distance * exact.distance).abs();
        worst = worst.max(gap);
        ensure(
            gap <= 1e-6,
            format!(
                "instance {done}: fit {:e} vs distance^2 {:e}",
                report.best_loss,
                exact.distance.powi(2)
            ),
        )?;
        let cert = geometry::membership_2layer_q1(&s, &exact.nearest, d, 1e-6)
            .map_err(|e| e.to_string())?;
        ensure(
            cert.verdict.is_member(),
            format!("instance {done}: nearest point is {}", cert.verdict),
        )?;
        let realized = weight_map(&spec, &exact.witness, &s).map_err(|e| e.to_string())?;
        let off = realized
            .iter()
            .zip(&exact.nearest)
            .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
        ensure(
            off <= 1e-6,
            format!("instance {done}: witness misses the nearest point by {off:e}"),
        )?;
        done += 1;
    }
    within(Duration::from_secs(300), start)?;
    Ok(format!(
        "50 instances, max |loss - distance^2| {worst:.1e}, {:.2?}",
        start.elapsed()
    ))
}

fn main() {
    // `cargo test` passes harness flags; a filter argument selects criteria.
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let criteria: [Criterion; 8] = [
        ("1 nonclosed sequence", nonclosed_sequence),
        ("2 erm diagnosis", erm_diagnosis),
        ("3 q=1 membership vs grid oracle", membership_vs_grid),
        ("4 image dimension", dimension_counts),
        ("5 cone structure", cone_structure),
        ("6 tanh grid", tanh_grid),
        ("7 jacobian vs finite differences", gradient_integrity),
        ("8 q=1 fit vs exact distance", q1_consistency),
    ];
    let mut unexpected = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or(p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let known = KNOWN_FAILURES.iter().find(|(n, _)| *n == name);
        match (outcome, known) {
            (Ok(detail), None) => println!("criterion {name}: PASS ({detail})"),
            (Ok(detail), Some(_)) => {
                unexpected += 1;
                println!("criterion {name}: PASS ({detail}) [listed as a known failure; update the list]");
            }
            (Err(why), None) => {
                unexpected += 1;
                println!("criterion {name}: FAIL ({why})");
            }
            (Err(why), Some((_, reason))) => {
                println!("criterion {name}: FAIL ({why}) [known: {reason}]")
            }
        }
    }
    if unexpected > 0 {
        println!("{unexpected} acceptance criteria did not match their expected outcome");
        std::process::exit(1);
    }
}

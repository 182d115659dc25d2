//! Acceptance checks. Each criterion prints one `PASS`/`FAIL` line; the test
//! fails if any criterion does.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use urbanlos::citygen::{generate_city_indexed, Environment};
use urbanlos::cli::{self, FitReport, Summary};
use urbanlos::config::RunConfig;
use urbanlos::geometry::{LinkPath, ObstacleSet};
use urbanlos::io;
use urbanlos::oracle;
use urbanlos::pathloss::{fit_ab, fspl, pl_nlos_building, veg_attenuation, VegGeometry, VegetationParams};

const A_TOL: f64 = 1.5;
const B_TOL: f64 = 0.15;
const B_SHIFT_TOL: f64 = 0.02;
const STREETLIGHT_MAX: f64 = 0.03;
const PEAK_RANGE: (f64, f64) = (50.0, 60.0);
const TOP_P_LOS_MIN: f64 = 0.97;
const ORACLE_LINKS: usize = 1000;
const VEG_GOLDEN: f64 = 7.791_875_101_314_23;

/// Reference fits: (A buildings-only, A with trees, B).
fn table(env: Environment) -> (f64, f64, f64) {
    match env {
        Environment::Urban => (43.90, 46.55, 3.38),
        Environment::DenseUrban => (40.83, 43.52, 3.75),
        Environment::HighRise => (38.64, 40.26, 4.26),
    }
}

/// Reference extra loss: (median, tolerance, optional (p95, tolerance)).
fn extra_loss(env: Environment) -> (f64, f64, Option<(f64, f64)>) {
    match env {
        Environment::Urban => (2.74, 0.5, Some((2.99, 0.7))),
        Environment::DenseUrban => (2.71, 0.5, None),
        Environment::HighRise => (1.62, 0.5, None),
    }
}

#[derive(Default)]
struct Ledger {
    lines: Vec<(bool, String)>,
}

impl Ledger {
    fn check(&mut self, pass: bool, name: &str, detail: String) {
        let line = format!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push((pass, line));
    }
}

struct EnvRun {
    fits: FitReport,
    summary: Summary,
    dir_files: BTreeMap<String, Vec<u8>>,
    plos_partitions_ok: bool,
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

fn config(env: Environment, seed: u64) -> RunConfig {
    let mut cfg = RunConfig {
        environment: Some(env),
        ..RunConfig::default()
    };
    cfg.gen.seed = seed;
    cfg
}

fn run_env(env: Environment, seed: u64, out: &Path) -> EnvRun {
    let cfg = config(env, seed);
    let dir = cli::simulate_config(&cfg, out).unwrap();
    cli::fit(&dir).unwrap();
    cli::report(&dir).unwrap();
    let fits: FitReport = serde_json::from_slice(&fs::read(dir.join("fit.json")).unwrap()).unwrap();
    let summary: Summary = serde_json::from_slice(&fs::read(dir.join("summary.json")).unwrap()).unwrap();
    let plos_partitions_ok = cfg.scenarios.iter().all(|s| {
        let curve = io::read_curve_file(&dir.join(cli::curve_file(s))).unwrap();
        curve
            .records
            .iter()
            .all(|r| (r.partition().iter().sum::<f64>() - 1.0).abs() <= 1e-12)
    });
    EnvRun {
        fits,
        summary,
        dir_files: files(&dir),
        plos_partitions_ok,
    }
}

fn fit_of<'a>(run: &'a EnvRun, scenario: &str) -> &'a urbanlos::FitResult {
    &run.fits.fits.iter().find(|f| f.scenario == scenario).unwrap().fit
}

fn golden(ledger: &mut Ledger) {
    let f = fspl(100.0).unwrap();
    let n = pl_nlos_building(100.0).unwrap();
    let p = VegetationParams::default();
    let geom = VegGeometry {
        d1: 100.0,
        d2: 5.0,
        d_t: 2.0,
        r_t: 1.0,
        lambda: p.wavelength(),
    };
    let v = veg_attenuation(&geom, &p).unwrap();
    ledger.check(
        f == 101.4 && n == 130.4 && (v - VEG_GOLDEN).abs() <= 1e-6,
        "golden values",
        format!("fspl(100)={f}, nlos_b(100)={n}, veg={v:.12}"),
    );
}

fn paired_monotonicity(ledger: &mut Ledger) {
    let mut checked = 0usize;
    let mut violations = 0usize;
    let trees_only = ObstacleSet {
        n_trees: usize::MAX,
        n_lights: 0,
    };
    for (i, env) in Environment::ALL.into_iter().enumerate() {
        let cfg = config(env, 7);
        let layout = generate_city_indexed(&cfg.params().unwrap(), &cfg.gen, i as u64).unwrap();
        for link in oracle::random_links(&layout, 3334, 7, i as u64).unwrap() {
            let path = LinkPath::trace(link.abs_xy, link.gu_xy, &layout).unwrap();
            let los = |set| path.classify(link.h_abs, link.h_gu, set).is_los();
            let (b, t, f) = (los(ObstacleSet::BUILDINGS_ONLY), los(trees_only), los(ObstacleSet::ALL));
            if (f && !t) || (t && !b) {
                violations += 1;
            }
            checked += 1;
        }
    }
    ledger.check(
        violations == 0 && checked >= 10_000,
        "property: paired obstacle monotonicity",
        format!("{violations} violations on {checked} links"),
    );
}

fn fit_recovery(ledger: &mut Ledger) {
    let mut worst = 0.0f64;
    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    let mut next = || {
        seed = seed.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..100 {
        let (a, b) = (20.0 + 60.0 * next(), 1.5 + 4.0 * next());
        let samples: Vec<(f64, f64)> = (0..30)
            .map(|_| {
                let d = 10f64.powf(1.0 + 2.5 * next());
                (d, a + 10.0 * b * d.log10())
            })
            .collect();
        let f = fit_ab(&samples).unwrap();
        worst = worst.max((f.a - a).abs()).max((f.b - b).abs());
    }
    ledger.check(
        worst < 1e-9,
        "property: exact fit recovery",
        format!("100 datasets, worst parameter error {worst:.2e}"),
    );
}

#[test]
fn acceptance() {
    let tmp = tempfile::tempdir().unwrap();
    let mut ledger = Ledger::default();
    let mut runs = Vec::new();
    for (i, env) in Environment::ALL.into_iter().enumerate() {
        runs.push((env, run_env(env, 1 + i as u64, tmp.path())));
    }

    for (env, run) in &runs {
        let (a_bo, a_tr, b_ref) = table(*env);
        let bo = fit_of(run, cli::BASE_SCENARIO);
        let tr = fit_of(run, cli::TREE_SCENARIO);
        let pass = (bo.a - a_bo).abs() <= A_TOL
            && (bo.b - b_ref).abs() <= B_TOL
            && (tr.a - a_tr).abs() <= A_TOL
            && (tr.b - bo.b).abs() < B_SHIFT_TOL;
        ledger.check(
            pass,
            &format!("fit table ({env})"),
            format!(
                "buildings-only A={:.2} B={:.3} (want {a_bo}±{A_TOL}, {b_ref}±{B_TOL}); \
                 trees A={:.2} B={:.3} (want {a_tr}±{A_TOL}, |ΔB|<{B_SHIFT_TOL})",
                bo.a, bo.b, tr.a, tr.b
            ),
        );
    }

    for (env, run) in &runs {
        let (median, tol, p95) = extra_loss(*env);
        let got = run.summary.extra_loss_median_db;
        let got95 = run.summary.extra_loss_p95_db;
        let mut pass = (got - median).abs() <= tol;
        let mut detail = format!("median {got:.3} dB (want {median}±{tol})");
        if let Some((want95, tol95)) = p95 {
            pass &= (got95 - want95).abs() <= tol95;
            detail.push_str(&format!(", p95 {got95:.3} dB (want {want95}±{tol95})"));
        }
        ledger.check(pass, &format!("tree extra loss ({env})"), detail);
    }

    let urban = &runs[0].1;
    let delta = urban.summary.streetlight_delta.unwrap();
    ledger.check(
        delta <= STREETLIGHT_MAX,
        "streetlight negligibility (urban)",
        format!("mean |ΔP_LoS| = {delta:.5} (want ≤ {STREETLIGHT_MAX})"),
    );

    for (env, run) in runs.iter().take(2) {
        let peak = run.summary.tree_peak_deg;
        let pass = peak.is_some_and(|p| (PEAK_RANGE.0..=PEAK_RANGE.1).contains(&p));
        ledger.check(
            pass,
            &format!("tree blockage peak ({env})"),
            format!("peak at {peak:?}° (want within {PEAK_RANGE:?})"),
        );
    }

    for (env, run) in &runs {
        let low = run.summary.top_angle_p_los.values().cloned().fold(f64::INFINITY, f64::min);
        ledger.check(
            low >= TOP_P_LOS_MIN,
            &format!("high-elevation limit ({env})"),
            format!("min P_LoS at top angle over scenarios = {low:.4} (want ≥ {TOP_P_LOS_MIN})"),
        );
    }

    for (i, env) in Environment::ALL.into_iter().enumerate() {
        let cfg = config(env, 11 + i as u64);
        let layout = generate_city_indexed(&cfg.params().unwrap(), &cfg.gen, 0).unwrap();
        let links = oracle::random_links(&layout, ORACLE_LINKS, cfg.gen.seed, 0).unwrap();
        let report = oracle::compare(&layout, &links).unwrap();
        ledger.check(
            report.disagreements.is_empty(),
            &format!("oracle equivalence ({env})"),
            format!(
                "{} disagreements on {} links, classes {:?}",
                report.disagreements.len(),
                report.links,
                report.classes
            ),
        );
    }

    golden(&mut ledger);

    ledger.check(
        runs.iter().all(|(_, r)| r.plos_partitions_ok),
        "property: partitions sum to 1",
        "every angle of every scenario within 1e-12".into(),
    );
    paired_monotonicity(&mut ledger);
    fit_recovery(&mut ledger);

    let again = tempfile::tempdir().unwrap();
    let rerun = run_env(Environment::Urban, 1, again.path());
    let same = rerun.dir_files == urban.dir_files;
    ledger.check(
        same,
        "property: seeded byte-identical rerun",
        format!("{} files compared", urban.dir_files.len()),
    );

    let failed: Vec<&String> = ledger.lines.iter().filter(|(p, _)| !p).map(|(_, l)| l).collect();
    println!(
        "{} of {} criteria passed",
        ledger.lines.len() - failed.len(),
        ledger.lines.len()
    );
    assert!(failed.is_empty(), "failing criteria:\n{}", failed.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("\n"));
}

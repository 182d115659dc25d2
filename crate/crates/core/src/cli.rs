//! Command-line pipeline: `generate`, `simulate`, `fit`, `report`,
//! `oracle-check` and `hits`.
//!
//! Every command writes into a run directory named after the configuration
//! hash and records each file's SHA-256 in `manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::citygen::{generate_city_indexed, BuiltUpParams, CityLayout};
use crate::config::RunConfig;
use crate::error::Error;
use crate::geometry::{classify_link, footprint_crossings, Link, LinkClass, ObstructionHit};
use crate::io::{self, FitRow, IoError};
use crate::montecarlo::{
    added_nlos, peak_angle, run_sweep, streetlight_delta, tree_density_sweep, AngleRecord,
    DistanceStats, PLoSCurve,
};
use crate::oracle;
use crate::pathloss::{composite_table, fit_ab_weighted, median_extra_loss, pl_vs_theta, FitResult};
use crate::shapes::Point;

pub const RUN_CONFIG: &str = "run.toml";
pub const MANIFEST: &str = "manifest.json";
pub const FIT_CSV: &str = "fit.csv";
pub const FIT_JSON: &str = "fit.json";
pub const BASE_SCENARIO: &str = "buildings-only";
pub const TREE_SCENARIO: &str = "trees";
pub const FULL_SCENARIO: &str = "full";
/// Bin widths used for the fit sensitivity table, as multiples of the run's.
pub const REBIN_FACTORS: [usize; 3] = [1, 2, 4];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("missing inputs: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Io(_) => 1,
            CliError::Infeasible(_) => 2,
            CliError::Missing(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e.root() {
            Error::Infeasible(_) => CliError::Infeasible(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Fs { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
                CliError::Missing(vec![path])
            }
            IoError::Model(e) => e.into(),
            IoError::Format { .. } => CliError::Validation(e.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "urbanlos", version, about = "Random Manhattan city LoS and path-loss simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one city layout as JSON.
    Generate(GenerateArgs),
    /// Run the elevation sweep and write probability curves.
    Simulate(RunArgs),
    /// Fit A + 10·B·log10(d) to the composite path loss of a run.
    Fit(DirArgs),
    /// Write plot-ready CSVs for a fitted run.
    Report(DirArgs),
    /// Compare the link classifier with the rasterizing oracle.
    OracleCheck(OracleArgs),
    /// Dump the obstacle crossings of one link as JSON.
    Hits(HitsArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Environment preset: urban, dense_urban or high_rise.
    #[arg(long)]
    pub env: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub n_cities: Option<usize>,
    #[arg(long)]
    pub n_gu: Option<usize>,
    #[arg(long)]
    pub n_trees: Option<usize>,
    #[arg(long)]
    pub n_lights: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated scenarios: buildings-only, trees, full, trees-N.
    #[arg(long, value_delimiter = ',')]
    pub scenario: Option<Vec<String>>,
    /// Comma-separated tree counts for the density sweep; `none` disables it.
    #[arg(long, value_delimiter = ',')]
    pub densities: Option<Vec<String>>,
    #[arg(long)]
    pub freq_ghz: Option<f64>,
    #[arg(long)]
    pub bin_width: Option<f64>,
    #[arg(long)]
    pub include_streetlights: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Which city of the seeded family to generate.
    #[arg(long, default_value_t = 0)]
    pub city_index: u64,
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct DirArgs {
    /// Run directory written by `simulate`.
    pub run: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, default_value_t = 1000)]
    pub links: usize,
    #[arg(long, default_value_t = 0)]
    pub city_index: u64,
}

#[derive(Debug, Clone, Args)]
pub struct HitsArgs {
    /// Layout JSON written by `generate`.
    #[arg(long)]
    pub layout: PathBuf,
    /// ABS position as `x,y,h`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub abs: Vec<f64>,
    /// User position as `x,y`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub gu: Vec<f64>,
    #[arg(long, default_value_t = 1.5)]
    pub h_gu: f64,
}

/// Run metadata and per-file SHA-256 digests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub label: String,
    pub config_hash: String,
    pub seed: u64,
    pub params: BuiltUpParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub layout_hash: Option<String>,
    pub config: RunConfig,
    pub files: BTreeMap<String, String>,
}

/// Sensitivity of one fit to the distance-bin width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinSensitivity {
    pub bin_width: f64,
    pub fit: FitResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFit {
    pub scenario: String,
    pub fit: FitResult,
    pub sensitivity: Vec<BinSensitivity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub environment: String,
    pub fits: Vec<ScenarioFit>,
}

/// Scalar results of `report`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub environment: String,
    pub extra_loss_median_db: f64,
    pub extra_loss_p95_db: f64,
    pub tree_peak_deg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub streetlight_delta: Option<f64>,
    pub top_angle_p_los: BTreeMap<String, f64>,
}

pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Generate(a) => generate(&a).map(|p| p.display().to_string()),
        Command::Simulate(a) => simulate(&a).map(|p| p.display().to_string()),
        Command::Fit(a) => fit(&a.run).map(|p| p.display().to_string()),
        Command::Report(a) => report(&a.run).map(|p| p.display().to_string()),
        Command::OracleCheck(a) => oracle_check(&a),
        Command::Hits(a) => hits(&a),
    }
}

/// Loads `--config` (if any) and applies the flag overrides.
pub fn resolve_config(args: &ConfigArgs) -> CliResult<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = io::read_file(path)?;
            let text = String::from_utf8(text)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(env) = &args.env {
        cfg.environment = Some(env.parse()?);
    } else if args.config.is_none() && args.alpha.is_some() && args.beta.is_some() && args.gamma.is_some() {
        cfg.environment = None;
    }
    set(&mut cfg.alpha, args.alpha.map(Some));
    set(&mut cfg.beta, args.beta.map(Some));
    set(&mut cfg.gamma, args.gamma.map(Some));
    set(&mut cfg.sweep.n_cities, args.n_cities);
    set(&mut cfg.gen.n_gu, args.n_gu);
    set(&mut cfg.gen.n_trees, args.n_trees);
    set(&mut cfg.gen.n_lights, args.n_lights);
    set(&mut cfg.gen.seed, args.seed);
    set(&mut cfg.scenarios, args.scenario.clone());
    set(&mut cfg.vegetation.freq_ghz, args.freq_ghz);
    set(&mut cfg.sweep.bin_width, args.bin_width);
    if let Some(d) = &args.densities {
        cfg.densities = parse_densities(d)?;
    }
    if args.include_streetlights {
        cfg.include_streetlights = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_densities(items: &[String]) -> CliResult<Vec<usize>> {
    if items.len() == 1 && items[0].trim() == "none" {
        return Ok(Vec::new());
    }
    items
        .iter()
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("bad tree density `{s}`")))
        })
        .collect()
}

/// True when the seed is given on the command line or in the config file.
fn seed_given(args: &ConfigArgs) -> CliResult<bool> {
    if args.seed.is_some() {
        return Ok(true);
    }
    let Some(path) = &args.config else {
        return Ok(false);
    };
    let text = String::from_utf8_lossy(&io::read_file(path)?).into_owned();
    let value: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(value
        .get("gen")
        .and_then(|g| g.get("seed"))
        .is_some())
}

pub fn run_dir(out: &Path, cfg: &RunConfig) -> PathBuf {
    out.join(format!("{}-{}", cfg.label(), &cfg.hash()[..12]))
}

fn manifest_for(cfg: &RunConfig) -> CliResult<Manifest> {
    Ok(Manifest {
        tool: concat!("urbanlos ", env!("CARGO_PKG_VERSION")).to_string(),
        label: cfg.label(),
        config_hash: cfg.hash(),
        seed: cfg.gen.seed,
        params: cfg.params()?,
        samples: None,
        layout_hash: None,
        config: cfg.clone(),
        files: BTreeMap::new(),
    })
}

/// Collects output files and their digests for one command.
struct Writer<'a> {
    dir: &'a Path,
    files: BTreeMap<String, String>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> CliResult<Self> {
        io::create_dir(dir)?;
        Ok(Writer {
            dir,
            files: BTreeMap::new(),
        })
    }

    fn bytes(&mut self, name: &str, bytes: Vec<u8>) -> CliResult<()> {
        let path = self.dir.join(name);
        self.files.insert(name.to_string(), io::sha256_hex(&bytes));
        std::fs::write(&path, bytes).map_err(|source| {
            CliError::from(IoError::Fs {
                path: path.display().to_string(),
                source,
            })
        })
    }

    fn csv(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> CliResult<()> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        self.bytes(name, buf)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(value).expect("value serializes");
        s.push('\n');
        self.bytes(name, s.into_bytes())
    }

    /// Merges this command's files into the run manifest and rewrites it.
    fn finish(mut self, mut manifest: Manifest) -> CliResult<()> {
        manifest.files.append(&mut self.files);
        let mut s = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        s.push('\n');
        io::write_text_file(&self.dir.join(MANIFEST), &s)?;
        Ok(())
    }
}

pub fn generate(args: &GenerateArgs) -> CliResult<PathBuf> {
    let cfg = resolve_config(&args.config)?;
    let layout = generate_city_indexed(&cfg.params()?, &cfg.gen, args.city_index)?;
    let dir = run_dir(&args.out, &cfg);
    let mut w = Writer::new(&dir)?;
    w.bytes(RUN_CONFIG, cfg.to_toml().into_bytes())?;
    let mut json = layout.to_json();
    json.push('\n');
    let name = format!("layout-{}.json", args.city_index);
    w.bytes(&name, json.into_bytes())?;
    let manifest = load_manifest(&dir).or_else(|_| manifest_for(&cfg))?;
    w.finish(manifest)?;
    Ok(dir.join(name))
}

pub fn curve_file(scenario: &str) -> String {
    format!("plos_{scenario}.csv")
}

pub fn distance_file(scenario: &str) -> String {
    format!("dist_{scenario}.csv")
}

pub fn density_file(n: usize) -> String {
    format!("density_{n}.csv")
}

pub fn delta_file(a: &str, b: &str) -> String {
    format!("delta_{a}_vs_{b}.csv")
}

pub fn simulate(args: &RunArgs) -> CliResult<PathBuf> {
    if !seed_given(&args.config)? {
        return Err(CliError::Validation(
            "simulate needs an explicit seed (--seed or [gen] seed in --config)".into(),
        ));
    }
    let cfg = resolve_config(&args.config)?;
    simulate_config(&cfg, &args.out)
}

/// Runs the sweep for a resolved configuration into its run directory.
pub fn simulate_config(cfg: &RunConfig, out: &Path) -> CliResult<PathBuf> {
    let params = cfg.params()?;
    let sweep = cfg.sweep()?;
    let result = run_sweep(&params, &cfg.gen, &sweep)?;
    let density = if cfg.densities.is_empty() {
        Vec::new()
    } else {
        tree_density_sweep(&params, &cfg.gen, &sweep, &cfg.densities)?
    };

    let dir = run_dir(out, cfg);
    let mut w = Writer::new(&dir)?;
    w.bytes(RUN_CONFIG, cfg.to_toml().into_bytes())?;
    for r in &result.results {
        let name = &r.scenario.name;
        w.csv(&curve_file(name), |b| io::write_curve(b, &r.curve))?;
        w.csv(&distance_file(name), |b| io::write_distance(b, &r.distance))?;
    }
    for pair in result.results.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let delta = curve_delta(&a.curve, &b.curve)?;
        w.csv(&delta_file(&a.scenario.name, &b.scenario.name), |buf| {
            io::write_curve(buf, &delta)
        })?;
    }
    for (n, curve) in &density {
        w.csv(&density_file(*n), |b| io::write_curve(b, curve))?;
    }
    let mut manifest = manifest_for(cfg)?;
    manifest.samples = Some(result.samples);
    manifest.layout_hash = Some(result.layout_hash.clone());
    w.finish(manifest)?;
    Ok(dir)
}

/// Per-angle `b − a`; the count column carries `b`'s sample count.
fn curve_delta(a: &PLoSCurve, b: &PLoSCurve) -> CliResult<PLoSCurve> {
    if a.angles() != b.angles() {
        return Err(CliError::Validation("curves use different angle grids".into()));
    }
    Ok(PLoSCurve {
        records: a
            .records
            .iter()
            .zip(&b.records)
            .map(|(x, y)| AngleRecord {
                theta_deg: x.theta_deg,
                los_count: y.los_count,
                total_count: y.total_count,
                p_los: y.p_los - x.p_los,
                p_nlos_b: y.p_nlos_b - x.p_nlos_b,
                p_nlos_t: y.p_nlos_t - x.p_nlos_t,
                p_nlos_s: y.p_nlos_s - x.p_nlos_s,
            })
            .collect(),
    })
}

fn load_config(dir: &Path) -> CliResult<RunConfig> {
    let bytes = io::read_file(&dir.join(RUN_CONFIG))?;
    Ok(RunConfig::from_toml(&String::from_utf8_lossy(&bytes))?)
}

fn load_manifest(dir: &Path) -> CliResult<Manifest> {
    let bytes = io::read_file(&dir.join(MANIFEST))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Validation(format!("{MANIFEST}: {e}")))
}

fn require(dir: &Path, names: &[String]) -> CliResult<()> {
    let missing: Vec<String> = names
        .iter()
        .map(|n| dir.join(n))
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Missing(missing))
    }
}

fn fit_scenario(cfg: &RunConfig, stats: &DistanceStats) -> CliResult<ScenarioFit> {
    let policy = cfg.veg_policy();
    let table = composite_table(stats, &cfg.vegetation, &policy)?;
    let fit = fit_ab_weighted(&table)?;
    let sensitivity = REBIN_FACTORS
        .iter()
        .map(|&k| {
            let merged = stats.rebin(k)?;
            let table = composite_table(&merged, &cfg.vegetation, &policy)?;
            Ok(BinSensitivity {
                bin_width: merged.bin_width,
                fit: fit_ab_weighted(&table)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok(ScenarioFit {
        scenario: String::new(),
        fit,
        sensitivity,
    })
}

/// Fits every scenario of a run. Writes `fit.csv` and `fit.json`.
pub fn fit(dir: &Path) -> CliResult<PathBuf> {
    require(dir, &[RUN_CONFIG.to_string(), MANIFEST.to_string()])?;
    let cfg = load_config(dir)?;
    let names: Vec<String> = cfg.scenarios.iter().map(|s| distance_file(s)).collect();
    require(dir, &names)?;

    let label = cfg.label();
    let mut fits = Vec::new();
    for (scenario, file) in cfg.scenarios.iter().zip(&names) {
        let stats = io::read_distance_file(&dir.join(file), cfg.sweep.bin_width)?;
        let mut f = fit_scenario(&cfg, &stats)?;
        f.scenario = scenario.clone();
        fits.push(f);
    }
    let rows: Vec<FitRow> = fits
        .iter()
        .map(|f| FitRow::new(&label, &f.scenario, &f.fit))
        .collect();

    let manifest = load_manifest(dir)?;
    let mut w = Writer::new(dir)?;
    w.csv(FIT_CSV, |b| io::write_fits(b, &rows))?;
    w.json(
        FIT_JSON,
        &FitReport {
            environment: label,
            fits,
        },
    )?;
    w.finish(manifest)?;
    Ok(dir.join(FIT_CSV))
}

/// Writes the plot CSVs, `extra_loss.csv` and `summary.json`.
pub fn report(dir: &Path) -> CliResult<PathBuf> {
    require(dir, &[RUN_CONFIG.to_string(), MANIFEST.to_string()])?;
    let cfg = load_config(dir)?;
    let mut needed = vec![FIT_CSV.to_string()];
    for s in [BASE_SCENARIO, TREE_SCENARIO] {
        needed.push(curve_file(s));
        needed.push(distance_file(s));
    }
    needed.extend(cfg.densities.iter().map(|&n| density_file(n)));
    require(dir, &needed)?;

    let read_curve = |s: &str| io::read_curve_file(&dir.join(s));
    let base = read_curve(&curve_file(BASE_SCENARIO))?;
    let trees = read_curve(&curve_file(TREE_SCENARIO))?;
    let w_bin = cfg.sweep.bin_width;
    let base_d = io::read_distance_file(&dir.join(distance_file(BASE_SCENARIO)), w_bin)?;
    let trees_d = io::read_distance_file(&dir.join(distance_file(TREE_SCENARIO)), w_bin)?;
    let policy = cfg.veg_policy();

    let mut by_distance = String::from("scenario,bin_center_m,p_los\n");
    for s in &cfg.scenarios {
        let path = dir.join(distance_file(s));
        if !path.is_file() {
            continue;
        }
        for b in io::read_distance_file(&path, w_bin)?.bins {
            by_distance.push_str(&format!("{s},{},{}\n", b.center(), b.p_los));
        }
    }

    let delta = added_nlos(&base, &trees)?;
    let mut tree_nlos = String::from("theta_deg,delta_p_nlos_t\n");
    for (theta, d) in &delta {
        tree_nlos.push_str(&format!("{theta},{d}\n"));
    }

    let mut density = String::from("theta_deg");
    let mut family = Vec::new();
    for &n in &cfg.densities {
        density.push_str(&format!(",p_los_trees_{n}"));
        family.push(read_curve(&density_file(n))?);
    }
    density.push('\n');
    if let Some(first) = family.first() {
        for (i, r) in first.records.iter().enumerate() {
            density.push_str(&r.theta_deg.to_string());
            for c in &family {
                density.push_str(&format!(",{}", c.records[i].p_los));
            }
            density.push('\n');
        }
    }

    let h = cfg.pl_theta_altitude;
    let pl_base = pl_vs_theta(h, cfg.gen.h_gu, &base, &cfg.vegetation, &policy)?;
    let pl_trees = pl_vs_theta(h, cfg.gen.h_gu, &trees, &cfg.vegetation, &policy)?;
    let mut pl_theta = String::from("theta_deg,distance_m,pl_buildings_only_db,pl_trees_db\n");
    for (a, b) in pl_base.iter().zip(&pl_trees) {
        pl_theta.push_str(&format!("{},{},{},{}\n", a.0, a.1, a.2, b.2));
    }

    let t_base = composite_table(&base_d, &cfg.vegetation, &policy)?;
    let t_trees = composite_table(&trees_d, &cfg.vegetation, &policy)?;
    let extra = median_extra_loss(&t_trees, &t_base)?;
    let extra_csv = format!("median_db,p95_db\n{},{}\n", extra.median, extra.p95);

    let full = dir.join(curve_file(FULL_SCENARIO));
    let streetlight = if full.is_file() {
        Some(streetlight_delta(&trees, &io::read_curve_file(&full)?)?)
    } else {
        None
    };
    let mut top = BTreeMap::new();
    for s in &cfg.scenarios {
        let path = dir.join(curve_file(s));
        if path.is_file() {
            if let Some(r) = io::read_curve_file(&path)?.records.last() {
                top.insert(s.clone(), r.p_los);
            }
        }
    }
    let summary = Summary {
        environment: cfg.label(),
        extra_loss_median_db: extra.median,
        extra_loss_p95_db: extra.p95,
        tree_peak_deg: peak_angle(&delta),
        streetlight_delta: streetlight,
        top_angle_p_los: top,
    };

    let manifest = load_manifest(dir)?;
    let mut w = Writer::new(dir)?;
    w.bytes("plos_vs_distance.csv", by_distance.into_bytes())?;
    w.bytes("tree_nlos_vs_theta.csv", tree_nlos.into_bytes())?;
    w.bytes("density_sweep.csv", density.into_bytes())?;
    w.bytes("pl_vs_theta.csv", pl_theta.into_bytes())?;
    w.bytes("extra_loss.csv", extra_csv.into_bytes())?;
    w.json("summary.json", &summary)?;
    w.finish(manifest)?;
    Ok(dir.to_path_buf())
}

pub fn oracle_check(args: &OracleArgs) -> CliResult<String> {
    let cfg = resolve_config(&args.config)?;
    let layout = generate_city_indexed(&cfg.params()?, &cfg.gen, args.city_index)?;
    let links = oracle::random_links(&layout, args.links, cfg.gen.seed, args.city_index)?;
    let report = oracle::compare(&layout, &links)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if report.disagreements.is_empty() {
        Ok(text)
    } else {
        Err(CliError::Validation(format!(
            "{} of {} links disagree with the oracle\n{text}",
            report.disagreements.len(),
            report.links
        )))
    }
}

#[derive(Debug, Serialize)]
struct HitDump {
    link: Link,
    class: LinkClass,
    hits: Vec<ObstructionHit>,
}

pub fn hits(args: &HitsArgs) -> CliResult<String> {
    if args.abs.len() != 3 || args.gu.len() != 2 {
        return Err(CliError::Validation("--abs takes x,y,h and --gu takes x,y".into()));
    }
    let bytes = io::read_file(&args.layout)?;
    let layout = CityLayout::from_json(&String::from_utf8_lossy(&bytes))?;
    let link = Link::new(
        Point::new(args.abs[0], args.abs[1]),
        args.abs[2],
        Point::new(args.gu[0], args.gu[1]),
        args.h_gu,
    )?;
    let dump = HitDump {
        link,
        class: classify_link(&link, &layout)?,
        hits: footprint_crossings(&link, &layout)?,
    };
    Ok(serde_json::to_string_pretty(&dump).expect("hits serialize"))
}

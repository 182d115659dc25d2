//! Elevation sweeps over many generated cities.
//!
//! Each city gets one ABS on open ground. For every user the ABS keeps its
//! ground position and only its altitude moves with the elevation angle, so
//! one footprint trace per user serves the whole angle grid and every
//! obstacle scenario. Scenarios select prefixes of the city's trees and
//! lights; the layout and users are shared, which makes scenario results
//! paired sample for sample.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::citygen::{generate_city_indexed, BuiltUpParams, GenConfig};
use crate::error::{Error, Result};
use crate::geometry::{LinkClass, LinkPath, ObstacleSet};
use crate::rng::{substream, Stream};

/// Evaluation angle used for a nominal 90° sample.
pub const TOP_ANGLE_EVAL: f64 = 89.9;
/// Upper bound on ABS altitude (m). A 1 km² city at the top angle stays
/// below it, so it only guards against overflow.
pub const MAX_ALTITUDE: f64 = 1.0e6;
pub const DEFAULT_BIN_WIDTH: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AltitudePolicy {
    /// `h_abs = h_gu + g·tan θ` from each user's own ground distance `g`.
    PerAngle,
    /// Constant altitude; each user lands in the angle bucket nearest its
    /// actual elevation.
    Fixed { h_abs: f64 },
}

/// A named obstacle selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub obstacles: ObstacleSet,
}

impl Scenario {
    pub fn buildings_only() -> Self {
        Scenario {
            name: "buildings-only".into(),
            obstacles: ObstacleSet::BUILDINGS_ONLY,
        }
    }

    pub fn trees() -> Self {
        Scenario {
            name: "trees".into(),
            obstacles: ObstacleSet {
                n_trees: usize::MAX,
                n_lights: 0,
            },
        }
    }

    pub fn full() -> Self {
        Scenario {
            name: "full".into(),
            obstacles: ObstacleSet::ALL,
        }
    }

    /// Buildings plus the first `n` trees.
    pub fn tree_density(n: usize) -> Self {
        Scenario {
            name: format!("trees-{n}"),
            obstacles: ObstacleSet {
                n_trees: n,
                n_lights: 0,
            },
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim() {
            "buildings-only" | "buildings" => Ok(Scenario::buildings_only()),
            "trees" | "+trees" => Ok(Scenario::trees()),
            "full" | "+trees+lights" => Ok(Scenario::full()),
            other => match other.strip_prefix("trees-").map(str::parse::<usize>) {
                Some(Ok(n)) => Ok(Scenario::tree_density(n)),
                _ => Err(Error::domain(format!("unknown scenario `{other}`"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub n_cities: usize,
    /// Reported elevation angles in degrees.
    pub angles: Vec<f64>,
    pub altitude: AltitudePolicy,
    pub scenarios: Vec<Scenario>,
    pub bin_width: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            n_cities: 30,
            angles: default_angles(),
            altitude: AltitudePolicy::PerAngle,
            scenarios: vec![Scenario::buildings_only(), Scenario::trees(), Scenario::full()],
            bin_width: DEFAULT_BIN_WIDTH,
        }
    }
}

/// 1°, 2°, …, 90°.
pub fn default_angles() -> Vec<f64> {
    (1..=90).map(f64::from).collect()
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_cities == 0 {
            return Err(Error::domain("n_cities must be >= 1"));
        }
        if self.angles.is_empty() {
            return Err(Error::domain("angle grid is empty"));
        }
        if let Some(a) = self.angles.iter().find(|a| !(0.0..=90.0).contains(*a)) {
            return Err(Error::domain(format!("angle {a} outside [0, 90]")));
        }
        if self.scenarios.is_empty() {
            return Err(Error::domain("no scenarios requested"));
        }
        if !(self.bin_width > 0.0) {
            return Err(Error::domain("bin_width must be > 0"));
        }
        if let AltitudePolicy::Fixed { h_abs } = self.altitude {
            if !(h_abs > 0.0 && h_abs.is_finite()) {
                return Err(Error::domain(format!("fixed ABS altitude {h_abs} must be > 0")));
            }
        }
        Ok(())
    }
}

/// ABS altitude for elevation `theta_deg` over ground distance `g`, with 90°
/// evaluated at [`TOP_ANGLE_EVAL`] and the result capped at [`MAX_ALTITUDE`].
pub fn abs_altitude(theta_deg: f64, g: f64, h_gu: f64) -> f64 {
    let theta = theta_deg.min(TOP_ANGLE_EVAL).to_radians();
    (h_gu + g * theta.tan()).min(MAX_ALTITUDE.max(h_gu))
}

/// Counts per link class: `[los, nlos_b, nlos_t, nlos_s]`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally(pub [u64; 4]);

impl Tally {
    pub fn add(&mut self, class: LinkClass) {
        self.0[class.slot()] += 1;
    }

    pub fn merge(&mut self, other: &Tally) {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// `[p_los, p_nlos_b, p_nlos_t, p_nlos_s]`, all zero for an empty tally.
    pub fn probabilities(&self) -> [f64; 4] {
        let n = self.total() as f64;
        if n == 0.0 {
            return [0.0; 4];
        }
        self.0.map(|c| c as f64 / n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleRecord {
    pub theta_deg: f64,
    pub los_count: u64,
    pub total_count: u64,
    pub p_los: f64,
    pub p_nlos_b: f64,
    pub p_nlos_t: f64,
    pub p_nlos_s: f64,
}

impl AngleRecord {
    fn from_tally(theta_deg: f64, t: &Tally) -> Self {
        let [p_los, p_nlos_b, p_nlos_t, p_nlos_s] = t.probabilities();
        AngleRecord {
            theta_deg,
            los_count: t.0[0],
            total_count: t.total(),
            p_los,
            p_nlos_b,
            p_nlos_t,
            p_nlos_s,
        }
    }

    pub fn partition(&self) -> [f64; 4] {
        [self.p_los, self.p_nlos_b, self.p_nlos_t, self.p_nlos_s]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PLoSCurve {
    pub records: Vec<AngleRecord>,
}

impl PLoSCurve {
    pub fn angles(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.theta_deg).collect()
    }

    pub fn p_los(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_los).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
    pub p_los: f64,
    pub p_nlos_b: f64,
    pub p_nlos_t: f64,
    pub p_nlos_s: f64,
    /// Mean 3-D ABS–GU distance of the samples in the bin.
    pub mean_distance: f64,
}

impl DistanceBin {
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn partition(&self) -> [f64; 4] {
        [self.p_los, self.p_nlos_b, self.p_nlos_t, self.p_nlos_s]
    }
}

/// Non-empty distance bins in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub bin_width: f64,
    pub bins: Vec<DistanceBin>,
}

impl DistanceStats {
    /// Merges every `factor` adjacent bins into one.
    pub fn rebin(&self, factor: usize) -> Result<DistanceStats> {
        if factor == 0 {
            return Err(Error::domain("rebin factor must be >= 1"));
        }
        let width = self.bin_width * factor as f64;
        let mut merged: BTreeMap<u64, (f64, [f64; 4], f64)> = BTreeMap::new();
        for b in &self.bins {
            let key = (b.lo / self.bin_width).round() as u64 / factor as u64;
            let e = merged.entry(key).or_default();
            let n = b.count as f64;
            e.0 += n;
            for (acc, p) in e.1.iter_mut().zip(b.partition()) {
                *acc += n * p;
            }
            e.2 += n * b.mean_distance;
        }
        let bins = merged
            .into_iter()
            .map(|(k, (n, mass, dsum))| DistanceBin {
                lo: k as f64 * width,
                hi: (k + 1) as f64 * width,
                count: n.round() as u64,
                p_los: mass[0] / n,
                p_nlos_b: mass[1] / n,
                p_nlos_t: mass[2] / n,
                p_nlos_s: mass[3] / n,
                mean_distance: dsum / n,
            })
            .collect();
        Ok(DistanceStats {
            bin_width: width,
            bins,
        })
    }
}

#[derive(Debug, Clone, Default)]
struct ScenarioTally {
    angles: Vec<Tally>,
    bins: BTreeMap<u64, (Tally, f64)>,
}

impl ScenarioTally {
    fn new(n_angles: usize) -> Self {
        ScenarioTally {
            angles: vec![Tally::default(); n_angles],
            bins: BTreeMap::new(),
        }
    }

    fn merge(&mut self, other: &ScenarioTally) {
        for (a, b) in self.angles.iter_mut().zip(&other.angles) {
            a.merge(b);
        }
        for (k, (t, d)) in &other.bins {
            let e = self.bins.entry(*k).or_default();
            e.0.merge(t);
            e.1 += d;
        }
    }
}

struct CityResult {
    tallies: Vec<ScenarioTally>,
    links: u64,
    digest: [u8; 32],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub curve: PLoSCurve,
    pub distance: DistanceStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutput {
    pub results: Vec<ScenarioResult>,
    /// ABS–GU link evaluations per scenario.
    pub samples: u64,
    /// SHA-256 over the per-city layout digests, in city order.
    pub layout_hash: String,
}

impl SweepOutput {
    pub fn scenario(&self, name: &str) -> Option<&ScenarioResult> {
        self.results.iter().find(|r| r.scenario.name == name)
    }
}

fn nearest_angle(angles: &[f64], theta: f64) -> usize {
    let mut best = 0;
    for (i, a) in angles.iter().enumerate() {
        if (a - theta).abs() < (angles[best] - theta).abs() {
            best = i;
        }
    }
    best
}

fn run_city(
    params: &BuiltUpParams,
    gen: &GenConfig,
    sweep: &SweepConfig,
    index: usize,
) -> Result<CityResult> {
    let layout = generate_city_indexed(params, gen, index as u64)?;
    let abs_xy = layout.sample_open_point(&mut substream(gen.seed, Stream::Abs, index as u64), "ABS")?;
    let digest: [u8; 32] = Sha256::digest(layout.to_json().as_bytes()).into();

    let mut tallies = vec![ScenarioTally::new(sweep.angles.len()); sweep.scenarios.len()];
    let mut links = 0;
    let mut record = |slot: usize, h_abs: f64, g: f64, path: &LinkPath, h_gu: f64| {
        let d = g.hypot(h_abs - h_gu);
        let bin = (d / sweep.bin_width).floor() as u64;
        for (tally, sc) in tallies.iter_mut().zip(&sweep.scenarios) {
            let class = path.classify(h_abs, h_gu, sc.obstacles);
            tally.angles[slot].add(class);
            let e = tally.bins.entry(bin).or_default();
            e.0.add(class);
            e.1 += d;
        }
    };

    for user in &layout.users {
        let path = LinkPath::trace(abs_xy, user.position, &layout)?;
        let g = path.ground;
        match sweep.altitude {
            AltitudePolicy::PerAngle => {
                for (slot, &theta) in sweep.angles.iter().enumerate() {
                    let h_abs = abs_altitude(theta, g, user.height);
                    record(slot, h_abs, g, &path, user.height);
                    links += 1;
                }
            }
            AltitudePolicy::Fixed { h_abs } => {
                let h_abs = h_abs.max(user.height);
                let theta = ((h_abs - user.height) / g).atan().to_degrees();
                record(nearest_angle(&sweep.angles, theta), h_abs, g, &path, user.height);
                links += 1;
            }
        }
    }
    Ok(CityResult {
        tallies,
        links,
        digest,
    })
}

/// Runs the sweep over `sweep.n_cities` cities.
///
/// Cities are processed in parallel and reduced in city order, so the output
/// is identical for any thread count.
pub fn run_sweep(params: &BuiltUpParams, gen: &GenConfig, sweep: &SweepConfig) -> Result<SweepOutput> {
    params.validate()?;
    gen.validate()?;
    sweep.validate()?;

    let cities: Vec<CityResult> = (0..sweep.n_cities)
        .into_par_iter()
        .map(|i| {
            run_city(params, gen, sweep, i).map_err(|e| Error::City {
                city: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut totals = vec![ScenarioTally::new(sweep.angles.len()); sweep.scenarios.len()];
    let mut hasher = Sha256::new();
    let mut samples = 0;
    for c in &cities {
        for (t, ct) in totals.iter_mut().zip(&c.tallies) {
            t.merge(ct);
        }
        hasher.update(c.digest);
        samples += c.links;
    }

    let results = sweep
        .scenarios
        .iter()
        .zip(totals)
        .map(|(sc, t)| ScenarioResult {
            scenario: sc.clone(),
            curve: PLoSCurve {
                records: sweep
                    .angles
                    .iter()
                    .zip(&t.angles)
                    .map(|(&a, tally)| AngleRecord::from_tally(a, tally))
                    .collect(),
            },
            distance: DistanceStats {
                bin_width: sweep.bin_width,
                bins: t
                    .bins
                    .iter()
                    .map(|(&k, (tally, dsum))| {
                        let [p_los, p_nlos_b, p_nlos_t, p_nlos_s] = tally.probabilities();
                        DistanceBin {
                            lo: k as f64 * sweep.bin_width,
                            hi: (k + 1) as f64 * sweep.bin_width,
                            count: tally.total(),
                            p_los,
                            p_nlos_b,
                            p_nlos_t,
                            p_nlos_s,
                            mean_distance: dsum / tally.total() as f64,
                        }
                    })
                    .collect(),
            },
        })
        .collect();

    Ok(SweepOutput {
        results,
        samples,
        layout_hash: hex::encode(hasher.finalize()),
    })
}

fn check_same_grid(a: &PLoSCurve, b: &PLoSCurve) -> Result<()> {
    if a.angles() != b.angles() {
        return Err(Error::Aggregation("curves use different angle grids".into()));
    }
    Ok(())
}

/// Mean over angles of `|p_los(a) − p_los(b)|`.
pub fn streetlight_delta(with_trees: &PLoSCurve, with_lights: &PLoSCurve) -> Result<f64> {
    check_same_grid(with_trees, with_lights)?;
    let n = with_trees.records.len() as f64;
    Ok(with_trees
        .records
        .iter()
        .zip(&with_lights.records)
        .map(|(a, b)| (a.p_los - b.p_los).abs())
        .sum::<f64>()
        / n)
}

/// Extra NLoS probability per angle caused by adding obstacles to a base
/// scenario: `p_los(base) − p_los(more)`.
pub fn added_nlos(base: &PLoSCurve, more: &PLoSCurve) -> Result<Vec<(f64, f64)>> {
    check_same_grid(base, more)?;
    Ok(base
        .records
        .iter()
        .zip(&more.records)
        .map(|(a, b)| (a.theta_deg, a.p_los - b.p_los))
        .collect())
}

/// Angle at which a `(θ, value)` series peaks (first maximum).
pub fn peak_angle(series: &[(f64, f64)]) -> Option<f64> {
    series
        .iter()
        .fold(None, |best: Option<(f64, f64)>, &(a, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((a, v)),
        })
        .map(|(a, _)| a)
}

/// One curve per tree count, all from the same cities and users.
///
/// The layout is generated with `max(densities)` trees and each curve keeps
/// a prefix of them (streetlights excluded), so the tree sets are nested.
pub fn tree_density_sweep(
    params: &BuiltUpParams,
    gen: &GenConfig,
    sweep: &SweepConfig,
    densities: &[usize],
) -> Result<Vec<(usize, PLoSCurve)>> {
    if densities.is_empty() {
        return Err(Error::domain("no tree densities given"));
    }
    if densities.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("tree densities must be sorted ascending"));
    }
    let gen = GenConfig {
        n_trees: *densities.last().unwrap(),
        ..gen.clone()
    };
    let sweep = SweepConfig {
        scenarios: densities.iter().map(|&n| Scenario::tree_density(n)).collect(),
        ..sweep.clone()
    };
    let out = run_sweep(params, &gen, &sweep)?;
    Ok(densities
        .iter()
        .zip(out.results)
        .map(|(&n, r)| (n, r.curve))
        .collect())
}

//! Randomized Manhattan city generation.
//!
//! The square city is split into a `⌈√n⌉ × ⌈√n⌉` grid of blocks, `n` of
//! which receive one building each. Every building keeps the average
//! footprint area `B_avg = α·A / n` exactly; only its aspect ratio is random
//! (`W = √B_avg·𝓡`, `L = B_avg / W`, `𝓡 ~ U(0.5, 1.5)`). Heights are Rayleigh.
//! Trees and streetlights sit on the sidewalk, `d_o` outside a random
//! building side, and ground users are spread uniformly over what remains.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};
use crate::shapes::{Point, Rect};

/// Square metres in one km².
pub const KM2: f64 = 1.0e6;
/// Attempts per entity before rejection sampling gives up.
pub const MAX_ATTEMPTS: usize = 10_000;
/// Lower and upper bound of the building shape factor.
pub const SHAPE_RANGE: (f64, f64) = (0.5, 1.5);
/// Tree height and foliage radius ranges (m).
pub const TREE_HEIGHT_RANGE: (f64, f64) = (2.0, 5.0);
pub const TREE_RADIUS_RANGE: (f64, f64) = (0.5, 1.5);
pub const TRUNK_HEIGHT_FRACTION: f64 = 0.2;
pub const TRUNK_RADIUS_FRACTION: f64 = 0.1;
pub const LIGHT_HEIGHT_RANGE: (f64, f64) = (2.0, 5.0);
pub const LIGHT_RADIUS: f64 = 0.1;

/// Built-up parameter tuple `(α, β, γ)` describing an environment class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuiltUpParams {
    /// Built area over total land area.
    pub alpha: f64,
    /// Buildings per km².
    pub beta: f64,
    /// Rayleigh scale of building heights (m).
    pub gamma: f64,
}

impl BuiltUpParams {
    pub const URBAN: BuiltUpParams = BuiltUpParams {
        alpha: 0.3,
        beta: 500.0,
        gamma: 15.0,
    };
    pub const DENSE_URBAN: BuiltUpParams = BuiltUpParams {
        alpha: 0.5,
        beta: 300.0,
        gamma: 20.0,
    };
    pub const HIGH_RISE: BuiltUpParams = BuiltUpParams {
        alpha: 0.5,
        beta: 300.0,
        gamma: 50.0,
    };

    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = BuiltUpParams { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::domain(format!("alpha must be in (0,1), got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::domain(format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::domain(format!("gamma must be > 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Average building footprint `α·A / (β·A/10⁶)` in m².
    pub fn average_footprint(&self) -> f64 {
        self.alpha * KM2 / self.beta
    }
}

/// Named environment presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Environment {
    Urban,
    DenseUrban,
    HighRise,
}

impl Environment {
    pub const ALL: [Environment; 3] = [
        Environment::Urban,
        Environment::DenseUrban,
        Environment::HighRise,
    ];

    pub fn params(self) -> BuiltUpParams {
        match self {
            Environment::Urban => BuiltUpParams::URBAN,
            Environment::DenseUrban => BuiltUpParams::DENSE_URBAN,
            Environment::HighRise => BuiltUpParams::HIGH_RISE,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Environment::Urban => "urban",
            Environment::DenseUrban => "dense_urban",
            Environment::HighRise => "high_rise",
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "urban" => Ok(Environment::Urban),
            "dense_urban" | "dense" => Ok(Environment::DenseUrban),
            "high_rise" | "highrise" => Ok(Environment::HighRise),
            other => Err(Error::domain(format!("unknown environment `{other}`"))),
        }
    }
}

/// Scene-level generation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    /// Total land area (m²); the city is the square of this area.
    pub area: f64,
    pub n_trees: usize,
    pub n_lights: usize,
    pub n_gu: usize,
    /// Obstacle offset from the building edge (m).
    pub d_o: f64,
    /// Ground-user antenna height (m).
    pub h_gu: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            area: KM2,
            n_trees: 200,
            n_lights: 500,
            n_gu: 100,
            d_o: 1.5,
            h_gu: 1.5,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.area > 0.0 && self.area.is_finite()) {
            return Err(Error::domain(format!("area must be > 0, got {}", self.area)));
        }
        if !(self.d_o > 0.0 && self.d_o.is_finite()) {
            return Err(Error::domain(format!("d_o must be > 0, got {}", self.d_o)));
        }
        if !(self.h_gu >= 0.0 && self.h_gu.is_finite()) {
            return Err(Error::domain(format!("h_gu must be >= 0, got {}", self.h_gu)));
        }
        Ok(())
    }

    pub fn side(&self) -> f64 {
        self.area.sqrt()
    }
}

/// Axis-aligned building. `width` runs along x unless `rotated`, in which
/// case it runs along y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub origin: Point,
    pub width: f64,
    pub length: f64,
    pub height: f64,
    #[serde(default)]
    pub rotated: bool,
}

impl Building {
    pub fn extent(&self) -> (f64, f64) {
        if self.rotated {
            (self.length, self.width)
        } else {
            (self.width, self.length)
        }
    }

    pub fn footprint(&self) -> Rect {
        let (ex, ey) = self.extent();
        Rect::new(
            self.origin,
            Point::new(self.origin.x + ex, self.origin.y + ey),
        )
    }

    pub fn area(&self) -> f64 {
        self.width * self.length
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub center: Point,
    /// Foliage base radius `r_T`.
    pub r_t: f64,
    /// Total height `h_T`.
    pub h_t: f64,
    pub h_trunk: f64,
    pub r_trunk: f64,
}

impl Tree {
    pub fn new(center: Point, r_t: f64, h_t: f64) -> Self {
        Tree {
            center,
            r_t,
            h_t,
            h_trunk: TRUNK_HEIGHT_FRACTION * h_t,
            r_trunk: TRUNK_RADIUS_FRACTION * r_t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Streetlight {
    pub center: Point,
    pub r_s: f64,
    pub h_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundUser {
    pub position: Point,
    pub height: f64,
}

/// A generated scene. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CityLayout {
    pub params: BuiltUpParams,
    pub config: GenConfig,
    pub buildings: Vec<Building>,
    pub trees: Vec<Tree>,
    pub lights: Vec<Streetlight>,
    pub users: Vec<GroundUser>,
}

impl CityLayout {
    pub fn bounds(&self) -> Rect {
        let s = self.config.side();
        Rect::new(Point::new(0.0, 0.0), Point::new(s, s))
    }

    pub fn built_area(&self) -> f64 {
        self.buildings.iter().map(Building::area).sum()
    }

    /// True when `p` is on open ground: not inside a building footprint,
    /// tree foliage disc or streetlight disc.
    pub fn is_open(&self, p: Point) -> bool {
        is_open(p, &self.buildings, &self.trees, &self.lights)
    }

    /// Uniform point over open ground by rejection.
    pub fn sample_open_point(&self, rng: &mut ChaCha8Rng, what: &str) -> Result<Point> {
        sample_open(rng, self.config.side(), what, |p| self.is_open(p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let layout: CityLayout =
            serde_json::from_str(s).map_err(|e| Error::domain(format!("layout JSON: {e}")))?;
        layout.params.validate()?;
        layout.config.validate()?;
        Ok(layout)
    }
}

fn is_open(p: Point, buildings: &[Building], trees: &[Tree], lights: &[Streetlight]) -> bool {
    buildings.iter().all(|b| !b.footprint().contains(p))
        && trees.iter().all(|t| t.center.distance(p) > t.r_t)
        && lights.iter().all(|l| l.center.distance(p) > l.r_s)
}

fn sample_open(
    rng: &mut ChaCha8Rng,
    side: f64,
    what: &str,
    open: impl Fn(Point) -> bool,
) -> Result<Point> {
    for _ in 0..MAX_ATTEMPTS {
        let p = Point::new(rng.random_range(0.0..side), rng.random_range(0.0..side));
        if open(p) {
            return Ok(p);
        }
    }
    Err(Error::infeasible(format!(
        "could not place {what} after {MAX_ATTEMPTS} attempts"
    )))
}

/// Building width and length for one shape draw: `W = √B_avg·shape`,
/// `L = B_avg / W`.
pub fn derive_building_dims(params: &BuiltUpParams, area: f64, shape: f64) -> Result<(f64, f64)> {
    params.validate()?;
    if !(area > 0.0) {
        return Err(Error::domain(format!("area must be > 0, got {area}")));
    }
    if !(SHAPE_RANGE.0..=SHAPE_RANGE.1).contains(&shape) {
        return Err(Error::domain(format!("shape factor {shape} outside [0.5, 1.5]")));
    }
    let built = params.alpha * area;
    let count = params.beta * area / KM2;
    let b_avg = built / count;
    let w = b_avg.sqrt() * shape;
    Ok((w, b_avg / w))
}

/// Rayleigh quantile function: `γ·√(−2 ln(1 − u))`.
pub fn rayleigh_quantile(gamma: f64, u: f64) -> f64 {
    gamma * (-2.0 * (-u).ln_1p()).sqrt()
}

/// Draws one Rayleigh(γ) building height.
pub fn sample_height<R: Rng + ?Sized>(gamma: f64, rng: &mut R) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma must be > 0, got {gamma}")));
    }
    // Exclude u = 0 so heights stay strictly positive.
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    Ok(rayleigh_quantile(gamma, u))
}

/// Number of buildings for `params` over `area`, rounded to the nearest integer.
pub fn building_count(params: &BuiltUpParams, area: f64) -> usize {
    (params.beta * area / KM2).round() as usize
}

/// Generates city number 0 for this configuration.
pub fn generate_city(params: &BuiltUpParams, config: &GenConfig) -> Result<CityLayout> {
    generate_city_indexed(params, config, 0)
}

/// Generates city `index` of a run. Each index draws from its own substreams.
pub fn generate_city_indexed(
    params: &BuiltUpParams,
    config: &GenConfig,
    index: u64,
) -> Result<CityLayout> {
    params.validate()?;
    config.validate()?;
    let seed = config.seed;

    let buildings = place_buildings(params, config, &mut substream(seed, Stream::Buildings, index))?;
    let (trees, lights) = place_obstacles(
        &buildings,
        config,
        &mut substream(seed, Stream::Trees, index),
        &mut substream(seed, Stream::Lights, index),
    )?;
    let users = place_users(
        &buildings,
        &trees,
        &lights,
        config,
        &mut substream(seed, Stream::Users, index),
    )?;

    Ok(CityLayout {
        params: *params,
        config: config.clone(),
        buildings,
        trees,
        lights,
        users,
    })
}

/// Places `round(β·A/10⁶)` buildings, one per randomly chosen grid block.
///
/// A shape draw whose footprint cannot fit inside its block is redrawn.
pub fn place_buildings(
    params: &BuiltUpParams,
    config: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Building>> {
    let n = building_count(params, config.area);
    if n == 0 {
        return Ok(Vec::new());
    }
    let side = config.side();
    let per_side = (n as f64).sqrt().ceil() as usize;
    let block = side / per_side as f64;

    let mut blocks: Vec<usize> = (0..per_side * per_side).collect();
    blocks.shuffle(rng);
    blocks.truncate(n);
    blocks.sort_unstable();

    let mut out = Vec::with_capacity(n);
    for (i, &cell) in blocks.iter().enumerate() {
        let bx = (cell % per_side) as f64 * block;
        let by = (cell / per_side) as f64 * block;
        let mut placed = None;
        for _ in 0..MAX_ATTEMPTS {
            let shape = rng.random_range(SHAPE_RANGE.0..=SHAPE_RANGE.1);
            let rotated = rng.random_bool(0.5);
            let (width, length) = derive_building_dims(params, config.area, shape)?;
            let (ex, ey) = if rotated { (length, width) } else { (width, length) };
            if ex > block || ey > block {
                continue;
            }
            let x = bx + rng.random_range(0.0..=block - ex);
            let y = by + rng.random_range(0.0..=block - ey);
            placed = Some(Building {
                origin: Point::new(x, y),
                width,
                length,
                height: 0.0,
                rotated,
            });
            break;
        }
        let mut b = placed.ok_or_else(|| {
            Error::infeasible(format!(
                "building {i}: no shape draw fits a {block:.2} m block after {MAX_ATTEMPTS} attempts"
            ))
        })?;
        b.height = sample_height(params.gamma, rng)?;
        out.push(b);
    }
    Ok(out)
}

/// Center of an obstacle sitting `d_o` outside `side` of `building`, at
/// fraction `t ∈ [0,1]` along that side. Sides: 0 south, 1 east, 2 north, 3 west.
pub fn obstacle_anchor(building: &Building, side: usize, t: f64, d_o: f64) -> Point {
    let r = building.footprint();
    match side % 4 {
        0 => Point::new(r.min.x + t * r.width(), r.min.y - d_o),
        1 => Point::new(r.max.x + d_o, r.min.y + t * r.height()),
        2 => Point::new(r.min.x + t * r.width(), r.max.y + d_o),
        _ => Point::new(r.min.x - d_o, r.min.y + t * r.height()),
    }
}

fn anchor_disc(
    buildings: &[Building],
    bounds: &Rect,
    radius: f64,
    d_o: f64,
    rng: &mut ChaCha8Rng,
    what: &str,
) -> Result<Point> {
    if buildings.is_empty() {
        return Err(Error::infeasible(format!("{what}: no buildings to line")));
    }
    for _ in 0..MAX_ATTEMPTS {
        let b = &buildings[rng.random_range(0..buildings.len())];
        let side = rng.random_range(0..4);
        let t: f64 = rng.random();
        let c = obstacle_anchor(b, side, t, d_o);
        let inside = c.x - radius >= bounds.min.x
            && c.x + radius <= bounds.max.x
            && c.y - radius >= bounds.min.y
            && c.y + radius <= bounds.max.y;
        if inside && buildings.iter().all(|o| !o.footprint().intersects_disc(c, radius)) {
            return Ok(c);
        }
    }
    Err(Error::infeasible(format!(
        "{what}: no sidewalk position after {MAX_ATTEMPTS} attempts"
    )))
}

/// Places `n_trees` trees and `n_lights` streetlights along building sides.
///
/// Trees and lights use separate streams, so the light count never moves a
/// tree. Obstacles may overlap each other but never a building.
pub fn place_obstacles(
    buildings: &[Building],
    config: &GenConfig,
    tree_rng: &mut ChaCha8Rng,
    light_rng: &mut ChaCha8Rng,
) -> Result<(Vec<Tree>, Vec<Streetlight>)> {
    let side = config.side();
    let bounds = Rect::new(Point::new(0.0, 0.0), Point::new(side, side));

    let mut trees = Vec::with_capacity(config.n_trees);
    for i in 0..config.n_trees {
        let h_t = tree_rng.random_range(TREE_HEIGHT_RANGE.0..=TREE_HEIGHT_RANGE.1);
        let r_t = tree_rng.random_range(TREE_RADIUS_RANGE.0..=TREE_RADIUS_RANGE.1);
        let c = anchor_disc(buildings, &bounds, r_t, config.d_o, tree_rng, &format!("tree {i}"))?;
        trees.push(Tree::new(c, r_t, h_t));
    }

    let mut lights = Vec::with_capacity(config.n_lights);
    for i in 0..config.n_lights {
        let h_s = light_rng.random_range(LIGHT_HEIGHT_RANGE.0..=LIGHT_HEIGHT_RANGE.1);
        let c = anchor_disc(
            buildings,
            &bounds,
            LIGHT_RADIUS,
            config.d_o,
            light_rng,
            &format!("streetlight {i}"),
        )?;
        lights.push(Streetlight {
            center: c,
            r_s: LIGHT_RADIUS,
            h_s,
        });
    }
    Ok((trees, lights))
}

/// Places `n_gu` users uniformly over open ground.
pub fn place_users(
    buildings: &[Building],
    trees: &[Tree],
    lights: &[Streetlight],
    config: &GenConfig,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<GroundUser>> {
    if config.n_gu == 0 {
        return Ok(Vec::new());
    }
    let occupied: f64 = buildings.iter().map(Building::area).sum::<f64>()
        + trees.iter().map(|t| std::f64::consts::PI * t.r_t * t.r_t).sum::<f64>()
        + lights.iter().map(|l| std::f64::consts::PI * l.r_s * l.r_s).sum::<f64>();
    if config.area - occupied < 0.01 * config.area {
        return Err(Error::infeasible(format!(
            "user 0: free area {:.0} m² is below 1% of the city",
            (config.area - occupied).max(0.0)
        )));
    }
    let side = config.side();
    (0..config.n_gu)
        .map(|i| {
            let p = sample_open(rng, side, &format!("user {i}"), |p| {
                is_open(p, buildings, trees, lights)
            })?;
            Ok(GroundUser {
                position: p,
                height: config.h_gu,
            })
        })
        .collect()
}

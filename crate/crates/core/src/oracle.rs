//! Brute-force reference classifier.
//!
//! Walks the ground projection of the link in steps of at most 1 cm and, at
//! every sample, asks each footprint whether it contains the point. It shares
//! no code with [`crate::geometry`] beyond the layout types; the uniform grid
//! here only narrows which footprints are asked.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::citygen::CityLayout;
use crate::error::{Error, Result};
use crate::geometry::{classify_link, Link, LinkClass};
use crate::rng::{substream, Stream};
use crate::shapes::Point;

pub const STEP: f64 = 0.01;
const CELL: f64 = 10.0;

#[derive(Clone, Copy)]
enum Entry {
    Building(usize),
    Tree(usize),
    Light(usize),
}

pub struct RasterOracle<'a> {
    layout: &'a CityLayout,
    grid: HashMap<(i64, i64), Vec<Entry>>,
}

impl<'a> RasterOracle<'a> {
    pub fn new(layout: &'a CityLayout) -> Self {
        let mut grid: HashMap<(i64, i64), Vec<Entry>> = HashMap::new();
        let mut add = |min: Point, max: Point, e: Entry| {
            let (x0, y0) = cell_of(min);
            let (x1, y1) = cell_of(max);
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    grid.entry((cx, cy)).or_default().push(e);
                }
            }
        };
        for (i, b) in layout.buildings.iter().enumerate() {
            let (ex, ey) = if b.rotated {
                (b.length, b.width)
            } else {
                (b.width, b.length)
            };
            let max = Point::new(b.origin.x + ex, b.origin.y + ey);
            add(b.origin, max, Entry::Building(i));
        }
        for (i, t) in layout.trees.iter().enumerate() {
            let r = Point::new(t.r_t, t.r_t);
            add(
                Point::new(t.center.x - r.x, t.center.y - r.y),
                Point::new(t.center.x + r.x, t.center.y + r.y),
                Entry::Tree(i),
            );
        }
        for (i, l) in layout.lights.iter().enumerate() {
            add(
                Point::new(l.center.x - l.r_s, l.center.y - l.r_s),
                Point::new(l.center.x + l.r_s, l.center.y + l.r_s),
                Entry::Light(i),
            );
        }
        RasterOracle { layout, grid }
    }

    /// Height of the obstacle at `p`, if `p` lies in its footprint.
    fn height_at(&self, e: Entry, p: Point) -> Option<f64> {
        match e {
            Entry::Building(i) => {
                let b = &self.layout.buildings[i];
                let (ex, ey) = if b.rotated {
                    (b.length, b.width)
                } else {
                    (b.width, b.length)
                };
                let inside = p.x >= b.origin.x
                    && p.x <= b.origin.x + ex
                    && p.y >= b.origin.y
                    && p.y <= b.origin.y + ey;
                inside.then_some(b.height)
            }
            Entry::Tree(i) => {
                let t = &self.layout.trees[i];
                let rho = ((p.x - t.center.x).powi(2) + (p.y - t.center.y).powi(2)).sqrt();
                if rho > t.r_t {
                    None
                } else if rho <= 0.1 * t.r_t {
                    Some(t.h_t)
                } else {
                    // Foliage cone: h_T at the axis, 0.2·h_T at the rim.
                    Some(t.h_t - 0.8 * t.h_t * rho / t.r_t)
                }
            }
            Entry::Light(i) => {
                let l = &self.layout.lights[i];
                let rho = ((p.x - l.center.x).powi(2) + (p.y - l.center.y).powi(2)).sqrt();
                (rho <= l.r_s).then_some(l.h_s)
            }
        }
    }

    pub fn classify(&self, link: &Link) -> Result<LinkClass> {
        let g = link.ground_distance();
        if !(g > 0.0) {
            return Err(Error::DegenerateLink);
        }
        let steps = (g / STEP).ceil() as u64;
        let (mut building, mut tree, mut light) = (false, false, false);
        for s in 0..=steps {
            let f = s as f64 / steps as f64;
            let p = Point::new(
                link.gu_xy.x + (link.abs_xy.x - link.gu_xy.x) * f,
                link.gu_xy.y + (link.abs_xy.y - link.gu_xy.y) * f,
            );
            let r_i = g * (1.0 - f);
            let line = link.h_abs - r_i * (link.h_abs - link.h_gu) / g;
            let Some(entries) = self.grid.get(&cell_of(p)) else {
                continue;
            };
            for &e in entries {
                if let Some(h) = self.height_at(e, p) {
                    if h >= line {
                        match e {
                            Entry::Building(_) => building = true,
                            Entry::Tree(_) => tree = true,
                            Entry::Light(_) => light = true,
                        }
                    }
                }
            }
            if building {
                break;
            }
        }
        Ok(if building {
            LinkClass::NlosBuilding
        } else if tree {
            LinkClass::NlosTree
        } else if light {
            LinkClass::NlosStreetlight
        } else {
            LinkClass::Los
        })
    }
}

fn cell_of(p: Point) -> (i64, i64) {
    ((p.x / CELL).floor() as i64, (p.y / CELL).floor() as i64)
}

/// Random links over `layout`: an open-ground ABS, one of the layout's
/// users, and an elevation angle drawn uniformly from (0°, 90°).
pub fn random_links(layout: &CityLayout, n: usize, seed: u64, index: u64) -> Result<Vec<Link>> {
    if layout.users.is_empty() {
        return Err(Error::domain("layout has no ground users"));
    }
    let mut rng = substream(seed, Stream::Links, index);
    let mut links = Vec::with_capacity(n);
    while links.len() < n {
        let abs = layout.sample_open_point(&mut rng, "ABS")?;
        let user = &layout.users[rng.random_range(0..layout.users.len())];
        let g = abs.distance(user.position);
        if !(g > 0.0) {
            continue;
        }
        let theta: f64 = rng.random_range(0.0..90.0_f64);
        let h_abs = user.height + g * theta.to_radians().tan();
        links.push(Link::new(abs, h_abs, user.position, user.height)?);
    }
    Ok(links)
}

/// A link on which the fast classifier and the oracle disagree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub link: Link,
    pub fast: LinkClass,
    pub oracle: LinkClass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub links: usize,
    /// Oracle counts in `[los, nlos_b, nlos_t, nlos_s]` order.
    pub classes: [usize; 4],
    pub disagreements: Vec<Disagreement>,
}

/// Classifies every link with both [`classify_link`] and the oracle.
pub fn compare(layout: &CityLayout, links: &[Link]) -> Result<OracleReport> {
    let oracle = RasterOracle::new(layout);
    let mut report = OracleReport {
        links: links.len(),
        classes: [0; 4],
        disagreements: Vec::new(),
    };
    for link in links {
        let fast = classify_link(link, layout)?;
        let slow = oracle.classify(link)?;
        report.classes[slow.slot()] += 1;
        if fast != slow {
            report.disagreements.push(Disagreement {
                link: *link,
                fast,
                oracle: slow,
            });
        }
    }
    Ok(report)
}

//! Line-of-sight classification of a single ABS–ground-user link.
//!
//! The 2-D segment between the ABS ground position and the user is crossed
//! against every obstacle footprint once ([`LinkPath::trace`]); the result
//! does not depend on the ABS altitude, so the elevation sweep re-evaluates
//! the same crossings at every angle.
//!
//! Distances `r` and `r_i` are measured in the ground plane from the ABS.
//! For a straight link that is the same ratio as the 3-D distances.

use serde::{Deserialize, Serialize};

use crate::citygen::{CityLayout, Tree};
use crate::error::{Error, Result};
use crate::shapes::{segment_disc_chord, DiscChord, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObstacleKind {
    Building,
    Tree,
    Streetlight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkClass {
    Los,
    NlosBuilding,
    NlosTree,
    NlosStreetlight,
}

impl LinkClass {
    /// Slot in `[los, nlos_b, nlos_t, nlos_s]` count arrays.
    pub fn slot(self) -> usize {
        match self {
            LinkClass::Los => 0,
            LinkClass::NlosBuilding => 1,
            LinkClass::NlosTree => 2,
            LinkClass::NlosStreetlight => 3,
        }
    }

    pub fn is_los(self) -> bool {
        self == LinkClass::Los
    }
}

/// One ABS–GU link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub abs_xy: Point,
    pub h_abs: f64,
    pub gu_xy: Point,
    pub h_gu: f64,
}

impl Link {
    pub fn new(abs_xy: Point, h_abs: f64, gu_xy: Point, h_gu: f64) -> Result<Self> {
        if !(h_abs >= h_gu) {
            return Err(Error::domain(format!(
                "ABS altitude {h_abs} below user height {h_gu}"
            )));
        }
        Ok(Link {
            abs_xy,
            h_abs,
            gu_xy,
            h_gu,
        })
    }

    pub fn ground_distance(&self) -> f64 {
        self.abs_xy.distance(self.gu_xy)
    }

    pub fn distance_3d(&self) -> f64 {
        self.ground_distance().hypot(self.h_abs - self.h_gu)
    }
}

/// An obstacle whose footprint the link crosses, evaluated at one altitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstructionHit {
    pub kind: ObstacleKind,
    /// Index into the layout's list for `kind`.
    pub index: usize,
    /// Ground distance from the ABS to the decisive point of the crossing.
    pub r_i: f64,
    pub obstacle_height: f64,
    pub blockage_height: f64,
}

impl ObstructionHit {
    pub fn blocks(&self) -> bool {
        self.obstacle_height >= self.blockage_height
    }
}

/// Height of the ABS–GU line at ground distance `r_i` from the ABS.
pub fn blockage_height(h_abs: f64, h_gu: f64, r_i: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::DegenerateLink);
    }
    Ok(h_abs - r_i * (h_abs - h_gu) / r)
}

/// Tree profile at radial distance `rho` from its axis: full height over the
/// trunk, a cone from `h_T` down to `0.2·h_T` across the foliage, nothing
/// outside the foliage disc.
pub fn tree_height_at(tree: &Tree, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::domain(format!("negative radial distance {rho}")));
    }
    Ok(tree_profile(tree, rho))
}

fn tree_profile(tree: &Tree, rho: f64) -> f64 {
    if rho <= tree.r_trunk {
        tree.h_t
    } else if rho <= tree.r_t {
        tree.h_t * (1.0 - 0.8 * rho / tree.r_t)
    } else {
        0.0
    }
}

/// Which obstacles take part in a classification: the first `n_trees` trees
/// and the first `n_lights` streetlights. Buildings always do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObstacleSet {
    pub n_trees: usize,
    pub n_lights: usize,
}

impl ObstacleSet {
    pub const ALL: ObstacleSet = ObstacleSet {
        n_trees: usize::MAX,
        n_lights: usize::MAX,
    };
    pub const BUILDINGS_ONLY: ObstacleSet = ObstacleSet {
        n_trees: 0,
        n_lights: 0,
    };

    fn includes(&self, kind: ObstacleKind, index: usize) -> bool {
        match kind {
            ObstacleKind::Building => true,
            ObstacleKind::Tree => index < self.n_trees,
            ObstacleKind::Streetlight => index < self.n_lights,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// Flat-topped footprint crossed over `[near, far]`.
    Flat { height: f64, far: f64 },
    Tree { tree: Tree, chord: DiscChord },
}

/// Altitude-independent crossing of one footprint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub kind: ObstacleKind,
    pub index: usize,
    profile: Profile,
}

impl Crossing {
    /// Decisive point and obstacle height for a line of the given slope.
    ///
    /// The line descends from the ABS toward the user, so over a flat top the
    /// far edge is the binding point. For a tree the clearance margin is
    /// maximised over the chord exactly: the cone margin is concave along the
    /// chord and the trunk margin peaks at the trunk's far edge.
    fn decisive(&self, slope: f64) -> (f64, f64) {
        match self.profile {
            Profile::Flat { height, far } => (far, height),
            Profile::Tree { tree, chord } => {
                let DiscChord {
                    closest,
                    offset,
                    enter,
                    exit,
                } = chord;
                let rho_at = |r: f64| {
                    (offset * offset + (r - closest) * (r - closest))
                        .sqrt()
                        .min(tree.r_t)
                };
                let margin = |r: f64| tree_profile(&tree, rho_at(r)) + slope * r;

                let cone_slope = 0.8 * tree.h_t / tree.r_t;
                let cone_r = if slope >= cone_slope {
                    exit
                } else {
                    let u = slope * offset / (cone_slope * cone_slope - slope * slope).sqrt();
                    (closest + u).clamp(enter, exit)
                };
                let mut best = cone_r;

                if offset <= tree.r_trunk {
                    let half = (tree.r_trunk * tree.r_trunk - offset * offset).sqrt();
                    let lo = (closest - half).max(enter);
                    let hi = (closest + half).min(exit);
                    if lo <= hi && margin(hi) > margin(best) {
                        best = hi;
                    }
                }
                (best, tree_profile(&tree, rho_at(best)))
            }
        }
    }
}

/// All footprint crossings of the 2-D segment between ABS and user.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkPath {
    pub abs_xy: Point,
    pub gu_xy: Point,
    pub ground: f64,
    pub crossings: Vec<Crossing>,
}

impl LinkPath {
    pub fn trace(abs_xy: Point, gu_xy: Point, layout: &CityLayout) -> Result<Self> {
        let ground = abs_xy.distance(gu_xy);
        if !(ground > 0.0) {
            return Err(Error::DegenerateLink);
        }
        let mut crossings = Vec::new();
        for (index, b) in layout.buildings.iter().enumerate() {
            if let Some((_, t1)) = b.footprint().clip_segment(abs_xy, gu_xy) {
                crossings.push(Crossing {
                    kind: ObstacleKind::Building,
                    index,
                    profile: Profile::Flat {
                        height: b.height,
                        far: t1 * ground,
                    },
                });
            }
        }
        for (index, t) in layout.trees.iter().enumerate() {
            if let Some(chord) = segment_disc_chord(abs_xy, gu_xy, t.center, t.r_t) {
                crossings.push(Crossing {
                    kind: ObstacleKind::Tree,
                    index,
                    profile: Profile::Tree { tree: *t, chord },
                });
            }
        }
        for (index, l) in layout.lights.iter().enumerate() {
            if let Some(chord) = segment_disc_chord(abs_xy, gu_xy, l.center, l.r_s) {
                crossings.push(Crossing {
                    kind: ObstacleKind::Streetlight,
                    index,
                    profile: Profile::Flat {
                        height: l.h_s,
                        far: chord.exit,
                    },
                });
            }
        }
        Ok(LinkPath {
            abs_xy,
            gu_xy,
            ground,
            crossings,
        })
    }

    fn slope(&self, h_abs: f64, h_gu: f64) -> f64 {
        (h_abs - h_gu) / self.ground
    }

    /// Hits for the included obstacles at this altitude, sorted by `r_i`.
    pub fn hits(&self, h_abs: f64, h_gu: f64, set: ObstacleSet) -> Vec<ObstructionHit> {
        let slope = self.slope(h_abs, h_gu);
        let mut hits: Vec<ObstructionHit> = self
            .crossings
            .iter()
            .filter(|c| set.includes(c.kind, c.index))
            .map(|c| {
                let (r_i, obstacle_height) = c.decisive(slope);
                ObstructionHit {
                    kind: c.kind,
                    index: c.index,
                    r_i,
                    obstacle_height,
                    blockage_height: h_abs - r_i * slope,
                }
            })
            .collect();
        hits.sort_by(|a, b| a.r_i.total_cmp(&b.r_i));
        hits
    }

    /// LoS unless some included obstacle reaches the line; blocking types
    /// are attributed with precedence building > tree > streetlight.
    pub fn classify(&self, h_abs: f64, h_gu: f64, set: ObstacleSet) -> LinkClass {
        let slope = self.slope(h_abs, h_gu);
        let mut tree = false;
        let mut light = false;
        for c in &self.crossings {
            if !set.includes(c.kind, c.index) {
                continue;
            }
            let blocks = match c.kind {
                ObstacleKind::Building => true,
                ObstacleKind::Tree => !tree,
                ObstacleKind::Streetlight => !tree && !light,
            };
            if !blocks {
                continue;
            }
            let (r_i, height) = c.decisive(slope);
            if height >= h_abs - r_i * slope {
                match c.kind {
                    ObstacleKind::Building => return LinkClass::NlosBuilding,
                    ObstacleKind::Tree => tree = true,
                    ObstacleKind::Streetlight => light = true,
                }
            }
        }
        if tree {
            LinkClass::NlosTree
        } else if light {
            LinkClass::NlosStreetlight
        } else {
            LinkClass::Los
        }
    }
}

/// Every obstacle footprint crossed by the link, evaluated at its altitude.
pub fn footprint_crossings(link: &Link, layout: &CityLayout) -> Result<Vec<ObstructionHit>> {
    let path = LinkPath::trace(link.abs_xy, link.gu_xy, layout)?;
    Ok(path.hits(link.h_abs, link.h_gu, ObstacleSet::ALL))
}

pub fn classify_link(link: &Link, layout: &CityLayout) -> Result<LinkClass> {
    classify_link_with(link, layout, ObstacleSet::ALL)
}

pub fn classify_link_with(link: &Link, layout: &CityLayout, set: ObstacleSet) -> Result<LinkClass> {
    let path = LinkPath::trace(link.abs_xy, link.gu_xy, layout)?;
    Ok(path.classify(link.h_abs, link.h_gu, set))
}

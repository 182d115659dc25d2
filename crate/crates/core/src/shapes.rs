//! Planar primitives: points, axis-aligned rectangles, discs, and the
//! segment clipping routines used for footprint crossings.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Rect { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.min.x >= self.min.x
            && other.max.x <= self.max.x
            && other.min.y >= self.min.y
            && other.max.y <= self.max.y
    }

    /// True when the interiors intersect. Rectangles sharing only an edge do
    /// not overlap.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.min.x < other.max.x
            && other.min.x < self.max.x
            && self.min.y < other.max.y
            && other.min.y < self.max.y
    }

    /// Euclidean distance from `p` to the closed rectangle (0 inside).
    pub fn distance_to(&self, p: Point) -> f64 {
        let dx = (self.min.x - p.x).max(0.0).max(p.x - self.max.x);
        let dy = (self.min.y - p.y).max(0.0).max(p.y - self.max.y);
        dx.hypot(dy)
    }

    /// Open disc of `radius` around `center` intersects the rectangle interior.
    pub fn intersects_disc(&self, center: Point, radius: f64) -> bool {
        self.distance_to(center) < radius
    }

    /// Parametric interval `[t0, t1] ⊂ [0, 1]` of the segment `a → b` that
    /// lies inside the rectangle (Liang–Barsky). `None` when they are disjoint.
    pub fn clip_segment(&self, a: Point, b: Point) -> Option<(f64, f64)> {
        let d = Point::new(b.x - a.x, b.y - a.y);
        let mut t0 = 0.0_f64;
        let mut t1 = 1.0_f64;
        let checks = [
            (-d.x, a.x - self.min.x),
            (d.x, self.max.x - a.x),
            (-d.y, a.y - self.min.y),
            (d.y, self.max.y - a.y),
        ];
        for (p, q) in checks {
            if p == 0.0 {
                if q < 0.0 {
                    return None;
                }
            } else {
                let t = q / p;
                if p < 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
                if t0 > t1 {
                    return None;
                }
            }
        }
        Some((t0, t1))
    }
}

/// Chord of a segment through a disc, expressed in arc length along the
/// segment measured from its start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscChord {
    /// Arc length of the closest approach to the disc center (may lie outside
    /// the segment).
    pub closest: f64,
    /// Perpendicular distance from the disc center to the segment's line.
    pub offset: f64,
    /// Chord interval, clipped to `[0, length]`.
    pub enter: f64,
    pub exit: f64,
}

/// Intersects the segment `a → b` with the closed disc `(center, radius)`.
pub fn segment_disc_chord(a: Point, b: Point, center: Point, radius: f64) -> Option<DiscChord> {
    let len = a.distance(b);
    if len == 0.0 {
        return None;
    }
    let ux = (b.x - a.x) / len;
    let uy = (b.y - a.y) / len;
    let cx = center.x - a.x;
    let cy = center.y - a.y;
    let closest = cx * ux + cy * uy;
    let offset = (cx * uy - cy * ux).abs();
    if offset > radius {
        return None;
    }
    let half = (radius * radius - offset * offset).max(0.0).sqrt();
    let enter = (closest - half).max(0.0);
    let exit = (closest + half).min(len);
    if enter > exit {
        return None;
    }
    Some(DiscChord {
        closest,
        offset,
        enter,
        exit,
    })
}

//! Path-loss components at 28 GHz and the empirical `A + 10·B·log10(d)` fit.
//!
//! Total loss is the probability-weighted mix of the LoS (free-space),
//! building-NLoS and tree-NLoS components. Tree loss is free-space loss plus
//! the leaf-scenario excess attenuation, whose illuminated area is limited
//! by the first Fresnel zone or the foliage width, whichever is smaller.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::{DistanceStats, PLoSCurve};
use crate::rng::{substream, Stream};

pub const SPEED_OF_LIGHT_M_PER_NS: f64 = 0.299_792_458;
pub const DEFAULT_FREQ_GHZ: f64 = 28.0;
/// Near-receiver vegetation distance range `d2` (m).
pub const TREE_TO_USER_RANGE: (f64, f64) = (4.0, 8.0);
/// Foliage radius assumed when composing binned path loss (mean of U(0.5, 1.5)).
pub const MEAN_TREE_RADIUS: f64 = 1.0;
pub const MIN_FOLIAGE_DEPTH: f64 = 0.5;

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be > 0, got {v}")))
    }
}

/// Free-space loss at 28 GHz: `61.4 + 20·log10(d)`.
pub fn fspl(d: f64) -> Result<f64> {
    positive("distance", d)?;
    Ok(61.4 + 20.0 * d.log10())
}

/// Building-obstructed loss at 28 GHz: `72 + 29.2·log10(d)`.
pub fn pl_nlos_building(d: f64) -> Result<f64> {
    positive("distance", d)?;
    Ok(72.0 + 29.2 * d.log10())
}

pub fn wavelength(freq_ghz: f64) -> f64 {
    SPEED_OF_LIGHT_M_PER_NS / freq_ghz
}

/// First Fresnel zone radius `√(λ·d1·d2 / (d1 + d2))`.
pub fn fresnel_radius(lambda: f64, d1: f64, d2: f64) -> Result<f64> {
    positive("wavelength", lambda)?;
    positive("d1", d1)?;
    positive("d2", d2)?;
    Ok((lambda * (d1 * d2) / (d1 + d2)).sqrt())
}

/// `min(2·r_F, 2·r_T)²`.
pub fn min_illumination_area(r_f: f64, r_t: f64) -> Result<f64> {
    positive("Fresnel radius", r_f)?;
    positive("tree radius", r_t)?;
    let side = (2.0 * r_f).min(2.0 * r_t);
    Ok(side * side)
}

/// Leaf-scenario vegetation constants plus the carrier frequency.
///
/// `R0 = a·f` and `R∞ = b/f^c` take f in GHz; the `1 − exp(−Rf·f)` term of
/// the k factor takes f in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VegetationParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub k0: f64,
    pub rf: f64,
    pub a0: f64,
    pub freq_ghz: f64,
}

impl Default for VegetationParams {
    fn default() -> Self {
        VegetationParams {
            a: 0.2,
            b: 1.27,
            c: 0.63,
            k0: 6.57,
            rf: 0.0002,
            a0: 10.0,
            freq_ghz: DEFAULT_FREQ_GHZ,
        }
    }
}

impl VegetationParams {
    pub fn validate(&self) -> Result<()> {
        for (n, v) in [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("k0", self.k0),
            ("Rf", self.rf),
            ("A0", self.a0),
            ("frequency", self.freq_ghz),
        ] {
            positive(n, v)?;
        }
        Ok(())
    }

    /// Initial slope `R0` (dB/m).
    pub fn initial_slope(&self) -> f64 {
        self.a * self.freq_ghz
    }

    /// Final slope `R∞` (dB/m).
    pub fn final_slope(&self) -> f64 {
        self.b / self.freq_ghz.powf(self.c)
    }

    /// Attenuation factor `k` (dB) for illuminated area `a_min` (m²).
    pub fn k_factor(&self, a_min: f64) -> f64 {
        let freq_mhz = self.freq_ghz * 1.0e3;
        let area_term = self.a0 * (1.0 - (-a_min / self.a0).exp());
        let freq_term = 1.0 - (-self.rf * freq_mhz).exp();
        self.k0 - 10.0 * (area_term * freq_term).log10()
    }

    pub fn wavelength(&self) -> f64 {
        wavelength(self.freq_ghz)
    }
}

/// Geometry of one foliage traversal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VegGeometry {
    /// ABS to tree (m).
    pub d1: f64,
    /// Tree to user (m).
    pub d2: f64,
    /// Foliage depth traversed (m).
    pub d_t: f64,
    /// Foliage radius (m).
    pub r_t: f64,
    /// Wavelength (m).
    pub lambda: f64,
}

impl VegGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("d1", self.d1)?;
        positive("d2", self.d2)?;
        positive("r_T", self.r_t)?;
        positive("wavelength", self.lambda)?;
        if !(self.d_t >= 0.0 && self.d_t <= 2.0 * self.r_t) {
            return Err(Error::domain(format!(
                "foliage depth {} outside [0, 2·r_T = {}]",
                self.d_t,
                2.0 * self.r_t
            )));
        }
        Ok(())
    }
}

/// Excess attenuation through foliage:
/// `R∞·d_t + k·(1 − exp(−(R0 − R∞)·d_t / k))`.
pub fn veg_attenuation(geom: &VegGeometry, params: &VegetationParams) -> Result<f64> {
    geom.validate()?;
    params.validate()?;
    let r_f = fresnel_radius(geom.lambda, geom.d1, geom.d2)?;
    let a_min = min_illumination_area(r_f, geom.r_t)?;
    let k = params.k_factor(a_min);
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Model(format!(
            "attenuation factor k = {k} dB is not positive; check frequency units"
        )));
    }
    let r0 = params.initial_slope();
    let r_inf = params.final_slope();
    let d = geom.d_t;
    Ok(r_inf * d + k * (1.0 - (-(r0 - r_inf) * d / k).exp()))
}

/// Tree-obstructed loss: free-space loss plus foliage attenuation.
pub fn pl_nlos_tree(d: f64, geom: &VegGeometry, params: &VegetationParams) -> Result<f64> {
    Ok(fspl(d)? + veg_attenuation(geom, params)?)
}

/// Inputs to one composite path-loss evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositePLInput {
    /// `[p_los, p_nlos_b, p_nlos_t, p_nlos_s]`.
    pub partition: [f64; 4],
    /// 3-D ABS–GU distance (m).
    pub distance: f64,
    /// Needed only when `p_nlos_t > 0`.
    pub vegetation: Option<VegGeometry>,
    /// Add the streetlight term (free-space loss with no excess).
    pub include_streetlights: bool,
}

/// Probability-weighted path loss.
///
/// With streetlights excluded their probability mass is dropped and the
/// remaining weights are renormalised.
pub fn composite_pl(input: &CompositePLInput, params: &VegetationParams) -> Result<f64> {
    let [p_los, p_b, p_t, p_s] = input.partition;
    if input.partition.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::Aggregation(format!(
            "probabilities {:?} outside [0, 1]",
            input.partition
        )));
    }
    let sum: f64 = input.partition.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::Aggregation(format!(
            "probabilities sum to {sum}, not 1"
        )));
    }
    let d = input.distance;
    let los = fspl(d)?;
    let mut acc = p_los * los + p_b * pl_nlos_building(d)?;
    let mut weight = p_los + p_b;
    if p_t > 0.0 {
        let geom = input.vegetation.ok_or_else(|| {
            Error::Aggregation("tree NLoS probability given without vegetation geometry".into())
        })?;
        acc += p_t * pl_nlos_tree(d, &geom, params)?;
    }
    weight += p_t;
    if input.include_streetlights {
        acc += p_s * los;
        weight += p_s;
    }
    if weight <= 0.0 {
        // Everything was streetlight-blocked and the term is excluded.
        return Ok(los);
    }
    Ok(acc / weight)
}

/// How foliage geometry is drawn when only binned probabilities are known.
///
/// Per bin: `d2 ~ U(4, 8)` m (at most half the distance), `d1 = d − d2`,
/// `r_T` fixed at the mean foliage radius, `d_t ~ U(0.5, 2·r_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VegPolicy {
    pub seed: u64,
    pub r_t: f64,
    pub include_streetlights: bool,
}

impl Default for VegPolicy {
    fn default() -> Self {
        VegPolicy {
            seed: 0,
            r_t: MEAN_TREE_RADIUS,
            include_streetlights: false,
        }
    }
}

impl VegPolicy {
    /// Foliage geometry for sample `index` at distance `d`.
    pub fn geometry(&self, index: u64, d: f64, params: &VegetationParams) -> VegGeometry {
        let mut rng = substream(self.seed, Stream::Vegetation, index);
        let d2: f64 = rng.random_range(TREE_TO_USER_RANGE.0..TREE_TO_USER_RANGE.1);
        let d2 = d2.min(0.5 * d);
        let d_t = rng.random_range(MIN_FOLIAGE_DEPTH..=2.0 * self.r_t);
        VegGeometry {
            d1: d - d2,
            d2,
            d_t,
            r_t: self.r_t,
            lambda: params.wavelength(),
        }
    }
}

/// One point of a path-loss-versus-distance table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlPoint {
    pub distance: f64,
    pub pl: f64,
    pub weight: f64,
}

/// Composite path loss at every distance-bin center, weighted by the bin's
/// sample count.
pub fn composite_table(
    stats: &DistanceStats,
    params: &VegetationParams,
    policy: &VegPolicy,
) -> Result<Vec<PlPoint>> {
    stats
        .bins
        .iter()
        .map(|bin| {
            let d = bin.center();
            let key = (bin.lo / stats.bin_width).round() as u64;
            let input = CompositePLInput {
                partition: bin.partition(),
                distance: d,
                vegetation: Some(policy.geometry(key, d, params)),
                include_streetlights: policy.include_streetlights,
            };
            Ok(PlPoint {
                distance: d,
                pl: composite_pl(&input, params)?,
                weight: bin.count as f64,
            })
        })
        .collect()
}

/// Composite path loss against elevation for an ABS at fixed altitude:
/// `d = (h_abs − h_gu)/sin θ`. θ = 0 is skipped.
pub fn pl_vs_theta(
    h_abs: f64,
    h_gu: f64,
    curve: &PLoSCurve,
    params: &VegetationParams,
    policy: &VegPolicy,
) -> Result<Vec<(f64, f64, f64)>> {
    if !(h_abs > h_gu) {
        return Err(Error::domain(format!("ABS altitude {h_abs} not above user height {h_gu}")));
    }
    curve
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.theta_deg > 0.0)
        .map(|(i, r)| {
            let d = (h_abs - h_gu) / r.theta_deg.to_radians().sin();
            let input = CompositePLInput {
                partition: r.partition(),
                distance: d,
                vegetation: Some(policy.geometry(i as u64, d, params)),
                include_streetlights: policy.include_streetlights,
            };
            Ok((r.theta_deg, d, composite_pl(&input, params)?))
        })
        .collect()
}

/// Result of an `A + 10·B·log10(d)` fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub rmse: f64,
    pub n_points: usize,
}

/// Ordinary least squares of `pl` on `10·log10(d)`.
pub fn fit_ab(samples: &[(f64, f64)]) -> Result<FitResult> {
    let pts: Vec<PlPoint> = samples
        .iter()
        .map(|&(distance, pl)| PlPoint {
            distance,
            pl,
            weight: 1.0,
        })
        .collect();
    fit_ab_weighted(&pts)
}

/// Weighted least squares of `pl` on `10·log10(d)`; the RMSE is the
/// weighted root-mean-square residual.
pub fn fit_ab_weighted(points: &[PlPoint]) -> Result<FitResult> {
    for p in points {
        positive("distance", p.distance)?;
        if !(p.weight >= 0.0) {
            return Err(Error::domain(format!("negative weight {}", p.weight)));
        }
    }
    let sw: f64 = points.iter().map(|p| p.weight).sum();
    if !(sw > 0.0) {
        return Err(Error::RankDeficient("no weighted points".into()));
    }
    let x = |p: &PlPoint| 10.0 * p.distance.log10();
    let mx = points.iter().map(|p| p.weight * x(p)).sum::<f64>() / sw;
    let my = points.iter().map(|p| p.weight * p.pl).sum::<f64>() / sw;
    let sxx: f64 = points.iter().map(|p| p.weight * (x(p) - mx).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| p.weight * (x(p) - mx) * (p.pl - my))
        .sum();
    if !(sxx > 1e-12 * sw) {
        return Err(Error::RankDeficient("all distances are equal".into()));
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let sse: f64 = points
        .iter()
        .map(|p| p.weight * (p.pl - a - b * x(p)).powi(2))
        .sum();
    Ok(FitResult {
        a,
        b,
        rmse: (sse / sw).sqrt(),
        n_points: points.len(),
    })
}

/// Median and 95th percentile of paired path-loss differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtraLoss {
    pub median: f64,
    pub p95: f64,
}

/// Linear-interpolation percentile of an ascending slice.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Distribution of `PL_with − PL_without` over paired table points.
pub fn median_extra_loss(with: &[PlPoint], without: &[PlPoint]) -> Result<ExtraLoss> {
    if with.len() != without.len() || with.is_empty() {
        return Err(Error::Aggregation(format!(
            "unpaired path-loss tables ({} vs {} points)",
            with.len(),
            without.len()
        )));
    }
    let mut diffs = with
        .iter()
        .zip(without)
        .map(|(a, b)| {
            if (a.distance - b.distance).abs() > 1e-9 * a.distance.max(1.0) {
                Err(Error::Aggregation(format!(
                    "unpaired distances {} and {}",
                    a.distance, b.distance
                )))
            } else {
                Ok(a.pl - b.pl)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    diffs.sort_by(f64::total_cmp);
    Ok(ExtraLoss {
        median: percentile(&diffs, 0.5),
        p95: percentile(&diffs, 0.95),
    })
}

//! Ball tables and finite-scale growth estimators.
//!
//! The growth rates are limits inferior, which no finite computation can
//! reach. The estimators here use the minimum over a tail window of radii as
//! the finite-scale stand-in for `liminf`, and report the window they used.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::family::SphereVolume;
use crate::graph::WeightedGraph;
use crate::metrics::{metric_from, EdgeLengths, MetricError, PseudoMetric};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GrowthError {
    #[error("grid step must be positive, got {0}")]
    BadStep(f64),
    #[error("window [{lo}, {hi}] is empty or reversed")]
    BadWindow { lo: f64, hi: f64 },
    #[error("window [{lo}, {hi}] contains no positive radius of the table (table covers [0, {max}])")]
    WindowOutsideTable { lo: f64, hi: f64, max: f64 },
    #[error("window [{lo}, {hi}] holds {rows} rows; at least 3 are needed for a slope")]
    DegenerateWindow { lo: f64, hi: f64, rows: usize },
    #[error("polynomial exponent needs r_lo ≥ 2, got {0}")]
    WindowTooLow(f64),
    #[error("non-positive volume at r = {0}")]
    EmptyBall(f64),
    #[error("no center has its r_max-ball inside the truncation")]
    NoCenters,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Closed radius window `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self, GrowthError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi && lo >= 0.0 {
            Ok(Window { lo, hi })
        } else {
            Err(GrowthError::BadWindow { lo, hi })
        }
    }

    /// Default tail window `[r_max / 2, r_max]`.
    pub fn tail(r_max: f64) -> Self {
        Window { lo: r_max / 2.0, hi: r_max }
    }

    fn contains(&self, r: f64) -> bool {
        let eps = 1e-9 * self.hi.abs().max(1.0);
        r >= self.lo - eps && r <= self.hi + eps
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

impl std::str::FromStr for Window {
    type Err = String;

    /// `LO:HI`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
        let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        Window::new(p(lo)?, p(hi)?).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRow {
    pub r: f64,
    pub count: u64,
    pub volume: f64,
}

/// Cumulative `|B_r|` and `m(B_r)` on a radius grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallTable {
    pub label: String,
    pub rows: Vec<BallRow>,
}

// Membership slack for accumulated floating-point distances; purely
// relative, so rescaling by a power of two leaves membership unchanged.
const BALL_SLACK: f64 = 1e-12;

fn in_ball(d: f64, r: f64) -> bool {
    d <= r * (1.0 + BALL_SLACK)
}

/// Sorted `(dist, measure)` prefix structure for repeated ball queries.
struct BallIndex {
    dist: Vec<f64>,
    prefix: Vec<f64>,
}

impl BallIndex {
    fn new(metric: &PseudoMetric, measure: &[f64]) -> Self {
        let mut pts: Vec<(f64, f64)> = metric
            .dist
            .iter()
            .zip(measure)
            .filter_map(|(d, &m)| d.map(|d| (d, m)))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        let prefix = pts
            .iter()
            .map(|p| {
                acc += p.1;
                acc
            })
            .collect();
        BallIndex { dist: pts.into_iter().map(|p| p.0).collect(), prefix }
    }

    fn ball(&self, r: f64) -> (u64, f64) {
        let k = self.dist.partition_point(|&d| in_ball(d, r));
        (k as u64, if k == 0 { 0.0 } else { self.prefix[k - 1] })
    }
}

fn grid(r_max: f64, step: f64) -> Vec<f64> {
    let steps = (r_max / step * (1.0 + 1e-12)).floor() as usize;
    (0..=steps).map(|k| k as f64 * step).collect()
}

/// Ball table for radii `0, step, 2·step, … ≤ r_max` by thresholding the
/// metric's distances.
pub fn ball_table(
    g: &WeightedGraph,
    metric: &PseudoMetric,
    r_max: f64,
    step: f64,
) -> Result<BallTable, GrowthError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(GrowthError::BadStep(step));
    }
    let index = BallIndex::new(metric, g.measure());
    let rows = grid(r_max, step)
        .into_iter()
        .map(|r| {
            let (count, volume) = index.ball(r);
            BallRow { r, count, volume }
        })
        .collect();
    Ok(BallTable { label: format!("{}@{}", metric.rule, metric.root), rows })
}

impl BallTable {
    /// Table on the integer grid from analytic sphere volumes.
    pub fn from_sphere_volumes(label: impl Into<String>, spheres: &[SphereVolume]) -> Self {
        BallTable {
            label: label.into(),
            rows: spheres
                .iter()
                .map(|s| BallRow { r: s.r as f64, count: s.ball_count, volume: s.ball_volume })
                .collect(),
        }
    }

    pub fn r_max(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.r)
    }

    fn window_rows(&self, w: Window) -> Result<Vec<BallRow>, GrowthError> {
        let rows: Vec<BallRow> =
            self.rows.iter().filter(|row| row.r > 0.0 && w.contains(row.r)).copied().collect();
        if rows.is_empty() {
            Err(GrowthError::WindowOutsideTable { lo: w.lo, hi: w.hi, max: self.r_max() })
        } else {
            Ok(rows)
        }
    }

    fn volume_at(&self, r: f64) -> Option<f64> {
        self.rows.iter().find(|row| (row.r - r).abs() <= 1e-9 * r.max(1.0)).map(|row| row.volume)
    }

    /// CSV with header `r,count,volume`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,count,volume\n");
        for row in &self.rows {
            out.push_str(&format!("{},{},{}\n", row.r, row.count, row.volume));
        }
        out
    }
}

/// `min_{r ∈ window} (1/r) log m(B_r)`.
pub fn mu_estimate(table: &BallTable, window: Window) -> Result<f64, GrowthError> {
    let mut best = f64::INFINITY;
    for row in table.window_rows(window)? {
        if row.volume <= 0.0 {
            return Err(GrowthError::EmptyBall(row.r));
        }
        best = best.min(row.volume.ln() / row.r);
    }
    Ok(best)
}

/// `max_{r ∈ window} (1/r) log m(B_r)`, the limsup-side surrogate.
pub fn mu_limsup_estimate(table: &BallTable, window: Window) -> Result<f64, GrowthError> {
    let mut best = f64::NEG_INFINITY;
    for row in table.window_rows(window)? {
        if row.volume <= 0.0 {
            return Err(GrowthError::EmptyBall(row.r));
        }
        best = best.max(row.volume.ln() / row.r);
    }
    Ok(best)
}

/// `min_{r ∈ window} (1/r) log(m(B_r) / m(B_1))`: the per-center quantity of
/// the minimal growth rate, evaluated on one table.
pub fn mu_normalized_estimate(table: &BallTable, window: Window) -> Result<f64, GrowthError> {
    let unit = table.volume_at(1.0).ok_or(GrowthError::WindowOutsideTable {
        lo: 1.0,
        hi: 1.0,
        max: table.r_max(),
    })?;
    if unit <= 0.0 {
        return Err(GrowthError::EmptyBall(1.0));
    }
    let mut best = f64::INFINITY;
    for row in table.window_rows(window)? {
        best = best.min((row.volume / unit).ln() / row.r);
    }
    Ok(best)
}

/// Least-squares slope of `log m(B_r)` against `r` over the window.
///
/// Insensitive to constant prefactors in the volume, unlike [`mu_estimate`].
pub fn mu_slope_estimate(table: &BallTable, window: Window) -> Result<f64, GrowthError> {
    let rows = table.window_rows(window)?;
    if rows.len() < 3 {
        return Err(GrowthError::DegenerateWindow { lo: window.lo, hi: window.hi, rows: rows.len() });
    }
    let mut pts = Vec::with_capacity(rows.len());
    for row in &rows {
        if row.volume <= 0.0 {
            return Err(GrowthError::EmptyBall(row.r));
        }
        pts.push((row.r, row.volume.ln()));
    }
    Ok(ls_slope(&pts))
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Least-squares slope of `log |B_r|` against `log r` over the window.
pub fn beta_estimate(table: &BallTable, window: Window) -> Result<f64, GrowthError> {
    if window.lo < 2.0 {
        return Err(GrowthError::WindowTooLow(window.lo));
    }
    let rows = table.window_rows(window)?;
    if rows.len() < 3 {
        return Err(GrowthError::DegenerateWindow { lo: window.lo, hi: window.hi, rows: rows.len() });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|row| ((row.r).ln(), (row.count.max(1) as f64).ln()))
        .collect();
    Ok(ls_slope(&pts))
}

/// `max_{r ∈ window} |B_r| / r³`, the finite-scale stand-in for the cubic
/// limsup condition.
pub fn cubic_ratio_max(table: &BallTable, window: Window) -> Result<f64, GrowthError> {
    Ok(table
        .window_rows(window)?
        .iter()
        .map(|row| row.count as f64 / row.r.powi(3))
        .fold(0.0, f64::max))
}

/// Growth relative to the cubic threshold for the hop metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CubicClass {
    /// Bottom of spectrum and of essential spectrum vanish.
    Subcubic,
    /// Essential spectrum has finite bottom.
    Cubic,
    /// No conclusion from growth alone.
    Supercubic,
}

impl CubicClass {
    /// `beta < 3 − band` is subcubic, `beta > 3 + band` supercubic.
    pub fn classify(beta: f64, band: f64) -> Self {
        if beta < 3.0 - band {
            CubicClass::Subcubic
        } else if beta > 3.0 + band {
            CubicClass::Supercubic
        } else {
            CubicClass::Cubic
        }
    }

    pub fn conclusion(self) -> &'static str {
        match self {
            CubicClass::Subcubic => "subcubic growth: bottom of spectrum and of essential spectrum are 0",
            CubicClass::Cubic => "cubic growth: bottom of the essential spectrum is finite",
            CubicClass::Supercubic => {
                "supercubic growth: no conclusion (antitrees of this growth are known to have positive bottom of spectrum and empty essential spectrum)"
            }
        }
    }
}

pub const DEFAULT_CUBIC_BAND: f64 = 0.15;
pub const DEFAULT_CENTER_CAP: usize = 256;

/// Result of the sampled minimal-growth estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuTildeEstimate {
    pub value: f64,
    pub centers_used: Vec<usize>,
    pub centers_skipped: Vec<usize>,
    /// `(r, inf over centers)` for every grid radius in the window.
    pub profile: Vec<(f64, f64)>,
}

/// Deterministic sample of up to `cap` non-boundary vertices, evenly spaced
/// in index order.
pub fn default_centers(g: &WeightedGraph, cap: usize) -> Vec<usize> {
    let interior: Vec<usize> = (0..g.n()).filter(|&x| !g.is_boundary(x)).collect();
    if interior.len() <= cap || cap == 0 {
        return interior;
    }
    (0..cap).map(|k| interior[k * interior.len() / cap]).collect()
}

/// Minimal exponential growth from sampled centers.
///
/// A center is skipped (and listed) when some boundary vertex lies closer
/// than `r_max`, since its large balls would be cut by the truncation.
pub fn mu_tilde_estimate(
    g: &WeightedGraph,
    lengths: &EdgeLengths,
    centers: &[usize],
    r_max: f64,
    window: Window,
    step: f64,
    exec: Exec,
) -> Result<MuTildeEstimate, GrowthError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(GrowthError::BadStep(step));
    }
    let radii: Vec<f64> =
        grid(r_max, step).into_iter().filter(|&r| r > 0.0 && window.contains(r)).collect();
    if radii.is_empty() {
        return Err(GrowthError::WindowOutsideTable { lo: window.lo, hi: window.hi, max: r_max });
    }
    for &c in centers {
        g.check_vertex(c).map_err(MetricError::from)?;
    }

    let per_center = exec.map(centers, |&c| -> Result<Option<Vec<f64>>, GrowthError> {
        let metric = metric_from(g, lengths, c)?;
        if metric.boundary_distance(g).is_some_and(|d| d < r_max) {
            return Ok(None);
        }
        let index = BallIndex::new(&metric, g.measure());
        let unit = index.ball(1.0).1;
        Ok(Some(radii.iter().map(|&r| (index.ball(r).1 / unit).ln() / r).collect()))
    });

    let mut used = Vec::new();
    let mut skipped = Vec::new();
    let mut inf = vec![f64::INFINITY; radii.len()];
    for (&c, res) in centers.iter().zip(per_center) {
        match res? {
            Some(vals) => {
                used.push(c);
                for (acc, v) in inf.iter_mut().zip(vals) {
                    *acc = acc.min(v);
                }
            }
            None => skipped.push(c),
        }
    }
    if used.is_empty() {
        return Err(GrowthError::NoCenters);
    }
    let value = inf.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(MuTildeEstimate {
        value,
        centers_used: used,
        centers_skipped: skipped,
        profile: radii.into_iter().zip(inf).collect(),
    })
}

/// Growth summary for one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub mu_hat: f64,
    pub mu_limsup_hat: f64,
    pub mu_slope_hat: Option<f64>,
    pub mu_tilde_hat: Option<f64>,
    pub beta_hat: Option<f64>,
    pub window: Window,
    pub method: String,
    pub centers: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{MeasureRule, ResourceCaps, SphereProfile, SphericallySymmetricFamily};
    use crate::graph::Edge;
    use crate::metrics::natural_distance;

    fn line_table(r_max: usize) -> BallTable {
        let fam = SphericallySymmetricFamily::line(MeasureRule::Unit);
        BallTable::from_sphere_volumes("line", &fam.sphere_volumes(r_max))
    }

    #[test]
    fn p3_table() {
        let g = WeightedGraph::from_parts(3, vec![Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)], vec![1.0; 3])
            .unwrap();
        let t = ball_table(&g, &natural_distance(&g, 0).unwrap(), 2.0, 1.0).unwrap();
        let rows: Vec<_> = t.rows.iter().map(|r| (r.r, r.count, r.volume)).collect();
        assert_eq!(rows, vec![(0.0, 1, 1.0), (1.0, 2, 2.0), (2.0, 3, 3.0)]);
    }

    #[test]
    fn antitree_table_matches_analytic() {
        let fam =
            SphericallySymmetricFamily::antitree(SphereProfile::Poly(2), MeasureRule::Unit).unwrap();
        let g = fam.truncate(4, &ResourceCaps::default()).unwrap();
        let t = ball_table(&g, &natural_distance(&g, 0).unwrap(), 4.0, 1.0).unwrap();
        assert_eq!(t.rows[3].volume, 30.0);
        let analytic = BallTable::from_sphere_volumes("natural@0", &fam.sphere_volumes(4));
        assert_eq!(t.rows, analytic.rows);
    }

    #[test]
    fn line_mu_example() {
        let mu = mu_estimate(&line_table(20), Window::new(10.0, 20.0).unwrap()).unwrap();
        approx::assert_relative_eq!(mu, 41f64.ln() / 20.0, epsilon = 1e-15);
        approx::assert_relative_eq!(mu, 0.1857, epsilon = 1e-4);
    }

    #[test]
    fn binary_tree_mu() {
        let fam = SphericallySymmetricFamily::tree(SphereProfile::Geom(2), MeasureRule::Unit).unwrap();
        let t = BallTable::from_sphere_volumes("tree", &fam.sphere_volumes(20));
        let mu = mu_estimate(&t, Window::new(10.0, 20.0).unwrap()).unwrap();
        assert!((mu - 2f64.ln()).abs() < 0.05, "{mu}");
        approx::assert_relative_eq!(mu, ((1u64 << 21) as f64 - 1.0).ln() / 20.0, epsilon = 1e-15);
    }

    #[test]
    fn limsup_dominates_liminf() {
        let t = line_table(40);
        let w = Window::new(20.0, 40.0).unwrap();
        let lo = mu_estimate(&t, w).unwrap();
        let hi = mu_limsup_estimate(&t, w).unwrap();
        approx::assert_relative_eq!(hi, 41f64.ln() / 20.0, epsilon = 1e-15);
        assert!(lo < hi);
    }

    #[test]
    fn slope_ignores_prefactor() {
        let t = BallTable {
            label: "exp".into(),
            rows: (0..=30).map(|r| BallRow { r: r as f64, count: 1, volume: 7.0 * 3f64.powi(r) }).collect(),
        };
        let s = mu_slope_estimate(&t, Window::new(10.0, 16.0).unwrap()).unwrap();
        approx::assert_relative_eq!(s, 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn constant_volume_decays_with_window() {
        let t = BallTable {
            label: "const".into(),
            rows: (0..=100).map(|r| BallRow { r: r as f64, count: 5, volume: 5.0 }).collect(),
        };
        let a = mu_estimate(&t, Window::new(5.0, 10.0).unwrap()).unwrap();
        let b = mu_estimate(&t, Window::new(50.0, 100.0).unwrap()).unwrap();
        approx::assert_relative_eq!(a, 5f64.ln() / 10.0);
        assert!(b < a);
    }

    #[test]
    fn window_errors() {
        let t = line_table(10);
        assert!(matches!(
            mu_estimate(&t, Window::new(20.0, 30.0).unwrap()),
            Err(GrowthError::WindowOutsideTable { .. })
        ));
        assert!(matches!(
            beta_estimate(&t, Window::new(1.0, 10.0).unwrap()),
            Err(GrowthError::WindowTooLow(_))
        ));
        assert!(matches!(
            beta_estimate(&t, Window::new(9.0, 10.0).unwrap()),
            Err(GrowthError::DegenerateWindow { rows: 2, .. })
        ));
        assert!(Window::new(3.0, 2.0).is_err());
        assert_eq!("10:20".parse::<Window>().unwrap(), Window { lo: 10.0, hi: 20.0 });
    }

    #[test]
    fn beta_examples() {
        let w = Window::new(50.0, 200.0).unwrap();
        let beta = beta_estimate(&line_table(200), w).unwrap();
        assert!((beta - 1.0).abs() < 0.05, "{beta}");
        for (k, expect) in [(2u32, 3.0), (3, 4.0)] {
            let fam =
                SphericallySymmetricFamily::antitree(SphereProfile::Poly(k), MeasureRule::Unit).unwrap();
            let t = BallTable::from_sphere_volumes("at", &fam.sphere_volumes(200));
            let beta = beta_estimate(&t, w).unwrap();
            assert!((beta - expect).abs() < 0.15, "poly:{k} gave {beta}");
        }
    }

    #[test]
    fn classification_band() {
        assert_eq!(CubicClass::classify(2.0, 0.15), CubicClass::Subcubic);
        assert_eq!(CubicClass::classify(2.95, 0.15), CubicClass::Cubic);
        assert_eq!(CubicClass::classify(3.9, 0.15), CubicClass::Supercubic);
    }

    #[test]
    fn mu_tilde_on_line_matches_normalized_root_estimate() {
        let fam = SphericallySymmetricFamily::line(MeasureRule::Unit);
        let g = fam.truncate(60, &ResourceCaps::default()).unwrap();
        let lengths = EdgeLengths::natural(&g);
        let w = Window::new(10.0, 20.0).unwrap();
        let est = mu_tilde_estimate(&g, &lengths, &[0, 5, 6, 99], 20.0, w, 1.0, Exec::default())
            .unwrap();
        // vertices 5 and 6 are ±3; vertex 99 is −50, ten steps from the boundary
        assert_eq!(est.centers_used, vec![0, 5, 6]);
        assert_eq!(est.centers_skipped, vec![99]);
        let root = mu_normalized_estimate(&line_table(20), w).unwrap();
        approx::assert_relative_eq!(est.value, root, epsilon = 1e-15);
    }

    #[test]
    fn mu_tilde_requires_a_center() {
        let fam = SphericallySymmetricFamily::line(MeasureRule::Unit);
        let g = fam.truncate(5, &ResourceCaps::default()).unwrap();
        let err = mu_tilde_estimate(
            &g,
            &EdgeLengths::natural(&g),
            &[0],
            10.0,
            Window::new(5.0, 10.0).unwrap(),
            1.0,
            Exec::Sequential,
        )
        .unwrap_err();
        assert_eq!(err, GrowthError::NoCenters);
    }

    #[test]
    fn default_centers_stride() {
        let fam = SphericallySymmetricFamily::line(MeasureRule::Unit);
        let g = fam.truncate(300, &ResourceCaps::default()).unwrap();
        let c = default_centers(&g, 256);
        assert_eq!(c.len(), 256);
        assert!(c.iter().all(|&x| !g.is_boundary(x)));
        assert_eq!(default_centers(&g, 1000).len(), 599);
    }
}

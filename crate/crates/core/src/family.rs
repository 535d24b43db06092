//! Rule-based infinite graphs organised in distance spheres around a root,
//! with analytic sphere sizes and finite truncations.
//!
//! Vertex order in a truncation is canonical: spheres in increasing radius,
//! vertices inside a sphere in creation order. Truncating at `R` and at
//! `R + 1` therefore agree on every sphere below `R`.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{Edge, GraphError, WeightedGraph};

/// Sphere-size rule `r ↦ s_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", content = "value", rename_all = "lowercase")]
pub enum SphereProfile {
    /// `s_r = (r + 1)^k`.
    Poly(u32),
    /// `s_0 = 1`, `s_r = c` for `r ≥ 1`.
    Const(u64),
    /// `s_r = b^r`.
    Geom(u64),
    /// `s_0 = 1`, `s_r = d (d − 1)^{r−1}`: the `d`-regular tree.
    Regular(u64),
    /// Explicit prefix; the last entry repeats.
    List(Vec<u64>),
}

impl SphereProfile {
    pub fn size(&self, r: usize) -> u64 {
        match self {
            SphereProfile::Poly(k) => (r as u64 + 1).saturating_pow(*k),
            SphereProfile::Const(c) => {
                if r == 0 {
                    1
                } else {
                    *c
                }
            }
            SphereProfile::Geom(b) => b.saturating_pow(r.min(u32::MAX as usize) as u32),
            SphereProfile::Regular(d) => {
                if r == 0 {
                    1
                } else {
                    d.saturating_mul((d - 1).saturating_pow((r - 1).min(u32::MAX as usize) as u32))
                }
            }
            SphereProfile::List(v) => v[r.min(v.len() - 1)],
        }
    }

    fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidProfile(msg));
        match self {
            SphereProfile::Poly(_) => Ok(()),
            SphereProfile::Const(0) => bad("const:0 leaves spheres empty".into()),
            SphereProfile::Geom(0) => bad("geom:0 leaves spheres empty".into()),
            SphereProfile::Regular(d) if *d < 2 => bad(format!("regular:{d} needs degree ≥ 2")),
            SphereProfile::List(v) if v.is_empty() => bad("empty list".into()),
            SphereProfile::List(v) if v[0] != 1 => bad(format!("list must start with 1, got {}", v[0])),
            SphereProfile::List(v) => match v.iter().position(|&s| s == 0) {
                Some(r) => bad(format!("sphere {r} is empty")),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// A tree realizes the profile only if every `s_{r+1}` is a multiple of `s_r`.
    fn tree_ratio_ok(&self) -> Result<(), GraphError> {
        let ok = match self {
            SphereProfile::Poly(k) => *k == 0,
            SphereProfile::Const(_) | SphereProfile::Geom(_) | SphereProfile::Regular(_) => true,
            SphereProfile::List(v) => v.windows(2).all(|w| w[1] % w[0] == 0),
        };
        if ok {
            Ok(())
        } else {
            Err(GraphError::InvalidProfile(format!(
                "sphere sizes of {self} are not successive multiples; no tree realizes them"
            )))
        }
    }
}

impl fmt::Display for SphereProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SphereProfile::Poly(k) => write!(f, "poly:{k}"),
            SphereProfile::Const(c) => write!(f, "const:{c}"),
            SphereProfile::Geom(b) => write!(f, "geom:{b}"),
            SphereProfile::Regular(d) => write!(f, "regular:{d}"),
            SphereProfile::List(v) => {
                let items: Vec<String> = v.iter().map(u64::to_string).collect();
                write!(f, "list:[{}]", items.join(","))
            }
        }
    }
}

impl FromStr for SphereProfile {
    type Err = GraphError;

    /// Parses `poly:k`, `const:c`, `geom:b`, `regular:d` or `list:[a,b,...]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GraphError::InvalidProfile(format!("cannot parse sphere spec {s:?}"));
        let (head, arg) = s.trim().split_once(':').ok_or_else(bad)?;
        let int = |a: &str| a.trim().parse::<u64>().map_err(|_| bad());
        let p = match head.trim() {
            "poly" => SphereProfile::Poly(u32::try_from(int(arg)?).map_err(|_| bad())?),
            "const" => SphereProfile::Const(int(arg)?),
            "geom" => SphereProfile::Geom(int(arg)?),
            "regular" => SphereProfile::Regular(int(arg)?),
            "list" => {
                let body = arg.trim().strip_prefix('[').and_then(|a| a.strip_suffix(']'));
                let body = body.ok_or_else(bad)?;
                let v = body.split(',').map(int).collect::<Result<Vec<_>, _>>()?;
                SphereProfile::List(v)
            }
            _ => return Err(bad()),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Antitree,
    SphericallySymmetricTree,
    IntegerLatticeLine,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureRule {
    /// `m ≡ 1`.
    #[default]
    Unit,
    /// `m(x) = n(x)`, the weighted degree in the infinite graph.
    WeightedDegree,
}

impl FromStr for MeasureRule {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(MeasureRule::Unit),
            "degree" | "weighted-degree" => Ok(MeasureRule::WeightedDegree),
            _ => Err(GraphError::InvalidProfile(format!("unknown measure rule {s:?}"))),
        }
    }
}

/// Vertex and edge caps for materializing truncations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCaps {
    pub max_vertices: u64,
    pub max_edges: u64,
}

pub const MAX_VERTICES_ENV: &str = "SPECGROWTH_MAX_VERTICES";

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps { max_vertices: 5_000_000, max_edges: 50_000_000 }
    }
}

impl ResourceCaps {
    /// Defaults, with the vertex cap overridden by `SPECGROWTH_MAX_VERTICES`.
    pub fn from_env() -> Self {
        let mut caps = Self::default();
        if let Some(v) = std::env::var(MAX_VERTICES_ENV).ok().and_then(|s| s.trim().parse().ok()) {
            caps.max_vertices = v;
        }
        caps
    }

    fn check(&self, vertices: u64, edges: u64) -> Result<(), GraphError> {
        if vertices > self.max_vertices || edges > self.max_edges {
            Err(GraphError::ResourceCap {
                vertices,
                edges,
                max_vertices: self.max_vertices,
                max_edges: self.max_edges,
            })
        } else {
            Ok(())
        }
    }
}

/// One row of [`SphericallySymmetricFamily::sphere_volumes`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereVolume {
    pub r: usize,
    pub sphere_size: u64,
    /// `|B_r|`, saturating.
    pub ball_count: u64,
    /// `m(B_r)`.
    pub ball_volume: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericallySymmetricFamily {
    pub kind: FamilyKind,
    pub profile: SphereProfile,
    pub measure_rule: MeasureRule,
}

impl SphericallySymmetricFamily {
    /// Antitree: sphere `r` completely joined to sphere `r + 1`, no
    /// horizontal edges.
    pub fn antitree(profile: SphereProfile, measure_rule: MeasureRule) -> Result<Self, GraphError> {
        profile.validate()?;
        Ok(Self { kind: FamilyKind::Antitree, profile, measure_rule })
    }

    /// Tree in which every sphere-`r` vertex has `s_{r+1} / s_r` children.
    pub fn tree(profile: SphereProfile, measure_rule: MeasureRule) -> Result<Self, GraphError> {
        profile.validate()?;
        profile.tree_ratio_ok()?;
        Ok(Self { kind: FamilyKind::SphericallySymmetricTree, profile, measure_rule })
    }

    /// The integer line `ℤ` rooted at 0; sphere `r ≥ 1` is `{−r, r}`.
    pub fn line(measure_rule: MeasureRule) -> Self {
        Self {
            kind: FamilyKind::IntegerLatticeLine,
            profile: SphereProfile::Const(2),
            measure_rule,
        }
    }

    pub fn sphere_size(&self, r: usize) -> u64 {
        self.profile.size(r)
    }

    fn children(&self, r: usize) -> u64 {
        self.sphere_size(r + 1) / self.sphere_size(r)
    }

    /// Weighted degree of a sphere-`r` vertex in the infinite graph (`b ≡ 1`).
    pub fn vertex_degree(&self, r: usize) -> f64 {
        match self.kind {
            FamilyKind::Antitree => {
                let below = if r == 0 { 0 } else { self.sphere_size(r - 1) };
                (below as f64) + self.sphere_size(r + 1) as f64
            }
            FamilyKind::SphericallySymmetricTree => {
                let parent = if r == 0 { 0.0 } else { 1.0 };
                parent + self.children(r) as f64
            }
            FamilyKind::IntegerLatticeLine => 2.0,
        }
    }

    pub fn vertex_measure(&self, r: usize) -> f64 {
        match self.measure_rule {
            MeasureRule::Unit => 1.0,
            MeasureRule::WeightedDegree => self.vertex_degree(r),
        }
    }

    /// Edges joining sphere `r` to sphere `r + 1`.
    fn edges_between(&self, r: usize) -> u64 {
        match self.kind {
            FamilyKind::Antitree => self.sphere_size(r).saturating_mul(self.sphere_size(r + 1)),
            _ => self.sphere_size(r + 1),
        }
    }

    /// `(vertices, edges)` of the truncation at `radius`, saturating.
    pub fn truncation_size(&self, radius: usize) -> (u64, u64) {
        let vertices = (0..=radius).fold(0u64, |acc, r| acc.saturating_add(self.sphere_size(r)));
        let edges = (0..radius).fold(0u64, |acc, r| acc.saturating_add(self.edges_between(r)));
        (vertices, edges)
    }

    /// Index ranges of spheres `0..=radius` in the truncation.
    pub fn sphere_ranges(&self, radius: usize) -> Vec<Range<usize>> {
        let mut start = 0usize;
        (0..=radius)
            .map(|r| {
                let len = self.sphere_size(r) as usize;
                let range = start..start + len;
                start += len;
                range
            })
            .collect()
    }

    /// Ball sizes and volumes for `r = 0..=radius`, without building the graph.
    pub fn sphere_volumes(&self, radius: usize) -> Vec<SphereVolume> {
        let mut count = 0u64;
        let mut volume = 0.0;
        (0..=radius)
            .map(|r| {
                let s = self.sphere_size(r);
                count = count.saturating_add(s);
                volume += s as f64 * self.vertex_measure(r);
                SphereVolume { r, sphere_size: s, ball_count: count, ball_volume: volume }
            })
            .collect()
    }

    /// Materializes spheres `0..=radius` with all edges among them; `b ≡ 1`,
    /// measure per the family's rule (degrees of the infinite graph), the
    /// outermost sphere marked as boundary.
    pub fn truncate(&self, radius: usize, caps: &ResourceCaps) -> Result<WeightedGraph, GraphError> {
        let (nv, ne) = self.truncation_size(radius);
        caps.check(nv, ne)?;
        let ranges = self.sphere_ranges(radius);
        let n = nv as usize;

        let mut measure = Vec::with_capacity(n);
        let mut boundary = vec![false; n];
        for (r, range) in ranges.iter().enumerate() {
            measure.extend(std::iter::repeat_n(self.vertex_measure(r), range.len()));
        }
        for x in ranges[radius].clone() {
            boundary[x] = true;
        }

        let mut edges = Vec::with_capacity(ne as usize);
        for r in 0..radius {
            let (inner, outer) = (ranges[r].clone(), ranges[r + 1].clone());
            match self.kind {
                FamilyKind::Antitree => {
                    for u in inner {
                        edges.extend(outer.clone().map(|v| Edge::new(u, v, 1.0)));
                    }
                }
                FamilyKind::SphericallySymmetricTree => {
                    let c = self.children(r) as usize;
                    for (j, u) in inner.enumerate() {
                        let first = outer.start + j * c;
                        edges.extend((first..first + c).map(|v| Edge::new(u, v, 1.0)));
                    }
                }
                FamilyKind::IntegerLatticeLine => {
                    // sphere r ≥ 1 holds [−r, +r]; the root feeds both sides
                    for (side, v) in outer.enumerate() {
                        let u = if r == 0 { inner.start } else { inner.start + side };
                        edges.push(Edge::new(u, v, 1.0));
                    }
                }
            }
        }
        Ok(WeightedGraph::from_trusted(n, edges, measure, boundary))
    }
}

impl fmt::Display for SphericallySymmetricFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Antitree => write!(f, "antitree:{}", self.profile),
            FamilyKind::SphericallySymmetricTree => write!(f, "tree:{}", self.profile),
            FamilyKind::IntegerLatticeLine => write!(f, "line"),
        }
    }
}

impl FromStr for SphericallySymmetricFamily {
    type Err = GraphError;

    /// `antitree:<profile>`, `tree:<profile>` or `line`, unit measure.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "line" {
            return Ok(Self::line(MeasureRule::Unit));
        }
        match s.split_once(':') {
            Some(("antitree", p)) => Self::antitree(p.parse()?, MeasureRule::Unit),
            Some(("tree", p)) => Self::tree(p.parse()?, MeasureRule::Unit),
            _ => Err(GraphError::InvalidProfile(format!("unknown family {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::BuildOptions;

    fn cubic() -> SphericallySymmetricFamily {
        SphericallySymmetricFamily::antitree(SphereProfile::Poly(2), MeasureRule::Unit).unwrap()
    }

    #[test]
    fn cubic_antitree_truncation_counts() {
        let g = cubic().truncate(2, &ResourceCaps::default()).unwrap();
        assert_eq!(g.n(), 14);
        assert_eq!(g.edge_count(), 40);
        assert_eq!(g.boundary_vertices(), (5..14).collect::<Vec<_>>());
    }

    #[test]
    fn truncation_passes_full_validation() {
        let fams = [
            cubic(),
            SphericallySymmetricFamily::tree(SphereProfile::Regular(4), MeasureRule::WeightedDegree)
                .unwrap(),
            SphericallySymmetricFamily::line(MeasureRule::Unit),
        ];
        for fam in fams {
            let g = fam.truncate(4, &ResourceCaps::default()).unwrap();
            let again = WeightedGraph::from_parts_with(
                g.n(),
                g.edges().to_vec(),
                g.measure().to_vec(),
                &g.boundary_vertices(),
                BuildOptions::default(),
            );
            assert!(again.is_ok(), "{fam}: {again:?}");
        }
    }

    #[test]
    fn line_and_half_line() {
        let line = SphericallySymmetricFamily::line(MeasureRule::Unit);
        let g = line.truncate(3, &ResourceCaps::default()).unwrap();
        assert_eq!((g.n(), g.edge_count()), (7, 6));
        assert_eq!(g.weighted_degree(0), 2.0);

        let half =
            SphericallySymmetricFamily::antitree(SphereProfile::Const(1), MeasureRule::Unit).unwrap();
        let g = half.truncate(3, &ResourceCaps::default()).unwrap();
        assert_eq!((g.n(), g.edge_count()), (4, 3));
    }

    #[test]
    fn resource_guard() {
        let caps = ResourceCaps { max_vertices: 10, max_edges: 1000 };
        let err = cubic().truncate(2, &caps).unwrap_err();
        assert!(matches!(err, GraphError::ResourceCap { vertices: 14, edges: 40, .. }));
    }

    #[test]
    fn sphere_volume_examples() {
        let v = cubic().sphere_volumes(3);
        assert_eq!(v[3].ball_count, 30);
        assert_eq!(v[3].ball_volume, 30.0);

        let half =
            SphericallySymmetricFamily::antitree(SphereProfile::Const(1), MeasureRule::Unit).unwrap();
        assert_eq!(half.sphere_volumes(10)[10].ball_volume, 11.0);

        let deg =
            SphericallySymmetricFamily::antitree(SphereProfile::Poly(2), MeasureRule::WeightedDegree)
                .unwrap();
        assert_eq!(deg.sphere_volumes(1)[1].ball_volume, 44.0);

        let sub =
            SphericallySymmetricFamily::antitree(SphereProfile::Poly(1), MeasureRule::Unit).unwrap();
        for row in sub.sphere_volumes(20) {
            let r = row.r as u64;
            assert_eq!(row.ball_count, (r + 1) * (r + 2) / 2);
        }
    }

    #[test]
    fn sphere_volumes_match_materialized_graphs() {
        let fams = [
            cubic(),
            SphericallySymmetricFamily::antitree(SphereProfile::Poly(1), MeasureRule::WeightedDegree)
                .unwrap(),
            SphericallySymmetricFamily::tree(SphereProfile::Geom(2), MeasureRule::Unit).unwrap(),
            SphericallySymmetricFamily::tree(SphereProfile::Regular(3), MeasureRule::WeightedDegree)
                .unwrap(),
            SphericallySymmetricFamily::line(MeasureRule::WeightedDegree),
        ];
        for fam in fams {
            let radius = if fam.kind == FamilyKind::Antitree { 7 } else { 10 };
            // one more sphere so every measured vertex has its full neighborhood
            let g = fam.truncate(radius + 1, &ResourceCaps::default()).unwrap();
            let ranges = fam.sphere_ranges(radius + 1);
            let analytic = fam.sphere_volumes(radius);
            let mut vol = 0.0;
            for (r, row) in analytic.iter().enumerate() {
                for x in ranges[r].clone() {
                    if fam.measure_rule == MeasureRule::WeightedDegree {
                        assert_eq!(g.measure()[x], g.weighted_degree(x), "{fam} vertex {x}");
                    }
                    vol += g.measure()[x];
                }
                assert_eq!(row.ball_volume, vol, "{fam} r={r}");
                assert_eq!(row.ball_count as usize, ranges[r].end);
            }
        }
    }

    #[test]
    fn truncations_nest() {
        let fam = cubic();
        let small = fam.truncate(3, &ResourceCaps::default()).unwrap();
        let big = fam.truncate(4, &ResourceCaps::default()).unwrap();
        let inner = fam.sphere_ranges(2)[2].end;
        let pick = |g: &WeightedGraph| {
            g.edges().iter().filter(|e| e.v < inner).copied().collect::<Vec<_>>()
        };
        assert_eq!(pick(&small), pick(&big));
    }

    #[test]
    fn profile_parsing() {
        assert_eq!("poly:2".parse::<SphereProfile>().unwrap(), SphereProfile::Poly(2));
        assert_eq!(
            "list:[1,3,6]".parse::<SphereProfile>().unwrap(),
            SphereProfile::List(vec![1, 3, 6])
        );
        assert!("list:[2,3]".parse::<SphereProfile>().is_err());
        assert!("regular:1".parse::<SphereProfile>().is_err());
        assert!("cubes".parse::<SphereProfile>().is_err());
        assert!(SphericallySymmetricFamily::tree(SphereProfile::Poly(2), MeasureRule::Unit).is_err());
        assert!(SphericallySymmetricFamily::tree(
            SphereProfile::List(vec![1, 2, 3]),
            MeasureRule::Unit
        )
        .is_err());
        let tree = SphericallySymmetricFamily::tree(SphereProfile::Geom(3), MeasureRule::Unit).unwrap();
        assert_eq!(tree.truncation_size(4).0, 121);
    }
}

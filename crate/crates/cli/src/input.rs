use std::fs::File;
use std::io::BufReader;

use serde::Serialize;
use specgrowth::io::read_graph;
use specgrowth::{
    BuildOptions, GraphError, MeasureRule, ResourceCaps, SphereProfile, SphericallySymmetricFamily,
    WeightedGraph,
};

use crate::args::{GenerateArgs, InputArgs, MeasureArg};
use crate::failure::{Failure, Stage};

pub fn measure_rule(m: MeasureArg) -> MeasureRule {
    match m {
        MeasureArg::Unit => MeasureRule::Unit,
        MeasureArg::Degree => MeasureRule::WeightedDegree,
    }
}

/// A graph together with the family it was truncated from, if any.
pub struct Loaded {
    pub g: WeightedGraph,
    pub family: Option<SphericallySymmetricFamily>,
    pub radius: Option<usize>,
    pub root: usize,
}

#[derive(Serialize)]
pub struct GraphSummary {
    pub source: String,
    pub vertices: usize,
    pub edges: usize,
    pub boundary_vertices: usize,
    pub total_measure: f64,
    pub max_generalized_degree: f64,
    pub components: usize,
}

impl Loaded {
    pub fn summary(&self, source: String) -> GraphSummary {
        GraphSummary {
            source,
            vertices: self.g.n(),
            edges: self.g.edge_count(),
            boundary_vertices: self.g.boundary_vertices().len(),
            total_measure: self.g.total_measure(),
            max_generalized_degree: self.g.max_generalized_degree(),
            components: self.g.component_count(),
        }
    }
}

pub fn source_label(input: &InputArgs) -> String {
    match (&input.graph, &input.family) {
        (Some(p), _) => format!("file:{}", p.display()),
        (None, Some(f)) => format!("{f}@R={}", input.radius),
        _ => String::new(),
    }
}

pub fn load(input: &InputArgs, caps: &ResourceCaps) -> Result<Loaded, Failure> {
    let loaded = match (&input.graph, &input.family) {
        (Some(path), _) => {
            let file = File::open(path)
                .map_err(|e| Failure::validation("input", format!("{}: {e}", path.display())))?;
            let g = read_graph(BufReader::new(file), BuildOptions::default()).stage("input")?;
            Loaded { g, family: None, radius: None, root: input.root }
        }
        (None, Some(spec)) => {
            let mut family: SphericallySymmetricFamily = spec.parse().stage("input")?;
            family.measure_rule = measure_rule(input.measure);
            let g = family.truncate(input.radius, caps).stage("input")?;
            Loaded { g, family: Some(family), radius: Some(input.radius), root: input.root }
        }
        (None, None) => return Err(Failure::validation("input", "either --graph or --family is required")),
    };
    loaded.g.check_vertex(loaded.root).stage("input")?;
    Ok(loaded)
}

/// Parses generator tokens such as `antitree poly:2 R=3`.
pub fn generator(args: &GenerateArgs) -> Result<(SphericallySymmetricFamily, usize), Failure> {
    let bad = |msg: String| Failure::validation("generate", msg);
    let mut tokens = args.spec.iter();
    let kind = tokens.next().ok_or_else(|| bad("missing family kind".into()))?;
    let mut profile: Option<String> = None;
    let mut radius: Option<usize> = None;
    let mut measure = MeasureRule::Unit;
    let int = |k: &str, v: &str| v.parse::<u64>().map_err(|_| bad(format!("{k}={v} is not an integer")));
    for tok in tokens {
        match tok.split_once('=') {
            Some((k, v)) => match k {
                "R" | "r" | "radius" | "depth" => radius = Some(int(k, v)? as usize),
                "branching" | "b" => profile = Some(format!("geom:{}", int(k, v)?)),
                "degree" | "d" => profile = Some(format!("regular:{}", int(k, v)?)),
                "spheres" => profile = Some(v.to_string()),
                "measure" => measure = v.parse().stage("generate")?,
                _ => return Err(bad(format!("unknown generator key {k:?}"))),
            },
            None if tok.contains(':') => profile = Some(tok.clone()),
            None => return Err(bad(format!("unexpected token {tok:?}"))),
        }
    }
    if let Some(s) = &args.spheres {
        profile = Some(s.clone());
    }
    if let Some(r) = args.radius {
        radius = Some(r);
    }
    if let Some(m) = args.measure {
        measure = measure_rule(m);
    }
    let radius = radius.ok_or_else(|| bad("missing radius (R=, depth= or --radius)".into()))?;
    let parse_profile = |p: Option<String>| -> Result<SphereProfile, Failure> {
        p.ok_or_else(|| bad(format!("{kind} needs a sphere profile, e.g. poly:2")))?.parse().stage("generate")
    };
    let family = match kind.as_str() {
        "antitree" => SphericallySymmetricFamily::antitree(parse_profile(profile.clone())?, measure),
        "tree" => SphericallySymmetricFamily::tree(parse_profile(profile.clone())?, measure),
        "line" => Ok(SphericallySymmetricFamily::line(measure)),
        other => Err(GraphError::InvalidProfile(format!("unknown family kind {other:?}"))),
    }
    .stage("generate")?;
    Ok((family, radius))
}

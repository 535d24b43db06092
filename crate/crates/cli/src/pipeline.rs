//! Pipeline stages shared by the subcommands. Each returns a serializable
//! section of the report.

use std::fs;
use std::path::Path;

use serde::Serialize;
use specgrowth::bounds::{BoundSet, RateLabel};
use specgrowth::growth::{
    ball_table, beta_estimate, cubic_ratio_max, default_centers, mu_estimate, mu_limsup_estimate,
    mu_slope_estimate, mu_tilde_estimate, BallTable, CubicClass, GrowthEstimate, Window,
    DEFAULT_CUBIC_BAND,
};
use specgrowth::metrics::{
    huang_lengths, jump_size, metric_from, natural_distance, verify_adapted, AdaptednessReport,
    JumpRefinement,
};
use specgrowth::spectral::{
    annulus_domain, antitree_supersolution, ball_domain, default_alpha_grid, default_radius_grid,
    dirichlet_lowest, exterior_deficit, supersolution_check, variational_bound, AnnulusRow,
    DirichletResult, ExhaustionRow, SolverOptions, SpectralError, SpectralReport,
    SupersolutionReport, VariationalSummary,
};
use specgrowth::{
    Convention, EdgeLengthRule, EdgeLengths, Exec, FamilyKind, JumpSize, PseudoMetric,
};

use crate::args::{ConventionArg, GrowthArgs, MetricArg, MetricArgs, SpectralArgs};
use crate::failure::{io_stage, Failure, Stage};
use crate::input::Loaded;

pub struct MetricStage {
    pub lengths: EdgeLengths,
    pub metric: PseudoMetric,
    pub convention: Convention,
    pub adaptedness: AdaptednessReport,
    pub jump: Option<JumpSize>,
}

#[derive(Serialize)]
pub struct MetricSection {
    pub rule: EdgeLengthRule,
    pub convention: Convention,
    pub root: usize,
    pub eccentricity: f64,
    /// Distance from the root to the nearest truncation boundary vertex.
    pub boundary_distance: Option<f64>,
    pub adaptedness: AdaptednessReport,
    pub jump: Option<JumpSize>,
    pub refinement: Option<JumpRefinement>,
}

pub fn metric(loaded: &Loaded, args: &MetricArgs) -> Result<MetricStage, Failure> {
    let g = &loaded.g;
    let lengths = match args.metric {
        MetricArg::Natural => EdgeLengths::natural(g),
        MetricArg::Huang => huang_lengths(g).stage("metric")?,
    };
    let convention = match (args.convention, args.metric) {
        (Some(ConventionArg::Half), _) | (None, MetricArg::Natural) => Convention::Half,
        (Some(ConventionArg::Full), _) | (None, MetricArg::Huang) => Convention::Full,
    };
    let metric = metric_from(g, &lengths, loaded.root).stage("metric")?;
    let adaptedness = verify_adapted(g, &lengths, convention);
    let jump = if g.edge_count() > 0 { Some(jump_size(g, &lengths).stage("metric")?) } else { None };
    Ok(MetricStage { lengths, metric, convention, adaptedness, jump })
}

impl MetricStage {
    pub fn section(&self, loaded: &Loaded) -> MetricSection {
        MetricSection {
            rule: self.lengths.rule,
            convention: self.convention,
            root: self.metric.root,
            eccentricity: self.metric.eccentricity(),
            boundary_distance: self.metric.boundary_distance(&loaded.g),
            adaptedness: self.adaptedness.clone(),
            jump: self.jump,
            refinement: self.jump.map(|j| j.refinement()),
        }
    }
}

pub struct GrowthStage {
    pub table: BallTable,
    pub section: GrowthSection,
}

#[derive(Serialize)]
pub struct GrowthSection {
    pub estimate: GrowthEstimate,
    /// `analytic` for family sphere sums, `metric` for thresholded distances.
    pub table_source: &'static str,
    pub r_max: f64,
    pub step: f64,
    pub mu_tilde_window: Option<Window>,
    pub centers_skipped: usize,
    pub cubic_ratio_max: Option<f64>,
    pub warnings: Vec<String>,
}

fn parse_window(s: &str) -> Result<Window, Failure> {
    s.parse::<Window>().map_err(|e| Failure::validation("growth", e))
}

pub fn growth(loaded: &Loaded, ms: &MetricStage, args: &GrowthArgs, exec: Exec) -> Result<GrowthStage, Failure> {
    let g = &loaded.g;
    let natural = ms.lengths.rule == EdgeLengthRule::Natural;
    let r_max = args.rmax.unwrap_or_else(|| match loaded.radius {
        Some(r) if natural && loaded.root == 0 => r as f64,
        _ => ms.metric.eccentricity(),
    });
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Failure::validation("growth", format!("rmax must be positive, got {r_max}")));
    }
    let step = match args.step {
        Some(s) => s,
        None if natural => 1.0,
        None => ms.jump.map_or(1.0, |j| j.delta_min / 2.0),
    };
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => Window::tail(r_max),
    };
    let analytic = natural && loaded.root == 0 && loaded.family.is_some() && r_max.fract() == 0.0;
    let table = match &loaded.family {
        Some(fam) if analytic => {
            BallTable::from_sphere_volumes(format!("{}:{}", kind_label(fam.kind), fam.profile), &fam.sphere_volumes(r_max as usize))
        }
        _ => ball_table(g, &ms.metric, r_max, step).stage("growth")?,
    };
    let mu_hat = mu_estimate(&table, window).stage("growth")?;
    let mu_limsup_hat = mu_limsup_estimate(&table, window).stage("growth")?;
    let mu_slope_hat = mu_slope_estimate(&table, window).ok();
    let beta_hat = if natural { beta_estimate(&table, window).ok() } else { None };

    let mut warnings = Vec::new();
    let tilde_window = Window::new(window.lo / 2.0, window.hi / 2.0).ok();
    let centers = default_centers(g, args.centers);
    let (mu_tilde_hat, used, skipped) = match tilde_window {
        Some(tw) if tw.lo > 0.0 => {
            match mu_tilde_estimate(g, &ms.lengths, &centers, r_max / 2.0, tw, step, exec) {
                Ok(est) => (Some(est.value), est.centers_used, est.centers_skipped.len()),
                Err(e) => {
                    warnings.push(format!("minimal growth rate not estimated: {e}"));
                    (None, Vec::new(), centers.len())
                }
            }
        }
        _ => {
            warnings.push("minimal growth rate not estimated: window too small".into());
            (None, Vec::new(), 0)
        }
    };
    for (name, v) in [("root", Some(mu_hat)), ("minimal", mu_tilde_hat)] {
        if let Some(v) = v.filter(|v| *v < 0.0) {
            warnings.push(format!(
                "{name} growth estimate {v} is negative (window below the unit-ball scale); bounds use 0"
            ));
        }
    }
    let estimate = GrowthEstimate {
        mu_hat,
        mu_limsup_hat,
        mu_slope_hat,
        mu_tilde_hat,
        beta_hat,
        window,
        method: format!("{} balls around {}", if analytic { "analytic" } else { "thresholded" }, loaded.root),
        centers: used,
    };
    let section = GrowthSection {
        estimate,
        table_source: if analytic { "analytic" } else { "metric" },
        r_max,
        step,
        mu_tilde_window: tilde_window,
        centers_skipped: skipped,
        cubic_ratio_max: cubic_ratio_max(&table, window).ok(),
        warnings,
    };
    Ok(GrowthStage { table, section })
}

fn kind_label(k: FamilyKind) -> &'static str {
    match k {
        FamilyKind::Antitree => "antitree",
        FamilyKind::SphericallySymmetricTree => "tree",
        FamilyKind::IntegerLatticeLine => "line",
    }
}

#[derive(Serialize)]
pub struct BoundsSection {
    /// Factor applied to lengths so that all jumps are at most 1; rates are
    /// divided by it.
    pub rate_scale: f64,
    pub delta: Option<f64>,
    pub halved: bool,
    /// `false` when the metric fails adaptedness: the bounds are then not
    /// implied by the theory.
    pub certified: bool,
    /// `mu` bounds the essential spectrum, `mu_tilde` the spectrum bottom.
    pub pairing: Vec<BoundSet>,
    /// The transposed assignment, reported alongside.
    pub transposed_pairing: Vec<BoundSet>,
    pub note: &'static str,
}

const PAIRING_NOTE: &str = "the main theorem pairs the minimal growth rate with the spectrum bottom and the root growth rate with the essential spectrum; the normalized-operator corollary states the transposed assignment, so both are listed";

pub struct Rates {
    pub mu: f64,
    pub mu_tilde: Option<f64>,
    pub refinement: Option<JumpRefinement>,
    pub halved: bool,
    pub certified: bool,
}

pub fn bounds(rates: &Rates) -> Result<BoundsSection, Failure> {
    let scale = rates.refinement.map_or(1.0, |r| r.scale);
    let delta = rates.refinement.map(|r| r.delta);
    let mut pairing = Vec::new();
    if let Some(mt) = rates.mu_tilde {
        pairing.push(BoundSet::compute(RateLabel::MuTilde, mt / scale, delta, rates.halved).stage("bounds")?);
    }
    pairing.push(BoundSet::compute(RateLabel::Mu, rates.mu / scale, delta, rates.halved).stage("bounds")?);
    let transposed_pairing = pairing
        .iter()
        .cloned()
        .map(|mut b| {
            let other = match b.rate {
                RateLabel::Mu => RateLabel::MuTilde,
                RateLabel::MuTilde => RateLabel::Mu,
            };
            b.target = other.target().to_string();
            b
        })
        .collect();
    Ok(BoundsSection {
        rate_scale: scale,
        delta,
        halved: rates.halved,
        certified: rates.certified,
        pairing,
        transposed_pairing,
        note: PAIRING_NOTE,
    })
}

pub fn rates_from(ms: &MetricStage, gs: &GrowthSection) -> Rates {
    Rates {
        mu: gs.estimate.mu_hat.max(0.0),
        mu_tilde: gs.estimate.mu_tilde_hat.map(|m| m.max(0.0)),
        refinement: ms.jump.map(|j| j.refinement()),
        halved: ms.convention == Convention::Full && ms.adaptedness.ok,
        certified: ms.adaptedness.ok,
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Failure::validation("spectrum", format!("bad {what} entry {t:?}"))))
        .collect()
}

pub fn alpha_grid(spec: Option<&str>, mu: f64) -> Result<Vec<f64>, Failure> {
    let Some(spec) = spec else {
        return Ok(default_alpha_grid(mu));
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = if parts.len() == 3 {
        let bad = || Failure::validation("spectrum", format!("bad alpha grid {spec:?}"));
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let n: usize = parts[2].parse().map_err(|_| bad())?;
        if n == 0 || !(lo > 0.0 && hi >= lo) {
            return Err(bad());
        }
        if n == 1 {
            vec![lo]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    } else {
        parse_list(spec, "alpha")?
    };
    if let Some(a) = grid.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
        return Err(Failure::validation("spectrum", format!("alpha must be positive, got {a}")));
    }
    Ok(grid)
}

fn default_ball_radii(outer: usize) -> Vec<usize> {
    let mut v: Vec<usize> = [outer / 4, outer / 2, outer].into_iter().filter(|&r| r >= 1).collect();
    v.dedup();
    v
}

pub struct SpectralStage {
    pub report: SpectralReport,
    pub traces: Vec<(String, DirichletResult)>,
    pub warnings: Vec<String>,
}

pub fn spectrum(
    loaded: &Loaded,
    ms: &MetricStage,
    mu: f64,
    args: &SpectralArgs,
    seed: u64,
    exec: Exec,
) -> Result<SpectralStage, Failure> {
    let g = &loaded.g;
    let opts = SolverOptions { tol: args.tol, max_matvecs: args.max_matvecs, seed, exec, trace: args.trace, ..SolverOptions::default() };
    let mut warnings = Vec::new();
    let mut report = SpectralReport {
        adaptedness: Some(ms.adaptedness.clone()),
        jump: ms.jump,
        ..SpectralReport::default()
    };

    let alphas = alpha_grid(args.alpha_grid.as_deref(), mu)?;
    match variational_bound(g, &ms.metric, &alphas, &default_radius_grid(g, &ms.metric), exec) {
        Ok(v) => report.variational = Some(VariationalSummary { alpha: v.alpha, r: v.r, rayleigh: v.rayleigh }),
        Err(SpectralError::NoAdmissibleCandidate) => {
            warnings.push("variational bound skipped: no radius keeps the test function off the boundary".into())
        }
        Err(e) => return Err(e).stage("spectrum"),
    }

    // Balls and annuli use the hop metric; family truncations see the
    // missing outer edges through the exterior weight.
    let hop = natural_distance(g, loaded.root).stage("spectrum")?;
    let outer = match loaded.radius {
        Some(r) if loaded.root == 0 => r,
        _ => hop.eccentricity() as usize,
    };
    let deficit = match (&loaded.family, loaded.radius) {
        (Some(fam), Some(r)) => Some(exterior_deficit(fam, g, r)),
        _ => None,
    };
    let radii: Vec<usize> = match &args.radii {
        Some(s) => parse_list(s, "radius")?,
        None => default_ball_radii(outer),
    };
    if radii.is_empty() || radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::validation("spectrum", "radii must be non-empty and increasing"));
    }
    let mut traces = Vec::new();
    for &r in &radii {
        if r > outer {
            return Err(Failure::validation("spectrum", format!("radius {r} exceeds the available radius {outer}")));
        }
        let domain = ball_domain(&hop, r as f64);
        let res = dirichlet_lowest(g, &domain, deficit.as_deref(), &opts).stage("spectrum")?;
        report.exhaustion.push(ExhaustionRow {
            r,
            vertices: domain.len(),
            lambda: res.lambda,
            residual: res.residual,
            iterations: res.iterations,
        });
        traces.push((format!("ball_{r}"), res));
    }

    let r_out = args.annulus_out.unwrap_or(outer);
    let r_in: Vec<usize> = match &args.annulus_in {
        Some(s) => parse_list(s, "annulus radius")?,
        None if loaded.family.is_some() => {
            let mut v: Vec<usize> = [r_out / 4, r_out / 2].into_iter().filter(|&r| r >= 1).collect();
            v.dedup();
            v
        }
        None => Vec::new(),
    };
    if r_out > outer {
        return Err(Failure::validation("spectrum", format!("annulus outer radius {r_out} exceeds {outer}")));
    }
    for &ri in &r_in {
        if ri >= r_out {
            return Err(SpectralError::EmptyAnnulus { r_in: ri, r_out }).stage("spectrum");
        }
        let domain = annulus_domain(&hop, ri as f64, r_out as f64);
        if domain.is_empty() {
            return Err(SpectralError::EmptyAnnulus { r_in: ri, r_out }).stage("spectrum");
        }
        let res = dirichlet_lowest(g, &domain, deficit.as_deref(), &opts).stage("spectrum")?;
        report.annulus.push(AnnulusRow {
            r_in: ri,
            r_out,
            vertices: domain.len(),
            lambda: res.lambda,
            residual: res.residual,
            iterations: res.iterations,
        });
        traces.push((format!("annulus_{ri}_{r_out}"), res));
    }
    if !report.annulus.is_empty() {
        warnings.push("annulus values are finite-radius brackets for the essential spectrum bottom, not certified bounds".into());
    }

    if let (Some(fam), Some(r)) = (&loaded.family, loaded.radius) {
        if fam.kind == FamilyKind::Antitree && r >= 1 {
            report.supersolution = Some(antitree_check(loaded, r, args.super_lambda)?);
        }
    }
    Ok(SpectralStage { report, traces, warnings })
}

fn antitree_check(loaded: &Loaded, radius: usize, lambda: f64) -> Result<SupersolutionReport, Failure> {
    let fam = loaded.family.as_ref().expect("family");
    let phi = antitree_supersolution(fam, radius);
    let outer: Vec<usize> = fam.sphere_ranges(radius)[radius].clone().collect();
    supersolution_check(&loaded.g, &phi, lambda, &outer).stage("spectrum")
}

#[derive(Serialize)]
pub struct Classification {
    pub beta_hat: Option<f64>,
    pub window: Window,
    pub band: f64,
    pub class: Option<CubicClass>,
    pub conclusion: Option<&'static str>,
    pub note: Option<&'static str>,
}

pub const CLASSIFY_WINDOW: (f64, f64) = (50.0, 200.0);

/// Cubic-threshold classification from hop-metric ball counts. Families use
/// analytic sphere sums on `[50, 200]` unless a window is given; graph files
/// use the growth window.
pub fn classify(loaded: &Loaded, gs: &GrowthStage, ms: &MetricStage, args: &GrowthArgs) -> Result<Classification, Failure> {
    let (beta, window) = match (&loaded.family, loaded.root) {
        (Some(fam), 0) => {
            let window = match &args.window {
                Some(w) => parse_window(w)?,
                None => Window::new(CLASSIFY_WINDOW.0, CLASSIFY_WINDOW.1).expect("valid window"),
            };
            let table = BallTable::from_sphere_volumes("hop", &fam.sphere_volumes(window.hi.ceil() as usize));
            (beta_estimate(&table, window).ok(), window)
        }
        _ if ms.lengths.rule == EdgeLengthRule::Natural => (gs.section.estimate.beta_hat, gs.section.estimate.window),
        _ => {
            let hop = natural_distance(&loaded.g, loaded.root).stage("classify")?;
            let r_max = args.rmax.unwrap_or(hop.eccentricity());
            let window = match &args.window {
                Some(w) => parse_window(w)?,
                None => Window::tail(r_max),
            };
            let table = ball_table(&loaded.g, &hop, r_max, 1.0).stage("classify")?;
            (beta_estimate(&table, window).ok(), window)
        }
    };
    let class = beta.map(|b| CubicClass::classify(b, DEFAULT_CUBIC_BAND));
    let note = match (class, &loaded.family) {
        (Some(CubicClass::Supercubic), Some(f)) if f.kind == FamilyKind::Antitree => Some(
            "antitrees with more than cubic polynomial growth are known to have positive bottom of spectrum and empty essential spectrum (informational)",
        ),
        _ => None,
    };
    Ok(Classification {
        beta_hat: beta,
        window,
        band: DEFAULT_CUBIC_BAND,
        class,
        conclusion: class.map(CubicClass::conclusion),
        note,
    })
}

pub fn emit_csv(dir: &Path, name: &str, body: &str) -> Result<(), Failure> {
    io_stage(fs::create_dir_all(dir), "output")?;
    io_stage(fs::write(dir.join(name), body), "output")
}

pub fn distances_csv(metric: &PseudoMetric) -> Result<String, Failure> {
    let mut buf = Vec::new();
    io_stage(specgrowth::io::write_distance_csv(&metric.dist, &mut buf), "output")?;
    Ok(String::from_utf8(buf).expect("ascii csv"))
}

pub fn trace_csv(res: &DirichletResult) -> String {
    let mut out = String::from("cycle,matvecs,ritz,residual\n");
    for t in &res.trace {
        out.push_str(&format!("{},{},{},{}\n", t.cycle, t.matvecs, t.ritz, t.residual));
    }
    out
}

mod args;
mod failure;
mod input;
mod pipeline;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;
use serde::Serialize;
use specgrowth::io::graph_to_string;
use specgrowth::verify::{run_suite, SuiteConfig};
use specgrowth::{Exec, ResourceCaps};

use args::{
    AnalyzeCmd, BoundsCmd, Cli, Command, GenerateArgs, GrowthCmd, MetricCmd, OutputArgs, SpectrumCmd,
    VerifyArgs,
};
use failure::{io_stage, Failure};
use input::{load, source_label};
use pipeline::{emit_csv, Rates};

/// Every report starts with these fields.
#[derive(Serialize)]
struct Envelope<'a, C: Serialize, B: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    exec: Exec,
    config: &'a C,
    #[serde(flatten)]
    body: B,
}

struct Ctx {
    exec: Exec,
    caps: ResourceCaps,
}

/// Writes to stdout; a closed pipe is not an error.
fn print_stdout(text: &str) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::validation("output", e)),
        _ => Ok(()),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => io_stage(fs::write(p, text), "output"),
        None => print_stdout(&format!("{text}\n")),
    }
}

fn emit_report<C: Serialize, B: Serialize>(
    ctx: &Ctx,
    command: &'static str,
    config: &C,
    seed: u64,
    out: &OutputArgs,
    body: B,
) -> Result<(), Failure> {
    let env = Envelope {
        tool: "specgrowth",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        exec: ctx.exec,
        config,
        body,
    };
    let mut text = serde_json::to_string_pretty(&env).map_err(|e| Failure::validation("output", e))?;
    text.push('\n');
    match &out.out {
        Some(p) => io_stage(fs::write(p, &text), "output"),
        None => print_stdout(&text),
    }
}

fn cmd_generate(args: &GenerateArgs, ctx: &Ctx) -> Result<(), Failure> {
    let (family, radius) = input::generator(args)?;
    let g = family.truncate(radius, &ctx.caps).map_err(|e| {
        let e: specgrowth::Error = e.into();
        Failure { stage: "generate", kind: e.kind(), message: e.to_string() }
    })?;
    write_output(args.out.as_deref(), graph_to_string(&g).trim_end())
}

fn cmd_metric(cmd: &MetricCmd, ctx: &Ctx) -> Result<(), Failure> {
    let loaded = load(&cmd.input, &ctx.caps)?;
    let ms = pipeline::metric(&loaded, &cmd.metric)?;
    if let Some(dir) = &cmd.output.emit_csv {
        emit_csv(dir, "distances.csv", &pipeline::distances_csv(&ms.metric)?)?;
    }
    #[derive(Serialize)]
    struct Body {
        graph: input::GraphSummary,
        metric: pipeline::MetricSection,
    }
    let body = Body { graph: loaded.summary(source_label(&cmd.input)), metric: ms.section(&loaded) };
    emit_report(ctx, "metric", cmd, cmd.output.seed, &cmd.output, body)
}

fn cmd_growth(cmd: &GrowthCmd, ctx: &Ctx) -> Result<(), Failure> {
    let loaded = load(&cmd.input, &ctx.caps)?;
    let ms = pipeline::metric(&loaded, &cmd.metric)?;
    let gs = pipeline::growth(&loaded, &ms, &cmd.growth, ctx.exec)?;
    if let Some(dir) = &cmd.output.emit_csv {
        emit_csv(dir, "ball_table.csv", &gs.table.to_csv())?;
    }
    #[derive(Serialize)]
    struct Body {
        graph: input::GraphSummary,
        metric: pipeline::MetricSection,
        growth: pipeline::GrowthSection,
    }
    let body = Body {
        graph: loaded.summary(source_label(&cmd.input)),
        metric: ms.section(&loaded),
        growth: gs.section,
    };
    emit_report(ctx, "growth", cmd, cmd.output.seed, &cmd.output, body)
}

fn cmd_bounds(cmd: &BoundsCmd, ctx: &Ctx) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Body {
        #[serde(skip_serializing_if = "Option::is_none")]
        growth: Option<pipeline::GrowthSection>,
        bounds: pipeline::BoundsSection,
    }
    let body = match cmd.mu {
        Some(mu) => {
            if let Some(d) = cmd.delta {
                if !(0.0..=1.0).contains(&d) {
                    return Err(Failure::validation("bounds", format!("delta must lie in [0, 1], got {d}")));
                }
            }
            let rates = Rates {
                mu,
                mu_tilde: cmd.mu_tilde,
                refinement: cmd.delta.map(|delta| specgrowth::metrics::JumpRefinement { scale: 1.0, delta }),
                halved: cmd.halved,
                certified: true,
            };
            Body { growth: None, bounds: pipeline::bounds(&rates)? }
        }
        None => {
            let loaded = load(&cmd.input, &ctx.caps)?;
            let ms = pipeline::metric(&loaded, &cmd.metric)?;
            let gs = pipeline::growth(&loaded, &ms, &cmd.growth, ctx.exec)?;
            let mut rates = pipeline::rates_from(&ms, &gs.section);
            if let Some(mt) = cmd.mu_tilde {
                rates.mu_tilde = Some(mt);
            }
            rates.halved |= cmd.halved;
            Body { bounds: pipeline::bounds(&rates)?, growth: Some(gs.section) }
        }
    };
    emit_report(ctx, "bounds", cmd, cmd.output.seed, &cmd.output, body)
}

fn emit_traces(dir: Option<&Path>, traces: &[(String, specgrowth::spectral::DirichletResult)], on: bool) -> Result<(), Failure> {
    if let (Some(dir), true) = (dir, on) {
        for (name, res) in traces {
            emit_csv(dir, &format!("trace_{name}.csv"), &pipeline::trace_csv(res))?;
        }
    }
    Ok(())
}

fn cmd_spectrum(cmd: &SpectrumCmd, ctx: &Ctx) -> Result<(), Failure> {
    let loaded = load(&cmd.input, &ctx.caps)?;
    let ms = pipeline::metric(&loaded, &cmd.metric)?;
    let gs = pipeline::growth(&loaded, &ms, &cmd.growth, ctx.exec)?;
    let mut sp = pipeline::spectrum(&loaded, &ms, gs.section.estimate.mu_hat, &cmd.spectral, cmd.output.seed, ctx.exec)?;
    let bounds = pipeline::bounds(&pipeline::rates_from(&ms, &gs.section))?;
    sp.report.bounds = bounds.pairing.clone();
    emit_traces(cmd.output.emit_csv.as_deref(), &sp.traces, cmd.spectral.trace)?;
    #[derive(Serialize)]
    struct Body {
        graph: input::GraphSummary,
        spectral: specgrowth::spectral::SpectralReport,
        warnings: Vec<String>,
    }
    let body = Body { graph: loaded.summary(source_label(&cmd.input)), spectral: sp.report, warnings: sp.warnings };
    emit_report(ctx, "spectrum", cmd, cmd.output.seed, &cmd.output, body)
}

fn cmd_analyze(cmd: &AnalyzeCmd, ctx: &Ctx) -> Result<(), Failure> {
    let loaded = load(&cmd.input, &ctx.caps)?;
    let ms = pipeline::metric(&loaded, &cmd.metric)?;
    let gs = pipeline::growth(&loaded, &ms, &cmd.growth, ctx.exec)?;
    let bounds = pipeline::bounds(&pipeline::rates_from(&ms, &gs.section))?;
    let mut sp = pipeline::spectrum(&loaded, &ms, gs.section.estimate.mu_hat, &cmd.spectral, cmd.output.seed, ctx.exec)?;
    sp.report.bounds = bounds.pairing.clone();
    let classification = pipeline::classify(&loaded, &gs, &ms, &cmd.growth)?;
    if let Some(dir) = &cmd.output.emit_csv {
        emit_csv(dir, "distances.csv", &pipeline::distances_csv(&ms.metric)?)?;
        emit_csv(dir, "ball_table.csv", &gs.table.to_csv())?;
    }
    emit_traces(cmd.output.emit_csv.as_deref(), &sp.traces, cmd.spectral.trace)?;
    let mut warnings = gs.section.warnings.clone();
    warnings.extend(sp.warnings);
    if !ms.adaptedness.ok {
        warnings.push(format!(
            "metric is not adapted under the {} convention (worst ratio {} at vertex {}); bounds are not certified",
            ms.convention, ms.adaptedness.worst_ratio, ms.adaptedness.worst_vertex
        ));
    }
    #[derive(Serialize)]
    struct Body {
        graph: input::GraphSummary,
        metric: pipeline::MetricSection,
        growth: pipeline::GrowthSection,
        bounds: pipeline::BoundsSection,
        spectral: specgrowth::spectral::SpectralReport,
        classification: pipeline::Classification,
        warnings: Vec<String>,
    }
    let body = Body {
        graph: loaded.summary(source_label(&cmd.input)),
        metric: ms.section(&loaded),
        growth: gs.section,
        bounds,
        spectral: sp.report,
        classification,
        warnings,
    };
    emit_report(ctx, "analyze", cmd, cmd.output.seed, &cmd.output, body)
}

fn cmd_verify(args: &VerifyArgs, ctx: &Ctx) -> Result<(), Failure> {
    let cfg = SuiteConfig {
        graphs: args.graphs,
        max_vertices: args.max_vertices,
        instances_per_graph: args.instances,
        seed: args.seed,
        exec: ctx.exec,
        ..SuiteConfig::default()
    };
    if cfg.max_vertices < 2 {
        return Err(Failure::validation("verify", "--max-vertices must be at least 2"));
    }
    let report = run_suite(&cfg);
    print_stdout(&report.table())?;
    if let Some(out) = &args.out {
        let env = Envelope {
            tool: "specgrowth",
            version: env!("CARGO_PKG_VERSION"),
            command: "verify",
            seed: args.seed,
            exec: ctx.exec,
            config: args,
            body: &report,
        };
        let text = serde_json::to_string_pretty(&env).map_err(|e| Failure::validation("output", e))?;
        io_stage(fs::write(out, text + "\n"), "output")?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.threads > 0 {
        specgrowth::exec::init_pool(cli.threads);
    }
    let ctx = Ctx {
        exec: if cli.sequential { Exec::Sequential } else { Exec::default() },
        caps: ResourceCaps::from_env(),
    };
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, &ctx),
        Command::Metric(c) => cmd_metric(c, &ctx),
        Command::Growth(c) => cmd_growth(c, &ctx),
        Command::Bounds(c) => cmd_bounds(c, &ctx),
        Command::Spectrum(c) => cmd_spectrum(c, &ctx),
        Command::Analyze(c) => cmd_analyze(c, &ctx),
        Command::Verify(a) => cmd_verify(a, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let f = Failure::validation("args", e.to_string().trim_end());
            eprintln!("{}", f.to_json());
            return ExitCode::from(f.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

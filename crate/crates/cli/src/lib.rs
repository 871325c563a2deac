//! Command-line front end. `run` parses arguments, dispatches and maps failures to exit codes:
//! 0 on success, 1 when a check fails or the minimizer does not converge, 2 on usage or input errors.

mod args;
mod commands;
mod render;
mod tables;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Config, Format};
use shellstrain::verify::{
    build_scenario, compatible, default_suite, run_check, CheckReport, Scenario, ScenarioSpec, Tolerances, CHECK_IDS,
};
use shellstrain::{Error, Vec2};

#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Input(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NonConvergence { .. } => Failure::Compute(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

struct Outcome {
    body: String,
    failed: usize,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut io::stdout(), &mut io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("error: invalid arguments");
            let _ = writeln!(err, "{line}");
            return 2;
        }
    };
    let result = dispatch(cli.command, &cli.config).and_then(|o| {
        match &cli.config.out {
            Some(path) => fs::write(path, &o.body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
            None => out.write_all(o.body.as_bytes()).map_err(|e| Failure::Input(format!("stdout: {e}")))?,
        }
        Ok(o.failed)
    });
    match result {
        Ok(0) => 0,
        Ok(n) => {
            let _ = writeln!(err, "error: {n} check(s) failed");
            1
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Usage(m) | Failure::Input(m)) => {
            let _ = writeln!(err, "error: {}", m.replace('\n', " "));
            2
        }
    }
}

fn read_spec(config: &Config) -> Result<Option<ScenarioSpec>, Failure> {
    let Some(path) = &config.scenario else { return Ok(None) };
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Some(ScenarioSpec::from_json(&text)?))
}

/// Applies `--point` or, failing that, `--grid` as the scenario's sample points.
fn with_points(mut spec: ScenarioSpec, config: &Config, grid_is_points: bool) -> Result<Scenario, Failure> {
    if !config.points.is_empty() {
        spec.sample_points = config.points.iter().map(|p| Vec2::new(p[0], p[1])).collect();
    } else if let (true, Some([n1, n2])) = (grid_is_points, config.grid) {
        let domain = spec.domain.unwrap_or_else(|| spec.surface.default_domain());
        spec.sample_points = (0..n1)
            .flat_map(|i| (0..n2).map(move |j| ((i as f64 + 0.5) / n1 as f64, (j as f64 + 0.5) / n2 as f64)))
            .map(|(s, t)| domain.at_unit(s, t))
            .collect();
    }
    Ok(build_scenario(&spec)?)
}

fn scenario(config: &Config, grid_is_points: bool) -> Result<Scenario, Failure> {
    let spec = read_spec(config)?.ok_or_else(|| Failure::Usage("--scenario is required for this command".into()))?;
    with_points(spec, config, grid_is_points)
}

fn render(v: &serde_json::Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n",
        Format::Csv => render::csv(v),
        Format::Pretty => render::pretty(v),
    }
}

fn dispatch(command: Command, config: &Config) -> Result<Outcome, Failure> {
    let doc = match command {
        Command::Frame => commands::frame(&scenario(config, true)?, &config.model)?,
        Command::Strains => commands::strains(&scenario(config, true)?, &config.model)?,
        Command::Energy => commands::energy(&scenario(config, false)?, &config.model, config.grid, config.quad_order)?,
        Command::Minimize => commands::minimize(&scenario(config, false)?, &config.model, config.grid, config.quad_order)?,
        Command::Table => tables::tables(&scenario(config, true)?)?,
        Command::Verify => return verify(config),
    };
    Ok(Outcome { body: render(&doc, config.output), failed: 0 })
}

fn verify(config: &Config) -> Result<Outcome, Failure> {
    let mut tol = Tolerances::default();
    for (k, v) in &config.tols {
        tol.set(k, *v)?;
    }
    let suite = config.suite.as_deref().unwrap_or("all");
    if !matches!(suite, "all" | "default") && !CHECK_IDS.contains(&suite) {
        return Err(Failure::Usage(format!("unknown suite {suite:?} (a check id, all or default)")));
    }
    let mut reports: Vec<CheckReport> = Vec::new();
    match read_spec(config)? {
        None => {
            for (id, spec) in default_suite() {
                if suite == id || matches!(suite, "all" | "default") {
                    reports.push(run_check(id, &with_points(spec, config, true)?, &tol)?);
                }
            }
        }
        Some(spec) => {
            let s = with_points(spec, config, true)?;
            if matches!(suite, "all" | "default") {
                for id in CHECK_IDS.iter().filter(|id| compatible(id, &s.spec)) {
                    reports.push(run_check(id, &s, &tol)?);
                }
            } else {
                reports.push(run_check(suite, &s, &tol)?);
            }
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    let body = match config.output {
        Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n",
        Format::Csv => render::reports_csv(&reports),
        Format::Pretty => render::reports_pretty(&reports),
    };
    Ok(Outcome { body, failed })
}

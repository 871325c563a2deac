use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "shellstrain", version, about = "Shell strain measures, energies and property checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: Config,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Fundamental forms and curvatures at the sample points.
    Frame,
    /// Strain tensors of one model at the sample points.
    Strains,
    /// Shell energy and its thickness-weighted breakdown.
    Energy,
    /// Run named property checks.
    Verify,
    /// Minimize a linear shell energy on a spline grid.
    Minimize,
    /// Cells of the model-comparison tables, as tensors and equality residuals.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Config {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Model selector; its meaning depends on the command.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Evaluation point `x1,x2`; repeatable.
    #[arg(long = "point", global = true, value_parser = parse_point, allow_hyphen_values = true)]
    pub points: Vec<[f64; 2]>,
    /// `N1xN2`: cell-centred sample points, quadrature cells for `energy`, control points for `minimize`.
    #[arg(long, global = true, value_parser = parse_grid)]
    pub grid: Option<[usize; 2]>,
    /// Gauss-Legendre points per direction and cell.
    #[arg(long, global = true)]
    pub quad_order: Option<usize>,
    /// Tolerance override `NAME=VALUE`; repeatable.
    #[arg(long = "tol", global = true, value_parser = parse_tol)]
    pub tols: Vec<(String, f64)>,
    /// Check id, `all` or `default`.
    #[arg(long, global = true)]
    pub suite: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub output: Format,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected x1,x2, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let p = [num(a)?, num(b)?];
    if p.iter().all(|c| c.is_finite()) {
        Ok(p)
    } else {
        Err(format!("non-finite point {s:?}"))
    }
}

fn parse_grid(s: &str) -> Result<[usize; 2], String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected N1xN2, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    let g = [num(a)?, num(b)?];
    if g.contains(&0) {
        return Err("grid dimensions must be positive".into());
    }
    Ok(g)
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got {s:?}"))?;
    let v = v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_parsers() {
        assert_eq!(parse_point("0.5,-0.25").unwrap(), [0.5, -0.25]);
        assert!(parse_point("0.5").is_err());
        assert!(parse_point("nan,1").is_err());
        assert_eq!(parse_grid("8x6").unwrap(), [8, 6]);
        assert!(parse_grid("8").is_err());
        assert!(parse_grid("0x4").is_err());
        assert_eq!(parse_tol("rigid=1e-6").unwrap(), ("rigid".to_string(), 1e-6));
        assert!(parse_tol("rigid").is_err());
    }

    #[test]
    fn global_flags_after_subcommand() {
        let cli = Cli::try_parse_from(["shellstrain", "frame", "--point", "0.1,0.2", "--point", "0.3,0.4", "--output", "csv"])
            .unwrap();
        assert_eq!(cli.command, Command::Frame);
        assert_eq!(cli.config.points.len(), 2);
        assert_eq!(cli.config.output, Format::Csv);
    }
}

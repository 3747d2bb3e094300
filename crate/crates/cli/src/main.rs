//! `singular-geom`: catenaries, residual fields, ruled-surface sweeps, mesh
//! export and variational demos from the command line.

mod commands;
mod config;
mod surfaces;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use config::Failure;

#[derive(Parser, Debug)]
#[command(name = "singular-geom", version, about = "Numerical experiments on singular minimal and maximal surfaces")]
struct Cli {
    /// JSON file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate a planar α-catenary and write the polyline as CSV.
    Catenary(CatenaryArgs),
    /// Evaluate the singular-minimality residual of a surface on a grid.
    Residual(ResidualArgs),
    /// Randomized search for non-cylindrical ruled solutions.
    Sweep(SweepArgs),
    /// Write a surface as a triangulated OBJ mesh.
    ExportMesh(MeshArgs),
    /// Gradient descent of the α-energy of a height field.
    Variational(VariationalArgs),
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CatenaryArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Starting horizontal coordinate.
    #[arg(long)]
    pub u0: Option<f64>,
    /// Starting height above the plane orthogonal to v; must be positive.
    #[arg(long)]
    pub y0: Option<f64>,
    /// Starting tangent angle (radians).
    #[arg(long)]
    pub theta0: Option<f64>,
    #[arg(long)]
    pub length: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Output CSV; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ResidualArgs {
    /// plane, catenary-cylinder, helicoid, sphere, hyperboloid, lightlike-reference or file.
    #[arg(long)]
    pub surface: Option<String>,
    /// Height-field CSV (`i,j,x,y,z`) for `--surface file`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// euclid or lorentz.
    #[arg(long)]
    pub metric: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Direction `x,y,z`; normalized.
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    /// `N` or `NxM`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Output CSV `s,t,residual`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepArgs {
    /// euclid or lorentz.
    #[arg(long)]
    pub metric: Option<String>,
    /// standard, delta-plus, delta-minus, nondegenerate or lightlike.
    #[arg(long)]
    pub class: Option<String>,
    /// random or helicoid.
    #[arg(long)]
    pub family: Option<String>,
    /// Number of surfaces.
    #[arg(long)]
    pub n: Option<usize>,
    /// Parameter samples per surface.
    #[arg(long)]
    pub samples: Option<usize>,
    /// `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_range: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output JSON report; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct MeshArgs {
    #[arg(long)]
    pub surface: Option<String>,
    /// Metric whose normal fixes the triangle orientation.
    #[arg(long)]
    pub metric: Option<String>,
    /// α of the catenary cylinder.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub v: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Serialize, Deserialize)]
#[command(allow_negative_numbers = true)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VariationalArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Step size; defaults to 0.1 min(dx, dy)².
    #[arg(long)]
    pub rate: Option<f64>,
    /// flat, catenary or noisy.
    #[arg(long)]
    pub init: Option<String>,
    /// Relative amplitude of the `noisy` initialization.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Writes `<prefix>_field.csv` and `<prefix>_trace.csv`.
    #[arg(long)]
    pub out_prefix: Option<String>,
}

fn run() -> Result<(), Failure> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => Failure::USAGE,
            };
            let _ = e.print();
            return if code == 0 { Ok(()) } else { Err(Failure::new(code, String::new())) };
        }
    };
    let cfg = cli.config.as_deref();
    match &cli.command {
        Command::Catenary(a) => commands::catenary(config::merge(a, cfg)?),
        Command::Residual(a) => commands::residual(config::merge(a, cfg)?),
        Command::Sweep(a) => commands::sweep(config::merge(a, cfg)?),
        Command::ExportMesh(a) => commands::export_mesh(config::merge(a, cfg)?),
        Command::Variational(a) => commands::variational(config::merge(a, cfg)?),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

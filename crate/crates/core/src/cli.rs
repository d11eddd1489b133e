//! Command-line configuration, suite dispatch and report serialization.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bubbles::{Bubble2DParams, Bubble3DParams, BubbleParams};
use crate::fields::Point;
use crate::quadrature::QuadratureConfig;
use crate::verify::{
    run_identities_grid, run_ie2d_grid, run_ie3d_grid, run_pde2d_grid, run_pde3d_grid, verify_inequalities,
    verify_kelvin, VerificationReport, DEFAULT_SEED,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pde2d,
    Ie2d,
    Pde3d,
    Ie3d,
    Identities,
    Kelvin,
    Inequalities,
    All,
}

impl Suite {
    pub fn id(self) -> &'static str {
        match self {
            Suite::Pde2d => "pde2d",
            Suite::Ie2d => "ie2d",
            Suite::Pde3d => "pde3d",
            Suite::Ie3d => "ie3d",
            Suite::Identities => "identities",
            Suite::Kelvin => "kelvin",
            Suite::Inequalities => "inequalities",
            Suite::All => "all",
        }
    }

    fn uses_planar(self) -> bool {
        matches!(self, Suite::Pde2d | Suite::Ie2d | Suite::Identities | Suite::Kelvin | Suite::All)
    }

    fn uses_hartree(self) -> bool {
        matches!(self, Suite::Pde3d | Suite::Ie3d | Suite::Identities | Suite::Kelvin | Suite::All)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub suite: Suite,
    pub planar: Vec<Bubble2DParams>,
    pub hartree: Vec<Bubble3DParams>,
    pub quadrature: QuadratureConfig,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub seed: u64,
}

/// Verification runs for bubble solutions of half-Laplacian systems.
#[derive(Parser, Debug)]
#[command(name = "bubblekit", version, about)]
struct Args {
    /// Suite to run.
    #[arg(long, value_enum)]
    suite: Suite,
    /// Exponent p of the planar system (replaces the default p axis).
    #[arg(long)]
    p: Option<f64>,
    /// Concentration μ (replaces the default μ axis of both families).
    #[arg(long)]
    mu: Option<f64>,
    /// Hartree exponent σ (replaces the default σ axis).
    #[arg(long)]
    sigma: Option<f64>,
    /// Bubble center as comma-separated coordinates; its length selects the family.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    center: Option<Vec<f64>>,
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long)]
    tol: Option<f64>,
    /// Output file; the extension is set from --format.
    #[arg(long, default_value = "bubblekit-report")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Seed for the randomized checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

const DEFAULT_P: [f64; 3] = [1.0, 1.5, 3.0];
const DEFAULT_PLANAR_MU: [f64; 3] = [0.5, 1.0, 2.0];
const DEFAULT_SIGMA: [f64; 3] = [1.3, 2.0, 2.5];
const DEFAULT_HARTREE_MU: [f64; 2] = [1.0, 2.0];

fn invalid(msg: impl std::fmt::Display) -> clap::Error {
    clap::Error::raw(clap::error::ErrorKind::ValueValidation, format!("{msg}\n"))
}

/// Parses command-line flags (without the program name).
///
/// Given flags replace single axes of the default parameter grids; the
/// remaining axes keep their defaults.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut full: Vec<std::ffi::OsString> = vec!["bubblekit".into()];
    full.extend(argv.into_iter().map(Into::into));
    let args = Args::try_parse_from(full)?;

    let center = match &args.center {
        Some(c) => Some(Point::new(c).map_err(invalid)?),
        None => None,
    };
    if let Some(c) = &center {
        let fits = (c.dim() == 2 && args.suite.uses_planar()) || (c.dim() == 3 && args.suite.uses_hartree());
        if !fits {
            return Err(invalid(format!(
                "--center has {} coordinates, which no bubble family of suite {} uses",
                c.dim(),
                args.suite.id()
            )));
        }
    }
    let planar_centers = match center {
        Some(c) if c.dim() == 2 => vec![c],
        _ => vec![Point::xy(0.0, 0.0), Point::xy(1.0, -0.5)],
    };
    let hartree_centers = match center {
        Some(c) if c.dim() == 3 => vec![c],
        _ => vec![Point::xyz(0.0, 0.0, 0.0)],
    };
    let ps = args.p.map_or(DEFAULT_P.to_vec(), |p| vec![p]);
    let planar_mus = args.mu.map_or(DEFAULT_PLANAR_MU.to_vec(), |m| vec![m]);
    let sigmas = args.sigma.map_or(DEFAULT_SIGMA.to_vec(), |s| vec![s]);
    let hartree_mus = args.mu.map_or(DEFAULT_HARTREE_MU.to_vec(), |m| vec![m]);

    let mut planar = Vec::new();
    for &p in &ps {
        for &mu in &planar_mus {
            for c in &planar_centers {
                planar.push(Bubble2DParams::new(p, mu, *c).map_err(invalid)?);
            }
        }
    }
    let mut hartree = Vec::new();
    for &sigma in &sigmas {
        for &mu in &hartree_mus {
            for c in &hartree_centers {
                hartree.push(Bubble3DParams::new(sigma, mu, *c).map_err(invalid)?);
            }
        }
    }

    let mut quadrature = QuadratureConfig::default();
    if let Some(t) = args.tol {
        quadrature.rel_tol = t;
    }
    quadrature.validate().map_err(invalid)?;

    Ok(RunConfig {
        suite: args.suite,
        planar,
        hartree,
        quadrature,
        output_path: args.out.with_extension(args.format.extension()),
        output_format: args.format,
        seed: args.seed,
    })
}

fn run_single(suite: Suite, config: &RunConfig) -> crate::Result<VerificationReport> {
    let cfg = &config.quadrature;
    match suite {
        Suite::Pde2d => run_pde2d_grid(&config.planar, cfg),
        Suite::Ie2d => run_ie2d_grid(&config.planar, cfg),
        Suite::Pde3d => run_pde3d_grid(&config.hartree, cfg),
        Suite::Ie3d => run_ie3d_grid(&config.hartree, cfg),
        Suite::Identities => run_identities_grid(&config.planar, &config.hartree, config.seed, cfg),
        Suite::Kelvin => {
            let params: Vec<BubbleParams> = config
                .planar
                .iter()
                .copied()
                .map(BubbleParams::Planar)
                .chain(config.hartree.iter().copied().map(BubbleParams::Hartree))
                .collect();
            verify_kelvin(&params)
        }
        Suite::Inequalities => verify_inequalities(config.seed, cfg),
        Suite::All => unreachable!("expanded by run"),
    }
}

/// Runs the requested suite; `all` runs every suite and merges the reports.
pub fn run(config: &RunConfig) -> anyhow::Result<VerificationReport> {
    let run_echo = serde_json::to_value(config)?;
    if config.suite == Suite::All {
        let mut parts = Vec::new();
        for s in [
            Suite::Pde2d,
            Suite::Ie2d,
            Suite::Pde3d,
            Suite::Ie3d,
            Suite::Identities,
            Suite::Kelvin,
            Suite::Inequalities,
        ] {
            parts.push(run_single(s, config).with_context(|| format!("suite {}", s.id()))?);
        }
        let details: Vec<_> = parts.iter().map(|p| p.config_echo.clone()).collect();
        return Ok(VerificationReport::merge(
            "all",
            parts,
            serde_json::json!({ "run": run_echo, "suites": details }),
        ));
    }
    let mut report = run_single(config.suite, config).with_context(|| format!("suite {}", config.suite.id()))?;
    report.config_echo = serde_json::json!({ "run": run_echo, "suite": report.config_echo });
    Ok(report)
}

/// JSON formatter printing every float with 17 significant digits.
struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// The CSV column header.
pub const CSV_HEADER: [&str; 7] = ["suite_id", "equation_id", "probe", "lhs", "rhs", "abs_err", "rel_err"];

/// Writes the report as pretty JSON.
pub fn write_json<W: Write>(report: &VerificationReport, writer: W) -> anyhow::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, FullPrecision);
    report.serialize(&mut ser)?;
    Ok(())
}

/// Writes one CSV row per record; probes are space-separated coordinates.
pub fn write_csv<W: Write>(report: &VerificationReport, writer: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    for r in &report.records {
        let probe: Vec<String> = r.probe.coords().iter().map(|c| num(*c)).collect();
        w.write_record([
            report.suite_id.clone(),
            r.equation_id.clone(),
            probe.join(" "),
            num(r.lhs),
            num(r.rhs),
            num(r.abs_err),
            num(r.rel_err),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_json(path: &Path) -> anyhow::Result<VerificationReport> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(serde_json::from_reader(std::io::BufReader::new(file))?)
}

/// Writes the report to `config.output_path` in `config.output_format`.
pub fn emit_report(report: &VerificationReport, config: &RunConfig) -> anyhow::Result<PathBuf> {
    let path = config.output_path.clone();
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    match config.output_format {
        OutputFormat::Json => write_json(report, &mut out)?,
        OutputFormat::Csv => write_csv(report, &mut out)?,
    }
    out.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

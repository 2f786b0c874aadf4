use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use cdf_compact::family::FamilySpec;
use cdf_compact::rational::parse_rational;
use cdf_compact::Rational;
use cdf_compact_cli::render;
use cdf_compact_cli::report::{self, Config, Document};
use cdf_compact_cli::spec::parse_family_spec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cdfc",
    version,
    about = "Exact gauges and compactness indices for families of CDFs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pairwise uniform, Lévy and phi distances between family members
    Metrics(Run),
    /// Escape index, tightness and limit operator brackets
    Indices(Run),
    /// Two-sided compactness bracket checked at tolerance eps
    ProkhorovCheck(Run),
    /// Index chain for the family
    Theorem22(Run),
    /// All of the above as one Markdown document with a plot
    Report(Run),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
    SvgPlot,
}

#[derive(Args)]
struct Run {
    /// JSON family description
    input: PathBuf,
    /// Tolerance, as p/q
    #[arg(long, default_value = "1/100", value_parser = rational_arg)]
    eps: Rational,
    /// Grid depth n for alpha = gamma = 1/n
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    grid_depth: u32,
    /// Lévy parameter (repeatable)
    #[arg(long = "gamma", value_parser = rational_arg)]
    gammas: Vec<Rational>,
    /// phi parameter (repeatable)
    #[arg(long = "alpha", value_parser = rational_arg)]
    alphas: Vec<Rational>,
    /// Half-width M of the Helly window [-M, M]
    #[arg(long, value_parser = rational_arg)]
    window: Option<Rational>,
    /// Seed for the randomised sample in reports
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Members taken from each tail in pairwise tables
    #[arg(long, default_value_t = 2)]
    members: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    let r = parse_rational(s).ok_or_else(|| format!("`{s}` is not a rational p/q"))?;
    if r <= Rational::from_integer(0.into()) {
        return Err(format!("`{s}` must be positive"));
    }
    Ok(r)
}

fn fail(kind: &str, fields: serde_json::Value) -> ExitCode {
    let mut record = json!({ "error": kind });
    if let (Some(r), Some(f)) = (record.as_object_mut(), fields.as_object()) {
        r.extend(f.clone());
    }
    eprintln!("{record}");
    ExitCode::from(2)
}

type Compute = fn(&FamilySpec, &Config) -> cdf_compact::Result<Document>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (run, compute, default_format): (&Run, Compute, Format) = match &cli.command {
        Command::Metrics(r) => (r, report::metrics, Format::Csv),
        Command::Indices(r) => (r, report::indices, Format::Csv),
        Command::ProkhorovCheck(r) => (r, report::prokhorov_check, Format::Csv),
        Command::Theorem22(r) => (r, report::theorem22, Format::Markdown),
        Command::Report(r) => (r, report::report, Format::Markdown),
    };

    let text = match fs::read_to_string(&run.input) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                "io",
                json!({ "path": run.input.display().to_string(), "message": e.to_string() }),
            )
        }
    };
    let family = match parse_family_spec(&text) {
        Ok(f) => f,
        Err(e) => return fail("input", json!({ "field": e.path, "message": e.message })),
    };
    let defaults = Config::default();
    let cfg = Config {
        eps: run.eps.clone(),
        grid_depth: run.grid_depth as usize,
        gammas: if run.gammas.is_empty() {
            defaults.gammas
        } else {
            run.gammas.clone()
        },
        alphas: if run.alphas.is_empty() {
            defaults.alphas
        } else {
            run.alphas.clone()
        },
        window: run.window.clone(),
        seed: run.seed,
        members: run.members,
    };
    let doc = match compute(&family, &cfg) {
        Ok(d) => d,
        Err(e) => return fail("computation", json!({ "message": e.to_string() })),
    };

    let rendered = match run.format.unwrap_or(default_format) {
        Format::Csv => render::csv(&doc),
        Format::Markdown => render::markdown(&doc),
        Format::SvgPlot => match &doc.plot {
            Some(p) => render::svg(p),
            None => return fail("format", json!({ "message": "this command produces no plot" })),
        },
    };
    let written = match &run.out {
        Some(path) => fs::write(path, rendered),
        None => {
            print!("{rendered}");
            Ok(())
        }
    };
    if let Err(e) = written {
        return fail("io", json!({ "message": e.to_string() }));
    }

    let failed: Vec<_> = doc.contracts.iter().filter(|c| !c.passed).collect();
    for c in &failed {
        eprintln!(
            "{}",
            json!({ "error": "contract", "contract": c.name, "detail": c.detail })
        );
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

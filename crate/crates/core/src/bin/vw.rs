use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vw::bench::{bench_grid, format_csv};
use vw::error::{exit_code, Error, Result};
use vw::gen::random_general_position;
use vw::geometry::{validate_general_position, GpStatus, PointSet};
use vw::input::parse_sites;
use vw::memory::OutputSink;
use vw::oracle::{oracle_records, verify_run};
use vw::record::{parse_records, Record};
use vw::run::{execute, RunMode, RunOptions};
use vw::svg::{render_svg, Viewport};

/// Voronoi diagrams of every order in bounded workspace.
#[derive(Parser)]
#[command(name = "vw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a site file is in general position.
    Validate { file: PathBuf },
    /// Compute a diagram and write its edge records.
    Run {
        file: PathBuf,
        /// nvd, fvd or order.
        #[arg(long, default_value = "nvd")]
        mode: RunMode,
        /// Highest order in order mode.
        #[arg(long = "max-k")]
        max_k: Option<usize>,
        /// Workspace parameter s; without it nvd/fvd use constant workspace.
        #[arg(long)]
        workspace: Option<usize>,
        /// Abort as soon as the workspace budget is exceeded.
        #[arg(long)]
        enforce: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Record output; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the run report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Include wall time in the report.
        #[arg(long)]
        timing: bool,
    },
    /// Compare a record stream with brute-force diagrams.
    Verify {
        file: PathBuf,
        records: PathBuf,
        /// Require every order from 1 to this one to be present.
        #[arg(long = "max-k")]
        max_k: Option<usize>,
    },
    /// Draw a record stream as SVG.
    Svg {
        records: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// xmin,ymin,xmax,ymax; fitted to the data when absent.
        #[arg(long, allow_hyphen_values = true)]
        viewport: Option<String>,
        /// Site file, drawn as dots and used to place edges unbounded at both ends.
        #[arg(long)]
        sites: Option<PathBuf>,
    },
    /// Measure reads and peak workspace over a grid of parameters.
    Bench {
        /// Site file; use --random instead to generate one.
        file: Option<PathBuf>,
        /// Generate this many random sites.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value = "nvd")]
        mode: RunMode,
        /// Comma-separated workspace sizes; 0 selects constant workspace.
        #[arg(long = "s-list", value_delimiter = ',', default_value = "0")]
        s_list: Vec<usize>,
        /// Comma-separated highest orders for order mode.
        #[arg(long = "k-list", value_delimiter = ',', default_value = "1")]
        k_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validate(file: &Path) -> Result<i32> {
    let points = parse_sites(&read(file)?)?;
    match validate_general_position(points.sites())? {
        GpStatus::Exhaustive => println!("ok: {} sites in general position", points.len()),
        GpStatus::Sampled(m) => println!("ok: {} sites; cocircularity sampled over {m} quadruples", points.len()),
    }
    Ok(0)
}

/// Whether an order's records name each edge twice, once per side.
fn is_directed(k: usize, n: usize, recs: &[&Record]) -> bool {
    (k != 1 && k + 1 != n) || recs.iter().any(|r| r.pair.0 > r.pair.1)
}

fn verify(file: &Path, records: &Path, max_k: Option<usize>) -> Result<i32> {
    let points = parse_sites(&read(file)?)?;
    validate_general_position(points.sites())?;
    let recs = parse_records(&read(records)?)?;
    let mut by_order: BTreeMap<usize, Vec<&Record>> = BTreeMap::new();
    for r in &recs {
        by_order.entry(r.k).or_default().push(r);
    }
    for k in 1..=max_k.unwrap_or(0) {
        by_order.entry(k).or_default();
    }
    let n = points.len();
    let mut clean = true;
    for (k, rs) in by_order {
        if k == 0 || k >= n {
            println!("k={k} invalid order for {n} sites");
            clean = false;
            continue;
        }
        let expected = oracle_records(&points, k, is_directed(k, n, &rs));
        let owned: Vec<Record> = rs.into_iter().cloned().collect();
        let report = verify_run(&owned, &expected, &points);
        println!("k={k} {} {}", if report.is_clean() { "ok" } else { "defects" }, report.summary());
        clean &= report.is_clean();
    }
    Ok(if clean { 0 } else { 6 })
}

fn main() -> ExitCode {
    // Usage errors count as configuration errors; 2 is kept for degenerate input.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 5 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Validate { file } => validate(&file),
        Command::Run { file, mode, max_k, workspace, enforce, seed, out, report, timing } => (|| {
            let points = parse_sites(&read(&file)?)?;
            let opts = RunOptions { mode, max_k, s: workspace, enforce, seed };
            let mut sink = match &out {
                Some(p) => OutputSink::writer(Box::new(io::BufWriter::new(fs::File::create(p)?))),
                None => OutputSink::writer(Box::new(io::BufWriter::new(io::stdout()))),
            };
            let r = execute(points, &opts, &mut sink)?;
            let line = r.render(timing);
            eprintln!("{line}");
            if let Some(p) = report {
                fs::write(p, format!("{line}\n"))?;
            }
            Ok(0)
        })(),
        Command::Verify { file, records, max_k } => verify(&file, &records, max_k),
        Command::Svg { records, out, viewport, sites } => (|| {
            let recs = parse_records(&read(&records)?)?;
            let sites: Option<PointSet> = sites.map(|p| parse_sites(&read(&p)?)).transpose()?;
            let viewport = viewport.map(|v| Viewport::parse(&v)).transpose()?;
            fs::write(out, render_svg(&recs, sites.as_ref(), viewport))?;
            Ok(0)
        })(),
        Command::Bench { file, random, mode, s_list, k_list, repeats, seed, out } => (|| {
            let points = match (file, random) {
                (Some(f), None) => parse_sites(&read(&f)?)?,
                (None, Some(n)) => random_general_position(n, seed),
                _ => return Err(Error::Config("give either a site file or --random N".into())),
            };
            validate_general_position(points.sites())?;
            let rows = bench_grid(&points, mode, &s_list, &k_list, repeats, seed)?;
            write_out(out.as_deref(), &format_csv(&rows))?;
            Ok(0)
        })(),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

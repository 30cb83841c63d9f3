mod svg;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use boxlab_core::io::{read_box, to_json, write_box, write_curves_csv, write_scan_csv};
use boxlab_core::protocol::{min_violating_depth, simulate, ProtocolResult};
use boxlab_core::slices::{analytic_curves, scan, SliceSpec, DEFAULT_RESOLUTION};
use boxlab_core::{classify_with, mix, NsBox, Vertex, VertexKind};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "boxlab",
    version,
    about = "Non-signalling boxes, quantum criteria and information causality"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Nl,
    Local,
}

impl From<Kind> for VertexKind {
    fn from(kind: Kind) -> VertexKind {
        match kind {
            Kind::Nl => VertexKind::Nonlocal,
            Kind::Local => VertexKind::Local,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write one of the 24 extremal boxes.
    Vertex {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Three bits for non-local vertices, four for local ones.
        #[arg(long)]
        bits: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convex combination of box files.
    Mix {
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        boxes: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check normalisation, positivity and no-signalling.
    Validate {
        #[arg(long = "box")]
        path: PathBuf,
    },
    /// Evaluate CHSH, TLM, NPA and IC.
    Classify {
        #[arg(long = "box")]
        path: PathBuf,
        /// Evaluate IC in the given orientation only.
        #[arg(long)]
        no_symmetries: bool,
    },
    /// Classify every node of a slice grid.
    Scan {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        family: u8,
        #[arg(long)]
        vertex: String,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
        /// Maximise IC over relabellings instead of the raw orientation.
        #[arg(long)]
        ic_symmetries: bool,
    },
    /// Write the analytic boundary curves of a slice.
    Curves {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        family: u8,
        #[arg(long)]
        vertex: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the nested random access protocol.
    Protocol {
        #[arg(long = "box")]
        path: PathBuf,
        #[arg(long)]
        n: u32,
        /// Also report the smallest violating depth up to MAX.
        #[arg(long, value_name = "MAX")]
        find_min_depth: Option<u32>,
    },
    /// Write scan CSV, curve CSV and SVG for one of the three reference slices.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        number: u8,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
}

fn load(path: &Path) -> Result<NsBox> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_box(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn write_with<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> io::Result<()>,
{
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("writing {}", path.display()))
}

fn slice_spec(family: u8, bits: &str, resolution: usize) -> Result<SliceSpec> {
    let kind = if family == 1 {
        VertexKind::Nonlocal
    } else {
        VertexKind::Local
    };
    Ok(SliceSpec::new(Vertex::parse(kind, bits)?, resolution)?)
}

#[derive(Serialize)]
struct DepthSearch {
    result: ProtocolResult,
    min_violating_depth: Option<u32>,
}

fn protocol(bx: &NsBox, n: u32, find_min_depth: Option<u32>) -> Result<String> {
    let result = simulate(bx, n)?;
    Ok(match find_min_depth {
        None => to_json(&result),
        Some(max) => to_json(&DepthSearch {
            result,
            min_violating_depth: min_violating_depth(bx, max)?,
        }),
    })
}

fn figure(number: u8, outdir: &Path, resolution: usize) -> Result<()> {
    let spec = SliceSpec::figure(number, resolution)?;
    let grid = scan(&spec)?;
    let curves = analytic_curves(&spec);
    fs::create_dir_all(outdir).with_context(|| format!("creating {}", outdir.display()))?;
    write_with(&outdir.join(format!("figure{number}_scan.csv")), |w| {
        write_scan_csv(&grid, w)
    })?;
    write_with(&outdir.join(format!("figure{number}_curves.csv")), |w| {
        write_curves_csv(&curves, w)
    })?;
    let title = format!("α PR + β {} + (1 − α − β) 𝟙", spec.vertex());
    let svg = svg::render(&grid, &curves, &title);
    let path = outdir.join(format!("figure{number}.svg"));
    fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("BOXLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => bail!("BOXLAB_THREADS must be a positive integer, got {value:?}"),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match cli.command {
        Command::Vertex { kind, bits, out } => {
            let vertex = Vertex::parse(kind.into(), &bits)?;
            emit(&write_box(&vertex.to_box()), out.as_deref())?;
        }
        Command::Mix {
            weights,
            boxes,
            out,
        } => {
            let loaded = boxes.iter().map(|p| load(p)).collect::<Result<Vec<_>>>()?;
            for (bx, path) in loaded.iter().zip(&boxes) {
                bx.ensure_valid()
                    .with_context(|| format!("checking {}", path.display()))?;
            }
            emit(&write_box(&mix(&weights, &loaded)?), out.as_deref())?;
        }
        Command::Validate { path } => {
            let report = load(&path)?.validate();
            print!("{}", to_json(&report));
            return Ok(report.is_valid());
        }
        Command::Classify {
            path,
            no_symmetries,
        } => {
            let c = classify_with(&load(&path)?, !no_symmetries)?;
            print!("{}", to_json(&c));
        }
        Command::Scan {
            family,
            vertex,
            resolution,
            out,
            ic_symmetries,
        } => {
            let spec = slice_spec(family, &vertex, resolution)?.with_ic_symmetries(ic_symmetries);
            let grid = scan(&spec)?;
            write_with(&out, |w| write_scan_csv(&grid, w))?;
        }
        Command::Curves {
            family,
            vertex,
            out,
        } => {
            let curves = analytic_curves(&slice_spec(family, &vertex, 2)?);
            write_with(&out, |w| write_curves_csv(&curves, w))?;
        }
        Command::Protocol {
            path,
            n,
            find_min_depth,
        } => {
            print!("{}", protocol(&load(&path)?, n, find_min_depth)?);
        }
        Command::Figure {
            number,
            outdir,
            resolution,
        } => figure(number, &outdir, resolution)?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
